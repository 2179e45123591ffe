//! Finitely generated Borel subsets of the line: disjoint open intervals
//! plus finitely many points. This is the class every restriction,
//! evaluation, and brute-force partition argument in the engine runs over.

use crate::error::{Error, Result};
use crate::rational::{format_rational, Rational};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BorelSet {
    intervals: Vec<(Rational, Rational)>,
    points: Vec<Rational>,
}

impl BorelSet {
    pub fn empty() -> Self {
        BorelSet {
            intervals: Vec::new(),
            points: Vec::new(),
        }
    }

    pub fn new(
        mut intervals: Vec<(Rational, Rational)>,
        mut points: Vec<Rational>,
    ) -> Result<Self> {
        intervals.retain(|(a, b)| a < b);
        intervals.sort_by(|x, y| x.0.cmp(&y.0));
        for w in intervals.windows(2) {
            if w[1].0 < w[0].1 {
                return Err(Error::Invalid(format!(
                    "overlapping intervals ({}, {}) and ({}, {})",
                    format_rational(&w[0].0),
                    format_rational(&w[0].1),
                    format_rational(&w[1].0),
                    format_rational(&w[1].1),
                )));
            }
        }
        points.sort();
        points.dedup();
        // A point interior to an interval is redundant.
        points.retain(|p| !intervals.iter().any(|(a, b)| a < p && p < b));
        Ok(BorelSet { intervals, points })
    }

    pub fn interval(a: Rational, b: Rational) -> Self {
        BorelSet::new(vec![(a, b)], Vec::new()).expect("single interval")
    }

    pub fn point(x: Rational) -> Self {
        BorelSet {
            intervals: Vec::new(),
            points: vec![x],
        }
    }

    pub fn points_set(xs: Vec<Rational>) -> Self {
        BorelSet::new(Vec::new(), xs).expect("points only")
    }

    pub fn intervals(&self) -> &[(Rational, Rational)] {
        &self.intervals
    }

    pub fn points(&self) -> &[Rational] {
        &self.points
    }

    pub fn is_empty_set(&self) -> bool {
        self.intervals.is_empty() && self.points.is_empty()
    }

    pub fn contains(&self, x: &Rational) -> bool {
        self.points.binary_search(x).is_ok() || self.intervals.iter().any(|(a, b)| a < x && x < b)
    }

    /// Union of two sets known (and checked) to be disjoint.
    pub fn disjoint_union(&self, other: &BorelSet) -> Result<BorelSet> {
        for p in other.points() {
            if self.contains(p) {
                return Err(Error::Invalid("sets are not disjoint".into()));
            }
        }
        for p in self.points() {
            if other.contains(p) {
                return Err(Error::Invalid("sets are not disjoint".into()));
            }
        }
        let mut intervals = self.intervals.clone();
        intervals.extend(other.intervals.iter().cloned());
        let mut points = self.points.clone();
        points.extend(other.points.iter().cloned());
        BorelSet::new(intervals, points)
    }

    /// Total length of the interval part.
    pub fn length(&self) -> Rational {
        self.intervals.iter().map(|(a, b)| b - a).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    #[test]
    fn normalization_drops_interior_points() {
        let s = BorelSet::new(vec![(int(0), int(1))], vec![rat(1, 2), int(1), int(2)]).unwrap();
        assert_eq!(s.points(), &[int(1), int(2)]);
        assert!(s.contains(&rat(1, 2)));
        assert!(s.contains(&int(2)));
        assert!(!s.contains(&rat(3, 2)));
        assert!(!s.contains(&int(0)));
    }

    #[test]
    fn overlap_rejected_touching_allowed() {
        assert!(BorelSet::new(vec![(int(0), int(2)), (int(1), int(3))], vec![]).is_err());
        let s = BorelSet::new(vec![(int(0), int(1)), (int(1), int(2))], vec![]).unwrap();
        assert!(!s.contains(&int(1)));
    }
}
