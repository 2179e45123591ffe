//! The middle-thirds staircase measure, exactly.
//!
//! The staircase CDF of a rational point is computed exactly: the triadic
//! digit expansion of a rational is eventually periodic, so its binary
//! staircase value is a finite prefix plus a geometric tail. Polynomial
//! moments of the measure satisfy a closed linear recurrence from
//! self-similarity, which makes integrals of polynomials against the
//! measure exact as well. Only integrals over windows whose endpoints
//! never resolve to a triadic cell (they exist: 1/4 is such a point)
//! carry a certified error bound, with tail mass 2^-depth.

use num_traits::{One, Zero};
use std::collections::HashMap;

use crate::poly::Poly;
use crate::rational::{int, rat, Bounded, Rational};

const QUAD_DEPTH: u32 = 64;

/// Where a point of [0, 1] sits relative to the Cantor set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PointClass {
    /// In the Cantor set (including gap edges and 0, 1).
    InSet,
    /// Strictly inside the removed open gap (lo, hi).
    InGap { lo: Rational, hi: Rational },
}

/// Exact staircase CDF together with the point classification.
pub fn analyze(t: &Rational) -> (Rational, PointClass) {
    let zero = Rational::zero();
    let one = Rational::one();
    if *t <= zero {
        return (zero, PointClass::InSet);
    }
    if *t >= one {
        return (one, PointClass::InSet);
    }
    let mut state = t.clone();
    let mut acc = Rational::zero();
    let mut pow = rat(1, 2); // 2^{-k} for the current digit k
    let mut cell_lo = Rational::zero();
    let mut cell_w = Rational::one();
    let mut seen: HashMap<Rational, (Rational, Rational)> = HashMap::new();
    loop {
        if state.is_zero() {
            return (acc, PointClass::InSet);
        }
        if let Some((acc0, pow0)) = seen.get(&state) {
            // Bits between the two visits repeat forever:
            // value = acc0 + (acc - acc0) / (1 - pow/pow0).
            let block = &acc - acc0;
            let ratio = &pow / pow0; // 2^{-period}
            let tail = block / (Rational::one() - ratio);
            return (acc0 + tail, PointClass::InSet);
        }
        seen.insert(state.clone(), (acc.clone(), pow.clone()));
        let tripled = &state * int(3);
        let digit: i64 = if tripled < one {
            0
        } else if tripled < int(2) {
            1
        } else {
            2
        };
        let rem = &tripled - int(digit);
        if digit == 1 {
            let gap_lo = &cell_lo + &cell_w / int(3);
            let gap_hi = &cell_lo + &cell_w * rat(2, 3);
            let value = &acc + &pow;
            if rem.is_zero() {
                // t is the left edge of the gap: a Cantor point.
                return (value, PointClass::InSet);
            }
            return (
                value,
                PointClass::InGap {
                    lo: gap_lo,
                    hi: gap_hi,
                },
            );
        }
        if digit == 2 {
            acc += &pow;
            cell_lo += &cell_w * rat(2, 3);
        }
        cell_w /= int(3);
        pow /= int(2);
        state = rem;
    }
}

/// Exact devil's-staircase value C(t), clamped outside [0, 1].
pub fn cdf(t: &Rational) -> Rational {
    analyze(t).0
}

/// Exact moments m_k = ∫ x^k dμ over [0, 1] for k = 0..=n.
/// Self-similarity gives m_k (3^k - 1) = (1/2) Σ_{j<k} C(k,j) 2^{k-j} m_j.
pub fn moments(n: usize) -> Vec<Rational> {
    let mut m = Vec::with_capacity(n + 1);
    m.push(Rational::one());
    let mut three_k = Rational::one();
    for k in 1..=n {
        three_k *= int(3);
        let mut binom = Rational::one(); // C(k, 0)
        let mut pow2 = Rational::one();
        for _ in 0..k {
            pow2 *= int(2); // 2^{k-j} starting at j = 0
        }
        let mut acc = Rational::zero();
        for (j, mj) in m.iter().enumerate().take(k) {
            acc += &binom * &pow2 * mj;
            // advance C(k, j) -> C(k, j+1), 2^{k-j} -> 2^{k-j-1}
            binom = binom * int((k - j) as i64) / int(j as i64 + 1);
            pow2 /= int(2);
        }
        m.push(acc / (int(2) * (&three_k - Rational::one())));
    }
    m
}

/// ∫ g dμ over the full cell [0, 1], exactly, via moments.
fn integrate_full(g: &Poly) -> Rational {
    if g.is_zero() {
        return Rational::zero();
    }
    let m = moments(g.degree().unwrap_or(0));
    g.coeffs().iter().zip(m.iter()).map(|(c, mk)| c * mk).sum()
}

/// ∫_{[lo, hi]} g dμ in standard coordinates, exact whenever the region
/// resolves into aligned cells within the depth budget.
fn integrate_std(g: &Poly, lo: &Rational, hi: &Rational, depth: u32) -> Bounded {
    let lo = lo.clone().max(Rational::zero());
    let hi = hi.clone().min(Rational::one());
    if lo >= hi {
        return Bounded::zero();
    }
    if lo.is_zero() && hi.is_one() {
        return Bounded::exact(integrate_full(g));
    }
    if depth == 0 {
        let mass = cdf(&hi) - cdf(&lo);
        let mid = (&lo + &hi) / int(2);
        let value = &mass * g.eval(&mid);
        let err = &mass * int(2) * g.sup_bound(&lo, &hi);
        return Bounded::with_err(value, err);
    }
    // μ = (1/2) (s/3)_* μ + (1/2) ((s+2)/3)_* μ
    let g_left = g.compose_affine(&Rational::zero(), &rat(1, 3));
    let g_right = g.compose_affine(&rat(2, 3), &rat(1, 3));
    let three = int(3);
    let left = integrate_std(&g_left, &(&lo * &three), &(&hi * &three), depth - 1);
    let right = integrate_std(
        &g_right,
        &(&lo * &three - int(2)),
        &(&hi * &three - int(2)),
        depth - 1,
    );
    left.add(&right).scale(&rat(1, 2))
}

/// An affine image of the staircase measure, restricted to a window and
/// weighted by an ambient-coordinate polynomial density.
///
/// The represented measure is B ↦ ∫_B weight dν, where ν is the pushforward
/// of (unit-mass staircase restricted to [window.0, window.1]) under the
/// affine map [0,1] → [support.0, support.1].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CantorPart {
    pub support: (Rational, Rational),
    pub window: (Rational, Rational),
    pub weight: Poly,
}

impl CantorPart {
    /// The full staircase of the given signed mass on [a, b].
    pub fn with_mass(a: Rational, b: Rational, mass: Rational) -> Self {
        CantorPart {
            support: (a, b),
            window: (Rational::zero(), Rational::one()),
            weight: Poly::constant(mass),
        }
    }

    pub fn width(&self) -> Rational {
        &self.support.1 - &self.support.0
    }

    fn to_std(&self, x: &Rational) -> Rational {
        (x - &self.support.0) / self.width()
    }

    /// Weight expressed in standard coordinates.
    fn std_weight(&self, extra: Option<&Poly>) -> Poly {
        let combined = match extra {
            Some(f) => self.weight.mul(f),
            None => self.weight.clone(),
        };
        combined.compose_affine(&self.support.0, &self.width())
    }

    /// Signed mass of the whole part.
    pub fn mass(&self) -> Bounded {
        self.eval_interval(&self.support.0.clone(), &self.support.1.clone())
    }

    /// Measure of the ambient interval (a, b); the measure is atomless so
    /// open and closed intervals agree.
    pub fn eval_interval(&self, a: &Rational, b: &Rational) -> Bounded {
        let lo = self.to_std(&a.clone().max(self.support.0.clone()));
        let hi = self.to_std(&b.clone().min(self.support.1.clone()));
        let lo = lo.max(self.window.0.clone());
        let hi = hi.min(self.window.1.clone());
        if lo >= hi {
            return Bounded::zero();
        }
        if let Some(c) = self.weight.constant_value() {
            return Bounded::exact(c * (cdf(&hi) - cdf(&lo)));
        }
        let g = self.std_weight(None);
        integrate_std(&g, &lo, &hi, QUAD_DEPTH)
    }

    /// ∫ f · weight dν over the ambient interval (a, b), f polynomial in
    /// ambient coordinates.
    pub fn integrate_on(&self, a: &Rational, b: &Rational, f: &Poly) -> Bounded {
        let lo = self
            .to_std(&a.clone().max(self.support.0.clone()))
            .max(self.window.0.clone());
        let hi = self
            .to_std(&b.clone().min(self.support.1.clone()))
            .min(self.window.1.clone());
        if lo >= hi {
            return Bounded::zero();
        }
        let g = self.std_weight(Some(f));
        integrate_std(&g, &lo, &hi, QUAD_DEPTH)
    }

    /// The cumulative function t ↦ mass of support ∩ (-∞, x], exact for
    /// constant weights (the staircase function itself).
    pub fn cumulative(&self, x: &Rational) -> Bounded {
        if *x <= self.support.0 {
            return Bounded::zero();
        }
        let b = x.clone().min(self.support.1.clone());
        self.eval_interval(&self.support.0.clone(), &b)
    }

    /// Multiplies the density by an ambient polynomial.
    pub fn weighted(&self, f: &Poly) -> CantorPart {
        CantorPart {
            support: self.support.clone(),
            window: self.window.clone(),
            weight: self.weight.mul(f),
        }
    }

    pub fn scaled(&self, c: &Rational) -> CantorPart {
        CantorPart {
            support: self.support.clone(),
            window: self.window.clone(),
            weight: self.weight.scale(c),
        }
    }

    /// Restriction to the ambient interval (a, b), canonicalized.
    pub fn restrict(&self, a: &Rational, b: &Rational) -> Option<CantorPart> {
        let lo = if *a <= self.support.0 {
            self.window.0.clone()
        } else {
            self.to_std(a).max(self.window.0.clone())
        };
        let hi = if *b >= self.support.1 {
            self.window.1.clone()
        } else {
            self.to_std(b).min(self.window.1.clone())
        };
        CantorPart {
            support: self.support.clone(),
            window: (lo, hi),
            weight: self.weight.clone(),
        }
        .normalize()
    }

    /// Canonical form: window endpoints snapped onto the Cantor set, the
    /// support shrunk while the window fits a single outer third, zero
    /// parts dropped.
    pub fn normalize(&self) -> Option<CantorPart> {
        if self.weight.is_zero() {
            return None;
        }
        let (mut w0, mut w1) = self.window.clone();
        if w0 < Rational::zero() {
            w0 = Rational::zero();
        }
        if w1 > Rational::one() {
            w1 = Rational::one();
        }
        if w0 >= w1 {
            return None;
        }
        // Snap endpoints out of mass-free gaps.
        if let (_, PointClass::InGap { hi, .. }) = analyze(&w0) {
            w0 = hi;
        }
        if let (_, PointClass::InGap { lo, .. }) = analyze(&w1) {
            w1 = lo;
        }
        if w0 >= w1 || cdf(&w0) == cdf(&w1) {
            return None;
        }
        let mut support = self.support.clone();
        let mut weight = self.weight.clone();
        let third = rat(1, 3);
        let two_thirds = rat(2, 3);
        loop {
            let width = &support.1 - &support.0;
            if w1 <= third {
                support = (support.0.clone(), &support.0 + &width / int(3));
                w0 *= int(3);
                w1 *= int(3);
                weight = weight.scale(&rat(1, 2));
            } else if w0 >= two_thirds {
                support = (&support.1 - &width / int(3), support.1.clone());
                w0 = &w0 * int(3) - int(2);
                w1 = &w1 * int(3) - int(2);
                weight = weight.scale(&rat(1, 2));
            } else {
                break;
            }
        }
        Some(CantorPart {
            support,
            window: (w0, w1),
            weight,
        })
    }

    /// Un-lifts one level so the part is expressed on `parent`, which must
    /// contain the current support as its left or right third.
    fn unlift_to(&self, parent: &(Rational, Rational)) -> Option<CantorPart> {
        let pw = &parent.1 - &parent.0;
        let left = (parent.0.clone(), &parent.0 + &pw / int(3));
        let right = (&parent.1 - &pw / int(3), parent.1.clone());
        let (shift, _name) = if self.support == left {
            (Rational::zero(), "L")
        } else if self.support == right {
            (int(2), "R")
        } else {
            return None;
        };
        let w0 = (&self.window.0 + &shift) / int(3);
        let w1 = (&self.window.1 + &shift) / int(3);
        Some(CantorPart {
            support: parent.clone(),
            window: (w0, w1),
            weight: self.weight.scale(&int(2)),
        })
    }

    /// Expresses the part on an aligned ancestor support, if one exists
    /// within a bounded number of levels.
    fn align_up(&self, ancestor: &(Rational, Rational)) -> Option<CantorPart> {
        if self.support == *ancestor {
            return Some(self.clone());
        }
        // Walk down from the ancestor to find the chain of thirds.
        let mut chain = vec![ancestor.clone()];
        let mut cur = ancestor.clone();
        for _ in 0..64 {
            let w = &cur.1 - &cur.0;
            let left = (cur.0.clone(), &cur.0 + &w / int(3));
            let right = (&cur.1 - &w / int(3), cur.1.clone());
            cur = if self.support.0 >= left.0 && self.support.1 <= left.1 {
                left
            } else if self.support.0 >= right.0 && self.support.1 <= right.1 {
                right
            } else {
                return None;
            };
            chain.push(cur.clone());
            if cur == self.support {
                let mut part = self.clone();
                for parent in chain.iter().rev().skip(1) {
                    part = part.unlift_to(parent)?;
                }
                return Some(part);
            }
        }
        None
    }
}

/// Sorts, merges, and canonicalizes a list of parts understood as a sum of
/// measures. Parts on aligned sub-cells are re-expressed on the coarser
/// support first; parts sharing a window add their densities, overlapping
/// windows are split at the window endpoints, and measure-adjacent windows
/// with equal densities fuse, so that restriction followed by addition
/// returns to the original representation and differences cancel.
pub fn merge_parts(parts: Vec<CantorPart>) -> Vec<CantorPart> {
    let mut items: Vec<CantorPart> = parts.into_iter().filter_map(|p| p.normalize()).collect();
    let mut rounds = 0usize;
    loop {
        sort_parts(&mut items);
        let mut merged = false;
        'outer: for i in 0..items.len() {
            for j in (i + 1)..items.len() {
                if let Some(combined) = try_combine(&items[i], &items[j]) {
                    items.remove(j);
                    items.remove(i);
                    items.extend(combined.into_iter().filter_map(|c| c.normalize()));
                    merged = true;
                    break 'outer;
                }
            }
        }
        rounds += 1;
        if !merged || rounds > 10_000 {
            debug_assert!(rounds <= 10_000, "staircase merge did not stabilize");
            break;
        }
    }
    sort_parts(&mut items);
    items
}

fn sort_parts(items: &mut [CantorPart]) {
    items.sort_by(|a, b| {
        (&a.support.0, &a.support.1, &a.window.0, &a.window.1).cmp(&(
            &b.support.0,
            &b.support.1,
            &b.window.0,
            &b.window.1,
        ))
    });
}

fn try_combine(a: &CantorPart, b: &CantorPart) -> Option<Vec<CantorPart>> {
    // Bring to a common support when one is an aligned cell of the other.
    let contains = |outer: &(Rational, Rational), inner: &(Rational, Rational)| {
        outer.0 <= inner.0 && inner.1 <= outer.1
    };
    let (x, y) = if a.support == b.support {
        (a.clone(), b.clone())
    } else if contains(&a.support, &b.support) {
        (a.clone(), b.align_up(&a.support)?)
    } else if contains(&b.support, &a.support) {
        (a.align_up(&b.support)?, b.clone())
    } else {
        // disjoint supports: siblings across a gap sit inside the cell
        // tree of their hull
        let hull = (
            a.support.0.clone().min(b.support.0.clone()),
            a.support.1.clone().max(b.support.1.clone()),
        );
        (a.align_up(&hull)?, b.align_up(&hull)?)
    };
    // identical geometry: densities add
    if x.window == y.window {
        return Some(vec![CantorPart {
            support: x.support,
            window: x.window,
            weight: x.weight.add(&y.weight),
        }]);
    }
    let (first, second) = if x.window.0 <= y.window.0 {
        (&x, &y)
    } else {
        (&y, &x)
    };
    // strict overlap: split both at the four window endpoints; the
    // resulting pieces are pairwise equal or disjoint and re-merge above
    if first.window.1 > second.window.0 {
        let mut cuts = vec![
            first.window.0.clone(),
            first.window.1.clone(),
            second.window.0.clone(),
            second.window.1.clone(),
        ];
        cuts.sort();
        cuts.dedup();
        let mut out = Vec::new();
        for w in cuts.windows(2) {
            let mut weight = Poly::zero();
            for part in [first, second] {
                if part.window.0 <= w[0] && w[1] <= part.window.1 {
                    weight = weight.add(&part.weight);
                }
            }
            out.push(CantorPart {
                support: x.support.clone(),
                window: (w[0].clone(), w[1].clone()),
                weight,
            });
        }
        return Some(out);
    }
    // adjacent in measure with the same density: fuse the windows
    if first.weight == second.weight && cdf(&first.window.1) == cdf(&second.window.0) {
        return Some(vec![CantorPart {
            support: x.support.clone(),
            window: (first.window.0.clone(), second.window.1.clone()),
            weight: first.weight.clone(),
        }]);
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent oracle for monotone integrands: recursive subdivision
    /// of the unit staircase, returning [lo, hi] containing ∫ g dμ. Each
    /// surviving cell carries mass 2^-depth and g is monotone, so endpoint
    /// values of g bracket the cell average.
    fn quad_oracle(g: &Poly, depth: u32) -> (Rational, Rational) {
        fn rec(
            g: &Poly,
            lo: Rational,
            hi: Rational,
            mass: Rational,
            depth: u32,
        ) -> (Rational, Rational) {
            if depth == 0 {
                let a = g.eval(&lo);
                let b = g.eval(&hi);
                let (mn, mx) = if a <= b { (a, b) } else { (b, a) };
                return (&mass * mn, &mass * mx);
            }
            let w = (&hi - &lo) / int(3);
            let half = &mass / int(2);
            let l = rec(g, lo.clone(), &lo + &w, half.clone(), depth - 1);
            let r = rec(g, &hi - &w, hi.clone(), half, depth - 1);
            (l.0 + r.0, l.1 + r.1)
        }
        rec(g, Rational::zero(), Rational::one(), Rational::one(), depth)
    }

    #[test]
    fn staircase_values() {
        assert_eq!(cdf(&rat(1, 3)), rat(1, 2));
        assert_eq!(cdf(&rat(2, 3)), rat(1, 2));
        assert_eq!(cdf(&rat(1, 2)), rat(1, 2));
        assert_eq!(cdf(&rat(1, 9)), rat(1, 4));
        assert_eq!(cdf(&rat(2, 9)), rat(1, 4));
        assert_eq!(cdf(&rat(1, 4)), rat(1, 3)); // periodic triadic expansion
        assert_eq!(cdf(&rat(3, 4)), rat(2, 3));
        assert_eq!(cdf(&int(0)), int(0));
        assert_eq!(cdf(&int(1)), int(1));
    }

    #[test]
    fn gap_detection() {
        let (v, class) = analyze(&rat(1, 2));
        assert_eq!(v, rat(1, 2));
        assert_eq!(
            class,
            PointClass::InGap {
                lo: rat(1, 3),
                hi: rat(2, 3)
            }
        );
        assert_eq!(analyze(&rat(1, 4)).1, PointClass::InSet);
        assert_eq!(analyze(&rat(1, 3)).1, PointClass::InSet);
    }

    #[test]
    fn moment_recurrence_matches_known_values() {
        let m = moments(2);
        assert_eq!(m[0], int(1));
        assert_eq!(m[1], rat(1, 2)); // symmetry
        assert_eq!(m[2], rat(3, 8)); // variance 1/8
    }

    #[test]
    fn moments_agree_with_subdivision_oracle() {
        for k in 1..=4usize {
            let mut coeffs = vec![Rational::zero(); k + 1];
            coeffs[k] = Rational::one();
            let g = Poly::new(coeffs);
            let (lo, hi) = quad_oracle(&g, 7);
            let exact = integrate_full(&g);
            assert!(
                lo <= exact && exact <= hi,
                "moment {k} outside oracle bracket"
            );
        }
    }

    #[test]
    fn restriction_is_self_similar() {
        let part = CantorPart::with_mass(int(0), int(1), int(1));
        let left = part.restrict(&int(0), &rat(1, 3)).unwrap();
        assert_eq!(left.mass(), Bounded::exact(rat(1, 2)));
        assert_eq!(left.support, (int(0), rat(1, 3))); // lifted to the cell
        assert_eq!(left.window, (int(0), int(1)));
        assert_eq!(left.weight, Poly::constant(rat(1, 2)));
    }

    #[test]
    fn gap_interval_has_no_mass() {
        let part = CantorPart::with_mass(int(0), int(1), int(1));
        assert!(part.restrict(&rat(2, 5), &rat(3, 5)).is_none());
        assert_eq!(
            part.eval_interval(&rat(1, 3), &rat(2, 3)),
            Bounded::exact(int(0))
        );
    }

    #[test]
    fn restrict_then_merge_recovers_whole() {
        let part = CantorPart::with_mass(int(0), int(1), int(1));
        let a = part.restrict(&int(0), &rat(1, 3)).unwrap();
        let b = part.restrict(&rat(1, 3), &int(1)).unwrap();
        let merged = merge_parts(vec![a, b]);
        assert_eq!(merged, vec![part]);
    }

    #[test]
    fn identical_parts_cancel_in_differences() {
        let plus = CantorPart::with_mass(int(0), int(1), rat(1, 2));
        let minus = CantorPart::with_mass(int(0), int(1), rat(-1, 2));
        assert_eq!(merge_parts(vec![plus, minus]), Vec::new());
        // weighted variant
        let p = CantorPart {
            support: (int(0), int(1)),
            window: (int(0), int(1)),
            weight: Poly::x(),
        };
        let q = CantorPart {
            support: (int(0), int(1)),
            window: (int(0), int(1)),
            weight: Poly::x().neg(),
        };
        assert_eq!(merge_parts(vec![p, q]), Vec::new());
    }

    #[test]
    fn sibling_cells_fuse_across_the_gap() {
        // restricting to the two outer thirds removes nothing: the gap
        // carries no mass, so the pieces must fuse back to the whole.
        let whole = CantorPart::with_mass(int(0), int(1), int(1));
        let left = whole.restrict(&int(0), &rat(1, 3)).unwrap();
        let right = whole.restrict(&rat(2, 3), &int(1)).unwrap();
        assert_eq!(left.support, (int(0), rat(1, 3)));
        assert_eq!(right.support, (rat(2, 3), int(1)));
        assert_eq!(merge_parts(vec![left, right]), vec![whole]);
        // deeper separation: the two outer ninths of the left cell plus
        // the whole right cell
        let whole2 = CantorPart::with_mass(int(0), int(1), int(1));
        let p1 = whole2.restrict(&int(0), &rat(1, 9)).unwrap();
        let p2 = whole2.restrict(&rat(2, 9), &rat(1, 3)).unwrap();
        let p3 = whole2.restrict(&rat(2, 3), &int(1)).unwrap();
        assert_eq!(merge_parts(vec![p1, p2, p3]), vec![whole2]);
    }

    #[test]
    fn overlapping_windows_split_and_cancel() {
        // whole staircase minus its restriction to (1/3, 1) leaves the
        // restriction to (0, 1/3), lifted onto the left cell.
        let whole = CantorPart::with_mass(int(0), int(1), int(1));
        let right = whole.restrict(&rat(1, 3), &int(1)).unwrap();
        let merged = merge_parts(vec![whole.clone(), right.scaled(&int(-1))]);
        let expected = whole.restrict(&int(0), &rat(1, 3)).unwrap();
        assert_eq!(merged, vec![expected]);
    }

    #[test]
    fn restrict_at_non_triadic_cantor_point() {
        // 1/4 is in the Cantor set; the two halves still sum to the whole.
        let part = CantorPart::with_mass(int(0), int(1), int(1));
        let a = part.restrict(&int(0), &rat(1, 4)).unwrap();
        let b = part.restrict(&rat(1, 4), &int(1)).unwrap();
        assert_eq!(a.mass(), Bounded::exact(rat(1, 3)));
        assert_eq!(b.mass(), Bounded::exact(rat(2, 3)));
        let merged = merge_parts(vec![a, b]);
        assert_eq!(merged, vec![part]);
    }

    #[test]
    fn weighted_integral_on_full_window_is_exact() {
        // weight x against the staircase on [0,1]: ∫ x dμ = 1/2.
        let part = CantorPart {
            support: (int(0), int(1)),
            window: (int(0), int(1)),
            weight: Poly::x(),
        };
        assert_eq!(part.mass(), Bounded::exact(rat(1, 2)));
        // ∫ x · x dμ = 3/8
        let v = part.integrate_on(&int(0), &int(1), &Poly::x());
        assert_eq!(v, Bounded::exact(rat(3, 8)));
    }

    #[test]
    fn affine_image_moments() {
        // staircase on [1, 3] with mass 2: ∫ x dμ = 2 · (1 + 2·(1/2)) = 4.
        let part = CantorPart::with_mass(int(1), int(3), int(2));
        let v = part.integrate_on(&int(1), &int(3), &Poly::x());
        assert_eq!(v, Bounded::exact(int(4)));
    }

    #[test]
    fn unresolved_window_keeps_certified_bound() {
        // window endpoint 1/4 never aligns with a cell: non-constant
        // weight forces quadrature with a tiny certified tail.
        let part = CantorPart {
            support: (int(0), int(1)),
            window: (rat(1, 4), int(1)),
            weight: Poly::x(),
        };
        let v = part.integrate_on(&int(0), &int(1), &Poly::one());
        assert!(v.err > Rational::zero());
        assert!(v.err < rat(1, 1_000_000_000));
        // Exact value for comparison via constant-weight CDF path times x
        // is unavailable; sanity: mass of the window is 2/3 and weight ≤ 1,
        // so the value is below 2/3.
        assert!(v.value < rat(2, 3));
    }
}
