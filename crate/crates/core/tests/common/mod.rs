//! Shared oracles for the integration suites. These deliberately avoid the
//! library's lattice and coarea implementations: partitions are enumerated
//! by brute force and t-integrals assembled from level-set counts.

use bvpair::measure::Measure;
use bvpair::rational::{int, Rational};
use bvpair::roots::rational_roots_in;
use bvpair::set::BorelSet;
use num_traits::Zero;

/// The canonical pieces of a pair of measures: atoms as points, and the
/// elementary intervals between all breakpoints refined at the sign
/// changes of the density difference (so the optimal partition assigns
/// whole pieces).
pub fn canonical_pieces(m1: &Measure, m2: &Measure) -> Vec<BorelSet> {
    let mut cuts: Vec<Rational> = Vec::new();
    let mut atoms: Vec<Rational> = Vec::new();
    for m in [m1, m2] {
        for (a, b, _) in m.ac_spans() {
            cuts.push(a.clone());
            cuts.push(b.clone());
        }
        for (x, _) in m.atoms() {
            atoms.push(x.clone());
            cuts.push(x.clone());
        }
        for part in m.cantor_parts() {
            cuts.push(part.support.0.clone());
            cuts.push(part.support.1.clone());
        }
    }
    cuts.sort();
    cuts.dedup();
    atoms.sort();
    atoms.dedup();
    let density_at = |m: &Measure, x: &Rational| {
        for (a, b, p) in m.ac_spans() {
            if a <= x && x < b {
                return p.clone();
            }
        }
        bvpair::poly::Poly::zero()
    };
    let mut pieces = Vec::new();
    for w in cuts.windows(2) {
        let mid = (&w[0] + &w[1]) / int(2);
        let diff = density_at(m1, &mid).sub(&density_at(m2, &mid));
        let mut inner = vec![w[0].clone()];
        inner.extend(rational_roots_in(&diff, &w[0], &w[1]).expect("rational sign changes"));
        inner.push(w[1].clone());
        for v in inner.windows(2) {
            pieces.push(BorelSet::interval(v[0].clone(), v[1].clone()));
        }
    }
    for x in atoms {
        pieces.push(BorelSet::point(x));
    }
    pieces
}

/// inf over assignments of the pieces to (E0, E1) of μ1(E0) + μ2(E1),
/// enumerated exhaustively.
pub fn brute_force_min(m1: &Measure, m2: &Measure, pieces: &[BorelSet]) -> Rational {
    assert!(pieces.len() <= 20, "brute force explosion");
    let mut best: Option<Rational> = None;
    for mask in 0..(1u32 << pieces.len()) {
        let mut total = Rational::zero();
        for (i, piece) in pieces.iter().enumerate() {
            let v = if mask & (1 << i) != 0 {
                m1.eval(piece)
            } else {
                m2.eval(piece)
            };
            assert!(v.is_exact());
            total += v.value;
        }
        best = Some(match best.take() {
            Some(b) => b.min(total),
            None => total,
        });
    }
    best.unwrap_or_else(Rational::zero)
}

pub fn brute_force_max(m1: &Measure, m2: &Measure, pieces: &[BorelSet]) -> Rational {
    -brute_force_min(&m1.neg(), &m2.neg(), pieces)
}
