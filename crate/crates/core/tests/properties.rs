//! Property suites over generated inputs: the measure lattice against
//! brute-forced partitions, decomposition consistency, domination, the
//! trivializations, and the bracketing of one-sided limits.

mod common;

use std::collections::BTreeMap;

use bvpair::bv::{PiecewiseBV, Selector};
use bvpair::corpus;
use bvpair::field::DMField;
use bvpair::measure::Measure;
use bvpair::pairing::{pairing_by_decomposition, pairing_by_definition};
use bvpair::poly::{Piecewise, Poly};
use bvpair::rational::{int, rat, Rational};
use bvpair::sequences::{certify_one_sided, Direction, OneSidedFamily};

use num_traits::{Signed, Zero};
use proptest::prelude::*;

fn small_rational() -> impl Strategy<Value = Rational> {
    (-8i64..=8, 1i64..=4).prop_map(|(n, d)| rat(n, d))
}

fn linear_poly() -> impl Strategy<Value = Poly> {
    (small_rational(), small_rational()).prop_map(|(a, b)| Poly::new(vec![a, b]))
}

/// Measures with up to three density spans on the half-integer grid and up
/// to two atoms.
fn measure_strategy() -> impl Strategy<Value = Measure> {
    let grid = (-4i64..=3).prop_map(|k| rat(k, 2));
    let span = (grid.clone(), 1i64..=3, linear_poly())
        .prop_map(|(lo, len, p)| (lo.clone(), lo + rat(len, 2), p));
    let atom = ((-4i64..=4).prop_map(|k| rat(k, 2)), small_rational());
    (
        proptest::collection::vec(span, 0..3),
        proptest::collection::vec(atom, 0..3),
    )
        .prop_map(|(spans, atoms)| {
            // overlapping spans are fine: they add
            let mut m = Measure::zero();
            for (a, b, p) in spans {
                m = m.add(&Measure::new(vec![(a, b, p)], Vec::new(), Vec::new()));
            }
            m.add(&Measure::new(Vec::new(), atoms, Vec::new()))
        })
}

fn selector_strategy() -> impl Strategy<Value = Selector> {
    (
        0i64..=4,
        proptest::collection::btree_map(
            (-2i64..=2).prop_map(int),
            (0i64..=4).prop_map(|k| rat(k, 4)),
            0..3,
        ),
    )
        .prop_map(|(d, overrides)| {
            Selector::new(rat(d, 4), overrides.into_iter().collect::<BTreeMap<_, _>>()).unwrap()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn jordan_consistency(m in measure_strategy()) {
        let (pos, neg) = m.jordan().unwrap();
        prop_assert_eq!(pos.sub(&neg), m.clone());
        prop_assert_eq!(pos.add(&neg), m.total_variation().unwrap());
    }

    #[test]
    fn lattice_equals_brute_force(m1 in measure_strategy(), m2 in measure_strategy()) {
        let pieces = common::canonical_pieces(&m1, &m2);
        prop_assume!(pieces.len() <= 14);
        let min = m1.lattice_min(&m2).unwrap();
        let max = m1.lattice_max(&m2).unwrap();
        // over the whole hull
        let total_min: Rational = pieces.iter().map(|p| min.eval(p).value).sum();
        let total_max: Rational = pieces.iter().map(|p| max.eval(p).value).sum();
        prop_assert_eq!(total_min, common::brute_force_min(&m1, &m2, &pieces));
        prop_assert_eq!(total_max, common::brute_force_max(&m1, &m2, &pieces));
        // and over a sub-family of generator sets
        for k in 0..pieces.len().min(4) {
            let sub: Vec<_> = pieces.iter().skip(k).step_by(2).cloned().collect();
            let min_sub: Rational = sub.iter().map(|p| min.eval(p).value).sum();
            prop_assert_eq!(min_sub, common::brute_force_min(&m1, &m2, &sub));
        }
    }

    #[test]
    fn restriction_additivity(m in measure_strategy(), cut in (-6i64..=6).prop_map(|k| rat(k, 3))) {
        let hull = match m.hull() {
            Some(h) => h,
            None => return Ok(()),
        };
        let lo = hull.0.clone() - int(1);
        let hi = hull.1.clone() + int(1);
        prop_assume!(lo < cut && cut < hi);
        let e1 = bvpair::set::BorelSet::interval(lo.clone(), cut.clone());
        let e2 = bvpair::set::BorelSet::new(vec![(cut.clone(), hi.clone())], vec![cut.clone()]).unwrap();
        let joined = e1.disjoint_union(&e2).unwrap();
        prop_assert_eq!(
            m.restrict(&e1).add(&m.restrict(&e2)),
            m.restrict(&joined)
        );
    }

    #[test]
    fn representative_ordering(k in 0usize..6, sel in selector_strategy()) {
        let u = corpus::function_variant(k);
        for j in u.jumps() {
            let v = u.lambda_value(&sel, &j.x);
            prop_assert!(j.lower() <= v && v <= j.upper());
        }
    }

    #[test]
    fn domination_over_generator_sets(
        fk in 0usize..6,
        uk in 0usize..6,
        sel in selector_strategy(),
    ) {
        let a = corpus::field_variant(fk);
        let u = corpus::function_variant(uk);
        let p = match pairing_by_definition(&a, &u, &sel) {
            Ok(p) => p,
            Err(_) => return Ok(()), // incompatible staircase combination
        };
        let norm = a.sup_norm().unwrap();
        let p_tv = p.measure.total_variation().unwrap();
        let du_tv = u.derivative().total_variation().unwrap();
        let mut cuts: Vec<Rational> = u.poly_part().breakpoints().to_vec();
        cuts.extend(a.profile().poly_part().breakpoints().iter().cloned());
        cuts.sort();
        cuts.dedup();
        for w in cuts.windows(2) {
            let lhs = p_tv.eval_interval(&w[0], &w[1]);
            let rhs = du_tv.eval_interval(&w[0], &w[1]);
            prop_assert!(lhs.value - &lhs.err <= &norm * (rhs.value + &rhs.err));
        }
    }

    #[test]
    fn two_path_equality_on_corpus(
        fk in 0usize..6,
        uk in 0usize..6,
        sel in selector_strategy(),
    ) {
        let a = corpus::field_variant(fk);
        let u = corpus::function_variant(uk);
        let p1 = match pairing_by_definition(&a, &u, &sel) {
            Ok(p) => p,
            Err(_) => return Ok(()),
        };
        let p2 = pairing_by_decomposition(&a, &u, &sel).unwrap();
        prop_assert_eq!(p1.measure, p2.measure);
    }

    #[test]
    fn selector_independence_without_atoms(
        uk in 0usize..6,
        s1 in selector_strategy(),
        s2 in selector_strategy(),
    ) {
        // a field with purely diffuse divergence
        let a = DMField::from_poly(Piecewise::single(
            int(-2),
            int(2),
            Poly::new(vec![int(0), int(-1), rat(1, 2)]),
        ));
        let u = corpus::function_variant(uk);
        match (
            pairing_by_definition(&a, &u, &s1),
            pairing_by_definition(&a, &u, &s2),
        ) {
            (Ok(p1), Ok(p2)) => prop_assert_eq!(p1.measure, p2.measure),
            _ => {
                // staircase against a varying field: the weak route still
                // evaluates the pairing exactly
                for phi in corpus::test_functions() {
                    let v1 = bvpair::pairing::pairing_act_weak(&a, &u, &s1, &phi).unwrap();
                    let v2 = bvpair::pairing::pairing_act_weak(&a, &u, &s2, &phi).unwrap();
                    prop_assert_eq!(v1, v2);
                }
            }
        }
    }

    #[test]
    fn w11_trivialization(p0 in linear_poly(), p1 in linear_poly(), sel in selector_strategy()) {
        // continuous piecewise function glued at 0
        let v0 = p0.eval(&int(0));
        let v1 = p1.eval(&int(0));
        let glued = p1.add(&Poly::constant(v0 - v1));
        let u = PiecewiseBV::from_poly(
            Piecewise::new(vec![int(-2), int(0), int(2)], vec![p0, glued]).unwrap(),
        );
        let a = corpus::indicator_field();
        let p = pairing_by_definition(&a, &u, &sel).unwrap();
        prop_assert!(p.jump.is_zero());
        prop_assert!(p.cantor.is_zero());
        // equals A ∇u dx
        let mut expected = Measure::zero();
        for (lo, hi, q) in u.poly_part().spans() {
            for (alo, ahi, ap) in a.profile().poly_part().spans() {
                let l = lo.clone().max(alo.clone());
                let h = hi.clone().min(ahi.clone());
                if l < h {
                    expected = expected.add(&Measure::new(
                        vec![(l, h, q.derivative().mul(ap))],
                        Vec::new(),
                        Vec::new(),
                    ));
                }
            }
        }
        prop_assert_eq!(p.measure, expected);
    }

    #[test]
    fn continuous_field_trivialization(uk in 0usize..6, sel in selector_strategy(), c in small_rational()) {
        let a = DMField::from_poly(Piecewise::single(int(-2), int(2), Poly::constant(c.clone())));
        let u = corpus::function_variant(uk);
        let p = pairing_by_definition(&a, &u, &sel).unwrap();
        prop_assert_eq!(p.measure, u.derivative().scale(&c));
    }

    #[test]
    fn nonlinearity_identity(uk in 0usize..6, fk in 0usize..6, sel in selector_strategy()) {
        let a = corpus::field_variant(fk);
        let u = corpus::function_variant(uk);
        let p = match pairing_by_definition(&a, &u, &sel) {
            Ok(p) => p,
            Err(_) => return Ok(()),
        };
        let q = pairing_by_definition(&a, &u.neg(), &sel).unwrap();
        let mut rhs_atoms = Vec::new();
        for j in u.jumps() {
            let w = a.divergence().atom_weight(&j.x);
            if w.is_zero() {
                continue;
            }
            let lam = sel.value_at(&j.x);
            rhs_atoms.push((j.x.clone(), int(2) * (rat(1, 2) - lam) * (j.upper() - j.lower()) * w));
        }
        prop_assert_eq!(
            p.measure.add(&q.measure),
            Measure::new(Vec::new(), rhs_atoms, Vec::new())
        );
    }

    #[test]
    fn truncation_contraction(uk in 0usize..6, kk in 1i64..=4) {
        let u = corpus::function_variant(uk);
        let k = rat(kk, 2);
        let t = match u.truncate(&k) {
            Ok(t) => t,
            Err(_) => return Ok(()), // staircase clipping rejected
        };
        let du = u.derivative().total_variation().unwrap();
        let dt = t.derivative().total_variation().unwrap();
        let mut cuts: Vec<Rational> = u.poly_part().breakpoints().to_vec();
        cuts.extend(t.poly_part().breakpoints().iter().cloned());
        cuts.sort();
        cuts.dedup();
        for w in cuts.windows(2) {
            let lhs = dt.eval_interval(&w[0], &w[1]);
            let rhs = du.eval_interval(&w[0], &w[1]);
            prop_assert!(lhs.value - lhs.err <= rhs.value + rhs.err);
        }
        for x in &cuts {
            prop_assert!(dt.atom_weight(x).abs() <= du.atom_weight(x).abs());
        }
    }

    #[test]
    fn one_sided_limit_bracketing(uk in 0usize..6) {
        let u = corpus::function_variant(uk);
        for dir in [Direction::Upper, Direction::Lower] {
            let fam = match OneSidedFamily::new(&u, dir) {
                Ok(f) => f,
                Err(_) => return Ok(()), // construction gate (staircase or slope)
            };
            let cert = certify_one_sided(&fam).unwrap();
            prop_assert!(cert.strict);
            let probe = fam.h_max().clone() / int(32);
            for x in u.poly_part().breakpoints() {
                if x == u.poly_part().lo() || x == u.poly_part().hi() {
                    continue;
                }
                let (lp, hp) = fam.one_sided_at(x, &probe).unwrap();
                let a0 = lp.eval(&Rational::zero());
                let b0 = hp.eval(&Rational::zero());
                let (mlo, mhi) = if a0 <= b0 { (a0, b0) } else { (b0, a0) };
                let (ulo, uhi) = u.approx_limits(x);
                prop_assert!(ulo <= mlo && mhi <= uhi);
            }
        }
    }
}

/// Coarea of the total variation for piecewise-linear functions:
/// |Du|(Ω) = ∫ P({u > t}, Ω) dt, t-integrated exactly at critical values.
#[test]
fn total_variation_coarea_for_linear_pieces() {
    for uk in [0usize, 2, 3, 5] {
        let u = corpus::function_variant(uk);
        let tv = u.derivative().total_variation().unwrap().mass().value;
        // critical values: one-sided values at all breakpoints
        let mut values = Vec::new();
        for x in u.poly_part().breakpoints() {
            let (l, r) = u.one_sided(x);
            values.push(l);
            values.push(r);
        }
        values.sort();
        values.dedup();
        let mut integral = Rational::zero();
        for w in values.windows(2) {
            let mid = (&w[0] + &w[1]) / int(2);
            let perimeter = u.level_set(&mid).unwrap().perimeter();
            integral += int(perimeter as i64) * (&w[1] - &w[0]);
        }
        assert_eq!(integral, tv, "variant {uk}");
    }
}
