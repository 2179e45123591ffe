//! Deterministic builders for the bundled verification corpus: the worked
//! example pair, reusable test functions, and seeded families of fields,
//! functions, and selectors for the property suites.

use std::collections::BTreeMap;

use crate::bv::{PiecewiseBV, Selector, StairBlock};
use crate::field::DMField;
use crate::poly::{Piecewise, Poly};
use crate::rational::{int, rat, Rational};

/// A = χ_{(-1,1)} on (-2,2).
pub fn indicator_field() -> DMField {
    DMField::indicator(int(-2), int(2), int(-1), int(1)).unwrap()
}

/// u = χ_{[-1,1]} on (-2,2).
pub fn indicator_function() -> PiecewiseBV {
    PiecewiseBV::indicator(int(-2), int(2), int(-1), int(1)).unwrap()
}

/// A nonnegative quartic bump ((x-a)(b-x))² normalized to peak 1 on (a,b).
pub fn bump(a: Rational, b: Rational) -> Piecewise {
    let quad = Poly::new(vec![-(&a * &b), &a + &b, int(-1)]);
    let sq = quad.mul(&quad);
    let mid = (&a + &b) / int(2);
    let peak = sq.eval(&mid);
    Piecewise::single(a, b, sq.scale(&(int(1) / peak)))
}

/// Extends a piecewise function by zero to the larger interval [lo, hi].
pub fn extend_zero(f: &Piecewise, lo: Rational, hi: Rational) -> Piecewise {
    let mut bps = vec![lo.clone()];
    let mut pieces = Vec::new();
    if &lo < f.lo() {
        bps.push(f.lo().clone());
        pieces.push(Poly::zero());
    }
    for (_, b, p) in f.spans() {
        bps.push(b.clone());
        pieces.push(p.clone());
    }
    if &hi > f.hi() {
        bps.push(hi);
        pieces.push(Poly::zero());
    }
    Piecewise::new(bps, pieces).unwrap()
}

/// A bump supported in (a, b) inside the ambient interval (lo, hi).
pub fn bump_on(lo: Rational, hi: Rational, a: Rational, b: Rational) -> Piecewise {
    extend_zero(&bump(a, b), lo, hi)
}

/// A tiny deterministic generator for corpus parameters.
pub struct Lcg(u64);

impl Lcg {
    pub fn new(seed: u64) -> Self {
        Lcg(seed
            .wrapping_mul(2862933555777941757)
            .wrapping_add(3037000493))
    }

    pub fn next_u32(&mut self) -> u32 {
        self.0 = self
            .0
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        (self.0 >> 33) as u32
    }

    /// A small rational in [-bound, bound] with denominator up to 8.
    pub fn small_rational(&mut self, bound: i64) -> Rational {
        let den = (self.next_u32() % 8) as i64 + 1;
        let range = (2 * bound * den + 1) as u32;
        let num = (self.next_u32() % range) as i64 - bound * den;
        rat(num, den)
    }

    /// A rational in [0, 1] with a small denominator.
    pub fn unit_rational(&mut self) -> Rational {
        let den = (self.next_u32() % 8 + 1) as i64;
        let num = (self.next_u32() % (den as u32 + 1)) as i64;
        rat(num, den)
    }
}

/// Deterministic corpus of fields on (-2, 2) indexed by seed.
pub fn field_variant(k: usize) -> DMField {
    match k % 6 {
        0 => indicator_field(),
        1 => DMField::from_poly(Piecewise::single(int(-2), int(2), Poly::from_ints(&[1, 1]))),
        2 => DMField::from_poly(
            // sign-changing density: profile x²/2 - x
            Piecewise::single(int(-2), int(2), Poly::new(vec![int(0), int(-1), rat(1, 2)])),
        ),
        3 => DMField::indicator(int(-2), int(2), int(0), int(1)).unwrap(),
        4 => DMField::from_poly(
            Piecewise::new(
                vec![int(-2), int(0), int(2)],
                vec![Poly::from_ints(&[-1]), Poly::from_ints(&[1])],
            )
            .unwrap(),
        ),
        _ => DMField::new(
            PiecewiseBV::new(
                Piecewise::constant_on(int(-2), int(2), rat(1, 2)),
                vec![StairBlock::new(rat(-1, 2), rat(1, 2), rat(1, 2))],
            )
            .unwrap(),
        ),
    }
}

/// Deterministic corpus of BV functions on (-2, 2) indexed by seed.
pub fn function_variant(k: usize) -> PiecewiseBV {
    match k % 6 {
        0 => indicator_function(),
        1 => PiecewiseBV::from_poly(Piecewise::single(
            int(-2),
            int(2),
            Poly::from_ints(&[0, 1, 1]),
        )),
        2 => PiecewiseBV::from_poly(
            Piecewise::new(
                vec![int(-2), int(-1), rat(1, 2), int(2)],
                vec![
                    Poly::zero(),
                    Poly::from_ints(&[2]),
                    Poly::from_ints(&[0, -1]),
                ],
            )
            .unwrap(),
        ),
        3 => PiecewiseBV::from_poly(
            Piecewise::new(
                vec![int(-2), int(0), int(2)],
                vec![Poly::x(), Poly::from_ints(&[3])],
            )
            .unwrap(),
        ),
        4 => PiecewiseBV::new(
            Piecewise::zero_on(int(-2), int(2)),
            vec![StairBlock::new(int(0), int(1), int(1))],
        )
        .unwrap(),
        _ => PiecewiseBV::from_poly(
            Piecewise::new(
                vec![int(-2), rat(-1, 2), rat(3, 2), int(2)],
                vec![
                    Poly::from_ints(&[1]),
                    Poly::from_ints(&[-1, 2]),
                    Poly::from_ints(&[2]),
                ],
            )
            .unwrap(),
        ),
    }
}

/// Deterministic selectors indexed by seed, overriding at ±1 and 0.
pub fn selector_variant(k: usize) -> Selector {
    let vals = [
        rat(1, 2),
        int(0),
        int(1),
        rat(1, 3),
        rat(3, 4),
        rat(2, 7),
        rat(5, 8),
    ];
    let d = vals[k % vals.len()].clone();
    let o1 = vals[(k + 2) % vals.len()].clone();
    let o2 = vals[(k + 4) % vals.len()].clone();
    let o3 = vals[(k + 5) % vals.len()].clone();
    Selector::new(
        d,
        BTreeMap::from([(int(-1), o1), (int(1), o2), (int(0), o3)]),
    )
    .unwrap()
}

/// The bundled nonnegative test functions on (-2, 2).
pub fn nonneg_test_functions() -> Vec<Piecewise> {
    vec![
        Piecewise::constant_on(int(-2), int(2), int(1)),
        bump_on(int(-2), int(2), int(-2), int(2)),
        bump_on(int(-2), int(2), int(-2), int(0)),
        bump_on(int(-2), int(2), int(0), int(2)),
        bump_on(int(-2), int(2), rat(-3, 2), rat(-1, 2)),
        bump_on(int(-2), int(2), rat(1, 2), rat(3, 2)),
    ]
}

/// General (signed) test functions on (-2, 2).
pub fn test_functions() -> Vec<Piecewise> {
    let mut v = nonneg_test_functions();
    v.push(Piecewise::single(
        int(-2),
        int(2),
        Poly::from_ints(&[5, 1, 1]),
    ));
    v.push(Piecewise::single(
        int(-2),
        int(2),
        Poly::from_ints(&[0, 0, 0, 1]),
    ));
    v
}
