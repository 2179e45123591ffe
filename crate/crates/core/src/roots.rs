//! Exact real-root location for rational polynomials.
//!
//! Sturm sequences give exact root counts on intervals; isolated roots are
//! then tested for rationality by refining the isolating interval and
//! probing the simplest rational it contains (Stern-Brocot descent). A
//! rational root of denominator q is always recovered once the interval is
//! narrower than 1/q^2; roots that stay unresolved past the refinement cap
//! are reported as irrational, which callers surface as an error instead
//! of ever splitting a piece at an inexact point.

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::rational::{format_rational, int, Rational};

const REFINE_STEPS: usize = 48;

fn sign(x: &Rational) -> i8 {
    if x.is_zero() {
        0
    } else if x.is_positive() {
        1
    } else {
        -1
    }
}

/// Greatest common divisor of two polynomials (monic result).
fn poly_gcd(a: &Poly, b: &Poly) -> Poly {
    let mut a = a.clone();
    let mut b = b.clone();
    while !b.is_zero() {
        let (_, r) = a.div_rem(&b);
        a = b;
        b = r;
    }
    if let Some(lead) = a.leading() {
        let inv = int(1) / lead.clone();
        a.scale(&inv)
    } else {
        a
    }
}

/// Square-free part p / gcd(p, p').
pub fn square_free(p: &Poly) -> Poly {
    if p.degree().unwrap_or(0) < 2 {
        return p.clone();
    }
    let g = poly_gcd(p, &p.derivative());
    if g.degree().unwrap_or(0) == 0 {
        p.clone()
    } else {
        let (q, r) = p.div_rem(&g);
        debug_assert!(r.is_zero());
        q
    }
}

/// Rescales a polynomial by a positive constant to keep Sturm-chain
/// coefficients small; the sign pattern is unchanged.
fn shrink(p: Poly) -> Poly {
    let m = p
        .coeffs()
        .iter()
        .map(|c| c.abs())
        .max()
        .unwrap_or_else(Rational::zero);
    if m.is_zero() {
        p
    } else {
        p.scale(&(int(1) / m))
    }
}

fn sturm_chain(p: &Poly) -> Vec<Poly> {
    let mut chain = vec![p.clone(), p.derivative()];
    loop {
        let n = chain.len();
        if chain[n - 1].is_zero() {
            chain.pop();
            break;
        }
        if chain[n - 1].is_constant() {
            break;
        }
        let (_, r) = chain[n - 2].div_rem(&chain[n - 1]);
        chain.push(shrink(r.neg()));
    }
    chain
}

fn variations(chain: &[Poly], x: &Rational) -> usize {
    let mut count = 0;
    let mut last = 0i8;
    for p in chain {
        let s = sign(&p.eval(x));
        if s != 0 {
            if last != 0 && s != last {
                count += 1;
            }
            last = s;
        }
    }
    count
}

/// Number of distinct real roots in the half-open interval (a, b].
/// Requires p(a) != 0.
fn count_roots(chain: &[Poly], a: &Rational, b: &Rational) -> usize {
    variations(chain, a).saturating_sub(variations(chain, b))
}

/// The simplest rational in the closed interval [lo, hi] (lo <= hi):
/// the one with the smallest denominator, then smallest numerator.
pub fn simplest_in(lo: &Rational, hi: &Rational) -> Rational {
    if lo > hi {
        return simplest_in(hi, lo);
    }
    if lo <= &Rational::zero() && hi >= &Rational::zero() {
        return Rational::zero();
    }
    if hi < &Rational::zero() {
        return -simplest_in(&-hi.clone(), &-lo.clone());
    }
    // 0 < lo <= hi
    let fl = lo.floor();
    if &fl == lo {
        return lo.clone();
    }
    let next = &fl + int(1);
    if next <= *hi {
        return next;
    }
    // same integer part; recurse on the fractional reciprocal
    let inv = simplest_in(&(int(1) / (hi - &fl)), &(int(1) / (lo - &fl)));
    fl + int(1) / inv
}

/// One isolated real root of a square-free polynomial.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RootLoc {
    /// The root is exactly this rational.
    Exact(Rational),
    /// One irrational root in the open interval (contains no other root,
    /// endpoints are not roots).
    Bracket(Rational, Rational),
}

impl RootLoc {
    pub fn lo(&self) -> &Rational {
        match self {
            RootLoc::Exact(r) => r,
            RootLoc::Bracket(l, _) => l,
        }
    }
}

/// Isolates the distinct real roots of p inside the open interval (a, b),
/// sorted in increasing order. Rational roots are identified exactly.
pub fn isolate_roots(p: &Poly, a: &Rational, b: &Rational) -> Vec<RootLoc> {
    if p.is_zero() || a >= b {
        return Vec::new();
    }
    let mut sf = square_free(p);
    // Roots at the endpoints are outside the open interval; divide them out
    // so the Sturm count applies cleanly.
    for endpoint in [a, b] {
        if sf.eval(endpoint).is_zero() {
            let lin = Poly::new(vec![-endpoint.clone(), int(1)]);
            let (q, r) = sf.div_rem(&lin);
            debug_assert!(r.is_zero());
            sf = q;
        }
    }
    let mut out = Vec::new();
    isolate_into(&sf, a, b, &mut out);
    out
}

/// Requires sf square-free with sf(a) != 0 and sf(b) != 0.
fn isolate_into(sf: &Poly, a: &Rational, b: &Rational, out: &mut Vec<RootLoc>) {
    if sf.is_constant() {
        return;
    }
    let chain = sturm_chain(sf);
    let n = count_roots(&chain, a, b);
    if n == 0 {
        return;
    }
    if n == 1 {
        out.push(resolve_root(sf, &chain, a.clone(), b.clone()));
        return;
    }
    let mid = (a + b) / int(2);
    if sf.eval(&mid).is_zero() {
        let lin = Poly::new(vec![-mid.clone(), int(1)]);
        let (q, r) = sf.div_rem(&lin);
        debug_assert!(r.is_zero());
        isolate_into(&q, a, &mid, out);
        out.push(RootLoc::Exact(mid));
        isolate_into(&q, &out.last().unwrap().lo().clone(), b, out);
    } else {
        isolate_into(sf, a, &mid, out);
        isolate_into(sf, &mid, b, out);
    }
}

/// Refines a bracket around a single root and probes for rationality.
fn resolve_root(sf: &Poly, chain: &[Poly], mut lo: Rational, mut hi: Rational) -> RootLoc {
    for _ in 0..REFINE_STEPS {
        let cand = simplest_in(&lo, &hi);
        if sf.eval(&cand).is_zero() {
            return RootLoc::Exact(cand);
        }
        let mid = (&lo + &hi) / int(2);
        if sf.eval(&mid).is_zero() {
            return RootLoc::Exact(mid);
        }
        if count_roots(chain, &lo, &mid) == 1 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    RootLoc::Bracket(lo, hi)
}

/// All roots of p in the open interval (a, b), required to be rational.
pub fn rational_roots_in(p: &Poly, a: &Rational, b: &Rational) -> Result<Vec<Rational>> {
    let mut out = Vec::new();
    for loc in isolate_roots(p, a, b) {
        match loc {
            RootLoc::Exact(r) => out.push(r),
            RootLoc::Bracket(l, h) => {
                return Err(Error::IrrationalRoot(format!(
                    "root of {} in ({}, {})",
                    p,
                    format_rational(&l),
                    format_rational(&h)
                )))
            }
        }
    }
    Ok(out)
}

/// Splits (a, b) at the roots of p, tagging each open subinterval with the
/// constant sign of p there. Errors if a sign-relevant root is irrational.
/// The zero polynomial yields a single zero-signed span.
pub fn sign_partition(
    p: &Poly,
    a: &Rational,
    b: &Rational,
) -> Result<Vec<(Rational, Rational, i8)>> {
    if p.is_zero() {
        return Ok(vec![(a.clone(), b.clone(), 0)]);
    }
    let roots = rational_roots_in(p, a, b)?;
    let mut cuts = vec![a.clone()];
    cuts.extend(roots);
    cuts.push(b.clone());
    let mut out = Vec::new();
    for w in cuts.windows(2) {
        let mid = (&w[0] + &w[1]) / int(2);
        out.push((w[0].clone(), w[1].clone(), sign(&p.eval(&mid))));
    }
    Ok(out)
}

/// Exact nonnegativity of p on [a, b]. Works with irrational roots: signs
/// are sampled outside isolating brackets, where they are constant.
pub fn is_nonnegative(p: &Poly, a: &Rational, b: &Rational) -> bool {
    if p.is_zero() {
        return true;
    }
    if sign(&p.eval(a)) < 0 || sign(&p.eval(b)) < 0 {
        return false;
    }
    let mut samples = Vec::new();
    for loc in isolate_roots(p, a, b) {
        match loc {
            RootLoc::Exact(_) => {}
            RootLoc::Bracket(l, h) => {
                samples.push(l);
                samples.push(h);
            }
        }
    }
    // Between brackets the sign is constant, so bracket endpoints plus the
    // interval endpoints see every sign p takes, except inside a bracket
    // where the single sign flip is witnessed by its two endpoints.
    samples.into_iter().all(|x| sign(&p.eval(&x)) >= 0)
}
