//! Dense rational polynomials and piecewise-polynomial functions on an
//! interval. These carry all absolutely continuous data in the engine:
//! densities, BV profiles, test functions, and the symbolic families in
//! one parameter (ramp width, truncation level) used by the check suite.

use num_traits::{One, Signed, Zero};
use std::fmt;

use crate::error::{Error, Result};
use crate::rational::{format_rational, int, Rational};

/// A polynomial with rational coefficients, constant term first.
/// Invariant: no trailing zero coefficients (the zero polynomial is empty).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Poly(Vec<Rational>);

impl Poly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().map(|c| c.is_zero()).unwrap_or(false) {
            coeffs.pop();
        }
        Poly(coeffs)
    }

    pub fn zero() -> Self {
        Poly(Vec::new())
    }

    pub fn constant(c: Rational) -> Self {
        Poly::new(vec![c])
    }

    pub fn one() -> Self {
        Poly::constant(Rational::one())
    }

    /// The monomial x.
    pub fn x() -> Self {
        Poly::new(vec![Rational::zero(), Rational::one()])
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        Poly::new(coeffs.iter().map(|&c| int(c)).collect())
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.0.len() <= 1
    }

    /// None for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        if self.0.is_empty() {
            None
        } else {
            Some(self.0.len() - 1)
        }
    }

    pub fn leading(&self) -> Option<&Rational> {
        self.0.last()
    }

    pub fn constant_value(&self) -> Option<Rational> {
        match self.0.len() {
            0 => Some(Rational::zero()),
            1 => Some(self.0[0].clone()),
            _ => None,
        }
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for c in self.0.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.0.len().max(other.0.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            let a = self.0.get(i).cloned().unwrap_or_else(Rational::zero);
            let b = other.0.get(i).cloned().unwrap_or_else(Rational::zero);
            out.push(a + b);
        }
        Poly::new(out)
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Poly {
        Poly::new(self.0.iter().map(|c| -c.clone()).collect())
    }

    pub fn scale(&self, c: &Rational) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly::new(self.0.iter().map(|a| a * c).collect())
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![Rational::zero(); self.0.len() + other.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in other.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }

    pub fn derivative(&self) -> Poly {
        if self.0.len() <= 1 {
            return Poly::zero();
        }
        Poly::new(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * int(i as i64))
                .collect(),
        )
    }

    /// Antiderivative with zero constant term.
    pub fn antiderivative(&self) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let mut out = Vec::with_capacity(self.0.len() + 1);
        out.push(Rational::zero());
        for (i, c) in self.0.iter().enumerate() {
            out.push(c / int(i as i64 + 1));
        }
        Poly::new(out)
    }

    /// Exact definite integral over [a, b].
    pub fn integral(&self, a: &Rational, b: &Rational) -> Rational {
        let f = self.antiderivative();
        f.eval(b) - f.eval(a)
    }

    /// Substitutes x = c0 + c1 t, returning a polynomial in t.
    pub fn compose_affine(&self, c0: &Rational, c1: &Rational) -> Poly {
        self.compose(&Poly::new(vec![c0.clone(), c1.clone()]))
    }

    /// Polynomial composition self(inner(t)).
    pub fn compose(&self, inner: &Poly) -> Poly {
        let mut acc = Poly::zero();
        for c in self.0.iter().rev() {
            acc = acc.mul(inner).add(&Poly::constant(c.clone()));
        }
        acc
    }

    /// Euclidean division, returning (quotient, remainder).
    pub fn div_rem(&self, divisor: &Poly) -> (Poly, Poly) {
        assert!(!divisor.is_zero(), "division by the zero polynomial");
        let mut rem = self.0.clone();
        let dd = divisor.0.len() - 1;
        let lead = divisor.0.last().unwrap().clone();
        if rem.len() <= dd {
            return (Poly::zero(), Poly::new(rem));
        }
        let mut quot = vec![Rational::zero(); rem.len() - dd];
        while rem.len() > dd && !rem.iter().all(|c| c.is_zero()) {
            while rem.last().map(|c| c.is_zero()).unwrap_or(false) {
                rem.pop();
            }
            if rem.len() <= dd {
                break;
            }
            let k = rem.len() - 1 - dd;
            let q = rem.last().unwrap() / &lead;
            for (j, c) in divisor.0.iter().enumerate() {
                let idx = k + j;
                let sub = c * &q;
                rem[idx] -= sub;
            }
            quot[k] = q;
            rem.pop();
        }
        (Poly::new(quot), Poly::new(rem))
    }

    /// A crude upper bound for |self| on [a, b]: sum of |c_i| M^i with
    /// M = max(|a|, |b|). Used only to bound quadrature tails.
    pub fn sup_bound(&self, a: &Rational, b: &Rational) -> Rational {
        let m = a.abs().max(b.abs());
        let mut acc = Rational::zero();
        let mut pw = Rational::one();
        for c in &self.0 {
            acc += c.abs() * &pw;
            pw *= &m;
        }
        acc
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "0");
        }
        let terms: Vec<String> = self
            .0
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| match i {
                0 => format_rational(c),
                1 => format!("{}*x", format_rational(c)),
                _ => format!("{}*x^{}", format_rational(c), i),
            })
            .collect();
        write!(f, "{}", terms.join(" + "))
    }
}

/// A piecewise polynomial on [breakpoints[0], breakpoints[last]].
/// Breakpoints are strictly increasing; `pieces[i]` lives on the open
/// interval (breakpoints[i], breakpoints[i+1]). Values at the breakpoints
/// themselves are irrelevant for the Lebesgue-class objects represented
/// here; one-sided limits are what the callers consume.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Piecewise {
    breakpoints: Vec<Rational>,
    pieces: Vec<Poly>,
}

impl Piecewise {
    pub fn new(breakpoints: Vec<Rational>, pieces: Vec<Poly>) -> Result<Self> {
        if breakpoints.len() < 2 {
            return Err(Error::Invalid("need at least two breakpoints".into()));
        }
        if pieces.len() + 1 != breakpoints.len() {
            return Err(Error::Invalid(format!(
                "{} pieces do not fit {} breakpoints",
                pieces.len(),
                breakpoints.len()
            )));
        }
        if breakpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Invalid("breakpoints must strictly increase".into()));
        }
        Ok(Piecewise {
            breakpoints,
            pieces,
        })
    }

    /// The zero function on [a, b].
    pub fn zero_on(a: Rational, b: Rational) -> Self {
        Piecewise {
            breakpoints: vec![a, b],
            pieces: vec![Poly::zero()],
        }
    }

    pub fn constant_on(a: Rational, b: Rational, c: Rational) -> Self {
        Piecewise {
            breakpoints: vec![a, b],
            pieces: vec![Poly::constant(c)],
        }
    }

    pub fn single(a: Rational, b: Rational, p: Poly) -> Self {
        Piecewise {
            breakpoints: vec![a, b],
            pieces: vec![p],
        }
    }

    pub fn lo(&self) -> &Rational {
        self.breakpoints.first().unwrap()
    }

    pub fn hi(&self) -> &Rational {
        self.breakpoints.last().unwrap()
    }

    pub fn breakpoints(&self) -> &[Rational] {
        &self.breakpoints
    }

    pub fn pieces(&self) -> &[Poly] {
        &self.pieces
    }

    pub fn len(&self) -> usize {
        self.pieces.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, x: &Rational) -> bool {
        x >= self.lo() && x <= self.hi()
    }

    /// Index of the piece whose closed span contains x, preferring the
    /// right piece at an interior breakpoint.
    fn piece_at(&self, x: &Rational) -> usize {
        debug_assert!(self.contains(x));
        match self.breakpoints.binary_search(x) {
            Ok(i) => i.min(self.pieces.len() - 1),
            Err(i) => i - 1,
        }
    }

    /// Limit from the left at x (x > lo).
    pub fn left_limit(&self, x: &Rational) -> Rational {
        debug_assert!(x > self.lo() && x <= self.hi());
        let i = match self.breakpoints.binary_search(x) {
            Ok(i) => i - 1,
            Err(i) => i - 1,
        };
        self.pieces[i].eval(x)
    }

    /// Limit from the right at x (x < hi).
    pub fn right_limit(&self, x: &Rational) -> Rational {
        debug_assert!(x >= self.lo() && x < self.hi());
        let i = self.piece_at(x);
        self.pieces[i].eval(x)
    }

    /// Value at an interior point that is not a breakpoint (or where the
    /// two one-sided limits agree).
    pub fn eval(&self, x: &Rational) -> Rational {
        self.pieces[self.piece_at(x)].eval(x)
    }

    /// True if the one-sided limits agree at every interior breakpoint.
    pub fn is_continuous(&self) -> bool {
        self.interior_breakpoints()
            .all(|x| self.left_limit(x) == self.right_limit(x))
    }

    pub fn interior_breakpoints(&self) -> impl Iterator<Item = &Rational> {
        self.breakpoints[1..self.breakpoints.len() - 1].iter()
    }

    /// Inserts extra breakpoints (those inside the domain); pieces are
    /// duplicated, the function is unchanged.
    pub fn with_breakpoints(&self, extra: &[Rational]) -> Piecewise {
        let mut bps = self.breakpoints.clone();
        for x in extra {
            if x > self.lo() && x < self.hi() {
                if let Err(pos) = bps.binary_search(x) {
                    bps.insert(pos, x.clone());
                }
            }
        }
        let mut pieces = Vec::with_capacity(bps.len() - 1);
        for w in bps.windows(2) {
            let mid_idx = self.piece_at(&w[0]);
            pieces.push(self.pieces[mid_idx].clone());
        }
        Piecewise {
            breakpoints: bps,
            pieces,
        }
    }

    /// Refines two functions on the same domain to shared breakpoints.
    pub fn align(a: &Piecewise, b: &Piecewise) -> Result<(Piecewise, Piecewise)> {
        if a.lo() != b.lo() || a.hi() != b.hi() {
            return Err(Error::Invalid(format!(
                "domain mismatch: [{}, {}] vs [{}, {}]",
                format_rational(a.lo()),
                format_rational(a.hi()),
                format_rational(b.lo()),
                format_rational(b.hi()),
            )));
        }
        let ra = a.with_breakpoints(&b.breakpoints);
        let rb = b.with_breakpoints(&a.breakpoints);
        debug_assert_eq!(ra.breakpoints, rb.breakpoints);
        Ok((ra, rb))
    }

    pub fn zip_with(
        &self,
        other: &Piecewise,
        f: impl Fn(&Poly, &Poly) -> Poly,
    ) -> Result<Piecewise> {
        let (a, b) = Piecewise::align(self, other)?;
        Ok(Piecewise {
            breakpoints: a.breakpoints.clone(),
            pieces: a
                .pieces
                .iter()
                .zip(b.pieces.iter())
                .map(|(p, q)| f(p, q))
                .collect(),
        })
    }

    pub fn add(&self, other: &Piecewise) -> Result<Piecewise> {
        self.zip_with(other, |p, q| p.add(q))
    }

    pub fn sub(&self, other: &Piecewise) -> Result<Piecewise> {
        self.zip_with(other, |p, q| p.sub(q))
    }

    pub fn mul(&self, other: &Piecewise) -> Result<Piecewise> {
        self.zip_with(other, |p, q| p.mul(q))
    }

    pub fn neg(&self) -> Piecewise {
        self.map(|p| p.neg())
    }

    pub fn scale(&self, c: &Rational) -> Piecewise {
        self.map(|p| p.scale(c))
    }

    pub fn map(&self, f: impl Fn(&Poly) -> Poly) -> Piecewise {
        Piecewise {
            breakpoints: self.breakpoints.clone(),
            pieces: self.pieces.iter().map(f).collect(),
        }
    }

    pub fn is_zero_fn(&self) -> bool {
        self.pieces.iter().all(|p| p.is_zero())
    }

    /// Exact integral over (a, b) ∩ domain.
    pub fn integral(&self, a: &Rational, b: &Rational) -> Rational {
        let lo = a.max(self.lo()).clone();
        let hi = b.min(self.hi()).clone();
        if lo >= hi {
            return Rational::zero();
        }
        let mut acc = Rational::zero();
        for (i, p) in self.pieces.iter().enumerate() {
            let pl = self.breakpoints[i].clone().max(lo.clone());
            let ph = self.breakpoints[i + 1].clone().min(hi.clone());
            if pl < ph {
                acc += p.integral(&pl, &ph);
            }
        }
        acc
    }

    pub fn integral_full(&self) -> Rational {
        self.integral(&self.lo().clone(), &self.hi().clone())
    }

    /// Merges adjacent pieces with identical polynomials. The canonical
    /// form used by structural equality.
    pub fn normalize(&self) -> Piecewise {
        let mut bps = vec![self.breakpoints[0].clone()];
        let mut pieces: Vec<Poly> = Vec::new();
        for (i, p) in self.pieces.iter().enumerate() {
            if let Some(last) = pieces.last() {
                if last == p {
                    bps.pop();
                    bps.push(self.breakpoints[i + 1].clone());
                    continue;
                }
            }
            pieces.push(p.clone());
            bps.push(self.breakpoints[i + 1].clone());
        }
        Piecewise {
            breakpoints: bps,
            pieces,
        }
    }

    /// The same function on a subinterval [a, b] of the domain.
    pub fn restrict_to(&self, a: &Rational, b: &Rational) -> Result<Piecewise> {
        if a < self.lo() || b > self.hi() || a >= b {
            return Err(Error::Invalid("restriction outside the domain".into()));
        }
        let refined = self.with_breakpoints(&[a.clone(), b.clone()]);
        let mut bps = vec![a.clone()];
        let mut pieces = Vec::new();
        for (lo, hi, p) in refined.spans() {
            if lo >= a && hi <= b {
                bps.push(hi.clone());
                pieces.push(p.clone());
            }
        }
        Piecewise::new(bps, pieces)
    }

    /// Iterates over (lo, hi, poly) spans.
    pub fn spans(&self) -> impl Iterator<Item = (&Rational, &Rational, &Poly)> {
        self.pieces
            .iter()
            .enumerate()
            .map(move |(i, p)| (&self.breakpoints[i], &self.breakpoints[i + 1], p))
    }
}
