//! Bounded fields whose distributional derivative is a measure: normal
//! traces on oriented point sets, polar sign sets, selector families,
//! products with BV functions, and exact mollification by a rational
//! quartic bump.

use num_traits::Signed;

use crate::bv::{PiecewiseBV, Selector};
use crate::error::{Error, Result};
use crate::measure::Measure;
use crate::poly::{Piecewise, Poly};
use crate::rational::{format_rational, int, rat, Rational};
use crate::roots::sign_partition;
use crate::set::BorelSet;

/// A point of an oriented H⁰-rectifiable set: location plus unit normal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrientedPoint {
    pub x: Rational,
    pub nu: i8,
}

impl OrientedPoint {
    pub fn new(x: Rational, nu: i8) -> Self {
        debug_assert!(nu == 1 || nu == -1);
        OrientedPoint { x, nu }
    }
}

/// Interior and exterior traces of the normal component at one point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TracePair {
    pub minus: Rational,
    pub plus: Rational,
}

impl TracePair {
    /// The symmetric trace (Tr⁺ + Tr⁻)/2.
    pub fn star(&self) -> Rational {
        (&self.plus + &self.minus) / int(2)
    }

    pub fn difference(&self) -> Rational {
        &self.plus - &self.minus
    }
}

/// How a selector relates to the semicontinuity families of a field.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SelectorClass {
    Lsc,
    Usc,
    Both,
    Neither,
}

impl SelectorClass {
    pub fn is_lsc(self) -> bool {
        matches!(self, SelectorClass::Lsc | SelectorClass::Both)
    }

    pub fn is_usc(self) -> bool {
        matches!(self, SelectorClass::Usc | SelectorClass::Both)
    }

    pub fn name(self) -> &'static str {
        match self {
            SelectorClass::Lsc => "lsc",
            SelectorClass::Usc => "usc",
            SelectorClass::Both => "both",
            SelectorClass::Neither => "neither",
        }
    }
}

/// The sign sets of the divergence together with its atom set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldClassification {
    pub omega_plus: BorelSet,
    pub omega_minus: BorelSet,
    /// Atom locations of the divergence (the H⁰ part of its jump set).
    pub theta: Vec<Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DMField {
    profile: PiecewiseBV,
    divergence: Measure,
}

impl DMField {
    pub fn new(profile: PiecewiseBV) -> Self {
        let divergence = profile.derivative();
        DMField {
            profile,
            divergence,
        }
    }

    pub fn from_poly(f: Piecewise) -> Self {
        DMField::new(PiecewiseBV::from_poly(f))
    }

    /// The indicator field χ_{(c,d)} on (lo, hi).
    pub fn indicator(lo: Rational, hi: Rational, c: Rational, d: Rational) -> Result<Self> {
        Ok(DMField::new(PiecewiseBV::indicator(lo, hi, c, d)?))
    }

    pub fn profile(&self) -> &PiecewiseBV {
        &self.profile
    }

    pub fn divergence(&self) -> &Measure {
        &self.divergence
    }

    pub fn domain(&self) -> (&Rational, &Rational) {
        self.profile.domain()
    }

    /// Fields serialize as their profile.
    pub fn to_canonical_text(&self) -> String {
        self.profile.to_canonical_text()
    }

    /// Parses the profile text form.
    pub fn from_canonical_text(text: &str) -> Result<Self> {
        Ok(DMField::new(crate::bv::parse_bv_text(text)?))
    }

    /// Exact essential sup of |A|.
    pub fn sup_norm(&self) -> Result<Rational> {
        self.profile.sup_norm()
    }

    /// Traces of the normal component at one oriented point: with ν = +1
    /// the minus trace is the left limit and the plus trace the right
    /// limit; flipping ν negates and swaps them.
    pub fn traces_at(&self, x: &Rational, nu: i8) -> Result<TracePair> {
        let (lo, hi) = self.domain();
        if x <= lo || x >= hi {
            return Err(Error::Invalid(format!(
                "trace point {} must be interior",
                format_rational(x)
            )));
        }
        let (left, right) = self.profile.one_sided(x);
        Ok(if nu == 1 {
            TracePair {
                minus: left,
                plus: right,
            }
        } else {
            TracePair {
                minus: -right,
                plus: -left,
            }
        })
    }

    pub fn normal_traces(
        &self,
        sigma: &[OrientedPoint],
    ) -> Result<Vec<(OrientedPoint, TracePair)>> {
        sigma
            .iter()
            .map(|p| Ok((p.clone(), self.traces_at(&p.x, p.nu)?)))
            .collect()
    }

    /// Polar sign sets Ω⁺, Ω⁻ of the divergence and the atom set Θ.
    /// Absolutely continuous spans enter through their sign partition;
    /// staircase components through their support windows.
    pub fn classify(&self) -> Result<FieldClassification> {
        let div = &self.divergence;
        let mut pos_intervals = Vec::new();
        let mut neg_intervals = Vec::new();
        for (a, b, p) in div.ac_spans() {
            for (lo, hi, s) in sign_partition(p, a, b)? {
                match s {
                    1 => pos_intervals.push((lo, hi)),
                    -1 => neg_intervals.push((lo, hi)),
                    _ => {}
                }
            }
        }
        for part in div.cantor_parts() {
            let hull_lo = &part.support.0 + &part.window.0 * part.width();
            let hull_hi = &part.support.0 + &part.window.1 * part.width();
            for (lo, hi, s) in sign_partition(&part.weight, &hull_lo, &hull_hi)? {
                match s {
                    1 => pos_intervals.push((lo, hi)),
                    -1 => neg_intervals.push((lo, hi)),
                    _ => {}
                }
            }
        }
        let mut pos_points = Vec::new();
        let mut neg_points = Vec::new();
        let mut theta = Vec::new();
        for (x, w) in div.atoms() {
            theta.push(x.clone());
            if w.is_positive() {
                pos_points.push(x.clone());
            } else {
                neg_points.push(x.clone());
            }
        }
        Ok(FieldClassification {
            omega_plus: merged_set(pos_intervals, pos_points)?,
            omega_minus: merged_set(neg_intervals, neg_points)?,
            theta,
        })
    }

    /// Membership of a selector in the semicontinuity families: lower
    /// semicontinuity needs λ = 1 at the positive atoms of the divergence
    /// and λ = 0 at the negative ones; the upper family swaps the roles;
    /// both hold exactly when there are no atoms.
    pub fn selector_class(&self, sel: &Selector) -> SelectorClass {
        let atoms = self.divergence.atoms();
        if atoms.is_empty() {
            return SelectorClass::Both;
        }
        let mut lsc = true;
        let mut usc = true;
        for (x, w) in atoms {
            let lam = sel.value_at(x);
            if w.is_positive() {
                lsc &= lam == int(1);
                usc &= lam == int(0);
            } else {
                lsc &= lam == int(0);
                usc &= lam == int(1);
            }
        }
        match (lsc, usc) {
            (true, false) => SelectorClass::Lsc,
            (false, true) => SelectorClass::Usc,
            (true, true) => SelectorClass::Both, // unreachable with atoms
            (false, false) => SelectorClass::Neither,
        }
    }

    /// The product field u·A.
    pub fn product(&self, u: &PiecewiseBV) -> Result<DMField> {
        Ok(DMField::new(u.mul(&self.profile)?))
    }

    /// Mollification by the rational quartic bump supported in [-ε, ε].
    /// Exact: the result's pieces are polynomials computed symbolically.
    pub fn mollify(&self, eps: &Rational) -> Result<DMField> {
        if !eps.is_positive() {
            return Err(Error::Invalid(
                "mollification scale must be positive".into(),
            ));
        }
        if self.profile.has_stairs() {
            return Err(Error::Unrepresentable(
                "mollification of a staircase profile".into(),
            ));
        }
        let f = self.profile.poly_part();
        let (lo, hi) = (f.lo().clone(), f.hi().clone());
        for x in f.interior_breakpoints() {
            if (x - eps) < lo || (x + eps) > hi {
                return Err(Error::SupportOverflow(format!(
                    "feature at {} is within {} of the boundary",
                    format_rational(x),
                    format_rational(eps)
                )));
            }
        }
        // Extend the outermost pieces beyond the domain so windows near
        // the boundary are well defined.
        let spans: Vec<(Rational, Rational, Poly)> = {
            let mut v: Vec<(Rational, Rational, Poly)> = f
                .spans()
                .map(|(a, b, p)| (a.clone(), b.clone(), p.clone()))
                .collect();
            if let Some(first) = v.first_mut() {
                first.0 = &lo - eps;
            }
            if let Some(last) = v.last_mut() {
                last.1 = &hi + eps;
            }
            v
        };
        // New breakpoints: domain ends plus every interior feature ± ε.
        let mut bps = vec![lo.clone(), hi.clone()];
        for x in f.interior_breakpoints() {
            bps.push(x - eps);
            bps.push(x + eps);
        }
        bps.sort();
        bps.dedup();
        let kernel = bump_in_x_minus_y(eps);
        let mut pieces = Vec::new();
        for w in bps.windows(2) {
            let mid = (&w[0] + &w[1]) / int(2);
            // windows for x in this region all see the same span pattern
            let mut piece = Poly::zero();
            for (a, b, p) in &spans {
                let win_lo = &mid - eps;
                let win_hi = &mid + eps;
                if &win_hi <= a || &win_lo >= b {
                    continue;
                }
                // lower bound: max(a, x - ε); upper: min(b, x + ε)
                let lower = if &win_lo >= a {
                    Poly::new(vec![-eps.clone(), int(1)])
                } else {
                    Poly::constant(a.clone())
                };
                let upper = if &win_hi <= b {
                    Poly::new(vec![eps.clone(), int(1)])
                } else {
                    Poly::constant(b.clone())
                };
                let integrand = kernel.mul_ypoly(p);
                let anti = integrand.antiderivative_y();
                piece = piece.add(&anti.eval_y(&upper).sub(&anti.eval_y(&lower)));
            }
            pieces.push(piece);
        }
        Ok(DMField::new(PiecewiseBV::from_poly(Piecewise::new(
            bps, pieces,
        )?)))
    }
}

fn merged_set(mut intervals: Vec<(Rational, Rational)>, points: Vec<Rational>) -> Result<BorelSet> {
    intervals.sort_by(|x, y| x.0.cmp(&y.0));
    let mut merged: Vec<(Rational, Rational)> = Vec::new();
    for (a, b) in intervals {
        if let Some(last) = merged.last_mut() {
            if a < last.1 {
                if b > last.1 {
                    last.1 = b;
                }
                continue;
            }
        }
        merged.push((a, b));
    }
    BorelSet::new(merged, points)
}

/// A polynomial in y whose coefficients are polynomials in x.
struct PolyXY(Vec<Poly>);

impl PolyXY {
    fn mul_ypoly(&self, p: &Poly) -> PolyXY {
        let mut out = vec![Poly::zero(); self.0.len() + p.coeffs().len()];
        for (i, cx) in self.0.iter().enumerate() {
            for (j, c) in p.coeffs().iter().enumerate() {
                out[i + j] = out[i + j].add(&cx.scale(c));
            }
        }
        PolyXY(out)
    }

    fn antiderivative_y(&self) -> PolyXY {
        let mut out = Vec::with_capacity(self.0.len() + 1);
        out.push(Poly::zero());
        for (i, cx) in self.0.iter().enumerate() {
            out.push(cx.scale(&(int(1) / int(i as i64 + 1))));
        }
        PolyXY(out)
    }

    /// Substitutes y = bound(x).
    fn eval_y(&self, bound: &Poly) -> Poly {
        let mut acc = Poly::zero();
        for cx in self.0.iter().rev() {
            acc = acc.mul(bound).add(cx);
        }
        acc
    }
}

/// ρ_ε(x - y) = (15 / (16 ε⁵)) (ε² - (x-y)²)² expanded as a polynomial in
/// y with x-polynomial coefficients. Symmetric, supported in |x-y| ≤ ε,
/// unit mass.
fn bump_in_x_minus_y(eps: &Rational) -> PolyXY {
    // (x - y) as PolyXY: coefficient of y⁰ is x, of y¹ is -1.
    let d = PolyXY(vec![Poly::x(), Poly::constant(int(-1))]);
    let d2 = xy_mul(&d, &d);
    // ε² - d²
    let mut base = d2;
    for c in base.0.iter_mut() {
        *c = c.neg();
    }
    base.0[0] = base.0[0].add(&Poly::constant(eps * eps));
    let squared = xy_mul(&base, &base);
    let scale = rat(15, 16) / (eps * eps * eps * eps * eps);
    PolyXY(squared.0.iter().map(|c| c.scale(&scale)).collect())
}

fn xy_mul(a: &PolyXY, b: &PolyXY) -> PolyXY {
    let mut out = vec![Poly::zero(); a.0.len() + b.0.len() - 1];
    for (i, ca) in a.0.iter().enumerate() {
        for (j, cb) in b.0.iter().enumerate() {
            out[i + j] = out[i + j].add(&ca.mul(cb));
        }
    }
    PolyXY(out)
}
