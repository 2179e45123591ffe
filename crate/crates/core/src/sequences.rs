//! One-parameter families u_h of W^{1,1} functions used in the
//! semicontinuity experiments, computed symbolically in the width
//! parameter h ∈ (0, h_max]. Every quantity of interest — the pairing
//! action against a test function, the L¹ distance to the limit, the
//! total variation — comes out as a polynomial in h, so limits along
//! h → 0 are exact evaluations rather than numerical extrapolations.

use num_traits::{Signed, Zero};

use crate::bv::{PiecewiseBV, Selector};
use crate::error::{Error, Result};
use crate::field::DMField;
use crate::pairing::pairing_by_definition;
use crate::poly::{Piecewise, Poly};
use crate::rational::{format_rational, int, rat, Bounded, Rational};

/// Which side of each jump the approximating ramps live on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// Members dominate the upper representative: u_h ≥ u⁺ pointwise.
    Upper,
    /// Members stay below the lower representative: u_h ≤ u⁻ pointwise.
    Lower,
}

#[derive(Debug, Clone)]
struct Ramp {
    x: Rational,
    left: Rational,
    right: Rational,
    /// -1: ramp on [x - w h, x]; +1: ramp on [x, x + w h].
    side: i8,
    /// width coefficient: the ramp occupies w·h.
    width: Rational,
}

impl Ramp {
    fn pinned_value(&self) -> Rational {
        // the value held at the jump point itself
        if self.side == -1 {
            self.right.clone()
        } else {
            self.left.clone()
        }
    }

    fn outer_value(&self) -> Rational {
        if self.side == -1 {
            self.left.clone()
        } else {
            self.right.clone()
        }
    }

    fn zone(&self, h: &Rational) -> (Rational, Rational) {
        let w = &self.width * h;
        if self.side == -1 {
            (&self.x - w, self.x.clone())
        } else {
            (self.x.clone(), &self.x + w)
        }
    }
}

/// A one-sided strict approximation of a BV function with finitely many
/// jumps: each jump is replaced by a linear ramp of width w·h placed on
/// the side where the function is locally constant, pinned at the jump
/// point to the dominating representative.
#[derive(Debug, Clone)]
pub struct OneSidedFamily {
    base: PiecewiseBV,
    direction: Direction,
    ramps: Vec<Ramp>,
    h_max: Rational,
}

impl OneSidedFamily {
    pub fn new(base: &PiecewiseBV, direction: Direction) -> Result<Self> {
        if base.has_stairs() {
            return Err(Error::Unrepresentable(
                "one-sided approximation of a staircase".into(),
            ));
        }
        let jumps = base.jumps();
        let (lo, hi) = base.domain();
        // candidate ramp widths: half the gap to the nearest feature
        let mut features: Vec<Rational> = base.poly_part().breakpoints().to_vec();
        features.sort();
        let mut ramps = Vec::new();
        for j in &jumps {
            let up = j.right > j.left;
            let side = match (direction, up) {
                (Direction::Upper, true) => -1,
                (Direction::Upper, false) => 1,
                (Direction::Lower, true) => 1,
                (Direction::Lower, false) => -1,
            };
            let gap = if side == -1 {
                features
                    .iter()
                    .filter(|f| **f < j.x)
                    .map(|f| &j.x - f)
                    .min()
                    .unwrap_or_else(|| &j.x - lo)
            } else {
                features
                    .iter()
                    .filter(|f| **f > j.x)
                    .map(|f| f - &j.x)
                    .min()
                    .unwrap_or_else(|| hi - &j.x)
            };
            let width = gap / int(2);
            if !width.is_positive() {
                return Err(Error::Invalid("jump at the domain boundary".into()));
            }
            ramps.push(Ramp {
                x: j.x.clone(),
                left: j.left.clone(),
                right: j.right.clone(),
                side,
                width,
            });
        }
        let fam = OneSidedFamily {
            base: base.clone(),
            direction,
            ramps,
            h_max: int(1),
        };
        // the construction requires the base locally constant on each
        // ramp zone, which also pins the exact pointwise domination
        for r in &fam.ramps {
            let (za, zb) = r.zone(&fam.h_max);
            let expect = r.outer_value();
            for (a, b, p) in base.poly_part().spans() {
                if a < &zb && &za < b {
                    match p.constant_value() {
                        Some(v) if v == expect => {}
                        _ => {
                            return Err(Error::Unrepresentable(format!(
                                "base is not locally constant beside the jump at {}",
                                format_rational(&r.x)
                            )))
                        }
                    }
                }
            }
        }
        Ok(fam)
    }

    pub fn base(&self) -> &PiecewiseBV {
        &self.base
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    pub fn h_max(&self) -> &Rational {
        &self.h_max
    }

    pub fn h_for(&self, n: u64) -> Rational {
        let h = rat(1, n.max(1) as i64);
        h.min(self.h_max.clone())
    }

    /// The concrete member at parameter h ∈ (0, h_max].
    pub fn member(&self, h: &Rational) -> Result<PiecewiseBV> {
        if !h.is_positive() || h > &self.h_max {
            return Err(Error::Invalid("parameter outside (0, h_max]".into()));
        }
        let mut poly = self.base.poly_part().clone();
        for r in &self.ramps {
            let (za, zb) = r.zone(h);
            poly = poly.with_breakpoints(&[za.clone(), zb.clone()]);
            // replace the pieces inside the zone by the ramp line
            let (v0, v1) = if r.side == -1 {
                (r.outer_value(), r.pinned_value())
            } else {
                (r.pinned_value(), r.outer_value())
            };
            let slope = (&v1 - &v0) / (&zb - &za);
            let line = Poly::new(vec![&v0 - &slope * &za, slope]);
            let mut bps = vec![poly.breakpoints()[0].clone()];
            let mut pieces = Vec::new();
            for (a, b, p) in poly.spans() {
                bps.push(b.clone());
                if a >= &za && b <= &zb {
                    pieces.push(line.clone());
                } else {
                    pieces.push(p.clone());
                }
            }
            poly = Piecewise::new(bps, pieces)?;
        }
        Ok(PiecewiseBV::from_poly(poly))
    }

    /// ⟨pairing(A, Du_h), φ⟩ as an exact polynomial in h, together with
    /// the largest h up to which it is valid (the ramp zones must stay
    /// clear of field and test-function features). Members are W^{1,1},
    /// so the pairing is A ∇u_h dx and no selector enters.
    pub fn pairing_act(&self, a: &DMField, phi: &Piecewise) -> Result<(Poly, Rational)> {
        let (dom_lo, dom_hi) = self.base.domain();
        if phi.lo() > dom_lo || phi.hi() < dom_hi {
            return Err(Error::Invalid("test function must cover the domain".into()));
        }
        // base gradient part: ∫ A ∇u φ (the ramp zones carry no base
        // gradient, so this term is independent of h)
        let grad_phi = {
            let phi_here = phi.restrict_to(dom_lo, dom_hi)?;
            self.base
                .poly_part()
                .map(|p| p.derivative())
                .zip_with(&phi_here, |p, q| p.mul(q))?
        };
        let c0 = a.profile().integrate_against(&grad_phi)?;
        if !c0.is_exact() {
            return Err(Error::Unrepresentable(
                "field staircase too close to a ramp zone".into(),
            ));
        }
        let mut total = Poly::constant(c0.value);
        let mut h_valid = self.h_max.clone();
        for r in &self.ramps {
            let (term, bound) = ramp_term(a, phi, r)?;
            total = total.add(&term);
            h_valid = h_valid.min(bound);
        }
        Ok((total, h_valid))
    }

    /// ∫ |u_h - u| dx: each ramp contributes a triangle of area
    /// |jump|·w·h/2.
    pub fn l1_distance_poly(&self) -> Poly {
        let mut c = Rational::zero();
        for r in &self.ramps {
            c += (&r.right - &r.left).abs() * &r.width / int(2);
        }
        Poly::new(vec![Rational::zero(), c])
    }

    /// |Du_h|(Ω): ramps reproduce each jump's variation exactly, so this
    /// is constant in h.
    pub fn tv_poly(&self) -> Result<Poly> {
        let base_tv = self.base.derivative().total_variation()?.mass();
        Ok(Poly::constant(base_tv.value))
    }

    /// One-sided limits of u_h at a point, as polynomials in h (constant
    /// for this construction: ramps pin the jump values).
    pub fn one_sided_at(&self, x: &Rational, h_probe: &Rational) -> Result<(Poly, Poly)> {
        let member = self.member(h_probe)?;
        let (l, r) = member.one_sided(x);
        Ok((Poly::constant(l), Poly::constant(r)))
    }

    /// Uniform bound sup_h ‖u_h‖∞ (members stay inside the base range).
    pub fn sup_bound(&self) -> Result<Rational> {
        self.base.sup_norm()
    }
}

/// The ramp contribution slope(h) · ∫_zone(h) A φ dx as a polynomial in h,
/// valid while the zone stays within the field and test-function pieces
/// adjacent to the jump; the second component is that validity bound.
fn ramp_term(a: &DMField, phi: &Piecewise, r: &Ramp) -> Result<(Poly, Rational)> {
    let (a_poly, dist_a) =
        adjacent_piece(a.profile().poly_part(), &r.x, r.side).ok_or_else(|| {
            Error::Unrepresentable(format!(
                "field undefined beside the ramp at {}",
                format_rational(&r.x)
            ))
        })?;
    // staircase summands of the field shrink the clear distance as well
    let mut dist_a = dist_a;
    for s in a.profile().stairs() {
        let d = if r.side == -1 {
            if s.support.1 <= r.x {
                &r.x - &s.support.1
            } else {
                continue;
            }
        } else if s.support.0 >= r.x {
            &s.support.0 - &r.x
        } else {
            continue;
        };
        dist_a = dist_a.min(d);
    }
    let (phi_poly, dist_p) = adjacent_piece(phi, &r.x, r.side).ok_or_else(|| {
        Error::Unrepresentable(format!(
            "test function undefined beside the ramp at {}",
            format_rational(&r.x)
        ))
    })?;
    let clear = dist_a.min(dist_p);
    if !clear.is_positive() {
        return Err(Error::Unrepresentable(format!(
            "no clear zone beside the ramp at {}",
            format_rational(&r.x)
        )));
    }
    let h_valid = clear / &r.width;
    let g = a_poly.mul(&phi_poly).antiderivative();
    // zone = [x - w h, x] or [x, x + w h]; signed jump v1 - v0 over w h
    let jump = &r.right - &r.left;
    // ∫_zone A φ = G(zone_hi) - G(zone_lo), with the moving end x ∓ w h:
    // substitute and divide by h exactly.
    let moving = Poly::new(vec![
        r.x.clone(),
        if r.side == -1 {
            -r.width.clone()
        } else {
            r.width.clone()
        },
    ]); // x ± w h as a polynomial in h
    let g_fixed = g.eval(&r.x);
    let g_moving = g.compose(&moving);
    let diff = if r.side == -1 {
        // ∫ = G(x) - G(x - w h)
        Poly::constant(g_fixed).sub(&g_moving)
    } else {
        // ∫ = G(x + w h) - G(x)
        g_moving.sub(&Poly::constant(g_fixed))
    };
    // slope = jump / (w h); diff vanishes at h = 0, so diff/h is a poly
    let over_h = shift_down(&diff)?;
    Ok((over_h.scale(&(jump / &r.width)), h_valid))
}

/// The polynomial piece of f touching x from the given side, with the
/// distance to the far end of that piece.
fn adjacent_piece(f: &Piecewise, x: &Rational, side: i8) -> Option<(Poly, Rational)> {
    for (lo, hi, p) in f.spans() {
        if side == -1 && (hi == x || (lo < x && x < hi)) {
            return Some((p.clone(), x - lo));
        }
        if side == 1 && (lo == x || (lo < x && x < hi)) {
            return Some((p.clone(), hi - x));
        }
    }
    None
}

/// p / h for a polynomial with p(0) = 0.
fn shift_down(p: &Poly) -> Result<Poly> {
    if p.is_zero() {
        return Ok(Poly::zero());
    }
    let c = p.coeffs();
    if !c[0].is_zero() {
        return Err(Error::Invalid("polynomial does not vanish at zero".into()));
    }
    Ok(Poly::new(c[1..].to_vec()))
}

/// A tent bump of the given height and half-width h added to a base
/// function: L¹-small but with total variation 2|height|, the model
/// weak*-but-not-strict perturbation.
#[derive(Debug, Clone)]
pub struct TentFamily {
    base: PiecewiseBV,
    pub center: Rational,
    pub height: Rational,
    h_max: Rational,
}

impl TentFamily {
    pub fn new(base: &PiecewiseBV, center: Rational, height: Rational) -> Result<Self> {
        let (lo, hi) = base.domain();
        if &center <= lo || &center >= hi {
            return Err(Error::Invalid("tent center must be interior".into()));
        }
        let gap = (&center - lo).min(hi - &center);
        Ok(TentFamily {
            base: base.clone(),
            center,
            height,
            h_max: gap / int(2),
        })
    }

    pub fn base(&self) -> &PiecewiseBV {
        &self.base
    }

    pub fn h_max(&self) -> &Rational {
        &self.h_max
    }

    pub fn h_for(&self, n: u64) -> Rational {
        rat(1, n.max(1) as i64).min(self.h_max.clone())
    }

    pub fn member(&self, h: &Rational) -> Result<PiecewiseBV> {
        if !h.is_positive() || h > &self.h_max {
            return Err(Error::Invalid("parameter outside (0, h_max]".into()));
        }
        let (lo, hi) = self.base.domain();
        let slope = &self.height / h;
        let up = Poly::new(vec![&self.height - &slope * &self.center, slope.clone()]);
        let down = Poly::new(vec![&self.height + &slope * &self.center, -slope]);
        let tent = Piecewise::new(
            vec![
                lo.clone(),
                &self.center - h,
                self.center.clone(),
                &self.center + h,
                hi.clone(),
            ],
            vec![Poly::zero(), up, down, Poly::zero()],
        )?;
        self.base.add(&PiecewiseBV::from_poly(tent))
    }

    /// ⟨pairing(A, Du_h, λ), φ⟩ as a polynomial in h with its validity
    /// bound: the base pairing (h-independent) plus the two tent flanks.
    pub fn pairing_act(
        &self,
        a: &DMField,
        sel: &Selector,
        phi: &Piecewise,
    ) -> Result<(Poly, Rational)> {
        let base_act = pairing_by_definition(a, &self.base, sel)?
            .measure
            .act(phi)?;
        if !base_act.is_exact() {
            return Err(Error::Unrepresentable("inexact base pairing".into()));
        }
        let mut total = Poly::constant(base_act.value);
        let mut h_valid = self.h_max.clone();
        // rising flank on (c - h, c): slope v/h; falling flank mirrored
        for (side, sign) in [(-1i8, 1i64), (1i8, -1i64)] {
            let r = Ramp {
                x: self.center.clone(),
                left: Rational::zero(),
                right: int(sign) * &self.height,
                side,
                width: int(1),
            };
            let (term, bound) = ramp_term(a, phi, &r)?;
            total = total.add(&term);
            h_valid = h_valid.min(bound);
        }
        Ok((total, h_valid))
    }

    pub fn l1_distance_poly(&self) -> Poly {
        Poly::new(vec![Rational::zero(), self.height.abs()])
    }

    pub fn tv_poly(&self) -> Result<Poly> {
        let base_tv = self.base.derivative().total_variation()?.mass();
        Ok(Poly::constant(base_tv.value + int(2) * self.height.abs()))
    }

    pub fn sup_bound(&self) -> Result<Rational> {
        Ok(self.base.sup_norm()? + self.height.abs())
    }
}

/// A strict-convergence certificate for a family: the L¹ distance and
/// total variation as polynomials in h, with the verdict compared against
/// the base's variation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StrictCertificate {
    pub l1_poly: Poly,
    pub tv_poly: Poly,
    pub tv_limit: Rational,
    pub base_tv: Rational,
    pub strict: bool,
}

pub fn certify_one_sided(fam: &OneSidedFamily) -> Result<StrictCertificate> {
    let l1 = fam.l1_distance_poly();
    let tv = fam.tv_poly()?;
    let base_tv = fam.base().derivative().total_variation()?.mass().value;
    let tv_limit = tv.eval(&Rational::zero());
    let strict = l1.eval(&Rational::zero()).is_zero() && tv_limit == base_tv;
    Ok(StrictCertificate {
        l1_poly: l1,
        tv_poly: tv,
        tv_limit,
        base_tv,
        strict,
    })
}

pub fn certify_tent(fam: &TentFamily) -> Result<StrictCertificate> {
    let l1 = fam.l1_distance_poly();
    let tv = fam.tv_poly()?;
    let base_tv = fam.base().derivative().total_variation()?.mass().value;
    let tv_limit = tv.eval(&Rational::zero());
    let strict = l1.eval(&Rational::zero()).is_zero() && tv_limit == base_tv;
    Ok(StrictCertificate {
        l1_poly: l1,
        tv_poly: tv,
        tv_limit,
        base_tv,
        strict,
    })
}

/// Polynomial extrapolation of user-supplied (h, value) samples: fits the
/// first n-1 points exactly and reports the prediction error at the last
/// as the certified uncertainty of the h → 0 limit.
pub fn extrapolate_limit(samples: &[(Rational, Rational)]) -> Result<Bounded> {
    if samples.len() < 2 {
        return Err(Error::Invalid("need at least two samples".into()));
    }
    let (fit, check) = samples.split_at(samples.len() - 1);
    // Lagrange interpolation evaluated at 0 and at the checkpoint.
    let eval_at = |x: &Rational| -> Rational {
        let mut acc = Rational::zero();
        for (i, (hi_, vi)) in fit.iter().enumerate() {
            let mut term = vi.clone();
            for (j, (hj, _)) in fit.iter().enumerate() {
                if i != j {
                    term *= (x - hj) / (hi_ - hj);
                }
            }
            acc += term;
        }
        acc
    };
    let at_zero = eval_at(&Rational::zero());
    let (hc, vc) = &check[0];
    let err = (eval_at(hc) - vc).abs();
    Ok(Bounded::with_err(at_zero, err))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn indicator_field() -> DMField {
        DMField::indicator(int(-2), int(2), int(-1), int(1)).unwrap()
    }

    fn indicator_function() -> PiecewiseBV {
        PiecewiseBV::indicator(int(-2), int(2), int(-1), int(1)).unwrap()
    }

    #[test]
    fn upper_family_matches_minmax_profile() {
        // u = χ_{[-1,1]}: the upper members hold the value 1 at ±1 with
        // ramps outside, exactly the max/min profile from the example.
        let fam = OneSidedFamily::new(&indicator_function(), Direction::Upper).unwrap();
        let m = fam.member(&rat(1, 4)).unwrap();
        assert_eq!(m.tilde(&int(-1)), Some(int(1)));
        assert_eq!(m.tilde(&int(1)), Some(int(1)));
        // zone is [-9/8, -1]; at its midpoint the ramp reads 1/2
        assert_eq!(m.tilde(&rat(-17, 16)), Some(rat(1, 2)));
        // pointwise domination of u⁺ on a sample grid
        let u = indicator_function();
        let mut x = rat(-15, 8);
        while x < rat(15, 8) {
            let (_, upper) = u.approx_limits(&x);
            assert!(m.tilde(&x).unwrap() >= upper);
            x += rat(1, 8);
        }
        assert!(m.jumps().is_empty(), "members are W^{{1,1}}");
    }

    #[test]
    fn lower_family_stays_below() {
        let fam = OneSidedFamily::new(&indicator_function(), Direction::Lower).unwrap();
        let m = fam.member(&rat(1, 4)).unwrap();
        assert_eq!(m.tilde(&int(-1)), Some(int(0)));
        let u = indicator_function();
        let mut x = rat(-15, 8);
        while x < rat(15, 8) {
            let (lower, _) = u.approx_limits(&x);
            assert!(m.tilde(&x).unwrap() <= lower);
            x += rat(1, 8);
        }
    }

    #[test]
    fn strict_certificate_for_ramps() {
        let fam = OneSidedFamily::new(&indicator_function(), Direction::Upper).unwrap();
        let cert = certify_one_sided(&fam).unwrap();
        assert!(cert.strict);
        assert_eq!(cert.base_tv, int(2));
        assert_eq!(cert.tv_poly, Poly::constant(int(2))); // |Du_h| ≡ 2
                                                          // the member variation agrees with the symbolic value
        let m = fam.member(&rat(1, 8)).unwrap();
        assert_eq!(
            m.derivative().total_variation().unwrap().mass().value,
            int(2)
        );
        // L¹ distance: two ramps of area w h/2 each with w = 1/2
        assert_eq!(cert.l1_poly, Poly::new(vec![int(0), rat(1, 2)]));
    }

    #[test]
    fn example_upper_sequence_pairs_to_zero() {
        // A = χ_{(-1,1)} vanishes on the ramp zones, so every member pairs
        // to zero against every test function.
        let fam = OneSidedFamily::new(&indicator_function(), Direction::Upper).unwrap();
        let a = indicator_field();
        let phi = Piecewise::single(int(-2), int(2), Poly::from_ints(&[1, 1, 1]));
        let (v, _) = fam.pairing_act(&a, &phi).unwrap();
        assert!(v.is_zero());
        // sanity against a concrete member through the definition route
        let m = fam.member(&rat(1, 3)).unwrap();
        let p = pairing_by_definition(&a, &m, &Selector::midpoint()).unwrap();
        assert_eq!(p.measure.act(&phi).unwrap(), Bounded::exact(int(0)));
    }

    #[test]
    fn symbolic_action_matches_members() {
        // A with nonzero values on the ramp zones to exercise the h-terms.
        let a = DMField::from_poly(Piecewise::single(int(-2), int(2), Poly::from_ints(&[1, 1])));
        let fam = OneSidedFamily::new(&indicator_function(), Direction::Upper).unwrap();
        let phi = Piecewise::single(int(-2), int(2), Poly::from_ints(&[0, 0, 1]));
        let (v, h_valid) = fam.pairing_act(&a, &phi).unwrap();
        for h in [rat(1, 2), rat(1, 5), rat(1, 16)] {
            assert!(h <= h_valid);
            let m = fam.member(&h).unwrap();
            let p = pairing_by_definition(&a, &m, &Selector::midpoint()).unwrap();
            assert_eq!(p.measure.act(&phi).unwrap(), Bounded::exact(v.eval(&h)));
        }
    }

    #[test]
    fn constant_function_family_is_constant() {
        let u = PiecewiseBV::constant(int(-2), int(2), rat(5, 3));
        let fam = OneSidedFamily::new(&u, Direction::Upper).unwrap();
        assert_eq!(fam.member(&rat(1, 4)).unwrap(), u);
        let cert = certify_one_sided(&fam).unwrap();
        assert!(cert.strict);
        assert!(cert.l1_poly.is_zero());
    }

    #[test]
    fn tent_member_pairing_measure_shape() {
        // A = indicator of (0,1), u_h the tent at 0 with height 1:
        // the pairing measure is the constant density -1/h on (0, h).
        let base = PiecewiseBV::constant(int(-2), int(2), int(0));
        let fam = TentFamily::new(&base, int(0), int(1)).unwrap();
        let a = DMField::indicator(int(-2), int(2), int(0), int(1)).unwrap();
        for h in [rat(1, 4), rat(1, 8)] {
            let m = fam.member(&h).unwrap();
            let p = pairing_by_definition(&a, &m, &Selector::midpoint()).unwrap();
            let expected = crate::measure::Measure::new(
                vec![(int(0), h.clone(), Poly::constant(int(-1) / &h))],
                Vec::new(),
                Vec::new(),
            );
            assert_eq!(p.measure, expected);
        }
    }

    #[test]
    fn tent_family_reproduces_weakstar_example() {
        // A = χ_{(0,1)}, u_h the tent at 0: ⟨pairing_h, φ⟩ → -φ(0).
        let base = PiecewiseBV::constant(int(-2), int(2), int(0));
        let fam = TentFamily::new(&base, int(0), int(1)).unwrap();
        let a = DMField::indicator(int(-2), int(2), int(0), int(1)).unwrap();
        let phi = Piecewise::single(int(-2), int(2), Poly::from_ints(&[2, 1, 1]));
        let (v, h_valid) = fam.pairing_act(&a, &Selector::midpoint(), &phi).unwrap();
        assert_eq!(v.eval(&Rational::zero()), -phi.eval(&int(0)));
        assert!(rat(1, 2) <= h_valid);
        // certificate flags the family as not strict
        let cert = certify_tent(&fam).unwrap();
        assert!(!cert.strict);
        assert_eq!(cert.tv_limit, int(2));
        assert_eq!(cert.base_tv, int(0));
        // members agree with the symbolic polynomial
        for h in [rat(1, 2), rat(1, 7)] {
            let m = fam.member(&h).unwrap();
            let p = pairing_by_definition(&a, &m, &Selector::midpoint()).unwrap();
            assert_eq!(p.measure.act(&phi).unwrap(), Bounded::exact(v.eval(&h)));
        }
    }

    #[test]
    fn limit_bracketing_along_members() {
        // u⁻ ≤ lim u_h⁻ ≤ lim u_h⁺ ≤ u⁺ at every breakpoint.
        let u = indicator_function();
        for dir in [Direction::Upper, Direction::Lower] {
            let fam = OneSidedFamily::new(&u, dir).unwrap();
            for x in u.poly_part().breakpoints() {
                if x == u.poly_part().lo() || x == u.poly_part().hi() {
                    continue;
                }
                let (lo_poly, hi_poly) = fam.one_sided_at(x, &rat(1, 64)).unwrap();
                let (u_lo, u_hi) = u.approx_limits(x);
                let ml = lo_poly.eval(&Rational::zero());
                let mh = hi_poly.eval(&Rational::zero());
                let (ml, mh) = if ml <= mh { (ml, mh) } else { (mh, ml) };
                assert!(u_lo <= ml && mh <= u_hi);
            }
        }
    }

    #[test]
    fn extrapolation_reports_uncertainty() {
        // samples of v(h) = 3 - 2h + h²
        let v = |h: &Rational| int(3) - int(2) * h + h * h;
        let samples: Vec<(Rational, Rational)> = [rat(1, 2), rat(1, 4), rat(1, 8), rat(1, 16)]
            .into_iter()
            .map(|h| (h.clone(), v(&h)))
            .collect();
        let lim = extrapolate_limit(&samples).unwrap();
        assert_eq!(lim.value, int(3));
        assert!(lim.err.is_zero());
    }
}
