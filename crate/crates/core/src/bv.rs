//! BV functions on an interval with exact pointwise structure: polynomial
//! pieces with explicit jumps at breakpoints, plus continuous staircase
//! summands whose derivative is a Cantor measure. One-sided limits, the
//! approximate upper/lower limits, selector representatives, derivative
//! measures, truncations, and level sets are all exact.

use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;

use crate::cantor::{self, CantorPart};
use crate::error::{Error, Result};
use crate::measure::Measure;
use crate::poly::{Piecewise, Poly};
use crate::rational::{format_rational, int, rat, Bounded, Rational};
use crate::roots::{rational_roots_in, sign_partition};
use crate::set::BorelSet;

/// A continuous staircase summand: zero before its support, climbing the
/// (windowed) devil's staircase across it, constant after.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StairBlock {
    pub support: (Rational, Rational),
    pub window: (Rational, Rational),
    pub scale: Rational,
}

impl StairBlock {
    pub fn new(a: Rational, b: Rational, scale: Rational) -> Self {
        StairBlock {
            support: (a, b),
            window: (Rational::zero(), Rational::one()),
            scale,
        }
    }

    fn base_cdf(&self) -> Rational {
        cantor::cdf(&self.window.0)
    }

    /// Total rise across the support.
    pub fn rise(&self) -> Rational {
        &self.scale * (cantor::cdf(&self.window.1) - self.base_cdf())
    }

    /// Value of the summand at x (continuous).
    pub fn value(&self, x: &Rational) -> Rational {
        if *x <= self.support.0 {
            return Rational::zero();
        }
        if *x >= self.support.1 {
            return self.rise();
        }
        let t = (x - &self.support.0) / (&self.support.1 - &self.support.0);
        let t = t.max(self.window.0.clone()).min(self.window.1.clone());
        &self.scale * (cantor::cdf(&t) - self.base_cdf())
    }

    /// The derivative as a staircase measure component.
    pub fn derivative(&self) -> CantorPart {
        CantorPart {
            support: self.support.clone(),
            window: self.window.clone(),
            weight: Poly::constant(self.scale.clone()),
        }
    }

    pub fn scaled(&self, c: &Rational) -> StairBlock {
        StairBlock {
            support: self.support.clone(),
            window: self.window.clone(),
            scale: &self.scale * c,
        }
    }
}

/// A Borel selector λ: a default value in [0, 1] plus finitely many
/// point overrides.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Selector {
    default: Rational,
    overrides: BTreeMap<Rational, Rational>,
}

impl Selector {
    pub fn new(default: Rational, overrides: BTreeMap<Rational, Rational>) -> Result<Self> {
        let ok = |v: &Rational| *v >= Rational::zero() && *v <= Rational::one();
        if !ok(&default) || !overrides.values().all(ok) {
            return Err(Error::Invalid("selector values must lie in [0, 1]".into()));
        }
        Ok(Selector { default, overrides })
    }

    pub fn constant(v: Rational) -> Result<Self> {
        Selector::new(v, BTreeMap::new())
    }

    /// The precise-representative selector λ ≡ 1/2.
    pub fn midpoint() -> Self {
        Selector::constant(rat(1, 2)).unwrap()
    }

    pub fn value_at(&self, x: &Rational) -> Rational {
        self.overrides
            .get(x)
            .cloned()
            .unwrap_or_else(|| self.default.clone())
    }

    pub fn default_value(&self) -> &Rational {
        &self.default
    }

    pub fn overrides(&self) -> &BTreeMap<Rational, Rational> {
        &self.overrides
    }
}

/// One jump of a BV function, oriented so that the interior side carries
/// the approximate upper limit: ν = +1 for upward jumps (left < right).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Jump {
    pub x: Rational,
    pub left: Rational,
    pub right: Rational,
}

impl Jump {
    pub fn upper(&self) -> Rational {
        self.left.clone().max(self.right.clone())
    }

    pub fn lower(&self) -> Rational {
        self.left.clone().min(self.right.clone())
    }

    pub fn nu(&self) -> i8 {
        if self.right > self.left {
            1
        } else {
            -1
        }
    }

    /// The λ-representative value (1-λ)u⁻ + λu⁺.
    pub fn lambda_value(&self, lambda: &Rational) -> Rational {
        (Rational::one() - lambda) * self.lower() + lambda * self.upper()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PiecewiseBV {
    poly: Piecewise,
    stairs: Vec<StairBlock>,
}

impl PiecewiseBV {
    pub fn new(poly: Piecewise, stairs: Vec<StairBlock>) -> Result<Self> {
        for s in &stairs {
            if s.support.0 < *poly.lo() || s.support.1 > *poly.hi() || s.support.0 >= s.support.1 {
                return Err(Error::Invalid(
                    "staircase support must lie inside the domain".into(),
                ));
            }
        }
        let mut blocks: Vec<StairBlock> = Vec::new();
        for s in stairs {
            if s.scale.is_zero() {
                continue;
            }
            // canonical geometry via the measure-side normal form
            if let Some(part) = s.derivative().normalize() {
                let scale = part
                    .weight
                    .constant_value()
                    .expect("constant weight stays constant");
                blocks.push(StairBlock {
                    support: part.support,
                    window: part.window,
                    scale,
                });
            }
        }
        blocks.sort_by(|a, b| (&a.support, &a.window.0).cmp(&(&b.support, &b.window.0)));
        // merge identical geometry
        let mut merged: Vec<StairBlock> = Vec::new();
        for b in blocks {
            if let Some(last) = merged.last_mut() {
                if last.support == b.support && last.window == b.window {
                    last.scale += b.scale;
                    continue;
                }
            }
            merged.push(b);
        }
        merged.retain(|b| !b.scale.is_zero());
        Ok(PiecewiseBV {
            poly: poly.normalize(),
            stairs: merged,
        })
    }

    pub fn from_poly(poly: Piecewise) -> Self {
        PiecewiseBV::new(poly, Vec::new()).expect("no stairs to validate")
    }

    pub fn constant(a: Rational, b: Rational, c: Rational) -> Self {
        PiecewiseBV::from_poly(Piecewise::constant_on(a, b, c))
    }

    /// The indicator of [c, d] inside (lo, hi).
    pub fn indicator(lo: Rational, hi: Rational, c: Rational, d: Rational) -> Result<Self> {
        if c <= lo || d >= hi || c >= d {
            return Err(Error::Invalid("indicator interval must be interior".into()));
        }
        Ok(PiecewiseBV::from_poly(Piecewise::new(
            vec![lo, c, d, hi],
            vec![Poly::zero(), Poly::one(), Poly::zero()],
        )?))
    }

    pub fn domain(&self) -> (&Rational, &Rational) {
        (self.poly.lo(), self.poly.hi())
    }

    pub fn poly_part(&self) -> &Piecewise {
        &self.poly
    }

    pub fn stairs(&self) -> &[StairBlock] {
        &self.stairs
    }

    pub fn has_stairs(&self) -> bool {
        !self.stairs.is_empty()
    }

    fn stair_sum(&self, x: &Rational) -> Rational {
        self.stairs.iter().map(|s| s.value(x)).sum()
    }

    pub fn left_limit(&self, x: &Rational) -> Rational {
        self.poly.left_limit(x) + self.stair_sum(x)
    }

    pub fn right_limit(&self, x: &Rational) -> Rational {
        self.poly.right_limit(x) + self.stair_sum(x)
    }

    /// One-sided limits at an interior point, ordered as (left, right).
    pub fn one_sided(&self, x: &Rational) -> (Rational, Rational) {
        let (lo, hi) = self.domain();
        let left = if x > lo {
            self.left_limit(x)
        } else {
            self.right_limit(x)
        };
        let right = if x < hi {
            self.right_limit(x)
        } else {
            self.left_limit(x)
        };
        (left, right)
    }

    /// Approximate lower and upper limits (u⁻, u⁺) at x.
    pub fn approx_limits(&self, x: &Rational) -> (Rational, Rational) {
        let (l, r) = self.one_sided(x);
        if l <= r {
            (l, r)
        } else {
            (r, l)
        }
    }

    /// The approximate limit ũ(x), defined where the one-sided limits
    /// agree.
    pub fn tilde(&self, x: &Rational) -> Option<Rational> {
        let (l, r) = self.one_sided(x);
        if l == r {
            Some(l)
        } else {
            None
        }
    }

    /// The λ-representative u^λ(x) = (1-λ(x)) u⁻(x) + λ(x) u⁺(x).
    pub fn lambda_value(&self, sel: &Selector, x: &Rational) -> Rational {
        let (lo, hi) = self.approx_limits(x);
        let lam = sel.value_at(x);
        (Rational::one() - &lam) * lo + lam * hi
    }

    /// The precise representative u* = (u⁺ + u⁻)/2.
    pub fn precise_value(&self, x: &Rational) -> Rational {
        let (lo, hi) = self.approx_limits(x);
        (lo + hi) / int(2)
    }

    /// All jumps, in increasing order of location.
    pub fn jumps(&self) -> Vec<Jump> {
        let mut out = Vec::new();
        for x in self.poly.interior_breakpoints() {
            let l = self.left_limit(x);
            let r = self.right_limit(x);
            if l != r {
                out.push(Jump {
                    x: x.clone(),
                    left: l,
                    right: r,
                });
            }
        }
        out
    }

    pub fn jump_at(&self, x: &Rational) -> Option<Jump> {
        let (l, r) = self.one_sided(x);
        if l != r {
            Some(Jump {
                x: x.clone(),
                left: l,
                right: r,
            })
        } else {
            None
        }
    }

    /// The derivative measure Du.
    pub fn derivative(&self) -> Measure {
        let ac = self
            .poly
            .spans()
            .map(|(a, b, p)| (a.clone(), b.clone(), p.derivative()))
            .collect();
        let atoms = self
            .jumps()
            .into_iter()
            .map(|j| (j.x, j.right - j.left))
            .collect();
        let cantor = self.stairs.iter().map(|s| s.derivative()).collect();
        Measure::new(ac, atoms, cantor)
    }

    pub fn add(&self, other: &PiecewiseBV) -> Result<PiecewiseBV> {
        let poly = self.poly.add(&other.poly)?;
        let mut stairs = self.stairs.clone();
        stairs.extend(other.stairs.iter().cloned());
        PiecewiseBV::new(poly, stairs)
    }

    pub fn sub(&self, other: &PiecewiseBV) -> Result<PiecewiseBV> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> PiecewiseBV {
        self.scale(&int(-1))
    }

    pub fn scale(&self, c: &Rational) -> PiecewiseBV {
        PiecewiseBV {
            poly: self.poly.scale(c),
            stairs: self.stairs.iter().map(|s| s.scaled(c)).collect(),
        }
    }

    pub fn add_constant(&self, c: &Rational) -> PiecewiseBV {
        PiecewiseBV {
            poly: self.poly.map(|p| p.add(&Poly::constant(c.clone()))),
            stairs: self.stairs.clone(),
        }
    }

    fn stairs_overlap(&self, a: &Rational, b: &Rational) -> bool {
        self.stairs
            .iter()
            .any(|s| &s.support.0 < b && a < &s.support.1)
    }

    /// The product u·v in the same function algebra:
    ///   u·v = p_u p_v + Σ S_i p_v + Σ T_j p_u + Σ S_i T_j.
    /// A staircase summand multiplies a polynomial factor only where that
    /// factor is constant across the support; the completed rise times the
    /// factor's later variation lands back in the polynomial part. Richer
    /// interactions (overlapping staircases, varying factors across a
    /// support) are rejected rather than approximated.
    pub fn mul(&self, other: &PiecewiseBV) -> Result<PiecewiseBV> {
        let mut poly = self.poly.mul(&other.poly)?;
        let mut stairs: Vec<StairBlock> = Vec::new();
        for (blocks, factor) in [(&self.stairs, &other.poly), (&other.stairs, &self.poly)] {
            for s in blocks.iter() {
                let c = const_value_on(factor, &s.support.0, &s.support.1).ok_or_else(|| {
                    Error::Unrepresentable(format!(
                        "factor is not constant across the staircase support ({}, {})",
                        format_rational(&s.support.0),
                        format_rational(&s.support.1)
                    ))
                })?;
                stairs.push(s.scaled(&c));
                // rise · (factor - c) past the support end
                let rise = s.rise();
                if !rise.is_zero() {
                    let tail_fn = factor.map(|p| p.sub(&Poly::constant(c.clone())).scale(&rise));
                    poly = poly.add(&zero_before(&tail_fn, &s.support.1))?;
                }
            }
        }
        // stair × stair with disjoint supports: the completed factor is a
        // constant on the other support.
        for si in &self.stairs {
            for tj in &other.stairs {
                if si.support.1 <= tj.support.0 {
                    stairs.push(tj.scaled(&si.rise()));
                } else if tj.support.1 <= si.support.0 {
                    stairs.push(si.scaled(&tj.rise()));
                } else {
                    return Err(Error::CantorJumpInteraction(
                        "staircase supports overlap in a product".into(),
                    ));
                }
            }
        }
        PiecewiseBV::new(poly, stairs)
    }

    /// Composition h(u) for a polynomial h; with staircase summands only
    /// affine h keeps the algebra closed.
    pub fn compose(&self, h: &Poly) -> Result<PiecewiseBV> {
        if self.stairs.is_empty() {
            return Ok(PiecewiseBV {
                poly: self.poly.map(|p| h.compose(p)),
                stairs: Vec::new(),
            });
        }
        if h.degree().unwrap_or(0) <= 1 {
            let a = h.coeffs().first().cloned().unwrap_or_else(Rational::zero);
            let b = h.coeffs().get(1).cloned().unwrap_or_else(Rational::zero);
            return Ok(self.scale(&b).add_constant(&a));
        }
        Err(Error::Unrepresentable(
            "nonlinear composition of a staircase".into(),
        ))
    }

    /// Essential sup of |u|, exact. Errors when an exact value would need
    /// an irrational critical point.
    pub fn sup_norm(&self) -> Result<Rational> {
        let (pos, neg) = self.range()?;
        Ok(pos.abs().max(neg.abs()))
    }

    /// Exact essential range bounds (min, max) of u.
    pub fn range(&self) -> Result<(Rational, Rational)> {
        let mut lo: Option<Rational> = None;
        let mut hi: Option<Rational> = None;
        let mut admit = |v: Rational| {
            lo = Some(match lo.take() {
                Some(l) => l.min(v.clone()),
                None => v.clone(),
            });
            hi = Some(match hi.take() {
                Some(h) => h.max(v),
                None => v,
            });
        };
        for (a, b, p) in self.poly.spans() {
            if self.stairs_overlap(a, b) {
                // need the poly constant across each staircase piece; the
                // combined function is then monotone staircase + constant,
                // extremal at the span ends.
                let offsets_monotone = {
                    let overlapping: Vec<&StairBlock> = self
                        .stairs
                        .iter()
                        .filter(|s| &s.support.0 < b && a < &s.support.1)
                        .collect();
                    overlapping.iter().all(|s| !s.scale.is_negative())
                        || overlapping.iter().all(|s| !s.scale.is_positive())
                };
                if p.constant_value().is_none() || !offsets_monotone {
                    return Err(Error::Unrepresentable(
                        "range over a staircase region with a varying polynomial".into(),
                    ));
                }
                admit(self.right_limit(a));
                admit(self.left_limit(b));
                continue;
            }
            let offset = self.stair_sum(&((a + b) / int(2)));
            admit(p.eval(a) + &offset);
            admit(p.eval(b) + &offset);
            for root in rational_roots_in(&p.derivative(), a, b)? {
                admit(p.eval(&root) + &offset);
            }
        }
        Ok((lo.clone().unwrap(), hi.unwrap()))
    }

    /// T_k(u) = max(min(u, k), -k) with exact crossing breakpoints.
    pub fn truncate(&self, k: &Rational) -> Result<PiecewiseBV> {
        if !k.is_positive() {
            return Err(Error::Invalid("truncation level must be positive".into()));
        }
        if !self.stairs.is_empty() {
            let (lo, hi) = self.range()?;
            if lo >= -k.clone() && hi <= k.clone() {
                return Ok(self.clone());
            }
            return Err(Error::Unrepresentable(
                "truncation would clip a staircase region".into(),
            ));
        }
        let mut bps = vec![self.poly.lo().clone()];
        let mut pieces = Vec::new();
        for (a, b, p) in self.poly.spans() {
            let mut cuts = vec![a.clone()];
            let upper = p.sub(&Poly::constant(k.clone()));
            let lower = p.add(&Poly::constant(k.clone()));
            let mut roots = rational_roots_in(&upper, a, b)
                .and_then(|mut r| {
                    r.extend(rational_roots_in(&lower, a, b)?);
                    Ok(r)
                })
                .map_err(|e| match e {
                    Error::IrrationalRoot(m) => Error::DegreeUnsupported(m),
                    other => other,
                })?;
            roots.sort();
            roots.dedup();
            cuts.extend(roots);
            cuts.push(b.clone());
            for w in cuts.windows(2) {
                let mid = (&w[0] + &w[1]) / int(2);
                let v = p.eval(&mid);
                let clipped = if v > *k {
                    Poly::constant(k.clone())
                } else if v < -k.clone() {
                    Poly::constant(-k.clone())
                } else {
                    p.clone()
                };
                bps.push(w[1].clone());
                pieces.push(clipped);
            }
        }
        Ok(PiecewiseBV::from_poly(Piecewise::new(bps, pieces)?))
    }

    /// The superlevel set {u > t} as a finite union of intervals with
    /// oriented boundary (interior normal: +1 at left endpoints).
    pub fn level_set(&self, t: &Rational) -> Result<LevelSet> {
        if !self.stairs.is_empty() {
            return Err(Error::Unrepresentable(
                "level sets of staircase functions".into(),
            ));
        }
        let (dom_lo, dom_hi) = self.domain();
        let mut above: Vec<(Rational, Rational)> = Vec::new();
        for (a, b, p) in self.poly.spans() {
            let shifted = p.sub(&Poly::constant(t.clone()));
            let partition = sign_partition(&shifted, a, b).map_err(|e| match e {
                Error::IrrationalRoot(m) => Error::DegreeUnsupported(m),
                other => other,
            })?;
            for (lo, hi, s) in partition {
                if s > 0 {
                    above.push((lo, hi));
                }
            }
        }
        // merge touching intervals: a shared endpoint between two pieces of
        // {u > t} is a density-one point of the set
        above.sort_by(|x, y| x.0.cmp(&y.0));
        let mut merged: Vec<(Rational, Rational)> = Vec::new();
        for (lo, hi) in above {
            if let Some(last) = merged.last_mut() {
                if last.1 == lo {
                    last.1 = hi;
                    continue;
                }
            }
            merged.push((lo, hi));
        }
        let mut boundary = Vec::new();
        for (lo, hi) in &merged {
            if lo > dom_lo {
                boundary.push((lo.clone(), 1i8));
            }
            if hi < dom_hi {
                boundary.push((hi.clone(), -1i8));
            }
        }
        boundary.sort_by(|x, y| x.0.cmp(&y.0));
        Ok(LevelSet {
            set: BorelSet::new(merged, Vec::new())?,
            boundary,
        })
    }

    /// The indicator χ_{u > t} as a BV function on the same domain.
    pub fn level_indicator(&self, t: &Rational) -> Result<PiecewiseBV> {
        let ls = self.level_set(t)?;
        let (lo, hi) = self.domain();
        let mut bps = vec![lo.clone()];
        let mut pieces = Vec::new();
        let mut cursor = lo.clone();
        for (a, b) in ls.set.intervals() {
            if *a > cursor {
                bps.push(a.clone());
                pieces.push(Poly::zero());
            }
            bps.push(b.clone());
            pieces.push(Poly::one());
            cursor = b.clone();
        }
        if cursor < *hi {
            bps.push(hi.clone());
            pieces.push(Poly::zero());
        }
        Ok(PiecewiseBV::from_poly(Piecewise::new(bps, pieces)?))
    }

    /// ∫ u g dx against a piecewise polynomial g covering the domain.
    pub fn integrate_against(&self, g: &Piecewise) -> Result<Bounded> {
        let (lo, hi) = self.domain();
        if g.lo() > lo || g.hi() < hi {
            return Err(Error::Invalid(
                "weight domain must cover the function".into(),
            ));
        }
        let g_here = g.restrict_to(lo, hi)?;
        let mut total = Bounded::exact(
            self.poly
                .zip_with(&g_here, |p, q| p.mul(q))?
                .integral_full(),
        );
        for s in &self.stairs {
            total = total.add(&stair_against(s, &g_here)?);
        }
        Ok(total)
    }

    /// ∫ u dx.
    pub fn integral(&self) -> Bounded {
        let g = Piecewise::constant_on(self.poly.lo().clone(), self.poly.hi().clone(), int(1));
        self.integrate_against(&g).expect("constant weight covers")
    }

    /// ∫ |u| dx for staircase-free functions with rational sign changes.
    pub fn integral_abs(&self) -> Result<Rational> {
        if !self.stairs.is_empty() {
            return Err(Error::Unrepresentable("L1 norm of a staircase".into()));
        }
        let mut acc = Rational::zero();
        for (a, b, p) in self.poly.spans() {
            for (lo, hi, s) in sign_partition(p, a, b)? {
                if s != 0 {
                    acc += p.integral(&lo, &hi) * int(s as i64);
                }
            }
        }
        Ok(acc)
    }

    /// Canonical text form mirroring the measure serialization plus the
    /// jump table:
    /// `pieces: [(a,b,[c0,...]) ...]; jumps: [(x,l,r) ...]; stairs: [(a,b,m) ...]`.
    pub fn to_canonical_text(&self) -> String {
        let fmt_poly = |p: &Poly| -> String {
            let cs: Vec<String> = p.coeffs().iter().map(format_rational).collect();
            format!("[{}]", cs.join(","))
        };
        let piece_items: Vec<String> = self
            .poly
            .spans()
            .map(|(a, b, p)| {
                format!(
                    "({},{},{})",
                    format_rational(a),
                    format_rational(b),
                    fmt_poly(p)
                )
            })
            .collect();
        let jump_items: Vec<String> = self
            .jumps()
            .iter()
            .map(|j| {
                format!(
                    "({},{},{})",
                    format_rational(&j.x),
                    format_rational(&j.left),
                    format_rational(&j.right)
                )
            })
            .collect();
        let stair_items: Vec<String> = self
            .stairs
            .iter()
            .map(|s| {
                let full = s.window.0.is_zero() && s.window.1.is_one();
                if full {
                    format!(
                        "({},{},{})",
                        format_rational(&s.support.0),
                        format_rational(&s.support.1),
                        format_rational(&s.scale)
                    )
                } else {
                    format!(
                        "({},{},{},{},{})",
                        format_rational(&s.support.0),
                        format_rational(&s.support.1),
                        format_rational(&s.scale),
                        format_rational(&s.window.0),
                        format_rational(&s.window.1)
                    )
                }
            })
            .collect();
        format!(
            "pieces: [{}]; jumps: [{}]; stairs: [{}]",
            piece_items.join(", "),
            jump_items.join(", "),
            stair_items.join(", ")
        )
    }
}

/// Parses the canonical BV text form; the jump table is validated against
/// the one-sided limits of the parsed pieces.
pub fn parse_bv_text(text: &str) -> Result<PiecewiseBV> {
    let sections: Vec<&str> = text.split(';').collect();
    if sections.len() != 3 {
        return Err(Error::Parse(
            "expected `pieces: ...; jumps: ...; stairs: ...`".into(),
        ));
    }
    let take = |section: &str, label: &str| -> Result<String> {
        let t = section.trim();
        let rest = t
            .strip_prefix(label)
            .ok_or_else(|| Error::Parse(format!("expected `{label}` section")))?;
        let rest = rest.trim();
        if !rest.starts_with('[') || !rest.ends_with(']') {
            return Err(Error::Parse(format!("`{label}` section must be a list")));
        }
        Ok(rest[1..rest.len() - 1].to_string())
    };
    let pieces_body = take(sections[0], "pieces:")?;
    let jumps_body = take(sections[1], "jumps:")?;
    let stairs_body = take(sections[2], "stairs:")?;

    let mut bps: Vec<Rational> = Vec::new();
    let mut pieces = Vec::new();
    for item in crate::measure::split_top(&pieces_body)? {
        let fields = crate::measure::tuple_fields(&item)?;
        if fields.len() != 3 {
            return Err(Error::Parse(format!("piece `{item}` needs 3 fields")));
        }
        let a = crate::rational::parse_rational(&fields[0])?;
        let b = crate::rational::parse_rational(&fields[1])?;
        if let Some(last) = bps.last() {
            if *last != a {
                return Err(Error::Parse("pieces must tile the domain".into()));
            }
        } else {
            bps.push(a);
        }
        bps.push(b);
        pieces.push(crate::measure::parse_poly_list(&fields[2])?);
    }
    let poly = Piecewise::new(bps, pieces)?;
    let mut stairs = Vec::new();
    for item in crate::measure::split_top(&stairs_body)? {
        let fields = crate::measure::tuple_fields(&item)?;
        match fields.len() {
            3 => stairs.push(StairBlock::new(
                crate::rational::parse_rational(&fields[0])?,
                crate::rational::parse_rational(&fields[1])?,
                crate::rational::parse_rational(&fields[2])?,
            )),
            5 => stairs.push(StairBlock {
                support: (
                    crate::rational::parse_rational(&fields[0])?,
                    crate::rational::parse_rational(&fields[1])?,
                ),
                scale: crate::rational::parse_rational(&fields[2])?,
                window: (
                    crate::rational::parse_rational(&fields[3])?,
                    crate::rational::parse_rational(&fields[4])?,
                ),
            }),
            _ => return Err(Error::Parse(format!("stair `{item}` needs 3 or 5 fields"))),
        }
    }
    let bv = PiecewiseBV::new(poly, stairs)?;
    // validate the jump table against the reconstructed limits
    let mut declared = Vec::new();
    for item in crate::measure::split_top(&jumps_body)? {
        let fields = crate::measure::tuple_fields(&item)?;
        if fields.len() != 3 {
            return Err(Error::Parse(format!("jump `{item}` needs 3 fields")));
        }
        declared.push((
            crate::rational::parse_rational(&fields[0])?,
            crate::rational::parse_rational(&fields[1])?,
            crate::rational::parse_rational(&fields[2])?,
        ));
    }
    let actual: Vec<(Rational, Rational, Rational)> = bv
        .jumps()
        .into_iter()
        .map(|j| (j.x, j.left, j.right))
        .collect();
    if declared != actual {
        return Err(Error::Parse(
            "jump table disagrees with the piece limits".into(),
        ));
    }
    Ok(bv)
}

/// ∫ block·g over the domain of g: constant rise after the support, zero
/// before, integration by parts across it.
fn stair_against(s: &StairBlock, g: &Piecewise) -> Result<Bounded> {
    let (a, b) = (&s.support.0, &s.support.1);
    let mut total = Bounded::zero();
    // after the support: rise · ∫ g
    let rise = s.rise();
    if !rise.is_zero() && b < g.hi() {
        total = total.add(&Bounded::exact(rise.clone() * g.integral(b, g.hi())));
    }
    // across the support, by parts: ∫ B g = B(b)G(b) - B(a)G(a) - ∫ G dB
    // with G(x) = ∫_a^x g. B(a) = 0, B(b) = rise, so ∫ B g = rise·G(b) - ∫ G dB.
    let mut g_anti_bps = vec![a.clone()];
    let mut g_anti_pieces: Vec<Poly> = Vec::new();
    let mut acc_val = Rational::zero();
    for (lo, hi, q) in g.spans() {
        let l = lo.clone().max(a.clone());
        let h = hi.clone().min(b.clone());
        if l >= h {
            continue;
        }
        let anti = q.antiderivative();
        let piece = anti
            .sub(&Poly::constant(anti.eval(&l)))
            .add(&Poly::constant(acc_val.clone()));
        acc_val = piece.eval(&h);
        g_anti_bps.push(h.clone());
        g_anti_pieces.push(piece);
    }
    if g_anti_pieces.is_empty() {
        return Ok(total);
    }
    let big_g = Piecewise::new(g_anti_bps, g_anti_pieces)?;
    total = total.add(&Bounded::exact(rise * &acc_val));
    let db = s.derivative();
    for (lo, hi, q) in big_g.spans() {
        total = total.sub(&db.integrate_on(lo, hi, q));
    }
    Ok(total)
}

/// The constant value of a piecewise polynomial across [a, b], if any.
fn const_value_on(f: &Piecewise, a: &Rational, b: &Rational) -> Option<Rational> {
    let mut val: Option<Rational> = None;
    for (lo, hi, p) in f.spans() {
        if lo < b && a < hi {
            match (p.constant_value(), &val) {
                (Some(v), None) => val = Some(v),
                (Some(v), Some(prev)) if &v == prev => {}
                _ => return None,
            }
        }
    }
    val
}

/// A zero-extension helper: f on [cut, hi], zero on [lo, cut].
fn zero_before(f: &Piecewise, cut: &Rational) -> Piecewise {
    if cut <= f.lo() {
        return f.clone();
    }
    if cut >= f.hi() {
        return Piecewise::zero_on(f.lo().clone(), f.hi().clone());
    }
    let refined = f.with_breakpoints(std::slice::from_ref(cut));
    let mut bps = vec![refined.breakpoints()[0].clone()];
    let mut pieces = Vec::new();
    for (_a, b, p) in refined.spans() {
        bps.push(b.clone());
        if b <= cut {
            pieces.push(Poly::zero());
        } else {
            pieces.push(p.clone());
        }
    }
    Piecewise::new(bps, pieces).expect("same breakpoints")
}

/// A superlevel set with its oriented reduced boundary.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelSet {
    pub set: BorelSet,
    /// (point, interior normal): +1 when the set lies to the right.
    pub boundary: Vec<(Rational, i8)>,
}

impl LevelSet {
    /// H⁰ of the reduced boundary.
    pub fn perimeter(&self) -> usize {
        self.boundary.len()
    }
}
