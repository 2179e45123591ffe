//! Signed Radon measures on the line with exact structure: a
//! piecewise-polynomial density, finitely many atoms, and affine
//! staircase components. All fields are kept in canonical form so that
//! structural equality is measure equality on this class.

use num_traits::{Signed, Zero};

use crate::cantor::{self, CantorPart, PointClass};
use crate::error::{Error, Result};
use crate::poly::{Piecewise, Poly};
use crate::rational::{format_rational, int, parse_rational, rat, Bounded, Rational};
use crate::roots::sign_partition;
use crate::set::BorelSet;

/// One maximal span of the absolutely continuous part.
pub type AcSpan = (Rational, Rational, Poly);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Measure {
    ac: Vec<AcSpan>,
    atoms: Vec<(Rational, Rational)>,
    cantor: Vec<CantorPart>,
}

fn normalize_spans(mut spans: Vec<AcSpan>) -> Vec<AcSpan> {
    spans.retain(|(a, b, p)| a < b && !p.is_zero());
    spans.sort_by(|x, y| x.0.cmp(&y.0));
    let mut out: Vec<AcSpan> = Vec::with_capacity(spans.len());
    for (a, b, p) in spans {
        if let Some(last) = out.last_mut() {
            if last.1 == a && last.2 == p {
                last.1 = b;
                continue;
            }
        }
        out.push((a, b, p));
    }
    out
}

/// Pointwise combination of two span lists (densities agree a.e. with the
/// combined polynomial on every elementary interval).
fn combine_spans(a: &[AcSpan], b: &[AcSpan], subtract: bool) -> Vec<AcSpan> {
    let mut cuts: Vec<Rational> = Vec::new();
    for (lo, hi, _) in a.iter().chain(b.iter()) {
        cuts.push(lo.clone());
        cuts.push(hi.clone());
    }
    cuts.sort();
    cuts.dedup();
    let find = |spans: &[AcSpan], lo: &Rational| -> Poly {
        for (a0, b0, p) in spans {
            if a0 <= lo && lo < b0 {
                return p.clone();
            }
        }
        Poly::zero()
    };
    let mut out = Vec::new();
    for w in cuts.windows(2) {
        let pa = find(a, &w[0]);
        let pb = find(b, &w[0]);
        let p = if subtract { pa.sub(&pb) } else { pa.add(&pb) };
        if !p.is_zero() {
            out.push((w[0].clone(), w[1].clone(), p));
        }
    }
    normalize_spans(out)
}

impl Measure {
    pub fn new(ac: Vec<AcSpan>, atoms: Vec<(Rational, Rational)>, cantor: Vec<CantorPart>) -> Self {
        let ac = normalize_spans(ac);
        let mut atoms: Vec<(Rational, Rational)> =
            atoms.into_iter().filter(|(_, w)| !w.is_zero()).collect();
        atoms.sort_by(|x, y| x.0.cmp(&y.0));
        // merge duplicate locations
        let mut merged: Vec<(Rational, Rational)> = Vec::with_capacity(atoms.len());
        for (x, w) in atoms {
            if let Some(last) = merged.last_mut() {
                if last.0 == x {
                    last.1 += w;
                    continue;
                }
            }
            merged.push((x, w));
        }
        merged.retain(|(_, w)| !w.is_zero());
        let cantor = cantor::merge_parts(cantor);
        Measure {
            ac,
            atoms: merged,
            cantor,
        }
    }

    pub fn zero() -> Self {
        Measure {
            ac: Vec::new(),
            atoms: Vec::new(),
            cantor: Vec::new(),
        }
    }

    pub fn dirac(x: Rational, w: Rational) -> Self {
        Measure::new(Vec::new(), vec![(x, w)], Vec::new())
    }

    /// Lebesgue-density measure from a piecewise polynomial.
    pub fn from_density(f: &Piecewise) -> Self {
        let spans = f
            .spans()
            .map(|(a, b, p)| (a.clone(), b.clone(), p.clone()))
            .collect();
        Measure::new(spans, Vec::new(), Vec::new())
    }

    pub fn from_cantor(part: CantorPart) -> Self {
        Measure::new(Vec::new(), Vec::new(), vec![part])
    }

    pub fn ac_spans(&self) -> &[AcSpan] {
        &self.ac
    }

    pub fn atoms(&self) -> &[(Rational, Rational)] {
        &self.atoms
    }

    pub fn cantor_parts(&self) -> &[CantorPart] {
        &self.cantor
    }

    pub fn is_zero(&self) -> bool {
        self.ac.is_empty() && self.atoms.is_empty() && self.cantor.is_empty()
    }

    pub fn atom_weight(&self, x: &Rational) -> Rational {
        self.atoms
            .iter()
            .find(|(loc, _)| loc == x)
            .map(|(_, w)| w.clone())
            .unwrap_or_else(Rational::zero)
    }

    /// Smallest closed interval containing the support, if nonempty.
    pub fn hull(&self) -> Option<(Rational, Rational)> {
        let mut lo: Option<Rational> = None;
        let mut hi: Option<Rational> = None;
        let mut take = |a: &Rational, b: &Rational| {
            lo = Some(match lo.take() {
                Some(l) => l.min(a.clone()),
                None => a.clone(),
            });
            hi = Some(match hi.take() {
                Some(h) => h.max(b.clone()),
                None => b.clone(),
            });
        };
        for (a, b, _) in &self.ac {
            take(a, b);
        }
        for (x, _) in &self.atoms {
            let x2 = x.clone();
            take(&x2, &x2);
        }
        for part in &self.cantor {
            take(&part.support.0, &part.support.1);
        }
        Some((lo?, hi?))
    }

    pub fn add(&self, other: &Measure) -> Measure {
        let ac = combine_spans(&self.ac, &other.ac, false);
        let mut atoms = self.atoms.clone();
        atoms.extend(other.atoms.iter().cloned());
        let mut cantor = self.cantor.clone();
        cantor.extend(other.cantor.iter().cloned());
        Measure::new(ac, atoms, cantor)
    }

    pub fn sub(&self, other: &Measure) -> Measure {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Measure {
        self.scale(&int(-1))
    }

    pub fn scale(&self, c: &Rational) -> Measure {
        if c.is_zero() {
            return Measure::zero();
        }
        Measure {
            ac: self
                .ac
                .iter()
                .map(|(a, b, p)| (a.clone(), b.clone(), p.scale(c)))
                .collect(),
            atoms: self.atoms.iter().map(|(x, w)| (x.clone(), w * c)).collect(),
            cantor: self.cantor.iter().map(|p| p.scaled(c)).collect(),
        }
    }

    /// Total variation |μ|. Exact; errors if a density (or staircase
    /// weight) changes sign at an irrational point.
    pub fn total_variation(&self) -> Result<Measure> {
        let mut ac = Vec::new();
        for (a, b, p) in &self.ac {
            for (lo, hi, s) in sign_partition(p, a, b)? {
                match s {
                    1 => ac.push((lo, hi, p.clone())),
                    -1 => ac.push((lo, hi, p.neg())),
                    _ => {}
                }
            }
        }
        let atoms = self
            .atoms
            .iter()
            .map(|(x, w)| (x.clone(), w.abs()))
            .collect();
        let mut cantor = Vec::new();
        for part in &self.cantor {
            for (piece, s) in split_cantor_by_weight_sign(part)? {
                match s {
                    1 => cantor.push(piece),
                    -1 => cantor.push(piece.scaled(&int(-1))),
                    _ => {}
                }
            }
        }
        Ok(Measure::new(ac, atoms, cantor))
    }

    /// Jordan decomposition (μ⁺, μ⁻) with μ = μ⁺ - μ⁻ and |μ| = μ⁺ + μ⁻.
    pub fn jordan(&self) -> Result<(Measure, Measure)> {
        let tv = self.total_variation()?;
        let half = rat(1, 2);
        let pos = tv.add(self).scale(&half);
        let neg = tv.sub(self).scale(&half);
        Ok((pos, neg))
    }

    /// μ₁ ∧ μ₂ through the lattice identity μ₁ - (μ₁ - μ₂)⁺.
    pub fn lattice_min(&self, other: &Measure) -> Result<Measure> {
        let (pos, _) = self.sub(other).jordan()?;
        Ok(self.sub(&pos))
    }

    /// μ₁ ∨ μ₂ = μ₁ + (μ₂ - μ₁)⁺.
    pub fn lattice_max(&self, other: &Measure) -> Result<Measure> {
        let (pos, _) = other.sub(self).jordan()?;
        Ok(self.add(&pos))
    }

    /// The polar density ψ(x) ∈ {-1, +1} at a point of the support.
    pub fn polar_density(&self, x: &Rational) -> Result<Rational> {
        let w = self.atom_weight(x);
        if !w.is_zero() {
            return Ok(if w.is_positive() { int(1) } else { int(-1) });
        }
        // a.c. part: sign of the density at x, looking at both sides.
        let mut signs = Vec::new();
        for (a, b, p) in &self.ac {
            if a <= x && x <= b {
                let v = p.eval(x);
                if !v.is_zero() {
                    signs.push(v.is_positive());
                }
            }
        }
        if !signs.is_empty() {
            if signs.iter().all(|&s| s) {
                return Ok(int(1));
            }
            if signs.iter().all(|&s| !s) {
                return Ok(int(-1));
            }
            return Err(Error::NotInSupport(format!(
                "{} is not a point of constant polar sign",
                format_rational(x)
            )));
        }
        for part in &self.cantor {
            if x >= &part.support.0 && x <= &part.support.1 {
                let t = (x - &part.support.0) / part.width();
                if t >= part.window.0 && t <= part.window.1 {
                    if let (_, PointClass::InSet) = cantor::analyze(&t) {
                        let v = part.weight.eval(x);
                        if !v.is_zero() {
                            return Ok(if v.is_positive() { int(1) } else { int(-1) });
                        }
                    }
                }
            }
        }
        Err(Error::NotInSupport(format_rational(x)))
    }

    /// Restriction μ⌐E.
    pub fn restrict(&self, set: &BorelSet) -> Measure {
        let mut ac = Vec::new();
        for (a, b, p) in &self.ac {
            for (lo, hi) in set.intervals() {
                let l = a.clone().max(lo.clone());
                let h = b.clone().min(hi.clone());
                if l < h {
                    ac.push((l, h, p.clone()));
                }
            }
        }
        let atoms = self
            .atoms
            .iter()
            .filter(|(x, _)| set.contains(x))
            .cloned()
            .collect();
        let mut cantor = Vec::new();
        for part in &self.cantor {
            for (lo, hi) in set.intervals() {
                if let Some(piece) = part.restrict(lo, hi) {
                    cantor.push(piece);
                }
            }
        }
        Measure::new(ac, atoms, cantor)
    }

    pub fn restrict_interval(&self, a: &Rational, b: &Rational) -> Measure {
        self.restrict(&BorelSet::interval(a.clone(), b.clone()))
    }

    /// Restriction to the atoms located in the given point set.
    pub fn restrict_points(&self, points: &[Rational]) -> Measure {
        let atoms = self
            .atoms
            .iter()
            .filter(|(x, _)| points.contains(x))
            .cloned()
            .collect();
        Measure::new(Vec::new(), atoms, Vec::new())
    }

    /// μ(E); exact except on staircase windows that never align, where a
    /// certified bound is carried.
    pub fn eval(&self, set: &BorelSet) -> Bounded {
        let mut total = Bounded::zero();
        for (lo, hi) in set.intervals() {
            for (a, b, p) in &self.ac {
                let l = a.clone().max(lo.clone());
                let h = b.clone().min(hi.clone());
                if l < h {
                    total = total.add(&Bounded::exact(p.integral(&l, &h)));
                }
            }
            for part in &self.cantor {
                total = total.add(&part.eval_interval(lo, hi));
            }
        }
        for (x, w) in &self.atoms {
            if set.contains(x) {
                total = total.add(&Bounded::exact(w.clone()));
            }
        }
        total
    }

    pub fn eval_interval(&self, a: &Rational, b: &Rational) -> Bounded {
        self.eval(&BorelSet::interval(a.clone(), b.clone()))
    }

    /// μ of the whole line (the measure is compactly supported).
    pub fn mass(&self) -> Bounded {
        match self.hull() {
            None => Bounded::zero(),
            Some((lo, hi)) => self.eval(
                &BorelSet::new(vec![(lo.clone() - int(1), hi + int(1))], Vec::new())
                    .expect("hull interval"),
            ),
        }
    }

    /// ⟨μ, φ⟩ against a piecewise-polynomial test function whose domain
    /// covers the support. φ must be unambiguous at the atoms (the diffuse
    /// parts never see a countable set of discontinuities).
    pub fn act(&self, phi: &Piecewise) -> Result<Bounded> {
        if let Some((lo, hi)) = self.hull() {
            if &lo < phi.lo() || &hi > phi.hi() {
                return Err(Error::Invalid(
                    "test function domain does not cover the support".into(),
                ));
            }
        }
        let mut total = Bounded::zero();
        for (a, b, p) in &self.ac {
            for (lo, hi, q) in phi.spans() {
                let l = a.clone().max(lo.clone());
                let h = b.clone().min(hi.clone());
                if l < h {
                    total = total.add(&Bounded::exact(p.mul(q).integral(&l, &h)));
                }
            }
        }
        for (x, w) in &self.atoms {
            let v = if x == phi.lo() {
                phi.right_limit(x)
            } else if x == phi.hi() {
                phi.left_limit(x)
            } else {
                let l = phi.left_limit(x);
                let r = phi.right_limit(x);
                if l != r {
                    return Err(Error::Invalid(format!(
                        "test function is ambiguous at the atom {}",
                        format_rational(x)
                    )));
                }
                l
            };
            total = total.add(&Bounded::exact(w * v));
        }
        for part in &self.cantor {
            for (lo, hi, q) in phi.spans() {
                total = total.add(&part.integrate_on(lo, hi, q));
            }
        }
        Ok(total)
    }

    /// The three mutually singular parts (a.c., jump, Cantor).
    pub fn lebesgue_decompose(&self) -> (Measure, Measure, Measure) {
        (
            Measure {
                ac: self.ac.clone(),
                atoms: Vec::new(),
                cantor: Vec::new(),
            },
            Measure {
                ac: Vec::new(),
                atoms: self.atoms.clone(),
                cantor: Vec::new(),
            },
            Measure {
                ac: Vec::new(),
                atoms: Vec::new(),
                cantor: self.cantor.clone(),
            },
        )
    }

    /// The diffuse part (everything but the atoms).
    pub fn diffuse_part(&self) -> Measure {
        Measure {
            ac: self.ac.clone(),
            atoms: Vec::new(),
            cantor: self.cantor.clone(),
        }
    }

    /// Canonical text form; see `parse_measure` for the grammar.
    pub fn to_canonical_text(&self) -> String {
        let fmt_poly = |p: &Poly| -> String {
            let cs: Vec<String> = p.coeffs().iter().map(format_rational).collect();
            format!("[{}]", cs.join(","))
        };
        let ac_items: Vec<String> = self
            .ac
            .iter()
            .map(|(a, b, p)| {
                format!(
                    "({},{},{})",
                    format_rational(a),
                    format_rational(b),
                    fmt_poly(p)
                )
            })
            .collect();
        let atom_items: Vec<String> = self
            .atoms
            .iter()
            .map(|(x, w)| format!("({},{})", format_rational(x), format_rational(w)))
            .collect();
        let cantor_items: Vec<String> = self
            .cantor
            .iter()
            .map(|part| {
                let full_window =
                    part.window.0.is_zero() && part.window.1 == Rational::from_integer(1.into());
                match (full_window, part.weight.constant_value()) {
                    (true, Some(m)) => format!(
                        "({},{},{})",
                        format_rational(&part.support.0),
                        format_rational(&part.support.1),
                        format_rational(&m)
                    ),
                    _ => format!(
                        "({},{},{},{},{})",
                        format_rational(&part.support.0),
                        format_rational(&part.support.1),
                        fmt_poly(&part.weight),
                        format_rational(&part.window.0),
                        format_rational(&part.window.1)
                    ),
                }
            })
            .collect();
        format!(
            "ac: [{}]; atoms: [{}]; cantor: [{}]",
            ac_items.join(", "),
            atom_items.join(", "),
            cantor_items.join(", ")
        )
    }
}

/// Splits a staircase part at the roots of its weight so each returned
/// piece has a constant weight sign (second component).
fn split_cantor_by_weight_sign(part: &CantorPart) -> Result<Vec<(CantorPart, i8)>> {
    let hull_lo = &part.support.0 + &part.window.0 * part.width();
    let hull_hi = &part.support.0 + &part.window.1 * part.width();
    let parts = sign_partition(&part.weight, &hull_lo, &hull_hi)?;
    let mut out = Vec::new();
    for (lo, hi, s) in parts {
        if s == 0 {
            continue;
        }
        if let Some(piece) = part.restrict(&lo, &hi) {
            out.push((piece, s));
        }
    }
    Ok(out)
}

/// Parses the canonical text form:
/// `ac: [(a,b,[c0,c1,...]) ...]; atoms: [(x,w) ...]; cantor: [(a,b,m) ...]`
/// with rationals as `p/q`. Staircase entries may carry the extended form
/// `(a,b,[w0c,...],w0,w1)` for windowed or polynomial-weighted parts.
pub fn parse_measure(text: &str) -> Result<Measure> {
    let sections: Vec<&str> = text.split(';').collect();
    if sections.len() != 3 {
        return Err(Error::Parse(
            "expected `ac: ...; atoms: ...; cantor: ...`".into(),
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
    let ac_body = take(sections[0], "ac:")?;
    let atoms_body = take(sections[1], "atoms:")?;
    let cantor_body = take(sections[2], "cantor:")?;

    let mut ac = Vec::new();
    for item in split_top(&ac_body)? {
        let fields = tuple_fields(&item)?;
        if fields.len() != 3 {
            return Err(Error::Parse(format!("ac entry `{item}` needs 3 fields")));
        }
        ac.push((
            parse_rational(&fields[0])?,
            parse_rational(&fields[1])?,
            parse_poly_list(&fields[2])?,
        ));
    }
    let mut atoms = Vec::new();
    for item in split_top(&atoms_body)? {
        let fields = tuple_fields(&item)?;
        if fields.len() != 2 {
            return Err(Error::Parse(format!("atom entry `{item}` needs 2 fields")));
        }
        atoms.push((parse_rational(&fields[0])?, parse_rational(&fields[1])?));
    }
    let mut cantor = Vec::new();
    for item in split_top(&cantor_body)? {
        let fields = tuple_fields(&item)?;
        match fields.len() {
            3 => cantor.push(CantorPart::with_mass(
                parse_rational(&fields[0])?,
                parse_rational(&fields[1])?,
                parse_rational(&fields[2])?,
            )),
            5 => cantor.push(CantorPart {
                support: (parse_rational(&fields[0])?, parse_rational(&fields[1])?),
                weight: parse_poly_list(&fields[2])?,
                window: (parse_rational(&fields[3])?, parse_rational(&fields[4])?),
            }),
            _ => {
                return Err(Error::Parse(format!(
                    "cantor entry `{item}` needs 3 or 5 fields"
                )))
            }
        }
    }
    Ok(Measure::new(ac, atoms, cantor))
}

/// Splits a list body into parenthesized items at top level.
pub(crate) fn split_top(body: &str) -> Result<Vec<String>> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut cur = String::new();
    for ch in body.chars() {
        match ch {
            '(' | '[' => {
                depth += 1;
                cur.push(ch);
            }
            ')' | ']' => {
                depth -= 1;
                cur.push(ch);
            }
            ',' if depth == 0 => {
                if !cur.trim().is_empty() {
                    out.push(cur.trim().to_string());
                }
                cur.clear();
            }
            _ => cur.push(ch),
        }
    }
    if depth != 0 {
        return Err(Error::Parse("unbalanced brackets".into()));
    }
    if !cur.trim().is_empty() {
        out.push(cur.trim().to_string());
    }
    Ok(out)
}

/// Fields of a `( ... , ... )` tuple, split at the tuple's own level.
pub(crate) fn tuple_fields(item: &str) -> Result<Vec<String>> {
    let t = item.trim();
    if !t.starts_with('(') || !t.ends_with(')') {
        return Err(Error::Parse(format!("expected a tuple, got `{t}`")));
    }
    split_top(&t[1..t.len() - 1])
}

pub(crate) fn parse_poly_list(s: &str) -> Result<Poly> {
    let t = s.trim();
    if !t.starts_with('[') || !t.ends_with(']') {
        return Err(Error::Parse(format!(
            "expected coefficient list, got `{t}`"
        )));
    }
    let mut coeffs = Vec::new();
    for item in split_top(&t[1..t.len() - 1])? {
        coeffs.push(parse_rational(&item)?);
    }
    Ok(Poly::new(coeffs))
}
