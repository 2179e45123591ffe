//! Exact rational scalars and the interval-valued results used where a
//! computation is allowed to carry a certified error bound.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

/// Shorthand for a rational from an integer pair.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Shorthand for an integral rational.
pub fn int(n: i64) -> Rational {
    Rational::from(BigInt::from(n))
}

/// Parses the canonical text form: an optional sign, digits, and an
/// optional `/denominator`. Floats are deliberately rejected.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let t = s.trim();
    if t.is_empty() {
        return Err(Error::Parse("empty rational".into()));
    }
    if t.contains(['.', 'e', 'E']) {
        return Err(Error::Parse(format!(
            "`{t}` looks like a float; exact fields take `p/q` rationals"
        )));
    }
    let (num_s, den_s) = match t.split_once('/') {
        Some((a, b)) => (a.trim(), b.trim()),
        None => (t, "1"),
    };
    let num: BigInt = num_s
        .parse()
        .map_err(|_| Error::Parse(format!("bad numerator in `{t}`")))?;
    let den: BigInt = den_s
        .parse()
        .map_err(|_| Error::Parse(format!("bad denominator in `{t}`")))?;
    if den.is_zero() {
        return Err(Error::Parse(format!("zero denominator in `{t}`")));
    }
    Ok(Rational::new(num, den))
}

/// Canonical text form `p/q` (or just `p` when the denominator is one).
pub fn format_rational(x: &Rational) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Nearest f64, for reports only.
pub fn to_f64(x: &Rational) -> f64 {
    x.to_f64().unwrap_or_else(|| {
        // Fall back through a scaled division for extreme magnitudes.
        let scaled = x.numer().to_f64().unwrap_or(f64::INFINITY);
        scaled / x.denom().to_f64().unwrap_or(1.0)
    })
}

/// A rational value together with a certified absolute error bound.
///
/// Exact computations carry `err == 0`; quadrature on unresolved Cantor
/// windows and extrapolated limits carry the bound they can prove.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bounded {
    pub value: Rational,
    pub err: Rational,
}

impl Bounded {
    pub fn exact(value: Rational) -> Self {
        Bounded {
            value,
            err: Rational::zero(),
        }
    }

    pub fn zero() -> Self {
        Bounded::exact(Rational::zero())
    }

    pub fn with_err(value: Rational, err: Rational) -> Self {
        debug_assert!(!err.is_negative());
        Bounded { value, err }
    }

    pub fn is_exact(&self) -> bool {
        self.err.is_zero()
    }

    pub fn add(&self, other: &Bounded) -> Bounded {
        Bounded {
            value: &self.value + &other.value,
            err: &self.err + &other.err,
        }
    }

    pub fn sub(&self, other: &Bounded) -> Bounded {
        Bounded {
            value: &self.value - &other.value,
            err: &self.err + &other.err,
        }
    }

    pub fn scale(&self, c: &Rational) -> Bounded {
        Bounded {
            value: &self.value * c,
            err: &self.err * c.abs(),
        }
    }

    /// |value| overestimate.
    pub fn abs_upper(&self) -> Rational {
        self.value.abs() + &self.err
    }

    /// True when the value is certainly within `tol` of `target`.
    pub fn within(&self, target: &Rational, tol: &Rational) -> bool {
        (&self.value - target).abs() + &self.err <= *tol
    }
}

impl std::iter::Sum for Bounded {
    fn sum<I: Iterator<Item = Bounded>>(iter: I) -> Self {
        iter.fold(Bounded::zero(), |acc, x| acc.add(&x))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format_round_trip() {
        for s in ["3/4", "-7/2", "5", "0", "-12"] {
            let r = parse_rational(s).unwrap();
            assert_eq!(format_rational(&r), s);
        }
        assert_eq!(parse_rational("6/8").unwrap(), rat(3, 4));
    }

    #[test]
    fn floats_rejected() {
        assert!(parse_rational("0.5").is_err());
        assert!(parse_rational("1e-3").is_err());
        assert!(parse_rational("1/0").is_err());
    }

    #[test]
    fn bounded_arithmetic_tracks_error() {
        let a = Bounded::with_err(rat(1, 2), rat(1, 100));
        let b = Bounded::exact(rat(1, 3));
        let c = a.add(&b);
        assert_eq!(c.value, rat(5, 6));
        assert_eq!(c.err, rat(1, 100));
        assert!(c.within(&rat(5, 6), &rat(1, 50)));
    }
}
