//! Tagged real scalars and the `(tau, theta)` scaling decomposition.
//!
//! A scaling parameter `s = tau + 2 + 2 i theta pi / ln q` is carried as its
//! two real coordinates. Each coordinate is either an exact reduced rational
//! or an irrational machine real with a textual label, and every
//! rationality decision downstream is made from the tag, never by comparing
//! floats.

use std::f64::consts::{E, PI, SQRT_2};
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use num_rational::Rational64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::diophantine::{frac_of_product, FracPart};
use crate::error::{Error, Result};
use crate::qcore::QParam;

/// Symbolic irrational constants accepted by the parser.
pub const TOKENS: [(&str, f64); 6] = [
    ("sqrt2", SQRT_2),
    ("sqrt3", 1.732_050_807_568_877_2),
    ("sqrt5", 2.236_067_977_499_79),
    ("phi", 1.618_033_988_749_895),
    ("pi", PI),
    ("e", E),
];

#[derive(Debug, Clone, PartialEq)]
pub enum Scalar {
    /// Reduced `numer/denom` with `denom >= 1`.
    Rational(Rational64),
    Irrational { value: f64, label: String },
}

impl Scalar {
    pub fn rational(numer: i64, denom: i64) -> Result<Self> {
        if denom == 0 {
            return Err(Error::InvalidArgument("zero denominator".into()));
        }
        Ok(Self::Rational(Rational64::new(numer, denom)))
    }

    pub fn integer(n: i64) -> Self {
        Self::Rational(Rational64::from_integer(n))
    }

    pub fn irrational(value: f64, label: impl Into<String>) -> Self {
        Self::Irrational {
            value,
            label: label.into(),
        }
    }

    pub fn value(&self) -> f64 {
        match self {
            Self::Rational(r) => *r.numer() as f64 / *r.denom() as f64,
            Self::Irrational { value, .. } => *value,
        }
    }

    pub fn as_rational(&self) -> Option<Rational64> {
        match self {
            Self::Rational(r) => Some(*r),
            Self::Irrational { .. } => None,
        }
    }

    pub fn is_rational(&self) -> bool {
        matches!(self, Self::Rational(_))
    }

    /// Exact zero is only ever recognised through the rational tag.
    pub fn is_exact_zero(&self) -> bool {
        matches!(self, Self::Rational(r) if *r.numer() == 0)
    }

    pub fn neg(&self) -> Self {
        match self {
            Self::Rational(r) => Self::Rational(-r),
            Self::Irrational { value, label } => Self::Irrational {
                value: -value,
                label: format!("-({label})"),
            },
        }
    }

    pub fn add_integer(&self, k: i64) -> Self {
        match self {
            Self::Rational(r) => Self::Rational(r + k),
            Self::Irrational { value, label } => Self::Irrational {
                value: value + k as f64,
                label: format!("{label}{k:+}"),
            },
        }
    }

    /// `[n x]` and `{n x}`, exactly for rationals and with a compensated
    /// product for irrationals.
    pub fn frac_of_multiple(&self, n: i64) -> FracPart {
        match self {
            Self::Rational(r) => {
                let num = n as i128 * *r.numer() as i128;
                let den = *r.denom() as i128;
                let rem = num.rem_euclid(den);
                FracPart {
                    floor: num.div_euclid(den) as i64,
                    frac: rem as f64 / den as f64,
                    exact: Some((rem, den)),
                }
            }
            Self::Irrational { value, .. } => {
                let mut part = frac_of_product(n, *value);
                // keep roundoff from manufacturing a spurious fractional part
                if part.frac < 1e-12 {
                    part.frac = 0.0;
                } else if 1.0 - part.frac < 1e-12 {
                    part.frac = 0.0;
                    part.floor += 1;
                }
                part
            }
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Rational(r) if *r.denom() == 1 => write!(f, "{}", r.numer()),
            Self::Rational(r) => write!(f, "{}/{}", r.numer(), r.denom()),
            Self::Irrational { label, .. } => f.write_str(label),
        }
    }
}

fn parse_decimal(s: &str) -> Option<Rational64> {
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (int, frac) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int.is_empty() && frac.is_empty() {
        return None;
    }
    if !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits: i64 = format!("{int}{frac}").parse().ok()?;
    let scale = exp - frac.len() as i32;
    let pow = 10i64.checked_pow(scale.unsigned_abs())?;
    if scale >= 0 {
        Some(Rational64::from_integer(digits.checked_mul(pow)?))
    } else {
        Some(Rational64::new(digits, pow))
    }
}

fn parse_term(term: &str) -> Option<std::result::Result<Rational64, f64>> {
    if let Some((_, v)) = TOKENS.iter().find(|(name, _)| *name == term) {
        return Some(Err(*v));
    }
    if let Some((p, r)) = term.split_once('/') {
        let p: i64 = p.parse().ok()?;
        let r: i64 = r.parse().ok()?;
        if r == 0 {
            return None;
        }
        return Some(Ok(Rational64::new(p, r)));
    }
    parse_decimal(term).map(Ok)
}

impl FromStr for Scalar {
    type Err = Error;

    /// Accepts sums of integers, `p/r` fractions, finite decimals and the
    /// tokens in [`TOKENS`], e.g. `-1/2`, `0.3`, `sqrt2-1`, `1-sqrt3`.
    /// A leading `~` tags a raw decimal as irrational.
    fn from_str(input: &str) -> Result<Self> {
        let s: String = input.chars().filter(|c| !c.is_whitespace()).collect();
        let bad = || Error::InvalidArgument(format!("cannot parse scalar `{input}`"));
        if let Some(raw) = s.strip_prefix('~') {
            let value: f64 = raw.parse().map_err(|_| bad())?;
            return Ok(Self::irrational(value, s.clone()));
        }
        let bytes = s.as_bytes();
        let mut terms = Vec::new();
        let mut start = 0;
        for i in 1..bytes.len() {
            let c = bytes[i];
            if c == b'+' || c == b'-' {
                let prev = bytes[i - 1];
                let exponent = (prev == b'e' || prev == b'E')
                    && i >= 2
                    && (bytes[i - 2].is_ascii_digit() || bytes[i - 2] == b'.');
                if !exponent {
                    terms.push(&s[start..i]);
                    start = i;
                }
            }
        }
        terms.push(&s[start..]);
        let mut rational = Rational64::from_integer(0);
        let mut irrational = 0.0;
        let mut symbolic = false;
        for t in terms {
            let (sign, body) = match t.as_bytes().first() {
                Some(b'-') => (-1, &t[1..]),
                Some(b'+') => (1, &t[1..]),
                _ => (1, t),
            };
            match parse_term(body).ok_or_else(bad)? {
                Ok(r) => rational += r * sign,
                Err(v) => {
                    symbolic = true;
                    irrational += sign as f64 * v;
                }
            }
        }
        if symbolic {
            let value = *rational.numer() as f64 / *rational.denom() as f64 + irrational;
            Ok(Self::irrational(value, s))
        } else {
            Ok(Self::Rational(rational))
        }
    }
}

impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Text(String),
            Number(f64),
        }
        let text = match Raw::deserialize(deserializer)? {
            Raw::Text(s) => s,
            Raw::Number(x) => format!("{x}"),
        };
        text.parse().map_err(serde::de::Error::custom)
    }
}

/// `s = tau + 2 + 2 i theta pi / ln q`, kept as its real coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scaling {
    pub tau: Scalar,
    pub theta: Scalar,
}

impl Scaling {
    pub fn new(tau: Scalar, theta: Scalar) -> Self {
        Self { tau, theta }
    }

    /// The complex scaling parameter for a given base.
    pub fn s(&self, q: QParam) -> Complex64 {
        Complex64::new(
            self.tau.value() + 2.0,
            2.0 * self.theta.value() * PI / q.get().ln(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_rationals_and_decimals() {
        assert_eq!("1/3".parse::<Scalar>().unwrap(), Scalar::rational(1, 3).unwrap());
        assert_eq!("-2/4".parse::<Scalar>().unwrap(), Scalar::rational(-1, 2).unwrap());
        assert_eq!("0.3".parse::<Scalar>().unwrap(), Scalar::rational(3, 10).unwrap());
        assert_eq!("2.5e-1".parse::<Scalar>().unwrap(), Scalar::rational(1, 4).unwrap());
        assert_eq!("1+1/2".parse::<Scalar>().unwrap(), Scalar::rational(3, 2).unwrap());
        assert!("1/0".parse::<Scalar>().is_err());
        assert!("abc".parse::<Scalar>().is_err());
    }

    #[test]
    fn parses_tokens() {
        let s: Scalar = "sqrt2-1".parse().unwrap();
        assert!(!s.is_rational());
        assert_eq!(s.value(), SQRT_2 - 1.0);
        assert_eq!(s.to_string(), "sqrt2-1");
        let t: Scalar = "1-sqrt3".parse().unwrap();
        assert!((t.value() + 0.732_050_807_568_877_2).abs() < 1e-16);
        let e: Scalar = "e-2".parse().unwrap();
        assert!((e.value() - (E - 2.0)).abs() < 1e-16);
        let raw: Scalar = "~0.123".parse().unwrap();
        assert!(!raw.is_rational());
    }

    #[test]
    fn exact_fractional_parts() {
        let third = Scalar::rational(1, 3).unwrap();
        let p = third.frac_of_multiple(7);
        assert_eq!((p.floor, p.exact), (2, Some((1, 3))));
        let neg = Scalar::rational(-1, 2).unwrap();
        let p = neg.frac_of_multiple(3);
        assert_eq!((p.floor, p.frac), (-2, 0.5));
        assert!(Scalar::integer(0).is_exact_zero());
        assert!(!Scalar::irrational(0.0, "zero?").is_exact_zero());
    }
}
