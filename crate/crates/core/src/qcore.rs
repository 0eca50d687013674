//! q-Pochhammer arithmetic with certified truncation.
//!
//! Infinite products `(a; q)_inf` are truncated at the first index where the
//! remainder certificate `(-|a|q^2; q)_inf |a| q^N / (1 - q)` (scaled by the
//! partial product) falls below the requested tolerance. The remainder
//! functions `R1(a; n) = (aq^n; q)_inf - 1` and `R2(a; n) = 1/(aq^n; q)_inf - 1`
//! are evaluated in log space so that tiny remainders keep full relative
//! precision.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Hard cap on the number of factors any truncated product may use.
pub const MAX_FACTORS: usize = 1_000_000;

/// Sub-tolerance used when bounding the constant `(-b; q)_inf` that appears
/// inside the remainder certificate.
const CONSTANT_SUB_TOL: f64 = 1e-14;

/// The base `q`, validated to lie strictly inside `(0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct QParam(f64);

impl QParam {
    pub fn new(q: f64) -> Result<Self> {
        if q > 0.0 && q < 1.0 {
            Ok(Self(q))
        } else {
            Err(Error::InvalidQ(q))
        }
    }

    #[inline]
    pub fn get(self) -> f64 {
        self.0
    }

    /// `q^2`, the base of the triple-product factors.
    pub fn squared(self) -> Self {
        Self(self.0 * self.0)
    }

    /// `sqrt(q)`, the nome of the majorant theta function in the bounds.
    pub fn sqrt(self) -> Self {
        Self(self.0.sqrt())
    }
}

impl TryFrom<f64> for QParam {
    type Error = Error;

    fn try_from(q: f64) -> Result<Self> {
        Self::new(q)
    }
}

impl From<QParam> for f64 {
    fn from(q: QParam) -> f64 {
        q.0
    }
}

/// A computed value with a rigorous bound on its truncation error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CertifiedValue {
    pub value: Complex64,
    /// Bound on `|true - value|` from truncation (rounding is not included).
    pub tail_bound: f64,
}

impl CertifiedValue {
    pub fn exact(value: Complex64) -> Self {
        Self {
            value,
            tail_bound: 0.0,
        }
    }

    pub fn re(&self) -> f64 {
        self.value.re
    }

    /// Upper bound on `|true value|`.
    pub fn abs_upper(&self) -> f64 {
        self.value.norm() + self.tail_bound
    }
}

pub(crate) fn check_tol(tol: f64) -> Result<()> {
    if tol > 0.0 && tol.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "tolerance must be positive and finite, got {tol}"
        )))
    }
}

/// `1 - q^j` without cancellation for `q` close to one.
#[inline]
pub(crate) fn one_minus_pow(q: f64, j: u64) -> f64 {
    -(j as f64 * q.ln()).exp_m1()
}

/// `(a; q)_n = prod_{k<n} (1 - a q^k)`; exactly one for `n = 0`.
pub fn qpoch_finite(a: Complex64, q: QParam, n: usize) -> Complex64 {
    let one = Complex64::new(1.0, 0.0);
    let mut prod = one;
    let mut qk = 1.0;
    for _ in 0..n {
        prod *= one - a * qk;
        qk *= q.get();
    }
    prod
}

/// Upper bound on `(-b; q)_inf` for `b >= 0`.
///
/// The tail beyond the last explicit factor is majorized by
/// `exp(sum b q^k) = exp(b q^K / (1 - q))`, and the result is inflated by a
/// few ulps per factor to absorb rounding.
pub fn neg_poch_upper(b: f64, q: QParam) -> f64 {
    debug_assert!(b >= 0.0);
    let q = q.get();
    let mut prod = 1.0;
    let mut t = b;
    let mut k = 0usize;
    loop {
        let tail = t / (1.0 - q);
        if tail <= CONSTANT_SUB_TOL || k >= MAX_FACTORS {
            return prod * tail.exp() * (1.0 + 4.0 * f64::EPSILON * (k as f64 + 2.0));
        }
        prod *= 1.0 + t;
        t *= q;
        k += 1;
    }
}

/// Lower bound on `(q; q)_inf`, using `prod (1 - x_j) >= 1 - sum x_j` for
/// the tail.
pub fn qq_inf_lower(q: QParam) -> f64 {
    let qv = q.get();
    let mut prod = 1.0;
    let mut qk = qv;
    let mut k = 1usize;
    loop {
        let tail = qk / (1.0 - qv);
        if tail <= 1e-17 || k >= MAX_FACTORS {
            return prod * (1.0 - tail) * (1.0 - 4.0 * f64::EPSILON * (k as f64 + 2.0));
        }
        prod *= 1.0 - qk;
        qk *= qv;
        k += 1;
    }
}

/// `ln (x; q)_inf = sum_{k>=0} ln(1 - x q^k)` for `0 <= x < 1`, to full
/// relative precision.
pub fn ln_poch_real(x: f64, q: QParam) -> f64 {
    debug_assert!((0.0..1.0).contains(&x));
    let qv = q.get();
    let mut sum = 0.0;
    let mut t = x;
    for _ in 0..MAX_FACTORS {
        if t == 0.0 {
            break;
        }
        sum += (-t).ln_1p();
        t *= qv;
        // remaining terms: sum_{i} |ln(1 - t q^i)| <= t / ((1 - q)(1 - t))
        let rest = t / ((1.0 - qv) * (1.0 - t));
        if rest <= 1e-18 * sum.abs() || rest < 1e-300 {
            break;
        }
    }
    sum
}

/// `ln((q; q)_inf / (q; q)_j) = ln (q^{j+1}; q)_inf`.
pub fn ln_qq_tail(j: u64, q: QParam) -> f64 {
    let start = q.get().powf(j as f64 + 1.0);
    ln_poch_real(start, q)
}

/// `(q; q)_inf` to full double precision.
pub fn qq_inf(q: QParam) -> f64 {
    ln_qq_tail(0, q).exp()
}

/// `(a; q)_inf` with the truncation point chosen by the remainder
/// certificate.
pub fn qpoch_infinite(a: Complex64, q: QParam, tol: f64) -> Result<CertifiedValue> {
    check_tol(tol)?;
    let qv = q.get();
    let abs_a = a.norm();
    if !abs_a.is_finite() {
        return Err(Error::InvalidArgument(format!("non-finite argument {a}")));
    }
    let constant = neg_poch_upper(abs_a * qv * qv, q);
    let one = Complex64::new(1.0, 0.0);
    // at least one explicit factor, so the certificate constant applies
    let mut prod = one - a;
    let mut qn = qv;
    for _ in 1..=MAX_FACTORS {
        if prod == Complex64::new(0.0, 0.0) {
            return Ok(CertifiedValue::exact(prod));
        }
        let bound = prod.norm() * constant * abs_a * qn / (1.0 - qv);
        if !bound.is_finite() || !prod.is_finite() {
            break;
        }
        if bound <= tol {
            return Ok(CertifiedValue {
                value: prod,
                tail_bound: bound,
            });
        }
        prod *= one - a * qn;
        qn *= qv;
    }
    Err(Error::NonConvergent(MAX_FACTORS))
}

/// Gaussian binomial coefficient `[n, k]_q`.
pub fn qbinom(n: u64, k: i64, q: QParam) -> Result<f64> {
    if k < 0 || k as u64 > n {
        return Err(Error::OutOfRange(format!("k = {k} not in 0..={n}")));
    }
    let k = (k as u64).min(n - k as u64);
    let qv = q.get();
    let mut value = 1.0;
    for j in 1..=k {
        value *= one_minus_pow(qv, n - k + j) / one_minus_pow(qv, j);
    }
    Ok(value)
}

/// Actual remainders of `(aq^n; q)_inf` together with their bounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Remainders {
    /// `(aq^n; q)_inf - 1`
    pub r1: f64,
    pub r1_bound: f64,
    /// `1/(aq^n; q)_inf - 1`
    pub r2: f64,
    pub r2_bound: f64,
}

/// `R1(a; n)` and its bound `(-aq^2; q)_inf a q^n / (1 - q)`, for any `a >= 0`.
pub fn remainder_r1(a: f64, q: QParam, n: u64) -> Result<(f64, f64)> {
    if !(a >= 0.0 && a.is_finite()) {
        return Err(Error::InvalidArgument(format!("a must be >= 0, got {a}")));
    }
    let qv = q.get();
    let x = a * qv.powf(n as f64);
    let r1 = if x < 1.0 {
        ln_poch_real(x, q).exp_m1()
    } else {
        qpoch_infinite(Complex64::new(x, 0.0), q, 1e-16)?.value.re - 1.0
    };
    let bound = neg_poch_upper(a * qv * qv, q) * x / (1.0 - qv);
    Ok((r1, bound))
}

/// Both remainders of the tail product `(aq^n; q)_inf`.
///
/// Requires `0 <= aq < 1` (and `aq^n < 1` so the tail product is positive).
/// For `n >= 1` the `R2` bound is `a q^n / ((1 - q)(aq; q)_inf)`; at `n = 0`
/// the factor `(aq; q)_inf` no longer dominates `(a; q)_inf`, so the
/// denominator is `(a; q)_inf` itself.
pub fn tail_remainders(a: f64, q: QParam, n: u64) -> Result<Remainders> {
    if !(a >= 0.0 && a.is_finite()) {
        return Err(Error::InvalidArgument(format!("a must be >= 0, got {a}")));
    }
    let qv = q.get();
    if a * qv >= 1.0 {
        return Err(Error::HypothesisViolated(format!("aq = {} >= 1", a * qv)));
    }
    let x = a * qv.powf(n as f64);
    if x >= 1.0 {
        return Err(Error::HypothesisViolated(format!("aq^n = {x} >= 1")));
    }
    let ln_tail = ln_poch_real(x, q);
    let r1 = ln_tail.exp_m1();
    let r2 = (-ln_tail).exp_m1();
    let r1_bound = neg_poch_upper(a * qv * qv, q) * x / (1.0 - qv);
    let denom_arg = if n == 0 { a } else { a * qv };
    let denom = ln_poch_real(denom_arg, q).exp() * (1.0 - 1e-14);
    let r2_bound = x / ((1.0 - qv) * denom);
    Ok(Remainders {
        r1,
        r1_bound,
        r2,
        r2_bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(v: f64) -> QParam {
        QParam::new(v).unwrap()
    }

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    /// Plain partial product with a fixed, generous number of factors.
    fn product_oracle(a: f64, q: f64, terms: usize) -> f64 {
        (0..terms).map(|k| 1.0 - a * q.powi(k as i32)).product()
    }

    #[test]
    fn qparam_rejects_endpoints() {
        assert!(QParam::new(0.0).is_err());
        assert!(QParam::new(1.0).is_err());
        assert!(QParam::new(f64::NAN).is_err());
        assert!(QParam::new(0.5).is_ok());
    }

    #[test]
    fn finite_products() {
        assert_eq!(qpoch_finite(c(0.7), q(0.5), 0), c(1.0));
        assert_eq!(qpoch_finite(c(0.5), q(0.5), 1), c(0.5));
        assert_eq!(qpoch_finite(c(1.0), q(0.5), 3), c(0.0));
    }

    #[test]
    fn infinite_product_examples() {
        let v = qpoch_infinite(c(0.0), q(0.5), 1e-12).unwrap();
        assert_eq!(v.value, c(1.0));
        assert_eq!(v.tail_bound, 0.0);

        let oracle = product_oracle(0.5, 0.5, 200);
        let v = qpoch_infinite(c(0.5), q(0.5), 1e-12).unwrap();
        assert!(v.tail_bound <= 1e-12);
        assert!((v.value.re - oracle).abs() <= v.tail_bound + 1e-15);
        assert!((v.value.re - 0.288_788_095_086_602_4).abs() < 1e-12);

        let v = qpoch_infinite(c(1.0), q(0.5), 1e-12).unwrap();
        assert_eq!(v.value, c(0.0));
        assert_eq!(v.tail_bound, 0.0);
    }

    #[test]
    fn infinite_product_rejects_bad_tol() {
        assert!(qpoch_infinite(c(0.5), q(0.5), 0.0).is_err());
        assert!(qpoch_infinite(c(0.5), q(0.5), f64::NAN).is_err());
    }

    #[test]
    fn infinite_product_large_argument_still_certifies() {
        let v = qpoch_infinite(c(-50.0), q(0.5), 1e-10).unwrap();
        let oracle = product_oracle(-50.0, 0.5, 400);
        assert!((v.value.re - oracle).abs() <= v.tail_bound + 1e-12 * oracle.abs());
    }

    #[test]
    fn gaussian_binomials() {
        assert_eq!(qbinom(5, 0, q(0.3)).unwrap(), 1.0);
        assert!((qbinom(2, 1, q(0.5)).unwrap() - 1.5).abs() < 1e-15);
        let a = qbinom(4, 3, q(0.7)).unwrap();
        let b = qbinom(4, 1, q(0.7)).unwrap();
        assert!((a - b).abs() < 1e-14);
        assert!(matches!(qbinom(3, 4, q(0.5)), Err(Error::OutOfRange(_))));
        assert!(matches!(qbinom(3, -1, q(0.5)), Err(Error::OutOfRange(_))));
    }

    #[test]
    fn gaussian_binomial_classical_limit() {
        let v = qbinom(6, 3, q(0.999)).unwrap();
        assert!((v - 20.0).abs() / 20.0 < 0.01, "{v}");
    }

    #[test]
    fn remainder_examples() {
        let r = tail_remainders(0.5, q(0.5), 0).unwrap();
        assert!((r.r1 - (-0.711_211_904_913_397_6)).abs() < 1e-13);
        assert!(r.r1.abs() <= r.r1_bound);
        assert!(r.r2.abs() <= r.r2_bound);

        let r = tail_remainders(0.0, q(0.3), 7).unwrap();
        assert_eq!((r.r1, r.r1_bound, r.r2, r.r2_bound), (0.0, 0.0, 0.0, 0.0));

        // frozen from a 60-digit product evaluation
        let r = tail_remainders(0.9, q(0.5), 10).unwrap();
        assert!((r.r1 - (-0.001_756_782_790_349_557)).abs() < 1e-16);
        assert!((r.r1_bound - 0.002_675_340_294_469_354).abs() < 1e-15);
        assert!((r.r2 - 0.001_759_874_507_597_679).abs() < 1e-16);
        let oracle = product_oracle(0.9 * 0.5f64.powi(10), 0.5, 200) - 1.0;
        assert!((r.r1 - oracle).abs() < 1e-15);
    }

    #[test]
    fn remainder_hypothesis() {
        assert!(matches!(
            tail_remainders(2.5, q(0.5), 3),
            Err(Error::HypothesisViolated(_))
        ));
        assert!(matches!(
            tail_remainders(1.2, q(0.5), 0),
            Err(Error::HypothesisViolated(_))
        ));
        // R1 alone has no hypothesis beyond a >= 0
        let (r1, bound) = remainder_r1(2.5, q(0.5), 3).unwrap();
        assert!(r1.abs() <= bound);
    }

    #[test]
    fn constant_bounds_bracket_the_truth() {
        // (-q^3; q)_inf at q = 0.5 is 1.2715898821500649...
        let up = neg_poch_upper(0.125, q(0.5));
        assert!((1.271_589_882_150_064_9..1.271_589_882_150_2).contains(&up));
        let lo = qq_inf_lower(q(0.5));
        assert!(lo <= 0.288_788_095_086_602_4 && lo > 0.288_788_095_086_5);
        let v = qq_inf(q(0.5));
        assert!((v - 0.288_788_095_086_602_4).abs() < 2e-16, "{v:e}");
    }
}
