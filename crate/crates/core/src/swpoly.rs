//! Stieltjes-Wigert polynomials
//! `S_n(x; q) = sum_k q^{k^2} (-x)^k / ((q;q)_k (q;q)_{n-k})`
//! at the scaled point `x_n = z q^{-ns}`.
//!
//! Three forms are provided: the raw sum (small `n` only), the sum divided
//! by `(-z)^n q^{n^2(1-s)}`, and the theta-centered split sum for
//! `-2 < tau < 0`. The scaled point itself is never materialized outside the
//! small-`n` reference functions.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::diophantine::chi;
use crate::error::{Error, Result};
use crate::qcore::{ln_qq_tail, neg_poch_upper, one_minus_pow, QParam};
use crate::scaling::{Scalar, Scaling};

/// Largest degree accepted by [`sw_direct`].
pub const DIRECT_MAX_N: u64 = 30;

/// Terms below this fraction of the largest term are dropped once the
/// quadratic log-majorant has turned over.
const REL_CUTOFF: f64 = 1e-20;

/// Exponent range a normalized sum may reach before it is reported as an
/// overflow.
const MAX_LN_PEAK: f64 = 700.0;

/// `ln (q;q)_j` for `j = 0..=n`.
fn ln_qq_table(q: QParam, n: u64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n as usize + 1);
    let mut acc = 0.0;
    out.push(acc);
    for j in 1..=n {
        acc += one_minus_pow(q.get(), j).ln();
        out.push(acc);
    }
    out
}

/// `{j x}` for a tagged scalar, exact for rationals.
fn frac_multiple(x: &Scalar, j: i64) -> f64 {
    x.frac_of_multiple(j).frac
}

/// Raw sum, defined for `n <= 30`.
pub fn sw_direct(n: u64, x: Complex64, q: QParam) -> Result<Complex64> {
    if n > DIRECT_MAX_N {
        return Err(Error::DomainTooLarge(n as usize, DIRECT_MAX_N as usize));
    }
    let qv = q.get();
    let ln_qq = ln_qq_table(q, n);
    let mut sum = Complex64::new(0.0, 0.0);
    let mut pow = Complex64::new(1.0, 0.0);
    let mut qk2 = 1.0;
    for k in 0..=n {
        let denom = (ln_qq[k as usize] + ln_qq[(n - k) as usize]).exp();
        sum += pow * qk2 / denom;
        pow *= -x;
        qk2 *= qv.powi(2 * k as i32 + 1);
    }
    Ok(sum)
}

/// Stopping rule shared by the normalized sums.
///
/// Terms obey `ln |t_k| <= a k^2 + b k + c` with `a = ln q < 0`. Past the
/// vertex, once the majorant ratio `exp(a(2k+1) + b)` is at most one half,
/// the remaining terms sum to at most twice the current majorant.
struct Majorant {
    a: f64,
    b: f64,
    c: f64,
}

impl Majorant {
    fn at(&self, k: f64) -> f64 {
        (self.a * k + self.b) * k + self.c
    }

    fn peak(&self) -> f64 {
        let v = (-self.b / (2.0 * self.a)).max(0.0);
        self.at(v)
    }

    fn can_stop(&self, k: u64, ln_max: f64) -> bool {
        let kf = k as f64;
        kf * 2.0 * self.a + self.b < 0.0
            && self.a * (2.0 * kf + 1.0) + self.b <= -std::f64::consts::LN_2
            && self.at(kf) + std::f64::consts::LN_2 < ln_max + REL_CUTOFF.ln()
    }
}

/// `S_n(x_n) / ((-z)^n q^{n^2(1-s)})`, summed as
/// `sum_k q^{k^2} e^{2 pi i nk theta} (-q^{tau n}/z)^k / ((q;q)_k (q;q)_{n-k})`.
pub fn sw_normalized(n: u64, z: Complex64, scaling: &Scaling, q: QParam) -> Result<Complex64> {
    if z.norm() == 0.0 {
        return Err(Error::ZeroArgument);
    }
    let ln_q = q.get().ln();
    let ln_qq_inf = ln_qq_tail(0, q);
    let b = scaling.tau.value() * n as f64 * ln_q - z.norm().ln();
    let majorant = Majorant {
        a: ln_q,
        b,
        c: -2.0 * ln_qq_inf,
    };
    let peak = majorant.peak();
    if peak > MAX_LN_PEAK {
        return Err(Error::PeakOverflow(peak));
    }
    let base_angle = PI - z.arg();
    let mut sum = Complex64::new(0.0, 0.0);
    let mut ln_qq_k = 0.0;
    let mut ln_max = f64::NEG_INFINITY;
    for k in 0..=n {
        if k > 0 {
            ln_qq_k += one_minus_pow(q.get(), k).ln();
            if majorant.can_stop(k, ln_max) {
                break;
            }
        }
        let kf = k as f64;
        let ln_qq_rest = ln_qq_inf - ln_qq_tail(n - k, q);
        let ln_mag = (ln_q * kf + b) * kf - ln_qq_k - ln_qq_rest;
        ln_max = ln_max.max(ln_mag);
        let turns = frac_multiple(&scaling.theta, (n * k) as i64);
        let angle = kf * base_angle + TAU * turns;
        sum += Complex64::from_polar(ln_mag.exp(), angle);
    }
    Ok(sum)
}

/// Output of the split-sum evaluator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitSumResult {
    pub value: Complex64,
    pub m: i64,
    /// `-tau n - m`
    pub c_n: f64,
    /// `{n theta}`
    pub d_n: f64,
    pub chi_m: u8,
    pub s1: Complex64,
    pub s2: Complex64,
}

fn check_tau(scaling: &Scaling) -> Result<f64> {
    let tau = scaling.tau.value();
    let inside = match scaling.tau.as_rational() {
        Some(r) => r < num_rational::Rational64::from_integer(0) && r > num_rational::Rational64::from_integer(-2),
        None => tau > -2.0 && tau < 0.0,
    };
    if inside {
        Ok(tau)
    } else {
        Err(Error::BadTau(tau))
    }
}

/// `-tau n - m`, exact when `tau` is rational.
fn offset_from(tau: &Scalar, n: u64, m: i64) -> f64 {
    let part = tau.neg().frac_of_multiple(n as i64);
    (part.floor - m) as f64 + part.frac
}

/// Sum of `q^{k^2} w^k g(k)` for `k` in `first..=last`, where
/// `0 < g(k) <= 1` is given in log form.
fn weighted_theta_wing(
    w: Complex64,
    q: QParam,
    first: u64,
    last: u64,
    ln_g: impl Fn(u64) -> f64,
) -> Complex64 {
    let ln_q = q.get().ln();
    let ln_w = w.norm().ln();
    let arg_w = w.arg();
    let majorant = Majorant {
        a: ln_q,
        b: ln_w,
        c: 0.0,
    };
    let mut sum = Complex64::new(0.0, 0.0);
    let mut ln_max = f64::NEG_INFINITY;
    for k in first..=last {
        if k > first && majorant.can_stop(k, ln_max) {
            break;
        }
        let kf = k as f64;
        let ln_mag = (ln_q * kf + ln_w) * kf + ln_g(k);
        ln_max = ln_max.max(ln_mag);
        sum += Complex64::from_polar(ln_mag.exp(), kf * arg_w);
    }
    sum
}

/// Split sum with an explicitly supplied `m`, so that `-tau n = m + c_n`
/// with `c_n` allowed slightly outside `[0, 1)`; used along witness
/// sequences where `m` is the nearest integer rather than the floor.
pub fn split_sum_at(
    n: u64,
    z: Complex64,
    scaling: &Scaling,
    q: QParam,
    m: i64,
) -> Result<SplitSumResult> {
    check_tau(scaling)?;
    if z.norm() == 0.0 {
        return Err(Error::ZeroArgument);
    }
    if m < 0 || m as u64 > 2 * n {
        return Err(Error::IndexOutOfRange(format!("m = {m} for n = {n}")));
    }
    let c_n = offset_from(&scaling.tau, n, m);
    let d_n = frac_multiple(&scaling.theta, n as i64);
    let chi_m = chi(m);
    let h = (m / 2) as u64;
    let w = -z
        * q.get().powf(chi_m as f64 + c_n)
        * Complex64::from_polar(1.0, -TAU * d_n);
    let s1 = weighted_theta_wing(w, q, 0, h, |k| {
        ln_qq_tail(h - k, q) + ln_qq_tail(n - h + k, q)
    });
    let s2 = if n > h {
        weighted_theta_wing(w.inv(), q, 1, n - h, |k| {
            ln_qq_tail(h + k, q) + ln_qq_tail(n - h - k, q)
        })
    } else {
        Complex64::new(0.0, 0.0)
    };
    Ok(SplitSumResult {
        value: s1 + s2,
        m,
        c_n,
        d_n,
        chi_m,
        s1,
        s2,
    })
}

/// The theta-centered normalization
/// `N_n = S_n(x_n) (q;q)_inf^2 (-z e^{-2 pi i n theta})^h / ((-z)^n q^{n^2(1-s) + h(tau n + h)})`
/// with `m = floor(-tau n)` and `h = floor(m/2)`.
pub fn sw_theta_normalized(
    n: u64,
    z: Complex64,
    scaling: &Scaling,
    q: QParam,
) -> Result<SplitSumResult> {
    check_tau(scaling)?;
    let m = scaling.tau.neg().frac_of_multiple(n as i64).floor;
    split_sum_at(n, z, scaling, q, m)
}

fn check_ratio_args(n: u64, m: u64) -> Result<u64> {
    let h = m / 2;
    if h > n {
        return Err(Error::IndexOutOfRange(format!("floor(m/2) = {h} exceeds n = {n}")));
    }
    Ok(h)
}

/// `e(k, n) = (q;q)_inf^2 / ((q;q)_{h-k} (q;q)_{n-h+k})`, `h = floor(m/2)`.
pub fn poch_tail_ratio_e(k: u64, n: u64, m: u64, q: QParam) -> Result<f64> {
    let h = check_ratio_args(n, m)?;
    if k > h {
        return Err(Error::IndexOutOfRange(format!("k = {k} exceeds floor(m/2) = {h}")));
    }
    Ok((ln_qq_tail(h - k, q) + ln_qq_tail(n - h + k, q)).exp())
}

/// `f(k, n) = (q;q)_inf^2 / ((q;q)_{h+k} (q;q)_{n-h-k})`, `1 <= k <= n - h`.
pub fn poch_tail_ratio_f(k: u64, n: u64, m: u64, q: QParam) -> Result<f64> {
    let h = check_ratio_args(n, m)?;
    if k == 0 || k > n - h {
        return Err(Error::IndexOutOfRange(format!("k = {k} outside 1..={}", n - h)));
    }
    Ok((ln_qq_tail(h + k, q) + ln_qq_tail(n - h - k, q)).exp())
}

/// `3 (-q^3;q)_inf^2 q^{nu+2} / (1-q)^2`, the deviation of `e` and `f`
/// from one for `k <= nu - 1`.
pub fn ratio_deviation_bound(nu: u64, q: QParam) -> f64 {
    let qv = q.get();
    let c = neg_poch_upper(qv.powi(3), q);
    3.0 * c * c * qv.powf(nu as f64 + 2.0) / ((1.0 - qv) * (1.0 - qv))
}

/// `ln x_n = ln z - n s ln q`, with the phase of `q^{-ns}` reduced exactly.
fn scaled_point(n: u64, z: Complex64, scaling: &Scaling, q: QParam) -> Complex64 {
    let ln_q = q.get().ln();
    let turns = frac_multiple(&scaling.theta, n as i64);
    let mag = z.norm() * (-(n as f64) * (scaling.tau.value() + 2.0) * ln_q).exp();
    Complex64::from_polar(mag, z.arg() - TAU * turns)
}

/// `Log((-z)^n q^{n^2(1-s)})` with integer powers taken as `n Log(-z)`.
fn ln_prefactor(n: u64, z: Complex64, scaling: &Scaling, q: QParam) -> Complex64 {
    let ln_q = q.get().ln();
    let nf = n as f64;
    let ln_neg_z = (-z).ln();
    let turns = frac_multiple(&scaling.theta, (n * n) as i64);
    Complex64::new(
        nf * ln_neg_z.re - nf * nf * (1.0 + scaling.tau.value()) * ln_q,
        nf * ln_neg_z.im - TAU * turns,
    )
}

/// Reference value of [`sw_normalized`] from the raw sum at the scaled
/// point, with the prefactor divided out in log space. Small `n` only.
pub fn direct_normalized(n: u64, z: Complex64, scaling: &Scaling, q: QParam) -> Result<Complex64> {
    if z.norm() == 0.0 {
        return Err(Error::ZeroArgument);
    }
    let raw = sw_direct(n, scaled_point(n, z, scaling, q), q)?;
    Ok(raw * (-ln_prefactor(n, z, scaling, q)).exp())
}

/// Reference value of [`sw_theta_normalized`] from the raw sum. Small `n`
/// only.
pub fn direct_theta_normalized(
    n: u64,
    z: Complex64,
    scaling: &Scaling,
    q: QParam,
) -> Result<Complex64> {
    check_tau(scaling)?;
    if z.norm() == 0.0 {
        return Err(Error::ZeroArgument);
    }
    let m = scaling.tau.neg().frac_of_multiple(n as i64).floor;
    let h = (m / 2) as f64;
    let ln_q = q.get().ln();
    let raw = sw_direct(n, scaled_point(n, z, scaling, q), q)?;
    let turns = frac_multiple(&scaling.theta, n as i64);
    let ln_neg_z = (-z).ln();
    let ln_shift = Complex64::new(h * ln_neg_z.re, h * (ln_neg_z.im - TAU * turns));
    let ln_norm = 2.0 * ln_qq_tail(0, q) + ln_shift
        - ln_prefactor(n, z, scaling, q)
        - h * (scaling.tau.value() * n as f64 + h) * ln_q;
    Ok(raw * ln_norm.exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::{qpoch_finite, qq_inf};

    fn q(v: f64) -> QParam {
        QParam::new(v).unwrap()
    }

    fn scaling(tau: &str, theta: &str) -> Scaling {
        Scaling::new(tau.parse().unwrap(), theta.parse().unwrap())
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn direct_small_cases() {
        assert_eq!(sw_direct(0, c(3.0, 1.0), q(0.5)).unwrap(), c(1.0, 0.0));
        assert!(sw_direct(1, c(2.0, 0.0), q(0.5)).unwrap().norm() < 1e-15);
        let poch3 = qpoch_finite(c(0.5, 0.0), q(0.5), 3).re;
        let v = sw_direct(3, c(0.0, 0.0), q(0.5)).unwrap();
        assert!((v.re - 1.0 / poch3).abs() < 1e-14);
        assert_eq!(sw_direct(31, c(1.0, 0.0), q(0.5)), Err(Error::DomainTooLarge(31, 30)));
    }

    #[test]
    fn normalized_two_term_expansion() {
        let v = sw_normalized(1, c(1.0, 0.0), &scaling("1", "0"), q(0.5)).unwrap();
        assert!((v - c(1.5, 0.0)).norm() < 1e-14);
        assert_eq!(
            sw_normalized(3, c(0.0, 0.0), &scaling("1", "0"), q(0.5)),
            Err(Error::ZeroArgument)
        );
    }

    #[test]
    fn normalized_peak_overflow() {
        let r = sw_normalized(200, c(1.0, 0.0), &scaling("-3/2", "0"), q(0.5));
        assert!(matches!(r, Err(Error::PeakOverflow(_))));
    }

    #[test]
    fn normalized_matches_reference() {
        let sc = scaling("1/2", "1/4");
        let z = c(0.5, 1.0);
        for n in 1..=12 {
            let a = sw_normalized(n, z, &sc, q(0.5)).unwrap();
            let b = direct_normalized(n, z, &sc, q(0.5)).unwrap();
            assert!((a - b).norm() <= 1e-9 * b.norm(), "n={n}: {a} vs {b}");
        }
    }

    #[test]
    fn split_sum_matches_reference() {
        let sc = scaling("-1/2", "1/4");
        let z = c(1.0, 0.5);
        for n in 1..=12 {
            let a = sw_theta_normalized(n, z, &sc, q(0.5)).unwrap();
            let b = direct_theta_normalized(n, z, &sc, q(0.5)).unwrap();
            assert!((a.value - b).norm() <= 1e-8 * b.norm(), "n={n}: {} vs {b}", a.value);
        }
    }

    #[test]
    fn split_sum_bookkeeping() {
        let sc = scaling("-1/2", "1/4");
        let r = sw_theta_normalized(7, c(1.0, 0.0), &sc, q(0.5)).unwrap();
        assert_eq!((r.m, r.c_n, r.d_n, r.chi_m), (3, 0.5, 0.75, 1));
        assert_eq!(r.value, r.s1 + r.s2);
        assert_eq!(
            sw_theta_normalized(3, c(1.0, 0.0), &scaling("1/2", "0"), q(0.5)),
            Err(Error::BadTau(0.5))
        );
        assert!(matches!(
            sw_theta_normalized(3, c(1.0, 0.0), &scaling("-2", "0"), q(0.5)),
            Err(Error::BadTau(_))
        ));
    }

    #[test]
    fn pochhammer_ratios() {
        let qq = q(0.5);
        let n = 60;
        let m = 30;
        let e = poch_tail_ratio_e(15, n, m, qq).unwrap();
        assert!((e - qq_inf(qq) * qq_inf(qq) / qpoch_finite(c(0.5, 0.0), qq, 60).re).abs() < 1e-14);
        for k in 0..=15 {
            assert!(poch_tail_ratio_e(k, n, m, qq).unwrap() <= 1.0);
        }
        for k in 1..=45 {
            assert!(poch_tail_ratio_f(k, n, m, qq).unwrap() <= 1.0);
        }
        assert!(poch_tail_ratio_e(16, n, m, qq).is_err());
        assert!(poch_tail_ratio_f(0, n, m, qq).is_err());
        assert!(poch_tail_ratio_f(46, n, m, qq).is_err());
        let nu = 5;
        let bound = ratio_deviation_bound(nu, qq);
        for k in 0..nu {
            assert!((poch_tail_ratio_e(k, n, m, qq).unwrap() - 1.0).abs() <= bound);
        }
        for k in 1..nu {
            assert!((poch_tail_ratio_f(k, n, m, qq).unwrap() - 1.0).abs() <= bound);
        }
    }
}
