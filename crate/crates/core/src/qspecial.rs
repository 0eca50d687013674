//! Ramanujan's entire function, its majorant and the Jacobi theta function.
//!
//! All series are summed with incremental recurrences (`q^{(k+1)^2} =
//! q^{k^2} q^{2k+1}`) and stopped once a geometric majorant of the remaining
//! terms drops below the requested tolerance.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::qcore::{check_tol, one_minus_pow, qpoch_infinite, qq_inf_lower, CertifiedValue, QParam};

const MAX_TERMS: usize = 100_000;

/// Argument of the theta function: a nonzero complex `z` and the nome `q`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaArg {
    z: Complex64,
    q: QParam,
}

impl ThetaArg {
    pub fn new(z: Complex64, q: QParam) -> Result<Self> {
        if z == Complex64::new(0.0, 0.0) {
            return Err(Error::ZeroArgument);
        }
        if !z.is_finite() {
            return Err(Error::InvalidArgument(format!("non-finite theta argument {z}")));
        }
        Ok(Self { z, q })
    }

    pub fn z(&self) -> Complex64 {
        self.z
    }

    pub fn q(&self) -> QParam {
        self.q
    }
}

/// `A_q(z) = sum_k q^{k^2} (-z)^k / (q; q)_k`.
///
/// The tail after `N` terms is majorized by `q^{N^2}|z|^N / ((q;q)_inf (1 - r))`
/// with `r = q^{2N+1}|z| < 1`.
pub fn ramanujan_aq(z: Complex64, q: QParam, tol: f64) -> Result<CertifiedValue> {
    check_tol(tol)?;
    if !z.is_finite() {
        return Err(Error::InvalidArgument(format!("non-finite argument {z}")));
    }
    let qv = q.get();
    let r = z.norm();
    let inv_qq = 1.0 / qq_inf_lower(q);
    let mut sum = Complex64::new(0.0, 0.0);
    let mut term = Complex64::new(1.0, 0.0);
    let mut majorant = 1.0;
    // q^{2k+1}
    let mut step = qv;
    for k in 0..MAX_TERMS as u64 {
        sum += term;
        term *= -z * step / one_minus_pow(qv, k + 1);
        majorant *= step * r;
        step *= qv * qv;
        let ratio = step * r;
        if ratio < 1.0 {
            let tail = majorant * inv_qq / (1.0 - ratio);
            if tail <= tol {
                return Ok(CertifiedValue {
                    value: sum,
                    tail_bound: tail,
                });
            }
        }
    }
    Err(Error::NonConvergent(MAX_TERMS))
}

/// `B_q(x) = sum_k q^{k^2} x^k / (q; q)_k` for `x >= 0`, i.e. `A_q(-x)`.
pub fn bq(x: f64, q: QParam, tol: f64) -> Result<CertifiedValue> {
    if !(x >= 0.0 && x.is_finite()) {
        return Err(Error::InvalidArgument(format!("B_q needs x >= 0, got {x}")));
    }
    let mut v = ramanujan_aq(Complex64::new(-x, 0.0), q, tol)?;
    v.value.im = 0.0;
    Ok(v)
}

/// `A_q'(z)`, the term-wise derivative `sum_{k>=1} k q^{k^2} (-1)^k z^{k-1} / (q;q)_k`.
pub fn aq_derivative(z: Complex64, q: QParam, tol: f64) -> Result<CertifiedValue> {
    check_tol(tol)?;
    if !z.is_finite() {
        return Err(Error::InvalidArgument(format!("non-finite argument {z}")));
    }
    let qv = q.get();
    let r = z.norm();
    let inv_qq = 1.0 / qq_inf_lower(q);
    let mut sum = Complex64::new(0.0, 0.0);
    // coefficient q^{k^2} (-1)^k z^{k-1} / (q;q)_k at k = 1
    let mut coeff = Complex64::new(-qv / (1.0 - qv), 0.0);
    // k q^{k^2} |z|^{k-1} at k = 1
    let mut majorant = qv;
    let mut step = qv * qv * qv; // q^{2k+1}
    for k in 1..MAX_TERMS as u64 {
        let kf = k as f64;
        sum += coeff * kf;
        coeff *= -z * step / one_minus_pow(qv, k + 1);
        majorant *= (kf + 1.0) / kf * step * r;
        step *= qv * qv;
        let ratio = (kf + 2.0) / (kf + 1.0) * step * r;
        if ratio < 1.0 {
            let tail = majorant * inv_qq / (1.0 - ratio);
            if tail <= tol {
                return Ok(CertifiedValue {
                    value: sum,
                    tail_bound: tail,
                });
            }
        }
    }
    Err(Error::NonConvergent(MAX_TERMS))
}

/// `Theta(z | q) = sum_{n in Z} q^{n^2} z^n`, summed symmetrically.
///
/// With `w = max(|z|, 1/|z|)`, both wings beyond `|n| = N` are dominated by
/// `sum_{n>N} q^{n^2} w^n`; the sum stops once the ratio `q^{2N+3} w` is at
/// most one half and the doubled geometric tail is below `tol`.
pub fn theta_series(arg: ThetaArg, tol: f64) -> Result<CertifiedValue> {
    check_tol(tol)?;
    let z = arg.z;
    let qv = arg.q.get();
    let zi = z.inv();
    let w = z.norm().max(1.0 / z.norm());
    let q2 = qv * qv;
    let mut sum = Complex64::new(1.0, 0.0);
    let mut plus = Complex64::new(1.0, 0.0);
    let mut minus = Complex64::new(1.0, 0.0);
    let mut majorant = 1.0;
    let mut step = qv; // q^{2n+1}
    for _ in 0..MAX_TERMS {
        plus *= z * step;
        minus *= zi * step;
        majorant *= w * step;
        step *= q2;
        sum += plus + minus;
        let next = majorant * w * step;
        let ratio = step * q2 * w;
        if ratio <= 0.5 {
            let tail = 2.0 * next / (1.0 - ratio);
            if tail <= tol {
                return Ok(CertifiedValue {
                    value: sum,
                    tail_bound: tail,
                });
            }
        }
    }
    Err(Error::NonConvergent(MAX_TERMS))
}

/// Theta via the triple product `(q^2; q^2)_inf (-qz; q^2)_inf (-q/z; q^2)_inf`.
pub fn theta_product(arg: ThetaArg, tol: f64) -> Result<CertifiedValue> {
    check_tol(tol)?;
    let z = arg.z;
    let q = arg.q;
    let base = q.squared();
    let qv = q.get();
    let args = [
        Complex64::new(base.get(), 0.0),
        -z * qv,
        -z.inv() * qv,
    ];
    let mut factor_tol = tol / 3.0;
    for _ in 0..12 {
        let mut value = Complex64::new(1.0, 0.0);
        let mut upper = 1.0;
        let mut nominal = 1.0;
        for a in args {
            let f = qpoch_infinite(a, base, factor_tol)?;
            value *= f.value;
            upper *= f.value.norm() + f.tail_bound;
            nominal *= f.value.norm();
        }
        let bound = (upper - nominal).max(0.0);
        if bound <= tol {
            return Ok(CertifiedValue {
                value,
                tail_bound: bound,
            });
        }
        factor_tol /= 10.0;
    }
    Err(Error::NonConvergent(MAX_TERMS))
}
