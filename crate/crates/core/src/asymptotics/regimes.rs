use std::f64::consts::TAU;

use num_complex::Complex64;
use num_rational::Rational64;

use super::{CaseParams, Evaluation, Param, Regime, CONSTANT_TOL};
use crate::diophantine::{
    joint_progression, lattice_of_rational, witness_search, witness_search_pair,
    DiophantineWitness,
};
use crate::error::{Error, Result};
use crate::qcore::{neg_poch_upper, qq_inf, qq_inf_lower, QParam};
use crate::qspecial::{bq, ramanujan_aq, theta_series, ThetaArg};
use crate::scaling::{Scalar, Scaling};
use crate::swpoly::{split_sum_at, sw_normalized, sw_theta_normalized};

/// Upper bound on `(-q^3; q)_inf`.
fn neg_q3(q: QParam) -> f64 {
    neg_poch_upper(q.get().powi(3), q)
}

fn bq_upper(x: f64, q: QParam) -> Result<f64> {
    let v = bq(x, q, CONSTANT_TOL)?;
    Ok(v.value.re + v.tail_bound)
}

/// Upper bound on `Theta(|z| | sqrt q)`.
fn theta_sqrt_upper(r: f64, q: QParam) -> Result<f64> {
    let v = theta_series(ThetaArg::new(Complex64::new(r, 0.0), q.sqrt())?, CONSTANT_TOL)?;
    Ok(v.value.re + v.tail_bound)
}

/// `floor(q^4 ln^2 n / (1 + ln(1/q)))`.
fn nu_log(n: u64, q: QParam) -> u64 {
    let qv = q.get();
    let ln_n = (n as f64).ln();
    (qv.powi(4) * ln_n * ln_n / (1.0 - qv.ln())).floor() as u64
}

fn check_z(z: Complex64) -> Result<f64> {
    let r = z.norm();
    if r == 0.0 || !r.is_finite() {
        return Err(Error::ZeroArgument);
    }
    Ok(r)
}

fn aq_main(z: Complex64, q: QParam, phase: f64) -> Result<Complex64> {
    check_z(z)?;
    let arg = Complex64::from_polar(1.0, TAU * phase) / z;
    Ok(ramanujan_aq(arg, q, 1e-15)?.value)
}

/// `Theta(-z q^{chi + u} e^{-2 pi i v} | q)`.
fn theta_main(z: Complex64, q: QParam, chi_m: u8, u: f64, v: f64) -> Result<Complex64> {
    check_z(z)?;
    let w = -z * q.get().powf(chi_m as f64 + u) * Complex64::from_polar(1.0, -TAU * v);
    Ok(theta_series(ThetaArg::new(w, q)?, 1e-15)?.value)
}

/// Normalized value for `tau >= 0`, carrying the `(q;q)_inf` factor.
fn line_lhs(params: &CaseParams, n: u64, z: Complex64, q: QParam) -> Result<Complex64> {
    Ok(sw_normalized(n, z, &params.scaling, q)? * qq_inf(q))
}

/// Common factor `6 (-q^3;q)^2 Theta(|z| | sqrt q) / (1-q)^2` of the theta
/// regime bounds, times `scale`.
fn theta_constant(scale: f64, z: Complex64, q: QParam) -> Result<f64> {
    let c = neg_q3(q);
    let qv = q.get();
    Ok(scale * c * c * theta_sqrt_upper(check_z(z)?, q)? / ((1.0 - qv) * (1.0 - qv)))
}

/// `|z|^nu q^{nu^2} + q^{nu^2/2} / |z|^nu + ln^2 n / n^rho`.
fn log_regime_bracket(r: f64, nu: u64, n: u64, q: QParam, rho: f64) -> f64 {
    let qv = q.get();
    let nu_f = nu as f64;
    let ln_n = (n as f64).ln();
    r.powf(nu_f) * qv.powf(nu_f * nu_f)
        + qv.powf(nu_f * nu_f / 2.0) / r.powf(nu_f)
        + ln_n * ln_n / (n as f64).powf(rho)
}

/// Degrees in `[n_min, n_max]` congruent to `residue` mod `modulus`.
fn progression(modulus: u64, residue: u64, n_min: u64, n_max: u64) -> Vec<u64> {
    crate::diophantine::Progression { modulus, residue }.members(n_min, n_max)
}

/// Residue class of `n` on which `{n x} = lambda`.
fn lattice_residue(x: &Scalar, lambda: f64) -> Result<(u64, u64)> {
    let lattice = lattice_of_rational(x)?;
    let residue = lattice.residue_of(lambda).ok_or_else(|| {
        Error::InvalidArgument(format!("lambda = {lambda} is not a fractional part of n*({x})"))
    })?;
    Ok((lattice.modulus(), residue))
}

fn in_range(ws: Vec<DiophantineWitness>, n_min: u64) -> impl Iterator<Item = DiophantineWitness> {
    ws.into_iter().filter(move |w| w.n >= n_min)
}

/// `tau > 0`: the normalized polynomial times `(q;q)_inf` tends to one.
pub struct TauPositive;

impl TauPositive {
    /// `q B_q(q^2/|z|) q^{tau n} / ((1-q)|z|)`, the bound on the `k >= 1`
    /// part of the normalized sum.
    pub fn series_tail_bound(params: &CaseParams, n: u64, z: Complex64, q: QParam) -> Result<f64> {
        let r = check_z(z)?;
        let qv = q.get();
        let tau = params.scaling.tau.value();
        Ok(qv * bq_upper(qv * qv / r, q)? / ((1.0 - qv) * r) * qv.powf(tau * n as f64))
    }

    /// `n`-free form `q B_q(q^2/|z|) / ((1-q)|z|)`.
    pub fn uniform_bound(z: Complex64, q: QParam) -> Result<f64> {
        let r = check_z(z)?;
        let qv = q.get();
        Ok(qv * bq_upper(qv * qv / r, q)? / ((1.0 - qv) * r))
    }

    /// `(-q^3;q)_inf q^{n+1} / (1-q)`, bounding `(q;q)_inf/(q;q)_n - 1`,
    /// the deviation of the `k = 0` term.
    pub fn head_deviation(n: u64, q: QParam) -> f64 {
        let qv = q.get();
        neg_q3(q) * qv.powf(n as f64 + 1.0) / (1.0 - qv)
    }
}

impl Regime for TauPositive {
    fn id(&self) -> u8 {
        1
    }

    fn name(&self) -> &'static str {
        "tau-positive"
    }

    fn description(&self) -> &'static str {
        "tau > 0; main term 1"
    }

    fn required(&self) -> &'static [Param] {
        &[]
    }

    fn main_term(&self, _: &CaseParams, _: Complex64, _: QParam, _: u8) -> Result<Complex64> {
        Ok(Complex64::new(1.0, 0.0))
    }

    /// Tail of the `k >= 1` terms plus the deviation of the `k = 0` term.
    fn error_bound(&self, params: &CaseParams, n: u64, z: Complex64, q: QParam) -> Result<f64> {
        Ok(Self::series_tail_bound(params, n, z, q)? + Self::head_deviation(n, q))
    }

    fn evaluate(&self, params: &CaseParams, n: u64, z: Complex64, q: QParam) -> Result<Evaluation> {
        Ok(Evaluation {
            lhs: line_lhs(params, n, z, q)?,
            chi_m: 0,
            witness: None,
        })
    }

    fn indices(&self, _: &CaseParams, n_min: u64, n_max: u64) -> Result<Vec<u64>> {
        Ok((n_min..=n_max).collect())
    }
}

/// `tau = 0`, `theta` rational: main term `A_q(e^{2 pi i lambda}/z)` along
/// `{n theta} = lambda`.
pub struct RationalLine;

impl Regime for RationalLine {
    fn id(&self) -> u8 {
        2
    }

    fn name(&self) -> &'static str {
        "rational-line"
    }

    fn description(&self) -> &'static str {
        "tau = 0, theta rational; main term A_q(e^{2 pi i lambda}/z)"
    }

    fn required(&self) -> &'static [Param] {
        &[Param::Lambda]
    }

    fn main_term(&self, params: &CaseParams, z: Complex64, q: QParam, _: u8) -> Result<Complex64> {
        aq_main(z, q, params.lambda()?)
    }

    /// `2 (-q^3;q) B_q(1/|z|) / (q;q)_inf (q^{n/2} + q^{n^2/4} / |z|^{floor(n/2)})`
    fn error_bound(&self, _: &CaseParams, n: u64, z: Complex64, q: QParam) -> Result<f64> {
        let r = check_z(z)?;
        let qv = q.get();
        let nf = n as f64;
        let constant = 2.0 * neg_q3(q) * bq_upper(1.0 / r, q)? / qq_inf_lower(q);
        Ok(constant * (qv.powf(nf / 2.0) + qv.powf(nf * nf / 4.0) / r.powf((n / 2) as f64)))
    }

    fn evaluate(&self, params: &CaseParams, n: u64, z: Complex64, q: QParam) -> Result<Evaluation> {
        Ok(Evaluation {
            lhs: line_lhs(params, n, z, q)?,
            chi_m: 0,
            witness: None,
        })
    }

    fn indices(&self, params: &CaseParams, n_min: u64, n_max: u64) -> Result<Vec<u64>> {
        let (modulus, residue) = lattice_residue(&params.scaling.theta, params.lambda()?)?;
        Ok(progression(modulus, residue, n_min, n_max))
    }
}

/// `tau = 0`, `theta` irrational: main term `A_q(e^{2 pi i beta}/z)` along
/// witnesses of `n theta = m + beta + gamma_n`.
pub struct IrrationalLine;

impl Regime for IrrationalLine {
    fn id(&self) -> u8 {
        3
    }

    fn name(&self) -> &'static str {
        "irrational-line"
    }

    fn description(&self) -> &'static str {
        "tau = 0, theta irrational; main term A_q(e^{2 pi i beta}/z)"
    }

    fn required(&self) -> &'static [Param] {
        &[Param::Beta, Param::Rho]
    }

    fn nu(&self, _: &Scaling, n: u64, q: QParam) -> u64 {
        nu_log(n, q)
    }

    fn main_term(&self, params: &CaseParams, z: Complex64, q: QParam, _: u8) -> Result<Complex64> {
        aq_main(z, q, params.beta()?.value())
    }

    /// `24 (-q^3;q) B_q(1/|z|) / (q;q)_inf (ln^2 n / n^rho + q^{nu^2} / |z|^nu)`
    fn error_bound(&self, params: &CaseParams, n: u64, z: Complex64, q: QParam) -> Result<f64> {
        let r = check_z(z)?;
        let rho = params.rho()?;
        let qv = q.get();
        let nu = nu_log(n, q) as f64;
        let ln_n = (n as f64).ln();
        let constant = 24.0 * neg_q3(q) * bq_upper(1.0 / r, q)? / qq_inf_lower(q);
        Ok(constant * (ln_n * ln_n / (n as f64).powf(rho) + qv.powf(nu * nu) / r.powf(nu)))
    }

    fn evaluate(&self, params: &CaseParams, n: u64, z: Complex64, q: QParam) -> Result<Evaluation> {
        let witness = DiophantineWitness::at(n, &params.scaling.theta, params.beta()?, params.rho()?);
        Ok(Evaluation {
            lhs: line_lhs(params, n, z, q)?,
            chi_m: 0,
            witness: Some(witness),
        })
    }

    fn indices(&self, params: &CaseParams, n_min: u64, n_max: u64) -> Result<Vec<u64>> {
        let ws = witness_search(&params.scaling.theta, params.beta()?, params.rho()?, n_max)?;
        Ok(in_range(ws, n_min).map(|w| w.n).collect())
    }
}

/// Split-sum value with `m = floor(-tau n)`.
fn floor_split(params: &CaseParams, n: u64, z: Complex64, q: QParam) -> Result<(Complex64, u8)> {
    let r = sw_theta_normalized(n, z, &params.scaling, q)?;
    Ok((r.value, r.chi_m))
}

/// Split-sum value with `m` taken from a witness of `-tau n`.
fn witness_split(
    params: &CaseParams,
    n: u64,
    z: Complex64,
    q: QParam,
    beta: &Scalar,
) -> Result<Evaluation> {
    let witness = DiophantineWitness::at(n, &params.scaling.tau.neg(), beta, params.rho()?);
    let r = split_sum_at(n, z, &params.scaling, q, witness.m)?;
    Ok(Evaluation {
        lhs: r.value,
        chi_m: r.chi_m,
        witness: Some(witness),
    })
}

/// `-2 < tau < 0`, both rational: main term
/// `Theta(-z q^{chi(m) + lambda} e^{-2 pi i lambda1} | q)`.
pub struct RationalRational;

impl RationalRational {
    /// `min(floor((2 + tau) n / 8), floor(-tau n / 8))`, exact for rational
    /// `tau`.
    pub fn nu_min(tau: &Scalar, n: u64) -> u64 {
        let (a, b) = match tau.as_rational() {
            Some(t) => {
                let n = Rational64::from_integer(n as i64);
                let eight = Rational64::from_integer(8);
                let two = Rational64::from_integer(2);
                (((two + t) * n / eight).floor(), ((-t) * n / eight).floor())
            }
            None => {
                let t = tau.value();
                let nf = n as f64;
                return ((2.0 + t) * nf / 8.0).floor().min((-t * nf / 8.0).floor()).max(0.0) as u64;
            }
        };
        a.min(b).to_integer().max(0) as u64
    }
}

impl Regime for RationalRational {
    fn id(&self) -> u8 {
        4
    }

    fn name(&self) -> &'static str {
        "rational-rational"
    }

    fn description(&self) -> &'static str {
        "-2 < tau < 0, tau and theta rational; main term Theta(-z q^{chi(m)+lambda} e^{-2 pi i lambda1} | q)"
    }

    fn required(&self) -> &'static [Param] {
        &[Param::Lambda, Param::Lambda1]
    }

    fn nu(&self, scaling: &Scaling, n: u64, _: QParam) -> u64 {
        Self::nu_min(&scaling.tau, n)
    }

    fn main_term(&self, params: &CaseParams, z: Complex64, q: QParam, chi_m: u8) -> Result<Complex64> {
        theta_main(z, q, chi_m, params.lambda()?, params.lambda1()?)
    }

    /// `6 (-q^3;q)^2 Theta(|z| | sqrt q) / (1-q)^2 (q^nu + q^{nu^2}|z|^nu + q^{nu^2/2}/|z|^nu)`
    fn error_bound(&self, params: &CaseParams, n: u64, z: Complex64, q: QParam) -> Result<f64> {
        let r = check_z(z)?;
        let qv = q.get();
        let nu = Self::nu_min(&params.scaling.tau, n) as f64;
        let bracket =
            qv.powf(nu) + qv.powf(nu * nu) * r.powf(nu) + qv.powf(nu * nu / 2.0) / r.powf(nu);
        Ok(theta_constant(6.0, z, q)? * bracket)
    }

    fn evaluate(&self, params: &CaseParams, n: u64, z: Complex64, q: QParam) -> Result<Evaluation> {
        let (lhs, chi_m) = floor_split(params, n, z, q)?;
        Ok(Evaluation {
            lhs,
            chi_m,
            witness: None,
        })
    }

    fn indices(&self, params: &CaseParams, n_min: u64, n_max: u64) -> Result<Vec<u64>> {
        let p = joint_progression(
            &params.scaling.tau,
            &params.scaling.theta,
            params.lambda()?,
            params.lambda1()?,
        )?
        .ok_or_else(|| {
            Error::InvalidArgument("the two fractional-part conditions are incompatible".into())
        })?;
        Ok(p.members(n_min, n_max))
    }
}

/// `-2 < tau < 0`, `tau` rational, `theta` irrational: main term
/// `Theta(-z q^{chi(m) + lambda} e^{-2 pi i beta} | q)`.
pub struct RationalIrrational;

impl Regime for RationalIrrational {
    fn id(&self) -> u8 {
        5
    }

    fn name(&self) -> &'static str {
        "rational-irrational"
    }

    fn description(&self) -> &'static str {
        "-2 < tau < 0, tau rational, theta irrational; main term Theta(-z q^{chi(m)+lambda} e^{-2 pi i beta} | q)"
    }

    fn required(&self) -> &'static [Param] {
        &[Param::Lambda, Param::Beta, Param::Rho]
    }

    fn nu(&self, _: &Scaling, n: u64, q: QParam) -> u64 {
        nu_log(n, q)
    }

    fn main_term(&self, params: &CaseParams, z: Complex64, q: QParam, chi_m: u8) -> Result<Complex64> {
        theta_main(z, q, chi_m, params.lambda()?, params.beta()?.value())
    }

    /// `54 (-q^3;q)^2 Theta(|z| | sqrt q) / (1-q)^2 (|z|^nu q^{nu^2} + q^{nu^2/2}/|z|^nu + ln^2 n / n^rho)`
    fn error_bound(&self, params: &CaseParams, n: u64, z: Complex64, q: QParam) -> Result<f64> {
        let bracket = log_regime_bracket(check_z(z)?, nu_log(n, q), n, q, params.rho()?);
        Ok(theta_constant(54.0, z, q)? * bracket)
    }

    fn evaluate(&self, params: &CaseParams, n: u64, z: Complex64, q: QParam) -> Result<Evaluation> {
        let (lhs, chi_m) = floor_split(params, n, z, q)?;
        let witness = DiophantineWitness::at(n, &params.scaling.theta, params.beta()?, params.rho()?);
        Ok(Evaluation {
            lhs,
            chi_m,
            witness: Some(witness),
        })
    }

    fn indices(&self, params: &CaseParams, n_min: u64, n_max: u64) -> Result<Vec<u64>> {
        let (modulus, residue) = lattice_residue(&params.scaling.tau.neg(), params.lambda()?)?;
        let ws = witness_search(&params.scaling.theta, params.beta()?, params.rho()?, n_max)?;
        Ok(in_range(ws, n_min)
            .map(|w| w.n)
            .filter(|n| n % modulus == residue)
            .collect())
    }
}

/// `-2 < tau < 0`, `tau` irrational, `theta` rational: main term
/// `Theta(-z q^{chi(m) + beta} e^{-2 pi i lambda} | q)` along witnesses of
/// `-tau n = m + beta + a_n`.
pub struct IrrationalRational;

impl Regime for IrrationalRational {
    fn id(&self) -> u8 {
        6
    }

    fn name(&self) -> &'static str {
        "irrational-rational"
    }

    fn description(&self) -> &'static str {
        "-2 < tau < 0, tau irrational, theta rational; main term Theta(-z q^{chi(m)+beta} e^{-2 pi i lambda} | q)"
    }

    fn required(&self) -> &'static [Param] {
        &[Param::Lambda, Param::Beta, Param::Rho]
    }

    fn nu(&self, _: &Scaling, n: u64, q: QParam) -> u64 {
        nu_log(n, q)
    }

    fn main_term(&self, params: &CaseParams, z: Complex64, q: QParam, chi_m: u8) -> Result<Complex64> {
        theta_main(z, q, chi_m, params.beta()?.value(), params.lambda()?)
    }

    /// Same form as the rational-irrational bound.
    fn error_bound(&self, params: &CaseParams, n: u64, z: Complex64, q: QParam) -> Result<f64> {
        let bracket = log_regime_bracket(check_z(z)?, nu_log(n, q), n, q, params.rho()?);
        Ok(theta_constant(54.0, z, q)? * bracket)
    }

    fn evaluate(&self, params: &CaseParams, n: u64, z: Complex64, q: QParam) -> Result<Evaluation> {
        witness_split(params, n, z, q, params.beta()?)
    }

    fn indices(&self, params: &CaseParams, n_min: u64, n_max: u64) -> Result<Vec<u64>> {
        let (modulus, residue) = lattice_residue(&params.scaling.theta, params.lambda()?)?;
        let ws = witness_search(&params.scaling.tau.neg(), params.beta()?, params.rho()?, n_max)?;
        Ok(in_range(ws, n_min)
            .map(|w| w.n)
            .filter(|n| n % modulus == residue)
            .collect())
    }
}

/// `-2 < tau < 0`, both irrational: main term
/// `Theta(-z q^{chi(m) + beta1} e^{-2 pi i beta2} | q)` along simultaneous
/// witnesses.
pub struct IrrationalIrrational;

impl Regime for IrrationalIrrational {
    fn id(&self) -> u8 {
        7
    }

    fn name(&self) -> &'static str {
        "irrational-irrational"
    }

    fn description(&self) -> &'static str {
        "-2 < tau < 0, tau and theta irrational; main term Theta(-z q^{chi(m)+beta1} e^{-2 pi i beta2} | q)"
    }

    fn required(&self) -> &'static [Param] {
        &[Param::Beta1, Param::Beta2, Param::Rho]
    }

    fn nu(&self, _: &Scaling, n: u64, q: QParam) -> u64 {
        nu_log(n, q)
    }

    fn main_term(&self, params: &CaseParams, z: Complex64, q: QParam, chi_m: u8) -> Result<Complex64> {
        theta_main(z, q, chi_m, params.beta1()?.value(), params.beta2()?.value())
    }

    fn error_bound(&self, params: &CaseParams, n: u64, z: Complex64, q: QParam) -> Result<f64> {
        let bracket = log_regime_bracket(check_z(z)?, nu_log(n, q), n, q, params.rho()?);
        Ok(theta_constant(54.0, z, q)? * bracket)
    }

    fn evaluate(&self, params: &CaseParams, n: u64, z: Complex64, q: QParam) -> Result<Evaluation> {
        witness_split(params, n, z, q, params.beta1()?)
    }

    fn indices(&self, params: &CaseParams, n_min: u64, n_max: u64) -> Result<Vec<u64>> {
        let pairs = witness_search_pair(
            &params.scaling.tau.neg(),
            &params.scaling.theta,
            params.beta1()?,
            params.beta2()?,
            params.rho()?,
            n_max,
        )?;
        Ok(pairs.into_iter().map(|p| p.n).filter(|&n| n >= n_min).collect())
    }
}
