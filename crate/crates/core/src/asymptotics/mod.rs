//! The seven scaling regimes as executable statements: classification,
//! main terms, `nu_n` schedules, explicit error bounds, and rows comparing
//! the exact normalized polynomial against its main term.
//!
//! Each regime is a [`Regime`] implementation held by a [`RegimeRegistry`];
//! the free functions here dispatch through the standard registry.

mod regimes;
mod registry;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::diophantine::DiophantineWitness;
use crate::error::{Error, Result};
use crate::qcore::QParam;
use crate::scaling::{Scalar, Scaling};

pub use regimes::{
    IrrationalIrrational, IrrationalLine, IrrationalRational, RationalIrrational, RationalLine,
    RationalRational, TauPositive,
};
pub use registry::RegimeRegistry;

/// Tolerance used for every constant entering a bound.
pub const CONSTANT_TOL: f64 = 1e-13;

/// Optional parameters a regime may require.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Param {
    Lambda,
    Lambda1,
    Beta,
    Beta1,
    Beta2,
    Rho,
}

impl Param {
    pub const ALL: [Param; 6] = [
        Param::Lambda,
        Param::Lambda1,
        Param::Beta,
        Param::Beta1,
        Param::Beta2,
        Param::Rho,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Param::Lambda => "lambda",
            Param::Lambda1 => "lambda1",
            Param::Beta => "beta",
            Param::Beta1 => "beta1",
            Param::Beta2 => "beta2",
            Param::Rho => "rho",
        }
    }
}

/// Scaling plus the fractional targets and approximation quality of one
/// regime.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseParams {
    pub case_id: u8,
    pub scaling: Scaling,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda1: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<Scalar>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta1: Option<Scalar>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta2: Option<Scalar>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho: Option<f64>,
}

impl CaseParams {
    pub fn new(case_id: u8, scaling: Scaling) -> Self {
        Self {
            case_id,
            scaling,
            lambda: None,
            lambda1: None,
            beta: None,
            beta1: None,
            beta2: None,
            rho: None,
        }
    }

    pub fn with_lambda(mut self, v: f64) -> Self {
        self.lambda = Some(v);
        self
    }

    pub fn with_lambda1(mut self, v: f64) -> Self {
        self.lambda1 = Some(v);
        self
    }

    pub fn with_beta(mut self, v: Scalar) -> Self {
        self.beta = Some(v);
        self
    }

    pub fn with_betas(mut self, b1: Scalar, b2: Scalar) -> Self {
        self.beta1 = Some(b1);
        self.beta2 = Some(b2);
        self
    }

    pub fn with_rho(mut self, v: f64) -> Self {
        self.rho = Some(v);
        self
    }

    fn is_set(&self, p: Param) -> bool {
        match p {
            Param::Lambda => self.lambda.is_some(),
            Param::Lambda1 => self.lambda1.is_some(),
            Param::Beta => self.beta.is_some(),
            Param::Beta1 => self.beta1.is_some(),
            Param::Beta2 => self.beta2.is_some(),
            Param::Rho => self.rho.is_some(),
        }
    }

    fn missing(&self, p: Param) -> Error {
        Error::MissingParam(p.name(), self.case_id)
    }

    pub fn lambda(&self) -> Result<f64> {
        self.lambda.ok_or_else(|| self.missing(Param::Lambda))
    }

    pub fn lambda1(&self) -> Result<f64> {
        self.lambda1.ok_or_else(|| self.missing(Param::Lambda1))
    }

    pub fn beta(&self) -> Result<&Scalar> {
        self.beta.as_ref().ok_or_else(|| self.missing(Param::Beta))
    }

    pub fn beta1(&self) -> Result<&Scalar> {
        self.beta1.as_ref().ok_or_else(|| self.missing(Param::Beta1))
    }

    pub fn beta2(&self) -> Result<&Scalar> {
        self.beta2.as_ref().ok_or_else(|| self.missing(Param::Beta2))
    }

    pub fn rho(&self) -> Result<f64> {
        self.rho.ok_or_else(|| self.missing(Param::Rho))
    }

    /// Checks that the declared case matches the scaling, that exactly the
    /// regime's parameters are present, and that targets lie in `[0, 1)`.
    pub fn validate(&self) -> Result<&'static dyn Regime> {
        let actual = classify_case(&self.scaling)?;
        if actual != self.case_id {
            return Err(Error::InvalidArgument(format!(
                "scaling tau = {}, theta = {} belongs to case {actual}, not case {}",
                self.scaling.tau, self.scaling.theta, self.case_id
            )));
        }
        let regime = RegimeRegistry::standard().get(self.case_id)?;
        for p in Param::ALL {
            let needed = regime.required().contains(&p);
            if needed && !self.is_set(p) {
                return Err(self.missing(p));
            }
            if !needed && self.is_set(p) {
                return Err(Error::InvalidArgument(format!(
                    "parameter `{}` does not apply to case {}",
                    p.name(),
                    self.case_id
                )));
            }
        }
        let fractions = [self.lambda, self.lambda1]
            .into_iter()
            .flatten()
            .chain([&self.beta, &self.beta1, &self.beta2].into_iter().flatten().map(Scalar::value));
        for v in fractions {
            if !(0.0..1.0).contains(&v) {
                return Err(Error::InvalidArgument(format!(
                    "fractional target {v} outside [0, 1)"
                )));
            }
        }
        if let Some(rho) = self.rho {
            if !(rho > 0.0 && rho.is_finite()) {
                return Err(Error::InvalidArgument(format!("rho must be positive, got {rho}")));
            }
        }
        Ok(regime)
    }
}

/// Exact side of a row before it is compared with the main term.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluation {
    pub lhs: Complex64,
    /// `chi(m)` for the theta regimes, zero otherwise.
    pub chi_m: u8,
    pub witness: Option<DiophantineWitness>,
}

/// One regime in the classification by `(tau, theta)`.
pub trait Regime: Send + Sync {
    fn id(&self) -> u8;

    /// Registry key.
    fn name(&self) -> &'static str;

    fn description(&self) -> &'static str;

    fn required(&self) -> &'static [Param];

    fn nu(&self, _scaling: &Scaling, _n: u64, _q: QParam) -> u64 {
        0
    }

    /// Asymptotic main term; `chi_m` is ignored outside the theta regimes.
    fn main_term(&self, params: &CaseParams, z: Complex64, q: QParam, chi_m: u8) -> Result<Complex64>;

    fn error_bound(&self, params: &CaseParams, n: u64, z: Complex64, q: QParam) -> Result<f64>;

    /// The normalized exact value at degree `n`.
    fn evaluate(&self, params: &CaseParams, n: u64, z: Complex64, q: QParam) -> Result<Evaluation>;

    /// Admissible degrees in `[n_min, n_max]`.
    fn indices(&self, params: &CaseParams, n_min: u64, n_max: u64) -> Result<Vec<u64>>;
}

/// Regime number from the rationality tags and the sign of `tau`.
pub fn classify_case(scaling: &Scaling) -> Result<u8> {
    let theta_rational = scaling.theta.is_rational();
    let unsupported = || {
        Error::UnsupportedScaling(format!(
            "tau = {} is outside (-2, inf)",
            scaling.tau
        ))
    };
    match scaling.tau.as_rational() {
        Some(r) => {
            let two = num_rational::Rational64::from_integer(2);
            if r > num_rational::Rational64::from_integer(0) {
                Ok(1)
            } else if *r.numer() == 0 {
                Ok(if theta_rational { 2 } else { 3 })
            } else if r > -two {
                Ok(if theta_rational { 4 } else { 5 })
            } else {
                Err(unsupported())
            }
        }
        None => {
            let t = scaling.tau.value();
            if t > 0.0 {
                Ok(1)
            } else if t == 0.0 {
                Err(Error::UnsupportedScaling(
                    "tau = 0 must be given as an exact rational".into(),
                ))
            } else if t > -2.0 {
                Ok(if theta_rational { 6 } else { 7 })
            } else {
                Err(unsupported())
            }
        }
    }
}

/// `nu_n` for the regime; zero where the bound does not use it.
pub fn nu_n(case_id: u8, scaling: &Scaling, n: u64, q: QParam) -> Result<u64> {
    Ok(RegimeRegistry::standard().get(case_id)?.nu(scaling, n, q))
}

pub fn main_term(params: &CaseParams, z: Complex64, q: QParam, chi_m: u8) -> Result<Complex64> {
    RegimeRegistry::standard()
        .get(params.case_id)?
        .main_term(params, z, q, chi_m)
}

pub fn error_bound(params: &CaseParams, n: u64, z: Complex64, q: QParam) -> Result<f64> {
    RegimeRegistry::standard()
        .get(params.case_id)?
        .error_bound(params, n, z, q)
}

pub fn admissible_indices(params: &CaseParams, n_min: u64, n_max: u64) -> Result<Vec<u64>> {
    let regime = params.validate()?;
    if n_min == 0 || n_max < n_min {
        return Err(Error::InvalidArgument(format!(
            "index range [{n_min}, {n_max}] is empty or starts at zero"
        )));
    }
    regime.indices(params, n_min, n_max)
}

/// One exact-versus-asymptotic comparison.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseVerificationRow {
    pub case_id: u8,
    pub n: u64,
    pub lhs: Complex64,
    pub main: Complex64,
    pub abs_err: f64,
    pub bound: f64,
    pub within: bool,
    pub nu_n: u64,
    pub witness: Option<DiophantineWitness>,
}

pub fn verify_row(
    regime: &dyn Regime,
    params: &CaseParams,
    z: Complex64,
    q: QParam,
    n: u64,
) -> Result<CaseVerificationRow> {
    if n == 0 {
        return Err(Error::InvalidArgument("degree must be positive".into()));
    }
    let eval = regime.evaluate(params, n, z, q)?;
    let main = regime.main_term(params, z, q, eval.chi_m)?;
    let abs_err = (eval.lhs - main).norm();
    let bound = regime.error_bound(params, n, z, q)?;
    Ok(CaseVerificationRow {
        case_id: regime.id(),
        n,
        lhs: eval.lhs,
        main,
        abs_err,
        bound,
        within: abs_err <= bound,
        nu_n: regime.nu(&params.scaling, n, q),
        witness: eval.witness,
    })
}

/// Rows for the given degrees, in the order supplied.
pub fn verify(
    params: &CaseParams,
    z: Complex64,
    q: QParam,
    n_candidates: &[u64],
) -> Result<Vec<CaseVerificationRow>> {
    let regime = params.validate()?;
    if n_candidates.is_empty() {
        return Err(Error::EmptyCandidates);
    }
    if z.norm() == 0.0 {
        return Err(Error::ZeroArgument);
    }
    n_candidates
        .iter()
        .map(|&n| verify_row(regime, params, z, q, n))
        .collect()
}

/// Aggregate of a sweep: the first degree from which every later row is
/// within its bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationSummary {
    pub case: u8,
    pub params: CaseParams,
    pub n_min_within: Option<u64>,
    /// Largest error among the rows from `n_min_within` on, or the error of
    /// the last row when no such threshold exists.
    pub max_err_at_tail: f64,
    pub all_within_after_n_min: bool,
}

impl VerificationSummary {
    /// `rows` must be sorted by `n`.
    pub fn from_rows(params: &CaseParams, rows: &[CaseVerificationRow]) -> Self {
        let tail_start = rows
            .iter()
            .rposition(|r| !r.within)
            .map_or(0, |i| i + 1);
        let n_min_within = rows.get(tail_start).map(|r| r.n);
        let max_err_at_tail = if n_min_within.is_some() {
            rows[tail_start..]
                .iter()
                .map(|r| r.abs_err)
                .fold(0.0, f64::max)
        } else {
            rows.last().map_or(f64::NAN, |r| r.abs_err)
        };
        Self {
            case: params.case_id,
            params: params.clone(),
            n_min_within,
            max_err_at_tail,
            all_within_after_n_min: n_min_within.is_some(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sc(tau: &str, theta: &str) -> Scaling {
        Scaling::new(tau.parse().unwrap(), theta.parse().unwrap())
    }

    #[test]
    fn classification() {
        assert_eq!(classify_case(&sc("1/2", "sqrt2")).unwrap(), 1);
        assert_eq!(classify_case(&sc("0", "1/3")).unwrap(), 2);
        assert_eq!(classify_case(&sc("0", "sqrt2-1")).unwrap(), 3);
        assert_eq!(classify_case(&sc("-1/2", "1/4")).unwrap(), 4);
        assert_eq!(classify_case(&sc("-1/2", "sqrt2-1")).unwrap(), 5);
        assert_eq!(classify_case(&sc("1-sqrt3", "1/2")).unwrap(), 6);
        assert_eq!(classify_case(&sc("1-sqrt2", "sqrt3-1")).unwrap(), 7);
        assert!(matches!(
            classify_case(&sc("-5/2", "0")),
            Err(Error::UnsupportedScaling(_))
        ));
        assert!(matches!(
            classify_case(&sc("-2", "0")),
            Err(Error::UnsupportedScaling(_))
        ));
        assert!(matches!(
            classify_case(&sc("~0", "0")),
            Err(Error::UnsupportedScaling(_))
        ));
    }

    #[test]
    fn validation() {
        let p = CaseParams::new(2, sc("0", "1/3"));
        assert_eq!(p.validate().err(), Some(Error::MissingParam("lambda", 2)));
        let p = p.with_lambda(1.0 / 3.0);
        assert!(p.validate().is_ok());
        assert!(p.clone().with_rho(0.5).validate().is_err());
        let p = CaseParams::new(3, sc("0", "1/3")).with_rho(1.0);
        assert!(p.validate().is_err());
        let p = CaseParams::new(4, sc("-1/2", "1/4"))
            .with_lambda(1.5)
            .with_lambda1(0.25);
        assert!(p.validate().is_err());
    }

    #[test]
    fn summary_threshold() {
        let params = CaseParams::new(1, sc("1", "0"));
        let row = |n, within, abs_err| CaseVerificationRow {
            case_id: 1,
            n,
            lhs: Complex64::new(0.0, 0.0),
            main: Complex64::new(0.0, 0.0),
            abs_err,
            bound: 0.0,
            within,
            nu_n: 0,
            witness: None,
        };
        let rows = vec![row(1, true, 5.0), row(2, false, 4.0), row(3, true, 2.0), row(4, true, 1.0)];
        let s = VerificationSummary::from_rows(&params, &rows);
        assert_eq!(s.n_min_within, Some(3));
        assert_eq!(s.max_err_at_tail, 2.0);
        assert!(s.all_within_after_n_min);
        let rows = vec![row(1, true, 5.0), row(2, false, 4.0)];
        let s = VerificationSummary::from_rows(&params, &rows);
        assert_eq!(s.n_min_within, None);
        assert_eq!(s.max_err_at_tail, 4.0);
        assert!(!s.all_within_after_n_min);
    }
}
