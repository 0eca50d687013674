//! Sweep configuration, as read from JSON or assembled from flags.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use sw_asymptotics::asymptotics::{admissible_indices, CaseParams, CONSTANT_TOL};
use sw_asymptotics::{QParam, Scalar, Scaling};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

fn default_tol() -> f64 {
    CONSTANT_TOL
}

fn default_jobs() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub case_id: u8,
    pub q: f64,
    pub z_re: f64,
    #[serde(default)]
    pub z_im: f64,
    pub tau: Scalar,
    pub theta: Scalar,
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
    pub n_min: u64,
    pub n_max: u64,
    /// Plain stride over `[n_min, n_max]`; when absent the regime's own
    /// admissible indices are used.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_step: Option<u64>,
    /// Explicit degrees; overrides both of the above.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub candidates: Option<Vec<u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub format: Format,
    /// Tolerance of the certified constants inside the bounds.
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_jobs")]
    pub jobs: usize,
}

impl SweepConfig {
    pub fn new(case_id: u8, q: f64, z: Complex64, tau: Scalar, theta: Scalar, n_min: u64, n_max: u64) -> Self {
        Self {
            case_id,
            q,
            z_re: z.re,
            z_im: z.im,
            tau,
            theta,
            lambda: None,
            lambda1: None,
            beta: None,
            beta1: None,
            beta2: None,
            rho: None,
            n_min,
            n_max,
            n_step: None,
            candidates: None,
            out: None,
            format: Format::Csv,
            tol: CONSTANT_TOL,
            jobs: 1,
        }
    }

    pub fn from_json_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }

    pub fn z(&self) -> Complex64 {
        Complex64::new(self.z_re, self.z_im)
    }

    pub fn qparam(&self) -> Result<QParam> {
        Ok(QParam::new(self.q)?)
    }

    pub fn params(&self) -> CaseParams {
        CaseParams {
            case_id: self.case_id,
            scaling: Scaling::new(self.tau.clone(), self.theta.clone()),
            lambda: self.lambda,
            lambda1: self.lambda1,
            beta: self.beta.clone(),
            beta1: self.beta1.clone(),
            beta2: self.beta2.clone(),
            rho: self.rho,
        }
    }

    pub fn check(&self) -> Result<()> {
        self.qparam()?;
        if self.n_min == 0 {
            bail!("n_min must be at least 1");
        }
        if self.n_max < self.n_min {
            bail!("n_max = {} is below n_min = {}", self.n_max, self.n_min);
        }
        if self.n_step == Some(0) {
            bail!("n_step must be positive");
        }
        if !(self.tol >= CONSTANT_TOL && self.tol < 1.0) {
            bail!("tol must lie in [{CONSTANT_TOL:e}, 1); constants are certified to {CONSTANT_TOL:e}");
        }
        if self.jobs == 0 {
            bail!("jobs must be at least 1");
        }
        if !self.z().is_finite() || self.z() == Complex64::new(0.0, 0.0) {
            bail!("z must be finite and nonzero");
        }
        self.params().validate()?;
        Ok(())
    }

    /// Degrees to sweep, sorted and deduplicated.
    pub fn candidates(&self) -> Result<Vec<u64>> {
        let mut ns = if let Some(c) = &self.candidates {
            if c.contains(&0) {
                bail!("candidate degrees must be positive");
            }
            c.clone()
        } else if let Some(step) = self.n_step {
            (self.n_min..=self.n_max).step_by(step as usize).collect()
        } else {
            admissible_indices(&self.params(), self.n_min, self.n_max)?
        };
        ns.sort_unstable();
        ns.dedup();
        Ok(ns)
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

    pub fn with_step(mut self, step: u64) -> Self {
        self.n_step = Some(step);
        self
    }
}

fn scalar(text: &str) -> Scalar {
    text.parse().expect("canonical scalars parse")
}

/// The reference sweep of each regime at `q = 1/2`.
pub fn canonical(case_id: u8) -> Option<SweepConfig> {
    let unit = Complex64::new(1.0, 0.0);
    let skew = Complex64::new(1.0, 0.5);
    let two = Complex64::new(2.0, 0.0);
    let zero = scalar("0");
    let cfg = match case_id {
        1 => SweepConfig::new(1, 0.5, unit, scalar("1"), scalar("3/10"), 5, 40).with_step(1),
        2 => SweepConfig::new(2, 0.5, two, scalar("0"), scalar("1/3"), 1, 61).with_lambda(1.0 / 3.0),
        3 => SweepConfig::new(3, 0.5, two, scalar("0"), scalar("sqrt2-1"), 1, 100_000)
            .with_beta(zero)
            .with_rho(0.9),
        4 => SweepConfig::new(4, 0.5, skew, scalar("-1/2"), scalar("1/4"), 1, 201)
            .with_lambda(0.5)
            .with_lambda1(0.25),
        5 => SweepConfig::new(5, 0.5, skew, scalar("-1/2"), scalar("sqrt2-1"), 1, 100_000)
            .with_lambda(0.0)
            .with_beta(zero)
            .with_rho(0.9),
        6 => SweepConfig::new(6, 0.5, skew, scalar("1-sqrt3"), scalar("1/2"), 1, 100_000)
            .with_lambda(0.5)
            .with_beta(zero)
            .with_rho(0.9),
        7 => SweepConfig::new(7, 0.5, skew, scalar("1-sqrt2"), scalar("sqrt3-1"), 1, 100_000)
            .with_betas(zero.clone(), zero)
            .with_rho(0.3),
        _ => return None,
    };
    Some(cfg)
}

pub fn canonical_all() -> Vec<SweepConfig> {
    (1..=7).filter_map(canonical).collect()
}
