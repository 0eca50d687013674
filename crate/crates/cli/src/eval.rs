//! Named special-function evaluators behind one trait object.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use anyhow::{anyhow, bail, Result};
use num_complex::Complex64;
use serde::Serialize;
use sw_asymptotics::qcore::{qpoch_finite, qpoch_infinite};
use sw_asymptotics::qspecial::{bq, ramanujan_aq, theta_product, theta_series, ThetaArg};
use sw_asymptotics::{CertifiedValue, QParam};

/// Length of a Pochhammer product.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PochLength {
    Finite(usize),
    Infinite,
}

impl std::str::FromStr for PochLength {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "inf" | "infinity" => Ok(Self::Infinite),
            t => t
                .parse()
                .map(Self::Finite)
                .map_err(|_| anyhow!("--n expects a nonnegative integer or `inf`, got `{t}`")),
        }
    }
}

#[derive(Debug, Clone)]
pub struct EvalArgs {
    pub q: QParam,
    pub z: Option<Complex64>,
    pub a: Option<Complex64>,
    pub n: Option<PochLength>,
    pub tol: f64,
}

impl EvalArgs {
    fn z(&self, name: &str) -> Result<Complex64> {
        self.z.ok_or_else(|| anyhow!("{name} needs --z (or --z-re/--z-im)"))
    }
}

/// One JSON record on standard output.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EvalRecord {
    pub value_re: f64,
    pub value_im: f64,
    pub tail_bound: f64,
}

impl From<CertifiedValue> for EvalRecord {
    fn from(v: CertifiedValue) -> Self {
        Self {
            value_re: v.value.re,
            value_im: v.value.im,
            tail_bound: v.tail_bound,
        }
    }
}

pub trait Evaluator: Send + Sync {
    fn name(&self) -> &'static str;
    fn usage(&self) -> &'static str;
    fn eval(&self, args: &EvalArgs) -> Result<CertifiedValue>;
}

struct Aq;

impl Evaluator for Aq {
    fn name(&self) -> &'static str {
        "Aq"
    }

    fn usage(&self) -> &'static str {
        "Ramanujan A_q(z); needs --z"
    }

    fn eval(&self, args: &EvalArgs) -> Result<CertifiedValue> {
        Ok(ramanujan_aq(args.z(self.name())?, args.q, args.tol)?)
    }
}

struct Bq;

impl Evaluator for Bq {
    fn name(&self) -> &'static str {
        "Bq"
    }

    fn usage(&self) -> &'static str {
        "majorant B_q(x) for real x >= 0; needs --z with zero imaginary part"
    }

    fn eval(&self, args: &EvalArgs) -> Result<CertifiedValue> {
        let z = args.z(self.name())?;
        if z.im != 0.0 {
            bail!("Bq takes a real argument, got {z}");
        }
        Ok(bq(z.re, args.q, args.tol)?)
    }
}

struct ThetaSeries;

impl Evaluator for ThetaSeries {
    fn name(&self) -> &'static str {
        "theta_series"
    }

    fn usage(&self) -> &'static str {
        "Jacobi theta by its bilateral series; needs nonzero --z"
    }

    fn eval(&self, args: &EvalArgs) -> Result<CertifiedValue> {
        let arg = ThetaArg::new(args.z(self.name())?, args.q)?;
        Ok(theta_series(arg, args.tol)?)
    }
}

struct ThetaProduct;

impl Evaluator for ThetaProduct {
    fn name(&self) -> &'static str {
        "theta_product"
    }

    fn usage(&self) -> &'static str {
        "Jacobi theta by the triple product; needs nonzero --z"
    }

    fn eval(&self, args: &EvalArgs) -> Result<CertifiedValue> {
        let arg = ThetaArg::new(args.z(self.name())?, args.q)?;
        Ok(theta_product(arg, args.tol)?)
    }
}

struct QPoch;

impl Evaluator for QPoch {
    fn name(&self) -> &'static str {
        "qpoch"
    }

    fn usage(&self) -> &'static str {
        "(a; q)_n; needs --a and --n (integer or inf)"
    }

    fn eval(&self, args: &EvalArgs) -> Result<CertifiedValue> {
        let a = args.a.ok_or_else(|| anyhow!("qpoch needs --a"))?;
        match args.n.ok_or_else(|| anyhow!("qpoch needs --n"))? {
            PochLength::Finite(n) => Ok(CertifiedValue::exact(qpoch_finite(a, args.q, n))),
            PochLength::Infinite => Ok(qpoch_infinite(a, args.q, args.tol)?),
        }
    }
}

pub struct EvaluatorRegistry {
    by_name: BTreeMap<&'static str, Box<dyn Evaluator>>,
}

impl EvaluatorRegistry {
    pub fn new() -> Self {
        Self { by_name: BTreeMap::new() }
    }

    pub fn register(&mut self, e: Box<dyn Evaluator>) -> Result<()> {
        let name = e.name();
        if self.by_name.insert(name, e).is_some() {
            bail!("evaluator `{name}` registered twice");
        }
        Ok(())
    }

    pub fn standard() -> &'static EvaluatorRegistry {
        static REGISTRY: OnceLock<EvaluatorRegistry> = OnceLock::new();
        REGISTRY.get_or_init(|| {
            let mut r = EvaluatorRegistry::new();
            let all: [Box<dyn Evaluator>; 5] = [
                Box::new(Aq),
                Box::new(Bq),
                Box::new(ThetaSeries),
                Box::new(ThetaProduct),
                Box::new(QPoch),
            ];
            for e in all {
                r.register(e).expect("built-in names are distinct");
            }
            r
        })
    }

    pub fn get(&self, name: &str) -> Result<&dyn Evaluator> {
        self.by_name.get(name).map(|b| b.as_ref()).ok_or_else(|| {
            let known: Vec<_> = self.by_name.keys().copied().collect();
            anyhow!("unknown function `{name}`; expected one of {}", known.join(", "))
        })
    }

    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.by_name.keys().copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = &dyn Evaluator> {
        self.by_name.values().map(|b| b.as_ref())
    }
}

impl Default for EvaluatorRegistry {
    fn default() -> Self {
        Self::new()
    }
}
