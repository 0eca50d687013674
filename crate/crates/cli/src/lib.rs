//! Plumbing behind the `swasym` binary: special-function evaluators,
//! sweep configuration and deterministic reports.

pub mod config;
pub mod eval;
pub mod report;

pub use config::{canonical, canonical_all, Format, SweepConfig};
pub use eval::{EvalArgs, EvalRecord, Evaluator, EvaluatorRegistry, PochLength};
pub use report::{run_sweep, write_report, SweepReport};

use anyhow::{anyhow, Result};
use num_complex::Complex64;

/// Accepts `2`, `-0.5`, `1+0.5i`, `i`, `3e-2-1e-1i`.
pub fn parse_complex(s: &str) -> Result<Complex64> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let z: Complex64 = t.parse().map_err(|_| anyhow!("not a complex number: `{s}`"))?;
    if !z.is_finite() {
        return Err(anyhow!("complex argument must be finite: `{s}`"));
    }
    Ok(z)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_forms() {
        assert_eq!(parse_complex("2").unwrap(), Complex64::new(2.0, 0.0));
        assert_eq!(parse_complex("1+0.5i").unwrap(), Complex64::new(1.0, 0.5));
        assert_eq!(parse_complex("-i").unwrap(), Complex64::new(0.0, -1.0));
        assert_eq!(parse_complex("1e-3 - 2i").unwrap(), Complex64::new(1e-3, -2.0));
        assert!(parse_complex("1+").is_err());
        assert!(parse_complex("inf").is_err());
    }
}
