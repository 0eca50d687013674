//! Stieltjes-Wigert polynomials under complex Plancherel-Rotach scaling.
//!
//! The crate is layered bottom-up:
//!
//! - [`qcore`]: q-Pochhammer products with certified truncation and the
//!   tail remainders `R1`, `R2` of `(aq^n; q)_inf`.
//! - [`qspecial`]: Ramanujan's entire function `A_q`, its majorant `B_q`,
//!   and the Jacobi theta function (series and triple product).
//! - [`scaling`]: exact-rational / irrational tagged scalars and the
//!   `(tau, theta)` decomposition of the complex scaling parameter.
//! - [`swpoly`]: the polynomial itself in raw, normalized and
//!   theta-centered split-sum forms.
//! - [`diophantine`]: fractional parts, rational lattices, continued
//!   fractions and approximation witnesses.
//! - [`asymptotics`]: the seven scaling regimes as interchangeable
//!   strategies behind [`asymptotics::Regime`], plus the verifier.

pub mod asymptotics;
pub mod diophantine;
pub mod error;
pub mod qcore;
pub mod qspecial;
pub mod scaling;
pub mod swpoly;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use qcore::{CertifiedValue, QParam};
pub use scaling::{Scalar, Scaling};
