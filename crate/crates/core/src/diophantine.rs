//! Fractional parts, rational lattices, continued fractions and
//! approximation witnesses.
//!
//! A witness at quality `rho` for `(theta, beta)` is an index `n >= 1` with
//! `n theta = m + beta + r` and `|r| < n^-rho`. Witness sequences are the
//! admissible index sets along which the irrational scaling regimes are
//! verified.

use num_integer::Integer;
use num_rational::Rational64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scaling::Scalar;

/// Integer and fractional part of a real, `x = floor + frac`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FracPart {
    pub floor: i64,
    /// In `[0, 1)`.
    pub frac: f64,
    /// `frac = rem / den` exactly, when the input was an exact rational.
    pub exact: Option<(i128, i128)>,
}

/// Largest double below one.
const BELOW_ONE: f64 = 1.0 - f64::EPSILON / 2.0;

/// `x = [x] + {x}` with the floor convention, so `{x}` is in `[0, 1)` for
/// negative inputs as well.
pub fn frac_split(x: f64) -> (i64, f64) {
    let fl = x.floor();
    let mut frac = x - fl;
    if frac >= 1.0 {
        frac = BELOW_ONE;
    }
    (fl as i64, frac)
}

/// `{n x}` from the exact product `n x = hi + lo` (fused multiply-add), so
/// the fractional part keeps full precision even when `n x` is large.
pub fn frac_of_product(n: i64, x: f64) -> FracPart {
    let nf = n as f64;
    let hi = nf * x;
    let lo = nf.mul_add(x, -hi);
    let fl = hi.floor();
    let mut floor = fl as i64;
    let mut frac = (hi - fl) + lo;
    if frac < 0.0 {
        frac += 1.0;
        floor -= 1;
    } else if frac >= 1.0 {
        frac -= 1.0;
        floor += 1;
    }
    if frac >= 1.0 {
        frac = BELOW_ONE;
    }
    FracPart {
        floor,
        frac,
        exact: None,
    }
}

/// The principal character modulo 2: `n - 2 floor(n/2)`.
pub fn chi(n: i64) -> u8 {
    n.rem_euclid(2) as u8
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatticeClass {
    /// Residue of `n` modulo the denominator.
    pub residue: u64,
    /// `{n theta}` for every `n` in the class, over the lattice denominator.
    pub lambda: (i64, i64),
}

impl LatticeClass {
    pub fn lambda_value(&self) -> f64 {
        self.lambda.0 as f64 / self.lambda.1 as f64
    }
}

/// `S(p/r) = {{n p/r} : n >= 1}`, one class per residue of `n` mod `r`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RationalLattice {
    pub theta: (i64, i64),
    pub classes: Vec<LatticeClass>,
}

impl RationalLattice {
    pub fn modulus(&self) -> u64 {
        self.theta.1 as u64
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn values(&self) -> Vec<f64> {
        self.classes.iter().map(LatticeClass::lambda_value).collect()
    }

    pub fn class_of(&self, n: u64) -> &LatticeClass {
        &self.classes[(n % self.modulus()) as usize]
    }

    /// Residue class attaining `lambda`, if `lambda` lies in the lattice.
    pub fn residue_of(&self, lambda: f64) -> Option<u64> {
        let r = self.modulus() as f64;
        let j = (lambda * r).round();
        if (lambda * r - j).abs() > 1e-9 {
            return None;
        }
        let j = (j as i64).rem_euclid(self.theta.1);
        self.classes
            .iter()
            .find(|c| c.lambda.0 == j)
            .map(|c| c.residue)
    }
}

pub fn lattice_of_rational(theta: &Scalar) -> Result<RationalLattice> {
    let r = theta
        .as_rational()
        .ok_or_else(|| Error::NotRational(theta.to_string()))?;
    let (p, den) = (*r.numer(), *r.denom());
    let classes = (0..den)
        .map(|res| {
            let num = (res as i128 * p as i128).rem_euclid(den as i128) as i64;
            LatticeClass {
                residue: res as u64,
                lambda: (num, den),
            }
        })
        .collect();
    Ok(RationalLattice {
        theta: (p, den),
        classes,
    })
}

/// Exact `num / den` for a double whose binary exponent is in range.
fn exact_ratio(x: f64) -> Option<(i128, i128)> {
    if !x.is_finite() {
        return None;
    }
    if x == 0.0 {
        return Some((0, 1));
    }
    let bits = x.to_bits();
    let sign = if bits >> 63 == 1 { -1i128 } else { 1 };
    let exp_bits = ((bits >> 52) & 0x7ff) as i32;
    let frac_bits = bits & ((1u64 << 52) - 1);
    let (mant, exp) = if exp_bits == 0 {
        (frac_bits, -1074)
    } else {
        (frac_bits | (1u64 << 52), exp_bits - 1075)
    };
    let tz = mant.trailing_zeros() as i32;
    let (mant, exp) = (mant >> tz, exp + tz);
    if exp >= 0 {
        if exp > 60 {
            return None;
        }
        return Some((sign * ((mant as i128) << exp), 1));
    }
    if -exp > 120 {
        return None;
    }
    Some((sign * mant as i128, 1i128 << (-exp)))
}

/// Partial quotients with their convergents `(a_k, p_k, q_k)`, stopping
/// after `count` terms, on termination, or once `q_k` exceeds `q_limit`.
fn expansion(x: f64, count: usize, q_limit: i128) -> Vec<(i128, i128, i128)> {
    let mut out = Vec::new();
    let (mut p_prev, mut q_prev) = (1i128, 0i128);
    let (mut p_prev2, mut q_prev2) = (0i128, 1i128);
    let mut push = |a: i128, out: &mut Vec<(i128, i128, i128)>| -> bool {
        let p = a.checked_mul(p_prev).and_then(|v| v.checked_add(p_prev2));
        let q = a.checked_mul(q_prev).and_then(|v| v.checked_add(q_prev2));
        match (p, q) {
            (Some(p), Some(q)) if p.abs() <= i64::MAX as i128 && q <= i64::MAX as i128 => {
                out.push((a, p, q));
                p_prev2 = p_prev;
                q_prev2 = q_prev;
                p_prev = p;
                q_prev = q;
                q <= q_limit
            }
            _ => false,
        }
    };
    if let Some((mut num, mut den)) = exact_ratio(x) {
        while out.len() < count {
            let a = num.div_euclid(den);
            if !push(a, &mut out) {
                break;
            }
            let rem = num - a * den;
            if rem == 0 {
                break;
            }
            num = den;
            den = rem;
        }
    } else {
        let mut y = x;
        while out.len() < count {
            let a = y.floor();
            if !push(a as i128, &mut out) {
                break;
            }
            let f = y - a;
            if f < 1e-15 {
                break;
            }
            y = 1.0 / f;
        }
    }
    out
}

/// Continued-fraction convergents `(p, q)` of `x`, at most `count` of them.
///
/// The expansion is carried out exactly on the rational value of the double
/// when its exponent allows, so it terminates for dyadic inputs.
pub fn cf_convergents(x: f64, count: usize) -> Vec<(i64, u64)> {
    expansion(x, count, i128::MAX)
        .into_iter()
        .map(|(_, p, q)| (p as i64, q as u64))
        .collect()
}

/// `n theta = m + beta + residual` at quality `rho`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiophantineWitness {
    pub n: u64,
    pub m: i64,
    pub residual: f64,
    pub beta: f64,
    pub rho: f64,
}

impl DiophantineWitness {
    /// Decomposition at `n` with `m` the nearest integer; admissibility is
    /// not checked here.
    pub fn at(n: u64, theta: &Scalar, beta: &Scalar, rho: f64) -> Self {
        let (m, residual) = signed_residual(n, theta, beta);
        Self {
            n,
            m,
            residual,
            beta: beta.value(),
            rho,
        }
    }

    pub fn is_admissible(&self) -> bool {
        admissible(self.n, self.residual, self.rho)
    }
}

fn admissible(n: u64, residual: f64, rho: f64) -> bool {
    residual.abs() < (n as f64).powf(-rho)
}

/// Nearest integer `m` and signed residual `n theta - m - beta`.
pub fn signed_residual(n: u64, theta: &Scalar, beta: &Scalar) -> (i64, f64) {
    if let (Some(t), Some(b)) = (theta.as_rational(), beta.as_rational()) {
        let x: num_rational::Ratio<i128> = num_rational::Ratio::new(
            n as i128 * *t.numer() as i128,
            *t.denom() as i128,
        ) - num_rational::Ratio::new(*b.numer() as i128, *b.denom() as i128);
        let (num, den) = (*x.numer(), *x.denom());
        let m = (2 * num + den).div_euclid(2 * den);
        let rem = num - m * den;
        return (m as i64, rem as f64 / den as f64);
    }
    let part = match theta {
        Scalar::Rational(_) => theta.frac_of_multiple(n as i64),
        Scalar::Irrational { value, .. } => frac_of_product(n as i64, *value),
    };
    let r = part.frac - beta.value();
    let k = r.round();
    (part.floor + k as i64, r - k)
}

fn validate_search(rho: f64, n_max: u64) -> Result<()> {
    if n_max == 0 {
        return Err(Error::InvalidArgument("n_max must be >= 1".into()));
    }
    if !(rho > 0.0 && rho.is_finite()) {
        return Err(Error::InvalidArgument(format!("rho must be positive, got {rho}")));
    }
    Ok(())
}

/// Exhaustive scan over `1..=n_max`.
pub fn witness_scan(theta: &Scalar, beta: &Scalar, rho: f64, n_max: u64) -> Vec<DiophantineWitness> {
    (1..=n_max)
        .map(|n| DiophantineWitness::at(n, theta, beta, rho))
        .filter(DiophantineWitness::is_admissible)
        .collect()
}

/// Homogeneous witnesses (`beta = 0`, `rho >= 1`) from the continued
/// fraction of `theta`.
///
/// If `|n theta - m| < 1/n` and `p/q` is `m/n` in lowest terms, then
/// `|theta - p/q| < 1/q^2`, which forces `p/q` to be a convergent or an
/// intermediate fraction. Candidates are therefore all convergent and
/// intermediate denominators and those of their multiples that can still
/// satisfy the inequality. Returns `None` when the
/// preconditions fail or the candidate set is not smaller than a scan.
pub fn witness_cf(theta: &Scalar, rho: f64, n_max: u64) -> Option<Vec<DiophantineWitness>> {
    if rho < 1.0 || theta.is_rational() {
        return None;
    }
    let terms = expansion(theta.value(), usize::MAX, n_max as i128);
    let mut bases = vec![1u64];
    let (mut q_prev, mut q_prev2) = (0i128, 1i128);
    for &(a, _, q) in &terms {
        for j in 1..a.min(n_max as i128 + 1) {
            let mid = q_prev2 + j * q_prev;
            if mid > n_max as i128 {
                break;
            }
            bases.push(mid as u64);
        }
        if q <= n_max as i128 {
            bases.push(q as u64);
        }
        q_prev2 = q_prev;
        q_prev = q;
    }
    let mut candidates: Vec<u64> = Vec::new();
    for &b in &bases {
        if b == 0 {
            continue;
        }
        // n = d b with |d (b theta - p)| < 1/(d b) forces d^2 b ||b theta|| < 1
        let part = frac_of_product(b as i64, theta.value());
        let dist = part.frac.min(1.0 - part.frac);
        let d_cap = if dist > 0.0 {
            (1.0 / (b as f64 * dist).sqrt()).floor() as u64 + 1
        } else {
            u64::MAX
        };
        candidates.extend((1..=(n_max / b).min(d_cap)).map(|d| d * b));
        if candidates.len() as u64 > n_max {
            return None;
        }
    }
    candidates.sort_unstable();
    candidates.dedup();
    let zero = Scalar::integer(0);
    Some(
        candidates
            .into_iter()
            .map(|n| DiophantineWitness::at(n, theta, &zero, rho))
            .filter(DiophantineWitness::is_admissible)
            .collect(),
    )
}

/// All `n <= n_max` with `|n theta - m - beta| < n^-rho`, sorted by `n`.
pub fn witness_search(
    theta: &Scalar,
    beta: &Scalar,
    rho: f64,
    n_max: u64,
) -> Result<Vec<DiophantineWitness>> {
    validate_search(rho, n_max)?;
    if beta.is_exact_zero() {
        if let Some(found) = witness_cf(theta, rho, n_max) {
            return Ok(found);
        }
    }
    Ok(witness_scan(theta, beta, rho, n_max))
}

/// Simultaneous witness for two targets at a shared index.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairedWitness {
    pub n: u64,
    pub m: i64,
    pub m1: i64,
    /// `n theta1 - m - beta1`
    pub a_n: f64,
    /// `n theta2 - m1 - beta2`
    pub b_n: f64,
}

pub fn witness_search_pair(
    theta1: &Scalar,
    theta2: &Scalar,
    beta1: &Scalar,
    beta2: &Scalar,
    rho: f64,
    n_max: u64,
) -> Result<Vec<PairedWitness>> {
    validate_search(rho, n_max)?;
    Ok((1..=n_max)
        .filter_map(|n| {
            let (m, a_n) = signed_residual(n, theta1, beta1);
            if !admissible(n, a_n, rho) {
                return None;
            }
            let (m1, b_n) = signed_residual(n, theta2, beta2);
            admissible(n, b_n, rho).then_some(PairedWitness { n, m, m1, a_n, b_n })
        })
        .collect())
}

/// The arithmetic progression `n = residue (mod modulus)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Progression {
    pub modulus: u64,
    pub residue: u64,
}

impl Progression {
    pub fn contains(&self, n: u64) -> bool {
        n % self.modulus == self.residue
    }

    /// Members in `[max(lo, 1), hi]`.
    pub fn members(&self, lo: u64, hi: u64) -> Vec<u64> {
        let lo = lo.max(1);
        let first = if lo % self.modulus <= self.residue {
            lo - lo % self.modulus + self.residue
        } else {
            lo - lo % self.modulus + self.modulus + self.residue
        };
        let first = if first == 0 { self.modulus } else { first };
        (0..)
            .map(|k| first + k * self.modulus)
            .take_while(|&n| n <= hi)
            .collect()
    }
}

/// Residue condition `n x = j/r (mod 1)` for `x = p/r`, as `n = c (mod r)`.
fn residue_condition(x: Rational64, lambda: f64) -> Option<(i64, i64)> {
    let (p, r) = (*x.numer(), *x.denom());
    let j = (lambda * r as f64).round();
    if (lambda * r as f64 - j).abs() > 1e-9 {
        return None;
    }
    let j = (j as i64).rem_euclid(r);
    if r == 1 {
        return Some((1, 0));
    }
    let inv = p.extended_gcd(&r).x.rem_euclid(r);
    Some((r, (j as i128 * inv as i128).rem_euclid(r as i128) as i64))
}

/// Indices with `{-tau n} = lambda` and `{n theta} = lambda1` simultaneously.
pub fn joint_progression(
    tau: &Scalar,
    theta: &Scalar,
    lambda: f64,
    lambda1: f64,
) -> Result<Option<Progression>> {
    let neg_tau = tau
        .neg()
        .as_rational()
        .ok_or_else(|| Error::NotRational(tau.to_string()))?;
    let th = theta
        .as_rational()
        .ok_or_else(|| Error::NotRational(theta.to_string()))?;
    let (Some((r1, a1)), Some((r2, a2))) =
        (residue_condition(neg_tau, lambda), residue_condition(th, lambda1))
    else {
        return Ok(None);
    };
    let g = r1.extended_gcd(&r2);
    if (a2 - a1) % g.gcd != 0 {
        return Ok(None);
    }
    let lcm = r1 / g.gcd * r2;
    let k = ((a2 - a1) / g.gcd) as i128 * g.x as i128;
    let residue = (a1 as i128 + r1 as i128 * k).rem_euclid(lcm as i128);
    Ok(Some(Progression {
        modulus: lcm as u64,
        residue: residue as u64,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::SQRT_2;

    fn s(text: &str) -> Scalar {
        text.parse().unwrap()
    }

    #[test]
    fn fractional_parts() {
        assert_eq!(frac_split(2.75), (2, 0.75));
        assert_eq!(frac_split(-0.25), (-1, 0.75));
        assert_eq!(frac_split(3.0), (3, 0.0));
        let (_, f) = frac_split(-1e-20);
        assert!(f < 1.0);
    }

    #[test]
    fn compensated_product_keeps_low_bits() {
        let x = SQRT_2 - 1.0;
        let p = frac_of_product(1_000_000, x);
        let naive = 1_000_000.0 * x;
        assert_eq!(p.floor, naive.floor() as i64);
        // reference from the exact rational value of the double
        let (num, den) = exact_ratio(x).unwrap();
        let total = 1_000_000i128 * num;
        let rem = total.rem_euclid(den);
        assert!((p.frac - rem as f64 / den as f64).abs() < 1e-16);
    }

    #[test]
    fn character() {
        assert_eq!(chi(3), 1);
        assert_eq!(chi(4), 0);
        assert_eq!(chi(-1), 1);
        assert_eq!(chi(0), 0);
    }

    #[test]
    fn lattices() {
        let l = lattice_of_rational(&s("1/3")).unwrap();
        assert_eq!(l.values(), vec![0.0, 1.0 / 3.0, 2.0 / 3.0]);
        assert_eq!(l.residue_of(1.0 / 3.0), Some(1));
        let l = lattice_of_rational(&s("1/2")).unwrap();
        assert_eq!(l.values(), vec![0.0, 0.5]);
        let l = lattice_of_rational(&s("2/5")).unwrap();
        assert_eq!(l.len(), 5);
        assert_eq!(l.values(), vec![0.0, 0.4, 0.8, 0.2, 0.6]);
        assert!(matches!(
            lattice_of_rational(&s("sqrt2")),
            Err(Error::NotRational(_))
        ));
        let l = lattice_of_rational(&s("3")).unwrap();
        assert_eq!(l.values(), vec![0.0]);
    }

    #[test]
    fn convergents() {
        assert_eq!(
            cf_convergents(SQRT_2, 5),
            vec![(1, 1), (3, 2), (7, 5), (17, 12), (41, 29)]
        );
        assert_eq!(cf_convergents(0.5, 10), vec![(0, 1), (1, 2)]);
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        let dens: Vec<u64> = cf_convergents(phi, 10).into_iter().map(|c| c.1).collect();
        assert_eq!(dens, vec![1, 1, 2, 3, 5, 8, 13, 21, 34, 55]);
        for (p, q) in cf_convergents(SQRT_2, 20) {
            assert!((q as f64 * SQRT_2 - p as f64).abs() < 1.0 / q as f64);
        }
    }

    #[test]
    fn negative_inputs_expand() {
        let c = cf_convergents(-0.75, 10);
        assert_eq!(c, vec![(-1, 1), (-3, 4)]);
    }

    #[test]
    fn rational_arithmetic_progression_witnesses() {
        let w = witness_search(&s("1/3"), &s("1/3"), 2.0, 10).unwrap();
        let ns: Vec<u64> = w.iter().map(|w| w.n).collect();
        assert_eq!(ns, vec![1, 4, 7, 10]);
        assert!(w.iter().all(|w| w.residual == 0.0));
    }

    #[test]
    fn sqrt2_convergent_denominators_are_witnesses() {
        let w = witness_search(&s("sqrt2"), &s("0"), 1.0, 100).unwrap();
        let ns: Vec<u64> = w.iter().map(|w| w.n).collect();
        for n in [2, 5, 12, 29, 70] {
            assert!(ns.contains(&n));
        }
        assert_eq!(ns, witness_scan(&s("sqrt2"), &s("0"), 1.0, 100).iter().map(|w| w.n).collect::<Vec<_>>());
    }

    #[test]
    fn inhomogeneous_search_is_nonempty() {
        let w = witness_search(&s("sqrt2-1"), &s("1/2"), 0.9, 10_000).unwrap();
        assert!(!w.is_empty());
        assert!(w.iter().all(DiophantineWitness::is_admissible));
    }

    #[test]
    fn search_rejects_bad_input() {
        assert!(witness_search(&s("sqrt2"), &s("0"), 1.0, 0).is_err());
        assert!(witness_search(&s("sqrt2"), &s("0"), 0.0, 10).is_err());
    }

    #[test]
    fn paired_search() {
        let a = witness_search_pair(&s("sqrt2-1"), &s("sqrt2-1"), &s("0"), &s("0"), 0.8, 2000).unwrap();
        let b = witness_search(&s("sqrt2-1"), &s("0"), 0.8, 2000).unwrap();
        assert_eq!(a.iter().map(|w| w.n).collect::<Vec<_>>(), b.iter().map(|w| w.n).collect::<Vec<_>>());
        let p = witness_search_pair(&s("sqrt2-1"), &s("sqrt3-1"), &s("0"), &s("0"), 0.4, 100_000).unwrap();
        assert!(!p.is_empty());
        let half = witness_search_pair(&s("~0.5"), &s("sqrt2-1"), &s("0"), &s("0"), 1.0, 5000).unwrap();
        assert!(half.len() > 1);
        assert!(half.iter().filter(|w| w.n > 1).all(|w| w.n % 2 == 0));
    }

    #[test]
    fn progressions() {
        let p = joint_progression(&s("-1/2"), &s("1/4"), 0.5, 0.25).unwrap();
        assert_eq!(p, Some(Progression { modulus: 4, residue: 1 }));
        assert_eq!(joint_progression(&s("-1/2"), &s("1/2"), 0.0, 0.5).unwrap(), None);
        let p = joint_progression(&s("-1/3"), &s("1/3"), 1.0 / 3.0, 1.0 / 3.0).unwrap();
        assert_eq!(p, Some(Progression { modulus: 3, residue: 1 }));
        assert!(matches!(
            joint_progression(&s("1-sqrt2"), &s("1/3"), 0.0, 0.0),
            Err(Error::NotRational(_))
        ));
        let p = Progression { modulus: 4, residue: 1 };
        assert_eq!(p.members(1, 20), vec![1, 5, 9, 13, 17]);
        let p = Progression { modulus: 3, residue: 0 };
        assert_eq!(p.members(0, 10), vec![3, 6, 9]);
    }
}
