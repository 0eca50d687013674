use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sw_asymptotics::qcore::{
    tail_remainders, qbinom, qpoch_finite, qpoch_infinite, QParam,
};

/// Partial product with enough factors that the omitted tail is below
/// double resolution.
fn product_oracle(a: f64, q: f64) -> f64 {
    let mut p = 1.0;
    let mut t = a;
    while t > 1e-20 {
        p *= 1.0 - t;
        t *= q;
    }
    p
}

/// `ln (x; q)_inf` summed factor by factor, so that remainders near zero
/// keep their relative precision.
fn ln_product_oracle(x: f64, q: f64) -> f64 {
    let mut s = 0.0;
    let mut t = x;
    for _ in 0..4000 {
        s += (-t).ln_1p();
        t *= q;
    }
    s
}

/// `(-b; q)_inf` by direct partial product.
fn neg_product_oracle(b: f64, q: f64) -> f64 {
    let mut p = 1.0;
    let mut t = b;
    while t > 1e-20 {
        p *= 1.0 + t;
        t *= q;
    }
    p
}

#[test]
fn remainder_bounds_hold_on_random_grid() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let mut violations = 0;
    for _ in 0..1000 {
        let a: f64 = rng.gen_range(1e-6..1.0);
        let qv = [0.2, 0.5, 0.8][rng.gen_range(0..3)];
        let n = rng.gen_range(0..=40u64);
        let q = QParam::new(qv).unwrap();
        let r = tail_remainders(a, q, n).unwrap();
        let ln_tail = ln_product_oracle(a * qv.powi(n as i32), qv);
        let r1 = ln_tail.exp_m1();
        let r2 = (-ln_tail).exp_m1();
        let b1 = neg_product_oracle(a * qv * qv, qv) * a * qv.powi(n as i32) / (1.0 - qv);
        assert!((r.r1 - r1).abs() <= 1e-13 * r1.abs());
        assert!((r.r2 - r2).abs() <= 1e-13 * r2.abs());
        assert!((r.r1_bound - b1).abs() <= 1e-12 * b1);
        if r1.abs() > r.r1_bound || r2.abs() > r.r2_bound {
            violations += 1;
        }
    }
    assert_eq!(violations, 0);
}

#[test]
fn infinite_product_examples() {
    let q = QParam::new(0.5).unwrap();
    let v = qpoch_infinite(Complex64::new(0.0, 0.0), q, 1e-12).unwrap();
    assert_eq!((v.value, v.tail_bound), (Complex64::new(1.0, 0.0), 0.0));
    let v = qpoch_infinite(Complex64::new(0.5, 0.0), q, 1e-12).unwrap();
    assert!((v.value.re - product_oracle(0.5, 0.5)).abs() < 1e-12);
    assert!(v.tail_bound <= 1e-12);
    let v = qpoch_infinite(Complex64::new(1.0, 0.0), q, 1e-12).unwrap();
    assert_eq!((v.value.norm(), v.tail_bound), (0.0, 0.0));
}

#[test]
fn complex_products_match_partial_products() {
    let q = QParam::new(0.6).unwrap();
    let a = Complex64::new(0.7, -1.3);
    let v = qpoch_infinite(a, q, 1e-13).unwrap();
    let oracle = qpoch_finite(a, q, 200);
    assert!((v.value - oracle).norm() <= v.tail_bound + 1e-14);
}

proptest! {
    #[test]
    fn finite_recurrence(a_re in -2.0..2.0f64, a_im in -2.0..2.0f64, qv in 0.05..0.95f64, n in 0usize..40) {
        let q = QParam::new(qv).unwrap();
        let a = Complex64::new(a_re, a_im);
        let lhs = qpoch_finite(a, q, n + 1);
        let rhs = qpoch_finite(a, q, n) * (Complex64::new(1.0, 0.0) - a * qv.powi(n as i32));
        prop_assert!((lhs - rhs).norm() <= 1e-12 * (1.0 + rhs.norm()));
    }

    #[test]
    fn positivity_bounds(a in 0.0..1.0f64, b in 0.0..5.0f64, qv in 0.05..0.95f64, n in 0usize..60) {
        let q = QParam::new(qv).unwrap();
        let p = qpoch_finite(Complex64::new(a, 0.0), q, n).re;
        prop_assert!(p > 0.0 && p <= 1.0);
        prop_assert!(qpoch_finite(Complex64::new(-b, 0.0), q, n).re >= 1.0);
    }

    #[test]
    fn gaussian_symmetry(n in 0u64..30, k in 0i64..30, qv in 0.05..0.95f64) {
        prop_assume!(k as u64 <= n);
        let q = QParam::new(qv).unwrap();
        let a = qbinom(n, k, q).unwrap();
        let b = qbinom(n, n as i64 - k, q).unwrap();
        prop_assert!(a > 0.0);
        prop_assert!((a - b).abs() <= 1e-12 * a);
    }
}

#[test]
fn gaussian_binomial_examples() {
    let q = QParam::new(0.5).unwrap();
    assert_eq!(qbinom(5, 0, QParam::new(0.3).unwrap()).unwrap(), 1.0);
    assert!((qbinom(2, 1, q).unwrap() - 1.5).abs() < 1e-15);
    let q7 = QParam::new(0.7).unwrap();
    assert!((qbinom(4, 3, q7).unwrap() - qbinom(4, 1, q7).unwrap()).abs() < 1e-14);
}
