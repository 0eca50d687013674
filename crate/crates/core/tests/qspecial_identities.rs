use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sw_asymptotics::qcore::QParam;
use sw_asymptotics::qspecial::{aq_derivative, bq, ramanujan_aq, theta_product, theta_series, ThetaArg};

fn q(v: f64) -> QParam {
    QParam::new(v).unwrap()
}

fn random_z(rng: &mut ChaCha8Rng, r_lo: f64, r_hi: f64) -> Complex64 {
    let r = rng.gen_range(r_lo..r_hi);
    let phi = rng.gen_range(-PI..PI);
    Complex64::from_polar(r, phi)
}

/// Plain partial sum of `A_q`, 30 terms.
fn aq_oracle(z: Complex64, qv: f64) -> Complex64 {
    let mut sum = Complex64::new(0.0, 0.0);
    let mut qq = 1.0;
    for k in 0..30i32 {
        if k > 0 {
            qq *= 1.0 - qv.powi(k);
        }
        sum += (-z).powi(k) * qv.powi(k * k) / qq;
    }
    sum
}

#[test]
fn triple_product_agrees_with_series() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for qv in [0.2, 0.5, 0.8] {
        for _ in 0..200 {
            let z = random_z(&mut rng, 0.25, 4.0);
            let arg = ThetaArg::new(z, q(qv)).unwrap();
            let s = theta_series(arg, 1e-14).unwrap();
            let p = theta_product(arg, 1e-14).unwrap();
            let slack = s.tail_bound + p.tail_bound + 1e-10 * (1.0 + s.value.norm());
            assert!((s.value - p.value).norm() <= slack, "z = {z}, q = {qv}");
        }
    }
}

#[test]
fn theta_symmetries() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let qq = q(0.5);
    for _ in 0..100 {
        let z = random_z(&mut rng, 0.3, 3.0);
        let t = theta_series(ThetaArg::new(z, qq).unwrap(), 1e-16).unwrap().value;
        let inv = theta_series(ThetaArg::new(z.inv(), qq).unwrap(), 1e-16).unwrap().value;
        assert!((t - inv).norm() <= 1e-12 * t.norm().max(1e-300));
        let shifted = theta_series(ThetaArg::new(z * 0.25, qq).unwrap(), 1e-16).unwrap().value;
        let expect = t / (z * 0.5);
        assert!((shifted - expect).norm() <= 1e-12 * expect.norm().max(1e-300));
    }
}

#[test]
fn theta_reference_values() {
    let one = ThetaArg::new(Complex64::new(1.0, 0.0), q(0.5)).unwrap();
    let oracle: f64 = 1.0 + 2.0 * (1..=10).map(|n: i32| 0.5f64.powi(n * n)).sum::<f64>();
    let s = theta_series(one, 1e-15).unwrap();
    let p = theta_product(one, 1e-15).unwrap();
    assert!((s.value.re - oracle).abs() < 1e-15);
    assert!((p.value.re - oracle).abs() < 1e-13);
    let zero = theta_product(ThetaArg::new(Complex64::new(-2.0, 0.0), q(0.5)).unwrap(), 1e-12).unwrap();
    assert_eq!(zero.value.norm(), 0.0);
    assert!(ThetaArg::new(Complex64::new(0.0, 0.0), q(0.5)).is_err());
}

#[test]
fn ramanujan_function_values() {
    let qq = q(0.5);
    assert_eq!(ramanujan_aq(Complex64::new(0.0, 0.0), qq, 1e-15).unwrap().value, Complex64::new(1.0, 0.0));
    for z in [Complex64::new(1.0, 0.0), Complex64::new(-0.4, 2.0), Complex64::new(3.0, -1.0)] {
        let v = ramanujan_aq(z, qq, 1e-15).unwrap();
        assert!((v.value - aq_oracle(z, 0.5)).norm() < 1e-14);
    }
    let b1 = bq(1.0, qq, 1e-15).unwrap().value.re;
    assert!(b1 >= 1.0);
    assert!(b1 <= bq(2.0, qq, 1e-15).unwrap().value.re);
    assert_eq!(bq(0.0, qq, 1e-15).unwrap().value.re, 1.0);
}

#[test]
fn majorants_hold() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for qv in [0.3, 0.5] {
        for _ in 0..250 {
            let z = random_z(&mut rng, 0.0, 3.0);
            let qq = q(qv);
            let a = ramanujan_aq(z, qq, 1e-15).unwrap();
            let b = bq(z.norm(), qq, 1e-15).unwrap();
            assert!(a.value.norm() <= b.value.re + b.tail_bound + a.tail_bound);
            let d = aq_derivative(z, qq, 1e-15).unwrap();
            assert!(d.value.norm() <= qv / (1.0 - qv) * (b.value.re + b.tail_bound) + d.tail_bound);
        }
    }
}

#[test]
fn derivative_matches_central_difference() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let qq = q(0.5);
    let h = 1e-5;
    let mut points = vec![Complex64::new(0.7, 0.0)];
    points.extend((0..19).map(|_| random_z(&mut rng, 0.0, 2.0)));
    for z in points {
        let plus = ramanujan_aq(z + h, qq, 1e-16).unwrap().value;
        let minus = ramanujan_aq(z - h, qq, 1e-16).unwrap().value;
        let fd = (plus - minus) / (2.0 * h);
        let d = aq_derivative(z, qq, 1e-16).unwrap().value;
        assert!((fd - d).norm() < 1e-6, "z = {z}");
    }
    let d0 = aq_derivative(Complex64::new(0.0, 0.0), qq, 1e-16).unwrap().value;
    assert!((d0.re + 1.0).abs() < 1e-15);
}

#[test]
fn certificates_are_internally_consistent() {
    let qq = q(0.5);
    let z = Complex64::new(2.0, 1.0);
    let loose = ramanujan_aq(z, qq, 1e-6).unwrap();
    let tight = ramanujan_aq(z, qq, 1e-15).unwrap();
    assert!((loose.value - tight.value).norm() <= loose.tail_bound + tight.tail_bound);
    let arg = ThetaArg::new(z, qq).unwrap();
    let loose = theta_series(arg, 1e-5).unwrap();
    let tight = theta_series(arg, 1e-15).unwrap();
    assert!((loose.value - tight.value).norm() <= loose.tail_bound + tight.tail_bound);
}
