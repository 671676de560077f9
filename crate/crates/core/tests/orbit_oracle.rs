//! Long-orbit products checked against an independent oracle.
//!
//! The engine accumulates sums of per-factor logs with compensated
//! summation. The oracle multiplies the identical factor magnitudes in
//! double-double arithmetic with power-of-two rescaling and takes a single
//! log at the end, so the two paths share no accumulation code and agree
//! only if both are right.

mod common;

use common::{golden, sqrt2, ScaledProduct};
use hrt_core::orbit::product::orbit_phases;
use hrt_core::orbit::{orbit_product, Direction, Orbit};
use hrt_core::trigpoly::OrbitPolynomial;
use hrt_core::RealParam;
use num_complex::Complex64;

fn cx(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn oracle_log(orbit: &Orbit) -> Option<f64> {
    let (pa, pb) = orbit_phases(orbit).unwrap();
    let mut prod = ScaledProduct::new();
    for n in 0..orbit.len as usize {
        let v = orbit
            .polynomial
            .eval_at_phases(pa[n], pb[n])
            .unwrap()
            .norm();
        prod.mul(v);
    }
    prod.log()
}

fn check(orbit: &Orbit, tol: f64) {
    let report = orbit_product(orbit).unwrap();
    let expect = oracle_log(orbit);
    match (report.log_product, expect) {
        (Some(got), Some(want)) => {
            assert!(
                (got - want).abs() <= tol,
                "log product {got} vs oracle {want}, diff {:.3e}",
                (got - want).abs()
            );
        }
        (None, None) => {}
        (got, want) => panic!("engine {got:?} disagrees with oracle {want:?}"),
    }
}

#[test]
fn ten_thousand_step_product_matches_double_double_oracle() {
    let orbit = Orbit {
        x: RealParam::parse("3141/9973", None).unwrap(),
        len: 10_000,
        direction: Direction::Forward,
        polynomial: OrbitPolynomial::TwoFreq {
            c0: cx(0.83, -0.21),
            c1: cx(-0.37, 0.55),
            c2: cx(0.14, 0.91),
        },
        alpha: sqrt2(),
        beta: RealParam::from_int(1),
    };
    check(&orbit, 1e-8);
}

#[test]
fn backward_direction_matches_the_oracle_too() {
    let orbit = Orbit {
        x: RealParam::parse("22/701", None).unwrap(),
        len: 10_000,
        direction: Direction::Backward,
        polynomial: OrbitPolynomial::TwoFreq {
            c0: cx(1.0, 0.0),
            c1: cx(0.45, 0.32),
            c2: cx(-0.61, 0.09),
        },
        alpha: golden(),
        beta: RealParam::parse("(0+sqrt(3))/2", None).unwrap(),
    };
    check(&orbit, 1e-8);
}

#[test]
fn single_frequency_factor_agrees_on_a_long_orbit() {
    let orbit = Orbit {
        x: RealParam::parse("5/16", None).unwrap(),
        len: 10_000,
        direction: Direction::Forward,
        polynomial: OrbitPolynomial::OneFreq {
            a: cx(1.9, 0.0),
            b: cx(0.6, -0.8),
        },
        alpha: sqrt2(),
        beta: RealParam::from_int(1),
    };
    check(&orbit, 1e-8);
}

#[test]
fn ratio_factors_cancel_between_engine_and_oracle() {
    let orbit = Orbit {
        x: RealParam::parse("7/39", None).unwrap(),
        len: 4_096,
        direction: Direction::Forward,
        polynomial: OrbitPolynomial::Ratio {
            a: cx(1.2, 0.1),
            b: cx(0.4, -0.3),
            c: cx(2.0, 0.0),
            d: cx(0.5, 0.5),
        },
        alpha: golden(),
        beta: sqrt2(),
    };
    check(&orbit, 1e-8);
}
