//! Orbit products and reciprocal averages.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::real::RealParam;
use crate::sum::Neumaier;
use crate::trigpoly::{LogAbs, OrbitPolynomial};

use super::phase::phase_stream;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Direction {
    /// Points x, x+1, ..., x+N-1.
    Forward,
    /// Points x-1, x-2, ..., x-N.
    Backward,
}

/// An arithmetic progression of evaluation points together with the
/// polynomial factor evaluated along it. `alpha` drives the first phase
/// slot, `beta` the second; one-frequency polynomials ignore `beta`.
#[derive(Debug, Clone)]
pub struct Orbit {
    pub x: RealParam,
    pub len: u64,
    pub direction: Direction,
    pub polynomial: OrbitPolynomial,
    pub alpha: RealParam,
    pub beta: RealParam,
}

/// Normalization for a reciprocal average.
#[derive(Debug, Clone, Copy, Serialize)]
pub enum RecipNorm {
    /// Divide by m·p, the per-scale normalization; the threshold argument
    /// is interpreted as a coefficient of ln(p).
    PerScale { m: f64, p: f64 },
    /// Divide by len^gamma; the threshold argument is used as-is.
    Power { gamma: f64 },
}

#[derive(Debug, Clone, Serialize)]
pub struct OrbitReport {
    pub len: u64,
    pub direction: Direction,
    /// Compensated sum of ln|P| over the orbit; None when any factor fell
    /// below the underflow sentinel.
    pub log_product: Option<f64>,
    pub underflow_hits: u64,
    /// Normalized sum of 1/|P|, when requested; None after an exact zero.
    pub reciprocal_avg: Option<f64>,
    pub threshold: Option<f64>,
    pub bound_satisfied: Option<bool>,
    pub flags: Vec<String>,
}

impl OrbitReport {
    fn new(len: u64, direction: Direction) -> Self {
        OrbitReport {
            len,
            direction,
            log_product: None,
            underflow_hits: 0,
            reciprocal_avg: None,
            threshold: None,
            bound_satisfied: None,
            flags: Vec::new(),
        }
    }
}

/// Phase streams for both slots of the orbit's polynomial. One-frequency
/// forms get a zero-filled second stream that is never read.
pub fn orbit_phases(orbit: &Orbit) -> Result<(Vec<f64>, Vec<f64>)> {
    let fwd = orbit.direction == Direction::Forward;
    let pa = phase_stream(&orbit.alpha, &orbit.x, orbit.len, fwd)?;
    let pb = if matches!(orbit.polynomial, OrbitPolynomial::OneFreq { .. }) {
        vec![0.0; orbit.len as usize]
    } else {
        phase_stream(&orbit.beta, &orbit.x, orbit.len, fwd)?
    };
    Ok((pa, pb))
}

/// ln of the absolute product of the polynomial over the orbit.
pub fn orbit_product(orbit: &Orbit) -> Result<OrbitReport> {
    if orbit.len == 0 {
        return Err(Error::Parameter("orbit length must be positive".into()));
    }
    let (pa, pb) = orbit_phases(orbit)?;
    let mut acc = Neumaier::new();
    let mut under = 0u64;
    for i in 0..orbit.len as usize {
        match orbit.polynomial.log_abs_at_phases(pa[i], pb[i])? {
            LogAbs::Finite(l) => acc.add(l),
            LogAbs::Underflow => under += 1,
        }
    }
    let mut rep = OrbitReport::new(orbit.len, orbit.direction);
    rep.underflow_hits = under;
    if under > 0 {
        rep.flags.push(format!(
            "{under} factor(s) at or below the underflow sentinel; log product withheld"
        ));
    } else {
        rep.log_product = Some(acc.total());
    }
    Ok(rep)
}

/// Normalized sum of 1/|P| over the orbit, optionally compared against a
/// threshold coefficient (see [`RecipNorm`] for its meaning).
pub fn reciprocal_average(
    orbit: &Orbit,
    norm: RecipNorm,
    threshold_coef: Option<f64>,
) -> Result<OrbitReport> {
    if orbit.len == 0 {
        return Err(Error::Parameter("orbit length must be positive".into()));
    }
    let (pa, pb) = orbit_phases(orbit)?;
    let mut acc = Neumaier::new();
    let mut zero_hit = false;
    for i in 0..orbit.len as usize {
        let v = orbit.polynomial.eval_at_phases(pa[i], pb[i])?.norm();
        if v == 0.0 {
            zero_hit = true;
            break;
        }
        acc.add(1.0 / v);
    }
    let (divisor, threshold) = match norm {
        RecipNorm::PerScale { m, p } => {
            if m <= 0.0 || p <= 0.0 {
                return Err(Error::Parameter("per-scale normalization needs m, p > 0".into()));
            }
            (m * p, threshold_coef.map(|c| c * p.ln()))
        }
        RecipNorm::Power { gamma } => ((orbit.len as f64).powf(gamma), threshold_coef),
    };
    let mut rep = OrbitReport::new(orbit.len, orbit.direction);
    rep.threshold = threshold;
    if zero_hit {
        rep.flags
            .push("exact zero factor; reciprocal average unbounded".into());
        rep.bound_satisfied = threshold.map(|_| false);
    } else {
        let avg = acc.total() / divisor;
        rep.reciprocal_avg = Some(avg);
        rep.bound_satisfied = threshold.map(|t| avg <= t);
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn one() -> Complex64 {
        Complex64::new(1.0, 0.0)
    }

    fn triple(c0: f64, c1: f64, c2: f64) -> OrbitPolynomial {
        OrbitPolynomial::TwoFreq {
            c0: Complex64::new(c0, 0.0),
            c1: Complex64::new(c1, 0.0),
            c2: Complex64::new(c2, 0.0),
        }
    }

    #[test]
    fn integer_frequencies_give_constant_factors() {
        // alpha, beta integers: every point sees the same phases, so the
        // log product is exactly len times one factor.
        let orbit = Orbit {
            x: RealParam::parse("3/10", None).unwrap(),
            len: 100,
            direction: Direction::Forward,
            polynomial: triple(1.0, 1.0, 1.0),
            alpha: RealParam::from_int(2),
            beta: RealParam::from_int(3),
        };
        let rep = orbit_product(&orbit).unwrap();
        let pa = crate::torus::frac(2.0 * 0.3);
        let pb = crate::torus::frac(3.0 * 0.3);
        let single = orbit
            .polynomial
            .log_abs_at_phases(pa, pb)
            .unwrap()
            .finite()
            .unwrap();
        let got = rep.log_product.unwrap();
        assert!((got - 100.0 * single).abs() < 1e-9, "{got} vs {}", 100.0 * single);
    }

    #[test]
    fn gap_triple_has_nonnegative_log_product() {
        // (3,1,1) never vanishes and |P| >= 1 everywhere.
        let orbit = Orbit {
            x: RealParam::parse("1/7", None).unwrap(),
            len: 2000,
            direction: Direction::Forward,
            polynomial: triple(3.0, 1.0, 1.0),
            alpha: RealParam::parse("sqrt(2)", None).unwrap(),
            beta: RealParam::parse("(0+sqrt(2))/2", None).unwrap(),
        };
        let rep = orbit_product(&orbit).unwrap();
        assert!(rep.log_product.unwrap() >= -1e-9);
        assert_eq!(rep.underflow_hits, 0);
    }

    #[test]
    fn backward_orbit_evaluates_points_below_base() {
        let orbit = Orbit {
            x: RealParam::parse("2/5", None).unwrap(),
            len: 40,
            direction: Direction::Backward,
            polynomial: OrbitPolynomial::OneFreq {
                a: Complex64::new(2.0, 0.0),
                b: one(),
            },
            alpha: RealParam::parse("sqrt(3)", None).unwrap(),
            beta: RealParam::from_int(0),
        };
        let rep = orbit_product(&orbit).unwrap();
        // Direct recomputation from per-point exact phases.
        let a = orbit.alpha.value();
        let xv = orbit.x.value();
        let mut want = 0.0;
        for n in 1..=40i64 {
            let ph = a
                .mul(&xv)
                .unwrap()
                .add(&a.mul_bigint(&(-num_bigint::BigInt::from(n))))
                .unwrap()
                .frac()
                .to_f64();
            want += orbit
                .polynomial
                .log_abs_at_phases(ph, 0.0)
                .unwrap()
                .finite()
                .unwrap();
        }
        assert!((rep.log_product.unwrap() - want).abs() < 1e-9);
    }

    #[test]
    fn underflow_withholds_log_product() {
        // a + b e(phase) with a=1, b=-1 vanishes exactly at phase 0, which
        // the orbit hits at n=0 for integer alpha and x=0.
        let orbit = Orbit {
            x: RealParam::from_int(0),
            len: 5,
            direction: Direction::Forward,
            polynomial: OrbitPolynomial::OneFreq {
                a: one(),
                b: Complex64::new(-1.0, 0.0),
            },
            alpha: RealParam::from_int(1),
            beta: RealParam::from_int(0),
        };
        let rep = orbit_product(&orbit).unwrap();
        assert!(rep.log_product.is_none());
        assert_eq!(rep.underflow_hits, 5);
        assert!(!rep.flags.is_empty());
    }

    #[test]
    fn per_scale_reciprocal_average_of_gap_triple_is_small() {
        // |P| >= 1 pointwise, so the normalized sum is at most len/(m p).
        let orbit = Orbit {
            x: RealParam::parse("1/9", None).unwrap(),
            len: 500,
            direction: Direction::Forward,
            polynomial: triple(3.0, 1.0, 1.0),
            alpha: RealParam::parse("(1+sqrt(5))/2", None).unwrap(),
            beta: RealParam::from_int(1),
        };
        let rep = reciprocal_average(&orbit, RecipNorm::PerScale { m: 2.0, p: 500.0 }, Some(1.0))
            .unwrap();
        let avg = rep.reciprocal_avg.unwrap();
        assert!(avg > 0.0 && avg <= 0.5 + 1e-12);
        assert_eq!(rep.bound_satisfied, Some(true));
        assert!((rep.threshold.unwrap() - 500.0f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn zero_factor_marks_average_exceeded() {
        let orbit = Orbit {
            x: RealParam::from_int(0),
            len: 3,
            direction: Direction::Forward,
            polynomial: OrbitPolynomial::OneFreq {
                a: one(),
                b: Complex64::new(-1.0, 0.0),
            },
            alpha: RealParam::from_int(1),
            beta: RealParam::from_int(0),
        };
        let rep =
            reciprocal_average(&orbit, RecipNorm::Power { gamma: 2.0 }, Some(10.0)).unwrap();
        assert!(rep.reciprocal_avg.is_none());
        assert_eq!(rep.bound_satisfied, Some(false));
        assert!(!rep.flags.is_empty());
    }

    #[test]
    fn power_normalization_divides_by_len_to_gamma() {
        let orbit = Orbit {
            x: RealParam::parse("1/4", None).unwrap(),
            len: 64,
            direction: Direction::Forward,
            polynomial: triple(4.0, 1.0, 1.0),
            alpha: RealParam::parse("sqrt(5)", None).unwrap(),
            beta: RealParam::parse("(0+sqrt(5))/3", None).unwrap(),
        };
        let r1 = reciprocal_average(&orbit, RecipNorm::Power { gamma: 1.0 }, None).unwrap();
        let r2 = reciprocal_average(&orbit, RecipNorm::Power { gamma: 2.0 }, None).unwrap();
        let a1 = r1.reciprocal_avg.unwrap();
        let a2 = r2.reciprocal_avg.unwrap();
        assert!((a1 / 64.0 - a2).abs() < 1e-15 * a1.max(1.0));
    }
}
