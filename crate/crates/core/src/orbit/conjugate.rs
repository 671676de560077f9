//! Conjugate base-point selection for one-frequency factors.
//!
//! For P(u) = A + B·e(alpha·u) with real A and B = r·e(theta) (theta in
//! turns), the point y = -x - 2·theta/alpha + n'/alpha satisfies
//! A + B·e(alpha·y - n·alpha) = conj(A + B·e(alpha·x + n·alpha)) for every
//! integer n, so backward log sums from y equal forward log sums from x
//! term by term. The report verifies the pointwise identity and the sum
//! identity written at the fractional part z = {y}.

use num_complex::Complex64;
use num_rational::BigRational;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::ExactReal;
use crate::real::RealParam;
use crate::sum::Neumaier;
use crate::trigpoly::e;

#[derive(Debug, Clone, Serialize)]
pub struct ConjugateReport {
    pub y: f64,
    /// Fractional part of y and its integer part y = z + m.
    pub z: f64,
    pub m: i64,
    pub theta_turns: f64,
    pub n_terms: u64,
    /// max over 0 <= n <= N of |P(y - n) - conj(P(x + n))|.
    pub pointwise_residual: f64,
    /// Sum over j in [m-N, m-1] of ln|A + B·e(alpha·z + alpha·j)|.
    pub sum_backward: f64,
    /// Sum over n in [1, N] of ln|A + B·e(alpha·x + alpha·n)|.
    pub sum_forward: f64,
    pub sum_residual: f64,
}

fn log_factor(a: f64, b: Complex64, phase: f64) -> Result<f64> {
    let v = (Complex64::new(a, 0.0) + b * e(phase)).norm();
    if v == 0.0 {
        return Err(Error::Singularity(
            "conjugate sum hit an exact zero factor".into(),
        ));
    }
    Ok(v.ln())
}

/// Select the conjugate base point for (A, B, alpha, n') and verify both
/// identities over n <= n_terms.
pub fn conjugate_select(
    x: &RealParam,
    a: f64,
    b: Complex64,
    alpha: &RealParam,
    n_prime: i64,
    n_terms: u64,
) -> Result<ConjugateReport> {
    if alpha.is_zero() {
        return Err(Error::Parameter("alpha must be nonzero".into()));
    }
    let r = b.norm();
    if r == 0.0 {
        return Err(Error::Parameter("B must be nonzero".into()));
    }
    if n_terms == 0 {
        return Err(Error::Parameter("need at least one term".into()));
    }
    let theta = b.arg() / std::f64::consts::TAU;
    let theta_exact = ExactReal::from_rational(
        BigRational::from_float(theta).ok_or_else(|| Error::Parameter("B has no argument".into()))?,
    );
    let av = alpha.value();
    let y_val = x
        .value()
        .neg()
        .sub(&theta_exact.mul_u64(2).div(&av)?)?
        .add(&ExactReal::from_int(n_prime).div(&av)?)?;
    let z_val = y_val.frac();
    let m: i64 = y_val
        .floor()
        .try_into()
        .map_err(|_| Error::Parameter("integer part of y does not fit in i64".into()))?;

    let ax = av.mul(&x.value())?;
    let ay = av.mul(&y_val)?;
    let az = av.mul(&z_val)?;
    let phase = |base: &ExactReal, n: i64| -> Result<f64> {
        Ok(base
            .add(&av.mul_bigint(&num_bigint::BigInt::from(n)))?
            .frac()
            .to_f64())
    };

    let mut residual = 0.0f64;
    for n in 0..=n_terms as i64 {
        let vy = Complex64::new(a, 0.0) + b * e(phase(&ay, -n)?);
        let vx = Complex64::new(a, 0.0) + b * e(phase(&ax, n)?);
        residual = residual.max((vy - vx.conj()).norm());
    }

    let mut back = Neumaier::new();
    for j in (m - n_terms as i64)..=(m - 1) {
        back.add(log_factor(a, b, phase(&az, j)?)?);
    }
    let mut fwd = Neumaier::new();
    for n in 1..=n_terms as i64 {
        fwd.add(log_factor(a, b, phase(&ax, n)?)?);
    }
    let (sb, sf) = (back.total(), fwd.total());

    Ok(ConjugateReport {
        y: y_val.to_f64(),
        z: z_val.to_f64(),
        m,
        theta_turns: theta,
        n_terms,
        pointwise_residual: residual,
        sum_backward: sb,
        sum_forward: sf,
        sum_residual: (sb - sf).abs(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    use crate::mc::sample_rng;

    #[test]
    fn real_positive_b_reflects_through_minus_x() {
        // theta = 0, alpha = 1, n' = 1: y = -x + 1.
        let x = RealParam::parse("1/4", None).unwrap();
        let rep = conjugate_select(
            &x,
            2.0,
            Complex64::new(1.0, 0.0),
            &RealParam::from_int(1),
            1,
            50,
        )
        .unwrap();
        assert!((rep.y - 0.75).abs() < 1e-15);
        assert_eq!(rep.m, 0);
        assert!(rep.pointwise_residual < 1e-12);
        assert!(rep.sum_residual < 1e-10);
    }

    #[test]
    fn seeded_tuples_satisfy_both_identities() {
        for i in 0..20 {
            let mut rng = sample_rng(1105, i);
            let x = RealParam::parse(&format!("{}/1000", rng.gen_range(1..1000)), None).unwrap();
            let a: f64 = rng.gen_range(0.5..2.0) * if rng.gen::<bool>() { 1.0 } else { -1.0 };
            let r = rng.gen_range(0.3..1.8);
            let th: f64 = rng.gen_range(-0.5..0.5);
            let b = Complex64::from_polar(r, std::f64::consts::TAU * th);
            let alpha = match i % 4 {
                0 => RealParam::parse("sqrt(2)", None).unwrap(),
                1 => RealParam::parse("(1+sqrt(5))/2", None).unwrap(),
                2 => RealParam::parse("7/3", None).unwrap(),
                _ => RealParam::parse("(0+sqrt(3))/2", None).unwrap(),
            };
            if (a.abs() - r).abs() < 1e-3 {
                continue;
            }
            let rep = conjugate_select(&x, a, b, &alpha, (i % 5) as i64 - 2, 100).unwrap();
            assert!(
                rep.pointwise_residual <= 1e-10,
                "tuple {i}: residual {}",
                rep.pointwise_residual
            );
            assert!(
                rep.sum_residual <= 1e-8,
                "tuple {i}: sum residual {}",
                rep.sum_residual
            );
        }
    }

    #[test]
    fn zero_alpha_is_rejected() {
        let err = conjugate_select(
            &RealParam::parse("1/3", None).unwrap(),
            1.0,
            Complex64::new(0.5, 0.0),
            &RealParam::from_int(0),
            0,
            10,
        )
        .unwrap_err();
        assert!(matches!(err, Error::Parameter(_)));
    }
}
