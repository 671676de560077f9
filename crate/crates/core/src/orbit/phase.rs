//! Exact-anchored phase streams.
//!
//! Orbit statistics need frac(freq·(x+n)) for up to 10^5 consecutive n.
//! Stepping a plain f64 accumulator loses one rounding per step and the
//! drift would reach the 1e-12 comparison tolerances by n ~ 10^4, so the
//! tracker is re-seeded every `ANCHOR_INTERVAL` steps from a correctly
//! rounded exact evaluation. Between anchors at most 1024 roundings of
//! size ~1e-16 accumulate, keeping every emitted phase within ~2e-13 of
//! the true value.

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::real::RealParam;

/// Maximum tolerated phase displacement from decimal-input uncertainty.
pub const PHASE_DRIFT_TOL: f64 = 1e-6;

/// Steps between exact re-anchors of the f64 tracker.
const ANCHOR_INTERVAL: u64 = 1024;

/// Refuse streams whose decimal-parameter uncertainty could move a phase
/// by more than [`PHASE_DRIFT_TOL`]. Exact inputs always pass.
pub fn phase_budget(freq: &RealParam, x: &RealParam, count: u64) -> Result<()> {
    let mut drift = 0.0f64;
    if let Some(d) = freq.digits() {
        // freq enters multiplied by values as large as |x| + count.
        let reach = x.to_f64().abs() + count as f64;
        drift += reach * 10f64.powi(-(d as i32));
    }
    if let Some(d) = x.digits() {
        drift += freq.to_f64().abs() * 10f64.powi(-(d as i32));
    }
    if drift > PHASE_DRIFT_TOL {
        return Err(Error::PrecisionExceeded(format!(
            "decimal uncertainty moves phases by up to {drift:.3e} over {count} steps \
             (tolerance {PHASE_DRIFT_TOL:.0e}); raise ~digits= or shorten the orbit"
        )));
    }
    Ok(())
}

/// The parameter's negation, preserving decimal trust bookkeeping.
pub fn neg_param(p: &RealParam) -> RealParam {
    match p {
        RealParam::Exact(v) => RealParam::Exact(v.neg()),
        RealParam::Decimal { mant, places, digits } => RealParam::Decimal {
            mant: -mant.clone(),
            places: *places,
            digits: *digits,
        },
    }
}

/// Phases frac(freq·(x + o_n)) where o_n = n for forward streams and
/// o_n = -(n+1) for backward ones (points x-1, x-2, ...), n < count.
pub fn phase_stream(freq: &RealParam, x: &RealParam, count: u64, forward: bool) -> Result<Vec<f64>> {
    phase_budget(freq, x, count)?;
    let fv = freq.value();
    let fx = fv.mul(&x.value())?;
    let step = if forward {
        fv.frac().to_f64()
    } else {
        fv.neg().frac().to_f64()
    };
    let mut out = Vec::with_capacity(count as usize);
    let mut p = 0.0f64;
    for n in 0..count {
        if n % ANCHOR_INTERVAL == 0 {
            let off = if forward {
                BigInt::from(n)
            } else {
                -BigInt::from(n + 1)
            };
            p = fx.add(&fv.mul_bigint(&off))?.frac().to_f64();
        } else {
            p += step;
            if p >= 1.0 {
                p -= 1.0;
            }
            if p < 0.0 {
                p += 1.0;
            }
        }
        out.push(p);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::torus::dist_int;

    fn exact_phase(freq: &RealParam, x: &RealParam, off: i64) -> f64 {
        let fv = freq.value();
        fv.mul(&x.value())
            .unwrap()
            .add(&fv.mul_bigint(&BigInt::from(off)))
            .unwrap()
            .frac()
            .to_f64()
    }

    #[test]
    fn forward_stream_tracks_exact_phases() {
        let freq = RealParam::parse("sqrt(2)", None).unwrap();
        let x = RealParam::parse("3/7", None).unwrap();
        let ph = phase_stream(&freq, &x, 5000, true).unwrap();
        for &n in &[0i64, 1, 977, 1023, 1024, 2500, 4999] {
            let want = exact_phase(&freq, &x, n);
            assert!(
                dist_int(ph[n as usize] - want) < 1e-12,
                "n={n}: {} vs {}",
                ph[n as usize],
                want
            );
        }
    }

    #[test]
    fn backward_stream_uses_negative_offsets() {
        let freq = RealParam::parse("(1+sqrt(5))/2", None).unwrap();
        let x = RealParam::parse("1/3", None).unwrap();
        let ph = phase_stream(&freq, &x, 300, false).unwrap();
        for &n in &[0i64, 1, 150, 299] {
            let want = exact_phase(&freq, &x, -(n + 1));
            assert!(dist_int(ph[n as usize] - want) < 1e-12);
        }
    }

    #[test]
    fn decimal_budget_rejects_long_low_precision_streams() {
        let freq = RealParam::parse("1.414213562~digits=9", None).unwrap();
        let x = RealParam::from_int(0);
        assert!(phase_stream(&freq, &x, 10, true).is_ok());
        let err = phase_stream(&freq, &x, 100_000, true).unwrap_err();
        assert!(matches!(err, Error::PrecisionExceeded(_)));
    }

    #[test]
    fn phases_stay_in_unit_interval() {
        let freq = RealParam::parse("99/70", None).unwrap();
        let x = RealParam::parse("-5/9", None).unwrap();
        for fwd in [true, false] {
            for p in phase_stream(&freq, &x, 4000, fwd).unwrap() {
                assert!((0.0..1.0).contains(&p));
            }
        }
    }
}
