//! Paired-orbit comparison at certified scales.
//!
//! For a scale entry with length P and shift y = x - P, the forward
//! products over x and y differ per factor by |e(P·alpha) - 1|, which the
//! scale construction keeps below 10·D/(P·M). The observed log ratio
//! log|prod(y)| - log|prod(x)| is collected across entries and the decay
//! exponent L is fitted by least squares through the origin against log P.

use serde::Serialize;

use crate::diophantine::ScaleSequence;
use crate::error::{Error, Result};
use crate::exact::ExactReal;
use crate::real::RealParam;
use crate::trigpoly::OrbitPolynomial;

use super::product::{orbit_product, reciprocal_average, Direction, Orbit, OrbitReport, RecipNorm};

#[derive(Debug, Clone, Serialize)]
pub struct PairComparison {
    pub k: usize,
    pub x: f64,
    pub y: f64,
    pub p: f64,
    pub log_p: f64,
    pub forward: OrbitReport,
    pub shifted: OrbitReport,
    /// log|prod over y| - log|prod over x|.
    pub log_ratio: f64,
    /// |e(P·alpha) - 1|, the exact per-factor displacement.
    pub step_lhs: f64,
    /// 10·D/(P·M), the certified per-factor budget.
    pub step_rhs: f64,
    pub step_bound_ok: bool,
    /// Reciprocal averages of the numerator and denominator factors, for
    /// ratio polynomials.
    pub recip_p: Option<f64>,
    pub recip_q: Option<f64>,
}

/// Compare the orbit products at x and x - P for one scale entry given by
/// its exact length. A decimal x contributes its mantissa exactly; the
/// shifted base inherits that representative.
#[allow(clippy::too_many_arguments)]
pub fn pair_compare_entry(
    alpha: &RealParam,
    beta: &RealParam,
    polynomial: &OrbitPolynomial,
    p_exact: &ExactReal,
    p_floor: u64,
    m: f64,
    d: f64,
    k: usize,
    x: &RealParam,
    exceptional_coef: Option<f64>,
    force: bool,
) -> Result<PairComparison> {
    if p_floor == 0 {
        return Err(Error::Parameter("scale entry has no orbit points".into()));
    }
    let p = p_exact.to_f64();
    let orbit_x = Orbit {
        x: x.clone(),
        len: p_floor,
        direction: Direction::Forward,
        polynomial: polynomial.clone(),
        alpha: alpha.clone(),
        beta: beta.clone(),
    };

    if let Some(coef) = exceptional_coef {
        let avg = reciprocal_average(&orbit_x, RecipNorm::PerScale { m, p }, Some(coef))?;
        if avg.bound_satisfied == Some(false) && !force {
            return Err(Error::Parameter(format!(
                "base point is in the estimated exceptional set (normalized reciprocal \
                 average {:?} exceeds {:.4}·ln P); pass force to compare anyway",
                avg.reciprocal_avg, coef
            )));
        }
    }

    let y_val = x.value().sub(p_exact)?;
    let y_param = RealParam::from_exact(y_val);
    let orbit_y = Orbit {
        x: y_param.clone(),
        ..orbit_x.clone()
    };

    let rep_x = orbit_product(&orbit_x)?;
    let rep_y = orbit_product(&orbit_y)?;
    let (lx, ly) = match (rep_x.log_product, rep_y.log_product) {
        (Some(a), Some(b)) => (a, b),
        _ => {
            return Err(Error::Parameter(
                "orbit product underflowed; the pair ratio is not defined".into(),
            ))
        }
    };

    let step_lhs =
        2.0 * (std::f64::consts::PI * p_exact.mul(&alpha.value())?.dist_to_int().to_f64()).sin();
    let step_rhs = 10.0 * d / (p * m);

    let mut recip_p = None;
    let mut recip_q = None;
    if let OrbitPolynomial::Ratio { a, b, c, d: dd } = polynomial {
        let num = Orbit {
            polynomial: OrbitPolynomial::OneFreq { a: *a, b: *b },
            ..orbit_x.clone()
        };
        let den = Orbit {
            polynomial: OrbitPolynomial::OneFreq { a: *c, b: *dd },
            alpha: beta.clone(),
            ..orbit_x.clone()
        };
        recip_p = reciprocal_average(&num, RecipNorm::PerScale { m, p }, None)?.reciprocal_avg;
        recip_q = reciprocal_average(&den, RecipNorm::PerScale { m, p }, None)?.reciprocal_avg;
    }

    Ok(PairComparison {
        k,
        x: x.to_f64(),
        y: y_param.to_f64(),
        p,
        log_p: p.ln(),
        forward: rep_x,
        shifted: rep_y,
        log_ratio: ly - lx,
        step_lhs,
        step_rhs,
        step_bound_ok: step_lhs <= step_rhs + 1e-12,
        recip_p,
        recip_q,
    })
}

/// Pair comparison against entry `k` of a certified scale sequence.
#[allow(clippy::too_many_arguments)]
pub fn pair_compare(
    alpha: &RealParam,
    beta: &RealParam,
    polynomial: &OrbitPolynomial,
    seq: &ScaleSequence,
    k: usize,
    x: &RealParam,
    exceptional_coef: Option<f64>,
    force: bool,
) -> Result<PairComparison> {
    let entry = seq
        .entries
        .get(k)
        .ok_or_else(|| Error::Parameter(format!("no scale entry {k}")))?;
    let exact = &seq.exact[k];
    if entry.p_floor <= 0 {
        return Err(Error::Parameter(format!(
            "scale entry {k} has floor(P) = {} <= 0",
            entry.p_floor
        )));
    }
    pair_compare_entry(
        alpha,
        beta,
        polynomial,
        &exact.p,
        entry.p_floor as u64,
        entry.m,
        seq.d,
        k,
        x,
        exceptional_coef,
        force,
    )
}

/// Ratio-polynomial variant; identical mechanics, but refuses other forms
/// so the numerator/denominator split in the report is always populated.
#[allow(clippy::too_many_arguments)]
pub fn ratio_pair_compare(
    alpha: &RealParam,
    beta: &RealParam,
    polynomial: &OrbitPolynomial,
    seq: &ScaleSequence,
    k: usize,
    x: &RealParam,
    exceptional_coef: Option<f64>,
    force: bool,
) -> Result<PairComparison> {
    if !matches!(polynomial, OrbitPolynomial::Ratio { .. }) {
        return Err(Error::Parameter(
            "ratio comparison needs a ratio polynomial".into(),
        ));
    }
    pair_compare(alpha, beta, polynomial, seq, k, x, exceptional_coef, force)
}

/// Least-squares fit through the origin of |log ratio| against log P.
pub fn fit_l(pairs: &[PairComparison]) -> f64 {
    let num: f64 = pairs.iter().map(|p| p.log_p * p.log_ratio.abs()).sum();
    let den: f64 = pairs.iter().map(|p| p.log_p * p.log_p).sum();
    if den == 0.0 {
        0.0
    } else {
        num / den
    }
}
