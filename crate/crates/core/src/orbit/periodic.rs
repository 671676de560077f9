//! Product comparisons for rational frequencies.
//!
//! With beta = p/r in lowest terms, the factor Q(u) = C + D·e(beta·u) is
//! r-periodic in integer steps, so T(u) = |Q(u)·Q(u+1)···Q(u+r-1)| is
//! invariant under u -> u+1. Backward products from z and forward products
//! from x then differ by a quantity
//!
//!   K_N = log prod_{n=-N+m}^{-1}|Q(lo+n)| - log prod_{n=0}^{N}|Q(hi+n)|
//!
//! whose N-dependence cancels whenever T(x) = T(z); the ladder of K_N
//! values exhibits that cancellation. The dominant base point (larger
//! log T) takes the forward role.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::real::RealParam;
use crate::sum::Neumaier;
use crate::trigpoly::e;

/// Largest supported ladder length.
const LADDER_CAP: u64 = 100_000;

#[derive(Debug, Clone, Serialize)]
pub struct PeriodicRow {
    pub n: u64,
    pub backward_log: f64,
    pub forward_log: f64,
    pub k_n: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct PeriodicReport {
    /// Denominator of the frequency in lowest terms.
    pub r: u64,
    /// |log T(x+1) - log T(x)|.
    pub periodicity_residual: f64,
    pub log_t_x: f64,
    pub log_t_z: f64,
    /// "x-dominant" when log T(x) >= log T(z), else "z-dominant".
    pub branch: &'static str,
    pub rows: Vec<PeriodicRow>,
    pub k_mean: f64,
    pub k_spread: f64,
}

/// Exact phase cycle frac(beta·u + beta·j), j = 0..r-1.
fn phase_cycle(beta: &RealParam, u: &RealParam, r: u64) -> Result<Vec<f64>> {
    let bv = beta.value();
    let mut cur = bv.mul(&u.value())?.frac();
    let mut cycle = Vec::with_capacity(r as usize);
    for j in 0..r {
        if j > 0 {
            cur = cur.add(&bv)?.frac();
        }
        cycle.push(cur.to_f64());
    }
    Ok(cycle)
}

fn log_q(c: Complex64, d: Complex64, phase: f64) -> Result<f64> {
    let v = (c + d * e(phase)).norm();
    if v == 0.0 {
        return Err(Error::Singularity(
            "orbit point hits a zero of the periodic factor".into(),
        ));
    }
    Ok(v.ln())
}

/// Sum of ln|Q| over n in [from, to] using the r-periodic phase cycle.
fn range_log(c: Complex64, d: Complex64, cycle: &[f64], from: i64, to: i64) -> Result<f64> {
    let r = cycle.len() as i64;
    let mut acc = Neumaier::new();
    for n in from..=to {
        acc.add(log_q(c, d, cycle[n.rem_euclid(r) as usize])?);
    }
    Ok(acc.total())
}

/// Verify T's integer-shift invariance and tabulate K_N over the ladder.
#[allow(clippy::too_many_arguments)]
pub fn periodic_product_check(
    c: Complex64,
    d: Complex64,
    beta: &RealParam,
    x: &RealParam,
    z: &RealParam,
    m: i64,
    ladder: &[u64],
) -> Result<PeriodicReport> {
    let bv = beta.value();
    let rat = bv
        .as_rational()
        .ok_or_else(|| Error::Parameter("periodic check needs a rational frequency".into()))?
        .clone();
    let r: u64 = rat
        .denom()
        .try_into()
        .map_err(|_| Error::Parameter("frequency denominator is too large".into()))?;
    if ladder.is_empty() {
        return Err(Error::Parameter("empty ladder".into()));
    }
    for &n in ladder {
        if n > LADDER_CAP {
            return Err(Error::Parameter(format!(
                "ladder length {n} exceeds the supported cap {LADDER_CAP}"
            )));
        }
        if (n as i64) < m + 1 {
            return Err(Error::Parameter(format!(
                "ladder length {n} leaves no backward terms for offset {m}"
            )));
        }
    }

    let cycle_x = phase_cycle(beta, x, r)?;
    let cycle_z = phase_cycle(beta, z, r)?;
    let x1 = RealParam::from_exact(x.value().add_bigint(&1.into()));
    let cycle_x1 = phase_cycle(beta, &x1, r)?;

    let log_t_x = range_log(c, d, &cycle_x, 0, r as i64 - 1)?;
    let log_t_x1 = range_log(c, d, &cycle_x1, 0, r as i64 - 1)?;
    let log_t_z = range_log(c, d, &cycle_z, 0, r as i64 - 1)?;
    let periodicity_residual = (log_t_x1 - log_t_x).abs();

    let (branch, cycle_hi, cycle_lo) = if log_t_x >= log_t_z {
        ("x-dominant", &cycle_x, &cycle_z)
    } else {
        ("z-dominant", &cycle_z, &cycle_x)
    };

    let mut rows = Vec::with_capacity(ladder.len());
    for &n in ladder {
        let backward = range_log(c, d, cycle_lo, -(n as i64) + m, -1)?;
        let forward = range_log(c, d, cycle_hi, 0, n as i64)?;
        rows.push(PeriodicRow {
            n,
            backward_log: backward,
            forward_log: forward,
            k_n: backward - forward,
        });
    }
    let ks: Vec<f64> = rows.iter().map(|r| r.k_n).collect();
    let k_mean = ks.iter().sum::<f64>() / ks.len() as f64;
    let k_spread = ks.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
        - ks.iter().cloned().fold(f64::INFINITY, f64::min);

    Ok(PeriodicReport {
        r,
        periodicity_residual,
        log_t_x,
        log_t_z,
        branch,
        rows,
        k_mean,
        k_spread,
    })
}
