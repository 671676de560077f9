//! Divergence of the best-case reciprocal average.
//!
//! For irrational alpha, no base point x keeps (1/N)·sum_{n<=N}
//! 1/||x + n·alpha|| bounded: the infimum over x grows like log m_N,
//! where m_N is the largest convergent denominator of alpha below N. The
//! demo takes the infimum over a uniform grid enriched with points just
//! beside every orbit point -n·alpha (the near-minimizers), and reports
//! the ratio of the infimum to log m_N along an N-ladder.
//!
//! The candidate minimum is computed with per-candidate early exit: a
//! partial sum strictly above the running best can never win, and a
//! candidate pruned that way is strictly above the global minimum, so the
//! returned value and argmin match the sequential scan bit for bit no
//! matter how rayon schedules the chunks.

use rayon::prelude::*;
use serde::Serialize;

use crate::cf::continued_fraction;
use crate::error::{Error, Result};
use crate::real::RealParam;
use crate::torus::{dist_int, frac};

use super::phase::phase_stream;

#[derive(Debug, Clone, Serialize)]
pub struct DivergenceRow {
    pub n: u64,
    /// Largest convergent denominator <= n.
    pub m_n: u64,
    /// inf over candidates of (1/n)·sum 1/||x + k·alpha||.
    pub inf_avg: f64,
    pub argmin_x: f64,
    pub ratio_to_log: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct DivergenceReport {
    pub grid: u64,
    /// False for rational alpha, where m_N stalls and nothing diverges.
    pub irrational: bool,
    pub rows: Vec<DivergenceRow>,
    pub flags: Vec<String>,
}

/// (1/n)·sum_{k=1}^{n} 1/||x + theta_k|| for externally supplied phases.
pub fn reciprocal_avg_at(theta: &[f64], n: usize, x: f64) -> f64 {
    let mut acc = 0.0;
    for &t in &theta[1..=n] {
        acc += 1.0 / dist_int(x + t);
    }
    acc / n as f64
}

/// Infimum of the reciprocal average over a grid plus near-orbit points.
pub fn divergence_demo(
    alpha: &RealParam,
    ladder: &[u64],
    grid: u64,
) -> Result<DivergenceReport> {
    if grid < 100 {
        return Err(Error::Parameter("grid must have at least 100 points".into()));
    }
    if ladder.is_empty() || ladder.iter().any(|&n| n == 0) {
        return Err(Error::Parameter("ladder must list positive lengths".into()));
    }
    let mut ladder = ladder.to_vec();
    ladder.sort_unstable();
    let n_max = *ladder.last().unwrap();

    let cf = continued_fraction(alpha, 64)?;
    let denoms = cf.denominators_u64();
    let mut flags = Vec::new();
    let irrational = !cf.finite;
    if !irrational {
        flags.push("rational frequency: m_N stalls at the final denominator".into());
    }

    let theta = phase_stream(alpha, &RealParam::from_int(0), n_max + 1, true)?;
    let step = 1.0 / grid as f64;

    let mut rows = Vec::with_capacity(ladder.len());
    for &n in &ladder {
        let m_n = denoms
            .iter()
            .filter(|&&q| q <= n)
            .max()
            .copied()
            .ok_or_else(|| Error::Parameter("no convergent denominator below ladder".into()))?;

        let mut cands: Vec<f64> = (0..grid).map(|i| i as f64 * step).collect();
        for &t in &theta[1..=n as usize] {
            let c = frac(1.0 - t);
            cands.push(frac(c + step));
            cands.push(frac(c - step + 1.0));
        }

        // Sequential-equivalent parallel infimum of the candidate sums.
        let (best_sum, best_idx) = cands
            .par_iter()
            .enumerate()
            .fold(
                || (f64::INFINITY, usize::MAX),
                |best, (i, &x)| {
                    let mut acc = 0.0;
                    for &t in &theta[1..=n as usize] {
                        acc += 1.0 / dist_int(x + t);
                        if acc > best.0 {
                            return best;
                        }
                    }
                    if acc < best.0 || (acc == best.0 && i < best.1) {
                        (acc, i)
                    } else {
                        best
                    }
                },
            )
            .reduce(
                || (f64::INFINITY, usize::MAX),
                |a, b| {
                    if b.0 < a.0 || (b.0 == a.0 && b.1 < a.1) {
                        b
                    } else {
                        a
                    }
                },
            );
        let inf_avg = best_sum / n as f64;
        rows.push(DivergenceRow {
            n,
            m_n,
            inf_avg,
            argmin_x: cands[best_idx],
            ratio_to_log: inf_avg / (m_n.max(2) as f64).ln(),
        });
    }

    Ok(DivergenceReport {
        grid,
        irrational,
        rows,
        flags,
    })
}
