//! Exceptional-set averages.
//!
//! Two statistics share this module. `generic_reciprocal_sums` estimates
//! the measure of base points whose reciprocal distance sums to a finite
//! set of singular phases exceed the generic thresholds C·log N and C.
//! `an_profile` evaluates the per-orbit quantity
//!
//!   A_n(x) = ||a_n - g1 + t<b_n - g2>|| + ||a_n - g1||^2 + ||b_n - g2||^2,
//!
//! with a_n = alpha(x+n), b_n = beta(x+n), (g1, g2) a zero of the
//! polynomial and t its slope, and reports (1/N^gamma)·sum 1/A_n together
//! with the small-set analysis of the balanced direction alpha + t·beta = 0.

use rand::Rng;
use serde::Serialize;

use crate::diophantine::{min_weighted_norm_trusted, Weight};
use crate::error::{Error, Result};
use crate::mc::{par_map_indexed, sample_rng};
use crate::real::{RealParam, TrustedReal};
use crate::sum::Neumaier;
use crate::torus::{dist_int, frac, sfrac};
use crate::trigpoly::{zeros, Coefficients};

use super::phase::phase_stream;

#[derive(Debug, Clone, Serialize)]
pub struct ExceptionalSetEstimate {
    pub delta: f64,
    pub samples: u64,
    pub seed: u64,
    /// Coefficient of log N for the linear sum (given or fitted).
    pub c_log: f64,
    /// Constant threshold for the quadratic sum (given or fitted).
    pub c_plain: f64,
    pub fitted: bool,
    /// Fraction of kept samples violating either threshold.
    pub violating_fraction: f64,
    pub std_error: f64,
    /// Fraction of samples discarded inside the removed neighborhoods.
    pub removed_fraction: f64,
    pub log_n: f64,
}

/// Both reciprocal sums at one base point: ((1/N)·sum 1/d_n,
/// (1/N^2)·sum 1/d_n^2) with d_n the torus distance from x to points[n].
pub fn recip_stats(points: &[f64], x: f64) -> (f64, f64) {
    let n = points.len() as f64;
    let mut s1 = Neumaier::new();
    let mut s2 = Neumaier::new();
    for &p in points {
        let d = dist_int(x - p);
        s1.add(1.0 / d);
        s2.add(1.0 / (d * d));
    }
    (s1.total() / n, s2.total() / (n * n))
}

/// Monte Carlo estimate of the measure of base points whose reciprocal
/// sums to `points` exceed c_log·log N (linear) or c_plain (quadratic),
/// after removing the delta/(10N)-neighborhoods of the points themselves.
/// With `thresholds = None` the constants are fitted as the (1-delta)
/// sample quantiles.
pub fn generic_reciprocal_sums(
    points: &[f64],
    delta: f64,
    samples: u64,
    seed: u64,
    thresholds: Option<(f64, f64)>,
) -> Result<ExceptionalSetEstimate> {
    if points.is_empty() {
        return Err(Error::Parameter("no singular points supplied".into()));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::Parameter("delta must lie in (0,1)".into()));
    }
    if samples == 0 {
        return Err(Error::Parameter("need at least one sample".into()));
    }
    let n = points.len() as f64;
    let log_n = n.ln().max(1.0);
    let cutoff = delta / (10.0 * n);

    // Per sample: None when removed, otherwise the two normalized stats.
    let stats: Vec<Option<(f64, f64)>> = par_map_indexed(samples, |i| {
        let mut rng = sample_rng(seed, i);
        let x: f64 = rng.gen();
        if points.iter().any(|&p| dist_int(x - p) < cutoff) {
            return None;
        }
        let (s1, s2) = recip_stats(points, x);
        Some((s1 / log_n, s2))
    });

    let kept: Vec<(f64, f64)> = stats.iter().flatten().copied().collect();
    let removed = samples as usize - kept.len();
    if kept.is_empty() {
        return Err(Error::Parameter(
            "all samples fell in removed neighborhoods; delta too large".into(),
        ));
    }

    let (c_log, c_plain, fitted) = match thresholds {
        Some((a, b)) => (a, b, false),
        None => {
            let q = |mut v: Vec<f64>| -> f64 {
                v.sort_by(|a, b| a.partial_cmp(b).unwrap());
                let idx = (((1.0 - delta) * v.len() as f64).ceil() as usize)
                    .clamp(1, v.len())
                    - 1;
                v[idx]
            };
            (
                q(kept.iter().map(|s| s.0).collect()),
                q(kept.iter().map(|s| s.1).collect()),
                true,
            )
        }
    };

    let violating = kept
        .iter()
        .filter(|(a, b)| *a > c_log || *b > c_plain)
        .count();
    let f = violating as f64 / kept.len() as f64;
    Ok(ExceptionalSetEstimate {
        delta,
        samples,
        seed,
        c_log,
        c_plain,
        fitted,
        violating_fraction: f,
        std_error: (f * (1.0 - f) / kept.len() as f64).sqrt(),
        removed_fraction: removed as f64 / samples as f64,
        log_n,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct SmallSetReport {
    pub xi: f64,
    pub cardinality: u64,
    /// N·(1/(M·D))^{1/(gamma+epsilon)}.
    pub bound: f64,
    pub within_bound: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct AnProfile {
    pub n: u64,
    pub gamma: f64,
    /// (1/N^gamma)·sum over the orbit of 1/A_n.
    pub profile: f64,
    /// Same normalization applied to the quadratic fallback
    /// sum 1/||b_n - g2||^2, an upper bound for the profile.
    pub fallback_profile: f64,
    /// "linear" when alpha + t·beta != 0, "balanced" when it vanishes,
    /// "no-triangle" when the polynomial has no zeros at all.
    pub branch: &'static str,
    pub alpha_plus_t_beta: f64,
    pub min_a: f64,
    pub argmin_n: u64,
    /// Resonant-index analysis of the balanced direction, one entry per
    /// candidate xi.
    pub small_sets: Vec<SmallSetReport>,
    /// True when some resonant index brings the first phase within
    /// delta·N^{-1/10} of the zero, i.e. x lies in the exceptional set.
    pub flagged: bool,
    pub m_cutoff: Option<f64>,
    pub flags: Vec<String>,
}

/// Evaluate the A_n profile of one orbit.
#[allow(clippy::too_many_arguments)]
pub fn an_profile(
    alpha: &RealParam,
    beta: &RealParam,
    coeffs: &Coefficients,
    x: &RealParam,
    n: u64,
    gamma: f64,
    epsilon: f64,
    delta: f64,
) -> Result<AnProfile> {
    if n == 0 {
        return Err(Error::Parameter("empty orbit".into()));
    }
    let zs = zeros(coeffs);
    let norm = (n as f64).powf(gamma);
    let mut flags = Vec::new();

    if zs.no_triangle {
        // No zeros: |P| is bounded below by the triangle defect, so the
        // profile is evaluated on |P| directly.
        let (m0, m1, m2) = (
            coeffs.c0.norm(),
            coeffs.c1.norm(),
            coeffs.c2.norm(),
        );
        let gap = (m0 - m1 - m2).max(m1 - m0 - m2).max(m2 - m0 - m1);
        let pa = phase_stream(alpha, x, n, true)?;
        let pb = phase_stream(beta, x, n, true)?;
        let mut acc = Neumaier::new();
        let mut min_a = f64::INFINITY;
        let mut argmin = 0u64;
        for i in 0..n as usize {
            let v = coeffs.eval(pa[i], pb[i]).norm();
            if v < min_a {
                min_a = v;
                argmin = i as u64;
            }
            acc.add(1.0 / v);
        }
        flags.push(format!("no zeros; |P| >= {gap:.6} pointwise"));
        return Ok(AnProfile {
            n,
            gamma,
            profile: acc.total() / norm,
            fallback_profile: (n as f64) / (gap * gap) / norm,
            branch: "no-triangle",
            alpha_plus_t_beta: f64::NAN,
            min_a,
            argmin_n: argmin,
            small_sets: Vec::new(),
            flagged: false,
            m_cutoff: None,
            flags,
        });
    }

    let (g1, g2) = zs.zeros[0];
    let t = zs.t;
    let pa = phase_stream(alpha, x, n, true)?;
    let pb = phase_stream(beta, x, n, true)?;
    let mut acc = Neumaier::new();
    let mut fallback = Neumaier::new();
    let mut min_a = f64::INFINITY;
    let mut argmin = 0u64;
    for i in 0..n as usize {
        let u = pa[i] - g1;
        let v = sfrac(pb[i] - g2);
        let a = dist_int(u + t * v) + dist_int(u).powi(2) + dist_int(pb[i] - g2).powi(2);
        if a < min_a {
            min_a = a;
            argmin = i as u64;
        }
        if a == 0.0 {
            flags.push(format!("orbit point {i} sits exactly on the zero set"));
            acc.add(f64::INFINITY);
        } else {
            acc.add(1.0 / a);
        }
        let db = dist_int(pb[i] - g2);
        fallback.add(1.0 / (db * db));
    }

    let af = alpha.to_f64();
    let bf = beta.to_f64();
    let drift = af + t * bf;
    let balanced = drift.abs() <= 1e-9 * (af.abs() + (t * bf).abs() + 1.0);

    let mut small_sets = Vec::new();
    let mut flagged = false;
    let mut m_cutoff = None;
    let branch = if balanced {
        let ge = gamma + epsilon;
        if ge <= 1.0 {
            return Err(Error::Parameter(format!(
                "gamma + epsilon = {ge} must exceed 1 in the balanced branch"
            )));
        }
        let tr = TrustedReal::quotient(alpha, beta)?;
        let d_eps = min_weighted_norm_trusted(&tr, n, Weight::Power(ge))?.min;
        let m = ((n as f64) * bf.abs()).powf((gamma - 1.0) * ge / (ge - 1.0))
            * d_eps.powf(1.0 / (ge - 1.0));
        m_cutoff = Some(m);
        let card_bound = (n as f64) * (1.0 / (m * d_eps)).powf(1.0 / ge);
        let ratio = RealParam::from_exact(tr.value.clone());
        let rp = phase_stream(&ratio, &RealParam::from_int(0), n, true)?;
        let small_tol = delta * (n as f64).powf(-0.1);
        for xi in [frac(g1 + t * g2), frac(g1 + t * g2 + t)] {
            let mut members = Vec::new();
            for (i, &ph) in rp.iter().enumerate() {
                if dist_int(ph - xi) <= 1.0 / m {
                    members.push(i);
                }
            }
            for &i in &members {
                if dist_int(pa[i] - g1) < small_tol {
                    flagged = true;
                }
            }
            small_sets.push(SmallSetReport {
                xi,
                cardinality: members.len() as u64,
                bound: card_bound,
                within_bound: members.len() as f64 <= card_bound + 1e-9,
            });
        }
        "balanced"
    } else {
        "linear"
    };

    Ok(AnProfile {
        n,
        gamma,
        profile: acc.total() / norm,
        fallback_profile: fallback.total() / norm,
        branch,
        alpha_plus_t_beta: drift,
        min_a,
        argmin_n: argmin,
        small_sets,
        flagged,
        m_cutoff,
        flags,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn re(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn recip_stats_match_hand_computation() {
        // Points at 0 and 1/2, x = 1/4: both distances are 1/4.
        let (s1, s2) = recip_stats(&[0.0, 0.5], 0.25);
        assert!((s1 - 4.0).abs() < 1e-12);
        assert!((s2 - 8.0).abs() < 1e-12);
    }

    #[test]
    fn near_singular_points_violate_any_reasonable_threshold() {
        let points = vec![0.3];
        let x = 0.3 + 1e-9;
        let (s1, _) = recip_stats(&points, x);
        assert!(s1 > 1e8);
    }

    #[test]
    fn fitted_thresholds_keep_violations_near_delta() {
        let alpha = RealParam::parse("sqrt(2)", None).unwrap();
        let points = phase_stream(&alpha, &RealParam::from_int(0), 200, true).unwrap();
        let est = generic_reciprocal_sums(&points, 0.05, 2000, 7, None).unwrap();
        assert!(est.fitted);
        assert!(est.violating_fraction <= 2.0 * 0.05 + 3.0 * est.std_error);
        assert!(est.removed_fraction <= 0.05);
        assert!(est.c_log > 0.0 && est.c_plain > 0.0);
    }

    #[test]
    fn same_seed_reproduces_the_estimate() {
        let points = vec![0.1, 0.4, 0.8];
        let a = generic_reciprocal_sums(&points, 0.1, 500, 42, None).unwrap();
        let b = generic_reciprocal_sums(&points, 0.1, 500, 42, None).unwrap();
        assert_eq!(a.violating_fraction, b.violating_fraction);
        assert_eq!(a.c_log, b.c_log);
    }

    #[test]
    fn profile_is_bounded_by_quadratic_fallback() {
        // A_n >= ||b_n - g2||^2 pointwise, so profile <= fallback_profile.
        let alpha = RealParam::parse("(1+sqrt(5))/2", None).unwrap();
        let beta = RealParam::from_int(1);
        let coeffs = Coefficients::new(re(1.0), re(1.0), re(1.0)).unwrap();
        let x = RealParam::parse("2/7", None).unwrap();
        let p = an_profile(&alpha, &beta, &coeffs, &x, 500, 2.0, 0.1, 0.01).unwrap();
        assert!(p.profile <= p.fallback_profile + 1e-9);
        assert_eq!(p.branch, "linear");
        assert!(p.min_a > 0.0);
    }

    #[test]
    fn no_triangle_branch_reports_the_gap() {
        let alpha = RealParam::parse("sqrt(2)", None).unwrap();
        let beta = RealParam::from_int(1);
        let coeffs = Coefficients::new(re(3.0), re(1.0), re(1.0)).unwrap();
        let x = RealParam::parse("1/3", None).unwrap();
        let p = an_profile(&alpha, &beta, &coeffs, &x, 300, 2.0, 0.1, 0.01).unwrap();
        assert_eq!(p.branch, "no-triangle");
        // |P| >= 1 pointwise so the profile is at most N^{1-gamma}.
        assert!(p.profile <= 300.0f64.powf(-1.0) + 1e-9);
        assert!(p.min_a >= 1.0 - 1e-9);
    }

    #[test]
    fn balanced_direction_detects_small_sets() {
        // Degenerate triple with moduli (s/2 - 1/2, 1/2, s/2) for s = sqrt(2):
        // m2 = m0 + m1 exactly in f64 (halving and the Sterbenz subtraction
        // are exact). At the single zero u2 points against u0 and u1, so the
        // slope comes from s10 = m1/m0 = 1 + sqrt(2) as
        // t = -(1 + s10)/s10 = -sqrt(2). Choosing alpha = s*beta makes
        // alpha + t*beta vanish to rounding while alpha/beta = sqrt(2)
        // stays irrational.
        let s = std::f64::consts::SQRT_2;
        let coeffs = Coefficients::new(re(s / 2.0 - 0.5), re(0.5), re(s / 2.0)).unwrap();
        let alpha = RealParam::parse("sqrt(2)", None).unwrap();
        let beta = RealParam::from_int(1);
        let x = RealParam::parse("1/5", None).unwrap();
        let p = an_profile(&alpha, &beta, &coeffs, &x, 1000, 1.5, 0.6, 0.01).unwrap();
        assert_eq!(p.branch, "balanced");
        assert!((p.alpha_plus_t_beta).abs() < 1e-12);
        assert_eq!(p.small_sets.len(), 2);
        for set in &p.small_sets {
            assert!(
                set.within_bound,
                "cardinality {} bound {}",
                set.cardinality, set.bound
            );
        }
    }
}
