//! Weighted-norm scans, best-approximant verification, and the two-regime
//! scale construction that feeds every orbit experiment.
//!
//! All order decisions (minima, invariant checks, threshold comparisons with
//! the gap parameter) are made in exact arithmetic; floating point appears
//! only in reported statistics and in the log-linear diagnostic.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;
use std::cmp::Ordering;

use crate::cf::{continued_fraction, continued_fraction_exact, ContinuedFraction};
use crate::error::{Error, Result};
use crate::exact::ExactReal;
use crate::real::{RealParam, TrustedReal};

/// Weight applied to ‖n·x‖ when scanning for the minimum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Weight {
    /// n·‖n·x‖, the classical badly-approximable statistic.
    Linear,
    /// n·ln(n)·‖n·x‖; n = 1 has weight zero and is excluded from the minimum.
    LinearLog,
    /// n^g·‖n·x‖ for a fixed exponent g.
    Power(f64),
}

impl Weight {
    pub fn name(&self) -> String {
        match self {
            Weight::Linear => "linear".into(),
            Weight::LinearLog => "linear-log".into(),
            Weight::Power(g) => format!("power({g})"),
        }
    }

    fn factor(&self, n: u64) -> f64 {
        match self {
            Weight::Linear => n as f64,
            Weight::LinearLog => n as f64 * (n as f64).ln(),
            Weight::Power(g) => (n as f64).powf(*g),
        }
    }

    /// Smallest n with strictly positive weight.
    fn first_n(&self) -> u64 {
        match self {
            Weight::LinearLog => 2,
            _ => 1,
        }
    }
}

/// Result of a weighted-norm scan over 1 ≤ n ≤ horizon.
#[derive(Debug, Clone, Serialize)]
pub struct WeightedNormStat {
    pub weight: String,
    pub horizon: u64,
    /// min over the scanned range of weight(n)·‖n·x‖.
    pub min: f64,
    pub argmin: u64,
    /// ‖argmin·x‖ itself.
    pub norm_at_argmin: f64,
}

/// Scan min weight(n)·‖n·x‖ for 1 ≤ n ≤ horizon. For the linear weight the
/// ordering is exact (cross-multiplied integer comparisons); for the other
/// weights the norm is exact and the weight factor is applied in f64.
pub fn min_weighted_norm(x: &RealParam, horizon: u64, weight: Weight) -> Result<WeightedNormStat> {
    let t = TrustedReal::from_param(x);
    min_weighted_norm_trusted(&t, horizon, weight)
}

pub fn min_weighted_norm_trusted(
    t: &TrustedReal,
    horizon: u64,
    weight: Weight,
) -> Result<WeightedNormStat> {
    if horizon < weight.first_n() {
        return Err(Error::Parameter(format!(
            "scan horizon {horizon} admits no n with positive weight"
        )));
    }
    let mut best_exact: Option<ExactReal> = None;
    let mut best_f64 = f64::INFINITY;
    let mut argmin = 0u64;
    let mut norm_at = 0.0f64;
    for n in weight.first_n()..=horizon {
        let norm = t.dist_checked(n)?;
        match weight {
            Weight::Linear => {
                let cand = norm.mul_u64(n);
                let better = match &best_exact {
                    None => true,
                    Some(b) => cand.cmp_known(b) == Ordering::Less,
                };
                if better {
                    norm_at = norm.to_f64();
                    best_f64 = cand.to_f64();
                    best_exact = Some(cand);
                    argmin = n;
                }
            }
            _ => {
                let cand = weight.factor(n) * norm.to_f64();
                if cand < best_f64 {
                    best_f64 = cand;
                    argmin = n;
                    norm_at = norm.to_f64();
                }
            }
        }
    }
    Ok(WeightedNormStat {
        weight: weight.name(),
        horizon,
        min: best_f64,
        argmin,
        norm_at_argmin: norm_at,
    })
}

/// Prefix minima of n·‖n·x‖ at the given checkpoints (ascending): one exact
/// value per checkpoint, from a single pass over 1..=max.
fn prefix_linear_mins(t: &TrustedReal, checkpoints: &[u64]) -> Result<Vec<ExactReal>> {
    debug_assert!(checkpoints.windows(2).all(|w| w[0] <= w[1]));
    let mut out = Vec::with_capacity(checkpoints.len());
    let mut best: Option<ExactReal> = None;
    let mut next = 0usize;
    let maxn = *checkpoints.last().unwrap_or(&0);
    for n in 1..=maxn {
        let cand = t.dist_checked(n)?.mul_u64(n);
        let better = match &best {
            None => true,
            Some(b) => cand.cmp_known(b) == Ordering::Less,
        };
        if better {
            best = Some(cand);
        }
        while next < checkpoints.len() && checkpoints[next] == n {
            out.push(best.clone().expect("checkpoint >= 1"));
            next += 1;
        }
    }
    Ok(out)
}

/// Outcome of checking the best-approximation property of one convergent.
#[derive(Debug, Clone, Serialize)]
pub struct BestApproxCheck {
    pub level: usize,
    pub q: String,
    /// ‖q·x‖ for the level-k denominator.
    pub q_norm: f64,
    /// Smallest ‖n·x‖ over the scanned range and where it is attained first.
    pub min_norm: f64,
    pub witness: u64,
    /// Exclusive end of the scanned range: q_{k+1}, or q_k + 1 for the final
    /// level of a rational input.
    pub range_end: u64,
    pub holds: bool,
}

/// Verify that the level-k convergent denominator minimizes ‖n·x‖ over
/// 1 ≤ n < q_{k+1} by exhaustive exact scan. `cap` bounds the scan length.
pub fn best_approximant_check(x: &RealParam, level: usize, cap: u64) -> Result<BestApproxCheck> {
    let cf = continued_fraction(x, level + 2)?;
    if level >= cf.convergents.len() {
        return Err(Error::Parameter(format!(
            "requested level {level} but only {} convergents are available",
            cf.convergents.len()
        )));
    }
    let q = cf.convergents[level].q.clone();
    let over_cap = || Error::CapExceeded {
        required: u64::MAX,
        cap,
    };
    let q_u64 = q.to_u64().ok_or_else(over_cap)?;
    let range_end = if level + 1 < cf.convergents.len() {
        cf.convergents[level + 1].q.to_u64().ok_or_else(over_cap)?
    } else if cf.finite {
        // Final convergent of a rational: later n only repeat the zero norm.
        q_u64 + 1
    } else {
        return Err(Error::PrecisionExceeded(format!(
            "level {} is the last trusted convergent; the scan range needs level {}",
            level,
            level + 1
        )));
    };
    if range_end.saturating_sub(1) > cap {
        return Err(Error::CapExceeded {
            required: range_end - 1,
            cap,
        });
    }
    let t = TrustedReal::from_param(x);
    let q_norm = t.dist_checked(q_u64)?;
    if range_end == 1 {
        // q_{k+1} = 1 leaves nothing to scan; the claim holds vacuously.
        return Ok(BestApproxCheck {
            level,
            q: q.to_string(),
            q_norm: q_norm.to_f64(),
            min_norm: q_norm.to_f64(),
            witness: q_u64,
            range_end,
            holds: true,
        });
    }
    let mut best: Option<(u64, ExactReal)> = None;
    for n in 1..range_end {
        let norm = t.dist_checked(n)?;
        let better = match &best {
            None => true,
            Some((_, b)) => norm.cmp_known(b) == Ordering::Less,
        };
        if better {
            best = Some((n, norm));
        }
    }
    let (witness, min_norm) = best.expect("range_end > 1");
    let holds = min_norm.cmp_known(&q_norm) == Ordering::Equal;
    Ok(BestApproxCheck {
        level,
        q: q.to_string(),
        q_norm: q_norm.to_f64(),
        min_norm: min_norm.to_f64(),
        witness,
        range_end,
        holds,
    })
}

/// Approximation regime of the frequency ratio, decided empirically from the
/// scan min of n·‖n·x‖ against 1/√bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    BadlyApproximable,
    WellApproximable,
}

/// How scale levels are admitted.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScaleMode {
    /// Every admissible convergent level yields an entry.
    Standard,
    /// Only levels whose log-linear statistic N·ln(N)·‖N·r‖ stays below the
    /// cap are kept; the statistic is recorded either way.
    LogLinear { kappa_max: f64 },
}

/// One admitted scale N_k with its certificates.
#[derive(Debug, Clone, Serialize)]
pub struct ScaleEntry {
    /// 1-based position in the admitted sequence.
    pub index: usize,
    /// N_k = multiplier · base_level.
    pub n: u64,
    pub multiplier: u64,
    /// Convergent denominator of α/β the entry is built on.
    pub base_level: u64,
    /// ‖N_k·α/β‖.
    pub norm: f64,
    /// N_k·‖N_k·α/β‖.
    pub n_norm: f64,
    /// min over 1 ≤ n ≤ N_k of n·‖n·α/β‖ (exact scan).
    pub brute_min: f64,
    /// n_norm / brute_min, ≥ 1 by minimality.
    pub ratio: f64,
    /// P_k = N_k/β.
    pub p: f64,
    pub p_floor: i64,
    pub p_frac: f64,
    /// M_k = D/(N_k·‖N_k·α/β‖), ≥ 1 by construction of D.
    pub m: f64,
    /// Log-linear diagnostic N_k·ln(N_k)·‖N_k·α/β‖.
    pub kappa: f64,
}

/// Exact counterparts of the per-entry quantities, kept for downstream
/// drivers that need them without rounding (pair shifts, strip widths).
#[derive(Debug, Clone)]
pub struct ScaleEntryExact {
    pub n: u64,
    pub p: ExactReal,
    pub p_frac: ExactReal,
    pub norm: ExactReal,
    pub n_norm: ExactReal,
    pub brute_min: ExactReal,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScaleSequence {
    pub alpha: String,
    pub beta: String,
    /// Gap parameter s as an exact rational.
    pub s: String,
    pub regime: Regime,
    pub search_bound: u64,
    /// min over 1 ≤ n ≤ search_bound of n·‖n·α/β‖.
    pub epsilon_empirical: f64,
    /// Certified constant: max over entries of max(ratio, n_norm).
    pub d: f64,
    pub entries: Vec<ScaleEntry>,
    /// Set when fewer entries than requested could be produced, and why.
    pub shortfall: Option<String>,
    #[serde(skip)]
    pub exact: Vec<ScaleEntryExact>,
    #[serde(skip)]
    pub d_exact: ExactReal,
}

/// Build the scale sequence N_1 < N_2 < … for frequencies (α, β) and gap s.
///
/// Levels come from convergent denominators of α/β (denominator ≥ 2). In the
/// well-approximable regime only levels with s·q_{next} > q are kept. Each
/// level takes the least multiplier 1 ≤ m ≤ ⌈1/s⌉ with {m·q/β} < s; levels
/// with no such multiplier, or that would break strict monotonicity, or whose
/// N exceeds the search bound, are skipped. All comparisons are exact.
pub fn scale_sequence(
    alpha: &RealParam,
    beta: &RealParam,
    s: &BigRational,
    count: usize,
    search_bound: u64,
    mode: ScaleMode,
) -> Result<ScaleSequence> {
    if s <= &BigRational::zero() || s >= &BigRational::one() {
        return Err(Error::Parameter(format!(
            "gap parameter s must lie strictly between 0 and 1, got {s}"
        )));
    }
    if count == 0 {
        return Err(Error::Parameter("requested zero scale entries".into()));
    }
    if search_bound < 2 {
        return Err(Error::Parameter("search bound must be at least 2".into()));
    }
    let beta_val = beta.value();
    if beta_val.is_zero() {
        return Err(Error::Parameter("beta must be nonzero".into()));
    }
    let ratio = TrustedReal::quotient(alpha, beta)?;
    // A decimal input's stored value is rational by representation; only
    // exact inputs can actually certify rationality of the ratio.
    if ratio.digits.is_none() && ratio.value.is_rational() {
        return Err(Error::RationalRatio(format!(
            "alpha/beta = {} is rational; the scale construction needs an irrational ratio",
            ratio.value
        )));
    }

    // Regime detection.
    let eps_stat = min_weighted_norm_trusted(&ratio, search_bound, Weight::Linear)?;
    let threshold = 1.0 / (search_bound as f64).sqrt();
    let regime = if eps_stat.min >= threshold {
        Regime::BadlyApproximable
    } else {
        Regime::WellApproximable
    };

    // Candidate base levels: convergent denominators with 2 <= q <= bound.
    let cf = cf_to_bound(&ratio, search_bound)?;
    let mut levels: Vec<u64> = Vec::new();
    let all: Vec<BigInt> = cf.convergents.iter().map(|c| c.q.clone()).collect();
    for (j, q) in all.iter().enumerate() {
        let Some(q64) = q.to_u64() else { continue };
        if q64 < 2 || q64 > search_bound {
            continue;
        }
        if regime == Regime::WellApproximable {
            // Keep q_j only when s·q_{j+1} > q_j; the successor is the next
            // convergent denominator whether or not it survives the cut.
            if j + 1 < all.len() {
                if s * BigRational::from_integer(all[j + 1].clone())
                    <= BigRational::from_integer(q.clone())
                {
                    continue;
                }
            }
            // A trailing level with no in-depth successor is kept so the
            // construction is not starved right at the trust horizon.
        }
        levels.push(q64);
    }

    // Multiplier selection per level, exact frac comparison against s.
    let inv_beta = ExactReal::one().div(&beta_val)?;
    let inv_beta_trust = TrustedReal::quotient(&RealParam::Exact(ExactReal::one()), beta)?;
    let s_exact = ExactReal::from_rational(s.clone());
    let m_cap = (BigRational::one() / s)
        .ceil()
        .to_integer()
        .to_u64()
        .unwrap_or(u64::MAX);
    let mut chosen: Vec<(u64, u64, u64)> = Vec::new(); // (N, m, base q)
    let mut skip_notes: Vec<String> = Vec::new();
    let mut last_n = 0u64;
    for &q in &levels {
        let mut found = None;
        for m in 1..=m_cap {
            let n = match q.checked_mul(m) {
                Some(v) => v,
                None => break,
            };
            let p = inv_beta.mul_u64(n);
            // Both the integer boundary of the frac and the decision boundary
            // at s must clear the decimal horizon of beta.
            inv_beta_trust.certify(n, &p.dist_to_int(), "scale frac integer boundary")?;
            inv_beta_trust.certify(n, &p.frac().sub(&s_exact)?.abs(), "scale frac gap decision")?;
            if p.frac().cmp_known(&s_exact) == Ordering::Less {
                found = Some((n, m));
                break;
            }
        }
        match found {
            Some((n, m)) => {
                if n <= last_n {
                    skip_notes.push(format!("level q = {q}: N = {n} not strictly increasing"));
                    continue;
                }
                if n > search_bound {
                    skip_notes.push(format!(
                        "level q = {q}: N = {n} exceeds the search bound {search_bound}"
                    ));
                    continue;
                }
                chosen.push((n, m, q));
                last_n = n;
            }
            None => {
                skip_notes.push(format!(
                    "level q = {q}: no multiplier m <= {m_cap} lands the frac below s"
                ));
            }
        }
    }

    // Log-linear admission filter.
    let mut admitted: Vec<(u64, u64, u64, ExactReal, f64)> = Vec::new();
    for (n, m, q) in chosen {
        let norm = ratio.dist_checked(n)?;
        let kappa = n as f64 * (n as f64).ln() * norm.to_f64();
        if let ScaleMode::LogLinear { kappa_max } = mode {
            if kappa > kappa_max {
                skip_notes.push(format!(
                    "level q = {q}: log-linear statistic {kappa:.3} exceeds the cap {kappa_max}"
                ));
                continue;
            }
        }
        admitted.push((n, m, q, norm, kappa));
        if admitted.len() == count {
            break;
        }
    }

    let shortfall = if admitted.len() < count {
        let mut msg = format!(
            "only {} of {count} requested entries available within search bound {search_bound}",
            admitted.len()
        );
        if cf.truncated {
            msg.push_str("; continued fraction truncated at the decimal trust horizon");
        }
        if !skip_notes.is_empty() {
            msg.push_str("; skipped: ");
            msg.push_str(&skip_notes.join("; "));
        }
        Some(msg)
    } else {
        None
    };
    if admitted.is_empty() {
        return Err(Error::UnsupportedConfiguration(format!(
            "no scale entries could be constructed: {}",
            shortfall.unwrap_or_else(|| "no admissible convergent levels".into())
        )));
    }

    // Brute minima at the entry checkpoints, one exact pass.
    let checkpoints: Vec<u64> = admitted.iter().map(|e| e.0).collect();
    let mins = prefix_linear_mins(&ratio, &checkpoints)?;

    // Certified constant D = max over entries of max(ratio_k, n_norm_k).
    let mut d_exact = ExactReal::zero();
    let mut pre: Vec<(ExactReal, ExactReal)> = Vec::new();
    for ((n, _m, _q, norm, _kappa), brute) in admitted.iter().zip(&mins) {
        let n_norm = norm.mul_u64(*n);
        let ratio_val = n_norm.div(brute)?;
        if n_norm.cmp_known(&d_exact) == Ordering::Greater {
            d_exact = n_norm.clone();
        }
        if ratio_val.cmp_known(&d_exact) == Ordering::Greater {
            d_exact = ratio_val.clone();
        }
        pre.push((n_norm, ratio_val));
    }

    let mut entries = Vec::with_capacity(admitted.len());
    let mut exact = Vec::with_capacity(admitted.len());
    for (idx, ((n, m, q, norm, kappa), brute)) in admitted.iter().zip(&mins).enumerate() {
        let (n_norm, ratio_val) = &pre[idx];
        // Entry invariants, checked exactly: (i) {N/β} < s, and against the
        // certified constant (ii) N‖N·r‖ ≤ D·min, (iii) N‖N·r‖ ≤ D.
        let p = inv_beta.mul_u64(*n);
        let p_frac = p.frac();
        assert_eq!(p_frac.cmp_known(&s_exact), Ordering::Less);
        assert_ne!(n_norm.cmp_known(&d_exact), Ordering::Greater);
        let slack = d_exact.mul(brute)?;
        assert_ne!(n_norm.cmp_known(&slack), Ordering::Greater);
        let m_k = d_exact.div(n_norm)?;
        entries.push(ScaleEntry {
            index: idx + 1,
            n: *n,
            multiplier: *m,
            base_level: *q,
            norm: norm.to_f64(),
            n_norm: n_norm.to_f64(),
            brute_min: brute.to_f64(),
            ratio: ratio_val.to_f64(),
            p: p.to_f64(),
            p_floor: p.floor().to_i64().unwrap_or(i64::MAX),
            p_frac: p_frac.to_f64(),
            m: m_k.to_f64(),
            kappa: *kappa,
        });
        exact.push(ScaleEntryExact {
            n: *n,
            p,
            p_frac,
            norm: norm.clone(),
            n_norm: n_norm.clone(),
            brute_min: brute.clone(),
        });
    }

    Ok(ScaleSequence {
        alpha: alpha.to_string(),
        beta: beta.to_string(),
        s: s.to_string(),
        regime,
        search_bound,
        epsilon_empirical: eps_stat.min,
        d: d_exact.to_f64(),
        entries,
        shortfall,
        exact,
        d_exact,
    })
}

/// Continued fraction of the ratio, deep enough that the last in-range
/// denominator is covered, with convergents beyond the decimal trust horizon
/// (q² > 10^digits) cut off.
fn cf_to_bound(ratio: &TrustedReal, bound: u64) -> Result<ContinuedFraction> {
    let mut depth = 32;
    loop {
        let mut cf = continued_fraction_exact(&ratio.value, depth)?;
        if let Some(d) = ratio.digits {
            let keep = cf
                .convergents
                .iter()
                .take_while(|c| {
                    let qf = c.q.to_f64().unwrap_or(f64::INFINITY).abs().max(1.0);
                    2.0 * qf.log10() <= d
                })
                .count();
            if keep < cf.convergents.len() {
                cf.convergents.truncate(keep);
                cf.quotients.truncate(keep);
                cf.trust_depth = keep;
                cf.truncated = true;
                cf.finite = false;
                cf.period = None;
            }
            if cf.finite {
                // A terminating Euclid run on a decimal is an artifact of the
                // truncated representation, not a property of the value.
                cf.finite = false;
                cf.truncated = true;
            }
        }
        let past_bound = cf
            .convergents
            .last()
            .map(|c| c.q.to_u64().map_or(true, |q| q > bound))
            .unwrap_or(false);
        if cf.finite || cf.truncated || past_bound || depth >= 4096 {
            return Ok(cf);
        }
        depth *= 2;
    }
}
