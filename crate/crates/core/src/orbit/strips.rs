//! Strip occupancy statistics for scale-length orbits.
//!
//! The plane is cut into diagonal strips of width 1/(2·m·p) in the
//! coordinate w = beta·x - alpha·y, and the orbit points
//! ({-n·alpha + g1}, {-n·beta + g2}), 0 <= n < floor(p), are binned by
//! strip. A certified scale entry forbids two points from sharing a strip
//! whenever their index gap L = |m - n| satisfies 2/beta < L < p - 1/beta;
//! the scan reports any such pair as a violation.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::real::RealParam;
use crate::torus::frac;

use super::phase::{neg_param, phase_stream};

/// Pair scans cost O(occupancy^2) per strip; above this occupancy the scan
/// is skipped and flagged instead of stalling (it only triggers in the
/// degenerate integer case, where every pair would violate anyway).
const PAIR_SCAN_CAP: u64 = 4096;

#[derive(Debug, Clone, Serialize)]
pub struct StripReport {
    /// Strip width in the diagonal coordinate beta·x - alpha·y.
    pub width: f64,
    pub points: u64,
    /// Nonempty strips only, ascending by index.
    pub histogram: Vec<(i64, u64)>,
    pub max_occupancy: u64,
    /// Integer frequencies collapse every point onto one strip.
    pub degenerate: bool,
    /// Index pairs (n, m) sharing a strip with gap in the forbidden range.
    pub violations: Vec<(u64, u64)>,
    pub scanned_pairs: u64,
    pub flags: Vec<String>,
}

/// Bin the orbit points of one scale entry into diagonal strips.
///
/// `m` and `p` are the entry's multiplier and scale length; `p_floor` is
/// the number of points; `zero` = (g1, g2) anchors the orbit at a zero of
/// the polynomial.
pub fn strip_count(
    alpha: &RealParam,
    beta: &RealParam,
    m: f64,
    p: f64,
    p_floor: u64,
    zero: (f64, f64),
) -> Result<StripReport> {
    if !(m > 0.0 && p > 0.0) {
        return Err(Error::Parameter("strip geometry needs m, p > 0".into()));
    }
    if p_floor == 0 {
        return Err(Error::Parameter("no orbit points: floor(p) = 0".into()));
    }
    let width = 1.0 / (2.0 * m * p);
    let af = alpha.to_f64();
    let bf = beta.to_f64();
    let zero_param = RealParam::from_int(0);
    let pa = phase_stream(&neg_param(alpha), &zero_param, p_floor, true)?;
    let pb = phase_stream(&neg_param(beta), &zero_param, p_floor, true)?;

    let mut bins: BTreeMap<i64, Vec<u64>> = BTreeMap::new();
    for n in 0..p_floor as usize {
        let x = frac(pa[n] + zero.0 - zero.0.floor());
        let y = frac(pb[n] + zero.1 - zero.1.floor());
        let w = bf * x - af * y;
        let j = (w / width).floor() as i64;
        bins.entry(j).or_default().push(n as u64);
    }

    let mut flags = Vec::new();
    let degenerate = alpha.value().is_integer() && beta.value().is_integer();
    if degenerate {
        flags.push("integer frequencies: all orbit points coincide".into());
    }

    let max_occupancy = bins.values().map(|v| v.len() as u64).max().unwrap_or(0);
    let lo_gap = 2.0 / bf;
    let hi_gap = p - 1.0 / bf;
    let mut violations = Vec::new();
    let mut scanned_pairs = 0u64;
    for members in bins.values() {
        let k = members.len() as u64;
        if k < 2 {
            continue;
        }
        if k > PAIR_SCAN_CAP {
            flags.push(format!(
                "strip with {k} points exceeds the pair-scan cap; pairs not enumerated"
            ));
            continue;
        }
        for i in 0..members.len() {
            for j in i + 1..members.len() {
                scanned_pairs += 1;
                let gap = (members[j] - members[i]) as f64;
                if gap > lo_gap && gap < hi_gap {
                    violations.push((members[i], members[j]));
                }
            }
        }
    }

    Ok(StripReport {
        width,
        points: p_floor,
        histogram: bins.iter().map(|(j, v)| (*j, v.len() as u64)).collect(),
        max_occupancy,
        degenerate,
        violations,
        scanned_pairs,
        flags,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diophantine::{scale_sequence, ScaleMode};
    use num_rational::BigRational;

    #[test]
    fn integer_frequencies_collapse_to_one_strip() {
        let rep = strip_count(
            &RealParam::from_int(2),
            &RealParam::from_int(3),
            1.5,
            40.0,
            40,
            (0.25, 0.75),
        )
        .unwrap();
        assert!(rep.degenerate);
        assert_eq!(rep.histogram.len(), 1);
        assert_eq!(rep.max_occupancy, 40);
    }

    #[test]
    fn golden_ratio_scales_have_no_forbidden_pairs_and_low_occupancy() {
        let alpha = RealParam::parse("(1+sqrt(5))/2", None).unwrap();
        let beta = RealParam::from_int(1);
        let s = BigRational::new(1.into(), 4.into());
        let seq = scale_sequence(&alpha, &beta, &s, 4, 100_000, ScaleMode::Standard).unwrap();
        for e in &seq.entries {
            let rep = strip_count(&alpha, &beta, e.m, e.p, e.p_floor as u64, (0.3, 0.6)).unwrap();
            assert!(
                rep.violations.is_empty(),
                "forbidden pair at scale {}: {:?}",
                e.index,
                rep.violations
            );
            assert!(rep.max_occupancy <= 4, "occupancy {}", rep.max_occupancy);
            assert_eq!(
                rep.histogram.iter().map(|(_, c)| c).sum::<u64>(),
                e.p_floor as u64
            );
        }
    }

    #[test]
    fn histogram_counts_every_point_once() {
        let alpha = RealParam::parse("sqrt(2)", None).unwrap();
        let beta = RealParam::from_int(1);
        let rep = strip_count(&alpha, &beta, 2.0, 120.0, 120, (0.1, 0.9)).unwrap();
        assert_eq!(rep.histogram.iter().map(|(_, c)| c).sum::<u64>(), 120);
        assert!(!rep.degenerate);
    }
}
