//! Riemann-sum deviation along convergent denominators.
//!
//! For psi(u) = ln|C + D·e(u)| with |C| != |D|, the mean value of psi over
//! the circle is ln max(|C|, |D|) (the integrand's harmonic mean value),
//! and sampling psi at the q_k points beta·(y+n), n = 1..q_k, for a
//! convergent denominator q_k of beta tracks q_k times that mean with
//! bounded deviation. The report carries the quadrature cross-check and
//! the exact residue coverage of n·p_k mod q_k.

use num_bigint::BigInt;
use num_complex::Complex64;
use serde::Serialize;

use crate::cf::continued_fraction;
use crate::error::{Error, Result};
use crate::real::RealParam;
use crate::sum::Neumaier;
use crate::trigpoly::{e, EPS_DEG};

use super::phase::phase_stream;

/// Adaptive Simpson quadrature with the usual 15-fold error estimate.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    fn rec<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        fa: f64,
        b: f64,
        fb: f64,
        m: f64,
        fm: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            left + right + delta / 15.0
        } else {
            rec(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1)
                + rec(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1)
        }
    }
    let m = 0.5 * (a + b);
    let (fa, fb, fm) = (f(a), f(b), f(m));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    rec(f, a, fa, b, fb, m, fm, whole, tol, 40)
}

#[derive(Debug, Clone, Serialize)]
pub struct RiemannReport {
    pub q: u64,
    /// Convergent numerator over q, reduced mod q.
    pub p_mod_q: u64,
    /// Sum of psi over the q sample points.
    pub sum: f64,
    /// Quadrature value of the circle mean of psi.
    pub integral: f64,
    /// ln max(|C|, |D|).
    pub jensen: f64,
    pub jensen_residual: f64,
    /// |sum - q·integral|.
    pub deviation: f64,
    /// True when n·p mod q covers every residue class (p, q coprime).
    pub residues_covered: bool,
}

/// Deviation of the psi-sum at scale q from q times the circle mean.
pub fn riemann_deviation(
    c: Complex64,
    d: Complex64,
    beta: &RealParam,
    q: u64,
    y: &RealParam,
) -> Result<RiemannReport> {
    let (mc, md) = (c.norm(), d.norm());
    if (mc - md).abs() <= EPS_DEG * (mc + md) {
        return Err(Error::Parameter(
            "|C| and |D| coincide; the integrand is unbounded".into(),
        ));
    }
    if q == 0 {
        return Err(Error::Parameter("q must be positive".into()));
    }
    let cf = continued_fraction(beta, 64)?;
    let qb = BigInt::from(q);
    let conv = cf
        .convergents
        .iter()
        .find(|cv| cv.q == qb)
        .ok_or_else(|| {
            Error::Parameter(format!("{q} is not a convergent denominator of the frequency"))
        })?;
    let p_mod_q = {
        let r = ((&conv.p % &qb) + &qb) % &qb;
        u64::try_from(&r).expect("residue below q fits")
    };

    // Residue coverage of n·p mod q, computed by exact modular stepping.
    let mut seen = vec![false; q as usize];
    let mut cur = 0u64;
    for _ in 1..=q {
        cur = (cur + p_mod_q) % q;
        seen[cur as usize] = true;
    }
    let residues_covered = seen.iter().all(|&s| s);

    let psi = |u: f64| (c + d * e(u)).norm().ln();
    let phases = phase_stream(beta, y, q + 1, true)?;
    let mut acc = Neumaier::new();
    for &ph in &phases[1..] {
        acc.add(psi(ph));
    }
    let sum = acc.total();

    let integral = adaptive_simpson(&psi, 0.0, 1.0, 1e-9);
    let jensen = mc.max(md).ln();

    Ok(RiemannReport {
        q,
        p_mod_q,
        sum,
        integral,
        jensen,
        jensen_residual: (integral - jensen).abs(),
        deviation: (sum - q as f64 * integral).abs(),
        residues_covered,
    })
}
