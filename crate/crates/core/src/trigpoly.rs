//! Zero geometry of two-frequency trigonometric polynomials.
//!
//! The object of study is p(x, y) = C0 + C1 e(x) + C2 e(y) on the torus,
//! where e(t) = exp(2 pi i t).  Its zero set is controlled by the triangle
//! inequality on the moduli (|C0|, |C1|, |C2|): a strict triangle gives two
//! zeros, a degenerate triangle gives one, no triangle gives none.  Each
//! zero carries a slope parameter t describing the direction in which p
//! vanishes to first order; downstream orbit bounds depend on it.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::torus::{dist_int, dist_torus_max, frac, sfrac};

/// e(x) = exp(2 pi i x).
pub fn e(x: f64) -> Complex64 {
    let (s, c) = (std::f64::consts::TAU * x).sin_cos();
    Complex64::new(c, s)
}

/// Relative tolerance deciding when the modulus triangle counts as
/// degenerate: defect <= EPS_DEG * (|C0|+|C1|+|C2|).
pub const EPS_DEG: f64 = 1e-9;

/// Residual tolerance for listed zeros, relative to |C0|+|C1|+|C2|.
pub const ZERO_RESIDUAL_TOL: f64 = 1e-12;

/// Log-magnitude floor below which products report an underflow sentinel
/// instead of a finite value.
pub const UNDERFLOW_LOG: f64 = -700.0;

/// Coefficient triple of p(x, y) = C0 + C1 e(x) + C2 e(y).
#[derive(Debug, Clone, Copy)]
pub struct Coefficients {
    pub c0: Complex64,
    pub c1: Complex64,
    pub c2: Complex64,
}

impl Coefficients {
    /// All three coefficients must be nonzero; otherwise the polynomial
    /// degenerates to a one-frequency form with a different zero set.
    pub fn new(c0: Complex64, c1: Complex64, c2: Complex64) -> Result<Self> {
        if c0.norm() == 0.0 || c1.norm() == 0.0 || c2.norm() == 0.0 {
            return Err(Error::Parameter(
                "all three coefficients must be nonzero".into(),
            ));
        }
        Ok(Coefficients { c0, c1, c2 })
    }

    pub fn sum_abs(&self) -> f64 {
        self.c0.norm() + self.c1.norm() + self.c2.norm()
    }

    pub fn eval(&self, x: f64, y: f64) -> Complex64 {
        self.c0 + self.c1 * e(x) + self.c2 * e(y)
    }
}

/// How the slope parameter t was determined.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SlopeCase {
    /// Strict triangle: both zeros are first-order, t = 1.
    NonDegenerate,
    /// Degenerate with C2 e(g2) / C1 e(g1) > 0: t is that ratio.
    RatioC2C1,
    /// Degenerate with s = C1 e(g1) / C0 > 0: t = -(1+s)/s.
    RatioC1C0,
    /// Degenerate with s = C2 e(g2) / C0 > 0: t = -s/(1+s).
    RatioC2C0,
    /// Moduli admit no triangle: p has no zeros and t is unused.
    NoTriangle,
}

/// Zero set of a coefficient triple.
///
/// Invariants: every listed zero has residual |p| <= tolerance * sum of
/// moduli (except clamped numerically degenerate inputs, where the residual
/// is bounded by the triangle defect); `degenerate` holds iff exactly one
/// zero is listed; t is finite and nonzero in every case.
#[derive(Debug, Clone, Serialize)]
pub struct ZeroSet {
    pub zeros: Vec<(f64, f64)>,
    pub residuals: Vec<f64>,
    pub degenerate: bool,
    /// Triangle defect within tolerance but not exactly zero: the two
    /// analytic zeros are numerically indistinguishable.
    pub numerically_degenerate: bool,
    pub merge_note: Option<String>,
    pub no_triangle: bool,
    /// Slope of the direction of first-order vanishing: the local lower
    /// bound near a zero (g1, g2) is dist(x - g1 + t * <y - g2>) plus
    /// quadratic terms.
    pub t: f64,
    pub t_case: SlopeCase,
    /// Cosine c = (|C2|^2 - |C0|^2 - |C1|^2) / (2 |C0| |C1|) before clamping.
    pub cos_value: f64,
    /// min(| |C2| - (|C0|+|C1|) |, | |C2| - ||C0|-|C1|| |).
    pub defect: f64,
}

/// Zero for a given arccos branch sign: g1 from the phase equation, g2 from
/// back substitution into p(g1, y) = 0.
fn branch_zero(coeffs: &Coefficients, acos_c: f64, sign: f64) -> (f64, f64) {
    let g1 = frac((sign * acos_c - coeffs.c1.arg() + coeffs.c0.arg()) / std::f64::consts::TAU);
    let w = -(coeffs.c0 + coeffs.c1 * e(g1)) / coeffs.c2;
    let g2 = frac(w.arg() / std::f64::consts::TAU);
    (g1, g2)
}

/// Degenerate-case slope from the real ratios of u0 = C0, u1 = C1 e(g1),
/// u2 = C2 e(g2).  These sum to zero and are real multiples of a common
/// unit, so exactly one of the three pairwise ratios is positive.
fn degenerate_slope(coeffs: &Coefficients, zero: (f64, f64)) -> (f64, SlopeCase) {
    let u0 = coeffs.c0;
    let u1 = coeffs.c1 * e(zero.0);
    let u2 = coeffs.c2 * e(zero.1);
    let r21 = (u2 / u1).re;
    if r21 > 0.0 {
        return (r21, SlopeCase::RatioC2C1);
    }
    let s10 = (u1 / u0).re;
    if s10 > 0.0 {
        return (-(1.0 + s10) / s10, SlopeCase::RatioC1C0);
    }
    let s20 = (u2 / u0).re;
    (-s20 / (1.0 + s20), SlopeCase::RatioC2C0)
}

/// Compute the zero set of p(x, y) = C0 + C1 e(x) + C2 e(y).
///
/// Writing m_i = |C_i|, a zero requires |C0 + C1 e(x)| = m2, i.e.
/// cos(2 pi x + arg C1 - arg C0) = (m2^2 - m0^2 - m1^2) / (2 m0 m1).
/// The two arccos branches give up to two zeros; y follows by back
/// substitution.  Moduli outside the closed triangle region give none.
pub fn zeros(coeffs: &Coefficients) -> ZeroSet {
    let m0 = coeffs.c0.norm();
    let m1 = coeffs.c1.norm();
    let m2 = coeffs.c2.norm();
    let sum = m0 + m1 + m2;
    let eps = EPS_DEG * sum;
    let hi = m0 + m1;
    let lo = (m0 - m1).abs();
    let c = (m2 * m2 - m0 * m0 - m1 * m1) / (2.0 * m0 * m1);
    let defect = (m2 - hi).abs().min((m2 - lo).abs());

    if m2 > hi + eps || m2 < lo - eps {
        // Outside the triangle region beyond tolerance: |p| is bounded
        // below by the gap and there is nothing to solve.
        return ZeroSet {
            zeros: vec![],
            residuals: vec![],
            degenerate: false,
            numerically_degenerate: false,
            merge_note: None,
            no_triangle: true,
            t: 1.0,
            t_case: SlopeCase::NoTriangle,
            cos_value: c,
            defect,
        };
    }

    let residual = |z: &(f64, f64)| coeffs.eval(z.0, z.1).norm();

    if defect > eps {
        // Strict triangle: two first-order zeros, plus branch first.
        let acos_c = c.clamp(-1.0, 1.0).acos();
        let zp = branch_zero(coeffs, acos_c, 1.0);
        let zm = branch_zero(coeffs, acos_c, -1.0);
        let residuals = vec![residual(&zp), residual(&zm)];
        return ZeroSet {
            zeros: vec![zp, zm],
            residuals,
            degenerate: false,
            numerically_degenerate: false,
            merge_note: None,
            no_triangle: false,
            t: 1.0,
            t_case: SlopeCase::NonDegenerate,
            cos_value: c,
            defect,
        };
    }

    if defect == 0.0 {
        // Exact degeneracy at working precision: the two branches coincide.
        let acos_c = c.clamp(-1.0, 1.0).acos();
        let z = branch_zero(coeffs, acos_c, 1.0);
        let (t, t_case) = degenerate_slope(coeffs, z);
        let residuals = vec![residual(&z)];
        return ZeroSet {
            zeros: vec![z],
            residuals,
            degenerate: true,
            numerically_degenerate: false,
            merge_note: None,
            no_triangle: false,
            t,
            t_case,
            cos_value: c,
            defect,
        };
    }

    // Defect within tolerance but nonzero: the configuration is analytically
    // non-degenerate (or just outside), yet the two zeros cannot be resolved
    // at this precision.  Report candidates rather than silently picking.
    let acos_c = c.clamp(-1.0, 1.0).acos();
    let zp = branch_zero(coeffs, acos_c, 1.0);
    let (t, t_case) = degenerate_slope(coeffs, zp);
    if c.abs() < 1.0 {
        let zm = branch_zero(coeffs, acos_c, -1.0);
        let residuals = vec![residual(&zp), residual(&zm)];
        let note = format!(
            "triangle defect {:.3e} within tolerance {:.3e}: branch candidates \
             ({:.12}, {:.12}) and ({:.12}, {:.12}) are numerically merged",
            defect, eps, zp.0, zp.1, zm.0, zm.1
        );
        ZeroSet {
            zeros: vec![zp, zm],
            residuals,
            degenerate: false,
            numerically_degenerate: true,
            merge_note: Some(note),
            no_triangle: false,
            t,
            t_case,
            cos_value: c,
            defect,
        }
    } else {
        let residuals = vec![residual(&zp)];
        let note = format!(
            "cosine {:.17} clamped to [-1,1] at triangle defect {:.3e}; \
             residual is defect-limited",
            c, defect
        );
        ZeroSet {
            zeros: vec![zp],
            residuals,
            degenerate: true,
            numerically_degenerate: true,
            merge_note: Some(note),
            no_triangle: false,
            t,
            t_case,
            cos_value: c,
            defect,
        }
    }
}

/// Local lower-bound form at a point: min over zeros of
/// dist(dx + t * <dy>) + dist(dx)^2 + dist(dy)^2, where dist is distance to
/// the nearest integer and <.> the signed fractional part.
pub fn bound_form(zeros: &[(f64, f64)], t: f64, x: f64, y: f64) -> f64 {
    zeros
        .iter()
        .map(|&(g1, g2)| {
            let dx = x - g1;
            let dy = y - g2;
            dist_int(dx + t * sfrac(dy)) + dist_int(dx).powi(2) + dist_int(dy).powi(2)
        })
        .fold(f64::INFINITY, f64::min)
}

/// Taylor-regime ratios collected on the annulus around each zero.
#[derive(Debug, Clone, Serialize)]
pub struct AnnulusReport {
    /// Outer radius (torus max-norm) of the annulus.
    pub radius: f64,
    /// Grid-exclusion core radius 2/grid_n; points inside it are excluded
    /// from the global ratio but still checked here.
    pub core_radius: f64,
    /// min |p| / |dx + t dy| over annulus points where the linear form is
    /// not itself tiny: first-order vanishing happens only along the slope.
    pub linear_ratio_min: f64,
    /// min |p| / (dx^2 + dy^2): the quadratic term survives even along the
    /// degenerate direction.
    pub quad_ratio_min: f64,
    pub points: u64,
}

/// Grid certificate for |p(x, y)| >= c_emp * bound_form(x, y) away from the
/// zero set.
#[derive(Debug, Clone, Serialize)]
pub struct LowerBoundCertificate {
    pub grid_n: u32,
    /// Empirical constant: min over eligible grid points of |p| / bound.
    /// For no-triangle triples this is instead the grid infimum of |p|
    /// (the bound is then the constant 1).
    pub c_emp: f64,
    pub argmin: (f64, f64),
    pub no_triangle: bool,
    /// Grid infimum of |p| over eligible points, for scale reference.
    pub inf_abs: f64,
    pub t: f64,
    pub zeros: Vec<(f64, f64)>,
    pub annulus: Option<AnnulusReport>,
}

/// Scan an n-by-n uniform grid and certify the lower-bound constant.
///
/// Points within 2/grid_n (torus max-norm) of a zero are excluded from the
/// global minimum and instead feed the annulus report, which checks the
/// first-order and second-order Taylor forms out to radius 0.05.
pub fn lower_bound_certificate(
    coeffs: &Coefficients,
    grid_n: u32,
) -> Result<LowerBoundCertificate> {
    if grid_n < 8 {
        return Err(Error::Parameter(format!(
            "grid resolution {grid_n} too coarse for a meaningful certificate"
        )));
    }
    let zs = zeros(coeffs);
    let n = grid_n as usize;
    let step = 1.0 / grid_n as f64;
    let table: Vec<Complex64> = (0..n).map(|i| e(i as f64 * step)).collect();
    let core_radius = 2.0 / grid_n as f64;
    let annulus_radius = 0.05_f64.max(core_radius);

    let mut c_emp = f64::INFINITY;
    let mut argmin = (0.0, 0.0);
    let mut inf_abs = f64::INFINITY;
    let mut lin_min = f64::INFINITY;
    let mut quad_min = f64::INFINITY;
    let mut annulus_points = 0u64;

    for i in 0..n {
        let x = i as f64 * step;
        let base = coeffs.c0 + coeffs.c1 * table[i];
        for j in 0..n {
            let y = j as f64 * step;
            let pv = (base + coeffs.c2 * table[j]).norm();
            if zs.no_triangle {
                if pv < c_emp {
                    c_emp = pv;
                    argmin = (x, y);
                }
                continue;
            }
            let zdist = zs
                .zeros
                .iter()
                .map(|&z| dist_torus_max((x, y), z))
                .fold(f64::INFINITY, f64::min);
            if zdist > core_radius {
                if pv < inf_abs {
                    inf_abs = pv;
                }
                let b = bound_form(&zs.zeros, zs.t, x, y);
                let ratio = pv / b;
                if ratio < c_emp {
                    c_emp = ratio;
                    argmin = (x, y);
                }
            }
            if zdist > 0.0 && zdist <= annulus_radius {
                // Local Taylor coordinates relative to the nearest zero.
                let (g1, g2) = *zs
                    .zeros
                    .iter()
                    .min_by(|a, b| {
                        dist_torus_max((x, y), **a)
                            .partial_cmp(&dist_torus_max((x, y), **b))
                            .unwrap()
                    })
                    .unwrap();
                let dx = sfrac(x - g1);
                let dy = sfrac(y - g2);
                annulus_points += 1;
                let lin = (dx + zs.t * dy).abs();
                if lin > 1e-14 {
                    lin_min = lin_min.min(pv / lin);
                }
                quad_min = quad_min.min(pv / (dx * dx + dy * dy));
            }
        }
    }

    if zs.no_triangle {
        return Ok(LowerBoundCertificate {
            grid_n,
            c_emp,
            argmin,
            no_triangle: true,
            inf_abs: c_emp,
            t: zs.t,
            zeros: vec![],
            annulus: None,
        });
    }

    Ok(LowerBoundCertificate {
        grid_n,
        c_emp,
        argmin,
        no_triangle: false,
        inf_abs,
        t: zs.t,
        zeros: zs.zeros.clone(),
        annulus: Some(AnnulusReport {
            radius: annulus_radius,
            core_radius,
            linear_ratio_min: lin_min,
            quad_ratio_min: quad_min,
            points: annulus_points,
        }),
    })
}

/// Log-magnitude of a product factor; values below exp(-700) are reported
/// as an explicit sentinel rather than a meaningless finite float.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LogAbs {
    Finite(f64),
    Underflow,
}

impl LogAbs {
    pub fn finite(self) -> Option<f64> {
        match self {
            LogAbs::Finite(v) => Some(v),
            LogAbs::Underflow => None,
        }
    }
}

/// One factor of an orbit product, evaluated at externally supplied phases.
///
/// Drivers reduce alpha * x and beta * x modulo 1 with exact arithmetic and
/// pass the fractional phases in; the polynomial itself never multiplies a
/// large integer by an irrational in f64.
#[derive(Debug, Clone)]
pub enum OrbitPolynomial {
    /// a + b e(phase_a).
    OneFreq { a: Complex64, b: Complex64 },
    /// c0 + c1 e(phase_a) + c2 e(phase_b).
    TwoFreq {
        c0: Complex64,
        c1: Complex64,
        c2: Complex64,
    },
    /// (a + b e(phase_a)) / (c + d e(phase_b)).
    Ratio {
        a: Complex64,
        b: Complex64,
        c: Complex64,
        d: Complex64,
    },
}

impl OrbitPolynomial {
    pub fn eval_at_phases(&self, phase_a: f64, phase_b: f64) -> Result<Complex64> {
        match self {
            OrbitPolynomial::OneFreq { a, b } => Ok(a + b * e(phase_a)),
            OrbitPolynomial::TwoFreq { c0, c1, c2 } => {
                Ok(c0 + c1 * e(phase_a) + c2 * e(phase_b))
            }
            OrbitPolynomial::Ratio { a, b, c, d } => {
                let den = c + d * e(phase_b);
                if den.norm() == 0.0 {
                    return Err(Error::Singularity(format!(
                        "ratio denominator vanishes at phase {phase_b}"
                    )));
                }
                Ok((a + b * e(phase_a)) / den)
            }
        }
    }

    pub fn log_abs_at_phases(&self, phase_a: f64, phase_b: f64) -> Result<LogAbs> {
        let v = self.eval_at_phases(phase_a, phase_b)?.norm();
        let l = v.ln();
        if l < UNDERFLOW_LOG {
            Ok(LogAbs::Underflow)
        } else {
            Ok(LogAbs::Finite(l))
        }
    }

    /// Convenience evaluation at a real argument with f64 phase reduction;
    /// fine for plots and sanity checks, not for long orbits.
    pub fn eval_at(&self, x: f64, alpha: f64, beta: f64) -> Result<Complex64> {
        self.eval_at_phases(frac(alpha * x), frac(beta * x))
    }
}
