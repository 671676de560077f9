//! Floating-point circle arithmetic helpers.
//!
//! Exact counterparts live on `ExactReal`; these are the f64 versions used
//! inside grid scans and Monte Carlo summaries where values are already
//! approximate.

/// Fractional part in [0, 1).
pub fn frac(x: f64) -> f64 {
    let f = x - x.floor();
    // x slightly below an integer can round to 1.0 after the subtraction.
    if f >= 1.0 {
        0.0
    } else {
        f
    }
}

/// Signed representative of x mod 1 in [-1/2, 1/2).
pub fn sfrac(x: f64) -> f64 {
    let f = frac(x);
    if f >= 0.5 {
        f - 1.0
    } else {
        f
    }
}

/// Distance to the nearest integer.
pub fn dist_int(x: f64) -> f64 {
    (x - x.round()).abs()
}

/// Max-norm distance on the torus between two points.
pub fn dist_torus_max(a: (f64, f64), b: (f64, f64)) -> f64 {
    dist_int(a.0 - b.0).max(dist_int(a.1 - b.1))
}
