//! Shared helpers for the integration suites: reference parameters and a
//! scaled double-double product used as an independent oracle for the
//! log-domain orbit accumulation.
//!
//! Each integration target compiles this module separately, so not every
//! item is used by every target.
#![allow(dead_code)]

use hrt_core::RealParam;

pub fn golden() -> RealParam {
    RealParam::parse("(1+sqrt(5))/2", None).unwrap()
}

pub fn sqrt2() -> RealParam {
    RealParam::parse("sqrt(2)", None).unwrap()
}

/// Error-free transform of a + b (|a| >= |b| not required).
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

/// Error-free transform of a * b via fused multiply-add.
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

/// Positive product accumulated as (hi + lo) * 2^exp2, with hi renormalized
/// into [2^-512, 2^512] so thousands of factors never overflow or underflow.
/// The final log is exact to roughly 1e-30 relative, far below the 1e-8
/// agreement the oracle has to certify.
pub struct ScaledProduct {
    hi: f64,
    lo: f64,
    exp2: i64,
    pub zero_hit: bool,
}

impl ScaledProduct {
    pub fn new() -> Self {
        ScaledProduct {
            hi: 1.0,
            lo: 0.0,
            exp2: 0,
            zero_hit: false,
        }
    }

    pub fn mul(&mut self, factor: f64) {
        assert!(factor >= 0.0 && factor.is_finite(), "factor {factor}");
        if factor == 0.0 {
            self.zero_hit = true;
            return;
        }
        let (p, e) = two_prod(self.hi, factor);
        let (hi, lo) = two_sum(p, self.lo * factor + e);
        self.hi = hi;
        self.lo = lo;
        // Scaling by 2^512 is exact and keeps both limbs in range.
        const UP: f64 = 1.3407807929942597e154; // 2^512
        const DOWN: f64 = 7.458340731200207e-155; // 2^-512
        if self.hi > UP {
            self.hi *= DOWN;
            self.lo *= DOWN;
            self.exp2 += 512;
        } else if self.hi < DOWN {
            self.hi *= UP;
            self.lo *= UP;
            self.exp2 -= 512;
        }
    }

    /// ln of the accumulated product.
    pub fn log(&self) -> Option<f64> {
        if self.zero_hit {
            return None;
        }
        let main = self.hi.ln() + (self.lo / self.hi).ln_1p();
        Some(self.exp2 as f64 * std::f64::consts::LN_2 + main)
    }
}
