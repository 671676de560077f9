//! Exact Diophantine scale construction, trigonometric polynomial zero
//! geometry, and orbit-product experiments over irrational rotations.
//!
//! The crate is organized in layers: exact quadratic-field arithmetic
//! (`exact`), parameter parsing with decimal trust horizons (`real`),
//! continued fractions (`cf`), the scale construction (`diophantine`), and
//! the experiment drivers built on top of them.

pub mod cf;
pub mod configspace;
pub mod diophantine;
pub mod error;
pub mod exact;
pub mod mc;
pub mod orbit;
pub mod real;
pub mod sum;
pub mod torus;
pub mod trigpoly;

pub use error::{Error, Result};
pub use exact::ExactReal;
pub use real::{RealParam, TrustedReal};
