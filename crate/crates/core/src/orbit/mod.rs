//! Orbit evaluation: products, reciprocal averages, strip statistics, and
//! the comparison experiments built on top of them.
//!
//! An orbit is the arithmetic progression x, x+1, ..., x+N-1 (or its
//! backward mirror x-1, ..., x-N) pushed through a fixed trigonometric
//! polynomial. Everything downstream of the phase streams works in f64;
//! the streams themselves are re-anchored from exact arithmetic often
//! enough that accumulated rounding stays far below every tolerance used
//! by the statistics.

pub mod average;
pub mod balls;
pub mod conjugate;
pub mod diverge;
pub mod pair;
pub mod periodic;
pub mod phase;
pub mod probe;
pub mod product;
pub mod riemann;
pub mod strips;

pub use average::{an_profile, generic_reciprocal_sums, AnProfile, ExceptionalSetEstimate};
pub use balls::{ball_count, BallReport};
pub use conjugate::{conjugate_select, ConjugateReport};
pub use diverge::{divergence_demo, DivergenceReport, DivergenceRow};
pub use pair::{fit_l, pair_compare, pair_compare_entry, ratio_pair_compare, PairComparison};
pub use periodic::{periodic_product_check, PeriodicReport};
pub use phase::phase_stream;
pub use probe::{decay_probe, probe_entry, DecayProbeEntry};
pub use product::{orbit_product, reciprocal_average, Direction, Orbit, OrbitReport, RecipNorm};
pub use riemann::{riemann_deviation, RiemannReport};
pub use strips::{strip_count, StripReport};
