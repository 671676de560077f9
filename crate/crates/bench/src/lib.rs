//! Benchmark-only crate. The measurements live in `benches/core_ops.rs`;
//! this library exists so the package has a build target and a place for
//! shared fixtures if the suite grows.
