//! Criterion benchmarks for the core kernels live in `benches/kernels.rs`.
