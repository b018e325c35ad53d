//! Criterion benchmarks for the covent kernels live in `benches/`.
