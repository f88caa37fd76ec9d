//! Criterion benchmarks for spanlab kernels; see `benches/`.
