//! Criterion benchmarks for the coefficient engines; see `benches/`.
