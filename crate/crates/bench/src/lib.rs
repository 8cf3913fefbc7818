//! Criterion benchmarks for the dgopt workspace live under `benches/`.
