//! Criterion benchmarks for phit-core live in `benches/`.
