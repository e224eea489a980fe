//! Criterion benchmarks for symcanon-core; see `benches/`.
