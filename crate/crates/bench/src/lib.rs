//! Criterion benchmarks for `epsilon-core`; see `benches/`.
