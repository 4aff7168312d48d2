//! Criterion benchmarks for `cacomm-core`; see `benches/`.
