//! Criterion benchmarks for `dioph-core`; see `benches/`.
