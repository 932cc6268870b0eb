//! Benchmarks for chatelet-core live in `benches/`.
