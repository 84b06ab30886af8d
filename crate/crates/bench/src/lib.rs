//! Benchmarks for `cmlab-core` live in `benches/`.
