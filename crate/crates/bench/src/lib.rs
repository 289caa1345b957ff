//! Criterion benchmarks for the `cmbrauer` certificates; see `benches/`.
