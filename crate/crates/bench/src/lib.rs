//! Benchmark harness for the reductions; see `benches/`.
