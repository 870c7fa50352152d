//! Benchmarks for the measnoise engines live in `benches/`.
