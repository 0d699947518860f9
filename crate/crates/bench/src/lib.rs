//! Criterion benchmarks for the compiler, verifier and decoupling
//! generator; see `benches/`.
