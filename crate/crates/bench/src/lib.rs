//! Criterion benchmarks for crysred; see `benches/pipeline.rs`.
