//! Criterion benchmarks for density fitting and the importance estimators.
//! Run with `cargo bench -p cped-bench`.
