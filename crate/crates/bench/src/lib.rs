//! Criterion benchmarks for `cnfgraph`; see `benches/`.
