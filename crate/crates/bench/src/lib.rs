// Benchmarks live in benches/; see `cargo bench -p spectral-risk-bench`.
