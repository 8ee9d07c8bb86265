//! Benchmarks live in `benches/`; run them with `cargo bench -p phononflux-bench`.
