//! Benchmark-only crate; see `benches/steady_state.rs`.
