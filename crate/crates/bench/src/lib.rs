//! Benchmark-only crate; see `benches/routes.rs` for the strategy
//! comparisons (series vs integral vs recurrence routes).
