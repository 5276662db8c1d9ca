//! Benchmark-only crate; see the `benches/` directory.
//!
//! `benches/synthesis.rs` times classification, rule synthesis and proof
//! checking; `benches/semantics.rs` times frame enumeration, validation and
//! correspondence checking. Run them with `cargo bench -p massa-bench`.
