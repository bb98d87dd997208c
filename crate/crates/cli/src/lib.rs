//! Harness around `zpg-core`: seeded spec sampling, single-module analysis,
//! parallel campaigns with ordered JSONL output, and a brute-force oracle.

pub mod campaign;
pub mod config;
pub mod oracle;
pub mod record;
pub mod sampling;
pub mod spec_io;
