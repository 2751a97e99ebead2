//! File formats, scorer plugins and evaluation runs on top of
//! `vulntrace-core`.

pub mod corpus_io;
pub mod dump;
pub mod model_io;
pub mod patterns_io;
pub mod plugin;
pub mod run;

pub use vulntrace_core as core;

/// Lowercase hex SHA-256 of `bytes`.
pub fn sha256_hex(bytes: &[u8]) -> String {
    use sha2::{Digest, Sha256};
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}
