//! Core algorithms for tracing vulnerability descriptions to code.
//!
//! Sentences from CVE summaries, bug reports and commit messages are
//! classified as vulnerability trigger (VT), after-fix (AF) or crash
//! phenomenon (CP) using discourse patterns and a linear max-margin
//! classifier, then traced to diff lines through a pluggable scorer.
//!
//! The crate is `no_std` and only needs `alloc`; file formats, processes
//! and the command line live in the `vulntrace` crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod corpus;
pub mod eval;
pub mod extract;
pub mod fingerprint;
pub mod label;
pub mod pattern;
pub mod trace;

pub use label::{ArtifactKind, ChangeKind, EntityLabel, Side};
