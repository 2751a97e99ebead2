//! Sentence segmentation.
//!
//! Boundaries fall after a whitespace-delimited chunk that ends in `.`,
//! `!` or `?` (optionally followed by closing quotes or brackets). Dots
//! inside a chunk never split, which keeps `name_len()`, `4.9.2` and
//! `print_bgp.c:bgp_attr_print()` intact; the abbreviations in
//! [`ABBREVIATIONS`] never end a sentence.

use alloc::string::String;
use alloc::vec::Vec;

use crate::pattern::token::ABBREVIATIONS;

/// Collapses every whitespace run to one space and trims the ends.
pub fn normalize_whitespace(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for chunk in text.split_whitespace() {
        if !out.is_empty() {
            out.push(' ');
        }
        out.push_str(chunk);
    }
    out
}

fn ends_sentence(chunk: &str) -> bool {
    let lower = chunk.to_lowercase();
    let core = lower.trim_end_matches(['"', '\'', ')', ']', '}']);
    if ABBREVIATIONS.iter().any(|a| core == *a || core.ends_with(&["(", a].concat())) {
        return false;
    }
    core.ends_with(['.', '!', '?'])
}

/// Splits text into sentences. Joining the result with single spaces
/// reproduces the whitespace-normalized input.
pub fn segment(text: &str) -> Vec<String> {
    let mut sentences = Vec::new();
    let mut current = String::new();
    for chunk in text.split_whitespace() {
        if !current.is_empty() {
            current.push(' ');
        }
        current.push_str(chunk);
        if ends_sentence(chunk) {
            sentences.push(core::mem::take(&mut current));
        }
    }
    if !current.is_empty() {
        sentences.push(current);
    }
    sentences
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn commit_message_two_sentences() {
        let s = segment("Add a bounds check in name_len(). This fixes a buffer over-read.");
        assert_eq!(s, vec!["Add a bounds check in name_len().", "This fixes a buffer over-read."]);
    }

    #[test]
    fn no_terminator_is_one_sentence() {
        assert_eq!(segment("hello"), vec!["hello"]);
        assert!(segment("   ").is_empty());
    }

    #[test]
    fn versions_and_paths_unsplit() {
        let s = segment("Fixed in tcpdump 4.9.2. See print_bgp.c:bgp_attr_print() for details.");
        assert_eq!(s, vec!["Fixed in tcpdump 4.9.2.", "See print_bgp.c:bgp_attr_print() for details."]);
    }

    #[test]
    fn hand_segmented_fixtures() {
        let cases: &[(&str, &[&str])] = &[
            (
                "Reject bad input, e.g. negative sizes. Done!",
                &["Reject bad input, e.g. negative sizes.", "Done!"],
            ),
            ("Is it fixed? Yes.", &["Is it fixed?", "Yes."]),
            ("It crashed (see foo.c). Then\n\n  it   stopped", &["It crashed (see foo.c).", "Then it stopped"]),
            ("This fixes a buffer over-read... Bug 123.", &["This fixes a buffer over-read...", "Bug 123."]),
            ("Use x vs. y in i.e. mode.", &["Use x vs. y in i.e. mode."]),
            ("He said \"stop.\" Then left.", &["He said \"stop.\"", "Then left."]),
        ];
        for (text, expected) in cases {
            assert_eq!(segment(text), *expected, "{text}");
        }
    }

    #[test]
    fn normalize_collapses_runs() {
        assert_eq!(normalize_whitespace("  a\n\tb  c "), "a b c");
    }
}
