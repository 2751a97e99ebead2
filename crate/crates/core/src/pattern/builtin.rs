//! The nine documented discourse patterns.
//!
//! Optional rule elements (adverbs, a leading method/variable before the
//! bound term in AFBC, the trailing method in CLBO) are not encoded as
//! slots; the implicit gap absorbs them.

use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;

use super::{DiscoursePattern, Slot};
use crate::label::EntityLabel;

pub const BUILTIN_CODES: [&str; 9] = ["AFBC", "BFDN", "CLBO", "BFWD", "BFCU", "CLNP", "CLOOA", "AFa", "AFr"];

fn lex(name: &str) -> Slot {
    Slot::Lexicon(name.to_string())
}

fn pattern(code: &str, entity: EntityLabel, slots: Vec<Slot>, description: &str, example: &str) -> DiscoursePattern {
    DiscoursePattern {
        code: code.to_string(),
        entity,
        slots,
        description: description.to_string(),
        example: example.to_string(),
    }
}

pub fn builtin_patterns() -> Vec<DiscoursePattern> {
    use EntityLabel::*;
    vec![
        pattern(
            "AFBC",
            Af,
            vec![lex("action_verbs"), lex("bound_terms"), lex("check_terms"), Slot::EntityMention],
            "adds a bounds check to existing code",
            "CVE-2017-12897/ISO CLNS: Use ND_TTEST() for the bounds checks in isoclns_print().",
        ),
        pattern(
            "BFDN",
            Vt,
            vec![Slot::EntityMention, Slot::Gap(40), lex("negation"), lex("omitted_actions")],
            "code omitted a required action such as an initialization or a bounds check",
            "In lldp_private_8023_print() the case block for subtype 4 (Maximum Frame Size TLV, IEEE \
             802.3bc-2009 Section 79.3.4) did not include the length check.",
        ),
        pattern(
            "CLBO",
            Cp,
            vec![Slot::Literal("buffer".to_string()), lex("overflow_terms")],
            "buffer overflow or over-read in existing code",
            "The BGP parser in tcpdump before 4.9.2 has a buffer over-read in print_bgp.c:bgp_attr_print().",
        ),
        pattern(
            "BFWD",
            Vt,
            vec![Slot::EntityMention, lex("modal_future"), lex("fault_outcomes")],
            "a value or expression will or would lead to a fault under some condition",
            "When 'uvalue' is a specific value, 'block_start + value' will cause integer overflow.",
        ),
        pattern(
            "BFCU",
            Vt,
            vec![lex("removal_verbs"), Slot::EntityMention],
            "removing a variable, statement or assignment prevents the fault",
            "Remove use of FF_PROFILE_MPEG4_SIMPLE_STUDIO as an indicator of studio profile.",
        ),
        pattern(
            "CLNP",
            Cp,
            vec![lex("nullptr_phrase")],
            "null pointer dereference",
            "Fixes: null pointer dereference.",
        ),
        pattern(
            "CLOOA",
            Cp,
            vec![lex("oob_terms"), lex("access_kinds")],
            "out-of-bounds access, read or write",
            "Check for size_t and vector resize() overflow to avoid OOB writes during vector allocation.",
        ),
        pattern(
            "AFa",
            Af,
            vec![lex("avoid_verbs")],
            "rejects or avoids some input or assignment",
            "Reject vp8 video files that have alpha and image planes of different sizes.",
        ),
        pattern(
            "AFr",
            Af,
            vec![lex("adjust_verbs"), Slot::Literal("to".to_string())],
            "adjusts or sets a variable to a new value",
            "Set the default EXTINF duration to 1ms if the duration is smaller than 1ms.",
        ),
    ]
}
