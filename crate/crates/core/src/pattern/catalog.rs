use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use super::builtin::builtin_patterns;
use super::lexicon::{builtin_lexicons, Lexicon, LexiconSet};
use super::matcher::match_pattern;
use super::token::Token;
use super::{CatalogError, DiscoursePattern, PatternMatch, Slot};
use crate::fingerprint::Fingerprint;
use crate::label::EntityLabel;

/// Validated pattern catalog keyed and iterated by pattern code.
#[derive(Debug, Clone)]
pub struct Catalog {
    patterns: BTreeMap<String, DiscoursePattern>,
    lexicons: LexiconSet,
}

impl Default for Catalog {
    fn default() -> Self {
        Self::builtin()
    }
}

impl Catalog {
    /// The nine documented patterns over the built-in lexicons.
    pub fn builtin() -> Self {
        let patterns = builtin_patterns().into_iter().map(|p| (p.code.clone(), p)).collect();
        let catalog = Catalog { patterns, lexicons: builtin_lexicons() };
        debug_assert!(catalog.check_references().is_ok());
        catalog
    }

    /// A catalog without patterns, for classifiers that ignore them.
    pub fn empty() -> Self {
        Catalog { patterns: BTreeMap::new(), lexicons: builtin_lexicons() }
    }

    /// Adds lexicons and patterns on top of this catalog. Entries override
    /// existing ones with the same name or code; duplicates within the
    /// added lists are errors.
    pub fn extend(mut self, lexicons: Vec<Lexicon>, patterns: Vec<DiscoursePattern>) -> Result<Self, CatalogError> {
        let mut seen = BTreeSet::new();
        for lex in lexicons {
            if !seen.insert(String::from(lex.name())) {
                return Err(CatalogError::DuplicateLexicon(lex.name().into()));
            }
            self.lexicons.insert(lex.name().into(), lex);
        }
        let mut seen = BTreeSet::new();
        for pattern in patterns {
            pattern.validate_shape()?;
            if !seen.insert(pattern.code.clone()) {
                return Err(CatalogError::DuplicateCode(pattern.code));
            }
            self.patterns.insert(pattern.code.clone(), pattern);
        }
        self.check_references()?;
        Ok(self)
    }

    fn check_references(&self) -> Result<(), CatalogError> {
        for p in self.patterns.values() {
            for slot in &p.slots {
                if let Slot::Lexicon(name) = slot {
                    if !self.lexicons.contains_key(name) {
                        return Err(CatalogError::UnknownLexicon { code: p.code.clone(), lexicon: name.clone() });
                    }
                }
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.patterns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.patterns.is_empty()
    }

    pub fn get(&self, code: &str) -> Option<&DiscoursePattern> {
        self.patterns.get(code)
    }

    pub fn patterns(&self) -> impl Iterator<Item = &DiscoursePattern> {
        self.patterns.values()
    }

    pub fn patterns_for(&self, entity: EntityLabel) -> impl Iterator<Item = &DiscoursePattern> {
        self.patterns.values().filter(move |p| p.entity == entity)
    }

    pub fn count(&self, entity: EntityLabel) -> usize {
        self.patterns_for(entity).count()
    }

    pub fn lexicons(&self) -> &LexiconSet {
        &self.lexicons
    }

    pub fn match_pattern(&self, pattern: &DiscoursePattern, tokens: &[Token]) -> Option<PatternMatch> {
        match_pattern(pattern, &self.lexicons, tokens)
    }

    /// Every applicable pattern, in code order.
    pub fn match_all(&self, tokens: &[Token]) -> Vec<PatternMatch> {
        self.patterns.values().filter_map(|p| match_pattern(p, &self.lexicons, tokens)).collect()
    }

    pub fn match_entity(&self, tokens: &[Token], entity: EntityLabel) -> Vec<PatternMatch> {
        self.patterns_for(entity).filter_map(|p| match_pattern(p, &self.lexicons, tokens)).collect()
    }

    pub fn fingerprint(&self) -> u64 {
        let mut fp = Fingerprint::new();
        for p in self.patterns.values() {
            fp.write_str(&p.code).write_str(p.entity.as_str());
            for slot in &p.slots {
                match slot {
                    Slot::Lexicon(name) => fp.write_str("lexicon").write_str(name),
                    Slot::Literal(phrase) => fp.write_str("literal").write_str(phrase),
                    Slot::EntityMention => fp.write_str("entity_mention"),
                    Slot::Gap(n) => fp.write_str("gap").write(&(*n as u64).to_le_bytes()),
                };
            }
        }
        for lex in self.lexicons.values() {
            fp.write_str(lex.name());
            for term in lex.terms() {
                fp.write_str(term);
            }
        }
        fp.finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pattern::tokenize;
    use alloc::string::ToString;
    use alloc::vec;

    fn afx1() -> DiscoursePattern {
        DiscoursePattern {
            code: "AFX1".into(),
            entity: EntityLabel::Af,
            slots: vec![Slot::Literal("sanitize".into()), Slot::EntityMention],
            description: String::new(),
            example: String::new(),
        }
    }

    #[test]
    fn builtin_has_nine_patterns() {
        let c = Catalog::builtin();
        assert_eq!(c.len(), 9);
        assert_eq!(c.count(EntityLabel::Vt), 3);
        assert_eq!(c.count(EntityLabel::Af), 3);
        assert_eq!(c.count(EntityLabel::Cp), 3);
    }

    #[test]
    fn additive_load() {
        let c = Catalog::builtin().extend(vec![], vec![afx1()]).unwrap();
        assert_eq!(c.len(), 10);
    }

    #[test]
    fn override_by_code_changes_behavior() {
        let sentence = tokenize("Sanitize the length in foo_parse().");
        let c = Catalog::builtin();
        assert!(c.match_all(&sentence).iter().all(|m| m.pattern_code != "AFBC"));
        let mut p = afx1();
        p.code = "AFBC".into();
        let c = c.extend(vec![], vec![p]).unwrap();
        assert_eq!(c.len(), 9);
        let codes: Vec<_> = c.match_all(&sentence).into_iter().map(|m| m.pattern_code).collect();
        assert_eq!(codes, vec!["AFBC".to_string()]);
        // the old rule's own example no longer matches the overridden code
        let old = tokenize("Add a bounds check in name_len().");
        assert!(c.match_all(&old).iter().all(|m| m.pattern_code != "AFBC"));
    }

    #[test]
    fn load_errors() {
        let dup = Catalog::builtin().extend(vec![], vec![afx1(), afx1()]);
        assert_eq!(dup.unwrap_err(), CatalogError::DuplicateCode("AFX1".into()));

        let mut p = afx1();
        p.slots = vec![Slot::Lexicon("no_such".into())];
        let err = Catalog::builtin().extend(vec![], vec![p]).unwrap_err();
        assert!(matches!(err, CatalogError::UnknownLexicon { .. }));

        let mut p = afx1();
        p.slots.clear();
        assert!(matches!(Catalog::builtin().extend(vec![], vec![p]), Err(CatalogError::EmptySlots(_))));

        let lex = Lexicon::new("x", &["a"]).unwrap();
        let err = Catalog::builtin().extend(vec![lex.clone(), lex], vec![]).unwrap_err();
        assert_eq!(err, CatalogError::DuplicateLexicon("x".into()));
    }

    #[test]
    fn lexicon_override_by_name() {
        let lex = Lexicon::new("avoid_verbs", &["forbid"]).unwrap();
        let c = Catalog::builtin().extend(vec![lex], vec![]).unwrap();
        let hits = c.match_entity(&tokenize("Forbid empty names."), EntityLabel::Af);
        assert_eq!(hits.len(), 1);
        assert!(c.match_entity(&tokenize("Reject empty names."), EntityLabel::Af).is_empty());
    }

    #[test]
    fn fingerprint_tracks_content() {
        let a = Catalog::builtin();
        let b = Catalog::builtin().extend(vec![], vec![afx1()]).unwrap();
        assert_eq!(a.fingerprint(), Catalog::builtin().fingerprint());
        assert_ne!(a.fingerprint(), b.fingerprint());
    }
}
