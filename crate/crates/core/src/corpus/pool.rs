use alloc::vec::Vec;

use thiserror::Error;

use super::diff::{CodeDiff, CodeLine};
use crate::label::{ChangeKind, EntityLabel, Side};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("candidate pool for {0} is empty")]
pub struct EmptyPool(pub EntityLabel);

/// Blank lines and lines made only of braces, semicolons and commas.
pub fn is_trivial_line(content: &str) -> bool {
    content.trim().chars().all(|c| matches!(c, '{' | '}' | ';' | ','))
}

/// Which materialized diff lines are eligible targets for an entity.
pub fn pool_admits(entity: EntityLabel, line: &CodeLine) -> bool {
    matches!(
        (entity, line.change, line.side),
        (EntityLabel::Vt, ChangeKind::Removed, _)
            | (EntityLabel::Vt, ChangeKind::Context, Side::Old)
            | (EntityLabel::Af, ChangeKind::Added, _)
            | (EntityLabel::Af, ChangeKind::Context, Side::New)
            | (EntityLabel::Cp, ChangeKind::Added | ChangeKind::Removed, _)
            | (EntityLabel::Cp, ChangeKind::Context, Side::New)
    )
}

/// Candidate code lines for an entity, ordered by (file, side, line_no).
///
/// VT draws from the old side (removed and context lines), AF from the
/// new side (added and context lines), CP from both with each context
/// line kept once on the new side.
pub fn candidate_pool(diff: &CodeDiff, entity: EntityLabel) -> Result<Vec<CodeLine>, EmptyPool> {
    let mut pool: Vec<CodeLine> = diff
        .code_lines()
        .into_iter()
        .filter(|l| pool_admits(entity, l) && !is_trivial_line(&l.content))
        .collect();
    pool.sort_by_key(|l| l.key());
    pool.dedup_by_key(|l| l.key());
    if pool.is_empty() {
        Err(EmptyPool(entity))
    } else {
        Ok(pool)
    }
}
