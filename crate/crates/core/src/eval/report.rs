use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::extraction::ExtractionRow;
use super::tracing::{Exclusion, PairTraceRow, SingleTraceRow, TraceMode};
use crate::extract::ClassifierChoice;
use crate::label::EntityLabel;

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub config_hash: String,
    pub corpus_fingerprint: String,
    pub catalog_fingerprint: String,
}

/// Everything needed to render the report tables, with the counts behind each cell.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ReportBundle {
    pub provenance: Provenance,
    pub k_values: Vec<usize>,
    pub extraction: Vec<ExtractionRow>,
    pub single_trace: Vec<SingleTraceRow>,
    pub pair_trace: Vec<PairTraceRow>,
    pub excluded: Vec<Exclusion>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

/// A fraction as a percentage with two decimals.
pub fn format_percent(v: f64) -> String {
    format!("{:.2}", v * 100.0)
}

fn cell(v: Option<f64>) -> String {
    v.map_or_else(|| "n/a".to_string(), format_percent)
}

/// Classifier rows with P, R and F1 columns per entity.
pub fn extraction_table(rows: &[ExtractionRow]) -> Table {
    let mut header = vec!["classifier".to_string()];
    for e in EntityLabel::ALL {
        for m in ["P", "R", "F1"] {
            header.push(format!("{e}_{m}"));
        }
    }
    header.push("notes".into());

    let mut order: Vec<ClassifierChoice> = Vec::new();
    for r in rows {
        if !order.contains(&r.classifier) {
            order.push(r.classifier);
        }
    }
    let mut out = Vec::new();
    for c in order {
        let mut line = vec![c.to_string()];
        let mut notes = Vec::new();
        for e in EntityLabel::ALL {
            match rows.iter().find(|r| r.classifier == c && r.entity == e) {
                Some(r) => {
                    line.extend([r.precision, r.recall, r.f1].map(format_percent));
                    notes.extend(r.annotations().map(|(p, a)| format!("{e} fold {p}: {a}")));
                }
                None => line.extend(["n/a", "n/a", "n/a"].map(String::from)),
            }
        }
        line.push(notes.join("; "));
        out.push(line);
    }
    Table { header, rows: out }
}

/// Single-entity and pair TopK rows, one column per k.
pub fn trace_table(singles: &[SingleTraceRow], pairs: &[PairTraceRow], k_values: &[usize]) -> Table {
    let mut header: Vec<String> = ["table", "mode", "scorer", "target"].map(String::from).to_vec();
    header.extend(k_values.iter().map(|k| format!("top{k}")));

    // (table, mode, scorer, target) -> k -> value
    type RowKey = (u8, TraceMode, String, String);
    let mut grouped: BTreeMap<RowKey, BTreeMap<usize, Option<f64>>> = BTreeMap::new();
    for r in singles {
        grouped
            .entry((0, r.mode, r.scorer.clone(), r.entity.to_string()))
            .or_default()
            .insert(r.k, r.value);
    }
    for r in pairs {
        grouped
            .entry((1, r.mode, r.scorer.clone(), r.kind.as_str().to_string()))
            .or_default()
            .insert(r.k, r.value);
    }
    let rows = grouped
        .into_iter()
        .map(|((t, mode, scorer, target), values)| {
            let mut line = vec![if t == 0 { "single" } else { "pair" }.to_string(), mode.as_str().into(), scorer, target];
            line.extend(k_values.iter().map(|k| cell(values.get(k).copied().flatten())));
            line
        })
        .collect();
    Table { header, rows }
}

fn md_escape(s: &str) -> String {
    s.replace('|', "\\|")
}

/// Pipe table with the same cells as the CSV rendering.
pub fn render_markdown(table: &Table) -> String {
    let mut out = String::new();
    let row = |cells: &[String], out: &mut String| {
        out.push('|');
        for c in cells {
            out.push(' ');
            out.push_str(&md_escape(c));
            out.push_str(" |");
        }
        out.push('\n');
    };
    row(&table.header, &mut out);
    out.push('|');
    for _ in &table.header {
        out.push_str(" --- |");
    }
    out.push('\n');
    for r in &table.rows {
        row(r, &mut out);
    }
    out
}
