//! CSV and markdown outputs.

use std::fs;
use std::io;
use std::path::Path;

use serde::{Deserialize, Serialize};

use vulntrace_core::eval::{render_markdown, PredictionRow, RankingRow, Table};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PredictionCsv {
    pub fold: String,
    pub cve_id: String,
    pub sentence_key: String,
    pub entity: String,
    pub classifier: String,
    pub predicted: bool,
    /// Empty when the record has no gold labels.
    pub gold: Option<bool>,
    /// Matching pattern codes of the entity, `;`-separated.
    pub patterns: String,
}

impl From<&PredictionRow> for PredictionCsv {
    fn from(r: &PredictionRow) -> Self {
        PredictionCsv {
            fold: r.fold.clone(),
            cve_id: r.cve_id.clone(),
            sentence_key: r.sentence.to_string(),
            entity: r.entity.to_string(),
            classifier: r.classifier.to_string(),
            predicted: r.predicted,
            gold: Some(r.gold),
            patterns: r.patterns.join(";"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankingCsv {
    pub cve_id: String,
    pub entity: String,
    pub sentence_key: String,
    pub rank: usize,
    pub file: String,
    pub side: String,
    pub line_no: u32,
    pub score: f64,
}

impl From<&RankingRow> for RankingCsv {
    fn from(r: &RankingRow) -> Self {
        RankingCsv {
            cve_id: r.cve_id.clone(),
            entity: r.entity.to_string(),
            sentence_key: r.sentence.to_string(),
            rank: r.rank,
            file: r.line.file.clone(),
            side: r.line.side.to_string(),
            line_no: r.line.line_no,
            score: r.score,
        }
    }
}

fn to_io(e: csv::Error) -> io::Error {
    io::Error::other(e)
}

/// Writes rows with a header line; an empty slice yields the header alone.
pub fn write_rows<T: Serialize>(path: &Path, header: &[&str], rows: &[T]) -> io::Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_path(path).map_err(to_io)?;
    w.write_record(header).map_err(to_io)?;
    for r in rows {
        w.serialize(r).map_err(to_io)?;
    }
    w.flush()
}

pub const PREDICTION_HEADER: [&str; 8] =
    ["fold", "cve_id", "sentence_key", "entity", "classifier", "predicted", "gold", "patterns"];
pub const RANKING_HEADER: [&str; 8] = ["cve_id", "entity", "sentence_key", "rank", "file", "side", "line_no", "score"];

pub fn write_predictions(path: &Path, rows: &[PredictionCsv]) -> io::Result<()> {
    write_rows(path, &PREDICTION_HEADER, rows)
}

pub fn write_rankings(path: &Path, rows: &[RankingCsv]) -> io::Result<()> {
    write_rows(path, &RANKING_HEADER, rows)
}

pub fn read_predictions(path: &Path) -> io::Result<Vec<PredictionCsv>> {
    let mut r = csv::Reader::from_path(path).map_err(to_io)?;
    r.deserialize().collect::<Result<_, _>>().map_err(to_io)
}

pub fn read_rankings(path: &Path) -> io::Result<Vec<RankingCsv>> {
    let mut r = csv::Reader::from_path(path).map_err(to_io)?;
    r.deserialize().collect::<Result<_, _>>().map_err(to_io)
}

pub fn write_table_csv(path: &Path, table: &Table) -> io::Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(to_io)?;
    w.write_record(&table.header).map_err(to_io)?;
    for r in &table.rows {
        w.write_record(r).map_err(to_io)?;
    }
    w.flush()
}

pub fn read_table_csv(path: &Path) -> io::Result<Table> {
    let mut r = csv::ReaderBuilder::new().has_headers(false).from_path(path).map_err(to_io)?;
    let mut records = r.records();
    let header = match records.next() {
        Some(h) => h.map_err(to_io)?.iter().map(String::from).collect(),
        None => Vec::new(),
    };
    let rows = records
        .map(|r| r.map(|r| r.iter().map(String::from).collect()))
        .collect::<Result<_, _>>()
        .map_err(to_io)?;
    Ok(Table { header, rows })
}

/// Writes `<stem>.csv` and `<stem>.md` holding the same cells.
pub fn write_table(dir: &Path, stem: &str, table: &Table) -> io::Result<()> {
    write_table_csv(&dir.join(format!("{stem}.csv")), table)?;
    fs::write(dir.join(format!("{stem}.md")), render_markdown(table))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_rankings_is_header_only() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("r.csv");
        write_rankings(&p, &[]).unwrap();
        assert_eq!(fs::read_to_string(&p).unwrap(), "cve_id,entity,sentence_key,rank,file,side,line_no,score\n");
    }

    #[test]
    fn predictions_read_back() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("p.csv");
        let row = PredictionCsv {
            fold: String::new(),
            cve_id: "C".into(),
            sentence_key: "bug_report:0".into(),
            entity: "AF".into(),
            classifier: "heuristic".into(),
            predicted: true,
            gold: None,
            patterns: "AFBC;AFa".into(),
        };
        write_predictions(&p, std::slice::from_ref(&row)).unwrap();
        assert_eq!(read_predictions(&p).unwrap(), vec![row]);
    }

    #[test]
    fn table_csv_matches_markdown_cells() {
        let dir = tempfile::tempdir().unwrap();
        let t = Table { header: vec!["a".into(), "b".into()], rows: vec![vec!["1.00".into(), "x, y".into()]] };
        write_table(dir.path(), "t", &t).unwrap();
        assert_eq!(read_table_csv(&dir.path().join("t.csv")).unwrap(), t);
        let md = fs::read_to_string(dir.path().join("t.md")).unwrap();
        assert_eq!(md, "| a | b |\n| --- | --- |\n| 1.00 | x, y |\n");
    }
}
