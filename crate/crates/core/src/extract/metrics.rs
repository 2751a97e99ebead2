use alloc::collections::BTreeMap;
use alloc::string::ToString;
use core::fmt::Display;

use serde::{Deserialize, Serialize};

use super::ExtractError;

/// Confusion counts for one binary problem.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtractionMetrics {
    pub tp: u64,
    pub fp: u64,
    pub fn_: u64,
    pub tn: u64,
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

impl ExtractionMetrics {
    pub fn record(&mut self, predicted: bool, gold: bool) {
        match (predicted, gold) {
            (true, true) => self.tp += 1,
            (true, false) => self.fp += 1,
            (false, true) => self.fn_ += 1,
            (false, false) => self.tn += 1,
        }
    }

    pub fn precision(&self) -> f64 {
        ratio(self.tp, self.tp + self.fp)
    }

    pub fn recall(&self) -> f64 {
        ratio(self.tp, self.tp + self.fn_)
    }

    pub fn f1(&self) -> f64 {
        let (p, r) = (self.precision(), self.recall());
        if p + r == 0.0 {
            0.0
        } else {
            2.0 * p * r / (p + r)
        }
    }

    pub fn merge(&mut self, other: &ExtractionMetrics) {
        self.tp += other.tp;
        self.fp += other.fp;
        self.fn_ += other.fn_;
        self.tn += other.tn;
    }
}

/// Confusion counts over sentences present in both maps.
pub fn evaluate_extraction<K: Ord + Display>(
    predictions: &BTreeMap<K, bool>,
    gold: &BTreeMap<K, bool>,
) -> Result<ExtractionMetrics, ExtractError> {
    if let Some(k) = predictions.keys().find(|k| !gold.contains_key(*k)) {
        return Err(ExtractError::KeyMismatch(k.to_string()));
    }
    if let Some(k) = gold.keys().find(|k| !predictions.contains_key(*k)) {
        return Err(ExtractError::KeyMismatch(k.to_string()));
    }
    let mut m = ExtractionMetrics::default();
    for (k, &p) in predictions {
        m.record(p, gold[k]);
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn map(v: &[(u32, bool)]) -> BTreeMap<u32, bool> {
        v.iter().copied().collect()
    }

    #[test]
    fn all_correct() {
        let g = map(&[(1, true), (2, false), (3, true)]);
        let m = evaluate_extraction(&g, &g).unwrap();
        assert_eq!((m.precision(), m.recall(), m.f1()), (1.0, 1.0, 1.0));
    }

    #[test]
    fn one_tp_one_fp() {
        let m = ExtractionMetrics { tp: 1, fp: 1, fn_: 0, tn: 0 };
        assert_eq!(m.precision(), 0.5);
        assert_eq!(m.recall(), 1.0);
        assert!((m.f1() - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn zero_denominators() {
        let m = ExtractionMetrics { tp: 0, fp: 0, fn_: 0, tn: 5 };
        assert_eq!((m.precision(), m.recall(), m.f1()), (0.0, 0.0, 0.0));
    }

    #[test]
    fn key_mismatch() {
        let p = map(&[(1, true), (4, false)]);
        let g = map(&[(1, true), (2, false)]);
        assert_eq!(evaluate_extraction(&p, &g), Err(ExtractError::KeyMismatch("4".into())));
    }
}
