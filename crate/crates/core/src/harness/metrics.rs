//! Binary detection metrics.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Scores {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

fn ratio(num: f64, den: f64) -> f64 {
    if den > 0.0 {
        num / den
    } else {
        0.0
    }
}

/// F1 from precision and recall; 0 when both are 0.
pub fn f1_score(precision: f64, recall: f64) -> f64 {
    ratio(2.0 * precision * recall, precision + recall)
}

/// Precision, recall and F1 from true/false positives and negatives, given
/// either as counts or as rates. Any 0/0 reads as 0.
pub fn metrics(tp: f64, fp: f64, _tn: f64, fn_: f64) -> Scores {
    let precision = ratio(tp, tp + fp);
    let recall = ratio(tp, tp + fn_);
    Scores { precision, recall, f1: f1_score(precision, recall) }
}

/// Outcome counts of a binary test.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Confusion {
    pub tp: u64,
    pub fp: u64,
    pub tn: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
}

/// Outcomes as rates: `tp` and `fn` over the positives, `tn` and `fp` over
/// the negatives.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Rates {
    pub tp: f64,
    pub fp: f64,
    pub tn: f64,
    #[serde(rename = "fn")]
    pub fn_: f64,
}

impl Confusion {
    pub fn record(&mut self, truth: bool, predicted: bool) {
        match (truth, predicted) {
            (true, true) => self.tp += 1,
            (true, false) => self.fn_ += 1,
            (false, true) => self.fp += 1,
            (false, false) => self.tn += 1,
        }
    }

    pub fn merge(self, o: Self) -> Self {
        Self { tp: self.tp + o.tp, fp: self.fp + o.fp, tn: self.tn + o.tn, fn_: self.fn_ + o.fn_ }
    }

    pub fn positives(&self) -> u64 {
        self.tp + self.fn_
    }

    pub fn negatives(&self) -> u64 {
        self.tn + self.fp
    }

    pub fn rates(&self) -> Rates {
        let (p, n) = (self.positives() as f64, self.negatives() as f64);
        Rates {
            tp: ratio(self.tp as f64, p),
            fn_: ratio(self.fn_ as f64, p),
            tn: ratio(self.tn as f64, n),
            fp: ratio(self.fp as f64, n),
        }
    }

    pub fn scores(&self) -> Scores {
        metrics(self.tp as f64, self.fp as f64, self.tn as f64, self.fn_ as f64)
    }
}
