//! Confusion-matrix construction and the derived assessment criteria:
//! accuracy, sensitivity/recall, precision, and F1.
//!
//! The positive class is fraud (label 1) everywhere. All values are
//! fractions in `[0, 1]`; percent rendering is left to callers.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// 2x2 contingency counts with label 1 as the positive class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    /// True positives: fraud predicted fraud.
    pub tpc: usize,
    /// False positives: normal predicted fraud.
    pub fpc: usize,
    /// False negatives: fraud predicted normal.
    pub fnc: usize,
    /// True negatives: normal predicted normal.
    pub tnc: usize,
}

impl ConfusionMatrix {
    pub fn total(&self) -> usize {
        self.tpc + self.fpc + self.fnc + self.tnc
    }

    /// Misclassification rate `(FP + FN) / (P + N)`.
    pub fn error(&self) -> f64 {
        (self.fpc + self.fnc) as f64 / self.total() as f64
    }
}

/// The four assessment criteria as fractions in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricSet {
    pub accuracy: f64,
    pub recall: f64,
    pub precision: f64,
    pub f1: f64,
}

impl MetricSet {
    /// Misclassification rate, `1 - accuracy`.
    pub fn error(&self) -> f64 {
        1.0 - self.accuracy
    }
}

/// Counts the 2x2 contingency of predictions against truth.
///
/// Labels must be 0 or 1 and the two slices must have equal, nonzero
/// length.
pub fn confusion(y_true: &[u8], y_pred: &[u8]) -> Result<ConfusionMatrix> {
    if y_true.len() != y_pred.len() {
        return Err(Error::contract(format!(
            "label length mismatch: {} true vs {} predicted",
            y_true.len(),
            y_pred.len()
        )));
    }
    if y_true.is_empty() {
        return Err(Error::contract("cannot score an empty label vector"));
    }
    let mut cm = ConfusionMatrix {
        tpc: 0,
        fpc: 0,
        fnc: 0,
        tnc: 0,
    };
    for (i, (&t, &p)) in y_true.iter().zip(y_pred.iter()).enumerate() {
        match (t, p) {
            (1, 1) => cm.tpc += 1,
            (0, 1) => cm.fpc += 1,
            (1, 0) => cm.fnc += 1,
            (0, 0) => cm.tnc += 1,
            _ => {
                return Err(Error::contract(format!(
                    "non-binary label at index {i}: true={t}, predicted={p}"
                )))
            }
        }
    }
    Ok(cm)
}

/// Derives accuracy, recall, precision and F1 from a confusion matrix.
///
/// Zero-denominator conventions: recall is 0 when there are no positives,
/// precision is 0 when nothing was predicted positive, and F1 is 0 when
/// precision + recall is 0. Accuracy is computed as `1 - (FP+FN)/total`
/// so it is exactly one minus the error rate used by the fitness term.
pub fn metric_set(cm: &ConfusionMatrix) -> Result<MetricSet> {
    let total = cm.total();
    if total == 0 {
        return Err(Error::contract("empty confusion matrix"));
    }
    let accuracy = 1.0 - (cm.fpc + cm.fnc) as f64 / total as f64;
    let recall = if cm.tpc + cm.fnc == 0 {
        0.0
    } else {
        cm.tpc as f64 / (cm.tpc + cm.fnc) as f64
    };
    let precision = if cm.tpc + cm.fpc == 0 {
        0.0
    } else {
        cm.tpc as f64 / (cm.tpc + cm.fpc) as f64
    };
    let f1 = if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    };
    Ok(MetricSet {
        accuracy,
        recall,
        precision,
        f1,
    })
}
