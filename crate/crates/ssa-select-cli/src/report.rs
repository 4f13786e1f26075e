//! Report structures and file emission.
//!
//! Every command that produces results writes them under one output
//! directory: `report.json` (self-contained record with the echoed
//! config), `convergence.csv`, `selected_features.txt`, and for compare
//! runs `metrics_table.txt` in the paper's percent layout. Files are
//! written atomically (temp file + rename) after all computation has
//! succeeded, so failures leave no partial reports behind.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use ssa_select::classify::{GnbModel, MlpModel, SvmModel};
use ssa_select::error::{Error, Result};
use ssa_select::metrics::MetricSet;
use ssa_select::select::SelectionResult;

use crate::config::RunConfig;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SelectionSection {
    pub selected_indices: Vec<usize>,
    pub selected_names: Vec<String>,
    pub fitness: f64,
    pub cv_error: f64,
    pub convergence: Vec<f64>,
}

impl SelectionSection {
    pub fn from_result(result: &SelectionResult, feature_names: &[String]) -> SelectionSection {
        SelectionSection {
            selected_indices: result.selected_indices.clone(),
            selected_names: result
                .selected_indices
                .iter()
                .map(|&j| feature_names[j].clone())
                .collect(),
            fitness: result.fitness,
            cv_error: result.cv_error,
            convergence: result.convergence.clone(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OracleSection {
    pub selected_indices: Vec<usize>,
    pub selected_names: Vec<String>,
    pub fitness: f64,
    pub cv_error: f64,
    /// `selection_fitness - oracle_fitness` when a prior selection report
    /// was supplied for comparison; non-negative when the oracle holds.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gap_to_selection: Option<f64>,
}

/// Trained model parameters, serialized into the report. KNN stores its
/// training data by reference: source name plus row indices.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModelRecord {
    Knn {
        k: usize,
        source: String,
        train_rows: Vec<usize>,
    },
    Gnb {
        model: GnbModel,
    },
    Mlp {
        model: MlpModel,
    },
    Svm {
        model: SvmModel,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClassifierSection {
    /// Row name in the metrics table (SSA_KNN, KNN, NN, NB, SVM, *_FS).
    pub name: String,
    /// "all" or "selected" feature columns.
    pub feature_scope: String,
    pub metrics: MetricSet,
    /// Predictions on the held-out test set, in test-row order.
    pub predictions: Vec<u8>,
    pub model: ModelRecord,
}

/// Self-contained experiment record: re-running the echoed config
/// reproduces every number.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunReport {
    pub command: String,
    pub config: RunConfig,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub selection: Option<SelectionSection>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub oracle: Option<OracleSection>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub classifiers: Vec<ClassifierSection>,
    /// Held-out test labels, stored so the report re-validates.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub test_labels: Option<Vec<u8>>,
}

/// Atomically writes `content` to `dir/name` via a temp file + rename.
pub fn write_file(dir: &Path, name: &str, content: &str) -> Result<()> {
    let tmp = dir.join(format!(".{name}.tmp"));
    let target = dir.join(name);
    std::fs::write(&tmp, content)?;
    std::fs::rename(&tmp, &target)?;
    Ok(())
}

pub fn render_report(report: &RunReport) -> String {
    let mut text = serde_json::to_string_pretty(report).expect("report serializes");
    text.push('\n');
    text
}

pub fn render_convergence_csv(convergence: &[f64]) -> String {
    let mut out = String::from("iteration,best_fitness\n");
    for (t, f) in convergence.iter().enumerate() {
        let _ = writeln!(out, "{t},{f}");
    }
    out
}

pub fn render_selected_features(indices: &[usize]) -> String {
    let mut out = String::new();
    for j in indices {
        let _ = writeln!(out, "{j}");
    }
    out
}

/// Metrics table in the paper's layout: one row per classifier, percent
/// values with two decimals.
pub fn render_metrics_table(rows: &[ClassifierSection]) -> String {
    let name_width = rows
        .iter()
        .map(|r| r.name.len())
        .chain(std::iter::once("Classifier".len()))
        .max()
        .unwrap_or(10)
        + 2;
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<name_width$}{:>10}{:>10}{:>12}{:>10}",
        "Classifier", "Accuracy", "Recall", "Precision", "F1"
    );
    for row in rows {
        let m = &row.metrics;
        let _ = writeln!(
            out,
            "{:<name_width$}{:>10.2}{:>10.2}{:>12.2}{:>10.2}",
            row.name,
            m.accuracy * 100.0,
            m.recall * 100.0,
            m.precision * 100.0,
            m.f1 * 100.0
        );
    }
    out
}

pub fn read_report(path: &PathBuf) -> Result<RunReport> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::data(format!("cannot read report '{}': {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| Error::data(format!("invalid report '{}': {e}", path.display())))
}
