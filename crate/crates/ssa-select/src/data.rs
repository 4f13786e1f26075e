//! Dataset ingestion, stratified splitting, k-fold assignment, and a
//! synthetic imbalanced fraud-data generator.
//!
//! CSV format: comma-separated, one header row, UTF-8, `.` decimal
//! separator, LF line endings. The label column is addressed by name and
//! accepts `0`/`1` as well as the `normal`/`fraud` aliases. Everything
//! else must parse as a finite real.

use std::fmt::Write as _;
use std::path::Path;

use rand::seq::SliceRandom;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seeds::{self, domain};

/// A numeric feature matrix with binary labels (1 = fraud).
///
/// Immutable after construction; all invariants (finite features, binary
/// labels, consistent shapes) are checked by [`Dataset::new`]. `row_ids`
/// tracks each row's index in the originating source so models that store
/// training data by reference stay resolvable after splits.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    features: Vec<Vec<f64>>,
    labels: Vec<u8>,
    feature_names: Vec<String>,
    source: String,
    row_ids: Vec<usize>,
}

impl Dataset {
    pub fn new(
        features: Vec<Vec<f64>>,
        labels: Vec<u8>,
        feature_names: Vec<String>,
        source: impl Into<String>,
    ) -> Result<Self> {
        let n = features.len();
        if n == 0 {
            return Err(Error::data("dataset has no rows"));
        }
        let a = features[0].len();
        if a == 0 {
            return Err(Error::data("dataset has no feature columns"));
        }
        if feature_names.len() != a {
            return Err(Error::data(format!(
                "{} feature names for {a} columns",
                feature_names.len()
            )));
        }
        if labels.len() != n {
            return Err(Error::data(format!("{} labels for {n} rows", labels.len())));
        }
        for (i, row) in features.iter().enumerate() {
            if row.len() != a {
                return Err(Error::data(format!(
                    "row {i} has {} columns, expected {a}",
                    row.len()
                )));
            }
            for (j, v) in row.iter().enumerate() {
                if !v.is_finite() {
                    return Err(Error::data(format!(
                        "non-finite feature value {v} at row {i}, column '{}'",
                        feature_names[j]
                    )));
                }
            }
        }
        if let Some(i) = labels.iter().position(|&l| l > 1) {
            return Err(Error::data(format!(
                "non-binary label {} at row {i}",
                labels[i]
            )));
        }
        let row_ids = (0..n).collect();
        Ok(Dataset {
            features,
            labels,
            feature_names,
            source: source.into(),
            row_ids,
        })
    }

    pub fn n_samples(&self) -> usize {
        self.features.len()
    }

    pub fn n_features(&self) -> usize {
        self.features[0].len()
    }

    pub fn features(&self) -> &[Vec<f64>] {
        &self.features
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.features[i]
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    /// Row indices into the originating source.
    pub fn row_ids(&self) -> &[usize] {
        &self.row_ids
    }

    /// (normal count, fraud count).
    pub fn class_counts(&self) -> (usize, usize) {
        let frauds = self.labels.iter().filter(|&&l| l == 1).count();
        (self.labels.len() - frauds, frauds)
    }

    /// New dataset holding the given rows, preserving source provenance.
    pub fn select_rows(&self, indices: &[usize]) -> Dataset {
        Dataset {
            features: indices.iter().map(|&i| self.features[i].clone()).collect(),
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
            feature_names: self.feature_names.clone(),
            source: self.source.clone(),
            row_ids: indices.iter().map(|&i| self.row_ids[i]).collect(),
        }
    }

    /// New dataset restricted to the given feature columns (ascending order
    /// expected).
    pub fn select_columns(&self, columns: &[usize]) -> Dataset {
        Dataset {
            features: self
                .features
                .iter()
                .map(|row| columns.iter().map(|&j| row[j]).collect())
                .collect(),
            labels: self.labels.clone(),
            feature_names: columns
                .iter()
                .map(|&j| self.feature_names[j].clone())
                .collect(),
            source: self.source.clone(),
            row_ids: self.row_ids.clone(),
        }
    }
}

/// Train/test split parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SplitSpec {
    pub test_fraction: f64,
    pub stratified: bool,
    pub seed: u64,
}

impl Default for SplitSpec {
    fn default() -> Self {
        SplitSpec {
            test_fraction: 0.3,
            stratified: true,
            seed: 0,
        }
    }
}

impl SplitSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.test_fraction > 0.0 && self.test_fraction < 1.0) {
            return Err(Error::config(format!(
                "test_fraction must lie in (0, 1), got {}",
                self.test_fraction
            )));
        }
        Ok(())
    }
}

/// Synthetic imbalanced fraud-data parameters.
///
/// Informative features occupy columns `0..n_informative`; noise columns
/// follow. `class_separation` is the Euclidean distance between the two
/// class centroids in units of the per-feature standard deviation, spread
/// evenly over the informative dimensions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SynthSpec {
    pub n_samples: usize,
    pub n_informative: usize,
    pub n_noise: usize,
    pub class_separation: f64,
    pub fraud_fraction: f64,
    pub seed: u64,
}

impl Default for SynthSpec {
    fn default() -> Self {
        SynthSpec {
            n_samples: 300,
            n_informative: 3,
            n_noise: 7,
            class_separation: 3.0,
            fraud_fraction: 0.1,
            seed: 0,
        }
    }
}

impl SynthSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n_informative < 1 {
            return Err(Error::config("n_informative must be at least 1"));
        }
        if !(self.fraud_fraction > 0.0 && self.fraud_fraction <= 0.5) {
            return Err(Error::config(format!(
                "fraud_fraction must lie in (0, 0.5], got {}",
                self.fraud_fraction
            )));
        }
        let frauds = (self.fraud_fraction * self.n_samples as f64).round() as usize;
        if frauds == 0 || frauds >= self.n_samples {
            return Err(Error::config(format!(
                "n_samples {} with fraud_fraction {} yields a degenerate class split",
                self.n_samples, self.fraud_fraction
            )));
        }
        Ok(())
    }
}

const LABEL_TOKENS: &str = "expected 0, 1, 'normal' or 'fraud'";

fn parse_label(token: &str, row: usize, column: &str) -> Result<u8> {
    match token.trim().to_ascii_lowercase().as_str() {
        "0" | "normal" => Ok(0),
        "1" | "fraud" => Ok(1),
        other => Err(Error::data(format!(
            "unknown label token '{other}' at row {row}, column '{column}' ({LABEL_TOKENS})"
        ))),
    }
}

/// Loads a dataset from CSV. Non-label columns are parsed as finite reals
/// in header order; the named label column supplies the binary labels.
pub fn load_csv(path: &Path, label_column: &str) -> Result<Dataset> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)
        .map_err(|e| Error::data(format!("cannot open '{}': {e}", path.display())))?;
    let headers: Vec<String> = reader
        .headers()
        .map_err(|e| Error::data(format!("bad header row in '{}': {e}", path.display())))?
        .iter()
        .map(str::to_owned)
        .collect();
    for (i, h) in headers.iter().enumerate() {
        if headers[..i].contains(h) {
            return Err(Error::data(format!("duplicate header name '{h}'")));
        }
    }
    let label_idx = headers
        .iter()
        .position(|h| h == label_column)
        .ok_or_else(|| Error::data(format!("label column '{label_column}' not found in header")))?;
    let feature_names: Vec<String> = headers
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != label_idx)
        .map(|(_, h)| h.clone())
        .collect();

    let mut features = Vec::new();
    let mut labels = Vec::new();
    for (row_no, record) in reader.records().enumerate() {
        let row = row_no + 1; // 1-based data row, header excluded
        let record = record.map_err(|e| Error::data(format!("row {row}: {e}")))?;
        if record.len() != headers.len() {
            return Err(Error::data(format!(
                "row {row} has {} fields, expected {}",
                record.len(),
                headers.len()
            )));
        }
        let mut feats = Vec::with_capacity(headers.len() - 1);
        for (col, field) in record.iter().enumerate() {
            if col == label_idx {
                labels.push(parse_label(field, row, &headers[col])?);
                continue;
            }
            let value: f64 = field.trim().parse().map_err(|_| {
                Error::data(format!(
                    "unparseable cell '{field}' at row {row}, column '{}'",
                    headers[col]
                ))
            })?;
            if !value.is_finite() {
                return Err(Error::data(format!(
                    "non-finite value '{field}' at row {row}, column '{}'",
                    headers[col]
                )));
            }
            feats.push(value);
        }
        features.push(feats);
    }
    Dataset::new(features, labels, feature_names, path.display().to_string())
}

/// Writes a dataset as CSV (feature columns in order, label column last).
///
/// Floats are formatted with the shortest representation that round-trips,
/// so `load_csv(save_csv(d))` reproduces `d` exactly.
pub fn save_csv(data: &Dataset, path: &Path, label_column: &str) -> Result<()> {
    let mut out = String::new();
    for name in data.feature_names() {
        out.push_str(name);
        out.push(',');
    }
    out.push_str(label_column);
    out.push('\n');
    for (row, &label) in data.features().iter().zip(data.labels()) {
        for v in row {
            let _ = write!(out, "{v},");
        }
        let _ = writeln!(out, "{label}");
    }
    std::fs::write(path, out)?;
    Ok(())
}

/// Splits per-class test counts by largest remainder so the total equals
/// `round(fraction * n)` and each class is within one sample of its exact
/// share. Ties go to the lower class index.
fn stratified_test_counts(class_sizes: &[usize], fraction: f64) -> Vec<usize> {
    let n: usize = class_sizes.iter().sum();
    let total_test = (fraction * n as f64).round() as usize;
    let mut counts: Vec<usize> = Vec::with_capacity(class_sizes.len());
    let mut remainders: Vec<(usize, f64)> = Vec::with_capacity(class_sizes.len());
    for (c, &size) in class_sizes.iter().enumerate() {
        let exact = fraction * size as f64;
        let floor = exact.floor() as usize;
        counts.push(floor);
        remainders.push((c, exact - floor as f64));
    }
    let assigned: usize = counts.iter().sum();
    let mut leftover = total_test.saturating_sub(assigned);
    remainders.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
    for (c, _) in remainders {
        if leftover == 0 {
            break;
        }
        counts[c] += 1;
        leftover -= 1;
    }
    // Keep at least one sample of each class in the train part.
    for (c, &size) in class_sizes.iter().enumerate() {
        if counts[c] >= size {
            counts[c] = size - 1;
        }
    }
    counts
}

/// Disjoint, exhaustive train/test partition, stratified by default.
pub fn split(data: &Dataset, spec: &SplitSpec) -> Result<(Dataset, Dataset)> {
    spec.validate()?;
    let n = data.n_samples();
    if n < 4 {
        return Err(Error::data(format!("need at least 4 samples to split, got {n}")));
    }
    let mut test_idx: Vec<usize>;
    if spec.stratified {
        let (n0, n1) = data.class_counts();
        if n0 < 2 || n1 < 2 {
            return Err(Error::data(format!(
                "stratified split needs at least 2 samples per class (have {n0} normal, {n1} fraud)"
            )));
        }
        let counts = stratified_test_counts(&[n0, n1], spec.test_fraction);
        test_idx = Vec::new();
        for class in 0..2u8 {
            let mut members: Vec<usize> = (0..n).filter(|&i| data.labels()[i] == class).collect();
            members.shuffle(&mut seeds::derive_rng(
                spec.seed,
                &[domain::TRAIN_TEST_SPLIT, class as u64],
            ));
            test_idx.extend_from_slice(&members[..counts[class as usize]]);
        }
    } else {
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut seeds::derive_rng(spec.seed, &[domain::TRAIN_TEST_SPLIT]));
        let take = ((spec.test_fraction * n as f64).round() as usize).clamp(1, n - 1);
        test_idx = order[..take].to_vec();
    }
    test_idx.sort_unstable();
    let in_test: Vec<bool> = {
        let mut v = vec![false; n];
        for &i in &test_idx {
            v[i] = true;
        }
        v
    };
    let train_idx: Vec<usize> = (0..n).filter(|&i| !in_test[i]).collect();
    Ok((data.select_rows(&train_idx), data.select_rows(&test_idx)))
}

/// Stratified k-fold assignment: returns the fold index of every sample.
///
/// A pure function of (seed, labels): per class, indices are shuffled with
/// a seed-derived stream and dealt round-robin, so per-class fold sizes
/// differ by at most one.
pub fn kfold_assign(data: &Dataset, folds: usize, seed: u64) -> Result<Vec<usize>> {
    if folds < 2 {
        return Err(Error::config(format!("need at least 2 folds, got {folds}")));
    }
    let (n0, n1) = data.class_counts();
    if n0 < folds || n1 < folds {
        return Err(Error::data(format!(
            "each class needs at least {folds} samples for {folds}-fold CV (have {n0} normal, {n1} fraud)"
        )));
    }
    let mut assignment = vec![0usize; data.n_samples()];
    for class in 0..2u8 {
        let mut members: Vec<usize> = (0..data.n_samples())
            .filter(|&i| data.labels()[i] == class)
            .collect();
        members.shuffle(&mut seeds::derive_rng(seed, &[domain::KFOLD, class as u64]));
        for (pos, &i) in members.iter().enumerate() {
            assignment[i] = pos % folds;
        }
    }
    Ok(assignment)
}

/// Generates an imbalanced two-class Gaussian dataset.
///
/// The fraud centroid sits `class_separation` standard deviations from
/// the normal centroid (Euclidean, spread evenly across the informative
/// columns, so each informative column shifts by
/// `class_separation / sqrt(n_informative)`). Noise columns are standard
/// normal for both classes. Row order is a seeded shuffle.
pub fn generate_synthetic(spec: &SynthSpec) -> Result<Dataset> {
    spec.validate()?;
    let n = spec.n_samples;
    let n_frauds = (spec.fraud_fraction * n as f64).round() as usize;
    let dim = spec.n_informative + spec.n_noise;
    let per_dim_shift = spec.class_separation / (spec.n_informative as f64).sqrt();
    let mut rng = seeds::derive_rng(spec.seed, &[domain::SYNTH]);

    let mut rows: Vec<(Vec<f64>, u8)> = Vec::with_capacity(n);
    for i in 0..n {
        let label = u8::from(i < n_frauds);
        let mut row = Vec::with_capacity(dim);
        for j in 0..dim {
            let z: f64 = StandardNormal.sample(&mut rng);
            let shift = if label == 1 && j < spec.n_informative {
                per_dim_shift
            } else {
                0.0
            };
            row.push(shift + z);
        }
        rows.push((row, label));
    }
    rows.shuffle(&mut rng);

    let mut names: Vec<String> = (0..spec.n_informative).map(|j| format!("inf{j}")).collect();
    names.extend((0..spec.n_noise).map(|j| format!("noise{j}")));
    let source = format!(
        "synthetic(seed={}, n={}, informative={}, noise={}, separation={}, fraud_fraction={})",
        spec.seed, n, spec.n_informative, spec.n_noise, spec.class_separation, spec.fraud_fraction
    );
    let (features, labels): (Vec<_>, Vec<_>) = rows.into_iter().unzip();
    Dataset::new(features, labels, names, source)
}
