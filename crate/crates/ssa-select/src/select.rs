//! Wrapper feature selection around the squirrel optimizer.
//!
//! Continuous squirrel positions in the unit box are thresholded into
//! boolean feature masks; each mask is scored with the composite fitness
//! `alpha * cv_error + (1 - alpha) * L / A`, where `cv_error` is the
//! pooled misclassification rate of k-NN under stratified k-fold
//! cross-validation on the masked columns and `L / A` is the selected
//! feature ratio. The same scoring backs both the optimizer-driven
//! selector and an exhaustive brute-force oracle used for acceptance
//! testing.

use std::collections::HashMap;
use std::sync::Mutex;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classify::{nearest_vote, Standardizer};
use crate::data::{kfold_assign, Dataset};
use crate::error::{Error, Result};
use crate::ssa::{self, Bounds, SsaParams};

/// Hard ceiling for the exhaustive oracle (2^20 fitness evaluations).
pub const ORACLE_MAX_DIM: usize = 20;

/// Boolean feature-selection vector.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureMask {
    selected: Vec<bool>,
}

impl FeatureMask {
    pub fn new(selected: Vec<bool>) -> FeatureMask {
        FeatureMask { selected }
    }

    pub fn selected(&self) -> &[bool] {
        &self.selected
    }

    /// Total attribute count A.
    pub fn len(&self) -> usize {
        self.selected.len()
    }

    pub fn is_empty(&self) -> bool {
        self.selected.is_empty()
    }

    /// Number of selected attributes L.
    pub fn selected_count(&self) -> usize {
        self.selected.iter().filter(|&&b| b).count()
    }

    pub fn selected_indices(&self) -> Vec<usize> {
        self.selected
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(j, _)| j)
            .collect()
    }

    /// Selected feature ratio L / A.
    pub fn ratio(&self) -> f64 {
        self.selected_count() as f64 / self.len() as f64
    }
}

/// Parameters of the wrapper fitness.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FitnessConfig {
    /// Weight on the cross-validated classification error.
    pub alpha: f64,
    /// Neighbors for the wrapper k-NN; odd to avoid vote ties.
    pub k_neighbors: usize,
    pub cv_folds: usize,
    /// Binarization threshold tau; a feature is selected when its
    /// position component strictly exceeds it.
    pub threshold: f64,
    /// Fitness assigned to the empty mask; must exceed 1 so it is worse
    /// than any real mask.
    pub empty_mask_fitness: f64,
    pub seed: u64,
}

impl Default for FitnessConfig {
    fn default() -> Self {
        FitnessConfig {
            alpha: 0.9,
            k_neighbors: 5,
            cv_folds: 5,
            threshold: 0.5,
            empty_mask_fitness: 2.0,
            seed: 0,
        }
    }
}

impl FitnessConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(Error::config(format!(
                "alpha must lie in [0, 1], got {}",
                self.alpha
            )));
        }
        if self.k_neighbors == 0 || self.k_neighbors % 2 == 0 {
            return Err(Error::config(format!(
                "k_neighbors must be a positive odd integer, got {}",
                self.k_neighbors
            )));
        }
        if self.cv_folds < 2 {
            return Err(Error::config(format!(
                "cv_folds must be at least 2, got {}",
                self.cv_folds
            )));
        }
        if !(self.threshold > 0.0 && self.threshold < 1.0) {
            return Err(Error::config(format!(
                "threshold must lie in (0, 1), got {}",
                self.threshold
            )));
        }
        if self.empty_mask_fitness <= 1.0 {
            return Err(Error::config(format!(
                "empty_mask_fitness must exceed 1, got {}",
                self.empty_mask_fitness
            )));
        }
        Ok(())
    }
}

/// Outcome of a selection run (or of the oracle, whose convergence curve
/// is empty).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionResult {
    pub mask: FeatureMask,
    pub fitness: f64,
    pub convergence: Vec<f64>,
    pub cv_error: f64,
    pub selected_indices: Vec<usize>,
}

/// Thresholds a position in the unit box into a feature mask
/// (`selected[j] = position[j] > threshold`, strict).
pub fn binarize(position: &[f64], threshold: f64) -> Result<FeatureMask> {
    for (j, &v) in position.iter().enumerate() {
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::contract(format!(
                "position component {j} = {v} lies outside [0, 1]"
            )));
        }
    }
    Ok(binarize_unchecked(position, threshold))
}

fn binarize_unchecked(position: &[f64], threshold: f64) -> FeatureMask {
    FeatureMask::new(position.iter().map(|&v| v > threshold).collect())
}

/// Precomputed cross-validation context: fold assignment, labels, and the
/// feature matrix. Mask evaluation is total once construction succeeds.
struct CvScorer<'a> {
    data: &'a Dataset,
    cfg: &'a FitnessConfig,
    folds: Vec<usize>,
}

impl<'a> CvScorer<'a> {
    fn new(data: &'a Dataset, cfg: &'a FitnessConfig) -> Result<CvScorer<'a>> {
        cfg.validate()?;
        let (n0, n1) = data.class_counts();
        if n0 == 0 || n1 == 0 {
            return Err(Error::data(format!(
                "both classes must be present (have {n0} normal, {n1} fraud)"
            )));
        }
        if n0.min(n1) < cfg.cv_folds {
            return Err(Error::config(format!(
                "cv_folds={} exceeds the minority class count {}",
                cfg.cv_folds,
                n0.min(n1)
            )));
        }
        let folds = kfold_assign(data, cfg.cv_folds, cfg.seed)?;
        let mut fold_sizes = vec![0usize; cfg.cv_folds];
        for &f in &folds {
            fold_sizes[f] += 1;
        }
        let min_train = data.n_samples() - fold_sizes.iter().max().unwrap();
        if cfg.k_neighbors > min_train {
            return Err(Error::config(format!(
                "k_neighbors={} exceeds the smallest CV training split ({min_train} samples)",
                cfg.k_neighbors
            )));
        }
        Ok(CvScorer { data, cfg, folds })
    }

    /// Pooled misclassification rate `(FP + FN) / (P + N)` of k-NN over
    /// the masked columns. The mask must be non-empty.
    fn error_rate(&self, mask: &FeatureMask) -> f64 {
        let columns = mask.selected_indices();
        let masked: Vec<Vec<f64>> = self
            .data
            .features()
            .iter()
            .map(|row| columns.iter().map(|&j| row[j]).collect())
            .collect();
        let labels = self.data.labels();
        let mut wrong = 0usize;
        for fold in 0..self.cfg.cv_folds {
            let train_idx: Vec<usize> = (0..masked.len()).filter(|&i| self.folds[i] != fold).collect();
            let train_rows: Vec<Vec<f64>> = train_idx.iter().map(|&i| masked[i].clone()).collect();
            let train_labels: Vec<u8> = train_idx.iter().map(|&i| labels[i]).collect();
            let scaler = Standardizer::fit_rows(&train_rows);
            let z_train: Vec<Vec<f64>> = train_rows
                .iter()
                .map(|r| scaler.apply_row(r).expect("columns match by construction"))
                .collect();
            for i in (0..masked.len()).filter(|&i| self.folds[i] == fold) {
                let z = scaler.apply_row(&masked[i]).expect("columns match by construction");
                let predicted = nearest_vote(&z_train, &train_labels, self.cfg.k_neighbors, &z);
                if predicted != labels[i] {
                    wrong += 1;
                }
            }
        }
        wrong as f64 / masked.len() as f64
    }

    fn fitness(&self, mask: &FeatureMask) -> f64 {
        if mask.selected_count() == 0 {
            return self.cfg.empty_mask_fitness;
        }
        self.cfg.alpha * self.error_rate(mask) + (1.0 - self.cfg.alpha) * mask.ratio()
    }
}

/// Composite fitness of one mask: `alpha * cv_error + (1 - alpha) * L/A`,
/// or `empty_mask_fitness` when nothing is selected.
pub fn fitness(mask: &FeatureMask, data: &Dataset, cfg: &FitnessConfig) -> Result<f64> {
    if mask.len() != data.n_features() {
        return Err(Error::contract(format!(
            "mask covers {} attributes, dataset has {}",
            mask.len(),
            data.n_features()
        )));
    }
    Ok(CvScorer::new(data, cfg)?.fitness(mask))
}

/// Cross-validated k-NN error of one non-empty mask under the same fold
/// assignment the fitness uses.
pub fn cv_error(mask: &FeatureMask, data: &Dataset, cfg: &FitnessConfig) -> Result<f64> {
    if mask.len() != data.n_features() {
        return Err(Error::contract(format!(
            "mask covers {} attributes, dataset has {}",
            mask.len(),
            data.n_features()
        )));
    }
    if mask.selected_count() == 0 {
        return Err(Error::contract("cv_error is undefined for the empty mask"));
    }
    Ok(CvScorer::new(data, cfg)?.error_rate(mask))
}

/// Runs the squirrel optimizer over the unit box and returns the best
/// mask found, its decomposed scores, and the convergence curve.
pub fn select_features(
    data: &Dataset,
    ssa_params: &SsaParams,
    cfg: &FitnessConfig,
) -> Result<SelectionResult> {
    let a = data.n_features();
    let scorer = CvScorer::new(data, cfg)?;
    // Masks repeat heavily once the population contracts; memoize them.
    let cache: Mutex<HashMap<Vec<bool>, f64>> = Mutex::new(HashMap::new());
    let objective = |position: &[f64]| -> f64 {
        let mask = binarize_unchecked(position, cfg.threshold);
        if let Some(&f) = cache.lock().unwrap().get(mask.selected()) {
            return f;
        }
        let f = scorer.fitness(&mask);
        cache.lock().unwrap().insert(mask.selected().to_vec(), f);
        f
    };
    let bounds = Bounds::uniform(a, 0.0, 1.0)?;
    let outcome = ssa::run(objective, ssa_params, &bounds, a)?;
    let mask = binarize(&outcome.best_position, cfg.threshold)?;
    let cv_error = if mask.selected_count() == 0 {
        1.0
    } else {
        scorer.error_rate(&mask)
    };
    let selected_indices = mask.selected_indices();
    Ok(SelectionResult {
        mask,
        fitness: outcome.best_fitness,
        convergence: outcome.convergence,
        cv_error,
        selected_indices,
    })
}

fn mask_from_bits(bits: u64, len: usize) -> FeatureMask {
    FeatureMask::new((0..len).map(|j| bits >> j & 1 == 1).collect())
}

/// Lower-is-better total order: fitness, then mask size, then the
/// lexicographically smallest index set.
fn better(a: &(f64, FeatureMask), b: &(f64, FeatureMask)) -> bool {
    if a.0 != b.0 {
        return a.0 < b.0;
    }
    let (la, lb) = (a.1.selected_count(), b.1.selected_count());
    if la != lb {
        return la < lb;
    }
    a.1.selected_indices() < b.1.selected_indices()
}

/// Evaluates every mask over at most `max_dim` attributes and returns the
/// global fitness minimum. Deterministic: ties break toward fewer
/// features, then the lexicographically smallest index set.
pub fn exhaustive_oracle(
    data: &Dataset,
    cfg: &FitnessConfig,
    max_dim: usize,
) -> Result<SelectionResult> {
    let a = data.n_features();
    if a > max_dim {
        return Err(Error::config(format!(
            "exhaustive oracle refuses {a} attributes: the limit is {max_dim} features"
        )));
    }
    let scorer = CvScorer::new(data, cfg)?;
    let (_, best) = (0u64..1u64 << a)
        .into_par_iter()
        .map(|bits| {
            let mask = mask_from_bits(bits, a);
            let f = scorer.fitness(&mask);
            (bits, (f, mask))
        })
        .reduce_with(|x, y| if better(&y.1, &x.1) { y } else { x })
        .expect("at least the empty mask is enumerated");
    let (best_fitness, mask) = best;
    let cv_error = if mask.selected_count() == 0 {
        1.0
    } else {
        scorer.error_rate(&mask)
    };
    let selected_indices = mask.selected_indices();
    Ok(SelectionResult {
        mask,
        fitness: best_fitness,
        convergence: Vec::new(),
        cv_error,
        selected_indices,
    })
}
