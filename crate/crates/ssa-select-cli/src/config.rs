//! Run configuration: a single JSON document covering the dataset, the
//! optimizer, the fitness, the split, and the classifier roster.
//!
//! Reports echo the fully resolved configuration, so a run can always be
//! reproduced from its own report. All nested seeds are derived from the
//! top-level `seed`, which keeps one knob in charge of reproducibility;
//! explicitly set nested seeds are overwritten during resolution.

use std::fmt;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use ssa_select::data::{SplitSpec, SynthSpec};
use ssa_select::error::{Error, Result};
use ssa_select::seeds;
use ssa_select::select::FitnessConfig;
use ssa_select::ssa::SsaParams;

mod seed_tag {
    pub const SSA: u64 = 0x10;
    pub const FITNESS: u64 = 0x11;
    pub const SPLIT: u64 = 0x12;
    pub const SYNTH: u64 = 0x13;
    pub const MLP: u64 = 0x14;
    pub const SVM: u64 = 0x15;
}

/// Roster entries. `SsaKnn` is k-NN restricted to the selected features;
/// the others train on all features unless `apply_mask_to_all` is set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassifierKind {
    SsaKnn,
    Knn,
    Nn,
    Nb,
    Svm,
}

impl ClassifierKind {
    pub fn parse(token: &str) -> Result<ClassifierKind> {
        match token.trim() {
            "ssa_knn" => Ok(ClassifierKind::SsaKnn),
            "knn" => Ok(ClassifierKind::Knn),
            "nn" => Ok(ClassifierKind::Nn),
            "nb" => Ok(ClassifierKind::Nb),
            "svm" => Ok(ClassifierKind::Svm),
            other => Err(Error::config(format!(
                "unknown classifier '{other}' (expected ssa_knn, knn, nn, nb or svm)"
            ))),
        }
    }

    /// Row name in the metrics table.
    pub fn display_name(&self) -> &'static str {
        match self {
            ClassifierKind::SsaKnn => "SSA_KNN",
            ClassifierKind::Knn => "KNN",
            ClassifierKind::Nn => "NN",
            ClassifierKind::Nb => "NB",
            ClassifierKind::Svm => "SVM",
        }
    }
}

impl fmt::Display for ClassifierKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.display_name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// CSV dataset path; mutually exclusive with `synth`.
    pub data: Option<PathBuf>,
    pub label_col: String,
    /// Synthetic dataset spec; mutually exclusive with `data`.
    pub synth: Option<SynthSpec>,
    /// Master seed. Every nested seed is derived from it.
    pub seed: u64,
    pub ssa: SsaParams,
    pub fitness: FitnessConfig,
    pub split: SplitSpec,
    pub roster: Vec<ClassifierKind>,
    pub apply_mask_to_all: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            data: None,
            label_col: "label".into(),
            synth: None,
            seed: 42,
            ssa: SsaParams::default(),
            fitness: FitnessConfig::default(),
            split: SplitSpec::default(),
            roster: vec![
                ClassifierKind::SsaKnn,
                ClassifierKind::Knn,
                ClassifierKind::Nn,
                ClassifierKind::Nb,
            ],
            apply_mask_to_all: false,
        }
    }
}

impl RunConfig {
    /// Rederives every nested seed from the master seed.
    pub fn derive_seeds(&mut self) {
        self.ssa.seed = seeds::derive_seed(self.seed, &[seed_tag::SSA]);
        self.fitness.seed = seeds::derive_seed(self.seed, &[seed_tag::FITNESS]);
        self.split.seed = seeds::derive_seed(self.seed, &[seed_tag::SPLIT]);
        if let Some(synth) = &mut self.synth {
            synth.seed = seeds::derive_seed(self.seed, &[seed_tag::SYNTH]);
        }
    }

    pub fn mlp_seed(&self) -> u64 {
        seeds::derive_seed(self.seed, &[seed_tag::MLP])
    }

    pub fn svm_seed(&self) -> u64 {
        seeds::derive_seed(self.seed, &[seed_tag::SVM])
    }

    pub fn validate(&self) -> Result<()> {
        if self.roster.is_empty() {
            return Err(Error::config("classifier roster must not be empty"));
        }
        self.ssa.validate()?;
        self.fitness.validate()?;
        self.split.validate()?;
        if let Some(synth) = &self.synth {
            synth.validate()?;
        }
        Ok(())
    }
}

/// Loads a config file (JSON mirroring [`RunConfig`]).
pub fn load_config(path: &PathBuf) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::config(format!("cannot read config '{}': {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| Error::config(format!("invalid config '{}': {e}", path.display())))
}

/// Applies one `path.to.field=value` override onto the JSON form of the
/// config. The value is parsed as JSON when possible and falls back to a
/// string, so `--set fitness.alpha=0.8` and `--set label_col=class` both
/// work.
pub fn apply_dotted_override(config: &mut RunConfig, assignment: &str) -> Result<()> {
    let (path, raw_value) = assignment.split_once('=').ok_or_else(|| {
        Error::config(format!("override '{assignment}' is not of the form key.path=value"))
    })?;
    let value: serde_json::Value = serde_json::from_str(raw_value)
        .unwrap_or_else(|_| serde_json::Value::String(raw_value.to_string()));
    let mut tree = serde_json::to_value(&*config).expect("config serializes");
    let mut node = &mut tree;
    let segments: Vec<&str> = path.split('.').collect();
    for (i, segment) in segments.iter().enumerate() {
        let map = node.as_object_mut().ok_or_else(|| {
            Error::config(format!("'{}' is not an object in override '{assignment}'",
                segments[..i].join(".")))
        })?;
        if !map.contains_key(*segment) {
            return Err(Error::config(format!(
                "unknown config field '{}' in override '{assignment}'",
                segments[..=i].join(".")
            )));
        }
        if i + 1 == segments.len() {
            map.insert((*segment).to_string(), value);
            break;
        }
        node = map.get_mut(*segment).unwrap();
    }
    *config = serde_json::from_value(tree)
        .map_err(|e| Error::config(format!("override '{assignment}' produced an invalid config: {e}")))?;
    Ok(())
}
