//! Subcommand implementations. Each command computes everything first and
//! only then writes its files, so a failing run leaves no partial output.

use std::path::{Path, PathBuf};
use std::time::Instant;

use ssa_select::classify::{
    gnb_fit, knn_fit, mlp_fit, svm_fit, BinaryClassifier, MlpConfig, SvmConfig,
};
use ssa_select::data::{self, Dataset, SynthSpec};
use ssa_select::error::{Error, Result};
use ssa_select::metrics::{confusion, metric_set};
use ssa_select::select::{exhaustive_oracle, select_features, SelectionResult};

use crate::config::{ClassifierKind, RunConfig};
use crate::report::{
    self, ClassifierSection, ModelRecord, OracleSection, RunReport, SelectionSection,
};

/// Loads the dataset named by the config: CSV path or synthetic spec.
pub fn load_data(cfg: &RunConfig) -> Result<Dataset> {
    match (&cfg.data, &cfg.synth) {
        (Some(path), None) => data::load_csv(path, &cfg.label_col),
        (None, Some(spec)) => data::generate_synthetic(spec),
        (Some(_), Some(_)) => Err(Error::config(
            "config sets both 'data' and 'synth'; choose one",
        )),
        (None, None) => Err(Error::config(
            "config must set either 'data' (CSV path) or 'synth' (generator spec)",
        )),
    }
}

fn ensure_out_dir(out: &Path) -> Result<()> {
    std::fs::create_dir_all(out)?;
    Ok(())
}

fn selection_files(out: &Path, report: &RunReport, selection: &SelectionSection) -> Result<()> {
    report::write_file(out, "report.json", &report::render_report(report))?;
    report::write_file(
        out,
        "convergence.csv",
        &report::render_convergence_csv(&selection.convergence),
    )?;
    report::write_file(
        out,
        "selected_features.txt",
        &report::render_selected_features(&selection.selected_indices),
    )?;
    Ok(())
}

/// `select`: run SSA feature selection on the training split and emit
/// report.json, convergence.csv and selected_features.txt.
pub fn cmd_select(cfg: &RunConfig, out: &Path) -> Result<()> {
    let dataset = load_data(cfg)?;
    let (train, _test) = data::split(&dataset, &cfg.split)?;
    let started = Instant::now();
    let result = select_features(&train, &cfg.ssa, &cfg.fitness)?;
    eprintln!(
        "selection: {} iterations in {:.2}s",
        cfg.ssa.max_iterations,
        started.elapsed().as_secs_f64()
    );
    let selection = SelectionSection::from_result(&result, train.feature_names());
    let report = RunReport {
        command: "select".into(),
        config: cfg.clone(),
        seed: cfg.seed,
        selection: Some(selection.clone()),
        oracle: None,
        classifiers: Vec::new(),
        test_labels: None,
    };
    ensure_out_dir(out)?;
    selection_files(out, &report, &selection)?;
    println!(
        "selected {} of {} features {:?} (fitness {:.6}, cv error {:.6})",
        selection.selected_indices.len(),
        train.n_features(),
        selection.selected_indices,
        selection.fitness,
        selection.cv_error
    );
    Ok(())
}

fn train_and_score(
    kind: ClassifierKind,
    name: String,
    scope: &str,
    train: &Dataset,
    test: &Dataset,
    cfg: &RunConfig,
) -> Result<ClassifierSection> {
    let (predictions, model) = match kind {
        ClassifierKind::SsaKnn | ClassifierKind::Knn => {
            let m = knn_fit(train, cfg.fitness.k_neighbors)?;
            let (source, rows) = m.training_reference();
            let record = ModelRecord::Knn {
                k: m.k,
                source: source.to_string(),
                train_rows: rows.to_vec(),
            };
            (m.predict(test.features())?, record)
        }
        ClassifierKind::Nn => {
            let m = mlp_fit(
                train,
                &MlpConfig {
                    seed: cfg.mlp_seed(),
                    ..MlpConfig::default()
                },
            )?;
            (m.predict(test.features())?, ModelRecord::Mlp { model: m })
        }
        ClassifierKind::Nb => {
            let m = gnb_fit(train)?;
            (m.predict(test.features())?, ModelRecord::Gnb { model: m })
        }
        ClassifierKind::Svm => {
            let m = svm_fit(
                train,
                &SvmConfig {
                    seed: cfg.svm_seed(),
                    ..SvmConfig::default()
                },
            )?;
            (m.predict(test.features())?, ModelRecord::Svm { model: m })
        }
    };
    let metrics = metric_set(&confusion(test.labels(), &predictions)?)?;
    Ok(ClassifierSection {
        name,
        feature_scope: scope.into(),
        metrics,
        predictions,
        model,
    })
}

/// `compare`: train the roster on the training split, score the held-out
/// test split, and emit the Table-2-style metrics table plus report.json.
pub fn cmd_compare(cfg: &RunConfig, out: &Path) -> Result<()> {
    let dataset = load_data(cfg)?;
    let (train, test) = data::split(&dataset, &cfg.split)?;

    let needs_selection =
        cfg.roster.contains(&ClassifierKind::SsaKnn) || cfg.apply_mask_to_all;
    let selection: Option<SelectionResult> = if needs_selection {
        let started = Instant::now();
        let result = select_features(&train, &cfg.ssa, &cfg.fitness)?;
        eprintln!("selection: {:.2}s", started.elapsed().as_secs_f64());
        if result.selected_indices.is_empty() {
            return Err(Error::Numeric(
                "feature selection produced an empty mask".into(),
            ));
        }
        Some(result)
    } else {
        None
    };
    let masked = selection.as_ref().map(|sel| {
        (
            train.select_columns(&sel.selected_indices),
            test.select_columns(&sel.selected_indices),
        )
    });

    let started = Instant::now();
    let mut rows = Vec::new();
    for &kind in &cfg.roster {
        let row = if kind == ClassifierKind::SsaKnn {
            let (sel_train, sel_test) = masked.as_ref().expect("selection ran for ssa_knn");
            train_and_score(kind, kind.display_name().into(), "selected", sel_train, sel_test, cfg)?
        } else {
            train_and_score(kind, kind.display_name().into(), "all", &train, &test, cfg)?
        };
        rows.push(row);
    }
    if cfg.apply_mask_to_all {
        let (sel_train, sel_test) = masked.as_ref().expect("selection ran for mask application");
        for &kind in cfg.roster.iter().filter(|&&k| k != ClassifierKind::SsaKnn) {
            rows.push(train_and_score(
                kind,
                format!("{}_FS", kind.display_name()),
                "selected",
                sel_train,
                sel_test,
                cfg,
            )?);
        }
    }
    eprintln!("training + scoring: {:.2}s", started.elapsed().as_secs_f64());

    let report = RunReport {
        command: "compare".into(),
        config: cfg.clone(),
        seed: cfg.seed,
        selection: selection
            .as_ref()
            .map(|s| SelectionSection::from_result(s, train.feature_names())),
        oracle: None,
        classifiers: rows,
        test_labels: Some(test.labels().to_vec()),
    };
    let table = report::render_metrics_table(&report.classifiers);

    ensure_out_dir(out)?;
    report::write_file(out, "report.json", &report::render_report(&report))?;
    report::write_file(out, "metrics_table.txt", &table)?;
    if let Some(selection) = &report.selection {
        report::write_file(
            out,
            "convergence.csv",
            &report::render_convergence_csv(&selection.convergence),
        )?;
        report::write_file(
            out,
            "selected_features.txt",
            &report::render_selected_features(&selection.selected_indices),
        )?;
    }
    print!("{table}");
    Ok(())
}

/// `oracle`: exhaustive-subset search on the training split, optionally
/// reporting the gap to a prior selection report.
pub fn cmd_oracle(
    cfg: &RunConfig,
    out: &Path,
    compare_to: Option<&PathBuf>,
    max_dim: usize,
) -> Result<()> {
    let dataset = load_data(cfg)?;
    let (train, _test) = data::split(&dataset, &cfg.split)?;
    let started = Instant::now();
    let result = exhaustive_oracle(&train, &cfg.fitness, max_dim)?;
    eprintln!(
        "oracle: {} masks in {:.2}s",
        1u64 << train.n_features(),
        started.elapsed().as_secs_f64()
    );
    let gap_to_selection = match compare_to {
        Some(path) => {
            let prior = report::read_report(path)?;
            let selection = prior.selection.ok_or_else(|| {
                Error::data(format!(
                    "report '{}' contains no selection section",
                    path.display()
                ))
            })?;
            Some(selection.fitness - result.fitness)
        }
        None => None,
    };
    let oracle = OracleSection {
        selected_indices: result.selected_indices.clone(),
        selected_names: result
            .selected_indices
            .iter()
            .map(|&j| train.feature_names()[j].clone())
            .collect(),
        fitness: result.fitness,
        cv_error: result.cv_error,
        gap_to_selection,
    };
    let report = RunReport {
        command: "oracle".into(),
        config: cfg.clone(),
        seed: cfg.seed,
        selection: None,
        oracle: Some(oracle.clone()),
        classifiers: Vec::new(),
        test_labels: None,
    };
    ensure_out_dir(out)?;
    report::write_file(out, "report.json", &report::render_report(&report))?;
    report::write_file(
        out,
        "selected_features.txt",
        &report::render_selected_features(&oracle.selected_indices),
    )?;
    println!(
        "oracle optimum {:?} (fitness {:.6}, cv error {:.6}{})",
        oracle.selected_indices,
        oracle.fitness,
        oracle.cv_error,
        match oracle.gap_to_selection {
            Some(gap) => format!(", selection gap {gap:.6}"),
            None => String::new(),
        }
    );
    Ok(())
}

/// `synth`: generate a synthetic dataset CSV and print the class counts.
pub fn cmd_synth(spec: &SynthSpec, out_path: &Path) -> Result<()> {
    let dataset = data::generate_synthetic(spec)?;
    if let Some(parent) = out_path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    data::save_csv(&dataset, out_path, "label")?;
    let (normals, frauds) = dataset.class_counts();
    println!(
        "wrote {} rows ({normals} normal, {frauds} fraud) with {} features to {}",
        dataset.n_samples(),
        dataset.n_features(),
        out_path.display()
    );
    Ok(())
}
