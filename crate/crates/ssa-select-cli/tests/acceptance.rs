//! Acceptance suite. Each test implements one gate criterion at its
//! stated tolerance and prints a single pass/fail line; run with
//! `cargo test --test acceptance -- --nocapture` to see the lines.

use std::path::Path;
use std::process::Command;
use std::sync::OnceLock;
use std::time::Instant;

use ssa_select::classify::{
    gnb_fit, knn_fit, mlp_fit, svm_fit, BinaryClassifier, MlpConfig, MlpModel, Standardizer,
    SvmConfig,
};
use ssa_select::data::{generate_synthetic, split, Dataset, SplitSpec, SynthSpec};
use ssa_select::metrics::{confusion, metric_set, ConfusionMatrix};
use ssa_select::select::{
    exhaustive_oracle, select_features, FitnessConfig, SelectionResult, ORACLE_MAX_DIM,
};
use ssa_select::ssa::{run as ssa_run, Bounds, SsaParams};

const SEEDS: std::ops::Range<u64> = 0..10;
const INFORMATIVE: [usize; 3] = [0, 1, 2];

struct FamilyRun {
    seed: u64,
    selection: SelectionResult,
    oracle: SelectionResult,
    knn_all_accuracy: f64,
    knn_selected_accuracy: f64,
    select_seconds: f64,
}

fn accuracy(truth: &[u8], predictions: &[u8]) -> f64 {
    metric_set(&confusion(truth, predictions).unwrap())
        .unwrap()
        .accuracy
}

/// The synthetic family shared by the oracle-equivalence, recovery,
/// convergence-shape and selection-benefit criteria: A=10 (3 informative
/// at separation 4, 7 noise), n=300, fraud fraction 0.2, 70/30 split.
fn family_runs() -> &'static [FamilyRun] {
    static RUNS: OnceLock<Vec<FamilyRun>> = OnceLock::new();
    RUNS.get_or_init(|| {
        SEEDS
            .map(|seed| {
                let data = generate_synthetic(&SynthSpec {
                    n_samples: 300,
                    n_informative: 3,
                    n_noise: 7,
                    class_separation: 4.0,
                    fraud_fraction: 0.2,
                    seed,
                })
                .unwrap();
                let (train, test) = split(
                    &data,
                    &SplitSpec {
                        test_fraction: 0.3,
                        stratified: true,
                        seed,
                    },
                )
                .unwrap();
                let ssa_params = SsaParams {
                    seed,
                    ..SsaParams::default()
                };
                let fitness_cfg = FitnessConfig {
                    seed,
                    ..FitnessConfig::default()
                };
                let started = Instant::now();
                let selection = select_features(&train, &ssa_params, &fitness_cfg).unwrap();
                let select_seconds = started.elapsed().as_secs_f64();
                let oracle = exhaustive_oracle(&train, &fitness_cfg, ORACLE_MAX_DIM).unwrap();

                let knn_all = knn_fit(&train, fitness_cfg.k_neighbors).unwrap();
                let knn_all_accuracy =
                    accuracy(test.labels(), &knn_all.predict(test.features()).unwrap());
                let sel_train = train.select_columns(&selection.selected_indices);
                let sel_test = test.select_columns(&selection.selected_indices);
                let knn_sel = knn_fit(&sel_train, fitness_cfg.k_neighbors).unwrap();
                let knn_selected_accuracy =
                    accuracy(sel_test.labels(), &knn_sel.predict(sel_test.features()).unwrap());

                FamilyRun {
                    seed,
                    selection,
                    oracle,
                    knn_all_accuracy,
                    knn_selected_accuracy,
                    select_seconds,
                }
            })
            .collect()
    })
}

fn report_line(name: &str, pass: bool, detail: &str) {
    println!(
        "acceptance {name}: {} ({detail})",
        if pass { "PASS" } else { "FAIL" }
    );
}

#[test]
fn oracle_equivalence() {
    let runs = family_runs();
    let mut within = 0;
    let mut slowest = 0.0f64;
    for r in runs {
        let rel = (r.selection.fitness - r.oracle.fitness) / r.oracle.fitness;
        if rel <= 0.02 {
            within += 1;
        }
        slowest = slowest.max(r.select_seconds);
    }
    let pass = within >= 8 && slowest < 60.0;
    report_line(
        "oracle-equivalence",
        pass,
        &format!("{within}/10 runs within 2% of the oracle optimum; slowest run {slowest:.1}s"),
    );
    assert!(pass);
}

#[test]
fn informative_feature_recovery() {
    let runs = family_runs();
    let mut recovered = 0;
    for r in runs {
        let has_all_informative = INFORMATIVE
            .iter()
            .all(|j| r.selection.selected_indices.contains(j));
        let noise_count = r
            .selection
            .selected_indices
            .iter()
            .filter(|&&j| j >= INFORMATIVE.len())
            .count();
        if has_all_informative && noise_count <= 2 {
            recovered += 1;
        }
    }
    let pass = recovered >= 8;
    report_line(
        "informative-recovery",
        pass,
        &format!("{recovered}/10 masks contain all 3 informative indices with <=2 noise"),
    );
    assert!(pass);
}

#[test]
fn convergence_shape() {
    let runs = family_runs();
    let mut violations = 0usize;
    for r in runs {
        for w in r.selection.convergence.windows(2) {
            if w[1] > w[0] {
                violations += 1;
            }
        }
    }
    // Also check a curve the binary actually emitted.
    let dir = tempfile::tempdir().unwrap();
    let csv = synth_csv(dir.path(), 17);
    let out = Command::new(env!("CARGO_BIN_EXE_ssa-select"))
        .args([
            "select",
            "--data",
            csv.to_str().unwrap(),
            "--out",
            dir.path().join("sel").to_str().unwrap(),
            "--seed",
            "17",
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = std::fs::read_to_string(dir.path().join("sel/convergence.csv")).unwrap();
    let values: Vec<f64> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    for w in values.windows(2) {
        if w[1] > w[0] {
            violations += 1;
        }
    }
    let pass = violations == 0;
    report_line(
        "convergence-shape",
        pass,
        &format!(
            "{violations} increases across {} curves (zero tolerance)",
            runs.len() + 1
        ),
    );
    assert!(pass);
}

#[test]
fn selection_benefit() {
    let runs = family_runs();
    let mut kept = 0;
    for r in runs {
        if r.knn_selected_accuracy >= r.knn_all_accuracy - 0.01 {
            kept += 1;
        }
    }
    let pass = kept >= 8;
    report_line(
        "selection-benefit",
        pass,
        &format!("{kept}/10 seeds where selected-feature KNN kept accuracy within 0.01 of all-feature KNN"),
    );
    assert!(pass);
}

#[test]
fn metrics_exactness() {
    let cm = ConfusionMatrix {
        tpc: 3,
        fpc: 1,
        fnc: 2,
        tnc: 4,
    };
    let m = metric_set(&cm).unwrap();
    let hand_ok = (m.accuracy - 0.7).abs() < 1e-12
        && (m.precision - 0.75).abs() < 1e-12
        && (m.recall - 0.6).abs() < 1e-12
        && (m.f1 - 2.0 / 3.0).abs() < 1e-12;

    let mut rng = ssa_select::seeds::derive_rng(2024, &[1]);
    use rand::Rng;
    let mut identity_ok = true;
    for _ in 0..1000 {
        let cm = ConfusionMatrix {
            tpc: rng.random_range(0..400),
            fpc: rng.random_range(0..400),
            fnc: rng.random_range(0..400),
            tnc: rng.random_range(1..400),
        };
        let m = metric_set(&cm).unwrap();
        let expected = 1.0 - (cm.fpc + cm.fnc) as f64 / cm.total() as f64;
        if m.accuracy != expected {
            identity_ok = false;
            break;
        }
    }
    let pass = hand_ok && identity_ok;
    report_line(
        "metrics-exactness",
        pass,
        &format!("hand vector to 1e-12: {hand_ok}; accuracy identity exact on 1000 random matrices: {identity_ok}"),
    );
    assert!(pass);
}

#[test]
fn classifier_sanity() {
    let mut worst: (f64, String) = (1.0, String::new());
    for seed in 0..5u64 {
        // Blobs with 6-sigma inter-center distance, 200 train / 200 test.
        let data = generate_synthetic(&SynthSpec {
            n_samples: 400,
            n_informative: 2,
            n_noise: 0,
            class_separation: 6.0,
            fraud_fraction: 0.5,
            seed,
        })
        .unwrap();
        let (train, test) = split(
            &data,
            &SplitSpec {
                test_fraction: 0.5,
                stratified: true,
                seed,
            },
        )
        .unwrap();
        let models: Vec<Box<dyn BinaryClassifier>> = vec![
            Box::new(knn_fit(&train, 5).unwrap()),
            Box::new(gnb_fit(&train).unwrap()),
            Box::new(
                mlp_fit(
                    &train,
                    &MlpConfig {
                        seed,
                        ..MlpConfig::default()
                    },
                )
                .unwrap(),
            ),
            Box::new(
                svm_fit(
                    &train,
                    &SvmConfig {
                        seed,
                        ..SvmConfig::default()
                    },
                )
                .unwrap(),
            ),
        ];
        for m in &models {
            let acc = accuracy(test.labels(), &m.predict(test.features()).unwrap());
            if acc < worst.0 {
                worst = (acc, format!("{} at seed {seed}", m.name()));
            }
        }
    }

    let grad_err = mlp_gradient_max_relative_error();
    let pass = worst.0 >= 0.95 && grad_err < 1e-4;
    report_line(
        "classifier-sanity",
        pass,
        &format!(
            "worst blob accuracy {:.4} ({}); MLP gradient max relative error {grad_err:.2e}",
            worst.0, worst.1
        ),
    );
    assert!(pass);
}

fn mlp_gradient_max_relative_error() -> f64 {
    let x = vec![vec![0.4, -0.9], vec![-1.3, 0.2], vec![0.7, 1.1]];
    let y = vec![1u8, 0, 1];
    let scaler = Standardizer {
        mean: vec![0.0, 0.0],
        std: vec![1.0, 1.0],
    };
    let model = MlpModel::init(2, 4, 31, scaler);
    let analytic = model.gradients(&x, &y);
    let eps = 1e-5;
    let mut max_rel = 0.0f64;
    let mut probe = |value: f64, apply: &dyn Fn(&mut MlpModel, f64)| {
        let mut plus = model.clone();
        apply(&mut plus, eps);
        let mut minus = model.clone();
        apply(&mut minus, -eps);
        let fd = (plus.loss(&x, &y) - minus.loss(&x, &y)) / (2.0 * eps);
        let rel = (value - fd).abs() / value.abs().max(fd.abs()).max(1e-8);
        max_rel = max_rel.max(rel);
    };
    for j in 0..4 {
        for k in 0..2 {
            probe(analytic.w1[j][k], &move |m, d| m.w1[j][k] += d);
        }
        probe(analytic.b1[j], &move |m, d| m.b1[j] += d);
        probe(analytic.w2[j], &move |m, d| m.w2[j] += d);
    }
    probe(analytic.b2, &|m, d| m.b2 += d);
    max_rel
}

#[test]
fn optimizer_sanity() {
    let sphere = |x: &[f64]| x.iter().map(|v| v * v).sum::<f64>();
    let bounds = Bounds::uniform(5, -5.0, 5.0).unwrap();
    let mut under = 0;
    for seed in SEEDS {
        let params = SsaParams {
            seed,
            ..SsaParams::default()
        };
        let out = ssa_run(sphere, &params, &bounds, 5).unwrap();
        if out.best_fitness < 0.1 {
            under += 1;
        }
    }
    let params = SsaParams {
        seed: 7,
        ..SsaParams::default()
    };
    let a = ssa_run(sphere, &params, &bounds, 5).unwrap();
    let b = ssa_run(sphere, &params, &bounds, 5).unwrap();
    let deterministic = a.convergence == b.convergence
        && a.convergence
            .iter()
            .zip(&b.convergence)
            .all(|(x, y)| x.to_bits() == y.to_bits());
    let pass = under >= 9 && deterministic;
    report_line(
        "optimizer-sanity",
        pass,
        &format!("sphere best < 0.1 on {under}/10 seeds; bit-identical repeat: {deterministic}"),
    );
    assert!(pass);
}

fn synth_csv(dir: &Path, seed: u64) -> std::path::PathBuf {
    let path = dir.join(format!("acc_{seed}.csv"));
    let out = Command::new(env!("CARGO_BIN_EXE_ssa-select"))
        .args([
            "synth",
            "--n",
            "300",
            "--informative",
            "3",
            "--noise",
            "7",
            "--separation",
            "4",
            "--fraud-fraction",
            "0.2",
            "--seed",
            &seed.to_string(),
            "--out",
            path.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    path
}

#[test]
fn report_fidelity() {
    let dir = tempfile::tempdir().unwrap();
    let csv = synth_csv(dir.path(), 42);
    let out1 = dir.path().join("run1");
    let output = Command::new(env!("CARGO_BIN_EXE_ssa-select"))
        .args([
            "compare",
            "--data",
            csv.to_str().unwrap(),
            "--out",
            out1.to_str().unwrap(),
            "--seed",
            "42",
            "--roster",
            "ssa_knn,knn,nn,nb",
        ])
        .output()
        .unwrap();
    assert!(
        output.status.success(),
        "{}",
        String::from_utf8_lossy(&output.stderr)
    );

    // Table layout: header + 4 rows, percent values with 2 decimals.
    let table = std::fs::read_to_string(out1.join("metrics_table.txt")).unwrap();
    let lines: Vec<&str> = table.lines().collect();
    let four_rows = lines.len() == 5;
    let header_ok = lines[0].contains("Accuracy")
        && lines[0].contains("Recall")
        && lines[0].contains("Precision");
    let row_names_ok = lines[1].starts_with("SSA_KNN")
        && lines[2].starts_with("KNN")
        && lines[3].starts_with("NN")
        && lines[4].starts_with("NB");
    let percent_ok = lines[1..]
        .iter()
        .all(|l| l.split_whitespace().skip(1).all(|v| v.contains('.') && v.split('.').nth(1).unwrap().len() == 2));

    // Re-run from the echoed config: every file must match byte-for-byte.
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out1.join("report.json")).unwrap()).unwrap();
    let echoed = dir.path().join("echoed.json");
    std::fs::write(
        &echoed,
        serde_json::to_string_pretty(&report["config"]).unwrap(),
    )
    .unwrap();
    let out2 = dir.path().join("run2");
    let output = Command::new(env!("CARGO_BIN_EXE_ssa-select"))
        .args([
            "compare",
            "--config",
            echoed.to_str().unwrap(),
            "--out",
            out2.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(
        output.status.success(),
        "{}",
        String::from_utf8_lossy(&output.stderr)
    );
    let mut bytes_identical = true;
    for name in [
        "report.json",
        "metrics_table.txt",
        "convergence.csv",
        "selected_features.txt",
    ] {
        let a = std::fs::read(out1.join(name)).unwrap();
        let b = std::fs::read(out2.join(name)).unwrap();
        if a != b {
            bytes_identical = false;
        }
    }

    let pass = four_rows && header_ok && row_names_ok && percent_ok && bytes_identical;
    report_line(
        "report-fidelity",
        pass,
        &format!("4-row table: {four_rows}; header: {header_ok}; rows: {row_names_ok}; 2-decimal percents: {percent_ok}; byte-identical re-run: {bytes_identical}"),
    );
    assert!(pass);
}
