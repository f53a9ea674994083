use std::fs;
use std::process::Command;

use sparsepca::simgen::gen_montecarlo;
use sparsepca::{Matrix, Method, ScoreMode, SparsityKnob};
use sparsepca_harness::{
    emit_boxplot_data, load_matrix_csv, run_experiment, save_matrix_csv, write_artifacts, ExperimentConfig,
    ExperimentKind, HarnessError, Statistic,
};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_sparsepca"))
}

#[test]
fn csv_round_trip_is_bit_identical() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("x.csv");
    let mut x = gen_montecarlo(4).x.columns(0, 17).into_owned();
    x[(0, 0)] = 1.0 / 3.0;
    x[(1, 1)] = -5e-300;
    x[(2, 2)] = 1e300;
    save_matrix_csv(&x, &path).unwrap();
    let y = load_matrix_csv(&path).unwrap();
    assert_eq!(x.shape(), y.shape());
    for (a, b) in x.iter().zip(y.iter()) {
        assert_eq!(a.to_bits(), b.to_bits());
    }
}

#[test]
fn header_only_file_is_a_parse_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("empty.csv");
    fs::write(&path, "v1,v2,v3\n").unwrap();
    assert!(matches!(load_matrix_csv(&path), Err(HarnessError::Parse { .. })));
    fs::write(&path, "v1,v2\n1,2\n3\n").unwrap();
    match load_matrix_csv(&path) {
        Err(HarnessError::Parse { row, .. }) => assert_eq!(row, 3),
        other => panic!("expected parse error, got {other:?}"),
    }
}

#[test]
fn simulate_exports_the_orthogonal_spectra() {
    let dir = tempfile::tempdir().unwrap();
    let x_path = dir.path().join("x.csv");
    let p_path = dir.path().join("p.csv");
    let status = bin()
        .args(["simulate", "orthogonal", "--out"])
        .arg(&x_path)
        .arg("--loadings-out")
        .arg(&p_path)
        .status()
        .unwrap();
    assert!(status.success());
    let x = load_matrix_csv(&x_path).unwrap();
    assert_eq!(x.shape(), (5, 20));
    assert_eq!(load_matrix_csv(&p_path).unwrap().shape(), (20, 2));
}

#[test]
fn fit_then_stats_from_the_command_line() {
    let dir = tempfile::tempdir().unwrap();
    let x_path = dir.path().join("x.csv");
    let p_path = dir.path().join("p.csv");
    assert!(bin()
        .args(["simulate", "nonorthogonal", "-o"])
        .arg(&x_path)
        .status()
        .unwrap()
        .success());
    let fit = bin()
        .arg("fit")
        .arg(&x_path)
        .args(["--method", "PMD-PD", "-a", "3", "--target-nnz", "30", "--loadings-out"])
        .arg(&p_path)
        .output()
        .unwrap();
    assert!(fit.status.success(), "{}", String::from_utf8_lossy(&fit.stderr));
    let summary: serde_json::Value = serde_json::from_slice(&fit.stdout).unwrap();
    assert_eq!(summary["method"], "PMD-PD");
    let stats = bin()
        .arg("stats")
        .arg(&x_path)
        .arg("--loadings")
        .arg(&p_path)
        .output()
        .unwrap();
    assert!(stats.status.success(), "{}", String::from_utf8_lossy(&stats.stderr));
    let report: serde_json::Value = serde_json::from_slice(&stats.stdout).unwrap();
    let pt = report["tot_pt"].as_f64().unwrap();
    assert!((pt - 1.0).abs() < 1e-6, "{report}");
}

#[test]
fn cli_rejects_missing_files() {
    let out = bin()
        .args(["fit", "/nonexistent/x.csv", "--method", "PCA"])
        .output()
        .unwrap();
    assert!(!out.status.success());
    assert!(!out.stderr.is_empty());
}

#[test]
fn nonorthogonal_experiment_closes_corrected_accounting() {
    let mut cfg = ExperimentConfig::new(ExperimentKind::Nonorthogonal);
    cfg.methods = Method::SPARSE.to_vec();
    let out = run_experiment(&cfg).unwrap();
    assert_eq!(out.failures().count(), 0);
    assert_eq!(out.records.len(), 16);
    for r in out.records.iter().filter(|r| r.score_mode == ScoreMode::Corrected) {
        let s = r.stats.unwrap();
        assert!((s.tot_pt - 1.0).abs() <= 1e-6, "{}: {}", r.method, s.tot_pt);
    }
}

#[test]
fn orthogonal_experiment_fits_exactly() {
    let cfg = ExperimentConfig::new(ExperimentKind::Orthogonal);
    let out = run_experiment(&cfg).unwrap();
    assert_eq!(out.failures().count(), 0);
    for r in &out.records {
        assert!(r.stats.unwrap().rss <= 1e-12, "{} {}", r.method, r.score_mode);
        if r.method != Method::Pca {
            assert_eq!(r.nnz, Some(20), "{}", r.method);
        }
    }
}

#[test]
fn config_overrides_reach_the_fit() {
    let text = r#"
experiment = "nonorthogonal"
methods = ["SPCA", "PMD-O"]
score_modes = ["naive"]

[metaparameters]
SPCA = { kind = "cardinality", value = 10 }
PMD-O = { kind = "c2", value = 2.0 }
"#;
    let cfg = ExperimentConfig::from_toml(text).unwrap();
    let out = run_experiment(&cfg).unwrap();
    assert_eq!(out.records.len(), 2);
    assert_eq!(out.records[0].knob, Some(SparsityKnob::Cardinality(10)));
    assert_eq!(out.records[0].nnz, Some(30));
    assert_eq!(out.records[1].knob, Some(SparsityKnob::C2(2.0)));
}

fn montecarlo_artifacts(dir: &std::path::Path) -> Vec<(String, Vec<u8>)> {
    let mut cfg = ExperimentConfig::new(ExperimentKind::Montecarlo);
    cfg.repetitions = Some(2);
    cfg.seed = 40;
    cfg.methods = vec![Method::Pca, Method::Spca, Method::PmdO, Method::GpcaM];
    cfg.output_dir = dir.to_path_buf();
    let out = run_experiment(&cfg).unwrap();
    let mut files: Vec<_> = write_artifacts(&cfg, &out)
        .unwrap()
        .into_iter()
        .map(|p| {
            (
                p.file_name().unwrap().to_string_lossy().into_owned(),
                fs::read(&p).unwrap(),
            )
        })
        .collect();
    files.sort();
    files
}

#[test]
fn montecarlo_artifacts_are_reproducible() {
    // same directory both times: report.json records the output path
    let dir = tempfile::tempdir().unwrap();
    let first = montecarlo_artifacts(dir.path());
    fs::remove_dir_all(dir.path()).unwrap();
    let second = montecarlo_artifacts(dir.path());
    assert_eq!(first.len(), 7);
    assert_eq!(first, second);
}

#[test]
fn boxplot_rows_cover_every_successful_record() {
    let mut cfg = ExperimentConfig::new(ExperimentKind::Nonorthogonal);
    cfg.methods = vec![Method::Pca, Method::GpcaO];
    let out = run_experiment(&cfg).unwrap();
    for st in Statistic::ALL {
        let mut buf = Vec::new();
        let n = emit_boxplot_data(&out.records, st, &mut buf).unwrap();
        assert_eq!(n, out.records.len());
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("seed,method,score_mode,statistic,value"));
        for line in lines {
            let cells: Vec<&str> = line.split(',').collect();
            assert_eq!(cells.len(), 5);
            assert_eq!(cells[3], st.name());
            assert!(cells[4].parse::<f64>().unwrap().is_finite());
        }
    }
}

#[test]
fn file_experiments_need_data() {
    let cfg = ExperimentConfig::new(ExperimentKind::File);
    assert!(run_experiment(&cfg).is_err());
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("x.csv");
    save_matrix_csv(&Matrix::from_fn(6, 4, |i, j| (i * 4 + j) as f64 % 5.0), &path).unwrap();
    let mut cfg = ExperimentConfig::new(ExperimentKind::File);
    cfg.data = Some(path);
    cfg.components = Some(2);
    cfg.methods = vec![Method::Pca];
    let out = run_experiment(&cfg).unwrap();
    assert_eq!(out.records.len(), 2);
    assert!(out.truth.is_empty());
}
