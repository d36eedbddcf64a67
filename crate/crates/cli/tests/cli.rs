use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_subjex"));
    cmd.env_remove("SUBJEX_DATA_ROOT").env("RUST_LOG", "warn");
    cmd
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn small_data(tmp: &Path) -> PathBuf {
    let root = tmp.join("data");
    let o = run(&["synth", "--small", "--into", root.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    root
}

const SMALL_COUNTS: [&str; 4] = ["--reviews-per-class", "60", "--sentences-per-class", "400"];

#[test]
fn verify_data_exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let root = small_data(tmp.path());
    let out = tmp.path().join("out");
    let mut args = vec![
        "--data-root",
        root.to_str().unwrap(),
        "-o",
        out.to_str().unwrap(),
        "verify-data",
    ];
    args.extend(SMALL_COUNTS);
    let o = run(&args);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("positive reviews       60"));
    let manifest = out.join("manifest.json");
    assert!(manifest.is_file());

    let victim = fs::read_dir(root.join("polarity/pos"))
        .unwrap()
        .next()
        .unwrap()
        .unwrap()
        .path();
    let victim_name = victim.file_name().unwrap().to_string_lossy().into_owned();
    fs::remove_file(&victim).unwrap();
    let out2 = tmp.path().join("out2");
    let mut args = vec![
        "--data-root",
        root.to_str().unwrap(),
        "-o",
        out2.to_str().unwrap(),
        "verify-data",
        "--expected",
        manifest.to_str().unwrap(),
    ];
    args.extend(SMALL_COUNTS);
    let o = run(&args);
    assert_eq!(o.status.code(), Some(1));
    let err = stderr(&o);
    assert!(
        err.contains(&format!("missing file pos/{victim_name}")),
        "{err}"
    );
    assert_eq!(err.trim().lines().count(), 1, "{err}");
    assert!(err.starts_with("error: kind=data-mismatch code=1"));

    let o = run(&[
        "--data-root",
        tmp.path().join("nowhere").to_str().unwrap(),
        "verify-data",
    ]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["--data-root", tmp.path().to_str().unwrap(), "verify-data"]);
    assert_eq!(
        o.status.code(),
        Some(2),
        "root without polarity/ is a usage error"
    );
    let o = run(&["verify-data"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn run_writes_reproducible_reports() {
    let tmp = tempfile::tempdir().unwrap();
    let root = small_data(tmp.path());
    let spec = tmp.path().join("spec.json");
    fs::write(
        &spec,
        r#"{"name":"full","extractor":{"type":"full_review"},"classifier":"nb"}"#,
    )
    .unwrap();
    let mut bodies = Vec::new();
    for out in ["a", "b"] {
        let out = tmp.path().join(out);
        let o = bin()
            .env("SUBJEX_DATA_ROOT", &root)
            .args(["-o", out.to_str().unwrap(), "run", spec.to_str().unwrap()])
            .output()
            .unwrap();
        assert!(o.status.success(), "{}", stderr(&o));
        bodies.push(fs::read(out.join("full.report.json")).unwrap());
        assert!(out.join("full.report.txt").is_file());
    }
    assert_eq!(bodies[0], bodies[1]);
    let report: serde_json::Value = serde_json::from_slice(&bodies[0]).unwrap();
    assert!(report["mean_accuracy"].as_f64().is_some());
    assert_eq!(report["folds"].as_array().unwrap().len(), 10);

    let o = run(&[
        "--data-root",
        root.to_str().unwrap(),
        "report",
        tmp.path().join("a/full.report.json").to_str().unwrap(),
    ]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("experiment  full"));
}

#[test]
fn seed_flag_overrides_spec() {
    let tmp = tempfile::tempdir().unwrap();
    let root = small_data(tmp.path());
    let spec = tmp.path().join("spec.json");
    fs::write(
        &spec,
        r#"{"name":"s","extractor":{"type":"full_review"},"classifier":"svm","seed":3}"#,
    )
    .unwrap();
    let out = tmp.path().join("o");
    let o = run(&[
        "--data-root",
        root.to_str().unwrap(),
        "-o",
        out.to_str().unwrap(),
        "--seed",
        "11",
        "run",
        spec.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let report: serde_json::Value =
        serde_json::from_slice(&fs::read(out.join("s.report.json")).unwrap()).unwrap();
    assert_eq!(report["config"]["seed"], 11);
}

#[test]
fn unknown_extractor_is_usage_error() {
    let tmp = tempfile::tempdir().unwrap();
    let root = small_data(tmp.path());
    let spec = tmp.path().join("spec.json");
    fs::write(
        &spec,
        r#"{"extractor":{"type":"middle_n","n":3},"classifier":"nb"}"#,
    )
    .unwrap();
    let o = run(&[
        "--data-root",
        root.to_str().unwrap(),
        "run",
        spec.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    for name in [
        "full_review",
        "first_n",
        "last_n",
        "top_n",
        "least_n",
        "detector",
        "flipped",
    ] {
        assert!(err.contains(name), "{err}");
    }
}

#[test]
fn oracle_defaults_and_vacuous_run() {
    let o = run(&["oracle"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("cost 1.1"));
    assert!(text.contains("oracle: pass (200 random instances, n <= 12)"));
    let o = run(&["oracle", "--trials", "0"]);
    assert!(o.status.success());
    assert!(stderr(&o).contains("zero random trials"));
    let o = run(&["oracle", "--n-max", "30"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn extract_mirrors_layout() {
    let tmp = tempfile::tempdir().unwrap();
    let root = small_data(tmp.path());
    let out = tmp.path().join("x");
    let o = run(&[
        "--data-root",
        root.to_str().unwrap(),
        "-o",
        out.to_str().unwrap(),
        "extract",
        "--base",
        "nb",
        "--mode",
        "graph",
        "--threshold",
        "2",
        "--strength",
        "0.3",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let lines = fs::read_to_string(out.join("extracts.jsonl")).unwrap();
    assert_eq!(lines.lines().count(), 120);
    let first: serde_json::Value = serde_json::from_str(lines.lines().next().unwrap()).unwrap();
    let id = first["doc_id"].as_str().unwrap();
    let label = if root
        .join("polarity/pos")
        .join(format!("{id}.txt"))
        .is_file()
    {
        "pos"
    } else {
        "neg"
    };
    let text =
        fs::read_to_string(out.join("extracts").join(label).join(format!("{id}.txt"))).unwrap();
    assert_eq!(
        text.lines().count(),
        first["selected"].as_array().unwrap().len()
    );
}

#[test]
fn trained_models_are_reused() {
    let tmp = tempfile::tempdir().unwrap();
    let root = small_data(tmp.path());
    let models = tmp.path().join("models");
    let o = run(&[
        "--data-root",
        root.to_str().unwrap(),
        "-o",
        models.to_str().unwrap(),
        "train-detector",
        "--base",
        "nb",
        "--cv",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(models.join("detector-nb.json").is_file());
    assert!(models.join("detector-nb.vocab.tsv").is_file());
    assert!(models.join("detector-nb-cv.json").is_file());

    let mut outputs = Vec::new();
    for (dir, use_models) in [("fresh", false), ("loaded", true)] {
        let out = tmp.path().join(dir);
        let mut args = vec![
            "--data-root",
            root.to_str().unwrap(),
            "-o",
            out.to_str().unwrap(),
        ];
        if use_models {
            args.extend(["--models", models.to_str().unwrap()]);
        }
        args.push("extract");
        let o = run(&args);
        assert!(o.status.success(), "{}", stderr(&o));
        outputs.push(fs::read(out.join("extracts.jsonl")).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);

    // Swapping in a foreign vocabulary must be refused.
    fs::write(models.join("detector-nb.vocab.tsv"), "zzz\t0\n").unwrap();
    let o = run(&[
        "--data-root",
        root.to_str().unwrap(),
        "--models",
        models.to_str().unwrap(),
        "-o",
        tmp.path().join("bad").to_str().unwrap(),
        "extract",
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(
        stderr(&o).contains("kind=vocabulary-mismatch"),
        "{}",
        stderr(&o)
    );
}

#[test]
fn grid_and_sweep_csv() {
    let tmp = tempfile::tempdir().unwrap();
    let root = small_data(tmp.path());
    let out = tmp.path().join("g");
    let base = [
        "--data-root",
        root.to_str().unwrap(),
        "-o",
        out.to_str().unwrap(),
        "--threads",
        "2",
    ];
    let o = bin()
        .args(base)
        .args(["grid", "--thresholds", "1"])
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = fs::read_to_string(out.join("grid.csv")).unwrap();
    assert!(csv.starts_with("method,N,classifier,fold,accuracy,preservation\n"));
    assert_eq!(csv.lines().count(), 1 + 33 * 11);
    let best: serde_json::Value =
        serde_json::from_slice(&fs::read(out.join("grid-best.report.json")).unwrap()).unwrap();
    assert_eq!(best["oracle_selected"], true);

    let o = bin()
        .args(base)
        .args(["sweep", "--classifiers", "nb", "--ns", "1,5"])
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = fs::read_to_string(out.join("sweep.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 4 * 2 * 11);
}

#[test]
fn spec_file_kinds() {
    let tmp = tempfile::tempdir().unwrap();
    let root = small_data(tmp.path());
    let out = tmp.path().join("k");
    let spec = tmp.path().join("para.json");
    fs::write(
        &spec,
        r#"{"paragraph_comparison":{"detector":"svm","classifiers":["nb"],"grid":{"thresholds":[1],"decays":["constant"],"strengths":[0.5],"cross_paragraph":[0.5,1.0]}}}"#,
    )
    .unwrap();
    let o = run(&[
        "--data-root",
        root.to_str().unwrap(),
        "-o",
        out.to_str().unwrap(),
        "run",
        spec.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let graph: serde_json::Value =
        serde_json::from_slice(&fs::read(out.join("paragraph-svm-nb-graph.report.json")).unwrap())
            .unwrap();
    assert_eq!(graph["comparisons"].as_array().unwrap().len(), 1);
    assert!(out.join("paragraph-svm-nb-unit.report.json").is_file());
    assert!(out.join("paragraph-svm-nb-grid.csv").is_file());
}
