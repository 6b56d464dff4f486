//! End-to-end tests of the `mdf` binary: subcommand plumbing, file
//! formats, error surfacing, and exit codes.

use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_mdf"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).into_owned()
}

fn stderr(output: &Output) -> String {
    String::from_utf8_lossy(&output.stderr).into_owned()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn sample_distances_score_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "sample",
        "--family",
        "flat-torus",
        "--size",
        "200",
        "--seed",
        "7",
        "--output-dir",
        path_str(dir.path()),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(dir.path().join("points.csv").is_file());
    assert!(dir.path().join("distances.csv").is_file());

    // score the exact matrix: a uniform torus sample scores high
    let out = run(&[
        "score",
        "--input",
        path_str(&dir.path().join("distances.csv")),
        "--dimension",
        "2",
        "--volume",
        "1.0",
        "--name",
        "torus",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let report = stdout(&out);
    assert!(report.contains("name=torus"));
    assert!(report.contains("scaling=flat"));
    let score: f64 = report
        .lines()
        .find_map(|l| l.strip_prefix("score="))
        .unwrap()
        .parse()
        .unwrap();
    assert!(score > 0.9, "score {score}");

    // the same sample through the points + wrap-distance path
    let wrap = dir.path().join("wrap.csv");
    let out = run(&[
        "distances",
        "--input",
        path_str(&dir.path().join("points.csv")),
        "--method",
        "torus-wrap",
        "--output",
        path_str(&wrap),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let a = std::fs::read(dir.path().join("distances.csv")).unwrap();
    let b = std::fs::read(&wrap).unwrap();
    assert_eq!(a, b, "wrap matrix differs from the sampler's matrix");
}

#[test]
fn score_reports_are_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "sample",
        "--family",
        "sphere",
        "--ambient-dim",
        "3",
        "--size",
        "300",
        "--seed",
        "5",
        "--output-dir",
        path_str(dir.path()),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let points = dir.path().join("points.csv");
    let args = [
        "score",
        "--input",
        path_str(&points),
        "--k-neighbors",
        "6",
        "--dimension",
        "2",
        "--volume",
        "12.566370614359172",
        "--chi",
        "2",
    ];
    let first = run(&args);
    let second = run(&args);
    assert!(first.status.success(), "{}", stderr(&first));
    assert_eq!(first.stdout, second.stdout);
    assert!(stdout(&first).contains("scaling=surface-heuristic(chi=2)"));
}

#[test]
fn disconnected_graph_error_names_components() {
    let dir = tempfile::tempdir().unwrap();
    // two tight clusters far apart: k = 1 cannot bridge them
    let mut csv = String::from("x0,x1\n");
    for i in 0..5 {
        csv.push_str(&format!("{},0.0\n", i as f64 * 0.01));
    }
    for i in 0..5 {
        csv.push_str(&format!("{},50.0\n", i as f64 * 0.01));
    }
    let points = dir.path().join("clusters.csv");
    std::fs::write(&points, csv).unwrap();
    let out = run(&[
        "score",
        "--input",
        path_str(&points),
        "--k-neighbors",
        "1",
        "--dimension",
        "2",
        "--volume",
        "1.0",
    ]);
    assert!(!out.status.success());
    let err = stderr(&out);
    assert!(err.contains("disconnected"), "stderr: {err}");
    assert!(err.contains('5'), "expected component witness in: {err}");
}

#[test]
fn mdf_subcommand_writes_density_csv() {
    let dir = tempfile::tempdir().unwrap();
    run(&[
        "sample",
        "--family",
        "flat-torus",
        "--size",
        "50",
        "--seed",
        "3",
        "--output-dir",
        path_str(dir.path()),
    ]);
    let out_csv = dir.path().join("khat.csv");
    let out = run(&[
        "mdf",
        "--input",
        path_str(&dir.path().join("distances.csv")),
        "--dimension",
        "2",
        "--grid-steps",
        "20",
        "--output",
        path_str(&out_csv),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = std::fs::read_to_string(&out_csv).unwrap();
    assert!(text.starts_with("r,value\n"));
    assert_eq!(text.lines().count(), 21);

    // local variant differs from the aggregated one in general
    let local_csv = dir.path().join("klocal.csv");
    let out = run(&[
        "mdf",
        "--input",
        path_str(&dir.path().join("distances.csv")),
        "--dimension",
        "2",
        "--grid-steps",
        "20",
        "--point",
        "0",
        "--output",
        path_str(&local_csv),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
}

#[test]
fn ripley_subcommand_and_weights() {
    let dir = tempfile::tempdir().unwrap();
    let mut csv = String::from("x0,x1\n");
    for i in 0..10 {
        for j in 0..10 {
            csv.push_str(&format!("{},{}\n", 0.05 + i as f64 * 0.1, 0.05 + j as f64 * 0.1));
        }
    }
    let points = dir.path().join("gridpts.csv");
    std::fs::write(&points, csv).unwrap();
    let out_csv = dir.path().join("k.csv");
    let out = run(&[
        "ripley",
        "--input",
        path_str(&points),
        "--domain-min",
        "0,0",
        "--domain-max",
        "1,1",
        "--r-max",
        "0.15",
        "--grid-steps",
        "10",
        "--output",
        path_str(&out_csv),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(stdout(&out).contains("interior_points="));
    assert!(std::fs::read_to_string(&out_csv).unwrap().starts_with("r,value\n"));

    // inhomogeneous with constant weights matches the homogeneous local
    let weights = dir.path().join("w.csv");
    std::fs::write(&weights, "100\n".repeat(100)).unwrap();
    let hom = dir.path().join("hom.csv");
    let inhom = dir.path().join("inhom.csv");
    let out = run(&[
        "ripley",
        "--input",
        path_str(&points),
        "--domain-min",
        "0,0",
        "--domain-max",
        "1,1",
        "--r-max",
        "0.15",
        "--grid-steps",
        "10",
        "--point",
        "55",
        "--output",
        path_str(&hom),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let out = run(&[
        "ripley",
        "--input",
        path_str(&points),
        "--domain-min",
        "0,0",
        "--domain-max",
        "1,1",
        "--r-max",
        "0.15",
        "--grid-steps",
        "10",
        "--point",
        "55",
        "--weights",
        path_str(&weights),
        "--output",
        path_str(&inhom),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert_eq!(
        std::fs::read(&hom).unwrap(),
        std::fs::read(&inhom).unwrap()
    );
}

#[test]
fn search_subcommands_on_torus_sample() {
    let dir = tempfile::tempdir().unwrap();
    run(&[
        "sample",
        "--family",
        "flat-torus",
        "--size",
        "800",
        "--seed",
        "21",
        "--output-dir",
        path_str(dir.path()),
    ]);
    let matrix = dir.path().join("distances.csv");

    let out = run(&[
        "search-chi",
        "--input",
        path_str(&matrix),
        "--volume",
        "1.0",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(stdout(&out).contains("chi=0"), "{}", stdout(&out));

    let out = run(&[
        "search-dim",
        "--input",
        path_str(&matrix),
        "--volume",
        "1.0",
        "--d-min",
        "1",
        "--d-max",
        "4",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(stdout(&out).contains("dimension=2"), "{}", stdout(&out));
}

#[test]
fn experiment_smoke_and_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let smoke = r#"
name = "smoke"
seed = 3
trials = 1
sizes = [10]
output_dir = "unused"

[sampler]
family = "flat-torus"

[distances]
method = "exact"

[grid]
steps = 10
rule = "percentile"
percentile = 0.25

[model]
dimension = 2
volume = "analytic"

[[columns]]
label = "uniform"
variant = "uniform"
scaling = "flat"

[[columns]]
label = "cross"
variant = "cross"
scaling = "flat"
"#;
    let config = dir.path().join("smoke.toml");
    std::fs::write(&config, smoke).unwrap();
    let out_dir = dir.path().join("out");
    let out = run(&[
        "experiment",
        "--config",
        path_str(&config),
        "--output-dir",
        path_str(&out_dir),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let scores = std::fs::read_to_string(out_dir.join("scores.csv")).unwrap();
    assert_eq!(scores.lines().count(), 3, "one score per column expected");
    assert!(out_dir.join("summary.csv").is_file());

    // invalid configuration: exit code 2
    let bad = smoke.replace("method = \"exact\"", "method = \"psychic\"");
    std::fs::write(&config, bad).unwrap();
    let out = run(&["experiment", "--config", path_str(&config)]);
    assert_eq!(out.status.code(), Some(2), "{}", stderr(&out));

    // partial failure: Klein cross with k = 1 disconnects; exit code 1
    let failing = r#"
name = "failing"
seed = 3
trials = 1
sizes = [60]
output_dir = "unused"

[sampler]
family = "klein-bottle"

[distances]
method = "knn"
k = 1

[grid]
steps = 10
rule = "percentile"
percentile = 0.25

[model]
dimension = 2
volume = "analytic"

[[columns]]
label = "cross"
variant = "cross"
scaling = "flat"
"#;
    std::fs::write(&config, failing).unwrap();
    let out = run(&[
        "experiment",
        "--config",
        path_str(&config),
        "--output-dir",
        path_str(&dir.path().join("out2")),
    ]);
    assert_eq!(out.status.code(), Some(1), "{}", stderr(&out));
    assert!(dir.path().join("out2/failures.csv").is_file());
}
