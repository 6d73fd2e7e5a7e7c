use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use corners_lab::extremal::ExtremalResult;
use corners_lab::increment::{ConstantsConfig, IncrementTrace, Verdict};
use corners_lab::uniformity::UniformityReport;
use corners_lab::{BohrReport, GroupSpec, SeededRng, Shape, Subset, Subset2D};
use corners_lab_cli::suite::SuiteReport;
use corners_lab_cli::{BehrendOutput, CornerCountOutput};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_corners-lab"));
    c.env("CORNERS_LAB_THREADS", "2");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn put(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn z(n: u64) -> Shape {
    Shape::Group(GroupSpec::cyclic(n).unwrap())
}

#[test]
fn corner_count_of_empty_set_is_zero() {
    let dir = tempfile::tempdir().unwrap();
    let p = put(dir.path(), "empty.json", &Subset2D::empty(z(7)).to_json());
    let o = run(&["corner-count", "--input", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let r: CornerCountOutput = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!((r.corners, r.size, r.side), (0, 0, 7));
}

#[test]
fn corner_count_of_full_plane() {
    let dir = tempfile::tempdir().unwrap();
    let p = put(dir.path(), "full.json", &Subset2D::full(Shape::Grid(5)).to_json());
    let o = run(&["corner-count", "--input", p.to_str().unwrap(), "--mode", "grid-nonzero"]);
    let r: CornerCountOutput = serde_json::from_str(&stdout(&o)).unwrap();
    // Σ_{d=1..4} 2(5−d)².
    assert_eq!(r.corners, 2 * (16 + 9 + 4 + 1));
    // A group mode on a grid set is rejected.
    let o = run(&["corner-count", "--input", p.to_str().unwrap(), "--mode", "group"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn lname_oracle_small_grids() {
    let o = run(&["lname-oracle", "--n", "2", "--mode", "grid"]);
    assert_eq!(o.status.code(), Some(0));
    let r: ExtremalResult = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(r.max_size, 3);
    assert!(r.optimal);
    let o = run(&["lname-oracle", "--n", "5", "--mode", "grid", "--budget", "10"]);
    assert_eq!(o.status.code(), Some(2));
    let r: ExtremalResult = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(!r.optimal);
}

#[test]
fn behrend_verifies() {
    let o = run(&["behrend", "--n", "1000", "--verify"]);
    assert_eq!(o.status.code(), Some(0));
    let r: BehrendOutput = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(r.ap3_free, Some(true));
    assert_eq!(r.size, r.set.len());
    assert!(r.set.iter().all(|&x| (1..=1000).contains(&x)));
}

#[test]
fn bohr_explore_report() {
    let o = run(&["bohr-explore", "--group", "Z101", "--chars", "1,7", "--eps", "0.2", "--kappa", "0.125"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let r: BohrReport = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(r.dim, 2);
    assert!(r.lower_bound_holds && r.minus_size <= r.size && r.size <= r.plus_size);
    let o = run(&["bohr-explore", "--group", "Z6xZ4", "--chars", "1:1", "--eps", "0.3", "--regularize"]);
    let r: BohrReport = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(r.regular && r.eps > 0.15 && r.eps < 0.3);
    let o = run(&["bohr-explore", "--group", "Z0", "--chars", "1", "--eps", "0.3"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn box_norm_report() {
    let dir = tempfile::tempdir().unwrap();
    let shape = z(9);
    let e = Subset::from_indices(shape.clone(), 0..6).unwrap();
    let a = Subset2D::product(&Subset::from_indices(shape.clone(), 0..3).unwrap(), &e).unwrap();
    let pa = put(dir.path(), "a.json", &a.to_json());
    let pe = put(dir.path(), "e.json", &e.to_json());
    let o = run(&["box-norm", "--input", pa.to_str().unwrap(), "--e1", pe.to_str().unwrap(), "--e2", pe.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let r: UniformityReport = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!((r.a_size, r.e1_size, r.e2_size), (18, 6, 6));
    assert!((r.density - 0.5).abs() < 1e-15);
    assert!(!r.verdicts.rect_uniform);
}

#[test]
fn increment_run_writes_trace_and_plot() {
    let dir = tempfile::tempdir().unwrap();
    let mut r = SeededRng::new(3);
    let a = Subset2D::from_fn(z(14), |x, y| (x < 6 && y < 6) || r.bernoulli(0.05));
    let pa = put(dir.path(), "a.json", &a.to_json());
    let pc = put(dir.path(), "c.json", &ConstantsConfig::desk().to_json());
    let trace = dir.path().join("trace.json");
    let svg = dir.path().join("plot.svg");
    let args = [
        "increment-run", "--input", pa.to_str().unwrap(), "--config", pc.to_str().unwrap(), "--seed", "7",
        "--trace", trace.to_str().unwrap(), "--svg", svg.to_str().unwrap(),
    ];
    let o = run(&args);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&trace).unwrap();
    let t = IncrementTrace::from_json(&text).unwrap();
    assert_eq!(t.seed, 7);
    assert!(t.steps[0].verdict.is_increment());
    t.check(&a).unwrap();
    assert!(std::fs::read_to_string(&svg).unwrap().contains("<polyline"));
    // Same seed, same bytes.
    run(&args);
    assert_eq!(std::fs::read_to_string(&trace).unwrap(), text);
    // The trace re-serializes to itself.
    assert_eq!(t.to_json() + "\n", text);
}

#[test]
fn increment_run_on_full_plane() {
    let dir = tempfile::tempdir().unwrap();
    let pa = put(dir.path(), "a.json", &Subset2D::full(z(11)).to_json());
    let o = run(&["increment-run", "--input", pa.to_str().unwrap()]);
    let t = IncrementTrace::from_json(&stdout(&o)).unwrap();
    assert!(matches!(t.steps[0].verdict, Verdict::CornerCount { corners: 1210, .. }));
}

#[test]
fn bad_inputs_exit_with_status_one() {
    let dir = tempfile::tempdir().unwrap();
    let bad = put(dir.path(), "bad.json", "{ not json");
    assert_eq!(run(&["corner-count", "--input", bad.to_str().unwrap()]).status.code(), Some(1));
    assert_eq!(run(&["corner-count", "--input", "/nonexistent/a.json"]).status.code(), Some(1));
    assert_eq!(run(&["behrend", "--n", "10", "--unknown-flag"]).status.code(), Some(1));
    assert_eq!(run(&[]).status.code(), Some(1));
    let cfg = put(dir.path(), "c.json", r#"{"preset":"desk","bogus":1}"#);
    let a = put(dir.path(), "a.json", &Subset2D::full(z(5)).to_json());
    let o = run(&["increment-run", "--input", a.to_str().unwrap(), "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let o = bin().env("CORNERS_LAB_THREADS", "zero").args(["behrend", "--n", "10"]).output().unwrap();
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn oracle_suite_reports() {
    let o = run(&["oracle-suite", "--samples", "4"]);
    assert_eq!(o.status.code(), Some(0));
    let r: SuiteReport = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(r.all_pass() && !r.results.is_empty());
    let o = run(&["oracle-suite", "--samples", "4", "--tolerance", "0", "--groups", "Z8,Z5xZ5"]);
    assert_eq!(o.status.code(), Some(1));
    let r: SuiteReport = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(r.results.iter().any(|c| c.invariant == "parseval" && !c.pass));
    let o = run(&["oracle-suite", "--groups", ""]);
    let r: SuiteReport = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(r.results.is_empty());
}

/// Parses `text` as `T` and checks that it re-serializes byte for byte.
fn round_trips<T: serde::Serialize + serde::de::DeserializeOwned>(text: &str) {
    let v: T = serde_json::from_str(text).unwrap();
    assert_eq!(serde_json::to_string_pretty(&v).unwrap() + "\n", text);
}

#[test]
fn outputs_are_deterministic_and_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let a = put(dir.path(), "a.json", &Subset2D::full(z(6)).to_json());
    let a = a.to_str().unwrap();
    let cases: [(&[&str], fn(&str)); 6] = [
        (&["behrend", "--n", "300", "--verify"], round_trips::<BehrendOutput>),
        (&["lname-oracle", "--n", "3", "--mode", "group"], round_trips::<ExtremalResult>),
        (&["oracle-suite", "--groups", "Z6", "--samples", "3"], round_trips::<SuiteReport>),
        (&["bohr-explore", "--group", "Z30", "--chars", "1", "--eps", "0.25"], round_trips::<BohrReport>),
        (&["corner-count", "--input", a], round_trips::<CornerCountOutput>),
        (&["box-norm", "--input", a], round_trips::<UniformityReport>),
    ];
    for (args, check) in cases {
        let first = stdout(&run(args));
        assert_eq!(first, stdout(&run(args)), "{args:?}");
        check(&first);
    }
}

#[test]
fn output_flag_and_schema() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("b.json");
    let o = run(&["behrend", "--n", "50", "--output", p.to_str().unwrap()]);
    assert!(o.stdout.is_empty());
    let r: BehrendOutput = serde_json::from_str(&std::fs::read_to_string(&p).unwrap()).unwrap();
    assert_eq!(r.n, 50);
    let s: serde_json::Value = serde_json::from_str(&stdout(&run(&["--schema"]))).unwrap();
    for key in ["set-file", "constants", "increment-trace", "oracle-suite", "bohr-report"] {
        assert!(s["schemas"][key].is_object(), "{key}");
    }
}
