use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use paretogap::archive::{gap_table_csv, RunArchive};
use paretogap::search::checkpoint_reports;
use paretogap::ReferencePoint;
use tempfile::TempDir;

fn paretogap(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_paretogap"))
        .args(args)
        .env_remove("RUST_BACKTRACE")
        .env_remove("RUST_LIB_BACKTRACE")
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = paretogap(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn fails(args: &[&str]) -> String {
    let out = paretogap(args);
    assert!(!out.status.success(), "{args:?} unexpectedly succeeded");
    String::from_utf8(out.stderr).unwrap()
}

fn path(dir: &TempDir, name: &str) -> PathBuf {
    dir.path().join(name)
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn synthetic_run(dir: &TempDir, name: &str, budget: &str, seed: &str, extra: &[&str]) -> PathBuf {
    let out = path(dir, name);
    let mut args = vec!["run", "--budget", budget, "--seed", seed, "--out", s(&out)];
    args.extend_from_slice(extra);
    ok(&args);
    out
}

const ABC: &str = "\
record_id,f1_val,f2_val,f1_test,f2_test
a,0.1,0.9,0.2,0.8
b,0.3,0.5,0.4,0.6
c,0.6,0.2,0.5,0.7
";

#[test]
fn linear_run_writes_every_record_deterministically() {
    let dir = TempDir::new().unwrap();
    let a = path(&dir, "a.archive");
    let b = path(&dir, "b.archive");
    let c = path(&dir, "c.archive");
    let stdout = ok(&[
        "run",
        "--evaluator",
        "linear",
        "--budget",
        "50",
        "--seed",
        "1",
        "--out",
        s(&a),
    ]);
    assert!(
        stdout.contains("wrote 50 records") && stdout.contains("validation HV"),
        "{stdout}"
    );
    ok(&[
        "run",
        "--evaluator",
        "linear",
        "--budget",
        "50",
        "--seed",
        "1",
        "--out",
        s(&b),
    ]);
    ok(&[
        "run",
        "--evaluator",
        "linear",
        "--budget",
        "50",
        "--seed",
        "1",
        "--threads",
        "4",
        "--out",
        s(&c),
    ]);
    let bytes = fs::read(&a).unwrap();
    assert_eq!(bytes, fs::read(&b).unwrap());
    assert_eq!(bytes, fs::read(&c).unwrap());
    let archive = RunArchive::read(bytes.as_slice()).unwrap();
    assert_eq!(archive.records.len(), 50);
    assert_eq!(archive.manifest.master_seed, Some(1));
}

#[test]
fn run_rejects_bad_input() {
    let dir = TempDir::new().unwrap();
    let out = path(&dir, "x");
    fails(&["run", "--budget", "0", "--out", s(&out)]);
    let space = path(&dir, "bad.space");
    fs::write(&space, "a float 0 1\nb floaty 1 2\n").unwrap();
    let err = fails(&[
        "run",
        "--space",
        s(&space),
        "--budget",
        "3",
        "--out",
        s(&out),
    ]);
    assert!(err.contains("line 2, column 3"), "{err}");
    let err = fails(&[
        "run",
        "--evaluator",
        "linear",
        "--space",
        "builtin:random-forest",
        "--budget",
        "3",
        "--out",
        s(&out),
    ]);
    assert!(err.contains("penalty"), "{err}");
    assert!(!out.exists());
}

#[test]
fn run_reads_user_datasets() {
    let dir = TempDir::new().unwrap();
    let data = path(&dir, "credit.csv");
    ok(&["make-dataset", "--seed", "2", "--out", s(&data)]);
    assert!(path(&dir, "credit.csv.schema").exists());
    let archive = path(&dir, "run.archive");
    ok(&[
        "run",
        "--evaluator",
        "linear",
        "--data",
        s(&data),
        "--budget",
        "5",
        "--out",
        s(&archive),
    ]);
    let run = RunArchive::read(fs::File::open(&archive).unwrap()).unwrap();
    assert!(run.manifest.notes["dataset"].contains("credit.csv"));
}

#[test]
fn analyze_identical_splits_gives_zero_gap() {
    let dir = TempDir::new().unwrap();
    let records = path(&dir, "same.csv");
    fs::write(&records, "record_id,f1_val,f2_val,f1_test,f2_test\na,0.1,0.9,0.1,0.9\nb,0.5,0.5,0.5,0.5\nc,0.7,0.7,0.7,0.7\n").unwrap();
    let table = path(&dir, "table.csv");
    ok(&[
        "analyze",
        s(&records),
        "--ref",
        "1,1",
        "--budgets",
        "1,2,3",
        "--out",
        s(&table),
    ]);
    let csv = fs::read_to_string(&table).unwrap();
    for row in csv.lines().skip(1) {
        assert_eq!(row.split(',').nth(4), Some("0.0"), "{row}");
    }
}

#[test]
fn analyze_abc_fixture() {
    let dir = TempDir::new().unwrap();
    let records = path(&dir, "abc.csv");
    fs::write(&records, ABC).unwrap();
    let err = fails(&["analyze", s(&records)]);
    assert!(err.contains("--ref"), "{err}");
    let table = path(&dir, "table.csv");
    let human = ok(&["analyze", s(&records), "--ref", "1,1", "--out", s(&table)]);
    assert!(human.contains("Approximation Gap"));
    let row: Vec<f64> = fs::read_to_string(&table)
        .unwrap()
        .lines()
        .nth(1)
        .unwrap()
        .split(',')
        .map(|v| v.parse().unwrap())
        .collect();
    assert_eq!(row[0], 3.0);
    assert!(
        (row[2] - 0.21).abs() < 1e-12
            && (row[3] - 0.28).abs() < 1e-12
            && (row[4] - 0.07).abs() < 1e-12,
        "{row:?}"
    );
    let err = fails(&["analyze", s(&records), "--ref", "1,1", "--budgets", "2,4"]);
    assert!(err.contains("budget 4"), "{err}");
}

#[test]
fn analyze_matches_library_checkpoints() {
    let dir = TempDir::new().unwrap();
    let archive = synthetic_run(&dir, "run.archive", "500", "4", &["--threads", "0"]);
    let table = path(&dir, "table.csv");
    ok(&[
        "analyze",
        s(&archive),
        "--budgets",
        "50,100,200,500",
        "--out",
        s(&table),
    ]);
    let csv = fs::read_to_string(&table).unwrap();
    let run = RunArchive::read(fs::File::open(&archive).unwrap()).unwrap();
    let expected =
        checkpoint_reports(&run.records, &[50, 100, 200, 500], &ReferencePoint::unit(2)).unwrap();
    assert_eq!(csv, gap_table_csv(&expected));
    let validation: Vec<f64> = csv
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert_eq!(validation.len(), 4);
    assert!(
        validation.windows(2).all(|w| w[0] <= w[1]),
        "{validation:?}"
    );
}

#[test]
fn compare_replays_reported_verdict() {
    let dir = TempDir::new().unwrap();
    // Single-configuration runs whose hypervolume is precision * recall.
    let run = |name: &str, recall: f64| {
        let p = path(&dir, name);
        fs::write(
            &p,
            format!(
                "#! objective precision maximize 0 1\n#! objective recall maximize 0 1\n\
                 record_id,precision_val,recall_val,precision_test,recall_test\nbest,1,{recall},1,{recall}\n"
            ),
        )
        .unwrap();
        p
    };
    let linear = run("linear.csv", 0.5970);
    let forest = run("forest.csv", 0.5833);
    let out = ok(&["compare", s(&linear), s(&forest), "--criterion", "hv"]);
    assert!(out.contains("outcome: first_better"), "{out}");
    let out = ok(&["compare", s(&forest), s(&linear)]);
    assert!(out.contains("outcome: second_better"), "{out}");
}

#[test]
fn compare_reports_incomparable_with_success() {
    let dir = TempDir::new().unwrap();
    let a = synthetic_run(&dir, "a.archive", "40", "9", &[]);
    let b = synthetic_run(&dir, "b.archive", "40", "9", &[]);
    let out = ok(&["compare", s(&a), s(&b), "--criterion", "dominance"]);
    assert!(
        out.contains("criterion: front_dominance") && out.contains("outcome: incomparable"),
        "{out}"
    );
    let out = ok(&["compare", s(&a), s(&b), "--criterion", "gap"]);
    assert!(out.contains("outcome: incomparable"), "{out}");
    let linear = path(&dir, "lin.archive");
    ok(&[
        "run",
        "--evaluator",
        "linear",
        "--budget",
        "3",
        "--out",
        s(&linear),
    ]);
    let err = fails(&["compare", s(&a), s(&linear)]);
    assert!(err.contains("objective"), "{err}");
}

#[test]
fn plotdata_point_sets() {
    let dir = TempDir::new().unwrap();
    let records = path(&dir, "three.csv");
    fs::write(&records, ABC).unwrap();
    let plots = path(&dir, "plots");
    ok(&[
        "plotdata",
        s(&records),
        "--which",
        "validation,all-points",
        "--out",
        s(&plots),
    ]);
    let validation = fs::read_to_string(plots.join("validation.csv")).unwrap();
    let rows: Vec<&str> = validation.lines().skip(1).collect();
    assert_eq!(rows.len(), 3);
    assert!(rows.iter().all(|r| r.split(',').nth(5) == Some("1")));
    assert_eq!(
        fs::read_to_string(plots.join("all-points.csv"))
            .unwrap()
            .lines()
            .count(),
        4
    );
    let err = fails(&[
        "plotdata",
        s(&records),
        "--which",
        "front",
        "--out",
        s(&plots),
    ]);
    assert!(
        err.contains("validation, optimistic, pessimistic, naive-test, all-points"),
        "{err}"
    );
}

#[test]
fn plotted_fronts_stay_inside_the_validation_front() {
    let dir = TempDir::new().unwrap();
    for seed in ["1", "2", "3", "4", "5"] {
        let archive = synthetic_run(
            &dir,
            &format!("{seed}.archive"),
            "80",
            seed,
            &["--noise-sigma", "0.1"],
        );
        let plots = path(&dir, &format!("plots-{seed}"));
        ok(&["plotdata", s(&archive), "--out", s(&plots)]);
        let ids = |set: &str| -> Vec<String> {
            fs::read_to_string(plots.join(format!("{set}.csv")))
                .unwrap()
                .lines()
                .skip(1)
                .map(|l| l.split(',').next().unwrap().to_string())
                .collect()
        };
        let validation = ids("validation");
        assert!(ids("optimistic")
            .iter()
            .chain(&ids("pessimistic"))
            .all(|id| validation.contains(id)));
        assert_eq!(ids("all-points").len(), 80);
    }
}

#[test]
fn help_documents_every_flag() {
    let help = ok(&["run", "--help"]);
    for flag in [
        "--evaluator",
        "--space",
        "--budget",
        "--seed",
        "--budgets",
        "--ref",
        "--threads",
        "--surface",
        "--noise-sigma",
        "--data",
        "--schema",
        "--split-seed",
        "--out",
    ] {
        assert!(help.contains(flag), "run --help lacks {flag}");
    }
    for (cmd, flags) in [
        ("analyze", &["--budgets", "--ref", "--out"][..]),
        (
            "compare",
            &["--criterion", "--ref", "--budget", "--tie-epsilon", "--out"][..],
        ),
        ("plotdata", &["--which", "--budget", "--out"][..]),
    ] {
        let help = ok(&[cmd, "--help"]);
        for flag in flags {
            assert!(help.contains(flag), "{cmd} --help lacks {flag}");
        }
    }
}
