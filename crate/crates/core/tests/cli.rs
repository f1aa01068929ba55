use std::io::Write;
use std::path::Path;
use std::process::{Command, Output};

use sis_stream::cli::{
    run, LearnerKind, RunConfig, BATTERY_AGGREGATE_FILE, LOG_FILE, OUTPUT_DIR_ENV, SUMMARY_FILE,
    WINDOWED_FILE,
};
use sis_stream::stream::{ScenarioSpec, Segment};

fn bench(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sis-bench"))
        .args(args)
        .env_remove(OUTPUT_DIR_ENV)
        .output()
        .expect("spawn sis-bench")
}

/// Runs `sis-bench` with whitespace-separated `line` followed by `--out dir`.
fn bench_to(line: &str, dir: &Path) -> Output {
    let mut args: Vec<&str> = line.split_whitespace().collect();
    args.extend(["--out", dir.to_str().unwrap()]);
    bench(&args)
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

/// File contents with the CPU-time columns removed.
fn untimed(path: &Path) -> Vec<Vec<String>> {
    let mut reader = csv::Reader::from_path(path).unwrap();
    let headers = reader.headers().unwrap().clone();
    let keep: Vec<usize> = headers
        .iter()
        .enumerate()
        .filter(|(_, h)| !matches!(*h, "elapsed_s" | "time_s" | "cost"))
        .map(|(i, _)| i)
        .collect();
    let mut rows = vec![keep.iter().map(|&i| headers[i].to_string()).collect()];
    for record in reader.records() {
        let record = record.unwrap();
        rows.push(keep.iter().map(|&i| record[i].to_string()).collect());
    }
    rows
}

fn same_outputs(a: &Path, b: &Path) {
    for name in [SUMMARY_FILE, LOG_FILE] {
        assert_eq!(untimed(&a.join(name)), untimed(&b.join(name)), "{name}");
    }
    assert_eq!(
        std::fs::read(a.join(WINDOWED_FILE)).unwrap(),
        std::fs::read(b.join(WINDOWED_FILE)).unwrap()
    );
}

#[test]
fn binary_matches_library_call() {
    let dir = tempfile::tempdir().unwrap();
    let via_bin = dir.path().join("bin");
    let out = bench_to(
        "run --learner hat+sis --source synthetic:gaussian --length 1200 \
         --N 50 --k 2 --r 5 --eps 0.2 --grace 100 --seed 3",
        &via_bin,
    );
    assert!(out.status.success(), "{}", stderr(&out));

    let spec = ScenarioSpec {
        segments: vec![Segment::synthetic(0, 1200)],
        seed: 3,
        ..ScenarioSpec::default()
    };
    let mut cfg = RunConfig::new(LearnerKind::HatSis, "synthetic:gaussian[I]", spec);
    cfg.sis = sis_stream::sis::SisConfig::new(50, 2, 5, 0.2);
    cfg.tree.grace_period = 100;
    cfg.output_dir = dir.path().join("lib");
    run(&cfg).unwrap();

    same_outputs(&via_bin, &cfg.output_dir);
}

#[test]
fn repeated_runs_are_identical_apart_from_cpu_time() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["a", "b"] {
        let line = "run --learner ht --source synthetic:gaussian --seed 7 --length 2000";
        assert!(bench_to(line, &dir.path().join(name)).status.success());
    }
    same_outputs(&dir.path().join("a"), &dir.path().join("b"));
}

#[test]
fn usage_and_data_errors_exit_nonzero() {
    let out = bench(&["run", "--learner", "svm", "--source", "synthetic:gaussian"]);
    assert!(!out.status.success());
    assert!(stderr(&out).contains("svm"));

    let dir = tempfile::tempdir().unwrap();
    let out = bench_to("run --learner ht --source /no/such/file.csv", dir.path());
    assert!(!out.status.success());
    assert!(stderr(&out).contains("/no/such/file.csv"));

    assert!(!bench(&["run", "--learner", "ht"]).status.success());
}

#[test]
fn existing_outputs_need_force() {
    let dir = tempfile::tempdir().unwrap();
    let line = "run --learner ht --source gaussian --length 300";
    assert!(bench_to(line, dir.path()).status.success());
    let again = bench_to(line, dir.path());
    assert!(!again.status.success());
    assert!(stderr(&again).contains("--force"));
    assert!(bench_to(&format!("{line} --force"), dir.path())
        .status
        .success());
}

#[test]
fn output_dir_defaults_to_environment() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_sis-bench"))
        .args("run --learner ht --source gaussian --length 200".split(' '))
        .env(OUTPUT_DIR_ENV, dir.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(dir.path().join(SUMMARY_FILE).exists());
}

#[test]
fn recorded_file_with_feature_drop() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("events.csv");
    let mut f = std::fs::File::create(&data).unwrap();
    writeln!(f, "v1,v2,v3,marker").unwrap();
    for t in 0..900 {
        let fault = (t / 60) % 2 == 1;
        let base = if fault { 3.0 } else { 0.0 };
        let jitter = ((t * 37) % 11) as f64 / 10.0;
        let label = if fault { "fault" } else { "normal" };
        let v2 = 100.0 * (base - jitter);
        writeln!(f, "{},{v2},{},{label}", base + jitter, 0.01 * jitter).unwrap();
    }
    drop(f);
    let out_dir = dir.path().join("out");
    let line = format!(
        "run --learner hat+sis --source {} --header --scenario III --drop-at 450 --drop 1",
        data.display()
    );
    let out = bench_to(&line, &out_dir);
    assert!(out.status.success(), "{}", stderr(&out));
    let log = untimed(&out_dir.join(LOG_FILE));
    assert_eq!(log.len(), 901);
    assert!(log[1..].iter().all(|r| r[1] == "fault" || r[1] == "normal"));
    let summary = untimed(&out_dir.join(SUMMARY_FILE));
    let status = summary[0].iter().position(|h| h == "status").unwrap();
    assert_eq!(summary[1][status], "ok");
}

#[test]
fn scenario_four_writes_both_orders() {
    let dir = tempfile::tempdir().unwrap();
    let line = "run --learner ht+ddm --source gaussian --scenario IV --length 600";
    assert!(bench_to(line, dir.path()).status.success());
    for order in ["order-1", "order-2"] {
        assert!(dir.path().join(order).join(SUMMARY_FILE).exists());
    }
}

#[test]
fn battery_writes_aggregate() {
    let dir = tempfile::tempdir().unwrap();
    let line = "battery --learners ht,ht+ddm --seeds 1,2,3 --source gaussian --length 400";
    let out = bench_to(line, dir.path());
    assert!(out.status.success(), "{}", stderr(&out));
    let rows = untimed(&dir.path().join(BATTERY_AGGREGATE_FILE));
    // header + 2 learners x 5 metrics
    assert_eq!(rows.len(), 11);
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("ht accuracy") && stdout.contains("ht+ddm kappa"));
}
