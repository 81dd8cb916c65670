use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn windcast(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_windcast"))
        .current_dir(dir)
        .env_remove("WINDCAST_SEED")
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let out = windcast(dir, args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn column(csv: &str, name: &str) -> Vec<f64> {
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let k = header.iter().position(|h| *h == name).unwrap();
    lines.map(|l| l.split(',').nth(k).unwrap().parse().unwrap()).collect()
}

#[test]
fn constant_synth_decomposes_to_zero_details() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(d, &["synth", "--kind", "constant", "--value", "5", "-n", "10", "--out", "c.csv"]);
    let csv = ok(d, &["decompose", "-i", "c.csv", "--levels", "3", "--filter", "db1"]);
    assert_eq!(csv.lines().next().unwrap(), "time,index,d1,d2,d3,smooth");
    assert_eq!(csv.lines().count(), 11);
    for j in 1..=3 {
        assert!(column(&csv, &format!("d{j}")).iter().all(|v| v.abs() < 1e-12));
    }
    assert!(column(&csv, "smooth").iter().all(|v| (*v - 5.0).abs() < 1e-12));
}

#[test]
fn decompose_reads_stdin() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let series = ok(d, &["synth", "--kind", "constant", "--value", "2", "-n", "8"]);
    let mut child = Command::new(env!("CARGO_BIN_EXE_windcast"))
        .args(["decompose", "-i", "-", "--levels", "2", "--filter", "db1"])
        .stdin(std::process::Stdio::piped())
        .stdout(std::process::Stdio::piped())
        .spawn()
        .unwrap();
    use std::io::Write;
    child.stdin.take().unwrap().write_all(series.as_bytes()).unwrap();
    let out = child.wait_with_output().unwrap();
    assert!(out.status.success());
    assert_eq!(String::from_utf8(out.stdout).unwrap().lines().count(), 9);
}

#[test]
fn perfect_recipe_scores_zero() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(d, &["synth", "--kind", "sine_plus_ar", "-n", "2000", "--out", "s.csv"]);
    let summary = ok(
        d,
        &["evaluate", "-i", "s.csv", "--recipe", "perfect", "--training-window", "500", "--stride", "100"],
    );
    assert_eq!(summary.lines().next().unwrap(), "model,mean_rmse,standard_error,n_origins,n_skipped");
    assert_eq!(column(&summary, "mean_rmse"), vec![0.0]);
    assert_eq!(column(&summary, "n_origins"), vec![15.0]);
}

#[test]
fn fit_then_forecast_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    fs::write(
        d.join("run.cfg"),
        "# small model\nlevels = 3\nfilter = db2\nsplit_level = 2\nsvr_lag = 4\nhistory_window = 256\ntraining_window = 600\nhorizon = 6\n",
    )
    .unwrap();
    ok(d, &["synth", "--kind", "sine_plus_ar", "-n", "800", "--seed", "5", "--out", "s.csv"]);
    ok(d, &["fit", "-i", "s.csv", "--model", "m1.txt", "--config", "run.cfg"]);
    ok(d, &["fit", "-i", "s.csv", "--model", "m2.txt", "--config", "run.cfg"]);
    assert_eq!(fs::read(d.join("m1.txt")).unwrap(), fs::read(d.join("m2.txt")).unwrap());
    ok(d, &["forecast", "--model", "m1.txt", "--history", "s.csv", "--out", "f1.csv", "--config", "run.cfg"]);
    ok(d, &["forecast", "--model", "m1.txt", "--history", "s.csv", "--out", "f2.csv", "--config", "run.cfg"]);
    let f1 = fs::read_to_string(d.join("f1.csv")).unwrap();
    assert_eq!(f1, fs::read_to_string(d.join("f2.csv")).unwrap());
    assert_eq!(f1.lines().count(), 7);
    assert!(f1.lines().nth(1).unwrap().starts_with("2004-01-06T13:20:00Z,"));
}

#[test]
fn seed_changes_output_and_env_is_a_fallback() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let a = ok(d, &["synth", "--kind", "ar", "-n", "20", "--seed", "1"]);
    let b = ok(d, &["synth", "--kind", "ar", "-n", "20", "--seed", "2"]);
    assert_ne!(a, b);
    let env = Command::new(env!("CARGO_BIN_EXE_windcast"))
        .env("WINDCAST_SEED", "2")
        .args(["synth", "--kind", "ar", "-n", "20"])
        .output()
        .unwrap();
    assert_eq!(String::from_utf8(env.stdout).unwrap(), b);
    let flag_wins = Command::new(env!("CARGO_BIN_EXE_windcast"))
        .env("WINDCAST_SEED", "2")
        .args(["synth", "--kind", "ar", "-n", "20", "--seed", "1"])
        .output()
        .unwrap();
    assert_eq!(String::from_utf8(flag_wins.stdout).unwrap(), a);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(windcast(d, &["bogus"]).status.code(), Some(2));
    assert_eq!(windcast(d, &["synth", "--kind", "constant", "-n", "3", "--frobnicate", "1"]).status.code(), Some(2));
    fs::write(d.join("bad.cfg"), "wavelet = db4\n").unwrap();
    let out = windcast(d, &["synth", "--kind", "constant", "-n", "3", "--config", "bad.cfg"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("bad.cfg:1"));
    let out = windcast(d, &["decompose", "-i", "missing.csv"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!String::from_utf8_lossy(&out.stderr).is_empty());
    ok(d, &["synth", "--kind", "constant", "-n", "100", "--out", "c.csv"]);
    let out = windcast(d, &["decompose", "-i", "c.csv", "--levels", "9"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("maximum feasible levels: 4"));
    assert_eq!(windcast(d, &["compare", "-i", "c.csv", "--recipes", "ar"]).status.code(), Some(2));
}

#[test]
fn identical_recipes_under_two_names_agree() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(d, &["synth", "--kind", "sine_plus_ar", "-n", "3000", "--out", "s.csv"]);
    ok(
        d,
        &[
            "compare", "-i", "s.csv", "--recipes", "a=ar,b=ar", "--training-window", "1000", "--stride", "300",
            "--metrics", "m.csv", "--summary", "sum.csv", "--trace", "t.csv", "--trace-origin", "2",
        ],
    );
    let metrics = fs::read_to_string(d.join("m.csv")).unwrap();
    assert_eq!(metrics.lines().next().unwrap(), "origin_time,origin_index,horizon,model,rmse");
    let rows: Vec<Vec<&str>> = metrics.lines().skip(1).map(|l| l.split(',').collect()).collect();
    let a: Vec<_> = rows.iter().filter(|r| r[3] == "a").map(|r| (r[0], r[4])).collect();
    let b: Vec<_> = rows.iter().filter(|r| r[3] == "b").map(|r| (r[0], r[4])).collect();
    assert_eq!(a, b);
    assert_eq!(a.len(), 7);
    let trace = fs::read_to_string(d.join("t.csv")).unwrap();
    assert_eq!(trace.lines().next().unwrap(), "time,actual,predicted,model");
    assert_eq!(trace.lines().count(), 1 + 2 * 36);
}

#[test]
fn gaps_follow_the_configured_policy() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let mut csv = String::from("timestamp,speed_ms\n");
    for i in 0..60 {
        if (20..25).contains(&i) {
            continue;
        }
        csv.push_str(&format!("2004-01-01T{:02}:{:02}:00Z,{}\n", i / 6, (i % 6) * 10, 5.0 + (i % 7) as f64));
    }
    fs::write(d.join("g.csv"), csv).unwrap();
    let out = windcast(d, &["decompose", "-i", "g.csv", "--levels", "2", "--filter", "db1"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("g.csv:"));
    let out = windcast(
        d,
        &["decompose", "-i", "g.csv", "--levels", "2", "--filter", "db1", "--gap-policy", "split-at-gap"],
    );
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("missing"));
}
