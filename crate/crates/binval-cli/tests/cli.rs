//! End-to-end checks of the `binval` binary: exit codes, output formats, and
//! the determinism contract, driven through real subprocesses.

use std::fs;
use std::process::{Command, Output};

use binval::{hamming, BitString, ComplexityTable, MatchMask};
use num::rational::BigRational;
use num::BigInt;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_binval"));
    // Keep the host environment's cache out of the tests.
    c.env_remove("BINVAL_TABLE_CACHE");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawning the binary")
}

fn run_ok(args: &[&str]) -> String {
    let out = run(args);
    assert!(
        out.status.success(),
        "`binval {}` failed: {}",
        args.join(" "),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).expect("utf-8 stdout")
}

#[test]
fn bbc_prints_exact_rationals() {
    assert_eq!(run_ok(&["bbc", "--n", "2", "--mode", "exact"]).trim(), "2");
    assert_eq!(run_ok(&["bbc", "--n", "4", "--mode", "exact"]).trim(), "25/8");
    assert_eq!(run_ok(&["bbc", "--n", "8"]).trim(), "561/128");
}

#[test]
fn bbc_switches_to_float_above_the_exact_default() {
    let out = run_ok(&["bbc", "--n", "30"]);
    let v: f64 = out.trim().parse().expect("float output");
    assert!(v > 5.9 && v < 7.33, "bbc(30) = {v} outside its bracket");
    assert!(!out.contains('/'));
    // Forcing float at a small size also works.
    let forced: f64 = run_ok(&["bbc", "--n", "4", "--mode", "f64"]).trim().parse().unwrap();
    assert!((forced - 3.125).abs() < 1e-12);
}

#[test]
fn table_round_trips_through_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("table.txt");
    run_ok(&["table", "--n-max", "8", "--mode", "exact", "--out", path.to_str().unwrap()]);
    let t = ComplexityTable::load_from_path(&path).unwrap();
    assert_eq!(
        t.e_exact(8, 4).unwrap(),
        &BigRational::new(BigInt::from(229), BigInt::from(70))
    );
    assert_eq!(t.optimal_split(8, 4).unwrap(), 4);
    // The stdout variant carries the same rows.
    let out = run_ok(&["table", "--n-max", "6", "--mode", "exact"]);
    assert!(out.starts_with("binval-etable v1 exact 6"));
    assert!(out.contains("6 3 57/20 3"));
}

#[test]
fn simulate_is_deterministic_per_seed() {
    let args = ["simulate", "--n", "8", "--runs", "2000", "--seed", "5"];
    let a = run_ok(&args);
    let b = run_ok(&args);
    assert_eq!(a, b, "same seed must reproduce the same report");
    let c = run_ok(&["simulate", "--n", "8", "--runs", "2000", "--seed", "6"]);
    assert_ne!(a, c, "different seeds should not collide");
    assert!(a.contains("table average"));
}

#[test]
fn emitted_logs_are_internally_consistent() {
    let dir = tempfile::tempdir().unwrap();
    let logs = dir.path().join("logs");
    run_ok(&[
        "simulate", "--n", "8", "--runs", "5", "--seed", "3",
        "--emit-logs", logs.to_str().unwrap(),
    ]);
    let mut files: Vec<_> = fs::read_dir(&logs).unwrap().map(|e| e.unwrap().path()).collect();
    files.sort();
    assert_eq!(files.len(), 5);
    for file in files {
        let text = fs::read_to_string(&file).unwrap();
        let mut queries: Vec<(BitString, MatchMask)> = Vec::new();
        for line in text.lines() {
            let (bits, mask) = line.split_once('\t').expect("bits<TAB>mask");
            queries.push((bits.parse().unwrap(), mask.parse().unwrap()));
        }
        assert!(!queries.is_empty());
        // The run ends the moment the optimum is queried.
        assert!(queries.last().unwrap().1.all_matched());
        for (_, m) in &queries[..queries.len() - 1] {
            assert!(!m.all_matched());
        }
        // Mask geometry must mirror query geometry, pair by pair.
        for i in 0..queries.len() {
            for j in i + 1..queries.len() {
                let (bi, mi) = &queries[i];
                let (bj, mj) = &queries[j];
                assert_eq!(mi.distance(mj).unwrap(), hamming(bi, bj).unwrap());
            }
        }
    }
}

#[test]
fn plot_emits_the_requested_rows() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("plots.dat");
    run_ok(&["plot", "--n-from", "2", "--n-to", "64", "--out", path.to_str().unwrap()]);
    let text = fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "n bbc lower upper ceil");
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split_whitespace().collect()).collect();
    assert_eq!(rows.len(), 63);
    for (i, row) in rows.iter().enumerate() {
        assert_eq!(row.len(), 5);
        let n: usize = row[0].parse().unwrap();
        assert_eq!(n, i + 2);
        let vals: Vec<f64> = row[1..].iter().map(|s| s.parse().unwrap()).collect();
        let (bbc, lower, upper, ceil) = (vals[0], vals[1], vals[2], vals[3]);
        assert!(lower < upper);
        assert!(bbc <= upper + 1e-9, "n = {n}");
        if n >= 4 {
            assert!(bbc + 1e-9 >= lower, "n = {n}");
            assert!(bbc <= ceil + 1e-9, "n = {n}");
        }
    }
    // Header-only output for an empty range.
    let empty = run_ok(&["plot", "--n-from", "5", "--n-to", "4"]);
    assert_eq!(empty.trim(), "n bbc lower upper ceil");
}

#[test]
fn oracle_reports_match_and_mismatch_verdicts() {
    let ok = run_ok(&["oracle", "--n", "3"]);
    assert!(ok.contains("all distances match"));
    assert!(!ok.contains("MISMATCH"));
    let four = run_ok(&["oracle", "--n", "4", "--budget-secs", "120"]);
    assert!(four.contains("MISMATCH"));
    assert!(four.contains("7/3"));
    assert!(four.contains("13/6"));
    assert!(four.contains("search exceeds table"));
}

#[test]
fn selftest_passes() {
    let out = run_ok(&["selftest"]);
    assert!(out.contains("selftest: 10 checks passed"));
    assert!(!out.contains("FAILED"));
}

#[test]
fn usage_and_computation_failures_use_distinct_exit_codes() {
    // Unknown flag: usage error, exit 2 (clap convention).
    let out = run(&["bbc", "--frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
    // Domain failure: exit 1 with a diagnostic.
    let out = run(&["bbc", "--n", "0"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!out.stderr.is_empty());
    let out = run(&["table", "--n-max", "0"]);
    assert_eq!(out.status.code(), Some(1));
    // Exact mode beyond its cap is a resource error, not a hang.
    let out = run(&["bbc", "--n", "60", "--mode", "exact"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn table_files_are_validated_against_the_request() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("exact8.txt");
    run_ok(&["table", "--n-max", "8", "--mode", "exact", "--out", path.to_str().unwrap()]);
    let p = path.to_str().unwrap();
    // Mode clash.
    let out = run(&["bbc", "--n", "8", "--mode", "f64", "--table", p]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--mode"));
    // Coverage clash.
    let out = run(&["bbc", "--n", "12", "--table", p]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("covers n <= 8"));
    // A matching request goes through.
    assert_eq!(run_ok(&["bbc", "--n", "8", "--table", p]).trim(), "561/128");
}

#[test]
fn cache_directory_is_created_used_and_healed() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache");
    let run_cached = |args: &[&str]| {
        let out = bin()
            .env("BINVAL_TABLE_CACHE", cache.as_os_str())
            .args(args)
            .output()
            .unwrap();
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        String::from_utf8(out.stdout).unwrap()
    };
    let first = run_cached(&["bbc", "--n", "10"]);
    let cached_file = cache.join("etable-exact-n10.txt");
    assert!(cached_file.exists(), "cache file should appear");
    let second = run_cached(&["bbc", "--n", "10"]);
    assert_eq!(first, second);
    // A damaged cache entry is ignored and rebuilt rather than fatal.
    fs::write(&cached_file, "binval-etable v1 exact 10\ngarbage\n").unwrap();
    let healed = run_cached(&["bbc", "--n", "10"]);
    assert_eq!(first, healed);
    let reloaded = ComplexityTable::load_from_path(&cached_file).unwrap();
    assert_eq!(reloaded.n_max(), 10);
}
