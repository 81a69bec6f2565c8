//! End-to-end checks of the command-line binary: emission formats,
//! flag/config precedence, determinism, and the exit-code contract
//! (0 success, 1 I/O failure, 2 configuration error, 3 simulation abort).

use std::path::Path;
use std::process::{Command, Output};

fn vvmsim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vvmsim"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("stdout is UTF-8")
}

fn stderr_of(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("stderr is UTF-8")
}

fn assert_exit(out: &Output, code: i32, context: &str) {
    assert_eq!(
        out.status.code(),
        Some(code),
        "{context}: expected exit {code}, got {:?}; stderr: {}",
        out.status.code(),
        stderr_of(out)
    );
}

#[test]
fn run_reports_json_on_stdout() {
    let out = vvmsim(&[
        "run",
        "--kernel",
        "matmul",
        "--n",
        "32",
        "--tlb-entries",
        "16",
        "--mode",
        "vm",
    ]);
    assert_exit(&out, 0, "plain run");
    let report: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    assert_eq!(report["kernel"], "matmul");
    assert_eq!(report["n"], 32);
    assert_eq!(report["tlb_entries"], 16);
    assert_eq!(report["mode"], "vm");
    assert!(report["total_cycles"].as_u64().unwrap() > 0);
    assert!(report["counters"]["vector_translation_requests"]
        .as_u64()
        .unwrap()
        > 0);
}

#[test]
fn run_writes_csv_file_with_out_flag() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.csv");
    let out = vvmsim(&[
        "run",
        "--kernel",
        "axpy",
        "--n",
        "256",
        "--emit",
        "csv",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_exit(&out, 0, "csv run with --out");
    assert!(stdout_of(&out).is_empty(), "--out must not echo to stdout");
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("key,value\n"), "got: {text}");
    assert!(text.contains("total_cycles,"));
    assert!(text.contains("kernel,axpy"));
}

#[test]
fn identical_invocations_print_identical_bytes() {
    let args = [
        "run", "--kernel", "gather", "--rows", "40", "--nnz", "7", "--seed", "42",
    ];
    let first = vvmsim(&args);
    let second = vvmsim(&args);
    assert_exit(&first, 0, "seeded gather");
    assert_eq!(
        first.stdout, second.stdout,
        "same invocation produced different reports"
    );
}

#[test]
fn sweep_prints_pinned_csv_columns() {
    let out = vvmsim(&["sweep", "--kernels", "matmul32", "--tlb", "2,16"]);
    assert_exit(&out, 0, "small sweep");
    let text = stdout_of(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(
        lines[0],
        "kernel,n,tlb_entries,total_pct,cva6_mmu_pct,ara_mmu_pct,other_pct,total_cycles,baseline_cycles"
    );
    assert_eq!(lines.len(), 3, "header plus one row per TLB size");
    assert!(lines[1].starts_with("matmul,32,2,"));
    assert!(lines[2].starts_with("matmul,32,16,"));
}

#[test]
fn default_sweep_covers_the_full_grid() {
    let out = vvmsim(&["sweep"]);
    assert_exit(&out, 0, "default sweep");
    let text = stdout_of(&out);
    assert_eq!(
        text.lines().count(),
        22,
        "3 kernels x 7 TLB sizes plus the header"
    );
}

#[test]
fn sweep_emits_json_rows() {
    let out = vvmsim(&[
        "sweep", "--kernels", "axpy512", "--tlb", "2,8", "--emit", "json",
    ]);
    assert_exit(&out, 0, "json sweep");
    let rows: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    let rows = rows.as_array().unwrap();
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0]["tlb_entries"], 2);
    assert!(rows[0]["baseline_cycles"].as_u64().unwrap() > 0);
}

#[test]
fn trace_dumps_one_access_per_line() {
    let out = vvmsim(&["trace", "--kernel", "matmul32"]);
    assert_exit(&out, 0, "trace dump");
    let text = stdout_of(&out);
    assert!(text.lines().count() > 100, "matmul-32 trace is not tiny");
    for line in text.lines().take(50) {
        let fields: Vec<&str> = line.split(' ').collect();
        assert_eq!(fields.len(), 4, "line format is `kind vaddr bytes source`");
        assert!(matches!(fields[0], "load" | "store"), "line: {line}");
        assert!(fields[1].starts_with("0x"), "line: {line}");
        assert!(matches!(fields[3], "scalar" | "vector"), "line: {line}");
    }
}

#[test]
fn config_file_drives_the_run_and_flags_override_it() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.toml");
    std::fs::write(
        &path,
        "seed = 9\n[kernel]\nname = \"indexed_gather\"\nrows = 50\nnnz_per_row = 5\n[tlb]\nnum_entries = 8\n",
    )
    .unwrap();

    let out = vvmsim(&["run", "--config", path.to_str().unwrap()]);
    assert_exit(&out, 0, "config-file run");
    let report: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    assert_eq!(report["kernel"], "gather");
    assert_eq!(report["n"], 50);
    assert_eq!(report["tlb_entries"], 8);
    assert_eq!(report["seed"], 9);

    let out = vvmsim(&[
        "run",
        "--config",
        path.to_str().unwrap(),
        "--tlb-entries",
        "32",
        "--seed",
        "11",
    ]);
    assert_exit(&out, 0, "config-file run with overrides");
    let report: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    assert_eq!(report["tlb_entries"], 32, "flag must beat the file");
    assert_eq!(report["seed"], 11);
}

#[test]
fn configuration_errors_exit_2() {
    let cases: &[&[&str]] = &[
        &["run", "--kernel", "matmul32", "--tlb-entries", "7"],
        &["run", "--kernel", "fft64"],
        &["run", "--kernel", "matmul64", "--n", "32"],
        &["run", "--mode", "paravirt"],
        &["run", "--mode", "bm", "--demand-paging"],
        &["sweep", "--tlb", "2,3"],
        &["run", "--frobnicate"],
    ];
    for args in cases {
        let out = vvmsim(args);
        assert_exit(&out, 2, &format!("args {args:?}"));
        assert!(
            !stderr_of(&out).is_empty(),
            "args {args:?}: config errors must explain themselves on stderr"
        );
    }
}

#[test]
fn malformed_config_file_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    std::fs::write(&path, "[tlb]\nnum_entries = 3\n").unwrap();
    let out = vvmsim(&["run", "--config", path.to_str().unwrap()]);
    assert_exit(&out, 2, "non-power-of-two TLB size from file");

    std::fs::write(&path, "seed = \"not a number\"\n").unwrap();
    let out = vvmsim(&["run", "--config", path.to_str().unwrap()]);
    assert_exit(&out, 2, "type error in config file");
}

#[test]
fn io_failures_exit_1() {
    let out = vvmsim(&["run", "--config", "/nonexistent/vvmsim.toml"]);
    assert_exit(&out, 1, "unreadable config");
    assert!(
        stderr_of(&out).contains("/nonexistent/vvmsim.toml"),
        "I/O errors must name the path; stderr: {}",
        stderr_of(&out)
    );

    let out = vvmsim(&[
        "run",
        "--kernel",
        "axpy",
        "--out",
        "/nonexistent-dir/report.json",
    ]);
    assert_exit(&out, 1, "unwritable output");
    assert!(stderr_of(&out).contains("/nonexistent-dir/report.json"));
}

#[test]
fn livelocked_replay_aborts_with_3() {
    // A zero retry budget turns the first demand-paging fault into a
    // livelock abort: the run cannot make forward progress by its own
    // rules, so it must die with the abort code, not a success report.
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("livelock.toml");
    std::fs::write(
        &path,
        "demand_paging = true\n[kernel]\nname = \"axpy\"\nn = 64\n[fault]\nretry_bound = 0\n",
    )
    .unwrap();
    let out = vvmsim(&["run", "--config", path.to_str().unwrap()]);
    assert_exit(&out, 3, "livelocked run");
    assert!(
        stderr_of(&out).contains("livelock"),
        "abort diagnostics must say why; stderr: {}",
        stderr_of(&out)
    );
}

#[test]
fn replacement_policy_flag_changes_the_simulation() {
    let plru = vvmsim(&[
        "run", "--kernel", "matmul128", "--tlb-entries", "64", "--policy", "plru",
    ]);
    let lru = vvmsim(&[
        "run", "--kernel", "matmul128", "--tlb-entries", "64", "--policy", "true-lru",
    ]);
    assert_exit(&plru, 0, "plru run");
    assert_exit(&lru, 0, "true-lru run");
    let p: serde_json::Value = serde_json::from_str(&stdout_of(&plru)).unwrap();
    let l: serde_json::Value = serde_json::from_str(&stdout_of(&lru)).unwrap();
    assert_ne!(
        p["counters"]["vector_tlb_misses"], l["counters"]["vector_tlb_misses"],
        "at 64 entries the two policies must diverge on this kernel"
    );
}

#[test]
fn run_help_documents_the_interface() {
    let out = vvmsim(&["run", "--help"]);
    assert_exit(&out, 0, "help");
    let text = stdout_of(&out);
    for flag in [
        "--kernel",
        "--n",
        "--tlb-entries",
        "--mode",
        "--config",
        "--emit",
        "--out",
        "--seed",
    ] {
        assert!(text.contains(flag), "help must document {flag}");
    }
}

#[test]
fn preseeded_default_config_matches_builtin_defaults() {
    // The repository ships a fully spelled-out config; loading it must be
    // indistinguishable from running with no config at all.
    let shipped = Path::new(env!("CARGO_MANIFEST_DIR"))
        .parent()
        .unwrap()
        .parent()
        .unwrap()
        .join("configs/default.toml");
    let with_file = vvmsim(&["run", "--config", shipped.to_str().unwrap()]);
    let without = vvmsim(&["run"]);
    assert_exit(&with_file, 0, "shipped default config");
    assert_eq!(
        with_file.stdout,
        without.stdout,
        "configs/default.toml drifted from the built-in defaults"
    );
}
