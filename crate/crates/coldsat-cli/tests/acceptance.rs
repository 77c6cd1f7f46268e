//! CLI acceptance: output conventions, exit codes, flag plumbing, and the
//! determinism criterion (identical flags => identical counters).

use coldsat::formula::{check_model, parse_dimacs_str, write_dimacs_string, Model};
use coldsat::harness::gen::{oracle_suite, pigeonhole, random_3sat};
use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn coldsat_bin() -> &'static str {
    env!("CARGO_BIN_EXE_coldsat")
}

fn run(args: &[&str]) -> Output {
    Command::new(coldsat_bin()).args(args).output().expect("binary runs")
}

fn scratch_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("coldsat-cli-{tag}-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn write_cnf(dir: &Path, name: &str, content: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, content).unwrap();
    path
}

fn stdout_str(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

/// Extracts the model from `v` lines and the counters from the stats line.
fn parse_solver_output(text: &str) -> (Option<Vec<i32>>, HashMap<String, u64>) {
    let mut model = Vec::new();
    let mut saw_model = false;
    let mut stats = HashMap::new();
    for line in text.lines() {
        if let Some(rest) = line.strip_prefix("v ") {
            saw_model = true;
            model.extend(rest.split_whitespace().map(|t| t.parse::<i32>().unwrap()));
        } else if let Some(rest) = line.strip_prefix("c stats ") {
            for field in rest.split_whitespace() {
                let (key, value) = field.split_once('=').expect("key=value stats");
                stats.insert(key.to_string(), value.parse().unwrap());
            }
        }
    }
    if saw_model {
        assert_eq!(model.pop(), Some(0), "model lines are 0-terminated");
        (Some(model), stats)
    } else {
        (None, stats)
    }
}

#[test]
fn solve_sat_conventions() {
    let dir = scratch_dir("sat");
    let path = write_cnf(&dir, "sat.cnf", "p cnf 2 2\n1 -2 0\n2 0\n");
    let out = run(&["solve", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(10));
    let text = stdout_str(&out);
    assert!(text.contains("s SATISFIABLE"), "{text}");
    let (model, stats) = parse_solver_output(&text);
    let ints = model.expect("SAT prints a model");
    let f = parse_dimacs_str("p cnf 2 2\n1 -2 0\n2 0\n").unwrap().formula;
    let values: Vec<bool> = {
        let mut v = vec![false; 2];
        for i in ints {
            v[(i.unsigned_abs() - 1) as usize] = i > 0;
        }
        v
    };
    assert!(check_model(&f, &Model::new(values)).unwrap());
    assert!(stats.contains_key("conflicts") && stats.contains_key("decisions"));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn solve_unsat_unknown_and_error_exit_codes() {
    let dir = scratch_dir("codes");
    let unsat = write_cnf(&dir, "unsat.cnf", "p cnf 1 2\n1 0\n-1 0\n");
    let out = run(&["solve", unsat.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(20));
    assert!(stdout_str(&out).contains("s UNSATISFIABLE"));

    let hard = write_cnf(&dir, "hard.cnf", &write_dimacs_string(&random_3sat(60, 256, 1)));
    let out = run(&["solve", hard.to_str().unwrap(), "--conflict-budget", "1"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout_str(&out).contains("s UNKNOWN"));

    let out = run(&["solve", dir.join("missing.cnf").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!String::from_utf8_lossy(&out.stderr).is_empty());

    let bad = write_cnf(&dir, "bad.cnf", "p cnf 2 1\n3 0\n");
    let out = run(&["solve", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("literal 3"));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn flag_validation() {
    let dir = scratch_dir("flags");
    let path = write_cnf(&dir, "t.cnf", "p cnf 1 1\n1 0\n");
    let p = path.to_str().unwrap();

    let out = run(&["solve", p, "--no-such-flag"]);
    assert_ne!(out.status.code(), Some(0));
    assert!(
        String::from_utf8_lossy(&out.stderr).contains("--help")
            || String::from_utf8_lossy(&out.stderr).contains("usage")
    );

    // conflicting warm-restart flags
    let out = run(&["solve", p, "--warm", "ema", "--luby-unit", "50"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--luby-unit"));

    // --cold none cannot be combined
    let out = run(&["solve", p, "--cold", "none,fo"]);
    assert_eq!(out.status.code(), Some(1));

    // portfolio worker count
    let out = run(&["portfolio", p, "--workers", "0"]);
    assert_eq!(out.status.code(), Some(1));

    // every documented flag parses
    let out = run(&[
        "solve",
        p,
        "--seed",
        "3",
        "--cold",
        "fo,fp,fc",
        "--cold-interval",
        "100000",
        "--fc-lbd",
        "3",
        "--warm",
        "luby",
        "--luby-unit",
        "64",
        "--random-init-order",
        "--random-init-phase",
        "--conflict-budget",
        "100000",
        "--time-limit",
        "5",
    ]);
    assert_eq!(out.status.code(), Some(10));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn help_lists_documented_flags_with_defaults() {
    let out = run(&["solve", "--help"]);
    let text = stdout_str(&out);
    for flag in [
        "--seed",
        "--cold",
        "--cold-interval",
        "--fc-lbd",
        "--warm",
        "--luby-unit",
        "--random-init-order",
        "--random-init-phase",
        "--conflict-budget",
        "--time-limit",
    ] {
        assert!(text.contains(flag), "help is missing {flag}:\n{text}");
    }
    for default in ["default: fo", "default: 400000", "default: ema", "default: 0"] {
        assert!(text.contains(default), "help is missing `{default}`:\n{text}");
    }
    let out = run(&["portfolio", "--help"]);
    let text = stdout_str(&out);
    for flag in ["--workers", "--share", "--budget-literals", "--budget-window-ms"] {
        assert!(text.contains(flag), "portfolio help is missing {flag}");
    }
}

/// Determinism criterion: identical flags on 50 instances produce identical
/// conflict/decision/restart counters across two separate processes.
#[test]
fn a08_cmd_solve_is_deterministic() {
    let dir = scratch_dir("det");
    let instances = oracle_suite(50, 0xdee);
    let args = [
        "--seed",
        "7",
        "--warm",
        "luby",
        "--luby-unit",
        "32",
        "--cold",
        "fo,fp,fc",
        "--cold-interval",
        "50",
        "--random-init-order",
        "--random-init-phase",
    ];
    for (i, f) in instances.iter().enumerate() {
        let path = write_cnf(&dir, &format!("inst{i}.cnf"), &write_dimacs_string(f));
        let mut argv = vec!["solve", path.to_str().unwrap()];
        argv.extend_from_slice(&args);
        let first = run(&argv);
        let second = run(&argv);
        assert_eq!(first.status.code(), second.status.code(), "instance {i}");
        let (_, stats_a) = parse_solver_output(&stdout_str(&first));
        let (_, stats_b) = parse_solver_output(&stdout_str(&second));
        for key in ["conflicts", "decisions", "propagations", "warm_restarts", "cold_restarts"] {
            assert_eq!(stats_a.get(key), stats_b.get(key), "{key} differs on instance {i}");
        }
    }
    println!("[ACCEPT] a08 determinism: PASS (50 instances, identical counters twice)");
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn portfolio_command_conventions() {
    let dir = scratch_dir("portfolio");
    let sat = write_cnf(&dir, "sat.cnf", &write_dimacs_string(&random_3sat(20, 60, 2)));
    let unsat = write_cnf(&dir, "unsat.cnf", &write_dimacs_string(&pigeonhole(4, 3)));

    let out = run(&["portfolio", sat.to_str().unwrap(), "--workers", "4", "--share", "2"]);
    assert_eq!(out.status.code(), Some(10));
    let text = stdout_str(&out);
    assert!(text.contains("c winner "), "{text}");
    assert!(text.contains("c worker 3 "), "per-worker stats expected:\n{text}");

    let json = dir.join("portfolio.json");
    let out = run(&[
        "portfolio",
        unsat.to_str().unwrap(),
        "--workers",
        "2",
        "--share",
        "3",
        "--json",
        json.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(20));
    let parsed: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(parsed["worker_stats"].as_array().unwrap().len(), 2);
    assert_eq!(parsed["status"], "UNSATISFIABLE");

    // k = 1 without sharing matches the sequential answer.
    let out = run(&["portfolio", sat.to_str().unwrap(), "--workers", "1", "--share", "off"]);
    assert_eq!(out.status.code(), Some(10));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn suite_command_gate_and_reports() {
    let dir = scratch_dir("suite");
    let sat = write_cnf(&dir, "a.cnf", "p cnf 2 2\n1 -2 0\n2 0\n");
    let unsat = write_cnf(&dir, "b.cnf", "p cnf 1 2\n1 0\n-1 0\n");
    let manifest = dir.join("manifest.txt");
    std::fs::write(&manifest, format!("{} sat\n{} unsat\n", sat.display(), unsat.display()))
        .unwrap();
    let csv = dir.join("suite.csv");
    let json = dir.join("suite.json");
    let out = run(&[
        "suite",
        manifest.to_str().unwrap(),
        "--cutoff",
        "10",
        "--csv",
        csv.to_str().unwrap(),
        "--json",
        json.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout_str(&out);
    assert!(text.contains("c summary sat=1 unsat=1 solved=2"), "{text}");
    let csv_text = std::fs::read_to_string(&csv).unwrap();
    assert!(csv_text
        .starts_with("instance,seed,status,time,conflicts,decisions,warm_restarts,cold_restarts"));
    assert_eq!(csv_text.lines().count(), 3);
    let json_text = std::fs::read_to_string(&json).unwrap();
    assert!(serde_json::from_str::<serde_json::Value>(&json_text).is_ok());

    // Violated annotation => nonzero exit.
    std::fs::write(&manifest, format!("{} unsat\n", sat.display())).unwrap();
    let out = run(&["suite", manifest.to_str().unwrap(), "--cutoff", "10"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("violation"));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn variation_command_reports() {
    let dir = scratch_dir("variation");
    let path = write_cnf(&dir, "v.cnf", &write_dimacs_string(&random_3sat(20, 85, 4)));
    let csv = dir.join("variation.csv");
    let json = dir.join("variation.json");
    let out = run(&[
        "variation",
        path.to_str().unwrap(),
        "--seeds",
        "5",
        "--mode",
        "order",
        "--cutoff",
        "30",
        "--csv",
        csv.to_str().unwrap(),
        "--json",
        json.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout_str(&out);
    assert!(text.contains("c baseline status=SAT") || text.contains("c baseline status=UNSAT"));
    assert!(text.contains("ge2x="), "{text}");
    // CSV: header + baseline + 5 samples
    let csv_text = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(csv_text.lines().count(), 7);

    let out = run(&[
        "variation",
        path.to_str().unwrap(),
        "--seeds",
        "3",
        "--mode",
        "phase",
        "--cutoff",
        "30",
    ]);
    assert_eq!(out.status.code(), Some(0));
    std::fs::remove_dir_all(&dir).ok();
}

/// An interrupt terminates the solve cooperatively: stats still print and
/// the exit code is the UNKNOWN convention (0).
#[test]
#[cfg(unix)]
fn sigint_cancels_and_flushes() {
    let dir = scratch_dir("sigint");
    // Large enough to run for many seconds.
    let path = write_cnf(&dir, "big.cnf", &write_dimacs_string(&random_3sat(350, 1491, 3)));
    let child = Command::new(coldsat_bin())
        .args(["solve", path.to_str().unwrap()])
        .stdout(std::process::Stdio::piped())
        .spawn()
        .unwrap();
    std::thread::sleep(std::time::Duration::from_millis(800));
    let _ = Command::new("kill").args(["-INT", &child.id().to_string()]).status().unwrap();
    let out = child.wait_with_output().unwrap();
    assert_eq!(out.status.code(), Some(0), "interrupt maps to the unknown exit code");
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("s UNKNOWN"), "{text}");
    assert!(text.contains("c stats "), "stats flush on interrupt: {text}");
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn fc_lbd_flag_reaches_the_engine() {
    let dir = scratch_dir("fclbd");
    // php(7,6) searches for thousands of conflicts, so p = 50 must fire.
    let path = write_cnf(&dir, "f.cnf", &write_dimacs_string(&pigeonhole(7, 6)));
    // Table-3-style configuration: FC keeping LBD <= 3, cold restarts forced.
    let out = run(&[
        "solve",
        path.to_str().unwrap(),
        "--cold",
        "fc",
        "--fc-lbd",
        "3",
        "--cold-interval",
        "50",
        "--warm",
        "luby",
        "--luby-unit",
        "16",
    ]);
    assert_eq!(out.status.code(), Some(20));
    let (_, stats) = parse_solver_output(&stdout_str(&out));
    assert!(stats["cold_restarts"] > 0, "cold restarts should fire at this interval");
    assert!(stats["deleted"] > 0, "FC deletes learnt clauses above the threshold");
    std::fs::remove_dir_all(&dir).ok();
}
