use std::path::Path;
use std::process::{Command, Output};

use rislab::harness::{ElementTable, ExportFormat, IterationTable};
use rislab::scenario::Scenario;

fn rislab(args: &[&str], scenario_dir: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_rislab"));
    cmd.args(args).env_remove("RISLAB_SCENARIO_DIR");
    if let Some(dir) = scenario_dir {
        cmd.env("RISLAB_SCENARIO_DIR", dir).current_dir(std::env::temp_dir());
    }
    cmd.output().expect("binary runs")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

/// The TOML between the resolved-scenario markers on stderr, and its hash.
fn printed_scenario(o: &Output) -> (Scenario, String) {
    let text = stderr(o);
    let (head, rest) = text.split_once('\n').unwrap();
    let hash = head.strip_prefix("# resolved scenario, sha256 ").expect("marker line").to_string();
    let body = rest.split("# end of scenario").next().unwrap();
    (Scenario::from_toml_str(body).unwrap(), hash)
}

const SMALL: [&str; 8] = ["--n", "16", "--t", "3", "--k", "20", "--seed", "5"];

#[test]
fn run_prints_summary_and_trace() {
    let o = rislab(&[&["run"], &SMALL[..]].concat(), None);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = String::from_utf8(o.stdout).unwrap();
    assert!(out.starts_with("algorithm        ce\nN                16\n"));
    assert!(out.contains("\n# kind=trace scenario_hash="));
    assert!(out.contains("eval_idx,snr_db,best_db,config_bits\n"));
}

#[test]
fn printed_scenario_reproduces_the_run() {
    let first = rislab(&[&["run"], &SMALL[..]].concat(), None);
    let (scenario, hash) = printed_scenario(&first);

    let mut expected = Scenario::default();
    expected.optimizer.t = 3;
    expected.optimizer.k = 20;
    expected.run.seed = 5;
    let expected = expected.with_elements(16);
    assert_eq!(scenario, expected);
    assert_eq!(hash, expected.hash_hex());

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("printed.scn");
    std::fs::write(&path, scenario.to_toml_string()).unwrap();
    let again = rislab(&["run", "--scenario", path.to_str().unwrap()], None);
    assert!(again.status.success(), "{}", stderr(&again));
    assert_eq!(again.stdout, first.stdout);
    assert_eq!(printed_scenario(&again).1, hash);
}

#[test]
fn scenario_directory_from_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("default.scn"), "[ris]\nelements = 9\n[run]\nseed = 99\n").unwrap();
    std::fs::write(dir.path().join("tiny.scn"), "[ris]\nelements = 4\n[optimizer]\nT = 2\nK = 10\n").unwrap();

    let o = rislab(&["run"], Some(dir.path()));
    assert!(o.status.success(), "{}", stderr(&o));
    let (s, _) = printed_scenario(&o);
    assert_eq!((s.ris.elements, s.run.seed), (9, 99));

    let o = rislab(&["run", "--scenario", "tiny.scn"], Some(dir.path()));
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(printed_scenario(&o).0.ris.elements, 4);

    let o = rislab(&["run", "--scenario", "missing.scn"], Some(dir.path()));
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn builtin_default_scenario_without_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let o = rislab(&["run", "--scenario", "default.scn", "--n", "8", "--t", "2", "--k", "10"], Some(dir.path()));
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(printed_scenario(&o).0.radio, Scenario::default().radio);
}

#[test]
fn sweeps_write_files_that_read_back() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("n.json");
    let o = rislab(
        &["sweep-n", "--n", "4,8", "--t", "2", "--k", "10", "--trials", "3", "--algo", "ce,sa,none", "--format", "json", "--out", json.to_str().unwrap()],
        None,
    );
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(String::from_utf8_lossy(&o.stdout).trim(), format!("wrote {}", json.display()));
    let t = ElementTable::import(ExportFormat::Json, &json).unwrap();
    assert_eq!(t.rows.len(), 6);
    assert_eq!(t.metadata.kind, "sweep_elements");

    let csv = dir.path().join("it.csv");
    let o = rislab(
        &["sweep-iters", "--n", "8", "--t", "2", "--k", "10", "--trials", "3", "--algo", "ce,mh", "--out", csv.to_str().unwrap()],
        None,
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let t = IterationTable::import(ExportFormat::Csv, &csv).unwrap();
    assert_eq!(t.rows.iter().map(|r| r.evals).collect::<Vec<_>>(), vec![0, 10, 20, 0, 10, 20]);
}

#[test]
fn oracle_check_passes_and_guards_large_surfaces() {
    let o = rislab(&["oracle-check", "--n", "10", "--seeds", "20"], None);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(String::from_utf8_lossy(&o.stdout).contains("PASS"));

    let o = rislab(&["oracle-check", "--n", "20"], None);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("--force"));
}

#[test]
fn timing_reports_every_algorithm() {
    let o = rislab(&["timing", "--n", "8", "--t", "2", "--k", "10", "--trials", "2", "--algo", "ce,sa,mh,none"], None);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = String::from_utf8(o.stdout).unwrap();
    assert_eq!(out.lines().next(), Some("N,algo,mean_seconds,runs"));
    assert_eq!(out.lines().count(), 4);
}

#[test]
fn usage_errors_exit_2_and_name_the_flag() {
    for (args, flag) in [
        (&["run", "--beta", "1.5"][..], "--beta"),
        (&["run", "--algo", "ce,sa"][..], "--algo"),
        (&["run", "--n", "4,8"][..], "--n"),
        (&["run", "--noise-std", "-1"][..], "--noise-std"),
        (&["run", "--evaluator", "telepathy"][..], "--evaluator"),
        (&["run", "--remeasure", "0"][..], "--remeasure"),
    ] {
        let o = rislab(args, None);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", stderr(&o));
        assert!(stderr(&o).contains(flag), "{args:?}: {}", stderr(&o));
    }
    assert_eq!(rislab(&["frobnicate"], None).status.code(), Some(2));
    assert_eq!(rislab(&["run", "--seed", "x"], None).status.code(), Some(2));
}

#[test]
fn runtime_errors_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.scn");
    std::fs::write(&bad, "[ris]\nelements = \"many\"\n").unwrap();
    assert_eq!(rislab(&["run", "--scenario", bad.to_str().unwrap()], None).status.code(), Some(1));
    let o = rislab(&["run", "--n", "4", "--evaluator", "recorded:/nonexistent/table.csv"], None);
    assert_eq!(o.status.code(), Some(1), "{}", stderr(&o));
}

#[test]
fn help_exits_cleanly() {
    let o = rislab(&["--help"], None);
    assert!(o.status.success());
    let out = String::from_utf8(o.stdout).unwrap();
    for cmd in ["run", "sweep-iters", "sweep-n", "oracle-check", "timing"] {
        assert!(out.contains(cmd), "{cmd} missing from help");
    }
}
