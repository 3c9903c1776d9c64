use heis_overdet::lab::SuiteReport;
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_heis-overdet"));
    c.env_remove("HEIS_OVERDET_THREADS");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("terminated by a signal")
}

fn read(p: &Path) -> Vec<u8> {
    fs::read(p).unwrap_or_else(|e| panic!("{}: {e}", p.display()))
}

#[test]
fn help_and_usage_errors() {
    assert_eq!(code(&run(&["--help"])), 0);
    assert_eq!(code(&run(&["--version"])), 0);
    assert_eq!(code(&run(&[])), 2);
    assert_eq!(code(&run(&["frobnicate"])), 2);
    assert_eq!(code(&run(&["solve", "--h", "abc"])), 2);
    assert_eq!(code(&run(&["check", "pohozaev", "--alpha", "0"])), 2);
    assert_eq!(code(&run(&["check", "pohozaev", "--alpha", "-1"])), 2);
    assert_eq!(code(&run(&["verify", "--identity", "magikuno", "--n", "2", "--alpha", "2"])), 2);
    assert_eq!(code(&run(&["verify", "--identity", "nope"])), 2);
    assert_eq!(code(&run(&["check", "meanvalue", "--field", "pole", "--pole-t", "0.5"])), 2);
}

#[test]
fn verify_writes_a_valid_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let o = run(&[
        "verify", "--identity", "cyln", "--n", "2", "--alpha", "3/2", "--num-points", "40",
        "--out", out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let report = SuiteReport::from_json(&fs::read_to_string(&out).unwrap()).unwrap();
    assert!(report.pass);
    assert_eq!(report.reports.len(), 1);
    assert_eq!(report.reports[0].alpha, Some(1.5));
    assert_eq!(report.reports[0].num_points, 40);
}

#[test]
fn tolerance_failure_exits_one() {
    let o = run(&["verify", "--identity", "ualpha_pde", "--n", "1", "--alpha", "3", "--num-points", "40", "--tolerance", "1e-300"]);
    assert_eq!(code(&o), 1);
    let report = SuiteReport::from_json(&String::from_utf8(o.stdout).unwrap()).unwrap();
    assert!(!report.pass);
}

#[test]
fn check_commands_print_json() {
    for args in [
        &["check", "beta", "--n", "2"][..],
        &["check", "pohozaev", "--n", "1", "--alpha", "4"],
        &["check", "average", "--n", "2", "--alpha", "3"],
        &["check", "meanvalue", "--n", "1", "--field", "pole", "--pole-t", "2"],
    ] {
        let o = run(args);
        assert_eq!(code(&o), 0, "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
        let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
        assert_eq!(v["pass"], serde_json::Value::Bool(true), "{args:?}");
    }
}

fn solve_into(dir: &Path, threads: Option<&str>) -> Output {
    let mut c = bin();
    c.args(["solve", "--alpha", "2", "--epsilon", "0.1", "--h", "1/32", "--out-dir"])
        .arg(dir)
        .args(["--prefix", "run"]);
    if let Some(t) = threads {
        c.env("HEIS_OVERDET_THREADS", t);
    }
    c.output().unwrap()
}

#[test]
fn solve_is_byte_identical_across_runs_and_thread_counts() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let c = tempfile::tempdir().unwrap();
    assert_eq!(code(&solve_into(a.path(), None)), 0);
    assert_eq!(code(&solve_into(b.path(), Some("1"))), 0);
    assert_eq!(code(&solve_into(c.path(), Some("3"))), 0);
    for name in ["run_solution.csv", "run_trace.csv", "run.json"] {
        let first = read(&a.path().join(name));
        assert!(!first.is_empty());
        assert_eq!(first, read(&b.path().join(name)), "{name}");
        assert_eq!(first, read(&c.path().join(name)), "{name}");
    }
    let trace = String::from_utf8(read(&a.path().join("run_trace.csv"))).unwrap();
    assert!(trace.starts_with("arc_param,q\n"));
    assert_eq!(trace.lines().count(), 257);
}

#[test]
fn bad_thread_setting_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&solve_into(dir.path(), Some("0"))), 2);
    assert_eq!(code(&solve_into(dir.path(), Some("many"))), 2);
}

#[test]
fn config_file_supplies_defaults_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.conf");
    fs::write(
        &cfg,
        "# shared\nseed = 9\n\n[verify]\nidentity = dhrho\nn = 2\nnum-points = 17 # short run\n; full-line comment\n",
    )
    .unwrap();
    let o = run(&["--config", cfg.to_str().unwrap(), "verify"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r = SuiteReport::from_json(&String::from_utf8(o.stdout).unwrap()).unwrap();
    assert_eq!((r.reports[0].num_points, r.reports[0].seed, r.reports[0].n), (17, 9, 2));

    let o = run(&["--config", cfg.to_str().unwrap(), "verify", "--num-points", "5"]);
    let r = SuiteReport::from_json(&String::from_utf8(o.stdout).unwrap()).unwrap();
    assert_eq!(r.reports[0].num_points, 5);

    fs::write(&cfg, "[verify]\nidentity = dhrho\nnum_pointz = 3\n").unwrap();
    assert_eq!(code(&run(&["--config", cfg.to_str().unwrap(), "verify"])), 2);
    fs::write(&cfg, "[verify]\nn = 1\nn = 2\n").unwrap();
    assert_eq!(code(&run(&["--config", cfg.to_str().unwrap(), "verify"])), 2);
}

#[test]
fn convergence_experiment_writes_csv_and_json() {
    let dir = tempfile::tempdir().unwrap();
    let o = bin()
        .args(["experiment", "convergence", "--alphas", "2,4", "--hs", "1/8,1/16,1/32", "--out-dir"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(dir.path().join("convergence.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("alpha,h,nodes,max_err,l2_err,order_max,order_l2"));
    assert_eq!(lines.count(), 6);
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("convergence.json")).unwrap()).unwrap();
    assert!(json.is_object());
}

mod parsing {
    use heis_overdet::cli::config::{parse_config, ConfigFile, GLOBAL};
    use heis_overdet::cli::numlist::{parse_number, parse_number_list};
    use proptest::prelude::*;
    use std::collections::BTreeMap;

    fn key() -> impl Strategy<Value = String> {
        "[a-z][a-z0-9_]{0,8}"
    }

    fn value() -> impl Strategy<Value = String> {
        "[A-Za-z0-9_./+-]([A-Za-z0-9_./ +-]{0,10}[A-Za-z0-9_./+-])?"
    }

    fn render(cfg: &ConfigFile, quote: bool) -> String {
        let mut out = String::new();
        for (section, entries) in &cfg.sections {
            if section != GLOBAL {
                out.push_str(&format!("\n[{section}]\n"));
            }
            for (k, v) in entries {
                if quote {
                    out.push_str(&format!("  {k} = \"{v}\"  # note\n"));
                } else {
                    out.push_str(&format!("{k}={v}\n"));
                }
            }
        }
        out
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(128))]

        #[test]
        fn number_lists_round_trip(xs in prop::collection::vec(-1e6..1e6f64, 1..12)) {
            let text = xs.iter().map(|x| format!("{x:e}")).collect::<Vec<_>>().join(",");
            prop_assert_eq!(parse_number_list(&text).unwrap(), xs);
        }

        #[test]
        fn fractions_divide(a in -1000i64..1000, b in 1i64..1000) {
            prop_assert_eq!(parse_number(&format!("{a}/{b}")).unwrap(), a as f64 / b as f64);
        }

        #[test]
        fn number_parsing_never_panics(s in "\\PC{0,24}") {
            if let Ok(x) = parse_number(&s) {
                prop_assert!(x.is_finite());
            }
            let _ = parse_number_list(&s);
        }

        #[test]
        fn configs_round_trip(
            global in prop::collection::btree_map(key(), value(), 0..4),
            sections in prop::collection::btree_map("[a-z]{1,6}(\\.[a-z]{1,6})?", prop::collection::btree_map(key(), value(), 0..4), 0..4),
            quote in any::<bool>(),
        ) {
            let mut all: BTreeMap<String, BTreeMap<String, String>> = sections;
            all.insert(GLOBAL.to_string(), global);
            let cfg = ConfigFile { sections: all };
            prop_assert_eq!(parse_config(&render(&cfg, quote)).unwrap(), cfg);
        }
    }
}
