use std::f64::consts::PI;
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn pelastica(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pelastica")).args(args).output().expect("spawn pelastica")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn value_of(text: &str, key: &str) -> f64 {
    text.lines()
        .find_map(|l| l.strip_prefix(key).map(|rest| rest.trim_start_matches([' ', '=']).trim().parse().unwrap()))
        .unwrap_or_else(|| panic!("no `{key}` in {text}"))
}

#[test]
fn energy_of_unit_circle() {
    let o = pelastica(&["energy", "--set", "lambda=1", "--set", "p=2", "--set", "delta=0", "--set", "epsilon=0"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    assert!((value_of(&text, "p_elastic") - PI).abs() < 1e-12);
    assert!((value_of(&text, "length") - 2.0 * PI).abs() < 1e-12);
    assert!((value_of(&text, "total") - 3.0 * PI).abs() < 1e-12);
}

#[test]
fn missing_lambda_is_a_config_error() {
    let o = pelastica(&["energy"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("lambda"));
}

#[test]
fn bad_values_are_config_errors() {
    for args in [
        vec!["flow", "--set", "lambda=1", "--set", "epsilon=0"],
        vec!["flow", "--set", "lambda=1", "--set", "N=abc"],
        vec!["flow", "--set", "lambda=1", "--set", "colour=red"],
        vec!["energy", "--set", "lambda=1", "--set", "initial=torus 1"],
        vec!["energy", "--set", "lambda=-1"],
    ] {
        let o = pelastica(&args);
        assert_eq!(o.status.code(), Some(3), "{args:?}: {}", stderr(&o));
    }
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "# unit circle\nlambda = 2\np = 2\ndelta = 0\n").unwrap();
    let cfg = cfg.to_str().unwrap();
    let base = stdout(&pelastica(&["energy", "--config", cfg]));
    assert!((value_of(&base, "total") - (PI + 2.0 * 2.0 * PI)).abs() < 1e-12);
    let over = stdout(&pelastica(&["energy", "--config", cfg, "--set", "lambda=1"]));
    assert!((value_of(&over, "total") - 3.0 * PI).abs() < 1e-12);
}

#[test]
fn gradcheck_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("gc");
    let o = pelastica(&["gradcheck", "--set", "lambda=1", "--set", "N=128", "--quiet", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("PASS"));
    let csv = fs::read_to_string(out.join("gradcheck.csv")).unwrap();
    for line in csv.lines().skip(1) {
        let err: f64 = line.rsplit(',').next().unwrap().parse().unwrap();
        assert!(err <= 1e-4);
    }
}

#[test]
fn check_failure_exits_one() {
    let args = ["check", "--set", "lambda=1", "--set", "N=64", "--set", "trials=1000", "--set", "initial=ellipse 2 1"];
    let ok = pelastica(&args);
    assert_eq!(ok.status.code(), Some(0), "{}", stdout(&ok));
    let mut tight = args.to_vec();
    tight.extend(["--set", "regularity_cap=1e-9"]);
    assert_eq!(pelastica(&tight).status.code(), Some(1));
}

fn flow_into(dir: &Path) -> Output {
    pelastica(&[
        "flow",
        "--set",
        "lambda=1",
        "--set",
        "p=3",
        "--set",
        "N=64",
        "--set",
        "n=3",
        "--set",
        "horizon=0.5",
        "--set",
        "snapshot_stride=2",
        "--set",
        "initial=fourier seed=42 modes=3 amp=0.2",
        "--quiet",
        "--out",
        dir.to_str().unwrap(),
    ])
}

#[test]
fn flow_outputs_are_deterministic_and_complete() {
    let root = tempfile::tempdir().unwrap();
    let (a, b) = (root.path().join("a"), root.path().join("b"));
    assert_eq!(flow_into(&a).status.code(), Some(0));
    assert_eq!(flow_into(&b).status.code(), Some(0));
    for f in ["trace.csv", "diagnostics.csv", "metadata.txt"] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{f}");
    }
    let trace = fs::read_to_string(a.join("trace.csv")).unwrap();
    assert!(trace.starts_with("t,dt,bending_reg,p_elastic,length,total,grad_norm,"));
    let diag = fs::read_to_string(a.join("diagnostics.csv")).unwrap();
    assert!(diag.contains("check_name,lhs,rhs,margin,pass"));
    let snaps: Vec<_> = fs::read_dir(a.join("snapshots")).unwrap().collect();
    assert_eq!(snaps.len(), trace.lines().count() - 1);
    // no temp files left behind anywhere
    for dir in [a.clone(), a.join("snapshots")] {
        for e in fs::read_dir(dir).unwrap() {
            assert!(!e.unwrap().file_name().to_string_lossy().contains(".tmp-"));
        }
    }
}

#[test]
fn snapshot_reloads_as_initial_curve() {
    let root = tempfile::tempdir().unwrap();
    let run = root.path().join("run");
    assert_eq!(flow_into(&run).status.code(), Some(0));
    let last = fs::read_dir(run.join("snapshots")).unwrap().map(|e| e.unwrap().path()).max().unwrap();
    let spec = format!("initial=file {}", last.display());
    let o = pelastica(&["energy", "--set", "lambda=1", "--set", "p=3", "--set", "N=64", "--set", "n=3", "--set", &spec]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let wrong = pelastica(&["energy", "--set", "lambda=1", "--set", "N=32", "--set", "n=3", "--set", &spec]);
    assert_eq!(wrong.status.code(), Some(3));
}

#[test]
fn continuation_writes_stage_files() {
    let root = tempfile::tempdir().unwrap();
    let out = root.path().join("c");
    let o = pelastica(&[
        "continuation",
        "--set",
        "lambda=1",
        "--set",
        "p=3",
        "--set",
        "N=64",
        "--set",
        "stages=0.1:0.1,0.01:0.01",
        "--set",
        "stage_time=1",
        "--set",
        "dt_max=1",
        "--quiet",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}{}", stdout(&o), stderr(&o));
    assert!(out.join("stage00_trace.csv").exists());
    assert!(out.join("stage01_trace.csv").exists());
    assert!(out.join("continuation.csv").exists());
}
