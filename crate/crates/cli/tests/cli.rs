use std::path::Path;
use std::process::{Command, Output};

fn qwalk(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qwalk")).args(args).output().expect("spawn qwalk")
}

fn stdout(o: &Output) -> String {
    assert!(o.status.success(), "qwalk failed: {}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn iht_table_for_the_three_cube() {
    let out = stdout(&qwalk(&["iht", "--graph", "cube3", "--coin", "grover", "--format", "csv"]));
    let lines: Vec<&str> = out.lines().collect();
    assert!(lines[0].starts_with("# qwalk"));
    assert_eq!(lines[1], "graph,coin,k,m_k,V_k");
    assert!(lines.contains(&"cube3,grover,6,2,3"), "{out}");
    assert!(lines.contains(&"cube3,grover,3,4,0"), "{out}");
}

#[test]
fn nested_sweep_csv() {
    let out = stdout(&qwalk(&["sweep", "--graph", "hypercube:5", "--coin", "grover", "--strategy", "nested", "--format", "csv"]));
    let v: Vec<usize> = out.lines().skip(2).map(|l| l.rsplit(',').next().unwrap().parse().unwrap()).collect();
    assert_eq!(v.len(), 32);
    assert_eq!(v[0], 110);
    assert!(v.windows(2).all(|w| w[1] <= w[0]));
    assert_eq!(*v.last().unwrap(), 0);
}

#[test]
fn hitting_time_regression() {
    let out = stdout(&qwalk(&[
        "simulate", "--graph", "cube3", "--coin", "grover", "--initial", "uniform-coin", "--vertex", "0b000",
        "--horizon", "1000", "--format", "json",
    ]));
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    let body = v.to_string();
    assert!(body.contains("\"hitting_time_truncated\":4.0") || body.contains("\"hitting_time_truncated\":4"), "{body}");
}

#[test]
fn bad_configs_exit_with_code_2() {
    let dir = tempfile::tempdir().unwrap();
    let dim = write(dir.path(), "dim.toml", "[graph]\nkind = \"hypercube\"\ndim = 3\n[coin]\nkind = \"grover\"\ndim = 4\n");
    let unknown = write(dir.path(), "unknown.toml", "[graph]\nkind = \"hypercube\"\ndim = 3\nbogus = 1\n");
    for args in [
        vec!["run", "--config", dim.as_str()],
        vec!["run", "--config", unknown.as_str()],
        vec!["iht", "--graph", "cube3", "--coin", "nope"],
        vec!["iht", "--graph", "cube3", "--coin", "grover", "--final", "0b1111"],
        vec!["run"],
    ] {
        let o = qwalk(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    }
    let o = qwalk(&["run", "--config", dim.as_str()]);
    assert!(String::from_utf8_lossy(&o.stderr).contains("coin.dim"));
}

#[test]
fn dead_band_exits_with_code_3() {
    let o = qwalk(&["iht", "--graph", "cube3", "--coin", "grover", "--tol-rank", "0.5"]);
    assert_eq!(o.status.code(), Some(3));
    let o = qwalk(&["decompose", "--graph", "cube3", "--coin", "grover", "--tol-cluster", "0.3"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn config_runs_write_deterministic_files() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "s4.toml",
        r#"
name = "s4_demo"
seed = 9
analyses = ["decompose", "iht", "cps", "symmetries", "simulate"]
final_set = ["(1,2,3,4)"]

[graph]
kind = "symmetric"
n = 4
generators = "(1,2),(1,3),(1,4)"

[coin]
kind = "random"

[simulate]
horizon = 300
initial = "random"
"#,
    );
    let mut outputs = Vec::new();
    for run in ["a", "b"] {
        let out = dir.path().join(run);
        for fmt in ["csv", "json", "human"] {
            let o = qwalk(&["run", "--config", &cfg, "--format", fmt, "--out-dir", out.to_str().unwrap()]);
            assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        }
        let mut files: Vec<_> = std::fs::read_dir(&out).unwrap().map(|e| e.unwrap().path()).collect();
        files.sort();
        outputs.push(files.iter().map(|p| (p.file_name().unwrap().to_owned(), std::fs::read(p).unwrap())).collect::<Vec<_>>());
    }
    assert_eq!(outputs[0].len(), 15);
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn reproduce_outputs_are_byte_identical() {
    for args in [&["reproduce", "--summary", "--format", "json"][..], &["reproduce", "--table", "4", "--format", "csv"]] {
        assert_eq!(stdout(&qwalk(args)), stdout(&qwalk(args)));
    }
}
