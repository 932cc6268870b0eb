use std::path::PathBuf;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_chatelet-manin")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("chatelet-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn count_table_rows() {
    let o = run(&["count", "--surface", "1,1,1,-1", "--bounds", "24,25"]);
    assert!(o.status.success());
    let s = stdout(&o);
    let lines: Vec<&str> = s.lines().collect();
    assert!(lines[0].starts_with("# chatelet-manin v"));
    assert_eq!(&lines[1..], ["B,nondegenerate,degenerate", "24,0,4", "25,16,4"]);
}

#[test]
fn crosscheck_reports_ok() {
    let o = run(&["crosscheck", "--bound", "150"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "OK: 150/150 values equal");
    let o = run(&["crosscheck", "--surface", "1,2,1,3", "--bounds", "1000,2025"]);
    assert_eq!(stdout(&o).trim(), "OK: 2/2 values equal");
}

#[test]
fn output_is_deterministic() {
    let a = run(&["points", "--bound", "1500", "--format", "jsonl"]);
    let b = run(&["points", "--bound", "1500", "--format", "jsonl", "--threads", "1"]);
    assert!(a.status.success() && b.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn black_points_share_a_component() {
    let o = run(&["points", "--bound", "2000", "--format", "jsonl"]);
    let mut comps = std::collections::HashSet::new();
    let mut black = 0;
    for line in stdout(&o).lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        if v["color"] == "black" && v["degenerate"] == false {
            black += 1;
            comps.insert(v["component"].as_str().unwrap().to_string());
        }
    }
    assert_eq!(black, 768);
    assert_eq!(comps.len(), 1);
}

#[test]
fn config_file_overrides_flags() {
    let path = scratch("run.conf");
    std::fs::write(&path, "# other surface\nsurface = 1,2,1,3\nbounds = 100\n").unwrap();
    let o = run(&["count", "--surface", "1,1,1,-1", "--bounds", "25", "--config", path.to_str().unwrap()]);
    assert!(o.status.success());
    let direct = run(&["count", "--surface", "1,2,1,3", "--bounds", "100"]);
    assert_eq!(o.stdout, direct.stdout);
}

#[test]
fn writes_to_file() {
    let path = scratch("count.csv");
    let o = run(&["count", "--bound", "25", "--out", path.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    assert!(std::fs::read_to_string(&path).unwrap().ends_with("25,16,4\n"));
}

#[test]
fn constant_is_json() {
    let o = run(&["constant", "--lmax", "3", "--bmax", "5", "--p0", "1000"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v["c"].as_f64().unwrap() > 0.0);
    assert_eq!(v["lmax"], 3);
}

#[test]
fn errors_exit_nonzero() {
    for args in [
        vec!["count", "--surface", "2,4,1,1", "--bound", "10"],
        vec!["count", "--surface", "1,1,1", "--bound", "10"],
        vec!["count"],
        vec!["points"],
        vec!["count", "--bound", "0"],
        vec!["count", "--bound", "10", "--config", "/nonexistent/run.conf"],
    ] {
        let o = run(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(String::from_utf8_lossy(&o.stderr).starts_with("error: "), "{args:?}");
    }
    let bad = scratch("bad.conf");
    std::fs::write(&bad, "a3 = 1\nb3 = oops\n").unwrap();
    let o = run(&["count", "--bound", "10", "--config", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));
    // clap usage errors
    assert_eq!(run(&["count", "--format", "xml"]).status.code(), Some(2));
}
