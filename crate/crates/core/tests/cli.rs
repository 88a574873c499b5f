use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_diagmetric")).args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_owned()
}

const SINH: &str = r#"{"root_system":{"type":"A","rank":1},"grid":{"nx":16,"ny":16,"lx":1.0,"ly":1.0},
 "active":[{"root":[1],"coefficient":{"kind":"constant","value":1.0}},
           {"root":[-1],"coefficient":{"kind":"preset","name":"sin2x","amplitude":2.0,"offset":0.1}}],
 "source":{"components":[{"kind":"preset","name":"cosxy","amplitude":3.0}]}}"#;

#[test]
fn roots_reports_the_count() {
    let o = run(&["roots", "--type", "G", "--rank", "2"]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["root_count"], 12);
}

#[test]
fn cone_verdict_round_trips_through_verify() {
    let dir = tempfile::tempdir().unwrap();
    let prob = write(dir.path(), "c.json", r#"{"generators":[["1","-1"],["-1","1"]],"target":["0","0"]}"#);
    let out = dir.path().join("v.json");
    let o = run(&["cone", "--problem", &prob, "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let o = run(&["verify", "--cone-problem", &prob, "--verdict", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0);

    let one_sided = write(dir.path(), "d.json", r#"{"generators":[["1","-1"]],"target":["0","0"]}"#);
    assert_eq!(code(&run(&["cone", "--problem", &one_sided])), 1);
    assert_eq!(code(&run(&["cone", "--problem", &one_sided, "--closed"])), 0);
    let o = run(&["verify", "--cone-problem", &one_sided, "--verdict", out.to_str().unwrap()]);
    assert_eq!(code(&o), 1);
}

#[test]
fn malformed_input_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.json", "{ not json");
    let o = run(&["cone", "--problem", &bad]);
    assert_eq!(code(&o), 2);
    assert!(!o.stderr.is_empty());
    assert_eq!(code(&run(&["stability", "--datum", "/nonexistent/datum.json"])), 2);
}

#[test]
fn stability_and_offdiagonal_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let stable = write(dir.path(), "s.json", r#"{"r":2,"degrees":["1","-1"],"arrows":[[2,1]]}"#);
    let unstable = write(dir.path(), "u.json", r#"{"r":2,"degrees":["1","-1"],"arrows":[[1,2]]}"#);
    assert_eq!(code(&run(&["stability", "--datum", &stable])), 0);
    assert_eq!(code(&run(&["stability", "--datum", &unstable])), 1);
    assert_eq!(code(&run(&["offdiag", "--type", "A", "--rank", "3", "--cyclic"])), 0);
}

#[test]
fn solve_is_byte_for_byte_deterministic_and_verifiable() {
    let dir = tempfile::tempdir().unwrap();
    let prob = write(dir.path(), "sinh.json", SINH);
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    for out in [&a, &b] {
        let o = run(&["solve", "--problem", &prob, "--out", out.to_str().unwrap(), "--emit-plot-data"]);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    }
    for f in ["omega.csv", "report.json", "omega_section.dat", "energy.dat"] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{f} differs");
    }
    let omega = a.join("omega.csv");
    let o = run(&["verify", "--problem", &prob, "--omega", omega.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));

    let text = fs::read_to_string(&omega).unwrap();
    let mut lines: Vec<String> = text.lines().map(str::to_owned).collect();
    let mut fields: Vec<String> = lines[5].split(',').map(str::to_owned).collect();
    let v: f64 = fields[2].parse().unwrap();
    fields[2] = (v + 0.01).to_string();
    lines[5] = fields.join(",");
    fs::write(&omega, lines.join("\n") + "\n").unwrap();
    let o = run(&["verify", "--problem", &prob, "--omega", omega.to_str().unwrap()]);
    assert_eq!(code(&o), 1);
}

#[test]
fn infeasible_and_forced_solves_use_their_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let prob = write(
        dir.path(),
        "inf.json",
        r#"{"root_system":{"type":"A","rank":1},"grid":{"nx":8,"ny":8,"lx":1.0,"ly":1.0},
            "active":[{"root":[1],"coefficient":{"kind":"constant","value":1.0}}],
            "source":{"components":[{"kind":"preset","name":"cosx","offset":-0.5}]}}"#,
    );
    let out = dir.path().join("o");
    let o = run(&["solve", "--problem", &prob, "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    let report: serde_json::Value = serde_json::from_slice(&fs::read(out.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["verdict"], "infeasible");
    assert_eq!(report["recession_verified"], true);

    let o = run(&["solve", "--problem", &prob, "--out", out.to_str().unwrap(), "--force-iterate", "--max-iter", "10"]);
    assert_eq!(code(&o), 3);
}

#[test]
fn equivalence_scan_writes_rows() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("scan.csv");
    let o = run(&["equivalence-scan", "--rmax", "3", "--dmax", "2", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(out).unwrap();
    assert!(text.lines().count() > 10);
    assert!(text.lines().skip(1).all(|l| l.ends_with(",false")));
}
