use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use imt_cli::spec::CurveSpec;

fn root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn spec_path(name: &str) -> PathBuf {
    root().join("specs").join(format!("{name}.curve"))
}

fn imt(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_imt"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn s(p: &Path) -> &str {
    p.to_str().expect("utf-8 path")
}

fn small_golden(dir: &Path, shortcut: &str) -> PathBuf {
    let out = dir.join(format!("d1.{shortcut}.jsonl"));
    let o = imt(&[
        "run",
        s(&spec_path("d1")),
        "--primes-up-to",
        "60",
        "--shortcut",
        shortcut,
        "--out",
        s(&out),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    out
}

#[test]
fn spec_files_round_trip() {
    for entry in fs::read_dir(root().join("specs")).unwrap() {
        let path = entry.unwrap().path();
        let text = fs::read_to_string(&path).unwrap();
        let spec = CurveSpec::parse(&text).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        assert_eq!(spec.to_string(), text, "{}", path.display());
    }
}

#[test]
fn verify_identical_and_divergent() {
    let dir = tempfile::tempdir().unwrap();
    let golden = small_golden(dir.path(), "off");
    let spec = spec_path("d1");

    let o = imt(&["verify", s(&spec), s(&golden)]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("identical"));

    let o = imt(&["verify", s(&spec), s(&golden), "--primes-up-to", "70"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("length mismatch"));

    let text = fs::read_to_string(&golden).unwrap();
    let line = text.lines().find(|l| l.starts_with(r#"{"p":13,"#)).unwrap();
    let edited = line.replacen(r#""n1":"#, r#""n1":9"#, 1);
    let tampered = dir.path().join("tampered.jsonl");
    fs::write(&tampered, text.replace(line, &edited)).unwrap();
    let o = imt(&["verify", s(&spec), s(&tampered)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("first divergence at p = 13"), "{}", stdout(&o));
}

#[test]
fn shortcut_golden_verifies_against_full_run() {
    let dir = tempfile::tempdir().unwrap();
    let golden = small_golden(dir.path(), "on");
    let text = fs::read_to_string(&golden).unwrap();
    assert!(text
        .lines()
        .any(|l| l.contains(r#""split_type":"inert""#) && !l.contains(r#""n3""#)));
    let o = imt(&["verify", s(&spec_path("d1")), s(&golden), "--shortcut", "off"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}

#[test]
fn committed_golden_header_matches_spec() {
    let text = fs::read_to_string(root().join("golden/d3.p300.jsonl")).unwrap();
    let header = imt_cli::output::read_header(&text).unwrap();
    assert_eq!((header.curve.as_str(), header.d, header.primes_up_to), ("d3", 3, 300));
    let records = imt_cli::output::read_records(&text).unwrap();
    assert!(records.iter().all(|r| r.is_clean() && r.self_check().is_empty()));
}

#[test]
fn exit_codes() {
    let o = imt(&["run", s(&spec_path("d1-wrong-field")), "--primes-up-to", "60"]);
    assert_eq!(o.status.code(), Some(1));
    let summary: serde_json::Value = serde_json::from_slice(&o.stderr).unwrap();
    assert!(summary["violations"].as_u64().unwrap() > 0);

    let o = imt(&["run", s(&spec_path("d1")), "--primes-up-to", "2"]);
    assert_eq!(o.status.code(), Some(0));

    let o = imt(&["run", "/nonexistent.curve"]);
    assert_eq!(o.status.code(), Some(2));

    let o = imt(&["classnum", "--disc", "-5"]);
    assert_eq!(o.status.code(), Some(2));

    let o = imt(&["signature", s(&spec_path("d1"))]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn signature_output() {
    let o = imt(&["signature", s(&spec_path("x7-5x"))]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("eigenvalues: i, -i, i"));
    assert!(text.contains("signature: (2, 1)"));
    assert!(text.contains("verdict: unital"));

    let o = imt(&["signature", s(&spec_path("x8+11x4+3"))]);
    assert!(stdout(&o).contains("verdict: not unital"));
}

#[test]
fn classnum_output() {
    let o = imt(&["classnum", "--enumerate-h1", "--bound", "200"]);
    let text = stdout(&o);
    assert!(text.ends_with("# 9 fields\n"));
    assert!(text.contains("-163,1"));
    let o = imt(&["classnum", "--disc", "-23"]);
    assert_eq!(stdout(&o), "disc,h\n-23,3\n");
}

#[test]
fn match_ec_reproduces_golden_survivors() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("d2.csv");
    let o = imt(&[
        "match-ec",
        s(&root().join("golden/d2.p300.jsonl")),
        "--candidates",
        s(&out),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(
        fs::read_to_string(&out).unwrap(),
        fs::read_to_string(root().join("golden/d2.match.csv")).unwrap()
    );
}

#[test]
fn bench_csv() {
    let o = imt(&["bench", s(&spec_path("d1")), "--primes-up-to", "60"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "p,full_us,shortcut_us,ratio");
    assert!(lines.last().unwrap().starts_with("total,"));
    // inert primes for Q(i) are 3 mod 4
    assert!(lines[1..lines.len() - 1]
        .iter()
        .all(|l| l.split(',').next().unwrap().parse::<u64>().unwrap() % 4 == 3));
}
