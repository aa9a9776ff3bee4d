use std::path::Path;
use std::process::{Command, Output};

use framebound::bounds::BoundReport;
use framebound::bounds::tables::Table;
use framebound::{FrameConstant, FrameVerification, Matrix, MolienSeries, MomentReport};
use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_framebound")).args(args).output().unwrap()
}

fn stdout(out: &Output) -> String {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn json_report(args: &[&str]) -> Value {
    let mut full = args.to_vec();
    full.extend(["--format", "json"]);
    let doc: Value = serde_json::from_str(&stdout(&run(&full))).unwrap();
    doc["report"].clone()
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn identity_frame_constant_is_one() {
    let dir = tempfile::tempdir().unwrap();
    let id3 = write(dir.path(), "id3.csv", "1,0,0\n0,1,0\n0,0,1\n");
    let fc: FrameConstant = serde_json::from_value(json_report(&["fp", "--matrix", &id3, "--p", "4"])).unwrap();
    assert_eq!(fc.value, 1.0);
    assert_eq!(fc.d, 3);
}

#[test]
fn plate_table_text() {
    let text = stdout(&run(&["tables", "plate"]));
    assert!(text.starts_with("# framebound tables seed=0\n"));
    for v in ["106.262", "111.375", "221.765", "838.1", "105.786", "109.621", "192.414", "654.7"] {
        assert!(text.contains(v), "missing {v} in\n{text}");
    }
    let table: Table = serde_json::from_value(json_report(&["tables", "buckling"])).unwrap();
    assert_eq!(table.ratios, [1.2, 1.4, 1.6, 2.0, 4.0]);
}

#[test]
fn dihedral_five_molien() {
    let s: MolienSeries =
        serde_json::from_value(json_report(&["molien", "--group", "dihedral:5", "--max-degree", "10"])).unwrap();
    assert_eq!(s.coefficients, [1, 0, 1, 0, 1, 1, 1, 1, 1, 1, 2]);
    let r = json_report(&["max-frame-order", "--group", "icosahedral:full"]);
    assert_eq!(r["max_frame_order"], 2);
}

#[test]
fn seeded_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let t = write(dir.path(), "t.csv", "1.5,0.2,0\n0,0.7,0.1\n0.3,0,1.1\n");
    let args = ["fp", "--matrix", &t, "--p", "2.5", "--samples", "50000", "--seed", "9", "--format", "json"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.stdout, b.stdout);
    let threaded = Command::new(env!("CARGO_BIN_EXE_framebound"))
        .args(args)
        .env("FRAMEBOUND_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(a.stdout, threaded.stdout);
    assert!(String::from_utf8_lossy(&a.stdout).contains("\"seed\": 9"));
}

#[test]
fn reports_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let t = write(dir.path(), "t.json", "[[2.0, 0.1], [0.3, 0.9]]");
    let shape = write(dir.path(), "s.json", r#"{"regular": {"n": 5, "circumradius": 1.0}}"#);

    let v: FrameVerification =
        serde_json::from_value(json_report(&["verify-frame", "--group", "dihedral:4", "--matrix", &t, "--p", "2"]))
            .unwrap();
    assert_eq!(v.transform, Matrix::read_file(&t).unwrap());
    let again = serde_json::to_value(&v).unwrap();
    assert_eq!(serde_json::from_value::<FrameVerification>(again).unwrap(), v);

    let b: BoundReport =
        serde_json::from_value(json_report(&["bounds", "plate", "--matrix", &t, "--lambda", "104.36"])).unwrap();
    assert_eq!(b.value, Some(b.factor * 104.36));

    let m: MomentReport = serde_json::from_value(json_report(&["moments", "--shape", &shape, "--p", "2"])).unwrap();
    assert!(m.moment > 0.0);
    let both = json_report(&["moments", "--shape", &shape, "--p", "2", "--matrix", &t]);
    serde_json::from_value::<MomentReport>(both["transformed"].clone()).unwrap();
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.csv", "1,2\n3,oops\n");
    let out = run(&["sandwich", "--matrix", &bad, "--p", "2"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("bad.csv:2"), "{err}");
    assert_eq!(err.lines().count(), 1);

    let t = write(dir.path(), "t.csv", "2,0\n0,1\n");
    let out = run(&["bounds", "subordinator", "--matrix", &t, "--beta", "0.5"]);
    assert_eq!(out.status.code(), Some(2));

    let out = run(&["molien", "--group", "dodecahedral:3"]);
    assert_eq!(out.status.code(), Some(2));

    let out = run(&["tables", "plate", "--bogus"]);
    assert_eq!(out.status.code(), Some(2));

    let shape = write(dir.path(), "sq.json", r#"{"regular": {"n": 4, "circumradius": 1.0}}"#);
    let out = run(&["moments", "--shape", &shape, "--p", "2", "--matrix", &t]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn chi2_and_sandwich() {
    let r = json_report(&["chi2-moment", "--weights", "1,2", "--p", "2"]);
    assert_eq!(r["exact"], "19");
    let dir = tempfile::tempdir().unwrap();
    let t = write(dir.path(), "rot.csv", "0,-3\n3,0\n");
    let s = json_report(&["sandwich", "--matrix", &t, "--p", "3"]);
    assert_eq!(s["equality"], true);
}
