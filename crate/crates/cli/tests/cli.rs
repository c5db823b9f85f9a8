use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn vial(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vial")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write_fixture(dir: &Path) {
    fs::write(dir.join("social.tsv"), "# friends\nu1\tu2\nu1\tu3\nu2\tu3\nu3\tu4\nu5\tu6\n").unwrap();
    fs::write(
        dir.join("behavior.tsv"),
        "u1\tapp1\nu2\tapp1\nu1\tapp2\nu4\tapp2\nu5\tapp3\nu2\tapp3\nu6\tapp4\nu4\tapp4\n",
    )
    .unwrap();
    fs::write(dir.join("attribute.tsv"), "u1\ta1\nu2\ta1\nu3\ta2\nu4\ta2\n").unwrap();
    fs::write(dir.join("vocab.tsv"), "a1\tcity\na2\tcity\na3\tcity\n").unwrap();
}

fn build_fixture(dir: &Path) -> String {
    write_fixture(dir);
    let snap = dir.join("net.snap");
    let o = vial(&["build", "--dir", dir.to_str().unwrap(), "--out", snap.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    snap.to_str().unwrap().to_owned()
}

#[test]
fn build_prints_counts() {
    let dir = tempfile::tempdir().unwrap();
    write_fixture(dir.path());
    let snap = dir.path().join("net.snap");
    let o = vial(&["build", "--dir", dir.path().to_str().unwrap(), "--out", snap.to_str().unwrap()]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.contains("social nodes: 6"), "{out}");
    assert!(out.contains("behavior nodes: 4"));
    assert!(out.contains("social links: 5"));
    assert!(snap.exists());
}

#[test]
fn build_reports_file_and_line() {
    let dir = tempfile::tempdir().unwrap();
    write_fixture(dir.path());
    fs::write(dir.path().join("social.tsv"), "u1\tu2\nu3\n").unwrap();
    let o = vial(&["build", "--dir", dir.path().to_str().unwrap(), "--out", dir.path().join("x").to_str().unwrap()]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("social.tsv:2:"), "{}", stderr(&o));
}

#[test]
fn build_warns_on_empty_behavior_file() {
    let dir = tempfile::tempdir().unwrap();
    write_fixture(dir.path());
    fs::write(dir.path().join("behavior.tsv"), "").unwrap();
    let o = vial(&["build", "--dir", dir.path().to_str().unwrap(), "--out", dir.path().join("x").to_str().unwrap()]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("behavior nodes: 0"));
    assert!(stderr(&o).contains("warning"), "{}", stderr(&o));
}

#[test]
fn attack_ranks_three_cities() {
    let dir = tempfile::tempdir().unwrap();
    let snap = build_fixture(dir.path());
    let o = vial(&["attack", "--snapshot", &snap, "--target", "u5", "--alpha", "0.1", "--k", "3"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.contains("1. a1"), "{out}");
    assert!(out.contains("2. a2") && out.contains("3. a3"), "{out}");
    assert!(out.contains("confidence: clusterness"));
    assert!(out.contains("iterations: "));
}

#[test]
fn attack_alpha_one_explains_zero_scores() {
    let dir = tempfile::tempdir().unwrap();
    let snap = build_fixture(dir.path());
    let o = vial(&["attack", "--snapshot", &snap, "--target", "u5", "--alpha", "1.0"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("note: every score is zero"), "{}", stdout(&o));
}

#[test]
fn attack_dispatches_baselines() {
    let dir = tempfile::tempdir().unwrap();
    let snap = build_fixture(dir.path());
    for name in ["vial-b", "cn-san", "aa-san", "rwwr-san", "random"] {
        let o = vial(&["attack", "--snapshot", &snap, "--target", "u6", "--attack", name]);
        assert!(o.status.success(), "{name}: {}", stderr(&o));
        assert!(stdout(&o).contains(&format!("attack: {name}")));
    }
    let o = vial(&["attack", "--snapshot", &snap, "--target", "u6", "--attack", "nope"]);
    assert!(!o.status.success());
}

#[test]
fn attack_unknown_id_lists_nearest() {
    let dir = tempfile::tempdir().unwrap();
    let snap = build_fixture(dir.path());
    let o = vial(&["attack", "--snapshot", &snap, "--target", "u55"]);
    assert!(!o.status.success());
    let err = stderr(&o);
    assert!(err.contains("unknown user id `u55`") && err.contains("nearest matches: u5"), "{err}");
}

#[test]
fn attack_writes_scores() {
    let dir = tempfile::tempdir().unwrap();
    let snap = build_fixture(dir.path());
    let out = dir.path().join("scores.tsv");
    let o = vial(&["attack", "--snapshot", &snap, "--target", "u5", "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    assert_eq!(fs::read_to_string(out).unwrap().lines().count(), 4);
}

#[test]
fn synth_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for d in [&a, &b] {
        let o = vial(&["synth", "--out", d.to_str().unwrap(), "--users", "300", "--items", "600", "--seed", "4"]);
        assert!(o.status.success(), "{}", stderr(&o));
    }
    let names: Vec<_> = fs::read_dir(&a).unwrap().map(|e| e.unwrap().file_name()).collect();
    assert_eq!(names.len(), 5);
    for n in names {
        assert_eq!(fs::read(a.join(&n)).unwrap(), fs::read(b.join(&n)).unwrap());
    }
}

#[test]
fn eval_on_planted_data() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("data");
    let o = vial(&[
        "synth",
        "--out",
        data.to_str().unwrap(),
        "--users",
        "2000",
        "--items",
        "8000",
        "--degree-in",
        "4",
        "--seed",
        "2",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let snap = dir.path().join("net.snap");
    assert!(vial(&["build", "--dir", data.to_str().unwrap(), "--out", snap.to_str().unwrap()]).status.success());
    let run = |out: &Path| {
        let o = vial(&[
            "eval",
            "--snapshot",
            snap.to_str().unwrap(),
            "--attack",
            "random",
            "--attack",
            "cn-san",
            "--attack",
            "vial",
            "--k",
            "1,2,3",
            "--trials",
            "1",
            "--seed",
            "3",
            "--uniform",
            "100",
            "--out",
            out.to_str().unwrap(),
        ]);
        assert!(o.status.success(), "{}", stderr(&o));
        fs::read_to_string(out.join("report.tsv")).unwrap()
    };
    let first = run(&dir.path().join("e1"));
    assert_eq!(first, run(&dir.path().join("e2")));
    assert_eq!(first.lines().count(), 1 + 3 * 2 * 3);
    let p = |attack: &str| -> f64 {
        let rows: Vec<f64> = first
            .lines()
            .filter(|l| l.starts_with(&format!("{attack}\t")) && l.split('\t').nth(2) == Some("1"))
            .map(|l| l.split('\t').nth(3).unwrap().parse().unwrap())
            .collect();
        rows.iter().sum::<f64>() / rows.len() as f64
    };
    assert!(p("vial") > p("random") + 0.2, "{first}");
    assert!(dir.path().join("e1/gains.tsv").exists());
}

#[test]
fn verify_passes() {
    let o = vial(&["verify", "--seed", "7", "--networks", "12"]);
    let out = stdout(&o);
    assert!(o.status.success(), "{out}");
    assert!(out.lines().count() >= 10);
    assert!(out.lines().all(|l| l.ends_with("PASS")), "{out}");
    assert!(out.contains("closed-form-votes\t"));
}
