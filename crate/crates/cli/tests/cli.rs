use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hypercluster"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn torus_file_validates_and_builds() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["gen-torus", "3", "--out", "t3.lat"], dir.path());
    assert!(o.status.success());
    let o = run(&["validate-lattice", "t3.lat"], dir.path());
    assert!(o.status.success(), "{}", stdout(&o));
    let o = run(&["build-code", "t3.lat"], dir.path());
    assert!(o.status.success());
    assert!(stdout(&o).contains("[[18, 2, 3, 3]]"), "{}", stdout(&o));
}

#[test]
fn sampled_shots_decode_offline() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let o = run(&["enumerate-faults", "torus:3", "--layers", "4", "--p", "0.01", "--out", "dem.txt"], d);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let o = run(
        &["sample-shots", "torus:3", "--layers", "4", "--p", "0.01", "--count", "20", "--seed", "4", "--out", "shots.txt"],
        d,
    );
    assert!(o.status.success());
    let o = run(&["decode", "--dem", "dem.txt", "--shots", "shots.txt"], d);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let out = stdout(&o);
    // one verdict per shot and channel
    let verdicts: Vec<&str> = out.lines().filter(|l| l.starts_with("shot ")).collect();
    assert_eq!(verdicts.len(), 40);
    assert!(verdicts.iter().all(|l| l.contains(" ok ") || l.contains(" fail ")));
}

#[test]
fn decode_rejects_unknown_detectors() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    run(&["enumerate-faults", "torus:3", "--layers", "4", "--p", "0.01", "--out", "dem.txt"], d);
    run(
        &["sample-shots", "torus:3", "--layers", "4", "--p", "0.0", "--count", "1", "--seed", "1", "--out", "shots.txt"],
        d,
    );
    let text = fs::read_to_string(d.join("shots.txt")).unwrap();
    let broken = text.replacen("defects", "defects 100000", 1);
    assert_ne!(broken, text);
    fs::write(d.join("bad.txt"), broken).unwrap();
    let o = run(&["decode", "--dem", "dem.txt", "--shots", "bad.txt"], d);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn run_memory_writes_csv_and_reports_config_errors() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    fs::write(
        d.join("ok.cfg"),
        "lattice = torus:3, torus:4\nlayers = 4\nrates = 0.005, 0.01, 0.02\nshots = 100\nseed = 7\nout = res.csv\n",
    )
    .unwrap();
    let o = run(&["run-memory", "--config", "ok.cfg"], d);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(d.join("res.csv")).unwrap();
    assert!(csv.starts_with("instance,n,k,d_Z,d_X,layers,channel,p,shots,failures,rate,ci_low,ci_high,seed,n_f_audit\n"));
    assert_eq!(csv.lines().count(), 1 + 2 * 3 * 2);
    assert!(d.join("res.csv.meta").exists());

    let o = run(&["threshold", "--csv", "res.csv", "--channel", "Z"], d);
    assert!(o.status.success());

    fs::write(d.join("bad.cfg"), "lattice = torus:3\nshots = 0\n").unwrap();
    let o = run(&["run-memory", "--config", "bad.cfg", "--out", "x.csv"], d);
    assert_eq!(o.status.code(), Some(1));

    fs::write(d.join("typo.cfg"), "lattice = torus:3\nshotz = 10\n").unwrap();
    let o = run(&["run-memory", "--config", "typo.cfg", "--out", "x.csv"], d);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn run_memory_rejects_invalid_lattice() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    run(&["gen-torus", "3", "--out", "t3.lat"], d);
    let text = fs::read_to_string(d.join("t3.lat")).unwrap();
    let last_face = text.lines().filter(|l| l.starts_with("face")).next_back().unwrap().to_string();
    let kept: Vec<&str> = text.lines().filter(|l| *l != last_face).collect();
    fs::write(d.join("bad.lat"), kept.join("\n")).unwrap();
    fs::write(d.join("bad.cfg"), "lattice = bad.lat\nrates = 0.01\nshots = 10\n").unwrap();
    let o = run(&["run-memory", "--config", "bad.cfg", "--out", "x.csv"], d);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["validate-lattice", "bad.lat"], d);
    assert_eq!(o.status.code(), Some(2));
}
