use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::tempdir;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_polar-harq"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    assert!(o.status.success(), "failed: {}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn data_rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines()
        .filter(|l| !l.starts_with('#') && !l.starts_with("ebn0_db"))
        .map(|l| l.split(',').map(String::from).collect())
        .collect()
}

#[test]
fn design_smallest_code() {
    let o = run(&["design", "--n", "1", "--k", "1", "--crc-len", "0", "--eps", "0.5"]);
    assert_eq!(stdout(&o), "2 1 0 0.5\n2\n");
}

#[test]
fn design_full_size_is_deterministic() {
    let dir = tempdir().unwrap();
    let cfg = dir.path().join("mother.cfg");
    fs::write(&cfg, "mother.n=12\nmother.k=1024\nmother.crc_len=16\nmother.eps=0.64\n").unwrap();
    let a = dir.path().join("a.txt");
    let b = dir.path().join("b.txt");
    for out in [&a, &b] {
        stdout(&run(&[
            "design",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
        ]));
    }
    let text = fs::read_to_string(&a).unwrap();
    assert_eq!(text.lines().count(), 1 + 1040);
    assert_eq!(text.lines().next().unwrap(), "4096 1024 16 0.64");
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
}

#[test]
fn greedy_pattern_matches_brute_force_fixture() {
    let fixture = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/golden_n32_m20.pat");
    let o = run(&[
        "puncture",
        "--n",
        "5",
        "--k",
        "8",
        "--crc-len",
        "0",
        "--eps",
        "0.5",
        "--m",
        "20",
    ]);
    assert_eq!(stdout(&o), fs::read_to_string(fixture).unwrap());
}

#[test]
fn no_puncturing_at_full_length() {
    let o = run(&["puncture", "--n", "4", "--k", "4", "--crc-len", "0", "--m", "16"]);
    assert_eq!(stdout(&o), "16 16 4 0 0.5 0.5\n");
}

#[test]
fn symmetric_pattern_reports_disjointness() {
    let dir = tempdir().unwrap();
    let out = dir.path().join("p.txt");
    let o = run(&[
        "puncture",
        "--n",
        "6",
        "--k",
        "16",
        "--crc-len",
        "8",
        "--m",
        "32",
        "--algorithm",
        "symmetric",
        "--x",
        "64",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(stdout(&o).contains("disjoint=true"));
    let text = fs::read_to_string(&out).unwrap();
    assert!(text.lines().nth(1).unwrap() == "# disjoint=true");
    let idx: Vec<usize> = text.lines().skip(2).map(|l| l.parse().unwrap()).collect();
    assert_eq!(idx.len(), 32);
    for &i in &idx {
        assert!(!idx.contains(&(((i - 1) ^ 63) + 1)));
    }
}

#[test]
fn flags_override_config_file() {
    let dir = tempdir().unwrap();
    let cfg = dir.path().join("e.cfg");
    fs::write(&cfg, "mother.n=3\nmother.k=2\nmother.crc_len=0\n").unwrap();
    let o = run(&["design", "--config", cfg.to_str().unwrap(), "--k", "3"]);
    assert!(stdout(&o).starts_with("8 3 0 0.5\n"));
}

#[test]
fn simulate_is_reproducible_and_records_config() {
    let dir = tempdir().unwrap();
    let args = |out: &str| {
        vec![
            "simulate".to_string(),
            "--n".into(),
            "6".into(),
            "--k".into(),
            "16".into(),
            "--crc-len".into(),
            "8".into(),
            "--m".into(),
            "48".into(),
            "--snr".into(),
            "1,2".into(),
            "--max-trials".into(),
            "1500".into(),
            "--seed".into(),
            "17".into(),
            "-L".into(),
            "2".into(),
            "--out".into(),
            out.into(),
        ]
    };
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for p in [&a, &b] {
        let args = args(p.to_str().unwrap());
        let refs: Vec<&str> = args.iter().map(String::as_str).collect();
        stdout(&run(&refs));
    }
    let text = fs::read_to_string(&a).unwrap();
    assert_eq!(text, fs::read_to_string(&b).unwrap());
    assert!(text.starts_with("# code=(64>=48,16+8) decoder=L2 seed=17\n"));
    assert!(text.contains("# subset.m=48\n"));
    assert!(text.contains("ebn0_db,trials,errors,bler,ci_low,ci_high\n"));
    assert_eq!(data_rows(&text).len(), 2);
}

#[test]
fn malformed_config_leaves_no_output() {
    let dir = tempdir().unwrap();
    let out = dir.path().join("curve.csv");
    for body in [
        "mother.n=six\nmother.k=2\n",
        "mother.n=6\nmother.k=2\nchannel.snr=1\nwho=me\n",
        "not a setting\n",
    ] {
        let cfg = dir.path().join("bad.cfg");
        fs::write(&cfg, body).unwrap();
        let o = run(&[
            "simulate",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
        ]);
        assert!(!o.status.success());
        assert!(!String::from_utf8_lossy(&o.stderr).is_empty());
        assert!(!out.exists());
    }
    let harq_dir = dir.path().join("harq");
    let o = run(&[
        "harq",
        "--n",
        "6",
        "--k",
        "16",
        "--m",
        "8",
        "--snr",
        "1",
        "--out",
        harq_dir.to_str().unwrap(),
    ]);
    assert!(!o.status.success());
    assert!(!harq_dir.exists());
}

#[test]
fn joint_curve_equals_mother_curve() {
    let dir = tempdir().unwrap();
    let common = [
        "--n",
        "6",
        "--k",
        "16",
        "--crc-len",
        "8",
        "--snr",
        "0,1,2",
        "--max-trials",
        "3000",
        "--min-errors",
        "50",
        "--seed",
        "4",
        "-L",
        "4",
    ];
    let harq_dir = dir.path().join("harq");
    let mut args = vec!["harq", "--m", "32", "--x", "64", "--out", harq_dir.to_str().unwrap()];
    args.extend(common);
    stdout(&run(&args));
    let mut args = vec!["simulate"];
    args.extend(common);
    let mother = stdout(&run(&args));

    let joint = fs::read_to_string(harq_dir.join("joint.csv")).unwrap();
    assert!(fs::read_to_string(harq_dir.join("rv0.csv"))
        .unwrap()
        .contains("# curve=rv0"));
    assert!(harq_dir.join("rv1.csv").exists());
    let (j, m) = (data_rows(&joint), data_rows(&mother));
    assert_eq!(j.len(), 3);
    assert_eq!(j, m);
}

#[test]
fn default_equivalence_suite_passes() {
    let o = run(&["equiv-check"]);
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 100);
    assert!(text.lines().all(|l| l.ends_with(" PASS")));
    let o = run(&[
        "equiv-check",
        "--set",
        "equiv.n=4",
        "--set",
        "equiv.subset=1,2,3",
        "--set",
        "equiv.x=4",
        "--set",
        "equiv.exhaustive=true",
    ]);
    assert_eq!(stdout(&o).lines().count(), 3);
}
