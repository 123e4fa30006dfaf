use std::process::{Command, Output};

fn irturbo(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_irturbo")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn rate_prints_the_four_quantities() {
    let o = irturbo(&["rate", "--profile", "2:1.0"]);
    assert!(o.status.success());
    let text = stdout(&o);
    for line in ["average_degree=2.0000", "punctured_fraction=0.0000", "theta=0.5000", "R=0.3333"] {
        assert!(text.contains(line), "{text}");
    }
    let o = irturbo(&["rate", "--profile", "2:1.0", "--puncture", "10"]);
    assert!(stdout(&o).contains("R=0.5000"));
    let o = irturbo(&["rate", "--profile", "2:0.888,8:0.06,9:0.052", "--puncture", "11101101110"]);
    assert!(stdout(&o).contains("R=0.3354"));
}

#[test]
fn malformed_profile_is_a_usage_error() {
    let o = irturbo(&["rate", "--profile", "2:0.5,seven:0.5"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("seven:0.5"));
}

#[test]
fn sweep_output_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let prefix = dir.path().join(name);
        let o = irturbo(&[
            "sweep", "--profile", "2:0.85,7:0.15", "--puncture", "11101101110", "--frame-size", "120",
            "--mod", "16qam", "--ebno", "20:21:1", "--max-iter", "6", "--stop-rule", "stable",
            "--seed", "9", "--max-frames", "6", "--out", prefix.to_str().unwrap(),
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        assert!(prefix.with_extension("json").exists());
        std::fs::read_to_string(prefix.with_extension("csv")).unwrap()
    };
    let a = run("a");
    assert_eq!(a, run("b"));
    let mut rdr = csv::Reader::from_reader(a.as_bytes());
    let ber_col = rdr.headers().unwrap().iter().position(|h| h == "ber").unwrap();
    let rows: Vec<_> = rdr.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 2);
    assert!(rows.iter().all(|r| &r[ber_col] == "0.0"));
}

#[test]
fn strict_sweep_fails_on_censoring() {
    let dir = tempfile::tempdir().unwrap();
    let prefix = dir.path().join("s");
    let o = irturbo(&[
        "sweep", "--profile", "2:1.0", "--frame-size", "50", "--mod", "bpsk", "--ebno", "10",
        "--max-iter", "2", "--stop-rule", "fixed", "--seed", "1", "--max-frames", "2", "--strict",
        "--out", prefix.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn selftest_passes_and_names_golden_failures() {
    let o = irturbo(&["selftest"]);
    assert!(o.status.success(), "{}", stdout(&o));
    assert!(!stdout(&o).contains("FAIL"));

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("golden.txt");
    std::fs::write(&path, "input 1000000\nparity 1111000\ntail_systematic 000\ntail_parity 000\n").unwrap();
    let o = irturbo(&["selftest", "--golden", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let text = stdout(&o);
    assert!(text.contains("FAIL rsc-golden-vector"), "{text}");
    assert_eq!(text.matches("FAIL").count(), 1);
}

#[test]
fn capacity_at_zero_db_is_one_bit() {
    let o = irturbo(&["capacity", "--snr", "0:1:1"]);
    assert!(o.status.success());
    assert!(stdout(&o).lines().any(|l| l == "0,1.000000"));
}

#[test]
fn encoder_dumps_its_interleaver() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("perm.txt");
    let o = irturbo(&[
        "encode", "--frame-size", "8", "--bits", "10110010", "--seed", "5",
        "--dump-interleaver", path.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let perm = irturbo::interleave::Permutation::read_dump(std::fs::read_to_string(&path).unwrap().as_bytes()).unwrap();
    assert_eq!(perm.len(), 16);
    let codeword = stdout(&o).lines().find_map(|l| l.strip_prefix("codeword ")).unwrap().to_string();
    assert_eq!(codeword.len(), 3 * 8 + 6);
    assert!(codeword.starts_with("10110010"));
}
