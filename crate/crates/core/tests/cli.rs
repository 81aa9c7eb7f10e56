use std::process::Command;

fn entconn() -> Command {
    Command::new(env!("CARGO_BIN_EXE_entconn"))
}

#[test]
fn no_arguments_prints_help_and_succeeds() {
    let out = entconn().output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for sub in [
        "harmonic-chain",
        "harmonic-bipartite",
        "harmonic-scaling",
        "spin-chain",
        "spin-random",
        "spin-bipartite",
        "monogamy-gaussian",
        "monogamy-spin",
        "f-curve",
    ] {
        assert!(text.contains(sub), "{sub} missing from help");
    }
}

#[test]
fn configuration_errors_exit_nonzero_with_the_flag() {
    let out = entconn()
        .args(["spin-chain", "--n", "99", "--sweep", "n_c:1:5"])
        .output()
        .unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("--n"));

    let out = entconn().args(["f-curve", "--bogus"]).output().unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("--bogus"));
}

#[test]
fn spin_sweep_csv_is_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let path = dir.path().join(name);
        let status = entconn()
            .args(["spin-random", "--n", "8", "--seeds", "6", "--seed", "41", "--sweep", "c_p:0.2:1:0.4", "-q", "--out"])
            .arg(&path)
            .status()
            .unwrap();
        assert!(status.success());
        std::fs::read(&path).unwrap()
    };
    let a = run("a.csv");
    let b = run("b.csv");
    assert_eq!(a, b);
    let text = String::from_utf8(a).unwrap();
    assert!(text.starts_with("alpha,sweep_value,mean,max,stddev,n_seeds"));
    assert_eq!(text.lines().count(), 4);
    assert!(dir.path().join("a.csv.meta").exists());
}

#[test]
fn f_curve_writes_one_row_per_alpha_and_n_c() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("f.csv");
    let status = entconn()
        .args(["f-curve", "--alpha", "0.1", "--alpha", "10", "--sweep", "n_c:1:20", "-q", "--out"])
        .arg(&path)
        .status()
        .unwrap();
    assert!(status.success());
    let rows = entconn::experiments::read_csv(&path).unwrap();
    assert_eq!(rows.len(), 40);
    assert!(rows.iter().all(|r| r.mean.unwrap() > 0.0));
    assert_eq!(rows[0].alpha, Some(0.1));
    assert_eq!(rows[39].alpha, Some(10.0));
}
