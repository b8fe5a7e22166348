use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
}

fn szego(args: &[&str], envs: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_szego"));
    cmd.args(args).env_remove("SZEGO_TOLERANCES");
    for (k, v) in envs {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn run_ok(args: &[&str]) -> Output {
    let out = szego(args, &[]);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn record(dir: &Path, name: &str) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(dir.join(format!("{name}.json"))).unwrap())
        .unwrap()
}

#[test]
fn free_sum_rule_ledger() {
    let dir = tempfile::tempdir().unwrap();
    let spec = fixture("free.json");
    run_ok(&[
        "sumrule",
        spec.to_str().unwrap(),
        "--n",
        "60",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    let r = &record(dir.path(), "sumrule")["result"];
    assert!(r["z"]["value"].as_f64().unwrap().abs() < 1e-8);
    assert!(r["e0"].as_f64().unwrap().abs() < 1e-8);
    for a in r["a0_partial"].as_array().unwrap() {
        assert!(a.as_f64().unwrap().abs() < 1e-8);
    }
    let csv = std::fs::read_to_string(dir.path().join("sumrule_ledger.csv")).unwrap();
    assert_eq!(csv.lines().next().unwrap(), "n,a0_partial,residual,bridge");
    assert_eq!(csv.lines().count(), 61);
}

#[test]
fn free_verify_meets_the_chebyshev_bound() {
    let dir = tempfile::tempdir().unwrap();
    let spec = fixture("free.json");
    let out = dir.path().to_str().unwrap();
    run_ok(&[
        "verify",
        spec.to_str().unwrap(),
        "--n-list",
        "20,60",
        "--radius",
        "0.8",
        "--out",
        out,
    ]);
    let r = &record(dir.path(), "verify")["result"];
    let rows = r["pointwise"].as_array().unwrap();
    assert_eq!(rows[1]["n"], 60);
    // 0.8^122 / (1 - 0.64) is far below this.
    assert!(rows[1]["sup_error"].as_f64().unwrap() < 1e-6);
}

#[test]
fn rank_one_mass_gives_one_simple_bound_state() {
    let dir = tempfile::tempdir().unwrap();
    let spec = fixture("rank_one_mass.json");
    run_ok(&[
        "check-measure",
        spec.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    let states = record(dir.path(), "check-measure")["result"]["bound_states"].clone();
    assert_eq!(states.as_array().unwrap().len(), 1);
    assert!((states[0]["z"]["re"].as_f64().unwrap() - 0.5).abs() < 1e-12);
    assert_eq!(states[0]["multiplicity"], 1);

    run_ok(&[
        "blaschke",
        spec.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    let factors = record(dir.path(), "blaschke")["result"]["factors"].clone();
    assert_eq!(factors[0]["rank"], 1);
    assert!(factors[0]["kernel_angle"].as_f64().unwrap() < 1e-6);
}

#[test]
fn tables_use_row_major_re_im_pairs() {
    let dir = tempfile::tempdir().unwrap();
    let spec = fixture("twisted.json");
    run_ok(&[
        "recurrence",
        spec.to_str().unwrap(),
        "--n",
        "4",
        "--type",
        "3",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    let csv = std::fs::read_to_string(dir.path().join("recurrence_jacobi.csv")).unwrap();
    let header: Vec<&str> = csv.lines().next().unwrap().split(',').collect();
    assert_eq!(header.len(), 1 + 2 * 8);
    assert_eq!(header[1..5], ["A00_re", "A00_im", "A01_re", "A01_im"]);
    // Type 3: A_n lower triangular with positive diagonal.
    for line in csv.lines().skip(1) {
        let v: Vec<f64> = line.split(',').map(|x| x.parse().unwrap()).collect();
        assert!(
            v[3].abs() < 1e-12 && v[4].abs() < 1e-12,
            "A01 = {} + {}i",
            v[3],
            v[4]
        );
        assert!(v[1] > 0.0 && v[7] > 0.0);
    }
    assert_eq!(csv.lines().count(), 5);
}

#[test]
fn repeated_runs_write_identical_files() {
    let spec = fixture("twisted.json");
    let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
    for cmd in [
        ["limit", "--radius", "0.7"],
        ["sumrule", "--n", "30"],
        ["factorize", "--order", "64"],
    ] {
        for d in &dirs {
            let mut args = vec![
                cmd[0],
                spec.to_str().unwrap(),
                cmd[1],
                cmd[2],
                "--out",
                d.path().to_str().unwrap(),
            ];
            args.retain(|a| !a.is_empty());
            run_ok(&args);
        }
    }
    let mut names: Vec<_> = std::fs::read_dir(dirs[0].path())
        .unwrap()
        .map(|e| e.unwrap().file_name())
        .collect();
    names.sort();
    assert_eq!(names.len(), 6);
    for n in names {
        let a = std::fs::read(dirs[0].path().join(&n)).unwrap();
        let b = std::fs::read(dirs[1].path().join(&n)).unwrap();
        assert!(a == b, "{n:?} differs between runs");
    }
}

#[test]
fn manifest_records_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let spec = fixture("free.json");
    let out = szego(
        &[
            "factorize",
            spec.to_str().unwrap(),
            "--order",
            "16",
            "--out",
            dir.path().to_str().unwrap(),
        ],
        &[("SZEGO_TOLERANCES", r#"{"fact": 1e-6}"#)],
    );
    assert!(out.status.success());
    let m = &record(dir.path(), "factorize")["manifest"];
    assert_eq!(m["command"]["command"], "factorize");
    assert_eq!(m["command"]["order"], 16);
    assert_eq!(m["tolerance_overrides"]["fact"], 1e-6);
    assert!(m["seed"].is_null());
    assert_eq!(m["spec_sha256"].as_str().unwrap().len(), 64);
}

type Env<'a> = Vec<(&'a str, &'a str)>;

fn exit_code(args: &[&str], envs: &[(&str, &str)]) -> (i32, String) {
    let out = szego(args, envs);
    (
        out.status.code().unwrap(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

#[test]
fn exit_codes_by_error_class() {
    let f = |n: &str| fixture(n).to_str().unwrap().to_owned();
    let cases: Vec<(Vec<String>, Env, i32, &str)> = vec![
        (
            vec!["check-measure".into(), f("malformed.json")],
            vec![],
            2,
            "masses[0].energy",
        ),
        (
            vec!["check-measure".into(), f("does_not_exist.json")],
            vec![],
            2,
            "parse error",
        ),
        (vec!["recurrence".into(), f("free.json")], vec![], 2, "--n"),
        (
            vec!["check-measure".into(), f("free.json")],
            vec![("SZEGO_TOLERANCES", r#"{"bogus": 1}"#)],
            2,
            "bogus",
        ),
        (
            vec!["check-measure".into(), f("non_hermitian_mass.json")],
            vec![],
            3,
            "mass 1: weight is not Hermitian",
        ),
        (
            vec!["check-measure".into(), f("mass_on_support.json")],
            vec![],
            3,
            "mass 1: E = 1.5 inside [-2,2]",
        ),
        (
            vec!["check-measure".into(), f("singular_table.json")],
            vec![],
            3,
            "Szegő condition",
        ),
        (
            vec![
                "limit".into(),
                f("free.json"),
                "--radius".into(),
                "1.5".into(),
            ],
            vec![],
            3,
            "radius",
        ),
        (
            vec!["factorize".into(), f("singular_table.json")],
            vec![],
            4,
            "not positive definite",
        ),
        (
            vec![
                "recurrence".into(),
                f("singular_table.json"),
                "--n".into(),
                "6".into(),
            ],
            vec![],
            4,
            "lost positivity",
        ),
    ];
    for (args, envs, code, needle) in cases {
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        let (got, stderr) = exit_code(&args, &envs);
        assert_eq!(got, code, "{args:?}: {stderr}");
        assert!(stderr.contains(needle), "{args:?}: {stderr}");
    }

    // An output path that is a regular file cannot be created as a directory.
    let blocker = tempfile::NamedTempFile::new().unwrap();
    let (got, stderr) = exit_code(
        &[
            "check-measure",
            &f("free.json"),
            "--out",
            blocker.path().to_str().unwrap(),
        ],
        &[],
    );
    assert_eq!(got, 5, "{stderr}");
}
