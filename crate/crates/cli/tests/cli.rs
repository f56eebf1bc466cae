use std::path::PathBuf;
use std::process::{Command, Output};

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

fn etas(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_etas")).args(args).output().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

fn path(p: &PathBuf) -> &str {
    p.to_str().unwrap()
}

#[test]
fn validate_exit_codes() {
    let case1 = data("cd_cs_case1.json");
    let out = etas(&["validate", path(&case1)]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, std::fs::read_to_string(&case1).unwrap().replace("0.5671", "0.9")).unwrap();
    let out = etas(&["validate", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("common parameter a = 0.9"));

    let malformed = dir.path().join("malformed.json");
    std::fs::write(&malformed, "{\"a\": ").unwrap();
    assert_eq!(etas(&["validate", malformed.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(etas(&["validate", "/nonexistent/model.json"]).status.code(), Some(2));
}

#[test]
fn validate_lists_every_violation() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("sato.json");
    std::fs::write(
        &file,
        r#"{"base": {"alpha": 1.5, "atoms": [{"direction": [-1.0], "beta": 1.0, "lambda": 1.0}]}, "q": 0.5}"#,
    )
    .unwrap();
    let out = etas(&["validate", file.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let err = stderr(&out);
    assert_eq!(err.lines().count(), 2, "{err}");
    assert!(err.contains("outside (0, 1)") && err.contains("positive orthant"));
}

#[test]
fn cf_dispatch_and_defaults() {
    let model = data("cd_cs_case1.json");
    let out = etas(&["cf", path(&model), "--z", "0,0"]);
    assert_eq!(stdout(&out), "1,0\n");

    let at_default = stdout(&etas(&["cf", path(&model), "--z", "3.5,-2"]));
    let at_one = stdout(&etas(&["cf", path(&model), "--z", "3.5,-2", "--t", "1"]));
    assert_eq!(at_default, at_one);

    // IG(1, 1) as a tempered stable law: exp(-(sqrt(1 - 2iu) - 1))
    let ig = data("inverse_gaussian.json");
    let line = stdout(&etas(&["cf", path(&ig), "--z", "1.5"]));
    let (re, im) = line.trim().split_once(',').unwrap();
    let (re, im): (f64, f64) = (re.parse().unwrap(), im.parse().unwrap());
    let (sre, sim) = {
        // principal sqrt of 1 - 3i
        let r = 10f64.sqrt();
        (((r + 1.0) / 2.0).sqrt(), -((r - 1.0) / 2.0).sqrt())
    };
    let m = (1.0 - sre).exp();
    assert!((re - m * (-sim).cos()).abs() < 1e-14 && (im - m * (-sim).sin()).abs() < 1e-14);

    assert_eq!(etas(&["cf", path(&ig), "--z", "1,2"]).status.code(), Some(2));
}

#[test]
fn corr_curve_endpoints_and_usage() {
    let case1 = data("cd_cs_case1.json");
    let out = etas(&["corr-curve", path(&case1), "--t-min", "1e-3", "--t-max", "1109", "--points", "200"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let rows: Vec<(f64, f64)> = text
        .lines()
        .skip(1)
        .filter(|l| !l.starts_with('#'))
        .map(|l| {
            let (t, v) = l.split_once(',').unwrap();
            (t.parse().unwrap(), v.parse().unwrap())
        })
        .collect();
    assert_eq!(rows.len(), 200);
    assert_eq!(rows[0].0, 1e-3);
    assert_eq!(rows[199].0, 1109.0);
    assert!((rows[0].1 - 0.4128).abs() < 1e-3);
    assert!(text.contains("# limit_infinity=0.825614"));

    let independent = data("cd_cs_case02.json");
    let first = stdout(&etas(&["corr-curve", path(&independent), "--points", "2"]));
    let v: f64 = first.lines().nth(1).unwrap().split_once(',').unwrap().1.parse().unwrap();
    assert!(v.abs() < 1e-3);

    assert_eq!(etas(&["corr-curve", path(&case1), "--points", "1"]).status.code(), Some(2));
    assert_eq!(etas(&["corr-curve", path(&case1), "--t-min", "0"]).status.code(), Some(2));
}

#[test]
fn corr_curve_csv_round_trips() {
    let case1 = data("cd_cs_case1.json");
    let csv = stdout(&etas(&["corr-curve", path(&case1), "--points", "25", "--linear"]));
    let json: serde_json::Value =
        serde_json::from_str(&stdout(&etas(&["corr-curve", path(&case1), "--points", "25", "--linear", "--format", "json"])))
            .unwrap();
    let values = json["values"].as_array().unwrap();
    for (line, v) in csv.lines().skip(1).filter(|l| !l.starts_with('#')).zip(values) {
        let parsed: f64 = line.split_once(',').unwrap().1.parse().unwrap();
        assert!((parsed - v.as_f64().unwrap()).abs() <= 1e-12);
    }
}

#[test]
fn tables_match_published_rows() {
    let out = etas(&["tables", path(&data("cd_cs_case1.json")), "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let row = |table: &str, i: usize| {
        let r = &v[table][i];
        [r["limit_zero"].as_f64().unwrap(), r["limit_infinity"].as_f64().unwrap(), r["unit_time"].as_f64().unwrap()]
    };
    let close = |got: [f64; 3], want: [f64; 3]| got.iter().zip(want).all(|(g, w)| (g - w).abs() <= 5e-4);
    assert!(close(row("correlated", 0), [0.4128, 0.8256, 0.4175]));
    assert!(close(row("correlated", 2), [0.4159, 0.4201, 0.4158]));
    assert!(close(row("independent", 2), [0.0, 0.4201, 0.0048]));
    assert_eq!(row("correlated", 0), [0.4128, 0.8256, 0.4175]);
}

#[test]
fn mc_check_is_deterministic_and_enforces_floor() {
    let case1 = data("cd_cs_case1.json");
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str, workers: &str| {
        let report = dir.path().join(name);
        let out = etas(&[
            "mc-check", path(&case1), "--t", "1", "--samples", "20000", "--workers", workers,
            "--seed", "42", "--format", "json", "--output", report.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
        std::fs::read(report).unwrap()
    };
    let a = run("a.json", "1");
    let b = run("b.json", "3");
    assert_eq!(a, b);
    let report: serde_json::Value = serde_json::from_slice(&a).unwrap();
    assert_eq!(report["seed"], 42);
    assert!(report["checks"].as_array().unwrap().iter().all(|c| c["passed"] == true));

    let out = etas(&["mc-check", path(&case1), "--samples", "1000"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("floor"));
}

#[test]
fn mc_check_case1_full_size() {
    let out = etas(&["mc-check", path(&data("cd_cs_case1.json")), "--t", "1", "--samples", "1000000", "--seed", "42"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!(stderr(&out).starts_with("PASS"));
}

#[test]
fn mc_check_dumps_samples() {
    let dir = tempfile::tempdir().unwrap();
    let out = etas(&[
        "mc-check", path(&data("cd_cs_case1.json")), "--t", "2", "--samples", "10000",
        "--dump-samples", dir.path().to_str().unwrap(), "--output", dir.path().join("r.csv").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let y = std::fs::read_to_string(dir.path().join("returns_t2.csv")).unwrap();
    assert_eq!(y.lines().count(), 10_000);
    let s = std::fs::read_to_string(dir.path().join("subordinator_t2.csv")).unwrap();
    assert!(s.lines().all(|l| l.split(',').all(|x| x.parse::<f64>().unwrap() > 0.0)));
}

#[test]
fn moments_for_each_kind() {
    let out = etas(&["moments", path(&data("cd_cs_case1.json")), "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let zeta: f64 = 0.5770742573580936;
    assert!((v[0]["subordinator_mean"].as_f64().unwrap() - 1.0 / zeta).abs() < 1e-12);

    // IG(1, 1): mean 1, variance 1
    let out = etas(&["moments", path(&data("inverse_gaussian.json")), "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!((v["mean"][0].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert!((v["covariance"][0][0].as_f64().unwrap() - 1.0).abs() < 1e-12);

    let sato = data("sato_ig_factor.json");
    let unit: serde_json::Value = serde_json::from_str(&stdout(&etas(&["moments", path(&sato), "--format", "json"]))).unwrap();
    let four: serde_json::Value =
        serde_json::from_str(&stdout(&etas(&["moments", path(&sato), "--t", "4", "--format", "json"]))).unwrap();
    // t^q = 2
    assert!((four["mean"][1].as_f64().unwrap() - 2.0 * unit["mean"][1].as_f64().unwrap()).abs() < 1e-12);
}

#[test]
fn repeated_runs_are_byte_identical() {
    let case1 = data("cd_cs_case1.json");
    for args in [vec!["tables", path(&case1)], vec!["corr-curve", path(&case1), "--points", "30"]] {
        assert_eq!(etas(&args).stdout, etas(&args).stdout);
    }
}
