use std::process::{Command, Output};

fn bgls(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bgls")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

/// Data rows of a CSV artifact: after the comment lines and the header.
fn data_rows(text: &str) -> Vec<Vec<String>> {
    text.lines().filter(|l| !l.starts_with('#')).skip(1).map(|l| l.split(',').map(String::from).collect()).collect()
}

#[test]
fn boyd_table_final_slope() {
    let o = bgls(&["boyd", "--interval", "2,4", "--psi", "canonical", "--levels", "6"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.lines().any(|l| l == "block,side,s,h,slope"));
    let rows = data_rows(&text);
    assert_eq!(rows.len(), 12);
    let slope: f64 = rows.last().unwrap()[4].parse().unwrap();
    assert!((slope - 0.5).abs() < 1e-3, "{slope}");
}

#[test]
fn criteria_table_has_five_rows() {
    let o = bgls(&["criteria", "--interval", "2,4", "--alpha", "0.6", "--beta", "0.3"]);
    assert!(o.status.success());
    let rows = data_rows(&stdout(&o));
    let got: Vec<(&str, &str)> = rows.iter().map(|r| (r[0].as_str(), r[2].as_str())).collect();
    assert_eq!(
        got,
        [("P_alpha", "true"), ("Q_beta", "false"), ("maximal", "true"), ("hilbert", "true"), ("fourier", "true")]
    );
}

#[test]
fn fundfn_default_sweep() {
    let o = bgls(&["fundfn", "--interval", "2,4", "--psi", "one"]);
    let text = stdout(&o);
    assert!(text.starts_with("# quantity=phi, grid_kind=log10, tolerance=1e-10, version="));
    let rows = data_rows(&text);
    assert_eq!(rows.len(), 13);
    // φ(δ) = max(δ^{1/2}, δ^{1/4}) for ψ ≡ 1 on (2,4)
    for r in &rows {
        let (d, phi): (f64, f64) = (r[0].parse().unwrap(), r[1].parse().unwrap());
        let want = d.sqrt().max(d.powf(0.25));
        assert!((phi - want).abs() < 1e-9 * want, "{d}: {phi}");
    }
}

#[test]
fn exit_codes() {
    let o = bgls(&["norm", "--interval", "2,4", "--psi", "power(1, 2"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("1:11"));
    assert_eq!(bgls(&["norm", "--interval", "4,2"]).status.code(), Some(2));
    assert_eq!(bgls(&["frobnicate", "--interval", "2,4"]).status.code(), Some(2));
    assert_eq!(bgls(&["--bogus"]).status.code(), Some(2));
    assert_eq!(bgls(&["matrix-dilation", "--interval", "2,4", "--matrix", "1,2,2,4"]).status.code(), Some(3));
    let o = bgls(&["probe", "--interval", "2,4", "--psi", "const(1)", "--alpha", "0.7"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("bgls: probe:"));
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    let out = dir.path().join("out.json");
    std::fs::write(&cfg, "command = \"dilation-norm\"\ninterval = \"2,4\"\npsi = \"canonical\"\ns = [3.0]\nformat = \"json\"\n").unwrap();
    let o = bgls(&["--config", cfg.to_str().unwrap(), "--s", "2", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["config"]["s"], "2");
    let row = &v["rows"][0];
    assert_eq!(row[0], 2.0);
    // φ(ν ≡ 1, 2) = 2^{1/2}
    assert!((row[1].as_f64().unwrap() - 2f64.sqrt()).abs() < 1e-12);
    assert_eq!(row[3], "equality");

    std::fs::write(&cfg, "command = \"norm\"\ninterval = \"2,4\"\npsi = \"prod(one, sqr(2))\"\n").unwrap();
    let o = bgls(&["--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("'psi' at 3:18"));
}

#[test]
fn output_is_deterministic() {
    let args = ["shimogaki", "--interval", "2,4", "--levels", "4", "--format", "json"];
    let (a, b) = (bgls(&args), bgls(&args));
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn verify_all_is_the_gate() {
    let o = bgls(&["verify-all"]);
    let err = String::from_utf8_lossy(&o.stderr);
    assert_eq!(err.lines().filter(|l| l.starts_with("PASS criterion")).count(), 9, "{err}");
    assert_eq!(o.status.code(), Some(0));
}
