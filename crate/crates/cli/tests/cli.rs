mod common;

use common::*;
use std::f64::consts::PI;

fn w(eps0: f64, xi: f64) -> f64 {
    (1.0 + (2.0 * eps0).sqrt() * xi) * (-xi * xi).exp() / PI.sqrt()
}

#[test]
fn fig1_columns_match_closed_form() {
    let t = parse_csv(&qmeas_ok(&["fig1"]));
    let fig = &t["fig1"];
    let xi = fig.column("xi");
    assert_eq!(xi.len(), 601);
    for e in [0.0, 0.1, 0.2] {
        let col = fig.column(&format!("W_eps0={e}"));
        for (x, v) in xi.iter().zip(&col) {
            assert!((v - w(e, *x)).abs() < 1e-12);
        }
        let mid = xi.iter().position(|x| x.abs() < 1e-12).unwrap();
        assert!((col[mid] - 1.0 / PI.sqrt()).abs() < 1e-14);
    }
    let col = fig.column("W_eps0=0.2");
    let root = -1.0 / 0.4f64.sqrt();
    let k = xi.iter().position(|&x| x > root).unwrap();
    assert!(col[k - 1] < 0.0 && col[k] > 0.0);
    assert!(all_checks_pass(&t));
}

#[test]
fn fig1_custom_list_and_warning() {
    let out = qmeas(&["fig1", "--eps0", "0.05,0.3"]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("warning: eps0 = 0.3"));
    let t = parse_csv(&String::from_utf8(out.stdout).unwrap());
    assert_eq!(t["fig1"].columns, ["xi", "W_eps0=0.05", "W_eps0=0.3"]);
}

#[test]
fn output_is_byte_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#"{"survival": {"kind": "gamma", "tau": 0.05, "s": 2.0}, "position": {"step": 0.2}}"#);
    let cfg = cfg.to_str().unwrap();
    for fmt in ["csv", "json"] {
        let a = qmeas_ok(&["--config", cfg, "--format", fmt, "survival"]);
        let b = qmeas_ok(&["--config", cfg, "--format", fmt, "survival"]);
        assert_eq!(a, b);
    }
    let model = fixture("scattering_two_level.json");
    let m = model.to_str().unwrap();
    assert_eq!(qmeas_ok(&["scattering-demo", "--model", m]), qmeas_ok(&["scattering-demo", "--model", m]));
}

#[test]
fn out_flag_and_precision() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("fig.csv");
    let stdout = qmeas_ok(&["--out", path.to_str().unwrap(), "--precision", "6", "fig1"]);
    assert!(stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.lines().nth(3).unwrap().starts_with("-3.00000e0,"));
}

#[test]
fn json_format_round_trips() {
    let text = qmeas_ok(&["--format", "json", "asymptotics", "--sigma", "9,25"]);
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["command"], "asymptotics");
    let moments = &v["tables"][0];
    assert_eq!(moments["name"], "moments");
    assert_eq!(moments["rows"].as_array().unwrap().len(), 6);
    assert!(v["checks"].as_array().unwrap().iter().all(|c| c["passed"] == true));
}

#[test]
fn measure_equal_superposition() {
    let f = fixture("two_level.json");
    let t = parse_csv(&qmeas_ok(&["measure", "--fixture", f.to_str().unwrap()]));
    let p = t["outcomes"].column("p_ideal");
    assert!(p.iter().all(|x| (x - 0.5).abs() < 1e-14));
    assert_eq!(t["outcomes"].column("p_ideal"), t["outcomes"].column("p_nonideal"));
    assert!(all_checks_pass(&t));
}

#[test]
fn measure_nonideal_column_moves_with_tau() {
    let dir = tempfile::tempdir().unwrap();
    let f = fixture("degenerate4.json");
    let cfg = write_config(
        dir.path(),
        &format!(r#"{{"survival": {{"kind": "gamma", "tau": 0.3, "s": 2}}, "measure": {{"fixture": "{}"}}}}"#, f.display()),
    );
    let t = parse_csv(&qmeas_ok(&["--config", cfg.to_str().unwrap(), "measure"]));
    let o = &t["outcomes"];
    assert_eq!(o.column("degeneracy"), [1.0, 3.0]);
    let ideal = o.column("p_ideal");
    let non = o.column("p_nonideal");
    assert!((ideal.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    assert!((non.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    assert!((ideal[0] - non[0]).abs() > 1e-4);
    assert!(all_checks_pass(&t));
    let post = &t["post_states"];
    assert_eq!(post.rows.len(), 2 * 16);
}

#[test]
fn survival_ideal_run_is_minimum_uncertainty() {
    let t = parse_csv(&qmeas_ok(&["survival"]));
    let s = &t["summary"];
    assert!((s.lookup("product") - 0.5).abs() < 1e-12);
    assert_eq!(s.lookup("Q"), 1.0);
    let pos = &t["position"];
    assert_eq!(pos.column("p_ideal"), pos.column("p_first_order"));
    assert!(all_checks_pass(&t));
}

#[test]
fn survival_product_matches_closed_form() {
    let dir = tempfile::tempdir().unwrap();
    // l = τ, ε₀ = 2τ² = 0.02
    let cfg = write_config(dir.path(), r#"{"survival": {"tau": 0.1}}"#);
    let out = qmeas(&["--config", cfg.to_str().unwrap(), "survival"]);
    assert!(out.status.success());
    assert!(out.stderr.is_empty());
    let t = parse_csv(&String::from_utf8(out.stdout).unwrap());
    let s = &t["summary"];
    assert!((s.lookup("eps0") - 0.02).abs() < 1e-15);
    assert!((s.lookup("product") - 0.5 * 0.98f64.sqrt()).abs() < 1e-8);
    assert!(all_checks_pass(&t));
}

#[test]
fn survival_momentum_block_is_unchanged() {
    let dir = tempfile::tempdir().unwrap();
    let ideal = parse_csv(&qmeas_ok(&["survival"]));
    let cfg = write_config(dir.path(), r#"{"survival": {"kind": "gamma", "tau": 0.08, "s": 1.5}}"#);
    let non = parse_csv(&qmeas_ok(&["--config", cfg.to_str().unwrap(), "survival"]));
    for col in ["p", "p_momentum_ideal", "p_momentum_survival"] {
        assert_eq!(ideal["momentum"].raw_column(col), non["momentum"].raw_column(col));
    }
    assert_eq!(non["momentum"].raw_column("p_momentum_ideal"), non["momentum"].raw_column("p_momentum_survival"));
}

#[test]
fn survival_warns_above_validity_threshold() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#"{"survival": {"tau": 0.3}, "position": {"exact": false}}"#);
    let out = qmeas(&["--config", cfg.to_str().unwrap(), "survival"]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("warning: eps0"));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("# warning: eps0"));
    assert!(!parse_csv(&text)["position"].columns.contains(&"p_exact".to_string()));
}

#[test]
fn asymptotics_columns() {
    let t = parse_csv(&qmeas_ok(&["asymptotics"]));
    let m = &t["moments"];
    let sig = m.column("sigma");
    let n = m.column("n");
    let exact = m.column("exact");
    let quad = m.column("quadrature");
    let k = (0..sig.len()).find(|&i| sig[i] == 25.0 && n[i] == 0.0).unwrap();
    assert!((exact[k] - quad[k]).abs() < 1e-12);
    let q = t["renormalization"].column("q_minus_1_exact");
    assert!(q.windows(2).all(|p| p[1] < p[0]));
    let rel = t["renormalization"].column("relative_error");
    assert!(rel.windows(2).all(|p| p[1] < p[0]));
    assert!(all_checks_pass(&t));
}

#[test]
fn scattering_free_model_is_trivial() {
    let f = fixture("scattering_free.json");
    let t = parse_csv(&qmeas_ok(&["scattering-demo", "--model", f.to_str().unwrap(), "--nu", "0.1,0.01"]));
    for col in ["unitarity_defect", "isometry_defect_plus", "isometry_defect_minus"] {
        assert!(t["defects"].column(col).iter().all(|&d| d == 0.0), "{col}");
    }
    assert!(t["normalization"].column("n_lambda").iter().all(|&n| n == 1.0));
    assert!(all_checks_pass(&t));
}

#[test]
fn scattering_sweep_is_monotone() {
    let f = fixture("scattering_two_level.json");
    let t = parse_csv(&qmeas_ok(&["scattering-demo", "--model", f.to_str().unwrap()]));
    let nu = t["defects"].column("nu");
    let d = t["defects"].column("unitarity_defect");
    assert!(nu.windows(2).all(|p| p[1] < p[0]));
    // With no continuum the defect grows as ν shrinks.
    assert!(d.windows(2).all(|p| p[1] >= p[0]), "{d:?}");
    assert!(d.iter().all(|&x| x < 1e-6));
    assert!(t["normalization"].column("time_spread").iter().all(|&s| s <= 1e-10));
    let probe = &t["probe"];
    assert_eq!(probe.rows.len(), 8);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write_config(dir.path(), r#"{"packet": {"a": 1.0, "width": 2.0}}"#);
    assert_eq!(qmeas(&["--config", bad.to_str().unwrap(), "fig1"]).status.code(), Some(2));
    assert_eq!(qmeas(&["--precision", "0", "fig1"]).status.code(), Some(2));
    assert_eq!(qmeas(&["measure"]).status.code(), Some(2));
    assert_eq!(qmeas(&["measure", "--fixture", "/nonexistent.json"]).status.code(), Some(2));
    let nh = fixture("scattering_nonhermitian.json");
    let out = qmeas(&["scattering-demo", "--model", nh.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Hermitian"));
    let wide = write_config(dir.path(), r#"{"survival": {"tau": 0.9}}"#);
    assert_eq!(qmeas(&["--config", wide.to_str().unwrap(), "survival"]).status.code(), Some(3));
    let gamma_exp = write_config(dir.path(), r#"{"survival": {"kind": "exponential", "tau": 0.1, "s": 2}}"#);
    assert_eq!(qmeas(&["--config", gamma_exp.to_str().unwrap(), "survival"]).status.code(), Some(2));
}
