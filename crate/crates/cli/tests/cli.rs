use std::fs;
use std::process::{Command, Output};

use specloc_cli::{parse_grid, parse_resolution};

fn localizer(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_localizer")).args(args).env("LOCALIZER_THREADS", "1").output().expect("binary runs")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn grid_syntax() {
    let g = parse_grid("0.05:0.5:10").unwrap();
    assert_eq!(g.len(), 10);
    assert_eq!(g[0], 0.05);
    assert!((g[9] - 0.5).abs() < 1e-15);
    assert_eq!(parse_grid("8:16:5").unwrap(), vec![8.0, 10.0, 12.0, 14.0, 16.0]);
    assert_eq!(parse_grid("8, 12,16").unwrap(), vec![8.0, 12.0, 16.0]);
    assert_eq!(parse_grid("3").unwrap(), vec![3.0]);
    assert!(parse_grid("").is_err());
    assert!(parse_grid("1:2:0").is_err());
    assert!(parse_grid("1:2").is_err());
    assert!(parse_grid("a,b").is_err());
    assert_eq!(parse_resolution("400x200").unwrap(), (400, 200));
    assert!(parse_resolution("400").is_err());
}

#[test]
fn sweep_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let paths: Vec<String> = ["a.csv", "b.csv"].iter().map(|n| dir.path().join(n).to_string_lossy().into_owned()).collect();
    for p in &paths {
        let o = localizer(&["sweep", "--model", "qwz-scaled", "--m", "3", "--flatten", "none", "--kappa", "0.7,1.0", "--rho", "8:10:2", "--no-timing", "--out", p]);
        assert!(o.status.success(), "{}", stderr(&o));
    }
    let (a, b) = (fs::read(&paths[0]).unwrap(), fs::read(&paths[1]).unwrap());
    assert!(a == b, "outputs differ");
    let text = String::from_utf8(a).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[0].starts_with("# config_hash: ") && lines[0].len() == "# config_hash: ".len() + 64);
    assert!(lines[1].starts_with("# config: {"));
    assert_eq!(lines[2], "kappa,rho,valid,n_plus,n_minus,n_zero,half_signature,min_abs_eig,wall_ms");
    assert_eq!(lines.len(), 3 + 4);
    for row in &lines[3..] {
        let cells: Vec<&str> = row.split(',').collect();
        assert_eq!(cells.len(), 9);
        assert_eq!(cells[2], "true");
        assert_eq!(cells[6], "0");
        assert_eq!(cells[8], "0.000");
    }
}

#[test]
fn config_hash_tracks_the_model() {
    let hash = |m: &str| {
        let o = localizer(&["oracle", "chern", "--m", m, "--nk", "12"]);
        assert!(o.status.success(), "{}", stderr(&o));
        let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
        (v["config_hash"].as_str().unwrap().to_string(), v["result"]["chern"].as_i64().unwrap())
    };
    let (h1, c1) = hash("1");
    let (h1b, _) = hash("1");
    let (h3, c3) = hash("3");
    assert_eq!(h1, h1b);
    assert_ne!(h1, h3);
    assert_eq!((c1.abs(), c3), (1, 0));
}

#[test]
fn empty_grid_is_a_config_error() {
    let o = localizer(&["sweep", "--kappa", "", "--rho", "8"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("empty grid"), "{}", stderr(&o));
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.toml");
    fs::write(&cfg, "rho = \"8:16:0\"\n").unwrap();
    let o = localizer(&["sweep", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn unknown_config_keys_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.toml");
    fs::write(&cfg, "kapa = \"0.1\"\n").unwrap();
    let o = localizer(&["compute", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn crosscheck_trivial_phase_agrees() {
    let o = localizer(&["crosscheck", "--m", "3", "--rho", "4", "--kappa", "0.2", "--nk", "20", "--crosscheck"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let r = &v["result"];
    assert_eq!(r["agree"], true);
    assert_eq!(r["chern"]["chern"], 0);
    assert_eq!(r["fredholm"]["index"], 0);
    assert_eq!(r["localizer"]["half_signature"], 0);
}

#[test]
fn crosscheck_gapless_model_fails() {
    let o = localizer(&["crosscheck", "--m", "2", "--rho", "4"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("not an insulator"), "{}", stderr(&o));
}

#[test]
fn compute_needs_override_outside_window() {
    let o = localizer(&["compute", "--m", "1", "--kappa", "0.1", "--rho", "4"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("admissible window"));
    let o = localizer(&["compute", "--m", "1", "--kappa", "0.1", "--rho", "4", "--allow-invalid"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stderr(&o).contains("warning"));
}

#[test]
fn compute_dumps_matrix_market() {
    let dir = tempfile::tempdir().unwrap();
    let mtx = dir.path().join("l.mtx");
    let o = localizer(&[
        "compute", "--model", "qwz-scaled", "--m", "3", "--flatten", "none", "--kappa", "1.5", "--rho", "8", "--crosscheck", "--dump-matrix", mtx.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["result"]["params"]["valid"], true);
    assert_eq!(v["result"]["half_signature"], 0);
    let dim = v["result"]["dim"].as_u64().unwrap() as usize;
    let text = fs::read_to_string(&mtx).unwrap();
    assert!(text.starts_with("%%MatrixMarket matrix coordinate complex hermitian"));
    let l: specloc::Sparse = specloc::linalg::mm::read(text.as_bytes()).unwrap();
    assert_eq!((l.rows(), l.cols()), (dim, dim));
}

#[test]
fn inline_model_from_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.toml");
    fs::write(
        &cfg,
        "model = \"inline\"\nkappa = \"0.5\"\nrho = \"5\"\nallow_invalid = true\n\n[hoppings]\ninternal_dim = 1\n\n[[hoppings.hoppings]]\ndisplacement = [0, 0]\nmatrix = [[1.0, 0.0]]\n",
    )
    .unwrap();
    let o = localizer(&["compute", "--config", cfg.to_str().unwrap(), "--flatten", "none"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["result"]["half_signature"], 0);
    assert_eq!(v["config"]["model"]["source"], "inline");
}

#[test]
fn degree_command() {
    let o = localizer(&["fuzzy", "degree", "--grid", "100x50"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["result"]["map"]["degree"], 1);
    assert_eq!(v["result"]["antipode"]["degree"], -1);
}

#[test]
fn fuzzy_width_csv() {
    let o = localizer(&["fuzzy", "width", "--rho", "5,6"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = String::from_utf8(o.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[2], "rho,sphere_defect,comm_12,comm_13,comm_23,width");
    assert_eq!(lines.len(), 5);
}
