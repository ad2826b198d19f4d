//! End-to-end checks of the experiment runner: config files, potential
//! files, output contents and exit codes.

use std::path::PathBuf;

use virasoro_dls::cli::run_strs;

fn repo_path(rel: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../..")
        .join(rel)
        .to_str()
        .unwrap()
        .to_string()
}

fn temp_out(name: &str) -> (PathBuf, String) {
    let dir = std::env::temp_dir().join(format!("vdls_cli_io_{name}"));
    let _ = std::fs::remove_dir_all(&dir);
    (dir.clone(), dir.to_str().unwrap().to_string())
}

#[test]
fn sample_experiment_config_parses_and_runs() {
    let (dir, out) = temp_out("sample_cfg");
    let cfg = repo_path("configs/experiment.cfg");
    let code = run_strs(&[
        "classify", "--config", &cfg, "--alpha", "0", "--beta", "1", "--b", "5", "--out", &out,
    ]);
    assert_eq!(code, 0);
    let text = std::fs::read_to_string(dir.join("classify.json")).unwrap();
    assert!(text.contains("\"tag\": \"HunterSaxton\""));
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn expression_potential_drives_continuum_check() {
    let (dir, out) = temp_out("vexpr");
    let spec = format!("file:{}", repo_path("configs/potential_vexpr.cfg"));
    let code = run_strs(&[
        "continuum-check",
        "--potential",
        &spec,
        "--profile",
        "sine:1,1+cosine:0.3,2",
        "--out",
        &out,
    ]);
    assert_eq!(code, 0);
    let verdict = std::fs::read_to_string(dir.join("verdict.json")).unwrap();
    assert!(verdict.contains("\"pass\": true"), "{verdict}");
    let csv = std::fs::read_to_string(dir.join("scaling.csv")).unwrap();
    assert!(csv.starts_with("eps,residual_maxnorm\n"));
    assert!(csv.contains("# fit_exponent = "));
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn general_density_file_drives_first_order_mode() {
    let (dir, out) = temp_out("uexpr");
    let spec = format!("file:{}", repo_path("configs/potential_uexpr.cfg"));
    let code = run_strs(&[
        "continuum-check",
        "--mode",
        "generic-u",
        "--potential",
        &spec,
        "--profile",
        "sine:1,1+cosine:0.3,2",
        "--set",
        "continuum.eps=1e-2,5e-3,2.5e-3,1.25e-3",
        "--out",
        &out,
    ]);
    assert_eq!(code, 0);
    let verdict = std::fs::read_to_string(dir.join("verdict.json")).unwrap();
    assert!(verdict.contains("\"leading_order\": 1"), "{verdict}");
    assert!(verdict.contains("\"pass\": true"), "{verdict}");
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn zero_velocity_simulation_is_a_constant_path() {
    let (dir, out) = temp_out("zero_vel");
    let code = run_strs(&[
        "simulate",
        "--n",
        "64",
        "--set",
        "simulate.velocity=constant:0",
        "--set",
        "simulate.central=0",
        "--set",
        "simulate.nsteps=5",
        "--out",
        &out,
    ]);
    assert_eq!(code, 0);
    let path_csv = std::fs::read_to_string(dir.join("path.csv")).unwrap();
    let rows: Vec<&str> = path_csv.lines().skip(1).collect();
    assert_eq!(rows.len(), 6);
    // All elements identical apart from the leading index column.
    let strip = |row: &str| row.split_once(',').unwrap().1.to_string();
    let first = strip(rows[0]);
    for row in &rows[1..] {
        assert_eq!(strip(row), first);
    }
    let report = std::fs::read_to_string(dir.join("report.json")).unwrap();
    assert!(report.contains("\"max_el1_residual\": 0.0"), "{report}");
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn validation_failures_exit_one() {
    let (_dir, out) = temp_out("bad_n");
    assert_eq!(run_strs(&["pde", "--n", "100", "--out", &out]), 1);
    assert_eq!(run_strs(&["pde", "--alpha", "0", "--beta", "0", "--out", &out]), 1);
    assert_eq!(
        run_strs(&["continuum-check", "--mode", "generic-u", "--out", &out]),
        1,
        "builtin potential is not a general density"
    );
}

#[test]
fn numerical_failures_exit_two() {
    let (dir, out) = temp_out("shock");
    // Dispersionless equation past its shock: aborts with a numerical error.
    let code = run_strs(&[
        "pde", "--n", "128", "--alpha", "1", "--beta", "0", "--b", "0", "--profile",
        "sine:1,1", "--t-final", "2", "--dt", "1e-3", "--out", &out,
    ]);
    assert_eq!(code, 2);
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn pde_outputs_have_the_documented_shape() {
    let (dir, out) = temp_out("pde_shape");
    let code = run_strs(&[
        "pde", "--n", "64", "--t-final", "0.02", "--dt", "1e-3",
        "--set", "pde.save_every=10", "--svg", "--out", &out,
    ]);
    assert_eq!(code, 0);
    let traj = std::fs::read_to_string(dir.join("trajectory.csv")).unwrap();
    let mut lines = traj.lines();
    let header = lines.next().unwrap();
    assert!(header.starts_with("t,v_0,v_1,"));
    assert_eq!(header.split(',').count(), 65);
    assert_eq!(lines.count(), 3); // t = 0, 0.01, 0.02
    let conserved = std::fs::read_to_string(dir.join("conserved.csv")).unwrap();
    assert!(conserved.starts_with("t,energy,mean\n"));
    assert!(dir.join("waterfall.svg").exists());
    let _ = std::fs::remove_dir_all(&dir);
}
