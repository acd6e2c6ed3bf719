use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use nonlocal_lwr::{run, SnapshotPlan};
use nonlocal_lwr_cli::output::parse_snapshot;
use nonlocal_lwr_cli::parse_config;
use tempfile::TempDir;

const IN_REGIME: &str = "\
domain.x_min = -1.5
domain.x_max = 1.5
grid.dx = 0.02
velocity.left = 1
velocity.right = 2
kernel.eta = 0.25
initial.left = 0.25
initial.right = 0.77
time.t_end = 0.3
output.snapshot_times = 0.1, 0.2
";

fn nonlocal_lwr(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nonlocal-lwr"))
        .args(args)
        .current_dir(dir)
        .env_remove("NONLOCAL_LWR_OUT")
        .output()
        .expect("binary runs")
}

fn with_config(text: &str) -> TempDir {
    let dir = TempDir::new().unwrap();
    fs::write(dir.path().join("case.cfg"), text).unwrap();
    dir
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn sorted_files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), fs::read(e.path()).unwrap())
        })
        .collect();
    files.sort();
    files
}

#[test]
fn run_writes_snapshots_that_round_trip_bit_exactly() {
    let dir = with_config(IN_REGIME);
    let out = nonlocal_lwr(dir.path(), &["run", "--config", "case.cfg", "--out", "res"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));

    let config = parse_config(IN_REGIME).unwrap();
    let traj = run(&config.scenario).unwrap();
    assert_eq!(traj.snapshots.len(), 4);
    for (k, field) in traj.snapshots.iter().enumerate() {
        let text = fs::read_to_string(dir.path().join(format!("res/snapshot_{k:04}.csv"))).unwrap();
        let back = parse_snapshot(&text).unwrap();
        assert_eq!(back.t.to_bits(), field.time().to_bits());
        let bits = |v: &[f64]| v.iter().map(|x| x.to_bits()).collect::<Vec<_>>();
        assert_eq!(bits(&back.rho), bits(field.values()));
    }
    let diag = fs::read_to_string(dir.path().join("res/diagnostics.csv")).unwrap();
    assert!(diag.starts_with("t,mass,min,max,tv_delta,conv_l1,conv_deriv_l1,rh_residual\n"));
    assert_eq!(diag.lines().count(), 5);
    assert!(!dir.path().join("res/warnings.txt").exists());
}

#[test]
fn repeated_runs_are_byte_identical() {
    let dir = with_config(IN_REGIME);
    for out in ["a", "b"] {
        let o = nonlocal_lwr(dir.path(), &["run", "--config", "case.cfg", "--out", out, "--jobs", "2"]);
        assert_eq!(code(&o), 0);
    }
    assert_eq!(sorted_files(&dir.path().join("a")), sorted_files(&dir.path().join("b")));
}

#[test]
fn environment_variable_overrides_out_flag() {
    let dir = with_config(IN_REGIME);
    let out = Command::new(env!("CARGO_BIN_EXE_nonlocal-lwr"))
        .args(["run", "--config", "case.cfg", "--out", "flag"])
        .current_dir(dir.path())
        .env("NONLOCAL_LWR_OUT", dir.path().join("env"))
        .output()
        .unwrap();
    assert_eq!(code(&out), 0);
    assert!(dir.path().join("env/snapshot_0000.csv").exists());
    assert!(!dir.path().join("flag").exists());
}

#[test]
fn out_of_regime_run_succeeds_with_a_warning_record() {
    let text = IN_REGIME.replace("velocity.left = 1", "velocity.left = 3");
    let dir = with_config(&text);
    let out = nonlocal_lwr(dir.path(), &["run", "--config", "case.cfg", "--out", "res"]);
    assert_eq!(code(&out), 0);
    let warnings = fs::read_to_string(dir.path().join("res/warnings.txt")).unwrap();
    assert!(warnings.contains("maximum principle"), "{warnings}");
}

#[test]
fn configuration_errors_exit_with_one() {
    let dir = with_config(&format!("{IN_REGIME}viscocity = 0.1\n"));
    let out = nonlocal_lwr(dir.path(), &["run", "--config", "case.cfg"]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("viscocity"));

    let dir = with_config(&IN_REGIME.replace("velocity.left = 1", "velocity.left = -1"));
    let out = nonlocal_lwr(dir.path(), &["run", "--config", "case.cfg"]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("v_left must be positive"));

    let out = nonlocal_lwr(dir.path(), &["run"]);
    assert_eq!(code(&out), 1);
    let out = nonlocal_lwr(dir.path(), &["teleport"]);
    assert_eq!(code(&out), 1);
    let out = nonlocal_lwr(dir.path(), &["run", "--config", "missing.cfg"]);
    assert_eq!(code(&out), 1);
}

#[test]
fn verify_passes_in_regime_and_on_constant_state() {
    let dir = with_config(IN_REGIME);
    let out = nonlocal_lwr(dir.path(), &["verify", "--config", "case.cfg", "--out", "res"]);
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert_eq!(code(&out), 0, "{stdout}");
    assert!(stdout.contains("PASS entropy inequalities"));
    assert!(!stdout.contains("FAIL"));

    let dir = with_config("preset = constant\ngrid.dx = 0.02\nverify.corpus_size = 3\n");
    let out = nonlocal_lwr(dir.path(), &["verify", "--config", "case.cfg", "--out", "res", "--seed", "11"]);
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert_eq!(code(&out), 0, "{stdout}");
    assert!(stdout.contains("PASS seeded corpus: seed 11, 3 runs"));
}

#[test]
fn verify_flags_a_glued_non_entropic_field() {
    let dir = with_config(
        "\
domain.x_min = -1
domain.x_max = 1
grid.dx = 0.01
velocity.left = 1
velocity.right = 1
model = local
initial.left = 0.8
initial.right = 0.2
time.t_end = 0.5
solver = frozen
",
    );
    let out = nonlocal_lwr(dir.path(), &["verify", "--config", "case.cfg", "--out", "res"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stdout).contains("FAIL entropy inequalities"));
    assert!(String::from_utf8_lossy(&out.stderr).contains("entropy inequalities"));
}

#[test]
fn counterexample_emits_numerical_and_oracle_solutions() {
    let dir = TempDir::new().unwrap();
    let out = nonlocal_lwr(dir.path(), &["counterexample", "--out", "cx"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let cx = dir.path().join("cx");
    for f in ["snapshot_0001.csv", "oracle_0001.csv", "overlay.csv", "warnings.txt"] {
        assert!(cx.join(f).exists(), "{f}");
    }
    let oracle = parse_snapshot(&fs::read_to_string(cx.join("oracle_0001.csv")).unwrap()).unwrap();
    let numerical = parse_snapshot(&fs::read_to_string(cx.join("snapshot_0001.csv")).unwrap()).unwrap();
    assert_eq!(oracle.t, 0.5);
    let l1: f64 = oracle.rho.iter().zip(&numerical.rho).map(|(a, b)| (a - b).abs() * 0.0025).sum();
    assert!(l1 < 0.02);
    assert!(numerical.rho.iter().cloned().fold(0.0, f64::max) > 0.85);
}

#[test]
fn experiment_subcommands_write_tables() {
    let dir = with_config(&IN_REGIME.replace("output.snapshot_times = 0.1, 0.2\n", "refine.levels = 3\n"));
    let out = nonlocal_lwr(dir.path(), &["refine", "--config", "case.cfg", "--out", "res"]);
    assert_eq!(code(&out), 0);
    // Three grids give two self-convergence errors.
    assert_eq!(fs::read_to_string(dir.path().join("res/refinement.csv")).unwrap().lines().count(), 3);

    let out = nonlocal_lwr(dir.path(), &["stability", "--config", "case.cfg", "--out", "res"]);
    assert_eq!(code(&out), 0);
    assert!(String::from_utf8_lossy(&out.stdout).contains("envelope holds"));

    let out = nonlocal_lwr(dir.path(), &["viscosity-sweep", "--config", "case.cfg", "--out", "res"]);
    assert_eq!(code(&out), 1, "grid too coarse for the default viscosity ladder");

    let sweep = IN_REGIME.replace("grid.dx = 0.02", "grid.dx = 0.01") + "viscosity.epsilons = 0.1, 0.05\n";
    let dir = with_config(&sweep);
    let out = nonlocal_lwr(dir.path(), &["viscosity-sweep", "--config", "case.cfg", "--out", "res"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(fs::read_to_string(dir.path().join("res/viscosity.csv")).unwrap().lines().count(), 3);
}

#[test]
fn snapshot_plan_from_config_matches_core() {
    let config = parse_config(IN_REGIME).unwrap();
    assert_eq!(config.scenario.snapshots, SnapshotPlan::Times(vec![0.1, 0.2]));
}
