//! Subcommand drivers. Each writes its files into the output directory and a
//! short report to stdout.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use log::{info, warn};
use rayon::prelude::*;
use nonlocal_lwr::analysis::{
    convergence_order, default_kappas, diagnostics_with, entropy_residuals, extract_traces,
    stability_experiment, DiagnosticRecord, TestFamily,
};
use nonlocal_lwr::hyperbolic::{riemann_local_exact, LocalRiemannSolution};
use nonlocal_lwr::viscous::vanishing_viscosity_study;
use nonlocal_lwr::{
    presets, run, DensityField, Error, FluxModel, InitialProfile, Scenario, SnapshotPlan, Trajectory,
};

use crate::config::{parse_config, ConfigError, Evolution, RunConfig};
use crate::output::{diagnostics_csv, float, snapshot_csv_values, write_snapshots};

const BOUNDS_TOL: f64 = 1e-10;
const MASS_TOL: f64 = 1e-12;
const CONV_TOL: f64 = 1e-8;
const CORPUS_DX: f64 = 0.01;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error("solver error: {0}")]
    Solver(#[from] Error),
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
}

impl CliError {
    /// 1 usage or configuration (including inputs the core rejects up
    /// front), 2 invariant violation, 3 solver or i/o failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Config(_) => 1,
            CliError::Solver(
                Error::InvalidArgument(_)
                | Error::InvalidScenario(_)
                | Error::EpsTooSmall { .. }
                | Error::NonTilingDomain { .. }
                | Error::NonPositiveEta(_)
                | Error::OutOfRangeDensity { .. }
                | Error::UnsupportedConfiguration(_),
            ) => 1,
            CliError::Invariant(_) | CliError::Solver(Error::InvariantViolation(_)) => 2,
            CliError::Solver(_) | CliError::Io(_) => 3,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

#[derive(Debug, Clone)]
pub struct Context {
    pub out_dir: PathBuf,
    pub seed: Option<u64>,
}

impl Context {
    fn prepare(&self) -> CliResult<&Path> {
        fs::create_dir_all(&self.out_dir)?;
        Ok(&self.out_dir)
    }
}

/// Runs the configured solver, or holds the initial data fixed for
/// `solver = frozen`, producing snapshots according to `plan`.
pub fn trajectory(config: &RunConfig, plan: SnapshotPlan) -> CliResult<Trajectory> {
    let scenario = config.scenario.clone().with_snapshots(plan);
    match config.evolution {
        Evolution::Solver => Ok(run(&scenario)?),
        Evolution::Frozen => {
            let field = scenario.initial_field()?;
            let gap = scenario.cfl * scenario.grid.dx() / scenario.velocity.v_max();
            let mut times = vec![0.0];
            match &scenario.snapshots {
                SnapshotPlan::EveryStep => {
                    let steps = (scenario.t_end / gap).ceil() as usize;
                    times.extend((1..=steps).map(|k| (k as f64 * gap).min(scenario.t_end)));
                }
                SnapshotPlan::Times(ts) => times.extend(ts.iter().copied().filter(|t| *t > 0.0)),
                SnapshotPlan::Final => {}
            }
            if scenario.t_end > 0.0 && times.last() != Some(&scenario.t_end) {
                times.push(scenario.t_end);
            }
            times.dedup();
            let snapshots = times.into_iter().map(|t| field.clone().with_time(t)).collect();
            Ok(Trajectory::from_snapshots(
                scenario.grid,
                scenario.velocity,
                scenario.model,
                scenario.solver,
                snapshots,
            ))
        }
    }
}

fn report_warnings(dir: &Path, config: &RunConfig, traj: &Trajectory) -> CliResult<()> {
    let mut all: Vec<&String> = config.warnings.iter().collect();
    for w in &traj.warnings {
        if !all.contains(&w) {
            all.push(w);
        }
    }
    if all.is_empty() {
        return Ok(());
    }
    let mut text = String::new();
    for w in all {
        warn!("{w}");
        let _ = writeln!(text, "warning: {w}");
    }
    fs::write(dir.join("warnings.txt"), text)?;
    Ok(())
}

pub fn cmd_run(config: &RunConfig, ctx: &Context) -> CliResult<()> {
    let dir = ctx.prepare()?;
    let traj = trajectory(config, config.scenario.snapshots.clone())?;
    let count = write_snapshots(dir, "snapshot", &traj.snapshots)?;
    let records = diagnostics_with(&traj, config.scenario.tv_delta());
    fs::write(dir.join("diagnostics.csv"), diagnostics_csv(&records))?;
    report_warnings(dir, config, &traj)?;
    let (lo, hi) = traj.extremes();
    println!(
        "run: {} steps to t = {}, {count} snapshots in {}; density range [{lo}, {hi}]",
        traj.step_count(),
        traj.final_time(),
        dir.display()
    );
    Ok(())
}

struct Check {
    name: String,
    outcome: Option<bool>,
    detail: String,
}

impl Check {
    fn new(name: &str, ok: bool, detail: String) -> Self {
        Self { name: name.into(), outcome: Some(ok), detail }
    }

    fn skip(name: &str, why: &str) -> Self {
        Self { name: name.into(), outcome: None, detail: why.into() }
    }
}

/// Bounds, mass balance and convolution bounds over a set of records.
fn diagnostic_checks(
    scenario: &Scenario,
    initial: &DensityField,
    records: &[DiagnosticRecord],
    extremes: (f64, f64),
) -> Vec<Check> {
    let mut checks = Vec::new();
    if scenario.velocity.v_left() <= scenario.velocity.v_right() {
        let (lo, hi) = extremes;
        checks.push(Check::new(
            "density bounds",
            lo >= -BOUNDS_TOL && hi <= 1.0 + BOUNDS_TOL,
            format!("range [{lo:.6e}, {hi:.15}]"),
        ));
    } else {
        checks.push(Check::skip("density bounds", "v_left > v_right: the maximum principle is not guaranteed"));
    }
    let defect = records.iter().map(|r| r.mass_defect).fold(0.0, f64::max);
    checks.push(Check::new("mass balance", defect <= MASS_TOL, format!("max relative defect {defect:.3e}")));
    match (&scenario.model, scenario.initial.is_integrable()) {
        (FluxModel::NonLocal(kernel), true) => {
            let norm0 = initial.l1_norm();
            let conv = records.iter().filter_map(|r| r.conv_l1).fold(0.0, f64::max);
            let deriv = records.iter().filter_map(|r| r.conv_deriv_l1).fold(0.0, f64::max);
            let bound = 2.0 * kernel.w0() * norm0;
            checks.push(Check::new(
                "convolution bounds",
                conv <= norm0 + CONV_TOL && deriv <= bound + CONV_TOL,
                format!("L1 {conv:.6e} <= {norm0:.6e}, derivative L1 {deriv:.6e} <= {bound:.6e}"),
            ));
        }
        (FluxModel::NonLocal(_), false) => {
            checks.push(Check::skip("convolution bounds", "initial data not integrable"))
        }
        (FluxModel::Local, _) => checks.push(Check::skip("convolution bounds", "local model")),
    }
    checks
}

fn corpus_check(seed: u64, size: usize) -> CliResult<Check> {
    let corpus = presets::random_corpus(seed, size, CORPUS_DX)?;
    let outcomes = corpus
        .par_iter()
        .enumerate()
        .map(|(k, scenario)| {
            let traj = run(scenario)?;
            let records = diagnostics_with(&traj, scenario.tv_delta());
            let checks = diagnostic_checks(scenario, traj.initial_field(), &records, traj.extremes());
            Ok(checks
                .into_iter()
                .find(|c| c.outcome == Some(false))
                .map(|c| format!("run {k}: {} ({})", c.name, c.detail)))
        })
        .collect::<CliResult<Vec<_>>>()?;
    let failures: Vec<String> = outcomes.into_iter().flatten().collect();
    let detail = if failures.is_empty() {
        format!("seed {seed}, {size} runs")
    } else {
        format!("seed {seed}: {}", failures.join("; "))
    };
    Ok(Check::new("seeded corpus", failures.is_empty(), detail))
}

pub fn cmd_verify(config: &RunConfig, ctx: &Context) -> CliResult<()> {
    let dir = ctx.prepare()?;
    let scenario = &config.scenario;
    let traj = trajectory(config, SnapshotPlan::EveryStep)?;
    let records = diagnostics_with(&traj, scenario.tv_delta());
    let mut checks = diagnostic_checks(scenario, traj.initial_field(), &records, traj.extremes());

    let dx = scenario.grid.dx();
    if scenario.velocity.v_left() > scenario.velocity.v_right() {
        checks.push(Check::skip("entropy inequalities", "v_left > v_right"));
    } else if traj.step_count() == 0 {
        checks.push(Check::skip("entropy inequalities", "no time evolution"));
    } else {
        let dt = traj.diagnostics.iter().map(|d| d.dt).fold(0.0, f64::max);
        let tol = config.entropy_c * (dx + dt);
        let half = 0.7 * scenario.grid.x_min().abs().min(scenario.grid.x_max());
        let family = TestFamily::standard(half, traj.final_time());
        let report = entropy_residuals(&traj, &default_kappas(), &family, tol)?;
        checks.push(Check::new(
            "entropy inequalities",
            report.passed(),
            format!(
                "min residual {:.3e} vs tolerance -{tol:.3e} (kappa {}, {})",
                report.min_residual(),
                report.worst_kappa,
                report.worst_testfn
            ),
        ));
    }

    match extract_traces(&traj, config.trace_cells) {
        Ok(traces) => {
            let r = traces.residual_near(traj.final_time());
            checks.push(Check::new(
                "interface traces",
                r <= config.trace_tol,
                format!("Rankine-Hugoniot residual {r:.3e} <= {:.3e} at t = {}", config.trace_tol, traj.final_time()),
            ));
        }
        Err(e) => checks.push(Check::skip("interface traces", &e.to_string())),
    }

    if let Some(seed) = ctx.seed {
        checks.push(corpus_check(seed, config.corpus_size)?);
    }

    let mut table = String::new();
    for c in &checks {
        let status = match c.outcome {
            Some(true) => "PASS",
            Some(false) => "FAIL",
            None => "SKIP",
        };
        let _ = writeln!(table, "{status} {}: {}", c.name, c.detail);
    }
    print!("{table}");
    fs::write(dir.join("verify.txt"), &table)?;
    report_warnings(dir, config, &traj)?;
    match checks.iter().find(|c| c.outcome == Some(false)) {
        Some(c) => Err(CliError::Invariant(c.name.clone())),
        None => Ok(()),
    }
}

fn require_nonlocal(config: &RunConfig, what: &str) -> CliResult<()> {
    match config.scenario.model {
        FluxModel::NonLocal(_) if config.evolution == Evolution::Solver => Ok(()),
        _ => Err(CliError::Usage(format!("{what} needs a non-local model with a solver"))),
    }
}

pub fn cmd_viscosity_sweep(config: &RunConfig, ctx: &Context) -> CliResult<()> {
    require_nonlocal(config, "viscosity-sweep")?;
    let dir = ctx.prepare()?;
    let mut scenario = config.scenario.clone();
    scenario.solver = nonlocal_lwr::SolverKind::NonlocalUpwind;
    let rows = vanishing_viscosity_study(&scenario, &config.viscosity_epsilons)?;
    let mut csv = String::from("epsilon,l1_distance\n");
    for r in &rows {
        let _ = writeln!(csv, "{},{}", float(r.epsilon), float(r.l1_distance));
        println!("epsilon {:<8} L1 distance {:.6e}", r.epsilon, r.l1_distance);
    }
    fs::write(dir.join("viscosity.csv"), csv)?;
    Ok(())
}

pub fn cmd_refine(config: &RunConfig, ctx: &Context) -> CliResult<()> {
    if config.evolution == Evolution::Frozen {
        return Err(CliError::Usage("refine needs a solver".into()));
    }
    let dir = ctx.prepare()?;
    let dx0 = config.scenario.grid.dx();
    let ladder: Vec<f64> = (0..config.refine_levels).map(|k| dx0 / f64::powi(2.0, k as i32)).collect();
    let report = convergence_order(&config.scenario, &ladder)?;
    let mut csv = String::from("dx,error,order\n");
    for (k, (dx, err)) in report.dxs.iter().zip(&report.errors).enumerate() {
        let order = if k == 0 { String::new() } else { report.orders.get(k - 1).map(|o| float(*o)).unwrap_or_default() };
        let _ = writeln!(csv, "{},{},{order}", float(*dx), float(*err));
    }
    fs::write(dir.join("refinement.csv"), csv)?;
    let reference = if report.against_exact { "exact solution" } else { "next finer grid" };
    match report.observed_order {
        _ if report.is_exact() => println!("refine: all grids agree exactly (order reported as exact)"),
        Some(p) => println!("refine: observed L1 order {p:.4} against the {reference}"),
        None => println!("refine: no order could be fitted"),
    }
    Ok(())
}

pub fn cmd_stability(config: &RunConfig, ctx: &Context) -> CliResult<()> {
    if config.evolution == Evolution::Frozen {
        return Err(CliError::Usage("stability needs a solver".into()));
    }
    let dir = ctx.prepare()?;
    let scenario = &config.scenario;
    let report = stability_experiment(scenario, &config.perturbation, scenario.t_end)?;
    let mut csv = String::from("t,distance\n");
    for (t, d) in report.times.iter().zip(&report.distances) {
        let _ = writeln!(csv, "{},{}", float(*t), float(*d));
    }
    fs::write(dir.join("stability.csv"), csv)?;
    println!(
        "stability: d(0) = {:.6e}, d(T) = {:.6e}, fitted K = {:.6e}, least-squares K = {:.6e}, envelope {}",
        report.initial_distance(),
        report.distances.last().copied().unwrap_or(0.0),
        report.fitted_k,
        report.least_squares_k,
        if report.envelope_ok { "holds" } else { "violated" }
    );
    if report.envelope_ok {
        Ok(())
    } else {
        Err(CliError::Invariant("stability envelope".into()))
    }
}

fn oracle_for(scenario: &Scenario) -> CliResult<LocalRiemannSolution> {
    let InitialProfile::Riemann { left, right } = scenario.initial else {
        return Err(CliError::Usage("counterexample needs Riemann initial data".into()));
    };
    if scenario.model != FluxModel::Local {
        return Err(CliError::Usage("counterexample needs model = local".into()));
    }
    riemann_local_exact(scenario.velocity.v_left(), scenario.velocity.v_right(), left, right)
        .map_err(|e| CliError::Usage(e.to_string()))
}

/// Local-model Riemann run written next to the exact solution, cell by cell.
pub fn cmd_counterexample(config: Option<&RunConfig>, ctx: &Context) -> CliResult<()> {
    let preset;
    let config = match config {
        Some(c) => c,
        None => {
            preset = parse_config("preset = counterexample\ngrid.dx = 0.0025\n")?;
            &preset
        }
    };
    let exact = oracle_for(&config.scenario)?;
    let dir = ctx.prepare()?;
    let traj = trajectory(config, config.scenario.snapshots.clone())?;
    let grid = traj.grid;
    let averages = |t: f64| -> Vec<f64> {
        (0..grid.n_cells()).map(|j| exact.cell_average(t, grid.boundary(j), grid.boundary(j + 1))).collect()
    };
    write_snapshots(dir, "snapshot", &traj.snapshots)?;
    for (k, field) in traj.snapshots.iter().enumerate() {
        fs::write(dir.join(format!("oracle_{k:04}.csv")), snapshot_csv_values(field, &averages(field.time())))?;
    }
    let last = traj.final_field();
    let oracle = averages(last.time());
    let mut overlay = format!("# t={}\ncell_index,x_center,rho_numerical,rho_oracle\n", float(last.time()));
    let mut l1 = 0.0;
    for (j, (num, ex)) in last.values().iter().zip(&oracle).enumerate() {
        let _ = writeln!(overlay, "{j},{},{},{}", float(grid.center(j)), float(*num), float(*ex));
        l1 += (num - ex).abs() * grid.dx();
    }
    fs::write(dir.join("overlay.csv"), overlay)?;
    report_warnings(dir, config, &traj)?;
    let (_, hi) = traj.extremes();
    info!("counterexample written to {}", dir.display());
    println!(
        "counterexample: rho_minus = {:.7}, shock at {:.4} (t = {}), numerical max {hi:.7}, L1 error {l1:.3e}",
        exact.rho_minus,
        exact.shock_position(last.time()),
        last.time()
    );
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_follow_error_class() {
        assert_eq!(CliError::Usage("x".into()).exit_code(), 1);
        assert_eq!(CliError::Config(ConfigError::Validation("x".into())).exit_code(), 1);
        assert_eq!(CliError::Solver(Error::EpsTooSmall { eps: 0.1, dx: 0.2 }).exit_code(), 1);
        assert_eq!(CliError::Invariant("x".into()).exit_code(), 2);
        assert_eq!(CliError::Solver(Error::InvariantViolation("x".into())).exit_code(), 2);
        assert_eq!(CliError::Solver(Error::CflViolation { dt: 1.0, max_dt: 0.5 }).exit_code(), 3);
        assert_eq!(CliError::Io(io::Error::other("x")).exit_code(), 3);
    }
}
