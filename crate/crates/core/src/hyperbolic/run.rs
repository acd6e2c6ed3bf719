//! Driving a scenario to `t_end` with snapshots and per-step diagnostics.

use super::{cfl_dt, step_local_godunov, step_nonlocal, SolverState};
use crate::analysis::tv_excluding;
use crate::convolution::compute_weights;
use crate::error::{Error, Result};
use crate::field::DensityField;
use crate::grid::Grid;
use crate::scenario::{FluxModel, Scenario, SnapshotPlan, SolverKind};
use crate::velocity::VelocityField;
use crate::viscous::{initial_viscous_state, viscous_dt, viscous_step, ViscousState};

/// Values may leave `[0, 1]` by at most this much before an in-regime run is
/// aborted.
const BOUNDS_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepDiagnostics {
    pub t: f64,
    /// Step that led to this record; zero for the initial record.
    pub dt: f64,
    pub mass: f64,
    pub min: f64,
    pub max: f64,
    /// Total variation over cells outside `(-δ, δ)`.
    pub tv_outside: f64,
    /// Net mass that entered through the domain edges since `t = 0`.
    pub boundary_inflow: f64,
}

impl StepDiagnostics {
    fn of(field: &DensityField, dt: f64, delta: f64, boundary_inflow: f64) -> Self {
        Self {
            t: field.time(),
            dt,
            mass: field.mass(),
            min: field.min(),
            max: field.max(),
            tv_outside: tv_excluding(field, delta),
            boundary_inflow,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub grid: Grid,
    pub velocity: VelocityField,
    pub model: FluxModel,
    pub solver: SolverKind,
    /// Snapshots in strictly increasing time, starting with `t = 0`.
    pub snapshots: Vec<DensityField>,
    pub initial: StepDiagnostics,
    /// One record per step.
    pub diagnostics: Vec<StepDiagnostics>,
    pub warnings: Vec<String>,
}

impl Trajectory {
    /// Wraps externally built snapshots, e.g. a hand-constructed field for an
    /// audit. Each snapshot after the first counts as one step; boundary
    /// inflow is unknown and recorded as zero.
    pub fn from_snapshots(
        grid: Grid,
        velocity: VelocityField,
        model: FluxModel,
        solver: SolverKind,
        snapshots: Vec<DensityField>,
    ) -> Self {
        assert!(!snapshots.is_empty(), "a trajectory needs at least one snapshot");
        let delta = 5.0 * grid.dx();
        let initial = StepDiagnostics::of(&snapshots[0], 0.0, delta, 0.0);
        let diagnostics = snapshots
            .windows(2)
            .map(|p| StepDiagnostics::of(&p[1], p[1].time() - p[0].time(), delta, 0.0))
            .collect();
        Self { grid, velocity, model, solver, snapshots, initial, diagnostics, warnings: Vec::new() }
    }

    pub fn initial_field(&self) -> &DensityField {
        &self.snapshots[0]
    }

    pub fn final_field(&self) -> &DensityField {
        self.snapshots.last().expect("trajectory always holds the initial snapshot")
    }

    pub fn step_count(&self) -> usize {
        self.diagnostics.len()
    }

    pub fn final_time(&self) -> f64 {
        self.final_field().time()
    }

    /// Largest and smallest cell value over every step.
    pub fn extremes(&self) -> (f64, f64) {
        self.diagnostics.iter().fold((self.initial.min, self.initial.max), |(lo, hi), d| {
            (lo.min(d.min), hi.max(d.max))
        })
    }

    /// Snapshot whose time is closest to `t`.
    pub fn snapshot_near(&self, t: f64) -> &DensityField {
        self.snapshots
            .iter()
            .min_by(|a, b| (a.time() - t).abs().total_cmp(&(b.time() - t).abs()))
            .expect("trajectory always holds the initial snapshot")
    }
}

enum Engine {
    Upwind(SolverState),
    Godunov(SolverState),
    Viscous(ViscousState),
}

impl Engine {
    fn start(scenario: &Scenario) -> Result<Self> {
        Ok(match scenario.solver {
            SolverKind::NonlocalUpwind => {
                let kernel = scenario
                    .kernel()
                    .ok_or_else(|| Error::InvalidScenario("missing kernel".into()))?;
                Engine::Upwind(SolverState::new(
                    scenario.initial_field()?,
                    Some(compute_weights(kernel, scenario.grid.dx())),
                    scenario.velocity,
                ))
            }
            SolverKind::LocalGodunov => Engine::Godunov(SolverState::new(
                scenario.initial_field()?,
                None,
                scenario.velocity,
            )),
            SolverKind::Viscous { epsilon } => {
                Engine::Viscous(initial_viscous_state(scenario, epsilon)?)
            }
        })
    }

    fn max_dt(&self, cfl: f64) -> f64 {
        match self {
            Engine::Upwind(s) | Engine::Godunov(s) => cfl_dt(s, cfl),
            Engine::Viscous(s) => viscous_dt(s, cfl),
        }
    }

    fn step(&mut self, dt: f64) -> Result<()> {
        *self = match self {
            Engine::Upwind(s) => Engine::Upwind(step_nonlocal(s, dt)?),
            Engine::Godunov(s) => Engine::Godunov(step_local_godunov(s, dt)?),
            Engine::Viscous(s) => Engine::Viscous(viscous_step(s, dt)?),
        };
        Ok(())
    }

    fn field(&self) -> &DensityField {
        match self {
            Engine::Upwind(s) | Engine::Godunov(s) => &s.field,
            Engine::Viscous(s) => &s.field,
        }
    }

    fn t(&self) -> f64 {
        match self {
            Engine::Upwind(s) | Engine::Godunov(s) => s.t,
            Engine::Viscous(s) => s.t,
        }
    }

    fn boundary_inflow(&self) -> f64 {
        match self {
            Engine::Upwind(s) | Engine::Godunov(s) => s.boundary_inflow,
            Engine::Viscous(s) => s.boundary_inflow,
        }
    }

    fn set_time(&mut self, t: f64) {
        match self {
            Engine::Upwind(s) | Engine::Godunov(s) => {
                s.t = t;
                s.field = s.field.clone().with_time(t);
            }
            Engine::Viscous(s) => {
                s.t = t;
                s.field = s.field.clone().with_time(t);
            }
        }
    }
}

fn output_targets(scenario: &Scenario) -> Vec<f64> {
    let mut targets = match &scenario.snapshots {
        SnapshotPlan::Times(times) => times.iter().copied().filter(|t| *t > 0.0).collect(),
        _ => Vec::new(),
    };
    targets.push(scenario.t_end);
    targets.sort_by(f64::total_cmp);
    targets.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * scenario.t_end.max(1.0));
    targets.retain(|t| *t <= scenario.t_end);
    targets
}

/// Advances `scenario` to `t_end`. Requested output times are hit exactly by
/// shortening the step that would overshoot them.
pub fn run(scenario: &Scenario) -> Result<Trajectory> {
    let warnings = scenario.validate()?;
    let mut engine = Engine::start(scenario)?;
    let delta = scenario.tv_delta();
    let in_regime = scenario.velocity.in_regime();
    let every_step = matches!(scenario.snapshots, SnapshotPlan::EveryStep);
    let time_scale = scenario.t_end.max(1.0);

    let initial = StepDiagnostics::of(engine.field(), 0.0, delta, 0.0);
    let mut snapshots = vec![engine.field().clone()];
    let mut diagnostics = Vec::new();

    for target in output_targets(scenario) {
        while engine.t() < target {
            let remaining = target - engine.t();
            let mut dt = engine.max_dt(scenario.cfl);
            let hits = dt >= remaining - 1e-12 * time_scale;
            if hits {
                dt = remaining;
            }
            engine.step(dt)?;
            if hits {
                engine.set_time(target);
            }
            let field = engine.field();
            let record = StepDiagnostics::of(field, dt, delta, engine.boundary_inflow());
            if in_regime && (record.min < -BOUNDS_TOL || record.max > 1.0 + BOUNDS_TOL) {
                return Err(Error::InvariantViolation(format!(
                    "density left [0, 1] at t = {}: min {}, max {}",
                    record.t, record.min, record.max
                )));
            }
            diagnostics.push(record);
            if every_step || hits {
                snapshots.push(field.clone());
            }
        }
    }

    Ok(Trajectory {
        grid: scenario.grid,
        velocity: scenario.velocity,
        model: scenario.model,
        solver: scenario.solver,
        snapshots,
        initial,
        diagnostics,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::InitialProfile;
    use crate::kernel::{Kernel, KernelFamily};

    fn scenario(t_end: f64) -> Scenario {
        Scenario::new(
            Grid::build(-2.0, 2.0, 200, 200).unwrap(),
            FluxModel::NonLocal(Kernel::new(KernelFamily::Poly2, 0.1).unwrap()),
            VelocityField::new(1.0, 2.0).unwrap(),
            InitialProfile::Riemann { left: 0.25, right: 0.77 },
            t_end,
            SolverKind::NonlocalUpwind,
        )
    }

    #[test]
    fn zero_horizon_returns_initial_data() {
        let traj = run(&scenario(0.0)).unwrap();
        assert_eq!(traj.snapshots.len(), 1);
        assert_eq!(traj.step_count(), 0);
        assert_eq!(traj.final_field(), &scenario(0.0).initial_field().unwrap());
    }

    #[test]
    fn snapshots_hit_requested_times() {
        let s = scenario(0.5).with_snapshots(SnapshotPlan::Times(vec![0.1, 0.25, 0.3333]));
        let traj = run(&s).unwrap();
        let times: Vec<f64> = traj.snapshots.iter().map(|f| f.time()).collect();
        assert_eq!(times, vec![0.0, 0.1, 0.25, 0.3333, 0.5]);
        assert_eq!(traj.diagnostics.len(), traj.step_count());
        assert!(traj.diagnostics.windows(2).all(|d| d[1].t > d[0].t));
    }

    #[test]
    fn mass_balance_holds_every_step() {
        let traj = run(&scenario(0.5)).unwrap();
        let m0 = traj.initial.mass;
        for d in &traj.diagnostics {
            assert!(((d.mass - m0 - d.boundary_inflow) / m0).abs() < 1e-12);
            assert!(d.min >= -1e-12 && d.max <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn out_of_regime_run_warns() {
        let mut s = scenario(0.1);
        s.velocity = VelocityField::new(2.0, 1.0).unwrap();
        let traj = run(&s).unwrap();
        assert!(traj.warnings.iter().any(|w| w.contains("maximum principle")));
    }

    #[test]
    fn every_step_plan_keeps_all_levels() {
        let traj = run(&scenario(0.05).with_snapshots(SnapshotPlan::EveryStep)).unwrap();
        assert_eq!(traj.snapshots.len(), traj.step_count() + 1);
    }
}
