//! Complete description of one simulation: data, model, solver and outputs.

use crate::error::{Error, Result};
use crate::field::{DensityField, InitialProfile};
use crate::grid::Grid;
use crate::kernel::Kernel;
use crate::velocity::VelocityField;

pub const DEFAULT_CFL: f64 = 0.5;

/// Non-local flux `ρ(1 - w_η*ρ)v(x)` or its local counterpart `ρ(1 - ρ)v(x)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FluxModel {
    NonLocal(Kernel),
    Local,
}

impl FluxModel {
    pub fn kernel(&self) -> Option<&Kernel> {
        match self {
            FluxModel::NonLocal(k) => Some(k),
            FluxModel::Local => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SolverKind {
    NonlocalUpwind,
    LocalGodunov,
    /// Regularized problem with diffusion `epsilon`; the velocity and the
    /// initial data are mollified over the same width.
    Viscous { epsilon: f64 },
}

/// Which time levels a run keeps as snapshots.
#[derive(Debug, Clone, PartialEq)]
pub enum SnapshotPlan {
    Final,
    /// Requested output times in `(0, t_end]`; `t = 0` and `t_end` are always kept.
    Times(Vec<f64>),
    EveryStep,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub grid: Grid,
    pub model: FluxModel,
    pub velocity: VelocityField,
    pub initial: InitialProfile,
    pub t_end: f64,
    pub cfl: f64,
    pub solver: SolverKind,
    pub snapshots: SnapshotPlan,
    /// Half-width of the excluded zone for total-variation diagnostics;
    /// `None` means five cells.
    pub tv_delta: Option<f64>,
}

impl Scenario {
    pub fn new(
        grid: Grid,
        model: FluxModel,
        velocity: VelocityField,
        initial: InitialProfile,
        t_end: f64,
        solver: SolverKind,
    ) -> Self {
        Self {
            grid,
            model,
            velocity,
            initial,
            t_end,
            cfl: DEFAULT_CFL,
            solver,
            snapshots: SnapshotPlan::Final,
            tv_delta: None,
        }
    }

    pub fn with_cfl(mut self, cfl: f64) -> Self {
        self.cfl = cfl;
        self
    }

    pub fn with_snapshots(mut self, plan: SnapshotPlan) -> Self {
        self.snapshots = plan;
        self
    }

    pub fn with_tv_delta(mut self, delta: f64) -> Self {
        self.tv_delta = Some(delta);
        self
    }

    pub fn with_grid(mut self, grid: Grid) -> Self {
        self.grid = grid;
        self
    }

    pub fn with_initial(mut self, initial: InitialProfile) -> Self {
        self.initial = initial;
        self
    }

    pub fn with_solver(mut self, solver: SolverKind) -> Self {
        self.solver = solver;
        self
    }

    pub fn tv_delta(&self) -> f64 {
        self.tv_delta.unwrap_or(5.0 * self.grid.dx())
    }

    pub fn kernel(&self) -> Option<&Kernel> {
        self.model.kernel()
    }

    pub fn initial_field(&self) -> Result<DensityField> {
        self.initial.sample(&self.grid)
    }

    /// Checks every hard invariant and returns the soft warnings: far-field
    /// margins that are not constant, and out-of-regime velocities.
    pub fn validate(&self) -> Result<Vec<String>> {
        self.initial.validate()?;
        if !(self.t_end >= 0.0) || !self.t_end.is_finite() {
            return Err(Error::InvalidScenario("t_end must be nonnegative".into()));
        }
        if !(self.cfl > 0.0 && self.cfl <= 1.0) {
            return Err(Error::InvalidScenario(format!(
                "cfl must lie in (0, 1], got {}",
                self.cfl
            )));
        }
        match (self.solver, &self.model) {
            (SolverKind::LocalGodunov, FluxModel::NonLocal(_)) => {
                return Err(Error::InvalidScenario(
                    "local_godunov requires the local flux model".into(),
                ))
            }
            (SolverKind::NonlocalUpwind | SolverKind::Viscous { .. }, FluxModel::Local) => {
                return Err(Error::InvalidScenario(
                    "non-local solvers require a kernel".into(),
                ))
            }
            (SolverKind::Viscous { epsilon }, FluxModel::NonLocal(kernel)) => {
                if !(epsilon > 0.0) {
                    return Err(Error::InvalidScenario("epsilon must be positive".into()));
                }
                if epsilon >= kernel.eta() {
                    return Err(Error::InvalidScenario(format!(
                        "epsilon {epsilon} must be smaller than eta {}",
                        kernel.eta()
                    )));
                }
                if epsilon < self.grid.dx() {
                    return Err(Error::EpsTooSmall { eps: epsilon, dx: self.grid.dx() });
                }
            }
            _ => {}
        }
        if let SnapshotPlan::Times(times) = &self.snapshots {
            if times.iter().any(|t| !(*t >= 0.0) || *t > self.t_end) {
                return Err(Error::InvalidScenario(
                    "snapshot times must lie in [0, t_end]".into(),
                ));
            }
        }
        self.initial_field()?;

        let mut warnings = Vec::new();
        if self.velocity.v_left() > self.velocity.v_right() {
            warnings.push(format!(
                "v_left = {} > v_right = {}: the maximum principle is not guaranteed",
                self.velocity.v_left(),
                self.velocity.v_right()
            ));
        }
        let reach = self.velocity.v_max() * self.t_end;
        let eta = self.kernel().map_or(0.0, |k| k.eta());
        let (a, b) = (self.grid.x_min(), self.grid.x_max());
        if !self.initial.constant_on(a, a + reach) {
            warnings.push(format!(
                "initial data is not constant on the left margin [{a}, {}]",
                a + reach
            ));
        }
        if !self.initial.constant_on(b - eta - reach, b) {
            warnings.push(format!(
                "initial data is not constant on the right margin [{}, {b}]",
                b - eta - reach
            ));
        }
        Ok(warnings)
    }
}
