//! Vanishing-viscosity regularization: the non-local equation with a
//! diffusion term `ε ∂²ρ/∂x²`, mollified velocity and mollified initial data.

use rayon::prelude::*;

use crate::convolution::{compute_weights, ConvWeights};
use crate::error::{Error, Result};
use crate::field::DensityField;
use crate::hyperbolic::{conservative_update, nonlocal_fluxes, run, DT_SLACK};
use crate::scenario::{Scenario, SnapshotPlan, SolverKind};
use crate::velocity::VelocityField;

/// Velocity with the jump at `x = 0` replaced by a quintic smoothstep on
/// `[-eps, eps]`. A width of zero gives back the sharp step, with the left
/// value at `x = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MollifiedVelocity {
    eps: f64,
    v_left: f64,
    v_right: f64,
}

impl MollifiedVelocity {
    pub fn new(velocity: &VelocityField, eps: f64) -> Result<Self> {
        if !(eps >= 0.0) || !eps.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "mollification width must be nonnegative, got {eps}"
            )));
        }
        Ok(Self { eps, v_left: velocity.v_left(), v_right: velocity.v_right() })
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn v_left(&self) -> f64 {
        self.v_left
    }

    pub fn v_right(&self) -> f64 {
        self.v_right
    }

    pub fn v_max(&self) -> f64 {
        self.v_left.max(self.v_right)
    }

    fn unit(&self, x: f64) -> f64 {
        ((x + self.eps) / (2.0 * self.eps)).clamp(0.0, 1.0)
    }

    pub fn at(&self, x: f64) -> f64 {
        if self.eps == 0.0 {
            return if x <= 0.0 { self.v_left } else { self.v_right };
        }
        let u = self.unit(x);
        let s = u * u * u * (10.0 + u * (-15.0 + 6.0 * u));
        self.v_left + (self.v_right - self.v_left) * s
    }

    pub fn derivative(&self, x: f64) -> f64 {
        if self.eps == 0.0 {
            return 0.0;
        }
        let u = self.unit(x);
        let ds = 30.0 * u * u * (1.0 - u) * (1.0 - u);
        (self.v_right - self.v_left) * ds / (2.0 * self.eps)
    }
}

/// Discrete hat mollifier of radius `eps`: weights `∝ (1 - |m| dx / eps)`,
/// normalized to unit mass, with constant extrapolation past both edges.
pub fn mollify_initial(rho0: &DensityField, eps: f64) -> Result<DensityField> {
    let grid = *rho0.grid();
    let dx = grid.dx();
    if !(eps >= dx * (1.0 - 1e-12)) {
        return Err(Error::EpsTooSmall { eps, dx });
    }
    let radius = (eps / dx + 1e-9).floor() as isize;
    let raw: Vec<f64> = (-radius..=radius)
        .map(|m| (1.0 - (m.unsigned_abs() as f64) * dx / eps).max(0.0))
        .collect();
    let total: f64 = raw.iter().sum();
    let weights: Vec<f64> = raw.iter().map(|w| w / total).collect();
    let rho = rho0.values();
    let n = rho.len() as isize;
    let values = (0..n)
        .map(|j| {
            weights
                .iter()
                .enumerate()
                .map(|(k, w)| w * rho[(j + k as isize - radius).clamp(0, n - 1) as usize])
                .sum::<f64>()
                .clamp(0.0, 1.0)
        })
        .collect();
    DensityField::new(grid, values, rho0.time())
}

#[derive(Debug, Clone, PartialEq)]
pub struct ViscousState {
    pub field: DensityField,
    /// Diffusion coefficient.
    pub eps: f64,
    pub velocity: MollifiedVelocity,
    pub weights: ConvWeights,
    pub t: f64,
    pub step_count: usize,
    pub boundary_inflow: f64,
}

impl ViscousState {
    pub fn new(field: DensityField, eps: f64, velocity: MollifiedVelocity, weights: ConvWeights) -> Self {
        let t = field.time();
        Self { field, eps, velocity, weights, t, step_count: 0, boundary_inflow: 0.0 }
    }

    /// Sum of the convective and diffusive step ratios for a step `dt`; the
    /// update is a convex combination while this stays at most one.
    pub fn stability_number(&self, dt: f64) -> f64 {
        let dx = self.field.grid().dx();
        dt * (self.velocity.v_max() * (1.0 + self.weights.gamma0()) / dx
            + 2.0 * self.eps / (dx * dx))
    }
}

/// Largest step with stability number `cfl`.
pub fn viscous_dt(state: &ViscousState, cfl: f64) -> f64 {
    cfl / state.stability_number(1.0)
}

pub fn viscous_step(state: &ViscousState, dt: f64) -> Result<ViscousState> {
    update(state, dt, true)
}

fn update(state: &ViscousState, dt: f64, convective: bool) -> Result<ViscousState> {
    let number = state.stability_number(dt);
    if !(dt >= 0.0) || number > 1.0 + DT_SLACK {
        return Err(Error::CflViolation { dt, max_dt: viscous_dt(state, 1.0) });
    }
    let grid = *state.field.grid();
    let dx = grid.dx();
    let rho = state.field.values();
    let n = rho.len();
    let velocity = state.velocity;
    let mut conv = Vec::new();
    let mut fluxes = if convective {
        nonlocal_fluxes(rho, &state.weights, |i| velocity.at(grid.boundary(i)), &mut conv)
    } else {
        vec![0.0; n + 1]
    };
    if state.eps > 0.0 {
        for (i, f) in fluxes.iter_mut().enumerate() {
            let left = rho[i.saturating_sub(1)];
            let right = rho[i.min(n - 1)];
            *f -= state.eps * (right - left) / dx;
        }
    }
    let values = conservative_update(rho, &fluxes, dt / dx);
    let t = state.t + dt;
    Ok(ViscousState {
        field: DensityField::from_raw(grid, values, t),
        eps: state.eps,
        velocity,
        weights: state.weights.clone(),
        t,
        step_count: state.step_count + 1,
        boundary_inflow: state.boundary_inflow + dt * (fluxes[0] - fluxes[n]),
    })
}

/// Initial viscous state for `scenario` with viscosity `epsilon`; the
/// mollification width of both the data and the velocity equals `epsilon`.
pub fn initial_viscous_state(scenario: &Scenario, epsilon: f64) -> Result<ViscousState> {
    let kernel = scenario
        .kernel()
        .ok_or_else(|| Error::InvalidScenario("viscous solver requires a kernel".into()))?;
    let rho0 = scenario.initial_field()?;
    let field = mollify_initial(&rho0, epsilon)?;
    Ok(ViscousState::new(
        field,
        epsilon,
        MollifiedVelocity::new(&scenario.velocity, epsilon)?,
        compute_weights(kernel, scenario.grid.dx()),
    ))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ViscosityRow {
    pub epsilon: f64,
    pub l1_distance: f64,
}

/// L1 distance at `t_end` between the viscous solution and the hyperbolic
/// non-local solution, for each viscosity in a decreasing list. All runs share
/// the scenario grid, which must satisfy `dx ≤ ε/4` for the smallest `ε`.
pub fn vanishing_viscosity_study(scenario: &Scenario, eps_list: &[f64]) -> Result<Vec<ViscosityRow>> {
    if eps_list.is_empty() {
        return Err(Error::InvalidArgument("empty viscosity list".into()));
    }
    if eps_list.iter().any(|e| !(*e > 0.0)) {
        return Err(Error::InvalidArgument("viscosities must be positive".into()));
    }
    if eps_list.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidArgument("viscosities must be strictly decreasing".into()));
    }
    let smallest = eps_list[eps_list.len() - 1];
    if scenario.grid.dx() > smallest / 4.0 * (1.0 + 1e-12) {
        return Err(Error::InvalidArgument(format!(
            "grid too coarse: dx = {} exceeds eps/4 = {}",
            scenario.grid.dx(),
            smallest / 4.0
        )));
    }
    let base = scenario.clone().with_snapshots(SnapshotPlan::Final);
    let hyperbolic = run(&base.clone().with_solver(SolverKind::NonlocalUpwind))?;
    let reference = hyperbolic.final_field();
    eps_list
        .par_iter()
        .map(|&epsilon| {
            let viscous = run(&base.clone().with_solver(SolverKind::Viscous { epsilon }))?;
            Ok(ViscosityRow {
                epsilon,
                l1_distance: viscous.final_field().l1_distance(reference)?,
            })
        })
        .collect()
}
