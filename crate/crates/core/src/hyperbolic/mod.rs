//! Explicit finite-volume time stepping for `∂_t ρ + ∂_x(ρ(1 - w_η*ρ)v(x)) = 0`.
//!
//! The non-local scheme uses the upwind flux `F_i = v_i ρ_{i-1} (1 - W_i)` at
//! boundary `i`, with `v_i` taken on the upstream side, so the flux through
//! `x = 0` uses `v_left`. Transport speeds `v(1 - W)` are never negative, which
//! makes plain upwinding consistent.

mod godunov;
mod riemann;
mod run;

pub use godunov::{demand, godunov_flux, step_local_godunov, supply};
pub use riemann::{riemann_local_exact, LocalRiemannSolution};
pub use run::{run, StepDiagnostics, Trajectory};

use crate::convolution::{convolve_into, ConvWeights};
use crate::error::{Error, Result};
use crate::field::DensityField;
use crate::velocity::VelocityField;

/// Relative slack on the time-step bound, so that a step computed by
/// [`cfl_dt`] is never rejected by round-off.
pub(crate) const DT_SLACK: f64 = 1e-12;

/// One time level of a hyperbolic run.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverState {
    pub field: DensityField,
    /// `None` in local mode.
    pub weights: Option<ConvWeights>,
    pub velocity: VelocityField,
    pub t: f64,
    pub step_count: usize,
    /// `∫ (F_in - F_out) dt` through the two domain edges since `t = 0`.
    pub boundary_inflow: f64,
}

impl SolverState {
    pub fn new(field: DensityField, weights: Option<ConvWeights>, velocity: VelocityField) -> Self {
        let t = field.time();
        Self { field, weights, velocity, t, step_count: 0, boundary_inflow: 0.0 }
    }

    fn advanced(&self, values: Vec<f64>, dt: f64, net_inflow: f64) -> SolverState {
        let t = self.t + dt;
        SolverState {
            field: DensityField::from_raw(*self.field.grid(), values, t),
            weights: self.weights.clone(),
            velocity: self.velocity,
            t,
            step_count: self.step_count + 1,
            boundary_inflow: self.boundary_inflow + net_inflow,
        }
    }
}

/// `cfl · dx / (v_max (1 + γ₀))`, with `γ₀ = 0` in local mode.
pub fn cfl_dt(state: &SolverState, cfl: f64) -> f64 {
    let gamma0 = state.weights.as_ref().map_or(0.0, |w| w.gamma0());
    cfl * state.field.grid().dx() / (state.velocity.v_max() * (1.0 + gamma0))
}

/// Boundary fluxes `F_0..=F_n` of the non-local upwind scheme. `speed(i)` is
/// the velocity factor at boundary `i`.
pub(crate) fn nonlocal_fluxes(
    rho: &[f64],
    weights: &ConvWeights,
    speed: impl Fn(usize) -> f64,
    conv: &mut Vec<f64>,
) -> Vec<f64> {
    convolve_into(rho, weights.gamma(), conv);
    (0..=rho.len())
        .map(|i| {
            let upwind = rho[i.saturating_sub(1)];
            speed(i) * upwind * (1.0 - conv[i])
        })
        .collect()
}

/// Applies `ρ_j ← ρ_j - (dt/dx)(F_{j+1} - F_j)` and returns the new values.
pub(crate) fn conservative_update(rho: &[f64], fluxes: &[f64], ratio: f64) -> Vec<f64> {
    rho.iter()
        .enumerate()
        .map(|(j, r)| r - ratio * (fluxes[j + 1] - fluxes[j]))
        .collect()
}

pub fn step_nonlocal(state: &SolverState, dt: f64) -> Result<SolverState> {
    let weights = state.weights.as_ref().ok_or_else(|| {
        Error::InvalidArgument("non-local step requires convolution weights".into())
    })?;
    let max_dt = cfl_dt(state, 1.0);
    if !(dt >= 0.0) || dt > max_dt * (1.0 + DT_SLACK) {
        return Err(Error::CflViolation { dt, max_dt });
    }
    let grid = *state.field.grid();
    let velocity = state.velocity;
    let rho = state.field.values();
    let mut conv = Vec::new();
    let fluxes = nonlocal_fluxes(rho, weights, |i| velocity.at(grid.boundary(i)), &mut conv);
    let values = conservative_update(rho, &fluxes, dt / grid.dx());
    let net = dt * (fluxes[0] - fluxes[rho.len()]);
    Ok(state.advanced(values, dt, net))
}
