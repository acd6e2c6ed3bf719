//! Godunov scheme for the local flux `v(x) ρ(1 - ρ)`.
//!
//! The flux is concave in `ρ`, so the Godunov flux reduces to the minimum of
//! the upstream demand and the downstream supply. Applied at `x = 0` with the
//! two different speeds this is the usual supply–demand junction coupling.

use super::{cfl_dt, conservative_update, SolverState, DT_SLACK};
use crate::error::{Error, Result};

/// `q(min(ρ, ½))` for `q(ρ) = vρ(1 - ρ)`.
pub fn demand(v: f64, rho: f64) -> f64 {
    let r = rho.min(0.5);
    v * r * (1.0 - r)
}

/// `q(max(ρ, ½))` for `q(ρ) = vρ(1 - ρ)`.
pub fn supply(v: f64, rho: f64) -> f64 {
    let r = rho.max(0.5);
    v * r * (1.0 - r)
}

pub fn godunov_flux(v_upstream: f64, rho_left: f64, v_downstream: f64, rho_right: f64) -> f64 {
    demand(v_upstream, rho_left).min(supply(v_downstream, rho_right))
}

pub fn step_local_godunov(state: &SolverState, dt: f64) -> Result<SolverState> {
    if state.weights.is_some() {
        return Err(Error::InvalidArgument(
            "local Godunov step runs without convolution weights".into(),
        ));
    }
    let max_dt = cfl_dt(state, 1.0);
    if !(dt >= 0.0) || dt > max_dt * (1.0 + DT_SLACK) {
        return Err(Error::CflViolation { dt, max_dt });
    }
    let grid = *state.field.grid();
    let (vl, vr) = (state.velocity.v_left(), state.velocity.v_right());
    let iface = grid.interface_index();
    let rho = state.field.values();
    let n = rho.len();
    let fluxes: Vec<f64> = (0..=n)
        .map(|i| {
            let left = rho[i.saturating_sub(1)];
            let right = rho[i.min(n - 1)];
            let v_up = if i <= iface { vl } else { vr };
            let v_down = if i < iface { vl } else { vr };
            godunov_flux(v_up, left, v_down, right)
        })
        .collect();
    let values = conservative_update(rho, &fluxes, dt / grid.dx());
    let net = dt * (fluxes[0] - fluxes[n]);
    Ok(state.advanced(values, dt, net))
}
