use crate::convolution::{compute_weights, convolve_values};
use crate::hyperbolic::Trajectory;
use crate::scenario::FluxModel;

use super::traces::rh_residual;
use super::tv_excluding;

/// Per-snapshot bound, mass and variation record.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagnosticRecord {
    pub t: f64,
    pub mass: f64,
    /// `|M(t) - M(0) - inflow(t)| / M(0)`: the defect in the discrete mass
    /// balance, where `inflow` is the net flux through the domain edges.
    pub mass_defect: f64,
    pub min: f64,
    pub max: f64,
    pub tv_delta: f64,
    /// `Σ |W_i| dx`; `None` in local mode.
    pub conv_l1: Option<f64>,
    /// `Σ |W_{i+1} - W_i|`; `None` in local mode.
    pub conv_deriv_l1: Option<f64>,
    /// Interface flux mismatch from the two cells adjacent to `x = 0`; see
    /// [`rh_residual`].
    pub rh_residual: f64,
}

pub fn diagnostics(traj: &Trajectory) -> Vec<DiagnosticRecord> {
    diagnostics_with(traj, 5.0 * traj.grid.dx())
}

pub fn diagnostics_with(traj: &Trajectory, delta: f64) -> Vec<DiagnosticRecord> {
    let weights = match traj.model {
        FluxModel::NonLocal(kernel) => Some(compute_weights(&kernel, traj.grid.dx())),
        FluxModel::Local => None,
    };
    let mass0 = traj.initial.mass;
    let iface = traj.grid.interface_index();
    let (vl, vr) = (traj.velocity.v_left(), traj.velocity.v_right());
    traj.snapshots
        .iter()
        .map(|field| {
            let t = field.time();
            let inflow = traj
                .diagnostics
                .iter()
                .find(|d| d.t == t)
                .map_or(0.0, |d| d.boundary_inflow);
            let mass = field.mass();
            let scale = if mass0.abs() > 0.0 { mass0.abs() } else { 1.0 };
            let conv = weights.as_ref().map(|w| convolve_values(field.values(), w));
            let dx = traj.grid.dx();
            let values = field.values();
            DiagnosticRecord {
                t,
                mass,
                mass_defect: (mass - mass0 - inflow).abs() / scale,
                min: field.min(),
                max: field.max(),
                tv_delta: tv_excluding(field, delta),
                conv_l1: conv.as_ref().map(|c| c.iter().map(|w| w.abs()).sum::<f64>() * dx),
                conv_deriv_l1: conv
                    .as_ref()
                    .map(|c| c.windows(2).map(|p| (p[1] - p[0]).abs()).sum()),
                rh_residual: rh_residual(&traj.model, vl, vr, values[iface - 1], values[iface]),
            }
        })
        .collect()
}
