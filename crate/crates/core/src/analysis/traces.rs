//! One-sided interface traces and the Rankine–Hugoniot residual at `x = 0`.

use crate::error::{Error, Result};
use crate::hyperbolic::Trajectory;
use crate::scenario::FluxModel;

/// Interface flux mismatch for one-sided states `(left, right)`:
/// `|v_l ρ_l - v_r ρ_r|` in the non-local model, where `W` is continuous
/// across `x = 0`, and `|v_l ρ_l(1-ρ_l) - v_r ρ_r(1-ρ_r)|` in the local one.
pub fn rh_residual(model: &FluxModel, v_left: f64, v_right: f64, left: f64, right: f64) -> f64 {
    match model {
        FluxModel::NonLocal(_) => (v_left * left - v_right * right).abs(),
        FluxModel::Local => (v_left * left * (1.0 - left) - v_right * right * (1.0 - right)).abs(),
    }
}

/// Cells averaged on each side: the `width` cells that start `skip` cells
/// away from the interface.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TraceBand {
    pub skip: usize,
    pub width: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceReport {
    pub times: Vec<f64>,
    pub rho_left_trace: Vec<f64>,
    pub rho_right_trace: Vec<f64>,
    pub rh_residual: Vec<f64>,
    /// Physical offsets `(δ₁, δ₂)` of the band from the interface.
    pub band: (f64, f64),
}

impl TraceReport {
    /// Residual at the snapshot closest to `t`.
    pub fn residual_near(&self, t: f64) -> f64 {
        let k = self
            .times
            .iter()
            .enumerate()
            .min_by(|a, b| (a.1 - t).abs().total_cmp(&(b.1 - t).abs()))
            .map(|(k, _)| k)
            .unwrap_or(0);
        self.rh_residual[k]
    }
}

/// Traces from the `band_cells` cells adjacent to the interface on each side.
pub fn extract_traces(traj: &Trajectory, band_cells: usize) -> Result<TraceReport> {
    extract_traces_band(traj, TraceBand { skip: 0, width: band_cells })
}

pub fn extract_traces_band(traj: &Trajectory, band: TraceBand) -> Result<TraceReport> {
    let grid = traj.grid;
    let iface = grid.interface_index();
    let reach = band.skip + band.width;
    if band.width == 0 {
        return Err(Error::InvalidArgument("trace band needs at least one cell".into()));
    }
    if reach > iface || iface + reach > grid.n_cells() {
        return Err(Error::InvalidArgument("trace band extends past the domain".into()));
    }
    let (vl, vr) = (traj.velocity.v_left(), traj.velocity.v_right());
    let mut report = TraceReport {
        times: Vec::with_capacity(traj.snapshots.len()),
        rho_left_trace: Vec::with_capacity(traj.snapshots.len()),
        rho_right_trace: Vec::with_capacity(traj.snapshots.len()),
        rh_residual: Vec::with_capacity(traj.snapshots.len()),
        band: (band.skip as f64 * grid.dx(), reach as f64 * grid.dx()),
    };
    let mean = |s: &[f64]| s.iter().sum::<f64>() / s.len() as f64;
    for field in &traj.snapshots {
        let rho = field.values();
        let left = mean(&rho[iface - reach..iface - band.skip]);
        let right = mean(&rho[iface + band.skip..iface + reach]);
        report.times.push(field.time());
        report.rho_left_trace.push(left);
        report.rho_right_trace.push(right);
        report.rh_residual.push(rh_residual(&traj.model, vl, vr, left, right));
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::DensityField;
    use crate::grid::Grid;
    use crate::scenario::{FluxModel, SolverKind};
    use crate::velocity::VelocityField;

    #[test]
    fn constant_field_has_no_residual() {
        let grid = Grid::build(-1.0, 1.0, 20, 20).unwrap();
        let v = VelocityField::new(1.2, 1.2).unwrap();
        let traj = Trajectory::from_snapshots(
            grid,
            v,
            FluxModel::Local,
            SolverKind::LocalGodunov,
            vec![DensityField::constant(grid, 0.3).unwrap()],
        );
        let report = extract_traces(&traj, 3).unwrap();
        assert_eq!(report.rh_residual, vec![0.0]);
        assert!((report.band.1 - 0.15).abs() < 1e-15);
    }

    #[test]
    fn local_counterexample_traces_match_fluxes() {
        let traj = crate::hyperbolic::run(&crate::presets::counterexample(0.005).unwrap()).unwrap();
        let report = extract_traces(&traj, 1).unwrap();
        let t = report.times.len() - 1;
        assert!((report.rho_left_trace[t] - 0.9018).abs() < 0.01);
        assert!((report.rho_right_trace[t] - 0.77).abs() < 0.01);
        assert!(report.rh_residual[t] < 0.01);
    }

    #[test]
    fn band_validation() {
        let grid = Grid::build(-1.0, 1.0, 4, 4).unwrap();
        let v = VelocityField::new(1.0, 2.0).unwrap();
        let traj = Trajectory::from_snapshots(
            grid,
            v,
            FluxModel::Local,
            SolverKind::LocalGodunov,
            vec![DensityField::constant(grid, 0.3).unwrap()],
        );
        assert!(extract_traces(&traj, 0).is_err());
        assert!(extract_traces(&traj, 5).is_err());
        let r = extract_traces_band(&traj, TraceBand { skip: 1, width: 2 }).unwrap();
        assert!((r.rh_residual[0] - 0.21).abs() < 1e-15);
    }
}
