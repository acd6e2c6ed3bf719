//! Grid refinement studies: self-convergence by cell aggregation, or error
//! against the exact local Riemann solution when one is available.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::{DensityField, InitialProfile};
use crate::grid::Grid;
use crate::hyperbolic::{riemann_local_exact, run};
use crate::scenario::{Scenario, SnapshotPlan, SolverKind};

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    /// Cell width each error is measured on.
    pub dxs: Vec<f64>,
    pub errors: Vec<f64>,
    /// `log2(e_k / e_{k+1})` for consecutive entries.
    pub orders: Vec<f64>,
    /// Least-squares slope of `log e` against `log dx`; `None` when every error
    /// vanishes, i.e. the solutions agree exactly.
    pub observed_order: Option<f64>,
    /// True when errors are measured against an exact solution.
    pub against_exact: bool,
}

impl ConvergenceReport {
    pub fn is_exact(&self) -> bool {
        self.observed_order.is_none()
    }
}

fn grid_for(template: &Grid, dx: f64) -> Result<Grid> {
    let nl = (-template.x_min() / dx).round() as usize;
    let nr = (template.x_max() / dx).round() as usize;
    let grid = Grid::build(template.x_min(), template.x_max(), nl, nr)?;
    if (grid.dx() - dx).abs() > 1e-9 * dx {
        return Err(Error::InvalidArgument(format!("dx = {dx} does not tile the domain")));
    }
    Ok(grid)
}

fn least_squares_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

/// Runs `scenario` on every cell width of a halving ladder (at least three
/// grids) and measures the L¹ convergence order at `t_end`.
pub fn convergence_order(scenario: &Scenario, dx_ladder: &[f64]) -> Result<ConvergenceReport> {
    if dx_ladder.len() < 3 {
        return Err(Error::InvalidArgument("need at least three grids".into()));
    }
    if dx_ladder.windows(2).any(|w| (w[0] / w[1] - 2.0).abs() > 1e-9) {
        return Err(Error::InvalidArgument("each grid must halve the previous cell width".into()));
    }
    let grids = dx_ladder
        .iter()
        .map(|dx| grid_for(&scenario.grid, *dx))
        .collect::<Result<Vec<_>>>()?;
    let finals: Vec<DensityField> = grids
        .par_iter()
        .map(|g| {
            let s = scenario.clone().with_grid(*g).with_snapshots(SnapshotPlan::Final);
            run(&s).map(|traj| traj.final_field().clone())
        })
        .collect::<Result<_>>()?;

    let exact = match (scenario.solver, &scenario.initial) {
        (SolverKind::LocalGodunov, InitialProfile::Riemann { left, right }) => riemann_local_exact(
            scenario.velocity.v_left(),
            scenario.velocity.v_right(),
            *left,
            *right,
        )
        .ok(),
        _ => None,
    };

    let (dxs, errors): (Vec<f64>, Vec<f64>) = match exact {
        Some(sol) => finals
            .iter()
            .map(|f| {
                let g = f.grid();
                let err: f64 = (0..g.n_cells())
                    .map(|j| {
                        let a = g.boundary(j);
                        (f.values()[j] - sol.cell_average(f.time(), a, a + g.dx())).abs()
                    })
                    .sum::<f64>()
                    * g.dx();
                (g.dx(), err)
            })
            .unzip(),
        None => finals
            .windows(2)
            .map(|pair| {
                let coarse = &pair[0];
                let restricted = pair[1].coarsen()?;
                Ok((coarse.grid().dx(), coarse.l1_distance(&restricted)?))
            })
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .unzip(),
    };

    let orders = errors
        .windows(2)
        .map(|e| (e[0] / e[1]).log2())
        .collect();
    let observed_order = if errors.iter().all(|e| *e <= 1e-15) {
        None
    } else {
        let pts: Vec<(f64, f64)> = dxs
            .iter()
            .zip(&errors)
            .filter(|(_, e)| **e > 0.0)
            .map(|(d, e)| (d.ln(), e.ln()))
            .collect();
        Some(if pts.len() >= 2 { least_squares_slope(&pts) } else { f64::INFINITY })
    };
    Ok(ConvergenceReport {
        dxs,
        errors,
        orders,
        observed_order,
        against_exact: exact.is_some(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{Kernel, KernelFamily};
    use crate::scenario::FluxModel;
    use crate::velocity::VelocityField;

    #[test]
    fn steady_constant_state_is_exact() {
        let s = Scenario::new(
            Grid::build(-1.0, 1.0, 10, 10).unwrap(),
            FluxModel::NonLocal(Kernel::new(KernelFamily::Poly2, 0.3).unwrap()),
            VelocityField::new(1.0, 1.0).unwrap(),
            InitialProfile::Riemann { left: 0.4, right: 0.4 },
            0.2,
            SolverKind::NonlocalUpwind,
        );
        let r = convergence_order(&s, &[0.1, 0.05, 0.025]).unwrap();
        assert!(r.is_exact(), "{r:?}");
        assert!(r.errors.iter().all(|e| *e < 1e-15));
    }

    #[test]
    fn ladder_validation() {
        let s = Scenario::new(
            Grid::build(-1.0, 1.0, 10, 10).unwrap(),
            FluxModel::Local,
            VelocityField::new(1.0, 1.0).unwrap(),
            InitialProfile::Riemann { left: 0.4, right: 0.4 },
            0.2,
            SolverKind::LocalGodunov,
        );
        assert!(convergence_order(&s, &[0.1, 0.05]).is_err());
        assert!(convergence_order(&s, &[0.1, 0.04, 0.02]).is_err());
    }
}
