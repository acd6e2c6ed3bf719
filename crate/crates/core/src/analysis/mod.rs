//! Post-processing audits of trajectories: bound and variation diagnostics,
//! discrete entropy inequalities, interface traces, L¹ stability and
//! refinement studies.

mod convergence;
mod diagnostics;
mod entropy;
mod stability;
mod traces;

pub use convergence::{convergence_order, ConvergenceReport};
pub use diagnostics::{diagnostics, diagnostics_with, DiagnosticRecord};
pub use entropy::{
    default_kappas, entropy_residuals, Condition, EntropyReport, TestFamily, TestFunction,
};
pub use stability::{stability_experiment, StabilityReport};
pub use traces::{extract_traces, extract_traces_band, rh_residual, TraceBand, TraceReport};

use crate::field::DensityField;

/// Total variation over neighbouring cells that both lie outside `(-δ, δ)`.
pub fn tv_excluding(field: &DensityField, delta: f64) -> f64 {
    let grid = field.grid();
    let slack = 1e-9 * grid.dx();
    let outside = |j: usize| grid.boundary(j + 1) <= -delta + slack || grid.boundary(j) >= delta - slack;
    field
        .values()
        .windows(2)
        .enumerate()
        .filter(|(j, _)| outside(*j) && outside(j + 1))
        .map(|(_, w)| (w[1] - w[0]).abs())
        .sum()
}
