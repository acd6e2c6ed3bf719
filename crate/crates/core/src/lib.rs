//! Finite-volume laboratory for the non-local LWR traffic model
//!
//! ```text
//! ∂_t ρ + ∂_x( ρ (1 - w_η*ρ) v(x) ) = 0,   (w_η*ρ)(x) = ∫_x^{x+η} ρ(y) w_η(y-x) dy,
//! ```
//!
//! with a free-flow speed `v` that jumps from `v_left` to `v_right` at `x = 0`.
//! The crate provides the discrete data types, a monotone upwind scheme for
//! the non-local model, a Godunov scheme and exact Riemann solution for the
//! local model, the vanishing-viscosity regularization, and audits that check
//! solver output against the bounds, entropy inequalities, interface
//! conditions and stability estimates the model is known to satisfy.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod convolution;
pub mod error;
pub mod field;
pub mod grid;
pub mod hyperbolic;
pub mod kernel;
pub mod presets;
pub mod scenario;
pub mod velocity;
pub mod viscous;

pub use error::{Error, Result};
pub use field::{sample_initial, DensityField, InitialProfile};
pub use grid::Grid;
pub use hyperbolic::{run, Trajectory};
pub use kernel::{Kernel, KernelFamily};
pub use scenario::{FluxModel, Scenario, SnapshotPlan, SolverKind};
pub use velocity::VelocityField;
