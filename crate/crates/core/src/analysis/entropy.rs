//! Discrete audit of the Kruzkov-type entropy inequalities with an interface.
//!
//! For the flux `f(x, ρ) = ρ a(x)` with `a = (1 - w_η*ρ) v`, the entropy
//! inequality tested against `φ ≥ 0` reads
//!
//! ```text
//! ∫∫ |ρ-κ| φ_t + |ρ-κ| a φ_x + sgn(ρ-κ) κ v ∂_x(w_η*ρ) φ  dx dt
//!     + ∫ |ρ₀-κ| φ(0,x) dx  ≥ 0,
//! ```
//!
//! the source term being `-sgn(ρ-κ) ∂_x f(x, κ)` with `∂_x f(x, κ) = -κ v ∂_x(w_η*ρ)`
//! away from `x = 0`. Test functions that straddle the interface add
//! `∫ |(v_r - v_l) κ (1 - w_η*ρ)(t, 0)| φ(t, 0) dt`. In local mode the same
//! audit runs with the flux `v ρ(1 - ρ)`, no source away from the
//! interface, and interface term `|(v_r - v_l) κ(1 - κ)| φ(t, 0)`.
//!
//! Integrals are evaluated with the trajectory held piecewise constant in
//! time; the `φ_t` term is integrated exactly in time.

use rayon::prelude::*;

use crate::convolution::{compute_weights, conv_x_derivative_values, convolve_values, DerivativeWeights};
use crate::error::{Error, Result};
use crate::hyperbolic::Trajectory;
use crate::scenario::FluxModel;

/// C² bump `(1 - u²)³` on `|u| < 1`.
fn bump(u: f64) -> f64 {
    if u.abs() >= 1.0 {
        0.0
    } else {
        let s = 1.0 - u * u;
        s * s * s
    }
}

fn bump_prime(u: f64) -> f64 {
    if u.abs() >= 1.0 {
        0.0
    } else {
        let s = 1.0 - u * u;
        -6.0 * u * s * s
    }
}

/// Tensor-product test function `β((t - t_c)/t_w) β((x - x_c)/x_w)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TestFunction {
    pub t_center: f64,
    pub t_width: f64,
    pub x_center: f64,
    pub x_width: f64,
}

impl TestFunction {
    pub fn value(&self, t: f64, x: f64) -> f64 {
        bump((t - self.t_center) / self.t_width) * bump((x - self.x_center) / self.x_width)
    }

    pub fn dt(&self, t: f64, x: f64) -> f64 {
        bump_prime((t - self.t_center) / self.t_width) / self.t_width
            * bump((x - self.x_center) / self.x_width)
    }

    pub fn dx(&self, t: f64, x: f64) -> f64 {
        bump((t - self.t_center) / self.t_width) * bump_prime((x - self.x_center) / self.x_width)
            / self.x_width
    }

    fn x_support(&self) -> (f64, f64) {
        (self.x_center - self.x_width, self.x_center + self.x_width)
    }

    fn t_support(&self) -> (f64, f64) {
        (self.t_center - self.t_width, self.t_center + self.t_width)
    }

    pub fn label(&self) -> String {
        format!(
            "phi(t_c={:.4}, t_w={:.4}, x_c={:.4}, x_w={:.4})",
            self.t_center, self.t_width, self.x_center, self.x_width
        )
    }
}

/// Which inequality a residual belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Condition {
    /// Test functions supported in `x > 0`.
    Right,
    /// Test functions supported in `x < 0`.
    Left,
    /// Unrestricted test functions, with the interface term.
    Global,
}

/// Lattice of test functions: `centers × centers` positions for each width.
#[derive(Debug, Clone, PartialEq)]
pub struct TestFamily {
    /// Spatial audit window `[-half_width, half_width]`.
    pub half_width: f64,
    pub horizon: f64,
    pub centers: usize,
    /// `(x_width, t_width)` pairs.
    pub widths: Vec<(f64, f64)>,
}

impl TestFamily {
    /// 5 × 5 centers with three widths, scaled to the audit window and horizon.
    pub fn standard(half_width: f64, horizon: f64) -> Self {
        Self {
            half_width,
            horizon,
            centers: 5,
            widths: vec![
                (0.1 * half_width, horizon / 6.0),
                (0.2 * half_width, horizon / 3.0),
                (0.4 * half_width, horizon / 2.0),
            ],
        }
    }

    fn spread(lo: f64, hi: f64, n: usize) -> Vec<f64> {
        if n == 1 || hi <= lo {
            return vec![0.5 * (lo + hi)];
        }
        (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect()
    }

    /// Test functions admissible for `condition`.
    pub fn functions(&self, condition: Condition) -> Vec<TestFunction> {
        let mut out = Vec::new();
        for &(x_width, t_width) in &self.widths {
            let (lo, hi) = match condition {
                Condition::Right => (x_width * (1.0 + 1e-9), self.half_width - x_width),
                Condition::Left => (-self.half_width + x_width, -x_width * (1.0 + 1e-9)),
                Condition::Global => (-self.half_width + x_width, self.half_width - x_width),
            };
            if hi < lo {
                continue;
            }
            let t_hi = (self.horizon - t_width).max(0.0);
            for t_center in Self::spread(0.0, t_hi, self.centers) {
                for x_center in Self::spread(lo, hi, self.centers) {
                    out.push(TestFunction { t_center, t_width, x_center, x_width });
                }
            }
        }
        out
    }
}

/// `κ ∈ {0, 0.1, …, 1}`.
pub fn default_kappas() -> Vec<f64> {
    (0..=10).map(|k| k as f64 / 10.0).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct EntropyReport {
    /// Condition for test functions supported in `x < 0`.
    pub min_residual_left: f64,
    /// Condition for test functions supported in `x > 0`.
    pub min_residual_right: f64,
    /// Condition with the interface term.
    pub min_residual_global: f64,
    pub worst_kappa: f64,
    pub worst_testfn: String,
    pub tolerance: f64,
}

impl EntropyReport {
    pub fn min_residual(&self) -> f64 {
        self.min_residual_left
            .min(self.min_residual_right)
            .min(self.min_residual_global)
    }

    pub fn passed(&self) -> bool {
        self.min_residual() >= -self.tolerance
    }
}

/// Per-time-level data reused across all `(κ, φ)` pairs.
struct Level {
    t0: f64,
    t1: f64,
    rho: Vec<f64>,
    /// Transport speed `a_j` at cell centers (non-local) or `v_j` (local).
    speed: Vec<f64>,
    /// `v_j ∂_x W` at cell centers; empty in local mode.
    source: Vec<f64>,
    /// `1 - W` at the interface boundary (non-local only).
    interface_free: f64,
}

fn levels(traj: &Trajectory) -> Vec<Level> {
    let grid = traj.grid;
    let iface = grid.interface_index();
    let v_cell: Vec<f64> = grid.centers().iter().map(|x| traj.velocity.at(*x)).collect();
    let kernel_weights = match traj.model {
        FluxModel::NonLocal(k) => Some((compute_weights(&k, grid.dx()), DerivativeWeights::new(&k, grid.dx()))),
        FluxModel::Local => None,
    };
    traj.snapshots
        .windows(2)
        .map(|pair| {
            let rho = pair[0].values().to_vec();
            let (speed, source, interface_free) = match &kernel_weights {
                Some((w, dw)) => {
                    let conv = convolve_values(&rho, w);
                    let deriv = conv_x_derivative_values(&rho, dw);
                    let speed = (0..rho.len())
                        .map(|j| v_cell[j] * (1.0 - 0.5 * (conv[j] + conv[j + 1])))
                        .collect();
                    let source = (0..rho.len())
                        .map(|j| v_cell[j] * 0.5 * (deriv[j] + deriv[j + 1]))
                        .collect();
                    (speed, source, 1.0 - conv[iface])
                }
                None => (v_cell.clone(), Vec::new(), 0.0),
            };
            Level { t0: pair[0].time(), t1: pair[1].time(), rho, speed, source, interface_free }
        })
        .collect()
}

fn sign(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

fn residual(
    traj: &Trajectory,
    levels: &[Level],
    kappa: f64,
    phi: &TestFunction,
    condition: Condition,
) -> f64 {
    let grid = traj.grid;
    let dx = grid.dx();
    let centers = grid.centers();
    let (xa, xb) = phi.x_support();
    let j_lo = grid.locate(xa);
    let j_hi = grid.locate(xb);
    let (ta, tb) = phi.t_support();
    let local = matches!(traj.model, FluxModel::Local);
    let (vl, vr) = (traj.velocity.v_left(), traj.velocity.v_right());

    let mut total = 0.0;
    let rho0 = traj.snapshots[0].values();
    for j in j_lo..=j_hi {
        total += (rho0[j] - kappa).abs() * phi.value(0.0, centers[j]) * dx;
    }
    for level in levels {
        if level.t1 <= ta || level.t0 >= tb {
            continue;
        }
        let dt = level.t1 - level.t0;
        let tm = 0.5 * (level.t0 + level.t1);
        for j in j_lo..=j_hi {
            let x = centers[j];
            let r = level.rho[j];
            let dist = (r - kappa).abs();
            let dphi = phi.value(level.t1, x) - phi.value(level.t0, x);
            let flux = if local {
                let v = level.speed[j];
                sign(r - kappa) * (v * r * (1.0 - r) - v * kappa * (1.0 - kappa))
            } else {
                dist * level.speed[j]
            };
            let mut term = dist * dphi + dt * flux * phi.dx(tm, x);
            if !local {
                term += dt * sign(r - kappa) * kappa * level.source[j] * phi.value(tm, x);
            }
            total += term * dx;
        }
        if condition == Condition::Global {
            let jump = if local {
                ((vr - vl) * kappa * (1.0 - kappa)).abs()
            } else {
                ((vr - vl) * kappa * level.interface_free).abs()
            };
            total += dt * jump * phi.value(tm, 0.0);
        }
    }
    total
}

/// Evaluates all three inequality families over `kappas × family` and reports
/// the minima. Snapshots must be spaced by at most `dx / v_max`.
pub fn entropy_residuals(
    traj: &Trajectory,
    kappas: &[f64],
    family: &TestFamily,
    tolerance: f64,
) -> Result<EntropyReport> {
    if traj.snapshots.len() < 2 {
        return Err(Error::InsufficientSnapshots("need at least two time levels".into()));
    }
    let max_gap = traj.grid.dx() / traj.velocity.v_max();
    if let Some(gap) = traj
        .snapshots
        .windows(2)
        .map(|p| p[1].time() - p[0].time())
        .find(|gap| *gap > max_gap * (1.0 + 1e-9))
    {
        return Err(Error::InsufficientSnapshots(format!(
            "snapshot interval {gap} exceeds dx / v_max = {max_gap}"
        )));
    }
    let levels = levels(traj);
    let mut jobs = Vec::new();
    for condition in [Condition::Right, Condition::Left, Condition::Global] {
        for phi in family.functions(condition) {
            for &kappa in kappas {
                jobs.push((condition, phi, kappa));
            }
        }
    }
    let results: Vec<(Condition, TestFunction, f64, f64)> = jobs
        .par_iter()
        .map(|&(condition, phi, kappa)| {
            (condition, phi, kappa, residual(traj, &levels, kappa, &phi, condition))
        })
        .collect();

    let min_of = |c: Condition| {
        results
            .iter()
            .filter(|r| r.0 == c)
            .map(|r| r.3)
            .fold(f64::INFINITY, f64::min)
    };
    let worst = results
        .iter()
        .min_by(|a, b| a.3.total_cmp(&b.3))
        .ok_or_else(|| Error::InvalidArgument("empty test-function family".into()))?;
    Ok(EntropyReport {
        min_residual_left: min_of(Condition::Left),
        min_residual_right: min_of(Condition::Right),
        min_residual_global: min_of(Condition::Global),
        worst_kappa: worst.2,
        worst_testfn: format!("{:?}: {}", worst.0, worst.1.label()),
        tolerance,
    })
}
