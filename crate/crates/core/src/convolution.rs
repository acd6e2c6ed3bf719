//! Discrete downstream convolution `W = w_η * ρ` at cell boundaries.
//!
//! Boundary `i` (the left edge of cell `i`) sees cells `i, i+1, …, i+K-1`,
//! i.e. only what lies downstream of it. Cells past the right edge of the
//! domain repeat the last cell value.

use crate::field::DensityField;
use crate::grid::Grid;
use crate::kernel::Kernel;

/// Number of cells needed to cover `[0, η]`, tolerant of `η/dx` landing a
/// rounding error above an integer.
fn support_cells(eta: f64, dx: f64) -> usize {
    let ratio = eta / dx;
    let nearest = ratio.round();
    let k = if (ratio - nearest).abs() <= 1e-9 * nearest.max(1.0) {
        nearest
    } else {
        ratio.ceil()
    };
    (k as usize).max(1)
}

/// Per-cell weights `γ_k = ∫_{k dx}^{min((k+1)dx, η)} w_η`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvWeights {
    gamma: Vec<f64>,
    dx: f64,
    kernel: Kernel,
}

impl ConvWeights {
    pub fn new(kernel: &Kernel, dx: f64) -> Self {
        assert!(dx > 0.0, "cell width must be positive");
        let eta = kernel.eta();
        let k_cells = support_cells(eta, dx);
        let gamma = (0..k_cells)
            .map(|k| {
                let a = (k as f64 * dx).min(eta);
                let b = if k + 1 == k_cells { eta } else { ((k + 1) as f64 * dx).min(eta) };
                kernel.cumulative(b) - kernel.cumulative(a)
            })
            .collect();
        Self { gamma, dx, kernel: *kernel }
    }

    pub fn gamma(&self) -> &[f64] {
        &self.gamma
    }

    pub fn gamma0(&self) -> f64 {
        self.gamma[0]
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn kernel(&self) -> &Kernel {
        &self.kernel
    }

    pub fn len(&self) -> usize {
        self.gamma.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gamma.is_empty()
    }
}

pub fn compute_weights(kernel: &Kernel, dx: f64) -> ConvWeights {
    ConvWeights::new(kernel, dx)
}

/// Per-cell integrals of `w'_η`, used for `∂_x(w_η*ρ) = -(w'_η*ρ) - w_η(0)ρ`.
#[derive(Debug, Clone, PartialEq)]
pub struct DerivativeWeights {
    gamma_prime: Vec<f64>,
    w0: f64,
    dx: f64,
}

impl DerivativeWeights {
    pub fn new(kernel: &Kernel, dx: f64) -> Self {
        assert!(dx > 0.0, "cell width must be positive");
        let eta = kernel.eta();
        let k_cells = support_cells(eta, dx);
        let gamma_prime = (0..k_cells)
            .map(|k| {
                let a = (k as f64 * dx).min(eta);
                let b = if k + 1 == k_cells { eta } else { ((k + 1) as f64 * dx).min(eta) };
                kernel.value(b) - kernel.value(a)
            })
            .collect();
        Self { gamma_prime, w0: kernel.w0(), dx }
    }

    pub fn gamma_prime(&self) -> &[f64] {
        &self.gamma_prime
    }

    pub fn w0(&self) -> f64 {
        self.w0
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }
}

/// `W` at every boundary `i = 0..=n`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvField {
    values: Vec<f64>,
    grid: Grid,
}

impl ConvField {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// `Σ_i |W_i| dx` over all boundaries.
    pub fn l1_norm(&self) -> f64 {
        crate::field::kahan_sum(self.values.iter().map(|w| w.abs())) * self.grid.dx()
    }

    /// `Σ_i |W_{i+1} - W_i|`, the discrete `‖∂_x W‖_{L¹}`.
    pub fn derivative_l1(&self) -> f64 {
        self.values.windows(2).map(|w| (w[1] - w[0]).abs()).sum()
    }
}

/// Boundary convolution on raw cell values, writing `n + 1` entries into `out`.
pub fn convolve_into(rho: &[f64], gamma: &[f64], out: &mut Vec<f64>) {
    let n = rho.len();
    let last = rho[n - 1];
    out.clear();
    out.reserve(n + 1);
    for i in 0..=n {
        let inside = n.saturating_sub(i).min(gamma.len());
        let mut acc = 0.0;
        for (g, r) in gamma[..inside].iter().zip(&rho[i..i + inside]) {
            acc += g * r;
        }
        let tail: f64 = gamma[inside..].iter().sum();
        out.push(acc + tail * last);
    }
}

pub fn convolve_values(rho: &[f64], weights: &ConvWeights) -> Vec<f64> {
    let mut out = Vec::with_capacity(rho.len() + 1);
    convolve_into(rho, &weights.gamma, &mut out);
    out
}

pub fn convolve(field: &DensityField, weights: &ConvWeights) -> ConvField {
    assert!(
        (field.grid().dx() - weights.dx()).abs() <= 1e-14 * weights.dx(),
        "field and weights must share the cell width"
    );
    ConvField {
        values: convolve_values(field.values(), weights),
        grid: *field.grid(),
    }
}

/// `-(w'_η*ρ) - w_η(0)ρ` at every boundary `i = 0..=n`, where the point value
/// of `ρ` at a boundary is the mean of its two neighbouring cells.
pub fn conv_x_derivative_values(rho: &[f64], weights: &DerivativeWeights) -> Vec<f64> {
    let n = rho.len();
    let gp = &weights.gamma_prime;
    let last = rho[n - 1];
    (0..=n)
        .map(|i| {
            let inside = n.saturating_sub(i).min(gp.len());
            let mut acc = 0.0;
            for (g, r) in gp[..inside].iter().zip(&rho[i..i + inside]) {
                acc += g * r;
            }
            acc += gp[inside..].iter().sum::<f64>() * last;
            let left = rho[i.saturating_sub(1)];
            let right = rho[i.min(n - 1)];
            -acc - weights.w0 * 0.5 * (left + right)
        })
        .collect()
}

pub fn conv_x_derivative(field: &DensityField, weights: &DerivativeWeights) -> Vec<f64> {
    conv_x_derivative_values(field.values(), weights)
}
