//! Uniform one-dimensional cell partition with the velocity jump on a cell boundary.

use crate::error::{Error, Result};

/// Tolerance used when checking that both half-domains share one cell width.
const TILING_TOL: f64 = 1e-12;

/// Uniform grid on `[x_min, x_max]` whose boundary number `interface_index`
/// sits exactly at `x = 0`.
///
/// Cell `j` covers `[x_min + j dx, x_min + (j+1) dx]`. Boundary `i` is the left
/// edge of cell `i`, so there are `n_cells + 1` boundaries.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    x_min: f64,
    x_max: f64,
    n_cells: usize,
    dx: f64,
    interface_index: usize,
}

impl Grid {
    /// Builds a grid with `n_half_left` cells on `[x_min, 0]` and
    /// `n_half_right` cells on `[0, x_max]`.
    pub fn build(x_min: f64, x_max: f64, n_half_left: usize, n_half_right: usize) -> Result<Self> {
        if !(x_min < 0.0 && x_max > 0.0) || !x_min.is_finite() || !x_max.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "domain [{x_min}, {x_max}] must satisfy x_min < 0 < x_max"
            )));
        }
        if n_half_left == 0 || n_half_right == 0 {
            return Err(Error::InvalidArgument(
                "each half-domain needs at least one cell".into(),
            ));
        }
        let left_dx = -x_min / n_half_left as f64;
        let right_dx = x_max / n_half_right as f64;
        if (left_dx - right_dx).abs() > TILING_TOL {
            return Err(Error::NonTilingDomain { left_dx, right_dx });
        }
        let dx = left_dx;
        Ok(Self {
            x_min: -(n_half_left as f64) * dx,
            x_max: n_half_right as f64 * dx,
            n_cells: n_half_left + n_half_right,
            dx,
            interface_index: n_half_left,
        })
    }

    /// Symmetric grid on `[-half_width, half_width]` with cell width `dx`.
    pub fn symmetric(half_width: f64, dx: f64) -> Result<Self> {
        let n = (half_width / dx).round();
        if n < 1.0 || ((n * dx) - half_width).abs() > 1e-9 * half_width.max(1.0) {
            return Err(Error::InvalidArgument(format!(
                "half width {half_width} is not a multiple of dx {dx}"
            )));
        }
        Self::build(-half_width, half_width, n as usize, n as usize)
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn n_cells(&self) -> usize {
        self.n_cells
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn interface_index(&self) -> usize {
        self.interface_index
    }

    /// Position of boundary `i`, measured from the interface so that boundary
    /// `interface_index` is exactly zero.
    pub fn boundary(&self, i: usize) -> f64 {
        (i as f64 - self.interface_index as f64) * self.dx
    }

    pub fn center(&self, j: usize) -> f64 {
        (j as f64 - self.interface_index as f64 + 0.5) * self.dx
    }

    pub fn centers(&self) -> Vec<f64> {
        (0..self.n_cells).map(|j| self.center(j)).collect()
    }

    /// Index of the cell containing `x`, clamped to the domain.
    pub fn locate(&self, x: f64) -> usize {
        let j = ((x - self.x_min) / self.dx).floor();
        (j.max(0.0) as usize).min(self.n_cells - 1)
    }

    /// True when `other` has the same cell width and interface placement.
    pub fn same_as(&self, other: &Grid) -> bool {
        self.n_cells == other.n_cells
            && self.interface_index == other.interface_index
            && (self.dx - other.dx).abs() <= 1e-14 * self.dx
    }

    /// The grid with every cell split in two.
    pub fn refined(&self) -> Grid {
        Grid {
            x_min: self.x_min,
            x_max: self.x_max,
            n_cells: 2 * self.n_cells,
            dx: 0.5 * self.dx,
            interface_index: 2 * self.interface_index,
        }
    }
}
