//! Cell-averaged densities and the initial profiles they are sampled from.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::grid::Grid;

/// Cell averages `ρ_j` on a grid at one time level.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityField {
    values: Vec<f64>,
    grid: Grid,
    time: f64,
}

impl DensityField {
    /// Validated constructor: every value must lie in `[0, 1]`.
    pub fn new(grid: Grid, values: Vec<f64>, time: f64) -> Result<Self> {
        if values.len() != grid.n_cells() {
            return Err(Error::InvalidArgument(format!(
                "{} values for a grid of {} cells",
                values.len(),
                grid.n_cells()
            )));
        }
        if let Some((index, &value)) = values
            .iter()
            .enumerate()
            .find(|(_, v)| !(0.0..=1.0).contains(*v))
        {
            return Err(Error::OutOfRangeDensity { index, value });
        }
        Ok(Self { values, grid, time })
    }

    /// Solver output; values are not re-validated so that round-off outside
    /// `[0, 1]` stays observable to the diagnostics.
    pub(crate) fn from_raw(grid: Grid, values: Vec<f64>, time: f64) -> Self {
        debug_assert_eq!(values.len(), grid.n_cells());
        Self { values, grid, time }
    }

    pub fn constant(grid: Grid, value: f64) -> Result<Self> {
        Self::new(grid, vec![value; grid.n_cells()], 0.0)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn with_time(mut self, time: f64) -> Self {
        self.time = time;
        self
    }

    pub fn mass(&self) -> f64 {
        kahan_sum(self.values.iter().copied()) * self.grid.dx()
    }

    pub fn l1_norm(&self) -> f64 {
        kahan_sum(self.values.iter().map(|v| v.abs())) * self.grid.dx()
    }

    pub fn total_variation(&self) -> f64 {
        self.values.windows(2).map(|w| (w[1] - w[0]).abs()).sum()
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// `Σ |ρ_j - σ_j| dx` against a field on the same grid.
    pub fn l1_distance(&self, other: &DensityField) -> Result<f64> {
        if !self.grid.same_as(&other.grid) {
            return Err(Error::InvalidArgument("fields live on different grids".into()));
        }
        Ok(kahan_sum(
            self.values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| (a - b).abs()),
        ) * self.grid.dx())
    }

    /// Averages pairs of cells onto the grid with twice the cell width.
    pub fn coarsen(&self) -> Result<DensityField> {
        let g = self.grid;
        if !g.n_cells().is_multiple_of(2) || !g.interface_index().is_multiple_of(2) {
            return Err(Error::InvalidArgument(
                "coarsening needs an even number of cells on both sides".into(),
            ));
        }
        let coarse = Grid::build(
            g.x_min(),
            g.x_max(),
            g.interface_index() / 2,
            (g.n_cells() - g.interface_index()) / 2,
        )?;
        let values = self
            .values
            .chunks_exact(2)
            .map(|c| 0.5 * (c[0] + c[1]))
            .collect();
        Ok(DensityField::from_raw(coarse, values, self.time))
    }
}

/// Compensated summation, so that mass diagnostics are not dominated by
/// round-off on long grids.
pub fn kahan_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0_f64;
    let mut comp = 0.0_f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Initial density profiles. Profiles are additive so a perturbation can be
/// layered on a base profile.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialProfile {
    /// `left` for `x < 0`, `right` for `x > 0`.
    Riemann { left: f64, right: f64 },
    /// `height · cos²(π (x - center) / (2 width))` on `|x - center| < width`.
    Bump { center: f64, width: f64, height: f64 },
    /// Piecewise constant: `values[k]` on `[breaks[k-1], breaks[k])`.
    Table { breaks: Vec<f64>, values: Vec<f64> },
    /// Pointwise sum of profiles.
    Sum(Vec<InitialProfile>),
}

impl InitialProfile {
    /// Pointwise value; at a jump the right value is returned.
    pub fn value_at(&self, x: f64) -> f64 {
        match self {
            InitialProfile::Riemann { left, right } => {
                if x < 0.0 {
                    *left
                } else {
                    *right
                }
            }
            InitialProfile::Bump { center, width, height } => {
                let u = (x - center) / width;
                if u.abs() >= 1.0 {
                    0.0
                } else {
                    height * (0.5 * PI * u).cos().powi(2)
                }
            }
            InitialProfile::Table { breaks, values } => {
                let k = breaks.partition_point(|b| *b <= x);
                values[k]
            }
            InitialProfile::Sum(parts) => parts.iter().map(|p| p.value_at(x)).sum(),
        }
    }

    /// Exact `∫_a^b ρ₀(x) dx` for `a ≤ b`.
    pub fn integral(&self, a: f64, b: f64) -> f64 {
        match self {
            InitialProfile::Riemann { left, right } => {
                let neg = (b.min(0.0) - a.min(0.0)).max(0.0);
                let pos = (b.max(0.0) - a.max(0.0)).max(0.0);
                left * neg + right * pos
            }
            InitialProfile::Bump { center, width, height } => {
                let lo = a.max(center - width);
                let hi = b.min(center + width);
                if hi <= lo {
                    return 0.0;
                }
                // cos²(πu/2) = (1 + cos πu)/2, u = (x - c)/width
                let anti = |x: f64| {
                    let u = (x - center) / width;
                    0.5 * (x + width / PI * (PI * u).sin())
                };
                height * (anti(hi) - anti(lo))
            }
            InitialProfile::Table { breaks, values } => {
                let mut acc = 0.0;
                let mut lo = a;
                for (k, &v) in values.iter().enumerate() {
                    let hi = breaks.get(k).copied().unwrap_or(f64::INFINITY).min(b);
                    if hi > lo {
                        acc += v * (hi - lo);
                        lo = hi;
                    }
                    if lo >= b {
                        break;
                    }
                }
                acc
            }
            InitialProfile::Sum(parts) => parts.iter().map(|p| p.integral(a, b)).sum(),
        }
    }

    /// Checks the structural parameters and that every attained value lies
    /// in `[0, 1]`.
    pub fn validate(&self) -> Result<()> {
        let range = |index: usize, value: f64| -> Result<()> {
            if (0.0..=1.0).contains(&value) {
                Ok(())
            } else {
                Err(Error::OutOfRangeDensity { index, value })
            }
        };
        match self {
            InitialProfile::Riemann { left, right } => {
                range(0, *left)?;
                range(1, *right)
            }
            InitialProfile::Bump { width, height, .. } => {
                if !(*width > 0.0) {
                    return Err(Error::InvalidScenario("bump width must be positive".into()));
                }
                range(0, *height)
            }
            InitialProfile::Table { breaks, values } => {
                if values.len() != breaks.len() + 1 {
                    return Err(Error::InvalidScenario(
                        "table needs exactly one more value than breakpoints".into(),
                    ));
                }
                if breaks.windows(2).any(|w| w[1] <= w[0]) {
                    return Err(Error::InvalidScenario(
                        "table breakpoints must be strictly increasing".into(),
                    ));
                }
                values.iter().enumerate().try_for_each(|(k, v)| range(k, *v))
            }
            InitialProfile::Sum(parts) => {
                parts.iter().try_for_each(|p| match p {
                    InitialProfile::Sum(_) => p.validate(),
                    InitialProfile::Bump { width, .. } if !(*width > 0.0) => Err(
                        Error::InvalidScenario("bump width must be positive".into()),
                    ),
                    _ => Ok(()),
                })
            }
        }
    }

    /// Cell averages on `grid`. Piecewise-constant pieces are averaged exactly,
    /// including the cell that contains a jump.
    pub fn sample(&self, grid: &Grid) -> Result<DensityField> {
        self.validate()?;
        let dx = grid.dx();
        let values = (0..grid.n_cells())
            .map(|j| {
                let a = grid.boundary(j);
                let b = a + dx;
                let avg = if self.constant_on(a, b) {
                    self.value_at(0.5 * (a + b))
                } else {
                    self.integral(a, b) / dx
                };
                // Round-off in the exact average must not trip the range check.
                if (-1e-12..0.0).contains(&avg) {
                    0.0
                } else if avg > 1.0 && avg <= 1.0 + 1e-12 {
                    1.0
                } else {
                    avg
                }
            })
            .collect();
        DensityField::new(*grid, values, 0.0)
    }

    /// True when the profile is constant on `[a, b]`.
    pub fn constant_on(&self, a: f64, b: f64) -> bool {
        match self {
            InitialProfile::Riemann { .. } => b <= 0.0 || a >= 0.0,
            InitialProfile::Bump { center, width, height } => {
                *height == 0.0 || b <= center - width || a >= center + width
            }
            InitialProfile::Table { breaks, .. } => !breaks.iter().any(|x| *x > a && *x < b),
            InitialProfile::Sum(parts) => parts.iter().all(|p| p.constant_on(a, b)),
        }
    }

    /// True when the profile vanishes outside a bounded set, i.e. lies in L¹.
    pub fn is_integrable(&self) -> bool {
        match self {
            InitialProfile::Riemann { left, right } => *left == 0.0 && *right == 0.0,
            InitialProfile::Bump { .. } => true,
            InitialProfile::Table { values, .. } => {
                values.first() == Some(&0.0) && values.last() == Some(&0.0)
            }
            InitialProfile::Sum(parts) => parts.iter().all(|p| p.is_integrable()),
        }
    }
}

/// Samples `profile` on `grid`; the free-function form of [`InitialProfile::sample`].
pub fn sample_initial(profile: &InitialProfile, grid: &Grid) -> Result<DensityField> {
    profile.sample(grid)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> Grid {
        Grid::build(-2.0, 2.0, 100, 100).unwrap()
    }

    #[test]
    fn riemann_cells_take_the_states() {
        let f = sample_initial(&InitialProfile::Riemann { left: 0.25, right: 0.77 }, &grid()).unwrap();
        assert!(f.values()[..100].iter().all(|&v| v == 0.25));
        assert!(f.values()[100..].iter().all(|&v| v == 0.77));
    }

    #[test]
    fn zero_height_bump_is_zero() {
        let f = sample_initial(
            &InitialProfile::Bump { center: 0.3, width: 0.2, height: 0.0 },
            &grid(),
        )
        .unwrap();
        assert!(f.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn table_out_of_range_is_rejected() {
        let p = InitialProfile::Table { breaks: vec![0.0], values: vec![0.5, 1.2] };
        assert_eq!(
            sample_initial(&p, &grid()).unwrap_err(),
            Error::OutOfRangeDensity { index: 1, value: 1.2 }
        );
        let err = DensityField::new(Grid::build(-1.0, 1.0, 1, 1).unwrap(), vec![0.2, 1.2], 0.0)
            .unwrap_err();
        assert_eq!(err, Error::OutOfRangeDensity { index: 1, value: 1.2 });
    }

    #[test]
    fn jump_inside_a_cell_is_averaged_exactly() {
        let p = InitialProfile::Table { breaks: vec![0.01], values: vec![0.0, 1.0] };
        let f = sample_initial(&p, &grid()).unwrap();
        assert!((f.values()[100] - 0.5).abs() < 1e-12);
        let mass = f.mass();
        assert!((mass - p.integral(-2.0, 2.0)).abs() < 1e-12);
    }

    #[test]
    fn bump_mass_matches_closed_form() {
        let p = InitialProfile::Bump { center: -0.37, width: 0.45, height: 0.8 };
        let f = sample_initial(&p, &grid()).unwrap();
        // ∫ h cos²(πu/2) over the support is h·width.
        assert!((f.mass() - 0.8 * 0.45).abs() < 1e-12);
    }

    #[test]
    fn total_variation_and_coarsening() {
        let f = sample_initial(&InitialProfile::Riemann { left: 0.1, right: 0.6 }, &grid()).unwrap();
        assert!((f.total_variation() - 0.5).abs() < 1e-15);
        let c = f.coarsen().unwrap();
        assert_eq!(c.grid().n_cells(), 100);
        assert!((c.mass() - f.mass()).abs() < 1e-13);
    }

    #[test]
    fn integrability() {
        assert!(!InitialProfile::Riemann { left: 0.25, right: 0.77 }.is_integrable());
        assert!(InitialProfile::Bump { center: 0.0, width: 1.0, height: 0.5 }.is_integrable());
        assert!(InitialProfile::Table { breaks: vec![-1.0, 1.0], values: vec![0.0, 0.4, 0.0] }
            .is_integrable());
    }
}
