use nonlocal_lwr::convolution::{compute_weights, convolve_values};
use nonlocal_lwr::hyperbolic::{cfl_dt, step_local_godunov, step_nonlocal, SolverState};
use nonlocal_lwr::{DensityField, Grid, Kernel, KernelFamily, VelocityField};
use proptest::prelude::*;

fn family() -> impl Strategy<Value = KernelFamily> {
    prop_oneof![Just(KernelFamily::Poly2), Just(KernelFamily::Poly4)]
}

/// Densities on `n` cells with `pad` empty cells at each end.
fn padded_density(n: usize, pad: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0..=1.0f64, n).prop_map(move |inner| {
        let mut v = vec![0.0; pad];
        v.extend(inner);
        v.extend(std::iter::repeat_n(0.0, pad));
        v
    })
}

proptest! {
    #[test]
    fn grid_tiles_both_halves(nl in 1usize..400, nr in 1usize..400, dx in 1e-3..0.1f64) {
        let grid = Grid::build(-(nl as f64) * dx, nr as f64 * dx, nl, nr).unwrap();
        prop_assert_eq!(grid.n_cells(), nl + nr);
        prop_assert_eq!(grid.boundary(grid.interface_index()), 0.0);
        prop_assert!((grid.boundary(0) - grid.x_min()).abs() <= 1e-12);
        prop_assert!((grid.boundary(grid.n_cells()) - grid.x_max()).abs() <= 1e-12);
        for j in 0..grid.n_cells() {
            prop_assert!(grid.boundary(j) < grid.boundary(j + 1));
        }
    }

    #[test]
    fn convolution_is_a_convex_combination(
        rho in prop::collection::vec(0.0..=1.0f64, 2..200),
        f in family(),
        eta in 0.01..0.5f64,
    ) {
        let w = convolve_values(&rho, &compute_weights(&Kernel::new(f, eta).unwrap(), 0.01));
        let lo = rho.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = rho.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        prop_assert_eq!(w.len(), rho.len() + 1);
        for v in w {
            prop_assert!(v >= lo - 1e-14 && v <= hi + 1e-14);
        }
    }

    #[test]
    fn convolution_l1_bounds(
        rho in padded_density(150, 60),
        f in family(),
        eta in 0.02..0.5f64,
    ) {
        let dx = 0.01;
        let k = Kernel::new(f, eta).unwrap();
        let w = convolve_values(&rho, &compute_weights(&k, dx));
        let norm: f64 = rho.iter().sum::<f64>() * dx;
        let conv_l1: f64 = w.iter().map(|v| v.abs()).sum::<f64>() * dx;
        let variation: f64 = w.windows(2).map(|p| (p[1] - p[0]).abs()).sum();
        prop_assert!(conv_l1 <= norm + 1e-12);
        prop_assert!(variation <= 2.0 * k.w0() * norm + 1e-12);
    }

    #[test]
    fn nonlocal_step_respects_bounds_and_mass(
        rho in padded_density(120, 200),
        f in family(),
        eta in 0.02..0.5f64,
        vl in 0.3..2.0f64,
        dv in 0.0..1.5f64,
        cfl in 0.1..1.0f64,
    ) {
        let grid = Grid::symmetric(2.6, 0.01).unwrap();
        let field = DensityField::new(grid, rho, 0.0).unwrap();
        let weights = compute_weights(&Kernel::new(f, eta).unwrap(), grid.dx());
        let mut state = SolverState::new(field, Some(weights), VelocityField::new(vl, vl + dv).unwrap());
        let mass0 = state.field.mass();
        for _ in 0..20 {
            let dt = cfl_dt(&state, cfl);
            state = step_nonlocal(&state, dt).unwrap();
            prop_assert!(state.field.min() >= 0.0 && state.field.max() <= 1.0);
        }
        prop_assert!((state.field.mass() - mass0).abs() <= 1e-12 * mass0.max(1.0));
    }

    #[test]
    fn local_step_respects_bounds_in_regime(
        rho in padded_density(120, 100),
        vl in 0.3..2.0f64,
        dv in 0.0..1.5f64,
    ) {
        let grid = Grid::symmetric(1.6, 0.01).unwrap();
        let field = DensityField::new(grid, rho.clone(), 0.0).unwrap();
        let mut state = SolverState::new(field, None, VelocityField::new(vl, vl + dv).unwrap());
        let hi = rho.iter().cloned().fold(0.0, f64::max);
        for _ in 0..20 {
            let dt = cfl_dt(&state, 0.9);
            state = step_local_godunov(&state, dt).unwrap();
            prop_assert!(state.field.min() >= 0.0 && state.field.max() <= hi + 1e-12);
        }
    }

    #[test]
    fn coarsening_preserves_mass(rho in prop::collection::vec(0.0..=1.0f64, 100)) {
        let grid = Grid::symmetric(0.5, 0.01).unwrap();
        let field = DensityField::new(grid, rho, 0.0).unwrap();
        let coarse = field.coarsen().unwrap();
        prop_assert_eq!(coarse.values().len(), 50);
        prop_assert!((coarse.mass() - field.mass()).abs() <= 1e-13);
    }
}
