//! Named scenarios used by the command-line tool and the acceptance suite.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::field::InitialProfile;
use crate::grid::Grid;
use crate::kernel::{Kernel, KernelFamily};
use crate::scenario::{FluxModel, Scenario, SolverKind};
use crate::velocity::VelocityField;

pub const PRESET_NAMES: &[&str] = &["in-regime-riemann", "counterexample", "in-regime-mirror", "constant"];

/// Non-local model with increasing speed `v = (1, 2)`, Riemann data
/// `0.25 | 0.77`, `η = 0.25`, on `[-1.5, 1.5]` up to `t = 0.5`.
pub fn in_regime_riemann(dx: f64) -> Result<Scenario> {
    Ok(Scenario::new(
        Grid::symmetric(1.5, dx)?,
        FluxModel::NonLocal(Kernel::new(KernelFamily::Poly2, 0.25)?),
        VelocityField::new(1.0, 2.0)?,
        InitialProfile::Riemann { left: 0.25, right: 0.77 },
        0.5,
        SolverKind::NonlocalUpwind,
    ))
}

/// Local model with `f = 2ρ(1-ρ)` left and `g = ρ(1-ρ)` right, Riemann data
/// `0.25 | 0.77` on `[-2, 2]` up to `t = 0.5`.
pub fn counterexample(dx: f64) -> Result<Scenario> {
    Ok(Scenario::new(
        Grid::symmetric(2.0, dx)?,
        FluxModel::Local,
        VelocityField::new(2.0, 1.0)?,
        InitialProfile::Riemann { left: 0.25, right: 0.77 },
        0.5,
        SolverKind::LocalGodunov,
    ))
}

/// The counterexample with the two speeds swapped, `v = (1, 2)`.
pub fn in_regime_mirror(dx: f64) -> Result<Scenario> {
    let mut s = counterexample(dx)?;
    s.velocity = VelocityField::new(1.0, 2.0)?;
    Ok(s)
}

/// Uniform state `ρ ≡ 0.4` with `v_l = v_r = 1`.
pub fn constant_state(dx: f64) -> Result<Scenario> {
    Ok(Scenario::new(
        Grid::symmetric(1.0, dx)?,
        FluxModel::NonLocal(Kernel::new(KernelFamily::Poly2, 0.2)?),
        VelocityField::new(1.0, 1.0)?,
        InitialProfile::Riemann { left: 0.4, right: 0.4 },
        0.5,
        SolverKind::NonlocalUpwind,
    ))
}

pub fn by_name(name: &str, dx: f64) -> Option<Result<Scenario>> {
    match name {
        "in-regime-riemann" => Some(in_regime_riemann(dx)),
        "counterexample" => Some(counterexample(dx)),
        "in-regime-mirror" => Some(in_regime_mirror(dx)),
        "constant" => Some(constant_state(dx)),
        _ => None,
    }
}

/// Seeded corpus of in-regime non-local scenarios on `[-4.5, 4.5]` up to
/// `t = 1`. Initial data are integrable: alternately two random states on
/// `[a, 0)` and `[0, b)` (zero elsewhere) and a single bump reaching left of
/// `x = -0.1`. `η` is uniform in `[2 dx, 0.5]` and `0.5 ≤ v_l < v_r ≤ 2.5`,
/// so no mass reaches the domain edges before `t = 1`.
pub fn random_corpus(seed: u64, count: usize, dx: f64) -> Result<Vec<Scenario>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let grid = Grid::symmetric(4.5, dx)?;
    (0..count)
        .map(|k| {
            let eta = rng.gen_range(2.0 * dx..=0.5);
            let family = if rng.gen_bool(0.5) { KernelFamily::Poly2 } else { KernelFamily::Poly4 };
            let v_left = rng.gen_range(0.5..1.5);
            let v_right = v_left + rng.gen_range(0.05..1.0);
            let initial = if k % 2 == 0 {
                let a = rng.gen_range(-2.0..-0.5);
                let b = rng.gen_range(0.5..2.0);
                InitialProfile::Table {
                    breaks: vec![a, 0.0, b],
                    values: vec![0.0, rng.gen(), rng.gen(), 0.0],
                }
            } else {
                InitialProfile::Bump {
                    center: rng.gen_range(-1.5..-0.2),
                    width: rng.gen_range(0.1..0.5),
                    height: rng.gen_range(0.1..=1.0),
                }
            };
            Ok(Scenario::new(
                grid,
                FluxModel::NonLocal(Kernel::new(family, eta)?),
                VelocityField::new(v_left, v_right)?,
                initial,
                1.0,
                SolverKind::NonlocalUpwind,
            ))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_validate_cleanly() {
        for name in PRESET_NAMES {
            let s = by_name(name, 0.01).unwrap().unwrap();
            let warnings = s.validate().unwrap();
            if *name == "counterexample" {
                assert_eq!(warnings.len(), 1);
            } else {
                assert!(warnings.is_empty(), "{name}: {warnings:?}");
            }
        }
        assert!(by_name("nope", 0.01).is_none());
    }

    #[test]
    fn corpus_is_seeded_and_in_regime() {
        let a = random_corpus(3, 10, 0.01).unwrap();
        let b = random_corpus(3, 10, 0.01).unwrap();
        assert_eq!(a, b);
        for s in &a {
            assert!(s.velocity.in_regime());
            assert!(s.validate().unwrap().is_empty());
        }
    }
}
