//! L¹ distance between two solutions with nearby initial data, and the
//! exponential envelope `‖u(t) - v(t)‖ ≤ e^{Kt} ‖u(0) - v(0)‖`.

use crate::error::{Error, Result};
use crate::field::InitialProfile;
use crate::hyperbolic::run;
use crate::scenario::{Scenario, SnapshotPlan};

#[derive(Debug, Clone, PartialEq)]
pub struct StabilityReport {
    /// Every time level of the two runs.
    pub times: Vec<f64>,
    pub distances: Vec<f64>,
    /// Smallest `K ≥ 0` whose envelope covers every time level.
    pub fitted_k: f64,
    /// Least-squares slope of `log(d(t)/d(0))` against `t` through the origin.
    pub least_squares_k: f64,
    /// Whether every distance lies within the fitted envelope up to a
    /// relative `1e-6`.
    pub envelope_ok: bool,
}

impl StabilityReport {
    pub fn initial_distance(&self) -> f64 {
        self.distances[0]
    }

    pub fn distance_near(&self, t: f64) -> f64 {
        let k = self
            .times
            .iter()
            .enumerate()
            .min_by(|a, b| (a.1 - t).abs().total_cmp(&(b.1 - t).abs()))
            .map(|(k, _)| k)
            .unwrap_or(0);
        self.distances[k]
    }
}

/// Runs `scenario` from its own initial data and from the data plus
/// `perturbation`, both to `t_end` on the same grid, and fits the growth
/// exponent over the time levels where the distance exceeds `1e-14`.
pub fn stability_experiment(
    scenario: &Scenario,
    perturbation: &InitialProfile,
    t_end: f64,
) -> Result<StabilityReport> {
    let mut base = scenario.clone().with_snapshots(SnapshotPlan::EveryStep);
    base.t_end = t_end;
    let perturbed_profile = InitialProfile::Sum(vec![base.initial.clone(), perturbation.clone()]);
    perturbed_profile.sample(&base.grid).map_err(|e| {
        Error::InvalidArgument(format!("perturbed initial data leaves [0, 1]: {e}"))
    })?;
    let perturbed = base.clone().with_initial(perturbed_profile);

    let (u, v) = rayon::join(|| run(&base), || run(&perturbed));
    let (u, v) = (u?, v?);
    if u.snapshots.len() != v.snapshots.len() {
        return Err(Error::InvalidArgument(
            "the two runs took different time steps".into(),
        ));
    }
    let mut times = Vec::with_capacity(u.snapshots.len());
    let mut distances = Vec::with_capacity(u.snapshots.len());
    for (a, b) in u.snapshots.iter().zip(&v.snapshots) {
        if (a.time() - b.time()).abs() > 1e-12 * t_end.max(1.0) {
            return Err(Error::InvalidArgument("the two runs are out of step".into()));
        }
        times.push(a.time());
        distances.push(a.l1_distance(b)?);
    }

    let d0 = distances[0];
    let log_ratios: Vec<(f64, f64)> = times
        .iter()
        .zip(&distances)
        .filter(|(t, d)| **t > 0.0 && d0 > 1e-14 && **d > 1e-14)
        .map(|(t, d)| (*t, (d / d0).ln()))
        .collect();
    let fitted_k = log_ratios
        .iter()
        .map(|(t, r)| r / t)
        .fold(0.0_f64, f64::max);
    let (num, den) = log_ratios
        .iter()
        .fold((0.0, 0.0), |(n, d), (t, r)| (n + t * r, d + t * t));
    let least_squares_k = if den > 0.0 { num / den } else { 0.0 };

    let envelope_ok = distances.iter().zip(&times).all(|(d, t)| {
        d.is_finite() && *d <= (fitted_k * t).exp() * d0 * (1.0 + 1e-6) + if d0 == 0.0 { 1e-14 } else { 0.0 }
    });

    Ok(StabilityReport { times, distances, fitted_k, least_squares_k, envelope_ok })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;
    use crate::kernel::{Kernel, KernelFamily};
    use crate::scenario::{FluxModel, SolverKind};
    use crate::velocity::VelocityField;

    fn scenario() -> Scenario {
        Scenario::new(
            Grid::build(-1.5, 1.5, 75, 75).unwrap(),
            FluxModel::NonLocal(Kernel::new(KernelFamily::Poly2, 0.2).unwrap()),
            VelocityField::new(1.0, 2.0).unwrap(),
            InitialProfile::Riemann { left: 0.25, right: 0.7 },
            0.4,
            SolverKind::NonlocalUpwind,
        )
    }

    #[test]
    fn zero_perturbation() {
        let none = InitialProfile::Bump { center: -0.5, width: 0.2, height: 0.0 };
        let r = stability_experiment(&scenario(), &none, 0.4).unwrap();
        assert!(r.distances.iter().all(|d| *d == 0.0));
        assert_eq!(r.fitted_k, 0.0);
        assert!(r.envelope_ok);
    }

    #[test]
    fn bump_perturbation_stays_in_envelope() {
        let bump = InitialProfile::Bump { center: -0.5, width: 0.2, height: 0.05 };
        let r = stability_experiment(&scenario(), &bump, 0.4).unwrap();
        assert!(r.initial_distance() > 0.0);
        assert!(r.envelope_ok);
        assert!(r.fitted_k.is_finite());
    }

    #[test]
    fn perturbation_must_stay_admissible() {
        let bump = InitialProfile::Bump { center: 0.5, width: 0.2, height: 0.5 };
        assert!(stability_experiment(&scenario(), &bump, 0.4).is_err());
    }
}
