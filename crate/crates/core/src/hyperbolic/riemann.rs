//! Exact solution of the local two-flux Riemann problem in the configuration
//! where the congested right road throttles a faster, free-flowing left road.
//!
//! With `f = v_l ρ(1-ρ)` on `x < 0` and `g = v_r ρ(1-ρ)` on `x > 0`, the
//! interface passes `g(ρ_r)`. Upstream a congested plateau `ρ_-` with
//! `f(ρ_-) = g(ρ_r)` builds up behind a shock moving left at the
//! Rankine–Hugoniot speed.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalRiemannSolution {
    pub v_left: f64,
    pub v_right: f64,
    pub rho_left: f64,
    /// Congested plateau between the shock and the interface.
    pub rho_minus: f64,
    pub rho_right: f64,
    pub shock_speed: f64,
}

impl LocalRiemannSolution {
    pub fn eval(&self, t: f64, x: f64) -> f64 {
        if x > 0.0 {
            self.rho_right
        } else if x > self.shock_speed * t {
            self.rho_minus
        } else {
            self.rho_left
        }
    }

    pub fn shock_position(&self, t: f64) -> f64 {
        self.shock_speed * t
    }

    /// Exact average over `[a, b]` at time `t`.
    pub fn cell_average(&self, t: f64, a: f64, b: f64) -> f64 {
        let s = self.shock_position(t);
        let seg = |lo: f64, hi: f64| (b.min(hi) - a.max(lo)).max(0.0);
        (self.rho_left * seg(f64::NEG_INFINITY, s)
            + self.rho_minus * seg(s, 0.0)
            + self.rho_right * seg(0.0, f64::INFINITY))
            / (b - a)
    }
}

/// Builds the exact solution. Configurations outside the supported class,
/// including the degenerate case `g(ρ_r) = f(ρ_l)` where no shock forms, are
/// rejected with [`Error::UnsupportedConfiguration`].
pub fn riemann_local_exact(
    v_l: f64,
    v_r: f64,
    rho_l: f64,
    rho_r: f64,
) -> Result<LocalRiemannSolution> {
    let unsupported = |why: &str| Err(Error::UnsupportedConfiguration(why.to_string()));
    if !(v_l > v_r && v_r > 0.0) {
        return unsupported("requires v_l > v_r > 0");
    }
    if !(0.0..=0.5).contains(&rho_l) {
        return unsupported("left state must be free-flowing (0 <= rho_l <= 1/2)");
    }
    if !(rho_r > 0.5 && rho_r <= 1.0) {
        return unsupported("right state must be congested (1/2 < rho_r <= 1)");
    }
    let f = |r: f64| v_l * r * (1.0 - r);
    let through = v_r * rho_r * (1.0 - rho_r);
    if !(through < f(rho_l) * (1.0 - 1e-12)) {
        return unsupported("interface capacity g(rho_r) must be below the demand f(rho_l)");
    }
    let rho_minus = 0.5 * (1.0 + (1.0 - 4.0 * through / v_l).sqrt());
    let shock_speed = (f(rho_minus) - f(rho_l)) / (rho_minus - rho_l);
    Ok(LocalRiemannSolution {
        v_left: v_l,
        v_right: v_r,
        rho_left: rho_l,
        rho_minus,
        rho_right: rho_r,
        shock_speed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counterexample_states() {
        let sol = riemann_local_exact(2.0, 1.0, 0.25, 0.77).unwrap();
        // Root of 2ρ(1-ρ) = 0.1771 in (1/2, 1): (1 + sqrt(0.6458)) / 2.
        let expected = 0.5 * (1.0 + 0.6458_f64.sqrt());
        assert!((sol.rho_minus - expected).abs() < 1e-14);
        assert!((sol.rho_minus - 0.90181).abs() < 1e-5);
        assert!((sol.rho_minus - 0.9).abs() < 0.002);
        let speed = (0.1771 - 0.375) / (expected - 0.25);
        assert!((sol.shock_speed - speed).abs() < 1e-14);
        assert!((sol.shock_speed + 0.30361).abs() < 1e-4);
        assert!((2.0 * sol.rho_minus * (1.0 - sol.rho_minus) - 0.1771).abs() < 1e-14);
    }

    #[test]
    fn piecewise_evaluation() {
        let sol = riemann_local_exact(2.0, 1.0, 0.25, 0.77).unwrap();
        assert_eq!(sol.eval(1.0, -0.1), sol.rho_minus);
        assert_eq!(sol.eval(1.0, -0.5), 0.25);
        assert_eq!(sol.eval(1.0, 0.3), 0.77);
        let avg = sol.cell_average(1.0, -0.4, -0.2);
        let s = sol.shock_position(1.0);
        let manual = (0.25 * (s + 0.4) + sol.rho_minus * (-0.2 - s)) / 0.2;
        assert!((avg - manual).abs() < 1e-14);
    }

    #[test]
    fn unsupported_configurations() {
        assert!(matches!(
            riemann_local_exact(2.0, 1.0, 0.25, 0.25),
            Err(Error::UnsupportedConfiguration(_))
        ));
        assert!(riemann_local_exact(1.0, 2.0, 0.25, 0.77).is_err());
        assert!(riemann_local_exact(2.0, 1.0, 0.6, 0.77).is_err());
        // g(ρ_r) = f(ρ_l): no shock, rejected.
        let rho_r = 0.5 * (1.0 + (1.0_f64 - 4.0 * 0.1).sqrt());
        assert!((1.8 * rho_r * (1.0 - rho_r) - 2.0 * 0.1 * 0.9).abs() < 1e-15);
        assert!(riemann_local_exact(2.0, 1.8, 0.1, rho_r).is_err());
    }
}
