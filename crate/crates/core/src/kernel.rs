//! Look-ahead kernels `w_η` supported on `[0, η]`.
//!
//! Both families have the form `w(s) = (p+1)(η-s)^p / η^(p+1)` with `p = 2`
//! or `p = 4`. They are nonnegative, nonincreasing, C² on `[0, η]`, vanish
//! together with their first derivative at `s = η`, and integrate to one.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum KernelFamily {
    Poly2,
    Poly4,
}

impl KernelFamily {
    fn degree(self) -> i32 {
        match self {
            KernelFamily::Poly2 => 2,
            KernelFamily::Poly4 => 4,
        }
    }
}

impl fmt::Display for KernelFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KernelFamily::Poly2 => f.write_str("poly2"),
            KernelFamily::Poly4 => f.write_str("poly4"),
        }
    }
}

impl FromStr for KernelFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "poly2" => Ok(KernelFamily::Poly2),
            "poly4" => Ok(KernelFamily::Poly4),
            other => Err(Error::InvalidArgument(format!(
                "unknown kernel family '{other}' (expected poly2 or poly4)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Kernel {
    family: KernelFamily,
    eta: f64,
}

impl Kernel {
    pub fn new(family: KernelFamily, eta: f64) -> Result<Self> {
        if !(eta > 0.0) || !eta.is_finite() {
            return Err(Error::NonPositiveEta(eta));
        }
        Ok(Self { family, eta })
    }

    pub fn family(&self) -> KernelFamily {
        self.family
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    /// `w_η(0)`.
    pub fn w0(&self) -> f64 {
        (self.family.degree() + 1) as f64 / self.eta
    }

    /// Fraction of the support left after `s`, clamped to `[0, 1]`.
    fn remaining(&self, s: f64) -> f64 {
        ((self.eta - s) / self.eta).clamp(0.0, 1.0)
    }

    pub fn value(&self, s: f64) -> f64 {
        if !(0.0..=self.eta).contains(&s) {
            return 0.0;
        }
        let p = self.family.degree();
        (p + 1) as f64 / self.eta * self.remaining(s).powi(p)
    }

    pub fn derivative(&self, s: f64) -> f64 {
        if !(0.0..=self.eta).contains(&s) {
            return 0.0;
        }
        let p = self.family.degree();
        -((p * (p + 1)) as f64) / (self.eta * self.eta) * self.remaining(s).powi(p - 1)
    }

    pub fn second_derivative(&self, s: f64) -> f64 {
        if !(0.0..=self.eta).contains(&s) {
            return 0.0;
        }
        let p = self.family.degree();
        ((p * (p + 1) * (p - 1)) as f64) / self.eta.powi(3) * self.remaining(s).powi(p - 2)
    }

    /// `∫₀^s w_η`, clamped so that it is 0 for `s ≤ 0` and 1 for `s ≥ η`.
    pub fn cumulative(&self, s: f64) -> f64 {
        1.0 - self.remaining(s).powi(self.family.degree() + 1)
    }

    /// `∫₀^η s w_η(s) ds`.
    pub fn first_moment(&self) -> f64 {
        self.eta / (self.family.degree() + 2) as f64
    }
}
