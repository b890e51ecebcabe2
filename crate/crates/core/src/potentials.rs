//! Nonlinear bulk potentials `F` with force `f = −F′`.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum PotentialKind {
    DoubleWell,
    FloryHuggins { theta: f64, theta_c: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Potential {
    pub kind: PotentialKind,
    /// Bound with `f(±β) = 0`.
    pub beta: f64,
    /// `‖f′‖` on `[−β, β]`, the smallest admissible stabilization constant.
    pub kappa_default: f64,
}

impl Potential {
    /// `F = (1 − x²)²/4`, with `β = 1` and `κ = 2`.
    pub fn double_well() -> Self {
        Self { kind: PotentialKind::DoubleWell, beta: 1.0, kappa_default: 2.0 }
    }

    /// Logarithmic potential with temperatures `θ < θ_c`.
    pub fn flory_huggins(theta: f64, theta_c: f64) -> Result<Self> {
        if !(theta > 0.0 && theta_c > theta) {
            return Err(Error::InvalidParameter(format!(
                "need 0 < θ < θ_c, got θ = {theta}, θ_c = {theta_c}"
            )));
        }
        let kind = PotentialKind::FloryHuggins { theta, theta_c };
        let beta = solve_beta(kind);
        // |f′| is even and monotone on [0, β): extremes at 0 and β
        let kappa_default = (theta_c - theta).max(theta / (1.0 - beta * beta) - theta_c);
        Ok(Self { kind, beta, kappa_default })
    }

    /// The logarithmic potential with `θ = 0.8`, `θ_c = 1.6`.
    pub fn flory_huggins_default() -> Self {
        Self::flory_huggins(0.8, 1.6).expect("default temperatures are valid")
    }

    pub fn name(&self) -> &'static str {
        match self.kind {
            PotentialKind::DoubleWell => "double-well",
            PotentialKind::FloryHuggins { .. } => "flory-huggins",
        }
    }

    fn check(&self, x: f64) -> Result<()> {
        match self.kind {
            PotentialKind::FloryHuggins { .. } if !(x.abs() < 1.0) => Err(Error::Domain(x)),
            _ => Ok(()),
        }
    }

    pub fn energy(&self, x: f64) -> Result<f64> {
        self.check(x)?;
        Ok(match self.kind {
            PotentialKind::DoubleWell => 0.25 * (1.0 - x * x).powi(2),
            PotentialKind::FloryHuggins { theta, theta_c } => {
                0.5 * theta * ((1.0 + x) * x.ln_1p() + (1.0 - x) * (-x).ln_1p()) - 0.5 * theta_c * x * x
            }
        })
    }

    pub fn force(&self, x: f64) -> Result<f64> {
        self.check(x)?;
        Ok(match self.kind {
            PotentialKind::DoubleWell => x - x * x * x,
            PotentialKind::FloryHuggins { theta, theta_c } => fh_force(theta, theta_c, x),
        })
    }

    pub fn force_prime(&self, x: f64) -> Result<f64> {
        self.check(x)?;
        Ok(match self.kind {
            PotentialKind::DoubleWell => 1.0 - 3.0 * x * x,
            PotentialKind::FloryHuggins { theta, theta_c } => -theta / (1.0 - x * x) + theta_c,
        })
    }
}

fn fh_force(theta: f64, theta_c: f64, x: f64) -> f64 {
    0.5 * theta * ((-x).ln_1p() - x.ln_1p()) + theta_c * x
}

/// Positive root of `f`: exactly 1 for the double well, bisection on
/// `(0, 1 − 10⁻¹²)` for the logarithmic potential.
pub fn solve_beta(kind: PotentialKind) -> f64 {
    match kind {
        PotentialKind::DoubleWell => 1.0,
        PotentialKind::FloryHuggins { theta, theta_c } => {
            // f > 0 just right of 0 and f → −∞ at 1
            let (mut lo, mut hi) = (0.0f64, 1.0 - 1e-12);
            while hi - lo > 1e-15 {
                let mid = 0.5 * (lo + hi);
                if fh_force(theta, theta_c, mid) > 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            0.5 * (lo + hi)
        }
    }
}
