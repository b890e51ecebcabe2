//! Exponential scalar auxiliary variable: the cutoff functional `V`, the
//! ratio `g_h = exp(R − E_{1h})`, energies and the increments of `R`.

use serde::{Deserialize, Serialize};

use crate::potentials::Potential;
use crate::spatial::Field;
use crate::Result;

/// Cutoff applied to the auxiliary ratio. Implementations must satisfy
/// `V(1) = 1`, `V′(1) = 0`, `0 ≤ V ≤ K₂`, and `|V(z) − 1|` nondecreasing in
/// `|z − 1|`.
pub trait AuxFunctional {
    fn eval(&self, z: f64) -> f64;
    fn derivative(&self, z: f64) -> f64;
    /// Bound on `|V′|`.
    fn k1(&self) -> f64;
    /// Bound on `V`.
    fn k2(&self) -> f64;
}

/// Piecewise cubic/quadratic bump supported on `[0, 2]`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct PiecewiseCutoff;

impl AuxFunctional for PiecewiseCutoff {
    fn eval(&self, z: f64) -> f64 {
        if z <= 0.0 || z >= 2.0 {
            0.0
        } else if z < 0.5 {
            z * z * (7.0 - 8.0 * z)
        } else if z <= 1.5 {
            z * (2.0 - z)
        } else {
            ((8.0 * z - 41.0) * z + 68.0) * z - 36.0
        }
    }

    fn derivative(&self, z: f64) -> f64 {
        if z <= 0.0 || z >= 2.0 {
            0.0
        } else if z < 0.5 {
            z * (14.0 - 24.0 * z)
        } else if z <= 1.5 {
            2.0 - 2.0 * z
        } else {
            (24.0 * z - 82.0) * z + 68.0
        }
    }

    fn k1(&self) -> f64 {
        49.0 / 24.0
    }

    fn k2(&self) -> f64 {
        1.0
    }
}

/// Auxiliary energy variable with its initial value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SavState {
    pub r: f64,
    pub r0: f64,
}

impl SavState {
    /// `R⁰ = E_{1h}[φ⁰]`.
    pub fn initial(phi0: &Field, p: &Potential) -> Result<Self> {
        let r0 = nonlinear_energy(phi0, p)?;
        Ok(Self { r: r0, r0 })
    }
}

/// `E_{1h}[v] = ⟨F(v), 1⟩`.
pub fn nonlinear_energy(v: &Field, p: &Potential) -> Result<f64> {
    let mut s = 0.0;
    for &x in v.values() {
        s += p.energy(x)?;
    }
    Ok(s * v.lattice().cell_volume())
}

/// `exp(R − E_{1h}[v])` with the exponent clamped to `[−700, 700]`.
pub fn ratio(v: &Field, r: f64, p: &Potential) -> Result<f64> {
    Ok(ratio_from_energy(nonlinear_energy(v, p)?, r))
}

pub fn ratio_from_energy(e1h: f64, r: f64) -> f64 {
    (r - e1h).clamp(-700.0, 700.0).exp()
}

/// `(E_orig, E_mod)`: the gradient energy plus `E_{1h}[v]` or plus `R`.
pub fn energies(v: &Field, r: f64, eps: f64, p: &Potential) -> Result<(f64, f64)> {
    let grad = 0.5 * eps * eps * v.grad_norm2();
    Ok((grad + nonlinear_energy(v, p)?, grad + r))
}

/// How the stabilization term is weighted by `V`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Stabilization {
    /// `κV(φ − φ̂)`.
    Balanced,
    /// `κ(φ − Vφ̂)`.
    Unbalanced,
}

/// Increment `⟨−V f̂ + stab, ∇_τ φ⟩` of the auxiliary variable, where
/// `level` and `level_hat` are the scheme's evaluation levels of the solution
/// and the predictor, and `f_hat` the force at `level_hat`.
pub fn r_increment(
    stab: Stabilization,
    v_val: f64,
    kappa: f64,
    f_hat: &Field,
    level: &Field,
    level_hat: &Field,
    increment: &Field,
) -> Result<f64> {
    let (fh, lv, lh, inc) = (f_hat.values(), level.values(), level_hat.values(), increment.values());
    if [lv.len(), lh.len(), inc.len()].iter().any(|&l| l != fh.len()) {
        return Err(crate::Error::LatticeMismatch);
    }
    let mut s = 0.0;
    for i in 0..fh.len() {
        let stab_term = match stab {
            Stabilization::Balanced => kappa * v_val * (lv[i] - lh[i]),
            Stabilization::Unbalanced => kappa * (lv[i] - v_val * lh[i]),
        };
        s += (-v_val * fh[i] + stab_term) * inc[i];
    }
    Ok(s * f_hat.lattice().cell_volume())
}
