//! Linear, structure-preserving time stepping for the time-fractional
//! Allen–Cahn equation
//!
//! ```text
//!     D_t^α φ = m (ε² Δφ + f(φ)),   0 < α < 1,
//! ```
//!
//! with a Caputo derivative in time and periodic boundary conditions.
//!
//! Three schemes are provided, all built on a stabilized exponential
//! scalar-auxiliary-variable (sESAV) reformulation and an MBP-preserving
//! clipped extrapolation predictor:
//!
//! * [`Variant::L1`]: nonuniform L1 formula, order `2 − α`, unconditionally
//!   energy stable and maximum-bound preserving;
//! * [`Variant::L21`]: nonuniform L2-1σ formula, second order, energy stable,
//!   bound preserving under a step restriction;
//! * [`Variant::L21Unbalanced`]: L2-1σ with an unbalanced stabilization term
//!   that penalises overshoot at large steps.
//!
//! The crate is organised bottom-up: [`timegrid`] builds meshes,
//! [`kernels`] evaluates discrete Caputo weights, [`spatial`] holds periodic
//! lattice fields and the FFT Helmholtz solver, [`potentials`] and [`esav`]
//! describe the nonlinearity, [`schemes`] advances the solution and
//! [`monitors`] certifies it. [`harness`] wires everything into reproducible
//! experiments.

// `!(x > 0.0)` also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod esav;
pub mod harness;
pub mod kernels;
pub mod monitors;
pub mod potentials;
pub mod schemes;
pub mod spatial;
pub mod timegrid;

pub use error::{Error, Result};
pub use esav::{AuxFunctional, PiecewiseCutoff, SavState, Stabilization};
pub use kernels::{L1KernelSet, L21KernelSet};
pub use monitors::{DiagnosticsRow, TauBounds};
pub use potentials::{Potential, PotentialKind};
pub use schemes::{MeshPlan, SchemeConfig, SimState, Stepper, Variant};
pub use spatial::{Field, HelmholtzSolver, Lattice};
pub use timegrid::{AdaptiveController, TimeGrid};

/// Fractional orders must lie strictly inside (0, 1).
pub(crate) fn check_order(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidOrder(alpha))
    }
}

/// Γ(x) for the positive real arguments used throughout the crate.
pub fn gamma(x: f64) -> f64 {
    statrs::function::gamma::gamma(x)
}
