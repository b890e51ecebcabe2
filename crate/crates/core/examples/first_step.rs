//! Residuals of the stabilized first-step iteration against the predicted
//! contraction factor.
//!
//! `cargo run --release --example first_step -- [alpha]`

use fracphase::harness::initial;
use fracphase::monitors::{contraction_factor, max_iterations, tau_bounds};
use fracphase::{L1KernelSet, Lattice, Potential, SchemeConfig, Stepper, TimeGrid, Variant};

fn main() -> fracphase::Result<()> {
    let alpha: f64 = std::env::args().nth(1).map_or(0.5, |s| s.parse().expect("alpha is a number"));
    let lattice = Lattice::new(2, 64, 1.0)?;
    let p = Potential::double_well();
    let kappa = p.kappa_default;
    let bound = tau_bounds(Variant::L1, alpha, 1.0, kappa, 0.01, lattice.h(), 1.0).first_step;
    let stepper = Stepper::new(SchemeConfig::new(Variant::L1, alpha, kappa, 1.0, 0.01), p, lattice)?;
    let phi0 = initial::random_uniform(lattice, 3, 0.8);
    for factor in [0.5, 1.0, 4.0] {
        let grid = TimeGrid::from_times(vec![0.0, factor * bound])?;
        let ell = contraction_factor(L1KernelSet::new(&grid, 1, alpha)?.weights[0], kappa, 1.0);
        let fs = stepper.first_step_iterate(&phi0, &grid)?;
        let worst = fs.residuals.windows(2).map(|w| w[1] / w[0]).fold(0.0f64, f64::max);
        let predicted = if ell < 1.0 { max_iterations(1e-12, p.beta, ell).to_string() } else { "-".into() };
        println!(
            "τ₁ = {factor} × {bound:.4}: ℓ = {ell:.4}, worst ratio {worst:.4}, iterations {} (predicted ≤ {predicted})",
            fs.iterations
        );
    }
    Ok(())
}
