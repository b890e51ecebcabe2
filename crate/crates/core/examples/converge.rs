//! Temporal convergence on the manufactured solution `ω_{1+ι}(t) sin x sin y`
//! at a coarse spatial resolution.
//!
//! `cargo run --release --example converge -- [l1|l21|l21-unbalanced]`

use fracphase::harness::experiments;
use fracphase::harness::{ExperimentConfig, ExperimentKind};
use fracphase::Variant;

fn main() -> fracphase::Result<()> {
    let variant = match std::env::args().nth(1).as_deref() {
        Some("l21") => Variant::L21,
        Some("l21-unbalanced") => Variant::L21Unbalanced,
        _ => Variant::L1,
    };
    let mut cfg = ExperimentConfig::preset(ExperimentKind::Converge);
    cfg.scheme.variant = variant;
    cfg.model.alpha = if variant == Variant::L1 { 0.4 } else { 0.8 };
    cfg.converge.iota = 0.5;
    cfg.lattice.points = 64;
    cfg.converge.n_list = vec![10, 20, 40, 80];
    let rep = experiments::convergence(&cfg, None)?;
    println!("{} α = {} ι = {} γ = {}, expected order {:.2}", variant.name(), rep.alpha, rep.iota, rep.gamma, rep.target_rate);
    for row in &rep.rows {
        let order = row.order_l2.map_or("  -".to_string(), |o| format!("{o:.3}"));
        println!("N = {:4}  e = {:.3e}  order {order}", row.n, row.error_l2);
    }
    Ok(())
}
