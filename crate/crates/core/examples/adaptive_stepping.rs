//! Energy-driven adaptive steps against fixed large and small steps after a
//! graded start.
//!
//! `cargo run --release --example adaptive_stepping`

use fracphase::harness::experiments;
use fracphase::harness::{ExperimentConfig, ExperimentKind};

fn main() -> fracphase::Result<()> {
    let mut cfg = ExperimentConfig::preset(ExperimentKind::Adaptive);
    cfg.lattice.points = 64;
    cfg.adaptive.t_end = 40.0;
    cfg.adaptive.small_until = 10.0;
    cfg.adaptive.compare_at = 10.0;
    cfg.adaptive.snapshots = vec![];
    let rep = experiments::adaptive(&cfg, None)?;
    for s in [&rep.large, &rep.adaptive, &rep.small] {
        println!(
            "{:8} levels {:5}  t_end {:6.1}  τ ∈ [{:.2e}, {:.3}]  E = {:.6}",
            s.label, s.levels, s.t_end, s.min_tau, s.max_tau, s.e_orig_final
        );
    }
    println!(
        "adaptive vs small at t = {}: max {:.4}, RMS {:.4}, same sign at {:.2}% of points",
        rep.compare_at,
        rep.adaptive_vs_small,
        rep.adaptive_vs_small_rms,
        100.0 * rep.sign_agreement
    );
    Ok(())
}
