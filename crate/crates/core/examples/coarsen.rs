//! Shrinking of a flower-shaped interface for several fractional orders.
//!
//! `cargo run --release --example coarsen -- [out_dir]`

use std::path::PathBuf;

use fracphase::harness::experiments;
use fracphase::harness::{ExperimentConfig, ExperimentKind};

fn main() -> fracphase::Result<()> {
    let out = std::env::args().nth(1).map(PathBuf::from);
    let mut cfg = ExperimentConfig::preset(ExperimentKind::Coarsen);
    cfg.lattice.points = 64;
    cfg.model.eps = 0.02;
    cfg.coarsen.t_end = 30.0;
    cfg.coarsen.snapshots = vec![10.0, 30.0];
    let rep = experiments::coarsen(&cfg, out.as_deref())?;
    for (alpha, s) in &rep.runs {
        println!("α = {alpha}: {} steps, E(t_end) = {:.5}, bound kept {}", s.steps, s.e_orig_final, s.all_mbp_ok);
    }
    Ok(())
}
