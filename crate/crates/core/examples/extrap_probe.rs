//! Decay of the linear extrapolation error for `t^ι` on graded grids.
//!
//! `cargo run --release --example extrap_probe`

use fracphase::harness::experiments;
use fracphase::harness::{ExperimentConfig, ExperimentKind};

fn main() -> fracphase::Result<()> {
    let cfg = ExperimentConfig::preset(ExperimentKind::ExtrapProbe);
    for case in experiments::extrapolation_probe(&cfg, None)? {
        print!("γ = {} ι = {}  expected {:.2}  rates", case.gamma, case.iota, case.target_rate);
        for r in &case.rates {
            print!(" {r:.3}");
        }
        println!();
    }
    Ok(())
}
