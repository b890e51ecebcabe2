//! Structural checks of the L1 and L2-1σ convolution kernels on random
//! graded and variable-step grids.
//!
//! `cargo run --release --example kernel_check`

use fracphase::harness::experiments;
use fracphase::harness::{ExperimentConfig, ExperimentKind};

fn main() -> fracphase::Result<()> {
    let cfg = ExperimentConfig::preset(ExperimentKind::KernelCheck);
    let rep = experiments::kernel_check(&cfg, None)?;
    println!("{}", serde_json::to_string_pretty(&rep).expect("report serializes"));
    Ok(())
}
