use std::path::PathBuf;

use fracphase::harness::{ExperimentConfig, ExperimentKind};

fn load(name: &str, kind: ExperimentKind) -> ExperimentConfig {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name);
    let text = std::fs::read_to_string(&path).unwrap();
    ExperimentConfig::from_toml(kind, &text).unwrap_or_else(|e| panic!("{name}: {e}"))
}

#[test]
fn shipped_configs_parse() {
    use ExperimentKind::*;
    let cases = [
        ("adaptive.toml", Adaptive),
        ("bubble3d.toml", Bubble3d),
        ("coarsen.toml", Coarsen),
        ("converge_l1.toml", Converge),
        ("converge_l21.toml", Converge),
        ("converge_l21_unbalanced.toml", Converge),
        ("extrap_probe.toml", ExtrapProbe),
        ("kernel_check.toml", KernelCheck),
        ("spinodal.toml", Spinodal),
        ("spinodal_fh.toml", Spinodal),
        ("unbalanced_mbp.toml", Spinodal),
    ];
    for (name, kind) in cases {
        load(name, kind);
    }
    let cfg = load("converge_l21.toml", Converge);
    assert_eq!(cfg.lattice.points, 400);
    assert_eq!(cfg.converge.iota, 0.5);
}
