mod common;

use fracphase::Variant;

#[test]
fn laplacian_matrix_annihilates_constants() {
    let lat = fracphase::Lattice::new(2, 4, 1.0).unwrap();
    let l = common::laplacian_matrix(&lat);
    for i in 0..lat.len() {
        assert!(l.row(i).sum().abs() < 1e-9);
    }
}

#[test]
fn steps_match_dense_solve() {
    for variant in [Variant::L1, Variant::L21, Variant::L21Unbalanced] {
        for seed in 0..10 {
            let d = common::step_deviation(variant, seed);
            assert!(d < 1e-10, "{} seed {seed}: {d:e}", variant.name());
        }
    }
}
