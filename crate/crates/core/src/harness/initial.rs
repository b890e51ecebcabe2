//! Initial data for the experiments.

use crate::harness::rng;
use crate::spatial::{Field, Lattice};

/// Independent uniform values on `[−amp, amp)` at every node.
pub fn random_uniform(lattice: Lattice, seed: u64, amp: f64) -> Field {
    let values = rng::uniform(seed, lattice.len(), -amp, amp);
    Field::from_values(lattice, values).expect("generated values are finite")
}

/// Six-petal tanh interface centred in the unit square with width
/// parameter `lambda`.
pub fn flower(lattice: Lattice, lambda: f64) -> Field {
    let w = (2.0 * lambda).sqrt();
    Field::from_fn(lattice, |x| {
        let (dx, dy) = (x[0] - 0.5, x[1] - 0.5);
        let r = dx.hypot(dy);
        let theta = dy.atan2(dx);
        ((1.5 + 1.2 * (6.0 * theta).cos() - 2.0 * std::f64::consts::PI * r) / w).tanh()
    })
}

/// Two overlapping balls of radius 0.2 centred at `(±0.14, 0, 0)` in the
/// cube `(−L/2, L/2)³`.
pub fn two_bubbles(lattice: Lattice, eps: f64) -> Field {
    let shift = 0.5 * lattice.length;
    Field::from_fn(lattice, |p| {
        let (x, y, z) = (p[0] - shift, p[1] - shift, p[2] - shift);
        let ball = |c: f64| ((0.2 - ((x + c).powi(2) + y * y + z * z).sqrt()) / eps).tanh();
        ball(0.14).max(ball(-0.14))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shapes_stay_in_range() {
        let lat = Lattice::new(2, 32, 1.0).unwrap();
        assert!(flower(lat, 1e-4).norm_inf() <= 1.0);
        let r = random_uniform(lat, 3, 0.8);
        assert!(r.norm_inf() < 0.8);
        assert_eq!(r, random_uniform(lat, 3, 0.8));
        let cube = Lattice::new(3, 16, 1.0).unwrap();
        let b = two_bubbles(cube, 0.03);
        assert!(b.norm_inf() <= 1.0);
        // the centre (index 8,8,8 is the origin) lies inside both balls
        let centre = 8 * 256 + 8 * 16 + 8;
        assert!(b.values()[centre] > 0.9);
        assert!(b.values()[0] < -0.9);
    }
}
