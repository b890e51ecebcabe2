//! Forced problem with the exact solution `ω_{1+ι}(t) sin x sin y`, which has
//! the typical `t^ι` singularity at the origin.

use crate::potentials::Potential;
use crate::schemes::Forcing;
use crate::spatial::{Field, Lattice};
use crate::{gamma, Result};

/// `ω_β(t) = t^{β−1} / Γ(β)`.
pub fn omega(beta: f64, t: f64) -> f64 {
    t.powf(beta - 1.0) / gamma(beta)
}

#[derive(Debug, Clone, Copy)]
pub struct Manufactured {
    pub alpha: f64,
    pub iota: f64,
    pub m: f64,
    pub eps: f64,
    pub potential: Potential,
}

impl Manufactured {
    fn shape(lattice: &Lattice) -> Field {
        Field::from_fn(*lattice, |x| x[0].sin() * x[1].sin())
    }

    pub fn exact(&self, lattice: &Lattice, t: f64) -> Field {
        let a = omega(1.0 + self.iota, t);
        Self::shape(lattice).map(|s| a * s)
    }

    /// Pointwise source at `(x, y, t)`.
    pub fn source_at(&self, x: f64, y: f64, t: f64) -> Result<f64> {
        let s = x.sin() * y.sin();
        let phi = omega(1.0 + self.iota, t) * s;
        let caputo = omega(1.0 + self.iota - self.alpha, t) * s;
        Ok(caputo - self.m * (self.eps * self.eps * (-2.0 * phi) + self.potential.force(phi)?))
    }
}

impl Forcing for Manufactured {
    fn eval(&self, lattice: &Lattice, t: f64) -> Field {
        let a = omega(1.0 + self.iota, t);
        let c = omega(1.0 + self.iota - self.alpha, t);
        Self::shape(lattice).map(|s| {
            let phi = a * s;
            let f = self.potential.force(phi).expect("exact solution stays inside the domain");
            c * s - self.m * (-2.0 * self.eps * self.eps * phi + f)
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn problem(alpha: f64, iota: f64) -> Manufactured {
        Manufactured { alpha, iota, m: 0.01, eps: 1.0, potential: Potential::double_well() }
    }

    #[test]
    fn caputo_part_is_shape_when_orders_match() {
        let p = problem(0.4, 0.4);
        for t in [0.01, 0.3, 2.0] {
            let (x, y) = (0.7f64, 2.1f64);
            let s = x.sin() * y.sin();
            let phi = omega(1.4, t) * s;
            let rest = -0.01 * (-2.0 * phi + phi - phi.powi(3));
            assert!((p.source_at(x, y, t).unwrap() - rest - s).abs() < 1e-14);
        }
    }

    #[test]
    fn vanishing_solution_at_origin() {
        let p = problem(0.3, 0.5);
        assert_eq!(p.exact(&Lattice::new(2, 4, 6.0).unwrap(), 0.0).norm_inf(), 0.0);
        // with ι > α the source also vanishes at t = 0
        assert_eq!(p.source_at(1.0, 1.0, 0.0).unwrap(), 0.0);
    }
}
