//! Runtime certification of bound preservation and energy decay, theoretical
//! step restrictions and the diagnostics log.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::schemes::Variant;
use crate::spatial::Field;
use crate::{gamma, Result};

pub const MBP_TOL: f64 = 1e-12;
pub const ENERGY_TOL: f64 = 1e-10;
/// Conservative step-ratio threshold for the nonnegative quadratic form.
pub const R_STAR: f64 = 0.4037;

/// Theoretical step restrictions of a scheme.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TauBounds {
    /// Bound on `τ₁` for a contractive, bound-preserving first step.
    pub first_step: f64,
    /// Bound on every later `τ_n` (infinite when unconditional).
    pub per_step: f64,
}

/// Step bounds for the given scheme. `k2` is the bound on the cutoff `V`;
/// the unbalanced variant replaces it by one.
pub fn tau_bounds(variant: Variant, alpha: f64, m: f64, kappa: f64, eps: f64, h: f64, k2: f64) -> TauBounds {
    let g = gamma(2.0 - alpha);
    match variant {
        Variant::L1 => TauBounds {
            first_step: (kappa * m * g).powf(-1.0 / alpha),
            per_step: f64::INFINITY,
        },
        Variant::L21 | Variant::L21Unbalanced => {
            let vs = 0.5 * alpha;
            let stiff = 4.0 * eps * eps / (h * h);
            let first_a = (4.0 / (11.0 * vs * m * (kappa + stiff) * g)).powf(1.0 / alpha);
            let first_b = (4.0 / (11.0 * kappa * (1.0 - vs) * m * g)).powf(1.0 / alpha);
            let k = if variant == Variant::L21Unbalanced { 1.0 } else { k2 };
            let per_step = (4.0 / (11.0 * (1.0 - vs) * m * (stiff + kappa * k) * g)).powf(1.0 / alpha);
            TauBounds { first_step: first_a.min(first_b), per_step }
        }
    }
}

pub fn mbp_check(field: &Field, beta: f64) -> bool {
    field.norm_inf() <= beta + MBP_TOL
}

pub fn energy_check(e_mod_n: f64, e_mod_0: f64) -> bool {
    e_mod_n <= e_mod_0 + ENERGY_TOL
}

/// Contraction factor `2κm / (W₀ + κm)` of the first-step iteration.
pub fn contraction_factor(w0: f64, kappa: f64, m: f64) -> f64 {
    2.0 * kappa * m / (w0 + kappa * m)
}

/// `⌈ln(tol / 2β) / ln ℓ⌉ + 1`, the iteration count after which a
/// contraction with factor `ℓ < 1` started within `[−β, β]` meets `tol`.
pub fn max_iterations(tol: f64, beta: f64, ell: f64) -> usize {
    ((tol / (2.0 * beta)).ln() / ell.ln()).ceil() as usize + 1
}

/// `½ Σ_{j=1}^{n−1} (C_{n−j−1} − C_{n−j}) (Σ_{ℓ>j} w_ℓ)² + ½ C_{n−1} (Σ_ℓ w_ℓ)²`
/// for scalar increments `w_1 … w_n`.
pub fn g_functional_scalar(c: &[f64], w: &[f64]) -> f64 {
    let n = w.len();
    assert_eq!(c.len(), n, "one weight per increment");
    if n == 0 {
        return 0.0;
    }
    let mut tail = 0.0;
    let mut g = 0.0;
    for j in (1..n).rev() {
        tail += w[j];
        g += (c[n - j - 1] - c[n - j]) * tail * tail;
    }
    tail += w[0];
    0.5 * (g + c[n - 1] * tail * tail)
}

/// Field version of [`g_functional_scalar`], evaluated pointwise and
/// integrated over the lattice.
pub fn g_functional(c: &[f64], increments: &[Field]) -> Result<f64> {
    let n = increments.len();
    if n == 0 {
        return Ok(0.0);
    }
    let lat = *increments[0].lattice();
    let mut total = 0.0;
    let mut w = vec![0.0; n];
    for i in 0..lat.len() {
        for (wk, f) in w.iter_mut().zip(increments) {
            if f.lattice() != &lat {
                return Err(crate::Error::LatticeMismatch);
            }
            *wk = f.values()[i];
        }
        total += g_functional_scalar(c, &w);
    }
    Ok(total * lat.cell_volume())
}

/// One line of the per-step log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsRow {
    pub n: usize,
    pub t: f64,
    pub tau: f64,
    pub max_norm: f64,
    pub e_orig: f64,
    pub e_mod: f64,
    pub r: f64,
    pub g: f64,
    pub v: f64,
    pub iters: usize,
    pub mbp_ok: bool,
    pub energy_ok: bool,
}

pub const CSV_HEADER: &str = "n,t,tau,max_norm,E_orig,E_mod,R,g,V,iters,mbp_ok,energy_ok";

impl DiagnosticsRow {
    pub fn to_csv(&self) -> String {
        format!(
            "{},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{},{},{}",
            self.n,
            self.t,
            self.tau,
            self.max_norm,
            self.e_orig,
            self.e_mod,
            self.r,
            self.g,
            self.v,
            self.iters,
            self.mbp_ok,
            self.energy_ok
        )
    }
}

pub fn write_csv<W: Write>(mut out: W, rows: &[DiagnosticsRow]) -> std::io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for row in rows {
        writeln!(out, "{}", row.to_csv())?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::L21KernelSet;
    use crate::spatial::Lattice;
    use crate::timegrid::TimeGrid;
    use proptest::prelude::*;

    #[test]
    fn l1_bounds() {
        let b = tau_bounds(Variant::L1, 0.5, 1.0, 2.0, 0.01, 1.0 / 128.0, 1.0);
        assert!((b.first_step - 1.0 / std::f64::consts::PI).abs() < 1e-12);
        assert!(b.per_step.is_infinite());
    }

    #[test]
    fn l21_per_step_setting() {
        let b = tau_bounds(Variant::L21Unbalanced, 0.9, 1.0, 2.0, 0.01, 1.0 / 128.0, 1.0);
        assert!((b.per_step - 0.0615).abs() < 5e-4, "{}", b.per_step);
    }

    #[test]
    fn checks() {
        let lat = Lattice::new(2, 2, 1.0).unwrap();
        assert!(mbp_check(&Field::constant(lat, 0.999), 1.0));
        let mut f = Field::zeros(lat);
        f.values_mut()[3] = 1.0 + 1e-6;
        assert!(!mbp_check(&f, 1.0));
        assert!(energy_check(1.5, 1.5));
        assert!(!energy_check(1.5 + 1e-9, 1.5));
    }

    #[test]
    fn iteration_cap() {
        assert_eq!(max_iterations(1e-10, 1.0, 0.5), 36);
    }

    #[test]
    fn g_functional_zero_cases() {
        assert_eq!(g_functional_scalar(&[], &[]), 0.0);
        assert_eq!(g_functional_scalar(&[3.0, 2.0], &[0.0, 0.0]), 0.0);
    }

    #[test]
    fn csv_row_round_trips() {
        let row = DiagnosticsRow {
            n: 3,
            t: 0.1,
            tau: 0.05,
            max_norm: 0.9,
            e_orig: 1.0 / 3.0,
            e_mod: 0.3,
            r: 0.2,
            g: 1.0,
            v: 1.0,
            iters: 0,
            mbp_ok: true,
            energy_ok: true,
        };
        let line = row.to_csv();
        let e: f64 = line.split(',').nth(4).unwrap().parse().unwrap();
        assert_eq!(e, 1.0 / 3.0);
        assert_eq!(line.split(',').count(), CSV_HEADER.split(',').count());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn bounds_monotone(alpha in 0.1f64..0.9, k in 0.5f64..10.0, s in 0.0f64..100.0) {
            for v in [Variant::L1, Variant::L21, Variant::L21Unbalanced] {
                let b1 = tau_bounds(v, alpha, 1.0, k, 0.01, 0.01 / (1.0 + s).sqrt(), 1.0);
                let b2 = tau_bounds(v, alpha, 1.0, 2.0 * k, 0.01, 0.01 / (2.0 + s).sqrt(), 1.0);
                prop_assert!(b2.first_step <= b1.first_step);
                prop_assert!(b2.per_step <= b1.per_step || b1.per_step.is_infinite());
            }
        }

        #[test]
        fn g_functional_matches_naive(ws in proptest::collection::vec(-1.0f64..1.0, 1..6)) {
            let n = ws.len();
            let grid = TimeGrid::graded(1.0, 6, 2.0).unwrap();
            let c = L21KernelSet::new(&grid, n, 0.6).unwrap().big_c;
            let mut naive = 0.0;
            for j in 1..n {
                let s: f64 = ws[j..].iter().sum();
                naive += 0.5 * (c[n - j - 1] - c[n - j]) * s * s;
            }
            let all: f64 = ws.iter().sum();
            naive += 0.5 * c[n - 1] * all * all;
            let fast = g_functional_scalar(&c, &ws);
            prop_assert!((fast - naive).abs() < 1e-12 * naive.abs().max(1.0));
            prop_assert!(fast >= -1e-12);
        }
    }
}
