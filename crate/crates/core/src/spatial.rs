//! Periodic lattice fields, the standard finite-difference Laplacian and a
//! Fourier-diagonalised solver for `(λI − cΔ_h)u = f`.

use std::fmt;
use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Uniform periodic lattice with `M` points per direction on `[0, L)^dim`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Lattice {
    pub dim: usize,
    pub m: usize,
    pub length: f64,
}

impl Lattice {
    pub fn new(dim: usize, m: usize, length: f64) -> Result<Self> {
        if !(dim == 2 || dim == 3) {
            return Err(Error::InvalidParameter(format!("dimension must be 2 or 3, got {dim}")));
        }
        if m < 2 {
            return Err(Error::InvalidParameter(format!("need at least 2 points per direction, got {m}")));
        }
        if !(length > 0.0 && length.is_finite()) {
            return Err(Error::InvalidParameter(format!("domain length must be positive, got {length}")));
        }
        Ok(Self { dim, m, length })
    }

    pub fn h(&self) -> f64 {
        self.length / self.m as f64
    }

    pub fn len(&self) -> usize {
        self.m.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Volume element `h^dim`.
    pub fn cell_volume(&self) -> f64 {
        self.h().powi(self.dim as i32)
    }

    /// Multi-index of a flat row-major index; the last axis varies fastest.
    pub fn unravel(&self, mut idx: usize) -> [usize; 3] {
        let mut out = [0; 3];
        for d in (0..self.dim).rev() {
            out[d] = idx % self.m;
            idx /= self.m;
        }
        out
    }

    /// Node coordinates `i·h` of a flat index (unused axes are zero).
    pub fn coords(&self, idx: usize) -> [f64; 3] {
        let h = self.h();
        let ix = self.unravel(idx);
        [ix[0] as f64 * h, ix[1] as f64 * h, ix[2] as f64 * h]
    }

    fn stride(&self, axis: usize) -> usize {
        self.m.pow((self.dim - 1 - axis) as u32)
    }
}

/// Real grid function on a periodic lattice, stored row-major.
#[derive(Clone, PartialEq)]
pub struct Field {
    lattice: Lattice,
    values: Vec<f64>,
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Field")
            .field("lattice", &self.lattice)
            .field("max_norm", &self.norm_inf())
            .finish()
    }
}

impl Field {
    pub fn zeros(lattice: Lattice) -> Self {
        Self { lattice, values: vec![0.0; lattice.len()] }
    }

    pub fn constant(lattice: Lattice, c: f64) -> Self {
        Self { lattice, values: vec![c; lattice.len()] }
    }

    pub fn from_values(lattice: Lattice, values: Vec<f64>) -> Result<Self> {
        if values.len() != lattice.len() {
            return Err(Error::InvalidParameter(format!(
                "expected {} values, got {}",
                lattice.len(),
                values.len()
            )));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(format!("non-finite value {v} in field")));
        }
        Ok(Self { lattice, values })
    }

    /// Samples `f` at the lattice nodes.
    pub fn from_fn(lattice: Lattice, f: impl Fn([f64; 3]) -> f64) -> Self {
        let values = (0..lattice.len()).map(|i| f(lattice.coords(i))).collect();
        Self { lattice, values }
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Field {
        Field { lattice: self.lattice, values: self.values.iter().map(|&v| f(v)).collect() }
    }

    pub fn try_map(&self, f: impl Fn(f64) -> Result<f64>) -> Result<Field> {
        let values = self.values.iter().map(|&v| f(v)).collect::<Result<Vec<_>>>()?;
        Ok(Field { lattice: self.lattice, values })
    }

    /// Pointwise `f(self, other)`.
    pub fn zip_map(&self, other: &Field, f: impl Fn(f64, f64) -> f64) -> Result<Field> {
        self.same_lattice(other)?;
        let values = self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect();
        Ok(Field { lattice: self.lattice, values })
    }

    /// `self ← self + a·x`.
    pub fn axpy(&mut self, a: f64, x: &Field) -> Result<()> {
        self.same_lattice(x)?;
        for (s, &v) in self.values.iter_mut().zip(&x.values) {
            *s += a * v;
        }
        Ok(())
    }

    pub fn scale(&mut self, a: f64) {
        self.values.iter_mut().for_each(|v| *v *= a);
    }

    /// `a·x + b·y`.
    pub fn lincomb(a: f64, x: &Field, b: f64, y: &Field) -> Result<Field> {
        x.zip_map(y, |u, v| a * u + b * v)
    }

    fn same_lattice(&self, other: &Field) -> Result<()> {
        if self.lattice == other.lattice {
            Ok(())
        } else {
            Err(Error::LatticeMismatch)
        }
    }

    /// Periodic five-point (2D) or seven-point (3D) Laplacian.
    pub fn laplacian(&self) -> Field {
        let lat = self.lattice;
        let m = lat.m;
        let inv_h2 = 1.0 / (lat.h() * lat.h());
        let mut out = vec![0.0; self.values.len()];
        for (idx, o) in out.iter_mut().enumerate() {
            let ix = lat.unravel(idx);
            let centre = self.values[idx];
            let mut acc = -2.0 * lat.dim as f64 * centre;
            for d in 0..lat.dim {
                let s = lat.stride(d);
                let up = if ix[d] + 1 == m { idx + s - m * s } else { idx + s };
                let down = if ix[d] == 0 { idx + m * s - s } else { idx - s };
                acc += self.values[up] + self.values[down];
            }
            *o = acc * inv_h2;
        }
        Field { lattice: lat, values: out }
    }

    /// Discrete inner product `h^dim Σ v w`.
    pub fn inner(&self, other: &Field) -> Result<f64> {
        self.same_lattice(other)?;
        let s: f64 = self.values.iter().zip(&other.values).map(|(a, b)| a * b).sum();
        Ok(s * self.lattice.cell_volume())
    }

    /// `h^dim Σ v`, the inner product with the constant one.
    pub fn integral(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.lattice.cell_volume()
    }

    pub fn norm2(&self) -> f64 {
        self.inner(self).expect("a field shares its own lattice").sqrt()
    }

    pub fn norm_inf(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `‖∇_h v‖²` with forward differences along every axis.
    pub fn grad_norm2(&self) -> f64 {
        let lat = self.lattice;
        let m = lat.m;
        let mut acc = 0.0;
        for idx in 0..self.values.len() {
            let ix = lat.unravel(idx);
            for d in 0..lat.dim {
                let s = lat.stride(d);
                let up = if ix[d] + 1 == m { idx + s - m * s } else { idx + s };
                let diff = self.values[up] - self.values[idx];
                acc += diff * diff;
            }
        }
        acc * lat.cell_volume() / (lat.h() * lat.h())
    }

    pub fn max_abs_diff(&self, other: &Field) -> Result<f64> {
        self.same_lattice(other)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs())))
    }
}

/// Solver for `(λI − cΔ_h)u = f` on a fixed lattice. FFT plans and the 1D
/// symbol `(4/h²) sin²(πk/M)` are built once and reused for every shift.
pub struct HelmholtzSolver {
    lattice: Lattice,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    symbol_1d: Vec<f64>,
}

impl fmt::Debug for HelmholtzSolver {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("HelmholtzSolver").field("lattice", &self.lattice).finish()
    }
}

impl HelmholtzSolver {
    pub fn new(lattice: Lattice) -> Self {
        let mut planner = FftPlanner::new();
        let m = lattice.m;
        let h = lattice.h();
        let symbol_1d = (0..m)
            .map(|k| {
                let s = (std::f64::consts::PI * k as f64 / m as f64).sin();
                4.0 * s * s / (h * h)
            })
            .collect();
        Self {
            lattice,
            forward: planner.plan_fft_forward(m),
            inverse: planner.plan_fft_inverse(m),
            symbol_1d,
        }
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    /// Eigenvalue of `−Δ_h` for the Fourier mode with the given multi-index.
    pub fn symbol(&self, k: [usize; 3]) -> f64 {
        (0..self.lattice.dim).map(|d| self.symbol_1d[k[d]]).sum()
    }

    pub fn solve(&self, lam: f64, c: f64, rhs: &Field) -> Result<Field> {
        if !(lam > 0.0) {
            return Err(Error::NonPositiveShift(lam));
        }
        if rhs.lattice != self.lattice {
            return Err(Error::LatticeMismatch);
        }
        if c == 0.0 {
            return Ok(rhs.map(|v| v / lam));
        }
        let lat = self.lattice;
        let mut data: Vec<Complex<f64>> = rhs.values.iter().map(|&v| Complex::new(v, 0.0)).collect();
        for axis in 0..lat.dim {
            self.transform_axis(&mut data, axis, &self.forward);
        }
        for (idx, z) in data.iter_mut().enumerate() {
            *z /= lam + c * self.symbol(lat.unravel(idx));
        }
        for axis in 0..lat.dim {
            self.transform_axis(&mut data, axis, &self.inverse);
        }
        let norm = 1.0 / lat.len() as f64;
        let values = data.iter().map(|z| z.re * norm).collect();
        Ok(Field { lattice: lat, values })
    }

    fn transform_axis(&self, data: &mut [Complex<f64>], axis: usize, plan: &Arc<dyn Fft<f64>>) {
        let m = self.lattice.m;
        let stride = self.lattice.stride(axis);
        if stride == 1 {
            plan.process(data);
            return;
        }
        // gather the strided lines of each block into a contiguous buffer
        let block = m * stride;
        let mut buf = vec![Complex::new(0.0, 0.0); block];
        for chunk in data.chunks_mut(block) {
            for j in 0..stride {
                for i in 0..m {
                    buf[j * m + i] = chunk[i * stride + j];
                }
            }
            plan.process(&mut buf);
            for j in 0..stride {
                for i in 0..m {
                    chunk[i * stride + j] = buf[j * m + i];
                }
            }
        }
    }
}

/// One-shot convenience wrapper around [`HelmholtzSolver`].
pub fn helmholtz_solve(lam: f64, c: f64, rhs: &Field) -> Result<Field> {
    HelmholtzSolver::new(*rhs.lattice()).solve(lam, c, rhs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn lat2(m: usize, l: f64) -> Lattice {
        Lattice::new(2, m, l).unwrap()
    }

    fn pseudo_random(lat: Lattice, seed: u64) -> Field {
        let mut s = seed;
        let values = (0..lat.len())
            .map(|_| {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                (s >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0
            })
            .collect();
        Field::from_values(lat, values).unwrap()
    }

    #[test]
    fn laplacian_of_constant_vanishes() {
        let f = Field::constant(lat2(6, 2.0), 3.5);
        assert!(f.laplacian().norm_inf() < 1e-12);
        let f3 = Field::constant(Lattice::new(3, 4, 1.0).unwrap(), -1.0);
        assert!(f3.laplacian().norm_inf() < 1e-12);
    }

    #[test]
    fn laplacian_of_sine_mode() {
        let lat = lat2(8, 1.0);
        let two_pi = 2.0 * std::f64::consts::PI;
        let f = Field::from_fn(lat, |x| (two_pi * x[0]).sin());
        let lam = 4.0 / (lat.h() * lat.h()) * (std::f64::consts::PI / 8.0).sin().powi(2);
        let expect = f.map(|v| -lam * v);
        assert!(f.laplacian().max_abs_diff(&expect).unwrap() < 1e-10);
    }

    #[test]
    fn inner_product_basics() {
        let one = Field::constant(lat2(5, 1.0), 1.0);
        assert!((one.inner(&one).unwrap() - 1.0).abs() < 1e-14);
        let mut v = Field::zeros(lat2(2, 1.0));
        v.values_mut().copy_from_slice(&[-3.0, 2.0, -3.0, 2.0]);
        assert_eq!(v.norm_inf(), 3.0);
        assert_eq!(one.grad_norm2(), 0.0);
        assert!(one.inner(&Field::zeros(lat2(4, 1.0))).is_err());
    }

    #[test]
    fn helmholtz_trivial_cases() {
        let lat = lat2(8, 1.0);
        let rhs = pseudo_random(lat, 3);
        let u = helmholtz_solve(2.0, 0.0, &rhs).unwrap();
        assert!(u.max_abs_diff(&rhs.map(|v| v / 2.0)).unwrap() < 1e-15);
        let u = helmholtz_solve(2.0, 0.7, &Field::constant(lat, 0.6)).unwrap();
        assert!(u.max_abs_diff(&Field::constant(lat, 0.3)).unwrap() < 1e-14);
        assert!(matches!(helmholtz_solve(0.0, 1.0, &rhs), Err(Error::NonPositiveShift(_))));
    }

    #[test]
    fn helmholtz_single_mode_3d() {
        let lat = Lattice::new(3, 6, 2.0).unwrap();
        let k = std::f64::consts::PI;
        let rhs = Field::from_fn(lat, |x| (k * x[0]).cos() * (2.0 * k * x[2]).sin());
        let solver = HelmholtzSolver::new(lat);
        let u = solver.solve(1.5, 0.2, &rhs).unwrap();
        let lap = u.laplacian();
        let resid = u.zip_map(&lap, |a, b| 1.5 * a - 0.2 * b).unwrap();
        assert!(resid.max_abs_diff(&rhs).unwrap() < 1e-12);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn laplacian_is_symmetric(seed in any::<u64>(), m in 3usize..9) {
            let lat = lat2(m, 1.3);
            let v = pseudo_random(lat, seed);
            let w = pseudo_random(lat, seed ^ 0xdead_beef);
            let a = v.laplacian().inner(&w).unwrap();
            let b = v.inner(&w.laplacian()).unwrap();
            prop_assert!((a - b).abs() <= 1e-10 * a.abs().max(1.0));
        }

        #[test]
        fn summation_by_parts(seed in any::<u64>(), m in 3usize..7, dim in 2usize..4) {
            let lat = Lattice::new(dim, m, 0.9).unwrap();
            let v = pseudo_random(lat, seed);
            let lhs = -v.laplacian().inner(&v).unwrap();
            prop_assert!((lhs - v.grad_norm2()).abs() <= 1e-10 * lhs.abs().max(1.0));
        }

        #[test]
        fn helmholtz_residual_and_resolvent_bound(
            seed in any::<u64>(), m in 3usize..12, lam in 0.05f64..5.0, c in 0.0f64..2.0,
        ) {
            let lat = lat2(m, 1.0);
            let rhs = pseudo_random(lat, seed);
            let u = helmholtz_solve(lam, c, &rhs).unwrap();
            let resid = u.zip_map(&u.laplacian(), |a, b| lam * a - c * b).unwrap();
            prop_assert!(resid.max_abs_diff(&rhs).unwrap() <= 1e-10 * rhs.norm_inf().max(1.0));
            prop_assert!(u.norm_inf() <= rhs.norm_inf() / lam * (1.0 + 1e-12));
        }
    }
}
