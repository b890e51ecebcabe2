//! Discrete Caputo convolution weights on nonuniform meshes.
//!
//! Both families approximate `D_t^α v(t)` by a sum `Σ_k W_{n−k} ∇_τ v^k` of
//! history increments. The L1 weights come from piecewise linear
//! interpolation and are evaluated at `t_n`; the L2-1σ weights add a
//! quadratic correction and are evaluated at the offset point
//! `t_{n−ς} = t_n − ς τ_n` with `ς = α/2`.

use crate::spatial::Field;
use crate::timegrid::{TimeGrid, L21_RATIO_FLOOR};
use crate::{check_order, gamma, Error, Result};

/// `y^p − (y − h)^p` for `0 < h ≤ y`, `p ∈ (0, 2)`, without cancellation.
pub(crate) fn pow_diff(y: f64, h: f64, p: f64) -> f64 {
    if h >= y {
        return y.powf(p);
    }
    -y.powf(p) * (p * (-h / y).ln_1p()).exp_m1()
}

/// `∫_x^y (d − u) u^{−α} du` with `d = (x + y)/2`. The integrand is odd about
/// `d` up to the slowly varying weight, so the closed form cancels badly when
/// the interval is short compared with its distance from the origin; a
/// power series in `ρ = (y − x)/(2d)` is used there instead.
pub(crate) fn centred_moment(x: f64, y: f64, alpha: f64) -> f64 {
    let h = y - x;
    let d = 0.5 * (x + y);
    let rho = h / (2.0 * d);
    if rho <= 0.25 {
        // 2 d^{2−α} Σ_{j odd} (α)_j / j! · ρ^{j+2} / (j + 2)
        let mut coeff = alpha; // (α)_1 / 1!
        let mut pow = rho * rho * rho;
        let mut sum = coeff * pow / 3.0;
        let mut j = 1usize;
        loop {
            coeff *= (alpha + j as f64) * (alpha + j as f64 + 1.0)
                / ((j + 1) as f64 * (j + 2) as f64);
            pow *= rho * rho;
            j += 2;
            let term = coeff * pow / (j + 2) as f64;
            sum += term;
            if term <= 1e-17 * sum || j > 200 {
                break;
            }
        }
        2.0 * d.powf(2.0 - alpha) * sum
    } else {
        d * pow_diff(y, h, 1.0 - alpha) / (1.0 - alpha) - pow_diff(y, h, 2.0 - alpha) / (2.0 - alpha)
    }
}

/// Weights that multiply the history increments of one time level.
pub trait ConvolutionWeights {
    /// Step index `n ≥ 1`.
    fn level(&self) -> usize;
    /// `W_0 … W_{n−1}`, where `W_j` multiplies `∇_τ φ^{n−j}`.
    fn weights(&self) -> &[f64];
}

/// L1 weights `A^{(n)}_{n−k}`, `1 ≤ k ≤ n`.
#[derive(Debug, Clone, PartialEq)]
pub struct L1KernelSet {
    pub n: usize,
    pub alpha: f64,
    /// `weights[j] = A^{(n)}_j`.
    pub weights: Vec<f64>,
}

impl L1KernelSet {
    pub fn new(grid: &TimeGrid, n: usize, alpha: f64) -> Result<Self> {
        check_order(alpha)?;
        check_level(grid, n)?;
        let g = gamma(2.0 - alpha);
        let tn = grid.t(n);
        let p = 1.0 - alpha;
        let mut weights = vec![0.0; n];
        for k in 1..=n {
            let tau = grid.step(k);
            let y = tn - grid.t(k - 1);
            weights[n - k] = pow_diff(y, tau, p) / (g * tau);
        }
        Ok(Self { n, alpha, weights })
    }

    /// Positivity and strict monotonicity of the weights.
    pub fn is_positive_monotone(&self) -> bool {
        self.weights.iter().all(|&w| w > 0.0) && self.weights.windows(2).all(|w| w[1] < w[0])
    }
}

impl ConvolutionWeights for L1KernelSet {
    fn level(&self) -> usize {
        self.n
    }
    fn weights(&self) -> &[f64] {
        &self.weights
    }
}

/// L2-1σ coefficients for level `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct L21KernelSet {
    pub n: usize,
    pub alpha: f64,
    pub varsigma: f64,
    /// `a[j] = a^{(n)}_j`, `0 ≤ j ≤ n−1`.
    pub a: Vec<f64>,
    /// `b[j] = b^{(n)}_j`, `1 ≤ j ≤ n−1`; `b[0]` is unused and zero.
    pub b: Vec<f64>,
    /// Convolution weights `B^{(n)}_j`.
    pub big_b: Vec<f64>,
    /// Quadratic-form weights `C^{(n)}_j`.
    pub big_c: Vec<f64>,
    /// Whether every ratio `r_2 … r_n` meets the `4/7` floor.
    pub ratio_ok: bool,
    tau_n: f64,
}

impl L21KernelSet {
    pub fn new(grid: &TimeGrid, n: usize, alpha: f64) -> Result<Self> {
        check_order(alpha)?;
        check_level(grid, n)?;
        let vs = 0.5 * alpha;
        let p = 1.0 - alpha;
        let g2 = gamma(2.0 - alpha);
        let g1 = gamma(1.0 - alpha);
        let tau_n = grid.step(n);
        let t_off = grid.t(n) - vs * tau_n;

        let mut a = vec![0.0; n];
        a[0] = ((1.0 - vs) * tau_n).powf(p) / (g2 * tau_n);
        for k in 1..n {
            let tau = grid.step(k);
            let y = t_off - grid.t(k - 1);
            a[n - k] = pow_diff(y, tau, p) / (g2 * tau);
        }

        let mut b = vec![0.0; n];
        for k in 1..n {
            let tau = grid.step(k);
            let tau_next = grid.step(k + 1);
            let x = t_off - grid.t(k);
            let y = x + tau;
            b[n - k] = 2.0 * centred_moment(x, y, alpha) / (tau * (tau + tau_next) * g1);
        }

        let mut big_b = vec![0.0; n];
        if n == 1 {
            big_b[0] = a[0];
        } else {
            big_b[0] = a[0] + b[1] / grid.ratio(n);
            for k in 2..n {
                big_b[n - k] = a[n - k] + b[n - k + 1] / grid.ratio(k) - b[n - k];
            }
            big_b[n - 1] = a[n - 1] - b[n - 1];
        }

        let mut big_c = big_b.clone();
        big_c[0] = 4.0 * (1.0 - alpha) * a[0] / (2.0 - alpha)
            + if n >= 2 { 2.0 * b[1] / grid.ratio(n) } else { 0.0 };

        let ratio_ok = (2..=n).all(|k| grid.ratio(k) >= L21_RATIO_FLOOR);
        Ok(Self { n, alpha, varsigma: vs, a, b, big_b, big_c, ratio_ok, tau_n })
    }

    /// `(1−ς)^{1−α} / (Γ(2−α) τ_n^α)`.
    pub fn a0_closed_form(&self) -> f64 {
        (1.0 - self.varsigma).powf(1.0 - self.alpha) / (gamma(2.0 - self.alpha) * self.tau_n.powf(self.alpha))
    }

    /// `B_0` lies in `[4, 24] / (11 Γ(2−α) τ_n^α)`.
    pub fn b0_within_bounds(&self) -> bool {
        let unit = 1.0 / (11.0 * gamma(2.0 - self.alpha) * self.tau_n.powf(self.alpha));
        self.big_b[0] >= 4.0 * unit && self.big_b[0] <= 24.0 * unit
    }

    /// `B_0 ≥ B_1 ≥ … ≥ B_{n−1}`.
    pub fn is_monotone(&self) -> bool {
        self.big_b.windows(2).all(|w| w[1] <= w[0])
    }

    /// `(1−2ς)/(1−ς) B_0 − B_1 > 0` (vacuous for `n = 1`).
    pub fn leading_gap(&self) -> Option<f64> {
        (self.n >= 2).then(|| (1.0 - 2.0 * self.varsigma) / (1.0 - self.varsigma) * self.big_b[0] - self.big_b[1])
    }
}

impl ConvolutionWeights for L21KernelSet {
    fn level(&self) -> usize {
        self.n
    }
    fn weights(&self) -> &[f64] {
        &self.big_b
    }
}

fn check_level(grid: &TimeGrid, n: usize) -> Result<()> {
    if n == 0 || n > grid.num_steps() {
        return Err(Error::InvalidGrid(format!(
            "level {n} outside 1..={}",
            grid.num_steps()
        )));
    }
    Ok(())
}

/// Coefficient of `φ^k`, `0 ≤ k ≤ n−1`, in
/// `Σ_{k=1}^{n−1} W_{n−k}(φ^k − φ^{k−1}) − W_0 φ^{n−1}`.
pub fn history_coefficients(weights: &[f64]) -> Vec<f64> {
    let n = weights.len();
    (0..n)
        .map(|k| {
            let forward = if k >= 1 { weights[n - k] } else { 0.0 };
            forward - weights[n - 1 - k]
        })
        .collect()
}

/// Known part of the convolution at level `n`, arranged so that the full
/// discrete derivative reads `W_0 φ^n + history_sum`. `history` must hold
/// `φ^0 … φ^{n−1}`. Levels are accumulated oldest first.
pub fn history_sum<K: ConvolutionWeights + ?Sized>(kernels: &K, history: &[Field]) -> Result<Field> {
    let n = kernels.level();
    if history.len() != n {
        return Err(Error::HistoryLength { n, got: history.len(), expected: n });
    }
    let coeffs = history_coefficients(kernels.weights());
    let mut out = Field::zeros(*history[0].lattice());
    for (c, phi) in coeffs.iter().zip(history) {
        out.axpy(*c, phi)?;
    }
    Ok(out)
}

/// `Ξ^{n−2} = Σ_{k=1}^{n−2} (W_{n−k−1} − W_{n−k}) φ^k + W_{n−1} φ^0`, the
/// part of the memory that appears with nonnegative coefficients when the
/// weights are monotone.
pub fn xi<K: ConvolutionWeights + ?Sized>(kernels: &K, history: &[Field]) -> Result<Field> {
    let n = kernels.level();
    let w = kernels.weights();
    if history.len() < n.saturating_sub(1).max(1) {
        return Err(Error::HistoryLength { n, got: history.len(), expected: n - 1 });
    }
    let mut out = Field::zeros(*history[0].lattice());
    out.axpy(w[n - 1], &history[0])?;
    for k in 1..n.saturating_sub(1) {
        out.axpy(w[n - k - 1] - w[n - k], &history[k])?;
    }
    Ok(out)
}

/// Scalar discrete derivative `Σ_{k=1}^{n} W_{n−k}(v_k − v_{k−1})`.
pub fn scalar_derivative(weights: &[f64], values: &[f64]) -> f64 {
    let n = weights.len();
    assert_eq!(values.len(), n + 1, "need v_0 … v_n");
    (1..=n).map(|k| weights[n - k] * (values[k] - values[k - 1])).sum()
}

/// Minimum over sequences of `Σ_k w_k Σ_{j≤k} A^{(k)}_{k−j} w_j` for the L1
/// weights on `grid`. Each sequence must be no longer than the grid.
pub fn check_psd(grid: &TimeGrid, alpha: f64, sequences: &[Vec<f64>]) -> Result<f64> {
    let longest = sequences.iter().map(Vec::len).max().unwrap_or(0);
    let kernels = (1..=longest)
        .map(|k| L1KernelSet::new(grid, k, alpha))
        .collect::<Result<Vec<_>>>()?;
    let mut min = f64::INFINITY;
    for w in sequences {
        let mut form = 0.0;
        for k in 1..=w.len() {
            let a = &kernels[k - 1].weights;
            let inner: f64 = (1..=k).map(|j| a[k - j] * w[j - 1]).sum();
            form += w[k - 1] * inner;
        }
        min = min.min(form);
    }
    Ok(if sequences.is_empty() { 0.0 } else { min })
}
