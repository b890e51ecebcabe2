//! Nonuniform temporal meshes.
//!
//! A [`TimeGrid`] stores the instants `0 = t_0 < t_1 < … < t_N`. Steps
//! `τ_k = t_k − t_{k−1}` and ratios `r_k = τ_k / τ_{k−1}` are always derived
//! from the stored instants, so they can never drift out of sync.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Step-ratio floor that keeps the L2-1σ kernels positive and monotone.
pub const L21_RATIO_FLOOR: f64 = 4.0 / 7.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    times: Vec<f64>,
}

impl TimeGrid {
    /// Builds a grid from explicit instants. The first must be zero and the
    /// sequence strictly increasing.
    pub fn from_times(times: Vec<f64>) -> Result<Self> {
        if times.is_empty() || times[0] != 0.0 {
            return Err(Error::InvalidGrid("grid must start at t = 0".into()));
        }
        if let Some(w) = times.windows(2).find(|w| !(w[1] > w[0]) || !w[1].is_finite()) {
            return Err(Error::InvalidGrid(format!(
                "instants not strictly increasing: {} then {}",
                w[0], w[1]
            )));
        }
        Ok(Self { times })
    }

    /// `N` equal steps covering `[0, t_end]`.
    pub fn uniform(t_end: f64, n: usize) -> Result<Self> {
        if n == 0 || !(t_end > 0.0) {
            return Err(Error::InvalidGrid(format!("uniform grid needs N ≥ 1 and T > 0 (N = {n}, T = {t_end})")));
        }
        let dt = t_end / n as f64;
        let mut times: Vec<f64> = (0..n).map(|k| k as f64 * dt).collect();
        times.push(t_end);
        Self::from_times(times)
    }

    /// Graded mesh `t_k = T̂ (k / N̂)^γ`, `0 ≤ k ≤ N̂`.
    pub fn graded(t_hat: f64, n_hat: usize, gamma: f64) -> Result<Self> {
        if n_hat == 0 || !(gamma >= 1.0) || !(t_hat > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "invalid grading: T̂ = {t_hat}, N̂ = {n_hat}, γ = {gamma}"
            )));
        }
        let times = (0..=n_hat)
            .map(|k| t_hat * (k as f64 / n_hat as f64).powf(gamma))
            .collect();
        Self::from_times(times)
    }

    /// Appends `n_total − N` equal steps so that the grid ends at `t_end`.
    pub fn extend_uniform(&self, t_end: f64, n_total: usize) -> Result<Self> {
        let t_hat = self.final_time();
        let n_hat = self.num_steps();
        if !(t_end > t_hat) {
            return Err(Error::InvalidGrid(format!(
                "uniform tail must end beyond {t_hat}, got T = {t_end}"
            )));
        }
        if n_total <= n_hat {
            return Err(Error::InvalidGrid(format!(
                "total step count {n_total} must exceed current count {n_hat}"
            )));
        }
        let tail = n_total - n_hat;
        let dt = (t_end - t_hat) / tail as f64;
        let mut times = self.times.clone();
        times.extend((1..tail).map(|j| t_hat + j as f64 * dt));
        times.push(t_end);
        Self::from_times(times)
    }

    /// Appends steps `t̂ + jτ`, truncating the last one at `t_end`. A
    /// remainder below `1e-9 τ` is absorbed into the final step.
    pub fn extend_fixed_step(&self, tau: f64, t_end: f64) -> Result<Self> {
        self.check_tail(tau, t_end)?;
        let t0 = self.final_time();
        let k = ((t_end - t0) / tau - 1e-9).ceil().max(1.0) as usize;
        let mut grid = self.clone();
        grid.times.extend((1..k).map(|j| t0 + j as f64 * tau));
        grid.times.push(t_end);
        Ok(grid)
    }

    /// Appends steps of size `tau` by running sum `t ← t + τ`, truncating the
    /// last one at `t_end`. It inherits the rounding of the running sum, so
    /// a final sliver step may appear; the step counts it produces are the
    /// ones a naive marching loop reports.
    pub fn extend_fixed_step_accumulated(&self, tau: f64, t_end: f64) -> Result<Self> {
        self.check_tail(tau, t_end)?;
        let mut grid = self.clone();
        let mut t = grid.final_time();
        while t < t_end {
            t = (t + tau).min(t_end);
            grid.times.push(t);
        }
        Ok(grid)
    }

    fn check_tail(&self, tau: f64, t_end: f64) -> Result<()> {
        if !(tau > 0.0) {
            return Err(Error::InvalidGrid(format!("step must be positive, got {tau}")));
        }
        if !(t_end > self.final_time()) {
            return Err(Error::InvalidGrid(format!(
                "fixed-step tail must end beyond {}, got {t_end}",
                self.final_time()
            )));
        }
        Ok(())
    }

    /// Appends one step, used by adaptive runs as the grid grows.
    pub fn push_step(&mut self, tau: f64) -> Result<()> {
        let t = self.final_time() + tau;
        if !(tau > 0.0) || !(t > self.final_time()) {
            return Err(Error::InvalidGrid(format!("cannot append step {tau}")));
        }
        self.times.push(t);
        Ok(())
    }

    /// Replaces the final instant (used to land exactly on a target time).
    pub(crate) fn set_final_time(&mut self, t: f64) -> Result<()> {
        let n = self.times.len();
        if n < 2 || !(t > self.times[n - 2]) {
            return Err(Error::InvalidGrid(format!("cannot move final instant to {t}")));
        }
        self.times[n - 1] = t;
        Ok(())
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    /// `t_k`.
    pub fn t(&self, k: usize) -> f64 {
        self.times[k]
    }

    /// Number of steps `N`.
    pub fn num_steps(&self) -> usize {
        self.times.len() - 1
    }

    /// Number of time levels `N + 1`.
    pub fn num_levels(&self) -> usize {
        self.times.len()
    }

    pub fn final_time(&self) -> f64 {
        *self.times.last().expect("grid always holds t_0")
    }

    /// `τ_k = t_k − t_{k−1}` for `1 ≤ k ≤ N`.
    pub fn step(&self, k: usize) -> f64 {
        assert!(k >= 1 && k < self.times.len(), "step index {k} out of range");
        self.times[k] - self.times[k - 1]
    }

    /// `r_k = τ_k / τ_{k−1}` for `2 ≤ k ≤ N`.
    pub fn ratio(&self, k: usize) -> f64 {
        assert!(k >= 2, "ratios start at k = 2");
        self.step(k) / self.step(k - 1)
    }

    pub fn steps(&self) -> Vec<f64> {
        self.times.windows(2).map(|w| w[1] - w[0]).collect()
    }

    /// Ratios `r_2, …, r_N`.
    pub fn ratios(&self) -> Vec<f64> {
        (2..=self.num_steps()).map(|k| self.ratio(k)).collect()
    }

    pub fn min_ratio(&self) -> Option<f64> {
        self.ratios().into_iter().reduce(f64::min)
    }

    /// True iff every ratio `r_k`, `k ≥ 2`, is at least `r_star`. Grids with a
    /// single step have no ratios and pass trivially.
    pub fn ratio_check(&self, r_star: f64) -> bool {
        (2..=self.num_steps()).all(|k| self.ratio(k) >= r_star)
    }

    /// Truncated copy holding `t_0 … t_n`.
    pub fn prefix(&self, n: usize) -> TimeGrid {
        TimeGrid { times: self.times[..=n].to_vec() }
    }
}

/// Energy-based step selection with an optional ratio floor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdaptiveController {
    pub tau_min: f64,
    pub tau_max: f64,
    pub eta: f64,
    /// Floor on `τ_k / τ_{k−1}`; zero disables it.
    pub r_min: f64,
}

impl AdaptiveController {
    pub fn new(tau_min: f64, tau_max: f64, eta: f64, r_min: f64) -> Result<Self> {
        if !(tau_min > 0.0 && tau_min <= tau_max) {
            return Err(Error::InvalidParameter(format!(
                "need 0 < τ_min ≤ τ_max, got ({tau_min}, {tau_max})"
            )));
        }
        if !(eta >= 0.0) {
            return Err(Error::InvalidParameter(format!("η must be nonnegative, got {eta}")));
        }
        if !(r_min == 0.0 || (L21_RATIO_FLOOR..=1.0).contains(&r_min)) {
            return Err(Error::InvalidParameter(format!(
                "ratio floor must be 0 or in [4/7, 1], got {r_min}"
            )));
        }
        Ok(Self { tau_min, tau_max, eta, r_min })
    }

    /// `max{ max{τ_min, τ_max / √(1 + η dE²)}, r_min τ_prev }`, where `dE` is the
    /// backward difference quotient of the energy.
    pub fn propose(&self, d_energy: f64, tau_prev: f64) -> f64 {
        let base = self
            .tau_min
            .max(self.tau_max / (1.0 + self.eta * d_energy * d_energy).sqrt());
        if self.r_min > 0.0 {
            base.max(self.r_min * tau_prev)
        } else {
            base
        }
    }
}

/// Splits `N` total steps over `[0, T]` into a graded prefix on `[0, T̂]` and
/// a uniform tail, with `T̂ = min{1/γ, T}` and
/// `N̂ = ⌈N / (T + 1 − 1/γ)⌉` (capped at `N`), which makes the last graded
/// step match the uniform tail step.
pub fn mixed_split(t_end: f64, n_total: usize, gamma: f64) -> (f64, usize) {
    let t_hat = (1.0 / gamma).min(t_end);
    if t_hat >= t_end {
        return (t_end, n_total);
    }
    let n_hat = (n_total as f64 / (t_end + 1.0 - 1.0 / gamma)).ceil() as usize;
    (t_hat, n_hat.clamp(1, n_total))
}

/// Graded prefix plus uniform tail as used by the convergence studies.
pub fn mixed_graded_uniform(t_end: f64, n_total: usize, gamma: f64) -> Result<TimeGrid> {
    let (t_hat, n_hat) = mixed_split(t_end, n_total, gamma);
    let graded = TimeGrid::graded(t_hat, n_hat, gamma)?;
    if n_hat == n_total {
        Ok(graded)
    } else {
        graded.extend_uniform(t_end, n_total)
    }
}
