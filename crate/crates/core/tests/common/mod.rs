//! Independent oracles shared by the integration tests: adaptive
//! Gauss–Kronrod quadrature of the Caputo kernel and a dense assembled solve
//! of one scheme step.

#![allow(dead_code)]

use fracphase::{Field, Lattice, Potential, TimeGrid, Variant};
use nalgebra::{DMatrix, DVector};
use statrs::function::gamma::gamma;

const GK_NODES: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const K_WEIGHTS: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_728_0,
];
const G_WEIGHTS: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// `(∫f, error estimate, ∫|f|)` on one Gauss–Kronrod 7/15 panel.
fn gk15(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = K_WEIGHTS[7] * fc;
    let mut gauss = G_WEIGHTS[3] * fc;
    let mut abs = K_WEIGHTS[7] * fc.abs();
    for i in 0..7 {
        let x = h * GK_NODES[i];
        let (lo, hi) = (f(c - x), f(c + x));
        kronrod += K_WEIGHTS[i] * (lo + hi);
        abs += K_WEIGHTS[i] * (lo.abs() + hi.abs());
        if i % 2 == 1 {
            gauss += G_WEIGHTS[i / 2] * (lo + hi);
        }
    }
    (kronrod * h, ((kronrod - gauss) * h).abs(), abs * h.abs())
}

/// Adaptive bisection on Gauss–Kronrod 7/15 panels. A panel is accepted once
/// its error estimate meets its share of `tol` or sinks to rounding level.
pub fn integrate(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn rec(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
        let (v, e, abs) = gk15(f, a, b);
        if e <= tol || e <= 1e-14 * abs || depth >= 20 {
            return v;
        }
        let m = 0.5 * (a + b);
        rec(f, a, m, 0.5 * tol, depth + 1) + rec(f, m, b, 0.5 * tol, depth + 1)
    }
    if a == b {
        return 0.0;
    }
    rec(f, a, b, tol, 0)
}

/// `∫_a^b ω_{1−α}(t − s) g(s) ds` for `b ≤ t`, computed after the change of
/// variables `s = t − w^p`, `p = 2/(1 − α)`, which turns the weakly singular
/// integrand into `p w g(t − w^p) / Γ(1 − α)`.
pub fn caputo_moment(t: f64, a: f64, b: f64, alpha: f64, g: &dyn Fn(f64) -> f64) -> f64 {
    let p = 2.0 / (1.0 - alpha);
    let w_lo = (t - b).max(0.0).powf(1.0 / p);
    let w_hi = (t - a).powf(1.0 / p);
    let scale = p / gamma(1.0 - alpha);
    let f = |w: f64| scale * w * g(t - w.powf(p));
    integrate(&f, w_lo, w_hi, 1e-15 * (1.0 + (t - a).abs()))
}

/// L1 weights `A_{n−k}` by quadrature, indexed like the library's.
pub fn l1_weights(grid: &TimeGrid, n: usize, alpha: f64) -> Vec<f64> {
    let tn = grid.t(n);
    let mut w = vec![0.0; n];
    for k in 1..=n {
        let tau = grid.step(k);
        w[n - k] = caputo_moment(tn, grid.t(k - 1), grid.t(k), alpha, &|_| 1.0) / tau;
    }
    w
}

/// L2-1σ `a` and `b` coefficients by quadrature.
pub fn l21_ab(grid: &TimeGrid, n: usize, alpha: f64) -> (Vec<f64>, Vec<f64>) {
    let vs = 0.5 * alpha;
    let t_off = grid.t(n) - vs * grid.step(n);
    let mut a = vec![0.0; n];
    let mut b = vec![0.0; n];
    a[0] = caputo_moment(t_off, grid.t(n - 1), t_off, alpha, &|_| 1.0) / grid.step(n);
    for k in 1..n {
        let (lo, hi) = (grid.t(k - 1), grid.t(k));
        let tau = grid.step(k);
        let mid = 0.5 * (lo + hi);
        a[n - k] = caputo_moment(t_off, lo, hi, alpha, &|_| 1.0) / tau;
        let moment = caputo_moment(t_off, lo, hi, alpha, &|s| s - mid);
        b[n - k] = 2.0 * moment / (tau * (tau + grid.step(k + 1)));
    }
    (a, b)
}

/// L2-1σ derivative at `t_{n−ς}` of the interpolant through `v_0 … v_n`:
/// quadratic through `t_{k−1}, t_k, t_{k+1}` on `[t_{k−1}, t_k]` for `k < n`
/// and linear on the last interval.
pub fn l21_derivative(grid: &TimeGrid, n: usize, alpha: f64, v: &[f64]) -> f64 {
    let vs = 0.5 * alpha;
    let t_off = grid.t(n) - vs * grid.step(n);
    let mut total = 0.0;
    for k in 1..n {
        let (t0, t1, t2) = (grid.t(k - 1), grid.t(k), grid.t(k + 1));
        let (v0, v1, v2) = (v[k - 1], v[k], v[k + 1]);
        // derivative of the Lagrange quadratic
        let d = move |s: f64| {
            v0 * ((s - t1) + (s - t2)) / ((t0 - t1) * (t0 - t2))
                + v1 * ((s - t0) + (s - t2)) / ((t1 - t0) * (t1 - t2))
                + v2 * ((s - t0) + (s - t1)) / ((t2 - t0) * (t2 - t1))
        };
        total += caputo_moment(t_off, t0, t1, alpha, &d);
    }
    let slope = (v[n] - v[n - 1]) / grid.step(n);
    total + slope * caputo_moment(t_off, grid.t(n - 1), t_off, alpha, &|_| 1.0)
}

/// L2-1σ convolution weights read off the interpolant derivative: a unit
/// step at level `k` isolates `B_{n−k}`.
pub fn l21_weights(grid: &TimeGrid, n: usize, alpha: f64) -> Vec<f64> {
    let mut w = vec![0.0; n];
    for k in 1..=n {
        let v: Vec<f64> = (0..=n).map(|j| if j >= k { 1.0 } else { 0.0 }).collect();
        w[n - k] = l21_derivative(grid, n, alpha, &v);
    }
    w
}

/// The cutoff `V`, written out piece by piece.
pub fn cutoff(z: f64) -> f64 {
    match z {
        z if z <= 0.0 => 0.0,
        z if z < 0.5 => -8.0 * z.powi(3) + 7.0 * z.powi(2),
        z if z <= 1.5 => 1.0 - (z - 1.0).powi(2),
        z if z < 2.0 => 8.0 * z.powi(3) - 41.0 * z.powi(2) + 68.0 * z - 36.0,
        _ => 0.0,
    }
}

/// Dense periodic five-point (or seven-point) Laplacian.
pub fn laplacian_matrix(lat: &Lattice) -> DMatrix<f64> {
    let n = lat.len();
    let h2 = lat.h() * lat.h();
    let mut l = DMatrix::zeros(n, n);
    for i in 0..n {
        let idx = lat.unravel(i);
        l[(i, i)] = -2.0 * lat.dim as f64 / h2;
        for axis in 0..lat.dim {
            for shift in [1, lat.m - 1] {
                let mut j = idx;
                j[axis] = (j[axis] + shift) % lat.m;
                let flat = j[..lat.dim].iter().fold(0, |acc, &x| acc * lat.m + x);
                l[(i, flat)] += 1.0 / h2;
            }
        }
    }
    l
}

pub struct DenseStep {
    pub phi: Vec<f64>,
    pub r: f64,
}

fn dv(f: &Field) -> DVector<f64> {
    DVector::from_column_slice(f.values())
}

/// One step of `variant` from `history = φ⁰ … φ^{n−1}` and `r = R^{n−1}`,
/// assembled as a dense linear system with quadrature weights.
#[allow(clippy::too_many_arguments)]
pub fn dense_step(
    variant: Variant,
    alpha: f64,
    kappa: f64,
    m: f64,
    eps: f64,
    p: &Potential,
    grid: &TimeGrid,
    history: &[Field],
    r: f64,
) -> DenseStep {
    let n = history.len();
    let lat = *history[0].lattice();
    let size = lat.len();
    let vol = lat.cell_volume();
    let lap = laplacian_matrix(&lat);
    let eye = DMatrix::<f64>::identity(size, size);
    let vs = if variant == Variant::L1 { 0.0 } else { 0.5 * alpha };

    // convolution weights W_0 … W_{n−1}
    let w: Vec<f64> = if variant == Variant::L1 {
        l1_weights(grid, n, alpha)
    } else {
        l21_weights(grid, n, alpha)
    };

    let hist: Vec<DVector<f64>> = history.iter().map(dv).collect();
    let prev = &hist[n - 1];
    let force = |x: &DVector<f64>| x.map(|v| p.force(v).unwrap());
    let f_energy = |x: &DVector<f64>| x.iter().map(|&v| p.energy(v).unwrap()).sum::<f64>() * vol;

    // predictor at the evaluation level
    let hat_level: DVector<f64> = if n == 1 {
        let lam = w[0] + kappa * (1.0 - vs) * m;
        let mat = &eye * lam - &lap * ((1.0 - vs) * m * eps * eps);
        let lu = mat.lu();
        let base = prev * (w[0] - kappa * vs * m) + &lap * prev * (vs * m * eps * eps);
        let mut cur = prev.clone();
        for _ in 0..100_000 {
            let lvl = &cur * (1.0 - vs) + prev * vs;
            let rhs = &base + (&lvl * kappa + force(&lvl)) * m;
            let next = lu.solve(&rhs).unwrap();
            let res = (&next - &cur).amax();
            cur = next;
            if res <= 1e-14 {
                break;
            }
        }
        &cur * (1.0 - vs) + prev * vs
    } else {
        let ratio = grid.ratio(n);
        let beta = p.beta;
        let pred = prev.zip_map(&hist[n - 2], |a, b| (a + ratio * (a - b)).clamp(-beta, beta));
        &pred * (1.0 - vs) + prev * vs
    };

    let f_hat = force(&hat_level);
    let v = cutoff((r - f_energy(&hat_level)).clamp(-700.0, 700.0).exp());
    let s = if variant == Variant::L21Unbalanced { 1.0 } else { v };

    // W_0 φ^n − W_0 φ^{n−1} + Σ_{k<n} W_{n−k} ∇φ^k
    //   = m ε² Δφ^{n−ς} + m V f̂ − κ m (S φ^{n−ς} − V φ̂^{n−ς})
    let mut memory = DVector::zeros(size);
    for k in 1..n {
        memory += (&hist[k] - &hist[k - 1]) * w[n - k];
    }
    let mat = &eye * (w[0] + kappa * m * s * (1.0 - vs)) - &lap * (m * eps * eps * (1.0 - vs));
    let rhs = prev * w[0] - memory + &lap * prev * (m * eps * eps * vs) - prev * (kappa * m * s * vs)
        + &f_hat * (m * v)
        + &hat_level * (kappa * m * v);
    let phi = mat.lu().solve(&rhs).unwrap();

    let level = &phi * (1.0 - vs) + prev * vs;
    let stab = if variant == Variant::L21Unbalanced {
        (&level - &hat_level * v) * kappa
    } else {
        (&level - &hat_level) * (kappa * v)
    };
    let dr = (-&f_hat * v + stab).dot(&(&phi - prev)) * vol;
    DenseStep { phi: phi.as_slice().to_vec(), r: r + dr }
}

/// A random single-step problem on a 4×4 lattice: history `φ⁰ … φ^{n−1}`
/// inside `[−β, β]` and an auxiliary value near `E_{1h}[φ^{n−1}]`.
pub struct StepCase {
    pub alpha: f64,
    pub eps: f64,
    pub potential: Potential,
    pub grid: TimeGrid,
    pub history: Vec<Field>,
    pub r: f64,
}

pub fn random_case(seed: u64) -> StepCase {
    use fracphase::harness::{experiments::random_grid, rng};
    let u = |i: u64| rng::unit(seed ^ 0x5eed, i);
    let lattice = Lattice::new(2, 4, 1.0).unwrap();
    let potential = if seed % 2 == 0 { Potential::double_well() } else { Potential::flory_huggins_default() };
    let grid = random_grid(seed, 6).unwrap();
    let n = 1 + (u(0) * grid.num_steps() as f64) as usize % grid.num_steps();
    let b = 0.95 * potential.beta;
    let history: Vec<Field> = (0..n as u64)
        .map(|k| Field::from_values(lattice, rng::uniform(seed * 64 + k, lattice.len(), -b, b)).unwrap())
        .collect();
    let e1h = history[n - 1].values().iter().map(|&x| potential.energy(x).unwrap()).sum::<f64>()
        * lattice.cell_volume();
    StepCase {
        alpha: 0.1 + 0.8 * u(1),
        eps: 0.05 + 0.2 * u(2),
        potential,
        grid,
        history,
        r: e1h + 0.4 * (u(3) - 0.5),
    }
}

/// Largest deviation in `φⁿ` and `Rⁿ` between one library step and the
/// dense oracle on the case drawn from `seed`.
pub fn step_deviation(variant: Variant, seed: u64) -> f64 {
    use fracphase::{SchemeConfig, Stepper};
    let c = random_case(seed);
    let lattice = *c.history[0].lattice();
    let kappa = c.potential.kappa_default;
    let mut cfg = SchemeConfig::new(variant, c.alpha, kappa, 1.0, c.eps);
    cfg.iter_tol = 1e-14;
    cfg.iter_max = 200_000;
    let stepper = Stepper::new(cfg, c.potential, lattice).unwrap();
    let n = c.history.len();
    let dense = dense_step(variant, c.alpha, kappa, 1.0, c.eps, &c.potential, &c.grid, &c.history, c.r);
    let mut st = stepper.resume(c.grid, c.history, c.r).unwrap();
    stepper.step(&mut st).unwrap();
    let phi_dev = st.history[n]
        .values()
        .iter()
        .zip(&dense.phi)
        .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    phi_dev.max((st.sav.r - dense.r).abs())
}
