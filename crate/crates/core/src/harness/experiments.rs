//! The experiment drivers. Each one is a pure function of its config and
//! returns a serializable report; when an output directory is given it also
//! writes diagnostics and snapshots there.

use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use log::info;
use serde::Serialize;

use crate::harness::config::{ExperimentConfig, ExperimentKind};
use crate::harness::initial;
use crate::harness::manufactured::Manufactured;
use crate::harness::output;
use crate::harness::rng;
use crate::kernels::{check_psd, L1KernelSet, L21KernelSet};
use crate::monitors::{g_functional_scalar, tau_bounds, TauBounds};
use crate::potentials::Potential;
use crate::schemes::{MeshPlan, SimState, Stepper, Variant};
use crate::spatial::Field;
use crate::timegrid::{self, AdaptiveController, TimeGrid, L21_RATIO_FLOOR};
use crate::{Error, Result};

/// Runs `f` over `items` on up to `threads` scoped workers; results keep the
/// input order.
pub fn parallel_map<T: Sync, R: Send>(
    items: &[T],
    threads: usize,
    f: impl Fn(&T) -> R + Sync,
) -> Vec<R> {
    let threads = threads.clamp(1, items.len().max(1));
    if threads == 1 {
        return items.iter().map(f).collect();
    }
    let next = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<R>>> = Mutex::new((0..items.len()).map(|_| None).collect());
    std::thread::scope(|s| {
        for _ in 0..threads {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= items.len() {
                    break;
                }
                let r = f(&items[i]);
                slots.lock().expect("no worker panics while holding the lock")[i] = Some(r);
            });
        }
    });
    slots
        .into_inner()
        .expect("workers have finished")
        .into_iter()
        .map(|r| r.expect("every slot is filled"))
        .collect()
}

/// Summary shared by all dynamic runs.
#[derive(Debug, Clone, Serialize)]
pub struct RunSummary {
    pub label: String,
    pub steps: usize,
    pub levels: usize,
    pub t_end: f64,
    pub max_norm: f64,
    pub all_mbp_ok: bool,
    pub all_energy_ok: bool,
    /// Largest `E_mod[φⁿ] − E_mod[φ⁰]` over the run.
    pub max_energy_excess: f64,
    pub e_orig_final: f64,
    pub e_mod_final: f64,
    pub min_tau: f64,
    pub max_tau: f64,
    pub first_step_iterations: usize,
}

impl RunSummary {
    pub fn of(label: impl Into<String>, st: &SimState) -> Self {
        let rows = &st.diagnostics;
        let taus = &rows[1..];
        let last = st.last_row();
        Self {
            label: label.into(),
            steps: st.n,
            levels: st.n + 1,
            t_end: st.t(),
            max_norm: rows.iter().map(|r| r.max_norm).fold(0.0, f64::max),
            all_mbp_ok: st.all_mbp_ok(),
            all_energy_ok: st.all_energy_ok(),
            max_energy_excess: rows.iter().map(|r| r.e_mod - st.e_mod0).fold(f64::NEG_INFINITY, f64::max),
            e_orig_final: last.e_orig,
            e_mod_final: last.e_mod,
            min_tau: taus.iter().map(|r| r.tau).fold(f64::INFINITY, f64::min),
            max_tau: taus.iter().map(|r| r.tau).fold(0.0, f64::max),
            first_step_iterations: rows.get(1).map_or(0, |r| r.iters),
        }
    }
}

/// Runs a simulation, writing a snapshot the first time each instant in
/// `snapshots` is reached and the diagnostics CSV at the end.
pub fn run_logged(
    stepper: &Stepper,
    phi0: Field,
    plan: &MeshPlan,
    snapshots: &[f64],
    out: Option<&Path>,
) -> Result<SimState> {
    let mut pending: Vec<f64> = snapshots.to_vec();
    pending.sort_by(f64::total_cmp);
    let st = stepper.run(phi0, plan, |st| {
        if let Some(dir) = out {
            if st.n == 0 {
                output::write_snapshot(dir, 0, 0.0, st.phi())?;
            }
            let t = st.t();
            while pending.first().is_some_and(|&s| s <= t + 1e-9 * s.max(1.0)) {
                pending.remove(0);
                output::write_snapshot(dir, st.n, t, st.phi())?;
            }
        }
        Ok(())
    })?;
    if let Some(dir) = out {
        output::write_diagnostics(&dir.join("diagnostics.csv"), &st.diagnostics)?;
    }
    Ok(st)
}

fn subdir(out: Option<&Path>, name: &str) -> Option<PathBuf> {
    out.map(|d| d.join(name))
}

fn stepper_for(cfg: &ExperimentConfig) -> Result<Stepper> {
    Stepper::new(cfg.scheme_config()?, cfg.model.potential()?, cfg.lattice.lattice()?)
}

// ---------------------------------------------------------------- converge

#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceRow {
    pub n: usize,
    /// `max_n ‖φ(t_n) − φⁿ‖_∞`.
    pub error: f64,
    /// `max_n ‖φ(t_n) − φⁿ‖` in the discrete L² norm.
    pub error_l2: f64,
    /// `log₂(e(N/2)/e(N))` against the previous row.
    pub order: Option<f64>,
    pub order_l2: Option<f64>,
    pub all_mbp_ok: bool,
    pub all_energy_ok: bool,
    pub max_energy_excess: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceReport {
    pub variant: Variant,
    pub potential: String,
    pub alpha: f64,
    pub iota: f64,
    pub gamma: f64,
    pub target_rate: f64,
    pub t_hat: f64,
    pub points: usize,
    pub rows: Vec<ConvergenceRow>,
}

impl ConvergenceReport {
    pub fn finest_order(&self) -> Option<f64> {
        self.rows.last().and_then(|r| r.order)
    }

    pub fn finest_order_l2(&self) -> Option<f64> {
        self.rows.last().and_then(|r| r.order_l2)
    }

    pub fn row(&self, n: usize) -> Option<&ConvergenceRow> {
        self.rows.iter().find(|r| r.n == n)
    }
}

/// Grading that balances the singularity: `(2 − α)/ι` for L1, `2/ι` otherwise.
pub fn default_grading(variant: Variant, alpha: f64, iota: f64) -> f64 {
    match variant {
        Variant::L1 => (2.0 - alpha) / iota,
        _ => 2.0 / iota,
    }
}

pub fn convergence(cfg: &ExperimentConfig, out: Option<&Path>) -> Result<ConvergenceReport> {
    let c = &cfg.converge;
    let variant = cfg.scheme.variant;
    let alpha = cfg.model.alpha;
    let gamma = c.gamma.unwrap_or_else(|| default_grading(variant, alpha, c.iota));
    let potential = cfg.model.potential()?;
    let lattice = cfg.lattice.lattice()?;
    let problem = Manufactured {
        alpha,
        iota: c.iota,
        m: cfg.model.mobility,
        eps: cfg.model.eps,
        potential,
    };
    let target_rate = match variant {
        Variant::L1 => (2.0 - alpha).min(gamma * c.iota),
        _ => (2.0f64).min(gamma * c.iota),
    };

    let results = parallel_map(&c.n_list, cfg.threads, |&n| -> Result<(f64, f64, RunSummary)> {
        let grid = timegrid::mixed_graded_uniform(c.t_end, n, gamma)?;
        let stepper = stepper_for(cfg)?.with_forcing(problem);
        let mut err: f64 = 0.0;
        let mut err_l2: f64 = 0.0;
        let st = stepper.run(Field::zeros(lattice), &MeshPlan::Fixed(grid), |st| {
            let exact = problem.exact(&lattice, st.t());
            err = err.max(exact.max_abs_diff(st.phi())?);
            err_l2 = err_l2.max(Field::lincomb(1.0, &exact, -1.0, st.phi())?.norm2());
            Ok(())
        })?;
        info!("{} N = {n}: e = {err:.3e}, e_L2 = {err_l2:.3e}", variant.name());
        if let Some(dir) = subdir(out, &format!("N{n}")) {
            output::write_diagnostics(&dir.join("diagnostics.csv"), &st.diagnostics)?;
        }
        Ok((err, err_l2, RunSummary::of(format!("N{n}"), &st)))
    });

    let mut rows: Vec<ConvergenceRow> = Vec::new();
    for (&n, res) in c.n_list.iter().zip(results) {
        let (error, error_l2, summary) = res?;
        let rate = |prev: f64, cur: f64, m: usize| (prev / cur).ln() / (n as f64 / m as f64).ln();
        let order = rows.last().map(|p| rate(p.error, error, p.n));
        let order_l2 = rows.last().map(|p| rate(p.error_l2, error_l2, p.n));
        rows.push(ConvergenceRow {
            n,
            error,
            error_l2,
            order,
            order_l2,
            all_mbp_ok: summary.all_mbp_ok,
            all_energy_ok: summary.all_energy_ok,
            max_energy_excess: summary.max_energy_excess,
        });
    }
    let report = ConvergenceReport {
        variant,
        potential: potential.name().into(),
        alpha,
        iota: c.iota,
        gamma,
        target_rate,
        t_hat: timegrid::mixed_split(c.t_end, *c.n_list.last().unwrap_or(&1), gamma).0,
        points: lattice.m,
        rows,
    };
    if let Some(dir) = out {
        output::write_json(&dir.join("report.json"), &report)?;
    }
    Ok(report)
}

// ---------------------------------------------------------------- spinodal

#[derive(Debug, Clone, Serialize)]
pub struct SpinodalReport {
    pub variant: Variant,
    pub potential: String,
    pub beta: f64,
    pub seed: u64,
    pub generator: &'static str,
    pub bounds: TauBounds,
    pub runs: Vec<(f64, RunSummary)>,
}

pub fn spinodal(cfg: &ExperimentConfig, out: Option<&Path>) -> Result<SpinodalReport> {
    let s = &cfg.spinodal;
    let lattice = cfg.lattice.lattice()?;
    let potential = cfg.model.potential()?;
    let scheme = cfg.scheme_config()?;
    let phi0 = initial::random_uniform(lattice, cfg.seed, s.amplitude);
    let runs = parallel_map(&s.taus, cfg.threads, |&tau| -> Result<(f64, RunSummary)> {
        let grid = TimeGrid::from_times(vec![0.0])?.extend_fixed_step(tau, s.t_end)?;
        let stepper = stepper_for(cfg)?;
        let label = format!("tau_{tau}");
        let dir = subdir(out, &label);
        let st = run_logged(&stepper, phi0.clone(), &MeshPlan::Fixed(grid), &s.snapshots, dir.as_deref())?;
        info!("{} τ = {tau}: max ‖φ‖∞ = {}", scheme.variant.name(), RunSummary::of("", &st).max_norm);
        Ok((tau, RunSummary::of(label, &st)))
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let report = SpinodalReport {
        variant: scheme.variant,
        potential: potential.name().into(),
        beta: potential.beta,
        seed: cfg.seed,
        generator: rng::GENERATOR_ID,
        bounds: tau_bounds(
            scheme.variant,
            scheme.alpha,
            scheme.m,
            scheme.kappa,
            scheme.eps,
            lattice.h(),
            1.0,
        ),
        runs,
    };
    if let Some(dir) = out {
        output::write_json(&dir.join("report.json"), &report)?;
    }
    Ok(report)
}

// ---------------------------------------------------------------- adaptive

#[derive(Debug, Clone, Serialize)]
pub struct AdaptiveReport {
    pub potential: String,
    pub seed: u64,
    pub gamma: f64,
    /// Steps of the uniform tails over the whole interval, from the grid
    /// construction alone.
    pub large_steps: usize,
    pub small_steps: usize,
    /// Time levels counted by a running-sum marching loop, which picks up a
    /// rounding sliver at the end of the small-step tail.
    pub large_levels_marched: usize,
    pub small_levels_marched: usize,
    pub large: RunSummary,
    pub adaptive: RunSummary,
    /// The small-step reference, marched only up to `small_until`.
    pub small: RunSummary,
    pub compare_at: f64,
    /// Max-norm difference at `compare_at`.
    pub adaptive_vs_small: f64,
    /// Root-mean-square difference at `compare_at`.
    pub adaptive_vs_small_rms: f64,
    /// Fraction of lattice points where both runs are in the same phase.
    pub sign_agreement: f64,
    /// Absent when the large-step tail does not land on `compare_at`.
    pub large_vs_small: Option<f64>,
    pub tolerance: f64,
}

pub fn adaptive(cfg: &ExperimentConfig, out: Option<&Path>) -> Result<AdaptiveReport> {
    let a = &cfg.adaptive;
    let lattice = cfg.lattice.lattice()?;
    let potential = cfg.model.potential()?;
    let gamma = a.gamma.unwrap_or((2.0 - cfg.model.alpha) / cfg.model.alpha);
    let prefix = TimeGrid::graded(a.t_hat, a.n_hat, gamma)?;
    let large_grid = prefix.extend_fixed_step(a.tau_large, a.t_end)?;
    let large_marched = prefix.extend_fixed_step_accumulated(a.tau_large, a.t_end)?;
    let small_grid = prefix.extend_fixed_step(a.tau_small, a.t_end)?;
    let small_marched = prefix.extend_fixed_step_accumulated(a.tau_small, a.t_end)?;
    let phi0 = initial::random_uniform(lattice, cfg.seed, cfg.spinodal.amplitude);
    let stepper = stepper_for(cfg)?;

    let field_at = |st: &SimState, t: f64| -> Result<Field> {
        let k = st
            .grid
            .times()
            .iter()
            .position(|&s| (s - t).abs() <= 1e-9 * t.max(1.0))
            .ok_or_else(|| Error::InvalidGrid(format!("run does not visit t = {t}")))?;
        Ok(st.history[k].clone())
    };
    let mut landmarks = a.snapshots.clone();
    landmarks.push(a.compare_at);

    let large = run_logged(&stepper, phi0.clone(), &MeshPlan::Fixed(large_grid.clone()), &a.snapshots, subdir(out, "large").as_deref())?;
    let large_at = field_at(&large, a.compare_at).ok();
    let large_summary = RunSummary::of("large", &large);
    drop(large);

    let plan = MeshPlan::Adaptive {
        prefix: prefix.clone(),
        controller: AdaptiveController::new(a.tau_min, a.tau_max, a.eta, a.r_min)?,
        t_end: a.t_end,
        landmarks,
    };
    let adapt = run_logged(&stepper, phi0.clone(), &plan, &a.snapshots, subdir(out, "adaptive").as_deref())?;
    let adapt_at = field_at(&adapt, a.compare_at)?;
    let adapt_summary = RunSummary::of("adaptive", &adapt);
    drop(adapt);

    let small_run_grid = prefix.extend_fixed_step(a.tau_small, a.small_until)?;
    let small = run_logged(&stepper, phi0, &MeshPlan::Fixed(small_run_grid), &a.snapshots, subdir(out, "small").as_deref())?;
    let small_at = field_at(&small, a.compare_at)?;
    let small_summary = RunSummary::of("small", &small);
    drop(small);

    let report = AdaptiveReport {
        potential: potential.name().into(),
        seed: cfg.seed,
        gamma,
        large_steps: large_grid.num_steps(),
        small_steps: small_grid.num_steps(),
        large_levels_marched: large_marched.num_levels(),
        small_levels_marched: small_marched.num_levels(),
        large: large_summary,
        adaptive: adapt_summary,
        small: small_summary,
        compare_at: a.compare_at,
        adaptive_vs_small: adapt_at.max_abs_diff(&small_at)?,
        adaptive_vs_small_rms: Field::lincomb(1.0, &adapt_at, -1.0, &small_at)?.norm2()
            / adapt_at.lattice().length.powf(adapt_at.lattice().dim as f64 / 2.0),
        sign_agreement: adapt_at
            .values()
            .iter()
            .zip(small_at.values())
            .filter(|(a, b)| a.signum() == b.signum())
            .count() as f64
            / adapt_at.values().len() as f64,
        large_vs_small: large_at.map(|f| f.max_abs_diff(&small_at)).transpose()?,
        tolerance: a.tolerance,
    };
    if let Some(dir) = out {
        output::write_json(&dir.join("report.json"), &report)?;
    }
    Ok(report)
}

// ----------------------------------------------------------- coarsen/bubble

#[derive(Debug, Clone, Serialize)]
pub struct CoarsenReport {
    pub lambda: f64,
    pub runs: Vec<(f64, RunSummary)>,
}

pub fn coarsen(cfg: &ExperimentConfig, out: Option<&Path>) -> Result<CoarsenReport> {
    let c = &cfg.coarsen;
    let lattice = cfg.lattice.lattice()?;
    let lambda = c.lambda.unwrap_or(cfg.model.eps * cfg.model.eps);
    let phi0 = initial::flower(lattice, lambda);
    let runs = parallel_map(&c.alphas, cfg.threads, |&alpha| -> Result<(f64, RunSummary)> {
        let mut local = cfg.clone();
        local.model.alpha = alpha;
        let stepper = stepper_for(&local)?;
        let plan = MeshPlan::Adaptive {
            prefix: TimeGrid::graded(c.t_hat, c.n_hat, (2.0 - alpha) / alpha)?,
            controller: AdaptiveController::new(c.tau_min, c.tau_max, c.eta, c.r_min)?,
            t_end: c.t_end,
            landmarks: c.snapshots.clone(),
        };
        let label = format!("alpha_{alpha}");
        let st = run_logged(&stepper, phi0.clone(), &plan, &c.snapshots, subdir(out, &label).as_deref())?;
        Ok((alpha, RunSummary::of(label, &st)))
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let report = CoarsenReport { lambda, runs };
    if let Some(dir) = out {
        output::write_json(&dir.join("report.json"), &report)?;
    }
    Ok(report)
}

pub fn bubble3d(cfg: &ExperimentConfig, out: Option<&Path>) -> Result<RunSummary> {
    let b = &cfg.bubble3d;
    let lattice = cfg.lattice.lattice()?;
    if lattice.dim != 3 {
        return Err(Error::Config("bubble merging needs a 3D lattice".into()));
    }
    let alpha = cfg.model.alpha;
    let stepper = stepper_for(cfg)?;
    let plan = MeshPlan::Adaptive {
        prefix: TimeGrid::graded(b.t_hat, b.n_hat, (2.0 - alpha) / alpha)?,
        controller: AdaptiveController::new(b.tau_min, b.tau_max, b.eta, 0.0)?,
        t_end: b.t_end,
        landmarks: b.snapshots.clone(),
    };
    let phi0 = initial::two_bubbles(lattice, cfg.model.eps);
    let st = run_logged(&stepper, phi0, &plan, &b.snapshots, out)?;
    let summary = RunSummary::of("bubble3d", &st);
    if let Some(dir) = out {
        output::write_json(&dir.join("report.json"), &summary)?;
    }
    Ok(summary)
}

// ------------------------------------------------------------ kernel-check

#[derive(Debug, Clone, Serialize)]
pub struct KernelCheckReport {
    pub grids: usize,
    pub levels_checked: usize,
    pub l1_positive_monotone_failures: usize,
    pub b0_bound_failures: usize,
    pub b_monotone_failures: usize,
    pub leading_gap_failures: usize,
    pub min_leading_gap_scaled: f64,
    pub min_psd_form: f64,
    pub min_g_functional: f64,
    /// Per-step bounds of the bound-preserving condition on uniform grids in
    /// the `α = 0.9`, `ε = 0.01`, `h = 1/128` coarsening setting.
    pub uniform_bound_double_well: f64,
    pub uniform_bound_flory_huggins: f64,
}

/// Grid `seed`-th of a reproducible family: graded meshes for even seeds and
/// random-ratio meshes with `r_k ∈ [4/7, 2]` for odd ones.
pub fn random_grid(seed: u64, max_steps: usize) -> Result<TimeGrid> {
    let u = |i: u64| rng::unit(seed, i);
    let n = 2 + (u(0) * (max_steps - 1) as f64) as usize;
    if seed % 2 == 0 {
        TimeGrid::graded(0.1 + 2.0 * u(1), n, 1.0 + 3.0 * u(2))
    } else {
        let mut times = vec![0.0, 1e-3 + u(1)];
        for k in 2..=n {
            let tau = times[k - 1] - times[k - 2];
            let r = L21_RATIO_FLOOR + (2.0 - L21_RATIO_FLOOR) * u(k as u64 + 2);
            times.push(times[k - 1] + r * tau);
        }
        TimeGrid::from_times(times)
    }
}

/// Standard normal draws by Box–Muller.
pub fn gaussian(seed: u64, count: usize) -> Vec<f64> {
    (0..count as u64)
        .map(|i| {
            let u1 = 1.0 - rng::unit(seed, 2 * i);
            let u2 = rng::unit(seed, 2 * i + 1);
            (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
        })
        .collect()
}

pub fn kernel_check(cfg: &ExperimentConfig, out: Option<&Path>) -> Result<KernelCheckReport> {
    let k = &cfg.kernel_check;
    let mut report = KernelCheckReport {
        grids: k.grids,
        levels_checked: 0,
        l1_positive_monotone_failures: 0,
        b0_bound_failures: 0,
        b_monotone_failures: 0,
        leading_gap_failures: 0,
        min_leading_gap_scaled: f64::INFINITY,
        min_psd_form: f64::INFINITY,
        min_g_functional: f64::INFINITY,
        uniform_bound_double_well: 0.0,
        uniform_bound_flory_huggins: 0.0,
    };
    let base = cfg.seed.wrapping_mul(1000);
    for g in 0..k.grids as u64 {
        let grid = random_grid(base + g, k.max_steps)?;
        let alpha = 0.02 + 0.96 * rng::unit(base + g, 999);
        for n in 1..=grid.num_steps() {
            report.levels_checked += 1;
            if !L1KernelSet::new(&grid, n, alpha)?.is_positive_monotone() {
                report.l1_positive_monotone_failures += 1;
            }
            let l21 = L21KernelSet::new(&grid, n, alpha)?;
            if !l21.b0_within_bounds() {
                report.b0_bound_failures += 1;
            }
            if !l21.is_monotone() {
                report.b_monotone_failures += 1;
            }
            if let Some(gap) = l21.leading_gap() {
                report.min_leading_gap_scaled = report.min_leading_gap_scaled.min(gap / l21.big_b[0]);
                if gap <= 0.0 {
                    report.leading_gap_failures += 1;
                }
            }
        }
    }
    let per_grid = k.sequences.div_ceil(k.grids.max(1));
    for g in 0..k.grids as u64 {
        let grid = random_grid(base + g, k.max_steps)?;
        let alpha = 0.02 + 0.96 * rng::unit(base + g, 999);
        let n = grid.num_steps();
        let sequences: Vec<Vec<f64>> = (0..per_grid as u64)
            .map(|s| gaussian(base ^ (g << 20) ^ s, n))
            .collect();
        report.min_psd_form = report.min_psd_form.min(check_psd(&grid, alpha, &sequences)?);
        let c = L21KernelSet::new(&grid, n, alpha)?.big_c;
        for w in &sequences {
            report.min_g_functional = report.min_g_functional.min(g_functional_scalar(&c, w));
        }
    }
    let h = 1.0 / 128.0;
    let dw = Potential::double_well();
    let fh = Potential::flory_huggins_default();
    report.uniform_bound_double_well =
        tau_bounds(Variant::L21, 0.9, 1.0, dw.kappa_default, 0.01, h, 1.0).per_step;
    report.uniform_bound_flory_huggins =
        tau_bounds(Variant::L21, 0.9, 1.0, fh.kappa_default, 0.01, h, 1.0).per_step;
    if let Some(dir) = out {
        output::write_json(&dir.join("report.json"), &report)?;
    }
    Ok(report)
}

// ----------------------------------------------------------- extrap-probe

#[derive(Debug, Clone, Serialize)]
pub struct ExtrapCase {
    pub gamma: f64,
    pub iota: f64,
    pub target_rate: f64,
    pub errors: Vec<(usize, f64)>,
    pub rates: Vec<f64>,
}

impl ExtrapCase {
    pub fn finest_rate(&self) -> f64 {
        *self.rates.last().unwrap_or(&f64::NAN)
    }
}

/// `max_{n ≥ 2} |v(t_n) − (1 + r_n)v(t_{n−1}) + r_n v(t_{n−2})|`.
pub fn extrapolation_error(grid: &TimeGrid, v: impl Fn(f64) -> f64) -> f64 {
    (2..=grid.num_steps())
        .map(|n| {
            let r = grid.ratio(n);
            let a = v(grid.t(n - 1));
            let b = v(grid.t(n - 2));
            (v(grid.t(n)) - (a + r * (a - b))).abs()
        })
        .fold(0.0, f64::max)
}

pub fn extrapolation_probe(cfg: &ExperimentConfig, out: Option<&Path>) -> Result<Vec<ExtrapCase>> {
    let p = &cfg.extrap_probe;
    let mut cases = Vec::new();
    for &(gamma, iota) in &p.cases {
        let mut errors = Vec::new();
        for &n in &p.n_list {
            let grid = TimeGrid::graded(1.0, n, gamma)?;
            errors.push((n, extrapolation_error(&grid, |t| t.powf(iota))));
        }
        let rates = errors
            .windows(2)
            .map(|w| (w[0].1 / w[1].1).ln() / (w[1].0 as f64 / w[0].0 as f64).ln())
            .collect();
        cases.push(ExtrapCase { gamma, iota, target_rate: (gamma * iota).min(2.0), errors, rates });
    }
    if let Some(dir) = out {
        output::write_json(&dir.join("report.json"), &cases)?;
    }
    Ok(cases)
}

/// Dispatches on the experiment kind and returns the report as JSON.
pub fn run_experiment(kind: ExperimentKind, cfg: &ExperimentConfig, out: Option<&Path>) -> Result<serde_json::Value> {
    Ok(match kind {
        ExperimentKind::Converge => serde_json::to_value(convergence(cfg, out)?)?,
        ExperimentKind::Spinodal => serde_json::to_value(spinodal(cfg, out)?)?,
        ExperimentKind::Adaptive => serde_json::to_value(adaptive(cfg, out)?)?,
        ExperimentKind::Coarsen => serde_json::to_value(coarsen(cfg, out)?)?,
        ExperimentKind::Bubble3d => serde_json::to_value(bubble3d(cfg, out)?)?,
        ExperimentKind::KernelCheck => serde_json::to_value(kernel_check(cfg, out)?)?,
        ExperimentKind::ExtrapProbe => serde_json::to_value(extrapolation_probe(cfg, out)?)?,
    })
}
