//! Linear sESAV time stepping.
//!
//! Every step solves one constant-coefficient system `(λI − cΔ_h)φⁿ = rhs`.
//! The nonlinearity enters explicitly through a clipped extrapolation
//! `φ̂ⁿ` (or, at the first level, a stabilized fixed-point iteration) and is
//! rescaled by `V(g_h)`, where `g_h` compares the auxiliary variable `R`
//! with the discrete nonlinear energy.

use log::{debug, warn};
use serde::{Deserialize, Serialize};

use crate::esav::{self, AuxFunctional, PiecewiseCutoff, SavState, Stabilization};
use crate::kernels::{history_sum, ConvolutionWeights, L1KernelSet, L21KernelSet};
use crate::monitors::{self, DiagnosticsRow};
use crate::potentials::Potential;
use crate::spatial::{Field, HelmholtzSolver, Lattice};
use crate::timegrid::{AdaptiveController, TimeGrid};
use crate::{check_order, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    /// L1 formula at `t_n`.
    L1,
    /// L2-1σ formula at `t_{n−ς}`, stabilization weighted by `V`.
    L21,
    /// L2-1σ with the unweighted implicit stabilization `κφ^{n−ς}`.
    L21Unbalanced,
}

impl Variant {
    pub fn name(&self) -> &'static str {
        match self {
            Variant::L1 => "l1",
            Variant::L21 => "l21",
            Variant::L21Unbalanced => "l21-unbalanced",
        }
    }

    /// Offset `ς` of the evaluation point `t_{n−ς}`.
    pub fn varsigma(&self, alpha: f64) -> f64 {
        match self {
            Variant::L1 => 0.0,
            _ => 0.5 * alpha,
        }
    }

    fn stabilization(&self) -> Stabilization {
        match self {
            Variant::L21Unbalanced => Stabilization::Unbalanced,
            _ => Stabilization::Balanced,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SchemeConfig {
    pub variant: Variant,
    pub alpha: f64,
    pub kappa: f64,
    /// Mobility.
    pub m: f64,
    /// Interface width.
    pub eps: f64,
    pub iter_tol: f64,
    pub iter_max: usize,
}

impl SchemeConfig {
    pub fn new(variant: Variant, alpha: f64, kappa: f64, m: f64, eps: f64) -> Self {
        Self { variant, alpha, kappa, m, eps, iter_tol: 1e-12, iter_max: 50_000 }
    }

    pub fn validate(&self, p: &Potential) -> Result<()> {
        check_order(self.alpha)?;
        if !(self.m > 0.0 && self.eps > 0.0 && self.kappa >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "need m > 0, ε > 0, κ ≥ 0 (got m = {}, ε = {}, κ = {})",
                self.m, self.eps, self.kappa
            )));
        }
        if !(self.iter_tol > 0.0) || self.iter_max == 0 {
            return Err(Error::InvalidParameter("iteration tolerance and cap must be positive".into()));
        }
        if self.kappa < p.kappa_default {
            warn!(
                "κ = {} is below ‖f′‖ = {}; bound preservation is not guaranteed",
                self.kappa, p.kappa_default
            );
        }
        Ok(())
    }
}

/// Space-time source term added to the right-hand side.
pub trait Forcing {
    fn eval(&self, lattice: &Lattice, t: f64) -> Field;
}

/// Everything a run has produced so far.
#[derive(Debug, Clone)]
pub struct SimState {
    pub n: usize,
    /// `φ⁰ … φⁿ`.
    pub history: Vec<Field>,
    pub sav: SavState,
    pub grid: TimeGrid,
    pub diagnostics: Vec<DiagnosticsRow>,
    pub e_mod0: f64,
}

impl SimState {
    pub fn phi(&self) -> &Field {
        self.history.last().expect("history holds φ⁰")
    }

    pub fn t(&self) -> f64 {
        self.grid.t(self.n)
    }

    pub fn last_row(&self) -> &DiagnosticsRow {
        self.diagnostics.last().expect("diagnostics hold the initial row")
    }

    pub fn all_mbp_ok(&self) -> bool {
        self.diagnostics.iter().all(|r| r.mbp_ok)
    }

    pub fn all_energy_ok(&self) -> bool {
        self.diagnostics.iter().all(|r| r.energy_ok)
    }
}

/// Result of the first-level fixed-point iteration.
#[derive(Debug, Clone)]
pub struct FirstStep {
    pub field: Field,
    pub iterations: usize,
    /// `‖φ̂_(s) − φ̂_(s−1)‖_∞` for `s = 1, 2, …`.
    pub residuals: Vec<f64>,
}

/// How the temporal mesh is obtained.
#[derive(Debug, Clone)]
pub enum MeshPlan {
    Fixed(TimeGrid),
    /// Run over `prefix`, then choose steps with `controller` until `t_end`.
    /// Steps are shortened to land on every landmark and on `t_end`.
    Adaptive {
        prefix: TimeGrid,
        controller: AdaptiveController,
        t_end: f64,
        landmarks: Vec<f64>,
    },
}

/// Clipped linear extrapolation `clip((1 + r)φ^{n−1} − rφ^{n−2}, ±β)`.
pub fn predict(phi_prev: &Field, phi_prev2: &Field, r: f64, beta: f64) -> Result<Field> {
    phi_prev.zip_map(phi_prev2, |a, b| (a + r * (a - b)).clamp(-beta, beta))
}

/// Advances [`SimState`]s for one scheme, potential and lattice.
pub struct Stepper {
    pub cfg: SchemeConfig,
    pub potential: Potential,
    aux: Box<dyn AuxFunctional + Send + Sync>,
    solver: HelmholtzSolver,
    forcing: Option<Box<dyn Forcing + Send + Sync>>,
}

enum Kernels {
    L1(L1KernelSet),
    L21(L21KernelSet),
}

impl Kernels {
    fn build(variant: Variant, grid: &TimeGrid, n: usize, alpha: f64) -> Result<Self> {
        Ok(match variant {
            Variant::L1 => Kernels::L1(L1KernelSet::new(grid, n, alpha)?),
            _ => {
                let k = L21KernelSet::new(grid, n, alpha)?;
                if !k.ratio_ok {
                    debug!("step ratio below 4/7 at level {n}");
                }
                Kernels::L21(k)
            }
        })
    }

    fn weights(&self) -> &dyn ConvolutionWeights {
        match self {
            Kernels::L1(k) => k,
            Kernels::L21(k) => k,
        }
    }
}

impl Stepper {
    pub fn new(cfg: SchemeConfig, potential: Potential, lattice: Lattice) -> Result<Self> {
        cfg.validate(&potential)?;
        Ok(Self {
            cfg,
            potential,
            aux: Box::new(PiecewiseCutoff),
            solver: HelmholtzSolver::new(lattice),
            forcing: None,
        })
    }

    pub fn with_forcing(mut self, forcing: impl Forcing + Send + Sync + 'static) -> Self {
        self.forcing = Some(Box::new(forcing));
        self
    }

    pub fn with_aux(mut self, aux: impl AuxFunctional + Send + Sync + 'static) -> Self {
        self.aux = Box::new(aux);
        self
    }

    pub fn lattice(&self) -> &Lattice {
        self.solver.lattice()
    }

    fn source(&self, t: f64) -> Option<Field> {
        self.forcing.as_ref().map(|f| f.eval(self.lattice(), t))
    }

    /// State at `t_0` with `R⁰ = E_{1h}[φ⁰]`.
    pub fn initialize(&self, phi0: Field, grid: TimeGrid) -> Result<SimState> {
        if phi0.lattice() != self.lattice() {
            return Err(Error::LatticeMismatch);
        }
        if !phi0.is_finite() {
            return Err(Error::NonFinite(0));
        }
        if !monitors::mbp_check(&phi0, self.potential.beta) {
            warn!("initial data exceeds the bound β = {}", self.potential.beta);
        }
        let sav = SavState::initial(&phi0, &self.potential)?;
        let (e_orig, e_mod) = esav::energies(&phi0, sav.r, self.cfg.eps, &self.potential)?;
        let row = DiagnosticsRow {
            n: 0,
            t: 0.0,
            tau: 0.0,
            max_norm: phi0.norm_inf(),
            e_orig,
            e_mod,
            r: sav.r,
            g: 1.0,
            v: 1.0,
            iters: 0,
            mbp_ok: monitors::mbp_check(&phi0, self.potential.beta),
            energy_ok: true,
        };
        Ok(SimState { n: 0, history: vec![phi0], sav, grid, diagnostics: vec![row], e_mod0: e_mod })
    }

    /// State at level `n = history.len() − 1` built from a given history and
    /// auxiliary value; used to probe single steps.
    pub fn resume(&self, grid: TimeGrid, history: Vec<Field>, r: f64) -> Result<SimState> {
        let n = history.len() - 1;
        let mut state = self.initialize(history[0].clone(), grid)?;
        state.history = history;
        state.n = n;
        state.sav.r = r;
        Ok(state)
    }

    /// Stabilized fixed-point iteration for `φ̂¹`, started from `φ⁰`.
    pub fn first_step_iterate(&self, phi0: &Field, grid: &TimeGrid) -> Result<FirstStep> {
        let cfg = &self.cfg;
        let p = &self.potential;
        let vs = cfg.variant.varsigma(cfg.alpha);
        let (w0, t_eval) = match Kernels::build(cfg.variant, grid, 1, cfg.alpha)? {
            Kernels::L1(k) => (k.weights[0], grid.t(1)),
            Kernels::L21(k) => (k.big_b[0], grid.t(1) - vs * grid.step(1)),
        };
        let lam = w0 + cfg.kappa * (1.0 - vs) * cfg.m;
        let c = (1.0 - vs) * cfg.m * cfg.eps * cfg.eps;

        // part of the right-hand side fixed by φ⁰
        let mut base = phi0.map(|v| (w0 - cfg.kappa * vs * cfg.m) * v);
        if vs > 0.0 {
            base.axpy(vs * cfg.m * cfg.eps * cfg.eps, &phi0.laplacian())?;
        }
        if let Some(src) = self.source(t_eval) {
            base.axpy(1.0, &src)?;
        }

        let mut current = phi0.clone();
        let mut residuals = Vec::new();
        for s in 1..=cfg.iter_max {
            let weighted = Field::lincomb(1.0 - vs, &current, vs, phi0)?;
            let nonlinear = weighted.try_map(|x| Ok(cfg.kappa * x + p.force(x)?))?;
            let mut rhs = base.clone();
            rhs.axpy(cfg.m, &nonlinear)?;
            let next = self.solver.solve(lam, c, &rhs)?;
            let res = next.max_abs_diff(&current)?;
            residuals.push(res);
            current = next;
            if !res.is_finite() {
                return Err(Error::NonFinite(1));
            }
            if res <= cfg.iter_tol {
                return Ok(FirstStep { field: current, iterations: s, residuals });
            }
        }
        Err(Error::IterationLimit {
            iterations: cfg.iter_max,
            residual: *residuals.last().unwrap_or(&f64::NAN),
        })
    }

    /// Advances `state` by one level. The grid must already contain `t_{n+1}`.
    pub fn step(&self, state: &mut SimState) -> Result<()> {
        let cfg = &self.cfg;
        let p = &self.potential;
        let n = state.n + 1;
        if n > state.grid.num_steps() {
            return Err(Error::InvalidGrid(format!("grid has no level {n}")));
        }
        if state.history.len() != n {
            return Err(Error::HistoryLength { n, got: state.history.len(), expected: n });
        }
        let vs = cfg.variant.varsigma(cfg.alpha);
        let grid = &state.grid;
        let kernels = Kernels::build(cfg.variant, grid, n, cfg.alpha)?;
        let w0 = kernels.weights().weights()[0];
        let memory = history_sum(kernels.weights(), &state.history)?;
        let prev = &state.history[n - 1];

        let (phi_hat, iters) = if n == 1 {
            let first = self.first_step_iterate(prev, grid)?;
            (first.field, first.iterations)
        } else {
            (predict(prev, &state.history[n - 2], grid.ratio(n), p.beta)?, 0)
        };
        let hat_eval = if vs > 0.0 { Field::lincomb(1.0 - vs, &phi_hat, vs, prev)? } else { phi_hat };
        let f_hat = hat_eval.try_map(|x| p.force(x))?;
        let e1h = esav::nonlinear_energy(&hat_eval, p)?;
        let g = esav::ratio_from_energy(e1h, state.sav.r);
        let v = self.aux.eval(g);

        let s = match cfg.variant.stabilization() {
            Stabilization::Balanced => v,
            Stabilization::Unbalanced => 1.0,
        };
        let lam = w0 + cfg.kappa * (1.0 - vs) * cfg.m * s;
        let c = (1.0 - vs) * cfg.m * cfg.eps * cfg.eps;

        let mut rhs = memory;
        rhs.scale(-1.0);
        if vs > 0.0 {
            rhs.axpy(vs * cfg.m * cfg.eps * cfg.eps, &prev.laplacian())?;
            rhs.axpy(-cfg.kappa * vs * cfg.m * s, prev)?;
        }
        rhs.axpy(cfg.m * v, &f_hat)?;
        rhs.axpy(cfg.kappa * cfg.m * v, &hat_eval)?;
        if let Some(src) = self.source(grid.t(n) - vs * grid.step(n)) {
            rhs.axpy(1.0, &src)?;
        }
        let phi = self.solver.solve(lam, c, &rhs)?;
        if !phi.is_finite() {
            return Err(Error::NonFinite(n));
        }

        let increment = Field::lincomb(1.0, &phi, -1.0, prev)?;
        let level = if vs > 0.0 { Field::lincomb(1.0 - vs, &phi, vs, prev)? } else { phi.clone() };
        let dr = esav::r_increment(
            cfg.variant.stabilization(),
            v,
            cfg.kappa,
            &f_hat,
            &level,
            &hat_eval,
            &increment,
        )?;
        state.sav.r += dr;

        let max_norm = phi.norm_inf();
        let (e_orig, e_mod) = match esav::energies(&phi, state.sav.r, cfg.eps, p) {
            Ok(e) => e,
            // outside the logarithm's domain the original energy is undefined
            Err(Error::Domain(_)) => {
                let grad = 0.5 * cfg.eps * cfg.eps * phi.grad_norm2();
                (f64::NAN, grad + state.sav.r)
            }
            Err(e) => return Err(e),
        };
        let row = DiagnosticsRow {
            n,
            t: grid.t(n),
            tau: grid.step(n),
            max_norm,
            e_orig,
            e_mod,
            r: state.sav.r,
            g,
            v,
            iters,
            mbp_ok: max_norm <= p.beta + monitors::MBP_TOL,
            energy_ok: monitors::energy_check(e_mod, state.e_mod0),
        };
        if !row.mbp_ok {
            warn!("bound exceeded at step {n}: ‖φ‖∞ = {max_norm}");
        }
        if !row.energy_ok {
            // A source term is free to pump energy in.
            if self.forcing.is_some() {
                debug!("modified energy above its initial value at step {n}");
            } else {
                warn!("modified energy above its initial value at step {n}");
            }
        }
        state.diagnostics.push(row);
        state.history.push(phi);
        state.n = n;
        Ok(())
    }

    /// Runs from `φ⁰` over the mesh plan, calling `observer` after the
    /// initial state and after every step.
    pub fn run(
        &self,
        phi0: Field,
        plan: &MeshPlan,
        mut observer: impl FnMut(&SimState) -> Result<()>,
    ) -> Result<SimState> {
        let prefix = match plan {
            MeshPlan::Fixed(g) => g.clone(),
            MeshPlan::Adaptive { prefix, .. } => prefix.clone(),
        };
        let mut state = self.initialize(phi0, prefix)?;
        observer(&state)?;
        while state.n < state.grid.num_steps() {
            self.step(&mut state)?;
            observer(&state)?;
        }
        if let MeshPlan::Adaptive { controller, t_end, landmarks, .. } = plan {
            let t_end = *t_end;
            while state.t() < t_end {
                let n = state.n;
                let tau_prev = state.grid.step(n);
                let d_energy = if n >= 2 {
                    (state.diagnostics[n].e_orig - state.diagnostics[n - 1].e_orig) / tau_prev
                } else {
                    0.0
                };
                let mut tau = controller.propose(d_energy, tau_prev);
                let t = state.t();
                let target = landmarks
                    .iter()
                    .copied()
                    .filter(|&l| l > t && l < t_end)
                    .fold(t_end, f64::min);
                let land = t + tau >= target;
                if land {
                    tau = target - t;
                }
                state.grid.push_step(tau)?;
                if land {
                    state.grid.set_final_time(target)?;
                }
                self.step(&mut state)?;
                observer(&state)?;
            }
        }
        Ok(state)
    }
}
