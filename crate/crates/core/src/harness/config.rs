//! Experiment configuration.
//!
//! Configs are TOML. Each experiment kind starts from a preset holding the
//! reference setting, and a config file only needs the keys it changes.
//! Unknown keys are rejected.
//!
//! ```toml
//! seed = 7
//!
//! [model]
//! alpha = 0.5
//! potential = "flory-huggins"
//!
//! [spinodal]
//! taus = [2.0, 0.2]
//! t_end = 10.0
//! ```

use serde::{Deserialize, Serialize};

use crate::potentials::Potential;
use crate::schemes::{SchemeConfig, Variant};
use crate::spatial::Lattice;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Converge,
    Spinodal,
    Adaptive,
    Coarsen,
    Bubble3d,
    KernelCheck,
    ExtrapProbe,
}

impl ExperimentKind {
    pub fn name(&self) -> &'static str {
        match self {
            ExperimentKind::Converge => "converge",
            ExperimentKind::Spinodal => "spinodal",
            ExperimentKind::Adaptive => "adaptive",
            ExperimentKind::Coarsen => "coarsen",
            ExperimentKind::Bubble3d => "bubble3d",
            ExperimentKind::KernelCheck => "kernel-check",
            ExperimentKind::ExtrapProbe => "extrap-probe",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PotentialChoice {
    DoubleWell,
    FloryHuggins,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub alpha: f64,
    pub mobility: f64,
    pub eps: f64,
    pub potential: PotentialChoice,
    pub theta: f64,
    pub theta_c: f64,
    /// Stabilization constant; `‖f′‖` on `[−β, β]` when absent.
    pub kappa: Option<f64>,
}

impl Default for ModelConfig {
    fn default() -> Self {
        Self {
            alpha: 0.5,
            mobility: 1.0,
            eps: 0.01,
            potential: PotentialChoice::DoubleWell,
            theta: 0.8,
            theta_c: 1.6,
            kappa: None,
        }
    }
}

impl ModelConfig {
    pub fn potential(&self) -> Result<Potential> {
        match self.potential {
            PotentialChoice::DoubleWell => Ok(Potential::double_well()),
            PotentialChoice::FloryHuggins => Potential::flory_huggins(self.theta, self.theta_c),
        }
    }

    pub fn kappa(&self) -> Result<f64> {
        Ok(match self.kappa {
            Some(k) => k,
            None => self.potential()?.kappa_default,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchemeSection {
    pub variant: Variant,
    pub iter_tol: f64,
    pub iter_max: usize,
}

impl Default for SchemeSection {
    fn default() -> Self {
        Self { variant: Variant::L1, iter_tol: 1e-12, iter_max: 50_000 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeConfig {
    pub dim: usize,
    pub points: usize,
    pub length: f64,
}

impl Default for LatticeConfig {
    fn default() -> Self {
        Self { dim: 2, points: 128, length: 1.0 }
    }
}

impl LatticeConfig {
    pub fn lattice(&self) -> Result<Lattice> {
        Lattice::new(self.dim, self.points, self.length)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConvergeConfig {
    pub iota: f64,
    /// Mesh grading; `(2 − α)/ι` (L1) or `2/ι` (L2-1σ) when absent.
    pub gamma: Option<f64>,
    pub t_end: f64,
    pub n_list: Vec<usize>,
}

impl Default for ConvergeConfig {
    fn default() -> Self {
        Self { iota: 0.4, gamma: None, t_end: 0.5, n_list: vec![20, 40, 80, 160, 320] }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpinodalConfig {
    pub taus: Vec<f64>,
    pub t_end: f64,
    pub amplitude: f64,
    pub snapshots: Vec<f64>,
}

impl Default for SpinodalConfig {
    fn default() -> Self {
        Self { taus: vec![2.0, 0.2, 0.02], t_end: 20.0, amplitude: 0.8, snapshots: vec![] }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AdaptiveConfig {
    pub t_hat: f64,
    pub n_hat: usize,
    /// Grading of the prefix; `(2 − α)/α` when absent.
    pub gamma: Option<f64>,
    pub t_end: f64,
    pub tau_large: f64,
    pub tau_small: f64,
    pub tau_min: f64,
    pub tau_max: f64,
    pub eta: f64,
    pub r_min: f64,
    /// The small-step reference is only marched up to this time.
    pub small_until: f64,
    /// Instant at which the adaptive and small-step fields are compared.
    pub compare_at: f64,
    pub tolerance: f64,
    pub amplitude: f64,
    pub snapshots: Vec<f64>,
}

impl Default for AdaptiveConfig {
    fn default() -> Self {
        Self {
            t_hat: 0.5,
            n_hat: 30,
            gamma: None,
            t_end: 500.0,
            tau_large: 2.0,
            tau_small: 0.02,
            tau_min: 0.02,
            tau_max: 2.0,
            eta: 1e6,
            r_min: 0.0,
            small_until: 100.0,
            compare_at: 100.0,
            tolerance: 0.05,
            amplitude: 0.8,
            snapshots: vec![5.0, 20.0, 100.0, 500.0],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoarsenConfig {
    pub alphas: Vec<f64>,
    /// Width parameter of the flower profile; `ε²` when absent.
    pub lambda: Option<f64>,
    pub t_hat: f64,
    pub n_hat: usize,
    pub t_end: f64,
    pub tau_min: f64,
    pub tau_max: f64,
    pub eta: f64,
    pub r_min: f64,
    pub snapshots: Vec<f64>,
}

impl Default for CoarsenConfig {
    fn default() -> Self {
        Self {
            alphas: vec![0.9, 0.7, 0.4],
            lambda: None,
            t_hat: 0.5,
            n_hat: 30,
            t_end: 700.0,
            tau_min: 0.02,
            tau_max: 2.0,
            eta: 1e7,
            r_min: 0.0,
            snapshots: vec![10.0, 50.0, 100.0, 300.0, 700.0],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Bubble3dConfig {
    pub t_hat: f64,
    pub n_hat: usize,
    pub t_end: f64,
    pub tau_min: f64,
    pub tau_max: f64,
    pub eta: f64,
    pub snapshots: Vec<f64>,
}

impl Default for Bubble3dConfig {
    fn default() -> Self {
        Self {
            t_hat: 0.5,
            n_hat: 30,
            t_end: 50.0,
            tau_min: 0.01,
            tau_max: 1.0,
            eta: 1e7,
            snapshots: vec![10.0, 30.0, 50.0],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelCheckConfig {
    pub grids: usize,
    pub sequences: usize,
    pub max_steps: usize,
}

impl Default for KernelCheckConfig {
    fn default() -> Self {
        Self { grids: 100, sequences: 1000, max_steps: 40 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExtrapProbeConfig {
    /// `(γ, ι)` pairs.
    pub cases: Vec<(f64, f64)>,
    pub n_list: Vec<usize>,
}

impl Default for ExtrapProbeConfig {
    fn default() -> Self {
        Self {
            cases: vec![(2.0, 0.4), (3.0, 0.4), (5.0, 0.4), (4.0, 0.5)],
            n_list: vec![160, 320, 640, 1280],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub seed: u64,
    /// Worker threads for independent runs within one experiment.
    pub threads: usize,
    pub model: ModelConfig,
    pub scheme: SchemeSection,
    pub lattice: LatticeConfig,
    pub converge: ConvergeConfig,
    pub spinodal: SpinodalConfig,
    pub adaptive: AdaptiveConfig,
    pub coarsen: CoarsenConfig,
    pub bubble3d: Bubble3dConfig,
    pub kernel_check: KernelCheckConfig,
    pub extrap_probe: ExtrapProbeConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            seed: 2024,
            threads: 1,
            model: ModelConfig::default(),
            scheme: SchemeSection::default(),
            lattice: LatticeConfig::default(),
            converge: ConvergeConfig::default(),
            spinodal: SpinodalConfig::default(),
            adaptive: AdaptiveConfig::default(),
            coarsen: CoarsenConfig::default(),
            bubble3d: Bubble3dConfig::default(),
            kernel_check: KernelCheckConfig::default(),
            extrap_probe: ExtrapProbeConfig::default(),
        }
    }
}

impl ExperimentConfig {
    /// Reference setting for each experiment.
    pub fn preset(kind: ExperimentKind) -> Self {
        let mut cfg = Self::default();
        match kind {
            ExperimentKind::Converge => {
                cfg.model.alpha = 0.4;
                cfg.model.mobility = 0.01;
                cfg.model.eps = 1.0;
                cfg.lattice = LatticeConfig { dim: 2, points: 400, length: 2.0 * std::f64::consts::PI };
            }
            ExperimentKind::Bubble3d => {
                cfg.model.eps = 0.03;
                cfg.lattice = LatticeConfig { dim: 3, points: 40, length: 1.0 };
            }
            ExperimentKind::Coarsen => {
                cfg.model.alpha = 0.9;
            }
            _ => {}
        }
        cfg
    }

    /// Overlays a TOML document on the preset of `kind`.
    pub fn from_toml(kind: ExperimentKind, text: &str) -> Result<Self> {
        let overlay: toml::Table = text.parse().map_err(|e| Error::Config(format!("{e}")))?;
        let base = toml::Table::try_from(Self::preset(kind)).map_err(|e| Error::Config(format!("{e}")))?;
        let merged = merge(base, overlay);
        let cfg: Self = merged.try_into().map_err(|e: toml::de::Error| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        crate::check_order(self.model.alpha)?;
        if !(self.model.mobility > 0.0 && self.model.eps > 0.0) {
            return Err(Error::Config("mobility and ε must be positive".into()));
        }
        if self.model.kappa.is_some_and(|k| k < 0.0) {
            return Err(Error::Config("κ must be nonnegative".into()));
        }
        self.lattice.lattice()?;
        self.model.potential()?;
        Ok(())
    }

    pub fn scheme_config(&self) -> Result<SchemeConfig> {
        let mut s = SchemeConfig::new(
            self.scheme.variant,
            self.model.alpha,
            self.model.kappa()?,
            self.model.mobility,
            self.model.eps,
        );
        s.iter_tol = self.scheme.iter_tol;
        s.iter_max = self.scheme.iter_max;
        Ok(s)
    }
}

fn merge(mut base: toml::Table, overlay: toml::Table) -> toml::Table {
    for (key, value) in overlay {
        match (base.remove(&key), value) {
            (Some(toml::Value::Table(b)), toml::Value::Table(o)) => {
                base.insert(key, toml::Value::Table(merge(b, o)));
            }
            (_, v) => {
                base.insert(key, v);
            }
        }
    }
    base
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overlay_keeps_preset_values() {
        let cfg = ExperimentConfig::from_toml(
            ExperimentKind::Converge,
            "seed = 3\n[model]\nalpha = 0.8\n[scheme]\nvariant = \"l21-unbalanced\"\n",
        )
        .unwrap();
        assert_eq!(cfg.seed, 3);
        assert_eq!(cfg.model.alpha, 0.8);
        assert_eq!(cfg.model.mobility, 0.01);
        assert_eq!(cfg.lattice.points, 400);
        assert_eq!(cfg.scheme.variant, Variant::L21Unbalanced);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let err = ExperimentConfig::from_toml(ExperimentKind::Spinodal, "[model]\nalpah = 0.3\n");
        assert!(matches!(err, Err(Error::Config(_))));
        assert!(ExperimentConfig::from_toml(ExperimentKind::Spinodal, "bogus = 1\n").is_err());
    }

    #[test]
    fn invalid_values_are_rejected() {
        assert!(ExperimentConfig::from_toml(ExperimentKind::Spinodal, "[model]\nalpha = 1.5\n").is_err());
        assert!(ExperimentConfig::from_toml(ExperimentKind::Spinodal, "[lattice]\ndim = 4\n").is_err());
    }

    #[test]
    fn kappa_defaults_to_potential() {
        let mut cfg = ExperimentConfig::preset(ExperimentKind::Spinodal);
        cfg.model.potential = PotentialChoice::FloryHuggins;
        assert!((cfg.model.kappa().unwrap() - 8.02).abs() < 5e-3);
    }
}
