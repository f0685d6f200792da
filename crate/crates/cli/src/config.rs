//! Experiment configuration: plain TOML with nesting, one experiment per
//! file.  Unknown keys are rejected, and the fully resolved configuration
//! (defaults included) is echoed into every report header so that no
//! numeric default stays hidden.

use anyhow::{bail, Context};
use serde::{Deserialize, Serialize};
use ske_core::levy_noise::{GFunction, LevyMeasureSpec, LevyTriplet, StableLaw};
use ske_core::sde_kernel::{DriftSpec, KineticConfig, NoiseSpec, SchemeConfig};

/// Which experiment a config file drives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    NoiseCheck,
    Simulate,
    Moments,
    RescaleConverge,
    CriticalErgodic,
    TripletLimit,
    Metric,
    BrownianNegligibility,
}

impl ExperimentKind {
    pub fn label(self) -> &'static str {
        match self {
            ExperimentKind::NoiseCheck => "noise-check",
            ExperimentKind::Simulate => "simulate",
            ExperimentKind::Moments => "moments",
            ExperimentKind::RescaleConverge => "rescale-converge",
            ExperimentKind::CriticalErgodic => "critical-ergodic",
            ExperimentKind::TripletLimit => "triplet-limit",
            ExperimentKind::Metric => "metric",
            ExperimentKind::BrownianNegligibility => "brownian-negligibility",
        }
    }
}

fn d_one() -> f64 {
    1.0
}

fn d_seed() -> u64 {
    1
}

fn d_true() -> bool {
    true
}

/// Top-level config.  Every section has defaults; the `kind` key selects
/// which experiment section is actually consumed.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    #[serde(default = "d_seed")]
    pub seed: u64,
    /// Output directory; overridable with `--out`.
    #[serde(default)]
    pub out: Option<String>,
    /// Emit SVG charts for the log-log experiments.
    #[serde(default = "d_true")]
    pub charts: bool,
    #[serde(default)]
    pub kinetic: KineticSection,
    #[serde(default)]
    pub noise_check: NoiseCheckSection,
    #[serde(default)]
    pub simulate: SimulateSection,
    #[serde(default)]
    pub moments: MomentsSection,
    #[serde(default)]
    pub rescale: RescaleSection,
    #[serde(default)]
    pub ergodic: ErgodicSection,
    #[serde(default)]
    pub triplet_limit: TripletLimitSection,
    #[serde(default)]
    pub metric: MetricSection,
    #[serde(default)]
    pub brownian: BrownianSection,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> anyhow::Result<Self> {
        toml::from_str(text).context("config parse error")
    }

    /// The resolved config (all defaults materialized) as TOML text,
    /// embedded as the header of every report.
    pub fn resolved_toml(&self) -> anyhow::Result<String> {
        toml::to_string_pretty(self).context("config serialization failed")
    }
}

/// One kinetic-equation problem instance.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct KineticSection {
    #[serde(default = "beta_default")]
    pub beta: f64,
    #[serde(default = "d_one")]
    pub t0: f64,
    #[serde(default = "d_one")]
    pub v0: f64,
    #[serde(default)]
    pub x0: f64,
    #[serde(default)]
    pub noise: NoiseSection,
    #[serde(default)]
    pub drift: DriftSection,
    #[serde(default)]
    pub scheme: SchemeSection,
}

fn beta_default() -> f64 {
    2.0
}

impl Default for KineticSection {
    fn default() -> Self {
        KineticSection {
            beta: beta_default(),
            t0: 1.0,
            v0: 1.0,
            x0: 0.0,
            noise: NoiseSection::default(),
            drift: DriftSection::default(),
            scheme: SchemeSection::default(),
        }
    }
}

impl KineticSection {
    pub fn to_core(&self) -> anyhow::Result<KineticConfig> {
        let cfg = KineticConfig {
            noise: self.noise.to_core()?,
            beta: self.beta,
            t0: self.t0,
            v0: self.v0,
            x0: self.x0,
            drift: self.drift.to_core(),
            scheme: self.scheme.to_core(),
        };
        for w in cfg.validate()? {
            eprintln!("warning: {w}");
        }
        Ok(cfg)
    }
}

/// Driving-noise model (externally tagged: `[kinetic.noise.stable]` or
/// `[kinetic.noise.triplet]`).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case", rename_all_fields = "kebab-case")]
pub enum NoiseSection {
    Stable {
        alpha: f64,
        #[serde(default = "d_one")]
        a_plus: f64,
        #[serde(default = "d_one")]
        a_minus: f64,
    },
    Triplet {
        #[serde(default)]
        gaussian: f64,
        #[serde(default)]
        drift: f64,
        #[serde(default)]
        measure: Option<MeasureSection>,
    },
}

impl Default for NoiseSection {
    fn default() -> Self {
        NoiseSection::Stable { alpha: 1.5, a_plus: 1.0, a_minus: 1.0 }
    }
}

impl NoiseSection {
    pub fn to_core(&self) -> anyhow::Result<NoiseSpec> {
        Ok(match self {
            NoiseSection::Stable { alpha, a_plus, a_minus } => {
                NoiseSpec::Stable(StableLaw::new(*alpha, *a_plus, *a_minus)?)
            }
            NoiseSection::Triplet { gaussian, drift, measure } => {
                let m = measure.as_ref().map(|m| m.to_core()).transpose()?;
                NoiseSpec::Triplet(LevyTriplet::new(*gaussian, *drift, m)?)
            }
        })
    }

    pub fn to_triplet(&self) -> anyhow::Result<LevyTriplet> {
        Ok(match self.to_core()? {
            NoiseSpec::Stable(law) => LevyTriplet::from_stable(&law)?,
            NoiseSpec::Triplet(t) => t,
        })
    }
}

/// Levy-measure spec (externally tagged).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case", rename_all_fields = "kebab-case")]
pub enum MeasureSection {
    PowerLaw {
        alpha: f64,
        g: GSection,
    },
    Truncated {
        alpha: f64,
        g: GSection,
        radius: f64,
    },
    Tempered {
        alpha: f64,
        g: GSection,
        rate: f64,
    },
    Tabulated {
        atoms: Vec<(f64, f64)>,
    },
}

impl MeasureSection {
    pub fn to_core(&self) -> anyhow::Result<LevyMeasureSpec> {
        Ok(match self {
            MeasureSection::PowerLaw { alpha, g } => {
                LevyMeasureSpec::power_law(g.to_core(), *alpha)?
            }
            MeasureSection::Truncated { alpha, g, radius } => {
                LevyMeasureSpec::truncated(g.to_core(), *alpha, *radius)?
            }
            MeasureSection::Tempered { alpha, g, rate } => {
                LevyMeasureSpec::tempered(g.to_core(), *alpha, *rate)?
            }
            MeasureSection::Tabulated { atoms } => LevyMeasureSpec::tabulated(atoms.clone())?,
        })
    }
}

/// Density factor `g` of a power-law measure.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case", rename_all_fields = "kebab-case")]
pub enum GSection {
    Constant { c: f64 },
    Step { c_plus: f64, c_minus: f64 },
    SkewBump { c: f64, amp: f64, width: f64 },
}

impl GSection {
    pub fn to_core(&self) -> GFunction {
        match *self {
            GSection::Constant { c } => GFunction::Constant { c },
            GSection::Step { c_plus, c_minus } => GFunction::Step { c_plus, c_minus },
            GSection::SkewBump { c, amp, width } => GFunction::SkewBump { c, amp, width },
        }
    }
}

/// Force field (externally tagged; unit variants are plain strings, e.g.
/// `drift = "zero"`).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case", rename_all_fields = "kebab-case")]
pub enum DriftSection {
    Homogeneous { gamma: f64, f1: f64, fm1: f64 },
    Linear { rho: f64 },
    Bounded,
    Zero,
}

impl Default for DriftSection {
    fn default() -> Self {
        DriftSection::Homogeneous { gamma: 0.5, f1: 1.0, fm1: -1.0 }
    }
}

impl DriftSection {
    pub fn to_core(&self) -> DriftSpec {
        match *self {
            DriftSection::Homogeneous { gamma, f1, fm1 } => {
                DriftSpec::Homogeneous { gamma, f1, fm1 }
            }
            DriftSection::Linear { rho } => DriftSpec::linear(rho),
            DriftSection::Bounded => DriftSpec::BoundedExample,
            DriftSection::Zero => DriftSpec::zero(),
        }
    }
}

/// Numerical-scheme settings, mirroring the solver defaults.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct SchemeSection {
    /// Maximum drift substep in log-time.
    pub max_step: f64,
    pub explosion_radius: f64,
    pub jump_cutoff: f64,
    pub gaussian_refinement: bool,
    pub tau_ladder: Vec<f64>,
}

impl Default for SchemeSection {
    fn default() -> Self {
        let s = SchemeConfig::default();
        SchemeSection {
            max_step: s.max_step,
            explosion_radius: s.explosion_radius,
            jump_cutoff: s.jump_cutoff,
            gaussian_refinement: s.gaussian_refinement,
            tau_ladder: s.tau_ladder,
        }
    }
}

impl SchemeSection {
    pub fn to_core(&self) -> SchemeConfig {
        SchemeConfig {
            max_step: self.max_step,
            explosion_radius: self.explosion_radius,
            jump_cutoff: self.jump_cutoff,
            gaussian_refinement: self.gaussian_refinement,
            tau_ladder: self.tau_ladder.clone(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct NoiseCheckSection {
    pub n_draws: usize,
    /// Increments over `dt_ratio` are compared against the `dt = 1`
    /// increments rescaled by self-similarity.
    pub dt_ratio: f64,
    /// Upper-order-statistics fraction fed to the tail-index estimator.
    pub hill_fraction: f64,
    pub ks_tol: f64,
    pub hill_tol: f64,
}

impl Default for NoiseCheckSection {
    fn default() -> Self {
        NoiseCheckSection {
            n_draws: 200_000,
            dt_ratio: 4.0,
            hill_fraction: 0.01,
            ks_tol: 0.02,
            hill_tol: 0.15,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct SimulateSection {
    pub horizon: f64,
}

impl Default for SimulateSection {
    fn default() -> Self {
        SimulateSection { horizon: 100.0 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct MomentsSection {
    pub kappa: f64,
    pub horizon: f64,
    pub n_paths: usize,
    /// Number of log-spaced checkpoints between `t0` and the horizon.
    pub n_checkpoints: usize,
    /// Allowed |fitted slope - theoretical p| for the verdict.
    pub slope_tol: f64,
}

impl Default for MomentsSection {
    fn default() -> Self {
        MomentsSection {
            kappa: 0.5,
            horizon: 1e3,
            n_paths: 2000,
            n_checkpoints: 25,
            slope_tol: 0.2,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct RescaleSection {
    /// `eps = 2^{-k}` for each listed `k` (increasing).
    pub eps_powers: Vec<u32>,
    /// Display horizon of the rescaled window `[eps t0, horizon]`.
    pub horizon: f64,
    pub n_paths: usize,
    pub q_tol: f64,
}

impl Default for RescaleSection {
    fn default() -> Self {
        RescaleSection { eps_powers: (2..=7).collect(), horizon: 1.0, n_paths: 400, q_tol: 0.2 }
    }
}

impl RescaleSection {
    pub fn eps_list(&self) -> anyhow::Result<Vec<f64>> {
        if self.eps_powers.len() < 2 || self.eps_powers.windows(2).any(|w| w[0] >= w[1]) {
            bail!("eps-powers must be at least two strictly increasing exponents");
        }
        Ok(self.eps_powers.iter().map(|k| 0.5f64.powi(*k as i32)).collect())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct ErgodicSection {
    /// Burn-in span in the autonomous time `s`.
    pub burn_in: f64,
    pub n_samples: usize,
    /// Thinning interval in `s` between retained samples.
    pub thinning: f64,
    pub ks_tol: f64,
    /// When set, also simulate the original equation to `t1/eps` and
    /// compare `eps^{1/alpha} V` against the pushforward of the invariant
    /// samples at `t1 = t1-factor * t0`.
    pub compare_eps: Option<f64>,
    pub t1_factor: f64,
    pub compare_paths: usize,
    pub compare_tol: f64,
}

impl Default for ErgodicSection {
    fn default() -> Self {
        ErgodicSection {
            burn_in: 20.0,
            n_samples: 10_000,
            thinning: 3.0,
            // The chain-half KS noise floor is ~1.36 sqrt(2/n); keep the
            // default tolerance above it.
            ks_tol: 0.04,
            compare_eps: None,
            t1_factor: 2.0,
            compare_paths: 2000,
            compare_tol: 0.05,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct TripletLimitSection {
    /// Scale at which the rescaled-triplet functionals are evaluated.
    pub eps: f64,
    /// Relative tolerance for the functional comparison (absolute for
    /// limit values at zero).
    pub tol: f64,
}

impl Default for TripletLimitSection {
    fn default() -> Self {
        TripletLimitSection { eps: 1e-6, tol: 0.01 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct MetricSection {
    /// Optional path CSV inputs (columns time,value,is_jump); when absent
    /// two solutions of the configured equation are simulated instead.
    pub path_a: Option<String>,
    pub path_b: Option<String>,
    pub horizon: f64,
    /// Truncation depth of the weighted-sup series.
    pub n_terms: usize,
    /// Search time deformations, not just the identity.
    pub lambda_search: bool,
}

impl Default for MetricSection {
    fn default() -> Self {
        MetricSection {
            path_a: None,
            path_b: None,
            horizon: 10.0,
            n_terms: 20,
            lambda_search: true,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct BrownianSection {
    pub eps_powers: Vec<u32>,
    pub horizon: f64,
    pub n_paths: usize,
    /// Variance per unit time of the added Brownian component.
    pub gaussian_coeff: f64,
    /// Required deviation(largest eps)/deviation(smallest eps) ratio.
    pub min_ratio: f64,
}

impl Default for BrownianSection {
    fn default() -> Self {
        BrownianSection {
            eps_powers: (2..=8).collect(),
            horizon: 1.0,
            n_paths: 200,
            gaussian_coeff: 1.0,
            min_ratio: 2.0,
        }
    }
}

impl BrownianSection {
    pub fn eps_list(&self) -> anyhow::Result<Vec<f64>> {
        if self.eps_powers.len() < 2 || self.eps_powers.windows(2).any(|w| w[0] >= w[1]) {
            bail!("eps-powers must be at least two strictly increasing exponents");
        }
        Ok(self.eps_powers.iter().map(|k| 0.5f64.powi(*k as i32)).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_parses_with_defaults() {
        let cfg = ExperimentConfig::from_toml("kind = \"moments\"").unwrap();
        assert_eq!(cfg.kind, ExperimentKind::Moments);
        assert_eq!(cfg.seed, 1);
        assert_eq!(cfg.moments.n_paths, 2000);
        let core = cfg.kinetic.to_core().unwrap();
        assert_eq!(core.beta, 2.0);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let err = ExperimentConfig::from_toml("kind = \"moments\"\nbogus = 1").unwrap_err();
        assert!(format!("{err:#}").contains("bogus"), "{err:#}");
        let err = ExperimentConfig::from_toml(
            "kind = \"moments\"\n[kinetic]\nbeta = 2.0\nunknown-knob = 3",
        )
        .unwrap_err();
        assert!(format!("{err:#}").contains("unknown-knob"), "{err:#}");
    }

    #[test]
    fn resolved_header_prints_every_default() {
        let cfg = ExperimentConfig::from_toml("kind = \"simulate\"").unwrap();
        let text = cfg.resolved_toml().unwrap();
        for key in ["seed", "beta", "t0", "v0", "x0", "max-step", "jump-cutoff", "horizon"] {
            assert!(text.contains(key), "missing {key} in resolved config:\n{text}");
        }
    }

    #[test]
    fn nested_noise_and_drift_round_trip() {
        let text = r#"
kind = "triplet-limit"
seed = 9

[kinetic.noise.triplet]
gaussian = 0.0
drift = 1.0

[kinetic.noise.triplet.measure.power-law]
alpha = 1.5

[kinetic.noise.triplet.measure.power-law.g.step]
c-plus = 2.0
c-minus = 1.0

[kinetic.drift.homogeneous]
gamma = 0.5
f1 = 1.0
fm1 = -1.0
"#;
        let cfg = ExperimentConfig::from_toml(text).unwrap();
        let triplet = cfg.kinetic.noise.to_triplet().unwrap();
        assert_eq!(triplet.drift, 1.0);
        let reparsed = ExperimentConfig::from_toml(&cfg.resolved_toml().unwrap()).unwrap();
        assert_eq!(reparsed.kinetic.noise.to_triplet().unwrap(), triplet);
    }
}
