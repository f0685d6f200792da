//! Path rescaling, the time-change transform with its exponential
//! specialization, sampling of the autonomous critical-line equation, and
//! the marginal pushforward map.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SkeError};
use crate::path::SamplePath;
use crate::rng::{derive_rng, StreamRole};
use crate::sde_kernel::{KineticConfig, KineticSolution, NoiseSpec};
use crate::stats;

/// An increasing C^2 substitution `phi: [0, t1) -> [t0, +inf)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TimeChange {
    /// `phi(s) = t0 + s`.
    Shift { t0: f64 },
    /// `phi(s) = t0 e^s`, the change that renders the critical-line
    /// equation autonomous.
    Exponential { t0: f64 },
}

impl TimeChange {
    pub fn t0(&self) -> f64 {
        match self {
            TimeChange::Shift { t0 } | TimeChange::Exponential { t0 } => *t0,
        }
    }

    pub fn phi(&self, s: f64) -> f64 {
        match self {
            TimeChange::Shift { t0 } => t0 + s,
            TimeChange::Exponential { t0 } => t0 * s.exp(),
        }
    }

    pub fn phi_prime(&self, s: f64) -> f64 {
        match self {
            TimeChange::Shift { .. } => 1.0,
            TimeChange::Exponential { t0 } => t0 * s.exp(),
        }
    }

    pub fn inverse(&self, t: f64) -> f64 {
        match self {
            TimeChange::Shift { t0 } => t - t0,
            TimeChange::Exponential { t0 } => (t / t0).ln(),
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            TimeChange::Shift { .. } => "shift",
            TimeChange::Exponential { .. } => "exponential",
        }
    }
}

/// Parameters of the space-time rescaling `t -> eps t`, `v -> eps^theta v`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RescaleSpec {
    pub eps: f64,
    /// Velocity exponent: `1/alpha` in the stable case, the rate exponent
    /// of the triplet limit otherwise.
    pub theta_v: f64,
}

impl RescaleSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.eps > 0.0 && self.eps <= 1.0) {
            return Err(SkeError::Input("rescaling needs eps in (0, 1]".into()));
        }
        if !self.theta_v.is_finite() {
            return Err(SkeError::Input("velocity exponent must be finite".into()));
        }
        Ok(())
    }
}

/// Rescale a single path: grid `t -> eps t`, values scaled by
/// `eps^exponent`, padded with the constant `eps^exponent * pad_base` on
/// `[0, eps * start]`.
pub fn rescale_path(path: &SamplePath, eps: f64, exponent: f64, pad_base: f64) -> Result<SamplePath> {
    let scale = eps.powf(exponent);
    let mut t: Vec<f64> = Vec::with_capacity(path.t.len() + 1);
    let mut v: Vec<f64> = Vec::with_capacity(path.t.len() + 1);
    if path.t[0] > 0.0 {
        t.push(0.0);
        v.push(scale * pad_base);
    }
    t.extend(path.t.iter().map(|x| eps * x));
    v.extend(path.v.iter().map(|x| scale * x));
    let mut out = SamplePath::new(t, v)?;
    out.exploded = path.exploded;
    out.explosion_time = path.explosion_time.map(|x| eps * x);
    Ok(out)
}

/// Rescale a kinetic solution into `(eps^theta V_{t/eps},
/// eps^{1+theta} X_{t/eps})` on `[0, horizon]`, with the constant-pad
/// convention on `[0, eps t0]`.
pub fn rescale_kinetic(
    sol: &KineticSolution,
    spec: &RescaleSpec,
    horizon: f64,
) -> Result<(SamplePath, SamplePath)> {
    spec.validate()?;
    let needed = horizon / spec.eps;
    if sol.v.end_time() + 1e-9 < needed {
        return Err(SkeError::Input(format!(
            "solution reaches t = {:.6e} but a display horizon of {horizon} at eps = {} \
             requires simulation up to t = {needed:.6e}",
            sol.v.end_time(),
            spec.eps
        )));
    }
    let v0 = sol.v.v[0];
    let x0 = sol.x.v[0];
    let v = rescale_path(&sol.v, spec.eps, spec.theta_v, v0)?;
    let x = rescale_path(&sol.x, spec.eps, 1.0 + spec.theta_v, x0)?;
    Ok((v, x))
}

/// Apply the time change: `W(s) = V(phi(s)) / phi'(s)^{1/alpha}`, on the
/// s-grid induced by the path's own time grid.
pub fn time_change_path(v: &SamplePath, tc: &TimeChange, alpha: f64) -> Result<SamplePath> {
    if !(alpha > 0.0 && alpha <= 2.0) {
        return Err(SkeError::Input("time change needs an index in (0, 2]".into()));
    }
    let t0 = tc.t0();
    if v.start_time() > t0 + 1e-12 {
        return Err(SkeError::Input(format!(
            "path starts at {} but the time change maps s = 0 to {t0}",
            v.start_time()
        )));
    }
    let mut s_grid = Vec::new();
    let mut w = Vec::new();
    for (t, val) in v.t.iter().zip(&v.v) {
        if *t < t0 {
            continue;
        }
        let s = tc.inverse(*t);
        s_grid.push(s);
        w.push(val / tc.phi_prime(s).powf(1.0 / alpha));
    }
    if s_grid.len() < 2 {
        return Err(SkeError::Input("path does not cover the image of the time change".into()));
    }
    SamplePath::new(s_grid, w)
}

/// Invert [`time_change_path`]: `V(phi(s)) = W(s) * phi'(s)^{1/alpha}`.
pub fn time_change_inverse(w: &SamplePath, tc: &TimeChange, alpha: f64) -> Result<SamplePath> {
    if !(alpha > 0.0 && alpha <= 2.0) {
        return Err(SkeError::Input("time change needs an index in (0, 2]".into()));
    }
    let t: Vec<f64> = w.t.iter().map(|s| tc.phi(*s)).collect();
    let v: Vec<f64> =
        w.t.iter().zip(&w.v).map(|(s, val)| val * tc.phi_prime(*s).powf(1.0 / alpha)).collect();
    SamplePath::new(t, v)
}

/// The full drift of the exponentially time-changed velocity equation:
/// `-v/alpha - t0^{1-1/alpha-beta} e^{(1-1/alpha-beta)s}
///  F(t0^{1/alpha} e^{s/alpha} v)`.
///
/// On the critical line `beta = 1 + (gamma-1)/alpha` with a homogeneous
/// drift the s-dependence cancels and this equals `-v/alpha - F(v)`.
pub fn transformed_drift_coefficient(s: f64, v: f64, cfg: &KineticConfig) -> Result<f64> {
    let alpha = cfg
        .noise
        .alpha()
        .ok_or_else(|| SkeError::Input("the time-changed drift needs a stability index".into()))?;
    let e = 1.0 - 1.0 / alpha - cfg.beta;
    let scale = cfg.t0.powf(e) * (e * s).exp();
    let inner = cfg.t0.powf(1.0 / alpha) * (s / alpha).exp() * v;
    Ok(-v / alpha - scale * cfg.drift.eval(inner)?)
}

/// Approximately stationary draws of the autonomous critical-line
/// equation `dH = dR - H/alpha ds - F(H) ds`.
#[derive(Debug, Clone)]
pub struct ErgodicSample {
    pub samples: Vec<f64>,
    /// Two-sample KS distance between the first and second half of the
    /// thinned chains; large values signal insufficient burn-in.
    pub ks_diagnostic: f64,
    pub warnings: Vec<String>,
}

pub fn sample_ergodic_h(
    cfg: &KineticConfig,
    burn_in: f64,
    n_samples: usize,
    thinning: f64,
    seed: u64,
) -> Result<ErgodicSample> {
    let law = match &cfg.noise {
        NoiseSpec::Stable(law) => *law,
        NoiseSpec::Triplet(_) => {
            return Err(SkeError::Input(
                "ergodic sampling of H is defined for stable driving noise".into(),
            ))
        }
    };
    let alpha = law.alpha;
    // Ergodicity margin: limsup_{|x| -> inf} (-F(x) - x/alpha)/x < 0.
    // Sign-confined drifts only help; otherwise a sublinear drift is
    // dominated by the -x/alpha restoring term.
    if !(cfg.drift.sign_ok() || cfg.drift.gamma() < 1.0) {
        return Err(SkeError::Input(
            "the drift violates the ergodicity margin of the H-equation".into(),
        ));
    }
    if !(burn_in > 0.0 && thinning > 0.0 && n_samples > 0) {
        return Err(SkeError::Input("burn-in, thinning and sample count must be positive".into()));
    }
    let ds = cfg.scheme.max_step.min(0.05);
    let n_chains = 16usize;
    let per_chain = n_samples.div_ceil(n_chains);
    let chains: Vec<Result<Vec<f64>>> = (0..n_chains as u64)
        .into_par_iter()
        .map(|c| {
            let mut rng = derive_rng(seed, c, StreamRole::Ergodic);
            let mut h = cfg.v0 / cfg.t0.powf(1.0 / alpha);
            let advance = |h: &mut f64, span: f64, rng: &mut _| -> Result<()> {
                let steps = (span / ds).ceil().max(1.0) as usize;
                let dt = span / steps as f64;
                for _ in 0..steps {
                    let drift = -*h / alpha - cfg.drift.eval(*h)?;
                    *h += dt * drift + law.sample_increment(dt, rng)?;
                }
                Ok(())
            };
            advance(&mut h, burn_in, &mut rng)?;
            let mut out = Vec::with_capacity(per_chain);
            for _ in 0..per_chain {
                advance(&mut h, thinning, &mut rng)?;
                out.push(h);
            }
            Ok(out)
        })
        .collect();

    let mut first_half = Vec::new();
    let mut second_half = Vec::new();
    let mut samples = Vec::with_capacity(n_chains * per_chain);
    for chain in chains {
        let chain = chain?;
        let mid = chain.len() / 2;
        first_half.extend_from_slice(&chain[..mid]);
        second_half.extend_from_slice(&chain[mid..]);
        samples.extend(chain);
    }
    samples.truncate(n_samples.max(samples.len().min(n_samples)));
    let ks = stats::ks_two_sample(&first_half, &second_half);
    let mut warnings = Vec::new();
    if ks > 0.05 {
        warnings.push(format!(
            "chain-half KS diagnostic {ks:.3} exceeds 0.05; consider a longer burn-in"
        ));
    }
    Ok(ErgodicSample { samples, ks_diagnostic: ks, warnings })
}

/// Pushforward by `T(u_1, ..., u_d) = (t_1^{1/alpha} u_1, ...)`: maps
/// stationary H-samples to the critical-line limit marginals.
pub fn pushforward_t(samples: &[Vec<f64>], times: &[f64], alpha: f64) -> Result<Vec<Vec<f64>>> {
    if samples.len() != times.len() {
        return Err(SkeError::Input("one sample column per time is required".into()));
    }
    if times.iter().any(|t| !(*t > 0.0)) {
        return Err(SkeError::Input("pushforward times must be positive".into()));
    }
    Ok(samples
        .iter()
        .zip(times)
        .map(|(col, t)| {
            let f = t.powf(1.0 / alpha);
            col.iter().map(|u| f * u).collect()
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::levy_noise::StableLaw;
    use crate::sde_kernel::{
        geometric_grid, integrate_explicit, integrate_ske, sample_noise, simulate, DriftSpec,
        SchemeConfig,
    };

    fn cfg_with(drift: DriftSpec, beta: f64, alpha: f64) -> KineticConfig {
        KineticConfig {
            noise: NoiseSpec::Stable(StableLaw::symmetric(alpha, 1.0).unwrap()),
            beta,
            t0: 1.0,
            v0: 1.0,
            x0: 0.0,
            drift,
            scheme: SchemeConfig::default(),
        }
    }

    #[test]
    fn rescale_identity_and_padding() {
        let cfg = cfg_with(DriftSpec::zero(), 2.0, 1.5);
        let sol = simulate(&cfg, 10.0, 3, 0).unwrap();
        let spec = RescaleSpec { eps: 1.0, theta_v: 2.0 / 3.0 };
        let (v, _) = rescale_kinetic(&sol, &spec, 10.0).unwrap();
        // Identity away from the pad point.
        assert_eq!(&v.t[1..], &sol.v.t[..]);
        assert_eq!(&v.v[1..], &sol.v.v[..]);
        assert_eq!(v.t[0], 0.0);
        assert_eq!(v.v[0], cfg.v0);

        // Padding for a genuine eps: constant eps^theta v0 on [0, eps t0].
        let spec = RescaleSpec { eps: 0.25, theta_v: 2.0 / 3.0 };
        let (v, x) = rescale_kinetic(&sol, &spec, 2.5).unwrap();
        assert_eq!(v.v[0], 0.25f64.powf(2.0 / 3.0) * cfg.v0);
        assert!((v.t[1] - 0.25).abs() < 1e-15);
        assert_eq!(v.v[0], v.value_at(0.2));
        assert_eq!(x.v[0], 0.25f64.powf(5.0 / 3.0) * cfg.x0);
    }

    #[test]
    fn rescale_composes() {
        let cfg = cfg_with(DriftSpec::zero(), 2.0, 1.5);
        let sol = simulate(&cfg, 10.0, 3, 1).unwrap();
        let th = 2.0 / 3.0;
        let one = rescale_path(&sol.v, 0.1, th, cfg.v0).unwrap();
        let two = rescale_path(&one, 0.5, th, cfg.v0).unwrap();
        let direct = rescale_path(&sol.v, 0.05, th, cfg.v0).unwrap();
        assert_eq!(two.t.len(), direct.t.len());
        for ((ta, tb), (va, vb)) in
            two.t.iter().zip(&direct.t).zip(two.v.iter().zip(&direct.v))
        {
            assert!((ta - tb).abs() < 1e-15 && (va - vb).abs() < 1e-12 * va.abs().max(1.0));
        }
    }

    #[test]
    fn rescale_requires_enough_horizon() {
        let cfg = cfg_with(DriftSpec::zero(), 2.0, 1.5);
        let sol = simulate(&cfg, 10.0, 3, 2).unwrap();
        let spec = RescaleSpec { eps: 0.01, theta_v: 2.0 / 3.0 };
        let err = rescale_kinetic(&sol, &spec, 5.0).unwrap_err();
        assert!(err.to_string().contains("5.000000e2"), "{err}");
    }

    #[test]
    fn shift_change_is_translation() {
        let p = SamplePath::new(vec![1.0, 2.0, 3.0], vec![5.0, -1.0, 2.0]).unwrap();
        let w = time_change_path(&p, &TimeChange::Shift { t0: 1.0 }, 1.5).unwrap();
        assert_eq!(w.t, vec![0.0, 1.0, 2.0]);
        assert_eq!(w.v, p.v);
    }

    #[test]
    fn exponential_change_flattens_self_similar_profile() {
        let alpha = 1.5;
        let t: Vec<f64> = (0..50).map(|i| (0.1 * i as f64).exp()).collect();
        let v: Vec<f64> = t.iter().map(|x| x.powf(1.0 / alpha)).collect();
        let p = SamplePath::new(t, v).unwrap();
        let w = time_change_path(&p, &TimeChange::Exponential { t0: 1.0 }, alpha).unwrap();
        for val in &w.v {
            assert!((val - 1.0).abs() < 1e-12, "{val}");
        }
    }

    #[test]
    fn time_change_round_trip() {
        let cfg = cfg_with(DriftSpec::zero(), 2.0, 1.5);
        let sol = simulate(&cfg, 20.0, 9, 0).unwrap();
        let tc = TimeChange::Exponential { t0: 1.0 };
        let w = time_change_path(&sol.v, &tc, 1.5).unwrap();
        let back = time_change_inverse(&w, &tc, 1.5).unwrap();
        assert_eq!(back.t.len(), sol.v.t.len());
        for (a, b) in back.v.iter().zip(&sol.v.v) {
            assert!((a - b).abs() < 1e-10 * b.abs().max(1.0));
        }
    }

    #[test]
    fn critical_line_drift_is_autonomous() {
        // beta = 1 + (gamma-1)/alpha makes the coefficient s-free and equal
        // to -v/alpha - F(v); any other beta reintroduces s-dependence.
        let (alpha, gamma) = (1.5, 0.5);
        let beta_c = 1.0 + (gamma - 1.0) / alpha;
        let drift = DriftSpec::Homogeneous { gamma, f1: 1.0, fm1: -1.0 };
        let cfg = cfg_with(drift, beta_c, alpha);
        for v in [0.4, -1.3, 2.0] {
            let a1 = transformed_drift_coefficient(0.7, v, &cfg).unwrap();
            let a2 = transformed_drift_coefficient(3.9, v, &cfg).unwrap();
            let want = -v / alpha - drift.eval(v).unwrap();
            assert!((a1 - a2).abs() < 1e-12 * a1.abs().max(1.0), "{a1} vs {a2}");
            assert!((a1 - want).abs() < 1e-12 * want.abs().max(1.0), "{a1} vs {want}");
        }
        let off = cfg_with(drift, beta_c + 0.3, alpha);
        let a1 = transformed_drift_coefficient(0.7, 1.0, &off).unwrap();
        let a2 = transformed_drift_coefficient(3.9, 1.0, &off).unwrap();
        assert!((a1 - a2).abs() > 1e-6, "coefficient should depend on s off the line");
        // F switched off: exactly -v/alpha.
        let free = cfg_with(DriftSpec::zero(), 2.0, alpha);
        let a = transformed_drift_coefficient(1.3, 0.9, &free).unwrap();
        assert!((a + 0.9 / alpha).abs() < 1e-15);
    }

    #[test]
    fn conjugacy_with_directly_integrated_autonomous_equation() {
        // Shared noise: integrating the original equation and transforming
        // must agree with integrating the time-changed equation driven by
        // the transformed increments.
        let (alpha, gamma) = (1.5, 0.5);
        let beta_c = 1.0 + (gamma - 1.0) / alpha;
        let mut cfg = cfg_with(DriftSpec::Homogeneous { gamma, f1: 1.0, fm1: -1.0 }, beta_c, alpha);
        cfg.scheme.max_step = 2e-4;
        let tc = TimeChange::Exponential { t0: cfg.t0 };
        let s_max: f64 = 1.0;
        let horizon = cfg.t0 * s_max.exp();
        let grid = geometric_grid(cfg.t0, horizon, cfg.scheme.max_step).unwrap();
        for i in 0..5 {
            let noise = sample_noise(&cfg, &grid, 31, i, false).unwrap();
            let sol = integrate_ske(&cfg, &noise, horizon).unwrap();
            let w_transformed = time_change_path(&sol.v, &tc, alpha).unwrap();

            // Transformed noise from the same increments.
            let mut s_grid = vec![0.0];
            let mut r_vals = vec![0.0];
            let mut r = 0.0;
            for w in grid.windows(2) {
                let s = tc.inverse(w[1]);
                r += (noise.value_at(w[1]) - noise.value_at(w[0]))
                    / tc.phi_prime(s).powf(1.0 / alpha);
                s_grid.push(s);
                r_vals.push(r);
            }
            let r_path = SamplePath::new(s_grid, r_vals).unwrap();
            let w_direct = integrate_explicit(
                &r_path,
                0.0,
                s_max,
                cfg.v0 / cfg.t0.powf(1.0 / alpha),
                |s, v| transformed_drift_coefficient(s, v, &cfg),
                1,
                1e8,
            )
            .unwrap();
            let sup = w_transformed.sup_abs_diff(&w_direct);
            assert!(sup < 5e-3, "path {i}: sup deviation {sup}");
        }
    }

    #[test]
    fn ou_limit_has_unit_stationary_variance() {
        // alpha = 2 with unit mass gives Brownian noise of variance t; the
        // H-equation is then OU with rate 1/2 and stationary variance 1.
        let mut cfg = cfg_with(DriftSpec::zero(), 2.0, 2.0);
        // Unit-variance noise: total tail mass 1.
        cfg.noise = NoiseSpec::Stable(StableLaw::symmetric(2.0, 0.5).unwrap());
        cfg.scheme.max_step = 0.01;
        let s = sample_ergodic_h(&cfg, 30.0, 8000, 3.0, 77).unwrap();
        let n = s.samples.len() as f64;
        let mean = s.samples.iter().sum::<f64>() / n;
        let var = s.samples.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
        assert!((var - 1.0).abs() < 0.05, "variance {var}");
        assert!(s.ks_diagnostic < 0.05, "{}", s.ks_diagnostic);
    }

    #[test]
    fn ergodic_scale_equivariance() {
        // F == 0 and noise scaled by c: stationary samples scale by c.
        let mut cfg = cfg_with(DriftSpec::zero(), 2.0, 1.5);
        cfg.scheme.max_step = 0.01;
        let base = sample_ergodic_h(&cfg, 25.0, 4000, 0.5, 101).unwrap();
        let c: f64 = 3.0;
        let mut cfg2 = cfg.clone();
        // Scale parameter sigma ~ (a+ + a-)^{1/alpha}: multiply the mass by
        // c^alpha to scale the noise by c.
        cfg2.noise = NoiseSpec::Stable(StableLaw::symmetric(1.5, c.powf(1.5)).unwrap());
        let scaled = sample_ergodic_h(&cfg2, 25.0, 4000, 0.5, 101).unwrap();
        let rescaled: Vec<f64> = scaled.samples.iter().map(|x| x / c).collect();
        let ks = stats::ks_two_sample(&base.samples, &rescaled);
        assert!(ks < 0.02, "KS after rescale: {ks}");
    }

    #[test]
    fn confining_drift_tightens_stationary_law() {
        let mut free = cfg_with(DriftSpec::zero(), 2.0, 1.5);
        free.scheme.max_step = 0.01;
        let a = sample_ergodic_h(&free, 25.0, 4000, 0.5, 55).unwrap();
        let mut pinned = free.clone();
        pinned.drift = DriftSpec::Homogeneous { gamma: 0.5, f1: 1.0, fm1: -1.0 };
        let b = sample_ergodic_h(&pinned, 25.0, 4000, 0.5, 55).unwrap();
        let mean_abs = |v: &[f64]| v.iter().map(|x| x.abs()).sum::<f64>() / v.len() as f64;
        assert!(mean_abs(&b.samples) <= mean_abs(&a.samples), "drift did not tighten the law");
    }

    #[test]
    fn repulsive_superlinear_drift_rejected() {
        let cfg = cfg_with(DriftSpec::Homogeneous { gamma: 2.0, f1: -1.0, fm1: 1.0 }, 2.0, 1.5);
        assert!(sample_ergodic_h(&cfg, 10.0, 100, 0.5, 1).is_err());
    }

    #[test]
    fn pushforward_arithmetic() {
        let cols = vec![vec![1.0, -2.0], vec![0.5, 3.0]];
        let out = pushforward_t(&cols, &[1.0, 16.0], 2.0).unwrap();
        assert_eq!(out[0], cols[0]);
        assert_eq!(out[1], vec![2.0, 12.0]);
        // Pushforward at t then rescale by eps^{1/alpha} = pushforward at eps t.
        let (t, eps, alpha): (f64, f64, f64) = (5.0, 0.2, 1.5);
        let a = pushforward_t(&[cols[0].clone()], &[t], alpha).unwrap();
        let manual: Vec<f64> = a[0].iter().map(|x| eps.powf(1.0 / alpha) * x).collect();
        let b = pushforward_t(&[cols[0].clone()], &[eps * t], alpha).unwrap();
        for (x, y) in manual.iter().zip(&b[0]) {
            assert!((x - y).abs() < 1e-12);
        }
    }
}
