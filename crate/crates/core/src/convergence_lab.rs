//! Path metrics on cadlag paths, rescaled-convergence rate experiments,
//! finite-dimensional distributional distances, and the Brownian-component
//! negligibility experiment.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SkeError};
use crate::moment_lab::{theoretical_exponent, ExponentQuery, Regime};
use crate::path::SamplePath;
use crate::rng::{derive_rng, StreamRole};
use crate::sde_kernel::{geometric_grid, integrate_ske, sample_noise, KineticConfig};
use crate::stats;

/// How hard to search for a Skorokhod time change.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LambdaSearch {
    /// Identity time change only.
    Off,
    /// Identity plus jump-aligning piecewise-linear candidates.
    CoarseGrid,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricConfig {
    /// Truncation `N` of the metric series; the dropped tail is at most
    /// `2^{-N}`.
    pub n_terms: usize,
    pub lambda_search: LambdaSearch,
}

impl Default for MetricConfig {
    fn default() -> Self {
        MetricConfig { n_terms: 20, lambda_search: LambdaSearch::CoarseGrid }
    }
}

/// The weight `k_n`: 1 on `[1/n, n]`, linear down to 0 on `(n, n+1)` and
/// on `(1/(n+1), 1/n)` (the value below `1/n` is an implementation choice
/// consistent with the `[1/(n+1), n+1]` support used by the metric
/// comparison lemma), 0 outside.
fn k_weight(n: usize, t: f64) -> f64 {
    let n_f = n as f64;
    let lo = 1.0 / (n_f + 1.0);
    let lo1 = 1.0 / n_f;
    if t <= lo || t >= n_f + 1.0 {
        0.0
    } else if t < lo1 {
        (t - lo) / (lo1 - lo)
    } else if t <= n_f {
        1.0
    } else {
        n_f + 1.0 - t
    }
}

fn check_coverage(f: &SamplePath, g: &SamplePath, cfg: &MetricConfig) -> Result<()> {
    if cfg.n_terms < 1 {
        return Err(SkeError::Input("the metric needs at least one series term".into()));
    }
    let n = cfg.n_terms as f64;
    for (name, p) in [("first", f), ("second", g)] {
        if !p.covers(1.0 / n, n) {
            return Err(SkeError::Input(format!(
                "{name} path covers [{}, {}] but the metric needs [{}, {n}]",
                p.start_time(),
                p.end_time(),
                1.0 / n
            )));
        }
    }
    Ok(())
}

/// Truncated weighted uniform metric
/// `d_u(f, g) = sum_{n<=N} 2^{-n} min(1, sup_{[1/n, n]} |f - g|)`.
pub fn uniform_metric(f: &SamplePath, g: &SamplePath, cfg: &MetricConfig) -> Result<f64> {
    check_coverage(f, g, cfg)?;
    let big_n = cfg.n_terms;
    // Breakpoints of the step function |f - g| inside the widest interval.
    let lo = 1.0 / big_n as f64;
    let hi = big_n as f64;
    let mut events: Vec<f64> = f
        .t
        .iter()
        .chain(g.t.iter())
        .copied()
        .filter(|t| *t >= lo && *t <= hi)
        .collect();
    events.sort_by(|a, b| a.partial_cmp(b).unwrap());
    events.dedup();
    let mut total = 0.0;
    for n in 1..=big_n {
        let (a, b) = (1.0 / n as f64, n as f64);
        let mut sup = (f.value_at(a) - g.value_at(a)).abs();
        for t in events.iter().filter(|t| **t >= a && **t <= b) {
            sup = sup.max((f.value_at(*t) - g.value_at(*t)).abs());
        }
        total += 0.5f64.powi(n as i32) * sup.min(1.0);
    }
    Ok(total)
}

/// A jump-aligning candidate time change: linear from the origin up to
/// `(from, to)`, unit slope afterwards.
#[derive(Debug, Clone, Copy)]
struct TimeWarp {
    from: f64,
    to: f64,
}

impl TimeWarp {
    fn identity() -> Self {
        TimeWarp { from: 1.0, to: 1.0 }
    }

    fn apply(&self, t: f64) -> f64 {
        if t <= self.from {
            t * self.to / self.from
        } else {
            self.to + (t - self.from)
        }
    }

    fn inverse(&self, x: f64) -> f64 {
        if x <= self.to {
            x * self.from / self.to
        } else {
            self.from + (x - self.to)
        }
    }

    fn log_slope(&self) -> f64 {
        (self.to / self.from).ln().abs()
    }
}

/// Jump times of a path, largest jumps first, from the recorded jumps if
/// available and from grid increments otherwise.
fn principal_jumps(p: &SamplePath, max: usize) -> Vec<f64> {
    let mut jumps: Vec<(f64, f64)> = match &p.jumps {
        Some(j) if !j.is_empty() => j.clone(),
        _ => p
            .t
            .windows(2)
            .zip(p.v.windows(2))
            .map(|(t, v)| (t[1], (v[1] - v[0]).abs()))
            .collect(),
    };
    jumps.retain(|(t, s)| *t > 0.0 && s.is_finite() && *s > 0.0);
    jumps.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap());
    jumps.truncate(max);
    jumps.into_iter().map(|(t, _)| t).collect()
}

/// Certified upper bound on the truncated Skorokhod metric: the infimum
/// over time changes is replaced by a minimum over the identity and a
/// coarse family of jump-aligning warps with log-slope at most 1, and the
/// whole bound is capped by the uniform metric (which dominates the
/// Skorokhod one).
pub fn skorokhod_upper(f: &SamplePath, g: &SamplePath, cfg: &MetricConfig) -> Result<f64> {
    check_coverage(f, g, cfg)?;
    let mut warps = vec![TimeWarp::identity()];
    if cfg.lambda_search == LambdaSearch::CoarseGrid {
        for tf in principal_jumps(f, 5) {
            for tg in principal_jumps(g, 5) {
                let w = TimeWarp { from: tg, to: tf };
                if w.log_slope() <= 1.0 {
                    warps.push(w);
                }
            }
        }
    }
    let big_n = cfg.n_terms;
    let mut total = 0.0;
    for n in 1..=big_n {
        let mut best = f64::INFINITY;
        for w in &warps {
            let lo = 1.0 / (n as f64 + 1.0);
            let hi = n as f64 + 1.0;
            // Evaluation points: breakpoints of g, pullbacks of the
            // breakpoints of f, and the kinks of k_n and of the warp.
            let mut pts: Vec<f64> = g.t.iter().copied().collect();
            pts.extend(f.t.iter().map(|t| w.inverse(*t)));
            pts.extend([lo, 1.0 / n as f64, n as f64, hi, w.from]);
            let mut sup: f64 = 0.0;
            for t in pts {
                if !(t > lo && t <= hi) {
                    continue;
                }
                for tt in [t, t - 1e-12] {
                    let d = (f.value_at(w.apply(tt)) - g.value_at(tt)).abs();
                    sup = sup.max(k_weight(n, tt) * d);
                }
            }
            best = best.min(sup.max(w.log_slope()));
        }
        total += 0.5f64.powi(n as i32) * best.min(1.0);
    }
    Ok(total.min(uniform_metric(f, g, cfg)?))
}

/// Outcome of the rescaled sup-deviation experiment.
#[derive(Debug, Clone)]
pub struct RateReport {
    pub eps_list: Vec<f64>,
    pub deviations: Vec<f64>,
    pub ci_lo: Vec<f64>,
    pub ci_hi: Vec<f64>,
    pub q_fit: f64,
    pub q_theory: f64,
    pub warnings: Vec<String>,
}

/// Monte Carlo estimate of `E sup_{eps t0 <= t <= T} |V^(eps) - L^(eps)|`
/// with shared-noise coupling, and the log-log rate fit against the
/// theoretical `q = min(beta - 1 + 1/alpha - p, 1/alpha)`.
pub fn sup_deviation_rate(
    cfg: &KineticConfig,
    eps_list: &[f64],
    horizon: f64,
    n_paths: usize,
    seed: u64,
) -> Result<RateReport> {
    cfg.validate()?;
    let alpha = cfg
        .noise
        .alpha()
        .ok_or_else(|| SkeError::Input("the rate experiment needs a stability index".into()))?;
    if eps_list.len() < 2 || eps_list.windows(2).any(|w| w[0] <= w[1]) {
        return Err(SkeError::Input("eps values must be strictly decreasing".into()));
    }
    if eps_list.iter().any(|e| !(*e > 0.0 && *e < 1.0)) {
        return Err(SkeError::Input("eps values must lie in (0, 1)".into()));
    }
    let gamma = cfg.drift.gamma();
    let mut warnings = Vec::new();
    let p = match theoretical_exponent(&ExponentQuery {
        regime: Regime::Stable,
        alpha,
        alpha0: None,
        gamma,
        kappa: gamma,
        beta: cfg.beta,
        sign_ok: cfg.drift.sign_ok(),
        b_zero: true,
    }) {
        Ok(a) => a.p,
        Err(e) => {
            warnings.push(format!("no moment-table entry ({e}); using p = gamma/alpha"));
            gamma / alpha
        }
    };
    let q_theory = (cfg.beta - 1.0 + 1.0 / alpha - p).min(1.0 / alpha);
    if cfg.beta <= 1.0 + p - 1.0 / alpha {
        warnings.push(format!(
            "beta = {} is not above the critical line {}; no convergence is claimed there",
            cfg.beta,
            1.0 + p - 1.0 / alpha
        ));
    }

    let mut deviations = Vec::new();
    let mut ci_lo = Vec::new();
    let mut ci_hi = Vec::new();
    for (k, eps) in eps_list.iter().enumerate() {
        let t_end = horizon / eps;
        let grid = geometric_grid(cfg.t0, t_end, cfg.scheme.max_step)?;
        let per_path: Vec<Result<Option<f64>>> = (0..n_paths as u64)
            .into_par_iter()
            .map(|i| {
                let noise = sample_noise(cfg, &grid, seed, i, false)?;
                let sol = integrate_ske(cfg, &noise, t_end)?;
                if sol.v.exploded {
                    return Ok(None);
                }
                let mut sup: f64 = 0.0;
                // Deviation from the noise path itself (the limit
                // candidate); the initial term |v0 - L_{t0}| is included
                // because the noise path starts at 0 at t0.
                for (t, v) in sol.v.t.iter().zip(&sol.v.v) {
                    sup = sup.max((v - noise.value_at(*t)).abs());
                }
                Ok(Some(eps.powf(1.0 / alpha) * sup))
            })
            .collect();
        let mut vals = Vec::with_capacity(n_paths);
        let mut excluded = 0usize;
        for r in per_path {
            match r? {
                Some(v) => vals.push(v),
                None => excluded += 1,
            }
        }
        if excluded as f64 > 0.01 * n_paths as f64 {
            return Err(SkeError::Numeric {
                msg: format!("{excluded}/{n_paths} paths exploded at eps = {eps}"),
                residual: excluded as f64 / n_paths as f64,
            });
        }
        let mut rng = derive_rng(seed, k as u64, StreamRole::Bootstrap);
        let (mean, lo, hi) = stats::bootstrap_mean_ci(&vals, 500, 0.95, &mut rng);
        deviations.push(mean);
        ci_lo.push(lo);
        ci_hi.push(hi);
    }

    let lx: Vec<f64> = eps_list.iter().map(|e| e.ln()).collect();
    let ly: Vec<f64> = deviations.iter().map(|d| d.ln()).collect();
    let q_fit = stats::ols(&lx, &ly)?.slope;
    Ok(RateReport { eps_list: eps_list.to_vec(), deviations, ci_lo, ci_hi, q_fit, q_theory, warnings })
}

/// Finite-dimensional distributional comparison.
#[derive(Debug, Clone)]
pub struct FddReport {
    /// `(time, KS statistic)` per marginal.
    pub per_time: Vec<(f64, f64)>,
    /// Energy distance between the joint (vector) samples, computed on a
    /// subsample of at most 2000 points per side.
    pub energy: f64,
}

pub fn fdd_distance(
    times: &[f64],
    samples_a: &[Vec<f64>],
    samples_b: &[Vec<f64>],
) -> Result<FddReport> {
    if times.len() != samples_a.len() || times.len() != samples_b.len() || times.is_empty() {
        return Err(SkeError::Input("one sample column per time label is required".into()));
    }
    let na = samples_a[0].len();
    let nb = samples_b[0].len();
    if samples_a.iter().any(|c| c.len() != na) || samples_b.iter().any(|c| c.len() != nb) {
        return Err(SkeError::Input("sample columns must have consistent lengths".into()));
    }
    if na < 1000 || nb < 1000 {
        return Err(SkeError::Input("fdd comparison needs at least 1000 samples per side".into()));
    }
    let mut per_time = Vec::with_capacity(times.len());
    for (k, t) in times.iter().enumerate() {
        per_time.push((*t, stats::ks_two_sample(&samples_a[k], &samples_b[k])));
    }
    // Joint points, deterministically thinned to a 2000-point cap.
    let make_points = |cols: &[Vec<f64>], n: usize| -> Vec<Vec<f64>> {
        let cap = 2000usize.min(n);
        let stride = n.div_ceil(cap);
        (0..n)
            .step_by(stride)
            .map(|i| cols.iter().map(|c| c[i]).collect())
            .collect()
    };
    let energy =
        stats::energy_distance(&make_points(samples_a, na), &make_points(samples_b, nb));
    Ok(FddReport { per_time, energy })
}

/// The Brownian-negligibility experiment: two solutions share the same
/// Levy noise, one of them with an extra Brownian component of variance
/// `gaussian_coeff` per unit time; reports
/// `(eps, E[sup_{eps t0 <= t <= T} (V1^(eps) - V2^(eps))^4]^{1/4})`.
pub fn brownian_negligibility(
    cfg: &KineticConfig,
    eps_list: &[f64],
    horizon: f64,
    n_paths: usize,
    gaussian_coeff: f64,
    seed: u64,
) -> Result<(Vec<(f64, f64)>, Vec<String>)> {
    cfg.validate()?;
    let alpha = cfg
        .noise
        .alpha()
        .ok_or_else(|| SkeError::Input("the experiment needs a stability index".into()))?;
    if !(gaussian_coeff >= 0.0) {
        return Err(SkeError::Input("the Brownian coefficient must be nonnegative".into()));
    }
    let mut warnings = Vec::new();
    if alpha >= 2.0 {
        warnings.push(
            "v_eps eps^{-1/2} does not vanish at index 2; negligibility is not expected".into(),
        );
    }
    let mut curve = Vec::new();
    for eps in eps_list {
        let t_end = horizon / eps;
        let grid = geometric_grid(cfg.t0, t_end, cfg.scheme.max_step)?;
        let fourth: Vec<Result<f64>> = (0..n_paths as u64)
            .into_par_iter()
            .map(|i| {
                let levy = sample_noise(cfg, &grid, seed, i, false)?;
                let mut rng = derive_rng(seed, i, StreamRole::Gaussian);
                let mut with_bm = levy.clone();
                if gaussian_coeff > 0.0 {
                    let mut w = 0.0f64;
                    for j in 1..with_bm.t.len() {
                        let dt = with_bm.t[j] - with_bm.t[j - 1];
                        let z: f64 =
                            rand_distr::Distribution::sample(&rand_distr::StandardNormal, &mut rng);
                        w += (gaussian_coeff * dt).sqrt() * z;
                        with_bm.v[j] += w;
                    }
                }
                let v1 = integrate_ske(cfg, &levy, t_end)?;
                let v2 = integrate_ske(cfg, &with_bm, t_end)?;
                let dev = eps.powf(1.0 / alpha) * v1.v.sup_abs_diff(&v2.v);
                Ok(dev.powi(4))
            })
            .collect();
        let mut acc = 0.0;
        for f in fourth {
            acc += f?;
        }
        curve.push((*eps, (acc / n_paths as f64).powf(0.25)));
    }
    Ok((curve, warnings))
}
