//! Statistical utilities shared across the experiment suites: two-sample
//! tests, tail-index estimation, bootstrap intervals, and log-log slope
//! fits.

use rand::Rng;

use crate::error::{Result, SkeError};

/// Two-sample Kolmogorov-Smirnov statistic `sup_x |F_a(x) - F_b(x)|`.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> f64 {
    assert!(!a.is_empty() && !b.is_empty());
    let mut xs = a.to_vec();
    let mut ys = b.to_vec();
    xs.sort_unstable_by(|p, q| p.partial_cmp(q).unwrap());
    ys.sort_unstable_by(|p, q| p.partial_cmp(q).unwrap());
    let (n, m) = (xs.len() as f64, ys.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut d: f64 = 0.0;
    while i < xs.len() && j < ys.len() {
        // Consume every sample equal to the smallest remaining value on
        // both sides before comparing the empirical CDFs (tie handling).
        let v = xs[i].min(ys[j]);
        while i < xs.len() && xs[i] == v {
            i += 1;
        }
        while j < ys.len() && ys[j] == v {
            j += 1;
        }
        d = d.max((i as f64 / n - j as f64 / m).abs());
    }
    d
}

/// Hill estimator of the tail index from the `k` largest absolute values.
pub fn hill_tail_index(samples: &[f64], k: usize) -> Result<f64> {
    if k == 0 || k + 1 >= samples.len() {
        return Err(SkeError::Input(format!(
            "hill estimator needs 0 < k < n-1, got k={k}, n={}",
            samples.len()
        )));
    }
    let mut abs: Vec<f64> = samples.iter().map(|x| x.abs()).collect();
    abs.sort_unstable_by(|p, q| q.partial_cmp(p).unwrap());
    let x_k = abs[k];
    if x_k <= 0.0 {
        return Err(SkeError::Input("hill estimator hit a zero threshold".into()));
    }
    let sum_log: f64 = abs[..k].iter().map(|x| (x / x_k).ln()).sum();
    if sum_log <= 0.0 {
        return Err(SkeError::Input("hill estimator: degenerate order statistics".into()));
    }
    Ok(k as f64 / sum_log)
}

/// Percentile bootstrap confidence interval for the mean.
pub fn bootstrap_mean_ci<R: Rng>(
    samples: &[f64],
    resamples: usize,
    level: f64,
    rng: &mut R,
) -> (f64, f64, f64) {
    assert!(!samples.is_empty());
    let n = samples.len();
    let mean = samples.iter().sum::<f64>() / n as f64;
    let mut means = Vec::with_capacity(resamples);
    for _ in 0..resamples {
        let mut s = 0.0;
        for _ in 0..n {
            s += samples[rng.gen_range(0..n)];
        }
        means.push(s / n as f64);
    }
    means.sort_unstable_by(|p, q| p.partial_cmp(q).unwrap());
    let lo_q = (1.0 - level) / 2.0;
    let hi_q = 1.0 - lo_q;
    (mean, quantile_sorted(&means, lo_q), quantile_sorted(&means, hi_q))
}

/// Quantile of an already sorted slice (linear interpolation).
pub fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    assert!(!sorted.is_empty());
    let pos = q.clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    if lo == hi {
        sorted[lo]
    } else {
        let w = pos - lo as f64;
        sorted[lo] * (1.0 - w) + sorted[hi] * w
    }
}

pub fn median(samples: &[f64]) -> f64 {
    let mut v = samples.to_vec();
    v.sort_unstable_by(|p, q| p.partial_cmp(q).unwrap());
    quantile_sorted(&v, 0.5)
}

pub fn interquartile_range(samples: &[f64]) -> f64 {
    let mut v = samples.to_vec();
    v.sort_unstable_by(|p, q| p.partial_cmp(q).unwrap());
    quantile_sorted(&v, 0.75) - quantile_sorted(&v, 0.25)
}

/// Ordinary least squares of `y` on `x`.
#[derive(Debug, Clone)]
pub struct OlsFit {
    pub slope: f64,
    pub intercept: f64,
    pub stderr: f64,
    pub n: usize,
}

pub fn ols(x: &[f64], y: &[f64]) -> Result<OlsFit> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(SkeError::Input("ols: need matching inputs of length >= 2".into()));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx) * (v - mx)).sum();
    if sxx == 0.0 {
        return Err(SkeError::Input("ols: degenerate abscissae".into()));
    }
    let sxy: f64 = x.iter().zip(y).map(|(u, v)| (u - mx) * (v - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let dof = (x.len().max(3) - 2) as f64;
    let ss_res: f64 = x
        .iter()
        .zip(y)
        .map(|(u, v)| {
            let r = v - (intercept + slope * u);
            r * r
        })
        .sum();
    let stderr = (ss_res / dof / sxx).sqrt();
    Ok(OlsFit { slope, intercept, stderr, n: x.len() })
}

/// Energy distance between two multivariate samples (rows are points).
///
/// `2 E|X-Y| - E|X-X'| - E|Y-Y'|` with Euclidean norms, computed over all
/// pairs; callers should cap the sample size for large inputs.
pub fn energy_distance(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    assert!(!a.is_empty() && !b.is_empty());
    let dist = |p: &[f64], q: &[f64]| -> f64 {
        p.iter().zip(q).map(|(u, v)| (u - v) * (u - v)).sum::<f64>().sqrt()
    };
    let mean_cross = {
        let mut s = 0.0;
        for p in a {
            for q in b {
                s += dist(p, q);
            }
        }
        s / (a.len() * b.len()) as f64
    };
    let mean_within = |s: &[Vec<f64>]| -> f64 {
        if s.len() < 2 {
            return 0.0;
        }
        let mut acc = 0.0;
        for i in 0..s.len() {
            for j in (i + 1)..s.len() {
                acc += dist(&s[i], &s[j]);
            }
        }
        2.0 * acc / (s.len() * s.len()) as f64
    };
    2.0 * mean_cross - mean_within(a) - mean_within(b)
}
