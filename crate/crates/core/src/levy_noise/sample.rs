//! Path generation: Levy-Ito simulation from a triplet, and exact stable
//! increments.

use rand::Rng;
use rand_distr::{Distribution, Normal, Poisson};

use crate::error::{Result, SkeError};
use crate::levy_noise::measure::MEASURE_TOL;
use crate::levy_noise::{truncation, LevyTriplet, StableLaw};
use crate::path::SamplePath;

#[derive(Debug, Clone, Copy)]
pub struct LevyPathOptions {
    /// Jumps with `|z| >= jump_cutoff` are simulated exactly; smaller ones
    /// are folded into the compensator drift (and optionally a Gaussian).
    pub jump_cutoff: f64,
    /// Replace the discarded small jumps by a Brownian motion with the
    /// matching variance `int_{|z|<delta} z^2 nu(dz)`.
    pub gaussian_refinement: bool,
    /// Keep the `(time, size)` record of simulated jumps.
    pub record_jumps: bool,
    /// Upper bound on the expected jump count; exceeding it is a resource
    /// error rather than a silent multi-gigabyte allocation.
    pub max_expected_jumps: f64,
}

impl Default for LevyPathOptions {
    fn default() -> Self {
        LevyPathOptions {
            jump_cutoff: 1e-3,
            gaussian_refinement: false,
            record_jumps: false,
            max_expected_jumps: 1e8,
        }
    }
}

/// Simulate the Levy process of `triplet` on `grid` by the Levy-Ito
/// decomposition: drift + Brownian part + compound-Poisson jumps above the
/// cutoff, compensated on `delta <= |z| < 1`.
///
/// The path starts at 0 at `grid[0]`.  Jump times beyond the grid
/// resolution are applied exactly; values are recorded at grid points
/// (right-continuously, so a jump at a grid time is included).
pub fn sample_levy_path<R: Rng + ?Sized>(
    triplet: &LevyTriplet,
    grid: &[f64],
    opts: &LevyPathOptions,
    rng_noise: &mut R,
    rng_gauss: &mut R,
) -> Result<SamplePath> {
    triplet.validate()?;
    if grid.len() < 2 || grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(SkeError::Input("noise grid must be strictly increasing, len >= 2".into()));
    }
    let delta = opts.jump_cutoff;
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(SkeError::Input("jump cutoff must lie in (0, 1]".into()));
    }
    let (t_start, t_end) = (grid[0], *grid.last().unwrap());
    let span = t_end - t_start;

    // Intensity of jumps above the cutoff and the effective drift: the
    // compensator of jumps in [delta, 1) moves into the drift since those
    // jumps are now simulated uncompensated.
    let (rate, drift_eff, sigma_small) = match &triplet.measure {
        None => (0.0, triplet.drift, 0.0),
        Some(m) => {
            let rate = m.tail_mass(delta)?;
            let comp = m.integral(truncation, delta, None, &[], MEASURE_TOL)?;
            let sig = if opts.gaussian_refinement { m.small_jump_variance(delta)? } else { 0.0 };
            (rate, triplet.drift - comp, sig)
        }
    };
    let expected = rate * span;
    if expected > opts.max_expected_jumps {
        return Err(SkeError::Resource(format!(
            "expected jump count {expected:.3e} exceeds the budget {:.3e}; raise the cutoff",
            opts.max_expected_jumps
        )));
    }

    // Jump times: Poisson count, then uniform order statistics.
    let mut jumps: Vec<(f64, f64)> = Vec::new();
    if rate > 0.0 {
        let count = Poisson::new(expected.max(f64::MIN_POSITIVE))
            .map_err(|e| SkeError::Input(format!("poisson: {e}")))?
            .sample(rng_noise) as usize;
        let measure = triplet.measure.as_ref().unwrap();
        jumps.reserve(count);
        for _ in 0..count {
            let t = t_start + span * rng_noise.gen::<f64>();
            let z = measure.sample_jump(delta, rng_noise)?;
            jumps.push((t, z));
        }
        jumps.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    }

    let var_unit = triplet.gaussian + sigma_small;
    let normal = Normal::new(0.0, 1.0).unwrap();

    let mut values = Vec::with_capacity(grid.len());
    values.push(0.0);
    let mut level = 0.0;
    let mut ji = 0usize;
    let mut prev_t = t_start;
    for &t in &grid[1..] {
        // Jumps with time in (prev_t, t] belong to this increment.
        while ji < jumps.len() && jumps[ji].0 <= t {
            if jumps[ji].0 > prev_t {
                level += jumps[ji].1;
            }
            ji += 1;
        }
        let dt = t - prev_t;
        level += drift_eff * dt;
        if var_unit > 0.0 {
            level += (var_unit * dt).sqrt() * normal.sample(rng_gauss);
        }
        values.push(level);
        prev_t = t;
    }

    let mut path = SamplePath::new(grid.to_vec(), values)?;
    if opts.record_jumps {
        path.jumps = Some(jumps);
    }
    Ok(path)
}

/// Simulate a strictly stable process on `grid` (starting at 0) with exact
/// increments — no cutoff error, O(1) work per grid point.
pub fn sample_stable_path<R: Rng + ?Sized>(
    law: &StableLaw,
    grid: &[f64],
    rng: &mut R,
) -> Result<SamplePath> {
    if grid.len() < 2 || grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(SkeError::Input("noise grid must be strictly increasing, len >= 2".into()));
    }
    let mut values = Vec::with_capacity(grid.len());
    values.push(0.0);
    let mut level = 0.0;
    for w in grid.windows(2) {
        level += law.sample_increment(w[1] - w[0], rng)?;
        values.push(level);
    }
    SamplePath::new(grid.to_vec(), values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::levy_noise::{GFunction, LevyMeasureSpec};
    use crate::rng::{derive_rng, StreamRole};

    fn grid(a: f64, b: f64, n: usize) -> Vec<f64> {
        (0..=n).map(|i| a + (b - a) * i as f64 / n as f64).collect()
    }

    #[test]
    fn pure_drift_is_linear() {
        let t = LevyTriplet::deterministic(2.0);
        let mut r1 = derive_rng(1, 0, StreamRole::Noise);
        let mut r2 = derive_rng(1, 0, StreamRole::Gaussian);
        let g = grid(0.0, 3.0, 7);
        let p =
            sample_levy_path(&t, &g, &LevyPathOptions::default(), &mut r1, &mut r2).unwrap();
        for (ti, vi) in p.t.iter().zip(&p.v) {
            assert!((vi - 2.0 * ti).abs() < 1e-12, "t={ti} v={vi}");
        }
    }

    #[test]
    fn brownian_variance() {
        let t = LevyTriplet::new(1.0, 0.0, None).unwrap();
        let g = grid(0.0, 1.0, 4);
        let opts = LevyPathOptions::default();
        let mut acc = 0.0;
        let n = 100_000;
        for i in 0..n {
            let mut r1 = derive_rng(2, i, StreamRole::Noise);
            let mut r2 = derive_rng(2, i, StreamRole::Gaussian);
            let p = sample_levy_path(&t, &g, &opts, &mut r1, &mut r2).unwrap();
            let x = *p.v.last().unwrap();
            acc += x * x;
        }
        let var = acc / n as f64;
        assert!((var - 1.0).abs() < 0.03, "{var}");
    }

    #[test]
    fn large_jump_count_matches_intensity() {
        // g == 1, alpha = 0.5: nu(|z| >= 1) = 2/alpha = 4.
        let m = LevyMeasureSpec::power_law(GFunction::Constant { c: 1.0 }, 0.5).unwrap();
        let t = LevyTriplet::new(0.0, 0.0, Some(m)).unwrap();
        let opts = LevyPathOptions { record_jumps: true, jump_cutoff: 1.0, ..Default::default() };
        let g = grid(0.0, 2.0, 10);
        let n = 20_000;
        let mut total = 0usize;
        for i in 0..n {
            let mut r1 = derive_rng(3, i, StreamRole::Noise);
            let mut r2 = derive_rng(3, i, StreamRole::Gaussian);
            let p = sample_levy_path(&t, &g, &opts, &mut r1, &mut r2).unwrap();
            total += p.jumps.as_ref().unwrap().len();
        }
        let mean = total as f64 / n as f64;
        let want = 2.0 * 4.0; // horizon * intensity
        let sigma = (want / n as f64).sqrt();
        assert!((mean - want).abs() < 3.0 * sigma, "mean {mean}, want {want} +- {sigma}");
    }

    #[test]
    fn budget_violation_is_a_resource_error() {
        let m = LevyMeasureSpec::power_law(GFunction::Constant { c: 1.0 }, 1.5).unwrap();
        let t = LevyTriplet::new(0.0, 0.0, Some(m)).unwrap();
        let opts = LevyPathOptions {
            jump_cutoff: 1e-3,
            max_expected_jumps: 10.0,
            ..Default::default()
        };
        let mut r1 = derive_rng(4, 0, StreamRole::Noise);
        let mut r2 = derive_rng(4, 0, StreamRole::Gaussian);
        let err =
            sample_levy_path(&t, &grid(0.0, 1.0, 2), &opts, &mut r1, &mut r2).unwrap_err();
        assert!(matches!(err, SkeError::Resource(_)), "{err}");
    }

    #[test]
    fn triplet_route_agrees_with_exact_stable_sampling() {
        // Marginal of L_1 via Levy-Ito against the closed-form stable
        // sampler: same law up to cutoff error.
        let law = StableLaw::new(1.5, 1.0, 1.0).unwrap();
        let triplet = LevyTriplet::from_stable(&law).unwrap();
        let opts = LevyPathOptions {
            jump_cutoff: 0.05,
            gaussian_refinement: true,
            ..Default::default()
        };
        let g = grid(0.0, 1.0, 2);
        let n = 20_000;
        let mut via_triplet = Vec::with_capacity(n);
        let mut via_stable = Vec::with_capacity(n);
        for i in 0..n {
            let mut r1 = derive_rng(5, i as u64, StreamRole::Noise);
            let mut r2 = derive_rng(5, i as u64, StreamRole::Gaussian);
            let p = sample_levy_path(&triplet, &g, &opts, &mut r1, &mut r2).unwrap();
            via_triplet.push(*p.v.last().unwrap());
            let mut r3 = derive_rng(6, i as u64, StreamRole::Noise);
            via_stable.push(law.sample_increment(1.0, &mut r3).unwrap());
        }
        let d = crate::stats::ks_two_sample(&via_triplet, &via_stable);
        assert!(d < 0.025, "ks {d}");
    }
}
