//! Theoretical moment-growth exponents, empirical slope recovery, and the
//! Gronwall-type bound used by the moment estimates.

use serde::{Deserialize, Serialize};

use crate::error::{Result, SkeError};
use crate::quad;
use crate::stats;

/// Which hypothesis set the noise satisfies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// Strictly stable driving noise with index `alpha`.
    Stable,
    /// Power-law jump measure with index `alpha` and a general center `b`.
    H1,
    /// Finite tail moment of order `alpha0`.
    H2,
}

/// A request for the moment exponent `p` in `E|V_t|^kappa <= C t^p`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentQuery {
    pub regime: Regime,
    pub alpha: f64,
    /// Tail-moment order; required in the `H2` regime.
    pub alpha0: Option<f64>,
    pub gamma: f64,
    pub kappa: f64,
    pub beta: f64,
    /// Whether `v F(v) >= 0` holds.
    pub sign_ok: bool,
    /// Whether the drift component of the triplet vanishes (`H1` only).
    pub b_zero: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExponentAnswer {
    pub p: f64,
    /// Rate exponent of the scaling limit (`v_eps = eps^theta`).
    pub theta: f64,
    /// Critical decay `beta* = 1 + p(gamma) - theta`, where `p(gamma)` is
    /// the exponent at `kappa = gamma` with the above-critical branch
    /// admitted; `NaN` when no branch covers `kappa = gamma`.
    pub beta_critical: f64,
    /// Human-readable label of the branch achieving the minimum.
    pub branch: String,
}

/// Collect every estimate branch applicable to the query; the admissible
/// exponent is their minimum (all are upper bounds).
///
/// `assume_above_critical` waives the `beta >= 1 + (gamma-1)/alpha`
/// requirement of the Gronwall branches; it is used when evaluating the
/// theorem tables at `kappa = gamma` to define the critical line itself.
fn candidates(q: &ExponentQuery, assume_above_critical: bool) -> Result<Vec<(f64, String)>> {
    let mut out: Vec<(f64, String)> = Vec::new();
    let (alpha, gamma, kappa, beta) = (q.alpha, q.gamma, q.kappa, q.beta);
    let above = assume_above_critical || beta >= 1.0 + (gamma - 1.0) / alpha;
    match q.regime {
        Regime::Stable | Regime::H1 => {
            if alpha == 1.0 {
                return Err(SkeError::NoBranch(
                    "no moment estimate is stated for index exactly 1".into(),
                ));
            }
            if alpha < 1.0 {
                if q.sign_ok {
                    out.push((kappa / alpha, "kappa/alpha (index < 1, sign-confined)".into()));
                }
            } else {
                // Gronwall branch: gamma in [0,1), kappa <= 1, above the
                // critical line; no sign condition.  With a nonzero mean
                // drift (H1) the bound degrades to kappa.
                if (0.0..1.0).contains(&gamma) && kappa <= 1.0 && above {
                    let (p, tag) = if q.regime == Regime::H1 && !q.b_zero {
                        (kappa, "kappa (nonzero mean, Gronwall)")
                    } else {
                        (kappa / alpha, "kappa/alpha (Gronwall)")
                    };
                    out.push((p, tag.into()));
                }
                // Below-critical refinement, stated for kappa = 1 only.
                if q.regime == Regime::Stable
                    && (0.0..1.0).contains(&gamma)
                    && kappa == 1.0
                    && !above
                {
                    out.push((
                        (1.0 - beta) / (1.0 - gamma),
                        "(1-beta)/(1-gamma) (below critical)".into(),
                    ));
                }
                if q.sign_ok {
                    if kappa <= 1.0 {
                        out.push((kappa, "kappa (sign-confined)".into()));
                    }
                    if kappa > 1.0 && kappa < alpha {
                        if (0.0..1.0).contains(&gamma) && (q.regime == Regime::Stable || q.b_zero)
                        {
                            out.push((
                                1.5 * kappa / alpha,
                                "3kappa/(2alpha) (sign-confined)".into(),
                            ));
                        }
                        out.push((
                            kappa / alpha + 0.5 * kappa,
                            "kappa/alpha + kappa/2 (sign-confined)".into(),
                        ));
                    }
                }
            }
        }
        Regime::H2 => {
            let alpha0 = q.alpha0.ok_or_else(|| {
                SkeError::Input("the finite-moment regime requires the tail order".into())
            })?;
            if (0.0..1.0).contains(&gamma) && kappa <= 1.0 {
                out.push((kappa, "kappa (finite moment)".into()));
            }
            if q.sign_ok {
                if kappa <= 1.0 {
                    out.push((kappa, "kappa (sign-confined)".into()));
                }
                out.push((
                    kappa / alpha0 + 0.5 * kappa,
                    "kappa/alpha0 + kappa/2 (sign-confined)".into(),
                ));
            }
        }
    }
    Ok(out)
}

fn best(cands: Vec<(f64, String)>) -> Option<(f64, String)> {
    cands.into_iter().min_by(|a, b| a.0.partial_cmp(&b.0).unwrap())
}

/// The moment exponent from the estimate tables, together with the rate
/// exponent `theta` and the induced critical line.
pub fn theoretical_exponent(q: &ExponentQuery) -> Result<ExponentAnswer> {
    if !(q.alpha > 0.0 && q.alpha <= 2.0) {
        return Err(SkeError::Input("index must lie in (0, 2]".into()));
    }
    if !(q.kappa >= 0.0) {
        return Err(SkeError::Input("moment order must be nonnegative".into()));
    }
    match q.regime {
        Regime::Stable | Regime::H1 => {
            if q.kappa >= q.alpha {
                return Err(SkeError::InfiniteMoment { kappa: q.kappa, alpha: q.alpha });
            }
        }
        Regime::H2 => {
            let alpha0 = q.alpha0.ok_or_else(|| {
                SkeError::Input("the finite-moment regime requires the tail order".into())
            })?;
            if q.kappa > alpha0 {
                return Err(SkeError::InfiniteMoment { kappa: q.kappa, alpha: alpha0 });
            }
        }
    }

    let theta = match q.regime {
        Regime::Stable => 1.0 / q.alpha,
        Regime::H1 => {
            if q.alpha < 1.0 || q.b_zero {
                1.0 / q.alpha
            } else {
                1.0
            }
        }
        Regime::H2 => 1.0,
    };

    let (p, branch) = best(candidates(q, false)?).ok_or_else(|| {
        SkeError::NoBranch(format!(
            "no moment estimate covers (gamma, kappa, beta) = ({}, {}, {}) with sign_ok = {}",
            q.gamma, q.kappa, q.beta, q.sign_ok
        ))
    })?;

    // Critical line: evaluate the table at kappa = gamma with the
    // above-critical branch admitted (the definition is self-consistent:
    // for the Gronwall branch it reproduces beta* = 1 + (gamma-1)/alpha).
    let mut q_gamma = *q;
    q_gamma.kappa = q.gamma;
    let beta_critical = match candidates(&q_gamma, true) {
        Ok(c) => best(c).map_or(f64::NAN, |(pg, _)| 1.0 + pg - theta),
        Err(_) => f64::NAN,
    };

    Ok(ExponentAnswer { p, theta, beta_critical, branch })
}

/// Least-squares slope of `log estimate` against `log t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    pub stderr: f64,
    pub window: (f64, f64),
    pub n_points: usize,
}

/// Default fitting window: the last decade of the horizon, where the
/// transient constants have died down.
pub fn default_window(horizon: f64) -> (f64, f64) {
    (horizon / 10.0, horizon)
}

/// Fit a growth exponent on the log-log scale over `window`.
pub fn fit_growth_exponent(
    times: &[f64],
    estimates: &[f64],
    window: (f64, f64),
) -> Result<SlopeFit> {
    if times.len() != estimates.len() {
        return Err(SkeError::Input("times and estimates must have equal length".into()));
    }
    let mut lx = Vec::new();
    let mut ly = Vec::new();
    for (t, e) in times.iter().zip(estimates) {
        if *t >= window.0 && *t <= window.1 {
            if !(*e > 0.0) {
                return Err(SkeError::Input(format!(
                    "estimate at t = {t} is not strictly positive"
                )));
            }
            lx.push(t.ln());
            ly.push(e.ln());
        }
    }
    if lx.len() < 5 {
        return Err(SkeError::Input(format!(
            "only {} points fall in the window; at least 5 are required",
            lx.len()
        )));
    }
    let fit = stats::ols(&lx, &ly)?;
    Ok(SlopeFit {
        slope: fit.slope,
        intercept: fit.intercept,
        stderr: fit.stderr,
        window,
        n_points: lx.len(),
    })
}

/// Gronwall-type bound: if `g <= a + int_{t0}^t b g^r`, then
/// `g(t) <= C_r [a(t) + ((1-r) int_{t0}^t b)^{1/(1-r)}]` with
/// `C_r = 2^{1/(1-r)}`; requires `r in [0, 1)` and `a` nondecreasing.
pub fn gronwall_bound<A: Fn(f64) -> f64, B: Fn(f64) -> f64>(
    a: A,
    b: B,
    r: f64,
    t: f64,
    t0: f64,
) -> Result<f64> {
    if !(0.0..1.0).contains(&r) {
        return Err(SkeError::Input("the exponent r must lie in [0, 1)".into()));
    }
    if !(t >= t0) {
        return Err(SkeError::Input("the bound needs t >= t0".into()));
    }
    let int_b = quad::integrate(&b, t0, t, 1e-10)?;
    if int_b < 0.0 {
        return Err(SkeError::Input("the weight b must be nonnegative on [t0, t]".into()));
    }
    let c_r = 2.0f64.powf(1.0 / (1.0 - r));
    Ok(c_r * (a(t) + ((1.0 - r) * int_b).powf(1.0 / (1.0 - r))))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn stable_q(alpha: f64, gamma: f64, kappa: f64, beta: f64, sign_ok: bool) -> ExponentQuery {
        ExponentQuery {
            regime: Regime::Stable,
            alpha,
            alpha0: None,
            gamma,
            kappa,
            beta,
            sign_ok,
            b_zero: true,
        }
    }

    #[test]
    fn heavy_index_is_kappa_over_alpha() {
        let a = theoretical_exponent(&stable_q(0.5, 2.0, 0.25, 3.0, true)).unwrap();
        assert_eq!(a.p, 0.5);
        assert_eq!(a.theta, 2.0);
    }

    #[test]
    fn superlinear_large_kappa_branch() {
        let a = theoretical_exponent(&stable_q(1.5, 1.2, 1.2, 2.0, true)).unwrap();
        assert!((a.p - 1.4).abs() < 1e-12, "{}", a.p);
    }

    #[test]
    fn theorem_table_and_critical_line() {
        let a = theoretical_exponent(&stable_q(1.5, 0.5, 0.5, 2.0, true)).unwrap();
        assert!((a.p - 1.0 / 3.0).abs() < 1e-12);
        assert!((a.beta_critical - 2.0 / 3.0).abs() < 1e-12, "{}", a.beta_critical);
    }

    #[test]
    fn full_remark_table_alpha_above_one() {
        // (gamma, kappa) -> p for alpha = 1.5, sign-confined, beta large.
        let cases = [
            (0.5, 0.7, 0.7 / 1.5),
            (0.5, 1.2, 1.5 * 1.2 / 1.5),
            (1.5, 0.7, 0.7),
            (1.5, 1.2, 1.2 / 1.5 + 0.6),
        ];
        for (g, k, want) in cases {
            let a = theoretical_exponent(&stable_q(1.5, g, k, 5.0, true)).unwrap();
            assert!((a.p - want).abs() < 1e-12, "gamma={g} kappa={k}: {} vs {want}", a.p);
        }
    }

    #[test]
    fn gronwall_branch_needs_no_sign() {
        let a = theoretical_exponent(&stable_q(1.5, 0.5, 0.5, 2.0, false)).unwrap();
        assert!((a.p - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn below_critical_branch() {
        // Critical beta for gamma = 0.3 is 1 - 0.7/1.5 = 8/15 > 0.4.
        let a = theoretical_exponent(&stable_q(1.5, 0.3, 1.0, 0.4, false)).unwrap();
        assert!((a.p - 0.6 / 0.7).abs() < 1e-12, "{}", a.p);
        assert!(a.branch.contains("below critical"), "{}", a.branch);
        // Below critical with kappa < 1 and no sign control: nothing applies.
        let err = theoretical_exponent(&stable_q(1.5, 0.3, 0.5, 0.4, false)).unwrap_err();
        assert!(matches!(err, SkeError::NoBranch(_)), "{err}");
    }

    #[test]
    fn no_branch_cases_error() {
        // gamma >= 1, kappa > 1, no sign control.
        let err = theoretical_exponent(&stable_q(1.5, 2.0, 1.2, 2.0, false)).unwrap_err();
        assert!(matches!(err, SkeError::NoBranch(_)), "{err}");
        // alpha < 1 without sign control.
        let err = theoretical_exponent(&stable_q(0.5, 2.0, 0.25, 2.0, false)).unwrap_err();
        assert!(matches!(err, SkeError::NoBranch(_)), "{err}");
        // Index exactly 1 is excluded.
        let err = theoretical_exponent(&stable_q(1.0, 0.5, 0.5, 2.0, true)).unwrap_err();
        assert!(matches!(err, SkeError::NoBranch(_)), "{err}");
        // kappa at or above alpha: infinite moment.
        let err = theoretical_exponent(&stable_q(1.5, 0.5, 1.5, 2.0, true)).unwrap_err();
        assert!(matches!(err, SkeError::InfiniteMoment { .. }), "{err}");
    }

    #[test]
    fn general_regime_mean_drift_degrades_bound() {
        let mut q = stable_q(1.5, 0.5, 0.5, 2.0, true);
        q.regime = Regime::H1;
        q.b_zero = true;
        let a = theoretical_exponent(&q).unwrap();
        assert!((a.p - 1.0 / 3.0).abs() < 1e-12);
        assert!((a.theta - 2.0 / 3.0).abs() < 1e-12);
        q.b_zero = false;
        let a = theoretical_exponent(&q).unwrap();
        assert_eq!(a.p, 0.5);
        assert_eq!(a.theta, 1.0);
    }

    #[test]
    fn finite_moment_regime_table() {
        let mut q = stable_q(1.5, 0.5, 0.5, 2.0, true);
        q.regime = Regime::H2;
        q.alpha0 = Some(2.0);
        let a = theoretical_exponent(&q).unwrap();
        // min(gamma, gamma/alpha0 + gamma/2) = min(0.5, 0.5) = 0.5.
        assert_eq!(a.p, 0.5);
        assert_eq!(a.theta, 1.0);
        assert!((a.beta_critical - 0.5).abs() < 1e-12);
        // Larger alpha0 makes the sign-confined branch win.
        q.alpha0 = Some(1.25);
        q.kappa = 1.2;
        q.gamma = 1.2;
        let a = theoretical_exponent(&q).unwrap();
        assert!((a.p - (1.2 / 1.25 + 0.6)).abs() < 1e-12);
        // Missing tail order is an input error.
        q.alpha0 = None;
        assert!(theoretical_exponent(&q).is_err());
    }

    #[test]
    fn theorem_linkage_at_kappa_gamma() {
        // p(gamma) closed form: gamma/alpha (gamma < 1), gamma (gamma = 1),
        // gamma/alpha + gamma/2 (gamma in (1, alpha)).
        for alpha in [1.3, 1.5, 1.9] {
            for gamma in [0.0, 0.4, 0.9, 1.0, 1.1] {
                if gamma >= alpha {
                    continue;
                }
                let want = if gamma < 1.0 {
                    gamma / alpha
                } else if gamma == 1.0 {
                    gamma
                } else {
                    gamma / alpha + gamma / 2.0
                };
                let a = theoretical_exponent(&stable_q(alpha, gamma, gamma, 5.0, true)).unwrap();
                assert!(
                    (a.p - want).abs() < 1e-12,
                    "alpha={alpha} gamma={gamma}: {} vs {want}",
                    a.p
                );
            }
        }
    }

    #[test]
    fn exponent_monotone_in_kappa() {
        for (gamma, sign_ok) in [(0.5, true), (0.5, false), (1.5, true)] {
            let mut prev = -1.0;
            for i in 0..28 {
                let kappa = 0.05 + i as f64 * 0.05;
                match theoretical_exponent(&stable_q(1.5, gamma, kappa, 2.0, sign_ok)) {
                    Ok(a) => {
                        assert!(a.p >= prev - 1e-12, "p dropped at kappa={kappa}");
                        prev = a.p;
                    }
                    Err(_) => continue,
                }
            }
        }
    }

    #[test]
    fn slope_fit_exact_power_and_constant() {
        let times: Vec<f64> = (1..=20).map(|i| i as f64).collect();
        let est: Vec<f64> = times.iter().map(|t| 3.0 * t.powf(0.4)).collect();
        let fit = fit_growth_exponent(&times, &est, (1.0, 20.0)).unwrap();
        assert!((fit.slope - 0.4).abs() < 1e-12, "{}", fit.slope);
        assert!((fit.intercept - 3.0f64.ln()).abs() < 1e-12);
        let flat = fit_growth_exponent(&times, &vec![2.0; 20], (1.0, 20.0)).unwrap();
        assert!(flat.slope.abs() < 1e-12);
        // Too few points in the window.
        assert!(fit_growth_exponent(&times, &est, (18.0, 20.0)).is_err());
    }

    #[test]
    fn gronwall_substitution_cases() {
        let b1 = gronwall_bound(|_| 1.0, |_| 1.0, 0.0, 1.0, 0.0).unwrap();
        assert!((b1 - 4.0).abs() < 1e-12, "{b1}");
        let b2 = gronwall_bound(|_| 0.0, |_| 2.0, 0.5, 3.0, 0.0).unwrap();
        assert!((b2 - 36.0).abs() < 1e-12, "{b2}");
        assert!(gronwall_bound(|_| 1.0, |_| 1.0, 1.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn gronwall_dominates_fixed_point() {
        // Iterate g <- a + int b g^r from g = a; the limit satisfies the
        // integral inequality with equality, so the bound must dominate.
        let (t0, t1, r) = (0.0, 3.0, 0.5);
        let a = |t: f64| 1.0 + 0.1 * t;
        let b = |_: f64| 0.5;
        let n = 3000;
        let h = (t1 - t0) / n as f64;
        let mut g: Vec<f64> = (0..=n).map(|i| a(t0 + i as f64 * h)).collect();
        for _ in 0..50 {
            let mut acc = 0.0;
            let mut next = vec![0.0; n + 1];
            next[0] = a(t0);
            for i in 1..=n {
                let ti = t0 + i as f64 * h;
                acc += 0.5 * h * (b(ti) * g[i].powf(r) + b(ti - h) * g[i - 1].powf(r));
                next[i] = a(ti) + acc;
            }
            g = next;
        }
        for i in [n / 4, n / 2, 3 * n / 4, n] {
            let t = t0 + i as f64 * h;
            let bound = gronwall_bound(a, b, r, t, t0).unwrap();
            assert!(g[i] <= bound + 1e-9, "t={t}: {} vs {bound}", g[i]);
        }
    }

    #[test]
    fn gronwall_monotone_in_t() {
        let mut prev = 0.0;
        for i in 1..=10 {
            let t = i as f64 * 0.5;
            let b = gronwall_bound(|s| 1.0 + s, |_| 0.7, 0.3, t, 0.0).unwrap();
            assert!(b >= prev);
            prev = b;
        }
    }
}
