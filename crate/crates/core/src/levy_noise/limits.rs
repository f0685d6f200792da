//! Classification of the long-time limit of a rescaled Levy process.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Result, SkeError};
use crate::levy_noise::{GFunction, LevyMeasureSpec, LevyTriplet, StableLaw};
use crate::quad;

/// Which limit regime a triplet falls into; the tags match the usual
/// five-way case split for `v_eps L_{t/eps}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LimitCase {
    /// Power-law index 1 with controlled asymmetry: strictly 1-stable
    /// limit, rate `eps`.
    OneStable,
    /// Power-law index in (1,2), controlled asymmetry, nonzero mean:
    /// deterministic drift limit, rate `eps`.
    DriftDominated,
    /// Finite tail moment of order `alpha0 > 1`, nonzero mean:
    /// deterministic drift limit, rate `eps`.
    FiniteMomentDrift,
    /// Power-law index in (0,1): strictly stable limit, rate `eps^{1/alpha}`.
    HeavyStable,
    /// Power-law index in (1,2) with zero mean: strictly stable limit,
    /// rate `eps^{1/alpha}`.
    CenteredStable,
}

impl LimitCase {
    /// Conventional roman-numeral label.
    pub fn label(self) -> &'static str {
        match self {
            LimitCase::OneStable => "(i)",
            LimitCase::DriftDominated => "(ii)",
            LimitCase::FiniteMomentDrift => "(iii)",
            LimitCase::HeavyStable => "(iv)",
            LimitCase::CenteredStable => "(v)",
        }
    }
}

impl fmt::Display for LimitCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TripletLimit {
    /// `v_eps = eps^theta` is the rescaling under which the limit holds.
    pub theta: f64,
    pub limit: LevyTriplet,
    pub case: LimitCase,
}

/// Degeneracy threshold on the limiting drift for the deterministic cases.
const DRIFT_TOL: f64 = 1e-10;

/// The asymmetry part of the limiting drift:
/// `int_1^inf (g(z) - g(-z)) z^{-1-alpha} (z - 1) dz`.
fn asymmetry_drift(g: &GFunction, alpha: f64) -> Result<f64> {
    quad::integrate_tail(
        |z| (g.eval(z) - g.eval(-z)) * (z - 1.0) / z.powf(1.0 + alpha),
        1.0,
        1e-10,
    )
}

/// Classify the limit of `(eps^theta L_{t/eps})` as `eps -> 0` and return
/// the rate exponent together with the limiting triplet.
///
/// The drift-limit cases require a nonzero limiting drift; a vanishing one
/// is reported as a degenerate limit rather than silently returning the
/// zero process.
pub fn limit_triplet(triplet: &LevyTriplet) -> Result<TripletLimit> {
    triplet.validate()?;
    let measure = match &triplet.measure {
        Some(m) => m,
        None => {
            // No jumps: the Gaussian part vanishes under eps-rescaling and
            // only the mean drift survives.
            if triplet.drift.abs() <= DRIFT_TOL {
                return Err(SkeError::DegenerateLimit(
                    "driftless continuous noise has a zero first-order limit".into(),
                ));
            }
            return Ok(TripletLimit {
                theta: 1.0,
                limit: LevyTriplet::deterministic(triplet.drift),
                case: LimitCase::FiniteMomentDrift,
            });
        }
    };

    if let Some((alpha, c_plus, c_minus)) = measure.power_limits() {
        let g = match measure {
            LevyMeasureSpec::PowerLaw(p) => p.g,
            _ => unreachable!("power limits only exist for the power-law variant"),
        };
        let stable_limit = || -> Result<LevyTriplet> {
            LevyTriplet::from_stable(&StableLaw { alpha, a_plus: c_plus, a_minus: c_minus })
        };
        if alpha < 1.0 {
            return Ok(TripletLimit {
                theta: 1.0 / alpha,
                limit: stable_limit()?,
                case: LimitCase::HeavyStable,
            });
        }
        if measure.asymmetry_controlled() {
            // For alpha > 1 this is the mean of the process:
            // b + int (z - h(z)) nu(dz) reduces to the asymmetry integral.
            let b_star = triplet.drift + asymmetry_drift(&g, alpha)?;
            if alpha == 1.0 {
                return Ok(TripletLimit {
                    theta: 1.0,
                    limit: LevyTriplet::new(
                        0.0,
                        b_star,
                        Some(LevyMeasureSpec::power_law(
                            GFunction::Step { c_plus, c_minus },
                            1.0,
                        )?),
                    )?,
                    case: LimitCase::OneStable,
                });
            }
            if b_star.abs() <= DRIFT_TOL {
                // Zero mean: the first-order drift limit degenerates and
                // the centered stable fluctuations dominate instead, at
                // the finer scale eps^{1/alpha}.
                return Ok(TripletLimit {
                    theta: 1.0 / alpha,
                    limit: stable_limit()?,
                    case: LimitCase::CenteredStable,
                });
            }
            return Ok(TripletLimit {
                theta: 1.0,
                limit: LevyTriplet::deterministic(b_star),
                case: LimitCase::DriftDominated,
            });
        }
        if alpha == 1.0 {
            return Err(SkeError::Classification(
                "power-law index 1 with uncontrolled asymmetry is outside the limit table".into(),
            ));
        }
        // alpha > 1 without asymmetry control still has a finite mean;
        // fall through to the finite-moment case.
    }

    if measure.tail_moment_index().is_some() {
        let b_star = triplet.drift
            + measure.integral(
                |z| z - crate::levy_noise::truncation(z),
                1.0,
                None,
                &[],
                1e-10,
            )?;
        if b_star.abs() <= DRIFT_TOL {
            return Err(SkeError::DegenerateLimit(format!(
                "limiting drift vanishes (b* = {b_star:.3e}); no nondegenerate drift limit"
            )));
        }
        return Ok(TripletLimit {
            theta: 1.0,
            limit: LevyTriplet::deterministic(b_star),
            case: LimitCase::FiniteMomentDrift,
        });
    }

    Err(SkeError::Classification(
        "measure satisfies neither the power-law nor the finite-moment hypothesis".into(),
    ))
}
