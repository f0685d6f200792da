//! Generating triplets `(A, b, nu)` and their rescaling.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Result, SkeError};
use crate::levy_noise::measure::{LevyMeasureSpec, MEASURE_TOL};
use crate::levy_noise::stable::StableLaw;
use crate::levy_noise::truncation;

/// Generating triplet of a Levy process, relative to the truncation
/// `h(z) = -1 v (z ^ 1)`: Gaussian variance `A >= 0`, center `b`, and an
/// optional jump measure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevyTriplet {
    pub gaussian: f64,
    pub drift: f64,
    pub measure: Option<LevyMeasureSpec>,
}

impl LevyTriplet {
    pub fn new(gaussian: f64, drift: f64, measure: Option<LevyMeasureSpec>) -> Result<Self> {
        let t = LevyTriplet { gaussian, drift, measure };
        t.validate()?;
        Ok(t)
    }

    pub fn deterministic(drift: f64) -> Self {
        LevyTriplet { gaussian: 0.0, drift, measure: None }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gaussian >= 0.0 && self.gaussian.is_finite()) {
            return Err(SkeError::Input("gaussian coefficient must be finite and >= 0".into()));
        }
        if !self.drift.is_finite() {
            return Err(SkeError::Input("triplet drift must be finite".into()));
        }
        if let Some(m) = &self.measure {
            m.validate()?;
        }
        Ok(())
    }

    /// The triplet of a strictly stable law: pure power-law measure and
    /// the center that makes the process strictly stable (zero shift for
    /// `alpha < 1`, zero mean for `alpha > 1`, symmetry at `alpha = 1`).
    pub fn from_stable(law: &StableLaw) -> Result<Self> {
        law.validate()?;
        if law.alpha == 2.0 {
            return LevyTriplet::new(law.a_plus + law.a_minus, 0.0, None);
        }
        let measure = LevyMeasureSpec::power_law(
            crate::levy_noise::GFunction::Step { c_plus: law.a_plus, c_minus: law.a_minus },
            law.alpha,
        )?;
        // b = int h dnu for alpha < 1 (no shift beyond the compensator),
        // b = -int (z - h(z)) dnu for alpha > 1 (zero mean); both evaluate
        // to (a_plus - a_minus)/(alpha (1 - alpha)) in closed form:
        // int_1^inf (z^{-alpha} - z^{-1-alpha} (z - 1) resp.) dz algebra.
        let drift = if law.alpha == 1.0 {
            0.0
        } else {
            // `+ 0.0` normalizes a signed zero for the symmetric case.
            (law.a_plus - law.a_minus) / (law.alpha * (1.0 - law.alpha)) + 0.0
        };
        LevyTriplet::new(0.0, drift, Some(measure))
    }

    /// The exact triplet of `(v L_{t/eps})_t`.
    ///
    /// `A^eps = v^2/eps A`; the measure is the dilated spec; the center is
    /// `b^eps = (v/eps)[b + int (v^{-1} h(v z) - h(z)) nu(dz)]`, with the
    /// integral evaluated by quadrature split at the kinks `1/v` and `1`.
    pub fn rescaled(&self, eps: f64, v: f64) -> Result<LevyTriplet> {
        if !(eps > 0.0 && v > 0.0) {
            return Err(SkeError::Input("rescaling needs positive eps and scale".into()));
        }
        let gaussian = v * v / eps * self.gaussian;
        let (measure, correction) = match &self.measure {
            None => (None, 0.0),
            Some(m) => {
                let corr = m.integral(
                    |z| truncation(v * z) / v - truncation(z),
                    // The integrand vanishes for |z| <= min(1, 1/v).
                    (1.0f64).min(1.0 / v),
                    None,
                    &[1.0 / v],
                    MEASURE_TOL,
                )?;
                (Some(m.dilated(eps, v)?), corr)
            }
        };
        LevyTriplet::new(gaussian, v / eps * (self.drift + correction), measure)
    }

    /// `int h(z)^2 nu(dz)` — one of the convergence functionals used to
    /// compare triplets along a rescaling limit.
    pub fn truncated_second_moment(&self) -> Result<f64> {
        match &self.measure {
            None => Ok(0.0),
            Some(m) => {
                let h = truncation;
                m.integral(|z| h(z) * h(z), 0.0, None, &[], MEASURE_TOL)
            }
        }
    }

    /// `int f dnu` for a bounded test function vanishing near zero.
    pub fn measure_integral<F: Fn(f64) -> f64>(&self, f: F, splits: &[f64]) -> Result<f64> {
        match &self.measure {
            None => Ok(0.0),
            Some(m) => m.integral(f, 0.0, None, splits, MEASURE_TOL),
        }
    }
}

impl fmt::Display for LevyTriplet {
    /// Canonical text record `(A, b, measure-spec)`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.measure {
            None => write!(f, "({}, {}, none)", self.gaussian, self.drift),
            Some(m) => write!(f, "({}, {}, {m})", self.gaussian, self.drift),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::levy_noise::GFunction;

    fn stable_triplet(alpha: f64) -> LevyTriplet {
        LevyTriplet::from_stable(&StableLaw::new(alpha, 1.0, 1.0).unwrap()).unwrap()
    }

    #[test]
    fn identity_rescaling_is_identity() {
        let t = LevyTriplet::new(
            0.5,
            -0.3,
            Some(LevyMeasureSpec::power_law(GFunction::Constant { c: 1.0 }, 1.5).unwrap()),
        )
        .unwrap();
        let r = t.rescaled(1.0, 1.0).unwrap();
        assert_eq!(t.gaussian, r.gaussian);
        assert!((t.drift - r.drift).abs() < 1e-12);
        assert_eq!(t.measure, r.measure);
    }

    #[test]
    fn gaussian_coefficient_scaling() {
        let t = LevyTriplet::new(1.0, 0.0, None).unwrap();
        for eps in [0.5, 0.1, 1e-3] {
            let r = t.rescaled(eps, eps.sqrt()).unwrap();
            assert!((r.gaussian - 1.0).abs() < 1e-12, "eps={eps}: {}", r.gaussian);
        }
    }

    #[test]
    fn symmetric_stable_rescaling_is_invariant() {
        // v = eps^{1/alpha} leaves a strictly stable triplet fixed.
        let alpha = 1.5;
        let t = stable_triplet(alpha);
        let r = t.rescaled(1e-3, 1e-3f64.powf(1.0 / alpha)).unwrap();
        assert!(r.drift.abs() < 1e-9, "{}", r.drift);
        for z in [-2.0, -0.5, 0.5, 2.0] {
            let (a, b) =
                (t.measure.as_ref().unwrap().density(z), r.measure.as_ref().unwrap().density(z));
            assert!((a - b).abs() < 1e-12 * a, "z={z}: {a} vs {b}");
        }
    }

    #[test]
    fn rescaling_composes() {
        let t = LevyTriplet::new(
            0.2,
            0.7,
            Some(
                LevyMeasureSpec::tempered(
                    GFunction::Step { c_plus: 1.0, c_minus: 2.0 },
                    1.2,
                    0.5,
                )
                .unwrap(),
            ),
        )
        .unwrap();
        let twice = t.rescaled(0.5, 0.8).unwrap().rescaled(0.25, 0.5).unwrap();
        let once = t.rescaled(0.125, 0.4).unwrap();
        assert!((twice.gaussian - once.gaussian).abs() < 1e-12);
        assert!((twice.drift - once.drift).abs() < 1e-8, "{} vs {}", twice.drift, once.drift);
        assert_eq!(twice.measure, once.measure);
    }

    #[test]
    fn strictly_stable_center_has_zero_mean() {
        // For alpha > 1 the mean of L_1 is b + int (z - h(z)) nu(dz); the
        // strictly stable center must cancel it.
        let t = LevyTriplet::from_stable(&StableLaw::new(1.5, 2.0, 0.5).unwrap()).unwrap();
        let tail = t.measure_integral(|z| z - truncation(z), &[]).unwrap();
        let mean = t.drift + tail;
        assert!(mean.abs() < 1e-7, "{mean}");
    }

    #[test]
    fn canonical_record_format() {
        let t = stable_triplet(1.5);
        let s = t.to_string();
        assert_eq!(s, "(0, 0, power_law(alpha=1.5, g=step(c_plus=1, c_minus=1)))");
    }
}
