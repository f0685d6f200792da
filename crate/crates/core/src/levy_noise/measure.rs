//! Declarative Levy-measure specifications.
//!
//! Every measure is closed under the dilation `nu^eps(B) = eps^{-1}
//! nu(v^{-1} B)` used by the triplet rescaling, so rescaled measures stay
//! in the same family and their densities are exact rather than sampled.

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SkeError};
use crate::quad;

/// Relative tolerance for all measure integrals (drifts, variances).
pub const MEASURE_TOL: f64 = 1e-8;

/// Max of `|x e^{-x^2}|`, attained at `x = 1/sqrt(2)`.
const BUMP_PEAK: f64 = 0.428_881_942_480_353_1;

/// Slowly varying density factor `g` of a power-law Levy measure
/// `g(z)/|z|^{1+alpha} dz`, with declared limits at both infinities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GFunction {
    /// `g == c`.
    Constant { c: f64 },
    /// `g = c_plus` on `z > 0`, `c_minus` on `z < 0`.
    Step { c_plus: f64, c_minus: f64 },
    /// `g(z) = c + amp (z/width) e^{-(z/width)^2}` — a smooth, localized
    /// skew on top of a symmetric level, vanishing asymmetry at infinity.
    SkewBump { c: f64, amp: f64, width: f64 },
}

impl GFunction {
    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            GFunction::Constant { c } => c > 0.0,
            GFunction::Step { c_plus, c_minus } => {
                c_plus >= 0.0 && c_minus >= 0.0 && c_plus + c_minus > 0.0
            }
            GFunction::SkewBump { c, amp, width } => {
                c > 0.0 && width > 0.0 && c - amp.abs() * BUMP_PEAK >= 0.0
            }
        };
        if ok {
            Ok(())
        } else {
            Err(SkeError::Input(format!("density factor is not a nonnegative profile: {self}")))
        }
    }

    pub fn eval(&self, z: f64) -> f64 {
        match *self {
            GFunction::Constant { c } => c,
            GFunction::Step { c_plus, c_minus } => {
                if z > 0.0 {
                    c_plus
                } else {
                    c_minus
                }
            }
            GFunction::SkewBump { c, amp, width } => {
                let x = z / width;
                c + amp * x * (-x * x).exp()
            }
        }
    }

    pub fn limit_plus(&self) -> f64 {
        match *self {
            GFunction::Constant { c } => c,
            GFunction::Step { c_plus, .. } => c_plus,
            GFunction::SkewBump { c, .. } => c,
        }
    }

    pub fn limit_minus(&self) -> f64 {
        match *self {
            GFunction::Constant { c } => c,
            GFunction::Step { c_minus, .. } => c_minus,
            GFunction::SkewBump { c, .. } => c,
        }
    }

    /// A pointwise upper bound, used as a rejection-sampling envelope.
    pub fn upper_bound(&self) -> f64 {
        match *self {
            GFunction::Constant { c } => c,
            GFunction::Step { c_plus, c_minus } => c_plus.max(c_minus),
            GFunction::SkewBump { c, amp, .. } => c + amp.abs() * BUMP_PEAK,
        }
    }

    /// Multiply the profile by `k > 0`.
    pub fn scaled(&self, k: f64) -> GFunction {
        match *self {
            GFunction::Constant { c } => GFunction::Constant { c: k * c },
            GFunction::Step { c_plus, c_minus } => {
                GFunction::Step { c_plus: k * c_plus, c_minus: k * c_minus }
            }
            GFunction::SkewBump { c, amp, width } => {
                GFunction::SkewBump { c: k * c, amp: k * amp, width }
            }
        }
    }

    /// The profile `z -> g(z/v)` for `v > 0`.
    pub fn dilated(&self, v: f64) -> GFunction {
        match *self {
            GFunction::SkewBump { c, amp, width } => {
                GFunction::SkewBump { c, amp, width: width * v }
            }
            other => other,
        }
    }

    /// Whether `z -> (g(z) - g(-z)) z^{-alpha}` is integrable on `[1, inf)`
    /// — the asymmetry-control hypothesis behind the 1-stable limit drifts.
    pub fn asymmetry_integrable(&self, alpha: f64) -> bool {
        match *self {
            GFunction::Constant { .. } => true,
            // Constant asymmetry decays only like z^{-alpha}.
            GFunction::Step { c_plus, c_minus } => c_plus == c_minus || alpha > 1.0,
            GFunction::SkewBump { .. } => true,
        }
    }
}

impl fmt::Display for GFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            GFunction::Constant { c } => write!(f, "const(c={c})"),
            GFunction::Step { c_plus, c_minus } => {
                write!(f, "step(c_plus={c_plus}, c_minus={c_minus})")
            }
            GFunction::SkewBump { c, amp, width } => {
                write!(f, "skew_bump(c={c}, amp={amp}, width={width})")
            }
        }
    }
}

/// Density `g(z)/|z|^{1+alpha}` on the punctured line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerLawSpec {
    pub g: GFunction,
    pub alpha: f64,
}

impl PowerLawSpec {
    pub fn validate(&self) -> Result<()> {
        self.g.validate()?;
        if !(self.alpha > 0.0 && self.alpha < 2.0) {
            return Err(SkeError::Input(format!(
                "power-law measure index must lie in (0, 2), got {}",
                self.alpha
            )));
        }
        Ok(())
    }

    pub fn density(&self, z: f64) -> f64 {
        if z == 0.0 {
            return 0.0;
        }
        self.g.eval(z) / z.abs().powf(1.0 + self.alpha)
    }
}

impl fmt::Display for PowerLawSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "power_law(alpha={}, g={})", self.alpha, self.g)
    }
}

/// A Levy measure given in closed form.
///
/// `Truncated` and `Tempered` carry a declared moment index `alpha0 > 1`
/// for which `int_{|z|>=1} |z|^{alpha0} nu(dz)` is finite; the integral is
/// evaluated at construction as a consistency check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LevyMeasureSpec {
    PowerLaw(PowerLawSpec),
    Truncated { base: PowerLawSpec, radius: f64, alpha0: f64 },
    Tempered { base: PowerLawSpec, rate: f64, alpha0: f64 },
    /// Finite list of `(position, mass)` atoms.
    Tabulated { atoms: Vec<(f64, f64)> },
}

impl LevyMeasureSpec {
    pub fn power_law(g: GFunction, alpha: f64) -> Result<Self> {
        let spec = LevyMeasureSpec::PowerLaw(PowerLawSpec { g, alpha });
        spec.validate()?;
        Ok(spec)
    }

    pub fn truncated(g: GFunction, alpha: f64, radius: f64) -> Result<Self> {
        let spec = LevyMeasureSpec::Truncated {
            base: PowerLawSpec { g, alpha },
            radius,
            alpha0: 2.0,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn tempered(g: GFunction, alpha: f64, rate: f64) -> Result<Self> {
        let spec =
            LevyMeasureSpec::Tempered { base: PowerLawSpec { g, alpha }, rate, alpha0: 2.0 };
        spec.validate()?;
        Ok(spec)
    }

    pub fn tabulated(atoms: Vec<(f64, f64)>) -> Result<Self> {
        let spec = LevyMeasureSpec::Tabulated { atoms };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            LevyMeasureSpec::PowerLaw(p) => p.validate(),
            LevyMeasureSpec::Truncated { base, radius, alpha0 } => {
                base.validate()?;
                if !(*radius > 0.0) {
                    return Err(SkeError::Input("truncation radius must be positive".into()));
                }
                self.check_declared_moment(*alpha0)
            }
            LevyMeasureSpec::Tempered { base, rate, alpha0 } => {
                base.validate()?;
                if !(*rate > 0.0) {
                    return Err(SkeError::Input("tempering rate must be positive".into()));
                }
                self.check_declared_moment(*alpha0)
            }
            LevyMeasureSpec::Tabulated { atoms } => {
                if atoms.is_empty() {
                    return Err(SkeError::Input("tabulated measure needs at least one atom".into()));
                }
                if atoms.iter().any(|(z, m)| *z == 0.0 || !z.is_finite() || !(*m > 0.0)) {
                    return Err(SkeError::Input(
                        "tabulated atoms need nonzero finite positions and positive masses".into(),
                    ));
                }
                Ok(())
            }
        }
    }

    fn check_declared_moment(&self, alpha0: f64) -> Result<()> {
        if !(alpha0 > 1.0 && alpha0 <= 2.0) {
            return Err(SkeError::Input(format!(
                "declared moment index must lie in (1, 2], got {alpha0}"
            )));
        }
        let moment = self.integral(|z| z.abs().powf(alpha0), 1.0, None, &[], 1e-6)?;
        if !moment.is_finite() {
            return Err(SkeError::Numeric {
                msg: format!("declared tail moment of order {alpha0} is not finite"),
                residual: f64::INFINITY,
            });
        }
        Ok(())
    }

    /// Density of the absolutely continuous variants (zero for atoms; use
    /// [`LevyMeasureSpec::atoms`] there).
    pub fn density(&self, z: f64) -> f64 {
        if z == 0.0 {
            return 0.0;
        }
        match self {
            LevyMeasureSpec::PowerLaw(p) => p.density(z),
            LevyMeasureSpec::Truncated { base, radius, .. } => {
                if z.abs() <= *radius {
                    base.density(z)
                } else {
                    0.0
                }
            }
            LevyMeasureSpec::Tempered { base, rate, .. } => {
                base.density(z) * (-rate * z.abs()).exp()
            }
            LevyMeasureSpec::Tabulated { .. } => 0.0,
        }
    }

    pub fn atoms(&self) -> Option<&[(f64, f64)]> {
        match self {
            LevyMeasureSpec::Tabulated { atoms } => Some(atoms),
            _ => None,
        }
    }

    /// `int f(z) nu(dz)` over the band `{lo <= |z| < hi}` (`hi = None`
    /// meaning infinity).  `f` takes signed arguments; with `lo = 0` it
    /// must vanish fast enough at the origin for the integral to exist.
    /// `extra_splits` are additional positive abscissae at which the
    /// integrand is allowed to be non-smooth.
    pub fn integral<F: Fn(f64) -> f64>(
        &self,
        f: F,
        lo: f64,
        hi: Option<f64>,
        extra_splits: &[f64],
        rel_tol: f64,
    ) -> Result<f64> {
        if lo < 0.0 || hi.map_or(false, |h| h <= lo) {
            return Err(SkeError::Input("measure integral: bad band".into()));
        }
        if let Some(atoms) = self.atoms() {
            return Ok(atoms
                .iter()
                .filter(|(z, _)| z.abs() >= lo && hi.map_or(true, |h| z.abs() < h))
                .map(|(z, m)| f(*z) * m)
                .sum());
        }
        // Absolutely continuous: integrate each side of the band, split at
        // the declared breakpoints.
        let mut cut = hi;
        if let LevyMeasureSpec::Truncated { radius, .. } = self {
            // Density vanishes beyond the radius.
            cut = Some(cut.map_or(*radius, |h| h.min(*radius)));
            if cut.unwrap() <= lo {
                return Ok(0.0);
            }
        }
        let mut splits: Vec<f64> = vec![1.0];
        splits.extend_from_slice(extra_splits);
        splits.retain(|s| *s > lo && cut.map_or(true, |h| *s < h) && s.is_finite());
        splits.sort_by(|a, b| a.partial_cmp(b).unwrap());
        splits.dedup();

        let mut total = 0.0;
        for sign in [1.0f64, -1.0] {
            let integrand = |x: f64| f(sign * x) * self.density(sign * x);
            let mut left = lo;
            for s in &splits {
                total += quad::integrate(integrand, left, *s, rel_tol)?;
                left = *s;
            }
            match cut {
                Some(h) => total += quad::integrate(integrand, left, h, rel_tol)?,
                // `splits` always contains 1.0 when lo < 1, so `left > 0`.
                None => total += quad::integrate_tail(integrand, left, rel_tol)?,
            }
        }
        Ok(total)
    }

    /// `nu({|z| >= delta})` — the jump intensity above the cutoff.
    pub fn tail_mass(&self, delta: f64) -> Result<f64> {
        self.integral(|_| 1.0, delta, None, &[], MEASURE_TOL)
    }

    /// `int_{|z| < delta} z^2 nu(dz)` — variance of the small jumps.
    pub fn small_jump_variance(&self, delta: f64) -> Result<f64> {
        self.integral(|z| z * z, 0.0, Some(delta), &[], MEASURE_TOL)
    }

    /// Draw one jump from the normalized restriction to `{|z| >= delta}`.
    pub fn sample_jump<R: Rng + ?Sized>(&self, delta: f64, rng: &mut R) -> Result<f64> {
        if let Some(atoms) = self.atoms() {
            let eligible: Vec<(f64, f64)> =
                atoms.iter().copied().filter(|(z, _)| z.abs() >= delta).collect();
            let mass: f64 = eligible.iter().map(|(_, m)| m).sum();
            if mass <= 0.0 {
                return Err(SkeError::Input("no atom mass above the jump cutoff".into()));
            }
            let mut u = rng.gen::<f64>() * mass;
            for (z, m) in &eligible {
                u -= m;
                if u <= 0.0 {
                    return Ok(*z);
                }
            }
            return Ok(eligible.last().unwrap().0);
        }
        let (base, keep): (&PowerLawSpec, Box<dyn Fn(f64) -> f64>) = match self {
            LevyMeasureSpec::PowerLaw(p) => (p, Box::new(|_| 1.0)),
            LevyMeasureSpec::Truncated { base, radius, .. } => {
                if delta > *radius {
                    return Err(SkeError::Input(
                        "jump cutoff exceeds the truncation radius".into(),
                    ));
                }
                let r = *radius;
                (base, Box::new(move |z: f64| if z.abs() <= r { 1.0 } else { 0.0 }))
            }
            LevyMeasureSpec::Tempered { base, rate, .. } => {
                let (r, d) = (*rate, delta);
                (base, Box::new(move |z: f64| (-r * (z.abs() - d)).exp()))
            }
            LevyMeasureSpec::Tabulated { .. } => unreachable!(),
        };
        // Envelope: two-sided Pareto tail with the constant profile bound.
        let env = base.g.upper_bound();
        for _ in 0..100_000 {
            let side = if rng.gen::<f64>() < 0.5 { 1.0 } else { -1.0 };
            let z = side * delta * (1.0 - rng.gen::<f64>()).powf(-1.0 / base.alpha);
            let accept = base.g.eval(z) / env * keep(z);
            if rng.gen::<f64>() < accept {
                return Ok(z);
            }
        }
        Err(SkeError::Numeric {
            msg: "jump rejection sampling exhausted its retry budget".into(),
            residual: f64::NAN,
        })
    }

    /// The pushforward measure `B -> eps^{-1} nu({z : v z in B})`, i.e. the
    /// jump measure of `v L_{t/eps}`; density `z -> eps^{-1} v^{-1}
    /// nu-density(z/v)`.
    pub fn dilated(&self, eps: f64, v: f64) -> Result<LevyMeasureSpec> {
        if !(eps > 0.0 && v > 0.0) {
            return Err(SkeError::Input("dilation needs positive eps and scale".into()));
        }
        Ok(match self {
            LevyMeasureSpec::PowerLaw(p) => {
                // eps^{-1} v^{-1} g(z/v) (|z|/v)^{-1-alpha} =
                // (v^alpha/eps) g(z/v) |z|^{-1-alpha}.
                let k = v.powf(p.alpha) / eps;
                LevyMeasureSpec::PowerLaw(PowerLawSpec {
                    g: p.g.dilated(v).scaled(k),
                    alpha: p.alpha,
                })
            }
            LevyMeasureSpec::Truncated { base, radius, alpha0 } => {
                let k = v.powf(base.alpha) / eps;
                LevyMeasureSpec::Truncated {
                    base: PowerLawSpec { g: base.g.dilated(v).scaled(k), alpha: base.alpha },
                    radius: radius * v,
                    alpha0: *alpha0,
                }
            }
            LevyMeasureSpec::Tempered { base, rate, alpha0 } => {
                let k = v.powf(base.alpha) / eps;
                LevyMeasureSpec::Tempered {
                    base: PowerLawSpec { g: base.g.dilated(v).scaled(k), alpha: base.alpha },
                    rate: rate / v,
                    alpha0: *alpha0,
                }
            }
            LevyMeasureSpec::Tabulated { atoms } => LevyMeasureSpec::Tabulated {
                atoms: atoms.iter().map(|(z, m)| (z * v, m / eps)).collect(),
            },
        })
    }

    /// Power-law limits `(alpha, c_plus, c_minus)` when both exist and are
    /// positive.
    pub fn power_limits(&self) -> Option<(f64, f64, f64)> {
        match self {
            LevyMeasureSpec::PowerLaw(p) => {
                let (cp, cm) = (p.g.limit_plus(), p.g.limit_minus());
                (cp > 0.0 && cm > 0.0).then_some((p.alpha, cp, cm))
            }
            _ => None,
        }
    }

    /// A moment index `alpha0 in (1, 2]` with finite tail moment, if one
    /// is available.
    pub fn tail_moment_index(&self) -> Option<f64> {
        match self {
            LevyMeasureSpec::PowerLaw(p) => (p.alpha > 1.0).then(|| 0.5 * (1.0 + p.alpha)),
            LevyMeasureSpec::Truncated { alpha0, .. }
            | LevyMeasureSpec::Tempered { alpha0, .. } => Some(*alpha0),
            LevyMeasureSpec::Tabulated { .. } => Some(2.0),
        }
    }

    /// Whether the asymmetry-control hypothesis behind the 1-stable limit
    /// drift holds (trivially true off the power-law family).
    pub fn asymmetry_controlled(&self) -> bool {
        match self {
            LevyMeasureSpec::PowerLaw(p) => p.g.asymmetry_integrable(p.alpha),
            _ => true,
        }
    }
}

impl fmt::Display for LevyMeasureSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LevyMeasureSpec::PowerLaw(p) => write!(f, "{p}"),
            LevyMeasureSpec::Truncated { base, radius, alpha0 } => {
                write!(f, "truncated({base}, radius={radius}, alpha0={alpha0})")
            }
            LevyMeasureSpec::Tempered { base, rate, alpha0 } => {
                write!(f, "tempered({base}, rate={rate}, alpha0={alpha0})")
            }
            LevyMeasureSpec::Tabulated { atoms } => {
                write!(f, "tabulated(")?;
                for (i, (z, m)) in atoms.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{z}:{m}")?;
                }
                write!(f, ")")
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{derive_rng, StreamRole};

    fn unit_stable(alpha: f64) -> LevyMeasureSpec {
        LevyMeasureSpec::power_law(GFunction::Constant { c: 1.0 }, alpha).unwrap()
    }

    #[test]
    fn tail_mass_matches_closed_form() {
        // int_{|z|>=d} |z|^{-1-a} dz = 2 d^{-a}/a per unit profile.
        let m = unit_stable(0.5);
        let got = m.tail_mass(1.0).unwrap();
        assert!((got - 4.0).abs() < 1e-7, "{got}");
        let got = m.tail_mass(0.25).unwrap();
        assert!((got - 8.0).abs() < 1e-6, "{got}");
    }

    #[test]
    fn small_jump_variance_closed_form() {
        // int_{|z|<d} z^2 |z|^{-1-a} dz = 2 d^{2-a}/(2-a).
        let m = unit_stable(1.5);
        let d: f64 = 0.1;
        let want = 2.0 * d.powf(0.5) / 0.5;
        let got = m.small_jump_variance(d).unwrap();
        assert!((got - want).abs() < 1e-7 * want, "{got} vs {want}");
    }

    #[test]
    fn truncated_tail_mass_stops_at_radius() {
        let m = LevyMeasureSpec::truncated(GFunction::Constant { c: 1.0 }, 0.5, 2.0).unwrap();
        // 2 * int_1^2 z^{-1.5} dz = 4 (1 - 1/sqrt(2)).
        let want = 4.0 * (1.0 - 1.0 / std::f64::consts::SQRT_2);
        let got = m.tail_mass(1.0).unwrap();
        assert!((got - want).abs() < 1e-7, "{got} vs {want}");
    }

    #[test]
    fn tempered_tail_mass_closed_form() {
        // alpha=1 profile 1: 2 int_1^inf z^{-2} e^{-z} dz, compare against
        // a straightforward Simpson evaluation.
        let m = LevyMeasureSpec::tempered(GFunction::Constant { c: 1.0 }, 1.0, 1.0).unwrap();
        let got = m.tail_mass(1.0).unwrap();
        let mut simpson = 0.0;
        let n = 40_000;
        let (a, b) = (1.0, 60.0);
        let h = (b - a) / n as f64;
        let f = |z: f64| z.powi(-2) * (-z).exp();
        for i in 0..n {
            let x0 = a + i as f64 * h;
            simpson += h / 6.0 * (f(x0) + 4.0 * f(x0 + 0.5 * h) + f(x0 + h));
        }
        let want = 2.0 * simpson;
        assert!((got - want).abs() < 1e-6, "{got} vs {want}");
    }

    #[test]
    fn tabulated_integrals_are_sums() {
        let m = LevyMeasureSpec::tabulated(vec![(-2.0, 0.5), (0.5, 1.0), (3.0, 0.25)]).unwrap();
        assert_eq!(m.tail_mass(1.0).unwrap(), 0.75);
        assert_eq!(m.small_jump_variance(1.0).unwrap(), 0.25);
    }

    #[test]
    fn dilation_preserves_stable_density() {
        // Stable measures are invariant under eps-dilation with v = eps^{1/alpha}.
        let alpha = 1.5;
        let m = unit_stable(alpha);
        for eps in [0.5, 1e-2, 1e-4] {
            let d = m.dilated(eps, eps.powf(1.0 / alpha)).unwrap();
            for z in [-2.0, -0.5, 0.5, 2.0] {
                let (a, b) = (m.density(z), d.density(z));
                assert!((a - b).abs() < 1e-12 * a.abs(), "eps={eps} z={z}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn dilation_is_a_change_of_variables() {
        // int f d(nu dilated) = eps^{-1} int f(v z) nu(dz) for a test f.
        let m = LevyMeasureSpec::tempered(
            GFunction::Step { c_plus: 2.0, c_minus: 1.0 },
            1.2,
            0.7,
        )
        .unwrap();
        let (eps, v) = (0.3, 0.6);
        let d = m.dilated(eps, v).unwrap();
        let f = |z: f64| z * z / (1.0 + z * z);
        let lhs = d.integral(f, 0.0, None, &[], 1e-9).unwrap();
        let rhs = m.integral(|z| f(v * z), 0.0, None, &[1.0 / v], 1e-9).unwrap() / eps;
        assert!((lhs - rhs).abs() < 1e-7 * rhs.abs().max(1.0), "{lhs} vs {rhs}");
    }

    #[test]
    fn jump_sampling_matches_tail_split() {
        // Step profile: P(jump > 0) = c_plus/(c_plus + c_minus).
        let m = LevyMeasureSpec::power_law(
            GFunction::Step { c_plus: 3.0, c_minus: 1.0 },
            0.8,
        )
        .unwrap();
        let mut rng = derive_rng(3, 0, StreamRole::Noise);
        let n = 40_000;
        let pos = (0..n).filter(|_| m.sample_jump(0.5, &mut rng).unwrap() > 0.0).count();
        let frac = pos as f64 / n as f64;
        assert!((frac - 0.75).abs() < 0.01, "{frac}");
    }

    #[test]
    fn jump_sampling_respects_truncation() {
        let m = LevyMeasureSpec::truncated(GFunction::Constant { c: 1.0 }, 0.5, 3.0).unwrap();
        let mut rng = derive_rng(4, 0, StreamRole::Noise);
        for _ in 0..5_000 {
            let z = m.sample_jump(0.5, &mut rng).unwrap();
            assert!(z.abs() >= 0.5 && z.abs() <= 3.0, "{z}");
        }
    }

    #[test]
    fn jump_sampling_pareto_marginal() {
        // |jump| for a pure stable measure is Pareto(alpha) above delta.
        let alpha = 1.5;
        let m = unit_stable(alpha);
        let mut rng = derive_rng(5, 0, StreamRole::Noise);
        let delta = 0.2;
        let n = 50_000;
        let xs: Vec<f64> = (0..n).map(|_| m.sample_jump(delta, &mut rng).unwrap().abs()).collect();
        let ref_draws: Vec<f64> = (0..n)
            .map(|_| delta * (1.0 - rng.gen::<f64>()).powf(-1.0 / alpha))
            .collect();
        let d = crate::stats::ks_two_sample(&xs, &ref_draws);
        assert!(d < 0.015, "ks {d}");
    }

    #[test]
    fn skew_bump_validation_bounds_amp() {
        // Profile minimum is c - |amp| max(x e^{-x^2}); amp = 3 dips below 0.
        assert!(GFunction::SkewBump { c: 1.0, amp: 3.0, width: 1.0 }.validate().is_err());
        assert!(GFunction::SkewBump { c: 1.0, amp: 2.0, width: 1.0 }.validate().is_ok());
        assert!(GFunction::SkewBump { c: 1.0, amp: 1.0, width: 1.0 }.eval(-3.0) > 0.0);
    }

    #[test]
    fn serde_round_trip() {
        let m = LevyMeasureSpec::tempered(
            GFunction::SkewBump { c: 1.0, amp: 0.5, width: 2.0 },
            1.3,
            0.4,
        )
        .unwrap();
        let s = serde_json::to_string(&m).unwrap();
        let back: LevyMeasureSpec = serde_json::from_str(&s).unwrap();
        assert_eq!(m, back);
    }
}
