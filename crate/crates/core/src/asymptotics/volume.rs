use std::fmt;
use std::str::FromStr;

use super::AsymptoticsError;

/// An increasing volume function `V` on `[1, ∞)` with `V(1) ≥ 1`, stored
/// through `log V` so that fast-growing presets stay finite.
#[derive(Clone, Debug, PartialEq)]
pub enum VolumeFunction {
    /// `V(t) = t^D`.
    Power { degree: f64 },
    /// `V(t) = exp(t^α)`: stretched exponential with `ℓ = 1`.
    StretchedExponential { alpha: f64 },
    /// `V(t) = exp(ℓ^{-1}(t))` with `ℓ^{-1}(t) = exp(t log t) = t^t`, so
    /// that `ℓ(t) ≃ log t / log log t` is slowly varying.
    Tower,
    /// `W(t) = exp(C V(t) log V(t))`, the volume of the wreath couples
    /// built over couples adapted to `V`.
    WreathLift {
        inner: Box<VolumeFunction>,
        constant: f64,
    },
}

impl VolumeFunction {
    pub fn power(degree: f64) -> Self {
        VolumeFunction::Power { degree }
    }

    /// `exp(C V log V)` over `self`.
    pub fn lifted(self, constant: f64) -> Self {
        VolumeFunction::WreathLift {
            inner: Box::new(self),
            constant,
        }
    }

    pub fn validate(&self) -> Result<(), AsymptoticsError> {
        let fail = |message: String| Err(AsymptoticsError::InvalidParameter(message));
        match self {
            VolumeFunction::Power { degree } if !(*degree > 0.0 && degree.is_finite()) => fail(
                format!("power volume needs a positive degree, got {degree}"),
            ),
            VolumeFunction::StretchedExponential { alpha }
                if !(*alpha > 0.0 && alpha.is_finite()) =>
            {
                fail(format!("stretched exponential needs α > 0, got {alpha}"))
            }
            VolumeFunction::WreathLift { inner, constant } => {
                if !(*constant > 0.0 && constant.is_finite()) {
                    return fail(format!("lift constant must be positive, got {constant}"));
                }
                inner.validate()
            }
            _ => Ok(()),
        }
    }

    /// `log V(t)`.
    pub fn log_value(&self, t: f64) -> f64 {
        match self {
            VolumeFunction::Power { degree } => degree * t.ln(),
            VolumeFunction::StretchedExponential { alpha } => t.powf(*alpha),
            VolumeFunction::Tower => t.powf(t),
            VolumeFunction::WreathLift { inner, constant } => {
                let log_inner = inner.log_value(t);
                constant * log_inner.exp() * log_inner
            }
        }
    }

    /// `(log V)'(t)`.
    pub fn log_derivative(&self, t: f64) -> f64 {
        match self {
            VolumeFunction::Power { degree } => degree / t,
            VolumeFunction::StretchedExponential { alpha } => alpha * t.powf(alpha - 1.0),
            VolumeFunction::Tower => t.powf(t) * (t.ln() + 1.0),
            VolumeFunction::WreathLift { inner, constant } => {
                let log_inner = inner.log_value(t);
                constant * log_inner.exp() * inner.log_derivative(t) * (1.0 + log_inner)
            }
        }
    }

    pub fn value(&self, t: f64) -> f64 {
        self.log_value(t).exp()
    }

    /// `V^{-1}(e^{log_s})` for `log_s ≥ log V(1)`.
    pub fn inverse_of_log(&self, log_s: f64) -> f64 {
        match self {
            VolumeFunction::Power { degree } => (log_s / degree).exp(),
            VolumeFunction::StretchedExponential { alpha } => log_s.powf(1.0 / alpha),
            _ => {
                let mut hi = 2.0;
                while self.log_value(hi) < log_s {
                    hi *= 2.0;
                }
                bisect(1.0, hi, |t| self.log_value(t) >= log_s)
            }
        }
    }

    pub fn inverse(&self, s: f64) -> f64 {
        self.inverse_of_log(s.ln())
    }
}

impl fmt::Display for VolumeFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VolumeFunction::Power { degree } => write!(f, "power:{degree}"),
            VolumeFunction::StretchedExponential { alpha } => write!(f, "stretched:{alpha}"),
            VolumeFunction::Tower => write!(f, "tower"),
            VolumeFunction::WreathLift { inner, constant } => write!(f, "lift({constant},{inner})"),
        }
    }
}

/// Parses `power:D`, `stretched:α`, `tower` and `lift(C,<volume>)`.
impl FromStr for VolumeFunction {
    type Err = AsymptoticsError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let text = text.trim();
        let bad = || AsymptoticsError::InvalidParameter(format!("cannot parse volume '{text}'"));
        let number = |s: &str| s.trim().parse::<f64>().map_err(|_| bad());
        let volume =
            if let Some(inner) = text.strip_prefix("lift(").and_then(|r| r.strip_suffix(')')) {
                let (constant, inner) = inner.split_once(',').ok_or_else(bad)?;
                inner.parse::<VolumeFunction>()?.lifted(number(constant)?)
            } else if let Some(degree) = text.strip_prefix("power:") {
                VolumeFunction::power(number(degree)?)
            } else if let Some(alpha) = text.strip_prefix("stretched:") {
                VolumeFunction::StretchedExponential {
                    alpha: number(alpha)?,
                }
            } else if text == "tower" {
                VolumeFunction::Tower
            } else {
                return Err(bad());
            };
        volume.validate()?;
        Ok(volume)
    }
}

/// Smallest `x` in `[lo, hi]` with `above(x)`, to relative precision
/// `1e-14`; `above` must be monotone with `above(hi)`.
fn bisect(mut lo: f64, mut hi: f64, above: impl Fn(f64) -> bool) -> f64 {
    while hi - lo > 1e-14 * hi {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if above(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// Adaptive Simpson quadrature of `f` on `[a, b]` to relative tolerance
/// `tolerance`.
pub fn adaptive_simpson(f: &impl Fn(f64) -> f64, a: f64, b: f64, tolerance: f64) -> f64 {
    fn recurse(
        f: &impl Fn(f64) -> f64,
        (a, fa): (f64, f64),
        (m, fm): (f64, f64),
        (b, fb): (f64, f64),
        whole: f64,
        tolerance: f64,
        depth: u32,
    ) -> f64 {
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tolerance * (left + right).abs() {
            left + right + delta / 15.0
        } else {
            recurse(f, (a, fa), (lm, flm), (m, fm), left, tolerance, depth - 1)
                + recurse(f, (m, fm), (rm, frm), (b, fb), right, tolerance, depth - 1)
        }
    }
    if a == b {
        return 0.0;
    }
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    recurse(f, (a, fa), (m, fm), (b, fb), whole, tolerance, 48)
}

const QUADRATURE_TOLERANCE: f64 = 1e-11;
const LARGEST_ARGUMENT: f64 = 1e15;

/// `γ(t)` from `∫_{V(1)}^{γ(t)} [V^{-1}(s)]² ds/s = t`. With `s = V(τ)`
/// the integral is `∫_1^T τ² (log V)'(τ) dτ`, so `γ(t) = V(T)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GammaValue {
    pub t: f64,
    /// `T = V^{-1}(γ(t))`.
    pub argument: f64,
    pub log_gamma: f64,
    /// `+∞` once `γ(t)` leaves the range of `f64`.
    pub gamma: f64,
}

pub fn gamma_from_volume(volume: &VolumeFunction, t: f64) -> Result<GammaValue, AsymptoticsError> {
    volume.validate()?;
    if !(t > 0.0 && t.is_finite()) {
        return Err(AsymptoticsError::InvalidParameter(format!(
            "γ is defined for t > 0, got {t}"
        )));
    }
    let integrand = |tau: f64| tau * tau * volume.log_derivative(tau);
    let piece = |a: f64, b: f64| adaptive_simpson(&integrand, a, b, QUADRATURE_TOLERANCE);
    // grow the bracket [lo, hi] with I(lo) < t ≤ I(hi)
    let (mut lo, mut integral_lo) = (1.0, 0.0);
    let mut hi = 2.0;
    let mut integral_hi = piece(lo, hi);
    while integral_hi < t {
        if !integral_hi.is_finite() || hi > LARGEST_ARGUMENT {
            return Err(AsymptoticsError::NonFinite { t });
        }
        (lo, integral_lo) = (hi, integral_hi);
        hi *= 2.0;
        integral_hi = integral_lo + piece(lo, hi);
    }
    if !integral_hi.is_finite() {
        return Err(AsymptoticsError::NonFinite { t });
    }
    while hi - lo > 1e-13 * hi {
        let mid = 0.5 * (lo + hi);
        let integral_mid = integral_lo + piece(lo, mid);
        if integral_mid < t {
            (lo, integral_lo) = (mid, integral_mid);
        } else {
            hi = mid;
        }
    }
    let argument = 0.5 * (lo + hi);
    let log_gamma = volume.log_value(argument);
    Ok(GammaValue {
        t,
        argument,
        log_gamma,
        gamma: log_gamma.exp(),
    })
}

/// Result of sampling `γ'(s)/γ(s) ≥ δ γ'(t)/γ(t)` for `t < s < 2t`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DeltaRegularity {
    pub holds: bool,
    /// Smallest sampled `(γ'(s)/γ(s)) / (γ'(t)/γ(t))`.
    pub worst_ratio: f64,
    pub worst_t: f64,
    pub worst_s: f64,
}

/// Samples `samples` log-spaced `t` in `[t_min, t_max]` and, for each, eight
/// points `s` in `(t, 2t)`. Since `γ'/γ = 1/[V^{-1}(γ)]²`, each ratio is
/// `T(t)² / T(s)²`.
pub fn delta_regular_check(
    volume: &VolumeFunction,
    delta: f64,
    t_min: f64,
    t_max: f64,
    samples: usize,
) -> Result<DeltaRegularity, AsymptoticsError> {
    if !(t_min > 0.0 && t_max >= t_min && samples >= 1) {
        return Err(AsymptoticsError::InvalidParameter(format!(
            "need 0 < t_min ≤ t_max and at least one sample, got [{t_min}, {t_max}] × {samples}"
        )));
    }
    let mut worst = DeltaRegularity {
        holds: true,
        worst_ratio: f64::INFINITY,
        worst_t: t_min,
        worst_s: t_min,
    };
    for t in log_grid(t_min, t_max, samples) {
        let at_t = gamma_from_volume(volume, t)?.argument;
        for j in 1..=8 {
            let s = t * (1.0 + f64::from(j) / 8.0) * (1.0 - 1e-9);
            let at_s = gamma_from_volume(volume, s)?.argument;
            let ratio = (at_t * at_t) / (at_s * at_s);
            if ratio < worst.worst_ratio {
                worst = DeltaRegularity {
                    holds: true,
                    worst_ratio: ratio,
                    worst_t: t,
                    worst_s: s,
                };
            }
        }
    }
    worst.holds = worst.worst_ratio >= delta;
    Ok(worst)
}

/// `count` log-spaced points from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![lo];
    }
    let step = (hi / lo).ln() / (count - 1) as f64;
    (0..count)
        .map(|k| {
            if k + 1 == count {
                hi
            } else {
                lo * (step * k as f64).exp()
            }
        })
        .collect()
}

/// Least-squares slope `a` in `log log γ(t) ≈ a log t + b log log t + c`
/// with `b = log_power` fixed, over `points` log-spaced `t` in
/// `[t_min, t_max]`: the exponent of a profile `exp(t^a (log t)^b)`.
pub fn fit_stretched_exponent(
    volume: &VolumeFunction,
    t_min: f64,
    t_max: f64,
    points: usize,
    log_power: f64,
) -> Result<f64, AsymptoticsError> {
    if points < 2 || t_min.is_nan() || t_min <= 1.0 || t_max <= t_min {
        return Err(AsymptoticsError::InvalidParameter(
            "a fit needs two or more points in (1, ∞)".to_string(),
        ));
    }
    let mut xs = Vec::with_capacity(points);
    let mut ys = Vec::with_capacity(points);
    for t in log_grid(t_min, t_max, points) {
        let log_gamma = gamma_from_volume(volume, t)?.log_gamma;
        if log_gamma.is_nan() || log_gamma <= 0.0 {
            return Err(AsymptoticsError::NonFinite { t });
        }
        xs.push(t.ln());
        ys.push(log_gamma.ln() - log_power * t.ln().ln());
    }
    Ok(least_squares_slope(&xs, &ys))
}

pub fn least_squares_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mean_x = xs.iter().sum::<f64>() / n;
    let mean_y = ys.iter().sum::<f64>() / n;
    let covariance: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (x - mean_x) * (y - mean_y))
        .sum();
    let variance: f64 = xs.iter().map(|x| (x - mean_x).powi(2)).sum();
    covariance / variance
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn linear_volume_has_closed_form_gamma() {
        let linear = VolumeFunction::power(1.0);
        for t in [1e-3, 1.0, 10.0, 1e3, 1e5] {
            let g = gamma_from_volume(&linear, t).unwrap();
            let exact = (2.0 * t + 1.0).sqrt();
            assert!(
                (g.gamma - exact).abs() <= 1e-9 * exact,
                "t = {t}: {} vs {exact}",
                g.gamma
            );
        }
    }

    #[test]
    fn power_volume_matches_its_integral() {
        // ∫_1^T τ² D τ^{-1} dτ = D (T² - 1)/2, so γ(t) = (2t/D + 1)^{D/2}
        for degree in [0.5, 2.0, 3.0] {
            let v = VolumeFunction::power(degree);
            for t in [0.5, 7.0, 1e4] {
                let g = gamma_from_volume(&v, t).unwrap();
                let exact = (2.0 * t / degree + 1.0).powf(degree / 2.0);
                assert!((g.gamma - exact).abs() <= 1e-9 * exact);
            }
        }
    }

    #[test]
    fn stretched_exponential_matches_its_integral() {
        // ∫_1^T τ² α τ^{α-1} dτ = α (T^{α+2} - 1)/(α+2)
        let alpha = 0.5;
        let v = VolumeFunction::StretchedExponential { alpha };
        for t in [1.0, 100.0, 1e5] {
            let g = gamma_from_volume(&v, t).unwrap();
            let argument = ((alpha + 2.0) * t / alpha + 1.0).powf(1.0 / (alpha + 2.0));
            assert!((g.argument - argument).abs() <= 1e-9 * argument);
            assert!((g.log_gamma - argument.powf(alpha)).abs() <= 1e-9 * g.log_gamma);
        }
    }

    #[test]
    fn lifted_power_volumes_have_the_predicted_exponent() {
        for degree in [1.0, 2.0, 3.0] {
            let w = VolumeFunction::power(degree).lifted(1.0);
            let fitted = fit_stretched_exponent(&w, 1e3, 1e6, 13, 2.0 / (2.0 + degree)).unwrap();
            let expected = degree / (2.0 + degree);
            assert!(
                (fitted - expected).abs() <= 0.05,
                "D = {degree}: {fitted} vs {expected}"
            );
        }
    }

    #[test]
    fn quadratic_volume_is_half_regular() {
        let v = VolumeFunction::power(2.0);
        let check = delta_regular_check(&v, 0.5, 10.0, 1e5, 9).unwrap();
        assert!(check.holds, "{check:?}");
        // T(t)² = t + 1, so the worst ratio approaches (t+1)/(2t+1)
        assert!(check.worst_ratio < 0.6);
    }

    #[test]
    fn fast_volumes_stay_finite_in_log_space() {
        let tower = gamma_from_volume(&VolumeFunction::Tower, 1e6).unwrap();
        assert!(tower.log_gamma.is_finite() && tower.log_gamma > 0.0);
        let lifted = gamma_from_volume(&VolumeFunction::power(2.0).lifted(1.0), 1e6).unwrap();
        assert!(lifted.log_gamma.is_finite());
    }

    #[test]
    fn rejects_bad_inputs() {
        let v = VolumeFunction::power(1.0);
        assert!(gamma_from_volume(&v, 0.0).is_err());
        assert!(gamma_from_volume(&v, f64::NAN).is_err());
        assert!(gamma_from_volume(&VolumeFunction::power(-1.0), 1.0).is_err());
        assert!(matches!(
            gamma_from_volume(&VolumeFunction::power(1e-300), 1e300),
            Err(AsymptoticsError::NonFinite { .. })
        ));
        assert!(delta_regular_check(&v, 0.5, 10.0, 1.0, 3).is_err());
    }

    #[test]
    fn parses_volume_presets() {
        for text in [
            "power:2",
            "stretched:0.5",
            "tower",
            "lift(1,power:3)",
            "lift(2,lift(1,power:1))",
        ] {
            let v: VolumeFunction = text.parse().unwrap();
            assert_eq!(v.to_string(), text);
        }
        assert!("power:x".parse::<VolumeFunction>().is_err());
        assert!("cubic".parse::<VolumeFunction>().is_err());
    }

    fn presets() -> Vec<VolumeFunction> {
        vec![
            VolumeFunction::power(1.0),
            VolumeFunction::power(2.5),
            VolumeFunction::StretchedExponential { alpha: 0.5 },
            VolumeFunction::Tower,
            VolumeFunction::power(2.0).lifted(1.0),
        ]
    }

    proptest! {
        #[test]
        fn inverse_undoes_the_volume(index in 0usize..5, t in 1.0f64..6.0) {
            let v = &presets()[index];
            let back = v.inverse_of_log(v.log_value(t));
            prop_assert!((back - t).abs() <= 1e-9 * t, "{v}: {back} vs {t}");
        }

        #[test]
        fn gamma_is_increasing(index in 0usize..5, t in 0.1f64..1e4, factor in 1.01f64..3.0) {
            let v = &presets()[index];
            let a = gamma_from_volume(v, t).unwrap();
            let b = gamma_from_volume(v, t * factor).unwrap();
            prop_assert!(b.log_gamma > a.log_gamma);
        }
    }
}
