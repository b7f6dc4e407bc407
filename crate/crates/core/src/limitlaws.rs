//! Limit laws for standardized random sums: Laplace, symmetric
//! variance-gamma, Student, and the generic scale mixture of normals
//! E Φ(x·√(c/Λ)) over a positive mixing variable Λ.

use crate::error::{require_finite, Error, Result};
use crate::quad::adaptive_simpson;
use crate::specfun::{ln_gamma_raw, phi, std_normal_cdf};

/// lnΓ(k) − [(k − ½)ln k − k + ½ln 2π] for k ≥ 10, via the Stirling series.
fn stirling_tail(k: f64) -> f64 {
    let k2 = k * k;
    (1.0 / 12.0
        + (-1.0 / 360.0
            + (1.0 / 1260.0 + (-1.0 / 1680.0 + (1.0 / 1188.0 - 691.0 / (360_360.0 * k2) / k2) / k2) / k2)
                / k2)
            / k2)
        / k
}

/// ln of the Gamma(k, 1) density at t = k. Formed without large-term
/// cancellation so the centered exponent below stays noise-free at huge k.
fn ln_density_at_mean(k: f64) -> f64 {
    if k >= 10.0 {
        -0.5 * (2.0 * std::f64::consts::PI * k).ln() - stirling_tail(k)
    } else {
        (k - 1.0) * k.ln() - k - ln_gamma_raw(k)
    }
}

/// E f(G) for G ~ Gamma(shape k, scale 1), absolute error ~1e-11.
/// Panels are anchored at the density mode so a narrow peak (large k)
/// cannot slip between quadrature probes; k < 1 integrates in log space
/// to tame the t^{k-1} singularity. The density exponent is expanded
/// around t = k, keeping its rounding error ~eps·|t−k| instead of
/// ~eps·k·ln k; the naive form is too noisy for the Simpson error
/// test once k reaches ~1e5.
pub(crate) fn gamma_weighted_mean<F: Fn(f64) -> f64>(k: f64, f: F) -> f64 {
    debug_assert!(k > 0.0 && k.is_finite());
    let lng = ln_gamma_raw(k);
    let sd = k.sqrt();
    let hi = k + 40.0 * sd + 45.0;
    let tol = 1e-12;
    let mut total = 0.0;
    if k >= 1.0 {
        let lo = (k - 40.0 * sd).max(1e-300);
        let mode = k - 1.0;
        let spread = sd.max(1.0);
        let mut anchors = vec![lo, hi];
        for j in [-20.0, -5.0, -2.0, -1.0, 0.0, 1.0, 2.0, 5.0, 20.0] {
            let p = mode + j * spread;
            if p > lo && p < hi {
                anchors.push(p);
            }
        }
        anchors.sort_by(f64::total_cmp);
        let base = ln_density_at_mean(k);
        for w in anchors.windows(2) {
            total += adaptive_simpson(
                |t| {
                    // Centered form only near the peak, where d = t − k is
                    // exact; far below k the direct exponent is accurate
                    // enough (small k) or underflows anyway.
                    let d = t - k;
                    let ex = if d > -0.5 * k {
                        base + (k - 1.0) * (d / k).ln_1p() - d
                    } else {
                        (k - 1.0) * t.ln() - t - lng
                    };
                    f(t) * ex.exp()
                },
                w[0],
                w[1],
                tol,
            );
        }
    } else {
        // t = e^v; lower cutoff keeps the omitted head mass below 1e-14.
        let v_lo = ((1e-14f64).ln() + k.ln() + lng) / k;
        let v_hi = hi.ln();
        let v_mode = k.ln();
        let mut anchors = vec![v_lo, v_hi];
        for j in [-30.0, -10.0, -3.0, -1.0, 0.0, 1.0, 2.0] {
            let p = v_mode + j;
            if p > v_lo && p < v_hi {
                anchors.push(p);
            }
        }
        anchors.sort_by(f64::total_cmp);
        for w in anchors.windows(2) {
            total += adaptive_simpson(
                |v| f(v.exp()) * (k * v - v.exp() - lng).exp(),
                w[0],
                w[1],
                tol,
            );
        }
    }
    total
}

/// Laplace CDF with variance 1: ½e^{√2 x} below 0, 1 − ½e^{−√2 x} above.
pub fn laplace_cdf(x: f64) -> f64 {
    let s = std::f64::consts::SQRT_2;
    if x <= 0.0 {
        0.5 * (s * x).exp()
    } else {
        1.0 - 0.5 * (-s * x).exp()
    }
}

fn check_shape(r: f64) -> Result<()> {
    require_finite("shape", r)?;
    if r <= 0.0 {
        return Err(Error::domain(format!("shape parameter must be positive, got {r}")));
    }
    Ok(())
}

/// Symmetric variance-gamma CDF: E Φ(x/√G) with G ~ Gamma(r, 1).
pub fn variance_gamma_cdf(r: f64, x: f64) -> Result<f64> {
    check_shape(r)?;
    require_finite("x", x)?;
    if x == 0.0 {
        return Ok(0.5);
    }
    Ok(gamma_weighted_mean(r, |t| phi(x / t.sqrt())))
}

/// Student CDF with parameter r via the chi-square mixture
/// E Φ(x√(2U/r)), U ~ Gamma(r/2, 1).
pub fn student_cdf(r: f64, x: f64) -> Result<f64> {
    check_shape(r)?;
    require_finite("x", x)?;
    if x == 0.0 {
        return Ok(0.5);
    }
    Ok(gamma_weighted_mean(r / 2.0, |u| phi(x * (2.0 * u / r).sqrt())))
}

/// Student CDF by direct quadrature of the density
/// t_r(y) = Γ((r+1)/2)/(√(πr)Γ(r/2))·(1+y²/r)^{−(r+1)/2};
/// an independent route used to cross-check [`student_cdf`].
pub fn student_cdf_density_route(r: f64, x: f64) -> Result<f64> {
    check_shape(r)?;
    require_finite("x", x)?;
    let ln_norm = ln_gamma_raw((r + 1.0) / 2.0)
        - ln_gamma_raw(r / 2.0)
        - 0.5 * (std::f64::consts::PI * r).ln();
    let density = |y: f64| (ln_norm - 0.5 * (r + 1.0) * (1.0 + y * y / r).ln()).exp();
    let half = adaptive_simpson(density, 0.0, x.abs(), 1e-12);
    Ok(if x >= 0.0 { 0.5 + half } else { 0.5 - half })
}

/// Law of the positive mixing variable Λ in a normal scale mixture.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MixingLaw {
    /// Λ ≡ value.
    Degenerate { value: f64 },
    /// Λ exponential with the given mean.
    Exponential { mean: f64 },
    /// Λ ~ Gamma(shape, scale).
    Gamma { shape: f64, scale: f64 },
    /// Λ = rate/G with G ~ Gamma(shape, 1); mean exists only for shape > 1.
    InverseGamma { shape: f64, rate: f64 },
}

impl MixingLaw {
    pub fn validate(&self) -> Result<()> {
        let params: &[(&str, f64)] = match self {
            MixingLaw::Degenerate { value } => &[("value", *value)],
            MixingLaw::Exponential { mean } => &[("mean", *mean)],
            MixingLaw::Gamma { shape, scale } => &[("shape", *shape), ("scale", *scale)],
            MixingLaw::InverseGamma { shape, rate } => &[("shape", *shape), ("rate", *rate)],
        };
        for &(name, v) in params {
            require_finite(name, v)?;
            if v <= 0.0 {
                return Err(Error::domain(format!(
                    "mixing-law parameter {name} must be positive, got {v}"
                )));
            }
        }
        Ok(())
    }

    /// E Λ; fails when the mixing law has no finite mean.
    pub fn mean(&self) -> Result<f64> {
        self.validate()?;
        match *self {
            MixingLaw::Degenerate { value } => Ok(value),
            MixingLaw::Exponential { mean } => Ok(mean),
            MixingLaw::Gamma { shape, scale } => Ok(shape * scale),
            MixingLaw::InverseGamma { shape, rate } => {
                if shape > 1.0 {
                    Ok(rate / (shape - 1.0))
                } else {
                    Err(Error::MeanUndefined(format!(
                        "inverse-gamma mixing variable with shape {shape} ≤ 1 has no mean"
                    )))
                }
            }
        }
    }
}

/// Scale-mixture CDF E Φ(x·√(normalization/Λ)).
///
/// The normalization is the square of (divisor/σ) used to standardize the
/// random sum; passing E Λ recovers the usual mean-normalized mixture.
pub fn mixture_cdf(m: &MixingLaw, x: f64, normalization: f64) -> Result<f64> {
    m.validate()?;
    require_finite("x", x)?;
    require_finite("normalization", normalization)?;
    if normalization <= 0.0 {
        return Err(Error::domain(format!(
            "normalization must be positive, got {normalization}"
        )));
    }
    if x == 0.0 {
        return Ok(0.5);
    }
    let c = normalization;
    Ok(match *m {
        MixingLaw::Degenerate { value } => phi(x * (c / value).sqrt()),
        MixingLaw::Exponential { mean } => {
            gamma_weighted_mean(1.0, |t| phi(x * (c / (mean * t)).sqrt()))
        }
        MixingLaw::Gamma { shape, scale } => {
            gamma_weighted_mean(shape, |t| phi(x * (c / (scale * t)).sqrt()))
        }
        MixingLaw::InverseGamma { shape, rate } => {
            gamma_weighted_mean(shape, |t| phi(x * (c * t / rate).sqrt()))
        }
    })
}

/// The limit distribution a bound compares against.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum LimitLaw {
    Normal,
    Laplace,
    VarianceGamma { shape: f64 },
    Student { shape: f64 },
}

impl LimitLaw {
    pub fn cdf(&self, x: f64) -> Result<f64> {
        match *self {
            LimitLaw::Normal => std_normal_cdf(x),
            LimitLaw::Laplace => {
                require_finite("x", x)?;
                Ok(laplace_cdf(x))
            }
            LimitLaw::VarianceGamma { shape } => variance_gamma_cdf(shape, x),
            LimitLaw::Student { shape } => student_cdf(shape, x),
        }
    }

    pub fn label(&self) -> String {
        match *self {
            LimitLaw::Normal => "normal".to_string(),
            LimitLaw::Laplace => "laplace".to_string(),
            LimitLaw::VarianceGamma { shape } => format!("variance-gamma({shape})"),
            LimitLaw::Student { shape } => format!("student({shape})"),
        }
    }
}
