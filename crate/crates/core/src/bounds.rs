//! Bound evaluators: explicit Kolmogorov-distance bounds for standardized
//! sums with deterministic size and for random sums with Poisson-binomial,
//! binomial, Poisson, geometric, negative binomial, Poisson-inverse-gamma,
//! and general mixed Poisson sizes, plus the binomial/Poisson
//! total-variation distance used to transfer bounds between size laws.
//!
//! Every evaluator returns a [`BoundReport`] naming the approximating limit
//! law and the normalization (the divisor of the raw sum) the bound refers
//! to. All bounds are ratios homogeneous of degree zero in the summand, so
//! rescaling X by c > 0 leaves them unchanged.

use crate::constants::{table_constant, ConstantVariant, MINIMAX_CAP};
use crate::dists::{default_growth_grid, verify_growth_function, GrowthFunction, SummandDistribution};
use crate::error::{require_finite, Error, Result};
use crate::functionals::{centering_constant, functionals_hetero, functionals_iid, FunctionalValues};
use crate::limitlaws::{LimitLaw, MixingLaw};
use crate::specfun::{gamma_raw, lig, ln_gamma_raw, uig};

/// Universal constant for the combined-fraction bound with independent,
/// not necessarily identical summands.
pub const UNIVERSAL_GENERAL: f64 = 1.8627;
/// Universal constant for the combined-fraction bound with i.i.d. summands.
pub const UNIVERSAL_IID: f64 = 1.8546;
/// Constant of the third-moment bound for Poisson random sums.
pub const POISSON_THIRD_MOMENT: f64 = 0.3031;

/// Which bound produced a report.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum BoundKind {
    /// Deterministic-n bound with a gamma-dependent constant.
    FixedN(ConstantVariant),
    /// Deterministic-n bound 1.8627·(L(ε)+M(ε)) for a caller-chosen ε.
    FractionSum,
    /// Deterministic-n weighted-second-moment bound with a growth function.
    Growth,
    PoissonBinomial,
    Binomial,
    Poisson,
    PoissonBinomialGrowth,
    BinomialGrowth,
    PoissonGrowth,
    /// Third-moment bound for Poisson random sums.
    ThirdMomentPoisson,
    /// Mixed-Poisson random sum with an arbitrary mixing law.
    MixedPoisson,
    Geometric,
    NegativeBinomial,
    /// Poisson-inverse-gamma (Sichel) random sum.
    Sichel,
}

/// One evaluated bound, together with the quantities that define what it
/// bounds: sup_x |P(S < x·normalization) − limit_law(x)| ≤ bound_value.
#[derive(Clone, Debug)]
pub struct BoundReport {
    pub kind: BoundKind,
    pub bound_value: f64,
    pub constant_used: f64,
    /// Lyapunov/Lindeberg ratio, when the bound is driven by it.
    pub gamma: Option<f64>,
    pub lindeberg: Option<f64>,
    pub lyapunov: Option<f64>,
    /// Divisor of the raw sum, e.g. σ√n, σ√θ, σ√λ, σ√(n/r).
    pub normalization: f64,
    pub limit_law: LimitLaw,
}

fn normal_report(kind: BoundKind, bound: f64, constant: f64, normalization: f64) -> BoundReport {
    BoundReport {
        kind,
        bound_value: bound,
        constant_used: constant,
        gamma: None,
        lindeberg: None,
        lyapunov: None,
        normalization,
        limit_law: LimitLaw::Normal,
    }
}

fn fractions_report(
    kind: BoundKind,
    constant: f64,
    fv: &FunctionalValues,
) -> BoundReport {
    BoundReport {
        kind,
        bound_value: constant * fv.combined(),
        constant_used: constant,
        gamma: Some(fv.gamma),
        lindeberg: Some(fv.lindeberg),
        lyapunov: Some(fv.lyapunov),
        normalization: fv.sum_sd,
        limit_law: LimitLaw::Normal,
    }
}

fn check_count(n: u64) -> Result<()> {
    if n == 0 {
        return Err(Error::domain("summand count must be at least 1"));
    }
    Ok(())
}

fn check_probability(p: f64) -> Result<f64> {
    require_finite("success probability", p)?;
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::domain(format!(
            "success probability must lie in (0, 1], got {p}"
        )));
    }
    Ok(p)
}

fn check_rate(lambda: f64) -> Result<f64> {
    require_finite("rate", lambda)?;
    if lambda <= 0.0 {
        return Err(Error::domain(format!("rate must be positive, got {lambda}")));
    }
    Ok(lambda)
}

fn checked_gamma(shape: f64) -> Result<f64> {
    let v = gamma_raw(shape);
    if !v.is_finite() || v <= 0.0 {
        return Err(Error::domain(format!(
            "gamma function of shape {shape} is not finitely representable"
        )));
    }
    Ok(v)
}

/// Deterministic-n bound c(γ)·(L(1)+M(1)) with the variant's minimax
/// constant; reduces to the limiting constant times M(1) when L(1)=0.
pub fn bound_fixed_n(
    d: &SummandDistribution,
    n: u64,
    variant: ConstantVariant,
) -> Result<BoundReport> {
    check_count(n)?;
    if variant.requires_symmetric() && !d.is_symmetric() {
        return Err(Error::Precondition(format!(
            "constant variant {} requires a symmetric summand distribution",
            variant.label()
        )));
    }
    let fv = functionals_iid(d, n, 1.0)?;
    let c = table_constant(variant, fv.gamma)?;
    Ok(fractions_report(BoundKind::FixedN(variant), c, &fv))
}

/// Heterogeneous-summand version of [`bound_fixed_n`]; the i.i.d.-only
/// constant variants are rejected.
pub fn bound_fixed_n_hetero(
    ds: &[SummandDistribution],
    variant: ConstantVariant,
) -> Result<BoundReport> {
    if variant.requires_identical() {
        return Err(Error::Precondition(format!(
            "constant variant {} applies only to identically distributed summands",
            variant.label()
        )));
    }
    if variant.requires_symmetric() && !ds.iter().all(SummandDistribution::is_symmetric) {
        return Err(Error::Precondition(format!(
            "constant variant {} requires every summand distribution to be symmetric",
            variant.label()
        )));
    }
    let fv = functionals_hetero(ds, 1.0)?;
    let c = table_constant(variant, fv.gamma)?;
    Ok(fractions_report(BoundKind::FixedN(variant), c, &fv))
}

/// Deterministic-n bound 1.8627·(L(ε)+M(ε)); minimized over ε at ε = 1.
pub fn bound_fraction_sum(d: &SummandDistribution, n: u64, eps: f64) -> Result<BoundReport> {
    check_count(n)?;
    let fv = functionals_iid(d, n, eps)?;
    Ok(fractions_report(BoundKind::FractionSum, UNIVERSAL_GENERAL, &fv))
}

fn growth_numerator(d: &SummandDistribution, g: &GrowthFunction) -> Result<f64> {
    verify_growth_function(g, &default_growth_grid())?;
    let m = d.weighted_second_moment(g)?;
    if !m.is_finite() {
        return Err(Error::Unbounded(format!(
            "weighted second moment E X²·g(X) diverges for growth function {}",
            g.label()
        )));
    }
    Ok(m)
}

fn growth_bound_at(
    d: &SummandDistribution,
    g: &GrowthFunction,
    constant: f64,
    scale_arg: f64,
) -> Result<f64> {
    let num = growth_numerator(d, g)?;
    let denom = d.variance() * g.eval(scale_arg);
    if !(denom > 0.0) || !denom.is_finite() {
        return Err(Error::Precondition(format!(
            "growth function {} must be finite and positive at the normalization point {scale_arg}",
            g.label()
        )));
    }
    Ok(constant * num / denom)
}

/// Deterministic-n bound constant·E[X²g(X)]/(σ²·g(σ√n)) for a growth
/// function g: even, with g and x/g(x) nondecreasing on x > 0. The
/// constant is caller-supplied (1.8546 is sharp for i.i.d. summands,
/// 1.8627 holds heterogeneously).
pub fn bound_growth(
    d: &SummandDistribution,
    n: u64,
    g: &GrowthFunction,
    constant: f64,
) -> Result<BoundReport> {
    check_count(n)?;
    require_finite("constant", constant)?;
    if constant <= 0.0 {
        return Err(Error::domain(format!("constant must be positive, got {constant}")));
    }
    let norm = d.sigma() * (n as f64).sqrt();
    let b = growth_bound_at(d, g, constant, norm)?;
    Ok(normal_report(BoundKind::Growth, b, constant, norm))
}

fn check_thinning_probs(probs: &[f64]) -> Result<f64> {
    if probs.is_empty() {
        return Err(Error::usage("probability vector must be nonempty"));
    }
    let mut theta = 0.0;
    for &p in probs {
        check_probability(p)?;
        theta += p;
    }
    Ok(theta)
}

/// E X²·min{1, |X|/t} = E X²·1(|X| ≥ t) + t⁻¹·E|X|³·1(|X| < t).
fn truncated_min_moment(d: &SummandDistribution, t: f64) -> Result<f64> {
    Ok(d.trunc_second_moment_tail(t)? + d.trunc_third_abs_moment_core(t)? / t)
}

fn thinned_bound(
    kind: BoundKind,
    d: &SummandDistribution,
    theta: f64,
    constant: f64,
) -> Result<BoundReport> {
    let norm = d.sigma() * theta.sqrt();
    let b = constant * truncated_min_moment(d, norm)? / d.variance();
    Ok(normal_report(kind, b, constant, norm))
}

/// Random sum with Poisson-binomial size N = Σ 1(ξⱼ ≤ pⱼ):
/// (1.8627/σ²)·E X²·min{1, |X|/(σ√θ)} with θ = Σ pⱼ.
pub fn bound_poisson_binomial(d: &SummandDistribution, probs: &[f64]) -> Result<BoundReport> {
    let theta = check_thinning_probs(probs)?;
    thinned_bound(BoundKind::PoissonBinomial, d, theta, UNIVERSAL_GENERAL)
}

/// Random sum with binomial size: the same truncated-moment shape with
/// θ = np and the i.i.d. constant 1.8546.
pub fn bound_binomial(d: &SummandDistribution, n: u64, p: f64) -> Result<BoundReport> {
    check_count(n)?;
    let p = check_probability(p)?;
    thinned_bound(BoundKind::Binomial, d, n as f64 * p, UNIVERSAL_IID)
}

/// Random sum with Poisson size: (1.8546/σ²)·E X²·min{1, |X|/(σ√λ)}.
pub fn bound_poisson(d: &SummandDistribution, lambda: f64) -> Result<BoundReport> {
    let lambda = check_rate(lambda)?;
    thinned_bound(BoundKind::Poisson, d, lambda, UNIVERSAL_IID)
}

/// Growth-function version of [`bound_poisson_binomial`]:
/// (1.8627/σ²)·E[X²g(X)]/g(σ√θ).
pub fn bound_poisson_binomial_growth(
    d: &SummandDistribution,
    probs: &[f64],
    g: &GrowthFunction,
) -> Result<BoundReport> {
    let theta = check_thinning_probs(probs)?;
    let norm = d.sigma() * theta.sqrt();
    let b = growth_bound_at(d, g, UNIVERSAL_GENERAL, norm)?;
    Ok(normal_report(BoundKind::PoissonBinomialGrowth, b, UNIVERSAL_GENERAL, norm))
}

/// Growth-function version of [`bound_binomial`] with constant 1.8546.
pub fn bound_binomial_growth(
    d: &SummandDistribution,
    n: u64,
    p: f64,
    g: &GrowthFunction,
) -> Result<BoundReport> {
    check_count(n)?;
    let p = check_probability(p)?;
    let norm = d.sigma() * (n as f64 * p).sqrt();
    let b = growth_bound_at(d, g, UNIVERSAL_IID, norm)?;
    Ok(normal_report(BoundKind::BinomialGrowth, b, UNIVERSAL_IID, norm))
}

/// Growth-function version of [`bound_poisson`] with constant 1.8546.
pub fn bound_poisson_growth(
    d: &SummandDistribution,
    lambda: f64,
    g: &GrowthFunction,
) -> Result<BoundReport> {
    let lambda = check_rate(lambda)?;
    let norm = d.sigma() * lambda.sqrt();
    let b = growth_bound_at(d, g, UNIVERSAL_IID, norm)?;
    Ok(normal_report(BoundKind::PoissonGrowth, b, UNIVERSAL_IID, norm))
}

/// Third-moment bound 0.3031·E|X|³/(σ³√λ) for Poisson random sums; fails
/// when the third absolute moment diverges (heavy-tailed summands need the
/// truncated-moment bound instead).
pub fn bound_third_moment_poisson(d: &SummandDistribution, lambda: f64) -> Result<BoundReport> {
    let lambda = check_rate(lambda)?;
    let m3 = d.third_abs_moment().ok_or_else(|| {
        Error::Unbounded(
            "third absolute moment diverges; only the truncated-moment bounds apply".into(),
        )
    })?;
    let sigma = d.sigma();
    let b = POISSON_THIRD_MOMENT * m3 / (sigma * sigma * sigma * lambda.sqrt());
    Ok(normal_report(
        BoundKind::ThirdMomentPoisson,
        b,
        POISSON_THIRD_MOMENT,
        sigma * lambda.sqrt(),
    ))
}

/// E min{1, y/√Λ} for y ≥ 0, in closed incomplete-gamma form per mixing law.
fn mixed_min_kernel(m: &MixingLaw, y: f64) -> f64 {
    debug_assert!(y > 0.0);
    match *m {
        MixingLaw::Degenerate { value } => (y / value.sqrt()).min(1.0),
        MixingLaw::Exponential { mean } => {
            let c = y / mean.sqrt();
            lig(1.0, c * c) + c * uig(0.5, c * c)
        }
        MixingLaw::Gamma { shape, scale } => {
            let c = y / scale.sqrt();
            (lig(shape, c * c) + c * uig(shape - 0.5, c * c)) / gamma_raw(shape)
        }
        MixingLaw::InverseGamma { shape, rate } => {
            let c = y / rate.sqrt();
            let z0 = rate / (y * y);
            (uig(shape, z0) + c * lig(shape + 0.5, z0)) / gamma_raw(shape)
        }
    }
}

/// The limit law and normalization a mixed-Poisson random sum converges to:
/// the normalization is chosen so the approximating CDF is exactly the
/// named law (σ√value, σ√mean, σ√scale, σ√(rate/shape) respectively).
fn mixed_limit(m: &MixingLaw, sigma: f64) -> (LimitLaw, f64) {
    match *m {
        MixingLaw::Degenerate { value } => (LimitLaw::Normal, sigma * value.sqrt()),
        MixingLaw::Exponential { mean } => (LimitLaw::Laplace, sigma * mean.sqrt()),
        MixingLaw::Gamma { shape, scale } => {
            (LimitLaw::VarianceGamma { shape }, sigma * scale.sqrt())
        }
        MixingLaw::InverseGamma { shape, rate } => (
            LimitLaw::Student { shape: 2.0 * shape },
            sigma * (rate / shape).sqrt(),
        ),
    }
}

/// Mixed-Poisson random sum (size N | Λ ~ Poisson(Λ)):
/// (1.8546/σ²)·E[X²·E min{1, |X|/(σ√Λ)}], requiring E Λ < ∞.
pub fn bound_mixed_poisson(d: &SummandDistribution, m: &MixingLaw) -> Result<BoundReport> {
    m.validate()?;
    m.mean()?;
    match *m {
        MixingLaw::Gamma { shape, .. } => {
            if shape <= 0.5 {
                return Err(Error::domain(format!(
                    "gamma mixing shape must exceed 1/2, got {shape}"
                )));
            }
            checked_gamma(shape)?;
        }
        MixingLaw::InverseGamma { shape, .. } => {
            checked_gamma(shape + 0.5)?;
        }
        _ => {}
    }
    let sigma = d.sigma();
    let law = *m;
    let g = GrowthFunction::new("mixed-min-kernel", move |x: f64| {
        if x == 0.0 {
            0.0
        } else {
            mixed_min_kernel(&law, x.abs() / sigma)
        }
    });
    let num = d.weighted_second_moment(&g)?;
    if !num.is_finite() {
        return Err(Error::Unbounded(
            "weighted second moment under the mixing kernel diverges".into(),
        ));
    }
    let b = UNIVERSAL_IID * num / d.variance();
    let (limit_law, normalization) = mixed_limit(m, sigma);
    Ok(BoundReport {
        kind: BoundKind::MixedPoisson,
        bound_value: b,
        constant_used: UNIVERSAL_IID,
        gamma: None,
        lindeberg: None,
        lyapunov: None,
        normalization,
        limit_law,
    })
}

/// E[X²·w(X)] with a 0-at-0 guard, reusing the family-exact moment routes.
fn expect_x2_weighted(
    d: &SummandDistribution,
    label: &str,
    w: impl Fn(f64) -> f64 + Send + Sync + 'static,
) -> Result<f64> {
    let g = GrowthFunction::new(label, move |x: f64| if x == 0.0 { 0.0 } else { w(x) });
    let v = d.weighted_second_moment(&g)?;
    if !v.is_finite() {
        return Err(Error::Unbounded(format!(
            "expectation under weight {label} diverges"
        )));
    }
    Ok(v)
}

/// Geometric random sum with mean n:
/// (1.8546/σ²)·{E[X²·γ(1, Z)] + (σ√n)⁻¹·E[|X|³·Γ(½, Z)]}, Z = X²/(nσ²).
/// Approximating law: Laplace under normalization σ√n.
pub fn bound_geometric(d: &SummandDistribution, n: u64) -> Result<BoundReport> {
    check_count(n)?;
    let nf = n as f64;
    let sigma = d.sigma();
    let s2n = d.variance() * nf;
    let term1 = expect_x2_weighted(d, "geometric-head", move |x| lig(1.0, x * x / s2n))?;
    let term2 = expect_x2_weighted(d, "geometric-tail", move |x| {
        x.abs() * uig(0.5, x * x / s2n)
    })?;
    let b = UNIVERSAL_IID / d.variance() * (term1 + term2 / (sigma * nf.sqrt()));
    Ok(BoundReport {
        kind: BoundKind::Geometric,
        bound_value: b,
        constant_used: UNIVERSAL_IID,
        gamma: None,
        lindeberg: None,
        lyapunov: None,
        normalization: sigma * nf.sqrt(),
        limit_law: LimitLaw::Laplace,
    })
}

/// Negative binomial random sum (shape r > ½, mean n·r):
/// (1.8546/(σ²Γ(r)))·{E[X²·γ(r, Z)] + (σ√n)⁻¹·E[|X|³·Γ(r−½, Z)]},
/// Z = X²/(nσ²). Approximating law: variance-gamma of shape r under
/// normalization σ√n; r = 1 recovers [`bound_geometric`].
pub fn bound_negative_binomial(d: &SummandDistribution, n: u64, r: f64) -> Result<BoundReport> {
    check_count(n)?;
    require_finite("shape", r)?;
    if r <= 0.5 {
        return Err(Error::domain(format!(
            "negative binomial shape must exceed 1/2, got {r}"
        )));
    }
    let gr = checked_gamma(r)?;
    let nf = n as f64;
    let sigma = d.sigma();
    let s2n = d.variance() * nf;
    let term1 = expect_x2_weighted(d, "nb-head", move |x| lig(r, x * x / s2n))?;
    let term2 = expect_x2_weighted(d, "nb-tail", move |x| {
        x.abs() * uig(r - 0.5, x * x / s2n)
    })?;
    let b = UNIVERSAL_IID / (d.variance() * gr) * (term1 + term2 / (sigma * nf.sqrt()));
    Ok(BoundReport {
        kind: BoundKind::NegativeBinomial,
        bound_value: b,
        constant_used: UNIVERSAL_IID,
        gamma: None,
        lindeberg: None,
        lyapunov: None,
        normalization: sigma * nf.sqrt(),
        limit_law: LimitLaw::VarianceGamma { shape: r },
    })
}

/// Poisson-inverse-gamma (Sichel) random sum (shape r > 2):
/// (1.8546/(σ²Γ(r/2)))·{E[X²·Γ(r/2, W)] + σ⁻¹√(2/n)·E[|X|³·γ((r+1)/2, W)]},
/// W = nσ²/(2X²). Approximating law: Student of shape r under
/// normalization σ√(n/r). Atoms at X = 0 contribute 0 to both terms.
pub fn bound_sichel(d: &SummandDistribution, n: u64, r: f64) -> Result<BoundReport> {
    check_count(n)?;
    require_finite("shape", r)?;
    if r <= 2.0 {
        return Err(Error::MeanUndefined(format!(
            "the mixing variable has no mean unless the shape exceeds 2, got {r}"
        )));
    }
    let gr = checked_gamma(r / 2.0)?;
    checked_gamma((r + 1.0) / 2.0)?;
    let nf = n as f64;
    let sigma = d.sigma();
    let half_s2n = 0.5 * d.variance() * nf;
    let term1 = expect_x2_weighted(d, "sichel-head", move |x| uig(r / 2.0, half_s2n / (x * x)))?;
    let term2 = expect_x2_weighted(d, "sichel-tail", move |x| {
        x.abs() * lig((r + 1.0) / 2.0, half_s2n / (x * x))
    })?;
    let b = UNIVERSAL_IID / (d.variance() * gr)
        * (term1 + term2 * (2.0 / nf).sqrt() / sigma);
    Ok(BoundReport {
        kind: BoundKind::Sichel,
        bound_value: b,
        constant_used: UNIVERSAL_IID,
        gamma: None,
        lindeberg: None,
        lyapunov: None,
        normalization: sigma * (nf / r).sqrt(),
        limit_law: LimitLaw::Student { shape: r },
    })
}

/// Exact total-variation distance Σₖ |P(Bin(n,p)=k) − P(Poisson(np)=k)|,
/// which stays below 2p·min{2, np}.
pub fn tv_binomial_poisson(n: u64, p: f64) -> Result<f64> {
    check_count(n)?;
    require_finite("success probability", p)?;
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::domain(format!(
            "success probability must lie in [0, 1], got {p}"
        )));
    }
    if p == 0.0 {
        return Ok(0.0);
    }
    let nf = n as f64;
    let lambda = nf * p;
    let ln_lambda = lambda.ln();
    let kmax = n.max((lambda + 20.0 * lambda.sqrt() + 30.0).ceil() as u64);
    let ln_n1 = ln_gamma_raw(nf + 1.0);
    let (ln_p, ln_q) = (p.ln(), (1.0 - p).ln());
    let mut total = 0.0;
    for k in 0..=kmax {
        let kf = k as f64;
        let ln_k1 = ln_gamma_raw(kf + 1.0);
        let binom = if p == 1.0 {
            if k == n {
                1.0
            } else {
                0.0
            }
        } else if k > n {
            0.0
        } else {
            (ln_n1 - ln_k1 - ln_gamma_raw(nf - kf + 1.0) + kf * ln_p + (nf - kf) * ln_q).exp()
        };
        let pois = (kf * ln_lambda - lambda - ln_k1).exp();
        total += (binom - pois).abs();
    }
    debug_assert!(total <= 2.0 * p * lambda.min(2.0) + 1e-12);
    Ok(total)
}

/// Every hard-coded numeric constant the bound evaluators rely on, by role.
pub fn constants_registry() -> Vec<(&'static str, f64)> {
    vec![
        ("universal-general", UNIVERSAL_GENERAL),
        ("universal-iid", UNIVERSAL_IID),
        ("poisson-third-moment", POISSON_THIRD_MOMENT),
        ("minimax-cap", MINIMAX_CAP),
        ("third-moment-limit-general", ConstantVariant::General.be_constant()),
        ("third-moment-limit-iid", ConstantVariant::IidGeneral.be_constant()),
        ("truncation-centering", centering_constant()),
    ]
}

/// FNV-1a digest of the registry; changes whenever any constant changes.
pub fn registry_hash() -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for (name, value) in constants_registry() {
        for b in format!("{name}={value:.12e};").bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn rademacher() -> SummandDistribution {
        SummandDistribution::rademacher()
    }

    fn asymmetric_lattice(scale: f64) -> SummandDistribution {
        SummandDistribution::finite_lattice(vec![
            (-scale, 2.0 / 3.0),
            (2.0 * scale, 1.0 / 3.0),
        ])
        .unwrap()
    }

    #[test]
    fn fixed_n_examples() {
        let r = rademacher();
        let b1 = bound_fixed_n(&r, 1, ConstantVariant::IidGeneral).unwrap();
        assert_eq!(b1.gamma, Some(0.0));
        assert_relative_eq!(b1.bound_value, 1.8546, max_relative = 1e-12);

        let b4 = bound_fixed_n(&r, 4, ConstantVariant::IidGeneral).unwrap();
        assert_eq!(b4.gamma, Some(f64::INFINITY));
        assert_relative_eq!(b4.bound_value, 0.4690 * 0.5, max_relative = 1e-12);
        assert_eq!(b4.normalization, 2.0);
        assert_eq!(b4.limit_law, LimitLaw::Normal);
    }

    #[test]
    fn fixed_n_symmetry_precondition() {
        let d = asymmetric_lattice(1.0);
        for v in [ConstantVariant::Symmetric, ConstantVariant::IidSymmetric] {
            assert!(matches!(bound_fixed_n(&d, 3, v), Err(Error::Precondition(_))));
        }
        assert!(bound_fixed_n(&d, 3, ConstantVariant::General).is_ok());
    }

    #[test]
    fn fixed_n_hetero_rejects_iid_variants() {
        let ds = vec![rademacher(), SummandDistribution::two_point_symmetric(2.0).unwrap()];
        for v in [ConstantVariant::IidGeneral, ConstantVariant::IidSymmetric] {
            assert!(matches!(bound_fixed_n_hetero(&ds, v), Err(Error::Precondition(_))));
        }
        let b = bound_fixed_n_hetero(&ds, ConstantVariant::General).unwrap();
        assert_eq!(b.gamma, Some(f64::INFINITY));
        assert_relative_eq!(b.bound_value, 0.5583 * 9.0 / 5f64.powf(1.5), max_relative = 1e-12);

        let bs = bound_fixed_n_hetero(&ds, ConstantVariant::Symmetric).unwrap();
        assert_relative_eq!(bs.bound_value, b.bound_value, max_relative = 1e-12);
    }

    #[test]
    fn fraction_sum_matches_and_is_minimal_at_one() {
        let r = rademacher();
        let b = bound_fraction_sum(&r, 4, 1.0).unwrap();
        assert_relative_eq!(b.bound_value, 1.8627 * 0.5, max_relative = 1e-12);

        let u = SummandDistribution::uniform_symmetric(2.0).unwrap();
        let at_one = bound_fraction_sum(&u, 3, 1.0).unwrap().bound_value;
        for eps in [0.25, 0.5, 2.0, 5.0] {
            let other = bound_fraction_sum(&u, 3, eps).unwrap().bound_value;
            assert!(at_one <= other + 1e-12, "eps={eps}: {at_one} > {other}");
        }
    }

    #[test]
    fn growth_bound_examples() {
        let r = rademacher();
        let b = bound_growth(&r, 4, &GrowthFunction::abs(), UNIVERSAL_IID).unwrap();
        assert_relative_eq!(b.bound_value, 1.8546 / 2.0, max_relative = 1e-12);

        let capped = GrowthFunction::abs_capped(1.0).unwrap();
        let bc = bound_growth(&r, 4, &capped, UNIVERSAL_IID).unwrap();
        assert_relative_eq!(bc.bound_value, 1.8546, max_relative = 1e-12);

        let bad = GrowthFunction::new("decreasing", |x: f64| 1.0 / (1.0 + x.abs()));
        assert!(matches!(
            bound_growth(&r, 4, &bad, UNIVERSAL_IID),
            Err(Error::Precondition(_))
        ));

        let pareto = SummandDistribution::symmetric_pareto(2.5, 1.0).unwrap();
        assert!(matches!(
            bound_growth(&pareto, 4, &GrowthFunction::abs(), UNIVERSAL_IID),
            Err(Error::Unbounded(_))
        ));
        assert!(bound_growth(&pareto, 4, &capped, UNIVERSAL_IID).is_ok());

        assert!(matches!(
            bound_growth(&r, 4, &GrowthFunction::abs(), -1.0),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn poisson_binomial_examples() {
        let r = rademacher();
        let b = bound_poisson_binomial(&r, &[0.5, 0.5]).unwrap();
        assert_relative_eq!(b.bound_value, 1.8627, max_relative = 1e-12);

        let b9 = bound_poisson_binomial(&r, &vec![1.0; 9]).unwrap();
        assert_relative_eq!(b9.bound_value, 1.8627 / 3.0, max_relative = 1e-12);
        assert_eq!(b9.normalization, 3.0);

        assert!(matches!(bound_poisson_binomial(&r, &[]), Err(Error::Usage(_))));
        assert!(matches!(bound_poisson_binomial(&r, &[0.5, 0.0]), Err(Error::Domain(_))));
        assert!(matches!(bound_poisson_binomial(&r, &[1.2]), Err(Error::Domain(_))));
    }

    #[test]
    fn thinned_bounds_agree_across_size_laws() {
        let r = rademacher();
        let pb = bound_poisson_binomial(&r, &vec![1.0; 9]).unwrap();
        let bin = bound_binomial(&r, 9, 1.0).unwrap();
        let poi = bound_poisson(&r, 9.0).unwrap();
        assert_relative_eq!(
            pb.bound_value / UNIVERSAL_GENERAL,
            bin.bound_value / UNIVERSAL_IID,
            max_relative = 1e-14
        );
        assert_relative_eq!(bin.bound_value, poi.bound_value, max_relative = 1e-14);
        assert_relative_eq!(poi.bound_value, 1.8546 / 3.0, max_relative = 1e-12);

        let small = bound_poisson(&r, 0.25).unwrap();
        assert_relative_eq!(small.bound_value, 1.8546, max_relative = 1e-12);
    }

    #[test]
    fn random_sum_bounds_decrease_in_size() {
        let u = SummandDistribution::uniform_symmetric(1.0).unwrap();
        let mut last = f64::INFINITY;
        for k in 0..10 {
            let lambda = 0.25 * 2f64.powi(k);
            let b = bound_poisson(&u, lambda).unwrap().bound_value;
            assert!(b <= last + 1e-12);
            last = b;
        }
        let mut last = f64::INFINITY;
        for n in [1u64, 2, 4, 8, 16, 64, 256, 1024] {
            let b = bound_geometric(&u, n).unwrap().bound_value;
            assert!(b <= last + 1e-12);
            last = b;
        }
    }

    #[test]
    fn growth_random_examples() {
        let r = rademacher();
        let g = GrowthFunction::abs();
        let bp = bound_poisson_growth(&r, 4.0, &g).unwrap();
        assert_relative_eq!(bp.bound_value, 1.8546 / 2.0, max_relative = 1e-12);

        let pb = bound_poisson_binomial_growth(&r, &[1.0; 4], &g).unwrap();
        let det = bound_growth(&r, 4, &g, UNIVERSAL_GENERAL).unwrap();
        assert_relative_eq!(pb.bound_value, det.bound_value, max_relative = 1e-14);

        let bb = bound_binomial_growth(&r, 8, 0.5, &g).unwrap();
        assert_relative_eq!(bb.bound_value, bp.bound_value, max_relative = 1e-14);

        let cap2 = GrowthFunction::abs_capped(2.0).unwrap();
        let b4 = bound_poisson_growth(&r, 4.0, &cap2).unwrap();
        assert_relative_eq!(b4.bound_value, 1.8546 * 1.0 / 2.0, max_relative = 1e-12);
    }

    #[test]
    fn third_moment_poisson_examples() {
        let r = rademacher();
        let b = bound_third_moment_poisson(&r, 100.0).unwrap();
        assert_relative_eq!(b.bound_value, 0.03031, max_relative = 1e-12);

        let b1 = bound_third_moment_poisson(&r, 25.0).unwrap();
        let b4 = bound_third_moment_poisson(&r, 100.0).unwrap();
        assert_relative_eq!(b1.bound_value, 2.0 * b4.bound_value, max_relative = 1e-12);

        let pareto = SummandDistribution::symmetric_pareto(2.5, 1.0).unwrap();
        assert!(matches!(
            bound_third_moment_poisson(&pareto, 4.0),
            Err(Error::Unbounded(_))
        ));
    }

    #[test]
    fn geometric_frozen_values() {
        let r = rademacher();
        let b1 = bound_geometric(&r, 1).unwrap();
        assert_relative_eq!(
            b1.bound_value,
            UNIVERSAL_IID * (lig(1.0, 1.0) + uig(0.5, 1.0)),
            max_relative = 1e-13
        );
        assert_abs_diff_eq!(b1.bound_value, 1.6894036268649455, epsilon = 1e-12);
        assert_eq!(b1.limit_law, LimitLaw::Laplace);
        assert_eq!(b1.normalization, 1.0);

        let b50 = bound_geometric(&r, 50).unwrap();
        assert_abs_diff_eq!(b50.bound_value, 0.42791042701387094, epsilon = 1e-12);
    }

    #[test]
    fn negative_binomial_matches_geometric_at_shape_one() {
        let r = rademacher();
        for n in [1u64, 7] {
            let geo = bound_geometric(&r, n).unwrap().bound_value;
            let nb = bound_negative_binomial(&r, n, 1.0).unwrap().bound_value;
            assert_relative_eq!(geo, nb, max_relative = 1e-12);
        }
        let u = SummandDistribution::uniform_symmetric(1.7).unwrap();
        let geo = bound_geometric(&u, 5).unwrap().bound_value;
        let nb = bound_negative_binomial(&u, 5, 1.0).unwrap().bound_value;
        assert_relative_eq!(geo, nb, max_relative = 1e-9);

        let frozen = bound_negative_binomial(&r, 50, 2.0).unwrap();
        assert_abs_diff_eq!(frozen.bound_value, 0.23231698374958124, epsilon = 1e-12);
        assert_eq!(frozen.limit_law, LimitLaw::VarianceGamma { shape: 2.0 });

        assert!(matches!(
            bound_negative_binomial(&r, 4, 0.5),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn sichel_frozen_and_edge_cases() {
        let r = rademacher();
        let b = bound_sichel(&r, 50, 4.0).unwrap();
        assert_abs_diff_eq!(b.bound_value, 0.49307893676976916, epsilon = 1e-12);
        assert_eq!(b.limit_law, LimitLaw::Student { shape: 4.0 });
        assert_relative_eq!(b.normalization, (50.0f64 / 4.0).sqrt(), max_relative = 1e-15);

        assert!(matches!(bound_sichel(&r, 4, 2.0), Err(Error::MeanUndefined(_))));

        let with_zero = SummandDistribution::finite_lattice(vec![
            (-1.0, 0.25),
            (0.0, 0.5),
            (1.0, 0.25),
        ])
        .unwrap();
        let bz = bound_sichel(&with_zero, 10, 3.0).unwrap();
        assert!(bz.bound_value.is_finite() && bz.bound_value > 0.0);

        let mut last = f64::INFINITY;
        for n in [1u64, 2, 4, 8, 16, 64, 256, 1024, 4096] {
            let v = bound_sichel(&r, n, 4.0).unwrap().bound_value;
            assert!(v <= last + 1e-12, "not decreasing at n={n}");
            last = v;
        }
    }

    #[test]
    fn mixed_poisson_consistency() {
        let r = rademacher();

        let deg = bound_mixed_poisson(&r, &MixingLaw::Degenerate { value: 9.0 }).unwrap();
        let poi = bound_poisson(&r, 9.0).unwrap();
        assert_relative_eq!(deg.bound_value, poi.bound_value, max_relative = 1e-14);
        assert_eq!(deg.limit_law, LimitLaw::Normal);

        for n in [1u64, 7] {
            let exp = bound_mixed_poisson(&r, &MixingLaw::Exponential { mean: n as f64 }).unwrap();
            let geo = bound_geometric(&r, n).unwrap();
            assert_relative_eq!(exp.bound_value, geo.bound_value, max_relative = 1e-10);
            assert_eq!(exp.limit_law, LimitLaw::Laplace);
            assert_relative_eq!(exp.normalization, geo.normalization, max_relative = 1e-15);
        }

        let gam = bound_mixed_poisson(&r, &MixingLaw::Gamma { shape: 2.0, scale: 50.0 }).unwrap();
        let nb = bound_negative_binomial(&r, 50, 2.0).unwrap();
        assert_relative_eq!(gam.bound_value, nb.bound_value, max_relative = 1e-10);
        assert_eq!(gam.limit_law, LimitLaw::VarianceGamma { shape: 2.0 });

        let ig = bound_mixed_poisson(&r, &MixingLaw::InverseGamma { shape: 2.0, rate: 25.0 })
            .unwrap();
        let sic = bound_sichel(&r, 50, 4.0).unwrap();
        assert_relative_eq!(ig.bound_value, sic.bound_value, max_relative = 1e-10);
        assert_eq!(ig.limit_law, LimitLaw::Student { shape: 4.0 });
        assert_relative_eq!(ig.normalization, sic.normalization, max_relative = 1e-15);

        assert!(matches!(
            bound_mixed_poisson(&r, &MixingLaw::InverseGamma { shape: 1.0, rate: 4.0 }),
            Err(Error::MeanUndefined(_))
        ));
        assert!(matches!(
            bound_mixed_poisson(&r, &MixingLaw::Gamma { shape: 0.4, scale: 4.0 }),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn mixed_poisson_uniform_summands() {
        let u = SummandDistribution::uniform_symmetric(2.0).unwrap();
        let exp = bound_mixed_poisson(&u, &MixingLaw::Exponential { mean: 6.0 }).unwrap();
        let geo = bound_geometric(&u, 6).unwrap();
        assert_relative_eq!(exp.bound_value, geo.bound_value, max_relative = 1e-8);
    }

    #[test]
    fn bounds_are_scale_invariant() {
        for c in [0.5, 3.0] {
            let base = asymmetric_lattice(1.0);
            let scaled = asymmetric_lattice(c);

            let f = |d: &SummandDistribution| -> Vec<f64> {
                vec![
                    bound_fixed_n(d, 5, ConstantVariant::General).unwrap().bound_value,
                    bound_fraction_sum(d, 5, 0.7).unwrap().bound_value,
                    bound_poisson(d, 3.0).unwrap().bound_value,
                    bound_poisson_binomial(d, &[0.3, 0.9, 1.0]).unwrap().bound_value,
                    bound_geometric(d, 3).unwrap().bound_value,
                    bound_negative_binomial(d, 3, 1.5).unwrap().bound_value,
                    bound_sichel(d, 3, 5.0).unwrap().bound_value,
                    bound_growth(d, 5, &GrowthFunction::power(0.5).unwrap(), UNIVERSAL_GENERAL)
                        .unwrap()
                        .bound_value,
                    bound_third_moment_poisson(d, 2.0).unwrap().bound_value,
                ]
            };
            let a = f(&base);
            let b = f(&scaled);
            for (i, (x, y)) in a.iter().zip(&b).enumerate() {
                assert_relative_eq!(x, y, max_relative = 1e-10);
                assert!(x.is_finite(), "entry {i} not finite");
            }
        }
    }

    #[test]
    fn tv_binomial_poisson_values() {
        let exact = tv_binomial_poisson(1, 1.0).unwrap();
        assert_abs_diff_eq!(exact, 2.0 - 2.0 * (-1.0f64).exp(), epsilon = 1e-13);

        let v = tv_binomial_poisson(10, 0.1).unwrap();
        assert!(v > 0.0 && v <= 0.2);

        let mut last = f64::INFINITY;
        for (n, p) in [(10u64, 0.1), (100, 0.01), (1000, 0.001)] {
            let t = tv_binomial_poisson(n, p).unwrap();
            assert!(t < last);
            assert!(t <= 2.0 * p * (n as f64 * p).min(2.0) + 1e-12);
            last = t;
        }
        assert_eq!(tv_binomial_poisson(5, 0.0).unwrap(), 0.0);
        assert!(matches!(tv_binomial_poisson(0, 0.5), Err(Error::Domain(_))));
    }

    #[test]
    fn registry_is_stable() {
        let reg = constants_registry();
        assert_eq!(reg.len(), 7);
        assert!(reg.iter().any(|&(n, v)| n == "universal-general" && v == 1.8627));
        assert!(reg.iter().any(|&(n, v)| n == "universal-iid" && v == 1.8546));
        assert_eq!(registry_hash(), registry_hash());
        assert_ne!(registry_hash(), 0);
    }
}
