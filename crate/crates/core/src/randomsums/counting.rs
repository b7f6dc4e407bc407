//! Counting laws for random sums: the six supported size distributions,
//! their exact pmfs, and truncation points for the exact convolution oracle.

use crate::error::{require_finite, Error, Result};
use crate::quad::adaptive_simpson;
use crate::specfun::ln_gamma_raw;

/// Longest pmf prefix any exact computation may materialize.
const MAX_SUPPORT: usize = 2_000_000;

/// Distribution of the number of summands N.
#[derive(Clone, Debug, PartialEq)]
pub enum CountingLaw {
    /// N = Σⱼ 1(ξⱼ ≤ pⱼ) over independent uniforms; support 0..=len.
    PoissonBinomial { probs: Vec<f64> },
    Binomial { n: u64, p: f64 },
    Poisson { lambda: f64 },
    /// P(N=k) = (1/(n+1))·(n/(n+1))^k; mean n.
    Geometric { n: u64 },
    /// P(N=k) = Γ(r+k)/(Γ(r)k!)·(1+n)^{−r}·(n/(1+n))^k; mean n·r.
    NegativeBinomial { r: f64, n: u64 },
    /// Mixed Poisson with Λ ~ InverseGamma(r/2, n/2); mean n/(r−2) for r > 2.
    PoissonInverseGamma { r: f64, n: u64 },
}

impl CountingLaw {
    pub fn validate(&self) -> Result<()> {
        match self {
            CountingLaw::PoissonBinomial { probs } => {
                if probs.is_empty() {
                    return Err(Error::usage("probability vector must be nonempty"));
                }
                for &p in probs {
                    check_prob(p)?;
                }
            }
            CountingLaw::Binomial { n, p } => {
                check_size(*n)?;
                check_prob(*p)?;
            }
            CountingLaw::Poisson { lambda } => {
                require_finite("rate", *lambda)?;
                if *lambda <= 0.0 {
                    return Err(Error::domain(format!("rate must be positive, got {lambda}")));
                }
            }
            CountingLaw::Geometric { n } => check_size(*n)?,
            CountingLaw::NegativeBinomial { r, n } | CountingLaw::PoissonInverseGamma { r, n } => {
                check_size(*n)?;
                require_finite("shape", *r)?;
                if *r <= 0.0 {
                    return Err(Error::domain(format!("shape must be positive, got {r}")));
                }
            }
        }
        Ok(())
    }

    /// Short stable name used in scenario labels.
    pub fn label(&self) -> String {
        match self {
            CountingLaw::PoissonBinomial { probs } => {
                format!("poisson-binomial(n={})", probs.len())
            }
            CountingLaw::Binomial { n, p } => format!("binomial({n},{p})"),
            CountingLaw::Poisson { lambda } => format!("poisson({lambda})"),
            CountingLaw::Geometric { n } => format!("geometric({n})"),
            CountingLaw::NegativeBinomial { r, n } => format!("negative-binomial({r},{n})"),
            CountingLaw::PoissonInverseGamma { r, n } => {
                format!("poisson-inverse-gamma({r},{n})")
            }
        }
    }
}

fn check_prob(p: f64) -> Result<()> {
    require_finite("success probability", p)?;
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::domain(format!(
            "success probability must lie in (0, 1], got {p}"
        )));
    }
    Ok(())
}

fn check_size(n: u64) -> Result<()> {
    if n == 0 {
        return Err(Error::domain("size parameter must be at least 1"));
    }
    Ok(())
}

/// P(N = k) for one support point of a Poisson-binomial law, by dynamic
/// programming over the success probabilities.
pub(crate) fn poisson_binomial_pmf(probs: &[f64]) -> Vec<f64> {
    let mut dp = vec![0.0; probs.len() + 1];
    dp[0] = 1.0;
    for (j, &p) in probs.iter().enumerate() {
        for k in (0..=j + 1).rev() {
            dp[k] = dp[k] * (1.0 - p) + if k > 0 { dp[k - 1] * p } else { 0.0 };
        }
    }
    dp
}

fn binomial_pmf(n: u64, p: f64, k: u64) -> f64 {
    if p == 1.0 {
        return if k == n { 1.0 } else { 0.0 };
    }
    if k > n {
        return 0.0;
    }
    let (nf, kf) = (n as f64, k as f64);
    (ln_gamma_raw(nf + 1.0) - ln_gamma_raw(kf + 1.0) - ln_gamma_raw(nf - kf + 1.0)
        + kf * p.ln()
        + (nf - kf) * (1.0 - p).ln())
    .exp()
}

fn poisson_pmf(lambda: f64, k: u64) -> f64 {
    let kf = k as f64;
    (kf * lambda.ln() - lambda - ln_gamma_raw(kf + 1.0)).exp()
}

fn geometric_pmf(n: u64, k: u64) -> f64 {
    let nf = n as f64;
    let q = nf / (nf + 1.0);
    (q.ln() * k as f64).exp() / (nf + 1.0)
}

fn negative_binomial_pmf(r: f64, n: u64, k: u64) -> f64 {
    let (nf, kf) = (n as f64, k as f64);
    (ln_gamma_raw(r + kf) - ln_gamma_raw(r) - ln_gamma_raw(kf + 1.0)
        + kf * (nf / (nf + 1.0)).ln()
        - r * (nf + 1.0).ln())
    .exp()
}

/// P(N = k) for the Poisson-inverse-gamma law by quadrature of the mixture
/// integral in log space, λ = e^v:
///   P(N=k) = β^α/(Γ(α)k!) ∫ exp((k−α)v − e^v − βe^{−v}) dv,
/// α = r/2, β = n/2. The exponent is expanded around its maximum so the
/// integrand is noise-free; absolute error ≈ 1e-13.
pub(crate) fn pig_pmf_quadrature(r: f64, n: u64, k: u64) -> f64 {
    let alpha = 0.5 * r;
    let beta = 0.5 * n as f64;
    let kf = k as f64;
    let nu = kf - alpha;
    // Stationary point of the exponent: e^v = x*, x*² − ν·x* − β = 0.
    let xstar = 0.5 * (nu + (nu * nu + 4.0 * beta).sqrt());
    let vstar = xstar.ln();
    let curvature = xstar + beta / xstar;
    let w = (1.0 / curvature.sqrt()).max(0.05);
    let ln_pref =
        alpha * beta.ln() - ln_gamma_raw(alpha) - ln_gamma_raw(kf + 1.0) + nu * vstar
            - xstar
            - beta / xstar;
    let mut anchors = vec![vstar - 25.0 * w - 3.0];
    for j in [-10.0, -5.0, -2.0, -1.0, 0.0, 1.0, 2.0, 5.0, 10.0] {
        anchors.push(vstar + j * w);
    }
    anchors.push(vstar + 25.0 * w + 3.0);
    let tol = 1e-13 * w;
    let mut integral = 0.0;
    for pair in anchors.windows(2) {
        integral += adaptive_simpson(
            |v| {
                let dv = v - vstar;
                (nu * dv - xstar * dv.exp_m1() - (beta / xstar) * (-dv).exp_m1()).exp()
            },
            pair[0],
            pair[1],
            tol,
        );
    }
    integral * ln_pref.exp()
}

/// Pmf prefix for the Poisson-inverse-gamma law via the three-term
/// recurrence of its Bessel-function form,
///   p(k+1) = (k−α)/(k+1)·p(k) + β/(k(k+1))·p(k−1),
/// seeded by quadrature at the two orders nearest zero and run upward for
/// k > α and downward for k < α, the two directions in which it is
/// subtraction-free.
pub(crate) fn pig_pmf_prefix(r: f64, n: u64, len: usize) -> Vec<f64> {
    let alpha = 0.5 * r;
    let beta = 0.5 * n as f64;
    let k0 = alpha.floor() as usize;
    if len <= k0 + 2 {
        return (0..len).map(|k| pig_pmf_quadrature(r, n, k as u64)).collect();
    }
    let mut p = vec![0.0; len];
    p[k0] = pig_pmf_quadrature(r, n, k0 as u64);
    p[k0 + 1] = pig_pmf_quadrature(r, n, (k0 + 1) as u64);
    for k in k0 + 1..len - 1 {
        let kf = k as f64;
        p[k + 1] = (kf - alpha) / (kf + 1.0) * p[k] + beta / (kf * (kf + 1.0)) * p[k - 1];
    }
    for k in (1..=k0).rev() {
        let kf = k as f64;
        p[k - 1] = (p[k + 1] - (kf - alpha) / (kf + 1.0) * p[k]) * kf * (kf + 1.0) / beta;
    }
    p
}

/// Exact P(N = k).
pub fn counting_pmf(law: &CountingLaw, k: u64) -> Result<f64> {
    law.validate()?;
    Ok(match law {
        CountingLaw::PoissonBinomial { probs } => {
            let dp = poisson_binomial_pmf(probs);
            dp.get(k as usize).copied().unwrap_or(0.0)
        }
        CountingLaw::Binomial { n, p } => binomial_pmf(*n, *p, k),
        CountingLaw::Poisson { lambda } => poisson_pmf(*lambda, k),
        CountingLaw::Geometric { n } => geometric_pmf(*n, k),
        CountingLaw::NegativeBinomial { r, n } => negative_binomial_pmf(*r, *n, k),
        CountingLaw::PoissonInverseGamma { r, n } => pig_pmf_quadrature(*r, *n, k),
    })
}

/// The pmf on 0..len as a vector; the Poisson-inverse-gamma case uses the
/// recurrence route, everything else the per-k closed form.
pub fn counting_pmf_prefix(law: &CountingLaw, len: usize) -> Result<Vec<f64>> {
    law.validate()?;
    if len > MAX_SUPPORT {
        return Err(Error::Resource(format!(
            "counting-law support prefix of length {len} exceeds the {MAX_SUPPORT}-cell budget"
        )));
    }
    Ok(match law {
        CountingLaw::PoissonBinomial { probs } => {
            let mut dp = poisson_binomial_pmf(probs);
            dp.resize(len.max(dp.len()), 0.0);
            dp.truncate(len);
            dp
        }
        CountingLaw::PoissonInverseGamma { r, n } => pig_pmf_prefix(*r, *n, len),
        _ => (0..len as u64).map(|k| counting_pmf_unchecked(law, k)).collect(),
    })
}

fn counting_pmf_unchecked(law: &CountingLaw, k: u64) -> f64 {
    match law {
        CountingLaw::PoissonBinomial { .. } => unreachable!("handled via prefix"),
        CountingLaw::Binomial { n, p } => binomial_pmf(*n, *p, k),
        CountingLaw::Poisson { lambda } => poisson_pmf(*lambda, k),
        CountingLaw::Geometric { n } => geometric_pmf(*n, k),
        CountingLaw::NegativeBinomial { r, n } => negative_binomial_pmf(*r, *n, k),
        CountingLaw::PoissonInverseGamma { r, n } => pig_pmf_quadrature(*r, *n, k),
    }
}

/// Smallest K with P(N > K) ≤ tail_tol, i.e. the truncation point of the
/// exact mixture. Fails when the tail needs more than the cell budget, as
/// the heavy-tailed Poisson-inverse-gamma law does for tight tolerances.
pub fn truncation_point(law: &CountingLaw, tail_tol: f64) -> Result<usize> {
    law.validate()?;
    require_finite("tail tolerance", tail_tol)?;
    if !(0.0..1.0).contains(&tail_tol) {
        return Err(Error::domain(format!(
            "tail tolerance must lie in [0, 1), got {tail_tol}"
        )));
    }
    if let CountingLaw::PoissonBinomial { probs } = law {
        return Ok(probs.len());
    }
    if let CountingLaw::Binomial { n, .. } = law {
        return Ok(*n as usize);
    }
    // Grow the prefix geometrically; the pmf beyond the mode is
    // nonincreasing for every supported law, so the residual check is sound.
    let mut len = 64;
    loop {
        let pmf = counting_pmf_prefix(law, len)?;
        let cum: f64 = pmf.iter().sum();
        if 1.0 - cum <= tail_tol {
            let mut residual = 1.0 - cum;
            for k in (0..len).rev() {
                residual += pmf[k];
                if residual > tail_tol {
                    return Ok(k);
                }
            }
            return Ok(0);
        }
        if len >= MAX_SUPPORT {
            return Err(Error::Resource(format!(
                "law {} needs more than {MAX_SUPPORT} pmf cells to reach tail tolerance \
                 {tail_tol}; use the Monte-Carlo method instead",
                law.label()
            )));
        }
        len = (len * 4).min(MAX_SUPPORT);
    }
}
