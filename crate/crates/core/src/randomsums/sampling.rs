//! Reproducible Monte-Carlo sampling of random sums, and the empirical
//! Kolmogorov distance of a sample against a limit law.

use crate::dists::{SummandDistribution, SummandKind};
use crate::error::{require_finite, Error, Result};
use crate::limitlaws::LimitLaw;
use crate::randomsums::counting::CountingLaw;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution, Gamma, Geometric, Poisson};
use rayon::prelude::*;

/// Generator identity recorded alongside Monte-Carlo results.
pub const GENERATOR: &str = "chacha8, splitmix64-derived substream per replication";

/// Mixing rates beyond this are clamped before Poisson sampling; the
/// clamp is unreachable for the parameter ranges the bounds accept.
const MAX_MIXED_RATE: f64 = 1e9;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of replication `rep`: a splitmix64 hash of the master seed and
/// the replication index, so every replication owns a fixed stream no
/// matter how work is scheduled across threads.
fn substream(seed: u64, rep: u64) -> u64 {
    splitmix64(seed ^ (rep.wrapping_add(1)).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

enum SummandSampler {
    Table { cum: Vec<f64>, values: Vec<f64> },
    Rademacher,
    TwoPoint(f64),
    Uniform(f64),
    Pareto { inv_alpha: f64, scale: f64 },
}

impl SummandSampler {
    fn new(d: &SummandDistribution) -> Self {
        match d.kind() {
            SummandKind::FiniteLattice { atoms } => {
                let mut cum = Vec::with_capacity(atoms.len());
                let mut values = Vec::with_capacity(atoms.len());
                let mut acc = 0.0;
                for &(v, p) in atoms {
                    acc += p;
                    cum.push(acc);
                    values.push(v);
                }
                SummandSampler::Table { cum, values }
            }
            SummandKind::Rademacher => SummandSampler::Rademacher,
            SummandKind::TwoPointSymmetric { scale } => SummandSampler::TwoPoint(*scale),
            SummandKind::UniformSymmetric { halfwidth } => SummandSampler::Uniform(*halfwidth),
            SummandKind::SymmetricPareto { alpha, scale } => {
                SummandSampler::Pareto { inv_alpha: 1.0 / alpha, scale: *scale }
            }
        }
    }

    fn draw(&self, rng: &mut ChaCha8Rng) -> f64 {
        match self {
            SummandSampler::Table { cum, values } => {
                let u: f64 = rng.random();
                let i = cum.partition_point(|&c| c <= u).min(values.len() - 1);
                values[i]
            }
            SummandSampler::Rademacher => {
                if rng.random::<bool>() {
                    1.0
                } else {
                    -1.0
                }
            }
            SummandSampler::TwoPoint(scale) => {
                if rng.random::<bool>() {
                    *scale
                } else {
                    -*scale
                }
            }
            SummandSampler::Uniform(halfwidth) => halfwidth * (2.0 * rng.random::<f64>() - 1.0),
            SummandSampler::Pareto { inv_alpha, scale } => {
                let u = 1.0 - rng.random::<f64>();
                let magnitude = scale * u.powf(-inv_alpha);
                if rng.random::<bool>() {
                    magnitude
                } else {
                    -magnitude
                }
            }
        }
    }
}

enum CountSampler<'a> {
    PoissonBinomial(&'a [f64]),
    Binomial(Binomial),
    Poisson(Poisson<f64>),
    Geometric(Geometric),
    /// Negative binomial as Poisson with a gamma-mixed rate.
    GammaPoisson(Gamma<f64>),
    /// Poisson-inverse-gamma as Poisson with rate 1/G, G gamma.
    InverseGammaPoisson(Gamma<f64>),
}

impl<'a> CountSampler<'a> {
    fn new(law: &'a CountingLaw) -> Result<Self> {
        Ok(match law {
            CountingLaw::PoissonBinomial { probs } => CountSampler::PoissonBinomial(probs),
            CountingLaw::Binomial { n, p } => CountSampler::Binomial(
                Binomial::new(*n, *p)
                    .map_err(|e| Error::Numeric(format!("binomial sampler: {e}")))?,
            ),
            CountingLaw::Poisson { lambda } => CountSampler::Poisson(
                Poisson::new(*lambda)
                    .map_err(|e| Error::Numeric(format!("poisson sampler: {e}")))?,
            ),
            CountingLaw::Geometric { n } => CountSampler::Geometric(
                Geometric::new(1.0 / (*n as f64 + 1.0))
                    .map_err(|e| Error::Numeric(format!("geometric sampler: {e}")))?,
            ),
            CountingLaw::NegativeBinomial { r, n } => CountSampler::GammaPoisson(
                Gamma::new(*r, *n as f64)
                    .map_err(|e| Error::Numeric(format!("gamma mixing sampler: {e}")))?,
            ),
            CountingLaw::PoissonInverseGamma { r, n } => CountSampler::InverseGammaPoisson(
                Gamma::new(0.5 * r, 2.0 / *n as f64)
                    .map_err(|e| Error::Numeric(format!("gamma mixing sampler: {e}")))?,
            ),
        })
    }

    fn draw(&self, rng: &mut ChaCha8Rng) -> u64 {
        match self {
            CountSampler::PoissonBinomial(probs) => {
                probs.iter().filter(|&&p| rng.random::<f64>() < p).count() as u64
            }
            CountSampler::Binomial(b) => b.sample(rng),
            CountSampler::Poisson(p) => p.sample(rng) as u64,
            CountSampler::Geometric(g) => g.sample(rng),
            CountSampler::GammaPoisson(g) => mixed_poisson_draw(g.sample(rng), rng),
            CountSampler::InverseGammaPoisson(g) => {
                mixed_poisson_draw(1.0 / g.sample(rng).max(1e-300), rng)
            }
        }
    }
}

fn mixed_poisson_draw(rate: f64, rng: &mut ChaCha8Rng) -> u64 {
    let rate = rate.min(MAX_MIXED_RATE);
    if rate <= 0.0 {
        return 0;
    }
    Poisson::new(rate).expect("clamped rate is valid").sample(rng) as u64
}

/// Draw m independent replications of the random sum S = Σ_{i≤N} X_i.
/// Replication i uses its own substream of the master seed, so results
/// are identical across thread counts and runs.
pub fn sample_random_sum(
    d: &SummandDistribution,
    law: &CountingLaw,
    seed: u64,
    replications: u64,
) -> Result<Vec<f64>> {
    law.validate()?;
    if replications == 0 {
        return Err(Error::usage("replication count must be at least 1"));
    }
    let summand = SummandSampler::new(d);
    let count = CountSampler::new(law)?;
    Ok((0..replications)
        .into_par_iter()
        .map(|rep| {
            let mut rng = ChaCha8Rng::seed_from_u64(substream(seed, rep));
            let n = count.draw(&mut rng);
            let mut sum = 0.0;
            for _ in 0..n {
                sum += summand.draw(&mut rng);
            }
            sum
        })
        .collect())
}

/// Kolmogorov distance between the empirical law of a sample and
/// G(x/normalization), taking both one-sided limits at tied values.
pub fn empirical_kolmogorov(
    sample: &[f64],
    limit: &LimitLaw,
    normalization: f64,
) -> Result<f64> {
    require_finite("normalization", normalization)?;
    if normalization <= 0.0 {
        return Err(Error::domain(format!(
            "normalization must be positive, got {normalization}"
        )));
    }
    if sample.is_empty() {
        return Err(Error::usage("sample must be nonempty"));
    }
    let mut sorted = sample.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("samples are finite"));
    let m = sorted.len() as f64;
    let mut dist = 0.0f64;
    let mut i = 0;
    while i < sorted.len() {
        let mut j = i + 1;
        while j < sorted.len() && sorted[j] == sorted[i] {
            j += 1;
        }
        let g = limit.cdf(sorted[i] / normalization)?;
        dist = dist.max((i as f64 / m - g).abs());
        dist = dist.max((j as f64 / m - g).abs());
        i = j;
    }
    Ok(dist)
}
