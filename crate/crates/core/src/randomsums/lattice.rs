//! Exact distributions of random sums of lattice summands, and the exact
//! Kolmogorov distance between such a distribution and a limit law.

use crate::dists::SummandDistribution;
use crate::error::{require_finite, Error, Result};
use crate::limitlaws::LimitLaw;
use crate::randomsums::counting::{counting_pmf_prefix, truncation_point, CountingLaw};

/// Largest atom index magnitude a summand may occupy on its common grid.
const MAX_ATOM_INDEX: i64 = 4_000_000;
/// Cell count the final mixture vector may occupy.
const MAX_RESULT_CELLS: usize = 20_000_000;
/// Multiply-add budget for the convolution sweep.
const MAX_CONVOLUTION_WORK: f64 = 2e9;

/// A probability distribution on the grid {origin + i·step}. The mass
/// vector may total slightly less than one when it came from a truncated
/// mixture; `total_mass` exposes the deficit.
#[derive(Clone, Debug, PartialEq)]
pub struct LatticeDistribution {
    origin: f64,
    step: f64,
    masses: Vec<f64>,
}

impl LatticeDistribution {
    /// A fully normalized lattice distribution; mass must total 1 within 1e-10.
    pub fn new(origin: f64, step: f64, masses: Vec<f64>) -> Result<Self> {
        let d = Self::from_parts(origin, step, masses)?;
        let total = d.total_mass();
        if (total - 1.0).abs() > 1e-10 {
            return Err(Error::domain(format!(
                "masses must sum to 1 within 1e-10, got {total}"
            )));
        }
        Ok(d)
    }

    pub(crate) fn from_parts(origin: f64, step: f64, masses: Vec<f64>) -> Result<Self> {
        require_finite("origin", origin)?;
        require_finite("step", step)?;
        if step <= 0.0 {
            return Err(Error::domain(format!("step must be positive, got {step}")));
        }
        if masses.is_empty() {
            return Err(Error::usage("mass vector must be nonempty"));
        }
        for &m in &masses {
            if !m.is_finite() || m < 0.0 {
                return Err(Error::domain(format!("masses must be nonnegative, got {m}")));
            }
        }
        Ok(Self { origin, step, masses })
    }

    pub fn origin(&self) -> f64 {
        self.origin
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    pub fn value(&self, i: usize) -> f64 {
        self.origin + i as f64 * self.step
    }

    pub fn total_mass(&self) -> f64 {
        self.masses.iter().sum()
    }

    /// Mass of the atom nearest x, zero when x falls between grid points.
    pub fn mass_near(&self, x: f64) -> f64 {
        let pos = (x - self.origin) / self.step;
        let i = pos.round();
        if (pos - i).abs() > 0.25 || i < 0.0 || i >= self.masses.len() as f64 {
            return 0.0;
        }
        self.masses[i as usize]
    }
}

/// Represent atom values as integer multiples of a common step, found by a
/// tolerant Euclidean reduction over the nonzero values.
pub(crate) fn lattice_grid(atoms: &[(f64, f64)]) -> Result<(f64, Vec<(i64, f64)>)> {
    let vmax = atoms.iter().map(|&(v, _)| v.abs()).fold(0.0f64, f64::max);
    if vmax == 0.0 {
        return Err(Error::domain("all atoms sit at zero"));
    }
    let eps = 1e-9 * vmax;
    let mut step = 0.0f64;
    for &(v, _) in atoms {
        if v != 0.0 {
            step = if step == 0.0 { v.abs() } else { real_gcd(step, v.abs(), eps) };
        }
    }
    let mut indexed = Vec::with_capacity(atoms.len());
    for &(v, p) in atoms {
        let idx = (v / step).round();
        if (v - idx * step).abs() > eps || idx.abs() > MAX_ATOM_INDEX as f64 {
            return Err(Error::Unsupported(format!(
                "atom values are not commensurable on a tractable common grid \
                 (value {v}, step {step})"
            )));
        }
        indexed.push((idx as i64, p));
    }
    Ok((step, indexed))
}

fn real_gcd(a: f64, b: f64, eps: f64) -> f64 {
    let (mut a, mut b) = (a.max(b), a.min(b));
    while b > eps {
        let r = (a - b * (a / b).round()).abs();
        a = b.max(r);
        b = b.min(r);
    }
    a
}

struct IndexedPmf {
    base: i64,
    mass: Vec<f64>,
}

fn convolve(a: &IndexedPmf, atoms: &[(i64, f64)]) -> IndexedPmf {
    let amin = atoms.iter().map(|&(i, _)| i).min().unwrap();
    let amax = atoms.iter().map(|&(i, _)| i).max().unwrap();
    let mut out = vec![0.0; a.mass.len() + (amax - amin) as usize];
    for (j, &m) in a.mass.iter().enumerate() {
        if m == 0.0 {
            continue;
        }
        for &(ai, ap) in atoms {
            out[j + (ai - amin) as usize] += m * ap;
        }
    }
    IndexedPmf { base: a.base + amin, mass: out }
}

/// Exact distribution of S = Σ_{i≤N} X_i for lattice summands: the
/// counting law is truncated at the smallest K with P(N > K) ≤ tail_tol
/// and the k-fold convolutions are mixed with the counting weights. The
/// result's mass deficit is at most tail_tol. Fails with a resource error,
/// pointing at the Monte-Carlo path, when the sweep exceeds its budget.
pub fn exact_random_sum(
    d: &SummandDistribution,
    law: &CountingLaw,
    tail_tol: f64,
) -> Result<LatticeDistribution> {
    let atoms = d.as_lattice_atoms().ok_or_else(|| {
        Error::Unsupported(
            "exact random-sum distributions require lattice summands; \
             use the Monte-Carlo method for continuous families"
                .into(),
        )
    })?;
    let (step, indexed) = lattice_grid(&atoms)?;
    let kstar = truncation_point(law, tail_tol)?;
    let weights = counting_pmf_prefix(law, kstar + 1)?;

    let amin = indexed.iter().map(|&(i, _)| i).min().unwrap().min(0);
    let amax = indexed.iter().map(|&(i, _)| i).max().unwrap().max(0);
    let span = (amax - amin) as f64;
    let cells = kstar as f64 * span + 1.0;
    let work = 0.5 * (kstar as f64).powi(2) * span * indexed.len() as f64;
    if cells > MAX_RESULT_CELLS as f64 || work > MAX_CONVOLUTION_WORK {
        return Err(Error::Resource(format!(
            "exact mixture needs ~{cells:.3e} cells and ~{work:.3e} operations for K*={kstar}; \
             use the Monte-Carlo method instead"
        )));
    }

    let base_res = kstar as i64 * amin;
    let mut result = vec![0.0; (kstar as i64 * (amax - amin)) as usize + 1];
    let mut cur = IndexedPmf { base: 0, mass: vec![1.0] };
    result[(-base_res) as usize] += weights[0];
    for &w in &weights[1..] {
        cur = convolve(&cur, &indexed);
        if w > 0.0 {
            let off = (cur.base - base_res) as usize;
            for (j, &m) in cur.mass.iter().enumerate() {
                result[off + j] += w * m;
            }
        }
    }

    let lo = result.iter().position(|&m| m > 0.0).unwrap_or(0);
    let hi = result.iter().rposition(|&m| m > 0.0).unwrap_or(0);
    let origin = (base_res + lo as i64) as f64 * step;
    LatticeDistribution::from_parts(origin, step, result[lo..=hi].to_vec())
}

/// Exact Kolmogorov distance sup_x |P(S ≤ x) − G(x/normalization)| between
/// a lattice distribution and a limit law, evaluated from both one-sided
/// limits at every atom. A truncation deficit contributes through the
/// flat tail above the last atom.
pub fn kolmogorov_distance_exact(
    s: &LatticeDistribution,
    limit: &LimitLaw,
    normalization: f64,
) -> Result<f64> {
    require_finite("normalization", normalization)?;
    if normalization <= 0.0 {
        return Err(Error::domain(format!(
            "normalization must be positive, got {normalization}"
        )));
    }
    let mut cum = 0.0;
    let mut dist = 0.0f64;
    for (i, &m) in s.masses().iter().enumerate() {
        let g = limit.cdf(s.value(i) / normalization)?;
        dist = dist.max((cum - g).abs());
        cum += m;
        dist = dist.max((cum - g).abs());
    }
    Ok(dist.max(1.0 - cum))
}

/// Largest pointwise gap between the distribution of a Poisson-binomial
/// random sum and the convolution of the n thinned summand laws
/// pⱼ·F + (1 − pⱼ)·δ₀. The two are equal in law; the gap certifies the
/// convolution machinery to near machine precision. Limited to n ≤ 12.
pub fn thinned_convolution_gap(d: &SummandDistribution, probs: &[f64]) -> Result<f64> {
    if probs.len() > 12 {
        return Err(Error::Precondition(
            "thinned-convolution check is limited to 12 summands".into(),
        ));
    }
    let law = CountingLaw::PoissonBinomial { probs: probs.to_vec() };
    law.validate()?;
    let left = exact_random_sum(d, &law, 0.0)?;

    let atoms = d.as_lattice_atoms().ok_or_else(|| {
        Error::Unsupported("thinned-convolution check requires lattice summands".into())
    })?;
    let (step, indexed) = lattice_grid(&atoms)?;
    let mut right = IndexedPmf { base: 0, mass: vec![1.0] };
    for &p in probs {
        let mut tilted: Vec<(i64, f64)> =
            indexed.iter().map(|&(i, q)| (i, p * q)).collect();
        match tilted.iter_mut().find(|(i, _)| *i == 0) {
            Some(zero) => zero.1 += 1.0 - p,
            None => tilted.push((0, 1.0 - p)),
        }
        right = convolve(&right, &tilted);
    }

    let left_base = (left.origin() / step).round() as i64;
    let lo = left_base.min(right.base);
    let hi = (left_base + left.masses().len() as i64 - 1)
        .max(right.base + right.mass.len() as i64 - 1);
    let mut gap = 0.0f64;
    for idx in lo..=hi {
        let a = mass_at(left.masses(), left_base, idx);
        let b = mass_at(&right.mass, right.base, idx);
        gap = gap.max((a - b).abs());
    }
    Ok(gap)
}

fn mass_at(mass: &[f64], base: i64, idx: i64) -> f64 {
    let j = idx - base;
    if j < 0 || j >= mass.len() as i64 {
        0.0
    } else {
        mass[j as usize]
    }
}
