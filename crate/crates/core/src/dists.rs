//! Summand distribution models: zero-mean, finite-variance families with
//! exact evaluators for the truncated and weighted moments the bounds
//! consume, plus the growth-function class (even g ≥ 0 with g and x/g
//! nondecreasing on the positive half-line).

use std::path::Path;
use std::sync::Arc;

use crate::error::{require_finite, Error, Result};
use crate::quad::{adaptive_simpson, panels_to_infinity};

/// Tolerance for lattice probability normalization.
const PROB_TOL: f64 = 1e-12;
/// A lattice mean beyond this cannot be silently recentered.
const MEAN_TOL: f64 = 1e-9;

#[derive(Clone, Debug)]
pub enum SummandKind {
    /// Finite discrete distribution given by (value, probability) atoms.
    FiniteLattice { atoms: Vec<(f64, f64)> },
    /// ±1 with probability 1/2 each.
    Rademacher,
    /// Uniform on [−halfwidth, halfwidth].
    UniformSymmetric { halfwidth: f64 },
    /// ±scale with probability 1/2 each.
    TwoPointSymmetric { scale: f64 },
    /// |X| is Pareto(alpha) on [scale, ∞) with a random sign; alpha > 2 keeps
    /// the variance finite while alpha ≤ 3 leaves the third moment infinite.
    SymmetricPareto { alpha: f64, scale: f64 },
}

/// A zero-mean summand X with cached variance.
#[derive(Clone, Debug)]
pub struct SummandDistribution {
    kind: SummandKind,
    sigma2: f64,
}

impl SummandDistribution {
    pub fn rademacher() -> Self {
        SummandDistribution { kind: SummandKind::Rademacher, sigma2: 1.0 }
    }

    pub fn uniform_symmetric(halfwidth: f64) -> Result<Self> {
        require_finite("halfwidth", halfwidth)?;
        if halfwidth <= 0.0 {
            return Err(Error::domain(format!("halfwidth must be positive, got {halfwidth}")));
        }
        Ok(SummandDistribution {
            kind: SummandKind::UniformSymmetric { halfwidth },
            sigma2: halfwidth * halfwidth / 3.0,
        })
    }

    pub fn two_point_symmetric(scale: f64) -> Result<Self> {
        require_finite("scale", scale)?;
        if scale <= 0.0 {
            return Err(Error::domain(format!("scale must be positive, got {scale}")));
        }
        Ok(SummandDistribution {
            kind: SummandKind::TwoPointSymmetric { scale },
            sigma2: scale * scale,
        })
    }

    pub fn symmetric_pareto(alpha: f64, scale: f64) -> Result<Self> {
        require_finite("alpha", alpha)?;
        require_finite("scale", scale)?;
        if alpha <= 2.0 {
            return Err(Error::domain(format!(
                "tail index alpha must exceed 2 for a finite variance, got {alpha}"
            )));
        }
        if scale <= 0.0 {
            return Err(Error::domain(format!("scale must be positive, got {scale}")));
        }
        Ok(SummandDistribution {
            kind: SummandKind::SymmetricPareto { alpha, scale },
            sigma2: alpha * scale * scale / (alpha - 2.0),
        })
    }

    /// Builds a finite lattice, recentering by the (tiny) sample mean.
    pub fn finite_lattice(atoms: Vec<(f64, f64)>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::usage("lattice needs at least one atom"));
        }
        for &(v, p) in &atoms {
            require_finite("atom value", v)?;
            require_finite("atom probability", p)?;
            if p < 0.0 {
                return Err(Error::domain(format!("negative probability {p} at value {v}")));
            }
        }
        let total: f64 = atoms.iter().map(|&(_, p)| p).sum();
        if (total - 1.0).abs() > PROB_TOL {
            return Err(Error::domain(format!("probabilities sum to {total}, expected 1")));
        }
        // Merge duplicates so downstream enumeration sees one atom per value.
        let mut sorted = atoms;
        sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(sorted.len());
        for (v, p) in sorted {
            match merged.last_mut() {
                Some(last) if last.0 == v => last.1 += p,
                _ => merged.push((v, p)),
            }
        }
        let mean: f64 = merged.iter().map(|&(v, p)| v * p).sum();
        if mean.abs() > MEAN_TOL {
            return Err(Error::Precondition(format!(
                "lattice mean {mean} exceeds the recentering tolerance {MEAN_TOL}"
            )));
        }
        for (v, _) in &mut merged {
            *v -= mean;
        }
        let sigma2: f64 = merged.iter().map(|&(v, p)| v * v * p).sum();
        if sigma2 <= 0.0 {
            return Err(Error::domain("lattice variance must be positive".to_string()));
        }
        Ok(SummandDistribution { kind: SummandKind::FiniteLattice { atoms: merged }, sigma2 })
    }

    /// Loads a lattice from a two-column CSV (value, probability).
    /// Lines starting with '#' and an optional textual header row are skipped.
    pub fn lattice_from_csv(path: impl AsRef<Path>) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(false)
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .flexible(false)
            .from_path(path.as_ref())
            .map_err(|e| Error::usage(format!("cannot open lattice csv: {e}")))?;
        let mut atoms = Vec::new();
        for (i, record) in reader.records().enumerate() {
            let record = record.map_err(|e| Error::usage(format!("bad csv record: {e}")))?;
            if record.len() != 2 {
                return Err(Error::usage(format!(
                    "lattice csv row {} has {} fields, expected 2",
                    i + 1,
                    record.len()
                )));
            }
            let parsed: std::result::Result<(f64, f64), _> = record[0]
                .parse::<f64>()
                .and_then(|v| record[1].parse::<f64>().map(|p| (v, p)));
            match parsed {
                Ok(pair) => atoms.push(pair),
                Err(_) if i == 0 => continue, // header row
                Err(e) => {
                    return Err(Error::usage(format!("lattice csv row {}: {e}", i + 1)));
                }
            }
        }
        SummandDistribution::finite_lattice(atoms)
    }

    pub fn kind(&self) -> &SummandKind {
        &self.kind
    }

    /// Atoms of a lattice family; None for continuous or named families.
    pub fn atoms(&self) -> Option<&[(f64, f64)]> {
        match &self.kind {
            SummandKind::FiniteLattice { atoms } => Some(atoms),
            _ => None,
        }
    }

    /// A lattice view for every discrete family (named two-point ones included).
    pub fn as_lattice_atoms(&self) -> Option<Vec<(f64, f64)>> {
        match &self.kind {
            SummandKind::FiniteLattice { atoms } => Some(atoms.clone()),
            SummandKind::Rademacher => Some(vec![(-1.0, 0.5), (1.0, 0.5)]),
            SummandKind::TwoPointSymmetric { scale } => {
                Some(vec![(-scale, 0.5), (*scale, 0.5)])
            }
            _ => None,
        }
    }

    pub fn variance(&self) -> f64 {
        self.sigma2
    }

    pub fn sigma(&self) -> f64 {
        self.sigma2.sqrt()
    }

    /// All named families are symmetric by construction; lattices are checked.
    pub fn is_symmetric(&self) -> bool {
        match &self.kind {
            SummandKind::FiniteLattice { atoms } => {
                atoms.iter().all(|&(v, p)| {
                    let target = -v;
                    atoms.iter().any(|&(w, q)| {
                        (w - target).abs() <= 1e-9 * (1.0 + v.abs()) && (q - p).abs() <= 1e-10
                    })
                })
            }
            _ => true,
        }
    }

    /// E X²·1(|X| ≥ t).
    pub fn trunc_second_moment_tail(&self, t: f64) -> Result<f64> {
        require_positive_threshold(t)?;
        Ok(match &self.kind {
            SummandKind::FiniteLattice { atoms } => {
                atoms.iter().filter(|&&(v, _)| v.abs() >= t).map(|&(v, p)| v * v * p).sum()
            }
            SummandKind::Rademacher => {
                if t <= 1.0 {
                    1.0
                } else {
                    0.0
                }
            }
            SummandKind::TwoPointSymmetric { scale } => {
                if t <= *scale {
                    self.sigma2
                } else {
                    0.0
                }
            }
            SummandKind::UniformSymmetric { halfwidth } => {
                let a = *halfwidth;
                if t >= a {
                    0.0
                } else {
                    (a * a * a - t * t * t) / (3.0 * a)
                }
            }
            SummandKind::SymmetricPareto { alpha, scale } => {
                let (al, s) = (*alpha, *scale);
                if t <= s {
                    self.sigma2
                } else {
                    al * s.powf(al) * t.powf(2.0 - al) / (al - 2.0)
                }
            }
        })
    }

    /// E X²·1(|X| < t), evaluated by its own closed form (not σ² minus tail).
    pub fn trunc_second_moment_core(&self, t: f64) -> Result<f64> {
        require_positive_threshold(t)?;
        Ok(match &self.kind {
            SummandKind::FiniteLattice { atoms } => {
                atoms.iter().filter(|&&(v, _)| v.abs() < t).map(|&(v, p)| v * v * p).sum()
            }
            SummandKind::Rademacher => {
                if t > 1.0 {
                    1.0
                } else {
                    0.0
                }
            }
            SummandKind::TwoPointSymmetric { scale } => {
                if t > *scale {
                    self.sigma2
                } else {
                    0.0
                }
            }
            SummandKind::UniformSymmetric { halfwidth } => {
                let m = t.min(*halfwidth);
                m * m * m / (3.0 * halfwidth)
            }
            SummandKind::SymmetricPareto { alpha, scale } => {
                let (al, s) = (*alpha, *scale);
                if t <= s {
                    0.0
                } else {
                    al * s.powf(al) * (s.powf(2.0 - al) - t.powf(2.0 - al)) / (al - 2.0)
                }
            }
        })
    }

    /// E|X|³·1(|X| < t).
    pub fn trunc_third_abs_moment_core(&self, t: f64) -> Result<f64> {
        require_positive_threshold(t)?;
        Ok(match &self.kind {
            SummandKind::FiniteLattice { atoms } => atoms
                .iter()
                .filter(|&&(v, _)| v.abs() < t)
                .map(|&(v, p)| v.abs().powi(3) * p)
                .sum(),
            SummandKind::Rademacher => {
                if t > 1.0 {
                    1.0
                } else {
                    0.0
                }
            }
            SummandKind::TwoPointSymmetric { scale } => {
                if t > *scale {
                    scale.powi(3)
                } else {
                    0.0
                }
            }
            SummandKind::UniformSymmetric { halfwidth } => {
                let m = t.min(*halfwidth);
                m.powi(4) / (4.0 * halfwidth)
            }
            SummandKind::SymmetricPareto { alpha, scale } => {
                let (al, s) = (*alpha, *scale);
                if t <= s {
                    0.0
                } else if (al - 3.0).abs() < 1e-12 {
                    3.0 * s.powi(3) * (t / s).ln()
                } else {
                    al * s.powf(al) * (t.powf(3.0 - al) - s.powf(3.0 - al)) / (3.0 - al)
                }
            }
        })
    }

    /// E|X|³; None when infinite.
    pub fn third_abs_moment(&self) -> Option<f64> {
        match &self.kind {
            SummandKind::FiniteLattice { atoms } => {
                Some(atoms.iter().map(|&(v, p)| v.abs().powi(3) * p).sum())
            }
            SummandKind::Rademacher => Some(1.0),
            SummandKind::TwoPointSymmetric { scale } => Some(scale.powi(3)),
            SummandKind::UniformSymmetric { halfwidth } => Some(halfwidth.powi(3) / 4.0),
            SummandKind::SymmetricPareto { alpha, scale } => {
                if *alpha > 3.0 {
                    Some(alpha * scale.powi(3) / (alpha - 3.0))
                } else {
                    None
                }
            }
        }
    }

    /// E X²·g(X); Ok(+∞) marks a divergent integral.
    pub fn weighted_second_moment(&self, g: &GrowthFunction) -> Result<f64> {
        Ok(match &self.kind {
            SummandKind::FiniteLattice { atoms } => {
                atoms.iter().map(|&(v, p)| v * v * g.eval(v) * p).sum()
            }
            SummandKind::Rademacher => g.eval(1.0),
            SummandKind::TwoPointSymmetric { scale } => self.sigma2 * g.eval(*scale),
            SummandKind::UniformSymmetric { halfwidth } => {
                let a = *halfwidth;
                let scale_hint = 1.0 + a * a * a * g.eval(a).max(1.0);
                adaptive_simpson(|x| x * x * g.eval(x), 0.0, a, 1e-13 * scale_hint) / a
            }
            SummandKind::SymmetricPareto { alpha, scale } => {
                let (al, s) = (*alpha, *scale);
                match panels_to_infinity(|x| g.eval(x) * x.powf(1.0 - al), s, 1e-10) {
                    Some(v) => al * s.powf(al) * v,
                    None => f64::INFINITY,
                }
            }
        })
    }
}

fn require_positive_threshold(t: f64) -> Result<()> {
    require_finite("threshold", t)?;
    if t <= 0.0 {
        return Err(Error::domain(format!("truncation threshold must be positive, got {t}")));
    }
    Ok(())
}

/// Even, nonnegative weight g with g and x/g(x) nondecreasing for x > 0.
#[derive(Clone)]
pub struct GrowthFunction {
    label: String,
    f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl std::fmt::Debug for GrowthFunction {
    fn fmt(&self, fm: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(fm, "GrowthFunction({})", self.label)
    }
}

impl GrowthFunction {
    pub fn new(
        label: impl Into<String>,
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        GrowthFunction { label: label.into(), f: Arc::new(f) }
    }

    /// g(x) = |x|.
    pub fn abs() -> Self {
        GrowthFunction::new("abs", |x: f64| x.abs())
    }

    /// g(x) = min(|x|, cap).
    pub fn abs_capped(cap: f64) -> Result<Self> {
        require_finite("cap", cap)?;
        if cap <= 0.0 {
            return Err(Error::domain(format!("cap must be positive, got {cap}")));
        }
        Ok(GrowthFunction::new(format!("abs_capped:{cap}"), move |x: f64| x.abs().min(cap)))
    }

    /// g ≡ 1.
    pub fn constant_one() -> Self {
        GrowthFunction::new("one", |_| 1.0)
    }

    /// g(x) = |x|^beta for beta in [0, 1].
    pub fn power(beta: f64) -> Result<Self> {
        require_finite("beta", beta)?;
        if !(0.0..=1.0).contains(&beta) {
            return Err(Error::domain(format!("exponent must lie in [0,1], got {beta}")));
        }
        Ok(GrowthFunction::new(format!("power:{beta}"), move |x: f64| x.abs().powf(beta)))
    }

    pub fn eval(&self, x: f64) -> f64 {
        (self.f)(x)
    }

    pub fn label(&self) -> &str {
        &self.label
    }
}

/// Default check grid: 200 log-spaced points spanning [1e-6, 1e6].
pub fn default_growth_grid() -> Vec<f64> {
    let n = 200;
    (0..n)
        .map(|i| 10f64.powf(-6.0 + 12.0 * i as f64 / (n - 1) as f64))
        .collect()
}

/// Checks the four class properties of g on the caller grid plus the default
/// grid; best-effort pointwise verification, reporting the first violation.
pub fn verify_growth_function(g: &GrowthFunction, grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::usage("growth-function grid must be nonempty"));
    }
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::usage("growth-function grid must be strictly ascending"));
    }
    if grid.iter().any(|&x| !(x > 0.0) || !x.is_finite()) {
        return Err(Error::usage("growth-function grid must contain finite positive points"));
    }
    let mut points: Vec<f64> = grid.iter().copied().chain(default_growth_grid()).collect();
    points.sort_by(f64::total_cmp);
    points.dedup();

    let tol = 1e-12;
    let mut prev: Option<(f64, f64, f64)> = None; // (x, g, x/g)
    for &x in &points {
        let gx = g.eval(x);
        let gnx = g.eval(-x);
        if !gx.is_finite() || gx < 0.0 {
            return Err(Error::Precondition(format!(
                "growth check failed: g({x}) = {gx} is not finite and nonnegative"
            )));
        }
        if (gx - gnx).abs() > tol * (1.0 + gx.abs()) {
            return Err(Error::Precondition(format!(
                "growth check failed: g is not even at x = {x}: g(x)={gx}, g(-x)={gnx}"
            )));
        }
        if gx <= 0.0 {
            return Err(Error::Precondition(format!(
                "growth check failed: g({x}) = {gx} must be positive for positive x"
            )));
        }
        let ratio = x / gx;
        if let Some((px, pg, pr)) = prev {
            if gx < pg * (1.0 - tol) {
                return Err(Error::Precondition(format!(
                    "growth check failed: g decreases between {px} and {x}"
                )));
            }
            if ratio < pr * (1.0 - tol) {
                return Err(Error::Precondition(format!(
                    "growth check failed: x/g(x) decreases between {px} and {x}"
                )));
            }
        }
        prev = Some((x, gx, ratio));
    }
    Ok(())
}
