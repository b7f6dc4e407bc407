//! Convergence functionals of a standardized sum: the Lindeberg tail
//! fraction L, the truncated Lyapunov fraction M, their ratio γ, and
//! exact lattice checks of the truncation inequalities the bounds rest on.

use crate::dists::SummandDistribution;
use crate::error::{require_finite, Error, Result};

/// K = (17 + 7√7)/27, the centering constant of the truncated-sum bound.
pub fn centering_constant() -> f64 {
    (17.0 + 7.0 * 7f64.sqrt()) / 27.0
}

/// L, M and derived quantities at a fixed truncation fraction ε.
///
/// For summands X₁,…,Xₙ with Bₙ² = Σ E Xᵢ²:
///   L = Bₙ⁻² Σ E Xᵢ²·1(|Xᵢ| ≥ εBₙ),
///   M = Bₙ⁻³ Σ E|Xᵢ|³·1(|Xᵢ| < εBₙ).
#[derive(Clone, Copy, Debug)]
pub struct FunctionalValues {
    pub n: u64,
    pub epsilon: f64,
    pub lindeberg: f64,
    pub lyapunov: f64,
    /// Bₙ, the standard deviation of the raw sum.
    pub sum_sd: f64,
    /// lyapunov/lindeberg; +∞ when the Lindeberg fraction vanishes.
    pub gamma: f64,
}

impl FunctionalValues {
    pub fn combined(&self) -> f64 {
        self.lindeberg + self.lyapunov
    }
}

fn finish(n: u64, epsilon: f64, lindeberg: f64, lyapunov: f64, sum_sd: f64) -> FunctionalValues {
    debug_assert!(lindeberg <= 1.0 + 1e-12);
    debug_assert!(lyapunov <= epsilon * (1.0 + 1e-12));
    let gamma = if lindeberg == 0.0 { f64::INFINITY } else { lyapunov / lindeberg };
    FunctionalValues { n, epsilon, lindeberg, lyapunov, sum_sd, gamma }
}

fn check_eps(eps: f64) -> Result<()> {
    require_finite("epsilon", eps)?;
    if eps <= 0.0 {
        return Err(Error::domain(format!("epsilon must be positive, got {eps}")));
    }
    Ok(())
}

/// Functionals for n i.i.d. copies of d at truncation fraction eps.
pub fn functionals_iid(d: &SummandDistribution, n: u64, eps: f64) -> Result<FunctionalValues> {
    if n == 0 {
        return Err(Error::usage("n must be at least 1"));
    }
    check_eps(eps)?;
    let sigma2 = d.variance();
    let b_n = (sigma2 * n as f64).sqrt();
    let t = eps * b_n;
    let lindeberg = n as f64 * d.trunc_second_moment_tail(t)? / (b_n * b_n);
    let lyapunov = n as f64 * d.trunc_third_abs_moment_core(t)? / (b_n * b_n * b_n);
    Ok(finish(n, eps, lindeberg, lyapunov, b_n))
}

/// Functionals for independent, not necessarily identical summands.
pub fn functionals_hetero(ds: &[SummandDistribution], eps: f64) -> Result<FunctionalValues> {
    if ds.is_empty() {
        return Err(Error::usage("summand list must be nonempty"));
    }
    check_eps(eps)?;
    let b2: f64 = ds.iter().map(|d| d.variance()).sum();
    let b_n = b2.sqrt();
    let t = eps * b_n;
    let mut lindeberg = 0.0;
    let mut lyapunov = 0.0;
    for d in ds {
        lindeberg += d.trunc_second_moment_tail(t)?;
        lyapunov += d.trunc_third_abs_moment_core(t)?;
    }
    lindeberg /= b2;
    lyapunov /= b2 * b_n;
    Ok(finish(ds.len() as u64, eps, lindeberg, lyapunov, b_n))
}

/// [L(ε)+M(ε)] − [L(1)+M(1)] for i.i.d. summands; never negative.
pub fn combined_fraction_gap(d: &SummandDistribution, n: u64, eps: f64) -> Result<f64> {
    Ok(functionals_iid(d, n, eps)?.combined() - functionals_iid(d, n, 1.0)?.combined())
}

/// Heterogeneous version of [`combined_fraction_gap`].
pub fn combined_fraction_gap_hetero(ds: &[SummandDistribution], eps: f64) -> Result<f64> {
    Ok(functionals_hetero(ds, eps)?.combined() - functionals_hetero(ds, 1.0)?.combined())
}

/// Outcome of the exact truncated-sum inequality check on lattice summands.
///
/// With τ = (1+x)Bₙ and Yᵢ = Bₙ⁻¹Xᵢ·1(|Xᵢ| < τ):
///   third_central_sum = Σ E|Yᵢ − E Yᵢ|³,
///   third_bound = min{K·M, p·M + (5−p)·L/(1+x)} at truncation fraction 1+x,
///   var_w = Var(ΣYᵢ), which must lie in [1 − 2L, 1],
///   sum_sq = Σ E Yᵢ², which must not exceed 1.
#[derive(Clone, Copy, Debug)]
pub struct TruncatedSumCheck {
    pub third_central_sum: f64,
    pub third_bound: f64,
    pub var_w: f64,
    pub var_lower: f64,
    pub sum_sq: f64,
    pub holds: bool,
}

/// Verifies the truncated centered-third-moment bound, the variance bracket
/// and the unit bound on Σ E Yᵢ² by exact enumeration. Lattice summands only.
pub fn truncated_sum_check(
    ds: &[SummandDistribution],
    x: f64,
    p: f64,
) -> Result<TruncatedSumCheck> {
    if ds.is_empty() {
        return Err(Error::usage("summand list must be nonempty"));
    }
    require_finite("x", x)?;
    if x < 0.0 {
        return Err(Error::domain(format!("x must be nonnegative, got {x}")));
    }
    require_finite("p", p)?;
    let k = centering_constant();
    if !(1.0 - 1e-12..=k + 1e-12).contains(&p) {
        return Err(Error::domain(format!("p must lie in [1, K], got {p}")));
    }
    let lattices: Vec<Vec<(f64, f64)>> = ds
        .iter()
        .map(|d| {
            d.as_lattice_atoms().ok_or_else(|| {
                Error::Unsupported(
                    "truncated-sum check needs lattice summands for exact enumeration".to_string(),
                )
            })
        })
        .collect::<Result<_>>()?;

    let vals = functionals_hetero(ds, 1.0 + x)?;
    let b_n = vals.sum_sd;
    let tau = (1.0 + x) * b_n;

    let mut third_central_sum = 0.0;
    let mut var_w = 0.0;
    let mut sum_sq = 0.0;
    for atoms in &lattices {
        // Truncated variable: value v/Bₙ where |v| < τ, else 0.
        let y: Vec<(f64, f64)> =
            atoms.iter().map(|&(v, pr)| (if v.abs() < tau { v / b_n } else { 0.0 }, pr)).collect();
        let mean: f64 = y.iter().map(|&(v, pr)| v * pr).sum();
        third_central_sum += y.iter().map(|&(v, pr)| (v - mean).abs().powi(3) * pr).sum::<f64>();
        let second: f64 = y.iter().map(|&(v, pr)| v * v * pr).sum();
        var_w += second - mean * mean;
        sum_sq += second;
    }

    let third_bound = (k * vals.lyapunov)
        .min(p * vals.lyapunov + (5.0 - p) * vals.lindeberg / (1.0 + x));
    let var_lower = 1.0 - 2.0 * vals.lindeberg;
    let tol = 1e-12;
    let holds = third_central_sum <= third_bound + tol
        && var_w >= var_lower - tol
        && var_w <= 1.0 + tol
        && sum_sq <= 1.0 + tol;
    Ok(TruncatedSumCheck { third_central_sum, third_bound, var_w, var_lower, sum_sq, holds })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn centering_constant_value() {
        let k = centering_constant();
        assert!(k < 1.3156);
        assert_relative_eq!(k, 1.315_565_154_720_449_4, max_relative = 1e-15);
    }

    #[test]
    fn rademacher_functionals() {
        let d = SummandDistribution::rademacher();
        let f1 = functionals_iid(&d, 1, 1.0).unwrap();
        assert_eq!((f1.lindeberg, f1.lyapunov, f1.gamma), (1.0, 0.0, 0.0));
        let f4 = functionals_iid(&d, 4, 1.0).unwrap();
        assert_eq!(f4.lindeberg, 0.0);
        assert_eq!(f4.lyapunov, 0.5);
        assert!(f4.gamma.is_infinite());
        assert_eq!(f4.sum_sd, 2.0);
        // Shrinking the truncation fraction pushes the ±1 atoms into the tail.
        let f4s = functionals_iid(&d, 4, 0.4).unwrap();
        assert_eq!((f4s.lindeberg, f4s.lyapunov), (1.0, 0.0));
    }

    #[test]
    fn uniform_functionals_frozen() {
        let d = SummandDistribution::uniform_symmetric(1.0).unwrap();
        let f = functionals_iid(&d, 1, 1.0).unwrap();
        assert_relative_eq!(f.lindeberg, 0.807_549_910_270_124_7, max_relative = 1e-13);
        assert_relative_eq!(f.lyapunov, 0.144_337_567_297_406_45, max_relative = 1e-13);
        assert_relative_eq!(f.gamma, f.lyapunov / f.lindeberg, max_relative = 1e-15);
    }

    #[test]
    fn lindeberg_fraction_vanishes_for_large_eps() {
        for d in [
            SummandDistribution::rademacher(),
            SummandDistribution::uniform_symmetric(2.0).unwrap(),
        ] {
            let f = functionals_iid(&d, 3, 50.0).unwrap();
            assert_eq!(f.lindeberg, 0.0);
        }
        // A power tail keeps every truncation level positive.
        let p = SummandDistribution::symmetric_pareto(2.5, 1.0).unwrap();
        assert!(functionals_iid(&p, 3, 50.0).unwrap().lindeberg > 0.0);
    }

    #[test]
    fn hetero_matches_iid_for_identical_copies() {
        let d = SummandDistribution::uniform_symmetric(1.3).unwrap();
        let copies = vec![d.clone(); 5];
        let a = functionals_hetero(&copies, 0.75).unwrap();
        let b = functionals_iid(&d, 5, 0.75).unwrap();
        assert_relative_eq!(a.lindeberg, b.lindeberg, max_relative = 1e-14);
        assert_relative_eq!(a.lyapunov, b.lyapunov, max_relative = 1e-14);
        assert_relative_eq!(a.sum_sd, b.sum_sd, max_relative = 1e-15);
    }

    #[test]
    fn hetero_two_scales_enumeration() {
        let ds = vec![
            SummandDistribution::two_point_symmetric(1.0).unwrap(),
            SummandDistribution::two_point_symmetric(2.0).unwrap(),
        ];
        let f = functionals_hetero(&ds, 1.0).unwrap();
        assert_relative_eq!(f.sum_sd, 5f64.sqrt(), max_relative = 1e-15);
        // Both |values| fall below B₂ = √5, so the tail fraction is empty.
        assert_eq!(f.lindeberg, 0.0);
        assert_relative_eq!(f.lyapunov, 9.0 / 5f64.powf(1.5), max_relative = 1e-14);
        assert!(f.gamma.is_infinite());
        assert!(functionals_hetero(&[], 1.0).is_err());
    }

    #[test]
    fn combined_gap_nonnegative_on_grids() {
        let families = [
            SummandDistribution::rademacher(),
            SummandDistribution::uniform_symmetric(1.0).unwrap(),
            SummandDistribution::symmetric_pareto(2.5, 1.0).unwrap(),
            SummandDistribution::finite_lattice(vec![(-2.0, 0.25), (0.0, 0.5), (2.0, 0.25)])
                .unwrap(),
        ];
        for d in &families {
            for n in [1u64, 2, 4, 9] {
                for eps in [0.25, 0.4, 0.5, 1.0, 2.0, 4.0] {
                    let gap = combined_fraction_gap(d, n, eps).unwrap();
                    assert!(gap >= -1e-12, "gap {gap} for {:?} n={n} eps={eps}", d.kind());
                }
            }
        }
        assert_eq!(
            combined_fraction_gap(&SummandDistribution::rademacher(), 4, 1.0).unwrap(),
            0.0
        );
        assert!(
            combined_fraction_gap(&SummandDistribution::rademacher(), 4, 0.4).unwrap() >= 0.0
        );
    }

    #[test]
    fn combined_gap_property_on_random_lattices() {
        let mut rng = ChaCha8Rng::seed_from_u64(17_113);
        for _ in 0..500 {
            let m = rng.random_range(2..=6);
            let mut atoms: Vec<(f64, f64)> = (0..m)
                .map(|_| (rng.random_range(-5.0..5.0), rng.random_range(0.01..1.0)))
                .collect();
            let total: f64 = atoms.iter().map(|&(_, p)| p).sum();
            for a in &mut atoms {
                a.1 /= total;
            }
            let mean: f64 = atoms.iter().map(|&(v, p)| v * p).sum();
            for a in &mut atoms {
                a.0 -= mean;
            }
            let d = match SummandDistribution::finite_lattice(atoms) {
                Ok(d) => d,
                Err(_) => continue, // degenerate draw
            };
            let n = rng.random_range(1..=12);
            let eps = (rng.random_range(0.05f64.ln()..20f64.ln())).exp();
            let gap = combined_fraction_gap(&d, n, eps).unwrap();
            assert!(gap >= -1e-12, "gap {gap} at eps={eps} n={n}");
        }
    }

    #[test]
    fn lyapunov_fraction_capped_by_eps() {
        let d = SummandDistribution::symmetric_pareto(2.2, 1.0).unwrap();
        for eps in [0.1, 0.5, 1.0, 3.0] {
            let f = functionals_iid(&d, 2, eps).unwrap();
            assert!(f.lyapunov <= eps + 1e-12);
        }
    }

    #[test]
    fn truncated_sum_check_rademacher_equality() {
        let ds = vec![SummandDistribution::rademacher(); 4];
        let c = truncated_sum_check(&ds, 0.0, 1.0).unwrap();
        // Y = ±1/2, so Σ E|Y|³ = 4/8 and the p=1 branch of the bound is tight.
        assert_relative_eq!(c.third_central_sum, 0.5, max_relative = 1e-15);
        assert_relative_eq!(c.third_bound, 0.5, max_relative = 1e-15);
        assert_relative_eq!(c.var_w, 1.0, max_relative = 1e-15);
        assert!(c.holds);
    }

    #[test]
    fn truncated_sum_check_all_mass_truncated() {
        let d = SummandDistribution::finite_lattice(vec![(-2.0, 0.25), (0.0, 0.5), (2.0, 0.25)])
            .unwrap();
        let c = truncated_sum_check(&[d.clone()], 0.0, 1.0).unwrap();
        assert_eq!(c.third_central_sum, 0.0);
        assert_eq!(c.var_w, 0.0);
        assert!(c.holds);
        let c3 = truncated_sum_check(&vec![d; 3], 0.5, 1.2).unwrap();
        assert!(c3.holds);
        assert!(c3.sum_sq <= 1.0 + 1e-12);
    }

    #[test]
    fn truncated_sum_check_mixed_tail() {
        let d = SummandDistribution::finite_lattice(vec![
            (-3.0, 0.05),
            (-1.0, 0.45),
            (1.0, 0.45),
            (3.0, 0.05),
        ])
        .unwrap();
        for p in [1.0, 1.15, centering_constant()] {
            let c = truncated_sum_check(&[d.clone()], 0.0, p).unwrap();
            assert!(c.holds, "failed at p={p}: {c:?}");
            assert!(c.third_central_sum < c.third_bound);
        }
        for x in [0.0, 0.3, 1.0, 2.5] {
            assert!(truncated_sum_check(&vec![d.clone(); 4], x, 1.0).unwrap().holds);
        }
    }

    #[test]
    fn truncated_sum_check_contracts() {
        let cont = SummandDistribution::uniform_symmetric(1.0).unwrap();
        assert!(matches!(
            truncated_sum_check(&[cont], 0.0, 1.0),
            Err(Error::Unsupported(_))
        ));
        let r = SummandDistribution::rademacher();
        assert!(truncated_sum_check(&[r.clone()], -0.1, 1.0).is_err());
        assert!(truncated_sum_check(&[r.clone()], 0.0, 0.5).is_err());
        assert!(truncated_sum_check(&[r], 0.0, 1.4).is_err());
        assert!(truncated_sum_check(&[], 0.0, 1.0).is_err());
    }
}
