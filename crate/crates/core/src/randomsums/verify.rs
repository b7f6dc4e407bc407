//! Verification of distance bounds: measure the Kolmogorov distance of a
//! random-sum scenario, exactly or by Monte Carlo with a distribution-free
//! confidence margin, and compare it against a bound report.

use crate::bounds::BoundReport;
use crate::dists::SummandDistribution;
use crate::error::{require_finite, Error, Result};
use crate::randomsums::counting::CountingLaw;
use crate::randomsums::lattice::{exact_random_sum, kolmogorov_distance_exact};
use crate::randomsums::sampling::{empirical_kolmogorov, sample_random_sum};

/// Counting-law tail mass the exact mixture may drop.
pub const DEFAULT_TAIL_TOL: f64 = 1e-12;
/// Monte-Carlo replication count used by default.
pub const DEFAULT_REPLICATIONS: u64 = 1_000_000;
/// Probability that the empirical distance errs by more than its margin.
pub const DEFAULT_DELTA: f64 = 0.01;

#[derive(Clone, Debug, PartialEq)]
pub enum VerificationMethod {
    Exact,
    MonteCarlo { replications: u64, delta: f64 },
}

impl VerificationMethod {
    pub fn label(&self) -> String {
        match self {
            VerificationMethod::Exact => "exact".into(),
            VerificationMethod::MonteCarlo { replications, delta } => {
                format!("monte-carlo(m={replications},delta={delta})")
            }
        }
    }
}

/// Outcome of checking one scenario against its bound. `pass` holds
/// exactly when measured_delta ≤ bound_value + dkw_margin; the margin is
/// zero for exact measurements.
#[derive(Clone, Debug)]
pub struct VerificationReport {
    pub scenario: String,
    pub method: VerificationMethod,
    pub measured_delta: f64,
    pub dkw_margin: f64,
    /// Master seed of the Monte-Carlo run; None for exact measurements.
    pub seed: Option<u64>,
    pub bound: BoundReport,
    pub pass: bool,
}

/// One-sided deviation allowance of the empirical distribution function:
/// with probability at least 1 − delta the empirical Kolmogorov distance
/// lies within √(ln(2/delta)/(2m)) of the true one.
pub fn dkw_margin(replications: u64, delta: f64) -> f64 {
    ((2.0 / delta).ln() / (2.0 * replications as f64)).sqrt()
}

/// Verify a bound by exact computation of the random-sum distribution.
pub fn verify_exact(
    scenario: &str,
    d: &SummandDistribution,
    law: &CountingLaw,
    bound: &BoundReport,
    tail_tol: f64,
) -> Result<VerificationReport> {
    let s = exact_random_sum(d, law, tail_tol)?;
    let measured = kolmogorov_distance_exact(&s, &bound.limit_law, bound.normalization)?;
    Ok(VerificationReport {
        scenario: scenario.to_string(),
        method: VerificationMethod::Exact,
        measured_delta: measured,
        dkw_margin: 0.0,
        seed: None,
        bound: bound.clone(),
        pass: measured <= bound.bound_value,
    })
}

/// Verify a bound against the empirical distance of a seeded sample,
/// allowing the distribution-free margin for the chosen confidence.
pub fn verify_monte_carlo(
    scenario: &str,
    d: &SummandDistribution,
    law: &CountingLaw,
    bound: &BoundReport,
    replications: u64,
    delta: f64,
    seed: u64,
) -> Result<VerificationReport> {
    require_finite("confidence parameter", delta)?;
    if !(0.0..1.0).contains(&delta) || delta == 0.0 {
        return Err(Error::domain(format!(
            "confidence parameter must lie in (0, 1), got {delta}"
        )));
    }
    let sample = sample_random_sum(d, law, seed, replications)?;
    let measured = empirical_kolmogorov(&sample, &bound.limit_law, bound.normalization)?;
    let margin = dkw_margin(replications, delta);
    Ok(VerificationReport {
        scenario: scenario.to_string(),
        method: VerificationMethod::MonteCarlo { replications, delta },
        measured_delta: measured,
        dkw_margin: margin,
        seed: Some(seed),
        bound: bound.clone(),
        pass: measured <= bound.bound_value + margin,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::{bound_fixed_n, bound_geometric, bound_poisson};
    use crate::constants::ConstantVariant;
    use approx::assert_abs_diff_eq;

    #[test]
    fn dkw_margin_value() {
        assert_abs_diff_eq!(dkw_margin(1_000_000, 0.01), 1.6276e-3, epsilon = 1e-7);
    }

    #[test]
    fn exact_fixed_n_scenario() {
        let d = SummandDistribution::rademacher();
        let bound = bound_fixed_n(&d, 4, ConstantVariant::IidSymmetric).unwrap();
        assert_abs_diff_eq!(bound.bound_value, 0.2345, epsilon = 1e-12);
        let law = CountingLaw::Binomial { n: 4, p: 1.0 };
        let report = verify_exact("rademacher-n4", &d, &law, &bound, 0.0).unwrap();
        assert_abs_diff_eq!(report.measured_delta, 0.1875, epsilon = 1e-12);
        assert_eq!(report.dkw_margin, 0.0);
        assert!(report.pass);
    }

    #[test]
    fn exact_poisson_scenario() {
        let d = SummandDistribution::rademacher();
        let bound = bound_poisson(&d, 9.0).unwrap();
        assert_abs_diff_eq!(bound.bound_value, 0.6182, epsilon = 1e-4);
        let law = CountingLaw::Poisson { lambda: 9.0 };
        let report = verify_exact("rademacher-poisson9", &d, &law, &bound, 1e-12).unwrap();
        assert!(report.pass);
        assert!(report.measured_delta > 0.0);
        assert!(report.measured_delta < bound.bound_value);
    }

    #[test]
    fn negative_control_fails() {
        let d = SummandDistribution::rademacher();
        let mut bound = bound_poisson(&d, 9.0).unwrap();
        bound.bound_value = 1e-3;
        let law = CountingLaw::Poisson { lambda: 9.0 };
        let report = verify_exact("too-tight", &d, &law, &bound, 1e-12).unwrap();
        assert!(!report.pass);
    }

    #[test]
    fn monte_carlo_tracks_exact() {
        let d = SummandDistribution::rademacher();
        let law = CountingLaw::Poisson { lambda: 9.0 };
        let bound = bound_poisson(&d, 9.0).unwrap();
        let exact = verify_exact("exact", &d, &law, &bound, 1e-12).unwrap();
        let mc =
            verify_monte_carlo("mc", &d, &law, &bound, 100_000, 0.01, 1234).unwrap();
        assert!(mc.pass);
        assert!(
            (mc.measured_delta - exact.measured_delta).abs() <= mc.dkw_margin,
            "exact {} vs empirical {} exceeds margin {}",
            exact.measured_delta,
            mc.measured_delta,
            mc.dkw_margin
        );
    }

    #[test]
    fn monte_carlo_geometric_scenario() {
        let d = SummandDistribution::rademacher();
        let bound = bound_geometric(&d, 50).unwrap();
        let law = CountingLaw::Geometric { n: 50 };
        let report =
            verify_monte_carlo("rademacher-geometric50", &d, &law, &bound, 200_000, 0.01, 99)
                .unwrap();
        assert!(report.pass);
        assert!(report.measured_delta < 0.1, "delta {}", report.measured_delta);
        assert_eq!(report.seed, Some(99));
    }

    #[test]
    fn monte_carlo_validation() {
        let d = SummandDistribution::rademacher();
        let bound = bound_poisson(&d, 1.0).unwrap();
        let law = CountingLaw::Poisson { lambda: 1.0 };
        assert!(matches!(
            verify_monte_carlo("bad-delta", &d, &law, &bound, 100, 0.0, 1),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            verify_monte_carlo("no-reps", &d, &law, &bound, 0, 0.01, 1),
            Err(Error::Usage(_))
        ));
    }
}
