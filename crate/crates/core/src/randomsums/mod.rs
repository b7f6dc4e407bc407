//! Random-index sums: counting laws and their exact pmfs, exact lattice
//! mixture distributions, seeded Monte-Carlo sampling, and verification
//! of distance bounds against measured Kolmogorov distances.

pub mod counting;
pub mod lattice;
pub mod sampling;
pub mod verify;

pub use counting::{counting_pmf, counting_pmf_prefix, truncation_point, CountingLaw};
pub use lattice::{
    exact_random_sum, kolmogorov_distance_exact, thinned_convolution_gap, LatticeDistribution,
};
pub use sampling::{empirical_kolmogorov, sample_random_sum, GENERATOR};
pub use verify::{
    dkw_margin, verify_exact, verify_monte_carlo, VerificationMethod, VerificationReport,
    DEFAULT_DELTA, DEFAULT_REPLICATIONS, DEFAULT_TAIL_TOL,
};
