//! Explicit-constant error bounds for normal and scale-mixed-normal
//! approximation of sums and random sums of i.i.d. zero-mean summands,
//! with exact-convolution and Monte-Carlo verification machinery.

pub mod bounds;
pub mod constants;
pub mod dists;
pub mod error;
pub mod functionals;
pub mod limitlaws;
pub mod quad;
pub mod randomsums;
pub mod specfun;

pub use error::{Error, Result};
