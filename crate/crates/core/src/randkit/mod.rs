//! Seeded randomness, the standard normal CDF and quantile, and the
//! correlation maps of the Gaussian copula between `N(0,1)` and `U[0,1]`.

mod copula;
mod normal;
mod rng;

pub use copula::{corr_normal_from_uniform, corr_uniform_from_normal};
pub use normal::{normal_cdf, normal_quantile};
pub(crate) use normal::{phi, phi_inv};
pub use rng::{derive_seed, Rng};
