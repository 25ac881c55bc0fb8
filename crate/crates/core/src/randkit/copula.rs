use core::f64::consts::PI;

use crate::error::{Error, Result};

/// Pearson correlation of `(Φ(A), Φ(B))` when `(A, B)` is standard bivariate
/// normal with correlation `rho_n`: `(6/π)·asin(rho_n/2)`.
pub fn corr_uniform_from_normal(rho_n: f64) -> Result<f64> {
    check_unit(rho_n, "normal-space correlation")?;
    Ok((6.0 / PI * libm::asin(rho_n / 2.0)).clamp(-1.0, 1.0))
}

/// Inverse of [`corr_uniform_from_normal`]: `2·sin(π·rho_u/6)`.
pub fn corr_normal_from_uniform(rho_u: f64) -> Result<f64> {
    check_unit(rho_u, "uniform-space correlation")?;
    Ok((2.0 * libm::sin(PI * rho_u / 6.0)).clamp(-1.0, 1.0))
}

fn check_unit(rho: f64, what: &'static str) -> Result<()> {
    if rho.is_nan() || rho.abs() > 1.0 {
        return Err(Error::Domain { what, value: rho });
    }
    Ok(())
}
