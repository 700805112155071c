//! Normal density and distribution function helpers.

#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;
use core::f64::consts::{PI, SQRT_2};


/// `ln(sqrt(2π))`
pub const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// Density of `N(mean, sd²)` at `x`.
pub fn normal_pdf(x: f64, mean: f64, sd: f64) -> f64 {
    let z = (x - mean) / sd;
    (-0.5 * z * z).exp() / (sd * (2.0 * PI).sqrt())
}

/// Log-density of `N(mean, sd²)` at `x`; never underflows.
pub fn normal_ln_pdf(x: f64, mean: f64, sd: f64) -> f64 {
    let z = (x - mean) / sd;
    -0.5 * z * z - sd.ln() - LN_SQRT_2PI
}

/// Distribution function of `N(mean, sd²)`.
pub fn normal_cdf(x: f64, mean: f64, sd: f64) -> f64 {
    0.5 * libm::erfc(-(x - mean) / (sd * SQRT_2))
}

pub fn erf(x: f64) -> f64 {
    libm::erf(x)
}

/// Numerically stable `ln(Σ exp(a_i))` for a non-empty slice.
pub fn log_sum_exp(terms: &[f64]) -> f64 {
    let m = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !m.is_finite() {
        return m;
    }
    m + terms.iter().map(|&a| (a - m).exp()).sum::<f64>().ln()
}
