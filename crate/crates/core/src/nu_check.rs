//! Endpoint values of the candidate polynomial weight function.
//!
//! A Sturm-Liouville reduction of the radial problem on `s` in `[0, 1]`
//! needs `sigma(s) rho(s) s^k` to vanish at both endpoints for every
//! polynomial degree `k`. For the family treated here,
//! `sigma(s) = s (1 - a3 s)` and `rho(s) = s^{a10} (1 - a3 s)^{a11}`,
//! the product collapses to `s^{k + 1 + a10} (1 - a3 s)^{1 + a11}`.
//! With `a3 = -1` its value at `s = 1` is `2^{1 + a11}`, which cannot
//! vanish for any admissible `a11`; the tabulated rows make that
//! failure explicit.

/// Parameters of the candidate weight function.
#[derive(Debug, Clone, Copy)]
pub struct NuParams {
    /// Sign convention of the linear factor; the physical reduction
    /// has `a3 = -1`.
    pub a3: f64,
    /// Exponent of the power factor of the weight.
    pub a10: f64,
    /// Exponent of the linear factor of the weight.
    pub a11: f64,
    /// Largest polynomial degree tabulated; at most 20.
    pub k_max: u32,
}

impl NuParams {
    /// The physical sign convention `a3 = -1`.
    pub fn standard(a10: f64, a11: f64, k_max: u32) -> Self {
        NuParams {
            a3: -1.0,
            a10,
            a11,
            k_max,
        }
    }
}

/// One tabulated degree: the boundary values of `sigma rho s^k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightRow {
    pub k: u32,
    pub at_zero: f64,
    pub at_one: f64,
}

/// `base^exponent`, taking the integer-power path when possible so
/// that values like `2^4` come out exactly.
fn power(base: f64, exponent: f64) -> f64 {
    if exponent.fract() == 0.0 && exponent.abs() <= 1.0e6 {
        base.powi(exponent as i32)
    } else {
        base.powf(exponent)
    }
}

/// The product `sigma(s) rho(s) s^k` at an interior point `s > 0`.
pub fn boundary_product(params: &NuParams, s: f64, k: u32) -> f64 {
    let exponent = k as f64 + 1.0 + params.a10;
    power(s, exponent) * power(1.0 - params.a3 * s, 1.0 + params.a11)
}

/// Boundary values for every degree up to `k_max`.
///
/// At `s = 0` the value follows from the sign of the exponent
/// `k + 1 + a10`: zero for a positive exponent, one for a vanishing
/// one, unbounded otherwise. A table row with a nonzero `at_one` entry
/// is a degree at which the weight condition fails.
pub fn weight_condition_values(params: &NuParams) -> Vec<WeightRow> {
    assert!(
        params.k_max <= 20,
        "degrees beyond 20 are outside the tabulated range"
    );
    let at_one = power(1.0 - params.a3, 1.0 + params.a11);
    (0..=params.k_max)
        .map(|k| {
            let exponent = k as f64 + 1.0 + params.a10;
            let at_zero = if exponent > 0.0 {
                0.0
            } else if exponent == 0.0 {
                1.0
            } else {
                f64::INFINITY
            };
            WeightRow { k, at_zero, at_one }
        })
        .collect()
}
