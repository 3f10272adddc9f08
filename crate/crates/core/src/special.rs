//! Gauss hypergeometric series and the complex log-gamma function.
//!
//! The quantization condition solved elsewhere in this crate is a zero of
//! `2F1(a, b; c; z)` in which `a` and `b` may form a complex-conjugate
//! pair while `c` and `z` stay real. Everything here therefore works in
//! `Complex64` and lets the caller discard an imaginary part that is
//! provably zero.
//!
//! The series is summed by forward recurrence on the term ratio
//! `t_{n+1}/t_n = (a+n)(b+n) z / ((c+n)(n+1))` and stops once the
//! remaining tail, bounded by the geometric series in the current ratio,
//! drops below a relative tolerance. Two independent rearrangements
//! (Euler and Pfaff) and the Gauss summation at `z = 1` are provided as
//! cross-checks of the direct sum.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Default relative tolerance for series truncation.
pub const SERIES_REL_TOL: f64 = 1e-15;

/// Default cap on the number of series terms.
pub const SERIES_MAX_TERMS: usize = 100_000;

/// Parameters of `2F1(a, b; c; z)`. The upper pair may be complex, the
/// lower parameter is real.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HypParams {
    pub a: Complex64,
    pub b: Complex64,
    pub c: f64,
}

impl HypParams {
    /// Convenience constructor for real upper parameters.
    pub fn real(a: f64, b: f64, c: f64) -> Self {
        HypParams {
            a: Complex64::new(a, 0.0),
            b: Complex64::new(b, 0.0),
            c,
        }
    }
}

/// Outcome of a series evaluation.
#[derive(Debug, Clone, Copy)]
pub struct EvalResult {
    /// Sum of the series (imaginary part is zero for real or
    /// conjugate-symmetric parameters).
    pub value: Complex64,
    /// Geometric bound on the discarded tail, in absolute terms.
    pub abs_error_estimate: f64,
    /// Number of terms accumulated, counting the leading 1.
    pub terms_used: usize,
    /// Magnitude of the largest term that entered the sum. The ratio
    /// of this to the sum's magnitude measures how much cancellation
    /// the evaluation survived.
    pub peak_term: f64,
}

fn is_nonpositive_integer(x: f64) -> bool {
    let r = x.round();
    r <= 0.0 && (x - r).abs() <= 1e-12 * x.abs().max(1.0)
}

fn is_real_nonpositive_integer(w: Complex64) -> bool {
    w.im.abs() <= 1e-12 && is_nonpositive_integer(w.re)
}

/// Direct series for `2F1(a, b; c; z)` with the default tolerance and
/// term cap.
///
/// The argument must satisfy `|z| < 1`; the physically relevant range in
/// this crate is `0 <= z < 1`. Negative arguments are accepted because
/// the Pfaff transformation maps into them.
pub fn gauss_2f1(params: &HypParams, z: f64) -> Result<EvalResult> {
    gauss_2f1_with(params, z, SERIES_REL_TOL, SERIES_MAX_TERMS)
}

/// Direct series with caller-chosen truncation tolerance and term cap.
///
/// Loosening the tolerance is occasionally necessary close to `z = 1`,
/// where the terms decay like `n^(a+b-c-1) z^n` and the default bound
/// cannot be met within the default cap.
pub fn gauss_2f1_with(
    params: &HypParams,
    z: f64,
    rel_tol: f64,
    max_terms: usize,
) -> Result<EvalResult> {
    if is_nonpositive_integer(params.c) {
        return Err(Error::InvalidC { c: params.c });
    }
    if !(z.abs() < 1.0) {
        return Err(Error::OutsideSeriesDomain {
            z,
            domain: "the series disk |z| < 1",
        });
    }

    let mut sum = Complex64::new(1.0, 0.0);
    let mut term = Complex64::new(1.0, 0.0);
    let z_abs = z.abs();
    let mut tail = f64::INFINITY;
    let mut peak_term = 1.0_f64;

    for n in 0..max_terms {
        let nf = n as f64;
        let factor = (params.a + nf) * (params.b + nf) * z
            / (Complex64::new(params.c + nf, 0.0) * (nf + 1.0));
        term *= factor;
        sum += term;
        peak_term = peak_term.max(term.norm());

        // Terminating series: one of the upper parameters was a
        // nonpositive integer and the recurrence hit it exactly.
        if term.re == 0.0 && term.im == 0.0 {
            return Ok(EvalResult {
                value: sum,
                abs_error_estimate: 0.0,
                terms_used: n + 2,
                peak_term,
            });
        }

        // Once the term ratio stays below one, the tail is bounded by a
        // geometric series. The ratio |(a+n)(b+n)/((c+n)(n+1))| z is
        // monotone in n for large n, so this bound is safe.
        let ratio = z_abs * (params.a + (nf + 1.0)).norm() * (params.b + (nf + 1.0)).norm()
            / ((params.c + nf + 1.0).abs() * (nf + 2.0));
        if ratio < 1.0 {
            tail = term.norm() * ratio / (1.0 - ratio);
            if tail <= rel_tol * sum.norm().max(f64::MIN_POSITIVE) {
                return Ok(EvalResult {
                    value: sum,
                    abs_error_estimate: tail,
                    terms_used: n + 2,
                    peak_term,
                });
            }
        }
    }

    Err(Error::NonConvergent {
        terms: max_terms,
        tail,
    })
}

/// Euler transformation: `(1-z)^(c-a-b) 2F1(c-a, c-b; c; z)`.
///
/// Algebraically identical to the direct series on the whole disk; used
/// as an independent numerical route.
pub fn transform_euler(params: &HypParams, z: f64) -> Result<EvalResult> {
    if !(z.abs() < 1.0) {
        return Err(Error::OutsideSeriesDomain {
            z,
            domain: "the series disk |z| < 1",
        });
    }
    let shifted = HypParams {
        a: Complex64::new(params.c, 0.0) - params.a,
        b: Complex64::new(params.c, 0.0) - params.b,
        c: params.c,
    };
    let inner = gauss_2f1(&shifted, z)?;
    let exponent = Complex64::new(params.c, 0.0) - params.a - params.b;
    let prefactor = (exponent * (1.0 - z).ln()).exp();
    Ok(EvalResult {
        value: prefactor * inner.value,
        abs_error_estimate: prefactor.norm() * inner.abs_error_estimate,
        terms_used: inner.terms_used,
        peak_term: prefactor.norm() * inner.peak_term,
    })
}

/// Pfaff transformation: `(1-z)^(-a) 2F1(a, c-b; c; z/(z-1))`.
///
/// Restricted to `0 <= z < 1/2` so the inner argument `z/(z-1)` stays
/// inside `(-1, 0]`. Beyond that point the inner series diverges and
/// every usable rearrangement reduces to the Euler route, so no
/// independent check exists there.
pub fn transform_pfaff(params: &HypParams, z: f64) -> Result<EvalResult> {
    if !(0.0..0.5).contains(&z) {
        return Err(Error::OutsideSeriesDomain {
            z,
            domain: "[0, 1/2) required by the Pfaff transformation",
        });
    }
    let shifted = HypParams {
        a: params.a,
        b: Complex64::new(params.c, 0.0) - params.b,
        c: params.c,
    };
    let inner = gauss_2f1(&shifted, z / (z - 1.0))?;
    let prefactor = (-params.a * (1.0 - z).ln()).exp();
    Ok(EvalResult {
        value: prefactor * inner.value,
        abs_error_estimate: prefactor.norm() * inner.abs_error_estimate,
        terms_used: inner.terms_used,
        peak_term: prefactor.norm() * inner.peak_term,
    })
}

/// Gauss summation at `z = 1`:
/// `Gamma(c) Gamma(c-a-b) / (Gamma(c-a) Gamma(c-b))`.
///
/// Requires `Re(c - a - b) > 0`. When `c - a` or `c - b` lands on a pole
/// of the gamma function the reciprocal vanishes and the value is zero.
pub fn gauss_2f1_at_one(params: &HypParams) -> Result<Complex64> {
    let c = Complex64::new(params.c, 0.0);
    let cab = c - params.a - params.b;
    if cab.re <= 0.0 {
        return Err(Error::DivergentAtOne {
            re_c_minus_a_minus_b: cab.re,
        });
    }
    if is_nonpositive_integer(params.c) {
        return Err(Error::PoleAtNonPositiveInteger { arg: params.c });
    }
    if is_real_nonpositive_integer(cab) {
        return Err(Error::PoleAtNonPositiveInteger { arg: cab.re });
    }
    let ca = c - params.a;
    let cb = c - params.b;
    if is_real_nonpositive_integer(ca) || is_real_nonpositive_integer(cb) {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let log_value = log_gamma(c) + log_gamma(cab) - log_gamma(ca) - log_gamma(cb);
    Ok(log_value.exp())
}

/// Derivative of the series in its argument:
/// `d/dz 2F1(a, b; c; z) = (a b / c) 2F1(a+1, b+1; c+1; z)`.
pub fn gauss_2f1_derivative(params: &HypParams, z: f64) -> Result<EvalResult> {
    let shifted = HypParams {
        a: params.a + 1.0,
        b: params.b + 1.0,
        c: params.c + 1.0,
    };
    let inner = gauss_2f1(&shifted, z)?;
    let factor = params.a * params.b / params.c;
    Ok(EvalResult {
        value: factor * inner.value,
        abs_error_estimate: factor.norm() * inner.abs_error_estimate,
        terms_used: inner.terms_used,
        peak_term: factor.norm() * inner.peak_term,
    })
}

// Lanczos approximation with g = 7 and nine coefficients. Accurate to
// about 1e-13 relative over the right half-plane.
const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEFFS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Principal-branch logarithm of the gamma function for complex
/// arguments.
///
/// Arguments with `Re(z) < 1/2` go through the reflection formula, where
/// the imaginary part may differ from the principal branch by a multiple
/// of `2 pi`; every consumer in this crate exponentiates the result, so
/// only the value modulo `2 pi i` matters. Poles at nonpositive integers
/// come back as non-finite values.
pub fn log_gamma(z: Complex64) -> Complex64 {
    if z.re < 0.5 {
        // Reflection: ln Gamma(z) = ln pi - ln sin(pi z) - ln Gamma(1 - z).
        let pi = std::f64::consts::PI;
        return Complex64::new(pi.ln(), 0.0) - (z * pi).sin().ln() - log_gamma(1.0 - z);
    }
    let zm1 = z - 1.0;
    let mut acc = Complex64::new(LANCZOS_COEFFS[0], 0.0);
    for (i, &coeff) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        acc += coeff / (zm1 + i as f64);
    }
    let t = zm1 + LANCZOS_G + 0.5;
    let half_log_two_pi = 0.918_938_533_204_672_74;
    half_log_two_pi + (zm1 + 0.5) * t.ln() - t + acc.ln()
}
