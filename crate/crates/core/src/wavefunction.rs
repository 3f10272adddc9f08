//! Sampling, differentiation, normalization and diagnostics of the
//! closed-form radial wavefunctions.
//!
//! The primary component (upper spinor component in the spin limit,
//! lower in the pseudospin limit) is `z^mu (1-z)^lam 2F1(a, b; c; z)`
//! with `z = 1/(exp(2r/range) + 1)`. Radial derivatives are taken
//! analytically through the contiguous relation for the hypergeometric
//! derivative; nothing here differentiates numerically.

use crate::error::{Error, Result};
use crate::model::{self, CentrifugalApprox, DerivedParams, PhysicalConfig, SymmetryLimit};
use crate::special::{self, HypParams};

/// Grid size used by the verification sweeps and the CLI default.
pub const DEFAULT_GRID_POINTS: usize = 2001;

/// Relative tolerance of the normalization quadrature.
const NORM_QUAD_REL_TOL: f64 = 1e-10;

/// Recursion limit of the adaptive quadrature.
const NORM_QUAD_MAX_DEPTH: u32 = 50;

/// Both components must have decayed to this fraction of their peak at
/// the outer edge of the box, otherwise the box is too short to
/// normalize on.
const DECAY_TAIL_RATIO: f64 = 1e-8;

/// Samples below this fraction of the peak amplitude are treated as
/// zero when counting sign changes. The series evaluation cancels terms
/// much larger than its sum, leaving rounding noise around 1e-10 of the
/// peak near the boundary zeros; the floor must sit safely above that.
const NODE_AMPLITUDE_FLOOR: f64 = 1e-8;

/// One spinor solution sampled on a radial grid, rescaled so that the
/// integral of `upper^2 + lower^2` over the grid interval is one.
#[derive(Debug, Clone)]
pub struct WaveSample {
    pub r: Vec<f64>,
    /// Upper component F(r). In the pseudospin limit this is the
    /// companion component.
    pub upper: Vec<f64>,
    /// Lower component G(r). In the spin limit this is the companion
    /// component.
    pub lower: Vec<f64>,
    /// Scale factor that was applied to both components.
    pub norm: f64,
}

/// Value of the primary component and its first two radial derivatives
/// at one radius.
#[derive(Debug, Clone, Copy)]
pub struct ClosedFormPoint {
    pub value: f64,
    pub d1: f64,
    pub d2: f64,
}

/// Evaluator of the closed-form primary component at a fixed energy.
#[derive(Debug, Clone)]
pub struct ClosedForm {
    params: DerivedParams,
    hyp: HypParams,
    range: f64,
}

impl ClosedForm {
    pub fn new(config: &PhysicalConfig, approx: &CentrifugalApprox, energy: f64) -> Result<Self> {
        let params = model::derived_params(config, approx, energy)?;
        Ok(Self::from_params(params, config.range))
    }

    /// Build the evaluator from already-derived parameters. The caller
    /// may perturb the parameters first; the residual diagnostics rely
    /// on that.
    pub fn from_params(params: DerivedParams, range: f64) -> Self {
        let hyp = params.hyp_params();
        ClosedForm { params, hyp, range }
    }

    pub fn params(&self) -> &DerivedParams {
        &self.params
    }

    /// Evaluate at radius `r`. `order` limits how many hypergeometric
    /// series are summed: derivatives beyond it are returned as zero.
    ///
    /// All series parameters are real in the bound-state domain, so the
    /// imaginary parts vanish identically and the real parts are taken
    /// without loss.
    pub fn point(&self, r: f64, order: u8) -> Result<ClosedFormPoint> {
        let d = self.range;
        let z = 1.0 / ((2.0 * r / d).exp() + 1.0);
        let omz = 1.0 - z;
        let mu = self.params.mu;
        let lam = self.params.lam;
        let pref = (mu * z.ln() + lam * omz.ln()).exp();

        let w0 = special::gauss_2f1(&self.hyp, z)?.value.re;
        let value = pref * w0;
        if order == 0 {
            return Ok(ClosedFormPoint {
                value,
                d1: 0.0,
                d2: 0.0,
            });
        }

        // Radial chain factors, grouped so that every factor stays
        // finite even when z underflows far outside the well:
        // d/dr [z^mu (1-z)^lam w(z)] = pref * (aa * w + bb * w') with
        // aa the product of the prefactor's logarithmic derivative and
        // dz/dr, and bb = dz/dr itself.
        let aa = -(2.0 / d) * (mu - (mu + lam) * z);
        let bb = -(2.0 / d) * z * omz;

        let shift1 = shifted(&self.hyp, 1.0);
        let fac1 = (self.hyp.a * self.hyp.b / self.hyp.c).re;
        let w1 = fac1 * special::gauss_2f1(&shift1, z)?.value.re;
        let d1 = pref * (aa * w0 + bb * w1);
        if order == 1 {
            return Ok(ClosedFormPoint { value, d1, d2: 0.0 });
        }

        let shift2 = shifted(&self.hyp, 2.0);
        let fac2 = fac1 * ((self.hyp.a + 1.0) * (self.hyp.b + 1.0) / (self.hyp.c + 1.0)).re;
        let w2 = fac2 * special::gauss_2f1(&shift2, z)?.value.re;
        let aa_r = -(4.0 / (d * d)) * (mu + lam) * z * omz;
        let bb_r = (4.0 / (d * d)) * (1.0 - 2.0 * z) * z * omz;
        let d2 = pref * ((aa * aa + aa_r) * w0 + (2.0 * aa * bb + bb_r) * w1 + bb * bb * w2);
        Ok(ClosedFormPoint { value, d1, d2 })
    }
}

fn shifted(h: &HypParams, k: f64) -> HypParams {
    HypParams {
        a: h.a + k,
        b: h.b + k,
        c: h.c + k,
    }
}

/// Outer box edge for a state with decay exponent `mu`: far enough out
/// that `exp(-2 mu x / range)` has fallen by twelve decades, but never
/// less than thirty range units past the inner cutoff.
pub fn default_r_max(config: &PhysicalConfig, mu: f64) -> f64 {
    let decades = 3.0 + 12.0 * std::f64::consts::LN_10 / (2.0 * mu);
    config.r_inner + config.range * decades.clamp(30.0, 500.0)
}

/// Uniform inclusive grid with `n >= 2` points.
pub fn radial_grid(r_lo: f64, r_hi: f64, n: usize) -> Vec<f64> {
    assert!(n >= 2, "a grid needs at least two points");
    let step = (r_hi - r_lo) / (n - 1) as f64;
    (0..n).map(|i| r_lo + step * i as f64).collect()
}

/// Closed-form upper component on a grid; spin limit only.
pub fn upper_component(
    config: &PhysicalConfig,
    approx: &CentrifugalApprox,
    energy: f64,
    radii: &[f64],
) -> Result<Vec<f64>> {
    if !config.limit.is_spin() {
        return Err(Error::InvalidConfig {
            what: "the closed form gives the upper component only in the spin limit".to_string(),
        });
    }
    primary_component(config, approx, energy, radii)
}

/// Closed-form lower component on a grid; pseudospin limit only.
pub fn lower_component_pseudospin(
    config: &PhysicalConfig,
    approx: &CentrifugalApprox,
    energy: f64,
    radii: &[f64],
) -> Result<Vec<f64>> {
    if config.limit.is_spin() {
        return Err(Error::InvalidConfig {
            what: "the closed form gives the lower component only in the pseudospin limit"
                .to_string(),
        });
    }
    primary_component(config, approx, energy, radii)
}

fn primary_component(
    config: &PhysicalConfig,
    approx: &CentrifugalApprox,
    energy: f64,
    radii: &[f64],
) -> Result<Vec<f64>> {
    let form = ClosedForm::new(config, approx, energy)?;
    radii
        .iter()
        .map(|&r| form.point(r, 0).map(|p| p.value))
        .collect()
}

/// The other spinor component, recovered from the first-order coupled
/// equations: in the spin limit
/// `G = (F' + (kappa + T)/r * F) / (M + E - C_s)`, in the pseudospin
/// limit `F = (G' - (kappa + T)/r * G) / (M - E + C_ps)`.
///
/// At `r = 0` the tensor term is replaced by its limit under the
/// boundary condition `F(0) = 0`, which holds at eigenvalues of a
/// configuration with a vanishing inner cutoff.
pub fn companion_component(
    config: &PhysicalConfig,
    approx: &CentrifugalApprox,
    energy: f64,
    radii: &[f64],
) -> Result<Vec<f64>> {
    let form = ClosedForm::new(config, approx, energy)?;
    radii
        .iter()
        .map(|&r| {
            let p = form.point(r, 1)?;
            companion_value(config, energy, r, &p)
        })
        .collect()
}

fn companion_value(
    config: &PhysicalConfig,
    energy: f64,
    r: f64,
    p: &ClosedFormPoint,
) -> Result<f64> {
    let kt = config.tensor + config.kappa as f64;
    let tensor_term = if r == 0.0 {
        kt * p.d1
    } else {
        kt / r * p.value
    };
    let (numer, denom) = match config.limit {
        SymmetryLimit::Spin { c_s } => (p.d1 + tensor_term, config.mass + energy - c_s),
        SymmetryLimit::Pseudospin { c_ps } => (p.d1 - tensor_term, config.mass - energy + c_ps),
    };
    if denom.abs() < 1e-12 * config.mass.abs().max(1.0) {
        return Err(Error::EnergyAtDenominatorZero { denom });
    }
    Ok(numer / denom)
}

/// Sample one solution on a uniform grid and normalize it.
///
/// `r_max` defaults to [`default_r_max`] for the state's own decay
/// exponent. Both components must satisfy the decay condition at the
/// box edge, otherwise the result would depend visibly on the box and
/// the call fails with [`Error::NotDecaying`].
pub fn sample_state(
    config: &PhysicalConfig,
    approx: &CentrifugalApprox,
    energy: f64,
    n_points: usize,
    r_max: Option<f64>,
) -> Result<WaveSample> {
    config.validate()?;
    let form = ClosedForm::new(config, approx, energy)?;
    let r_hi = r_max.unwrap_or_else(|| default_r_max(config, form.params.mu));
    if !(r_hi > config.r_inner) {
        return Err(Error::InvalidConfig {
            what: format!(
                "outer radius {} does not exceed the inner cutoff {}",
                r_hi, config.r_inner
            ),
        });
    }

    let radii = radial_grid(config.r_inner, r_hi, n_points);
    let mut primary = Vec::with_capacity(n_points);
    let mut companion = Vec::with_capacity(n_points);
    for &r in &radii {
        let p = form.point(r, 1)?;
        if !p.value.is_finite() || !p.d1.is_finite() {
            return Err(Error::NonFinite { r });
        }
        primary.push(p.value);
        companion.push(companion_value(config, energy, r, &p)?);
    }

    let peak_p = primary.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let peak_c = companion.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let tail_p = primary.last().unwrap().abs() / peak_p.max(f64::MIN_POSITIVE);
    let tail_c = companion.last().unwrap().abs() / peak_c.max(f64::MIN_POSITIVE);
    let tail_ratio = tail_p.max(tail_c);
    if tail_ratio > DECAY_TAIL_RATIO {
        return Err(Error::NotDecaying { tail_ratio });
    }

    let density = |r: f64| -> Result<f64> {
        let p = form.point(r, 1)?;
        let g = companion_value(config, energy, r, &p)?;
        Ok(p.value * p.value + g * g)
    };
    let integral = adaptive_simpson(&density, config.r_inner, r_hi)?;
    if !(integral > 0.0) || !integral.is_finite() {
        return Err(Error::NonFinite { r: r_hi });
    }
    let scale = 1.0 / integral.sqrt();
    for v in primary.iter_mut().chain(companion.iter_mut()) {
        *v *= scale;
    }

    let (upper, lower) = if config.limit.is_spin() {
        (primary, companion)
    } else {
        (companion, primary)
    };
    Ok(WaveSample {
        r: radii,
        upper,
        lower,
        norm: scale,
    })
}

/// Factor that [`sample_state`] would rescale by: `1 / sqrt(I)` with
/// `I` the quadrature of `F^2 + G^2` over `[r_inner, r_max]`.
pub fn normalization_factor(
    config: &PhysicalConfig,
    approx: &CentrifugalApprox,
    energy: f64,
    r_max: f64,
) -> Result<f64> {
    let form = ClosedForm::new(config, approx, energy)?;
    let density = |r: f64| -> Result<f64> {
        let p = form.point(r, 1)?;
        let g = companion_value(config, energy, r, &p)?;
        Ok(p.value * p.value + g * g)
    };
    let integral = adaptive_simpson(&density, config.r_inner, r_max)?;
    Ok(1.0 / integral.sqrt())
}

/// Strict sign changes of a sampled function. Samples within a small
/// fraction of the peak amplitude are skipped so that grid points
/// sitting on a zero are not double counted.
pub fn count_nodes(values: &[f64]) -> usize {
    let peak = values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    if peak == 0.0 {
        return 0;
    }
    let floor = NODE_AMPLITUDE_FLOOR * peak;
    let mut nodes = 0;
    let mut last_sign = 0i8;
    for &v in values {
        if v.abs() < floor {
            continue;
        }
        let sign = if v > 0.0 { 1 } else { -1 };
        if last_sign != 0 && sign != last_sign {
            nodes += 1;
        }
        last_sign = sign;
    }
    nodes
}

/// Worst-case defect of the closed form against the radial equation
/// `F'' = W(r) F` in effective-centrifugal mode, measured pointwise as
/// `|F'' - W F| / max(1, |W F|)` and maximized over the grid.
pub fn ode_residual(
    config: &PhysicalConfig,
    approx: &CentrifugalApprox,
    energy: f64,
    radii: &[f64],
) -> Result<f64> {
    let params = model::derived_params(config, approx, energy)?;
    ode_residual_with(config, approx, &params, radii)
}

/// Same defect, but for caller-supplied (possibly perturbed) derived
/// parameters. The equation coefficient is rebuilt from the
/// configuration, not from the parameters, so a perturbation of the
/// exponents must show up as a growing defect.
pub fn ode_residual_with(
    config: &PhysicalConfig,
    approx: &CentrifugalApprox,
    params: &DerivedParams,
    radii: &[f64],
) -> Result<f64> {
    let form = ClosedForm::from_params(*params, config.range);
    let mut worst = 0.0_f64;
    for &r in radii {
        let p = form.point(r, 2)?;
        let w = model::radial_w(config, Some(approx), params.energy, r);
        let defect = (p.d2 - w * p.value).abs();
        worst = worst.max(defect / (w * p.value).abs().max(1.0));
    }
    Ok(worst)
}

/// Adaptive Simpson quadrature with the classic |S2 - S1|/15 error
/// control and Richardson correction.
fn adaptive_simpson<F>(f: &F, a: f64, b: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let m = 0.5 * (a + b);
    let fa = f(a)?;
    let fm = f(m)?;
    let fb = f(b)?;
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(f, a, b, fa, fm, fb, whole, NORM_QUAD_MAX_DEPTH)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<F>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    depth: u32,
) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm)?;
    let frm = f(rm)?;
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let refined = left + right;
    let err = refined - whole;
    if depth == 0 || err.abs() <= 15.0 * NORM_QUAD_REL_TOL * refined.abs().max(f64::MIN_POSITIVE) {
        return Ok(refined + err / 15.0);
    }
    let l = simpson_step(f, a, m, fa, flm, fm, left, depth - 1)?;
    let r = simpson_step(f, m, b, fm, frm, fb, right, depth - 1)?;
    Ok(l + r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::tests::{spin_well, spin_well_approx};
    use approx::assert_relative_eq;

    /// The tensor-free well: kappa = -1 and T = 0 make the centrifugal
    /// coupling vanish, so the closed form solves the radial equation
    /// without any approximation.
    fn tensor_free_well() -> PhysicalConfig {
        let mut cfg = spin_well();
        cfg.tensor = 0.0;
        cfg.kappa = -1;
        cfg
    }

    /// Ground state of the tensor-free well, frozen from a long-double
    /// root solve of the quantization condition.
    const TENSOR_FREE_E0: f64 = 5.6747902696623882;

    fn simpson_composite(r: &[f64], f2: impl Fn(usize) -> f64) -> f64 {
        // The grids here have an odd point count, so plain composite
        // Simpson applies.
        let n = r.len();
        let h = (r[n - 1] - r[0]) / (n - 1) as f64;
        let mut acc = f2(0) + f2(n - 1);
        for i in 1..n - 1 {
            acc += f2(i) * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        acc * h / 3.0
    }

    #[test]
    fn boundary_factor_vanishes_at_a_frozen_eigenvalue() {
        let cfg = tensor_free_well();
        let approx = spin_well_approx();
        let form = ClosedForm::new(&cfg, &approx, TENSOR_FREE_E0).unwrap();
        let radii = radial_grid(cfg.r_inner, default_r_max(&cfg, form.params.mu), 2001);
        let f = upper_component(&cfg, &approx, TENSOR_FREE_E0, &radii).unwrap();
        let peak = f.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        assert!(
            f[0].abs() <= 1e-8 * peak,
            "F(r_inner)/peak = {:e}",
            f[0] / peak
        );
    }

    #[test]
    fn ground_state_of_the_tensor_free_well_has_no_nodes() {
        let cfg = tensor_free_well();
        let sample = sample_state(&cfg, &spin_well_approx(), TENSOR_FREE_E0, 2001, None).unwrap();
        assert_eq!(count_nodes(&sample.upper), 0);
    }

    #[test]
    fn normalized_sample_integrates_to_one() {
        let cfg = tensor_free_well();
        let s = sample_state(&cfg, &spin_well_approx(), TENSOR_FREE_E0, 2001, None).unwrap();
        let integral =
            simpson_composite(&s.r, |i| s.upper[i] * s.upper[i] + s.lower[i] * s.lower[i]);
        // The check rides on 2001-point composite Simpson, which carries
        // a few 1e-6 of discretization error of its own here.
        assert_relative_eq!(integral, 1.0, max_relative = 1e-5);
        assert!(s.norm > 0.0);
    }

    #[test]
    fn recorded_norm_matches_the_quadrature_factor() {
        // The sample must carry exactly the factor the quadrature gives,
        // so renormalizing an already-normalized state is a no-op.
        let cfg = tensor_free_well();
        let approx = spin_well_approx();
        let form = ClosedForm::new(&cfg, &approx, TENSOR_FREE_E0).unwrap();
        let r_max = default_r_max(&cfg, form.params().mu);
        let s = sample_state(&cfg, &approx, TENSOR_FREE_E0, 2001, Some(r_max)).unwrap();
        let n = normalization_factor(&cfg, &approx, TENSOR_FREE_E0, r_max).unwrap();
        assert_relative_eq!(s.norm, n, max_relative = 1e-13);
    }

    #[test]
    fn enlarging_the_box_leaves_the_norm_unchanged() {
        // Past the decay radius the density contributes nothing at the
        // 1e-8 level, so the normalization cannot depend on the box.
        let cfg = tensor_free_well();
        let approx = spin_well_approx();
        let form = ClosedForm::new(&cfg, &approx, TENSOR_FREE_E0).unwrap();
        let r_max = default_r_max(&cfg, form.params().mu);
        let n1 = normalization_factor(&cfg, &approx, TENSOR_FREE_E0, r_max).unwrap();
        let n2 = normalization_factor(&cfg, &approx, TENSOR_FREE_E0, 1.5 * r_max).unwrap();
        assert_relative_eq!(n1, n2, max_relative = 1e-8);
    }

    #[test]
    fn residual_is_small_at_an_interior_energy() {
        let cfg = spin_well();
        let approx = spin_well_approx();
        let radii = radial_grid(cfg.r_inner, 35.0, 2001);
        let res = ode_residual(&cfg, &approx, 4.0, &radii).unwrap();
        assert!(res <= 1e-7, "residual {res:e}");
    }

    #[test]
    fn residual_grows_under_exponent_perturbation() {
        let cfg = spin_well();
        let approx = spin_well_approx();
        let radii = radial_grid(cfg.r_inner, 35.0, 2001);
        let base = ode_residual(&cfg, &approx, 4.0, &radii).unwrap();
        let mut params = model::derived_params(&cfg, &approx, 4.0).unwrap();
        params.mu += 1e-3;
        let bumped = ode_residual_with(&cfg, &approx, &params, &radii).unwrap();
        assert!(
            bumped >= 10.0 * base.max(1e-12),
            "base {base:e}, bumped {bumped:e}"
        );
    }

    #[test]
    fn short_box_fails_the_decay_check() {
        let cfg = tensor_free_well();
        let err =
            sample_state(&cfg, &spin_well_approx(), TENSOR_FREE_E0, 501, Some(2.0)).unwrap_err();
        assert!(matches!(err, Error::NotDecaying { .. }));
    }

    #[test]
    fn companion_rejects_the_denominator_zero() {
        // In the spin limit the lower component divides by M + E - C_s,
        // which vanishes at E = -5 for this well; that energy lies inside
        // the admissible window, so the guard must fire.
        let cfg = spin_well();
        let approx = spin_well_approx();
        let radii = [0.1, 1.0];
        let err = companion_component(&cfg, &approx, -5.0, &radii).unwrap_err();
        assert!(matches!(err, Error::EnergyAtDenominatorZero { .. }));
    }

    #[test]
    fn upper_component_requires_the_spin_limit() {
        let mut cfg = spin_well();
        cfg.limit = SymmetryLimit::Pseudospin { c_ps: 0.0 };
        cfg.depth = 12.0;
        cfg.kappa = -2;
        let err = upper_component(&cfg, &spin_well_approx(), 9.0, &[1.0]).unwrap_err();
        assert!(matches!(err, Error::InvalidConfig { .. }));
    }

    #[test]
    fn node_counting_reference_sequences() {
        assert_eq!(count_nodes(&[1.0, -1.0, 1.0]), 2);
        assert_eq!(count_nodes(&[0.1, 0.2, 0.3]), 0);
        // A grid point exactly on the zero is not a double crossing.
        assert_eq!(count_nodes(&[1.0, 0.0, -1.0]), 1);
        // Noise below the amplitude floor does not flip the sign.
        assert_eq!(count_nodes(&[1.0, -1e-12, 1.0]), 0);
        assert_eq!(count_nodes(&[1.0, -1e-9, 1.0]), 0);
        assert_eq!(count_nodes(&[]), 0);
    }

    #[test]
    fn analytic_derivatives_match_difference_quotients() {
        let cfg = spin_well();
        let form = ClosedForm::new(&cfg, &spin_well_approx(), 4.0).unwrap();
        let h = 1e-5;
        for &r in &[0.3, 1.0, 2.7] {
            let p = form.point(r, 2).unwrap();
            let plus = form.point(r + h, 0).unwrap().value;
            let minus = form.point(r - h, 0).unwrap().value;
            let d1 = (plus - minus) / (2.0 * h);
            let d2 = (plus - 2.0 * p.value + minus) / (h * h);
            assert_relative_eq!(p.d1, d1, max_relative = 1e-8);
            assert_relative_eq!(p.d2, d2, max_relative = 1e-5);
        }
    }
}
