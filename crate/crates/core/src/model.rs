//! Physical configuration and the algebra that turns it into the
//! parameters of the closed-form solution.
//!
//! The radial problem depends on the energy through three coupling
//! constants. Under spin symmetry the second-order equation for the
//! upper component reads
//!
//! ```text
//! F'' = [ beta2 + gamma (1 - b u)^2 + delta / r^2 ] F,
//! u = 1 / (exp(2 r / d) + 1),
//! ```
//!
//! and under pseudospin symmetry the lower component obeys the mirror
//! equation with barred constants and `gamma` entering with a minus
//! sign. The `1/r^2` centrifugal term is replaced by a quadratic in `u`
//! (the Pekeris-style approximation produced by [`fit_centrifugal`]),
//! after which the equation is hypergeometric and the bound-state
//! exponents `mu`, `nu`, `lambda` follow in closed form.
//!
//! The stored coefficients of [`CentrifugalApprox`] are defined so that
//! the closed-form solution's own centrifugal carrier, reconstructed in
//! [`CentrifugalApprox::carrier`], reproduces the fitted quadratic
//! exactly in either symmetry limit.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::HypParams;

/// Number of sample points used by the centrifugal fit.
const FIT_POINTS: usize = 512;

/// Resolution of the window scan before edge bisection.
const WINDOW_SCAN_POINTS: usize = 4096;

/// Relative accuracy of the refined window edges.
const WINDOW_EDGE_REL_TOL: f64 = 1e-10;

/// Which symmetry limit the coupled equations are taken in, together
/// with the constant value of the corresponding potential combination.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SymmetryLimit {
    /// The difference of vector and scalar potentials is the constant
    /// `c_s`; the upper spinor component is primary.
    Spin { c_s: f64 },
    /// The sum of vector and scalar potentials is the constant `c_ps`;
    /// the lower spinor component is primary.
    Pseudospin { c_ps: f64 },
}

impl SymmetryLimit {
    /// The symmetry-breaking constant (`c_s` or `c_ps`).
    pub fn constant(&self) -> f64 {
        match *self {
            SymmetryLimit::Spin { c_s } => c_s,
            SymmetryLimit::Pseudospin { c_ps } => c_ps,
        }
    }

    pub fn is_spin(&self) -> bool {
        matches!(self, SymmetryLimit::Spin { .. })
    }
}

/// Full description of one physical problem.
///
/// The potential well has depth `depth`, shape parameter `b_shape` and
/// range `range` (the `d` in `u = 1/(exp(2r/d)+1)`); `tensor` is the
/// strength of the Coulomb-like tensor term, which only shifts the
/// centrifugal coupling `delta`. The radial domain starts at the inner
/// cutoff `r_inner`, where the quantization condition pins the
/// wavefunction to zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalConfig {
    pub mass: f64,
    pub depth: f64,
    pub b_shape: f64,
    pub range: f64,
    pub tensor: f64,
    pub kappa: i32,
    pub limit: SymmetryLimit,
    pub r_inner: f64,
}

impl PhysicalConfig {
    /// Check structural requirements that the solvers rely on.
    pub fn validate(&self) -> Result<()> {
        if self.kappa == 0 {
            return Err(Error::ZeroKappa);
        }
        let positive = [
            ("mass", self.mass),
            ("depth", self.depth),
            ("range", self.range),
        ];
        for (name, value) in positive {
            if !(value > 0.0) || !value.is_finite() {
                return Err(Error::InvalidConfig {
                    what: format!("{name} must be positive and finite, got {value}"),
                });
            }
        }
        if !(self.r_inner >= 0.0) || !self.r_inner.is_finite() {
            return Err(Error::InvalidConfig {
                what: format!("r_inner must be nonnegative, got {}", self.r_inner),
            });
        }
        if !self.b_shape.is_finite() || !self.tensor.is_finite() {
            return Err(Error::InvalidConfig {
                what: "b_shape and tensor must be finite".to_string(),
            });
        }
        Ok(())
    }

    /// The shape variable `u(r) = 1 / (exp(2r/range) + 1)`.
    pub fn shape_u(&self, r: f64) -> f64 {
        1.0 / ((2.0 * r / self.range).exp() + 1.0)
    }

    /// Value of the shape variable at the inner cutoff; this is where
    /// the hypergeometric factor must vanish.
    pub fn z_inner(&self) -> f64 {
        self.shape_u(self.r_inner)
    }
}

/// Energy-dependent coupling constants of the second-order equation.
///
/// In the pseudospin limit these are the barred quantities; note that
/// `gamma` then multiplies the well term with a minus sign.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingConstants {
    pub beta2: f64,
    pub gamma: f64,
    pub delta: f64,
}

/// Compute the coupling constants at a given energy.
pub fn coupling_constants(config: &PhysicalConfig, energy: f64) -> CouplingConstants {
    let m = config.mass;
    let kt = config.tensor + config.kappa as f64;
    match config.limit {
        SymmetryLimit::Spin { c_s } => CouplingConstants {
            beta2: (m - energy) * (m + energy - c_s),
            gamma: (m + energy - c_s) * config.depth,
            delta: kt * (kt + 1.0),
        },
        SymmetryLimit::Pseudospin { c_ps } => CouplingConstants {
            beta2: (m + energy) * (m - energy + c_ps),
            gamma: config.depth * (m - energy + c_ps),
            delta: kt * (kt - 1.0),
        },
    }
}

/// The attractive well `Sigma(r) = depth * (1 - b_shape * u(r))^2` that
/// enters the spin-limit equation.
pub fn sigma_potential(config: &PhysicalConfig, r: f64) -> f64 {
    let w = 1.0 - config.b_shape * config.shape_u(r);
    config.depth * w * w
}

/// The well in the pseudospin-limit equation; same shape as
/// [`sigma_potential`] but coupled with the opposite sign there.
pub fn delta_potential(config: &PhysicalConfig, r: f64) -> f64 {
    sigma_potential(config, r)
}

/// Coefficient `W(r)` of the radial equation `F'' = W(r) F` at a given
/// energy.
///
/// With `approx = None` the centrifugal term is the exact `delta / r^2`;
/// with a stored quadratic it is `delta` times [`CentrifugalApprox::carrier`],
/// which is the equation the closed-form solution satisfies exactly.
pub fn radial_w(
    config: &PhysicalConfig,
    approx: Option<&CentrifugalApprox>,
    energy: f64,
    r: f64,
) -> f64 {
    let cc = coupling_constants(config, energy);
    let u = config.shape_u(r);
    let w = 1.0 - config.b_shape * u;
    let centrifugal = match approx {
        Some(a) => a.carrier(&config.limit, u),
        None => 1.0 / (r * r),
    };
    let well = cc.gamma * w * w;
    match config.limit {
        SymmetryLimit::Spin { .. } => cc.beta2 + well + cc.delta * centrifugal,
        SymmetryLimit::Pseudospin { .. } => cc.beta2 - well + cc.delta * centrifugal,
    }
}

/// Stored coefficients of the quadratic centrifugal replacement.
///
/// These are the numbers that enter the closed-form parameter formulas
/// verbatim. Their relation to the fitted quadratic
/// `1/r^2 ~ c0 + c1 u + c2 u^2` depends on the symmetry limit; see
/// [`fit_centrifugal`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CentrifugalApprox {
    pub d0: f64,
    pub d1: f64,
    pub d2: f64,
}

impl CentrifugalApprox {
    /// The quadratic in `u` that the closed-form solution substitutes
    /// for `1/r^2` in the given limit.
    ///
    /// When the coefficients come from [`fit_centrifugal`] with the same
    /// limit, this equals the fitted quadratic in either case.
    pub fn carrier(&self, limit: &SymmetryLimit, u: f64) -> f64 {
        match limit {
            SymmetryLimit::Spin { .. } => self.d0 - self.d1 * u + self.d2 * u * u,
            SymmetryLimit::Pseudospin { .. } => {
                self.d0 + (2.0 * self.d2 - self.d1) * u - self.d2 * u * u
            }
        }
    }
}

/// Result of the centrifugal fit: stored coefficients plus the worst
/// relative deviation of the quadratic from `1/r^2` over the fit grid.
///
/// The deviation is reported, not bounded; close to the inner cutoff the
/// approximation is poor in relative terms and the downstream effect on
/// eigenvalues is checked against the shooting oracle instead.
#[derive(Debug, Clone, Copy)]
pub struct CentrifugalFit {
    pub approx: CentrifugalApprox,
    pub max_rel_error: f64,
}

/// Least-squares fit of `1/r^2` by a quadratic in the shape variable,
/// sampled on a geometric grid from `max(r_inner, range/20)` to `r_max`.
///
/// The unique fitted quadratic `c0 + c1 u + c2 u^2` is then mapped onto
/// stored coefficients per limit (spin: `(c0, -c1, c2)`; pseudospin:
/// `(c0, -c1 - 2 c2, -c2)`) so that [`CentrifugalApprox::carrier`]
/// reproduces it exactly.
pub fn fit_centrifugal(config: &PhysicalConfig, r_max: f64) -> Result<CentrifugalFit> {
    config.validate()?;
    let r_lo = config.r_inner.max(0.05 * config.range);
    if !(r_max > r_lo) {
        return Err(Error::InvalidConfig {
            what: format!("fit range empty: r_max = {r_max} must exceed {r_lo}"),
        });
    }

    // Normal equations for the basis {1, u, u^2}. The Gram matrix is
    // well conditioned here because u spans most of (0, 1/2) on the
    // geometric grid.
    let mut gram = [[0.0_f64; 3]; 3];
    let mut rhs = [0.0_f64; 3];
    let log_lo = r_lo.ln();
    let log_step = (r_max.ln() - log_lo) / (FIT_POINTS - 1) as f64;
    for i in 0..FIT_POINTS {
        let r = (log_lo + log_step * i as f64).exp();
        let u = config.shape_u(r);
        let basis = [1.0, u, u * u];
        let target = 1.0 / (r * r);
        for row in 0..3 {
            for col in 0..3 {
                gram[row][col] += basis[row] * basis[col];
            }
            rhs[row] += basis[row] * target;
        }
    }
    let c = solve_3x3(gram, rhs)?;

    let mut max_rel_error = 0.0_f64;
    for i in 0..FIT_POINTS {
        let r = (log_lo + log_step * i as f64).exp();
        let u = config.shape_u(r);
        let fitted = c[0] + c[1] * u + c[2] * u * u;
        max_rel_error = max_rel_error.max((fitted * r * r - 1.0).abs());
    }

    let approx = match config.limit {
        SymmetryLimit::Spin { .. } => CentrifugalApprox {
            d0: c[0],
            d1: -c[1],
            d2: c[2],
        },
        SymmetryLimit::Pseudospin { .. } => CentrifugalApprox {
            d0: c[0],
            d1: -c[1] - 2.0 * c[2],
            d2: -c[2],
        },
    };
    Ok(CentrifugalFit {
        approx,
        max_rel_error,
    })
}

/// Gaussian elimination with partial pivoting for the 3x3 normal
/// equations.
#[allow(clippy::needless_range_loop)]
fn solve_3x3(mut a: [[f64; 3]; 3], mut b: [f64; 3]) -> Result<[f64; 3]> {
    let scale = a
        .iter()
        .flat_map(|row| row.iter())
        .fold(0.0_f64, |m, &v| m.max(v.abs()));
    for col in 0..3 {
        let pivot_row = (col..3)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        if a[pivot_row][col].abs() <= 1e-14 * scale {
            return Err(Error::IllConditionedFit {
                pivot: a[pivot_row][col],
            });
        }
        a.swap(col, pivot_row);
        b.swap(col, pivot_row);
        for row in col + 1..3 {
            let f = a[row][col] / a[col][col];
            for k in col..3 {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = [0.0_f64; 3];
    for row in (0..3).rev() {
        let mut s = b[row];
        for k in row + 1..3 {
            s -= a[row][k] * x[k];
        }
        x[row] = s / a[row][row];
    }
    Ok(x)
}

/// Everything the closed-form solution needs at one energy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedParams {
    pub beta2: f64,
    pub gamma: f64,
    pub delta: f64,
    /// Inner exponent: the solution behaves like `z^mu` as `z -> 0`.
    pub mu: f64,
    /// Principal branch `nu_plus = 1/2 + sqrt(nu_radicand)/2`; the conjugate
    /// branch `1 - nu_plus` is not used anywhere in the solver.
    pub nu_plus: f64,
    /// Outer exponent: the solution behaves like `(1-z)^lambda` near the
    /// origin of the radial coordinate.
    pub lam: f64,
    /// Radicand of the outer exponent, `lam = (range/2) sqrt(big_a)`.
    pub big_a: f64,
    /// Shape variable at the inner cutoff.
    pub z_inner: f64,
    pub energy: f64,
}

impl DerivedParams {
    /// Hypergeometric parameters of the closed-form solution.
    pub fn hyp_params(&self) -> HypParams {
        HypParams::real(
            self.mu + self.nu_plus + self.lam,
            1.0 + self.mu - self.nu_plus + self.lam,
            2.0 * self.mu + 1.0,
        )
    }
}

/// Radicand of the inner exponent `mu` at one energy; positive exactly
/// when the energy admits a normalizable `z^mu` behaviour.
fn mu_radicand(config: &PhysicalConfig, approx: &CentrifugalApprox, energy: f64) -> f64 {
    let cc = coupling_constants(config, energy);
    match config.limit {
        SymmetryLimit::Spin { .. } => cc.beta2 + cc.gamma + cc.delta * approx.d0,
        SymmetryLimit::Pseudospin { .. } => cc.beta2 - cc.gamma + cc.delta * approx.d0,
    }
}

/// Derive the closed-form solution parameters at one energy.
///
/// Fails with [`Error::OutsideBoundDomain`], [`Error::ComplexNu`] or
/// [`Error::NegativeA`] when the respective radicand leaves its allowed
/// range; the set of energies on which this succeeds is the window
/// reported by [`energy_window`].
pub fn derived_params(
    config: &PhysicalConfig,
    approx: &CentrifugalApprox,
    energy: f64,
) -> Result<DerivedParams> {
    let cc = coupling_constants(config, energy);
    let d = config.range;
    let b = config.b_shape;

    let m2 = mu_radicand(config, approx, energy);
    if !(m2 > 0.0) {
        return Err(Error::OutsideBoundDomain { energy, m2 });
    }
    let mu = 0.5 * d * m2.sqrt();

    let (nu_radicand, big_a) = match config.limit {
        SymmetryLimit::Spin { .. } => (
            1.0 + (cc.gamma * b * b + cc.delta * approx.d2) * d * d,
            cc.beta2
                + cc.gamma * (b - 1.0) * (b - 1.0)
                + cc.delta * (approx.d0 - approx.d1 + approx.d2),
        ),
        SymmetryLimit::Pseudospin { .. } => (
            1.0 - (cc.gamma * b * b + cc.delta * approx.d2) * d * d,
            cc.beta2 - cc.gamma * (b - 1.0) * (b - 1.0)
                + cc.delta * (approx.d0 - approx.d1 + approx.d2),
        ),
    };
    if nu_radicand < 0.0 {
        return Err(Error::ComplexNu {
            radicand: nu_radicand,
        });
    }
    let nu_plus = 0.5 + 0.5 * nu_radicand.sqrt();
    if big_a < 0.0 {
        return Err(Error::NegativeA { a: big_a });
    }
    let lam = 0.5 * d * big_a.sqrt();

    Ok(DerivedParams {
        beta2: cc.beta2,
        gamma: cc.gamma,
        delta: cc.delta,
        mu,
        nu_plus,
        lam,
        big_a,
        z_inner: config.z_inner(),
        energy,
    })
}

/// Maximal energy interval on which [`derived_params`] succeeds.
///
/// The radicand of `mu` is a downward parabola in the energy, which
/// brackets the search; within that superinterval the remaining
/// constraints cut out a single subinterval, located by a scan and
/// sharpened by bisection to a relative edge accuracy of `1e-10`.
pub fn energy_window(config: &PhysicalConfig, approx: &CentrifugalApprox) -> Result<(f64, f64)> {
    config.validate()?;

    // mu_radicand(E) = -E^2 + p E + q; recover p and q from three
    // evaluations.
    let p = (mu_radicand(config, approx, 1.0) - mu_radicand(config, approx, -1.0)) / 2.0;
    let q = mu_radicand(config, approx, 0.0);
    let disc = p * p + 4.0 * q;
    if disc <= 0.0 {
        return Err(Error::EmptyWindow);
    }
    let root_lo = (p - disc.sqrt()) / 2.0;
    let root_hi = (p + disc.sqrt()) / 2.0;

    let ok = |e: f64| derived_params(config, approx, e).is_ok();
    let step = (root_hi - root_lo) / WINDOW_SCAN_POINTS as f64;
    let probe = |i: usize| root_lo + (i as f64 + 0.5) * step;

    let mut first = None;
    let mut last = None;
    for i in 0..WINDOW_SCAN_POINTS {
        if ok(probe(i)) {
            if first.is_none() {
                first = Some(i);
            }
            last = Some(i);
        }
    }
    let (first, last) = match (first, last) {
        (Some(f), Some(l)) => (f, l),
        _ => return Err(Error::EmptyWindow),
    };

    // Edge refinement: bisect between the outermost failing and the
    // outermost succeeding probe. The window is an intersection of
    // intervals in the energy, so the success set has no holes.
    let refine = |mut bad: f64, mut good: f64| {
        for _ in 0..200 {
            if (bad - good).abs() <= WINDOW_EDGE_REL_TOL * good.abs().max(1.0) {
                break;
            }
            let mid = 0.5 * (bad + good);
            if ok(mid) {
                good = mid;
            } else {
                bad = mid;
            }
        }
        good
    };
    let lower_bad = if first == 0 {
        root_lo
    } else {
        probe(first - 1)
    };
    let upper_bad = if last == WINDOW_SCAN_POINTS - 1 {
        root_hi
    } else {
        probe(last + 1)
    };
    let lo = refine(lower_bad, probe(first));
    let hi = refine(upper_bad, probe(last));
    Ok((lo, hi))
}

/// Angular momentum labels attached to a given `kappa`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AngularLabels {
    /// Orbital angular momentum: `l` in the spin limit, the companion
    /// `l~` in the pseudospin limit.
    pub orbital: u32,
    /// Total angular momentum `j = |kappa| - 1/2`.
    pub j: f64,
}

/// Map `kappa` to the orbital label of the primary component and the
/// total angular momentum.
pub fn kappa_mapping(kappa: i32, limit: &SymmetryLimit) -> Result<AngularLabels> {
    if kappa == 0 {
        return Err(Error::ZeroKappa);
    }
    let orbital = match (limit.is_spin(), kappa < 0) {
        (true, true) => (-kappa - 1) as u32,
        (true, false) => kappa as u32,
        (false, true) => (-kappa) as u32,
        (false, false) => (kappa - 1) as u32,
    };
    Ok(AngularLabels {
        orbital,
        j: kappa.abs() as f64 - 0.5,
    })
}
