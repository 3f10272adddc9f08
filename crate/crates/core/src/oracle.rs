//! Independent verification of the transcendental spectra: a
//! fixed-step fourth-order Runge-Kutta shooting integrator for the
//! radial equation, with its own bracketing eigenvalue search.
//!
//! Nothing here touches the hypergeometric machinery; agreement
//! between this solver and the closed form is the whole point.

use crate::error::{Error, Result};
use crate::model::{self, CentrifugalApprox, PhysicalConfig};

/// Magnitude at which the integrator rescales the state vector; the
/// rescaling preserves signs and node counts.
const RENORM_THRESHOLD: f64 = 1e100;

/// Sign changes are only counted while the component clears this
/// fraction of its running peak; below it the trajectory is dominated
/// by rescaling residue.
const NODE_AMPLITUDE_FLOOR: f64 = 1e-8;

/// Which centrifugal term the integrated equation carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CentrifugalMode {
    /// The true `delta / r^2`. Solutions of the closed form satisfy
    /// this equation only approximately.
    Exact,
    /// The quadratic replacement in the shape variable; this is the
    /// equation the closed form solves exactly.
    Effective,
}

/// Outcome of one shot across the box.
#[derive(Debug, Clone, Copy)]
pub struct ShootResult {
    pub energy: f64,
    /// Value of the integrated component at the outer edge, in the
    /// rescaled units reached by the end of the run. Its sign is
    /// meaningful; its magnitude is only comparable between runs with
    /// equal renormalization counts.
    pub endpoint_value: f64,
    /// Sign changes of the integrated component inside the oscillatory
    /// region `W < 0`. A crossing in the forbidden region is the
    /// admixture of the growing solution at a not-quite-eigenvalue
    /// energy and is excluded, so at accepted eigenvalues this matches
    /// the node count of the eigenfunction.
    pub nodes: usize,
    /// How many times the state vector was rescaled.
    pub renormalizations: usize,
}

/// Knobs of the oracle, all defaulted for the reference wells.
#[derive(Debug, Clone)]
pub struct OracleOptions {
    /// Outer edge of the box; defaults to `r_inner + 45 * range`.
    pub r_max: Option<f64>,
    /// Fixed RK4 step count across the box; at least 1000.
    pub steps: usize,
    /// Number of window subintervals probed for endpoint sign changes.
    pub scan_points: usize,
    /// Absolute bisection tolerance on the energy; defaults to
    /// 1e-10 times the mass.
    pub tol_e: Option<f64>,
}

impl Default for OracleOptions {
    fn default() -> Self {
        OracleOptions {
            r_max: None,
            steps: 20_000,
            scan_points: 2000,
            tol_e: None,
        }
    }
}

fn box_edge(config: &PhysicalConfig, opts: &OracleOptions) -> f64 {
    opts.r_max.unwrap_or(config.r_inner + 45.0 * config.range)
}

/// Integrate the radial equation `y'' = W(r) y` from `(0, 1)` at the
/// inner cutoff to the outer edge.
pub fn shoot(
    config: &PhysicalConfig,
    approx: &CentrifugalApprox,
    mode: CentrifugalMode,
    energy: f64,
    opts: &OracleOptions,
) -> Result<ShootResult> {
    if opts.steps < 1000 {
        return Err(Error::InvalidConfig {
            what: format!(
                "the oracle needs at least 1000 integration steps, got {}",
                opts.steps
            ),
        });
    }
    config.validate()?;
    let r_hi = box_edge(config, opts);
    if !(r_hi > config.r_inner) {
        return Err(Error::InvalidConfig {
            what: format!(
                "oracle box edge {} does not exceed the inner cutoff {}",
                r_hi, config.r_inner
            ),
        });
    }
    let carrier = match mode {
        CentrifugalMode::Exact => None,
        CentrifugalMode::Effective => Some(approx),
    };
    let w = |r: f64| model::radial_w(config, carrier, energy, r);

    let h = (r_hi - config.r_inner) / opts.steps as f64;
    let mut y = 0.0_f64;
    let mut v = 1.0_f64;
    let mut nodes = 0usize;
    let mut renormalizations = 0usize;
    let mut last_sign = 0i8;
    let mut peak = 0.0_f64;
    for i in 0..opts.steps {
        let r = config.r_inner + h * i as f64;
        // Classic RK4 on the first-order system (y, v).
        let k1y = v;
        let k1v = w(r) * y;
        let wm = w(r + 0.5 * h);
        let k2y = v + 0.5 * h * k1v;
        let k2v = wm * (y + 0.5 * h * k1y);
        let k3y = v + 0.5 * h * k2v;
        let k3v = wm * (y + 0.5 * h * k2y);
        let we = w(r + h);
        let k4y = v + h * k3v;
        let k4v = we * (y + h * k3y);
        y += h / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y);
        v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);

        if !y.is_finite() || !v.is_finite() {
            return Err(Error::NonFinite { r: r + h });
        }
        let magnitude = y.abs().max(v.abs());
        if magnitude > RENORM_THRESHOLD {
            y /= magnitude;
            v /= magnitude;
            peak /= magnitude;
            renormalizations += 1;
        }
        peak = peak.max(y.abs());
        if y.abs() > NODE_AMPLITUDE_FLOOR * peak {
            let sign = if y > 0.0 { 1 } else { -1 };
            // A solution of y'' = W y can only oscillate where W < 0;
            // a flip inside the forbidden region is the admixture of
            // the growing solution at a not-quite-eigenvalue energy,
            // not a node.
            if last_sign != 0 && sign != last_sign && we < 0.0 {
                nodes += 1;
            }
            last_sign = sign;
        }
    }
    Ok(ShootResult {
        energy,
        endpoint_value: y,
        nodes,
        renormalizations,
    })
}

/// Every eigenvalue of the shooting problem inside the admissible
/// window, found by an endpoint sign-change scan plus bisection.
///
/// The returned energies are ascending. Because the rescaled endpoint
/// magnitudes are not comparable across runs, the bisection decides on
/// the endpoint sign alone.
pub fn oracle_spectrum(
    config: &PhysicalConfig,
    approx: &CentrifugalApprox,
    mode: CentrifugalMode,
    opts: &OracleOptions,
) -> Result<Vec<ShootResult>> {
    let (lo, hi) = model::energy_window(config, approx)?;
    let span = hi - lo;
    let tol = opts.tol_e.unwrap_or(1e-10 * config.mass);
    let n = opts.scan_points.max(16);
    let step = span / n as f64;

    let mut energies = Vec::with_capacity(n);
    let mut endpoints = Vec::with_capacity(n);
    for i in 0..n {
        let e = lo + (i as f64 + 0.5) * step;
        energies.push(e);
        endpoints.push(shoot(config, approx, mode, e, opts)?.endpoint_value);
    }

    let mut found = Vec::new();
    for i in 0..n - 1 {
        if endpoints[i] == 0.0 {
            found.push(shoot(config, approx, mode, energies[i], opts)?);
            continue;
        }
        if endpoints[i].signum() * endpoints[i + 1].signum() < 0.0 {
            let root = bisect_endpoint(
                config,
                approx,
                mode,
                energies[i],
                energies[i + 1],
                endpoints[i],
                tol,
                opts,
            )?;
            found.push(shoot(config, approx, mode, root, opts)?);
        }
    }
    Ok(found)
}

#[allow(clippy::too_many_arguments)]
fn bisect_endpoint(
    config: &PhysicalConfig,
    approx: &CentrifugalApprox,
    mode: CentrifugalMode,
    mut a: f64,
    mut b: f64,
    fa: f64,
    tol: f64,
    opts: &OracleOptions,
) -> Result<f64> {
    let mut sign_a = fa.signum();
    while b - a > tol {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let fm = shoot(config, approx, mode, m, opts)?.endpoint_value;
        if fm == 0.0 {
            return Ok(m);
        }
        if fm.signum() == sign_a {
            a = m;
            sign_a = fm.signum();
        } else {
            b = m;
        }
    }
    Ok(0.5 * (a + b))
}
