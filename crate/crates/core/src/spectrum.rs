//! Bound-state spectra from the transcendental quantization condition:
//! the hypergeometric factor of the closed form must vanish at the
//! inner cutoff.
//!
//! Roots are located by a sign-change scan over the admissible energy
//! window followed by bisection, so every accepted eigenvalue carries a
//! certified bracket. Roots of even multiplicity (tangencies) produce
//! no sign change and are not searched for; a denser scan is the only
//! way to split near-degenerate pairs.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::model::{self, CentrifugalApprox, PhysicalConfig, SymmetryLimit};
use crate::special;
use crate::wavefunction::{self, DEFAULT_GRID_POINTS};

fn default_scan_points() -> usize {
    2000
}

/// Knobs of the spectral solver; the defaults reproduce the shipped
/// reference spectra.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolverOptions {
    /// Number of window subintervals probed for sign changes.
    #[serde(default = "default_scan_points")]
    pub scan_points: usize,
    /// Absolute energy tolerance of the bisection; defaults to 1e-12
    /// times the window span.
    #[serde(default)]
    pub tol_e: Option<f64>,
    /// Keep at most this many states, counted from the bottom.
    #[serde(default)]
    pub max_states: Option<usize>,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            scan_points: default_scan_points(),
            tol_e: None,
            max_states: None,
        }
    }
}

/// One accepted eigenvalue with its certification diagnostics.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundState {
    /// Rank of the state in ascending energy order.
    pub n_r: usize,
    pub energy: f64,
    pub kappa: i32,
    pub limit: SymmetryLimit,
    /// Measured node count of the primary component. This equals `n_r`
    /// only when the whole window lies in one Dirac branch; when the
    /// window straddles both branches the sequence is V-shaped in the
    /// energy and the disagreement is intentional, see the README.
    pub nodes: usize,
    /// Magnitude of the quantization residual at the accepted energy.
    pub residual_at_root: f64,
    /// Width of the final bisection bracket.
    pub bracket_width: f64,
}

/// Value whose zeros in the energy are the bound states: the
/// hypergeometric factor of the closed form, evaluated at the inner
/// cutoff. All series parameters are real inside the admissible
/// window, so the value is returned as a real number.
pub fn quantization_residual(
    config: &PhysicalConfig,
    approx: &CentrifugalApprox,
    energy: f64,
) -> Result<f64> {
    let p = model::derived_params(config, approx, energy)?;
    let value = special::gauss_2f1(&p.hyp_params(), p.z_inner)?.value;
    Ok(value.re)
}

/// All bound states inside the admissible energy window, in ascending
/// energy order.
///
/// The returned list is empty (not an error) when the residual never
/// changes sign, for example when the inner cutoff is so large that the
/// hypergeometric argument is effectively zero.
pub fn solve_spectrum(
    config: &PhysicalConfig,
    approx: &CentrifugalApprox,
    opts: &SolverOptions,
) -> Result<Vec<BoundState>> {
    config.validate()?;
    let (lo, hi) = model::energy_window(config, approx)?;
    let span = hi - lo;
    let tol = opts.tol_e.unwrap_or(1e-12 * span);
    let n = opts.scan_points.max(16);

    // Probe subinterval midpoints; the window edges themselves are not
    // evaluable because the derived-parameter radicands vanish there.
    let step = span / n as f64;
    let mut energies = Vec::with_capacity(n);
    let mut residuals = Vec::with_capacity(n);
    for i in 0..n {
        let e = lo + (i as f64 + 0.5) * step;
        energies.push(e);
        residuals.push(quantization_residual(config, approx, e)?);
    }

    let mut roots = Vec::new();
    for i in 0..n - 1 {
        if residuals[i] == 0.0 {
            roots.push((energies[i], 0.0));
            continue;
        }
        if residuals[i].signum() * residuals[i + 1].signum() < 0.0 {
            roots.push(bisect(
                config,
                approx,
                energies[i],
                energies[i + 1],
                residuals[i],
                tol,
            )?);
        }
    }
    if residuals[n - 1] == 0.0 {
        roots.push((energies[n - 1], 0.0));
    }

    let mut states = Vec::with_capacity(roots.len());
    for (idx, (energy, width)) in roots.iter().enumerate() {
        if let Some(maximum) = opts.max_states {
            if idx >= maximum {
                break;
            }
        }
        let p = model::derived_params(config, approx, *energy)?;
        let radii = wavefunction::radial_grid(
            config.r_inner,
            wavefunction::default_r_max(config, p.mu),
            DEFAULT_GRID_POINTS,
        );
        // Node counting is scale invariant, so the raw closed form is
        // sampled without normalizing; that also keeps states at a
        // companion-denominator zero countable.
        let primary = match config.limit {
            SymmetryLimit::Spin { .. } => {
                wavefunction::upper_component(config, approx, *energy, &radii)?
            }
            SymmetryLimit::Pseudospin { .. } => {
                wavefunction::lower_component_pseudospin(config, approx, *energy, &radii)?
            }
        };
        states.push(BoundState {
            n_r: idx,
            energy: *energy,
            kappa: config.kappa,
            limit: config.limit,
            nodes: wavefunction::count_nodes(&primary),
            residual_at_root: quantization_residual(config, approx, *energy)?.abs(),
            bracket_width: *width,
        });
    }
    Ok(states)
}

/// Bisection on the sign of the residual; returns the bracket midpoint
/// and the final bracket width.
fn bisect(
    config: &PhysicalConfig,
    approx: &CentrifugalApprox,
    mut a: f64,
    mut b: f64,
    mut fa: f64,
    tol: f64,
) -> Result<(f64, f64)> {
    while b - a > tol {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let fm = quantization_residual(config, approx, m)?;
        if fm == 0.0 {
            return Ok((m, 0.0));
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    Ok((0.5 * (a + b), b - a))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::tests::{spin_well, spin_well_approx};
    use approx::assert_relative_eq;

    fn tensor_free_well() -> PhysicalConfig {
        let mut cfg = spin_well();
        cfg.tensor = 0.0;
        cfg.kappa = -1;
        cfg
    }

    /// Pseudospin counterpart of the reference well, deepened so the
    /// narrower pseudospin window still binds a handful of states.
    fn pseudo_well() -> PhysicalConfig {
        let mut cfg = spin_well();
        cfg.depth = 12.0;
        cfg.kappa = -2;
        cfg.limit = SymmetryLimit::Pseudospin { c_ps: -1.0 };
        cfg
    }

    /// The fitted quadratic of `spin_well_approx`, stored with the
    /// pseudospin sign convention.
    fn pseudo_well_approx() -> CentrifugalApprox {
        let s = spin_well_approx();
        CentrifugalApprox {
            d0: s.d0,
            d1: s.d1 - 2.0 * s.d2,
            d2: -s.d2,
        }
    }

    const TENSOR_FREE_ROOTS: [f64; 3] =
        [5.6747902696623882, 6.5973117198749591, 6.9914292326438705];

    #[test]
    fn tensor_free_spectrum_matches_frozen_roots() {
        let cfg = tensor_free_well();
        let states = solve_spectrum(&cfg, &spin_well_approx(), &SolverOptions::default()).unwrap();
        assert_eq!(states.len(), 3);
        for (s, expect) in states.iter().zip(TENSOR_FREE_ROOTS) {
            assert_relative_eq!(s.energy, expect, max_relative = 1e-9);
        }
        assert_eq!(
            states.iter().map(|s| s.nodes).collect::<Vec<_>>(),
            vec![0, 1, 2]
        );
        assert_eq!(
            states.iter().map(|s| s.n_r).collect::<Vec<_>>(),
            vec![0, 1, 2]
        );
    }

    #[test]
    fn reference_well_spectrum_matches_frozen_roots() {
        let expected = [
            -6.8761509219584003,
            -6.3045488234253408,
            -5.0720265465563834,
            -2.4522591140017100,
            3.4672683331178433,
            6.3172397475165170,
            7.7941792311224578,
            8.6270597608779980,
            8.9585350955868890,
        ];
        let cfg = spin_well();
        let states = solve_spectrum(&cfg, &spin_well_approx(), &SolverOptions::default()).unwrap();
        assert_eq!(states.len(), 9);
        for (s, expect) in states.iter().zip(expected) {
            assert_relative_eq!(s.energy, expect, max_relative = 1e-9);
        }
        // The window spans both Dirac branches, so the node counts fall
        // and rise again instead of tracking the rank.
        assert_eq!(
            states.iter().map(|s| s.nodes).collect::<Vec<_>>(),
            vec![6, 5, 4, 3, 3, 4, 5, 6, 7]
        );
        let span = 8.9666718366240020_f64 - (-6.9666718366240215_f64);
        for s in &states {
            assert!(s.bracket_width <= 1.01e-12 * span);
        }
    }

    #[test]
    fn pseudospin_spectrum_matches_frozen_roots() {
        let expected = [
            0.29503187000993369,
            2.3958147637523570,
            4.4515501405771740,
            7.9330199272801867,
            9.5728490644089632,
            10.542446174315632,
            10.945233324684796,
        ];
        let states = solve_spectrum(
            &pseudo_well(),
            &pseudo_well_approx(),
            &SolverOptions::default(),
        )
        .unwrap();
        assert_eq!(states.len(), 7);
        for (s, expect) in states.iter().zip(expected) {
            assert_relative_eq!(s.energy, expect, max_relative = 1e-9);
        }
        assert_eq!(
            states.iter().map(|s| s.nodes).collect::<Vec<_>>(),
            vec![5, 4, 4, 5, 6, 7, 8]
        );
    }

    #[test]
    fn pseudospin_tensor_free_spectrum_matches_frozen_roots() {
        // kappa = 1 with T = 0 zeroes the pseudospin centrifugal
        // coupling, so these roots are exact solutions of the radial
        // equation with no approximation at all.
        let expected = [4.3189168720618536, 5.4799226059475554, 6.5636474776439950];
        let mut cfg = pseudo_well();
        cfg.kappa = 1;
        cfg.tensor = 0.0;
        let states =
            solve_spectrum(&cfg, &pseudo_well_approx(), &SolverOptions::default()).unwrap();
        assert_eq!(states.len(), 3);
        for (s, expect) in states.iter().zip(expected) {
            assert_relative_eq!(s.energy, expect, max_relative = 1e-9);
        }
        assert_eq!(
            states.iter().map(|s| s.nodes).collect::<Vec<_>>(),
            vec![0, 1, 2]
        );
    }

    #[test]
    fn spectra_are_bitwise_deterministic() {
        let cfg = spin_well();
        let approx = spin_well_approx();
        let a = solve_spectrum(&cfg, &approx, &SolverOptions::default()).unwrap();
        let b = solve_spectrum(&cfg, &approx, &SolverOptions::default()).unwrap();
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.energy.to_bits(), y.energy.to_bits());
            assert_eq!(x.residual_at_root.to_bits(), y.residual_at_root.to_bits());
            assert_eq!(x.nodes, y.nodes);
        }
    }

    #[test]
    fn denser_scans_find_the_same_roots() {
        let cfg = tensor_free_well();
        let approx = spin_well_approx();
        // The top root sits 0.0086 below the window edge, so the scan
        // step must stay under twice that; 1000 points over the span of
        // 12 gives half-steps of 0.006.
        let coarse = solve_spectrum(
            &cfg,
            &approx,
            &SolverOptions {
                scan_points: 1000,
                ..SolverOptions::default()
            },
        )
        .unwrap();
        let fine = solve_spectrum(
            &cfg,
            &approx,
            &SolverOptions {
                scan_points: 5000,
                ..SolverOptions::default()
            },
        )
        .unwrap();
        assert_eq!(coarse.len(), fine.len());
        for (c, f) in coarse.iter().zip(&fine) {
            assert_relative_eq!(c.energy, f.energy, max_relative = 1e-9);
        }
    }

    #[test]
    fn state_cap_truncates_from_the_bottom() {
        let cfg = spin_well();
        let states = solve_spectrum(
            &cfg,
            &spin_well_approx(),
            &SolverOptions {
                max_states: Some(2),
                ..SolverOptions::default()
            },
        )
        .unwrap();
        assert_eq!(states.len(), 2);
        assert!(states[0].energy < states[1].energy);
        assert_eq!(states[1].n_r, 1);
    }

    #[test]
    fn far_inner_cutoff_empties_the_spectrum() {
        // At r_inner = 200 the hypergeometric argument underflows to
        // zero and the residual is pinned at one: no sign changes.
        let mut cfg = tensor_free_well();
        cfg.r_inner = 200.0;
        let states = solve_spectrum(&cfg, &spin_well_approx(), &SolverOptions::default()).unwrap();
        assert!(states.is_empty());
    }

    #[test]
    fn bound_states_round_trip_through_json() {
        let cfg = tensor_free_well();
        let states = solve_spectrum(&cfg, &spin_well_approx(), &SolverOptions::default()).unwrap();
        let text = serde_json::to_string(&states).unwrap();
        let back: Vec<BoundState> = serde_json::from_str(&text).unwrap();
        assert_eq!(states.len(), back.len());
        for (x, y) in states.iter().zip(&back) {
            assert_eq!(x.energy.to_bits(), y.energy.to_bits());
            assert_eq!(x.bracket_width.to_bits(), y.bracket_width.to_bits());
            assert_eq!(x.n_r, y.n_r);
        }
    }
}
