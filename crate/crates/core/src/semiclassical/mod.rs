//! Short-wavelength approximation.
//!
//! The WKBJ phase of partial wave `m` follows from the classical path at
//! `mu = m / kR`:
//!
//! ```text
//! delta_m = (kR / 2) Delta(alpha, mu) - (m / 2) Theta(alpha, mu),   |m| < kR sin(alpha)
//! Delta(alpha, mu) = 2 acos(cos(alpha) / sqrt(1 - mu^2)) - 2 sqrt(sin^2(alpha) - mu^2)
//! ```
//!
//! and vanishes for waves that miss the extrusion. Splitting
//! `sin(delta) e^{i delta} = (e^{2 i delta} - 1) / 2i` separates the amplitude
//! into a truncated Dirichlet kernel (the forward spike) and a sum over
//! `e^{i kR S(mu)}` with `S(mu) = Delta + mu (theta - Theta)`, which is
//! evaluated by stationary phase at the two classical paths `mu = -b_{+-}/R`.

use std::f64::consts::{FRAC_PI_4, PI};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::classical::{self, deflection_angle_unwrapped};
use crate::quantum::{
    self, check_grid, dsigma_from_amplitude, AmplitudeGrid, AmplitudeMethod, PhaseMethod, PhaseShiftTable,
    PhaseStatus,
};
use crate::surface::check_alpha;
use crate::{wrap_angle, Error, Result};

fn check_kr(kr: f64) -> Result<()> {
    if kr > 0.0 && kr.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid("kR", kr, "wave number must be positive and finite"))
    }
}

/// `Delta(alpha, mu)`: excess of the geodesic length over the straight
/// chord through the contact disc, in units of `R`.
pub fn path_length_excess(alpha: f64, mu: f64) -> Result<f64> {
    check_alpha(alpha)?;
    let sa = alpha.sin();
    if !(mu.abs() <= sa) {
        return Err(Error::NoContact { mu, limit: sa });
    }
    let c = (alpha.cos() / (1.0 - mu * mu).sqrt()).clamp(-1.0, 1.0);
    Ok(2.0 * c.acos() - 2.0 * (sa * sa - mu * mu).max(0.0).sqrt())
}

/// `S(mu) = Delta(alpha, mu) + mu (theta - Theta(alpha, mu))`, stationary
/// where the classical deflection equals `theta`. The mismatch
/// `theta - Theta` is taken modulo `2 pi`, which leaves `e^{i kR S}` unchanged
/// at integer `m = kR mu`.
pub fn action(alpha: f64, mu: f64, theta: f64) -> Result<f64> {
    let big_theta = deflection_angle_unwrapped(alpha, mu)?;
    Ok(path_length_excess(alpha, mu)? + mu * wrap_angle(theta - big_theta))
}

/// Radius where `g(rho0) = mu^2`: on the cap when the path touches the
/// extrusion, otherwise in the plane.
pub fn turning_point(alpha: f64, mu: f64) -> f64 {
    let a = mu.abs();
    if a < alpha.sin() {
        a.asin()
    } else {
        a + alpha - alpha.sin()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WkbjPhase {
    pub delta: f64,
    /// `Delta` and `Theta` at `mu`; zero when the wave misses the extrusion.
    pub big_delta: f64,
    pub big_theta: f64,
    pub mu: f64,
    pub rho0: f64,
}

pub fn wkbj_phase(alpha: f64, kr: f64, m: i64) -> Result<WkbjPhase> {
    check_alpha(alpha)?;
    check_kr(kr)?;
    let mf = m as f64;
    let mu = mf / kr;
    let rho0 = turning_point(alpha, mu);
    if mf.abs() >= kr * alpha.sin() {
        return Ok(WkbjPhase {
            delta: 0.0,
            big_delta: 0.0,
            big_theta: 0.0,
            mu,
            rho0,
        });
    }
    let big_delta = path_length_excess(alpha, mu)?;
    let big_theta = deflection_angle_unwrapped(alpha, mu)?;
    Ok(WkbjPhase {
        delta: 0.5 * kr * big_delta - 0.5 * mf * big_theta,
        big_delta,
        big_theta,
        mu,
        rho0,
    })
}

/// WKBJ phases for `0 <= m <= ceil(kR sin(alpha))`, so the last entry is zero.
pub fn wkbj_table(alpha: f64, kr: f64) -> Result<PhaseShiftTable> {
    check_alpha(alpha)?;
    check_kr(kr)?;
    let m_max = (kr * alpha.sin()).ceil() as usize;
    let delta = (0..=m_max)
        .map(|m| wkbj_phase(alpha, kr, m as i64).map(|w| w.delta))
        .collect::<Result<Vec<_>>>()?;
    Ok(PhaseShiftTable {
        alpha,
        kr,
        m_max,
        status: vec![PhaseStatus::Matched; delta.len()],
        delta,
        method: PhaseMethod::Wkbj,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpikeCutoff {
    /// `N = floor(kR sin(alpha))`, the last partial wave with a nonzero WKBJ phase.
    Floor,
    /// `N = kR sin(alpha)` without rounding: a smooth interpolation in `kR`.
    Continuous,
}

fn spike_order(alpha: f64, kr: f64, cutoff: SpikeCutoff) -> f64 {
    let n = kr * alpha.sin();
    match cutoff {
        SpikeCutoff::Floor => n.floor(),
        SpikeCutoff::Continuous => n,
    }
}

/// `(i/2) sin((N + 1/2) theta) / sin(theta / 2)`, with `N = floor(kR sin(alpha))`.
pub fn forward_spike(alpha: f64, kr: f64, theta: f64) -> Complex64 {
    forward_spike_with(alpha, kr, theta, SpikeCutoff::Floor)
}

pub fn forward_spike_with(alpha: f64, kr: f64, theta: f64, cutoff: SpikeCutoff) -> Complex64 {
    let n = spike_order(alpha, kr, cutoff);
    let half = 0.5 * wrap_angle(theta);
    let kernel = if half.abs() < 1e-8 {
        // removable limit, with the first correction in theta^2
        (2.0 * n + 1.0) * (1.0 - (n * n + n) * half * half * 2.0 / 3.0)
    } else {
        ((2.0 * n + 1.0) * half).sin() / half.sin()
    };
    Complex64::new(0.0, 0.5 * kernel)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Plus,
    Minus,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StationaryPhaseTerm {
    pub branch: Branch,
    /// Impact parameter over `R`.
    pub b: f64,
    /// `m_* = -kR b / R`.
    pub m_star: f64,
    /// `sqrt(|db/dtheta| / R)`.
    pub weight: f64,
    /// `kR Delta(alpha, -b/R) + (pi/4) sgn(db/dtheta)`.
    pub phase: f64,
    pub amplitude: Complex64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StationaryPhase {
    pub terms: [StationaryPhaseTerm; 2],
    pub total: Complex64,
}

fn guard_band(kr: f64, factor: f64) -> f64 {
    factor * kr.powf(-2.0 / 3.0)
}

/// Caustic check shared by the amplitude and the grid assembly: `None` when
/// the angle is usable, otherwise the caustic angle.
fn near_caustic(alpha: f64, kr: f64, theta: f64, factor: f64) -> Option<f64> {
    let c = classical::caustic(alpha).ok()?;
    if (c.theta_c - theta.abs()).abs() < guard_band(kr, factor) {
        Some(c.theta_c)
    } else {
        None
    }
}

fn term(branch: Branch, kr: f64, alpha: f64, b: f64, slope: f64) -> Result<StationaryPhaseTerm> {
    let weight = slope.abs().sqrt();
    let sign = if slope < 0.0 { -1.0 } else { 1.0 };
    let phase = kr * path_length_excess(alpha, -b)? + FRAC_PI_4 * sign;
    let prefactor = (PI * kr / 2.0).sqrt() * weight;
    Ok(StationaryPhaseTerm {
        branch,
        b,
        m_star: -kr * b,
        weight,
        phase,
        amplitude: Complex64::new(0.0, -prefactor) * Complex64::from_polar(1.0, phase),
    })
}

/// Two-path amplitude `-i sqrt(pi kR / 2) sum sqrt|b'| e^{i kR Delta} e^{i (pi/4) sgn b'}`.
pub fn stationary_phase_amplitude(alpha: f64, kr: f64, theta: f64) -> Result<StationaryPhase> {
    stationary_phase_amplitude_with(alpha, kr, theta, DEFAULT_GUARD_FACTOR)
}

pub const DEFAULT_GUARD_FACTOR: f64 = 3.0;

pub fn stationary_phase_amplitude_with(alpha: f64, kr: f64, theta: f64, guard: f64) -> Result<StationaryPhase> {
    check_alpha(alpha)?;
    check_kr(kr)?;
    let theta = wrap_angle(theta);
    if let Some(theta_c) = near_caustic(alpha, kr, theta, guard) {
        return Err(Error::StationaryPhaseInvalid { theta, theta_c });
    }
    let pair = classical::impact_branches(alpha, theta)?;
    if !pair.valid {
        return Err(Error::StationaryPhaseInvalid {
            theta,
            theta_c: classical::max_deflection(alpha)?,
        });
    }
    let (dp, dm) = classical::impact_branch_slopes(alpha, theta)?;
    let plus = term(Branch::Plus, kr, alpha, pair.b_plus, dp)?;
    let minus = term(Branch::Minus, kr, alpha, pair.b_minus, dm)?;
    Ok(StationaryPhase {
        total: plus.amplitude + minus.amplitude,
        terms: [plus, minus],
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Assembly {
    /// Forward spike plus the two stationary-phase paths.
    StationaryPhase,
    /// Partial-wave sum over the WKBJ phases.
    PartialWaveSum,
}

#[derive(Debug, Clone, Copy)]
pub struct ScConfig {
    pub assembly: Assembly,
    pub spike: SpikeCutoff,
    /// Caustic band half-width in units of `kR^(-2/3)`.
    pub guard_factor: f64,
}

impl Default for ScConfig {
    fn default() -> Self {
        Self {
            assembly: Assembly::StationaryPhase,
            spike: SpikeCutoff::Floor,
            guard_factor: DEFAULT_GUARD_FACTOR,
        }
    }
}

/// Semiclassical amplitude at one angle; `None` inside a caustic band.
pub fn sc_amplitude(alpha: f64, kr: f64, theta: f64, cfg: &ScConfig) -> Result<Option<Complex64>> {
    let theta = wrap_angle(theta);
    let spike = forward_spike_with(alpha, kr, theta, cfg.spike);
    match stationary_phase_amplitude_with(alpha, kr, theta, cfg.guard_factor) {
        Ok(sp) => Ok(Some(spike + sp.total)),
        Err(Error::StationaryPhaseInvalid { .. }) => {
            if near_caustic(alpha, kr, theta, cfg.guard_factor).is_some() {
                Ok(None)
            } else {
                // classically forbidden: only the diffraction spike survives
                Ok(Some(spike))
            }
        }
        Err(e) => Err(e),
    }
}

pub fn sc_diff_xsec(alpha: f64, kr: f64, thetas: &[f64], cfg: &ScConfig) -> Result<AmplitudeGrid> {
    check_alpha(alpha)?;
    check_kr(kr)?;
    check_grid(thetas)?;
    if cfg.assembly == Assembly::PartialWaveSum {
        return quantum::amplitude(&wkbj_table(alpha, kr)?, thetas);
    }
    let values: Vec<Option<Complex64>> = thetas
        .par_iter()
        .map(|&t| sc_amplitude(alpha, kr, t, cfg))
        .collect::<Result<_>>()?;
    let f: Vec<Complex64> = values.iter().map(|v| v.unwrap_or_default()).collect();
    Ok(AmplitudeGrid {
        kr,
        thetas: thetas.to_vec(),
        dsigma: f
            .iter()
            .zip(&values)
            .map(|(&a, v)| if v.is_some() { dsigma_from_amplitude(kr, a) } else { 0.0 })
            .collect(),
        valid: values.iter().map(Option::is_some).collect(),
        f,
        method: AmplitudeMethod::StationaryPhase,
    })
}

/// `4 sin(alpha) - 2 sqrt(pi cot(alpha/2) / kR) cos(2 kR (alpha - sin(alpha)) - pi/4)`.
pub fn sc_total_xsec(alpha: f64, kr: f64) -> Result<f64> {
    check_alpha(alpha)?;
    check_kr(kr)?;
    let amp = 2.0 * (PI / (0.5 * alpha).tan() / kr).sqrt();
    Ok(4.0 * alpha.sin() - amp * (2.0 * kr * (alpha - alpha.sin()) - FRAC_PI_4).cos())
}
