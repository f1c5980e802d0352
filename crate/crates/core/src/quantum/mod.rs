//! Exact partial-wave scattering.
//!
//! Each angular number `m` scatters independently. The regular interior
//! solution is matched at the junction to `cos(delta) J_m - sin(delta) Y_m`
//! in the plane, both evaluated at `x = kR sin(alpha)`:
//!
//! ```text
//! tan(delta_m) = (kR v J' - s J) / (kR v Y' - s Y)
//! ```
//!
//! where `(v, s)` is the interior value/slope pair at `rho = alpha`. Using the
//! pair instead of the ratio `L = s / v` keeps the formula finite when the
//! interior solution has a node at the junction.
//!
//! Amplitudes use the cosine-folded sum
//! `f(theta) = sin(delta_0) e^{i delta_0} + 2 sum_{m>=1} sin(delta_m) e^{i delta_m} cos(m theta)`
//! and `R^-1 dsigma/dtheta = 2 |f|^2 / (pi kR)`.

mod oracle;
mod scan;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::ode::OdeOptions;
use crate::specfun::{
    interior_log_derivative_with, jy_orders_until_overflow, BesselPair, DEFAULT_BESSEL_TOL, DEFAULT_ORDER_CAP,
};
use crate::surface::check_alpha;
use crate::{Error, Result};

pub use oracle::{phase_shift_ode_oracle, OracleFit, ORACLE_MATCH_X};
pub use scan::{nearest_resonance, sigma_scan, Peak, RefineMode, ScanConfig, ScanResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhaseMethod {
    Exact,
    Wkbj,
}

impl PhaseMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            PhaseMethod::Exact => "exact",
            PhaseMethod::Wkbj => "wkbj",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhaseStatus {
    /// Ordinary matching of value and slope.
    Matched,
    /// The interior solution vanishes at the junction; the reciprocal form of
    /// the matching was in effect.
    InteriorNode,
    /// `Y_m` left the floating-point range: the wave never reaches the
    /// extrusion and the phase is exactly zero.
    BesselOverflow,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseShift {
    pub m: i64,
    /// Principal value in `(-pi/2, pi/2]`.
    pub delta: f64,
    pub status: PhaseStatus,
}

#[derive(Debug, Clone, Copy)]
pub struct PhaseConfig {
    /// Orders computed beyond `kR sin(alpha)`; `None` uses `max(12, ceil(4 kR^(1/3)))`.
    pub m_buffer: Option<usize>,
    pub bessel_tol: f64,
    pub ode: OdeOptions,
    /// The table grows until this many trailing `sin^2(delta)` are below `tail_tol`.
    pub tail_run: usize,
    pub tail_tol: f64,
    /// Lower bound on the truncation order.
    pub min_m_max: usize,
    pub m_cap: usize,
}

impl Default for PhaseConfig {
    fn default() -> Self {
        Self {
            m_buffer: None,
            bessel_tol: DEFAULT_BESSEL_TOL,
            ode: OdeOptions::default(),
            tail_run: 4,
            tail_tol: 1e-12,
            min_m_max: 0,
            m_cap: DEFAULT_ORDER_CAP,
        }
    }
}

impl PhaseConfig {
    pub fn buffer(&self, kr: f64) -> usize {
        self.m_buffer
            .unwrap_or_else(|| 12usize.max((4.0 * kr.cbrt()).ceil() as usize))
    }

    /// Initial truncation `ceil(kR sin(alpha)) + buffer`.
    pub fn initial_m_max(&self, alpha: f64, kr: f64) -> usize {
        let reach = (kr * alpha.sin()).ceil() as usize;
        (reach + self.buffer(kr)).max(self.min_m_max)
    }
}

/// Phase shifts `delta_m` for `0 <= m <= m_max`; negative orders share
/// the entry of `|m|`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseShiftTable {
    pub alpha: f64,
    pub kr: f64,
    pub m_max: usize,
    pub delta: Vec<f64>,
    pub status: Vec<PhaseStatus>,
    pub method: PhaseMethod,
}

impl PhaseShiftTable {
    pub fn delta(&self, m: i64) -> f64 {
        self.delta.get(m.unsigned_abs() as usize).copied().unwrap_or(0.0)
    }

    pub fn sin2(&self, m: i64) -> f64 {
        self.delta(m).sin().powi(2)
    }

    /// `sum_{m in Z} sin^2(delta_m)`.
    pub fn sin2_sum(&self) -> f64 {
        folded(&self.delta).map(|(w, d)| w * d.sin().powi(2)).sum()
    }
}

/// Pairs `(multiplicity, delta)` for the folded sum over `m` and `-m`.
fn folded(delta: &[f64]) -> impl Iterator<Item = (f64, f64)> + '_ {
    delta
        .iter()
        .enumerate()
        .map(|(m, &d)| (if m == 0 { 1.0 } else { 2.0 }, d))
}

fn check_kr(kr: f64) -> Result<()> {
    if kr > 0.0 && kr.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid("kR", kr, "wave number must be positive and finite"))
    }
}

fn match_pair(kr: f64, value: f64, slope: f64, b: &BesselPair) -> f64 {
    let num = kr * value * b.jp - slope * b.j;
    let den = kr * value * b.yp - slope * b.y;
    principal_atan(num, den)
}

/// `atan(num / den)` in `(-pi/2, pi/2]`.
fn principal_atan(num: f64, den: f64) -> f64 {
    if den == 0.0 {
        return std::f64::consts::FRAC_PI_2;
    }
    let d = (num * den.signum()).atan2(den.abs());
    if d == -std::f64::consts::FRAC_PI_2 {
        std::f64::consts::FRAC_PI_2
    } else {
        d
    }
}

fn shift_from_bessel(alpha: f64, kr: f64, m: i64, bessel: Option<&BesselPair>, cfg: &PhaseConfig) -> Result<PhaseShift> {
    let Some(b) = bessel else {
        return Ok(PhaseShift {
            m,
            delta: 0.0,
            status: PhaseStatus::BesselOverflow,
        });
    };
    let interior = interior_log_derivative_with(kr, m, alpha, &cfg.ode)?;
    let delta = match_pair(kr, interior.value, interior.slope, b);
    Ok(PhaseShift {
        m,
        delta,
        status: if interior.is_pole() {
            PhaseStatus::InteriorNode
        } else {
            PhaseStatus::Matched
        },
    })
}

pub fn phase_shift(alpha: f64, kr: f64, m: i64) -> Result<PhaseShift> {
    phase_shift_with(alpha, kr, m, &PhaseConfig::default())
}

pub fn phase_shift_with(alpha: f64, kr: f64, m: i64, cfg: &PhaseConfig) -> Result<PhaseShift> {
    check_alpha(alpha)?;
    check_kr(kr)?;
    let m_abs = m.unsigned_abs() as usize;
    if m_abs > cfg.m_cap {
        return Err(Error::invalid("m", m as f64, "order exceeds the configured cap"));
    }
    let (pairs, _) = jy_orders_until_overflow(m_abs, kr * alpha.sin(), cfg.bessel_tol);
    shift_from_bessel(alpha, kr, m, pairs.get(m_abs), cfg)
}

fn tail_is_small(delta: &[f64], run: usize, tol: f64) -> bool {
    delta.len() >= run && delta[delta.len() - run..].iter().all(|d| d.sin().powi(2) < tol)
}

/// Exact phase table, growing the truncation until the tail criterion holds.
pub fn phase_table(alpha: f64, kr: f64, cfg: &PhaseConfig) -> Result<PhaseShiftTable> {
    check_alpha(alpha)?;
    check_kr(kr)?;
    let x = kr * alpha.sin();
    let step = cfg.buffer(kr);
    let mut m_max = cfg.initial_m_max(alpha, kr).min(cfg.m_cap);
    let mut delta: Vec<f64> = Vec::new();
    let mut status: Vec<PhaseStatus> = Vec::new();
    loop {
        let (pairs, _) = jy_orders_until_overflow(m_max, x, cfg.bessel_tol);
        let fresh: Vec<PhaseShift> = (delta.len()..=m_max)
            .into_par_iter()
            .map(|m| shift_from_bessel(alpha, kr, m as i64, pairs.get(m), cfg))
            .collect::<Result<_>>()?;
        for s in fresh {
            // a real phase keeps |e^{2 i delta}| = 1
            if !s.delta.is_finite() {
                return Err(Error::NonConvergence(format!("phase shift for m = {} is not finite", s.m)));
            }
            delta.push(s.delta);
            status.push(s.status);
        }
        if tail_is_small(&delta, cfg.tail_run, cfg.tail_tol) {
            break;
        }
        if m_max >= cfg.m_cap {
            return Err(Error::NonConvergence(format!(
                "phase-shift tail still above {} at m = {m_max} (alpha = {alpha}, kR = {kr})",
                cfg.tail_tol
            )));
        }
        m_max = (m_max + step).min(cfg.m_cap);
    }
    Ok(PhaseShiftTable {
        alpha,
        kr,
        m_max,
        delta,
        status,
        method: PhaseMethod::Exact,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AmplitudeMethod {
    Exact,
    WkbjSum,
    StationaryPhase,
}

impl AmplitudeMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            AmplitudeMethod::Exact => "quantum",
            AmplitudeMethod::WkbjSum => "wkbj-sum",
            AmplitudeMethod::StationaryPhase => "semiclassical",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AmplitudeGrid {
    pub kr: f64,
    pub thetas: Vec<f64>,
    pub f: Vec<Complex64>,
    /// `R^-1 dsigma/dtheta`.
    pub dsigma: Vec<f64>,
    /// False where the method does not apply (caustic bands); `f` and
    /// `dsigma` are zero there.
    pub valid: Vec<bool>,
    pub method: AmplitudeMethod,
}

/// `R^-1 dsigma/dtheta` from the amplitude.
pub fn dsigma_from_amplitude(kr: f64, f: Complex64) -> f64 {
    2.0 * f.norm_sqr() / (std::f64::consts::PI * kr)
}

pub(crate) fn check_grid(thetas: &[f64]) -> Result<()> {
    for w in thetas.windows(2) {
        if !(w[1] > w[0]) {
            return Err(Error::invalid("theta", w[1], "angle grid must be strictly increasing"));
        }
    }
    Ok(())
}

/// `sum_m sin(delta_m) e^{i delta_m} e^{i m theta}` for a table indexed by `|m|`.
pub fn partial_wave_sum(delta: &[f64], theta: f64) -> Complex64 {
    folded(delta)
        .enumerate()
        .map(|(m, (w, d))| {
            let (s, c) = d.sin_cos();
            Complex64::new(c * s, s * s) * (w * (m as f64 * theta).cos())
        })
        .sum()
}

pub fn amplitude(table: &PhaseShiftTable, thetas: &[f64]) -> Result<AmplitudeGrid> {
    check_grid(thetas)?;
    let f: Vec<Complex64> = thetas.par_iter().map(|&t| partial_wave_sum(&table.delta, t)).collect();
    let dsigma = f.iter().map(|&a| dsigma_from_amplitude(table.kr, a)).collect();
    Ok(AmplitudeGrid {
        kr: table.kr,
        thetas: thetas.to_vec(),
        f,
        dsigma,
        valid: vec![true; thetas.len()],
        method: match table.method {
            PhaseMethod::Exact => AmplitudeMethod::Exact,
            PhaseMethod::Wkbj => AmplitudeMethod::WkbjSum,
        },
    })
}

/// `sigma / R = (4 / kR) sum_m sin^2(delta_m)`.
pub fn total_xsec(table: &PhaseShiftTable) -> f64 {
    4.0 / table.kr * table.sin2_sum()
}

/// `n` uniform angles on `(-pi, pi]`.
pub fn uniform_theta_grid(n: usize) -> Vec<f64> {
    use std::f64::consts::PI;
    (1..=n).map(|i| -PI + 2.0 * PI * i as f64 / n as f64).collect()
}

/// Uniform grid plus `n_local` extra points spread over the forward spike,
/// `|theta| <= 5 / (kR sin(alpha))`.
pub fn forward_refined_grid(n: usize, n_local: usize, alpha: f64, kr: f64) -> Vec<f64> {
    let half = (5.0 / (kr * alpha.sin())).min(std::f64::consts::PI);
    let mut grid = uniform_theta_grid(n);
    if n_local >= 2 {
        grid.extend((0..n_local).map(|i| -half + 2.0 * half * i as f64 / (n_local - 1) as f64));
    }
    grid.sort_by(f64::total_cmp);
    grid.dedup_by(|a, b| (*a - *b).abs() <= 1e-15);
    grid
}

#[cfg(test)]
mod tests;
