//! Independent phase-shift route: integrate the full radial equation
//!
//! ```text
//! psi'' + (g' / 2g) psi' + ((kR)^2 - m^2 / g) psi = 0
//! ```
//!
//! straight through the junction into the plane and fit the free solution
//! `A J_m + B Y_m` far outside, so that `delta = -atan2(B, A)`. It shares no
//! code with the junction matching beyond the Bessel kernel used for the
//! final fit.

use crate::ode::{self, OdeOptions};
use crate::specfun::{bessel_jy, INTERIOR_START};
use crate::surface::check_alpha;
use crate::{Error, Result};

/// Default `kr` at which the free solution is fitted.
pub const ORACLE_MATCH_X: f64 = 60.0;

const RENORMALISE_ABOVE: f64 = 1e100;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleFit {
    /// Principal value in `(-pi/2, pi/2]`.
    pub delta: f64,
    pub a: f64,
    pub b: f64,
    pub match_x: f64,
}

/// Integrates one leg in chunks, renormalising the state between chunks so
/// the rapidly growing regular solution stays in range.
fn integrate_leg<F>(rhs: F, breaks: &[f64], mut y: [f64; 2], opts: &OdeOptions) -> Result<[f64; 2]>
where
    F: Fn(f64, &[f64; 2]) -> [f64; 2] + Copy,
{
    for w in breaks.windows(2) {
        let (out, _) = ode::integrate(rhs, w[0], y, w[1], opts)?;
        y = out;
        let n = y[0].abs().max(y[1].abs());
        if !n.is_finite() || n == 0.0 {
            return Err(Error::NonConvergence("oracle state left the floating-point range".into()));
        }
        if !(1.0 / RENORMALISE_ABOVE..=RENORMALISE_ABOVE).contains(&n) {
            y = [y[0] / n, y[1] / n];
        }
    }
    Ok(y)
}

/// Chunk boundaries: geometric from `start` to `min(0.1, end)`, then at most
/// `0.05` wide.
fn chunk_breaks(start: f64, end: f64) -> Vec<f64> {
    let mut out = vec![start];
    let mut x = start;
    while x < end {
        x = if x < 0.1 { (2.0 * x).min(0.1) } else { x + 0.05 };
        out.push(x.min(end));
    }
    out
}

pub fn phase_shift_ode_oracle(alpha: f64, kr: f64, m: i64, opts: &OdeOptions) -> Result<OracleFit> {
    phase_shift_ode_oracle_at(alpha, kr, m, ORACLE_MATCH_X, opts)
}

pub fn phase_shift_ode_oracle_at(alpha: f64, kr: f64, m: i64, match_x: f64, opts: &OdeOptions) -> Result<OracleFit> {
    check_alpha(alpha)?;
    if !(kr > 0.0 && kr.is_finite()) {
        return Err(Error::invalid("kR", kr, "wave number must be positive and finite"));
    }
    let sa = alpha.sin();
    if !(match_x > kr * sa) {
        return Err(Error::invalid("match_x", match_x, "fit point must lie outside the contact circle"));
    }
    let mf = m.unsigned_abs() as f64;
    let k2 = kr * kr;
    let m2 = mf * mf;
    // second component carries psi' / kR
    let cap = move |rho: f64, y: &[f64; 2]| {
        let s = rho.sin();
        let dpsi = kr * y[1];
        let dd = -rho.cos() / s * dpsi - (k2 - m2 / (s * s)) * y[0];
        [dpsi, dd / kr]
    };
    let plane = move |rho: f64, y: &[f64; 2]| {
        let r = rho - alpha + sa;
        let dpsi = kr * y[1];
        let dd = -dpsi / r - (k2 - m2 / (r * r)) * y[0];
        [dpsi, dd / kr]
    };

    // psi ~ sin^m(rho) (1 + c2 rho^2), up to an overall constant
    let rho0 = INTERIOR_START.min(0.5 * alpha);
    let c2 = (mf * (mf + 1.0) - k2) / (4.0 * (mf + 1.0));
    let u = 1.0 + c2 * rho0 * rho0;
    let du = 2.0 * c2 * rho0;
    let y0 = [u, (mf / rho0.tan() * u + du) / kr];

    let y_junction = integrate_leg(cap, &chunk_breaks(rho0, alpha), y0, opts)?;
    let rho_end = alpha - sa + match_x / kr;
    let plane_breaks: Vec<f64> = {
        let n = ((rho_end - alpha) / 0.05).ceil().max(1.0) as usize;
        (0..=n).map(|i| alpha + (rho_end - alpha) * i as f64 / n as f64).collect()
    };
    let y = integrate_leg(plane, &plane_breaks, y_junction, opts)?;

    let b = bessel_jy(m.unsigned_abs() as usize, match_x)?;
    let w = 2.0 / (std::f64::consts::PI * match_x);
    // d/dx = (1/kR) d/drho, which is exactly the stored second component
    let (psi, dpsi) = (y[0], y[1]);
    let a_coef = (psi * b.yp - dpsi * b.y) / w;
    let b_coef = (dpsi * b.j - psi * b.jp) / w;
    let mut delta = -b_coef.atan2(a_coef);
    // reduce to (-pi/2, pi/2]
    let pi = std::f64::consts::PI;
    while delta <= -pi / 2.0 {
        delta += pi;
    }
    while delta > pi / 2.0 {
        delta -= pi;
    }
    Ok(OracleFit {
        delta,
        a: a_coef,
        b: b_coef,
        match_x,
    })
}
