//! Regular solution of the radial equation on the spherical cap.
//!
//! With `g = sin^2 rho` the radial equation at fixed `kR` and angular number
//! `m` is the associated Legendre equation of degree `lambda`, where
//! `lambda (lambda + 1) = (kR)^2`. Writing `psi = sin^|m| rho * u(rho)` removes
//! the centrifugal singularity:
//!
//! ```text
//! u'' + (2|m| + 1) cot(rho) u' + ((kR)^2 - |m| (|m| + 1)) u = 0,   u(0) = 1, u'(0) = 0
//! ```
//!
//! Only the logarithmic derivative `psi'/psi` at the junction is needed, so
//! the overall normalisation never enters.

use super::ddouble::Dd;
use crate::ode::{self, OdeOptions};
use crate::surface::check_alpha;
use crate::{Error, Result};

/// Starting radius for the outward integration from the pole.
pub const INTERIOR_START: f64 = 1e-6;

const POLE_THRESHOLD: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InteriorMethod {
    Ode,
    Series,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InteriorSolution {
    pub lambda: f64,
    pub m_abs: usize,
    /// `psi(alpha)` and `psi'(alpha)` up to a common positive factor,
    /// normalised to `value^2 + slope^2 = 1`.
    pub value: f64,
    pub slope: f64,
    /// `psi'(alpha) / psi(alpha)`; infinite when `psi` vanishes at the junction.
    pub log_deriv: f64,
    pub method: InteriorMethod,
}

impl InteriorSolution {
    fn from_pair(lambda: f64, m_abs: usize, value: f64, slope: f64, method: InteriorMethod) -> Result<Self> {
        let n = value.hypot(slope);
        if !(n.is_finite() && n > 0.0) {
            return Err(Error::NonConvergence(format!(
                "interior solution for m = {m_abs} is not finite at the junction"
            )));
        }
        let (value, slope) = (value / n, slope / n);
        let log_deriv = if value.abs() < POLE_THRESHOLD {
            f64::INFINITY.copysign(slope * value.signum())
        } else {
            slope / value
        };
        Ok(Self {
            lambda,
            m_abs,
            value,
            slope,
            log_deriv,
            method,
        })
    }

    /// True when the interior solution has a node at the junction, so the
    /// logarithmic derivative is unusable and matching must use the pair.
    pub fn is_pole(&self) -> bool {
        self.value.abs() < POLE_THRESHOLD
    }
}

/// `lambda(kR) = sqrt((kR)^2 + 1/4) - 1/2`, evaluated without cancellation.
pub fn legendre_degree(kr: f64) -> f64 {
    kr * kr / ((kr * kr + 0.25).sqrt() + 0.5)
}

/// Cheap test for partial waves that cannot reach the extrusion at all:
/// beyond `|m| > kR (1 + margin)` the centrifugal barrier covers the whole
/// surface and the phase shift underflows. The additive slack keeps the
/// test conservative at long wavelength.
pub fn order_is_negligible(m: i64, kr: f64, margin: f64) -> bool {
    m.unsigned_abs() as f64 > kr * (1.0 + margin) + 10.0
}

fn check_kr(kr: f64) -> Result<()> {
    if kr > 0.0 && kr.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid("kR", kr, "wave number must be positive and finite"))
    }
}

pub fn interior_log_derivative(kr: f64, m: i64, alpha: f64) -> Result<InteriorSolution> {
    interior_log_derivative_with(kr, m, alpha, &OdeOptions::default())
}

/// Integrates the reduced equation for `u` from [`INTERIOR_START`] to `alpha`,
/// starting from the Frobenius form `u = 1 + c2 rho^2`.
pub fn interior_log_derivative_with(kr: f64, m: i64, alpha: f64, opts: &OdeOptions) -> Result<InteriorSolution> {
    check_kr(kr)?;
    check_alpha(alpha)?;
    let m_abs = m.unsigned_abs() as usize;
    let mf = m_abs as f64;
    let lambda = legendre_degree(kr);
    let coupling = kr * kr - mf * (mf + 1.0);
    let c2 = -coupling / (4.0 * (mf + 1.0));
    let rho0 = INTERIOR_START.min(0.5 * alpha);
    // second component carries u'/scale so both entries have comparable size
    let scale = coupling.abs().sqrt().max(1.0);
    let y0 = [1.0 + c2 * rho0 * rho0, 2.0 * c2 * rho0 / scale];
    let damping = 2.0 * mf + 1.0;
    let rhs = |rho: f64, y: &[f64; 2]| {
        let du = scale * y[1];
        let ddu = -damping * du / rho.tan() - coupling * y[0];
        [du, ddu / scale]
    };
    let (y, _) = ode::integrate(rhs, rho0, y0, alpha, opts)?;
    let u = y[0];
    let du = scale * y[1];
    let cot = 1.0 / alpha.tan();
    InteriorSolution::from_pair(lambda, m_abs, u, du + mf * cot * u, InteriorMethod::Ode)
}

/// The regular solution `psi = sin^|m|(rho) u(rho)` with `u(0) = 1`, and its
/// derivative, at each of the increasing radii `rhos` (all inside `(0, pi)`).
/// The same integration as [`interior_log_derivative_with`], continued
/// from point to point.
pub fn interior_profile(kr: f64, m: i64, rhos: &[f64], opts: &OdeOptions) -> Result<Vec<[f64; 2]>> {
    check_kr(kr)?;
    if rhos.windows(2).any(|w| !(w[1] > w[0])) || rhos.iter().any(|&r| !(r > 0.0 && r < std::f64::consts::PI)) {
        return Err(Error::invalid("rho", rhos.first().copied().unwrap_or(f64::NAN), "radii must increase inside (0, pi)"));
    }
    let mf = m.unsigned_abs() as f64;
    let coupling = kr * kr - mf * (mf + 1.0);
    let c2 = -coupling / (4.0 * (mf + 1.0));
    let scale = coupling.abs().sqrt().max(1.0);
    let damping = 2.0 * mf + 1.0;
    let rhs = |rho: f64, y: &[f64; 2]| {
        let du = scale * y[1];
        let ddu = -damping * du / rho.tan() - coupling * y[0];
        [du, ddu / scale]
    };
    let mut rho = INTERIOR_START.min(0.5 * rhos.first().copied().unwrap_or(1.0));
    let mut y = [1.0 + c2 * rho * rho, 2.0 * c2 * rho / scale];
    let mut out = Vec::with_capacity(rhos.len());
    for &target in rhos {
        y = ode::integrate(rhs, rho, y, target, opts)?.0;
        rho = target;
        let (u, du) = (y[0], scale * y[1]);
        let weight = rho.sin().powf(mf);
        out.push([weight * u, weight * (du + mf / rho.tan() * u)]);
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy)]
pub struct SeriesEvaluation {
    pub solution: InteriorSolution,
    /// Largest term magnitude over the result. The sum is carried in
    /// double-double, so about `32 - log10(condition)` digits survive.
    pub condition: f64,
    pub terms: usize,
}

/// Independent evaluation through the Ferrers function
/// `P_lambda^m(cos rho) ~ sin^m(rho) 2F1(m - lambda, m + lambda + 1; m + 1; sin^2(rho/2))`,
/// summing the hypergeometric series and its derivative termwise in
/// double-double arithmetic. Intended as an independent check on the ODE
/// route; it converges for `sin^2(alpha/2) < 1` but loses accuracy as the
/// terms grow past `1e16` times the result.
pub fn ferrers_series_log_derivative(kr: f64, m: i64, alpha: f64) -> Result<SeriesEvaluation> {
    check_kr(kr)?;
    check_alpha(alpha)?;
    const MAX_TERMS: usize = 500_000;
    let m_abs = m.unsigned_abs() as usize;
    let mf = m_abs as f64;
    let lambda = legendre_degree(kr);
    let a = mf - lambda;
    let b = mf + lambda + 1.0;
    let c = mf + 1.0;
    let z = (0.5 * alpha).sin().powi(2);

    // double-double keeps about 32 digits through the alternating head of the series
    let (ad, bd, cd, zd) = (Dd::from(a), Dd::from(b), Dd::from(c), Dd::from(z));
    let mut term = Dd::from(1.0);
    let mut sum = Dd::from(1.0);
    let mut dsum = Dd::ZERO; // sum n t_n, divided by z at the end
    let mut largest = 1.0f64;
    let mut n = 0usize;
    loop {
        let nf = Dd::from(n as f64);
        term = term * (ad + nf) * (bd + nf) / ((cd + nf) * (nf + Dd::from(1.0))) * zd;
        n += 1;
        sum = sum + term;
        let weighted = Dd::from(n as f64) * term;
        dsum = dsum + weighted;
        largest = largest.max(term.to_f64().abs());
        let past_sign_changes = n as f64 > -a + 2.0;
        if past_sign_changes && weighted.to_f64().abs() <= 1e-18 * sum.to_f64().abs().max(dsum.to_f64().abs()) {
            break;
        }
        if term.hi == 0.0 {
            break;
        }
        if n >= MAX_TERMS || !sum.hi.is_finite() {
            return Err(Error::NonConvergence(format!(
                "Ferrers series did not converge for kR = {kr}, m = {m}, alpha = {alpha}"
            )));
        }
    }
    let (sum, dsum) = (sum.to_f64(), dsum.to_f64());
    let dfdz = dsum / z;
    let cot = 1.0 / alpha.tan();
    let slope = mf * cot * sum + dfdz * 0.5 * alpha.sin();
    let solution = InteriorSolution::from_pair(lambda, m_abs, sum, slope, InteriorMethod::Series)?;
    Ok(SeriesEvaluation {
        solution,
        condition: largest / sum.abs().max(f64::MIN_POSITIVE),
        terms: n,
    })
}
