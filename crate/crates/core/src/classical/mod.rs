//! Exact classical scattering by the extrusion.
//!
//! A trajectory with impact parameter `b = R sin(alpha) sin(beta)` enters the
//! cap at azimuth `pi - beta`, follows a great circle and leaves into the
//! plane deflected by `theta = 2 (atan(cos(alpha) tan(beta)) - beta)`. The
//! deflection depends on `b` only through the scaled angular momentum
//! `mu = -b / R`.
//!
//! Every deflection angle in the support is reached by two impact
//! parameters `b_+` and `b_-`; their slopes add up to the differential cross
//! section `|db/dtheta| = 2 R sin(alpha) D(alpha, theta)`.

mod trajectory;

use std::f64::consts::{FRAC_PI_2, PI};

use crate::quadrature;
use crate::surface::check_alpha;
use crate::{wrap_angle, Error, Result};

pub use trajectory::{sample_trajectory, Segment, TrajectorySample, TrajectoryMarkers};

/// Half-width of the band around a caustic inside which the two branches
/// are reported as coalesced.
pub const CAUSTIC_COALESCE: f64 = 1e-9;

/// Radicands that round below zero by less than this are treated as zero.
const RADICAND_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassicalDeflection {
    /// Deflection wrapped to `(-pi, pi]`.
    pub theta: f64,
    pub beta: f64,
    pub b_over_r: f64,
    pub mu: f64,
}

impl ClassicalDeflection {
    /// Deflection of the trajectory entering at angle `beta`.
    pub fn from_beta(alpha: f64, beta: f64) -> Result<Self> {
        check_alpha(alpha)?;
        if !(beta.abs() <= FRAC_PI_2) {
            return Err(Error::invalid("beta", beta, "entry angle must satisfy |beta| <= pi/2"));
        }
        let b_over_r = alpha.sin() * beta.sin();
        Ok(Self {
            theta: wrap_angle(exit_angle(alpha, beta) - beta),
            beta,
            b_over_r,
            mu: -b_over_r,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CausticData {
    pub theta_c: f64,
    pub beta_c: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchPair {
    pub b_plus: f64,
    pub b_minus: f64,
    /// False when `theta` lies outside the classical support.
    pub valid: bool,
    /// At `theta = 0` only: the `theta -> 0-` limit of `b_plus`
    /// (`b_plus` itself then holds the `theta -> 0+` limit).
    pub b_plus_from_below: Option<f64>,
}

/// Classical cross section sample: zero and unsupported outside the
/// deflection range.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XsecSample {
    pub value: f64,
    pub supported: bool,
}

fn sgn(x: f64) -> f64 {
    if x < 0.0 {
        -1.0
    } else {
        1.0
    }
}

fn has_caustic(alpha: f64) -> bool {
    alpha < FRAC_PI_2
}

/// `Theta(alpha, mu)`, the deflection as a function of scaled angular momentum.
pub fn deflection_angle(alpha: f64, mu: f64) -> Result<f64> {
    deflection_angle_unwrapped(alpha, mu).map(wrap_angle)
}

/// The deflection before wrapping: continuous in `mu`, with values in
/// `(-2 pi, 2 pi)` for overhanging extrusions.
pub fn deflection_angle_unwrapped(alpha: f64, mu: f64) -> Result<f64> {
    check_alpha(alpha)?;
    let sa = alpha.sin();
    if !(mu.abs() < sa) {
        return Err(Error::NoContact { mu, limit: sa });
    }
    let root = (sa * sa - mu * mu).sqrt();
    Ok(2.0 * (mu / sa).asin() - 2.0 * (mu * alpha.cos()).atan2(root))
}

/// Azimuth at which the trajectory entering with angle `beta` leaves the cap.
pub fn exit_angle(alpha: f64, beta: f64) -> f64 {
    // atan2 form keeps beta = +-pi/2 finite
    let (sb, cb) = beta.sin_cos();
    2.0 * (alpha.cos() * sb).atan2(cb.max(0.0)) - beta
}

pub fn caustic(alpha: f64) -> Result<CausticData> {
    check_alpha(alpha)?;
    if !has_caustic(alpha) {
        return Err(Error::NoCaustic { alpha });
    }
    let t = (0.5 * alpha).tan();
    // stationary point of theta(beta): sin^2(beta_c) = 1 / (1 + cos(alpha))
    Ok(CausticData {
        theta_c: 2.0 * (t * t).asin(),
        beta_c: (std::f64::consts::FRAC_1_SQRT_2 / (0.5 * alpha).cos()).min(1.0).asin(),
    })
}

/// Largest deflection magnitude: the caustic angle below a hemisphere,
/// `pi` otherwise.
pub fn max_deflection(alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    Ok(if has_caustic(alpha) {
        caustic(alpha)?.theta_c
    } else {
        PI
    })
}

struct HalfAngles {
    /// `sin(|theta|/2)`
    s: f64,
    /// `tan^2(alpha/2)`
    t2: f64,
    /// `cos^2(alpha/2)`
    c2: f64,
    /// `sqrt((1 + s)(t2 + s))`
    p: f64,
    /// `sqrt((1 - s)(t2 - s))`, zero at the support edge
    q: f64,
}

fn half_angles(alpha: f64, theta: f64) -> Option<HalfAngles> {
    let s = (0.5 * theta.abs()).sin();
    let half = 0.5 * alpha;
    let t2 = half.tan().powi(2);
    let c2 = half.cos().powi(2);
    let mut gap = t2 - s;
    if gap < 0.0 {
        if has_caustic(alpha) && gap < -RADICAND_SLACK {
            return None;
        }
        gap = 0.0;
    }
    let p = ((1.0 + s) * (t2 + s)).sqrt();
    let mut q = ((1.0 - s).max(0.0) * gap).sqrt();
    if has_caustic(alpha) {
        let theta_c = 2.0 * t2.min(1.0).asin();
        if (theta_c - theta.abs()).abs() < CAUSTIC_COALESCE {
            q = 0.0;
        }
    }
    Some(HalfAngles { s, t2, c2, p, q })
}

/// The two impact parameters `b_+`, `b_-` (in units of `R`) scattering into `theta`.
pub fn impact_branches(alpha: f64, theta: f64) -> Result<BranchPair> {
    check_alpha(alpha)?;
    let theta = wrap_angle(theta);
    let Some(h) = half_angles(alpha, theta) else {
        return Ok(BranchPair {
            b_plus: 0.0,
            b_minus: 0.0,
            valid: false,
            b_plus_from_below: None,
        });
    };
    let sc = sgn(alpha.cos());
    // grazing paths land on |b| = sin(alpha) up to rounding
    let limit = alpha.sin();
    let branch = |side: f64| {
        let b_plus = (-sc * side * h.c2 * (h.p + h.q)).clamp(-limit, limit);
        let b_minus = (-side * h.c2 * (h.p - h.q)).clamp(-limit, limit);
        (b_plus, b_minus)
    };
    if theta == 0.0 {
        let (above, _) = branch(1.0);
        let (below, _) = branch(-1.0);
        return Ok(BranchPair {
            b_plus: above,
            b_minus: 0.0,
            valid: true,
            b_plus_from_below: Some(below),
        });
    }
    let (b_plus, b_minus) = branch(sgn(theta));
    Ok(BranchPair {
        b_plus,
        b_minus,
        valid: true,
        b_plus_from_below: None,
    })
}

/// Closed-form slopes `(db_+/dtheta, db_-/dtheta)` in units of `R`.
///
/// The radical `sqrt(t2 - s)` sits in a denominator; where it is too small
/// for the closed form (next to a caustic) the slopes are taken from a
/// Richardson-extrapolated central difference of [`impact_branches`].
pub fn impact_branch_slopes(alpha: f64, theta: f64) -> Result<(f64, f64)> {
    check_alpha(alpha)?;
    let theta = wrap_angle(theta);
    let Some(h) = half_angles(alpha, theta) else {
        return Err(Error::OutsideSupport {
            theta,
            limit: max_deflection(alpha)?,
        });
    };
    let gap = h.t2 - h.s;
    if gap > 1e-8 || !has_caustic(alpha) && gap > 0.0 {
        let cos_half = (0.5 * theta).cos();
        let p_term = (1.0 + h.t2 + 2.0 * h.s) * cos_half / (4.0 * h.p);
        // d sqrt((1-s)(t2-s))/d theta, with cos(theta/2)/sqrt(1-s) = sqrt(1+s)
        let q_term = -(1.0 + h.t2 - 2.0 * h.s) * (1.0 + h.s).sqrt() / (4.0 * gap.sqrt());
        let sc = sgn(alpha.cos());
        return Ok((-sc * h.c2 * (p_term + q_term), -h.c2 * (p_term - q_term)));
    }
    finite_difference_slopes(alpha, theta)
}

fn finite_difference_slopes(alpha: f64, theta: f64) -> Result<(f64, f64)> {
    let central = |step: f64| -> Result<(f64, f64)> {
        let hi = impact_branches(alpha, theta + step)?;
        let lo = impact_branches(alpha, theta - step)?;
        if !(hi.valid && lo.valid) {
            return Err(Error::OutsideSupport {
                theta,
                limit: max_deflection(alpha)?,
            });
        }
        Ok((
            (hi.b_plus - lo.b_plus) / (2.0 * step),
            (hi.b_minus - lo.b_minus) / (2.0 * step),
        ))
    };
    let coarse = central(2e-6)?;
    let fine = central(1e-6)?;
    Ok((
        (4.0 * fine.0 - coarse.0) / 3.0,
        (4.0 * fine.1 - coarse.1) / 3.0,
    ))
}

/// `1 - sin(|theta|/2)` without cancellation near backscatter.
fn one_minus_half_sin(theta: f64) -> f64 {
    2.0 * (0.25 * (PI - theta.abs())).sin().powi(2)
}

/// Angular distribution `D(alpha, theta)`, normalised so that its integral
/// over the support is one. With `s = sin(|theta|/2)` it is evaluated as
///
/// ```text
/// D = sqrt(1 + s) ((1 - s) - cos(alpha) s) / (8 sin(alpha/2) sqrt(sin^2(alpha/2) (1 - s) - cos(alpha) s))
/// ```
///
/// which stays finite as `alpha -> pi` and avoids cancellation near `theta = pi`.
pub fn normalized_distribution(alpha: f64, theta: f64) -> XsecSample {
    let theta = wrap_angle(theta);
    let s = (0.5 * theta.abs()).sin();
    let oms = one_minus_half_sin(theta);
    let sh = (0.5 * alpha).sin();
    let ca = alpha.cos();
    let gap = sh * sh * oms - ca * s;
    let caustic = has_caustic(alpha);
    if gap < 0.0 && (caustic || gap < -RADICAND_SLACK) {
        return XsecSample {
            value: 0.0,
            supported: false,
        };
    }
    let numerator = (1.0 + s).sqrt() * (oms - ca * s);
    let value = if gap > 0.0 {
        numerator / (8.0 * sh * gap.sqrt())
    } else if caustic {
        f64::INFINITY
    } else {
        // hemisphere at backscatter: both factors vanish, D -> 0
        0.0
    };
    XsecSample {
        value,
        supported: true,
    }
}

/// `|db/dtheta| = 2 R sin(alpha) D(alpha, theta)` with `R = 1`.
pub fn classical_diff_xsec(alpha: f64, theta: f64) -> Result<XsecSample> {
    check_alpha(alpha)?;
    let d = normalized_distribution(alpha, theta);
    Ok(XsecSample {
        value: 2.0 * alpha.sin() * d.value,
        supported: d.supported,
    })
}

/// Hard-disk baseline `|db/dtheta| = (a/2) sin(|theta|/2)`.
pub fn hard_disk_diff_xsec(a: f64, theta: f64) -> f64 {
    if theta == 0.0 {
        return 0.0;
    }
    0.5 * a * (0.5 * theta.abs()).sin()
}

/// Integral of `D(alpha, theta)` over `[0, theta_max]`, with the substitution
/// `theta = theta_max - u^2` absorbing the inverse-square-root edge.
fn half_support_integral(alpha: f64, tol: f64) -> Result<f64> {
    let theta_max = max_deflection(alpha)?;
    let sh = (0.5 * alpha).sin();
    let c2 = (0.5 * alpha).cos().powi(2);
    let ca = alpha.cos();
    // sin^2(alpha/2) - c2 s = c2 (s_max - s) + offset, exactly zero offset at a caustic
    let offset = if has_caustic(alpha) { 0.0 } else { -ca };
    let integrand = |u: f64| {
        let theta = theta_max - u * u;
        let s = (0.5 * theta).sin();
        let edge_diff = 2.0 * (0.25 * (2.0 * theta_max - u * u)).cos() * (0.25 * u * u).sin();
        let gap = c2 * edge_diff + offset;
        if gap <= 0.0 {
            // only at u = 0, where 2 u / sqrt(gap) has a finite limit or vanishes
            return if offset == 0.0 {
                2.0 * (1.0 + s).sqrt() * (one_minus_half_sin(theta) - ca * s) / (8.0 * sh * (c2 * 0.5 * (0.5 * theta_max).cos()).sqrt())
            } else {
                0.0
            };
        }
        let numerator = (1.0 + s).sqrt() * (one_minus_half_sin(theta) - ca * s);
        2.0 * u * numerator / (8.0 * sh * gap.sqrt())
    };
    let upper = theta_max.sqrt();
    Ok(quadrature::integrate(integrand, 0.0, upper, tol * 1e-2, tol)?.value)
}

/// Total classical cross section over `R`, obtained by integrating the
/// differential cross section over its support. Equals `2 sin(alpha)`.
pub fn classical_total_xsec(alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    Ok(2.0 * alpha.sin() * 2.0 * half_support_integral(alpha, 1e-12)?)
}

/// Integral of `D` over the full support; one for every `alpha`.
pub fn distribution_area(alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    Ok(2.0 * half_support_integral(alpha, 1e-12)?)
}

#[cfg(test)]
mod tests;
