//! Geometry of the sphere-on-a-plane surface.
//!
//! Points are addressed by dimensionless polar coordinates `(rho, phi)`:
//! on the cap (`rho < alpha`) `rho` is the polar angle from the north pole,
//! in the plane `rho - alpha + sin(alpha)` is the planar radius over `R`.
//! The line element is `R^2 (d rho^2 + g(rho) d phi^2)`.

use std::f64::consts::TAU;

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfaceGeometry {
    radius: f64,
    alpha: f64,
    contact_radius: f64,
}

impl SurfaceGeometry {
    pub fn new(radius: f64, alpha: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::invalid("R", radius, "sphere radius must be positive"));
        }
        check_alpha(alpha)?;
        Ok(Self {
            radius,
            alpha,
            contact_radius: radius * alpha.sin(),
        })
    }

    /// Unit sphere (`R = 1`), the default used for all dimensionless output.
    pub fn unit(alpha: f64) -> Result<Self> {
        Self::new(1.0, alpha)
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Radius `R sin(alpha)` of the circle where the cap meets the plane.
    pub fn contact_radius(&self) -> f64 {
        self.contact_radius
    }

    /// True when the cap is larger than a hemisphere and overhangs the plane.
    pub fn is_overhanging(&self) -> bool {
        self.alpha > std::f64::consts::FRAC_PI_2
    }

    pub fn metric_g(&self, rho: f64) -> Result<f64> {
        metric_g(self.alpha, rho)
    }

    pub fn embed(&self, p: SurfacePoint) -> [f64; 3] {
        embed(self, p)
    }
}

pub(crate) fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < std::f64::consts::PI {
        Ok(())
    } else {
        Err(Error::invalid("alpha", alpha, "contact angle must lie in (0, pi)"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfacePoint {
    rho: f64,
    phi: f64,
}

impl SurfacePoint {
    pub fn new(rho: f64, phi: f64) -> Result<Self> {
        if !(rho >= 0.0 && rho.is_finite()) {
            return Err(Error::invalid("rho", rho, "polar radius must be non-negative"));
        }
        if !phi.is_finite() {
            return Err(Error::invalid("phi", phi, "azimuth must be finite"));
        }
        let mut phi = phi.rem_euclid(TAU);
        if phi >= TAU {
            phi = 0.0;
        }
        Ok(Self { rho, phi })
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    /// Azimuth reduced to `[0, 2 pi)`.
    pub fn phi(&self) -> f64 {
        self.phi
    }
}

/// Metric factor `g(rho)`: `sin^2 rho` on the cap, `(rho - alpha + sin alpha)^2`
/// in the plane. The junction `rho = alpha` belongs to the planar branch.
pub fn metric_g(alpha: f64, rho: f64) -> Result<f64> {
    if !(rho >= 0.0) {
        return Err(Error::invalid("rho", rho, "polar radius must be non-negative"));
    }
    Ok(if rho < alpha {
        let s = rho.sin();
        s * s
    } else {
        let r = rho - alpha + alpha.sin();
        r * r
    })
}

/// Derivative `g'(rho)`, one-sided from the right at the junction.
pub fn metric_g_prime(alpha: f64, rho: f64) -> f64 {
    if rho < alpha {
        (2.0 * rho).sin()
    } else {
        2.0 * (rho - alpha + alpha.sin())
    }
}

/// Cartesian embedding of a surface point in flat 3-space.
pub fn embed(geom: &SurfaceGeometry, p: SurfacePoint) -> [f64; 3] {
    let r = geom.radius;
    let (sp, cp) = p.phi.sin_cos();
    if p.rho < geom.alpha {
        let (s, c) = p.rho.sin_cos();
        [r * cp * s, r * sp * s, r * c]
    } else {
        let planar = p.rho - geom.alpha + geom.alpha.sin();
        [r * planar * cp, r * planar * sp, r * geom.alpha.cos()]
    }
}
