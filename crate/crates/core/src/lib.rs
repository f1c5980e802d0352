//! Scattering of a free particle on an infinite plane carrying a spherical
//! extrusion of radius `R`, joined to the plane at polar angle `alpha`.
//!
//! Three regimes are provided and can be cross-checked against each other:
//!
//! - [`classical`]: geodesic deflection, impact-parameter branches, caustics
//!   and the exact classical differential cross section.
//! - [`quantum`]: exact partial-wave phase shifts from matching the interior
//!   (real-degree Legendre) solution to Bessel/Neumann waves in the plane.
//! - [`semiclassical`]: closed-form WKBJ phase shifts, the forward diffraction
//!   spike and the two-path stationary-phase amplitude.
//!
//! All observables are expressed in units of the sphere radius: lengths are
//! divided by `R` and wave numbers enter only through the product `kR`.

// `!(x < y)` guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod classical;
pub mod ode;
pub mod quadrature;
pub mod quantum;
pub mod semiclassical;
pub mod specfun;
pub mod surface;

mod error;

pub use error::{Error, Result};
pub use surface::{SurfaceGeometry, SurfacePoint};

/// Wraps an angle to the half-open interval `(-pi, pi]`.
pub fn wrap_angle(theta: f64) -> f64 {
    use std::f64::consts::{PI, TAU};
    if theta > -PI && theta <= PI {
        return theta;
    }
    let mut t = theta.rem_euclid(TAU);
    if t > PI {
        t -= TAU;
    }
    t
}
