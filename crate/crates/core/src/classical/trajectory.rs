//! Embedded geodesics for export and plotting.
//!
//! The particle moves along `+x` at height `y = b` and meets the contact
//! circle at azimuth `pi - beta`. On the cap it follows a great circle of
//! the sphere, and it leaves along a straight line in the plane.

use std::f64::consts::{FRAC_PI_2, PI};

use super::ClassicalDeflection;
use crate::{Error, Result, SurfaceGeometry};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Segment {
    Incoming,
    Sphere,
    Outgoing,
}

impl Segment {
    pub fn as_str(self) -> &'static str {
        match self {
            Segment::Incoming => "incoming",
            Segment::Sphere => "sphere",
            Segment::Outgoing => "outgoing",
        }
    }
}

/// Entry to and exit from the cap: arc lengths, points and unit tangents.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryMarkers {
    pub entry_s: f64,
    pub exit_s: f64,
    pub entry_point: [f64; 3],
    pub exit_point: [f64; 3],
    pub entry_tangent: [f64; 3],
    pub exit_tangent: [f64; 3],
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectorySample {
    pub points: Vec<[f64; 3]>,
    pub arc_lengths: Vec<f64>,
    pub segments: Vec<Segment>,
    pub markers: TrajectoryMarkers,
    pub deflection: ClassicalDeflection,
}

/// Pieces of the path in closed form, all lengths in units of `R`.
struct Geodesic {
    /// Cap entry point and initial velocity on the unit sphere.
    p: [f64; 3],
    v: [f64; 3],
    /// Arc length on the cap.
    t_exit: f64,
    /// Planar exit point and outgoing direction.
    exit_xy: [f64; 2],
    out_dir: [f64; 2],
    entry_xy: [f64; 2],
}

fn add(a: [f64; 3], b: [f64; 3], sa: f64, sb: f64) -> [f64; 3] {
    [sa * a[0] + sb * b[0], sa * a[1] + sb * b[1], sa * a[2] + sb * b[2]]
}

impl Geodesic {
    fn new(alpha: f64, beta: f64) -> Self {
        let (sa, ca) = alpha.sin_cos();
        let (sb, cb) = beta.sin_cos();
        let phi = PI - beta;
        let (sp, cp) = phi.sin_cos();
        let p = [cp * sa, sp * sa, ca];
        let e_rho = [cp * ca, sp * ca, -sa];
        let e_phi = [-sp, cp, 0.0];
        // (1, 0) resolved on the planar basis at azimuth pi - beta
        let v = add(e_rho, e_phi, -cb, -sb);
        let t_exit = 2.0 * (sa * cb).atan2(ca);
        let (st, ct) = t_exit.sin_cos();
        let q = add(p, v, ct, st);
        let w = add(p, v, -st, ct);
        let phi_out = q[1].atan2(q[0]);
        let (so, co) = phi_out.sin_cos();
        let w_rho = w[0] * co * ca + w[1] * so * ca - w[2] * sa;
        let w_phi = -w[0] * so + w[1] * co;
        let out = [w_rho * co - w_phi * so, w_rho * so + w_phi * co];
        let n = out[0].hypot(out[1]);
        Self {
            p,
            v,
            t_exit,
            exit_xy: [sa * co, sa * so],
            out_dir: [out[0] / n, out[1] / n],
            entry_xy: [-sa * cb, sa * sb],
        }
    }

    fn on_cap(&self, t: f64) -> [f64; 3] {
        add(self.p, self.v, t.cos(), t.sin())
    }

    fn cap_tangent(&self, t: f64) -> [f64; 3] {
        add(self.p, self.v, -t.sin(), t.cos())
    }
}

/// Samples the path entering at angle `beta`, uniformly in arc length, with
/// planar legs of length `2R` on either side of the cap.
pub fn sample_trajectory(geom: &SurfaceGeometry, beta: f64, n_points: usize) -> Result<TrajectorySample> {
    sample_trajectory_with_leg(geom, beta, n_points, 2.0 * geom.radius())
}

pub fn sample_trajectory_with_leg(
    geom: &SurfaceGeometry,
    beta: f64,
    n_points: usize,
    leg: f64,
) -> Result<TrajectorySample> {
    if !(beta.abs() < FRAC_PI_2) {
        return Err(Error::invalid("beta", beta, "entry angle must satisfy |beta| < pi/2"));
    }
    if n_points < 3 {
        return Err(Error::invalid("n_points", n_points as f64, "need at least three samples"));
    }
    if !(leg >= 0.0 && leg.is_finite()) {
        return Err(Error::invalid("leg", leg, "planar leg length must be non-negative"));
    }
    let r = geom.radius();
    let alpha = geom.alpha();
    let deflection = ClassicalDeflection::from_beta(alpha, beta)?;
    let g = Geodesic::new(alpha, beta);
    let z_plane = r * alpha.cos();
    let cap_len = r * g.t_exit;
    let entry_s = leg;
    let exit_s = leg + cap_len;
    let total = exit_s + leg;

    let locate = |s: f64| -> ([f64; 3], Segment) {
        if s < entry_s {
            let back = entry_s - s;
            ([r * g.entry_xy[0] - back, r * g.entry_xy[1], z_plane], Segment::Incoming)
        } else if s <= exit_s {
            let t = ((s - entry_s) / r).min(g.t_exit);
            let u = g.on_cap(t);
            ([r * u[0], r * u[1], r * u[2]], Segment::Sphere)
        } else {
            let fwd = s - exit_s;
            (
                [
                    r * g.exit_xy[0] + fwd * g.out_dir[0],
                    r * g.exit_xy[1] + fwd * g.out_dir[1],
                    z_plane,
                ],
                Segment::Outgoing,
            )
        }
    };

    let mut points = Vec::with_capacity(n_points);
    let mut arc_lengths = Vec::with_capacity(n_points);
    let mut segments = Vec::with_capacity(n_points);
    for i in 0..n_points {
        let s = total * i as f64 / (n_points - 1) as f64;
        let (pt, seg) = locate(s);
        points.push(pt);
        arc_lengths.push(s);
        segments.push(seg);
    }
    let entry_point = [r * g.p[0], r * g.p[1], r * g.p[2]];
    let exit_cap = g.on_cap(g.t_exit);
    let markers = TrajectoryMarkers {
        entry_s,
        exit_s,
        entry_point,
        exit_point: [r * exit_cap[0], r * exit_cap[1], r * exit_cap[2]],
        entry_tangent: g.cap_tangent(0.0),
        exit_tangent: g.cap_tangent(g.t_exit),
    };
    Ok(TrajectorySample {
        points,
        arc_lengths,
        segments,
        markers,
        deflection,
    })
}
