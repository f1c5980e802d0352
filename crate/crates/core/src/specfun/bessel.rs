//! Integer-order Bessel and Neumann functions of positive real argument.
//!
//! `J_m` comes from Miller's downward recurrence normalised with
//! `J_0 + 2 sum J_2k = 1`. The same pass accumulates the Neumann series
//!
//! ```text
//! Y_0 = (2/pi) (ln(x/2) + gamma) J_0 - (4/pi) sum_{k>=1} (-1)^k J_2k / k
//! Y_1 = (2/pi) [(ln(x/2) + gamma - 1) J_1 - J_0 / x
//!               + sum_{j>=1} (-1)^(j+1) (2j+1) / (j (j+1)) J_(2j+1)]
//! ```
//!
//! and higher `Y_m` follow by upward recurrence, which is stable for the
//! dominant solution.

use std::f64::consts::PI;

use crate::{Error, Result};

/// Largest order accepted by the public entry points.
pub const DEFAULT_ORDER_CAP: usize = 10_000;

/// Default relative accuracy targeted by the Miller starting index.
pub const DEFAULT_BESSEL_TOL: f64 = 1e-16;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const RESCALE_ABOVE: f64 = 1e200;
const OVERFLOW_ABOVE: f64 = 1e300;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BesselPair {
    pub order: usize,
    pub x: f64,
    pub j: f64,
    pub y: f64,
    pub jp: f64,
    pub yp: f64,
}

impl BesselPair {
    /// `J Y' - J' Y`, analytically `2 / (pi x)`.
    pub fn wronskian(&self) -> f64 {
        self.j * self.yp - self.jp * self.y
    }
}

/// Starting order for the downward recurrence: beyond the turning point
/// `m ~ x` the functions decay like an Airy tail, so the start sits a few
/// `x^(1/3)` units past it.
fn miller_start(m_max: usize, x: f64, tol: f64) -> usize {
    let digits = (-tol.max(1e-300).ln()).max(1.0);
    let airy_units = (digits / 0.943).powf(2.0 / 3.0);
    let start = (m_max as f64).max(x.ceil()) + airy_units * x.cbrt() + 24.0;
    let n = start.ceil() as usize;
    n + n % 2
}

fn check_args(m_max: usize, x: f64) -> Result<()> {
    if !(x > 0.0 && x.is_finite()) {
        return Err(Error::invalid("x", x, "Bessel argument must be positive and finite"));
    }
    if m_max > DEFAULT_ORDER_CAP {
        return Err(Error::invalid("m", m_max as f64, "order exceeds the configured cap"));
    }
    Ok(())
}

/// Normalised `J_0..=J_{m_max}` together with `Y_0` and `Y_1`.
fn miller_jy01(m_max: usize, x: f64, tol: f64) -> (Vec<f64>, f64, f64) {
    let top = miller_start(m_max.max(1), x, tol);
    let mut j = vec![0.0; m_max.max(1) + 1];
    let mut f_next = 0.0;
    let mut f = 1e-280;
    let mut norm = 0.0;
    let mut even_sum = 0.0; // sum (-1)^k f_2k / k
    let mut odd_sum = 0.0; // sum (-1)^(i+1) (2i+1)/(i(i+1)) f_(2i+1)

    let mut k = top;
    loop {
        if k < j.len() {
            j[k] = f;
        }
        if k >= 2 && k.is_multiple_of(2) {
            let half = k / 2;
            norm += 2.0 * f;
            let sign = if half.is_multiple_of(2) { 1.0 } else { -1.0 };
            even_sum += sign * f / half as f64;
        } else if k >= 3 {
            let i = (k - 1) / 2;
            let sign = if i.is_multiple_of(2) { -1.0 } else { 1.0 };
            odd_sum += sign * (2 * i + 1) as f64 / (i * (i + 1)) as f64 * f;
        } else if k == 0 {
            norm += f;
            break;
        }
        let f_prev = 2.0 * k as f64 / x * f - f_next;
        f_next = f;
        f = f_prev;
        k -= 1;
        if f.abs() > RESCALE_ABOVE {
            let s = 1.0 / RESCALE_ABOVE;
            f *= s;
            f_next *= s;
            norm *= s;
            even_sum *= s;
            odd_sum *= s;
            for v in j.iter_mut().skip(k + 1) {
                *v *= s;
            }
        }
    }
    for v in j.iter_mut() {
        *v /= norm;
    }
    let log_term = (0.5 * x).ln() + EULER_GAMMA;
    let y0 = 2.0 / PI * log_term * j[0] - 4.0 / PI * even_sum / norm;
    let y1 = 2.0 / PI * ((log_term - 1.0) * j[1] - j[0] / x + odd_sum / norm);
    (j, y0, y1)
}

/// All orders `0..=m_max` in one pass, stopping early if `Y_m` leaves the
/// floating-point range. Returns the pairs computed so far and, on early
/// stop, the first order that overflowed.
pub(crate) fn jy_orders_until_overflow(m_max: usize, x: f64, tol: f64) -> (Vec<BesselPair>, Option<usize>) {
    let (j, y0, y1) = miller_jy01(m_max, x, tol);
    let mut y = Vec::with_capacity(m_max + 2);
    y.push(y0);
    y.push(y1);
    let mut overflow = None;
    for k in 1..m_max {
        let next = 2.0 * k as f64 / x * y[k] - y[k - 1];
        if !next.is_finite() || next.abs() > OVERFLOW_ABOVE {
            overflow = Some(k + 1);
            break;
        }
        y.push(next);
    }
    let available = overflow.unwrap_or(m_max + 1);
    let mut out = Vec::with_capacity(available);
    for m in 0..available {
        let (jp, yp) = if m == 0 {
            (-j[1], -y[1])
        } else {
            let mx = m as f64 / x;
            (j[m - 1] - mx * j[m], y[m - 1] - mx * y[m])
        };
        out.push(BesselPair {
            order: m,
            x,
            j: j[m],
            y: y[m],
            jp,
            yp,
        });
    }
    (out, overflow)
}

/// `J_m`, `Y_m` and their derivatives for orders `0..=m_max` at fixed `x`,
/// in `O(m_max + x)` work.
pub fn bessel_jy_all_orders(m_max: usize, x: f64) -> Result<Vec<BesselPair>> {
    bessel_jy_all_orders_tol(m_max, x, DEFAULT_BESSEL_TOL)
}

pub fn bessel_jy_all_orders_tol(m_max: usize, x: f64, tol: f64) -> Result<Vec<BesselPair>> {
    check_args(m_max, x)?;
    match jy_orders_until_overflow(m_max, x, tol) {
        (pairs, None) => Ok(pairs),
        (_, Some(order)) => Err(Error::BesselOverflow { order, x }),
    }
}

pub fn bessel_jy(m: usize, x: f64) -> Result<BesselPair> {
    check_args(m, x)?;
    let (mut pairs, overflow) = jy_orders_until_overflow(m, x, DEFAULT_BESSEL_TOL);
    match overflow {
        Some(order) => Err(Error::BesselOverflow { order, x }),
        None => Ok(pairs.swap_remove(m)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    // Reference values from 30-digit evaluation.
    const TABLE: &[(usize, f64, f64, f64)] = &[
        (0, 1.0, 0.765_197_686_557_966_6, 0.088_256_964_215_676_96),
        (1, 1.0, 0.440_050_585_744_933_5, -0.781_212_821_300_288_7),
        (5, 10.0, -0.234_061_528_186_793_7, 0.135_403_047_689_362_4),
    ];

    #[test]
    fn tabulated_values() {
        for &(m, x, j, y) in TABLE {
            let p = bessel_jy(m, x).unwrap();
            assert!((p.j - j).abs() < 1e-14, "J_{m}({x}) = {}", p.j);
            assert!((p.y - y).abs() < 1e-14, "Y_{m}({x}) = {}", p.y);
        }
    }

    #[test]
    fn first_zero_of_j0() {
        let p = bessel_jy(0, 2.404_825_557_695_773).unwrap();
        assert!(p.j.abs() < 1e-15);
    }

    #[test]
    fn small_argument_leading_order() {
        let x = 1e-6;
        let p = bessel_jy(1, x).unwrap();
        assert!((p.j / (0.5 * x) - 1.0).abs() < 1e-10);
        assert!((p.y / (-2.0 / (PI * x)) - 1.0).abs() < 1e-10);
    }

    #[test]
    fn wronskian_example() {
        let p = bessel_jy(7, 13.3).unwrap();
        let w = 2.0 / (PI * 13.3);
        assert!((p.wronskian() / w - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(bessel_jy(0, 0.0).is_err());
        assert!(bessel_jy(0, -1.0).is_err());
        assert!(bessel_jy(DEFAULT_ORDER_CAP + 1, 10.0).is_err());
    }

    #[test]
    fn overflow_reported() {
        match bessel_jy(300, 1.0) {
            Err(Error::BesselOverflow { order, .. }) => assert!(order <= 300),
            other => panic!("expected overflow, got {other:?}"),
        }
    }

    #[test]
    fn recurrence_residual() {
        let x = 37.5;
        let pairs = bessel_jy_all_orders(120, x).unwrap();
        for m in 1..120 {
            let r = pairs[m - 1].j + pairs[m + 1].j - 2.0 * m as f64 / x * pairs[m].j;
            let scale = pairs[m - 1].j.abs().max(pairs[m + 1].j.abs()).max(pairs[m].j.abs());
            assert!(r.abs() <= 1e-10 * scale.max(1e-300), "m={m} r={r}");
        }
    }

    #[test]
    fn miller_start_grows_with_precision() {
        assert!(miller_start(10, 100.0, 1e-8) < miller_start(10, 100.0, 1e-16));
        assert!(miller_start(500, 10.0, 1e-16) >= 524);
    }
}
