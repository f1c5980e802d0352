//! Adaptive Gragg-Bulirsch-Stoer extrapolation for smooth, non-stiff
//! first-order systems `y' = f(x, y)` with a fixed-size state.
//!
//! Each macro step runs the modified midpoint rule with the substep sequence
//! `2, 4, 6, ...` and extrapolates the results to zero step in `h^2`. The
//! difference between the last two diagonal entries of the tableau drives
//! the step size.

use crate::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct OdeOptions {
    /// Relative tolerance, measured against the max-norm of the state.
    pub rtol: f64,
    /// Absolute floor added to the error scale.
    pub atol: f64,
    /// Initial step; `None` picks a fraction of the interval.
    pub initial_step: Option<f64>,
    pub max_steps: usize,
    /// Number of extrapolation columns (order `2 * columns`).
    pub columns: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        Self {
            rtol: 1e-11,
            atol: 1e-300,
            initial_step: None,
            max_steps: 200_000,
            columns: 8,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct OdeStats {
    pub accepted: usize,
    pub rejected: usize,
    pub evaluations: usize,
}

const MAX_COLUMNS: usize = 12;

fn midpoint<const N: usize, F>(f: &mut F, x: f64, y: &[f64; N], dy: &[f64; N], big_h: f64, n: usize) -> [f64; N]
where
    F: FnMut(f64, &[f64; N]) -> [f64; N],
{
    let h = big_h / n as f64;
    let mut z0 = *y;
    let mut z1 = [0.0; N];
    for i in 0..N {
        z1[i] = y[i] + h * dy[i];
    }
    for k in 1..n {
        let d = f(x + k as f64 * h, &z1);
        for i in 0..N {
            let z2 = z0[i] + 2.0 * h * d[i];
            z0[i] = z1[i];
            z1[i] = z2;
        }
    }
    let d = f(x + big_h, &z1);
    let mut out = [0.0; N];
    for i in 0..N {
        out[i] = 0.5 * (z0[i] + z1[i] + h * d[i]);
    }
    out
}

/// Integrates from `x0` to `x1`, invoking `observe(x, y)` after every
/// accepted step (including the final one at `x1`).
pub fn integrate_observed<const N: usize, F, O>(
    mut f: F,
    x0: f64,
    y0: [f64; N],
    x1: f64,
    opts: &OdeOptions,
    mut observe: O,
) -> Result<([f64; N], OdeStats)>
where
    F: FnMut(f64, &[f64; N]) -> [f64; N],
    O: FnMut(f64, &[f64; N]),
{
    let k = opts.columns.clamp(2, MAX_COLUMNS);
    let span = x1 - x0;
    let mut stats = OdeStats {
        accepted: 0,
        rejected: 0,
        evaluations: 0,
    };
    if span == 0.0 {
        return Ok((y0, stats));
    }
    let dir = span.signum();
    let mut x = x0;
    let mut y = y0;
    let mut h = opts.initial_step.map(f64::abs).unwrap_or(span.abs() / 16.0) * dir;
    let seq: Vec<usize> = (1..=k).map(|j| 2 * j).collect();
    let work_per_step: usize = seq.iter().sum::<usize>() + 1;
    let mut table = [[0.0; N]; MAX_COLUMNS];

    loop {
        if (x1 - x) * dir <= 0.0 {
            return Ok((y, stats));
        }
        if stats.accepted + stats.rejected >= opts.max_steps {
            return Err(Error::NonConvergence(format!(
                "ODE integration stalled at x = {x} after {} steps",
                opts.max_steps
            )));
        }
        let last = (x + h - x1) * dir >= 0.0;
        let step = if last { x1 - x } else { h };
        let dy = f(x, &y);
        stats.evaluations += work_per_step;

        for (j, &n) in seq.iter().enumerate() {
            table[j] = midpoint(&mut f, x, &y, &dy, step, n);
            for m in (0..j).rev() {
                let ratio = (n as f64 / seq[m] as f64).powi(2) - 1.0;
                for i in 0..N {
                    table[m][i] = table[m + 1][i] + (table[m + 1][i] - table[m][i]) / ratio;
                }
            }
        }
        // table[0] holds the fully extrapolated value, table[1] the previous diagonal
        let scale = y
            .iter()
            .chain(table[0].iter())
            .fold(0.0f64, |acc, v| acc.max(v.abs()));
        let tol = opts.atol + opts.rtol * scale;
        let err = (0..N)
            .map(|i| (table[0][i] - table[1][i]).abs())
            .fold(0.0f64, f64::max)
            / tol;

        if !err.is_finite() {
            stats.rejected += 1;
            h = 0.25 * step;
            if h.abs() < 1e-14 * x.abs().max(1.0) {
                return Err(Error::NonConvergence(format!("ODE step underflow at x = {x}")));
            }
            continue;
        }
        let exponent = 1.0 / (2 * k - 1) as f64;
        let factor = (0.94 * (0.65 / err.max(1e-30)).powf(exponent)).clamp(0.2, 4.0);
        if err <= 1.0 {
            stats.accepted += 1;
            x = if last { x1 } else { x + step };
            y = table[0];
            observe(x, &y);
            if last {
                return Ok((y, stats));
            }
            h = step * factor;
        } else {
            stats.rejected += 1;
            h = step * factor.min(0.9);
            if h.abs() < 1e-14 * x.abs().max(1.0) {
                return Err(Error::NonConvergence(format!("ODE step underflow at x = {x}")));
            }
        }
    }
}

pub fn integrate<const N: usize, F>(f: F, x0: f64, y0: [f64; N], x1: f64, opts: &OdeOptions) -> Result<([f64; N], OdeStats)>
where
    F: FnMut(f64, &[f64; N]) -> [f64; N],
{
    integrate_observed(f, x0, y0, x1, opts, |_, _| {})
}
