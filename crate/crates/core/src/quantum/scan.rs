//! Total cross section as a function of `kR`, with resonance detection.
//!
//! Overhanging extrusions trap waves behind the centrifugal barrier at the
//! junction; these quasi-bound states show up as narrow peaks near
//! `kR = sqrt(l (l + 1))`. The coarse grid is therefore refined in narrow
//! windows around those points, and peaks are local maxima that stand out
//! from a running median of the coarse samples.

use rayon::prelude::*;

use super::{phase_table, total_xsec, PhaseConfig};
use crate::specfun::legendre_degree;
use crate::surface::check_alpha;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RefineMode {
    /// Refine only for overhanging extrusions.
    Auto,
    Always,
    Never,
}

#[derive(Debug, Clone, Copy)]
pub struct ScanConfig {
    pub refine: RefineMode,
    /// Full width of each refinement window in `kR`.
    pub refine_width: f64,
    /// Refined spacing is the coarse spacing divided by this.
    pub refine_factor: usize,
    /// Half-width in `kR` of the running median used as the baseline.
    pub median_half_width: f64,
    /// Minimum excess over the baseline, in units of `sigma / R`.
    pub prominence: f64,
    pub phase: PhaseConfig,
}

impl Default for ScanConfig {
    fn default() -> Self {
        Self {
            refine: RefineMode::Auto,
            refine_width: 0.2,
            refine_factor: 20,
            median_half_width: 0.15,
            prominence: 0.05,
            phase: PhaseConfig::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Peak {
    pub kr: f64,
    pub sigma_over_r: f64,
    pub prominence: f64,
    /// Integer degree closest to the peak and its `sqrt(l (l + 1))`.
    pub nearest_l: u64,
    pub resonance_kr: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanResult {
    pub alpha: f64,
    pub kr: Vec<f64>,
    pub sigma_over_r: Vec<f64>,
    /// Marks samples on the coarse grid (the rest come from refinement).
    pub coarse: Vec<bool>,
    pub peaks: Vec<Peak>,
}

/// Nearest integer degree `l` to the given `kR` and its resonance position.
pub fn nearest_resonance(kr: f64) -> (u64, f64) {
    let l = legendre_degree(kr).round().max(0.0);
    (l as u64, (l * (l + 1.0)).sqrt())
}

fn resonance_positions(lo: f64, hi: f64, pad: f64) -> Vec<f64> {
    let mut out = Vec::new();
    let mut l = legendre_degree((lo - pad).max(0.0)).floor().max(1.0);
    loop {
        let x = (l * (l + 1.0)).sqrt();
        if x > hi + pad {
            break;
        }
        if x >= lo - pad {
            out.push(x);
        }
        l += 1.0;
    }
    out
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

pub fn sigma_scan(alpha: f64, kr_min: f64, kr_max: f64, n: usize, cfg: &ScanConfig) -> Result<ScanResult> {
    check_alpha(alpha)?;
    if !(kr_min > 0.0 && kr_max > kr_min && kr_max.is_finite()) {
        return Err(Error::invalid("kR_max", kr_max, "scan range must satisfy 0 < kR_min < kR_max"));
    }
    if n < 2 {
        return Err(Error::invalid("n", n as f64, "scan needs at least two samples"));
    }
    let h = (kr_max - kr_min) / (n - 1) as f64;
    let mut samples: Vec<(f64, bool)> = (0..n).map(|i| (kr_min + h * i as f64, true)).collect();
    let refine = match cfg.refine {
        RefineMode::Auto => alpha > std::f64::consts::FRAC_PI_2,
        RefineMode::Always => true,
        RefineMode::Never => false,
    };
    if refine && cfg.refine_factor > 1 {
        let fine = h / cfg.refine_factor as f64;
        let half = 0.5 * cfg.refine_width;
        for centre in resonance_positions(kr_min, kr_max, half) {
            let lo = (centre - half).max(kr_min);
            let hi = (centre + half).min(kr_max);
            let mut x = lo;
            while x <= hi {
                samples.push((x, false));
                x += fine;
            }
        }
    }
    samples.sort_by(|a, b| a.0.total_cmp(&b.0));
    samples.dedup_by(|a, b| {
        let same = (a.0 - b.0).abs() <= 1e-12 * b.0;
        if same {
            b.1 |= a.1;
        }
        same
    });

    let sigma: Vec<f64> = samples
        .par_iter()
        .map(|&(kr, _)| phase_table(alpha, kr, &cfg.phase).map(|t| total_xsec(&t)))
        .collect::<Result<_>>()?;
    let kr: Vec<f64> = samples.iter().map(|s| s.0).collect();
    let coarse: Vec<bool> = samples.iter().map(|s| s.1).collect();
    let peaks = detect_peaks(&kr, &sigma, &coarse, cfg);
    Ok(ScanResult {
        alpha,
        kr,
        sigma_over_r: sigma,
        coarse,
        peaks,
    })
}

/// Local maxima whose excess over the running median of nearby coarse
/// samples exceeds the configured prominence. Maxima closer than the median
/// half-width are merged, keeping the most prominent.
pub fn detect_peaks(kr: &[f64], sigma: &[f64], coarse: &[bool], cfg: &ScanConfig) -> Vec<Peak> {
    let mut peaks: Vec<Peak> = Vec::new();
    for i in 1..kr.len().saturating_sub(1) {
        if !(sigma[i] > sigma[i - 1] && sigma[i] >= sigma[i + 1]) {
            continue;
        }
        let mut window: Vec<f64> = (0..kr.len())
            .filter(|&j| coarse[j] && (kr[j] - kr[i]).abs() <= cfg.median_half_width)
            .map(|j| sigma[j])
            .collect();
        if window.len() < 3 {
            continue;
        }
        let prominence = sigma[i] - median(&mut window);
        if prominence < cfg.prominence {
            continue;
        }
        let (nearest_l, resonance_kr) = nearest_resonance(kr[i]);
        let peak = Peak {
            kr: kr[i],
            sigma_over_r: sigma[i],
            prominence,
            nearest_l,
            resonance_kr,
        };
        match peaks.last_mut() {
            Some(prev) if peak.kr - prev.kr < cfg.median_half_width => {
                if peak.prominence > prev.prominence {
                    *prev = peak;
                }
            }
            _ => peaks.push(peak),
        }
    }
    peaks
}
