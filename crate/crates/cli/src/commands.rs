//! Subcommand bodies: each builds a [`Report`] without touching the filesystem.

use std::f64::consts::PI;

use curvescat::classical::{self, deflection_angle, impact_branches, sample_trajectory};
use curvescat::ode::OdeOptions;
use curvescat::quantum::{
    self, amplitude, phase_table, sigma_scan, PhaseConfig, PhaseShiftTable, RefineMode, ScanConfig,
};
use curvescat::semiclassical::{self, sc_diff_xsec, sc_total_xsec, wkbj_table, Assembly, ScConfig, SpikeCutoff};
use curvescat::SurfaceGeometry;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rayon::prelude::*;
use serde_json::{json, Map, Value};

use crate::args::*;
use crate::error::CliError;
use crate::output::{Column, Report, Table};

fn config(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

fn phase_config(tol: &ToleranceArgs) -> Result<PhaseConfig, CliError> {
    let mut cfg = PhaseConfig {
        m_buffer: tol.m_buffer,
        ..Default::default()
    };
    if let Some(t) = tol.bessel_tol {
        if !(t > 0.0 && t < 1.0) {
            return Err(config(format!("bessel-tol must lie in (0, 1), got {t}")));
        }
        cfg.bessel_tol = t;
    }
    if let Some(t) = tol.ode_rtol {
        if !(t > 0.0 && t < 1.0) {
            return Err(config(format!("ode-rtol must lie in (0, 1), got {t}")));
        }
        cfg.ode = OdeOptions {
            rtol: t,
            ..cfg.ode
        };
    }
    Ok(cfg)
}

fn sc_config(sc: &ScArgs) -> Result<ScConfig, CliError> {
    if !(sc.guard >= 0.0 && sc.guard.is_finite()) {
        return Err(config(format!("guard must be non-negative, got {}", sc.guard)));
    }
    Ok(ScConfig {
        assembly: match sc.assembly {
            AssemblyArg::StationaryPhase => Assembly::StationaryPhase,
            AssemblyArg::PartialWaveSum => Assembly::PartialWaveSum,
        },
        spike: match sc.spike {
            Spike::Floor => SpikeCutoff::Floor,
            Spike::Continuous => SpikeCutoff::Continuous,
        },
        guard_factor: sc.guard,
    })
}

fn positive(name: &str, x: f64) -> Result<f64, CliError> {
    if x > 0.0 && x.is_finite() {
        Ok(x)
    } else {
        Err(config(format!("{name} must be positive and finite, got {x}")))
    }
}

/// Uniform angles from `theta_min` to `theta_max`; a full turn drops the
/// duplicate `-pi`. `--refine` adds points across the forward spike.
pub fn theta_grid(g: &GridArgs, alpha: f64, kr: Option<f64>) -> Result<Vec<f64>, CliError> {
    let (lo, hi) = (g.theta_min, g.theta_max);
    if !(lo >= -PI && hi <= PI && hi > lo) {
        return Err(config(format!("theta range must satisfy -pi <= min < max <= pi, got [{lo}, {hi}]")));
    }
    if g.count < 2 {
        return Err(config("count must be at least 2"));
    }
    let full = lo == -PI && hi == PI;
    let mut grid: Vec<f64> = if full {
        quantum::uniform_theta_grid(g.count)
    } else {
        (0..g.count).map(|i| lo + (hi - lo) * i as f64 / (g.count - 1) as f64).collect()
    };
    if g.refine {
        let kr = kr.ok_or_else(|| config("--refine needs --kr"))?;
        let half = (5.0 / (kr * alpha.sin())).min(PI);
        let n = g.refine_points.max(2);
        grid.extend(
            (0..n)
                .map(|i| -half + 2.0 * half * i as f64 / (n - 1) as f64)
                .filter(|&t| t > lo && t <= hi),
        );
        grid.sort_by(f64::total_cmp);
        grid.dedup_by(|a, b| (*a - *b).abs() <= 1e-15);
    }
    Ok(grid)
}

fn grid_meta(g: &GridArgs, n: usize) -> Value {
    json!({
        "theta_min": g.theta_min,
        "theta_max": g.theta_max,
        "count": g.count,
        "refine": g.refine,
        "refine_points": g.refine_points,
        "points": n,
    })
}

/// Histogram estimate of `R^-1 |db/dtheta|`, with bins split half-way
/// between neighbouring grid angles.
fn monte_carlo_column(alpha: f64, thetas: &[f64], samples: usize, seed: u64) -> Result<Vec<f64>, CliError> {
    let n = thetas.len();
    let mut edges = Vec::with_capacity(n + 1);
    edges.push(if n > 1 { thetas[0] - 0.5 * (thetas[1] - thetas[0]) } else { -PI });
    edges.extend(thetas.windows(2).map(|w| 0.5 * (w[0] + w[1])));
    edges.push(thetas[n - 1] + 0.5 * (thetas[n - 1] - thetas[n.saturating_sub(2)]));
    let mut counts = vec![0u64; n];
    let mut rng = StdRng::seed_from_u64(seed);
    let s = alpha.sin();
    for _ in 0..samples {
        let b = s * rng.gen_range(-1.0..1.0);
        let t = deflection_angle(alpha, -b)?;
        let i = edges.partition_point(|&e| e <= t);
        if (1..=n).contains(&i) {
            counts[i - 1] += 1;
        }
    }
    Ok(counts
        .iter()
        .enumerate()
        .map(|(i, &c)| 2.0 * s * c as f64 / (samples as f64 * (edges[i + 1] - edges[i])))
        .collect())
}

fn classical_columns(alpha: f64, thetas: &[f64], table: &mut Table) -> Result<(), CliError> {
    let samples: Vec<classical::XsecSample> = thetas
        .par_iter()
        .map(|&t| classical::classical_diff_xsec(alpha, t))
        .collect::<Result<_, _>>()?;
    table.push("classical", Column::Float(samples.iter().map(|s| s.value).collect()));
    // D = R^-1 |db/dtheta| / (2 sin(alpha)), unit area over the circle
    let norm = 2.0 * alpha.sin();
    table.push("classical_normalized", Column::Float(samples.iter().map(|s| s.value / norm).collect()));
    table.push("classical_supported", Column::Flag(samples.iter().map(|s| s.supported).collect()));
    Ok(())
}

pub fn xsec(a: &XsecArgs) -> Result<Report, CliError> {
    let wave = matches!(a.method, Method::Quantum | Method::Semiclassical | Method::All);
    let kr = match (a.kr, wave) {
        (Some(k), _) => Some(positive("kr", k)?),
        (None, true) => return Err(config("the wave methods need --kr")),
        (None, false) => None,
    };
    let thetas = theta_grid(&a.grid, a.alpha, kr)?;
    let mut table = Table::default();
    table.push("theta", Column::Float(thetas.clone()));
    let mut meta = Map::new();
    meta.insert("alpha".into(), json!(a.alpha));
    meta.insert("kR".into(), json!(kr));
    meta.insert("method".into(), json!(a.method));
    meta.insert("grid".into(), grid_meta(&a.grid, thetas.len()));
    meta.insert(
        "value".into(),
        json!("classical: R^-1 |db/dtheta|; classical_normalized: D = classical / (2 sin alpha); wave methods: R^-1 dsigma/dtheta"),
    );
    if matches!(a.method, Method::Classical | Method::All) {
        classical_columns(a.alpha, &thetas, &mut table)?;
        if a.mc_samples > 0 {
            table.push(
                "classical_mc",
                Column::Float(monte_carlo_column(a.alpha, &thetas, a.mc_samples, a.seed)?),
            );
            meta.insert("mc_samples".into(), json!(a.mc_samples));
            meta.insert("seed".into(), json!(a.seed));
        }
    }
    if let (true, Some(kr)) = (matches!(a.method, Method::Quantum | Method::All), kr) {
        let t = phase_table(a.alpha, kr, &phase_config(&a.tol)?)?;
        meta.insert("m_max".into(), json!(t.m_max));
        table.push("quantum", Column::Float(amplitude(&t, &thetas)?.dsigma));
    }
    if let (true, Some(kr)) = (matches!(a.method, Method::Semiclassical | Method::All), kr) {
        let g = sc_diff_xsec(a.alpha, kr, &thetas, &sc_config(&a.sc)?)?;
        meta.insert("semiclassical".into(), json!(a.sc));
        table.push("semiclassical", Column::Float(g.dsigma));
        table.push("semiclassical_valid", Column::Flag(g.valid));
    }
    Ok(Report {
        table,
        meta,
        summary: Vec::new(),
    })
}

pub fn scan(a: &ScanArgs) -> Result<Report, CliError> {
    positive("kr-min", a.kr_min)?;
    positive("kr-max", a.kr_max)?;
    let cfg = ScanConfig {
        refine: match a.refine {
            Refine::Auto => RefineMode::Auto,
            Refine::Always => RefineMode::Always,
            Refine::Never => RefineMode::Never,
        },
        prominence: a.prominence,
        phase: phase_config(&a.tol)?,
        ..Default::default()
    };
    let r = sigma_scan(a.alpha, a.kr_min, a.kr_max, a.count, &cfg)?;
    let sc: Vec<f64> = r
        .kr
        .iter()
        .map(|&k| sc_total_xsec(a.alpha, k))
        .collect::<Result<_, _>>()?;
    let mut table = Table::default();
    table.push("kR", Column::Float(r.kr.clone()));
    table.push("sigma_over_R", Column::Float(r.sigma_over_r.clone()));
    table.push("sigma_sc_over_R", Column::Float(sc));
    table.push("asymptote", Column::Float(vec![4.0 * a.alpha.sin(); r.kr.len()]));
    table.push("coarse", Column::Flag(r.coarse.clone()));
    let peaks: Vec<Value> = r
        .peaks
        .iter()
        .map(|p| {
            json!({
                "kR": p.kr,
                "sigma_over_R": p.sigma_over_r,
                "prominence": p.prominence,
                "l": p.nearest_l,
                "resonance_kR": p.resonance_kr,
            })
        })
        .collect();
    let summary = r
        .peaks
        .iter()
        .map(|p| format!("peak at kR = {:.4} (l = {}, sqrt(l(l+1)) = {:.4})", p.kr, p.nearest_l, p.resonance_kr))
        .collect();
    let mut meta = Map::new();
    meta.insert("alpha".into(), json!(a.alpha));
    meta.insert("kR_range".into(), json!([a.kr_min, a.kr_max]));
    meta.insert("method".into(), json!("quantum"));
    meta.insert("peaks".into(), Value::Array(peaks));
    Ok(Report { table, meta, summary })
}

pub fn phase_table_cmd(a: &PhaseTableArgs) -> Result<Report, CliError> {
    let kr = positive("kr", a.kr)?;
    let t: PhaseShiftTable = match a.method {
        PhaseMethodArg::Exact => phase_table(a.alpha, kr, &phase_config(&a.tol)?)?,
        PhaseMethodArg::Wkbj => wkbj_table(a.alpha, kr)?,
    };
    let edge = kr * a.alpha.sin();
    let ms: Vec<i64> = (0..=t.m_max as i64).collect();
    let mut table = Table::default();
    table.push("m", Column::Int(ms.clone()));
    table.push("delta_m", Column::Float(t.delta.clone()));
    table.push("sin2_delta_m", Column::Float(ms.iter().map(|&m| t.sin2(m)).collect()));
    table.push("beyond_edge", Column::Flag(ms.iter().map(|&m| m as f64 > edge).collect()));
    table.push(
        "status",
        Column::Text(
            t.status
                .iter()
                .map(|s| format!("{s:?}").to_lowercase())
                .collect(),
        ),
    );
    let mut meta = Map::new();
    meta.insert("alpha".into(), json!(a.alpha));
    meta.insert("kR".into(), json!(kr));
    meta.insert("method".into(), json!(t.method.as_str()));
    meta.insert("m_max".into(), json!(t.m_max));
    meta.insert("note".into(), json!("delta_{-m} = delta_m; only m >= 0 is listed"));
    meta.insert("sigma_over_R".into(), json!(quantum::total_xsec(&t)));
    Ok(Report {
        table,
        meta,
        summary: Vec::new(),
    })
}

pub fn trajectory(a: &TrajectoryArgs) -> Result<Report, CliError> {
    let geom = SurfaceGeometry::new(positive("radius", a.radius)?, a.alpha)?;
    if a.points < 2 {
        return Err(config("points must be at least 2"));
    }
    let betas: Vec<f64> = match (a.beta, a.theta) {
        (Some(beta), None) => vec![beta],
        (None, Some(theta)) => {
            let pair = impact_branches(a.alpha, theta)?;
            if !pair.valid {
                return Err(config(format!("no classical path scatters into theta = {theta}")));
            }
            let s = a.alpha.sin();
            let mut bs = vec![pair.b_plus];
            if pair.b_minus != pair.b_plus {
                bs.push(pair.b_minus);
            }
            bs.iter().map(|b| (b / s).clamp(-1.0, 1.0).asin()).collect()
        }
        _ => return Err(config("give exactly one of --beta and --theta")),
    };
    let mut cols: [Vec<f64>; 4] = Default::default();
    let (mut path, mut seg) = (Vec::new(), Vec::new());
    let mut paths = Vec::new();
    for (k, &beta) in betas.iter().enumerate() {
        let s = sample_trajectory(&geom, beta, a.points)?;
        for i in 0..s.points.len() {
            path.push(k as i64);
            cols[0].push(s.points[i][0]);
            cols[1].push(s.points[i][1]);
            cols[2].push(s.points[i][2]);
            cols[3].push(s.arc_lengths[i]);
            seg.push(s.segments[i].as_str().to_string());
        }
        paths.push(json!({
            "path": k,
            "beta": beta,
            "b_over_R": s.deflection.b_over_r,
            "theta": s.deflection.theta,
            "entry_s": s.markers.entry_s,
            "exit_s": s.markers.exit_s,
        }));
    }
    let [x, y, z, arc] = cols;
    let mut table = Table::default();
    table.push("path", Column::Int(path));
    table.push("x", Column::Float(x));
    table.push("y", Column::Float(y));
    table.push("z", Column::Float(z));
    table.push("s", Column::Float(arc));
    table.push("segment", Column::Text(seg));
    let mut meta = Map::new();
    meta.insert("alpha".into(), json!(a.alpha));
    meta.insert("radius".into(), json!(a.radius));
    meta.insert("method".into(), json!("classical"));
    meta.insert("paths".into(), Value::Array(paths));
    Ok(Report {
        table,
        meta,
        summary: Vec::new(),
    })
}

/// Largest absolute difference over points where both columns apply.
fn max_gap(a: &[f64], b: &[f64], keep: &[bool]) -> Option<f64> {
    a.iter()
        .zip(b)
        .zip(keep)
        .filter(|(_, &k)| k)
        .map(|((x, y), _)| (x - y).abs())
        .filter(|d| d.is_finite())
        .reduce(f64::max)
}

pub fn compare(a: &CompareArgs) -> Result<Report, CliError> {
    let kr = positive("kr", a.kr)?;
    let thetas = theta_grid(&a.grid, a.alpha, Some(kr))?;
    let mut table = Table::default();
    table.push("theta", Column::Float(thetas.clone()));
    classical_columns(a.alpha, &thetas, &mut table)?;
    let t = phase_table(a.alpha, kr, &phase_config(&a.tol)?)?;
    let q = amplitude(&t, &thetas)?.dsigma;
    let sc = sc_diff_xsec(a.alpha, kr, &thetas, &sc_config(&a.sc)?)?;
    let Column::Float(classical) = table.columns[1].clone() else {
        unreachable!("classical column is numeric")
    };
    // the classical picture has no forward diffraction spike
    let window = 5.0 / (kr * a.alpha.sin());
    let outside: Vec<bool> = thetas.iter().map(|t| t.abs() > window).collect();
    let both: Vec<bool> = outside.iter().zip(&sc.valid).map(|(&o, &v)| o && v).collect();
    let gaps = json!({
        "quantum_vs_semiclassical": max_gap(&q, &sc.dsigma, &sc.valid),
        "classical_vs_quantum": max_gap(&classical, &q, &outside),
        "classical_vs_semiclassical": max_gap(&classical, &sc.dsigma, &both),
        "forward_window": window,
    });
    table.push("quantum", Column::Float(q));
    table.push("semiclassical", Column::Float(sc.dsigma));
    table.push("semiclassical_valid", Column::Flag(sc.valid));
    let summary = ["quantum_vs_semiclassical", "classical_vs_quantum", "classical_vs_semiclassical"]
        .iter()
        .map(|k| format!("max |{k}| = {}", gaps[k]))
        .collect();
    let mut meta = Map::new();
    meta.insert("alpha".into(), json!(a.alpha));
    meta.insert("kR".into(), json!(kr));
    meta.insert("method".into(), json!("all"));
    meta.insert("m_max".into(), json!(t.m_max));
    meta.insert("grid".into(), grid_meta(&a.grid, thetas.len()));
    meta.insert("semiclassical".into(), json!(a.sc));
    meta.insert("discrepancy".into(), gaps);
    meta.insert("sigma_over_R".into(), json!(quantum::total_xsec(&t)));
    meta.insert("sigma_sc_over_R".into(), json!(semiclassical::sc_total_xsec(a.alpha, kr)?));
    Ok(Report { table, meta, summary })
}
