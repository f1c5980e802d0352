//! Command-line surface. Every subcommand's arguments serialise into the
//! JSON sidecar, which is enough to rerun it.

use std::f64::consts::PI;
use std::path::PathBuf;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

#[derive(Debug, Parser)]
#[command(name = "curvescat", version, about = "Scattering off a plane with a spherical extrusion")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Command {
    /// Differential cross sections on an angle grid.
    Xsec(XsecArgs),
    /// Total cross section over a range of kR, with resonance peaks.
    Scan(ScanArgs),
    /// Phase shifts for one configuration.
    PhaseTable(PhaseTableArgs),
    /// Sampled geodesics, by launch angle or by scattering angle.
    Trajectory(TrajectoryArgs),
    /// All three methods on one grid plus pairwise discrepancies.
    Compare(CompareArgs),
    /// Repeat the run recorded in a JSON sidecar.
    #[serde(skip)]
    Rerun(RerunArgs),
}

/// Accepts radians (`2.356`) or multiples of pi (`0.75pi`, `pi`, `3pi/4`).
pub fn parse_alpha(s: &str) -> Result<f64, String> {
    let t = s.trim().to_ascii_lowercase();
    let value = if let Some(idx) = t.find("pi") {
        let (head, tail) = (&t[..idx], &t[idx + 2..]);
        let factor = match head.trim().trim_end_matches('*') {
            "" => 1.0,
            "-" => -1.0,
            h => h.parse::<f64>().map_err(|_| format!("cannot read '{s}' as an angle"))?,
        };
        let divisor = match tail.trim() {
            "" => 1.0,
            d => d
                .strip_prefix('/')
                .and_then(|d| d.trim().parse::<f64>().ok())
                .ok_or_else(|| format!("cannot read '{s}' as an angle"))?,
        };
        factor * PI / divisor
    } else {
        t.parse::<f64>().map_err(|_| format!("cannot read '{s}' as an angle"))?
    };
    if value > 0.0 && value < PI {
        Ok(value)
    } else {
        Err(format!("alpha must lie in (0, pi), got {value}"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct OutputArgs {
    /// Data file; the sidecar is written next to it with `.json` appended.
    #[arg(long, short)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
pub struct ToleranceArgs {
    /// Bessel recurrence tolerance (default 1e-16).
    #[arg(long)]
    pub bessel_tol: Option<f64>,
    /// Relative tolerance of the interior integration (default 1e-11).
    #[arg(long)]
    pub ode_rtol: Option<f64>,
    /// Orders beyond kR sin(alpha) (default max(12, ceil(4 kR^(1/3)))).
    #[arg(long)]
    pub m_buffer: Option<usize>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct GridArgs {
    #[arg(long, default_value_t = -PI, allow_hyphen_values = true)]
    pub theta_min: f64,
    #[arg(long, default_value_t = PI, allow_hyphen_values = true)]
    pub theta_max: f64,
    #[arg(long, default_value_t = 4096)]
    pub count: usize,
    /// Add points across the forward diffraction spike.
    #[arg(long)]
    pub refine: bool,
    /// Extra points used by `--refine`.
    #[arg(long, default_value_t = 201)]
    pub refine_points: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Classical,
    Quantum,
    Semiclassical,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Spike {
    /// Sum the spike up to floor(kR sin(alpha)).
    Floor,
    /// Use the non-integer edge kR sin(alpha).
    Continuous,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AssemblyArg {
    StationaryPhase,
    PartialWaveSum,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct ScArgs {
    #[arg(long, value_enum, default_value_t = Spike::Floor)]
    pub spike: Spike,
    #[arg(long, value_enum, default_value_t = AssemblyArg::StationaryPhase)]
    pub assembly: AssemblyArg,
    /// Caustic band half-width in units of kR^(-2/3).
    #[arg(long, default_value_t = 3.0)]
    pub guard: f64,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct XsecArgs {
    /// Extrusion angle: radians or a multiple of pi such as `0.75pi`.
    #[arg(long, value_parser = parse_alpha)]
    pub alpha: f64,
    /// Wave number times sphere radius; required for the wave methods.
    #[arg(long)]
    pub kr: Option<f64>,
    #[arg(long, value_enum, default_value_t = Method::Classical)]
    pub method: Method,
    #[command(flatten)]
    pub grid: GridArgs,
    #[command(flatten)]
    pub sc: ScArgs,
    #[command(flatten)]
    pub tol: ToleranceArgs,
    /// Monte-Carlo samples for an extra classical histogram column (0 = off).
    #[arg(long, default_value_t = 0)]
    pub mc_samples: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Refine {
    Auto,
    Always,
    Never,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct ScanArgs {
    #[arg(long, value_parser = parse_alpha)]
    pub alpha: f64,
    #[arg(long)]
    pub kr_min: f64,
    #[arg(long)]
    pub kr_max: f64,
    /// Coarse samples.
    #[arg(long, default_value_t = 401)]
    pub count: usize,
    /// Refinement windows around kR = sqrt(l (l + 1)).
    #[arg(long, value_enum, default_value_t = Refine::Auto)]
    pub refine: Refine,
    /// Minimum peak excess over the running median, in units of sigma / R.
    #[arg(long, default_value_t = 0.05)]
    pub prominence: f64,
    #[command(flatten)]
    pub tol: ToleranceArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PhaseMethodArg {
    Exact,
    Wkbj,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct PhaseTableArgs {
    #[arg(long, value_parser = parse_alpha)]
    pub alpha: f64,
    #[arg(long)]
    pub kr: f64,
    #[arg(long, value_enum, default_value_t = PhaseMethodArg::Exact)]
    pub method: PhaseMethodArg,
    #[command(flatten)]
    pub tol: ToleranceArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[command(group(ArgGroup::new("launch").required(true).args(["beta", "theta"])))]
pub struct TrajectoryArgs {
    #[arg(long, value_parser = parse_alpha)]
    pub alpha: f64,
    /// Launch angle on the contact circle, |beta| <= pi/2.
    #[arg(long, allow_hyphen_values = true)]
    pub beta: Option<f64>,
    /// Scattering angle; both paths reaching it are written.
    #[arg(long, allow_hyphen_values = true)]
    pub theta: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    pub radius: f64,
    /// Samples per path.
    #[arg(long, default_value_t = 400)]
    pub points: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct CompareArgs {
    #[arg(long, value_parser = parse_alpha)]
    pub alpha: f64,
    #[arg(long)]
    pub kr: f64,
    #[command(flatten)]
    pub grid: GridArgs,
    #[command(flatten)]
    pub sc: ScArgs,
    #[command(flatten)]
    pub tol: ToleranceArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct RerunArgs {
    pub sidecar: PathBuf,
    /// Write here instead of the recorded data file.
    #[arg(long, short)]
    pub out: Option<PathBuf>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alpha_sugar() {
        assert_eq!(parse_alpha("0.75pi").unwrap(), 0.75 * PI);
        assert_eq!(parse_alpha("0.5PI").unwrap(), 0.5 * PI);
        assert_eq!(parse_alpha("3pi/4").unwrap(), 3.0 * PI / 4.0);
        assert_eq!(parse_alpha("pi/8").unwrap(), PI / 8.0);
        assert_eq!(parse_alpha("1.25").unwrap(), 1.25);
        assert!(parse_alpha("pi").is_err());
        assert!(parse_alpha("0").is_err());
        assert!(parse_alpha("1.2pie").is_err());
        assert!(parse_alpha("abc").is_err());
    }

    #[test]
    fn commands_round_trip_through_json() {
        let cli = Cli::try_parse_from(["curvescat", "xsec", "--alpha", "0.5pi", "--kr", "20", "--method", "all"]).unwrap();
        let json = serde_json::to_string(&cli.command).unwrap();
        let back: Command = serde_json::from_str(&json).unwrap();
        assert_eq!(serde_json::to_string(&back).unwrap(), json);
        assert!(json.contains("\"command\":\"xsec\""));
    }

    #[test]
    fn trajectory_needs_one_launch() {
        assert!(Cli::try_parse_from(["curvescat", "trajectory", "--alpha", "1"]).is_err());
        assert!(Cli::try_parse_from(["curvescat", "trajectory", "--alpha", "1", "--beta", "0", "--theta", "1"]).is_err());
        assert!(Cli::try_parse_from(["curvescat", "trajectory", "--alpha", "1", "--theta", "-0.5"]).is_ok());
    }
}
