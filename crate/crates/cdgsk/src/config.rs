//! Command-line flags, the TOML config file and their merge into fully
//! resolved per-command settings. Flags win over the file, the file over
//! built-in defaults.

use std::path::{Path, PathBuf};

use cdgsk_core::{bloch, evolve, profile, reduced};
use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(name = "cdgsk", version, about = "Periodic traveling waves of the CDG-SK equation and their Bloch spectra")]
pub struct Cli {
    /// TOML file with [profile], [spectrum], [reduced], [evolve], [output] tables.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Write JSON outputs. Selectors restrict the formats written; without
    /// any selector JSON and CSV are written.
    #[arg(long, global = true)]
    pub json: bool,
    #[arg(long, global = true)]
    pub csv: bool,
    #[arg(long, global = true)]
    pub svg: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve traveling-wave profiles and fit the speed law.
    Profile(ProfileArgs),
    /// Scan the Bloch spectrum over a Floquet grid.
    Spectrum(SpectrumArgs),
    /// Build the reduced 3x3 model near the origin.
    Reduced(ReducedArgs),
    /// Evolve a perturbed profile in time.
    Evolve(EvolveArgs),
    /// Run all four commands.
    All(AllArgs),
}

#[derive(Debug, Clone, Default, Args)]
pub struct ProfileArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub a: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub k: Option<f64>,
    /// Truncation order of the profile.
    #[arg(long = "n")]
    pub n: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    pub tol: Option<f64>,
    /// Amplitude sweep `lo:hi:count`.
    #[arg(long)]
    pub sweep: Option<String>,
    /// Fit `c = c0 + c2 a² + c4 a⁴` over the sweep.
    #[arg(long)]
    pub fit: bool,
}

#[derive(Debug, Clone, Default, Args)]
pub struct SpectrumArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub a: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub k: Option<f64>,
    /// Truncation order of the Bloch matrices.
    #[arg(long = "n")]
    pub n: Option<usize>,
    /// Number of uniform Floquet points on [-1/2, 1/2].
    #[arg(long)]
    pub grid: Option<usize>,
    /// Single Floquet exponent instead of a grid.
    #[arg(long, allow_negative_numbers = true)]
    pub xi: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub tol: Option<f64>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct ReducedArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub a: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub k: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub xi: Option<f64>,
    #[arg(long = "n")]
    pub n: Option<usize>,
    /// Run the operator-derivative and basis-expansion checks.
    #[arg(long)]
    pub check_appendix: bool,
    /// Skip the halving regression.
    #[arg(long)]
    pub no_regression: bool,
}

#[derive(Debug, Clone, Default, Args)]
pub struct EvolveArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub a: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub k: Option<f64>,
    #[arg(long = "n")]
    pub n: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    pub dt: Option<f64>,
    /// Final time.
    #[arg(long = "T", allow_negative_numbers = true)]
    pub t_end: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub epsilon: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, allow_negative_numbers = true)]
    pub record_every: Option<f64>,
    /// Run the time-step convergence study instead of a growth run.
    #[arg(long)]
    pub dt_study: bool,
}

#[derive(Debug, Clone, Default, Args)]
pub struct AllArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub a: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub k: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
}

/// Contents of the TOML file; every key is optional.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    #[serde(default)]
    pub profile: ProfileFile,
    #[serde(default)]
    pub spectrum: SpectrumFile,
    #[serde(default)]
    pub reduced: ReducedFile,
    #[serde(default)]
    pub evolve: EvolveFile,
    #[serde(default)]
    pub output: OutputFile,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileFile {
    pub a: Option<f64>,
    pub k: Option<f64>,
    pub n: Option<usize>,
    pub tol: Option<f64>,
    pub sweep: Option<String>,
    pub fit: Option<bool>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumFile {
    pub a: Option<f64>,
    pub k: Option<f64>,
    pub n: Option<usize>,
    pub grid: Option<usize>,
    pub xi: Option<f64>,
    pub tol: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReducedFile {
    pub a: Option<f64>,
    pub k: Option<f64>,
    pub xi: Option<f64>,
    pub n: Option<usize>,
    pub check_appendix: Option<bool>,
    pub regression: Option<bool>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvolveFile {
    pub a: Option<f64>,
    pub k: Option<f64>,
    pub n: Option<usize>,
    pub dt: Option<f64>,
    pub t_end: Option<f64>,
    pub epsilon: Option<f64>,
    pub seed: Option<u64>,
    pub record_every: Option<f64>,
    pub dt_study: Option<bool>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputFile {
    pub dir: Option<PathBuf>,
    pub json: Option<bool>,
    pub csv: Option<bool>,
    pub svg: Option<bool>,
}

pub fn load_file(path: &Path) -> Result<FileConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path.display().to_string(), e))?;
    toml::from_str(&text).map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))
}

// Resolved settings. These are echoed verbatim into the manifest.

pub const DEFAULT_A: f64 = 0.02;
pub const DEFAULT_K: f64 = 1.0;
pub const DEFAULT_XI: f64 = 0.05;
pub const DEFAULT_SEED: u64 = 1;
pub const PROFILE_TOL: f64 = 1e-13;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProfileConfig {
    pub amplitudes: Vec<f64>,
    pub k: f64,
    pub n: usize,
    pub tol: f64,
    pub fit: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumConfig {
    pub a: f64,
    pub k: f64,
    pub n: usize,
    pub profile_n: usize,
    /// `None` for a single exponent.
    pub grid: Option<usize>,
    pub xi: Option<f64>,
    pub tol: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReducedConfig {
    pub a: f64,
    pub k: f64,
    pub xi: f64,
    pub n: usize,
    pub check_appendix: bool,
    pub regression: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvolveConfig {
    pub a: f64,
    pub k: f64,
    pub n: usize,
    pub dt: f64,
    pub t_end: f64,
    pub epsilon: f64,
    pub seed: u64,
    pub record_every: f64,
    pub dt_study: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Formats {
    pub json: bool,
    pub csv: bool,
    pub svg: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OutputConfig {
    pub dir: PathBuf,
    pub formats: Formats,
}

/// What a single invocation will do.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: String,
    pub profile: Option<ProfileConfig>,
    pub spectrum: Option<SpectrumConfig>,
    pub reduced: Option<ReducedConfig>,
    pub evolve: Option<EvolveConfig>,
    pub output: OutputConfig,
}

/// Parses `lo:hi:count` into `count` equispaced amplitudes.
pub fn parse_sweep(s: &str) -> Result<Vec<f64>, CliError> {
    let bad = || CliError::Validation(format!("sweep must be lo:hi:count, got {s:?}"));
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err(bad());
    }
    let lo: f64 = parts[0].trim().parse().map_err(|_| bad())?;
    let hi: f64 = parts[1].trim().parse().map_err(|_| bad())?;
    let count: usize = parts[2].trim().parse().map_err(|_| bad())?;
    if count == 0 || !(lo.is_finite() && hi.is_finite()) || (count == 1 && lo != hi) {
        return Err(bad());
    }
    if count == 1 {
        return Ok(vec![lo]);
    }
    Ok((0..count)
        .map(|j| lo + (hi - lo) * j as f64 / (count - 1) as f64)
        .collect())
}

fn positive(name: &str, v: f64) -> Result<f64, CliError> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(CliError::Validation(format!("{name} must be positive, got {v}")))
    }
}

fn finite(name: &str, v: f64) -> Result<f64, CliError> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(CliError::Validation(format!("{name} must be finite, got {v}")))
    }
}

pub fn resolve_profile(args: &ProfileArgs, file: &ProfileFile) -> Result<ProfileConfig, CliError> {
    let k = positive("k", args.k.or(file.k).unwrap_or(DEFAULT_K))?;
    let sweep = args.sweep.clone().or_else(|| file.sweep.clone());
    let amplitudes = match (args.a, sweep) {
        (Some(a), _) => vec![finite("a", a)?],
        (None, Some(s)) => parse_sweep(&s)?,
        (None, None) => vec![finite("a", file.a.unwrap_or(DEFAULT_A))?],
    };
    Ok(ProfileConfig {
        amplitudes,
        k,
        n: args.n.or(file.n).unwrap_or(profile::DEFAULT_N),
        tol: positive("tol", args.tol.or(file.tol).unwrap_or(PROFILE_TOL))?,
        fit: args.fit || file.fit.unwrap_or(false),
    })
}

pub fn resolve_spectrum(args: &SpectrumArgs, file: &SpectrumFile) -> Result<SpectrumConfig, CliError> {
    let xi = args.xi.or(file.xi);
    let grid = if xi.is_some() {
        None
    } else {
        Some(args.grid.or(file.grid).unwrap_or(bloch::DEFAULT_GRID_POINTS))
    };
    Ok(SpectrumConfig {
        a: finite("a", args.a.or(file.a).unwrap_or(DEFAULT_A))?,
        k: positive("k", args.k.or(file.k).unwrap_or(DEFAULT_K))?,
        n: args.n.or(file.n).unwrap_or(bloch::DEFAULT_N),
        profile_n: profile::DEFAULT_N,
        grid,
        xi: xi.map(|x| finite("xi", x)).transpose()?,
        tol: positive("tol", args.tol.or(file.tol).unwrap_or(bloch::DEFAULT_TOL))?,
    })
}

pub fn resolve_reduced(args: &ReducedArgs, file: &ReducedFile) -> Result<ReducedConfig, CliError> {
    Ok(ReducedConfig {
        a: finite("a", args.a.or(file.a).unwrap_or(DEFAULT_A))?,
        k: positive("k", args.k.or(file.k).unwrap_or(DEFAULT_K))?,
        xi: finite("xi", args.xi.or(file.xi).unwrap_or(DEFAULT_XI))?,
        n: args.n.or(file.n).unwrap_or(bloch::DEFAULT_N),
        check_appendix: args.check_appendix || file.check_appendix.unwrap_or(false),
        regression: !args.no_regression && file.regression.unwrap_or(true),
    })
}

pub fn resolve_evolve(args: &EvolveArgs, file: &EvolveFile) -> Result<EvolveConfig, CliError> {
    let a = finite("a", args.a.or(file.a).unwrap_or(DEFAULT_A))?;
    let defaults = evolve::GrowthParams::default();
    // The default perturbation respects ε ≤ 1e-3·|a|.
    let epsilon = args
        .epsilon
        .or(file.epsilon)
        .unwrap_or_else(|| defaults.epsilon.min(evolve::MAX_RELATIVE_EPSILON * a.abs()));
    Ok(EvolveConfig {
        a,
        k: positive("k", args.k.or(file.k).unwrap_or(DEFAULT_K))?,
        n: args.n.or(file.n).unwrap_or(evolve::DEFAULT_N),
        dt: positive("dt", args.dt.or(file.dt).unwrap_or(defaults.dt))?,
        t_end: positive("T", args.t_end.or(file.t_end).unwrap_or(defaults.t_end))?,
        epsilon: finite("epsilon", epsilon)?,
        seed: args.seed.or(file.seed).unwrap_or(DEFAULT_SEED),
        record_every: positive(
            "record_every",
            args.record_every.or(file.record_every).unwrap_or(defaults.record_every),
        )?,
        dt_study: args.dt_study || file.dt_study.unwrap_or(false),
    })
}

fn resolve_output(cli: &Cli, file: &OutputFile) -> OutputConfig {
    let selected = cli.json || cli.csv || cli.svg;
    let formats = if selected {
        Formats {
            json: cli.json,
            csv: cli.csv,
            svg: cli.svg,
        }
    } else {
        Formats {
            json: file.json.unwrap_or(true),
            csv: file.csv.unwrap_or(true),
            svg: file.svg.unwrap_or(false),
        }
    };
    OutputConfig {
        dir: cli
            .out
            .clone()
            .or_else(|| file.dir.clone())
            .unwrap_or_else(|| PathBuf::from("cdgsk-out")),
        formats,
    }
}

/// Merges flags over the config file.
pub fn resolve(cli: &Cli) -> Result<RunConfig, CliError> {
    let file = match &cli.config {
        Some(p) => load_file(p)?,
        None => FileConfig::default(),
    };
    let output = resolve_output(cli, &file.output);
    let mut run = RunConfig {
        command: String::new(),
        profile: None,
        spectrum: None,
        reduced: None,
        evolve: None,
        output,
    };
    match &cli.command {
        Command::Profile(a) => {
            run.command = "profile".into();
            run.profile = Some(resolve_profile(a, &file.profile)?);
        }
        Command::Spectrum(a) => {
            run.command = "spectrum".into();
            run.spectrum = Some(resolve_spectrum(a, &file.spectrum)?);
        }
        Command::Reduced(a) => {
            run.command = "reduced".into();
            run.reduced = Some(resolve_reduced(a, &file.reduced)?);
        }
        Command::Evolve(a) => {
            run.command = "evolve".into();
            run.evolve = Some(resolve_evolve(a, &file.evolve)?);
        }
        Command::All(all) => {
            run.command = "all".into();
            let p = ProfileArgs {
                a: all.a,
                k: all.k,
                ..Default::default()
            };
            let s = SpectrumArgs {
                a: all.a,
                k: all.k,
                ..Default::default()
            };
            let r = ReducedArgs {
                a: all.a,
                k: all.k,
                ..Default::default()
            };
            let e = EvolveArgs {
                a: all.a,
                k: all.k,
                seed: all.seed,
                ..Default::default()
            };
            run.profile = Some(resolve_profile(&p, &file.profile)?);
            run.spectrum = Some(resolve_spectrum(&s, &file.spectrum)?);
            run.reduced = Some(resolve_reduced(&r, &file.reduced)?);
            run.evolve = Some(resolve_evolve(&e, &file.evolve)?);
        }
    }
    Ok(run)
}

/// Regression scales used by the reduced command.
pub fn regression_scales() -> Vec<f64> {
    reduced::REGRESSION_SCALES.to_vec()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sweep_parsing() {
        assert_eq!(parse_sweep("0.001:0.004:4").unwrap().len(), 4);
        let v = parse_sweep("0:1:3").unwrap();
        assert_eq!(v, vec![0.0, 0.5, 1.0]);
        assert!(parse_sweep("0:1").is_err());
        assert!(parse_sweep("a:1:3").is_err());
        assert!(parse_sweep("0:1:0").is_err());
    }

    #[test]
    fn flags_win_over_file() {
        let file: FileConfig = toml::from_str("[spectrum]\na = 0.05\nk = 2.0\ngrid = 11\n").unwrap();
        let args = SpectrumArgs {
            a: Some(0.01),
            ..Default::default()
        };
        let r = resolve_spectrum(&args, &file.spectrum).unwrap();
        assert_eq!((r.a, r.k, r.grid), (0.01, 2.0, Some(11)));
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(toml::from_str::<FileConfig>("[spectrum]\nfoo = 1\n").is_err());
    }

    #[test]
    fn default_epsilon_respects_amplitude() {
        let r = resolve_evolve(&EvolveArgs::default(), &EvolveFile::default()).unwrap();
        assert!(r.epsilon <= evolve::MAX_RELATIVE_EPSILON * r.a);
        let flat = EvolveArgs {
            a: Some(0.0),
            ..Default::default()
        };
        assert_eq!(resolve_evolve(&flat, &EvolveFile::default()).unwrap().epsilon, 0.0);
    }
}
