use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use torus_ns::galerkin::{Scheme, SolverConfig};

use crate::error::{CliError, Result};

#[derive(Debug, Parser)]
#[command(name = "torus-ns", version, about = "Fourier-Galerkin Navier-Stokes runs and a-priori estimate certificates on the 3-torus")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Unforced decay of a single shear mode, checked against the heat solution.
    Decay(Options),
    /// Manufactured smooth solution; `--dt-study N` runs a temporal convergence study.
    Manufactured(Options),
    /// Taylor-Green vortex initial data.
    #[command(name = "taylor_green", alias = "taylor-green")]
    TaylorGreen(Options),
    /// Galerkin system linearised around a drift `w`.
    Linearized(Options),
    /// Certificates and norms for a stored trajectory.
    Certify(Options),
    /// Invariant suite with a pass/fail table.
    Selftest(Options),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Decay(_) => "decay",
            Command::Manufactured(_) => "manufactured",
            Command::TaylorGreen(_) => "taylor_green",
            Command::Linearized(_) => "linearized",
            Command::Certify(_) => "certify",
            Command::Selftest(_) => "selftest",
        }
    }

    pub fn options(&self) -> &Options {
        match self {
            Command::Decay(o)
            | Command::Manufactured(o)
            | Command::TaylorGreen(o)
            | Command::Linearized(o)
            | Command::Certify(o)
            | Command::Selftest(o) => o,
        }
    }
}

fn parse_pair<A: std::str::FromStr, B: std::str::FromStr>(s: &str) -> std::result::Result<(A, B), String> {
    let (a, b) = s.split_once(',').ok_or_else(|| format!("expected two comma-separated values, got `{s}`"))?;
    let a = a.trim().parse().map_err(|_| format!("cannot parse `{a}`"))?;
    let b = b.trim().parse().map_err(|_| format!("cannot parse `{b}`"))?;
    Ok((a, b))
}

fn lps_pair(s: &str) -> std::result::Result<(f64, f64), String> {
    parse_pair(s)
}

fn bochner_pair(s: &str) -> std::result::Result<(u32, u32), String> {
    parse_pair(s)
}

/// Flags shared by every subcommand. Unset flags fall back to the `--config` file, then to
/// built-in defaults.
#[derive(Debug, Clone, Default, Args)]
pub struct Options {
    /// Viscosity μ.
    #[arg(long)]
    pub mu: Option<f64>,
    /// Time horizon T.
    #[arg(long = "T")]
    pub horizon: Option<f64>,
    /// Time step.
    #[arg(long)]
    pub dt: Option<f64>,
    /// Shell cutoff M: modes with (k,k) <= M.
    #[arg(long = "M")]
    pub cutoff: Option<u32>,
    /// Period ℓ of the torus.
    #[arg(long)]
    pub ell: Option<f64>,
    /// if_rk4 or imex_euler.
    #[arg(long)]
    pub scheme: Option<Scheme>,
    /// Points per axis for products and norms (power of two).
    #[arg(long)]
    pub grid: Option<usize>,
    /// Directory for output files; TORUS_NS_OUT overrides it.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    /// LPS pair `s,r` to evaluate (repeatable); the first one feeds the CSV column.
    #[arg(long, value_parser = lps_pair)]
    pub lps: Vec<(f64, f64)>,
    /// Reject LPS pairs outside the admissible family.
    #[arg(long)]
    pub admissible_only: bool,
    /// Bochner scale norm `k,s` to evaluate (repeatable).
    #[arg(long, value_parser = bochner_pair)]
    pub bochner: Vec<(u32, u32)>,
    /// Worker threads for convergence studies.
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Flat `key = value` file; flags given on the command line win.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Number of step sizes in a temporal convergence study, halving from `--dt`.
    #[arg(long)]
    pub dt_study: Option<usize>,
    /// Store every n-th step.
    #[arg(long)]
    pub stride: Option<usize>,
    /// Rerun with half the step and report the error estimate.
    #[arg(long)]
    pub step_halving: bool,
    /// Reject the run if the step-halving estimate exceeds this value.
    #[arg(long)]
    pub tolerance: Option<f64>,
    /// Amplitude of the built-in initial data.
    #[arg(long)]
    pub amplitude: Option<f64>,
    /// Angular frequency of the manufactured time factors.
    #[arg(long)]
    pub omega: Option<f64>,
    /// Trajectory file to certify.
    #[arg(long)]
    pub traj: Option<PathBuf>,
    /// Field file holding a time-independent forcing.
    #[arg(long)]
    pub f: Option<PathBuf>,
    /// Field file holding the initial velocity.
    #[arg(long)]
    pub u0: Option<PathBuf>,
    /// Field or trajectory file holding the drift of the linearised problem.
    #[arg(long)]
    pub w: Option<PathBuf>,
    /// Basis dump to check (selftest).
    #[arg(long)]
    pub basis: Option<PathBuf>,
    /// Write the basis at the cutoff to this file (selftest).
    #[arg(long)]
    pub dump_basis: Option<PathBuf>,
}

fn value<T: std::str::FromStr>(key: &str, raw: &str, line: usize) -> Result<T> {
    raw.parse().map_err(|_| CliError::Config(format!("config line {line}: bad value `{raw}` for `{key}`")))
}

fn flag(key: &str, raw: &str, line: usize) -> Result<bool> {
    match raw {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(CliError::Config(format!("config line {line}: `{key}` expects true or false"))),
    }
}

impl Options {
    /// Reads a flat `key = value` file; `#` starts a comment, list keys may repeat.
    pub fn from_config_text(text: &str) -> Result<Options> {
        let mut o = Options::default();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap().trim();
            if content.is_empty() {
                continue;
            }
            let (key, val) = content
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("config line {line}: expected `key = value`")))?;
            let (key, val) = (key.trim(), val.trim());
            match key {
                "mu" => o.mu = Some(value(key, val, line)?),
                "T" | "horizon" => o.horizon = Some(value(key, val, line)?),
                "dt" => o.dt = Some(value(key, val, line)?),
                "M" | "cutoff" => o.cutoff = Some(value(key, val, line)?),
                "ell" => o.ell = Some(value(key, val, line)?),
                "scheme" => o.scheme = Some(value(key, val, line)?),
                "grid" => o.grid = Some(value(key, val, line)?),
                "out_dir" => o.out_dir = Some(PathBuf::from(val)),
                "lps" => o.lps.push(lps_pair(val).map_err(|e| CliError::Config(format!("config line {line}: {e}")))?),
                "admissible_only" => o.admissible_only = flag(key, val, line)?,
                "bochner" => {
                    o.bochner.push(bochner_pair(val).map_err(|e| CliError::Config(format!("config line {line}: {e}")))?)
                }
                "jobs" => o.jobs = Some(value(key, val, line)?),
                "dt_study" => o.dt_study = Some(value(key, val, line)?),
                "stride" => o.stride = Some(value(key, val, line)?),
                "step_halving" => o.step_halving = flag(key, val, line)?,
                "tolerance" => o.tolerance = Some(value(key, val, line)?),
                "amplitude" => o.amplitude = Some(value(key, val, line)?),
                "omega" => o.omega = Some(value(key, val, line)?),
                "traj" => o.traj = Some(PathBuf::from(val)),
                "f" => o.f = Some(PathBuf::from(val)),
                "u0" => o.u0 = Some(PathBuf::from(val)),
                "w" => o.w = Some(PathBuf::from(val)),
                "basis" => o.basis = Some(PathBuf::from(val)),
                "dump_basis" => o.dump_basis = Some(PathBuf::from(val)),
                other => return Err(CliError::Config(format!("config line {line}: unknown key `{other}`"))),
            }
        }
        Ok(o)
    }

    /// Fills every unset field from `fallback`.
    pub fn or(self, fallback: Options) -> Options {
        Options {
            mu: self.mu.or(fallback.mu),
            horizon: self.horizon.or(fallback.horizon),
            dt: self.dt.or(fallback.dt),
            cutoff: self.cutoff.or(fallback.cutoff),
            ell: self.ell.or(fallback.ell),
            scheme: self.scheme.or(fallback.scheme),
            grid: self.grid.or(fallback.grid),
            out_dir: self.out_dir.or(fallback.out_dir),
            lps: if self.lps.is_empty() { fallback.lps } else { self.lps },
            admissible_only: self.admissible_only || fallback.admissible_only,
            bochner: if self.bochner.is_empty() { fallback.bochner } else { self.bochner },
            jobs: self.jobs.or(fallback.jobs),
            config: self.config,
            dt_study: self.dt_study.or(fallback.dt_study),
            stride: self.stride.or(fallback.stride),
            step_halving: self.step_halving || fallback.step_halving,
            tolerance: self.tolerance.or(fallback.tolerance),
            amplitude: self.amplitude.or(fallback.amplitude),
            omega: self.omega.or(fallback.omega),
            traj: self.traj.or(fallback.traj),
            f: self.f.or(fallback.f),
            u0: self.u0.or(fallback.u0),
            w: self.w.or(fallback.w),
            basis: self.basis.or(fallback.basis),
            dump_basis: self.dump_basis.or(fallback.dump_basis),
        }
    }
}

/// Fully resolved run settings.
#[derive(Debug, Clone)]
pub struct Settings {
    pub mu: f64,
    pub horizon: f64,
    pub dt: f64,
    pub cutoff: u32,
    pub ell: f64,
    pub scheme: Scheme,
    pub grid: Option<usize>,
    pub out_dir: PathBuf,
    pub lps: Vec<(f64, f64)>,
    pub admissible_only: bool,
    pub bochner: Vec<(u32, u32)>,
    pub jobs: Option<usize>,
    pub dt_study: Option<usize>,
    pub stride: usize,
    pub step_halving: bool,
    pub tolerance: Option<f64>,
    pub amplitude: f64,
    pub omega: f64,
    pub traj: Option<PathBuf>,
    pub f: Option<PathBuf>,
    pub u0: Option<PathBuf>,
    pub w: Option<PathBuf>,
    pub basis: Option<PathBuf>,
    pub dump_basis: Option<PathBuf>,
}

impl Settings {
    /// Merges flags, the optional config file, `TORUS_NS_OUT` and the defaults.
    pub fn resolve(flags: &Options, env_out: Option<PathBuf>) -> Result<Settings> {
        let file = match &flags.config {
            Some(path) => Options::from_config_text(&read_text(path)?)?,
            None => Options::default(),
        };
        let o = flags.clone().or(file);
        let study = o.dt_study.is_some();
        let s = Settings {
            mu: o.mu.unwrap_or(0.1),
            horizon: o.horizon.unwrap_or(1.0),
            dt: o.dt.unwrap_or(if study { 4e-3 } else { 1e-3 }),
            cutoff: o.cutoff.unwrap_or(4),
            ell: o.ell.unwrap_or(2.0 * PI),
            scheme: o.scheme.unwrap_or(Scheme::IfRk4),
            grid: o.grid,
            out_dir: env_out.or(o.out_dir).unwrap_or_else(|| PathBuf::from("out")),
            lps: o.lps,
            admissible_only: o.admissible_only,
            bochner: o.bochner,
            jobs: o.jobs,
            dt_study: o.dt_study,
            stride: o.stride.unwrap_or(1),
            step_halving: o.step_halving,
            tolerance: o.tolerance,
            amplitude: o.amplitude.unwrap_or(1.0),
            omega: o.omega.unwrap_or(8.0),
            traj: o.traj,
            f: o.f,
            u0: o.u0,
            w: o.w,
            basis: o.basis,
            dump_basis: o.dump_basis,
        };
        s.check()?;
        Ok(s)
    }

    fn check(&self) -> Result<()> {
        let bad = |m: String| Err(CliError::Config(m));
        if !(self.mu > 0.0 && self.mu.is_finite()) {
            return bad(format!("mu must be positive, got {}", self.mu));
        }
        if !(self.ell > 0.0 && self.ell.is_finite()) {
            return bad(format!("ell must be positive, got {}", self.ell));
        }
        if self.jobs == Some(0) {
            return bad("jobs must be at least 1".into());
        }
        if self.dt_study.is_some_and(|n| n < 2) {
            return bad("a convergence study needs at least two step sizes".into());
        }
        if self.admissible_only {
            if let Some(&(s, r)) = self.lps.iter().find(|(s, r)| !torus_ns::estimates::lps_admissible(*s, *r)) {
                return bad(format!("LPS pair ({s}, {r}) is not admissible"));
            }
        }
        Ok(())
    }

    pub fn solver_config(&self) -> Result<SolverConfig> {
        self.solver_config_with_dt(self.dt)
    }

    pub fn solver_config_with_dt(&self, dt: f64) -> Result<SolverConfig> {
        let mut cfg = SolverConfig::new(self.mu, self.horizon, self.cutoff, dt).with_scheme(self.scheme);
        cfg.grid = self.grid;
        cfg.sample_stride = self.stride;
        cfg.step_halving = self.step_halving;
        cfg.tolerance = self.tolerance;
        cfg.validate().map_err(|e| CliError::Config(e.to_string()))?;
        Ok(cfg)
    }

    /// Grid for `L^p` norms.
    pub fn norm_grid(&self) -> usize {
        self.grid.unwrap_or_else(|| torus_ns::spectral::dealias_grid(self.cutoff).max(16))
    }
}

pub fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.display().to_string(), source })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_file_fills_unset_flags() {
        let file = Options::from_config_text("mu = 0.2 # viscosity\nT=0.5\nlps = 4,6\nlps=8,4\nscheme = imex_euler\n").unwrap();
        let flags = Options { mu: Some(0.3), ..Options::default() };
        let merged = flags.or(file);
        assert_eq!(merged.mu, Some(0.3));
        assert_eq!(merged.horizon, Some(0.5));
        assert_eq!(merged.lps, vec![(4.0, 6.0), (8.0, 4.0)]);
        assert_eq!(merged.scheme, Some(Scheme::ImexEuler));
    }

    #[test]
    fn config_errors_name_the_line() {
        let e = Options::from_config_text("mu = 0.1\nbogus = 3\n").unwrap_err();
        assert!(e.to_string().contains("line 2"));
        assert_eq!(e.exit_code(), 2);
        assert!(Options::from_config_text("mu 0.1\n").is_err());
    }

    #[test]
    fn env_override_and_defaults() {
        let s = Settings::resolve(&Options::default(), Some(PathBuf::from("/tmp/x"))).unwrap();
        assert_eq!(s.out_dir, PathBuf::from("/tmp/x"));
        assert_eq!((s.mu, s.cutoff, s.dt), (0.1, 4, 1e-3));
        let study = Options { dt_study: Some(3), ..Options::default() };
        assert_eq!(Settings::resolve(&study, None).unwrap().dt, 4e-3);
        let bad = Options { lps: vec![(2.0, 6.0)], admissible_only: true, ..Options::default() };
        assert!(Settings::resolve(&bad, None).is_err());
    }
}
