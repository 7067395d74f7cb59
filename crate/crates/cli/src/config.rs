//! Run configuration: command-line flags layered over an optional JSON file.

use std::f64::consts::FRAC_PI_2;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use inclined_casimir::engine::Numerics;
use inclined_casimir::{Field, Regime};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

/// Smallest axis separation the figure commands accept, in units of `R`.
pub const FIGURE_MIN_D: f64 = 2.22;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// `scaled`: distances as `r = R/d`, energies in `hbar c / R`.
/// `raw`: distances as `d`, energies multiplied by `d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Units {
    #[default]
    Scaled,
    Raw,
}

/// Every knob that can come from a flag or from the JSON config file.
/// Unset flags fall back to the file, then to the defaults in [`RunConfig`].
#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Overrides {
    /// JSON config file with any of the options below (snake_case keys).
    #[arg(long, global = true)]
    #[serde(skip)]
    pub config: Option<PathBuf>,

    /// Output file; stdout when omitted. A `<output>.meta.json` sidecar is
    /// written next to it.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,

    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    #[arg(long, global = true, value_enum)]
    pub units: Option<Units>,

    /// dirichlet, neumann or em.
    #[arg(long, global = true)]
    pub field: Option<Field>,

    /// zero_t, classical or finite_t.
    #[arg(long, global = true)]
    pub regime: Option<Regime>,

    /// Axis-to-axis distance.
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub d: Option<f64>,

    /// Inclination in radians.
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub theta: Option<f64>,

    #[arg(long, global = true, allow_negative_numbers = true)]
    pub r1: Option<f64>,

    /// Defaults to `r1`.
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub r2: Option<f64>,

    /// Temperature in units of `hbar c / (k_B R1)`, for `finite_t`.
    #[arg(long, global = true)]
    pub temperature: Option<f64>,

    #[arg(long, global = true)]
    pub matsubara_terms: Option<usize>,

    #[arg(long, global = true)]
    pub n_max: Option<u32>,

    #[arg(long, global = true)]
    pub n_k: Option<usize>,

    #[arg(long, global = true)]
    pub n_kappa: Option<usize>,

    /// Relative tolerance of the refinement loop.
    #[arg(long, global = true)]
    pub tol: Option<f64>,

    /// Double the discretization until the energy changes by less than `tol`.
    #[arg(long, global = true, num_args = 0..=1, default_missing_value = "true")]
    pub refine: Option<bool>,

    /// Upper bound on refinement steps.
    #[arg(long, global = true)]
    pub max_doublings: Option<u32>,

    /// Comma-separated list of `r = R/d` values.
    #[arg(
        long,
        global = true,
        value_delimiter = ',',
        allow_negative_numbers = true
    )]
    pub r: Option<Vec<f64>>,

    #[arg(long, global = true)]
    pub r_min: Option<f64>,

    #[arg(long, global = true)]
    pub r_max: Option<f64>,

    /// Comma-separated list of inclinations in radians.
    #[arg(
        long,
        global = true,
        value_delimiter = ',',
        allow_negative_numbers = true
    )]
    pub thetas: Option<Vec<f64>>,

    /// Number of grid points for sweeps without an explicit list.
    #[arg(long, global = true)]
    pub points: Option<usize>,

    /// Sweep points evaluated concurrently. Each point already spreads its
    /// frequency nodes over all cores.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
}

macro_rules! layer {
    ($top:expr, $bottom:expr, $($f:ident),*) => {
        Overrides { config: $top.config, $($f: $top.$f.or($bottom.$f)),* }
    };
}

impl Overrides {
    /// Values in `self` win over values in `file`.
    pub fn over(self, file: Overrides) -> Overrides {
        layer!(
            self,
            file,
            output,
            format,
            units,
            field,
            regime,
            d,
            theta,
            r1,
            r2,
            temperature,
            matsubara_terms,
            n_max,
            n_k,
            n_kappa,
            tol,
            refine,
            max_doublings,
            r,
            r_min,
            r_max,
            thetas,
            points,
            jobs
        )
    }

    pub fn from_file(path: &Path) -> Result<Overrides> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        serde_json::from_str(&text).map_err(|source| CliError::ConfigParse {
            path: path.to_path_buf(),
            source,
        })
    }
}

/// Fully resolved configuration; also recorded in the metadata sidecar.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub field: Field,
    pub regime: Regime,
    pub d: Option<f64>,
    pub theta: f64,
    pub r1: f64,
    pub r2: f64,
    pub temperature: Option<f64>,
    pub matsubara_terms: usize,
    pub numerics: Numerics,
    pub r: Option<Vec<f64>>,
    pub r_min: f64,
    pub r_max: f64,
    pub thetas: Option<Vec<f64>>,
    pub points: Option<usize>,
    pub format: Format,
    pub units: Units,
    pub output: Option<PathBuf>,
    pub jobs: usize,
}

impl RunConfig {
    /// Reads the config file named in `flags`, layers the flags on top and
    /// fills in defaults.
    pub fn resolve(flags: Overrides) -> Result<RunConfig> {
        let merged = match &flags.config {
            Some(path) => {
                let file = Overrides::from_file(path)?;
                flags.over(file)
            }
            None => flags,
        };
        let defaults = Numerics::default();
        let r1 = merged.r1.unwrap_or(1.0);
        let numerics = Numerics {
            n_max: merged.n_max.unwrap_or(defaults.n_max),
            n_k: merged.n_k.unwrap_or(defaults.n_k),
            n_kappa: merged.n_kappa.unwrap_or(defaults.n_kappa),
            rel_tol: merged.tol.unwrap_or(defaults.rel_tol),
            refine: merged.refine.unwrap_or(false),
            max_doublings: merged.max_doublings.unwrap_or(defaults.max_doublings),
            ..defaults
        };
        let cfg = RunConfig {
            field: merged.field.unwrap_or(Field::Em),
            regime: merged.regime.unwrap_or(Regime::ZeroT),
            d: merged.d,
            theta: merged.theta.unwrap_or(FRAC_PI_2),
            r1,
            r2: merged.r2.unwrap_or(r1),
            temperature: merged.temperature,
            matsubara_terms: merged.matsubara_terms.unwrap_or(1000),
            numerics,
            r: merged.r,
            r_min: merged.r_min.unwrap_or(0.05),
            r_max: merged.r_max.unwrap_or(0.45),
            thetas: merged.thetas,
            points: merged.points,
            format: merged.format.unwrap_or_default(),
            units: merged.units.unwrap_or_default(),
            output: merged.output,
            jobs: merged.jobs.unwrap_or(1),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(CliError::usage(format!("{name} must be positive, got {v}")))
            }
        };
        positive("r1", self.r1)?;
        positive("r2", self.r2)?;
        positive("r_min", self.r_min)?;
        positive("r_max", self.r_max)?;
        if let Some(d) = self.d {
            positive("d", d)?;
        }
        if let Some(t) = self.temperature {
            positive("temperature", t)?;
        }
        if self.r_min > self.r_max {
            return Err(CliError::usage(format!(
                "r_min {} exceeds r_max {}",
                self.r_min, self.r_max
            )));
        }
        if self.numerics.n_kappa == 0
            || self.matsubara_terms == 0
            || self.jobs == 0
            || self.points == Some(0)
        {
            return Err(CliError::usage(
                "n_kappa, matsubara_terms, jobs and points must be positive",
            ));
        }
        self.numerics.validate()?;
        Ok(())
    }

    pub fn require_d(&self) -> Result<f64> {
        self.d
            .ok_or_else(|| CliError::usage("this command needs --d"))
    }

    pub fn equal_radii(&self) -> Result<f64> {
        if self.r1 != self.r2 {
            return Err(CliError::usage(
                "sweeps and proximity-force estimates need equal radii",
            ));
        }
        Ok(self.r1)
    }
}
