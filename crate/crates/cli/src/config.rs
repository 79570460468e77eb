//! Command-line surface and the serialisable run configuration it resolves to.

use std::fmt;
use std::path::PathBuf;

use casimir_core::continuum::ADOPTED_Y_MIN;
use casimir_core::quadrature::QuadratureSpec;
use casimir_core::spectral::{Tail, DEFAULT_LOG_VALUE, DEFAULT_N_MAX, DEFAULT_N_MAX_POLARIZABILITY};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

/// Largest n_max accepted on the command line.
pub const N_MAX_LIMIT: u32 = 5000;

#[derive(Debug, Parser)]
#[command(
    name = "casimir-lab",
    version,
    about = "Vacuum correction to the Abraham momentum of hydrogen"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Option<Command>,

    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    /// Write the report here instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    pub output: Option<PathBuf>,

    /// Print the effective run configuration as JSON and exit.
    #[arg(long, global = true)]
    pub config_dump: bool,

    /// Run a configuration previously written by --config-dump.
    #[arg(long, global = true, value_name = "PATH", conflicts_with = "config_dump")]
    pub config_load: Option<PathBuf>,

    /// Record wall-clock time in the report (makes output non-reproducible).
    #[arg(long, global = true)]
    pub timing: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Text,
}

/// Fully resolved parameters of one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: Command,
    pub format: Format,
    pub output: Option<PathBuf>,
    pub timing: bool,
}

#[derive(Debug, Clone, PartialEq, Subcommand, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "kebab-case")]
pub enum Command {
    /// Discrete and continuum κ₁, κ₂ and their totals.
    Kappas(KappasArgs),
    /// Bound-state polarizability and oscillator-strength sums.
    Polarizability(PolarizabilityArgs),
    /// Bethe-type sum S_B and the α³ normalisation coefficient.
    Bethe(BetheArgs),
    /// Continuum integrals over a grid of lower cutoffs.
    Continuum(ContinuumArgs),
    /// Electromagnetic mass shift and reduced-mass renormalisation.
    Renorm(RenormArgs),
    /// Cutoff-regularised vacuum mass density of a dielectric.
    RhoC(RhoCArgs),
    /// Itemised pseudo-momentum budget for given fields.
    Budget(BudgetArgs),
    /// Oracle and invariant checks with a pass/fail table.
    Verify(VerifyArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Kappas(_) => "kappas",
            Command::Polarizability(_) => "polarizability",
            Command::Bethe(_) => "bethe",
            Command::Continuum(_) => "continuum",
            Command::Renorm(_) => "renorm",
            Command::RhoC(_) => "rho-c",
            Command::Budget(_) => "budget",
            Command::Verify(_) => "verify",
        }
    }
}

fn parse_tail(s: &str) -> Result<Tail, String> {
    s.parse()
}

fn parse_triple(s: &str) -> Result<[f64; 3], String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(format!("expected three comma-separated numbers, got '{s}'"));
    }
    let mut out = [0.0; 3];
    for (slot, p) in out.iter_mut().zip(&parts) {
        *slot = p.parse().map_err(|_| format!("'{p}' is not a number"))?;
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Args, Serialize, Deserialize)]
pub struct QuadratureArgs {
    #[arg(long, default_value_t = QuadratureSpec::default().rel_tol)]
    pub rel_tol: f64,
    #[arg(long, default_value_t = QuadratureSpec::default().abs_tol)]
    pub abs_tol: f64,
    #[arg(long, default_value_t = QuadratureSpec::default().max_subdivisions)]
    pub max_subdivisions: usize,
    #[arg(long, default_value_t = QuadratureSpec::default().upper_cut)]
    pub upper_cut: f64,
}

impl QuadratureArgs {
    pub fn spec(&self) -> QuadratureSpec {
        QuadratureSpec {
            abs_tol: self.abs_tol,
            rel_tol: self.rel_tol,
            max_subdivisions: self.max_subdivisions,
            upper_cut: self.upper_cut,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct KappasArgs {
    #[arg(long, default_value_t = DEFAULT_N_MAX)]
    pub n_max: u32,
    /// Tail extrapolation: on or off.
    #[arg(long, default_value = "on", value_parser = parse_tail)]
    pub tail: Tail,
    /// Lower cutoff y_min = q·a₀ of the continuum integrals.
    #[arg(long, default_value_t = ADOPTED_Y_MIN)]
    pub ymin: f64,
    /// Include the full partial-sum trace.
    #[arg(long)]
    pub trace: bool,
    #[command(flatten)]
    pub quadrature: QuadratureArgs,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct PolarizabilityArgs {
    #[arg(long, default_value_t = DEFAULT_N_MAX_POLARIZABILITY)]
    pub n_max: u32,
    #[arg(long, default_value = "on", value_parser = parse_tail)]
    pub tail: Tail,
    #[arg(long)]
    pub trace: bool,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct BetheArgs {
    #[arg(long, default_value_t = DEFAULT_N_MAX)]
    pub n_max: u32,
    #[arg(long, default_value = "on", value_parser = parse_tail)]
    pub tail: Tail,
    /// Bethe logarithm entering the normalisation coefficient.
    #[arg(long, default_value_t = DEFAULT_LOG_VALUE, allow_negative_numbers = true)]
    pub log_value: f64,
    #[arg(long)]
    pub trace: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KappaChoice {
    Kappa1,
    Kappa2,
    Both,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct ContinuumArgs {
    #[arg(long, value_enum, default_value_t = KappaChoice::Both)]
    pub kappa: KappaChoice,
    /// Ascending lower cutoffs, comma-separated.
    #[arg(long, value_delimiter = ',', default_values_t = vec![0.0, 0.5, 1.0, 2.0])]
    pub ymin_grid: Vec<f64>,
    #[command(flatten)]
    pub quadrature: QuadratureArgs,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct RenormArgs {
    /// Particle mass in electron masses.
    #[arg(long, default_value_t = 1.0)]
    pub mass: f64,
    /// Geometric grid of cutoffs ħΛ/(m c₀), comma-separated.
    #[arg(long, value_delimiter = ',', default_values_t = vec![1e4, 2e4, 4e4, 8e4, 1.6e5, 3.2e5])]
    pub cutoffs: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelChoice {
    Dispersionless,
    FreeElectron,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct RhoCArgs {
    #[arg(long, value_enum, default_value_t = ModelChoice::FreeElectron)]
    pub model: ModelChoice,
    /// Relative permittivity for the dispersionless model.
    #[arg(long, default_value_t = 1.77)]
    pub epsilon_r: f64,
    /// Electron density in m⁻³ for the free-electron model.
    #[arg(long, default_value_t = 3.3e29)]
    pub n_e: f64,
    /// Shortest length in m (ω_max = π c₀ / l_min); defaults to the classical electron radius.
    #[arg(long, conflicts_with = "omega_max")]
    pub l_min: Option<f64>,
    /// Frequency cutoff in rad/s.
    #[arg(long)]
    pub omega_max: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PolarizabilityArg {
    Exact,
    ComputedDiscrete,
    RelativisticCorrected,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct BudgetArgs {
    /// Electric field in V/m, as x,y,z.
    #[arg(long = "E0", alias = "e0", value_parser = parse_triple, default_value = "0,0,0", allow_negative_numbers = true)]
    pub e0: [f64; 3],
    /// Magnetic field in T, as x,y,z.
    #[arg(long = "B0", alias = "b0", value_parser = parse_triple, default_value = "0,0,0", allow_negative_numbers = true)]
    pub b0: [f64; 3],
    /// Pseudo-momentum in kg·m/s, as x,y,z.
    #[arg(long = "Q0", alias = "q0", value_parser = parse_triple, default_value = "0,0,0", allow_negative_numbers = true)]
    pub q0: [f64; 3],
    #[arg(long, default_value_t = 0.22)]
    pub kappa1: f64,
    #[arg(long, default_value_t = 0.0976)]
    pub kappa2: f64,
    #[arg(long, value_enum, default_value_t = PolarizabilityArg::Exact)]
    pub polarizability: PolarizabilityArg,
    /// Truncation used when the polarizability is computed.
    #[arg(long, default_value_t = DEFAULT_N_MAX_POLARIZABILITY)]
    pub n_max: u32,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct VerifyArgs {}

/// A user-supplied value outside its allowed range (exit code 2).
#[derive(Debug)]
pub struct ValidationError(pub String);

impl fmt::Display for ValidationError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ValidationError {}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), ValidationError> {
    if ok {
        Ok(())
    } else {
        Err(ValidationError(msg()))
    }
}

fn positive(name: &str, v: f64) -> Result<(), ValidationError> {
    ensure(v > 0.0 && v.is_finite(), || {
        format!("--{name} must be positive and finite, got {v}")
    })
}

fn n_max(v: u32) -> Result<(), ValidationError> {
    ensure((2..=N_MAX_LIMIT).contains(&v), || {
        format!("--n-max must be between 2 and {N_MAX_LIMIT}, got {v}")
    })
}

impl QuadratureArgs {
    fn validate(&self) -> Result<(), ValidationError> {
        positive("rel-tol", self.rel_tol)?;
        positive("abs-tol", self.abs_tol)?;
        positive("upper-cut", self.upper_cut)?;
        ensure(self.max_subdivisions > 0, || {
            "--max-subdivisions must be at least 1".into()
        })
    }
}

impl Command {
    pub fn validate(&self) -> Result<(), ValidationError> {
        match self {
            Command::Kappas(a) => {
                n_max(a.n_max)?;
                ensure(a.ymin >= 0.0 && a.ymin.is_finite(), || {
                    format!("--ymin must be non-negative, got {}", a.ymin)
                })?;
                a.quadrature.validate()
            }
            Command::Polarizability(a) => n_max(a.n_max),
            Command::Bethe(a) => {
                n_max(a.n_max)?;
                ensure(a.log_value.is_finite(), || "--log-value must be finite".into())
            }
            Command::Continuum(a) => {
                ensure(!a.ymin_grid.is_empty(), || "--ymin-grid must not be empty".into())?;
                ensure(a.ymin_grid.iter().all(|y| *y >= 0.0 && y.is_finite()), || {
                    "--ymin-grid values must be non-negative".into()
                })?;
                ensure(a.ymin_grid.windows(2).all(|w| w[0] < w[1]), || {
                    "--ymin-grid must be strictly ascending".into()
                })?;
                a.quadrature.validate()
            }
            Command::Renorm(a) => {
                positive("mass", a.mass)?;
                ensure(a.cutoffs.len() >= 4, || "--cutoffs needs at least 4 values".into())?;
                a.cutoffs.iter().try_for_each(|&c| positive("cutoffs", c))
            }
            Command::RhoC(a) => {
                match a.model {
                    ModelChoice::Dispersionless => ensure(a.epsilon_r > 1.0 && a.epsilon_r.is_finite(), || {
                        format!("--epsilon-r must exceed 1, got {}", a.epsilon_r)
                    })?,
                    ModelChoice::FreeElectron => positive("n-e", a.n_e)?,
                }
                if let Some(l) = a.l_min {
                    positive("l-min", l)?;
                }
                if let Some(w) = a.omega_max {
                    positive("omega-max", w)?;
                }
                Ok(())
            }
            Command::Budget(a) => {
                for (name, v) in [("E0", a.e0), ("B0", a.b0), ("Q0", a.q0)] {
                    ensure(v.iter().all(|c| c.is_finite()), || format!("--{name} must be finite"))?;
                }
                ensure(a.kappa1.is_finite() && a.kappa2.is_finite(), || {
                    "kappas must be finite".into()
                })?;
                n_max(a.n_max)
            }
            Command::Verify(_) => Ok(()),
        }
    }
}
