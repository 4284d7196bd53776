//! `nucmem`: experiment runner for the boson-spin memory model.
//!
//! Each subcommand reads an optional JSON config (`--config`), applies flag
//! overrides, and writes CSV/JSON artifacts plus `manifest.json` into the
//! output directory. Exit status: 0 on success, 2 on invalid input, 3 when
//! a size cap is hit, 1 otherwise.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::config::{Experiment, RunConfig};
use crate::error::CliError;

#[derive(Parser, Debug)]
#[command(name = "nucmem", version, about = "Nuclear-ensemble quantum memory experiments")]
struct Cli {
    /// JSON run configuration; flags override its fields.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory. Relative paths resolve under $NUCMEM_OUTPUT_ROOT.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a coupling profile and its homogeneity report.
    Couplings(SystemArgs),
    /// Orthonormal mode family and the mirrored permutation mode.
    Modes(SystemArgs),
    /// Exact and effective spectra of the exchange term on V_n.
    Spectrum(SpectrumArgs),
    /// Write protocol, exact write at t = pi/(2 Omega) and the excited-memory sweep.
    Storage(StorageArgs),
    /// Thermal decoherence surface D(x, gt).
    Decoherence(DecoherenceArgs),
    /// Run the invariant suite and report pass/fail per property.
    Verify(VerifyArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProfileChoice {
    Homogeneous,
    Gaussian,
    Uniform,
    #[value(alias = "preset_counterexample_1")]
    Counterexample1,
    #[value(alias = "preset_counterexample_2")]
    Counterexample2,
}

#[derive(Args, Debug, Default, Clone)]
pub struct SystemArgs {
    /// Number of nuclear spins.
    #[arg(long = "N")]
    pub n_sites: Option<usize>,
    /// Nuclear spin I0, a positive half-integer.
    #[arg(long = "I0")]
    pub spin: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Nuclear Zeeman frequency.
    #[arg(long = "omega-z")]
    pub omega_z: Option<f64>,
    /// Electron Zeeman frequency; omitted means tuned to resonance.
    #[arg(long = "Omega-z")]
    pub big_omega_z: Option<f64>,
    /// Coupling profile family.
    #[arg(long, visible_alias = "preset", value_enum)]
    pub profile: Option<ProfileChoice>,
    /// Coupling strength (homogeneous, presets) or gaussian amplitude.
    #[arg(long)]
    pub g: Option<f64>,
    /// Gaussian width in sites; defaults to N.
    #[arg(long)]
    pub width: Option<f64>,
    /// Gaussian centre (0-based site); defaults to the middle.
    #[arg(long)]
    pub center: Option<f64>,
    /// Relative multiplicative jitter of the gaussian.
    #[arg(long)]
    pub jitter: Option<f64>,
    /// Lower end of the uniform range.
    #[arg(long)]
    pub low: Option<f64>,
    /// Upper end of the uniform range.
    #[arg(long)]
    pub high: Option<f64>,
    /// Peak homogeneity threshold on max(g^2)/mean(g^2).
    #[arg(long = "threshold-max")]
    pub threshold_max: Option<f64>,
    /// Deviation homogeneity threshold on mean|g^2 - mean(g^2)|/mean(g^2).
    #[arg(long = "threshold-dev")]
    pub threshold_dev: Option<f64>,
}

#[derive(Args, Debug)]
struct SpectrumArgs {
    #[command(flatten)]
    system: SystemArgs,
    /// Excitation number of V_n.
    #[arg(long)]
    n: Option<i64>,
    /// Cluster width for the comparison, in units of Omega.
    #[arg(long = "cluster-fraction")]
    cluster_fraction: Option<f64>,
    /// Largest dimension handed to the dense eigensolver.
    #[arg(long = "dense-cap")]
    dense_cap: Option<usize>,
    /// Also export H_s as coordinate triplets and the basis as JSON.
    #[arg(long = "export-matrix")]
    export_matrix: bool,
}

#[derive(Args, Debug)]
struct StorageArgs {
    #[command(flatten)]
    system: SystemArgs,
    /// Polar angle of the electron qubit.
    #[arg(long)]
    theta: Option<f64>,
    /// Azimuthal phase of the electron qubit.
    #[arg(long)]
    phi: Option<f64>,
    /// Memory occupations for the sweep, comma separated.
    #[arg(long = "m-list", value_delimiter = ',')]
    m_list: Option<Vec<usize>>,
    /// End of the time grid in units of the write time.
    #[arg(long = "t-max")]
    t_max: Option<f64>,
    #[arg(long = "t-steps")]
    t_steps: Option<usize>,
    /// Skip the exact spin-space write.
    #[arg(long = "no-exact")]
    no_exact: bool,
}

#[derive(Args, Debug)]
struct DecoherenceArgs {
    /// Number of nuclear spins (N - 1 auxiliary modes).
    #[arg(long = "N")]
    n_sites: Option<usize>,
    /// Quasi-homogeneous coupling g.
    #[arg(long)]
    g: Option<f64>,
    /// Grid size as <x steps>x<gt steps>, e.g. 100x100.
    #[arg(long, value_parser = parse_grid)]
    grid: Option<[usize; 2]>,
    /// Range of x = omega_z / k_B T as lo:hi.
    #[arg(long = "x-range", value_parser = parse_range)]
    x_range: Option<[f64; 2]>,
    /// Range of k_B T as lo:hi; needs --omega-z.
    #[arg(long = "kbt-range", value_parser = parse_range, conflicts_with = "x_range")]
    kbt_range: Option<[f64; 2]>,
    #[arg(long = "omega-z")]
    omega_z: Option<f64>,
    /// Range of gt as lo:hi.
    #[arg(long = "gt-range", value_parser = parse_range)]
    gt_range: Option<[f64; 2]>,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum ConventionChoice {
    Standard,
    HalfFactor,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long = "N")]
    n_sites: Option<usize>,
    #[arg(long = "I0")]
    spin: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Ladder operator normalization used by the commutator check.
    #[arg(long, value_enum)]
    convention: Option<ConventionChoice>,
}

fn parse_grid(s: &str) -> Result<[usize; 2], String> {
    let (a, b) = s.split_once(['x', 'X']).ok_or("expected <steps>x<steps>")?;
    Ok([
        a.trim().parse().map_err(|e| format!("{a}: {e}"))?,
        b.trim().parse().map_err(|e| format!("{b}: {e}"))?,
    ])
}

fn parse_range(s: &str) -> Result<[f64; 2], String> {
    let (a, b) = s.split_once(':').ok_or("expected lo:hi")?;
    Ok([
        a.trim().parse().map_err(|e| format!("{a}: {e}"))?,
        b.trim().parse().map_err(|e| format!("{b}: {e}"))?,
    ])
}

fn set<T>(slot: &mut Option<T>, v: Option<T>) {
    if v.is_some() {
        *slot = v;
    }
}

fn apply_system(cfg: &mut RunConfig, a: &SystemArgs, exp: Experiment) -> Result<(), CliError> {
    set(&mut cfg.n_sites, a.n_sites);
    set(&mut cfg.spin, a.spin);
    set(&mut cfg.seed, a.seed);
    set(&mut cfg.omega_z, a.omega_z);
    set(&mut cfg.big_omega_z, a.big_omega_z);
    commands::apply_profile_flags(cfg, a, exp)?;
    if a.threshold_max.is_some() || a.threshold_dev.is_some() {
        let mut t = cfg.thresholds.unwrap_or_default();
        if let Some(v) = a.threshold_max {
            t.max_ratio = v;
        }
        if let Some(v) = a.threshold_dev {
            t.deviation_ratio = v;
        }
        cfg.thresholds = Some(t);
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    let exp = match &cli.command {
        Command::Couplings(_) => Experiment::Couplings,
        Command::Modes(_) => Experiment::Modes,
        Command::Spectrum(_) => Experiment::Spectrum,
        Command::Storage(_) => Experiment::Storage,
        Command::Decoherence(_) => Experiment::Decoherence,
        Command::Verify(_) => Experiment::Verify,
    };
    if let Some(e) = cfg.experiment {
        if e != exp {
            return Err(CliError::config(
                "experiment",
                format!("config is for `{}` but the subcommand is `{}`", e.as_str(), exp.as_str()),
            ));
        }
    }
    cfg.experiment = Some(exp);
    match &cli.command {
        Command::Couplings(a) | Command::Modes(a) => apply_system(&mut cfg, a, exp)?,
        Command::Spectrum(a) => {
            apply_system(&mut cfg, &a.system, exp)?;
            set(&mut cfg.n, a.n);
            set(&mut cfg.cluster_fraction, a.cluster_fraction);
            set(&mut cfg.dense_cap, a.dense_cap);
            if a.export_matrix {
                cfg.export_matrix = Some(true);
            }
        }
        Command::Storage(a) => {
            apply_system(&mut cfg, &a.system, exp)?;
            if a.theta.is_some() || a.phi.is_some() {
                let mut q = cfg.qubit.unwrap_or(commands::DEFAULT_QUBIT);
                if let Some(t) = a.theta {
                    q.theta = t;
                }
                if let Some(p) = a.phi {
                    q.phi = p;
                }
                cfg.qubit = Some(q);
            }
            set(&mut cfg.m_list, a.m_list.clone());
            set(&mut cfg.t_max, a.t_max);
            set(&mut cfg.t_steps, a.t_steps);
            if a.no_exact {
                cfg.exact = Some(false);
            }
        }
        Command::Decoherence(a) => {
            set(&mut cfg.n_sites, a.n_sites);
            set(&mut cfg.g, a.g);
            set(&mut cfg.grid, a.grid);
            if a.x_range.is_some() {
                cfg.kbt_range = None;
            }
            if a.kbt_range.is_some() {
                cfg.x_range = None;
            }
            set(&mut cfg.x_range, a.x_range);
            set(&mut cfg.kbt_range, a.kbt_range);
            set(&mut cfg.omega_z, a.omega_z);
            set(&mut cfg.gt_range, a.gt_range);
        }
        Command::Verify(a) => {
            set(&mut cfg.n_sites, a.n_sites);
            set(&mut cfg.spin, a.spin);
            set(&mut cfg.seed, a.seed);
            if let Some(c) = a.convention {
                cfg.convention = Some(match c {
                    ConventionChoice::Standard => nucmem_core::fockspace::LadderConvention::Standard,
                    ConventionChoice::HalfFactor => nucmem_core::fockspace::LadderConvention::HalfFactor,
                });
            }
        }
    }
    let dir = output::output_dir(cli.out.as_deref(), &cfg, exp);
    commands::dispatch(exp, &cfg, &dir)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("nucmem: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
