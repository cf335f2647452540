//! Command-line front end.
//!
//! Exit codes: `0` success (or a pure decision), `1` a not-pure decision,
//! `2` any error.

mod input;

pub use input::{read_grouped_csv, read_matrix_csv};

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::dimension::{estimate_rank, gram_matrix, median_heuristic_bandwidth, DEFAULT_RANK_THRESHOLD};
use crate::kde::DEFAULT_GRID_SIZE;
use crate::parallel::with_jobs;
use crate::purity::{
    discrete_pairwise_pure, kwise_bruteforce_margin, purity_ratio, sperner_m, KwiseSearch, DEFAULT_PURITY_THRESHOLD,
};
use crate::reconstruct::{reconstruct_binary_cause, ReconstructOptions};
use crate::report::{to_json, CsvTable};
use crate::seed::derive_seed;
use crate::simulate::{
    gen_confounded, gen_direct, run_fig3, run_fig4, run_fig5, run_marginalization, AnmConfig, Fig3Config,
    GeneticsConfig, MarginalizationConfig, NoiseSpec, Transition,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NOT_PURE: i32 = 1;
pub const EXIT_ERROR: i32 = 2;

const FULL_RUNS: usize = 1000;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error(transparent)]
    Core(#[from] crate::Error),
    #[error("cannot write output: {0}")]
    Io(#[from] std::io::Error),
    #[error("cannot serialize report: {0}")]
    Json(#[from] serde_json::Error),
    #[error("cannot serialize report: {0}")]
    Csv(#[from] csv::Error),
    #[error("{0}")]
    Unsupported(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(name = "purity-lens", version, about = "Purity and dimension tests for conditionals P(Y|X)")]
pub struct Cli {
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    pub format: Format,
    /// Master seed for every random draw.
    #[arg(long, env = "PURITY_LENS_SEED", default_value_t = 0, global = true)]
    pub seed: u64,
    /// Worker threads for parallel sweeps (default: all cores). Output does not depend on it.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Purity ratio of P(Y|X) from a CSV with header `x,y`. Exit 0 if pure, 1 if not.
    Purity {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = DEFAULT_GRID_SIZE)]
        grid_size: usize,
        #[arg(long, default_value_t = DEFAULT_PURITY_THRESHOLD)]
        purity_threshold: f64,
    },
    /// Rank of the kernel mean embedding Gram matrix of the conditionals.
    Dimension {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = DEFAULT_RANK_THRESHOLD)]
        rank_threshold: f64,
        /// Gaussian kernel bandwidth (default: median heuristic).
        #[arg(long)]
        kernel_bandwidth: Option<f64>,
    },
    /// Reconstruct P(Y|z) and p(z|x) for a binary hidden cause.
    Reconstruct {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = DEFAULT_GRID_SIZE)]
        grid_size: usize,
        /// Relative density below which grid points do not constrain the extrapolation.
        #[arg(long, default_value_t = ReconstructOptions::default().support_floor)]
        support_floor: f64,
    },
    /// Generate data or run a simulation experiment.
    Simulate {
        #[arg(value_enum)]
        scenario: Scenario,
        #[command(flatten)]
        args: SimArgs,
    },
    /// Exact checks on discrete conditionals.
    Oracle {
        #[command(subcommand)]
        kind: OracleKind,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Scenario {
    Direct,
    Confounded,
    Fig3,
    Fig4,
    Fig5,
    Marginalization,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum NoiseKind {
    Mixture,
    Gaussian,
    Cauchy,
}

#[derive(Debug, Args)]
pub struct SimArgs {
    /// Runs (fig3) or pairs per class (fig4, fig5). Default 200.
    #[arg(long)]
    pub runs: Option<usize>,
    /// Use 1000 runs or pairs per class.
    #[arg(long, conflicts_with = "runs")]
    pub full: bool,
    /// Samples per data set (default 1000; 1200 for fig4 and fig5).
    #[arg(long)]
    pub n_samples: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_GRID_SIZE)]
    pub grid_size: usize,
    #[arg(long, default_value_t = DEFAULT_PURITY_THRESHOLD)]
    pub purity_threshold: f64,
    /// Standard deviation of the random causal weights.
    #[arg(long, default_value_t = 1.0)]
    pub weight_std: f64,
    /// Fixed weight instead of a random draw (direct, confounded).
    #[arg(long, allow_hyphen_values = true)]
    pub weight: Option<f64>,
    /// Noise family for direct, confounded and fig3.
    #[arg(long, value_enum, default_value_t = NoiseKind::Mixture)]
    pub noise: NoiseKind,
    /// Gaussian noise standard deviation (also fig4, fig5, marginalization).
    #[arg(long, default_value_t = 0.25)]
    pub noise_sigma: f64,
    #[arg(long, default_value_t = 1.0)]
    pub cauchy_scale: f64,
    /// Mixture component means.
    #[arg(long, value_delimiter = ',', num_args = 2, default_values_t = [-0.5, 0.5], allow_hyphen_values = true)]
    pub mixture_means: Vec<f64>,
    /// Standard deviation of both mixture components.
    #[arg(long, default_value_t = 0.25)]
    pub mixture_sd: f64,
    /// Weight of the first mixture component.
    #[arg(long, default_value_t = 0.5)]
    pub mixture_weight: f64,
    /// Seed of the Z-to-X channel (confounded; default derived from --seed).
    #[arg(long)]
    pub transition_seed: Option<u64>,
    /// Force the Z-to-X channel to the identity (confounded).
    #[arg(long)]
    pub identity_transition: bool,
    /// Histogram bins on [0, 1] (fig3).
    #[arg(long, default_value_t = 20)]
    pub bins: usize,
    /// Corruption levels (fig5).
    #[arg(long, value_delimiter = ',', default_values_t = [0.0, 0.1, 0.2, 0.3, 0.4, 0.5])]
    pub levels: Vec<f64>,
    #[arg(long, default_value_t = 2000)]
    pub n_snps: usize,
    /// Probability that a genotype differs from its left neighbour.
    #[arg(long, default_value_t = 0.05)]
    pub flip_prob: f64,
    /// Minimum distance in columns between X and the second locus.
    #[arg(long, default_value_t = 1000)]
    pub far_distance: usize,
    /// Corruption of the second locus in causal pairs.
    #[arg(long, default_value_t = 0.1)]
    pub v_corruption: f64,
    /// Number of binary causes (marginalization).
    #[arg(long, default_value_t = 3)]
    pub n_vars: usize,
}

#[derive(Debug, Subcommand)]
pub enum OracleKind {
    /// Pairwise purity of a discrete conditional (headerless CSV, one row per x). Exit 0 if pure.
    DiscretePurity {
        #[arg(long)]
        input: PathBuf,
    },
    /// Brute-force k-wise purity search over grid coefficients. Exit 0 if pure.
    Kwise {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 2)]
        k: usize,
        /// Grid points per coefficient on [-5, 6].
        #[arg(long, default_value_t = 1101)]
        resolution: usize,
    },
    /// Largest number of x-values of a pure conditional with |Y| = k.
    M { k: u32 },
}

impl SimArgs {
    fn noise(&self) -> NoiseSpec {
        match self.noise {
            NoiseKind::Mixture => NoiseSpec::TwoGaussianMixture {
                mean1: self.mixture_means[0],
                sd1: self.mixture_sd,
                mean2: self.mixture_means[1],
                sd2: self.mixture_sd,
                weight1: self.mixture_weight,
            },
            NoiseKind::Gaussian => NoiseSpec::Gaussian { sigma: self.noise_sigma },
            NoiseKind::Cauchy => NoiseSpec::Cauchy { scale: self.cauchy_scale },
        }
    }

    fn runs(&self) -> usize {
        if self.full {
            FULL_RUNS
        } else {
            self.runs.unwrap_or(200)
        }
    }

    fn genetics(&self, seed: u64) -> GeneticsConfig {
        GeneticsConfig {
            n_samples: self.n_samples.unwrap_or(1200),
            n_snps: self.n_snps,
            linkage_flip_prob: self.flip_prob,
            weight_std: self.weight_std,
            noise_sigma: self.noise_sigma,
            far_distance: self.far_distance,
            causal_v_corruption: self.v_corruption,
            pairs_per_class: self.runs(),
            grid_size: self.grid_size,
            seed,
            ..Default::default()
        }
    }
}

/// Rendered report plus the exit code it implies.
struct Outcome {
    text: String,
    code: i32,
}

fn render<T: Serialize + CsvTable>(value: &T, format: Format, code: i32) -> Result<Outcome, CliError> {
    let text = match format {
        Format::Json => to_json(value)?,
        Format::Csv => value.to_csv()?,
    };
    Ok(Outcome { text, code })
}

fn render_json_only<T: Serialize>(value: &T, format: Format, what: &str, code: i32) -> Result<Outcome, CliError> {
    match format {
        Format::Json => Ok(Outcome { text: to_json(value)?, code }),
        Format::Csv => Err(CliError::Unsupported(format!("{what} has no CSV form; use --format json"))),
    }
}

fn pure_code(pure: bool) -> i32 {
    if pure {
        EXIT_OK
    } else {
        EXIT_NOT_PURE
    }
}

fn execute(cli: &Cli) -> Result<Outcome, CliError> {
    let format = cli.format;
    let seed = cli.seed;
    match &cli.command {
        Command::Purity { input, grid_size, purity_threshold } => {
            let data = read_grouped_csv(input)?;
            let report = purity_ratio(&data, *grid_size, *purity_threshold)?;
            render(&report, format, pure_code(report.is_pure))
        }
        Command::Dimension { input, rank_threshold, kernel_bandwidth } => {
            let data = read_grouped_csv(input)?;
            let h = match kernel_bandwidth {
                Some(h) => *h,
                None => median_heuristic_bandwidth(&data)?,
            };
            let est = estimate_rank(&gram_matrix(&data, h)?, *rank_threshold)?;
            render(&est, format, EXIT_OK)
        }
        Command::Reconstruct { input, grid_size, support_floor } => {
            let data = read_grouped_csv(input)?;
            let options = ReconstructOptions { grid_size: *grid_size, support_floor: *support_floor };
            render(&reconstruct_binary_cause(&data, &options)?, format, EXIT_OK)
        }
        Command::Simulate { scenario, args } => simulate(*scenario, args, seed, format),
        Command::Oracle { kind } => oracle(kind, format),
    }
}

fn simulate(scenario: Scenario, args: &SimArgs, seed: u64, format: Format) -> Result<Outcome, CliError> {
    let anm = AnmConfig {
        weight_std: args.weight_std,
        weight_override: args.weight,
        noise: args.noise(),
        n_samples: args.n_samples.unwrap_or(1000),
        seed,
    };
    match scenario {
        Scenario::Direct => render(&gen_direct(&anm)?, format, EXIT_OK),
        Scenario::Confounded => {
            let transition = if args.identity_transition { Transition::IDENTITY } else { Transition::Random };
            let tseed = args.transition_seed.unwrap_or_else(|| derive_seed(seed, 1));
            let (samples, truth) = gen_confounded(&anm, transition, tseed)?;
            match format {
                Format::Csv => render(&samples, format, EXIT_OK),
                Format::Json => {
                    Ok(Outcome { text: to_json(&json!({ "samples": samples, "truth": truth }))?, code: EXIT_OK })
                }
            }
        }
        Scenario::Fig3 => {
            let config = Fig3Config {
                runs: args.runs(),
                n_samples: anm.n_samples,
                weight_std: args.weight_std,
                noise: anm.noise,
                grid_size: args.grid_size,
                threshold: args.purity_threshold,
                bins: args.bins,
                seed,
                ..Default::default()
            };
            render(&run_fig3(&config)?, format, EXIT_OK)
        }
        Scenario::Fig4 => render(&run_fig4(&args.genetics(seed))?, format, EXIT_OK),
        Scenario::Fig5 => render(&run_fig5(&args.levels, &args.genetics(seed))?, format, EXIT_OK),
        Scenario::Marginalization => {
            let config = MarginalizationConfig {
                n_vars: args.n_vars,
                n_samples: anm.n_samples,
                weight_std: args.weight_std,
                noise_sigma: args.noise_sigma,
                grid_size: args.grid_size,
                threshold: args.purity_threshold,
                seed,
            };
            let report = run_marginalization(&config)?;
            let code = pure_code(report.report.is_pure);
            render(&report, format, code)
        }
    }
}

fn oracle(kind: &OracleKind, format: Format) -> Result<Outcome, CliError> {
    match kind {
        OracleKind::DiscretePurity { input } => {
            let cond = read_matrix_csv(input)?;
            let pure = discrete_pairwise_pure(&cond);
            render_json_only(&json!({ "pairwise_pure": pure }), format, "oracle discrete-purity", pure_code(pure))
        }
        OracleKind::Kwise { input, k, resolution } => {
            let cond = read_matrix_csv(input)?;
            let search = KwiseSearch::new(*k, *resolution);
            let margin = kwise_bruteforce_margin(&cond, &search)?;
            let pure = margin < 0.0;
            let value = json!({ "k": k, "lambda_resolution": resolution, "margin": margin, "kwise_pure": pure });
            render_json_only(&value, format, "oracle kwise", pure_code(pure))
        }
        OracleKind::M { k } => {
            let m = sperner_m(*k)?;
            render_json_only(&json!({ "k": k, "m": m }), format, "oracle m", EXIT_OK)
        }
    }
}

fn emit(cli: &Cli, text: &str) -> Result<(), CliError> {
    match &cli.output {
        Some(path) => std::fs::write(path, text)?,
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
        }
    }
    Ok(())
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
        }
    };
    if cli.jobs == Some(0) {
        eprintln!("error: --jobs must be at least 1");
        return EXIT_ERROR;
    }
    let result = with_jobs(cli.jobs, || execute(&cli)).and_then(|outcome| {
        emit(&cli, &outcome.text)?;
        Ok(outcome.code)
    });
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_ERROR
        }
    }
}
