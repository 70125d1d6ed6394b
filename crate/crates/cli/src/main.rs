//! `flatlab`: command-line driver for flatlab-core.
//!
//! Exit codes: 0 success, 2 invalid flags or parameters, 3 capability,
//! numeric or I/O failures.

mod commands;
mod config;
mod report;

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand as ClapSubcommand};
use flatlab_core::{Family, SignSequence};

use crate::config::{Alpha, FactorFamily, Format, RunConfig, Subcommand};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Core(flatlab_core::Error),
    Io(String),
}

impl From<flatlab_core::Error> for CliError {
    fn from(e: flatlab_core::Error) -> Self {
        CliError::Core(e)
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Core(e) if e.is_usage() => 2,
            CliError::Core(_) | CliError::Io(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Io(m) => f.write_str(m),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "flatlab", version, about = "Flatness experiments for polynomials on the unit circle")]
struct Cli {
    /// Worker threads (default: number of cores). Results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct OutputArgs {
    /// Output format (default: json, or csv for sweeps).
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Write the report here instead of stdout.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
struct GeneratorArgs {
    /// Polynomial family: littlewood-random (or littlewood), unimodular-phases,
    /// gauss-fresnel, blaschke, liouville, monomial.
    #[arg(long)]
    family: Family,
    /// Length (number of coefficients).
    #[arg(long)]
    n: usize,
    /// Seed for littlewood-random (default 0).
    #[arg(long)]
    seed: Option<u64>,
    /// Blaschke parameter, a in (0,1).
    #[arg(long)]
    a: Option<f64>,
    /// Comma-separated phases for unimodular-phases.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    phases: Option<Vec<f64>>,
    /// Divide by the L2 norm.
    #[arg(long)]
    normalized: bool,
}

#[derive(Args, Debug, Clone)]
struct TemplateArgs {
    /// Polynomial family of every sample.
    #[arg(long)]
    family: Family,
    /// Base seed for random families (default 0); per-sample seeds derive from it.
    #[arg(long)]
    seed: Option<u64>,
    /// Blaschke parameter, a in (0,1).
    #[arg(long)]
    a: Option<f64>,
}

#[derive(ClapSubcommand, Debug)]
enum Command {
    /// Flatness report of one polynomial at one or more exponents.
    Flatness {
        #[command(flatten)]
        gen: GeneratorArgs,
        /// Exponents, comma-separated.
        #[arg(long, value_delimiter = ',', default_value = "1")]
        alpha: Vec<Alpha>,
        /// Grid points per coefficient before convergence doubling.
        #[arg(long, default_value_t = config::default_oversample())]
        oversample: usize,
        /// Thresholds for the measure of deviation, comma-separated.
        #[arg(long, value_delimiter = ',')]
        eps: Option<Vec<f64>>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Littlewood coefficient criterion and flatness verdict.
    Criterion {
        #[command(flatten)]
        gen: GeneratorArgs,
        /// Exponent.
        #[arg(long, default_value = "1")]
        alpha: Alpha,
        /// Threshold K.
        #[arg(long, default_value_t = commands::DEFAULT_K)]
        k: f64,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Empirical norm-ratio gap over many samples.
    Gap {
        #[command(flatten)]
        gen: TemplateArgs,
        /// Exponent of the norm ratio.
        #[arg(long)]
        alpha: Alpha,
        /// Lengths, comma-separated.
        #[arg(long, value_delimiter = ',', required = true)]
        n_list: Vec<usize>,
        /// Samples per length.
        #[arg(long, default_value_t = commands::DEFAULT_SAMPLES)]
        samples: usize,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Clarkson inequalities on seeded random pairs.
    Clarkson {
        /// Exponent in (1,2].
        #[arg(long)]
        p: f64,
        /// Defaults to p'.
        #[arg(long)]
        r: Option<f64>,
        /// Defaults to p.
        #[arg(long)]
        s: Option<f64>,
        /// Check the classical second inequality instead of the general one.
        #[arg(long)]
        classical: bool,
        /// Number of random pairs.
        #[arg(long, default_value_t = commands::DEFAULT_PAIRS)]
        pairs: usize,
        /// Degree of each random polynomial.
        #[arg(long, default_value_t = commands::DEFAULT_PAIR_DEGREE)]
        degree: usize,
        /// Base seed; per-pair seeds derive from it.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Also report the convexity modulus at these eps, comma-separated.
        #[arg(long, value_delimiter = ',')]
        delta_eps: Option<Vec<f64>>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Sublevel-set measure bounds.
    Measure {
        #[command(flatten)]
        gen: GeneratorArgs,
        /// Sublevel threshold.
        #[arg(long, default_value_t = commands::DEFAULT_ZETA2)]
        zeta2: f64,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Barker sequences.
    #[command(subcommand)]
    Barker(BarkerCommand),
    /// Liouville function experiments.
    #[command(subcommand)]
    Liouville(LiouvilleCommand),
    /// Generalized Riesz products.
    #[command(subcommand)]
    Riesz(RieszCommand),
    /// Run a config file, or re-run the config embedded in a report.
    Run {
        /// Config file, or a JSON or CSV report to reproduce.
        #[arg(long)]
        config: PathBuf,
        /// Overrides the config's output path.
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
}

#[derive(ClapSubcommand, Debug)]
enum BarkerCommand {
    /// Exhaustive search at one length, or an existence census up to --n-max.
    Search {
        /// Sequence length.
        #[arg(long, conflicts_with = "n_max", required_unless_present = "n_max")]
        n: Option<usize>,
        /// Census of every length up to this bound.
        #[arg(long)]
        n_max: Option<usize>,
        /// Search orbit representatives and re-expand.
        #[arg(long)]
        symmetry_reduce: bool,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Autocorrelations and merit factor of a sign sequence.
    Profile {
        /// Comma-separated signs, e.g. 1,1,1,-1,1.
        #[arg(long, allow_hyphen_values = true)]
        sequence: String,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Flatness report of the polynomial with the given signs.
    Flatness {
        #[arg(long, allow_hyphen_values = true)]
        sequence: String,
        /// Exponent of the flatness report.
        #[arg(long, default_value = "2")]
        alpha: Alpha,
        #[command(flatten)]
        out: OutputArgs,
    },
}

#[derive(ClapSubcommand, Debug)]
enum LiouvilleCommand {
    /// Norm ratios ||Σ λ(k) z^k||_α / √N; alpha may be inf.
    Sweep {
        /// Lengths, comma-separated.
        #[arg(long, value_delimiter = ',', required = true)]
        n_list: Vec<usize>,
        /// Exponents, comma-separated; inf for the sup norm.
        #[arg(long, value_delimiter = ',', default_value = "1,4,inf")]
        alpha: Vec<Alpha>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Largest |Σ_{n<=M} λ(n)| / √M over M <= N.
    Partial {
        /// Length of the partial sum.
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Sieve λ(1..N) and write the packed bit table.
    Table {
        /// Sieve bound.
        #[arg(long)]
        n: usize,
        /// File receiving the packed sign table.
        #[arg(long)]
        bits: PathBuf,
        #[command(flatten)]
        out: OutputArgs,
    },
}

#[derive(ClapSubcommand, Debug)]
enum RieszCommand {
    /// L4, L1 and Mahler measure of Gauss–Fresnel polynomials.
    Demo {
        /// Lengths, comma-separated.
        #[arg(long, value_delimiter = ',', required = true)]
        n_list: Vec<usize>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Build a partial product and check its invariants.
    Plan {
        /// Factor degrees, comma-separated.
        #[arg(long, value_delimiter = ',', required = true)]
        degrees: Vec<usize>,
        #[arg(long, value_enum, default_value = "random")]
        factor_family: FactorFamily,
        /// Seed for the random factors.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        out: OutputArgs,
    },
}

fn base(sub: Subcommand, out: OutputArgs) -> RunConfig {
    let mut c = RunConfig::new(sub);
    if let Some(f) = out.format {
        c.format = f;
    }
    c.output = out.output;
    c
}

fn with_generator(mut c: RunConfig, g: GeneratorArgs) -> RunConfig {
    let (spec, seed) = commands::resolve_generator(g.family, g.n, g.seed, g.a, g.phases, g.normalized);
    c.generator = Some(spec);
    c.seed = seed;
    c
}

fn parse_sequence(s: &str) -> Result<SignSequence, CliError> {
    SignSequence::parse(s).map_err(|e| CliError::Usage(e.to_string()))
}

fn build_config(command: Command) -> Result<RunConfig, CliError> {
    let cfg = match command {
        Command::Flatness { gen, alpha, oversample, eps, out } => {
            let mut c = with_generator(base(Subcommand::Flatness, out), gen);
            c.alphas = alpha;
            c.oversample = oversample;
            if let Some(e) = eps {
                c.eps_ladder = e;
            }
            c
        }
        Command::Criterion { gen, alpha, k, out } => {
            let mut c = with_generator(base(Subcommand::Criterion, out), gen);
            c.alphas = vec![alpha];
            c.params.k = Some(k);
            c
        }
        Command::Gap { gen, alpha, n_list, samples, out } => {
            let n0 = n_list.first().copied().unwrap_or(1);
            let g = GeneratorArgs { family: gen.family, n: n0, seed: gen.seed, a: gen.a, phases: None, normalized: false };
            let mut c = with_generator(base(Subcommand::Gap, out), g);
            c.alphas = vec![alpha];
            c.params.n_list = Some(n_list);
            c.params.samples = Some(samples);
            c
        }
        Command::Clarkson { p, r, s, classical, pairs, degree, seed, delta_eps, out } => {
            let mut c = base(Subcommand::Clarkson, out);
            c.seed = Some(seed);
            c.params.p = Some(p);
            c.params.r = r;
            c.params.s = s;
            c.params.classical = Some(classical);
            c.params.pairs = Some(pairs);
            c.params.degree = Some(degree);
            c.params.delta_eps = delta_eps;
            c
        }
        Command::Measure { gen, zeta2, out } => {
            let mut c = with_generator(base(Subcommand::Measure, out), gen);
            c.params.zeta2 = Some(zeta2);
            c
        }
        Command::Barker(b) => match b {
            BarkerCommand::Search { n, n_max, symmetry_reduce, out } => {
                let mut c = base(Subcommand::BarkerSearch, out);
                c.params.n = n;
                c.params.n_max = n_max;
                c.params.symmetry_reduce = Some(symmetry_reduce);
                c
            }
            BarkerCommand::Profile { sequence, out } => {
                let mut c = base(Subcommand::BarkerProfile, out);
                c.params.sequence = Some(parse_sequence(&sequence)?);
                c
            }
            BarkerCommand::Flatness { sequence, alpha, out } => {
                let mut c = base(Subcommand::BarkerFlatness, out);
                c.params.sequence = Some(parse_sequence(&sequence)?);
                c.alphas = vec![alpha];
                c
            }
        },
        Command::Liouville(l) => match l {
            LiouvilleCommand::Sweep { n_list, alpha, out } => {
                let mut c = base(Subcommand::LiouvilleSweep, out);
                c.params.n_list = Some(n_list);
                c.alphas = alpha;
                c
            }
            LiouvilleCommand::Partial { n, out } => {
                let mut c = base(Subcommand::LiouvillePartial, out);
                c.params.n = Some(n);
                c
            }
            LiouvilleCommand::Table { n, bits, out } => {
                let mut c = base(Subcommand::LiouvilleTable, out);
                c.params.n = Some(n);
                c.bits = Some(bits);
                c
            }
        },
        Command::Riesz(r) => match r {
            RieszCommand::Demo { n_list, out } => {
                let mut c = base(Subcommand::RieszDemo, out);
                c.params.n_list = Some(n_list);
                c
            }
            RieszCommand::Plan { degrees, factor_family, seed, out } => {
                let mut c = base(Subcommand::RieszPlan, out);
                c.seed = Some(seed);
                c.params.degrees = Some(degrees);
                c.params.factor_family = Some(factor_family);
                c
            }
        },
        Command::Run { config, output } => {
            let text = fs::read_to_string(&config)
                .map_err(|e| CliError::Usage(format!("{}: {e}", config.display())))?;
            let mut c = report::extract_config(&text).map_err(CliError::Usage)?;
            if output.is_some() {
                c.output = output;
            }
            c
        }
    };
    Ok(cfg)
}

fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(t) = cli.threads {
        if t == 0 {
            return Err(CliError::Usage("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| CliError::Io(e.to_string()))?;
    }
    let cfg = build_config(cli.command)?;
    let outcome = commands::execute(&cfg)?;
    let text = report::render(&cfg, outcome).map_err(CliError::Usage)?;
    match &cfg.output {
        Some(path) => fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display()))),
        None => std::io::stdout()
            .lock()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Io(e.to_string())),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
