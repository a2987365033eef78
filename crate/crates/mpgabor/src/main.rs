use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use mpgabor::commands::{self, Check};
use mpgabor::config::{Family, OperatorSpec, RunConfig};
use mpgabor::output::{write_failure, OutputDir};
use mpgabor::CliError;

/// Metaplectic operators, Gabor matrices and numerical checks of their
/// phase-space estimates.
#[derive(Parser, Debug)]
#[command(name = "mpgabor", version)]
struct Cli {
    #[command(flatten)]
    opts: Overrides,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Euler decomposition `S = UᵀDV` of the configured operator.
    Decompose,
    /// Applies the configured operator to the configured input signal.
    Apply,
    /// Samples the Gabor matrix around the graph of `S`.
    Gabor,
    /// Runs one verification sweep.
    Verify {
        #[arg(value_enum)]
        which: Check,
    },
    /// Demonstrations.
    Demo {
        #[arg(value_enum)]
        which: Demo,
    },
}

#[derive(Debug, Clone, Copy, clap::ValueEnum)]
enum Demo {
    FreeParticle,
}

/// Flags override the JSON config.
#[derive(Args, Debug, Default)]
struct Overrides {
    /// Base config (JSON).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed; selects a random operator unless another one is given.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    d: Option<usize>,
    /// Samples per axis.
    #[arg(long, global = true)]
    n: Option<usize>,
    /// Grid half width.
    #[arg(long = "L", global = true)]
    half_width: Option<f64>,
    /// Decay order of the envelope weight.
    #[arg(long = "N", global = true)]
    n_order: Option<f64>,
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[arg(long, global = true)]
    free_particle_t: Option<f64>,
    #[arg(long, global = true)]
    identity: bool,
    #[arg(long, global = true)]
    sigma_max: Option<f64>,
    #[arg(long, global = true, value_enum)]
    family: Option<Family>,
    /// Lemma exponents, comma separated.
    #[arg(long, global = true, value_delimiter = ',')]
    s: Option<Vec<f64>>,
}

fn configure(o: &Overrides) -> Result<RunConfig, CliError> {
    let mut cfg = match &o.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(v) = &o.out {
        cfg.out = v.display().to_string();
    }
    if let Some(v) = o.d {
        cfg.d = v;
    }
    if o.n.is_some() {
        cfg.n = o.n;
    }
    if o.half_width.is_some() {
        cfg.half_width = o.half_width;
    }
    if let Some(v) = o.n_order {
        cfg.n_order = v;
    }
    if let Some(v) = o.tol {
        cfg.tol = v;
    }
    if let Some(v) = o.seed {
        cfg.seed = v;
    }
    if let Some(v) = o.sigma_max {
        cfg.verify.envelope.sigma_max = v;
    }
    if let Some(v) = o.family {
        cfg.verify.envelope.family = v;
    }
    if let Some(v) = &o.s {
        cfg.verify.lemmas.s = v.clone();
    }
    if o.identity {
        cfg.operator = OperatorSpec::Identity;
    } else if let Some(t) = o.free_particle_t {
        cfg.operator = OperatorSpec::FreeParticle { t };
    } else if let Some(seed) = o.seed {
        cfg.operator = OperatorSpec::Random { seed, sigma_max: o.sigma_max.unwrap_or(cfg.verify.envelope.sigma_max) };
    }
    Ok(cfg)
}

fn init_threads() -> Result<(), CliError> {
    if let Ok(v) = std::env::var("MPGABOR_THREADS") {
        let n: usize = v.parse().map_err(|_| CliError::validation(format!("MPGABOR_THREADS={v:?} is not a count")))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::computation(format!("thread pool: {e}")))?;
    }
    Ok(())
}

fn run(cli: &Cli, out_root: &mut Option<PathBuf>, hash: &mut Option<String>) -> Result<String, CliError> {
    init_threads()?;
    let mut cfg = configure(&cli.opts)?;
    *out_root = Some(PathBuf::from(&cfg.out));
    let name = match cli.command {
        Command::Decompose => "decompose",
        Command::Apply => "apply",
        Command::Gabor => "gabor",
        Command::Verify { .. } => "verify",
        Command::Demo { .. } => "demo",
    };
    commands::resolve(&mut cfg, name)?;
    let mut out = OutputDir::create(&PathBuf::from(&cfg.out), &cfg)?;
    *hash = Some(out.hash().to_string());
    match cli.command {
        Command::Decompose => commands::decompose(&cfg, &mut out),
        Command::Apply => commands::apply(&cfg, &mut out),
        Command::Gabor => commands::gabor(&cfg, &mut out),
        Command::Verify { which } => commands::verify(&cfg, which, &mut out),
        Command::Demo { which: Demo::FreeParticle } => {
            let t = match cfg.operator {
                OperatorSpec::FreeParticle { t } => t,
                _ => 1.0,
            };
            commands::demo_free_particle(&cfg, t, &mut out)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut root = None;
    let mut hash = None;
    match run(&cli, &mut root, &mut hash) {
        Ok(summary) => {
            println!("{summary}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{e}");
            if let Some(root) = &root {
                write_failure(root, hash.as_deref(), &e);
            }
            ExitCode::from(e.code as u8)
        }
    }
}
