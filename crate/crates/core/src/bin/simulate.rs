use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use sqz_cavity::sweep::{self, SweepConfig};
use sqz_cavity::{Error, Result};

/// Steady states of an atom in a squeezed-vacuum-driven cavity.
///
/// Command-line flags override values from the config file.
#[derive(Parser, Debug)]
#[command(name = "simulate", version)]
struct Args {
    /// `key = value` configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// moments_sweep | distribution | wigner | bogoliubov_check
    #[arg(long)]
    mode: Option<String>,
    /// Squeezing strengths: `a,b,c` or `start:step:stop`.
    #[arg(long, allow_hyphen_values = true)]
    r: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    phi: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    g0: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    gamma: Option<f64>,
    /// Empty cavity.
    #[arg(long)]
    no_atom: bool,
    #[arg(long)]
    cutoff: Option<usize>,
    /// Allow the cutoff to grow up to this value.
    #[arg(long)]
    max_cutoff: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (defaults to SIM_THREADS, then all cores).
    #[arg(long)]
    threads: Option<usize>,
}

fn configure(args: &Args) -> Result<SweepConfig> {
    let mut cfg = match &args.config {
        Some(path) => SweepConfig::from_file(path)?,
        None => SweepConfig::default(),
    };
    if let Some(mode) = &args.mode {
        cfg.set("mode", mode)?;
    }
    if let Some(r) = &args.r {
        cfg.set("r_values", r)?;
    }
    if let Some(phi) = args.phi {
        cfg.phi = phi;
    }
    if let Some(g0) = args.g0 {
        cfg.g0 = g0;
    }
    if let Some(gamma) = args.gamma {
        cfg.gamma = gamma;
    }
    if args.no_atom {
        cfg.atom_present = false;
    }
    if let Some(n) = args.cutoff {
        cfg.fock_cutoff = n;
    }
    if let Some(n) = args.max_cutoff {
        cfg.max_cutoff = Some(n);
    }
    if let Some(out) = &args.out {
        cfg.output_path = out.clone();
    }
    cfg.validate()?;
    Ok(cfg)
}

fn thread_count(args: &Args) -> Result<Option<usize>> {
    if let Some(n) = args.threads {
        return Ok(Some(n));
    }
    match std::env::var("SIM_THREADS") {
        Ok(v) => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| Error::Config(format!("SIM_THREADS must be a positive integer, got `{v}`"))),
        Err(_) => Ok(None),
    }
}

fn run(args: &Args) -> Result<Vec<PathBuf>> {
    let cfg = configure(args)?;
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = thread_count(args)? {
        if n == 0 {
            return Err(Error::Config("thread count must be ≥ 1".into()));
        }
        pool = pool.num_threads(n);
    }
    let pool = pool.build().map_err(|e| Error::Config(e.to_string()))?;
    pool.install(|| sweep::run(&cfg))
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(&args) {
        Ok(paths) => {
            for p in paths {
                println!("{}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
