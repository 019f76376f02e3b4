use std::io;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use log::info;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use addlab::bounds::{region_scan, subspace_census, ScanExtras};
use addlab::channels::witness_report;
use addlab::constructions::{antisymmetric_basis, random_antisym_subspace, ConstructionSpec, Family};
use addlab::entropy::RenyiOrder;
use addlab::oracle::{estimate_md, max_schmidt_in_subspace, OracleConfig};
use addlab::report::{
    construction_summary, parse_d_grid, parse_p_grid, to_json, write_scan_csv, Payload, ReportEnvelope,
};
use addlab::Result;

const EXIT_BREAKS: u8 = 0;
const EXIT_ERROR: u8 = 2;
const EXIT_NO_BREAK: u8 = 3;

#[derive(Parser)]
#[command(name = "addlab", version, about = "Additivity-breaking subspaces for the minimum output Renyi entropy")]
struct Cli {
    #[command(flatten)]
    oracle: OracleFlags,
    /// Log progress to stderr (repeat for more detail).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct OracleFlags {
    /// Independent random restarts per oracle call.
    #[arg(long, global = true, default_value_t = 64)]
    restarts: usize,
    /// Iteration cap per restart.
    #[arg(long = "max-iters", global = true, default_value_t = 500)]
    max_iters: usize,
    /// Relative convergence tolerance.
    #[arg(long, global = true, default_value_t = 1e-10)]
    tol: f64,
    #[arg(long, global = true, env = "ADDLAB_SEED", default_value_t = 0)]
    seed: u64,
}

impl OracleFlags {
    fn config(&self) -> OracleConfig {
        OracleConfig { restarts: self.restarts, max_iterations: self.max_iters, tolerance: self.tol, seed: self.seed }
    }
}

#[derive(Args)]
struct SpecFlags {
    /// antisym, antisym-subspace, bell-extension or parthasarathy.
    #[arg(long, value_parser = parse_family)]
    family: Family,
    #[arg(long)]
    d: usize,
    /// Subspace dimension or number of added Bell states.
    #[arg(long)]
    n: Option<usize>,
}

impl SpecFlags {
    fn spec(&self) -> ConstructionSpec {
        ConstructionSpec::new(self.family, self.d, self.n)
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum Target {
    AntisymSup,
    SubspaceSup,
    Md,
}

#[derive(Subcommand)]
enum Command {
    /// Build a subspace and summarize it.
    Construct(SpecFlags),
    /// Bounds, oracle estimate and two-copy witness for one construction.
    Verify {
        #[command(flatten)]
        spec: SpecFlags,
        #[arg(long)]
        p: f64,
        /// Assumed lower bound on M_d (Parthasarathy).
        #[arg(long)]
        m: Option<f64>,
    },
    /// Breaking region of a family over a (p, d) grid.
    Scan {
        #[arg(long, value_parser = parse_family)]
        family: Family,
        /// Comma list, e.g. 2.5,3,4.
        #[arg(long = "p-grid")]
        p_grid: String,
        /// Comma list of integers or ranges, e.g. 4..12.
        #[arg(long = "d-grid")]
        d_grid: String,
        #[arg(long)]
        m: Option<f64>,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// Run one numerical oracle.
    Oracle {
        #[arg(long, value_enum)]
        target: Target,
        #[arg(long)]
        d: usize,
        /// Subspace dimension for subspace-sup (random antisymmetric subspace).
        #[arg(long)]
        n: Option<usize>,
    },
    /// Count breaking subspace dimensions at one (p, d).
    Census {
        #[arg(long)]
        p: f64,
        #[arg(long)]
        d: usize,
    },
}

fn parse_family(s: &str) -> std::result::Result<Family, String> {
    s.parse::<Family>().map_err(|e| e.to_string())
}

fn emit(command: &str, seed: u64, payload: Payload) -> Result<()> {
    println!("{}", to_json(&ReportEnvelope::new(command, seed, payload))?);
    Ok(())
}

fn run(cli: Cli) -> Result<u8> {
    let cfg = cli.oracle.config();
    cfg.validate()?;
    let seed = cfg.seed;
    match cli.command {
        Command::Construct(flags) => {
            let spec = flags.spec();
            info!("constructing {} d={}", spec.family, spec.d);
            emit("construct", seed, Payload::Construction(construction_summary(&spec, &cfg)?))?;
        }
        Command::Verify { spec, p, m } => {
            let spec = spec.spec();
            info!("verifying {} d={} n={:?} p={p}", spec.family, spec.d, spec.n);
            let report = witness_report(&spec, RenyiOrder::new(p)?, &cfg, m)?;
            let breaks = report.analytic.breaks;
            emit("verify", seed, Payload::Witness(Box::new(report)))?;
            return Ok(if breaks { EXIT_BREAKS } else { EXIT_NO_BREAK });
        }
        Command::Scan { family, p_grid, d_grid, m, format } => {
            let scan = region_scan(family, &parse_p_grid(&p_grid)?, &parse_d_grid(&d_grid)?, ScanExtras { m })?;
            for meta in &scan.metadata {
                if let Some(d0) = meta.d0 {
                    eprintln!("# family={} p={} d0={d0}", family, meta.p);
                }
            }
            match format {
                Format::Csv => write_scan_csv(&scan, io::stdout().lock())?,
                Format::Json => emit("scan", seed, Payload::Scan(scan))?,
            }
        }
        Command::Oracle { target, d, n } => {
            let est = match target {
                Target::AntisymSup => max_schmidt_in_subspace(&antisymmetric_basis(d)?, &cfg)?,
                Target::SubspaceSup => {
                    let n = n.ok_or_else(|| addlab::Error::Argument("subspace-sup needs --n".into()))?;
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    max_schmidt_in_subspace(&random_antisym_subspace(d, n, &mut rng)?, &cfg)?
                }
                Target::Md => estimate_md(d, &cfg)?,
            };
            emit("oracle", seed, Payload::Oracle(Box::new(est)))?;
        }
        Command::Census { p, d } => {
            emit("census", seed, Payload::Census(subspace_census(RenyiOrder::new(p)?, d)?))?;
        }
    }
    Ok(EXIT_BREAKS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}
