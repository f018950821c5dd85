use afp::cli::{run, CliError, ExperimentConfig};
use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

/// Exact-arithmetic experiments on approximate fixed points.
///
/// Every subcommand emits a machine-readable artifact (JSON report, or CSV
/// for the cesaro series) on stdout or at --report. Numeric flags take
/// exact rationals like `7/24`. Exit codes: 0 success, 2 bad config,
/// 3 domain escape, 4 search depth exhausted.
#[derive(Parser)]
#[command(name = "afp", version, about, max_term_width = 80)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Search for an epsilon fixed point by net covering plus
    /// simplicial subdivision.
    Kkm(KkmArgs),
    /// Average an orbit and emit the exact Cesaro residual series as CSV.
    Cesaro(CesaroArgs),
    /// Run the atoms-plus-diffuse shuffle map: orbit residuals and the
    /// no-fixed-point certificate.
    Ex2(Ex2Args),
    /// Chained-triangle geometry: distances, retraction, displacement
    /// certification, norm-equivalence checks.
    Delta(DeltaArgs),
    /// Build a delta-separated sequence (pairwise or span-distance mode).
    Separate(SeparateArgs),
    /// Re-run an experiment from a saved JSON config.
    Run(RunArgs),
}

#[derive(Args)]
struct KkmArgs {
    /// Builtin map name or plugin:path/to/map.json
    #[arg(long)]
    map: String,
    /// Witness quality target, e.g. 1/10
    #[arg(long)]
    epsilon: String,
    /// box:N, simplex, ball, or a JSON domain file
    #[arg(long)]
    domain: Option<String>,
    /// l1, linf, or a JSON seminorm file
    #[arg(long)]
    seminorm: Option<String>,
    /// Give up once the subdivision order passes this
    #[arg(long)]
    max_order: Option<u64>,
    /// Grid density used to build the covering net
    #[arg(long)]
    resolution: Option<u32>,
    /// Write the artifact here instead of stdout
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct CesaroArgs {
    /// Builtin map name or plugin:path/to/map.json
    #[arg(long)]
    map: String,
    /// Start point: a rational (coordinate 1) or a vector literal 1:1/2,2:1/4
    #[arg(long)]
    start: Option<String>,
    /// Number of Cesaro averages to emit
    #[arg(long)]
    steps: Option<u64>,
    /// box:N, simplex, ball, or a JSON domain file
    #[arg(long)]
    domain: Option<String>,
    /// l1, linf, or a JSON seminorm file
    #[arg(long)]
    seminorm: Option<String>,
    /// Write the artifact here instead of stdout
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct Ex2Args {
    /// diffuse, atom:N, or a JSON measure file
    #[arg(long)]
    start: Option<String>,
    /// Orbit length for the residual series
    #[arg(long)]
    steps: Option<u64>,
    /// Atom support {1..N} covered by the certificate
    #[arg(long)]
    support_bound: Option<u64>,
    /// Write the artifact here instead of stdout
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct DeltaArgs {
    /// distance | retract | certify | e1 | pipeline
    #[arg(long)]
    op: String,
    /// Builtin map name or plugin:path/to/map.json (certify, pipeline)
    #[arg(long)]
    map: Option<String>,
    /// Triangle point n:a:b; pass twice for distance
    #[arg(long = "point")]
    points: Vec<String>,
    /// Vector literal to retract, e.g. 1:1,3:1
    #[arg(long)]
    start: Option<String>,
    /// Sample region, e.g. delta,max-extent=8,min-norm=1/2,grain=16
    #[arg(long)]
    region: Option<String>,
    /// Displacement samples (certify, pipeline) or trials (e1)
    #[arg(long)]
    samples: Option<usize>,
    /// Lipschitz sample pairs (certify, pipeline)
    #[arg(long)]
    pairs: Option<usize>,
    /// Separation constant for e1, default 9/10
    #[arg(long)]
    delta: Option<String>,
    /// Norm bound M for e1, default 1
    #[arg(long)]
    norm_bound: Option<String>,
    /// Number of basis points for e1, default 16
    #[arg(long)]
    count: Option<usize>,
    /// l1, linf, or a JSON seminorm file (e1)
    #[arg(long)]
    seminorm: Option<String>,
    /// Sampling seed (AFP_SEED env overrides)
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write the artifact here instead of stdout
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct SeparateArgs {
    /// greedy (pairwise) or span (distance to linear span)
    #[arg(long, default_value = "greedy")]
    op: String,
    /// Required separation, e.g. 9/10
    #[arg(long)]
    delta: String,
    /// How many points to accept
    #[arg(long)]
    count: Option<usize>,
    /// Candidate stream: a domain grid instead of the default basis vectors
    #[arg(long)]
    domain: Option<String>,
    /// Grid density when --domain is given
    #[arg(long)]
    resolution: Option<u32>,
    /// l1, linf, or a JSON seminorm file
    #[arg(long)]
    seminorm: Option<String>,
    /// Write the artifact here instead of stdout
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct RunArgs {
    /// JSON experiment config (schema afp-config/1)
    #[arg(long)]
    config: PathBuf,
    /// Override the config's report destination
    #[arg(long)]
    report: Option<PathBuf>,
}

fn path_string(p: PathBuf) -> String {
    p.display().to_string()
}

fn build_config(command: Command) -> Result<ExperimentConfig, CliError> {
    Ok(match command {
        Command::Kkm(a) => {
            let mut c = ExperimentConfig::new("kkm");
            c.map = Some(a.map);
            c.epsilon = Some(a.epsilon);
            c.domain = a.domain;
            c.seminorm = a.seminorm;
            c.max_order = a.max_order;
            c.resolution = a.resolution;
            c.report = a.report.map(path_string);
            c
        }
        Command::Cesaro(a) => {
            let mut c = ExperimentConfig::new("cesaro");
            c.map = Some(a.map);
            c.start = a.start;
            c.steps = a.steps;
            c.domain = a.domain;
            c.seminorm = a.seminorm;
            c.report = a.report.map(path_string);
            c
        }
        Command::Ex2(a) => {
            let mut c = ExperimentConfig::new("ex2");
            c.start = a.start;
            c.steps = a.steps;
            c.support_bound = a.support_bound;
            c.report = a.report.map(path_string);
            c
        }
        Command::Delta(a) => {
            let mut c = ExperimentConfig::new("delta");
            c.op = Some(a.op);
            c.map = a.map;
            if !a.points.is_empty() {
                c.points = Some(a.points);
            }
            c.start = a.start;
            c.region = a.region;
            c.samples = a.samples;
            c.pairs = a.pairs;
            c.delta = a.delta;
            c.norm_bound = a.norm_bound;
            c.count = a.count;
            c.seminorm = a.seminorm;
            c.seed = a.seed;
            c.report = a.report.map(path_string);
            c
        }
        Command::Separate(a) => {
            let mut c = ExperimentConfig::new("separate");
            c.op = Some(a.op);
            c.delta = Some(a.delta);
            c.count = a.count;
            c.domain = a.domain;
            c.resolution = a.resolution;
            c.seminorm = a.seminorm;
            c.report = a.report.map(path_string);
            c
        }
        Command::Run(a) => {
            let mut c = ExperimentConfig::from_file(&a.config)?;
            if let Some(path) = a.report {
                c.report = Some(path_string(path));
            }
            c
        }
    })
}

fn fail(e: CliError) -> ExitCode {
    eprintln!("afp: {e}");
    ExitCode::from(e.exit_code() as u8)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let config = match build_config(cli.command) {
        Ok(c) => c,
        Err(e) => return fail(e),
    };
    match run(&config) {
        Ok(out) => {
            match &out.report.config.report {
                Some(path) => {
                    if let Err(e) = std::fs::write(path, out.artifact.as_bytes()) {
                        return fail(CliError::Internal(format!("cannot write {path}: {e}")));
                    }
                    eprintln!("wrote {path} ({} bytes)", out.artifact.len());
                }
                None => print!("{}", out.artifact),
            }
            ExitCode::SUCCESS
        }
        Err(e) => fail(e),
    }
}
