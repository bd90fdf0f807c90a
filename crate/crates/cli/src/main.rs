use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use ahmd::commands::{parse_epsilon, run, Config};
use ahmd::description::SystemDescription;
use ahmd::report::{render_csv, render_json};
use ahmd::CliError;

/// Exact combinatorial invariants of AH inductive systems over finite
/// simplicial complexes.
#[derive(Parser)]
#[command(name = "ahmd", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct CommonArgs {
    /// System-description JSON file.
    #[arg(long)]
    system: PathBuf,
    /// Named cover to operate on.
    #[arg(long)]
    cover: Option<String>,
    /// Named trace profile.
    #[arg(long)]
    trace: Option<String>,
    /// Named closed set.
    #[arg(long = "closed-set")]
    closed_set: Option<String>,
    /// Named open set.
    #[arg(long = "open-set")]
    open_set: Option<String>,
    /// Named function family.
    #[arg(long)]
    family: Option<String>,
    /// Barycentric subdivision level for refinement searches.
    #[arg(long, default_value_t = 1)]
    level: usize,
    /// Search budget (node count) per refinement search.
    #[arg(long, default_value_t = 1_000_000)]
    budget: u64,
    /// Truncation stage J (default: the last stage).
    #[arg(long)]
    stage: Option<usize>,
    /// Target block index where a single block is required (sbrp).
    #[arg(long)]
    block: Option<usize>,
    /// Positive rational threshold, e.g. "1/10" or "0.1".
    #[arg(long)]
    epsilon: Option<String>,
    /// Star-neighborhood radius for boundary fattening.
    #[arg(long, default_value_t = 1)]
    radius: usize,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write a CSV of the sequence rows.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Subcommand, Clone)]
enum Command {
    /// Refinement order of a cover, per block.
    DimCover(CommonArgs),
    /// Finite-stage mean-dimension sequence of a cover.
    MeanDim(CommonArgs),
    /// Orbit capacity of a trace profile or a closed set.
    Ocap(CommonArgs),
    /// Small-variation-of-trace probe for a trace profile.
    Svt(CommonArgs),
    /// Small-boundary probe inside a named open set.
    Sbp(CommonArgs),
    /// Small-boundary refinement probe for a cover at one (stage, block).
    Sbrp(CommonArgs),
    /// Finite-stage Cuntz mean-dimension sequence of a cover.
    CuntzDim(CommonArgs),
    /// Variation mean-dimension sequence of a function family.
    VarDim(CommonArgs),
    /// Nerve complex and subordinate partition data of a cover.
    Nerve(CommonArgs),
    /// The full battery over every named object in the file.
    ReportAll(CommonArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::DimCover(_) => "dim-cover",
            Command::MeanDim(_) => "mean-dim",
            Command::Ocap(_) => "ocap",
            Command::Svt(_) => "svt",
            Command::Sbp(_) => "sbp",
            Command::Sbrp(_) => "sbrp",
            Command::CuntzDim(_) => "cuntz-dim",
            Command::VarDim(_) => "var-dim",
            Command::Nerve(_) => "nerve",
            Command::ReportAll(_) => "report-all",
        }
    }

    fn args(&self) -> &CommonArgs {
        match self {
            Command::DimCover(a)
            | Command::MeanDim(a)
            | Command::Ocap(a)
            | Command::Svt(a)
            | Command::Sbp(a)
            | Command::Sbrp(a)
            | Command::CuntzDim(a)
            | Command::VarDim(a)
            | Command::Nerve(a)
            | Command::ReportAll(a) => a,
        }
    }
}

fn build_config(args: &CommonArgs) -> Result<Config, CliError> {
    let epsilon = match &args.epsilon {
        Some(e) => Some(parse_epsilon(e)?),
        None => None,
    };
    Ok(Config {
        system_path: args.system.display().to_string(),
        level: args.level,
        budget: args.budget,
        stage: args.stage,
        epsilon,
        radius: args.radius,
        block: args.block,
        cover: args.cover.clone(),
        trace: args.trace.clone(),
        closed_set: args.closed_set.clone(),
        open_set: args.open_set.clone(),
        family: args.family.clone(),
    })
}

fn init_threads() {
    if let Ok(value) = std::env::var("AHMD_THREADS") {
        if let Ok(n) = value.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
}

fn main() {
    let cli = Cli::parse();
    init_threads();
    let start = Instant::now();
    let args = cli.command.args().clone();
    let outcome = (|| -> Result<(), CliError> {
        let cfg = build_config(&args)?;
        let desc = SystemDescription::load(&args.system)?;
        let report = run(cli.command.name(), &desc, &cfg)?;
        let json = render_json(&report);
        match &args.out {
            Some(path) => std::fs::write(path, &json)
                .map_err(|e| CliError::validation(format!("cannot write {}: {e}", path.display())))?,
            None => print!("{json}"),
        }
        if let Some(path) = &args.csv {
            std::fs::write(path, render_csv(&report))
                .map_err(|e| CliError::validation(format!("cannot write {}: {e}", path.display())))?;
        }
        Ok(())
    })();
    eprintln!("wall time: {:.3}s", start.elapsed().as_secs_f64());
    if let Err(e) = outcome {
        eprintln!("{e}");
        std::process::exit(e.exit_code());
    }
}
