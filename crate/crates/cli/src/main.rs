use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgAction, Args, Parser, Subcommand, ValueEnum};

mod commands;
mod files;
mod report;

#[derive(Debug, Parser)]
#[command(
    name = "chainforge",
    version,
    about = "Version-sensitive package supply-chain analysis"
)]
struct Cli {
    /// Worker threads for parallel stages (0 = one per core). Results do not
    /// depend on this value.
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,

    /// Omit wall-clock timestamps so reruns produce byte-identical files.
    #[arg(long, global = true)]
    stable: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Ingest a JSON Lines metadata dump and persist the dependency database.
    IngestDb(IngestArgs),
    /// Build a supply chain from seed packages.
    BuildSc(BuildArgs),
    /// Detect and classify package clusters in a supply chain.
    Clusters(ClusterArgs),
    /// Find packages that dropped out of a supply chain.
    Disengagement(DisengageArgs),
    /// Write a consolidated summary of a supply chain.
    Report(ReportArgs),
    /// Convert a supply-chain graph to another format.
    Export(ExportArgs),
}

#[derive(Debug, Args)]
struct IngestArgs {
    /// Metadata dump, one JSON object per line.
    #[arg(long)]
    input: PathBuf,
    /// Output database file.
    #[arg(long)]
    db: PathBuf,
    /// Keep requirements guarded by an `extra` marker.
    #[arg(long, action = ArgAction::Set, default_value_t = true, num_args = 0..=1, default_missing_value = "true")]
    include_extra_gated: bool,
}

#[derive(Debug, Args)]
struct BuildArgs {
    #[arg(long)]
    db: PathBuf,
    /// Comma-separated seed package names.
    #[arg(long, value_delimiter = ',', required = true)]
    seeds: Vec<String>,
    /// Output directory; `graph.json` is always written.
    #[arg(long)]
    out: PathBuf,
    /// Additional export formats.
    #[arg(long, value_delimiter = ',')]
    format: Vec<String>,
    /// Drop seeds missing from the registry instead of failing.
    #[arg(long)]
    skip_unknown_seeds: bool,
}

#[derive(Debug, Args)]
struct ClusterArgs {
    /// Supply-chain graph JSON.
    #[arg(long)]
    input: PathBuf,
    /// Output directory for `clusters.json` and per-cluster DOT files.
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    leiden: LeidenArgs,
    /// Also write one DOT file per cluster.
    #[arg(long)]
    dot: bool,
}

#[derive(Debug, Clone, Copy, Args)]
struct LeidenArgs {
    #[arg(long, default_value_t = 0)]
    rng_seed: u64,
    #[arg(long, default_value_t = 1.0)]
    resolution: f64,
    #[arg(long, default_value_t = 16)]
    max_passes: usize,
}

#[derive(Debug, Args)]
struct DisengageArgs {
    /// Supply-chain graph JSON.
    #[arg(long)]
    input: PathBuf,
    /// Database the graph was built from.
    #[arg(long)]
    db: PathBuf,
    /// Output directory for `disengagement.json`.
    #[arg(long)]
    out: PathBuf,
    /// Let pre-releases count as the latest version.
    #[arg(long, action = ArgAction::Set, default_value_t = true, num_args = 0..=1, default_missing_value = "true")]
    include_prereleases: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, ValueEnum)]
enum Section {
    Graph,
    Shapes,
    Popularity,
    Disengagement,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ReportFormat {
    Markdown,
    Json,
}

#[derive(Debug, Args)]
struct ReportArgs {
    /// Supply-chain graph JSON.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Database, needed for the disengagement section.
    #[arg(long)]
    db: Option<PathBuf>,
    /// `package,downloads` CSV, needed for the popularity section.
    #[arg(long)]
    downloads: Option<PathBuf>,
    /// Download threshold; defaults to the mean over the whole table.
    #[arg(long)]
    threshold: Option<f64>,
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "graph,shapes,popularity,disengagement"
    )]
    sections: Vec<Section>,
    #[arg(long, value_enum, default_value_t = ReportFormat::Markdown)]
    format: ReportFormat,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    leiden: LeidenArgs,
    #[arg(long, action = ArgAction::Set, default_value_t = true, num_args = 0..=1, default_missing_value = "true")]
    include_prereleases: bool,
}

#[derive(Debug, Args)]
struct ExportArgs {
    /// Supply-chain graph JSON.
    #[arg(long)]
    input: PathBuf,
    /// json, edge-csv, dot or graphml.
    #[arg(long)]
    format: String,
    #[arg(long)]
    out: PathBuf,
    /// Leave seed packages out of DOT and GraphML output.
    #[arg(long)]
    no_seeds: bool,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("CHAINFORGE_LOG", "warn"))
        .init();
    let cli = Cli::parse();
    if let Err(e) = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads)
        .build_global()
    {
        log::warn!("thread pool already initialized: {e}");
    }
    let result = match &cli.command {
        Command::IngestDb(a) => commands::ingest_db(a, cli.stable),
        Command::BuildSc(a) => commands::build_sc(a, cli.stable),
        Command::Clusters(a) => commands::clusters(a),
        Command::Disengagement(a) => commands::disengagement(a),
        Command::Report(a) => report::run(a),
        Command::Export(a) => commands::export(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
