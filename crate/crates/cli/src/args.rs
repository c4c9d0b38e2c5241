use std::net::IpAddr;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use meetup_core::agents::PolicyKind;
use meetup_core::analytics::{LogFormat, DEFAULT_CROSSTALK_THRESHOLD, DEFAULT_PREFIX_K};
use meetup_core::gameboard::DEFAULT_NODE_COUNT;

#[derive(Debug, Parser)]
#[command(name = "meetup", version, about = "Two-player coordination game toolkit")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate one gameboard and write it as a board file.
    Genmap(GenmapArgs),
    /// Run the game server.
    Serve(ServeArgs),
    /// Play batches of scripted episodes and write their event logs.
    Simulate(SimulateArgs),
    /// Compute corpus statistics over a directory of logs.
    Analyze(AnalyzeArgs),
    /// Connect a scripted player to a running server.
    Bot(BotArgs),
    /// Validate a room-type catalog and image manifest.
    Catalog(DataArgs),
}

#[derive(Debug, Clone, Args)]
pub struct DataArgs {
    /// Room-type catalog file; the built-in taxonomy when omitted.
    #[arg(long)]
    pub catalog: Option<PathBuf>,
    /// Image manifest (JSON: type name to identifiers); synthetic when omitted.
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GenmapArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Meeting room type; drawn from the target list when omitted.
    #[arg(long)]
    pub target_type: Option<String>,
    #[arg(long, default_value_t = DEFAULT_NODE_COUNT)]
    pub nodes: usize,
    /// Connect only the steps the walk took instead of all adjacent rooms.
    #[arg(long)]
    pub walk_edges_only: bool,
    /// Output file; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub data: DataArgs,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[arg(long, default_value = "127.0.0.1")]
    pub host: IpAddr,
    /// WebSocket port for browser clients.
    #[arg(long, default_value_t = 8765)]
    pub port: u16,
    /// Newline-framed TCP port for bots.
    #[arg(long)]
    pub bot_port: Option<u16>,
    #[arg(long, default_value_t = 0)]
    pub seed_base: u64,
    /// Seconds per game.
    #[arg(long, default_value_t = meetup_core::game::DEFAULT_TIME_LIMIT)]
    pub time_limit: f64,
    /// Seconds a lone player waits before being dismissed.
    #[arg(long, default_value_t = meetup_server::lobby::DEFAULT_WAITING_TIMEOUT)]
    pub waiting_timeout: f64,
    /// Event log directory. MEETUP_LOG_DIR takes precedence.
    #[arg(long, default_value = "logs")]
    pub log_dir: PathBuf,
    /// JSON object replacing GM templates by name.
    #[arg(long)]
    pub templates: Option<PathBuf>,
    #[command(flatten)]
    pub data: DataArgs,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Number of episodes, each on its own board.
    #[arg(long, default_value_t = 100)]
    pub boards: usize,
    #[arg(long, default_value = "describer")]
    pub policy_a: PolicyKind,
    #[arg(long, default_value = "describer")]
    pub policy_b: PolicyKind,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out_dir: PathBuf,
    /// Decisions per episode before it is aborted.
    #[arg(long, default_value_t = 200)]
    pub step_cap: usize,
    #[arg(long)]
    pub target_type: Option<String>,
    #[command(flatten)]
    pub data: DataArgs,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long, default_value = "stats.json")]
    pub out: PathBuf,
    #[arg(long, default_value_t = DEFAULT_PREFIX_K)]
    pub prefix_k: usize,
    #[arg(long, default_value_t = DEFAULT_CROSSTALK_THRESHOLD)]
    pub crosstalk_threshold: f64,
    /// Write prefix histograms as CSV files into this directory.
    #[arg(long)]
    pub histograms: Option<PathBuf>,
    /// `native` event logs or the `published` corpus layout.
    #[arg(long, default_value = "native")]
    pub format: LogFormat,
    /// Count refused moves as navigation actions.
    #[arg(long)]
    pub count_rejected_moves: bool,
}

#[derive(Debug, Args)]
pub struct BotArgs {
    /// Server bot port, e.g. 127.0.0.1:8766.
    #[arg(long)]
    pub addr: std::net::SocketAddr,
    /// Session token; a random one when omitted.
    #[arg(long)]
    pub token: Option<String>,
    #[arg(long)]
    pub worker_id: Option<String>,
    #[arg(long, default_value = "describer")]
    pub policy: PolicyKind,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Milliseconds between decisions.
    #[arg(long, default_value_t = 1500)]
    pub think_ms: u64,
    #[arg(long, default_value_t = 400)]
    pub max_decisions: usize,
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}
