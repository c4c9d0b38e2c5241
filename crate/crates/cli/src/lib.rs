//! Subcommands of the `meetup` binary.

pub mod args;

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use meetup_core::agents::{run_batch, BatchConfig, BatchStats, EpisodeLog};
use meetup_core::analytics::{
    corpus_stats, load_logs, prefix_histogram, CorpusStats, StatsConfig, TurnSelection,
};
use meetup_core::catalog::fs_alias;
use meetup_core::game::{GameConfig, GmTemplates, TemplateName};
use meetup_core::gameboard::{generate_board, BoardConfig, EdgeMode, Gameboard};
use meetup_core::{ImageCatalog, RoomCategory, TypeCatalog};
use meetup_server::{run_bot, BotConfig, BotReport, Server, ServerConfig};
use rand::distr::Alphanumeric;
use rand::Rng;

use args::{AnalyzeArgs, BotArgs, Cli, Command, DataArgs, GenmapArgs, ServeArgs, SimulateArgs};

pub const LOG_DIR_ENV: &str = "MEETUP_LOG_DIR";
pub const SUMMARY_FILE: &str = "summary.json";

impl DataArgs {
    pub fn types(&self) -> Result<TypeCatalog> {
        match &self.catalog {
            Some(p) => TypeCatalog::load(p).with_context(|| format!("loading {}", p.display())),
            None => Ok(TypeCatalog::builtin()),
        }
    }

    pub fn load(&self) -> Result<(TypeCatalog, ImageCatalog)> {
        let types = self.types()?;
        let images = match &self.manifest {
            Some(p) => ImageCatalog::load(p).with_context(|| format!("loading {}", p.display()))?,
            None => ImageCatalog::synthetic(&types, 6),
        };
        images.validate(&types)?;
        Ok((types, images))
    }
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Genmap(a) => genmap(&a).map(|_| ()),
        Command::Serve(a) => serve(a),
        Command::Simulate(a) => simulate(&a).map(|_| ()),
        Command::Analyze(a) => analyze(&a).map(|_| ()),
        Command::Bot(a) => {
            let report = bot(a)?;
            println!("{}", serde_json::json!({
                "game_id": report.game_id,
                "outcome": report.outcome,
                "dismissed": report.dismissed,
                "actions_sent": report.actions_sent,
            }));
            Ok(())
        }
        Command::Catalog(a) => catalog(&a),
    }
}

fn write_out(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir)?;
            }
            fs::write(p, text).with_context(|| format!("writing {}", p.display()))
        }
        None => match writeln!(std::io::stdout().lock(), "{text}") {
            Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
            _ => Ok(()),
        },
    }
}

pub fn genmap(a: &GenmapArgs) -> Result<Gameboard> {
    let (types, images) = a.data.load()?;
    let mut config = BoardConfig {
        target_type: a.target_type.clone(),
        ..BoardConfig::default()
    };
    config.walk.node_count = a.nodes;
    if a.walk_edges_only {
        config.walk.edge_mode = EdgeMode::WalkOnly;
    }
    let board = generate_board(a.seed, &config, &types, &images)?;
    write_out(a.out.as_deref(), &board.to_json())?;
    Ok(board)
}

/// `MEETUP_LOG_DIR` wins over the flag.
pub fn log_dir(flag: &Path) -> PathBuf {
    std::env::var_os(LOG_DIR_ENV)
        .filter(|v| !v.is_empty())
        .map(PathBuf::from)
        .unwrap_or_else(|| flag.to_path_buf())
}

fn load_templates(path: &Path) -> Result<GmTemplates> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let map: BTreeMap<String, String> = serde_json::from_str(&text)?;
    let mut templates = GmTemplates::default();
    for (name, body) in map {
        let name: TemplateName = serde_json::from_value(serde_json::Value::String(name.clone()))
            .with_context(|| format!("unknown template {name:?}"))?;
        templates = templates.with(name, body)?;
    }
    Ok(templates)
}

pub fn server_config(a: &ServeArgs) -> Result<ServerConfig> {
    let (types, images) = a.data.load()?;
    let mut config = ServerConfig::new(log_dir(&a.log_dir));
    config.ws_addr = SocketAddr::new(a.host, a.port);
    config.bot_addr = a.bot_port.map(|p| SocketAddr::new(a.host, p));
    config.seed_base = a.seed_base;
    config.waiting_timeout = a.waiting_timeout;
    config.game = GameConfig {
        time_limit: a.time_limit,
        templates: Arc::new(match &a.templates {
            Some(p) => load_templates(p)?,
            None => GmTemplates::default(),
        }),
    };
    config.types = Arc::new(types);
    config.images = Arc::new(images);
    Ok(config)
}

fn serve(a: ServeArgs) -> Result<()> {
    let config = server_config(&a)?;
    let runtime = tokio::runtime::Runtime::new()?;
    runtime.block_on(async move {
        let log_dir = config.log_dir.clone();
        let server = Server::bind(config).await?;
        tracing::info!(ws = %server.ws_addr()?, bot = ?server.bot_addr(), log_dir = %log_dir.display(), "listening");
        server.run().await?;
        Ok(())
    })
}

pub fn simulate(a: &SimulateArgs) -> Result<BatchStats> {
    let (types, images) = a.data.load()?;
    let mut config = BatchConfig::new(a.boards, a.policy_a, a.policy_b, a.seed);
    config.board.target_type = a.target_type.clone();
    config.episode.step_cap = a.step_cap;
    let logs = run_batch(&config, &types, &images)?;
    write_logs(&a.out_dir, &logs)?;
    let stats = BatchStats::from_logs(&config, &logs);
    fs::write(a.out_dir.join(SUMMARY_FILE), serde_json::to_string_pretty(&stats)?)?;
    tracing::info!(episodes = logs.len(), out = %a.out_dir.display(), "simulation written");
    Ok(stats)
}

/// `{game}.jsonl` plus `{game}.board.json` per episode, same layout as the server.
pub fn write_logs(dir: &Path, logs: &[EpisodeLog]) -> Result<()> {
    fs::create_dir_all(dir)?;
    for log in logs {
        let alias = fs_alias(&log.game_id);
        fs::write(dir.join(format!("{alias}.jsonl")), log.to_jsonl())?;
        fs::write(dir.join(format!("{alias}.board.json")), log.board.to_json())?;
    }
    Ok(())
}

pub fn analyze(a: &AnalyzeArgs) -> Result<CorpusStats> {
    if a.prefix_k == 0 {
        bail!("--prefix-k must be at least 1");
    }
    let corpus = load_logs(&a.input, a.format)?;
    for skip in &corpus.skipped {
        tracing::warn!(path = %skip.path.display(), reason = %skip.reason, "skipped");
    }
    let stats = corpus_stats(
        &corpus.logs,
        &StatsConfig {
            crosstalk_threshold_s: a.crosstalk_threshold,
            count_rejected_moves: a.count_rejected_moves,
        },
    )?;
    write_out(Some(&a.out), &serde_json::to_string_pretty(&stats)?)?;
    if let Some(dir) = &a.histograms {
        fs::create_dir_all(dir)?;
        for which in TurnSelection::ALL {
            let path = dir.join(format!("{}_k{}.csv", which.as_str(), a.prefix_k));
            let mut w = csv::Writer::from_path(&path)?;
            w.write_record(["prefix", "count"])?;
            for (prefix, count) in prefix_histogram(&corpus.logs, which, a.prefix_k) {
                w.write_record([prefix, count.to_string()])?;
            }
            w.flush()?;
        }
    }
    if !corpus.skipped.is_empty() {
        eprintln!("{} file(s) skipped", corpus.skipped.len());
    }
    Ok(stats)
}

pub fn random_token() -> String {
    rand::rng().sample_iter(&Alphanumeric).take(24).map(char::from).collect()
}

fn bot(a: BotArgs) -> Result<BotReport> {
    let data = DataArgs {
        catalog: None,
        manifest: a.manifest.clone(),
    };
    let (_, images) = data.load()?;
    let config = BotConfig {
        addr: a.addr,
        token: a.token.unwrap_or_else(random_token),
        worker_id: a.worker_id,
        policy: a.policy,
        seed: a.seed,
        think: Duration::from_millis(a.think_ms),
        max_decisions: a.max_decisions,
        images: Arc::new(images),
    };
    let runtime = tokio::runtime::Runtime::new()?;
    Ok(runtime.block_on(run_bot(config))?)
}

fn catalog(a: &DataArgs) -> Result<()> {
    let (types, images) = a.load()?;
    for c in RoomCategory::ALL {
        println!("{}: {}", c.section_name(), types.names(c).len());
    }
    let ids: usize = types.all_names().map(|n| images.pool(n).len()).sum();
    println!("images: {ids}");
    Ok(())
}

