//! One line per acceptance criterion: PASS, FAIL or SKIP with the measured
//! values. Exits non-zero if anything failed.

use std::collections::BTreeMap;
use std::io::{BufRead, BufReader, Write};
use std::net::TcpStream;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use meetup_core::agents::{run_batch, BatchConfig, EpisodeLog, PolicyKind};
use meetup_core::analytics::{corpus_stats, crosstalk_count, load_logs, parse_native, DialogueLog, LogFormat, StatsConfig};
use meetup_core::game::{classify_positions, Actor, EventBody, EventKind};
use meetup_core::gameboard::{generate_board, validate_board, BoardConfig};
use meetup_core::rng::derive_seed;
use meetup_core::{Coord, Direction, Event, GameState, ImageCatalog, Outcome, PlayerId, RoomCategory, TypeCatalog};
use meetup_oracles as oracle;
use meetup_server::{decode_server, encode_client, ClientMessage, Server, ServerConfig, ServerMessage};

const BOARD_SECONDS: f64 = 5.0;
const PUBLISHED_ENV: &str = "MEETUP_PUBLISHED_CORPUS";
const PUBLISHED_DIALOGUES: usize = 430;
const PUBLISHED_MEAN_TURNS: f64 = 13.2;
const PUBLISHED_QUESTIONS: f64 = 1.43;
const PUBLISHED_TOLERANCE: f64 = 0.10;

enum Verdict {
    Pass(String),
    Fail(String),
    Skip(String),
}

fn check(ok: bool, detail: String) -> Verdict {
    if ok {
        Verdict::Pass(detail)
    } else {
        Verdict::Fail(detail)
    }
}

struct Data {
    types: TypeCatalog,
    images: ImageCatalog,
}

fn cell(c: Coord) -> (i32, i32) {
    (c.col, c.row)
}

fn board_invariants(data: &Data) -> Verdict {
    let started = Instant::now();
    let mut boards = Vec::with_capacity(1000);
    for seed in 0..1000 {
        match generate_board(seed, &BoardConfig::default(), &data.types, &data.images) {
            Ok(b) => boards.push(b),
            Err(e) => return Verdict::Fail(format!("seed {seed}: {e}")),
        }
    }
    let elapsed = started.elapsed().as_secs_f64();
    let mut bad = Vec::new();
    for (seed, b) in boards.iter().enumerate() {
        let (nodes, edges) = b.plain_topology();
        let targets = b.graph().nodes().iter().filter(|&&c| b.room_type(c) == Some(b.target_type())).count();
        let leaves_outdoor = b.graph().nodes().iter().all(|&c| {
            oracle::degree(&edges, cell(c)) != 1 || b.room_type(c).is_some_and(|t| t.category == RoomCategory::Outdoor)
        });
        let [s0, s1] = b.starts;
        let starts_ok = s0 != s1 && !b.is_target(s0) && !b.is_target(s1);
        let ok = validate_board(b).is_empty()
            && nodes.len() == 10
            && oracle::is_connected(&nodes, &edges)
            && targets == 4
            && leaves_outdoor
            && starts_ok;
        if !ok {
            bad.push(seed);
        }
    }
    check(
        bad.is_empty() && elapsed < BOARD_SECONDS,
        format!("{}/1000 valid, generated in {elapsed:.2}s (limit {BOARD_SECONDS}s){}", 1000 - bad.len(), failing(&bad)),
    )
}

fn failing(seeds: &[usize]) -> String {
    if seeds.is_empty() {
        String::new()
    } else {
        format!(", failing seeds {:?}", &seeds[..seeds.len().min(5)])
    }
}

fn outcome_oracle(data: &Data) -> Verdict {
    let (mut pairs, mut mismatches) = (0, 0);
    for i in 0..100 {
        let b = generate_board(derive_seed(0xACCE, i), &BoardConfig::default(), &data.types, &data.images).unwrap();
        let targets: Vec<_> = b.layout.target_rooms().map(cell).collect();
        for &x in b.graph().nodes() {
            for &y in b.graph().nodes() {
                pairs += 1;
                if classify_positions(&b, x, y).as_str() != oracle::three_way_outcome(cell(x), cell(y), &targets) {
                    mismatches += 1;
                }
            }
        }
    }
    check(pairs == 10_000 && mismatches == 0, format!("{pairs} position pairs on 100 boards, {mismatches} mismatches"))
}

fn batch(data: &Data, n: usize, a: PolicyKind, b: PolicyKind, seed: u64) -> Vec<EpisodeLog> {
    run_batch(&BatchConfig::new(n, a, b, seed), &data.types, &data.images).unwrap()
}

fn replay_determinism(data: &Data) -> Verdict {
    let mut logs = batch(data, 100, PolicyKind::Describer, PolicyKind::Wanderer, 31);
    logs.extend(batch(data, 100, PolicyKind::Describer, PolicyKind::Describer, 32));
    let mut replay_errors = 0;
    for log in &logs {
        let board = log.board.clone();
        let lines: Vec<Event> = log.to_jsonl().lines().map(|l| Event::from_json_line(l).unwrap()).collect();
        match GameState::replay(board, &lines) {
            Ok(state) if state == log.final_state => {}
            _ => replay_errors += 1,
        }
    }
    let mut again = batch(data, 100, PolicyKind::Describer, PolicyKind::Wanderer, 31);
    again.extend(batch(data, 100, PolicyKind::Describer, PolicyKind::Describer, 32));
    let differing = logs.iter().zip(&again).filter(|(x, y)| x.to_jsonl() != y.to_jsonl()).count();
    check(
        logs.len() == 200 && replay_errors == 0 && differing == 0,
        format!("{} episodes, {replay_errors} replay mismatches, {differing} logs differ on rerun", logs.len()),
    )
}

fn oracle_completeness(data: &Data) -> Verdict {
    let logs = batch(data, 200, PolicyKind::Oracle, PolicyKind::Oracle, 41);
    let mut not_success = 0;
    let mut wrong_moves = 0;
    for log in &logs {
        if log.outcome != Outcome::Success {
            not_success += 1;
        }
        let b = &log.board;
        let (nodes, edges) = b.plain_topology();
        let meet = cell(log.final_state.position(PlayerId::A));
        for p in PlayerId::BOTH {
            let moves = log
                .events
                .iter()
                .filter(|e| e.kind() == EventKind::Move && e.actor.player() == Some(p))
                .count();
            if Some(moves) != oracle::distance(&nodes, &edges, cell(b.starts[p.index()]), meet) {
                wrong_moves += 1;
            }
        }
    }
    check(
        not_success == 0 && wrong_moves == 0,
        format!("{} episodes, {not_success} not successful, {wrong_moves} players off the shortest path", logs.len()),
    )
}

fn outcome_coverage(data: &Data) -> Verdict {
    let logs = batch(data, 500, PolicyKind::Wanderer, PolicyKind::Wanderer, 51);
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for log in &logs {
        *counts.entry(log.outcome.as_str()).or_default() += 1;
    }
    let needed = [Outcome::Success, Outcome::SameTypeDifferentRoom, Outcome::NotInTargetType];
    check(
        needed.iter().all(|o| counts.get(o.as_str()).is_some_and(|&n| n > 0)),
        format!("{} episodes: {counts:?}", logs.len()),
    )
}

fn say(ts: f64, actor: Actor, text: &str) -> Event {
    Event {
        ts,
        game_id: "fixture".into(),
        actor,
        body: EventBody::Say { text: text.into() },
    }
}

fn analytics_exactness(data: &Data) -> Verdict {
    let mut files: Vec<String> = batch(data, 25, PolicyKind::Describer, PolicyKind::Describer, 61)
        .iter()
        .map(EpisodeLog::to_jsonl)
        .collect();
    files.extend(batch(data, 25, PolicyKind::Wanderer, PolicyKind::Describer, 62).iter().map(EpisodeLog::to_jsonl));
    let logs: Vec<DialogueLog> = files.iter().map(|f| parse_native(f).unwrap()).collect();
    let ours = serde_json::to_value(corpus_stats(&logs, &StatsConfig::default()).unwrap()).unwrap();
    let ours = ours.as_object().unwrap();
    let theirs = oracle::corpus_stats(&files, 2.0, false);
    let differing: Vec<&String> = theirs.iter().filter(|(k, v)| ours.get(*k) != Some(v)).map(|(k, _)| k).collect();

    // partner replies 1.9, 2.0 and 2.1 seconds after the previous turn
    let fixture = [
        say(10.0, Actor::A, "where are you"),
        say(11.9, Actor::B, "in the kitchen"),
        say(13.9, Actor::A, "me too"),
        say(16.0, Actor::B, "great"),
    ];
    let fixture_log = DialogueLog::from_events(&fixture).unwrap();
    let ours_ct = crosstalk_count(&fixture_log, 2.0);
    let lines: Vec<String> = fixture.iter().map(Event::to_json_line).collect();
    let theirs_ct = &oracle::corpus_stats(&[lines.join("\n")], 2.0, false)["crosstalk_total"];
    check(
        logs.len() == 50 && ours.len() == theirs.len() && differing.is_empty() && ours_ct == 2 && *theirs_ct == 2,
        format!(
            "{} logs, {} fields compared, differing {differing:?}; crosstalk fixture {ours_ct} (oracle {theirs_ct}, expected 2)",
            logs.len(),
            theirs.len()
        ),
    )
}

struct LineClient {
    reader: BufReader<TcpStream>,
    writer: TcpStream,
    capture: Vec<String>,
}

impl LineClient {
    fn connect(addr: std::net::SocketAddr) -> Self {
        let stream = TcpStream::connect(addr).unwrap();
        stream.set_read_timeout(Some(Duration::from_secs(10))).unwrap();
        Self {
            reader: BufReader::new(stream.try_clone().unwrap()),
            writer: stream,
            capture: Vec::new(),
        }
    }

    fn send(&mut self, msg: ClientMessage) {
        writeln!(self.writer, "{}", encode_client(&msg)).unwrap();
    }

    fn recv(&mut self) -> Option<ServerMessage> {
        let mut line = String::new();
        if self.reader.read_line(&mut line).ok()? == 0 {
            return None;
        }
        let line = line.trim_end().to_string();
        let msg = decode_server(&line).ok();
        self.capture.push(line);
        msg
    }

    fn until(&mut self, pred: impl Fn(&ServerMessage) -> bool) -> Vec<ServerMessage> {
        let mut out = Vec::new();
        while let Some(m) = self.recv() {
            let stop = pred(&m);
            out.push(m);
            if stop {
                break;
            }
        }
        out
    }
}

fn server_privacy(log_dir: PathBuf) -> Verdict {
    let runtime = tokio::runtime::Runtime::new().unwrap();
    let mut config = ServerConfig::new(&log_dir);
    config.ws_addr = "127.0.0.1:0".parse().unwrap();
    config.bot_addr = Some("127.0.0.1:0".parse().unwrap());
    config.tick = Duration::from_millis(20);
    let server = runtime.block_on(Server::bind(config)).unwrap();
    let addr = server.bot_addr().unwrap();
    runtime.spawn(server.run());

    let mut a = LineClient::connect(addr);
    let mut b = LineClient::connect(addr);
    a.send(ClientMessage::Hello { token: "acceptance-player-a".into(), worker_id: None });
    a.until(|m| matches!(m, ServerMessage::Gm { .. }));
    b.send(ClientMessage::Hello { token: "acceptance-player-b".into(), worker_id: None });
    let paired = |m: &ServerMessage| matches!(m, ServerMessage::Paired { .. });
    a.until(paired);
    let game_id = b.until(paired).iter().find_map(|m| match m {
        ServerMessage::Paired { game_id, .. } => Some(game_id.clone()),
        _ => None,
    });

    let mut said = Vec::new();
    let mut a_images = Vec::new();
    for round in 0..4 {
        for d in Direction::ALL {
            a.send(ClientMessage::Move { direction: d });
            let reply = a.until(|m| matches!(m, ServerMessage::Observation { .. } | ServerMessage::Gm { .. }));
            if let Some(ServerMessage::Observation { image, .. }) = reply.last() {
                a_images.push(image.clone());
                a.until(|m| matches!(m, ServerMessage::Gm { .. }));
            }
        }
        let text = format!("a speaks in round {round}");
        a.send(ClientMessage::Say { text: text.clone() });
        a.until(|m| matches!(m, ServerMessage::SayEcho { .. }));
        said.push(text);
    }
    a.send(ClientMessage::Done {});
    b.send(ClientMessage::Done {});
    let outcome = |m: &ServerMessage| matches!(m, ServerMessage::Outcome { .. });
    a.until(outcome);
    b.until(|_| false);

    let b_msgs: Vec<ServerMessage> = b.capture.iter().filter_map(|l| decode_server(l).ok()).collect();
    let b_own: Vec<&String> = b_msgs
        .iter()
        .filter_map(|m| match m {
            ServerMessage::Observation { image, .. } => Some(image),
            _ => None,
        })
        .collect();
    // B never moved: its one observation is its start room, anything else would be A's
    let leaked = a_images
        .iter()
        .filter(|img| !b_own.contains(img) && b.capture.iter().any(|l| l.contains(img.as_str())))
        .count()
        + b_own.len().saturating_sub(1)
        + b.capture.iter().filter(|l| l.contains("can't go")).count();
    let heard: Vec<&String> = b_msgs
        .iter()
        .filter_map(|m| match m {
            ServerMessage::PartnerSay { text } => Some(text),
            _ => None,
        })
        .collect();
    let delivered = said.iter().filter(|s| heard.contains(s)).count();
    let logged = game_id.is_some_and(|g| {
        let path = log_dir.join(format!("{g}.jsonl"));
        std::fs::read_to_string(path).is_ok_and(|t| !t.contains("acceptance-player"))
    });
    check(
        leaked == 0 && delivered == said.len() && logged && !a_images.is_empty(),
        format!(
            "B captured {} messages: {leaked} A move/observation payloads, {delivered}/{} A says; A moved {} times",
            b.capture.len(),
            said.len(),
            a_images.len()
        ),
    )
}

fn published_corpus() -> Verdict {
    let Some(dir) = std::env::var_os(PUBLISHED_ENV) else {
        return Verdict::Skip(format!("set {PUBLISHED_ENV} to the released corpus directory"));
    };
    let corpus = match load_logs(dir.as_ref(), LogFormat::Published) {
        Ok(c) => c,
        Err(e) => return Verdict::Fail(e.to_string()),
    };
    let stats = match corpus_stats(&corpus.logs, &StatsConfig::default()) {
        Ok(s) => s,
        Err(e) => return Verdict::Fail(e.to_string()),
    };
    let n = stats.n_dialogues;
    let within = |x: f64, target: f64| (x - target).abs() <= PUBLISHED_TOLERANCE * target;
    let questions = stats.questions_per_dialogue;
    check(
        n == PUBLISHED_DIALOGUES
            && within(stats.mean_turns, PUBLISHED_MEAN_TURNS)
            && within(questions, PUBLISHED_QUESTIONS),
        format!(
            "{n} dialogues (expected {PUBLISHED_DIALOGUES}), mean turns {:.2} (13.2 ±10%), questions/dialogue {questions:.2} (1.43 ±10%), {} skipped",
            stats.mean_turns,
            corpus.skipped.len()
        ),
    )
}

type Criterion<'a> = (&'static str, Box<dyn FnOnce() -> Verdict + 'a>);

fn main() {
    // cargo passes harness flags such as --nocapture; nothing here takes arguments
    let types = TypeCatalog::builtin();
    let images = ImageCatalog::synthetic(&types, 6);
    let data = Data { types, images };
    let tmp = tempfile::tempdir().unwrap();
    let criteria: Vec<Criterion<'_>> = vec![
        ("board-invariants", Box::new(|| board_invariants(&data))),
        ("outcome-oracle", Box::new(|| outcome_oracle(&data))),
        ("replay-determinism", Box::new(|| replay_determinism(&data))),
        ("oracle-completeness", Box::new(|| oracle_completeness(&data))),
        ("outcome-coverage", Box::new(|| outcome_coverage(&data))),
        ("analytics-exactness", Box::new(|| analytics_exactness(&data))),
        ("server-privacy", Box::new(|| server_privacy(tmp.path().join("server")))),
        ("published-corpus", Box::new(published_corpus)),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        match run() {
            Verdict::Pass(d) => println!("PASS {name}: {d}"),
            Verdict::Fail(d) => {
                failed += 1;
                println!("FAIL {name}: {d}");
            }
            Verdict::Skip(d) => println!("SKIP {name}: {d}"),
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
