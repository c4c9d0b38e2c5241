use std::io::{BufRead, BufReader};
use std::path::Path;
use std::process::{Command, Output, Stdio};

use meetup_core::gameboard::validate_board;
use meetup_core::{Gameboard, TypeCatalog};

fn meetup(args: &[&str]) -> Output {
    let out = Command::new(env!("CARGO_BIN_EXE_meetup")).args(args).output().unwrap();
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    out
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn genmap_is_deterministic_and_valid() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    meetup(&["genmap", "--seed", "17", "--target-type", "kitchen", "--out", p(&a)]);
    meetup(&["genmap", "--seed", "17", "--target-type", "kitchen", "--out", p(&b)]);
    let text = std::fs::read_to_string(&a).unwrap();
    assert_eq!(text, std::fs::read_to_string(&b).unwrap());
    let board = Gameboard::from_json(&text, &TypeCatalog::builtin()).unwrap();
    assert_eq!(board.target_type().name, "kitchen");
    assert!(validate_board(&board).is_empty());

    let stdout = meetup(&["genmap", "--seed", "17", "--target-type", "kitchen", "--walk-edges-only"]).stdout;
    let walk = Gameboard::from_json(std::str::from_utf8(&stdout).unwrap(), &TypeCatalog::builtin()).unwrap();
    assert!(walk.graph().edges().len() <= board.graph().edges().len());
}

#[test]
fn genmap_rejects_non_target_types() {
    let out = Command::new(env!("CARGO_BIN_EXE_meetup"))
        .args(["genmap", "--target-type", "yard"])
        .output()
        .unwrap();
    assert!(!out.status.success());
}

#[test]
fn simulate_then_analyze() {
    let dir = tempfile::tempdir().unwrap();
    let sim = dir.path().join("sim");
    meetup(&["simulate", "--boards", "12", "--policy-a", "describer", "--policy-b", "wanderer", "--seed", "5", "--out-dir", p(&sim)]);
    let logs = std::fs::read_dir(&sim)
        .unwrap()
        .filter(|e| e.as_ref().unwrap().path().extension().is_some_and(|x| x == "jsonl"))
        .count();
    assert_eq!(logs, 12);
    let summary = json(&sim.join("summary.json"));
    assert_eq!(summary["episodes"], 12);
    let total: u64 = summary["outcome_counts"].as_object().unwrap().values().map(|v| v.as_u64().unwrap()).sum();
    assert_eq!(total, 12);

    let stats_path = dir.path().join("stats.json");
    let hist = dir.path().join("hist");
    meetup(&["analyze", "--in", p(&sim), "--out", p(&stats_path), "--prefix-k", "2", "--histograms", p(&hist)]);
    let stats = json(&stats_path);
    assert_eq!(stats["n_dialogues"], 12);
    let mut rdr = csv::Reader::from_path(hist.join("first_turns_k2.csv")).unwrap();
    assert_eq!(rdr.headers().unwrap(), vec!["prefix", "count"]);
    let counted: usize = rdr.records().map(|r| r.unwrap()[1].parse::<usize>().unwrap()).sum();
    // at most one opening per player per dialogue
    assert!(counted <= 24 && counted > 0);

    // same seed, same bytes
    let again = dir.path().join("again");
    meetup(&["simulate", "--boards", "12", "--policy-a", "describer", "--policy-b", "wanderer", "--seed", "5", "--out-dir", p(&again)]);
    for entry in std::fs::read_dir(&sim).unwrap() {
        let path = entry.unwrap().path();
        let name = path.file_name().unwrap();
        assert_eq!(std::fs::read(&path).unwrap(), std::fs::read(again.join(name)).unwrap());
    }
}

#[test]
fn analyze_reports_corrupt_files_and_keeps_going() {
    let dir = tempfile::tempdir().unwrap();
    let sim = dir.path().join("sim");
    meetup(&["simulate", "--boards", "3", "--seed", "2", "--out-dir", p(&sim)]);
    std::fs::write(sim.join("zz-broken.jsonl"), "{\"ts\": oops\n").unwrap();
    let stats_path = dir.path().join("stats.json");
    let out = meetup(&["analyze", "--in", p(&sim), "--out", p(&stats_path)]);
    assert_eq!(json(&stats_path)["n_dialogues"], 3);
    assert!(String::from_utf8_lossy(&out.stderr).contains("1 file(s) skipped"));
}

#[test]
fn analyze_fails_on_empty_input() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_meetup"))
        .args(["analyze", "--in", p(dir.path()), "--out", p(&dir.path().join("s.json"))])
        .output()
        .unwrap();
    assert!(!out.status.success());
}

/// Starts `meetup serve` on free ports and returns the child with its addresses.
fn spawn_server(log_flag: &Path, env_dir: &Path) -> (std::process::Child, String) {
    let mut child = Command::new(env!("CARGO_BIN_EXE_meetup"))
        .args(["serve", "--port", "0", "--bot-port", "0", "--time-limit", "60", "--log-dir", p(log_flag)])
        .env("MEETUP_LOG_DIR", env_dir)
        .env("RUST_LOG", "info")
        .env("NO_COLOR", "1")
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    let mut lines = BufReader::new(child.stderr.take().unwrap()).lines();
    let bot = loop {
        let line = lines.next().expect("server is up").unwrap();
        if let Some(rest) = line.split("bot=Some(").nth(1) {
            break rest.split(')').next().unwrap().to_string();
        }
    };
    // keep draining so the server never blocks on a full pipe
    std::thread::spawn(move || for _ in lines {});
    (child, bot)
}

#[test]
fn bots_play_against_a_served_game() {
    let dir = tempfile::tempdir().unwrap();
    let (flag_dir, env_dir) = (dir.path().join("flag"), dir.path().join("env"));
    let (mut server, bot_addr) = spawn_server(&flag_dir, &env_dir);
    let bot = |i: u32| {
        Command::new(env!("CARGO_BIN_EXE_meetup"))
            .args(["bot", "--addr", &bot_addr, "--seed", &i.to_string(), "--think-ms", "5", "--max-decisions", "2000"])
            .stdout(Stdio::piped())
            .spawn()
            .unwrap()
    };
    let a = bot(1);
    std::thread::sleep(std::time::Duration::from_millis(200));
    let b = bot(2);
    let ra: serde_json::Value = serde_json::from_slice(&a.wait_with_output().unwrap().stdout).unwrap();
    let rb: serde_json::Value = serde_json::from_slice(&b.wait_with_output().unwrap().stdout).unwrap();
    server.kill().unwrap();
    server.wait().unwrap();
    assert_eq!(ra["game_id"], rb["game_id"]);
    assert!(ra["outcome"].is_string());
    assert_eq!(ra["outcome"], rb["outcome"]);
    let game = ra["game_id"].as_str().unwrap();
    assert!(env_dir.join(format!("{game}.jsonl")).exists());
    assert!(!flag_dir.exists());
}
