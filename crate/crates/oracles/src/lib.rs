//! Slow, obviously-correct reference computations. Nothing here imports the
//! engine: boards arrive as plain `(col, row)` tuples and logs as raw JSON.

use std::collections::{BTreeMap, BTreeSet};

use serde_json::{json, Map, Value};

pub type Cell = (i32, i32);
pub type Link = (Cell, Cell);

fn index_of(nodes: &[Cell], c: Cell) -> Option<usize> {
    nodes.iter().position(|&n| n == c)
}

fn adjacent(a: Cell, b: Cell) -> bool {
    (a.0 - b.0).abs() + (a.1 - b.1).abs() == 1
}

/// Every pair of grid-adjacent cells in `nodes`.
pub fn induced_edges(nodes: &[Cell]) -> BTreeSet<(Cell, Cell)> {
    let mut out = BTreeSet::new();
    for &a in nodes {
        for &b in nodes {
            if a < b && adjacent(a, b) {
                out.insert((a, b));
            }
        }
    }
    out
}

fn linked(edges: &[Link], a: Cell, b: Cell) -> bool {
    edges.iter().any(|&(x, y)| (x == a && y == b) || (x == b && y == a))
}

pub fn degree(edges: &[Link], c: Cell) -> usize {
    edges.iter().filter(|&&(x, y)| x == c || y == c).count()
}

/// Breadth-first search from the first node.
pub fn is_connected(nodes: &[Cell], edges: &[Link]) -> bool {
    let Some(&start) = nodes.first() else {
        return true;
    };
    let mut seen = vec![start];
    let mut frontier = vec![start];
    while let Some(c) = frontier.pop() {
        for &n in nodes {
            if !seen.contains(&n) && linked(edges, c, n) {
                seen.push(n);
                frontier.push(n);
            }
        }
    }
    seen.len() == nodes.len()
}

/// All-pairs shortest path lengths, indexed like `nodes`.
pub fn floyd_warshall(nodes: &[Cell], edges: &[Link]) -> Vec<Vec<Option<usize>>> {
    let n = nodes.len();
    let mut d = vec![vec![None; n]; n];
    for i in 0..n {
        d[i][i] = Some(0);
        for j in 0..n {
            if i != j && linked(edges, nodes[i], nodes[j]) {
                d[i][j] = Some(1);
            }
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if let (Some(a), Some(b)) = (d[i][k], d[k][j]) {
                    if d[i][j].is_none_or(|c| a + b < c) {
                        d[i][j] = Some(a + b);
                    }
                }
            }
        }
    }
    d
}

pub fn distance(nodes: &[Cell], edges: &[Link], from: Cell, to: Cell) -> Option<usize> {
    let (i, j) = (index_of(nodes, from)?, index_of(nodes, to)?);
    floyd_warshall(nodes, edges)[i][j]
}

/// Follows `path` (as "north"/"south"/"east"/"west") from `from` along edges.
pub fn walk(edges: &[Link], from: Cell, path: &[&str]) -> Option<Cell> {
    let mut at = from;
    for step in path {
        let next = match *step {
            "north" => (at.0, at.1 - 1),
            "south" => (at.0, at.1 + 1),
            "east" => (at.0 + 1, at.1),
            "west" => (at.0 - 1, at.1),
            _ => return None,
        };
        if !linked(edges, at, next) {
            return None;
        }
        at = next;
    }
    Some(at)
}

/// The three end classes, by name.
pub fn three_way_outcome(a: Cell, b: Cell, target_rooms: &[Cell]) -> &'static str {
    let a_in = target_rooms.contains(&a);
    let b_in = target_rooms.contains(&b);
    if !a_in || !b_in {
        "not_in_target_type"
    } else if a == b {
        "success"
    } else {
        "same_type_different_room"
    }
}

fn oracle_tokens(text: &str) -> Vec<String> {
    let mut words = Vec::new();
    let mut current = String::new();
    for ch in text.chars() {
        if ch.is_whitespace() {
            if !current.is_empty() {
                words.push(std::mem::take(&mut current));
            }
        } else {
            current.push(ch);
        }
    }
    if !current.is_empty() {
        words.push(current);
    }
    let mut out = Vec::new();
    for w in words {
        let chars: Vec<char> = w.chars().collect();
        let mut start = 0;
        let mut end = chars.len();
        while start < end && !chars[start].is_alphanumeric() {
            start += 1;
        }
        while end > start && !chars[end - 1].is_alphanumeric() {
            end -= 1;
        }
        if start < end {
            let kept: String = chars[start..end].iter().collect();
            out.push(kept.to_lowercase());
        }
    }
    out
}

fn ms(v: &Value) -> i64 {
    (v.as_f64().expect("numeric ts") * 1000.0).round() as i64
}

struct RawTurn {
    actor: usize,
    at: i64,
    text: String,
}

fn player(v: &Value) -> Option<usize> {
    match v.as_str() {
        Some("A") => Some(0),
        Some("B") => Some(1),
        _ => None,
    }
}

fn div(a: f64, b: f64) -> Value {
    json!(a / b)
}

/// Recomputes every corpus statistic from raw log files (one per string,
/// newline delimited). Keys and number formats follow the engine's JSON
/// output so the two can be compared field by field.
pub fn corpus_stats(files: &[String], crosstalk_threshold_s: f64, count_rejected: bool) -> Map<String, Value> {
    let mut dialogues: Vec<(String, Vec<Value>)> = files
        .iter()
        .map(|f| {
            let lines: Vec<Value> = f
                .lines()
                .filter(|l| !l.trim().is_empty())
                .map(|l| serde_json::from_str(l).expect("valid json"))
                .collect();
            let id = lines[0]["game_id"].as_str().unwrap().to_string();
            (id, lines)
        })
        .collect();
    dialogues.sort_by(|a, b| a.0.cmp(&b.0));
    let n = dialogues.len();
    let threshold = (crosstalk_threshold_s * 1000.0).round() as i64;

    let mut outcome_counts: BTreeMap<String, usize> = BTreeMap::new();
    let mut total_turns = 0usize;
    let mut total_tokens = 0usize;
    let mut total_moves = 0usize;
    let mut total_ms = 0i64;
    let mut all_types: BTreeSet<String> = BTreeSet::new();
    let mut iou: Vec<Value> = Vec::new();
    let mut iou_sum = 0.0;
    let mut iou_n = 0usize;
    let mut tok_ratio_sum = 0.0;
    let mut tok_ratio_n = 0usize;
    let mut turn_ratio_sum = 0.0;
    let mut turn_ratio_n = 0usize;
    let mut dwell: Vec<i64> = Vec::new();
    let mut silent = 0usize;
    let mut talking = 0usize;
    let mut talking_turns = 0usize;
    let mut crosstalk = 0usize;
    let mut gaps: Vec<i64> = Vec::new();
    let mut questions = 0usize;
    let mut worker_games: BTreeMap<String, usize> = BTreeMap::new();

    for (_, lines) in &dialogues {
        let mut turns: Vec<RawTurn> = Vec::new();
        let mut open_visit: [Option<usize>; 2] = [None, None];
        let mut last_entry: [Option<i64>; 2] = [None, None];
        let mut workers: BTreeSet<String> = BTreeSet::new();
        total_ms += ms(&lines[lines.len() - 1]["ts"]) - ms(&lines[0]["ts"]);
        for line in lines {
            let kind = line["kind"].as_str().unwrap();
            let payload = &line["payload"];
            let at = ms(&line["ts"]);
            match kind {
                "say" => {
                    if let Some(p) = player(&line["actor"]) {
                        let text = payload["text"].as_str().unwrap().to_string();
                        if let Some(c) = open_visit[p].as_mut() {
                            *c += 1;
                        }
                        turns.push(RawTurn { actor: p, at, text });
                    }
                }
                "move" => total_moves += 1,
                "join" => {
                    if let Some(w) = payload["worker_id"].as_str() {
                        workers.insert(w.to_string());
                    }
                }
                "outcome" => {
                    *outcome_counts
                        .entry(payload["outcome"].as_str().unwrap().to_string())
                        .or_default() += 1;
                }
                "gm_private" => {
                    let to = player(&payload["to"]).unwrap();
                    match payload["template"].as_str().unwrap() {
                        "exits_notice" => {
                            if let Some(c) = open_visit[to].take() {
                                if c == 0 {
                                    silent += 1;
                                } else {
                                    talking += 1;
                                    talking_turns += c;
                                }
                            }
                            open_visit[to] = Some(0);
                            if let Some(prev) = last_entry[to] {
                                dwell.push(at - prev);
                            }
                            last_entry[to] = Some(at);
                        }
                        "invalid_move" if count_rejected => total_moves += 1,
                        _ => {}
                    }
                }
                _ => {}
            }
        }
        for c in open_visit.into_iter().flatten() {
            if c == 0 {
                silent += 1;
            } else {
                talking += 1;
                talking_turns += c;
            }
        }
        for w in workers {
            *worker_games.entry(w).or_default() += 1;
        }

        let mut vocab: [BTreeSet<String>; 2] = [BTreeSet::new(), BTreeSet::new()];
        let mut tokens = [0usize; 2];
        let mut counts = [0usize; 2];
        for (i, t) in turns.iter().enumerate() {
            let toks = oracle_tokens(&t.text);
            tokens[t.actor] += toks.len();
            counts[t.actor] += 1;
            for tok in toks {
                all_types.insert(tok.clone());
                vocab[t.actor].insert(tok);
            }
            let last_char = t.text.chars().rev().find(|c| !c.is_whitespace());
            if last_char == Some('?') {
                questions += 1;
            }
            if let Some(prev) = turns[..i].iter().rev().find(|p| p.actor != t.actor) {
                if t.at - prev.at <= threshold {
                    crosstalk += 1;
                }
            }
            if i > 0 && turns[i - 1].actor != t.actor {
                gaps.push(t.at - turns[i - 1].at);
            }
        }
        total_turns += counts[0] + counts[1];
        total_tokens += tokens[0] + tokens[1];
        let union = vocab[0].iter().chain(vocab[1].iter()).collect::<BTreeSet<_>>().len();
        let inter = vocab[0].iter().filter(|t| vocab[1].contains(*t)).count();
        if union == 0 {
            iou.push(Value::Null);
        } else {
            let v = inter as f64 / union as f64;
            iou_sum += v;
            iou_n += 1;
            iou.push(json!(v));
        }
        let (lo, hi) = (tokens[0].min(tokens[1]), tokens[0].max(tokens[1]));
        if lo > 0 {
            tok_ratio_sum += hi as f64 / lo as f64;
            tok_ratio_n += 1;
        }
        let (lo, hi) = (counts[0].min(counts[1]), counts[0].max(counts[1]));
        if lo > 0 {
            turn_ratio_sum += hi as f64 / lo as f64;
            turn_ratio_n += 1;
        }
    }

    let nf = n as f64;
    let opt = |num: f64, den: usize| if den == 0 { Value::Null } else { div(num, den as f64) };
    let n_with_outcome: usize = outcome_counts.values().sum();
    let mut fractions = Map::new();
    for (k, v) in &outcome_counts {
        fractions.insert(k.clone(), div(*v as f64, n_with_outcome as f64));
    }

    dwell.sort();
    let median_dwell = match dwell.len() {
        0 => Value::Null,
        len if len % 2 == 1 => json!(dwell[len / 2] as f64 / 1000.0),
        len => json!((dwell[len / 2 - 1] + dwell[len / 2]) as f64 / 2.0 / 1000.0),
    };

    gaps.sort();
    let k = gaps.len();
    let (mean_gap, sd, first3q) = if k == 0 {
        (Value::Null, Value::Null, Value::Null)
    } else {
        let s: i64 = gaps.iter().sum();
        let kk = k as i128;
        let deviations: i128 = gaps
            .iter()
            .map(|&g| {
                let d = kk * g as i128 - s as i128;
                d * d
            })
            .sum();
        let var = (deviations / kk) as f64 / (kk * kk) as f64;
        let h = 0.75 * (k - 1) as f64;
        let lo = h.floor() as usize;
        let hi = if lo + 1 < k { lo + 1 } else { lo };
        let q3 = gaps[lo] as f64 + (h - lo as f64) * (gaps[hi] - gaps[lo]) as f64;
        let kept: Vec<i64> = gaps.iter().copied().filter(|&g| (g as f64) <= q3).collect();
        let kept_sum: i64 = kept.iter().sum();
        (
            json!(s as f64 / k as f64 / 1000.0),
            json!(var.sqrt() / 1000.0),
            json!(kept_sum as f64 / kept.len() as f64 / 1000.0),
        )
    };

    let mut histogram: BTreeMap<usize, usize> = BTreeMap::new();
    for g in worker_games.values() {
        *histogram.entry(*g).or_default() += 1;
    }
    let mut hist = Map::new();
    for (g, w) in histogram {
        hist.insert(g.to_string(), json!(w));
    }

    let mut out = Map::new();
    out.insert("n_dialogues".into(), json!(n));
    out.insert("n_with_outcome".into(), json!(n_with_outcome));
    out.insert("outcome_fractions".into(), Value::Object(fractions));
    out.insert("total_turns".into(), json!(total_turns));
    out.insert("mean_turns".into(), div(total_turns as f64, nf));
    out.insert("total_tokens".into(), json!(total_tokens));
    out.insert("mean_tokens_per_dialogue".into(), div(total_tokens as f64, nf));
    out.insert("mean_tokens_per_turn".into(), opt(total_tokens as f64, total_turns));
    out.insert("mean_seconds".into(), json!(total_ms as f64 / nf / 1000.0));
    out.insert("n_types".into(), json!(all_types.len()));
    out.insert("type_token_ratio".into(), opt(all_types.len() as f64, total_tokens));
    out.insert(
        "vocab_overlap_iou".into(),
        json!({"per_dialogue": iou, "mean": opt(iou_sum, iou_n)}),
    );
    out.insert("total_moves".into(), json!(total_moves));
    out.insert("mean_moves_per_dialogue".into(), div(total_moves as f64, nf));
    out.insert("move_say_ratio".into(), opt(total_moves as f64, total_turns));
    out.insert("median_room_dwell_s".into(), median_dwell);
    out.insert("mean_silent_rooms".into(), div(silent as f64, (2 * n) as f64));
    out.insert("mean_turns_when_talking".into(), opt(talking_turns as f64, talking));
    out.insert("contribution_ratio_tokens".into(), opt(tok_ratio_sum, tok_ratio_n));
    out.insert("contribution_ratio_turns".into(), opt(turn_ratio_sum, turn_ratio_n));
    out.insert("crosstalk_total".into(), json!(crosstalk));
    out.insert("crosstalk_per_dialogue".into(), div(crosstalk as f64, nf));
    out.insert("n_gaps".into(), json!(k));
    out.insert("mean_gap_s".into(), mean_gap);
    out.insert("gap_sd".into(), sd);
    out.insert("mean_gap_first3q".into(), first3q);
    out.insert("n_questions".into(), json!(questions));
    out.insert("questions_per_dialogue".into(), div(questions as f64, nf));
    out.insert("n_workers".into(), json!(worker_games.len()));
    out.insert("games_per_worker".into(), Value::Object(hist));
    out
}
