use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use super::dialogue::{games_by_worker, to_ms, ActionKind, DialogueLog};
use super::tokenize::{is_question, tokenize};
use super::AnalyticsError;
use crate::game::PlayerId;

pub const DEFAULT_CROSSTALK_THRESHOLD: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StatsConfig {
    /// A turn counts as crosstalk if it follows the partner's previous turn
    /// within this many seconds (inclusive).
    pub crosstalk_threshold_s: f64,
    /// Count moves the GM refused as navigation actions.
    pub count_rejected_moves: bool,
}

impl Default for StatsConfig {
    fn default() -> Self {
        Self {
            crosstalk_threshold_s: DEFAULT_CROSSTALK_THRESHOLD,
            count_rejected_moves: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IouSummary {
    /// One entry per dialogue in game id order; `None` when neither player
    /// produced a token.
    pub per_dialogue: Vec<Option<f64>>,
    pub mean: Option<f64>,
}

/// Descriptive statistics over a set of dialogues. Ratios whose denominator
/// is zero are `None`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorpusStats {
    pub n_dialogues: usize,
    pub n_with_outcome: usize,
    pub outcome_fractions: BTreeMap<String, f64>,
    pub total_turns: usize,
    pub mean_turns: f64,
    pub total_tokens: usize,
    pub mean_tokens_per_dialogue: f64,
    pub mean_tokens_per_turn: Option<f64>,
    pub mean_seconds: f64,
    pub n_types: usize,
    pub type_token_ratio: Option<f64>,
    pub vocab_overlap_iou: IouSummary,
    pub total_moves: usize,
    pub mean_moves_per_dialogue: f64,
    pub move_say_ratio: Option<f64>,
    pub median_room_dwell_s: Option<f64>,
    pub mean_silent_rooms: f64,
    pub mean_turns_when_talking: Option<f64>,
    pub contribution_ratio_tokens: Option<f64>,
    pub contribution_ratio_turns: Option<f64>,
    pub crosstalk_total: usize,
    pub crosstalk_per_dialogue: f64,
    pub n_gaps: usize,
    pub mean_gap_s: Option<f64>,
    pub gap_sd: Option<f64>,
    pub mean_gap_first3q: Option<f64>,
    pub n_questions: usize,
    pub questions_per_dialogue: f64,
    pub n_workers: usize,
    /// Number of games played → number of workers who played that many.
    pub games_per_worker: BTreeMap<usize, usize>,
}

fn ratio(num: usize, den: usize) -> Option<f64> {
    (den > 0).then(|| num as f64 / den as f64)
}

fn mean(values: impl IntoIterator<Item = f64>) -> Option<f64> {
    let (mut sum, mut n) = (0.0, 0usize);
    for v in values {
        sum += v;
        n += 1;
    }
    (n > 0).then(|| sum / n as f64)
}

/// Linear interpolation between closest ranks, on sorted input.
pub fn quantile(sorted: &[i64], q: f64) -> Option<f64> {
    let last = sorted.len().checked_sub(1)?;
    let pos = q * last as f64;
    let lo = pos.floor() as usize;
    let hi = (lo + 1).min(last);
    let frac = pos - lo as f64;
    Some(sorted[lo] as f64 + frac * (sorted[hi] - sorted[lo]) as f64)
}

fn median_ms(sorted: &[i64]) -> Option<f64> {
    let n = sorted.len();
    match n {
        0 => None,
        _ if n % 2 == 1 => Some(sorted[n / 2] as f64),
        _ => Some((sorted[n / 2 - 1] + sorted[n / 2]) as f64 / 2.0),
    }
}

/// Max over min of two per-player counts; `None` if either is zero.
fn contribution(a: usize, b: usize) -> Option<f64> {
    let (lo, hi) = (a.min(b), a.max(b));
    (lo > 0).then(|| hi as f64 / lo as f64)
}

/// Turns arriving within the threshold of the partner's previous turn.
pub fn crosstalk_count(log: &DialogueLog, threshold_s: f64) -> usize {
    let threshold = to_ms(threshold_s);
    let mut last: [Option<i64>; 2] = [None, None];
    let mut count = 0;
    for t in &log.turns {
        let at = to_ms(t.ts);
        if let Some(prev) = last[t.actor.other().index()] {
            if at - prev <= threshold {
                count += 1;
            }
        }
        last[t.actor.index()] = Some(at);
    }
    count
}

/// Pauses between consecutive turns of different speakers, in milliseconds.
pub fn speaker_change_gaps(log: &DialogueLog) -> Vec<i64> {
    log.turns
        .windows(2)
        .filter(|w| w[0].actor != w[1].actor)
        .map(|w| to_ms(w[1].ts) - to_ms(w[0].ts))
        .collect()
}

pub fn corpus_stats(logs: &[DialogueLog], config: &StatsConfig) -> Result<CorpusStats, AnalyticsError> {
    if logs.is_empty() {
        return Err(AnalyticsError::EmptyCorpus);
    }
    let mut logs: Vec<&DialogueLog> = logs.iter().collect();
    logs.sort_by(|a, b| a.game_id.cmp(&b.game_id));
    let n = logs.len();

    let mut outcomes = BTreeMap::<String, usize>::new();
    let (mut total_turns, mut total_tokens, mut total_moves, mut total_ms) = (0, 0, 0, 0i64);
    let mut vocabulary = BTreeSet::<String>::new();
    let mut iou = Vec::with_capacity(n);
    let (mut ratio_tokens, mut ratio_turns) = (Vec::new(), Vec::new());
    let mut dwell = Vec::new();
    let (mut silent, mut talking, mut talking_turns) = (0usize, 0usize, 0usize);
    let mut crosstalk_total = 0;
    let mut gaps = Vec::new();
    let mut n_questions = 0;

    for log in &logs {
        if let Some(o) = log.outcome {
            *outcomes.entry(o.as_str().to_string()).or_default() += 1;
        }
        total_ms += log.duration_ms();
        total_moves += log.count_actions(ActionKind::Move);
        if config.count_rejected_moves {
            total_moves += log.count_actions(ActionKind::RejectedMove);
        }

        let mut vocab: [BTreeSet<String>; 2] = Default::default();
        let mut tokens = [0usize; 2];
        let mut turns = [0usize; 2];
        for t in &log.turns {
            let toks = tokenize(&t.text);
            let p = t.actor.index();
            tokens[p] += toks.len();
            turns[p] += 1;
            if is_question(&t.text) {
                n_questions += 1;
            }
            vocab[p].extend(toks);
        }
        total_turns += turns[0] + turns[1];
        total_tokens += tokens[0] + tokens[1];
        let union: BTreeSet<&String> = vocab[0].union(&vocab[1]).collect();
        let inter = vocab[0].intersection(&vocab[1]).count();
        iou.push(ratio(inter, union.len()));
        vocabulary.extend(union.into_iter().cloned());
        ratio_tokens.extend(contribution(tokens[0], tokens[1]));
        ratio_turns.extend(contribution(turns[0], turns[1]));

        for p in PlayerId::BOTH {
            dwell.extend(log.dwell_ms(p));
            for c in log.turns_per_visit(p) {
                if c == 0 {
                    silent += 1;
                } else {
                    talking += 1;
                    talking_turns += c;
                }
            }
        }
        crosstalk_total += crosstalk_count(log, config.crosstalk_threshold_s);
        gaps.extend(speaker_change_gaps(log));
    }

    dwell.sort_unstable();
    gaps.sort_unstable();
    let n_gaps = gaps.len();
    let gap_sum: i64 = gaps.iter().sum();
    let (mean_gap_s, gap_sd, mean_gap_first3q) = if n_gaps == 0 {
        (None, None, None)
    } else {
        let k = n_gaps as i128;
        let sum = gap_sum as i128;
        let sum_sq: i128 = gaps.iter().map(|&g| (g as i128) * (g as i128)).sum();
        let var = (k * sum_sq - sum * sum) as f64 / (k * k) as f64;
        let q3 = quantile(&gaps, 0.75).expect("non-empty");
        let lower: Vec<i64> = gaps.iter().copied().filter(|&g| g as f64 <= q3).collect();
        let lower_sum: i64 = lower.iter().sum();
        (
            Some(gap_sum as f64 / n_gaps as f64 / 1000.0),
            Some(var.sqrt() / 1000.0),
            Some(lower_sum as f64 / lower.len() as f64 / 1000.0),
        )
    };

    let n_with_outcome: usize = outcomes.values().sum();
    let per_worker = games_by_worker(logs.iter().copied());
    let mut games_per_worker = BTreeMap::<usize, usize>::new();
    for &games in per_worker.values() {
        *games_per_worker.entry(games).or_default() += 1;
    }

    Ok(CorpusStats {
        n_dialogues: n,
        n_with_outcome,
        outcome_fractions: outcomes
            .into_iter()
            .map(|(k, v)| (k, v as f64 / n_with_outcome as f64))
            .collect(),
        total_turns,
        mean_turns: total_turns as f64 / n as f64,
        total_tokens,
        mean_tokens_per_dialogue: total_tokens as f64 / n as f64,
        mean_tokens_per_turn: ratio(total_tokens, total_turns),
        mean_seconds: total_ms as f64 / n as f64 / 1000.0,
        n_types: vocabulary.len(),
        type_token_ratio: ratio(vocabulary.len(), total_tokens),
        vocab_overlap_iou: IouSummary {
            mean: mean(iou.iter().flatten().copied()),
            per_dialogue: iou,
        },
        total_moves,
        mean_moves_per_dialogue: total_moves as f64 / n as f64,
        move_say_ratio: ratio(total_moves, total_turns),
        median_room_dwell_s: median_ms(&dwell).map(|m| m / 1000.0),
        mean_silent_rooms: silent as f64 / (2 * n) as f64,
        mean_turns_when_talking: ratio(talking_turns, talking),
        contribution_ratio_tokens: mean(ratio_tokens),
        contribution_ratio_turns: mean(ratio_turns),
        crosstalk_total,
        crosstalk_per_dialogue: crosstalk_total as f64 / n as f64,
        n_gaps,
        mean_gap_s,
        gap_sd,
        mean_gap_first3q,
        n_questions,
        questions_per_dialogue: n_questions as f64 / n as f64,
        n_workers: per_worker.len(),
        games_per_worker,
    })
}
