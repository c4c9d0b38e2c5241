mod support;

use meetup_core::agents::{run_batch, BatchConfig, PolicyKind};
use meetup_core::analytics::{
    corpus_stats, load_logs, parse_native, prefix_histogram, DialogueLog, LogFormat, StatsConfig, TurnSelection,
};
use meetup_oracles as oracle;
use proptest::prelude::*;
use support::catalogs;

fn simulated(n: usize, seed: u64, a: PolicyKind, b: PolicyKind) -> Vec<String> {
    let (types, images) = catalogs();
    run_batch(&BatchConfig::new(n, a, b, seed), &types, &images)
        .unwrap()
        .iter()
        .map(|l| l.to_jsonl())
        .collect()
}

fn dialogues(files: &[String]) -> Vec<DialogueLog> {
    files.iter().map(|f| parse_native(f).unwrap()).collect()
}

#[test]
fn every_field_matches_the_raw_event_recomputation() {
    let mut files = simulated(25, 1, PolicyKind::Describer, PolicyKind::Describer);
    files.extend(simulated(25, 2, PolicyKind::Wanderer, PolicyKind::Describer));
    for (threshold, rejected) in [(2.0, false), (5.0, true)] {
        let ours = corpus_stats(
            &dialogues(&files),
            &StatsConfig { crosstalk_threshold_s: threshold, count_rejected_moves: rejected },
        )
        .unwrap();
        let ours = serde_json::to_value(&ours).unwrap();
        let theirs = oracle::corpus_stats(&files, threshold, rejected);
        let ours = ours.as_object().unwrap();
        assert_eq!(ours.len(), theirs.len());
        for (k, v) in &theirs {
            assert_eq!(&ours[k], v, "field {k}");
        }
    }
}

#[test]
fn batch_size_equals_dialogue_count() {
    let files = simulated(12, 3, PolicyKind::Wanderer, PolicyKind::Wanderer);
    let dir = tempfile::tempdir().unwrap();
    for (i, f) in files.iter().enumerate() {
        std::fs::write(dir.path().join(format!("{i}.jsonl")), f).unwrap();
    }
    let corpus = load_logs(dir.path(), LogFormat::Native).unwrap();
    let stats = corpus_stats(&corpus.logs, &StatsConfig::default()).unwrap();
    assert_eq!(stats.n_dialogues, 12);
    assert!(corpus.skipped.is_empty());
    let fractions: f64 = stats.outcome_fractions.values().sum();
    assert!((fractions - 1.0).abs() < 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn statistics_ignore_input_order(seed in 0u64..1000, rotation in 0usize..10) {
        let logs = dialogues(&simulated(10, seed, PolicyKind::Wanderer, PolicyKind::Describer));
        let mut shuffled = logs.clone();
        shuffled.rotate_left(rotation);
        shuffled.reverse();
        let config = StatsConfig::default();
        let x = corpus_stats(&logs, &config).unwrap();
        let y = corpus_stats(&shuffled, &config).unwrap();
        prop_assert_eq!(&x, &y);
        if let Some(ttr) = x.type_token_ratio {
            prop_assert!(ttr > 0.0 && ttr <= 1.0);
        }
        for v in x.vocab_overlap_iou.per_dialogue.iter().flatten() {
            prop_assert!((0.0..=1.0).contains(v));
        }
        for r in [x.contribution_ratio_tokens, x.contribution_ratio_turns].into_iter().flatten() {
            prop_assert!(r >= 1.0);
        }
        for which in TurnSelection::ALL {
            for k in 1..5 {
                let total: usize = prefix_histogram(&logs, which, k).iter().map(|e| e.1).sum();
                let population: usize = logs.iter().map(|l| which.select(l).len()).sum();
                prop_assert_eq!(total, population);
            }
        }
    }
}

#[test]
fn describer_openings_locate_the_speaker() {
    let logs = dialogues(&simulated(10, 4, PolicyKind::Describer, PolicyKind::Describer));
    let h = prefix_histogram(&logs, TurnSelection::FirstTurns, 3);
    assert_eq!(h[0], ("i'm in a".to_string(), 10));
}
