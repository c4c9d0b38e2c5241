use std::hint::black_box;
use std::sync::Arc;

use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use meetup_bench::{catalogs, episodes};
use meetup_core::agents::{run_episode, EpisodeConfig, PolicyKind};
use meetup_core::analytics::{corpus_stats, parse_native, StatsConfig};
use meetup_core::gameboard::{generate_board, BoardConfig};
use meetup_core::{Event, GameState};

fn boards(c: &mut Criterion) {
    let (types, images) = catalogs();
    let config = BoardConfig::default();
    let mut seed = 0;
    c.bench_function("generate_board", |b| {
        b.iter(|| {
            seed += 1;
            generate_board(black_box(seed), &config, &types, &images).unwrap()
        })
    });
}

fn episodes_bench(c: &mut Criterion) {
    let (types, images) = catalogs();
    let board = Arc::new(generate_board(7, &BoardConfig::default(), &types, &images).unwrap());
    let config = EpisodeConfig::default();
    for kind in [PolicyKind::Oracle, PolicyKind::Wanderer, PolicyKind::Describer] {
        c.bench_function(&format!("run_episode/{kind}"), |b| {
            b.iter(|| run_episode("bench", board.clone(), kind, kind, black_box(3), &config).unwrap())
        });
    }
}

fn replay(c: &mut Criterion) {
    let log = episodes(1, PolicyKind::Describer, PolicyKind::Describer, 5).remove(0);
    let events: Vec<Event> = log.to_jsonl().lines().map(|l| Event::from_json_line(l).unwrap()).collect();
    c.bench_function("replay", |b| b.iter(|| GameState::replay(log.board.clone(), black_box(&events)).unwrap()));
    let text = log.to_jsonl();
    c.bench_function("parse_event_log", |b| {
        b.iter(|| {
            text.lines()
                .map(|l| Event::from_json_line(black_box(l)).unwrap())
                .collect::<Vec<_>>()
        })
    });
}

fn analytics(c: &mut Criterion) {
    let files: Vec<String> = episodes(200, PolicyKind::Describer, PolicyKind::Wanderer, 9)
        .iter()
        .map(|l| l.to_jsonl())
        .collect();
    let logs: Vec<_> = files.iter().map(|f| parse_native(f).unwrap()).collect();
    let config = StatsConfig::default();
    c.bench_function("corpus_stats/200", |b| {
        b.iter_batched(|| logs.clone(), |logs| corpus_stats(&logs, &config).unwrap(), BatchSize::SmallInput)
    });
}

criterion_group!(benches, boards, episodes_bench, replay, analytics);
criterion_main!(benches);
