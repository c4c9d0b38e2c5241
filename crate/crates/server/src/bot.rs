//! A scripted player that connects over the bot port and drives one of the
//! honest agent policies from wire messages alone.

use std::io;
use std::net::SocketAddr;
use std::sync::Arc;
use std::time::Duration;

use futures_util::{SinkExt, StreamExt};
use meetup_core::agents::{
    honest_policy, AgentMemory, AgentView, PolicyKind, RoomFingerprint, WandererParams,
};
use meetup_core::rng::stream_rng;
use meetup_core::{Action, Direction, ImageCatalog};
use tokio::net::TcpStream;
use tokio_util::codec::{Framed, LinesCodec};

use crate::net::MAX_LINE_BYTES;
use crate::protocol::{decode_server, encode_client, ClientMessage, ServerMessage};

#[derive(Debug, Clone)]
pub struct BotConfig {
    pub addr: SocketAddr,
    pub token: String,
    pub worker_id: Option<String>,
    pub policy: PolicyKind,
    pub seed: u64,
    /// Pause between decisions.
    pub think: Duration,
    /// Says bye after this many decisions without an outcome.
    pub max_decisions: usize,
    /// Used to recognise the room type behind an image identifier.
    pub images: Arc<ImageCatalog>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BotReport {
    pub game_id: Option<String>,
    pub outcome: Option<String>,
    pub dismissed: bool,
    pub actions_sent: usize,
    pub errors: Vec<String>,
}

struct Perception {
    target_type: String,
    room: Option<RoomFingerprint>,
    room_type: Option<String>,
    inbox: Vec<String>,
    pending_move: Option<Direction>,
}

pub async fn run_bot(config: BotConfig) -> io::Result<BotReport> {
    let mut policy = honest_policy(config.policy, WandererParams::default()).ok_or_else(|| {
        io::Error::new(io::ErrorKind::InvalidInput, "the oracle needs the board and cannot play over the wire")
    })?;
    let stream = TcpStream::connect(config.addr).await?;
    let mut conn = Framed::new(stream, LinesCodec::new_with_max_length(MAX_LINE_BYTES));
    let send = |msg: ClientMessage| encode_client(&msg);
    conn.send(send(ClientMessage::Hello {
        token: config.token.clone(),
        worker_id: config.worker_id.clone(),
    }))
    .await
    .map_err(io::Error::other)?;

    let mut rng = stream_rng(config.seed, 0);
    let mut report = BotReport::default();
    let mut seen = Perception {
        target_type: String::new(),
        room: None,
        room_type: None,
        inbox: Vec::new(),
        pending_move: None,
    };
    let mut memory: Option<AgentMemory> = None;
    let started = tokio::time::Instant::now();
    let mut ticker = tokio::time::interval(config.think);
    let mut decisions = 0;
    let mut leaving = false;
    loop {
        tokio::select! {
            line = conn.next() => {
                let Some(Ok(line)) = line else { break };
                let msg = match decode_server(&line) {
                    Ok(m) => m,
                    Err(e) => {
                        report.errors.push(e.text);
                        continue;
                    }
                };
                let clock = started.elapsed().as_secs_f64();
                match msg {
                    ServerMessage::Paired { game_id, target_type } => {
                        report.game_id = Some(game_id);
                        seen.target_type = target_type;
                    }
                    ServerMessage::Observation { image, exits } => {
                        let room = RoomFingerprint { image, exits: exits.into_iter().collect() };
                        seen.room_type = config.images.type_of(&room.image).map(str::to_string);
                        match (&mut memory, seen.pending_move.take()) {
                            (None, _) => memory = Some(AgentMemory::starting_in(room.clone())),
                            (Some(m), Some(via)) => m.entered(room.clone(), via),
                            (Some(_), None) => {}
                        }
                        seen.room = Some(room);
                    }
                    ServerMessage::Gm { .. } => seen.pending_move = None,
                    // recorded when sent: the next decision may come before the echo
                    ServerMessage::SayEcho { .. } => {}
                    ServerMessage::PartnerSay { text } => {
                        if let Some(m) = &mut memory {
                            m.heard(&text, clock);
                        }
                        seen.inbox.push(text);
                    }
                    ServerMessage::Error { code, text } => {
                        report.errors.push(format!("{code:?}: {text}"));
                    }
                    ServerMessage::Outcome { kind } => report.outcome = Some(kind),
                    ServerMessage::Dismissed {} => report.dismissed = true,
                }
            }
            _ = ticker.tick() => {
                let (Some(memory), Some(room)) = (&mut memory, &seen.room) else { continue };
                // a move is answered by an observation or a refusal before we go on
                if leaving || report.outcome.is_some() || seen.pending_move.is_some() {
                    continue;
                }
                if decisions >= config.max_decisions {
                    // the server answers with the outcome and closes
                    leaving = true;
                    if conn.send(send(ClientMessage::Bye {})).await.is_err() {
                        break;
                    }
                    continue;
                }
                decisions += 1;
                let view = AgentView {
                    room: room.clone(),
                    room_type: seen.room_type.clone(),
                    target_type: seen.target_type.clone(),
                    inbox: std::mem::take(&mut seen.inbox),
                    clock: started.elapsed().as_secs_f64(),
                };
                let msg = match policy.decide(&view, memory, &mut rng) {
                    Some(Action::Say(text)) => {
                        memory.said(&text, view.clock);
                        ClientMessage::Say { text }
                    }
                    Some(Action::Move(direction)) => {
                        seen.pending_move = Some(direction);
                        ClientMessage::Move { direction }
                    }
                    Some(Action::Done) => ClientMessage::Done {},
                    None => continue,
                };
                report.actions_sent += 1;
                if conn.send(send(msg)).await.is_err() {
                    break;
                }
            }
        }
    }
    Ok(report)
}
