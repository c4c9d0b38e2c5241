//! Listeners, the lobby hub and per-game tasks.
//!
//! One hub task owns the lobby; each game runs in its own task and sees its
//! inputs strictly in arrival order. Connections only hold channels.

use std::collections::{HashMap, HashSet};
use std::future::ready;
use std::io;
use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;
use std::time::{Duration, Instant, SystemTime, UNIX_EPOCH};

use futures_util::{Sink, SinkExt, Stream, StreamExt};
use meetup_core::catalog::fs_alias;
use meetup_core::game::{GameConfig, TemplateName};
use meetup_core::gameboard::{generate_board, BoardConfig};
use meetup_core::{ImageCatalog, PlayerId, TypeCatalog};
use tokio::net::{TcpListener, TcpStream};
use tokio::sync::mpsc::{unbounded_channel, UnboundedReceiver, UnboundedSender};
use tokio_tungstenite::tungstenite::Message;
use tokio_util::codec::{Framed, LinesCodec};

use crate::lobby::{LobbyState, SessionToken, DEFAULT_WAITING_TIMEOUT};
use crate::protocol::{decode_client, encode, ClientMessage, ErrorCode, ServerMessage};
use crate::route::{Delivery, GameSession};
use crate::sink::FileSink;

pub const MAX_LINE_BYTES: usize = 64 * 1024;
pub const WAITING_TEXT: &str = "Waiting for a partner to join.";

#[derive(Debug, Clone)]
pub struct ServerConfig {
    pub ws_addr: SocketAddr,
    /// Newline-framed TCP port for bot clients.
    pub bot_addr: Option<SocketAddr>,
    pub log_dir: PathBuf,
    pub seed_base: u64,
    pub board: BoardConfig,
    pub game: GameConfig,
    pub waiting_timeout: f64,
    /// How often the lobby and running games check their clocks.
    pub tick: Duration,
    pub types: Arc<TypeCatalog>,
    pub images: Arc<ImageCatalog>,
}

impl ServerConfig {
    pub fn new(log_dir: impl Into<PathBuf>) -> Self {
        let types = TypeCatalog::builtin();
        let images = ImageCatalog::synthetic(&types, 6);
        Self {
            ws_addr: SocketAddr::from(([127, 0, 0, 1], 8765)),
            bot_addr: None,
            log_dir: log_dir.into(),
            seed_base: 0,
            board: BoardConfig::default(),
            game: GameConfig::default(),
            waiting_timeout: DEFAULT_WAITING_TIMEOUT,
            tick: Duration::from_secs(1),
            types: Arc::new(types),
            images: Arc::new(images),
        }
    }
}

/// Wall-clock seconds that never run backwards within one server process.
#[derive(Debug, Clone, Copy)]
struct Clock {
    epoch: f64,
    start: Instant,
}

impl Clock {
    fn start() -> Self {
        let epoch = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs_f64())
            .unwrap_or(0.0);
        Self {
            epoch,
            start: Instant::now(),
        }
    }

    fn now(&self) -> f64 {
        ((self.epoch + self.start.elapsed().as_secs_f64()) * 1000.0).round() / 1000.0
    }
}

enum ToConn {
    Msg(ServerMessage),
    Attach {
        player: PlayerId,
        game: UnboundedSender<GameInput>,
    },
    Close,
}

struct GameInput {
    player: PlayerId,
    /// `None` when the connection went away.
    msg: Option<ClientMessage>,
}

enum ToHub {
    Join {
        token: SessionToken,
        worker_id: Option<String>,
        conn: UnboundedSender<ToConn>,
    },
    Gone {
        token: SessionToken,
        conn: UnboundedSender<ToConn>,
    },
    Ended {
        tokens: [SessionToken; 2],
    },
}

pub struct Server {
    ws: TcpListener,
    bot: Option<TcpListener>,
    config: Arc<ServerConfig>,
}

impl Server {
    /// Binds both listeners. Port 0 picks a free port; see [`Server::ws_addr`].
    pub async fn bind(config: ServerConfig) -> io::Result<Self> {
        std::fs::create_dir_all(&config.log_dir)?;
        let ws = TcpListener::bind(config.ws_addr).await?;
        let bot = match config.bot_addr {
            Some(addr) => Some(TcpListener::bind(addr).await?),
            None => None,
        };
        Ok(Self {
            ws,
            bot,
            config: Arc::new(config),
        })
    }

    pub fn ws_addr(&self) -> io::Result<SocketAddr> {
        self.ws.local_addr()
    }

    pub fn bot_addr(&self) -> Option<SocketAddr> {
        self.bot.as_ref().and_then(|l| l.local_addr().ok())
    }

    /// Serves until the task is dropped.
    pub async fn run(self) -> io::Result<()> {
        let clock = Clock::start();
        let (hub_tx, hub_rx) = unbounded_channel();
        tokio::spawn(hub(self.config.clone(), clock, hub_rx, hub_tx.clone()));
        let ws = accept_loop(self.ws, hub_tx.clone(), Transport::WebSocket);
        match self.bot {
            Some(bot) => {
                tokio::try_join!(ws, accept_loop(bot, hub_tx, Transport::Lines))?;
            }
            None => ws.await?,
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy)]
enum Transport {
    WebSocket,
    Lines,
}

async fn accept_loop(listener: TcpListener, hub: UnboundedSender<ToHub>, transport: Transport) -> io::Result<()> {
    loop {
        let (stream, peer) = match listener.accept().await {
            Ok(x) => x,
            Err(e) => {
                tracing::warn!(%e, "accept failed");
                tokio::time::sleep(Duration::from_millis(50)).await;
                continue;
            }
        };
        tracing::debug!(%peer, ?transport, "connection");
        let hub = hub.clone();
        tokio::spawn(async move {
            match transport {
                Transport::WebSocket => serve_ws(stream, hub).await,
                Transport::Lines => serve_lines(stream, hub).await,
            }
        });
    }
}

async fn serve_ws(stream: TcpStream, hub: UnboundedSender<ToHub>) {
    let ws = match tokio_tungstenite::accept_async(stream).await {
        Ok(ws) => ws,
        Err(e) => {
            tracing::debug!(%e, "websocket handshake failed");
            return;
        }
    };
    let (sink, stream) = ws.split();
    let reader = stream
        .take_while(|m| ready(matches!(m, Ok(m) if !m.is_close())))
        .filter_map(|m| {
            ready(match m {
                Ok(Message::Text(t)) => Some(t.to_string()),
                _ => None,
            })
        });
    let writer = sink.with(|s: String| ready(Ok::<_, tokio_tungstenite::tungstenite::Error>(Message::text(s))));
    serve_connection(Box::pin(reader), Box::pin(writer), hub).await;
}

async fn serve_lines(stream: TcpStream, hub: UnboundedSender<ToHub>) {
    let (sink, stream) = Framed::new(stream, LinesCodec::new_with_max_length(MAX_LINE_BYTES)).split();
    let reader = stream
        .take_while(|l| ready(l.is_ok()))
        .filter_map(|l| ready(l.ok()));
    serve_connection(Box::pin(reader), sink, hub).await;
}

async fn write<W: Sink<String> + Unpin>(w: &mut W, msg: &ServerMessage) -> bool {
    w.send(encode(msg)).await.is_ok()
}

/// Drives one client over any text-message transport.
async fn serve_connection<R, W>(mut reader: R, mut writer: W, hub: UnboundedSender<ToHub>)
where
    R: Stream<Item = String> + Unpin,
    W: Sink<String> + Unpin,
{
    let (tx, mut rx) = unbounded_channel();
    let mut token: Option<SessionToken> = None;
    let mut game: Option<(PlayerId, UnboundedSender<GameInput>)> = None;
    loop {
        tokio::select! {
            line = reader.next() => {
                let Some(line) = line else { break };
                let msg = match decode_client(&line) {
                    Ok(m) => m,
                    Err(e) => {
                        if !write(&mut writer, &e.reply()).await {
                            break;
                        }
                        continue;
                    }
                };
                if let Some((player, g)) = &game {
                    let _ = g.send(GameInput { player: *player, msg: Some(msg) });
                    continue;
                }
                let reply = match msg {
                    ClientMessage::Hello { token: raw, worker_id } if token.is_none() => {
                        match SessionToken::parse(&raw) {
                            Some(t) => {
                                token = Some(t.clone());
                                let _ = hub.send(ToHub::Join { token: t, worker_id, conn: tx.clone() });
                                None
                            }
                            None => Some(ServerMessage::error(ErrorCode::UnknownToken, "token is not a valid session token")),
                        }
                    }
                    ClientMessage::Hello { .. } => Some(ServerMessage::error(ErrorCode::Unexpected, "hello was already received")),
                    ClientMessage::Bye {} => break,
                    _ if token.is_none() => Some(ServerMessage::error(ErrorCode::Unexpected, "send hello first")),
                    _ => Some(ServerMessage::error(ErrorCode::Unexpected, "not paired yet")),
                };
                if let Some(reply) = reply {
                    if !write(&mut writer, &reply).await {
                        break;
                    }
                }
            }
            out = rx.recv() => match out {
                Some(ToConn::Msg(m)) => {
                    if !write(&mut writer, &m).await {
                        break;
                    }
                }
                Some(ToConn::Attach { player, game: g }) => game = Some((player, g)),
                Some(ToConn::Close) | None => break,
            },
        }
    }
    match (game, token) {
        (Some((player, g)), _) => {
            let _ = g.send(GameInput { player, msg: None });
        }
        (None, Some(token)) => {
            let _ = hub.send(ToHub::Gone { token, conn: tx });
        }
        (None, None) => {}
    }
    let _ = writer.close().await;
}

struct Waiter {
    worker_id: Option<String>,
    conn: UnboundedSender<ToConn>,
}

async fn hub(
    config: Arc<ServerConfig>,
    clock: Clock,
    mut rx: UnboundedReceiver<ToHub>,
    me: UnboundedSender<ToHub>,
) {
    let mut lobby = LobbyState::new(config.waiting_timeout);
    let mut waiters: HashMap<SessionToken, Waiter> = HashMap::new();
    let mut active: HashSet<SessionToken> = HashSet::new();
    let mut games = 0u64;
    let mut ticker = tokio::time::interval(config.tick);
    loop {
        tokio::select! {
            msg = rx.recv() => match msg {
                None => break,
                Some(ToHub::Join { token, worker_id, conn }) => {
                    if active.contains(&token) || !lobby.join(token.clone(), clock.now()) {
                        let _ = conn.send(ToConn::Msg(ServerMessage::error(ErrorCode::TokenInUse, "token is already connected")));
                        let _ = conn.send(ToConn::Close);
                        continue;
                    }
                    let _ = conn.send(ToConn::Msg(ServerMessage::Gm { text: WAITING_TEXT.into() }));
                    waiters.insert(token, Waiter { worker_id, conn });
                }
                Some(ToHub::Gone { token, conn }) => {
                    // a refused duplicate must not evict the connection that owns the token
                    if waiters.get(&token).is_some_and(|w| w.conn.same_channel(&conn)) {
                        lobby.remove(&token);
                        waiters.remove(&token);
                    }
                }
                Some(ToHub::Ended { tokens }) => {
                    for t in &tokens {
                        active.remove(t);
                    }
                }
            },
            _ = ticker.tick() => {}
        }
        let pairing = lobby.pair_waiting(clock.now());
        for token in pairing.dismissed {
            if let Some(w) = waiters.remove(&token) {
                let text = config.game.templates.text(TemplateName::WaitingDismissed).to_string();
                let _ = w.conn.send(ToConn::Msg(ServerMessage::Gm { text }));
                let _ = w.conn.send(ToConn::Msg(ServerMessage::Dismissed {}));
                let _ = w.conn.send(ToConn::Close);
            }
        }
        for (ta, tb) in pairing.pairs {
            let (Some(a), Some(b)) = (waiters.remove(&ta), waiters.remove(&tb)) else {
                continue;
            };
            let seed = config.seed_base.wrapping_add(games);
            games += 1;
            active.insert(ta.clone());
            active.insert(tb.clone());
            let tokens = [ta, tb];
            match start_game(&config, clock, seed, [a, b], tokens.clone(), me.clone()) {
                Ok(game_id) => tracing::info!(game_id, seed, "game started"),
                Err(e) => {
                    tracing::error!(%e, seed, "could not start a game");
                    for t in &tokens {
                        active.remove(t);
                    }
                }
            }
        }
    }
}

fn start_game(
    config: &ServerConfig,
    clock: Clock,
    seed: u64,
    players: [Waiter; 2],
    tokens: [SessionToken; 2],
    hub: UnboundedSender<ToHub>,
) -> Result<String, String> {
    let conns = players.each_ref().map(|w| w.conn.clone());
    let fail = |text: String| {
        for c in &conns {
            let _ = c.send(ToConn::Msg(ServerMessage::error(ErrorCode::SinkFailure, "the game could not be started")));
            let _ = c.send(ToConn::Close);
        }
        text
    };
    let board = generate_board(seed, &config.board, &config.types, &config.images).map_err(|e| fail(e.to_string()))?;
    let game_id = format!("game-{seed}");
    std::fs::write(
        config.log_dir.join(format!("{}.board.json", fs_alias(&game_id))),
        board.to_json(),
    )
    .map_err(|e| fail(e.to_string()))?;
    let sink = FileSink::create(&config.log_dir, &game_id).map_err(|e| fail(e.to_string()))?;
    let [a, b] = players;
    let (session, opening) = GameSession::start(
        &game_id,
        Arc::new(board),
        &config.game,
        [a.worker_id, b.worker_id],
        Box::new(sink),
        clock.now(),
    )
    .map_err(|e| fail(e.to_string()))?;
    let (game_tx, game_rx) = unbounded_channel();
    for (p, c) in PlayerId::BOTH.into_iter().zip(&conns) {
        let _ = c.send(ToConn::Attach {
            player: p,
            game: game_tx.clone(),
        });
    }
    // the game task ends on its own once the outcome is out
    drop(game_tx);
    tokio::spawn(run_game(session, opening, conns, game_rx, clock, config.tick, hub, tokens));
    Ok(game_id)
}

fn dispatch(conns: &[UnboundedSender<ToConn>; 2], deliveries: Vec<Delivery>) {
    for d in deliveries {
        let _ = conns[d.to.index()].send(ToConn::Msg(d.msg));
    }
}

#[allow(clippy::too_many_arguments)]
async fn run_game(
    mut session: GameSession,
    opening: Vec<Delivery>,
    conns: [UnboundedSender<ToConn>; 2],
    mut rx: UnboundedReceiver<GameInput>,
    clock: Clock,
    tick: Duration,
    hub: UnboundedSender<ToHub>,
    tokens: [SessionToken; 2],
) {
    dispatch(&conns, opening);
    let mut ticker = tokio::time::interval(tick);
    while !session.is_finished() {
        let deliveries = tokio::select! {
            input = rx.recv() => match input {
                Some(GameInput { player, msg: Some(msg) }) => session.route(player, msg, clock.now()),
                Some(GameInput { player, msg: None }) => session.leave(player, clock.now()),
                None => break,
            },
            _ = ticker.tick() => {
                let mut out = session.tick(clock.now());
                // a connection that vanished before it could report back
                if let Some(p) = PlayerId::BOTH.into_iter().find(|p| conns[p.index()].is_closed()) {
                    out.extend(session.leave(p, clock.now()));
                }
                out
            }
        };
        dispatch(&conns, deliveries);
    }
    for c in &conns {
        let _ = c.send(ToConn::Close);
    }
    let _ = hub.send(ToHub::Ended { tokens });
}
