#![allow(dead_code)]

use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Duration;

use futures_util::{SinkExt, StreamExt};
use meetup_core::gameboard::SharedBoard;
use meetup_core::{Event, Gameboard, TypeCatalog};
use meetup_server::{decode_server, encode_client, ClientMessage, Server, ServerConfig, ServerMessage};
use tokio::net::TcpStream;
use tokio_tungstenite::tungstenite::Message;
use tokio_tungstenite::{MaybeTlsStream, WebSocketStream};
use tokio_util::codec::{Framed, LinesCodec};

pub const WAIT: Duration = Duration::from_secs(10);

pub struct TestServer {
    pub ws: SocketAddr,
    pub bot: SocketAddr,
    pub dir: tempfile::TempDir,
    task: tokio::task::JoinHandle<()>,
}

impl Drop for TestServer {
    fn drop(&mut self) {
        self.task.abort();
    }
}

pub async fn start(tweak: impl FnOnce(&mut ServerConfig)) -> TestServer {
    let dir = tempfile::tempdir().unwrap();
    let mut config = ServerConfig::new(dir.path());
    config.ws_addr = "127.0.0.1:0".parse().unwrap();
    config.bot_addr = Some("127.0.0.1:0".parse().unwrap());
    config.tick = Duration::from_millis(20);
    config.seed_base = 1000;
    tweak(&mut config);
    let server = Server::bind(config).await.unwrap();
    let ws = server.ws_addr().unwrap();
    let bot = server.bot_addr().unwrap();
    let task = tokio::spawn(async move {
        server.run().await.unwrap();
    });
    TestServer { ws, bot, dir, task }
}

impl TestServer {
    pub fn log_path(&self, game_id: &str) -> PathBuf {
        self.dir.path().join(format!("{game_id}.jsonl"))
    }

    pub fn events(&self, game_id: &str) -> Vec<Event> {
        read_events(&self.log_path(game_id))
    }

    pub fn board(&self, game_id: &str) -> SharedBoard {
        let text = std::fs::read_to_string(self.dir.path().join(format!("{game_id}.board.json"))).unwrap();
        Arc::new(Gameboard::from_json(&text, &TypeCatalog::builtin()).unwrap())
    }
}

pub fn read_events(path: &Path) -> Vec<Event> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .map(|l| Event::from_json_line(l).unwrap())
        .collect()
}

pub enum Client {
    Lines(Framed<TcpStream, LinesCodec>),
    Ws(WebSocketStream<MaybeTlsStream<TcpStream>>),
}

impl Client {
    pub async fn lines(addr: SocketAddr) -> Self {
        Self::Lines(Framed::new(TcpStream::connect(addr).await.unwrap(), LinesCodec::new()))
    }

    pub async fn ws(addr: SocketAddr) -> Self {
        let (ws, _) = tokio_tungstenite::connect_async(format!("ws://{addr}/")).await.unwrap();
        Self::Ws(ws)
    }

    pub async fn send_raw(&mut self, text: &str) {
        match self {
            Self::Lines(f) => f.send(text.to_string()).await.unwrap(),
            Self::Ws(ws) => ws.send(Message::text(text)).await.unwrap(),
        }
    }

    pub async fn send(&mut self, msg: ClientMessage) {
        self.send_raw(&encode_client(&msg)).await;
    }

    pub async fn hello(&mut self, token: &str) {
        self.send(ClientMessage::Hello {
            token: token.into(),
            worker_id: Some(format!("w-{}", &token[..4])),
        })
        .await;
    }

    /// Next raw line, or `None` once the server closed the connection.
    pub async fn recv_raw(&mut self) -> Option<String> {
        tokio::time::timeout(WAIT, async {
            match self {
                Self::Lines(f) => f.next().await.map(|l| l.unwrap()),
                Self::Ws(ws) => loop {
                    match ws.next().await {
                        Some(Ok(Message::Text(t))) => return Some(t.to_string()),
                        Some(Ok(Message::Close(_))) | None | Some(Err(_)) => return None,
                        Some(Ok(_)) => continue,
                    }
                },
            }
        })
        .await
        .expect("server replied in time")
    }

    pub async fn recv(&mut self) -> ServerMessage {
        let line = self.recv_raw().await.expect("connection open");
        decode_server(&line).unwrap()
    }

    /// Reads until `pred` matches, returning everything read including the match.
    pub async fn recv_until(&mut self, pred: impl Fn(&ServerMessage) -> bool) -> Vec<ServerMessage> {
        let mut out = Vec::new();
        loop {
            let m = self.recv().await;
            let stop = pred(&m);
            out.push(m);
            if stop {
                return out;
            }
        }
    }

    /// Reads raw lines until the server closes the connection.
    pub async fn drain(&mut self) -> Vec<String> {
        let mut out = Vec::new();
        while let Some(l) = self.recv_raw().await {
            out.push(l);
        }
        out
    }
}

pub fn token(i: u32) -> String {
    format!("tok{i:04}-0123456789abcdef")
}

pub fn is_paired(m: &ServerMessage) -> bool {
    matches!(m, ServerMessage::Paired { .. })
}

pub fn is_outcome(m: &ServerMessage) -> bool {
    matches!(m, ServerMessage::Outcome { .. })
}

pub fn game_id(msgs: &[ServerMessage]) -> String {
    msgs.iter()
        .find_map(|m| match m {
            ServerMessage::Paired { game_id, .. } => Some(game_id.clone()),
            _ => None,
        })
        .expect("paired")
}

/// Connects two clients and waits until both are paired. Returns the game id.
pub async fn pair(a: &mut Client, b: &mut Client, ta: &str, tb: &str) -> String {
    a.hello(ta).await;
    a.recv_until(|m| matches!(m, ServerMessage::Gm { .. })).await;
    b.hello(tb).await;
    let ma = a.recv_until(is_paired).await;
    let mb = b.recv_until(is_paired).await;
    assert_eq!(game_id(&ma), game_id(&mb));
    game_id(&ma)
}
