use std::collections::VecDeque;
use std::fmt;

pub const DEFAULT_WAITING_TIMEOUT: f64 = 120.0;
pub const MIN_TOKEN_LEN: usize = 16;

/// Bearer token a client presents in its hello. Never written to logs.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SessionToken(String);

impl SessionToken {
    /// At least 16 characters from `[A-Za-z0-9_-]`.
    pub fn parse(raw: &str) -> Option<Self> {
        let ok = raw.chars().count() >= MIN_TOKEN_LEN
            && raw.chars().all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_');
        ok.then(|| Self(raw.to_string()))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Debug for SessionToken {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // enough to tell tokens apart in traces without leaking them
        write!(f, "SessionToken({}…)", &self.0[..4])
    }
}

/// FIFO waiting room.
#[derive(Debug, Clone)]
pub struct LobbyState {
    waiting: VecDeque<(SessionToken, f64)>,
    pub waiting_timeout: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Pairing {
    pub pairs: Vec<(SessionToken, SessionToken)>,
    pub dismissed: Vec<SessionToken>,
}

impl LobbyState {
    pub fn new(waiting_timeout: f64) -> Self {
        Self {
            waiting: VecDeque::new(),
            waiting_timeout,
        }
    }

    pub fn join(&mut self, token: SessionToken, now: f64) -> bool {
        if self.contains(&token) {
            return false;
        }
        self.waiting.push_back((token, now));
        true
    }

    pub fn contains(&self, token: &SessionToken) -> bool {
        self.waiting.iter().any(|(t, _)| t == token)
    }

    pub fn remove(&mut self, token: &SessionToken) -> bool {
        let before = self.waiting.len();
        self.waiting.retain(|(t, _)| t != token);
        self.waiting.len() != before
    }

    pub fn waiting(&self) -> impl Iterator<Item = &SessionToken> {
        self.waiting.iter().map(|(t, _)| t)
    }

    /// Pairs the earliest waiters two at a time, then dismisses whoever is
    /// left over and has waited longer than the timeout.
    pub fn pair_waiting(&mut self, now: f64) -> Pairing {
        let mut out = Pairing::default();
        while self.waiting.len() >= 2 {
            let (a, _) = self.waiting.pop_front().expect("two waiters");
            let (b, _) = self.waiting.pop_front().expect("two waiters");
            out.pairs.push((a, b));
        }
        let timeout = self.waiting_timeout;
        self.waiting.retain(|(t, since)| {
            let expired = now - since > timeout;
            if expired {
                out.dismissed.push(t.clone());
            }
            !expired
        });
        out
    }
}
