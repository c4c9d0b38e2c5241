//! Game Master utterance templates.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TemplateName {
    TargetAnnouncement,
    ExitsNotice,
    InvalidMove,
    DoneAck,
    OutcomeSuccess,
    OutcomeFailure,
    WaitingDismissed,
}

impl TemplateName {
    pub const ALL: [TemplateName; 7] = [
        Self::TargetAnnouncement,
        Self::ExitsNotice,
        Self::InvalidMove,
        Self::DoneAck,
        Self::OutcomeSuccess,
        Self::OutcomeFailure,
        Self::WaitingDismissed,
    ];

    /// Placeholders a template may use. All of them are bound at render time.
    pub fn placeholders(self) -> &'static [&'static str] {
        match self {
            Self::TargetAnnouncement => &["target_type"],
            Self::ExitsNotice => &["exits"],
            Self::InvalidMove => &["direction"],
            Self::DoneAck => &[],
            Self::OutcomeSuccess => &["target_type"],
            Self::OutcomeFailure => &["reason", "target_type"],
            Self::WaitingDismissed => &[],
        }
    }

    fn default_text(self) -> &'static str {
        match self {
            Self::TargetAnnouncement => "You have to meet in a room of type {target_type}.",
            Self::ExitsNotice => "You can go: {exits}.",
            Self::InvalidMove => "You can't go {direction} from here.",
            Self::DoneAck => {
                "You said you are done. The game ends once both of you have said so; moving takes it back."
            }
            Self::OutcomeSuccess => "Well done! You both are in the same room of type {target_type}.",
            Self::OutcomeFailure => "The game is over: {reason}.",
            Self::WaitingDismissed => "Sorry, no partner showed up in time. Please try again later.",
        }
    }
}

impl fmt::Display for TemplateName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = serde_json::to_value(self).expect("serializes");
        f.write_str(s.as_str().expect("string"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TemplateError {
    #[error("template {template} uses unknown placeholder {{{placeholder}}}")]
    UnknownPlaceholder {
        template: TemplateName,
        placeholder: String,
    },
    #[error("template {template}: placeholder {{{placeholder}}} left unbound")]
    Unbound {
        template: TemplateName,
        placeholder: String,
    },
    #[error("template {template}: unbalanced braces")]
    Unbalanced { template: TemplateName },
}

/// Splits template text into literal and `{placeholder}` pieces.
fn pieces(template: TemplateName, text: &str) -> Result<Vec<(bool, &str)>, TemplateError> {
    let mut out = Vec::new();
    let mut rest = text;
    while let Some(open) = rest.find(['{', '}']) {
        if rest.as_bytes()[open] == b'}' {
            return Err(TemplateError::Unbalanced { template });
        }
        let close = rest[open..]
            .find('}')
            .map(|i| open + i)
            .ok_or(TemplateError::Unbalanced { template })?;
        out.push((false, &rest[..open]));
        out.push((true, &rest[open + 1..close]));
        rest = &rest[close + 1..];
    }
    out.push((false, rest));
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GmTemplates {
    texts: BTreeMap<TemplateName, String>,
}

impl Default for GmTemplates {
    fn default() -> Self {
        Self {
            texts: TemplateName::ALL
                .into_iter()
                .map(|n| (n, n.default_text().to_string()))
                .collect(),
        }
    }
}

impl GmTemplates {
    /// Replaces one template, rejecting placeholders it may not use.
    pub fn with(mut self, name: TemplateName, text: impl Into<String>) -> Result<Self, TemplateError> {
        let text = text.into();
        for (is_placeholder, piece) in pieces(name, &text)? {
            if is_placeholder && !name.placeholders().contains(&piece) {
                return Err(TemplateError::UnknownPlaceholder {
                    template: name,
                    placeholder: piece.to_string(),
                });
            }
        }
        self.texts.insert(name, text);
        Ok(self)
    }

    pub fn text(&self, name: TemplateName) -> &str {
        &self.texts[&name]
    }

    pub fn render(&self, name: TemplateName, bindings: &[(&str, &str)]) -> Result<String, TemplateError> {
        let mut out = String::new();
        for (is_placeholder, piece) in pieces(name, self.text(name))? {
            if !is_placeholder {
                out.push_str(piece);
                continue;
            }
            let value = bindings
                .iter()
                .find(|(k, _)| *k == piece)
                .map(|(_, v)| *v)
                .ok_or_else(|| TemplateError::Unbound {
                    template: name,
                    placeholder: piece.to_string(),
                })?;
            out.push_str(value);
        }
        Ok(out)
    }
}
