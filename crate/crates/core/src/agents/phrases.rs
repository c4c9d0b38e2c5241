//! Canned utterances scripted agents exchange.
//!
//! The room fingerprint (the opaque image identifier) travels only inside
//! [`Phrase::Locate`], so a richer describer can replace that one template.

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Phrase {
    /// Self-location with the room's image fingerprint.
    Locate { room_type: String, image: String },
    /// Type-level agreement ("me too").
    Affirm,
    Deny,
    /// The speaker stays put and asks the partner to come.
    Wait,
    /// The speaker goes looking for the partner.
    Seek,
}

const LOCATE_PREFIX: &str = "i'm in a ";
const LOCATE_SEP: &str = ", it shows ";
const AFFIRM: &str = "yes, me too";
const DENY: &str = "nope, different room";
const WAIT: &str = "i'll wait here, come find me";
const SEEK: &str = "ok, i'll come to you";

impl Phrase {
    pub fn render(&self) -> String {
        match self {
            Self::Locate { room_type, image } => {
                format!("{LOCATE_PREFIX}{}{LOCATE_SEP}{image}", spoken(room_type))
            }
            Self::Affirm => AFFIRM.into(),
            Self::Deny => DENY.into(),
            Self::Wait => WAIT.into(),
            Self::Seek => SEEK.into(),
        }
    }

    pub fn parse(text: &str) -> Option<Phrase> {
        let text = text.trim();
        if let Some(rest) = text.strip_prefix(LOCATE_PREFIX) {
            let (room_type, image) = rest.split_once(LOCATE_SEP)?;
            return Some(Self::Locate {
                room_type: unspoken(room_type),
                image: image.to_string(),
            });
        }
        match text {
            AFFIRM => Some(Self::Affirm),
            DENY => Some(Self::Deny),
            WAIT => Some(Self::Wait),
            SEEK => Some(Self::Seek),
            _ => None,
        }
    }
}

/// `utility_room` → `utility room`; slash-qualified names keep their slash.
fn spoken(type_name: &str) -> String {
    type_name.replace('_', " ")
}

fn unspoken(spoken: &str) -> String {
    spoken.replace(' ', "_")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn locate_round_trip() {
        let p = Phrase::Locate {
            room_type: "wine_cellar/bottle_storage".into(),
            image: "wine_cellar__bottle_storage_03".into(),
        };
        let text = p.render();
        assert_eq!(text, "i'm in a wine cellar/bottle storage, it shows wine_cellar__bottle_storage_03");
        assert_eq!(Phrase::parse(&text), Some(p));
    }

    #[test]
    fn fixed_phrases() {
        for p in [Phrase::Affirm, Phrase::Deny, Phrase::Wait, Phrase::Seek] {
            assert_eq!(Phrase::parse(&p.render()), Some(p));
        }
        assert_eq!(Phrase::parse("hello there"), None);
        assert_eq!(Phrase::parse("i'm in a kitchen"), None);
    }
}
