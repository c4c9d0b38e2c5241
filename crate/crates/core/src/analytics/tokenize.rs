/// Lowercases, splits on whitespace and trims non-alphanumeric characters off
/// both ends of every token. Internal apostrophes and dots survive
/// (`i'm`, `5.9`); tokens that are all punctuation disappear.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split_whitespace()
        .map(|t| t.trim_matches(|c: char| !c.is_alphanumeric()).to_lowercase())
        .filter(|t| !t.is_empty())
        .collect()
}

/// Whether the last non-space character is a question mark.
pub fn is_question(text: &str) -> bool {
    text.trim_end().ends_with('?')
}
