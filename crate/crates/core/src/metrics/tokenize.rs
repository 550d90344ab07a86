/// Lowercases `text`, splits it on whitespace and emits every character that
/// is neither alphanumeric nor whitespace as a token of its own.
///
/// ```
/// use stancekit::metrics::tokenize;
/// assert_eq!(tokenize("Hello, world"), ["hello", ",", "world"]);
/// ```
pub fn tokenize(text: &str) -> Vec<String> {
    let mut tokens = Vec::new();
    let mut word = String::new();
    for ch in text.chars() {
        if ch.is_whitespace() {
            flush(&mut word, &mut tokens);
        } else if ch.is_alphanumeric() {
            word.extend(ch.to_lowercase());
        } else {
            flush(&mut word, &mut tokens);
            tokens.push(ch.to_lowercase().collect());
        }
    }
    flush(&mut word, &mut tokens);
    tokens
}

fn flush(word: &mut String, tokens: &mut Vec<String>) {
    if !word.is_empty() {
        tokens.push(std::mem::take(word));
    }
}
