/// A word-level token with its character span.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WordSpan {
    pub text: String,
    pub start: usize,
    pub end: usize,
}

/// Splits text into maximal runs of letters/digits; every other
/// non-whitespace character is a token of its own. No case folding.
pub fn word_spans(text: &str) -> Vec<WordSpan> {
    let mut out = Vec::new();
    let mut word: Option<(usize, String)> = None;
    for (pos, c) in text.chars().enumerate() {
        if c.is_alphanumeric() {
            match &mut word {
                Some((_, w)) => w.push(c),
                None => word = Some((pos, c.to_string())),
            }
            continue;
        }
        if let Some((start, w)) = word.take() {
            out.push(WordSpan {
                text: w,
                start,
                end: pos,
            });
        }
        if !c.is_whitespace() {
            out.push(WordSpan {
                text: c.to_string(),
                start: pos,
                end: pos + 1,
            });
        }
    }
    if let Some((start, w)) = word {
        let end = start + w.chars().count();
        out.push(WordSpan {
            text: w,
            start,
            end,
        });
    }
    out
}
