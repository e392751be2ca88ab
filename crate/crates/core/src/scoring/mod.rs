//! Scorers turn a sentence into per-token surprisals (bits) with character spans.

mod mlm;
mod ngram;
mod oracle;
mod tokenize;
mod uniform;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use mlm::{sequential_mlm_score, FillService, FillToken, MockBigramFill, Slot};
pub use ngram::{
    train_ngram, NgramError, NgramModel, NgramScorer, BOS, DEFAULT_ORDER, DEFAULT_WEIGHTS, UNK,
};
pub use oracle::{OracleScorer, ScaledScorer};
pub use tokenize::{word_spans, WordSpan};
pub use uniform::UniformScorer;

/// Surprisals are kept on a grid of 2^-36 bits. Sums of grid values below
/// 2^17 bits are exact in `f64`, so region totals add up to sentence totals
/// bit for bit whatever the grouping.
pub const SURPRISAL_RESOLUTION: f64 = 1.0 / (1u64 << 36) as f64;

pub fn quantize_bits(bits: f64) -> f64 {
    (bits / SURPRISAL_RESOLUTION).round() * SURPRISAL_RESOLUTION
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoredToken {
    pub text: String,
    /// Half-open span in characters (Unicode scalar values) of the scored text.
    pub char_start: usize,
    pub char_end: usize,
    pub surprisal_bits: f64,
}

impl ScoredToken {
    /// Builds a token, snapping the surprisal to [`SURPRISAL_RESOLUTION`].
    pub fn new(
        text: impl Into<String>,
        char_start: usize,
        char_end: usize,
        surprisal_bits: f64,
    ) -> Self {
        Self {
            text: text.into(),
            char_start,
            char_end,
            surprisal_bits: quantize_bits(surprisal_bits),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScoreError {
    #[error("text is empty")]
    EmptyText,
    #[error("scorer unavailable: {0}")]
    ScorerUnavailable(String),
    #[error("request timed out: {0}")]
    Timeout(String),
    #[error("protocol violation: {0}")]
    ProtocolViolation(String),
    #[error("token offsets do not cover the text: {0}")]
    TokenizationMismatch(String),
    #[error("request rejected with status {status}: {message}")]
    Rejected { status: u16, message: String },
    #[error("scorer has no entry for text `{0}`")]
    UnknownText(String),
}

/// Anything that can assign surprisals to the tokens of a sentence.
///
/// Implementations must be deterministic for a fixed state, return tokens in
/// text order with non-overlapping spans, and cover every non-whitespace
/// character exactly once.
pub trait Scorer: Send + Sync {
    fn id(&self) -> &str;

    fn score(&self, text: &str) -> Result<Vec<ScoredToken>, ScoreError>;

    /// Whole-sentence surprisal computed independently of [`Scorer::score`],
    /// for scorers that can offer one.
    fn total_surprisal(&self, _text: &str) -> Option<Result<f64, ScoreError>> {
        None
    }
}

impl<S: Scorer + ?Sized> Scorer for &S {
    fn id(&self) -> &str {
        (**self).id()
    }
    fn score(&self, text: &str) -> Result<Vec<ScoredToken>, ScoreError> {
        (**self).score(text)
    }
    fn total_surprisal(&self, text: &str) -> Option<Result<f64, ScoreError>> {
        (**self).total_surprisal(text)
    }
}

impl<S: Scorer + ?Sized> Scorer for Box<S> {
    fn id(&self) -> &str {
        (**self).id()
    }
    fn score(&self, text: &str) -> Result<Vec<ScoredToken>, ScoreError> {
        (**self).score(text)
    }
    fn total_surprisal(&self, text: &str) -> Option<Result<f64, ScoreError>> {
        (**self).total_surprisal(text)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScorerKind {
    Ngram,
    Uniform,
    RemoteMlm,
}

impl fmt::Display for ScorerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ScorerKind::Ngram => "ngram",
            ScorerKind::Uniform => "uniform",
            ScorerKind::RemoteMlm => "remote_mlm",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScorerDescriptor {
    pub id: String,
    pub kind: ScorerKind,
    #[serde(default)]
    pub parameters: BTreeMap<String, serde_json::Value>,
}

/// Ways a list of token spans can fail to describe a text.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpanError {
    #[error("token {index} has an empty or inverted span {start}..{end}")]
    Empty {
        index: usize,
        start: usize,
        end: usize,
    },
    #[error("token {index} ends at {end}, past the text length {len}")]
    OutOfBounds {
        index: usize,
        end: usize,
        len: usize,
    },
    #[error("token {index} starts at {start}, before the previous token ends at {prev_end}")]
    Overlap {
        index: usize,
        start: usize,
        prev_end: usize,
    },
    #[error("character {position} (`{ch}`) is not covered by any token")]
    Uncovered { position: usize, ch: char },
}

impl From<SpanError> for ScoreError {
    fn from(e: SpanError) -> Self {
        match e {
            SpanError::Uncovered { .. } => ScoreError::TokenizationMismatch(e.to_string()),
            other => ScoreError::ProtocolViolation(other.to_string()),
        }
    }
}

/// Checks that spans are non-empty, ordered, non-overlapping, in bounds, and
/// cover every non-whitespace character of `text`.
pub fn check_token_spans(
    text: &str,
    spans: impl IntoIterator<Item = (usize, usize)>,
) -> Result<(), SpanError> {
    let chars: Vec<char> = text.chars().collect();
    let mut covered_to = 0usize;
    let mut prev_end = 0usize;
    for (index, (start, end)) in spans.into_iter().enumerate() {
        if start >= end {
            return Err(SpanError::Empty { index, start, end });
        }
        if end > chars.len() {
            return Err(SpanError::OutOfBounds {
                index,
                end,
                len: chars.len(),
            });
        }
        if start < prev_end {
            return Err(SpanError::Overlap {
                index,
                start,
                prev_end,
            });
        }
        if let Some(p) = (covered_to..start).find(|&p| !chars[p].is_whitespace()) {
            return Err(SpanError::Uncovered {
                position: p,
                ch: chars[p],
            });
        }
        prev_end = end;
        covered_to = end;
    }
    if let Some(p) = (covered_to..chars.len()).find(|&p| !chars[p].is_whitespace()) {
        return Err(SpanError::Uncovered {
            position: p,
            ch: chars[p],
        });
    }
    Ok(())
}

fn require_text(text: &str) -> Result<(), ScoreError> {
    if text.trim().is_empty() {
        Err(ScoreError::EmptyText)
    } else {
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quantization_makes_sums_associative() {
        let xs: Vec<f64> = (1..200)
            .map(|i| quantize_bits(1.0 / i as f64 + 0.1))
            .collect();
        let flat: f64 = xs.iter().sum();
        let grouped: f64 = xs.chunks(7).map(|c| c.iter().sum::<f64>()).sum();
        assert_eq!(flat, grouped);
    }

    #[test]
    fn span_checks() {
        assert!(check_token_spans("a b", [(0, 1), (2, 3)]).is_ok());
        assert!(matches!(
            check_token_spans("a b", [(0, 2), (1, 3)]),
            Err(SpanError::Overlap { .. })
        ));
        assert!(matches!(
            check_token_spans("a b", [(0, 1)]),
            Err(SpanError::Uncovered { position: 2, .. })
        ));
        assert!(matches!(
            check_token_spans("a b", [(0, 1), (2, 4)]),
            Err(SpanError::OutOfBounds { .. })
        ));
        assert!(matches!(
            check_token_spans("ab", [(1, 1)]),
            Err(SpanError::Empty { .. })
        ));
        // Spans may swallow whitespace.
        assert!(check_token_spans("a b", [(0, 1), (1, 3)]).is_ok());
    }
}
