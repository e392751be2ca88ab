//! Mapping scorer tokens onto the regions of a rendered sentence.

use std::ops::Range;

use thiserror::Error;

use crate::scoring::ScoredToken;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlignError {
    #[error("token `{text}` at {char_start}..{char_end} falls after every region")]
    UnalignableToken {
        text: String,
        char_start: usize,
        char_end: usize,
    },
}

/// 1-based region index of each token, in token order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegionAssignment(pub Vec<usize>);

/// A token belongs to the region containing its first character. Tokens that
/// start on a joining space belong to the region that follows, and tokens
/// straddling a boundary stay with the region of their first character.
/// Empty regions never receive tokens.
pub fn assign_regions(
    spans: &[Range<usize>],
    tokens: &[ScoredToken],
) -> Result<RegionAssignment, AlignError> {
    tokens
        .iter()
        .map(|t| {
            spans
                .iter()
                .position(|s| !s.is_empty() && s.end > t.char_start)
                .map(|i| i + 1)
                .ok_or_else(|| AlignError::UnalignableToken {
                    text: t.text.clone(),
                    char_start: t.char_start,
                    char_end: t.char_end,
                })
        })
        .collect::<Result<_, _>>()
        .map(RegionAssignment)
}

/// Per-region surprisal totals; regions without tokens get 0.
pub fn region_surprisals(
    assignment: &RegionAssignment,
    tokens: &[ScoredToken],
    region_count: usize,
) -> Vec<f64> {
    let mut out = vec![0.0; region_count];
    for (&r, t) in assignment.0.iter().zip(tokens) {
        out[r - 1] += t.surprisal_bits;
    }
    out
}

/// Aligns and sums in one step.
pub fn align(spans: &[Range<usize>], tokens: &[ScoredToken]) -> Result<Vec<f64>, AlignError> {
    let a = assign_regions(spans, tokens)?;
    Ok(region_surprisals(&a, tokens, spans.len()))
}
