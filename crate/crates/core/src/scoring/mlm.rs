//! Left-to-right scoring with a masked language model.
//!
//! The input starts as a begin-of-sentence marker followed by N+1 masks (the
//! last mask stands for end-of-sentence). Token i is scored by asking for the
//! distribution at position i with tokens 1..i-1 revealed and everything to
//! the right still masked, then reading the probability of the original
//! token. The end-of-sentence position is never scored.

use std::collections::HashMap;

use super::{check_token_spans, require_text, ScoreError, ScoredToken};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Slot {
    Bos,
    Mask,
    Token(u32),
}

/// A token of the service's own tokenization.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FillToken {
    pub id: u32,
    pub text: String,
    pub char_start: usize,
    pub char_end: usize,
}

/// A masked-LM fill backend.
pub trait FillService: Send + Sync {
    fn tokenize(&self, text: &str) -> Result<Vec<FillToken>, ScoreError>;

    /// Probability distribution over the vocabulary (indexed by token id) at
    /// `position` of `input`, where `input[0]` is [`Slot::Bos`].
    fn fill(&self, input: &[Slot], position: usize) -> Result<Vec<f64>, ScoreError>;
}

pub fn sequential_mlm_score(
    fill: &dyn FillService,
    text: &str,
) -> Result<Vec<ScoredToken>, ScoreError> {
    require_text(text)?;
    let tokens = fill.tokenize(text)?;
    check_token_spans(text, tokens.iter().map(|t| (t.char_start, t.char_end)))?;

    let n = tokens.len();
    let mut input = Vec::with_capacity(n + 2);
    input.push(Slot::Bos);
    input.extend(std::iter::repeat_n(Slot::Mask, n + 1));

    let mut scored = Vec::with_capacity(n);
    for (i, token) in tokens.iter().enumerate() {
        let position = i + 1;
        let dist = fill.fill(&input, position)?;
        let p = *dist.get(token.id as usize).ok_or_else(|| {
            ScoreError::ProtocolViolation(format!(
                "distribution of size {} has no entry for token id {}",
                dist.len(),
                token.id
            ))
        })?;
        if !(p > 0.0 && p <= 1.0) {
            return Err(ScoreError::ProtocolViolation(format!(
                "probability {p} for `{}` at position {position} is outside (0, 1]",
                token.text
            )));
        }
        scored.push(ScoredToken::new(
            &token.text,
            token.char_start,
            token.char_end,
            -p.log2(),
        ));
        input[position] = Slot::Token(token.id);
    }
    Ok(scored)
}

/// Deterministic fill backend whose distribution at a position depends only
/// on the token revealed just before it, i.e. an explicit bigram model
/// dressed up as a masked LM. Tokenization is whitespace splitting.
#[derive(Debug, Clone)]
pub struct MockBigramFill {
    symbols: Vec<String>,
    index: HashMap<String, u32>,
    /// `rows[prev][next]`; the last row is the begin-of-sentence row.
    rows: Vec<Vec<f64>>,
}

impl MockBigramFill {
    pub const MODEL_ID: &'static str = "mock-bigram";

    /// `rows` has one row per symbol plus a final begin-of-sentence row, each
    /// with one probability per symbol, summing to 1 within 1e-9.
    pub fn new(symbols: Vec<String>, rows: Vec<Vec<f64>>) -> Result<Self, String> {
        let v = symbols.len();
        if rows.len() != v + 1 {
            return Err(format!("expected {} rows, got {}", v + 1, rows.len()));
        }
        for (i, row) in rows.iter().enumerate() {
            if row.len() != v {
                return Err(format!("row {i} has {} entries, expected {v}", row.len()));
            }
            if row.iter().any(|p| !p.is_finite() || *p < 0.0) {
                return Err(format!("row {i} has a negative or non-finite entry"));
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > 1e-9 {
                return Err(format!("row {i} sums to {sum}"));
            }
        }
        let index = symbols
            .iter()
            .enumerate()
            .map(|(i, s)| (s.clone(), i as u32))
            .collect::<HashMap<_, _>>();
        if index.len() != v {
            return Err("duplicate symbol".into());
        }
        Ok(Self {
            symbols,
            index,
            rows,
        })
    }

    /// Parses a transition table with one `prev next prob` triple per line;
    /// `<s>` as `prev` denotes the begin-of-sentence row. Missing pairs are 0.
    pub fn from_table_text(text: &str) -> Result<Self, String> {
        let mut triples = Vec::new();
        let mut symbols: Vec<String> = Vec::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let parts: Vec<&str> = line.split_whitespace().collect();
            let [prev, next, prob] = parts[..] else {
                return Err(format!("line {}: expected `prev next prob`", n + 1));
            };
            let prob: f64 = prob
                .parse()
                .map_err(|_| format!("line {}: bad probability", n + 1))?;
            for s in [prev, next] {
                if s != super::BOS && !symbols.iter().any(|x| x == s) {
                    symbols.push(s.to_string());
                }
            }
            triples.push((prev.to_string(), next.to_string(), prob));
        }
        let v = symbols.len();
        let pos = |s: &str| {
            if s == super::BOS {
                Some(v)
            } else {
                symbols.iter().position(|x| x == s)
            }
        };
        let mut rows = vec![vec![0.0; v]; v + 1];
        for (prev, next, prob) in triples {
            let next_i = pos(&next)
                .filter(|&i| i < v)
                .ok_or("`<s>` cannot be a successor")?;
            rows[pos(&prev).expect("symbol registered")][next_i] = prob;
        }
        Self::new(symbols, rows)
    }

    pub fn symbols(&self) -> &[String] {
        &self.symbols
    }

    /// Transition probability; `prev = None` is begin-of-sentence.
    pub fn transition(&self, prev: Option<&str>, next: &str) -> Option<f64> {
        let row = match prev {
            None => self.symbols.len(),
            Some(p) => *self.index.get(p)? as usize,
        };
        Some(self.rows[row][*self.index.get(next)? as usize])
    }
}

impl FillService for MockBigramFill {
    fn tokenize(&self, text: &str) -> Result<Vec<FillToken>, ScoreError> {
        let mut out = Vec::new();
        let mut start = None;
        let chars: Vec<char> = text.chars().collect();
        for pos in 0..=chars.len() {
            let boundary = pos == chars.len() || chars[pos].is_whitespace();
            match (start, boundary) {
                (None, false) => start = Some(pos),
                (Some(s), true) => {
                    let word: String = chars[s..pos].iter().collect();
                    let id = *self.index.get(&word).ok_or_else(|| ScoreError::Rejected {
                        status: 400,
                        message: format!("`{word}` is not in the vocabulary"),
                    })?;
                    out.push(FillToken {
                        id,
                        text: word,
                        char_start: s,
                        char_end: pos,
                    });
                    start = None;
                }
                _ => {}
            }
        }
        Ok(out)
    }

    fn fill(&self, input: &[Slot], position: usize) -> Result<Vec<f64>, ScoreError> {
        let violation = |m: String| Err(ScoreError::ProtocolViolation(m));
        if input.first() != Some(&Slot::Bos) {
            return violation("input must start with the begin-of-sentence slot".into());
        }
        if position == 0 || position >= input.len() {
            return violation(format!("position {position} out of range"));
        }
        if input[1..position]
            .iter()
            .any(|s| !matches!(s, Slot::Token(_)))
            || input[position..].iter().any(|s| *s != Slot::Mask)
        {
            return violation(format!(
                "position {position} is not the first mask after a revealed prefix"
            ));
        }
        let row = match input[position - 1] {
            Slot::Bos => self.symbols.len(),
            Slot::Token(id) if (id as usize) < self.symbols.len() => id as usize,
            other => return violation(format!("unknown slot {other:?}")),
        };
        Ok(self.rows[row].clone())
    }
}
