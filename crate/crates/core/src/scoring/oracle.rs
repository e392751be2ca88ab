use std::collections::HashMap;
use std::ops::Range;

use super::{require_text, word_spans, ScoreError, ScoredToken, Scorer};

/// A lookup-table scorer: every text it can score was registered up front
/// with explicit token surprisals. Unregistered texts are an error.
#[derive(Debug, Clone, Default)]
pub struct OracleScorer {
    id: String,
    entries: HashMap<String, Vec<ScoredToken>>,
}

impl OracleScorer {
    pub fn new(id: impl Into<String>) -> Self {
        Self {
            id: id.into(),
            entries: HashMap::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn contains(&self, text: &str) -> bool {
        self.entries.contains_key(text)
    }

    /// Registers `tokens` for `text`. Registering the same text twice is only
    /// allowed with identical tokens.
    pub fn insert_tokens(&mut self, text: &str, tokens: Vec<ScoredToken>) -> Result<(), String> {
        match self.entries.get(text) {
            Some(existing) if *existing != tokens => {
                Err(format!("conflicting surprisals for `{text}`"))
            }
            Some(_) => Ok(()),
            None => {
                self.entries.insert(text.to_string(), tokens);
                Ok(())
            }
        }
    }

    /// Gives every word token of `text` the same surprisal.
    pub fn insert_uniform(&mut self, text: &str, bits: f64) -> Result<(), String> {
        let tokens = word_spans(text)
            .into_iter()
            .map(|w| ScoredToken::new(w.text, w.start, w.end, bits))
            .collect();
        self.insert_tokens(text, tokens)
    }

    /// Spreads each region's cost evenly over the word tokens that fall in it.
    /// A token belongs to the first non-empty region whose span ends after the
    /// token starts. Empty regions must have zero cost.
    pub fn insert_region_costs(
        &mut self,
        text: &str,
        spans: &[Range<usize>],
        costs: &[f64],
    ) -> Result<(), String> {
        if spans.len() != costs.len() {
            return Err(format!("{} spans but {} costs", spans.len(), costs.len()));
        }
        let words = word_spans(text);
        let mut owner = Vec::with_capacity(words.len());
        let mut per_region = vec![0usize; spans.len()];
        for w in &words {
            let r = spans
                .iter()
                .position(|s| !s.is_empty() && s.end > w.start)
                .ok_or_else(|| format!("token `{}` lies past the last region", w.text))?;
            per_region[r] += 1;
            owner.push(r);
        }
        for (r, (&n, &c)) in per_region.iter().zip(costs).enumerate() {
            if n == 0 && c != 0.0 {
                return Err(format!("region {} has cost {c} but no tokens", r + 1));
            }
        }
        let tokens = words
            .into_iter()
            .zip(owner)
            .map(|(w, r)| ScoredToken::new(w.text, w.start, w.end, costs[r] / per_region[r] as f64))
            .collect();
        self.insert_tokens(text, tokens)
    }
}

impl Scorer for OracleScorer {
    fn id(&self) -> &str {
        &self.id
    }

    fn score(&self, text: &str) -> Result<Vec<ScoredToken>, ScoreError> {
        require_text(text)?;
        self.entries
            .get(text)
            .cloned()
            .ok_or_else(|| ScoreError::UnknownText(text.to_string()))
    }
}

/// Multiplies every surprisal of the wrapped scorer by a constant factor.
#[derive(Debug, Clone)]
pub struct ScaledScorer<S> {
    id: String,
    inner: S,
    factor: f64,
}

impl<S: Scorer> ScaledScorer<S> {
    pub fn new(inner: S, factor: f64) -> Self {
        assert!(
            factor > 0.0 && factor.is_finite(),
            "factor must be positive"
        );
        Self {
            id: format!("{}*{factor}", inner.id()),
            inner,
            factor,
        }
    }
}

impl<S: Scorer> Scorer for ScaledScorer<S> {
    fn id(&self) -> &str {
        &self.id
    }

    fn score(&self, text: &str) -> Result<Vec<ScoredToken>, ScoreError> {
        Ok(self
            .inner
            .score(text)?
            .into_iter()
            .map(|t| {
                ScoredToken::new(
                    t.text,
                    t.char_start,
                    t.char_end,
                    t.surprisal_bits * self.factor,
                )
            })
            .collect())
    }
}
