//! Interpolated n-gram language model used as a deterministic reference scorer.
//!
//! `p(w | h) = Σ_k λ_k · p_k(w | last k-1 tokens of h)` where `p_1` is add-one
//! smoothed over the vocabulary (UNK included) and `p_k` for `k > 1` is the
//! plain count ratio, taken as 0 when the history was never observed.

use std::collections::HashMap;
use std::f64::consts::LN_2;

use indexmap::IndexSet;
use thiserror::Error;

use super::{require_text, word_spans, ScoreError, ScoredToken, Scorer};

pub const UNK: &str = "<unk>";
pub const BOS: &str = "<s>";
pub const DEFAULT_ORDER: usize = 3;
/// Interpolation weights, highest order first.
pub const DEFAULT_WEIGHTS: [f64; 3] = [0.6, 0.3, 0.1];

const UNK_ID: u32 = 0;
const BOS_ID: u32 = u32::MAX;
const WEIGHT_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NgramError {
    #[error("training corpus contains no tokens")]
    EmptyCorpus,
    #[error("order must be at least 1")]
    BadOrder,
    #[error("bad interpolation weights {weights:?}: {reason}")]
    BadWeights { weights: Vec<f64>, reason: String },
}

#[derive(Debug, Clone, Default)]
struct HistoryCounts {
    total: u64,
    next: HashMap<u32, u64>,
}

#[derive(Debug, Clone)]
pub struct NgramModel {
    order: usize,
    /// λ_K .. λ_1
    weights: Vec<f64>,
    /// Index 0 is UNK.
    vocab: IndexSet<String>,
    unigram: Vec<u64>,
    token_total: u64,
    /// `histories[k - 2]` holds order-k counts keyed by the k-1 preceding ids.
    histories: Vec<HashMap<Vec<u32>, HistoryCounts>>,
}

/// Counts n-grams over word-tokenized sentences, each padded on the left with
/// `order - 1` BOS symbols. `weights` lists λ from the highest order down.
pub fn train_ngram<S: AsRef<str>>(
    corpus: &[S],
    order: usize,
    weights: &[f64],
) -> Result<NgramModel, NgramError> {
    if order == 0 {
        return Err(NgramError::BadOrder);
    }
    check_weights(order, weights)?;

    let mut vocab = IndexSet::new();
    vocab.insert(UNK.to_string());
    let mut unigram = vec![0u64];
    let mut token_total = 0u64;
    let mut histories = vec![HashMap::<Vec<u32>, HistoryCounts>::new(); order - 1];

    for sentence in corpus {
        let mut padded = vec![BOS_ID; order - 1];
        for w in word_spans(sentence.as_ref()) {
            let (id, fresh) = vocab.insert_full(w.text);
            let id = id as u32;
            if fresh {
                unigram.push(0);
            }
            unigram[id as usize] += 1;
            token_total += 1;
            for k in 2..=order {
                let hist = padded[padded.len() - (k - 1)..].to_vec();
                let entry = histories[k - 2].entry(hist).or_default();
                entry.total += 1;
                *entry.next.entry(id).or_insert(0) += 1;
            }
            padded.push(id);
        }
    }
    if token_total == 0 {
        return Err(NgramError::EmptyCorpus);
    }
    Ok(NgramModel {
        order,
        weights: weights.to_vec(),
        vocab,
        unigram,
        token_total,
        histories,
    })
}

fn check_weights(order: usize, weights: &[f64]) -> Result<(), NgramError> {
    let bad = |reason: &str| NgramError::BadWeights {
        weights: weights.to_vec(),
        reason: reason.to_string(),
    };
    if weights.len() != order {
        return Err(bad(&format!("expected {order} weights")));
    }
    if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
        return Err(bad("weights must be finite and non-negative"));
    }
    let sum: f64 = weights.iter().sum();
    if (sum - 1.0).abs() > WEIGHT_TOLERANCE {
        return Err(bad(&format!("weights sum to {sum}, not 1")));
    }
    Ok(())
}

impl NgramModel {
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Vocabulary size including UNK.
    pub fn vocab_size(&self) -> usize {
        self.vocab.len()
    }

    /// Vocabulary in id order; the first entry is UNK.
    pub fn vocabulary(&self) -> impl Iterator<Item = &str> {
        self.vocab.iter().map(String::as_str)
    }

    pub fn token_total(&self) -> u64 {
        self.token_total
    }

    fn id(&self, token: &str) -> u32 {
        if token == BOS {
            return BOS_ID;
        }
        self.vocab.get_index_of(token).map_or(UNK_ID, |i| i as u32)
    }

    /// Raw count of `token` following `history` (`history` of length k-1
    /// addresses order k; an empty history gives the unigram count).
    pub fn count(&self, history: &[&str], token: &str) -> u64 {
        let id = self.id(token);
        if history.is_empty() {
            return if id == BOS_ID {
                0
            } else {
                self.unigram[id as usize]
            };
        }
        let hist: Vec<u32> = history.iter().map(|t| self.id(t)).collect();
        self.histories
            .get(history.len() - 1)
            .and_then(|m| m.get(&hist))
            .and_then(|h| h.next.get(&id))
            .copied()
            .unwrap_or(0)
    }

    /// Number of times `history` was observed as a context.
    pub fn history_count(&self, history: &[&str]) -> u64 {
        if history.is_empty() {
            return self.token_total;
        }
        let hist: Vec<u32> = history.iter().map(|t| self.id(t)).collect();
        self.histories
            .get(history.len() - 1)
            .and_then(|m| m.get(&hist))
            .map_or(0, |h| h.total)
    }

    /// All histories of length `len` seen in training.
    pub fn observed_histories(&self, len: usize) -> Vec<Vec<String>> {
        let Some(map) = len.checked_sub(1).and_then(|i| self.histories.get(i)) else {
            return if len == 0 {
                vec![Vec::new()]
            } else {
                Vec::new()
            };
        };
        let mut out: Vec<Vec<String>> = map
            .keys()
            .map(|h| h.iter().map(|&id| self.name(id).to_string()).collect())
            .collect();
        out.sort();
        out
    }

    fn name(&self, id: u32) -> &str {
        if id == BOS_ID {
            BOS
        } else {
            &self.vocab[id as usize]
        }
    }

    /// Interpolated probability of `token` after `history`. Unknown words map
    /// to UNK; the history is cut to its last `order - 1` tokens and padded on
    /// the left with BOS when shorter.
    pub fn ngram_prob(&self, history: &[&str], token: &str) -> f64 {
        let ids: Vec<u32> = history.iter().map(|t| self.id(t)).collect();
        self.prob_ids(&ids, self.id(token))
    }

    fn prob_ids(&self, history: &[u32], token: u32) -> f64 {
        let need = self.order - 1;
        let mut context = vec![BOS_ID; need.saturating_sub(history.len())];
        context.extend_from_slice(&history[history.len().saturating_sub(need)..]);

        let mut p = 0.0;
        for (i, &lambda) in self.weights.iter().enumerate() {
            let k = self.order - i;
            let component = if k == 1 {
                let count = if token == BOS_ID {
                    0
                } else {
                    self.unigram[token as usize]
                };
                (count + 1) as f64 / (self.token_total + self.vocab.len() as u64) as f64
            } else {
                let hist = &context[context.len() - (k - 1)..];
                match self.histories[k - 2].get(hist) {
                    Some(h) => h.next.get(&token).copied().unwrap_or(0) as f64 / h.total as f64,
                    None => 0.0,
                }
            };
            p += lambda * component;
        }
        p
    }

    fn sentence_probs(&self, text: &str) -> Vec<(super::WordSpan, f64)> {
        let mut history = Vec::new();
        word_spans(text)
            .into_iter()
            .map(|w| {
                let id = self.id(&w.text);
                let p = self.prob_ids(&history, id);
                history.push(id);
                (w, p)
            })
            .collect()
    }
}

/// [`Scorer`] backed by an [`NgramModel`].
#[derive(Debug, Clone)]
pub struct NgramScorer {
    id: String,
    model: NgramModel,
}

impl NgramScorer {
    pub fn new(id: impl Into<String>, model: NgramModel) -> Self {
        Self {
            id: id.into(),
            model,
        }
    }

    pub fn model(&self) -> &NgramModel {
        &self.model
    }
}

impl Scorer for NgramScorer {
    fn id(&self) -> &str {
        &self.id
    }

    fn score(&self, text: &str) -> Result<Vec<ScoredToken>, ScoreError> {
        require_text(text)?;
        Ok(self
            .model
            .sentence_probs(text)
            .into_iter()
            .map(|(w, p)| ScoredToken::new(w.text, w.start, w.end, -p.log2()))
            .collect())
    }

    fn total_surprisal(&self, text: &str) -> Option<Result<f64, ScoreError>> {
        Some(require_text(text).map(|()| {
            let nats: f64 = self
                .model
                .sentence_probs(text)
                .iter()
                .map(|(_, p)| -p.ln())
                .sum();
            nats / LN_2
        }))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy() -> NgramModel {
        train_ngram(&["a b .", "a c ."], 2, &[0.7, 0.3]).unwrap()
    }

    #[test]
    fn toy_counts_match_hand_count() {
        let m = toy();
        assert_eq!(m.count(&["a"], "b"), 1);
        assert_eq!(m.count(&["a"], "c"), 1);
        assert_eq!(m.count(&["b"], "."), 1);
        assert_eq!(m.count(&["c"], "."), 1);
        assert_eq!(m.count(&[BOS], "a"), 2);
        assert_eq!(m.history_count(&["a"]), 2);
        assert_eq!(m.token_total(), 6);
        assert_eq!(m.vocab_size(), 5);
    }

    #[test]
    fn toy_probability_matches_hand_arithmetic() {
        let m = toy();
        let expected = 0.7 * 0.5 + 0.3 * (2.0 / 11.0);
        assert!((m.ngram_prob(&["a"], "b") - expected).abs() < 1e-15);
    }

    #[test]
    fn scorer_surprisal_for_b_after_a() {
        let scorer = NgramScorer::new("ng", toy());
        let tokens = scorer.score("a b").unwrap();
        let expected = -(0.7 * 0.5 + 0.3 * (2.0 / 11.0_f64)).log2();
        assert_eq!(tokens.len(), 2);
        assert!((tokens[1].surprisal_bits - expected).abs() < 1e-9);
    }

    #[test]
    fn unseen_word_is_unk_with_positive_probability() {
        let m = toy();
        let p = m.ngram_prob(&["a"], "z");
        assert_eq!(p, m.ngram_prob(&["a"], UNK));
        assert!(p > 0.0);
        // z never follows a, so only the add-one unigram term contributes.
        assert!((p - 0.3 * (1.0 / 11.0)).abs() < 1e-15);
    }

    #[test]
    fn unseen_history_falls_back_to_unigram_term() {
        let m = toy();
        let p = m.ngram_prob(&["."], "a");
        assert!((p - 0.3 * (3.0 / 11.0)).abs() < 1e-15);
    }

    #[test]
    fn unigram_model_is_add_one() {
        let m = train_ngram(&["a b .", "a c ."], 1, &[1.0]).unwrap();
        assert!((m.ngram_prob(&["b"], "a") - 3.0 / 11.0).abs() < 1e-15);
        assert!((m.ngram_prob(&[], "zzz") - 1.0 / 11.0).abs() < 1e-15);
    }

    #[test]
    fn bad_inputs() {
        assert!(matches!(
            train_ngram(&["a"], 2, &[0.5, 0.6]),
            Err(NgramError::BadWeights { .. })
        ));
        assert!(matches!(
            train_ngram(&["a"], 2, &[1.0]),
            Err(NgramError::BadWeights { .. })
        ));
        assert!(matches!(
            train_ngram(&["a"], 2, &[1.5, -0.5]),
            Err(NgramError::BadWeights { .. })
        ));
        assert_eq!(
            train_ngram::<&str>(&[], 2, &[0.5, 0.5]).unwrap_err(),
            NgramError::EmptyCorpus
        );
        assert_eq!(
            train_ngram(&["  "], 2, &[0.5, 0.5]).unwrap_err(),
            NgramError::EmptyCorpus
        );
        assert_eq!(
            train_ngram(&["a"], 0, &[]).unwrap_err(),
            NgramError::BadOrder
        );
    }

    #[test]
    fn long_history_is_truncated() {
        let m = toy();
        assert_eq!(
            m.ngram_prob(&["x", "y", "a"], "b"),
            m.ngram_prob(&["a"], "b")
        );
    }
}
