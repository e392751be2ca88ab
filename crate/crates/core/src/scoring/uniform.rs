use super::{require_text, word_spans, ScoreError, ScoredToken, Scorer};

/// Assigns every word token the same probability `1 / vocab_size`.
#[derive(Debug, Clone)]
pub struct UniformScorer {
    id: String,
    vocab_size: u64,
}

impl UniformScorer {
    pub fn new(id: impl Into<String>, vocab_size: u64) -> Self {
        assert!(vocab_size >= 1, "vocabulary must not be empty");
        Self {
            id: id.into(),
            vocab_size,
        }
    }

    pub fn token_surprisal(&self) -> f64 {
        (self.vocab_size as f64).log2()
    }
}

impl Scorer for UniformScorer {
    fn id(&self) -> &str {
        &self.id
    }

    fn score(&self, text: &str) -> Result<Vec<ScoredToken>, ScoreError> {
        require_text(text)?;
        let s = self.token_surprisal();
        Ok(word_spans(text)
            .into_iter()
            .map(|w| ScoredToken::new(w.text, w.start, w.end, s))
            .collect())
    }

    fn total_surprisal(&self, text: &str) -> Option<Result<f64, ScoreError>> {
        Some(require_text(text).map(|()| word_spans(text).len() as f64 * self.token_surprisal()))
    }
}
