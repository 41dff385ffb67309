//! Word accuracy: the share of reference words found, in order, in the
//! produced text.

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct WordScore {
    /// Reference words matched by the longest common subsequence.
    pub correct: usize,
    pub total: usize,
}

impl WordScore {
    /// `correct / total`; an empty reference scores 1 only against empty output.
    pub fn accuracy(&self) -> f64 {
        if self.total == 0 {
            return 1.0;
        }
        self.correct as f64 / self.total as f64
    }
}

fn lcs_len(a: &[&str], b: &[&str]) -> usize {
    let mut prev = vec![0usize; b.len() + 1];
    let mut cur = vec![0usize; b.len() + 1];
    for x in a {
        for (j, y) in b.iter().enumerate() {
            cur[j + 1] = if x == y { prev[j] + 1 } else { prev[j + 1].max(cur[j]) };
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

pub fn word_score(reference: &str, produced: &str) -> WordScore {
    let r: Vec<&str> = reference.split_whitespace().collect();
    let p: Vec<&str> = produced.split_whitespace().collect();
    if r.is_empty() {
        return WordScore { correct: 0, total: 0 };
    }
    WordScore { correct: lcs_len(&r, &p), total: r.len() }
}

pub fn score_accuracy(reference: &str, produced: &str) -> f64 {
    let s = word_score(reference, produced);
    if s.total == 0 && produced.split_whitespace().next().is_some() {
        return 0.0;
    }
    s.accuracy()
}
