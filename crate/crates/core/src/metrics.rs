//! Prediction quality: perfect predictions, BLEU-4 and normalized token
//! Levenshtein distance.

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MetricsError {
    #[error("no instances to evaluate")]
    Empty,
    #[error("instances mix beam sizes {0} and {1}")]
    MixedBeamSizes(usize, usize),
    #[error("instance {index}: {reason}")]
    InvalidInstance { index: usize, reason: String },
}

fn ngram_counts<S: AsRef<str>>(tokens: &[S], n: usize) -> HashMap<Vec<&str>, usize> {
    let mut counts = HashMap::new();
    for w in tokens.windows(n) {
        *counts.entry(w.iter().map(AsRef::as_ref).collect()).or_insert(0) += 1;
    }
    counts
}

/// Sentence-level BLEU-4 with uniform weights and the brevity penalty.
///
/// An empty candidate (or reference) scores 0. A zero unigram precision
/// gives 0; a zero precision at orders 2 to 4 is replaced by
/// `1 / (2 * |candidate|)`.
pub fn bleu4<S: AsRef<str>, T: AsRef<str>>(candidate: &[S], reference: &[T]) -> f64 {
    if candidate.is_empty() || reference.is_empty() {
        return 0.0;
    }
    let c = candidate.len();
    let mut log_sum = 0.0;
    for n in 1..=4 {
        let cand = ngram_counts(candidate, n);
        let refs = ngram_counts(reference, n);
        let total: usize = cand.values().sum();
        let clipped: usize = cand
            .iter()
            .map(|(g, &k)| k.min(refs.get(g).copied().unwrap_or(0)))
            .sum();
        let p = if clipped > 0 {
            clipped as f64 / total as f64
        } else if n == 1 {
            return 0.0;
        } else {
            1.0 / (2.0 * c as f64)
        };
        log_sum += p.ln();
    }
    let r = reference.len();
    let bp = if c > r { 1.0 } else { (1.0 - r as f64 / c as f64).exp() };
    bp * (log_sum / 4.0).exp()
}

/// Token-level edit distance.
pub fn levenshtein<S: AsRef<str>, T: AsRef<str>>(a: &[S], b: &[T]) -> usize {
    // a shared prefix or suffix never costs an edit
    let prefix = a.iter().zip(b).take_while(|(x, y)| x.as_ref() == y.as_ref()).count();
    let (a, b) = (&a[prefix..], &b[prefix..]);
    let suffix = a
        .iter()
        .rev()
        .zip(b.iter().rev())
        .take_while(|(x, y)| x.as_ref() == y.as_ref())
        .count();
    let (a, b) = (&a[..a.len() - suffix], &b[..b.len() - suffix]);
    if a.is_empty() || b.is_empty() {
        return a.len().max(b.len());
    }
    let mut stack = [0usize; 64];
    let mut heap = Vec::new();
    let row: &mut [usize] = if b.len() < stack.len() {
        &mut stack[..=b.len()]
    } else {
        heap.resize(b.len() + 1, 0);
        &mut heap
    };
    for (j, cell) in row.iter_mut().enumerate() {
        *cell = j;
    }
    for (i, x) in a.iter().enumerate() {
        let mut diag = row[0];
        row[0] = i + 1;
        for (j, y) in b.iter().enumerate() {
            let above = row[j + 1];
            row[j + 1] = (diag + usize::from(x.as_ref() != y.as_ref()))
                .min(above + 1)
                .min(row[j] + 1);
            diag = above;
        }
    }
    row[b.len()]
}

/// Edit distance divided by the longer length; 0 when both are empty.
pub fn normalized_levenshtein<S: AsRef<str>, T: AsRef<str>>(candidate: &[S], reference: &[T]) -> f64 {
    let longest = candidate.len().max(reference.len());
    if longest == 0 {
        return 0.0;
    }
    levenshtein(candidate, reference) as f64 / longest as f64
}

/// Reference target and the ranked candidates produced for it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvalInstance {
    pub reference: Vec<String>,
    pub candidates: Vec<Vec<String>>,
    pub beam_size: usize,
}

impl EvalInstance {
    fn validate(&self, index: usize) -> Result<(), MetricsError> {
        let bad = |reason: String| MetricsError::InvalidInstance { index, reason };
        if self.beam_size == 0 {
            return Err(bad("beam size must be positive".into()));
        }
        if self.candidates.is_empty() || self.candidates.len() > self.beam_size {
            return Err(bad(format!(
                "{} candidates for beam size {}",
                self.candidates.len(),
                self.beam_size
            )));
        }
        let distinct: HashSet<_> = self.candidates.iter().collect();
        if distinct.len() != self.candidates.len() {
            return Err(bad("candidates are not distinct".into()));
        }
        Ok(())
    }

    pub fn is_perfect(&self) -> bool {
        self.candidates.contains(&self.reference)
    }

    pub fn best_bleu(&self) -> f64 {
        self.candidates
            .iter()
            .map(|c| bleu4(c, &self.reference))
            .fold(0.0, f64::max)
    }

    pub fn best_levenshtein(&self) -> f64 {
        self.candidates
            .iter()
            .map(|c| normalized_levenshtein(c, &self.reference))
            .fold(f64::INFINITY, f64::min)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub mean: f64,
    pub median: f64,
    /// Sample standard deviation; 0 for a single value.
    pub stdev: f64,
}

impl Summary {
    pub fn of(values: &[f64]) -> Summary {
        let n = values.len();
        if n == 0 {
            return Summary {
                mean: 0.0,
                median: 0.0,
                stdev: 0.0,
            };
        }
        let mean = values.iter().sum::<f64>() / n as f64;
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        let median = if n % 2 == 1 {
            sorted[n / 2]
        } else {
            (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0
        };
        let stdev = if n > 1 {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
        } else {
            0.0
        };
        Summary { mean, median, stdev }
    }
}

/// One row of the report: a beam size and its scores.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BeamReport {
    pub beam_size: usize,
    pub instance_count: usize,
    pub perfect_count: usize,
    /// Percentage (0 to 100) of instances with a perfect candidate.
    pub perfect_pct: f64,
    pub bleu: Summary,
    pub levenshtein: Summary,
}

/// Scores instances that share one beam size. BLEU and Levenshtein use the
/// best candidate of each instance, chosen separately for each metric.
pub fn evaluate(instances: &[EvalInstance]) -> Result<BeamReport, MetricsError> {
    let first = instances.first().ok_or(MetricsError::Empty)?;
    for (i, inst) in instances.iter().enumerate() {
        if inst.beam_size != first.beam_size {
            return Err(MetricsError::MixedBeamSizes(first.beam_size, inst.beam_size));
        }
        inst.validate(i)?;
    }
    let perfect_count = instances.iter().filter(|i| i.is_perfect()).count();
    let bleu: Vec<f64> = instances.iter().map(EvalInstance::best_bleu).collect();
    let lev: Vec<f64> = instances.iter().map(EvalInstance::best_levenshtein).collect();
    Ok(BeamReport {
        beam_size: first.beam_size,
        instance_count: instances.len(),
        perfect_count,
        perfect_pct: 100.0 * perfect_count as f64 / instances.len() as f64,
        bleu: Summary::of(&bleu),
        levenshtein: Summary::of(&lev),
    })
}

pub const SCORING_NOTE: &str = "BLEU-4 and Levenshtein computed on the best candidate of each beam";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub model: String,
    pub scoring: String,
    pub rows: Vec<BeamReport>,
}

impl MetricsReport {
    pub fn new(model: impl Into<String>, mut rows: Vec<BeamReport>) -> Self {
        rows.sort_by_key(|r| r.beam_size);
        MetricsReport {
            model: model.into(),
            scoring: SCORING_NOTE.to_string(),
            rows,
        }
    }

    /// Plain-text table: beam size, perfect predictions (# and %), then
    /// mean, median and standard deviation of BLEU-4 and Levenshtein.
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "Model: {}", self.model);
        let _ = writeln!(out, "Scoring: {}", self.scoring);
        let _ = writeln!(
            out,
            "{:>4} | {:>6} {:>7} | {:>6} {:>6} {:>6} | {:>6} {:>6} {:>6}",
            "k", "#", "%", "BLEU", "median", "stdev", "Lev", "median", "stdev"
        );
        let _ = writeln!(out, "{}", "-".repeat(72));
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{:>4} | {:>6} {:>6.2}% | {:>6.3} {:>6.3} {:>6.3} | {:>6.3} {:>6.3} {:>6.3}",
                r.beam_size,
                r.perfect_count,
                r.perfect_pct,
                r.bleu.mean,
                r.bleu.median,
                r.bleu.stdev,
                r.levenshtein.mean,
                r.levenshtein.median,
                r.levenshtein.stdev
            );
        }
        out
    }
}
