//! Beam search over any next-token model, the copy baseline, and the
//! prediction file format shared with external trainers.
//!
//! Prediction files hold one candidate per line:
//! `instance_id<TAB>rank<TAB>space-separated tokens`, ranks starting at 1.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashSet};

use thiserror::Error;

use crate::metrics::EvalInstance;

pub const EOS: &str = "</s>";
pub const DEFAULT_MAX_LEN: usize = 110;

#[derive(Debug, Error, PartialEq)]
pub enum DecodeError {
    #[error("model failed at step {step}: {reason}")]
    Model { step: usize, reason: String },
    #[error("invalid decoding argument: {0}")]
    Argument(String),
    #[error("prediction line {line}: {reason}")]
    Format { line: usize, reason: String },
    #[error("instance {instance_id}: {reason}")]
    Instance { instance_id: usize, reason: String },
}

/// Encoder inputs: the submitted method and, for two-encoder models, the
/// reviewer comment.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ModelInputs {
    pub source: Vec<String>,
    pub comment: Option<Vec<String>>,
}

impl ModelInputs {
    pub fn source_only(source: Vec<String>) -> Self {
        ModelInputs { source, comment: None }
    }
}

/// A next-token distribution. Token indices refer to `vocabulary()`.
pub trait SequenceModel: Sync {
    fn vocabulary(&self) -> &[String];
    /// Index of the end-of-sequence token.
    fn eos(&self) -> usize;
    /// Log-probability of every vocabulary token after `prefix`.
    fn log_probs(&self, inputs: &ModelInputs, prefix: &[usize]) -> Result<Vec<f64>, String>;
}

#[derive(Debug, Clone, PartialEq)]
pub struct Hypothesis {
    /// Generated tokens without the end-of-sequence token.
    pub tokens: Vec<String>,
    pub log_prob: f64,
    pub finished: bool,
}

struct Partial {
    ids: Vec<usize>,
    log_prob: f64,
    finished: bool,
}

/// Higher score first, then lexicographic token order.
fn rank(a: &Partial, b: &Partial, vocab: &[String]) -> Ordering {
    b.log_prob
        .total_cmp(&a.log_prob)
        .then_with(|| a.ids.iter().map(|&i| &vocab[i]).cmp(b.ids.iter().map(|&i| &vocab[i])))
}

/// Keeps the `k` best hypotheses at every step. Finished hypotheses stay in
/// the pool unchanged and compete with the extensions of live ones; a
/// hypothesis is finished once it emits the end token or reaches `max_len`
/// tokens. Scores are plain sums of log-probabilities.
pub fn beam_search(
    model: &dyn SequenceModel,
    inputs: &ModelInputs,
    k: usize,
    max_len: usize,
) -> Result<Vec<Hypothesis>, DecodeError> {
    if k == 0 || max_len == 0 {
        return Err(DecodeError::Argument(format!("beam size {k} and max length {max_len} must be positive")));
    }
    let vocab = model.vocabulary();
    let eos = model.eos();
    let mut pool = vec![Partial {
        ids: Vec::new(),
        log_prob: 0.0,
        finished: false,
    }];
    for step in 0..max_len {
        if pool.iter().all(|h| h.finished) {
            break;
        }
        let mut next = Vec::new();
        for h in pool {
            if h.finished {
                next.push(h);
                continue;
            }
            let scores = model
                .log_probs(inputs, &h.ids)
                .map_err(|reason| DecodeError::Model { step, reason })?;
            if scores.len() != vocab.len() {
                return Err(DecodeError::Model {
                    step,
                    reason: format!("{} scores for a vocabulary of {}", scores.len(), vocab.len()),
                });
            }
            for (token, &lp) in scores.iter().enumerate() {
                if lp == f64::NEG_INFINITY {
                    continue;
                }
                if !lp.is_finite() {
                    return Err(DecodeError::Model {
                        step,
                        reason: format!("log-probability {lp} for token {}", vocab[token]),
                    });
                }
                let mut ids = h.ids.clone();
                ids.push(token);
                let finished = token == eos || ids.len() == max_len;
                next.push(Partial {
                    ids,
                    log_prob: h.log_prob + lp,
                    finished,
                });
            }
        }
        next.sort_by(|a, b| rank(a, b, vocab));
        next.truncate(k);
        pool = next;
    }
    Ok(pool
        .into_iter()
        .map(|h| Hypothesis {
            tokens: h.ids.iter().filter(|&&i| i != eos).map(|&i| vocab[i].clone()).collect(),
            log_prob: h.log_prob,
            finished: true,
        })
        .collect())
}

/// Emits its input method unchanged: the null model for sanity checks.
pub struct CopyModel {
    vocabulary: Vec<String>,
    source: Vec<usize>,
}

impl CopyModel {
    pub fn new(source: &[String]) -> Self {
        let mut vocabulary = vec![EOS.to_string()];
        let mut index: BTreeMap<&str, usize> = BTreeMap::new();
        let mut ids = Vec::with_capacity(source.len());
        for tok in source {
            let id = *index.entry(tok).or_insert_with(|| {
                vocabulary.push(tok.clone());
                vocabulary.len() - 1
            });
            ids.push(id);
        }
        CopyModel {
            vocabulary,
            source: ids,
        }
    }
}

impl SequenceModel for CopyModel {
    fn vocabulary(&self) -> &[String] {
        &self.vocabulary
    }

    fn eos(&self) -> usize {
        0
    }

    fn log_probs(&self, _inputs: &ModelInputs, prefix: &[usize]) -> Result<Vec<f64>, String> {
        let mut out = vec![f64::NEG_INFINITY; self.vocabulary.len()];
        let next = if self.source.starts_with(prefix) {
            self.source.get(prefix.len()).copied().unwrap_or(0)
        } else {
            0
        };
        out[next] = 0.0;
        Ok(out)
    }
}

/// Candidates decoded for one test instance, best first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Predictions {
    pub instance_id: usize,
    pub candidates: Vec<Vec<String>>,
}

/// Renders predictions in the wire format.
pub fn format_predictions(predictions: &[Predictions]) -> String {
    let mut out = String::new();
    for p in predictions {
        for (rank, cand) in p.candidates.iter().enumerate() {
            out.push_str(&format!("{}\t{}\t{}\n", p.instance_id, rank + 1, cand.join(" ")));
        }
    }
    out
}

/// Parses a prediction file. Ranks of each instance must run 1, 2, ...
/// without gaps or repeats and candidates must be distinct.
pub fn load_external_predictions(text: &str) -> Result<Vec<Predictions>, DecodeError> {
    let mut by_id: BTreeMap<usize, BTreeMap<usize, (usize, Vec<String>)>> = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        let bad = |reason: String| DecodeError::Format { line: line_no, reason };
        if line.trim().is_empty() {
            continue;
        }
        let mut fields = line.splitn(3, '\t');
        let (Some(id), Some(rank), Some(tokens)) = (fields.next(), fields.next(), fields.next()) else {
            return Err(bad("expected instance_id, rank and tokens separated by tabs".into()));
        };
        let id: usize = id.trim().parse().map_err(|_| bad(format!("bad instance id {id:?}")))?;
        let rank: usize = rank.trim().parse().map_err(|_| bad(format!("bad rank {rank:?}")))?;
        if rank == 0 {
            return Err(bad("ranks start at 1".into()));
        }
        let tokens = tokens.split(' ').filter(|t| !t.is_empty()).map(str::to_string).collect();
        if by_id.entry(id).or_default().insert(rank, (line_no, tokens)).is_some() {
            return Err(bad(format!("duplicate rank {rank} for instance {id}")));
        }
    }
    let mut out = Vec::with_capacity(by_id.len());
    for (instance_id, ranks) in by_id {
        let mut seen = HashSet::new();
        let mut candidates = Vec::with_capacity(ranks.len());
        for (expected, (rank, (line, tokens))) in (1..).zip(ranks) {
            if rank != expected {
                return Err(DecodeError::Format {
                    line,
                    reason: format!("instance {instance_id} jumps from rank {} to {rank}", expected - 1),
                });
            }
            if !seen.insert(tokens.clone()) {
                return Err(DecodeError::Format {
                    line,
                    reason: format!("instance {instance_id} repeats a candidate"),
                });
            }
            candidates.push(tokens);
        }
        out.push(Predictions {
            instance_id,
            candidates,
        });
    }
    Ok(out)
}

/// Pairs predictions with their references. Instances without predictions
/// get an empty candidate so they count as misses; candidates beyond `k`
/// are an error.
pub fn to_eval_instances(
    predictions: &[Predictions],
    references: &[Vec<String>],
    k: usize,
) -> Result<Vec<EvalInstance>, DecodeError> {
    let mut candidates: Vec<Option<Vec<Vec<String>>>> = vec![None; references.len()];
    for p in predictions {
        let slot = candidates.get_mut(p.instance_id).ok_or_else(|| DecodeError::Instance {
            instance_id: p.instance_id,
            reason: format!("only {} reference instances exist", references.len()),
        })?;
        if p.candidates.len() > k {
            return Err(DecodeError::Instance {
                instance_id: p.instance_id,
                reason: format!("{} candidates exceed beam size {k}", p.candidates.len()),
            });
        }
        *slot = Some(p.candidates.clone());
    }
    Ok(references
        .iter()
        .zip(candidates)
        .map(|(reference, cands)| EvalInstance {
            reference: reference.clone(),
            candidates: cands.filter(|c| !c.is_empty()).unwrap_or_else(|| vec![Vec::new()]),
            beam_size: k,
        })
        .collect())
}
