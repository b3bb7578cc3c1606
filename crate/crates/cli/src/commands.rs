//! Subcommands. Each reads the artifacts of earlier stages and writes its own
//! through temp-file-then-rename, so an interrupted run never leaves a
//! truncated artifact behind.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use log::{info, warn};
use rayon::prelude::*;
use serde::Serialize;

use revise_core::abstraction::{self, IdiomSet};
use revise_core::comments::{
    constant_baseline, cross_validate, labeled_vectors, link_comment, parse_labeled_comments, ClassificationReport,
    Label, MethodKey, Relevance, RuleSet, TrainConfig,
};
use revise_core::dataset::{
    build_triplets, read_pairs, split_and_dedup, submitted_methods, write_atomic, write_bundle, BuildConfig,
    DatasetError, MANIFEST_FILE,
};
use revise_core::decoder::{
    beam_search, format_predictions, load_external_predictions, to_eval_instances, CopyModel, ModelInputs,
    Predictions, DEFAULT_MAX_LEN,
};
use revise_core::extract::extract_methods;
use revise_core::metrics::{evaluate as score, MetricsReport};
use revise_core::miner::{
    fetch_rounds, load_rounds, persist_rounds, ApiClient, FixtureTransport, HostKind, HttpTransport, LoadMode,
    ReviewComment, ReviewRound, RetryPolicy, Transport,
};

use crate::config::PipelineConfig;
use crate::error::{require, CliError};

fn write(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    write_atomic(path, bytes).map_err(CliError::runtime)
}

fn json_lines<T: Serialize>(items: &[T]) -> String {
    items
        .iter()
        .map(|i| serde_json::to_string(i).expect("record serializes") + "\n")
        .collect()
}

fn pretty<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("record serializes") + "\n"
}

fn test_split(config: &PipelineConfig) -> Result<PathBuf, CliError> {
    let bundle = config.bundle_dir();
    require(&bundle.join(MANIFEST_FILE), "build-dataset")?;
    let path = bundle.join("dp/test.tsv");
    require(&path, "build-dataset")?;
    Ok(path)
}

fn load_archive(config: &PipelineConfig) -> Result<Vec<ReviewRound>, CliError> {
    let path = config.archive_path();
    require(&path, "mine")?;
    let file = std::fs::File::open(&path).map_err(|e| CliError::bad_input(&path, e))?;
    let report = load_rounds(BufReader::new(file), LoadMode::Lenient).map_err(|e| CliError::bad_input(&path, e))?;
    if !report.skipped.is_empty() {
        warn!("{}: skipped {} corrupt lines", path.display(), report.skipped.len());
    }
    Ok(report.rounds)
}

fn load_rules(config: &PipelineConfig) -> Result<RuleSet, CliError> {
    match &config.paths.rules {
        None => Ok(RuleSet::default()),
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::bad_input(path, e))?;
            RuleSet::parse(&text).map_err(|e| CliError::bad_input(path, e))
        }
    }
}

pub fn mine(config: &PipelineConfig, fixture_dir: Option<&Path>) -> Result<(), CliError> {
    if config.sources.is_empty() {
        return Err(CliError::Config(vec!["sources: mine needs at least one source".into()]));
    }
    let mut rounds = Vec::new();
    for source in &config.sources {
        let transport: Box<dyn Transport> = match (fixture_dir, source.host_kind) {
            (Some(dir), kind) => {
                let sub = dir.join(match kind {
                    HostKind::Gerrit => "gerrit",
                    HostKind::Github => "github",
                });
                Box::new(FixtureTransport::new(if sub.is_dir() { sub } else { dir.to_path_buf() }))
            }
            (None, HostKind::Gerrit) => Box::new(HttpTransport::gerrit_from_env()),
            (None, HostKind::Github) => Box::new(HttpTransport::github_from_env()),
        };
        let client = match source.host_kind {
            HostKind::Gerrit => ApiClient::gerrit(transport.as_ref(), RetryPolicy::default()),
            HostKind::Github => ApiClient::new(transport.as_ref(), RetryPolicy::default()),
        };
        let mined = fetch_rounds(&client, source, config.max_changes)
            .map_err(|e| CliError::runtime(format!("mining {}: {e}", source.project_id)))?;
        info!("{}: {} review rounds", source.project_id, mined.len());
        rounds.extend(mined);
    }
    let mut buf = Vec::new();
    persist_rounds(&rounds, &mut buf).map_err(CliError::runtime)?;
    write(&config.archive_path(), &buf)?;
    info!("wrote {} rounds to {}", rounds.len(), config.archive_path().display());
    Ok(())
}

pub fn compute_idioms(config: &PipelineConfig) -> Result<(), CliError> {
    let rounds = load_archive(config)?;
    let (methods, skips) = submitted_methods(&rounds);
    for s in &skips {
        warn!("skipped {}: {}", s.path, s.reason);
    }
    let idioms = abstraction::compute_idioms(&methods, config.idiom_top_n)
        .map_err(|e| CliError::bad_input(&config.archive_path(), e))?;
    write(&config.idioms_path(), idioms.to_text().as_bytes())?;
    info!("{} idioms from {} methods", idioms.size(), methods.len());
    Ok(())
}

#[derive(Serialize)]
struct CommentRecord<'a> {
    project_id: &'a str,
    change_id: &'a str,
    round_index: u32,
    comment: &'a ReviewComment,
    method: Option<MethodKey>,
    relevance: Relevance,
    fired_rule: Option<String>,
}

#[derive(Serialize, Default)]
struct CommentSummary {
    comments: usize,
    unlinked: usize,
    relevant: usize,
    irrelevant: usize,
    by_rule: BTreeMap<String, usize>,
}

#[derive(Serialize)]
struct ClassifierRow {
    name: String,
    report: ClassificationReport,
}

pub fn filter_comments(config: &PipelineConfig) -> Result<(), CliError> {
    let rules = load_rules(config)?;
    let rounds = load_archive(config)?;
    let mut records = Vec::new();
    let mut summary = CommentSummary::default();
    for round in &rounds {
        let mut methods = Vec::new();
        for file in round.submitted.iter().filter(|f| f.is_java()) {
            match extract_methods(file) {
                Ok(ms) => methods.extend(ms),
                Err(e) => warn!("change {}: {e}", round.change_id),
            }
        }
        for comment in &round.comments {
            summary.comments += 1;
            let method = link_comment(comment, &methods).map(|i| MethodKey::from(&methods[i]));
            let verdict = rules.classify(&comment.body);
            if method.is_none() {
                summary.unlinked += 1;
            }
            match verdict.label {
                Label::Relevant => summary.relevant += 1,
                Label::Irrelevant => summary.irrelevant += 1,
            }
            if let Some(rule) = &verdict.fired_rule {
                *summary.by_rule.entry(rule.clone()).or_default() += 1;
            }
            records.push(CommentRecord {
                project_id: &round.project.project_id,
                change_id: &round.change_id,
                round_index: round.round_index,
                comment,
                method,
                relevance: verdict.label.into(),
                fired_rule: verdict.fired_rule,
            });
        }
    }
    let dir = config.comments_dir();
    write(&dir.join("linked.jsonl"), json_lines(&records).as_bytes())?;
    write(&dir.join("summary.json"), pretty(&summary).as_bytes())?;
    info!(
        "{} comments: {} relevant, {} irrelevant, {} unlinked",
        summary.comments, summary.relevant, summary.irrelevant, summary.unlinked
    );

    if let Some(path) = &config.paths.labeled_comments {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::bad_input(path, e))?;
        let labeled = parse_labeled_comments(&text).map_err(|e| CliError::bad_input(path, e))?;
        let truth: Vec<Label> = labeled.iter().map(|c| c.label).collect();
        let heuristic: Vec<Label> = labeled.iter().map(|c| rules.classify(&c.body).label).collect();
        let mut rows = vec![
            ClassifierRow {
                name: "constant-relevant".into(),
                report: constant_baseline(&truth),
            },
            ClassifierRow {
                name: "heuristic-rules".into(),
                report: ClassificationReport::from_predictions(&truth, &heuristic),
            },
        ];
        let vectors = labeled_vectors(&labeled);
        for &kind in &config.classifier.models {
            for oversample in [false, true] {
                let train = TrainConfig {
                    trees: config.classifier.trees,
                    seed: config.seed,
                    ig_threshold: config.classifier.ig_threshold,
                    oversample,
                    ..TrainConfig::default()
                };
                let report = cross_validate(&vectors, kind, &train, config.classifier.folds)
                    .map_err(|e| CliError::bad_input(path, e))?;
                let kind_name = serde_json::to_value(kind).expect("kind serializes");
                let name = format!("{}{}", kind_name.as_str().unwrap_or("model"), if oversample { "+smote" } else { "" });
                rows.push(ClassifierRow { name, report });
            }
        }
        write(&dir.join("classifiers.json"), pretty(&rows).as_bytes())?;
        write(&dir.join("classifiers.txt"), classifier_table(&rows).as_bytes())?;
    }
    Ok(())
}

fn classifier_table(rows: &[ClassifierRow]) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<22} | {:>9} {:>9} | {:>9} {:>9} | {:>8}",
        "model", "rel prec", "rel rec", "irr prec", "irr rec", "accuracy"
    );
    let _ = writeln!(out, "{}", "-".repeat(77));
    for r in rows {
        let p = &r.report;
        let _ = writeln!(
            out,
            "{:<22} | {:>9.3} {:>9.3} | {:>9.3} {:>9.3} | {:>8.3}",
            r.name, p.relevant.precision, p.relevant.recall, p.irrelevant.precision, p.irrelevant.recall, p.accuracy
        );
    }
    out
}

pub fn build_dataset(config: &PipelineConfig) -> Result<(), CliError> {
    let rounds = load_archive(config)?;
    let idioms_path = config.idioms_path();
    require(&idioms_path, "compute-idioms")?;
    let idioms = IdiomSet::from_text(&std::fs::read_to_string(&idioms_path).map_err(|e| CliError::bad_input(&idioms_path, e))?);
    let rules = load_rules(config)?;
    let out = build_triplets(
        &rounds,
        &idioms,
        &rules,
        &BuildConfig {
            max_tokens: config.max_tokens,
        },
    );
    let dir = config.bundle_dir();
    write(&dir.join("skips.jsonl"), json_lines(&out.skips).as_bytes())?;
    let bundle = split_and_dedup(out.triplets, config.ratios, config.seed, idioms, out.stats).map_err(|e| match e {
        DatasetError::TooFewInstances { .. } => CliError::bad_input(&config.archive_path(), e),
        other => CliError::runtime(other),
    })?;
    let manifest = write_bundle(&bundle, &dir).map_err(CliError::runtime)?;
    for (stage, removed) in bundle.stats.removals() {
        info!("{stage:>20}: -{removed}");
    }
    info!(
        "{} instances: train {}, eval {}, test {}",
        bundle.len(),
        manifest.counts.train,
        manifest.counts.eval,
        manifest.counts.test
    );
    Ok(())
}

fn beam_file(dir: &Path, k: usize) -> PathBuf {
    dir.join(format!("beam_{k}.tsv"))
}

pub fn decode_baseline(config: &PipelineConfig) -> Result<(), CliError> {
    let path = test_split(config)?;
    let pairs = read_pairs(&path).map_err(|e| CliError::bad_input(&path, e))?;
    for &k in &config.beam_sizes {
        // instances are independent; collect keeps them in test-split order
        let predictions = pairs
            .par_iter()
            .enumerate()
            .map(|(instance_id, pair)| {
                let model = CopyModel::new(&pair.source);
                let hyps = beam_search(&model, &ModelInputs::source_only(pair.source.clone()), k, DEFAULT_MAX_LEN)
                    .map_err(|e| CliError::runtime(format!("test instance {instance_id}: {e}")))?;
                Ok(Predictions {
                    instance_id,
                    candidates: hyps.into_iter().map(|h| h.tokens).collect(),
                })
            })
            .collect::<Result<Vec<_>, CliError>>()?;
        write(&beam_file(&config.predictions_dir(), k), format_predictions(&predictions).as_bytes())?;
    }
    info!("decoded {} test instances for beam sizes {:?}", pairs.len(), config.beam_sizes);
    Ok(())
}

fn valid_model_name(name: &str) -> bool {
    !name.is_empty() && name.chars().all(|c| c.is_ascii_alphanumeric() || matches!(c, '-' | '_' | '.')) && !name.starts_with('.')
}

pub fn evaluate(config: &PipelineConfig, model: &str, predictions: Option<&Path>) -> Result<(), CliError> {
    if !valid_model_name(model) {
        return Err(CliError::Config(vec![format!(
            "model name {model:?} may only use letters, digits, '-', '_' and '.'"
        )]));
    }
    let path = test_split(config)?;
    let references: Vec<Vec<String>> = read_pairs(&path)
        .map_err(|e| CliError::bad_input(&path, e))?
        .into_iter()
        .map(|p| p.target)
        .collect();
    if references.is_empty() {
        return Err(CliError::bad_input(&path, "the test split is empty"));
    }
    let dir = predictions.map(Path::to_path_buf).unwrap_or_else(|| config.predictions_dir());
    let mut rows = Vec::new();
    for &k in &config.beam_sizes {
        let file = beam_file(&dir, k);
        require(&file, "decode-baseline")?;
        let text = std::fs::read_to_string(&file).map_err(|e| CliError::bad_input(&file, e))?;
        let preds = load_external_predictions(&text).map_err(|e| CliError::bad_input(&file, e))?;
        let instances = to_eval_instances(&preds, &references, k).map_err(|e| CliError::bad_input(&file, e))?;
        rows.push(score(&instances).map_err(|e| CliError::bad_input(&file, e))?);
    }
    let report = MetricsReport::new(model, rows);
    let dir = config.reports_dir();
    write(&dir.join(format!("{model}.json")), pretty(&report).as_bytes())?;
    write(&dir.join(format!("{model}.txt")), report.to_table().as_bytes())?;
    print!("{}", report.to_table());
    Ok(())
}

pub fn report(config: &PipelineConfig) -> Result<(), CliError> {
    let dir = config.reports_dir();
    let mut files: Vec<PathBuf> = match std::fs::read_dir(&dir) {
        Ok(entries) => entries
            .filter_map(Result::ok)
            .map(|e| e.path())
            .filter(|p| p.extension().is_some_and(|e| e == "json"))
            .collect(),
        Err(_) => Vec::new(),
    };
    if files.is_empty() {
        return Err(CliError::MissingInput {
            path: dir.join("<model>.json"),
            producer: "evaluate",
        });
    }
    files.sort();
    let mut table = String::new();
    for file in &files {
        let text = std::fs::read_to_string(file).map_err(|e| CliError::bad_input(file, e))?;
        let report: MetricsReport = serde_json::from_str(&text).map_err(|e| CliError::bad_input(file, e))?;
        if !table.is_empty() {
            table.push('\n');
        }
        table.push_str(&report.to_table());
    }
    write(&dir.join("report.txt"), table.as_bytes())?;
    print!("{table}");
    Ok(())
}
