//! Pipeline configuration file.
//!
//! ```toml
//! seed = 7
//! idiom_top_n = 300
//! max_tokens = 100
//! beam_sizes = [1, 3, 5, 10]
//! max_changes = 100
//!
//! [ratios]
//! train = 0.8
//! eval = 0.1
//! test = 0.1
//!
//! [[sources]]
//! host_kind = "gerrit"
//! base_url = "https://review.example.org"
//! project_id = "demo/app"
//!
//! [paths]
//! out = "out"
//! ```

use std::path::{Path, PathBuf};

use revise_core::comments::ModelKind;
use revise_core::dataset::SplitRatios;
use revise_core::miner::ProjectRef;
use serde::Deserialize;

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub sources: Vec<ProjectRef>,
    /// Changes fetched per source.
    pub max_changes: usize,
    pub idiom_top_n: usize,
    pub max_tokens: usize,
    pub ratios: SplitRatios,
    pub beam_sizes: Vec<usize>,
    pub seed: u64,
    pub paths: Paths,
    pub classifier: ClassifierConfig,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            sources: Vec::new(),
            max_changes: 100,
            idiom_top_n: 300,
            max_tokens: 100,
            ratios: SplitRatios::default(),
            beam_sizes: vec![1, 3, 5, 10],
            seed: 0,
            paths: Paths::default(),
            classifier: ClassifierConfig::default(),
        }
    }
}

/// Artifact locations. Relative artifact paths live under `out`; the rule
/// and labeled-comment files are resolved against the config file's
/// directory.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Paths {
    pub out: PathBuf,
    pub archive: PathBuf,
    pub idioms: PathBuf,
    pub bundle: PathBuf,
    pub predictions: PathBuf,
    pub reports: PathBuf,
    pub comments: PathBuf,
    pub rules: Option<PathBuf>,
    pub labeled_comments: Option<PathBuf>,
}

impl Default for Paths {
    fn default() -> Self {
        Paths {
            out: "out".into(),
            archive: "rounds.jsonl".into(),
            idioms: "idioms.txt".into(),
            bundle: "bundle".into(),
            predictions: "predictions".into(),
            reports: "reports".into(),
            comments: "comments".into(),
            rules: None,
            labeled_comments: None,
        }
    }
}

/// Settings of the comparison classifiers run by `filter-comments` when
/// labeled comments are configured.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClassifierConfig {
    pub models: Vec<ModelKind>,
    pub trees: usize,
    pub folds: usize,
    pub ig_threshold: f64,
}

impl Default for ClassifierConfig {
    fn default() -> Self {
        ClassifierConfig {
            models: vec![ModelKind::RandomForest, ModelKind::DecisionTree, ModelKind::NaiveBayes],
            trees: 100,
            folds: 10,
            ig_threshold: 0.01,
        }
    }
}

impl PipelineConfig {
    /// Parses TOML text. `base` is the directory user-supplied input paths
    /// are relative to.
    pub fn parse(text: &str, base: &Path) -> Result<Self, Vec<String>> {
        let mut config: PipelineConfig = toml::from_str(text).map_err(|e| vec![e.to_string()])?;
        config.paths.rules = config.paths.rules.map(|p| base.join(p));
        config.paths.labeled_comments = config.paths.labeled_comments.map(|p| base.join(p));
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self, Vec<String>> {
        let text = std::fs::read_to_string(path).map_err(|e| vec![format!("cannot read {}: {e}", path.display())])?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::parse(&text, base).map_err(|errs| errs.into_iter().map(|e| format!("{}: {e}", path.display())).collect())
    }

    /// Every problem with the configuration, not just the first.
    pub fn validate(&self) -> Vec<String> {
        let mut errors = Vec::new();
        if let Err(e) = self.ratios.validate() {
            errors.push(format!("ratios: {e}"));
        }
        if self.beam_sizes.is_empty() {
            errors.push("beam_sizes: at least one beam size is required".into());
        }
        if self.beam_sizes.contains(&0) {
            errors.push("beam_sizes: beam sizes must be positive".into());
        }
        if self.beam_sizes.windows(2).any(|w| w[0] >= w[1]) {
            errors.push(format!("beam_sizes: {:?} is not strictly ascending", self.beam_sizes));
        }
        if self.idiom_top_n == 0 {
            errors.push("idiom_top_n: must be positive".into());
        }
        if self.max_tokens == 0 {
            errors.push("max_tokens: must be positive".into());
        }
        if self.max_changes == 0 {
            errors.push("max_changes: must be positive".into());
        }
        for (i, source) in self.sources.iter().enumerate() {
            if let Err(e) = source.validate() {
                errors.push(format!("sources[{i}]: {e}"));
            }
        }
        if self.classifier.trees == 0 {
            errors.push("classifier.trees: must be positive".into());
        }
        if self.classifier.folds < 2 {
            errors.push("classifier.folds: at least 2 folds are required".into());
        }
        if !(0.0..=1.0).contains(&self.classifier.ig_threshold) {
            errors.push("classifier.ig_threshold: must lie in [0, 1]".into());
        }
        errors
    }

    fn artifact(&self, p: &Path) -> PathBuf {
        self.paths.out.join(p)
    }

    pub fn archive_path(&self) -> PathBuf {
        self.artifact(&self.paths.archive)
    }

    pub fn idioms_path(&self) -> PathBuf {
        self.artifact(&self.paths.idioms)
    }

    pub fn bundle_dir(&self) -> PathBuf {
        self.artifact(&self.paths.bundle)
    }

    pub fn predictions_dir(&self) -> PathBuf {
        self.artifact(&self.paths.predictions)
    }

    pub fn reports_dir(&self) -> PathBuf {
        self.artifact(&self.paths.reports)
    }

    pub fn comments_dir(&self) -> PathBuf {
        self.artifact(&self.paths.comments)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_gives_defaults() {
        let c = PipelineConfig::parse("", Path::new(".")).unwrap();
        assert_eq!(c, PipelineConfig::default());
        assert_eq!(c.beam_sizes, vec![1, 3, 5, 10]);
        assert_eq!(c.idiom_top_n, 300);
        assert_eq!(c.max_tokens, 100);
        assert!(c.validate().is_empty());
    }

    #[test]
    fn all_problems_are_reported() {
        let text = r#"
            beam_sizes = [5, 3, 0]
            idiom_top_n = 0
            [ratios]
            train = 0.9
            eval = 0.1
            test = 0.1
            [[sources]]
            host_kind = "github"
            base_url = "not a url"
            project_id = "o/r"
        "#;
        let errors = PipelineConfig::parse(text, Path::new(".")).unwrap().validate();
        assert_eq!(errors.len(), 5, "{errors:#?}");
        for key in ["ratios", "positive", "ascending", "idiom_top_n", "sources[0]"] {
            assert!(errors.iter().any(|e| e.contains(key)), "{key} missing from {errors:#?}");
        }
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(PipelineConfig::parse("beam_size = [1]", Path::new(".")).is_err());
    }

    #[test]
    fn input_paths_follow_the_config_file() {
        let c = PipelineConfig::parse("[paths]\nrules = \"rules.tsv\"\nout = \"o\"", Path::new("/etc/x")).unwrap();
        assert_eq!(c.paths.rules.as_deref(), Some(Path::new("/etc/x/rules.tsv")));
        assert_eq!(c.archive_path(), PathBuf::from("o/rounds.jsonl"));
    }
}
