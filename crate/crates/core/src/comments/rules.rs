//! Keyword heuristics that flag comments unlikely to cause a code change.

use regex::Regex;

use super::text::words;
use super::{CommentError, Label};

const DEFAULT_RULES: &str = include_str!("../../data/heuristics.tsv");

#[derive(Debug, Clone)]
pub enum Matcher {
    /// Phrase that must occur as consecutive words.
    Keyword(Vec<String>),
    /// Case-insensitive regular expression over the raw body.
    Regex(Regex),
    /// Fires on comments with at most this many words.
    MaxWords(usize),
}

#[derive(Debug, Clone)]
pub struct Rule {
    pub id: String,
    pub matcher: Matcher,
    pattern: String,
}

impl Rule {
    pub fn kind(&self) -> &'static str {
        match self.matcher {
            Matcher::Keyword(_) => "keyword",
            Matcher::Regex(_) => "regex",
            Matcher::MaxWords(_) => "maxwords",
        }
    }

    pub fn pattern(&self) -> &str {
        &self.pattern
    }

    fn fires(&self, body: &str, body_words: &[String]) -> bool {
        match &self.matcher {
            Matcher::Keyword(phrase) => body_words.windows(phrase.len()).any(|w| w == phrase.as_slice()),
            Matcher::Regex(re) => re.is_match(body),
            Matcher::MaxWords(n) => body_words.len() <= *n,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub label: Label,
    pub fired_rule: Option<String>,
}

#[derive(Debug, Clone)]
pub struct RuleSet {
    rules: Vec<Rule>,
}

impl Default for RuleSet {
    fn default() -> Self {
        RuleSet::parse(DEFAULT_RULES).expect("bundled rule file is valid")
    }
}

impl RuleSet {
    /// Parses `rule_id<TAB>kind<TAB>pattern` lines. Blank lines and lines
    /// starting with `#` are ignored.
    pub fn parse(text: &str) -> Result<Self, CommentError> {
        let mut rules = Vec::new();
        for (idx, line) in text.lines().enumerate() {
            let bad = |reason: String| CommentError::RuleFormat { line: idx + 1, reason };
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let mut parts = line.splitn(3, '\t');
            let (Some(id), Some(kind), Some(pattern)) = (parts.next(), parts.next(), parts.next()) else {
                return Err(bad("expected three tab-separated fields".into()));
            };
            if id.trim().is_empty() {
                return Err(bad("empty rule id".into()));
            }
            let matcher = match kind {
                "keyword" => {
                    let phrase = words(pattern);
                    if phrase.is_empty() {
                        return Err(bad("keyword pattern has no words".into()));
                    }
                    Matcher::Keyword(phrase)
                }
                "regex" => Matcher::Regex(
                    Regex::new(&format!("(?i){pattern}")).map_err(|e| bad(e.to_string()))?,
                ),
                "maxwords" => Matcher::MaxWords(
                    pattern
                        .trim()
                        .parse()
                        .map_err(|_| bad(format!("maxwords needs a count, got {pattern:?}")))?,
                ),
                other => return Err(bad(format!("unknown rule kind {other:?}"))),
            };
            rules.push(Rule {
                id: id.trim().to_string(),
                matcher,
                pattern: pattern.to_string(),
            });
        }
        Ok(RuleSet { rules })
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn to_text(&self) -> String {
        self.rules
            .iter()
            .map(|r| format!("{}\t{}\t{}\n", r.id, r.kind(), r.pattern))
            .collect()
    }

    /// Irrelevant when any rule fires, naming the first one in file order.
    pub fn classify(&self, body: &str) -> Verdict {
        let body_words = words(body);
        match self.rules.iter().find(|r| r.fires(body, &body_words)) {
            Some(rule) => Verdict {
                label: Label::Irrelevant,
                fired_rule: Some(rule.id.clone()),
            },
            None => Verdict {
                label: Label::Relevant,
                fired_rule: None,
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fired(body: &str) -> Option<String> {
        RuleSet::default().classify(body).fired_rule
    }

    #[test]
    fn one_example_per_class() {
        let cases = [
            ("nice", "one-word"),
            ("please fix indentation", "formatting"),
            ("looks good to me", "approval"),
            ("please add tests for this method", "tests"),
            ("please explain", "clarification"),
            ("same as before", "reference"),
            ("add to Javadoc", "javadoc"),
        ];
        for (body, rule) in cases {
            assert_eq!(fired(body).as_deref(), Some(rule), "{body}");
        }
    }

    #[test]
    fn change_requests_pass() {
        for body in [
            "please make this method static",
            "could this return an empty string instead of null?",
            "use String.isEmpty",
            "change the type of sum to double",
            "rename getFooBar please",
            "this loop can be replaced by a stream",
        ] {
            let v = RuleSet::default().classify(body);
            assert_eq!(v.label, Label::Relevant, "{body} fired {:?}", v.fired_rule);
        }
    }

    #[test]
    fn keyword_rules_match_whole_words() {
        let set = RuleSet::parse("k\tkeyword\tadd test\n").unwrap();
        assert_eq!(set.classify("Please ADD test, now").label, Label::Irrelevant);
        assert_eq!(set.classify("add testing").label, Label::Relevant);
    }

    #[test]
    fn malformed_rule_files() {
        assert!(matches!(RuleSet::parse("x\tkeyword"), Err(CommentError::RuleFormat { line: 1, .. })));
        assert!(matches!(RuleSet::parse("# c\nx\tfuzzy\ty"), Err(CommentError::RuleFormat { line: 2, .. })));
        assert!(RuleSet::parse("x\tregex\t(").is_err());
        assert!(RuleSet::parse("x\tmaxwords\tmany").is_err());
    }

    #[test]
    fn text_round_trip() {
        let set = RuleSet::default();
        let again = RuleSet::parse(&set.to_text()).unwrap();
        assert_eq!(again.to_text(), set.to_text());
        assert_eq!(again.rules().len(), set.rules().len());
    }
}
