//! Keyword-group filters matched on the raw method text.
//!
//! A pattern is a list of groups. A group is satisfied when at least
//! `threshold` *distinct* regexes of the group hit somewhere in the source;
//! the pattern passes when its combinator over group satisfactions holds.
//!
//! Plain words (ASCII alphanumerics only) are matched case-insensitively on
//! identifier-segment boundaries: string edges, non-alphanumeric characters
//! (including `_` and `$`), letter/digit switches and camel-case humps. So
//! `sort` hits `bubbleSort` and `arr.length`, while `i` does not hit
//! `insert`. Anything else is compiled verbatim, case-insensitive, with `.`
//! also matching newlines.

use std::fs;
use std::path::Path;

use regex::{Regex, RegexBuilder};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algorithm::Algorithm;
use crate::code_model::MethodRecord;
use crate::filter::Partition;
use crate::par::Execution;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KeywordFamily {
    RecallFocused,
    RecallFocusedEnhanced,
}

impl KeywordFamily {
    pub const ALL: [KeywordFamily; 2] = [KeywordFamily::RecallFocused, KeywordFamily::RecallFocusedEnhanced];

    pub fn id(self) -> &'static str {
        match self {
            KeywordFamily::RecallFocused => "recall_focused",
            KeywordFamily::RecallFocusedEnhanced => "recall_focused_enhanced",
        }
    }
}

impl std::fmt::Display for KeywordFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.id())
    }
}

impl std::str::FromStr for KeywordFamily {
    type Err = String;

    /// Also accepts the short forms `rf` and `ep` and `enhanced_precision`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "recall_focused" | "rf" => Ok(KeywordFamily::RecallFocused),
            "recall_focused_enhanced" | "enhanced_precision" | "ep" => Ok(KeywordFamily::RecallFocusedEnhanced),
            other => Err(format!("unknown keyword family `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Combinator {
    #[default]
    AnyOf,
    AllOf,
}

/// On-disk pattern entry.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KeywordPatternSpec {
    pub algorithm: Algorithm,
    pub family: KeywordFamily,
    #[serde(default)]
    pub combinator: Combinator,
    pub groups: Vec<KeywordGroupSpec>,
    #[serde(default)]
    pub reconstructed: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KeywordGroupSpec {
    pub regexes: Vec<String>,
    pub threshold: usize,
}

#[derive(Debug, Error)]
pub enum KeywordPatternError {
    #[error("{algorithm}: invalid regex `{regex}`: {source}")]
    InvalidRegex {
        algorithm: Algorithm,
        regex: String,
        #[source]
        source: regex::Error,
    },
    #[error("{algorithm}: group {group} has threshold {threshold} but only {count} regexes")]
    ThresholdTooHigh {
        algorithm: Algorithm,
        group: usize,
        threshold: usize,
        count: usize,
    },
    #[error("{algorithm}: group {group} has threshold 0")]
    ThresholdZero { algorithm: Algorithm, group: usize },
    #[error("{algorithm}: group {group} has no regexes")]
    EmptyGroup { algorithm: Algorithm, group: usize },
    #[error("{algorithm}: pattern has no groups")]
    NoGroups { algorithm: Algorithm },
    #[error("cannot read pattern file {path}: {message}")]
    File { path: String, message: String },
}

#[derive(Debug, Clone)]
enum Matcher {
    Word(Regex),
    Raw(Regex),
}

/// One compiled keyword regex, keeping its source text for reporting.
#[derive(Debug, Clone)]
pub struct KeywordRegex {
    pub source: String,
    matcher: Matcher,
}

impl KeywordRegex {
    pub fn compile(source: &str) -> Result<Self, regex::Error> {
        let plain = !source.is_empty() && source.chars().all(|c| c.is_ascii_alphanumeric());
        let matcher = if plain {
            Matcher::Word(RegexBuilder::new(&regex::escape(source)).case_insensitive(true).build()?)
        } else {
            Matcher::Raw(
                RegexBuilder::new(source)
                    .case_insensitive(true)
                    .dot_matches_new_line(true)
                    .build()?,
            )
        };
        Ok(KeywordRegex {
            source: source.to_string(),
            matcher,
        })
    }

    pub fn is_plain_word(&self) -> bool {
        matches!(self.matcher, Matcher::Word(_))
    }

    pub fn hits(&self, text: &str) -> bool {
        match &self.matcher {
            Matcher::Raw(re) => re.is_match(text),
            Matcher::Word(re) => {
                let mut from = 0;
                while let Some(m) = re.find_at(text, from) {
                    if is_segment_boundary(text, m.start()) && is_segment_boundary(text, m.end()) {
                        return true;
                    }
                    // retry from the next char to catch overlapping occurrences
                    from = m.start() + text[m.start()..].chars().next().map_or(1, char::len_utf8);
                    if from > text.len() {
                        break;
                    }
                }
                false
            }
        }
    }
}

/// Whether byte position `pos` of `text` separates two identifier segments.
pub fn is_segment_boundary(text: &str, pos: usize) -> bool {
    if pos == 0 || pos >= text.len() {
        return true;
    }
    let Some(before) = text[..pos].chars().next_back() else {
        return true;
    };
    let mut after_iter = text[pos..].chars();
    let Some(after) = after_iter.next() else { return true };
    if !before.is_alphanumeric() || !after.is_alphanumeric() {
        return true;
    }
    if before.is_alphabetic() != after.is_alphabetic() {
        return true;
    }
    if before.is_lowercase() && after.is_uppercase() {
        return true;
    }
    // end of an acronym: "XMLParser" splits before 'P'
    before.is_uppercase() && after.is_uppercase() && after_iter.next().is_some_and(char::is_lowercase)
}

#[derive(Debug, Clone)]
pub struct KeywordGroup {
    pub regexes: Vec<KeywordRegex>,
    pub threshold: usize,
}

impl KeywordGroup {
    /// Number of distinct regexes with at least one hit.
    pub fn hit_count(&self, text: &str) -> usize {
        self.regexes.iter().filter(|r| r.hits(text)).count()
    }
}

#[derive(Debug, Clone)]
pub struct KeywordPattern {
    pub algorithm: Algorithm,
    pub family: KeywordFamily,
    pub combinator: Combinator,
    pub groups: Vec<KeywordGroup>,
    pub reconstructed: bool,
}

/// Per-record outcome.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KeywordDecision {
    pub passed: bool,
    pub group_hits: Vec<usize>,
}

pub fn compile_pattern(spec: &KeywordPatternSpec) -> Result<KeywordPattern, KeywordPatternError> {
    let algorithm = spec.algorithm;
    if spec.groups.is_empty() {
        return Err(KeywordPatternError::NoGroups { algorithm });
    }
    let mut groups = Vec::with_capacity(spec.groups.len());
    for (gi, g) in spec.groups.iter().enumerate() {
        if g.regexes.is_empty() {
            return Err(KeywordPatternError::EmptyGroup { algorithm, group: gi });
        }
        if g.threshold == 0 {
            return Err(KeywordPatternError::ThresholdZero { algorithm, group: gi });
        }
        if g.threshold > g.regexes.len() {
            return Err(KeywordPatternError::ThresholdTooHigh {
                algorithm,
                group: gi,
                threshold: g.threshold,
                count: g.regexes.len(),
            });
        }
        let regexes = g
            .regexes
            .iter()
            .map(|r| {
                KeywordRegex::compile(r).map_err(|source| KeywordPatternError::InvalidRegex {
                    algorithm,
                    regex: r.clone(),
                    source,
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        groups.push(KeywordGroup {
            regexes,
            threshold: g.threshold,
        });
    }
    Ok(KeywordPattern {
        algorithm,
        family: spec.family,
        combinator: spec.combinator,
        groups,
        reconstructed: spec.reconstructed,
    })
}

impl KeywordPattern {
    pub fn evaluate_text(&self, text: &str) -> KeywordDecision {
        let group_hits: Vec<usize> = self.groups.iter().map(|g| g.hit_count(text)).collect();
        let satisfied = self.groups.iter().zip(&group_hits).map(|(g, &h)| h >= g.threshold);
        let passed = match self.combinator {
            Combinator::AnyOf => satisfied.into_iter().any(|s| s),
            Combinator::AllOf => satisfied.into_iter().all(|s| s),
        };
        KeywordDecision { passed, group_hits }
    }

    pub fn evaluate(&self, record: &MethodRecord) -> KeywordDecision {
        self.evaluate_text(&record.source)
    }

    /// Distinct regexes hitting anywhere in `text`, across all groups.
    pub fn total_distinct_hits(&self, text: &str) -> usize {
        self.groups.iter().map(|g| g.hit_count(text)).sum()
    }

    /// Back to the file representation.
    pub fn to_spec(&self) -> KeywordPatternSpec {
        KeywordPatternSpec {
            algorithm: self.algorithm,
            family: self.family,
            combinator: self.combinator,
            groups: self
                .groups
                .iter()
                .map(|g| KeywordGroupSpec {
                    regexes: g.regexes.iter().map(|r| r.source.clone()).collect(),
                    threshold: g.threshold,
                })
                .collect(),
            reconstructed: self.reconstructed,
        }
    }
}

/// Result of running one pattern over a corpus.
#[derive(Debug, Clone)]
pub struct KeywordFilterRun<'a> {
    pub partition: Partition<'a>,
    /// One decision per input record, in input order.
    pub decisions: Vec<KeywordDecision>,
}

pub fn filter_corpus<'a>(pattern: &KeywordPattern, records: &'a [MethodRecord], exec: Execution) -> KeywordFilterRun<'a> {
    let decisions = exec.map(records, |r| pattern.evaluate(r));
    let flags: Vec<bool> = decisions.iter().map(|d| d.passed).collect();
    KeywordFilterRun {
        partition: Partition::from_flags(records, &flags),
        decisions,
    }
}

/// Parses a pattern file holding one entry or an array of entries.
pub fn parse_pattern_file(text: &str, origin: &str) -> Result<Vec<KeywordPattern>, KeywordPatternError> {
    let value: serde_json::Value = serde_json::from_str(text).map_err(|e| KeywordPatternError::File {
        path: origin.to_string(),
        message: e.to_string(),
    })?;
    let specs: Vec<KeywordPatternSpec> = if value.is_array() {
        serde_json::from_value(value)
    } else {
        serde_json::from_value(value).map(|s| vec![s])
    }
    .map_err(|e| KeywordPatternError::File {
        path: origin.to_string(),
        message: e.to_string(),
    })?;
    specs.iter().map(compile_pattern).collect()
}

/// Loads patterns from a JSON file or every `*.json` in a directory.
pub fn load_patterns(path: &Path) -> Result<Vec<KeywordPattern>, KeywordPatternError> {
    let io_err = |e: std::io::Error| KeywordPatternError::File {
        path: path.display().to_string(),
        message: e.to_string(),
    };
    if path.is_dir() {
        let mut files: Vec<_> = fs::read_dir(path)
            .map_err(io_err)?
            .filter_map(Result::ok)
            .map(|e| e.path())
            .filter(|p| p.extension().is_some_and(|x| x == "json"))
            .collect();
        files.sort();
        let mut out = Vec::new();
        for f in files {
            let text = fs::read_to_string(&f).map_err(io_err)?;
            out.extend(parse_pattern_file(&text, &f.display().to_string())?);
        }
        Ok(out)
    } else {
        let text = fs::read_to_string(path).map_err(io_err)?;
        parse_pattern_file(&text, &path.display().to_string())
    }
}
