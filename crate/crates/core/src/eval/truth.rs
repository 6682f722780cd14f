use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algorithm::Algorithm;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Positive,
    Negative,
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Label::Positive => "positive",
            Label::Negative => "negative",
        })
    }
}

#[derive(Debug, Error)]
pub enum TruthError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{origin}:{line}: {message}")]
    Json { origin: String, line: usize, message: String },
    #[error("{origin}:{line}: unknown algorithm `{name}`")]
    UnknownAlgorithm { origin: String, line: usize, name: String },
    #[error("duplicate label for ({algorithm}, {method_id})")]
    Duplicate { algorithm: Algorithm, method_id: String },
    #[error("ground truth references method `{method_id}` which is not in the corpus")]
    Dangling { method_id: String },
}

/// One JSONL row of a ground-truth file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TruthRow {
    pub method_id: String,
    pub algorithm: String,
    pub label: Label,
}

/// Binary labels per (algorithm, method).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GroundTruth {
    entries: BTreeMap<Algorithm, BTreeMap<String, Label>>,
}

impl GroundTruth {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, algorithm: Algorithm, method_id: impl Into<String>, label: Label) -> Result<(), TruthError> {
        let method_id = method_id.into();
        let per = self.entries.entry(algorithm).or_default();
        if per.contains_key(&method_id) {
            return Err(TruthError::Duplicate { algorithm, method_id });
        }
        per.insert(method_id, label);
        Ok(())
    }

    pub fn parse(text: &str, origin: &str) -> Result<Self, TruthError> {
        let mut truth = GroundTruth::new();
        for (n, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let row: TruthRow = serde_json::from_str(line).map_err(|e| TruthError::Json {
                origin: origin.to_string(),
                line: n + 1,
                message: e.to_string(),
            })?;
            let algorithm = row.algorithm.parse::<Algorithm>().map_err(|_| TruthError::UnknownAlgorithm {
                origin: origin.to_string(),
                line: n + 1,
                name: row.algorithm.clone(),
            })?;
            truth.insert(algorithm, row.method_id, row.label)?;
        }
        Ok(truth)
    }

    pub fn load(path: &Path) -> Result<Self, TruthError> {
        let text = std::fs::read_to_string(path).map_err(|source| TruthError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text, &path.display().to_string())
    }

    /// Fails on the first labeled method that is missing from `corpus_ids`.
    pub fn validate<'a>(&self, corpus_ids: impl IntoIterator<Item = &'a str>) -> Result<(), TruthError> {
        let ids: HashSet<&str> = corpus_ids.into_iter().collect();
        for per in self.entries.values() {
            if let Some(id) = per.keys().find(|id| !ids.contains(id.as_str())) {
                return Err(TruthError::Dangling { method_id: id.clone() });
            }
        }
        Ok(())
    }

    pub fn algorithms(&self) -> Vec<Algorithm> {
        self.entries.iter().filter(|(_, v)| !v.is_empty()).map(|(a, _)| *a).collect()
    }

    pub fn label(&self, algorithm: Algorithm, method_id: &str) -> Option<Label> {
        self.entries.get(&algorithm).and_then(|m| m.get(method_id)).copied()
    }

    /// Labeled methods of one algorithm, sorted by id.
    pub fn labeled(&self, algorithm: Algorithm) -> impl Iterator<Item = (&str, Label)> {
        self.entries.get(&algorithm).into_iter().flatten().map(|(id, l)| (id.as_str(), *l))
    }

    pub fn is_labeled_anywhere(&self, method_id: &str) -> bool {
        self.entries.values().any(|m| m.contains_key(method_id))
    }

    /// (positives, negatives) per algorithm.
    pub fn counts(&self) -> BTreeMap<Algorithm, (usize, usize)> {
        self.entries
            .iter()
            .map(|(a, m)| {
                let pos = m.values().filter(|l| **l == Label::Positive).count();
                (*a, (pos, m.len() - pos))
            })
            .collect()
    }

    pub fn len(&self) -> usize {
        self.entries.values().map(BTreeMap::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn retain(&mut self, mut keep: impl FnMut(Algorithm, &str, Label) -> bool) {
        for (a, m) in &mut self.entries {
            m.retain(|id, l| keep(*a, id, *l));
        }
        self.entries.retain(|_, m| !m.is_empty());
    }

    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for (a, m) in &self.entries {
            for (id, l) in m {
                let row = TruthRow {
                    method_id: id.clone(),
                    algorithm: a.id().to_string(),
                    label: *l,
                };
                out.push_str(&serde_json::to_string(&row).expect("truth rows serialise"));
                out.push('\n');
            }
        }
        out
    }
}
