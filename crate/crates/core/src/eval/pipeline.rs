use std::collections::BTreeMap;
use std::fmt;
use std::io::{self, BufRead, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::split::{SplitSelection, SplitSpec};
use super::truth::{GroundTruth, Label, TruthError};
use crate::algorithm::Algorithm;
use crate::code_model::MethodRecord;
use crate::filter::PassReason;
use crate::keyword::{KeywordFamily, KeywordPattern};
use crate::llm::{run_batch, Backend, BatchOptions, BatchSummary, ExampleLibrary, PromptError, StyleSpec};
use crate::par::Execution;
use crate::shipped;
use crate::structural::StructuralPattern;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EvalMode {
    /// Only labeled methods are evaluated.
    #[default]
    Standard,
    /// Every corpus method is evaluated; positive predictions on unlabeled
    /// methods count as false positives.
    LowerBound,
}

impl FromStr for EvalMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.replace('_', "-").as_str() {
            "standard" => Ok(EvalMode::Standard),
            "lower-bound" => Ok(EvalMode::LowerBound),
            other => Err(format!("unknown mode `{other}` (expected standard or lower-bound)")),
        }
    }
}

impl fmt::Display for EvalMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EvalMode::Standard => "standard",
            EvalMode::LowerBound => "lower-bound",
        })
    }
}

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Truth(#[from] TruthError),
    #[error("filter `{filter}` has no pattern for {algorithm}")]
    MissingPattern { filter: String, algorithm: Algorithm },
    #[error("filter `{filter}` has two patterns for {algorithm}")]
    DuplicatePattern { filter: String, algorithm: Algorithm },
    #[error(transparent)]
    Prompt(#[from] PromptError),
    #[error("evaluating the {0} split needs a split file")]
    SplitRequired(SplitSelection),
}

/// Pre-filter applied per algorithm before classification.
#[derive(Debug, Clone)]
pub enum MethodFilter {
    None,
    Keyword {
        label: String,
        patterns: BTreeMap<Algorithm, KeywordPattern>,
    },
    Structural {
        label: String,
        patterns: BTreeMap<Algorithm, StructuralPattern>,
    },
}

impl MethodFilter {
    pub fn keyword(label: impl Into<String>, patterns: Vec<KeywordPattern>) -> Result<Self, PipelineError> {
        let label = label.into();
        let mut map = BTreeMap::new();
        for p in patterns {
            let algorithm = p.algorithm;
            if map.insert(algorithm, p).is_some() {
                return Err(PipelineError::DuplicatePattern { filter: label, algorithm });
            }
        }
        Ok(MethodFilter::Keyword { label, patterns: map })
    }

    pub fn structural(label: impl Into<String>, patterns: Vec<StructuralPattern>) -> Result<Self, PipelineError> {
        let label = label.into();
        let mut map = BTreeMap::new();
        for p in patterns {
            let algorithm = p.algorithm;
            if map.insert(algorithm, p).is_some() {
                return Err(PipelineError::DuplicatePattern { filter: label, algorithm });
            }
        }
        Ok(MethodFilter::Structural { label, patterns: map })
    }

    pub fn shipped_keyword(family: KeywordFamily) -> Self {
        MethodFilter::keyword(format!("keyword:{family}"), shipped::keyword_patterns(family)).expect("shipped patterns are unique")
    }

    /// The shipped prominent-feature patterns.
    pub fn shipped_structural() -> Self {
        let patterns = Algorithm::ALL.iter().map(|a| shipped::structural_pattern(*a)).collect();
        MethodFilter::structural("structural", patterns).expect("shipped patterns are unique")
    }

    pub fn label(&self) -> &str {
        match self {
            MethodFilter::None => "none",
            MethodFilter::Keyword { label, .. } | MethodFilter::Structural { label, .. } => label,
        }
    }

    fn covers(&self, algorithm: Algorithm) -> bool {
        match self {
            MethodFilter::None => true,
            MethodFilter::Keyword { patterns, .. } => patterns.contains_key(&algorithm),
            MethodFilter::Structural { patterns, .. } => patterns.contains_key(&algorithm),
        }
    }

    /// `(passed, reason)`; panics when the algorithm has no pattern, which
    /// `run_pipeline` rules out up front.
    pub fn decide(&self, algorithm: Algorithm, record: &MethodRecord) -> (bool, Option<PassReason>) {
        match self {
            MethodFilter::None => (true, Some(PassReason::NoFilter)),
            MethodFilter::Keyword { patterns, .. } => {
                let passed = patterns[&algorithm].evaluate(record).passed;
                (passed, passed.then_some(PassReason::Matched))
            }
            MethodFilter::Structural { patterns, .. } => {
                let d = patterns[&algorithm].decide(record);
                (d.passed, d.pass_reason)
            }
        }
    }
}

/// Identifies one pipeline configuration.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RunMeta {
    pub filter: String,
    pub style: String,
    pub backend: String,
    pub mode: EvalMode,
    pub split: SplitSelection,
}

/// Outcome for one (algorithm, method) pair.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResultRow {
    pub algorithm: Algorithm,
    pub method_id: String,
    /// `None` for methods without a label for this algorithm (lower-bound
    /// mode only).
    pub label: Option<Label>,
    pub excluded: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pass_reason: Option<PassReason>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub raw_score: Option<u8>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub decode_failure: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl ResultRow {
    /// Excluded methods and failed classifications are negative at every
    /// threshold.
    pub fn predicted(&self, threshold: u8) -> bool {
        !self.excluded && self.raw_score.is_some_and(|s| s >= threshold)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PipelineRun {
    pub meta: RunMeta,
    pub rows: Vec<ResultRow>,
}

#[derive(Debug, Clone)]
pub struct PipelineOutput {
    pub run: PipelineRun,
    pub summary: BatchSummary,
}

pub struct PipelineConfig<'a> {
    pub filter: &'a MethodFilter,
    pub style: &'a StyleSpec,
    pub library: &'a ExampleLibrary,
    pub backend: &'a dyn Backend,
    pub batch: BatchOptions<'a>,
    pub mode: EvalMode,
    pub split: Option<&'a SplitSpec>,
    pub selection: SplitSelection,
    /// Fan-out of the filter stage.
    pub exec: Execution,
}

/// Filters and classifies every evaluated method for every labeled
/// algorithm. Rows come out grouped by algorithm, in corpus order.
pub fn run_pipeline(corpus: &[MethodRecord], truth: &GroundTruth, cfg: &PipelineConfig<'_>) -> Result<PipelineOutput, PipelineError> {
    truth.validate(corpus.iter().map(|r| r.method_id.as_str()))?;
    if cfg.split.is_none() && cfg.selection != SplitSelection::All {
        return Err(PipelineError::SplitRequired(cfg.selection));
    }
    let algorithms = truth.algorithms();
    if let Some(&algorithm) = algorithms.iter().find(|a| !cfg.filter.covers(**a)) {
        return Err(PipelineError::MissingPattern {
            filter: cfg.filter.label().to_string(),
            algorithm,
        });
    }

    let in_split: Vec<&MethodRecord> = corpus
        .iter()
        .filter(|r| match cfg.split {
            Some(s) => cfg.selection.admits(s.side(&r.method_id)),
            None => true,
        })
        .collect();

    let mut rows = Vec::new();
    let mut summary = BatchSummary::default();
    for algorithm in algorithms {
        let candidates: Vec<&MethodRecord> = in_split
            .iter()
            .copied()
            .filter(|r| cfg.mode == EvalMode::LowerBound || truth.label(algorithm, &r.method_id).is_some())
            .collect();
        let decisions = cfg.exec.map(&candidates, |r| cfg.filter.decide(algorithm, r));
        let passed: Vec<&MethodRecord> = candidates.iter().zip(&decisions).filter(|(_, d)| d.0).map(|(r, _)| *r).collect();

        let style = cfg.style.resolve(algorithm, cfg.library)?;
        let outcome = run_batch(&style, algorithm, &passed, cfg.backend, &cfg.batch);
        add_summary(&mut summary, &outcome.summary);

        let mut verdicts = outcome.results.into_iter();
        for (r, (ok, reason)) in candidates.iter().zip(decisions) {
            let mut row = ResultRow {
                algorithm,
                method_id: r.method_id.clone(),
                label: truth.label(algorithm, &r.method_id),
                excluded: !ok,
                pass_reason: reason,
                raw_score: None,
                decode_failure: false,
                error: None,
            };
            if ok {
                match verdicts.next().expect("one result per passed record") {
                    Ok(v) => {
                        row.raw_score = Some(v.raw_score);
                        row.decode_failure = v.decode_failure.is_some();
                    }
                    Err(e) => row.error = Some(e.message),
                }
            }
            rows.push(row);
        }
    }

    Ok(PipelineOutput {
        run: PipelineRun {
            meta: RunMeta {
                filter: cfg.filter.label().to_string(),
                style: cfg.style.label(),
                backend: cfg.backend.id(),
                mode: cfg.mode,
                split: cfg.selection,
            },
            rows,
        },
        summary,
    })
}

fn add_summary(acc: &mut BatchSummary, s: &BatchSummary) {
    acc.total += s.total;
    acc.verdicts += s.verdicts;
    acc.errors += s.errors;
    acc.backend_errors += s.backend_errors;
    acc.cache_hits += s.cache_hits;
    acc.lenient_fallbacks += s.lenient_fallbacks;
}

#[derive(Serialize, Deserialize)]
struct RowLine {
    #[serde(flatten)]
    meta: RunMeta,
    #[serde(flatten)]
    row: ResultRow,
}

/// Writes rows as JSONL, each line carrying its run metadata.
pub fn write_results(runs: &[PipelineRun], mut w: impl Write) -> io::Result<()> {
    for run in runs {
        for row in &run.rows {
            let line = RowLine {
                meta: run.meta.clone(),
                row: row.clone(),
            };
            serde_json::to_writer(&mut w, &line)?;
            w.write_all(b"\n")?;
        }
    }
    w.flush()
}

/// Reads a results file back, grouping rows by run in order of first
/// appearance.
pub fn read_results(r: impl BufRead) -> io::Result<Vec<PipelineRun>> {
    let mut runs: Vec<PipelineRun> = Vec::new();
    for (n, line) in r.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let parsed: RowLine =
            serde_json::from_str(&line).map_err(|e| io::Error::new(io::ErrorKind::InvalidData, format!("line {}: {e}", n + 1)))?;
        match runs.iter_mut().find(|run| run.meta == parsed.meta) {
            Some(run) => run.rows.push(parsed.row),
            None => runs.push(PipelineRun {
                meta: parsed.meta,
                rows: vec![parsed.row],
            }),
        }
    }
    Ok(runs)
}
