use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::pipeline::{EvalMode, PipelineRun, ResultRow, RunMeta};
use super::truth::Label;
use crate::algorithm::Algorithm;
use crate::filter::reduction;
use crate::llm::SCORE_SCALE_MAX;

/// Score thresholds swept; a method is positive when `raw_score >= ST`.
pub const THRESHOLDS: [u8; SCORE_SCALE_MAX as usize] = [1, 2, 3, 4];

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Confusion {
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
    pub tn: usize,
}

/// `num / den` with `0 / 0 = 0`.
pub fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

pub fn f1_score(precision: f64, recall: f64) -> f64 {
    if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    }
}

/// Arithmetic mean, 0 for no inputs. The sum is compensated so that decimal
/// inputs like `{1.0, 0.5, 0.75, 0.6, 0.8, 0.9, 0.7}` average to exactly
/// `0.75`.
pub fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        0.0
    } else {
        neumaier_sum(xs) / xs.len() as f64
    }
}

/// Unweighted mean of per-algorithm F1 scores.
pub fn macro_f1(f1s: &[f64]) -> f64 {
    mean(f1s)
}

fn neumaier_sum(xs: &[f64]) -> f64 {
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    for &x in xs {
        let t = sum + x;
        comp += if sum.abs() >= x.abs() { (sum - t) + x } else { (x - t) + sum };
        sum = t;
    }
    sum + comp
}

impl Confusion {
    pub fn precision(&self) -> f64 {
        ratio(self.tp, self.tp + self.fp)
    }

    pub fn recall(&self) -> f64 {
        ratio(self.tp, self.tp + self.fn_)
    }

    pub fn f1(&self) -> f64 {
        f1_score(self.precision(), self.recall())
    }

    pub fn total(&self) -> usize {
        self.tp + self.fp + self.fn_ + self.tn
    }
}

/// Confusion matrix of one algorithm at one threshold. In lower-bound mode
/// unlabeled positive predictions are false positives; otherwise unlabeled
/// rows are ignored.
pub fn confusion(rows: &[ResultRow], algorithm: Algorithm, threshold: u8, mode: EvalMode) -> Confusion {
    let mut c = Confusion::default();
    for row in rows.iter().filter(|r| r.algorithm == algorithm) {
        let predicted = row.predicted(threshold);
        match (row.label, predicted) {
            (Some(Label::Positive), true) => c.tp += 1,
            (Some(Label::Positive), false) => c.fn_ += 1,
            (Some(Label::Negative), true) => c.fp += 1,
            (Some(Label::Negative), false) => c.tn += 1,
            (None, true) if mode == EvalMode::LowerBound => c.fp += 1,
            (None, _) => {}
        }
    }
    c
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlgorithmMetrics {
    pub algorithm: Algorithm,
    pub confusion: Confusion,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl AlgorithmMetrics {
    pub fn from_confusion(algorithm: Algorithm, confusion: Confusion) -> Self {
        AlgorithmMetrics {
            algorithm,
            confusion,
            precision: confusion.precision(),
            recall: confusion.recall(),
            f1: confusion.f1(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdMetrics {
    pub threshold: u8,
    pub algorithms: Vec<AlgorithmMetrics>,
    pub macro_f1: f64,
}

impl ThresholdMetrics {
    pub fn algorithm(&self, algorithm: Algorithm) -> Option<&AlgorithmMetrics> {
        self.algorithms.iter().find(|m| m.algorithm == algorithm)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    #[serde(flatten)]
    pub meta: RunMeta,
    pub thresholds: Vec<ThresholdMetrics>,
    pub best_threshold: u8,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub per_algorithm_best: Option<BTreeMap<Algorithm, u8>>,
    pub reduction_micro: f64,
    pub reduction_macro: f64,
    pub reduction_per_algorithm: BTreeMap<Algorithm, f64>,
    pub excluded_true_positives: BTreeMap<Algorithm, usize>,
    /// Rows whose classification failed; counted as negative.
    pub errors: usize,
}

impl MetricsReport {
    pub fn at(&self, threshold: u8) -> Option<&ThresholdMetrics> {
        self.thresholds.iter().find(|t| t.threshold == threshold)
    }

    pub fn best(&self) -> &ThresholdMetrics {
        self.at(self.best_threshold).expect("best threshold is one of the swept thresholds")
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepOptions {
    /// Also pick the best threshold for each algorithm on its own F1.
    pub per_algorithm: bool,
}

/// Highest-scoring threshold; ties go to the higher threshold.
pub fn best_threshold(scores: &[(u8, f64)]) -> u8 {
    let mut best: Option<(u8, f64)> = None;
    for &(t, s) in scores {
        match best {
            Some((bt, bs)) if s < bs || (s == bs && t < bt) => {}
            _ => best = Some((t, s)),
        }
    }
    best.map_or(*THRESHOLDS.last().expect("non-empty"), |(t, _)| t)
}

/// Sweeps every threshold, counting unlabeled rows as the run's mode says.
pub fn sweep_thresholds(run: &PipelineRun, opts: SweepOptions) -> MetricsReport {
    sweep_in_mode(run, run.meta.mode, opts)
}

/// Sweep with unlabeled positive predictions counted as false positives,
/// which makes precision and F1 lower bounds.
pub fn lower_bound_mode(run: &PipelineRun, opts: SweepOptions) -> MetricsReport {
    sweep_in_mode(run, EvalMode::LowerBound, opts)
}

fn sweep_in_mode(run: &PipelineRun, mode: EvalMode, opts: SweepOptions) -> MetricsReport {
    let rows = &run.rows;
    let mut algorithms: Vec<Algorithm> = rows.iter().map(|r| r.algorithm).collect();
    algorithms.sort();
    algorithms.dedup();

    let thresholds: Vec<ThresholdMetrics> = THRESHOLDS
        .iter()
        .map(|&threshold| {
            let per: Vec<AlgorithmMetrics> = algorithms
                .iter()
                .map(|&a| AlgorithmMetrics::from_confusion(a, confusion(rows, a, threshold, mode)))
                .collect();
            let f1s: Vec<f64> = per.iter().map(|m| m.f1).collect();
            ThresholdMetrics {
                threshold,
                macro_f1: macro_f1(&f1s),
                algorithms: per,
            }
        })
        .collect();

    let best = best_threshold(&thresholds.iter().map(|t| (t.threshold, t.macro_f1)).collect::<Vec<_>>());
    let per_algorithm_best = opts.per_algorithm.then(|| {
        algorithms
            .iter()
            .map(|&a| {
                let scores: Vec<(u8, f64)> = thresholds
                    .iter()
                    .map(|t| (t.threshold, t.algorithm(a).map_or(0.0, |m| m.f1)))
                    .collect();
                (a, best_threshold(&scores))
            })
            .collect()
    });

    let mut reduction_per_algorithm = BTreeMap::new();
    let mut excluded_true_positives = BTreeMap::new();
    let (mut excluded_total, mut total) = (0usize, 0usize);
    for &a in &algorithms {
        let mine: Vec<&ResultRow> = rows.iter().filter(|r| r.algorithm == a).collect();
        let excluded = mine.iter().filter(|r| r.excluded).count();
        let etp = mine.iter().filter(|r| r.excluded && r.label == Some(Label::Positive)).count();
        reduction_per_algorithm.insert(a, reduction(excluded, mine.len()));
        excluded_true_positives.insert(a, etp);
        excluded_total += excluded;
        total += mine.len();
    }
    let per_red: Vec<f64> = reduction_per_algorithm.values().copied().collect();

    MetricsReport {
        meta: RunMeta { mode, ..run.meta.clone() },
        thresholds,
        best_threshold: best,
        per_algorithm_best,
        reduction_micro: reduction(excluded_total, total),
        reduction_macro: mean(&per_red),
        reduction_per_algorithm,
        excluded_true_positives,
        errors: rows.iter().filter(|r| r.error.is_some()).count(),
    }
}
