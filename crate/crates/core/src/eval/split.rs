use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::truth::{GroundTruth, Label};
use crate::algorithm::Algorithm;
use crate::code_model::MethodRecord;

pub const DEFAULT_TEST_RATIO: f64 = 0.70;
pub const KS_ALPHA: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Test,
    Validation,
}

/// Which part of a split an evaluation runs on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SplitSelection {
    Test,
    Validation,
    #[default]
    All,
}

impl SplitSelection {
    pub fn admits(self, side: Option<Side>) -> bool {
        match self {
            SplitSelection::All => true,
            SplitSelection::Test => side == Some(Side::Test),
            SplitSelection::Validation => side == Some(Side::Validation),
        }
    }
}

impl FromStr for SplitSelection {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "test" => Ok(SplitSelection::Test),
            "validation" => Ok(SplitSelection::Validation),
            "all" => Ok(SplitSelection::All),
            other => Err(format!("unknown split `{other}` (expected test, validation or all)")),
        }
    }
}

impl fmt::Display for SplitSelection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SplitSelection::Test => "test",
            SplitSelection::Validation => "validation",
            SplitSelection::All => "all",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KsResult {
    pub statistic: f64,
    pub p_value: f64,
}

impl KsResult {
    /// Whether the two samples look drawn from one distribution at `alpha`.
    pub fn representative(&self, alpha: f64) -> bool {
        self.p_value >= alpha
    }
}

#[derive(Debug, Error)]
pub enum SplitError {
    #[error("test ratio must lie strictly between 0 and 1, got {0}")]
    InvalidRatio(f64),
    #[error("{algorithm} has {count} positive(s); at least 2 are needed to stratify")]
    TooFewPositives { algorithm: Algorithm, count: usize },
    #[error("cannot read or write split file {path}: {message}")]
    File { path: String, message: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitSpec {
    pub seed: u64,
    pub ratio: f64,
    pub assignment: BTreeMap<String, Side>,
    pub ks: KsResult,
}

impl SplitSpec {
    pub fn side(&self, method_id: &str) -> Option<Side> {
        self.assignment.get(method_id).copied()
    }

    pub fn load(path: &Path) -> Result<Self, SplitError> {
        let err = |message: String| SplitError::File {
            path: path.display().to_string(),
            message,
        };
        let text = std::fs::read_to_string(path).map_err(|e| err(e.to_string()))?;
        serde_json::from_str(&text).map_err(|e| err(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("split serialises")
    }
}

/// Stratified test/validation split.
///
/// Strata are (algorithm, label) for labeled methods, in algorithm order,
/// plus one stratum for unlabeled corpus methods. A method labeled for
/// several algorithms is placed by the first stratum it appears in; later
/// strata only place what is still unassigned.
pub fn make_split(corpus: &[MethodRecord], truth: &GroundTruth, ratio: f64, seed: u64) -> Result<SplitSpec, SplitError> {
    if !(ratio > 0.0 && ratio < 1.0) {
        return Err(SplitError::InvalidRatio(ratio));
    }
    for (algorithm, (pos, _)) in truth.counts() {
        if pos < 2 {
            return Err(SplitError::TooFewPositives { algorithm, count: pos });
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut assignment: BTreeMap<String, Side> = BTreeMap::new();
    let mut strata: Vec<Vec<String>> = Vec::new();
    for algo in truth.algorithms() {
        for want in [Label::Positive, Label::Negative] {
            strata.push(
                truth
                    .labeled(algo)
                    .filter(|(_, l)| *l == want)
                    .map(|(id, _)| id.to_string())
                    .collect(),
            );
        }
    }
    strata.push(
        corpus
            .iter()
            .filter(|r| !truth.is_labeled_anywhere(&r.method_id))
            .map(|r| r.method_id.clone())
            .collect(),
    );

    for stratum in strata {
        let target = (ratio * stratum.len() as f64).round() as usize;
        let already = stratum.iter().filter(|id| assignment.get(*id) == Some(&Side::Test)).count();
        let mut free: Vec<&String> = stratum.iter().filter(|id| !assignment.contains_key(*id)).collect();
        free.sort();
        free.shuffle(&mut rng);
        let n_test = target.saturating_sub(already).min(free.len());
        for (k, id) in free.into_iter().enumerate() {
            let side = if k < n_test { Side::Test } else { Side::Validation };
            assignment.insert(id.clone(), side);
        }
    }

    let ks = split_ks(corpus, &assignment);
    if !ks.representative(KS_ALPHA) {
        log::warn!(
            "split is not representative of AST size (D = {:.4}, p = {:.4})",
            ks.statistic,
            ks.p_value
        );
    }
    Ok(SplitSpec {
        seed,
        ratio,
        assignment,
        ks,
    })
}

/// KS test over AST element counts of the two sides of `assignment`,
/// restricted to records present in `corpus`.
pub fn split_ks(corpus: &[MethodRecord], assignment: &BTreeMap<String, Side>) -> KsResult {
    let mut test = Vec::new();
    let mut val = Vec::new();
    for r in corpus {
        match assignment.get(&r.method_id) {
            Some(Side::Test) => test.push(r.ast_element_count as f64),
            Some(Side::Validation) => val.push(r.ast_element_count as f64),
            None => {}
        }
    }
    ks_two_sample(&test, &val)
}

/// Two-sample Kolmogorov-Smirnov statistic: the largest vertical gap between
/// the empirical CDFs. Empty inputs give 0.
pub fn ks_statistic(a: &[f64], b: &[f64]) -> f64 {
    if a.is_empty() || b.is_empty() {
        return 0.0;
    }
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (n, m) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j, mut d) = (0usize, 0usize, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / n - j as f64 / m).abs());
    }
    d
}

/// Asymptotic p-value of `d` for sample sizes `n` and `m`, using the
/// Kolmogorov distribution with the small-sample correction of the
/// effective size.
pub fn ks_p_value(d: f64, n: usize, m: usize) -> f64 {
    if n == 0 || m == 0 {
        return 1.0;
    }
    let ne = (n * m) as f64 / (n + m) as f64;
    let sq = ne.sqrt();
    let lambda = (sq + 0.12 + 0.11 / sq) * d;
    kolmogorov_q(lambda)
}

fn kolmogorov_q(lambda: f64) -> f64 {
    // the series is numerically 1 below this and converges slowly there
    if lambda < 0.2 {
        return 1.0;
    }
    let a2 = -2.0 * lambda * lambda;
    let mut sum = 0.0;
    let mut sign = 1.0;
    for j in 1..=100 {
        let term = sign * 2.0 * (a2 * (j * j) as f64).exp();
        sum += term;
        if term.abs() < 1e-16 {
            break;
        }
        sign = -sign;
    }
    sum.clamp(0.0, 1.0)
}

pub fn ks_two_sample(a: &[f64], b: &[f64]) -> KsResult {
    let statistic = ks_statistic(a, b);
    KsResult {
        statistic,
        p_value: ks_p_value(statistic, a.len(), b.len()),
    }
}

pub const DEFAULT_KEEP_FRACTION: f64 = 0.10;
pub const DEFAULT_THINNED: [Algorithm; 2] = [Algorithm::BubbleSort, Algorithm::BinarySearch];

#[derive(Debug, Clone)]
pub struct ReducedDataset {
    pub corpus: Vec<MethodRecord>,
    pub truth: GroundTruth,
    /// KS result over the kept methods, when a split was given.
    pub ks: Option<KsResult>,
}

/// Keeps `round(keep_fraction * n)` negatives of each thinned algorithm,
/// per split side when `split` is given. Positives always stay. Methods left
/// without any label are dropped from the corpus; unlabeled methods are kept.
pub fn reduced_dataset(
    corpus: &[MethodRecord],
    truth: &GroundTruth,
    split: Option<&SplitSpec>,
    keep_fraction: f64,
    algorithms: &[Algorithm],
    seed: u64,
) -> ReducedDataset {
    let keep_fraction = keep_fraction.clamp(0.0, 1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut dropped: BTreeSet<(Algorithm, String)> = BTreeSet::new();
    let thinned: BTreeSet<Algorithm> = algorithms.iter().copied().collect();
    for &algo in &thinned {
        let mut groups: BTreeMap<Option<Side>, Vec<&str>> = BTreeMap::new();
        for (id, label) in truth.labeled(algo) {
            if label == Label::Negative {
                groups.entry(split.and_then(|s| s.side(id))).or_default().push(id);
            }
        }
        for (_, mut ids) in groups {
            let keep = (keep_fraction * ids.len() as f64).round() as usize;
            ids.shuffle(&mut rng);
            for id in &ids[keep..] {
                dropped.insert((algo, id.to_string()));
            }
        }
    }

    let mut reduced = truth.clone();
    reduced.retain(|a, id, _| !dropped.contains(&(a, id.to_string())));
    let orphaned: HashSet<&str> = dropped
        .iter()
        .filter(|(_, id)| !reduced.is_labeled_anywhere(id))
        .map(|(_, id)| id.as_str())
        .collect();
    let kept: Vec<MethodRecord> = corpus
        .iter()
        .filter(|r| !orphaned.contains(r.method_id.as_str()))
        .cloned()
        .collect();
    let ks = split.map(|s| split_ks(&kept, &s.assignment));
    ReducedDataset {
        corpus: kept,
        truth: reduced,
        ks,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ks_degenerate_cases() {
        let a: Vec<f64> = (1..=100).map(f64::from).collect();
        let b: Vec<f64> = (200..=300).map(f64::from).collect();
        assert_eq!(ks_statistic(&a, &a), 0.0);
        assert_eq!(ks_statistic(&a, &b), 1.0);
        assert_eq!(ks_p_value(0.0, 100, 100), 1.0);
        assert!(ks_p_value(1.0, 100, 101) < 1e-10);
    }

    #[test]
    fn ks_known_value() {
        // D = 0.5 with n = m = 20: ne = 10, lambda = (sqrt 10 + 0.12 + 0.11 / sqrt 10) * 0.5
        let p = ks_p_value(0.5, 20, 20);
        let lambda: f64 = (10f64.sqrt() + 0.12 + 0.11 / 10f64.sqrt()) * 0.5;
        let q = 2.0 * ((-2.0 * lambda * lambda).exp() - (-8.0 * lambda * lambda).exp() + (-18.0 * lambda * lambda).exp());
        assert!((p - q).abs() < 1e-9, "{p} vs {q}");
        assert!(p > 0.005 && p < 0.02);
    }

    #[test]
    fn keep_fraction_rounds() {
        let mut truth = GroundTruth::new();
        let mut corpus = Vec::new();
        for i in 0..16301 {
            truth.insert(Algorithm::BubbleSort, format!("n{i}"), Label::Negative).unwrap();
            corpus.push(MethodRecord::new(format!("n{i}"), "", "", ""));
        }
        for i in 0..3 {
            truth.insert(Algorithm::BubbleSort, format!("p{i}"), Label::Positive).unwrap();
        }
        let r = reduced_dataset(&corpus, &truth, None, 0.1, &DEFAULT_THINNED, 1);
        assert_eq!(r.truth.counts()[&Algorithm::BubbleSort], (3, 1630));
        assert_eq!(r.corpus.len(), 1630);
        let same = reduced_dataset(&corpus, &truth, None, 1.0, &DEFAULT_THINNED, 1);
        assert_eq!(same.truth, truth);
    }
}
