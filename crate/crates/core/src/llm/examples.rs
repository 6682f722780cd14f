use serde::{Deserialize, Serialize};

use super::prompt::{IclCombination, IclExample, PromptError};
use crate::algorithm::Algorithm;

/// Which pool the ICL negatives are drawn from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NegativeKind {
    #[default]
    Similar,
    Random,
}

pub const POSITIVE_SCORE: u8 = 4;
pub const SIMILAR_NEGATIVE_SCORE: u8 = 1;
pub const RANDOM_NEGATIVE_SCORE: u8 = 0;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LibraryExample {
    pub source: String,
    pub score: u8,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlgorithmExamples {
    pub algorithm: Algorithm,
    #[serde(default)]
    pub positives: Vec<LibraryExample>,
    #[serde(default)]
    pub similar_negatives: Vec<LibraryExample>,
}

/// Examples for few-shot prompts. Random negatives are shared across
/// algorithms.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ExampleLibrary {
    pub algorithms: Vec<AlgorithmExamples>,
    #[serde(default)]
    pub random_negatives: Vec<LibraryExample>,
}

impl ExampleLibrary {
    pub fn for_algorithm(&self, algorithm: Algorithm) -> Option<&AlgorithmExamples> {
        self.algorithms.iter().find(|a| a.algorithm == algorithm)
    }

    /// Positives first, then negatives, each in library order.
    pub fn select(
        &self,
        algorithm: Algorithm,
        combination: IclCombination,
        negatives: NegativeKind,
    ) -> Result<Vec<IclExample>, PromptError> {
        let (np, nn) = combination.counts();
        let empty = AlgorithmExamples {
            algorithm,
            positives: Vec::new(),
            similar_negatives: Vec::new(),
        };
        let entry = self.for_algorithm(algorithm).unwrap_or(&empty);
        let (neg_pool, neg_what) = match negatives {
            NegativeKind::Similar => (&entry.similar_negatives, "similar negatives"),
            NegativeKind::Random => (&self.random_negatives, "random negatives"),
        };
        for (pool, need, what) in [(&entry.positives, np, "positives"), (neg_pool, nn, neg_what)] {
            if pool.len() < need {
                return Err(PromptError::MissingExamples {
                    algorithm,
                    what,
                    have: pool.len(),
                    need,
                });
            }
        }
        Ok(entry.positives[..np]
            .iter()
            .chain(&neg_pool[..nn])
            .map(|e| IclExample {
                source: e.source.clone(),
                score: e.score,
            })
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ex(s: &str, score: u8) -> LibraryExample {
        LibraryExample { source: s.into(), score }
    }

    #[test]
    fn ordering_and_shortage() {
        let lib = ExampleLibrary {
            algorithms: vec![AlgorithmExamples {
                algorithm: Algorithm::Gcd,
                positives: vec![ex("p1", 4), ex("p2", 4)],
                similar_negatives: vec![ex("n1", 1), ex("n2", 1)],
            }],
            random_negatives: vec![ex("r1", 0)],
        };
        let sel = lib
            .select(Algorithm::Gcd, IclCombination::TwoPosTwoNeg, NegativeKind::Similar)
            .unwrap();
        let srcs: Vec<_> = sel.iter().map(|e| e.source.as_str()).collect();
        assert_eq!(srcs, ["p1", "p2", "n1", "n2"]);
        assert!(matches!(
            lib.select(Algorithm::Gcd, IclCombination::TwoPosTwoNeg, NegativeKind::Random),
            Err(PromptError::MissingExamples { have: 1, need: 2, .. })
        ));
        assert!(lib
            .select(Algorithm::Palindrome, IclCombination::TwoPosZeroNeg, NegativeKind::Similar)
            .is_err());
    }
}
