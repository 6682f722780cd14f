use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// The seven functionalities the pipeline recognises.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    PrimeFactors,
    Gcd,
    Fibonacci,
    Palindrome,
    BubbleSort,
    BinarySearch,
    TransposeMatrix,
}

impl Algorithm {
    pub const ALL: [Algorithm; 7] = [
        Algorithm::PrimeFactors,
        Algorithm::Gcd,
        Algorithm::Fibonacci,
        Algorithm::Palindrome,
        Algorithm::BubbleSort,
        Algorithm::BinarySearch,
        Algorithm::TransposeMatrix,
    ];

    /// Stable snake_case identifier used in files and on the command line.
    pub fn id(self) -> &'static str {
        match self {
            Algorithm::PrimeFactors => "prime_factors",
            Algorithm::Gcd => "gcd",
            Algorithm::Fibonacci => "fibonacci",
            Algorithm::Palindrome => "palindrome",
            Algorithm::BubbleSort => "bubble_sort",
            Algorithm::BinarySearch => "binary_search",
            Algorithm::TransposeMatrix => "transpose_matrix",
        }
    }

    /// Human-readable name substituted into prompts.
    pub fn display_name(self) -> &'static str {
        match self {
            Algorithm::PrimeFactors => "Prime Factors",
            Algorithm::Gcd => "Greatest Common Divisor",
            Algorithm::Fibonacci => "Fibonacci",
            Algorithm::Palindrome => "Palindrome",
            Algorithm::BubbleSort => "Bubble Sort",
            Algorithm::BinarySearch => "Binary Search",
            Algorithm::TransposeMatrix => "Transpose Matrix",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown algorithm `{0}`")]
pub struct UnknownAlgorithm(pub String);

impl FromStr for Algorithm {
    type Err = UnknownAlgorithm;

    /// Accepts the snake_case id, the display name, or either with arbitrary
    /// case, spaces, dashes or underscores ("Bubble Sort", "bubble-sort").
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key: String = s
            .chars()
            .filter(|c| c.is_ascii_alphanumeric())
            .map(|c| c.to_ascii_lowercase())
            .collect();
        for algo in Algorithm::ALL {
            let id: String = algo.id().chars().filter(|c| *c != '_').collect();
            let display: String = algo
                .display_name()
                .chars()
                .filter(|c| c.is_ascii_alphanumeric())
                .map(|c| c.to_ascii_lowercase())
                .collect();
            if key == id || key == display {
                return Ok(algo);
            }
        }
        Err(UnknownAlgorithm(s.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_ids_and_display_names() {
        assert_eq!("bubble sort".parse::<Algorithm>(), Ok(Algorithm::BubbleSort));
        assert_eq!("Transpose-Matrix".parse::<Algorithm>(), Ok(Algorithm::TransposeMatrix));
        assert_eq!("GCD".parse::<Algorithm>(), Ok(Algorithm::Gcd));
        assert_eq!("Greatest Common Divisor".parse::<Algorithm>(), Ok(Algorithm::Gcd));
        assert!("quick sort".parse::<Algorithm>().is_err());
    }

    #[test]
    fn ids_round_trip() {
        for a in Algorithm::ALL {
            assert_eq!(a.id().parse::<Algorithm>(), Ok(a));
            let json = serde_json::to_string(&a).unwrap();
            assert_eq!(json, format!("\"{}\"", a.id()));
        }
    }
}
