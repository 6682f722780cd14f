//! Patterns and example data compiled into the library.

use std::sync::OnceLock;

use crate::algorithm::Algorithm;
use crate::keyword::{parse_pattern_file, KeywordFamily, KeywordPattern};
use crate::llm::ExampleLibrary;
use crate::structural::{parse_dsl, StructuralPattern};

pub const RECALL_FOCUSED_JSON: &str = include_str!("../patterns/keyword/recall_focused.json");
pub const RECALL_FOCUSED_ENHANCED_JSON: &str = include_str!("../patterns/keyword/recall_focused_enhanced.json");

/// `(name, source)` of every shipped structural pattern file.
pub const STRUCTURAL_SOURCES: &[(&str, &str)] = &[
    ("bubble_sort", include_str!("../patterns/structural/bubble_sort.pat")),
    ("binary_search", include_str!("../patterns/structural/binary_search.pat")),
    ("transpose_matrix", include_str!("../patterns/structural/transpose_matrix.pat")),
    ("prime_factors", include_str!("../patterns/structural/prime_factors.pat")),
    ("gcd", include_str!("../patterns/structural/gcd.pat")),
    ("fibonacci", include_str!("../patterns/structural/fibonacci.pat")),
    ("palindrome", include_str!("../patterns/structural/palindrome.pat")),
    (
        "bubble_sort_standalone",
        include_str!("../patterns/structural/bubble_sort_standalone.pat"),
    ),
    (
        "binary_search_standalone_restrictive",
        include_str!("../patterns/structural/binary_search_standalone_restrictive.pat"),
    ),
    (
        "binary_search_standalone_loosened",
        include_str!("../patterns/structural/binary_search_standalone_loosened.pat"),
    ),
];

static RECALL_FOCUSED: OnceLock<Vec<KeywordPattern>> = OnceLock::new();
static RECALL_FOCUSED_ENHANCED: OnceLock<Vec<KeywordPattern>> = OnceLock::new();
static STRUCTURAL: OnceLock<Vec<StructuralPattern>> = OnceLock::new();

pub const EXAMPLE_LIBRARY_JSON: &str = include_str!("../data/example_library.json");

/// Few-shot examples: iterative and recursive positives, similar negatives
/// per algorithm, and shared unrelated negatives.
pub fn example_library() -> ExampleLibrary {
    serde_json::from_str(EXAMPLE_LIBRARY_JSON).expect("shipped example library is valid")
}

pub fn keyword_patterns(family: KeywordFamily) -> Vec<KeywordPattern> {
    let (cell, text, origin) = match family {
        KeywordFamily::RecallFocused => (&RECALL_FOCUSED, RECALL_FOCUSED_JSON, "recall_focused.json"),
        KeywordFamily::RecallFocusedEnhanced => (
            &RECALL_FOCUSED_ENHANCED,
            RECALL_FOCUSED_ENHANCED_JSON,
            "recall_focused_enhanced.json",
        ),
    };
    cell.get_or_init(|| parse_pattern_file(text, origin).expect("shipped keyword patterns are valid"))
        .clone()
}

pub fn keyword_pattern(algorithm: Algorithm, family: KeywordFamily) -> KeywordPattern {
    keyword_patterns(family)
        .into_iter()
        .find(|p| p.algorithm == algorithm)
        .expect("every algorithm has a shipped keyword pattern")
}

/// Every shipped structural pattern, named after its file.
pub fn all_structural_patterns() -> Vec<StructuralPattern> {
    STRUCTURAL
        .get_or_init(|| {
            STRUCTURAL_SOURCES
                .iter()
                .map(|(name, src)| {
                    let mut p = parse_dsl(src).unwrap_or_else(|e| panic!("shipped pattern {name}: {e}"));
                    p.name = name.to_string();
                    p
                })
                .collect()
        })
        .clone()
}

pub fn structural_pattern_named(name: &str) -> Option<StructuralPattern> {
    all_structural_patterns().into_iter().find(|p| p.name == name)
}

/// The prominent-feature pattern of `algorithm`.
pub fn structural_pattern(algorithm: Algorithm) -> StructuralPattern {
    structural_pattern_named(algorithm.id()).expect("every algorithm has a prominent-feature pattern")
}
