//! Shared pieces of the two filter families.

use serde::{Deserialize, Serialize};

use crate::code_model::MethodRecord;

/// Order-preserving split of a corpus into records sent on to the model and
/// records excluded (predicted negative).
#[derive(Debug, Clone)]
pub struct Partition<'a> {
    pub passed: Vec<&'a MethodRecord>,
    pub excluded: Vec<&'a MethodRecord>,
    pub reduction: f64,
}

impl<'a> Partition<'a> {
    pub(crate) fn from_flags(records: &'a [MethodRecord], passed: &[bool]) -> Self {
        let mut p = Partition {
            passed: Vec::new(),
            excluded: Vec::new(),
            reduction: 0.0,
        };
        for (r, &ok) in records.iter().zip(passed) {
            if ok {
                p.passed.push(r);
            } else {
                p.excluded.push(r);
            }
        }
        p.reduction = reduction(p.excluded.len(), records.len());
        p
    }
}

/// Excluded fraction; an empty corpus has reduction 0.
pub fn reduction(excluded: usize, total: usize) -> f64 {
    if total == 0 {
        0.0
    } else {
        excluded as f64 / total as f64
    }
}

/// Why a record was passed on to the model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PassReason {
    Matched,
    /// Structural filters fail open when a method could not be parsed.
    ParseFailure,
    NoFilter,
}
