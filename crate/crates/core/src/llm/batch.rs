use std::borrow::Borrow;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::backend::Backend;
use super::classify::{classify, ClassifyError, ClassifyOptions, Verdict};
use super::prompt::PromptStyle;
use crate::algorithm::Algorithm;
use crate::code_model::MethodRecord;
use crate::par::{self, Execution};

/// Content-addressed verdict store, one JSON file per prompt.
#[derive(Debug, Clone)]
pub struct VerdictCache {
    dir: PathBuf,
}

impl VerdictCache {
    pub fn new(dir: impl Into<PathBuf>) -> io::Result<Self> {
        let dir = dir.into();
        fs::create_dir_all(&dir)?;
        Ok(VerdictCache { dir })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    /// The source digest keeps obfuscated variants of a method apart.
    pub fn key(backend_id: &str, style_hash: &str, algorithm: Algorithm, method_id: &str, source: &str) -> String {
        let source_hash = hex::encode(Sha256::digest(source.as_bytes()));
        let mut h = Sha256::new();
        for part in [backend_id, style_hash, algorithm.id(), method_id, &source_hash] {
            h.update(part.as_bytes());
            h.update([0u8]);
        }
        hex::encode(h.finalize())
    }

    fn path(&self, key: &str) -> PathBuf {
        self.dir.join(&key[..2]).join(format!("{key}.json"))
    }

    pub fn get(&self, key: &str) -> Option<Verdict> {
        let text = fs::read_to_string(self.path(key)).ok()?;
        serde_json::from_str(&text).ok()
    }

    pub fn put(&self, key: &str, verdict: &Verdict) -> io::Result<()> {
        let path = self.path(key);
        let parent = path.parent().expect("cache files live in a subdirectory");
        fs::create_dir_all(parent)?;
        // write-then-rename so concurrent readers never see partial files
        let tmp = parent.join(format!(".{key}.{}.tmp", std::process::id()));
        fs::write(&tmp, serde_json::to_vec(verdict)?)?;
        fs::rename(tmp, path)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecordError {
    pub method_id: String,
    pub kind: String,
    pub message: String,
}

impl RecordError {
    pub fn is_backend(&self) -> bool {
        self.kind == "backend"
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct BatchSummary {
    pub total: usize,
    pub verdicts: usize,
    pub errors: usize,
    pub backend_errors: usize,
    pub cache_hits: usize,
    /// Verdicts scored 0 by lenient decoding.
    pub lenient_fallbacks: usize,
}

#[derive(Debug, Clone)]
pub struct BatchOutcome {
    /// One entry per input record, in input order.
    pub results: Vec<Result<Verdict, RecordError>>,
    pub summary: BatchSummary,
}

#[derive(Debug, Clone, Copy)]
pub struct BatchOptions<'a> {
    pub parallelism: usize,
    pub cache: Option<&'a VerdictCache>,
    pub classify: ClassifyOptions,
}

impl Default for BatchOptions<'_> {
    fn default() -> Self {
        BatchOptions {
            parallelism: 1,
            cache: None,
            classify: ClassifyOptions::default(),
        }
    }
}

/// Classifies `records` in order. Accepts owned records or references.
pub fn run_batch<R>(
    style: &PromptStyle,
    algorithm: Algorithm,
    records: &[R],
    backend: &dyn Backend,
    opts: &BatchOptions<'_>,
) -> BatchOutcome
where
    R: Borrow<MethodRecord> + Sync,
{
    let parallelism = opts.parallelism.max(1);
    let exec = if parallelism > 1 {
        Execution::Parallel
    } else {
        Execution::Sequential
    };
    let backend_id = backend.id();
    let style_hash = style.style_hash();
    let hits = AtomicUsize::new(0);
    let results = par::with_threads(parallelism, || {
        exec.map(records, |r| {
            let r: &MethodRecord = r.borrow();
            let key = opts
                .cache
                .map(|_| VerdictCache::key(&backend_id, &style_hash, algorithm, &r.method_id, &r.source));
            if let (Some(cache), Some(key)) = (opts.cache, &key) {
                if let Some(v) = cache.get(key) {
                    hits.fetch_add(1, Ordering::Relaxed);
                    return Ok(v);
                }
            }
            match classify(style, algorithm, r, backend, &opts.classify) {
                Ok(v) => {
                    if let (Some(cache), Some(key)) = (opts.cache, &key) {
                        if let Err(e) = cache.put(key, &v) {
                            log::warn!("cannot write cache entry for {}: {e}", r.method_id);
                        }
                    }
                    Ok(v)
                }
                Err(e) => Err(record_error(&r.method_id, &e)),
            }
        })
    });
    let mut summary = BatchSummary {
        total: records.len(),
        cache_hits: hits.into_inner(),
        ..Default::default()
    };
    for r in &results {
        match r {
            Ok(v) => {
                summary.verdicts += 1;
                if v.decode_failure.is_some() {
                    summary.lenient_fallbacks += 1;
                }
            }
            Err(e) => {
                summary.errors += 1;
                if e.is_backend() {
                    summary.backend_errors += 1;
                }
            }
        }
    }
    BatchOutcome { results, summary }
}

fn record_error(method_id: &str, e: &ClassifyError) -> RecordError {
    RecordError {
        method_id: method_id.to_string(),
        kind: e.kind().to_string(),
        message: e.to_string(),
    }
}
