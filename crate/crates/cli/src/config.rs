use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// Values a JSON config file may supply. Command-line flags win over the
/// file; relative paths are resolved against the file's directory.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub corpus: Option<PathBuf>,
    pub truth: Option<PathBuf>,
    pub filter: Option<String>,
    pub patterns: Option<Vec<PathBuf>>,
    pub style: Option<String>,
    pub backend: Option<String>,
    pub algorithm: Option<String>,
    pub mode: Option<String>,
    pub split: Option<String>,
    pub split_file: Option<PathBuf>,
    pub ratio: Option<f64>,
    pub seed: Option<u64>,
    pub parallelism: Option<usize>,
    pub cache_dir: Option<PathBuf>,
    pub out_dir: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub lenient: Option<bool>,
    pub per_algorithm: Option<bool>,
    pub strip_comments: Option<bool>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::data(format!("cannot read config {}: {e}", path.display())))?;
        let mut cfg: RunConfig =
            serde_json::from_str(&text).map_err(|e| CliError::usage(format!("invalid config {}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new(""));
        let fix = |p: &mut Option<PathBuf>| {
            if let Some(p) = p {
                if p.is_relative() {
                    *p = base.join(&*p);
                }
            }
        };
        fix(&mut cfg.corpus);
        fix(&mut cfg.truth);
        fix(&mut cfg.split_file);
        fix(&mut cfg.cache_dir);
        fix(&mut cfg.out_dir);
        fix(&mut cfg.out);
        if let Some(ps) = &mut cfg.patterns {
            for p in ps.iter_mut().filter(|p| p.is_relative()) {
                *p = base.join(&*p);
            }
        }
        Ok(cfg)
    }
}

/// Flag value, else config value, else an error naming the flag.
pub fn required<T>(flag: Option<T>, config: Option<T>, name: &str) -> Result<T, CliError> {
    flag.or(config)
        .ok_or_else(|| CliError::usage(format!("missing required option --{name}")))
}

pub fn parse_value<T: std::str::FromStr>(text: &str, what: &str) -> Result<T, CliError>
where
    T::Err: std::fmt::Display,
{
    text.parse().map_err(|e| CliError::usage(format!("invalid {what} `{text}`: {e}")))
}
