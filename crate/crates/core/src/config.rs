//! Run configuration: built-in defaults, overridden by a TOML file,
//! overridden by command-line flags.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::inference::Aggregation;
use crate::kg::ColumnOrder;
use crate::limit::Limit;
use crate::miner::{MinerSettings, PathWeight};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub train: Option<PathBuf>,
    pub valid: Option<PathBuf>,
    pub test: Option<PathBuf>,
    pub columns: ColumnOrder,
    /// Maximum rule length.
    pub max_len: usize,
    pub alpha: Limit,
    pub beta: Limit,
    pub answer_cap: Limit,
    /// Rules applied per query.
    pub top_k: Limit,
    pub mode: Aggregation,
    pub seed: u64,
    pub path_weight: PathWeight,
    pub workers: Option<usize>,
    pub rules: Option<PathBuf>,
    pub metrics_out: Option<PathBuf>,
    pub timing_out: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            train: None,
            valid: None,
            test: None,
            columns: ColumnOrder::Sro,
            max_len: 3,
            alpha: Limit::At(100),
            beta: Limit::At(100),
            answer_cap: Limit::At(5),
            top_k: Limit::At(300),
            mode: Aggregation::Sum,
            seed: 0,
            path_weight: PathWeight::Markov,
            workers: None,
            rules: None,
            metrics_out: None,
            timing_out: None,
        }
    }
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_len == 0 {
            return Err(Error::Config("max_len must be at least 1".into()));
        }
        if self.workers == Some(0) {
            return Err(Error::Config("workers must be at least 1".into()));
        }
        Ok(())
    }

    pub fn miner_settings(&self) -> MinerSettings {
        MinerSettings {
            max_len: self.max_len,
            alpha: self.alpha,
            beta: self.beta,
            answer_cap: self.answer_cap,
            seed: self.seed,
            weight: self.path_weight,
        }
    }

    pub fn top_k(&self) -> usize {
        self.top_k.get().unwrap_or(usize::MAX)
    }

    pub fn require_train(&self) -> Result<&Path> {
        self.train
            .as_deref()
            .ok_or_else(|| Error::Config("no training file given (--train)".into()))
    }

    pub fn require_test(&self) -> Result<&Path> {
        self.test
            .as_deref()
            .ok_or_else(|| Error::Config("no test file given (--test)".into()))
    }

    pub fn require_rules(&self) -> Result<&Path> {
        self.rules
            .as_deref()
            .ok_or_else(|| Error::Config("no rule file given (--rules)".into()))
    }
}
