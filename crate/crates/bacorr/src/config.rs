use std::fmt;
use std::path::Path;
use std::str::FromStr;

use bacorr_core::{AttachmentRule, CorrelationMode, ModelKind};
use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("invalid config: {0}")]
    Invalid(String),
    #[error("cannot read config {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("malformed config: {0}")]
    Json(#[from] serde_json::Error),
}

/// How the attachment count scales with graph size.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Density {
    /// Fixed `m = sparse_m`.
    Sparse,
    /// `m = ⌊n / dense_divisor⌋`.
    Dense,
}

impl Density {
    pub const ALL: [Density; 2] = [Self::Sparse, Self::Dense];

    pub fn name(self) -> &'static str {
        match self {
            Self::Sparse => "sparse",
            Self::Dense => "dense",
        }
    }
}

impl fmt::Display for Density {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Density {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Self::ALL
            .into_iter()
            .find(|d| d.name() == s)
            .ok_or_else(|| format!("unknown density {s:?}"))
    }
}

/// Twelve log-spaced sizes from 25 to 2000.
pub fn default_sizes() -> Vec<usize> {
    (0..12)
        .map(|i| (25.0 * 80f64.powf(i as f64 / 11.0)).round() as usize)
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub sizes: Vec<usize>,
    pub replicates: usize,
    /// Feature dimension, also the hidden width of every layer.
    pub d: usize,
    pub sparse_m: usize,
    pub dense_divisor: usize,
    pub modes: Vec<CorrelationMode>,
    pub models: Vec<ModelKind>,
    pub densities: Vec<Density>,
    pub seed: u64,
    /// Late-stage window for the estimate table.
    pub late_frac: f64,
    pub rho_renormalize: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            sizes: default_sizes(),
            replicates: 30,
            d: 32,
            sparse_m: 5,
            dense_divisor: 5,
            modes: CorrelationMode::ALL.to_vec(),
            models: ModelKind::ALL.to_vec(),
            densities: Density::ALL.to_vec(),
            seed: 20_240_501,
            late_frac: 0.25,
            rho_renormalize: false,
        }
    }
}

fn has_duplicates<T: PartialEq>(items: &[T]) -> bool {
    items
        .iter()
        .enumerate()
        .any(|(i, a)| items[..i].contains(a))
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let cfg: Self = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |msg: String| Err(ConfigError::Invalid(msg));
        if self.sizes.is_empty() {
            return bad("sizes is empty".into());
        }
        if self.sizes.windows(2).any(|w| w[0] >= w[1]) {
            return bad(format!(
                "sizes must be strictly increasing: {:?}",
                self.sizes
            ));
        }
        if let Some(&n) = self.sizes.iter().find(|&&n| n < self.sparse_m) {
            return bad(format!("size {n} is below sparse_m = {}", self.sparse_m));
        }
        if self.replicates < 2 {
            return bad(format!(
                "replicates must be at least 2, got {}",
                self.replicates
            ));
        }
        if self.d == 0 || self.sparse_m == 0 || self.dense_divisor == 0 {
            return bad("d, sparse_m and dense_divisor must be positive".into());
        }
        if !(self.late_frac > 0.0 && self.late_frac <= 1.0) {
            return bad(format!(
                "late_frac must lie in (0, 1], got {}",
                self.late_frac
            ));
        }
        if self.modes.is_empty() || self.models.is_empty() || self.densities.is_empty() {
            return bad("modes, models and densities must be non-empty".into());
        }
        if has_duplicates(&self.modes)
            || has_duplicates(&self.models)
            || has_duplicates(&self.densities)
        {
            return bad("modes, models and densities must not repeat".into());
        }
        Ok(())
    }

    pub fn attachment_rule(&self, density: Density) -> AttachmentRule {
        match density {
            Density::Sparse => AttachmentRule::Fixed(self.sparse_m),
            Density::Dense => AttachmentRule::Proportional {
                divisor: self.dense_divisor,
            },
        }
    }

    /// Attachment count for a graph of `n` nodes.
    pub fn attachment(&self, density: Density, n: usize) -> usize {
        self.attachment_rule(density).resolve(n)
    }
}
