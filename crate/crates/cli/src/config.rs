use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::ValueEnum;
use roth_core::cutnorm::SearchGrid;
use serde::Deserialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Caps {
    /// Regularity dimension cap.
    pub dimension: Option<u32>,
    /// Modulus cap for the iteration driver.
    pub modulus: Option<u64>,
    pub grid: Option<SearchGrid>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Paths {
    pub set: Option<PathBuf>,
    pub function: Option<PathBuf>,
    pub out: Option<PathBuf>,
}

/// Experiment settings read from `--config`. Command-line flags win.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(rename = "N")]
    pub n: Option<usize>,
    pub q: Option<u64>,
    #[serde(alias = "δ")]
    pub delta: Option<f64>,
    pub c: Option<f64>,
    #[serde(default)]
    pub seeds: Vec<u64>,
    #[serde(default)]
    pub caps: Caps,
    pub threads: Option<usize>,
    pub format: Option<Format>,
    #[serde(default)]
    pub paths: Paths,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let cfg: Self = toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == Some(0) {
            bail!("N must be positive");
        }
        if self.q == Some(0) {
            bail!("q must be positive");
        }
        if let Some(d) = self.delta {
            if !(d > 0.0 && d <= 1.0) {
                bail!("δ = {d} not in (0, 1]");
            }
        }
        if let Some(c) = self.c {
            if !(c > 0.0 && c.is_finite()) {
                bail!("c = {c} must be positive");
            }
        }
        if self.threads == Some(0) {
            bail!("threads must be positive");
        }
        if self.caps.modulus == Some(0) {
            bail!("modulus cap must be positive");
        }
        if let Some(g) = &self.caps.grid {
            if g.k_min > g.k_max || g.max_modulus_factor == 0 || !(g.threshold >= 0.0) {
                bail!("grid needs k_min <= k_max, max_modulus_factor >= 1 and threshold >= 0");
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_full_config() {
        let cfg: ExperimentConfig = toml::from_str(
            r#"
            N = 4096
            q = 2
            delta = 0.1
            c = 0.05
            seeds = [1, 2, 3]
            threads = 2
            format = "csv"
            [caps]
            dimension = 6
            modulus = 1000
            [caps.grid]
            k_min = 0
            k_max = 2
            [paths]
            set = "a.txt"
            "#,
        )
        .unwrap();
        cfg.validate().unwrap();
        assert_eq!(cfg.n, Some(4096));
        assert_eq!(cfg.format, Some(Format::Csv));
        let g = cfg.caps.grid.unwrap();
        assert_eq!((g.k_min, g.k_max, g.max_modulus_factor), (0, 2, 12));
    }

    #[test]
    fn rejects_unknown_keys_and_bad_ranges() {
        assert!(toml::from_str::<ExperimentConfig>("N = 4\nfoo = 1").is_err());
        assert!(toml::from_str::<ExperimentConfig>("[caps]\nwidth = 1").is_err());
        let cfg: ExperimentConfig = toml::from_str("delta = 1.5").unwrap();
        assert!(cfg.validate().is_err());
        let cfg: ExperimentConfig = toml::from_str("\"δ\" = 0.5").unwrap();
        assert_eq!(cfg.delta, Some(0.5));
    }
}
