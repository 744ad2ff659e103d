use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

/// Below this `beta` the d = 2 walk is at or past criticality (`log mu ~ 0.970`).
pub const SUPERCRITICAL_GUARD_2D: f64 = 0.98;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub d: usize,
    pub beta: f64,
    #[serde(rename = "L")]
    pub cutoff: usize,
    pub n: Vec<i64>,
    pub replicas: usize,
    pub seed: u64,
    pub grid: Vec<f64>,
    /// Transverse box radius for the sampler; derived from the step law if unset.
    pub box_radius: Option<i64>,
    // `out` and `threads` do not affect results and are left out of the copy
    // embedded in output files, so reruns elsewhere stay byte-identical
    #[serde(skip_serializing)]
    pub out: PathBuf,
    /// Worker threads; 0 lets rayon decide.
    #[serde(skip_serializing)]
    pub threads: usize,
    /// Distances for the walk-level shrinking statistic (exhaustive sampling).
    pub shrink_n: Vec<i64>,
    pub shrink_samples: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            d: 2,
            beta: 1.2,
            cutoff: 12,
            n: vec![400],
            replicas: 20_000,
            seed: 1,
            grid: (1..=9).map(|i| i as f64 / 10.0).collect(),
            box_radius: None,
            out: PathBuf::from("out"),
            threads: 0,
            shrink_n: vec![4, 6],
            shrink_samples: 2_000,
        }
    }
}

impl ExperimentConfig {
    pub fn from_file(path: &Path) -> CliResult<Self> {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| CliError::format(path, e.to_string()))
    }

    /// Checks the invariants and returns any warnings to print.
    pub fn validate(&self) -> CliResult<Vec<String>> {
        let bad = |m: String| Err(CliError::Config(m));
        if !(2..=regenwalk_core::MAX_DIM).contains(&self.d) {
            return bad(format!("d = {} is not supported (2..={})", self.d, regenwalk_core::MAX_DIM));
        }
        if !(self.beta.is_finite() && self.beta > 0.0) {
            return bad(format!("beta must be positive, got {}", self.beta));
        }
        if self.n.is_empty() || self.n.iter().any(|&n| n < 1) {
            return bad("n must be a non-empty list of positive distances".into());
        }
        if self.replicas == 0 {
            return bad("replicas must be positive".into());
        }
        if self.grid.is_empty()
            || self.grid.iter().any(|&t| !(t > 0.0 && t < 1.0))
            || self.grid.windows(2).any(|w| w[0] >= w[1])
        {
            return bad("grid must be strictly increasing inside (0, 1)".into());
        }
        if let Some(r) = self.box_radius {
            if r < 1 {
                return bad("box radius must be positive".into());
            }
        }
        if self.shrink_n.iter().any(|&n| n < 1) {
            return bad("shrink_n entries must be positive".into());
        }
        let mut warnings = Vec::new();
        if self.d == 2 && self.beta <= SUPERCRITICAL_GUARD_2D {
            warnings.push(format!(
                "beta = {} is not safely above the critical point of Z^2 (~0.970); \
                 masses and the renewal law may not exist",
                self.beta
            ));
        }
        Ok(warnings)
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.out.join(name)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        let c = ExperimentConfig::default();
        assert!(c.validate().unwrap().is_empty());
    }

    #[test]
    fn json_uses_capital_l_and_fills_defaults() {
        let c: ExperimentConfig = serde_json::from_str(r#"{"L": 10, "n": [64, 128]}"#).unwrap();
        assert_eq!(c.cutoff, 10);
        assert_eq!(c.n, [64, 128]);
        assert_eq!(c.beta, 1.2);
        let back = serde_json::to_string(&c).unwrap();
        assert!(back.contains("\"L\":10"));
        assert!(serde_json::from_str::<ExperimentConfig>(r#"{"l": 3}"#).is_err());
    }

    #[test]
    fn validation() {
        let mut c = ExperimentConfig::default();
        c.beta = 0.9;
        assert_eq!(c.validate().unwrap().len(), 1);
        c.beta = -1.0;
        assert!(c.validate().is_err());
        let mut c = ExperimentConfig::default();
        c.grid = vec![0.5, 0.5];
        assert!(c.validate().is_err());
        let mut c = ExperimentConfig::default();
        c.d = 5;
        assert!(c.validate().is_err());
    }
}
