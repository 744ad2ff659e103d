use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::config::ExperimentConfig;
use crate::error::CliResult;

#[derive(Debug, Parser)]
#[command(name = "regenwalk", version, about = "Renewal structure of self-avoiding walks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact counts of walks, bridges and irreducible bridges up to length L.
    Enumerate(ConfigArgs),
    /// Calibrate the regeneration step law from the irreducible counts.
    Calibrate(ConfigArgs),
    /// Sample skeleton ensembles at every n.
    Sample(ConfigArgs),
    /// Covariance fit, KS marginals, gap and shrinking statistics.
    Analyze {
        #[command(flatten)]
        config: ConfigArgs,
        /// Exit with status 3 if a statistical threshold is violated.
        #[arg(long)]
        check: bool,
    },
    /// Compare exhaustive, product and sampled skeleton laws at small n.
    Oracle(ConfigArgs),
}

/// A JSON config file plus per-field overrides.
#[derive(Debug, Default, Args)]
pub struct ConfigArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub d: Option<usize>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long = "L")]
    pub cutoff: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    pub n: Option<Vec<i64>>,
    #[arg(long)]
    pub replicas: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_delimiter = ',')]
    pub grid: Option<Vec<f64>>,
    #[arg(long)]
    pub threads: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub box_radius: Option<i64>,
}

impl ConfigArgs {
    pub fn resolve(&self) -> CliResult<ExperimentConfig> {
        let mut c = match &self.config {
            Some(path) => ExperimentConfig::from_file(path)?,
            None => ExperimentConfig::default(),
        };
        if let Some(v) = self.d {
            c.d = v;
        }
        if let Some(v) = self.beta {
            c.beta = v;
        }
        if let Some(v) = self.cutoff {
            c.cutoff = v;
        }
        if let Some(v) = &self.n {
            c.n = v.clone();
        }
        if let Some(v) = self.replicas {
            c.replicas = v;
        }
        if let Some(v) = self.seed {
            c.seed = v;
        }
        if let Some(v) = &self.grid {
            c.grid = v.clone();
        }
        if let Some(v) = self.threads {
            c.threads = v;
        }
        if let Some(v) = &self.out {
            c.out = v.clone();
        }
        if let Some(v) = self.box_radius {
            c.box_radius = Some(v);
        }
        Ok(c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_defaults() {
        let cli = Cli::try_parse_from([
            "regenwalk", "sample", "--L", "10", "--n", "64,128", "--grid", "0.25,0.5", "--threads",
            "4",
        ])
        .unwrap();
        let Command::Sample(a) = cli.command else {
            panic!("wrong subcommand")
        };
        let c = a.resolve().unwrap();
        assert_eq!(c.cutoff, 10);
        assert_eq!(c.n, [64, 128]);
        assert_eq!(c.grid, [0.25, 0.5]);
        assert_eq!(c.threads, 4);
        assert_eq!(c.beta, 1.2);
    }

    #[test]
    fn analyze_check_flag() {
        let cli = Cli::try_parse_from(["regenwalk", "analyze", "--check", "--seed", "9"]).unwrap();
        assert!(matches!(cli.command, Command::Analyze { check: true, .. }));
    }
}
