use std::path::PathBuf;

use flagricci_core::catalog::{find_space, instantiate_classical};
use flagricci_core::dynamics::{IntegrationOptions, SearchOptions};
use flagricci_core::{ClassicalFamily, FlagSpace};

use crate::error::{CliError, Result};

/// Environment variable naming the default directory for portrait CSV files.
pub const OUTPUT_DIR_ENV: &str = "FLAGRICCI_OUTPUT_DIR";

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, clap::ValueEnum)]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
}

/// Which space a command acts on.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Target {
    Named(String),
    Family { family: ClassicalFamily, l: u32, p: u32 },
}

impl Target {
    /// Builds a target from a positional name or `--family/--l/--p`.
    pub fn from_parts(name: Option<&str>, family: Option<char>, l: Option<u32>, p: Option<u32>) -> Result<Self> {
        match (name, family) {
            (Some(_), Some(_)) => Err(CliError::Usage("give either a space name or --family, not both".into())),
            (Some(n), None) => Ok(Self::Named(n.to_string())),
            (None, Some(c)) => {
                let family = ClassicalFamily::from_letter(c)
                    .ok_or_else(|| CliError::Usage(format!("unknown family `{c}`; expected B, C or D")))?;
                match (l, p) {
                    (Some(l), Some(p)) => Ok(Self::Family { family, l, p }),
                    _ => Err(CliError::Usage("--family needs both --l and --p".into())),
                }
            }
            (None, None) => Err(CliError::Usage("no space given".into())),
        }
    }

    pub fn resolve(&self) -> Result<FlagSpace> {
        Ok(match self {
            Self::Named(name) => find_space(name)?,
            Self::Family { family, l, p } => instantiate_classical(*family, *l, *p)?,
        })
    }
}

/// Numeric settings shared by all commands.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub format: OutputFormat,
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Integration horizon in flow time.
    pub horizon: f64,
    /// Newton seeds per axis.
    pub density: usize,
    /// Output file, or the portrait directory.
    pub output: Option<PathBuf>,
    /// Replaces the tolerance of every `≤` check in `verify`.
    pub check_tol: Option<f64>,
    /// Seed for sampled points.
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            format: OutputFormat::Json,
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            horizon: 50.0,
            density: 64,
            output: None,
            check_tol: None,
            seed: 0,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(CliError::Usage(format!("{name} must be positive and finite, got {v}")))
            }
        };
        positive("--rel-tol", self.rel_tol)?;
        positive("--abs-tol", self.abs_tol)?;
        positive("--horizon", self.horizon)?;
        if let Some(t) = self.check_tol {
            positive("--tol", t)?;
        }
        if self.density < 8 {
            return Err(CliError::Usage(format!("--density must be at least 8, got {}", self.density)));
        }
        Ok(())
    }

    pub fn integration(&self) -> IntegrationOptions {
        IntegrationOptions {
            rel_tol: self.rel_tol,
            abs_tol: self.abs_tol,
            ..IntegrationOptions::default()
        }
    }

    pub fn search(&self) -> SearchOptions {
        SearchOptions {
            density: self.density,
            ..SearchOptions::default()
        }
    }

    /// `--out`, else `$FLAGRICCI_OUTPUT_DIR`, else the working directory.
    pub fn output_dir(&self) -> PathBuf {
        self.output
            .clone()
            .or_else(|| std::env::var_os(OUTPUT_DIR_ENV).map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from("."))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(RunConfig::default().validate().is_ok());
        let bad = RunConfig {
            density: 4,
            ..RunConfig::default()
        };
        assert!(matches!(bad.validate(), Err(CliError::Usage(_))));
        let bad = RunConfig {
            rel_tol: 0.0,
            ..RunConfig::default()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn targets() {
        let t = Target::from_parts(None, Some('c'), Some(2), Some(1)).unwrap();
        assert_eq!(t.resolve().unwrap().dims(), &[4, 2]);
        assert!(Target::from_parts(None, Some('C'), Some(2), None).is_err());
        assert!(Target::from_parts(Some("x"), Some('C'), Some(2), Some(1)).is_err());
        assert!(Target::from_parts(None, Some('Q'), Some(2), Some(1)).is_err());
        assert_eq!(Target::from_parts(None, None, None, None).unwrap_err().exit_code(), 2);
    }
}
