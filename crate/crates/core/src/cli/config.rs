//! Command-line flags, JSON config files and their validated merge.

use std::path::{Path, PathBuf};

use clap::{Parser, ValueEnum};
use num_complex::Complex64;
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::matcore::{DensityMatrix, HermitianOperator};
use crate::mixture::DEFAULT_SIZE_CAP;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    /// Entropy gap of `R_{m,n}` for n = 1..n-max.
    Converge,
    /// Exact commuting-pair gap, Q_n and the singular lower bound.
    Commuting,
    /// Neyman–Pearson error exponents for N = 1..n-max.
    Stein,
    /// Weight-one codebooks: Holevo quantity, cost bound and repetition-code errors.
    Codesim,
    /// Runs the invariant bank and prints a JSON summary.
    Checks,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "mixent", version, about = "Entropy-gap, Stein and capacity-per-unit-cost experiments")]
pub struct Cli {
    pub command: Command,
    /// Hilbert-space dimension of seeded states.
    #[arg(long)]
    pub dim: Option<usize>,
    #[arg(long)]
    pub n_max: Option<usize>,
    /// Block length of σ in the mixture (converge only).
    #[arg(long)]
    pub m: Option<usize>,
    /// Test rate in nats; defaults to half the relative entropy of the pair.
    #[arg(long)]
    pub rate: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Slack used when re-asserting invariants before output.
    #[arg(long)]
    pub tolerance: Option<f64>,
    #[arg(long)]
    pub size_cap: Option<usize>,
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Spectrum of the first state (σ, or ρ0), comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub lambda: Option<Vec<f64>>,
    /// Spectrum of the second state (ρ, or ρ1), comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub mu: Option<Vec<f64>>,
    /// Target block error for the repetition count (codesim only).
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Fixed repetition count N, overriding the ε-based schedule (codesim only).
    #[arg(long)]
    pub repeats: Option<usize>,
    /// JSON file whose fields override the flags.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum Entry {
    Real(f64),
    Complex([f64; 2]),
}

/// A state given by its spectrum (diagonal in the standard basis) or by its matrix.
#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "lowercase")]
pub enum StateSpec {
    Spectrum(Vec<f64>),
    Matrix(Vec<Vec<Entry>>),
}

impl StateSpec {
    pub fn to_density(&self) -> Result<DensityMatrix> {
        match self {
            StateSpec::Spectrum(p) => DensityMatrix::from_spectrum(p),
            StateSpec::Matrix(rows) => {
                let rows: Vec<Vec<Complex64>> = rows
                    .iter()
                    .map(|r| {
                        r.iter()
                            .map(|e| match *e {
                                Entry::Real(x) => Complex64::new(x, 0.0),
                                Entry::Complex([re, im]) => Complex64::new(re, im),
                            })
                            .collect()
                    })
                    .collect();
                DensityMatrix::new(HermitianOperator::from_rows(&rows)?)
            }
        }
    }
}

/// `first` is σ (or ρ0), `second` is ρ (or ρ1).
#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StatePair {
    pub first: StateSpec,
    pub second: StateSpec,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    command: Option<Command>,
    dim: Option<usize>,
    n_max: Option<usize>,
    m: Option<usize>,
    rate: Option<f64>,
    seed: Option<u64>,
    tolerance: Option<f64>,
    size_cap: Option<usize>,
    out: Option<PathBuf>,
    format: Option<Format>,
    lambda: Option<Vec<f64>>,
    mu: Option<Vec<f64>>,
    epsilon: Option<f64>,
    repeats: Option<usize>,
    state_pair: Option<StatePair>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub command: Command,
    pub dim: usize,
    pub n_max: usize,
    pub m: usize,
    pub rate: Option<f64>,
    pub seed: u64,
    pub tolerance: f64,
    pub size_cap: usize,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub epsilon: f64,
    pub repeats: Option<usize>,
    pub state_pair: Option<StatePair>,
}

impl ExperimentConfig {
    pub fn defaults(command: Command) -> Self {
        Self {
            command,
            dim: 2,
            n_max: 8,
            m: 1,
            rate: None,
            seed: 0,
            tolerance: 1e-9,
            size_cap: DEFAULT_SIZE_CAP,
            out: None,
            format: if command == Command::Checks { Format::Json } else { Format::Csv },
            epsilon: 0.2,
            repeats: None,
            state_pair: None,
        }
    }

    /// Defaults, then flags, then the config file named by `--config`.
    pub fn from_cli(cli: Cli) -> Result<Self> {
        let file = match &cli.config {
            Some(path) => read_config(path)?,
            None => ConfigFile::default(),
        };
        let command = file.command.unwrap_or(cli.command);
        let mut c = Self::defaults(command);
        macro_rules! merge {
            ($($field:ident),*) => {$(
                if let Some(v) = file.$field.or(cli.$field) {
                    c.$field = v;
                }
            )*};
        }
        merge!(dim, n_max, m, seed, tolerance, size_cap, format, epsilon);
        c.rate = file.rate.or(cli.rate);
        c.out = file.out.or(cli.out);
        c.repeats = file.repeats.or(cli.repeats);
        let lambda = file.lambda.or(cli.lambda);
        let mu = file.mu.or(cli.mu);
        c.state_pair = match (file.state_pair, lambda, mu) {
            (Some(pair), _, _) => Some(pair),
            (None, Some(l), Some(m)) => Some(StatePair {
                first: StateSpec::Spectrum(l),
                second: StateSpec::Spectrum(m),
            }),
            (None, None, None) => None,
            _ => return Err(Error::Config("--lambda and --mu must be given together".into())),
        };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if !(1..=64).contains(&self.dim) {
            return bad(format!("dim must lie in 1..=64, got {}", self.dim));
        }
        if self.n_max == 0 {
            return bad("n-max must be positive".into());
        }
        if self.m == 0 {
            return bad("m must be positive".into());
        }
        if let Some(r) = self.rate {
            if !(r > 0.0 && r.is_finite()) {
                return bad(format!("rate must be positive and finite, got {r}"));
            }
        }
        if !(self.tolerance > 0.0 && self.tolerance.is_finite()) {
            return bad(format!("tolerance must be positive, got {}", self.tolerance));
        }
        if self.size_cap == 0 {
            return bad("size-cap must be positive".into());
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return bad(format!("epsilon must lie in (0, 1), got {}", self.epsilon));
        }
        if self.repeats == Some(0) {
            return bad("repeats must be positive".into());
        }
        if self.command == Command::Checks && self.format != Format::Json {
            return bad("checks only writes JSON".into());
        }
        Ok(())
    }
}

fn read_config(path: &Path) -> Result<ConfigFile> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Result<ExperimentConfig> {
        let mut full = vec!["mixent"];
        full.extend_from_slice(args);
        ExperimentConfig::from_cli(Cli::try_parse_from(full).unwrap())
    }

    #[test]
    fn flags_override_defaults() {
        let c = parse(&["stein", "--n-max", "5", "--seed", "9", "--format", "json"]).unwrap();
        assert_eq!((c.command, c.n_max, c.seed, c.format), (Command::Stein, 5, 9, Format::Json));
        assert_eq!(c.dim, 2);
    }

    #[test]
    fn spectra_need_both_sides() {
        let c = parse(&["commuting", "--lambda", "0.3,0.7", "--mu", "0.6,0.4"]).unwrap();
        assert_eq!(
            c.state_pair.unwrap().first,
            StateSpec::Spectrum(vec![0.3, 0.7])
        );
        assert!(matches!(parse(&["commuting", "--lambda", "0.3,0.7"]), Err(Error::Config(_))));
    }

    #[test]
    fn invalid_values_are_config_errors() {
        for args in [
            &["converge", "--n-max", "0"][..],
            &["converge", "--tolerance=-1"],
            &["stein", "--rate=-0.5"],
            &["codesim", "--epsilon", "1.5"],
            &["checks", "--format", "csv"],
        ] {
            let err = parse(args).unwrap_err();
            assert_eq!(err.exit_code(), 2, "{args:?}");
        }
    }

    #[test]
    fn config_file_overrides_flags() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.json");
        std::fs::write(
            &path,
            r#"{"n_max": 3, "state_pair": {"first": {"matrix": [[0.5, [0.1, 0.2]], [[0.1, -0.2], 0.5]]},
                "second": {"spectrum": [0.5, 0.5]}}}"#,
        )
        .unwrap();
        let c = parse(&["converge", "--n-max", "7", "--config", path.to_str().unwrap()]).unwrap();
        assert_eq!(c.n_max, 3);
        let pair = c.state_pair.unwrap();
        let sigma = pair.first.to_density().unwrap();
        assert!((sigma.get(0, 1).im - 0.2).abs() < 1e-15);
    }

    #[test]
    fn unknown_config_keys_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.json");
        std::fs::write(&path, r#"{"n_maximum": 3}"#).unwrap();
        let err = parse(&["converge", "--config", path.to_str().unwrap()]).unwrap_err();
        assert!(matches!(err, Error::Config(_)));
    }
}
