//! Batch experiment runner.
//!
//! Each command produces a fixed set of columns, re-checks the owning
//! module's invariants on every row, and only then writes the report
//! (atomically, via a temporary file in the target directory).

pub mod checks;
pub mod config;

use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::codesim::{build_repetition_scheme, error_report, repetitions_for, capacity_series};
use crate::commuting::{classical_gap, compute_qn, singular_lower_bound, ClassicalPair, EnumerationLimits};
use crate::cqchannel::{fano_rate_bound, Codebook};
use crate::entropy::{umegaki_relative_entropy, ExtendedReal};
use crate::error::{Error, Result};
use crate::matcore::DensityMatrix;
use crate::mixture::convergence_series;
use crate::random::StateSampler;
use crate::stein::exponent_series;

pub use config::{Cli, Command, ExperimentConfig, Format, StatePair, StateSpec};

#[derive(Debug, Serialize)]
pub struct ConvergeRow {
    pub n: usize,
    pub gap_nats: f64,
    pub residual_nats: ExtendedReal,
    pub target_nats: ExtendedReal,
}

#[derive(Debug, Serialize)]
pub struct CommutingRow {
    pub n: usize,
    pub gap_formula: f64,
    pub qn: Option<f64>,
    pub regular_flag: bool,
    pub singular_lower_bound: Option<f64>,
}

#[derive(Debug, Serialize)]
pub struct SteinRow {
    #[serde(rename = "N")]
    pub n_copies: usize,
    pub alpha: f64,
    pub beta: f64,
    pub beta_exponent: ExtendedReal,
    pub rate: f64,
}

#[derive(Debug, Serialize)]
pub struct CodesimRow {
    pub n: usize,
    pub holevo: f64,
    pub cost: f64,
    pub cost_bound: f64,
    pub fano_lower: f64,
    pub max_block_error: f64,
    pub lemma3_bound: f64,
}

/// JSON form of a codesim row, with the repetition count and per-word errors.
#[derive(Debug, Serialize)]
pub struct CodesimReport {
    #[serde(flatten)]
    pub row: CodesimRow,
    pub n_repeats: usize,
    pub eta: f64,
    pub beta: f64,
    pub per_word_error: std::collections::BTreeMap<String, f64>,
}

/// Serialized report plus the exit status it should end with.
#[derive(Debug)]
pub struct Output {
    pub bytes: Vec<u8>,
    pub status: i32,
}

fn invariant(ok: bool, what: impl FnOnce() -> String) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::Invariant(what()))
    }
}

/// `(first, second)` from the config, or two seeded full-rank states.
fn state_pair(c: &ExperimentConfig) -> Result<(DensityMatrix, DensityMatrix)> {
    match &c.state_pair {
        Some(pair) => {
            let (a, b) = (pair.first.to_density()?, pair.second.to_density()?);
            a.check_dim(&b)?;
            Ok((a, b))
        }
        None => {
            let mut s = StateSampler::new(c.seed);
            let a = s.density(c.dim);
            let b = s.density(c.dim);
            Ok((a, b))
        }
    }
}

fn classical_pair(c: &ExperimentConfig) -> Result<ClassicalPair> {
    let (lambda, mu) = match &c.state_pair {
        Some(_) => {
            let (a, b) = state_pair(c)?;
            if !a.is_diagonal() || !b.is_diagonal() {
                return Err(Error::Config("commuting needs both states diagonal".into()));
            }
            (a.diagonal_real(), b.diagonal_real())
        }
        None => {
            let mut s = StateSampler::new(c.seed);
            let lambda = s.probability_vector(c.dim);
            (lambda, s.probability_vector(c.dim))
        }
    };
    ClassicalPair::new(&mu, &lambda)
}

/// Explicit rate, or half of `S(ρ0‖ρ1)`.
fn resolve_rate(c: &ExperimentConfig, rho0: &DensityMatrix, rho1: &DensityMatrix) -> Result<f64> {
    if let Some(r) = c.rate {
        return Ok(r);
    }
    match umegaki_relative_entropy(rho0, rho1)? {
        ExtendedReal::Finite(d) if d > 0.0 => Ok(0.5 * d),
        d => Err(Error::Config(format!("no default rate for S(ρ0‖ρ1) = {d}; pass --rate"))),
    }
}

fn converge(c: &ExperimentConfig) -> Result<Vec<ConvergeRow>> {
    let (sigma, rho) = state_pair(c)?;
    let tol = c.tolerance;
    convergence_series(&sigma, &rho, c.m, c.n_max, c.size_cap)?
        .into_iter()
        .map(|r| {
            invariant(r.gap >= -tol, || format!("negative gap {} at n={}", r.gap, r.n))?;
            if let ExtendedReal::Finite(res) = r.residual {
                invariant(res >= -tol, || format!("gap {} above m·S(σ‖ρ) at n={}", r.gap, r.n))?;
            }
            Ok(ConvergeRow {
                n: r.n,
                gap_nats: r.gap,
                residual_nats: r.residual,
                target_nats: r.target,
            })
        })
        .collect()
}

fn commuting(c: &ExperimentConfig) -> Result<Vec<CommutingRow>> {
    let pair = classical_pair(c)?;
    let limits = EnumerationLimits::default();
    let regular = pair.is_regular();
    let tol = c.tolerance;
    (1..=c.n_max)
        .map(|n| {
            let gap = classical_gap(&pair, n, &limits)?;
            let qn = match compute_qn(&pair, n, &limits) {
                Ok(q) => Some(q),
                Err(Error::Infeasible(_)) => None,
                Err(e) => return Err(e),
            };
            invariant(gap >= -tol, || format!("negative gap {gap} at n={n}"))?;
            let lower = if regular {
                let target = pair.relative_entropy().value();
                invariant(gap <= target + tol, || format!("gap {gap} above S(σ‖ρ) at n={n}"))?;
                if let Some(q) = qn {
                    invariant((gap - target - q).abs() <= tol, || {
                        format!("gap {gap} differs from S(σ‖ρ) + Q_n at n={n}")
                    })?;
                }
                None
            } else if qn.is_some() {
                let lb = singular_lower_bound(&pair, n, &limits)?;
                invariant(gap >= lb - tol, || format!("gap {gap} below lower bound {lb} at n={n}"))?;
                Some(lb)
            } else {
                None
            };
            Ok(CommutingRow {
                n,
                gap_formula: gap,
                qn,
                regular_flag: regular,
                singular_lower_bound: lower,
            })
        })
        .collect()
}

fn stein(c: &ExperimentConfig) -> Result<Vec<SteinRow>> {
    let (rho0, rho1) = state_pair(c)?;
    let rate = resolve_rate(c, &rho0, &rho1)?;
    exponent_series(&rho0, &rho1, rate, c.n_max, c.size_cap)?
        .into_iter()
        .map(|r| {
            let bound = (-(r.n_copies as f64) * rate).exp();
            invariant(r.beta <= bound + 1e-12, || {
                format!("beta {} above e^(-N·rate) = {bound} at N={}", r.beta, r.n_copies)
            })?;
            let in_unit = |x: f64| (-c.tolerance..=1.0 + c.tolerance).contains(&x);
            invariant(in_unit(r.alpha) && in_unit(r.beta), || {
                format!("error probabilities out of [0, 1] at N={}", r.n_copies)
            })?;
            Ok(SteinRow {
                n_copies: r.n_copies,
                alpha: r.alpha,
                beta: r.beta,
                beta_exponent: r.beta_exponent,
                rate,
            })
        })
        .collect()
}

fn codesim(c: &ExperimentConfig) -> Result<Vec<CodesimReport>> {
    let (rho0, rho1) = state_pair(c)?;
    let rate = resolve_rate(c, &rho0, &rho1)?;
    let series = capacity_series(&rho0, &rho1, c.n_max, c.size_cap)?;
    let tol = c.tolerance;
    series
        .into_iter()
        .map(|row| {
            let n_repeats = match c.repeats {
                Some(n) => n,
                None => repetitions_for(row.n, c.epsilon, rate)?,
            };
            let scheme = build_repetition_scheme(&rho0, &rho1, Codebook::weight_one(row.n), n_repeats, rate, c.size_cap)?;
            let report = error_report(&scheme)?;
            invariant(row.holevo <= row.cost_bound + tol, || {
                format!("Holevo quantity {} above cost bound {} at n={}", row.holevo, row.cost_bound, row.n)
            })?;
            invariant(report.max_error <= report.bound + tol, || {
                format!("block error {} above bound {} at n={}", report.max_error, report.bound, row.n)
            })?;
            let fano_lower = fano_rate_bound(report.max_error.min(1.0 - f64::EPSILON), row.n)?;
            Ok(CodesimReport {
                row: CodesimRow {
                    n: row.n,
                    holevo: row.holevo,
                    cost: row.cost,
                    cost_bound: row.cost_bound,
                    fano_lower,
                    max_block_error: report.max_error,
                    lemma3_bound: report.bound,
                },
                n_repeats,
                eta: report.eta,
                beta: report.beta,
                per_word_error: report.per_word_error,
            })
        })
        .collect()
}

fn to_csv<T: Serialize>(rows: &[T]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(|e| Error::Io(e.to_string()))?;
    }
    w.into_inner().map_err(|e| Error::Io(e.to_string()))
}

fn to_json<T: Serialize + ?Sized>(value: &T) -> Result<Vec<u8>> {
    let mut bytes = serde_json::to_vec_pretty(value).map_err(|e| Error::Io(e.to_string()))?;
    bytes.push(b'\n');
    Ok(bytes)
}

fn encode<T: Serialize>(rows: &[T], format: Format) -> Result<Vec<u8>> {
    match format {
        Format::Csv => to_csv(rows),
        Format::Json => to_json(rows),
    }
}

/// Runs one experiment and serializes its report.
pub fn run(c: &ExperimentConfig) -> Result<Output> {
    let bytes = match c.command {
        Command::Converge => encode(&converge(c)?, c.format)?,
        Command::Commuting => encode(&commuting(c)?, c.format)?,
        Command::Stein => encode(&stein(c)?, c.format)?,
        Command::Codesim => {
            let reports = codesim(c)?;
            match c.format {
                Format::Json => to_json(&reports)?,
                Format::Csv => to_csv(&reports.into_iter().map(|r| r.row).collect::<Vec<_>>())?,
            }
        }
        Command::Checks => {
            let results = checks::run_checks(c.seed);
            let status = if results.iter().all(|r| r.pass) { 0 } else { 4 };
            return Ok(Output {
                bytes: to_json(&results)?,
                status,
            });
        }
    };
    Ok(Output { bytes, status: 0 })
}

/// Writes `bytes` to `path` through a temporary file renamed into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let io = |e: std::io::Error| Error::Io(format!("{}: {e}", path.display()));
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(bytes).map_err(io)?;
    tmp.as_file().sync_all().map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

#[derive(Serialize)]
struct ErrorRecord<'a> {
    error: &'a str,
    message: String,
    exit_code: i32,
}

fn report_error(e: &Error) -> i32 {
    let code = e.exit_code();
    let record = ErrorRecord {
        error: e.kind(),
        message: e.to_string(),
        exit_code: code,
    };
    eprintln!("{}", serde_json::to_string(&record).expect("plain record"));
    code
}

/// Entry point shared by the binary and the tests; returns the exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    use clap::Parser;
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            if !e.use_stderr() {
                print!("{e}");
                return 0;
            }
            eprint!("{e}");
            return report_error(&Error::Config("invalid command line".into()));
        }
    };
    let outcome = ExperimentConfig::from_cli(cli).and_then(|c| {
        let out = run(&c)?;
        match &c.out {
            Some(path) => write_atomic(path, &out.bytes)?,
            None => std::io::stdout()
                .write_all(&out.bytes)
                .map_err(|e| Error::Io(e.to_string()))?,
        }
        Ok(out.status)
    });
    match outcome {
        Ok(0) => 0,
        Ok(status) => {
            let e = Error::Invariant("one or more checks failed".into());
            eprintln!(
                "{}",
                serde_json::to_string(&ErrorRecord {
                    error: e.kind(),
                    message: e.to_string(),
                    exit_code: status,
                })
                .expect("plain record")
            );
            status
        }
        Err(e) => report_error(&e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(command: Command) -> ExperimentConfig {
        ExperimentConfig::defaults(command)
    }

    #[test]
    fn converge_equal_pair_gives_zero_gap() {
        let mut c = config(Command::Converge);
        c.n_max = 5;
        c.state_pair = Some(StatePair {
            first: StateSpec::Spectrum(vec![0.6, 0.4]),
            second: StateSpec::Spectrum(vec![0.6, 0.4]),
        });
        let rows = converge(&c).unwrap();
        assert!(rows.iter().all(|r| r.gap_nats.abs() < 1e-12));
    }

    #[test]
    fn commuting_reference_pair_at_fifty() {
        let mut c = config(Command::Commuting);
        c.n_max = 50;
        c.state_pair = Some(StatePair {
            first: StateSpec::Spectrum(vec![0.3, 0.7]),
            second: StateSpec::Spectrum(vec![0.6, 0.4]),
        });
        let rows = commuting(&c).unwrap();
        // 0.3 ln(0.3/0.6) + 0.7 ln(0.7/0.4)
        let target = 0.3 * 0.5f64.ln() + 0.7 * 1.75f64.ln();
        assert!((rows[49].gap_formula - target).abs() < 0.01);
        assert!(rows.iter().all(|r| r.regular_flag && r.singular_lower_bound.is_none()));
    }

    #[test]
    fn commuting_singular_rows_carry_lower_bound() {
        let mut c = config(Command::Commuting);
        c.n_max = 6;
        c.state_pair = Some(StatePair {
            first: StateSpec::Spectrum(vec![0.5, 0.2, 0.3]),
            second: StateSpec::Spectrum(vec![0.7, 0.3, 0.0]),
        });
        let rows = commuting(&c).unwrap();
        for r in &rows {
            assert!(!r.regular_flag);
            assert!(r.gap_formula >= r.singular_lower_bound.unwrap() - 1e-12);
        }
    }

    #[test]
    fn codesim_rows_respect_cost_bound() {
        let mut c = config(Command::Codesim);
        c.n_max = 6;
        c.seed = 3;
        c.repeats = Some(4);
        let rows = codesim(&c).unwrap();
        assert_eq!(rows.len(), 6);
        assert!(rows.iter().all(|r| r.row.holevo <= r.row.cost_bound + 1e-9));
        assert!(rows.iter().all(|r| r.per_word_error.len() == r.row.n));
    }

    #[test]
    fn csv_headers_are_fixed() {
        let mut c = config(Command::Stein);
        c.n_max = 2;
        let text = String::from_utf8(run(&c).unwrap().bytes).unwrap();
        assert_eq!(text.lines().next().unwrap(), "N,alpha,beta,beta_exponent,rate");
        c.command = Command::Codesim;
        c.repeats = Some(2);
        let text = String::from_utf8(run(&c).unwrap().bytes).unwrap();
        assert_eq!(
            text.lines().next().unwrap(),
            "n,holevo,cost,cost_bound,fano_lower,max_block_error,lemma3_bound"
        );
    }

    #[test]
    fn repeat_count_beyond_cap_is_feasibility_error() {
        let mut c = config(Command::Codesim);
        c.n_max = 2;
        c.repeats = Some(13);
        assert_eq!(run(&c).unwrap_err().exit_code(), 3);
    }

    #[test]
    fn atomic_write_replaces_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("out.csv");
        std::fs::write(&path, "old").unwrap();
        write_atomic(&path, b"new").unwrap();
        assert_eq!(std::fs::read(&path).unwrap(), b"new");
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
