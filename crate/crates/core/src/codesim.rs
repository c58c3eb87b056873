//! Repetition codes over a binary cq channel with position-wise decoding.
//!
//! A word `x ∈ A ⊂ {0,1}^n` is sent `N` times. Regrouping the `N n` output
//! factors by position gives, for each position `i`, the state `ρ_{x_i}^{⊗N}`,
//! and the decoder applies the same Neyman–Pearson test `E` to every position:
//! outcome `y_i = 0` on `E`, `y_i = 1` on `I - E`. Because the decoder is a
//! product over positions, the probability of decoding `x` correctly is
//! `Π_i Tr ρ_{x_i}^{⊗N} F_{x_i}` and the `N n`-fold space is never built.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::cqchannel::{codebook_cost, codebook_holevo, Codebook, Word};
use crate::entropy::umegaki_relative_entropy;
use crate::error::{Error, Result};
use crate::matcore::DensityMatrix;
use crate::stein::{np_test_projection, test_errors, TestErrors, TestProjection};

#[derive(Clone, Debug)]
pub struct RepetitionScheme {
    codebook: Codebook,
    n_repeats: usize,
    test: TestProjection,
    errors: TestErrors,
    rate: f64,
}

impl RepetitionScheme {
    pub fn codebook(&self) -> &Codebook {
        &self.codebook
    }

    pub fn n_repeats(&self) -> usize {
        self.n_repeats
    }

    pub fn positions(&self) -> usize {
        self.codebook.n()
    }

    /// Test applied at position `i`; all positions share one test.
    pub fn test_at(&self, i: usize) -> &TestProjection {
        assert!(i < self.positions(), "position {i} out of range");
        &self.test
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    /// Measured error of the first kind of the shared test.
    pub fn eta(&self) -> f64 {
        self.errors.alpha
    }

    /// Measured error of the second kind of the shared test.
    pub fn beta(&self) -> f64 {
        self.errors.beta
    }

    pub fn test_errors(&self) -> TestErrors {
        self.errors
    }

    /// `Tr ρ_x^{⊗N} F_y` at one position.
    pub fn position_probability(&self, sent: u8, decoded: u8) -> f64 {
        let TestErrors { alpha, beta } = self.errors;
        match (sent, decoded) {
            (0, 0) => 1.0 - alpha,
            (0, _) => alpha,
            (_, 0) => beta,
            _ => 1.0 - beta,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ErrorReport {
    pub per_word_error: BTreeMap<String, f64>,
    pub max_error: f64,
    /// `ℓ η + n e^{-N R}` with `ℓ` the largest number of zeros in a word.
    pub bound: f64,
    pub eta: f64,
    pub beta: f64,
    pub max_zeros: usize,
    pub n_repeats: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CapacityRow {
    pub n: usize,
    pub holevo: f64,
    pub cost: f64,
    pub cost_bound: f64,
    pub gap_target: f64,
}

/// Builds the position-wise decoder with test threshold `e^{N · rate}`.
pub fn build_repetition_scheme(
    rho0: &DensityMatrix,
    rho1: &DensityMatrix,
    codebook: Codebook,
    n_repeats: usize,
    rate: f64,
    cap: usize,
) -> Result<RepetitionScheme> {
    if !(rate > 0.0) || !rate.is_finite() {
        return Err(Error::Domain(format!("rate must be positive, got {rate}")));
    }
    let test = np_test_projection(rho0, rho1, n_repeats, (n_repeats as f64 * rate).exp(), cap)?;
    let errors = test_errors(&test, rho0, rho1)?;
    Ok(RepetitionScheme {
        codebook,
        n_repeats,
        test,
        errors,
        rate,
    })
}

/// Repetition count `⌊ln(2n/ε) / R⌋` that makes `n e^{-N R} ≤ ε/2` up to rounding.
pub fn repetitions_for(n: usize, epsilon: f64, rate: f64) -> Result<usize> {
    if !(epsilon > 0.0 && epsilon < 1.0) || !(rate > 0.0) || n == 0 {
        return Err(Error::Domain("need n ≥ 1, ε ∈ (0, 1) and R > 0".into()));
    }
    let n_rep = ((2.0 * n as f64 / epsilon).ln() / rate).floor();
    Ok((n_rep as usize).max(1))
}

/// Probability that the product decoder outputs anything other than `word`.
pub fn exact_block_error_probability(scheme: &RepetitionScheme, word: &Word) -> Result<f64> {
    if !scheme.codebook.contains(word) {
        return Err(Error::Domain(format!("word {word} is not in the codebook")));
    }
    // 1 - Π p_i computed as -expm1(Σ ln p_i) to keep small errors accurate.
    let log_correct: f64 = word
        .bits()
        .iter()
        .map(|&b| {
            let miss = 1.0 - scheme.position_probability(b, b);
            (-miss.clamp(0.0, 1.0)).ln_1p()
        })
        .sum();
    Ok((-log_correct.exp_m1()).clamp(0.0, 1.0))
}

pub fn error_report(scheme: &RepetitionScheme) -> Result<ErrorReport> {
    let mut per_word_error = BTreeMap::new();
    let mut max_error = 0.0f64;
    for w in scheme.codebook.words() {
        let e = exact_block_error_probability(scheme, w)?;
        max_error = max_error.max(e);
        per_word_error.insert(w.to_string(), e);
    }
    let ell = scheme.codebook.max_zeros();
    let n = scheme.positions() as f64;
    let bound = ell as f64 * scheme.eta() + n * (-(scheme.n_repeats as f64) * scheme.rate).exp();
    Ok(ErrorReport {
        per_word_error,
        max_error,
        bound,
        eta: scheme.eta(),
        beta: scheme.beta(),
        max_zeros: ell,
        n_repeats: scheme.n_repeats,
    })
}

/// Holevo quantity of the weight-one codebooks `A_n`, `n = 1..=n_max`, against the
/// cost bound `c(A_n) S(ρ_0‖ρ_1)`.
pub fn capacity_series(rho0: &DensityMatrix, rho1: &DensityMatrix, n_max: usize, cap: usize) -> Result<Vec<CapacityRow>> {
    crate::matcore::checked_power(rho0.dim(), n_max, cap)?;
    let target = umegaki_relative_entropy(rho0, rho1)?.value();
    (1..=n_max)
        .map(|n| {
            let a = Codebook::weight_one(n);
            let cost = codebook_cost(&a);
            Ok(CapacityRow {
                n,
                holevo: codebook_holevo(&a, rho0, rho1, cap)?,
                cost,
                cost_bound: cost * target,
                gap_target: target,
            })
        })
        .collect()
}
