//! Neyman–Pearson tests between `ρ_0^{⊗N}` and `ρ_1^{⊗N}`.
//!
//! The test for threshold `t` is the projection onto the strictly positive
//! eigenspace of `ρ_0^{⊗N} - t ρ_1^{⊗N}`. Since `Tr (ρ_0^{⊗N} - t ρ_1^{⊗N}) E ≥ 0`,
//! its error of the second kind obeys `β ≤ Tr ρ_0^{⊗N} E / t ≤ 1 / t`; with
//! `t = e^{N R}` this is the exponent guarantee `β ≤ e^{-N R}`.

use serde::Serialize;

use crate::entropy::{umegaki_relative_entropy, ExtendedReal};
use crate::error::{Error, Result};
use crate::matcore::{checked_power, DensityMatrix, HermitianOperator};

/// Eigenvalues of the difference operator this close to zero are left out of the test.
pub const POSITIVITY_TOL: f64 = 1e-12;
/// Below this, `β` is treated as underflowed and its exponent reported as `+∞`.
pub const BETA_UNDERFLOW: f64 = 1e-300;

/// Projection acting on `N` copies; `E` accepts the null hypothesis `ρ_0`.
#[derive(Clone, Debug)]
pub struct TestProjection {
    op: HermitianOperator,
    n_copies: usize,
}

impl TestProjection {
    /// Checks idempotence `E² = E` within `1e-10`.
    pub fn new(op: HermitianOperator, n_copies: usize) -> Result<Self> {
        let sq = HermitianOperator::hermitize(op.matmul(&op)?);
        let dev = sq.max_abs_diff(&op)?;
        if dev > 1e-10 {
            return Err(Error::Domain(format!("test is not idempotent (deviation {dev:e})")));
        }
        Ok(Self { op, n_copies })
    }

    pub fn op(&self) -> &HermitianOperator {
        &self.op
    }

    pub fn n_copies(&self) -> usize {
        self.n_copies
    }

    pub fn rank(&self) -> usize {
        self.op.trace().round() as usize
    }
}

/// `α = Tr ρ_0^{⊗N} (I - E)`, `β = Tr ρ_1^{⊗N} E`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TestErrors {
    pub alpha: f64,
    pub beta: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExponentRecord {
    #[serde(rename = "N")]
    pub n_copies: usize,
    pub alpha: f64,
    pub beta: f64,
    /// `-(1/N) ln β`; `+∞` when `β` underflowed.
    pub beta_exponent: ExtendedReal,
    pub beta_underflow: bool,
    /// `E = 0`: nothing is accepted, so the exponent bound is vacuous.
    pub empty_test: bool,
}

/// Positive-part test of `ρ_0^{⊗N} - threshold · ρ_1^{⊗N}`.
pub fn np_test_projection(
    rho0: &DensityMatrix,
    rho1: &DensityMatrix,
    n_copies: usize,
    threshold: f64,
    cap: usize,
) -> Result<TestProjection> {
    rho0.check_dim(rho1)?;
    if n_copies == 0 {
        return Err(Error::Domain("need at least one copy".into()));
    }
    if !(threshold > 0.0) || !threshold.is_finite() {
        return Err(Error::Domain(format!("threshold must be positive and finite, got {threshold}")));
    }
    checked_power(rho0.dim(), n_copies, cap)?;
    let diff = {
        let a = rho0.kron_power(n_copies);
        let b = rho1.kron_power(n_copies);
        a.linear_combination(1.0, &b, -threshold)?
    };
    let s = diff.spectrum()?;
    let weights: Vec<f64> = s
        .eigenvalues()
        .iter()
        .map(|&l| if l > POSITIVITY_TOL { 1.0 } else { 0.0 })
        .collect();
    let op = s.compose(&weights);
    Ok(TestProjection { op, n_copies })
}

/// Exact error probabilities of a test.
pub fn test_errors(e: &TestProjection, rho0: &DensityMatrix, rho1: &DensityMatrix) -> Result<TestErrors> {
    rho0.check_dim(rho1)?;
    let dim = checked_power(rho0.dim(), e.n_copies, usize::MAX)?;
    if dim != e.op.dim() {
        return Err(Error::DimensionMismatch {
            left: e.op.dim(),
            right: dim,
        });
    }
    let a = rho0.kron_power(e.n_copies);
    let accepted0 = a.trace_product(&e.op)?;
    let alpha = a.trace() - accepted0;
    drop(a);
    let b = rho1.kron_power(e.n_copies);
    let beta = b.trace_product(&e.op)?;
    Ok(TestErrors { alpha, beta })
}

/// Tests with threshold `e^{N · rate}` for `N = 1..=n_max`.
pub fn exponent_series(
    rho0: &DensityMatrix,
    rho1: &DensityMatrix,
    rate: f64,
    n_max: usize,
    cap: usize,
) -> Result<Vec<ExponentRecord>> {
    let d = umegaki_relative_entropy(rho0, rho1)?;
    let in_range = rate > 0.0 && d.finite().map_or(rate.is_finite(), |d| rate < d);
    if !in_range {
        return Err(Error::Domain(format!("rate {rate} must lie in (0, S(ρ0‖ρ1) = {d})")));
    }
    checked_power(rho0.dim(), n_max, cap)?;
    (1..=n_max)
        .map(|n| {
            let e = np_test_projection(rho0, rho1, n, (n as f64 * rate).exp(), cap)?;
            let errs = test_errors(&e, rho0, rho1)?;
            let underflow = errs.beta < BETA_UNDERFLOW;
            let beta_exponent = if underflow {
                ExtendedReal::Infinite
            } else {
                ExtendedReal::Finite(-errs.beta.ln() / n as f64)
            };
            Ok(ExponentRecord {
                n_copies: n,
                alpha: errs.alpha,
                beta: errs.beta,
                beta_exponent,
                beta_underflow: underflow,
                empty_test: e.op.trace() < 0.5,
            })
        })
        .collect()
}

/// Classical Neyman–Pearson test on product distributions: accept every sequence
/// `ω` with `Π p(ω_i) - t Π q(ω_i) > 1e-12`, returning `(α, β)`.
pub fn classical_np_errors(p: &[f64], q: &[f64], n_copies: usize, threshold: f64) -> (f64, f64) {
    let d = p.len();
    let mut tuple = vec![0usize; n_copies];
    let (mut alpha, mut beta) = (0.0, 0.0);
    for _ in 0..d.pow(n_copies as u32) {
        let pp: f64 = tuple.iter().map(|&i| p[i]).product();
        let qq: f64 = tuple.iter().map(|&i| q[i]).product();
        if pp - threshold * qq > POSITIVITY_TOL {
            beta += qq;
        } else {
            alpha += pp;
        }
        for k in (0..n_copies).rev() {
            tuple[k] += 1;
            if tuple[k] < d {
                break;
            }
            tuple[k] = 0;
        }
    }
    (alpha, beta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mixture::DEFAULT_SIZE_CAP;
    use crate::random::StateSampler;

    const CAP: usize = DEFAULT_SIZE_CAP;

    #[test]
    fn tiny_threshold_accepts_everything() {
        let mut s = StateSampler::new(1);
        let (r0, r1) = (s.density(2), s.density(2));
        let e = np_test_projection(&r0, &r1, 3, 1e-9, CAP).unwrap();
        assert!(e.op().max_abs_diff(&HermitianOperator::identity(8)).unwrap() < 1e-9);
        let errs = test_errors(&e, &r0, &r1).unwrap();
        assert!(errs.alpha.abs() < 1e-9 && (errs.beta - 1.0).abs() < 1e-9);
    }

    #[test]
    fn identical_states_threshold_one_is_empty() {
        let mut s = StateSampler::new(2);
        let r = s.density(2);
        let e = np_test_projection(&r, &r, 2, 1.0, CAP).unwrap();
        assert_eq!(e.op().max_abs(), 0.0);
        let errs = test_errors(&e, &r, &r).unwrap();
        assert!((errs.alpha - 1.0).abs() < 1e-12 && errs.beta == 0.0);
    }

    #[test]
    fn identity_and_zero_tests() {
        let mut s = StateSampler::new(3);
        let (r0, r1) = (s.density(2), s.density(2));
        let one = TestProjection::new(HermitianOperator::identity(4), 2).unwrap();
        let errs = test_errors(&one, &r0, &r1).unwrap();
        assert!(errs.alpha.abs() < 1e-12 && (errs.beta - 1.0).abs() < 1e-12);
        let zero = TestProjection::new(HermitianOperator::zeros(4), 2).unwrap();
        let errs = test_errors(&zero, &r0, &r1).unwrap();
        assert!((errs.alpha - 1.0).abs() < 1e-12 && errs.beta == 0.0);
        assert!(TestProjection::new(HermitianOperator::identity(4).scale(0.5), 2).is_err());
        assert!(test_errors(&one, &s.density(3), &s.density(3)).is_err());
    }

    #[test]
    fn commuting_pair_matches_classical_test() {
        let p = [0.8, 0.2];
        let q = [0.35, 0.65];
        let r0 = DensityMatrix::from_spectrum(&p).unwrap();
        let r1 = DensityMatrix::from_spectrum(&q).unwrap();
        let n = 6;
        let t = (n as f64 * 0.3).exp();
        let e = np_test_projection(&r0, &r1, n, t, CAP).unwrap();
        assert!(e.op().is_diagonal());
        let errs = test_errors(&e, &r0, &r1).unwrap();
        let (a, b) = classical_np_errors(&p, &q, n, t);
        assert!((errs.alpha - a).abs() < 1e-10 && (errs.beta - b).abs() < 1e-10);
    }

    #[test]
    fn projection_is_idempotent_for_noncommuting_pair() {
        let mut s = StateSampler::new(4);
        let (r0, r1) = (s.density(2), s.density(2));
        let e = np_test_projection(&r0, &r1, 4, 1.3, CAP).unwrap();
        assert!(TestProjection::new(e.op().clone(), 4).is_ok());
    }

    #[test]
    fn exponent_series_trends() {
        let r0 = DensityMatrix::from_spectrum(&[0.9, 0.1]).unwrap();
        let r1 = DensityMatrix::from_spectrum(&[0.3, 0.7]).unwrap();
        let d = umegaki_relative_entropy(&r0, &r1).unwrap().value();
        let rate = 0.95 * d;
        let series = exponent_series(&r0, &r1, rate, 12, CAP).unwrap();
        assert!(series[11].alpha < series[3].alpha);
        for rec in &series {
            assert!(rec.beta <= (-(rec.n_copies as f64) * rate).exp() + 1e-12);
            if !rec.empty_test {
                assert!(rec.beta_exponent.value() >= rate - 1e-9);
            }
        }
    }

    #[test]
    fn exponent_series_rejects_bad_rate() {
        let r0 = DensityMatrix::from_spectrum(&[0.9, 0.1]).unwrap();
        let r1 = DensityMatrix::from_spectrum(&[0.3, 0.7]).unwrap();
        assert!(matches!(exponent_series(&r0, &r1, 0.0, 3, CAP), Err(Error::Domain(_))));
        assert!(matches!(exponent_series(&r0, &r1, 10.0, 3, CAP), Err(Error::Domain(_))));
        // Equal states: S = 0, so no rate is admissible.
        assert!(exponent_series(&r0, &r0, 0.1, 3, CAP).is_err());
    }

    #[test]
    fn equal_states_reject_everything_above_one() {
        let r = DensityMatrix::from_spectrum(&[0.6, 0.4]).unwrap();
        for n in 1..=4 {
            let e = np_test_projection(&r, &r, n, 1.5, CAP).unwrap();
            let errs = test_errors(&e, &r, &r).unwrap();
            assert!((errs.alpha - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn size_cap_enforced() {
        let r = DensityMatrix::maximally_mixed(2);
        assert!(matches!(
            np_test_projection(&r, &r, 13, 1.0, CAP),
            Err(Error::SizeCap { required: 8192, .. })
        ));
    }
}
