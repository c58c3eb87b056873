//! Exact engine for commuting (simultaneously diagonal) pairs.
//!
//! With `ρ = diag(μ)` and `σ = diag(λ)` the mixture `R_n` is diagonal. Its
//! eigenvalue at the tuple `(i_1, ..., i_n)` is
//!
//! ```text
//! (λ_{i_1} μ_{i_2} ... μ_{i_n} + μ_{i_1} λ_{i_2} μ_{i_3} ... μ_{i_n} + ... + μ_{i_1} ... μ_{i_{n-1}} λ_{i_n}) / n
//! ```
//!
//! and depends only on how often each index occurs. Summing over index counts
//! (type classes) instead of tuples makes `n` in the hundreds cheap.
//!
//! In the regular case (`λ` vanishes off the support of `μ`)
//! `gap_n = S(σ‖ρ) + Q_n` with `Q_n = E[η((X_1 + ... + X_n) / n)]`, the `X_k`
//! i.i.d. under `μ` taking the value `λ_i / μ_i` at `i`. In the singular case
//! the groups A (all indices in the support) and B (exactly one copy of the
//! off-support index `d`) have closed-form η-sums that bound the gap from
//! below.

use serde::Serialize;

use crate::entropy::{eta_nonneg, kl_divergence, shannon_entropy, ExtendedReal};
use crate::error::{Error, Result};
use crate::matcore::DensityMatrix;

const SUM_TOL: f64 = 1e-12;

/// Work limits for the enumerations.
#[derive(Clone, Copy, Debug)]
pub struct EnumerationLimits {
    /// Largest `d^n` for tuple enumeration.
    pub max_tuples: u128,
    /// Largest support size for the `Q_n` type-class sum.
    pub max_support: usize,
    /// Largest `n` for the `Q_n` type-class sum.
    pub max_n: usize,
    /// Largest number of type classes for the exact classical gap.
    pub max_types: u128,
}

impl Default for EnumerationLimits {
    fn default() -> Self {
        Self {
            max_tuples: 10_000_000,
            max_support: 4,
            max_n: 200,
            max_types: 10_000_000,
        }
    }
}

/// Spectra of a commuting pair `ρ = diag(μ)`, `σ = diag(λ)`.
///
/// Internally the indices are reordered so that the support of `μ` comes
/// first and, in the singular case, the off-support index carrying the most
/// `σ` mass comes last.
#[derive(Clone, Debug, PartialEq)]
pub struct ClassicalPair {
    mu: Vec<f64>,
    lambda: Vec<f64>,
    ell: usize,
    original_mu: Vec<f64>,
    original_lambda: Vec<f64>,
}

fn check_probability(name: &str, p: &[f64]) -> Result<()> {
    if p.is_empty() {
        return Err(Error::Domain(format!("{name} is empty")));
    }
    if let Some(&bad) = p.iter().find(|&&x| !(x >= 0.0) || !x.is_finite()) {
        return Err(Error::Domain(format!("{name} has invalid entry {bad}")));
    }
    let total: f64 = p.iter().sum();
    if (total - 1.0).abs() > SUM_TOL {
        return Err(Error::Domain(format!("{name} sums to {total}, not 1")));
    }
    Ok(())
}

impl ClassicalPair {
    /// `mu` is the spectrum of `ρ`, `lambda` that of `σ`, in a common eigenbasis.
    pub fn new(mu: &[f64], lambda: &[f64]) -> Result<Self> {
        check_probability("mu", mu)?;
        check_probability("lambda", lambda)?;
        if mu.len() != lambda.len() {
            return Err(Error::DimensionMismatch {
                left: mu.len(),
                right: lambda.len(),
            });
        }
        let d = mu.len();
        let support: Vec<usize> = (0..d).filter(|&i| mu[i] > 0.0).collect();
        let mut off: Vec<usize> = (0..d).filter(|&i| mu[i] == 0.0).collect();
        // Stable: heaviest off-support σ mass last, ties keep index order.
        off.sort_by(|&a, &b| lambda[a].total_cmp(&lambda[b]));
        let order: Vec<usize> = support.iter().chain(off.iter()).copied().collect();
        Ok(Self {
            mu: order.iter().map(|&i| mu[i]).collect(),
            lambda: order.iter().map(|&i| lambda[i]).collect(),
            ell: support.len(),
            original_mu: mu.to_vec(),
            original_lambda: lambda.to_vec(),
        })
    }

    pub fn dim(&self) -> usize {
        self.mu.len()
    }

    /// Support size of `μ`.
    pub fn ell(&self) -> usize {
        self.ell
    }

    /// Reordered spectrum of `ρ` (support first).
    pub fn mu(&self) -> &[f64] {
        &self.mu
    }

    /// Reordered spectrum of `σ`, aligned with [`ClassicalPair::mu`].
    pub fn lambda(&self) -> &[f64] {
        &self.lambda
    }

    /// `λ` vanishes outside the support of `μ`.
    pub fn is_regular(&self) -> bool {
        self.lambda[self.ell..].iter().all(|&x| x == 0.0)
    }

    /// `σ` mass at the last (off-support) index; zero for regular pairs.
    pub fn lambda_d(&self) -> f64 {
        if self.ell == self.dim() {
            0.0
        } else {
            self.lambda[self.dim() - 1]
        }
    }

    pub fn rho_entropy(&self) -> f64 {
        shannon_entropy(&self.mu)
    }

    pub fn sigma_entropy(&self) -> f64 {
        shannon_entropy(&self.lambda)
    }

    /// `S(σ‖ρ) = Σ λ_i (ln λ_i - ln μ_i)`.
    pub fn relative_entropy(&self) -> ExtendedReal {
        kl_divergence(&self.lambda, &self.mu).expect("aligned spectra")
    }

    /// Diagonal `ρ` in the caller's original index order.
    pub fn rho_state(&self) -> DensityMatrix {
        DensityMatrix::from_spectrum(&self.original_mu).expect("validated spectrum")
    }

    /// Diagonal `σ` in the caller's original index order.
    pub fn sigma_state(&self) -> DensityMatrix {
        DensityMatrix::from_spectrum(&self.original_lambda).expect("validated spectrum")
    }
}

/// η-sums over the eigenvalue groups A and B of a singular pair.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EigenvalueGroupSums {
    pub sum_a: f64,
    pub sum_b: f64,
    pub qn: f64,
    pub n: usize,
}

/// Neumaier-compensated accumulator.
#[derive(Default, Clone, Copy)]
struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(self) -> f64 {
        self.sum + self.carry
    }
}

fn ln_factorials(n: usize) -> Vec<f64> {
    let mut table = vec![0.0; n + 1];
    for k in 1..=n {
        table[k] = table[k - 1] + (k as f64).ln();
    }
    table
}

fn binomial(n: u128, k: u128) -> u128 {
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul(n - i) / (i + 1);
    }
    acc
}

/// Calls `visit` with every vector of `parts` nonnegative counts summing to `n`.
fn for_each_composition(n: usize, parts: usize, mut visit: impl FnMut(&[usize])) {
    fn rec(remaining: usize, slot: usize, counts: &mut Vec<usize>, visit: &mut dyn FnMut(&[usize])) {
        if slot + 1 == counts.len() {
            counts[slot] = remaining;
            visit(counts);
            return;
        }
        for k in (0..=remaining).rev() {
            counts[slot] = k;
            rec(remaining - k, slot + 1, counts, visit);
        }
    }
    let mut counts = vec![0; parts];
    rec(n, 0, &mut counts, &mut visit);
}

/// Eigenvalues of `R_n` by the tuple formula, in tuple (row-major Kronecker) order.
pub fn eigenvalues_by_formula(pair: &ClassicalPair, n: usize, limits: &EnumerationLimits) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::Domain("n must be positive".into()));
    }
    let d = pair.dim();
    let total = (d as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if total > limits.max_tuples {
        return Err(Error::Infeasible(format!(
            "{d}^{n} = {total} tuples exceeds the cap {}",
            limits.max_tuples
        )));
    }
    let mu = &pair.original_mu;
    let lambda = &pair.original_lambda;
    let mut out = Vec::with_capacity(total as usize);
    let mut tuple = vec![0usize; n];
    let mut prefix = vec![1.0; n + 1];
    let mut suffix = vec![1.0; n + 1];
    for _ in 0..total {
        for k in 0..n {
            prefix[k + 1] = prefix[k] * mu[tuple[k]];
        }
        for k in (0..n).rev() {
            suffix[k] = suffix[k + 1] * mu[tuple[k]];
        }
        let mut acc = 0.0;
        for k in 0..n {
            acc += lambda[tuple[k]] * prefix[k] * suffix[k + 1];
        }
        out.push(acc / n as f64);
        // Odometer, last position fastest.
        for k in (0..n).rev() {
            tuple[k] += 1;
            if tuple[k] < d {
                break;
            }
            tuple[k] = 0;
        }
    }
    Ok(out)
}

/// `Q_n = E[η((X_1 + ... + X_n) / n)]`, exact over type classes of the support.
pub fn compute_qn(pair: &ClassicalPair, n: usize, limits: &EnumerationLimits) -> Result<f64> {
    let ell = pair.ell();
    if n == 0 {
        return Err(Error::Domain("n must be positive".into()));
    }
    if ell > limits.max_support || n > limits.max_n {
        return Err(Error::Infeasible(format!(
            "type-class sum with support {ell} and n = {n} exceeds limits (support <= {}, n <= {})",
            limits.max_support, limits.max_n
        )));
    }
    let lnf = ln_factorials(n);
    let mu = &pair.mu[..ell];
    let ratio: Vec<f64> = (0..ell).map(|i| pair.lambda[i] / mu[i]).collect();
    let ln_mu: Vec<f64> = mu.iter().map(|m| m.ln()).collect();
    let mut acc = CompensatedSum::default();
    for_each_composition(n, ell, |k| {
        let mut ln_w = lnf[n];
        let mut mean = 0.0;
        for i in 0..ell {
            ln_w += k[i] as f64 * ln_mu[i] - lnf[k[i]];
            mean += k[i] as f64 * ratio[i];
        }
        acc.add(ln_w.exp() * eta_nonneg(mean / n as f64));
    });
    Ok(acc.value())
}

/// Regular-case gap `S(σ‖ρ) + Q_n`.
pub fn gap_regular(pair: &ClassicalPair, n: usize, limits: &EnumerationLimits) -> Result<f64> {
    if !pair.is_regular() {
        return Err(Error::Support("gap_regular needs supp σ ≤ supp ρ".into()));
    }
    let target = pair
        .relative_entropy()
        .finite()
        .expect("regular pair has finite relative entropy");
    Ok(target + compute_qn(pair, n, limits)?)
}

/// Closed-form η-sums of eigenvalue groups A and B for a singular pair.
///
/// Group A (all indices in the support of `μ`) sums to
/// `(n-1) Λ S(ρ) - Σ_{i≤ℓ} λ_i ln μ_i + Q_n` with `Λ = Σ_{i≤ℓ} λ_i`; group B
/// (exactly one occurrence of the off-support index `d`) sums to
/// `λ_d (n-1) S(ρ) - λ_d ln(λ_d / n)`.
pub fn group_sums_singular(pair: &ClassicalPair, n: usize, limits: &EnumerationLimits) -> Result<EigenvalueGroupSums> {
    if pair.is_regular() {
        return Err(Error::Domain("group sums need a singular pair".into()));
    }
    let ell = pair.ell();
    let s_rho = pair.rho_entropy();
    let on_support_mass: f64 = pair.lambda[..ell].iter().sum();
    let cross: f64 = (0..ell)
        .filter(|&i| pair.lambda[i] > 0.0)
        .map(|i| pair.lambda[i] * pair.mu[i].ln())
        .sum();
    let qn = compute_qn(pair, n, limits)?;
    let nm1 = (n - 1) as f64;
    let lambda_d = pair.lambda_d();
    Ok(EigenvalueGroupSums {
        sum_a: nm1 * on_support_mass * s_rho - cross + qn,
        sum_b: lambda_d * nm1 * s_rho - lambda_d * (lambda_d / n as f64).ln(),
        qn,
        n,
    })
}

/// `sum_A + sum_B - (n-1) S(ρ) - S(σ)`, a lower bound on the singular gap.
pub fn singular_lower_bound(pair: &ClassicalPair, n: usize, limits: &EnumerationLimits) -> Result<f64> {
    let g = group_sums_singular(pair, n, limits)?;
    Ok(g.sum_a + g.sum_b - (n - 1) as f64 * pair.rho_entropy() - pair.sigma_entropy())
}

/// `S(R_n)` summed over type classes of all `d` indices; valid for regular and singular pairs.
pub fn mixture_entropy_by_types(pair: &ClassicalPair, n: usize, limits: &EnumerationLimits) -> Result<f64> {
    if n == 0 {
        return Err(Error::Domain("n must be positive".into()));
    }
    let d = pair.dim();
    let types = binomial((n + d - 1) as u128, (d - 1) as u128);
    if types > limits.max_types {
        return Err(Error::Infeasible(format!(
            "{types} type classes exceed the cap {}",
            limits.max_types
        )));
    }
    let lnf = ln_factorials(n);
    let ell = pair.ell();
    let nf = n as f64;
    let mut acc = CompensatedSum::default();
    for_each_composition(n, d, |k| {
        let off: usize = k[ell..].iter().sum();
        let mut ln_mult = lnf[n];
        let mut ln_prod = 0.0;
        for i in 0..d {
            ln_mult -= lnf[k[i]];
        }
        for i in 0..ell {
            ln_prod += k[i] as f64 * pair.mu[i].ln();
        }
        let ln_kappa = match off {
            0 => {
                let s: f64 = (0..ell).map(|i| k[i] as f64 * pair.lambda[i] / pair.mu[i]).sum();
                if s <= 0.0 {
                    return;
                }
                s.ln() + ln_prod - nf.ln()
            }
            1 => {
                let z = (ell..d).find(|&i| k[i] == 1).expect("one off-support index");
                if pair.lambda[z] <= 0.0 {
                    return;
                }
                pair.lambda[z].ln() + ln_prod - nf.ln()
            }
            _ => return,
        };
        // multiplicity * η(κ) = -exp(ln mult + ln κ) ln κ
        acc.add(-(ln_mult + ln_kappa).exp() * ln_kappa);
    });
    Ok(acc.value())
}

/// Exact gap `S(R_n) - (n-1) S(ρ) - S(σ)` from the type-class entropy.
pub fn classical_gap(pair: &ClassicalPair, n: usize, limits: &EnumerationLimits) -> Result<f64> {
    Ok(mixture_entropy_by_types(pair, n, limits)? - (n - 1) as f64 * pair.rho_entropy() - pair.sigma_entropy())
}

/// `max |η(t)|` over `t ∈ [0, upper]`.
pub fn eta_bound(upper: f64) -> f64 {
    let inv_e = (-1.0f64).exp();
    let below_one = if upper >= inv_e { inv_e } else { eta_nonneg(upper) };
    let above_one = if upper > 1.0 { upper * upper.ln() } else { 0.0 };
    below_one.max(above_one)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entropy::von_neumann_entropy;
    use crate::matcore::eigh;
    use crate::mixture::{build_mixture, entropy_gap, DEFAULT_SIZE_CAP};

    fn limits() -> EnumerationLimits {
        EnumerationLimits::default()
    }

    fn reference_pair() -> ClassicalPair {
        ClassicalPair::new(&[0.6, 0.4], &[0.3, 0.7]).unwrap()
    }

    #[test]
    fn pair_validation_and_reordering() {
        assert!(ClassicalPair::new(&[0.5, 0.4], &[0.5, 0.5]).is_err());
        assert!(ClassicalPair::new(&[0.5, 0.5], &[1.0]).is_err());
        let p = ClassicalPair::new(&[0.0, 0.5, 0.0, 0.5], &[0.3, 0.2, 0.0, 0.5]).unwrap();
        assert_eq!(p.ell(), 2);
        assert_eq!(p.mu(), &[0.5, 0.5, 0.0, 0.0]);
        assert_eq!(p.lambda(), &[0.2, 0.5, 0.0, 0.3]);
        assert!(!p.is_regular());
        assert_eq!(p.lambda_d(), 0.3);
        assert!(reference_pair().is_regular());
    }

    #[test]
    fn formula_eigenvalue_by_hand() {
        let ev = eigenvalues_by_formula(&reference_pair(), 2, &limits()).unwrap();
        // tuple (1,1): (0.3*0.6 + 0.6*0.3) / 2
        assert!((ev[0] - 0.18).abs() < 1e-15);
        assert!((ev.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn formula_for_equal_spectra_is_product() {
        let mu = [0.2, 0.5, 0.3];
        let pair = ClassicalPair::new(&mu, &mu).unwrap();
        let ev = eigenvalues_by_formula(&pair, 3, &limits()).unwrap();
        let mut idx = 0;
        for a in 0..3 {
            for b in 0..3 {
                for c in 0..3 {
                    assert!((ev[idx] - mu[a] * mu[b] * mu[c]).abs() < 1e-15);
                    idx += 1;
                }
            }
        }
    }

    #[test]
    fn formula_matches_dense_spectrum() {
        let pair = reference_pair();
        let r = build_mixture(&pair.sigma_state(), &pair.rho_state(), 1, 6, DEFAULT_SIZE_CAP).unwrap();
        let mut dense = eigh(&r).unwrap().eigenvalues().to_vec();
        let mut formula = eigenvalues_by_formula(&pair, 6, &limits()).unwrap();
        dense.sort_by(f64::total_cmp);
        formula.sort_by(f64::total_cmp);
        for (a, b) in dense.iter().zip(&formula) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn formula_cap_rejected() {
        let l = EnumerationLimits {
            max_tuples: 100,
            ..limits()
        };
        assert!(matches!(
            eigenvalues_by_formula(&reference_pair(), 7, &l),
            Err(Error::Infeasible(_))
        ));
    }

    #[test]
    fn qn_examples() {
        let same = ClassicalPair::new(&[0.6, 0.4], &[0.6, 0.4]).unwrap();
        assert!(compute_qn(&same, 10, &limits()).unwrap().abs() < 1e-14);

        let pure = ClassicalPair::new(&[1.0, 0.0, 0.0], &[0.25, 0.5, 0.25]).unwrap();
        for n in [1, 5, 40] {
            let q = compute_qn(&pure, n, &limits()).unwrap();
            assert!((q - eta_nonneg(0.25)).abs() < 1e-14);
        }

        let pair = reference_pair();
        let q5 = compute_qn(&pair, 5, &limits()).unwrap();
        let q50 = compute_qn(&pair, 50, &limits()).unwrap();
        assert!(q50.abs() < q5.abs());
    }

    /// Brute force over all tuples of the support, independent of type classes.
    fn qn_by_tuples(pair: &ClassicalPair, n: usize) -> f64 {
        let ell = pair.ell();
        let mut tuple = vec![0usize; n];
        let mut acc = 0.0;
        for _ in 0..ell.pow(n as u32) {
            let w: f64 = tuple.iter().map(|&i| pair.mu()[i]).product();
            let mean: f64 = tuple.iter().map(|&i| pair.lambda()[i] / pair.mu()[i]).sum::<f64>() / n as f64;
            acc += w * eta_nonneg(mean);
            for k in (0..n).rev() {
                tuple[k] += 1;
                if tuple[k] < ell {
                    break;
                }
                tuple[k] = 0;
            }
        }
        acc
    }

    #[test]
    fn qn_matches_tuple_enumeration() {
        let pair = ClassicalPair::new(&[0.5, 0.3, 0.2], &[0.1, 0.6, 0.3]).unwrap();
        for n in 1..=7 {
            let a = compute_qn(&pair, n, &limits()).unwrap();
            assert!((a - qn_by_tuples(&pair, n)).abs() < 1e-13, "n={n}");
        }
    }

    #[test]
    fn qn_limits_rejected() {
        let pair = ClassicalPair::new(&[0.2; 5], &[0.2; 5]).unwrap();
        assert!(matches!(compute_qn(&pair, 3, &limits()), Err(Error::Infeasible(_))));
        assert!(matches!(compute_qn(&reference_pair(), 201, &limits()), Err(Error::Infeasible(_))));
    }

    #[test]
    fn gap_regular_examples() {
        let same = ClassicalPair::new(&[0.6, 0.4], &[0.6, 0.4]).unwrap();
        assert!(gap_regular(&same, 7, &limits()).unwrap().abs() < 1e-14);

        let pair = reference_pair();
        let dense = entropy_gap(&pair.sigma_state(), &pair.rho_state(), 1, 6, DEFAULT_SIZE_CAP).unwrap();
        let formula = gap_regular(&pair, 6, &limits()).unwrap();
        assert!((dense.gap - formula).abs() < 1e-9);

        let target = pair.relative_entropy().value();
        let g100 = gap_regular(&pair, 100, &limits()).unwrap();
        assert!((g100 - target - compute_qn(&pair, 100, &limits()).unwrap()).abs() < 1e-12);
        assert!((g100 - target).abs() < 0.01);
    }

    #[test]
    fn gap_regular_rejects_singular() {
        let pair = ClassicalPair::new(&[1.0, 0.0], &[0.8, 0.2]).unwrap();
        assert!(matches!(gap_regular(&pair, 3, &limits()), Err(Error::Support(_))));
        assert!(matches!(
            group_sums_singular(&reference_pair(), 3, &limits()),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn group_b_by_hand() {
        let pair = ClassicalPair::new(&[1.0, 0.0], &[0.8, 0.2]).unwrap();
        let g = group_sums_singular(&pair, 4, &limits()).unwrap();
        let expect = -0.2 * (0.05f64).ln();
        assert!((g.sum_b - expect).abs() < 1e-14);
        assert!((g.sum_b - 0.59915).abs() < 1e-5);
    }

    #[test]
    fn group_sums_match_dense_groups() {
        let pair = ClassicalPair::new(&[0.7, 0.3, 0.0], &[0.2, 0.5, 0.3]).unwrap();
        let n = 6;
        let ev = eigenvalues_by_formula(&pair, n, &limits()).unwrap();
        // Split the tuple-ordered eigenvalues by group directly.
        let (mut a, mut b) = (0.0, 0.0);
        for (idx, &kappa) in ev.iter().enumerate() {
            let mut x = idx;
            let mut off = 0;
            for _ in 0..n {
                if x % 3 == 2 {
                    off += 1;
                }
                x /= 3;
            }
            match off {
                0 => a += eta_nonneg(kappa),
                1 => b += eta_nonneg(kappa),
                _ => {}
            }
        }
        let g = group_sums_singular(&pair, n, &limits()).unwrap();
        assert!((g.sum_a - a).abs() < 1e-12, "{} vs {a}", g.sum_a);
        assert!((g.sum_b - b).abs() < 1e-12, "{} vs {b}", g.sum_b);

        let r = build_mixture(&pair.sigma_state(), &pair.rho_state(), 1, n, DEFAULT_SIZE_CAP).unwrap();
        assert!(g.sum_a + g.sum_b <= von_neumann_entropy(&r).unwrap() + 1e-9);
    }

    #[test]
    fn singular_lower_bound_increases() {
        let pair = ClassicalPair::new(&[0.7, 0.3, 0.0], &[0.2, 0.5, 0.3]).unwrap();
        let b: Vec<f64> = [4, 8, 16]
            .iter()
            .map(|&n| singular_lower_bound(&pair, n, &limits()).unwrap())
            .collect();
        assert!(b[0] < b[1] && b[1] < b[2]);
        for (&n, &lb) in [4usize, 8, 16].iter().zip(&b) {
            assert!(lb <= classical_gap(&pair, n, &limits()).unwrap() + 1e-9);
        }
    }

    #[test]
    fn type_entropy_matches_dense_and_formula() {
        for (mu, lambda) in [
            (vec![0.6, 0.4], vec![0.3, 0.7]),
            (vec![0.7, 0.3, 0.0], vec![0.2, 0.5, 0.3]),
            (vec![0.5, 0.0, 0.5], vec![0.1, 0.4, 0.5]),
            (vec![1.0, 0.0], vec![0.8, 0.2]),
        ] {
            let pair = ClassicalPair::new(&mu, &lambda).unwrap();
            for n in 1..=5 {
                let ev = eigenvalues_by_formula(&pair, n, &limits()).unwrap();
                let by_tuples: f64 = ev.iter().map(|&k| eta_nonneg(k)).sum();
                let by_types = mixture_entropy_by_types(&pair, n, &limits()).unwrap();
                assert!((by_tuples - by_types).abs() < 1e-12, "{mu:?} n={n}");
            }
        }
        let pair = reference_pair();
        for n in [3, 20, 90] {
            let a = classical_gap(&pair, n, &limits()).unwrap();
            let b = gap_regular(&pair, n, &limits()).unwrap();
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn qn_is_bounded() {
        let pair = ClassicalPair::new(&[0.5, 0.3, 0.2], &[0.1, 0.6, 0.3]).unwrap();
        let max_x = (0..3).map(|i| pair.lambda()[i] / pair.mu()[i]).fold(0.0, f64::max);
        for n in [1, 2, 10, 60] {
            let q = compute_qn(&pair, n, &limits()).unwrap();
            assert!(q.abs() <= eta_bound(max_x) + 1e-12);
        }
    }
}
