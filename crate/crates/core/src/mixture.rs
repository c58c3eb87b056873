//! Symmetrized mixtures `R_{m,n}` and the entropy gap
//! `S(R_{m,n}) - (n-1) S(ρ) - m S(σ)`.
//!
//! `R_{m,n}` is the uniform average over the `n` placements of a contiguous
//! block `σ^{⊗m}` among `n - 1` copies of `ρ`:
//!
//! ```text
//! R_{m,n} = (σ^{⊗m} ⊗ ρ^{⊗(n-1)} + ρ ⊗ σ^{⊗m} ⊗ ρ^{⊗(n-2)} + ... + ρ^{⊗(n-1)} ⊗ σ^{⊗m}) / n
//! ```
//!
//! With `m = 1` this is `R_n`. For the gap, the relative entropy
//! `S(R_n‖ρ^{⊗n})` is not recomputed densely: it follows from the identity
//! `S(R_n‖ρ^{⊗n}) = S(σ‖ρ) - gap`, which [`identity_residual`] checks directly.

use serde::Serialize;

use crate::entropy::{umegaki_relative_entropy, von_neumann_entropy, ExtendedReal};
use crate::error::{Error, Result};
use crate::matcore::{checked_power, kron, DensityMatrix, HermitianOperator};

/// Default cap on the dimension of any dense tensor-power state.
pub const DEFAULT_SIZE_CAP: usize = 4096;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GapRecord {
    pub n: usize,
    pub m: usize,
    /// `S(R_{m,n}) - (n-1) S(ρ) - m S(σ)`.
    pub gap: f64,
    /// `m S(σ‖ρ) - gap`; equals `S(R_n‖ρ^{⊗n})` when `m = 1`.
    pub residual: ExtendedReal,
    /// `S(σ‖ρ)`.
    pub target: ExtendedReal,
}

fn check_pair(sigma: &DensityMatrix, rho: &DensityMatrix, m: usize, n: usize, cap: usize) -> Result<usize> {
    sigma.check_dim(rho)?;
    if m == 0 || n == 0 {
        return Err(Error::Domain(format!("m and n must be positive (m={m}, n={n})")));
    }
    checked_power(sigma.dim(), m + n - 1, cap)
}

/// Builds `R_{m,n}`; `m = 1` gives `R_n` and `n = 1` gives `σ^{⊗m}`.
pub fn build_mixture(
    sigma: &DensityMatrix,
    rho: &DensityMatrix,
    m: usize,
    n: usize,
    cap: usize,
) -> Result<DensityMatrix> {
    let dim = check_pair(sigma, rho, m, n, cap)?;
    let block = sigma.kron_power(m);
    // rho_powers[k] = ρ^{⊗k}
    let mut rho_powers: Vec<HermitianOperator> = vec![HermitianOperator::identity(1)];
    for k in 1..n {
        let next = kron(&rho_powers[k - 1], rho);
        rho_powers.push(next);
    }
    let mut acc = faer::Mat::<num_complex::Complex64>::zeros(dim, dim);
    let weight = 1.0 / n as f64;
    for left in 0..n {
        let right = n - 1 - left;
        let term = kron(&kron(&rho_powers[left], &block), &rho_powers[right]);
        let t = term.as_mat();
        for j in 0..dim {
            for i in 0..dim {
                acc[(i, j)] += t[(i, j)] * weight;
            }
        }
    }
    Ok(DensityMatrix::new_unchecked(HermitianOperator::wrap(acc)))
}

/// Entropy gap of `R_{m,n}` together with the target `S(σ‖ρ)`.
pub fn entropy_gap(
    sigma: &DensityMatrix,
    rho: &DensityMatrix,
    m: usize,
    n: usize,
    cap: usize,
) -> Result<GapRecord> {
    let mixture = build_mixture(sigma, rho, m, n, cap)?;
    let s_mix = von_neumann_entropy(&mixture)?;
    let gap = s_mix - (n - 1) as f64 * von_neumann_entropy(rho)? - m as f64 * von_neumann_entropy(sigma)?;
    let target = umegaki_relative_entropy(sigma, rho)?;
    let residual = match target {
        ExtendedReal::Finite(t) => ExtendedReal::Finite(m as f64 * t - gap),
        ExtendedReal::Infinite => ExtendedReal::Infinite,
    };
    Ok(GapRecord {
        n,
        m,
        gap,
        residual,
        target,
    })
}

/// `|S(R_n‖ρ^{⊗n}) - (-S(R_n) + (n-1) S(ρ) + S(σ‖ρ) + S(σ))|`, with the left side
/// evaluated densely and the right side from single-copy quantities.
pub fn identity_residual(sigma: &DensityMatrix, rho: &DensityMatrix, n: usize, cap: usize) -> Result<f64> {
    let target = umegaki_relative_entropy(sigma, rho)?;
    let Some(target) = target.finite() else {
        return Err(Error::Support("identity needs supp σ ≤ supp ρ".into()));
    };
    let mixture = build_mixture(sigma, rho, 1, n, cap)?;
    let product = rho.kron_power(n);
    let lhs = umegaki_relative_entropy(&mixture, &product)?
        .finite()
        .ok_or_else(|| Error::Support("R_n escaped the support of ρ^⊗n".into()))?;
    let rhs = -von_neumann_entropy(&mixture)?
        + (n - 1) as f64 * von_neumann_entropy(rho)?
        + target
        + von_neumann_entropy(sigma)?;
    Ok((lhs - rhs).abs())
}

/// Gap records for `n = 1..=n_max`.
pub fn convergence_series(
    sigma: &DensityMatrix,
    rho: &DensityMatrix,
    m: usize,
    n_max: usize,
    cap: usize,
) -> Result<Vec<GapRecord>> {
    check_pair(sigma, rho, m, n_max, cap)?;
    (1..=n_max).map(|n| entropy_gap(sigma, rho, m, n, cap)).collect()
}
