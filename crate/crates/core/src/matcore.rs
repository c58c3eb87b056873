//! Dense complex Hermitian linear algebra.
//!
//! Every operator is stored as a dense `dim x dim` matrix. Tensor products use
//! the row-major block layout
//! `kron(a, b)[i * b.dim + k][j * b.dim + l] = a[i][j] * b[k][l]`, which is the
//! layout every cross-module comparison in this crate relies on.
//!
//! Eigendecompositions are cached on the operator the first time they are
//! requested, so a state that is validated and then fed to an entropy
//! functional is only diagonalized once.

use std::fmt;
use std::sync::OnceLock;

use faer::{Mat, MatRef, Side};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Per-entry absolute tolerance for Hermitian symmetry.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Tolerance for trace normalization and negative eigenvalues of states.
pub const DENSITY_TOL: f64 = 1e-10;
/// Default relative threshold below which an eigenvalue is outside the support.
pub const SUPPORT_TOL: f64 = 1e-12;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

/// A square complex matrix equal to its conjugate transpose.
#[derive(Clone)]
pub struct HermitianOperator {
    mat: Mat<Complex64>,
    spectrum: OnceLock<SpectralDecomposition>,
}

impl fmt::Debug for HermitianOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("HermitianOperator")
            .field("dim", &self.dim())
            .field("entries", &self.mat)
            .finish()
    }
}

/// Locate the entry pair with the largest Hermitian asymmetry.
fn worst_asymmetry(mat: MatRef<'_, Complex64>) -> (usize, usize, f64) {
    let n = mat.nrows();
    let mut worst = (0, 0, 0.0);
    for j in 0..n {
        for i in j..n {
            let dev = (mat[(i, j)] - mat[(j, i)].conj()).norm();
            if dev > worst.2 {
                worst = (i, j, dev);
            }
        }
    }
    worst
}

impl HermitianOperator {
    /// Validates shape and Hermitian symmetry (absolute, per entry).
    pub fn from_mat(mat: Mat<Complex64>) -> Result<Self> {
        if mat.nrows() != mat.ncols() {
            return Err(Error::NotSquare {
                rows: mat.nrows(),
                cols: mat.ncols(),
            });
        }
        if mat.nrows() == 0 {
            return Err(Error::Empty);
        }
        let (row, col, deviation) = worst_asymmetry(mat.as_ref());
        if !(deviation <= HERMITIAN_TOL) {
            return Err(Error::NotHermitian {
                row,
                col,
                deviation,
            });
        }
        Ok(Self::wrap(mat))
    }

    pub fn from_fn(dim: usize, f: impl FnMut(usize, usize) -> Complex64) -> Result<Self> {
        Self::from_mat(Mat::from_fn(dim, dim, f))
    }

    /// Builds an operator from row-major complex rows.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let n = rows.len();
        if let Some(bad) = rows.iter().find(|r| r.len() != n) {
            return Err(Error::NotSquare {
                rows: n,
                cols: bad.len(),
            });
        }
        Self::from_fn(n, |i, j| rows[i][j])
    }

    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let rows: Vec<Vec<Complex64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| Complex64::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&rows)
    }

    pub fn diagonal(values: &[f64]) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Empty);
        }
        let n = values.len();
        Ok(Self::wrap(Mat::from_fn(n, n, |i, j| {
            if i == j {
                Complex64::new(values[i], 0.0)
            } else {
                ZERO
            }
        })))
    }

    pub fn identity(dim: usize) -> Self {
        assert!(dim >= 1, "identity needs dim >= 1");
        Self::wrap(Mat::from_fn(dim, dim, |i, j| if i == j { ONE } else { ZERO }))
    }

    pub fn zeros(dim: usize) -> Self {
        assert!(dim >= 1, "zeros needs dim >= 1");
        Self::wrap(Mat::zeros(dim, dim))
    }

    /// Wraps a matrix that is Hermitian by construction.
    pub(crate) fn wrap(mat: Mat<Complex64>) -> Self {
        debug_assert_eq!(mat.nrows(), mat.ncols());
        Self {
            mat,
            spectrum: OnceLock::new(),
        }
    }

    /// Replaces `mat` by `(mat + mat^†) / 2`, removing rounding asymmetry.
    pub(crate) fn hermitize(mut mat: Mat<Complex64>) -> Self {
        let n = mat.nrows();
        for j in 0..n {
            mat[(j, j)].im = 0.0;
            for i in (j + 1)..n {
                let avg = (mat[(i, j)] + mat[(j, i)].conj()) * 0.5;
                mat[(i, j)] = avg;
                mat[(j, i)] = avg.conj();
            }
        }
        Self::wrap(mat)
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.mat[(row, col)]
    }

    pub fn as_mat(&self) -> MatRef<'_, Complex64> {
        self.mat.as_ref()
    }

    pub fn into_mat(self) -> Mat<Complex64> {
        self.mat
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|i| self.mat[(i, i)].re).sum()
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        max_abs(self.mat.as_ref())
    }

    /// `Tr(self * other)`, which is real for two Hermitian operators.
    pub fn trace_product(&self, other: &HermitianOperator) -> Result<f64> {
        self.check_dim(other)?;
        let n = self.dim();
        let mut acc = 0.0;
        for j in 0..n {
            for i in 0..n {
                // Tr(AB) = sum_ij A_ij B_ji and B_ji = conj(B_ij).
                let a = self.mat[(i, j)];
                let b = other.mat[(i, j)];
                acc += a.re * b.re + a.im * b.im;
            }
        }
        Ok(acc)
    }

    pub fn check_dim(&self, other: &HermitianOperator) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: other.dim(),
            });
        }
        Ok(())
    }

    /// `a * self + b * other`.
    pub fn linear_combination(&self, a: f64, other: &HermitianOperator, b: f64) -> Result<Self> {
        self.check_dim(other)?;
        let n = self.dim();
        Ok(Self::wrap(Mat::from_fn(n, n, |i, j| {
            self.mat[(i, j)] * a + other.mat[(i, j)] * b
        })))
    }

    pub fn add(&self, other: &HermitianOperator) -> Result<Self> {
        self.linear_combination(1.0, other, 1.0)
    }

    pub fn sub(&self, other: &HermitianOperator) -> Result<Self> {
        self.linear_combination(1.0, other, -1.0)
    }

    pub fn scale(&self, factor: f64) -> Self {
        let n = self.dim();
        Self::wrap(Mat::from_fn(n, n, |i, j| self.mat[(i, j)] * factor))
    }

    /// Plain matrix product; the result is generally not Hermitian.
    pub fn matmul(&self, other: &HermitianOperator) -> Result<Mat<Complex64>> {
        self.check_dim(other)?;
        Ok(&self.mat * &other.mat)
    }

    /// `x * self * x^†`.
    pub fn congruence(&self, x: MatRef<'_, Complex64>) -> Result<Self> {
        if x.ncols() != self.dim() {
            return Err(Error::DimensionMismatch {
                left: x.ncols(),
                right: self.dim(),
            });
        }
        let prod = x * &self.mat * x.adjoint();
        Ok(Self::hermitize(prod))
    }

    /// Largest entry modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &HermitianOperator) -> Result<f64> {
        self.check_dim(other)?;
        Ok(max_abs((&self.mat - &other.mat).as_ref()))
    }

    /// True when every off-diagonal entry is exactly zero.
    pub fn is_diagonal(&self) -> bool {
        let n = self.dim();
        (0..n).all(|j| (0..n).all(|i| i == j || self.mat[(i, j)] == ZERO))
    }

    pub fn diagonal_real(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.mat[(i, i)].re).collect()
    }

    /// Eigendecomposition, computed once and cached.
    pub fn spectrum(&self) -> Result<&SpectralDecomposition> {
        if let Some(s) = self.spectrum.get() {
            return Ok(s);
        }
        let s = decompose(self)?;
        Ok(self.spectrum.get_or_init(|| s))
    }
}

pub(crate) fn max_abs(m: MatRef<'_, Complex64>) -> f64 {
    let mut worst = 0.0f64;
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            worst = worst.max(m[(i, j)].norm());
        }
    }
    worst
}

/// Orthonormal eigenvectors of a decomposition.
#[derive(Clone, Debug)]
pub enum Eigenbasis {
    /// Eigenvector `k` is the standard basis vector `e_{perm[k]}`.
    Standard(Vec<usize>),
    /// Eigenvector `k` is column `k`.
    Dense(Mat<Complex64>),
}

/// `H = V diag(eigenvalues) V^†` with eigenvalues in descending order.
#[derive(Clone, Debug)]
pub struct SpectralDecomposition {
    eigenvalues: Vec<f64>,
    basis: Eigenbasis,
}

impl SpectralDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn basis(&self) -> &Eigenbasis {
        &self.basis
    }

    pub fn eigenvector(&self, k: usize) -> Vec<Complex64> {
        match &self.basis {
            Eigenbasis::Standard(perm) => {
                let mut v = vec![ZERO; self.dim()];
                v[perm[k]] = ONE;
                v
            }
            Eigenbasis::Dense(m) => (0..self.dim()).map(|i| m[(i, k)]).collect(),
        }
    }

    /// Eigenvectors as the columns of a dense matrix.
    pub fn eigenvectors(&self) -> Mat<Complex64> {
        match &self.basis {
            Eigenbasis::Standard(perm) => {
                let n = self.dim();
                Mat::from_fn(n, n, |i, k| if perm[k] == i { ONE } else { ZERO })
            }
            Eigenbasis::Dense(m) => m.clone(),
        }
    }

    /// `V diag(weights) V^†`, skipping eigenvectors with zero weight.
    pub fn compose(&self, weights: &[f64]) -> HermitianOperator {
        assert_eq!(weights.len(), self.dim());
        let n = self.dim();
        match &self.basis {
            Eigenbasis::Standard(perm) => {
                let mut diag = vec![0.0; n];
                for (k, &w) in weights.iter().enumerate() {
                    diag[perm[k]] = w;
                }
                HermitianOperator::wrap(Mat::from_fn(n, n, |i, j| {
                    if i == j {
                        Complex64::new(diag[i], 0.0)
                    } else {
                        ZERO
                    }
                }))
            }
            Eigenbasis::Dense(v) => {
                let keep: Vec<usize> = (0..n).filter(|&k| weights[k] != 0.0).collect();
                if keep.is_empty() {
                    return HermitianOperator::zeros(n);
                }
                let sel = Mat::from_fn(n, keep.len(), |i, c| v[(i, keep[c])]);
                let scaled = Mat::from_fn(n, keep.len(), |i, c| sel[(i, c)] * weights[keep[c]]);
                HermitianOperator::hermitize(&scaled * sel.adjoint())
            }
        }
    }

    /// Diagonal of `V^† A V`: the weight `<v_k|A|v_k>` of `A` on each eigenvector.
    pub fn weights_of(&self, a: &HermitianOperator) -> Result<Vec<f64>> {
        if a.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                left: a.dim(),
                right: self.dim(),
            });
        }
        Ok(match &self.basis {
            Eigenbasis::Standard(perm) => perm.iter().map(|&i| a.get(i, i).re).collect(),
            Eigenbasis::Dense(v) => {
                let av = a.as_mat() * v;
                let n = self.dim();
                (0..n)
                    .map(|k| {
                        let mut acc = ZERO;
                        for i in 0..n {
                            acc += v[(i, k)].conj() * av[(i, k)];
                        }
                        acc.re
                    })
                    .collect()
            }
        })
    }

    /// Largest eigenvalue clipped below at zero.
    pub fn lambda_max(&self) -> f64 {
        self.eigenvalues.first().copied().unwrap_or(0.0).max(0.0)
    }
}

fn decompose(h: &HermitianOperator) -> Result<SpectralDecomposition> {
    let n = h.dim();
    if h.is_diagonal() {
        let diag = h.diagonal_real();
        let mut perm: Vec<usize> = (0..n).collect();
        // Stable sort keeps ties in index order.
        perm.sort_by(|&a, &b| diag[b].total_cmp(&diag[a]));
        let eigenvalues = perm.iter().map(|&i| diag[i]).collect();
        return Ok(SpectralDecomposition {
            eigenvalues,
            basis: Eigenbasis::Standard(perm),
        });
    }

    let evd = h
        .as_mat()
        .self_adjoint_eigen(Side::Lower)
        .map_err(|_| Error::NoConvergence)?;
    let u = evd.U();
    let s = evd.S().column_vector();
    // faer returns ascending order.
    let order: Vec<usize> = (0..n).rev().collect();
    let eigenvalues: Vec<f64> = order.iter().map(|&k| s[k].re).collect();
    let mut v = Mat::from_fn(n, n, |i, c| u[(i, order[c])]);
    for c in 0..n {
        let pivot = (0..n).map(|i| v[(i, c)]).find(|z| z.norm() > 1e-12);
        if let Some(z) = pivot {
            let phase = z.conj() / z.norm();
            for i in 0..n {
                v[(i, c)] *= phase;
            }
        }
    }
    Ok(SpectralDecomposition {
        eigenvalues,
        basis: Eigenbasis::Dense(v),
    })
}

/// Eigendecomposition with descending eigenvalues and a fixed phase convention
/// (the first non-negligible entry of each eigenvector is real and positive).
pub fn eigh(h: &HermitianOperator) -> Result<SpectralDecomposition> {
    h.spectrum().cloned()
}

/// Validates Hermitian symmetry of a raw matrix, then decomposes it.
pub fn eigh_matrix(mat: Mat<Complex64>) -> Result<SpectralDecomposition> {
    eigh(&HermitianOperator::from_mat(mat)?)
}

/// Applies `f` to the spectrum: `V diag(f(λ)) V^†`.
///
/// A non-finite value of `f` (a log or inverse at zero, a square root of a
/// negative number) rejects the call; callers that need a value at zero must
/// provide it inside `f`.
pub fn matrix_function(h: &HermitianOperator, f: impl Fn(f64) -> f64) -> Result<HermitianOperator> {
    let s = h.spectrum()?;
    let mut weights = Vec::with_capacity(s.dim());
    for &lambda in s.eigenvalues() {
        let v = f(lambda);
        if !v.is_finite() {
            return Err(Error::FunctionUndefined { eigenvalue: lambda });
        }
        weights.push(v);
    }
    Ok(s.compose(&weights))
}

/// Spectrum with eigenvalues at or below `tol * λ_max` set to exactly zero.
pub fn clipped_eigenvalues(s: &SpectralDecomposition, tol: f64) -> Vec<f64> {
    let cut = tol * s.lambda_max();
    s.eigenvalues()
        .iter()
        .map(|&l| if l > cut { l } else { 0.0 })
        .collect()
}

fn kron_mat(a: MatRef<'_, Complex64>, b: MatRef<'_, Complex64>) -> Mat<Complex64> {
    let db = b.nrows();
    let n = a.nrows() * db;
    Mat::from_fn(n, n, |r, c| a[(r / db, c / db)] * b[(r % db, c % db)])
}

/// Kronecker product in row-major block layout.
pub fn kron(a: &HermitianOperator, b: &HermitianOperator) -> HermitianOperator {
    HermitianOperator::wrap(kron_mat(a.as_mat(), b.as_mat()))
}

/// `a ⊗ a ⊗ ... ⊗ a` with `copies` factors; `copies = 0` gives the 1x1 identity.
pub fn kron_power(a: &HermitianOperator, copies: usize) -> HermitianOperator {
    let mut acc = HermitianOperator::identity(1);
    for _ in 0..copies {
        acc = kron(&acc, a);
    }
    acc
}

/// Kronecker product of a sequence of factors, left to right.
pub fn kron_all<'a>(factors: impl IntoIterator<Item = &'a HermitianOperator>) -> HermitianOperator {
    let mut acc = HermitianOperator::identity(1);
    for f in factors {
        acc = if acc.dim() == 1 && acc.get(0, 0) == ONE {
            f.clone()
        } else {
            kron(&acc, f)
        };
    }
    acc
}

/// `d^k` if it fits under `cap`, otherwise a size-cap error naming the dimension.
pub fn checked_power(d: usize, k: usize, cap: usize) -> Result<usize> {
    let mut required: u128 = 1;
    for _ in 0..k {
        required = required.saturating_mul(d as u128);
    }
    if required > cap as u128 {
        return Err(Error::SizeCap { required, cap });
    }
    Ok(required as usize)
}

/// A positive semidefinite unit-trace Hermitian operator.
#[derive(Clone, Debug)]
pub struct DensityMatrix {
    op: HermitianOperator,
}

impl std::ops::Deref for DensityMatrix {
    type Target = HermitianOperator;

    fn deref(&self) -> &HermitianOperator {
        &self.op
    }
}

impl DensityMatrix {
    /// Checks unit trace and that no eigenvalue is below `-1e-10`.
    pub fn new(op: HermitianOperator) -> Result<Self> {
        let tr = op.trace();
        if !((tr - 1.0).abs() <= DENSITY_TOL) {
            return Err(Error::NotDensity(format!("trace {tr} differs from 1")));
        }
        let min = op
            .spectrum()?
            .eigenvalues()
            .last()
            .copied()
            .unwrap_or(0.0);
        if min < -DENSITY_TOL {
            return Err(Error::NotDensity(format!("negative eigenvalue {min:e}")));
        }
        Ok(Self { op })
    }

    /// For operators that are states by construction (products, mixtures).
    pub(crate) fn new_unchecked(op: HermitianOperator) -> Self {
        Self { op }
    }

    /// Diagonal state with the given probability vector.
    pub fn from_spectrum(p: &[f64]) -> Result<Self> {
        if let Some(&bad) = p.iter().find(|&&x| !(x >= 0.0)) {
            return Err(Error::NotDensity(format!("negative probability {bad}")));
        }
        Self::new(HermitianOperator::diagonal(p)?)
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self::new_unchecked(HermitianOperator::identity(dim).scale(1.0 / dim as f64))
    }

    /// `|ψ><ψ| / <ψ|ψ>`.
    pub fn pure(psi: &[Complex64]) -> Result<Self> {
        let norm2: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
        if psi.is_empty() || !(norm2 > 0.0) {
            return Err(Error::NotDensity("zero state vector".into()));
        }
        let n = psi.len();
        let op = HermitianOperator::hermitize(Mat::from_fn(n, n, |i, j| psi[i] * psi[j].conj() / norm2));
        Ok(Self::new_unchecked(op))
    }

    pub fn op(&self) -> &HermitianOperator {
        &self.op
    }

    pub fn into_op(self) -> HermitianOperator {
        self.op
    }

    pub fn kron(&self, other: &DensityMatrix) -> DensityMatrix {
        Self::new_unchecked(kron(&self.op, &other.op))
    }

    pub fn kron_power(&self, copies: usize) -> DensityMatrix {
        Self::new_unchecked(kron_power(&self.op, copies))
    }

    /// Convex combination `Σ w_i states_i`.
    pub fn mixture(weights: &[f64], states: &[&DensityMatrix]) -> Result<DensityMatrix> {
        if weights.len() != states.len() || states.is_empty() {
            return Err(Error::DimensionMismatch {
                left: weights.len(),
                right: states.len(),
            });
        }
        let total: f64 = weights.iter().sum();
        if weights.iter().any(|&w| !(w >= 0.0)) || (total - 1.0).abs() > 1e-12 {
            return Err(Error::Domain("mixture weights must be a probability vector".into()));
        }
        let dim = states[0].dim();
        let mut acc = Mat::<Complex64>::zeros(dim, dim);
        for (&w, s) in weights.iter().zip(states) {
            if s.dim() != dim {
                return Err(Error::DimensionMismatch {
                    left: dim,
                    right: s.dim(),
                });
            }
            if w == 0.0 {
                continue;
            }
            let m = s.as_mat();
            for j in 0..dim {
                for i in 0..dim {
                    acc[(i, j)] += m[(i, j)] * w;
                }
            }
        }
        Ok(Self::new_unchecked(HermitianOperator::wrap(acc)))
    }
}

/// Orthogonal projection onto eigenvectors with eigenvalue above `tol * λ_max`.
pub fn support_projection(rho: &DensityMatrix, tol: f64) -> Result<HermitianOperator> {
    let s = rho.spectrum()?;
    let weights: Vec<f64> = clipped_eigenvalues(s, tol)
        .iter()
        .map(|&l| if l > 0.0 { 1.0 } else { 0.0 })
        .collect();
    Ok(s.compose(&weights))
}

/// Number of eigenvalues above `tol * λ_max`.
pub fn support_rank(rho: &DensityMatrix, tol: f64) -> Result<usize> {
    let s = rho.spectrum()?;
    Ok(clipped_eigenvalues(s, tol).iter().filter(|&&l| l > 0.0).count())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::StateSampler;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn kron_identities_give_identity() {
        let i2 = HermitianOperator::identity(2);
        let k = kron(&i2, &i2);
        assert_eq!(k.max_abs_diff(&HermitianOperator::identity(4)).unwrap(), 0.0);
    }

    #[test]
    fn kron_diagonal_layout() {
        let a = HermitianOperator::diagonal(&[2.0, 3.0]).unwrap();
        let b = HermitianOperator::diagonal(&[5.0, 7.0]).unwrap();
        let expect = HermitianOperator::diagonal(&[10.0, 14.0, 15.0, 21.0]).unwrap();
        assert_eq!(kron(&a, &b).max_abs_diff(&expect).unwrap(), 0.0);
    }

    #[test]
    fn kron_block_layout_entries() {
        let mut sampler = StateSampler::new(3);
        let a = sampler.hermitian(2);
        let b = sampler.hermitian(3);
        let k = kron(&a, &b);
        for i in 0..2 {
            for j in 0..2 {
                for p in 0..3 {
                    for q in 0..3 {
                        assert_eq!(k.get(i * 3 + p, j * 3 + q), a.get(i, j) * b.get(p, q));
                    }
                }
            }
        }
    }

    #[test]
    fn kron_power_trace_is_one() {
        let mut sampler = StateSampler::new(11);
        let rho = sampler.density(2);
        for n in 1..=6 {
            assert!((rho.kron_power(n).trace() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn eigh_identity_and_diagonal() {
        let s = eigh(&HermitianOperator::identity(3)).unwrap();
        assert_eq!(s.eigenvalues(), &[1.0, 1.0, 1.0]);
        let s = eigh(&HermitianOperator::diagonal(&[0.3, 0.7]).unwrap()).unwrap();
        assert_eq!(s.eigenvalues(), &[0.7, 0.3]);
    }

    #[test]
    fn eigh_reconstructs_random_hermitian() {
        let mut sampler = StateSampler::new(16);
        let h = sampler.hermitian(16);
        let s = eigh(&h).unwrap();
        let rebuilt = s.compose(s.eigenvalues());
        let scale = h.max_abs().max(1.0);
        assert!(rebuilt.max_abs_diff(&h).unwrap() <= 1e-10 * scale);
        let v = s.eigenvectors();
        let gram = v.adjoint() * &v;
        let gram = HermitianOperator::hermitize(gram);
        assert!(gram.max_abs_diff(&HermitianOperator::identity(16)).unwrap() <= 1e-10);
        assert!(s.eigenvalues().windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn eigh_phase_convention_and_determinism() {
        let mut sampler = StateSampler::new(5);
        let h = sampler.hermitian(6);
        let a = eigh_matrix(h.as_mat().to_owned()).unwrap();
        let b = eigh_matrix(h.as_mat().to_owned()).unwrap();
        assert_eq!(a.eigenvalues(), b.eigenvalues());
        for k in 0..6 {
            let va = a.eigenvector(k);
            assert_eq!(va, b.eigenvector(k));
            let first = va.iter().find(|z| z.norm() > 1e-12).unwrap();
            assert!(first.im.abs() < 1e-15 && first.re > 0.0);
        }
    }

    #[test]
    fn eigh_rejects_non_hermitian_with_worst_pair() {
        let mut m = Mat::<Complex64>::zeros(3, 3);
        m[(2, 0)] = c(1.0);
        m[(1, 0)] = c(1e-3);
        match eigh_matrix(m) {
            Err(Error::NotHermitian { row, col, deviation }) => {
                assert_eq!((row, col), (2, 0));
                assert_eq!(deviation, 1.0);
            }
            other => panic!("expected NotHermitian, got {other:?}"),
        }
    }

    #[test]
    fn matrix_function_examples() {
        let i2 = HermitianOperator::identity(2);
        let sq = matrix_function(&i2, |t| t * t).unwrap();
        assert!(sq.max_abs_diff(&i2).unwrap() < 1e-15);

        let d = HermitianOperator::diagonal(&[4.0, 9.0]).unwrap();
        let r = matrix_function(&d, f64::sqrt).unwrap();
        let expect = HermitianOperator::diagonal(&[2.0, 3.0]).unwrap();
        assert!(r.max_abs_diff(&expect).unwrap() < 1e-15);
    }

    #[test]
    fn matrix_function_rejects_log_of_zero() {
        let d = HermitianOperator::diagonal(&[0.5, 0.0]).unwrap();
        assert!(matches!(
            matrix_function(&d, f64::ln),
            Err(Error::FunctionUndefined { eigenvalue }) if eigenvalue == 0.0
        ));
    }

    #[test]
    fn matrix_function_of_dense_matches_spectral_sum() {
        let mut sampler = StateSampler::new(8);
        let rho = sampler.density(3);
        let sqrt = matrix_function(&rho, |t| t.max(0.0).sqrt()).unwrap();
        let back = sqrt.matmul(&sqrt).unwrap();
        let back = HermitianOperator::hermitize(back);
        assert!(back.max_abs_diff(&rho).unwrap() < 1e-12);
    }

    #[test]
    fn support_projection_examples() {
        let half = DensityMatrix::maximally_mixed(2);
        let p = support_projection(&half, SUPPORT_TOL).unwrap();
        assert!(p.max_abs_diff(&HermitianOperator::identity(2)).unwrap() < 1e-15);

        let rho = DensityMatrix::from_spectrum(&[0.5, 0.5, 0.0]).unwrap();
        let p = support_projection(&rho, SUPPORT_TOL).unwrap();
        let expect = HermitianOperator::diagonal(&[1.0, 1.0, 0.0]).unwrap();
        assert_eq!(p.max_abs_diff(&expect).unwrap(), 0.0);

        let mut sampler = StateSampler::new(21);
        let psi = sampler.pure(4);
        assert_eq!(support_rank(&psi, SUPPORT_TOL).unwrap(), 1);
        let p = support_projection(&psi, SUPPORT_TOL).unwrap();
        let p2 = HermitianOperator::hermitize(p.matmul(&p).unwrap());
        assert!(p2.max_abs_diff(&p).unwrap() < 1e-12);
    }

    #[test]
    fn density_validation() {
        assert!(DensityMatrix::from_spectrum(&[0.5, 0.4]).is_err());
        assert!(DensityMatrix::from_spectrum(&[1.2, -0.2]).is_err());
        assert!(DensityMatrix::from_spectrum(&[0.25; 4]).is_ok());
        let off = HermitianOperator::from_real_rows(&[vec![0.5, 0.6], vec![0.6, 0.5]]).unwrap();
        assert!(matches!(DensityMatrix::new(off), Err(Error::NotDensity(_))));
    }

    #[test]
    fn checked_power_reports_dimension() {
        assert_eq!(checked_power(2, 12, 4096).unwrap(), 4096);
        assert_eq!(
            checked_power(2, 13, 4096),
            Err(Error::SizeCap {
                required: 8192,
                cap: 4096
            })
        );
    }
}
