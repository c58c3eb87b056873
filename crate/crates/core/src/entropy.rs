//! Entropy functionals in nats.

use std::fmt;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::matcore::{clipped_eigenvalues, DensityMatrix, HermitianOperator, DENSITY_TOL, SUPPORT_TOL};

/// A real number or `+∞`. Infinity only ever signals a failed support condition.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ExtendedReal {
    Finite(f64),
    Infinite,
}

impl ExtendedReal {
    pub fn is_finite(self) -> bool {
        matches!(self, ExtendedReal::Finite(_))
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            ExtendedReal::Finite(x) => Some(x),
            ExtendedReal::Infinite => None,
        }
    }

    /// As an `f64`, mapping `+∞` to `f64::INFINITY`.
    pub fn value(self) -> f64 {
        self.finite().unwrap_or(f64::INFINITY)
    }
}

impl fmt::Display for ExtendedReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtendedReal::Finite(x) => write!(f, "{x}"),
            ExtendedReal::Infinite => f.write_str("inf"),
        }
    }
}

impl Serialize for ExtendedReal {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            ExtendedReal::Finite(x) => s.serialize_f64(*x),
            ExtendedReal::Infinite => s.serialize_str("inf"),
        }
    }
}

/// `η(t) = -t ln t` with `η(0) = 0`.
pub fn eta(t: f64) -> Result<f64> {
    if !(t >= 0.0) {
        return Err(Error::Domain(format!("eta needs t >= 0, got {t}")));
    }
    Ok(eta_nonneg(t))
}

/// `η` on a value already known to be nonnegative (or clipped to zero).
pub(crate) fn eta_nonneg(t: f64) -> f64 {
    if t > 0.0 {
        -t * t.ln()
    } else {
        0.0
    }
}

/// Shannon entropy of a probability vector, `0 ln 0 = 0`.
pub fn shannon_entropy(p: &[f64]) -> f64 {
    p.iter().map(|&x| eta_nonneg(x)).sum()
}

/// Classical relative entropy `Σ p ln(p/q)`, infinite when `p` puts mass where `q` has none.
pub fn kl_divergence(p: &[f64], q: &[f64]) -> Result<ExtendedReal> {
    if p.len() != q.len() {
        return Err(Error::DimensionMismatch {
            left: p.len(),
            right: q.len(),
        });
    }
    let mut acc = 0.0;
    for (&a, &b) in p.iter().zip(q) {
        if a > 0.0 {
            if !(b > 0.0) {
                return Ok(ExtendedReal::Infinite);
            }
            acc += a * (a.ln() - b.ln());
        }
    }
    Ok(ExtendedReal::Finite(acc))
}

/// `S(ρ) = -Tr ρ ln ρ`, computed from the clipped spectrum.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> Result<f64> {
    let s = rho.spectrum()?;
    Ok(clipped_eigenvalues(s, SUPPORT_TOL).into_iter().map(eta_nonneg).sum())
}

/// Mass of `sigma` off the support of `rho`: `max |((I - P) σ (I - P))_ij|`.
pub fn off_support_mass(sigma: &DensityMatrix, rho: &DensityMatrix) -> Result<f64> {
    sigma.check_dim(rho)?;
    let s = rho.spectrum()?;
    let kernel: Vec<f64> = clipped_eigenvalues(s, SUPPORT_TOL)
        .iter()
        .map(|&l| if l > 0.0 { 0.0 } else { 1.0 })
        .collect();
    if kernel.iter().all(|&w| w == 0.0) {
        return Ok(0.0);
    }
    let q = s.compose(&kernel);
    let sandwiched = q.matmul(sigma)?;
    let sandwiched = &sandwiched * q.as_mat();
    Ok(crate::matcore::max_abs(sandwiched.as_ref()))
}

/// `supp σ ≤ supp ρ`, judged numerically.
pub fn support_contained(sigma: &DensityMatrix, rho: &DensityMatrix) -> Result<bool> {
    Ok(off_support_mass(sigma, rho)? <= DENSITY_TOL)
}

/// Umegaki relative entropy `S(σ‖ρ) = Tr σ (ln σ - ln ρ)`, `+∞` unless `supp σ ≤ supp ρ`.
pub fn umegaki_relative_entropy(sigma: &DensityMatrix, rho: &DensityMatrix) -> Result<ExtendedReal> {
    if !support_contained(sigma, rho)? {
        return Ok(ExtendedReal::Infinite);
    }
    let s = rho.spectrum()?;
    let mu = clipped_eigenvalues(s, SUPPORT_TOL);
    let weights = s.weights_of(sigma)?;
    // Tr σ ln ρ restricted to the support of ρ.
    let cross: f64 = mu
        .iter()
        .zip(&weights)
        .filter(|(&m, _)| m > 0.0)
        .map(|(&m, &w)| w * m.ln())
        .sum();
    Ok(ExtendedReal::Finite(-von_neumann_entropy(sigma)? - cross))
}

/// Belavkin–Staszewski relative entropy `-Tr ρ η(ρ^{-1/2} ω ρ^{-1/2})`, with the
/// inverse square root taken on the support of `ρ`; `+∞` unless `supp ω ≤ supp ρ`.
pub fn bs_relative_entropy(omega: &DensityMatrix, rho: &DensityMatrix) -> Result<ExtendedReal> {
    if !support_contained(omega, rho)? {
        return Ok(ExtendedReal::Infinite);
    }
    let s = rho.spectrum()?;
    let inv_sqrt: Vec<f64> = clipped_eigenvalues(s, SUPPORT_TOL)
        .iter()
        .map(|&l| if l > 0.0 { 1.0 / l.sqrt() } else { 0.0 })
        .collect();
    let r = s.compose(&inv_sqrt);
    let x = omega.congruence(r.as_mat())?;
    let xs = x.spectrum()?;
    let eta_x: Vec<f64> = xs
        .eigenvalues()
        .iter()
        .map(|&t| eta_nonneg(t.max(0.0)))
        .collect();
    let rho_weights = xs.weights_of(rho)?;
    let tr: f64 = eta_x.iter().zip(&rho_weights).map(|(e, w)| e * w).sum();
    Ok(ExtendedReal::Finite(-tr))
}

/// `Tr ρ η(ρ)` route to the entropy; used to cross-check the spectral sum.
pub fn entropy_via_matrix_function(rho: &DensityMatrix) -> Result<f64> {
    let h: HermitianOperator = crate::matcore::matrix_function(rho, |t| eta_nonneg(t.max(0.0)))?;
    Ok(h.trace())
}
