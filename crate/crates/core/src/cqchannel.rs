//! Classical-quantum channels, Holevo quantities and codebooks.
//!
//! Letters are indexed `0..k`. In the binary setting letter `0` costs one
//! unit and letter `1` is free; a word `x ∈ {0,1}^n` is sent as the product
//! state `ρ_{x_1} ⊗ ... ⊗ ρ_{x_n}`.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use crate::entropy::{shannon_entropy, umegaki_relative_entropy, von_neumann_entropy};
use crate::error::{Error, Result};
use crate::matcore::{checked_power, kron_all, matrix_function, DensityMatrix, HermitianOperator, DENSITY_TOL};

const PROB_TOL: f64 = 1e-12;

/// Letter-indexed output states of a common dimension.
#[derive(Clone, Debug)]
pub struct CqChannel {
    outputs: Vec<DensityMatrix>,
}

impl CqChannel {
    pub fn new(outputs: Vec<DensityMatrix>) -> Result<Self> {
        let Some(first) = outputs.first() else {
            return Err(Error::Domain("channel needs at least one letter".into()));
        };
        let dim = first.dim();
        for o in &outputs {
            if o.dim() != dim {
                return Err(Error::DimensionMismatch {
                    left: dim,
                    right: o.dim(),
                });
            }
        }
        Ok(Self { outputs })
    }

    /// Binary channel `0 ↦ ρ_0`, `1 ↦ ρ_1`.
    pub fn binary(rho0: DensityMatrix, rho1: DensityMatrix) -> Result<Self> {
        Self::new(vec![rho0, rho1])
    }

    pub fn alphabet_size(&self) -> usize {
        self.outputs.len()
    }

    pub fn dim(&self) -> usize {
        self.outputs[0].dim()
    }

    pub fn output(&self, letter: usize) -> &DensityMatrix {
        &self.outputs[letter]
    }

    pub fn outputs(&self) -> &[DensityMatrix] {
        &self.outputs
    }

    fn check_input(&self, p: &InputDistribution) -> Result<()> {
        if p.len() != self.alphabet_size() {
            return Err(Error::DimensionMismatch {
                left: self.alphabet_size(),
                right: p.len(),
            });
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct InputDistribution(Vec<f64>);

impl InputDistribution {
    pub fn new(p: Vec<f64>) -> Result<Self> {
        let total: f64 = p.iter().sum();
        if p.is_empty() || p.iter().any(|&x| !(x >= 0.0)) || (total - 1.0).abs() > PROB_TOL {
            return Err(Error::Domain(format!("not a probability vector: {p:?}")));
        }
        Ok(Self(p))
    }

    pub fn uniform(k: usize) -> Self {
        Self(vec![1.0 / k as f64; k])
    }

    pub fn point_mass(k: usize, letter: usize) -> Self {
        let mut p = vec![0.0; k];
        p[letter] = 1.0;
        Self(p)
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Positive operators summing to the identity.
#[derive(Clone, Debug)]
pub struct Povm {
    elements: Vec<HermitianOperator>,
}

impl Povm {
    pub fn new(elements: Vec<HermitianOperator>) -> Result<Self> {
        let Some(first) = elements.first() else {
            return Err(Error::Domain("POVM needs at least one element".into()));
        };
        let dim = first.dim();
        let mut total = HermitianOperator::zeros(dim);
        for e in &elements {
            total = total.add(e)?;
            let min = e.spectrum()?.eigenvalues().last().copied().unwrap_or(0.0);
            if min < -DENSITY_TOL {
                return Err(Error::Domain(format!("POVM element has eigenvalue {min:e}")));
            }
        }
        let dev = total.max_abs_diff(&HermitianOperator::identity(dim))?;
        if dev > DENSITY_TOL {
            return Err(Error::Domain(format!("POVM elements miss the identity by {dev:e}")));
        }
        Ok(Self { elements })
    }

    /// Measurement in the standard basis.
    pub fn computational(dim: usize) -> Self {
        let elements = (0..dim)
            .map(|k| {
                let mut d = vec![0.0; dim];
                d[k] = 1.0;
                HermitianOperator::diagonal(&d).expect("nonempty")
            })
            .collect();
        Self { elements }
    }

    pub fn trivial(dim: usize) -> Self {
        Self {
            elements: vec![HermitianOperator::identity(dim)],
        }
    }

    pub fn elements(&self) -> &[HermitianOperator] {
        &self.elements
    }

    pub fn dim(&self) -> usize {
        self.elements[0].dim()
    }

    /// Splits element `index` into `t E` and `(1 - t) E`.
    pub fn refine(&self, index: usize, t: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&t) || index >= self.elements.len() {
            return Err(Error::Domain("refinement needs a valid index and t ∈ [0, 1]".into()));
        }
        let mut elements = self.elements.clone();
        let e = elements.remove(index);
        elements.insert(index, e.scale(1.0 - t));
        elements.insert(index, e.scale(t));
        Ok(Self { elements })
    }

    /// Splits element `F` at `index` into `F^{1/2} G F^{1/2}` and `F^{1/2} (I - G) F^{1/2}`
    /// for an effect `0 ≤ G ≤ I`.
    pub fn split(&self, index: usize, g: &HermitianOperator) -> Result<Self> {
        if index >= self.elements.len() {
            return Err(Error::Domain(format!("no POVM element {index}")));
        }
        let ev = g.spectrum()?.eigenvalues();
        let (hi, lo) = (ev[0], ev[ev.len() - 1]);
        if lo < -DENSITY_TOL || hi > 1.0 + DENSITY_TOL {
            return Err(Error::Domain(format!("split needs 0 ≤ G ≤ I, spectrum in [{lo:e}, {hi:e}]")));
        }
        let root = matrix_function(&self.elements[index], |t| t.max(0.0).sqrt())?;
        let complement = HermitianOperator::identity(g.dim()).sub(g)?;
        let first = g.congruence(root.as_mat())?;
        let second = complement.congruence(root.as_mat())?;
        let mut elements = self.elements.clone();
        elements[index] = second;
        elements.insert(index, first);
        Ok(Self { elements })
    }
}

/// Binary word over `{0, 1}`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word(Vec<u8>);

impl Word {
    pub fn new(bits: Vec<u8>) -> Result<Self> {
        if let Some(&b) = bits.iter().find(|&&b| b > 1) {
            return Err(Error::Domain(format!("word symbol {b} is not binary")));
        }
        Ok(Self(bits))
    }

    pub fn bits(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Number of (costly) `0` symbols.
    pub fn zeros(&self) -> usize {
        self.0.iter().filter(|&&b| b == 0).count()
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.0 {
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

impl FromStr for Word {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bits = s
            .chars()
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                other => Err(Error::Domain(format!("word symbol {other:?} is not binary"))),
            })
            .collect::<Result<Vec<u8>>>()?;
        Word::new(bits)
    }
}

/// Nonempty set of distinct binary words of a common length.
#[derive(Clone, Debug, PartialEq)]
pub struct Codebook {
    n: usize,
    words: Vec<Word>,
}

impl Codebook {
    pub fn new(n: usize, words: Vec<Word>) -> Result<Self> {
        if words.is_empty() {
            return Err(Error::Domain("codebook is empty".into()));
        }
        let mut seen = BTreeSet::new();
        for w in &words {
            if w.len() != n {
                return Err(Error::Domain(format!("word {w} does not have length {n}")));
            }
            if !seen.insert(w) {
                return Err(Error::Domain(format!("duplicate word {w}")));
            }
        }
        Ok(Self { n, words })
    }

    pub fn parse(words: &[&str]) -> Result<Self> {
        let words = words.iter().map(|s| s.parse()).collect::<Result<Vec<Word>>>()?;
        let n = words.first().map(Word::len).unwrap_or(0);
        Self::new(n, words)
    }

    /// All length-`n` words with exactly one `0`; word `k` has its `0` at position `k`.
    pub fn weight_one(n: usize) -> Self {
        assert!(n >= 1);
        let words = (0..n)
            .map(|k| Word((0..n).map(|i| u8::from(i != k)).collect()))
            .collect();
        Self { n, words }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn words(&self) -> &[Word] {
        &self.words
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn contains(&self, w: &Word) -> bool {
        self.words.contains(w)
    }

    /// Largest number of zeros in any word.
    pub fn max_zeros(&self) -> usize {
        self.words.iter().map(Word::zeros).max().unwrap_or(0)
    }
}

/// `ρ_X = Σ p(x) ρ_x`.
pub fn output_state(w: &CqChannel, p: &InputDistribution) -> Result<DensityMatrix> {
    w.check_input(p)?;
    let states: Vec<&DensityMatrix> = w.outputs.iter().collect();
    DensityMatrix::mixture(p.probabilities(), &states)
}

/// Holevo quantity `I(X, W) = S(ρ_X) - Σ p(x) S(ρ_x)`.
pub fn holevo_quantity(w: &CqChannel, p: &InputDistribution) -> Result<f64> {
    let avg = output_state(w, p)?;
    let mut mean = 0.0;
    for (&px, rho) in p.probabilities().iter().zip(&w.outputs) {
        if px > 0.0 {
            mean += px * von_neumann_entropy(rho)?;
        }
    }
    Ok(von_neumann_entropy(&avg)? - mean)
}

/// `|Σ p(x) S(ρ_x‖ρ) - I(X, W) - S(ρ_X‖ρ)|` for a reference state `ρ`.
pub fn holevo_identity_residual(w: &CqChannel, p: &InputDistribution, reference: &DensityMatrix) -> Result<f64> {
    w.check_input(p)?;
    if reference.dim() != w.dim() {
        return Err(Error::DimensionMismatch {
            left: w.dim(),
            right: reference.dim(),
        });
    }
    let mut lhs = 0.0;
    for (&px, rho) in p.probabilities().iter().zip(&w.outputs) {
        let d = umegaki_relative_entropy(rho, reference)?;
        let Some(d) = d.finite() else {
            return Err(Error::Support("reference does not cover a channel output".into()));
        };
        lhs += px * d;
    }
    let avg = output_state(w, p)?;
    let to_reference = umegaki_relative_entropy(&avg, reference)?
        .finite()
        .ok_or_else(|| Error::Support("reference does not cover the average output".into()))?;
    Ok((lhs - holevo_quantity(w, p)? - to_reference).abs())
}

/// Classical joint distribution `p(x) Tr ρ_x F_y`, rows indexed by `x`.
pub fn joint_distribution(w: &CqChannel, p: &InputDistribution, m: &Povm) -> Result<Vec<Vec<f64>>> {
    w.check_input(p)?;
    if m.dim() != w.dim() {
        return Err(Error::DimensionMismatch {
            left: w.dim(),
            right: m.dim(),
        });
    }
    w.outputs
        .iter()
        .zip(p.probabilities())
        .map(|(rho, &px)| {
            m.elements
                .iter()
                .map(|f| Ok(px * rho.trace_product(f)?.max(0.0)))
                .collect()
        })
        .collect()
}

/// Mutual information `H(Y) - H(Y|X)` of a joint table, in nats.
pub fn classical_mutual_information(joint: &[Vec<f64>]) -> f64 {
    let cols = joint.first().map_or(0, Vec::len);
    let px: Vec<f64> = joint.iter().map(|r| r.iter().sum()).collect();
    let py: Vec<f64> = (0..cols).map(|y| joint.iter().map(|r| r[y]).sum()).collect();
    let mut h_y_given_x = 0.0;
    for (row, &p) in joint.iter().zip(&px) {
        if p > 0.0 {
            let cond: Vec<f64> = row.iter().map(|&v| v / p).collect();
            h_y_given_x += p * shannon_entropy(&cond);
        }
    }
    shannon_entropy(&py) - h_y_given_x
}

/// Mutual information between the input and the outcome of measuring with `m`.
pub fn induced_mutual_information(w: &CqChannel, p: &InputDistribution, m: &Povm) -> Result<f64> {
    Ok(classical_mutual_information(&joint_distribution(w, p, m)?))
}

/// Mean number of zeros per word.
pub fn codebook_cost(a: &Codebook) -> f64 {
    a.words.iter().map(|w| w.zeros() as f64).sum::<f64>() / a.len() as f64
}

/// `ρ_x = ρ_{x_1} ⊗ ... ⊗ ρ_{x_n}`.
pub fn word_state(word: &Word, rho0: &DensityMatrix, rho1: &DensityMatrix) -> DensityMatrix {
    let factors = word.bits().iter().map(|&b| if b == 0 { rho0.op() } else { rho1.op() });
    DensityMatrix::new_unchecked(kron_all(factors))
}

/// Holevo quantity of the uniform input on `a` through `x ↦ ρ_x`.
///
/// Word entropies use additivity over the product factors.
pub fn codebook_holevo(a: &Codebook, rho0: &DensityMatrix, rho1: &DensityMatrix, cap: usize) -> Result<f64> {
    rho0.check_dim(rho1)?;
    checked_power(rho0.dim(), a.n(), cap)?;
    let s0 = von_neumann_entropy(rho0)?;
    let s1 = von_neumann_entropy(rho1)?;
    let weight = 1.0 / a.len() as f64;
    let states: Vec<DensityMatrix> = a.words.iter().map(|w| word_state(w, rho0, rho1)).collect();
    let refs: Vec<&DensityMatrix> = states.iter().collect();
    let avg = DensityMatrix::mixture(&vec![weight; refs.len()], &refs)?;
    let mean_entropy: f64 = a
        .words
        .iter()
        .map(|w| w.zeros() as f64 * s0 + (a.n() - w.zeros()) as f64 * s1)
        .sum::<f64>()
        * weight;
    Ok(von_neumann_entropy(&avg)? - mean_entropy)
}

/// Fano lower bound `(1 - ε) ln |A| - ln 2` on the Holevo quantity of a code with error at most `ε`.
pub fn fano_rate_bound(epsilon: f64, size: usize) -> Result<f64> {
    if !(0.0..1.0).contains(&epsilon) {
        return Err(Error::Domain(format!("epsilon must lie in [0, 1), got {epsilon}")));
    }
    if size == 0 {
        return Err(Error::Domain("codebook size must be positive".into()));
    }
    Ok((1.0 - epsilon) * (size as f64).ln() - 2f64.ln())
}
