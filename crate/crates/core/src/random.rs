//! Seeded generation of random operators, states, measurements and codebooks.
//!
//! All banks used by the test suite and by the `checks` command are drawn from
//! here, so a seed fully determines an experiment:
//!
//! * Hermitian operators: `(G + G^†) / 2` with `G` a matrix of independent
//!   standard complex Gaussians (real and imaginary parts `N(0, 1)`).
//! * Density matrices: `Z Z^† / Tr(Z Z^†)` for a Gaussian complex `Z`.
//! * Unitaries: eigenvectors of a random Hermitian operator.
//! * POVMs: rank-one projectors onto the columns of a random unitary, column
//!   `j` assigned to outcome `j mod outcomes`.

use faer::Mat;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::cqchannel::{Codebook, Povm, Word};
use crate::matcore::{eigh, DensityMatrix, HermitianOperator};

pub struct StateSampler {
    rng: ChaCha8Rng,
}

impl StateSampler {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn gaussian(&mut self) -> f64 {
        self.rng.sample(StandardNormal)
    }

    pub fn complex_gaussian(&mut self) -> Complex64 {
        let re = self.gaussian();
        let im = self.gaussian();
        Complex64::new(re, im)
    }

    pub fn uniform(&mut self) -> f64 {
        self.rng.random::<f64>()
    }

    pub fn below(&mut self, n: usize) -> usize {
        self.rng.random_range(0..n)
    }

    pub fn gaussian_matrix(&mut self, rows: usize, cols: usize) -> Mat<Complex64> {
        Mat::from_fn(rows, cols, |_, _| self.complex_gaussian())
    }

    pub fn hermitian(&mut self, dim: usize) -> HermitianOperator {
        let g = self.gaussian_matrix(dim, dim);
        HermitianOperator::hermitize(Mat::from_fn(dim, dim, |i, j| {
            (g[(i, j)] + g[(j, i)].conj()) * 0.5
        }))
    }

    /// Full-rank (almost surely) random state.
    pub fn density(&mut self, dim: usize) -> DensityMatrix {
        self.density_of_rank(dim, dim)
    }

    pub fn density_of_rank(&mut self, dim: usize, rank: usize) -> DensityMatrix {
        let z = self.gaussian_matrix(dim, rank);
        let w = &z * z.adjoint();
        let op = HermitianOperator::hermitize(w);
        let tr = op.trace();
        DensityMatrix::new_unchecked(op.scale(1.0 / tr))
    }

    pub fn pure(&mut self, dim: usize) -> DensityMatrix {
        let psi: Vec<Complex64> = (0..dim).map(|_| self.complex_gaussian()).collect();
        DensityMatrix::pure(&psi).expect("nonzero gaussian vector")
    }

    pub fn unitary(&mut self, dim: usize) -> Mat<Complex64> {
        let h = self.hermitian(dim);
        eigh(&h).expect("hermitian by construction").eigenvectors()
    }

    /// Uniform draw from the probability simplex.
    pub fn probability_vector(&mut self, dim: usize) -> Vec<f64> {
        let w: Vec<f64> = (0..dim).map(|_| self.complex_gaussian().norm_sqr()).collect();
        let total: f64 = w.iter().sum();
        w.into_iter().map(|x| x / total).collect()
    }

    /// Probability vector supported on the first `support` entries.
    pub fn probability_vector_with_support(&mut self, dim: usize, support: usize) -> Vec<f64> {
        let head = self.probability_vector(support);
        let mut p = vec![0.0; dim];
        p[..support].copy_from_slice(&head);
        p
    }

    pub fn diagonal_density(&mut self, dim: usize) -> DensityMatrix {
        let p = self.probability_vector(dim);
        DensityMatrix::from_spectrum(&p).expect("simplex point")
    }

    pub fn povm(&mut self, dim: usize, outcomes: usize) -> Povm {
        assert!(outcomes >= 1 && outcomes <= dim);
        let u = self.unitary(dim);
        let mut elements = vec![Mat::<Complex64>::zeros(dim, dim); outcomes];
        for col in 0..dim {
            let e = &mut elements[col % outcomes];
            for j in 0..dim {
                for i in 0..dim {
                    e[(i, j)] += u[(i, col)] * u[(j, col)].conj();
                }
            }
        }
        let elements = elements.into_iter().map(HermitianOperator::hermitize).collect();
        Povm::new(elements).expect("projectors onto an orthonormal basis")
    }

    /// Random nonempty set of distinct binary words of length `n`.
    pub fn codebook(&mut self, n: usize, max_words: usize) -> Codebook {
        let total = 1usize << n;
        let size = 1 + self.below(max_words.min(total));
        let mut chosen = std::collections::BTreeSet::new();
        while chosen.len() < size {
            chosen.insert(self.below(total));
        }
        let words = chosen
            .into_iter()
            .map(|bits| Word::new((0..n).map(|i| ((bits >> (n - 1 - i)) & 1) as u8).collect()).unwrap())
            .collect();
        Codebook::new(n, words).expect("distinct words of equal length")
    }
}
