//! Numerics for the entropy of symmetrized density-matrix mixtures and its
//! reading as a capacity per unit cost of a binary classical-quantum channel.
//!
//! * [`matcore`]: dense Hermitian algebra (tensor products, eigendecomposition,
//!   matrix functions, support projections).
//! * [`entropy`]: von Neumann, Umegaki and Belavkin–Staszewski entropies.
//! * [`mixture`]: the mixtures `R_{m,n}` and their entropy gap.
//! * [`commuting`]: exact closed forms for commuting pairs.
//! * [`cqchannel`]: Holevo quantities, measurements and codebooks.
//! * [`stein`]: Neyman–Pearson tests on tensor powers.
//! * [`codesim`]: repetition codes with position-wise decoding.
//! * [`cli`]: the batch experiment runner behind the `mixent` binary.
//!
//! All logarithms are natural; every quantity is in nats.

pub mod cli;
pub mod codesim;
pub mod commuting;
pub mod cqchannel;
pub mod entropy;
pub mod error;
pub mod matcore;
pub mod mixture;
pub mod random;
pub mod stein;

pub use error::{Error, Result};
