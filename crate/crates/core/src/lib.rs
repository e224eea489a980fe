//! Canonical forms of real `2n x 2n` matrices under symplectic equivalence
//! `X ↦ S₁XS₂`, their invariants, the Williamson normal-mode decomposition,
//! and two covariance-level applications: condensing bipartite correlations
//! and normalizing Gaussian channels.
//!
//! Phase-space coordinates are ordered `(P₁..Pₙ, Q₁..Qₙ)` with symplectic
//! form `σ = [[0, -1], [1, 0]]`.

#![forbid(unsafe_code)]
// `!(x <= bound)` is used on purpose so that NaN fails every check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod canonical;
pub mod error;
pub mod gaussian;
pub mod invariants;
mod linalg;
pub mod mat;
pub mod symplectic;
pub mod tol;

pub use canonical::{
    block_diagonalize_skew_hamiltonian, canonical_from_invariants, decompose, factor_two_symmetric,
    verify_decomposition, williamson, CanonicalBlock, CanonicalBlocks, Decomposition,
    SkewHamiltonianBlocks, TwoSymmetricFactors, Verification, WilliamsonResult,
};
pub use error::{Error, Result};
pub use invariants::{invariants, sigma_matrix, Invariant, InvariantKind, InvariantSpectrum};
pub use linalg::C64;
pub use mat::{direct_sum, Mat, MatrixDoc};
pub use symplectic::{
    gl_embed, is_symplectic, random_symplectic, symplectic_form, SymplecticCheck, SymplecticForm,
};
pub use tol::Tolerances;

/// Gaussian random `rows x cols` matrix, deterministic in `seed`.
pub fn random_gaussian_matrix(rows: usize, cols: usize, seed: u64) -> Mat {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    symplectic::normal_matrix(&mut rng, rows, cols)
}
