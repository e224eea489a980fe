//! Canonical form under symplectic equivalence: `S₁XS₂ = 1ₙ ⊕ J`.
//!
//! [`decompose`] follows a constructive chain whose stages are exposed on
//! their own:
//!
//! 1. `Σ = XσXᵀσᵀ`;
//! 2. [`block_diagonalize_skew_hamiltonian`]: `SΣS⁻¹ = -(M ⊕ Mᵀ)`;
//! 3. [`factor_two_symmetric`]: `M = AB` with `A, B` symmetric;
//! 4. `W = [[0, A], [B, 0]]` and `S' = (SX)⁻¹W`, which is symplectic because
//!    `(SX)σ(SX)ᵀσ = W²`;
//! 5. `(A⁻¹ ⊕ Aᵀ)·W·σ = 1 ⊕ (-AᵀB)`;
//! 6. a real Jordan similarity `J = G(-AᵀB)G⁻¹`, applied through the
//!    `GL(n)` embedding of `Gᵀ`.
//!
//! Only `N = 1 ⊕ J` is canonical; the factors `S₁, S₂` are not.

mod jordan;
mod skew_hamiltonian;
mod two_symmetric;
mod williamson;

use serde::{Deserialize, Serialize};

pub use jordan::{assemble_j, CanonicalBlock};
pub use skew_hamiltonian::{block_diagonalize_skew_hamiltonian, SkewHamiltonianBlocks};
pub use two_symmetric::{
    factor_two_symmetric, factor_two_symmetric_with, TwoSymmetricFactors, MAX_DRAWS,
    MIN_FACTOR_RCOND,
};
pub use williamson::{williamson, WilliamsonResult};

use crate::error::{Error, Result};
use crate::invariants::{invariants, multiset_distance, InvariantKind, InvariantSpectrum};
use crate::linalg::{self, C64};
use crate::mat::{check_finite, direct_sum, half_dim, serde_mat, Mat};
use crate::symplectic::{gl_embed, normalized_symplectic_residual, sigma};
use crate::tol::Tolerances;

/// Reciprocal condition below which `X` counts as singular.
pub const MIN_INPUT_RCOND: f64 = 1e-12;
/// Relative tolerance between the block spectrum and the invariants of `X`.
pub const SPECTRUM_MATCH_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CanonicalBlocks {
    pub n: usize,
    pub blocks: Vec<CanonicalBlock>,
    /// `N = 1ₙ ⊕ J`.
    #[serde(rename = "N", with = "serde_mat")]
    pub assembled: Mat,
}

impl CanonicalBlocks {
    pub fn from_blocks(blocks: Vec<CanonicalBlock>) -> Self {
        let j = assemble_j(&blocks);
        let n = j.nrows();
        Self {
            n,
            blocks,
            assembled: direct_sum(&Mat::identity(n, n), &j),
        }
    }

    /// `J`, the lower-right block of `N`.
    pub fn j(&self) -> Mat {
        self.assembled
            .view((self.n, self.n), (self.n, self.n))
            .into_owned()
    }

    /// The `n` invariants carried by the blocks (conjugates included).
    pub fn lambdas(&self) -> Vec<C64> {
        let mut out = Vec::with_capacity(self.n);
        for b in &self.blocks {
            match *b {
                CanonicalBlock::Real { lambda } => out.push(C64::new(lambda, 0.0)),
                CanonicalBlock::ComplexPair { a, b } => {
                    out.push(C64::new(a, b));
                    out.push(C64::new(a, -b));
                }
            }
        }
        out
    }
}

/// Builds `1 ⊕ J` directly from an invariant spectrum.
pub fn canonical_from_invariants(spec: &InvariantSpectrum) -> CanonicalBlocks {
    let blocks = spec
        .values
        .iter()
        .map(|v| match v.kind {
            InvariantKind::Real => CanonicalBlock::Real { lambda: v.re },
            InvariantKind::ComplexPair => CanonicalBlock::ComplexPair { a: v.re, b: v.im },
        })
        .collect();
    CanonicalBlocks::from_blocks(blocks)
}

#[derive(Debug, Clone, Serialize)]
pub struct Decomposition {
    #[serde(rename = "S1", with = "serde_mat")]
    pub s1: Mat,
    #[serde(rename = "S2", with = "serde_mat")]
    pub s2: Mat,
    #[serde(flatten)]
    pub blocks: CanonicalBlocks,
    /// `‖S₁XS₂ - N‖_F / (‖S₁‖‖X‖‖S₂‖)`.
    pub recon_residual: f64,
    /// Symplecticity residuals normalized by `max(1, ‖S‖²)`.
    pub s1_residual: f64,
    pub s2_residual: f64,
    /// Symplecticity residual of the intermediate `S' = (SX)⁻¹W`.
    pub witness_residual: f64,
}

pub fn decompose(x: &Mat, tol: &Tolerances, seed: u64) -> Result<Decomposition> {
    tol.validate()?;
    let n = half_dim(x)?;
    check_finite(x)?;
    let rc = linalg::rcond(x)?;
    if !(rc >= MIN_INPUT_RCOND) {
        return Err(Error::SingularInput(format!(
            "X has reciprocal condition {rc:e} < {MIN_INPUT_RCOND:e}"
        )));
    }
    let sg = sigma(n);

    let sig = crate::invariants::sigma_matrix(x)?;
    let (bd, clustering) = skew_hamiltonian::block_diagonalize(&sig, tol)?;
    let factors = factor_two_symmetric_with(&bd.m, seed, tol)?;
    let (a, b) = (&factors.a, &factors.b);

    let mut w = Mat::zeros(2 * n, 2 * n);
    w.view_mut((0, n), (n, n)).copy_from(a);
    w.view_mut((n, 0), (n, n)).copy_from(b);
    let sx = &bd.s * x;
    let s_prime = sx
        .clone()
        .lu()
        .solve(&w)
        .ok_or_else(|| Error::SingularInput("SX is not invertible".into()))?;
    let witness_residual = normalized_symplectic_residual(&s_prime)?;
    debug_assert!(
        witness_residual <= 1e-4,
        "S' far from symplectic: {witness_residual:e}"
    );

    let k = -(a.transpose() * b);
    let rj = jordan::real_jordan(&k, tol)?;
    let outer = gl_embed(&rj.g.transpose())?;
    let outer_inv = direct_sum(&rj.g.transpose(), &rj.v);

    let s1 = &outer * gl_embed(a)? * &bd.s;
    let s2 = &s_prime * &sg * &outer_inv;
    let blocks = CanonicalBlocks::from_blocks(rj.blocks);

    let recon_residual =
        (&s1 * x * &s2 - &blocks.assembled).norm() / (s1.norm() * x.norm() * s2.norm());
    let s1_residual = normalized_symplectic_residual(&s1)?;
    let s2_residual = normalized_symplectic_residual(&s2)?;
    for (what, value) in [
        ("reconstruction", recon_residual),
        ("S1 symplecticity", s1_residual),
        ("S2 symplecticity", s2_residual),
    ] {
        if !(value <= tol.residual_tol) {
            return Err(Error::ResidualContract {
                what,
                value,
                bound: tol.residual_tol,
            });
        }
    }
    let expected: Vec<C64> = clustering
        .clusters
        .iter()
        .flat_map(|c| {
            let vals = if c.value.im == 0.0 {
                vec![c.value]
            } else {
                vec![c.value, c.value.conj()]
            };
            std::iter::repeat_n(vals, c.copies).flatten()
        })
        .collect();
    let mismatch = multiset_distance(&blocks.lambdas(), &expected) / clustering.scale;
    if !(mismatch <= SPECTRUM_MATCH_TOL) {
        return Err(Error::ResidualContract {
            what: "block spectrum",
            value: mismatch,
            bound: SPECTRUM_MATCH_TOL,
        });
    }

    Ok(Decomposition {
        s1,
        s2,
        blocks,
        recon_residual,
        s1_residual,
        s2_residual,
        witness_residual,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Verification {
    pub recon: f64,
    pub s1: f64,
    pub s2: f64,
    pub spectrum_match: f64,
    pub verdict: bool,
}

/// Recomputes every residual of `d` against `x` from scratch.
pub fn verify_decomposition(x: &Mat, d: &Decomposition, tol: &Tolerances) -> Result<Verification> {
    tol.validate()?;
    let n = half_dim(x)?;
    for (name, m) in [("S1", &d.s1), ("S2", &d.s2), ("N", &d.blocks.assembled)] {
        if m.shape() != (2 * n, 2 * n) {
            return Err(Error::DimensionError(format!(
                "{name} is {}x{}, expected {}x{}",
                m.nrows(),
                m.ncols(),
                2 * n,
                2 * n
            )));
        }
    }
    let n_mat = direct_sum(&Mat::identity(n, n), &assemble_j(&d.blocks.blocks));
    let denom = d.s1.norm() * x.norm() * d.s2.norm();
    let recon = (&d.s1 * x * &d.s2 - n_mat).norm() / denom;
    let s1 = normalized_symplectic_residual(&d.s1)?;
    let s2 = normalized_symplectic_residual(&d.s2)?;
    let spec = invariants(x, tol)?;
    let spectrum_match = multiset_distance(&d.blocks.lambdas(), &spec.lambdas()) / spec.scale();
    let verdict = recon <= tol.residual_tol
        && s1 <= tol.residual_tol
        && s2 <= tol.residual_tol
        && spectrum_match <= SPECTRUM_MATCH_TOL;
    Ok(Verification {
        recon,
        s1,
        s2,
        spectrum_match,
        verdict,
    })
}
