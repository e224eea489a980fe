//! Real Jordan form of a diagonalizable real matrix, `J = G K G⁻¹`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::invariants::cluster_spectrum;
use crate::linalg::{self, CMat};
use crate::mat::Mat;
use crate::symplectic::GL_MIN_RCOND;
use crate::tol::Tolerances;

/// One diagonal unit of `J`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum CanonicalBlock {
    /// A `1 x 1` entry `λ`.
    Real { lambda: f64 },
    /// The `2 x 2` entry `[[a, b], [-b, a]]` for `λ = a ± ib`, `b > 0`.
    ComplexPair { a: f64, b: f64 },
}

impl CanonicalBlock {
    pub fn slots(&self) -> usize {
        match self {
            Self::Real { .. } => 1,
            Self::ComplexPair { .. } => 2,
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct RealJordan {
    /// `G⁻¹`: eigenvector columns (real and imaginary parts for complex pairs).
    pub v: Mat,
    pub g: Mat,
    pub blocks: Vec<CanonicalBlock>,
}

/// Assembles `J` from its blocks.
pub fn assemble_j(blocks: &[CanonicalBlock]) -> Mat {
    let n: usize = blocks.iter().map(CanonicalBlock::slots).sum();
    let mut j = Mat::zeros(n, n);
    let mut k = 0;
    for b in blocks {
        match *b {
            CanonicalBlock::Real { lambda } => {
                j[(k, k)] = lambda;
                k += 1;
            }
            CanonicalBlock::ComplexPair { a, b } => {
                j[(k, k)] = a;
                j[(k, k + 1)] = b;
                j[(k + 1, k)] = -b;
                j[(k + 1, k + 1)] = a;
                k += 2;
            }
        }
    }
    j
}

/// Eigenvector-based real Jordan form; defective matrices are rejected.
pub(crate) fn real_jordan(k: &Mat, tol: &Tolerances) -> Result<RealJordan> {
    let n = k.nrows();
    let eigs = linalg::eigenvalues(k)?;
    let clustering = cluster_spectrum(&eigs, 1, tol)?;
    let null_tol = (1e-2 * tol.degeneracy_gap).max(1e3 * f64::EPSILON) * clustering.scale;

    let mut v = Mat::zeros(n, n);
    let mut blocks = Vec::with_capacity(n);
    let mut col = 0;
    for c in &clustering.clusters {
        let lambda = c.value;
        if lambda.im == 0.0 {
            let shifted = k - Mat::identity(n, n) * lambda.re;
            let (basis, sv) = linalg::null_space(&shifted, c.copies)?;
            check_semisimple(&sv, c.copies, null_tol, lambda)?;
            for j in 0..c.copies {
                let mut e = basis.column(j).into_owned();
                let i = linalg::argmax_modulus(e.iter().map(|x| x.abs()));
                if e[i] < 0.0 {
                    e = -e;
                }
                v.set_column(col, &e);
                blocks.push(CanonicalBlock::Real { lambda: lambda.re });
                col += 1;
            }
        } else {
            let shifted = linalg::to_complex(k) - CMat::identity(n, n) * lambda;
            let (basis, sv) = linalg::null_space_complex(&shifted, c.copies)?;
            check_semisimple(&sv, c.copies, null_tol, lambda)?;
            for j in 0..c.copies {
                let mut z = basis.column(j).into_owned();
                let i = linalg::argmax_modulus(z.iter().map(|x| x.norm()));
                let phase = z[i] / z[i].norm();
                z *= phase.conj();
                v.set_column(col, &z.map(|x| x.re));
                v.set_column(col + 1, &z.map(|x| x.im));
                blocks.push(CanonicalBlock::ComplexPair {
                    a: lambda.re,
                    b: lambda.im,
                });
                col += 2;
            }
        }
    }
    debug_assert_eq!(col, n);
    let g = linalg::guarded_inverse(&v, GL_MIN_RCOND, "eigenvector basis").map_err(|_| {
        Error::DegenerateSpectrum(
            "eigenvector basis is numerically singular (near-defective input)".into(),
        )
    })?;
    Ok(RealJordan { v, g, blocks })
}

fn check_semisimple(sv: &[f64], dim: usize, null_tol: f64, lambda: linalg::C64) -> Result<()> {
    if sv[dim - 1] > null_tol {
        return Err(Error::DegenerateSpectrum(format!(
            "eigenvalue {lambda} is defective (singular value {:e} > {null_tol:e})",
            sv[dim - 1]
        )));
    }
    Ok(())
}
