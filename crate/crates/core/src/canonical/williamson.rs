//! Williamson normal-mode decomposition `SXSᵀ = diag(ν, ν)` of symmetric
//! positive definite matrices.
//!
//! With `R = X^{1/2}`, the antisymmetric matrix `RσR` has an orthogonal
//! normal form `Oᵀ(RσR)O = [[0, -Δ], [Δ, 0]]`; then `S = (Δ ⊕ Δ)^{1/2}OᵀR⁻¹`
//! is symplectic and `SXSᵀ = Δ ⊕ Δ`. `O` is read off the eigenvectors of the
//! Hermitian matrix `i·RσR` for its positive eigenvalues `ν_k`.

use nalgebra::DVector;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg;
use crate::mat::{check_finite, half_dim, require_symmetric, serde_mat, Mat};
use crate::symplectic::sigma;
use crate::tol::Tolerances;

/// Relative symmetry tolerance accepted on input.
pub const SYMMETRY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Serialize)]
pub struct WilliamsonResult {
    #[serde(rename = "S", with = "serde_mat")]
    pub s: Mat,
    /// Symplectic eigenvalues, descending.
    pub nu: Vec<f64>,
    /// Mean occupation `(ν_k - 1) / 2` per mode (vacuum covariance is `1`).
    pub occupations: Vec<f64>,
    /// `‖SXSᵀ - diag(ν, ν)‖_F / ‖X‖_F`.
    pub residual: f64,
}

pub fn williamson(x: &Mat, tol: &Tolerances) -> Result<WilliamsonResult> {
    tol.validate()?;
    let n = half_dim(x)?;
    check_finite(x)?;
    require_symmetric(x, SYMMETRY_TOL)?;
    let xs = crate::mat::symmetrize(x);
    let scale = xs.norm();
    let eig = linalg::symmetric_eigen(&xs)?;
    let min_eig = eig.eigenvalues.min();
    if !(min_eig > tol.psd_tol * scale) {
        return Err(Error::NotPositiveDefinite { min_eig });
    }

    let (r, r_inv) = linalg::spd_sqrt_and_inverse(&xs)?;
    let omega = &r * sigma(n) * &r;
    let herm = omega.map(|v| linalg::C64::new(0.0, v));
    let heig = linalg::hermitian_eigen(&herm)?;

    let mut order: Vec<usize> = (0..2 * n).collect();
    order.sort_by(|&a, &b| heig.eigenvalues[b].total_cmp(&heig.eigenvalues[a]));
    let positive = &order[..n];

    let r2 = std::f64::consts::SQRT_2;
    let mut o = Mat::zeros(2 * n, 2 * n);
    let mut nu = Vec::with_capacity(n);
    for (slot, &idx) in positive.iter().enumerate() {
        let d = heig.eigenvalues[idx];
        if !(d > 0.0) {
            return Err(Error::NotPositiveDefinite { min_eig });
        }
        let z = heig.eigenvectors.column(idx);
        o.set_column(slot, &z.map(|c| r2 * c.re));
        o.set_column(n + slot, &z.map(|c| r2 * c.im));
        nu.push(d);
    }

    let half = DVector::from_iterator(2 * n, nu.iter().chain(nu.iter()).map(|v| v.sqrt()));
    let s = Mat::from_diagonal(&half) * o.transpose() * r_inv;
    let target = Mat::from_diagonal(&DVector::from_iterator(
        2 * n,
        nu.iter().chain(nu.iter()).copied(),
    ));
    let residual = (&s * x * s.transpose() - target).norm() / scale;
    let occupations = nu.iter().map(|v| (v - 1.0) / 2.0).collect();
    Ok(WilliamsonResult {
        s,
        nu,
        occupations,
        residual,
    })
}
