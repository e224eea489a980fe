//! The symplectic form and the group `Sp(2n)`.
//!
//! Phase-space coordinates are ordered `(P₁..Pₙ, Q₁..Qₙ)` everywhere in the
//! crate, so the form is `σ = [[0, -1ₙ], [1ₙ, 0]]` and `S` is symplectic when
//! `SσSᵀ = σ`.

use nalgebra::DVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg;
use crate::mat::{direct_sum, half_dim, Mat};
use crate::tol::Tolerances;

/// Reciprocal condition below which [`gl_embed`] treats its argument as singular.
pub const GL_MIN_RCOND: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticForm {
    pub n: usize,
    pub matrix: Mat,
}

pub fn symplectic_form(n: usize) -> Result<SymplecticForm> {
    if n == 0 {
        return Err(Error::DimensionError("mode count must be positive".into()));
    }
    Ok(SymplecticForm {
        n,
        matrix: sigma(n),
    })
}

/// `σ` for `n` modes; `n = 0` yields an empty matrix.
pub fn sigma(n: usize) -> Mat {
    let mut s = Mat::zeros(2 * n, 2 * n);
    for k in 0..n {
        s[(k, n + k)] = -1.0;
        s[(n + k, k)] = 1.0;
    }
    s
}

/// `‖SσSᵀ - σ‖_F` without any normalization.
pub fn symplectic_residual(s: &Mat) -> Result<f64> {
    let n = half_dim(s)?;
    let sg = sigma(n);
    Ok((s * &sg * s.transpose() - sg).norm())
}

/// Residual divided by `max(1, ‖S‖_F²)`, the quantity compared against
/// `residual_tol`.
pub fn normalized_symplectic_residual(s: &Mat) -> Result<f64> {
    Ok(symplectic_residual(s)? / s.norm_squared().max(1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SymplecticCheck {
    pub residual: f64,
    pub verdict: bool,
}

pub fn is_symplectic(s: &Mat, tol: &Tolerances) -> Result<SymplecticCheck> {
    let residual = symplectic_residual(s)?;
    let verdict = residual <= tol.residual_tol * s.norm_squared().max(1.0);
    Ok(SymplecticCheck { residual, verdict })
}

/// Embeds `GL(n)` into `Sp(2n)` as `G⁻¹ ⊕ Gᵀ`.
///
/// The map is an anti-homomorphism: `gl_embed(G)·gl_embed(H) = gl_embed(HG)`.
pub fn gl_embed(g: &Mat) -> Result<Mat> {
    if g.nrows() != g.ncols() || g.nrows() == 0 {
        return Err(Error::DimensionError(format!(
            "gl_embed needs a nonempty square matrix, got {}x{}",
            g.nrows(),
            g.ncols()
        )));
    }
    crate::mat::check_finite(g)?;
    let inv = linalg::guarded_inverse(g, GL_MIN_RCOND, "gl_embed argument")?;
    Ok(direct_sum(&inv, &g.transpose()))
}

/// Lower shear `[[1, 0], [Z, 1]]`, symplectic for symmetric `Z`.
pub(crate) fn lower_shear(z: &Mat) -> Mat {
    let n = z.nrows();
    let mut m = Mat::identity(2 * n, 2 * n);
    m.view_mut((n, 0), (n, n)).copy_from(z);
    m
}

/// Upper shear `[[1, Z], [0, 1]]`, symplectic for symmetric `Z`.
pub(crate) fn upper_shear(z: &Mat) -> Mat {
    let n = z.nrows();
    let mut m = Mat::identity(2 * n, 2 * n);
    m.view_mut((0, n), (n, n)).copy_from(z);
    m
}

pub(crate) fn normal_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Mat {
    Mat::from_fn(rows, cols, |_, _| StandardNormal.sample(rng))
}

fn random_symmetric(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> Mat {
    let z = normal_matrix(rng, n, n);
    (&z + z.transpose()) * (0.5 * scale / (n as f64).sqrt())
}

/// Well-conditioned random element of `GL(n)`: orthogonal times a
/// log-normal diagonal.
fn random_gl(rng: &mut ChaCha8Rng, n: usize) -> Mat {
    let q = normal_matrix(rng, n, n).qr().q();
    let d = DVector::from_fn(n, |_, _| {
        let z: f64 = StandardNormal.sample(rng);
        (0.4 * z).exp()
    });
    q * Mat::from_diagonal(&d)
}

/// Deterministic pseudo-random symplectic matrix.
///
/// Products of `GL(n)` embeddings, upper and lower symmetric shears and `σ`
/// generate all of `Sp(2n)`; the sample mixes each family.
pub fn random_symplectic(n: usize, seed: u64) -> Mat {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_symplectic_with(&mut rng, n)
}

pub(crate) fn random_symplectic_with(rng: &mut ChaCha8Rng, n: usize) -> Mat {
    let embed = |g: &Mat| {
        let inv = g.clone().try_inverse().expect("random_gl is invertible");
        direct_sum(&inv, &g.transpose())
    };
    let g1 = random_gl(rng, n);
    let z1 = random_symmetric(rng, n, 0.6);
    let z2 = random_symmetric(rng, n, 0.6);
    let g2 = random_gl(rng, n);
    let sg = sigma(n);
    embed(&g1) * lower_shear(&z1) * &sg * upper_shear(&z2) * embed(&g2)
}
