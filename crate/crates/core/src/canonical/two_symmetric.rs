//! Factorization of a real square matrix into two real symmetric factors.
//!
//! A symmetric `T` with `MᵀT = TM` gives `A = T⁻¹`, `B = TM` (symmetric
//! because `(TM)ᵀ = MᵀT = TM`), and `AB = M`. Such `T` form a linear space of
//! dimension at least `n`; a random element of it is nonsingular for
//! nonsingular `M` with probability one.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg;
use crate::mat::{asymmetry, check_finite, serde_mat, symmetrize, Mat};
use crate::tol::Tolerances;

/// Draws before giving up on finding a nonsingular intertwiner.
pub const MAX_DRAWS: usize = 64;
/// Draws compared before settling on the best-conditioned candidate.
const CANDIDATES: usize = 8;
/// Reciprocal condition an intertwiner must reach to be accepted.
pub const MIN_FACTOR_RCOND: f64 = 1e-10;

#[derive(Debug, Clone, Serialize)]
pub struct TwoSymmetricFactors {
    #[serde(with = "serde_mat")]
    pub a: Mat,
    #[serde(with = "serde_mat")]
    pub b: Mat,
    /// `‖AB - M‖_F / ‖M‖_F`.
    pub residual: f64,
}

pub fn factor_two_symmetric(m: &Mat, seed: u64) -> Result<TwoSymmetricFactors> {
    factor_two_symmetric_with(m, seed, &Tolerances::default())
}

pub fn factor_two_symmetric_with(
    m: &Mat,
    seed: u64,
    tol: &Tolerances,
) -> Result<TwoSymmetricFactors> {
    tol.validate()?;
    let n = m.nrows();
    if n == 0 || m.ncols() != n {
        return Err(Error::DimensionError(format!(
            "factor_two_symmetric needs a nonempty square matrix, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    check_finite(m)?;
    let norm = m.norm();
    if norm == 0.0 {
        return Err(Error::SingularInput("zero matrix".into()));
    }

    if asymmetry(m) <= 1e-14 * norm {
        let b = symmetrize(m);
        let residual = (&b - m).norm() / norm;
        return Ok(TwoSymmetricFactors {
            a: Mat::identity(n, n),
            b,
            residual,
        });
    }

    let basis = intertwiner_basis(&(m / norm))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<(f64, Mat)> = None;
    for draw in 0..MAX_DRAWS {
        let mut t = Mat::zeros(n, n);
        for b in &basis {
            let c: f64 = StandardNormal.sample(&mut rng);
            t += b * c;
        }
        let rc = linalg::rcond(&t)?;
        if best.as_ref().is_none_or(|(r, _)| rc > *r) {
            best = Some((rc, t));
        }
        let best_rc = best.as_ref().map_or(0.0, |(r, _)| *r);
        if draw + 1 >= CANDIDATES && best_rc >= MIN_FACTOR_RCOND {
            break;
        }
    }
    let (rc, t) = best.expect("at least one draw");
    if rc < MIN_FACTOR_RCOND {
        return Err(Error::NoNonsingularFactor {
            draws: MAX_DRAWS,
            best_rcond: rc,
        });
    }

    let a = symmetrize(&linalg::guarded_inverse(
        &t,
        MIN_FACTOR_RCOND,
        "intertwiner",
    )?);
    let b = symmetrize(&(&t * m));
    let residual = (&a * &b - m).norm() / norm;
    if residual > tol.residual_tol {
        let m_rcond = linalg::rcond(m)?;
        if m_rcond < 1e-12 {
            return Err(Error::SingularInput(format!(
                "M has reciprocal condition {m_rcond:e}; factor residual {residual:e}"
            )));
        }
        return Err(Error::ResidualContract {
            what: "two-symmetric factorization",
            value: residual,
            bound: tol.residual_tol,
        });
    }
    Ok(TwoSymmetricFactors { a, b, residual })
}

/// Basis of symmetric `T` solving `MᵀT - TM = 0` (numerically: the right
/// singular vectors of the linear map with the smallest singular values).
fn intertwiner_basis(m: &Mat) -> Result<Vec<Mat>> {
    let n = m.nrows();
    let mut units = Vec::with_capacity(n * (n + 1) / 2);
    for i in 0..n {
        for j in i..n {
            let mut e = Mat::zeros(n, n);
            e[(i, j)] = 1.0;
            e[(j, i)] = 1.0;
            if i != j {
                e /= std::f64::consts::SQRT_2;
            }
            units.push(e);
        }
    }
    let p = units.len();
    let mut op = Mat::zeros(n * n, p);
    for (k, e) in units.iter().enumerate() {
        let img = m.transpose() * e - e * m;
        for (r, v) in img.iter().enumerate() {
            op[(r, k)] = *v;
        }
    }
    let (_, sv) = linalg::null_space(&op, 0)?;
    let smax = sv.last().copied().unwrap_or(0.0);
    let cutoff = 1e-12 * smax.max(1.0) * (n as f64);
    let dim = sv.iter().filter(|s| **s <= cutoff).count().max(n).min(p);
    let (null, _) = linalg::null_space(&op, dim)?;
    Ok((0..dim)
        .map(|c| {
            let mut t = Mat::zeros(n, n);
            for (k, e) in units.iter().enumerate() {
                t += e * null[(k, c)];
            }
            t
        })
        .collect())
}
