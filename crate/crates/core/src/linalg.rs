//! Thin wrappers over the nalgebra decompositions used throughout the crate.

use nalgebra::{Complex, DMatrix, DVector, Schur, SymmetricEigen, SVD};

use crate::error::{Error, Result};
use crate::mat::Mat;

pub type C64 = Complex<f64>;
pub type CMat = DMatrix<C64>;

const MAX_SWEEPS_PER_DIM: usize = 2_000;

pub(crate) fn eigenvalues(m: &Mat) -> Result<Vec<C64>> {
    // A deflation threshold of one ulp can stall on tightly clustered
    // eigenvalues, so retry with slightly looser ones before giving up.
    let schur = [1.0, 4.0, 16.0, 64.0]
        .iter()
        .find_map(|k| {
            Schur::try_new(
                m.clone(),
                k * f64::EPSILON,
                MAX_SWEEPS_PER_DIM * m.nrows().max(1),
            )
        })
        .ok_or_else(|| {
            Error::EigenFailure(format!(
                "Schur iteration did not converge ({}x{})",
                m.nrows(),
                m.ncols()
            ))
        })?;
    let (_, t) = schur.unpack();
    let values = quasi_triangular_eigenvalues(&t);
    if values
        .iter()
        .any(|z| !z.re.is_finite() || !z.im.is_finite())
    {
        return Err(Error::EigenFailure("non-finite eigenvalue".into()));
    }
    Ok(values)
}

// nalgebra assumes every surviving 2x2 block has a negative discriminant, which
// rounding can violate for a nearly double real eigenvalue (the result is NaN).
fn quasi_triangular_eigenvalues(t: &Mat) -> Vec<C64> {
    let dim = t.nrows();
    let mut out = Vec::with_capacity(dim);
    let mut m = 0;
    while m < dim {
        if m + 1 == dim || t[(m + 1, m)] == 0.0 {
            out.push(C64::new(t[(m, m)], 0.0));
            m += 1;
            continue;
        }
        let (a, b, c, d) = (t[(m, m)], t[(m, m + 1)], t[(m + 1, m)], t[(m + 1, m + 1)]);
        let half_tr = 0.5 * (a + d);
        let half_diff = 0.5 * (a - d);
        let discr = half_diff * half_diff + b * c;
        if discr >= 0.0 {
            let r = discr.sqrt();
            out.push(C64::new(half_tr + r, 0.0));
            out.push(C64::new(half_tr - r, 0.0));
        } else {
            let r = (-discr).sqrt();
            out.push(C64::new(half_tr, r));
            out.push(C64::new(half_tr, -r));
        }
        m += 2;
    }
    out
}

pub(crate) fn symmetric_eigen(m: &Mat) -> Result<SymmetricEigen<f64, nalgebra::Dyn>> {
    SymmetricEigen::try_new(
        m.clone(),
        f64::EPSILON,
        MAX_SWEEPS_PER_DIM * m.nrows().max(1),
    )
    .ok_or_else(|| Error::EigenFailure("symmetric eigensolver did not converge".into()))
}

pub(crate) fn hermitian_eigen(m: &CMat) -> Result<SymmetricEigen<C64, nalgebra::Dyn>> {
    SymmetricEigen::try_new(
        m.clone(),
        f64::EPSILON,
        MAX_SWEEPS_PER_DIM * m.nrows().max(1),
    )
    .ok_or_else(|| Error::EigenFailure("Hermitian eigensolver did not converge".into()))
}

pub(crate) fn singular_values(m: &Mat) -> Result<DVector<f64>> {
    SVD::try_new(
        m.clone(),
        false,
        false,
        f64::EPSILON,
        MAX_SWEEPS_PER_DIM * m.nrows().max(1),
    )
    .map(|s| s.singular_values)
    .ok_or_else(|| Error::EigenFailure("SVD did not converge".into()))
}

/// Reciprocal 2-norm condition number `σ_min / σ_max` (0 for the zero matrix).
pub(crate) fn rcond(m: &Mat) -> Result<f64> {
    let s = singular_values(m)?;
    let max = s.max();
    if max == 0.0 {
        return Ok(0.0);
    }
    Ok(s.min() / max)
}

/// Inverse of `m`, refusing matrices whose reciprocal condition is below `min_rcond`.
pub(crate) fn guarded_inverse(m: &Mat, min_rcond: f64, what: &str) -> Result<Mat> {
    let rc = rcond(m)?;
    if !(rc >= min_rcond) {
        return Err(Error::SingularInput(format!(
            "{what} has reciprocal condition {rc:e} < {min_rcond:e}"
        )));
    }
    m.clone()
        .try_inverse()
        .ok_or_else(|| Error::SingularInput(format!("{what} is not invertible")))
}

/// Right null space estimate: the `dim` right singular vectors with the
/// smallest singular values, plus all singular values in ascending order.
pub(crate) fn null_space(m: &Mat, dim: usize) -> Result<(Mat, Vec<f64>)> {
    let cols = m.ncols();
    let svd = SVD::try_new(
        m.clone(),
        false,
        true,
        f64::EPSILON,
        MAX_SWEEPS_PER_DIM * cols.max(1),
    )
    .ok_or_else(|| Error::EigenFailure("SVD did not converge".into()))?;
    let v_t = svd.v_t.expect("v requested");
    let k = svd.singular_values.len();
    debug_assert!(dim <= k && k == cols);
    let mut basis = Mat::zeros(cols, dim);
    for (slot, row) in (k - dim..k).enumerate() {
        basis.set_column(slot, &v_t.row(row).transpose());
    }
    let mut sv: Vec<f64> = svd.singular_values.iter().copied().collect();
    sv.reverse();
    Ok((basis, sv))
}

/// Complex analogue of [`null_space`].
pub(crate) fn null_space_complex(m: &CMat, dim: usize) -> Result<(CMat, Vec<f64>)> {
    let cols = m.ncols();
    let svd = SVD::try_new(
        m.clone(),
        false,
        true,
        f64::EPSILON,
        MAX_SWEEPS_PER_DIM * cols.max(1),
    )
    .ok_or_else(|| Error::EigenFailure("complex SVD did not converge".into()))?;
    let v_t = svd.v_t.expect("v requested");
    let k = svd.singular_values.len();
    debug_assert!(dim <= k && k == cols);
    let mut basis = CMat::zeros(cols, dim);
    for (slot, row) in (k - dim..k).enumerate() {
        basis.set_column(slot, &v_t.row(row).adjoint());
    }
    let mut sv: Vec<f64> = svd.singular_values.iter().copied().collect();
    sv.reverse();
    Ok((basis, sv))
}

pub(crate) fn to_complex(m: &Mat) -> CMat {
    m.map(|v| C64::new(v, 0.0))
}

/// Smallest eigenvalue of the Hermitian matrix `sym + i·antisym`, computed on
/// the real symmetric embedding `[[sym, -antisym], [antisym, sym]]`.
pub(crate) fn hermitian_min_eig(sym: &Mat, antisym: &Mat) -> Result<f64> {
    let k = sym.nrows();
    let mut emb = Mat::zeros(2 * k, 2 * k);
    emb.view_mut((0, 0), (k, k)).copy_from(sym);
    emb.view_mut((k, k), (k, k)).copy_from(sym);
    emb.view_mut((0, k), (k, k)).copy_from(&(-antisym));
    emb.view_mut((k, 0), (k, k)).copy_from(antisym);
    let emb = crate::mat::symmetrize(&emb);
    let eig = symmetric_eigen(&emb)?;
    Ok(eig.eigenvalues.min())
}

/// Symmetric square root of a symmetric positive definite matrix.
pub(crate) fn spd_sqrt_and_inverse(m: &Mat) -> Result<(Mat, Mat)> {
    let eig = symmetric_eigen(m)?;
    let q = &eig.eigenvectors;
    let sqrt = DVector::from_iterator(
        eig.eigenvalues.len(),
        eig.eigenvalues.iter().map(|v| v.sqrt()),
    );
    let inv_sqrt = sqrt.map(|v| 1.0 / v);
    let r = q * Mat::from_diagonal(&sqrt) * q.transpose();
    let r_inv = q * Mat::from_diagonal(&inv_sqrt) * q.transpose();
    Ok((crate::mat::symmetrize(&r), crate::mat::symmetrize(&r_inv)))
}

/// Index of the entry with the largest modulus.
pub(crate) fn argmax_modulus(v: impl Iterator<Item = f64>) -> usize {
    let mut best = 0;
    let mut best_val: f64 = -1.0;
    for (i, x) in v.enumerate() {
        // Near-ties resolve to the lower index so that rounding noise cannot
        // flip the choice.
        if x > best_val + 1e-12 * best_val.abs() {
            best = i;
            best_val = x;
        }
    }
    best
}
