//! Dense real matrices and the JSON matrix document.
//!
//! A matrix document is `{"rows": r, "cols": c, "data": [...]}` with `data`
//! holding `r * c` finite numbers in row-major order.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dense real matrix carrying every operand of the library.
pub type Mat = DMatrix<f64>;

/// On-disk representation of a [`Mat`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixDoc {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

impl MatrixDoc {
    pub fn from_mat(m: &Mat) -> Self {
        let mut data = Vec::with_capacity(m.nrows() * m.ncols());
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                data.push(m[(i, j)]);
            }
        }
        Self {
            rows: m.nrows(),
            cols: m.ncols(),
            data,
        }
    }

    /// Validates dimensions and finiteness, then builds the matrix.
    pub fn to_mat(&self) -> Result<Mat> {
        if self.rows == 0 || self.cols == 0 {
            return Err(Error::DimensionError(format!(
                "matrix document declares {}x{}, both must be positive",
                self.rows, self.cols
            )));
        }
        if self.data.len() != self.rows * self.cols {
            return Err(Error::DimensionError(format!(
                "matrix document declares {}x{} but holds {} entries",
                self.rows,
                self.cols,
                self.data.len()
            )));
        }
        let m = Mat::from_row_slice(self.rows, self.cols, &self.data);
        check_finite(&m)?;
        Ok(m)
    }
}

impl From<&Mat> for MatrixDoc {
    fn from(m: &Mat) -> Self {
        Self::from_mat(m)
    }
}

/// Serde adapter so that structs can hold a [`Mat`] field encoded as a [`MatrixDoc`].
pub mod serde_mat {
    use super::{Mat, MatrixDoc};
    use serde::{de::Error as _, Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(m: &Mat, s: S) -> Result<S::Ok, S::Error> {
        MatrixDoc::from_mat(m).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Mat, D::Error> {
        let doc = MatrixDoc::deserialize(d)?;
        doc.to_mat().map_err(D::Error::custom)
    }
}

pub fn parse_matrix(text: &str) -> Result<Mat> {
    let doc: MatrixDoc = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    doc.to_mat()
}

pub fn check_finite(m: &Mat) -> Result<()> {
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            if !m[(i, j)].is_finite() {
                return Err(Error::NonFinite { row: i, col: j });
            }
        }
    }
    Ok(())
}

/// Returns the mode count `n` of a square `2n x 2n` matrix.
pub fn half_dim(m: &Mat) -> Result<usize> {
    if m.nrows() != m.ncols() {
        return Err(Error::DimensionError(format!(
            "expected a square matrix, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    if m.nrows() == 0 || !m.nrows().is_multiple_of(2) {
        return Err(Error::DimensionError(format!(
            "expected even positive dimension, got {}",
            m.nrows()
        )));
    }
    Ok(m.nrows() / 2)
}

/// Block-diagonal assembly `a ⊕ b`.
pub fn direct_sum(a: &Mat, b: &Mat) -> Mat {
    let (ra, ca) = a.shape();
    let (rb, cb) = b.shape();
    let mut out = Mat::zeros(ra + rb, ca + cb);
    out.view_mut((0, 0), (ra, ca)).copy_from(a);
    out.view_mut((ra, ca), (rb, cb)).copy_from(b);
    out
}

/// Frobenius norm of `m - m^T`.
pub fn asymmetry(m: &Mat) -> f64 {
    (m - m.transpose()).norm()
}

pub fn symmetrize(m: &Mat) -> Mat {
    (m + m.transpose()) * 0.5
}

/// Fails with `NotSymmetric` unless `‖m - mᵀ‖ ≤ rel · max(1, ‖m‖)`.
pub(crate) fn require_symmetric(m: &Mat, rel: f64) -> Result<()> {
    let asym = asymmetry(m);
    let bound = rel * m.norm().max(1.0);
    if asym > bound {
        return Err(Error::NotSymmetric {
            asymmetry: asym,
            bound,
        });
    }
    Ok(())
}
