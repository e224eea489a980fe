//! Symplectic block diagonalization of skew-Hamiltonian matrices,
//! `SΣS⁻¹ = -(M ⊕ Mᵀ)`.
//!
//! `Σ` is self-adjoint for the bilinear form `ω(x, y) = xᵀσy`, so eigenspaces
//! belonging to different eigenvalues are ω-orthogonal. A symplectic basis of
//! each (doubled) eigenspace therefore assembles into a symplectic `S⁻¹`.

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::invariants::{cluster_spectrum, skew_hamiltonian_residual, Cluster, Clustering};
use crate::linalg::{self, CMat, C64};
use crate::mat::{check_finite, direct_sum, half_dim, Mat};
use crate::symplectic::sigma;
use crate::tol::Tolerances;

type CVec = DVector<C64>;

/// Structure tolerance on the input, relative to `max(1, ‖Σ‖)`.
const STRUCTURE_TOL: f64 = 1e-10;
/// Pivot below which the form is considered degenerate on an eigenspace.
const ISOTROPY_TOL: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct SkewHamiltonianBlocks {
    /// Symplectic similarity.
    pub s: Mat,
    /// `n x n` block with `SΣS⁻¹ ≈ -(M ⊕ Mᵀ)`.
    pub m: Mat,
    /// `‖SΣS⁻¹ + (M ⊕ Mᵀ)‖_F`.
    pub residual: f64,
}

pub fn block_diagonalize_skew_hamiltonian(
    sigma_mat: &Mat,
    tol: &Tolerances,
) -> Result<SkewHamiltonianBlocks> {
    block_diagonalize(sigma_mat, tol).map(|(b, _)| b)
}

pub(crate) fn block_diagonalize(
    sigma_mat: &Mat,
    tol: &Tolerances,
) -> Result<(SkewHamiltonianBlocks, Clustering)> {
    tol.validate()?;
    let n = half_dim(sigma_mat)?;
    check_finite(sigma_mat)?;
    let norm = sigma_mat.norm().max(1.0);
    let structure = skew_hamiltonian_residual(sigma_mat)?;
    let bound = STRUCTURE_TOL * norm;
    if structure > bound {
        return Err(Error::NotSkewHamiltonian {
            residual: structure,
            bound,
        });
    }
    let sg = sigma(n);
    let sig = project_skew_hamiltonian(sigma_mat, &sg);

    let eigs = linalg::eigenvalues(&sig)?;
    let clustering = cluster_spectrum(&eigs, 2, tol)?;
    let null_tol = (1e-2 * tol.degeneracy_gap).max(1e3 * f64::EPSILON) * clustering.scale;

    // Columns of S⁻¹: u-vectors fill slots 0..n, w-vectors slots n..2n,
    // normalized so that ω(u_k, w_k) = -1 as required by `σ`.
    let mut t = Mat::zeros(2 * n, 2 * n);
    let mut slot = 0;
    for cluster in &clustering.clusters {
        let pairs = eigenspace_pairs(&sig, &sg, cluster, null_tol)?;
        if cluster.value.im == 0.0 {
            for (p, q) in pairs {
                t.set_column(slot, &p.map(|z| z.re));
                t.set_column(n + slot, &q.map(|z| -z.re));
                slot += 1;
            }
        } else {
            let r2 = std::f64::consts::SQRT_2;
            for (p, q) in pairs {
                t.set_column(slot, &p.map(|z| r2 * z.re));
                t.set_column(slot + 1, &p.map(|z| r2 * z.im));
                t.set_column(n + slot, &q.map(|z| -r2 * z.re));
                t.set_column(n + slot + 1, &q.map(|z| r2 * z.im));
                slot += 2;
            }
        }
    }
    debug_assert_eq!(slot, n);

    // For symplectic T the inverse is σᵀTᵀσ.
    let s = sg.transpose() * t.transpose() * &sg;
    let h = &s * &sig * &t;
    let h11 = h.view((0, 0), (n, n)).into_owned();
    let h22 = h.view((n, n), (n, n)).into_owned();
    let m = -(h11 + h22.transpose()) * 0.5;
    let residual = (&h + direct_sum(&m, &m.transpose())).norm();
    let bound = tol.residual_tol * s.norm() * t.norm() * norm;
    if residual > bound {
        return Err(Error::ResidualContract {
            what: "block diagonalization",
            value: residual,
            bound,
        });
    }
    Ok((SkewHamiltonianBlocks { s, m, residual }, clustering))
}

/// Removes the Hamiltonian component of `m` (rounding noise for inputs that
/// passed the structure check).
fn project_skew_hamiltonian(m: &Mat, sg: &Mat) -> Mat {
    let a = m * sg;
    let skew = (&a - a.transpose()) * 0.5;
    skew * sg.transpose()
}

fn omega(sg: &Mat, x: &CVec, y: &CVec) -> C64 {
    let sy: CVec = DVector::from_fn(y.len(), |i, _| {
        let mut acc = C64::new(0.0, 0.0);
        for j in 0..y.len() {
            let s = sg[(i, j)];
            if s != 0.0 {
                acc += y[j] * s;
            }
        }
        acc
    });
    x.iter().zip(sy.iter()).map(|(a, b)| a * b).sum()
}

/// Symplectic pairs `(p, q)` with `ω(p, q) = 1` spanning the eigenspace of
/// `cluster.value` (complex-bilinear when the eigenvalue is complex).
fn eigenspace_pairs(
    sig: &Mat,
    sg: &Mat,
    cluster: &Cluster,
    null_tol: f64,
) -> Result<Vec<(CVec, CVec)>> {
    let dim = 2 * cluster.copies;
    let lambda = cluster.value;
    let (basis, sv) = if lambda.im == 0.0 {
        let shifted = sig - Mat::identity(sig.nrows(), sig.ncols()) * lambda.re;
        let (b, sv) = linalg::null_space(&shifted, dim)?;
        (linalg::to_complex(&b), sv)
    } else {
        let shifted = linalg::to_complex(sig) - CMat::identity(sig.nrows(), sig.ncols()) * lambda;
        linalg::null_space_complex(&shifted, dim)?
    };
    if sv[dim - 1] > null_tol {
        return Err(Error::DegenerateSpectrum(format!(
            "eigenvalue {lambda} has geometric multiplicity below {dim} (singular value {:e} > {null_tol:e}); defective structure is not supported",
            sv[dim - 1]
        )));
    }

    let mut vecs: Vec<CVec> = (0..dim).map(|k| basis.column(k).into_owned()).collect();
    let mut out = Vec::with_capacity(cluster.copies);
    for _ in 0..cluster.copies {
        let mut best = (0, 1, C64::new(0.0, 0.0));
        for i in 0..vecs.len() {
            for j in i + 1..vecs.len() {
                let w = omega(sg, &vecs[i], &vecs[j]);
                if w.norm() > best.2.norm() {
                    best = (i, j, w);
                }
            }
        }
        let (i, j, w) = best;
        if w.norm() <= ISOTROPY_TOL {
            return Err(Error::IsotropicEigenspace {
                eigenvalue: lambda.to_string(),
            });
        }
        let q_raw = vecs.remove(j);
        let p_raw = vecs.remove(i);
        let (p, q) = balance(p_raw, q_raw / w);
        for v in vecs.iter_mut() {
            let wq = omega(sg, v, &q);
            let wp = omega(sg, v, &p);
            *v = &*v - &p * wq + &q * wp;
            let nv = v.norm();
            if nv > 0.0 {
                *v /= C64::new(nv, 0.0);
            }
        }
        out.push((p, q));
    }
    Ok(out)
}

/// Rescales `(p, q)` to equal norms and fixes the phase so that the largest
/// entry of `p` is real and positive; `ω(p, q)` is unchanged.
fn balance(mut p: CVec, mut q: CVec) -> (CVec, CVec) {
    let alpha = (q.norm() / p.norm()).sqrt();
    p *= C64::new(alpha, 0.0);
    q /= C64::new(alpha, 0.0);
    let k = linalg::argmax_modulus(p.iter().map(|z| z.norm()));
    let phase = p[k] / p[k].norm();
    p *= phase.conj();
    q *= phase;
    (p, q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::invariants::sigma_matrix;
    use crate::symplectic::{is_symplectic, normal_matrix};
    use approx::assert_relative_eq;
    use rand::SeedableRng;

    #[test]
    fn identity_gives_minus_identity_block() {
        let tol = Tolerances::default();
        let r = block_diagonalize_skew_hamiltonian(&Mat::identity(2, 2), &tol).unwrap();
        assert_relative_eq!(r.m[(0, 0)], -1.0, epsilon = 1e-14);
        assert!(is_symplectic(&r.s, &tol).unwrap().verdict);
        assert!(r.residual < 1e-14);
    }

    #[test]
    fn rotation_block_spectrum() {
        let tol = Tolerances::default();
        let j = Mat::from_row_slice(2, 2, &[1.0, 2.0, -2.0, 1.0]);
        let x = direct_sum(&Mat::identity(2, 2), &j);
        let r = block_diagonalize_skew_hamiltonian(&sigma_matrix(&x).unwrap(), &tol).unwrap();
        let eig = linalg::eigenvalues(&r.m).unwrap();
        let want = [C64::new(-1.0, -2.0), C64::new(-1.0, 2.0)];
        assert!(crate::invariants::multiset_distance(&eig, &want) < 1e-10);
    }

    #[test]
    fn random_inputs_satisfy_contract() {
        let tol = Tolerances::default();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for n in 1..=5 {
            for _ in 0..10 {
                let x = normal_matrix(&mut rng, 2 * n, 2 * n);
                let sig = sigma_matrix(&x).unwrap();
                let r = block_diagonalize_skew_hamiltonian(&sig, &tol).unwrap();
                assert!(is_symplectic(&r.s, &tol).unwrap().verdict);
                let s_inv = r.s.clone().try_inverse().unwrap();
                let h = &r.s * &sig * s_inv;
                let resid = (h + direct_sum(&r.m, &r.m.transpose())).norm();
                let cond = r.s.norm() * r.s.clone().try_inverse().unwrap().norm();
                assert!(
                    resid <= tol.residual_tol * cond * sig.norm(),
                    "n={n} resid={resid}"
                );
            }
        }
    }

    #[test]
    fn rejects_hamiltonian_input() {
        // σ itself is Hamiltonian, not skew-Hamiltonian: (σσ)ᵀ + σσ = -2·1.
        let tol = Tolerances::default();
        assert!(matches!(
            block_diagonalize_skew_hamiltonian(&sigma(2), &tol),
            Err(Error::NotSkewHamiltonian { .. })
        ));
    }

    #[test]
    fn rejects_defective_input() {
        // Σ(X) for X = 1 ⊕ (Jordan block) has a defective doubled eigenvalue.
        let tol = Tolerances::default();
        let jb = Mat::from_row_slice(2, 2, &[1.0, 1.0, 0.0, 1.0]);
        let x = direct_sum(&Mat::identity(2, 2), &jb);
        let err = block_diagonalize_skew_hamiltonian(&sigma_matrix(&x).unwrap(), &tol).unwrap_err();
        assert!(
            matches!(
                err,
                Error::DegenerateSpectrum(_) | Error::ClusteringAmbiguous(_)
            ),
            "{err:?}"
        );
    }
}
