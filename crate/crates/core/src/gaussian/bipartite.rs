use serde::{Deserialize, Serialize};

use super::Validity;
use crate::canonical::{decompose, williamson, CanonicalBlocks};
use crate::error::{Error, Result};
use crate::invariants::{invariants, InvariantKind};
use crate::linalg;
use crate::mat::{check_finite, direct_sum, half_dim, require_symmetric, serde_mat, Mat};
use crate::symplectic::sigma;
use crate::tol::Tolerances;

/// Relative symmetry tolerance for covariance blocks.
const SYMMETRY_TOL: f64 = 1e-10;
/// Relative deviation of global symplectic eigenvalues from 1 accepted as pure.
pub const PURITY_TOL: f64 = 1e-6;

/// `Γ = [[Γ_A, X], [Xᵀ, Γ_B]]` for `n + n` modes, party-major, each party
/// ordered `(P, Q)`. The symplectic form of the whole system is `σₙ ⊕ σₙ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawBipartite")]
pub struct BipartiteCovariance {
    pub n: usize,
    #[serde(with = "serde_mat")]
    pub gamma_a: Mat,
    #[serde(with = "serde_mat")]
    pub gamma_b: Mat,
    #[serde(with = "serde_mat")]
    pub x: Mat,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBipartite {
    n: usize,
    #[serde(with = "serde_mat")]
    gamma_a: Mat,
    #[serde(with = "serde_mat")]
    gamma_b: Mat,
    #[serde(with = "serde_mat")]
    x: Mat,
}

impl TryFrom<RawBipartite> for BipartiteCovariance {
    type Error = Error;

    fn try_from(r: RawBipartite) -> Result<Self> {
        let g = Self::new(r.gamma_a, r.gamma_b, r.x)?;
        if g.n != r.n {
            return Err(Error::DimensionError(format!(
                "document declares n = {} but blocks describe n = {}",
                r.n, g.n
            )));
        }
        Ok(g)
    }
}

impl BipartiteCovariance {
    pub fn new(gamma_a: Mat, gamma_b: Mat, x: Mat) -> Result<Self> {
        let n = half_dim(&gamma_a)?;
        for (name, m) in [("gamma_b", &gamma_b), ("x", &x)] {
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
        for m in [&gamma_a, &gamma_b, &x] {
            check_finite(m)?;
        }
        require_symmetric(&gamma_a, SYMMETRY_TOL)?;
        require_symmetric(&gamma_b, SYMMETRY_TOL)?;
        Ok(Self {
            n,
            gamma_a,
            gamma_b,
            x,
        })
    }

    /// Splits a party-major `4n x 4n` covariance matrix.
    pub fn from_full(gamma: &Mat) -> Result<Self> {
        let two_n = half_dim(gamma)?;
        if two_n % 2 != 0 {
            return Err(Error::DimensionError(format!(
                "bipartite covariance needs dimension divisible by 4, got {}",
                gamma.nrows()
            )));
        }
        require_symmetric(gamma, SYMMETRY_TOL)?;
        let k = two_n;
        Self::new(
            gamma.view((0, 0), (k, k)).into_owned(),
            gamma.view((k, k), (k, k)).into_owned(),
            gamma.view((0, k), (k, k)).into_owned(),
        )
    }

    pub fn assemble(&self) -> Mat {
        let k = 2 * self.n;
        let mut g = Mat::zeros(2 * k, 2 * k);
        g.view_mut((0, 0), (k, k)).copy_from(&self.gamma_a);
        g.view_mut((k, k), (k, k)).copy_from(&self.gamma_b);
        g.view_mut((0, k), (k, k)).copy_from(&self.x);
        g.view_mut((k, 0), (k, k)).copy_from(&self.x.transpose());
        g
    }

    /// Symplectic form of the party-major layout, `σₙ ⊕ σₙ`.
    pub fn form(&self) -> Mat {
        direct_sum(&sigma(self.n), &sigma(self.n))
    }

    pub fn validity(&self, tol: &Tolerances) -> Result<Validity> {
        state_validity_with_form(&self.assemble(), &self.form(), tol)
    }
}

/// Two-mode squeezed vacua, one pair per squeezing parameter; mode `k` of A
/// is paired with mode `k` of B.
pub fn tmss(rs: &[f64]) -> Result<BipartiteCovariance> {
    let n = rs.len();
    if n == 0 {
        return Err(Error::DimensionError(
            "tmss needs at least one squeezing parameter".into(),
        ));
    }
    let mut local = Mat::zeros(2 * n, 2 * n);
    let mut x = Mat::zeros(2 * n, 2 * n);
    for (k, r) in rs.iter().enumerate() {
        let (c, s) = ((2.0 * r).cosh(), (2.0 * r).sinh());
        local[(k, k)] = c;
        local[(n + k, n + k)] = c;
        x[(k, k)] = s;
        x[(n + k, n + k)] = -s;
    }
    BipartiteCovariance::new(local.clone(), local, x)
}

/// Index map from the global `(P_A, P_B, Q_A, Q_B)` ordering into the
/// party-major `(P_A, Q_A, P_B, Q_B)` ordering: `global[i] = party_major[perm[i]]`.
pub fn party_major_permutation(n: usize) -> Vec<usize> {
    (0..n)
        .chain(2 * n..3 * n)
        .chain(n..2 * n)
        .chain(3 * n..4 * n)
        .collect()
}

/// Minimal eigenvalue of `Γ + iσ` for a covariance matrix in the standard
/// `(P, Q)` layout.
pub fn state_validity(gamma: &Mat, tol: &Tolerances) -> Result<Validity> {
    let n = half_dim(gamma)?;
    state_validity_with_form(gamma, &sigma(n), tol)
}

pub fn state_validity_with_form(gamma: &Mat, form: &Mat, tol: &Tolerances) -> Result<Validity> {
    tol.validate()?;
    half_dim(gamma)?;
    if form.shape() != gamma.shape() {
        return Err(Error::DimensionError(
            "form and covariance differ in size".into(),
        ));
    }
    check_finite(gamma)?;
    require_symmetric(gamma, SYMMETRY_TOL)?;
    let min_eig = linalg::hermitian_min_eig(&crate::mat::symmetrize(gamma), form)?;
    let valid = min_eig >= -tol.psd_tol * gamma.norm().max(1.0);
    Ok(Validity { min_eig, valid })
}

#[derive(Debug, Clone, Serialize)]
pub struct CondensedCorrelations {
    #[serde(with = "serde_mat")]
    pub s_a: Mat,
    #[serde(with = "serde_mat")]
    pub s_b: Mat,
    pub g_out: BipartiteCovariance,
    pub blocks: CanonicalBlocks,
    /// `‖g_out.x - N‖_F / max(1, ‖N‖_F)`.
    pub correlation_residual: f64,
    pub s_a_residual: f64,
    pub s_b_residual: f64,
}

/// Local symplectic maps `S_A, S_B` bringing the correlation block to `1 ⊕ J`.
///
/// Under `Γ ↦ (S_A ⊕ S_B)Γ(S_A ⊕ S_B)ᵀ` the block transforms as
/// `X ↦ S_A X S_Bᵀ`, so `S_A = S₁` and `S_B = S₂ᵀ` from [`decompose`].
/// The local blocks are transformed but not otherwise constrained.
pub fn condense_correlations(
    g: &BipartiteCovariance,
    tol: &Tolerances,
    seed: u64,
) -> Result<CondensedCorrelations> {
    let d = decompose(&g.x, tol, seed)?;
    let s_a = d.s1;
    let s_b = d.s2.transpose();
    let local = direct_sum(&s_a, &s_b);
    let full = &local * g.assemble() * local.transpose();
    let full = crate::mat::symmetrize(&full);
    let g_out = BipartiteCovariance::from_full(&full)?;
    let correlation_residual =
        (&g_out.x - &d.blocks.assembled).norm() / d.blocks.assembled.norm().max(1.0);
    Ok(CondensedCorrelations {
        s_a,
        s_b,
        g_out,
        blocks: d.blocks,
        correlation_residual,
        s_a_residual: d.s1_residual,
        s_b_residual: d.s2_residual,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct SchmidtReport {
    /// Local symplectic eigenvalues of `Γ_A`, descending.
    pub nu_local: Vec<f64>,
    /// Invariants of the correlation block, descending.
    pub lambda: Vec<f64>,
    /// Worst `|ν_k - √(1 - λ_k)| / ν_k` after aligning both lists.
    pub max_relative_error: f64,
}

/// For pure states, local symplectic eigenvalues and correlation invariants
/// satisfy `ν_k = √(1 - λ_k)` with `λ_k ≤ 0`.
pub fn schmidt_relation_check(g: &BipartiteCovariance, tol: &Tolerances) -> Result<SchmidtReport> {
    tol.validate()?;
    let rc = linalg::rcond(&g.x)?;
    if !(rc >= crate::canonical::MIN_INPUT_RCOND) {
        return Err(Error::SingularInput(format!(
            "correlation block has reciprocal condition {rc:e}"
        )));
    }
    let full = g.assemble();
    let perm = party_major_permutation(g.n);
    let global = Mat::from_fn(4 * g.n, 4 * g.n, |i, j| full[(perm[i], perm[j])]);
    let w = williamson(&global, tol)?;
    if let Some(bad) =
        w.nu.iter()
            .find(|v| (*v - 1.0).abs() > PURITY_TOL * v.max(1.0))
    {
        return Err(Error::NotPure(format!(
            "global symplectic eigenvalue {bad} differs from 1"
        )));
    }

    let local = williamson(&g.gamma_a, tol)?;
    let spec = invariants(&g.x, tol)?;
    if spec.has_complex() {
        return Err(Error::NotPure(
            "correlation block has complex invariants".into(),
        ));
    }
    let lambda: Vec<f64> = spec
        .values
        .iter()
        .filter(|v| v.kind == InvariantKind::Real)
        .map(|v| v.re)
        .collect();
    let bound = tol.psd_tol * spec.scale();
    if let Some(bad) = lambda.iter().find(|l| **l > bound) {
        return Err(Error::NotPure(format!(
            "positive correlation invariant {bad}"
        )));
    }

    // ν descending pairs with √(1 - λ) descending, i.e. λ ascending.
    let mut ascending = lambda.clone();
    ascending.sort_by(f64::total_cmp);
    let max_relative_error = local
        .nu
        .iter()
        .zip(&ascending)
        .map(|(nu, l)| (nu - (1.0 - l).sqrt()).abs() / nu)
        .fold(0.0, f64::max);
    Ok(SchmidtReport {
        nu_local: local.nu,
        lambda,
        max_relative_error,
    })
}
