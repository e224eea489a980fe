use nalgebra::Complex;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::Validity;
use crate::canonical::{decompose, CanonicalBlocks};
use crate::error::{Error, Result};
use crate::invariants::sigma_matrix;
use crate::linalg::{self, CMat};
use crate::mat::{check_finite, half_dim, require_symmetric, serde_mat, symmetrize, Mat};
use crate::symplectic::{random_symplectic_with, sigma};
use crate::tol::Tolerances;

const SYMMETRY_TOL: f64 = 1e-10;
/// Relative agreement required between the closed-form `Σ` of a passive
/// interaction and `sigma_matrix`.
const PASSIVE_SIGMA_TOL: f64 = 1e-10;

/// Gaussian channel `Γ ↦ XᵀΓX + Y`, admissible when
/// `Y + i(XᵀσX - σ) ⪰ 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawChannel")]
pub struct GaussianChannel {
    pub n: usize,
    #[serde(with = "serde_mat")]
    pub x: Mat,
    #[serde(with = "serde_mat")]
    pub y: Mat,
    /// Minimal eigenvalue of `Y + i(XᵀσX - σ)`; negative for invalid channels.
    pub validity_residual: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawChannel {
    n: usize,
    #[serde(with = "serde_mat")]
    x: Mat,
    #[serde(with = "serde_mat")]
    y: Mat,
    // Recomputed on load; accepted so that written documents read back.
    #[serde(default)]
    #[allow(dead_code)]
    validity_residual: Option<f64>,
}

impl TryFrom<RawChannel> for GaussianChannel {
    type Error = Error;

    fn try_from(r: RawChannel) -> Result<Self> {
        let ch = Self::new(r.x, r.y)?;
        if ch.n != r.n {
            return Err(Error::DimensionError(format!(
                "document declares n = {} but matrices describe n = {}",
                r.n, ch.n
            )));
        }
        Ok(ch)
    }
}

impl GaussianChannel {
    pub fn new(x: Mat, y: Mat) -> Result<Self> {
        let n = half_dim(&x)?;
        if y.shape() != x.shape() {
            return Err(Error::DimensionError(format!(
                "Y is {}x{}, X is {}x{}",
                y.nrows(),
                y.ncols(),
                x.nrows(),
                x.ncols()
            )));
        }
        check_finite(&x)?;
        check_finite(&y)?;
        require_symmetric(&y, SYMMETRY_TOL)?;
        let validity_residual = validity_min_eig(&x, &y)?;
        Ok(Self {
            n,
            x,
            y,
            validity_residual,
        })
    }

    /// Scale against which `psd_tol` is applied.
    pub fn scale(&self) -> f64 {
        1f64.max(self.y.norm()).max(self.x.norm_squared())
    }
}

fn validity_min_eig(x: &Mat, y: &Mat) -> Result<f64> {
    let sg = sigma(x.nrows() / 2);
    let anti = x.transpose() * &sg * x - &sg;
    let anti = (&anti - anti.transpose()) * 0.5;
    linalg::hermitian_min_eig(&symmetrize(y), &anti)
}

pub fn identity_channel(n: usize) -> Result<GaussianChannel> {
    GaussianChannel::new(Mat::identity(2 * n, 2 * n), Mat::zeros(2 * n, 2 * n))
}

/// Pure-loss channel `X = √η·1`, `Y = (1 - η)·1`.
pub fn attenuator(n: usize, eta: f64) -> Result<GaussianChannel> {
    if !(0.0..=1.0).contains(&eta) {
        return Err(Error::DimensionError(format!(
            "transmissivity {eta} outside [0, 1]"
        )));
    }
    let id = Mat::identity(2 * n, 2 * n);
    GaussianChannel::new(&id * eta.sqrt(), &id * (1.0 - eta))
}

pub fn apply_channel(gamma: &Mat, ch: &GaussianChannel) -> Result<Mat> {
    if gamma.shape() != ch.x.shape() {
        return Err(Error::DimensionError(format!(
            "state is {}x{}, channel acts on {}x{}",
            gamma.nrows(),
            gamma.ncols(),
            ch.x.nrows(),
            ch.x.ncols()
        )));
    }
    check_finite(gamma)?;
    require_symmetric(gamma, SYMMETRY_TOL)?;
    Ok(symmetrize(&(ch.x.transpose() * gamma * &ch.x + &ch.y)))
}

pub fn channel_validity(ch: &GaussianChannel, tol: &Tolerances) -> Result<Validity> {
    tol.validate()?;
    require_symmetric(&ch.y, SYMMETRY_TOL)?;
    let min_eig = validity_min_eig(&ch.x, &ch.y)?;
    Ok(Validity {
        min_eig,
        valid: min_eig >= -tol.psd_tol * ch.scale(),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct NormalizedChannel {
    #[serde(rename = "S1", with = "serde_mat")]
    pub s1: Mat,
    #[serde(rename = "S2", with = "serde_mat")]
    pub s2: Mat,
    pub ch_out: GaussianChannel,
    pub blocks: CanonicalBlocks,
    pub recon_residual: f64,
    pub s1_residual: f64,
    pub s2_residual: f64,
}

/// Encodes and decodes around the channel so that `X ↦ S₁XS₂ = 1 ⊕ J` and
/// `Y ↦ S₂ᵀYS₂`.
pub fn normalize_channel(
    ch: &GaussianChannel,
    tol: &Tolerances,
    seed: u64,
) -> Result<NormalizedChannel> {
    let d = decompose(&ch.x, tol, seed)?;
    let x_out = &d.s1 * &ch.x * &d.s2;
    let y_out = symmetrize(&(d.s2.transpose() * &ch.y * &d.s2));
    let ch_out = GaussianChannel::new(x_out, y_out)?;
    Ok(NormalizedChannel {
        s1: d.s1,
        s2: d.s2,
        ch_out,
        blocks: d.blocks,
        recon_residual: d.recon_residual,
        s1_residual: d.s1_residual,
        s2_residual: d.s2_residual,
    })
}

/// `X = [[c, d], [-d, c]]`, the interaction part left by a number-preserving
/// dilation.
#[derive(Debug, Clone, Serialize)]
pub struct PassiveInteraction {
    pub n: usize,
    #[serde(with = "serde_mat")]
    pub c: Mat,
    #[serde(with = "serde_mat")]
    pub d: Mat,
    #[serde(with = "serde_mat")]
    pub x: Mat,
    /// Closed form `[[ddᵀ + ccᵀ, dcᵀ - cdᵀ], [cdᵀ - dcᵀ, ddᵀ + ccᵀ]]`.
    #[serde(with = "serde_mat")]
    pub sigma_predicted: Mat,
    /// `‖Σ_predicted - Σ(X)‖_F / max(1, ‖Σ(X)‖_F)`.
    pub identity_residual: f64,
}

pub fn passive_interaction(c: &Mat, d: &Mat) -> Result<PassiveInteraction> {
    let n = c.nrows();
    if n == 0 || c.ncols() != n || d.shape() != c.shape() {
        return Err(Error::DimensionError(format!(
            "c is {}x{}, d is {}x{}; both must be the same square shape",
            c.nrows(),
            c.ncols(),
            d.nrows(),
            d.ncols()
        )));
    }
    check_finite(c)?;
    check_finite(d)?;
    let mut x = Mat::zeros(2 * n, 2 * n);
    x.view_mut((0, 0), (n, n)).copy_from(c);
    x.view_mut((0, n), (n, n)).copy_from(d);
    x.view_mut((n, 0), (n, n)).copy_from(&(-d));
    x.view_mut((n, n), (n, n)).copy_from(c);

    let diag = d * d.transpose() + c * c.transpose();
    let off = d * c.transpose() - c * d.transpose();
    let mut predicted = Mat::zeros(2 * n, 2 * n);
    predicted.view_mut((0, 0), (n, n)).copy_from(&diag);
    predicted.view_mut((n, n), (n, n)).copy_from(&diag);
    predicted.view_mut((0, n), (n, n)).copy_from(&off);
    predicted.view_mut((n, 0), (n, n)).copy_from(&(-&off));

    let direct = sigma_matrix(&x)?;
    let identity_residual = (&predicted - &direct).norm() / direct.norm().max(1.0);
    if identity_residual > PASSIVE_SIGMA_TOL {
        return Err(Error::ResidualContract {
            what: "passive Σ closed form",
            value: identity_residual,
            bound: PASSIVE_SIGMA_TOL,
        });
    }
    Ok(PassiveInteraction {
        n,
        c: c.clone(),
        d: d.clone(),
        x,
        sigma_predicted: predicted,
        identity_residual,
    })
}

/// Haar-like random unitary from the QR factor of a complex Gaussian matrix.
fn random_unitary(rng: &mut ChaCha8Rng, m: usize) -> CMat {
    let z = CMat::from_fn(m, m, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        Complex::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
    });
    z.qr().q()
}

/// Channel obtained by a global symplectic dilation on `n + env_modes` modes
/// with the environment in vacuum, then tracing the environment out.
///
/// Without squeezing the dilation is number preserving, `[[C, D], [-D, C]]`
/// with `C + iD` unitary; otherwise it is a random symplectic matrix.
pub fn random_valid_channel(
    n: usize,
    env_modes: usize,
    squeezing: bool,
    seed: u64,
) -> Result<GaussianChannel> {
    if n == 0 || env_modes == 0 {
        return Err(Error::DimensionError(
            "random_valid_channel needs n >= 1 and env_modes >= 1".into(),
        ));
    }
    let m = n + env_modes;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let global = if squeezing {
        random_symplectic_with(&mut rng, m)
    } else {
        let u = random_unitary(&mut rng, m);
        let c = u.map(|z| z.re);
        let d = u.map(|z| z.im);
        let mut s = Mat::zeros(2 * m, 2 * m);
        s.view_mut((0, 0), (m, m)).copy_from(&c);
        s.view_mut((0, m), (m, m)).copy_from(&d);
        s.view_mut((m, 0), (m, m)).copy_from(&(-&d));
        s.view_mut((m, m), (m, m)).copy_from(&c);
        s
    };
    let sys: Vec<usize> = (0..n).chain(m..m + n).collect();
    let env: Vec<usize> = (n..m).chain(m + n..2 * m).collect();
    let s_ss = Mat::from_fn(2 * n, 2 * n, |i, j| global[(sys[i], sys[j])]);
    let s_se = Mat::from_fn(2 * n, 2 * env_modes, |i, j| global[(sys[i], env[j])]);
    // Output covariance (SΓSᵀ)_sys = S_ss Γ S_ssᵀ + S_se S_seᵀ for a vacuum environment.
    let x = s_ss.transpose();
    let y = symmetrize(&(&s_se * s_se.transpose()));
    GaussianChannel::new(x, y)
}
