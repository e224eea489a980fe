//! Invariants of `X` under `X ↦ S₁XS₂` with symplectic `S₁, S₂`.
//!
//! They are the eigenvalues of `Σ(X) = XσXᵀσᵀ`, whose spectrum is doubled:
//! every invariant appears twice, and complex invariants come with their
//! conjugates.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, C64};
use crate::mat::{check_finite, half_dim, Mat};
use crate::symplectic::sigma;
use crate::tol::Tolerances;

/// Spread (relative to the clustering threshold) under which a cluster of
/// several invariants counts as exactly degenerate rather than ambiguous.
const EXACT_DEGENERACY_FRACTION: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum InvariantKind {
    Real,
    ComplexPair,
}

/// One invariant. A `ComplexPair` stands for `re ± i·im` and fills two of the
/// `n` invariant slots.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "(f64, f64, InvariantKind)", into = "(f64, f64, InvariantKind)")]
pub struct Invariant {
    pub re: f64,
    pub im: f64,
    pub kind: InvariantKind,
}

impl From<(f64, f64, InvariantKind)> for Invariant {
    fn from((re, im, kind): (f64, f64, InvariantKind)) -> Self {
        Self { re, im, kind }
    }
}

impl From<Invariant> for (f64, f64, InvariantKind) {
    fn from(v: Invariant) -> Self {
        (v.re, v.im, v.kind)
    }
}

impl Invariant {
    pub fn real(re: f64) -> Self {
        Self {
            re,
            im: 0.0,
            kind: InvariantKind::Real,
        }
    }

    /// `a ± i·b`; the sign of `b` is normalized to positive.
    pub fn complex_pair(a: f64, b: f64) -> Self {
        Self {
            re: a,
            im: b.abs(),
            kind: InvariantKind::ComplexPair,
        }
    }

    pub fn slots(&self) -> usize {
        match self.kind {
            InvariantKind::Real => 1,
            InvariantKind::ComplexPair => 2,
        }
    }

    pub fn value(&self) -> C64 {
        C64::new(self.re, self.im)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvariantSpectrum {
    pub n: usize,
    /// Canonical order: descending real part, then ascending imaginary part.
    /// Slots (1 per `Real`, 2 per `ComplexPair`) add up to `n`.
    pub values: Vec<Invariant>,
    /// Worst spread inside a matched double, relative to `max(1, ρ(Σ))`.
    pub pairing_residual: f64,
    /// Set when some invariant vanishes (singular `X`).
    pub has_zero: bool,
}

impl InvariantSpectrum {
    pub fn slots(&self) -> usize {
        self.values.iter().map(Invariant::slots).sum()
    }

    /// The `n` invariants as complex numbers, conjugates listed explicitly.
    pub fn lambdas(&self) -> Vec<C64> {
        let mut out = Vec::with_capacity(self.n);
        for v in &self.values {
            out.push(v.value());
            if v.kind == InvariantKind::ComplexPair {
                out.push(v.value().conj());
            }
        }
        out
    }

    /// The `2n` eigenvalues of `Σ` implied by the invariants.
    pub fn doubled(&self) -> Vec<C64> {
        self.lambdas().into_iter().flat_map(|l| [l, l]).collect()
    }

    pub fn has_complex(&self) -> bool {
        self.values
            .iter()
            .any(|v| v.kind == InvariantKind::ComplexPair)
    }

    pub fn scale(&self) -> f64 {
        self.lambdas().iter().map(|l| l.norm()).fold(1.0, f64::max)
    }
}

/// Descending real part, then ascending imaginary part.
pub fn canonical_cmp(a: &C64, b: &C64) -> Ordering {
    b.re.total_cmp(&a.re).then(a.im.total_cmp(&b.im))
}

/// `Σ(X) = X σ Xᵀ σᵀ`.
pub fn sigma_matrix(x: &Mat) -> Result<Mat> {
    let n = half_dim(x)?;
    let s = sigma(n);
    Ok(x * &s * x.transpose() * s.transpose())
}

/// `‖(Σσ)ᵀ + Σσ‖_F`, zero for skew-Hamiltonian matrices.
pub fn skew_hamiltonian_residual(m: &Mat) -> Result<f64> {
    let n = half_dim(m)?;
    let ms = m * sigma(n);
    Ok((ms.transpose() + ms).norm())
}

pub fn invariants(x: &Mat, tol: &Tolerances) -> Result<InvariantSpectrum> {
    tol.validate()?;
    let n = half_dim(x)?;
    check_finite(x)?;
    let sig = sigma_matrix(x)?;
    let eigs = linalg::eigenvalues(&sig)?;
    let clustering = cluster_spectrum(&eigs, 2, tol)?;
    let mut values = Vec::with_capacity(n);
    for c in &clustering.clusters {
        let inv = if c.value.im == 0.0 {
            Invariant::real(c.value.re)
        } else {
            Invariant::complex_pair(c.value.re, c.value.im)
        };
        values.extend(std::iter::repeat_n(inv, c.copies));
    }
    let thr = tol.degeneracy_gap * clustering.scale;
    let has_zero = values.iter().any(|v| v.value().norm() <= thr);
    Ok(InvariantSpectrum {
        n,
        values,
        pairing_residual: clustering.pairing_residual,
        has_zero,
    })
}

/// A group of numerically coincident eigenvalues.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Cluster {
    /// Cluster mean; `im == 0` for real clusters, `im > 0` otherwise.
    pub value: C64,
    /// Number of invariants in the cluster (eigenvalue count / `unit`).
    pub copies: usize,
}

#[derive(Debug, Clone)]
pub(crate) struct Clustering {
    /// Canonical order.
    pub clusters: Vec<Cluster>,
    pub pairing_residual: f64,
    pub scale: f64,
}

/// Groups the eigenvalues of a real matrix whose spectrum is expected to
/// repeat every value `unit` times.
///
/// Values within `degeneracy_gap · max(1, ρ)` of each other are linked.
/// Imaginary parts below the same threshold are snapped to zero, only the
/// upper half plane is kept after checking conjugate closure, and a group
/// holding more than one invariant must be exactly degenerate.
pub(crate) fn cluster_spectrum(eigs: &[C64], unit: usize, tol: &Tolerances) -> Result<Clustering> {
    let scale = eigs.iter().map(|e| e.norm()).fold(1.0, f64::max);
    let thr = tol.degeneracy_gap * scale;

    let mut reals = Vec::new();
    let mut upper = Vec::new();
    let mut lower = Vec::new();
    for e in eigs {
        if e.im.abs() <= thr {
            reals.push(C64::new(e.re, 0.0));
        } else if e.im > 0.0 {
            upper.push(*e);
        } else {
            lower.push(e.conj());
        }
    }
    if upper.len() != lower.len() {
        return Err(Error::ClusteringAmbiguous(format!(
            "spectrum is not conjugate-closed ({} vs {} off-axis values)",
            upper.len(),
            lower.len()
        )));
    }
    let closure = multiset_distance(&upper, &lower);
    if closure > thr {
        return Err(Error::ClusteringAmbiguous(format!(
            "conjugate mismatch {closure:e} exceeds {thr:e}"
        )));
    }

    let mut clusters = Vec::new();
    let mut pairing_residual: f64 = 0.0;
    for group in single_linkage(&reals, thr)
        .into_iter()
        .chain(single_linkage(&upper, thr))
    {
        if group.len() % unit != 0 {
            return Err(Error::ClusteringAmbiguous(format!(
                "{} eigenvalue(s) near {} cannot be matched into groups of {unit}",
                group.len(),
                group[0]
            )));
        }
        let copies = group.len() / unit;
        let spread = diameter(&group);
        if copies > 1 && spread > EXACT_DEGENERACY_FRACTION * thr {
            return Err(Error::ClusteringAmbiguous(format!(
                "distinct invariants near {} closer than the degeneracy gap (spread {spread:e})",
                group[0]
            )));
        }
        pairing_residual = pairing_residual.max(spread / scale);
        let mut mean = group.iter().sum::<C64>() / group.len() as f64;
        if group.iter().all(|g| g.im == 0.0) {
            mean.im = 0.0;
        }
        clusters.push(Cluster {
            value: mean,
            copies,
        });
    }
    clusters.sort_by(|a, b| canonical_cmp(&a.value, &b.value));
    Ok(Clustering {
        clusters,
        pairing_residual,
        scale,
    })
}

fn single_linkage(values: &[C64], thr: f64) -> Vec<Vec<C64>> {
    let k = values.len();
    let mut label: Vec<usize> = (0..k).collect();
    fn root(label: &mut [usize], mut i: usize) -> usize {
        while label[i] != i {
            label[i] = label[label[i]];
            i = label[i];
        }
        i
    }
    for i in 0..k {
        for j in i + 1..k {
            if (values[i] - values[j]).norm() <= thr {
                let (ri, rj) = (root(&mut label, i), root(&mut label, j));
                if ri != rj {
                    label[ri.max(rj)] = ri.min(rj);
                }
            }
        }
    }
    let mut groups: Vec<(usize, Vec<C64>)> = Vec::new();
    for (i, v) in values.iter().enumerate() {
        let r = root(&mut label, i);
        match groups.iter_mut().find(|(g, _)| *g == r) {
            Some((_, members)) => members.push(*v),
            None => groups.push((r, vec![*v])),
        }
    }
    groups.into_iter().map(|(_, g)| g).collect()
}

fn diameter(group: &[C64]) -> f64 {
    let mut d: f64 = 0.0;
    for (i, a) in group.iter().enumerate() {
        for b in &group[i + 1..] {
            d = d.max((a - b).norm());
        }
    }
    d
}

/// Bottleneck distance between two equally sized multisets, computed by
/// greedily matching each element of `a` with its nearest unused partner.
pub fn multiset_distance(a: &[C64], b: &[C64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    let mut used = vec![false; b.len()];
    let mut worst: f64 = 0.0;
    let mut order: Vec<&C64> = a.iter().collect();
    order.sort_by(|x, y| canonical_cmp(x, y));
    for x in order {
        let (j, d) = b
            .iter()
            .enumerate()
            .filter(|(j, _)| !used[*j])
            .map(|(j, y)| (j, (x - y).norm()))
            .min_by(|p, q| p.1.total_cmp(&q.1))
            .expect("sizes match");
        used[j] = true;
        worst = worst.max(d);
    }
    worst
}
