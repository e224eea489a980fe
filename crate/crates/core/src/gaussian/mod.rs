//! Covariance-level applications: condensing bipartite correlations and
//! normalizing the interaction part of Gaussian channels.
//!
//! Covariance matrices use the convention vacuum `= 1`; a state `Γ` is
//! admissible when `Γ + iσ ⪰ 0`. Symplectic maps act on states as
//! `Γ ↦ SΓSᵀ` and channels act as `Γ ↦ XᵀΓX + Y`.

mod bipartite;
mod channel;
mod witness;

use serde::Serialize;

pub use bipartite::{
    condense_correlations, party_major_permutation, schmidt_relation_check, state_validity,
    state_validity_with_form, tmss, BipartiteCovariance, CondensedCorrelations, SchmidtReport,
    PURITY_TOL,
};
pub use channel::{
    apply_channel, attenuator, channel_validity, identity_channel, normalize_channel,
    passive_interaction, random_valid_channel, GaussianChannel, NormalizedChannel,
    PassiveInteraction,
};
pub use witness::{squeezing_witness, WitnessReport, WitnessVerdict};

/// Outcome of a Hermitian positivity check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Validity {
    pub min_eig: f64,
    pub valid: bool,
}
