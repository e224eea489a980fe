use serde::Serialize;

use crate::error::Result;
use crate::invariants::{invariants, InvariantSpectrum};
use crate::mat::Mat;
use crate::tol::Tolerances;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum WitnessVerdict {
    SqueezingWitnessed,
    Inconclusive,
}

#[derive(Debug, Clone, Serialize)]
pub struct WitnessReport {
    pub spectrum: InvariantSpectrum,
    pub complex_found: bool,
    pub verdict: WitnessVerdict,
}

/// Complex invariants of a channel's interaction part cannot arise from a
/// number-preserving dilation, so they certify squeezing between system and
/// environment. Real invariants certify nothing.
pub fn squeezing_witness(x: &Mat, tol: &Tolerances) -> Result<WitnessReport> {
    let spectrum = invariants(x, tol)?;
    let complex_found = spectrum.has_complex();
    let verdict = if complex_found {
        WitnessVerdict::SqueezingWitnessed
    } else {
        WitnessVerdict::Inconclusive
    };
    Ok(WitnessReport {
        spectrum,
        complex_found,
        verdict,
    })
}
