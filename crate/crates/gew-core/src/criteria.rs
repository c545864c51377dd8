//! Operational entanglement criteria (positive partial transpose and
//! realignment) and the classification verdict that combines them with
//! witness expectation values.
//!
//! The verdict logic never concludes separability on its own: no sufficient
//! separability criterion is implemented, so `SEPARABLE_ASSERTED` appears
//! only when the caller vouches for it and no entanglement evidence
//! contradicts the assertion.

use serde::{Deserialize, Serialize};

use crate::error::{GewError, Result};
use crate::matcore::{herm_eig, hs_inner, svd, CMat, DensityMatrix, POSITIVITY_TOL};

/// Classification outcome, ordered by the strength of the evidence.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Label {
    #[serde(rename = "INVALID_STATE")]
    InvalidState,
    #[serde(rename = "NPT_ENTANGLED")]
    NptEntangled,
    #[serde(rename = "BOUND_ENTANGLED")]
    BoundEntangled,
    #[serde(rename = "PPT_UNDECIDED")]
    PptUndecided,
    #[serde(rename = "SEPARABLE_ASSERTED")]
    SeparableAsserted,
}

impl std::fmt::Display for Label {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Label::InvalidState => "INVALID_STATE",
            Label::NptEntangled => "NPT_ENTANGLED",
            Label::BoundEntangled => "BOUND_ENTANGLED",
            Label::PptUndecided => "PPT_UNDECIDED",
            Label::SeparableAsserted => "SEPARABLE_ASSERTED",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Verdict {
    pub label: Label,
    /// Smallest eigenvalue of the partial transpose; None when the state
    /// itself is invalid.
    pub ppt_margin: Option<f64>,
    /// Sum of singular values of the realigned matrix; ≤ 1 for separable
    /// states, so an excess certifies entanglement.
    pub realignment_sum: Option<f64>,
    /// Tr Cρ for each supplied witness operator, in input order.
    pub witness_values: Vec<f64>,
    /// (criterion, margin) pairs backing the label; not serialized.
    #[serde(skip)]
    pub evidence: Vec<(String, f64)>,
}

fn require_valid(rho: &DensityMatrix, what: &str) -> Result<()> {
    let eig = rho.min_eigenvalue()?;
    if eig < POSITIVITY_TOL {
        return Err(GewError::InvalidState(format!(
            "{what}: smallest eigenvalue {eig:.3e} is negative"
        )));
    }
    Ok(())
}

/// Smallest eigenvalue of ρ^Γ (transpose on the second subsystem). The state
/// is PPT iff the margin is ≥ −1e−10; a negative margin certifies
/// entanglement outright.
pub fn ppt_check(rho: &DensityMatrix) -> Result<f64> {
    require_valid(rho, "ppt_check")?;
    Ok(herm_eig(&rho.partial_transpose())?.eigenvalues[0])
}

/// Sum of singular values of the realigned matrix. Separable states obey
/// sum ≤ 1, so sum > 1 + 1e−10 certifies entanglement; the criterion also
/// catches some PPT (bound entangled) states.
pub fn realignment_check(rho: &DensityMatrix) -> Result<f64> {
    require_valid(rho, "realignment_check")?;
    Ok(svd(&rho.realign()).sum())
}

/// Combines positivity, PPT, realignment, and optional witness expectations
/// into a labeled verdict. Invalid input states yield `INVALID_STATE` rather
/// than an error, so parametrized families can be classified pointwise.
/// Entanglement evidence always overrides a separability assertion.
///
/// Errors only on malformed witness operators (wrong dimension or not
/// Hermitian).
pub fn classify(
    rho: &DensityMatrix,
    witnesses: &[CMat],
    separable_assertion: bool,
) -> Result<Verdict> {
    for (k, w) in witnesses.iter().enumerate() {
        if w.rows() != rho.dim() || w.cols() != rho.dim() {
            return Err(GewError::DimensionMismatch(format!(
                "classify: witness {k} is {}x{}, state dimension {}",
                w.rows(),
                w.cols(),
                rho.dim()
            )));
        }
        if w.hermiticity_error() > 1e-10 * w.max_abs().max(1.0) {
            return Err(GewError::NotHermitian(format!(
                "classify: witness {k} hermiticity error {:.3e}",
                w.hermiticity_error()
            )));
        }
    }

    let mut evidence = Vec::new();
    let min_eig = rho.min_eigenvalue()?;
    evidence.push(("min_eigenvalue".to_string(), min_eig));
    if min_eig < POSITIVITY_TOL {
        return Ok(Verdict {
            label: Label::InvalidState,
            ppt_margin: None,
            realignment_sum: None,
            witness_values: Vec::new(),
            evidence,
        });
    }

    let ppt_margin = herm_eig(&rho.partial_transpose())?.eigenvalues[0];
    let realignment_sum = svd(&rho.realign()).sum();
    let mut witness_values = Vec::with_capacity(witnesses.len());
    for w in witnesses {
        witness_values.push(hs_inner(w, rho.mat())?.re);
    }
    evidence.push(("ppt_margin".to_string(), ppt_margin));
    evidence.push(("realignment_sum".to_string(), realignment_sum));
    for (k, v) in witness_values.iter().enumerate() {
        evidence.push((format!("witness_{k}"), *v));
    }

    let label = if ppt_margin < POSITIVITY_TOL {
        Label::NptEntangled
    } else if realignment_sum > 1.0 + 1e-10
        || witness_values.iter().any(|&v| v < POSITIVITY_TOL)
    {
        Label::BoundEntangled
    } else if separable_assertion {
        Label::SeparableAsserted
    } else {
        Label::PptUndecided
    };
    Ok(Verdict {
        label,
        ppt_margin: Some(ppt_margin),
        realignment_sum: Some(realignment_sum),
        witness_values,
        evidence,
    })
}
