//! Closed-form missed-topic ("fear of missing out") risk model.
//!
//! Given `n1` identified responsive documents and a confidence level `c`,
//! the highest prevalence a topic can have while plausibly being absent from
//! the identified set is
//!
//! ```text
//! p = 1 - (1 - c)^(1 / n1)
//! ```
//!
//! and the confidence of finding a topic of prevalence `p` somewhere in a
//! missed set of `n2` responsive documents is
//!
//! ```text
//! k = 1 - (1 - p)^n2
//! ```
//!
//! The overall risk that a topic is absent from the identified set yet
//! present in the missed set is `(1 - c) * k`. All powers are evaluated in
//! log space (`ln_1p`/`exp_m1`) because `(1 - c)^(1 / n1)` underflows
//! catastrophically in naive form once `n1` reaches the millions.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Inputs to one risk scenario.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FomoInputs {
    /// Confidence level `c`, strictly between 0 and 1.
    pub confidence_level: f64,
    /// Number of identified responsive documents, `n1 >= 1`.
    pub identified_count: u64,
    /// Number of responsive documents not identified, `n2 >= 0`.
    /// Kept real-valued; it is used as a real exponent without rounding.
    pub missed_count: f64,
}

/// The derived quantities for one scenario.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FomoEstimate {
    pub inputs: FomoInputs,
    /// Top of the confidence interval for the prevalence of a topic absent
    /// from the identified set.
    pub max_missed_prevalence: f64,
    /// Confidence that a topic of that prevalence occurs in the missed set.
    pub found_confidence: f64,
    /// `(1 - c) * found_confidence`.
    pub fomo_risk: f64,
}

fn check_confidence(c: f64) -> Result<()> {
    if !(c > 0.0 && c < 1.0) || !c.is_finite() {
        return Err(Error::domain("confidence_level", "0 < c < 1", c));
    }
    Ok(())
}

fn check_identified(n1: u64) -> Result<()> {
    if n1 < 1 {
        return Err(Error::domain("identified_count", "n1 >= 1", n1 as f64));
    }
    Ok(())
}

/// Highest prevalence a topic can have and still be absent from all `n1`
/// identified documents with probability `1 - c`:
/// `p = 1 - (1 - c)^(1 / n1)`, evaluated as `-expm1(ln(1 - c) / n1)`.
pub fn max_missed_prevalence(confidence_level: f64, identified_count: u64) -> Result<f64> {
    check_confidence(confidence_level)?;
    check_identified(identified_count)?;
    let log_residual = (-confidence_level).ln_1p(); // ln(1 - c)
    Ok(-(log_residual / identified_count as f64).exp_m1())
}

/// Confidence of finding a topic of prevalence `p` in a missed set of `n2`
/// documents: `k = 1 - (1 - p)^n2`, evaluated as `-expm1(n2 * ln(1 - p))`.
///
/// `n2` is treated as a real exponent; callers that want whole documents
/// round before calling.
pub fn found_in_missed(prevalence: f64, missed_count: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&prevalence) || !prevalence.is_finite() {
        return Err(Error::domain("prevalence", "0 <= p <= 1", prevalence));
    }
    if !(missed_count >= 0.0) || !missed_count.is_finite() {
        return Err(Error::domain("missed_count", "n2 >= 0", missed_count));
    }
    if prevalence == 1.0 {
        // ln(0) = -inf; the limit is 1 for any positive n2, 0 for n2 = 0.
        return Ok(if missed_count == 0.0 { 0.0 } else { 1.0 });
    }
    Ok(-(missed_count * (-prevalence).ln_1p()).exp_m1())
}

/// Size of the missed set implied by an identified count and a recall level:
/// `n2 = n1 * (1 - recall) / recall`, real-valued.
pub fn missed_count_from_recall(identified_count: u64, recall: f64) -> Result<f64> {
    check_identified(identified_count)?;
    if !(recall > 0.0 && recall <= 1.0) || !recall.is_finite() {
        return Err(Error::domain("recall", "0 < recall <= 1", recall));
    }
    Ok(identified_count as f64 * (1.0 - recall) / recall)
}

/// Full scenario evaluation: derives the missed-set size from the recall
/// level, then chains the two closed forms into a [`FomoEstimate`].
pub fn fomo_risk(confidence_level: f64, identified_count: u64, recall: f64) -> Result<FomoEstimate> {
    let missed_count = missed_count_from_recall(identified_count, recall)?;
    let max_missed_prevalence = max_missed_prevalence(confidence_level, identified_count)?;
    let found_confidence = found_in_missed(max_missed_prevalence, missed_count)?;
    Ok(FomoEstimate {
        inputs: FomoInputs {
            confidence_level,
            identified_count,
            missed_count,
        },
        max_missed_prevalence,
        found_confidence,
        fomo_risk: (1.0 - confidence_level) * found_confidence,
    })
}
