//! Defect-severity threshold calibration: bin expert accept/reject votes by
//! estimated DAR and locate the rejection-rate inflection that separates
//! Fair from Poor.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::types::Dar;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CalibrationError {
    #[error("need at least 2 bins, got {0}")]
    InvalidBinCount(usize),
    #[error("cutoff must lie in (0, 1], got {0}")]
    InvalidCutoff(f64),
    #[error("no bin reaches the rejection cutoff")]
    NoInflection,
}

/// One accept/reject expert verdict at an estimated DAR.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CalibrationVote {
    pub dar: Dar,
    pub reject: bool,
}

/// One DAR interval with its vote tallies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CalibrationBin {
    pub lower: Dar,
    pub upper: Dar,
    pub accepts: u64,
    pub rejects: u64,
}

impl CalibrationBin {
    /// Rejection rate, undefined for an empty bin.
    pub fn rate(&self) -> Option<f64> {
        let total = self.accepts + self.rejects;
        (total > 0).then(|| self.rejects as f64 / total as f64)
    }
}

/// Rejection rates over equal-width DAR bins.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RejectionCurve {
    pub bins: Vec<CalibrationBin>,
}

impl RejectionCurve {
    pub fn rates(&self) -> Vec<Option<f64>> {
        self.bins.iter().map(CalibrationBin::rate).collect()
    }
}

/// Partition [0, 1] into `n_bins` equal intervals and tally votes per bin;
/// a DAR of exactly 1.0 falls into the last bin.
pub fn bin_votes(
    votes: &[CalibrationVote],
    n_bins: usize,
) -> Result<RejectionCurve, CalibrationError> {
    if n_bins < 2 {
        return Err(CalibrationError::InvalidBinCount(n_bins));
    }
    let mut bins: Vec<CalibrationBin> = (0..n_bins)
        .map(|i| CalibrationBin {
            lower: Dar::new(i as f64 / n_bins as f64).expect("in range"),
            upper: Dar::new((i + 1) as f64 / n_bins as f64).expect("in range"),
            accepts: 0,
            rejects: 0,
        })
        .collect();
    for vote in votes {
        let idx = ((vote.dar.value() * n_bins as f64).floor() as usize).min(n_bins - 1);
        if vote.reject {
            bins[idx].rejects += 1;
        } else {
            bins[idx].accepts += 1;
        }
    }
    Ok(RejectionCurve { bins })
}

/// The calibrated threshold: the lower edge of the first bin (ascending)
/// whose rejection rate reaches `cutoff`.
pub fn find_threshold(curve: &RejectionCurve, cutoff: f64) -> Result<Dar, CalibrationError> {
    if !(cutoff > 0.0 && cutoff <= 1.0) {
        return Err(CalibrationError::InvalidCutoff(cutoff));
    }
    curve
        .bins
        .iter()
        .find(|bin| bin.rate().is_some_and(|r| r >= cutoff))
        .map(|bin| bin.lower)
        .ok_or(CalibrationError::NoInflection)
}

/// Majority vote over binary reject decisions; ties default to reject for a
/// conservative assessment.
pub fn majority_reject(votes: &[bool]) -> bool {
    let rejects = votes.iter().filter(|&&r| r).count();
    2 * rejects >= votes.len()
}
