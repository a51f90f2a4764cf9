//! DAR quantization and the multiplicative quality score.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::types::{Assessment, Category, Dar, DimensionId, ScoreLevel};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ScoringError {
    #[error("invalid scoring config: {0}")]
    InvalidConfig(String),
}

/// Thresholds for DAR quantization and score normalization.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ScoringConfig {
    /// DAR above this threshold maps to Poor.
    pub tau: f64,
    /// DAR below this tolerance counts as "no visible defect".
    pub epsilon_zero: f64,
    pub s_min: f64,
    pub s_max: f64,
}

impl Default for ScoringConfig {
    fn default() -> Self {
        ScoringConfig {
            tau: 0.3,
            epsilon_zero: 0.005,
            s_min: 1.0,
            s_max: 3.0,
        }
    }
}

impl ScoringConfig {
    pub fn validate(&self) -> Result<(), ScoringError> {
        if !(self.epsilon_zero > 0.0 && self.epsilon_zero < self.tau && self.tau < 1.0) {
            return Err(ScoringError::InvalidConfig(format!(
                "requires 0 < epsilon_zero < tau < 1, got epsilon_zero={}, tau={}",
                self.epsilon_zero, self.tau
            )));
        }
        if self.s_min >= self.s_max {
            return Err(ScoringError::InvalidConfig(format!(
                "requires s_min < s_max, got s_min={}, s_max={}",
                self.s_min, self.s_max
            )));
        }
        Ok(())
    }

    /// Min-max normalization of a score into [0, 1].
    pub fn phi(&self, s: f64) -> f64 {
        (s - self.s_min) / (self.s_max - self.s_min)
    }
}

/// The aggregate score for one assessment, with its category means.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VectraScore {
    pub value: f64,
    pub acc_mean: f64,
    pub sty_mean: f64,
}

/// Quantize a defect area ratio onto the 3-point scale: Excellent when the
/// ratio is negligible, Fair up to and including `tau`, Poor above it.
pub fn quantize_dar(dar: Dar, cfg: &ScoringConfig) -> ScoreLevel {
    let v = dar.value();
    if v < cfg.epsilon_zero {
        ScoreLevel::Excellent
    } else if v <= cfg.tau {
        ScoreLevel::Fair
    } else {
        ScoreLevel::Poor
    }
}

/// Mean score over the accuracy dimensions and over the style dimensions.
pub fn category_means(a: &Assessment) -> (f64, f64) {
    let mut acc_sum = 0.0;
    let mut sty_sum = 0.0;
    let mut acc_n = 0.0;
    let mut sty_n = 0.0;
    for entry in a.iter() {
        match entry.dimension.category() {
            Category::Accuracy => {
                acc_sum += entry.score.as_f64();
                acc_n += 1.0;
            }
            Category::Style => {
                sty_sum += entry.score.as_f64();
                sty_n += 1.0;
            }
        }
    }
    (acc_sum / acc_n, sty_sum / sty_n)
}

/// The multiplicative aggregate: `100 · φ(acc_mean) · φ(sty_mean)`.
///
/// Accuracy failures cannot be offset by style: an accuracy mean at the
/// scale floor forces the score to zero regardless of style.
pub fn vectra_score(a: &Assessment, cfg: &ScoringConfig) -> VectraScore {
    let (acc_mean, sty_mean) = category_means(a);
    VectraScore {
        value: 100.0 * cfg.phi(acc_mean) * cfg.phi(sty_mean),
        acc_mean,
        sty_mean,
    }
}

/// Uniform averaging over all 14 dimensions, provided for ablation
/// comparison against the multiplicative aggregate.
pub fn uniform_average_score(a: &Assessment, cfg: &ScoringConfig) -> f64 {
    let sum: f64 = a.iter().map(|e| e.score.as_f64()).sum();
    100.0 * cfg.phi(sum / DimensionId::COUNT as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::ScoreLevel::{Excellent, Fair, Poor};

    fn assessment(acc: ScoreLevel, sty: ScoreLevel) -> Assessment {
        Assessment::from_score_fn(|d| match d.category() {
            Category::Accuracy => acc,
            Category::Style => sty,
        })
    }

    #[test]
    fn quantize_boundaries_at_default_tau() {
        let cfg = ScoringConfig::default();
        assert_eq!(quantize_dar(Dar::new(0.0).unwrap(), &cfg), Excellent);
        assert_eq!(quantize_dar(Dar::new(0.004).unwrap(), &cfg), Excellent);
        assert_eq!(quantize_dar(Dar::new(0.005).unwrap(), &cfg), Fair);
        assert_eq!(quantize_dar(Dar::new(0.30).unwrap(), &cfg), Fair);
        assert_eq!(quantize_dar(Dar::new(0.31).unwrap(), &cfg), Poor);
        assert_eq!(quantize_dar(Dar::new(1.0).unwrap(), &cfg), Poor);
    }

    #[test]
    fn quantize_is_monotone_non_increasing() {
        let cfg = ScoringConfig::default();
        let mut prev = Excellent;
        for i in 0..=1000 {
            let s = quantize_dar(Dar::new(i as f64 / 1000.0).unwrap(), &cfg);
            assert!(s <= prev);
            prev = s;
        }
    }

    #[test]
    fn category_means_examples() {
        assert_eq!(category_means(&Assessment::uniform(Excellent)), (3.0, 3.0));
        assert_eq!(category_means(&assessment(Poor, Fair)), (1.0, 2.0));

        // accuracy (3,3,3,1), style all 3
        let mut seen = 0;
        let a = Assessment::from_score_fn(|d| {
            if d.category() == Category::Accuracy {
                seen += 1;
                if seen == 4 {
                    return Poor;
                }
            }
            Excellent
        });
        assert_eq!(category_means(&a), (2.5, 3.0));
    }

    #[test]
    fn vectra_score_examples() {
        let cfg = ScoringConfig::default();
        assert_eq!(
            vectra_score(&Assessment::uniform(Excellent), &cfg).value,
            100.0
        );
        assert_eq!(vectra_score(&assessment(Poor, Excellent), &cfg).value, 0.0);
        assert_eq!(vectra_score(&assessment(Excellent, Fair), &cfg).value, 50.0);

        let mut seen = 0;
        let a = Assessment::from_score_fn(|d| {
            if d.category() == Category::Accuracy {
                seen += 1;
                if seen == 4 {
                    return Poor;
                }
            }
            Excellent
        });
        assert_eq!(vectra_score(&a, &cfg).value, 75.0);
    }

    #[test]
    fn accuracy_floor_is_non_compensatory() {
        let cfg = ScoringConfig::default();
        for sty in ScoreLevel::ALL {
            assert_eq!(vectra_score(&assessment(Poor, sty), &cfg).value, 0.0);
        }
    }

    #[test]
    fn raising_any_dimension_never_decreases_score() {
        let cfg = ScoringConfig::default();
        let base = assessment(Fair, Fair);
        let v0 = vectra_score(&base, &cfg).value;
        for d in DimensionId::ALL {
            let raised =
                Assessment::from_score_fn(|x| if x == d { Excellent } else { base.score(x) });
            assert!(vectra_score(&raised, &cfg).value >= v0);
        }
    }

    #[test]
    fn uniform_average_examples() {
        let cfg = ScoringConfig::default();
        assert_eq!(
            uniform_average_score(&Assessment::uniform(Excellent), &cfg),
            100.0
        );
        assert_eq!(uniform_average_score(&Assessment::uniform(Poor), &cfg), 0.0);

        // seven 3s and seven 1s
        let mut i = 0;
        let a = Assessment::from_score_fn(|_| {
            i += 1;
            if i <= 7 {
                Excellent
            } else {
                Poor
            }
        });
        assert_eq!(uniform_average_score(&a, &cfg), 50.0);
    }

    #[test]
    fn config_validation() {
        assert!(ScoringConfig::default().validate().is_ok());
        let bad = ScoringConfig {
            epsilon_zero: 0.5,
            tau: 0.3,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
    }
}
