//! Multi-annotator aggregation: per-dimension consensus scores and
//! pairwise-majority system rankings.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::types::{Assessment, DimensionAssessment, ScoreLevel};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnnotationError {
    #[error("no votes to aggregate")]
    EmptyVotes,
    #[error("ranking requires at least 2 systems, got {0}")]
    TooFewSystems(usize),
    #[error("invalid tally: {0}")]
    InvalidTally(String),
}

/// Mode of the votes, with frequency ties broken by the minimum value for a
/// conservative quality assessment.
pub fn consensus_score(votes: &[ScoreLevel]) -> Result<ScoreLevel, AnnotationError> {
    if votes.is_empty() {
        return Err(AnnotationError::EmptyVotes);
    }
    let mut counts = [0usize; 3];
    for v in votes {
        counts[(v.value() - 1) as usize] += 1;
    }
    let top = *counts.iter().max().expect("non-empty");
    let winner = counts.iter().position(|&c| c == top).expect("non-empty");
    Ok(ScoreLevel::from_value(winner as u8 + 1).expect("index in 0..3"))
}

/// Apply [`consensus_score`] independently per dimension. Consensus entries
/// carry empty reasons.
pub fn consensus_assessment(per_annotator: &[Assessment]) -> Result<Assessment, AnnotationError> {
    if per_annotator.is_empty() {
        return Err(AnnotationError::EmptyVotes);
    }
    let entries = crate::types::DimensionId::ALL.iter().map(|&d| {
        let votes: Vec<ScoreLevel> = per_annotator.iter().map(|a| a.score(d)).collect();
        let score = consensus_score(&votes).expect("non-empty annotator list");
        DimensionAssessment::new(d, score, "")
    });
    Ok(Assessment::from_entries(entries).expect("one entry per dimension"))
}

/// Pairwise preference counts over a set of systems for one sample.
///
/// `wins[i][j]` is the number of annotators preferring system `i` over
/// system `j`; annotators may abstain on any pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairwiseTally {
    pub systems: Vec<String>,
    pub wins: Vec<Vec<u32>>,
}

impl PairwiseTally {
    /// An empty tally over the given systems.
    pub fn new(systems: Vec<String>) -> PairwiseTally {
        let n = systems.len();
        PairwiseTally {
            systems,
            wins: vec![vec![0; n]; n],
        }
    }

    /// Record one annotator preferring `winner` over `loser`.
    pub fn add_preference(&mut self, winner: &str, loser: &str) -> Result<(), AnnotationError> {
        let w = self.index_of(winner)?;
        let l = self.index_of(loser)?;
        if w == l {
            return Err(AnnotationError::InvalidTally(format!(
                "system {winner:?} compared with itself"
            )));
        }
        self.wins[w][l] += 1;
        Ok(())
    }

    fn index_of(&self, system: &str) -> Result<usize, AnnotationError> {
        self.systems
            .iter()
            .position(|s| s == system)
            .ok_or_else(|| AnnotationError::InvalidTally(format!("unknown system {system:?}")))
    }

    fn validate(&self) -> Result<(), AnnotationError> {
        let n = self.systems.len();
        if self.wins.len() != n || self.wins.iter().any(|row| row.len() != n) {
            return Err(AnnotationError::InvalidTally(format!(
                "wins matrix must be {n}x{n}"
            )));
        }
        if (0..n).any(|i| self.wins[i][i] != 0) {
            return Err(AnnotationError::InvalidTally(
                "diagonal must be zero".to_string(),
            ));
        }
        for i in 0..n {
            for j in (i + 1)..n {
                if self.systems[i] == self.systems[j] {
                    return Err(AnnotationError::InvalidTally(format!(
                        "duplicate system id {:?}",
                        self.systems[i]
                    )));
                }
            }
        }
        Ok(())
    }
}

/// A system ordering, best first, with the Copeland win counts behind it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ranking {
    pub order: Vec<String>,
    pub copeland: BTreeMap<String, u32>,
}

/// Rank systems by pairwise majority: a pair is a win for `i` when more
/// annotators preferred `i` than `j`. Systems are ordered by Copeland win
/// count, then total margin, then system id — a deterministic resolution
/// for cyclic majorities.
pub fn majority_ranking(tally: &PairwiseTally) -> Result<Ranking, AnnotationError> {
    let n = tally.systems.len();
    if n < 2 {
        return Err(AnnotationError::TooFewSystems(n));
    }
    tally.validate()?;

    let mut copeland = vec![0u32; n];
    let mut margin = vec![0i64; n];
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            if tally.wins[i][j] > tally.wins[j][i] {
                copeland[i] += 1;
            }
            margin[i] += i64::from(tally.wins[i][j]) - i64::from(tally.wins[j][i]);
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        copeland[b]
            .cmp(&copeland[a])
            .then(margin[b].cmp(&margin[a]))
            .then(tally.systems[a].cmp(&tally.systems[b]))
    });

    Ok(Ranking {
        order: order.iter().map(|&i| tally.systems[i].clone()).collect(),
        copeland: tally
            .systems
            .iter()
            .zip(copeland)
            .map(|(s, c)| (s.clone(), c))
            .collect(),
    })
}
