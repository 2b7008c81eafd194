//! Frontier scoring against reference annotations.
//!
//! Estimated and reference frontiers are matched one-to-one within a
//! tolerance window, greedily by ascending beat distance (earlier reference,
//! then earlier estimate, on ties). Precision, recall and F1 follow, and
//! corpus figures are unweighted means of the per-song rates.

use serde::Serialize;

use crate::error::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct MatchCounts {
    pub true_positives: usize,
    pub false_positives: usize,
    pub false_negatives: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Scores {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

/// Match estimated frontiers to reference frontiers at the given tolerance.
/// Both lists must be strictly increasing.
pub fn match_frontiers(
    estimated: &[usize],
    reference: &[usize],
    tolerance: usize,
) -> Result<MatchCounts, Error> {
    for list in [estimated, reference] {
        if list.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::UnsortedFrontiers);
        }
    }
    // candidate pairs sorted by distance, then reference, then estimate
    let mut pairs = Vec::new();
    for (ri, &r) in reference.iter().enumerate() {
        for (ei, &e) in estimated.iter().enumerate() {
            let distance = e.abs_diff(r);
            if distance <= tolerance {
                pairs.push((distance, ri, ei));
            }
        }
    }
    pairs.sort_unstable();
    let mut ref_taken = vec![false; reference.len()];
    let mut est_taken = vec![false; estimated.len()];
    let mut true_positives = 0;
    for (_, ri, ei) in pairs {
        if !ref_taken[ri] && !est_taken[ei] {
            ref_taken[ri] = true;
            est_taken[ei] = true;
            true_positives += 1;
        }
    }
    Ok(MatchCounts {
        true_positives,
        false_positives: estimated.len() - true_positives,
        false_negatives: reference.len() - true_positives,
    })
}

/// Precision/recall/F1 from matching counts. An entirely empty comparison
/// (no estimates and no references) scores 1.0 across the board.
pub fn score(counts: MatchCounts) -> Scores {
    let MatchCounts {
        true_positives: tp,
        false_positives: fp,
        false_negatives: fn_,
    } = counts;
    if tp == 0 && fp == 0 && fn_ == 0 {
        return Scores {
            precision: 1.0,
            recall: 1.0,
            f1: 1.0,
        };
    }
    let precision = if tp + fp > 0 {
        tp as f64 / (tp + fp) as f64
    } else {
        0.0
    };
    let recall = if tp + fn_ > 0 {
        tp as f64 / (tp + fn_) as f64
    } else {
        0.0
    };
    let f1 = if precision + recall > 0.0 {
        2.0 * precision * recall / (precision + recall)
    } else {
        0.0
    };
    Scores {
        precision,
        recall,
        f1,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ToleranceScores {
    pub tolerance: usize,
    pub counts: MatchCounts,
    pub scores: Scores,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SongReport {
    pub index: usize,
    pub by_tolerance: Vec<ToleranceScores>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorpusMeans {
    pub tolerance: usize,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalReport {
    pub tolerances: Vec<usize>,
    pub songs: Vec<SongReport>,
    /// Unweighted per-song means, one entry per tolerance.
    pub corpus: Vec<CorpusMeans>,
}

/// Score a corpus of estimated frontier lists against aligned references.
pub fn evaluate_corpus(
    estimated: &[Vec<usize>],
    references: &[Vec<usize>],
    tolerances: &[usize],
) -> Result<EvalReport, Error> {
    if estimated.len() != references.len() {
        return Err(Error::SongCountMismatch {
            estimated: estimated.len(),
            references: references.len(),
        });
    }
    let mut songs = Vec::with_capacity(estimated.len());
    for (index, (est, reference)) in estimated.iter().zip(references).enumerate() {
        let mut by_tolerance = Vec::with_capacity(tolerances.len());
        for &tolerance in tolerances {
            let counts = match_frontiers(est, reference, tolerance)?;
            by_tolerance.push(ToleranceScores {
                tolerance,
                counts,
                scores: score(counts),
            });
        }
        songs.push(SongReport {
            index,
            by_tolerance,
        });
    }
    let corpus = tolerances
        .iter()
        .enumerate()
        .map(|(slot, &tolerance)| {
            let n = songs.len().max(1) as f64;
            let sum = |f: fn(&Scores) -> f64| {
                songs
                    .iter()
                    .map(|s| f(&s.by_tolerance[slot].scores))
                    .sum::<f64>()
                    / n
            };
            CorpusMeans {
                tolerance,
                precision: sum(|s| s.precision),
                recall: sum(|s| s.recall),
                f1: sum(|s| s.f1),
            }
        })
        .collect();
    Ok(EvalReport {
        tolerances: tolerances.to_vec(),
        songs,
        corpus,
    })
}
