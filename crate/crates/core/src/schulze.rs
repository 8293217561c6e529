//! Strongest-path computation and Schulze winner determination.
//!
//! `P(c, d)` is the maximum, over all directed paths from `c` to `d`, of the
//! minimum margin along the path. Every ordered pair is a usable edge, whatever
//! the sign of its margin; this keeps `P` total and matches the values the
//! winner definition needs. A candidate `c` wins iff `P(c, d) >= P(d, c)`
//! against every rival `d`.

use crate::error::{Error, Result};
use crate::profile::{CandidateId, WeightedMajorityGraph};

/// The matrix of strongest-path strengths. The diagonal is not defined and
/// must not be queried.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StrongestPathMatrix {
    candidates: Vec<CandidateId>,
    strength: Vec<i64>,
}

impl StrongestPathMatrix {
    pub fn candidates(&self) -> &[CandidateId] {
        &self.candidates
    }

    pub fn strength(&self, c: &CandidateId, d: &CandidateId) -> Result<i64> {
        let i = self
            .candidates
            .binary_search(c)
            .map_err(|_| Error::UnknownCandidate(c.to_string()))?;
        let j = self
            .candidates
            .binary_search(d)
            .map_err(|_| Error::UnknownCandidate(d.to_string()))?;
        if i == j {
            return Err(Error::IdenticalPair(c.to_string()));
        }
        Ok(self.strength_at(i, j))
    }

    pub fn strength_at(&self, i: usize, j: usize) -> i64 {
        self.strength[i * self.candidates.len() + j]
    }
}

/// Max-min closure over all intermediates (Floyd-Warshall shape).
pub fn strongest_paths(g: &WeightedMajorityGraph) -> Result<StrongestPathMatrix> {
    let m = g.len();
    if m < 2 {
        return Err(Error::TooFewCandidates { need: 2, got: m });
    }
    let mut p = vec![0i64; m * m];
    for i in 0..m {
        for j in 0..m {
            if i != j {
                p[i * m + j] = g.margin_at(i, j);
            }
        }
    }
    for k in 0..m {
        for i in 0..m {
            if i == k {
                continue;
            }
            let pik = p[i * m + k];
            for j in 0..m {
                if j == i || j == k {
                    continue;
                }
                let through = pik.min(p[k * m + j]);
                if through > p[i * m + j] {
                    p[i * m + j] = through;
                }
            }
        }
    }
    Ok(StrongestPathMatrix {
        candidates: g.candidates().to_vec(),
        strength: p,
    })
}

/// Winner indices, avoiding candidate-id clones in solver loops.
pub fn schulze_winner_indices(g: &WeightedMajorityGraph) -> Vec<usize> {
    let m = g.len();
    if m == 1 {
        return vec![0];
    }
    let p = strongest_paths(g).expect("m >= 2");
    (0..m)
        .filter(|&c| (0..m).all(|d| d == c || p.strength_at(c, d) >= p.strength_at(d, c)))
        .collect()
}

/// All Schulze winners, sorted. Never empty.
pub fn schulze_winners(g: &WeightedMajorityGraph) -> Result<Vec<CandidateId>> {
    if g.is_empty() {
        return Err(Error::NoCandidates);
    }
    Ok(schulze_winner_indices(g)
        .into_iter()
        .map(|i| g.candidates()[i].clone())
        .collect())
}

/// The candidate beating every other candidate strictly, if one exists.
pub fn condorcet_winner(g: &WeightedMajorityGraph) -> Option<CandidateId> {
    let m = g.len();
    (0..m)
        .find(|&c| (0..m).all(|d| d == c || g.margin_at(c, d) > 0))
        .map(|c| g.candidates()[c].clone())
}

/// Candidates that lose no pairwise contest (margin >= 0 everywhere).
pub fn weak_condorcet_winners(g: &WeightedMajorityGraph) -> Vec<CandidateId> {
    let m = g.len();
    (0..m)
        .filter(|&c| (0..m).all(|d| d == c || g.margin_at(c, d) >= 0))
        .map(|c| g.candidates()[c].clone())
        .collect()
}
