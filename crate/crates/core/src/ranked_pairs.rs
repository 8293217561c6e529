//! Resolute ranked pairs: order directed pairs by margin under a fixed
//! tie-breaking policy, lock them in order skipping cycle creators, and return
//! the unique source of the locked graph.
//!
//! Zero-margin pairs are processed too (at the end of the agenda, direction
//! chosen by the policy), so the locked graph always has exactly one source.

use crate::error::{Error, Result};
use crate::profile::{CandidateId, WeightedMajorityGraph};

/// Deterministic tie-breaking over equal-margin pairs.
///
/// `Lexicographic` orders ties by (winner, loser) name. `FavorDesignated`
/// additionally puts every pair won by the designee first, and gives the
/// designee the winning direction of its zero-margin pairs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TieBreakPolicy {
    Lexicographic,
    FavorDesignated(CandidateId),
}

impl TieBreakPolicy {
    fn favors(&self, c: &CandidateId) -> bool {
        matches!(self, TieBreakPolicy::FavorDesignated(p) if p == c)
    }
}

/// One agenda entry: a directed pair and its margin.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AgendaPair {
    pub winner: CandidateId,
    pub loser: CandidateId,
    pub margin: i64,
}

/// One directed pair per unordered pair, sorted by margin descending with
/// policy tie-breaking. The direction is the positive-margin direction, or the
/// policy's choice for zero margins.
pub fn pair_agenda(g: &WeightedMajorityGraph, policy: &TieBreakPolicy) -> Result<Vec<AgendaPair>> {
    let m = g.len();
    if m < 2 {
        return Err(Error::TooFewCandidates { need: 2, got: m });
    }
    let cands = g.candidates();
    let mut pairs = Vec::with_capacity(m * (m - 1) / 2);
    for i in 0..m {
        for j in (i + 1)..m {
            let margin = g.margin_at(i, j);
            // positive direction, else the policy's choice for zero margins
            // (lexicographic default: candidate indices are sorted by name)
            let (w, l) = if margin < 0 || (margin == 0 && policy.favors(&cands[j])) {
                (j, i)
            } else {
                (i, j)
            };
            pairs.push(AgendaPair {
                winner: cands[w].clone(),
                loser: cands[l].clone(),
                margin: g.margin_at(w, l),
            });
        }
    }
    pairs.sort_by(|a, b| {
        b.margin
            .cmp(&a.margin)
            .then_with(|| policy.favors(&b.winner).cmp(&policy.favors(&a.winner)))
            .then_with(|| a.winner.cmp(&b.winner))
            .then_with(|| a.loser.cmp(&b.loser))
    });
    Ok(pairs)
}

/// A pair that could not be locked, with the already-locked path from its
/// loser back to its winner that would have closed a cycle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SkippedPair {
    pub pair: AgendaPair,
    pub cycle_witness: Vec<CandidateId>,
}

/// The result of locking an agenda: an acyclic graph with exactly one source.
#[derive(Debug, Clone)]
pub struct LockGraph {
    candidates: Vec<CandidateId>,
    locked: Vec<(usize, usize)>,
    adjacency: Vec<bool>,
    skipped: Vec<SkippedPair>,
}

impl LockGraph {
    pub fn candidates(&self) -> &[CandidateId] {
        &self.candidates
    }

    pub fn locked_edges(&self) -> Vec<(CandidateId, CandidateId)> {
        self.locked
            .iter()
            .map(|&(w, l)| (self.candidates[w].clone(), self.candidates[l].clone()))
            .collect()
    }

    pub fn skipped(&self) -> &[SkippedPair] {
        &self.skipped
    }

    /// Whether the edge winner -> loser was locked.
    pub fn is_locked(&self, winner: &CandidateId, loser: &CandidateId) -> bool {
        let m = self.candidates.len();
        match (
            self.candidates.binary_search(winner),
            self.candidates.binary_search(loser),
        ) {
            (Ok(w), Ok(l)) => self.adjacency[w * m + l],
            _ => false,
        }
    }

    /// The unique in-degree-0 vertex.
    pub fn source(&self) -> CandidateId {
        let m = self.candidates.len();
        let mut indeg = vec![0usize; m];
        for &(_, l) in &self.locked {
            indeg[l] += 1;
        }
        let sources: Vec<usize> = (0..m).filter(|&v| indeg[v] == 0).collect();
        debug_assert_eq!(sources.len(), 1, "locked graph must have a unique source");
        self.candidates[sources[0]].clone()
    }
}

/// Insert agenda pairs in order; a pair is skipped iff the reverse is already
/// reachable through locked edges.
pub fn lock_pairs(g: &WeightedMajorityGraph, agenda: &[AgendaPair]) -> Result<LockGraph> {
    let m = g.len();
    let cands = g.candidates();
    let mut adjacency = vec![false; m * m];
    let mut locked = Vec::new();
    let mut skipped = Vec::new();
    for pair in agenda {
        let w = g.index_of(&pair.winner)?;
        let l = g.index_of(&pair.loser)?;
        match path_between(&adjacency, m, l, w) {
            Some(path) => skipped.push(SkippedPair {
                pair: pair.clone(),
                cycle_witness: path.into_iter().map(|v| cands[v].clone()).collect(),
            }),
            None => {
                adjacency[w * m + l] = true;
                locked.push((w, l));
            }
        }
    }
    Ok(LockGraph {
        candidates: cands.to_vec(),
        locked,
        adjacency,
        skipped,
    })
}

fn path_between(adj: &[bool], m: usize, from: usize, to: usize) -> Option<Vec<usize>> {
    let mut prev = vec![usize::MAX; m];
    let mut stack = vec![from];
    prev[from] = from;
    while let Some(v) = stack.pop() {
        if v == to {
            let mut path = vec![to];
            let mut cur = to;
            while cur != from {
                cur = prev[cur];
                path.push(cur);
            }
            path.reverse();
            return Some(path);
        }
        for u in 0..m {
            if adj[v * m + u] && prev[u] == usize::MAX {
                prev[u] = v;
                stack.push(u);
            }
        }
    }
    None
}

/// The unique ranked-pairs winner under the given tie-breaking policy.
pub fn ranked_pairs_winner(
    g: &WeightedMajorityGraph,
    policy: &TieBreakPolicy,
) -> Result<CandidateId> {
    if g.is_empty() {
        return Err(Error::NoCandidates);
    }
    if g.len() == 1 {
        return Ok(g.candidates()[0].clone());
    }
    let agenda = pair_agenda(g, policy)?;
    Ok(lock_pairs(g, &agenda)?.source())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profile::{cand, WeightedMajorityGraph};
    use proptest::prelude::*;

    fn example2_wmg() -> WeightedMajorityGraph {
        WeightedMajorityGraph::from_margins(
            [cand("a"), cand("b"), cand("c"), cand("d")],
            &[
                (cand("a"), cand("b"), 7),
                (cand("a"), cand("c"), 5),
                (cand("b"), cand("d"), 1),
                (cand("c"), cand("b"), 7),
                (cand("d"), cand("a"), 3),
                (cand("d"), cand("c"), 3),
            ],
        )
        .unwrap()
    }

    #[test]
    fn agenda_matches_example2_order() {
        let agenda = pair_agenda(&example2_wmg(), &TieBreakPolicy::Lexicographic).unwrap();
        let got: Vec<(String, String, i64)> = agenda
            .iter()
            .map(|p| (p.winner.to_string(), p.loser.to_string(), p.margin))
            .collect();
        let want = [
            ("a", "b", 7),
            ("c", "b", 7),
            ("a", "c", 5),
            ("d", "a", 3),
            ("d", "c", 3),
            ("b", "d", 1),
        ];
        assert_eq!(
            got,
            want.iter()
                .map(|(w, l, v)| (w.to_string(), l.to_string(), *v))
                .collect::<Vec<_>>()
        );
    }

    #[test]
    fn zero_margin_pair_gets_policy_direction() {
        let g = WeightedMajorityGraph::zero([cand("x"), cand("y")]).unwrap();
        let agenda = pair_agenda(&g, &TieBreakPolicy::Lexicographic).unwrap();
        assert_eq!(agenda.len(), 1);
        assert_eq!(agenda[0].winner, cand("x"));
        assert_eq!(agenda[0].loser, cand("y"));

        let fav = pair_agenda(&g, &TieBreakPolicy::FavorDesignated(cand("y"))).unwrap();
        assert_eq!(fav[0].winner, cand("y"));
    }

    #[test]
    fn favoring_does_not_change_distinct_margins() {
        let a = pair_agenda(&example2_wmg(), &TieBreakPolicy::Lexicographic).unwrap();
        let b = pair_agenda(&example2_wmg(), &TieBreakPolicy::FavorDesignated(cand("d"))).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn example2_skips_exactly_bd() {
        let g = example2_wmg();
        let agenda = pair_agenda(&g, &TieBreakPolicy::Lexicographic).unwrap();
        let lg = lock_pairs(&g, &agenda).unwrap();
        assert_eq!(lg.locked_edges().len(), 5);
        assert_eq!(lg.skipped().len(), 1);
        assert_eq!(lg.skipped()[0].pair.winner, cand("b"));
        assert_eq!(lg.skipped()[0].pair.loser, cand("d"));
        assert_eq!(lg.source(), cand("d"));
    }

    #[test]
    fn single_pair_locks() {
        let g = WeightedMajorityGraph::from_margins(
            [cand("x"), cand("y")],
            &[(cand("x"), cand("y"), 2)],
        )
        .unwrap();
        let lg = lock_pairs(
            &g,
            &pair_agenda(&g, &TieBreakPolicy::Lexicographic).unwrap(),
        )
        .unwrap();
        assert_eq!(lg.locked_edges(), vec![(cand("x"), cand("y"))]);
        assert!(lg.skipped().is_empty());
    }

    #[test]
    fn three_cycle_skips_weakest_edge() {
        let g = WeightedMajorityGraph::from_margins(
            [cand("a"), cand("b"), cand("c")],
            &[
                (cand("a"), cand("b"), 6),
                (cand("b"), cand("c"), 4),
                (cand("c"), cand("a"), 2),
            ],
        )
        .unwrap();
        let lg = lock_pairs(
            &g,
            &pair_agenda(&g, &TieBreakPolicy::Lexicographic).unwrap(),
        )
        .unwrap();
        assert_eq!(lg.skipped().len(), 1);
        assert_eq!(
            (
                lg.skipped()[0].pair.winner.clone(),
                lg.skipped()[0].pair.loser.clone()
            ),
            (cand("c"), cand("a"))
        );
        assert_eq!(
            lg.skipped()[0].cycle_witness,
            vec![cand("a"), cand("b"), cand("c")]
        );
        assert_eq!(
            ranked_pairs_winner(&g, &TieBreakPolicy::Lexicographic).unwrap(),
            cand("a")
        );
    }

    #[test]
    fn example2_winner_is_d() {
        assert_eq!(
            ranked_pairs_winner(&example2_wmg(), &TieBreakPolicy::Lexicographic).unwrap(),
            cand("d")
        );
    }

    #[test]
    fn singleton_wins() {
        let g = WeightedMajorityGraph::zero([cand("z")]).unwrap();
        assert_eq!(
            ranked_pairs_winner(&g, &TieBreakPolicy::Lexicographic).unwrap(),
            cand("z")
        );
    }

    fn arb_wmg(max_m: usize, max_margin: i64) -> impl Strategy<Value = WeightedMajorityGraph> {
        (2..=max_m)
            .prop_flat_map(move |m| {
                proptest::collection::vec(-max_margin..=max_margin, m * (m - 1) / 2)
                    .prop_map(move |vals| (m, vals))
            })
            .prop_map(|(m, vals)| {
                let cands: Vec<CandidateId> = (0..m).map(|i| cand(&format!("c{i}"))).collect();
                let mut margins = Vec::new();
                let mut k = 0;
                for i in 0..m {
                    for j in (i + 1)..m {
                        margins.push((cands[i].clone(), cands[j].clone(), vals[k]));
                        k += 1;
                    }
                }
                WeightedMajorityGraph::from_margins(cands, &margins).unwrap()
            })
    }

    proptest! {
        #[test]
        fn lock_graph_has_unique_source(g in arb_wmg(6, 8)) {
            for policy in [
                TieBreakPolicy::Lexicographic,
                TieBreakPolicy::FavorDesignated(g.candidates()[0].clone()),
            ] {
                let agenda = pair_agenda(&g, &policy).unwrap();
                let lg = lock_pairs(&g, &agenda).unwrap();
                let mut indeg = vec![0usize; g.len()];
                for (_, l) in lg.locked_edges() {
                    indeg[g.index_of(&l).unwrap()] += 1;
                }
                prop_assert_eq!(indeg.iter().filter(|&&d| d == 0).count(), 1);
            }
        }

        #[test]
        fn deterministic(g in arb_wmg(6, 8)) {
            let p = TieBreakPolicy::Lexicographic;
            let a1 = pair_agenda(&g, &p).unwrap();
            let a2 = pair_agenda(&g, &p).unwrap();
            prop_assert_eq!(&a1, &a2);
            prop_assert_eq!(
                ranked_pairs_winner(&g, &p).unwrap(),
                ranked_pairs_winner(&g, &p).unwrap()
            );
        }

        #[test]
        fn condorcet_winner_always_wins(g in arb_wmg(6, 8)) {
            if let Some(c) = crate::schulze::condorcet_winner(&g) {
                for policy in [
                    TieBreakPolicy::Lexicographic,
                    TieBreakPolicy::FavorDesignated(g.candidates()[g.len() - 1].clone()),
                ] {
                    prop_assert_eq!(ranked_pairs_winner(&g, &policy).unwrap(), c.clone());
                }
            }
        }
    }
}
