//! Destructive candidate-deletion control for Schulze in the nonunique-winner
//! model, plus the reduction drivers that answer candidate-control questions
//! through path-preserving vertex-cut queries.
//!
//! Dethroning the despised candidate `d` means boosting some rival `c` until
//! `P(c, d) > P(d, c)`; deleting candidates can only lower path strengths.
//! For a rival `c` and a strength threshold `t`, consider the digraph with an
//! edge wherever the margin is at least `t`: deleting a vertex set kills every
//! d-to-c path of strength >= t while keeping a c-to-d path of strength >= t
//! exactly when that set is a path-preserving vertex cut there. The solver
//! queries such cuts for every rival and every achievable threshold.

use std::collections::{BTreeMap, BTreeSet};

use itertools::Itertools;

use crate::control::{winners_of_wmg, ControlAction, ControlInstance, Mode, Rule, WinnerModel};
use crate::cuts::{
    colored_min_inclusion_cut, cppvc_decide, is_path_preserving_cut, mippvc_decide, DiGraph,
};
use crate::error::{Error, Result};
use crate::profile::{CandidateId, WeightedMajorityGraph};
use crate::schulze::{schulze_winner_indices, strongest_paths};

/// A subgraph of strictly-stronger paths between two candidates.
///
/// Contains exactly the vertices lying on some path from `from` to `to` whose
/// every edge has margin strictly above the threshold, with the induced
/// above-threshold edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StrongerPathSubgraph {
    pub vertices: Vec<CandidateId>,
    pub edges: Vec<(CandidateId, CandidateId)>,
}

impl StrongerPathSubgraph {
    pub fn in_neighbors(&self, c: &CandidateId) -> Vec<CandidateId> {
        self.edges
            .iter()
            .filter(|(_, v)| v == c)
            .map(|(u, _)| u.clone())
            .collect()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }
}

/// Vertices and induced edges of all simple paths from `from` to `to` using
/// only edges with margin strictly greater than `threshold`. Empty when no
/// such path exists.
///
/// Membership on a simple path is decided exactly, by path enumeration inside
/// the forward/backward-reachable core (reachability alone overshoots: a
/// vertex can be reachable from `from` and reach `to` while every walk
/// through it revisits a vertex).
#[allow(clippy::needless_range_loop)]
pub fn stronger_path_subgraph(
    g: &WeightedMajorityGraph,
    from: &CandidateId,
    to: &CandidateId,
    threshold: i64,
) -> Result<StrongerPathSubgraph> {
    let s = g.index_of(from)?;
    let t = g.index_of(to)?;
    if s == t {
        return Err(Error::IdenticalPair(from.to_string()));
    }
    let m = g.len();
    let edge = |i: usize, j: usize| i != j && g.margin_at(i, j) > threshold;
    let mut fwd = vec![false; m];
    fwd[s] = true;
    let mut stack = vec![s];
    while let Some(u) = stack.pop() {
        for v in 0..m {
            if !fwd[v] && edge(u, v) {
                fwd[v] = true;
                stack.push(v);
            }
        }
    }
    let mut bwd = vec![false; m];
    bwd[t] = true;
    let mut stack = vec![t];
    while let Some(u) = stack.pop() {
        for v in 0..m {
            if !bwd[v] && edge(v, u) {
                bwd[v] = true;
                stack.push(v);
            }
        }
    }
    let core: Vec<bool> = (0..m).map(|v| fwd[v] && bwd[v]).collect();
    let mut on_path = vec![false; m];
    if core[s] && core[t] {
        let mut visited = vec![false; m];
        let mut path = vec![s];
        visited[s] = true;
        dfs_mark_paths(
            &|i, j| edge(i, j),
            &core,
            t,
            &mut visited,
            &mut path,
            &mut on_path,
        );
    }
    let keep: Vec<usize> = (0..m).filter(|&v| on_path[v]).collect();
    let vertices: Vec<CandidateId> = keep.iter().map(|&v| g.candidates()[v].clone()).collect();
    let mut edges = Vec::new();
    for &u in &keep {
        for &v in &keep {
            if edge(u, v) {
                edges.push((g.candidates()[u].clone(), g.candidates()[v].clone()));
            }
        }
    }
    Ok(StrongerPathSubgraph { vertices, edges })
}

fn dfs_mark_paths(
    edge: &dyn Fn(usize, usize) -> bool,
    core: &[bool],
    target: usize,
    visited: &mut Vec<bool>,
    path: &mut Vec<usize>,
    on_path: &mut Vec<bool>,
) {
    let cur = *path.last().expect("nonempty path");
    if cur == target {
        for &v in path.iter() {
            on_path[v] = true;
        }
        return;
    }
    for v in 0..core.len() {
        if core[v] && !visited[v] && edge(cur, v) {
            visited[v] = true;
            path.push(v);
            dfs_mark_paths(edge, core, target, visited, path, on_path);
            path.pop();
            visited[v] = false;
        }
    }
}

#[derive(Debug, Clone)]
pub struct DcdcOutcome {
    pub decision: bool,
    /// The successful rival and deletion set on a yes-decision.
    pub rival: Option<CandidateId>,
    pub deletions: Vec<CandidateId>,
    /// Number of cut queries issued.
    pub cut_queries: u64,
}

fn is_winner(g: &WeightedMajorityGraph, idx: usize) -> bool {
    schulze_winner_indices(g).contains(&idx)
}

/// Decide destructive control by deleting at most `limit` candidates
/// (nonunique-winner model, Schulze).
///
/// For each rival `c` that could still beat `d` — the direct edge from `d`
/// must not dominate every c-to-d path, and `P(c, d)` must be positive — and
/// for each candidate threshold, a path-preserving vertex cut of size within
/// the limit in the at-least-threshold margin graph is sought. Any hit is a
/// deletion set after which `c` beats `d` strictly.
pub fn solve_dcdc_nonunique(
    g: &WeightedMajorityGraph,
    despised: &CandidateId,
    limit: u32,
) -> Result<DcdcOutcome> {
    let d = g.index_of(despised)?;
    let m = g.len();
    if !is_winner(g, d) {
        return Ok(DcdcOutcome {
            decision: true,
            rival: None,
            deletions: Vec::new(),
            cut_queries: 0,
        });
    }
    if m < 2 {
        return Ok(DcdcOutcome {
            decision: false,
            rival: None,
            deletions: Vec::new(),
            cut_queries: 0,
        });
    }
    let p = strongest_paths(g)?;
    // candidate thresholds: positive margins present in the graph
    let mut thresholds: Vec<i64> = (0..m)
        .flat_map(|i| (0..m).filter(move |&j| j != i).map(move |j| (i, j)))
        .map(|(i, j)| g.margin_at(i, j))
        .filter(|&v| v > 0)
        .collect();
    thresholds.sort_unstable();
    thresholds.dedup();

    let digraph_at = |tau: i64| -> DiGraph {
        let names: Vec<String> = g.candidates().iter().map(|c| c.to_string()).collect();
        let mut dig = DiGraph::new(names.clone(), &[]).expect("distinct names");
        for i in 0..m {
            for j in 0..m {
                if i != j && g.margin_at(i, j) >= tau {
                    dig.add_edge(&names[i], &names[j]).expect("known vertices");
                }
            }
        }
        dig
    };

    let mut cut_queries = 0u64;
    for c in 0..m {
        if c == d {
            continue;
        }
        // rival filter: a dominating direct edge or a nonpositive best path
        // from c to d can never be overcome by deletions
        if g.margin_at(d, c) >= p.strength_at(c, d) || p.strength_at(c, d) <= 0 {
            continue;
        }
        for &tau in &thresholds {
            if tau > p.strength_at(c, d) {
                break;
            }
            let dig = digraph_at(tau);
            cut_queries += 1;
            let pool: Vec<usize> = (0..m).filter(|&v| v != c && v != d).collect();
            let mut hit: Option<Vec<usize>> = None;
            'search: for k in 0..=(limit as usize).min(pool.len()) {
                for combo in pool.iter().copied().combinations(k) {
                    let cut: BTreeSet<usize> = combo.iter().copied().collect();
                    if is_path_preserving_cut(&dig, d, c, &cut) {
                        hit = Some(combo);
                        break 'search;
                    }
                }
            }
            if let Some(cut) = hit {
                return Ok(DcdcOutcome {
                    decision: true,
                    rival: Some(g.candidates()[c].clone()),
                    deletions: cut.iter().map(|&v| g.candidates()[v].clone()).collect(),
                    cut_queries,
                });
            }
        }
    }
    Ok(DcdcOutcome {
        decision: false,
        rival: None,
        deletions: Vec::new(),
        cut_queries,
    })
}

/// Search for a deletion set confined to the in-neighborhood of a single
/// rival: a witness that dethroning, when possible at all, can be done by
/// deleting only candidates that directly beat the boosted rival.
///
/// Independent of [`solve_dcdc_nonunique`]: plain subset enumeration over
/// each rival's in-neighbors.
pub fn in_neighbor_witness(
    g: &WeightedMajorityGraph,
    despised: &CandidateId,
    limit: u32,
) -> Result<Option<(CandidateId, Vec<CandidateId>)>> {
    let d = g.index_of(despised)?;
    let m = g.len();
    if !is_winner(g, d) {
        // already dethroned: report whoever beats the despised candidate
        let p = strongest_paths(g)?;
        let beater = (0..m)
            .find(|&x| x != d && p.strength_at(x, d) > p.strength_at(d, x))
            .expect("a non-winner is beaten by someone");
        return Ok(Some((g.candidates()[beater].clone(), Vec::new())));
    }
    for c in 0..m {
        if c == d {
            continue;
        }
        let innb: Vec<usize> = (0..m)
            .filter(|&v| v != c && v != d && g.margin_at(v, c) > 0)
            .collect();
        for k in 0..=(limit as usize).min(innb.len()) {
            for combo in innb.iter().copied().combinations(k) {
                let deleted: BTreeSet<usize> = combo.iter().copied().collect();
                let keep: Vec<usize> = (0..m).filter(|v| !deleted.contains(v)).collect();
                let sub = g.restrict_indices(&keep);
                let d_pos = keep.iter().position(|&v| v == d).expect("d kept");
                if !is_winner(&sub, d_pos) {
                    return Ok(Some((
                        g.candidates()[c].clone(),
                        combo.iter().map(|&v| g.candidates()[v].clone()).collect(),
                    )));
                }
            }
        }
    }
    Ok(None)
}

fn margin_graph_at(g: &WeightedMajorityGraph, tau: i64) -> DiGraph {
    let names: Vec<String> = g.candidates().iter().map(|c| c.to_string()).collect();
    let mut dig = DiGraph::new(names.clone(), &[]).expect("distinct names");
    let m = g.len();
    for i in 0..m {
        for j in 0..m {
            if i != j && g.margin_at(i, j) >= tau {
                dig.add_edge(&names[i], &names[j]).expect("known vertices");
            }
        }
    }
    dig
}

fn positive_thresholds(g: &WeightedMajorityGraph) -> Vec<i64> {
    let m = g.len();
    let mut out: Vec<i64> = (0..m)
        .flat_map(|i| (0..m).filter(move |&j| j != i).map(move |j| (i, j)))
        .map(|(i, j)| g.margin_at(i, j))
        .filter(|&v| v > 0)
        .collect();
    out.sort_unstable();
    out.dedup();
    out
}

/// Destructive add+delete candidate control for Schulze (nonunique model) via
/// maximum-inclusion path-preserving cut queries.
///
/// All spare candidates are added up front; not adding one is deleting it, so
/// a successful control action is a cut with at most `dc` unlabeled (original)
/// and at least `|D| - ac` labeled (spare) vertices.
pub fn dcac_dc_via_cut(inst: &ControlInstance) -> Result<bool> {
    if inst.mode != Mode::Destructive
        || inst.model != WinnerModel::Nonunique
        || inst.rule != Rule::Schulze
        || !matches!(
            inst.action,
            ControlAction::AddDeleteCandidates { exact: false }
        )
    {
        return Err(Error::InvalidInstance(
            "cut driver handles destructive nonunique Schulze add+delete control".into(),
        ));
    }
    inst.validate()?;
    let p = &inst.distinguished;
    // the goal is already met without touching the election
    let base = inst.base_election()?;
    if !winners_of_wmg(&Rule::Schulze, &base.wmg())?.contains(p) {
        return Ok(true);
    }
    let full = full_wmg(inst)?;
    if crate::schulze::condorcet_winner(&full).as_ref() == Some(p) {
        return Ok(false);
    }
    let labeled: BTreeSet<String> = inst
        .spare_candidates
        .iter()
        .map(|c| c.to_string())
        .collect();
    let x = inst.limits.dc as usize;
    let y = inst
        .spare_candidates
        .len()
        .saturating_sub(inst.limits.ac as usize);
    let thresholds = positive_thresholds(&full);
    let ps = strongest_paths(&full)?;
    let pi = full.index_of(p)?;
    for (ci, c) in full.candidates().iter().enumerate() {
        if c == p {
            continue;
        }
        if full.margin_at(pi, ci) >= ps.strength_at(ci, pi) || ps.strength_at(ci, pi) <= 0 {
            continue;
        }
        for &tau in &thresholds {
            if tau > ps.strength_at(ci, pi) {
                break;
            }
            let dig = margin_graph_at(&full, tau);
            let (yes, _) = mippvc_decide(&dig, p.as_str(), c.as_str(), &labeled, x, y)?;
            if yes {
                return Ok(true);
            }
        }
    }
    Ok(false)
}

/// Destructive grouped candidate control (deletion or addition of whole
/// groups) for Schulze in the nonunique model, via colored cut queries.
pub fn group_control_via_cut(inst: &ControlInstance) -> Result<bool> {
    if inst.mode != Mode::Destructive
        || inst.model != WinnerModel::Nonunique
        || inst.rule != Rule::Schulze
        || !inst.action.grouped()
    {
        return Err(Error::InvalidInstance(
            "cut driver handles destructive nonunique Schulze grouped control".into(),
        ));
    }
    inst.validate()?;
    let p = &inst.distinguished;
    let base = inst.base_election()?;
    if !winners_of_wmg(&Rule::Schulze, &base.wmg())?.contains(p) {
        return Ok(true);
    }
    let full = full_wmg(inst)?;
    if crate::schulze::condorcet_winner(&full).as_ref() == Some(p) {
        return Ok(false);
    }
    let groups = inst.groups.as_ref().expect("validated");
    let deleting = inst.action == ControlAction::DeleteCandidateGroups;
    let thresholds = positive_thresholds(&full);
    let ps = strongest_paths(&full)?;
    let pi = full.index_of(p)?;
    for (ci, c) in full.candidates().iter().enumerate() {
        if c == p {
            continue;
        }
        if full.margin_at(pi, ci) >= ps.strength_at(ci, pi) || ps.strength_at(ci, pi) <= 0 {
            continue;
        }
        for &tau in &thresholds {
            if tau > ps.strength_at(ci, pi) {
                break;
            }
            let dig = margin_graph_at(&full, tau);
            let yes = if deleting {
                // real group labels: the classes of the despised candidate
                // and of the rival are protected by the cut problem itself
                let coloring: BTreeMap<String, String> = full
                    .candidates()
                    .iter()
                    .map(|cd| (cd.to_string(), groups[cd].clone()))
                    .collect();
                cppvc_decide(
                    &dig,
                    p.as_str(),
                    c.as_str(),
                    &coloring,
                    inst.limits.dc as usize,
                )?
                .0
            } else {
                // grouped addition: the cut is the not-added side of D; the
                // addable unit is a group's unregistered part, so registered
                // candidates get sentinel colors of their own
                let registered: BTreeSet<&CandidateId> = inst.registered.iter().collect();
                let coloring: BTreeMap<String, String> = full
                    .candidates()
                    .iter()
                    .map(|cd| {
                        let label = if registered.contains(cd) {
                            format!("\u{1}reg:{cd}")
                        } else {
                            groups[cd].clone()
                        };
                        (cd.to_string(), label)
                    })
                    .collect();
                let labeled: BTreeSet<String> = inst
                    .spare_candidates
                    .iter()
                    .filter(|s| *s != c)
                    .map(|s| s.to_string())
                    .collect();
                let min_labeled = inst
                    .spare_candidates
                    .len()
                    .saturating_sub(inst.limits.ac as usize);
                colored_min_inclusion_cut(
                    &dig,
                    p.as_str(),
                    c.as_str(),
                    &coloring,
                    &labeled,
                    min_labeled,
                )?
                .0
            };
            if yes {
                return Ok(true);
            }
        }
    }
    Ok(false)
}

/// WMG over C ∪ D from the instance's registered ballots.
fn full_wmg(inst: &ControlInstance) -> Result<WeightedMajorityGraph> {
    let e = crate::profile::Election::new(inst.all_candidates(), inst.ballots.clone())?;
    Ok(e.wmg())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::control::{brute_candidate_deletion_wmg, Mode, Rule, WinnerModel};
    use crate::profile::cand;

    fn wmg(cands: &[&str], edges: &[(&str, &str, i64)]) -> WeightedMajorityGraph {
        WeightedMajorityGraph::from_margins(
            cands.iter().map(|c| cand(c)),
            &edges
                .iter()
                .map(|(u, v, w)| (cand(u), cand(v), *w))
                .collect::<Vec<_>>(),
        )
        .unwrap()
    }

    /// d beats c only through v1 (strength 4) and v2 (strength 2); both must
    /// go, and both directly beat c.
    fn tie_breaking_instance() -> WeightedMajorityGraph {
        wmg(
            &["c", "d", "v1", "v2"],
            &[
                ("d", "v1", 4),
                ("v1", "c", 4),
                ("d", "v2", 2),
                ("v2", "c", 2),
                ("c", "d", 2),
            ],
        )
    }

    #[test]
    fn equal_strength_paths_require_both_deletions() {
        let g = tie_breaking_instance();
        let out = solve_dcdc_nonunique(&g, &cand("d"), 2).unwrap();
        assert!(out.decision);
        assert_eq!(out.deletions, vec![cand("v1"), cand("v2")]);
        assert!(!solve_dcdc_nonunique(&g, &cand("d"), 1).unwrap().decision);
    }

    /// An upstream in-neighbor cuts every strong path alone even though the
    /// per-threshold in-neighborhood is larger.
    #[test]
    fn single_upstream_cut_vertex_suffices() {
        let g = wmg(
            &["c0", "c1", "c2", "c3", "c4"],
            &[
                ("c0", "c1", 4),
                ("c0", "c4", 6),
                ("c1", "c3", 4),
                ("c1", "c4", 2),
                ("c2", "c0", 6),
                ("c3", "c0", 6),
                ("c3", "c2", 10),
                ("c3", "c4", 8),
                ("c4", "c2", 8),
            ],
        );
        let out = solve_dcdc_nonunique(&g, &cand("c1"), 1).unwrap();
        assert!(out.decision);
        assert_eq!(out.deletions, vec![cand("c3")]);
        let (brute, _) = brute_candidate_deletion_wmg(
            &g,
            &Rule::Schulze,
            Mode::Destructive,
            WinnerModel::Nonunique,
            &cand("c1"),
            1,
        )
        .unwrap();
        assert!(brute);
    }

    #[test]
    fn already_dethroned_needs_nothing() {
        let g = wmg(&["a", "b"], &[("a", "b", 2)]);
        let out = solve_dcdc_nonunique(&g, &cand("b"), 0).unwrap();
        assert!(out.decision);
        assert!(out.deletions.is_empty());
    }

    #[test]
    fn condorcet_winner_cannot_be_dethroned() {
        let g = wmg(
            &["a", "b", "d"],
            &[("d", "a", 2), ("d", "b", 2), ("a", "b", 2)],
        );
        assert!(!solve_dcdc_nonunique(&g, &cand("d"), 2).unwrap().decision);
    }

    #[test]
    fn subgraph_has_exactly_the_stronger_chain() {
        // 4-weight chain x1 -> x2 -> x3 -> p reachable from k, plus 2-weight
        // clutter that must not show up above threshold 2
        let g = wmg(
            &["a", "k", "p", "x1", "x2", "x3"],
            &[
                ("k", "x1", 4),
                ("x1", "x2", 4),
                ("x2", "x3", 4),
                ("x3", "p", 4),
                ("p", "a", 4),
                ("a", "x1", 4),
                ("a", "k", 2),
            ],
        );
        let sub = stronger_path_subgraph(&g, &cand("k"), &cand("p"), 2).unwrap();
        assert_eq!(
            sub.vertices,
            vec![cand("k"), cand("p"), cand("x1"), cand("x2"), cand("x3")]
        );
        assert_eq!(sub.in_neighbors(&cand("p")), vec![cand("x3")]);
    }

    /// Independent oracle: enumerate permutations of intermediate vertices
    /// and union the vertices of every valid above-threshold path.
    fn subgraph_vertices_by_permutation(
        g: &WeightedMajorityGraph,
        from: &CandidateId,
        to: &CandidateId,
        threshold: i64,
    ) -> Vec<CandidateId> {
        use itertools::Itertools;
        let m = g.len();
        let s = g.index_of(from).unwrap();
        let t = g.index_of(to).unwrap();
        let mid: Vec<usize> = (0..m).filter(|&v| v != s && v != t).collect();
        let mut members = vec![false; m];
        for r in 0..=mid.len() {
            for perm in mid.iter().copied().permutations(r) {
                let mut path = vec![s];
                path.extend(perm);
                path.push(t);
                if path.windows(2).all(|w| g.margin_at(w[0], w[1]) > threshold) {
                    for &v in &path {
                        members[v] = true;
                    }
                }
            }
        }
        (0..m)
            .filter(|&v| members[v])
            .map(|v| g.candidates()[v].clone())
            .collect()
    }

    #[test]
    fn subgraph_matches_path_union_oracle() {
        use rand::rngs::StdRng;
        use rand::{Rng, SeedableRng};
        let mut rng = StdRng::seed_from_u64(7);
        for _ in 0..300 {
            let m = rng.gen_range(2..=5);
            let g = crate::verify::random_wmg(&mut rng, m, 6, false);
            let s = rng.gen_range(0..m);
            let mut t = rng.gen_range(0..m);
            if t == s {
                t = (t + 1) % m;
            }
            let threshold = rng.gen_range(-3..=6);
            let from = g.candidates()[s].clone();
            let to = g.candidates()[t].clone();
            let sub = stronger_path_subgraph(&g, &from, &to, threshold).unwrap();
            let oracle = subgraph_vertices_by_permutation(&g, &from, &to, threshold);
            assert_eq!(sub.vertices, oracle, "{g:?} {from} {to} thr {threshold}");
        }
    }

    #[test]
    fn subgraph_empty_at_max_threshold() {
        let g = tie_breaking_instance();
        let sub = stronger_path_subgraph(&g, &cand("d"), &cand("c"), 4).unwrap();
        assert!(sub.is_empty());
    }

    #[test]
    fn witness_in_neighbors_only() {
        let g = tie_breaking_instance();
        let w = in_neighbor_witness(&g, &cand("d"), 2).unwrap();
        let (rival, dels) = w.unwrap();
        assert_eq!(rival, cand("c"));
        assert_eq!(dels, vec![cand("v1"), cand("v2")]);
        for v in [cand("v1"), cand("v2")] {
            assert!(g.margin(&v, &cand("c")).unwrap() > 0);
        }
    }
}
