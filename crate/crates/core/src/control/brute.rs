//! Exhaustive decision solver for control instances.
//!
//! Actions are enumerated in a fixed order (smaller actions first, then
//! lexicographically), so the reported witness is canonical. Candidate
//! actions are evaluated on submatrices of the full margin matrix over
//! C ∪ D; voter actions adjust margins by per-ballot-class contribution
//! deltas. The enumeration refuses to start when the estimated number of
//! actions exceeds the guard, unless forced.

use std::collections::BTreeSet;

use itertools::Itertools;

use crate::error::{Error, Result};
use crate::profile::{Ballot, CandidateId, Election, WeightedMajorityGraph};
use crate::schulze::schulze_winner_indices;

use super::{
    goal_met, goal_met_winners, winners_of_wmg, ControlAction, ControlInstance, Mode, Rule,
    WinnerModel,
};

/// Default cap on the number of enumerated actions.
pub const DEFAULT_GUARD: u64 = 10_000_000;

#[derive(Debug, Clone, Copy)]
pub struct SolveOptions {
    pub guard: u64,
    pub force: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            guard: DEFAULT_GUARD,
            force: false,
        }
    }
}

/// Where a bribed ballot came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BallotSource {
    /// Index into the instance's registered ballot list V.
    Registered(usize),
    /// Index into the instance's spare ballot list U.
    Added(usize),
}

/// A successful control action, replayable against its instance.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ControlWitness {
    pub added_candidates: Vec<CandidateId>,
    pub deleted_candidates: Vec<CandidateId>,
    /// (index into V, copies removed)
    pub deleted_ballots: Vec<(usize, u64)>,
    /// (index into U, copies added)
    pub added_ballots: Vec<(usize, u64)>,
    /// One copy of the source ballot is replaced by the given ballot, which
    /// ranks exactly the active candidates.
    pub bribes: Vec<(BallotSource, Ballot)>,
}

#[derive(Debug, Clone)]
pub struct SolveOutcome {
    pub decision: bool,
    pub witness: Option<ControlWitness>,
    /// Number of evaluated actions.
    pub evaluated: u64,
}

struct BallotClass {
    contrib: Vec<i64>,
    mult: u64,
    /// (index into the original list, copies) making up this class.
    members: Vec<(usize, u64)>,
}

fn contribution(all: &[CandidateId], ballot: &Ballot) -> Vec<i64> {
    let m = all.len();
    let mut c = vec![0i64; m * m];
    let mut pos = vec![usize::MAX; m];
    for (k, name) in ballot.ranking().iter().enumerate() {
        let i = all.binary_search(name).expect("validated ballot");
        pos[i] = k;
    }
    for i in 0..m {
        for j in (i + 1)..m {
            if pos[i] == usize::MAX || pos[j] == usize::MAX {
                continue;
            }
            if pos[i] < pos[j] {
                c[i * m + j] += 1;
                c[j * m + i] -= 1;
            } else {
                c[j * m + i] += 1;
                c[i * m + j] -= 1;
            }
        }
    }
    c
}

fn build_classes(all: &[CandidateId], ballots: &[(Ballot, u64)]) -> Vec<BallotClass> {
    let mut classes: Vec<(Ballot, BallotClass)> = Vec::new();
    for (i, (b, mult)) in ballots.iter().enumerate() {
        if let Some((_, cls)) = classes.iter_mut().find(|(rb, _)| rb == b) {
            cls.mult += mult;
            cls.members.push((i, *mult));
        } else {
            classes.push((
                b.clone(),
                BallotClass {
                    contrib: contribution(all, b),
                    mult: *mult,
                    members: vec![(i, *mult)],
                },
            ));
        }
    }
    classes.into_iter().map(|(_, c)| c).collect()
}

fn binom(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    let mut r: u128 = 1;
    for i in 0..k {
        r = r.saturating_mul(n - i) / (i + 1);
    }
    r
}

fn count_subsets(n: usize, max: usize, exact: bool) -> u128 {
    if exact {
        binom(n as u128, max as u128)
    } else {
        (0..=max.min(n)).map(|k| binom(n as u128, k as u128)).sum()
    }
}

/// Number of count vectors (k_i <= mult_i, sum == total), or sum <= total.
fn count_multiset_choices(mults: &[u64], total: u64, exact: bool) -> u128 {
    let t = total as usize;
    let mut dp = vec![0u128; t + 1];
    dp[0] = 1;
    for &m in mults {
        let mut next = vec![0u128; t + 1];
        for s in 0..=t {
            if dp[s] == 0 {
                continue;
            }
            let top = (m as usize).min(t - s);
            for k in 0..=top {
                next[s + k] = next[s + k].saturating_add(dp[s]);
            }
        }
        dp = next;
    }
    if exact {
        dp[t]
    } else {
        dp.iter().fold(0u128, |a, &b| a.saturating_add(b))
    }
}

fn factorial(n: u128) -> u128 {
    (1..=n).fold(1u128, |a, b| a.saturating_mul(b))
}

/// Enumerate count vectors over `mults` with the given total; calls `f` with
/// slices of (class index, count), smallest-first lexicographic order.
fn for_each_multiset_choice<F: FnMut(&[(usize, u64)]) -> bool>(
    mults: &[u64],
    total: u64,
    exact: bool,
    f: &mut F,
) -> bool {
    fn rec<F: FnMut(&[(usize, u64)]) -> bool>(
        mults: &[u64],
        i: usize,
        remaining: u64,
        exact: bool,
        acc: &mut Vec<(usize, u64)>,
        f: &mut F,
    ) -> bool {
        if i == mults.len() {
            if remaining == 0 || !exact {
                return f(acc);
            }
            return true;
        }
        let top = mults[i].min(remaining);
        for k in 0..=top {
            if k > 0 {
                acc.push((i, k));
            }
            let cont = rec(mults, i + 1, remaining - k, exact, acc, f);
            if k > 0 {
                acc.pop();
            }
            if !cont {
                return false;
            }
        }
        true
    }
    if exact {
        rec(mults, 0, total, true, &mut Vec::new(), f)
    } else {
        for t in 0..=total {
            if !rec(mults, 0, t, true, &mut Vec::new(), f) {
                return false;
            }
        }
        true
    }
}

/// Candidate index subsets of `pool`, sizes ascending then lexicographic.
fn for_each_subset<F: FnMut(&[usize]) -> bool>(
    pool: &[usize],
    max: usize,
    exact: bool,
    f: &mut F,
) -> bool {
    let sizes: Vec<usize> = if exact {
        vec![max]
    } else {
        (0..=max.min(pool.len())).collect()
    };
    for k in sizes {
        if k > pool.len() {
            return true; // infeasible exact size: nothing to enumerate
        }
        for combo in pool.iter().copied().combinations(k) {
            if !f(&combo) {
                return false;
            }
        }
    }
    true
}

struct Engine<'a> {
    inst: &'a ControlInstance,
    all: Vec<CandidateId>,
    m: usize,
    dist: usize,
    base_margin: Vec<i64>,
    v_classes: Vec<BallotClass>,
    u_classes: Vec<BallotClass>,
    evaluated: u64,
}

impl<'a> Engine<'a> {
    fn new(inst: &'a ControlInstance) -> Engine<'a> {
        let all = inst.all_candidates();
        let m = all.len();
        let v_classes = build_classes(&all, &inst.ballots);
        let u_classes = build_classes(&all, &inst.spare_ballots);
        let mut base_margin = vec![0i64; m * m];
        for cls in &v_classes {
            for (k, v) in cls.contrib.iter().enumerate() {
                base_margin[k] += v * cls.mult as i64;
            }
        }
        let dist = all.binary_search(&inst.distinguished).expect("validated");
        Engine {
            inst,
            all,
            m,
            dist,
            base_margin,
            v_classes,
            u_classes,
            evaluated: 0,
        }
    }

    /// Winner ids for the given active candidate set and ballot adjustments.
    fn winners(
        &mut self,
        active: &[usize],
        vdel: &[(usize, u64)],
        uadd: &[(usize, u64)],
        bribes: &[(bool, usize, &Ballot)],
    ) -> Result<Vec<CandidateId>> {
        self.evaluated += 1;
        let k = active.len();
        let m = self.m;
        let mut margin = vec![0i64; k * k];
        for (a, &i) in active.iter().enumerate() {
            for (b, &j) in active.iter().enumerate() {
                if a != b {
                    margin[a * k + b] = self.base_margin[i * m + j];
                }
            }
        }
        fn apply(margin: &mut [i64], active: &[usize], m: usize, contrib: &[i64], factor: i64) {
            let k = active.len();
            for (a, &i) in active.iter().enumerate() {
                for (b, &j) in active.iter().enumerate() {
                    if a != b {
                        margin[a * k + b] += factor * contrib[i * m + j];
                    }
                }
            }
        }
        for &(cls, count) in vdel {
            apply(
                &mut margin,
                active,
                m,
                &self.v_classes[cls].contrib,
                -(count as i64),
            );
        }
        for &(cls, count) in uadd {
            apply(
                &mut margin,
                active,
                m,
                &self.u_classes[cls].contrib,
                count as i64,
            );
        }
        for &(from_u, cls, replacement) in bribes {
            let contrib = if from_u {
                self.u_classes[cls].contrib.clone()
            } else {
                self.v_classes[cls].contrib.clone()
            };
            apply(&mut margin, active, m, &contrib, -1);
            let rc = contribution(&self.all, replacement);
            apply(&mut margin, active, m, &rc, 1);
        }
        let active_ids: Vec<CandidateId> = active.iter().map(|&i| self.all[i].clone()).collect();
        let g = WeightedMajorityGraph::from_matrix(active_ids, margin)?;
        winners_of_wmg(&self.inst.rule, &g)
    }

    fn goal(&mut self, winners: &[CandidateId]) -> bool {
        goal_met_winners(
            self.inst.mode,
            self.inst.model,
            &self.inst.distinguished,
            winners,
        )
    }
}

fn candidate_witness(all: &[CandidateId], deleted: &[usize], added: &[usize]) -> ControlWitness {
    ControlWitness {
        deleted_candidates: deleted.iter().map(|&i| all[i].clone()).collect(),
        added_candidates: added.iter().map(|&i| all[i].clone()).collect(),
        ..ControlWitness::default()
    }
}

/// Expand class-level counts to original-list entries for the witness.
fn expand_counts(classes: &[BallotClass], counts: &[(usize, u64)]) -> Vec<(usize, u64)> {
    let mut out = Vec::new();
    for &(cls, mut need) in counts {
        for &(orig, avail) in &classes[cls].members {
            if need == 0 {
                break;
            }
            let take = need.min(avail);
            out.push((orig, take));
            need -= take;
        }
    }
    out.sort_unstable();
    out
}

/// Estimated number of enumerated actions.
fn estimate(inst: &ControlInstance) -> u128 {
    let pool = inst.registered.len().saturating_sub(1);
    let spare = inst.spare_candidates.len();
    let vmults: Vec<u64> = {
        // class multiplicities after dedup
        let all = inst.all_candidates();
        build_classes(&all, &inst.ballots)
            .iter()
            .map(|c| c.mult)
            .collect()
    };
    let umults: Vec<u64> = {
        let all = inst.all_candidates();
        build_classes(&all, &inst.spare_ballots)
            .iter()
            .map(|c| c.mult)
            .collect()
    };
    let l = inst.limits;
    match inst.action {
        ControlAction::AddCandidates => count_subsets(spare, l.ac as usize, false),
        ControlAction::DeleteCandidates => count_subsets(pool, l.dc as usize, false),
        ControlAction::AddDeleteCandidates { exact } => count_subsets(pool, l.dc as usize, exact)
            .saturating_mul(count_subsets(spare, l.ac as usize, exact)),
        ControlAction::ReplaceCandidates { exact } => {
            let sizes: Vec<usize> = if exact {
                vec![l.rc as usize]
            } else {
                (0..=l.rc as usize).collect()
            };
            sizes
                .iter()
                .map(|&r| {
                    binom(pool as u128, r as u128).saturating_mul(binom(spare as u128, r as u128))
                })
                .fold(0u128, |a, b| a.saturating_add(b))
        }
        ControlAction::AddDeleteVoters { exact } => {
            count_multiset_choices(&vmults, l.dv as u64, exact)
                .saturating_mul(count_multiset_choices(&umults, l.av as u64, exact))
        }
        ControlAction::ReplaceVoters { exact } => {
            let sizes: Vec<u64> = if exact {
                vec![l.rv as u64]
            } else {
                (0..=l.rv as u64).collect()
            };
            sizes
                .iter()
                .map(|&r| {
                    count_multiset_choices(&vmults, r, true)
                        .saturating_mul(count_multiset_choices(&umults, r, true))
                })
                .fold(0u128, |a, b| a.saturating_add(b))
        }
        ControlAction::Multimode { exact } => {
            let cand = count_subsets(pool, l.dc as usize, exact).saturating_mul(count_subsets(
                spare,
                l.ac as usize,
                exact,
            ));
            let voter = count_multiset_choices(&vmults, l.dv as u64, exact)
                .saturating_mul(count_multiset_choices(&umults, l.av as u64, exact));
            let active_max = (inst.registered.len() + spare.min(l.ac as usize)) as u128;
            let nclasses = (vmults.len() + umults.len()) as u128;
            let targets = binom(nclasses + l.bribes as u128, l.bribes as u128);
            let perms = factorial(active_max).saturating_pow(l.bribes);
            cand.saturating_mul(voter)
                .saturating_mul(targets)
                .saturating_mul(perms)
        }
        ControlAction::DeleteCandidateGroups | ControlAction::AddCandidateGroups => {
            let ng = inst
                .groups
                .as_ref()
                .map(|g| g.values().collect::<BTreeSet<_>>().len())
                .unwrap_or(0);
            count_subsets(ng, ng, false)
        }
    }
}

/// Decide the instance by exhaustive enumeration; the first successful action
/// in enumeration order is returned as the witness.
pub fn solve_control(inst: &ControlInstance, opts: &SolveOptions) -> Result<SolveOutcome> {
    inst.validate()?;
    let est = estimate(inst);
    if est > opts.guard as u128 && !opts.force {
        return Err(Error::SearchSpaceExceeded {
            estimate: est,
            guard: opts.guard,
        });
    }
    let mut eng = Engine::new(inst);
    let all = eng.all.clone();
    let reg_idx: Vec<usize> = inst
        .registered
        .iter()
        .map(|c| all.binary_search(c).unwrap())
        .collect();
    let spare_idx: Vec<usize> = inst
        .spare_candidates
        .iter()
        .map(|c| all.binary_search(c).unwrap())
        .collect();
    let del_pool: Vec<usize> = reg_idx.iter().copied().filter(|&i| i != eng.dist).collect();

    let active_for = |deleted: &[usize], added: &[usize]| -> Vec<usize> {
        let deleted: BTreeSet<usize> = deleted.iter().copied().collect();
        let mut act: Vec<usize> = reg_idx
            .iter()
            .copied()
            .filter(|i| !deleted.contains(i))
            .chain(added.iter().copied())
            .collect();
        act.sort_unstable();
        act
    };

    let mut found: Option<ControlWitness> = None;
    let l = inst.limits;

    match inst.action {
        ControlAction::AddCandidates
        | ControlAction::DeleteCandidates
        | ControlAction::AddDeleteCandidates { .. } => {
            let (maxd, maxa, exact) = match inst.action {
                ControlAction::AddCandidates => (0, l.ac as usize, false),
                ControlAction::DeleteCandidates => (l.dc as usize, 0, false),
                ControlAction::AddDeleteCandidates { exact } => {
                    (l.dc as usize, l.ac as usize, exact)
                }
                _ => unreachable!(),
            };
            let _ = for_each_subset(&del_pool, maxd, exact, &mut |dels| {
                for_each_subset(&spare_idx, maxa, exact, &mut |adds| {
                    let active = active_for(dels, adds);
                    let w = eng.winners(&active, &[], &[], &[]).expect("evaluation");
                    if eng.goal(&w) {
                        found = Some(candidate_witness(&eng.all, dels, adds));
                        return false;
                    }
                    true
                })
            });
        }
        ControlAction::ReplaceCandidates { exact } => {
            let sizes: Vec<usize> = if exact {
                vec![l.rc as usize]
            } else {
                (0..=l.rc as usize).collect()
            };
            for r in sizes {
                if r > del_pool.len() || r > spare_idx.len() {
                    continue;
                }
                let mut stop = false;
                let _ = for_each_subset(&del_pool, r, true, &mut |dels| {
                    for_each_subset(&spare_idx, r, true, &mut |adds| {
                        let active = active_for(dels, adds);
                        let w = eng.winners(&active, &[], &[], &[]).expect("evaluation");
                        if eng.goal(&w) {
                            found = Some(candidate_witness(&eng.all, dels, adds));
                            stop = true;
                            return false;
                        }
                        true
                    })
                });
                if stop {
                    break;
                }
            }
        }
        ControlAction::AddDeleteVoters { exact } | ControlAction::ReplaceVoters { exact } => {
            let replace = matches!(inst.action, ControlAction::ReplaceVoters { .. });
            let vmults: Vec<u64> = eng.v_classes.iter().map(|c| c.mult).collect();
            let umults: Vec<u64> = eng.u_classes.iter().map(|c| c.mult).collect();
            let active = active_for(&[], &[]);
            let mut run = |dv: u64, av: u64, pair_exact: bool| -> bool {
                // returns true to continue enumeration
                let mut cont = true;
                let _ = for_each_multiset_choice(&vmults, dv, pair_exact, &mut |dels| {
                    let dels = dels.to_vec();
                    for_each_multiset_choice(&umults, av, pair_exact, &mut |adds| {
                        let w = eng.winners(&active, &dels, adds, &[]).expect("evaluation");
                        if eng.goal(&w) {
                            found = Some(ControlWitness {
                                deleted_ballots: expand_counts(&eng.v_classes, &dels),
                                added_ballots: expand_counts(&eng.u_classes, adds),
                                ..ControlWitness::default()
                            });
                            cont = false;
                            return false;
                        }
                        true
                    })
                });
                cont
            };
            if replace {
                let sizes: Vec<u64> = if exact {
                    vec![l.rv as u64]
                } else {
                    (0..=l.rv as u64).collect()
                };
                for r in sizes {
                    if !run(r, r, true) {
                        break;
                    }
                }
            } else {
                run(l.dv as u64, l.av as u64, exact);
            }
        }
        ControlAction::Multimode { exact } => {
            solve_multimode(
                inst,
                &mut eng,
                &del_pool,
                &spare_idx,
                &active_for,
                exact,
                &mut found,
            );
        }
        ControlAction::DeleteCandidateGroups | ControlAction::AddCandidateGroups => {
            let groups = inst.groups.as_ref().expect("validated");
            let deleting = inst.action == ControlAction::DeleteCandidateGroups;
            let (universe, budget) = if deleting {
                (&reg_idx, l.dc as u64)
            } else {
                (&spare_idx, l.ac as u64)
            };
            // group classes over the relevant candidate side, sorted by label
            let mut labels: Vec<String> = universe
                .iter()
                .map(|&i| groups[&all[i]].clone())
                .collect::<BTreeSet<_>>()
                .into_iter()
                .collect();
            labels.sort();
            let classes: Vec<Vec<usize>> = labels
                .iter()
                .map(|lab| {
                    universe
                        .iter()
                        .copied()
                        .filter(|&i| &groups[&all[i]] == lab)
                        .collect()
                })
                .collect();
            let dist_label = groups[&all[eng.dist]].clone();
            let usable: Vec<usize> = (0..classes.len())
                .filter(|&gi| !deleting || labels[gi] != dist_label)
                .collect();
            // subsets of whole groups with total size within budget
            fn rec(
                usable: &[usize],
                classes: &[Vec<usize>],
                k: usize,
                budget: u64,
                acc: &mut Vec<usize>,
                f: &mut dyn FnMut(&[usize]) -> bool,
            ) -> bool {
                if k == usable.len() {
                    return f(acc);
                }
                if !rec(usable, classes, k + 1, budget, acc, f) {
                    return false;
                }
                let gi = usable[k];
                let sz = classes[gi].len() as u64;
                if sz <= budget {
                    let before = acc.len();
                    acc.extend(classes[gi].iter().copied());
                    let cont = rec(usable, classes, k + 1, budget - sz, acc, f);
                    acc.truncate(before);
                    if !cont {
                        return false;
                    }
                }
                true
            }
            let mut results: Vec<Vec<usize>> = Vec::new();
            rec(
                &usable,
                &classes,
                0,
                budget,
                &mut Vec::new(),
                &mut |sel: &[usize]| {
                    results.push(sel.to_vec());
                    true
                },
            );
            // canonical order: fewer candidates first, then lexicographic
            results.sort_by(|a, b| {
                let mut sa = a.clone();
                let mut sb = b.clone();
                sa.sort_unstable();
                sb.sort_unstable();
                sa.len().cmp(&sb.len()).then_with(|| sa.cmp(&sb))
            });
            for sel in results {
                let mut sel = sel.clone();
                sel.sort_unstable();
                let (dels, adds): (Vec<usize>, Vec<usize>) = if deleting {
                    (sel.clone(), Vec::new())
                } else {
                    (Vec::new(), sel.clone())
                };
                let active = active_for(&dels, &adds);
                let w = eng.winners(&active, &[], &[], &[])?;
                if eng.goal(&w) {
                    found = Some(candidate_witness(&eng.all, &dels, &adds));
                    break;
                }
            }
        }
    }

    Ok(SolveOutcome {
        decision: found.is_some(),
        witness: found,
        evaluated: eng.evaluated,
    })
}

type ActiveSetFn<'a> = &'a dyn Fn(&[usize], &[usize]) -> Vec<usize>;

/// Multimode: candidate actions x voter actions x bribery.
#[allow(clippy::too_many_arguments)]
fn solve_multimode(
    inst: &ControlInstance,
    eng: &mut Engine,
    del_pool: &[usize],
    spare_idx: &[usize],
    active_for: ActiveSetFn,
    exact: bool,
    found: &mut Option<ControlWitness>,
) {
    let l = inst.limits;
    let vmults: Vec<u64> = eng.v_classes.iter().map(|c| c.mult).collect();
    let umults: Vec<u64> = eng.u_classes.iter().map(|c| c.mult).collect();
    for_each_subset(del_pool, l.dc as usize, exact, &mut |dels| {
        let dels = dels.to_vec();
        for_each_subset(spare_idx, l.ac as usize, exact, &mut |adds| {
            let active = active_for(&dels, adds);
            let active_ids: Vec<CandidateId> = active.iter().map(|&i| eng.all[i].clone()).collect();
            let mut cont = true;
            for_each_multiset_choice(&vmults, l.dv as u64, exact, &mut |vdel| {
                let vdel = vdel.to_vec();
                for_each_multiset_choice(&umults, l.av as u64, exact, &mut |uadd| {
                    // remaining copies available for bribery: (is_u, class, count)
                    let mut remaining: Vec<(bool, usize, u64)> = Vec::new();
                    for (cls, c) in eng.v_classes.iter().enumerate() {
                        let deleted: u64 = vdel
                            .iter()
                            .filter(|&&(i, _)| i == cls)
                            .map(|&(_, k)| k)
                            .sum();
                        if c.mult > deleted {
                            remaining.push((false, cls, c.mult - deleted));
                        }
                    }
                    for &(cls, k) in uadd {
                        remaining.push((true, cls, k));
                    }
                    let rem_mults: Vec<u64> = remaining.iter().map(|&(_, _, k)| k).collect();
                    let mut cont2 = true;
                    for_each_multiset_choice(&rem_mults, l.bribes as u64, exact, &mut |targets| {
                        // enumerate replacement ballots for each bribed copy
                        let slots: Vec<(bool, usize)> = targets
                            .iter()
                            .flat_map(|&(t, k)| {
                                std::iter::repeat_n((remaining[t].0, remaining[t].1), k as usize)
                            })
                            .collect();
                        let mut sorted_ids = active_ids.clone();
                        sorted_ids.sort();
                        let mut stop = false;
                        enumerate_replacements(&sorted_ids, &slots, &mut |rs| {
                            let bribes: Vec<(bool, usize, &Ballot)> = slots
                                .iter()
                                .zip(rs.iter())
                                .map(|(&(u, cls), b)| (u, cls, *b))
                                .collect();
                            let w = eng
                                .winners(&active, &vdel, uadd, &bribes)
                                .expect("evaluation");
                            if eng.goal(&w) {
                                *found = Some(ControlWitness {
                                    deleted_candidates: dels
                                        .iter()
                                        .map(|&i| eng.all[i].clone())
                                        .collect(),
                                    added_candidates: adds
                                        .iter()
                                        .map(|&i| eng.all[i].clone())
                                        .collect(),
                                    deleted_ballots: expand_counts(&eng.v_classes, &vdel),
                                    added_ballots: expand_counts(&eng.u_classes, uadd),
                                    bribes: slots
                                        .iter()
                                        .zip(rs.iter())
                                        .map(|(&(u, cls), b)| {
                                            let src = if u {
                                                BallotSource::Added(eng.u_classes[cls].members[0].0)
                                            } else {
                                                BallotSource::Registered(
                                                    eng.v_classes[cls].members[0].0,
                                                )
                                            };
                                            (src, (*b).clone())
                                        })
                                        .collect(),
                                });
                                stop = true;
                                return false;
                            }
                            true
                        });
                        if stop {
                            cont2 = false;
                            return false;
                        }
                        true
                    });
                    if !cont2 {
                        cont = false;
                        return false;
                    }
                    true
                })
            });
            cont
        })
    });
}

/// All assignments of replacement ballots (permutations of `ids`) to slots,
/// in lexicographic order per slot.
fn enumerate_replacements<F: FnMut(&[&Ballot]) -> bool>(
    ids: &[CandidateId],
    slots: &[(bool, usize)],
    f: &mut F,
) -> bool {
    if slots.is_empty() {
        return f(&[]);
    }
    let perms: Vec<Ballot> = ids
        .iter()
        .cloned()
        .permutations(ids.len())
        .map(|p| Ballot::new(p).expect("permutation of distinct ids"))
        .collect();
    fn rec<'b, F: FnMut(&[&'b Ballot]) -> bool>(
        perms: &'b [Ballot],
        slots: &[(bool, usize)],
        k: usize,
        acc: &mut Vec<&'b Ballot>,
        f: &mut F,
    ) -> bool {
        if k == slots.len() {
            return f(acc);
        }
        for p in perms {
            acc.push(p);
            let cont = rec(perms, slots, k + 1, acc, f);
            acc.pop();
            if !cont {
                return false;
            }
        }
        true
    }
    rec(&perms, slots, 0, &mut Vec::new(), f)
}

/// Replay a witness against its instance and return the controlled election.
pub fn apply_witness(inst: &ControlInstance, w: &ControlWitness) -> Result<Election> {
    let mut active: BTreeSet<CandidateId> = inst.registered.iter().cloned().collect();
    for c in &w.deleted_candidates {
        if c == &inst.distinguished {
            return Err(Error::InvalidInstance(
                "witness deletes the distinguished candidate".into(),
            ));
        }
        if !active.remove(c) {
            return Err(Error::UnknownCandidate(c.to_string()));
        }
    }
    for c in &w.added_candidates {
        if !inst.spare_candidates.contains(c) {
            return Err(Error::UnknownCandidate(c.to_string()));
        }
        active.insert(c.clone());
    }
    // ballot multiset: V minus deletions plus additions, then bribes
    let mut ballots: Vec<(Ballot, i64)> = inst
        .ballots
        .iter()
        .map(|(b, m)| (b.project(&active), *m as i64))
        .collect();
    for &(i, k) in &w.deleted_ballots {
        let entry = ballots
            .get_mut(i)
            .ok_or_else(|| Error::InvalidInstance("ballot index out of range".into()))?;
        entry.1 -= k as i64;
        if entry.1 < 0 {
            return Err(Error::InvalidInstance(
                "witness deletes more copies than present".into(),
            ));
        }
    }
    for &(i, k) in &w.added_ballots {
        let (b, avail) = inst
            .spare_ballots
            .get(i)
            .ok_or_else(|| Error::InvalidInstance("spare ballot index out of range".into()))?;
        if k > *avail {
            return Err(Error::InvalidInstance(
                "witness adds more copies than available".into(),
            ));
        }
        ballots.push((b.project(&active), k as i64));
    }
    for (src, replacement) in &w.bribes {
        let source_ballot = match src {
            BallotSource::Registered(i) => inst
                .ballots
                .get(*i)
                .map(|(b, _)| b.project(&active))
                .ok_or_else(|| Error::InvalidInstance("bribe source out of range".into()))?,
            BallotSource::Added(i) => inst
                .spare_ballots
                .get(*i)
                .map(|(b, _)| b.project(&active))
                .ok_or_else(|| Error::InvalidInstance("bribe source out of range".into()))?,
        };
        let entry = ballots
            .iter_mut()
            .find(|(b, m)| *m > 0 && *b == source_ballot)
            .ok_or_else(|| Error::InvalidInstance("bribed ballot not present".into()))?;
        entry.1 -= 1;
        ballots.push((replacement.clone(), 1));
    }
    let ballots: Vec<(Ballot, u64)> = ballots
        .into_iter()
        .filter(|(_, m)| *m > 0)
        .map(|(b, m)| (b, m as u64))
        .collect();
    Election::new(active, ballots)
}

/// Candidate-deletion brute force directly over a margin matrix: delete up to
/// `limit` candidates (never `distinguished`), smallest sets first.
pub fn brute_candidate_deletion_wmg(
    g: &WeightedMajorityGraph,
    rule: &Rule,
    mode: Mode,
    model: WinnerModel,
    distinguished: &CandidateId,
    limit: u32,
) -> Result<(bool, Option<Vec<CandidateId>>)> {
    let m = g.len();
    let dist = g.index_of(distinguished)?;
    let pool: Vec<usize> = (0..m).filter(|&i| i != dist).collect();
    let mut result = None;
    for_each_subset(&pool, limit as usize, false, &mut |dels| {
        let deleted: BTreeSet<usize> = dels.iter().copied().collect();
        let keep: Vec<usize> = (0..m).filter(|i| !deleted.contains(i)).collect();
        let sub = g.restrict_indices(&keep);
        let w = match rule {
            Rule::Schulze => schulze_winner_indices(&sub)
                .into_iter()
                .map(|i| sub.candidates()[i].clone())
                .collect::<Vec<_>>(),
            Rule::RankedPairs(policy) => {
                vec![crate::ranked_pairs::ranked_pairs_winner(&sub, policy).expect("nonempty")]
            }
        };
        if goal_met_winners(mode, model, distinguished, &w) {
            result = Some(dels.iter().map(|&i| g.candidates()[i].clone()).collect());
            return false;
        }
        true
    });
    Ok((result.is_some(), result))
}

/// Convenience wrapper: replay and check in one step.
pub fn witness_satisfies_goal(inst: &ControlInstance, w: &ControlWitness) -> Result<bool> {
    let e = apply_witness(inst, w)?;
    goal_met(&inst.rule, inst.mode, inst.model, &inst.distinguished, &e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::control::Limits;
    use crate::profile::cand;
    use crate::ranked_pairs::TieBreakPolicy;

    fn ballot(names: &[&str]) -> Ballot {
        Ballot::new(names.iter().map(|n| cand(n)).collect()).unwrap()
    }

    /// The two-candidate election with spares a, b: d beats p by 2; a beats d
    /// and loses to p by 4; b beats p and loses to d by 6.
    fn adding_instance(action: ControlAction, ac: u32, dc: u32) -> ControlInstance {
        let target = WeightedMajorityGraph::from_margins(
            [cand("a"), cand("b"), cand("d"), cand("p")],
            &[
                (cand("d"), cand("p"), 2),
                (cand("a"), cand("d"), 4),
                (cand("p"), cand("a"), 4),
                (cand("b"), cand("p"), 6),
                (cand("d"), cand("b"), 6),
            ],
        )
        .unwrap();
        let e = target.mcgarvey_realize(None).unwrap();
        ControlInstance {
            rule: Rule::Schulze,
            mode: Mode::Constructive,
            model: WinnerModel::Unique,
            action,
            registered: vec![cand("d"), cand("p")],
            spare_candidates: vec![cand("a"), cand("b")],
            ballots: e.ballots().to_vec(),
            spare_ballots: vec![],
            distinguished: cand("p"),
            limits: Limits {
                ac,
                dc,
                ..Limits::default()
            },
            groups: None,
        }
    }

    #[test]
    fn adding_one_spare_wins_nonexact() {
        let inst = adding_instance(ControlAction::AddCandidates, 2, 0);
        let out = solve_control(&inst, &SolveOptions::default()).unwrap();
        assert!(out.decision);
        let w = out.witness.unwrap();
        assert_eq!(w.added_candidates, vec![cand("a")]);
        assert!(w.deleted_candidates.is_empty());
        assert!(witness_satisfies_goal(&inst, &w).unwrap());
    }

    #[test]
    fn exact_adding_both_spares_fails() {
        let inst = adding_instance(ControlAction::AddDeleteCandidates { exact: true }, 2, 0);
        let out = solve_control(&inst, &SolveOptions::default()).unwrap();
        assert!(!out.decision);
        assert_eq!(out.evaluated, 1);
    }

    /// Exact delete-2/add-1 where the forced spare lies on a strong path
    /// against p: every exact action fails.
    fn forced_spare_instance() -> ControlInstance {
        let target = WeightedMajorityGraph::from_margins(
            [cand("c1"), cand("c2"), cand("d"), cand("p"), cand("w")],
            &[
                (cand("w"), cand("c1"), 4),
                (cand("w"), cand("d"), 4),
                (cand("c1"), cand("p"), 4),
                (cand("d"), cand("p"), 4),
                (cand("p"), cand("c2"), 2),
                (cand("c2"), cand("w"), 2),
            ],
        )
        .unwrap();
        let e = target.mcgarvey_realize(None).unwrap();
        ControlInstance {
            rule: Rule::Schulze,
            mode: Mode::Constructive,
            model: WinnerModel::Unique,
            action: ControlAction::AddDeleteCandidates { exact: true },
            registered: vec![cand("c1"), cand("c2"), cand("p"), cand("w")],
            spare_candidates: vec![cand("d")],
            ballots: e.ballots().to_vec(),
            spare_ballots: vec![],
            distinguished: cand("p"),
            limits: Limits {
                ac: 1,
                dc: 2,
                ..Limits::default()
            },
            groups: None,
        }
    }

    #[test]
    fn exact_control_without_deleting_added_fails() {
        let inst = forced_spare_instance();
        for model in [WinnerModel::Unique, WinnerModel::Nonunique] {
            let mut inst = inst.clone();
            inst.model = model;
            let out = solve_control(&inst, &SolveOptions::default()).unwrap();
            assert!(!out.decision, "{model:?}");
        }
    }

    #[test]
    fn voter_replacement_witness_replays() {
        // p loses 1:3 to q; replacing one q-ballot with a p-ballot ties, two
        // would exceed the budget
        let inst = ControlInstance {
            rule: Rule::Schulze,
            mode: Mode::Constructive,
            model: WinnerModel::Nonunique,
            action: ControlAction::ReplaceVoters { exact: false },
            registered: vec![cand("p"), cand("q")],
            spare_candidates: vec![],
            ballots: vec![(ballot(&["q", "p"]), 3), (ballot(&["p", "q"]), 1)],
            spare_ballots: vec![(ballot(&["p", "q"]), 2)],
            distinguished: cand("p"),
            limits: Limits {
                rv: 1,
                ..Limits::default()
            },
            groups: None,
        };
        let out = solve_control(&inst, &SolveOptions::default()).unwrap();
        assert!(out.decision);
        let w = out.witness.unwrap();
        assert_eq!(w.deleted_ballots, vec![(0, 1)]);
        assert_eq!(w.added_ballots, vec![(0, 1)]);
        assert!(witness_satisfies_goal(&inst, &w).unwrap());
        // unique model needs two replacements; the budget allows one
        let mut uniq = inst.clone();
        uniq.model = WinnerModel::Unique;
        assert!(
            !solve_control(&uniq, &SolveOptions::default())
                .unwrap()
                .decision
        );
    }

    #[test]
    fn bribery_rewrites_one_ballot() {
        let inst = ControlInstance {
            rule: Rule::Schulze,
            mode: Mode::Constructive,
            model: WinnerModel::Unique,
            action: ControlAction::Multimode { exact: false },
            registered: vec![cand("p"), cand("q"), cand("r")],
            spare_candidates: vec![],
            ballots: vec![(ballot(&["q", "r", "p"]), 2), (ballot(&["p", "q", "r"]), 1)],
            spare_ballots: vec![],
            distinguished: cand("p"),
            limits: Limits {
                bribes: 1,
                ..Limits::default()
            },
            groups: None,
        };
        let out = solve_control(&inst, &SolveOptions::default()).unwrap();
        assert!(out.decision);
        let w = out.witness.unwrap();
        assert_eq!(w.bribes.len(), 1);
        assert!(witness_satisfies_goal(&inst, &w).unwrap());
    }

    #[test]
    fn guard_refuses_oversized_searches() {
        let mut inst = adding_instance(ControlAction::AddCandidates, 2, 0);
        inst.action = ControlAction::Multimode { exact: false };
        inst.limits = Limits {
            ac: 2,
            dc: 1,
            av: 0,
            dv: 0,
            bribes: 30,
            ..Limits::default()
        };
        let err = solve_control(
            &inst,
            &SolveOptions {
                guard: 1000,
                force: false,
            },
        )
        .unwrap_err();
        assert!(matches!(err, Error::SearchSpaceExceeded { .. }));
    }

    #[test]
    fn model_nesting_on_wmg_brute() {
        // constructive-unique success implies constructive-nonunique success
        let g = WeightedMajorityGraph::from_margins(
            [cand("a"), cand("b"), cand("p")],
            &[
                (cand("a"), cand("p"), 2),
                (cand("p"), cand("b"), 2),
                (cand("b"), cand("a"), 2),
            ],
        )
        .unwrap();
        for limit in 0..=2 {
            let (uniq, _) = brute_candidate_deletion_wmg(
                &g,
                &Rule::Schulze,
                Mode::Constructive,
                WinnerModel::Unique,
                &cand("p"),
                limit,
            )
            .unwrap();
            let (nonu, _) = brute_candidate_deletion_wmg(
                &g,
                &Rule::Schulze,
                Mode::Constructive,
                WinnerModel::Nonunique,
                &cand("p"),
                limit,
            )
            .unwrap();
            assert!(!uniq || nonu);
        }
    }

    #[test]
    fn grouped_deletion_respects_whole_groups() {
        // w ties everyone through the a/b detours; only deleting both a and b
        // dethrones it
        let e_target = WeightedMajorityGraph::from_margins(
            [cand("a"), cand("b"), cand("c"), cand("w")],
            &[
                (cand("a"), cand("c"), 4),
                (cand("b"), cand("c"), 4),
                (cand("c"), cand("w"), 4),
                (cand("w"), cand("a"), 4),
                (cand("w"), cand("b"), 4),
            ],
        )
        .unwrap();
        let e = e_target.mcgarvey_realize(None).unwrap();
        let mk = |dc: u32, groups: &[(&str, &str)]| ControlInstance {
            rule: Rule::Schulze,
            mode: Mode::Destructive,
            model: WinnerModel::Nonunique,
            action: ControlAction::DeleteCandidateGroups,
            registered: vec![cand("a"), cand("b"), cand("c"), cand("w")],
            spare_candidates: vec![],
            ballots: e.ballots().to_vec(),
            spare_ballots: vec![],
            distinguished: cand("w"),
            limits: Limits {
                dc,
                ..Limits::default()
            },
            groups: Some(
                groups
                    .iter()
                    .map(|(c, g)| (cand(c), g.to_string()))
                    .collect(),
            ),
        };
        let singletons: &[(&str, &str)] = &[("a", "ga"), ("b", "gb"), ("c", "gc"), ("w", "gw")];
        let paired: &[(&str, &str)] = &[("a", "g1"), ("b", "g1"), ("c", "gc"), ("w", "gw")];
        // both singleton groups fit in budget 2, not in budget 1
        assert!(
            !solve_control(&mk(1, singletons), &SolveOptions::default())
                .unwrap()
                .decision
        );
        assert!(
            solve_control(&mk(2, singletons), &SolveOptions::default())
                .unwrap()
                .decision
        );
        // the pair group costs 2 candidates at once
        assert!(
            !solve_control(&mk(1, paired), &SolveOptions::default())
                .unwrap()
                .decision
        );
        assert!(
            solve_control(&mk(2, paired), &SolveOptions::default())
                .unwrap()
                .decision
        );
    }

    #[test]
    fn nonexact_equals_or_over_exact_budgets() {
        use crate::verify::{random_add_delete_instance, random_election};
        use rand::rngs::StdRng;
        use rand::{Rng, SeedableRng};
        let mut rng = StdRng::seed_from_u64(71);
        let opts = SolveOptions::default();
        // candidate side
        for _ in 0..60 {
            let mut inst = random_add_delete_instance(&mut rng);
            inst.action = ControlAction::AddDeleteCandidates { exact: false };
            let relaxed = solve_control(&inst, &opts).unwrap().decision;
            let mut any_exact = false;
            for ac in 0..=inst.limits.ac {
                for dc in 0..=inst.limits.dc {
                    let mut exact = inst.clone();
                    exact.action = ControlAction::AddDeleteCandidates { exact: true };
                    exact.limits.ac = ac;
                    exact.limits.dc = dc;
                    any_exact |= solve_control(&exact, &opts).unwrap().decision;
                }
            }
            assert_eq!(relaxed, any_exact);
        }
        // voter side
        for _ in 0..40 {
            let m = rng.gen_range(2..=4);
            let nv = rng.gen_range(1..=6);
            let nu = rng.gen_range(1..=3);
            let e = random_election(&mut rng, m, nv);
            let spare = random_election(&mut rng, m, nu);
            let inst = ControlInstance {
                rule: Rule::Schulze,
                mode: Mode::Constructive,
                model: WinnerModel::Nonunique,
                action: ControlAction::AddDeleteVoters { exact: false },
                registered: e.candidates().to_vec(),
                spare_candidates: vec![],
                ballots: e.ballots().to_vec(),
                spare_ballots: spare.ballots().to_vec(),
                distinguished: e.candidates()[0].clone(),
                limits: Limits {
                    av: rng.gen_range(0..=2),
                    dv: rng.gen_range(0..=2),
                    ..Limits::default()
                },
                groups: None,
            };
            let relaxed = solve_control(&inst, &opts).unwrap().decision;
            let mut any_exact = false;
            for av in 0..=inst.limits.av {
                for dv in 0..=inst.limits.dv {
                    let mut exact = inst.clone();
                    exact.action = ControlAction::AddDeleteVoters { exact: true };
                    exact.limits.av = av;
                    exact.limits.dv = dv;
                    any_exact |= solve_control(&exact, &opts).unwrap().decision;
                }
            }
            assert_eq!(relaxed, any_exact);
        }
    }

    #[test]
    fn singleton_groups_coarsen_to_plain_deletion() {
        use crate::verify::random_election;
        use rand::rngs::StdRng;
        use rand::{Rng, SeedableRng};
        let mut rng = StdRng::seed_from_u64(72);
        let opts = SolveOptions::default();
        for _ in 0..80 {
            let m = rng.gen_range(2..=5);
            let nv = rng.gen_range(1..=7);
            let e = random_election(&mut rng, m, nv);
            let despised = e.candidates()[rng.gen_range(0..m)].clone();
            let dc = rng.gen_range(0..=2);
            let plain = ControlInstance {
                rule: Rule::Schulze,
                mode: Mode::Destructive,
                model: WinnerModel::Nonunique,
                action: ControlAction::DeleteCandidates,
                registered: e.candidates().to_vec(),
                spare_candidates: vec![],
                ballots: e.ballots().to_vec(),
                spare_ballots: vec![],
                distinguished: despised.clone(),
                limits: Limits {
                    dc,
                    ..Limits::default()
                },
                groups: None,
            };
            let mut grouped = plain.clone();
            grouped.action = ControlAction::DeleteCandidateGroups;
            grouped.groups = Some(
                e.candidates()
                    .iter()
                    .map(|c| (c.clone(), format!("solo_{c}")))
                    .collect(),
            );
            assert_eq!(
                solve_control(&plain, &opts).unwrap().decision,
                solve_control(&grouped, &opts).unwrap().decision
            );
        }
    }

    #[test]
    fn destructive_model_nesting() {
        use crate::verify::random_wmg;
        use rand::rngs::StdRng;
        use rand::{Rng, SeedableRng};
        let mut rng = StdRng::seed_from_u64(73);
        for _ in 0..150 {
            let m = rng.gen_range(2..=5);
            let g = random_wmg(&mut rng, m, 8, false);
            let p = g.candidates()[rng.gen_range(0..m)].clone();
            let limit = rng.gen_range(0..=2);
            let (nonu, _) = brute_candidate_deletion_wmg(
                &g,
                &Rule::Schulze,
                Mode::Destructive,
                WinnerModel::Nonunique,
                &p,
                limit,
            )
            .unwrap();
            let (uniq, _) = brute_candidate_deletion_wmg(
                &g,
                &Rule::Schulze,
                Mode::Destructive,
                WinnerModel::Unique,
                &p,
                limit,
            )
            .unwrap();
            // preventing a win outright also prevents a sole win
            assert!(!nonu || uniq);
        }
    }

    #[test]
    fn ranked_pairs_rule_in_control() {
        let inst = ControlInstance {
            rule: Rule::RankedPairs(TieBreakPolicy::Lexicographic),
            mode: Mode::Destructive,
            model: WinnerModel::Unique,
            action: ControlAction::DeleteCandidates,
            registered: vec![cand("a"), cand("b"), cand("w")],
            spare_candidates: vec![],
            ballots: vec![(ballot(&["w", "a", "b"]), 2), (ballot(&["a", "b", "w"]), 1)],
            spare_ballots: vec![],
            distinguished: cand("w"),
            limits: Limits {
                dc: 1,
                ..Limits::default()
            },
            groups: None,
        };
        // w is a Condorcet winner: no single deletion can stop it
        let out = solve_control(&inst, &SolveOptions::default()).unwrap();
        assert!(!out.decision);
    }
}
