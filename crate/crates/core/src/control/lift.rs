//! Lifting candidate-deletion instances to exact add+delete and exact
//! replacement instances.
//!
//! Given a deletion instance with limit `k`, the lift appends `k` padding
//! candidates at the bottom of every ballot and a block of spare candidates
//! below those. Because both rules ignore universally bottom-ranked
//! candidates, the lifted instances decide exactly like the source instance,
//! in both winner models.

use crate::error::{Error, Result};
use crate::profile::{Ballot, CandidateId};

use super::{ControlAction, ControlInstance, Limits};

#[derive(Debug, Clone)]
pub struct LiftedInstances {
    /// Exact add+delete instance with `dc = k` and the requested `ac`.
    pub add_delete: ControlInstance,
    /// Exact replacement instance with `rc = k`.
    pub replace: ControlInstance,
    pub padding: Vec<CandidateId>,
    pub spares: Vec<CandidateId>,
}

fn fresh_names(prefix: &str, count: usize, taken: &[CandidateId]) -> Vec<CandidateId> {
    let mut out = Vec::with_capacity(count);
    let mut suffix = 0usize;
    while out.len() < count {
        let name = CandidateId::new(format!("{prefix}{:02}_{suffix:02}", out.len() + 1))
            .expect("generated name");
        if taken.contains(&name) || out.contains(&name) {
            suffix += 1;
            continue;
        }
        out.push(name);
    }
    out
}

/// Lift a candidate-deletion instance (limit `dc = k`). The spare block is
/// sized `max(ac, k)` so the exact replacement instance stays feasible.
pub fn lift_deletion_to_exact(inst: &ControlInstance, ac: u32) -> Result<LiftedInstances> {
    if inst.action != ControlAction::DeleteCandidates {
        return Err(Error::InvalidInstance(
            "only candidate-deletion instances can be lifted".into(),
        ));
    }
    inst.validate()?;
    let k = inst.limits.dc as usize;
    let spare_count = (ac as usize).max(k);
    let padding = fresh_names("zpad", k, &inst.registered);
    let taken: Vec<CandidateId> = inst
        .registered
        .iter()
        .chain(padding.iter())
        .cloned()
        .collect();
    let spares = fresh_names("zspare", spare_count, &taken);

    let mut registered: Vec<CandidateId> = inst
        .registered
        .iter()
        .chain(padding.iter())
        .cloned()
        .collect();
    registered.sort();
    let mut spare_sorted = spares.clone();
    spare_sorted.sort();

    // every ballot gets the padding block, then the spare block, at the bottom
    let extend = |b: &Ballot| -> Ballot {
        let mut r = b.ranking().to_vec();
        r.extend(padding.iter().cloned());
        r.extend(spares.iter().cloned());
        Ballot::new(r).expect("fresh names cannot collide")
    };
    let ballots: Vec<(Ballot, u64)> = inst.ballots.iter().map(|(b, m)| (extend(b), *m)).collect();

    let add_delete = ControlInstance {
        rule: inst.rule.clone(),
        mode: inst.mode,
        model: inst.model,
        action: ControlAction::AddDeleteCandidates { exact: true },
        registered: registered.clone(),
        spare_candidates: spare_sorted.clone(),
        ballots: ballots.clone(),
        spare_ballots: Vec::new(),
        distinguished: inst.distinguished.clone(),
        limits: Limits {
            ac,
            dc: k as u32,
            ..Limits::default()
        },
        groups: None,
    };
    let replace = ControlInstance {
        rule: inst.rule.clone(),
        mode: inst.mode,
        model: inst.model,
        action: ControlAction::ReplaceCandidates { exact: true },
        registered,
        spare_candidates: spare_sorted,
        ballots,
        spare_ballots: Vec::new(),
        distinguished: inst.distinguished.clone(),
        limits: Limits {
            rc: k as u32,
            ..Limits::default()
        },
        groups: None,
    };
    add_delete.validate()?;
    replace.validate()?;
    Ok(LiftedInstances {
        add_delete,
        replace,
        padding,
        spares,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::control::{solve_control, Mode, Rule, SolveOptions, WinnerModel};
    use crate::profile::cand;

    fn deletion_instance(limit: u32) -> ControlInstance {
        let b = |names: &[&str]| Ballot::new(names.iter().map(|n| cand(n)).collect()).unwrap();
        ControlInstance {
            rule: Rule::Schulze,
            mode: Mode::Constructive,
            model: WinnerModel::Nonunique,
            action: ControlAction::DeleteCandidates,
            registered: vec![cand("a"), cand("b"), cand("p")],
            spare_candidates: vec![],
            ballots: vec![
                (b(&["a", "b", "p"]), 2),
                (b(&["p", "a", "b"]), 1),
                (b(&["b", "p", "a"]), 1),
            ],
            spare_ballots: vec![],
            distinguished: cand("p"),
            limits: Limits {
                dc: limit,
                ..Limits::default()
            },
            groups: None,
        }
    }

    #[test]
    fn zero_limit_lift_decides_like_base_winners() {
        let inst = deletion_instance(0);
        let lifted = lift_deletion_to_exact(&inst, 2).unwrap();
        let opts = SolveOptions::default();
        let src = solve_control(&inst, &opts).unwrap().decision;
        assert_eq!(
            solve_control(&lifted.add_delete, &opts).unwrap().decision,
            src
        );
        assert_eq!(solve_control(&lifted.replace, &opts).unwrap().decision, src);
        assert!(lifted.padding.is_empty());
    }

    #[test]
    fn lift_preserves_decision_small_instance() {
        for limit in [1u32, 2] {
            for ac in [0u32, 1, 2] {
                let inst = deletion_instance(limit);
                let lifted = lift_deletion_to_exact(&inst, ac).unwrap();
                let opts = SolveOptions::default();
                let src = solve_control(&inst, &opts).unwrap().decision;
                assert_eq!(
                    solve_control(&lifted.add_delete, &opts).unwrap().decision,
                    src,
                    "add_delete, limit {limit}, ac {ac}"
                );
                assert_eq!(
                    solve_control(&lifted.replace, &opts).unwrap().decision,
                    src,
                    "replace, limit {limit}, ac {ac}"
                );
            }
        }
    }

    #[test]
    fn only_deletion_instances_lift() {
        let mut inst = deletion_instance(1);
        inst.action = ControlAction::AddCandidates;
        assert!(lift_deletion_to_exact(&inst, 1).is_err());
    }
}
