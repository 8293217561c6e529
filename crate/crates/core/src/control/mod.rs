//! Electoral-control instances and exact decision solvers.
//!
//! A control instance fixes a voting rule, a chair goal (constructive or
//! destructive, in the unique- or nonunique-winner model), an action type with
//! its budgets, and the election material the chair works with: registered
//! candidates `C`, spare candidates `D`, registered ballots `V` and spare
//! ballots `U`. When spare candidates are present, every ballot in `V` and `U`
//! ranks all of `C ∪ D`; evaluation projects ballots onto the active
//! candidate set. Spare candidates and spare ballots are never deleted by an
//! action; deleting the distinguished candidate is never allowed.

mod brute;
mod format;
mod lift;

pub use brute::{
    apply_witness, brute_candidate_deletion_wmg, solve_control, witness_satisfies_goal,
    BallotSource, ControlWitness, SolveOptions, SolveOutcome, DEFAULT_GUARD,
};
pub use format::{parse_control_instance, serialize_control_instance};
pub use lift::{lift_deletion_to_exact, LiftedInstances};

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::profile::{Ballot, CandidateId, Election, WeightedMajorityGraph};
use crate::ranked_pairs::{ranked_pairs_winner, TieBreakPolicy};
use crate::schulze::schulze_winners;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Rule {
    Schulze,
    RankedPairs(TieBreakPolicy),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Constructive,
    Destructive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WinnerModel {
    Unique,
    Nonunique,
}

/// The structural action type of an instance. Exact variants must use every
/// budget fully; nonexact variants may stay below them.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ControlAction {
    /// Add up to `ac` spare candidates.
    AddCandidates,
    /// Delete up to `dc` registered candidates (never the distinguished one).
    DeleteCandidates,
    /// Add and delete candidates under separate budgets `ac`, `dc`.
    AddDeleteCandidates { exact: bool },
    /// Replace candidates: delete and add equally many, at most (exactly) `rc`.
    ReplaceCandidates { exact: bool },
    /// Add and delete ballots under separate budgets `av`, `dv`.
    AddDeleteVoters { exact: bool },
    /// Replace ballots: delete and add equally many, at most (exactly) `rv`.
    ReplaceVoters { exact: bool },
    /// Combined candidate, voter and bribery action under budgets
    /// `ac`, `dc`, `av`, `dv`, `bribes`.
    Multimode { exact: bool },
    /// Delete whole candidate groups totalling at most `dc` candidates.
    DeleteCandidateGroups,
    /// Add whole spare-candidate groups totalling at most `ac` candidates.
    AddCandidateGroups,
}

impl ControlAction {
    pub fn adds_candidates(self) -> bool {
        matches!(
            self,
            ControlAction::AddCandidates
                | ControlAction::AddDeleteCandidates { .. }
                | ControlAction::ReplaceCandidates { .. }
                | ControlAction::Multimode { .. }
                | ControlAction::AddCandidateGroups
        )
    }

    pub fn uses_spare_ballots(self) -> bool {
        matches!(
            self,
            ControlAction::AddDeleteVoters { .. }
                | ControlAction::ReplaceVoters { .. }
                | ControlAction::Multimode { .. }
        )
    }

    pub fn grouped(self) -> bool {
        matches!(
            self,
            ControlAction::DeleteCandidateGroups | ControlAction::AddCandidateGroups
        )
    }
}

/// Action budgets. Only the fields the action type consults are meaningful.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Limits {
    pub ac: u32,
    pub dc: u32,
    pub av: u32,
    pub dv: u32,
    pub bribes: u32,
    pub rc: u32,
    pub rv: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ControlInstance {
    pub rule: Rule,
    pub mode: Mode,
    pub model: WinnerModel,
    pub action: ControlAction,
    /// Registered candidates C, sorted.
    pub registered: Vec<CandidateId>,
    /// Spare candidates D, sorted and disjoint from C.
    pub spare_candidates: Vec<CandidateId>,
    /// Registered ballots V; each ranks C ∪ D.
    pub ballots: Vec<(Ballot, u64)>,
    /// Spare ballots U; each ranks C ∪ D.
    pub spare_ballots: Vec<(Ballot, u64)>,
    pub distinguished: CandidateId,
    pub limits: Limits,
    /// Total group labelling over C ∪ D; required by grouped actions.
    pub groups: Option<BTreeMap<CandidateId, String>>,
}

impl ControlInstance {
    /// All candidates C ∪ D, sorted.
    pub fn all_candidates(&self) -> Vec<CandidateId> {
        let mut all: Vec<CandidateId> = self
            .registered
            .iter()
            .chain(self.spare_candidates.iter())
            .cloned()
            .collect();
        all.sort();
        all
    }

    /// The base election: registered candidates only, ballots projected.
    pub fn base_election(&self) -> Result<Election> {
        let keep: BTreeSet<CandidateId> = self.registered.iter().cloned().collect();
        let ballots = self
            .ballots
            .iter()
            .map(|(b, m)| (b.project(&keep), *m))
            .collect();
        Election::new(self.registered.clone(), ballots)
    }

    pub fn validate(&self) -> Result<()> {
        let mut reg = self.registered.clone();
        reg.sort();
        if reg != self.registered {
            return Err(Error::InvalidInstance(
                "registered candidates not sorted".into(),
            ));
        }
        let mut spare = self.spare_candidates.clone();
        spare.sort();
        if spare != self.spare_candidates {
            return Err(Error::InvalidInstance("spare candidates not sorted".into()));
        }
        let regset: BTreeSet<&CandidateId> = self.registered.iter().collect();
        if regset.len() != self.registered.len() {
            return Err(Error::InvalidInstance(
                "duplicate registered candidate".into(),
            ));
        }
        let spareset: BTreeSet<&CandidateId> = self.spare_candidates.iter().collect();
        if spareset.len() != self.spare_candidates.len() {
            return Err(Error::InvalidInstance("duplicate spare candidate".into()));
        }
        if self.spare_candidates.iter().any(|c| regset.contains(c)) {
            return Err(Error::InvalidInstance(
                "spare candidates must be disjoint from registered ones".into(),
            ));
        }
        if !regset.contains(&self.distinguished) {
            return Err(Error::InvalidInstance(format!(
                "distinguished candidate {} is not registered",
                self.distinguished
            )));
        }
        if !self.spare_candidates.is_empty() && !self.action.adds_candidates() {
            return Err(Error::InvalidInstance(
                "spare candidates given but the action cannot add candidates".into(),
            ));
        }
        if !self.spare_ballots.is_empty() && !self.action.uses_spare_ballots() {
            return Err(Error::InvalidInstance(
                "spare ballots given but the action cannot add ballots".into(),
            ));
        }
        let all: BTreeSet<CandidateId> = self.all_candidates().into_iter().collect();
        for (b, mult) in self.ballots.iter().chain(self.spare_ballots.iter()) {
            if *mult == 0 {
                return Err(Error::InvalidInstance("zero ballot multiplicity".into()));
            }
            if b.len() != all.len() || !b.ranking().iter().all(|c| all.contains(c)) {
                return Err(Error::InvalidInstance(format!(
                    "ballot [{b}] does not rank exactly the registered and spare candidates"
                )));
            }
        }
        if self.action.grouped() {
            if self.mode != Mode::Destructive {
                return Err(Error::InvalidInstance(
                    "grouped control actions are destructive".into(),
                ));
            }
            let groups = self.groups.as_ref().ok_or_else(|| {
                Error::InvalidInstance("grouped action requires a group labelling".into())
            })?;
            for c in all.iter() {
                if !groups.contains_key(c) {
                    return Err(Error::InvalidInstance(format!(
                        "group labelling misses candidate {c}"
                    )));
                }
            }
        } else if self.groups.is_some() {
            return Err(Error::InvalidInstance(
                "group labelling given for a non-grouped action".into(),
            ));
        }
        if matches!(self.rule, Rule::RankedPairs(_)) && self.model == WinnerModel::Unique {
            // resolute rule: both models coincide, either is accepted
        }
        Ok(())
    }
}

/// Winner set under the rule; for (resolute) ranked pairs a singleton.
pub fn winners(rule: &Rule, e: &Election) -> Result<Vec<CandidateId>> {
    winners_of_wmg(rule, &e.wmg())
}

pub fn winners_of_wmg(rule: &Rule, g: &WeightedMajorityGraph) -> Result<Vec<CandidateId>> {
    match rule {
        Rule::Schulze => schulze_winners(g),
        Rule::RankedPairs(policy) => Ok(vec![ranked_pairs_winner(g, policy)?]),
    }
}

/// Whether the chair's goal holds for the (possibly controlled) election.
///
/// If the distinguished candidate is absent from the election the destructive
/// goal is met and the constructive goal is not.
pub fn goal_met(
    rule: &Rule,
    mode: Mode,
    model: WinnerModel,
    p: &CandidateId,
    e: &Election,
) -> Result<bool> {
    if !e.candidates().contains(p) {
        return Ok(mode == Mode::Destructive);
    }
    let w = winners(rule, e)?;
    Ok(goal_met_winners(mode, model, p, &w))
}

pub(crate) fn goal_met_winners(
    mode: Mode,
    model: WinnerModel,
    p: &CandidateId,
    winners: &[CandidateId],
) -> bool {
    let sole = winners.len() == 1 && &winners[0] == p;
    let member = winners.contains(p);
    match (mode, model) {
        (Mode::Constructive, WinnerModel::Unique) => sole,
        (Mode::Constructive, WinnerModel::Nonunique) => member,
        (Mode::Destructive, WinnerModel::Unique) => !sole,
        (Mode::Destructive, WinnerModel::Nonunique) => !member,
    }
}
