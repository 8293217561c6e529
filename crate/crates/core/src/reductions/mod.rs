//! Generators mapping 3-CNF formulas and restricted exact-cover instances to
//! control instances, with role and constant provenance for each emitted
//! instance.
//!
//! Every election here is built from vote pairs (and, for voter control, a
//! block of fixed `w B p` ballots plus vote-pair filler realizing exact margin
//! targets), so the emitted weighted majority graphs match their declared
//! shapes exactly.

use std::collections::{BTreeMap, BTreeSet};

use crate::control::{ControlAction, ControlInstance, Limits, Mode, Rule, WinnerModel};
use crate::error::{Error, Result};
use crate::profile::{w_pair, Ballot, CandidateId, Election, WeightedMajorityGraph};
use crate::ranked_pairs::TieBreakPolicy;

/// A literal: variable index (1-based) and sign.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Lit {
    pub var: u32,
    pub negated: bool,
}

impl Lit {
    pub fn from_dimacs(v: i64) -> Result<Lit> {
        if v == 0 || v.unsigned_abs() > u32::MAX as u64 {
            return Err(Error::InvalidInput(format!("bad literal {v}")));
        }
        Ok(Lit {
            var: v.unsigned_abs() as u32,
            negated: v < 0,
        })
    }

    pub fn negates(&self, other: &Lit) -> bool {
        self.var == other.var && self.negated != other.negated
    }
}

/// A 3-CNF formula: clauses of exactly three literals over distinct variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThreeSatInstance {
    pub num_vars: u32,
    pub clauses: Vec<[Lit; 3]>,
}

impl ThreeSatInstance {
    pub fn new(num_vars: u32, clauses: Vec<[Lit; 3]>) -> Result<Self> {
        if clauses.is_empty() {
            return Err(Error::InvalidInput(
                "formula needs at least one clause".into(),
            ));
        }
        for (i, cl) in clauses.iter().enumerate() {
            let vars: BTreeSet<u32> = cl.iter().map(|l| l.var).collect();
            if vars.len() != 3 {
                return Err(Error::InvalidInput(format!(
                    "clause {} repeats a variable",
                    i + 1
                )));
            }
            for l in cl {
                if l.var == 0 || l.var > num_vars {
                    return Err(Error::InvalidInput(format!(
                        "clause {} uses variable x{} outside 1..={num_vars}",
                        i + 1,
                        l.var
                    )));
                }
            }
        }
        Ok(ThreeSatInstance { num_vars, clauses })
    }
}

/// Parse a DIMACS-style CNF with exactly three literals per clause.
pub fn parse_cnf(text: &str) -> Result<ThreeSatInstance> {
    let mut num_vars: Option<u32> = None;
    let mut declared_clauses: Option<usize> = None;
    let mut clauses: Vec<[Lit; 3]> = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let lineno = lineno + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        if let Some(rest) = line.strip_prefix("p cnf") {
            let toks: Vec<&str> = rest.split_whitespace().collect();
            if toks.len() != 2 {
                return Err(Error::Parse {
                    line: lineno,
                    msg: "expected `p cnf <vars> <clauses>`".into(),
                });
            }
            num_vars = Some(toks[0].parse().map_err(|_| Error::Parse {
                line: lineno,
                msg: "malformed variable count".into(),
            })?);
            declared_clauses = Some(toks[1].parse().map_err(|_| Error::Parse {
                line: lineno,
                msg: "malformed clause count".into(),
            })?);
            continue;
        }
        let mut lits = Vec::new();
        for tok in line.split_whitespace() {
            let v: i64 = tok.parse().map_err(|_| Error::Parse {
                line: lineno,
                msg: format!("malformed literal {tok:?}"),
            })?;
            if v == 0 {
                break;
            }
            lits.push(Lit::from_dimacs(v).map_err(|e| Error::Parse {
                line: lineno,
                msg: e.to_string(),
            })?);
        }
        if lits.len() != 3 {
            return Err(Error::Parse {
                line: lineno,
                msg: format!("clause has {} literals, need exactly 3", lits.len()),
            });
        }
        clauses.push([lits[0], lits[1], lits[2]]);
    }
    let num_vars = num_vars.ok_or(Error::Parse {
        line: 1,
        msg: "missing `p cnf` header".into(),
    })?;
    if let Some(n) = declared_clauses {
        if n != clauses.len() {
            return Err(Error::Parse {
                line: 1,
                msg: format!("header declares {n} clauses, found {}", clauses.len()),
            });
        }
    }
    ThreeSatInstance::new(num_vars, clauses)
}

/// Restricted exact cover by 3-sets: 3s elements, 3s triples, every element
/// in exactly three triples.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rx3cInstance {
    pub elements: Vec<String>,
    /// Element indices, each triple sorted ascending.
    pub triples: Vec<[usize; 3]>,
}

impl Rx3cInstance {
    pub fn s(&self) -> usize {
        self.elements.len() / 3
    }
}

/// Check the restricted exact-cover shape, naming the first violation.
pub fn validate_rx3c(inst: &Rx3cInstance) -> Result<()> {
    let n = inst.elements.len();
    if n == 0 || !n.is_multiple_of(3) {
        return Err(Error::InvalidInput(format!(
            "base set has {n} elements, need a positive multiple of 3"
        )));
    }
    if inst.triples.len() != n {
        return Err(Error::InvalidInput(format!(
            "need exactly {n} triples, got {}",
            inst.triples.len()
        )));
    }
    let mut sorted = inst.elements.clone();
    sorted.sort();
    sorted.dedup();
    if sorted.len() != n {
        return Err(Error::InvalidInput("duplicate base element".into()));
    }
    let mut occurrences = vec![0usize; n];
    for (ti, t) in inst.triples.iter().enumerate() {
        let set: BTreeSet<usize> = t.iter().copied().collect();
        if set.len() != 3 {
            return Err(Error::InvalidInput(format!(
                "triple {} repeats an element",
                ti + 1
            )));
        }
        for &e in t {
            if e >= n {
                return Err(Error::InvalidInput(format!(
                    "triple {} references element index {e} out of range",
                    ti + 1
                )));
            }
            occurrences[e] += 1;
        }
    }
    for (e, &count) in occurrences.iter().enumerate() {
        if count != 3 {
            return Err(Error::InvalidInput(format!(
                "element {} occurs in {count} triples, need exactly 3",
                inst.elements[e]
            )));
        }
    }
    Ok(())
}

/// Parse an exact-cover file: a `base:` line, then one `triple:` line per set.
pub fn parse_rx3c(text: &str) -> Result<Rx3cInstance> {
    let mut elements: Option<Vec<String>> = None;
    let mut triples: Vec<[usize; 3]> = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let lineno = lineno + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(rest) = line.strip_prefix("base:") {
            elements = Some(rest.split_whitespace().map(|s| s.to_string()).collect());
        } else if let Some(rest) = line.strip_prefix("triple:") {
            let elements = elements.as_ref().ok_or(Error::Parse {
                line: lineno,
                msg: "`triple:` before `base:`".into(),
            })?;
            let mut idx = Vec::new();
            for tok in rest.split_whitespace() {
                let e = elements.iter().position(|x| x == tok).ok_or(Error::Parse {
                    line: lineno,
                    msg: format!("unknown base element {tok:?}"),
                })?;
                idx.push(e);
            }
            if idx.len() != 3 {
                return Err(Error::Parse {
                    line: lineno,
                    msg: format!("triple has {} elements, need exactly 3", idx.len()),
                });
            }
            idx.sort_unstable();
            triples.push([idx[0], idx[1], idx[2]]);
        } else {
            return Err(Error::Parse {
                line: lineno,
                msg: "expected `base:` or `triple:` line".into(),
            });
        }
    }
    let elements = elements.ok_or(Error::Parse {
        line: 1,
        msg: "missing `base:` line".into(),
    })?;
    let inst = Rx3cInstance { elements, triples };
    validate_rx3c(&inst)?;
    Ok(inst)
}

/// What a generated candidate stands for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum CandidateRole {
    Clause,
    Literal,
    Negation,
    Preferred,
    Auxiliary,
    Element,
    Despised,
}

impl CandidateRole {
    pub fn as_str(self) -> &'static str {
        match self {
            CandidateRole::Clause => "clause",
            CandidateRole::Literal => "literal",
            CandidateRole::Negation => "negation",
            CandidateRole::Preferred => "preferred",
            CandidateRole::Auxiliary => "auxiliary",
            CandidateRole::Element => "element",
            CandidateRole::Despised => "despised",
        }
    }
}

/// Constants chosen by a generator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ReductionConstants {
    /// The base scale (the large constant the margin targets build on).
    pub scale: Option<i64>,
    /// The dominant margin used where an edge must never be path-critical.
    pub dominant: Option<i64>,
    /// Number of fixed (deletable plus parity) ballots prepended to the list.
    pub fixed_ballots: Option<u64>,
}

/// A generated control instance plus provenance.
#[derive(Debug, Clone)]
pub struct ReductionArtifact {
    pub instance: ControlInstance,
    pub roles: BTreeMap<CandidateId, CandidateRole>,
    pub constants: ReductionConstants,
    pub variant: String,
}

/// Plain-text key=value provenance sidecar.
pub fn provenance_text(artifact: &ReductionArtifact) -> String {
    let mut out = String::new();
    out.push_str(&format!("variant={}\n", artifact.variant));
    if let Some(s) = artifact.constants.scale {
        out.push_str(&format!("scale={s}\n"));
    }
    if let Some(d) = artifact.constants.dominant {
        out.push_str(&format!("dominant={d}\n"));
    }
    if let Some(f) = artifact.constants.fixed_ballots {
        out.push_str(&format!("fixed_ballots={f}\n"));
    }
    for (c, role) in &artifact.roles {
        out.push_str(&format!("role.{c}={}\n", role.as_str()));
    }
    out
}

/// Which vote table the clause-deletion construction uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CcdcVariant {
    /// The uncorrected table: one vote pair per row.
    FlawedOriginal,
    /// Doubled head rows plus auxiliary-to-clause pairs; nonunique model.
    FixedNonunique,
    /// The unique-winner adaptation of the fixed table.
    FixedUnique,
}

impl CcdcVariant {
    pub fn tag(self) -> &'static str {
        match self {
            CcdcVariant::FlawedOriginal => "flawed-original",
            CcdcVariant::FixedNonunique => "fixed-nonunique",
            CcdcVariant::FixedUnique => "fixed-unique",
        }
    }

    fn model(self) -> WinnerModel {
        match self {
            CcdcVariant::FixedUnique => WinnerModel::Unique,
            _ => WinnerModel::Nonunique,
        }
    }

    /// Vote-pair counts: (head chain A-D, aux-over-literals E, preferred-over-aux F,
    /// literal-over-negation G, negation-over-preferred H, aux-over-clause).
    fn counts(self) -> (u64, u64, u64, u64, u64, u64) {
        match self {
            CcdcVariant::FlawedOriginal => (1, 1, 1, 1, 1, 0),
            CcdcVariant::FixedNonunique => (2, 2, 2, 1, 1, 1),
            CcdcVariant::FixedUnique => (3, 4, 4, 2, 1, 2),
        }
    }
}

fn clause_candidate(i: usize, j: usize) -> CandidateId {
    CandidateId::new(format!("c{:02}_{}", i + 1, j + 1)).expect("generated name")
}

fn literal_candidate(i: usize, j: usize) -> CandidateId {
    CandidateId::new(format!("x{:02}_{}", i + 1, j + 1)).expect("generated name")
}

fn negation_candidate(pair: (usize, usize, usize, usize), l: usize) -> CandidateId {
    let (i, j, m, n) = pair;
    CandidateId::new(format!(
        "n{:02}_{}_{:02}_{}__{}",
        i + 1,
        j + 1,
        m + 1,
        n + 1,
        l + 1
    ))
    .expect("generated name")
}

/// Map a 3-CNF formula to a constructive candidate-deletion instance.
///
/// Candidates: `k+1` clause candidates per clause, the three literal
/// candidates per clause, `k+1` negation candidates per pair of literals that
/// negate each other, the preferred candidate `p` and the auxiliary candidate
/// `a`. The deletion limit is the number of clauses.
pub fn threesat_to_ccdc(
    formula: &ThreeSatInstance,
    variant: CcdcVariant,
) -> Result<ReductionArtifact> {
    let k = formula.clauses.len();
    let copies = k + 1;

    let mut roles: BTreeMap<CandidateId, CandidateRole> = BTreeMap::new();
    let mut candidates: Vec<CandidateId> = Vec::new();
    for i in 0..k {
        for j in 0..copies {
            let c = clause_candidate(i, j);
            roles.insert(c.clone(), CandidateRole::Clause);
            candidates.push(c);
        }
        for j in 0..3 {
            let c = literal_candidate(i, j);
            roles.insert(c.clone(), CandidateRole::Literal);
            candidates.push(c);
        }
    }
    // negation pairs: (clause, position) pairs whose literals negate
    let mut pairs: Vec<(usize, usize, usize, usize)> = Vec::new();
    for i in 0..k {
        for j in 0..3 {
            for m in (i + 1)..k {
                for n in 0..3 {
                    if formula.clauses[i][j].negates(&formula.clauses[m][n]) {
                        pairs.push((i, j, m, n));
                    }
                }
            }
        }
    }
    for &pair in &pairs {
        for l in 0..copies {
            let c = negation_candidate(pair, l);
            roles.insert(c.clone(), CandidateRole::Negation);
            candidates.push(c);
        }
    }
    let p = CandidateId::new("p").expect("p");
    let a = CandidateId::new("a").expect("a");
    roles.insert(p.clone(), CandidateRole::Preferred);
    roles.insert(a.clone(), CandidateRole::Auxiliary);
    candidates.push(p.clone());
    candidates.push(a.clone());
    candidates.sort();
    let cand_set: BTreeSet<CandidateId> = candidates.iter().cloned().collect();

    let (head, aux_lit, pref_aux, lit_neg, neg_pref, aux_clause) = variant.counts();
    let mut ballots: Vec<(Ballot, u64)> = Vec::new();
    let push_pairs = |ballots: &mut Vec<(Ballot, u64)>,
                      c: &CandidateId,
                      d: &CandidateId,
                      count: u64|
     -> Result<()> {
        if count == 0 {
            return Ok(());
        }
        let (fwd, bwd) = w_pair(&cand_set, c, d)?;
        ballots.push((fwd, count));
        ballots.push((bwd, count));
        Ok(())
    };

    for i in 0..k {
        for j in 0..copies {
            push_pairs(
                &mut ballots,
                &clause_candidate(i, j),
                &literal_candidate(i, 0),
                head,
            )?;
        }
        push_pairs(
            &mut ballots,
            &literal_candidate(i, 0),
            &literal_candidate(i, 1),
            head,
        )?;
        push_pairs(
            &mut ballots,
            &literal_candidate(i, 1),
            &literal_candidate(i, 2),
            head,
        )?;
        push_pairs(&mut ballots, &literal_candidate(i, 2), &p, head)?;
    }
    for i in 0..k {
        for j in 0..3 {
            push_pairs(&mut ballots, &a, &literal_candidate(i, j), aux_lit)?;
        }
    }
    push_pairs(&mut ballots, &p, &a, pref_aux)?;
    for &pair in &pairs {
        let (i, j, m, n) = pair;
        for l in 0..copies {
            let nc = negation_candidate(pair, l);
            push_pairs(&mut ballots, &literal_candidate(i, j), &nc, lit_neg)?;
            push_pairs(&mut ballots, &literal_candidate(m, n), &nc, lit_neg)?;
            push_pairs(&mut ballots, &nc, &p, neg_pref)?;
        }
    }
    if aux_clause > 0 {
        for i in 0..k {
            for j in 0..copies {
                push_pairs(&mut ballots, &a, &clause_candidate(i, j), aux_clause)?;
            }
        }
    }

    let instance = ControlInstance {
        rule: Rule::Schulze,
        mode: Mode::Constructive,
        model: variant.model(),
        action: ControlAction::DeleteCandidates,
        registered: candidates,
        spare_candidates: Vec::new(),
        ballots,
        spare_ballots: Vec::new(),
        distinguished: p,
        limits: Limits {
            dc: k as u32,
            ..Limits::default()
        },
        groups: None,
    };
    instance.validate()?;
    Ok(ReductionArtifact {
        instance,
        roles,
        constants: ReductionConstants::default(),
        variant: format!("3sat-ccdc/{}", variant.tag()),
    })
}

/// The four instances a voter-control reduction emits.
#[derive(Debug, Clone)]
pub struct VoterControlReduction {
    /// Exact add+delete voters, constructive for the preferred candidate.
    pub exact_add_delete_constructive: ReductionArtifact,
    /// Exact add+delete voters, destructive against the incumbent.
    pub exact_add_delete_destructive: ReductionArtifact,
    /// Replace voters, constructive.
    pub replace_constructive: ReductionArtifact,
    /// Replace voters, destructive.
    pub replace_destructive: ReductionArtifact,
}

impl VoterControlReduction {
    pub fn artifacts(&self) -> [&ReductionArtifact; 4] {
        [
            &self.exact_add_delete_constructive,
            &self.exact_add_delete_destructive,
            &self.replace_constructive,
            &self.replace_destructive,
        ]
    }
}

fn element_candidate(j: usize) -> CandidateId {
    CandidateId::new(format!("b{:02}", j + 1)).expect("generated name")
}

/// Shared construction for the Schulze and ranked-pairs voter reductions.
fn rx3c_voter(
    inst: &Rx3cInstance,
    model: WinnerModel,
    ranked_pairs: bool,
) -> Result<VoterControlReduction> {
    validate_rx3c(inst)?;
    let s = inst.s() as i64;
    let n_elem = inst.elements.len();
    let scale = 4 * s + 4;
    let p = CandidateId::new("p").expect("p");
    let w = CandidateId::new("w").expect("w");
    let elements: Vec<CandidateId> = (0..n_elem).map(element_candidate).collect();
    let mut candidates: Vec<CandidateId> = elements.clone();
    candidates.push(p.clone());
    candidates.push(w.clone());
    candidates.sort();

    // margin targets; the unique adaptation uses odd targets throughout, with
    // the preferred-over-incumbent margin chosen per rule: Schulze needs the
    // strict beat after a successful cover, ranked pairs needs the incumbent
    // strictly ahead on every failed cover so the favored tie-break cannot
    // rescue it
    let (pw, bp, dominant, chain, want_parity): (i64, i64, i64, i64, u64) = match model {
        WinnerModel::Nonunique => (
            2 * scale,
            2 * scale + 4 * s - 2,
            4 * scale,
            if ranked_pairs { 4 * scale } else { 0 },
            0,
        ),
        WinnerModel::Unique => (
            if ranked_pairs {
                2 * scale - 1
            } else {
                2 * scale + 1
            },
            2 * scale + 4 * s - 3,
            4 * scale - 1,
            if ranked_pairs { 4 * scale - 1 } else { 1 },
            1,
        ),
    };

    // fixed deletable ballots w B p, plus one more when the target parity
    // disagrees with s
    let fixed_count = if (s as u64) % 2 == want_parity {
        s as u64
    } else {
        s as u64 + 1
    };
    let mut fixed_ranking = vec![w.clone()];
    fixed_ranking.extend(elements.iter().cloned());
    fixed_ranking.push(p.clone());
    let fixed_ballot = Ballot::new(fixed_ranking).expect("distinct names");
    let base = Election::new(candidates.clone(), vec![(fixed_ballot, fixed_count)])?;

    let mut margins: Vec<(CandidateId, CandidateId, i64)> = vec![(p.clone(), w.clone(), pw)];
    for b in &elements {
        margins.push((b.clone(), p.clone(), bp));
        margins.push((w.clone(), b.clone(), dominant));
    }
    for i in 0..n_elem {
        for j in (i + 1)..n_elem {
            margins.push((elements[i].clone(), elements[j].clone(), chain));
        }
    }
    let target = WeightedMajorityGraph::from_margins(candidates.clone(), &margins)?;
    let election = target.mcgarvey_realize(Some(&base))?;

    // one spare ballot per triple: members, p, non-members, w
    let spare_ballots: Vec<(Ballot, u64)> = inst
        .triples
        .iter()
        .map(|t| {
            let members: BTreeSet<usize> = t.iter().copied().collect();
            let mut r: Vec<CandidateId> = t.iter().map(|&e| element_candidate(e)).collect();
            r.push(p.clone());
            r.extend(
                (0..n_elem)
                    .filter(|e| !members.contains(e))
                    .map(element_candidate),
            );
            r.push(w.clone());
            (Ballot::new(r).expect("distinct names"), 1u64)
        })
        .collect();

    let rule = if ranked_pairs {
        Rule::RankedPairs(TieBreakPolicy::FavorDesignated(p.clone()))
    } else {
        Rule::Schulze
    };
    let mut roles: BTreeMap<CandidateId, CandidateRole> = elements
        .iter()
        .map(|b| (b.clone(), CandidateRole::Element))
        .collect();
    roles.insert(p.clone(), CandidateRole::Preferred);
    roles.insert(w.clone(), CandidateRole::Despised);
    let constants = ReductionConstants {
        scale: Some(scale),
        dominant: Some(dominant),
        fixed_ballots: Some(fixed_count),
    };
    let opposite = match model {
        WinnerModel::Unique => WinnerModel::Nonunique,
        WinnerModel::Nonunique => WinnerModel::Unique,
    };
    let rule_tag = if ranked_pairs {
        "ranked-pairs"
    } else {
        "schulze"
    };
    let model_tag = match model {
        WinnerModel::Unique => "unique",
        WinnerModel::Nonunique => "nonunique",
    };

    let make = |action: ControlAction,
                mode: Mode,
                inst_model: WinnerModel,
                distinguished: &CandidateId,
                limits: Limits,
                kind: &str|
     -> Result<ReductionArtifact> {
        let instance = ControlInstance {
            rule: rule.clone(),
            mode,
            model: inst_model,
            action,
            registered: candidates.clone(),
            spare_candidates: Vec::new(),
            ballots: election.ballots().to_vec(),
            spare_ballots: spare_ballots.clone(),
            distinguished: distinguished.clone(),
            limits,
            groups: None,
        };
        instance.validate()?;
        Ok(ReductionArtifact {
            instance,
            roles: roles.clone(),
            constants,
            variant: format!("rx3c-{rule_tag}-voter/{model_tag}/{kind}"),
        })
    };

    let avdv = Limits {
        av: s as u32,
        dv: s as u32,
        ..Limits::default()
    };
    let rv = Limits {
        rv: s as u32,
        ..Limits::default()
    };
    Ok(VoterControlReduction {
        exact_add_delete_constructive: make(
            ControlAction::AddDeleteVoters { exact: true },
            Mode::Constructive,
            model,
            &p,
            avdv,
            "exact-add-delete-constructive",
        )?,
        exact_add_delete_destructive: make(
            ControlAction::AddDeleteVoters { exact: true },
            Mode::Destructive,
            opposite,
            &w,
            avdv,
            "exact-add-delete-destructive",
        )?,
        replace_constructive: make(
            ControlAction::ReplaceVoters { exact: false },
            Mode::Constructive,
            model,
            &p,
            rv,
            "replace-constructive",
        )?,
        replace_destructive: make(
            ControlAction::ReplaceVoters { exact: false },
            Mode::Destructive,
            opposite,
            &w,
            rv,
            "replace-destructive",
        )?,
    })
}

/// Map an exact-cover instance to Schulze voter-control instances.
///
/// The instances in the `model` winner model are the constructive ones; the
/// destructive instances carry the opposite model, which is what the
/// construction decides there.
pub fn rx3c_to_schulze_voter(
    inst: &Rx3cInstance,
    model: WinnerModel,
) -> Result<VoterControlReduction> {
    rx3c_voter(inst, model, false)
}

/// Ranked-pairs variant: additionally chains the element candidates with
/// dominant margins so no cycles can form among them, and fixes the
/// tie-breaking policy to favor the preferred candidate.
pub fn rx3c_to_rankedpairs_voter(
    inst: &Rx3cInstance,
    model: WinnerModel,
) -> Result<VoterControlReduction> {
    rx3c_voter(inst, model, true)
}
