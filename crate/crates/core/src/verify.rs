//! Randomized self-check sweeps pairing fast solvers with independent
//! brute-force oracles.
//!
//! Each suite runs a deterministic, seeded sweep and reports every
//! disagreement it finds. The same generators back the acceptance tests.

use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

use crate::control::{
    brute_candidate_deletion_wmg, lift_deletion_to_exact, solve_control, ControlAction,
    ControlInstance, Limits, Mode, Rule, SolveOptions, WinnerModel,
};
use crate::dcdc::{in_neighbor_witness, solve_dcdc_nonunique};
use crate::error::{Error, Result};
use crate::profile::{Ballot, CandidateId, Election, WeightedMajorityGraph};
use crate::ranked_pairs::{ranked_pairs_winner, TieBreakPolicy};
use crate::reductions::{
    rx3c_to_rankedpairs_voter, rx3c_to_schulze_voter, threesat_to_ccdc, CcdcVariant, Lit,
    Rx3cInstance, ThreeSatInstance,
};
use crate::schulze::schulze_winners;

pub const SUITES: &[&str] = &[
    "dcdc-equivalence",
    "in-neighbor",
    "lift-equivalence",
    "reduction-faithfulness",
    "ibc",
];

#[derive(Debug, Clone, Copy)]
pub struct SweepOptions {
    pub seed: u64,
    pub instances: usize,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions {
            seed: 0x5eed,
            instances: 2000,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SuiteReport {
    pub suite: String,
    pub checks: u64,
    pub failures: Vec<String>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

pub fn run_suite(name: &str, opts: &SweepOptions) -> Result<SuiteReport> {
    match name {
        "dcdc-equivalence" => Ok(dcdc_equivalence_sweep(opts)),
        "in-neighbor" => Ok(in_neighbor_sweep(opts)),
        "lift-equivalence" => Ok(lift_equivalence_sweep(opts)),
        "reduction-faithfulness" => reduction_faithfulness_sweep(opts),
        "ibc" => Ok(ibc_sweep(opts)),
        other => Err(Error::InvalidInput(format!(
            "unknown suite {other:?}; available: {}",
            SUITES.join(", ")
        ))),
    }
}

fn cand(name: &str) -> CandidateId {
    CandidateId::new(name).expect("generated name")
}

/// Random WMG with margins in [-max, max], optionally restricted to even
/// values (even margins are exactly the vote-pair-realizable ones).
pub fn random_wmg(
    rng: &mut StdRng,
    m: usize,
    max_margin: i64,
    even: bool,
) -> WeightedMajorityGraph {
    let cands: Vec<CandidateId> = (0..m).map(|i| cand(&format!("c{i}"))).collect();
    let mut margins = Vec::new();
    for i in 0..m {
        for j in (i + 1)..m {
            let v = if even {
                2 * rng.gen_range(-(max_margin / 2)..=(max_margin / 2))
            } else {
                rng.gen_range(-max_margin..=max_margin)
            };
            margins.push((cands[i].clone(), cands[j].clone(), v));
        }
    }
    WeightedMajorityGraph::from_margins(cands, &margins).expect("distinct names")
}

/// Random election: m candidates, n uniformly random linear-order ballots.
pub fn random_election(rng: &mut StdRng, m: usize, n: u64) -> Election {
    let cands: Vec<CandidateId> = (0..m).map(|i| cand(&format!("c{i}"))).collect();
    let mut ballots = Vec::new();
    for _ in 0..n {
        let mut r = cands.clone();
        r.shuffle(rng);
        ballots.push((Ballot::new(r).expect("permutation"), 1u64));
    }
    Election::new(cands, ballots).expect("valid")
}

fn dcdc_equivalence_sweep(opts: &SweepOptions) -> SuiteReport {
    let mut rng = StdRng::seed_from_u64(opts.seed);
    let mut failures = Vec::new();
    let mut checks = 0u64;
    for _ in 0..opts.instances {
        let m = rng.gen_range(3..=6);
        let g = random_wmg(&mut rng, m, 10, true);
        let despised = g.candidates()[rng.gen_range(0..m)].clone();
        let limit = rng.gen_range(0..=3u32);
        let (brute, _) = brute_candidate_deletion_wmg(
            &g,
            &Rule::Schulze,
            Mode::Destructive,
            WinnerModel::Nonunique,
            &despised,
            limit,
        )
        .expect("known candidate");
        let fast = solve_dcdc_nonunique(&g, &despised, limit).expect("known candidate");
        checks += 1;
        if brute != fast.decision {
            failures.push(format!(
                "m={m} limit={limit} despised={despised}: brute {brute} vs cut-based {}",
                fast.decision
            ));
        }
    }
    SuiteReport {
        suite: "dcdc-equivalence".into(),
        checks,
        failures,
    }
}

fn in_neighbor_sweep(opts: &SweepOptions) -> SuiteReport {
    let mut rng = StdRng::seed_from_u64(opts.seed);
    let mut failures = Vec::new();
    let mut checks = 0u64;
    for _ in 0..opts.instances {
        let m = rng.gen_range(3..=6);
        let g = random_wmg(&mut rng, m, 10, true);
        let despised = g.candidates()[rng.gen_range(0..m)].clone();
        let limit = rng.gen_range(0..=3u32);
        let (brute, _) = brute_candidate_deletion_wmg(
            &g,
            &Rule::Schulze,
            Mode::Destructive,
            WinnerModel::Nonunique,
            &despised,
            limit,
        )
        .expect("known candidate");
        if !brute {
            continue;
        }
        checks += 1;
        if in_neighbor_witness(&g, &despised, limit)
            .expect("known candidate")
            .is_none()
        {
            failures.push(format!(
                "yes-instance without in-neighbor witness: m={m} limit={limit} despised={despised}"
            ));
        }
    }
    SuiteReport {
        suite: "in-neighbor".into(),
        checks,
        failures,
    }
}

/// Random candidate-deletion instance over a small random election.
pub fn random_deletion_instance(rng: &mut StdRng) -> ControlInstance {
    let m = rng.gen_range(2..=6);
    let n = rng.gen_range(1..=9);
    let e = random_election(rng, m, n);
    let distinguished = e.candidates()[rng.gen_range(0..m)].clone();
    let rule = if rng.gen_bool(0.5) {
        Rule::Schulze
    } else {
        Rule::RankedPairs(TieBreakPolicy::Lexicographic)
    };
    ControlInstance {
        rule,
        mode: if rng.gen_bool(0.5) {
            Mode::Constructive
        } else {
            Mode::Destructive
        },
        model: if rng.gen_bool(0.5) {
            WinnerModel::Unique
        } else {
            WinnerModel::Nonunique
        },
        action: ControlAction::DeleteCandidates,
        registered: e.candidates().to_vec(),
        spare_candidates: Vec::new(),
        ballots: e.ballots().to_vec(),
        spare_ballots: Vec::new(),
        distinguished,
        limits: Limits {
            dc: rng.gen_range(0..=2),
            ..Limits::default()
        },
        groups: None,
    }
}

/// Random destructive nonunique Schulze add+delete instance with
/// |C| + |D| <= 6 and ballots over the combined candidate set.
pub fn random_add_delete_instance(rng: &mut StdRng) -> ControlInstance {
    let total = rng.gen_range(3..=6);
    let spares = rng.gen_range(0..=(total - 2).min(3));
    let m = total - spares;
    let n_ballots = rng.gen_range(1..=9);
    let e = random_election(rng, total, n_ballots);
    let all = e.candidates().to_vec();
    let registered: Vec<CandidateId> = all[..m].to_vec();
    let spare_candidates: Vec<CandidateId> = all[m..].to_vec();
    let distinguished = registered[rng.gen_range(0..m)].clone();
    ControlInstance {
        rule: Rule::Schulze,
        mode: Mode::Destructive,
        model: WinnerModel::Nonunique,
        action: ControlAction::AddDeleteCandidates { exact: false },
        registered,
        spare_candidates,
        ballots: e.ballots().to_vec(),
        spare_ballots: Vec::new(),
        distinguished,
        limits: Limits {
            ac: rng.gen_range(0..=spares as u32),
            dc: rng.gen_range(0..=2),
            ..Limits::default()
        },
        groups: None,
    }
}

/// Random destructive nonunique Schulze grouped instance (group deletion or
/// group addition), |C| + |D| <= 6, with a random total labelling.
pub fn random_grouped_instance(rng: &mut StdRng) -> ControlInstance {
    let adding = rng.gen_bool(0.5);
    let total = rng.gen_range(3..=6);
    let spares = if adding {
        rng.gen_range(1..=(total - 2).min(3))
    } else {
        0
    };
    let m = total - spares;
    let n_ballots = rng.gen_range(1..=9);
    let e = random_election(rng, total, n_ballots);
    let all = e.candidates().to_vec();
    let registered: Vec<CandidateId> = all[..m].to_vec();
    let spare_candidates: Vec<CandidateId> = all[m..].to_vec();
    let distinguished = registered[rng.gen_range(0..m)].clone();
    let n_groups = rng.gen_range(1..=total);
    let groups = all
        .iter()
        .map(|c| (c.clone(), format!("g{}", rng.gen_range(0..n_groups))))
        .collect();
    ControlInstance {
        rule: Rule::Schulze,
        mode: Mode::Destructive,
        model: WinnerModel::Nonunique,
        action: if adding {
            ControlAction::AddCandidateGroups
        } else {
            ControlAction::DeleteCandidateGroups
        },
        registered,
        spare_candidates,
        ballots: e.ballots().to_vec(),
        spare_ballots: Vec::new(),
        distinguished,
        limits: Limits {
            ac: if adding {
                rng.gen_range(0..=spares as u32)
            } else {
                0
            },
            dc: if adding { 0 } else { rng.gen_range(0..=3) },
            ..Limits::default()
        },
        groups: Some(groups),
    }
}

fn lift_equivalence_sweep(opts: &SweepOptions) -> SuiteReport {
    let mut rng = StdRng::seed_from_u64(opts.seed);
    let mut failures = Vec::new();
    let mut checks = 0u64;
    let solve_opts = SolveOptions::default();
    for _ in 0..opts.instances {
        let inst = random_deletion_instance(&mut rng);
        let ac = rng.gen_range(0..=2u32);
        let lifted = lift_deletion_to_exact(&inst, ac).expect("deletion instance");
        let src = solve_control(&inst, &solve_opts)
            .expect("small instance")
            .decision;
        let ad = solve_control(&lifted.add_delete, &solve_opts)
            .expect("small instance")
            .decision;
        let rc = solve_control(&lifted.replace, &solve_opts)
            .expect("small instance")
            .decision;
        checks += 1;
        if src != ad || src != rc {
            failures.push(format!(
                "lift mismatch (src {src}, add+delete {ad}, replace {rc}): {inst:?}"
            ));
        }
    }
    SuiteReport {
        suite: "lift-equivalence".into(),
        checks,
        failures,
    }
}

/// Truth-table satisfiability; the independent oracle for formula sweeps.
pub fn truth_table_satisfiable(f: &ThreeSatInstance) -> bool {
    let nv = f.num_vars as usize;
    (0..(1u32 << nv)).any(|bits| {
        f.clauses.iter().all(|cl| {
            cl.iter()
                .any(|l| (bits >> (l.var - 1)) & 1 == if l.negated { 0 } else { 1 })
        })
    })
}

/// Every 3-CNF over exactly the variables {1, 2, 3} with at most `max_clauses`
/// distinct clauses, deduplicated up to clause order.
pub fn small_formulas(max_clauses: usize) -> Vec<ThreeSatInstance> {
    let mut all_clauses = Vec::new();
    for signs in 0..8u32 {
        let cl = [
            Lit {
                var: 1,
                negated: signs & 1 != 0,
            },
            Lit {
                var: 2,
                negated: signs & 2 != 0,
            },
            Lit {
                var: 3,
                negated: signs & 4 != 0,
            },
        ];
        all_clauses.push(cl);
    }
    let mut out = Vec::new();
    for i in 0..all_clauses.len() {
        out.push(ThreeSatInstance::new(3, vec![all_clauses[i]]).unwrap());
        if max_clauses >= 2 {
            for j in (i + 1)..all_clauses.len() {
                out.push(ThreeSatInstance::new(3, vec![all_clauses[i], all_clauses[j]]).unwrap());
            }
        }
    }
    out
}

/// The always-yes single exact-cover instance at s = 1.
pub fn rx3c_s1() -> Rx3cInstance {
    Rx3cInstance {
        elements: vec!["e1".into(), "e2".into(), "e3".into()],
        triples: vec![[0, 1, 2], [0, 1, 2], [0, 1, 2]],
    }
}

/// A yes-instance at s = 2: two complementary triple families.
pub fn rx3c_s2_yes() -> Rx3cInstance {
    Rx3cInstance {
        elements: (1..=6).map(|i| format!("e{i}")).collect(),
        triples: vec![
            [0, 1, 2],
            [0, 1, 2],
            [0, 1, 2],
            [3, 4, 5],
            [3, 4, 5],
            [3, 4, 5],
        ],
    }
}

/// A no-instance at s = 2: three-regular with no complementary triple pair
/// (at s = 2 an exact cover is exactly a complementary pair).
pub fn rx3c_s2_no() -> Rx3cInstance {
    Rx3cInstance {
        elements: (1..=6).map(|i| format!("e{i}")).collect(),
        triples: vec![
            [0, 1, 2],
            [0, 1, 3],
            [2, 3, 4],
            [0, 4, 5],
            [1, 4, 5],
            [2, 3, 5],
        ],
    }
}

/// Exhaustive exact-cover decision by sublist enumeration.
pub fn rx3c_decision(inst: &Rx3cInstance) -> bool {
    let s = inst.s();
    let n = inst.triples.len();
    fn rec(triples: &[[usize; 3]], n_elem: usize, start: usize, used: u64, left: usize) -> bool {
        if left == 0 {
            return used == (1u64 << n_elem) - 1;
        }
        for i in start..triples.len() {
            let mask = triples[i].iter().fold(0u64, |m, &e| m | (1 << e));
            if used & mask == 0 && rec(triples, n_elem, i + 1, used | mask, left - 1) {
                return true;
            }
        }
        false
    }
    rec(&inst.triples, inst.elements.len(), 0, 0, s.min(n))
}

/// Decide all four instances of a voter reduction by brute force.
pub fn voter_reduction_decisions(
    red: &crate::reductions::VoterControlReduction,
    opts: &SolveOptions,
) -> Result<[bool; 4]> {
    let arts = red.artifacts();
    let mut out = [false; 4];
    for (i, art) in arts.iter().enumerate() {
        out[i] = solve_control(&art.instance, opts)?.decision;
    }
    Ok(out)
}

fn reduction_faithfulness_sweep(opts: &SweepOptions) -> Result<SuiteReport> {
    let mut failures = Vec::new();
    let mut checks = 0u64;
    let solve_opts = SolveOptions::default();

    // regression: a satisfiable formula the uncorrected table maps to "no"
    let phi = ThreeSatInstance::new(
        3,
        vec![
            [
                Lit {
                    var: 1,
                    negated: false,
                },
                Lit {
                    var: 2,
                    negated: false,
                },
                Lit {
                    var: 3,
                    negated: true,
                },
            ],
            [
                Lit {
                    var: 1,
                    negated: true,
                },
                Lit {
                    var: 2,
                    negated: false,
                },
                Lit {
                    var: 3,
                    negated: false,
                },
            ],
        ],
    )?;
    let flawed = threesat_to_ccdc(&phi, CcdcVariant::FlawedOriginal)?;
    let fixed = threesat_to_ccdc(&phi, CcdcVariant::FixedNonunique)?;
    checks += 2;
    if solve_control(&flawed.instance, &solve_opts)?.decision {
        failures.push("uncorrected table decided yes on the regression formula".into());
    }
    if !solve_control(&fixed.instance, &solve_opts)?.decision {
        failures.push("corrected table decided no on the regression formula".into());
    }

    // formula sweep, bounded by the requested instance budget
    let max_clauses = if opts.instances >= 100 { 2 } else { 1 };
    for f in small_formulas(max_clauses) {
        let sat = truth_table_satisfiable(&f);
        for variant in [CcdcVariant::FixedNonunique, CcdcVariant::FixedUnique] {
            let art = threesat_to_ccdc(&f, variant)?;
            let dec = solve_control(&art.instance, &solve_opts)?.decision;
            checks += 1;
            if dec != sat {
                failures.push(format!(
                    "formula {f:?} variant {variant:?}: satisfiable {sat}, control {dec}"
                ));
            }
        }
    }

    // exact-cover reductions at s = 1 (always yes), both rules and variants
    let s1 = rx3c_s1();
    let expected = rx3c_decision(&s1);
    for model in [WinnerModel::Nonunique, WinnerModel::Unique] {
        for red in [
            rx3c_to_schulze_voter(&s1, model)?,
            rx3c_to_rankedpairs_voter(&s1, model)?,
        ] {
            let decisions = voter_reduction_decisions(&red, &solve_opts)?;
            for (art, dec) in red.artifacts().iter().zip(decisions) {
                checks += 1;
                if dec != expected {
                    failures.push(format!("{}: expected {expected}, got {dec}", art.variant));
                }
            }
        }
    }

    Ok(SuiteReport {
        suite: "reduction-faithfulness".into(),
        checks,
        failures,
    })
}

fn ibc_sweep(opts: &SweepOptions) -> SuiteReport {
    let mut rng = StdRng::seed_from_u64(opts.seed);
    let mut failures = Vec::new();
    let mut checks = 0u64;
    for i in 0..opts.instances {
        let m = rng.gen_range(1..=5);
        // a padded candidate ties everyone in an empty election and would
        // join the winner set, so padding neutrality starts at one ballot
        let n = rng.gen_range(1..=9);
        let e = random_election(&mut rng, m, n);
        let newcomer = cand(&format!("z_pad{i}"));
        let padded = e.pad_bottom(&[newcomer]).expect("fresh name");
        checks += 1;
        let w0 = schulze_winners(&e.wmg()).expect("nonempty");
        let w1 = schulze_winners(&padded.wmg()).expect("nonempty");
        if w0 != w1 {
            failures.push(format!("schulze winners changed under padding: {e:?}"));
        }
        for policy in [
            TieBreakPolicy::Lexicographic,
            TieBreakPolicy::FavorDesignated(e.candidates()[0].clone()),
        ] {
            let r0 = ranked_pairs_winner(&e.wmg(), &policy).expect("nonempty");
            let r1 = ranked_pairs_winner(&padded.wmg(), &policy).expect("nonempty");
            if r0 != r1 {
                failures.push(format!(
                    "ranked-pairs winner changed under padding ({policy:?}): {e:?}"
                ));
            }
        }
    }
    SuiteReport {
        suite: "ibc".into(),
        checks,
        failures,
    }
}
