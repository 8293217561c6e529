//! `votecut`: winner determination, electoral-control solving, vertex cuts,
//! reduction generation and self-check sweeps on the command line.
//!
//! Exit codes: 0 = computed (whatever the decision), 1 = input or usage
//! error, 2 = search-space refusal.

mod report;

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use votecut_core::control::{
    parse_control_instance, serialize_control_instance, solve_control, ControlAction, Mode, Rule,
    SolveOptions, WinnerModel, DEFAULT_GUARD,
};
use votecut_core::cuts::{
    cppvc_decide, min_st_vertex_cut, mippvc_decide, parse_digraph, ppvc_decide,
};
use votecut_core::dcdc::{dcac_dc_via_cut, group_control_via_cut, solve_dcdc_nonunique};
use votecut_core::format::{looks_like_wmg, parse_election, parse_wmg, serialize_election};
use votecut_core::profile::CandidateId;
use votecut_core::ranked_pairs::{lock_pairs, pair_agenda, TieBreakPolicy};
use votecut_core::reductions::{
    parse_cnf, parse_rx3c, provenance_text, rx3c_to_rankedpairs_voter, rx3c_to_schulze_voter,
    threesat_to_ccdc, CcdcVariant, ReductionArtifact,
};
use votecut_core::schulze::{schulze_winners, strongest_paths};
use votecut_core::verify::{run_suite, SweepOptions, SUITES};
use votecut_core::{Error as CoreError, WeightedMajorityGraph};

use report::Report;

#[derive(Parser)]
#[command(
    name = "votecut",
    version,
    about = "Schulze and ranked-pairs winners, electoral control, vertex cuts and reduction generators"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum RuleArg {
    Schulze,
    RankedPairs,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Auto,
    Election,
    Wmg,
}

#[derive(Args)]
struct OutputArgs {
    /// Emit a JSON report instead of plain text
    #[arg(long)]
    json: bool,
    /// Omit the elapsed-time line (byte-identical reruns)
    #[arg(long)]
    no_timing: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the winner set (Schulze) or winner (ranked pairs) of an
    /// election or WMG file
    Winners {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "schulze")]
        rule: RuleArg,
        /// Tie-breaking for ranked pairs: `lexicographic` or `favor:<name>`
        #[arg(long, default_value = "lexicographic")]
        tiebreak: String,
        #[arg(long, value_enum, default_value = "auto")]
        format: FormatArg,
        /// Also print the strongest-path matrix / lock trace
        #[arg(long, short)]
        verbose: bool,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Decide a control-instance file
    Control {
        file: PathBuf,
        /// brute = exhaustive search; poly = cut-query solver for destructive
        /// nonunique Schulze candidate deletion; cut = reduction drivers for
        /// add+delete and grouped variants
        #[arg(long, default_value = "brute")]
        solver: String,
        /// Ignore the search-space guard
        #[arg(long)]
        force: bool,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Generate control instances from a CNF formula or an exact-cover
    /// instance
    Reduce {
        input: PathBuf,
        #[arg(long)]
        from: String,
        /// 3sat: flawed-original | fixed-nonunique | fixed-unique
        #[arg(long)]
        variant: Option<String>,
        /// rx3c: schulze | ranked-pairs
        #[arg(long, value_enum, default_value = "schulze")]
        rule: RuleArg,
        /// rx3c: winner model of the constructive instances
        #[arg(long, default_value = "nonunique")]
        model: String,
        /// Directory the instance files are written to
        #[arg(long, short, default_value = ".")]
        out_dir: PathBuf,
    },
    /// Vertex-cut queries over a digraph file
    Cut {
        file: PathBuf,
        #[arg(long)]
        problem: String,
        #[arg(long, short)]
        source: String,
        #[arg(long, short)]
        target: String,
        /// Cut budget (ppvc, cppvc)
        #[arg(short)]
        k: Option<usize>,
        /// Labeled vertices, comma-separated (mippvc)
        #[arg(long)]
        labels: Option<String>,
        /// Max unlabeled vertices in the cut (mippvc)
        #[arg(short)]
        x: Option<usize>,
        /// Min labeled vertices in the cut (mippvc)
        #[arg(short)]
        y: Option<usize>,
        /// Total coloring `v:color,...` (cppvc)
        #[arg(long)]
        colors: Option<String>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Realize a WMG file as an election via vote pairs
    Realize {
        file: PathBuf,
        /// Output path; stdout when omitted
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Run a named verification sweep
    Verify {
        #[arg(long)]
        suite: String,
        #[arg(long, default_value_t = 0x5eed)]
        seed: u64,
        /// Number of random instances per sweep
        #[arg(long, default_value_t = 500)]
        instances: usize,
        #[command(flatten)]
        output: OutputArgs,
    },
}

enum CliError {
    Input(String),
    Refusal(String),
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::SearchSpaceExceeded { .. } => CliError::Refusal(e.to_string()),
            other => CliError::Input(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Input(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Refusal(msg)) => {
            eprintln!("refused: {msg}");
            ExitCode::from(2)
        }
    }
}

fn parse_policy(spec: &str) -> Result<TieBreakPolicy, CliError> {
    if spec == "lexicographic" {
        return Ok(TieBreakPolicy::Lexicographic);
    }
    if let Some(name) = spec.strip_prefix("favor:") {
        return Ok(TieBreakPolicy::FavorDesignated(
            CandidateId::new(name).map_err(CliError::from)?,
        ));
    }
    Err(CliError::Input(format!(
        "unknown tiebreak {spec:?}; use `lexicographic` or `favor:<name>`"
    )))
}

fn load_wmg(path: &PathBuf, format: FormatArg) -> Result<WeightedMajorityGraph, CliError> {
    let text = std::fs::read_to_string(path)?;
    let as_wmg = match format {
        FormatArg::Wmg => true,
        FormatArg::Election => false,
        FormatArg::Auto => looks_like_wmg(&text),
    };
    if as_wmg {
        Ok(parse_wmg(&text)?)
    } else {
        Ok(parse_election(&text)?.wmg())
    }
}

fn guard_from_env() -> u64 {
    std::env::var("VOTECUT_GUARD")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(DEFAULT_GUARD)
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Winners {
            file,
            rule,
            tiebreak,
            format,
            verbose,
            output,
        } => {
            let started = Instant::now();
            let g = load_wmg(&file, format)?;
            let mut report = Report::new(output.json, output.no_timing);
            match rule {
                RuleArg::Schulze => {
                    let winners = schulze_winners(&g)?;
                    report.list("winners", winners.iter().map(|c| c.to_string()).collect());
                    if verbose && g.len() >= 2 {
                        let p = strongest_paths(&g)?;
                        for (i, c) in g.candidates().iter().enumerate() {
                            for (j, d) in g.candidates().iter().enumerate() {
                                if i != j {
                                    report.line(
                                        &format!("path-strength.{c}.{d}"),
                                        &p.strength_at(i, j).to_string(),
                                    );
                                }
                            }
                        }
                    }
                }
                RuleArg::RankedPairs => {
                    let policy = parse_policy(&tiebreak)?;
                    if verbose && g.len() >= 2 {
                        let agenda = pair_agenda(&g, &policy)?;
                        let locked = lock_pairs(&g, &agenda)?;
                        for (i, pair) in agenda.iter().enumerate() {
                            let status = if locked.skipped().iter().any(|s| s.pair == *pair) {
                                "skipped"
                            } else {
                                "locked"
                            };
                            report.line(
                                &format!("agenda.{i}"),
                                &format!(
                                    "{} > {} ({}) {status}",
                                    pair.winner, pair.loser, pair.margin
                                ),
                            );
                        }
                        report.line("winner", locked.source().as_str());
                    } else {
                        let w = votecut_core::ranked_pairs::ranked_pairs_winner(&g, &policy)?;
                        report.line("winner", w.as_str());
                    }
                }
            }
            report.finish(started);
            Ok(())
        }
        Command::Control {
            file,
            solver,
            force,
            output,
        } => {
            let started = Instant::now();
            let text = std::fs::read_to_string(&file)?;
            let inst = parse_control_instance(&text)?;
            let mut report = Report::new(output.json, output.no_timing);
            match solver.as_str() {
                "brute" => {
                    let opts = SolveOptions {
                        guard: guard_from_env(),
                        force,
                    };
                    let out = solve_control(&inst, &opts)?;
                    report.line("decision", if out.decision { "yes" } else { "no" });
                    report.line("evaluated", &out.evaluated.to_string());
                    if let Some(w) = out.witness {
                        if !w.added_candidates.is_empty() {
                            report.list(
                                "witness.add-candidates",
                                w.added_candidates.iter().map(|c| c.to_string()).collect(),
                            );
                        }
                        if !w.deleted_candidates.is_empty() {
                            report.list(
                                "witness.delete-candidates",
                                w.deleted_candidates.iter().map(|c| c.to_string()).collect(),
                            );
                        }
                        if !w.deleted_ballots.is_empty() {
                            report.list(
                                "witness.delete-ballots",
                                w.deleted_ballots
                                    .iter()
                                    .map(|(i, k)| format!("{i}x{k}"))
                                    .collect(),
                            );
                        }
                        if !w.added_ballots.is_empty() {
                            report.list(
                                "witness.add-ballots",
                                w.added_ballots
                                    .iter()
                                    .map(|(i, k)| format!("{i}x{k}"))
                                    .collect(),
                            );
                        }
                        for (i, (src, ballot)) in w.bribes.iter().enumerate() {
                            report.line(
                                &format!("witness.bribe.{i}"),
                                &format!("{src:?} -> {ballot}"),
                            );
                        }
                    }
                }
                "poly" => {
                    if inst.rule != Rule::Schulze
                        || inst.mode != Mode::Destructive
                        || inst.model != WinnerModel::Nonunique
                        || inst.action != ControlAction::DeleteCandidates
                    {
                        return Err(CliError::Input(
                            "--solver poly handles destructive nonunique Schulze candidate deletion only"
                                .into(),
                        ));
                    }
                    let e = inst.base_election()?;
                    let out = solve_dcdc_nonunique(&e.wmg(), &inst.distinguished, inst.limits.dc)?;
                    report.line("decision", if out.decision { "yes" } else { "no" });
                    if out.decision {
                        report.list(
                            "witness.delete-candidates",
                            out.deletions.iter().map(|c| c.to_string()).collect(),
                        );
                        if let Some(r) = out.rival {
                            report.line("witness.rival", r.as_str());
                        }
                    }
                }
                "cut" => {
                    let decision =
                        match inst.action {
                            ControlAction::AddDeleteCandidates { exact: false } => {
                                dcac_dc_via_cut(&inst)?
                            }
                            ControlAction::DeleteCandidateGroups
                            | ControlAction::AddCandidateGroups => group_control_via_cut(&inst)?,
                            _ => return Err(CliError::Input(
                                "--solver cut handles add+delete-candidates and grouped variants"
                                    .into(),
                            )),
                        };
                    report.line("decision", if decision { "yes" } else { "no" });
                }
                other => {
                    return Err(CliError::Input(format!(
                        "unknown solver {other:?}; use brute, poly or cut"
                    )))
                }
            }
            report.finish(started);
            Ok(())
        }
        Command::Reduce {
            input,
            from,
            variant,
            rule,
            model,
            out_dir,
        } => {
            let text = std::fs::read_to_string(&input)?;
            std::fs::create_dir_all(&out_dir)?;
            let stem = input
                .file_stem()
                .and_then(|s| s.to_str())
                .unwrap_or("instance")
                .to_string();
            let mut written: Vec<PathBuf> = Vec::new();
            let mut write_artifact =
                |artifact: &ReductionArtifact, name: &str| -> Result<(), CliError> {
                    let path = out_dir.join(format!("{stem}_{name}.control"));
                    std::fs::write(&path, serialize_control_instance(&artifact.instance))?;
                    let prov = out_dir.join(format!("{stem}_{name}.prov"));
                    std::fs::write(&prov, provenance_text(artifact))?;
                    written.push(path);
                    written.push(prov);
                    Ok(())
                };
            match from.as_str() {
                "3sat" => {
                    let formula = parse_cnf(&text)?;
                    let variant = match variant.as_deref() {
                        Some("flawed-original") => CcdcVariant::FlawedOriginal,
                        Some("fixed-nonunique") | None => CcdcVariant::FixedNonunique,
                        Some("fixed-unique") => CcdcVariant::FixedUnique,
                        Some(other) => {
                            return Err(CliError::Input(format!("unknown variant {other:?}")))
                        }
                    };
                    let artifact = threesat_to_ccdc(&formula, variant)?;
                    write_artifact(&artifact, variant.tag().replace('-', "_").as_str())?;
                }
                "rx3c" => {
                    let inst = parse_rx3c(&text)?;
                    let model = match model.as_str() {
                        "unique" => WinnerModel::Unique,
                        "nonunique" => WinnerModel::Nonunique,
                        other => return Err(CliError::Input(format!("unknown model {other:?}"))),
                    };
                    let red = match rule {
                        RuleArg::Schulze => rx3c_to_schulze_voter(&inst, model)?,
                        RuleArg::RankedPairs => rx3c_to_rankedpairs_voter(&inst, model)?,
                    };
                    write_artifact(&red.exact_add_delete_constructive, "eccavdv")?;
                    write_artifact(&red.exact_add_delete_destructive, "edcavdv")?;
                    write_artifact(&red.replace_constructive, "ccrv")?;
                    write_artifact(&red.replace_destructive, "dcrv")?;
                }
                other => {
                    return Err(CliError::Input(format!(
                        "unknown source {other:?}; use 3sat or rx3c"
                    )))
                }
            }
            for path in written {
                println!("wrote: {}", path.display());
            }
            Ok(())
        }
        Command::Cut {
            file,
            problem,
            source,
            target,
            k,
            labels,
            x,
            y,
            colors,
            output,
        } => {
            let started = Instant::now();
            let g = parse_digraph(&std::fs::read_to_string(&file)?)?;
            let mut report = Report::new(output.json, output.no_timing);
            let need_k =
                || k.ok_or_else(|| CliError::Input("this problem needs -k <budget>".into()));
            match problem.as_str() {
                "min" => {
                    let (size, cut) = min_st_vertex_cut(&g, &source, &target)?;
                    report.line("size", &size.to_string());
                    report.list("cut", cut);
                }
                "ppvc" => {
                    let (yes, witness) = ppvc_decide(&g, &source, &target, need_k()?)?;
                    report.line("decision", if yes { "yes" } else { "no" });
                    if let Some(w) = witness {
                        report.list("cut", w);
                    }
                }
                "mippvc" => {
                    let labeled: BTreeSet<String> = labels
                        .unwrap_or_default()
                        .split(',')
                        .filter(|s| !s.is_empty())
                        .map(|s| s.trim().to_string())
                        .collect();
                    let x =
                        x.ok_or_else(|| CliError::Input("mippvc needs -x <max unlabeled>".into()))?;
                    let y =
                        y.ok_or_else(|| CliError::Input("mippvc needs -y <min labeled>".into()))?;
                    let (yes, witness) = mippvc_decide(&g, &source, &target, &labeled, x, y)?;
                    report.line("decision", if yes { "yes" } else { "no" });
                    if let Some(w) = witness {
                        report.list("cut", w);
                    }
                }
                "cppvc" => {
                    let mut coloring: BTreeMap<String, String> = BTreeMap::new();
                    for part in colors.unwrap_or_default().split(',') {
                        let part = part.trim();
                        if part.is_empty() {
                            continue;
                        }
                        let (v, c) = part.split_once(':').ok_or_else(|| {
                            CliError::Input(format!("color entry {part:?} is not `vertex:color`"))
                        })?;
                        coloring.insert(v.trim().to_string(), c.trim().to_string());
                    }
                    let (yes, witness) = cppvc_decide(&g, &source, &target, &coloring, need_k()?)?;
                    report.line("decision", if yes { "yes" } else { "no" });
                    if let Some(w) = witness {
                        report.list("cut", w);
                    }
                }
                other => {
                    return Err(CliError::Input(format!(
                        "unknown problem {other:?}; use min, ppvc, mippvc or cppvc"
                    )))
                }
            }
            report.finish(started);
            Ok(())
        }
        Command::Realize { file, out } => {
            let g = parse_wmg(&std::fs::read_to_string(&file)?)?;
            let e = g.mcgarvey_realize(None)?;
            let text = serialize_election(&e);
            match out {
                Some(path) => {
                    std::fs::write(&path, text)?;
                    println!("wrote: {}", path.display());
                }
                None => print!("{text}"),
            }
            Ok(())
        }
        Command::Verify {
            suite,
            seed,
            instances,
            output,
        } => {
            let started = Instant::now();
            let names: Vec<&str> = if suite == "all" {
                SUITES.to_vec()
            } else {
                vec![suite.as_str()]
            };
            let mut report = Report::new(output.json, output.no_timing);
            let mut all_passed = true;
            for name in names {
                let r = run_suite(name, &SweepOptions { seed, instances })?;
                let status = if r.passed() { "pass" } else { "fail" };
                report.line(
                    &format!("suite.{name}"),
                    &format!("{status} ({} checks)", r.checks),
                );
                for f in r.failures.iter().take(5) {
                    report.line(&format!("failure.{name}"), f);
                }
                all_passed &= r.passed();
            }
            report.finish(started);
            if !all_passed {
                return Err(CliError::Input("verification sweep failed".into()));
            }
            Ok(())
        }
    }
}
