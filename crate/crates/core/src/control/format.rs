//! Control-instance file format.
//!
//! An election section (whose ballots rank the registered *and* spare
//! candidates) followed by a `[control]` section and optional
//! `[spare-candidates]`, `[spare-ballots]` and `[groups]` sections:
//!
//! ```text
//! candidates: a, b, p
//! 2: a > b > p > d1
//! [control]
//! type = add-delete-candidates
//! exact = true
//! mode = constructive
//! model = nonunique
//! rule = schulze
//! distinguished = p
//! limits = ac:1, dc:2
//! [spare-candidates]
//! d1
//! ```

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::format::parse_ballot_line;
use crate::profile::{Ballot, CandidateId};
use crate::ranked_pairs::TieBreakPolicy;

use super::{ControlAction, ControlInstance, Limits, Mode, Rule, WinnerModel};

fn action_name(action: ControlAction) -> (&'static str, Option<bool>) {
    match action {
        ControlAction::AddCandidates => ("add-candidates", None),
        ControlAction::DeleteCandidates => ("delete-candidates", None),
        ControlAction::AddDeleteCandidates { exact } => ("add-delete-candidates", Some(exact)),
        ControlAction::ReplaceCandidates { exact } => ("replace-candidates", Some(exact)),
        ControlAction::AddDeleteVoters { exact } => ("add-delete-voters", Some(exact)),
        ControlAction::ReplaceVoters { exact } => ("replace-voters", Some(exact)),
        ControlAction::Multimode { exact } => ("multimode", Some(exact)),
        ControlAction::DeleteCandidateGroups => ("delete-candidate-groups", None),
        ControlAction::AddCandidateGroups => ("add-candidate-groups", None),
    }
}

fn action_from(name: &str, exact: bool) -> Result<ControlAction> {
    Ok(match name {
        "add-candidates" => ControlAction::AddCandidates,
        "delete-candidates" => ControlAction::DeleteCandidates,
        "add-delete-candidates" => ControlAction::AddDeleteCandidates { exact },
        "replace-candidates" => ControlAction::ReplaceCandidates { exact },
        "add-delete-voters" => ControlAction::AddDeleteVoters { exact },
        "replace-voters" => ControlAction::ReplaceVoters { exact },
        "multimode" => ControlAction::Multimode { exact },
        "delete-candidate-groups" => ControlAction::DeleteCandidateGroups,
        "add-candidate-groups" => ControlAction::AddCandidateGroups,
        other => {
            return Err(Error::InvalidInstance(format!(
                "unknown control type {other:?}"
            )))
        }
    })
}

/// Serialize in canonical form.
pub fn serialize_control_instance(inst: &ControlInstance) -> String {
    let mut out = String::new();
    out.push_str("candidates: ");
    out.push_str(
        &inst
            .registered
            .iter()
            .map(|c| c.to_string())
            .collect::<Vec<_>>()
            .join(", "),
    );
    out.push('\n');
    for (b, m) in &inst.ballots {
        out.push_str(&format!("{m}: {b}\n"));
    }
    out.push_str("[control]\n");
    let (name, exact) = action_name(inst.action);
    out.push_str(&format!("type = {name}\n"));
    if let Some(e) = exact {
        out.push_str(&format!("exact = {e}\n"));
    }
    out.push_str(&format!(
        "mode = {}\n",
        match inst.mode {
            Mode::Constructive => "constructive",
            Mode::Destructive => "destructive",
        }
    ));
    out.push_str(&format!(
        "model = {}\n",
        match inst.model {
            WinnerModel::Unique => "unique",
            WinnerModel::Nonunique => "nonunique",
        }
    ));
    match &inst.rule {
        Rule::Schulze => out.push_str("rule = schulze\n"),
        Rule::RankedPairs(policy) => {
            out.push_str("rule = ranked-pairs\n");
            match policy {
                TieBreakPolicy::Lexicographic => out.push_str("tiebreak = lexicographic\n"),
                TieBreakPolicy::FavorDesignated(c) => {
                    out.push_str(&format!("tiebreak = favor:{c}\n"))
                }
            }
        }
    }
    out.push_str(&format!("distinguished = {}\n", inst.distinguished));
    let l = inst.limits;
    let mut limits: Vec<String> = Vec::new();
    for (key, v) in [
        ("ac", l.ac),
        ("av", l.av),
        ("b", l.bribes),
        ("dc", l.dc),
        ("dv", l.dv),
        ("rc", l.rc),
        ("rv", l.rv),
    ] {
        if v > 0 || limit_relevant(inst.action, key) {
            limits.push(format!("{key}:{v}"));
        }
    }
    out.push_str(&format!("limits = {}\n", limits.join(", ")));
    if !inst.spare_candidates.is_empty() {
        out.push_str("[spare-candidates]\n");
        out.push_str(
            &inst
                .spare_candidates
                .iter()
                .map(|c| c.to_string())
                .collect::<Vec<_>>()
                .join(", "),
        );
        out.push('\n');
    }
    if !inst.spare_ballots.is_empty() {
        out.push_str("[spare-ballots]\n");
        for (b, m) in &inst.spare_ballots {
            out.push_str(&format!("{m}: {b}\n"));
        }
    }
    if let Some(groups) = &inst.groups {
        out.push_str("[groups]\n");
        for (c, label) in groups {
            out.push_str(&format!("{c} = {label}\n"));
        }
    }
    out
}

fn limit_relevant(action: ControlAction, key: &str) -> bool {
    match action {
        ControlAction::AddCandidates | ControlAction::AddCandidateGroups => key == "ac",
        ControlAction::DeleteCandidates | ControlAction::DeleteCandidateGroups => key == "dc",
        ControlAction::AddDeleteCandidates { .. } => key == "ac" || key == "dc",
        ControlAction::ReplaceCandidates { .. } => key == "rc",
        ControlAction::AddDeleteVoters { .. } => key == "av" || key == "dv",
        ControlAction::ReplaceVoters { .. } => key == "rv",
        ControlAction::Multimode { .. } => matches!(key, "ac" | "dc" | "av" | "dv" | "b"),
    }
}

/// Parse a control-instance file; the instance is validated.
pub fn parse_control_instance(text: &str) -> Result<ControlInstance> {
    #[derive(PartialEq)]
    enum Section {
        Election,
        Control,
        SpareCandidates,
        SpareBallots,
        Groups,
    }
    let mut section = Section::Election;
    let mut registered: Option<Vec<CandidateId>> = None;
    let mut ballot_lines: Vec<(usize, String)> = Vec::new();
    let mut spare_ballot_lines: Vec<(usize, String)> = Vec::new();
    let mut spare_candidates: Vec<CandidateId> = Vec::new();
    let mut keys: BTreeMap<String, String> = BTreeMap::new();
    let mut groups: BTreeMap<CandidateId, String> = BTreeMap::new();
    let mut saw_groups = false;

    for (lineno, raw) in text.lines().enumerate() {
        let lineno = lineno + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        match line {
            "[control]" => {
                section = Section::Control;
                continue;
            }
            "[spare-candidates]" => {
                section = Section::SpareCandidates;
                continue;
            }
            "[spare-ballots]" => {
                section = Section::SpareBallots;
                continue;
            }
            "[groups]" => {
                section = Section::Groups;
                saw_groups = true;
                continue;
            }
            _ => {}
        }
        match section {
            Section::Election => {
                if registered.is_none() {
                    let rest = line.strip_prefix("candidates:").ok_or(Error::Parse {
                        line: lineno,
                        msg: "expected `candidates:` header".into(),
                    })?;
                    let mut cands = Vec::new();
                    for tok in rest.split(',') {
                        let tok = tok.trim();
                        if tok.is_empty() {
                            continue;
                        }
                        cands.push(CandidateId::new(tok).map_err(|e| Error::Parse {
                            line: lineno,
                            msg: e.to_string(),
                        })?);
                    }
                    registered = Some(cands);
                } else {
                    ballot_lines.push((lineno, line.to_string()));
                }
            }
            Section::Control => {
                let (k, v) = line.split_once('=').ok_or(Error::Parse {
                    line: lineno,
                    msg: "expected `key = value`".into(),
                })?;
                keys.insert(k.trim().to_string(), v.trim().to_string());
            }
            Section::SpareCandidates => {
                for tok in line.split(',') {
                    let tok = tok.trim();
                    if tok.is_empty() {
                        continue;
                    }
                    spare_candidates.push(CandidateId::new(tok).map_err(|e| Error::Parse {
                        line: lineno,
                        msg: e.to_string(),
                    })?);
                }
            }
            Section::SpareBallots => {
                spare_ballot_lines.push((lineno, line.to_string()));
            }
            Section::Groups => {
                let (c, label) = line.split_once('=').ok_or(Error::Parse {
                    line: lineno,
                    msg: "expected `candidate = group`".into(),
                })?;
                let c = CandidateId::new(c.trim()).map_err(|e| Error::Parse {
                    line: lineno,
                    msg: e.to_string(),
                })?;
                groups.insert(c, label.trim().to_string());
            }
        }
    }

    let mut registered = registered.ok_or(Error::Parse {
        line: 1,
        msg: "missing `candidates:` header".into(),
    })?;
    registered.sort();
    spare_candidates.sort();
    let all: Vec<CandidateId> = {
        let mut v = registered.clone();
        v.extend(spare_candidates.iter().cloned());
        v.sort();
        v
    };
    let mut ballots: Vec<(Ballot, u64)> = Vec::new();
    for (lineno, line) in &ballot_lines {
        ballots.push(parse_ballot_line(line, *lineno, &all)?);
    }
    let mut spare_ballots: Vec<(Ballot, u64)> = Vec::new();
    for (lineno, line) in &spare_ballot_lines {
        spare_ballots.push(parse_ballot_line(line, *lineno, &all)?);
    }

    let need = |k: &str| -> Result<&String> {
        keys.get(k)
            .ok_or_else(|| Error::InvalidInstance(format!("[control] misses `{k}`")))
    };
    let exact = match keys.get("exact").map(|s| s.as_str()) {
        None => false,
        Some("true") => true,
        Some("false") => false,
        Some(other) => {
            return Err(Error::InvalidInstance(format!(
                "exact must be true or false, got {other:?}"
            )))
        }
    };
    let action = action_from(need("type")?, exact)?;
    let mode = match need("mode")?.as_str() {
        "constructive" => Mode::Constructive,
        "destructive" => Mode::Destructive,
        other => {
            return Err(Error::InvalidInstance(format!("unknown mode {other:?}")));
        }
    };
    let model = match need("model")?.as_str() {
        "unique" => WinnerModel::Unique,
        "nonunique" => WinnerModel::Nonunique,
        other => {
            return Err(Error::InvalidInstance(format!("unknown model {other:?}")));
        }
    };
    let rule = match need("rule")?.as_str() {
        "schulze" => Rule::Schulze,
        "ranked-pairs" => {
            let policy = match keys.get("tiebreak").map(|s| s.as_str()) {
                None | Some("lexicographic") => TieBreakPolicy::Lexicographic,
                Some(t) => match t.strip_prefix("favor:") {
                    Some(c) => TieBreakPolicy::FavorDesignated(CandidateId::new(c)?),
                    None => return Err(Error::InvalidInstance(format!("unknown tiebreak {t:?}"))),
                },
            };
            Rule::RankedPairs(policy)
        }
        other => {
            return Err(Error::InvalidInstance(format!("unknown rule {other:?}")));
        }
    };
    let distinguished = CandidateId::new(need("distinguished")?.as_str())?;
    let mut limits = Limits::default();
    if let Some(spec) = keys.get("limits") {
        for part in spec.split(',') {
            let part = part.trim();
            if part.is_empty() {
                continue;
            }
            let (k, v) = part.split_once(':').ok_or_else(|| {
                Error::InvalidInstance(format!("limit entry {part:?} is not `key:value`"))
            })?;
            let v: u32 = v.trim().parse().map_err(|_| {
                Error::InvalidInstance(format!("malformed limit value in {part:?}"))
            })?;
            match k.trim() {
                "ac" => limits.ac = v,
                "dc" => limits.dc = v,
                "av" => limits.av = v,
                "dv" => limits.dv = v,
                "b" => limits.bribes = v,
                "rc" => limits.rc = v,
                "rv" => limits.rv = v,
                other => {
                    return Err(Error::InvalidInstance(format!(
                        "unknown limit key {other:?}"
                    )))
                }
            }
        }
    }

    let inst = ControlInstance {
        rule,
        mode,
        model,
        action,
        registered,
        spare_candidates,
        ballots,
        spare_ballots,
        distinguished,
        limits,
        groups: if saw_groups { Some(groups) } else { None },
    };
    inst.validate()?;
    Ok(inst)
}
