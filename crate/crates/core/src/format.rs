//! Text formats for elections, weighted majority graphs and digraphs.
//!
//! Election files:
//! ```text
//! candidates: a, b, c, d
//! 4: a > c > b > d
//! 2: d > a > c > b
//! ```
//!
//! WMG files list one `c d <margin>` line per ordered pair with a positive
//! margin (the negative direction is implied, unlisted pairs are 0):
//! ```text
//! candidates: a, b, c, d
//! a b 7
//! a c 5
//! ```
//!
//! Serialization is canonical: sorted candidate header, ballots in list order,
//! WMG edges sorted by (winner, loser). Parsing skips blank lines and `#`
//! comments; canonical output contains neither.

use crate::error::{Error, Result};
use crate::profile::{Ballot, CandidateId, Election, WeightedMajorityGraph};

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

fn parse_candidate_header(line: &str, lineno: usize) -> Result<Vec<CandidateId>> {
    let rest = line
        .strip_prefix("candidates:")
        .ok_or_else(|| parse_err(lineno, "expected `candidates:` header"))?;
    let mut out = Vec::new();
    for tok in rest.split(',') {
        let tok = tok.trim();
        if tok.is_empty() {
            continue;
        }
        out.push(CandidateId::new(tok).map_err(|e| parse_err(lineno, e.to_string()))?);
    }
    if out.is_empty() {
        return Err(parse_err(lineno, "empty candidate list"));
    }
    Ok(out)
}

pub(crate) fn parse_ballot_line(
    line: &str,
    lineno: usize,
    candidates: &[CandidateId],
) -> Result<(Ballot, u64)> {
    let (count, ranking) = line
        .split_once(':')
        .ok_or_else(|| parse_err(lineno, "expected `<count>: c1 > c2 > ...`"))?;
    let mult: u64 = count
        .trim()
        .parse()
        .map_err(|_| parse_err(lineno, format!("malformed count {:?}", count.trim())))?;
    if mult == 0 {
        return Err(parse_err(lineno, "ballot multiplicity must be positive"));
    }
    let mut names = Vec::new();
    for tok in ranking.split('>') {
        let tok = tok.trim();
        if tok.is_empty() {
            return Err(parse_err(lineno, "empty candidate in ranking"));
        }
        names.push(CandidateId::new(tok).map_err(|e| parse_err(lineno, e.to_string()))?);
    }
    let ballot = Ballot::new(names).map_err(|e| parse_err(lineno, e.to_string()))?;
    if ballot.len() != candidates.len() {
        let missing: Vec<String> = candidates
            .iter()
            .filter(|c| !ballot.ranking().contains(c))
            .map(|c| c.to_string())
            .collect();
        return Err(parse_err(
            lineno,
            if missing.is_empty() {
                "ballot ranks a candidate outside the candidate set".to_string()
            } else {
                format!("ballot omits candidate(s): {}", missing.join(", "))
            },
        ));
    }
    for c in ballot.ranking() {
        if !candidates.contains(c) {
            return Err(parse_err(lineno, format!("unknown candidate {c}")));
        }
    }
    Ok((ballot, mult))
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

/// Parse an election file.
pub fn parse_election(text: &str) -> Result<Election> {
    let mut lines = content_lines(text);
    let (lineno, header) = lines
        .next()
        .ok_or_else(|| parse_err(1, "empty election file"))?;
    let candidates = parse_candidate_header(header, lineno)?;
    let mut ballots = Vec::new();
    for (lineno, line) in lines {
        ballots.push(parse_ballot_line(line, lineno, &candidates)?);
    }
    Election::new(candidates, ballots)
}

/// Serialize an election in canonical form.
pub fn serialize_election(e: &Election) -> String {
    let mut out = String::new();
    out.push_str("candidates: ");
    out.push_str(
        &e.candidates()
            .iter()
            .map(|c| c.to_string())
            .collect::<Vec<_>>()
            .join(", "),
    );
    out.push('\n');
    for (ballot, mult) in e.ballots() {
        out.push_str(&format!("{mult}: {ballot}\n"));
    }
    out
}

/// Parse a WMG file.
pub fn parse_wmg(text: &str) -> Result<WeightedMajorityGraph> {
    let mut lines = content_lines(text);
    let (lineno, header) = lines.next().ok_or_else(|| parse_err(1, "empty WMG file"))?;
    let candidates = parse_candidate_header(header, lineno)?;
    let mut margins = Vec::new();
    for (lineno, line) in lines {
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() != 3 {
            return Err(parse_err(lineno, "expected `<winner> <loser> <margin>`"));
        }
        let c = CandidateId::new(toks[0]).map_err(|e| parse_err(lineno, e.to_string()))?;
        let d = CandidateId::new(toks[1]).map_err(|e| parse_err(lineno, e.to_string()))?;
        let v: i64 = toks[2]
            .parse()
            .map_err(|_| parse_err(lineno, format!("malformed margin {:?}", toks[2])))?;
        margins.push((c, d, v));
    }
    WeightedMajorityGraph::from_margins(candidates, &margins)
}

/// Serialize a WMG in canonical form (positive edges only).
pub fn serialize_wmg(g: &WeightedMajorityGraph) -> String {
    let mut out = String::new();
    out.push_str("candidates: ");
    out.push_str(
        &g.candidates()
            .iter()
            .map(|c| c.to_string())
            .collect::<Vec<_>>()
            .join(", "),
    );
    out.push('\n');
    for (c, d, v) in g.positive_edges() {
        out.push_str(&format!("{c} {d} {v}\n"));
    }
    out
}

/// Heuristic for files accepted by both loaders: ballots contain `>` or a
/// count prefix, WMG edge lines are `tok tok int`.
pub fn looks_like_wmg(text: &str) -> bool {
    for (i, (_, line)) in content_lines(text).enumerate() {
        if i == 0 {
            continue;
        }
        return !line.contains('>') && !line.contains(':');
    }
    // header only: a 0-ballot election and an edgeless WMG coincide
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profile::cand;

    const EXAMPLE2: &str = "candidates: a, b, c, d\n4: a > c > b > d\n2: d > a > c > b\n3: d > c > a > b\n2: b > d > a > c\n";

    #[test]
    fn canonical_election_round_trips() {
        let e = parse_election(EXAMPLE2).unwrap();
        assert_eq!(e.total_votes(), 11);
        assert_eq!(serialize_election(&e), EXAMPLE2);
    }

    #[test]
    fn empty_ballot_section_is_a_zero_ballot_election() {
        let e = parse_election("candidates: a, b\n").unwrap();
        assert_eq!(e.total_votes(), 0);
        assert_eq!(e.candidates().len(), 2);
    }

    #[test]
    fn ballot_omitting_a_candidate_names_it() {
        let err = parse_election("candidates: a, b, c\n1: a > b\n").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains('c'), "error should name the candidate: {msg}");
    }

    #[test]
    fn duplicate_candidate_in_ballot_rejected() {
        assert!(parse_election("candidates: a, b\n1: a > a\n").is_err());
    }

    #[test]
    fn malformed_count_rejected() {
        assert!(parse_election("candidates: a, b\nx: a > b\n").is_err());
    }

    #[test]
    fn unknown_token_rejected() {
        assert!(parse_election("candidates: a, b\n1: a > z\n").is_err());
    }

    #[test]
    fn wmg_round_trips_canonically() {
        let text = "candidates: a, b, d, p\na d 4\nb p 6\nd b 6\nd p 2\np a 4\n";
        let g = parse_wmg(text).unwrap();
        assert_eq!(serialize_wmg(&g), text);
        assert_eq!(g.margin(&cand("p"), &cand("a")).unwrap(), 4);
        assert_eq!(g.margin(&cand("a"), &cand("p")).unwrap(), -4);
        assert_eq!(g.margin(&cand("a"), &cand("b")).unwrap(), 0);
    }

    #[test]
    fn detects_wmg_vs_election() {
        assert!(looks_like_wmg("candidates: a, b\na b 3\n"));
        assert!(!looks_like_wmg(EXAMPLE2));
    }

    #[test]
    fn comments_and_blank_lines_ignored_on_parse() {
        let e = parse_election("# header\ncandidates: a, b\n\n1: a > b\n").unwrap();
        assert_eq!(e.total_votes(), 1);
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn election_serialization_is_a_fixpoint(
                m in 1usize..=5,
                seeds in proptest::collection::vec((proptest::num::u64::ANY, 1u64..4), 0..6),
            ) {
                use rand::seq::SliceRandom;
                use rand::SeedableRng;
                let cands: Vec<CandidateId> =
                    (0..m).map(|i| cand(&format!("c{i}"))).collect();
                let ballots = seeds
                    .into_iter()
                    .map(|(seed, mult)| {
                        let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
                        let mut r = cands.clone();
                        r.shuffle(&mut rng);
                        (crate::profile::Ballot::new(r).unwrap(), mult)
                    })
                    .collect();
                let e = Election::new(cands, ballots).unwrap();
                let text = serialize_election(&e);
                let parsed = parse_election(&text).unwrap();
                prop_assert_eq!(&parsed, &e);
                prop_assert_eq!(serialize_election(&parsed), text);
            }

            #[test]
            fn wmg_serialization_is_a_fixpoint(
                m in 2usize..=5,
                vals in proptest::collection::vec(-9i64..=9, 10),
            ) {
                let cands: Vec<CandidateId> =
                    (0..m).map(|i| cand(&format!("c{i}"))).collect();
                let mut margins = Vec::new();
                let mut k = 0;
                for i in 0..m {
                    for j in (i + 1)..m {
                        margins.push((cands[i].clone(), cands[j].clone(), vals[k]));
                        k += 1;
                    }
                }
                let g = crate::profile::WeightedMajorityGraph::from_margins(cands, &margins)
                    .unwrap();
                let text = serialize_wmg(&g);
                let parsed = parse_wmg(&text).unwrap();
                prop_assert_eq!(&parsed, &g);
                prop_assert_eq!(serialize_wmg(&parsed), text);
            }
        }
    }
}
