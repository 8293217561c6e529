//! Candidates, ballots, elections, pairwise statistics and weighted majority
//! graphs.
//!
//! A ballot is a strict linear order over the full candidate set. The weighted
//! majority graph (WMG) stores, for every ordered pair `(c, d)`, the margin
//! `margin(c, d) = support(c, d) - support(d, c)`, an antisymmetric integer.
//! Zero-margin pairs are stored explicitly; the margin function is total on
//! ordered pairs of distinct candidates.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};

/// A candidate name: a nonempty token without whitespace, `>` or `,`.
///
/// Candidate identifiers are ordered bytewise; systematically generated names
/// are zero-padded so this order matches their intended reading order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CandidateId(String);

impl CandidateId {
    pub fn new(name: impl Into<String>) -> Result<Self> {
        let name = name.into();
        if name.is_empty()
            || name
                .chars()
                .any(|ch| ch.is_whitespace() || ch == '>' || ch == ',')
        {
            return Err(Error::InvalidCandidateName(name));
        }
        Ok(CandidateId(name))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for CandidateId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::str::FromStr for CandidateId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        CandidateId::new(s)
    }
}

/// Convenience constructor for tests and generators.
pub fn cand(name: &str) -> CandidateId {
    CandidateId::new(name).expect("valid candidate name")
}

/// A strict linear order over some candidate set, most preferred first.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Ballot(Vec<CandidateId>);

impl Ballot {
    pub fn new(ranking: Vec<CandidateId>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for c in &ranking {
            if !seen.insert(c.clone()) {
                return Err(Error::DuplicateCandidate(c.to_string()));
            }
        }
        Ok(Ballot(ranking))
    }

    pub fn ranking(&self) -> &[CandidateId] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// True iff `c` is ranked above `d`. Both must be on the ballot.
    pub fn prefers(&self, c: &CandidateId, d: &CandidateId) -> bool {
        let pc = self.0.iter().position(|x| x == c);
        let pd = self.0.iter().position(|x| x == d);
        match (pc, pd) {
            (Some(a), Some(b)) => a < b,
            _ => false,
        }
    }

    /// Restriction of the ballot to `keep`, preserving relative order.
    pub fn project(&self, keep: &BTreeSet<CandidateId>) -> Ballot {
        Ballot(
            self.0
                .iter()
                .filter(|c| keep.contains(c))
                .cloned()
                .collect(),
        )
    }
}

impl fmt::Display for Ballot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for c in &self.0 {
            if !first {
                f.write_str(" > ")?;
            }
            first = false;
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

/// An election: a candidate set and a multiset of ballots.
///
/// Ballots are stored as `(ballot, multiplicity)` pairs; identical ballots may
/// appear in several entries. Every ballot must rank exactly the candidate
/// set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Election {
    candidates: Vec<CandidateId>,
    ballots: Vec<(Ballot, u64)>,
}

impl Election {
    pub fn new(
        candidates: impl IntoIterator<Item = CandidateId>,
        ballots: Vec<(Ballot, u64)>,
    ) -> Result<Self> {
        let mut cands: Vec<CandidateId> = candidates.into_iter().collect();
        cands.sort();
        for w in cands.windows(2) {
            if w[0] == w[1] {
                return Err(Error::DuplicateCandidate(w[0].to_string()));
            }
        }
        if cands.is_empty() {
            return Err(Error::NoCandidates);
        }
        let set: BTreeSet<&CandidateId> = cands.iter().collect();
        for (b, mult) in &ballots {
            if *mult == 0 {
                return Err(Error::MalformedBallot("zero multiplicity".into()));
            }
            if b.len() != cands.len() || !b.ranking().iter().all(|c| set.contains(c)) {
                return Err(Error::MalformedBallot(format!(
                    "ballot [{b}] does not rank exactly the candidate set"
                )));
            }
        }
        Ok(Election {
            candidates: cands,
            ballots,
        })
    }

    /// Candidates in sorted order.
    pub fn candidates(&self) -> &[CandidateId] {
        &self.candidates
    }

    pub fn ballots(&self) -> &[(Ballot, u64)] {
        &self.ballots
    }

    /// Total number of votes, counting multiplicities.
    pub fn total_votes(&self) -> u64 {
        self.ballots.iter().map(|(_, m)| *m).sum()
    }

    fn index_of(&self, c: &CandidateId) -> Result<usize> {
        self.candidates
            .binary_search(c)
            .map_err(|_| Error::UnknownCandidate(c.to_string()))
    }

    /// N(c, d): the number of votes ranking `c` above `d`.
    pub fn pairwise_support(&self, c: &CandidateId, d: &CandidateId) -> Result<u64> {
        self.index_of(c)?;
        self.index_of(d)?;
        if c == d {
            return Err(Error::IdenticalPair(c.to_string()));
        }
        Ok(self
            .ballots
            .iter()
            .filter(|(b, _)| b.prefers(c, d))
            .map(|(_, m)| *m)
            .sum())
    }

    /// D(c, d) = N(c, d) - N(d, c).
    pub fn pairwise_margin(&self, c: &CandidateId, d: &CandidateId) -> Result<i64> {
        Ok(self.pairwise_support(c, d)? as i64 - self.pairwise_support(d, c)? as i64)
    }

    /// Build the weighted majority graph of this election.
    pub fn wmg(&self) -> WeightedMajorityGraph {
        let m = self.candidates.len();
        let mut margin = vec![0i64; m * m];
        for (b, mult) in &self.ballots {
            let mult = *mult as i64;
            // positions by candidate index
            let mut pos = vec![0usize; m];
            for (k, c) in b.ranking().iter().enumerate() {
                let i = self.candidates.binary_search(c).expect("validated ballot");
                pos[i] = k;
            }
            for i in 0..m {
                for j in (i + 1)..m {
                    if pos[i] < pos[j] {
                        margin[i * m + j] += mult;
                        margin[j * m + i] -= mult;
                    } else {
                        margin[j * m + i] += mult;
                        margin[i * m + j] -= mult;
                    }
                }
            }
        }
        WeightedMajorityGraph {
            candidates: self.candidates.clone(),
            margin,
            ballot_parity: Some((self.total_votes() % 2) as u8),
        }
    }

    /// Extend every ballot by `newcomers`, in the given order, at the bottom.
    ///
    /// Existing pairwise margins are unchanged; each newcomer loses every
    /// pairwise contest by the total number of votes.
    pub fn pad_bottom(&self, newcomers: &[CandidateId]) -> Result<Election> {
        for c in newcomers {
            if self.candidates.binary_search(c).is_ok() {
                return Err(Error::NameCollision(c.to_string()));
            }
        }
        let mut seen = BTreeSet::new();
        for c in newcomers {
            if !seen.insert(c.clone()) {
                return Err(Error::DuplicateCandidate(c.to_string()));
            }
        }
        let cands: Vec<CandidateId> = self
            .candidates
            .iter()
            .chain(newcomers.iter())
            .cloned()
            .collect();
        let ballots = self
            .ballots
            .iter()
            .map(|(b, m)| {
                let mut r = b.ranking().to_vec();
                r.extend(newcomers.iter().cloned());
                (Ballot(r), *m)
            })
            .collect();
        Election::new(cands, ballots)
    }

    /// Restrict the election to `keep`, projecting every ballot.
    pub fn restrict_to(&self, keep: &BTreeSet<CandidateId>) -> Result<Election> {
        for c in keep {
            self.index_of(c)?;
        }
        let ballots = self
            .ballots
            .iter()
            .map(|(b, m)| (b.project(keep), *m))
            .collect();
        Election::new(keep.iter().cloned(), ballots)
    }
}

/// The two votes `c d ->rest` and `<-rest c d` over `candidates`.
///
/// Appended together they add exactly +2 to the margin of `(c, d)` and leave
/// every other ordered pair unchanged.
pub fn w_pair(
    candidates: &BTreeSet<CandidateId>,
    c: &CandidateId,
    d: &CandidateId,
) -> Result<(Ballot, Ballot)> {
    if c == d {
        return Err(Error::IdenticalPair(c.to_string()));
    }
    if !candidates.contains(c) {
        return Err(Error::UnknownCandidate(c.to_string()));
    }
    if !candidates.contains(d) {
        return Err(Error::UnknownCandidate(d.to_string()));
    }
    let rest: Vec<CandidateId> = candidates
        .iter()
        .filter(|x| *x != c && *x != d)
        .cloned()
        .collect();
    let mut fwd = vec![c.clone(), d.clone()];
    fwd.extend(rest.iter().cloned());
    let mut bwd: Vec<CandidateId> = rest.iter().rev().cloned().collect();
    bwd.push(c.clone());
    bwd.push(d.clone());
    Ok((Ballot(fwd), Ballot(bwd)))
}

/// A complete antisymmetric margin matrix over a candidate set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightedMajorityGraph {
    candidates: Vec<CandidateId>,
    margin: Vec<i64>,
    /// `n mod 2` when built from an election with `n` ballots; `None` when the
    /// margins were given directly and do not share a parity.
    ballot_parity: Option<u8>,
}

impl WeightedMajorityGraph {
    /// Build from explicit margins. `margins` lists `(c, d, value)` for pairs
    /// with a nonzero value in the `c`-over-`d` direction (either direction
    /// may be listed; antisymmetry is enforced, conflicts are an error).
    /// Unlisted pairs have margin 0.
    pub fn from_margins(
        candidates: impl IntoIterator<Item = CandidateId>,
        margins: &[(CandidateId, CandidateId, i64)],
    ) -> Result<Self> {
        let mut cands: Vec<CandidateId> = candidates.into_iter().collect();
        cands.sort();
        for w in cands.windows(2) {
            if w[0] == w[1] {
                return Err(Error::DuplicateCandidate(w[0].to_string()));
            }
        }
        if cands.is_empty() {
            return Err(Error::NoCandidates);
        }
        let m = cands.len();
        let mut margin = vec![0i64; m * m];
        let mut set = vec![false; m * m];
        let idx = |c: &CandidateId| -> Result<usize> {
            cands
                .binary_search(c)
                .map_err(|_| Error::UnknownCandidate(c.to_string()))
        };
        for (c, d, v) in margins {
            let (i, j) = (idx(c)?, idx(d)?);
            if i == j {
                return Err(Error::IdenticalPair(c.to_string()));
            }
            if set[i * m + j] && margin[i * m + j] != *v {
                return Err(Error::NotAntisymmetric {
                    c: c.to_string(),
                    d: d.to_string(),
                });
            }
            margin[i * m + j] = *v;
            margin[j * m + i] = -*v;
            set[i * m + j] = true;
            set[j * m + i] = true;
        }
        let mut g = WeightedMajorityGraph {
            candidates: cands,
            margin,
            ballot_parity: None,
        };
        g.ballot_parity = g.uniform_parity();
        Ok(g)
    }

    /// All-zero margins over `candidates`.
    pub fn zero(candidates: impl IntoIterator<Item = CandidateId>) -> Result<Self> {
        Self::from_margins(candidates, &[])
    }

    /// Build from a full row-major matrix. `candidates` must be sorted and
    /// distinct, the matrix antisymmetric with a zero diagonal.
    pub fn from_matrix(candidates: Vec<CandidateId>, margin: Vec<i64>) -> Result<Self> {
        let m = candidates.len();
        if m == 0 {
            return Err(Error::NoCandidates);
        }
        for w in candidates.windows(2) {
            if w[0] >= w[1] {
                return Err(Error::InvalidInput(
                    "candidates must be sorted and distinct".into(),
                ));
            }
        }
        if margin.len() != m * m {
            return Err(Error::InvalidInput("margin matrix has wrong size".into()));
        }
        for i in 0..m {
            for j in 0..m {
                let bad = if i == j {
                    margin[i * m + j] != 0
                } else {
                    margin[i * m + j] != -margin[j * m + i]
                };
                if bad {
                    return Err(Error::NotAntisymmetric {
                        c: candidates[i].to_string(),
                        d: candidates[j].to_string(),
                    });
                }
            }
        }
        let mut g = WeightedMajorityGraph {
            candidates,
            margin,
            ballot_parity: None,
        };
        g.ballot_parity = g.uniform_parity();
        Ok(g)
    }

    fn uniform_parity(&self) -> Option<u8> {
        let m = self.candidates.len();
        if m < 2 {
            return Some(0);
        }
        let p = (self.margin[1].rem_euclid(2)) as u8;
        for i in 0..m {
            for j in 0..m {
                if i != j && (self.margin[i * m + j].rem_euclid(2)) as u8 != p {
                    return None;
                }
            }
        }
        Some(p)
    }

    pub fn candidates(&self) -> &[CandidateId] {
        &self.candidates
    }

    pub fn len(&self) -> usize {
        self.candidates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.candidates.is_empty()
    }

    pub fn index_of(&self, c: &CandidateId) -> Result<usize> {
        self.candidates
            .binary_search(c)
            .map_err(|_| Error::UnknownCandidate(c.to_string()))
    }

    pub fn ballot_parity(&self) -> Option<u8> {
        self.ballot_parity
    }

    pub fn margin(&self, c: &CandidateId, d: &CandidateId) -> Result<i64> {
        let (i, j) = (self.index_of(c)?, self.index_of(d)?);
        if i == j {
            return Err(Error::IdenticalPair(c.to_string()));
        }
        Ok(self.margin_at(i, j))
    }

    /// Margin by candidate index. The diagonal is not meaningful.
    pub fn margin_at(&self, i: usize, j: usize) -> i64 {
        self.margin[i * self.candidates.len() + j]
    }

    /// All ordered pairs with a positive margin, sorted by (winner, loser).
    pub fn positive_edges(&self) -> Vec<(CandidateId, CandidateId, i64)> {
        let m = self.candidates.len();
        let mut out = Vec::new();
        for i in 0..m {
            for j in 0..m {
                if self.margin[i * m + j] > 0 {
                    out.push((
                        self.candidates[i].clone(),
                        self.candidates[j].clone(),
                        self.margin[i * m + j],
                    ));
                }
            }
        }
        out
    }

    /// Multiply every margin by a positive constant. Schulze winner sets and
    /// ranked-pairs agenda order only depend on the relative order of margins,
    /// so they are preserved.
    pub fn scale(&self, k: i64) -> Result<WeightedMajorityGraph> {
        if k <= 0 {
            return Err(Error::InvalidInput("scale factor must be positive".into()));
        }
        let margin = self.margin.iter().map(|v| v * k).collect();
        let mut g = WeightedMajorityGraph {
            candidates: self.candidates.clone(),
            margin,
            ballot_parity: None,
        };
        g.ballot_parity = g.uniform_parity();
        Ok(g)
    }

    /// Double every margin. Makes any WMG realizable by vote pairs.
    pub fn double(&self) -> WeightedMajorityGraph {
        self.scale(2).expect("2 is positive")
    }

    /// Submatrix over `keep` (candidate indices into this graph).
    pub fn restrict_indices(&self, keep: &[usize]) -> WeightedMajorityGraph {
        let m = self.candidates.len();
        let k = keep.len();
        let mut margin = vec![0i64; k * k];
        for (a, &i) in keep.iter().enumerate() {
            for (b, &j) in keep.iter().enumerate() {
                margin[a * k + b] = self.margin[i * m + j];
            }
        }
        WeightedMajorityGraph {
            candidates: keep.iter().map(|&i| self.candidates[i].clone()).collect(),
            margin,
            ballot_parity: self.ballot_parity,
        }
    }

    /// Submatrix over a candidate subset.
    pub fn restrict(&self, keep: &BTreeSet<CandidateId>) -> Result<WeightedMajorityGraph> {
        let mut idx = Vec::with_capacity(keep.len());
        for c in keep {
            idx.push(self.index_of(c)?);
        }
        Ok(self.restrict_indices(&idx))
    }

    /// Realize this WMG as an election by appending vote pairs on top of
    /// `base` (or on top of an empty ballot list).
    ///
    /// For every ordered pair with a positive residual `margin - base_margin`,
    /// `residual / 2` copies of the corresponding vote pair are appended. The
    /// residual must be even for every pair; the returned election's WMG
    /// equals this graph exactly.
    pub fn mcgarvey_realize(&self, base: Option<&Election>) -> Result<Election> {
        if let Some(b) = base {
            if b.candidates() != self.candidates {
                return Err(Error::InvalidInput(
                    "base election must rank exactly the target candidates".into(),
                ));
            }
        }
        let cand_set: BTreeSet<CandidateId> = self.candidates.iter().cloned().collect();
        let m = self.candidates.len();
        let base_wmg = base.map(|b| b.wmg());
        let mut ballots: Vec<(Ballot, u64)> =
            base.map(|b| b.ballots().to_vec()).unwrap_or_default();
        for i in 0..m {
            for j in 0..m {
                if i == j {
                    continue;
                }
                let residual =
                    self.margin[i * m + j] - base_wmg.as_ref().map_or(0, |g| g.margin_at(i, j));
                if residual.rem_euclid(2) != 0 {
                    return Err(Error::ParityMismatch {
                        c: self.candidates[i].to_string(),
                        d: self.candidates[j].to_string(),
                        residual,
                    });
                }
                if residual > 0 {
                    let (fwd, bwd) = w_pair(&cand_set, &self.candidates[i], &self.candidates[j])?;
                    let copies = (residual / 2) as u64;
                    ballots.push((fwd, copies));
                    ballots.push((bwd, copies));
                }
            }
        }
        Election::new(self.candidates.clone(), ballots)
    }
}
