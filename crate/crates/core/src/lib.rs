//! Condorcet-consistent voting engines and electoral-control machinery.
//!
//! The crate provides:
//!
//! - elections over linear-order ballots, pairwise margins and weighted
//!   majority graphs, vote-pair realization of prescribed margins
//!   ([`profile`], [`format`]);
//! - Schulze strongest-path winner determination ([`schulze`]) and resolute
//!   ranked pairs with deterministic tie-breaking ([`ranked_pairs`]);
//! - exact brute-force decision solvers, with witnesses, for electoral
//!   control by adding / deleting / replacing candidates or voters, bribery,
//!   combined multimode attacks and their exact variants ([`control`]);
//! - a polynomial-style destructive candidate-deletion solver for Schulze and
//!   its reduction drivers into vertex-cut queries ([`dcdc`]);
//! - minimum s-t vertex cuts and path-preserving cut variants ([`cuts`]);
//! - generators that map 3-CNF formulas and restricted exact-cover instances
//!   to control instances ([`reductions`]);
//! - randomized self-check sweeps ([`verify`]).

pub mod control;
pub mod cuts;
pub mod dcdc;
pub mod error;
pub mod format;
pub mod profile;
pub mod ranked_pairs;
pub mod reductions;
pub mod schulze;
pub mod verify;

pub use error::{Error, Result};
pub use profile::{Ballot, CandidateId, Election, WeightedMajorityGraph};
pub use ranked_pairs::TieBreakPolicy;
