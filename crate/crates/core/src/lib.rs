//! Exact equilibrium engine for one-dimensional spatial electoral
//! competition under best-worst voting rules.
//!
//! A rule `(c, m)` gives each of a continuum of voters on `[0, 1]` one
//! positive vote (worth `1`, for the nearest candidate) and one negative
//! vote (worth `-c`, against the farthest). Candidates pick platforms to
//! maximise their expected net score. This crate computes those scores in
//! exact rational arithmetic, maximises single-candidate deviations in
//! closed form, certifies Nash equilibria by two independent routes, and
//! constructs every known equilibrium family for the rule class.
//!
//! * [`model`] — rules, profiles, canonical grouping, electorate intervals.
//! * [`scoring`] — exact scores, deviation payoffs, one-sided limits, and
//!   the deviation supremum by breakpoint enumeration.
//! * [`equilibrium`] — certification and cross-validation of verdicts.
//! * [`construct`] — closed-form equilibrium constructors.
//! * [`mc`] — sampled-voter and exact-grid oracles for validation.

pub mod construct;
pub mod equilibrium;
pub mod mc;
pub mod model;
pub mod scoring;

pub use construct::{
    cne_interval, ncne_family, ncne_m4, ncne_m5, ncne_max_dispersed, ncne_min_dispersed,
    Constructed, NcneConfig,
};
pub use equilibrium::{
    classify, cne_check, is_nash, ncne_conditions, CandidateReport, CneReport, ConditionReport,
    EquilibriumCertificate, Verdict, Violation,
};
pub use mc::{grid_best_deviation, sample_scores, sample_scores_sharded, McEstimate};
pub use model::{
    parse_rat, rat, rint, CanonicalProfile, ElectorateMap, Error, Instance, Interval, Profile,
    Rat, Rule,
};
pub use scoring::{
    best_deviation, deviation_limit, deviation_payoff, score_all, DeviationAnalysis, ScoreReport,
    Side, Witness,
};
