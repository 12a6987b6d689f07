//! Domain types shared by the whole engine: voting rules, strategy profiles,
//! canonical (grouped) profiles, and the electorate intervals they induce.
//!
//! Everything is exact. Positions and vote weights are arbitrary-precision
//! rationals, and positions are grouped by exact equality; certification
//! elsewhere in the crate depends on these comparisons never involving an
//! epsilon.

use std::fmt;
use std::str::FromStr;

use num::{BigInt, BigRational, One, Signed, Zero};
use rand::Rng;
use serde::de::Error as DeError;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Exact rational scalar used throughout the engine.
pub type Rat = BigRational;

/// Builds a rational from an integer numerator/denominator pair.
pub fn rat(num: i64, den: i64) -> Rat {
    Rat::new(BigInt::from(num), BigInt::from(den))
}

/// Builds a rational from an integer.
pub fn rint(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Parses `"p/q"` or a bare integer `"p"` into an exact rational.
pub fn parse_rat(s: &str) -> Result<Rat, Error> {
    let s = s.trim();
    let bad = || Error::ParseRational(s.to_string());
    match s.split_once('/') {
        Some((num, den)) => {
            let num = BigInt::from_str(num.trim()).map_err(|_| bad())?;
            let den = BigInt::from_str(den.trim()).map_err(|_| bad())?;
            if den.is_zero() {
                return Err(bad());
            }
            Ok(Rat::new(num, den))
        }
        None => {
            let num = BigInt::from_str(s).map_err(|_| bad())?;
            Ok(Rat::from_integer(num))
        }
    }
}

/// Error type for every fallible operation in the crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("negative vote weight c = {0} (must be >= 0)")]
    NegativeWeight(String),
    #[error("need at least two candidates, got m = {0}")]
    TooFewCandidates(usize),
    #[error("coordinate {0} outside the issue space [0, 1]")]
    OutOfRange(String),
    #[error("profile has {got} positions but the rule expects m = {expected}")]
    CandidateCountMismatch { expected: usize, got: usize },
    #[error("candidate index {0} out of range")]
    InvalidCandidate(usize),
    #[error("invalid deviation target")]
    InvalidTarget,
    #[error("profile is not fully convergent (q = {0})")]
    NotConvergent(usize),
    #[error("profile is fully convergent; expected at least two occupied positions")]
    NotDivergent,
    #[error("rule regime does not admit this construction (c = {0})")]
    WrongRegime(String),
    #[error("infeasible configuration: {0}")]
    InfeasibleConfig(String),
    #[error("epsilon out of range: feasible maximum is {max}")]
    EpsilonOutOfRange { max: String },
    #[error("internal inconsistency between certification routes: {0}")]
    InternalInconsistency(String),
    #[error("cannot parse rational from {0:?}")]
    ParseRational(String),
}

/// A best-worst voting rule: a first-place ranking is worth a normalised
/// `1`, a last-place ranking `-c`, anything in between `0`. `m` is the
/// number of competing candidates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rule {
    c: Rat,
    m: usize,
}

impl Rule {
    /// Validates and builds a rule. `c` must be nonnegative and `m >= 2`.
    pub fn new(c: Rat, m: usize) -> Result<Self, Error> {
        if c.is_negative() {
            return Err(Error::NegativeWeight(c.to_string()));
        }
        if m < 2 {
            return Err(Error::TooFewCandidates(m));
        }
        Ok(Rule { c, m })
    }

    /// Weight of a negative (last-place) vote.
    pub fn c(&self) -> &Rat {
        &self.c
    }

    /// Number of candidates.
    pub fn m(&self) -> usize {
        self.m
    }
}

/// A strategy profile: one platform in `[0, 1]` per candidate, in candidate
/// order. Candidate identity is the index into this list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Profile {
    positions: Vec<Rat>,
}

impl Profile {
    /// Builds a profile, rejecting any coordinate outside `[0, 1]`.
    pub fn new(positions: Vec<Rat>) -> Result<Self, Error> {
        for p in &positions {
            if p.is_negative() || *p > Rat::one() {
                return Err(Error::OutOfRange(p.to_string()));
            }
        }
        Ok(Profile { positions })
    }

    pub fn positions(&self) -> &[Rat] {
        &self.positions
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    /// The profile with candidate `i` relocated to `t`, everyone else fixed.
    pub fn replace(&self, i: usize, t: Rat) -> Result<Self, Error> {
        if i >= self.positions.len() {
            return Err(Error::InvalidCandidate(i));
        }
        if t.is_negative() || t > Rat::one() {
            return Err(Error::OutOfRange(t.to_string()));
        }
        let mut positions = self.positions.clone();
        positions[i] = t;
        Ok(Profile { positions })
    }

    /// The profile with candidate `i` removed (used for deviation analysis).
    pub fn without(&self, i: usize) -> Result<Self, Error> {
        if i >= self.positions.len() {
            return Err(Error::InvalidCandidate(i));
        }
        let positions = self
            .positions
            .iter()
            .enumerate()
            .filter(|(k, _)| *k != i)
            .map(|(_, p)| p.clone())
            .collect();
        Ok(Profile { positions })
    }

    /// Mirror image of the profile: every platform `x` maps to `1 - x`.
    pub fn reflected(&self) -> Self {
        let positions = self
            .positions
            .iter()
            .map(|p| Rat::one() - p)
            .collect();
        Profile { positions }
    }

    /// Groups equal platforms into the canonical occupied-position form.
    pub fn canonicalize(&self) -> CanonicalProfile {
        let mut indexed: Vec<(usize, &Rat)> = self.positions.iter().enumerate().collect();
        indexed.sort_by(|a, b| a.1.cmp(b.1));
        let mut occupied: Vec<Rat> = Vec::new();
        let mut owners: Vec<Vec<usize>> = Vec::new();
        for (idx, pos) in indexed {
            match occupied.last() {
                Some(last) if last == pos => owners.last_mut().unwrap().push(idx),
                _ => {
                    occupied.push(pos.clone());
                    owners.push(vec![idx]);
                }
            }
        }
        for group in &mut owners {
            group.sort_unstable();
        }
        let counts = owners.iter().map(Vec::len).collect();
        CanonicalProfile {
            occupied,
            counts,
            owners,
        }
    }

    /// Draws a random profile with `q` distinct occupied positions and a
    /// random assignment of the `m` candidates to them. Positions are
    /// rationals with denominator at most `max_den`.
    pub fn random(rng: &mut impl Rng, m: usize, q: usize, max_den: u64) -> Self {
        Self::random_in(rng, m, q, max_den, false)
    }

    /// Like [`Profile::random`] but keeps every position strictly inside
    /// `(0, 1)`, so one-sided limits exist on both sides of each platform.
    pub fn random_interior(rng: &mut impl Rng, m: usize, q: usize, max_den: u64) -> Self {
        Self::random_in(rng, m, q, max_den, true)
    }

    fn random_in(rng: &mut impl Rng, m: usize, q: usize, max_den: u64, interior: bool) -> Self {
        assert!(m >= 2, "need at least two candidates");
        assert!((1..=m).contains(&q), "q must be in 1..=m");
        assert!(max_den >= if interior { 2 } else { 1 });
        let mut occupied: Vec<Rat> = Vec::with_capacity(q);
        while occupied.len() < q {
            let den = rng.gen_range(if interior { 2 } else { 1 }..=max_den) as i64;
            let num = if interior {
                rng.gen_range(1..den)
            } else {
                rng.gen_range(0..=den)
            };
            let x = rat(num, den);
            if !occupied.contains(&x) {
                occupied.push(x);
            }
        }
        occupied.sort();
        // Random composition of m into q positive parts.
        let mut counts = vec![1usize; q];
        for _ in 0..m - q {
            counts[rng.gen_range(0..q)] += 1;
        }
        let mut positions: Vec<Rat> = Vec::with_capacity(m);
        for (x, n) in occupied.iter().zip(&counts) {
            for _ in 0..*n {
                positions.push(x.clone());
            }
        }
        // Shuffle so candidate identity is independent of location.
        for k in (1..positions.len()).rev() {
            positions.swap(k, rng.gen_range(0..=k));
        }
        Profile { positions }
    }
}

/// A profile in occupied-position form: strictly increasing distinct
/// platforms, how many candidates sit at each, and which ones.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CanonicalProfile {
    occupied: Vec<Rat>,
    counts: Vec<usize>,
    owners: Vec<Vec<usize>>,
}

impl CanonicalProfile {
    /// Number of distinct occupied positions.
    pub fn q(&self) -> usize {
        self.occupied.len()
    }

    /// Total number of candidates.
    pub fn m(&self) -> usize {
        self.counts.iter().sum()
    }

    pub fn occupied(&self) -> &[Rat] {
        &self.occupied
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    /// Candidate indices located at occupied position `i`.
    pub fn owners(&self, i: usize) -> &[usize] {
        &self.owners[i]
    }

    /// Leftmost occupied position.
    pub fn x1(&self) -> &Rat {
        self.occupied.first().expect("canonical profile is nonempty")
    }

    /// Rightmost occupied position.
    pub fn xq(&self) -> &Rat {
        self.occupied.last().expect("canonical profile is nonempty")
    }

    /// Occupied-position index of candidate `i`.
    pub fn position_of(&self, i: usize) -> Option<usize> {
        self.owners.iter().position(|group| group.contains(&i))
    }

    /// Expands back to a per-candidate profile (inverse of canonicalize).
    pub fn expand(&self) -> Profile {
        let mut positions = vec![Rat::zero(); self.m()];
        for (x, group) in self.occupied.iter().zip(&self.owners) {
            for &i in group {
                positions[i] = x.clone();
            }
        }
        Profile { positions }
    }

    /// The voter intervals induced by the occupied positions.
    pub fn electorates(&self) -> ElectorateMap {
        let q = self.q();
        assert!(q >= 1);
        let one = Rat::one();
        let half = rat(1, 2);
        // Boundaries: 0, midpoints between consecutive positions, 1.
        let mut bounds = Vec::with_capacity(q + 1);
        bounds.push(Rat::zero());
        for w in self.occupied.windows(2) {
            bounds.push((&w[0] + &w[1]) * &half);
        }
        bounds.push(one.clone());
        let mut full = Vec::with_capacity(q);
        let mut left_half = Vec::with_capacity(q);
        let mut right_half = Vec::with_capacity(q);
        for (i, x) in self.occupied.iter().enumerate() {
            full.push(Interval::new(bounds[i].clone(), bounds[i + 1].clone()));
            left_half.push(Interval::new(bounds[i].clone(), x.clone()));
            right_half.push(Interval::new(x.clone(), bounds[i + 1].clone()));
        }
        let (neg_left, neg_right) = if q >= 2 {
            let mid = (self.x1() + self.xq()) * &half;
            (
                Some(Interval::new(mid.clone(), one)),
                Some(Interval::new(Rat::zero(), mid)),
            )
        } else {
            // A fully convergent profile has no farthest position: nobody
            // is ranked strictly last by location alone.
            (None, None)
        };
        ElectorateMap {
            full,
            left_half,
            right_half,
            neg_left,
            neg_right,
        }
    }
}

/// A closed subinterval of the issue space `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Interval {
    lo: Rat,
    hi: Rat,
}

impl Interval {
    pub fn new(lo: Rat, hi: Rat) -> Self {
        debug_assert!(lo <= hi, "interval endpoints out of order");
        Interval { lo, hi }
    }

    pub fn lo(&self) -> &Rat {
        &self.lo
    }

    pub fn hi(&self) -> &Rat {
        &self.hi
    }

    /// Length of the interval.
    pub fn len(&self) -> Rat {
        &self.hi - &self.lo
    }

    pub fn is_empty(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains(&self, x: &Rat) -> bool {
        *x >= self.lo && *x <= self.hi
    }

    /// The mirror image under `x -> 1 - x`.
    pub fn reflected(&self) -> Self {
        Interval {
            lo: Rat::one() - &self.hi,
            hi: Rat::one() - &self.lo,
        }
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

/// Voter intervals induced by a canonical profile: the full electorate of
/// each occupied position, its split into left/right halves at the
/// position itself, and the two blocks of voters whose negative vote goes
/// to an extreme position. The negative intervals are `None` when the
/// profile is fully convergent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ElectorateMap {
    full: Vec<Interval>,
    left_half: Vec<Interval>,
    right_half: Vec<Interval>,
    neg_left: Option<Interval>,
    neg_right: Option<Interval>,
}

impl ElectorateMap {
    pub fn q(&self) -> usize {
        self.full.len()
    }

    /// Full electorate of occupied position `i`: voters whose nearest
    /// occupied position is that one.
    pub fn full(&self, i: usize) -> &Interval {
        &self.full[i]
    }

    /// Voters of `full(i)` to the left of the position.
    pub fn left_half(&self, i: usize) -> &Interval {
        &self.left_half[i]
    }

    /// Voters of `full(i)` to the right of the position.
    pub fn right_half(&self, i: usize) -> &Interval {
        &self.right_half[i]
    }

    /// Voters who rank the leftmost position's candidates last.
    pub fn neg_left(&self) -> Option<&Interval> {
        self.neg_left.as_ref()
    }

    /// Voters who rank the rightmost position's candidates last.
    pub fn neg_right(&self) -> Option<&Interval> {
        self.neg_right.as_ref()
    }
}

/// A rule/profile pair as it crosses the serialization boundary.
///
/// Wire schema: `{"c": "num/den", "m": int, "positions": ["num/den", ...]}`,
/// with rationals as strings so exactness survives the round trip. Unknown
/// fields are ignored, so enriched documents (e.g. construction output)
/// re-parse as instances.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    pub rule: Rule,
    pub profile: Profile,
}

impl Instance {
    pub fn new(rule: Rule, profile: Profile) -> Result<Self, Error> {
        if profile.len() != rule.m() {
            return Err(Error::CandidateCountMismatch {
                expected: rule.m(),
                got: profile.len(),
            });
        }
        Ok(Instance { rule, profile })
    }
}

#[derive(Serialize, Deserialize)]
struct RawInstance {
    c: String,
    m: usize,
    positions: Vec<String>,
}

impl Serialize for Instance {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let raw = RawInstance {
            c: self.rule.c().to_string(),
            m: self.rule.m(),
            positions: self
                .profile
                .positions()
                .iter()
                .map(|p| p.to_string())
                .collect(),
        };
        raw.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Instance {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = RawInstance::deserialize(deserializer)?;
        let c = parse_rat(&raw.c).map_err(DeError::custom)?;
        let rule = Rule::new(c, raw.m).map_err(DeError::custom)?;
        let mut positions = Vec::with_capacity(raw.positions.len());
        for s in &raw.positions {
            positions.push(parse_rat(s).map_err(DeError::custom)?);
        }
        let profile = Profile::new(positions).map_err(DeError::custom)?;
        Instance::new(rule, profile).map_err(DeError::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn profile(xs: &[(i64, i64)]) -> Profile {
        Profile::new(xs.iter().map(|&(n, d)| rat(n, d)).collect()).unwrap()
    }

    #[test]
    fn rule_validation() {
        let r = Rule::new(rat(1, 2), 4).unwrap();
        assert_eq!(*r.c(), rat(1, 2));
        assert_eq!(r.m(), 4);
        assert!(matches!(
            Rule::new(rint(-1), 4),
            Err(Error::NegativeWeight(_))
        ));
        assert!(matches!(
            Rule::new(Rat::zero(), 1),
            Err(Error::TooFewCandidates(1))
        ));
        // Two candidates under any weight reduce to plurality; still a rule.
        let r = Rule::new(Rat::zero(), 2).unwrap();
        assert_eq!(r.m(), 2);
    }

    #[test]
    fn canonicalize_groups_equal_positions() {
        let cp = profile(&[(1, 4), (3, 4), (1, 4), (3, 4)]).canonicalize();
        assert_eq!(cp.occupied(), &[rat(1, 4), rat(3, 4)]);
        assert_eq!(cp.counts(), &[2, 2]);
        assert_eq!(cp.owners(0), &[0, 2]);
        assert_eq!(cp.owners(1), &[1, 3]);

        let cp = profile(&[(1, 2), (1, 2), (1, 2)]).canonicalize();
        assert_eq!(cp.occupied(), &[rat(1, 2)]);
        assert_eq!(cp.counts(), &[3]);

        let cp = profile(&[(1, 6), (1, 6), (1, 2), (5, 6), (5, 6)]).canonicalize();
        assert_eq!(cp.occupied(), &[rat(1, 6), rat(1, 2), rat(5, 6)]);
        assert_eq!(cp.counts(), &[2, 1, 2]);
    }

    #[test]
    fn profile_rejects_out_of_range() {
        assert!(matches!(
            Profile::new(vec![rat(5, 4)]),
            Err(Error::OutOfRange(_))
        ));
        assert!(matches!(
            Profile::new(vec![rat(-1, 4)]),
            Err(Error::OutOfRange(_))
        ));
    }

    #[test]
    fn electorate_boundaries_are_midpoints() {
        let em = profile(&[(3, 8), (3, 8), (5, 8), (5, 8)])
            .canonicalize()
            .electorates();
        assert_eq!(*em.full(0), Interval::new(rint(0), rat(1, 2)));
        assert_eq!(*em.full(1), Interval::new(rat(1, 2), rint(1)));
        assert_eq!(*em.neg_left().unwrap(), Interval::new(rat(1, 2), rint(1)));
        assert_eq!(*em.neg_right().unwrap(), Interval::new(rint(0), rat(1, 2)));
    }

    #[test]
    fn single_position_spans_everything() {
        let em = profile(&[(1, 2), (1, 2), (1, 2)]).canonicalize().electorates();
        assert_eq!(*em.full(0), Interval::new(rint(0), rint(1)));
        assert!(em.neg_left().is_none());
        assert!(em.neg_right().is_none());
    }

    #[test]
    fn interior_halves_split_at_position() {
        let em = profile(&[(1, 6), (1, 6), (1, 2), (5, 6), (5, 6)])
            .canonicalize()
            .electorates();
        assert_eq!(*em.left_half(1), Interval::new(rat(1, 3), rat(1, 2)));
        assert_eq!(*em.right_half(1), Interval::new(rat(1, 2), rat(2, 3)));
    }

    #[test]
    fn instance_round_trips_through_json() {
        let inst = Instance::new(
            Rule::new(rat(1, 2), 4).unwrap(),
            profile(&[(3, 8), (3, 8), (5, 8), (5, 8)]),
        )
        .unwrap();
        let json = serde_json::to_string(&inst).unwrap();
        let back: Instance = serde_json::from_str(&json).unwrap();
        assert_eq!(inst, back);

        let parsed: Instance = serde_json::from_str(
            r#"{"c":"2/1","m":3,"positions":["1/2","1/2","1/2"],"note":"extra fields ignored"}"#,
        )
        .unwrap();
        assert_eq!(*parsed.rule.c(), rint(2));
    }

    #[test]
    fn parse_rat_accepts_both_forms() {
        assert_eq!(parse_rat("3/4").unwrap(), rat(3, 4));
        assert_eq!(parse_rat("2").unwrap(), rint(2));
        assert_eq!(parse_rat("-1/3").unwrap(), rat(-1, 3));
        assert!(parse_rat("1/0").is_err());
        assert!(parse_rat("x").is_err());
    }

    fn arb_profile() -> impl Strategy<Value = Profile> {
        (2usize..=8, any::<u64>()).prop_map(|(m, seed)| {
            use rand::{Rng as _, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let q = rng.gen_range(1..=m.min(5));
            Profile::random(&mut rng, m, q, 60)
        })
    }

    proptest! {
        #[test]
        fn full_electorates_partition_the_issue_space(p in arb_profile()) {
            let em = p.canonicalize().electorates();
            let total: Rat = (0..em.q()).map(|i| em.full(i).len()).sum();
            prop_assert_eq!(total, Rat::one());
        }

        #[test]
        fn adjacent_half_electorates_match(p in arb_profile()) {
            let em = p.canonicalize().electorates();
            for i in 0..em.q().saturating_sub(1) {
                prop_assert_eq!(em.right_half(i).len(), em.left_half(i + 1).len());
            }
        }

        #[test]
        fn reflection_mirrors_the_electorates(p in arb_profile()) {
            let em = p.canonicalize().electorates();
            let rem = p.reflected().canonicalize().electorates();
            let q = em.q();
            prop_assert_eq!(rem.q(), q);
            for i in 0..q {
                prop_assert_eq!(rem.full(i), &em.full(q - 1 - i).reflected());
                prop_assert_eq!(rem.left_half(i), &em.right_half(q - 1 - i).reflected());
                prop_assert_eq!(rem.right_half(i), &em.left_half(q - 1 - i).reflected());
            }
            match (rem.neg_left(), em.neg_right()) {
                (Some(a), Some(b)) => prop_assert_eq!(a, &b.reflected()),
                (None, None) => {}
                _ => prop_assert!(false, "negative intervals disagree"),
            }
        }

        #[test]
        fn canonicalize_is_idempotent(p in arb_profile()) {
            let cp = p.canonicalize();
            prop_assert_eq!(cp.expand().canonicalize(), cp.clone());
            let n: usize = cp.counts().iter().sum();
            prop_assert_eq!(n, p.len());
        }
    }
}
