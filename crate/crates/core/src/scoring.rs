//! Exact expected scores and deviation analysis.
//!
//! A candidate's score is the measure of voters ranking her first minus `c`
//! times the measure ranking her last, with co-located candidates splitting
//! both blocks evenly (the fair lottery in expectation). As a function of a
//! single candidate's platform `t`, the payoff is piecewise affine with
//! breakpoints exactly at the other candidates' occupied positions:
//! constant on interior gaps, affine with slope `±(1+c)/2` on the two
//! outer gaps, and discontinuous at each occupied position. The supremum
//! over `t` is therefore computable exactly by enumerating gap values,
//! co-location values, and the one-sided limits at the extremes.

use num::{One, Zero};

use crate::model::{rat, CanonicalProfile, ElectorateMap, Error, Profile, Rat, Rule};

/// Exact expected scores for every candidate, split into the first-place
/// and last-place vote shares they are built from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScoreReport {
    /// `v_i = positive_part[i] - c * negative_part[i]`.
    pub per_candidate: Vec<Rat>,
    /// Share of the first-place vote mass, per candidate. Sums to 1.
    pub positive_part: Vec<Rat>,
    /// Share of the last-place vote mass (before weighting). Sums to 1.
    pub negative_part: Vec<Rat>,
}

/// Where a deviation supremum is realised.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Witness {
    /// An actual relocation target attaining the value.
    Point(Rat),
    /// Approached from the left of an occupied position, never attained.
    LeftLimitAt(Rat),
    /// Approached from the right of an occupied position, never attained.
    RightLimitAt(Rat),
}

/// Result of maximising one candidate's deviation payoff over `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeviationAnalysis {
    pub candidate: usize,
    /// Supremum of the payoff, taken in closure (one-sided limits count).
    pub sup_value: Rat,
    pub witness: Witness,
    /// False iff the supremum occurs only as a one-sided limit.
    pub attained: bool,
}

/// Approach side for a one-sided deviation limit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// Exact expected score of every candidate under the given rule.
pub fn score_all(rule: &Rule, profile: &Profile) -> Result<ScoreReport, Error> {
    if profile.len() != rule.m() {
        return Err(Error::CandidateCountMismatch {
            expected: rule.m(),
            got: profile.len(),
        });
    }
    let m = rule.m();
    let c = rule.c();
    let cp = profile.canonicalize();
    let mut positive = vec![Rat::zero(); m];
    let mut negative = vec![Rat::zero(); m];
    if cp.q() == 1 {
        // Everyone tied everywhere: the lottery makes each candidate first
        // for 1/m of the mass and last for 1/m of it.
        let share = rat(1, m as i64);
        positive.fill(share.clone());
        negative.fill(share);
    } else {
        let em = cp.electorates();
        for i in 0..cp.q() {
            let n = rat(cp.counts()[i] as i64, 1);
            let pos_share = em.full(i).len() / &n;
            let neg_share = if i == 0 {
                em.neg_left().expect("q >= 2").len() / &n
            } else if i == cp.q() - 1 {
                em.neg_right().expect("q >= 2").len() / &n
            } else {
                Rat::zero()
            };
            for &owner in cp.owners(i) {
                positive[owner] = pos_share.clone();
                negative[owner] = neg_share.clone();
            }
        }
    }
    let per_candidate = positive
        .iter()
        .zip(&negative)
        .map(|(p, n)| p - c * n)
        .collect();
    Ok(ScoreReport {
        per_candidate,
        positive_part: positive,
        negative_part: negative,
    })
}

/// Candidate `i`'s score after unilaterally relocating to `t`.
///
/// Defined by delegation: the profile with `i` moved to `t` is re-scored
/// from scratch, so deviation semantics are exactly the score semantics.
pub fn deviation_payoff(rule: &Rule, profile: &Profile, i: usize, t: &Rat) -> Result<Rat, Error> {
    let moved = profile.replace(i, t.clone())?;
    let report = score_all(rule, &moved)?;
    Ok(report.per_candidate[i].clone())
}

/// One-sided limit of candidate `i`'s deviation payoff approaching the
/// occupied position of index `at` (in the canonical form of `profile`).
pub fn deviation_limit(
    rule: &Rule,
    profile: &Profile,
    i: usize,
    at: usize,
    side: Side,
) -> Result<Rat, Error> {
    if profile.len() != rule.m() {
        return Err(Error::CandidateCountMismatch {
            expected: rule.m(),
            got: profile.len(),
        });
    }
    let cp = profile.canonicalize();
    let target = cp
        .occupied()
        .get(at)
        .cloned()
        .ok_or(Error::InvalidTarget)?;
    match side {
        Side::Left if target.is_zero() => return Err(Error::InvalidTarget),
        Side::Right if target == Rat::one() => return Err(Error::InvalidTarget),
        _ => {}
    }
    let env = Env::around(rule, profile, i)?;
    Ok(env.one_sided_limit(&target, side))
}

/// Exact supremum of candidate `i`'s deviation payoff over all of `[0, 1]`,
/// computed by breakpoint enumeration over the other candidates' positions.
pub fn best_deviation(rule: &Rule, profile: &Profile, i: usize) -> Result<DeviationAnalysis, Error> {
    if profile.len() != rule.m() {
        return Err(Error::CandidateCountMismatch {
            expected: rule.m(),
            got: profile.len(),
        });
    }
    let env = Env::around(rule, profile, i)?;
    let y = env.cp.occupied();
    let r = env.cp.q();
    let half = rat(1, 2);

    let mut best: Option<(Rat, Witness, bool)> = None;
    let mut offer = |value: Rat, witness: Witness, attained: bool| {
        let better = match &best {
            None => true,
            Some((cur, _, cur_attained)) => {
                value > *cur || (value == *cur && attained && !*cur_attained)
            }
        };
        if better {
            best = Some((value, witness, attained));
        }
    };

    // Joining each occupied group (shares split n_j + 1 ways).
    for j in 0..r {
        offer(env.colocate(j), Witness::Point(y[j].clone()), true);
    }
    // Endpoints of the issue space, when they lie in an outer gap.
    if !y[0].is_zero() {
        offer(env.outer_left(&Rat::zero()), Witness::Point(Rat::zero()), true);
        offer(env.left_limit_at_edge(), Witness::LeftLimitAt(y[0].clone()), false);
    }
    if y[r - 1] != Rat::one() {
        offer(env.outer_right(&Rat::one()), Witness::Point(Rat::one()), true);
        offer(
            env.right_limit_at_edge(),
            Witness::RightLimitAt(y[r - 1].clone()),
            false,
        );
    }
    // Interior gaps: payoff is constant there, so the midpoint attains it.
    for j in 0..r.saturating_sub(1) {
        let value = (&y[j + 1] - &y[j]) * &half;
        let mid = (&y[j] + &y[j + 1]) * &half;
        offer(value, Witness::Point(mid), true);
    }

    let (sup_value, witness, attained) = best.expect("at least one candidate value");
    Ok(DeviationAnalysis {
        candidate: i,
        sup_value,
        witness,
        attained,
    })
}

/// The stationary environment a deviating candidate moves through: the
/// canonical profile of everyone else, with its electorates.
struct Env<'r> {
    rule: &'r Rule,
    cp: CanonicalProfile,
    em: ElectorateMap,
}

impl<'r> Env<'r> {
    fn around(rule: &'r Rule, profile: &Profile, i: usize) -> Result<Self, Error> {
        let others = profile.without(i)?;
        let cp = others.canonicalize();
        let em = cp.electorates();
        Ok(Env { rule, cp, em })
    }

    /// Payoff from joining the group at environment position `j`.
    fn colocate(&self, j: usize) -> Rat {
        let c = self.rule.c();
        let r = self.cp.q();
        if r == 1 {
            // Everyone ends up at one point.
            let m = self.cp.m() + 1;
            return (Rat::one() - c) / rat(m as i64, 1);
        }
        let n = rat(self.cp.counts()[j] as i64 + 1, 1);
        let pos = self.em.full(j).len() / &n;
        let neg = if j == 0 {
            self.em.neg_left().expect("r >= 2").len() / &n
        } else if j == r - 1 {
            self.em.neg_right().expect("r >= 2").len() / &n
        } else {
            Rat::zero()
        };
        pos - c * neg
    }

    /// Payoff at a point `t` strictly left of every environment position:
    /// the deviator is alone and leftmost, so she takes the whole left
    /// block and the whole right-side negative block.
    fn outer_left(&self, t: &Rat) -> Rat {
        let half = rat(1, 2);
        let y1 = self.cp.x1();
        let yr = self.cp.xq();
        let pos = (t + y1) * &half;
        let neg = Rat::one() - (t + yr) * &half;
        pos - self.rule.c() * neg
    }

    /// Mirror of `outer_left` for `t` strictly right of everything.
    fn outer_right(&self, t: &Rat) -> Rat {
        let half = rat(1, 2);
        let y1 = self.cp.x1();
        let yr = self.cp.xq();
        let pos = Rat::one() - (yr + t) * &half;
        let neg = (y1 + t) * &half;
        pos - self.rule.c() * neg
    }

    /// Limit of `outer_left` as `t` approaches the leftmost environment
    /// position: the full adjacent electorate, unsplit.
    fn left_limit_at_edge(&self) -> Rat {
        self.outer_left(self.cp.x1())
    }

    fn right_limit_at_edge(&self) -> Rat {
        self.outer_right(self.cp.xq())
    }

    /// One-sided limit of the deviation payoff at an arbitrary target.
    /// At environment breakpoints this is the genuine one-sided limit; in
    /// the interior of a gap the payoff is continuous and the limit equals
    /// the attained value.
    fn one_sided_limit(&self, target: &Rat, side: Side) -> Rat {
        let y = self.cp.occupied();
        let r = self.cp.q();
        let half = rat(1, 2);
        match y.binary_search(target) {
            Ok(j) => match side {
                Side::Left => {
                    if j == 0 {
                        self.left_limit_at_edge()
                    } else {
                        (&y[j] - &y[j - 1]) * &half
                    }
                }
                Side::Right => {
                    if j == r - 1 {
                        self.right_limit_at_edge()
                    } else {
                        (&y[j + 1] - &y[j]) * &half
                    }
                }
            },
            Err(k) => {
                // Target sits inside a gap; both one-sided limits agree
                // with the value at the target itself.
                if k == 0 {
                    self.outer_left(target)
                } else if k == r {
                    self.outer_right(target)
                } else {
                    (&y[k] - &y[k - 1]) * &half
                }
            }
        }
    }
}
