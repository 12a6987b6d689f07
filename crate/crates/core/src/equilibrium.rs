//! Nash certification.
//!
//! Two independent routes produce a verdict for any profile:
//!
//! * [`is_nash`] — exhaustive deviation analysis: a profile is an
//!   equilibrium iff no candidate's best deviation beats her standing
//!   score (one-sided limits included in the comparison, since attained
//!   payoffs approach every limit value arbitrarily closely).
//! * [`cne_check`] / [`ncne_conditions`] — the closed-form
//!   characterizations of convergent and divergent equilibria.
//!
//! [`classify`] runs both and treats any disagreement as a fatal internal
//! bug: the routes are mathematically equivalent, so divergence can only
//! mean an implementation error.

use num::One;

use crate::construct::cne_interval;
use crate::model::{rat, Error, Interval, Profile, Rat, Rule};
use crate::scoring::{best_deviation, score_all, Witness};

/// Classification of a profile under a rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    /// Convergent Nash equilibrium: everyone at one platform, nobody moves.
    Cne,
    /// Nonconvergent Nash equilibrium: at least two platforms, nobody moves.
    Ncne,
    NotEquilibrium,
}

impl Verdict {
    pub fn is_equilibrium(self) -> bool {
        matches!(self, Verdict::Cne | Verdict::Ncne)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Cne => "CNE",
            Verdict::Ncne => "NCNE",
            Verdict::NotEquilibrium => "NotEquilibrium",
        }
    }
}

/// Per-candidate deviation evidence. The deviation route fills every
/// field; the closed-form routes only report scores.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CandidateReport {
    pub candidate: usize,
    pub score: Rat,
    pub sup_deviation: Option<Rat>,
    /// `score - sup_deviation`; nonnegative exactly when the candidate
    /// has no profitable move.
    pub slack: Option<Rat>,
    pub witness: Option<Witness>,
    pub attained: Option<bool>,
}

/// Evidence from the convergent-equilibrium characterization: the
/// admissible platform interval (empty when none exists) and whether the
/// profile's platform belongs to it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CneReport {
    pub interval: Option<Interval>,
    pub member: bool,
}

/// Evidence for the five divergent-equilibrium conditions.
///
/// `common_half` is the shared length of all paired candidates'
/// non-end half-electorates when it is well defined.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConditionReport {
    /// Extreme positions hold exactly two candidates; no position holds
    /// more than two.
    pub ends_paired: bool,
    /// All paired candidates' half-electorates (ends excluded) share one
    /// length.
    pub equal_paired_halves: bool,
    /// The outer half-electorates exceed the common length by `c/2`.
    pub end_margin: bool,
    /// Every unpaired candidate's full electorate covers every non-end
    /// half-electorate.
    pub unpaired_full_dominates: bool,
    /// The paired half-electorate length covers every non-end
    /// half-electorate.
    pub paired_half_dominates: bool,
    pub common_half: Rat,
}

impl ConditionReport {
    pub fn all_hold(&self) -> bool {
        self.ends_paired
            && self.equal_paired_halves
            && self.end_margin
            && self.unpaired_full_dominates
            && self.paired_half_dominates
    }

    pub fn first_failure(&self) -> Option<&'static str> {
        if !self.ends_paired {
            Some("ends_paired")
        } else if !self.equal_paired_halves {
            Some("equal_paired_halves")
        } else if !self.end_margin {
            Some("end_margin")
        } else if !self.unpaired_full_dominates {
            Some("unpaired_full_dominates")
        } else if !self.paired_half_dominates {
            Some("paired_half_dominates")
        } else {
            None
        }
    }
}

/// What refuted the equilibrium, when something did.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// A candidate with a strictly profitable deviation.
    Deviation { candidate: usize, payoff: Rat },
    /// A failed divergent-equilibrium condition.
    Condition { name: &'static str },
    /// Convergent platform outside the admissible interval.
    IntervalMembership,
}

/// Full certification output: the verdict plus the evidence that supports
/// or refutes it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquilibriumCertificate {
    pub verdict: Verdict,
    /// Number of distinct occupied positions.
    pub q: usize,
    pub per_candidate: Vec<CandidateReport>,
    pub cne: Option<CneReport>,
    pub conditions: Option<ConditionReport>,
    pub violated_by: Option<Violation>,
}

/// Certifies a profile by exhaustive deviation analysis.
pub fn is_nash(rule: &Rule, profile: &Profile) -> Result<EquilibriumCertificate, Error> {
    let report = score_all(rule, profile)?;
    let q = profile.canonicalize().q();
    let mut per_candidate = Vec::with_capacity(profile.len());
    let mut violated_by = None;
    for i in 0..profile.len() {
        let analysis = best_deviation(rule, profile, i)?;
        let score = report.per_candidate[i].clone();
        let slack = &score - &analysis.sup_value;
        if slack < Rat::from_integer(0.into()) && violated_by.is_none() {
            violated_by = Some(Violation::Deviation {
                candidate: i,
                payoff: analysis.sup_value.clone(),
            });
        }
        per_candidate.push(CandidateReport {
            candidate: i,
            score,
            sup_deviation: Some(analysis.sup_value),
            slack: Some(slack),
            witness: Some(analysis.witness),
            attained: Some(analysis.attained),
        });
    }
    let verdict = if violated_by.is_some() {
        Verdict::NotEquilibrium
    } else if q == 1 {
        Verdict::Cne
    } else {
        Verdict::Ncne
    };
    Ok(EquilibriumCertificate {
        verdict,
        q,
        per_candidate,
        cne: None,
        conditions: None,
        violated_by,
    })
}

/// Certifies a fully convergent profile against the closed-form interval
/// of admissible platforms. The interval is reported even on failure.
pub fn cne_check(rule: &Rule, profile: &Profile) -> Result<EquilibriumCertificate, Error> {
    if profile.len() != rule.m() {
        return Err(Error::CandidateCountMismatch {
            expected: rule.m(),
            got: profile.len(),
        });
    }
    let cp = profile.canonicalize();
    if cp.q() != 1 {
        return Err(Error::NotConvergent(cp.q()));
    }
    let x1 = cp.x1();
    let interval = cne_interval(rule);
    let member = interval.as_ref().is_some_and(|iv| iv.contains(x1));
    let c = rule.c();
    let score = (Rat::one() - c) / rat(rule.m() as i64, 1);
    // The payoff is monotone toward the platform on both outer gaps, so
    // the adjacent one-sided limits carry the whole supremum.
    let mut sup = score.clone();
    if *x1 > Rat::from_integer(0.into()) {
        sup = sup.max(x1 - c * (Rat::one() - x1));
    }
    if *x1 < Rat::one() {
        sup = sup.max(Rat::one() - x1 - c * x1);
    }
    let slack = &score - &sup;
    let per_candidate = (0..rule.m())
        .map(|i| CandidateReport {
            candidate: i,
            score: score.clone(),
            sup_deviation: Some(sup.clone()),
            slack: Some(slack.clone()),
            witness: None,
            attained: None,
        })
        .collect();
    Ok(EquilibriumCertificate {
        verdict: if member { Verdict::Cne } else { Verdict::NotEquilibrium },
        q: 1,
        per_candidate,
        cne: Some(CneReport { interval, member }),
        conditions: None,
        violated_by: if member {
            None
        } else {
            Some(Violation::IntervalMembership)
        },
    })
}

/// Certifies a divergent profile against the five structural conditions.
/// Only valid in the `c < 1` regime; divergent equilibria cannot exist
/// otherwise, so calling this with `c >= 1` is an error rather than a
/// silent `NotEquilibrium`.
pub fn ncne_conditions(rule: &Rule, profile: &Profile) -> Result<EquilibriumCertificate, Error> {
    if profile.len() != rule.m() {
        return Err(Error::CandidateCountMismatch {
            expected: rule.m(),
            got: profile.len(),
        });
    }
    if *rule.c() >= Rat::one() {
        return Err(Error::WrongRegime(rule.c().to_string()));
    }
    let cp = profile.canonicalize();
    let q = cp.q();
    if q < 2 {
        return Err(Error::NotDivergent);
    }
    let em = cp.electorates();
    let counts = cp.counts();

    let ends_paired =
        counts[0] == 2 && counts[q - 1] == 2 && counts.iter().all(|&n| n <= 2);

    // Paired candidates' half-electorates, end halves excluded. The inner
    // halves of the two extreme (paired) positions always participate.
    let mut paired_halves = vec![em.right_half(0).len(), em.left_half(q - 1).len()];
    for i in 1..q - 1 {
        if counts[i] == 2 {
            paired_halves.push(em.left_half(i).len());
            paired_halves.push(em.right_half(i).len());
        }
    }
    let common_half = paired_halves[0].clone();
    let equal_paired_halves = paired_halves.iter().all(|h| *h == common_half);

    let margin = &common_half + rule.c() * rat(1, 2);
    let end_margin = em.left_half(0).len() == margin && em.right_half(q - 1).len() == margin;

    // Every half-electorate except the two outermost ones.
    let non_end_halves: Vec<Rat> = (1..q)
        .map(|k| em.left_half(k).len())
        .chain((0..q - 1).map(|k| em.right_half(k).len()))
        .collect();

    let unpaired_full_dominates = (0..q)
        .filter(|&i| counts[i] == 1)
        .all(|i| {
            let full = em.full(i).len();
            non_end_halves.iter().all(|h| full >= *h)
        });
    let paired_half_dominates = non_end_halves.iter().all(|h| common_half >= *h);

    let conditions = ConditionReport {
        ends_paired,
        equal_paired_halves,
        end_margin,
        unpaired_full_dominates,
        paired_half_dominates,
        common_half,
    };
    let verdict = if conditions.all_hold() {
        Verdict::Ncne
    } else {
        Verdict::NotEquilibrium
    };
    let scores = score_all(rule, profile)?;
    let per_candidate = scores
        .per_candidate
        .iter()
        .enumerate()
        .map(|(i, v)| CandidateReport {
            candidate: i,
            score: v.clone(),
            sup_deviation: None,
            slack: None,
            witness: None,
            attained: None,
        })
        .collect();
    let violated_by = conditions
        .first_failure()
        .map(|name| Violation::Condition { name });
    Ok(EquilibriumCertificate {
        verdict,
        q,
        per_candidate,
        cne: None,
        conditions: Some(conditions),
        violated_by,
    })
}

/// Certifies a profile by the deviation route and cross-validates the
/// verdict against the applicable closed-form route. A disagreement is an
/// implementation bug, never a property of the input.
pub fn classify(rule: &Rule, profile: &Profile) -> Result<EquilibriumCertificate, Error> {
    let mut cert = is_nash(rule, profile)?;
    if cert.q == 1 {
        let route = cne_check(rule, profile)?;
        if route.verdict != cert.verdict {
            return Err(Error::InternalInconsistency(format!(
                "deviation route says {} but the convergent characterization says {}",
                cert.verdict.as_str(),
                route.verdict.as_str()
            )));
        }
        cert.cne = route.cne;
        if cert.violated_by.is_none() {
            cert.violated_by = route.violated_by;
        }
    } else if *rule.c() < Rat::one() {
        let route = ncne_conditions(rule, profile)?;
        if route.verdict != cert.verdict {
            return Err(Error::InternalInconsistency(format!(
                "deviation route says {} but the divergent characterization says {}",
                cert.verdict.as_str(),
                route.verdict.as_str()
            )));
        }
        cert.conditions = route.conditions;
    } else if cert.verdict == Verdict::Ncne {
        // Divergent equilibria cannot exist once a negative vote is worth
        // at least a positive one.
        return Err(Error::InternalInconsistency(
            "divergent equilibrium certified under c >= 1".to_string(),
        ));
    }
    Ok(cert)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn profile(xs: &[(i64, i64)]) -> Profile {
        Profile::new(xs.iter().map(|&(n, d)| rat(n, d)).collect()).unwrap()
    }

    fn rule(c: (i64, i64), m: usize) -> Rule {
        Rule::new(rat(c.0, c.1), m).unwrap()
    }

    #[test]
    fn convergent_equilibrium_inside_interval() {
        let cert = is_nash(&rule((2, 1), 3), &profile(&[(1, 2), (1, 2), (1, 2)])).unwrap();
        assert_eq!(cert.verdict, Verdict::Cne);
        assert_eq!(cert.q, 1);
        for c in &cert.per_candidate {
            assert!(c.slack.as_ref().unwrap() >= &Rat::from_integer(0.into()));
        }
    }

    #[test]
    fn paired_profile_is_divergent_equilibrium() {
        let cert = is_nash(
            &rule((1, 2), 4),
            &profile(&[(3, 8), (3, 8), (5, 8), (5, 8)]),
        )
        .unwrap();
        assert_eq!(cert.verdict, Verdict::Ncne);
    }

    #[test]
    fn plurality_spacing_fails_under_negative_votes() {
        let cert = is_nash(
            &rule((1, 2), 4),
            &profile(&[(1, 4), (1, 4), (3, 4), (3, 4)]),
        )
        .unwrap();
        assert_eq!(cert.verdict, Verdict::NotEquilibrium);
        assert!(matches!(
            cert.violated_by,
            Some(Violation::Deviation { .. })
        ));
    }

    #[test]
    fn cne_check_reports_the_interval() {
        let cert = cne_check(&rule((2, 1), 3), &profile(&[(1, 2), (1, 2), (1, 2)])).unwrap();
        assert_eq!(cert.verdict, Verdict::Cne);
        let iv = cert.cne.unwrap().interval.unwrap();
        assert_eq!(*iv.lo(), rat(4, 9));
        assert_eq!(*iv.hi(), rat(5, 9));
    }

    #[test]
    fn cne_interval_collapses_to_the_median_at_parity() {
        for m in 2..=6 {
            let cert = cne_check(
                &rule((1, 1), m),
                &Profile::new(vec![rat(1, 2); m]).unwrap(),
            )
            .unwrap();
            let iv = cert.cne.unwrap().interval.unwrap();
            assert_eq!(*iv.lo(), rat(1, 2));
            assert_eq!(*iv.hi(), rat(1, 2));
            assert_eq!(cert.verdict, Verdict::Cne);
        }
    }

    #[test]
    fn light_negative_weight_admits_no_convergent_equilibrium() {
        let cert = cne_check(
            &rule((1, 2), 4),
            &profile(&[(1, 2), (1, 2), (1, 2), (1, 2)]),
        )
        .unwrap();
        assert_eq!(cert.verdict, Verdict::NotEquilibrium);
        let report = cert.cne.unwrap();
        assert!(report.interval.is_none());
        assert!(!report.member);
        assert_eq!(cert.violated_by, Some(Violation::IntervalMembership));
    }

    #[test]
    fn cne_check_rejects_divergent_profiles() {
        assert!(matches!(
            cne_check(&rule((2, 1), 2), &profile(&[(1, 4), (3, 4)])),
            Err(Error::NotConvergent(2))
        ));
    }

    #[test]
    fn conditions_hold_on_the_four_candidate_equilibrium() {
        let cert = ncne_conditions(
            &rule((1, 2), 4),
            &profile(&[(3, 8), (3, 8), (5, 8), (5, 8)]),
        )
        .unwrap();
        assert_eq!(cert.verdict, Verdict::Ncne);
        let report = cert.conditions.unwrap();
        assert!(report.all_hold());
        assert_eq!(report.common_half, rat(1, 8));
    }

    #[test]
    fn unpaired_middle_candidate_passes_dominance() {
        let cert = ncne_conditions(
            &rule((0, 1), 5),
            &profile(&[(1, 6), (1, 6), (1, 2), (5, 6), (5, 6)]),
        )
        .unwrap();
        assert_eq!(cert.verdict, Verdict::Ncne);
        assert_eq!(cert.conditions.unwrap().common_half, rat(1, 6));
    }

    #[test]
    fn lone_end_position_fails_pairing() {
        let cert = ncne_conditions(
            &rule((0, 1), 4),
            &profile(&[(1, 4), (1, 4), (1, 2), (3, 4)]),
        )
        .unwrap();
        assert_eq!(cert.verdict, Verdict::NotEquilibrium);
        let report = cert.conditions.as_ref().unwrap();
        assert!(!report.ends_paired);
        assert_eq!(
            cert.violated_by,
            Some(Violation::Condition { name: "ends_paired" })
        );
    }

    #[test]
    fn conditions_require_the_light_regime() {
        assert!(matches!(
            ncne_conditions(&rule((3, 2), 4), &profile(&[(1, 4), (1, 4), (3, 4), (3, 4)])),
            Err(Error::WrongRegime(_))
        ));
        assert!(matches!(
            ncne_conditions(&rule((1, 2), 2), &profile(&[(1, 2), (1, 2)])),
            Err(Error::NotDivergent)
        ));
    }

    #[test]
    fn classify_agrees_on_known_cases() {
        let cert = classify(
            &rule((1, 2), 4),
            &profile(&[(3, 8), (3, 8), (5, 8), (5, 8)]),
        )
        .unwrap();
        assert_eq!(cert.verdict, Verdict::Ncne);
        assert!(cert.conditions.is_some());

        let cert = classify(
            &rule((3, 2), 5),
            &Profile::new(vec![rat(1, 2); 5]).unwrap(),
        )
        .unwrap();
        assert_eq!(cert.verdict, Verdict::Cne);
        assert!(cert.cne.is_some());

        let cert = classify(
            &rule((3, 2), 5),
            &profile(&[(1, 3), (1, 3), (1, 2), (2, 3), (2, 3)]),
        )
        .unwrap();
        assert_eq!(cert.verdict, Verdict::NotEquilibrium);
    }

    #[test]
    fn median_pair_is_an_equilibrium_for_two_candidates() {
        // With two candidates every rule reduces to plurality: the paired
        // median platform is stable for any weight, and it is the only
        // stable convergent platform.
        for c in [(0, 1), (1, 2), (1, 1), (3, 1)] {
            let cert = classify(&rule(c, 2), &profile(&[(1, 2), (1, 2)])).unwrap();
            assert_eq!(cert.verdict, Verdict::Cne, "c = {:?}", c);
            let cert = classify(&rule(c, 2), &profile(&[(2, 5), (2, 5)])).unwrap();
            assert_eq!(cert.verdict, Verdict::NotEquilibrium);
        }
    }

    #[test]
    fn three_candidates_admit_no_divergent_equilibrium() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let weights = [rat(0, 1), rat(1, 4), rat(1, 2), rat(3, 4)];
        for _ in 0..10_000 {
            let q = rng.gen_range(2..=3);
            let p = Profile::random(&mut rng, 3, q, 60);
            for c in &weights {
                let r = Rule::new(c.clone(), 3).unwrap();
                let cert = classify(&r, &p).unwrap();
                assert_ne!(cert.verdict, Verdict::Ncne, "profile {:?} c {}", p, c);
            }
        }
    }

    #[test]
    fn heavy_negative_weight_forbids_divergent_equilibria() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let weights = [rat(1, 1), rat(3, 2), rat(2, 1)];
        for _ in 0..1_000 {
            let m = rng.gen_range(3..=8);
            let q = rng.gen_range(2..=m.min(5));
            let p = Profile::random(&mut rng, m, q, 60);
            for c in &weights {
                let r = Rule::new(c.clone(), m).unwrap();
                let cert = classify(&r, &p).unwrap();
                assert_ne!(cert.verdict, Verdict::Ncne);
            }
        }
    }

    #[test]
    fn routes_agree_on_random_divergent_profiles() {
        // classify() itself errors on any disagreement, so surviving the
        // sweep is the assertion.
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(23);
        for _ in 0..1_000 {
            let m = rng.gen_range(3..=8);
            let q = rng.gen_range(2..=m.min(5));
            let p = Profile::random(&mut rng, m, q, 60);
            let c = rat(rng.gen_range(0..20), 20);
            let r = Rule::new(c, m).unwrap();
            classify(&r, &p).unwrap();
        }
    }
}
