//! Closed-form constructors for every equilibrium family the rule class
//! supports: the convergent-platform interval, the unique four- and
//! five-candidate divergent equilibria, maximally and minimally dispersed
//! layouts, and the one-parameter family interpolating between them for
//! six or more candidates.
//!
//! Every constructed profile with `c < 1` certifies as a divergent
//! equilibrium; at `c = 1` the layouts merge at the median and are
//! returned flagged as the convergent limit rather than an equilibrium.

use num::{One, Signed, Zero};

use crate::model::{rat, Error, Interval, Profile, Rat, Rule};

/// Shape of a divergent layout: candidate counts per occupied position
/// (left to right) and the dispersion parameter selecting a member within
/// an infinite family where one exists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NcneConfig {
    counts: Vec<usize>,
    dispersion: Rat,
}

impl NcneConfig {
    /// Validates a layout shape: at least two positions, nobody tripled,
    /// both extremes paired, and a nonnegative dispersion.
    pub fn new(counts: Vec<usize>, dispersion: Rat) -> Result<Self, Error> {
        if counts.len() < 2 {
            return Err(Error::InfeasibleConfig(
                "need at least two occupied positions".to_string(),
            ));
        }
        if counts.iter().any(|&n| n == 0 || n > 2) {
            return Err(Error::InfeasibleConfig(
                "every occupied position holds one or two candidates".to_string(),
            ));
        }
        if *counts.first().unwrap() != 2 || *counts.last().unwrap() != 2 {
            return Err(Error::InfeasibleConfig(
                "both extreme positions must be paired".to_string(),
            ));
        }
        if dispersion.is_negative() {
            return Err(Error::InfeasibleConfig(
                "dispersion must be nonnegative".to_string(),
            ));
        }
        Ok(NcneConfig { counts, dispersion })
    }

    /// The equal-spacing shape with `q` positions for `m` candidates:
    /// pairs at both extremes, and the remaining pairs placed outermost
    /// first, symmetrically.
    pub fn equal_spacing(m: usize, q: usize) -> Result<Self, Error> {
        if q < 2 || m < q + 2 || m > 2 * q {
            return Err(Error::InfeasibleConfig(format!(
                "no layout with q = {q} positions for m = {m} candidates"
            )));
        }
        let mut counts = vec![1usize; q];
        counts[0] = 2;
        counts[q - 1] = 2;
        let mut extra = m - q - 2;
        let (mut lo, mut hi) = (1usize, q - 2);
        while extra > 0 {
            counts[lo] = 2;
            extra -= 1;
            if extra > 0 && hi != lo {
                counts[hi] = 2;
                extra -= 1;
            }
            lo += 1;
            hi -= 1;
        }
        NcneConfig::new(counts, Rat::zero())
    }

    pub fn q(&self) -> usize {
        self.counts.len()
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn dispersion(&self) -> &Rat {
        &self.dispersion
    }

    pub fn m(&self) -> usize {
        self.counts.iter().sum()
    }
}

/// A constructed profile together with the layout quantities that
/// produced it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constructed {
    pub profile: Profile,
    /// Leftmost platform.
    pub x1: Rat,
    /// Common non-end half-electorate length of the layout.
    pub half_unit: Rat,
    /// True when `c = 1` merged every platform at the median; the result
    /// is then the convergent limit of the family, not an equilibrium of
    /// its verdict class.
    pub convergent_limit: bool,
    /// Largest feasible dispersion for the family, when one exists.
    pub epsilon_max: Option<Rat>,
    /// For dispersed families: how many half-electorates per side grow
    /// with the dispersion parameter.
    pub enlarged_per_side: Option<usize>,
}

/// The interval of platforms on which full convergence is stable, or
/// `None` when no convergent equilibrium exists.
///
/// The interval `[(m-1+c)/(m(1+c)), 1 - (m-1+c)/(m(1+c))]` is nonempty
/// exactly when `c >= 1`, except for `m = 2`, where it degenerates to
/// the median singleton for every weight: two candidates reduce every
/// rule to plurality, and the paired median is the classic equilibrium.
pub fn cne_interval(rule: &Rule) -> Option<Interval> {
    let c = rule.c();
    let m = rat(rule.m() as i64, 1);
    let lo = (&m - Rat::one() + c) / (&m * (Rat::one() + c));
    let hi = Rat::one() - &lo;
    (lo <= hi).then(|| Interval::new(lo, hi))
}

/// The unique divergent equilibrium for four candidates: two pairs at
/// `(1+c)/4` and its mirror.
pub fn ncne_m4(rule: &Rule) -> Result<Constructed, Error> {
    if rule.m() != 4 {
        return Err(Error::InfeasibleConfig(format!(
            "this construction needs m = 4, got m = {}",
            rule.m()
        )));
    }
    require_light_regime(rule, false)?;
    let x1 = (Rat::one() + rule.c()) * rat(1, 4);
    let profile = mirrored_profile(&[(x1.clone(), 2)], 4)?;
    Ok(Constructed {
        profile,
        x1,
        half_unit: (Rat::one() - rule.c()) * rat(1, 4),
        convergent_limit: false,
        epsilon_max: None,
        enlarged_per_side: None,
    })
}

/// The unique divergent equilibrium for five candidates: pairs at
/// `(1+2c)/6` and its mirror, one candidate at the median.
pub fn ncne_m5(rule: &Rule) -> Result<Constructed, Error> {
    if rule.m() != 5 {
        return Err(Error::InfeasibleConfig(format!(
            "this construction needs m = 5, got m = {}",
            rule.m()
        )));
    }
    require_light_regime(rule, false)?;
    let x1 = (Rat::one() + rat(2, 1) * rule.c()) * rat(1, 6);
    let profile = mirrored_profile(&[(x1.clone(), 2), (rat(1, 2), 1)], 5)?;
    Ok(Constructed {
        profile,
        x1,
        half_unit: (Rat::one() - rule.c()) * rat(1, 6),
        convergent_limit: false,
        epsilon_max: None,
        enlarged_per_side: None,
    })
}

/// The most dispersed divergent equilibrium with the given layout shape:
/// every non-end half-electorate gets the minimal common length
/// `(1-c)/(2q)`, which pushes the extreme platforms outward as far as the
/// negative-vote margin allows.
pub fn ncne_max_dispersed(rule: &Rule, config: &NcneConfig) -> Result<Constructed, Error> {
    if config.m() != rule.m() {
        return Err(Error::InfeasibleConfig(format!(
            "layout holds {} candidates but the rule has m = {}",
            config.m(),
            rule.m()
        )));
    }
    if !config.dispersion().is_zero() {
        return Err(Error::InfeasibleConfig(
            "the maximally dispersed layout has zero dispersion; use the family constructor"
                .to_string(),
        ));
    }
    require_light_regime(rule, true)?;
    let q = config.q();
    let half_unit = (Rat::one() - rule.c()) / rat(2 * q as i64, 1);
    let x1 = &half_unit + rule.c() * rat(1, 2);
    let gaps = vec![half_unit.clone(); q - 1];
    let profile = spaced_profile(&x1, &gaps, config.counts())?;
    Ok(Constructed {
        profile,
        x1,
        half_unit,
        convergent_limit: rule.c().is_one(),
        epsilon_max: None,
        enlarged_per_side: None,
    })
}

/// The least dispersed divergent equilibrium for the rule's candidate
/// count: the unique equilibrium for four or five candidates, the
/// three-position merged layout for six, and the boundary member of the
/// dispersion family beyond that.
pub fn ncne_min_dispersed(rule: &Rule) -> Result<Constructed, Error> {
    let m = rule.m();
    match m {
        0..=3 => Err(Error::InfeasibleConfig(format!(
            "no divergent equilibrium exists for m = {m}"
        ))),
        4 | 5 => {
            require_light_regime(rule, true)?;
            let c = rule.c();
            let (x1, half_unit, spec): (Rat, Rat, Vec<(Rat, usize)>) = if m == 4 {
                let x1 = (Rat::one() + c) * rat(1, 4);
                (x1.clone(), (Rat::one() - c) * rat(1, 4), vec![(x1, 2)])
            } else {
                let x1 = (Rat::one() + rat(2, 1) * c) * rat(1, 6);
                (
                    x1.clone(),
                    (Rat::one() - c) * rat(1, 6),
                    vec![(x1, 2), (rat(1, 2), 1)],
                )
            };
            Ok(Constructed {
                profile: mirrored_profile(&spec, m)?,
                x1,
                half_unit,
                convergent_limit: rule.c().is_one(),
                epsilon_max: None,
                enlarged_per_side: None,
            })
        }
        6 => {
            require_light_regime(rule, true)?;
            let x1 = (Rat::one() + rat(2, 1) * rule.c()) * rat(1, 6);
            let profile = mirrored_profile(&[(x1.clone(), 2), (rat(1, 2), 2)], m)?;
            Ok(Constructed {
                profile,
                x1,
                half_unit: (Rat::one() - rule.c()) * rat(1, 6),
                convergent_limit: rule.c().is_one(),
                epsilon_max: None,
                enlarged_per_side: None,
            })
        }
        _ => {
            let bound = family_bounds(rule)?;
            ncne_family(rule, &bound.epsilon_max)
        }
    }
}

struct FamilyBounds {
    q: usize,
    base_half: Rat,
    epsilon_max: Rat,
}

fn family_bounds(rule: &Rule) -> Result<FamilyBounds, Error> {
    let m = rule.m();
    if m < 6 {
        return Err(Error::InfeasibleConfig(format!(
            "the dispersion family needs at least six candidates, got m = {m}"
        )));
    }
    require_light_regime(rule, true)?;
    let q = if m % 2 == 0 { (m + 2) / 2 } else { (m + 3) / 2 };
    let base_half = (Rat::one() - rule.c()) / rat(2 * q as i64, 1);
    let epsilon_max = &base_half / rat(q as i64 - 1, 1);
    Ok(FamilyBounds {
        q,
        base_half,
        epsilon_max,
    })
}

/// A member of the infinite family of divergent equilibria for `m >= 6`.
///
/// Starting from the equal-spacing layout, every half-electorate except
/// the ones facing the central unpaired candidates grows by `epsilon`,
/// squeezing the middle. For even `m` the two central unpaired platforms
/// approach each other (merging exactly at the feasibility bound); for
/// odd `m` the median candidate's electorate shrinks until it matches the
/// common half-electorate length. The feasible range is
/// `0 <= epsilon <= (1-c) / (2q(q-1))`, boundary included.
pub fn ncne_family(rule: &Rule, epsilon: &Rat) -> Result<Constructed, Error> {
    let bounds = family_bounds(rule)?;
    if epsilon.is_negative() || *epsilon > bounds.epsilon_max {
        return Err(Error::EpsilonOutOfRange {
            max: bounds.epsilon_max.to_string(),
        });
    }
    let m = rule.m();
    let q = bounds.q;
    let half_unit = &bounds.base_half + epsilon;
    let x1 = &half_unit + rule.c() * rat(1, 2);
    let mut counts = vec![2usize; q];
    let mut gaps = vec![half_unit.clone(); q - 1];
    // 1-based central index, biased right when q is even.
    let center = (q + 1) / 2;
    let enlarged_per_side = if m % 2 == 0 {
        // Two adjacent unpaired platforms around the middle gap.
        counts[center - 1] = 1;
        counts[center] = 1;
        gaps[center - 1] = &bounds.base_half - rat(q as i64 - 1, 1) * epsilon;
        q - 1
    } else {
        // Three adjacent unpaired platforms; both gaps flanking the
        // middle one shrink together.
        counts[center - 2] = 1;
        counts[center - 1] = 1;
        counts[center] = 1;
        let squeezed = &bounds.base_half - rat(q as i64 - 2, 1) * epsilon * rat(1, 2);
        gaps[center - 2] = squeezed.clone();
        gaps[center - 1] = squeezed;
        q - 2
    };
    debug_assert_eq!(counts.iter().sum::<usize>(), m);
    let profile = spaced_profile(&x1, &gaps, &counts)?;
    Ok(Constructed {
        profile,
        x1,
        half_unit,
        convergent_limit: rule.c().is_one(),
        epsilon_max: Some(bounds.epsilon_max),
        enlarged_per_side: Some(enlarged_per_side),
    })
}

fn require_light_regime(rule: &Rule, allow_limit: bool) -> Result<(), Error> {
    let c = rule.c();
    let beyond = if allow_limit {
        *c > Rat::one()
    } else {
        *c >= Rat::one()
    };
    if beyond {
        Err(Error::WrongRegime(c.to_string()))
    } else {
        Ok(())
    }
}

/// Lays out platforms left to right: the first at `x1`, each next one a
/// full gap of `2 * half_gap` further, expanded by the per-position
/// candidate counts.
fn spaced_profile(x1: &Rat, half_gaps: &[Rat], counts: &[usize]) -> Result<Profile, Error> {
    let mut positions = Vec::new();
    let mut x = x1.clone();
    for (i, &n) in counts.iter().enumerate() {
        for _ in 0..n {
            positions.push(x.clone());
        }
        if i < half_gaps.len() {
            x += rat(2, 1) * &half_gaps[i];
        }
    }
    Profile::new(positions)
}

/// Builds a profile from the left half of a symmetric layout: each entry
/// `(x, n)` contributes `n` candidates at `x` and, unless `x` is the
/// median, `n` candidates at `1 - x`. At the merged `c = 1` limit every
/// platform coincides with the median, so the layout degenerates to `m`
/// candidates there.
fn mirrored_profile(left: &[(Rat, usize)], m: usize) -> Result<Profile, Error> {
    let mut positions = Vec::new();
    for (x, n) in left {
        for _ in 0..*n {
            positions.push(x.clone());
        }
    }
    for (x, n) in left.iter().rev() {
        let mirror = Rat::one() - x;
        if mirror == *x {
            continue;
        }
        for _ in 0..*n {
            positions.push(mirror.clone());
        }
    }
    if positions.iter().all(|x| *x == rat(1, 2)) {
        positions.resize(m, rat(1, 2));
    }
    assert_eq!(positions.len(), m, "layout does not cover every candidate");
    Profile::new(positions)
}
