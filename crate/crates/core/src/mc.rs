//! Independent numerical oracles for the exact engine.
//!
//! [`sample_scores`] simulates a finite electorate with the tie lottery
//! drawn literally, voter by voter, and reports sample means with
//! standard errors — floats are confined to this module. Every voter owns
//! a dedicated, seed-derived random stream and the per-candidate tallies
//! are integers, so the result is bit-identical no matter how the voters
//! are sharded across threads.
//!
//! [`grid_best_deviation`] probes the exact deviation payoff on a dense
//! rational grid. Its maximum can never exceed the closed-form supremum,
//! which makes it a one-sided check of the breakpoint enumeration.

use std::collections::BTreeSet;

use num::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::model::{rat, Error, Profile, Rat, Rule};
use crate::scoring::deviation_payoff;

/// Sampled per-candidate score statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct McEstimate {
    pub per_candidate_mean: Vec<f64>,
    /// Sample standard deviation divided by sqrt(n), per candidate.
    pub per_candidate_stderr: Vec<f64>,
    pub n_voters: u64,
    pub seed: u64,
    /// How many voters ranked each candidate first / last.
    pub first_counts: Vec<u64>,
    pub last_counts: Vec<u64>,
}

/// Estimates every candidate's expected score from `n_voters` sampled
/// ideal points, single-threaded. See [`sample_scores_sharded`].
pub fn sample_scores(
    rule: &Rule,
    profile: &Profile,
    n_voters: u64,
    seed: u64,
) -> Result<McEstimate, Error> {
    sample_scores_sharded(rule, profile, n_voters, seed, 1)
}

/// Estimates scores with the voters split into `shards` contiguous blocks
/// processed on separate threads. Voter `v`'s randomness comes from
/// stream `v` of the seeded generator and the tallies are integers, so
/// the estimate is identical for every shard count.
pub fn sample_scores_sharded(
    rule: &Rule,
    profile: &Profile,
    n_voters: u64,
    seed: u64,
    shards: usize,
) -> Result<McEstimate, Error> {
    if profile.len() != rule.m() {
        return Err(Error::CandidateCountMismatch {
            expected: rule.m(),
            got: profile.len(),
        });
    }
    if n_voters == 0 {
        return Err(Error::InfeasibleConfig(
            "need at least one sampled voter".to_string(),
        ));
    }
    let shards = shards.clamp(1, n_voters.min(64) as usize) as u64;
    let positions: Vec<f64> = profile
        .positions()
        .iter()
        .map(|p| p.to_f64().expect("platform fits in f64"))
        .collect();
    let m = positions.len();

    let mut tallies: Vec<Tally> = Vec::with_capacity(shards as usize);
    std::thread::scope(|scope| {
        let mut handles = Vec::with_capacity(shards as usize);
        for s in 0..shards {
            let lo = n_voters * s / shards;
            let hi = n_voters * (s + 1) / shards;
            let positions = &positions;
            handles.push(scope.spawn(move || tally_range(positions, seed, lo, hi)));
        }
        for handle in handles {
            tallies.push(handle.join().expect("sampler thread panicked"));
        }
    });
    let mut first_counts = vec![0u64; m];
    let mut last_counts = vec![0u64; m];
    for t in tallies {
        for i in 0..m {
            first_counts[i] += t.first[i];
            last_counts[i] += t.last[i];
        }
    }

    let c = rule.c().to_f64().expect("weight fits in f64");
    let n = n_voters as f64;
    let mut means = Vec::with_capacity(m);
    let mut stderrs = Vec::with_capacity(m);
    for i in 0..m {
        let sum = first_counts[i] as f64 - c * last_counts[i] as f64;
        let sum_sq = first_counts[i] as f64 + c * c * last_counts[i] as f64;
        let mean = sum / n;
        let stderr = if n_voters > 1 {
            let var = ((sum_sq - n * mean * mean) / (n - 1.0)).max(0.0);
            (var / n).sqrt()
        } else {
            0.0
        };
        means.push(mean);
        stderrs.push(stderr);
    }
    Ok(McEstimate {
        per_candidate_mean: means,
        per_candidate_stderr: stderrs,
        n_voters,
        seed,
        first_counts,
        last_counts,
    })
}

struct Tally {
    first: Vec<u64>,
    last: Vec<u64>,
}

fn tally_range(positions: &[f64], seed: u64, lo: u64, hi: u64) -> Tally {
    let m = positions.len();
    let base = ChaCha8Rng::seed_from_u64(seed);
    let mut first = vec![0u64; m];
    let mut last = vec![0u64; m];
    let mut dist = vec![0.0f64; m];
    for voter in lo..hi {
        let mut rng = base.clone();
        rng.set_stream(voter);
        let y: f64 = rng.gen();
        let mut min_d = f64::INFINITY;
        let mut max_d = f64::NEG_INFINITY;
        for (i, &x) in positions.iter().enumerate() {
            let d = (y - x).abs();
            dist[i] = d;
            min_d = min_d.min(d);
            max_d = max_d.max(d);
        }
        // Fair lottery over ties: a uniform pick among the nearest group
        // decides the positive vote, then a uniform pick among the
        // farthest group (excluding the winner, who cannot also be last
        // for m >= 2) decides the negative vote.
        let winner = pick_tied(&mut rng, &dist, min_d, None);
        let skip = if min_d == max_d { Some(winner) } else { None };
        let loser = pick_tied(&mut rng, &dist, max_d, skip);
        first[winner] += 1;
        last[loser] += 1;
    }
    Tally { first, last }
}

fn pick_tied(rng: &mut ChaCha8Rng, dist: &[f64], target: f64, skip: Option<usize>) -> usize {
    let count = dist
        .iter()
        .enumerate()
        .filter(|&(i, &d)| d == target && Some(i) != skip)
        .count();
    debug_assert!(count > 0);
    let pick = if count > 1 { rng.gen_range(0..count) } else { 0 };
    dist.iter()
        .enumerate()
        .filter(|&(i, &d)| d == target && Some(i) != skip)
        .nth(pick)
        .map(|(i, _)| i)
        .expect("tied candidate exists")
}

/// Maximum of the exact deviation payoff over a dense rational grid:
/// every multiple of `step` in `[0, 1]`, the midpoints of all gaps
/// between the other candidates' positions, and probes `step/10` to
/// either side of every occupied position. Returns the maximum and the
/// grid point attaining it.
pub fn grid_best_deviation(
    rule: &Rule,
    profile: &Profile,
    i: usize,
    step: &Rat,
) -> Result<(Rat, Rat), Error> {
    if !step.is_positive() {
        return Err(Error::InfeasibleConfig(
            "grid step must be positive".to_string(),
        ));
    }
    let mut probes: BTreeSet<Rat> = BTreeSet::new();
    let mut t = Rat::zero();
    while t <= Rat::one() {
        probes.insert(t.clone());
        t += step;
    }
    probes.insert(Rat::one());
    let others = profile.without(i)?.canonicalize();
    for w in others.occupied().windows(2) {
        probes.insert((&w[0] + &w[1]) * rat(1, 2));
    }
    let nudge = step * rat(1, 10);
    let own = profile.canonicalize();
    for x in own.occupied() {
        for probe in [x - &nudge, x + &nudge] {
            if !probe.is_negative() && probe <= Rat::one() {
                probes.insert(probe);
            }
        }
    }
    let mut best: Option<(Rat, Rat)> = None;
    for t in probes {
        let v = deviation_payoff(rule, profile, i, &t)?;
        match &best {
            Some((cur, _)) if *cur >= v => {}
            _ => best = Some((v, t)),
        }
    }
    Ok(best.expect("grid is nonempty"))
}
