//! Shared fixtures for the engine benchmarks.

use bestworst::{rat, Profile, Rat, Rule};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// The eight-candidate equal-spacing equilibrium under `c = 1/2`.
pub fn dispersed_eight() -> (Rule, Profile) {
    let rule = Rule::new(rat(1, 2), 8).unwrap();
    let built = bestworst::ncne_family(&rule, &Rat::from_integer(0.into())).unwrap();
    (rule, built.profile)
}

/// A reproducible batch of random rule/profile pairs.
pub fn random_batch(n: usize, seed: u64) -> Vec<(Rule, Profile)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let m = rng.gen_range(3..=8);
            let q = rng.gen_range(2..=m.min(5));
            let profile = Profile::random(&mut rng, m, q, 60);
            let rule = Rule::new(rat(rng.gen_range(0..8), 4), m).unwrap();
            (rule, profile)
        })
        .collect()
}
