use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use bestworst::{
    best_deviation, classify, ncne_family, rat, sample_scores, score_all, Profile, Rat, Rule,
};
use bestworst_bench::{dispersed_eight, random_batch};

fn bench_scoring(c: &mut Criterion) {
    let (rule, profile) = dispersed_eight();
    c.bench_function("score_all/m8", |b| {
        b.iter(|| score_all(black_box(&rule), black_box(&profile)).unwrap())
    });
    c.bench_function("best_deviation/m8", |b| {
        b.iter(|| best_deviation(black_box(&rule), black_box(&profile), 0).unwrap())
    });
}

fn bench_certification(c: &mut Criterion) {
    let (rule, profile) = dispersed_eight();
    c.bench_function("classify/equilibrium_m8", |b| {
        b.iter(|| classify(black_box(&rule), black_box(&profile)).unwrap())
    });
    let batch = random_batch(64, 9);
    c.bench_function("classify/random_batch64", |b| {
        b.iter(|| {
            for (rule, profile) in &batch {
                black_box(classify(rule, profile).unwrap());
            }
        })
    });
}

fn bench_construction(c: &mut Criterion) {
    let rule = Rule::new(rat(1, 2), 8).unwrap();
    c.bench_function("ncne_family/m8", |b| {
        b.iter(|| ncne_family(black_box(&rule), &Rat::from_integer(0.into())).unwrap())
    });
}

fn bench_sampler(c: &mut Criterion) {
    let rule = Rule::new(rat(1, 2), 4).unwrap();
    let profile = Profile::new(vec![rat(3, 8), rat(3, 8), rat(5, 8), rat(5, 8)]).unwrap();
    c.bench_function("sample_scores/10k_voters", |b| {
        b.iter(|| sample_scores(black_box(&rule), black_box(&profile), 10_000, 1).unwrap())
    });
}

criterion_group!(
    benches,
    bench_scoring,
    bench_certification,
    bench_construction,
    bench_sampler
);
criterion_main!(benches);
