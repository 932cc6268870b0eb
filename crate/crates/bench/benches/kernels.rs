use std::hint::black_box;

use chatelet_core::densities::{euler_local_factor, sigma_2_level, sigma_p_oracle};
use chatelet_core::lattice::{gamma_basis, reduce_basis};
use chatelet_core::points::count_table;
use chatelet_core::sums::{moebius_count, u_sum_with, Bound, DVector, Strategy};
use chatelet_core::{validate, TorsorClass};
use criterion::{criterion_group, criterion_main, Criterion};

fn counting(c: &mut Criterion) {
    let s = validate(1, 1, 1, -1).unwrap();
    c.bench_function("count_table B=1e4", |b| b.iter(|| count_table(&s, black_box(&[10_000]))));
    c.bench_function("moebius_count B=1e3", |b| b.iter(|| moebius_count(&s, black_box(1_000)).unwrap()));
}

fn lattice(c: &mut Criterion) {
    let s = validate(2, -3, 5, 7).unwrap();
    c.bench_function("gamma_basis + reduce", |b| {
        b.iter(|| reduce_basis(&gamma_basis(&s, black_box([9, 5, 7, 15])).unwrap()))
    });
    let m = TorsorClass::trivial();
    let dv = DVector { d: [1; 4], dd: [3, 3, 1, 1], ell: 3, sign: [1; 4] };
    let t = Bound::int(40_000);
    let sc = validate(1, 1, 1, -1).unwrap();
    for (name, strategy) in [("u_sum naive T=4e4", Strategy::Naive), ("u_sum reduced T=4e4", Strategy::Reduced)] {
        c.bench_function(name, |b| b.iter(|| u_sum_with(&sc, t, &m, &dv, strategy).unwrap()));
    }
}

fn densities(c: &mut Criterion) {
    let s = validate(1, 2, 1, 3).unwrap();
    c.bench_function("sigma_p_oracle p=3 n=8", |b| {
        b.iter(|| sigma_p_oracle(&s, 3, [1; 4], [1; 4], black_box(8)).unwrap())
    });
    c.bench_function("sigma_2 level 8", |b| b.iter(|| sigma_2_level(&s, black_box([1, 1, 1, 1]), 8)));
    c.bench_function("euler_local_factor p=101", |b| {
        b.iter(|| euler_local_factor(&s, black_box(101), [0; 4], true).unwrap())
    });
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(10);
    targets = counting, lattice, densities
}
criterion_main!(benches);
