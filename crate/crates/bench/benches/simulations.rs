use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use endmark::divide::{decide_det, materialize_dfa};
use endmark::fixtures;
use endmark::graph::onfa_decide;
use endmark::oracle;
use endmark::reach::ReachController;
use endmark::svfa::{svfa_decide, DEFAULT_BUDGET};
use endmark_bench::{machines, word_of_a};

fn by_word_length(c: &mut Criterion) {
    let e1 = fixtures::e1();
    let mut group = c.benchmark_group("e1");
    for len in [0, 4, 16, 64] {
        let w = word_of_a(len);
        group.bench_with_input(BenchmarkId::new("oracle", len), &w, |b, w| {
            b.iter(|| oracle::accepts(&e1, black_box(w)).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("divide", len), &w, |b, w| {
            b.iter(|| decide_det(&e1, black_box(w)).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("gap", len), &w, |b, w| {
            b.iter(|| onfa_decide(&e1, black_box(w)).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("svfa", len), &w, |b, w| {
            b.iter(|| svfa_decide(&e1, black_box(w), DEFAULT_BUDGET).unwrap())
        });
    }
    group.finish();
}

fn controller(c: &mut Criterion) {
    let corpus = machines(20);
    let w = word_of_a(8);
    c.bench_function("reach/all-pairs", |b| {
        b.iter(|| {
            let mut hits = 0;
            for a in &corpus {
                let ctl = ReachController::new(a).unwrap();
                for p in a.states() {
                    for q in a.states() {
                        hits += usize::from(ctl.reach(&w, p, q));
                    }
                }
            }
            hits
        })
    });
}

fn materialize(c: &mut Criterion) {
    let ea = fixtures::ea();
    c.bench_function("materialize/ea", |b| {
        b.iter(|| materialize_dfa(black_box(&ea), 1 << 20).unwrap())
    });
}

criterion_group!(benches, by_word_length, controller, materialize);
criterion_main!(benches);
