use criterion::{black_box, criterion_group, criterion_main, BatchSize, Criterion};
use qhilb::gw_engine::{Engine, EngineConfig};
use qhilb::hyperelliptic::{hyperelliptic_table, HyperellipticQuery};
use qhilb::relation::standard_relations;
use qhilb::{chow, Chow, CurveClass, SmallQuantum};

fn engine(c_max: u32) -> Engine {
    Engine::new(EngineConfig { c_max, ..Default::default() })
}

fn classical(c: &mut Criterion) {
    c.bench_function("cup table from relations", |b| {
        b.iter(|| Chow::from_relations_shuffled(&standard_relations(), black_box(1)).unwrap())
    });
    c.bench_function("cup of basis pair", |b| b.iter(|| chow().cup_basis(black_box(4), black_box(7))));
}

fn invariants(c: &mut Criterion) {
    let mut g = c.benchmark_group("cold invariant");
    g.sample_size(10);
    g.bench_function("<T12 T13>_(1,1,2)", |b| {
        b.iter_batched(
            || engine(2),
            |e| e.invariant(CurveClass::new(1, 1, 2), &[12, 13]).unwrap(),
            BatchSize::PerIteration,
        )
    });
    g.bench_function("two-point table, c_max 2", |b| {
        b.iter_batched(|| engine(2), |e| e.derive_two_point_table().unwrap(), BatchSize::PerIteration)
    });
    g.finish();
}

fn products(c: &mut Criterion) {
    let mut g = c.benchmark_group("quantum");
    g.sample_size(10);
    g.bench_function("T4*T4, c_max 4", |b| {
        b.iter_batched(
            || engine(4),
            |e| SmallQuantum::new(&e).basis_product(4, 4).unwrap(),
            BatchSize::PerIteration,
        )
    });
    let rels = standard_relations();
    g.bench_function("verify all relations, c_max 2", |b| {
        b.iter_batched(
            || engine(2),
            |e| {
                let qh = SmallQuantum::new(&e);
                rels.iter().map(|r| qh.verify_relation(r).unwrap().is_zero()).filter(|&z| z).count()
            },
            BatchSize::PerIteration,
        )
    });
    g.finish();
}

fn hyper(c: &mut Criterion) {
    let mut g = c.benchmark_group("hyperelliptic");
    g.sample_size(10);
    let q = HyperellipticQuery::new(2, 2, 2).unwrap();
    g.bench_function("(2,2), l = 2", |b| {
        b.iter_batched(|| engine(6), |e| hyperelliptic_table(&e, &q, 0).unwrap(), BatchSize::PerIteration)
    });
    g.finish();
}

criterion_group!(benches, classical, invariants, products, hyper);
criterion_main!(benches);
