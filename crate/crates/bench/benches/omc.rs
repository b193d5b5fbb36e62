use std::sync::Arc;

use criterion::{criterion_group, criterion_main, Criterion};
use omc_core::cyl_laws::{cylinder_laws, LawConfig};
use omc_core::equivalence::{is_weak_equivalence, EqvTable};
use omc_core::fixtures;
use omc_core::functor::Functor;
use omc_core::gamma::gamma;
use omc_core::gluing::charweq;
use omc_core::modelcheck::is_immersion;
use omc_core::polygraph::{globe, globe_polygraph, pushout_polygraph, PolyMorphism};
use omc_core::presentation::{interval_presentation, present};
use omc_core::random::random_categories;
use omc_core::search::enumerate_functors;

fn bench_gamma(c: &mut Criterion) {
    let g2 = Arc::new(globe(2));
    c.bench_function("gamma globe(2)", |b| b.iter(|| gamma(g2.clone()).unwrap()));
    let iso = Arc::new(fixtures::interval_iso());
    c.bench_function("eqv table interval", |b| b.iter(|| EqvTable::new(iso.clone())));
}

fn bench_checks(c: &mut Criterion) {
    let iso = Arc::new(fixtures::interval_iso());
    let point = Functor::constant(Arc::new(fixtures::terminal()), iso.clone(), iso.cell(0, "a").unwrap());
    c.bench_function("is_weak_equivalence point → interval", |b| b.iter(|| is_weak_equivalence(&point)));
    c.bench_function("charweq point → interval", |b| b.iter(|| charweq(&point).unwrap()));
    c.bench_function("is_immersion point → interval", |b| b.iter(|| is_immersion(&point).unwrap()));
    let g2 = Arc::new(globe(2));
    c.bench_function("enumerate endofunctors globe(2)", |b| b.iter(|| enumerate_functors(g2.clone(), g2.clone(), 10_000).unwrap()));
}

fn bench_polygraphs(c: &mut Criterion) {
    let p = Arc::new(interval_presentation());
    c.bench_function("present interval", |b| b.iter(|| present(p.clone()).unwrap()));
    let bd = Arc::new(globe_polygraph(3, false).unwrap());
    let top = Arc::new(globe_polygraph(3, true).unwrap());
    let i = PolyMorphism::by_ids(bd, top).unwrap();
    c.bench_function("pushout boundary 3", |b| b.iter(|| pushout_polygraph(&i, &i).unwrap()));
}

fn bench_laws(c: &mut Criterion) {
    let cats = random_categories(1, 10, 12, 3).unwrap();
    let cfg = LawConfig { per_law: 50, ..LawConfig::default() };
    c.bench_function("cylinder laws on 10 random categories", |b| {
        b.iter(|| {
            for (_, x) in &cats {
                cylinder_laws(x.clone(), cfg).unwrap();
            }
        })
    });
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(20);
    targets = bench_gamma, bench_checks, bench_polygraphs, bench_laws
}
criterion_main!(benches);
