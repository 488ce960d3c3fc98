use std::f64::consts::PI;

use criterion::{black_box, criterion_group, criterion_main, Criterion};

use wigner_qkd::{
    grid_scan, refine, run_session, security_report, sift, wtilde_eve_integrand, Angle,
    AttackDistribution, AttackObjective, ProtocolConfig, ProtocolVariant, SourceModel,
};

fn counterexample() -> SourceModel {
    SourceModel::ProductAttack(AttackDistribution::point(
        Angle::new(0.6 * PI).unwrap(),
        Angle::new(0.4 * PI).unwrap(),
    ))
}

fn bench_closed_form(c: &mut Criterion) {
    let source = counterexample();
    c.bench_function("security_report/point_attack", |b| {
        b.iter(|| security_report(black_box(&source), ProtocolVariant::Extended9))
    });
    c.bench_function("wtilde_eve_integrand", |b| {
        let (pa, pb) = (Angle::new(1.5).unwrap(), Angle::new(0.1).unwrap());
        b.iter(|| wtilde_eve_integrand(black_box(pa), black_box(pb)))
    });
}

fn bench_search(c: &mut Criterion) {
    let mut group = c.benchmark_group("search");
    group.sample_size(20);
    group.bench_function("grid_scan/180", |b| {
        b.iter(|| grid_scan(|x, y| AttackObjective::WTilde.eval(x, y), black_box(180)).unwrap())
    });
    group.bench_function("refine/wtilde", |b| {
        let start = (Angle::new(1.49).unwrap(), Angle::new(0.08).unwrap());
        b.iter(|| {
            refine(
                |x, y| AttackObjective::WTilde.eval(x, y),
                black_box(start),
                1e-10,
            )
            .unwrap()
        })
    });
    group.finish();
}

fn bench_session(c: &mut Criterion) {
    let mut group = c.benchmark_group("session");
    group.sample_size(20);
    let config =
        ProtocolConfig::new(ProtocolVariant::Extended9, 10_000, 42).with_sacrifice_fraction(0.5);
    group.bench_function("run_session/10k", |b| {
        b.iter(|| run_session(black_box(&config), &SourceModel::Singlet).unwrap())
    });
    let records = run_session(&config, &SourceModel::Singlet).unwrap();
    group.bench_function("sift/10k", |b| {
        b.iter(|| sift(black_box(&records), &config).unwrap())
    });
    group.finish();
}

criterion_group!(benches, bench_closed_form, bench_search, bench_session);
criterion_main!(benches);
