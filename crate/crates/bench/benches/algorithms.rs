use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use pfk_core::abelian::abelianization;
use pfk_core::fox::jacobian;
use pfk_core::homology::{betti_chain_estimate, p_ab_kernel, reidemeister_schreier};
use pfk_core::magnus::{build_quotient_algebra, magnus_embed};
use pfk_core::parafree::{certify_splitting, Bounds};
use pfk_core::presentation::{Family, Presentation};
use pfk_core::pro_p::{solve_word_equation, PQuotElt};
use pfk_core::ring::Ring;

fn build(f: Family) -> Presentation {
    f.build().unwrap().presentation
}

fn words(c: &mut Criterion) {
    let p = Presentation::free(vec!["x", "y"]).unwrap();
    let w = p.word("[[x, y], [x^2, y^-1]]^5").unwrap();
    c.bench_function("magnus_embed degree 8", |b| {
        b.iter(|| magnus_embed(black_box(&w), 8, Ring::Integers))
    });
    let s = build(Family::OrientableSurface(4));
    c.bench_function("fox jacobian genus 4", |b| b.iter(|| jacobian(black_box(&s))));
    c.bench_function("abelianization genus 4", |b| b.iter(|| abelianization(black_box(&s))));
}

fn homology(c: &mut Criterion) {
    let n = build(Family::N(2, 2, 3));
    c.bench_function("kernel and rewrite N(2,2,3) q=2", |b| {
        b.iter(|| reidemeister_schreier(&p_ab_kernel(black_box(&n), 2).unwrap()))
    });
    c.bench_function("chain F2 q=2 two levels", |b| {
        let f2 = build(Family::Free(2));
        b.iter(|| betti_chain_estimate(black_box(&f2), 2, 2).unwrap())
    });
}

fn pro_p(c: &mut Criterion) {
    let p = Presentation::free(vec!["x", "y", "z"]).unwrap();
    let omega = p.word("x [y, x] [z, y]").unwrap();
    let cs = [PQuotElt::gen(1, 3, 3, 5).unwrap(), PQuotElt::gen(2, 3, 3, 5).unwrap()];
    c.bench_function("solve word equation p=3 D=5", |b| {
        b.iter(|| solve_word_equation(black_box(&omega), &cs).unwrap())
    });
    let bs = build(Family::BaumslagSolitar(1, 2));
    c.bench_function("quotient algebra B(1,2) q=2 D=4", |b| {
        b.iter(|| build_quotient_algebra(black_box(&bs), 2, 4).unwrap())
    });
}

fn verdicts(c: &mut Criterion) {
    let bounds = Bounds::default();
    let k = Family::K(3, 4).build().unwrap().splitting.unwrap();
    c.bench_function("certify K(3,4)", |b| b.iter(|| certify_splitting(black_box(&k), &bounds).unwrap()));
    let bs = Family::BaumslagSolitar(1, 2).build().unwrap().splitting.unwrap();
    let mut g = c.benchmark_group("slow");
    g.sample_size(10);
    g.bench_function("certify B(1,2)", |b| b.iter(|| certify_splitting(black_box(&bs), &bounds).unwrap()));
    g.finish();
}

criterion_group!(benches, words, homology, pro_p, verdicts);
criterion_main!(benches);
