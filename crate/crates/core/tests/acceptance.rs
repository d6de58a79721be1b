//! Acceptance suite: one line per criterion, nonzero exit on any failure.

use std::fs;
use std::panic::{self, AssertUnwindSafe};
use std::path::Path;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::Ratio;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use pfk_core::abelian::{abelianization, p_ab_dimension};
use pfk_core::fox::{fox_derivative, fundamental_identity_check, jacobian};
use pfk_core::homology::{betti_chain_within_cap, reidemeister_schreier, SubgroupData};
use pfk_core::magnus::{build_quotient_algebra, lcs_depth, magnus_embed, Depth, TruncSeries};
use pfk_core::modp::Echelon;
use pfk_core::parafree::{
    certified_cor823, certify_presentation, certify_splitting, check_baumslag_cleary, check_hnn,
    redundancy_condition, Bounds, Verdict,
};
use pfk_core::presentation::{free_product, parse, Family, Parsed, Presentation};
use pfk_core::pro_p::{evaluate, nth_root, one_relator_free_completion, solve_word_equation_from, PQuotElt};
use pfk_core::ring::Ring;
use pfk_core::words::{Letter, Word};

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn random_word(rng: &mut StdRng, rank: usize, max_len: usize) -> Word {
    let len = rng.random_range(0..=max_len);
    let letters = (0..len).map(|_| {
        let g = rng.random_range(0..rank);
        if rng.random_bool(0.5) {
            Letter::neg(g)
        } else {
            Letter::pos(g)
        }
    });
    Word::reduce(letters, rank).unwrap()
}

fn free(n: usize) -> Presentation {
    Family::Free(n).build().unwrap().presentation
}

fn corpus() -> Vec<(String, Presentation)> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus");
    let mut files: Vec<_> = fs::read_dir(&dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "gsp"))
        .collect();
    files.sort();
    files
        .into_iter()
        .map(|f| {
            let name = f.file_stem().unwrap().to_string_lossy().into_owned();
            let p = match parse(&fs::read_to_string(&f).unwrap()).unwrap() {
                Parsed::Presentation(p) => p,
                Parsed::Splitting(s) => s.realize().presentation,
                Parsed::Graph(g) => g.fundamental().presentation,
            };
            (name, p)
        })
        .collect()
}

/// All maps `F_n → (ℤ/q)^e`, as per-generator image vectors.
fn all_maps(n: usize, q: u64, e: usize) -> Vec<Vec<Vec<i64>>> {
    let size = (q as usize).pow(e as u32);
    let vec_of = |mut k: usize| -> Vec<i64> {
        (0..e)
            .map(|_| {
                let d = (k % q as usize) as i64;
                k /= q as usize;
                d
            })
            .collect()
    };
    let total = size.pow(n as u32);
    (0..total)
        .map(|mut code| {
            (0..n)
                .map(|_| {
                    let v = vec_of(code % size);
                    code /= size;
                    v
                })
                .collect()
        })
        .collect()
}

fn schreier_rank() -> Outcome {
    let mut checked = 0;
    for n in [2, 3] {
        let f = free(n);
        for (q, emax) in [(2u64, 4usize), (3, 2), (5, 1), (7, 1), (11, 1), (13, 1)] {
            for e in 1..=emax {
                for images in all_maps(n, q, e) {
                    let sub = SubgroupData::from_homomorphism(&f, &vec![q; e], &images).map_err(|x| x.to_string())?;
                    let k = sub.index();
                    let rs = reidemeister_schreier(&sub);
                    ensure!(rs.relators().is_empty(), "F{n} index {k}: {} relators", rs.relators().len());
                    ensure!(rs.rank() == k * (n - 1) + 1, "F{n} index {k}: rank {}", rs.rank());
                    checked += 1;
                }
            }
        }
    }
    Ok(format!("{checked} kernels, rank k(n-1)+1, no relators"))
}

fn free_betti() -> Outcome {
    let mut levels = 0;
    for n in [1usize, 2, 3] {
        for q in [2u64, 3] {
            let chain = betti_chain_within_cap(&free(n), q, 8).map_err(|e| e.to_string())?;
            for l in &chain.levels {
                let want = Ratio::from_integer(n as i64 - 1) + Ratio::new(1, l.index as i64);
                ensure!(l.ratio == want, "F{n} q={q} level {}: {} != {want}", l.level, l.ratio);
                levels += 1;
            }
        }
    }
    Ok(format!("{levels} levels equal (n-1) + 1/index"))
}

fn cor823() -> Outcome {
    let b = Bounds::default();
    let mut notes = Vec::new();
    let n223 = Family::N(2, 2, 3).build().unwrap().presentation;
    let k12 = Family::K(1, 2).build().unwrap().presentation;
    for p in [&n223, &k12] {
        let v = certify_presentation(p, &b).map_err(|e| e.to_string())?;
        ensure!(v.r_ab() == Some(2), "{}: {v}", p.name());
        let rep = certified_cor823(&v, p, 2, 2).map_err(|e| e.to_string())?.unwrap();
        ensure!(rep.levels.len() == 2, "{}: only {} levels", p.name(), rep.levels.len());
        let one = Ratio::from_integer(1);
        ensure!(rep.levels.iter().all(|l| l.ratio >= one), "{}: ratio below 1", p.name());
        ensure!(rep.non_increasing, "{}: ratios increase", p.name());
        let deepest = rep.levels.last().unwrap().ratio;
        ensure!(deepest <= Ratio::new(5, 4), "{}: deepest {deepest}", p.name());
        notes.push(format!("{} {}", p.name(), rep.levels.iter().map(|l| l.ratio.to_string()).collect::<Vec<_>>().join(",")));
    }
    let nz = free_product(&[n223.clone(), free(1)]).presentation;
    let v = certify_presentation(&nz, &b).map_err(|e| e.to_string())?;
    ensure!(v.r_ab() == Some(3), "N(2,2,3)*Z: {v}");
    let rep = certified_cor823(&v, &nz, 2, 2).map_err(|e| e.to_string())?.unwrap();
    let deepest = rep.levels.last().unwrap();
    let gap = (*deepest.ratio.numer() as f64 / *deepest.ratio.denom() as f64 - 2.0).abs();
    ensure!(gap <= 0.3, "N(2,2,3)*Z deepest {} off by {gap}", deepest.ratio);
    notes.push(format!("N(2,2,3)*Z {} at index {}", deepest.ratio, deepest.index));
    Ok(notes.join("; "))
}

fn abelian_table() -> Outcome {
    for g in 0..=5usize {
        let inv = abelianization(&Family::OrientableSurface(g).build().unwrap().presentation);
        ensure!(inv.free_rank == 2 * g && inv.torsion.is_empty(), "Sigma{g}: {inv}");
    }
    for g in 1..=5usize {
        let inv = abelianization(&Family::NonOrientableSurface(g).build().unwrap().presentation);
        ensure!(inv.free_rank == g && inv.torsion == vec![BigInt::from(2)], "S{g}: {inv}");
    }
    Ok("Sigma_g = Z^2g, S_g = Z^g x Z/2 for g <= 5".into())
}

fn verdicts() -> Outcome {
    let b = Bounds::default();
    let split = |f: Family| -> Result<Verdict, String> {
        let inst = f.build().map_err(|e| e.to_string())?;
        certify_splitting(inst.splitting.as_ref().unwrap(), &b).map_err(|e| e.to_string())
    };
    let mut count = 0;
    for (i, j) in [(1, 2), (2, 3), (3, 4)] {
        let v = split(Family::K(i, j))?;
        ensure!(v.r_ab() == Some(2), "K({i},{j}): {v}");
        count += 1;
    }
    for (p, q, r) in [(2, 2, 3), (2, 3, 5)] {
        let v = split(Family::N(p, q, r))?;
        ensure!(v.r_ab() == Some(2), "N({p},{q},{r}): {v}");
        count += 1;
    }
    for (n, m) in [(2, 3), (3, 4), (2, 5), (3, 2), (2, 2), (4, 6)] {
        match split(Family::BaumslagSolitar(n, m))? {
            Verdict::NotParafree { failed, .. } if failed.contains(&"factor-power".to_string()) => {}
            v => return Err(format!("B({n},{m}): {v}")),
        }
        count += 1;
    }
    match split(Family::BaumslagSolitar(1, 2))? {
        Verdict::Inconclusive { unresolved, bounds, .. } if unresolved == ["nilpotent-witness"] && bounds.dmax == 6 => {}
        v => return Err(format!("B(1,2): {v}")),
    }
    count += 1;
    for g in 1..=5 {
        let s = Family::NonOrientableSurface(g).build().unwrap().presentation;
        match certify_presentation(&s, &b).map_err(|e| e.to_string())? {
            Verdict::NotParafree { failed, .. } if failed == ["torsion"] => {}
            v => return Err(format!("S{g}: {v}")),
        }
        count += 1;
    }
    let f2 = Presentation::free(vec!["a", "b"]).unwrap();
    let v = check_hnn(&f2, &f2.word("a").unwrap(), &f2.word("b").unwrap(), &b).map_err(|e| e.to_string())?;
    ensure!(v.r_ab() == Some(2), "Hnn(F2, a, b): {v}");
    count += 1;
    Ok(format!("{count} verdicts match"))
}

fn all_words(rank: usize, max_len: usize) -> Vec<Word> {
    let mut out = vec![Word::identity(rank)];
    let mut frontier = vec![Word::identity(rank)];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &frontier {
            for g in 0..rank {
                for l in [Letter::pos(g), Letter::neg(g)] {
                    if w.letters().last() == Some(&l.inv()) {
                        continue;
                    }
                    let mut ls = w.letters().to_vec();
                    ls.push(l);
                    next.push(Word::reduce(ls, rank).unwrap());
                }
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

fn augmentation_matches(w: &Word) -> bool {
    (0..w.rank()).all(|s| fox_derivative(w, s).augmentation() == w.exponent_sum(s) as i128)
}

fn fox() -> Outcome {
    let words = all_words(3, 8);
    for w in &words {
        ensure!(fundamental_identity_check(w), "identity fails for {w:?}");
        ensure!(augmentation_matches(w), "augmentation fails for {w:?}");
    }
    let mut rng = StdRng::seed_from_u64(6);
    for _ in 0..10_000 {
        let w = random_word(&mut rng, 3, 40);
        ensure!(fundamental_identity_check(&w), "identity fails for {w:?}");
        ensure!(augmentation_matches(&w), "augmentation fails for {w:?}");
    }
    let mut entries = 0;
    for (name, p) in corpus() {
        for (r, row) in p.relators().iter().zip(jacobian(&p)) {
            for (s, d) in row.iter().enumerate() {
                ensure!(d.augmentation() == r.exponent_sum(s) as i128, "{name}: Jacobian entry ({s})");
                entries += 1;
            }
        }
    }
    Ok(format!("{} exhaustive + 10000 random words, {entries} Jacobian entries", words.len()))
}

/// Left-normed `[x_{i1}, …, x_{ik}]` with `i1 > i2 ≤ i3 ≤ … ≤ ik`.
fn basic_commutators(rank: usize, weight: usize) -> Vec<Word> {
    fn tails(start: usize, rank: usize, len: usize) -> Vec<Vec<usize>> {
        if len == 0 {
            return vec![vec![]];
        }
        (start..rank)
            .flat_map(|i| tails(i, rank, len - 1).into_iter().map(move |mut t| {
                t.insert(0, i);
                t
            }))
            .collect()
    }
    let mut out = Vec::new();
    for i1 in 0..rank {
        for i2 in 0..i1 {
            for tail in tails(i2, rank, weight - 2) {
                let mut c = Word::commutator(&Word::generator(i1, rank), &Word::generator(i2, rank));
                for &i in &tail {
                    c = Word::commutator(&c, &Word::generator(i, rank));
                }
                out.push(c);
            }
        }
    }
    out
}

fn magnus() -> Outcome {
    let mut comms = 0;
    ensure!(lcs_depth(&Word::generator(0, 3), 6).unwrap() == Depth::Exact(1), "weight 1");
    for k in 2..=6 {
        for c in basic_commutators(3, k) {
            let d = lcs_depth(&c, 6).map_err(|e| e.to_string())?;
            ensure!(d == Depth::Exact(k), "weight {k}: depth {d}");
            comms += 1;
        }
    }
    let mut rng = StdRng::seed_from_u64(7);
    let one = TruncSeries::one(Ring::Integers, 3, 6);
    for _ in 0..1000 {
        let w = random_word(&mut rng, 3, 16);
        let prod = magnus_embed(&w, 6, Ring::Integers).mul(&magnus_embed(&w.inverse(), 6, Ring::Integers)).unwrap();
        ensure!(prod == one, "M(w)M(w^-1) != 1 for {w:?}");
    }
    let mut slices = 0;
    for (name, p) in corpus() {
        for q in [2u64, 3] {
            let qa = build_quotient_algebra(&p, q, 2).map_err(|e| format!("{name}: {e}"))?;
            let mut a = Echelon::new(q, p.rank());
            for r in qa.degree_one_slice() {
                a.insert(r);
            }
            let mut b = Echelon::new(q, p.rank());
            for r in p.exponent_matrix() {
                b.insert(r.iter().map(|&x| x.rem_euclid(q as i64) as u32).collect());
            }
            ensure!(
                a.into_reduced().rows() == b.into_reduced().rows(),
                "{name} mod {q}: degree-one slice differs from relator rows"
            );
            slices += 1;
        }
    }
    Ok(format!("{comms} basic commutators, 1000 inverses, {slices} degree-one slices"))
}

fn solver() -> Outcome {
    let omega = parse_omega();
    let mut rng = StdRng::seed_from_u64(8);
    let d = 5;
    let mut solved = 0;
    for p in [2u64, 3] {
        for _ in 0..100 {
            let mut c = || loop {
                let w = random_word(&mut rng, 2, 12);
                if !w.is_identity() {
                    return PQuotElt::from_word(&w, p, d).unwrap();
                }
            };
            let cs = [c(), c()];
            let one = PQuotElt::one(p, 2, d).unwrap();
            let sol = solve_word_equation_from(&omega, &cs, &one).map_err(|e| e.to_string())?;
            ensure!(evaluate(&omega, &sol.x, &cs).unwrap().is_one(), "p={p}: substitution is not 1");
            let seed = PQuotElt::from_word(&random_word(&mut rng, 2, 10), p, d).unwrap();
            let other = solve_word_equation_from(&omega, &cs, &seed).map_err(|e| e.to_string())?;
            ensure!(other.x == sol.x, "p={p}: seed dependence");
            solved += 1;
        }
        for n in [2i64, 3, 5] {
            if n as u64 % p == 0 {
                continue;
            }
            for _ in 0..20 {
                let a = PQuotElt::from_word(&random_word(&mut rng, 2, 12), p, d).unwrap();
                let r = nth_root(&a, n).map_err(|e| e.to_string())?;
                ensure!(r.pow(n) == a, "p={p}: root of order {n} fails");
            }
        }
    }
    Ok(format!("{solved} equations solved at D = {d}, roots round-trip"))
}

fn parse_omega() -> Word {
    let f = Presentation::free(vec!["x1", "x2", "x3"]).unwrap();
    f.word("x1 [x2, x1] [x3, x2]").unwrap()
}

fn one_relator() -> Outcome {
    let n = Presentation::free(vec!["a", "b", "c"]).unwrap();
    let n = Presentation::new(vec!["a", "b", "c"], vec![n.word("a^2 b^2 c^3").unwrap()], "N").unwrap();
    for q in [2, 3, 5] {
        ensure!(one_relator_free_completion(&n, q).unwrap(), "a^2 b^2 c^3 at q={q}");
    }
    let f = Presentation::free(vec!["x", "y"]).unwrap();
    let c = Presentation::new(vec!["x", "y"], vec![f.word("[x, y]").unwrap()], "C").unwrap();
    for q in [2, 3, 5, 7] {
        ensure!(!one_relator_free_completion(&c, q).unwrap(), "[x,y] at q={q}");
    }
    Ok("a^2 b^2 c^3 free at q = 2, 3, 5; [x,y] never free for q <= 7".into())
}

fn redundancy() -> Outcome {
    let e = Presentation::free(vec!["s", "t"]).unwrap();
    let r = redundancy_condition(&e.word("[s, t]").unwrap(), 1).map_err(|e| e.to_string())?;
    ensure!(r.satisfied == [0], "[s,t] not satisfied on s");
    let twice = redundancy_condition(&e.word("s^2 t s^-2 t^-1").unwrap(), 1).map_err(|e| e.to_string())?;
    ensure!(twice.satisfied.is_empty(), "double occurrence accepted");
    let v = check_baumslag_cleary(1, 1, &e.word("[s, t]").unwrap(), &Word::identity(3), 0, &Bounds::default())
        .map_err(|e| e.to_string())?;
    ensure!(v.r_ab() == Some(2), "<a, s, t | a = [s,t]>: {v}");
    Ok("[s,t] satisfied, double occurrence rejected, <a,s,t | a = [s,t]> parafree".into())
}

fn rank_additivity() -> Outcome {
    let groups = corpus();
    let mut rng = StdRng::seed_from_u64(11);
    for _ in 0..50 {
        let (na, a) = &groups[rng.random_range(0..groups.len())];
        let (nb, b) = &groups[rng.random_range(0..groups.len())];
        let fp = free_product(&[a.clone(), b.clone()]).presentation;
        for q in [2, 3] {
            let sum = p_ab_dimension(a, q).unwrap() + p_ab_dimension(b, q).unwrap();
            ensure!(p_ab_dimension(&fp, q).unwrap() == sum, "{na} * {nb} at q={q}");
        }
    }
    Ok(format!("50 pairs from {} corpus groups, q = 2, 3", groups.len()))
}

fn main() -> ExitCode {
    let criteria: [(&str, u64, fn() -> Outcome); 11] = [
        ("schreier rank", 1, schreier_rank),
        ("free group L2 Betti chain", 10, free_betti),
        ("mod-2 chain desk check", 60, cor823),
        ("surface abelianizations", 1, abelian_table),
        ("verdict corpus", 120, verdicts),
        ("fox calculus", 30, fox),
        ("magnus properties", 30, magnus),
        ("pro-p solver", 30, solver),
        ("one-relator criterion", 1, one_relator),
        ("redundancy condition", 1, redundancy),
        ("rank additivity", 5, rank_additivity),
    ];
    let mut failures = 0;
    for (i, (name, budget, run)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let outcome = panic::catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|e| {
            let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(_) if elapsed > Duration::from_secs(budget) => Err(format!("over the {budget} s budget")),
            o => o,
        };
        let (tag, detail) = match &outcome {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failures += 1;
                ("FAIL", d)
            }
        };
        println!("criterion {:>2} {tag} {name} ({:.2} s): {detail}", i + 1, elapsed.as_secs_f64());
    }
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
