//! Frozen values computed by hand or by an independent system.

use num_bigint::BigInt;
use num_rational::Ratio;

use pfk_core::abelian::{abelianization, p_ab_dimension, snf, IntMat};
use pfk_core::fox::{fox_derivative, swan_boundary_data};
use pfk_core::homology::{betti_chain_estimate, euler_cover_check, l2_betti_closed_form};
use pfk_core::magnus::{lcs_depth, magnus_embed, Depth};
use pfk_core::parafree::{certify_splitting, Bounds, Verdict};
use pfk_core::presentation::{parse, Family, Parsed, Presentation};
use pfk_core::pro_p::{solve_word_equation, PQuotElt};
use pfk_core::ring::Ring;

fn build(f: Family) -> Presentation {
    f.build().unwrap().presentation
}

fn ints(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

#[test]
fn smith_normal_forms() {
    let cases: [(&[Vec<i64>], usize, &[i64]); 4] = [
        (&[vec![2, 4], vec![6, 8]], 2, &[2, 4]),
        (&[vec![2, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]], 3, &[2, 6, 12]),
        (&[vec![4, 6]], 2, &[2]),
        (&[vec![3, 0], vec![0, 5]], 2, &[1, 15]),
    ];
    for (rows, cols, want) in cases {
        assert_eq!(snf(&IntMat::from_rows(rows, cols)).factors, ints(want), "{rows:?}");
    }
}

#[test]
fn abelianizations() {
    let cases = [
        (Family::Free(3), "Z^3"),
        (Family::OrientableSurface(2), "Z^4"),
        (Family::NonOrientableSurface(1), "Z x Z/2"),
        (Family::NonOrientableSurface(3), "Z^3 x Z/2"),
        (Family::BaumslagSolitar(2, 3), "Z"),
        (Family::BaumslagSolitar(2, 4), "Z x Z/2"),
        (Family::BaumslagSolitar(3, 9), "Z x Z/6"),
        (Family::N(2, 2, 3), "Z^2"),
        (Family::N(4, 6, 9), "Z^2"),
        (Family::K(1, 2), "Z^2"),
    ];
    for (f, want) in cases {
        assert_eq!(abelianization(&build(f)).to_string(), want, "{f:?}");
    }
}

#[test]
fn mod_q_dimensions() {
    let n = build(Family::N(2, 2, 3));
    assert_eq!(p_ab_dimension(&n, 2).unwrap(), 2);
    assert_eq!(p_ab_dimension(&n, 3).unwrap(), 2);
    assert_eq!(p_ab_dimension(&n, 5).unwrap(), 2);
    let bs = build(Family::BaumslagSolitar(1, 3));
    assert_eq!(p_ab_dimension(&bs, 2).unwrap(), 2);
    assert_eq!(p_ab_dimension(&bs, 3).unwrap(), 1);
}

#[test]
fn fox_derivatives() {
    let names = ["x", "y"];
    let p = Presentation::free(names.to_vec()).unwrap();
    let c = p.word("[x, y]").unwrap();
    assert_eq!(fox_derivative(&c, 0).display(&names).to_string(), "-x^-1 + x^-1 y^-1");
    assert_eq!(fox_derivative(&c, 1).display(&names).to_string(), "-x^-1 y^-1 + x^-1 y^-1 x");
    let w = p.word("x^3").unwrap();
    assert_eq!(fox_derivative(&w, 0).display(&names).to_string(), "1 + x + x^2");
    let w = p.word("x^-2").unwrap();
    assert_eq!(fox_derivative(&w, 0).display(&names).to_string(), "-x^-1 - x^-2");
}

#[test]
fn swan_pair() {
    let spec = Family::BaumslagSolitar(1, 2).build().unwrap().splitting.unwrap();
    let d = swan_boundary_data(&spec, 2, 4).unwrap();
    let names = d.presentation.names().to_vec();
    assert_eq!(d.pair.0.display(&names).to_string(), "-1 + x^2 + y - y x");
}

#[test]
fn magnus_series() {
    let names = ["x", "y"];
    let p = Presentation::free(names.to_vec()).unwrap();
    let show = |text: &str, d: usize| {
        let w = p.word(text).unwrap();
        magnus_embed(&w, d, Ring::Integers).display(&["X", "Y"]).to_string()
    };
    assert_eq!(show("[x, y]", 2), "1 + X Y - Y X");
    assert_eq!(show("x^-1", 3), "1 - X + X X - X X X");
    assert_eq!(show("x^2", 3), "1 + 2 X + X X");
    assert_eq!(show("x y", 2), "1 + X + Y + X Y");

    let depth = |text: &str| lcs_depth(&p.word(text).unwrap(), 6).unwrap();
    assert_eq!(depth("x"), Depth::Exact(1));
    assert_eq!(depth("[x, y]"), Depth::Exact(2));
    assert_eq!(depth("[[x, y], x]"), Depth::Exact(3));
    assert_eq!(depth("[[[x, y], y], x]"), Depth::Exact(4));
}

#[test]
fn pro_p_solution() {
    let p = Presentation::free(vec!["x", "y", "z"]).unwrap();
    let omega = p.word("x [y, x] [z, y]").unwrap();
    let y = PQuotElt::gen(1, 3, 3, 2).unwrap();
    let z = PQuotElt::gen(2, 3, 3, 2).unwrap();
    let x = solve_word_equation(&omega, &[y, z]).unwrap();
    assert_eq!(x.display(&["X", "Y", "Z"]).to_string(), "1 + Y Z + 2 Z Y");
}

#[test]
fn chain_ratios() {
    let ratios = |p: &Presentation, q: u64, levels: usize| -> Vec<(u64, Ratio<i64>)> {
        let c = betti_chain_estimate(p, q, levels).unwrap();
        c.levels.iter().map(|l| (l.index, l.ratio)).collect()
    };
    let r = |a, b| Ratio::new(a, b);
    let f2 = build(Family::Free(2));
    assert_eq!(ratios(&f2, 2, 2), [(4, r(5, 4)), (128, r(129, 128))]);
    assert_eq!(ratios(&f2, 3, 1), [(9, r(10, 9))]);
    assert_eq!(ratios(&build(Family::Free(3)), 2, 1), [(8, r(17, 8))]);
    assert_eq!(ratios(&build(Family::N(2, 2, 3)), 2, 2), [(4, r(5, 4)), (128, r(129, 128))]);
    assert_eq!(ratios(&build(Family::K(1, 2)), 2, 2), [(4, r(5, 4)), (128, r(129, 128))]);

    let nz = match parse("< a, b, c, d | a^2 b^2 c^3 >").unwrap() {
        Parsed::Presentation(p) => p,
        other => panic!("{other:?}"),
    };
    assert_eq!(ratios(&nz, 2, 1), [(8, r(17, 8))]);
}

#[test]
fn l2_values() {
    let cases = [
        (Family::Free(1), 0),
        (Family::Free(4), 3),
        (Family::OrientableSurface(3), 4),
        (Family::NonOrientableSurface(2), 1),
    ];
    for (f, want) in cases {
        assert_eq!(l2_betti_closed_form(&f).unwrap(), Ratio::from_integer(want), "{f:?}");
    }
}

#[test]
fn surface_covers() {
    let r = euler_cover_check(&Family::OrientableSurface(2), 3).unwrap();
    assert_eq!((r.index, r.euler, r.genus, r.orientable), (3, -6, Some(4), Some(true)));
    assert_eq!(r.cover_abelianization.to_string(), "Z^8");
    let r = euler_cover_check(&Family::NonOrientableSurface(2), 2).unwrap();
    assert_eq!((r.index, r.euler), (2, -2));
    assert!(r.consistent);
}

#[test]
fn splitting_verdicts() {
    let b = Bounds::default();
    let verdict = |f: Family| certify_splitting(&f.build().unwrap().splitting.unwrap(), &b).unwrap();
    for f in [Family::K(1, 2), Family::K(3, 4), Family::N(2, 2, 3), Family::N(2, 3, 5)] {
        let v = verdict(f);
        assert!(v.is_parafree(), "{f:?}: {v}");
        assert_eq!(v.r_ab(), Some(2), "{f:?}");
    }
    match verdict(Family::BaumslagSolitar(2, 3)) {
        Verdict::NotParafree { failed, .. } => assert_eq!(failed, ["factor-power"]),
        v => panic!("{v}"),
    }
    match verdict(Family::BaumslagSolitar(1, 2)) {
        Verdict::Inconclusive { unresolved, .. } => assert_eq!(unresolved, ["nilpotent-witness"]),
        v => panic!("{v}"),
    }
}
