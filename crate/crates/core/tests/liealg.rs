use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wavesym::expr::Symbol;
use wavesym::liealg::{close_or_fail, flag_automorphism_solve, preserves, LieAlgebra, Subspace};
use wavesym::vecfield::{generators as gen, Space};
use wavesym::{int, rat, Chart, Expr, Rational, VectorField};

fn m_fields() -> Vec<(String, VectorField)> {
    vec![
        ("G(1)".into(), gen::g(&Expr::one())),
        ("F1".into(), gen::f1()),
        ("F2".into(), gen::f2()),
        ("Pt".into(), gen::pt()),
        ("Dt".into(), gen::dt()),
    ]
}

fn m() -> LieAlgebra {
    close_or_fail(&m_fields()).unwrap().algebra
}

fn coord(n: usize, idx: &[usize]) -> Subspace {
    Subspace::coordinate(n, idx)
}

#[test]
fn closure_examples() {
    let c = close_or_fail(&[
        ("Pt".into(), gen::pt()),
        ("F1".into(), gen::f1()),
        ("G(1)".into(), gen::g(&Expr::one())),
    ])
    .unwrap();
    let a = c.algebra;
    assert!(a.is_nilpotent());
    assert_eq!(a.bracket(&[int(1), int(0), int(0)], &[int(0), int(1), int(0)]), vec![int(0), int(0), int(1)]);

    let chart = Chart::base();
    let f = |s: &str| VectorField::parse(s, Space::Base, &chart).unwrap();
    let k = close_or_fail(&[("dt".into(), f("1@t")), ("du".into(), f("1@u")), ("tdu".into(), f("t@u"))]).unwrap();
    let h = k.algebra;
    assert!(h.is_nilpotent());
    assert_eq!(h.center().dim(), 1);
    assert_eq!(h.derived_series()[1].dim(), 1);

    let ab = close_or_fail(&[("Dt".into(), f("t@t")), ("D(1)".into(), f("1@x"))]).unwrap();
    assert_eq!(ab.algebra.center().dim(), 2);

    let err = close_or_fail(&[("a".into(), f("1@x")), ("b".into(), f("x^2@x"))]).unwrap_err();
    assert!(err.to_string().contains("leaves the span"));

    let pr = close_or_fail(&[("a".into(), f("1@x")), ("b".into(), f("2@x"))]).unwrap();
    assert_eq!(pr.pruned, vec!["b".to_string()]);
}

#[test]
fn megaideal_chain_of_m() {
    let a = m();
    let ds = a.derived_series();
    assert!(ds[1].same(&coord(5, &[0, 1, 2, 3])));
    assert!(ds[2].same(&coord(5, &[0, 1])));
    assert!(a.center().same(&coord(5, &[0])));
    assert!(a.centralizer(&ds[2]).same(&coord(5, &[0, 1, 2])));
    assert!(a.radical().unwrap().same(&a.whole()));
    assert!(a.is_solvable());
    for s in &ds {
        assert!(a.is_ideal(s));
    }
}

#[test]
fn radical_fixtures() {
    let sl2 = LieAlgebra::from_brackets(
        vec!["h".into(), "e".into(), "f".into()],
        &[(0, 1, 1, int(2)), (0, 2, 2, int(-2)), (1, 2, 0, int(1))],
    )
    .unwrap();
    assert_eq!(sl2.radical().unwrap().dim(), 0);
    let heis = LieAlgebra::from_brackets(vec!["p".into(), "q".into(), "z".into()], &[(0, 1, 2, int(1))]).unwrap();
    assert_eq!(heis.radical().unwrap().dim(), 3);
    let ab = LieAlgebra::<Rational>::from_brackets(vec!["a".into(), "b".into()], &[]).unwrap();
    assert_eq!(ab.center().dim(), 2);
}

#[test]
fn invalid_tables() {
    let bad = LieAlgebra::from_brackets(
        vec!["a".into(), "b".into(), "c".into()],
        &[(0, 1, 2, int(1)), (1, 2, 0, int(1)), (0, 2, 2, int(-1))],
    );
    assert!(bad.is_err());
    assert!(LieAlgebra::from_table("1 2 3\n").is_err());
    assert!(LieAlgebra::from_table("1 1 2 1\n").is_err());
}

#[test]
fn table_round_trip() {
    let a = m();
    let t = a.to_table();
    let b = LieAlgebra::from_table(&t).unwrap();
    assert_eq!(a, b);
    let c = LieAlgebra::from_table("# heisenberg\n1 2 3 1\n").unwrap();
    assert_eq!(c.dim(), 3);
    assert_eq!(c.constant(1, 0, 2), &int(-1));
}

fn flag_m() -> Vec<Subspace> {
    [vec![0], vec![0, 1], vec![0, 1, 2], vec![0, 1, 2, 3], vec![0, 1, 2, 3, 4]].iter().map(|s| coord(5, s)).collect()
}

#[test]
fn automorphisms_of_m() {
    let a = m();
    let fam = flag_automorphism_solve(&a, &flag_m()).unwrap();
    assert!(fam.unresolved.is_empty(), "unresolved: {:?}", fam.unresolved);
    let s = |n: &str| Expr::sym(&Symbol::param(n));
    assert!(fam.implies(&s("a55"), &Expr::one()));
    assert!(fam.implies(&s("a34"), &Expr::zero()));
    assert!(fam.implies(&s("a24"), &(s("a44") * s("a35"))));
    assert!(fam.implies(&s("a14"), &(s("a44") * s("a25") - s("a45") * s("a24"))));
    assert!(fam.invariant.contains(&vec![0, 1, 3]));

    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..20 {
        let mut vals = BTreeMap::new();
        for v in &fam.free {
            let mut k = rng.gen_range(-9i64..=9);
            if k == 0 && fam.nonzero.contains(v) {
                k = 1;
            }
            vals.insert(v.clone(), rat(k, rng.gen_range(1..=5)));
        }
        let mat = fam.instantiate(&vals).unwrap();
        assert!(preserves(&a, &mat));
    }
}

#[test]
fn abelian_automorphisms_are_unconstrained() {
    let ab = LieAlgebra::<Rational>::from_brackets(vec!["a".into(), "b".into()], &[]).unwrap();
    let fam = flag_automorphism_solve(&ab, &[Subspace::whole(2)]).unwrap();
    assert!(fam.solved.is_empty());
    assert!(fam.unresolved.is_empty());
    assert_eq!(fam.free.len(), 4);
}
