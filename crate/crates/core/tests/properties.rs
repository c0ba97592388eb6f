mod common;

use std::collections::BTreeMap;

use common::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wavesym::detsys::{check_symmetry, solve_within_ansatz, AnsatzBasis};
use wavesym::expr::{diff, eval, normalize, symbols, Symbol};
use wavesym::vecfield::Space;
use wavesym::{rat, Chart, Expr, VectorField};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn cases(n: u32) -> ProptestConfig {
    ProptestConfig { cases: n, failure_persistence: None, ..ProptestConfig::default() }
}

proptest! {
    #![proptest_config(cases(200))]

    #[test]
    fn jacobi_identity(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (a, b, c) = (base_field(&mut r), base_field(&mut r), base_field(&mut r));
        prop_assert!(jacobi(&a, &b, &c).is_zero());
    }

    #[test]
    fn bracket_is_antisymmetric(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (a, b) = (base_field(&mut r), base_field(&mut r));
        prop_assert!(a.bracket(&b).unwrap().add(&b.bracket(&a).unwrap()).unwrap().is_zero());
    }

    #[test]
    fn total_derivatives_commute(seed in any::<u64>()) {
        let e = jet_expr(&mut rng(seed));
        prop_assert!(dtdx_defect(&e).is_zero(), "{}", e);
    }

    #[test]
    fn mixed_partials_commute(seed in any::<u64>()) {
        let mut r = rng(seed);
        let e = tree(&mut r, 3);
        let vars = [Symbol::t(), Symbol::x(), Symbol::u(), Symbol::jet(0, 1)];
        let (a, b) = (&vars[r.gen_range(0..4)], &vars[r.gen_range(0..4)]);
        prop_assert_eq!(diff(&diff(&e, a), b), diff(&diff(&e, b), a));
    }

    #[test]
    fn leibniz_rule(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (a, b) = (tree(&mut r, 2), tree(&mut r, 2));
        let s = Symbol::x();
        let d = diff(&(&a * &b), &s) - (diff(&a, &s) * &b + &a * diff(&b, &s));
        prop_assert!(vanishes(&d), "{}", d);
    }

    #[test]
    fn algebra_elements_are_antisymmetric(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (a, b) = (algebra_element(&mut r), algebra_element(&mut r));
        let s = a.bracket(&b).unwrap().add(&b.bracket(&a).unwrap()).unwrap();
        prop_assert!(s.is_zero());
    }
}

proptest! {
    #![proptest_config(cases(100))]

    #[test]
    fn prolongation_is_a_homomorphism(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (q1, q2) = (fiber_field(&mut r), fiber_field(&mut r));
        prop_assert!(prolongation_defect(&q1, &q2).is_zero());
    }

    #[test]
    fn prolongation_is_linear(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (q1, q2) = (fiber_field(&mut r), fiber_field(&mut r));
        let k = coef(&mut r);
        let sum = q1.scale(&k).add(&q2).unwrap();
        let p = |q: &VectorField| wavesym::vecfield::prolong2(q).unwrap().to_field();
        let d = p(&sum).sub(&p(&q1).scale(&k).add(&p(&q2)).unwrap()).unwrap();
        prop_assert!(d.is_zero());
    }

    #[test]
    fn normalize_is_idempotent_and_preserves_values(seed in any::<u64>()) {
        let mut r = rng(seed);
        let e = tree(&mut r, 3);
        let n = normalize(&e);
        prop_assert_eq!(normalize(&n), n.clone());
        let vars: Vec<Symbol> = symbols(&e).into_iter().collect();
        let mut checked = 0;
        for _ in 0..100 {
            let point: BTreeMap<Symbol, _> =
                vars.iter().map(|s| (s.clone(), rat(r.gen_range(-20..=20), r.gen_range(1..=7)))).collect();
            if let (Ok(a), Ok(b)) = (eval(&e, &point), eval(&n, &point)) {
                prop_assert_eq!(a, b);
                checked += 1;
            }
        }
        prop_assert!(checked > 0 || vars.is_empty());
    }
}

proptest! {
    #![proptest_config(cases(50))]

    #[test]
    fn pushforward_is_functorial(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (a, b) = (equiv_params(&mut r), equiv_params(&mut r));
        let v = algebra_element(&mut r);
        prop_assert!(functoriality_holds(&a, &b, &v));
    }
}

proptest! {
    #![proptest_config(cases(20))]

    #[test]
    fn kernel_is_always_admitted(seed in any::<u64>()) {
        let (f, g) = class_sample(&mut rng(seed));
        for q in ["1@t", "1@u", "t@u"] {
            let q = VectorField::parse(q, Space::Base, &Chart::base()).unwrap();
            let chk = check_symmetry(&f, &g, &q).unwrap();
            prop_assert!(chk.passed(), "{} / {}: {}", f, g, chk.residual);
        }
    }
}

proptest! {
    #![proptest_config(cases(6))]

    #[test]
    fn ansatz_dimension_grows_with_the_basis(seed in any::<u64>(), cut in 1usize..4) {
        let mut r = rng(seed);
        let ux = Expr::sym(&Symbol::jet(0, 1));
        let f = ux.powi(-r.gen_range(1..=4)).scale(&rat(r.gen_range(1..=3), 1));
        let full = AnsatzBasis::default();
        let mut small = full.clone();
        small.xi.truncate(small.xi.len() - cut);
        small.eta.truncate(small.eta.len() - cut);
        let big = solve_within_ansatz(&f, &Expr::zero(), &full).unwrap();
        let less = solve_within_ansatz(&f, &Expr::zero(), &small).unwrap();
        prop_assert!(less.dimension <= big.dimension);
        for q in &big.fields {
            prop_assert!(check_symmetry(&f, &Expr::zero(), q).unwrap().passed(), "{:?}", q);
        }
    }
}
