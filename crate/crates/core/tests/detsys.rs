use wavesym::detsys::{
    check_symmetry, generate_determining_system, invariance_residual, simplified_violations, solve_within_ansatz,
    union_residuals, AnsatzBasis, ClassSpec, Stage,
};
use wavesym::expr::{diff, is_zero, Symbol};
use wavesym::liealg::{express, unit};
use wavesym::vecfield::Space;
use wavesym::{Chart, Expr, VectorField};

fn c() -> Chart {
    Chart::base()
}

fn p(s: &str) -> Expr {
    c().parse(s).unwrap_or_else(|e| panic!("{s}: {e}"))
}

fn field(s: &str) -> VectorField {
    VectorField::parse(s, Space::Base, &c()).unwrap()
}

fn zero(e: &Expr) -> bool {
    is_zero(e).is_zero()
}

/// `a = k b` for one of a few small constants.
fn proportional(a: &Expr, b: &Expr) -> bool {
    [1, -1, 2, -2].iter().any(|&k| zero(&(a - b.scale(&wavesym::int(k)))))
}

#[test]
fn kernel_residuals_vanish_for_symbolic_class() {
    let spec = ClassSpec::symbolic();
    for q in ["1@t", "1@u", "t@u"] {
        let r = invariance_residual(&spec, &field(q)).unwrap();
        assert!(r.is_zero(), "{q}: {r}");
    }
}

#[test]
fn shift_in_x_is_not_a_symmetry_of_x_dependent_equation() {
    let f = p("exp(2*x)*F(u_x)");
    let r = invariance_residual(&ClassSpec::new(f, Expr::zero()), &field("1@x")).unwrap();
    assert!(zero(&(r - p("-2*exp(2*x)*F(u_x)*u_xx"))));
    let chk = check_symmetry(&p("exp(2*x)"), &Expr::zero(), &field("1@x")).unwrap();
    assert!(!chk.passed());
}

fn rows() -> (Expr, Expr, Expr, Expr, Expr, Expr, Expr) {
    let ch = c();
    let (t, x, u, ux) = (Symbol::t(), Symbol::x(), Symbol::u(), Symbol::jet(0, 1));
    let d = |e: &Expr, vs: &[&Symbol]| vs.iter().fold(e.clone(), |a, v| diff(&a, v));
    let mut tx = ch.clone();
    tx.add_func("tau", &[t.clone(), x.clone()]);
    tx.add_func("xi", &[t.clone(), x.clone()]);
    let (tau, xi, eta) = (tx.func("tau"), tx.func("xi"), ch.func("eta"));
    let (f, g) = (ch.func("f"), ch.func("g"));
    let uxe = Expr::sym(&ux);
    let two = |e: &Expr| e.scale(&wavesym::int(2));
    let w = d(&eta, &[&x]) + (d(&eta, &[&u]) - d(&xi, &[&x])) * &uxe;
    let row_uxx = two(&((d(&tau, &[&t]) - d(&xi, &[&x])) * &f)) + &xi * d(&f, &[&x]) + &w * d(&f, &[&ux]);
    let row_ut = two(&d(&eta, &[&t, &u])) - d(&tau, &[&t, &t]) + d(&tau, &[&x, &x]) * &f + d(&tau, &[&x]) * d(&g, &[&ux]);
    let row_rest = d(&eta, &[&t, &t]) - d(&xi, &[&t, &t]) * &uxe
        - (d(&eta, &[&x, &x]) + (two(&d(&eta, &[&x, &u])) - d(&xi, &[&x, &x])) * &uxe) * &f
        + (d(&eta, &[&u]) - two(&d(&tau, &[&t]))) * &g
        - &xi * d(&g, &[&x])
        - &w * d(&g, &[&ux]);
    let row_utt = d(&eta, &[&u, &u]);
    // General stage.
    let gtau = ch.func("tau");
    let gxi = ch.func("xi");
    let row_xi_u = d(&gxi, &[&u]);
    let row_xi_t = d(&gxi, &[&t]) - &f * (d(&gtau, &[&x]) + d(&gtau, &[&u]) * &uxe);
    let row_tau_u = two(&(&f * d(&gtau, &[&u]))) - (d(&gtau, &[&x]) + d(&gtau, &[&u]) * &uxe) * d(&f, &[&ux]);
    (row_uxx, row_ut, row_rest, row_utt, row_xi_u, row_xi_t, row_tau_u)
}

#[test]
fn determining_system_reproduces_known_rows() {
    let sys = generate_determining_system(&ClassSpec::symbolic()).unwrap();
    let (uxx, ut, rest, ut2, xi_u, xi_t, tau_u) = rows();
    let j = |a, b| Expr::sym(&Symbol::jet(a, b));
    let r = |m: Expr| sys.coefficient(Stage::Restricted, &m);
    let gen = |m: Expr| sys.coefficient(Stage::General, &m);
    assert!(proportional(&r(j(0, 2)), &uxx), "{}", r(j(0, 2)));
    assert!(proportional(&r(j(1, 0)), &ut), "{}", r(j(1, 0)));
    // The constant row still carries eta_uu, removed by the u_t^2 row.
    let shown = r(Expr::one()) + &ut2 * c().func("f") * j(0, 1).powi(2);
    assert!(proportional(&shown, &rest), "{}", r(Expr::one()));
    assert!(proportional(&r(j(1, 0).powi(2)), &ut2));
    assert!(proportional(&gen(j(1, 1) * j(1, 0)), &xi_u));
    assert!(proportional(&gen(j(1, 1)), &xi_t), "{}", gen(j(1, 1)));
    assert!(proportional(&gen(j(0, 2) * j(1, 0)), &tau_u), "{}", gen(j(0, 2) * j(1, 0)));
    for e in &sys.equations {
        for s in [Symbol::jet(2, 0), Symbol::jet(1, 1), Symbol::jet(0, 2), Symbol::jet(1, 0)] {
            assert!(!wavesym::expr::contains(&e.equation, &s), "{e}");
        }
    }
    assert_eq!(sys.lines().len(), sys.split_log().len());
}

#[test]
fn table_symmetries_pass() {
    let cases = [
        ("delta*u_x^(-4)", "0", "t^2@t + t*u@u"),
        ("delta*x^2*exp(2*u_x)", "nu*x*exp(2*u_x)", "x@x + u@u"),
    ];
    let sys = generate_determining_system(&ClassSpec::symbolic()).unwrap();
    for (f, g, q) in cases {
        let (f, g, q) = (p(f), p(g), field(q));
        let chk = check_symmetry(&f, &g, &q).unwrap();
        assert!(chk.passed(), "{q:?}: {:?}", chk.verdict);
        assert!(sys.satisfied_by(&q, &f, &g).unwrap().is_zero());
    }
    let bad = check_symmetry(&p("delta*u_x^(-4)"), &Expr::zero(), &field("x@u")).unwrap();
    assert!(!bad.passed());
}

#[test]
fn ansatz_dimensions() {
    let basis = AnsatzBasis::default();
    for (f, dim) in [("u_x^(-4)", 7), ("abs(u_x)^4", 6)] {
        let sol = solve_within_ansatz(&p(f), &Expr::zero(), &basis).unwrap();
        assert_eq!(sol.dimension, dim, "{f}: {:?}", sol.fields);
        for q in &sol.fields {
            assert!(simplified_violations(q).is_empty(), "{q:?}");
            for (n, r) in union_residuals(q) {
                assert!(zero(&r), "{n}: {q:?}");
            }
        }
    }
    let sol = solve_within_ansatz(&p("exp(2*x)*(1+u_x^2)"), &Expr::zero(), &basis).unwrap();
    assert!(sol.dimension >= 3);
    for (coord, b) in [(Symbol::t(), "1"), (Symbol::u(), "1"), (Symbol::u(), "t")] {
        let i = basis.position(&coord, &p(b)).unwrap();
        let target = unit(basis.len(), i);
        assert!(express(&sol.coordinates, &target).is_some(), "{b}@{coord:?} missing");
    }
}

#[test]
fn ansatz_requires_instantiated_parameters() {
    assert!(solve_within_ansatz(&p("delta*u_x^(-4)"), &Expr::zero(), &AnsatzBasis::default()).is_err());
}
