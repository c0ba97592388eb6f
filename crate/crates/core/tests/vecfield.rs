use wavesym::expr::{self, Symbol};
use wavesym::vecfield::{
    apply_equivalence, compose, generators as gen, prolong2, pushforward, transform_equation, AugTransform,
    EquivParams, PointTransform, Space,
};
use wavesym::{Chart, Expr, VectorField};

fn chart() -> Chart {
    let mut c = Chart::base();
    let x = [Symbol::x()];
    for n in ["phi1", "phi2", "thetahat"] {
        c.add_func(n, &x);
    }
    c
}

fn p(s: &str) -> Expr {
    chart().parse(s).unwrap_or_else(|e| panic!("{s}: {e}"))
}

fn same(a: &VectorField, b: &VectorField) {
    assert!(a.equivalent(b).is_zero(), "{a:?}\n  !=\n{b:?}");
}

fn base(s: &str) -> VectorField {
    VectorField::parse(s, Space::Base, &chart()).unwrap()
}

#[test]
fn commutation_relations() {
    let psi = p("psi");
    let phi = p("phi");
    let cases: Vec<(VectorField, VectorField, VectorField)> = vec![
        (gen::g(&psi), gen::du(), gen::g(&psi)),
        (gen::f1(), gen::du(), gen::f1()),
        (gen::f2(), gen::du(), gen::f2()),
        (gen::dt(), gen::f1(), gen::f1()),
        (gen::dt(), gen::f2(), gen::f2().scale(&Expr::int(2))),
        (gen::pt(), gen::dt(), gen::pt()),
        (gen::pt(), gen::f1(), gen::g(&Expr::one())),
        (gen::pt(), gen::f2(), gen::f1().scale(&Expr::int(2))),
        (gen::d(&phi), gen::g(&psi), gen::g(&(&phi * p("psi_x")))),
    ];
    for (a, b, want) in cases {
        same(&a.bracket(&b).unwrap(), &want);
    }
    let (p1, p2) = (p("phi1"), p("phi2"));
    let want = gen::d(&(&p1 * p("phi2_x") - p("phi1_x") * &p2));
    same(&gen::d(&p1).bracket(&gen::d(&p2)).unwrap(), &want);
    let zero_pairs = [
        (gen::du(), gen::dt()),
        (gen::du(), gen::pt()),
        (gen::du(), gen::d(&phi)),
        (gen::dt(), gen::d(&phi)),
        (gen::pt(), gen::g(&psi)),
        (gen::f1(), gen::f2()),
        (gen::g(&psi), gen::g(&p("mu"))),
        (gen::f1(), gen::g(&psi)),
        (gen::d(&phi), gen::f2()),
    ];
    for (a, b) in zero_pairs {
        assert!(a.bracket(&b).unwrap().is_zero(), "[{a}, {b}] should vanish");
    }
}

#[test]
fn constant_fields_commute() {
    assert!(base("1@t").bracket(&base("1@x")).unwrap().is_zero());
}

#[test]
fn chart_checks() {
    let c = chart();
    assert!(VectorField::parse("u_x@u", Space::Base, &c).is_err());
    assert!(VectorField::parse("1@u_x", Space::Base, &c).is_err());
    assert!(VectorField::parse("u@u + 1@u_x", Space::Augmented, &Chart::augmented()).is_err());
    assert!(base("1@t").bracket(&gen::pt()).is_err());
}

#[test]
fn prolongation_examples() {
    let pr = prolong2(&base("1@t")).unwrap();
    for c in [&pr.eta_t, &pr.eta_x, &pr.eta_tt, &pr.eta_tx, &pr.eta_xx] {
        assert!(c.is_zero());
    }
    let pr = prolong2(&base("t@u")).unwrap();
    assert_eq!(pr.eta_t, Expr::one());
    for c in [&pr.eta_x, &pr.eta_tt, &pr.eta_tx, &pr.eta_xx] {
        assert!(c.is_zero());
    }
    let pr = prolong2(&base("2*t@t + u@u")).unwrap();
    assert_eq!(pr.eta_t, p("-u_t"));
    assert_eq!(pr.eta_x, p("u_x"));
    assert_eq!(pr.eta_tt, p("-3*u_tt"));
    assert_eq!(pr.eta_tx, p("-u_tx"));
    assert_eq!(pr.eta_xx, p("u_xx"));
}

#[test]
fn transform_examples() {
    let (f, g) = (p("f"), p("g"));
    let c1 = p("c1");
    let t = p("t");
    let x = p("x");
    let sc = PointTransform::new(&c1 * &t, x.clone(), Expr::one(), Expr::zero()).unwrap();
    let r = transform_equation(&sc, &f, &g).unwrap();
    assert_eq!(r.f_old, &f / c1.powi(2));
    assert_eq!(r.g_old, &g / c1.powi(2));
    assert_eq!(r.f_new.unwrap(), &f / c1.powi(2));

    let r = transform_equation(&PointTransform::identity(), &f, &g).unwrap();
    assert_eq!((r.f_old, r.g_old), (f.clone(), g.clone()));

    let gp = PointTransform::new(t.clone(), x.clone(), Expr::one(), p("psi")).unwrap();
    let r = transform_equation(&gp, &f, &g).unwrap();
    assert_eq!(r.f_old, f);
    assert_eq!(r.g_old, p("g - psi_xx*f"));
    assert_eq!(r.f_new.unwrap(), p("f(x, u_x - psi_x)"));
}

#[test]
fn transform_leaving_class() {
    let bad = PointTransform::new(p("t"), p("x"), p("exp(t)"), Expr::zero()).unwrap();
    assert!(transform_equation(&bad, &p("f"), &p("g")).is_err());
    assert!(PointTransform::new(p("t*x"), p("x"), Expr::one(), Expr::zero()).is_err());
}

#[test]
fn equivalence_examples() {
    let (f, g) = (p("f"), p("g"));
    let (f2, g2) = apply_equivalence(&EquivParams::f2(p("c4")), &f, &g).unwrap();
    assert_eq!((f2, g2), (f.clone(), p("g + 2*c4")));
    let (f0, g0) = apply_equivalence(&EquivParams::identity(), &f, &g).unwrap();
    assert_eq!((f0, g0), (f.clone(), g.clone()));

    let phi = p("phi");
    let (fd, gd) = apply_equivalence(&EquivParams::d(phi.clone(), None), &f, &g).unwrap();
    assert_eq!(fd, p("phi_x^2*f"));
    assert_eq!(gd, p("g + phi_xx*u_x*f/phi_x"));
    let pt = PointTransform::new(p("t"), phi, Expr::one(), Expr::zero()).unwrap();
    let r = transform_equation(&pt, &f, &g).unwrap();
    assert!(expr::is_zero(&(r.f_old - fd)).is_zero());
    assert!(expr::is_zero(&(r.g_old - gd)).is_zero());
}

#[test]
fn elementary_transformations_agree() {
    let (f, g) = (p("f"), p("g"));
    let list = [
        (EquivParams::pt(p("c0")), PointTransform::new(p("t + c0"), p("x"), Expr::one(), Expr::zero())),
        (EquivParams::dt(p("c1")), PointTransform::new(p("c1*t"), p("x"), Expr::one(), Expr::zero())),
        (EquivParams::d(p("phi"), None), PointTransform::new(p("t"), p("phi"), Expr::one(), Expr::zero())),
        (EquivParams::du(p("c2")), PointTransform::new(p("t"), p("x"), p("c2"), Expr::zero())),
        (EquivParams::f1(p("c3")), PointTransform::new(p("t"), p("x"), Expr::one(), p("c3*t"))),
        (EquivParams::f2(p("c4")), PointTransform::new(p("t"), p("x"), Expr::one(), p("c4*t^2"))),
        (EquivParams::g(p("psi")), PointTransform::new(p("t"), p("x"), Expr::one(), p("psi"))),
    ];
    for (ep, pt) in list {
        let (fe, ge) = apply_equivalence(&ep, &f, &g).unwrap();
        let r = transform_equation(&pt.unwrap(), &f, &g).unwrap();
        assert!(expr::is_zero(&(&r.f_old - &fe)).is_zero(), "{} vs {}", r.f_old, fe);
        assert!(expr::is_zero(&(&r.g_old - &ge)).is_zero(), "{} vs {}", r.g_old, ge);
    }
}

#[test]
fn group_law_decomposition() {
    let (f, g) = (p("f"), p("g"));
    let chain = [
        EquivParams::g(p("psi")),
        EquivParams::f2(p("a1")),
        EquivParams::f1(p("a2")),
        EquivParams::du(p("c2")),
        EquivParams::d(p("phi"), None),
        EquivParams::pt(p("c0")),
        EquivParams::dt(p("c1")),
    ];
    let mut total = EquivParams::identity();
    let mut state = wavesym::vecfield::AugState::with(f.clone(), g.clone());
    for e in &chain {
        total = compose(e, &total);
        state = wavesym::vecfield::act(e, &state);
    }
    let direct = wavesym::vecfield::act(&total, &wavesym::vecfield::AugState::with(f, g));
    for (a, b) in [
        (&state.t, &direct.t),
        (&state.x, &direct.x),
        (&state.u, &direct.u),
        (&state.ux, &direct.ux),
        (&state.f, &direct.f),
        (&state.g, &direct.g),
    ] {
        assert!(expr::is_zero(&(a - b)).is_zero(), "{a} vs {b}");
    }
    assert_eq!(total.c0, p("c1*c0"));
    assert_eq!(total.c4, p("c2*a1"));
    assert_eq!(total.psi, p("c2*psi"));
}

#[test]
fn pushforward_examples() {
    let psi = p("psi");
    let tg = AugTransform::from_params(&EquivParams::g(psi.clone())).unwrap();
    let want = gen::du().sub(&gen::g(&psi)).unwrap();
    same(&pushforward(&tg, &gen::du()).unwrap(), &want);

    let ep = EquivParams::d(p("theta"), Some(p("thetahat"))).with_inverse_func("theta", "thetahat");
    let td = AugTransform::from_params(&ep).unwrap();
    let got = pushforward(&td, &gen::g(&psi)).unwrap();
    same(&got, &gen::g(&p("psi(thetahat(x))")));
    let got = pushforward(&td, &gen::d(&p("phi"))).unwrap();
    same(&got, &gen::d(&p("phi(thetahat(x))/thetahat_x")));

    for v in [gen::du(), gen::dt(), gen::d(&p("phi")), gen::f2()] {
        same(&pushforward(&AugTransform::identity(), &v).unwrap(), &v);
    }
}
