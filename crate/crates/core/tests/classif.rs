use wavesym::classif::{
    builtin_catalog, find_case, quadratic_tau_cases, verify_adjoint_actions, verify_all, verify_case,
    verify_equivalence_algebra, verify_equivalence_group, verify_potential_link, verify_subalgebra_lists, CaseGroup,
    Settings, Status, VerificationReport, SCHEMA,
};
use wavesym::expr::{self, Symbol};
use wavesym::vecfield::{transform_equation, PointTransform, Space};
use wavesym::{int, Chart, Expr, VectorField};

fn p(s: &str) -> Expr {
    Chart::base().parse(s).unwrap_or_else(|e| panic!("{s}: {e}"))
}

fn field(s: &str) -> VectorField {
    VectorField::parse(s, Space::Base, &Chart::base()).unwrap()
}

#[test]
fn catalog_is_complete() {
    let cat = builtin_catalog();
    let ids: Vec<&str> = cat.iter().map(|c| c.id.as_str()).collect();
    for n in 1..=22 {
        assert!(ids.contains(&n.to_string().as_str()), "case {n} missing");
    }
    for id in ["mu:0", "mu:1", "mu:2", "mu:3", "theta:0", "theta:1", "theta:2", "theta:3", "pair:1", "pair:2"] {
        assert!(ids.contains(&id), "{id} missing");
    }
    assert_eq!(cat.len(), 32);
    assert_eq!(cat.iter().filter(|c| c.group == CaseGroup::Table).count(), 22);
    for c in &cat {
        assert_eq!(c.expected_dimension, 3 + c.generators.len(), "{}", c.id);
    }
}

#[test]
fn catalog_entries_read_back() {
    let c22 = find_case("22").unwrap();
    assert_eq!(c22.f, p("delta*u_x^(-4)"));
    assert!(c22.g.is_zero());
    assert_eq!(c22.generators.len(), 4);
    assert_eq!(c22.expected_dimension, 7);

    let c1 = find_case("1").unwrap();
    assert_eq!(c1.f, p("F(x - eps*lnabs(u_x))*u_x^(-1)"));
    assert!(c1.generators[0].equivalent(&field("t@t + 2*eps@x + 2*(u + t^2)@u")).is_zero());
    assert!(c1.has_arbitrary_functions());

    let l3 = find_case("mu:3").unwrap();
    assert!(l3.g.is_zero());
    assert_eq!(l3.expected_dimension, 7);
    assert!(find_case("23").is_none());
}

#[test]
fn sampling_respects_constraints() {
    let c14 = find_case("14").unwrap();
    let s = c14.samples(3);
    assert_eq!(s.len(), 3);
    let (ps, qs) = (Symbol::param("p"), Symbol::param("q"));
    for a in &s {
        let (pv, qv) = (&a[&ps], &a[&qs]);
        assert_ne!(qv, &int(0));
        assert!(!(pv == &int(-1) && qv == &int(-1)));
        assert!(!(pv == &int(-2) && qv == &int(-3)));
    }
    let c7 = find_case("7").unwrap();
    for a in c7.samples(3) {
        let (pv, nv, dv) = (&a[&ps], &a[&Symbol::param("nu")], &a[&Symbol::sign_param("delta")]);
        assert_ne!(nv * (pv + int(1)), dv.clone());
        assert_ne!(pv, &int(0));
        assert_ne!(pv, &int(-2));
    }
    // Only two values of delta exist.
    assert_eq!(find_case("22").unwrap().samples(3).len(), 2);
    assert_eq!(find_case("3").unwrap().samples(3).len(), 1);
}

#[test]
fn case_18_passes_with_dimension_6() {
    let r = verify_case(&find_case("18").unwrap());
    assert_eq!(r.status, Status::Pass, "{:?}", r.failures());
    assert!(!r.dimensions_within_ansatz.is_empty());
    assert!(r.dimensions_within_ansatz.iter().all(|d| d.dimension == 6));
}

#[test]
fn case_2_formal_functions() {
    let c = find_case("2").unwrap();
    let chk = wavesym::detsys::check_symmetry(&c.f, &c.g, &c.generators[0]).unwrap();
    assert!(chk.passed(), "{}", chk.residual);
    assert!(c.f.may_contain_func("F") && c.g.may_contain_func("G"));
}

#[test]
fn corrupted_case_fails() {
    let mut c = find_case("18").unwrap();
    c.generators[1] = field("2*t@t - u@u");
    let r = verify_case(&c);
    assert_eq!(r.status, Status::Fail);
    let bad = r.failures();
    assert!(bad.iter().any(|k| k.name.starts_with("symmetry[1]") && k.detail.as_deref().unwrap_or("").contains("residual")));

    let mut c = find_case("21").unwrap();
    c.expected_dimension = 7;
    assert_eq!(verify_case(&c).status, Status::Fail);
}

#[test]
fn quadratic_tau_only_in_four_cases() {
    assert_eq!(quadratic_tau_cases(&builtin_catalog()), vec!["6", "18", "19", "22"]);
}

fn all_pass(r: &VerificationReport) {
    for c in &r.cases {
        assert_eq!(c.status, Status::Pass, "{}: {:?}", c.id, c.failures());
    }
    assert_eq!(r.summary.undecided, 0);
}

#[test]
fn structural_suites_pass() {
    let s = Settings::default();
    all_pass(&verify_equivalence_algebra(&s));
    all_pass(&verify_adjoint_actions(&s));
    all_pass(&verify_potential_link(&s));
    all_pass(&verify_subalgebra_lists(&s));
    all_pass(&verify_equivalence_group(&s));
}

#[test]
fn printed_gandarias_map_is_not_the_reduction() {
    let pt = PointTransform::new(p("t"), p("exp(x)"), Expr::one(), Expr::zero())
        .unwrap()
        .with_inverse(p("lnabs(x)"))
        .with_positive_x();
    let r = transform_equation(&pt, &p("u_x^(-2)"), &p("u_x^(-1)")).unwrap();
    assert!(!expr::is_zero(&r.g_new.unwrap()).is_zero());
}

#[test]
fn report_is_deterministic_and_versioned() {
    let s = Settings::default();
    let a = verify_all(&["algebra", "potential"], &s).unwrap();
    let b = verify_all(&["algebra", "potential"], &s).unwrap();
    assert_eq!(a.to_json(), b.to_json());
    assert_eq!(a.schema, SCHEMA);
    let back: VerificationReport = serde_json::from_str(&a.to_json()).unwrap();
    assert_eq!(back, a);
    assert!(a.cases.iter().all(|c| c.id.starts_with("algebra/") || c.id.starts_with("potential/")));
    assert!(a.summary_table().contains("within the declared ansatz"));
    assert!(verify_all(&["nope"], &s).is_err());
}
