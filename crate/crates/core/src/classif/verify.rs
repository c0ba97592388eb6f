use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::catalog::{builtin_catalog, describe, instantiate, kernel, Assignment, CaseGroup, ClassificationCase};
use super::report::{CaseReport, Check, DimRecord, VerificationReport};
use crate::detsys::{check_symmetry, simplified_violations, solve_within_ansatz, AnsatzBasis, ClassSpec};
use crate::expr::{
    self, diff, substitute, total_derivative, Chart, Dir, Expr, Flag, Symbol, JET_CAP,
};
use crate::liealg::{close_or_fail, coordinate_rows, rref, Subspace};
use crate::vecfield::{
    act, apply_equivalence, compose, generators as gen, pushforward, transform_equation, AugState, AugTransform,
    EquivParams, PointTransform, VectorField,
};
use crate::{int, rat, Rational};

/// Suite names accepted by [`verify_all`] and the command line.
pub const SUITES: [&str; 7] = ["table", "algebra", "adjoint", "reductions", "potential", "subalgebras", "group"];

/// Knobs shared by the drivers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Settings {
    /// Seed for random instantiations (polynomials, group parameters).
    pub seed: u64,
    /// Parameter samples per catalog entry.
    pub samples: usize,
    pub basis: AnsatzBasis,
}

impl Default for Settings {
    fn default() -> Self {
        Settings { seed: 0x5eed, samples: 3, basis: AnsatzBasis::default() }
    }
}

fn chart() -> Chart {
    Chart::base()
}

fn p(s: &str) -> Expr {
    chart().parse(s).unwrap_or_else(|e| panic!("built-in expression {s}: {e}"))
}

fn zero_check(name: impl Into<String>, e: &Expr) -> Check {
    let v = expr::is_zero(e);
    Check::of_verdict(name, &v, || e.to_string())
}

fn same_field(name: impl Into<String>, a: &VectorField, b: &VectorField) -> Check {
    let v = a.equivalent(b);
    Check::of_verdict(name, &v, || format!("{a} - ({b})"))
}

fn error_check(name: impl Into<String>, e: impl std::fmt::Display) -> Check {
    Check::fail(name, e.to_string())
}

fn rank(rows: Vec<Vec<Rational>>) -> usize {
    rref(rows).1.len()
}

/// Verify one catalog entry with the default settings.
pub fn verify_case(c: &ClassificationCase) -> CaseReport {
    verify_case_with(c, &Settings::default())
}

/// Symmetry residuals with symbolic parameters, the simplified-system filter,
/// closure and ansatz dimension at sampled parameters.
pub fn verify_case_with(c: &ClassificationCase, s: &Settings) -> CaseReport {
    let mut r = CaseReport::new(c.id.clone());
    r.expected_dimension = Some(c.expected_dimension);
    let spec = ClassSpec::new(c.f.clone(), c.g.clone());
    if !spec.stray_arguments().is_empty() {
        r.push(Check::fail("arguments", format!("f, g depend on {:?}", spec.stray_arguments())));
    }
    for (i, q) in c.generators.iter().enumerate() {
        let name = format!("symmetry[{i}] {q}");
        match check_symmetry(&c.f, &c.g, q) {
            Ok(chk) => r.push(Check::of_verdict(name, &chk.verdict, || chk.residual.to_string())),
            Err(e) => r.push(error_check(name, e)),
        }
        let bad = simplified_violations(q);
        r.push(Check::of_bool(format!("simplified[{i}]"), bad.is_empty(), || bad.join(", ")));
    }
    let samples = c.samples(s.samples);
    if samples.len() < s.samples.min(c.distinct_assignments()) {
        r.push(Check::fail("samples", format!("only {} admissible parameter samples", samples.len())));
    }
    for a in &samples {
        let tag = describe(a);
        let mut fields = kernel();
        let gens = c.concrete_generators(a);
        fields.extend(gens.iter().enumerate().map(|(i, q)| (format!("X{i}"), q.clone())));
        match close_or_fail(&fields) {
            Ok(cl) => r.push(Check::of_bool(format!("closure[{tag}]"), cl.pruned.is_empty(), || {
                format!("dependent generators {:?}", cl.pruned)
            })),
            Err(e) => r.push(error_check(format!("closure[{tag}]"), e)),
        }
        let (f, g) = c.concrete(a);
        match solve_within_ansatz(&f, &g, &s.basis) {
            Ok(sol) => {
                r.dimensions_within_ansatz.push(DimRecord { sample: tag.clone(), dimension: sol.dimension });
                r.push(Check::of_bool(format!("dimension[{tag}]"), sol.dimension == c.expected_dimension, || {
                    format!("{} within ansatz, expected {}", sol.dimension, c.expected_dimension)
                }));
                let mut all = sol.fields.clone();
                all.extend(fields.iter().map(|(_, q)| q.clone()));
                let n = rank(coordinate_rows(&all));
                r.push(Check::of_bool(format!("contains[{tag}]"), n == sol.dimension, || {
                    "listed generators are not all found within the ansatz".into()
                }));
            }
            Err(e) => r.push(error_check(format!("dimension[{tag}]"), e)),
        }
    }
    r
}

/// Verify a list of entries in order.
pub fn verify_cases(suite: &str, cases: &[ClassificationCase], s: &Settings) -> VerificationReport {
    VerificationReport::new(suite, cases.iter().map(|c| verify_case_with(c, s)).collect())
}

/// Every catalog entry, plus the scan for generators with `tau_tt != 0`.
pub fn verify_table(s: &Settings) -> VerificationReport {
    let cat = builtin_catalog();
    let mut rep = verify_cases("table", &cat, s);
    rep.cases.push(table_scan(&cat));
    rep.resummarize();
    rep
}

/// Generators with `tau_tt != 0` occur exactly in main-table cases 6, 18, 19, 22.
pub fn table_scan(cat: &[ClassificationCase]) -> CaseReport {
    let mut scan = CaseReport::new(SCAN_ID);
    let found = quadratic_tau_cases(cat);
    let want = ["6", "18", "19", "22"];
    scan.push(Check::of_bool("table cases with tau_tt != 0", found == want, || format!("found {found:?}")));
    scan
}

/// Id of the catalog scan appended to the table suite.
pub const SCAN_ID: &str = "scan:quadratic-tau";

/// Ids of main-table entries having a generator whose `tau` is nonlinear in `t`.
pub fn quadratic_tau_cases(cat: &[ClassificationCase]) -> Vec<String> {
    let t = Symbol::t();
    cat.iter()
        .filter(|c| c.group == CaseGroup::Table)
        .filter(|c| c.generators.iter().any(|q| !diff(&diff(&q.coeff(&t), &t), &t).is_zero()))
        .map(|c| c.id.clone())
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
enum Gen {
    Du,
    Dt,
    Pt,
    F1,
    F2,
    D(Expr),
    G(Expr),
}

impl Gen {
    fn field(&self) -> VectorField {
        match self {
            Gen::Du => gen::du(),
            Gen::Dt => gen::dt(),
            Gen::Pt => gen::pt(),
            Gen::F1 => gen::f1(),
            Gen::F2 => gen::f2(),
            Gen::D(e) => gen::d(e),
            Gen::G(e) => gen::g(e),
        }
    }

    fn label(&self) -> String {
        match self {
            Gen::Du => "Du".into(),
            Gen::Dt => "Dt".into(),
            Gen::Pt => "Pt".into(),
            Gen::F1 => "F1".into(),
            Gen::F2 => "F2".into(),
            Gen::D(e) => format!("D({e})"),
            Gen::G(e) => format!("G({e})"),
        }
    }
}

/// Printed commutator `[a, b]` as (relation name, value); `None` means zero.
fn table_bracket(a: &Gen, b: &Gen) -> Option<(&'static str, Option<VectorField>)> {
    use Gen::*;
    let x = Symbol::x();
    let two = |v: VectorField| v.scale(&Expr::int(2));
    let direct = match (a, b) {
        (G(s), Du) => Some(("[G,Du]=G", Some(gen::g(s)))),
        (F1, Du) => Some(("[F1,Du]=F1", Some(gen::f1()))),
        (F2, Du) => Some(("[F2,Du]=F2", Some(gen::f2()))),
        (Dt, F1) => Some(("[Dt,F1]=F1", Some(gen::f1()))),
        (Dt, F2) => Some(("[Dt,F2]=2F2", Some(two(gen::f2())))),
        (Pt, Dt) => Some(("[Pt,Dt]=Pt", Some(gen::pt()))),
        (Pt, F1) => Some(("[Pt,F1]=G(1)", Some(gen::g(&Expr::one())))),
        (Pt, F2) => Some(("[Pt,F2]=2F1", Some(two(gen::f1())))),
        (D(p1), D(p2)) => Some(("[D,D]=D", Some(gen::d(&(p1 * diff(p2, &x) - diff(p1, &x) * p2))))),
        (D(ph), G(ps)) => Some(("[D,G]=G", Some(gen::g(&(ph * diff(ps, &x)))))),
        _ => None,
    };
    if direct.is_some() {
        return direct;
    }
    let swapped = match (b, a) {
        (G(_), Du) | (F1, Du) | (F2, Du) | (Dt, F1) | (Dt, F2) | (Pt, Dt) | (Pt, F1) | (Pt, F2) | (D(_), G(_)) => {
            table_bracket(b, a)
        }
        _ => None,
    };
    swapped.map(|(n, v)| (n, v.map(|v| v.scale(&Expr::int(-1)))))
}

fn random_polynomial(rng: &mut ChaCha8Rng) -> Expr {
    let x = Expr::sym(&Symbol::x());
    loop {
        let e: Expr = (0..4).map(|k| x.powi(k) * Expr::int(rng.gen_range(-4..=4))).sum();
        if !diff(&diff(&e, &Symbol::x()), &Symbol::x()).is_zero() {
            return e;
        }
    }
}

/// Sample functions used to instantiate `phi` and `psi`.
fn sample_functions(seed: u64) -> Vec<Expr> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v = vec![p("1"), p("x"), p("x^2"), p("exp(x)")];
    v.push(random_polynomial(&mut rng));
    v.push(random_polynomial(&mut rng));
    v
}

/// All pairwise brackets of the equivalence algebra against the printed table.
pub fn verify_equivalence_algebra(s: &Settings) -> VerificationReport {
    let funcs = sample_functions(s.seed);
    let mut gens = vec![Gen::Du, Gen::Dt, Gen::Pt, Gen::F1, Gen::F2];
    gens.extend(funcs.iter().map(|e| Gen::D(e.clone())));
    gens.extend(funcs.iter().map(|e| Gen::G(e.clone())));
    let mut groups: BTreeMap<&'static str, CaseReport> = BTreeMap::new();
    for (i, a) in gens.iter().enumerate() {
        for b in gens.iter().skip(i + 1) {
            let (name, want) = table_bracket(a, b).unwrap_or(("vanishing", None));
            let rep = groups.entry(name).or_insert_with(|| CaseReport::new(name));
            let label = format!("[{}, {}]", a.label(), b.label());
            let got = match a.field().bracket(&b.field()) {
                Ok(v) => v,
                Err(e) => {
                    rep.push(error_check(label, e));
                    continue;
                }
            };
            let want = want.unwrap_or_else(|| VectorField::zero(got.space()));
            rep.push(same_field(label, &got, &want));
        }
    }
    VerificationReport::new("algebra", groups.into_values().collect())
}

fn positive_x(v: &VectorField) -> VectorField {
    let mut m = BTreeMap::new();
    m.insert(Symbol::x(), Expr::sym(&Symbol::x().with_flag(Flag::Positive)));
    v.map(|c| substitute(c, &m))
}

fn push(p: &EquivParams, v: &VectorField) -> Result<VectorField, String> {
    let t = AugTransform::from_params(p).map_err(|e| e.to_string())?;
    pushforward(&t, v).map_err(|e| e.to_string())
}

/// The nine printed push-forward identities.
pub fn verify_adjoint_actions(_s: &Settings) -> VerificationReport {
    let ch = chart();
    let (c1, c2, c4) = (p("c1"), p("c2"), p("c4"));
    let (phi, psi) = (ch.func("phi"), ch.func("psi"));
    let x = Symbol::x();
    let add = |a: VectorField, b: VectorField| a.add(&b).expect("same chart");
    let mut items: Vec<(String, EquivParams, VectorField, VectorField, bool)> = vec![
        ("F2*(c4) Dt".into(), EquivParams::f2(c4.clone()), gen::dt(), add(gen::dt(), gen::f2().scale(&(&c4 * 2))), false),
        ("Dt*(c1) F2".into(), EquivParams::dt(c1.clone()), gen::f2(), gen::f2().scale(&c1.powi(-2)), false),
        ("G*(psi) Du".into(), EquivParams::g(psi.clone()), gen::du(), add(gen::du(), gen::g(&psi).scale(&Expr::int(-1))), false),
        ("Du*(c2) G(psi)".into(), EquivParams::du(c2.clone()), gen::g(&psi), gen::g(&psi).scale(&c2), false),
        ("F2*(c4) Du".into(), EquivParams::f2(c4.clone()), gen::du(), add(gen::du(), gen::f2().scale(&-&c4)), false),
        ("Du*(c2) F2".into(), EquivParams::du(c2.clone()), gen::f2(), gen::f2().scale(&c2), false),
        (
            "G*(psi) D(phi)".into(),
            EquivParams::g(psi.clone()),
            gen::d(&phi),
            add(gen::d(&phi), gen::g(&(&phi * diff(&psi, &x)))),
            false,
        ),
    ];
    for (theta, inv, positive) in [("exp(x)", "lnabs(x)", true), ("2*x + 1", "(x - 1)/2", false)] {
        let (th, hat) = (p(theta), p(inv));
        let ep = EquivParams::d(th, Some(hat.clone()));
        let psi_hat = ch.apply("psi", vec![hat.clone()]);
        items.push((format!("D*({theta}) G(psi)"), ep.clone(), gen::g(&psi), gen::g(&psi_hat), positive));
        let phi_hat = ch.apply("phi", vec![hat.clone()]);
        let want = gen::d(&(phi_hat / diff(&hat, &x)));
        items.push((format!("D*({theta}) D(phi)"), ep, gen::d(&phi), want, positive));
    }
    items.push(("Pt*(c0) Pt".into(), EquivParams::pt(p("c0")), gen::pt(), gen::pt(), false));
    let mut cases = Vec::new();
    for (name, ep, v, want, positive) in items {
        let mut r = CaseReport::new(name.clone());
        match push(&ep, &v) {
            Ok(got) => {
                let (got, want) = if positive { (positive_x(&got), positive_x(&want)) } else { (got, want) };
                r.push(same_field("pushforward", &got, &want));
            }
            Err(e) => r.push(error_check("pushforward", e)),
        }
        cases.push(r);
    }
    VerificationReport::new("adjoint", cases)
}

struct Reduction {
    id: String,
    transform: Result<PointTransform, String>,
    f: Expr,
    g: Expr,
    f_target: Expr,
    g_target: Expr,
    /// Compare ansatz dimensions of source and image.
    dims: bool,
}

fn reduction_report(red: Reduction, s: &Settings) -> CaseReport {
    let mut r = CaseReport::new(red.id);
    let pt = match red.transform {
        Ok(pt) => pt,
        Err(e) => {
            r.push(error_check("transform", e));
            return r;
        }
    };
    match transform_equation(&pt, &red.f, &red.g) {
        Ok(t) => {
            for (n, got, want) in [("f", &t.f_new, &red.f_target), ("g", &t.g_new, &red.g_target)] {
                match got {
                    Some(e) => r.push(zero_check(format!("{n} image"), &(e - want))),
                    None => r.push(Check::fail(format!("{n} image"), "no inverse available")),
                }
            }
        }
        Err(e) => r.push(error_check("transform", e)),
    }
    if red.dims {
        let a = solve_within_ansatz(&red.f, &red.g, &s.basis).map(|x| x.dimension);
        let b = solve_within_ansatz(&red.f_target, &red.g_target, &s.basis).map(|x| x.dimension);
        match (a, b) {
            (Ok(a), Ok(b)) => r.push(Check::of_bool("dimensions agree", a == b, || format!("{a} vs {b} within ansatz"))),
            (Err(e), _) | (_, Err(e)) => r.push(error_check("dimensions agree", e)),
        }
    }
    r
}

fn inst(e: &str, vals: &[(&str, Rational)]) -> Expr {
    let a: Assignment = vals.iter().map(|(n, v)| (Symbol::param(n), v.clone())).collect();
    instantiate(&p(e), &a)
}

fn pt(t: Expr, x: Expr, u1: Expr, u0: Expr) -> Result<PointTransform, String> {
    PointTransform::new(t, x, u1, u0).map_err(|e| e.to_string())
}

/// Reductions of singular parameter values and of the subclass lists.
pub fn verify_reductions(s: &Settings) -> VerificationReport {
    let mut list = Vec::new();
    let (t, x, one, zero) = (p("t"), p("x"), Expr::one(), Expr::zero());
    for pv in [1i64, 2] {
        for nv in [1i64, 2] {
            for dv in [1i64, -1] {
                let vals = [("p", int(pv)), ("nu", int(nv))];
                let d = Expr::int(dv);
                let scale = Expr::num(int(pv + 1)).pow(&Expr::int(-pv - 1));
                let xt = p("x").scale(&rat(-1, pv + 1)).exp();
                let inv = p("lnabs(x)").scale(&int(-(pv + 1)));
                let nut = Expr::num(int(dv - nv * (pv + 1)));
                list.push(Reduction {
                    id: format!("7->19-form[p={pv},nu={nv},delta={dv}]"),
                    transform: pt(&scale * &t, xt, one.clone(), zero.clone())
                        .map(|q| q.with_inverse(inv).with_positive_x()),
                    f: &d * inst("exp(2*x)*abs(u_x)^(2*p)", &vals),
                    g: inst("nu*exp(2*x)*abs(u_x)^(2*p)*u_x", &vals),
                    f_target: &d * inst("abs(u_x)^(2*p)", &vals),
                    g_target: nut * inst("x^(-1)*abs(u_x)^(2*p)*u_x", &vals),
                    dims: pv == 1,
                });
            }
        }
    }
    for (dv, nv) in [(1i64, 2i64), (-1, 3)] {
        let (d, n) = (Expr::int(dv), Expr::int(nv));
        list.push(Reduction {
            id: format!("8->21-form[delta={dv},nu={nv}]"),
            transform: pt(t.clone(), x.clone(), one.clone(), p("x*lnabs(x) - x")),
            f: &d * p("x^2*exp(2*u_x)"),
            g: &n * p("x*exp(2*u_x)"),
            f_target: &d * p("exp(2*u_x)"),
            g_target: Expr::int(nv - dv) * p("x^(-1)*exp(2*u_x)"),
            dims: true,
        });
    }
    for dv in [1i64, -1] {
        let d = Expr::int(dv);
        list.push(Reduction {
            id: format!("gandarias->20[delta={dv}]"),
            transform: pt(t.clone(), p("exp(-x)"), one.clone(), zero.clone())
                .map(|q| q.with_inverse(p("-lnabs(x)")).with_positive_x()),
            f: &d * p("u_x^(-2)"),
            g: &d * p("u_x^(-1)"),
            f_target: &d * p("u_x^(-2)"),
            g_target: Expr::zero(),
            dims: true,
        });
        list.push(Reduction {
            id: format!("gandarias-printed-map[delta={dv}]"),
            transform: pt(t.clone(), p("exp(x)"), one.clone(), zero.clone())
                .map(|q| q.with_inverse(p("lnabs(x)")).with_positive_x()),
            f: &d * p("u_x^(-2)"),
            g: &d * p("u_x^(-1)"),
            f_target: &d * p("u_x^(-2)"),
            g_target: &d * p("2*x^(-1)*u_x^(-1)"),
            dims: false,
        });
    }
    let sub = [
        ("mu=1,delta=1", "u_x^(-4)", "u_x^(-3)", "-exp(-x)", "-lnabs(x)", false, "x^(-2)"),
        ("mu=1,delta=-1", "-u_x^(-4)", "u_x^(-3)", "exp(x)", "lnabs(x)", true, "-x^(-2)"),
        ("mu=2/x,delta=1", "u_x^(-4)", "2*x^(-1)*u_x^(-3)", "-x^(-1)", "-x^(-1)", false, "x^(-4)"),
        ("mu=1/x,delta=1", "u_x^(-4)", "x^(-1)*u_x^(-3)", "lnabs(x)", "exp(x)", false, "exp(2*x)"),
    ];
    for (id, f, g, phi, inv, positive, theta) in sub {
        let tr = pt(t.clone(), p(phi), one.clone(), zero.clone()).map(|q| {
            let q = q.with_inverse(p(inv));
            if positive {
                q.with_positive_x()
            } else {
                q
            }
        });
        list.push(Reduction {
            id: format!("mu->theta[{id}]"),
            transform: tr,
            f: p(f),
            g: p(g),
            f_target: p(theta) * p("u_x^(-4)"),
            g_target: Expr::zero(),
            dims: true,
        });
    }
    list.push(Reduction {
        id: "identity[case 20]".into(),
        transform: Ok(PointTransform::identity()),
        f: p("abs(u_x)^(2/3)"),
        g: Expr::zero(),
        f_target: p("abs(u_x)^(2/3)"),
        g_target: Expr::zero(),
        dims: false,
    });
    VerificationReport::new("reductions", list.into_iter().map(|r| reduction_report(r, s)).collect())
}

/// Potential system `u_x = v`, `u_t = w`, `w_t = f(x,v) v_x + g(x,v)` against
/// the wave equation, in both directions.
pub fn verify_potential_link(_s: &Settings) -> VerificationReport {
    let ch = chart();
    let spec = ClassSpec::symbolic();
    let (x, u) = (Expr::sym(&Symbol::x()), Expr::sym(&Symbol::u()));
    let td = |e: &Expr, d| total_derivative(e, d, JET_CAP).expect("jet order within cap");
    let mut cases = Vec::new();

    let mut fwd = CaseReport::new("forward");
    let v = td(&u, Dir::X);
    let w = td(&u, Dir::T);
    let sys = td(&w, Dir::T) - ch.apply("f", vec![x.clone(), v.clone()]) * td(&v, Dir::X) - ch.apply("g", vec![x.clone(), v.clone()]);
    fwd.push(zero_check("eliminated system equals the wave equation", &(sys - spec.equation())));
    fwd.push(zero_check("compatibility v_t = w_x", &(td(&v, Dir::T) - td(&w, Dir::X))));
    cases.push(fwd);

    let backward = |f: &Expr, g: &Expr, name: &str| -> CaseReport {
        let mut r = CaseReport::new(name);
        let spec = ClassSpec::new(f.clone(), g.clone());
        let lhs = td(&spec.equation(), Dir::X);
        // v-jets as coordinates, then v_{ab} -> u_{a,b+1}.
        let (vs, vx, vxx, vtt) = (Symbol::coord("v"), Symbol::coord("v_x"), Symbol::coord("v_xx"), Symbol::coord("v_tt"));
        let mut to_v = BTreeMap::new();
        to_v.insert(Symbol::jet(0, 1), Expr::sym(&vs));
        let fv = substitute(f, &to_v);
        let gv = substitute(g, &to_v);
        let flux = &fv * Expr::sym(&vx) + &gv;
        let xs = Symbol::x();
        let dx_flux = diff(&flux, &xs) + diff(&flux, &vs) * Expr::sym(&vx) + diff(&flux, &vx) * Expr::sym(&vxx);
        let tele = Expr::sym(&vtt) - dx_flux;
        let mut back = BTreeMap::new();
        back.insert(vs, Expr::sym(&Symbol::jet(0, 1)));
        back.insert(vx, Expr::sym(&Symbol::jet(0, 2)));
        back.insert(vxx, Expr::sym(&Symbol::jet(0, 3)));
        back.insert(vtt, Expr::sym(&Symbol::jet(2, 1)));
        let rhs = substitute(&tele, &back);
        r.push(zero_check("D_x of the wave equation is the telegraph form", &(lhs - rhs)));
        r
    };
    cases.push(backward(&ch.func("f"), &ch.func("g"), "backward"));
    let mut lin = backward(&p("c0"), &p("c1"), "constant coefficients");
    let v_eq = p("u_ttx - c0*u_xxx");
    lin.push(zero_check("linear wave identity", &(td(&spec_const(), Dir::X) - v_eq)));
    cases.push(lin);
    VerificationReport::new("potential", cases)
}

fn spec_const() -> Expr {
    ClassSpec::new(p("c0"), p("c1")).equation()
}

struct Family {
    id: String,
    fields: Vec<(String, VectorField)>,
}

fn lin(terms: &[(Expr, VectorField)]) -> VectorField {
    terms.iter().fold(VectorField::zero(gen::du().space()), |acc, (c, v)| acc.add(&v.scale(c)).expect("augmented"))
}

/// Subalgebra lists: closure together with `<Pt, F1, G(1)>` and the exclusions.
pub fn verify_subalgebra_lists(_s: &Settings) -> VerificationReport {
    let n = |k: i64| Expr::int(k);
    let q = |a: i64, b: i64| Expr::frac(a, b);
    let (du, dt, f2) = (gen::du(), gen::dt(), gen::f2());
    let d = |e: &str| gen::d(&p(e));
    let g = |e: &str| gen::g(&p(e));
    let mut fam: Vec<Family> = Vec::new();
    let one = |id: String, v: VectorField| Family { id, fields: vec![("s1".into(), v)] };
    for eps in [0, 1] {
        fam.push(one(
            format!("1d:Du+Dt/2+D(eps)+F2[eps={eps}]"),
            lin(&[(n(1), du.clone()), (q(1, 2), dt.clone()), (n(eps), d("1")), (n(1), f2.clone())]),
        ));
        for (a, b) in [(1, 3), (-5, 2)] {
            fam.push(one(
                format!("1d:Du-pDt+D(eps)[eps={eps},p={a}/{b}]"),
                lin(&[(n(1), du.clone()), (q(-a, b), dt.clone()), (n(eps), d("1"))]),
            ));
        }
        fam.push(one(format!("1d:D(1)+epsF2[eps={eps}]"), lin(&[(n(1), d("1")), (n(eps), f2.clone())])));
    }
    fam.push(one("1d:Dt-D(1)".into(), lin(&[(n(1), dt.clone()), (n(-1), d("1"))])));
    fam.push(one("1d:Dt-G(x)".into(), lin(&[(n(1), dt.clone()), (n(-1), g("x"))])));
    for b in [q(1, 3), q(-7, 2)] {
        fam.push(Family {
            id: format!("2d:<Du+D(1),Dt+D(b)>[b={b}]"),
            fields: vec![
                ("s1".into(), lin(&[(n(1), du.clone()), (n(1), d("1"))])),
                ("s2".into(), lin(&[(n(1), dt.clone()), (b.clone(), d("1"))])),
            ],
        });
    }
    fam.push(Family {
        id: "2d:<Du+D(1),Dt+G(e^x)>".into(),
        fields: vec![
            ("s1".into(), lin(&[(n(1), du.clone()), (n(1), d("1"))])),
            ("s2".into(), lin(&[(n(1), dt.clone()), (n(1), g("exp(x)"))])),
        ],
    });
    // (a1 - 2 a2 - a3) eps2 = 0
    for (a1, a2, a3, e0, e1, e2) in [(2, 3, 5, 1, 1, 0), (3, 1, 1, 1, 0, 1), (5, 2, 1, 0, 1, -1), (2, -1, 7, 0, 0, 0)] {
        fam.push(Family {
            id: format!("2d:<a1Du+a2Dt+a3D(x)+e0G(x)+e1F2,D(1)+e2F2>[{a1},{a2},{a3},{e0},{e1},{e2}]"),
            fields: vec![
                (
                    "s1".into(),
                    lin(&[(n(a1), du.clone()), (n(a2), dt.clone()), (n(a3), d("x")), (n(e0), g("x")), (n(e1), f2.clone())]),
                ),
                ("s2".into(), lin(&[(n(1), d("1")), (n(e2), f2.clone())])),
            ],
        });
    }
    // eps (p1 - 1) = eps (p2 + 2) = 0, (p1, p2) != (1, 0)
    for (eps, p1, p2) in [(0, q(1, 3), q(2, 5)), (0, n(1), n(3)), (1, n(1), n(-2))] {
        fam.push(Family {
            id: format!("3d:<Du+p1D(x),Dt+p2D(x),D(1)+epsF2>[eps={eps},p1={p1},p2={p2}]"),
            fields: vec![
                ("s1".into(), lin(&[(n(1), du.clone()), (p1.clone(), d("x"))])),
                ("s2".into(), lin(&[(n(1), dt.clone()), (p2.clone(), d("x"))])),
                ("s3".into(), lin(&[(n(1), d("1")), (n(eps), f2.clone())])),
            ],
        });
    }
    for dv in [q(2, 3), n(-3)] {
        fam.push(Family {
            id: format!("3d:<Du+D(x)+dG(x),Dt-G(x),D(1)>[d={dv}]"),
            fields: vec![
                ("s1".into(), lin(&[(n(1), du.clone()), (n(1), d("x")), (dv.clone(), g("x"))])),
                ("s2".into(), lin(&[(n(1), dt.clone()), (n(-1), g("x"))])),
                ("s3".into(), d("1")),
            ],
        });
    }
    fam.push(Family { id: "kernel only".into(), fields: Vec::new() });

    let base = vec![("Pt".to_string(), gen::pt()), ("F1".to_string(), gen::f1()), ("G(1)".to_string(), g("1"))];
    let excl_u = [du.clone(), g("x"), g("x^2"), g("exp(x)"), f2.clone(), g("1")];
    let excl_t = [dt.clone(), f2.clone(), g("1")];
    let cases = fam
        .into_iter()
        .map(|fm| {
            let mut r = CaseReport::new(fm.id);
            let mut all = fm.fields.clone();
            all.extend(base.iter().cloned());
            match close_or_fail(&all) {
                Ok(cl) => r.push(Check::of_bool("closed", cl.pruned.is_empty(), || format!("dependent {:?}", cl.pruned))),
                Err(e) => r.push(error_check("closed", e)),
            }
            let span: Vec<VectorField> = all.iter().map(|(_, v)| v.clone()).collect();
            for (name, ex) in [("exclusion <Du,G,F2>", &excl_u[..]), ("exclusion <Dt,F2>", &excl_t[..])] {
                let mut rows_in: Vec<VectorField> = span.clone();
                rows_in.extend(ex.iter().cloned());
                rows_in.push(g("1"));
                let rows = coordinate_rows(&rows_in);
                let dim = rows[0].len();
                let (a, rest) = rows.split_at(span.len());
                let (b, unit) = rest.split_at(ex.len());
                let meet = Subspace::span(dim, a.to_vec()).intersection(&Subspace::span(dim, b.to_vec()));
                let g1 = Subspace::span(dim, unit.to_vec());
                r.push(Check::of_bool(name, meet.same(&g1), || format!("intersection has dimension {}", meet.dim())));
            }
            r
        })
        .collect();
    VerificationReport::new("subalgebras", cases)
}

fn random_rational(rng: &mut ChaCha8Rng) -> Expr {
    loop {
        let n = rng.gen_range(-9i64..=9);
        if n != 0 {
            return Expr::frac(n, rng.gen_range(1..=7));
        }
    }
}

/// Elementary transformations, discrete maps and the group law.
pub fn verify_equivalence_group(s: &Settings) -> VerificationReport {
    let ch = chart();
    let (f, g) = (ch.func("f"), ch.func("g"));
    let (t, x, one, zero) = (p("t"), p("x"), Expr::one(), Expr::zero());
    let rows: Vec<(&str, EquivParams, Result<PointTransform, String>, Expr, Expr)> = vec![
        ("Pt", EquivParams::pt(p("c0")), pt(p("t + c0"), x.clone(), one.clone(), zero.clone()), f.clone(), g.clone()),
        ("Dt", EquivParams::dt(p("c1")), pt(p("c1*t"), x.clone(), one.clone(), zero.clone()), p("c1^(-2)*f"), p("c1^(-2)*g")),
        (
            "D(phi)",
            EquivParams::d(p("phi"), None),
            pt(t.clone(), p("phi"), one.clone(), zero.clone()),
            p("phi_x^2*f"),
            p("g + phi_xx*u_x*f/phi_x"),
        ),
        ("Du", EquivParams::du(p("c2")), pt(t.clone(), x.clone(), p("c2"), zero.clone()), f.clone(), p("c2*g")),
        ("F1", EquivParams::f1(p("c3")), pt(t.clone(), x.clone(), one.clone(), p("c3*t")), f.clone(), g.clone()),
        ("F2", EquivParams::f2(p("c4")), pt(t.clone(), x.clone(), one.clone(), p("c4*t^2")), f.clone(), p("g + 2*c4")),
        ("G(psi)", EquivParams::g(p("psi")), pt(t.clone(), x.clone(), one.clone(), p("psi")), f.clone(), p("g - psi_xx*f")),
    ];
    let mut cases = Vec::new();
    for (name, ep, tr, fw, gw) in rows {
        let mut r = CaseReport::new(name);
        match tr.and_then(|q| transform_equation(&q, &f, &g).map_err(|e| e.to_string())) {
            Ok(res) => {
                r.push(zero_check("f row", &(&res.f_old - &fw)));
                r.push(zero_check("g row", &(&res.g_old - &gw)));
                match apply_equivalence(&ep, &f, &g) {
                    Ok((fe, ge)) => {
                        r.push(zero_check("f agrees with equivalence action", &(&res.f_old - fe)));
                        r.push(zero_check("g agrees with equivalence action", &(&res.g_old - ge)));
                    }
                    Err(e) => r.push(error_check("equivalence action", e)),
                }
            }
            Err(e) => r.push(error_check("transform", e)),
        }
        cases.push(r);
    }
    let discrete = [
        ("t->-t", pt(p("-t"), x.clone(), one.clone(), zero.clone()), f.clone(), g.clone()),
        ("x->-x", pt(t.clone(), p("-x"), one.clone(), zero.clone()), f.clone(), g.clone()),
        ("u->-u", pt(t.clone(), x.clone(), Expr::int(-1), zero.clone()), f.clone(), -&g),
    ];
    for (name, tr, fw, gw) in discrete {
        let mut r = CaseReport::new(name);
        match tr.and_then(|q| transform_equation(&q, &f, &g).map_err(|e| e.to_string())) {
            Ok(res) => {
                r.push(zero_check("f row", &(&res.f_old - &fw)));
                r.push(zero_check("g row", &(&res.g_old - &gw)));
            }
            Err(e) => r.push(error_check("transform", e)),
        }
        cases.push(r);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(s.seed ^ 0x9e37);
    let mut law = CaseReport::new("group law");
    for round in 0..3 {
        let mut c = || random_rational(&mut rng);
        let chain = [
            EquivParams::g(p("psi")),
            EquivParams::f2(c()),
            EquivParams::f1(c()),
            EquivParams::du(c()),
            EquivParams::d(p("phi"), None),
            EquivParams::pt(c()),
            EquivParams::dt(c()),
        ];
        let mut total = EquivParams::identity();
        let mut state = AugState::with(f.clone(), g.clone());
        for e in &chain {
            total = compose(e, &total);
            state = act(e, &state);
        }
        let direct = act(&total, &AugState::with(f.clone(), g.clone()));
        for (n, a, b) in [
            ("t", &state.t, &direct.t),
            ("x", &state.x, &direct.x),
            ("u", &state.u, &direct.u),
            ("u_x", &state.ux, &direct.ux),
            ("f", &state.f, &direct.f),
            ("g", &state.g, &direct.g),
        ] {
            law.push(zero_check(format!("round {round}: composite {n}"), &(a - b)));
        }
        let u0 = &total.c4 * t.powi(2) + &total.c3 * &t + &total.psi;
        match pt(&total.c1 * &t + &total.c0, total.phi.clone(), total.c2.clone(), u0)
            .and_then(|q| transform_equation(&q, &f, &g).map_err(|e| e.to_string()))
        {
            Ok(res) => {
                law.push(zero_check(format!("round {round}: point transform f"), &(&res.f_old - &direct.f)));
                law.push(zero_check(format!("round {round}: point transform g"), &(&res.g_old - &direct.g)));
            }
            Err(e) => law.push(error_check(format!("round {round}: point transform"), e)),
        }
    }
    cases.push(law);
    VerificationReport::new("group", cases)
}

/// Run the named suites and merge them; `["all"]` or an empty list runs everything.
pub fn verify_all(names: &[&str], s: &Settings) -> Result<VerificationReport, String> {
    let names: Vec<&str> = if names.is_empty() || names == ["all"] { SUITES.to_vec() } else { names.to_vec() };
    let mut parts = Vec::new();
    for n in names {
        parts.push(match n {
            "table" => verify_table(s),
            "algebra" => verify_equivalence_algebra(s),
            "adjoint" => verify_adjoint_actions(s),
            "reductions" => verify_reductions(s),
            "potential" => verify_potential_link(s),
            "subalgebras" => verify_subalgebra_lists(s),
            "group" => verify_equivalence_group(s),
            other => return Err(format!("unknown suite {other}")),
        });
    }
    Ok(VerificationReport::merge("all", parts))
}
