mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use common::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use wavesym::classif::{
    builtin_catalog, find_case, verify_adjoint_actions, verify_cases, verify_equivalence_algebra,
    verify_equivalence_group, verify_potential_link, verify_reductions, verify_table, CaseGroup, Settings,
    VerificationReport,
};
use wavesym::detsys::{check_symmetry, generate_determining_system, ClassSpec, Stage};
use wavesym::expr::{diff, is_zero, Symbol};
use wavesym::liealg::{close_or_fail, flag_automorphism_solve, Subspace};
use wavesym::vecfield::{generators as gen, Space};
use wavesym::{int, Chart, Expr, VectorField};

type Outcome = Result<String, String>;

fn ensure(ok: bool, what: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(what())
    }
}

fn clean(r: &VerificationReport) -> Outcome {
    let bad: Vec<String> = r
        .cases
        .iter()
        .filter(|c| c.status != wavesym::classif::Status::Pass)
        .map(|c| format!("{}: {:?}", c.id, c.failures().iter().map(|k| &k.name).collect::<Vec<_>>()))
        .collect();
    ensure(bad.is_empty() && r.summary.undecided == 0, || bad.join("; "))?;
    Ok(format!("{} entries", r.summary.total))
}

fn commutator_table() -> Outcome {
    clean(&verify_equivalence_algebra(&Settings::default()))
}

fn megaideal_chain() -> Outcome {
    let fields = vec![
        ("G(1)".to_string(), gen::g(&Expr::one())),
        ("F1".to_string(), gen::f1()),
        ("F2".to_string(), gen::f2()),
        ("Pt".to_string(), gen::pt()),
        ("Dt".to_string(), gen::dt()),
    ];
    let a = close_or_fail(&fields).map_err(|e| e.to_string())?.algebra;
    let c = |idx: &[usize]| Subspace::coordinate(5, idx);
    let ds = a.derived_series();
    ensure(ds[1].same(&c(&[0, 1, 2, 3])), || "m' differs".into())?;
    ensure(ds[2].same(&c(&[0, 1])), || "m'' differs".into())?;
    ensure(a.center().same(&c(&[0])), || "center differs".into())?;
    ensure(a.centralizer(&ds[2]).same(&c(&[0, 1, 2])), || "centralizer of m'' differs".into())?;
    let flag: Vec<Subspace> = (1..=5).map(|k| c(&(0..k).collect::<Vec<_>>())).collect();
    let fam = flag_automorphism_solve(&a, &flag).map_err(|e| e.to_string())?;
    let s = |n: &str| Expr::sym(&Symbol::param(n));
    ensure(fam.implies(&s("a55"), &Expr::one()), || "a55 = 1 not implied".into())?;
    ensure(fam.implies(&s("a34"), &Expr::zero()), || "a34 = 0 not implied".into())?;
    ensure(fam.implies(&s("a24"), &(s("a44") * s("a35"))), || "a24 relation not implied".into())?;
    ensure(fam.implies(&s("a14"), &(s("a44") * s("a25") - s("a45") * s("a24"))), || "a14 relation not implied".into())?;
    ensure(fam.invariant.contains(&vec![0, 1, 3]), || format!("invariant list {:?}", fam.invariant))?;
    Ok("derived series, center, centralizer and automorphism relations".into())
}

fn proportional(a: &Expr, b: &Expr) -> bool {
    [1, -1, 2, -2].iter().any(|&k| is_zero(&(a - b.scale(&int(k)))).is_zero())
}

fn determining_rows() -> Outcome {
    let ch = Chart::base();
    let (t, x, u, ux) = (Symbol::t(), Symbol::x(), Symbol::u(), Symbol::jet(0, 1));
    let d = |e: &Expr, vs: &[&Symbol]| vs.iter().fold(e.clone(), |a, v| diff(&a, v));
    let two = |e: &Expr| e.scale(&int(2));
    let mut tx = ch.clone();
    tx.add_func("tau", &[t.clone(), x.clone()]);
    tx.add_func("xi", &[t.clone(), x.clone()]);
    let (tau, xi, eta) = (tx.func("tau"), tx.func("xi"), ch.func("eta"));
    let (f, g) = (ch.func("f"), ch.func("g"));
    let uxe = Expr::sym(&ux);
    let w = d(&eta, &[&x]) + (d(&eta, &[&u]) - d(&xi, &[&x])) * &uxe;
    let rows = [
        (
            "u_xx",
            Expr::sym(&Symbol::jet(0, 2)),
            two(&((d(&tau, &[&t]) - d(&xi, &[&x])) * &f)) + &xi * d(&f, &[&x]) + &w * d(&f, &[&ux]),
        ),
        (
            "u_t",
            Expr::sym(&Symbol::jet(1, 0)),
            two(&d(&eta, &[&t, &u])) - d(&tau, &[&t, &t]) + d(&tau, &[&x, &x]) * &f + d(&tau, &[&x]) * d(&g, &[&ux]),
        ),
        ("u_t^2", Expr::sym(&Symbol::jet(1, 0)).powi(2), d(&eta, &[&u, &u])),
        ("xi_t = f tau_x", Expr::sym(&Symbol::jet(1, 1)), d(&xi, &[&t]) - &f * d(&tau, &[&x])),
        ("tau_x f_ux = 0", Expr::sym(&Symbol::jet(0, 2)) * Expr::sym(&Symbol::jet(1, 0)), d(&tau, &[&x]) * d(&f, &[&ux])),
    ];
    let sys = generate_determining_system(&ClassSpec::symbolic()).map_err(|e| e.to_string())?;
    for (name, m, want) in &rows {
        let got = sys.coefficient(Stage::Restricted, m);
        ensure(proportional(&got, want), || format!("row {name}: {got}"))?;
    }
    let rest = d(&eta, &[&t, &t]) - d(&xi, &[&t, &t]) * &uxe
        - (d(&eta, &[&x, &x]) + (two(&d(&eta, &[&x, &u])) - d(&xi, &[&x, &x])) * &uxe) * &f
        + (d(&eta, &[&u]) - two(&d(&tau, &[&t]))) * &g
        - &xi * d(&g, &[&x])
        - &w * d(&g, &[&ux]);
    let shown = sys.coefficient(Stage::Restricted, &Expr::one()) + d(&eta, &[&u, &u]) * &f * uxe.powi(2);
    ensure(proportional(&shown, &rest), || format!("constant row: {shown}"))?;

    let (gtau, gxi) = (ch.func("tau"), ch.func("xi"));
    let gen_row = |m: Expr| sys.coefficient(Stage::General, &m);
    let j = |a, b| Expr::sym(&Symbol::jet(a, b));
    let xi_u = gen_row(j(1, 1) * j(1, 0));
    ensure(proportional(&xi_u, &d(&gxi, &[&u])), || format!("xi_u split: {xi_u}"))?;
    let wt = d(&gtau, &[&x]) + d(&gtau, &[&u]) * &uxe;
    let xi_t = gen_row(j(1, 1));
    ensure(proportional(&xi_t, &(d(&gxi, &[&t]) - &f * &wt)), || format!("xi_t split: {xi_t}"))?;
    let tau_u = gen_row(j(0, 2) * j(1, 0));
    ensure(proportional(&tau_u, &(two(&(&f * d(&gtau, &[&u]))) - &wt * d(&f, &[&ux]))), || format!("tau_u row: {tau_u}"))?;
    // Differentiating the xi_t row in u_x and subtracting it from the tau_u row leaves 3 f tau_u.
    let ks = [1, -1, 2, -2];
    let scaled = |e: &Expr, k: i64| e.scale(&wavesym::rat(1, k));
    let target = f.scale(&int(3)) * d(&gtau, &[&u]);
    let eliminated = ks.iter().any(|&a| {
        ks.iter().any(|&b| is_zero(&(scaled(&tau_u, a) + diff(&scaled(&xi_t, b), &ux) - &target)).is_zero())
    });
    ensure(eliminated, || "elimination of f_ux does not leave f tau_u".into())?;
    ensure(diff(&wt, &ux) == d(&gtau, &[&u]), || "tau_u is not the u_x coefficient".into())?;
    Ok("restricted rows and four preliminary splits".into())
}

fn kernel() -> Outcome {
    let (f, g) = (Chart::base().func("f"), Chart::base().func("g"));
    for q in ["1@t", "1@u", "t@u"] {
        let v = VectorField::parse(q, Space::Base, &Chart::base()).map_err(|e| e.to_string())?;
        let chk = check_symmetry(&f, &g, &v).map_err(|e| e.to_string())?;
        ensure(chk.residual.is_zero(), || format!("{q}: {}", chk.residual))?;
    }
    Ok("residuals vanish structurally".into())
}

fn table() -> Outcome {
    let r = verify_table(&Settings::default());
    let detail = clean(&r)?;
    let c22 = r.cases.iter().find(|c| c.id == "22").ok_or("case 22 missing")?;
    ensure(!c22.dimensions_within_ansatz.is_empty(), || "case 22 has no dimension record".into())?;
    ensure(c22.dimensions_within_ansatz.iter().all(|d| d.dimension == 7), || "case 22 dimension".into())?;
    let table_cases = r.cases.iter().filter(|c| c.id.parse::<u32>().is_ok()).count();
    ensure(table_cases == 22, || format!("{table_cases} table cases"))?;
    Ok(format!("{detail}, case 22 dimension 7"))
}

fn subclass_lists() -> Outcome {
    let rest: Vec<_> = builtin_catalog().into_iter().filter(|c| c.group != CaseGroup::Table).collect();
    ensure(rest.len() == 10, || format!("{} non-table entries", rest.len()))?;
    let s = Settings::default();
    let a = clean(&verify_cases("lists", &rest, &s))?;
    let b = clean(&verify_reductions(&s))?;
    Ok(format!("lists {a}, reductions {b}"))
}

fn equivalence_group() -> Outcome {
    clean(&verify_equivalence_group(&Settings::default()))
}

fn adjoint() -> Outcome {
    clean(&verify_adjoint_actions(&Settings::default()))
}

fn potential() -> Outcome {
    clean(&verify_potential_link(&Settings::default()))
}

fn property_loops() -> Outcome {
    let mut r = ChaCha8Rng::seed_from_u64(0xacce);
    let mut fails = Vec::new();
    for i in 0..200 {
        let (a, b, c) = (base_field(&mut r), base_field(&mut r), base_field(&mut r));
        if !jacobi(&a, &b, &c).is_zero() {
            fails.push(format!("jacobi #{i}"));
        }
    }
    for i in 0..100 {
        let (a, b) = (fiber_field(&mut r), fiber_field(&mut r));
        if !prolongation_defect(&a, &b).is_zero() {
            fails.push(format!("prolongation #{i}"));
        }
    }
    for i in 0..50 {
        let (a, b) = (equiv_params(&mut r), equiv_params(&mut r));
        if !functoriality_holds(&a, &b, &algebra_element(&mut r)) {
            fails.push(format!("pushforward #{i}"));
        }
    }
    for i in 0..200 {
        if !dtdx_defect(&jet_expr(&mut r)).is_zero() {
            fails.push(format!("D_t D_x #{i}"));
        }
    }
    ensure(fails.is_empty(), || fails.join(", "))?;
    Ok("200 Jacobi, 100 prolongation, 50 pushforward, 200 D_t D_x".into())
}

#[test]
fn acceptance() {
    let _ = find_case("22").expect("catalog loads");
    let criteria: [(&str, fn() -> Outcome, u64); 10] = [
        ("commutator table", commutator_table, 5),
        ("megaideal chain", megaideal_chain, 5),
        ("determining system", determining_rows, 5),
        ("kernel", kernel, 1),
        ("classification table", table, 600),
        ("subclass lists and reductions", subclass_lists, 60),
        ("equivalence group", equivalence_group, 30),
        ("adjoint actions", adjoint, 10),
        ("potential link", potential, 5),
        ("property suites", property_loops, 120),
    ];
    let mut failed = Vec::new();
    for (i, (name, run, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let out = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            Err(p.downcast_ref::<String>().cloned().or(p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default())
        });
        let took = start.elapsed();
        let out = match out {
            Ok(d) if took > Duration::from_secs(*budget) => Err(format!("{d}; over the {budget} s budget")),
            o => o,
        };
        match &out {
            Ok(d) => println!("criterion {:>2} {name}: PASS ({} ms) {d}", i + 1, took.as_millis()),
            Err(e) => {
                println!("criterion {:>2} {name}: FAIL ({} ms) {e}", i + 1, took.as_millis());
                failed.push(i + 1);
            }
        }
    }
    assert!(failed.is_empty(), "failing criteria: {failed:?}");
}
