use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::expr::{subst_func, substitute, symbols, Chart, Expr, Flag, Symbol};
use crate::vecfield::{Space, VectorField};
use crate::{rat, Rational};

/// Which published list an entry belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CaseGroup {
    /// Main table of extensions, ids 1 to 22.
    Table,
    /// Extensions for `u_tt = ±u_x^-4 u_xx + mu(x) u_x^-3`.
    SubclassMu,
    /// Extensions for `u_tt = theta(x) u_x^-4 u_xx`.
    SubclassTheta,
    /// Equations with two independent operators of the form `P(D(phi) + G(psi) + c F2)`.
    TwoOperators,
}

/// A restriction `expr != 0` on the parameters of an entry.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Constraint {
    pub label: String,
    pub nonzero: Expr,
}

/// Stand-in body for an arbitrary function in dimension checks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Representative {
    pub name: String,
    pub params: Vec<Symbol>,
    pub body: Expr,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassificationCase {
    pub id: String,
    pub group: CaseGroup,
    pub f: Expr,
    pub g: Expr,
    pub constraints: Vec<Constraint>,
    /// Extension generators; the kernel `d_t, d_u, t d_u` is implicit.
    pub generators: Vec<VectorField>,
    pub expected_dimension: usize,
    pub representatives: Vec<Representative>,
    pub notes: Vec<String>,
}

/// Values assigned to the parameters of an entry.
pub type Assignment = BTreeMap<Symbol, Rational>;

impl ClassificationCase {
    /// Parameter symbols occurring in `f`, `g` or the generators.
    pub fn parameters(&self) -> Vec<Symbol> {
        let mut s = symbols(&self.f);
        s.extend(symbols(&self.g));
        for q in &self.generators {
            for c in q.coeffs().values() {
                s.extend(symbols(c));
            }
        }
        s.into_iter().filter(|x| x.is_param()).collect()
    }

    /// Whether `f` or `g` contain arbitrary function symbols.
    pub fn has_arbitrary_functions(&self) -> bool {
        self.representatives.iter().any(|r| self.f.may_contain_func(&r.name) || self.g.may_contain_func(&r.name))
    }

    /// Up to `n` parameter assignments satisfying every constraint, chosen
    /// deterministically from per-parameter pools of generic values.
    pub fn samples(&self, n: usize) -> Vec<Assignment> {
        let params = self.parameters();
        if params.is_empty() {
            return vec![Assignment::new()];
        }
        let pools: Vec<Vec<Rational>> = params.iter().map(pool).collect();
        let mut out: Vec<Assignment> = Vec::new();
        for k in 0..64 {
            let a: Assignment =
                params
                .iter()
                .zip(&pools)
                .enumerate()
                .map(|(i, (s, p))| (s.clone(), p[(k * (i + 1) + i) % p.len()].clone()))
                .collect();
            if out.contains(&a) {
                continue;
            }
            let ok = self.constraints.iter().all(|c| match instantiate(&c.nonzero, &a).as_num() {
                Some(v) => !num_traits::Zero::is_zero(v),
                None => false,
            });
            if ok {
                out.push(a);
                if out.len() == n {
                    break;
                }
            }
        }
        out
    }

    /// Number of distinct assignments the sampling pools can produce.
    pub fn distinct_assignments(&self) -> usize {
        self.parameters()
            .iter()
            .map(|s| {
                let mut v = pool(s);
                v.sort();
                v.dedup();
                v.len()
            })
            .product()
    }

    /// `f`, `g` with parameters and arbitrary functions replaced.
    pub fn concrete(&self, a: &Assignment) -> (Expr, Expr) {
        let sub = |e: &Expr| {
            let mut e = instantiate(e, a);
            for r in &self.representatives {
                e = subst_func(&e, &r.name, &r.params, &r.body);
            }
            e
        };
        (sub(&self.f), sub(&self.g))
    }

    pub fn concrete_generators(&self, a: &Assignment) -> Vec<VectorField> {
        self.generators.iter().map(|q| q.map(|c| instantiate(c, a))).collect()
    }
}

/// Substitute parameter values.
pub fn instantiate(e: &Expr, a: &Assignment) -> Expr {
    if a.is_empty() {
        return e.clone();
    }
    let m: BTreeMap<Symbol, Expr> = a.iter().map(|(s, v)| (s.clone(), Expr::num(v.clone()))).collect();
    substitute(e, &m)
}

/// Printable form of an assignment.
pub fn describe(a: &Assignment) -> String {
    if a.is_empty() {
        return "-".into();
    }
    a.iter().map(|(s, v)| format!("{}={v}", s.name())).collect::<Vec<_>>().join(",")
}

fn pool(s: &Symbol) -> Vec<Rational> {
    let v = |xs: &[(i64, i64)]| xs.iter().map(|&(n, d)| rat(n, d)).collect::<Vec<_>>();
    match (s.flag(), s.name()) {
        (Flag::Sign, _) => v(&[(1, 1), (-1, 1), (1, 1)]),
        (Flag::Idempotent, _) => v(&[(0, 1), (1, 1), (1, 1)]),
        (_, "q") => v(&[(3, 1), (-2, 1), (5, 2), (-1, 2)]),
        (_, "nu") => v(&[(3, 2), (-2, 3), (5, 1), (7, 4)]),
        _ => v(&[(1, 3), (-3, 4), (5, 2), (2, 7), (-5, 3)]),
    }
}

struct Builder {
    chart: Chart,
}

impl Builder {
    fn e(&self, s: &str) -> Expr {
        self.chart.parse(s).unwrap_or_else(|e| panic!("catalog expression {s}: {e}"))
    }

    fn q(&self, s: &str) -> VectorField {
        VectorField::parse(s, Space::Base, &self.chart).unwrap_or_else(|e| panic!("catalog field {s}: {e}"))
    }

    fn reps(&self) -> Vec<Representative> {
        let w = Symbol::coord("w");
        let x = Symbol::x();
        let mut ch = self.chart.clone();
        ch.add_symbol(w.clone());
        let r = |name: &str, p: &Symbol, body: &str| Representative {
            name: name.into(),
            params: vec![p.clone()],
            body: ch.parse(&body.replace('@', p.name())).expect("representative body"),
        };
        vec![
            r("F", &w, "2 + @^2"),
            r("G", &w, "@^3 + @"),
            r("mu", &x, "@^3 + @"),
            r("theta", &x, "2 + @^2"),
        ]
    }

    #[allow(clippy::too_many_arguments)]
    fn case(
        &self,
        id: &str,
        group: CaseGroup,
        f: &str,
        g: &str,
        gens: &[&str],
        constraints: &[(&str, &str)],
        notes: &[&str],
    ) -> ClassificationCase {
        let generators: Vec<VectorField> = gens.iter().map(|s| self.q(s)).collect();
        ClassificationCase {
            id: id.into(),
            group,
            f: self.e(f),
            g: self.e(g),
            constraints: constraints
                .iter()
                .map(|(l, e)| Constraint { label: (*l).into(), nonzero: self.e(e) })
                .collect(),
            expected_dimension: 3 + generators.len(),
            generators,
            representatives: self.reps(),
            notes: notes.iter().map(|s| (*s).into()).collect(),
        }
    }
}

/// The kernel fields `d_t`, `d_u`, `t d_u`.
pub fn kernel() -> Vec<(String, VectorField)> {
    let c = Chart::base();
    ["1@t", "1@u", "t@u"]
        .iter()
        .map(|s| (s.to_string(), VectorField::parse(s, Space::Base, &c).expect("kernel field")))
        .collect()
}

/// Every classification result as data.
pub fn builtin_catalog() -> Vec<ClassificationCase> {
    use CaseGroup::*;
    let b = Builder { chart: Chart::base() };
    let om = "(x - eps*lnabs(u_x))";
    let gen1 = ["t^2@t + t*u@u", "2*t@t + u@u"];
    let with1 = |extra: &[&'static str]| -> Vec<&'static str> {
        let mut v: Vec<&'static str> = gen1.to_vec();
        v.extend_from_slice(extra);
        v
    };
    let mut out = vec![
        b.case(
            "1",
            Table,
            &format!("F{om}*u_x^(-1)"),
            &format!("G{om} + 2*lnabs(u_x)"),
            &["t@t + 2*eps@x + 2*(u + t^2)@u"],
            &[],
            &["F, G arbitrary functions of the similarity variable"],
        ),
        b.case(
            "2",
            Table,
            &format!("F{om}*abs(u_x)^(2*p)"),
            &format!("G{om}*abs(u_x)^(2*p)*u_x"),
            &["-p*t@t + eps@x + u@u"],
            &[],
            &["F, G arbitrary functions of the similarity variable"],
        ),
        b.case("3", Table, "F(u_x)*exp(2*x)", "G(u_x)*exp(2*x)", &["t@t - 1@x"], &[], &[]),
        b.case("4", Table, "F(x)*exp(2*u_x)", "G(x)*exp(2*u_x)", &["t@t - x@u"], &[], &[]),
        b.case("5", Table, "F(u_x)", "G(u_x) + 2*eps*x", &["1@x + eps*t^2@u"], &[], &[]),
        b.case("6", Table, "delta*u_x^(-4)", "G(x)*u_x^(-3)", &gen1, &[], &["same algebra as list entry mu:0"]),
        b.case(
            "7",
            Table,
            "delta*exp(2*x)*abs(u_x)^(2*p)",
            "nu*exp(2*x)*abs(u_x)^(2*p)*u_x",
            &["p*1@x - u@u", "t@t - 1@x"],
            &[("p != 0", "p"), ("p != -2", "p + 2"), ("nu(p+1) != delta", "nu*(p + 1) - delta")],
            &["reduces to the form of case 19 for p != -1"],
        ),
        b.case(
            "8",
            Table,
            "delta*x^2*exp(2*u_x)",
            "nu*x*exp(2*u_x)",
            &["x@x + u@u", "t@t - x@u"],
            &[("nu != delta", "nu - delta")],
            &["similar to the case 21 form via u~ = u + x ln|x| - x"],
        ),
        b.case("9", Table, "F(u_x)", "0", &["1@x", "t@t + x@x + u@u"], &[], &[]),
        b.case("10", Table, "delta", "exp(-u_x)", &["1@x", "t@t + x@x + (u + x)@u"], &[], &[]),
        b.case("11", Table, "delta*exp(2*u_x)", "2*u_x", &["1@x", "t@t + 2*x@x + (2*u + x + t^2)@u"], &[], &[]),
        b.case(
            "12",
            Table,
            "delta*exp(2*u_x)",
            "exp(u_x) + 2*eps2*x",
            &["x@x + (u + x)@u", "1@x + eps2*t^2@u"],
            &[],
            &[],
        ),
        b.case(
            "13",
            Table,
            "delta*exp(2*u_x)",
            "exp(q*u_x)",
            &["1@x", "(1 - q)*t@t + (2 - q)*x@x + ((2 - q)*u + x)@u"],
            &[("q != 0", "q")],
            &[],
        ),
        b.case(
            "14",
            Table,
            "delta*abs(u_x)^(2*p)",
            "abs(u_x)^q",
            &["1@x", "(1 + p - q)*t@t + (1 + 2*p - q)*x@x + (2 + 2*p - q)*u@u"],
            &[("q != 0", "q"), ("(p,q) != (-1,-1)", "(p + 1)^2 + (q + 1)^2"), ("(p,q) != (-2,-3)", "(p + 2)^2 + (q + 3)^2")],
            &[],
        ),
        b.case(
            "15",
            Table,
            "delta*abs(u_x)^(2*p)",
            "eps*abs(u_x)^(p + 1/2) + 2*x",
            &["1@x + t^2@u", "t@t + (1 + 2*p)*x@x + (3 + 2*p)*u@u"],
            &[("eps = 0 if p = -1/2", "1 - eps + eps*(2*p + 1)")],
            &["eps = 0 mod equivalence when p = -1/2 (sampling exclusion only)"],
        ),
        b.case(
            "16",
            Table,
            "delta*abs(u_x)^(2*p)",
            "2*lnabs(u_x)",
            &["1@x", "(1 + p)*t@t + (1 + 2*p)*x@x + (2*(1 + p)*u + t^2)@u"],
            &[],
            &["contains entry pair:1 at p = -1"],
        ),
        b.case(
            "17",
            Table,
            "delta*u_x^(-1)",
            "2*lnabs(u_x) + 2*x",
            &["1@x + t^2@u", "t@t + 2*(u + t^2)@u"],
            &[],
            &[],
        ),
        b.case("18", Table, "delta*u_x^(-4)", "u_x^(-3)", &with1(&["1@x"]), &[], &[]),
        b.case(
            "19",
            Table,
            "delta*u_x^(-4)",
            "nu*x^(-1)*u_x^(-3)",
            &with1(&["2*x@x + u@u"]),
            &[("nu != 0", "nu")],
            &[],
        ),
        b.case(
            "20",
            Table,
            "delta*abs(u_x)^(2*p)",
            "0",
            &["1@x", "t@t + x@x + u@u", "p*t@t - u@u"],
            &[("p != -2", "p + 2"), ("p != 0", "p")],
            &["contains entry pair:2 at p = -1"],
        ),
        b.case("21", Table, "delta*exp(2*u_x)", "0", &["1@x", "t@t + x@x + u@u", "t@t - x@u"], &[], &[]),
        b.case(
            "22",
            Table,
            "delta*u_x^(-4)",
            "0",
            &with1(&["1@x", "2*x@x + u@u"]),
            &[],
            &["maximal dimension seven; not induced by a subalgebra of the equivalence algebra"],
        ),
        b.case("mu:0", SubclassMu, "delta*u_x^(-4)", "mu(x)*u_x^(-3)", &gen1, &[], &[]),
        b.case("mu:1", SubclassMu, "delta*u_x^(-4)", "u_x^(-3)", &with1(&["1@x"]), &[], &[]),
        b.case(
            "mu:2",
            SubclassMu,
            "delta*u_x^(-4)",
            "nu*x^(-1)*u_x^(-3)",
            &with1(&["2*x@x + u@u"]),
            &[("nu != 0", "nu")],
            &[],
        ),
        b.case("mu:3", SubclassMu, "delta*u_x^(-4)", "0", &with1(&["1@x", "2*x@x + u@u"]), &[], &[]),
        b.case("theta:0", SubclassTheta, "theta(x)*u_x^(-4)", "0", &gen1, &[], &[]),
        b.case("theta:1", SubclassTheta, "delta*exp(2*x)*u_x^(-4)", "0", &with1(&["2*1@x + u@u"]), &[], &[]),
        b.case(
            "theta:2",
            SubclassTheta,
            "delta*abs(x)^(2*p)*u_x^(-4)",
            "0",
            &with1(&["2*x@x + (p + 1)*u@u"]),
            &[("p != 0", "p")],
            &[],
        ),
        b.case("theta:3", SubclassTheta, "delta*u_x^(-4)", "0", &with1(&["1@x", "2*x@x + u@u"]), &[], &[]),
        b.case(
            "pair:1",
            TwoOperators,
            "delta*u_x^(-2)",
            "2*lnabs(u_x)",
            &["1@x", "x@x - t^2@u"],
            &[],
            &["merged into case 16 (p = -1)"],
        ),
        b.case(
            "pair:2",
            TwoOperators,
            "delta*u_x^(-2)",
            "0",
            &["1@x", "x@x", "t@t + u@u"],
            &[],
            &["merged into case 20 (p = -1)"],
        ),
    ];
    out.sort_by_key(|c| sort_key(&c.id));
    out
}

fn sort_key(id: &str) -> (u8, u32, String) {
    match id.parse::<u32>() {
        Ok(n) => (0, n, String::new()),
        Err(_) => (1, 0, id.to_string()),
    }
}

/// Look up an entry by id.
pub fn find_case(id: &str) -> Option<ClassificationCase> {
    builtin_catalog().into_iter().find(|c| c.id == id)
}
