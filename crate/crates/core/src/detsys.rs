//! Determining equations for Lie symmetries of `u_tt = f(x,u_x) u_xx + g(x,u_x)`,
//! symmetry checks for concrete equations and symmetry algebras within a finite
//! ansatz.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::expr::{
    collect, diff, is_zero, monomial_coefficients, on_shell, parse, subst_func, symbols, CalcError, Chart,
    CollectError, Expr, ParseError, Symbol, Verdict, JET_CAP,
};
use crate::liealg::{nullspace, rref};
use crate::vecfield::{prolong2, FieldError, VectorField};
use crate::Rational;

#[derive(Clone, Debug, Error, PartialEq)]
pub enum DetError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Calc(#[from] CalcError),
    #[error(transparent)]
    Collect(#[from] CollectError),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("parameter {0} must be instantiated before solving")]
    Uninstantiated(String),
    #[error("unknown {name} depends on {var}, which the stage excludes")]
    Stage { name: String, var: String },
    #[error("solution {index} failed its symmetry check: {verdict:?}")]
    Rejected { index: usize, verdict: Verdict },
}

fn t() -> Expr {
    Expr::sym(&Symbol::t())
}
fn x() -> Expr {
    Expr::sym(&Symbol::x())
}
fn u() -> Expr {
    Expr::sym(&Symbol::u())
}
fn jet(nt: u8, nx: u8) -> Expr {
    Expr::sym(&Symbol::jet(nt, nx))
}

/// An equation `u_tt = f u_xx + g` of the class, with `f` and `g` either the
/// arbitrary functions `f(x,u_x)`, `g(x,u_x)` or concrete expressions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassSpec {
    pub f: Expr,
    pub g: Expr,
}

impl ClassSpec {
    /// The whole class: `f`, `g` symbolic.
    pub fn symbolic() -> ClassSpec {
        let c = Chart::base();
        ClassSpec { f: c.func("f"), g: c.func("g") }
    }

    pub fn new(f: Expr, g: Expr) -> ClassSpec {
        ClassSpec { f, g }
    }

    pub fn lhs() -> Symbol {
        Symbol::jet(2, 0)
    }

    pub fn rhs(&self) -> Expr {
        &self.f * jet(0, 2) + &self.g
    }

    /// `u_tt - f u_xx - g`.
    pub fn equation(&self) -> Expr {
        jet(2, 0) - self.rhs()
    }

    /// Verdict of the test `f = 0`; a member of the class needs it nonzero.
    pub fn degenerate(&self) -> Verdict {
        is_zero(&self.f)
    }

    /// Whether `(f_{u_x}, g_{u_x u_x}) = (0, 0)`, i.e. the equation is linear.
    pub fn linear(&self) -> bool {
        let ux = Symbol::jet(0, 1);
        is_zero(&diff(&self.f, &ux)).is_zero() && is_zero(&diff(&diff(&self.g, &ux), &ux)).is_zero()
    }

    /// Arguments of `f` and `g` other than `(x, u_x)` and parameters.
    pub fn stray_arguments(&self) -> Vec<Symbol> {
        let ok = [Symbol::x(), Symbol::jet(0, 1)];
        let mut all = symbols(&self.f);
        all.extend(symbols(&self.g));
        all.into_iter().filter(|s| !s.is_param() && !ok.contains(s)).collect()
    }
}

/// `pr^(2) Q (u_tt - f u_xx - g)` restricted to `u_tt = f u_xx + g`.
pub fn invariance_residual(spec: &ClassSpec, q: &VectorField) -> Result<Expr, DetError> {
    let pr = prolong2(q)?;
    let r = pr.apply(&spec.equation());
    Ok(on_shell(&r, &spec.rhs(), JET_CAP)?)
}

/// Which unknown-coefficient functions are allowed to depend on `u`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    /// `tau, xi, eta` of `(t, x, u)`.
    General,
    /// `tau, xi` of `(t, x)` after the first splitting; `eta` of `(t, x, u)`.
    Restricted,
}

impl Stage {
    pub fn params(self, name: &str) -> Vec<Symbol> {
        match (self, name) {
            (Stage::Restricted, "tau" | "xi") => vec![Symbol::t(), Symbol::x()],
            _ => vec![Symbol::t(), Symbol::x(), Symbol::u()],
        }
    }

    fn unknown(self, name: &str) -> Expr {
        let mut c = Chart::base();
        c.add_func(name, &self.params(name));
        c.func(name)
    }

    /// The field `tau d_t + xi d_x + eta d_u` with unknown coefficients.
    pub fn field(self) -> VectorField {
        VectorField::base(self.unknown("tau"), self.unknown("xi"), self.unknown("eta")).expect("base field")
    }
}

/// One determining equation `coefficient = 0`, split off at `monomial`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DetEquation {
    pub stage: Stage,
    pub monomial: Expr,
    pub equation: Expr,
}

impl fmt::Display for DetEquation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}] {}: {} = 0", stage_name(self.stage), self.monomial, self.equation)
    }
}

fn stage_name(s: Stage) -> &'static str {
    match s {
        Stage::General => "general",
        Stage::Restricted => "restricted",
    }
}

/// Determining equations obtained by splitting the invariance residual with
/// respect to the jets `u_t, u_tx, u_xx`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeterminingSystem {
    pub spec: ClassSpec,
    pub split_vars: Vec<Symbol>,
    pub equations: Vec<DetEquation>,
}

/// Jets over which splitting is legal when `f, g` depend on `(x, u_x)`.
pub fn split_vars() -> Vec<Symbol> {
    vec![Symbol::jet(1, 0), Symbol::jet(1, 1), Symbol::jet(0, 2)]
}

fn split(spec: &ClassSpec, stage: Stage) -> Result<Vec<DetEquation>, DetError> {
    let r = invariance_residual(spec, &stage.field())?;
    let parts = collect(&r, &split_vars())?;
    Ok(parts
        .into_iter()
        .filter(|(_, c)| !c.is_zero())
        .map(|(monomial, equation)| DetEquation { stage, monomial, equation })
        .collect())
}

/// Both splitting stages: the general one, which yields `xi_u = 0`,
/// `xi_t = f (tau_x + tau_u u_x)` and `2 f tau_u = (tau_x + tau_u u_x) f_{u_x}`,
/// and the one with `tau_u = xi_u = 0` imposed.
pub fn generate_determining_system(spec: &ClassSpec) -> Result<DeterminingSystem, DetError> {
    let mut equations = split(spec, Stage::General)?;
    equations.extend(split(spec, Stage::Restricted)?);
    Ok(DeterminingSystem { spec: spec.clone(), split_vars: split_vars(), equations })
}

impl DeterminingSystem {
    pub fn stage(&self, s: Stage) -> impl Iterator<Item = &DetEquation> {
        self.equations.iter().filter(move |e| e.stage == s)
    }

    /// The equation split off at `monomial` in stage `s`, or zero.
    pub fn coefficient(&self, s: Stage, monomial: &Expr) -> Expr {
        self.stage(s).find(|e| &e.monomial == monomial).map_or_else(Expr::zero, |e| e.equation.clone())
    }

    /// Printed equations.
    pub fn lines(&self) -> Vec<String> {
        self.equations.iter().map(|e| e.to_string()).collect()
    }

    /// Split log: stage, monomial and index of each equation.
    pub fn split_log(&self) -> Vec<String> {
        self.equations
            .iter()
            .enumerate()
            .map(|(i, e)| format!("{i}: {} split at {}", stage_name(e.stage), e.monomial))
            .collect()
    }

    /// Substitute a concrete field and concrete `f, g` into every equation.
    pub fn evaluate(&self, q: &VectorField, f: &Expr, g: &Expr) -> Result<Vec<(DetEquation, Expr)>, DetError> {
        let mut out = Vec::new();
        for eq in &self.equations {
            let mut e = eq.equation.clone();
            for (name, sym) in [("tau", Symbol::t()), ("xi", Symbol::x()), ("eta", Symbol::u())] {
                let params = eq.stage.params(name);
                let body = q.coeff(&sym);
                if let Some(v) = symbols(&body).into_iter().find(|v| !v.is_param() && !params.contains(v)) {
                    return Err(DetError::Stage { name: name.to_string(), var: v.name().to_string() });
                }
                e = subst_func(&e, name, &params, &body);
            }
            let fx = [Symbol::x(), Symbol::jet(0, 1)];
            if !spec_is_concrete(&self.spec) {
                e = subst_func(&e, "f", &fx, f);
                e = subst_func(&e, "g", &fx, g);
            }
            out.push((eq.clone(), e));
        }
        Ok(out)
    }

    /// Every equation vanishes for the given field and equation.
    pub fn satisfied_by(&self, q: &VectorField, f: &Expr, g: &Expr) -> Result<Verdict, DetError> {
        let mut worst = Verdict::Zero;
        for (_, e) in self.evaluate(q, f, g)? {
            match is_zero(&e) {
                Verdict::Zero => {}
                v @ Verdict::Nonzero { .. } => return Ok(v),
                v => worst = v,
            }
        }
        Ok(worst)
    }
}

fn spec_is_concrete(spec: &ClassSpec) -> bool {
    !spec.f.may_contain_func("f") && !spec.g.may_contain_func("g")
}

/// Outcome of a symmetry check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymmetryCheck {
    pub verdict: Verdict,
    pub residual: Expr,
}

impl SymmetryCheck {
    pub fn passed(&self) -> bool {
        self.verdict.is_zero()
    }
}

/// Test whether `q` generates a point symmetry of `u_tt = f u_xx + g`.
pub fn check_symmetry(f: &Expr, g: &Expr, q: &VectorField) -> Result<SymmetryCheck, DetError> {
    let residual = invariance_residual(&ClassSpec::new(f.clone(), g.clone()), q)?;
    let verdict = is_zero(&residual);
    Ok(SymmetryCheck { verdict, residual })
}

/// Residuals of the simplified system valid for every nonlinear equation
/// with a concrete `f`, `f_{u_x} != 0`:
/// `tau_u = tau_x = xi_u = xi_t = eta_uu = eta_xu = eta_ttx = tau_ttt = 0`,
/// `2 eta_tu = tau_tt`.
pub fn simplified_residuals(q: &VectorField) -> Vec<(&'static str, Expr)> {
    let (tau, xi, eta) = coefficients(q);
    let d = |e: &Expr, vs: &[Symbol]| vs.iter().fold(e.clone(), |a, v| diff(&a, v));
    let (st, sx, su) = (Symbol::t(), Symbol::x(), Symbol::u());
    vec![
        ("tau_u", d(&tau, std::slice::from_ref(&su))),
        ("tau_x", d(&tau, std::slice::from_ref(&sx))),
        ("xi_u", d(&xi, std::slice::from_ref(&su))),
        ("xi_t", d(&xi, std::slice::from_ref(&st))),
        ("eta_uu", d(&eta, &[su.clone(), su.clone()])),
        ("eta_xu", d(&eta, &[sx.clone(), su.clone()])),
        ("eta_ttx", d(&eta, &[st.clone(), st.clone(), sx.clone()])),
        ("tau_ttt", d(&tau, &[st.clone(), st.clone(), st.clone()])),
        ("2eta_tu-tau_tt", d(&eta, &[st.clone(), su.clone()]).scale(&Rational::from_integer(2.into())) - d(&tau, &[st.clone(), st])),
    ]
}

/// Names of the simplified-system residuals that do not vanish.
pub fn simplified_violations(q: &VectorField) -> Vec<&'static str> {
    simplified_residuals(q).into_iter().filter(|(_, r)| !is_zero(r).is_zero()).map(|(n, _)| n).collect()
}

/// Residuals of the additional bilinear system which, together with the
/// simplified system, characterizes fields admitted by some nonlinear member
/// of the class.
pub fn union_residuals(q: &VectorField) -> Vec<(&'static str, Expr)> {
    let (tau, xi, eta) = coefficients(q);
    let d = |e: &Expr, vs: &[&Symbol]| vs.iter().fold(e.clone(), |a, v| diff(&a, v));
    let (st, sx, su) = (Symbol::t(), Symbol::x(), Symbol::u());
    let eu = d(&eta, &[&su]);
    let ex = d(&eta, &[&sx]);
    let etx = d(&eta, &[&st, &sx]);
    let etu = d(&eta, &[&st, &su]);
    let etxx = d(&eta, &[&st, &sx, &sx]);
    let ett = d(&eta, &[&st, &st]);
    let ettt = d(&eta, &[&st, &st, &st]);
    let tt = d(&tau, &[&st]);
    let ttt = d(&tau, &[&st, &st]);
    let xx = d(&xi, &[&sx]);
    let xxx = d(&xi, &[&sx, &sx]);
    let exx = d(&eta, &[&sx, &sx]);
    let two = |e: &Expr| e.scale(&Rational::from_integer(2.into()));
    vec![
        ("union_1", &etx * (&eu - &xx) - &ex * &etu - &xi * &etxx),
        ("union_2", &etu * (&xxx + &exx) - &etxx * (&eu - two(&tt) + &xi)),
        ("union_3", &ettt * (&eu - two(&tt)) - &ett * (&etu - two(&ttt))),
    ]
}

/// Classifying equations for fields from the projection of the equivalence
/// algebra: the first row of `tau_u = tau_x = tau_tt = xi_u = xi_t = eta_uu =
/// eta_xu = eta_tx = eta_tu = eta_ttt = 0` plus the two equations on `f` and `g`.
pub fn projected_residuals(q: &VectorField, f: &Expr, g: &Expr) -> Vec<(&'static str, Expr)> {
    let (tau, xi, eta) = coefficients(q);
    let d = |e: &Expr, vs: &[&Symbol]| vs.iter().fold(e.clone(), |a, v| diff(&a, v));
    let (st, sx, su, sux) = (Symbol::t(), Symbol::x(), Symbol::u(), Symbol::jet(0, 1));
    let two = |e: &Expr| e.scale(&Rational::from_integer(2.into()));
    let ux = jet(0, 1);
    let w = (d(&eta, &[&su]) - d(&xi, &[&sx])) * &ux + d(&eta, &[&sx]);
    let mut out = vec![
        ("tau_u", d(&tau, &[&su])),
        ("tau_x", d(&tau, &[&sx])),
        ("tau_tt", d(&tau, &[&st, &st])),
        ("xi_u", d(&xi, &[&su])),
        ("xi_t", d(&xi, &[&st])),
        ("eta_uu", d(&eta, &[&su, &su])),
        ("eta_xu", d(&eta, &[&sx, &su])),
        ("eta_tx", d(&eta, &[&st, &sx])),
        ("eta_tu", d(&eta, &[&st, &su])),
        ("eta_ttt", d(&eta, &[&st, &st, &st])),
    ];
    out.push((
        "f_equation",
        &xi * d(f, &[&sx]) + &w * d(f, &[&sux]) - two(&((d(&xi, &[&sx]) - d(&tau, &[&st])) * f)),
    ));
    out.push((
        "g_equation",
        &xi * d(g, &[&sx]) + &w * d(g, &[&sux])
            - (d(&eta, &[&su]) - two(&d(&tau, &[&st]))) * g
            - (d(&xi, &[&sx, &sx]) * &ux - d(&eta, &[&sx, &sx])) * f
            - d(&eta, &[&st, &st]),
    ));
    out
}

fn coefficients(q: &VectorField) -> (Expr, Expr, Expr) {
    (q.coeff(&Symbol::t()), q.coeff(&Symbol::x()), q.coeff(&Symbol::u()))
}

/// Finite spans in which the coefficients `tau, xi, eta` are sought.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AnsatzBasis {
    pub tau: Vec<Expr>,
    pub xi: Vec<Expr>,
    pub eta: Vec<Expr>,
}

impl Default for AnsatzBasis {
    fn default() -> Self {
        let (t, x, u) = (t(), x(), u());
        AnsatzBasis {
            tau: vec![Expr::one(), t.clone(), t.powi(2)],
            xi: vec![Expr::one(), x.clone(), x.powi(2), x.exp(), x.scale(&crate::int(2)).exp(), (-&x).exp()],
            eta: vec![
                u.clone(),
                &t * &u,
                Expr::one(),
                t.clone(),
                t.powi(2),
                x.clone(),
                &t * &x,
                t.powi(2) * &x,
                x.powi(2),
                x.exp(),
                &x * x.lnabs(),
            ],
        }
    }
}

impl AnsatzBasis {
    /// Position of a basis field `b d_t`, `b d_x` or `b d_u` in [`AnsatzBasis::fields`].
    pub fn position(&self, coord: &Symbol, b: &Expr) -> Option<usize> {
        let (off, list) = match coord.name() {
            "t" => (0, &self.tau),
            "x" => (self.tau.len(), &self.xi),
            "u" => (self.tau.len() + self.xi.len(), &self.eta),
            _ => return None,
        };
        list.iter().position(|e| e == b).map(|i| off + i)
    }

    /// Parse basis functions written in `t, x, u`.
    pub fn parse(tau: &[&str], xi: &[&str], eta: &[&str]) -> Result<AnsatzBasis, DetError> {
        let c = Chart::base();
        let p = |v: &[&str]| v.iter().map(|s| parse(s, &c)).collect::<Result<Vec<_>, _>>();
        Ok(AnsatzBasis { tau: p(tau)?, xi: p(xi)?, eta: p(eta)? })
    }

    pub fn len(&self) -> usize {
        self.tau.len() + self.xi.len() + self.eta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// One field per basis element: `b d_t`, `b d_x` or `b d_u`.
    pub fn fields(&self) -> Vec<VectorField> {
        let z = Expr::zero;
        let mut out = Vec::with_capacity(self.len());
        for b in &self.tau {
            out.push(VectorField::base(b.clone(), z(), z()).expect("base field"));
        }
        for b in &self.xi {
            out.push(VectorField::base(z(), b.clone(), z()).expect("base field"));
        }
        for b in &self.eta {
            out.push(VectorField::base(z(), z(), b.clone()).expect("base field"));
        }
        out
    }

    /// Append the elements of `other` not already present.
    pub fn extend(&mut self, other: &AnsatzBasis) {
        for (mine, theirs) in [(&mut self.tau, &other.tau), (&mut self.xi, &other.xi), (&mut self.eta, &other.eta)] {
            for b in theirs {
                if !mine.contains(b) {
                    mine.push(b.clone());
                }
            }
        }
    }
}

/// Symmetries found within an ansatz.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AnsatzSolution {
    pub dimension: usize,
    pub fields: Vec<VectorField>,
    /// Coordinates of each solution with respect to [`AnsatzBasis::fields`].
    pub coordinates: Vec<Vec<Rational>>,
    /// Monomials (jets times basis-function atoms) over which the residual was split.
    pub atoms: Vec<Expr>,
}

/// All fields in the span of `basis` that are symmetries of `u_tt = f u_xx + g`.
///
/// The invariance residual is linear in the field, so the residual of each
/// basis field is expanded, split over its monomials and the kernel of the
/// resulting rational matrix is taken. Every solution is then re-checked.
pub fn solve_within_ansatz(f: &Expr, g: &Expr, basis: &AnsatzBasis) -> Result<AnsatzSolution, DetError> {
    for e in [f, g].into_iter().chain(basis.tau.iter()).chain(basis.xi.iter()).chain(basis.eta.iter()) {
        if let Some(p) = symbols(e).into_iter().find(|s| s.is_param()) {
            return Err(DetError::Uninstantiated(p.name().to_string()));
        }
    }
    let spec = ClassSpec::new(f.clone(), g.clone());
    let fields = basis.fields();
    let mut columns = Vec::with_capacity(fields.len());
    let mut atoms: BTreeMap<Expr, usize> = BTreeMap::new();
    for q in &fields {
        let r = invariance_residual(&spec, q)?;
        let m = monomial_coefficients(&r);
        for k in m.keys() {
            let n = atoms.len();
            atoms.entry(k.clone()).or_insert(n);
        }
        columns.push(m);
    }
    let ncols = fields.len();
    let mut matrix = vec![vec![Rational::from_integer(0.into()); ncols]; atoms.len()];
    for (j, col) in columns.iter().enumerate() {
        for (k, c) in col {
            matrix[atoms[k]][j] = c.clone();
        }
    }
    let (kernel, _) = rref(nullspace(&matrix, ncols));
    let mut out = Vec::with_capacity(kernel.len());
    for (index, v) in kernel.iter().enumerate() {
        let mut q = VectorField::zero(crate::vecfield::Space::Base);
        for (c, b) in v.iter().zip(&fields) {
            if !num_traits::Zero::is_zero(c) {
                q = q.add(&b.scale(&Expr::num(c.clone())))?;
            }
        }
        let check = check_symmetry(f, g, &q)?;
        if !check.passed() {
            return Err(DetError::Rejected { index, verdict: check.verdict });
        }
        out.push(q);
    }
    let mut atoms: Vec<(usize, Expr)> = atoms.into_iter().map(|(e, i)| (i, e)).collect();
    atoms.sort();
    Ok(AnsatzSolution { dimension: out.len(), fields: out, coordinates: kernel, atoms: atoms.into_iter().map(|(_, e)| e).collect() })
}
