use std::collections::BTreeMap;

use thiserror::Error;

use super::equiv::inverse_rewrite;
use crate::expr::{
    self, diff, on_shell, substitute, symbols, total_derivative, CalcError, Dir, Expr, Flag, SymKind, Symbol, Verdict,
    JET_CAP,
};

/// Fiber-preserving point transformation `t~ = T(t)`, `x~ = X(x)`, `u~ = U1(t,x) u + U0(t,x)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointTransform {
    pub t: Expr,
    pub x: Expr,
    pub u1: Expr,
    pub u0: Expr,
    /// Old `x` as a function of the new one, written in the symbol `x`.
    pub x_inverse: Option<Expr>,
    /// The new `x` ranges over positive values.
    pub new_x_positive: bool,
    /// Pairs `(phi, phihat)` of mutually inverse function symbols.
    pub inverse_funcs: Vec<(String, String)>,
    /// Expected images of `f` and `g` in the old variables.
    pub fg: Option<(Expr, Expr)>,
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum TransformError {
    #[error("component {0} depends on {1}")]
    Dependence(String, String),
    #[error("degenerate transformation: {0} vanishes")]
    Degenerate(String),
    #[error("image equation leaves the class: residual {0}")]
    LeavesClass(String),
    #[error("declared component {0} disagrees: residual {1}")]
    Mismatch(String, String),
    #[error("zero test undecided for {0}")]
    Undecided(String),
    #[error("{0}")]
    Calc(#[from] CalcError),
}

/// Result of a change of variables in `u_tt = f u_xx + g`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transformed {
    /// New arbitrary elements as functions of the old variables.
    pub f_old: Expr,
    pub g_old: Expr,
    /// The same in the new variables, written with the symbols `x` and `u_x`.
    pub f_new: Option<Expr>,
    pub g_new: Option<Expr>,
}

fn only_depends(e: &Expr, name: &str, allowed: &[Symbol]) -> Result<(), TransformError> {
    for s in symbols(e) {
        let free = matches!(s.kind(), SymKind::Parameter | SymKind::Coordinate);
        if !free && !allowed.contains(&s) {
            return Err(TransformError::Dependence(name.into(), s.name().into()));
        }
    }
    Ok(())
}

fn zero(e: &Expr) -> Result<bool, TransformError> {
    match expr::is_zero(e) {
        Verdict::Zero => Ok(true),
        Verdict::Nonzero { .. } => Ok(false),
        Verdict::Undecided { .. } => Err(TransformError::Undecided(e.to_string())),
    }
}

impl PointTransform {
    pub fn new(t: Expr, x: Expr, u1: Expr, u0: Expr) -> Result<PointTransform, TransformError> {
        let (ts, xs) = (Symbol::t(), Symbol::x());
        only_depends(&t, "T", &[ts.clone()])?;
        only_depends(&x, "X", &[xs.clone()])?;
        only_depends(&u1, "U1", &[ts.clone(), xs.clone()])?;
        only_depends(&u0, "U0", &[ts.clone(), xs.clone()])?;
        for (n, e) in [("T_t", diff(&t, &ts)), ("X_x", diff(&x, &xs)), ("U1", u1.clone())] {
            if e.is_zero() {
                return Err(TransformError::Degenerate(n.into()));
            }
        }
        Ok(PointTransform {
            t,
            x,
            u1,
            u0,
            x_inverse: None,
            new_x_positive: false,
            inverse_funcs: Vec::new(),
            fg: None,
        })
    }

    pub fn identity() -> PointTransform {
        PointTransform::new(Expr::sym(&Symbol::t()), Expr::sym(&Symbol::x()), Expr::one(), Expr::zero()).unwrap()
    }

    pub fn with_inverse(mut self, inv: Expr) -> PointTransform {
        self.x_inverse = Some(inv);
        self
    }

    pub fn with_positive_x(mut self) -> PointTransform {
        self.new_x_positive = true;
        self
    }

    pub fn with_inverse_func(mut self, name: &str, inv: &str) -> PointTransform {
        self.inverse_funcs.push((name.into(), inv.into()));
        self
    }

    pub fn with_fg(mut self, f: Expr, g: Expr) -> PointTransform {
        self.fg = Some((f, g));
        self
    }
}

/// Change variables in `u_tt = f(x,u_x) u_xx + g(x,u_x)`.
pub fn transform_equation(p: &PointTransform, f: &Expr, g: &Expr) -> Result<Transformed, TransformError> {
    let (ts, xs, us) = (Symbol::t(), Symbol::x(), Symbol::u());
    let j = |a, b| Symbol::jet(a, b);
    let d = |e: &Expr, dir| total_derivative(e, dir, JET_CAP);
    let tp = diff(&p.t, &ts);
    let xp = diff(&p.x, &xs);
    let u = &p.u1 * Expr::sym(&us) + &p.u0;
    let ut_n = d(&u, Dir::T)? / &tp;
    let ux_n = d(&u, Dir::X)? / &xp;
    let utt_n = d(&ut_n, Dir::T)? / &tp;
    let uxx_n = d(&ux_n, Dir::X)? / &xp;

    let rhs = f * Expr::sym(&j(0, 2)) + g;
    let a_old = on_shell(&utt_n, &rhs, JET_CAP)?;
    let w = Symbol::coord("UXXnew");
    let a = diff(&uxx_n, &j(0, 2));
    let b = &uxx_n - &a * Expr::sym(&j(0, 2));
    let mut m = BTreeMap::new();
    m.insert(j(0, 2), (Expr::sym(&w) - b) / a);
    let a_new = substitute(&a_old, &m);
    let f_old = diff(&a_new, &w);
    let g_old = &a_new - &f_old * Expr::sym(&w);
    if !diff(&f_old, &w).is_zero() {
        return Err(TransformError::LeavesClass(a_new.to_string()));
    }

    // Functions of (x~, u~_x~) are annihilated by these directions.
    let dux = diff(&ux_n, &j(0, 1));
    let kernel = |h: &Expr| -> Vec<Expr> {
        let hx = diff(h, &j(0, 1));
        let mut v = vec![
            diff(h, &ts) - diff(&ux_n, &ts) / &dux * &hx,
            diff(h, &us) - diff(&ux_n, &us) / &dux * &hx,
        ];
        for s in symbols(h) {
            if let Some((nt, nx)) = s.jet_index() {
                if (nt, nx) != (0, 1) && (nt, nx) != (0, 0) {
                    v.push(diff(h, &s));
                }
            }
        }
        v
    };
    for h in [&f_old, &g_old] {
        for r in kernel(h) {
            if !zero(&r)? {
                return Err(TransformError::LeavesClass(r.to_string()));
            }
        }
    }
    if let Some((fe, ge)) = &p.fg {
        for (n, want, got) in [("f", fe, &f_old), ("g", ge, &g_old)] {
            let r = want - got;
            if !zero(&r)? {
                return Err(TransformError::Mismatch(n.into(), r.to_string()));
            }
        }
    }

    let y = Symbol::coord("UXnew");
    let xn = if p.new_x_positive { Symbol::coord("Xnew").with_flag(Flag::Positive) } else { Symbol::coord("Xnew") };
    let to_new = |h: &Expr| -> Option<Expr> {
        let mut m = BTreeMap::new();
        let inv_ux = (&xp * Expr::sym(&y) - diff(&p.u1, &xs) * Expr::sym(&us) - diff(&p.u0, &xs)) / &p.u1;
        m.insert(j(0, 1), inv_ux);
        let mut h1 = substitute(h, &m);
        let mut z = BTreeMap::new();
        z.insert(us.clone(), Expr::zero());
        h1 = substitute(&h1, &z);
        let x_identity = p.x == Expr::sym(&xs);
        if !x_identity {
            let depends = symbols(&h1).contains(&xs);
            match &p.x_inverse {
                Some(inv) => {
                    let mut mx = BTreeMap::new();
                    mx.insert(xs.clone(), Expr::sym(&xn));
                    let inv = substitute(inv, &mx);
                    let mut m2 = BTreeMap::new();
                    m2.insert(xs.clone(), inv);
                    h1 = substitute(&h1, &m2);
                    for (a, b) in &p.inverse_funcs {
                        h1 = inverse_rewrite(&h1, a, b);
                    }
                }
                None if depends => return None,
                None => {}
            }
        }
        let mut back = BTreeMap::new();
        back.insert(xn.clone(), Expr::sym(&xs));
        back.insert(y.clone(), Expr::sym(&j(0, 1)));
        Some(substitute(&h1, &back))
    };
    Ok(Transformed { f_new: to_new(&f_old), g_new: to_new(&g_old), f_old, g_old })
}
