use std::collections::BTreeMap;

use super::{f_sym, g_sym, FieldError, Space, VectorField};
use crate::expr::{diff, func, rebuild, substitute, Expr, FuncApp, Node, Symbol};

/// Parameters of an element of the equivalence group:
/// `t~ = c1 t + c0`, `x~ = phi(x)`, `u~ = c2 u + c4 t^2 + c3 t + psi(x)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquivParams {
    pub c0: Expr,
    pub c1: Expr,
    pub c2: Expr,
    pub c3: Expr,
    pub c4: Expr,
    pub phi: Expr,
    pub psi: Expr,
    /// Inverse of `phi`, written in `x`.
    pub phi_inv: Option<Expr>,
    pub inverse_funcs: Vec<(String, String)>,
}

impl Default for EquivParams {
    fn default() -> Self {
        EquivParams::identity()
    }
}

impl EquivParams {
    pub fn identity() -> EquivParams {
        let x = Expr::sym(&Symbol::x());
        EquivParams {
            c0: Expr::zero(),
            c1: Expr::one(),
            c2: Expr::one(),
            c3: Expr::zero(),
            c4: Expr::zero(),
            phi: x.clone(),
            psi: Expr::zero(),
            phi_inv: Some(x),
            inverse_funcs: Vec::new(),
        }
    }

    /// `t~ = c1 t`
    pub fn dt(c1: Expr) -> EquivParams {
        EquivParams { c1, ..EquivParams::identity() }
    }

    /// `t~ = t + c0`
    pub fn pt(c0: Expr) -> EquivParams {
        EquivParams { c0, ..EquivParams::identity() }
    }

    /// `x~ = phi(x)`
    pub fn d(phi: Expr, phi_inv: Option<Expr>) -> EquivParams {
        EquivParams { phi, phi_inv, ..EquivParams::identity() }
    }

    /// `u~ = c2 u`
    pub fn du(c2: Expr) -> EquivParams {
        EquivParams { c2, ..EquivParams::identity() }
    }

    /// `u~ = u + c3 t`
    pub fn f1(c3: Expr) -> EquivParams {
        EquivParams { c3, ..EquivParams::identity() }
    }

    /// `u~ = u + c4 t^2`
    pub fn f2(c4: Expr) -> EquivParams {
        EquivParams { c4, ..EquivParams::identity() }
    }

    /// `u~ = u + psi(x)`
    pub fn g(psi: Expr) -> EquivParams {
        EquivParams { psi, ..EquivParams::identity() }
    }

    pub fn with_inverse_func(mut self, name: &str, inv: &str) -> EquivParams {
        self.inverse_funcs.push((name.into(), inv.into()));
        self
    }
}

/// Values of the augmented coordinates `(t, x, u, u_x, f, g)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AugState {
    pub t: Expr,
    pub x: Expr,
    pub u: Expr,
    pub ux: Expr,
    pub f: Expr,
    pub g: Expr,
}

impl AugState {
    /// The coordinates themselves, with `f` and `g` as coordinates.
    pub fn coords() -> AugState {
        AugState::with(Expr::sym(&f_sym()), Expr::sym(&g_sym()))
    }

    /// Identity on `(t,x,u,u_x)` with given arbitrary elements.
    pub fn with(f: Expr, g: Expr) -> AugState {
        AugState {
            t: Expr::sym(&Symbol::t()),
            x: Expr::sym(&Symbol::x()),
            u: Expr::sym(&Symbol::u()),
            ux: Expr::sym(&Symbol::jet(0, 1)),
            f,
            g,
        }
    }

    pub fn get(&self, s: &Symbol) -> Option<&Expr> {
        match s.name() {
            "t" => Some(&self.t),
            "x" => Some(&self.x),
            "u" => Some(&self.u),
            "u_x" => Some(&self.ux),
            "f" => Some(&self.f),
            "g" => Some(&self.g),
            _ => None,
        }
    }

    fn map(&self, f: impl Fn(&Expr) -> Expr) -> AugState {
        AugState { t: f(&self.t), x: f(&self.x), u: f(&self.u), ux: f(&self.ux), f: f(&self.f), g: f(&self.g) }
    }
}

fn at_x(e: &Expr, x: &Expr) -> Expr {
    let mut m = BTreeMap::new();
    m.insert(Symbol::x(), x.clone());
    substitute(e, &m)
}

fn rewrite_all(e: &Expr, pairs: &[(String, String)]) -> Expr {
    pairs.iter().fold(e.clone(), |acc, (a, b)| inverse_rewrite(&acc, a, b))
}

/// Image of a state under the transformation.
pub fn act(p: &EquivParams, s: &AugState) -> AugState {
    let xs = Symbol::x();
    let phi_x = diff(&p.phi, &xs);
    let phi_xx = diff(&phi_x, &xs);
    let psi_x = diff(&p.psi, &xs);
    let psi_xx = diff(&psi_x, &xs);
    let x = &s.x;
    let ux = (&p.c2 * &s.ux + at_x(&psi_x, x)) / at_x(&phi_x, x);
    let c1sq = p.c1.powi(2);
    let out = AugState {
        t: &p.c1 * &s.t + &p.c0,
        x: at_x(&p.phi, x),
        u: &p.c2 * &s.u + &p.c4 * s.t.powi(2) + &p.c3 * &s.t + at_x(&p.psi, x),
        f: at_x(&phi_x, x).powi(2) * &s.f / &c1sq,
        g: (&p.c2 * &s.g + &ux * at_x(&phi_xx, x) * &s.f - at_x(&psi_xx, x) * &s.f + Expr::int(2) * &p.c4) / &c1sq,
        ux,
    };
    out.map(|e| rewrite_all(e, &p.inverse_funcs))
}

/// Closed-form action on the arbitrary elements, returned in the old variables.
pub fn apply_equivalence(p: &EquivParams, f: &Expr, g: &Expr) -> Result<(Expr, Expr), FieldError> {
    if p.c1.is_zero() || p.c2.is_zero() || diff(&p.phi, &Symbol::x()).is_zero() {
        return Err(FieldError::Undecided("degenerate equivalence parameters".into()));
    }
    let s = act(p, &AugState::with(f.clone(), g.clone()));
    Ok((s.f, s.g))
}

/// Parameters of `b o a` (first `a`, then `b`).
pub fn compose(b: &EquivParams, a: &EquivParams) -> EquivParams {
    let mut pairs = a.inverse_funcs.clone();
    pairs.extend(b.inverse_funcs.iter().cloned());
    let psi = &b.c2 * &a.psi + at_x(&b.psi, &a.phi) + &b.c4 * a.c0.powi(2) + &b.c3 * &a.c0;
    EquivParams {
        c1: &b.c1 * &a.c1,
        c0: &b.c1 * &a.c0 + &b.c0,
        c2: &b.c2 * &a.c2,
        c4: &b.c2 * &a.c4 + &b.c4 * a.c1.powi(2),
        c3: &b.c2 * &a.c3 + Expr::int(2) * &b.c4 * &a.c1 * &a.c0 + &b.c3 * &a.c1,
        psi: rewrite_all(&psi, &pairs),
        phi: rewrite_all(&at_x(&b.phi, &a.phi), &pairs),
        phi_inv: match (&a.phi_inv, &b.phi_inv) {
            (Some(ia), Some(ib)) => Some(rewrite_all(&at_x(ia, ib), &pairs)),
            _ => None,
        },
        inverse_funcs: pairs,
    }
}

/// A transformation of the augmented chart with its inverse.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AugTransform {
    /// New coordinates in terms of the old ones; absent coordinates are unchanged.
    pub forward: BTreeMap<Symbol, Expr>,
    /// Old coordinates in terms of the new ones, written in the same symbols.
    pub inverse: BTreeMap<Symbol, Expr>,
    pub inverse_funcs: Vec<(String, String)>,
}

impl AugTransform {
    pub fn identity() -> AugTransform {
        AugTransform { forward: BTreeMap::new(), inverse: BTreeMap::new(), inverse_funcs: Vec::new() }
    }

    /// Lift of an equivalence transformation; fails when `phi` has no inverse.
    pub fn from_params(p: &EquivParams) -> Result<AugTransform, FieldError> {
        let inv = p.phi_inv.clone().ok_or_else(|| FieldError::Undecided("no inverse for phi".into()))?;
        let fw = act(p, &AugState::coords());
        let xs = Symbol::x();
        let (phi_x, psi) = (diff(&p.phi, &xs), p.psi.clone());
        let (phi_xx, psi_x) = (diff(&phi_x, &xs), diff(&psi, &xs));
        let psi_xx = diff(&psi_x, &xs);
        let n = AugState::coords();
        let t = (&n.t - &p.c0) / &p.c1;
        let x = inv;
        let u = (&n.u - &p.c4 * t.powi(2) - &p.c3 * &t - at_x(&psi, &x)) / &p.c2;
        let ux = (at_x(&phi_x, &x) * &n.ux - at_x(&psi_x, &x)) / &p.c2;
        let f = p.c1.powi(2) * &n.f / at_x(&phi_x, &x).powi(2);
        let g = (p.c1.powi(2) * &n.g - &ux * at_x(&phi_xx, &x) * &f + at_x(&psi_xx, &x) * &f
            - Expr::int(2) * &p.c4)
            / &p.c2;
        let bw = AugState { t, x, u, ux, f, g };
        let mut forward = BTreeMap::new();
        let mut inverse = BTreeMap::new();
        for s in Space::Augmented.coords() {
            forward.insert(s.clone(), fw.get(&s).unwrap().clone());
            inverse.insert(s.clone(), rewrite_all(bw.get(&s).unwrap(), &p.inverse_funcs));
        }
        Ok(AugTransform { forward, inverse, inverse_funcs: p.inverse_funcs.clone() })
    }

    pub fn image(&self, s: &Symbol) -> Expr {
        self.forward.get(s).cloned().unwrap_or_else(|| Expr::sym(s))
    }
}

/// Push-forward `V~^j = V(Z^j)` expressed in the new coordinates.
pub fn pushforward(p: &AugTransform, v: &VectorField) -> Result<VectorField, FieldError> {
    let mut coeffs = BTreeMap::new();
    for s in v.space().coords() {
        if v.space() == Space::Jet2 && s.jet_index().is_some_and(|(a, b)| a + b > 0) {
            return Err(FieldError::WrongCoordinate(s.name().to_string(), Space::Jet2));
        }
        let c = v.apply(&p.image(&s));
        let c = rewrite_all(&substitute(&c, &p.inverse), &p.inverse_funcs);
        if !c.is_zero() {
            coeffs.insert(s, c);
        }
    }
    Ok(VectorField { space: v.space(), coeffs })
}

/// Simplify `phi^(n)(phihat(a))` (and the reverse) through the inverse-function rules.
pub fn inverse_rewrite(e: &Expr, name: &str, inv: &str) -> Expr {
    let once = |e: &Expr, name: &str, inv: &str| -> Expr {
        if !e.may_contain_func(name) || !e.may_contain_func(inv) {
            return e.clone();
        }
        rebuild(e, &|x| !x.may_contain_func(name) || !x.may_contain_func(inv), &mut |n| {
            let Node::Func(a) = n else { return None };
            if &*a.name != name || a.args.len() != 1 {
                return None;
            }
            let Node::Func(b) = a.args[0].node() else { return None };
            if &*b.name != inv || b.args.len() != 1 || b.orders[0] != 0 {
                return None;
            }
            let arg = inverse_rewrite(&b.args[0], name, inv);
            let h = |k: u8| {
                func(FuncApp { name: b.name.clone(), params: b.params.clone(), args: vec![arg.clone()], orders: vec![k] })
            };
            Some(match a.orders[0] {
                0 => arg.clone(),
                1 => h(1).recip(),
                2 => -(h(2) / h(1).powi(3)),
                3 => (Expr::int(3) * h(2).powi(2) - h(1) * h(3)) / h(1).powi(5),
                _ => return None,
            })
        })
    };
    let r = once(e, name, inv);
    once(&r, inv, name)
}

/// Generators of the equivalence algebra on the augmented chart.
pub mod generators {
    use super::super::{f_sym, g_sym, VectorField};
    use crate::expr::{diff, Expr, Symbol};

    fn aug(tau: Expr, xi: Expr, eta: Expr, cf: Expr, cg: Expr) -> VectorField {
        VectorField::augmented(tau, xi, eta, cf, cg).expect("generator is a valid augmented field")
    }

    fn f() -> Expr {
        Expr::sym(&f_sym())
    }

    fn gc() -> Expr {
        Expr::sym(&g_sym())
    }

    /// `u d_u + u_x d_{u_x} + g d_g`
    pub fn du() -> VectorField {
        aug(Expr::zero(), Expr::zero(), Expr::sym(&Symbol::u()), Expr::zero(), gc())
    }

    /// `t d_t - 2f d_f - 2g d_g`
    pub fn dt() -> VectorField {
        aug(Expr::sym(&Symbol::t()), Expr::zero(), Expr::zero(), Expr::int(-2) * f(), Expr::int(-2) * gc())
    }

    /// `d_t`
    pub fn pt() -> VectorField {
        aug(Expr::one(), Expr::zero(), Expr::zero(), Expr::zero(), Expr::zero())
    }

    /// `phi d_x - phi_x u_x d_{u_x} + 2 phi_x f d_f + phi_xx u_x f d_g`
    pub fn d(phi: &Expr) -> VectorField {
        let x = Symbol::x();
        let px = diff(phi, &x);
        let pxx = diff(&px, &x);
        let ux = Expr::sym(&Symbol::jet(0, 1));
        aug(Expr::zero(), phi.clone(), Expr::zero(), Expr::int(2) * &px * f(), pxx * ux * f())
    }

    /// `psi d_u + psi_x d_{u_x} - psi_xx f d_g`
    pub fn g(psi: &Expr) -> VectorField {
        let x = Symbol::x();
        let pxx = diff(&diff(psi, &x), &x);
        aug(Expr::zero(), Expr::zero(), psi.clone(), Expr::zero(), -(pxx * f()))
    }

    /// `t d_u`
    pub fn f1() -> VectorField {
        aug(Expr::zero(), Expr::zero(), Expr::sym(&Symbol::t()), Expr::zero(), Expr::zero())
    }

    /// `t^2 d_u + 2 d_g`
    pub fn f2() -> VectorField {
        let t = Expr::sym(&Symbol::t());
        aug(Expr::zero(), Expr::zero(), t.powi(2), Expr::zero(), Expr::int(2))
    }
}
