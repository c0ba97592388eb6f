//! Vector fields on the base chart `(t,x,u)`, the augmented chart
//! `(t,x,u,u_x,f,g)` and the second-order jet chart; Lie brackets,
//! prolongation and point transformations.

mod equiv;
mod transform;

use std::collections::BTreeMap;
use std::fmt;

use num_traits::Signed;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::expr::{
    self, add_all, diff, mul, parse_field_terms, symbols, total_derivative, Chart, Dir, Expr, ParseError, SymKind,
    Symbol, Verdict, JET_CAP,
};

pub use equiv::{
    act, apply_equivalence, compose, generators, inverse_rewrite, pushforward, AugState, AugTransform, EquivParams,
};
pub use transform::{transform_equation, PointTransform, Transformed};

/// Coordinate space a vector field lives on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Space {
    /// `(t, x, u)`
    Base,
    /// `(t, x, u, u_x, f, g)`
    Augmented,
    /// `(t, x, u, u_t, u_x, u_tt, u_tx, u_xx)`
    Jet2,
}

impl Space {
    pub fn coords(self) -> Vec<Symbol> {
        let mut v = vec![Symbol::t(), Symbol::x(), Symbol::u()];
        match self {
            Space::Base => {}
            Space::Augmented => v.extend([Symbol::jet(0, 1), f_sym(), g_sym()]),
            Space::Jet2 => v.extend([(1, 0), (0, 1), (2, 0), (1, 1), (0, 2)].map(|(a, b)| Symbol::jet(a, b))),
        }
        v
    }
}

/// The arbitrary elements as coordinates of the augmented chart.
pub fn f_sym() -> Symbol {
    Symbol::coord("f")
}

pub fn g_sym() -> Symbol {
    Symbol::coord("g")
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum FieldError {
    #[error("{0} is not a coordinate of the {1:?} chart")]
    WrongCoordinate(String, Space),
    #[error("chart mismatch: {0:?} vs {1:?}")]
    ChartMismatch(Space, Space),
    #[error("coefficient of {coord} depends on {var}")]
    Dependence { coord: String, var: String },
    #[error("u_x coefficient disagrees with the first prolongation: residual {0}")]
    Prolongation(String),
    #[error("zero test undecided for {0}")]
    Undecided(String),
    #[error("{0}")]
    Calc(#[from] expr::CalcError),
    #[error("{0}")]
    Parse(#[from] ParseError),
}

/// `sum_i coeffs[i] * d/d coords[i]`; absent coordinates have zero coefficient.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VectorField {
    space: Space,
    coeffs: BTreeMap<Symbol, Expr>,
}

fn allowed(space: Space, coord: &Symbol, var: &Symbol) -> bool {
    match var.kind() {
        SymKind::Parameter => return true,
        SymKind::Coordinate if !(var == &f_sym() || var == &g_sym()) => return true,
        _ => {}
    }
    match space {
        Space::Base => [Symbol::t(), Symbol::x(), Symbol::u()].contains(var),
        Space::Augmented => {
            let base = [Symbol::t(), Symbol::x(), Symbol::u()].contains(var);
            let is_fg = coord == &f_sym() || coord == &g_sym() || coord == &Symbol::jet(0, 1);
            base || (is_fg && Space::Augmented.coords().contains(var))
        }
        Space::Jet2 => Space::Jet2.coords().contains(var),
    }
}

fn check_zero(e: &Expr) -> Result<bool, FieldError> {
    match expr::is_zero(e) {
        Verdict::Zero => Ok(true),
        Verdict::Nonzero { .. } => Ok(false),
        Verdict::Undecided { .. } => Err(FieldError::Undecided(e.to_string())),
    }
}

/// First-prolongation coefficient of `d/du_x` for a field with `tau = tau(t)`.
fn prolong_ux(tau: &Expr, xi: &Expr, eta: &Expr) -> Result<Expr, FieldError> {
    let ux = Expr::sym(&Symbol::jet(0, 1));
    for v in [Symbol::x(), Symbol::u()] {
        if !diff(tau, &v).is_zero() {
            return Err(FieldError::Dependence { coord: "t".into(), var: v.name().into() });
        }
    }
    let (x, u) = (Symbol::x(), Symbol::u());
    let dx = |e: &Expr| diff(e, &x) + diff(e, &u) * &ux;
    Ok(dx(eta) - &ux * dx(xi))
}

impl VectorField {
    /// Field with validated coefficients; on the augmented chart the `u_x`
    /// coefficient must agree with the first prolongation of the `(t,x,u)` part.
    pub fn new<I: IntoIterator<Item = (Symbol, Expr)>>(space: Space, coeffs: I) -> Result<VectorField, FieldError> {
        let coords = space.coords();
        let mut map = BTreeMap::new();
        for (s, c) in coeffs {
            if !coords.contains(&s) {
                return Err(FieldError::WrongCoordinate(s.name().to_string(), space));
            }
            for v in symbols(&c) {
                if !allowed(space, &s, &v) {
                    return Err(FieldError::Dependence { coord: s.name().to_string(), var: v.name().to_string() });
                }
            }
            let prev: Expr = map.remove(&s).unwrap_or_else(Expr::zero);
            let sum = prev + c;
            if !sum.is_zero() {
                map.insert(s, sum);
            }
        }
        let v = VectorField { space, coeffs: map };
        if space == Space::Augmented {
            let want = prolong_ux(&v.coeff(&Symbol::t()), &v.coeff(&Symbol::x()), &v.coeff(&Symbol::u()))?;
            let r = want - v.coeff(&Symbol::jet(0, 1));
            if !check_zero(&r)? {
                return Err(FieldError::Prolongation(r.to_string()));
            }
        }
        Ok(v)
    }

    pub fn zero(space: Space) -> VectorField {
        VectorField { space, coeffs: BTreeMap::new() }
    }

    /// Base-chart field `tau d_t + xi d_x + eta d_u`.
    pub fn base(tau: Expr, xi: Expr, eta: Expr) -> Result<VectorField, FieldError> {
        VectorField::new(Space::Base, [(Symbol::t(), tau), (Symbol::x(), xi), (Symbol::u(), eta)])
    }

    /// Augmented-chart field with the `u_x` coefficient filled in by prolongation.
    pub fn augmented(tau: Expr, xi: Expr, eta: Expr, cf: Expr, cg: Expr) -> Result<VectorField, FieldError> {
        let ux = prolong_ux(&tau, &xi, &eta)?;
        VectorField::new(
            Space::Augmented,
            [
                (Symbol::t(), tau),
                (Symbol::x(), xi),
                (Symbol::u(), eta),
                (Symbol::jet(0, 1), ux),
                (f_sym(), cf),
                (g_sym(), cg),
            ],
        )
    }

    /// Parse `coef@coord + ...`.
    pub fn parse(text: &str, space: Space, chart: &Chart) -> Result<VectorField, FieldError> {
        let terms = parse_field_terms(text, chart)?;
        VectorField::new(space, terms.into_iter().map(|(c, s)| (s, c)))
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn coeff(&self, s: &Symbol) -> Expr {
        self.coeffs.get(s).cloned().unwrap_or_else(Expr::zero)
    }

    pub fn coeffs(&self) -> &BTreeMap<Symbol, Expr> {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Projection to the base chart.
    pub fn project(&self) -> VectorField {
        let keep = Space::Base.coords();
        VectorField {
            space: Space::Base,
            coeffs: self.coeffs.iter().filter(|(s, _)| keep.contains(s)).map(|(s, c)| (s.clone(), c.clone())).collect(),
        }
    }

    /// `V(e) = sum_i V^i de/dz^i`.
    pub fn apply(&self, e: &Expr) -> Expr {
        add_all(self.coeffs.iter().map(|(s, c)| mul(c, &diff(e, s))))
    }

    fn map_coeffs(&self, f: impl Fn(&Expr) -> Expr) -> VectorField {
        VectorField {
            space: self.space,
            coeffs: self.coeffs.iter().map(|(s, c)| (s.clone(), f(c))).filter(|(_, c)| !c.is_zero()).collect(),
        }
    }

    pub fn scale(&self, k: &Expr) -> VectorField {
        self.map_coeffs(|c| mul(k, c))
    }

    /// Coefficientwise rewrite, e.g. a substitution of parameters.
    pub fn map(&self, f: impl Fn(&Expr) -> Expr) -> VectorField {
        self.map_coeffs(f)
    }

    pub fn add(&self, other: &VectorField) -> Result<VectorField, FieldError> {
        if self.space != other.space {
            return Err(FieldError::ChartMismatch(self.space, other.space));
        }
        let mut coeffs = self.coeffs.clone();
        for (s, c) in &other.coeffs {
            let v = coeffs.remove(s).unwrap_or_else(Expr::zero) + c;
            if !v.is_zero() {
                coeffs.insert(s.clone(), v);
            }
        }
        Ok(VectorField { space: self.space, coeffs })
    }

    pub fn sub(&self, other: &VectorField) -> Result<VectorField, FieldError> {
        self.add(&other.scale(&Expr::int(-1)))
    }

    /// Lie bracket `[V, W]^i = V(W^i) - W(V^i)`.
    pub fn bracket(&self, other: &VectorField) -> Result<VectorField, FieldError> {
        bracket(self, other)
    }

    /// Semantic equality through the zero test of every coefficient difference.
    pub fn equivalent(&self, other: &VectorField) -> Verdict {
        if self.space != other.space {
            return Verdict::Nonzero { point: vec![], value: "chart mismatch".into() };
        }
        let mut undecided = None;
        for s in self.space.coords() {
            match expr::is_zero(&(self.coeff(&s) - other.coeff(&s))) {
                Verdict::Zero => {}
                v @ Verdict::Nonzero { .. } => return v,
                v => undecided = Some(v),
            }
        }
        undecided.unwrap_or(Verdict::Zero)
    }

    /// Coordinate name to printed coefficient.
    pub fn to_map(&self) -> BTreeMap<String, String> {
        self.coeffs.iter().map(|(s, c)| (s.name().to_string(), c.to_string())).collect()
    }
}

impl fmt::Display for VectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return f.write_str("0");
        }
        for (i, s) in self.space.coords().iter().filter(|s| self.coeffs.contains_key(s)).enumerate() {
            let mut c = self.coeffs[s].clone();
            if i > 0 {
                let neg = !matches!(c.node(), expr::Node::Add(..)) && c.coef_mono().0.is_negative();
                if neg {
                    c = -c;
                }
                f.write_str(if neg { " - " } else { " + " })?;
            }
            let c = &c;
            if matches!(c.node(), expr::Node::Add(..)) {
                write!(f, "({})@{}", c, s)?;
            } else {
                write!(f, "{}@{}", c, s)?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for VectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "VectorField[{:?}]({})", self.space, self)
    }
}

pub fn bracket(v: &VectorField, w: &VectorField) -> Result<VectorField, FieldError> {
    if v.space != w.space {
        return Err(FieldError::ChartMismatch(v.space, w.space));
    }
    let coeffs = v.space.coords().into_iter().map(|s| {
        let c = v.apply(&w.coeff(&s)) - w.apply(&v.coeff(&s));
        (s, c)
    });
    let out = VectorField { space: v.space, coeffs: coeffs.filter(|(_, c)| !c.is_zero()).collect() };
    if out.space == Space::Augmented {
        let want = prolong_ux(&out.coeff(&Symbol::t()), &out.coeff(&Symbol::x()), &out.coeff(&Symbol::u()))?;
        let r = want - out.coeff(&Symbol::jet(0, 1));
        if !check_zero(&r)? {
            return Err(FieldError::Prolongation(r.to_string()));
        }
    }
    Ok(out)
}

/// Second prolongation of a base-chart field.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProlongedField {
    pub base: VectorField,
    pub eta_t: Expr,
    pub eta_x: Expr,
    pub eta_tt: Expr,
    pub eta_tx: Expr,
    pub eta_xx: Expr,
}

impl ProlongedField {
    /// The prolonged field as a vector field on the second-order jet chart.
    pub fn to_field(&self) -> VectorField {
        let j = |a, b| Symbol::jet(a, b);
        let mut coeffs: BTreeMap<Symbol, Expr> = self.base.coeffs.clone();
        for (s, c) in [
            (j(1, 0), &self.eta_t),
            (j(0, 1), &self.eta_x),
            (j(2, 0), &self.eta_tt),
            (j(1, 1), &self.eta_tx),
            (j(0, 2), &self.eta_xx),
        ] {
            if !c.is_zero() {
                coeffs.insert(s, c.clone());
            }
        }
        VectorField { space: Space::Jet2, coeffs }
    }

    pub fn apply(&self, e: &Expr) -> Expr {
        self.to_field().apply(e)
    }
}

/// Second prolongation: `eta^J = D_J(eta - tau u_t - xi u_x) + tau u_{J,t} + xi u_{J,x}`.
pub fn prolong2(q: &VectorField) -> Result<ProlongedField, FieldError> {
    if q.space != Space::Base {
        return Err(FieldError::ChartMismatch(q.space, Space::Base));
    }
    let tau = q.coeff(&Symbol::t());
    let xi = q.coeff(&Symbol::x());
    let eta = q.coeff(&Symbol::u());
    let j = |a, b| Expr::sym(&Symbol::jet(a, b));
    let w = &eta - &tau * j(1, 0) - &xi * j(0, 1);
    let d = |e: &Expr, dir| total_derivative(e, dir, JET_CAP);
    let wt = d(&w, Dir::T)?;
    let wx = d(&w, Dir::X)?;
    let tail = |a: u8, b: u8| &tau * j(a + 1, b) + &xi * j(a, b + 1);
    Ok(ProlongedField {
        base: q.clone(),
        eta_t: &wt + tail(1, 0),
        eta_x: &wx + tail(0, 1),
        eta_tt: d(&wt, Dir::T)? + tail(2, 0),
        eta_tx: d(&wt, Dir::X)? + tail(1, 1),
        eta_xx: d(&wx, Dir::X)? + tail(0, 2),
    })
}
