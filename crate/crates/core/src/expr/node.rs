use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::symbol::{name_bit, Flag, Symbol};
use crate::Rational;

/// Application of an arbitrary function symbol, possibly differentiated.
///
/// `params` are the declared formal arguments; `orders[i]` counts derivatives
/// with respect to the i-th argument.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FuncApp {
    pub name: Arc<str>,
    pub params: Arc<[Symbol]>,
    pub args: Vec<Expr>,
    pub orders: Vec<u8>,
}

impl FuncApp {
    pub fn is_default_args(&self) -> bool {
        self.args.len() == self.params.len()
            && self.args.iter().zip(self.params.iter()).all(|(a, p)| a.as_symbol() == Some(p))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Node {
    Num(Rational),
    Sym(Symbol),
    Func(FuncApp),
    /// ln|e|
    LnAbs(Expr),
    Exp(Expr),
    /// base^exponent with a non-absolute base
    Pow(Expr, Expr),
    /// |base|^exponent
    AbsPow(Expr, Expr),
    /// coefficient times sorted factors
    Mul(Rational, Vec<Expr>),
    /// constant plus sorted (monomial, coefficient) terms
    Add(Rational, Vec<(Expr, Rational)>),
}

struct Inner {
    node: Node,
    mask: u64,
    fmask: u64,
}

/// Immutable expression, always held in canonical form.
#[derive(Clone)]
pub struct Expr(Arc<Inner>);

impl PartialEq for Expr {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.mask == other.0.mask && self.0.fmask == other.0.fmask && self.0.node == other.0.node)
    }
}

impl Eq for Expr {}

impl PartialOrd for Expr {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Expr {
    fn cmp(&self, other: &Self) -> Ordering {
        if Arc::ptr_eq(&self.0, &other.0) {
            return Ordering::Equal;
        }
        self.0.node.cmp(&other.0.node)
    }
}

impl Hash for Expr {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.0.node.hash(state)
    }
}

impl std::fmt::Debug for Expr {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self)
    }
}

fn q(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

fn masks_of(node: &Node) -> (u64, u64) {
    match node {
        Node::Num(_) => (0, 0),
        Node::Sym(s) => (s.mask_bit(), 0),
        Node::Func(a) => {
            let mut m = 0;
            let mut fm = name_bit(&a.name);
            for e in &a.args {
                m |= e.0.mask;
                fm |= e.0.fmask;
            }
            (m, fm)
        }
        Node::LnAbs(e) | Node::Exp(e) => (e.0.mask, e.0.fmask),
        Node::Pow(b, e) | Node::AbsPow(b, e) => (b.0.mask | e.0.mask, b.0.fmask | e.0.fmask),
        Node::Mul(_, fs) => fs.iter().fold((0, 0), |(m, f), e| (m | e.0.mask, f | e.0.fmask)),
        Node::Add(_, ts) => ts.iter().fold((0, 0), |(m, f), (e, _)| (m | e.0.mask, f | e.0.fmask)),
    }
}

fn raw(node: Node) -> Expr {
    let (mask, fmask) = masks_of(&node);
    Expr(Arc::new(Inner { node, mask, fmask }))
}

impl Expr {
    pub fn node(&self) -> &Node {
        &self.0.node
    }

    pub(crate) fn mask(&self) -> u64 {
        self.0.mask
    }

    /// True when `s` may occur in the expression (false means it certainly does not).
    pub fn may_contain(&self, s: &Symbol) -> bool {
        self.0.mask & s.mask_bit() != 0
    }

    pub fn may_contain_func(&self, name: &str) -> bool {
        self.0.fmask & name_bit(name) != 0
    }

    pub fn num(c: Rational) -> Expr {
        raw(Node::Num(c))
    }

    pub fn int(n: i64) -> Expr {
        Expr::num(q(n))
    }

    pub fn frac(n: i64, d: i64) -> Expr {
        Expr::num(Rational::new(BigInt::from(n), BigInt::from(d)))
    }

    pub fn zero() -> Expr {
        Expr::int(0)
    }

    pub fn one() -> Expr {
        Expr::int(1)
    }

    pub fn sym(s: &Symbol) -> Expr {
        raw(Node::Sym(s.clone()))
    }

    pub fn as_num(&self) -> Option<&Rational> {
        match self.node() {
            Node::Num(c) => Some(c),
            _ => None,
        }
    }

    pub fn as_integer(&self) -> Option<BigInt> {
        self.as_num().filter(|c| c.is_integer()).map(|c| c.to_integer())
    }

    pub fn as_symbol(&self) -> Option<&Symbol> {
        match self.node() {
            Node::Sym(s) => Some(s),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.node(), Node::Num(c) if c.is_zero())
    }

    pub fn is_one(&self) -> bool {
        matches!(self.node(), Node::Num(c) if c.is_one())
    }

    pub fn is_num(&self) -> bool {
        matches!(self.node(), Node::Num(_))
    }

    /// Split into rational coefficient and coefficient-free monomial.
    pub fn coef_mono(&self) -> (Rational, Expr) {
        match self.node() {
            Node::Num(c) => (c.clone(), Expr::one()),
            Node::Mul(c, fs) if !c.is_one() => (c.clone(), mono_of(fs)),
            _ => (Rational::one(), self.clone()),
        }
    }

    /// Additive terms, each as (monomial, coefficient); the constant has monomial 1.
    pub fn terms(&self) -> Vec<(Expr, Rational)> {
        match self.node() {
            Node::Add(c, ts) => {
                let mut v = Vec::with_capacity(ts.len() + 1);
                if !c.is_zero() {
                    v.push((Expr::one(), c.clone()));
                }
                v.extend(ts.iter().cloned());
                v
            }
            Node::Num(c) if c.is_zero() => vec![],
            _ => {
                let (c, m) = self.coef_mono();
                vec![(m, c)]
            }
        }
    }

    /// Multiplicative factors of a monomial (coefficient excluded).
    pub fn factors(&self) -> Vec<Expr> {
        match self.node() {
            Node::Mul(_, fs) => fs.clone(),
            Node::Num(_) => vec![],
            _ => vec![self.clone()],
        }
    }

    /// (base, exponent) of a plain power factor.
    pub fn base_exp(&self) -> (Expr, Expr) {
        match self.node() {
            Node::Pow(b, e) => (b.clone(), e.clone()),
            _ => (self.clone(), Expr::one()),
        }
    }
}

fn mono_of(fs: &[Expr]) -> Expr {
    if fs.len() == 1 {
        fs[0].clone()
    } else {
        raw(Node::Mul(Rational::one(), fs.to_vec()))
    }
}

pub(crate) fn mul_coef(k: &Rational, m: &Expr) -> Expr {
    if k.is_zero() {
        return Expr::zero();
    }
    if k.is_one() {
        return m.clone();
    }
    match m.node() {
        Node::Num(c) => Expr::num(c * k),
        Node::Mul(c, fs) => {
            let c = c * k;
            if c.is_one() {
                mono_of(fs)
            } else {
                raw(Node::Mul(c, fs.clone()))
            }
        }
        Node::Add(c, ts) => raw(Node::Add(c * k, ts.iter().map(|(m, c2)| (m.clone(), c2 * k)).collect())),
        _ => raw(Node::Mul(k.clone(), vec![m.clone()])),
    }
}

fn build_add(c: Rational, terms: BTreeMap<Expr, Rational>) -> Expr {
    let ts: Vec<(Expr, Rational)> = terms.into_iter().filter(|(_, k)| !k.is_zero()).collect();
    if ts.is_empty() {
        return Expr::num(c);
    }
    if c.is_zero() && ts.len() == 1 {
        let (m, k) = ts.into_iter().next().unwrap();
        return mul_coef(&k, &m);
    }
    raw(Node::Add(c, ts))
}

/// Canonical sum.
pub fn add_all<I: IntoIterator<Item = Expr>>(items: I) -> Expr {
    let mut c = Rational::zero();
    let mut terms: BTreeMap<Expr, Rational> = BTreeMap::new();
    for e in items {
        match e.node() {
            Node::Num(k) => c += k,
            Node::Add(k, ts) => {
                c += k;
                for (m, k2) in ts {
                    *terms.entry(m.clone()).or_insert_with(Rational::zero) += k2;
                }
            }
            _ => {
                let (k, m) = e.coef_mono();
                *terms.entry(m).or_insert_with(Rational::zero) += k;
            }
        }
    }
    build_add(c, terms)
}

/// Exact rational power, if it exists in Q.
pub fn pow_rational(c: &Rational, e: &Rational) -> Option<Rational> {
    if e.is_integer() {
        let n = e.to_integer();
        if c.is_zero() {
            return if n.is_negative() { None } else if n.is_zero() { Some(Rational::one()) } else { Some(Rational::zero()) };
        }
        let n = n.to_i64()?;
        if n.unsigned_abs() > 100_000 {
            return None;
        }
        let base = if n < 0 { c.recip() } else { c.clone() };
        return Some(num_traits::pow::pow(base, n.unsigned_abs() as usize));
    }
    let d = e.denom().to_u32()?;
    if c.is_negative() && d % 2 == 0 {
        return None;
    }
    let root = |b: &BigInt| -> Option<BigInt> {
        let r = b.nth_root(d);
        if num_traits::pow::pow(r.clone(), d as usize) == *b {
            Some(r)
        } else {
            None
        }
    };
    let rn = root(c.numer())?;
    let rd = root(c.denom())?;
    pow_rational(&Rational::new(rn, rd), &Rational::from_integer(e.numer().clone()))
}

#[derive(Default)]
struct MulAcc {
    coef: Option<Rational>,
    plain: BTreeMap<Expr, Vec<Expr>>,
    abs: BTreeMap<Expr, Vec<Expr>>,
    exp_args: Vec<Expr>,
}

impl MulAcc {
    fn coef_mut(&mut self) -> &mut Rational {
        self.coef.get_or_insert_with(Rational::one)
    }

    fn push(&mut self, f: &Expr) {
        match f.node() {
            Node::Num(c) => *self.coef_mut() *= c,
            Node::Mul(c, fs) => {
                *self.coef_mut() *= c;
                for g in fs {
                    self.push(g);
                }
            }
            Node::Pow(b, e) => self.plain.entry(b.clone()).or_default().push(e.clone()),
            Node::AbsPow(b, e) => self.abs.entry(b.clone()).or_default().push(e.clone()),
            Node::Exp(a) => self.exp_args.push(a.clone()),
            Node::Add(_, _) => {
                let (k, s) = primitive_sum(f);
                *self.coef_mut() *= k;
                self.plain.entry(s).or_default().push(Expr::one());
            }
            _ => self.plain.entry(f.clone()).or_default().push(Expr::one()),
        }
    }
}

/// Write a sum as k * s with the leading monomial of s having coefficient 1.
fn primitive_sum(e: &Expr) -> (Rational, Expr) {
    match e.node() {
        Node::Add(c, ts) => {
            let k = ts[0].1.clone();
            if k.is_one() {
                return (k, e.clone());
            }
            let s = raw(Node::Add(c / &k, ts.iter().map(|(m, c2)| (m.clone(), c2 / &k)).collect()));
            (k, s)
        }
        _ => (Rational::one(), e.clone()),
    }
}

fn is_param_power(f: &Expr) -> bool {
    let (b, e) = f.base_exp();
    matches!(b.as_symbol(), Some(s) if s.is_param()) && e.is_num()
}

/// Canonical product.
pub fn mul_all<I: IntoIterator<Item = Expr>>(items: I) -> Expr {
    let mut acc = MulAcc::default();
    for e in items {
        acc.push(&e);
        if acc.coef.as_ref().is_some_and(|c| c.is_zero()) {
            return Expr::zero();
        }
    }
    finish_mul(acc)
}

fn finish_mul(acc: MulAcc) -> Expr {
    let mut coef = acc.coef.unwrap_or_else(Rational::one);
    let mut plain: BTreeMap<Expr, Expr> = BTreeMap::new();
    for (b, es) in acc.plain {
        plain.insert(b, add_all(es));
    }
    let mut factors: Vec<Expr> = Vec::new();

    for (b, qs) in acc.abs {
        let a = add_all(qs);
        if a.is_zero() {
            continue;
        }
        let n = plain.get(&b).cloned();
        let n_int = match &n {
            None => Some(BigInt::zero()),
            Some(e) => e.as_integer(),
        };
        let n_int = match n_int {
            Some(v) => v,
            None => {
                factors.push(raw(Node::AbsPow(b, a)));
                continue;
            }
        };
        if let Some(ai) = a.as_integer() {
            if ai.is_even() {
                plain.insert(b, Expr::num(Rational::from_integer(ai + n_int)));
            } else {
                plain.insert(b.clone(), Expr::num(Rational::from_integer(ai - 1 + n_int)));
                factors.push(raw(Node::AbsPow(b, Expr::one())));
            }
        } else {
            let n1 = n_int.mod_floor(&BigInt::from(2));
            let shift = Expr::num(Rational::from_integer(&n_int - &n1));
            let a2 = add_all([a, shift]);
            plain.insert(b.clone(), Expr::num(Rational::from_integer(n1)));
            if !a2.is_zero() {
                factors.push(raw(Node::AbsPow(b, a2)));
            }
        }
    }

    let mut sums: Vec<(Expr, usize)> = Vec::new();
    for (b, e) in plain {
        if e.is_zero() {
            continue;
        }
        if let Node::Num(c) = b.node() {
            if let Some(ev) = e.as_num() {
                if let Some(v) = pow_rational(c, ev) {
                    coef *= v;
                    continue;
                }
            }
            factors.push(raw(Node::Pow(b, e)));
            continue;
        }
        if let (Some(s), Some(n)) = (b.as_symbol(), e.as_integer()) {
            match s.flag() {
                Flag::Sign => {
                    if n.is_odd() {
                        factors.push(b);
                    }
                    continue;
                }
                Flag::Idempotent if n.is_positive() => {
                    factors.push(b);
                    continue;
                }
                _ => {}
            }
        }
        if let Node::Add(_, _) = b.node() {
            if let Some(n) = e.as_integer() {
                if n.is_positive() {
                    sums.push((b, n.to_usize().expect("exponent too large")));
                    continue;
                }
            }
        }
        if e.is_one() {
            factors.push(b);
        } else {
            factors.push(raw(Node::Pow(b, e)));
        }
    }

    let ea = add_all(acc.exp_args);
    if !ea.is_zero() {
        factors.push(raw(Node::Exp(ea)));
    }

    factors.sort();
    let prod = if coef.is_zero() {
        Expr::zero()
    } else if factors.is_empty() {
        Expr::num(coef)
    } else if factors.len() == 1 && coef.is_one() {
        factors.pop().unwrap()
    } else {
        raw(Node::Mul(coef, factors))
    };
    let mut result = prod;
    for (s, n) in sums {
        for _ in 0..n {
            result = expand2(&result, &s);
        }
    }
    result
}

fn expand2(a: &Expr, b: &Expr) -> Expr {
    let ta: Vec<Expr> = a.terms().into_iter().map(|(m, k)| mul_coef(&k, &m)).collect();
    let tb: Vec<Expr> = b.terms().into_iter().map(|(m, k)| mul_coef(&k, &m)).collect();
    let mut out = Vec::with_capacity(ta.len() * tb.len());
    for x in &ta {
        for y in &tb {
            out.push(mul_all([x.clone(), y.clone()]));
        }
    }
    add_all(out)
}

/// Canonical power b^e.
pub fn pow(b: &Expr, e: &Expr) -> Expr {
    if e.is_zero() {
        return Expr::one();
    }
    if e.is_one() {
        return b.clone();
    }
    let e_int = e.as_integer();
    match b.node() {
        Node::Num(c) => {
            if c.is_zero() {
                if e.as_num().is_some_and(|v| v.is_negative()) {
                    panic!("division by zero");
                }
                if e.as_num().is_some() {
                    return Expr::zero();
                }
            }
            if let Some(ev) = e.as_num() {
                if let Some(v) = pow_rational(c, ev) {
                    return Expr::num(v);
                }
            }
            if c.is_one() {
                return Expr::one();
            }
            mul_all([raw(Node::Pow(b.clone(), e.clone()))])
        }
        Node::Mul(c, fs) if e_int.is_some() => {
            let mut items = vec![pow(&Expr::num(c.clone()), e)];
            items.extend(fs.iter().map(|f| pow(f, e)));
            mul_all(items)
        }
        Node::Pow(b2, e2) => {
            if e_int.is_some() {
                return pow(b2, &mul_all([e2.clone(), e.clone()]));
            }
            if let Some(n2) = e2.as_integer() {
                if n2.is_even() {
                    return abspow(b2, &mul_all([e2.clone(), e.clone()]));
                }
            }
            mul_all([raw(Node::Pow(b.clone(), e.clone()))])
        }
        Node::AbsPow(b2, e2) => abspow(b2, &mul_all([e2.clone(), e.clone()])),
        Node::Exp(a) => exp(&mul_all([a.clone(), e.clone()])),
        Node::Add(_, _) => {
            let (k, s) = primitive_sum(b);
            if e_int.is_some() || k.is_positive() {
                mul_all([pow(&Expr::num(k), e), raw(Node::Pow(s, e.clone()))])
            } else {
                mul_all([raw(Node::Pow(b.clone(), e.clone()))])
            }
        }
        _ => mul_all([raw(Node::Pow(b.clone(), e.clone()))]),
    }
}

/// Canonical |b|^e.
pub fn abspow(b: &Expr, e: &Expr) -> Expr {
    if e.is_zero() {
        return Expr::one();
    }
    match b.node() {
        Node::Num(c) => pow(&Expr::num(c.abs()), e),
        Node::Mul(c, fs) => {
            let mut items = vec![pow(&Expr::num(c.abs()), e)];
            items.extend(fs.iter().map(|f| abspow(f, e)));
            mul_all(items)
        }
        Node::Pow(b2, e2) => abspow(b2, &mul_all([e2.clone(), e.clone()])),
        Node::AbsPow(b2, e2) => abspow(b2, &mul_all([e2.clone(), e.clone()])),
        Node::Exp(a) => exp(&mul_all([a.clone(), e.clone()])),
        Node::Sym(s) => match s.flag() {
            Flag::Positive => pow(b, e),
            Flag::Sign => Expr::one(),
            Flag::Idempotent => b.clone(),
            Flag::None => mul_all([raw(Node::AbsPow(b.clone(), e.clone()))]),
        },
        Node::Add(_, _) => {
            let (k, s) = primitive_sum(b);
            mul_all([pow(&Expr::num(k.abs()), e), raw(Node::AbsPow(s, e.clone()))])
        }
        _ => mul_all([raw(Node::AbsPow(b.clone(), e.clone()))]),
    }
}

/// Canonical e^a. Terms of the form k*P*ln|b| with P a product of parameters
/// are pulled out as |b|^(k*P).
pub fn exp(a: &Expr) -> Expr {
    if a.is_zero() {
        return Expr::one();
    }
    let mut pulled: Vec<Expr> = Vec::new();
    let mut rest: Vec<Expr> = Vec::new();
    for (m, k) in a.terms() {
        let fs = m.factors();
        let logs: Vec<&Expr> = fs.iter().filter(|f| matches!(f.node(), Node::LnAbs(_))).collect();
        if logs.len() == 1 && fs.iter().all(|f| matches!(f.node(), Node::LnAbs(_)) || is_param_power(f)) {
            let base = match logs[0].node() {
                Node::LnAbs(b) => b.clone(),
                _ => unreachable!(),
            };
            let others: Vec<Expr> = fs.iter().filter(|f| !matches!(f.node(), Node::LnAbs(_))).cloned().collect();
            let mut ex = vec![Expr::num(k)];
            ex.extend(others);
            pulled.push(abspow(&base, &mul_all(ex)));
        } else {
            rest.push(mul_coef(&k, &m));
        }
    }
    let r = add_all(rest);
    if !r.is_zero() {
        pulled.push(raw(Node::Exp(r)));
    }
    mul_all(pulled)
}

/// Canonical ln|a|.
pub fn lnabs(a: &Expr) -> Expr {
    match a.node() {
        Node::Num(c) => {
            if c.is_zero() {
                panic!("logarithm of zero");
            }
            let c = c.abs();
            if c.is_one() {
                Expr::zero()
            } else {
                raw(Node::LnAbs(Expr::num(c)))
            }
        }
        Node::Mul(c, fs) => {
            let mut items = vec![lnabs(&Expr::num(c.clone()))];
            items.extend(fs.iter().map(lnabs));
            add_all(items)
        }
        Node::Pow(b, e) | Node::AbsPow(b, e) => mul_all([e.clone(), lnabs(b)]),
        Node::Exp(x) => x.clone(),
        Node::Sym(s) if s.flag() == Flag::Sign => Expr::zero(),
        Node::Add(_, _) => {
            let (k, s) = primitive_sum(a);
            add_all([lnabs(&Expr::num(k)), raw(Node::LnAbs(s))])
        }
        _ => raw(Node::LnAbs(a.clone())),
    }
}

pub fn func(app: FuncApp) -> Expr {
    assert_eq!(app.args.len(), app.params.len(), "arity mismatch for {}", app.name);
    raw(Node::Func(app))
}

pub fn neg(a: &Expr) -> Expr {
    mul_coef(&q(-1), a)
}

pub fn add(a: &Expr, b: &Expr) -> Expr {
    add_all([a.clone(), b.clone()])
}

pub fn sub(a: &Expr, b: &Expr) -> Expr {
    add_all([a.clone(), neg(b)])
}

pub fn mul(a: &Expr, b: &Expr) -> Expr {
    mul_all([a.clone(), b.clone()])
}

pub fn div(a: &Expr, b: &Expr) -> Expr {
    mul_all([a.clone(), pow(b, &Expr::int(-1))])
}

pub fn powi(a: &Expr, n: i64) -> Expr {
    pow(a, &Expr::int(n))
}

impl Expr {
    pub fn pow(&self, e: &Expr) -> Expr {
        pow(self, e)
    }
    pub fn powi(&self, n: i64) -> Expr {
        powi(self, n)
    }
    pub fn abspow(&self, e: &Expr) -> Expr {
        abspow(self, e)
    }
    pub fn abs(&self) -> Expr {
        abspow(self, &Expr::one())
    }
    pub fn exp(&self) -> Expr {
        exp(self)
    }
    pub fn lnabs(&self) -> Expr {
        lnabs(self)
    }
    pub fn recip(&self) -> Expr {
        powi(self, -1)
    }
    pub fn scale(&self, k: &Rational) -> Expr {
        mul_coef(k, self)
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $f:ident) => {
        impl std::ops::$tr<Expr> for Expr {
            type Output = Expr;
            fn $m(self, rhs: Expr) -> Expr {
                $f(&self, &rhs)
            }
        }
        impl std::ops::$tr<&Expr> for Expr {
            type Output = Expr;
            fn $m(self, rhs: &Expr) -> Expr {
                $f(&self, rhs)
            }
        }
        impl std::ops::$tr<Expr> for &Expr {
            type Output = Expr;
            fn $m(self, rhs: Expr) -> Expr {
                $f(self, &rhs)
            }
        }
        impl std::ops::$tr<&Expr> for &Expr {
            type Output = Expr;
            fn $m(self, rhs: &Expr) -> Expr {
                $f(self, rhs)
            }
        }
        impl std::ops::$tr<i64> for Expr {
            type Output = Expr;
            fn $m(self, rhs: i64) -> Expr {
                $f(&self, &Expr::int(rhs))
            }
        }
        impl std::ops::$tr<i64> for &Expr {
            type Output = Expr;
            fn $m(self, rhs: i64) -> Expr {
                $f(self, &Expr::int(rhs))
            }
        }
        impl std::ops::$tr<Expr> for i64 {
            type Output = Expr;
            fn $m(self, rhs: Expr) -> Expr {
                $f(&Expr::int(self), &rhs)
            }
        }
        impl std::ops::$tr<&Expr> for i64 {
            type Output = Expr;
            fn $m(self, rhs: &Expr) -> Expr {
                $f(&Expr::int(self), rhs)
            }
        }
    };
}

binop!(Add, add, add);
binop!(Sub, sub, sub);
binop!(Mul, mul, mul);
binop!(Div, div, div);

impl std::ops::Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        neg(&self)
    }
}

impl std::ops::Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        neg(self)
    }
}

impl std::iter::Sum for Expr {
    fn sum<I: Iterator<Item = Expr>>(iter: I) -> Expr {
        add_all(iter)
    }
}

impl std::iter::Product for Expr {
    fn product<I: Iterator<Item = Expr>>(iter: I) -> Expr {
        mul_all(iter)
    }
}

impl From<&Symbol> for Expr {
    fn from(s: &Symbol) -> Expr {
        Expr::sym(s)
    }
}

impl From<Symbol> for Expr {
    fn from(s: Symbol) -> Expr {
        Expr::sym(&s)
    }
}

impl From<i64> for Expr {
    fn from(n: i64) -> Expr {
        Expr::int(n)
    }
}

impl From<Rational> for Expr {
    fn from(c: Rational) -> Expr {
        Expr::num(c)
    }
}

/// Rebuild an expression bottom-up through the canonical constructors,
/// replacing leaves via `leaf`. Subtrees for which `skip` holds are kept.
pub fn rebuild(e: &Expr, skip: &dyn Fn(&Expr) -> bool, leaf: &mut dyn FnMut(&Node) -> Option<Expr>) -> Expr {
    if skip(e) {
        return e.clone();
    }
    if let Some(r) = leaf(e.node()) {
        return r;
    }
    match e.node() {
        Node::Num(_) | Node::Sym(_) => e.clone(),
        Node::Func(a) => {
            let args: Vec<Expr> = a.args.iter().map(|x| rebuild(x, skip, leaf)).collect();
            func(FuncApp { name: a.name.clone(), params: a.params.clone(), args, orders: a.orders.clone() })
        }
        Node::LnAbs(x) => lnabs(&rebuild(x, skip, leaf)),
        Node::Exp(x) => exp(&rebuild(x, skip, leaf)),
        Node::Pow(b, x) => pow(&rebuild(b, skip, leaf), &rebuild(x, skip, leaf)),
        Node::AbsPow(b, x) => abspow(&rebuild(b, skip, leaf), &rebuild(x, skip, leaf)),
        Node::Mul(c, fs) => {
            let mut items = vec![Expr::num(c.clone())];
            items.extend(fs.iter().map(|f| rebuild(f, skip, leaf)));
            mul_all(items)
        }
        Node::Add(c, ts) => {
            let mut items = vec![Expr::num(c.clone())];
            items.extend(ts.iter().map(|(m, k)| mul_coef(k, &rebuild(m, skip, leaf))));
            add_all(items)
        }
    }
}

/// Re-run every canonical constructor over the tree.
pub fn normalize(e: &Expr) -> Expr {
    rebuild(e, &|_| false, &mut |_| None)
}
