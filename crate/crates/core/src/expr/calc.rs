use std::collections::{BTreeMap, BTreeSet, HashMap};

use thiserror::Error;

use super::node::{self, Expr, FuncApp, Node};
use super::symbol::Symbol;

/// Default maximal jet order.
pub const JET_CAP: u8 = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Dir {
    T,
    X,
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum CalcError {
    #[error("jet order overflow: {0} already has the maximal order {1}")]
    JetOverflow(String, u8),
    #[error("inconsistent binding: {0} survives substitution")]
    Inconsistent(String),
}

/// Partial derivative with respect to a symbol. Function symbols are
/// differentiated by the chain rule through their arguments.
pub fn diff(e: &Expr, s: &Symbol) -> Expr {
    let mut cache = HashMap::new();
    diff_c(e, s, &mut cache)
}

fn diff_c(e: &Expr, s: &Symbol, cache: &mut HashMap<Expr, Expr>) -> Expr {
    if !e.may_contain(s) {
        return Expr::zero();
    }
    if let Some(r) = cache.get(e) {
        return r.clone();
    }
    let r = match e.node() {
        Node::Num(_) => Expr::zero(),
        Node::Sym(x) => {
            if x == s {
                Expr::one()
            } else {
                Expr::zero()
            }
        }
        Node::Func(app) => {
            let mut parts = Vec::new();
            for (i, a) in app.args.iter().enumerate() {
                let da = diff_c(a, s, cache);
                if da.is_zero() {
                    continue;
                }
                let mut orders = app.orders.clone();
                orders[i] += 1;
                let d = node::func(FuncApp { name: app.name.clone(), params: app.params.clone(), args: app.args.clone(), orders });
                parts.push(node::mul(&d, &da));
            }
            node::add_all(parts)
        }
        Node::LnAbs(a) => node::div(&diff_c(a, s, cache), a),
        Node::Exp(a) => node::mul(&diff_c(a, s, cache), e),
        Node::Pow(b, x) => {
            let db = diff_c(b, s, cache);
            let dx = diff_c(x, s, cache);
            let mut parts = Vec::new();
            if !db.is_zero() {
                parts.push(node::mul_all([x.clone(), node::pow(b, &node::sub(x, &Expr::one())), db]));
            }
            if !dx.is_zero() {
                parts.push(node::mul_all([e.clone(), dx, b.lnabs()]));
            }
            node::add_all(parts)
        }
        Node::AbsPow(b, x) => {
            let db = diff_c(b, s, cache);
            let dx = diff_c(x, s, cache);
            let inner = node::add(&node::mul(&dx, &b.lnabs()), &node::mul_all([x.clone(), db, b.recip()]));
            node::mul(e, &inner)
        }
        Node::Mul(c, fs) => {
            let mut parts = Vec::new();
            for i in 0..fs.len() {
                let d = diff_c(&fs[i], s, cache);
                if d.is_zero() {
                    continue;
                }
                let mut items = vec![Expr::num(c.clone()), d];
                items.extend(fs.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, f)| f.clone()));
                parts.push(node::mul_all(items));
            }
            node::add_all(parts)
        }
        Node::Add(_, ts) => node::add_all(ts.iter().map(|(m, k)| node::mul_coef(k, &diff_c(m, s, cache)))),
    };
    cache.insert(e.clone(), r.clone());
    r
}

/// All symbols occurring in the expression, including inside function arguments.
pub fn symbols(e: &Expr) -> BTreeSet<Symbol> {
    let mut out = BTreeSet::new();
    fn walk(e: &Expr, out: &mut BTreeSet<Symbol>) {
        match e.node() {
            Node::Num(_) => {}
            Node::Sym(s) => {
                out.insert(s.clone());
            }
            Node::Func(a) => a.args.iter().for_each(|x| walk(x, out)),
            Node::LnAbs(a) | Node::Exp(a) => walk(a, out),
            Node::Pow(b, x) | Node::AbsPow(b, x) => {
                walk(b, out);
                walk(x, out)
            }
            Node::Mul(_, fs) => fs.iter().for_each(|x| walk(x, out)),
            Node::Add(_, ts) => ts.iter().for_each(|(m, _)| walk(m, out)),
        }
    }
    walk(e, &mut out);
    out
}

/// Total derivative `D_t` or `D_x` on the jet space truncated at order `cap`.
pub fn total_derivative(e: &Expr, dir: Dir, cap: u8) -> Result<Expr, CalcError> {
    let (it, ix) = match dir {
        Dir::T => (1, 0),
        Dir::X => (0, 1),
    };
    let mut parts = vec![diff(e, &match dir {
        Dir::T => Symbol::t(),
        Dir::X => Symbol::x(),
    })];
    for s in symbols(e) {
        if let Some((nt, nx)) = s.jet_index() {
            let d = diff(e, &s);
            if d.is_zero() {
                continue;
            }
            if nt + nx >= cap {
                return Err(CalcError::JetOverflow(s.name().to_string(), cap));
            }
            parts.push(node::mul(&Expr::sym(&Symbol::jet(nt + it, nx + ix)), &d));
        }
    }
    Ok(node::add_all(parts))
}

/// Simultaneous substitution of symbols.
pub fn substitute(e: &Expr, bindings: &BTreeMap<Symbol, Expr>) -> Expr {
    if bindings.is_empty() {
        return e.clone();
    }
    let mask = bindings.keys().fold(0u64, |m, s| m | s.mask_bit());
    let mut cache: HashMap<Expr, Expr> = HashMap::new();
    subst_rec(e, mask, bindings, &mut cache)
}

fn subst_rec(e: &Expr, mask: u64, b: &BTreeMap<Symbol, Expr>, cache: &mut HashMap<Expr, Expr>) -> Expr {
    if e.mask() & mask == 0 {
        return e.clone();
    }
    if let Some(r) = cache.get(e) {
        return r.clone();
    }
    let r = match e.node() {
        Node::Sym(s) => b.get(s).cloned().unwrap_or_else(|| e.clone()),
        _ => {
            let mut c2 = std::mem::take(cache);
            let r = rebuild_children(e, &mut |x| subst_rec(x, mask, b, &mut c2));
            *cache = c2;
            r
        }
    };
    cache.insert(e.clone(), r.clone());
    r
}

/// Rebuild a node from transformed children through the canonical constructors.
pub(crate) fn rebuild_children(e: &Expr, f: &mut dyn FnMut(&Expr) -> Expr) -> Expr {
    match e.node() {
        Node::Num(_) | Node::Sym(_) => e.clone(),
        Node::Func(a) => {
            let args = a.args.iter().map(&mut *f).collect();
            node::func(FuncApp { name: a.name.clone(), params: a.params.clone(), args, orders: a.orders.clone() })
        }
        Node::LnAbs(x) => f(x).lnabs(),
        Node::Exp(x) => f(x).exp(),
        Node::Pow(b, x) => node::pow(&f(b), &f(x)),
        Node::AbsPow(b, x) => node::abspow(&f(b), &f(x)),
        Node::Mul(c, fs) => {
            let mut items = vec![Expr::num(c.clone())];
            items.extend(fs.iter().map(&mut *f));
            node::mul_all(items)
        }
        Node::Add(c, ts) => {
            let mut items = vec![Expr::num(c.clone())];
            items.extend(ts.iter().map(|(m, k)| node::mul_coef(k, &f(m))));
            node::add_all(items)
        }
    }
}

/// Replace every application of the function `name` by `body`, where `body` is
/// written in the formal arguments `params`. Partial derivatives of the function
/// become the corresponding derivatives of the body.
pub fn subst_func(e: &Expr, name: &str, params: &[Symbol], body: &Expr) -> Expr {
    if !e.may_contain_func(name) {
        return e.clone();
    }
    let mut derivs: HashMap<Vec<u8>, Expr> = HashMap::new();
    let mut cache: HashMap<Expr, Expr> = HashMap::new();
    subst_func_rec(e, name, params, body, &mut derivs, &mut cache)
}

fn subst_func_rec(
    e: &Expr,
    name: &str,
    params: &[Symbol],
    body: &Expr,
    derivs: &mut HashMap<Vec<u8>, Expr>,
    cache: &mut HashMap<Expr, Expr>,
) -> Expr {
    if !e.may_contain_func(name) {
        return e.clone();
    }
    if let Some(r) = cache.get(e) {
        return r.clone();
    }
    let r = match e.node() {
        Node::Func(a) if &*a.name == name => {
            assert_eq!(a.args.len(), params.len(), "arity mismatch substituting {name}");
            let args: Vec<Expr> =
                a.args.iter().map(|x| subst_func_rec(x, name, params, body, derivs, cache)).collect();
            let d = derivs
                .entry(a.orders.clone())
                .or_insert_with(|| {
                    let mut d = body.clone();
                    for (i, &k) in a.orders.iter().enumerate() {
                        for _ in 0..k {
                            d = diff(&d, &params[i]);
                        }
                    }
                    d
                })
                .clone();
            let map: BTreeMap<Symbol, Expr> = params.iter().cloned().zip(args).collect();
            substitute(&d, &map)
        }
        _ => {
            let mut c2 = std::mem::take(cache);
            let r = rebuild_children(e, &mut |x| subst_func_rec(x, name, params, body, derivs, &mut c2));
            *cache = c2;
            r
        }
    };
    cache.insert(e.clone(), r.clone());
    r
}

/// Restrict to the manifold `u_tt = rhs` and its differential consequences:
/// every jet `u_{t^a x^b}` with `a >= 2` is replaced by `D_t^(a-2) D_x^b rhs`,
/// recursively, so the result contains no jet with two or more `t` derivatives.
pub fn on_shell(e: &Expr, rhs: &Expr, cap: u8) -> Result<Expr, CalcError> {
    let mut memo: BTreeMap<(u8, u8), Expr> = BTreeMap::new();
    let mut out = e.clone();
    for _ in 0..=cap {
        let bound: Vec<Symbol> = symbols(&out)
            .into_iter()
            .filter(|s| s.jet_index().is_some_and(|(nt, _)| nt >= 2))
            .collect();
        if bound.is_empty() {
            return Ok(out);
        }
        let mut map = BTreeMap::new();
        for s in bound {
            let (nt, nx) = s.jet_index().unwrap();
            let v = shell_value(nt, nx, rhs, cap, &mut memo)?;
            map.insert(s, v);
        }
        out = substitute(&out, &map);
    }
    let left: Vec<String> = symbols(&out)
        .into_iter()
        .filter(|s| s.jet_index().is_some_and(|(nt, _)| nt >= 2))
        .map(|s| s.name().to_string())
        .collect();
    if left.is_empty() {
        Ok(out)
    } else {
        Err(CalcError::Inconsistent(left.join(",")))
    }
}

fn shell_value(
    nt: u8,
    nx: u8,
    rhs: &Expr,
    cap: u8,
    memo: &mut BTreeMap<(u8, u8), Expr>,
) -> Result<Expr, CalcError> {
    if nt < 2 {
        return Ok(Expr::sym(&Symbol::jet(nt, nx)));
    }
    if let Some(v) = memo.get(&(nt, nx)) {
        return Ok(v.clone());
    }
    let v = if nt == 2 && nx == 0 {
        rhs.clone()
    } else if nt == 2 {
        let prev = shell_value(2, nx - 1, rhs, cap, memo)?;
        total_derivative(&prev, Dir::X, cap)?
    } else {
        let prev = shell_value(nt - 1, nx, rhs, cap, memo)?;
        total_derivative(&prev, Dir::T, cap)?
    };
    let v = reduce_shell(&v, rhs, cap, memo)?;
    memo.insert((nt, nx), v.clone());
    Ok(v)
}

fn reduce_shell(
    v: &Expr,
    rhs: &Expr,
    cap: u8,
    memo: &mut BTreeMap<(u8, u8), Expr>,
) -> Result<Expr, CalcError> {
    let bound: Vec<Symbol> = symbols(v)
        .into_iter()
        .filter(|s| s.jet_index().is_some_and(|(nt, _)| nt >= 2))
        .collect();
    if bound.is_empty() {
        return Ok(v.clone());
    }
    let mut map = BTreeMap::new();
    for s in bound {
        let (nt, nx) = s.jet_index().unwrap();
        map.insert(s, shell_value(nt, nx, rhs, cap, memo)?);
    }
    Ok(substitute(v, &map))
}
