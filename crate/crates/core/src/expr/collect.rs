use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use thiserror::Error;

use super::node::{self, Expr, Node};
use super::symbol::Symbol;
use crate::Rational;

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum CollectError {
    #[error("expression is not polynomial in {var}: offending factor {factor}")]
    NotPolynomial { var: String, factor: String },
}

/// Exact occurrence test (the mask in [`Expr::may_contain`] only rules symbols out).
pub fn contains(e: &Expr, s: &Symbol) -> bool {
    if !e.may_contain(s) {
        return false;
    }
    match e.node() {
        Node::Num(_) => false,
        Node::Sym(x) => x == s,
        Node::Func(a) => a.args.iter().any(|x| contains(x, s)),
        Node::LnAbs(a) | Node::Exp(a) => contains(a, s),
        Node::Pow(b, x) | Node::AbsPow(b, x) => contains(b, s) || contains(x, s),
        Node::Mul(_, fs) => fs.iter().any(|x| contains(x, s)),
        Node::Add(_, ts) => ts.iter().any(|(m, _)| contains(m, s)),
    }
}

/// Split `e = sum monomial * coefficient` with monomials in `vars` and coefficients free of them.
pub fn collect(e: &Expr, vars: &[Symbol]) -> Result<BTreeMap<Expr, Expr>, CollectError> {
    let mut acc: BTreeMap<Expr, Vec<Expr>> = BTreeMap::new();
    for (m, k) in e.terms() {
        let mut mono = Vec::new();
        let mut rest = vec![Expr::num(k)];
        for f in m.factors() {
            let (b, x) = f.base_exp();
            let is_var = b.as_symbol().is_some_and(|s| vars.contains(s));
            if is_var {
                match x.as_integer() {
                    Some(n) if !n.is_negative() => {
                        mono.push(f.clone());
                        continue;
                    }
                    _ => {}
                }
            }
            if let Some(v) = vars.iter().find(|v| contains(&f, v)) {
                return Err(CollectError::NotPolynomial { var: v.name().to_string(), factor: f.to_string() });
            }
            rest.push(f);
        }
        acc.entry(node::mul_all(mono)).or_default().push(node::mul_all(rest));
    }
    Ok(acc
        .into_iter()
        .map(|(m, cs)| (m, node::add_all(cs)))
        .filter(|(_, c)| !c.is_zero())
        .collect())
}

/// Multiply by the least common multiple of every negative power of a sum, so
/// that the result is free of rational-function denominators built from sums.
pub fn clear_denominators(e: &Expr) -> Expr {
    let mut den: BTreeMap<Expr, BigInt> = BTreeMap::new();
    for (m, _) in e.terms() {
        for f in m.factors() {
            if let Node::Pow(b, x) = f.node() {
                if matches!(b.node(), Node::Add(..)) {
                    if let Some(n) = x.as_integer() {
                        if n.is_negative() {
                            let need = -n;
                            let cur = den.entry(b.clone()).or_insert_with(BigInt::zero);
                            if need > *cur {
                                *cur = need;
                            }
                        }
                    }
                }
            }
        }
    }
    if den.is_empty() {
        return e.clone();
    }
    let factors: Vec<Expr> =
        den.into_iter().map(|(b, n)| node::powi(&b, n.to_i64().expect("exponent too large"))).collect();
    node::add_all(e.terms().into_iter().map(|(m, k)| {
        let mut items = vec![Expr::num(k), m];
        items.extend(factors.iter().cloned());
        node::mul_all(items)
    }))
}

/// Rational coefficient of every monomial of an expanded expression.
pub fn monomial_coefficients(e: &Expr) -> BTreeMap<Expr, Rational> {
    e.terms().into_iter().collect()
}
