use std::collections::BTreeMap;

use super::{LieAlgebra, LieError, Scalar, Subspace};
use crate::expr::{diff, substitute, Expr, Node, Symbol};
use crate::Rational;

/// Automorphisms preserving a flag of coordinate subspaces, after elimination.
#[derive(Clone, Debug)]
pub struct AutFamily {
    /// `matrix[i][j]` is the `e_i` component of `A e_j`, with solved entries substituted.
    pub matrix: Vec<Vec<Expr>>,
    /// Entries that remain free parameters.
    pub free: Vec<Symbol>,
    /// Entries assumed nonzero (diagonal of one-dimensional flag steps).
    pub nonzero: Vec<Symbol>,
    /// Solved entries in terms of the free ones.
    pub solved: BTreeMap<Symbol, Expr>,
    /// Equations the elimination could not resolve; empty when fully solved.
    pub unresolved: Vec<Expr>,
    /// Coordinate subspaces (0-based indices) invariant under the whole family.
    pub invariant: Vec<Vec<usize>>,
}

/// Matrix entry symbol `a_ij` (1-based, printed `aij`).
pub fn entry(i: usize, j: usize) -> Symbol {
    Symbol::param(&format!("a{}{}", i + 1, j + 1))
}

fn invertible(e: &Expr, nonzero: &[Symbol]) -> bool {
    match e.node() {
        Node::Num(c) => !Scalar::is_zero(c),
        Node::Sym(s) => nonzero.contains(s),
        Node::Pow(b, x) => x.as_integer().is_some() && invertible(b, nonzero),
        Node::Mul(_, fs) => fs.iter().all(|f| invertible(f, nonzero)),
        _ => false,
    }
}

/// Solve `A[x,y] = [Ax,Ay]` for matrices preserving the flag, by repeated
/// linear elimination. The flag must consist of coordinate subspaces.
pub fn flag_automorphism_solve(alg: &LieAlgebra<Rational>, flag: &[Subspace<Rational>]) -> Result<AutFamily, LieError> {
    let n = alg.dim();
    if n > 9 {
        return Err(LieError::Flag("dimension above 9".into()));
    }
    let mut sets: Vec<Vec<usize>> = Vec::new();
    for s in flag {
        let idx = s.coordinate_indices().ok_or_else(|| LieError::Flag("not a coordinate subspace".into()))?;
        sets.push(idx);
    }
    sets.sort_by_key(|s| s.len());
    for w in sets.windows(2) {
        if !w[0].iter().all(|i| w[1].contains(i)) {
            return Err(LieError::Flag("subspaces are not nested".into()));
        }
    }
    let mut allowed = vec![vec![true; n]; n];
    for s in &sets {
        for &j in s {
            for i in 0..n {
                if !s.contains(&i) {
                    allowed[i][j] = false;
                }
            }
        }
    }
    // One-dimensional steps make the corresponding diagonal entry nonzero.
    let mut nonzero = Vec::new();
    let mut prev: Vec<usize> = Vec::new();
    let mut chain = sets.clone();
    if chain.last().is_none_or(|s| s.len() < n) {
        chain.push((0..n).collect());
    }
    for s in &chain {
        let new: Vec<usize> = s.iter().copied().filter(|i| !prev.contains(i)).collect();
        if new.len() == 1 {
            nonzero.push(entry(new[0], new[0]));
        }
        prev = s.clone();
    }

    let a: Vec<Vec<Expr>> = (0..n)
        .map(|i| (0..n).map(|j| if allowed[i][j] { Expr::sym(&entry(i, j)) } else { Expr::zero() }).collect())
        .collect();
    let mut unknowns: Vec<(usize, usize)> = Vec::new();
    for j in 0..n {
        for i in 0..n {
            if allowed[i][j] {
                unknowns.push((i, j));
            }
        }
    }

    let c = |i: usize, j: usize, k: usize| Expr::num(alg.constant(i, j, k).clone());
    let mut eqs: Vec<Expr> = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            for k in 0..n {
                let mut lhs = Expr::zero();
                for l in 0..n {
                    lhs = lhs + c(i, j, l) * &a[k][l];
                }
                let mut rhs = Expr::zero();
                for p in 0..n {
                    for q in 0..n {
                        let ck = alg.constant(p, q, k);
                        if !Scalar::is_zero(ck) {
                            rhs = rhs + &a[p][i] * &a[q][j] * Expr::num(ck.clone());
                        }
                    }
                }
                let e = lhs - rhs;
                if !e.is_zero() {
                    eqs.push(e);
                }
            }
        }
    }

    let mut solved: BTreeMap<Symbol, Expr> = BTreeMap::new();
    loop {
        eqs = eqs.iter().map(|e| substitute(e, &solved)).filter(|e| !e.is_zero()).collect();
        eqs.sort();
        eqs.dedup();
        // (coefficient is a number, column, descending row) preference
        let mut best: Option<((bool, usize, usize), Symbol, Expr)> = None;
        for e in &eqs {
            for &(i, j) in &unknowns {
                let v = entry(i, j);
                if solved.contains_key(&v) || !e.may_contain(&v) {
                    continue;
                }
                let d = diff(e, &v);
                if d.is_zero() || !diff(&d, &v).is_zero() || !invertible(&d, &nonzero) {
                    continue;
                }
                let rest = e - &d * Expr::sym(&v);
                if !diff(&rest, &v).is_zero() {
                    continue;
                }
                let val = -(rest / &d);
                if nonzero.contains(&v) && val.is_zero() {
                    continue;
                }
                let score = (!d.is_num(), j, n - i);
                if best.as_ref().is_none_or(|(s, _, _)| score < *s) {
                    best = Some((score, v, val));
                }
            }
        }
        let Some((_, v, val)) = best else { break };
        let mut one = BTreeMap::new();
        one.insert(v.clone(), val.clone());
        for x in solved.values_mut() {
            *x = substitute(x, &one);
        }
        solved.insert(v, val);
    }

    let matrix: Vec<Vec<Expr>> = a.iter().map(|r| r.iter().map(|e| substitute(e, &solved)).collect()).collect();
    let free: Vec<Symbol> =
        unknowns.iter().map(|&(i, j)| entry(i, j)).filter(|s| !solved.contains_key(s)).collect();
    let mut invariant = Vec::new();
    for mask in 1u32..(1 << n) - 1 {
        let s: Vec<usize> = (0..n).filter(|&i| mask & (1 << i) != 0).collect();
        let ok = s.iter().all(|&j| (0..n).filter(|i| !s.contains(i)).all(|i| matrix[i][j].is_zero()));
        if ok {
            invariant.push(s);
        }
    }
    invariant.sort_by_key(|s| (s.len(), s.clone()));
    Ok(AutFamily { matrix, free, nonzero, solved, unresolved: eqs, invariant })
}

/// Whether a numeric matrix (columns are images of basis vectors) preserves the brackets.
pub fn preserves(alg: &LieAlgebra<Rational>, m: &[Vec<Rational>]) -> bool {
    let n = alg.dim();
    let col = |j: usize| -> Vec<Rational> { (0..n).map(|i| m[i][j].clone()).collect() };
    let apply = |v: &[Rational]| -> Vec<Rational> {
        (0..n)
            .map(|i| (0..n).fold(<Rational as Scalar>::zero(), |acc, j| acc + m[i][j].clone() * v[j].clone()))
            .collect()
    };
    for i in 0..n {
        for j in i + 1..n {
            let lhs = apply(&alg.bracket(&super::unit(n, i), &super::unit(n, j)));
            let rhs = alg.bracket(&col(i), &col(j));
            if lhs != rhs {
                return false;
            }
        }
    }
    true
}

impl AutFamily {
    /// Numeric matrix for given values of the free entries.
    pub fn instantiate(&self, values: &BTreeMap<Symbol, Rational>) -> Result<Vec<Vec<Rational>>, crate::expr::EvalError> {
        self.matrix.iter().map(|r| r.iter().map(|e| crate::expr::eval(e, values)).collect()).collect()
    }

    /// Whether `lhs = rhs` holds identically on the solved family.
    pub fn implies(&self, lhs: &Expr, rhs: &Expr) -> bool {
        let d = substitute(&(lhs - rhs), &self.solved);
        crate::expr::is_zero(&d).is_zero()
    }
}
