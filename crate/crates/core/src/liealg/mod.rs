//! Finite-dimensional Lie algebras given by structure constants.

mod aut;
mod linalg;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write;

use thiserror::Error;

use crate::expr::{monomial_coefficients, Expr, Symbol};
use crate::vecfield::{FieldError, VectorField};
use crate::Rational;

pub use aut::{flag_automorphism_solve, preserves, AutFamily};
pub use linalg::{express, nullspace, rref, unit, Scalar, Subspace};

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum LieError {
    #[error("[{left}, {right}] = {bracket} leaves the span")]
    NotClosed { left: String, right: String, bracket: String },
    #[error("structure constants are not antisymmetric at ({0}, {1})")]
    Antisymmetry(usize, usize),
    #[error("Jacobi identity fails for ({0}, {1}, {2})")]
    Jacobi(usize, usize, usize),
    #[error("table line {line}: {msg}")]
    Table { line: usize, msg: String },
    #[error("radical check failed: {0}")]
    Radical(String),
    #[error("unsupported flag: {0}")]
    Flag(String),
    #[error("{0}")]
    Field(#[from] FieldError),
}

/// Structure constants `[e_i, e_j] = sum_k c[i][j][k] e_k`.
#[derive(Clone, Debug, PartialEq)]
pub struct LieAlgebra<S: Scalar = Rational> {
    labels: Vec<String>,
    c: Vec<Vec<Vec<S>>>,
}

impl<S: Scalar> LieAlgebra<S> {
    /// Validates antisymmetry and the Jacobi identity.
    pub fn new(labels: Vec<String>, c: Vec<Vec<Vec<S>>>) -> Result<LieAlgebra<S>, LieError> {
        let n = labels.len();
        assert!(c.len() == n && c.iter().all(|r| r.len() == n && r.iter().all(|v| v.len() == n)), "table shape");
        let a = LieAlgebra { labels, c };
        for i in 0..n {
            for j in 0..n {
                let s: Vec<S> = (0..n).map(|k| a.c[i][j][k].clone() + a.c[j][i][k].clone()).collect();
                if s.iter().any(|v| !v.is_zero()) {
                    return Err(LieError::Antisymmetry(i, j));
                }
            }
        }
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    let (ei, ej, ek) = (unit::<S>(n, i), unit::<S>(n, j), unit::<S>(n, k));
                    let t1 = a.bracket(&ei, &a.bracket(&ej, &ek));
                    let t2 = a.bracket(&ej, &a.bracket(&ek, &ei));
                    let t3 = a.bracket(&ek, &a.bracket(&ei, &ej));
                    if (0..n).any(|m| !(t1[m].clone() + t2[m].clone() + t3[m].clone()).is_zero()) {
                        return Err(LieError::Jacobi(i, j, k));
                    }
                }
            }
        }
        Ok(a)
    }

    /// From nonzero brackets `(i, j, k, c)` with `i < j` (0-based); the rest follows by antisymmetry.
    pub fn from_brackets(labels: Vec<String>, entries: &[(usize, usize, usize, S)]) -> Result<LieAlgebra<S>, LieError> {
        let n = labels.len();
        let mut c = vec![vec![vec![S::zero(); n]; n]; n];
        for (i, j, k, v) in entries {
            c[*i][*j][*k] = c[*i][*j][*k].clone() + v.clone();
            c[*j][*i][*k] = c[*j][*i][*k].clone() - v.clone();
        }
        LieAlgebra::new(labels, c)
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn constant(&self, i: usize, j: usize, k: usize) -> &S {
        &self.c[i][j][k]
    }

    pub fn bracket(&self, x: &[S], y: &[S]) -> Vec<S> {
        let n = self.dim();
        let mut out = vec![S::zero(); n];
        for i in 0..n {
            if x[i].is_zero() {
                continue;
            }
            for j in 0..n {
                if y[j].is_zero() {
                    continue;
                }
                let w = x[i].clone() * y[j].clone();
                for k in 0..n {
                    if !self.c[i][j][k].is_zero() {
                        out[k] = out[k].clone() + w.clone() * self.c[i][j][k].clone();
                    }
                }
            }
        }
        out
    }

    pub fn whole(&self) -> Subspace<S> {
        Subspace::whole(self.dim())
    }

    /// `[a, b]`
    pub fn product(&self, a: &Subspace<S>, b: &Subspace<S>) -> Subspace<S> {
        let mut v = Vec::new();
        for x in a.basis() {
            for y in b.basis() {
                v.push(self.bracket(x, y));
            }
        }
        Subspace::span(self.dim(), v)
    }

    /// `g, g', g'', ...` until the dimension stabilizes.
    pub fn derived_series(&self) -> Vec<Subspace<S>> {
        self.derived_series_of(&self.whole())
    }

    pub fn derived_series_of(&self, s: &Subspace<S>) -> Vec<Subspace<S>> {
        let mut out = vec![s.clone()];
        loop {
            let last = out.last().unwrap();
            let next = self.product(last, last);
            if next.dim() == last.dim() {
                return out;
            }
            let stop = next.dim() == 0;
            out.push(next);
            if stop {
                return out;
            }
        }
    }

    /// `g, [g,g], [g,[g,g]], ...` until the dimension stabilizes.
    pub fn lower_central_series(&self) -> Vec<Subspace<S>> {
        let g = self.whole();
        let mut out = vec![g.clone()];
        loop {
            let last = out.last().unwrap();
            let next = self.product(&g, last);
            if next.dim() == last.dim() {
                return out;
            }
            let stop = next.dim() == 0;
            out.push(next);
            if stop {
                return out;
            }
        }
    }

    /// `{x : [x, s] = 0 for all s in S}`
    pub fn centralizer(&self, s: &Subspace<S>) -> Subspace<S> {
        let n = self.dim();
        let mut rows = Vec::new();
        for y in s.basis() {
            for k in 0..n {
                rows.push((0..n).map(|i| self.bracket(&unit(n, i), y)[k].clone()).collect());
            }
        }
        if rows.is_empty() {
            return self.whole();
        }
        Subspace::span(n, nullspace(&rows, n))
    }

    pub fn center(&self) -> Subspace<S> {
        self.centralizer(&self.whole())
    }

    pub fn is_subalgebra(&self, s: &Subspace<S>) -> bool {
        s.contains_space(&self.product(s, s))
    }

    pub fn is_ideal(&self, s: &Subspace<S>) -> bool {
        s.contains_space(&self.product(&self.whole(), s))
    }

    pub fn is_solvable_sub(&self, s: &Subspace<S>) -> bool {
        self.derived_series_of(s).last().map_or(true, |d| d.dim() == 0)
    }

    pub fn is_solvable(&self) -> bool {
        self.is_solvable_sub(&self.whole())
    }

    pub fn is_nilpotent(&self) -> bool {
        self.lower_central_series().last().map_or(true, |d| d.dim() == 0)
    }

    /// Matrix of `ad x`: column `j` is `[x, e_j]`.
    pub fn ad(&self, x: &[S]) -> Vec<Vec<S>> {
        let n = self.dim();
        let cols: Vec<Vec<S>> = (0..n).map(|j| self.bracket(x, &unit(n, j))).collect();
        (0..n).map(|i| (0..n).map(|j| cols[j][i].clone()).collect()).collect()
    }

    /// `tr(ad x ad y)`
    pub fn killing(&self, x: &[S], y: &[S]) -> S {
        let (a, b) = (self.ad(x), self.ad(y));
        let n = self.dim();
        let mut t = S::zero();
        for i in 0..n {
            for k in 0..n {
                t = t + a[i][k].clone() * b[k][i].clone();
            }
        }
        t
    }

    /// Radical as the Killing-orthogonal of the derived algebra, verified to be a solvable ideal.
    pub fn radical(&self) -> Result<Subspace<S>, LieError> {
        let n = self.dim();
        let d = self.product(&self.whole(), &self.whole());
        let rows: Vec<Vec<S>> = d
            .basis()
            .iter()
            .map(|y| (0..n).map(|i| self.killing(&unit(n, i), y)).collect())
            .collect();
        let r = if rows.is_empty() { self.whole() } else { Subspace::span(n, nullspace(&rows, n)) };
        if !self.is_ideal(&r) {
            return Err(LieError::Radical("candidate is not an ideal".into()));
        }
        if !self.is_solvable_sub(&r) {
            return Err(LieError::Radical("candidate is not solvable".into()));
        }
        Ok(r)
    }

    /// Coordinates of a vector as `label` combinations, for display.
    pub fn describe(&self, v: &[S]) -> String
    where
        S: std::fmt::Display,
    {
        let parts: Vec<String> = v
            .iter()
            .zip(&self.labels)
            .filter(|(c, _)| !c.is_zero())
            .map(|(c, l)| if *c == S::one() { l.clone() } else { format!("({c})*{l}") })
            .collect();
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" + ")
        }
    }

    /// Span description `<a, b, ...>`.
    pub fn describe_space(&self, s: &Subspace<S>) -> String
    where
        S: std::fmt::Display,
    {
        let parts: Vec<String> = s.basis().iter().map(|v| self.describe(v)).collect();
        format!("<{}>", parts.join(", "))
    }
}

impl LieAlgebra<Rational> {
    /// Plain table: optional `labels ...` line, then `i j k c` lines (1-based, `c^k_{ij} = c`).
    pub fn to_table(&self) -> String {
        let mut s = String::new();
        writeln!(s, "labels {}", self.labels.join(" ")).unwrap();
        let n = self.dim();
        for i in 0..n {
            for j in i + 1..n {
                for k in 0..n {
                    let c = &self.c[i][j][k];
                    if !Scalar::is_zero(c) {
                        writeln!(s, "{} {} {} {}", i + 1, j + 1, k + 1, c).unwrap();
                    }
                }
            }
        }
        s
    }

    pub fn from_table(text: &str) -> Result<LieAlgebra<Rational>, LieError> {
        let mut labels: Option<Vec<String>> = None;
        let mut dim: Option<usize> = None;
        let mut entries: Vec<(usize, usize, usize, Rational)> = Vec::new();
        let err = |line: usize, msg: &str| LieError::Table { line, msg: msg.to_string() };
        for (ln, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let toks: Vec<&str> = line.split_whitespace().collect();
            match toks[0] {
                "labels" => labels = Some(toks[1..].iter().map(|s| s.to_string()).collect()),
                "dim" => dim = Some(toks.get(1).and_then(|s| s.parse().ok()).ok_or_else(|| err(ln + 1, "bad dim"))?),
                _ => {
                    if toks.len() != 4 {
                        return Err(err(ln + 1, "expected `i j k c`"));
                    }
                    let idx: Vec<usize> = toks[..3]
                        .iter()
                        .map(|s| s.parse::<usize>().ok().filter(|&v| v >= 1))
                        .collect::<Option<_>>()
                        .ok_or_else(|| err(ln + 1, "indices must be positive integers"))?;
                    let c: Rational = toks[3].parse().map_err(|_| err(ln + 1, "bad rational"))?;
                    entries.push((idx[0] - 1, idx[1] - 1, idx[2] - 1, c));
                }
            }
        }
        let max = entries.iter().map(|(i, j, k, _)| *i.max(j).max(k) + 1).max().unwrap_or(0);
        let n = labels.as_ref().map(|l| l.len()).or(dim).unwrap_or(max);
        if max > n {
            return Err(err(0, "index exceeds dimension"));
        }
        let labels = labels.unwrap_or_else(|| (1..=n).map(|i| format!("e{i}")).collect());
        let mut c = vec![vec![vec![Rational::from_integer(0.into()); n]; n]; n];
        let mut seen = BTreeSet::new();
        for (i, j, k, v) in entries {
            if i == j {
                return Err(err(0, "diagonal bracket"));
            }
            let (a, b, v) = if i < j { (i, j, v) } else { (j, i, -v) };
            if !seen.insert((a, b, k)) {
                return Err(err(0, "duplicate entry"));
            }
            c[a][b][k] = v.clone();
            c[b][a][k] = -v;
        }
        LieAlgebra::new(labels, c)
    }
}

/// Result of a closure check.
#[derive(Clone, Debug)]
pub struct Closure {
    pub algebra: LieAlgebra<Rational>,
    /// The independent input fields, in input order.
    pub fields: Vec<(String, VectorField)>,
    /// Labels dropped as linearly dependent on earlier ones.
    pub pruned: Vec<String>,
}

type Key = (Symbol, Expr);

fn flatten(v: &VectorField) -> BTreeMap<Key, Rational> {
    let mut out = BTreeMap::new();
    for (s, c) in v.coeffs() {
        for (m, k) in monomial_coefficients(c) {
            out.insert((s.clone(), m), k);
        }
    }
    out
}

/// Rational coordinates of the fields with respect to the canonical monomials
/// of their coefficients, one row per field, on a common key set.
pub fn coordinate_rows(fields: &[VectorField]) -> Vec<Vec<Rational>> {
    let flat: Vec<BTreeMap<Key, Rational>> = fields.iter().map(flatten).collect();
    let keys: Vec<Key> = flat.iter().flat_map(|m| m.keys().cloned()).collect::<BTreeSet<_>>().into_iter().collect();
    flat.iter().map(|m| dense(m, &keys)).collect()
}

fn dense(m: &BTreeMap<Key, Rational>, keys: &[Key]) -> Vec<Rational> {
    keys.iter().map(|k| m.get(k).cloned().unwrap_or_else(|| Rational::from_integer(0.into()))).collect()
}

/// Structure constants of the span of the fields, or the first escaping bracket.
/// Coefficients are compared as rational combinations of canonical monomials.
pub fn close_or_fail(fields: &[(String, VectorField)]) -> Result<Closure, LieError> {
    let flat: Vec<BTreeMap<Key, Rational>> = fields.iter().map(|(_, v)| flatten(v)).collect();
    let mut keys: BTreeSet<Key> = flat.iter().flat_map(|m| m.keys().cloned()).collect();
    let mut kept: Vec<usize> = Vec::new();
    let mut pruned = Vec::new();
    {
        let keyv: Vec<Key> = keys.iter().cloned().collect();
        let mut rows: Vec<Vec<Rational>> = Vec::new();
        for (i, m) in flat.iter().enumerate() {
            let v = dense(m, &keyv);
            if express(&rows, &v).is_some() {
                pruned.push(fields[i].0.clone());
            } else {
                rows.push(v);
                kept.push(i);
            }
        }
    }
    let n = kept.len();
    let mut brackets = BTreeMap::new();
    for a in 0..n {
        for b in a + 1..n {
            let w = fields[kept[a]].1.bracket(&fields[kept[b]].1)?;
            let m = flatten(&w);
            keys.extend(m.keys().cloned());
            brackets.insert((a, b), (w, m));
        }
    }
    let keyv: Vec<Key> = keys.into_iter().collect();
    let rows: Vec<Vec<Rational>> = kept.iter().map(|&i| dense(&flat[i], &keyv)).collect();
    let mut entries = Vec::new();
    for ((a, b), (w, m)) in &brackets {
        let v = dense(m, &keyv);
        let coef = express(&rows, &v).ok_or_else(|| LieError::NotClosed {
            left: fields[kept[*a]].0.clone(),
            right: fields[kept[*b]].0.clone(),
            bracket: w.to_string(),
        })?;
        for (k, c) in coef.into_iter().enumerate() {
            if !Scalar::is_zero(&c) {
                entries.push((*a, *b, k, c));
            }
        }
    }
    let labels: Vec<String> = kept.iter().map(|&i| fields[i].0.clone()).collect();
    let algebra = LieAlgebra::from_brackets(labels, &entries)?;
    Ok(Closure { algebra, fields: kept.iter().map(|&i| fields[i].clone()).collect(), pruned })
}
