use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_traits::{One, Zero};

use crate::expr::Expr;
use crate::Rational;

/// Field elements for exact linear algebra.
pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn from_rational(r: &Rational) -> Self;
}

impl Scalar for Rational {
    fn zero() -> Self {
        <Rational as Zero>::zero()
    }
    fn one() -> Self {
        <Rational as One>::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }
}

/// Symbolic scalars; zero means structurally zero.
impl Scalar for Expr {
    fn zero() -> Self {
        Expr::zero()
    }
    fn one() -> Self {
        Expr::one()
    }
    fn is_zero(&self) -> bool {
        Expr::is_zero(self)
    }
    fn from_rational(r: &Rational) -> Self {
        Expr::num(r.clone())
    }
}

/// Reduced row-echelon form; returns the nonzero rows and their pivot columns.
pub fn rref<S: Scalar>(mut m: Vec<Vec<S>>) -> (Vec<Vec<S>>, Vec<usize>) {
    let ncols = m.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..ncols {
        let Some(p) = (row..m.len()).find(|&r| !m[r][col].is_zero()) else { continue };
        m.swap(row, p);
        let inv = S::one() / m[row][col].clone();
        for v in m[row].iter_mut() {
            *v = v.clone() * inv.clone();
        }
        for r in 0..m.len() {
            if r != row && !m[r][col].is_zero() {
                let k = m[r][col].clone();
                for c in 0..ncols {
                    let d = m[row][c].clone() * k.clone();
                    m[r][c] = m[r][c].clone() - d;
                }
            }
        }
        pivots.push(col);
        row += 1;
        if row == m.len() {
            break;
        }
    }
    m.truncate(row);
    (m, pivots)
}

/// Basis of `{v : m v = 0}`.
pub fn nullspace<S: Scalar>(m: &[Vec<S>], ncols: usize) -> Vec<Vec<S>> {
    let (r, pivots) = rref(m.to_vec());
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&fc| {
            let mut v = vec![S::zero(); ncols];
            v[fc] = S::one();
            for (row, &pc) in r.iter().zip(&pivots) {
                v[pc] = -row[fc].clone();
            }
            v
        })
        .collect()
}

/// Solve `sum_i a_i rows[i] = target`; `None` if `target` is outside the span.
pub fn express<S: Scalar>(rows: &[Vec<S>], target: &[S]) -> Option<Vec<S>> {
    let n = rows.len();
    let d = target.len();
    // Augmented system with one column per row vector.
    let mut m: Vec<Vec<S>> = (0..d)
        .map(|k| {
            let mut r: Vec<S> = rows.iter().map(|v| v[k].clone()).collect();
            r.push(target[k].clone());
            r
        })
        .collect();
    if m.is_empty() {
        return Some(vec![S::zero(); n]);
    }
    let (r, pivots) = rref(std::mem::take(&mut m));
    if pivots.contains(&n) {
        return None;
    }
    let mut a = vec![S::zero(); n];
    for (row, &pc) in r.iter().zip(&pivots) {
        a[pc] = row[n].clone();
    }
    Some(a)
}

/// A subspace of `S^n` in reduced row-echelon form.
#[derive(Clone, Debug, PartialEq)]
pub struct Subspace<S: Scalar = Rational> {
    n: usize,
    rows: Vec<Vec<S>>,
}

impl<S: Scalar> Subspace<S> {
    pub fn span(n: usize, vectors: Vec<Vec<S>>) -> Subspace<S> {
        assert!(vectors.iter().all(|v| v.len() == n), "vector length mismatch");
        let (rows, _) = rref(vectors);
        Subspace { n, rows }
    }

    pub fn zero(n: usize) -> Subspace<S> {
        Subspace { n, rows: Vec::new() }
    }

    pub fn whole(n: usize) -> Subspace<S> {
        Subspace::coordinate(n, &(0..n).collect::<Vec<_>>())
    }

    /// Span of the listed basis vectors (0-based).
    pub fn coordinate(n: usize, idx: &[usize]) -> Subspace<S> {
        Subspace::span(n, idx.iter().map(|&i| unit(n, i)).collect())
    }

    pub fn ambient(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn basis(&self) -> &[Vec<S>] {
        &self.rows
    }

    pub fn contains(&self, v: &[S]) -> bool {
        express(&self.rows, v).is_some()
    }

    pub fn contains_space(&self, other: &Subspace<S>) -> bool {
        other.rows.iter().all(|v| self.contains(v))
    }

    pub fn same(&self, other: &Subspace<S>) -> bool {
        self.n == other.n && self.dim() == other.dim() && self.contains_space(other)
    }

    pub fn sum(&self, other: &Subspace<S>) -> Subspace<S> {
        let mut v = self.rows.clone();
        v.extend(other.rows.iter().cloned());
        Subspace::span(self.n, v)
    }

    pub fn intersection(&self, other: &Subspace<S>) -> Subspace<S> {
        // a.U = b.W  <=>  [U; -W]^T (a, b) = 0
        let k = self.dim();
        let cols = k + other.dim();
        let m: Vec<Vec<S>> = (0..self.n)
            .map(|c| {
                let mut r: Vec<S> = self.rows.iter().map(|v| v[c].clone()).collect();
                r.extend(other.rows.iter().map(|v| -v[c].clone()));
                r
            })
            .collect();
        let vecs = nullspace(&m, cols)
            .into_iter()
            .map(|a| {
                let mut out = vec![S::zero(); self.n];
                for (i, ai) in a[..k].iter().enumerate() {
                    for c in 0..self.n {
                        out[c] = out[c].clone() + ai.clone() * self.rows[i][c].clone();
                    }
                }
                out
            })
            .collect();
        Subspace::span(self.n, vecs)
    }

    /// Indices of the basis vectors spanning the subspace, if it is a coordinate subspace.
    pub fn coordinate_indices(&self) -> Option<Vec<usize>> {
        let mut idx = Vec::new();
        for r in &self.rows {
            let nz: Vec<usize> = (0..self.n).filter(|&c| !r[c].is_zero()).collect();
            if nz.len() != 1 {
                return None;
            }
            idx.push(nz[0]);
        }
        Some(idx)
    }
}

pub fn unit<S: Scalar>(n: usize, i: usize) -> Vec<S> {
    let mut v = vec![S::zero(); n];
    v[i] = S::one();
    v
}
