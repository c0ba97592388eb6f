use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::{Arc, RwLock};

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::collect::clear_denominators;
use super::node::{pow_rational, Expr, Node};
use super::symbol::{Flag, SymKind, Symbol};
use crate::Rational;

/// Outcome of a zero test.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    Zero,
    Nonzero { point: Vec<(String, String)>, value: String },
    Undecided { samples: usize, log: Vec<String> },
}

impl Verdict {
    pub fn is_zero(&self) -> bool {
        matches!(self, Verdict::Zero)
    }

    pub fn is_undecided(&self) -> bool {
        matches!(self, Verdict::Undecided { .. })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SampleConfig {
    pub seed: u64,
    pub samples: usize,
    pub retries: usize,
    /// Bound on numerators and denominators of generic sample values.
    pub range: i64,
}

impl Default for SampleConfig {
    fn default() -> Self {
        SampleConfig { seed: 0x5eed, samples: 32, retries: 24, range: 1000 }
    }
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum EvalError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("value is not rational")]
    Inexact,
    #[error("logarithm of zero")]
    LogZero,
    #[error("unassigned symbol {0}")]
    Unassigned(String),
}

/// Multiplier of the exponential model `E(v) = B^(EXP_SCALE * v)`.
const EXP_SCALE: i64 = 12;
/// Largest integer the logarithm model factors completely.
const FACTOR_LIMIT: u64 = 1 << 40;

/// Exact evaluator. `exp` and `ln|.|` are replaced by a compatible pair of
/// group homomorphisms so every value stays rational: `E(v) = B^(12 v)` and
/// `L(r) = sum_p w_p ord_p(r)` with `w_B = 1/12`, hence `L(E(v)) = v`.
/// Function symbols take random values memoized by name, derivative orders and argument values.
pub struct Evaluator {
    values: BTreeMap<Symbol, Rational>,
    funcs: HashMap<(Arc<str>, Vec<u8>, Vec<Rational>), Rational>,
    weights: HashMap<u64, Rational>,
    base: u64,
    rng: ChaCha8Rng,
    range: i64,
}

impl Evaluator {
    pub fn new(values: BTreeMap<Symbol, Rational>, seed: u64) -> Evaluator {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let base = [2u64, 3, 5, 7][rng.gen_range(0..4)];
        let mut weights = HashMap::new();
        weights.insert(base, Rational::new(BigInt::one(), BigInt::from(EXP_SCALE)));
        Evaluator { values, funcs: HashMap::new(), weights, base, rng, range: 1000 }
    }

    fn random_value(&mut self) -> Rational {
        loop {
            let n = self.rng.gen_range(-self.range..=self.range);
            let d = self.rng.gen_range(1..=self.range);
            if n != 0 {
                return Rational::new(n.into(), d.into());
            }
        }
    }

    fn weight(&mut self, p: u64) -> Rational {
        if let Some(w) = self.weights.get(&p) {
            return w.clone();
        }
        let w = Rational::new(self.rng.gen_range(-40i64..=40).into(), BigInt::from(7));
        self.weights.insert(p, w.clone());
        w
    }

    fn log_int(&mut self, n: &BigInt) -> Result<Rational, EvalError> {
        let mut n = n.abs().to_u64().filter(|&v| v <= FACTOR_LIMIT).ok_or(EvalError::Inexact)?;
        let mut acc = Rational::zero();
        let mut p = 2u64;
        while p * p <= n {
            while n % p == 0 {
                n /= p;
                acc += self.weight(p);
            }
            p += if p == 2 { 1 } else { 2 };
        }
        if n > 1 {
            acc += self.weight(n);
        }
        Ok(acc)
    }

    fn log(&mut self, r: &Rational) -> Result<Rational, EvalError> {
        if r.is_zero() {
            return Err(EvalError::LogZero);
        }
        Ok(self.log_int(r.numer())? - self.log_int(r.denom())?)
    }

    pub fn eval(&mut self, e: &Expr) -> Result<Rational, EvalError> {
        match e.node() {
            Node::Num(c) => Ok(c.clone()),
            Node::Sym(s) => self.values.get(s).cloned().ok_or_else(|| EvalError::Unassigned(s.name().to_string())),
            Node::Func(a) => {
                let mut args = Vec::with_capacity(a.args.len());
                for x in &a.args {
                    args.push(self.eval(x)?);
                }
                let key = (a.name.clone(), a.orders.clone(), args);
                if let Some(v) = self.funcs.get(&key) {
                    return Ok(v.clone());
                }
                let v = self.random_value();
                self.funcs.insert(key, v.clone());
                Ok(v)
            }
            Node::LnAbs(a) => {
                let v = self.eval(a)?;
                self.log(&v)
            }
            Node::Exp(a) => {
                let v = self.eval(a)? * Rational::from_integer(EXP_SCALE.into());
                if !v.is_integer() {
                    return Err(EvalError::Inexact);
                }
                let n = v.to_integer().to_i64().filter(|n| n.abs() <= 4096).ok_or(EvalError::Inexact)?;
                let b = Rational::from_integer(BigInt::from(self.base));
                let b = if n < 0 { b.recip() } else { b };
                Ok(num_traits::pow::pow(b, n.unsigned_abs() as usize))
            }
            Node::Pow(b, x) => {
                let bv = self.eval(b)?;
                let xv = self.eval(x)?;
                power(&bv, &xv)
            }
            Node::AbsPow(b, x) => {
                let bv = self.eval(b)?.abs();
                let xv = self.eval(x)?;
                power(&bv, &xv)
            }
            Node::Mul(c, fs) => {
                let mut acc = c.clone();
                for f in fs {
                    acc *= self.eval(f)?;
                }
                Ok(acc)
            }
            Node::Add(c, ts) => {
                let mut acc = c.clone();
                for (m, k) in ts {
                    acc += self.eval(m)? * k;
                }
                Ok(acc)
            }
        }
    }
}

fn power(b: &Rational, x: &Rational) -> Result<Rational, EvalError> {
    if b.is_zero() && !x.is_positive() {
        return Err(EvalError::DivisionByZero);
    }
    if x.is_integer() && x.abs() > Rational::from_integer(4096.into()) {
        return Err(EvalError::Inexact);
    }
    pow_rational(b, x).ok_or(EvalError::Inexact)
}

/// Evaluate with explicit symbol values; function symbols get seeded random values.
pub fn eval(e: &Expr, values: &BTreeMap<Symbol, Rational>) -> Result<Rational, EvalError> {
    Evaluator::new(values.clone(), 0).eval(e)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Role {
    Generic,
    /// Needs an exact square so that fractional powers stay rational.
    Square,
    SignedSquare,
    InExp,
}

fn roles(e: &Expr) -> BTreeMap<Symbol, BTreeSet<Role>> {
    let mut out: BTreeMap<Symbol, BTreeSet<Role>> = BTreeMap::new();
    fn walk(e: &Expr, ctx: Option<Role>, out: &mut BTreeMap<Symbol, BTreeSet<Role>>) {
        match e.node() {
            Node::Num(_) => {}
            Node::Sym(s) => {
                out.entry(s.clone()).or_default().insert(ctx.unwrap_or(Role::Generic));
            }
            Node::Func(a) => a.args.iter().for_each(|x| walk(x, None, out)),
            Node::LnAbs(a) => walk(a, None, out),
            Node::Exp(a) => walk(a, Some(Role::InExp), out),
            Node::Pow(b, x) => {
                let frac = !x.as_num().is_some_and(|c| c.is_integer());
                walk(b, if frac { Some(Role::Square) } else { ctx.filter(|r| *r == Role::InExp) }, out);
                walk(x, ctx.filter(|r| *r == Role::InExp), out)
            }
            Node::AbsPow(b, x) => {
                let frac = !x.as_num().is_some_and(|c| c.is_integer());
                walk(b, if frac { Some(Role::SignedSquare) } else { None }, out);
                walk(x, ctx.filter(|r| *r == Role::InExp), out)
            }
            Node::Mul(_, fs) => fs.iter().for_each(|x| walk(x, ctx, out)),
            Node::Add(_, ts) => ts.iter().for_each(|(m, _)| walk(m, ctx, out)),
        }
    }
    walk(e, None, &mut out);
    out
}

fn assign(rng: &mut ChaCha8Rng, s: &Symbol, roles: &BTreeSet<Role>, range: i64) -> Rational {
    let r = |n: i64, d: i64| Rational::new(n.into(), d.into());
    match s.flag() {
        Flag::Sign => return r(if rng.gen_bool(0.5) { 1 } else { -1 }, 1),
        Flag::Idempotent => return r(rng.gen_range(0..=1), 1),
        _ => {}
    }
    let nonzero = |rng: &mut ChaCha8Rng, lo: i64, hi: i64| loop {
        let k = rng.gen_range(lo..=hi);
        if k != 0 {
            return k;
        }
    };
    let positive = s.flag() == Flag::Positive;
    if roles.contains(&Role::Square) || roles.contains(&Role::SignedSquare) {
        let in_exp = roles.contains(&Role::InExp);
        let (n, d) = if in_exp { (rng.gen_range(1..=3), 1) } else { (rng.gen_range(1..=30), rng.gen_range(1..=30)) };
        let sq = r(n * n, d * d);
        let neg = roles.contains(&Role::SignedSquare) && !roles.contains(&Role::Square) && !positive && rng.gen_bool(0.5);
        return if neg { -sq } else { sq };
    }
    if roles.contains(&Role::InExp) {
        let k = if positive { rng.gen_range(1..=12) } else { nonzero(rng, -12, 12) };
        return r(k, 6);
    }
    if s.kind() == SymKind::Parameter {
        let k = if positive { rng.gen_range(1..=8) } else { nonzero(rng, -8, 8) };
        return r(k, 2);
    }
    let n = if positive { rng.gen_range(1..=range) } else { nonzero(rng, -range, range) };
    r(n, rng.gen_range(1..=range))
}

static DEFAULT_CONFIG: RwLock<Option<SampleConfig>> = RwLock::new(None);

/// Replace the process-wide configuration used by [`is_zero`].
pub fn set_default_config(cfg: SampleConfig) {
    *DEFAULT_CONFIG.write().unwrap_or_else(|e| e.into_inner()) = Some(cfg);
}

/// The configuration used by [`is_zero`].
pub fn default_config() -> SampleConfig {
    DEFAULT_CONFIG.read().unwrap_or_else(|e| e.into_inner()).clone().unwrap_or_default()
}

/// Zero test with the process-wide sampling configuration.
pub fn is_zero(e: &Expr) -> Verdict {
    is_zero_with(e, &default_config())
}

/// Structural zero first; otherwise exact evaluation at random points.
/// A nonzero sample proves nonvanishing; all-zero samples are reported as undecided.
pub fn is_zero_with(e: &Expr, cfg: &SampleConfig) -> Verdict {
    if e.is_zero() || clear_denominators(e).is_zero() {
        return Verdict::Zero;
    }
    let roles = roles(e);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut log = Vec::new();
    let mut ok = 0usize;
    for i in 0..cfg.samples {
        let mut done = false;
        for _ in 0..cfg.retries {
            let values: BTreeMap<Symbol, Rational> =
                roles.iter().map(|(s, r)| (s.clone(), assign(&mut rng, s, r, cfg.range))).collect();
            let mut ev = Evaluator::new(values.clone(), rng.gen());
            ev.range = cfg.range;
            match ev.eval(e) {
                Ok(v) if v.is_zero() => {
                    ok += 1;
                    done = true;
                    break;
                }
                Ok(v) => {
                    return Verdict::Nonzero {
                        point: values.iter().map(|(s, v)| (s.name().to_string(), v.to_string())).collect(),
                        value: v.to_string(),
                    }
                }
                Err(_) => continue,
            }
        }
        if !done {
            log.push(format!("sample {i}: no admissible point within {} retries", cfg.retries));
        }
    }
    log.push(format!("{ok} of {} samples evaluated to zero", cfg.samples));
    Verdict::Undecided { samples: ok, log }
}
