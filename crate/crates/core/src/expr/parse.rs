use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigInt;
use thiserror::Error;

use super::calc::JET_CAP;
use super::node::{self, Expr, FuncApp, Node};
use super::symbol::{Flag, SymKind, Symbol};
use crate::Rational;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ParseErrorKind {
    Syntax(String),
    UnknownIdentifier(String),
    Arity { name: String, expected: usize, found: usize },
    JetOrder(String),
    DivisionByZero,
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
#[error("parse error at byte {offset}: {kind:?}")]
pub struct ParseError {
    pub offset: usize,
    pub kind: ParseErrorKind,
}

/// What an identifier resolves to.
#[derive(Clone, Debug)]
pub enum Entry {
    Sym(Symbol),
    Func(Arc<[Symbol]>),
}

/// Symbol table used by the parser.
#[derive(Clone, Debug)]
pub struct Chart {
    entries: BTreeMap<String, Entry>,
    jet_cap: u8,
}

impl Default for Chart {
    fn default() -> Self {
        Chart::base()
    }
}

impl Chart {
    /// Empty table with the independent variables and jets only.
    pub fn empty() -> Chart {
        let mut c = Chart { entries: BTreeMap::new(), jet_cap: JET_CAP };
        c.add_symbol(Symbol::t());
        c.add_symbol(Symbol::x());
        c.add_symbol(Symbol::u());
        c
    }

    /// The jet-space chart with every parameter and function symbol used by the catalog.
    pub fn base() -> Chart {
        let mut c = Chart::empty();
        for p in ["p", "q", "nu", "d", "b", "k", "p1", "p2", "a1", "a2", "a3", "c0", "c1", "c2", "c3", "c4"] {
            c.add_symbol(Symbol::param(p));
        }
        c.add_symbol(Symbol::sign_param("delta"));
        c.add_symbol(Symbol::idempotent_param("eps"));
        c.add_symbol(Symbol::sign_param("eps2"));
        let x = Symbol::x();
        let ux = Symbol::jet(0, 1);
        let w = Symbol::coord("w");
        let tu = [Symbol::t(), Symbol::x(), Symbol::u()];
        c.add_func("f", &[x.clone(), ux.clone()]);
        c.add_func("g", &[x.clone(), ux]);
        for n in ["phi", "psi", "mu", "theta", "alpha", "beta"] {
            c.add_func(n, std::slice::from_ref(&x));
        }
        c.add_func("F", std::slice::from_ref(&w));
        c.add_func("G", &[w]);
        for n in ["tau", "xi", "eta"] {
            c.add_func(n, &tu);
        }
        c
    }

    /// The chart `(t, x, u, u_x, f, g)` on which equivalence generators live.
    pub fn augmented() -> Chart {
        let mut c = Chart::base();
        c.entries.remove("f");
        c.entries.remove("g");
        c.add_symbol(Symbol::coord("f"));
        c.add_symbol(Symbol::coord("g"));
        c
    }

    pub fn with_jet_cap(mut self, cap: u8) -> Chart {
        self.jet_cap = cap;
        self
    }

    pub fn jet_cap(&self) -> u8 {
        self.jet_cap
    }

    pub fn add_symbol(&mut self, s: Symbol) {
        self.entries.insert(s.name().to_string(), Entry::Sym(s));
    }

    pub fn add_func(&mut self, name: &str, params: &[Symbol]) {
        self.entries.insert(name.to_string(), Entry::Func(params.to_vec().into()));
    }

    pub fn lookup(&self, name: &str) -> Option<Entry> {
        if let Some(e) = self.entries.get(name) {
            return Some(e.clone());
        }
        jet_from_name(name, self.jet_cap).map(Entry::Sym)
    }

    /// Symbol by name; panics on unknown names (for use with fixed catalog names).
    pub fn symbol(&self, name: &str) -> Symbol {
        match self.lookup(name) {
            Some(Entry::Sym(s)) => s,
            _ => panic!("unknown symbol {name}"),
        }
    }

    pub fn var(&self, name: &str) -> Expr {
        Expr::sym(&self.symbol(name))
    }

    pub fn params_of(&self, name: &str) -> Option<Arc<[Symbol]>> {
        match self.entries.get(name) {
            Some(Entry::Func(p)) => Some(p.clone()),
            _ => None,
        }
    }

    /// Function application `name(args)` (undifferentiated).
    pub fn apply(&self, name: &str, args: Vec<Expr>) -> Expr {
        let params = self.params_of(name).unwrap_or_else(|| panic!("unknown function {name}"));
        let n = params.len();
        node::func(FuncApp { name: Arc::from(name), params, args, orders: vec![0; n] })
    }

    /// Function applied to its declared formal arguments.
    pub fn func(&self, name: &str) -> Expr {
        let params = self.params_of(name).unwrap_or_else(|| panic!("unknown function {name}"));
        let args = params.iter().map(Expr::sym).collect();
        self.apply(name, args)
    }

    pub fn parse(&self, text: &str) -> Result<Expr, ParseError> {
        parse(text, self)
    }
}

fn jet_from_name(name: &str, cap: u8) -> Option<Symbol> {
    let rest = name.strip_prefix("u_")?;
    if rest.is_empty() || !rest.chars().all(|c| c == 't' || c == 'x') {
        return None;
    }
    let nt = rest.chars().filter(|&c| c == 't').count();
    let nx = rest.len() - nt;
    if nt + nx > cap as usize {
        return None;
    }
    Some(Symbol::jet(nt as u8, nx as u8))
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(BigInt),
    Ident(String),
    Op(char),
    End,
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn tokens(text: &'a str) -> Result<Vec<(Tok, usize)>, ParseError> {
        let mut lx = Lexer { src: text.as_bytes(), pos: 0 };
        let mut out = Vec::new();
        loop {
            lx.skip_ws();
            let start = lx.pos;
            let Some(&c) = lx.src.get(lx.pos) else {
                out.push((Tok::End, start));
                return Ok(out);
            };
            if c.is_ascii_digit() {
                while lx.pos < lx.src.len() && lx.src[lx.pos].is_ascii_digit() {
                    lx.pos += 1;
                }
                let s = std::str::from_utf8(&lx.src[start..lx.pos]).unwrap();
                out.push((Tok::Num(s.parse().unwrap()), start));
            } else if c.is_ascii_alphabetic() {
                lx.ident()?;
                let s = std::str::from_utf8(&lx.src[start..lx.pos]).unwrap().to_string();
                out.push((Tok::Ident(s), start));
            } else if b"+-*/^(),@".contains(&c) {
                lx.pos += 1;
                out.push((Tok::Op(c as char), start));
            } else {
                return Err(ParseError {
                    offset: start,
                    kind: ParseErrorKind::Syntax(format!("unexpected character {:?}", c as char)),
                });
            }
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn ident(&mut self) -> Result<(), ParseError> {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphanumeric() {
            self.pos += 1;
        }
        while self.pos < self.src.len() && self.src[self.pos] == b'_' {
            self.pos += 1;
            if self.src.get(self.pos) == Some(&b'{') {
                let open = self.pos;
                while self.pos < self.src.len() && self.src[self.pos] != b'}' {
                    self.pos += 1;
                }
                if self.pos == self.src.len() {
                    return Err(ParseError { offset: open, kind: ParseErrorKind::Syntax("unclosed brace".into()) });
                }
                self.pos += 1;
            } else {
                let s = self.pos;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphanumeric() {
                    self.pos += 1;
                }
                if s == self.pos {
                    return Err(ParseError { offset: s, kind: ParseErrorKind::Syntax("empty subscript".into()) });
                }
            }
        }
        Ok(())
    }
}

struct Parser<'c> {
    toks: Vec<(Tok, usize)>,
    i: usize,
    chart: &'c Chart,
}

type PResult = Result<Expr, ParseError>;

impl<'c> Parser<'c> {
    fn peek(&self) -> &Tok {
        &self.toks[self.i].0
    }

    fn offset(&self) -> usize {
        self.toks[self.i].1
    }

    fn err<T>(&self, kind: ParseErrorKind) -> Result<T, ParseError> {
        Err(ParseError { offset: self.offset(), kind })
    }

    fn syntax<T>(&self, msg: &str) -> Result<T, ParseError> {
        self.err(ParseErrorKind::Syntax(msg.to_string()))
    }

    fn eat(&mut self, c: char) -> bool {
        if *self.peek() == Tok::Op(c) {
            self.i += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), ParseError> {
        if self.eat(c) {
            Ok(())
        } else {
            self.syntax(&format!("expected '{c}'"))
        }
    }

    fn expr(&mut self) -> PResult {
        let mut acc = vec![self.term()?];
        loop {
            if self.eat('+') {
                acc.push(self.term()?);
            } else if self.eat('-') {
                acc.push(node::neg(&self.term()?));
            } else {
                return Ok(node::add_all(acc));
            }
        }
    }

    fn term(&mut self) -> PResult {
        let mut acc = self.unary()?;
        loop {
            if self.eat('*') {
                let r = self.unary()?;
                acc = node::mul(&acc, &r);
            } else if *self.peek() == Tok::Op('/') {
                let at = self.offset();
                self.i += 1;
                let r = self.unary()?;
                if r.is_zero() {
                    return Err(ParseError { offset: at, kind: ParseErrorKind::DivisionByZero });
                }
                acc = node::div(&acc, &r);
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> PResult {
        if self.eat('-') {
            return Ok(node::neg(&self.unary()?));
        }
        if self.eat('+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> PResult {
        let base = self.primary()?;
        if *self.peek() == Tok::Op('^') {
            let at = self.offset();
            self.i += 1;
            let e = self.unary()?;
            if base.is_zero() && e.as_num().is_none_or(|c| c <= &Rational::from_integer(0.into())) {
                return Err(ParseError { offset: at, kind: ParseErrorKind::DivisionByZero });
            }
            return Ok(node::pow(&base, &e));
        }
        Ok(base)
    }

    fn args(&mut self) -> Result<Vec<Expr>, ParseError> {
        self.expect('(')?;
        let mut v = vec![self.expr()?];
        while self.eat(',') {
            v.push(self.expr()?);
        }
        self.expect(')')?;
        Ok(v)
    }

    fn single_arg(&mut self, name: &str) -> PResult {
        let at = self.offset();
        let a = self.args()?;
        if a.len() != 1 {
            return Err(ParseError {
                offset: at,
                kind: ParseErrorKind::Arity { name: name.into(), expected: 1, found: a.len() },
            });
        }
        Ok(a.into_iter().next().unwrap())
    }

    fn primary(&mut self) -> PResult {
        let at = self.offset();
        match self.peek().clone() {
            Tok::Num(n) => {
                self.i += 1;
                Ok(Expr::num(Rational::from_integer(n)))
            }
            Tok::Op('(') => {
                self.i += 1;
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Tok::Ident(name) => {
                self.i += 1;
                match name.as_str() {
                    "abs" => Ok(self.single_arg("abs")?.abs()),
                    "exp" => Ok(self.single_arg("exp")?.exp()),
                    "lnabs" => {
                        let a = self.single_arg("lnabs")?;
                        if a.is_zero() {
                            return Err(ParseError { offset: at, kind: ParseErrorKind::DivisionByZero });
                        }
                        Ok(a.lnabs())
                    }
                    "ln" => {
                        let a = self.single_arg("ln")?;
                        match a.node() {
                            Node::AbsPow(b, e) if e.is_one() => Ok(b.lnabs()),
                            Node::Num(c) if c > &Rational::from_integer(0.into()) => Ok(a.lnabs()),
                            _ => Err(ParseError {
                                offset: at,
                                kind: ParseErrorKind::Syntax("ln is only accepted as ln(abs(e))".into()),
                            }),
                        }
                    }
                    _ => self.identifier(&name, at),
                }
            }
            Tok::End => self.syntax("unexpected end of input"),
            Tok::Op(c) => self.syntax(&format!("unexpected '{c}'")),
        }
    }

    fn identifier(&mut self, name: &str, at: usize) -> PResult {
        if let Some(entry) = self.chart.lookup(name) {
            return match entry {
                Entry::Sym(s) => Ok(Expr::sym(&s)),
                Entry::Func(params) => {
                    let n = params.len();
                    self.application(name, params, vec![0; n], at)
                }
            };
        }
        if let Some(rest) = name.strip_prefix("u_") {
            if rest.chars().all(|c| c == 't' || c == 'x') {
                return Err(ParseError { offset: at, kind: ParseErrorKind::JetOrder(name.into()) });
            }
        }
        if let Some((base, suffix)) = name.split_once('_') {
            if let Some(params) = self.chart.params_of(base) {
                let orders = decompose_suffix(suffix, &params).ok_or(ParseError {
                    offset: at,
                    kind: ParseErrorKind::UnknownIdentifier(name.into()),
                })?;
                return self.application(base, params, orders, at);
            }
        }
        Err(ParseError { offset: at, kind: ParseErrorKind::UnknownIdentifier(name.into()) })
    }

    fn application(&mut self, name: &str, params: Arc<[Symbol]>, orders: Vec<u8>, at: usize) -> PResult {
        let args = if *self.peek() == Tok::Op('(') {
            let a = self.args()?;
            if a.len() != params.len() {
                return Err(ParseError {
                    offset: at,
                    kind: ParseErrorKind::Arity { name: name.into(), expected: params.len(), found: a.len() },
                });
            }
            a
        } else {
            params.iter().map(Expr::sym).collect()
        };
        Ok(node::func(FuncApp { name: Arc::from(name), params, args, orders }))
    }
}

/// Split a derivative subscript into per-argument orders: `{x,u_x}`, `xux`, `ux`, `tt`.
fn decompose_suffix(suffix: &str, params: &[Symbol]) -> Option<Vec<u8>> {
    let mut orders = vec![0u8; params.len()];
    if let Some(inner) = suffix.strip_prefix('{').and_then(|s| s.strip_suffix('}')) {
        for part in inner.split(',') {
            let part = part.trim();
            let i = params
                .iter()
                .position(|p| p.name() == part || p.name().replace('_', "") == part)?;
            orders[i] += 1;
        }
        return Some(orders);
    }
    let compact: Vec<String> = params.iter().map(|p| p.name().replace('_', "")).collect();
    fn go(s: &str, compact: &[String], orders: &mut Vec<u8>) -> bool {
        if s.is_empty() {
            return true;
        }
        let mut idx: Vec<usize> = (0..compact.len()).collect();
        idx.sort_by_key(|&i| std::cmp::Reverse(compact[i].len()));
        for i in idx {
            if let Some(rest) = s.strip_prefix(compact[i].as_str()) {
                orders[i] += 1;
                if go(rest, compact, orders) {
                    return true;
                }
                orders[i] -= 1;
            }
        }
        false
    }
    if go(suffix, &compact, &mut orders) {
        Some(orders)
    } else {
        None
    }
}

/// Parse an expression against a chart.
pub fn parse(text: &str, chart: &Chart) -> Result<Expr, ParseError> {
    let toks = Lexer::tokens(text)?;
    let mut p = Parser { toks, i: 0, chart };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return p.syntax("trailing input");
    }
    Ok(e)
}

/// Parse the textual vector-field syntax `2*t@t + u@u` into (coefficient, coordinate) pairs.
/// Coefficients are read at product level; sums must be parenthesized.
pub fn parse_field_terms(text: &str, chart: &Chart) -> Result<Vec<(Expr, Symbol)>, ParseError> {
    let toks = Lexer::tokens(text)?;
    let mut p = Parser { toks, i: 0, chart };
    if let Tok::Num(n) = p.peek().clone() {
        if n == BigInt::from(0) && p.toks[p.i + 1].0 == Tok::End {
            return Ok(vec![]);
        }
    }
    let mut out = Vec::new();
    let mut first = true;
    loop {
        let sign = if p.eat('-') {
            -1
        } else if p.eat('+') || first {
            1
        } else if *p.peek() == Tok::End {
            break;
        } else {
            return p.syntax("expected '+', '-' or end of field");
        };
        first = false;
        let c = p.term()?;
        p.expect('@')?;
        let at = p.offset();
        let coord = match p.peek().clone() {
            Tok::Ident(n) => {
                p.i += 1;
                match chart.lookup(&n) {
                    Some(Entry::Sym(s)) if s.kind() != SymKind::Parameter => s,
                    _ => return Err(ParseError { offset: at, kind: ParseErrorKind::UnknownIdentifier(n) }),
                }
            }
            _ => return p.syntax("expected coordinate after '@'"),
        };
        let c = if sign < 0 { node::neg(&c) } else { c };
        out.push((c, coord));
    }
    Ok(out)
}

impl Symbol {
    /// Positive-flagged copy, used for new coordinates such as `x = e^X`.
    pub fn positive(&self) -> Symbol {
        self.with_flag(Flag::Positive)
    }
}
