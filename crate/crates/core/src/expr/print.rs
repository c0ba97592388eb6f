use std::fmt::{self, Write};

use num_traits::{One, Signed};

use super::node::{Expr, FuncApp, Node};
use crate::Rational;

/// Name of a formal partial derivative, e.g. `f_x`, `f_{x,u_x}`, `tau_tt`.
pub(crate) fn partial_name(app: &FuncApp) -> String {
    let mut parts: Vec<&str> = Vec::new();
    for (p, &k) in app.params.iter().zip(app.orders.iter()) {
        for _ in 0..k {
            parts.push(p.name());
        }
    }
    if parts.is_empty() {
        return app.name.to_string();
    }
    if parts.iter().any(|p| p.contains('_')) {
        format!("{}_{{{}}}", app.name, parts.join(","))
    } else {
        format!("{}_{}", app.name, parts.concat())
    }
}

fn write_rational(f: &mut fmt::Formatter<'_>, c: &Rational) -> fmt::Result {
    if c.is_integer() {
        write!(f, "{}", c.numer())
    } else {
        write!(f, "{}/{}", c.numer(), c.denom())
    }
}

/// Expressions that print as a single token or a call and need no parentheses
/// as a power base.
fn is_atomic(e: &Expr) -> bool {
    match e.node() {
        Node::Num(c) => c.is_integer() && !c.is_negative(),
        Node::Sym(_) | Node::Func(_) | Node::LnAbs(_) | Node::Exp(_) => true,
        Node::AbsPow(_, x) => x.is_one(),
        _ => false,
    }
}

fn write_factor(f: &mut fmt::Formatter<'_>, e: &Expr) -> fmt::Result {
    match e.node() {
        Node::Add(..) => write!(f, "({})", e),
        Node::Num(c) if !c.is_integer() || c.is_negative() => write!(f, "({})", e),
        _ => write!(f, "{}", e),
    }
}

fn write_base(f: &mut fmt::Formatter<'_>, e: &Expr) -> fmt::Result {
    if is_atomic(e) {
        write!(f, "{}", e)
    } else {
        write!(f, "({})", e)
    }
}

fn write_exponent(f: &mut fmt::Formatter<'_>, e: &Expr) -> fmt::Result {
    match e.node() {
        Node::Num(c) if c.is_integer() && !c.is_negative() => write!(f, "^{}", c.numer()),
        Node::Sym(s) => write!(f, "^{}", s),
        _ => write!(f, "^({})", e),
    }
}

/// Print a monomial with coefficient `k`, the sign handled by the caller when `skip_sign`.
fn write_term(f: &mut fmt::Formatter<'_>, k: &Rational, m: &Expr, skip_sign: bool) -> fmt::Result {
    let k = if skip_sign { k.abs() } else { k.clone() };
    if m.is_one() {
        return write_rational(f, &k);
    }
    if k.is_one() {
    } else if (-k.clone()).is_one() {
        f.write_char('-')?;
    } else {
        write_rational(f, &k)?;
        f.write_char('*')?;
    }
    let fs = m.factors();
    for (i, x) in fs.iter().enumerate() {
        if i > 0 {
            f.write_char('*')?;
        }
        write_factor(f, x)?;
    }
    Ok(())
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.node() {
            Node::Num(c) => write_rational(f, c),
            Node::Sym(s) => write!(f, "{}", s),
            Node::Func(app) => {
                let is_partial = app.orders.iter().any(|&k| k > 0);
                if is_partial {
                    f.write_str(&partial_name(app))?;
                    if app.is_default_args() {
                        return Ok(());
                    }
                } else {
                    f.write_str(&app.name)?;
                }
                f.write_char('(')?;
                for (i, a) in app.args.iter().enumerate() {
                    if i > 0 {
                        f.write_char(',')?;
                    }
                    write!(f, "{}", a)?;
                }
                f.write_char(')')
            }
            Node::LnAbs(a) => write!(f, "lnabs({})", a),
            Node::Exp(a) => write!(f, "exp({})", a),
            Node::Pow(b, e) => {
                write_base(f, b)?;
                write_exponent(f, e)
            }
            Node::AbsPow(b, e) => {
                write!(f, "abs({})", b)?;
                if e.is_one() {
                    Ok(())
                } else {
                    write_exponent(f, e)
                }
            }
            Node::Mul(c, _) => {
                let (_, m) = self.coef_mono();
                write_term(f, c, &m, false)
            }
            Node::Add(..) => {
                for (i, (m, k)) in self.terms().iter().enumerate() {
                    if i == 0 {
                        write_term(f, k, m, false)?;
                    } else {
                        f.write_str(if k.is_negative() { " - " } else { " + " })?;
                        write_term(f, k, m, true)?;
                    }
                }
                Ok(())
            }
        }
    }
}
