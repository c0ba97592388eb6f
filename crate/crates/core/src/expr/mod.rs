//! Exact symbolic expressions over jet variables, parameters and arbitrary
//! function symbols.
//!
//! Every [`Expr`] is built through canonicalizing constructors, so structural
//! equality of two expressions implies semantic equality. The converse does not
//! hold in general; [`is_zero`] backs the structural test with exact sampling.

mod calc;
mod collect;
mod node;
mod parse;
mod print;
mod sample;
mod symbol;

pub use calc::{
    diff, on_shell, subst_func, substitute, symbols, total_derivative, CalcError, Dir, JET_CAP,
};
pub use collect::{clear_denominators, collect, contains, monomial_coefficients, CollectError};
pub use node::{
    abspow, add, add_all, div, exp, func, lnabs, mul, mul_all, neg, normalize, pow, pow_rational,
    powi, rebuild, sub, Expr, FuncApp, Node,
};
pub use parse::{parse, parse_field_terms, Chart, Entry, ParseError, ParseErrorKind};
pub use sample::{
    default_config, eval, is_zero, is_zero_with, set_default_config, EvalError, SampleConfig, Verdict,
};
pub use symbol::{jet_name, Flag, SymKind, Symbol};
