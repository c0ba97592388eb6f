use std::collections::BTreeMap;

use wavesym::expr::{self, collect, diff, on_shell, substitute, total_derivative, Dir, Node, JET_CAP};
use wavesym::{int, rat, Chart, Expr, Verdict};

fn chart() -> Chart {
    Chart::base()
}

fn p(s: &str) -> Expr {
    chart().parse(s).unwrap_or_else(|e| panic!("{s}: {e}"))
}

fn assert_same(a: &Expr, b: &Expr) {
    let d = a - b;
    assert!(expr::is_zero(&d).is_zero(), "{a}  !=  {b}  (diff {d})");
}

#[test]
fn parse_negative_power() {
    let e = p("u_x^(-4)");
    match e.node() {
        Node::Pow(b, x) => {
            assert_eq!(b.to_string(), "u_x");
            assert_eq!(x.as_num().cloned(), Some(int(-4)));
        }
        other => panic!("unexpected node {other:?}"),
    }
}

#[test]
fn parse_class_rhs() {
    let e = p("f(x,u_x)*u_xx + g(x,u_x)");
    assert_eq!(e, p("f*u_xx + g"));
    assert_eq!(p(&e.to_string()), e);
}

#[test]
fn parse_abs_power() {
    let e = p("abs(u_x)^(2*p)");
    match e.node() {
        Node::AbsPow(b, x) => {
            assert_eq!(b, &p("u_x"));
            assert_eq!(x, &p("2*p"));
        }
        other => panic!("unexpected node {other:?}"),
    }
}

#[test]
fn parse_errors() {
    use expr::ParseErrorKind as K;
    let c = chart();
    assert!(matches!(c.parse("u_x +* 2").unwrap_err().kind, K::Syntax(_)));
    assert!(matches!(c.parse("zz + 1").unwrap_err().kind, K::UnknownIdentifier(_)));
    assert!(matches!(c.parse("f(x)").unwrap_err().kind, K::Arity { .. }));
    assert!(matches!(c.parse("1/(u_x-u_x)").unwrap_err().kind, K::DivisionByZero));
    let err = c.parse("u_x + )").unwrap_err();
    assert_eq!(err.offset, 6);
}

#[test]
fn print_round_trip() {
    for s in [
        "delta*u_x^(-4)*u_xx",
        "exp(2*u_x)*u_xx + nu*x*exp(2*u_x)",
        "abs(u_x)^(2*p)*(delta*u_xx + nu*x^(-1)*u_x)",
        "x - eps*lnabs(u_x)",
        "f_{u_x}*u_tx + f_x",
        "tau_tt + 3/2*xi_x - eta(t,x,u)^2",
        "lnabs(x + 1)*u_x^(1/2)",
    ] {
        let e = p(s);
        assert_eq!(p(&e.to_string()), e, "{s} printed as {e}");
    }
}

#[test]
fn diff_examples() {
    let c = chart();
    let ux = c.symbol("u_x");
    assert_eq!(diff(&p("f(x,u_x)"), &ux), p("f_{u_x}"));
    let d = diff(&p("abs(u_x)^(2*p)"), &ux);
    assert_eq!(d, p("2*p*abs(u_x)^(2*p)*u_x^(-1)"));
    assert_eq!(diff(&p("lnabs(u_x)"), &ux), p("u_x^(-1)"));
    assert!(diff(&p("x^2"), &ux).is_zero());
}

#[test]
fn diff_abs_power_numeric() {
    // d/du (u^2)^p = 2p u (u^2)^(p-1); at p = 2 this is 4u^3.
    let c = chart();
    let ux = c.symbol("u_x");
    let d = diff(&p("abs(u_x)^(2*p)"), &ux);
    for v in [3, -3] {
        let mut vals = BTreeMap::new();
        vals.insert(ux.clone(), int(v));
        vals.insert(c.symbol("p"), int(2));
        assert_eq!(expr::eval(&d, &vals).unwrap(), int(4 * v * v * v));
    }
}

#[test]
fn total_derivative_examples() {
    assert_eq!(total_derivative(&p("u"), Dir::X, JET_CAP).unwrap(), p("u_x"));
    assert_eq!(total_derivative(&p("f(x,u_x)"), Dir::X, JET_CAP).unwrap(), p("f_x + f_{u_x}*u_xx"));
    assert_eq!(total_derivative(&p("u - 2*t*u_t"), Dir::T, JET_CAP).unwrap(), p("-u_t - 2*t*u_tt"));
    let c = Chart::base().with_jet_cap(2);
    let e = c.parse("u_xx").unwrap();
    assert!(total_derivative(&e, Dir::X, 2).is_err());
}

#[test]
fn substitute_examples() {
    let c = chart();
    let rhs = p("f*u_xx + g");
    let mut b = BTreeMap::new();
    b.insert(c.symbol("u_tt"), rhs.clone());
    assert_eq!(substitute(&p("u_tt"), &b), rhs);
    assert_eq!(substitute(&p("x + u_x"), &BTreeMap::new()), p("x + u_x"));
    let r = on_shell(&p("u_ttt"), &rhs, JET_CAP).unwrap();
    assert_eq!(r, p("f_{u_x}*u_tx*u_xx + f*u_txx + g_{u_x}*u_tx"));
}

#[test]
fn normalize_examples() {
    assert_eq!(p("(u_x*u_x)*f"), p("f*u_x^2"));
    assert_eq!(p("delta^2*u_xx"), p("u_xx"));
    assert_eq!(p("eps^2*u_xx"), p("eps*u_xx"));
    assert_eq!(p("exp(2*x)*exp(-2*x)*g"), p("g"));
    assert_eq!(p("abs(u_x)^2"), p("u_x^2"));
    let e = p("(x+1)^2*(x-1) - x^3");
    assert_eq!(expr::normalize(&e), e);
}

#[test]
fn zero_test_examples() {
    assert_eq!(expr::is_zero(&p("0")), Verdict::Zero);
    assert_eq!(expr::is_zero(&p("u_x - u_x")), Verdict::Zero);
    assert!(matches!(expr::is_zero(&p("f_{u_x}")), Verdict::Nonzero { .. }));
    assert!(matches!(expr::is_zero(&p("abs(u_x)^(2*p+1) - abs(u_x)^(2*p)*u_x")), Verdict::Nonzero { .. }));
    assert_eq!(expr::is_zero(&p("x/(x+1) + 1/(x+1) - 1")), Verdict::Zero);
    assert_eq!(expr::is_zero(&p("exp(lnabs(u_x)) - abs(u_x)")), Verdict::Zero);
}

#[test]
fn collect_examples() {
    let mut c = chart();
    let txu = [c.symbol("t"), c.symbol("x"), c.symbol("u")];
    c.add_func("T", &txu);
    c.add_func("X", &txu);
    let ut = c.symbol("u_t");
    let q = |s: &str| c.parse(s).unwrap();
    let e = q("T_u*X_u*u_t^2 + (T_u*X_t + T_t*X_u)*u_t + c0");
    let m = collect(&e, std::slice::from_ref(&ut)).unwrap();
    assert_eq!(m.len(), 3);
    assert_eq!(m[&p("u_t^2")], q("T_u*X_u"));
    assert_eq!(m[&p("u_t")], q("T_u*X_t + T_t*X_u"));
    assert_eq!(m[&Expr::one()], p("c0"));
    let m = collect(&p("5"), std::slice::from_ref(&ut)).unwrap();
    assert_eq!(m[&Expr::one()], int(5).into());
    let m = collect(&p("eta_uu*u_t^2 + 2*eta_tu*u_t"), std::slice::from_ref(&ut)).unwrap();
    assert_eq!(m[&p("u_t^2")], p("eta_uu"));
    assert_eq!(m[&p("u_t")], p("2*eta_tu"));
    assert!(collect(&p("exp(u_t)"), &[ut]).is_err());
}

#[test]
fn rational_helpers() {
    assert_eq!(rat(2, 4), rat(1, 2));
    assert_same(&p("1/2*x + 1/2*x"), &p("x"));
}
