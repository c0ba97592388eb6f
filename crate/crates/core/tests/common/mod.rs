#![allow(dead_code)]

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use wavesym::expr::{self, Symbol};
use wavesym::vecfield::{generators as gen, AugTransform, EquivParams, Space};
use wavesym::{rat, Chart, Expr, VectorField};

pub fn coef(rng: &mut ChaCha8Rng) -> Expr {
    let mut n = rng.gen_range(-6i64..=6);
    if n == 0 {
        n = 1;
    }
    Expr::num(rat(n, rng.gen_range(1..=4)))
}

pub fn nonzero(rng: &mut ChaCha8Rng) -> Expr {
    coef(rng)
}

/// Polynomial in `vars` with up to `terms` monomials of total degree at most `deg`.
pub fn poly(rng: &mut ChaCha8Rng, vars: &[Symbol], deg: u32, terms: usize) -> Expr {
    let mut out = Expr::zero();
    for _ in 0..rng.gen_range(1..=terms) {
        let mut m = coef(rng);
        let mut left = rng.gen_range(0..=deg);
        while left > 0 && !vars.is_empty() {
            let v = &vars[rng.gen_range(0..vars.len())];
            m = m * Expr::sym(v);
            left -= 1;
        }
        out = out + m;
    }
    out
}

pub fn txu() -> Vec<Symbol> {
    vec![Symbol::t(), Symbol::x(), Symbol::u()]
}

pub fn tx() -> Vec<Symbol> {
    vec![Symbol::t(), Symbol::x()]
}

pub fn base_field(rng: &mut ChaCha8Rng) -> VectorField {
    let v = txu();
    VectorField::base(poly(rng, &v, 2, 3), poly(rng, &v, 2, 3), poly(rng, &v, 2, 3)).unwrap()
}

/// Base field with `tau_u = xi_u = 0`.
pub fn fiber_field(rng: &mut ChaCha8Rng) -> VectorField {
    let (a, b) = (tx(), txu());
    VectorField::base(poly(rng, &a, 2, 2), poly(rng, &a, 2, 2), poly(rng, &b, 2, 3)).unwrap()
}

/// Random element of the equivalence algebra with polynomial `phi`, `psi`.
pub fn algebra_element(rng: &mut ChaCha8Rng) -> VectorField {
    let x = [Symbol::x()];
    let parts = [
        gen::du(),
        gen::dt(),
        gen::pt(),
        gen::d(&poly(rng, &x, 2, 2)),
        gen::g(&poly(rng, &x, 3, 2)),
        gen::f1(),
        gen::f2(),
    ];
    let mut v = VectorField::zero(Space::Augmented);
    for p in parts {
        if rng.gen_bool(0.6) {
            v = v.add(&p.scale(&coef(rng))).unwrap();
        }
    }
    v
}

/// Random equivalence transformation with affine `phi`.
pub fn equiv_params(rng: &mut ChaCha8Rng) -> EquivParams {
    let x = Expr::sym(&Symbol::x());
    let (a, b) = (nonzero(rng), coef(rng));
    EquivParams {
        c0: coef(rng),
        c1: nonzero(rng),
        c2: nonzero(rng),
        c3: coef(rng),
        c4: coef(rng),
        phi: &a * &x + &b,
        psi: poly(rng, &[Symbol::x()], 3, 2),
        phi_inv: Some((&x - &b) / &a),
        inverse_funcs: Vec::new(),
    }
}

pub fn aug(p: &EquivParams) -> AugTransform {
    AugTransform::from_params(p).unwrap()
}

fn jet_atoms() -> Vec<Expr> {
    let mut v: Vec<Expr> = txu().iter().map(Expr::sym).collect();
    for (a, b) in [(1, 0), (0, 1), (2, 0), (1, 1), (0, 2)] {
        v.push(Expr::sym(&Symbol::jet(a, b)));
    }
    v
}

/// Random expression on the second-order jet space, possibly with `f(x,u_x)`.
pub fn jet_expr(rng: &mut ChaCha8Rng) -> Expr {
    let atoms = jet_atoms();
    let f = Chart::base().func("f");
    let mut out = Expr::zero();
    for _ in 0..rng.gen_range(1..=3) {
        let mut m = coef(rng);
        for _ in 0..rng.gen_range(1..=3) {
            let a = atoms[rng.gen_range(0..atoms.len())].clone();
            m = m * match rng.gen_range(0..5) {
                0 => a.exp(),
                1 => f.clone(),
                2 => a.powi(2),
                _ => a,
            };
        }
        out = out + m;
    }
    out
}

/// Random expression tree in `t, x, u, u_x` with transcendental nodes.
pub fn tree(rng: &mut ChaCha8Rng, depth: u32) -> Expr {
    let atoms = [Symbol::t(), Symbol::x(), Symbol::u(), Symbol::jet(0, 1)];
    if depth == 0 || rng.gen_bool(0.3) {
        return if rng.gen_bool(0.7) { Expr::sym(&atoms[rng.gen_range(0..atoms.len())]) } else { coef(rng) };
    }
    let a = tree(rng, depth - 1);
    match rng.gen_range(0..6) {
        0 | 1 => a + tree(rng, depth - 1),
        2 | 3 => a * tree(rng, depth - 1),
        4 => a.exp(),
        _ if a.is_num() => a,
        _ => a.powi(rng.gen_range(-2..=3)),
    }
}

/// Random `(f, g)` with rational coefficients in `(x, u_x)`.
pub fn class_sample(rng: &mut ChaCha8Rng) -> (Expr, Expr) {
    let v = [Symbol::x(), Symbol::jet(0, 1)];
    let ux = Expr::sym(&Symbol::jet(0, 1));
    let f = poly(rng, &v, 2, 3) * ux.exp() + Expr::int(rng.gen_range(1..=3));
    let g = poly(rng, &v, 3, 3);
    (f, g)
}

pub fn vanishes(e: &Expr) -> bool {
    expr::is_zero(e).is_zero()
}

pub fn same_field(a: &VectorField, b: &VectorField) -> bool {
    a.equivalent(b).is_zero()
}

pub fn jacobi(a: &VectorField, b: &VectorField, c: &VectorField) -> VectorField {
    let ab_c = a.bracket(b).unwrap().bracket(c).unwrap();
    let bc_a = b.bracket(c).unwrap().bracket(a).unwrap();
    let ca_b = c.bracket(a).unwrap().bracket(b).unwrap();
    ab_c.add(&bc_a).unwrap().add(&ca_b).unwrap()
}

pub fn prolongation_defect(q1: &VectorField, q2: &VectorField) -> VectorField {
    let lhs = wavesym::vecfield::prolong2(&q1.bracket(q2).unwrap()).unwrap().to_field();
    let p1 = wavesym::vecfield::prolong2(q1).unwrap().to_field();
    let p2 = wavesym::vecfield::prolong2(q2).unwrap().to_field();
    lhs.sub(&p1.bracket(&p2).unwrap()).unwrap()
}

/// `pushforward(b o a)` against `pushforward(b) o pushforward(a)`.
pub fn functoriality_holds(a: &EquivParams, b: &EquivParams, v: &VectorField) -> bool {
    use wavesym::vecfield::{compose, pushforward};
    let direct = pushforward(&aug(&compose(b, a)), v).unwrap();
    let stepwise = pushforward(&aug(b), &pushforward(&aug(a), v).unwrap()).unwrap();
    same_field(&direct, &stepwise)
}

pub fn dtdx_defect(e: &Expr) -> Expr {
    use wavesym::expr::{total_derivative as d, Dir};
    let tx = d(&d(e, Dir::X, 4).unwrap(), Dir::T, 4).unwrap();
    let xt = d(&d(e, Dir::T, 4).unwrap(), Dir::X, 4).unwrap();
    tx - xt
}
