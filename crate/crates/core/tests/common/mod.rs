#![allow(dead_code)]

pub mod props;

use std::collections::{BTreeMap, BTreeSet};

use algprog::defpoly::{defining_polynomial, DefiningPolynomial, ReduceConfig};
use algprog::expr::{is_polynomial, normalize, parse, parse_poly, RadicalExpr};
use algprog::isolation::{GridConfig, Relation, SignCondition, Strategy};
use algprog::poly::{parse_rational, MultiPoly, Point, Rational, Registry, VarId};
use num_traits::Zero;
use rand::Rng;

pub struct Setup {
    pub reg: Registry,
    pub f: RadicalExpr,
    pub dp: DefiningPolynomial,
}

/// Parse and normalize `src` over `vars`, register `z`, and build the
/// defining polynomial with default settings.
pub fn setup(src: &str, vars: &[&str]) -> Setup {
    let mut reg = Registry::with_vars(vars);
    let f = normalize(&parse(src, &mut reg).unwrap()).unwrap();
    let z = reg.var("z");
    let dp = defining_polynomial(&f, z, &mut reg, &ReduceConfig::default()).unwrap();
    Setup { reg, f, dp }
}

pub fn poly(text: &str, reg: &mut Registry) -> MultiPoly {
    parse_poly(text, reg).unwrap()
}

fn coefficient(p: &MultiPoly, m: &algprog::poly::Monomial) -> Rational {
    p.terms()
        .find(|(n, _)| *n == m)
        .map(|(_, c)| c.clone())
        .unwrap_or_else(Rational::zero)
}

/// `p = c·q` for some nonzero rational `c`.
pub fn proportional(p: &MultiPoly, q: &MultiPoly) -> bool {
    if p.is_zero() || q.is_zero() {
        return p.is_zero() && q.is_zero();
    }
    let (m, cp) = p.terms().next().unwrap();
    let cq = coefficient(q, m);
    !cq.is_zero() && p.scale(&cq) == q.scale(cp)
}

/// `lhs rel rhs` as a canonical sign condition.
pub fn condition(text: &str, reg: &mut Registry) -> SignCondition {
    for (tok, rel) in [
        (">=", Relation::Ge),
        ("<=", Relation::Le),
        ("!=", Relation::Ne),
        ("=", Relation::Eq),
        (">", Relation::Gt),
        ("<", Relation::Lt),
    ] {
        if let Some((l, r)) = text.split_once(tok) {
            let p = &poly(l, reg) - &poly(r, reg);
            return SignCondition::new(p, rel).canonical();
        }
    }
    panic!("no relation in {text}");
}

pub fn conditions(texts: &[&str], reg: &mut Registry) -> BTreeSet<SignCondition> {
    texts.iter().map(|t| condition(t, reg)).collect()
}

pub fn canonical_set(conds: &[SignCondition]) -> BTreeSet<SignCondition> {
    conds.iter().map(SignCondition::canonical).collect()
}

pub fn point(reg: &Registry, coords: &[(&str, &str)]) -> Point {
    coords
        .iter()
        .map(|(v, q)| (reg.lookup(v).unwrap(), parse_rational(q).unwrap()))
        .collect()
}

/// Expressions with a known-good component strategy.
pub struct CorpusItem {
    pub src: &'static str,
    pub vars: &'static [&'static str],
    pub strategy: fn(&mut Registry) -> Strategy,
}

fn univariate(_: &mut Registry) -> Strategy {
    Strategy::Univariate
}

fn grid_box(reg: &mut Registry, lo: &str, hi: &str) -> Strategy {
    let bounds = ["x", "y"]
        .iter()
        .map(|v| (reg.var(v), parse_rational(lo).unwrap(), parse_rational(hi).unwrap()))
        .collect();
    Strategy::Grid(GridConfig { bounds, resolution: 16 })
}

fn positive_quadrant(reg: &mut Registry) -> Strategy {
    grid_box(reg, "1/4", "4")
}

fn centered_box(reg: &mut Registry) -> Strategy {
    grid_box(reg, "-2", "2")
}

fn goldstein_domain(reg: &mut Registry) -> Strategy {
    Strategy::Domain {
        constraints: vec![condition("x - 1 >= 0", reg), condition("y - 1 >= 0", reg)],
        point: point(reg, &[("x", "2"), ("y", "3")]),
    }
}

fn origin_domain(reg: &mut Registry) -> Strategy {
    Strategy::Domain {
        constraints: vec![],
        point: point(reg, &[("x", "0"), ("y", "0")]),
    }
}

pub fn corpus() -> Vec<CorpusItem> {
    vec![
        CorpusItem { src: "sqrt(x)", vars: &["x"], strategy: univariate },
        CorpusItem { src: "x^(1/2) + x^(1/3)", vars: &["x"], strategy: univariate },
        CorpusItem { src: "x^(1/2) - x^(1/3)", vars: &["x"], strategy: univariate },
        CorpusItem { src: "sqrt(1 + x^2)", vars: &["x"], strategy: univariate },
        CorpusItem { src: "sqrt(sqrt(x) + 1)", vars: &["x"], strategy: univariate },
        CorpusItem { src: "x^(2/3)", vars: &["x"], strategy: univariate },
        CorpusItem { src: "1/sqrt(x)", vars: &["x"], strategy: univariate },
        CorpusItem { src: "sqrt(x^2)", vars: &["x"], strategy: univariate },
        CorpusItem { src: "sqrt(1 + x^2) + x/y", vars: &["x", "y"], strategy: centered_box },
        CorpusItem { src: "sqrt(x) + sqrt(y)", vars: &["x", "y"], strategy: positive_quadrant },
        CorpusItem { src: "sqrt(x) - sqrt(y)", vars: &["x", "y"], strategy: positive_quadrant },
        CorpusItem { src: "sqrt(x - 1) + sqrt(y - 1)", vars: &["x", "y"], strategy: goldstein_domain },
        CorpusItem { src: "sqrt(x^2 + sqrt(y^2 + 1))", vars: &["x", "y"], strategy: origin_domain },
    ]
}

const LEAVES: &[&str] = &["x", "y", "x + 1", "y - 2", "x*y + 1", "x^2 + y", "2*x - y", "3", "1/2"];

/// Text of a random radical expression in `x, y` whose operator tree has
/// depth at most `depth`; roots have index 2 or 3.
pub fn random_expr<R: Rng>(rng: &mut R, depth: u32) -> String {
    if depth == 0 || rng.gen_bool(0.25) {
        return LEAVES[rng.gen_range(0..LEAVES.len())].to_string();
    }
    let a = random_expr(rng, depth - 1);
    match rng.gen_range(0..6) {
        0 => format!("({a}) + ({})", random_expr(rng, depth - 1)),
        1 => format!("({a}) - ({})", random_expr(rng, depth - 1)),
        2 => format!("({a})*({})", random_expr(rng, depth - 1)),
        3 => format!("({a})/({})", random_expr(rng, depth - 1)),
        4 => format!("sqrt({a})"),
        _ => format!("({a})^(1/3)"),
    }
}

/// Degree bounds of the recursive defining polynomial, computed directly
/// from the tree: `(z-degree, per-variable degrees)`.
pub fn degree_oracle(e: &RadicalExpr) -> (u64, BTreeMap<VarId, u64>) {
    if let Some(p) = is_polynomial(e) {
        return (1, p.vars().into_iter().map(|v| (v, p.deg(v) as u64)).collect());
    }
    match e {
        RadicalExpr::Add(f, g) | RadicalExpr::Sub(f, g) | RadicalExpr::Mul(f, g) | RadicalExpr::Div(f, g) => {
            let (pz, px) = degree_oracle(f);
            let (qz, qx) = degree_oracle(g);
            let vars: BTreeSet<VarId> = px.keys().chain(qx.keys()).copied().collect();
            let get = |m: &BTreeMap<VarId, u64>, v| m.get(&v).copied().unwrap_or(0);
            let x = vars.into_iter().map(|v| (v, get(&px, v) * qz + pz * get(&qx, v))).collect();
            (pz * qz, x)
        }
        RadicalExpr::Root(r, f) => {
            let (pz, px) = degree_oracle(f);
            (*r as u64 * pz, px)
        }
        other => panic!("unexpected node after normalization: {other:?}"),
    }
}
