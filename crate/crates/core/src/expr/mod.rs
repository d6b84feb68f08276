//! Radical expressions: the input language of the pipeline.
//!
//! Expressions are built from rational constants and variables with `+`,
//! `-`, `*`, `/`, rational powers and integer roots. [`normalize`] removes
//! `Pow` nodes so that every later stage only sees `Root`.

mod interval;
mod parse;

pub use interval::{eval_at_bits, eval_numeric, eval_poly_interval, Interval, NumericValue};
pub use parse::{parse, parse_poly, Parser};

use std::collections::BTreeSet;
use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::poly::{fmt_rational, MultiPoly, Rational, Registry, VarId};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RadicalExpr {
    Const(Rational),
    Var(VarId),
    Add(Box<RadicalExpr>, Box<RadicalExpr>),
    Sub(Box<RadicalExpr>, Box<RadicalExpr>),
    Mul(Box<RadicalExpr>, Box<RadicalExpr>),
    Div(Box<RadicalExpr>, Box<RadicalExpr>),
    Pow(Box<RadicalExpr>, Rational),
    /// Real `r`-th root; odd roots of negative radicands are real.
    Root(u32, Box<RadicalExpr>),
}

use RadicalExpr::*;

impl RadicalExpr {
    pub fn constant(c: Rational) -> Self {
        Const(c)
    }

    pub fn int(n: i64) -> Self {
        Const(crate::poly::rat(n))
    }

    pub fn var(v: VarId) -> Self {
        Var(v)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn add(a: RadicalExpr, b: RadicalExpr) -> Self {
        Add(Box::new(a), Box::new(b))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn sub(a: RadicalExpr, b: RadicalExpr) -> Self {
        Sub(Box::new(a), Box::new(b))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn mul(a: RadicalExpr, b: RadicalExpr) -> Self {
        Mul(Box::new(a), Box::new(b))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn div(a: RadicalExpr, b: RadicalExpr) -> Self {
        Div(Box::new(a), Box::new(b))
    }

    pub fn pow(a: RadicalExpr, e: Rational) -> Self {
        Pow(Box::new(a), e)
    }

    pub fn root(r: u32, a: RadicalExpr) -> Self {
        Root(r, Box::new(a))
    }

    pub fn sqrt(a: RadicalExpr) -> Self {
        Root(2, Box::new(a))
    }

    /// Variables occurring anywhere in the tree.
    pub fn vars(&self) -> BTreeSet<VarId> {
        let mut out = BTreeSet::new();
        self.visit(&mut |e| {
            if let Var(v) = e {
                out.insert(*v);
            }
        });
        out
    }

    /// Pre-order traversal.
    pub fn visit<F: FnMut(&RadicalExpr)>(&self, f: &mut F) {
        f(self);
        match self {
            Const(_) | Var(_) => {}
            Add(a, b) | Sub(a, b) | Mul(a, b) | Div(a, b) => {
                a.visit(f);
                b.visit(f);
            }
            Pow(a, _) | Root(_, a) => a.visit(f),
        }
    }

    pub fn contains_root(&self) -> bool {
        let mut found = false;
        self.visit(&mut |e| found |= matches!(e, Root(..) | Pow(..)));
        found
    }

    /// Product of all root indices, counted per occurrence.
    pub fn root_index_product(&self) -> u64 {
        let mut prod = 1u64;
        self.visit(&mut |e| {
            if let Root(r, _) = e {
                prod = prod.saturating_mul(*r as u64);
            }
        });
        prod
    }

    /// Replace every subtree structurally equal to `target` by `with`.
    pub fn replace(&self, target: &RadicalExpr, with: &RadicalExpr) -> RadicalExpr {
        if self == target {
            return with.clone();
        }
        let r = |e: &RadicalExpr| Box::new(e.replace(target, with));
        match self {
            Const(_) | Var(_) => self.clone(),
            Add(a, b) => Add(r(a), r(b)),
            Sub(a, b) => Sub(r(a), r(b)),
            Mul(a, b) => Mul(r(a), r(b)),
            Div(a, b) => Div(r(a), r(b)),
            Pow(a, e) => Pow(r(a), e.clone()),
            Root(k, a) => Root(*k, r(a)),
        }
    }

    /// Render in the input grammar; `parse(print(e)) == e`.
    pub fn display<'a>(&'a self, reg: &'a Registry) -> ExprDisplay<'a> {
        ExprDisplay { expr: self, reg }
    }

    pub fn to_text(&self, reg: &Registry) -> String {
        self.display(reg).to_string()
    }
}

/// Rewrite rational powers into roots and products, order commutative
/// children canonically. Idempotent.
pub fn normalize(e: &RadicalExpr) -> Result<RadicalExpr> {
    Ok(match e {
        Const(_) | Var(_) => e.clone(),
        Add(a, b) => {
            let (a, b) = ordered(normalize(a)?, normalize(b)?);
            RadicalExpr::add(a, b)
        }
        Mul(a, b) => {
            let (a, b) = ordered(normalize(a)?, normalize(b)?);
            RadicalExpr::mul(a, b)
        }
        Sub(a, b) => RadicalExpr::sub(normalize(a)?, normalize(b)?),
        Div(a, b) => RadicalExpr::div(normalize(a)?, normalize(b)?),
        Root(1, a) => normalize(a)?,
        Root(0, _) => return Err(Error::Structural("root index must be positive".into())),
        Root(r, a) => RadicalExpr::root(*r, normalize(a)?),
        Pow(base, exp) => {
            let g = normalize(base)?;
            normalize_pow(g, exp)?
        }
    })
}

fn ordered(a: RadicalExpr, b: RadicalExpr) -> (RadicalExpr, RadicalExpr) {
    if b < a {
        (b, a)
    } else {
        (a, b)
    }
}

fn int_power(g: &RadicalExpr, n: u32) -> RadicalExpr {
    let mut acc = g.clone();
    for _ in 1..n {
        let (a, b) = ordered(acc, g.clone());
        acc = RadicalExpr::mul(a, b);
    }
    acc
}

fn normalize_pow(g: RadicalExpr, exp: &Rational) -> Result<RadicalExpr> {
    if exp.is_zero() {
        if g == Const(Rational::zero()) {
            return Err(Error::Structural("0^0 is undefined".into()));
        }
        return Ok(Const(Rational::one()));
    }
    if exp.is_negative() {
        let inner = normalize_pow(g, &-exp)?;
        return Ok(RadicalExpr::div(Const(Rational::one()), inner));
    }
    let num: u32 = exp
        .numer()
        .try_into()
        .map_err(|_| Error::Structural("exponent numerator too large".into()))?;
    let den: u32 = exp
        .denom()
        .try_into()
        .map_err(|_| Error::Structural("exponent denominator too large".into()))?;
    let powered = int_power(&g, num);
    Ok(if den == 1 {
        powered
    } else {
        RadicalExpr::root(den, powered)
    })
}

/// Structurally distinct `Root` subtrees, nested ones included.
pub fn distinct_radicals(e: &RadicalExpr) -> BTreeSet<RadicalExpr> {
    let mut out = BTreeSet::new();
    e.visit(&mut |n| {
        if matches!(n, Root(..)) {
            out.insert(n.clone());
        }
    });
    out
}

/// The expanded polynomial if `e` has no roots and divides only by nonzero
/// constants.
pub fn is_polynomial(e: &RadicalExpr) -> Option<MultiPoly> {
    Some(match e {
        Const(c) => MultiPoly::constant(c.clone()),
        Var(v) => MultiPoly::var(*v),
        Add(a, b) => &is_polynomial(a)? + &is_polynomial(b)?,
        Sub(a, b) => &is_polynomial(a)? - &is_polynomial(b)?,
        Mul(a, b) => &is_polynomial(a)? * &is_polynomial(b)?,
        Div(a, b) => {
            let d = is_polynomial(b)?.constant_value()?;
            if d.is_zero() {
                return None;
            }
            is_polynomial(a)?.scale(&d.recip())
        }
        Pow(a, k) if k.is_integer() && !k.is_negative() => {
            let k: u32 = k.numer().try_into().ok()?;
            is_polynomial(a)?.pow(k)
        }
        Pow(..) | Root(..) => return None,
    })
}

/// Rebuild a polynomial as an expression tree (sum of products).
pub fn from_poly(p: &MultiPoly) -> RadicalExpr {
    let mut acc: Option<RadicalExpr> = None;
    for (m, c) in p.terms().rev() {
        let mut t: Option<RadicalExpr> = if m.is_one() || !c.is_one() {
            Some(Const(c.clone()))
        } else {
            None
        };
        for &(v, e) in m.pairs() {
            let f = if e == 1 {
                Var(v)
            } else {
                RadicalExpr::pow(Var(v), crate::poly::rat(e as i64))
            };
            t = Some(match t {
                None => f,
                Some(t) => RadicalExpr::mul(t, f),
            });
        }
        let t = t.unwrap();
        acc = Some(match acc {
            None => t,
            Some(a) => RadicalExpr::add(a, t),
        });
    }
    acc.unwrap_or(Const(Rational::zero()))
}

pub struct ExprDisplay<'a> {
    expr: &'a RadicalExpr,
    reg: &'a Registry,
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Prec {
    Sum = 1,
    Product = 2,
    Unary = 3,
    Power = 4,
}

fn prec_of(e: &RadicalExpr) -> Prec {
    match e {
        Add(..) | Sub(..) => Prec::Sum,
        Mul(..) | Div(..) => Prec::Product,
        Const(c) if c.is_negative() => Prec::Unary,
        Const(c) if !c.is_integer() => Prec::Product,
        Pow(..) => Prec::Power,
        _ => Prec::Power,
    }
}

impl ExprDisplay<'_> {
    fn write(&self, e: &RadicalExpr, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sub = |x: &RadicalExpr, min: Prec, f: &mut fmt::Formatter<'_>| -> fmt::Result {
            if prec_of(x) < min {
                f.write_str("(")?;
                self.write(x, f)?;
                f.write_str(")")
            } else {
                self.write(x, f)
            }
        };
        match e {
            Const(c) => f.write_str(&fmt_rational(c)),
            Var(v) => f.write_str(self.reg.name(*v)),
            Add(a, b) => {
                sub(a, Prec::Sum, f)?;
                f.write_str(" + ")?;
                sub(b, Prec::Product, f)
            }
            Sub(a, b) => {
                sub(a, Prec::Sum, f)?;
                f.write_str(" - ")?;
                sub(b, Prec::Product, f)
            }
            Mul(a, b) => {
                sub(a, Prec::Product, f)?;
                f.write_str("*")?;
                sub(b, Prec::Power, f)
            }
            Div(a, b) => {
                match (&**a, &**b) {
                    // `3/4` would read back as a single constant
                    (Const(p), Const(q)) if p.is_integer() && q.is_integer() => {
                        write!(f, "({})", fmt_rational(p))?
                    }
                    _ => sub(a, Prec::Product, f)?,
                }
                f.write_str("/")?;
                sub(b, Prec::Power, f)
            }
            Pow(a, k) => {
                if matches!(&**a, Pow(..)) {
                    f.write_str("(")?;
                    self.write(a, f)?;
                    f.write_str(")")?;
                } else {
                    sub(a, Prec::Power, f)?;
                }
                if k.is_integer() && !k.is_negative() {
                    write!(f, "^{}", k.numer())
                } else {
                    write!(f, "^({})", fmt_rational(k))
                }
            }
            Root(2, a) => {
                f.write_str("sqrt(")?;
                self.write(a, f)?;
                f.write_str(")")
            }
            Root(r, a) => {
                write!(f, "root({r}, ")?;
                self.write(a, f)?;
                f.write_str(")")
            }
        }
    }
}

impl fmt::Display for ExprDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write(self.expr, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::ratio;

    fn p(s: &str, reg: &mut Registry) -> RadicalExpr {
        parse(s, reg).unwrap()
    }

    #[test]
    fn normalize_rational_exponents() {
        let mut reg = Registry::new();
        let x = Var(reg.var("x"));
        let e = normalize(&p("x^(2/3)", &mut reg)).unwrap();
        assert_eq!(e, RadicalExpr::root(3, RadicalExpr::mul(x.clone(), x.clone())));
        let e = normalize(&p("x^(-1/2)", &mut reg)).unwrap();
        assert_eq!(e, RadicalExpr::div(RadicalExpr::int(1), RadicalExpr::sqrt(x.clone())));
        let e = normalize(&p("x^(4/2)", &mut reg)).unwrap();
        assert_eq!(e, RadicalExpr::mul(x.clone(), x.clone()));
        assert_eq!(normalize(&p("root(1, x)", &mut reg)).unwrap(), x);
        assert!(normalize(&p("0^0", &mut reg)).is_err());
        assert_eq!(normalize(&p("x^0", &mut reg)).unwrap(), RadicalExpr::int(1));
    }

    #[test]
    fn normalize_is_idempotent_and_orders_children() {
        let mut reg = Registry::new();
        let a = normalize(&p("sqrt(y + x) * 3", &mut reg)).unwrap();
        let b = normalize(&p("3 * sqrt(x + y)", &mut reg)).unwrap();
        assert_eq!(a, b);
        assert_eq!(normalize(&a).unwrap(), a);
    }

    #[test]
    fn radical_sets() {
        let mut reg = Registry::new();
        let e = normalize(&p("sqrt(x) + sqrt(y)", &mut reg)).unwrap();
        assert_eq!(distinct_radicals(&e).len(), 2);
        let e = normalize(&p("sqrt(x^2 + sqrt(y^2 + 1))", &mut reg)).unwrap();
        assert_eq!(distinct_radicals(&e).len(), 2);
        let e = normalize(&p("sqrt(x) * sqrt(x) + x^2", &mut reg)).unwrap();
        assert_eq!(distinct_radicals(&e).len(), 1);
        let e = normalize(&p("x*y - 3", &mut reg)).unwrap();
        assert!(distinct_radicals(&e).is_empty());
    }

    #[test]
    fn polynomial_detection() {
        let mut reg = Registry::new();
        let e = normalize(&p("3*x^2*y - 1/2", &mut reg)).unwrap();
        let poly = is_polynomial(&e).unwrap();
        assert_eq!(poly.to_text(&reg), "3*x^2*y - 1/2");
        assert!(is_polynomial(&normalize(&p("sqrt(x)", &mut reg)).unwrap()).is_none());
        assert!(is_polynomial(&normalize(&p("x/y", &mut reg)).unwrap()).is_none());
        let half = is_polynomial(&normalize(&p("x/2", &mut reg)).unwrap()).unwrap();
        assert_eq!(half, MultiPoly::var(reg.lookup("x").unwrap()).scale(&ratio(1, 2)));
    }

    #[test]
    fn print_parse_roundtrip() {
        let mut reg = Registry::new();
        for s in [
            "sqrt(x)",
            "x^(1/2) + x^(1/3)",
            "x^(1/2) - x^(1/3)",
            "sqrt(x^2 + sqrt(y^2 + 1))",
            "sqrt(1 + x^2) + x/y",
            "-x^2 + 1/2*y",
            "root(3, x - 2) / (x*y)",
            "x^(-1/2) * (y - (x - 1))",
            "2 - (3 - x) - -4",
            "(1/2)^3 * x / (2/3)",
            "(3)/4*x - (-3)/4",
            "(x^(1/2))^3 + x^-2",
            "x/2/3 + 2/3^2",
        ] {
            let e = p(s, &mut reg);
            let printed = e.to_text(&reg);
            assert_eq!(p(&printed, &mut reg), e, "{s} printed as {printed}");
        }
    }

    #[test]
    fn poly_to_expr_roundtrip() {
        let mut reg = Registry::new();
        let e = normalize(&p("(x - 2*y)^3 - 1/3", &mut reg)).unwrap();
        let poly = is_polynomial(&e).unwrap();
        let back = is_polynomial(&normalize(&from_poly(&poly)).unwrap()).unwrap();
        assert_eq!(back, poly);
    }
}
