//! Interval evaluation with exact rational endpoints.

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint, Sign};
use num_traits::{One, Signed, Zero};

use super::{normalize, RadicalExpr};
use crate::error::{Error, Result};
use crate::poly::{pow2_neg, MultiPoly, Point, Rational, VarId};

/// Closed interval `[lo, hi]`; `lo == hi` means the value is known exactly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Interval {
    pub lo: Rational,
    pub hi: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NumericValue {
    Real(Interval),
    NotReal,
}

impl NumericValue {
    pub fn real(&self) -> Option<&Interval> {
        match self {
            NumericValue::Real(i) => Some(i),
            NumericValue::NotReal => None,
        }
    }

    pub fn is_real(&self) -> bool {
        matches!(self, NumericValue::Real(_))
    }
}

impl Interval {
    pub fn new(lo: Rational, hi: Rational) -> Self {
        debug_assert!(lo <= hi);
        Interval { lo, hi }
    }

    pub fn point(c: Rational) -> Self {
        Interval {
            lo: c.clone(),
            hi: c,
        }
    }

    pub fn is_exact(&self) -> bool {
        self.lo == self.hi
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn mid(&self) -> Rational {
        (&self.lo + &self.hi) / Rational::from_integer(2.into())
    }

    pub fn contains(&self, c: &Rational) -> bool {
        &self.lo <= c && c <= &self.hi
    }

    pub fn contains_zero(&self) -> bool {
        !self.lo.is_positive() && !self.hi.is_negative()
    }

    pub fn overlaps(&self, other: &Interval) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    /// Sign if determined: `Some(0)` only for the exact zero.
    pub fn sign(&self) -> Option<i8> {
        if self.lo.is_positive() {
            Some(1)
        } else if self.hi.is_negative() {
            Some(-1)
        } else if self.lo.is_zero() && self.hi.is_zero() {
            Some(0)
        } else {
            None
        }
    }

    pub fn add(&self, o: &Interval) -> Interval {
        Interval::new(&self.lo + &o.lo, &self.hi + &o.hi)
    }

    pub fn sub(&self, o: &Interval) -> Interval {
        Interval::new(&self.lo - &o.hi, &self.hi - &o.lo)
    }

    pub fn neg(&self) -> Interval {
        Interval::new(-&self.hi, -&self.lo)
    }

    pub fn mul(&self, o: &Interval) -> Interval {
        if self.is_exact() && o.is_exact() {
            return Interval::point(&self.lo * &o.lo);
        }
        let c = [&self.lo * &o.lo, &self.lo * &o.hi, &self.hi * &o.lo, &self.hi * &o.hi];
        let lo = c.iter().min().unwrap().clone();
        let hi = c.iter().max().unwrap().clone();
        Interval::new(lo, hi)
    }

    /// `None` when the divisor contains zero.
    pub fn div(&self, o: &Interval) -> Option<Interval> {
        if o.contains_zero() {
            return None;
        }
        let inv = Interval::new(o.hi.recip(), o.lo.recip());
        Some(self.mul(&inv))
    }

    pub fn pow(&self, k: u32) -> Interval {
        if k == 0 {
            return Interval::point(Rational::one());
        }
        let a = num_traits::pow(self.lo.clone(), k as usize);
        let b = num_traits::pow(self.hi.clone(), k as usize);
        if k % 2 == 1 || !self.lo.is_negative() {
            Interval::new(a, b)
        } else if !self.hi.is_positive() {
            Interval::new(b, a)
        } else {
            Interval::new(Rational::zero(), a.max(b))
        }
    }

    pub fn hull(&self, o: &Interval) -> Interval {
        Interval::new(
            self.lo.clone().min(o.lo.clone()),
            self.hi.clone().max(o.hi.clone()),
        )
    }

    // Widen inexact intervals to multiples of 2^-bits so endpoints stay small.
    fn rounded(self, bits: u64) -> Interval {
        if self.is_exact() || (self.lo.denom().bits() <= bits && self.hi.denom().bits() <= bits) {
            return self;
        }
        let scale = BigInt::one() << bits;
        let down = |q: &Rational| (q * &scale).floor() / Rational::from_integer(scale.clone());
        let up = |q: &Rational| (q * &scale).ceil() / Rational::from_integer(scale.clone());
        Interval::new(down(&self.lo), up(&self.hi))
    }
}

/// Enclosure of a polynomial over a box of intervals.
pub fn eval_poly_interval(p: &MultiPoly, env: &BTreeMap<VarId, Interval>) -> Result<Interval> {
    let mut acc = Interval::point(Rational::zero());
    for (m, c) in p.terms() {
        let mut t = Interval::point(c.clone());
        for &(v, e) in m.pairs() {
            let x = env
                .get(&v)
                .ok_or_else(|| Error::Structural(format!("no value for variable {v}")))?;
            t = t.mul(&x.pow(e));
        }
        acc = acc.add(&t);
    }
    Ok(acc)
}

/// Exact `r`-th root of a nonnegative rational if it is a perfect power.
fn exact_root(q: &Rational, r: u32) -> Option<Rational> {
    let n = q.numer().magnitude();
    let d = q.denom().magnitude();
    let rn = n.nth_root(r);
    let rd = d.nth_root(r);
    (rn.pow(r) == *n && rd.pow(r) == *d).then(|| {
        Rational::new(BigInt::from_biguint(Sign::Plus, rn), BigInt::from_biguint(Sign::Plus, rd))
    })
}

// Enclosure of the r-th root of q >= 0 with width <= 2^-bits.
fn root_bounds(q: &Rational, r: u32, bits: u64) -> Interval {
    if let Some(x) = exact_root(q, r) {
        return Interval::point(x);
    }
    let shifted: BigUint = (q.numer().magnitude() << (bits * r as u64)) / q.denom().magnitude();
    let k = shifted.nth_root(r);
    let den = BigInt::one() << bits;
    let k = BigInt::from_biguint(Sign::Plus, k);
    Interval::new(
        Rational::new(k.clone(), den.clone()),
        Rational::new(k + 1, den),
    )
}

// Odd roots are odd functions; even roots need a nonnegative radicand.
fn signed_root(q: &Rational, r: u32, bits: u64, upper: bool) -> Rational {
    let b = root_bounds(&q.abs(), r, bits);
    match (q.is_negative(), upper) {
        (false, false) => b.lo,
        (false, true) => b.hi,
        (true, false) => -b.hi,
        (true, true) => -b.lo,
    }
}

enum Step {
    Val(Interval),
    NotReal,
    // An even root or divisor straddles zero: retry with more bits.
    Undecided,
}

fn eval_at(e: &RadicalExpr, point: &Point, bits: u64) -> Result<Step> {
    use RadicalExpr::*;
    macro_rules! val {
        ($x:expr) => {
            match eval_at($x, point, bits)? {
                Step::Val(i) => i,
                other => return Ok(other),
            }
        };
    }
    let out = match e {
        Const(c) => Interval::point(c.clone()),
        Var(v) => Interval::point(
            point
                .get(v)
                .cloned()
                .ok_or_else(|| Error::Structural(format!("no value for variable {v}")))?,
        ),
        Add(a, b) => val!(a).add(&val!(b)),
        Sub(a, b) => val!(a).sub(&val!(b)),
        Mul(a, b) => val!(a).mul(&val!(b)),
        Div(a, b) => {
            let n = val!(a);
            let d = val!(b);
            if d.sign() == Some(0) {
                return Err(Error::Domain("division by zero".into()));
            }
            match n.div(&d) {
                Some(q) => q,
                None => return Ok(Step::Undecided),
            }
        }
        Pow(..) => return eval_at(&normalize(e)?, point, bits),
        Root(r, g) => {
            let x = val!(g);
            let r = *r;
            if r % 2 == 0 {
                if x.hi.is_negative() {
                    return Ok(Step::NotReal);
                }
                if x.lo.is_negative() {
                    return Ok(if x.is_exact() { Step::NotReal } else { Step::Undecided });
                }
            }
            Interval::new(
                signed_root(&x.lo, r, bits, false),
                signed_root(&x.hi, r, bits, true),
            )
        }
    };
    Ok(Step::Val(out.rounded(bits + 8)))
}

const MAX_ROUNDS: u32 = 7;

/// Evaluate `e` at a rational point. Real results have width at most
/// `2^-precision` and contain the true value; exact values are returned as
/// degenerate intervals.
pub fn eval_numeric(e: &RadicalExpr, point: &Point, precision: u32) -> Result<NumericValue> {
    let target = pow2_neg(precision);
    let mut bits = precision as u64 + 16;
    for _ in 0..MAX_ROUNDS {
        match eval_at(e, point, bits)? {
            Step::NotReal => return Ok(NumericValue::NotReal),
            Step::Val(i) if i.width() <= target => return Ok(NumericValue::Real(i)),
            _ => bits *= 2,
        }
    }
    Err(Error::Precision(format!(
        "could not resolve value to {precision} bits (a radicand or divisor may be exactly zero)"
    )))
}

/// Evaluate with a fixed working precision, without the width target.
/// `Ok(None)` means a sign decision inside the tree needs more bits.
pub fn eval_at_bits(e: &RadicalExpr, point: &Point, bits: u64) -> Result<Option<NumericValue>> {
    Ok(match eval_at(e, point, bits)? {
        Step::Val(i) => Some(NumericValue::Real(i)),
        Step::NotReal => Some(NumericValue::NotReal),
        Step::Undecided => None,
    })
}
