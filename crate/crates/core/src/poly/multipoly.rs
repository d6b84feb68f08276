use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::{fmt_rational, Monomial, Point, Rational, Registry, VarId};
use crate::error::{Error, Result};

/// Sparse multivariate polynomial with exact rational coefficients.
///
/// Canonical: no zero coefficients are stored, so two polynomials are equal
/// iff their term maps are equal.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct MultiPoly {
    terms: BTreeMap<Monomial, Rational>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
}

/// Ring operation dispatch used by the CLI and tests.
pub fn poly_arith(op: ArithOp, p: &MultiPoly, q: &MultiPoly) -> MultiPoly {
    match op {
        ArithOp::Add => p + q,
        ArithOp::Sub => p - q,
        ArithOp::Mul => p * q,
    }
}

impl MultiPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Self::term(c, Monomial::one())
    }

    pub fn int(n: i64) -> Self {
        Self::constant(super::rat(n))
    }

    pub fn var(v: VarId) -> Self {
        Self::term(Rational::one(), Monomial::var(v, 1))
    }

    pub fn var_pow(v: VarId, e: u32) -> Self {
        Self::term(Rational::one(), Monomial::var(v, e))
    }

    pub fn term(c: Rational, m: Monomial) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        MultiPoly { terms }
    }

    pub fn from_terms<I: IntoIterator<Item = (Monomial, Rational)>>(it: I) -> Self {
        let mut p = MultiPoly::zero();
        for (m, c) in it {
            p.add_term(m, c);
        }
        p
    }

    fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.constant_value().is_some_and(|c| c.is_one())
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(Monomial::is_one)
    }

    /// The value of a constant polynomial.
    pub fn constant_value(&self) -> Option<Rational> {
        if self.is_zero() {
            return Some(Rational::zero());
        }
        if self.terms.len() == 1 {
            if let Some(c) = self.terms.get(&Monomial::one()) {
                return Some(c.clone());
            }
        }
        None
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in ascending graded-lex order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    /// Degree in `v`; the zero polynomial reports -1.
    pub fn degree_in(&self, v: VarId) -> i64 {
        if self.is_zero() {
            return -1;
        }
        self.terms
            .keys()
            .map(|m| m.exponent(v) as i64)
            .max()
            .unwrap_or(0)
    }

    /// Degree in `v` for a polynomial known to be nonzero.
    pub fn deg(&self, v: VarId) -> u32 {
        self.degree_in(v).max(0) as u32
    }

    pub fn total_degree(&self) -> i64 {
        if self.is_zero() {
            return -1;
        }
        self.terms
            .keys()
            .map(|m| m.total_degree() as i64)
            .max()
            .unwrap_or(0)
    }

    pub fn vars(&self) -> BTreeSet<VarId> {
        self.terms
            .keys()
            .flat_map(|m| m.pairs().iter().map(|p| p.0))
            .collect()
    }

    pub fn contains_var(&self, v: VarId) -> bool {
        self.terms.keys().any(|m| m.exponent(v) > 0)
    }

    pub fn scale(&self, c: &Rational) -> MultiPoly {
        if c.is_zero() {
            return MultiPoly::zero();
        }
        MultiPoly {
            terms: self
                .terms
                .iter()
                .map(|(m, a)| (m.clone(), a * c))
                .collect(),
        }
    }

    pub fn mul_monomial(&self, c: &Rational, mono: &Monomial) -> MultiPoly {
        if c.is_zero() {
            return MultiPoly::zero();
        }
        MultiPoly {
            terms: self
                .terms
                .iter()
                .map(|(m, a)| (m.mul(mono), a * c))
                .collect(),
        }
    }

    pub fn pow(&self, k: u32) -> MultiPoly {
        let mut result = MultiPoly::one();
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                result = &result * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        result
    }

    /// Formal partial derivative with respect to `v`.
    pub fn derivative(&self, v: VarId) -> MultiPoly {
        let mut out = MultiPoly::zero();
        for (m, c) in &self.terms {
            let (e, rest) = m.split_off(v);
            if e == 0 {
                continue;
            }
            let mono = rest.mul(&Monomial::var(v, e - 1));
            out.add_term(mono, c * Rational::from_integer(BigInt::from(e)));
        }
        out
    }

    /// Exact value at `point`, which must assign every occurring variable.
    pub fn eval(&self, point: &Point) -> Result<Rational> {
        let mut acc = Rational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for &(v, e) in m.pairs() {
                let x = point.get(&v).ok_or_else(|| {
                    Error::Structural(format!("no value assigned to variable {v}"))
                })?;
                t *= num_traits::pow(x.clone(), e as usize);
            }
            acc += t;
        }
        Ok(acc)
    }

    /// Substitute the values in `point` for their variables, keeping the rest symbolic.
    pub fn partial_eval(&self, point: &Point) -> MultiPoly {
        let mut out = MultiPoly::zero();
        for (m, c) in &self.terms {
            let mut coeff = c.clone();
            let mut rest = Vec::new();
            for &(v, e) in m.pairs() {
                match point.get(&v) {
                    Some(x) => coeff *= num_traits::pow(x.clone(), e as usize),
                    None => rest.push((v, e)),
                }
            }
            out.add_term(Monomial::from_pairs(rest), coeff);
        }
        out
    }

    /// Replace every occurrence of `v` by `s`.
    pub fn substitute(&self, v: VarId, s: &MultiPoly) -> MultiPoly {
        if !self.contains_var(v) {
            return self.clone();
        }
        let mut powers: Vec<MultiPoly> = vec![MultiPoly::one()];
        let mut out = MultiPoly::zero();
        for (m, c) in &self.terms {
            let (e, rest) = m.split_off(v);
            while powers.len() <= e as usize {
                let next = powers.last().unwrap() * s;
                powers.push(next);
            }
            out = out + powers[e as usize].mul_monomial(c, &rest);
        }
        out
    }

    /// `t^d * p(v / t)`, cleared of denominators.
    pub fn homogenize_in_quotient(&self, v: VarId, t: VarId, d: u32) -> Result<MultiPoly> {
        if self.contains_var(t) {
            return Err(Error::Structural(
                "homogenizing variable already occurs in the polynomial".into(),
            ));
        }
        let mut out = MultiPoly::zero();
        for (m, c) in &self.terms {
            let e = m.exponent(v);
            if e > d {
                return Err(Error::Structural(format!(
                    "homogenization degree {d} is below the degree {e} in the main variable"
                )));
            }
            out.add_term(m.mul(&Monomial::var(t, d - e)), c.clone());
        }
        Ok(out)
    }

    /// Coefficients as a univariate polynomial in `v`; index = exponent.
    pub fn coeffs_in(&self, v: VarId) -> Vec<MultiPoly> {
        let d = self.degree_in(v);
        if d < 0 {
            return Vec::new();
        }
        let mut out = vec![MultiPoly::zero(); d as usize + 1];
        for (m, c) in &self.terms {
            let (e, rest) = m.split_off(v);
            out[e as usize].add_term(rest, c.clone());
        }
        out
    }

    pub fn from_coeffs_in(v: VarId, coeffs: &[MultiPoly]) -> MultiPoly {
        let mut out = MultiPoly::zero();
        for (e, c) in coeffs.iter().enumerate() {
            for (m, a) in &c.terms {
                out.add_term(m.mul(&Monomial::var(v, e as u32)), a.clone());
            }
        }
        out
    }

    pub fn leading_coeff_in(&self, v: VarId) -> MultiPoly {
        let d = self.degree_in(v);
        if d < 0 {
            return MultiPoly::zero();
        }
        let mut out = MultiPoly::zero();
        for (m, c) in &self.terms {
            let (e, rest) = m.split_off(v);
            if e as i64 == d {
                out.add_term(rest, c.clone());
            }
        }
        out
    }

    /// Leading (largest) term in graded-lex order.
    pub fn leading_term(&self) -> Option<(&Monomial, &Rational)> {
        self.terms.iter().next_back()
    }

    /// Exact quotient `self / d`, or `None` if `d` does not divide `self`.
    pub fn div_exact(&self, d: &MultiPoly) -> Option<MultiPoly> {
        let (lm_d, lc_d) = d.leading_term()?;
        if let Some(c) = d.constant_value() {
            return Some(self.scale(&c.recip()));
        }
        let mut rem = self.clone();
        let mut quot = MultiPoly::zero();
        while let Some((lm_r, lc_r)) = rem.leading_term() {
            let mono = lm_r.div(lm_d)?;
            let coef = lc_r / lc_d;
            rem = &rem - &d.mul_monomial(&coef, &mono);
            quot.add_term(mono, coef);
        }
        Some(quot)
    }

    /// Scale to primitive integer coefficients with a positive leading
    /// coefficient; "leading" is lex order with `main` most significant.
    /// Returns the polynomial and the factor it was multiplied by.
    pub fn normalize_with_factor(&self, main: Option<VarId>) -> (MultiPoly, Rational) {
        if self.is_zero() {
            return (MultiPoly::zero(), Rational::one());
        }
        let mut den_lcm = BigInt::one();
        for c in self.terms.values() {
            den_lcm = den_lcm.lcm(c.denom());
        }
        let mut num_gcd = BigInt::zero();
        for c in self.terms.values() {
            let n = c.numer() * (&den_lcm / c.denom());
            num_gcd = num_gcd.gcd(&n);
        }
        let lead = self
            .terms
            .iter()
            .max_by(|a, b| a.0.cmp_lex(b.0, main))
            .map(|(_, c)| c.clone())
            .unwrap();
        let mut factor = Rational::new(den_lcm, num_gcd);
        if lead.is_negative() {
            factor = -factor;
        }
        (self.scale(&factor), factor)
    }

    pub fn normalized(&self, main: Option<VarId>) -> MultiPoly {
        self.normalize_with_factor(main).0
    }

    /// Coefficients of a polynomial in at most the single variable `v`.
    pub fn to_univariate(&self, v: VarId) -> Result<Vec<Rational>> {
        if self.vars().iter().any(|&w| w != v) {
            return Err(Error::Structural(
                "expected a univariate polynomial".into(),
            ));
        }
        let d = self.degree_in(v);
        if d < 0 {
            return Ok(Vec::new());
        }
        let mut out = vec![Rational::zero(); d as usize + 1];
        for (m, c) in &self.terms {
            out[m.exponent(v) as usize] = c.clone();
        }
        Ok(out)
    }

    pub fn from_univariate(v: VarId, coeffs: &[Rational]) -> MultiPoly {
        MultiPoly::from_terms(
            coeffs
                .iter()
                .enumerate()
                .map(|(e, c)| (Monomial::var(v, e as u32), c.clone())),
        )
    }

    /// Rename variables through `map`; unmapped variables are kept.
    pub fn rename(&self, map: &BTreeMap<VarId, VarId>) -> MultiPoly {
        MultiPoly::from_terms(self.terms.iter().map(|(m, c)| {
            let pairs = m
                .pairs()
                .iter()
                .map(|&(v, e)| (*map.get(&v).unwrap_or(&v), e))
                .collect();
            (Monomial::from_pairs(pairs), c.clone())
        }))
    }

    /// Canonical text: terms in descending graded-lex order, e.g.
    /// `z^2 - 2*x*z + 1/2*x^2 - 1`.
    pub fn to_text(&self, reg: &Registry) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut s = String::new();
        for (i, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let mag = c.abs();
            if i == 0 {
                if neg {
                    s.push('-');
                }
            } else {
                s.push_str(if neg { " - " } else { " + " });
            }
            let mono = fmt_monomial(m, reg);
            if mono.is_empty() {
                s.push_str(&fmt_rational(&mag));
            } else if mag.is_one() {
                s.push_str(&mono);
            } else {
                let _ = write!(s, "{}*{}", fmt_rational(&mag), mono);
            }
        }
        s
    }
}

fn fmt_monomial(m: &Monomial, reg: &Registry) -> String {
    m.pairs()
        .iter()
        .map(|&(v, e)| {
            if e == 1 {
                reg.name(v).to_string()
            } else {
                format!("{}^{}", reg.name(v), e)
            }
        })
        .collect::<Vec<_>>()
        .join("*")
}

// Total order: compare terms from the leading one downward.
impl Ord for MultiPoly {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.terms.iter().rev().cmp(other.terms.iter().rev())
    }
}

impl PartialOrd for MultiPoly {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Add for &MultiPoly {
    type Output = MultiPoly;
    fn add(self, rhs: &MultiPoly) -> MultiPoly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl Add for MultiPoly {
    type Output = MultiPoly;
    fn add(mut self, rhs: MultiPoly) -> MultiPoly {
        for (m, c) in rhs.terms {
            self.add_term(m, c);
        }
        self
    }
}

impl Sub for &MultiPoly {
    type Output = MultiPoly;
    fn sub(self, rhs: &MultiPoly) -> MultiPoly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }
}

impl Sub for MultiPoly {
    type Output = MultiPoly;
    fn sub(mut self, rhs: MultiPoly) -> MultiPoly {
        for (m, c) in rhs.terms {
            self.add_term(m, -c);
        }
        self
    }
}

impl Neg for &MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        MultiPoly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

impl Neg for MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        -&self
    }
}

impl Mul for &MultiPoly {
    type Output = MultiPoly;
    fn mul(self, rhs: &MultiPoly) -> MultiPoly {
        let mut out = MultiPoly::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }
}

impl Mul for MultiPoly {
    type Output = MultiPoly;
    fn mul(self, rhs: MultiPoly) -> MultiPoly {
        &self * &rhs
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{rat, ratio};

    fn setup() -> (Registry, VarId, VarId, VarId) {
        let mut reg = Registry::new();
        let x = reg.var("x");
        let y = reg.var("y");
        let z = reg.var("z");
        (reg, x, y, z)
    }

    #[test]
    fn arithmetic_examples() {
        let (reg, x, _, z) = setup();
        let px = MultiPoly::var(x);
        let pz = MultiPoly::var(z);
        let one = MultiPoly::one();
        assert_eq!(
            poly_arith(ArithOp::Add, &(&px + &one), &(&px - &one)),
            px.scale(&rat(2))
        );
        let prod = poly_arith(ArithOp::Mul, &(&pz - &px), &(&pz + &px));
        assert_eq!(prod.to_text(&reg), "z^2 - x^2");
        let p = &(&px * &pz) + &one;
        assert!(poly_arith(ArithOp::Sub, &p, &p).is_zero());
    }

    #[test]
    fn powers() {
        let (reg, x, y, z) = setup();
        let s = &MultiPoly::var(x) + &MultiPoly::var(y);
        assert_eq!(s.pow(0), MultiPoly::one());
        assert_eq!(MultiPoly::var(z).pow(2), MultiPoly::var_pow(z, 2));
        let c = (&MultiPoly::var(x) + &MultiPoly::one()).pow(3);
        assert_eq!(c.to_text(&reg), "x^3 + 3*x^2 + 3*x + 1");
    }

    #[test]
    fn derivatives() {
        let (reg, x, _, z) = setup();
        let p = &MultiPoly::var_pow(z, 2) - &MultiPoly::var(x);
        let d1 = p.derivative(z);
        assert_eq!(d1.to_text(&reg), "2*z");
        assert_eq!(d1.derivative(z), MultiPoly::int(2));
        assert!(MultiPoly::var_pow(z, 2).derivative(x).is_zero());
    }

    #[test]
    fn evaluation() {
        let (_, x, y, z) = setup();
        let p = &MultiPoly::var_pow(z, 2) - &MultiPoly::var(x);
        let pt: Point = [(z, rat(1)), (x, rat(1))].into_iter().collect();
        assert_eq!(p.eval(&pt).unwrap(), rat(0));
        let q = &MultiPoly::var_pow(z, 2) - &MultiPoly::int(2);
        let pt: Point = [(z, ratio(3, 2))].into_iter().collect();
        assert_eq!(q.eval(&pt).unwrap(), ratio(1, 4));
        let r = MultiPoly::var_pow(x, 2) - MultiPoly::var(x) * MultiPoly::var(y).scale(&rat(7))
            + MultiPoly::var_pow(y, 2);
        let pt: Point = [(x, rat(1)), (y, rat(1))].into_iter().collect();
        assert_eq!(r.eval(&pt).unwrap(), rat(-5));
        let missing: Point = [(x, rat(1))].into_iter().collect();
        assert!(matches!(r.eval(&missing), Err(Error::Structural(_))));
    }

    #[test]
    fn substitution() {
        let (mut reg, x, _, z) = setup();
        let t = reg.var("t");
        let p = &MultiPoly::var_pow(z, 2) - &MultiPoly::var(x);
        let shifted = p.substitute(z, &(&MultiPoly::var(z) - &MultiPoly::var(t)));
        let expect = MultiPoly::var_pow(z, 2)
            - MultiPoly::var(t) * MultiPoly::var(z).scale(&rat(2))
            + MultiPoly::var_pow(t, 2)
            - MultiPoly::var(x);
        assert_eq!(shifted, expect);
        let scaled = p.substitute(z, &(&MultiPoly::var(t) * &MultiPoly::var(z)));
        assert_eq!(
            scaled,
            &MultiPoly::var_pow(t, 2) * &MultiPoly::var_pow(z, 2) - MultiPoly::var(x)
        );
        assert_eq!(p.substitute(z, &MultiPoly::var(z)), p);
    }

    #[test]
    fn homogenization() {
        let (mut reg, x, _, z) = setup();
        let t = reg.var("t");
        let p = &MultiPoly::var_pow(z, 2) - &MultiPoly::var(x);
        let h = p.homogenize_in_quotient(z, t, 2).unwrap();
        assert_eq!(h, MultiPoly::var_pow(z, 2) - MultiPoly::var(x) * MultiPoly::var_pow(t, 2));
        let lin = MultiPoly::var(z);
        assert_eq!(lin.homogenize_in_quotient(z, t, 1).unwrap(), lin);
        let cubic = &MultiPoly::var_pow(z, 3) - &MultiPoly::var(x);
        assert_eq!(
            cubic.homogenize_in_quotient(z, t, 3).unwrap(),
            MultiPoly::var_pow(z, 3) - MultiPoly::var(x) * MultiPoly::var_pow(t, 3)
        );
        let bad = &MultiPoly::var(t) + &MultiPoly::var(z);
        assert!(bad.homogenize_in_quotient(z, t, 1).is_err());
    }

    #[test]
    fn exact_division() {
        let (_, x, y, z) = setup();
        let a = &MultiPoly::var(z) - &MultiPoly::var(x);
        let b = &MultiPoly::var(z) + &MultiPoly::var(y).scale(&ratio(1, 3));
        let p = &a * &b;
        assert_eq!(p.div_exact(&a), Some(b.clone()));
        assert_eq!(p.div_exact(&b), Some(a.clone()));
        assert_eq!(a.div_exact(&b), None);
    }

    #[test]
    fn canonical_text_and_normalization() {
        let (reg, x, _, z) = setup();
        let terms = [(0, 6, 1), (1, 4, -3), (1, 3, -2), (2, 2, 3), (2, 1, -6), (3, 0, -1), (2, 0, 1)];
        let p = MultiPoly::from_terms(terms.iter().map(|&(ex, ez, c)| {
            (Monomial::from_pairs(vec![(x, ex), (z, ez)]), rat(c))
        }));
        assert_eq!(
            p.to_text(&reg),
            "z^6 - 3*x*z^4 - 2*x*z^3 + 3*x^2*z^2 - 6*x^2*z - x^3 + x^2"
        );
        let (n, f) = p.scale(&ratio(-2, 3)).normalize_with_factor(Some(z));
        assert_eq!(n, p);
        assert_eq!(f, ratio(-3, 2));
        assert_eq!(MultiPoly::constant(ratio(1, 2)).to_text(&reg), "1/2");
        assert_eq!(MultiPoly::zero().degree_in(x), -1);
    }
}
