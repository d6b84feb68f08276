//! Dense univariate polynomials over ℚ, Sturm chains and exact real-root
//! isolation.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::expr::Interval;
use crate::poly::{rat, MultiPoly, Rational, VarId};

/// Coefficients in ascending degree; no trailing zeros.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UniPoly {
    coeffs: Vec<Rational>,
    // Positive integer multiple of `coeffs`, for sign evaluation.
    ints: Vec<BigInt>,
}

fn integer_multiple(coeffs: &[Rational]) -> Vec<BigInt> {
    let l = coeffs.iter().fold(BigInt::one(), |l, c| l.lcm(c.denom()));
    coeffs.iter().map(|c| c.numer() * (&l / c.denom())).collect()
}

impl UniPoly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        let ints = integer_multiple(&coeffs);
        UniPoly { coeffs, ints }
    }

    pub fn zero() -> Self {
        UniPoly::new(Vec::new())
    }

    pub fn from_ints(cs: &[i64]) -> Self {
        UniPoly::new(cs.iter().map(|&c| rat(c)).collect())
    }

    /// Product of `(x - r)` over the given roots.
    pub fn from_roots(roots: &[Rational]) -> Self {
        roots.iter().fold(UniPoly::new(vec![Rational::one()]), |acc, r| {
            acc.mul(&UniPoly::new(vec![-r.clone(), Rational::one()]))
        })
    }

    /// View of a polynomial whose only variable (if any) is `v`.
    pub fn from_multipoly(p: &MultiPoly, v: VarId) -> Result<Self> {
        Ok(UniPoly::new(p.to_univariate(v)?))
    }

    pub fn to_multipoly(&self, v: VarId) -> MultiPoly {
        MultiPoly::from_univariate(v, &self.coeffs)
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; `-1` for the zero polynomial.
    pub fn degree(&self) -> i64 {
        self.coeffs.len() as i64 - 1
    }

    pub fn leading(&self) -> Rational {
        self.coeffs.last().cloned().unwrap_or_else(Rational::zero)
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        self.coeffs
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| acc * x + c)
    }

    /// Sign of the value at `x`, by integer evaluation of the homogenized
    /// polynomial at `(numer, denom)`.
    pub fn sign_at(&self, x: &Rational) -> i8 {
        let (n, d) = (x.numer(), x.denom());
        let mut acc = BigInt::zero();
        let mut dk = BigInt::one();
        for c in self.ints.iter().rev() {
            acc = acc * n + c * &dk;
            dk *= d;
        }
        match acc.sign() {
            num_bigint::Sign::Minus => -1,
            num_bigint::Sign::NoSign => 0,
            num_bigint::Sign::Plus => 1,
        }
    }

    pub fn eval_interval(&self, x: &Interval) -> Interval {
        self.coeffs
            .iter()
            .rev()
            .fold(Interval::point(Rational::zero()), |acc, c| {
                acc.mul(x).add(&Interval::point(c.clone()))
            })
    }

    pub fn derivative(&self) -> UniPoly {
        UniPoly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * rat(i as i64))
                .collect(),
        )
    }

    pub fn neg(&self) -> UniPoly {
        UniPoly::new(self.coeffs.iter().map(|c| -c).collect())
    }

    pub fn mul(&self, o: &UniPoly) -> UniPoly {
        if self.is_zero() || o.is_zero() {
            return UniPoly::zero();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in o.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        UniPoly::new(out)
    }

    pub fn div_rem(&self, d: &UniPoly) -> (UniPoly, UniPoly) {
        assert!(!d.is_zero(), "division by the zero polynomial");
        let mut r = self.coeffs.clone();
        let dd = d.coeffs.len() - 1;
        if r.len() <= dd {
            return (UniPoly::zero(), self.clone());
        }
        let lc = d.leading();
        let mut q = vec![Rational::zero(); r.len() - dd];
        for k in (0..q.len()).rev() {
            let c = &r[k + dd] / &lc;
            if !c.is_zero() {
                for (j, dc) in d.coeffs.iter().enumerate() {
                    r[k + j] -= &c * dc;
                }
            }
            q[k] = c;
        }
        r.truncate(dd);
        (UniPoly::new(q), UniPoly::new(r))
    }

    pub fn rem(&self, d: &UniPoly) -> UniPoly {
        self.div_rem(d).1
    }

    pub fn monic(&self) -> UniPoly {
        let lc = self.leading();
        UniPoly::new(self.coeffs.iter().map(|c| c / &lc).collect())
    }

    pub fn gcd(&self, o: &UniPoly) -> UniPoly {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = if r.is_zero() { r } else { r.monic() };
        }
        if a.is_zero() {
            a
        } else {
            a.monic()
        }
    }

    pub fn square_free(&self) -> UniPoly {
        let g = self.gcd(&self.derivative());
        if g.degree() <= 0 {
            return self.monic();
        }
        self.div_rem(&g).0.monic()
    }
}

/// Sturm chain `p, p', -rem(p, p'), …` of a nonzero polynomial.
pub fn sturm_sequence(p: &UniPoly) -> Result<Vec<UniPoly>> {
    if p.is_zero() {
        return Err(Error::Structural("Sturm sequence of the zero polynomial".into()));
    }
    let mut chain = vec![p.clone(), p.derivative()];
    while !chain.last().unwrap().is_zero() {
        let n = chain.len();
        let r = chain[n - 2].rem(&chain[n - 1]).neg();
        chain.push(r);
    }
    chain.pop();
    Ok(chain)
}

fn variations(signs: impl Iterator<Item = i8>) -> usize {
    let mut last = 0i8;
    let mut count = 0;
    for s in signs.filter(|&s| s != 0) {
        if last != 0 && s != last {
            count += 1;
        }
        last = s;
    }
    count
}

fn variations_at(chain: &[UniPoly], x: &Rational) -> usize {
    variations(chain.iter().map(|q| q.sign_at(x)))
}

fn variations_at_infinity(chain: &[UniPoly], positive: bool) -> usize {
    variations(chain.iter().map(|q| {
        let s = crate::poly::sign(&q.leading());
        if !positive && q.degree() % 2 == 1 {
            -s
        } else {
            s
        }
    }))
}

/// Number of distinct real roots in `(a, b]`.
pub fn count_roots_in(chain: &[UniPoly], a: &Rational, b: &Rational) -> usize {
    variations_at(chain, a).saturating_sub(variations_at(chain, b))
}

/// Number of distinct real roots.
pub fn count_real_roots(p: &UniPoly) -> Result<usize> {
    let chain = sturm_sequence(p)?;
    Ok(variations_at_infinity(&chain, false).saturating_sub(variations_at_infinity(&chain, true)))
}

/// A real root of a square-free polynomial: exactly `lo` when `lo == hi`,
/// otherwise the only root in the open interval `(lo, hi)`, whose endpoints
/// are not roots.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootInterval {
    pub lo: Rational,
    pub hi: Rational,
}

impl RootInterval {
    pub fn is_exact(&self) -> bool {
        self.lo == self.hi
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn as_interval(&self) -> Interval {
        Interval::new(self.lo.clone(), self.hi.clone())
    }

    /// Halve the interval, keeping the root inside.
    pub fn bisect(&mut self, p: &UniPoly) {
        if self.is_exact() {
            return;
        }
        let m = (&self.lo + &self.hi) / rat(2);
        let sm = p.sign_at(&m);
        if sm == 0 {
            self.lo = m.clone();
            self.hi = m;
        } else if sm == p.sign_at(&self.lo) {
            self.lo = m;
        } else {
            self.hi = m;
        }
    }

    pub fn refine_to(&mut self, p: &UniPoly, width: &Rational) {
        while !self.is_exact() && &self.width() > width {
            self.bisect(p);
        }
    }
}

/// Real roots of a nonzero polynomial in increasing order, isolated by
/// disjoint rational intervals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootIsolation {
    /// Square-free part of the input; the intervals refer to it.
    pub poly: UniPoly,
    pub roots: Vec<RootInterval>,
}

/// Every real root has absolute value strictly below this bound.
pub fn cauchy_bound(p: &UniPoly) -> Rational {
    let lc = p.leading().abs();
    let m = p.coeffs()[..p.coeffs().len() - 1]
        .iter()
        .map(|c| c.abs() / &lc)
        .max()
        .unwrap_or_else(Rational::zero);
    m + Rational::one()
}

/// Isolate all real roots of `p` by Sturm-counted bisection.
pub fn isolate_real_roots(p: &UniPoly) -> Result<RootIsolation> {
    if p.is_zero() {
        return Err(Error::Structural("root isolation of the zero polynomial".into()));
    }
    let sf = p.square_free();
    let mut roots = Vec::new();
    if sf.degree() >= 1 {
        let chain = sturm_sequence(&sf)?;
        let b = dyadic_ceil(&cauchy_bound(&sf));
        let mut stack = vec![(-b.clone(), b)];
        while let Some((a, b)) = stack.pop() {
            match count_roots_in(&chain, &a, &b) {
                0 => {}
                1 => roots.push(RootInterval { lo: a, hi: b }),
                _ => {
                    let m = split_point(&sf, &a, &b);
                    stack.push((a, m.clone()));
                    stack.push((m, b));
                }
            }
        }
    }
    roots.sort_by(|x, y| x.lo.cmp(&y.lo));
    Ok(RootIsolation { poly: sf, roots })
}

// Smallest power of two that is at least `b > 0`.
fn dyadic_ceil(b: &Rational) -> Rational {
    let mut p = Rational::one();
    while &p < b {
        p *= rat(2);
    }
    p
}

// A dyadic point of (a, b) that is not a root of p, near the midpoint.
fn split_point(p: &UniPoly, a: &Rational, b: &Rational) -> Rational {
    let mid = (a + b) / rat(2);
    let mut step = (b - a) / rat(4);
    if p.sign_at(&mid) != 0 {
        return mid;
    }
    loop {
        for m in [&mid - &step, &mid + &step] {
            if p.sign_at(&m) != 0 {
                return m;
            }
        }
        step /= rat(2);
    }
}

/// Sign of `q` at the root of `p` isolated by `root`, refining `root` as
/// needed. `p` must be square-free.
pub fn sign_at_root(q: &UniPoly, p: &UniPoly, root: &mut RootInterval) -> i8 {
    if root.is_exact() {
        return q.sign_at(&root.lo);
    }
    let g = p.gcd(q);
    if g.degree() >= 1 {
        // the root is shared iff g changes sign on the isolating interval
        let g = g.square_free();
        if g.sign_at(&root.lo) * g.sign_at(&root.hi) < 0 {
            return 0;
        }
    }
    loop {
        let s = q.sign_at(&root.lo);
        if s != 0 && s == q.sign_at(&root.hi) {
            if let Some(s) = q.eval_interval(&root.as_interval()).sign() {
                if s != 0 {
                    return s;
                }
            }
        }
        root.bisect(p);
        if root.is_exact() {
            return q.sign_at(&root.lo);
        }
    }
}
