//! Exact arithmetic foundation: big rationals, a variable registry, and
//! sparse multivariate polynomials over ℚ.

mod factor;
mod gcd;
mod monomial;
mod multipoly;

pub use factor::{coprime_factors, squarefree_decomposition};
pub use gcd::{content_in, gcd, gcd_in_main_var, primitive_part_in, square_free_part};
pub use monomial::Monomial;
pub use multipoly::{poly_arith, ArithOp, MultiPoly};

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Exact rational number in canonical form (positive denominator, reduced).
pub type Rational = num_rational::BigRational;

/// A point assignment of rational values to variables.
pub type Point = BTreeMap<VarId, Rational>;

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// `2^-bits` as an exact rational.
pub fn pow2_neg(bits: u32) -> Rational {
    Rational::new(BigInt::one(), BigInt::one() << bits as usize)
}

/// Render a rational as `n` or `n/d`.
pub fn fmt_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parse `n` or `n/d` (optionally signed).
pub fn parse_rational(s: &str) -> Result<Rational> {
    let bad = || Error::Parse {
        pos: 0,
        msg: format!("not a rational number: {s:?}"),
    };
    let s = s.trim();
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = n.parse().map_err(|_| bad())?;
    let d: BigInt = d.parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(bad());
    }
    Ok(Rational::new(n, d))
}

/// Sign of a rational as -1, 0 or 1.
pub fn sign(r: &Rational) -> i8 {
    if r.is_zero() {
        0
    } else if r.is_positive() {
        1
    } else {
        -1
    }
}

/// Index of a variable in a [`Registry`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct VarId(pub u32);

impl VarId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Append-only map between variable indices and names for one problem session.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Registry {
    names: Vec<String>,
}

impl Registry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_vars<S: AsRef<str>>(names: &[S]) -> Self {
        let mut reg = Self::new();
        for n in names {
            reg.var(n.as_ref());
        }
        reg
    }

    /// Id of `name`, registering it if it is new.
    pub fn var(&mut self, name: &str) -> VarId {
        match self.lookup(name) {
            Some(v) => v,
            None => {
                self.names.push(name.to_string());
                VarId(self.names.len() as u32 - 1)
            }
        }
    }

    pub fn lookup(&self, name: &str) -> Option<VarId> {
        self.names
            .iter()
            .position(|n| n == name)
            .map(|i| VarId(i as u32))
    }

    /// Register a new variable named `base`, or `base1`, `base2`, ... if taken.
    pub fn fresh(&mut self, base: &str) -> VarId {
        if self.lookup(base).is_none() {
            return self.var(base);
        }
        let mut k = 1usize;
        loop {
            let cand = format!("{base}{k}");
            if self.lookup(&cand).is_none() {
                return self.var(&cand);
            }
            k += 1;
        }
    }

    pub fn name(&self, v: VarId) -> &str {
        self.names.get(v.index()).map(String::as_str).unwrap_or("?")
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn vars(&self) -> impl Iterator<Item = VarId> + '_ {
        (0..self.names.len()).map(|i| VarId(i as u32))
    }
}

impl fmt::Display for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}", self.0)
    }
}
