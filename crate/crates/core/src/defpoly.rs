//! Defining polynomials of radical expressions by iterated resultants, with
//! degree reduction after every step.

use std::collections::BTreeMap;

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::{eval_numeric, eval_poly_interval, is_polynomial, Interval, NumericValue, RadicalExpr};
use crate::par;
use crate::poly::{coprime_factors, pow2_neg, primitive_part_in, square_free_part, MultiPoly, Point, Rational, Registry, VarId};
use crate::resultant::resultant;

/// `poly(f(a), a) = 0` wherever `f(a)` is real.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DefiningPolynomial {
    pub poly: MultiPoly,
    pub z: VarId,
    pub source: RadicalExpr,
    /// Some reduction step lowered the degree of a raw resultant.
    pub reduced: bool,
    /// Product of the root indices of `source`.
    pub predicted_z_degree_bound: u64,
}

impl DefiningPolynomial {
    pub fn z_degree(&self) -> u32 {
        self.poly.deg(self.z)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReduceConfig {
    pub trials: usize,
    pub precision: u32,
    pub seed: u64,
    /// Sample numerators are drawn from `[-radius, radius]`.
    pub radius: i64,
    /// Sample denominators are drawn from `1..=max_denominator`.
    pub max_denominator: i64,
    /// Attempts per trial before giving up on finding a real-valued point.
    pub retries: usize,
}

impl Default for ReduceConfig {
    fn default() -> Self {
        ReduceConfig {
            trials: 8,
            precision: 64,
            seed: 0,
            radius: 20,
            max_denominator: 8,
            retries: 200,
        }
    }
}

/// Compute a defining polynomial of the normalized expression `f` in the
/// variable `z`. Auxiliary variables are registered in `reg`.
pub fn defining_polynomial(
    f: &RadicalExpr,
    z: VarId,
    reg: &mut Registry,
    cfg: &ReduceConfig,
) -> Result<DefiningPolynomial> {
    if f.vars().contains(&z) {
        return Err(Error::Structural(format!(
            "defining variable '{}' occurs in the expression",
            reg.name(z)
        )));
    }
    let mut st = Builder {
        z,
        reg,
        cfg,
        level: 0,
        reduced: false,
    };
    let poly = st.build(f)?;
    Ok(DefiningPolynomial {
        poly: poly.normalized(Some(z)),
        z,
        source: f.clone(),
        reduced: st.reduced,
        predicted_z_degree_bound: f.root_index_product(),
    })
}

struct Builder<'a> {
    z: VarId,
    reg: &'a mut Registry,
    cfg: &'a ReduceConfig,
    level: u64,
    reduced: bool,
}

impl Builder<'_> {
    fn build(&mut self, f: &RadicalExpr) -> Result<MultiPoly> {
        use RadicalExpr::*;
        let z = self.z;
        if let Some(p) = is_polynomial(f) {
            return Ok(&MultiPoly::var(z) - &p);
        }
        let zp = MultiPoly::var(z);
        let t = self.reg.fresh("__t");
        let tp = MultiPoly::var(t);
        let (a, b, what) = match f {
            Add(g, h) | Sub(g, h) => {
                let p = self.build(g)?;
                let q = self.build(h)?;
                let shift = if matches!(f, Add(..)) { &zp - &tp } else { &zp + &tp };
                (p.substitute(z, &shift), rename(&q, z, t), "sum or difference")
            }
            Mul(g, h) => {
                let p = self.build(g)?;
                let q = self.build(h)?;
                let d = p.deg(z);
                (p.homogenize_in_quotient(z, t, d)?, rename(&q, z, t), "product")
            }
            Div(g, h) => {
                if matches!(&**h, Const(c) if c.is_zero()) {
                    return Err(Error::Domain("division by the constant zero".into()));
                }
                let p = self.build(g)?;
                let q = self.build(h)?;
                (p.substitute(z, &(&tp * &zp)), rename(&q, z, t), "quotient")
            }
            Root(r, g) => {
                let p = self.build(g)?;
                (&zp.pow(*r) - &tp, rename(&p, z, t), "root")
            }
            Pow(..) => {
                return Err(Error::Structural(
                    "expression must be normalized before building a defining polynomial".into(),
                ))
            }
            Const(_) | Var(_) => unreachable!("constants and variables are polynomials"),
        };
        let res = res_with_degenerate(&a, &b, t)?;
        if res.is_zero() {
            return Err(Error::Internal(format!(
                "resultant for a {what} vanished identically"
            )));
        }
        if res.contains_var(t) {
            return Err(Error::Internal(format!(
                "auxiliary variable survived elimination in a {what}"
            )));
        }
        if res.deg(z) == 0 {
            return Err(Error::Internal(format!(
                "resultant for a {what} has no dependence on the defining variable"
            )));
        }
        self.level += 1;
        let cfg = ReduceConfig {
            seed: par::derive_seed(self.cfg.seed, self.level),
            ..self.cfg.clone()
        };
        let reduced = reduce(&res, f, z, &cfg)?;
        if reduced.deg(z) < res.deg(z) {
            self.reduced = true;
        }
        Ok(reduced)
    }
}

fn rename(p: &MultiPoly, from: VarId, to: VarId) -> MultiPoly {
    p.rename(&BTreeMap::from([(from, to)]))
}

// The resultant when one side has degree 0 in t is that side raised to the
// other's degree.
fn res_with_degenerate(a: &MultiPoly, b: &MultiPoly, t: VarId) -> Result<MultiPoly> {
    match (a.deg(t), b.deg(t)) {
        (0, 0) => Ok(MultiPoly::one()),
        (0, e) => Ok(a.pow(e)),
        (d, 0) => Ok(b.pow(d)),
        _ => resultant(a, b, t),
    }
}

/// Lower the degree of a defining polynomial `p` of `f`: take the square-free
/// part, split it into coprime factors, and keep the factors that `f`
/// satisfies numerically.
pub fn reduce(p: &MultiPoly, f: &RadicalExpr, z: VarId, cfg: &ReduceConfig) -> Result<MultiPoly> {
    let sf = primitive_part_in(&square_free_part(p, z)?, z);
    let candidates: Vec<MultiPoly> = coprime_factors(&sf)
        .into_iter()
        .filter(|q| q.deg(z) > 0)
        .collect();
    if candidates.len() <= 1 {
        return Ok(candidates.into_iter().next().unwrap_or(sf).normalized(Some(z)));
    }
    let mut passing = Vec::new();
    for (i, q) in candidates.iter().enumerate() {
        let c = ReduceConfig {
            seed: par::derive_seed(cfg.seed, i as u64),
            ..cfg.clone()
        };
        match probabilistic_zero_test(q, f, z, &c) {
            Ok(true) => passing.push(q.clone()),
            Ok(false) => {}
            Err(Error::Sampling(_)) | Err(Error::Precision(_)) => return Ok(sf.normalized(Some(z))),
            Err(e) => return Err(e),
        }
    }
    Ok(match passing.len() {
        0 => sf,
        _ => passing.iter().fold(MultiPoly::one(), |acc, q| &acc * q),
    }
    .normalized(Some(z)))
}

fn random_point(vars: &[VarId], rng: &mut ChaCha8Rng, cfg: &ReduceConfig) -> Point {
    vars.iter()
        .map(|&v| {
            let n = rng.gen_range(-cfg.radius..=cfg.radius);
            let d = rng.gen_range(1..=cfg.max_denominator.max(1));
            (v, Rational::new(n.into(), d.into()))
        })
        .collect()
}

// Sign information of q(f(a), a) at one point, refining f until the
// enclosure of q is narrower than 2^-bits or excludes zero.
fn residual_contains_zero(q: &MultiPoly, f: &RadicalExpr, z: VarId, a: &Point, bits: u32) -> Result<bool> {
    let target = pow2_neg(bits);
    let mut env: BTreeMap<VarId, Interval> =
        a.iter().map(|(v, c)| (*v, Interval::point(c.clone()))).collect();
    let mut prec = bits;
    for _ in 0..8 {
        let fv = match eval_numeric(f, a, prec)? {
            NumericValue::Real(i) => i,
            NumericValue::NotReal => return Err(Error::Internal("sample lost real value".into())),
        };
        let exact = fv.is_exact();
        env.insert(z, fv);
        let r = eval_poly_interval(q, &env)?;
        if !r.contains_zero() {
            return Ok(false);
        }
        if r.width() <= target || exact {
            return Ok(true);
        }
        prec = prec.saturating_mul(2);
    }
    Err(Error::Precision(format!(
        "zero test did not resolve to {bits} bits"
    )))
}

/// Randomized check that `q(f(a), a)` vanishes. `false` is certain; `true`
/// holds at `cfg.trials` random real-valued points, each certified at the
/// working precision and at two successive doublings of it.
pub fn probabilistic_zero_test(q: &MultiPoly, f: &RadicalExpr, z: VarId, cfg: &ReduceConfig) -> Result<bool> {
    let mut vars: Vec<VarId> = f.vars().into_iter().chain(q.vars()).filter(|&v| v != z).collect();
    vars.sort();
    vars.dedup();
    let outcomes = par::try_map_range(cfg.trials, |i| -> Result<bool> {
        let mut rng = ChaCha8Rng::seed_from_u64(par::derive_seed(cfg.seed, i as u64));
        for _ in 0..cfg.retries {
            let a = random_point(&vars, &mut rng, cfg);
            match eval_numeric(f, &a, cfg.precision) {
                Ok(NumericValue::Real(_)) => {}
                Ok(NumericValue::NotReal) | Err(Error::Domain(_)) | Err(Error::Precision(_)) => continue,
                Err(e) => return Err(e),
            }
            for k in 0..3 {
                if !residual_contains_zero(q, f, z, &a, cfg.precision << k)? {
                    return Ok(false);
                }
            }
            return Ok(true);
        }
        Err(Error::Sampling(format!(
            "no real-valued sample found after {} attempts",
            cfg.retries
        )))
    })?;
    Ok(outcomes.into_iter().all(|b| b))
}

/// Degree bounds predicted by the recursive construction.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DegreeBounds {
    pub z: u64,
    pub vars: BTreeMap<VarId, u64>,
}

impl DegreeBounds {
    pub fn var(&self, v: VarId) -> u64 {
        self.vars.get(&v).copied().unwrap_or(0)
    }
}

pub fn degree_bounds(f: &RadicalExpr) -> DegreeBounds {
    use RadicalExpr::*;
    if let Some(p) = is_polynomial(f) {
        return DegreeBounds {
            z: 1,
            vars: p.vars().into_iter().map(|v| (v, p.deg(v) as u64)).collect(),
        };
    }
    match f {
        Add(g, h) | Sub(g, h) | Mul(g, h) | Div(g, h) => {
            let p = degree_bounds(g);
            let q = degree_bounds(h);
            let vars = p
                .vars
                .keys()
                .chain(q.vars.keys())
                .map(|&v| (v, p.var(v) * q.z + p.z * q.var(v)))
                .collect();
            DegreeBounds { z: p.z * q.z, vars }
        }
        Root(r, g) => {
            let p = degree_bounds(g);
            DegreeBounds {
                z: *r as u64 * p.z,
                vars: p.vars,
            }
        }
        Pow(..) => degree_bounds(&crate::expr::normalize(f).unwrap_or_else(|_| f.clone())),
        Const(_) | Var(_) => unreachable!("constants and variables are polynomials"),
    }
}
