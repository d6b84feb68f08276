//! Multivariate gcd by recursive content extraction and subresultant
//! pseudo-remainder sequences.

use super::{rat, MultiPoly, Point, VarId};
use crate::error::{Error, Result};

fn max_var(p: &MultiPoly, q: &MultiPoly) -> Option<VarId> {
    p.vars().into_iter().chain(q.vars()).max()
}

/// Content of `p` with respect to `v`: the gcd of its coefficients as a
/// univariate polynomial in `v`. Normalized; zero for the zero polynomial.
pub fn content_in(p: &MultiPoly, v: VarId) -> MultiPoly {
    let mut coeffs: Vec<MultiPoly> = p.coeffs_in(v).into_iter().filter(|c| !c.is_zero()).collect();
    coeffs.sort_by_key(|c| (c.vars().len(), c.num_terms()));
    let mut g = MultiPoly::zero();
    for c in coeffs {
        g = gcd(&g, &c);
        if g.is_constant() {
            return MultiPoly::one();
        }
    }
    g
}

/// `p` divided by its content with respect to `v`, normalized.
pub fn primitive_part_in(p: &MultiPoly, v: VarId) -> MultiPoly {
    if p.is_zero() {
        return MultiPoly::zero();
    }
    let c = content_in(p, v);
    p.div_exact(&c)
        .expect("content divides its polynomial")
        .normalized(Some(v))
}

/// Pseudo-remainder of `a` by `b` in `v`: `lc(b)^(deg a - deg b + 1) a mod b`.
pub(crate) fn prem(a: &MultiPoly, b: &MultiPoly, v: VarId) -> MultiPoly {
    let db = b.degree_in(v);
    let mut r = a.clone();
    let mut da = r.degree_in(v);
    if da < db {
        return r;
    }
    let lc_b = b.leading_coeff_in(v);
    let mut e = da - db + 1;
    while !r.is_zero() && da >= db {
        let lc_r = r.leading_coeff_in(v);
        let shift = MultiPoly::var_pow(v, (da - db) as u32);
        r = &(&lc_b * &r) - &(&(&lc_r * &shift) * b);
        e -= 1;
        da = r.degree_in(v);
    }
    &lc_b.pow(e as u32) * &r
}

fn exact(p: &MultiPoly, d: &MultiPoly) -> MultiPoly {
    p.div_exact(d)
        .expect("subresultant sequence division is exact")
}

// Last nonzero subresultant of primitive a, b with deg_v a >= deg_v b >= 1.
fn subresultant_gcd(a: &MultiPoly, b: &MultiPoly, v: VarId) -> MultiPoly {
    let (mut a, mut b) = if a.degree_in(v) >= b.degree_in(v) {
        (a.clone(), b.clone())
    } else {
        (b.clone(), a.clone())
    };
    let mut g = MultiPoly::one();
    let mut h = MultiPoly::one();
    loop {
        let delta = (a.degree_in(v) - b.degree_in(v)) as u32;
        let r = prem(&a, &b, v);
        if r.is_zero() {
            return b;
        }
        if r.degree_in(v) == 0 {
            return MultiPoly::one();
        }
        a = b;
        b = exact(&r, &(&g * &h.pow(delta)));
        g = a.leading_coeff_in(v);
        h = match delta {
            0 => h,
            1 => g.clone(),
            _ => exact(&g.pow(delta), &h.pow(delta - 1)),
        };
    }
}

// Sufficient test for deg_v gcd(p, q) = 0: at a point of the other variables
// where both leading coefficients in v survive, the gcd specializes to a
// divisor of the specialized gcd with the same degree in v.
fn coprime_in(p: &MultiPoly, q: &MultiPoly, v: VarId) -> bool {
    let mut others = p.vars();
    others.extend(q.vars());
    others.remove(&v);
    let (lp, lq) = (p.leading_coeff_in(v), q.leading_coeff_in(v));
    for k in 0..4i64 {
        let a: Point = others
            .iter()
            .enumerate()
            .map(|(i, &w)| (w, rat((3 * i as i64 + 5 * k + 2) % 17 - 8)))
            .collect();
        if lp.partial_eval(&a).is_zero() || lq.partial_eval(&a).is_zero() {
            continue;
        }
        let (pa, qa) = (p.partial_eval(&a), q.partial_eval(&a));
        return subresultant_gcd(&pa, &qa, v).degree_in(v) == 0;
    }
    false
}

/// Greatest common divisor in ℚ[x₁,…,xₙ], normalized to primitive integer
/// coefficients with a positive lex-leading coefficient. `gcd(0, 0) = 0`.
pub fn gcd(p: &MultiPoly, q: &MultiPoly) -> MultiPoly {
    if p.is_zero() {
        return q.normalized(None);
    }
    if q.is_zero() {
        return p.normalized(None);
    }
    if p.is_constant() || q.is_constant() {
        return MultiPoly::one();
    }
    // A variable missing from one side cannot occur in the gcd.
    if let Some(w) = q.vars().into_iter().rev().find(|&w| !p.contains_var(w)) {
        return gcd(p, &content_in(q, w));
    }
    if let Some(w) = p.vars().into_iter().rev().find(|&w| !q.contains_var(w)) {
        return gcd(&content_in(p, w), q);
    }
    let v = max_var(p, q).expect("nonconstant polynomials have variables");
    let cp = content_in(p, v);
    let cq = content_in(q, v);
    let pp = exact(p, &cp);
    let qq = exact(q, &cq);
    if coprime_in(&pp, &qq, v) {
        return gcd(&cp, &cq);
    }
    let g = subresultant_gcd(&pp, &qq, v);
    let g = if g.contains_var(v) {
        exact(&g, &content_in(&g, v))
    } else {
        MultiPoly::one()
    };
    (&gcd(&cp, &cq) * &g).normalized(None)
}

/// Gcd of `p` and `q` as univariate polynomials in `v` over the fraction
/// field of the remaining variables: the `v`-primitive part of [`gcd`].
pub fn gcd_in_main_var(p: &MultiPoly, q: &MultiPoly, v: VarId) -> MultiPoly {
    let g = gcd(p, q);
    if g.contains_var(v) {
        primitive_part_in(&g, v)
    } else {
        MultiPoly::one()
    }
}

/// `p / gcd_in_main_var(p, ∂p/∂v, v)`, normalized with `v` as main variable.
pub fn square_free_part(p: &MultiPoly, v: VarId) -> Result<MultiPoly> {
    if p.degree_in(v) < 1 {
        return Err(Error::Structural(
            "square-free part needs positive degree in the main variable".into(),
        ));
    }
    let g = gcd_in_main_var(p, &p.derivative(v), v);
    if g.is_one() {
        return Ok(p.normalized(Some(v)));
    }
    p.div_exact(&g)
        .map(|q| q.normalized(Some(v)))
        .ok_or_else(|| Error::Internal("gcd does not divide its argument".into()))
}
