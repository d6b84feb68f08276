//! Partial factorization: square-free decomposition plus cheap splits that
//! need nothing beyond gcds. Not a full irreducible factorization.

use super::{content_in, gcd, gcd_in_main_var, primitive_part_in, rat, MultiPoly, Point, VarId};

/// Yun square-free decomposition of the `v`-primitive part of `p`:
/// pairs `(a_i, i)` with `pp(p) = ∏ a_i^i` up to a unit, each `a_i`
/// square-free, pairwise coprime, and of positive degree in `v`.
pub fn squarefree_decomposition(p: &MultiPoly, v: VarId) -> Vec<(MultiPoly, u32)> {
    if p.degree_in(v) < 1 {
        return Vec::new();
    }
    let a = primitive_part_in(p, v);
    let b = a.derivative(v);
    let c = gcd_in_main_var(&a, &b, v);
    let mut w = a.div_exact(&c).expect("gcd divides");
    let mut y = b.div_exact(&c).expect("gcd divides derivative");
    let mut z = &y - &w.derivative(v);
    let mut out = Vec::new();
    let mut i = 1;
    while w.degree_in(v) > 0 {
        let g = if z.is_zero() {
            w.clone()
        } else {
            gcd_in_main_var(&w, &z, v)
        };
        if g.degree_in(v) > 0 {
            out.push((g.normalized(Some(v)), i));
        }
        w = w.div_exact(&g).expect("gcd divides");
        y = z.div_exact(&g).expect("gcd divides");
        z = &y - &w.derivative(v);
        i += 1;
    }
    out
}

/// Pairwise coprime, square-free, nonconstant factors whose product has the
/// same zero set as `p`. Each factor is normalized; the list is sorted.
pub fn coprime_factors(p: &MultiPoly) -> Vec<MultiPoly> {
    let mut out = Vec::new();
    split(p, &mut out);
    out.sort_by(|a, b| {
        a.total_degree()
            .cmp(&b.total_degree())
            .then_with(|| a.num_terms().cmp(&b.num_terms()))
            .then_with(|| a.cmp(b))
    });
    out.dedup();
    out
}

fn split(p: &MultiPoly, out: &mut Vec<MultiPoly>) {
    if p.is_constant() {
        return;
    }
    let v = *p.vars().iter().next_back().unwrap();
    let c = content_in(p, v);
    split(&c, out);
    let pp = p.div_exact(&c).expect("content divides");
    for (a, _) in squarefree_decomposition(&pp, v) {
        split_independent(&a, v, out);
    }
}

// Separate the factors of a square-free `a` that do not involve some variable
// `w`: gcd(a, a|w=c) is exactly the w-free part of a for any c with a|w=c ≠ 0.
fn split_independent(a: &MultiPoly, main: VarId, out: &mut Vec<MultiPoly>) {
    for w in a.vars() {
        if w == main {
            continue;
        }
        let Some(spec) = (0..8)
            .map(|k| a.partial_eval(&Point::from([(w, rat(k))])))
            .find(|s| !s.is_zero())
        else {
            continue;
        };
        let g = gcd(a, &spec);
        if !g.is_constant() && g.total_degree() < a.total_degree() {
            let rest = a.div_exact(&g).expect("gcd divides");
            split_independent(&g, main_of(&g), out);
            split_independent(&rest, main_of(&rest), out);
            return;
        }
    }
    out.push(a.normalized(None));
}

fn main_of(p: &MultiPoly) -> VarId {
    *p.vars().iter().next_back().expect("nonconstant")
}
