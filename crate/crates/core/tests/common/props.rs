//! Property checks shared by the proptest suites and the acceptance harness.

use std::collections::BTreeMap;

use algprog::poly::{Monomial, MultiPoly, Rational, Registry, VarId};
use algprog::resultant::{resultant, resultant_degree_bound, PolyMatrix};
use algprog::verify::{count_real_roots, isolate_real_roots, UniPoly};
use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use proptest::prelude::*;
use proptest::test_runner::TestCaseError;

type Check = Result<(), TestCaseError>;

fn q(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

fn xy() -> (VarId, VarId) {
    let reg = Registry::with_vars(&["x", "y"]);
    (reg.lookup("x").unwrap(), reg.lookup("y").unwrap())
}

/// Integer coefficients in ascending degree with a nonzero leading one.
pub fn int_coeffs(min_degree: usize, max_degree: usize) -> impl Strategy<Value = Vec<i64>> {
    (prop::collection::vec(-6i64..=6, min_degree..=max_degree), (1i64..=6), any::<bool>()).prop_map(|(mut c, lead, neg)| {
        c.push(if neg { -lead } else { lead });
        c
    })
}

fn uni(c: &[i64]) -> UniPoly {
    UniPoly::from_ints(c)
}

fn as_multi(c: &[i64], v: VarId) -> MultiPoly {
    let coeffs: Vec<Rational> = c.iter().map(|&k| q(k, 1)).collect();
    MultiPoly::from_univariate(v, &coeffs)
}

fn mul_ints(a: &[i64], b: &[i64]) -> Vec<i64> {
    let mut out = vec![0; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Pairs `(a·c, b·c)` of degree 1 to 5; a nonconstant `c` forces a common
/// root.
pub fn resultant_pair() -> impl Strategy<Value = (Vec<i64>, Vec<i64>)> {
    (int_coeffs(1, 3), int_coeffs(1, 3), int_coeffs(0, 2)).prop_map(|(a, b, c)| (mul_ints(&a, &c), mul_ints(&b, &c)))
}

/// `res_x(p, q) = 0` exactly when `p` and `q` share a complex root, that
/// is, when their gcd is nonconstant.
pub fn common_root_law(p: &[i64], q: &[i64]) -> Check {
    let (x, _) = xy();
    let r = resultant(&as_multi(p, x), &as_multi(q, x), x).map_err(|e| TestCaseError::fail(e.to_string()))?;
    prop_assert!(r.is_constant(), "resultant still depends on x");
    let shared = uni(p).gcd(&uni(q)).degree() >= 1;
    prop_assert_eq!(r.is_zero(), shared, "p = {:?}, q = {:?}", p, q);
    Ok(())
}

/// Sparse bivariate polynomial terms `(coefficient, deg_x, deg_y)`.
pub fn bivariate_terms() -> impl Strategy<Value = Vec<(i64, u32, u32)>> {
    prop::collection::vec((-5i64..=5, 0u32..=3, 0u32..=3), 1..=5)
}

pub fn bivariate(terms: &[(i64, u32, u32)]) -> MultiPoly {
    let (x, y) = xy();
    MultiPoly::from_terms(
        terms
            .iter()
            .map(|&(c, a, b)| (Monomial::from_pairs(vec![(x, a), (y, b)]), q(c, 1))),
    )
}

/// Degree of `res_x(p, q)` in `y` is at most `d_{p,y} d_{q,x} + d_{p,x} d_{q,y}`.
pub fn degree_law(p: &MultiPoly, q: &MultiPoly) -> Check {
    let (x, y) = xy();
    if p.deg(x) == 0 || q.deg(x) == 0 {
        return Ok(());
    }
    let bound = (p.deg(y) * q.deg(x) + p.deg(x) * q.deg(y)) as u64;
    prop_assert_eq!(resultant_degree_bound(p, q, x, y).unwrap(), bound);
    let r = resultant(p, q, x).map_err(|e| TestCaseError::fail(e.to_string()))?;
    prop_assert!(!r.contains_var(x));
    prop_assert!(r.deg(y) as u64 <= bound, "degree {} exceeds bound {}", r.deg(y), bound);
    Ok(())
}

fn cofactor_det(m: &[Vec<MultiPoly>]) -> MultiPoly {
    let n = m.len();
    if n == 0 {
        return MultiPoly::one();
    }
    let mut acc = MultiPoly::zero();
    for j in 0..n {
        let minor: Vec<Vec<MultiPoly>> = m[1..]
            .iter()
            .map(|row| row.iter().enumerate().filter(|&(k, _)| k != j).map(|(_, e)| e.clone()).collect())
            .collect();
        let term = &m[0][j] * &cofactor_det(&minor);
        acc = if j % 2 == 0 { &acc + &term } else { &acc - &term };
    }
    acc
}

type Entries = Vec<Vec<Vec<(i64, u32, u32)>>>;

/// Square matrices up to 5×5 with small bivariate entries.
pub fn poly_matrix() -> impl Strategy<Value = Entries> {
    (1usize..=5).prop_flat_map(|n| {
        let entry = prop::collection::vec((-3i64..=3, 0u32..=1, 0u32..=1), 0..=2);
        prop::collection::vec(prop::collection::vec(entry, n), n)
    })
}

/// The fraction-free determinant equals the cofactor expansion.
pub fn bareiss_matches_cofactor(entries: &Entries) -> Check {
    let rows: Vec<Vec<MultiPoly>> = entries.iter().map(|r| r.iter().map(|t| bivariate(t)).collect()).collect();
    let m = PolyMatrix::from_rows(rows.clone()).map_err(|e| TestCaseError::fail(e.to_string()))?;
    let det = m.det().map_err(|e| TestCaseError::fail(e.to_string()))?;
    prop_assert_eq!(det, cofactor_det(&rows));
    Ok(())
}

/// Rational coefficients `n/d` for a polynomial of degree 1 to 6.
pub fn rational_coeffs() -> impl Strategy<Value = Vec<(i64, i64)>> {
    (1usize..=6).prop_flat_map(|d| {
        (prop::collection::vec((-9i64..=9, 1i64..=4), d), (1i64..=9, 1i64..=4), any::<bool>()).prop_map(
            |(mut c, (n, den), neg)| {
                c.push((if neg { -n } else { n }, den));
                c
            },
        )
    })
}

fn horner(c: &[Rational], x: &Rational) -> Rational {
    c.iter().rev().fold(Rational::zero(), |acc, k| acc * x + k)
}

fn sign_of(r: &Rational) -> i8 {
    if r.is_zero() {
        0
    } else if r.is_positive() {
        1
    } else {
        -1
    }
}

/// Every full derivative sign vector is realized on a contiguous run of
/// grid points.
pub fn thom_interval_property(coeffs: &[(i64, i64)]) -> Check {
    let mut tower: Vec<Vec<Rational>> = vec![coeffs.iter().map(|&(n, d)| q(n, d)).collect()];
    while tower.last().unwrap().len() > 1 {
        let last = tower.last().unwrap();
        let next = last.iter().enumerate().skip(1).map(|(i, c)| c * q(i as i64, 1)).collect();
        tower.push(next);
    }
    let mut runs: BTreeMap<Vec<i8>, (i64, i64, usize)> = BTreeMap::new();
    for k in -640i64..=640 {
        let x = q(k, 64);
        let sv: Vec<i8> = tower.iter().map(|p| sign_of(&horner(p, &x))).collect();
        let e = runs.entry(sv).or_insert((k, k, 0));
        e.1 = k;
        e.2 += 1;
    }
    for (sv, (first, last, count)) in runs {
        prop_assert_eq!(
            (last - first + 1) as usize,
            count,
            "sign vector {:?} is not contiguous on the grid",
            sv
        );
    }
    Ok(())
}

/// Distinct rational roots, a nonzero scale and an optional factor without
/// real roots.
pub fn constructed_roots() -> impl Strategy<Value = (Vec<(i64, i64)>, i64, bool)> {
    (
        prop::collection::vec((-24i64..=24, 1i64..=6), 1..=6),
        prop_oneof![-5i64..=-1, 1i64..=5],
        any::<bool>(),
    )
}

/// Sturm isolation finds exactly the known roots, one per interval, in
/// increasing order.
pub fn sturm_finds_constructed_roots(roots: &[(i64, i64)], scale: i64, extra: bool) -> Check {
    let mut rs: Vec<Rational> = roots.iter().map(|&(n, d)| q(n, d)).collect();
    rs.sort();
    rs.dedup();
    let mut p = UniPoly::from_roots(&rs).mul(&UniPoly::from_ints(&[scale]));
    if extra {
        p = p.mul(&UniPoly::from_ints(&[1, 0, 1]));
    }
    prop_assert_eq!(count_real_roots(&p).unwrap(), rs.len());
    let iso = isolate_real_roots(&p).unwrap();
    prop_assert_eq!(iso.roots.len(), rs.len());
    for (r, iv) in rs.iter().zip(&iso.roots) {
        if iv.is_exact() {
            prop_assert_eq!(&iv.lo, r);
        } else {
            prop_assert!(&iv.lo < r && r < &iv.hi, "{} not inside ({}, {})", r, iv.lo, iv.hi);
        }
    }
    for w in iso.roots.windows(2) {
        prop_assert!(w[0].hi <= w[1].lo, "intervals overlap");
    }
    prop_assert!(iso.poly.coeffs().last().is_some_and(|c| !c.is_zero()));
    Ok(())
}
