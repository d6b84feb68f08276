//! Sylvester matrices and resultants by fraction-free elimination.

use crate::error::{Error, Result};
use crate::par;
use crate::poly::{MultiPoly, VarId};

/// Dense matrix with polynomial entries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Vec<MultiPoly>>,
}

impl PolyMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        PolyMatrix {
            rows,
            cols,
            entries: vec![vec![MultiPoly::zero(); cols]; rows],
        }
    }

    pub fn from_rows(entries: Vec<Vec<MultiPoly>>) -> Result<Self> {
        let rows = entries.len();
        let cols = entries.first().map_or(0, Vec::len);
        if rows == 0 || entries.iter().any(|r| r.len() != cols) {
            return Err(Error::Structural("ragged or empty matrix".into()));
        }
        Ok(PolyMatrix { rows, cols, entries })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &MultiPoly {
        &self.entries[i][j]
    }

    pub fn set(&mut self, i: usize, j: usize, p: MultiPoly) {
        self.entries[i][j] = p;
    }

    /// Determinant by Bareiss fraction-free elimination; every division is
    /// exact. Pivots are chosen by fewest terms to limit expression swell.
    pub fn det(&self) -> Result<MultiPoly> {
        if self.rows != self.cols {
            return Err(Error::Structural("determinant of a non-square matrix".into()));
        }
        let n = self.rows;
        let mut m = self.entries.clone();
        let mut negate = false;
        let mut prev = MultiPoly::one();
        for k in 0..n.saturating_sub(1) {
            let pivot = (k..n)
                .filter(|&i| !m[i][k].is_zero())
                .min_by_key(|&i| m[i][k].num_terms());
            let Some(p) = pivot else {
                return Ok(MultiPoly::zero());
            };
            if p != k {
                m.swap(p, k);
                negate = !negate;
            }
            let (head, tail) = m.split_at_mut(k + 1);
            let pivot_row = &head[k];
            let updated: Vec<Result<Vec<MultiPoly>>> = par::map(tail, |row| {
                let mut out = row.clone();
                for j in k + 1..n {
                    let num = &(&pivot_row[k] * &row[j]) - &(&row[k] * &pivot_row[j]);
                    out[j] = num.div_exact(&prev).ok_or_else(|| {
                        Error::Internal("Bareiss division was not exact".into())
                    })?;
                }
                out[k] = MultiPoly::zero();
                Ok(out)
            });
            for (row, new) in tail.iter_mut().zip(updated) {
                *row = new?;
            }
            prev = m[k][k].clone();
        }
        let d = m[n - 1][n - 1].clone();
        Ok(if negate { -d } else { d })
    }
}

/// Sylvester matrix of `p` (degree d) and `q` (degree e) in `v`: e shifted
/// copies of p's coefficients followed by d shifted copies of q's, in the
/// basis `v^(d+e-1), …, v, 1`.
pub fn sylvester_matrix(p: &MultiPoly, q: &MultiPoly, v: VarId) -> Result<PolyMatrix> {
    let d = p.degree_in(v);
    let e = q.degree_in(v);
    if d < 1 || e < 1 {
        return Err(Error::Structural(format!(
            "Sylvester matrix needs positive degrees in the elimination variable (got {d} and {e})"
        )));
    }
    let (d, e) = (d as usize, e as usize);
    let n = d + e;
    let pc = p.coeffs_in(v);
    let qc = q.coeffs_in(v);
    let mut m = PolyMatrix::zeros(n, n);
    for r in 0..e {
        for (k, c) in pc.iter().rev().enumerate() {
            m.set(r, r + k, c.clone());
        }
    }
    for r in 0..d {
        for (k, c) in qc.iter().rev().enumerate() {
            m.set(e + r, r + k, c.clone());
        }
    }
    Ok(m)
}

/// `res_v(p, q) = det(Syl_v(p, q))`, a polynomial free of `v`.
pub fn resultant(p: &MultiPoly, q: &MultiPoly, v: VarId) -> Result<MultiPoly> {
    let r = sylvester_matrix(p, q, v)?.det()?;
    debug_assert!(!r.contains_var(v));
    Ok(r)
}

/// Upper bound on the degree of `res_v(p, q)` in `w`:
/// `deg_w(p)·deg_v(q) + deg_v(p)·deg_w(q)`.
pub fn resultant_degree_bound(p: &MultiPoly, q: &MultiPoly, v: VarId, w: VarId) -> Result<u64> {
    if v == w {
        return Err(Error::Structural(
            "degree bound variable must differ from the elimination variable".into(),
        ));
    }
    let (pw, pv) = (p.deg(w) as u64, p.deg(v) as u64);
    let (qw, qv) = (q.deg(w) as u64, q.deg(v) as u64);
    Ok(pw * qv + pv * qw)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{rat, Registry};

    #[test]
    fn sylvester_layout() {
        let mut reg = Registry::new();
        let x = MultiPoly::var(reg.var("x"));
        let zv = reg.var("z");
        let z = MultiPoly::var(zv);
        let p = &z.pow(2) - &x;
        let q = z.scale(&rat(2));
        let m = sylvester_matrix(&p, &q, zv).unwrap();
        let c = MultiPoly::int;
        let expect = PolyMatrix::from_rows(vec![
            vec![c(1), c(0), -&x],
            vec![c(2), c(0), c(0)],
            vec![c(0), c(2), c(0)],
        ])
        .unwrap();
        assert_eq!(m, expect);

        let [a, b, cc, d] = ["a", "b", "c", "d"].map(|n| MultiPoly::var(reg.var(n)));
        let m = sylvester_matrix(&(&(&a * &z) + &b), &(&(&cc * &z) + &d), zv).unwrap();
        assert_eq!(m, PolyMatrix::from_rows(vec![vec![a, b], vec![cc, d]]).unwrap());

        let big = sylvester_matrix(&z.pow(2), &z.pow(3), zv).unwrap();
        assert_eq!((big.rows(), big.cols()), (5, 5));
        assert!(sylvester_matrix(&x, &z, zv).is_err());
    }

    #[test]
    fn sqrt_discriminant() {
        let mut reg = Registry::new();
        let x = MultiPoly::var(reg.var("x"));
        let zv = reg.var("z");
        let z = MultiPoly::var(zv);
        let r = resultant(&(&z.pow(2) - &x), &z.scale(&rat(2)), zv).unwrap();
        assert_eq!(r, x.scale(&rat(-4)));
    }

    #[test]
    fn eliminate_linear_variable() {
        let mut reg = Registry::new();
        let x = MultiPoly::var(reg.var("x"));
        let z = MultiPoly::var(reg.var("z"));
        let tv = reg.var("t");
        let t = MultiPoly::var(tv);
        let r = resultant(&(&z - &t), &(&t.pow(2) - &x), tv).unwrap();
        assert_eq!(r.normalized(None), (&z.pow(2) - &x).normalized(None));
    }

    #[test]
    fn degree_bound_formula() {
        let mut reg = Registry::new();
        let xv = reg.var("x");
        let zv = reg.var("z");
        let (x, z) = (MultiPoly::var(xv), MultiPoly::var(zv));
        let p = &z.pow(2) - &x;
        let q = z.scale(&rat(2));
        assert_eq!(resultant_degree_bound(&p, &q, zv, xv).unwrap(), 1);
        assert_eq!(resultant(&p, &q, zv).unwrap().degree_in(xv), 1);
        assert_eq!(resultant_degree_bound(&z, &z.pow(2), zv, xv).unwrap(), 0);
        assert!(resultant_degree_bound(&p, &q, zv, zv).is_err());
    }
}
