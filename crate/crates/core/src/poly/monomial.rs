use std::cmp::Ordering;

use super::VarId;

/// Power product of variables; exponents sorted by variable, zeros never stored.
///
/// Ordering is graded lexicographic: total degree first, ties broken by the
/// exponent of the highest-indexed variable downward. Auxiliary variables
/// registered after the problem variables therefore lead.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Monomial(Vec<(VarId, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(v: VarId, e: u32) -> Self {
        if e == 0 {
            Self::one()
        } else {
            Monomial(vec![(v, e)])
        }
    }

    pub fn from_pairs(mut pairs: Vec<(VarId, u32)>) -> Self {
        pairs.sort_by_key(|p| p.0);
        let mut out: Vec<(VarId, u32)> = Vec::with_capacity(pairs.len());
        for (v, e) in pairs {
            match out.last_mut() {
                Some(last) if last.0 == v => last.1 += e,
                _ => out.push((v, e)),
            }
        }
        out.retain(|p| p.1 > 0);
        Monomial(out)
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn exponent(&self, v: VarId) -> u32 {
        self.0
            .binary_search_by_key(&v, |p| p.0)
            .map(|i| self.0[i].1)
            .unwrap_or(0)
    }

    pub fn total_degree(&self) -> u32 {
        self.0.iter().map(|p| p.1).sum()
    }

    pub fn pairs(&self) -> &[(VarId, u32)] {
        &self.0
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let (a, b) = (&self.0, &other.0);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                Ordering::Equal => {
                    out.push((a[i].0, a[i].1 + b[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Monomial(out)
    }

    /// `self / other` if `other` divides `self`.
    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        let mut out = Vec::with_capacity(self.0.len());
        let mut j = 0;
        for &(v, e) in &self.0 {
            if j < other.0.len() && other.0[j].0 < v {
                return None;
            }
            if j < other.0.len() && other.0[j].0 == v {
                let d = other.0[j].1;
                if d > e {
                    return None;
                }
                if e > d {
                    out.push((v, e - d));
                }
                j += 1;
            } else {
                out.push((v, e));
            }
        }
        if j < other.0.len() {
            return None;
        }
        Some(Monomial(out))
    }

    /// Remove variable `v`, returning its exponent and the rest.
    pub fn split_off(&self, v: VarId) -> (u32, Monomial) {
        let mut rest = self.0.clone();
        match rest.binary_search_by_key(&v, |p| p.0) {
            Ok(i) => {
                let e = rest.remove(i).1;
                (e, Monomial(rest))
            }
            Err(_) => (0, Monomial(rest)),
        }
    }

    /// Pure lexicographic comparison with `main` most significant, then
    /// remaining variables by decreasing index.
    pub fn cmp_lex(&self, other: &Monomial, main: Option<VarId>) -> Ordering {
        if let Some(m) = main {
            let c = self.exponent(m).cmp(&other.exponent(m));
            if c != Ordering::Equal {
                return c;
            }
        }
        cmp_from_top(&self.0, &other.0)
    }
}

// compare exponent vectors starting at the highest variable index
fn cmp_from_top(a: &[(VarId, u32)], b: &[(VarId, u32)]) -> Ordering {
    let (mut i, mut j) = (a.len(), b.len());
    loop {
        match (i, j) {
            (0, 0) => return Ordering::Equal,
            (0, _) => return Ordering::Less,
            (_, 0) => return Ordering::Greater,
            _ => {}
        }
        let (va, ea) = a[i - 1];
        let (vb, eb) = b[j - 1];
        match va.cmp(&vb) {
            Ordering::Greater => return Ordering::Greater,
            Ordering::Less => return Ordering::Less,
            Ordering::Equal => match ea.cmp(&eb) {
                Ordering::Equal => {
                    i -= 1;
                    j -= 1;
                }
                c => return c,
            },
        }
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.total_degree()
            .cmp(&other.total_degree())
            .then_with(|| cmp_from_top(&self.0, &other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const X: VarId = VarId(0);
    const Z: VarId = VarId(1);

    fn m(x: u32, z: u32) -> Monomial {
        Monomial::from_pairs(vec![(X, x), (Z, z)])
    }

    #[test]
    fn grlex_puts_later_variables_first() {
        // x*z^3 > x^2*z^2 (same degree, more z) and x^2*z > x^3
        assert!(m(1, 3) > m(2, 2));
        assert!(m(2, 1) > m(3, 0));
        assert!(m(0, 6) > m(1, 4));
        assert!(m(0, 0) < m(1, 0));
    }

    #[test]
    fn mul_and_div_are_inverse() {
        let a = m(2, 1);
        let b = m(1, 3);
        let p = a.mul(&b);
        assert_eq!(p, m(3, 4));
        assert_eq!(p.div(&b), Some(a.clone()));
        assert_eq!(a.div(&b), None);
        assert!(m(0, 0).is_one());
    }

    #[test]
    fn lex_with_main_variable() {
        assert_eq!(m(5, 1).cmp_lex(&m(0, 2), Some(Z)), Ordering::Less);
        assert_eq!(m(5, 1).cmp_lex(&m(0, 2), Some(X)), Ordering::Greater);
    }
}
