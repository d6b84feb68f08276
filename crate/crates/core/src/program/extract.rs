use crate::error::{Error, Result};
use crate::expr::{is_polynomial, RadicalExpr};
use crate::poly::MultiPoly;

use super::AlgebraicProgram;

/// A non-polynomial subexpression that gets one auxiliary variable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlgebraicPart {
    pub expr: RadicalExpr,
    /// `"objective"` or `"constraint[i]"`, once per occurrence.
    pub occurrences: Vec<String>,
}

fn flatten<'a>(e: &'a RadicalExpr, sign: i8, out: &mut Vec<(i8, &'a RadicalExpr)>) {
    match e {
        RadicalExpr::Add(a, b) => {
            flatten(a, sign, out);
            flatten(b, sign, out);
        }
        RadicalExpr::Sub(a, b) => {
            flatten(a, sign, out);
            flatten(b, -sign, out);
        }
        _ => out.push((sign, e)),
    }
}

// Find the terms of `group` among the unused `terms`, all with the same
// overall sign; marks them used and returns that sign.
fn match_group(terms: &[(i8, &RadicalExpr)], used: &mut [bool], group: &[(i8, &RadicalExpr)]) -> Option<i8> {
    for s in [1i8, -1] {
        let mut picked = Vec::with_capacity(group.len());
        for (gs, ge) in group {
            let hit = (0..terms.len()).find(|&i| {
                !used[i] && !picked.contains(&i) && terms[i].0 == s * gs && terms[i].1 == *ge
            });
            match hit {
                Some(i) => picked.push(i),
                None => break,
            }
        }
        if picked.len() == group.len() {
            for i in picked {
                used[i] = true;
            }
            return Some(s);
        }
    }
    None
}

/// Rewrite `e` as a polynomial, calling `part` on every maximal
/// non-polynomial subexpression (or group occurrence) to obtain its stand-in.
pub(crate) fn skeleton(
    e: &RadicalExpr,
    groups: &[RadicalExpr],
    part: &mut dyn FnMut(&RadicalExpr) -> Result<MultiPoly>,
) -> Result<MultiPoly> {
    if let Some(p) = is_polynomial(e) {
        return Ok(p);
    }
    if groups.contains(e) {
        return part(e);
    }
    match e {
        RadicalExpr::Add(..) | RadicalExpr::Sub(..) => {
            let mut terms = Vec::new();
            flatten(e, 1, &mut terms);
            let mut used = vec![false; terms.len()];
            let mut acc = MultiPoly::zero();
            for g in groups {
                let mut gt = Vec::new();
                flatten(g, 1, &mut gt);
                if gt.len() < 2 {
                    continue;
                }
                while let Some(s) = match_group(&terms, &mut used, &gt) {
                    let stand_in = part(g)?;
                    acc = if s > 0 { &acc + &stand_in } else { &acc - &stand_in };
                }
            }
            for (i, (s, t)) in terms.iter().enumerate() {
                if !used[i] {
                    let p = skeleton(t, groups, part)?;
                    acc = if *s > 0 { &acc + &p } else { &acc - &p };
                }
            }
            Ok(acc)
        }
        RadicalExpr::Mul(a, b) => Ok(&skeleton(a, groups, part)? * &skeleton(b, groups, part)?),
        RadicalExpr::Div(a, b) => match is_polynomial(b).and_then(|d| d.constant_value()) {
            Some(c) if !num_traits::Zero::is_zero(&c) => Ok(skeleton(a, groups, part)?.scale(&c.recip())),
            _ => part(e),
        },
        RadicalExpr::Root(..) => part(e),
        RadicalExpr::Pow(..) => Err(Error::Structural(
            "rational powers must be normalized before extraction".into(),
        )),
        RadicalExpr::Const(_) | RadicalExpr::Var(_) => Err(Error::Internal("leaf is always polynomial".into())),
    }
}

/// Maximal non-polynomial subexpressions of the objective and constraints,
/// deduplicated, in order of first occurrence. Group hints take precedence.
pub fn extract_algebraic_parts(prog: &AlgebraicProgram) -> Result<Vec<AlgebraicPart>> {
    let mut parts: Vec<AlgebraicPart> = Vec::new();
    for (k, e) in prog.expressions().enumerate() {
        let pos = if k == 0 {
            "objective".to_string()
        } else {
            format!("constraint[{}]", k - 1)
        };
        skeleton(e, &prog.groups, &mut |sub| {
            match parts.iter_mut().find(|p| p.expr == *sub) {
                Some(p) => p.occurrences.push(pos.clone()),
                None => parts.push(AlgebraicPart {
                    expr: sub.clone(),
                    occurrences: vec![pos.clone()],
                }),
            }
            Ok(MultiPoly::zero())
        })?;
    }
    Ok(parts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;
    use crate::poly::Registry;
    use crate::program::{Constraint, Sense};
    use crate::isolation::Relation;

    fn program(obj: &str, cons: &[&str], groups: &[&str]) -> AlgebraicProgram {
        let mut reg = Registry::with_vars(&["x", "y"]);
        let objective = parse(obj, &mut reg).unwrap();
        let constraints = cons
            .iter()
            .map(|c| Constraint {
                expr: parse(c, &mut reg).unwrap(),
                rel: Relation::Ge,
            })
            .collect();
        let groups = groups.iter().map(|g| parse(g, &mut reg).unwrap()).collect();
        AlgebraicProgram::new(reg, Sense::Min, objective, constraints, groups).unwrap()
    }

    fn texts(p: &AlgebraicProgram, parts: &[AlgebraicPart]) -> Vec<String> {
        parts.iter().map(|a| a.expr.to_text(&p.variables)).collect()
    }

    #[test]
    fn maximal_parts() {
        let p = program("x^2 - sqrt(x - 1) - sqrt(y - 1)", &["x - 1", "y - 1"], &[]);
        let parts = extract_algebraic_parts(&p).unwrap();
        assert_eq!(parts.len(), 2);
        let p = program("x^2 - sqrt(x - 1) - sqrt(y - 1)", &["x - 1"], &["sqrt(x - 1) + sqrt(y - 1)"]);
        let parts = extract_algebraic_parts(&p).unwrap();
        assert_eq!(parts.len(), 1);
        assert_eq!(parts[0].occurrences, vec!["objective"]);
        let p = program("(1 - x)^2 + sqrt(x^2 + sqrt(y^2 + 1))", &[], &[]);
        let parts = extract_algebraic_parts(&p).unwrap();
        assert_eq!(texts(&p, &parts).len(), 1);
        assert!(parts[0].expr.contains_root());
        let p = program("x*y + 3", &["x - y/2"], &[]);
        assert!(extract_algebraic_parts(&p).unwrap().is_empty());
    }

    #[test]
    fn shared_parts_and_divisions() {
        let p = program("sqrt(x) + x/y", &["2 - sqrt(x)"], &[]);
        let parts = extract_algebraic_parts(&p).unwrap();
        assert_eq!(parts.len(), 2);
        let root = parts.iter().find(|a| matches!(a.expr, RadicalExpr::Root(..))).unwrap();
        assert_eq!(root.occurrences, vec!["objective", "constraint[0]"]);
        assert!(parts.iter().any(|a| matches!(a.expr, RadicalExpr::Div(..))));
    }

    #[test]
    fn group_matches_with_sign() {
        let p = program("x - sqrt(x) - sqrt(y)", &[], &["sqrt(x) + sqrt(y)"]);
        let mut stand_ins = 0;
        let s = skeleton(&p.objective, &p.groups, &mut |_| {
            stand_ins += 1;
            Ok(MultiPoly::int(10))
        })
        .unwrap();
        assert_eq!(stand_ins, 1);
        let x = p.variables.lookup("x").unwrap();
        assert_eq!(s, &MultiPoly::var(x) - &MultiPoly::int(10));
    }
}
