use std::collections::{BTreeMap, BTreeSet};

use num_traits::Zero;

use super::extract::skeleton;
use super::{extract_algebraic_parts, AlgebraicProgram, DensityNote, PolynomialProgram, ReformulationResult};
use crate::defpoly::{defining_polynomial, ReduceConfig};
use crate::error::{Error, Result};
use crate::expr::{distinct_radicals, RadicalExpr};
use crate::isolation::{
    certified_nonnegative, isolate, merge_components, CertificateEntry, IsolateConfig, IsolationCertificate,
    MergeConfig, Relation, SignCondition, Strategy,
};
use crate::par;
use crate::poly::{MultiPoly, Point, Registry, VarId};

#[derive(Debug, Clone)]
pub struct ReformulateConfig {
    pub reduce: ReduceConfig,
    pub isolate: IsolateConfig,
    /// Merge certificate components before building children.
    pub merge: Option<MergeConfig>,
    pub max_children: usize,
}

impl Default for ReformulateConfig {
    fn default() -> Self {
        ReformulateConfig {
            reduce: ReduceConfig::default(),
            isolate: IsolateConfig::default(),
            merge: None,
            max_children: 64,
        }
    }
}

fn push_unique(out: &mut Vec<SignCondition>, c: SignCondition) {
    if !out.contains(&c) {
        out.push(c);
    }
}

fn used_vars(reg: &Registry, keep: impl Fn(VarId) -> bool) -> Vec<VarId> {
    reg.vars().filter(|&v| keep(v)).collect()
}

fn baseline_count(prog: &AlgebraicProgram) -> usize {
    prog.expressions()
        .flat_map(distinct_radicals)
        .collect::<BTreeSet<_>>()
        .len()
}

/// Replace each algebraic part by one auxiliary variable, isolate its branch,
/// and emit one polynomial program per combination of certificate entries.
pub fn reformulate(prog: &AlgebraicProgram, strategy: &Strategy, cfg: &ReformulateConfig) -> Result<ReformulationResult> {
    let mut reg = prog.variables.clone();
    let original = reg.len();
    let parts = extract_algebraic_parts(prog)?;
    let zs: Vec<VarId> = (0..parts.len())
        .map(|i| {
            if parts.len() == 1 {
                reg.fresh("z")
            } else {
                reg.fresh(&format!("z{}", i + 1))
            }
        })
        .collect();
    let mut warnings = Vec::new();
    let mut certs: Vec<IsolationCertificate> = Vec::with_capacity(parts.len());
    for (part, &z) in parts.iter().zip(&zs) {
        let dp = defining_polynomial(&part.expr, z, &mut reg, &cfg.reduce)?;
        let mut cert = isolate(&part.expr, &dp, strategy, &cfg.isolate)?;
        if let Some(m) = &cfg.merge {
            cert = merge_components(&part.expr, &cert, m)?;
        }
        if cert.entries.is_empty() {
            return Err(Error::Validation(format!(
                "no component where {} is real",
                part.expr.to_text(&reg)
            )));
        }
        warnings.extend(cert.warnings.iter().cloned());
        certs.push(cert);
    }

    let mut stand_in = |sub: &RadicalExpr| -> Result<MultiPoly> {
        let i = parts
            .iter()
            .position(|p| p.expr == *sub)
            .ok_or_else(|| Error::Internal("part vanished between passes".into()))?;
        Ok(MultiPoly::var(zs[i]))
    };
    let objective = skeleton(&prog.objective, &prog.groups, &mut stand_in)?;
    let constraints: Vec<SignCondition> = prog
        .constraints
        .iter()
        .map(|c| Ok(SignCondition::new(skeleton(&c.expr, &prog.groups, &mut stand_in)?, c.rel).canonical()))
        .collect::<Result<_>>()?;

    let count = certs
        .iter()
        .try_fold(1usize, |acc, c| acc.checked_mul(c.entries.len()))
        .unwrap_or(usize::MAX);
    if count > cfg.max_children {
        return Err(Error::Explosion {
            count,
            limit: cfg.max_children,
        });
    }
    let z_set: BTreeSet<VarId> = zs.iter().copied().collect();
    let variables = used_vars(&reg, |v| v.index() < original || z_set.contains(&v));
    let provenance: BTreeMap<VarId, RadicalExpr> =
        zs.iter().zip(&parts).map(|(z, p)| (*z, p.expr.clone())).collect();
    let children = par::map_range(count, |idx| {
        let mut rest = idx;
        let chosen: Vec<&CertificateEntry> = certs
            .iter()
            .map(|c| {
                let e = &c.entries[rest % c.entries.len()];
                rest /= c.entries.len();
                e
            })
            .collect();
        let mut conds = Vec::new();
        let mut component = Vec::new();
        let mut sample = Point::new();
        for e in &chosen {
            for c in &e.root_conditions {
                push_unique(&mut conds, c.clone());
            }
            for c in &e.component.conditions {
                push_unique(&mut conds, c.canonical());
                push_unique(&mut component, c.clone());
            }
            for (v, q) in &e.component.sample {
                sample.entry(*v).or_insert_with(|| q.clone());
            }
        }
        for c in &constraints {
            push_unique(&mut conds, c.clone());
        }
        PolynomialProgram {
            registry: reg.clone(),
            variables: variables.clone(),
            sense: prog.sense,
            objective: objective.clone(),
            constraints: conds,
            provenance: provenance.clone(),
            label: if chosen.is_empty() {
                "P".into()
            } else {
                chosen
                    .iter()
                    .map(|e| e.component.label.as_str())
                    .collect::<Vec<_>>()
                    .join(",")
            },
            component,
            sample,
        }
    });

    let density_note = if prog.constraints.iter().all(|c| c.rel.is_strict()) {
        DensityNote::OpenDenseCase
    } else if matches!(strategy, Strategy::Domain { .. }) {
        DensityNote::AssertedByUser
    } else {
        warnings.push(
            "non-strict constraints: density of the nonvanishing region in the feasible set is unchecked".into(),
        );
        DensityNote::Unchecked
    };
    Ok(ReformulationResult {
        children,
        aux_count_ours: parts.len(),
        aux_count_baseline: baseline_count(prog),
        density_note,
        warnings,
    })
}

// Expressions as fractions of polynomials once every root is replaced by
// its auxiliary variable.
struct Fractions<'a> {
    aux: &'a BTreeMap<RadicalExpr, VarId>,
}

impl Fractions<'_> {
    fn of(&self, e: &RadicalExpr) -> Result<(MultiPoly, MultiPoly)> {
        use RadicalExpr::*;
        Ok(match e {
            Const(c) => (MultiPoly::constant(c.clone()), MultiPoly::one()),
            Var(v) => (MultiPoly::var(*v), MultiPoly::one()),
            Root(..) => {
                let v = self
                    .aux
                    .get(e)
                    .ok_or_else(|| Error::Internal("radical without auxiliary variable".into()))?;
                (MultiPoly::var(*v), MultiPoly::one())
            }
            Add(a, b) | Sub(a, b) => {
                let (an, ad) = self.of(a)?;
                let (bn, bd) = self.of(b)?;
                let (l, r) = (&an * &bd, &bn * &ad);
                let n = if matches!(e, Add(..)) { &l + &r } else { &l - &r };
                simplify(n, &ad * &bd)?
            }
            Mul(a, b) => {
                let (an, ad) = self.of(a)?;
                let (bn, bd) = self.of(b)?;
                simplify(&an * &bn, &ad * &bd)?
            }
            Div(a, b) => {
                let (an, ad) = self.of(a)?;
                let (bn, bd) = self.of(b)?;
                if bn.is_zero() {
                    return Err(Error::Domain("division by zero".into()));
                }
                simplify(&an * &bd, &ad * &bn)?
            }
            Pow(..) => {
                return Err(Error::Structural(
                    "rational powers must be normalized before reformulation".into(),
                ))
            }
        })
    }
}

fn simplify(n: MultiPoly, d: MultiPoly) -> Result<(MultiPoly, MultiPoly)> {
    if let Some(c) = d.constant_value() {
        return Ok((n.scale(&c.recip()), MultiPoly::one()));
    }
    let g = crate::poly::gcd(&n, &d);
    if g.is_constant() {
        return Ok((n, d));
    }
    let n = n.div_exact(&g).ok_or_else(|| Error::Internal("gcd does not divide".into()))?;
    let d = d.div_exact(&g).ok_or_else(|| Error::Internal("gcd does not divide".into()))?;
    simplify(n, d)
}

const BASELINE_NAMES: [&str; 3] = ["u", "v", "w"];

/// One auxiliary variable per distinct radical: `w^r = radicand`, plus
/// `w >= 0` and `radicand >= 0` for even `r`. Denominators are cleared; a
/// denominator whose sign is not evident is asserted nonzero.
pub fn baseline_reformulate(prog: &AlgebraicProgram) -> Result<PolynomialProgram> {
    let mut reg = prog.variables.clone();
    let original = reg.len();
    let mut order: Vec<RadicalExpr> = Vec::new();
    for e in prog.expressions() {
        e.visit(&mut |n| {
            if matches!(n, RadicalExpr::Root(..)) && !order.contains(n) {
                order.push(n.clone());
            }
        });
    }
    let mut aux = BTreeMap::new();
    for (i, r) in order.iter().enumerate() {
        let name = if i < BASELINE_NAMES.len() {
            BASELINE_NAMES[i].to_string()
        } else {
            format!("w{}", i + 1 - BASELINE_NAMES.len())
        };
        aux.insert(r.clone(), reg.fresh(&name));
    }
    let mut nonneg: BTreeSet<VarId> = BTreeSet::new();
    for (r, v) in &aux {
        if let RadicalExpr::Root(k, _) = r {
            if k % 2 == 0 {
                nonneg.insert(*v);
            }
        }
    }
    let fr = Fractions { aux: &aux };
    let mut defs = Vec::new();
    let mut domain = Vec::new();
    let mut nonzero = Vec::new();
    // a sum of nonnegative terms with a positive constant term
    let positive = |d: &MultiPoly| {
        let constant = d.terms().find(|(m, _)| m.is_one()).map(|(_, c)| crate::poly::sign(c));
        match d.constant_value() {
            Some(c) => !c.is_zero(),
            None => constant == Some(1) && certified_nonnegative(d, &nonneg),
        }
    };
    // innermost radicals first
    for r in order.iter().rev() {
        let RadicalExpr::Root(k, inner) = r else { unreachable!() };
        let w = MultiPoly::var(aux[r]);
        let (n, d) = fr.of(inner)?;
        defs.push(SignCondition::new(&(&w.pow(*k) * &d) - &n, Relation::Eq).canonical());
        if !positive(&d) {
            nonzero.push(SignCondition::new(d.clone(), Relation::Ne).canonical());
        }
        if k % 2 == 0 {
            domain.push(SignCondition::new(w, Relation::Ge).canonical());
            let rad = &n * &d;
            if !certified_nonnegative(&rad, &nonneg) {
                domain.push(SignCondition::new(rad, Relation::Ge).canonical());
            }
        }
    }
    let mut provenance: BTreeMap<VarId, RadicalExpr> = aux.iter().map(|(r, v)| (*v, r.clone())).collect();
    let (on, od) = fr.of(&prog.objective)?;
    let objective = if od.is_one() {
        on
    } else {
        let t = reg.fresh("t");
        defs.push(SignCondition::new(&(&MultiPoly::var(t) * &od) - &on, Relation::Eq).canonical());
        nonzero.push(SignCondition::new(od, Relation::Ne).canonical());
        provenance.insert(t, prog.objective.clone());
        MultiPoly::var(t)
    };
    let mut originals = Vec::new();
    for c in &prog.constraints {
        let (n, d) = fr.of(&c.expr)?;
        if d.is_one() {
            originals.push(SignCondition::new(n, c.rel).canonical());
        } else {
            if !positive(&d) {
                nonzero.push(SignCondition::new(d.clone(), Relation::Ne).canonical());
            }
            originals.push(SignCondition::new(&n * &d, c.rel).canonical());
        }
    }
    // keep the original problem constraints ahead of the domain conditions
    let mut constraints = Vec::new();
    for c in defs.into_iter().rev().chain(originals).chain(domain).chain(nonzero) {
        push_unique(&mut constraints, c);
    }
    let aux_vars: BTreeSet<VarId> = provenance.keys().copied().collect();
    Ok(PolynomialProgram {
        variables: used_vars(&reg, |v| v.index() < original || aux_vars.contains(&v)),
        registry: reg,
        sense: prog.sense,
        objective,
        constraints,
        provenance,
        label: "baseline".into(),
        component: Vec::new(),
        sample: Point::new(),
    })
}
