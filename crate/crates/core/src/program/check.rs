use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{AlgebraicProgram, PolynomialProgram, ReformulationResult};
use crate::error::{Error, Result};
use crate::expr::{eval_numeric, eval_poly_interval, Interval, NumericValue, RadicalExpr};
use crate::isolation::{point_to_text, Relation};
use crate::par;
use crate::poly::{Point, Rational, VarId};
use crate::verify::{CheckRecord, Report, Status, VerifyConfig};

const ROUNDS: u32 = 4;

// Truth of `value rel 0` from an enclosure, or `None` if undecided. An
// equality holds when the enclosure contains zero: the only equalities here
// are exact zeros or defining polynomials evaluated at their root.
fn decide(iv: &Interval, rel: Relation) -> Option<bool> {
    match (iv.sign(), rel) {
        (Some(s), r) => Some(r.holds(s)),
        (None, Relation::Eq) => Some(true),
        (None, Relation::Ne) => Some(false),
        (None, _) => None,
    }
}

fn eval_real(e: &RadicalExpr, a: &Point, bits: u32) -> Result<Option<Interval>> {
    match eval_numeric(e, a, bits) {
        Ok(NumericValue::Real(i)) => Ok(Some(i)),
        Ok(NumericValue::NotReal) | Err(Error::Domain(_)) | Err(Error::Precision(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

struct Outcome {
    feasible: bool,
    objective: Interval,
}

fn original_at(prog: &AlgebraicProgram, a: &Point, bits: u32) -> Result<Option<Outcome>> {
    let Some(objective) = eval_real(&prog.objective, a, bits)? else {
        return Ok(None);
    };
    let mut feasible = true;
    for c in &prog.constraints {
        let Some(iv) = eval_real(&c.expr, a, bits)? else {
            return Ok(None);
        };
        match decide(&iv, c.rel) {
            Some(t) => feasible &= t,
            None => return Ok(None),
        }
    }
    Ok(Some(Outcome { feasible, objective }))
}

fn program_at(p: &PolynomialProgram, a: &Point, bits: u32) -> Result<Option<Outcome>> {
    let mut env: BTreeMap<VarId, Interval> = a.iter().map(|(v, q)| (*v, Interval::point(q.clone()))).collect();
    for (v, e) in &p.provenance {
        match eval_real(e, a, bits)? {
            Some(iv) => env.insert(*v, iv),
            None => return Ok(None),
        };
    }
    let mut feasible = true;
    for c in &p.constraints {
        match decide(&eval_poly_interval(&c.poly, &env)?, c.rel) {
            Some(t) => feasible &= t,
            None => return Ok(None),
        }
    }
    Ok(Some(Outcome {
        feasible,
        objective: eval_poly_interval(&p.objective, &env)?,
    }))
}

// Evaluate with doubling precision until both sides are decided.
fn compare(prog: &AlgebraicProgram, p: &PolynomialProgram, a: &Point, bits: u32) -> Result<Option<(Outcome, Outcome)>> {
    let mut b = bits;
    for _ in 0..ROUNDS {
        if let (Some(o), Some(c)) = (original_at(prog, a, b)?, program_at(p, a, b)?) {
            return Ok(Some((o, c)));
        }
        b = b.saturating_mul(2);
    }
    Ok(None)
}

fn near(center: &Point, vars: &[VarId], radius: i64, rng: &mut ChaCha8Rng) -> Point {
    const GRAIN: i64 = 1 << 20;
    vars.iter()
        .map(|&v| {
            let c = center.get(&v).cloned().unwrap_or_default();
            let k = rng.gen_range(-GRAIN..=GRAIN);
            (v, c + Rational::new((k * radius).into(), GRAIN.into()))
        })
        .collect()
}

enum Verdict {
    Agree,
    Feasibility(Point),
    Objective(Point),
}

fn check_child(
    prog: &AlgebraicProgram,
    child: &PolynomialProgram,
    others: &[&PolynomialProgram],
    cfg: &VerifyConfig,
    seed: u64,
) -> Result<(usize, Option<Verdict>)> {
    let vars: Vec<VarId> = prog.variables.vars().collect();
    let want = cfg.samples.max(1);
    let mut used = par::sample_until(want * 8, want, |i| -> Result<Option<Verdict>> {
        let mut rng = ChaCha8Rng::seed_from_u64(par::derive_seed(seed, i as u64));
        let a = if i == 0 && !child.sample.is_empty() {
            child.sample.clone()
        } else {
            near(&child.sample, &vars, cfg.radius, &mut rng)
        };
        for c in &child.component {
            if !c.holds_at(&a)? {
                return Ok(None);
            }
        }
        let Some((orig, ours)) = compare(prog, child, &a, cfg.precision)? else {
            return Ok(None);
        };
        if orig.feasible != ours.feasible {
            return Ok(Some(Verdict::Feasibility(a)));
        }
        if !orig.objective.overlaps(&ours.objective) {
            return Ok(Some(Verdict::Objective(a)));
        }
        for o in others {
            match compare(prog, o, &a, cfg.precision)? {
                Some((_, theirs)) if theirs.feasible != orig.feasible => return Ok(Some(Verdict::Feasibility(a))),
                _ => {}
            }
        }
        Ok(Some(Verdict::Agree))
    }, |v| !matches!(v, Verdict::Agree))?;
    let n = used.len();
    let bad = used.pop().filter(|v| !matches!(v, Verdict::Agree));
    Ok((n, bad))
}

/// Substitution soundness of each child: at random points of its component
/// where every radical is real, substituting the auxiliary values gives the
/// original feasibility and objective value. With `baseline`, its feasibility
/// must agree as well.
pub fn verify_reformulation(
    prog: &AlgebraicProgram,
    result: &ReformulationResult,
    baseline: Option<&PolynomialProgram>,
    cfg: &VerifyConfig,
) -> Result<Report> {
    let others: Vec<&PolynomialProgram> = baseline.into_iter().collect();
    let mut report = Report::default();
    for (k, child) in result.children.iter().enumerate() {
        let (n, bad) = check_child(prog, child, &others, cfg, par::derive_seed(cfg.seed, k as u64))?;
        let witness = match &bad {
            Some(Verdict::Feasibility(a)) => Some(format!("feasibility differs at {}", point_to_text(a, &prog.variables))),
            Some(Verdict::Objective(a)) => Some(format!("objective differs at {}", point_to_text(a, &prog.variables))),
            _ if n == 0 => Some("no admissible sample point".into()),
            _ => None,
        };
        report.records.push(CheckRecord {
            check: format!("substitution:{}", child.label),
            status: if witness.is_none() { Status::Pass } else { Status::Fail },
            witness,
            widest_interval: None,
            samples_used: n,
        });
    }
    Ok(report)
}
