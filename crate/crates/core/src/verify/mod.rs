//! Independent checks of defining polynomials and isolation certificates
//! using exact univariate root isolation.

mod sturm;

pub use sturm::{
    cauchy_bound, count_real_roots, count_roots_in, isolate_real_roots, sign_at_root, sturm_sequence, RootInterval,
    RootIsolation, UniPoly,
};

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::defpoly::{degree_bounds, DefiningPolynomial};
use crate::error::{Error, Result};
use crate::expr::{eval_numeric, eval_poly_interval, Interval, NumericValue, RadicalExpr};
use crate::isolation::{point_to_text, IsolationCertificate, SignCondition};
use crate::par;
use crate::poly::{fmt_rational, pow2_neg, MultiPoly, Point, Rational, Registry, VarId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub check: String,
    pub status: Status,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub widest_interval: Option<String>,
    pub samples_used: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub records: Vec<CheckRecord>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.records.iter().all(|r| r.status == Status::Pass)
    }

    pub fn extend(&mut self, other: Report) {
        self.records.extend(other.records);
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

#[derive(Debug, Clone)]
pub struct VerifyConfig {
    pub samples: usize,
    pub precision: u32,
    pub seed: u64,
    /// Half-width of the sampling box around each component sample.
    pub radius: i64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            samples: 128,
            precision: 64,
            seed: 0,
            radius: 2,
        }
    }
}

fn fmt_interval(i: &Interval) -> String {
    format!("[{}, {}]", fmt_rational(&i.lo), fmt_rational(&i.hi))
}

// Random point with coordinates drawn uniformly from a dyadic grid in the
// box `center ± radius`.
fn random_point(center: &Point, vars: &[VarId], radius: i64, rng: &mut ChaCha8Rng) -> Point {
    const GRAIN: i64 = 1 << 20;
    vars.iter()
        .map(|&v| {
            let c = center.get(&v).cloned().unwrap_or_default();
            let k = rng.gen_range(-GRAIN..=GRAIN);
            (v, c + Rational::new((k * radius).into(), GRAIN.into()))
        })
        .collect()
}

fn random_sample_box(vars: &[VarId], radius: i64, rng: &mut ChaCha8Rng) -> Point {
    vars.iter()
        .map(|&v| {
            let n = rng.gen_range(-radius * 8..=radius * 8);
            let d = rng.gen_range(1..=8i64);
            (v, Rational::new(n.into(), d.into()))
        })
        .collect()
}

/// Enclosure of `q(f(a), a)`, refining `f` until its width is at most
/// `2^-bits` or the enclosure excludes zero.
pub fn residual(q: &MultiPoly, f: &RadicalExpr, z: VarId, a: &Point, bits: u32) -> Result<Option<Interval>> {
    let target = pow2_neg(bits);
    let mut env: BTreeMap<VarId, Interval> =
        a.iter().map(|(v, c)| (*v, Interval::point(c.clone()))).collect();
    let mut prec = bits;
    let mut last = None;
    for _ in 0..6 {
        let fv = match eval_numeric(f, a, prec)? {
            NumericValue::Real(i) => i,
            NumericValue::NotReal => return Ok(None),
        };
        let exact = fv.is_exact();
        env.insert(z, fv);
        let r = eval_poly_interval(q, &env)?;
        if !r.contains_zero() || r.width() <= target || exact {
            return Ok(Some(r));
        }
        last = Some(r);
        prec = prec.saturating_mul(2);
    }
    Ok(last)
}

/// Check `dp.poly(f(a), a) = 0` at random real-valued rational points.
pub fn verify_defining(f: &RadicalExpr, dp: &DefiningPolynomial, cfg: &VerifyConfig, reg: &Registry) -> Result<Report> {
    let vars: Vec<VarId> = f.vars().into_iter().collect();
    let target = pow2_neg(cfg.precision);
    let outcomes = par::try_map_range(cfg.samples, |i| -> Result<Option<(Point, Interval)>> {
        let mut rng = ChaCha8Rng::seed_from_u64(par::derive_seed(cfg.seed, i as u64));
        for _ in 0..200 {
            let a = random_sample_box(&vars, 20 / 8 + 1, &mut rng);
            match residual(&dp.poly, f, dp.z, &a, cfg.precision) {
                Ok(Some(r)) => return Ok(Some((a, r))),
                Ok(None) | Err(Error::Domain(_)) | Err(Error::Precision(_)) => continue,
                Err(e) => return Err(e),
            }
        }
        Ok(None)
    })?;
    let found: Vec<(Point, Interval)> = outcomes.into_iter().flatten().collect();
    let mut record = CheckRecord {
        check: "defining_polynomial".into(),
        status: Status::Pass,
        witness: None,
        widest_interval: None,
        samples_used: found.len(),
    };
    if found.is_empty() {
        record.status = Status::Fail;
        record.witness = Some("no real-valued sample point found".into());
    }
    let mut widest: Option<&Interval> = None;
    for (a, r) in &found {
        if widest.is_none_or(|w| r.width() > w.width()) {
            widest = Some(r);
        }
        if record.status == Status::Pass && !(r.contains_zero() && r.width() <= target) {
            record.status = Status::Fail;
            record.witness = Some(format!("{} gives {}", point_to_text(a, reg), fmt_interval(r)));
        }
    }
    record.widest_interval = widest.map(fmt_interval);
    Ok(Report { records: vec![record] })
}

/// What the root conditions select at one point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Selection {
    /// Exactly one root passes and it matches `f`.
    Unique,
    /// The point lies where a critical resultant or the leading coefficient
    /// vanishes.
    Boundary,
    NotReal,
    NoRoot,
    Multiple(usize),
    /// One root passes but `f` takes a different value.
    Mismatch,
}

fn univariate_at(p: &MultiPoly, a: &Point, z: VarId) -> Result<UniPoly> {
    UniPoly::from_multipoly(&p.partial_eval(a), z)
}

/// Decide exactly which real roots of `defining(z, a)` satisfy `conditions`
/// and compare the selected root with `f(a)`.
pub fn check_point(
    f: &RadicalExpr,
    defining: &MultiPoly,
    z: VarId,
    conditions: &[SignCondition],
    a: &Point,
    tol_bits: u32,
) -> Result<Selection> {
    let fv = match eval_numeric(f, a, tol_bits) {
        Ok(NumericValue::Real(i)) => i,
        Ok(NumericValue::NotReal) => return Ok(Selection::NotReal),
        Err(Error::Domain(_)) | Err(Error::Precision(_)) => return Ok(Selection::Boundary),
        Err(e) => return Err(e),
    };
    let pa = univariate_at(defining, a, z)?;
    if pa.degree() < defining.deg(z) as i64 {
        return Ok(Selection::Boundary);
    }
    let mut d = pa.clone();
    for _ in 1..pa.degree() {
        d = d.derivative();
        if pa.gcd(&d).degree() >= 1 {
            return Ok(Selection::Boundary);
        }
    }
    if pa.gcd(&pa.derivative()).degree() >= 1 {
        return Ok(Selection::Boundary);
    }
    let iso = isolate_real_roots(&pa)?;
    let conds: Vec<(UniPoly, crate::isolation::Relation)> = conditions
        .iter()
        .map(|c| Ok((univariate_at(&c.poly, a, z)?, c.rel)))
        .collect::<Result<_>>()?;
    let mut passing = Vec::new();
    for root in &iso.roots {
        let mut r = root.clone();
        let ok = conds
            .iter()
            .all(|(q, rel)| rel.holds(sign_at_root(q, &iso.poly, &mut r)));
        if ok {
            passing.push(r);
        }
    }
    match passing.len() {
        0 => Ok(Selection::NoRoot),
        1 => {
            let mut r = passing.pop().unwrap();
            r.refine_to(&iso.poly, &pow2_neg(tol_bits));
            Ok(if r.as_interval().overlaps(&fv) {
                Selection::Unique
            } else {
                Selection::Mismatch
            })
        }
        n => Ok(Selection::Multiple(n)),
    }
}

/// Check every certificate entry at its sample and at random points of its
/// component: exactly one root passes the root conditions and equals `f`.
pub fn verify_certificate(
    f: &RadicalExpr,
    cert: &IsolationCertificate,
    cfg: &VerifyConfig,
    reg: &Registry,
) -> Result<Report> {
    let vars: Vec<VarId> = f.vars().into_iter().collect();
    let mut report = Report::default();
    for (k, entry) in cert.entries.iter().enumerate() {
        let comp = &entry.component;
        let seed = par::derive_seed(cfg.seed, k as u64);
        let want = cfg.samples.max(1);
        let used = par::sample_until(want * 4, want, |i| -> Result<Option<(Point, Selection)>> {
            let a = if i == 0 {
                comp.sample.clone()
            } else {
                let mut rng = ChaCha8Rng::seed_from_u64(par::derive_seed(seed, i as u64));
                let a = random_point(&comp.sample, &vars, cfg.radius, &mut rng);
                if !comp.contains(&a)? {
                    return Ok(None);
                }
                a
            };
            let s = check_point(f, &cert.defining, cert.z, &entry.root_conditions, &a, cfg.precision)?;
            Ok(match s {
                Selection::Boundary | Selection::NotReal => None,
                s => Some((a, s)),
            })
        }, |(_, s)| *s != Selection::Unique)?;
        let failure = used.iter().find(|(_, s)| *s != Selection::Unique);
        report.records.push(CheckRecord {
            check: format!("certificate:{}", comp.label),
            status: if failure.is_none() && !used.is_empty() {
                Status::Pass
            } else {
                Status::Fail
            },
            witness: match failure {
                Some((a, s)) => Some(format!("{:?} at {}", s, point_to_text(a, reg))),
                None if used.is_empty() => Some("no admissible sample in the component".into()),
                None => None,
            },
            widest_interval: None,
            samples_used: used.len(),
        });
    }
    Ok(report)
}

/// Compare observed degrees of a defining polynomial with the predicted bounds.
pub fn audit_degrees(dp: &DefiningPolynomial, reg: &Registry) -> Report {
    let bounds = degree_bounds(&dp.source);
    let mut problems = Vec::new();
    let zdeg = dp.poly.deg(dp.z) as u64;
    if zdeg > bounds.z {
        problems.push(format!("{}: {} > {}", reg.name(dp.z), zdeg, bounds.z));
    }
    if zdeg > dp.predicted_z_degree_bound {
        problems.push(format!(
            "{}: {} exceeds root-index product {}",
            reg.name(dp.z),
            zdeg,
            dp.predicted_z_degree_bound
        ));
    }
    for v in dp.poly.vars() {
        if v == dp.z {
            continue;
        }
        let d = dp.poly.deg(v) as u64;
        if d > bounds.var(v) {
            problems.push(format!("{}: {} > {}", reg.name(v), d, bounds.var(v)));
        }
    }
    Report {
        records: vec![CheckRecord {
            check: "degree_audit".into(),
            status: if problems.is_empty() { Status::Pass } else { Status::Fail },
            witness: (!problems.is_empty()).then(|| problems.join("; ")),
            widest_interval: None,
            samples_used: 0,
        }],
    }
}
