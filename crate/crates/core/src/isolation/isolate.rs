use std::collections::{BTreeMap, BTreeSet};

use super::{components, CertificateEntry, ComponentDescription, IsolationCertificate, Relation, SignCondition, Strategy, StrategyKind};
use crate::defpoly::DefiningPolynomial;
use crate::error::{Error, Result};
use crate::expr::{eval_numeric, eval_poly_interval, Interval, NumericValue, RadicalExpr};
use crate::par;
use crate::poly::{MultiPoly, VarId};
use crate::resultant::resultant;

/// `[p', p'', …, p^(d)]` with respect to `z`, where `d = deg_z p`.
pub fn derivative_tower(p: &MultiPoly, z: VarId) -> Vec<MultiPoly> {
    let d = p.deg(z);
    let mut out = Vec::with_capacity(d as usize);
    let mut q = p.clone();
    for _ in 0..d {
        q = q.derivative(z);
        out.push(q.clone());
    }
    out
}

/// `res_z(p, p^(i))` for every derivative; for a derivative free of `z` the
/// resultant is that derivative raised to `deg_z p`.
pub fn critical_resultants(p: &MultiPoly, z: VarId) -> Result<Vec<MultiPoly>> {
    let d = p.deg(z);
    if d == 0 {
        return Err(Error::Structural(
            "critical resultants need positive degree in the defining variable".into(),
        ));
    }
    let tower = derivative_tower(p, z);
    par::map(&tower, |q| {
        if q.deg(z) == 0 {
            Ok(q.pow(d))
        } else {
            resultant(p, q, z)
        }
    })
    .into_iter()
    .collect()
}

#[derive(Debug, Clone)]
pub struct IsolateConfig {
    /// Bits of the first sign-certification attempt.
    pub precision: u32,
    /// Certification attempts, each adding `precision` bits.
    pub sign_rounds: u32,
    /// Random validation points for the domain strategy.
    pub samples: usize,
    pub seed: u64,
}

impl Default for IsolateConfig {
    fn default() -> Self {
        IsolateConfig {
            precision: 64,
            sign_rounds: 64,
            samples: 128,
            seed: 0,
        }
    }
}

fn certify_signs(
    tower: &[MultiPoly],
    f: &RadicalExpr,
    z: VarId,
    comp: &ComponentDescription,
    cfg: &IsolateConfig,
) -> Result<Vec<i8>> {
    let a = &comp.sample;
    let mut signs: Vec<Option<i8>> = vec![None; tower.len()];
    let mut env: BTreeMap<VarId, Interval> =
        a.iter().map(|(v, c)| (*v, Interval::point(c.clone()))).collect();
    for round in 1..=cfg.sign_rounds.max(1) {
        let fv = match eval_numeric(f, a, cfg.precision.saturating_mul(round))? {
            NumericValue::Real(i) => i,
            NumericValue::NotReal => return Err(Error::Internal("sample lost its real value".into())),
        };
        env.insert(z, fv);
        for (q, s) in tower.iter().zip(signs.iter_mut()) {
            if s.is_none() {
                match eval_poly_interval(q, &env)?.sign() {
                    Some(0) | None => {}
                    found => *s = found,
                }
            }
        }
        if signs.iter().all(Option::is_some) {
            return Ok(signs.into_iter().map(Option::unwrap).collect());
        }
    }
    Err(Error::Precision(format!(
        "derivative signs at the sample of component {} could not be certified",
        comp.label
    )))
}

// Every term has a positive coefficient and each variable appears to an
// even power or is known to be nonnegative.
pub(crate) fn certified_nonnegative(p: &MultiPoly, nonneg: &BTreeSet<VarId>) -> bool {
    !p.is_zero()
        && p.terms().all(|(m, c)| {
            crate::poly::sign(c) > 0 && m.pairs().iter().all(|(v, e)| e % 2 == 0 || nonneg.contains(v))
        })
}

fn dedup(conds: &mut Vec<SignCondition>) {
    let mut seen = BTreeSet::new();
    conds.retain(|c| seen.insert(c.clone()));
}

/// Turn derivative signs into root conditions: `p = 0` plus one strict
/// inequality per derivative, then drop what is trivially implied.
pub(crate) fn root_conditions(
    p: &MultiPoly,
    z: VarId,
    tower: &[MultiPoly],
    signs: &[i8],
    component: &[SignCondition],
) -> Vec<SignCondition> {
    let mut conds = vec![SignCondition::new(p.clone(), Relation::Eq).canonical()];
    for (q, &s) in tower.iter().zip(signs) {
        if !q.is_constant() {
            conds.push(SignCondition::new(q.clone(), Relation::from_sign(s)).canonical());
        }
    }
    dedup(&mut conds);

    let zp = MultiPoly::var(z);
    let z_sign = conds
        .iter()
        .find(|c| c.poly == zp && c.rel.is_strict())
        .map(|c| c.rel.direction());
    if let Some(zs) = z_sign {
        for c in conds.iter_mut().filter(|c| c.rel != Relation::Eq && c.poly != zp) {
            let mut q = c.poly.clone();
            let mut rel = c.rel;
            while let Some(r) = q.div_exact(&zp) {
                if r.is_constant() {
                    break;
                }
                q = r;
                if zs < 0 {
                    rel = rel.flipped();
                }
            }
            *c = SignCondition::new(q, rel).canonical();
        }
        dedup(&mut conds);
    }

    let mut nonneg: BTreeSet<VarId> = BTreeSet::new();
    for c in conds.iter().chain(component) {
        if c.poly.num_terms() == 1 && c.poly.total_degree() == 1 && c.rel.direction() > 0 {
            nonneg.extend(c.poly.vars());
        }
    }
    let mut i = 0;
    while i < conds.len() {
        let c2 = &conds[i];
        let implied = c2.rel.direction() != 0
            && conds.iter().enumerate().any(|(j, c1)| {
                j != i
                    && c1.rel.direction() == c2.rel.direction()
                    && (c1.rel.is_strict() || !c2.rel.is_strict())
                    && {
                        let diff = if c2.rel.direction() > 0 {
                            &c2.poly - &c1.poly
                        } else {
                            &c1.poly - &c2.poly
                        };
                        certified_nonnegative(&diff, &nonneg)
                    }
            });
        if implied {
            conds.remove(i);
        } else {
            i += 1;
        }
    }
    conds
}

/// Build an isolation certificate for `f` with defining polynomial `dp`.
pub fn isolate(
    f: &RadicalExpr,
    dp: &DefiningPolynomial,
    strategy: &Strategy,
    cfg: &IsolateConfig,
) -> Result<IsolationCertificate> {
    let (p, z) = (&dp.poly, dp.z);
    let tower = derivative_tower(p, z);
    let resultants = critical_resultants(p, z)?;
    let mut warnings = Vec::new();
    let zeros = resultants.iter().filter(|r| r.is_zero()).count();
    if zeros > 0 {
        warnings.push(format!("{zeros} critical resultant(s) vanish identically"));
    }
    let vars: Vec<VarId> = f.vars().into_iter().collect();
    let comps = components(&resultants, &vars, strategy, cfg.samples, cfg.seed)?;
    let results = par::map(&comps, |c| -> Result<Option<CertificateEntry>> {
        match eval_numeric(f, &c.sample, cfg.precision) {
            Ok(NumericValue::NotReal) | Err(Error::Domain(_)) => return Ok(None),
            Ok(NumericValue::Real(_)) => {}
            Err(e) => return Err(e),
        }
        let signs = certify_signs(&tower, f, z, c, cfg)?;
        Ok(Some(CertificateEntry {
            root_conditions: root_conditions(p, z, &tower, &signs, &c.conditions),
            component: c.clone(),
            signs,
        }))
    });
    let mut entries = Vec::new();
    let mut skipped = 0;
    for r in results {
        match r? {
            Some(e) => entries.push(e),
            None => skipped += 1,
        }
    }
    Ok(IsolationCertificate {
        z,
        defining: p.clone(),
        entries,
        strategy: match strategy {
            Strategy::Univariate => StrategyKind::Univariate,
            Strategy::Domain { .. } => StrategyKind::Domain,
            Strategy::Grid(_) => StrategyKind::Grid,
        },
        skipped_components: skipped,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::Registry;
    use crate::defpoly::{defining_polynomial, ReduceConfig};
    use crate::expr::{normalize, parse};
    use crate::poly::{rat, Point};

    fn texts(cs: &[SignCondition], reg: &Registry) -> Vec<String> {
        cs.iter().map(|c| c.to_text(reg)).collect()
    }

    fn setup(src: &str, vars: &[&str]) -> (Registry, RadicalExpr, DefiningPolynomial) {
        let mut reg = Registry::with_vars(vars);
        let f = normalize(&parse(src, &mut reg).unwrap()).unwrap();
        let z = reg.var("z");
        let dp = defining_polynomial(&f, z, &mut reg, &ReduceConfig::default()).unwrap();
        (reg, f, dp)
    }

    #[test]
    fn tower_and_resultants() {
        let (reg, _, dp) = setup("sqrt(x)", &["x"]);
        let tower = derivative_tower(&dp.poly, dp.z);
        let t: Vec<String> = tower.iter().map(|q| q.to_text(&reg)).collect();
        assert_eq!(t, vec!["2*z", "2"]);
        let res = critical_resultants(&dp.poly, dp.z).unwrap();
        let t: Vec<String> = res.iter().map(|q| q.to_text(&reg)).collect();
        assert_eq!(t, vec!["-4*x", "4"]);
        let z = dp.z;
        assert_eq!(derivative_tower(&MultiPoly::var(z), z), vec![MultiPoly::one()]);
        assert!(critical_resultants(&MultiPoly::int(3), z).is_err());
    }

    #[test]
    fn sqrt_certificate() {
        let (reg, f, dp) = setup("sqrt(x)", &["x"]);
        let cert = isolate(&f, &dp, &Strategy::Univariate, &IsolateConfig::default()).unwrap();
        assert_eq!(cert.skipped_components, 1);
        assert_eq!(cert.entries.len(), 1);
        let e = &cert.entries[0];
        assert_eq!(texts(&e.component.conditions, &reg), vec!["x > 0"]);
        assert_eq!(texts(&e.root_conditions, &reg), vec!["z^2 - x = 0", "z > 0"]);
    }

    #[test]
    fn nested_root_domain_certificate() {
        let (mut reg, f, dp) = setup("sqrt(x^2 + sqrt(y^2 + 1))", &["x", "y"]);
        let x = reg.lookup("x").unwrap();
        let y = reg.lookup("y").unwrap();
        let strategy = Strategy::Domain {
            constraints: Vec::new(),
            point: Point::from([(x, rat(0)), (y, rat(0))]),
        };
        let cert = isolate(&f, &dp, &strategy, &IsolateConfig::default()).unwrap();
        assert_eq!(cert.entries.len(), 1);
        let want = ["z^4 - 2*x^2*z^2 + x^4 - y^2 - 1 = 0", "z^2 - x^2 > 0", "z > 0"];
        assert_eq!(texts(&cert.entries[0].root_conditions, &reg), want);
        let back = IsolationCertificate::from_json_str(&cert.to_json_string(&reg), &mut reg).unwrap();
        assert_eq!(back, cert);
    }
}
