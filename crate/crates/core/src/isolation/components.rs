use std::collections::BTreeSet;

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{ComponentDescription, Relation, SignCondition};
use crate::error::{Error, Result};
use crate::par;
use crate::poly::{coprime_factors, rat, sign, MultiPoly, Point, Rational, VarId};
use crate::verify::{isolate_real_roots, UniPoly};

/// How the region where no critical resultant vanishes is cut into
/// connected pieces.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Strategy {
    /// Exact intervals between the real roots of resultants in one variable.
    Univariate,
    /// A user-asserted connected domain with an interior point.
    Domain {
        constraints: Vec<SignCondition>,
        point: Point,
    },
    /// Face-adjacent cells of a uniform grid with equal sign vectors.
    Grid(GridConfig),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridConfig {
    /// Box `[lo, hi]` per variable.
    pub bounds: Vec<(VarId, Rational, Rational)>,
    /// Cells per axis.
    pub resolution: usize,
}

const MAX_GRID_CELLS: usize = 1 << 20;

/// Distinct nonconstant factors of the nonzero resultants, sorted.
pub fn relevant_factors(resultants: &[MultiPoly]) -> Vec<MultiPoly> {
    let set: BTreeSet<MultiPoly> = resultants
        .iter()
        .filter(|r| !r.is_zero())
        .flat_map(coprime_factors)
        .collect();
    let mut out: Vec<MultiPoly> = set.into_iter().collect();
    out.sort_by(|a, b| {
        a.total_degree()
            .cmp(&b.total_degree())
            .then_with(|| a.num_terms().cmp(&b.num_terms()))
            .then_with(|| a.cmp(b))
    });
    out
}

fn sign_conditions(factors: &[MultiPoly], point: &Point) -> Result<Vec<SignCondition>> {
    factors
        .iter()
        .map(|q| {
            let s = sign(&q.eval(point)?);
            Ok(SignCondition::new(q.clone(), Relation::from_sign(s)))
        })
        .collect()
}

/// Decompose the region `{a : every resultant is nonzero at a}` over the
/// variables `vars` into connected pieces.
pub fn components(
    resultants: &[MultiPoly],
    vars: &[VarId],
    strategy: &Strategy,
    samples: usize,
    seed: u64,
) -> Result<Vec<ComponentDescription>> {
    let factors = relevant_factors(resultants);
    match strategy {
        Strategy::Univariate => univariate(&factors, vars),
        Strategy::Domain { constraints, point } => {
            domain(&factors, vars, constraints, point, samples, seed)
        }
        Strategy::Grid(cfg) => grid(&factors, vars, cfg),
    }
}

fn univariate(factors: &[MultiPoly], vars: &[VarId]) -> Result<Vec<ComponentDescription>> {
    let used: BTreeSet<VarId> = factors.iter().flat_map(|f| f.vars()).collect();
    if used.len() > 1 {
        return Err(Error::Strategy(format!(
            "univariate strategy needs resultants in a single variable, found {}",
            used.len()
        )));
    }
    let base: Point = vars.iter().map(|&v| (v, Rational::zero())).collect();
    let Some(&x) = used.iter().next() else {
        return Ok(vec![ComponentDescription {
            conditions: Vec::new(),
            sample: base,
            label: "C1".into(),
        }]);
    };
    let product = factors
        .iter()
        .fold(MultiPoly::one(), |acc, f| &acc * f);
    let iso = isolate_real_roots(&UniPoly::from_multipoly(&product, x)?)?;
    let roots = &iso.roots;
    let mut samples = Vec::with_capacity(roots.len() + 1);
    if roots.is_empty() {
        samples.push(Rational::zero());
    } else {
        samples.push(&roots[0].lo - rat(1));
        for w in roots.windows(2) {
            samples.push((&w[0].hi + &w[1].lo) / rat(2));
        }
        samples.push(&roots[roots.len() - 1].hi + rat(1));
    }
    let with = |s: &Rational| {
        let mut p = base.clone();
        p.insert(x, s.clone());
        p
    };
    let conds: Vec<Vec<SignCondition>> = samples
        .iter()
        .map(|s| sign_conditions(factors, &with(s)))
        .collect::<Result<_>>()?;
    let xp = MultiPoly::var(x);
    let mut out = Vec::with_capacity(samples.len());
    for (k, s) in samples.iter().enumerate() {
        let mut c = conds[k].clone();
        // Adjacent intervals always differ in sign; a repeated vector needs
        // rational walls taken from the neighbouring samples.
        if conds.iter().filter(|o| **o == conds[k]).count() > 1 {
            if k > 0 {
                c.push(SignCondition::new(&xp - &MultiPoly::constant(samples[k - 1].clone()), Relation::Gt));
            }
            if k + 1 < samples.len() {
                c.push(SignCondition::new(&xp - &MultiPoly::constant(samples[k + 1].clone()), Relation::Lt));
            }
        }
        out.push(ComponentDescription {
            conditions: c,
            sample: with(s),
            label: format!("C{}", k + 1),
        });
    }
    Ok(out)
}

fn random_near(center: &Point, vars: &[VarId], radius: i64, rng: &mut ChaCha8Rng) -> Point {
    const GRAIN: i64 = 1 << 24;
    vars.iter()
        .map(|&v| {
            let c = center.get(&v).cloned().unwrap_or_else(Rational::zero);
            let k = rng.gen_range(-GRAIN..=GRAIN);
            (v, c + Rational::new((k * radius).into(), GRAIN.into()))
        })
        .collect()
}

fn domain(
    factors: &[MultiPoly],
    vars: &[VarId],
    constraints: &[SignCondition],
    point: &Point,
    samples: usize,
    seed: u64,
) -> Result<Vec<ComponentDescription>> {
    for v in vars {
        if !point.contains_key(v) {
            return Err(Error::Validation(format!("domain point misses variable {v}")));
        }
    }
    for c in constraints {
        if !c.holds_at(point)? {
            return Err(Error::Validation("domain point violates a domain constraint".into()));
        }
    }
    let hit = |a: &Point| -> Result<Option<usize>> {
        for (i, q) in factors.iter().enumerate() {
            if q.eval(a)?.is_zero() {
                return Ok(Some(i));
            }
        }
        Ok(None)
    };
    if let Some(i) = hit(point)? {
        return Err(Error::Validation(format!(
            "resultant factor #{} vanishes at the domain point",
            i + 1
        )));
    }
    let checks = par::try_map_range(samples, |i| -> Result<Option<(Point, usize)>> {
        let mut rng = ChaCha8Rng::seed_from_u64(par::derive_seed(seed, i as u64));
        for _ in 0..64 {
            let a = random_near(point, vars, 4, &mut rng);
            if constraints.iter().all(|c| c.holds_at(&a).unwrap_or(false)) {
                return Ok(hit(&a)?.map(|k| (a, k)));
            }
        }
        Ok(None)
    })?;
    if let Some((_, k)) = checks.into_iter().flatten().next() {
        return Err(Error::Validation(format!(
            "resultant factor #{} vanishes inside the asserted domain",
            k + 1
        )));
    }
    Ok(vec![ComponentDescription {
        conditions: constraints.to_vec(),
        sample: point.clone(),
        label: "D".into(),
    }])
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, i: usize) -> usize {
        let mut r = i;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut j = i;
        while self.0[j] != r {
            let next = self.0[j];
            self.0[j] = r;
            j = next;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
}

fn grid(factors: &[MultiPoly], vars: &[VarId], cfg: &GridConfig) -> Result<Vec<ComponentDescription>> {
    let n = cfg.resolution;
    if n == 0 {
        return Err(Error::Strategy("grid resolution must be positive".into()));
    }
    let mut axes = Vec::with_capacity(vars.len());
    for v in vars {
        let (_, lo, hi) = cfg
            .bounds
            .iter()
            .find(|(w, _, _)| w == v)
            .ok_or_else(|| Error::Strategy(format!("grid box has no bounds for variable {v}")))?;
        if lo >= hi {
            return Err(Error::Strategy("grid bounds must satisfy lo < hi".into()));
        }
        axes.push((*v, lo.clone(), (hi - lo) / rat(n as i64)));
    }
    let cells = n.saturating_pow(axes.len() as u32);
    if cells > MAX_GRID_CELLS {
        return Err(Error::Explosion {
            count: cells,
            limit: MAX_GRID_CELLS,
        });
    }
    let center = |idx: usize| -> Point {
        let mut rest = idx;
        axes.iter()
            .map(|(v, lo, step)| {
                let k = rest % n;
                rest /= n;
                (*v, lo + step * (rat(k as i64) + Rational::new(1.into(), 2.into())))
            })
            .collect()
    };
    let signs: Vec<Option<Vec<i8>>> = par::try_map_range(cells, |i| -> Result<Option<Vec<i8>>> {
        let a = center(i);
        let mut s = Vec::with_capacity(factors.len());
        for q in factors {
            let v = sign(&q.eval(&a)?);
            if v == 0 {
                return Ok(None);
            }
            s.push(v);
        }
        Ok(Some(s))
    })?;
    let mut uf = UnionFind((0..cells).collect());
    let mut stride = 1;
    for _ in 0..axes.len() {
        for i in 0..cells {
            if (i / stride) % n + 1 < n {
                let j = i + stride;
                if signs[i].is_some() && signs[i] == signs[j] {
                    uf.union(i, j);
                }
            }
        }
        stride *= n;
    }
    let mut out = Vec::new();
    for (i, s) in signs.iter().enumerate().take(cells) {
        if let Some(s) = s {
            if uf.find(i) == i {
                out.push(ComponentDescription {
                    conditions: factors
                        .iter()
                        .zip(s)
                        .map(|(q, &v)| SignCondition::new(q.clone(), Relation::from_sign(v)))
                        .collect(),
                    sample: center(i),
                    label: format!("G{}", out.len() + 1),
                });
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_poly;
    use crate::poly::{ratio, Registry};

    #[test]
    fn univariate_sqrt() {
        let mut reg = Registry::new();
        let x = reg.var("x");
        let res = vec![MultiPoly::var(x).scale(&rat(-4)), MultiPoly::int(4)];
        let cs = components(&res, &[x], &Strategy::Univariate, 0, 0).unwrap();
        assert_eq!(cs.len(), 2);
        let texts: Vec<String> = cs.iter().map(|c| c.conditions[0].to_text(&reg)).collect();
        assert_eq!(texts, vec!["x < 0", "x > 0"]);
        for c in &cs {
            assert!(c.contains(&c.sample).unwrap());
        }
    }

    #[test]
    fn univariate_repeated_signs_get_walls() {
        let mut reg = Registry::new();
        let x = reg.var("x");
        let res = vec![parse_poly("x^2 - 3*x + 2", &mut reg).unwrap()];
        let cs = components(&res, &[x], &Strategy::Univariate, 0, 0).unwrap();
        assert_eq!(cs.len(), 3);
        assert_eq!(cs[0].conditions.len(), 2);
        assert_eq!(cs[1].conditions.len(), 1);
        let outside = Point::from([(x, rat(3))]);
        assert!(!cs[0].contains(&outside).unwrap());
        assert!(cs[2].contains(&outside).unwrap());
        let y = reg.var("y");
        let bad = vec![parse_poly("x - y", &mut reg).unwrap()];
        assert!(matches!(
            components(&bad, &[x, y], &Strategy::Univariate, 0, 0),
            Err(Error::Strategy(_))
        ));
    }

    #[test]
    fn grid_quadrant_groups() {
        let mut reg = Registry::new();
        let x = reg.var("x");
        let y = reg.var("y");
        let res: Vec<MultiPoly> = ["x", "y", "x - y", "x^2 - 7*x*y + y^2"]
            .iter()
            .map(|s| parse_poly(s, &mut reg).unwrap())
            .collect();
        let cfg = GridConfig {
            bounds: vec![(x, ratio(1, 4), rat(4)), (y, ratio(1, 4), rat(4))],
            resolution: 24,
        };
        let cs = components(&res, &[x, y], &Strategy::Grid(cfg), 0, 0).unwrap();
        assert_eq!(cs.len(), 4);
    }

    #[test]
    fn domain_validation() {
        let mut reg = Registry::new();
        let x = reg.var("x");
        let y = reg.var("y");
        let res = vec![parse_poly("x - y", &mut reg).unwrap()];
        let d = vec![SignCondition::new(parse_poly("x - 1", &mut reg).unwrap(), Relation::Ge)];
        let on_zero = Strategy::Domain {
            constraints: d.clone(),
            point: Point::from([(x, rat(2)), (y, rat(2))]),
        };
        assert!(matches!(components(&res, &[x, y], &on_zero, 16, 1), Err(Error::Validation(_))));
        let ok = Strategy::Domain {
            constraints: d,
            point: Point::from([(x, rat(2)), (y, rat(3))]),
        };
        assert_eq!(components(&res, &[x, y], &ok, 16, 1).unwrap().len(), 1);
    }
}
