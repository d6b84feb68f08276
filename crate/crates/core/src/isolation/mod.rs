//! Sign conditions that single out the branch of a defining polynomial taken
//! by a radical expression, per connected piece of the region where the
//! derivative resultants do not vanish.

mod components;
mod isolate;
mod merge;

pub use components::{components, relevant_factors, GridConfig, Strategy};
pub use isolate::{critical_resultants, derivative_tower, isolate, IsolateConfig};
pub(crate) use isolate::certified_nonnegative;
pub use merge::{merge_components, MergeConfig};

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::parse_poly;
use num_traits::One;

use crate::poly::{fmt_rational, parse_rational, sign, MultiPoly, Point, Rational, Registry, VarId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Relation {
    #[serde(rename = ">")]
    Gt,
    #[serde(rename = "<")]
    Lt,
    #[serde(rename = "=")]
    Eq,
    #[serde(rename = ">=")]
    Ge,
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = "!=")]
    Ne,
}

impl Relation {
    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Gt => ">",
            Relation::Lt => "<",
            Relation::Eq => "=",
            Relation::Ge => ">=",
            Relation::Le => "<=",
            Relation::Ne => "!=",
        }
    }

    pub fn parse(s: &str) -> Result<Relation> {
        Ok(match s.trim() {
            ">" => Relation::Gt,
            "<" => Relation::Lt,
            "=" | "==" => Relation::Eq,
            ">=" => Relation::Ge,
            "<=" => Relation::Le,
            "!=" => Relation::Ne,
            other => return Err(Error::Parse { pos: 0, msg: format!("unknown relation '{other}'") }),
        })
    }

    /// Whether a value of the given sign satisfies `value rel 0`.
    pub fn holds(self, s: i8) -> bool {
        match self {
            Relation::Gt => s > 0,
            Relation::Lt => s < 0,
            Relation::Eq => s == 0,
            Relation::Ge => s >= 0,
            Relation::Le => s <= 0,
            Relation::Ne => s != 0,
        }
    }

    /// The strict relation satisfied by a nonzero sign.
    pub fn from_sign(s: i8) -> Relation {
        match s.signum() {
            1 => Relation::Gt,
            -1 => Relation::Lt,
            _ => Relation::Eq,
        }
    }

    /// Relation after multiplying both sides by a negative number.
    pub fn flipped(self) -> Relation {
        match self {
            Relation::Gt => Relation::Lt,
            Relation::Lt => Relation::Gt,
            Relation::Ge => Relation::Le,
            Relation::Le => Relation::Ge,
            r => r,
        }
    }

    /// Non-strict closure of a strict inequality.
    pub fn relaxed(self) -> Relation {
        match self {
            Relation::Gt => Relation::Ge,
            Relation::Lt => Relation::Le,
            r => r,
        }
    }

    pub fn is_strict(self) -> bool {
        matches!(self, Relation::Gt | Relation::Lt)
    }

    /// `+1` for `>`/`>=`, `-1` for `<`/`<=`, `0` otherwise.
    pub fn direction(self) -> i8 {
        match self {
            Relation::Gt | Relation::Ge => 1,
            Relation::Lt | Relation::Le => -1,
            _ => 0,
        }
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

/// `poly rel 0`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct SignCondition {
    pub poly: MultiPoly,
    pub rel: Relation,
}

impl SignCondition {
    pub fn new(poly: MultiPoly, rel: Relation) -> Self {
        SignCondition { poly, rel }
    }

    /// Primitive integer form whose graded-lex leading coefficient is
    /// positive; the relation is flipped when the scaling factor is negative.
    pub fn canonical(&self) -> SignCondition {
        let (mut poly, mut factor) = self.poly.normalize_with_factor(None);
        if poly.leading_term().is_some_and(|(_, c)| sign(c) < 0) {
            poly = poly.scale(&-Rational::one());
            factor = -factor;
        }
        let rel = if sign(&factor) < 0 { self.rel.flipped() } else { self.rel };
        SignCondition { poly, rel }
    }

    /// Exact check at a point assigning every variable of the condition.
    pub fn holds_at(&self, point: &Point) -> Result<bool> {
        Ok(self.rel.holds(sign(&self.poly.eval(point)?)))
    }

    pub fn to_text(&self, reg: &Registry) -> String {
        format!("{} {} 0", self.poly.to_text(reg), self.rel)
    }
}

/// A connected piece of the nonvanishing region with an interior sample.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentDescription {
    pub conditions: Vec<SignCondition>,
    pub sample: Point,
    pub label: String,
}

impl ComponentDescription {
    pub fn contains(&self, point: &Point) -> Result<bool> {
        for c in &self.conditions {
            if !c.holds_at(point)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StrategyKind {
    Univariate,
    Domain,
    Grid,
}

impl fmt::Display for StrategyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StrategyKind::Univariate => "univariate",
            StrategyKind::Domain => "domain",
            StrategyKind::Grid => "grid",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CertificateEntry {
    pub component: ComponentDescription,
    /// `defining = 0` followed by the surviving derivative sign conditions.
    pub root_conditions: Vec<SignCondition>,
    /// Signs of every derivative of the defining polynomial at the root.
    pub signs: Vec<i8>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IsolationCertificate {
    pub z: VarId,
    pub defining: MultiPoly,
    pub entries: Vec<CertificateEntry>,
    pub strategy: StrategyKind,
    pub skipped_components: usize,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConditionJson {
    pub poly: String,
    pub rel: Relation,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntryJson {
    pub label: String,
    pub component_conditions: Vec<ConditionJson>,
    pub root_conditions: Vec<ConditionJson>,
    pub sample: BTreeMap<String, String>,
    pub signs: Vec<i8>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateJson {
    pub z: String,
    pub defining: String,
    pub strategy: StrategyKind,
    pub skipped_components: usize,
    pub entries: Vec<EntryJson>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

fn conds_to_json(cs: &[SignCondition], reg: &Registry) -> Vec<ConditionJson> {
    cs.iter()
        .map(|c| ConditionJson {
            poly: c.poly.to_text(reg),
            rel: c.rel,
        })
        .collect()
}

fn conds_from_json(cs: &[ConditionJson], reg: &mut Registry) -> Result<Vec<SignCondition>> {
    cs.iter()
        .map(|c| Ok(SignCondition::new(parse_poly(&c.poly, reg)?, c.rel)))
        .collect()
}

/// Domain strategy input: an interior point and the asserted constraints.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DomainJson {
    pub point: BTreeMap<String, String>,
    #[serde(default)]
    pub constraints: Vec<ConditionJson>,
}

impl DomainJson {
    pub fn from_json_str(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Parse {
            pos: e.column(),
            msg: format!("domain JSON: {e}"),
        })
    }

    pub fn to_strategy(&self, reg: &mut Registry) -> Result<Strategy> {
        Ok(Strategy::Domain {
            constraints: conds_from_json(&self.constraints, reg)?,
            point: point_from_json(&self.point, reg)?,
        })
    }
}

pub fn point_to_json(p: &Point, reg: &Registry) -> BTreeMap<String, String> {
    p.iter()
        .map(|(v, q)| (reg.name(*v).to_string(), fmt_rational(q)))
        .collect()
}

pub fn point_from_json(p: &BTreeMap<String, String>, reg: &mut Registry) -> Result<Point> {
    p.iter()
        .map(|(n, q)| Ok((reg.var(n), parse_rational(q)?)))
        .collect()
}

pub fn point_to_text(p: &Point, reg: &Registry) -> String {
    p.iter()
        .map(|(v, q)| format!("{}={}", reg.name(*v), fmt_rational(q)))
        .collect::<Vec<_>>()
        .join(", ")
}

impl IsolationCertificate {
    pub fn to_json(&self, reg: &Registry) -> CertificateJson {
        CertificateJson {
            z: reg.name(self.z).to_string(),
            defining: self.defining.to_text(reg),
            strategy: self.strategy,
            skipped_components: self.skipped_components,
            entries: self
                .entries
                .iter()
                .map(|e| EntryJson {
                    label: e.component.label.clone(),
                    component_conditions: conds_to_json(&e.component.conditions, reg),
                    root_conditions: conds_to_json(&e.root_conditions, reg),
                    sample: point_to_json(&e.component.sample, reg),
                    signs: e.signs.clone(),
                })
                .collect(),
            warnings: self.warnings.clone(),
        }
    }

    pub fn from_json(j: &CertificateJson, reg: &mut Registry) -> Result<Self> {
        let z = reg.var(&j.z);
        let defining = parse_poly(&j.defining, reg)?;
        let entries = j
            .entries
            .iter()
            .map(|e| {
                Ok(CertificateEntry {
                    component: ComponentDescription {
                        conditions: conds_from_json(&e.component_conditions, reg)?,
                        sample: point_from_json(&e.sample, reg)?,
                        label: e.label.clone(),
                    },
                    root_conditions: conds_from_json(&e.root_conditions, reg)?,
                    signs: e.signs.clone(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(IsolationCertificate {
            z,
            defining,
            entries,
            strategy: j.strategy,
            skipped_components: j.skipped_components,
            warnings: j.warnings.clone(),
        })
    }

    pub fn to_json_string(&self, reg: &Registry) -> String {
        serde_json::to_string_pretty(&self.to_json(reg)).expect("certificate serializes")
    }

    pub fn from_json_str(s: &str, reg: &mut Registry) -> Result<Self> {
        let j: CertificateJson = serde_json::from_str(s).map_err(|e| Error::Parse {
            pos: e.column(),
            msg: format!("certificate JSON: {e}"),
        })?;
        Self::from_json(&j, reg)
    }

    /// Human-readable listing of entries.
    pub fn describe(&self, reg: &Registry) -> String {
        let mut out = String::new();
        for e in &self.entries {
            let comp: Vec<String> = e.component.conditions.iter().map(|c| c.to_text(reg)).collect();
            let root: Vec<String> = e.root_conditions.iter().map(|c| c.to_text(reg)).collect();
            out.push_str(&format!(
                "{}: where [{}] select [{}]\n",
                e.component.label,
                comp.join(", "),
                root.join(", ")
            ));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::rat;

    #[test]
    fn relations() {
        assert!(Relation::Gt.holds(1) && !Relation::Gt.holds(0));
        assert!(Relation::Ge.holds(0) && Relation::Le.holds(-1) && Relation::Ne.holds(1));
        assert_eq!(Relation::Gt.flipped(), Relation::Lt);
        assert_eq!(Relation::Lt.relaxed(), Relation::Le);
        for r in [Relation::Gt, Relation::Lt, Relation::Eq, Relation::Ge, Relation::Le, Relation::Ne] {
            assert_eq!(Relation::parse(r.symbol()).unwrap(), r);
        }
    }

    #[test]
    fn canonical_flips_relation() {
        let mut reg = Registry::new();
        let x = reg.var("x");
        let c = SignCondition::new(MultiPoly::var(x).scale(&rat(-2)), Relation::Gt);
        let k = c.canonical();
        assert_eq!(k.poly, MultiPoly::var(x));
        assert_eq!(k.rel, Relation::Lt);
        assert!(c.holds_at(&Point::from([(x, rat(-1))])).unwrap());
    }
}
