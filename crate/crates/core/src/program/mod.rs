//! Algebraic programs, their reformulation into polynomial programs, and
//! output formats for downstream solvers.

mod check;
mod emit;
mod extract;
mod reformulate;

pub use check::verify_reformulation;
pub use emit::{emit_program, emit_result, Format};
pub use extract::{extract_algebraic_parts, AlgebraicPart};
pub use reformulate::{baseline_reformulate, reformulate, ReformulateConfig};

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::{normalize, parse, parse_poly, Parser, RadicalExpr};
use crate::isolation::{ConditionJson, Relation, SignCondition};
use crate::poly::{MultiPoly, Point, Registry, VarId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sense {
    Min,
    Max,
}

impl fmt::Display for Sense {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sense::Min => "min",
            Sense::Max => "max",
        })
    }
}

/// `expr rel 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constraint {
    pub expr: RadicalExpr,
    pub rel: Relation,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlgebraicProgram {
    pub variables: Registry,
    pub sense: Sense,
    pub objective: RadicalExpr,
    pub constraints: Vec<Constraint>,
    /// Subexpressions that receive a single auxiliary variable as a whole.
    pub groups: Vec<RadicalExpr>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObjectiveInput {
    pub sense: Sense,
    pub expr: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstraintInput {
    pub expr: String,
    pub rel: Relation,
}

/// Problem file contents.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProblemJson {
    pub variables: Vec<String>,
    pub objective: ObjectiveInput,
    #[serde(default)]
    pub constraints: Vec<ConstraintInput>,
    #[serde(default)]
    pub groups: Vec<String>,
}

fn json_err(e: serde_json::Error) -> Error {
    Error::Parse {
        pos: e.column(),
        msg: format!("JSON: {e}"),
    }
}

impl AlgebraicProgram {
    /// Build from parsed parts; every expression is normalized.
    pub fn new(
        variables: Registry,
        sense: Sense,
        objective: RadicalExpr,
        constraints: Vec<Constraint>,
        groups: Vec<RadicalExpr>,
    ) -> Result<Self> {
        for c in &constraints {
            if c.rel == Relation::Ne {
                return Err(Error::Validation("constraints use =, >, >=, < or <=".into()));
            }
        }
        let known = variables.len();
        let exprs = std::iter::once(&objective)
            .chain(constraints.iter().map(|c| &c.expr))
            .chain(&groups);
        for e in exprs {
            if e.vars().iter().any(|v| v.index() >= known) {
                return Err(Error::Validation("expression uses an unregistered variable".into()));
            }
        }
        Ok(AlgebraicProgram {
            sense,
            objective: normalize(&objective)?,
            constraints: constraints
                .into_iter()
                .map(|c| Ok(Constraint { expr: normalize(&c.expr)?, rel: c.rel }))
                .collect::<Result<_>>()?,
            groups: groups.iter().map(normalize).collect::<Result<_>>()?,
            variables,
        })
    }

    pub fn from_json(j: &ProblemJson) -> Result<Self> {
        let mut reg = Registry::with_vars(&j.variables);
        if reg.len() != j.variables.len() {
            return Err(Error::Validation("duplicate variable name".into()));
        }
        let strict = Parser { allow_new_vars: false };
        let objective = strict.parse(&j.objective.expr, &mut reg)?;
        let constraints = j
            .constraints
            .iter()
            .map(|c| Ok(Constraint { expr: strict.parse(&c.expr, &mut reg)?, rel: c.rel }))
            .collect::<Result<Vec<_>>>()?;
        let groups = j
            .groups
            .iter()
            .map(|g| strict.parse(g, &mut reg))
            .collect::<Result<Vec<_>>>()?;
        Self::new(reg, j.objective.sense, objective, constraints, groups)
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        Self::from_json(&serde_json::from_str(s).map_err(json_err)?)
    }

    /// Objective first, then constraints in order.
    pub fn expressions(&self) -> impl Iterator<Item = &RadicalExpr> {
        std::iter::once(&self.objective).chain(self.constraints.iter().map(|c| &c.expr))
    }

    /// Domain constraints usable by the domain strategy: the constraints
    /// that are already polynomial.
    pub fn polynomial_constraints(&self) -> Vec<SignCondition> {
        self.constraints
            .iter()
            .filter_map(|c| {
                crate::expr::is_polynomial(&c.expr).map(|p| SignCondition::new(p, c.rel).canonical())
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolynomialProgram {
    pub registry: Registry,
    /// Variables of the program, in registry order.
    pub variables: Vec<VarId>,
    pub sense: Sense,
    pub objective: MultiPoly,
    pub constraints: Vec<SignCondition>,
    /// Value of each auxiliary variable in terms of the original ones.
    pub provenance: BTreeMap<VarId, RadicalExpr>,
    pub label: String,
    /// Conditions of the region on which the child is valid; not serialized.
    pub component: Vec<SignCondition>,
    /// An interior point of that region; not serialized.
    pub sample: Point,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DensityNote {
    AssertedByUser,
    OpenDenseCase,
    Unchecked,
}

impl fmt::Display for DensityNote {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DensityNote::AssertedByUser => "asserted_by_user",
            DensityNote::OpenDenseCase => "open_dense_case",
            DensityNote::Unchecked => "unchecked",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReformulationResult {
    pub children: Vec<PolynomialProgram>,
    pub aux_count_ours: usize,
    pub aux_count_baseline: usize,
    pub density_note: DensityNote,
    /// Diagnostics gathered along the way; not serialized.
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObjectiveJson {
    pub sense: Sense,
    pub poly: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProgramJson {
    pub label: String,
    pub variables: Vec<String>,
    pub objective: ObjectiveJson,
    pub constraints: Vec<ConditionJson>,
    pub provenance: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResultJson {
    pub children: Vec<ProgramJson>,
    pub aux_count_ours: usize,
    pub aux_count_baseline: usize,
    pub density_note: DensityNote,
}

impl PolynomialProgram {
    pub fn to_json(&self) -> ProgramJson {
        let reg = &self.registry;
        ProgramJson {
            label: self.label.clone(),
            variables: self.variables.iter().map(|v| reg.name(*v).to_string()).collect(),
            objective: ObjectiveJson {
                sense: self.sense,
                poly: self.objective.to_text(reg),
            },
            constraints: self
                .constraints
                .iter()
                .map(|c| ConditionJson {
                    poly: c.poly.to_text(reg),
                    rel: c.rel,
                })
                .collect(),
            provenance: self
                .provenance
                .iter()
                .map(|(v, e)| (reg.name(*v).to_string(), e.to_text(reg)))
                .collect(),
        }
    }

    pub fn from_json(j: &ProgramJson) -> Result<Self> {
        let mut reg = Registry::with_vars(&j.variables);
        let variables: Vec<VarId> = reg.vars().collect();
        let strict = Parser { allow_new_vars: false };
        let poly = |s: &str, reg: &mut Registry| -> Result<MultiPoly> {
            let p = parse_poly(s, reg)?;
            if reg.len() != variables.len() {
                return Err(Error::Validation(format!("undeclared variable in '{s}'")));
            }
            Ok(p)
        };
        let objective = poly(&j.objective.poly, &mut reg)?;
        let constraints = j
            .constraints
            .iter()
            .map(|c| Ok(SignCondition::new(poly(&c.poly, &mut reg)?, c.rel)))
            .collect::<Result<_>>()?;
        let provenance = j
            .provenance
            .iter()
            .map(|(n, e)| {
                let v = reg
                    .lookup(n)
                    .ok_or_else(|| Error::Validation(format!("provenance names unknown variable {n}")))?;
                Ok((v, strict.parse(e, &mut reg)?))
            })
            .collect::<Result<_>>()?;
        Ok(PolynomialProgram {
            registry: reg,
            variables,
            sense: j.objective.sense,
            objective,
            constraints,
            provenance,
            label: j.label.clone(),
            component: Vec::new(),
            sample: Point::new(),
        })
    }
}

impl ReformulationResult {
    pub fn to_json(&self) -> ResultJson {
        ResultJson {
            children: self.children.iter().map(PolynomialProgram::to_json).collect(),
            aux_count_ours: self.aux_count_ours,
            aux_count_baseline: self.aux_count_baseline,
            density_note: self.density_note,
        }
    }

    pub fn from_json(j: &ResultJson) -> Result<Self> {
        Ok(ReformulationResult {
            children: j.children.iter().map(PolynomialProgram::from_json).collect::<Result<_>>()?,
            aux_count_ours: j.aux_count_ours,
            aux_count_baseline: j.aux_count_baseline,
            density_note: j.density_note,
            warnings: Vec::new(),
        })
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        Self::from_json(&serde_json::from_str(s).map_err(json_err)?)
    }
}

/// Parse a standalone expression against an existing registry.
pub fn parse_expr(text: &str, reg: &mut Registry) -> Result<RadicalExpr> {
    normalize(&parse(text, reg)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn problem_json_loading() {
        let src = r#"{"variables": ["x"], "objective": {"sense": "min", "expr": "sqrt(x)"},
                      "constraints": [{"expr": "x", "rel": ">"}]}"#;
        let p = AlgebraicProgram::from_json_str(src).unwrap();
        assert_eq!(p.constraints.len(), 1);
        assert_eq!(p.polynomial_constraints().len(), 1);
        let bad = r#"{"variables": ["x"], "objective": {"sense": "min", "expr": "sqrt(y)"}}"#;
        assert!(matches!(AlgebraicProgram::from_json_str(bad), Err(Error::Parse { .. })));
        let ne = r#"{"variables": ["x"], "objective": {"sense": "max", "expr": "x"},
                     "constraints": [{"expr": "x", "rel": "!="}]}"#;
        assert!(matches!(AlgebraicProgram::from_json_str(ne), Err(Error::Validation(_))));
        assert!(AlgebraicProgram::from_json_str("{").is_err());
    }
}
