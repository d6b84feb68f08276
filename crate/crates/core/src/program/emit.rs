use std::fmt::Write as _;

use num_bigint::BigInt;
use num_traits::{One, Signed};

use super::{PolynomialProgram, ReformulationResult};
use crate::isolation::Relation;
use crate::poly::{Monomial, MultiPoly, Rational, Registry};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Smtlib,
    Human,
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "json" => Ok(Format::Json),
            "smtlib" | "smt2" => Ok(Format::Smtlib),
            "human" => Ok(Format::Human),
            other => Err(format!("unknown format '{other}' (json, smtlib, human)")),
        }
    }
}

fn smt_int(n: &BigInt) -> String {
    if n.is_negative() {
        format!("(- {})", -n)
    } else {
        n.to_string()
    }
}

fn smt_rational(c: &Rational) -> String {
    if c.is_integer() {
        smt_int(c.numer())
    } else {
        format!("(/ {} {})", smt_int(c.numer()), c.denom())
    }
}

// Term with a nonnegative coefficient.
fn smt_term(c: &Rational, m: &Monomial, reg: &Registry) -> String {
    let mut factors = Vec::new();
    if !c.is_one() || m.is_one() {
        factors.push(smt_rational(c));
    }
    for &(v, e) in m.pairs() {
        for _ in 0..e {
            factors.push(reg.name(v).to_string());
        }
    }
    if factors.len() == 1 {
        factors.pop().unwrap()
    } else {
        format!("(* {})", factors.join(" "))
    }
}

/// SMT-LIB term for `p`, written as positive part minus negative part.
pub fn smt_poly(p: &MultiPoly, reg: &Registry) -> String {
    let mut pos = Vec::new();
    let mut neg = Vec::new();
    for (m, c) in p.terms().rev() {
        if c.is_negative() {
            neg.push(smt_term(&-c, m, reg));
        } else {
            pos.push(smt_term(c, m, reg));
        }
    }
    let sum = |mut v: Vec<String>| match v.len() {
        0 => "0".to_string(),
        1 => v.pop().unwrap(),
        _ => format!("(+ {})", v.join(" ")),
    };
    match (pos.is_empty(), neg.is_empty()) {
        (_, true) => sum(pos),
        (true, false) => format!("(- {})", sum(neg)),
        (false, false) => format!("(- {} {})", sum(pos), neg.join(" ")),
    }
}

fn smt_condition(p: &MultiPoly, rel: Relation, reg: &Registry) -> String {
    let t = smt_poly(p, reg);
    match rel {
        Relation::Ne => format!("(not (= {t} 0))"),
        r => format!("({} {t} 0)", r.symbol()),
    }
}

fn smtlib(p: &PolynomialProgram) -> String {
    let reg = &p.registry;
    let mut out = String::new();
    writeln!(out, "; {}", p.label).unwrap();
    writeln!(out, "(set-logic QF_NRA)").unwrap();
    for v in &p.variables {
        writeln!(out, "(declare-fun {} () Real)", reg.name(*v)).unwrap();
    }
    for c in &p.constraints {
        writeln!(out, "(assert {})", smt_condition(&c.poly, c.rel, reg)).unwrap();
    }
    writeln!(out, "(check-sat)").unwrap();
    out
}

fn human(p: &PolynomialProgram) -> String {
    let reg = &p.registry;
    let mut out = String::new();
    writeln!(out, "[{}]", p.label).unwrap();
    writeln!(out, "{} {}", p.sense, p.objective.to_text(reg)).unwrap();
    if !p.constraints.is_empty() {
        writeln!(out, "such that").unwrap();
        for c in &p.constraints {
            writeln!(out, "  {}", c.to_text(reg)).unwrap();
        }
    }
    for (v, e) in &p.provenance {
        writeln!(out, "where {} = {}", reg.name(*v), e.to_text(reg)).unwrap();
    }
    out
}

/// Render a single polynomial program.
pub fn emit_program(p: &PolynomialProgram, format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&p.to_json()).expect("program serializes");
            s.push('\n');
            s
        }
        Format::Smtlib => smtlib(p),
        Format::Human => human(p),
    }
}

/// Render every child; SMT-LIB scripts are separated by `(reset)`.
pub fn emit_result(r: &ReformulationResult, format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&r.to_json()).expect("result serializes");
            s.push('\n');
            s
        }
        Format::Smtlib => r.children.iter().map(smtlib).collect::<Vec<_>>().join("(reset)\n"),
        Format::Human => {
            let mut out = format!(
                "auxiliary variables: {} (ours) vs {} (one per radical)\ndensity: {}\n",
                r.aux_count_ours, r.aux_count_baseline, r.density_note
            );
            for c in &r.children {
                out.push('\n');
                out.push_str(&human(c));
            }
            out
        }
    }
}
