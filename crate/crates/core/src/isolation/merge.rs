use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::isolate::root_conditions;
use super::{derivative_tower, CertificateEntry, ComponentDescription, IsolationCertificate, SignCondition};
use crate::error::Result;
use crate::expr::RadicalExpr;
use crate::par;
use crate::poly::{Point, Rational, VarId};
use crate::verify::{check_point, Selection};

#[derive(Debug, Clone)]
pub struct MergeConfig {
    /// Relax strict conditions to their closures after merging.
    pub allow_boundary: bool,
    /// Validation points per merged entry.
    pub samples: usize,
    pub seed: u64,
    pub precision: u32,
    /// Half-width of the validation box around each original sample.
    pub radius: i64,
}

impl Default for MergeConfig {
    fn default() -> Self {
        MergeConfig {
            allow_boundary: false,
            samples: 64,
            seed: 0,
            precision: 64,
            radius: 2,
        }
    }
}

fn relax(conds: &[SignCondition]) -> Vec<SignCondition> {
    conds
        .iter()
        .map(|c| SignCondition::new(c.poly.clone(), c.rel.relaxed()))
        .collect()
}

fn near(center: &Point, vars: &[VarId], radius: i64, rng: &mut ChaCha8Rng) -> Point {
    const GRAIN: i64 = 1 << 16;
    vars.iter()
        .map(|&v| {
            let c = center.get(&v).cloned().unwrap_or_default();
            let k = rng.gen_range(-GRAIN..=GRAIN);
            (v, c + Rational::new((k * radius).into(), GRAIN.into()))
        })
        .collect()
}

// Sample around every original sample; points inside the merged component
// that are not degenerate must select exactly the value of `f`.
fn validate(
    f: &RadicalExpr,
    cert: &IsolationCertificate,
    merged: &CertificateEntry,
    origins: &[&Point],
    vars: &[VarId],
    cfg: &MergeConfig,
    seed: u64,
) -> Result<bool> {
    let want = cfg.samples.max(1);
    let checked = par::sample_until(want * 4, want, |i| -> Result<Option<bool>> {
        let mut rng = ChaCha8Rng::seed_from_u64(par::derive_seed(seed, i as u64));
        let origin = origins[i % origins.len()];
        let a = if i < origins.len() {
            origin.clone()
        } else {
            near(origin, vars, cfg.radius, &mut rng)
        };
        if !merged.component.contains(&a)? {
            return Ok(None);
        }
        match check_point(f, &cert.defining, cert.z, &merged.root_conditions, &a, cfg.precision)? {
            Selection::Boundary | Selection::NotReal => Ok(None),
            s => Ok(Some(s == Selection::Unique)),
        }
    }, |ok| !ok)?;
    Ok(!checked.is_empty() && checked.iter().all(|&ok| ok))
}

/// Merge entries whose derivative sign vectors agree into one entry whose
/// component conditions are those shared by all members. Each merge is
/// validated by exact sampling; a merge that fails validation keeps its
/// members separate and records a warning.
pub fn merge_components(f: &RadicalExpr, cert: &IsolationCertificate, cfg: &MergeConfig) -> Result<IsolationCertificate> {
    let tower = derivative_tower(&cert.defining, cert.z);
    let vars: Vec<VarId> = f.vars().into_iter().collect();
    let mut groups: BTreeMap<&[i8], Vec<&CertificateEntry>> = BTreeMap::new();
    for e in &cert.entries {
        groups.entry(&e.signs).or_default().push(e);
    }
    let mut entries = Vec::new();
    let mut warnings = cert.warnings.clone();
    for (k, (signs, members)) in groups.into_iter().enumerate() {
        let first = &members[0].component;
        let shared: Vec<SignCondition> = first
            .conditions
            .iter()
            .filter(|c| members.iter().all(|m| m.component.conditions.contains(c)))
            .cloned()
            .collect();
        let mut root = root_conditions(&cert.defining, cert.z, &tower, signs, &shared);
        let mut conditions = shared;
        if cfg.allow_boundary {
            root = relax(&root);
            conditions = relax(&conditions);
        }
        let label = members
            .iter()
            .map(|m| m.component.label.as_str())
            .collect::<Vec<_>>()
            .join("+");
        let merged = CertificateEntry {
            component: ComponentDescription {
                conditions,
                sample: first.sample.clone(),
                label: label.clone(),
            },
            root_conditions: root,
            signs: signs.to_vec(),
        };
        let origins: Vec<&Point> = members.iter().map(|m| &m.component.sample).collect();
        if validate(f, cert, &merged, &origins, &vars, cfg, par::derive_seed(cfg.seed, k as u64))? {
            entries.push(merged);
        } else {
            warnings.push(format!("merge of {label} failed validation; kept separate"));
            entries.extend(members.into_iter().cloned());
        }
    }
    Ok(IsolationCertificate {
        z: cert.z,
        defining: cert.defining.clone(),
        entries,
        strategy: cert.strategy,
        skipped_components: cert.skipped_components,
        warnings,
    })
}
