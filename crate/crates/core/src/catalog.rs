//! Built-in scenario catalog and its verification against recomputation.

use std::path::Path;

use serde::Serialize;

use crate::error::ScenarioError;
use crate::normality::{betti_quotient, check_normality, effective_weight, Criterion, Verdict};
use crate::quotient::{auto_glue, bb_quotient, compare_lattices, quotient_middle_lattice, Check};
use crate::scenario::{load_scenario, parse_scenario, Scenario};

/// Directory of `*.json` scenarios that replaces the built-in catalog.
pub const CATALOG_ENV: &str = "QUOTIENT_COHO_CATALOG";

macro_rules! builtin {
    ($($name:literal),* $(,)?) => {
        &[$(($name, include_str!(concat!("../data/", $name, ".json")))),*]
    };
}

const BUILTIN: &[(&str, &str)] = builtin![
    "y2", "y3", "y5", "y7", "z3", "z5", "z7", "z11", "z17", "z19", "abar", "mprime", "m3", "m5", "m11a", "m11b",
    "natural3", "counterexample", "pp3", "pp5", "pp7",
];

pub fn builtin_catalog() -> Result<Vec<Scenario>, ScenarioError> {
    BUILTIN
        .iter()
        .map(|(file, text)| {
            parse_scenario(text).map_err(|e| match e {
                ScenarioError::SchemaError { path, msg } => ScenarioError::SchemaError { path: format!("{file}.json: {path}"), msg },
                other => other,
            })
        })
        .collect()
}

/// Loads every `*.json` in `dir`, ordered by file name.
pub fn catalog_from_dir(dir: &Path) -> Result<Vec<Scenario>, ScenarioError> {
    let rd = std::fs::read_dir(dir).map_err(|e| ScenarioError::Io(format!("{}: {e}", dir.display())))?;
    let mut files: Vec<_> = rd
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    files.sort();
    files.iter().map(|p| load_scenario(p)).collect()
}

/// The catalog named by the environment override, else the built-in one.
pub fn load_catalog() -> Result<Vec<Scenario>, ScenarioError> {
    match std::env::var_os(CATALOG_ENV) {
        Some(dir) if !dir.is_empty() => catalog_from_dir(Path::new(&dir)),
        _ => builtin_catalog(),
    }
}

pub fn find_scenario<'a>(catalog: &'a [Scenario], name: &str) -> Option<&'a Scenario> {
    catalog.iter().find(|s| s.matches(name))
}

fn selected(s: &Scenario, filter: &str) -> bool {
    let f = filter.to_ascii_lowercase();
    s.matches(filter) || s.name.to_ascii_lowercase().starts_with(&f)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CatalogRow {
    pub name: String,
    pub reference_only: bool,
    pub checks: Vec<Check>,
    pub error: Option<String>,
    pub pass: bool,
}

impl CatalogRow {
    pub fn first_failure(&self) -> Option<String> {
        if let Some(e) = &self.error {
            return Some(e.clone());
        }
        self.checks
            .iter()
            .find(|c| !c.pass)
            .map(|c| format!("{}: found {}, expected {}", c.what, c.found, c.expected))
    }
}

fn verdict_name(v: Verdict) -> &'static str {
    match v {
        Verdict::Normal => "normal",
        Verdict::NotNormal => "not_normal",
        Verdict::Unknown => "unknown",
    }
}

fn run_checks(s: &Scenario, checks: &mut Vec<Check>) -> Result<(), String> {
    let Some(exp) = &s.expected else {
        return Err("no expected block".into());
    };
    if exp.verdict.is_some() || exp.chain.is_some() || exp.alpha.is_some() {
        let r = check_normality(s, Criterion::Auto).map_err(|e| format!("normality: {e}"))?;
        if let Some(v) = exp.verdict {
            checks.push(Check::new("verdict", verdict_name(r.verdict), verdict_name(v)));
        }
        if let Some(c) = &exp.criterion {
            checks.push(Check::new("criterion", &r.criterion, c));
        }
        if let Some([l, m, rt]) = exp.chain {
            let found = r.chain.map_or("none".to_string(), |c| format!("{} >= {} >= {}", c.left, c.middle, c.right));
            checks.push(Check::new("chain", found, format!("{l} >= {m} >= {rt}")));
        }
        if let Some(a) = exp.alpha {
            let (lo, hi) = r.alpha_bounds;
            checks.push(Check::new("alpha", format!("{lo}..={hi}"), format!("{a}..={a}")));
        }
    }
    if let Some(q) = &exp.quotient {
        let l = s.invariant_lattice.as_ref().ok_or("expected quotient but no invariant lattice")?;
        if s.complex_dimension == 2 {
            let m = quotient_middle_lattice(l, s.prime).map_err(|e| format!("quotient: {e}"))?;
            checks.extend(compare_lattices(&m, q, exp.exact_gram));
        } else {
            let glue = match &s.glue {
                Some(g) => g.clone(),
                None => auto_glue(l, s.prime).map_err(|e| format!("glue: {e}"))?,
            };
            let res = bb_quotient(l, s.prime, &glue).map_err(|e| format!("quotient: {e}"))?;
            checks.extend(compare_lattices(&res.lattice, q, exp.exact_gram));
            if let Some(c) = exp.fujiki_constant {
                checks.push(Check::new("Fujiki constant", &res.fujiki_constant, c));
            }
        }
    }
    if let Some(b) = &exp.betti {
        let r = s.invariant_lattice.as_ref().ok_or("expected Betti numbers but no invariant lattice")?.rank() as u64;
        let qb = betti_quotient(r, s.prime).map_err(|e| format!("betti: {e}"))?;
        checks.push(Check::new("b2, b4, euler", format!("{}, {}, {}", qb.b2, qb.b4, qb.euler), format!("{}, {}, {}", b.b2, b.b4, b.euler)));
    }
    if let Some(n) = exp.fixed_count {
        checks.push(Check::new("fixed points", s.fixed_locus.isolated_count(), n));
    }
    if let Some(w) = &exp.weights {
        let found: Vec<String> =
            s.fixed_locus.isolated.iter().map(|g| effective_weight(g, s.complex_dimension).to_string()).collect();
        let want: Vec<String> = w.iter().map(|x| x.to_string()).collect();
        checks.push(Check::new("weights", found.join(","), want.join(",")));
    }
    Ok(())
}

pub fn verify_scenario(s: &Scenario) -> CatalogRow {
    let mut checks = Vec::new();
    if s.reference_only {
        checks.push(Check::flag("reference entry", true, "not recomputed", "-"));
        return CatalogRow { name: s.name.clone(), reference_only: true, checks, error: None, pass: true };
    }
    let error = run_checks(s, &mut checks).err();
    let pass = error.is_none() && checks.iter().all(|c| c.pass);
    CatalogRow { name: s.name.clone(), reference_only: false, checks, error, pass }
}

/// Rows in catalog order; independent scenarios are checked in parallel when
/// the `parallel` feature is on.
pub fn verify_catalog(catalog: &[Scenario], filter: Option<&str>) -> Vec<CatalogRow> {
    let chosen: Vec<&Scenario> = catalog.iter().filter(|s| filter.is_none_or(|f| selected(s, f))).collect();
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        chosen.par_iter().map(|s| verify_scenario(s)).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        chosen.iter().map(|s| verify_scenario(s)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_parses() {
        let c = builtin_catalog().unwrap();
        assert_eq!(c.len(), BUILTIN.len());
        assert!(find_scenario(&c, "k3-sympl-7").is_some());
    }

    #[test]
    fn filter_by_prefix_and_alias() {
        let c = builtin_catalog().unwrap();
        let rows = verify_catalog(&c, Some("M11"));
        assert_eq!(rows.iter().map(|r| r.name.as_str()).collect::<Vec<_>>(), ["M11a", "M11b"]);
    }

    #[test]
    fn every_entry_passes() {
        let c = builtin_catalog().unwrap();
        let bad: Vec<String> = verify_catalog(&c, None)
            .into_iter()
            .filter(|r| !r.pass)
            .map(|r| format!("{}: {:?}", r.name, r.first_failure()))
            .collect();
        assert!(bad.is_empty(), "{bad:#?}");
    }
}
