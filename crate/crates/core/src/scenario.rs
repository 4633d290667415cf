//! Scenario files: every input of one pair (X, G) in a single JSON document.

use std::collections::BTreeMap;
use std::path::Path;

use num_bigint::BigInt;
use serde::Deserialize;

use crate::error::ScenarioError;
use crate::expr::parse_lattice_expr;
use crate::gmodule::{jordan_profile, sym2_profile, CohomologyProfile, JordanProfile, PrimeOrderAction};
use crate::lattice::GramLattice;
use crate::matrix::{is_prime, Matrix};
use crate::normality::{Criterion, FixedComponent, FixedLocusSummary, FixedPointLocal, IsolatedGroup, Verdict, Witness};
use crate::quotient::GlueSpec;
use crate::toric::WeightValue;

/// Integer given either as a JSON number or as a decimal string.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum IntLit {
    Small(i64),
    Big(String),
}

impl IntLit {
    fn to_bigint(&self) -> Option<BigInt> {
        match self {
            IntLit::Small(n) => Some(BigInt::from(*n)),
            IntLit::Big(s) => s.trim().parse().ok(),
        }
    }
}

fn schema(path: impl Into<String>, msg: impl Into<String>) -> ScenarioError {
    ScenarioError::SchemaError { path: path.into(), msg: msg.into() }
}

fn to_matrix(rows: &[Vec<IntLit>], path: &str) -> Result<Matrix, ScenarioError> {
    let cols = rows.first().map_or(0, |r| r.len());
    let mut out = Vec::with_capacity(rows.len());
    for (i, r) in rows.iter().enumerate() {
        if r.len() != cols {
            return Err(schema(format!("{path}[{i}]"), "ragged matrix"));
        }
        let row: Option<Vec<BigInt>> = r.iter().map(IntLit::to_bigint).collect();
        out.push(row.ok_or_else(|| schema(format!("{path}[{i}]"), "entry is not an integer"))?);
    }
    if out.is_empty() {
        return Err(schema(path, "empty matrix"));
    }
    Ok(Matrix::from_row_vecs(out, cols))
}

fn yes() -> bool {
    true
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    name: String,
    #[serde(default)]
    aliases: Vec<String>,
    prime: u64,
    complex_dimension: u32,
    #[serde(default = "yes")]
    kahler: bool,
    #[serde(default)]
    simply_connected: Option<bool>,
    #[serde(default = "yes")]
    torsion_free: bool,
    #[serde(default)]
    profiles: BTreeMap<String, RawProfile>,
    #[serde(default)]
    fixed_locus: RawFixedLocus,
    #[serde(default)]
    invariant_lattice: Option<RawLattice>,
    #[serde(default)]
    glue: Option<RawGlue>,
    #[serde(default)]
    normality_degree: Option<u32>,
    #[serde(default)]
    criterion: Option<Criterion>,
    #[serde(default)]
    witness: Option<RawWitness>,
    #[serde(default)]
    expected: Option<RawExpected>,
    #[serde(default)]
    reference_only: bool,
    #[serde(default)]
    source: Option<String>,
    #[serde(default)]
    notes: Vec<String>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawProfile {
    #[serde(default)]
    l: Option<BTreeMap<String, u64>>,
    #[serde(default)]
    l1_plus: Option<u64>,
    #[serde(default)]
    l1_minus: Option<u64>,
    #[serde(default)]
    sym2_of: Option<u32>,
    #[serde(default)]
    matrix: Option<Vec<Vec<IntLit>>>,
    #[serde(default)]
    gram: Option<Vec<Vec<IntLit>>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFixedLocus {
    #[serde(default)]
    isolated: Vec<RawIsolated>,
    #[serde(default)]
    components: Vec<RawComponent>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawIsolated {
    #[serde(default)]
    exponents: Option<Vec<u64>>,
    count: u64,
    #[serde(default)]
    weight: Option<WeightValue>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawComponent {
    label: String,
    dimension: u32,
    even_betti_sum: u64,
    #[serde(default)]
    odd_betti_sum: u64,
    #[serde(default = "yes")]
    connected: bool,
    #[serde(default)]
    simply_connected: bool,
    #[serde(default)]
    primitive_class: bool,
    #[serde(default = "yes")]
    torsion_free: bool,
    #[serde(default)]
    exponents: Option<Vec<u64>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawLattice {
    #[serde(default)]
    expr: Option<String>,
    #[serde(default)]
    gram: Option<Vec<Vec<IntLit>>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGlue {
    transform: Vec<Vec<IntLit>>,
    divided: Vec<bool>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawWitness {
    degree: u32,
    vector: Vec<IntLit>,
    description: String,
    pushforward_divisible: bool,
    alpha_upper: u64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawExpected {
    #[serde(default)]
    verdict: Option<Verdict>,
    #[serde(default)]
    criterion: Option<String>,
    #[serde(default)]
    alpha: Option<u64>,
    #[serde(default)]
    chain: Option<[i64; 3]>,
    #[serde(default)]
    quotient: Option<RawLattice>,
    #[serde(default)]
    exact_gram: bool,
    #[serde(default)]
    fujiki_constant: Option<u64>,
    #[serde(default)]
    betti: Option<ExpectedBetti>,
    #[serde(default)]
    fixed_count: Option<u64>,
    #[serde(default)]
    weights: Option<Vec<u8>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExpectedBetti {
    pub b2: u64,
    pub b4: u64,
    pub euler: u64,
}

/// Expected results stored with a catalog entry.
#[derive(Clone, Debug, Default)]
pub struct Expected {
    pub verdict: Option<Verdict>,
    pub criterion: Option<String>,
    pub alpha: Option<u64>,
    pub chain: Option<[i64; 3]>,
    pub quotient: Option<GramLattice>,
    pub quotient_expr: Option<String>,
    /// compare the Gram entry by entry rather than up to isometry invariants
    pub exact_gram: bool,
    pub fujiki_constant: Option<u64>,
    pub betti: Option<ExpectedBetti>,
    pub fixed_count: Option<u64>,
    pub weights: Option<Vec<u8>>,
}

/// A validated scenario.
#[derive(Clone, Debug)]
pub struct Scenario {
    pub name: String,
    pub aliases: Vec<String>,
    pub prime: u64,
    pub complex_dimension: u32,
    pub kahler: bool,
    pub simply_connected: Option<bool>,
    pub profile: CohomologyProfile,
    pub actions: BTreeMap<u32, PrimeOrderAction>,
    pub fixed_locus: FixedLocusSummary,
    pub invariant_lattice: Option<GramLattice>,
    pub invariant_lattice_expr: Option<String>,
    pub glue: Option<GlueSpec>,
    pub normality_degree: u32,
    pub criterion: Option<Criterion>,
    pub witness: Option<Witness>,
    pub expected: Option<Expected>,
    pub reference_only: bool,
    pub source: Option<String>,
    pub notes: Vec<String>,
}

impl Scenario {
    pub fn matches(&self, name: &str) -> bool {
        let n = name.to_ascii_lowercase();
        self.name.to_ascii_lowercase() == n || self.aliases.iter().any(|a| a.to_ascii_lowercase() == n)
    }
}

pub fn parse_scenario(text: &str) -> Result<Scenario, ScenarioError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let raw: RawScenario = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        schema(if path == "." { "<root>".to_string() } else { path }, e.into_inner().to_string())
    })?;
    resolve(raw)
}

pub fn load_scenario(path: &Path) -> Result<Scenario, ScenarioError> {
    let text = std::fs::read_to_string(path).map_err(|e| ScenarioError::Io(format!("{}: {e}", path.display())))?;
    parse_scenario(&text)
}

fn lattice_from(raw: &RawLattice, path: &str) -> Result<(GramLattice, Option<String>), ScenarioError> {
    match (&raw.expr, &raw.gram) {
        (Some(e), None) => {
            let l = parse_lattice_expr(e).map_err(|err| schema(format!("{path}.expr"), err.to_string()))?;
            Ok((l, Some(e.clone())))
        }
        (None, Some(g)) => {
            let m = to_matrix(g, &format!("{path}.gram"))?;
            let l = GramLattice::new(m).map_err(|err| schema(format!("{path}.gram"), err.to_string()))?;
            Ok((l, None))
        }
        _ => Err(schema(path, "give exactly one of expr or gram")),
    }
}

fn resolve(raw: RawScenario) -> Result<Scenario, ScenarioError> {
    let p = raw.prime;
    if !is_prime(p) {
        return Err(schema("prime", format!("{p} is not prime")));
    }
    let dim = raw.complex_dimension;
    if dim == 0 {
        return Err(schema("complex_dimension", "must be positive"));
    }
    let top = 2 * dim;

    let mut cp = CohomologyProfile::new(p, dim, raw.torsion_free);
    let mut actions = BTreeMap::new();
    let mut sym2: Vec<(u32, u32)> = Vec::new();
    for (key, rp) in &raw.profiles {
        let path = format!("profiles.{key}");
        let deg: u32 = key.parse().map_err(|_| schema(&path, "degree must be an integer"))?;
        if deg > top {
            return Err(schema(&path, format!("degree exceeds {top}")));
        }
        let kinds = [rp.l.is_some() || rp.l1_plus.is_some() || rp.l1_minus.is_some(), rp.sym2_of.is_some(), rp.matrix.is_some()];
        if kinds.iter().filter(|&&k| k).count() != 1 {
            return Err(schema(&path, "give exactly one of an l-table, sym2_of, or an action matrix"));
        }
        if let Some(src) = rp.sym2_of {
            sym2.push((deg, src));
        } else if let Some(m) = &rp.matrix {
            let phi = to_matrix(m, &format!("{path}.matrix"))?;
            let gram = rp.gram.as_ref().map(|g| to_matrix(g, &format!("{path}.gram"))).transpose()?;
            let action = PrimeOrderAction::new(p, phi, gram).map_err(|e| schema(&path, e.to_string()))?;
            cp.set(deg, jordan_profile(&action));
            actions.insert(deg, action);
        } else {
            let mut counts = Vec::new();
            for (q, n) in rp.l.clone().unwrap_or_default() {
                let q: u64 = q.parse().map_err(|_| schema(format!("{path}.l.{q}"), "block size must be an integer"))?;
                if q == 0 || q > p {
                    return Err(schema(format!("{path}.l.{q}"), format!("block size outside 1..={p}")));
                }
                counts.push((q, n));
            }
            let jp = if p == 2 {
                let l2 = counts.iter().find(|c| c.0 == 2).map_or(0, |c| c.1);
                let l1 = counts.iter().find(|c| c.0 == 1).map(|c| c.1);
                let (plus, minus) = (rp.l1_plus.unwrap_or(0), rp.l1_minus.unwrap_or(0));
                if l1.is_some_and(|l1| l1 != plus + minus) {
                    return Err(schema(&path, "l.1 must equal l1_plus + l1_minus"));
                }
                if l1.is_some() && rp.l1_plus.is_none() && rp.l1_minus.is_none() {
                    return Err(schema(&path, "p = 2 needs l1_plus and l1_minus"));
                }
                JordanProfile::p2(plus, minus, l2)
            } else {
                if rp.l1_plus.is_some() || rp.l1_minus.is_some() {
                    return Err(schema(&path, "l1_plus and l1_minus only apply to p = 2"));
                }
                JordanProfile::new(p, counts)
            };
            cp.set(deg, jp);
        }
    }
    for (deg, src) in sym2 {
        let base = cp
            .profiles
            .get(&src)
            .cloned()
            .ok_or_else(|| schema(format!("profiles.{deg}.sym2_of"), format!("degree {src} has no profile")))?;
        let jp = sym2_profile(&base).map_err(|e| schema(format!("profiles.{deg}"), e.to_string()))?;
        cp.set(deg, jp);
    }
    // Poincaré duality for the missing half, then the units in degrees 0 and 2n
    let given: Vec<(u32, JordanProfile)> = cp.profiles.iter().map(|(k, v)| (*k, v.clone())).collect();
    for (k, jp) in given {
        cp.profiles.entry(top - k).or_insert(jp);
    }
    cp = cp.with_unit_degrees();
    cp.check_shape().map_err(ScenarioError::ConsistencyError)?;

    let (invariant_lattice, invariant_lattice_expr) = match &raw.invariant_lattice {
        Some(rl) => {
            let (l, e) = lattice_from(rl, "invariant_lattice")?;
            (Some(l), e)
        }
        None => (None, None),
    };
    if let (Some(l), Some(jp)) = (&invariant_lattice, cp.profiles.get(&2)) {
        if raw.profiles.contains_key("2") && l.rank() as u64 != jp.invariant_rank() {
            return Err(ScenarioError::ConsistencyError(format!(
                "invariant lattice has rank {} but the degree-2 profile gives l_1 + l_p = {}",
                l.rank(),
                jp.invariant_rank()
            )));
        }
    }

    let mut fixed_locus = FixedLocusSummary::default();
    for (i, g) in raw.fixed_locus.isolated.iter().enumerate() {
        let path = format!("fixed_locus.isolated[{i}]");
        let point = match &g.exponents {
            Some(e) => {
                if e.len() != dim as usize {
                    return Err(schema(format!("{path}.exponents"), format!("expected {dim} exponents")));
                }
                if e.contains(&0) {
                    return Err(schema(format!("{path}.exponents"), "isolated points have nonzero exponents"));
                }
                Some(FixedPointLocal::new(p, e.clone()).map_err(|m| schema(format!("{path}.exponents"), m))?)
            }
            None => None,
        };
        if let Some(WeightValue::Exact(w)) = g.weight {
            if w > 2 {
                return Err(schema(format!("{path}.weight"), "weights lie in 0..=2"));
            }
        }
        fixed_locus.isolated.push(IsolatedGroup { point, count: g.count, weight: g.weight });
    }
    for (i, c) in raw.fixed_locus.components.iter().enumerate() {
        let path = format!("fixed_locus.components[{i}]");
        if c.dimension == 0 || c.dimension >= dim {
            return Err(schema(format!("{path}.dimension"), "components have dimension 1..n-1"));
        }
        if let Some(e) = &c.exponents {
            let zeros = e.iter().filter(|&&k| k == 0).count();
            if e.len() != dim as usize || zeros != c.dimension as usize {
                return Err(schema(format!("{path}.exponents"), "need n exponents with one zero per tangent direction"));
            }
        }
        fixed_locus.components.push(FixedComponent {
            label: c.label.clone(),
            dimension: c.dimension,
            even_betti_sum: c.even_betti_sum,
            odd_betti_sum: c.odd_betti_sum,
            connected: c.connected,
            simply_connected: c.simply_connected,
            primitive_class: c.primitive_class,
            torsion_free: c.torsion_free,
            exponents: c.exponents.clone(),
        });
    }

    let glue = match &raw.glue {
        Some(g) => {
            let t = to_matrix(&g.transform, "glue.transform")?;
            let spec = GlueSpec::new(t, g.divided.clone()).map_err(|e| schema("glue", e.to_string()))?;
            if let Some(l) = &invariant_lattice {
                if spec.transform.ncols() != l.rank() {
                    return Err(ScenarioError::ConsistencyError("glue transform does not match the lattice rank".into()));
                }
            }
            Some(spec)
        }
        None => None,
    };

    let witness = match &raw.witness {
        Some(w) => {
            let vector: Option<Vec<BigInt>> = w.vector.iter().map(IntLit::to_bigint).collect();
            let vector = vector.ok_or_else(|| schema("witness.vector", "entry is not an integer"))?;
            if !actions.contains_key(&w.degree) {
                return Err(schema("witness.degree", "the witness degree needs an action matrix profile"));
            }
            Some(Witness {
                degree: w.degree,
                vector,
                description: w.description.clone(),
                pushforward_divisible: w.pushforward_divisible,
                alpha_upper: w.alpha_upper,
            })
        }
        None => None,
    };

    let expected = match raw.expected {
        Some(e) => {
            let (quotient, quotient_expr) = match &e.quotient {
                Some(q) => {
                    let (l, ex) = lattice_from(q, "expected.quotient")?;
                    (Some(l), ex)
                }
                None => (None, None),
            };
            Some(Expected {
                verdict: e.verdict,
                criterion: e.criterion,
                alpha: e.alpha,
                chain: e.chain,
                quotient,
                quotient_expr,
                exact_gram: e.exact_gram,
                fujiki_constant: e.fujiki_constant,
                betti: e.betti,
                fixed_count: e.fixed_count,
                weights: e.weights,
            })
        }
        None => None,
    };

    let normality_degree = raw.normality_degree.unwrap_or(dim);
    if normality_degree > top {
        return Err(schema("normality_degree", format!("exceeds {top}")));
    }

    Ok(Scenario {
        name: raw.name,
        aliases: raw.aliases,
        prime: p,
        complex_dimension: dim,
        kahler: raw.kahler,
        simply_connected: raw.simply_connected,
        profile: cp,
        actions,
        fixed_locus,
        invariant_lattice,
        invariant_lattice_expr,
        glue,
        normality_degree,
        criterion: raw.criterion,
        witness,
        expected,
        reference_only: raw.reference_only,
        source: raw.source,
        notes: raw.notes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{
        "name": "y5", "prime": 5, "complex_dimension": 2, "simply_connected": true,
        "profiles": {"2": {"l": {"1": 2, "5": 4}}},
        "fixed_locus": {"isolated": [{"count": 4}]},
        "invariant_lattice": {"expr": "U+U(5)^2"}
    }"#;

    #[test]
    fn minimal_scenario_resolves() {
        let s = parse_scenario(MINIMAL).unwrap();
        assert_eq!(s.profile.trivial(0), 1);
        assert_eq!(s.profile.trivial(4), 1);
        assert_eq!(s.profile.free(2), 4);
        assert_eq!(s.normality_degree, 2);
        assert_eq!(s.fixed_locus.isolated_count(), 4);
    }

    #[test]
    fn missing_prime_is_a_schema_error() {
        let text = MINIMAL.replace("\"prime\": 5,", "");
        assert!(matches!(parse_scenario(&text), Err(ScenarioError::SchemaError { .. })));
    }

    #[test]
    fn rank_mismatch_is_a_consistency_error() {
        let text = MINIMAL.replace("U+U(5)^2", "U+U(5)^2+(-2)");
        assert!(matches!(parse_scenario(&text), Err(ScenarioError::ConsistencyError(_))));
    }

    #[test]
    fn schema_errors_carry_paths() {
        let text = MINIMAL.replace("\"count\": 4", "\"count\": \"four\"");
        match parse_scenario(&text) {
            Err(ScenarioError::SchemaError { path, .. }) => assert!(path.contains("isolated"), "{path}"),
            other => panic!("{other:?}"),
        }
        let text = MINIMAL.replace("\"prime\": 5", "\"prime\": 6");
        assert!(matches!(parse_scenario(&text), Err(ScenarioError::SchemaError { path, .. }) if path == "prime"));
    }

    #[test]
    fn sym2_and_duality_fill() {
        let text = r#"{"name": "m", "prime": 3, "complex_dimension": 4,
            "profiles": {"2": {"l": {"1": 5, "3": 6}}, "4": {"sym2_of": 2}}}"#;
        let s = parse_scenario(text).unwrap();
        assert_eq!(s.profile.trivial(4), 15);
        assert_eq!(s.profile.free(4), 87);
        assert_eq!(s.profile.free(6), 6);
    }

    #[test]
    fn action_profiles() {
        let text = r#"{"name": "c", "prime": 3, "complex_dimension": 1,
            "profiles": {"1": {"matrix": [[0,0,1],[1,0,0],[0,1,0]]}}}"#;
        let s = parse_scenario(text).unwrap();
        assert_eq!(s.profile.free(1), 1);
        assert!(s.actions.contains_key(&1));
    }
}
