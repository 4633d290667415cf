//! Certificate checkers for H^k-normality of (X, G).
//!
//! Every checker itemizes the hypotheses it evaluated. A failed hypothesis is
//! an error; a hypothesis that holds but whose conclusion is not reached gives
//! an `Unknown` verdict with bounds on the coefficient of normality.

use std::fmt;

use num_bigint::BigInt;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::NormalityError;
use crate::gmodule::{sym2_profile, CohomologyProfile, JordanProfile};
use crate::matrix::Matrix;
use crate::scenario::Scenario;
use crate::snf::coordinates_in;
use crate::toric::{weight_lookup, WeightValue};

/// Local action diag(ξ^k₁, ..., ξ^kₙ) at a fixed point, exponents sorted.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FixedPointLocal {
    pub p: u64,
    pub exponents: Vec<u64>,
}

impl FixedPointLocal {
    pub fn new(p: u64, mut exponents: Vec<u64>) -> Result<Self, String> {
        if exponents.iter().any(|&k| k >= p) {
            return Err(format!("exponents must lie in 0..{p}"));
        }
        if exponents.iter().all(|&k| k == 0) {
            return Err("at least one exponent must be nonzero".into());
        }
        exponents.sort_unstable();
        Ok(FixedPointLocal { p, exponents })
    }

    pub fn dimension(&self) -> usize {
        self.exponents.len()
    }

    pub fn zeros(&self) -> usize {
        self.exponents.iter().filter(|&&k| k == 0).count()
    }

    /// Number of exponents equal to `k`.
    pub fn count(&self, k: u64) -> usize {
        self.exponents.iter().filter(|&&e| e == k).count()
    }
}

impl fmt::Display for FixedPointLocal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let e: Vec<String> = self.exponents.iter().map(|k| k.to_string()).collect();
        write!(f, "1/{}({})", self.p, e.join(","))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PointType {
    Zero,
    One,
    Two,
    Other,
}

/// Type of the point and whether the quotient is smooth there.
pub fn classify_fixed_point(fp: &FixedPointLocal) -> (PointType, bool) {
    let e = &fp.exponents;
    let n = e.len();
    if e[..n - 1].iter().all(|&k| k == 0) {
        return (PointType::Zero, true);
    }
    let z = fp.zeros();
    if e[z..].iter().all(|&k| k == e[z]) {
        return (PointType::One, false);
    }
    if fp.p == 3 {
        (PointType::Two, false)
    } else {
        (PointType::Other, false)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IsolatedGroup {
    pub point: Option<FixedPointLocal>,
    pub count: u64,
    pub weight: Option<WeightValue>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FixedComponent {
    pub label: String,
    pub dimension: u32,
    pub even_betti_sum: u64,
    pub odd_betti_sum: u64,
    pub connected: bool,
    pub simply_connected: bool,
    pub primitive_class: bool,
    pub torsion_free: bool,
    /// Local exponents at a point of the component, zeros on tangent directions.
    pub exponents: Option<Vec<u64>>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FixedLocusSummary {
    pub isolated: Vec<IsolatedGroup>,
    pub components: Vec<FixedComponent>,
}

impl FixedLocusSummary {
    pub fn isolated_count(&self) -> u64 {
        self.isolated.iter().map(|g| g.count).sum()
    }

    pub fn is_finite(&self) -> bool {
        self.components.is_empty()
    }

    /// Σ even (dim X even) or odd (dim X odd) Betti numbers of Fix G.
    pub fn h2star(&self, complex_dimension: u32) -> u64 {
        let odd = complex_dimension % 2 == 1;
        let comps: u64 = self.components.iter().map(|c| if odd { c.odd_betti_sum } else { c.even_betti_sum }).sum();
        if odd {
            comps
        } else {
            comps + self.isolated_count()
        }
    }

    fn max_dimension(&self) -> Option<u32> {
        let comp = self.components.iter().map(|c| c.dimension).max();
        match (comp, self.isolated.is_empty()) {
            (Some(d), _) => Some(d),
            (None, false) => Some(0),
            (None, true) => None,
        }
    }

    fn torsion_free(&self) -> bool {
        self.components.iter().all(|c| c.torsion_free)
    }

    pub fn is_negligible(&self, complex_dimension: u32) -> bool {
        let Some(d) = self.max_dimension() else { return true };
        let codim = complex_dimension - d;
        self.torsion_free() && 2 * codim >= complex_dimension + 2
    }

    pub fn is_almost_negligible(&self, complex_dimension: u32) -> bool {
        let n = complex_dimension;
        if n % 2 == 1 || n < 4 || !self.torsion_free() {
            return false;
        }
        if self.max_dimension() != Some(n / 2) {
            return false;
        }
        let middle: Vec<&FixedComponent> = self.components.iter().filter(|c| c.dimension == n / 2).collect();
        middle.len() == 1 && middle[0].connected && middle[0].simply_connected && middle[0].primitive_class
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Normal,
    NotNormal,
    Unknown,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Verdict::Normal => "Normal",
            Verdict::NotNormal => "NotNormal",
            Verdict::Unknown => "Unknown",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Chain {
    pub left: i64,
    pub middle: i64,
    pub right: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HypothesisCheck {
    pub name: String,
    pub holds: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormalityReport {
    pub verdict: Verdict,
    pub degree: u32,
    pub criterion: String,
    pub alpha_bounds: (u64, u64),
    pub parity_ok: Option<bool>,
    pub chain: Option<Chain>,
    pub hypotheses: Vec<HypothesisCheck>,
    pub witness: Option<String>,
}

impl NormalityReport {
    fn new(criterion: &str, degree: u32) -> Self {
        NormalityReport {
            verdict: Verdict::Unknown,
            degree,
            criterion: criterion.to_string(),
            alpha_bounds: (0, 0),
            parity_ok: None,
            chain: None,
            hypotheses: Vec::new(),
            witness: None,
        }
    }

    fn check(&mut self, name: &str, holds: bool, detail: impl Into<String>) -> bool {
        self.hypotheses.push(HypothesisCheck { name: name.to_string(), holds, detail: detail.into() });
        holds
    }

    fn failures(&self) -> Result<(), NormalityError> {
        let failed: Vec<String> =
            self.hypotheses.iter().filter(|h| !h.holds).map(|h| format!("{} ({})", h.name, h.detail)).collect();
        if failed.is_empty() {
            Ok(())
        } else {
            Err(NormalityError::HypothesisFailed(failed.join("; ")))
        }
    }

    fn mark_normal(&mut self) {
        self.verdict = Verdict::Normal;
        self.alpha_bounds = (0, 0);
    }
}

fn supported_prime(p: u64) -> bool {
    p == 2 || (3..=19).contains(&p)
}

/// log_p discr π_*(H^n) and the resulting upper bound on α_n.
pub fn pushforward_discriminant(cp: &CohomologyProfile, n: u32) -> Result<(u64, u64), NormalityError> {
    if !cp.torsion_free {
        return Err(NormalityError::TorsionPresent);
    }
    if !supported_prime(cp.p) {
        return Err(NormalityError::UnsupportedPrime(cp.p));
    }
    let e = cp.trivial(n);
    Ok((e, e / 2))
}

/// Σ_{i<n} l_{p-1}^{2i+1} + Σ_{i<n} l_1^{2i}: torsion rank of H^{2n} of the free part.
pub fn torsion_term(cp: &CohomologyProfile, n: u32) -> u64 {
    (0..n).map(|i| cp.sign(2 * i + 1)).sum::<u64>() + (0..n).map(|i| cp.trivial(2 * i)).sum::<u64>()
}

fn vanishing_hypotheses(r: &mut NormalityReport, cp: &CohomologyProfile, n: u32) {
    let bad_even: Vec<u32> = (1..=n).filter(|&k| cp.sign(2 * k) != 0).map(|k| 2 * k).collect();
    let label = if cp.p == 2 { "l_{1,-}" } else { "l_{p-1}" };
    r.check(
        "sign blocks vanish in even degrees",
        bad_even.is_empty(),
        if bad_even.is_empty() { format!("{label}^(2k) = 0 for 1 <= k <= {n}") } else { format!("{label} nonzero in degrees {bad_even:?}") },
    );
    if n > 1 {
        let bad_odd: Vec<u32> = (0..n).filter(|&k| cp.trivial(2 * k + 1) != 0).map(|k| 2 * k + 1).collect();
        r.check(
            "trivial blocks vanish in odd degrees",
            bad_odd.is_empty(),
            if bad_odd.is_empty() { "ok".to_string() } else { format!("nonzero in degrees {bad_odd:?}") },
        );
    }
}

/// Criterion "first" (l_1^k = 0) and, in the middle degree, "first2" (l_1^n = 1).
pub fn check_simple_criteria(cp: &CohomologyProfile, k: u32) -> NormalityReport {
    let mut r = NormalityReport::new("simple", k);
    let tf = r.check("torsion-free cohomology", cp.torsion_free, "");
    let pr = r.check("prime in 2..=19", supported_prime(cp.p), format!("p = {}", cp.p));
    let l1 = cp.trivial(k);
    r.alpha_bounds = (0, l1 / 2);
    if !(tf && pr) {
        return r;
    }
    if l1 == 0 {
        r.criterion = "first".into();
        r.mark_normal();
    } else if k == cp.dimension && l1 == 1 {
        r.criterion = "first2".into();
        r.mark_normal();
    }
    r
}

fn chain_report(
    r: &mut NormalityReport,
    left: i64,
    middle: i64,
    right: i64,
    parity_lhs: i64,
    alpha_bound: u64,
) -> Result<(), NormalityError> {
    let parity_ok = (parity_lhs - middle).rem_euclid(2) == 0;
    r.parity_ok = Some(parity_ok);
    r.chain = Some(Chain { left, middle, right });
    if !parity_ok {
        return Err(NormalityError::InconsistentInput(format!("{parity_lhs} - {middle} is odd")));
    }
    if left < middle || middle < right {
        return Err(NormalityError::InconsistentInput(format!("chain {left} >= {middle} >= {right} fails")));
    }
    // K/𝒦 ≅ (Z/p)^((left - middle)/2) bounds α from above
    let slack = ((left - middle) / 2) as u64;
    r.alpha_bounds = (0, alpha_bound.min(slack));
    if left == middle {
        r.mark_normal();
    }
    Ok(())
}

fn middle_n(s: &Scenario) -> Result<u32, NormalityError> {
    if s.complex_dimension % 2 != 0 {
        return Err(NormalityError::HypothesisFailed("complex dimension must be even".into()));
    }
    Ok(s.complex_dimension / 2)
}

fn type_one_everywhere(s: &Scenario) -> Result<(), String> {
    if s.prime == 2 {
        return Ok(());
    }
    for g in &s.fixed_locus.isolated {
        match &g.point {
            None => return Err("isolated point with unknown local type".into()),
            Some(fp) if classify_fixed_point(fp).0 != PointType::One => return Err(format!("{fp} is not of type 1")),
            _ => {}
        }
    }
    for c in &s.fixed_locus.components {
        let Some(e) = &c.exponents else { return Err(format!("component {} has unknown local type", c.label)) };
        let fp = FixedPointLocal::new(s.prime, e.clone()).map_err(|e| format!("{}: {e}", c.label))?;
        if classify_fixed_point(&fp).0 != PointType::One {
            return Err(format!("component {} is not of type 1", c.label));
        }
    }
    Ok(())
}

/// Chain of the main theorem: l_1^N + 2T ≥ h^{2*+ε}(Fix) ≥ 2T with T the
/// torsion rank of H^N of the free part. Dispatches to l_{1,±} when p = 2.
pub fn check_theorem_main(s: &Scenario) -> Result<NormalityReport, NormalityError> {
    let cp = &s.profile;
    let dim = s.complex_dimension;
    let mut r = NormalityReport::new(if s.prime == 2 { "main (p = 2)" } else { "main" }, dim);
    r.check("prime in 2..=19", supported_prime(s.prime), format!("p = {}", s.prime));
    r.check("torsion-free cohomology", cp.torsion_free, "");
    r.check("Kähler", s.kahler, "");
    let neg = s.fixed_locus.is_negligible(dim);
    let almost = s.fixed_locus.is_almost_negligible(dim);
    r.check(
        "fixed locus negligible or almost negligible",
        neg || almost,
        if neg { "negligible" } else if almost { "almost negligible" } else { "neither" },
    );
    let types = type_one_everywhere(s);
    r.check("all fixed points of type 1", types.is_ok(), types.err().unwrap_or_default());
    let half = dim.div_ceil(2);
    vanishing_hypotheses(&mut r, cp, half);
    r.failures()?;

    let t = if dim % 2 == 0 {
        torsion_term(cp, dim / 2)
    } else {
        let m = dim / 2;
        (0..=m).map(|i| cp.sign(2 * i)).sum::<u64>() + (0..m).map(|i| cp.trivial(2 * i + 1)).sum::<u64>()
    } as i64;
    let l1 = cp.trivial(dim) as i64;
    let h = s.fixed_locus.h2star(dim) as i64;
    chain_report(&mut r, l1 + 2 * t, h, 2 * t, l1, (l1 / 2) as u64)?;
    Ok(r)
}

/// Counts of stable and almost stable data of a p = 3 fixed locus.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct StabilityData {
    pub n2: u64,
    pub eps: u64,
    pub eta: u64,
}

/// Decides stability of Fix G for p = 3 in dimension 2n.
pub fn stability(s: &Scenario) -> Result<StabilityData, NormalityError> {
    let dim = s.complex_dimension;
    let n = middle_n(s)? as usize;
    let mut data = StabilityData { n2: 0, eps: 0, eta: 0 };
    let mut f1 = crate::normality::FixedLocusSummary::default();
    for g in &s.fixed_locus.isolated {
        let Some(fp) = &g.point else {
            return Err(NormalityError::NotStable("isolated point with unknown local type".into()));
        };
        match classify_fixed_point(fp).0 {
            PointType::One => f1.isolated.push(g.clone()),
            PointType::Two => {
                let (ones, twos) = (fp.count(1), fp.count(2));
                if ones == n && twos == n {
                    data.n2 += g.count;
                } else if n >= 4 && ((ones == n + 1 && twos == n - 1) || (ones == n - 1 && twos == n + 1)) {
                    data.eps += g.count;
                } else {
                    return Err(NormalityError::NotStable(format!("{fp} is neither stable nor almost stable")));
                }
            }
            t => return Err(NormalityError::NotStable(format!("{fp} has type {t:?}"))),
        }
    }
    for c in &s.fixed_locus.components {
        let Some(e) = &c.exponents else {
            return Err(NormalityError::NotStable(format!("component {} has unknown local type", c.label)));
        };
        let fp = FixedPointLocal::new(3, e.clone()).map_err(NormalityError::NotStable)?;
        match classify_fixed_point(&fp).0 {
            PointType::One => f1.components.push(c.clone()),
            PointType::Two => {
                let (z, ones, twos) = (fp.zeros(), fp.count(1), fp.count(2));
                let shape = z == 1 && ((ones == n - 1 && twos == n) || (ones == n && twos == n - 1));
                if c.dimension == 1 && n >= 4 && shape && c.simply_connected {
                    data.eta += 1;
                } else {
                    return Err(NormalityError::NotStable(format!("component {} is not an almost stable curve", c.label)));
                }
            }
            t => return Err(NormalityError::NotStable(format!("component {} has type {t:?}", c.label))),
        }
    }
    if data.eps + data.eta > 1 {
        return Err(NormalityError::NotStable("more than one almost stable point or curve".into()));
    }
    let stable = (f1.is_almost_negligible(dim) && data.eps == 0 && data.eta == 0) || f1.is_negligible(dim);
    if !stable {
        return Err(NormalityError::NotStable("type-1 part is neither negligible nor almost negligible".into()));
    }
    Ok(data)
}

/// Profile of the blow-up of X in the type-2 points, and the increase of h^{2*}.
pub fn blowup_update(
    cp: &CohomologyProfile,
    n2: u64,
    eps: u64,
    eta: u64,
) -> Result<(CohomologyProfile, u64), NormalityError> {
    if cp.p != 3 {
        return Err(NormalityError::NotOrder3);
    }
    if cp.dimension % 2 != 0 {
        return Err(NormalityError::HypothesisFailed("complex dimension must be even".into()));
    }
    let n = (cp.dimension / 2) as u64;
    let mut out = cp.clone();
    let mut bump = |deg: u32, by: u64| {
        let mut jp = out.degree(deg);
        let l1 = jp.l(1) + by;
        jp.counts.insert(1, l1);
        jp.counts.retain(|_, v| *v > 0);
        out.profiles.insert(deg, jp);
    };
    for j in 2..=(2 * n).saturating_sub(2) {
        bump(2 * j as u32, n2 + eps + 2 * eta);
    }
    bump(2, n2 + eps + eta);
    if 4 * n - 2 != 2 {
        bump((4 * n - 2) as u32, n2 + eps + eta);
    }
    let delta = (2 * n - 1) * n2 + (2 * n - 1) * eps + 4 * (n - 1) * eta;
    Ok((out, delta))
}

/// Chain for p = 3 with stable type-2 points.
pub fn check_th3(s: &Scenario) -> Result<NormalityReport, NormalityError> {
    if s.prime != 3 {
        return Err(NormalityError::NotOrder3);
    }
    let n = middle_n(s)?;
    let cp = &s.profile;
    let mut r = NormalityReport::new("th3", 2 * n);
    r.check("torsion-free cohomology", cp.torsion_free, "");
    vanishing_hypotheses(&mut r, cp, n);
    r.failures()?;
    let st = stability(s)?;
    r.check("fixed locus stable", true, format!("n2 = {}, eps = {}, eta = {}", st.n2, st.eps, st.eta));
    let t = torsion_term(cp, n) as i64;
    let l1 = cp.trivial(2 * n) as i64;
    let h = s.fixed_locus.h2star(2 * n) as i64;
    let slack = (st.n2 + st.eps + 2 * st.eta) as i64;
    chain_report(&mut r, l1 + 2 * t, h, 2 * t - slack, l1, (l1 / 2) as u64)?;
    Ok(r)
}

pub fn effective_weight(g: &IsolatedGroup, complex_dimension: u32) -> WeightValue {
    if let Some(w) = g.weight {
        return w;
    }
    match &g.point {
        Some(fp) => weight_lookup(fp),
        None if complex_dimension == 2 => WeightValue::Exact(1),
        None => WeightValue::Range(0, 2),
    }
}

/// Σ w(x) replaces h^{2*}: finite fixed locus with known weights, none equal to 2.
pub fn check_maintori(s: &Scenario) -> Result<NormalityReport, NormalityError> {
    let n = middle_n(s)?;
    let cp = &s.profile;
    let mut r = NormalityReport::new("maintori", 2 * n);
    r.check("prime in 2..=19", supported_prime(s.prime), format!("p = {}", s.prime));
    r.check("torsion-free cohomology", cp.torsion_free, "");
    r.check("finite fixed locus", s.fixed_locus.is_finite(), "");
    vanishing_hypotheses(&mut r, cp, n);
    r.failures()?;
    let mut total = 0i64;
    for g in &s.fixed_locus.isolated {
        let label = g.point.as_ref().map_or("unlabelled point".to_string(), |p| p.to_string());
        match effective_weight(g, s.complex_dimension) {
            WeightValue::Exact(2) => return Err(NormalityError::WeightTwoPresent(label)),
            WeightValue::Exact(w) => total += w as i64 * g.count as i64,
            WeightValue::Range(..) => return Err(NormalityError::WeightUnknown(label)),
        }
    }
    r.check("no point of weight 2", true, format!("sum of weights {total}"));
    let t = torsion_term(cp, n) as i64;
    let l1 = cp.trivial(2 * n) as i64;
    chain_report(&mut r, l1 + 2 * t, total, 2 * t, l1, (l1 / 2) as u64)?;
    Ok(r)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WeightVariable {
    pub label: String,
    pub count: u64,
    pub value: WeightValue,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WeightSolution {
    pub variables: Vec<WeightVariable>,
    pub admissible_assignments: usize,
    pub unique: bool,
}

/// Enumerates weight assignments in {0,1,2}, one variable per local type,
/// compatible with the parity and the two-sided bound.
pub fn weight_solve(s: &Scenario) -> Result<WeightSolution, NormalityError> {
    let n = middle_n(s)?;
    let cp = &s.profile;
    if !cp.torsion_free {
        return Err(NormalityError::TorsionPresent);
    }
    if !supported_prime(s.prime) {
        return Err(NormalityError::UnsupportedPrime(s.prime));
    }
    if !s.fixed_locus.is_finite() {
        return Err(NormalityError::HypothesisFailed("finite fixed locus".into()));
    }
    let mut r = NormalityReport::new("weights", 2 * n);
    vanishing_hypotheses(&mut r, cp, n);
    r.failures()?;

    let mut known = 0i64;
    let mut vars: Vec<(String, u64)> = Vec::new();
    for (i, g) in s.fixed_locus.isolated.iter().enumerate() {
        match g.weight {
            Some(WeightValue::Exact(w)) => known += w as i64 * g.count as i64,
            _ => {
                let label = g.point.as_ref().map_or(format!("group {i}"), |p| p.to_string());
                match vars.iter_mut().find(|(l, _)| *l == label) {
                    Some(v) => v.1 += g.count,
                    None => vars.push((label, g.count)),
                }
            }
        }
    }
    let t = torsion_term(cp, n) as i64;
    let l1 = cp.trivial(2 * n) as i64;
    let (lo, hi) = (2 * t, l1 + 2 * t);
    let k = vars.len();
    let mut seen: Vec<Vec<bool>> = vec![vec![false; 3]; k];
    let mut found = 0usize;
    let mut assign = vec![0u8; k];
    for code in 0..3usize.pow(k as u32) {
        let mut c = code;
        for a in assign.iter_mut() {
            *a = (c % 3) as u8;
            c /= 3;
        }
        let total = known + vars.iter().zip(&assign).map(|((_, m), &w)| *m as i64 * w as i64).sum::<i64>();
        if (l1 - total).rem_euclid(2) == 0 && lo <= total && total <= hi {
            found += 1;
            for (i, &w) in assign.iter().enumerate() {
                seen[i][w as usize] = true;
            }
        }
    }
    if found == 0 {
        return Err(NormalityError::Infeasible);
    }
    let variables = vars
        .into_iter()
        .zip(seen)
        .map(|((label, count), s)| {
            let vals: Vec<u8> = (0..3u8).filter(|&w| s[w as usize]).collect();
            let value = if vals.len() == 1 {
                WeightValue::Exact(vals[0])
            } else {
                WeightValue::Range(vals[0], *vals.last().unwrap())
            };
            WeightVariable { label, count, value }
        })
        .collect();
    Ok(WeightSolution { variables, admissible_assignments: found, unique: found == 1 })
}

/// Simply connected surface with finite nonempty fixed locus.
pub fn check_surface(s: &Scenario) -> Result<NormalityReport, NormalityError> {
    if s.complex_dimension != 2 {
        return Err(NormalityError::HypothesisFailed("not a surface".into()));
    }
    let cp = &s.profile;
    let mut r = NormalityReport::new("surface", 2);
    r.check("prime in 2..=19", supported_prime(s.prime), format!("p = {}", s.prime));
    r.check("simply connected", s.simply_connected == Some(true), "");
    let count = s.fixed_locus.isolated_count();
    r.check("fixed locus finite and nonempty", s.fixed_locus.is_finite() && count > 0, format!("{count} points"));
    r.failures()?;
    if cp.sign(2) != 0 {
        return Err(NormalityError::MiddleBlocksPresent);
    }
    let jp = cp.degree(2);
    let predicted = 2 + jp.trivial_part() + jp.sign_part();
    if predicted != count {
        return Err(NormalityError::FixedCountMismatch { declared: count, predicted });
    }
    r.check("#Fix = 2 + l_1 + l_(p-1)", true, format!("{count}"));
    let l1 = jp.trivial_part() as i64;
    chain_report(&mut r, l1 + 2, count as i64, 2, l1, (l1 / 2) as u64)?;
    Ok(r)
}

/// An invariant class that is not a norm y + φ(y) + ... but whose pushforward
/// is declared divisible by p.
#[derive(Clone, Debug)]
pub struct Witness {
    pub degree: u32,
    pub vector: Vec<BigInt>,
    pub description: String,
    pub pushforward_divisible: bool,
    pub alpha_upper: u64,
}

pub fn check_witness(s: &Scenario) -> Result<NormalityReport, NormalityError> {
    let w = s.witness.as_ref().ok_or(NormalityError::MissingData("witness".into()))?;
    let action = s
        .actions
        .get(&w.degree)
        .ok_or(NormalityError::MissingData(format!("action in degree {}", w.degree)))?;
    let mut r = NormalityReport::new("witness", w.degree);
    let x = Matrix::from_row_vecs(w.vector.iter().map(|v| vec![v.clone()]).collect(), 1);
    if x.nrows() != action.rank() {
        return Err(NormalityError::MissingData("witness vector has the wrong length".into()));
    }
    let invariant = (&action.tau() * &x).is_zero();
    r.check("witness is invariant", invariant, "");
    // image of σ as a row basis
    let image = action.sigma().transpose().row_hnf();
    let is_norm = image.nrows() > 0 && coordinates_in(&image, &w.vector).is_some();
    r.check("witness is not a norm", !is_norm, "");
    r.check("pushforward divisible by p", w.pushforward_divisible, "declared");
    r.failures()?;
    let bound = pushforward_discriminant(&s.profile, w.degree).map(|(_, b)| b).unwrap_or(u64::MAX);
    r.alpha_bounds = (1, w.alpha_upper.min(bound).max(1));
    r.verdict = Verdict::NotNormal;
    r.witness = Some(w.description.clone());
    Ok(r)
}

/// Quotient Betti numbers of a K3^[2]-type fourfold with invariant rank r.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct QuotientBetti {
    pub b2: u64,
    pub b3: u64,
    pub b4: u64,
    pub euler: u64,
}

pub fn betti_quotient(r: u64, p: u64) -> Result<QuotientBetti, NormalityError> {
    if !(3..=19).contains(&p) || !crate::matrix::is_prime(p) {
        return Err(NormalityError::UnsupportedPrime(p));
    }
    if r == 0 || r > 23 {
        return Err(NormalityError::HypothesisFailed(format!("invariant rank {r} outside 1..=23")));
    }
    let num = (23 - r) * (23 - r);
    if num % (2 * (p - 1)) != 0 || (23 - r) % (p - 1) != 0 {
        return Err(NormalityError::NonIntegralResult);
    }
    let b4 = r * (r + 1) / 2 + num / (2 * (p - 1));
    // the same number through the Sym² profile of H²
    let lp = (23 - r) / (p - 1);
    if lp > r {
        return Err(NormalityError::HypothesisFailed(format!("l_p = {lp} exceeds the invariant rank {r}")));
    }
    let l1 = r - lp;
    let h4 = sym2_profile(&JordanProfile::new(p, [(1, l1), (p, lp)]))?;
    assert_eq!(h4.l(1) + h4.l(p), b4, "closed form and Sym² data disagree");
    Ok(QuotientBetti { b2: r, b3: 0, b4, euler: 2 + 2 * r + b4 })
}

/// H^{kt}-normality transfers to H^k when Sym^t H^k → H^{kt} is injective mod p
/// and the complement is stable.
pub fn propagate_power(
    report: &NormalityReport,
    k: u32,
    sym_injective: bool,
    complement_stable: bool,
) -> NormalityReport {
    let mut r = NormalityReport::new("power", k);
    r.check("source degree normal", report.verdict == Verdict::Normal, format!("degree {}", report.degree));
    r.check("Sym map injective mod p", sym_injective, "");
    r.check("complement stable", complement_stable, "");
    if r.hypotheses.iter().all(|h| h.holds) {
        r.mark_normal();
    }
    r
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Criterion {
    Auto,
    Simple,
    Main,
    Th3,
    Maintori,
    Surface,
    Witness,
}

impl std::str::FromStr for Criterion {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Ok(match s {
            "auto" => Criterion::Auto,
            "simple" => Criterion::Simple,
            "main" => Criterion::Main,
            "th3" => Criterion::Th3,
            "maintori" => Criterion::Maintori,
            "surface" => Criterion::Surface,
            "witness" => Criterion::Witness,
            _ => return Err(format!("unknown criterion {s}")),
        })
    }
}

/// Runs one criterion, or with `Auto` the simple criteria first and then the
/// scenario's preferred checker (or each applicable checker in turn).
pub fn check_normality(s: &Scenario, criterion: Criterion) -> Result<NormalityReport, NormalityError> {
    let k = s.normality_degree;
    match criterion {
        Criterion::Simple => Ok(check_simple_criteria(&s.profile, k)),
        Criterion::Main => check_theorem_main(s),
        Criterion::Th3 => check_th3(s),
        Criterion::Maintori => check_maintori(s),
        Criterion::Surface => check_surface(s),
        Criterion::Witness => check_witness(s),
        Criterion::Auto => {
            if s.witness.is_some() {
                return check_witness(s);
            }
            let simple = check_simple_criteria(&s.profile, k);
            if simple.verdict == Verdict::Normal {
                return Ok(simple);
            }
            if let Some(c) = s.criterion.filter(|c| *c != Criterion::Auto) {
                return check_normality(s, c);
            }
            let mut first: Option<Result<NormalityReport, NormalityError>> = None;
            for c in [Criterion::Surface, Criterion::Main, Criterion::Th3, Criterion::Maintori] {
                let res = check_normality(s, c);
                if matches!(&res, Ok(r) if r.verdict == Verdict::Normal) {
                    return res;
                }
                first.get_or_insert(res);
            }
            match first {
                Some(Ok(r)) => Ok(r),
                _ => Ok(simple),
            }
        }
    }
}

#[allow(dead_code)]
fn is_zero_vec(v: &[BigInt]) -> bool {
    v.iter().all(|x| x.is_zero())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fp(p: u64, e: &[u64]) -> FixedPointLocal {
        FixedPointLocal::new(p, e.to_vec()).unwrap()
    }

    #[test]
    fn classification_examples() {
        assert_eq!(classify_fixed_point(&fp(5, &[0, 0, 0, 1])), (PointType::Zero, true));
        assert_eq!(classify_fixed_point(&fp(3, &[0, 2, 2])), (PointType::One, false));
        assert_eq!(classify_fixed_point(&fp(3, &[1, 1, 2, 2])), (PointType::Two, false));
        assert_eq!(classify_fixed_point(&fp(5, &[1, 1, 4, 4])), (PointType::Other, false));
        assert_eq!(classify_fixed_point(&fp(2, &[1, 1])), (PointType::One, false));
        assert!(FixedPointLocal::new(3, vec![0, 0]).is_err());
        assert!(FixedPointLocal::new(3, vec![3]).is_err());
    }

    #[test]
    fn pushforward_examples() {
        let mut cp = CohomologyProfile::new(7, 2, true);
        cp.set(2, JordanProfile::new(7, [(1, 1), (7, 3)]));
        assert_eq!(pushforward_discriminant(&cp, 2).unwrap(), (1, 0));
        let mut cp = CohomologyProfile::new(3, 4, true);
        cp.set(4, JordanProfile::new(3, [(1, 15), (3, 87)]));
        assert_eq!(pushforward_discriminant(&cp, 4).unwrap(), (15, 7));
        cp.torsion_free = false;
        assert_eq!(pushforward_discriminant(&cp, 4), Err(NormalityError::TorsionPresent));
        let cp = CohomologyProfile::new(23, 2, true);
        assert_eq!(pushforward_discriminant(&cp, 2), Err(NormalityError::UnsupportedPrime(23)));
    }

    #[test]
    fn simple_criteria() {
        let mut cp = CohomologyProfile::new(11, 2, true);
        cp.set(2, JordanProfile::new(11, [(11, 2)]));
        let r = check_simple_criteria(&cp, 2);
        assert_eq!((r.verdict, r.criterion.as_str()), (Verdict::Normal, "first"));
        cp.set(2, JordanProfile::new(11, [(1, 1), (11, 2)]));
        assert_eq!(check_simple_criteria(&cp, 2).criterion, "first2");
        cp.set(2, JordanProfile::new(11, [(1, 2), (11, 2)]));
        assert_eq!(check_simple_criteria(&cp, 2).verdict, Verdict::Unknown);
    }

    #[test]
    fn blowup_m3() {
        let mut cp = CohomologyProfile::new(3, 4, true).with_unit_degrees();
        cp.set(2, JordanProfile::new(3, [(1, 5), (3, 6)]));
        cp.set(4, JordanProfile::new(3, [(1, 15), (3, 87)]));
        cp.set(6, JordanProfile::new(3, [(1, 5), (3, 6)]));
        let (out, delta) = blowup_update(&cp, 27, 0, 0).unwrap();
        assert_eq!(out.trivial(2), 32);
        assert_eq!(out.trivial(6), 32);
        assert_eq!(out.trivial(4), 42);
        assert_eq!(out.free(2), 6);
        assert_eq!(delta, 81);
        let (same, d0) = blowup_update(&cp, 0, 0, 0).unwrap();
        assert_eq!((same, d0), (cp.clone(), 0));
        let (edge, _) = blowup_update(&cp, 0, 1, 1).unwrap();
        assert_eq!(edge.trivial(2), 5 + 2);
        assert_eq!(edge.trivial(4), 15 + 3);
        let cp5 = CohomologyProfile::new(5, 4, true);
        assert_eq!(blowup_update(&cp5, 1, 0, 0), Err(NormalityError::NotOrder3));
    }

    #[test]
    fn betti_table() {
        let b = betti_quotient(11, 3).unwrap();
        assert_eq!((b.b2, b.b3, b.b4, b.euler), (11, 0, 102, 126));
        let b = betti_quotient(3, 11).unwrap();
        assert_eq!((b.b2, b.b3, b.b4, b.euler), (3, 0, 26, 34));
        let b = betti_quotient(7, 5).unwrap();
        assert_eq!((b.b4, b.euler), (60, 76));
        assert_eq!(betti_quotient(10, 3), Err(NormalityError::NonIntegralResult));
    }

    #[test]
    fn propagation() {
        let mut r = NormalityReport::new("x", 4);
        r.verdict = Verdict::Normal;
        assert_eq!(propagate_power(&r, 2, true, true).verdict, Verdict::Normal);
        assert_eq!(propagate_power(&r, 2, false, true).verdict, Verdict::Unknown);
        r.verdict = Verdict::Unknown;
        assert_eq!(propagate_power(&r, 2, true, true).verdict, Verdict::Unknown);
    }
}
