//! Cyclic quotient surface singularities 1/p(1,q) and the weight of a fixed point.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed};
use serde::{Deserialize, Serialize};

use crate::error::ToricError;
use crate::matrix::{log_p, Matrix};
use crate::normality::{classify_fixed_point, FixedPointLocal, PointType};
use crate::snf::saturation_index;

/// Weight of an isolated fixed point: a value in {0,1,2} or an interval.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum WeightValue {
    Exact(u8),
    Range(u8, u8),
}

impl fmt::Display for WeightValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WeightValue::Exact(w) => write!(f, "{w}"),
            WeightValue::Range(a, b) => write!(f, "[{a},{b}]"),
        }
    }
}

/// Hirzebruch–Jung continued fraction n/q = a1 - 1/(a2 - ...).
pub fn hj_expand(n: i64, q: i64) -> Result<Vec<i64>, ToricError> {
    if n < 2 || q < 1 || q >= n {
        return Err(ToricError::Invalid(format!("need 1 <= q < n, got n = {n}, q = {q}")));
    }
    if n.gcd(&q) != 1 {
        return Err(ToricError::NotCoprime { n, q });
    }
    let (mut a, mut b) = (n, q);
    let mut out = Vec::new();
    while b != 0 {
        let c = Integer::div_ceil(&a, &b);
        out.push(c);
        (a, b) = (b, c * b - a);
    }
    Ok(out)
}

/// Complete or partial fan in Z², rays in counterclockwise order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Fan2D {
    pub rays: Vec<[i64; 2]>,
    pub complete: bool,
}

fn det2(a: [i64; 2], b: [i64; 2]) -> i64 {
    a[0] * b[1] - a[1] * b[0]
}

impl Fan2D {
    /// Every pair of adjacent rays spans Z².
    pub fn is_regular(&self) -> bool {
        let k = self.rays.len();
        let pairs = if self.complete { k } else { k - 1 };
        (0..pairs).all(|i| det2(self.rays[i], self.rays[(i + 1) % k]).abs() == 1)
    }

    /// Self-intersection of the curve of ray i: -a where v_{i-1} + v_{i+1} = a·v_i.
    pub fn self_intersection(&self, i: usize) -> Option<i64> {
        let k = self.rays.len();
        if !self.complete && (i == 0 || i + 1 == k) {
            return None;
        }
        let (a, v, b) = (self.rays[(i + k - 1) % k], self.rays[i], self.rays[(i + 1) % k]);
        let s = [a[0] + b[0], a[1] + b[1]];
        // s is a multiple of v in a regular fan
        let m = if v[0] != 0 { s[0] / v[0] } else { s[1] / v[1] };
        (s == [m * v[0], m * v[1]]).then_some(-m)
    }
}

/// Resolution of 1/p(1,q) with exceptional self-intersections.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Resolution2D {
    pub p: i64,
    pub q: i64,
    pub hj: Vec<i64>,
    /// (0,1), the exceptional rays, then (p,-q); listed clockwise.
    pub fan: Fan2D,
    pub self_intersections: Vec<i64>,
}

pub fn resolve_2d(p: i64, q: i64) -> Result<Resolution2D, ToricError> {
    let hj = hj_expand(p, q)?;
    let mut rays = vec![[0, 1], [1, 0]];
    for (i, &a) in hj.iter().enumerate() {
        let (u, v) = (rays[i], rays[i + 1]);
        rays.push([a * v[0] - u[0], a * v[1] - u[1]]);
    }
    debug_assert_eq!(*rays.last().unwrap(), [p, -q]);
    let self_intersections = hj.iter().map(|a| -a).collect();
    Ok(Resolution2D { p, q, hj, fan: Fan2D { rays, complete: false }, self_intersections })
}

/// Rays strictly inside the cone from `a` to `b` (counterclockwise) resolving it.
fn regularize(a: [i64; 2], b: [i64; 2]) -> Vec<[i64; 2]> {
    let d = det2(a, b);
    assert!(d > 0, "cone must be strictly convex and counterclockwise");
    if d == 1 {
        return Vec::new();
    }
    // c with det(c, b) = 1, so a = d·c + x·b
    let g = BigInt::from(b[0]).extended_gcd(&BigInt::from(b[1]));
    let (s, t) = (i64::try_from(&g.x).unwrap(), i64::try_from(&g.y).unwrap());
    let mut c = [t, -s];
    let m = det2(c, a).div_euclid(d) + 1;
    c = [c[0] + m * b[0], c[1] + m * b[1]];
    let qq = -det2(c, a);
    let hj = hj_expand(d, qq).expect("primitive rays give coprime data");
    // standard cone ⟨(d,-qq), (0,1)⟩ with c ↦ (1,0), b ↦ (0,1)
    let to_ambient = |v: [i64; 2]| [v[0] * c[0] + v[1] * b[0], v[0] * c[1] + v[1] * b[1]];
    let mut std = vec![[0i64, 1], [1, 0]];
    for (i, &ai) in hj.iter().enumerate() {
        let (u, v) = (std[i], std[i + 1]);
        std.push([ai * v[0] - u[0], ai * v[1] - u[1]]);
    }
    debug_assert_eq!(to_ambient(*std.last().unwrap()), a);
    std[1..std.len() - 1].iter().rev().map(|&v| to_ambient(v)).collect()
}

fn angle_key(v: [i64; 2]) -> f64 {
    let t = (v[1] as f64).atan2(v[0] as f64);
    if t < 0.0 {
        t + std::f64::consts::TAU
    } else {
        t
    }
}

/// Two regular compactifications of the resolution fan.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Compactification {
    /// add -e1 and -e2
    Axes,
    /// add -e1-e2
    Diagonal,
}

/// Complete regular fan: the resolution rays plus boundary rays.
/// Returns the fan and, per ray, its role.
pub fn compactify(res: &Resolution2D, kind: Compactification) -> (Fan2D, Vec<RayRole>) {
    let p = res.p;
    let q = res.q;
    let mut roles: Vec<([i64; 2], RayRole)> = Vec::new();
    let rays = &res.fan.rays;
    let last = rays.len() - 1;
    for (i, &r) in rays.iter().enumerate() {
        let role = if i == 0 || i == last { RayRole::Original } else { RayRole::Exceptional };
        roles.push((r, role));
    }
    let extra: Vec<[i64; 2]> = match kind {
        Compactification::Axes => vec![[-1, 0], [0, -1]],
        Compactification::Diagonal => vec![[-1, -1]],
    };
    // counterclockwise from (0,1) through the extra rays to (p,-q)
    let mut chain = vec![[0, 1]];
    chain.extend(extra);
    chain.push([p, -q]);
    let mut boundary = Vec::new();
    for w in chain.windows(2) {
        if w[0] != [0, 1] {
            boundary.push(w[0]);
        }
        boundary.extend(regularize(w[0], w[1]));
    }
    for b in boundary {
        roles.push((b, RayRole::Boundary));
    }
    roles.sort_by(|x, y| angle_key(x.0).partial_cmp(&angle_key(y.0)).unwrap());
    let fan = Fan2D { rays: roles.iter().map(|r| r.0).collect(), complete: true };
    (fan, roles.into_iter().map(|r| r.1).collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum RayRole {
    Original,
    Exceptional,
    Boundary,
}

/// Case label of the classification, blow-up dependent for i) and iii).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum WeightCase {
    I,
    II,
    III,
    IV,
    V,
}

impl fmt::Display for WeightCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            WeightCase::I => "i",
            WeightCase::II => "ii",
            WeightCase::III => "iii",
            WeightCase::IV => "iv",
            WeightCase::V => "v",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WeightComputation {
    pub fan: Fan2D,
    pub roles: Vec<RayRole>,
    /// log_p discr of Im g' (saturation of the exceptional classes)
    pub log_discr_exceptional: u32,
    /// log_p discr of Im ḡ (saturation of the boundary classes)
    pub log_discr_boundary: u32,
    /// log_p [H² : Im g' ⊕ Im ḡ]
    pub log_glue_index: u32,
    pub torsion_rank: u32,
    pub case: WeightCase,
    pub weight: u8,
}

/// Intersection matrix of the ray divisors of a complete regular fan.
fn intersection_matrix(fan: &Fan2D) -> Result<Matrix, ToricError> {
    let k = fan.rays.len();
    let mut m = Matrix::zeros(k, k);
    for i in 0..k {
        let s = fan
            .self_intersection(i)
            .ok_or_else(|| ToricError::ClassificationFailure("fan is not regular".into()))?;
        m[(i, i)] = BigInt::from(s);
        m[(i, (i + 1) % k)] = BigInt::one();
        m[((i + 1) % k, i)] = BigInt::one();
    }
    Ok(m)
}

fn p_log(x: &BigInt, p: i64) -> Result<u32, ToricError> {
    log_p(&x.abs(), p as u64).ok_or_else(|| ToricError::ClassificationFailure(format!("{x} is not a power of {p}")))
}

/// H² of the compactified resolution as Z^rays modulo the two linear relations;
/// the sublattices Γ' (exceptional) and Γ̄ (boundary) are compared inside it.
pub fn weight_dim2_with(p: i64, q: i64, kind: Compactification) -> Result<WeightComputation, ToricError> {
    let res = resolve_2d(p, q)?;
    let (fan, roles) = compactify(&res, kind);
    if !fan.is_regular() {
        return Err(ToricError::ClassificationFailure("compactified fan not regular".into()));
    }
    let k = fan.rays.len();
    let relations: Vec<Vec<BigInt>> =
        (0..2).map(|c| fan.rays.iter().map(|r| BigInt::from(r[c])).collect()).collect();
    let q_all = intersection_matrix(&fan)?;
    // principal divisors are numerically trivial
    for rel in &relations {
        let col = Matrix::from_row_vecs(rel.iter().map(|x| vec![x.clone()]).collect(), 1);
        if !(&q_all * &col).is_zero() {
            return Err(ToricError::ClassificationFailure("linear relation not in the radical".into()));
        }
    }
    let idx = |role: RayRole| -> Vec<usize> { (0..k).filter(|&i| roles[i] == role).collect() };
    let (exc, bnd) = (idx(RayRole::Exceptional), idx(RayRole::Boundary));
    let unit = |i: usize| -> Vec<BigInt> { (0..k).map(|j| BigInt::from((i == j) as i64)).collect() };
    // index of a sublattice spanned by ray classes inside its saturation in H²
    let sat = |ids: &[usize]| -> BigInt {
        let mut rows: Vec<Vec<BigInt>> = ids.iter().map(|&i| unit(i)).collect();
        rows.extend(relations.iter().cloned());
        saturation_index(&Matrix::from_row_vecs(rows, k))
    };
    let det_exc = q_all.submatrix(&exc, &exc).det();
    let det_bnd = q_all.submatrix(&bnd, &bnd).det();
    let (s_exc, s_bnd) = (sat(&exc), sat(&bnd));
    let d_exc = BigInt::from(det_exc.abs()) / (&s_exc * &s_exc);
    let d_bnd = BigInt::from(det_bnd.abs()) / (&s_bnd * &s_bnd);
    let log_exc = p_log(&d_exc, p)?;
    let log_bnd = p_log(&d_bnd, p)?;
    // rank H² = k - 2 = |exc| + |bnd|, so the sum has finite index
    let mut both: Vec<usize> = exc.clone();
    both.extend(&bnd);
    let mut rows: Vec<Vec<BigInt>> = both.iter().map(|&i| unit(i)).collect();
    rows.extend(relations.iter().cloned());
    let full = Matrix::from_row_vecs(rows, k);
    if full.rank() != k {
        return Err(ToricError::ClassificationFailure("exceptional and boundary classes do not span".into()));
    }
    let glue = full.det().abs() / (&s_exc * &s_bnd);
    let log_glue = p_log(&glue, p)?;
    // H² is unimodular: discr(Im g') discr(Im ḡ) = [H² : Im g' ⊕ Im ḡ]²
    if log_exc + log_bnd != 2 * log_glue {
        return Err(ToricError::ClassificationFailure("H² is not unimodular".into()));
    }
    // exceptional curves form a chain of rational curves, so H³(X̄, U'') ≅ H₁(E) = 0
    let links = (0..k).filter(|&i| roles[i] == RayRole::Exceptional && roles[(i + 1) % k] == RayRole::Exceptional).count();
    let chain = links + 1 == exc.len();
    if !chain {
        return Err(ToricError::ClassificationFailure("exceptional divisor is not a chain".into()));
    }
    let torsion_rank = 0u32;
    let case = match (log_glue, log_exc, torsion_rank) {
        (0, 0, 1) => WeightCase::I,
        (0, 0, 0) => WeightCase::II,
        (1, 2, 0) => WeightCase::III,
        (1, 0, 0) => WeightCase::IV,
        (1, 1, 0) => WeightCase::V,
        other => return Err(ToricError::ClassificationFailure(format!("no case matches {other:?}"))),
    };
    let weight = (log_exc + 2 * torsion_rank) as u8;
    Ok(WeightComputation {
        fan,
        roles,
        log_discr_exceptional: log_exc,
        log_discr_boundary: log_bnd,
        log_glue_index: log_glue,
        torsion_rank,
        case,
        weight,
    })
}

/// Weight of 1/p(1,q), computed with two compactifications that must agree.
pub fn weight_dim2(p: i64, q: i64) -> Result<(WeightValue, WeightComputation), ToricError> {
    if !crate::matrix::is_prime(p as u64) {
        return Err(ToricError::Invalid(format!("{p} is not prime")));
    }
    let a = weight_dim2_with(p, q, Compactification::Axes)?;
    let b = weight_dim2_with(p, q, Compactification::Diagonal)?;
    if a.weight != b.weight {
        return Err(ToricError::ClassificationFailure(format!(
            "weight depends on the compactification ({} vs {})",
            a.weight, b.weight
        )));
    }
    Ok((WeightValue::Exact(a.weight), a))
}

/// Weights known in closed form for small cases; otherwise the full interval.
pub fn weight_lookup(fp: &FixedPointLocal) -> WeightValue {
    let e = &fp.exponents;
    if e.len() == 2 && fp.zeros() == 0 {
        return WeightValue::Exact(1);
    }
    if fp.zeros() == 0 {
        match classify_fixed_point(fp).0 {
            PointType::One | PointType::Two => return WeightValue::Exact(1),
            _ => {}
        }
        let full: Vec<u64> = (1..fp.p).collect();
        if *e == full {
            return WeightValue::Exact(1);
        }
        if fp.p == 5 && (e[..] == [1, 1, 4, 4] || e[..] == [1, 1, 1, 2]) {
            return WeightValue::Exact(1);
        }
    }
    WeightValue::Range(0, 2)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hj_examples() {
        assert_eq!(hj_expand(3, 1).unwrap(), vec![3]);
        assert_eq!(hj_expand(5, 2).unwrap(), vec![3, 2]);
        assert_eq!(hj_expand(7, 1).unwrap(), vec![7]);
        assert_eq!(hj_expand(5, 4).unwrap(), vec![2, 2, 2, 2]);
        assert_eq!(hj_expand(4, 2), Err(ToricError::NotCoprime { n: 4, q: 2 }));
    }

    #[test]
    fn resolution_examples() {
        let r = resolve_2d(3, 1).unwrap();
        assert_eq!(r.self_intersections, vec![-3]);
        assert_eq!(resolve_2d(5, 2).unwrap().self_intersections, vec![-3, -2]);
        assert_eq!(resolve_2d(2, 1).unwrap().self_intersections, vec![-2]);
        assert!(r.fan.is_regular());
        for i in 1..r.fan.rays.len() - 1 {
            assert_eq!(r.fan.self_intersection(i), Some(r.self_intersections[i - 1]));
        }
    }

    #[test]
    fn regularize_cone() {
        let rays = regularize([0, -1], [5, -2]);
        let mut all = vec![[0, -1]];
        all.extend(rays);
        all.push([5, -2]);
        assert!(all.windows(2).all(|w| det2(w[0], w[1]) == 1));
    }

    #[test]
    fn weight_examples() {
        let (w, c) = weight_dim2(3, 1).unwrap();
        assert_eq!(w, WeightValue::Exact(1));
        assert_eq!(c.case, WeightCase::V);
        let (w, c) = weight_dim2(5, 2).unwrap();
        assert_eq!((w, c.log_discr_exceptional, c.log_discr_boundary), (WeightValue::Exact(1), 1, 1));
        assert_eq!(weight_dim2(19, 7).unwrap().0, WeightValue::Exact(1));
        assert_eq!(weight_dim2(2, 1).unwrap().0, WeightValue::Exact(1));
    }

    #[test]
    fn lookup_table() {
        let fp = |p, e: &[u64]| FixedPointLocal::new(p, e.to_vec()).unwrap();
        assert_eq!(weight_lookup(&fp(5, &[1, 2, 3, 4])), WeightValue::Exact(1));
        assert_eq!(weight_lookup(&fp(3, &[1, 1, 2, 2])), WeightValue::Exact(1));
        assert_eq!(weight_lookup(&fp(7, &[1, 3, 5, 6])), WeightValue::Range(0, 2));
        assert_eq!(weight_lookup(&fp(5, &[1, 4, 1, 4])), WeightValue::Exact(1));
        assert_eq!(weight_lookup(&fp(5, &[2, 1, 1, 1])), WeightValue::Exact(1));
        assert_eq!(weight_lookup(&fp(7, &[2, 2, 2, 2])), WeightValue::Exact(1));
        assert_eq!(weight_lookup(&fp(7, &[3, 5])), WeightValue::Exact(1));
    }
}
