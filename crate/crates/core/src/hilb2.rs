//! Degree-4 integral cohomology of S^[2] in the Qin–Wang basis.
//!
//! H⁴ basis order: σ = q1(1)q1(x)|0⟩, then q2(α_k) (22), then q1(α_k)q1(α_m)
//! for k < m (231), then m_{1,1}(α_k) (22). Total 276.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::Hilb2Error;
use crate::expr::parse_lattice_expr;
use crate::lattice::signature;
use crate::matrix::{integral, Matrix};

pub const B2: usize = 22;
pub const H4_RANK: usize = 1 + B2 + B2 * (B2 - 1) / 2 + B2;

/// Gram of H²(S, Z) and its inverse μ.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct K3Form {
    pub gram: Matrix,
    pub mu: Matrix,
}

impl K3Form {
    pub fn new(gram: Matrix) -> Result<Self, Hilb2Error> {
        if gram.nrows() != B2 || !gram.is_square() || !gram.is_symmetric() {
            return Err(Hilb2Error::InvalidForm("need a symmetric 22×22 matrix".into()));
        }
        if gram.det().abs() != BigInt::one() {
            return Err(Hilb2Error::InvalidForm("not unimodular".into()));
        }
        if (0..B2).any(|i| gram[(i, i)].is_odd()) {
            return Err(Hilb2Error::InvalidForm("not even".into()));
        }
        if signature(&gram) != (3, 19) {
            return Err(Hilb2Error::InvalidForm("signature is not (3,19)".into()));
        }
        let inv = gram.inverse_rational().expect("unimodular");
        let mu = integral(&inv).expect("inverse of a unimodular form is integral");
        Ok(K3Form { gram, mu })
    }

    /// U³ ⊕ E8(-1)².
    pub fn standard() -> Self {
        let g = parse_lattice_expr("U^3+E8(-1)^2").expect("valid expression");
        K3Form::new(g.gram().clone()).expect("the K3 lattice")
    }

    pub fn pair(&self, a: &[BigInt], b: &[BigInt]) -> BigInt {
        let mut s = BigInt::zero();
        for i in 0..B2 {
            if a[i].is_zero() {
                continue;
            }
            for j in 0..B2 {
                s += &a[i] * &self.gram[(i, j)] * &b[j];
            }
        }
        s
    }
}

/// j(α) + d·δ in H²(S^[2], Z).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct H2Class {
    pub gamma: Vec<BigInt>,
    pub delta: BigInt,
}

impl H2Class {
    pub fn new(gamma: Vec<BigInt>, delta: BigInt) -> Self {
        assert_eq!(gamma.len(), B2);
        H2Class { gamma, delta }
    }

    pub fn gamma(k: usize) -> Self {
        let mut g = vec![BigInt::zero(); B2];
        g[k] = BigInt::one();
        H2Class { gamma: g, delta: BigInt::zero() }
    }

    pub fn delta() -> Self {
        H2Class { gamma: vec![BigInt::zero(); B2], delta: BigInt::one() }
    }

    pub fn from_i64(gamma: &[i64], delta: i64) -> Self {
        H2Class::new(gamma.iter().map(|&x| BigInt::from(x)).collect(), BigInt::from(delta))
    }
}

/// Beauville–Bogomolov form: B(j(α), j(β)) = α·β, B(δ, δ) = -2, δ ⊥ j(H²).
pub fn bb_pair(k: &K3Form, x: &H2Class, y: &H2Class) -> BigInt {
    k.pair(&x.gamma, &y.gamma) - BigInt::from(2) * &x.delta * &y.delta
}

/// Coordinates in the H⁴ basis.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct H4Class {
    pub coords: Vec<BigInt>,
}

pub fn idx_sigma() -> usize {
    0
}

pub fn idx_q2(k: usize) -> usize {
    1 + k
}

pub fn idx_q1q1(k: usize, m: usize) -> usize {
    let (k, m) = if k < m { (k, m) } else { (m, k) };
    assert!(k < m);
    // pairs (i, j), i < j, in lexicographic order
    let before: usize = (0..k).map(|i| B2 - 1 - i).sum();
    1 + B2 + before + (m - k - 1)
}

pub fn idx_m11(k: usize) -> usize {
    1 + B2 + B2 * (B2 - 1) / 2 + k
}

impl H4Class {
    pub fn zero() -> Self {
        H4Class { coords: vec![BigInt::zero(); H4_RANK] }
    }

    pub fn sigma() -> Self {
        let mut c = Self::zero();
        c.coords[0] = BigInt::one();
        c
    }

    pub fn sigma_coefficient(&self) -> &BigInt {
        &self.coords[idx_sigma()]
    }

    pub fn add_scaled(&mut self, other: &H4Class, k: &BigInt) {
        for (a, b) in self.coords.iter_mut().zip(&other.coords) {
            *a += b * k;
        }
    }
}

/// Cup product H² × H² → H⁴ (coordinates computed in doubled form, then halved).
pub fn cup_h2(x: &H2Class, y: &H2Class, k: &K3Form) -> Result<H4Class, Hilb2Error> {
    let mut twice = vec![BigInt::zero(); H4_RANK];
    let two = BigInt::from(2);
    // γ·γ part
    for a in 0..B2 {
        if x.gamma[a].is_zero() {
            continue;
        }
        for b in 0..B2 {
            if y.gamma[b].is_zero() {
                continue;
            }
            let c = &x.gamma[a] * &y.gamma[b];
            // (α_a·α_b) σ
            twice[idx_sigma()] += &c * &k.gram[(a, b)] * &two;
            if a == b {
                // q1(α)² = 2 m11(α) + q2(α)
                twice[idx_m11(a)] += &c * 4;
                twice[idx_q2(a)] += &c * &two;
            } else {
                twice[idx_q1q1(a, b)] += &c * &two;
            }
        }
    }
    // δ·γ + γ·δ
    for a in 0..B2 {
        let c = &x.delta * &y.gamma[a] + &y.delta * &x.gamma[a];
        if !c.is_zero() {
            twice[idx_q2(a)] += c * &two;
        }
    }
    // δ² = Σ_{i<j} μ_ij q1q1 + ½ Σ μ_ii q1(α_i)² + σ
    let dd = &x.delta * &y.delta;
    if !dd.is_zero() {
        twice[idx_sigma()] += &dd * &two;
        for i in 0..B2 {
            for j in (i + 1)..B2 {
                if !k.mu[(i, j)].is_zero() {
                    twice[idx_q1q1(i, j)] += &dd * &k.mu[(i, j)] * &two;
                }
            }
            let mii = &k.mu[(i, i)];
            if !mii.is_zero() {
                twice[idx_m11(i)] += &dd * mii * &two;
                twice[idx_q2(i)] += &dd * mii;
            }
        }
    }
    let mut coords = Vec::with_capacity(H4_RANK);
    for c in twice {
        let (q, r) = c.div_rem(&two);
        if !r.is_zero() {
            return Err(Hilb2Error::NonIntegralExpansion);
        }
        coords.push(q);
    }
    Ok(H4Class { coords })
}

/// ∫ x1 x2 x3 x4 = B12 B34 + B13 B24 + B14 B23 (Fujiki constant 3).
pub fn quadruple_product(k: &K3Form, x: [&H2Class; 4]) -> BigInt {
    let b = |i: usize, j: usize| bb_pair(k, x[i], x[j]);
    b(0, 1) * b(2, 3) + b(0, 2) * b(1, 3) + b(0, 3) * b(1, 2)
}

/// Element of the span of products of H² classes and σ.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpanElement {
    pub sigma: BigInt,
    pub products: Vec<(BigInt, H2Class, H2Class)>,
}

impl SpanElement {
    pub fn sigma() -> Self {
        SpanElement { sigma: BigInt::one(), products: Vec::new() }
    }

    pub fn product(x: H2Class, y: H2Class) -> Self {
        SpanElement { sigma: BigInt::zero(), products: vec![(BigInt::one(), x, y)] }
    }

    /// Only multiples of σ are recognised from raw coordinates.
    pub fn from_h4(c: &H4Class) -> Result<Self, Hilb2Error> {
        if c.coords[1..].iter().any(|x| !x.is_zero()) {
            return Err(Hilb2Error::OutsideSupportedSpan);
        }
        Ok(SpanElement { sigma: c.coords[0].clone(), products: Vec::new() })
    }

    pub fn to_h4(&self, k: &K3Form) -> Result<H4Class, Hilb2Error> {
        let mut out = H4Class::zero();
        out.coords[0] = self.sigma.clone();
        for (c, x, y) in &self.products {
            out.add_scaled(&cup_h2(x, y, k)?, c);
        }
        Ok(out)
    }
}

/// Intersection pairing on the supported span: σ·σ = 1, σ pairs with the
/// σ-coefficient of a product, products pair through the Fujiki relation.
pub fn pair_h4(k: &K3Form, a: &SpanElement, b: &SpanElement) -> Result<BigInt, Hilb2Error> {
    let mut s = &a.sigma * &b.sigma;
    for (c, x, y) in &b.products {
        if !a.sigma.is_zero() {
            s += &a.sigma * c * cup_h2(x, y, k)?.sigma_coefficient();
        }
    }
    for (c, x, y) in &a.products {
        if !b.sigma.is_zero() {
            s += &b.sigma * c * cup_h2(x, y, k)?.sigma_coefficient();
        }
        for (d, z, w) in &b.products {
            s += c * d * quadruple_product(k, [x, y, z, w]);
        }
    }
    Ok(s)
}

pub fn s_lattice_gram(k: &K3Form, basis: &[SpanElement]) -> Result<(Matrix, BigInt), Hilb2Error> {
    let n = basis.len();
    let mut g = Matrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let v = pair_h4(k, &basis[i], &basis[j])?;
            g[(i, j)] = v.clone();
            g[(j, i)] = v;
        }
    }
    let det = g.det();
    Ok((g, det))
}

/// The seven generators of Sym²(U ⊕ (-2)) ⊕ Zσ, with U the first hyperbolic
/// plane of the standard form: δ², u1u2, σ, u1², u2², u1δ, u2δ.
pub fn s_lattice_basis() -> Vec<SpanElement> {
    let u1 = H2Class::gamma(0);
    let u2 = H2Class::gamma(1);
    let d = H2Class::delta();
    vec![
        SpanElement::product(d.clone(), d.clone()),
        SpanElement::product(u1.clone(), u2.clone()),
        SpanElement::sigma(),
        SpanElement::product(u1.clone(), u1.clone()),
        SpanElement::product(u2.clone(), u2.clone()),
        SpanElement::product(u1, d.clone()),
        SpanElement::product(u2, d),
    ]
}

/// Action on H⁴ induced by an isometry ψ of H²(S) (column convention),
/// natural on S^[2]: σ fixed, q2 linear, q1q1 bilinear, m11 through
/// q1(α)² = 2 m11(α) + q2(α).
pub fn induced_h4_action(psi: &Matrix) -> Matrix {
    let mut out = Matrix::zeros(H4_RANK, H4_RANK);
    out[(0, 0)] = BigInt::one();
    let col = |k: usize| psi.column(k);
    for k in 0..B2 {
        let c = col(k);
        for (j, cj) in c.iter().enumerate() {
            out[(idx_q2(j), idx_q2(k))] += cj;
        }
        // m11(Σ c_j α_j) = Σ c_j² m11_j + Σ_{j<l} c_j c_l q1q1_jl + Σ (c_j² - c_j)/2 q2_j
        for (j, cj) in c.iter().enumerate() {
            if cj.is_zero() {
                continue;
            }
            out[(idx_m11(j), idx_m11(k))] += cj * cj;
            let half: BigInt = (cj * cj - cj) / 2;
            out[(idx_q2(j), idx_m11(k))] += half;
            for (l, cl) in c.iter().enumerate().skip(j + 1) {
                if !cl.is_zero() {
                    out[(idx_q1q1(j, l), idx_m11(k))] += cj * cl;
                }
            }
        }
        for m in (k + 1)..B2 {
            let d = col(m);
            let target = idx_q1q1(k, m);
            for (j, cj) in c.iter().enumerate() {
                if cj.is_zero() {
                    continue;
                }
                for (l, dl) in d.iter().enumerate() {
                    if dl.is_zero() {
                        continue;
                    }
                    let v = cj * dl;
                    if j == l {
                        // q1(α_j)² = 2 m11_j + q2_j
                        out[(idx_m11(j), target)] += &v * 2;
                        out[(idx_q2(j), target)] += &v;
                    } else {
                        out[(idx_q1q1(j, l), target)] += &v;
                    }
                }
            }
        }
    }
    out
}

/// Action on H²(S^[2]) = H²(S) ⊕ Zδ of a natural automorphism.
pub fn induced_h2_action(psi: &Matrix) -> Matrix {
    let mut out = Matrix::zeros(B2 + 1, B2 + 1);
    for i in 0..B2 {
        for j in 0..B2 {
            out[(i, j)] = psi[(i, j)].clone();
        }
    }
    out[(B2, B2)] = BigInt::one();
    out
}

/// Applies an H⁴ action matrix to a class.
pub fn apply_h4(action: &Matrix, c: &H4Class) -> H4Class {
    let col = Matrix::from_row_vecs(c.coords.iter().map(|x| vec![x.clone()]).collect(), 1);
    H4Class { coords: (action * &col).column(0) }
}

/// Applies an H²(S) isometry to an H² class of S^[2].
pub fn apply_h2(psi: &Matrix, x: &H2Class) -> H2Class {
    let col = Matrix::from_row_vecs(x.gamma.iter().map(|v| vec![v.clone()]).collect(), 1);
    H2Class { gamma: (psi * &col).column(0), delta: x.delta.clone() }
}

/// Order-5 isometry of U³ ⊕ E8(-1)²: the Coxeter element of an A4 inside
/// each E8, identity on U³.
pub fn coxeter_a4_isometry() -> Matrix {
    let k = K3Form::standard();
    let mut psi = Matrix::identity(B2);
    for block in [6usize, 14] {
        // simple roots 1,3,4,5 (Bourbaki) form an A4 chain
        for r in [0usize, 2, 3, 4] {
            let root = block + r;
            // s(x) = x - 2 (x·α)/(α·α) α = x + (x·α) α for α² = -2
            let mut s = Matrix::identity(B2);
            for j in 0..B2 {
                s[(root, j)] += &k.gram[(root, j)];
            }
            psi = &s * &psi;
        }
    }
    psi
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basis_indexing_is_a_bijection() {
        let mut seen = vec![false; H4_RANK];
        seen[idx_sigma()] = true;
        for k in 0..B2 {
            seen[idx_q2(k)] = true;
            seen[idx_m11(k)] = true;
            for m in (k + 1)..B2 {
                assert!(!seen[idx_q1q1(k, m)]);
                seen[idx_q1q1(k, m)] = true;
            }
        }
        assert!(seen.into_iter().all(|s| s));
        assert_eq!(H4_RANK, 276);
    }

    #[test]
    fn product_rules() {
        let k = K3Form::standard();
        let d = H2Class::delta();
        let g0 = H2Class::gamma(0);
        let g1 = H2Class::gamma(1);
        let dg = cup_h2(&d, &g0, &k).unwrap();
        let mut want = H4Class::zero();
        want.coords[idx_q2(0)] = BigInt::one();
        assert_eq!(dg, want);
        let gg = cup_h2(&g0, &g1, &k).unwrap();
        let mut want = H4Class::sigma();
        want.coords[idx_q1q1(0, 1)] = BigInt::one();
        assert_eq!(gg, want);
        // a root α with α² = -2
        let e = H2Class::gamma(6);
        let ee = cup_h2(&e, &e, &k).unwrap();
        let mut want = H4Class::zero();
        want.coords[0] = BigInt::from(-2);
        want.coords[idx_m11(6)] = BigInt::from(2);
        want.coords[idx_q2(6)] = BigInt::one();
        assert_eq!(ee, want);
    }

    #[test]
    fn quadruple_examples() {
        let k = K3Form::standard();
        let d = H2Class::delta();
        assert_eq!(quadruple_product(&k, [&d, &d, &d, &d]), BigInt::from(12));
        let (u1, u2) = (H2Class::gamma(0), H2Class::gamma(1));
        assert_eq!(quadruple_product(&k, [&u1, &u2, &u1, &u2]), BigInt::from(2));
        assert_eq!(quadruple_product(&k, [&u1, &u1, &u1, &u1]), BigInt::zero());
    }

    #[test]
    fn sigma_pairings() {
        let k = K3Form::standard();
        let s = SpanElement::sigma();
        assert_eq!(pair_h4(&k, &s, &s).unwrap(), BigInt::one());
        let dd = SpanElement::product(H2Class::delta(), H2Class::delta());
        assert_eq!(pair_h4(&k, &dd, &s).unwrap(), BigInt::one());
        let uu = SpanElement::product(H2Class::gamma(0), H2Class::gamma(1));
        assert_eq!(pair_h4(&k, &s, &uu).unwrap(), BigInt::one());
        let mut q2 = H4Class::zero();
        q2.coords[idx_q2(3)] = BigInt::one();
        assert_eq!(SpanElement::from_h4(&q2), Err(Hilb2Error::OutsideSupportedSpan));
    }

    #[test]
    fn s_lattice() {
        let k = K3Form::standard();
        let (g, det) = s_lattice_gram(&k, &s_lattice_basis()).unwrap();
        let block = g.submatrix(&[0, 1, 2], &[0, 1, 2]);
        assert_eq!(block, Matrix::from_i64(&[&[12, -2, 1], &[-2, 2, 1], &[1, 1, 1]]));
        assert_eq!(g.submatrix(&[3, 4], &[3, 4]), Matrix::from_i64(&[&[0, 2], &[2, 0]]));
        assert_eq!(det.abs(), BigInt::from(32));
    }

    #[test]
    fn invalid_forms() {
        assert!(K3Form::new(Matrix::identity(22)).is_err());
        assert!(K3Form::new(Matrix::identity(3)).is_err());
    }

    #[test]
    fn coxeter_element_has_order_five() {
        let psi = coxeter_a4_isometry();
        assert_eq!(psi.pow(5), Matrix::identity(B2));
        assert_ne!(psi, Matrix::identity(B2));
        let k = K3Form::standard();
        assert_eq!(k.gram.congruence(&psi.transpose()), k.gram);
    }
}

#[cfg(test)]
mod equivariance {
    use super::*;
    use crate::gmodule::{jordan_profile, PrimeOrderAction};

    #[test]
    fn products_commute_with_the_action() {
        let k = K3Form::standard();
        let psi = coxeter_a4_isometry();
        let big = induced_h4_action(&psi);
        let xs = [
            H2Class::from_i64(&[1, 0, 2, -1, 0, 0, 1, 0, 3, 0, 0, 0, 0, 0, 1, 1, 0, 0, 0, 0, 0, 2], 1),
            H2Class::from_i64(&[0, 1, 0, 0, 1, 0, 0, 2, 1, -1, 0, 0, 0, 0, 0, 0, 1, 1, 0, 0, 0, 0], -1),
            H2Class::delta(),
        ];
        for x in &xs {
            for y in &xs {
                let lhs = cup_h2(&apply_h2(&psi, x), &apply_h2(&psi, y), &k).unwrap();
                let rhs = apply_h4(&big, &cup_h2(x, y, &k).unwrap());
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn order_five_profile_on_h4() {
        let psi = coxeter_a4_isometry();
        let h2 = PrimeOrderAction::new(5, induced_h2_action(&psi), None).unwrap();
        let jp2 = jordan_profile(&h2);
        assert_eq!(jp2.l(4), 0);
        let h4 = PrimeOrderAction::new(5, induced_h4_action(&psi), None).unwrap();
        let jp4 = jordan_profile(&h4);
        let l1 = jp2.l(1);
        assert_eq!(jp4.l(4), 0);
        assert_eq!(jp4.l(1), l1 * (l1 + 1) / 2);
    }
}
