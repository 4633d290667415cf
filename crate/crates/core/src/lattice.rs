//! Integral lattices given by Gram matrices.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::LatticeError;
use crate::matrix::{integral, log_p, Matrix};
use crate::snf::{saturation_index, smith_normal_form};

#[derive(Clone, PartialEq, Eq)]
pub struct GramLattice {
    gram: Matrix,
    pub name: Option<String>,
}

/// Elementary divisors d_1 | d_2 | ... of L^∨/L, each > 1.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DiscriminantGroup {
    pub elementary_divisors: Vec<BigInt>,
}

impl DiscriminantGroup {
    pub fn order(&self) -> BigInt {
        self.elementary_divisors.iter().fold(BigInt::one(), |a, b| a * b)
    }

    pub fn is_trivial(&self) -> bool {
        self.elementary_divisors.is_empty()
    }

    /// `Some(a)` when the group is (Z/p)^a.
    pub fn p_elementary_rank(&self, p: u64) -> Option<usize> {
        let pb = BigInt::from(p);
        self.elementary_divisors.iter().all(|d| *d == pb).then_some(self.elementary_divisors.len())
    }
}

impl fmt::Display for DiscriminantGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.elementary_divisors.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.elementary_divisors.iter().map(|d| format!("Z/{d}")).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InvariantSummary {
    pub rank: usize,
    pub determinant: BigInt,
    pub signature: (usize, usize),
    pub discriminant_group: DiscriminantGroup,
}

#[derive(Clone, Debug)]
pub struct SublatticeEmbedding {
    pub ambient: GramLattice,
    pub basis_rows: Matrix,
    /// Index of the sublattice in its saturation; equals |det T| for square T.
    pub index: BigInt,
}

impl SublatticeEmbedding {
    pub fn induced_gram(&self) -> Matrix {
        self.ambient.gram.congruence(&self.basis_rows)
    }
}

impl GramLattice {
    pub fn new(gram: Matrix) -> Result<Self, LatticeError> {
        if !gram.is_symmetric() {
            return Err(LatticeError::NotSymmetric);
        }
        if gram.det().is_zero() {
            return Err(LatticeError::DegenerateForm);
        }
        Ok(GramLattice { gram, name: None })
    }

    pub fn named(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn gram(&self) -> &Matrix {
        &self.gram
    }

    pub fn rank(&self) -> usize {
        self.gram.nrows()
    }

    pub fn det(&self) -> BigInt {
        self.gram.det()
    }

    pub fn rescale(&self, m: &BigInt) -> Result<Self, LatticeError> {
        GramLattice::new(self.gram.scale(m))
    }

    pub fn direct_sum(parts: &[GramLattice]) -> Result<Self, LatticeError> {
        let blocks: Vec<Matrix> = parts.iter().map(|l| l.gram.clone()).collect();
        GramLattice::new(Matrix::block_diag(&blocks))
    }

    pub fn signature(&self) -> (usize, usize) {
        signature(&self.gram)
    }

    pub fn discriminant_group(&self) -> DiscriminantGroup {
        let elementary_divisors =
            smith_normal_form(&self.gram).invariant_factors().into_iter().filter(|d| !d.is_one()).collect();
        DiscriminantGroup { elementary_divisors }
    }

    pub fn invariant_summary(&self) -> InvariantSummary {
        InvariantSummary {
            rank: self.rank(),
            determinant: self.det(),
            signature: self.signature(),
            discriminant_group: self.discriminant_group(),
        }
    }

    pub fn is_even(&self) -> bool {
        (0..self.rank()).all(|i| self.gram[(i, i)].is_even())
    }

    pub fn is_definite(&self) -> bool {
        let (pos, neg) = self.signature();
        pos == 0 || neg == 0
    }

    /// Gram p·G⁻¹ of L^∨(p) in the dual basis.
    pub fn dual_rescaled(&self, p: u64) -> Result<GramLattice, LatticeError> {
        let disc = self.discriminant_group();
        if disc.p_elementary_rank(p).is_none() {
            return Err(LatticeError::NotPElementary { p, group: disc.to_string() });
        }
        let inv = self.gram.inverse_rational().ok_or(LatticeError::DegenerateForm)?;
        let pq = BigRational::from_integer(BigInt::from(p));
        let scaled: Vec<Vec<BigRational>> = inv.iter().map(|r| r.iter().map(|x| x * &pq).collect()).collect();
        let g = integral(&scaled).ok_or(LatticeError::NonIntegralResult)?;
        GramLattice::new(g)
    }

    /// Rational Gram of the dual basis, G⁻¹.
    pub fn dual_gram(&self) -> Vec<Vec<BigRational>> {
        self.gram.inverse_rational().expect("nondegenerate")
    }

    pub fn sublattice(&self, t: &Matrix) -> Result<SublatticeEmbedding, LatticeError> {
        if t.ncols() != self.rank() {
            return Err(LatticeError::ShapeMismatch { expected: self.rank(), found: t.ncols() });
        }
        if t.rank() != t.nrows() {
            return Err(LatticeError::DependentRows);
        }
        let index = if t.is_square() { t.det().abs() } else { saturation_index(t) };
        Ok(SublatticeEmbedding { ambient: self.clone(), basis_rows: t.clone(), index })
    }

    /// Overlattice L + Σ Z·(v/p) for the given coordinate vectors v.
    pub fn overlattice_divide(&self, vectors: &[Vec<BigInt>], p: u64) -> Result<GramLattice, LatticeError> {
        let n = self.rank();
        let pb = BigInt::from(p);
        for (k, v) in vectors.iter().enumerate() {
            if v.len() != n {
                return Err(LatticeError::ShapeMismatch { expected: n, found: v.len() });
            }
            for j in 0..n {
                let pairing: BigInt = (0..n).map(|i| &v[i] * &self.gram[(i, j)]).sum();
                if !pairing.is_multiple_of(&pb) {
                    return Err(LatticeError::NotInDual { vector: k });
                }
            }
        }
        // generators of p·(overlattice): p·e_i and v_k
        let mut gens = Matrix::identity(n).scale(&pb);
        if !vectors.is_empty() {
            gens = gens.vstack(&Matrix::from_row_vecs(vectors.to_vec(), n));
        }
        let basis = gens.row_hnf();
        debug_assert_eq!(basis.nrows(), n);
        // [overlattice : L] must be p^m, one factor per adjoined class
        let index_exp = log_p(&(pb.pow(n as u32) / basis.det().abs()), p);
        if index_exp != Some(vectors.len() as u32) {
            return Err(LatticeError::DependentGlue);
        }
        let raw = self.gram.congruence(&basis);
        let p2 = &pb * &pb;
        let mut out = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let (q, r) = raw[(i, j)].div_rem(&p2);
                if !r.is_zero() {
                    return Err(LatticeError::NonIntegralResult);
                }
                out[(i, j)] = q;
            }
        }
        GramLattice::new(out)
    }

    /// Gauss-reduced form of a definite binary lattice.
    pub fn binary_reduce(&self) -> Result<[[BigInt; 2]; 2], LatticeError> {
        if self.rank() != 2 {
            return Err(LatticeError::NotRank2 { rank: self.rank() });
        }
        let g = &self.gram;
        let det = g.det();
        if !det.is_positive() {
            return Err(LatticeError::NotDefinite);
        }
        let negative = g[(0, 0)].is_negative();
        let sgn = if negative { -BigInt::one() } else { BigInt::one() };
        let (a, b, c) = (&g[(0, 0)] * &sgn, &g[(0, 1)] * &sgn, &g[(1, 1)] * &sgn);
        let (a, b, c) = gauss_reduce(a, b, c);
        Ok([[&a * &sgn, &b * &sgn], [&b * &sgn, &c * &sgn]])
    }
}

/// Reduce a positive definite form (a, b, c) = [[a,b],[b,c]] to |2b| ≤ a ≤ c, b ≥ 0.
/// The sign of b is normalised because we classify up to GL₂(Z).
fn gauss_reduce(mut a: BigInt, mut b: BigInt, mut c: BigInt) -> (BigInt, BigInt, BigInt) {
    loop {
        // translate: b ← b − k·a with k = round(b/a)
        let two_a: BigInt = &a * 2;
        let num: BigInt = &b * 2 + &a;
        let k = num.div_floor(&two_a);
        if !k.is_zero() {
            let kb: BigInt = &k * &b;
            let kka: BigInt = &k * &k * &a;
            c = &c - kb * 2 + kka;
            b -= &k * &a;
        }
        if c < a {
            std::mem::swap(&mut a, &mut c);
            b = -b;
            continue;
        }
        break;
    }
    (a, b.abs(), c)
}

/// Signature (b₊, b₋) by exact symmetric elimination; zero pivots are
/// cleared with hyperbolic 2×2 blocks.
pub fn signature(g: &Matrix) -> (usize, usize) {
    let mut a = g.to_rational();
    let mut pos = 0;
    let mut neg = 0;
    loop {
        let n = a.len();
        if n == 0 {
            break;
        }
        if let Some(i) = (0..n).find(|&i| !a[i][i].is_zero()) {
            let piv = a[i][i].clone();
            if piv.is_positive() {
                pos += 1;
            } else {
                neg += 1;
            }
            let rest: Vec<usize> = (0..n).filter(|&k| k != i).collect();
            a = rest
                .iter()
                .map(|&r| rest.iter().map(|&s| &a[r][s] - &a[r][i] * &a[i][s] / &piv).collect())
                .collect();
            continue;
        }
        let off = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).find(|&(i, j)| !a[i][j].is_zero());
        let Some((i, j)) = off else { break };
        // block [[0,b],[b,0]] has signature (1,1); B⁻¹ = [[0,1/b],[1/b,0]]
        pos += 1;
        neg += 1;
        let b = a[i][j].clone();
        let rest: Vec<usize> = (0..n).filter(|&k| k != i && k != j).collect();
        a = rest
            .iter()
            .map(|&r| {
                rest.iter()
                    .map(|&s| {
                        let corr = (&a[r][i] * &a[j][s] + &a[r][j] * &a[i][s]) / &b;
                        &a[r][s] - corr
                    })
                    .collect()
            })
            .collect();
    }
    (pos, neg)
}

impl fmt::Debug for GramLattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.name {
            Some(n) => write!(f, "{n} {}", self.gram),
            None => write!(f, "{}", self.gram),
        }
    }
}

impl fmt::Display for GramLattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.gram)
    }
}

/// Block decomposition of a block-diagonal Gram matrix into connected components.
pub fn orthogonal_blocks(g: &Matrix) -> Vec<Vec<usize>> {
    let n = g.nrows();
    let mut seen = vec![false; n];
    let mut blocks = Vec::new();
    for s in 0..n {
        if seen[s] {
            continue;
        }
        let mut stack = vec![s];
        let mut comp = Vec::new();
        seen[s] = true;
        while let Some(i) = stack.pop() {
            comp.push(i);
            for j in 0..n {
                if !seen[j] && !g[(i, j)].is_zero() {
                    seen[j] = true;
                    stack.push(j);
                }
            }
        }
        comp.sort_unstable();
        blocks.push(comp);
    }
    blocks
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lat(rows: &[&[i64]]) -> GramLattice {
        GramLattice::new(Matrix::from_i64(rows)).unwrap()
    }

    #[test]
    fn hyperbolic_plane_summary() {
        let s = lat(&[&[0, 1], &[1, 0]]).invariant_summary();
        assert_eq!(s.rank, 2);
        assert_eq!(s.determinant, BigInt::from(-1));
        assert_eq!(s.signature, (1, 1));
        assert!(s.discriminant_group.is_trivial());
    }

    #[test]
    fn degenerate_rejected() {
        assert_eq!(GramLattice::new(Matrix::from_i64(&[&[1, 1], &[1, 1]])), Err(LatticeError::DegenerateForm));
    }

    #[test]
    fn signature_needs_hyperbolic_blocks() {
        // all diagonal entries zero
        let g = Matrix::from_i64(&[&[0, 1, 0, 0], &[1, 0, 0, 0], &[0, 0, 0, 2], &[0, 0, 2, 0]]);
        assert_eq!(signature(&g), (2, 2));
        assert_eq!(signature(&Matrix::from_i64(&[&[-2, 1], &[1, -2]])), (0, 2));
    }

    #[test]
    fn a2_dual_rescaled_is_a2() {
        let a2 = lat(&[&[-2, 1], &[1, -2]]);
        let d = a2.dual_rescaled(3).unwrap();
        assert_eq!(d.det().abs(), BigInt::from(3));
        assert_eq!(d.binary_reduce().unwrap(), a2.binary_reduce().unwrap());
    }

    #[test]
    fn u5_squared_dual_rescaled() {
        let g = Matrix::block_diag(&[Matrix::from_i64(&[&[0, 5], &[5, 0]]), Matrix::from_i64(&[&[0, 5], &[5, 0]])]);
        let d = GramLattice::new(g).unwrap().dual_rescaled(5).unwrap();
        let u = Matrix::from_i64(&[&[0, 1], &[1, 0]]);
        assert_eq!(d.gram(), &Matrix::block_diag(&[u.clone(), u]));
    }

    #[test]
    fn unimodular_dual_rescaled_by_two() {
        let d = lat(&[&[0, 1], &[1, 0]]).dual_rescaled(2).unwrap();
        assert_eq!(d.gram(), &Matrix::from_i64(&[&[0, 2], &[2, 0]]));
    }

    #[test]
    fn not_p_elementary() {
        let l = lat(&[&[4]]);
        assert!(matches!(l.dual_rescaled(2), Err(LatticeError::NotPElementary { .. })));
    }

    #[test]
    fn sublattice_index_and_gram() {
        let a2 = lat(&[&[-2, 1], &[1, -2]]);
        let s = a2.sublattice(&Matrix::from_i64(&[&[1, -1], &[1, 2]])).unwrap();
        assert_eq!(s.induced_gram(), Matrix::from_i64(&[&[-6, 3], &[3, -6]]));
        assert_eq!(s.index, BigInt::from(3));
        let id = a2.sublattice(&Matrix::identity(2)).unwrap();
        assert_eq!(id.induced_gram(), *a2.gram());
        assert!(id.index.is_one());
        assert!(matches!(
            a2.sublattice(&Matrix::from_i64(&[&[1, 1], &[2, 2]])),
            Err(LatticeError::DependentRows)
        ));
    }

    #[test]
    fn m11_sublattice_from_explicit_basis() {
        let l = lat(&[&[6, 2, 2], &[2, 8, -3], &[2, -3, 8]]);
        let s = l.sublattice(&Matrix::from_i64(&[&[0, 1, -1], &[1, 0, -3], &[1, 0, 8]])).unwrap();
        let expected = Matrix::from_i64(&[&[2, 3, -8], &[3, 6, -16], &[-8, -16, 50]]).scale(&BigInt::from(11));
        assert_eq!(s.induced_gram(), expected);
        assert_eq!(s.index, BigInt::from(11));
    }

    #[test]
    fn overlattice_u3_not_integral() {
        let u3 = lat(&[&[0, 3], &[3, 0]]);
        let v = vec![vec![BigInt::from(1), BigInt::from(0)], vec![BigInt::from(0), BigInt::from(1)]];
        assert_eq!(u3.overlattice_divide(&v, 3), Err(LatticeError::NonIntegralResult));
    }

    #[test]
    fn overlattice_nothing_adjoined() {
        let l = lat(&[&[-6, 0], &[0, -6]]);
        assert_eq!(l.overlattice_divide(&[], 3).unwrap(), l);
    }

    #[test]
    fn overlattice_rejects_vector_outside_dual() {
        let l = lat(&[&[2, 1], &[1, 2]]);
        let v = vec![vec![BigInt::from(1), BigInt::from(0)]];
        assert_eq!(l.overlattice_divide(&v, 3), Err(LatticeError::NotInDual { vector: 0 }));
    }

    #[test]
    fn overlattice_discriminant_law() {
        // A2(3) with (a-b)/3 adjoined
        let l = lat(&[&[-6, 3], &[3, -6]]);
        let v = vec![vec![BigInt::from(1), BigInt::from(-1)]];
        let o = l.overlattice_divide(&v, 3).unwrap();
        assert_eq!(l.det().abs(), o.det().abs() * BigInt::from(9));
        assert_eq!(o.det(), BigInt::from(3));
    }

    #[test]
    fn m11_all_rows_divided_is_not_integral() {
        let l = lat(&[&[22, 33, -88], &[33, 66, -176], &[-88, -176, 550]]);
        let v: Vec<Vec<BigInt>> = (0..3).map(|i| (0..3).map(|j| BigInt::from((i == j) as i64)).collect()).collect();
        assert_eq!(l.overlattice_divide(&v, 11), Err(LatticeError::NonIntegralResult));
    }

    #[test]
    fn binary_reduction_examples() {
        let r = lat(&[&[4, -3], &[-3, 4]]).binary_reduce().unwrap();
        let want = [[BigInt::from(2), BigInt::from(1)], [BigInt::from(1), BigInt::from(4)]];
        assert_eq!(r, want);
        assert_eq!(lat(&[&[2, 1], &[1, 4]]).binary_reduce().unwrap(), want);
        assert_eq!(lat(&[&[2, -1], &[-1, 4]]).binary_reduce().unwrap(), want);
        let neg = lat(&[&[-4, 3], &[3, -4]]).binary_reduce().unwrap();
        assert_eq!(neg[0][0], BigInt::from(-2));
        assert!(matches!(lat(&[&[0, 1], &[1, 0]]).binary_reduce(), Err(LatticeError::NotDefinite)));
        assert!(matches!(lat(&[&[1]]).binary_reduce(), Err(LatticeError::NotRank2 { rank: 1 })));
    }

    #[test]
    fn blocks_split() {
        let g = Matrix::from_i64(&[&[0, 1, 0], &[1, 0, 0], &[0, 0, -2]]);
        assert_eq!(orthogonal_blocks(&g), vec![vec![0, 1], vec![2]]);
    }
}
