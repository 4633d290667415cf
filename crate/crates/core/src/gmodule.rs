//! Integral representations of Z/p: Jordan profiles over F_p, invariant and
//! σ-kernel sublattices, cyclic group cohomology and symmetric squares.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::GModuleError;
use crate::lattice::{GramLattice, SublatticeEmbedding};
use crate::matrix::{is_prime, log_p, Matrix};
use crate::snf::{coordinates_in, kernel_rows, smith_normal_form};

/// φ of order p acting on column vectors of Zⁿ.
#[derive(Clone, Debug)]
pub struct PrimeOrderAction {
    p: u64,
    phi: Matrix,
    gram: Option<Matrix>,
}

impl PrimeOrderAction {
    pub fn new(p: u64, phi: Matrix, gram: Option<Matrix>) -> Result<Self, GModuleError> {
        if !is_prime(p) {
            return Err(GModuleError::NotPrime(p));
        }
        if !phi.is_square() {
            return Err(GModuleError::NotSquare);
        }
        if phi.pow(p as u32) != Matrix::identity(phi.nrows()) {
            return Err(GModuleError::NotOrderP { p });
        }
        if let Some(g) = &gram {
            if g.nrows() != phi.nrows() || g.congruence(&phi.transpose()) != *g {
                return Err(GModuleError::FormNotPreserved);
            }
        }
        Ok(PrimeOrderAction { p, phi, gram })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn phi(&self) -> &Matrix {
        &self.phi
    }

    pub fn gram(&self) -> Option<&Matrix> {
        self.gram.as_ref()
    }

    pub fn rank(&self) -> usize {
        self.phi.nrows()
    }

    pub fn tau(&self) -> Matrix {
        self.phi.sub(&Matrix::identity(self.rank()))
    }

    pub fn sigma(&self) -> Matrix {
        let n = self.rank();
        let mut acc = Matrix::zeros(n, n);
        let mut pw = Matrix::identity(n);
        for _ in 0..self.p {
            acc = acc.add(&pw);
            pw = &pw * &self.phi;
        }
        acc
    }

    fn ambient(&self) -> GramLattice {
        let g = self.gram.clone().unwrap_or_else(|| Matrix::identity(self.rank()));
        GramLattice::new(g).expect("nondegenerate form")
    }
}

/// Block counts l_q of H ⊗ F_p as an F_p[G]-module. For p = 2 the trivial
/// blocks are split by the sign of φ on them.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct JordanProfile {
    pub p: u64,
    pub counts: BTreeMap<u64, u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub l1_plus: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub l1_minus: Option<u64>,
}

impl JordanProfile {
    pub fn new(p: u64, counts: impl IntoIterator<Item = (u64, u64)>) -> Self {
        let counts = counts.into_iter().filter(|&(_, n)| n > 0).collect();
        JordanProfile { p, counts, l1_plus: None, l1_minus: None }
    }

    pub fn zero(p: u64) -> Self {
        Self::new(p, [])
    }

    /// `n` copies of the trivial module.
    pub fn trivial(p: u64, n: u64) -> Self {
        if p == 2 {
            Self::p2(n, 0, 0)
        } else {
            Self::new(p, [(1, n)])
        }
    }

    /// p = 2 profile from (l_{1,+}, l_{1,-}, l_2).
    pub fn p2(l1_plus: u64, l1_minus: u64, l2: u64) -> Self {
        let mut jp = Self::new(2, [(1, l1_plus + l1_minus), (2, l2)]);
        jp.l1_plus = Some(l1_plus);
        jp.l1_minus = Some(l1_minus);
        jp
    }

    pub fn l(&self, q: u64) -> u64 {
        self.counts.get(&q).copied().unwrap_or(0)
    }

    pub fn rank(&self) -> u64 {
        self.counts.iter().map(|(q, n)| q * n).sum()
    }

    /// l_1, or l_{1,+} when p = 2.
    pub fn trivial_part(&self) -> u64 {
        if self.p == 2 {
            self.l1_plus.unwrap_or_else(|| self.l(1))
        } else {
            self.l(1)
        }
    }

    /// l_{p-1}, or l_{1,-} when p = 2.
    pub fn sign_part(&self) -> u64 {
        if self.p == 2 {
            self.l1_minus.unwrap_or(0)
        } else {
            self.l(self.p - 1)
        }
    }

    pub fn free_part(&self) -> u64 {
        self.l(self.p)
    }

    /// Rank of the invariant sublattice.
    pub fn invariant_rank(&self) -> u64 {
        self.trivial_part() + self.free_part()
    }

    pub fn has_middle_blocks(&self) -> bool {
        self.counts.iter().any(|(&q, &n)| n > 0 && q >= 2 && q + 2 <= self.p)
    }

    pub fn is_zero(&self) -> bool {
        self.counts.values().all(|&n| n == 0)
    }
}

/// Profiles of all degrees of one pair (X, G).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CohomologyProfile {
    pub p: u64,
    pub dimension: u32,
    pub profiles: BTreeMap<u32, JordanProfile>,
    pub torsion_free: bool,
}

impl CohomologyProfile {
    pub fn new(p: u64, dimension: u32, torsion_free: bool) -> Self {
        CohomologyProfile { p, dimension, profiles: BTreeMap::new(), torsion_free }
    }

    /// Adds the trivial rank-1 profiles in degrees 0 and 2n when absent.
    pub fn with_unit_degrees(mut self) -> Self {
        for d in [0, 2 * self.dimension] {
            self.profiles.entry(d).or_insert_with(|| JordanProfile::trivial(self.p, 1));
        }
        self
    }

    pub fn set(&mut self, degree: u32, jp: JordanProfile) {
        self.profiles.insert(degree, jp);
    }

    pub fn degree(&self, k: u32) -> JordanProfile {
        self.profiles.get(&k).cloned().unwrap_or_else(|| JordanProfile::zero(self.p))
    }

    pub fn trivial(&self, k: u32) -> u64 {
        self.profiles.get(&k).map_or(0, |j| j.trivial_part())
    }

    pub fn sign(&self, k: u32) -> u64 {
        self.profiles.get(&k).map_or(0, |j| j.sign_part())
    }

    pub fn free(&self, k: u32) -> u64 {
        self.profiles.get(&k).map_or(0, |j| j.free_part())
    }

    /// Poincaré symmetry of total ranks, and unit profiles at both ends.
    pub fn check_shape(&self) -> Result<(), String> {
        let top = 2 * self.dimension;
        for d in [0, top] {
            if let Some(jp) = self.profiles.get(&d) {
                if jp.rank() != 1 || jp.trivial_part() != 1 {
                    return Err(format!("degree {d} must be the trivial rank-1 module"));
                }
            }
        }
        for (&k, jp) in &self.profiles {
            if k > top {
                return Err(format!("degree {k} exceeds 2n = {top}"));
            }
            if let Some(dual) = self.profiles.get(&(top - k)) {
                if dual.rank() != jp.rank() {
                    return Err(format!("b_{k} = {} but b_{} = {}", jp.rank(), top - k, dual.rank()));
                }
            }
        }
        Ok(())
    }
}

fn reduce_mod(m: &Matrix, p: u64) -> Matrix {
    let pb = BigInt::from(p);
    let rows = m.row_vecs().into_iter().map(|r| r.into_iter().map(|x| x.mod_floor(&pb)).collect()).collect();
    Matrix::from_row_vecs(rows, m.ncols())
}

pub fn jordan_profile(a: &PrimeOrderAction) -> JordanProfile {
    let p = a.p;
    let n = a.rank();
    // r_j = rank_Fp (φ - 1)^j for j = 0..=p+1
    let t = reduce_mod(&a.tau(), p);
    let mut ranks = vec![n];
    let mut pw = Matrix::identity(n);
    for _ in 0..=p {
        pw = reduce_mod(&(&pw * &t), p);
        ranks.push(pw.rank_mod(p));
    }
    let counts = (1..=p as usize).map(|q| {
        let l = ranks[q - 1] as i64 - 2 * ranks[q] as i64 + ranks[q + 1] as i64;
        debug_assert!(l >= 0);
        (q as u64, l as u64)
    });
    let mut jp = JordanProfile::new(p, counts);
    if p == 2 {
        let l2 = jp.l(2);
        let plus = n - a.tau().rank();
        let minus = n - a.phi.add(&Matrix::identity(n)).rank();
        jp.l1_plus = Some(plus as u64 - l2);
        jp.l1_minus = Some(minus as u64 - l2);
    }
    jp
}

/// Saturated ker τ = H^G.
pub fn invariant_sublattice(a: &PrimeOrderAction) -> SublatticeEmbedding {
    embedding(a, &kernel_rows(&a.tau()))
}

/// Saturated ker σ.
pub fn sigma_kernel(a: &PrimeOrderAction) -> SublatticeEmbedding {
    let k = embedding(a, &kernel_rows(&a.sigma()));
    let inv = kernel_rows(&a.tau());
    if k.basis_rows.nrows() > 0 && inv.nrows() > 0 {
        assert_eq!(k.basis_rows.vstack(&inv).rank(), k.basis_rows.nrows() + inv.nrows());
    }
    k
}

fn embedding(a: &PrimeOrderAction, rows: &Matrix) -> SublatticeEmbedding {
    // kernel_rows already returns a saturated basis
    SublatticeEmbedding { ambient: a.ambient(), basis_rows: rows.clone(), index: BigInt::one() }
}

/// Exponent a with [H : ker τ ⊕ ker σ] = p^a.
pub fn a_invariant(a: &PrimeOrderAction) -> u32 {
    let n = a.rank();
    if n == 0 {
        return 0;
    }
    let k1 = kernel_rows(&a.tau());
    let k2 = kernel_rows(&a.sigma());
    let both = if k1.nrows() == 0 {
        k2
    } else if k2.nrows() == 0 {
        k1
    } else {
        k1.vstack(&k2)
    };
    assert_eq!(both.nrows(), n, "ker τ and ker σ must span a full-rank sublattice");
    log_p(&both.det().abs(), a.p).expect("index is a power of p")
}

/// H^i(G, H) as Z^free ⊕ (Z/p)^torsion.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AbelianGroup {
    pub free_rank: u64,
    pub torsion_rank: u64,
}

pub fn group_cohomology_formula(jp: &JordanProfile, i: u32) -> AbelianGroup {
    match i {
        0 => AbelianGroup { free_rank: jp.invariant_rank(), torsion_rank: 0 },
        i if i % 2 == 1 => AbelianGroup { free_rank: 0, torsion_rank: jp.sign_part() },
        _ => AbelianGroup { free_rank: 0, torsion_rank: jp.trivial_part() },
    }
}

/// ker/im through the complex H →τ H →σ H →τ ... by SNF. Torsion factors other
/// than p are reported as an error.
pub fn group_cohomology_explicit(a: &PrimeOrderAction, i: u32) -> Result<AbelianGroup, GModuleError> {
    let (tau, sigma) = (a.tau(), a.sigma());
    if i == 0 {
        return Ok(AbelianGroup { free_rank: kernel_rows(&tau).nrows() as u64, torsion_rank: 0 });
    }
    // odd: ker σ / im τ ; even: ker τ / im σ
    let (kernel_of, image_of) = if i % 2 == 1 { (&sigma, &tau) } else { (&tau, &sigma) };
    let k = kernel_rows(kernel_of);
    if k.nrows() == 0 {
        return Ok(AbelianGroup { free_rank: 0, torsion_rank: 0 });
    }
    let gens = image_of.transpose();
    let coords: Vec<Vec<BigInt>> = gens
        .row_vecs()
        .iter()
        .map(|v| coordinates_in(&k, v).expect("image lies in the kernel"))
        .collect();
    let c = Matrix::from_row_vecs(coords, k.nrows());
    let f = smith_normal_form(&c).invariant_factors();
    let pb = BigInt::from(a.p);
    let mut torsion = 0;
    for d in &f {
        if d.is_one() {
            continue;
        }
        if *d != pb {
            return Err(GModuleError::CrossCheckFailed(format!("torsion factor {d} in degree {i}")));
        }
        torsion += 1;
    }
    Ok(AbelianGroup { free_rank: (k.nrows() - f.len()) as u64, torsion_rank: torsion })
}

/// Explicit computation, checked against the Jordan-profile formula when it applies.
pub fn group_cohomology(a: &PrimeOrderAction, i: u32) -> Result<AbelianGroup, GModuleError> {
    let explicit = group_cohomology_explicit(a, i)?;
    if a.p == 2 || a.p <= 19 {
        let formula = group_cohomology_formula(&jordan_profile(a), i);
        if formula != explicit {
            return Err(GModuleError::CrossCheckFailed(format!(
                "degree {i}: formula {formula:?}, explicit {explicit:?}"
            )));
        }
    }
    Ok(explicit)
}

/// Closed-form profile of Sym² for 3 ≤ p ≤ 19.
pub fn sym2_profile(jp: &JordanProfile) -> Result<JordanProfile, GModuleError> {
    let p = jp.p;
    if !(3..=19).contains(&p) {
        return Err(GModuleError::UnsupportedPrime(p));
    }
    if jp.has_middle_blocks() {
        return Err(GModuleError::MiddleBlocksPresent);
    }
    let (l1, lm, lp) = (jp.l(1), jp.l(p - 1), jp.l(p));
    let c2 = |x: u64| x * x.saturating_sub(1) / 2;
    let s1 = l1 * (l1 + 1) / 2 + c2(lm);
    let sm = lm * l1;
    let sp = (p + 1) / 2 * lp + p * c2(lp) + (p - 1) / 2 * lm + (p - 1) * lp * lm + lp * l1 + (p - 2) * c2(lm);
    Ok(JordanProfile::new(p, [(1, s1), (p - 1, sm), (p, sp)]))
}

/// Induced action on Sym²(Zⁿ) in the basis e_i e_j, i ≤ j.
pub fn sym2_action(a: &PrimeOrderAction) -> PrimeOrderAction {
    let n = a.rank();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i..n).map(move |j| (i, j))).collect();
    let m = pairs.len();
    let f = &a.phi;
    let mut out = Matrix::zeros(m, m);
    for (col, &(i, j)) in pairs.iter().enumerate() {
        for (row, &(k, l)) in pairs.iter().enumerate() {
            out[(row, col)] = if k == l {
                &f[(k, i)] * &f[(k, j)]
            } else {
                &f[(k, i)] * &f[(l, j)] + &f[(l, i)] * &f[(k, j)]
            };
        }
    }
    PrimeOrderAction { p: a.p, phi: out, gram: None }
}

/// Hypotheses under which the cohomology of a free quotient is read off the profile.
pub fn free_quotient_hypotheses(cp: &CohomologyProfile, k: u32) -> bool {
    let sign_ok = (1..=k).all(|i| cp.sign(2 * i) == 0);
    let triv_ok = k <= 1 || (0..k).all(|i| cp.trivial(2 * i + 1) == 0);
    sign_ok && triv_ok
}

/// H^degree(X/G, Z) for a free action, either assuming E₂-degeneration over Z
/// (`degenerate`) or under the vanishing hypotheses on the profile.
pub fn free_quotient_cohomology(
    cp: &CohomologyProfile,
    degree: u32,
    degenerate: bool,
) -> Result<AbelianGroup, GModuleError> {
    let free = cp.trivial(degree) + cp.free(degree);
    let m = degree / 2;
    let torsion = if degree % 2 == 0 {
        (0..m).map(|i| cp.sign(2 * i + 1)).sum::<u64>() + (0..m).map(|i| cp.trivial(2 * i)).sum::<u64>()
    } else {
        (0..=m).map(|i| cp.sign(2 * i)).sum::<u64>() + (0..m).map(|i| cp.trivial(2 * i + 1)).sum::<u64>()
    };
    if degenerate {
        return Ok(AbelianGroup { free_rank: free, torsion_rank: torsion });
    }
    if degree % 2 == 0 {
        if free_quotient_hypotheses(cp, m) {
            return Ok(AbelianGroup { free_rank: free, torsion_rank: torsion });
        }
    } else if free_quotient_hypotheses(cp, m + 1) || (m >= 1 && free_quotient_hypotheses(cp, m)) {
        return Ok(AbelianGroup { free_rank: free, torsion_rank: 0 });
    }
    Err(GModuleError::HypothesesNotMet)
}

/// Permutation matrix of the p-cycle e_i ↦ e_{i+1}.
pub fn cycle_matrix(p: usize) -> Matrix {
    let mut m = Matrix::zeros(p, p);
    for i in 0..p {
        m[((i + 1) % p, i)] = BigInt::one();
    }
    m
}

/// Companion matrix of Φ_p = 1 + x + ... + x^{p-1}, size p-1.
pub fn cyclotomic_companion(p: usize) -> Matrix {
    let n = p - 1;
    let mut m = Matrix::zeros(n, n);
    for i in 1..n {
        m[(i, i - 1)] = BigInt::one();
    }
    for i in 0..n {
        m[(i, n - 1)] = -BigInt::one();
    }
    m
}

/// (O_K, a): companion of Φ_p with an extra trivial coordinate glued by `a`.
pub fn glued_companion(p: usize, a: &[BigInt]) -> Matrix {
    let n = p - 1;
    let c = cyclotomic_companion(p);
    let mut m = Matrix::zeros(p, p);
    for i in 0..n {
        for j in 0..n {
            m[(i, j)] = c[(i, j)].clone();
        }
        m[(i, n)] = a.get(i).cloned().unwrap_or_else(BigInt::zero);
    }
    m[(n, n)] = BigInt::one();
    m
}

/// Σ_k (φ^k)ᵀ φ^k, a positive definite form preserved by φ.
pub fn averaged_form(p: u64, phi: &Matrix) -> Matrix {
    let n = phi.nrows();
    let mut acc = Matrix::zeros(n, n);
    let mut pw = Matrix::identity(n);
    for _ in 0..p {
        acc = acc.add(&(&pw.transpose() * &pw));
        pw = &pw * phi;
    }
    acc
}
