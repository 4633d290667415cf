//! Smith normal form with unimodular transforms, and the kernel/saturation
//! helpers built on it.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::matrix::Matrix;

/// `u · a · v = d` with `u`, `v` unimodular and `d` diagonal, d_1 | d_2 | ...
#[derive(Clone, Debug)]
pub struct Snf {
    pub u: Matrix,
    pub d: Matrix,
    pub v: Matrix,
}

impl Snf {
    /// Nonzero diagonal entries, in order.
    pub fn invariant_factors(&self) -> Vec<BigInt> {
        let k = self.d.nrows().min(self.d.ncols());
        (0..k).map(|i| self.d[(i, i)].clone()).filter(|x| !x.is_zero()).collect()
    }

    pub fn rank(&self) -> usize {
        self.invariant_factors().len()
    }
}

pub fn smith_normal_form(a: &Matrix) -> Snf {
    let (m, n) = (a.nrows(), a.ncols());
    let mut d = a.clone();
    let mut u = Matrix::identity(m);
    let mut v = Matrix::identity(n);

    for t in 0..m.min(n) {
        // smallest nonzero |entry| in the trailing block, row-major tie-break
        let Some((pi, pj)) = pivot(&d, t) else { break };
        d.swap_rows(t, pi);
        u.swap_rows(t, pi);
        d.swap_cols(t, pj);
        v.swap_cols(t, pj);

        loop {
            let mut dirty = false;
            for i in t + 1..m {
                if !d[(i, t)].is_zero() {
                    let q = d[(i, t)].div_floor(&d[(t, t)]);
                    d.add_row_multiple(i, t, &-&q);
                    u.add_row_multiple(i, t, &-&q);
                    dirty |= !d[(i, t)].is_zero();
                }
            }
            for j in t + 1..n {
                if !d[(t, j)].is_zero() {
                    let q = d[(t, j)].div_floor(&d[(t, t)]);
                    d.add_col_multiple(j, t, &-&q);
                    v.add_col_multiple(j, t, &-&q);
                    dirty |= !d[(t, j)].is_zero();
                }
            }
            if dirty {
                // a remainder is now smaller than the pivot: re-pivot within row t / column t
                let (pi, pj) = pivot_cross(&d, t);
                d.swap_rows(t, pi);
                u.swap_rows(t, pi);
                d.swap_cols(t, pj);
                v.swap_cols(t, pj);
                continue;
            }
            // divisibility of the trailing block
            let bad = (t + 1..m)
                .flat_map(|i| (t + 1..n).map(move |j| (i, j)))
                .find(|&(i, j)| !d[(i, j)].is_multiple_of(&d[(t, t)]));
            match bad {
                Some((i, _)) => {
                    d.add_row_multiple(t, i, &BigInt::one());
                    u.add_row_multiple(t, i, &BigInt::one());
                }
                None => break,
            }
        }
        if d[(t, t)].is_negative() {
            d.negate_row(t);
            u.negate_row(t);
        }
    }
    Snf { u, d, v }
}

fn pivot(d: &Matrix, t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for i in t..d.nrows() {
        for j in t..d.ncols() {
            let x = &d[(i, j)];
            if x.is_zero() {
                continue;
            }
            if best.is_none_or(|(bi, bj)| x.abs() < d[(bi, bj)].abs()) {
                best = Some((i, j));
            }
        }
    }
    best
}

fn pivot_cross(d: &Matrix, t: usize) -> (usize, usize) {
    let mut best = (t, t);
    let mut consider = |i: usize, j: usize| {
        let x = &d[(i, j)];
        if !x.is_zero() && (d[best].is_zero() || x.abs() < d[best].abs()) {
            best = (i, j);
        }
    };
    for j in t..d.ncols() {
        consider(t, j);
    }
    for i in t + 1..d.nrows() {
        consider(i, t);
    }
    best
}

/// Saturated basis (as rows) of {x ∈ Zⁿ : a·x = 0}.
pub fn kernel_rows(a: &Matrix) -> Matrix {
    let n = a.ncols();
    let snf = smith_normal_form(a);
    let r = snf.rank();
    let vt = snf.v.transpose();
    let idx: Vec<usize> = (r..n).collect();
    vt.select_rows(&idx)
}

/// Basis (as rows) of the saturation of the row span of `b` in Zⁿ.
pub fn saturate_rows(b: &Matrix) -> Matrix {
    // rows orthogonal (under the standard dot product) to the kernel of b
    let k = kernel_rows(b);
    if k.nrows() == 0 {
        return Matrix::identity(b.ncols());
    }
    kernel_rows(&k)
}

/// Index of the row span of `b` inside its saturation: product of invariant factors.
pub fn saturation_index(b: &Matrix) -> BigInt {
    smith_normal_form(b).invariant_factors().iter().fold(BigInt::one(), |acc, x| acc * x)
}

/// Integer solution x of x·basis = v when v lies in the row span of the saturated `basis`.
pub fn coordinates_in(basis: &Matrix, v: &[BigInt]) -> Option<Vec<BigInt>> {
    // basisᵀ·xᵀ = vᵀ ; solve through the SNF of basisᵀ
    let bt = basis.transpose();
    let snf = smith_normal_form(&bt);
    let col = Matrix::from_row_vecs(v.iter().map(|x| vec![x.clone()]).collect(), 1);
    let w = &snf.u * &col;
    let k = basis.nrows();
    let mut y = vec![BigInt::zero(); k];
    for i in 0..w.nrows() {
        let di = if i < k { snf.d[(i, i)].clone() } else { BigInt::zero() };
        if di.is_zero() {
            if !w[(i, 0)].is_zero() {
                return None;
            }
        } else {
            let (q, r) = w[(i, 0)].div_rem(&di);
            if !r.is_zero() {
                return None;
            }
            y[i] = q;
        }
    }
    let ycol = Matrix::from_row_vecs(y.into_iter().map(|x| vec![x]).collect(), 1);
    Some((&snf.v * &ycol).column(0))
}
