//! Random generators shared by the property tests and the acceptance run.
#![allow(dead_code)]

use num_bigint::BigInt;
use quotient_coho::{parse_lattice_expr, GramLattice, Matrix};
use rand::seq::SliceRandom;
use rand::Rng;

/// Random unimodular U with its inverse, from elementary operations.
pub fn unimodular<R: Rng>(rng: &mut R, n: usize, steps: usize) -> (Matrix, Matrix) {
    let mut u = Matrix::identity(n);
    let mut inv = Matrix::identity(n);
    if n < 2 {
        return (u, inv);
    }
    for _ in 0..steps {
        let i = rng.gen_range(0..n);
        let mut j = rng.gen_range(0..n - 1);
        if j >= i {
            j += 1;
        }
        let c = BigInt::from(rng.gen_range(-2i64..=2));
        // E = I + c e_ij: rows of u, columns of inv
        u.add_row_multiple(i, j, &c);
        inv.add_col_multiple(j, i, &-c);
    }
    (u, inv)
}

pub fn random_matrix<R: Rng>(rng: &mut R, rows: usize, cols: usize, bound: i64) -> Matrix {
    let v: Vec<Vec<BigInt>> =
        (0..rows).map(|_| (0..cols).map(|_| BigInt::from(rng.gen_range(-bound..=bound))).collect()).collect();
    Matrix::from_row_vecs(v, cols)
}

/// Nondegenerate even lattice built from small atoms, then a random basis change.
pub fn random_lattice<R: Rng>(rng: &mut R, max_atoms: usize) -> GramLattice {
    const ATOMS: &[&str] = &["U", "A2(-1)", "A2", "(-2)", "(2)", "(4)", "(-6)", "U(2)", "A4(-1)", "K7", "H5"];
    let k = rng.gen_range(1..=max_atoms);
    let expr: Vec<&str> = (0..k).map(|_| *ATOMS.choose(rng).unwrap()).collect();
    let l = parse_lattice_expr(&expr.join("+")).unwrap();
    let (u, _) = unimodular(rng, l.rank(), 3 * l.rank());
    GramLattice::new(l.gram().congruence(&u)).unwrap()
}

/// A sublattice of index p^m in M together with the m vectors whose
/// division by p recovers M.
pub struct GlueConstruction {
    pub ambient: GramLattice,
    pub sub: GramLattice,
    pub vectors: Vec<Vec<BigInt>>,
    pub p: u64,
}

pub fn glue_construction<R: Rng>(rng: &mut R, p: u64) -> GlueConstruction {
    let ambient = random_lattice(rng, 3);
    let n = ambient.rank();
    let m = rng.gen_range(0..=n);
    let (u, u_inv) = unimodular(rng, n, 3 * n);
    // L has basis rows T = U·D, D = diag(p,..,p,1,..,1). The basis of M in
    // L-coordinates is T⁻¹ = D⁻¹U⁻¹, whose first m rows are (rows of U⁻¹)/p.
    let mut d = Matrix::identity(n);
    for i in 0..m {
        d[(i, i)] = BigInt::from(p);
    }
    let sub = GramLattice::new(ambient.gram().congruence(&(&u * &d))).unwrap();
    let vectors = (0..m).map(|i| u_inv.row(i).to_vec()).collect();
    GlueConstruction { ambient, sub, vectors, p }
}

/// Indecomposable Z[Z/p]-lattices of Reiner type: 0 trivial, 1 cyclotomic, 2 free.
pub fn reiner_block(p: usize, kind: u8) -> Matrix {
    match kind {
        0 => Matrix::identity(1),
        1 => {
            // companion matrix of 1 + x + ... + x^{p-1}
            let n = p - 1;
            let mut c = Matrix::zeros(n, n);
            for i in 1..n {
                c[(i, i - 1)] = BigInt::from(1);
            }
            for i in 0..n {
                c[(i, n - 1)] = BigInt::from(-1);
            }
            c
        }
        _ => {
            let mut c = Matrix::zeros(p, p);
            for i in 0..p {
                c[((i + 1) % p, i)] = BigInt::from(1);
            }
            c
        }
    }
}

/// Block sum of random Reiner blocks, conjugated by a random unimodular matrix.
/// Returns the matrix and the counts (trivial, cyclotomic, free).
pub fn reiner_action<R: Rng>(rng: &mut R, p: usize, max_rank: usize) -> (Matrix, [u64; 3]) {
    let mut blocks = Vec::new();
    let mut counts = [0u64; 3];
    let mut rank = 0;
    loop {
        let kind: u8 = rng.gen_range(0..3);
        let size = [1, p - 1, p][kind as usize];
        if rank + size > max_rank {
            if rank > 0 {
                break;
            }
            continue;
        }
        blocks.push(reiner_block(p, kind));
        counts[kind as usize] += 1;
        rank += size;
        if rng.gen_bool(0.35) {
            break;
        }
    }
    let phi = Matrix::block_diag(&blocks);
    let (u, u_inv) = unimodular(rng, rank, 2 * rank);
    (&(&u * &phi) * &u_inv, counts)
}
