mod common;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;
use quotient_coho::snf::{kernel_rows, saturate_rows};
use quotient_coho::{parse_lattice_expr, smith_normal_form, GramLattice, Matrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_symmetric(r: &mut ChaCha8Rng, n: usize, bound: i64) -> Matrix {
    let mut m = Matrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let x = BigInt::from(r.gen_range(-bound..=bound));
            m[(i, j)] = x.clone();
            m[(j, i)] = x;
        }
    }
    m
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn overlattice_discriminant_law(seed in any::<u64>(), pi in 0usize..4) {
        let p = [2u64, 3, 5, 7][pi];
        let g = common::glue_construction(&mut rng(seed), p);
        let m = g.vectors.len() as u32;
        let out = g.sub.overlattice_divide(&g.vectors, p).unwrap();
        let pb = BigInt::from(p);
        prop_assert_eq!(out.det().abs() * pb.pow(2 * m), g.sub.det().abs());
        prop_assert_eq!(out.discriminant_group(), g.ambient.discriminant_group());
        prop_assert_eq!(out.signature(), g.ambient.signature());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn discriminant_order_is_det(seed in any::<u64>(), n in 1usize..=8) {
        let mut r = rng(seed);
        let g = random_symmetric(&mut r, n, 50);
        prop_assume!(!g.det().is_zero());
        let l = GramLattice::new(g).unwrap();
        prop_assert_eq!(l.discriminant_group().order(), l.det().abs());
    }

    #[test]
    fn signature_is_a_congruence_invariant(seed in any::<u64>(), n in 1usize..=8) {
        let mut r = rng(seed);
        let g = random_symmetric(&mut r, n, 50);
        prop_assume!(!g.det().is_zero());
        let (u, _) = common::unimodular(&mut r, n, 3 * n);
        let a = GramLattice::new(g.clone()).unwrap();
        let b = GramLattice::new(g.congruence(&u)).unwrap();
        prop_assert_eq!(a.invariant_summary(), b.invariant_summary());
    }

    #[test]
    fn snf_identity(seed in any::<u64>(), rows in 1usize..=8, cols in 1usize..=8) {
        let mut r = rng(seed);
        let a = common::random_matrix(&mut r, rows, cols, 20);
        let s = smith_normal_form(&a);
        prop_assert_eq!(&(&s.u * &a) * &s.v, s.d.clone());
        prop_assert_eq!(s.u.det().abs(), BigInt::one());
        prop_assert_eq!(s.v.det().abs(), BigInt::one());
        let f = s.invariant_factors();
        for w in f.windows(2) {
            prop_assert!((&w[1] % &w[0]).is_zero());
        }
        for i in 0..rows {
            for j in 0..cols {
                if i != j {
                    prop_assert!(s.d[(i, j)].is_zero());
                }
            }
        }
    }

    #[test]
    fn dual_rescaled_is_an_involution(seed in any::<u64>(), pi in 0usize..3, k in 1usize..=3) {
        let p = [2u64, 3, 5][pi];
        let mut r = rng(seed);
        let parts: Vec<String> = (0..k)
            .map(|_| match r.gen_range(0..3) {
                0 => "U".to_string(),
                1 => format!("U({p})"),
                _ => format!("(-{p})"),
            })
            .collect();
        let l = parse_lattice_expr(&parts.join("+")).unwrap();
        let (u, _) = common::unimodular(&mut r, l.rank(), 2 * l.rank());
        let l = GramLattice::new(l.gram().congruence(&u)).unwrap();
        let twice = l.dual_rescaled(p).unwrap().dual_rescaled(p).unwrap();
        prop_assert_eq!(twice.invariant_summary(), l.invariant_summary());
    }

    #[test]
    fn primitive_complement_in_unimodular(seed in any::<u64>(), k in 1usize..=3, m in 1usize..=3) {
        let mut r = rng(seed);
        let l = parse_lattice_expr(&format!("U^{k}")).unwrap();
        let n = 2 * k;
        let m = m.min(n - 1);
        let rows = common::random_matrix(&mut r, m, n, 4);
        prop_assume!(rows.rank() == m);
        let mb = saturate_rows(&rows);
        let gm = l.gram().congruence(&mb);
        prop_assume!(!gm.det().is_zero());
        // M^⊥ = {x : M·G·x = 0}
        let perp = kernel_rows(&(&mb * l.gram()));
        let gp = l.gram().congruence(&perp);
        prop_assert_eq!(gm.det().abs(), gp.det().abs());
        let dm = GramLattice::new(gm).unwrap().discriminant_group();
        let dp = GramLattice::new(gp).unwrap().discriminant_group();
        prop_assert_eq!(dm, dp);
    }
}
