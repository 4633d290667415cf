mod common;

use num_bigint::BigInt;
use proptest::prelude::*;
use quotient_coho::gmodule::{
    a_invariant, group_cohomology, group_cohomology_explicit, group_cohomology_formula, invariant_sublattice,
    jordan_profile, sigma_kernel, sym2_action, sym2_profile, PrimeOrderAction,
};
use quotient_coho::Matrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn action(seed: u64, p: u64, max_rank: usize) -> (PrimeOrderAction, [u64; 3]) {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    let (phi, counts) = common::reiner_action(&mut r, p as usize, max_rank);
    // Σ (φ^k)ᵀ φ^k is a φ-invariant positive definite form
    let n = phi.nrows();
    let mut g = Matrix::zeros(n, n);
    let mut f = Matrix::identity(n);
    for _ in 0..p {
        g = g.add(&(&f.transpose() * &f));
        f = &phi * &f;
    }
    (PrimeOrderAction::new(p, phi, Some(g)).unwrap(), counts)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn sym2_commutes_with_profiles(seed in any::<u64>(), pi in 0usize..3) {
        let p = [3u64, 5, 7][pi];
        let (a, _) = action(seed, p, 8);
        let direct = jordan_profile(&sym2_action(&a));
        let closed = sym2_profile(&jordan_profile(&a)).unwrap();
        prop_assert_eq!(direct, closed);
    }

    #[test]
    fn a_invariant_is_free_part(seed in any::<u64>(), pi in 0usize..4) {
        let p = [3u64, 5, 7, 11][pi];
        let (a, counts) = action(seed, p, 2 * p as usize + 2);
        let jp = jordan_profile(&a);
        prop_assert_eq!(a_invariant(&a) as u64, jp.l(p));
        prop_assert_eq!(jp.l(p), counts[2]);
        prop_assert_eq!(jp.l(1), counts[0]);
        prop_assert_eq!(jp.l(p - 1), counts[1]);
        prop_assert!(!jp.has_middle_blocks());
    }

    #[test]
    fn cohomology_formula_matches_snf(seed in any::<u64>(), pi in 0usize..5, i in 0u32..5) {
        let p = [2u64, 3, 5, 7, 11][pi];
        let (a, _) = action(seed, p, 12);
        let explicit = group_cohomology_explicit(&a, i).unwrap();
        prop_assert_eq!(explicit, group_cohomology_formula(&jordan_profile(&a), i));
        prop_assert!(group_cohomology(&a, i).is_ok());
        if i >= 1 {
            prop_assert_eq!(explicit, group_cohomology_explicit(&a, i + 2).unwrap());
        }
    }

    #[test]
    fn invariant_and_sigma_kernel_are_complementary(seed in any::<u64>(), pi in 0usize..3) {
        let p = [3u64, 5, 7][pi];
        let (a, _) = action(seed, p, 10);
        let inv = invariant_sublattice(&a).basis_rows;
        let ker = sigma_kernel(&a).basis_rows;
        let n = a.rank();
        prop_assert_eq!(inv.nrows() + ker.nrows(), n);
        let both = if inv.nrows() == 0 { ker.clone() } else if ker.nrows() == 0 { inv.clone() } else { inv.vstack(&ker) };
        prop_assert_eq!(both.rank(), n);
        let index = both.det();
        let expected = BigInt::from(p).pow(a_invariant(&a));
        prop_assert_eq!(num_traits::Signed::abs(&index), expected);
    }
}
