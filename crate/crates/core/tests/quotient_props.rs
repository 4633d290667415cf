mod common;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;
use quotient_coho::catalog::builtin_catalog;
use quotient_coho::quotient::{auto_glue, bb_quotient, quotient_middle_lattice};
use quotient_coho::{parse_lattice_expr, GramLattice};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn entry_gcd(l: &GramLattice) -> BigInt {
    l.gram().entries().fold(BigInt::zero(), |g, x| g.gcd(x))
}

#[test]
fn catalog_fourfolds() {
    for s in builtin_catalog().unwrap().iter().filter(|s| s.complex_dimension == 4) {
        let (Some(l), Some(glue)) = (&s.invariant_lattice, &s.glue) else { continue };
        let res = bb_quotient(l, s.prime, glue).unwrap();
        let c = res.fujiki_constant.to_integer();
        assert!(res.fujiki_constant.is_integer() && [6, 9, 15, 33].contains(&i64::try_from(c).unwrap()), "{}", s.name);
        assert!(entry_gcd(&res.lattice).is_one(), "{}", s.name);
        // det(out) = λ^n |det(T G Tᵀ)| / p^{2m}
        let gt = l.gram().congruence(&glue.transform);
        let m = glue.divided_count() as u32;
        let n = l.rank() as i32;
        let want = BigRational::from_integer(gt.det().abs()) * res.scale.pow(n)
            / BigRational::from_integer(BigInt::from(s.prime).pow(2 * m));
        assert_eq!(BigRational::from_integer(res.lattice.det().abs()), want, "{}", s.name);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn middle_lattice_twice(seed in any::<u64>(), pi in 0usize..3, k in 1usize..=3) {
        let p = [2u64, 3, 5][pi];
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let parts: Vec<String> = (0..k)
            .map(|_| match r.gen_range(0..3) {
                0 => "U".to_string(),
                1 => format!("U({p})"),
                _ => format!("(-{})", 2 * p),
            })
            .collect();
        let l = parse_lattice_expr(&parts.join("+")).unwrap();
        let l = match quotient_middle_lattice(&l, p) {
            Ok(_) => l,
            Err(_) => return Ok(()),
        };
        let twice = quotient_middle_lattice(&quotient_middle_lattice(&l, p).unwrap(), p);
        if let Ok(t) = twice {
            prop_assert_eq!(t.invariant_summary(), l.invariant_summary());
        }
    }

    #[test]
    fn auto_glue_follows_the_overlattice_law(seed in any::<u64>(), pi in 0usize..3) {
        let p = [3u64, 5, 7][pi];
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let l = common::random_lattice(&mut r, 3);
        let glue = auto_glue(&l, p).unwrap();
        let res = bb_quotient(&l, p, &glue).unwrap();
        let gt = l.gram().congruence(&glue.transform);
        let m = glue.divided_count() as u32;
        let n = l.rank() as i32;
        let want = BigRational::from_integer(gt.det().abs()) * res.scale.pow(n)
            / BigRational::from_integer(BigInt::from(p).pow(2 * m));
        prop_assert_eq!(BigRational::from_integer(res.lattice.det().abs()), want);
        prop_assert!(entry_gcd(&res.lattice).is_one());
    }
}
