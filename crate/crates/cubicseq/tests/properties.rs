//! Property tests over randomized generators and exponents.

use num_bigint::{BigInt, BigUint};
use proptest::prelude::*;

use cubicseq::modmath::{gcd, lcm, mod_inverse};
use cubicseq::oracle::seq_iterative;
use cubicseq::scheme::{encrypt_with_r, l_map, KeyMaterial};
use cubicseq::sequence::{reciprocal_pair, seq_pair, Generator};

fn gen_of(a: u64, b: u64, m: u64) -> Generator {
    Generator::new(BigUint::from(a), BigUint::from(b), BigUint::from(m))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn negation_swaps_components(a in 0u64..10_000, b in 0u64..10_000,
                                 m in 2u64..10_000, k in -5_000i64..5_000) {
        let g = gen_of(a % m, b % m, m);
        let fwd = seq_pair(&g, &BigInt::from(k));
        let bwd = seq_pair(&g, &BigInt::from(-k));
        prop_assert_eq!(fwd.s_k, bwd.s_neg_k);
        prop_assert_eq!(fwd.s_neg_k, bwd.s_k);
    }

    #[test]
    fn reciprocal_generator_reverses(a in 0u64..10_000, b in 0u64..10_000,
                                     m in 2u64..10_000, k in -5_000i64..5_000) {
        let g = gen_of(a % m, b % m, m);
        let k = BigInt::from(k);
        prop_assert_eq!(
            seq_pair(&g, &k).s_neg_k,
            seq_pair(&reciprocal_pair(&g), &k).s_k
        );
    }

    #[test]
    fn engine_matches_iterative(a in 0u64..1_000_000, b in 0u64..1_000_000,
                                m in 2u64..1_000_000, k in -3_000i64..3_000) {
        let g = gen_of(a % m, b % m, m);
        let k = BigInt::from(k);
        prop_assert_eq!(seq_iterative(&g, &k).unwrap(), seq_pair(&g, &k));
    }

    #[test]
    fn recurrence_window(a in 0u64..100_000, b in 0u64..100_000,
                         m in 2u64..100_000, k in -1_000_000i64..1_000_000) {
        let g = gen_of(a % m, b % m, m);
        let a = a % m;
        let b = b % m;
        let s = |j: i64| -> i128 {
            u64::try_from(seq_pair(&g, &BigInt::from(j)).s_k).unwrap() as i128
        };
        let rhs = (a as i128 * s(k + 2) - b as i128 * s(k + 1) + s(k)).rem_euclid(m as i128);
        prop_assert_eq!(s(k + 3), rhs);
    }

    #[test]
    fn mod_inverse_is_inverse_or_shares_factor(x in 1u64..100_000, m in 2u64..100_000) {
        let xb = BigUint::from(x);
        let mb = BigUint::from(m);
        match mod_inverse(&xb, &mb) {
            Ok(inv) => prop_assert_eq!((xb * inv) % &mb, BigUint::from(1u32)),
            Err(_) => prop_assert_ne!(gcd(&xb, &mb), BigUint::from(1u32)),
        }
    }

    #[test]
    fn lcm_gcd_product(x in 1u64..1_000_000, y in 1u64..1_000_000) {
        let xb = BigUint::from(x);
        let yb = BigUint::from(y);
        prop_assert_eq!(lcm(&xb, &yb) * gcd(&xb, &yb), &xb * &yb);
    }

    #[test]
    fn composition_identity_desk_key(k in 0u64..1_000_000, e in 0u64..1_000_000) {
        let km = KeyMaterial::from_primes_and_generator(
            BigUint::from(5u32), BigUint::from(7u32), BigUint::from(0u32), BigUint::from(1u32));
        let g = km.generator();
        let inner = seq_pair(&g, &BigInt::from(k));
        let composed = seq_pair(
            &Generator::new(inner.s_k, inner.s_neg_k, km.n_squared()),
            &BigInt::from(e),
        );
        let direct = seq_pair(&g, &BigInt::from(k as u128 * e as u128));
        prop_assert_eq!(composed.s_k, direct.s_k);
        prop_assert_eq!(composed.s_neg_k, direct.s_neg_k);
    }

    #[test]
    fn honest_ciphertexts_lie_in_gamma(m in 0u64..35, r in 0u64..200) {
        let km = KeyMaterial::from_primes_and_generator(
            BigUint::from(5u32), BigUint::from(7u32), BigUint::from(0u32), BigUint::from(1u32));
        let ct = encrypt_with_r(&km.public_key(), &BigUint::from(m), &BigUint::from(r)).unwrap();
        prop_assert!(l_map(&ct.c1, &ct.c2, &km.n, &km.lambda).is_ok());
    }
}
