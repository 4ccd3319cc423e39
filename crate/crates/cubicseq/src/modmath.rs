//! Arbitrary-precision modular arithmetic substrate: inverses, lcm,
//! primality testing and prime generation.

use num_bigint::{BigInt, BigUint, RandBigInt};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ModMathError {
    #[error("{value} is not invertible modulo {modulus}")]
    NotInvertible { value: BigUint, modulus: BigUint },
}

/// Modular inverse via extended gcd. Fails exactly when gcd(x, m) != 1.
pub fn mod_inverse(x: &BigUint, m: &BigUint) -> Result<BigUint, ModMathError> {
    assert!(*m >= BigUint::from(2u32), "modulus must be >= 2");
    let a = BigInt::from(x % m);
    let md = BigInt::from(m.clone());
    let e = a.extended_gcd(&md);
    if !e.gcd.is_one() {
        return Err(ModMathError::NotInvertible {
            value: x.clone(),
            modulus: m.clone(),
        });
    }
    let inv = e.x.mod_floor(&md);
    Ok(inv.to_biguint().expect("mod_floor of positive modulus"))
}

pub fn gcd(x: &BigUint, y: &BigUint) -> BigUint {
    x.gcd(y)
}

pub fn lcm(x: &BigUint, y: &BigUint) -> BigUint {
    assert!(!x.is_zero() && !y.is_zero(), "lcm arguments must be >= 1");
    x.lcm(y)
}

// Witnesses giving an exact answer for all n < 2^64
// (Sloane A014233, full 12-prime set).
const SMALL_WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

/// Miller-Rabin. Exact for x < 2^64 (fixed witness set); otherwise
/// probabilistic with the first `rounds` primes as bases, error <= 4^-rounds.
pub fn is_probable_prime(x: &BigUint, rounds: usize) -> bool {
    let two = BigUint::from(2u32);
    if *x < two {
        return false;
    }
    if x.is_even() {
        return *x == two;
    }
    for &p in &[3u64, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let p = BigUint::from(p);
        if *x == p {
            return true;
        }
        if (x % &p).is_zero() {
            return false;
        }
    }
    // write x-1 = d * 2^s
    let x_minus_1 = x - 1u32;
    let s = x_minus_1.trailing_zeros().unwrap_or(0);
    let d = &x_minus_1 >> s;

    let witnesses: Vec<BigUint> = if x.to_u64().is_some() {
        SMALL_WITNESSES.iter().map(|&w| BigUint::from(w)).collect()
    } else {
        prime_bases(rounds)
    };

    'outer: for w in witnesses {
        let w = w % x;
        if w.is_zero() || w.is_one() {
            continue;
        }
        let mut y = w.modpow(&d, x);
        if y.is_one() || y == x_minus_1 {
            continue;
        }
        for _ in 1..s {
            y = y.modpow(&two, x);
            if y == x_minus_1 {
                continue 'outer;
            }
        }
        return false;
    }
    true
}

fn prime_bases(count: usize) -> Vec<BigUint> {
    let mut bases = Vec::with_capacity(count);
    let mut candidate = 2u64;
    while bases.len() < count {
        if is_prime_u64(candidate) {
            bases.push(BigUint::from(candidate));
        }
        candidate += 1;
    }
    bases
}

fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

pub const DEFAULT_MR_ROUNDS: usize = 40;

/// Random odd prime with exactly `bits` bits. Deterministic for a seeded rng.
pub fn random_prime<R: Rng + ?Sized>(bits: u64, rng: &mut R) -> BigUint {
    assert!(bits >= 3, "need at least 3 bits for an odd prime");
    loop {
        let mut candidate = rng.gen_biguint(bits);
        candidate.set_bit(bits - 1, true);
        candidate.set_bit(0, true);
        if is_probable_prime(&candidate, DEFAULT_MR_ROUNDS) {
            return candidate;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn big(n: u64) -> BigUint {
        BigUint::from(n)
    }

    #[test]
    fn mod_inverse_identity() {
        assert_eq!(mod_inverse(&big(1), &big(35)).unwrap(), big(1));
    }

    #[test]
    fn mod_inverse_of_three_mod_35() {
        // 3 * 12 = 36 = 1 mod 35
        assert_eq!(mod_inverse(&big(3), &big(35)).unwrap(), big(12));
    }

    #[test]
    fn mod_inverse_shared_factor_fails() {
        assert!(matches!(
            mod_inverse(&big(5), &big(35)),
            Err(ModMathError::NotInvertible { .. })
        ));
    }

    #[test]
    fn lcm_values() {
        assert_eq!(lcm(&big(31), &big(57)), big(1767));
        assert_eq!(lcm(&big(13), &big(31)), big(403));
        assert_eq!(lcm(&big(6), &big(4)), big(12));
    }

    #[test]
    fn primality_fixed_cases() {
        assert!(!is_probable_prime(&big(35), DEFAULT_MR_ROUNDS));
        assert!(is_probable_prime(&big(31), DEFAULT_MR_ROUNDS));
        // Carmichael number 561 = 3 * 11 * 17
        assert!(!is_probable_prime(&big(561), DEFAULT_MR_ROUNDS));
    }

    #[test]
    fn primality_agrees_with_trial_division_to_one_million() {
        // sieve of Eratosthenes as the independent oracle
        let limit = 1_000_000usize;
        let mut sieve = vec![true; limit];
        sieve[0] = false;
        sieve[1] = false;
        for i in 2..limit {
            if sieve[i] {
                let mut j = i * i;
                while j < limit {
                    sieve[j] = false;
                    j += i;
                }
            }
        }
        for (n, &is_prime) in sieve.iter().enumerate() {
            assert_eq!(
                is_probable_prime(&big(n as u64), DEFAULT_MR_ROUNDS),
                is_prime,
                "disagreement at {n}"
            );
        }
    }

    #[test]
    fn random_prime_three_bits() {
        let mut rng = ChaCha20Rng::seed_from_u64(42);
        for _ in 0..20 {
            let p = random_prime(3, &mut rng);
            assert!(p == big(5) || p == big(7), "got {p}");
        }
    }

    #[test]
    fn random_prime_bit_length_and_primality() {
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        for bits in [8u64, 16, 32, 64, 80] {
            let p = random_prime(bits, &mut rng);
            assert_eq!(p.bits(), bits);
            assert!(is_probable_prime(&p, DEFAULT_MR_ROUNDS));
        }
    }

    #[test]
    fn random_prime_deterministic_per_seed() {
        let a = random_prime(16, &mut ChaCha20Rng::seed_from_u64(7));
        let b = random_prime(16, &mut ChaCha20Rng::seed_from_u64(7));
        assert_eq!(a, b);
    }

    #[test]
    fn lcm_times_gcd_is_product() {
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        for _ in 0..50 {
            let x = rng.gen_biguint(40) + 1u32;
            let y = rng.gen_biguint(40) + 1u32;
            assert_eq!(lcm(&x, &y) * gcd(&x, &y), &x * &y);
        }
    }
}
