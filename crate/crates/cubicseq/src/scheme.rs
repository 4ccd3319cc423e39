//! The public-key scheme: key generation with generator normalization, the
//! L-map trapdoor, deterministic and probabilistic encryption, decryption.

use num_bigint::{BigInt, BigUint, RandBigInt};
use num_integer::Integer;
use num_traits::{One, Zero};
use rand::Rng;
use thiserror::Error;

use crate::modmath::{lcm, mod_inverse, random_prime};
use crate::sequence::{is_irreducible_cubic_unchecked, seq_pair, Generator};

/// Expected acceptance rate of a random cubic is about 1/3, so 100 expected
/// successes worth of samples before giving up.
pub const KEYGEN_ATTEMPT_BOUND: usize = 900;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SchemeError {
    #[error("message must satisfy 0 <= m < n")]
    MessageOutOfRange,
    #[error("pair is not in Gamma: s_lambda(x, y) != 3 mod n")]
    NotInGamma,
    #[error("invalid ciphertext")]
    InvalidCiphertext,
    #[error(
        "no generator with invertible L(a, b) found after {attempts} attempts \
         (every candidate had L(a, b) = {last_ell} with gcd(L, n) != 1)"
    )]
    KeygenExhausted { attempts: usize, last_ell: BigUint },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PublicKey {
    pub n: BigUint,
    pub a: BigUint,
    pub b: BigUint,
}

impl PublicKey {
    pub fn n_squared(&self) -> BigUint {
        &self.n * &self.n
    }

    pub fn generator(&self) -> Generator {
        Generator::new(self.a.clone(), self.b.clone(), self.n_squared())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrivateKey {
    pub p: BigUint,
    pub q: BigUint,
    pub n: BigUint,
    pub a: BigUint,
    pub b: BigUint,
    pub lambda: BigUint,
    pub l_ab_inv: BigUint,
}

impl PrivateKey {
    pub fn public(&self) -> PublicKey {
        PublicKey {
            n: self.n.clone(),
            a: self.a.clone(),
            b: self.b.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ciphertext {
    pub c1: BigUint,
    pub c2: BigUint,
}

/// Prime pair, modulus, trapdoor exponent and an irreducible generator,
/// before the L(a, b) invertibility gate. This is everything keygen derives
/// except the precomputed inverse; probes and identity tests run on it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KeyMaterial {
    pub p: BigUint,
    pub q: BigUint,
    pub n: BigUint,
    pub a: BigUint,
    pub b: BigUint,
    pub lambda: BigUint,
}

impl KeyMaterial {
    pub fn n_squared(&self) -> BigUint {
        &self.n * &self.n
    }

    pub fn generator(&self) -> Generator {
        Generator::new(self.a.clone(), self.b.clone(), self.n_squared())
    }

    pub fn public_key(&self) -> PublicKey {
        PublicKey {
            n: self.n.clone(),
            a: self.a.clone(),
            b: self.b.clone(),
        }
    }

    /// Sample distinct primes and an (a, b) irreducible mod both.
    pub fn sample<R: Rng + ?Sized>(bits_per_prime: u64, rng: &mut R) -> Self {
        let (p, q) = sample_prime_pair(bits_per_prime, rng);
        let n = &p * &q;
        loop {
            let a = rng.gen_biguint_below(&n);
            let b = rng.gen_biguint_below(&n);
            if generator_is_irreducible(&a, &b, &p, &q) {
                return KeyMaterial {
                    lambda: trapdoor_exponent(&p, &q),
                    n,
                    p,
                    q,
                    a,
                    b,
                };
            }
        }
    }

    pub fn from_primes_and_generator(p: BigUint, q: BigUint, a: BigUint, b: BigUint) -> Self {
        let n = &p * &q;
        KeyMaterial {
            lambda: trapdoor_exponent(&p, &q),
            n,
            p,
            q,
            a,
            b,
        }
    }
}

/// lambda = lcm(p^2 + p + 1, q^2 + q + 1).
pub fn trapdoor_exponent(p: &BigUint, q: &BigUint) -> BigUint {
    let fp = p * p + p + 1u32;
    let fq = q * q + q + 1u32;
    lcm(&fp, &fq)
}

fn generator_is_irreducible(a: &BigUint, b: &BigUint, p: &BigUint, q: &BigUint) -> bool {
    is_irreducible_cubic_unchecked(&(a % p), &(b % p), p)
        && is_irreducible_cubic_unchecked(&(a % q), &(b % q), q)
}

fn sample_prime_pair<R: Rng + ?Sized>(bits: u64, rng: &mut R) -> (BigUint, BigUint) {
    let p = random_prime(bits, rng);
    loop {
        let q = random_prime(bits, rng);
        if q != p {
            return (p, q);
        }
    }
}

/// L(x, y) = (s_lambda(x, y) - 3) / n reduced mod n, with the sequence
/// evaluated modulo n^2. Defined only on Gamma, i.e. when
/// s_lambda(x, y) = 3 mod n.
pub fn l_map(
    x: &BigUint,
    y: &BigUint,
    n: &BigUint,
    lambda: &BigUint,
) -> Result<BigUint, SchemeError> {
    let n2 = n * n;
    let g = Generator::new(x.clone(), y.clone(), n2);
    let s = seq_pair(&g, &BigInt::from(lambda.clone())).s_k;
    let three = BigUint::from(3u32);
    if &s % n != &three % n {
        return Err(SchemeError::NotInGamma);
    }
    // s >= 3 here: s = 3 mod n and n >= 15 force the canonical residue up
    let quotient = (s - three) / n;
    Ok(quotient % n)
}

/// Which branch generator normalization took.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NormalizeBranch {
    /// gcd(L(a, b), n) = 1 straight away.
    Accept,
    /// L(a, b) was degenerate but L(a + n, b) is invertible.
    Shifted,
    /// Both the original and the shifted generator are degenerate; keygen
    /// must re-sample.
    Failed,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalizeOutcome {
    pub branch: NormalizeBranch,
    /// Accepted a-component (original or shifted), when any.
    pub a: Option<BigUint>,
    pub ell_original: BigUint,
    pub ell_shifted: Option<BigUint>,
}

/// Evaluate L(a, b); accept if invertible mod n, otherwise apply the shift
/// a -> a + n once and re-test. Failure is an outcome, not an error.
pub fn normalize_generator(
    p: &BigUint,
    q: &BigUint,
    n: &BigUint,
    a: &BigUint,
    b: &BigUint,
) -> NormalizeOutcome {
    debug_assert_eq!(&(p * q), n);
    let lambda = trapdoor_exponent(p, q);
    let ell = l_map(a, b, n, &lambda).expect("irreducible generator lies in Gamma");
    if ell.gcd(n).is_one() {
        return NormalizeOutcome {
            branch: NormalizeBranch::Accept,
            a: Some(a.clone()),
            ell_original: ell,
            ell_shifted: None,
        };
    }
    let shifted = (a + n) % (n * n);
    let ell_shifted =
        l_map(&shifted, b, n, &lambda).expect("shifted generator still irreducible mod p and q");
    if ell_shifted.gcd(n).is_one() {
        NormalizeOutcome {
            branch: NormalizeBranch::Shifted,
            a: Some(shifted),
            ell_original: ell,
            ell_shifted: Some(ell_shifted),
        }
    } else {
        NormalizeOutcome {
            branch: NormalizeBranch::Failed,
            a: None,
            ell_original: ell,
            ell_shifted: Some(ell_shifted),
        }
    }
}

fn finish_key(
    p: BigUint,
    q: BigUint,
    n: BigUint,
    a: BigUint,
    b: BigUint,
    ell: &BigUint,
) -> (PublicKey, PrivateKey) {
    let lambda = trapdoor_exponent(&p, &q);
    let l_ab_inv = mod_inverse(ell, &n).expect("gcd(ell, n) = 1 checked by caller");
    let pk = PublicKey {
        n: n.clone(),
        a: a.clone(),
        b: b.clone(),
    };
    let sk = PrivateKey {
        p,
        q,
        n,
        a,
        b,
        lambda,
        l_ab_inv,
    };
    (pk, sk)
}

/// Generate a key pair: random primes, rejection-sampled irreducible
/// generator, normalization, precomputed L(a, b) inverse.
pub fn keygen<R: Rng + ?Sized>(
    bits_per_prime: u64,
    rng: &mut R,
) -> Result<(PublicKey, PrivateKey), SchemeError> {
    assert!(bits_per_prime >= 3, "need at least 3-bit primes");
    let (p, q) = sample_prime_pair(bits_per_prime, rng);
    let n = &p * &q;
    let mut last_ell = BigUint::zero();
    for _ in 1..=KEYGEN_ATTEMPT_BOUND {
        let a = rng.gen_biguint_below(&n);
        let b = rng.gen_biguint_below(&n);
        if !generator_is_irreducible(&a, &b, &p, &q) {
            continue;
        }
        let outcome = normalize_generator(&p, &q, &n, &a, &b);
        last_ell = outcome.ell_shifted.unwrap_or(outcome.ell_original.clone());
        if let Some(a_final) = outcome.a {
            let ell = match outcome.branch {
                NormalizeBranch::Accept => outcome.ell_original,
                _ => last_ell.clone(),
            };
            return Ok(finish_key(p, q, n, a_final, b, &ell));
        }
    }
    Err(SchemeError::KeygenExhausted {
        attempts: KEYGEN_ATTEMPT_BOUND,
        last_ell,
    })
}

/// Keygen with fixed primes and a deterministic ascending scan of (a, b)
/// over [0, n)^2 in lexicographic order. Used for reproducible fixtures.
pub fn keygen_scan(p: &BigUint, q: &BigUint) -> Result<(PublicKey, PrivateKey), SchemeError> {
    let n = p * q;
    let mut last_ell = BigUint::zero();
    let mut attempts = 0usize;
    let mut a = BigUint::zero();
    while a < n {
        let mut b = BigUint::zero();
        while b < n {
            attempts += 1;
            if generator_is_irreducible(&a, &b, p, q) {
                let outcome = normalize_generator(p, q, &n, &a, &b);
                last_ell = outcome
                    .ell_shifted
                    .unwrap_or_else(|| outcome.ell_original.clone());
                if let Some(a_final) = outcome.a {
                    let ell = match outcome.branch {
                        NormalizeBranch::Accept => outcome.ell_original,
                        _ => last_ell.clone(),
                    };
                    return Ok(finish_key(
                        p.clone(),
                        q.clone(),
                        n,
                        a_final,
                        b,
                        &ell,
                    ));
                }
            }
            b += 1u32;
        }
        a += 1u32;
    }
    Err(SchemeError::KeygenExhausted {
        attempts,
        last_ell,
    })
}

/// c = (s_m, s_{-m}) mod n^2.
pub fn encrypt_det(pk: &PublicKey, m: &BigUint) -> Result<Ciphertext, SchemeError> {
    if m >= &pk.n {
        return Err(SchemeError::MessageOutOfRange);
    }
    Ok(encrypt_at_exponent(pk, &BigInt::from(m.clone())))
}

/// c = (s_{rn+m}, s_{-(rn+m)}) mod n^2 for the given blinding factor r.
pub fn encrypt_with_r(pk: &PublicKey, m: &BigUint, r: &BigUint) -> Result<Ciphertext, SchemeError> {
    if m >= &pk.n {
        return Err(SchemeError::MessageOutOfRange);
    }
    let k = r * &pk.n + m;
    Ok(encrypt_at_exponent(pk, &BigInt::from(k)))
}

/// Probabilistic variant: r drawn uniformly from [0, n), so the exponent
/// ranges over [0, n^2).
pub fn encrypt_prob<R: Rng + ?Sized>(
    pk: &PublicKey,
    m: &BigUint,
    rng: &mut R,
) -> Result<Ciphertext, SchemeError> {
    if m >= &pk.n {
        return Err(SchemeError::MessageOutOfRange);
    }
    let r = rng.gen_biguint_below(&pk.n);
    encrypt_with_r(pk, m, &r)
}

fn encrypt_at_exponent(pk: &PublicKey, k: &BigInt) -> Ciphertext {
    let pair = seq_pair(&pk.generator(), k);
    Ciphertext {
        c1: pair.s_k,
        c2: pair.s_neg_k,
    }
}

/// m = L(c1, c2) * L(a, b)^-1 mod n.
pub fn decrypt(sk: &PrivateKey, ct: &Ciphertext) -> Result<BigUint, SchemeError> {
    let ell_c = l_map(&ct.c1, &ct.c2, &sk.n, &sk.lambda)
        .map_err(|_| SchemeError::InvalidCiphertext)?;
    Ok((ell_c * &sk.l_ab_inv) % &sk.n)
}
