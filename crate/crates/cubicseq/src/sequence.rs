//! Third-order characteristic sequence engine.
//!
//! The sequence s(a, b) over a modulus M is defined by
//! s_{k+3} = a*s_{k+2} - b*s_{k+1} + s_k with s_0 = 3, s_1 = a, s_{-1} = b.
//! Forward and backward terms are evaluated together in O(log |k|)
//! multiplications of the 3x3 companion matrix.

use num_bigint::{BigInt, BigUint, Sign};
use num_traits::{One, Zero};
use thiserror::Error;

use crate::modmath::{is_probable_prime, DEFAULT_MR_ROUNDS};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SequenceError {
    #[error("{0} is not an odd prime")]
    InvalidPrime(BigUint),
}

/// Generator (a, b) of a characteristic sequence over a working modulus,
/// typically n^2. Components are stored canonically reduced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Generator {
    a: BigUint,
    b: BigUint,
    modulus: BigUint,
}

impl Generator {
    pub fn new(a: BigUint, b: BigUint, modulus: BigUint) -> Self {
        assert!(modulus >= BigUint::from(2u32), "modulus must be >= 2");
        Generator {
            a: a % &modulus,
            b: b % &modulus,
            modulus,
        }
    }

    pub fn a(&self) -> &BigUint {
        &self.a
    }

    pub fn b(&self) -> &BigUint {
        &self.b
    }

    pub fn modulus(&self) -> &BigUint {
        &self.modulus
    }
}

/// The pair (s_k, s_{-k}) of a sequence at one exponent. Doubles as the
/// coefficient pair of the shifted cubic X^3 - s_k X^2 + s_{-k} X - 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeqPair {
    pub k: BigInt,
    pub s_k: BigUint,
    pub s_neg_k: BigUint,
}

/// The generator (b, a), whose sequence runs the original one backwards:
/// s_k(b, a) = s_{-k}(a, b).
pub fn reciprocal_pair(g: &Generator) -> Generator {
    Generator {
        a: g.b.clone(),
        b: g.a.clone(),
        modulus: g.modulus.clone(),
    }
}

/// Evaluate (s_k mod M, s_{-k} mod M).
pub fn seq_pair(g: &Generator, k: &BigInt) -> SeqPair {
    let mag = k.magnitude();
    let fwd = seq_forward(&g.a, &g.b, &g.modulus, mag);
    let bwd = seq_forward(&g.b, &g.a, &g.modulus, mag);
    let (s_k, s_neg_k) = match k.sign() {
        Sign::Minus => (bwd, fwd),
        _ => (fwd, bwd),
    };
    SeqPair {
        k: k.clone(),
        s_k,
        s_neg_k,
    }
}

/// s_j(a, b) mod m for j = |k| >= 0, by companion-matrix exponentiation.
fn seq_forward(a: &BigUint, b: &BigUint, m: &BigUint, j: &BigUint) -> BigUint {
    let a = a % m;
    let b = b % m;
    let neg_b = if b.is_zero() { BigUint::zero() } else { m - &b };
    // state (s_{k+1}, s_k, s_{k-1}); one application advances k by one
    let companion = Mat3([
        [a.clone(), neg_b, BigUint::one()],
        [BigUint::one(), BigUint::zero(), BigUint::zero()],
        [BigUint::zero(), BigUint::one(), BigUint::zero()],
    ]);
    let power = companion.pow(j, m);
    let seed = [a, BigUint::from(3u32) % m, b];
    power.apply_row(1, &seed, m)
}

/// 3x3 matrix over Z/m.
#[derive(Debug, Clone)]
pub(crate) struct Mat3(pub(crate) [[BigUint; 3]; 3]);

impl Mat3 {
    pub(crate) fn identity(m: &BigUint) -> Self {
        let one = BigUint::one() % m;
        let mut rows: [[BigUint; 3]; 3] = Default::default();
        for (i, row) in rows.iter_mut().enumerate() {
            row[i] = one.clone();
        }
        Mat3(rows)
    }

    pub(crate) fn mul(&self, other: &Mat3, m: &BigUint) -> Mat3 {
        let mut out: [[BigUint; 3]; 3] = Default::default();
        for (row, lhs) in out.iter_mut().zip(&self.0) {
            for (j, cell) in row.iter_mut().enumerate() {
                let mut acc = BigUint::zero();
                for (coeff, rhs_row) in lhs.iter().zip(&other.0) {
                    acc += coeff * &rhs_row[j];
                }
                *cell = acc % m;
            }
        }
        Mat3(out)
    }

    pub(crate) fn pow(&self, e: &BigUint, m: &BigUint) -> Mat3 {
        let mut result = Mat3::identity(m);
        let bits = e.bits();
        for i in (0..bits).rev() {
            result = result.mul(&result, m);
            if e.bit(i) {
                result = result.mul(self, m);
            }
        }
        result
    }

    fn apply_row(&self, row: usize, v: &[BigUint; 3], m: &BigUint) -> BigUint {
        let mut acc = BigUint::zero();
        for (coeff, val) in self.0[row].iter().zip(v) {
            acc += coeff * val;
        }
        acc % m
    }

    pub(crate) fn det(&self, m: &BigUint) -> BigUint {
        let g = &self.0;
        let pos = &g[0][0] * &g[1][1] * &g[2][2]
            + &g[0][1] * &g[1][2] * &g[2][0]
            + &g[0][2] * &g[1][0] * &g[2][1];
        let neg = &g[0][2] * &g[1][1] * &g[2][0]
            + &g[0][0] * &g[1][2] * &g[2][1]
            + &g[0][1] * &g[1][0] * &g[2][2];
        let neg = neg % m;
        ((pos + m - neg) % m + m) % m
    }
}

/// Determinant of the companion power at exponent k; always 1 mod M since
/// the characteristic cubic has constant term -1.
pub fn companion_power_det(g: &Generator, k: &BigUint) -> BigUint {
    let m = &g.modulus;
    let b = &g.b;
    let neg_b = if b.is_zero() { BigUint::zero() } else { m - b };
    let companion = Mat3([
        [g.a.clone(), neg_b, BigUint::one()],
        [BigUint::one(), BigUint::zero(), BigUint::zero()],
        [BigUint::zero(), BigUint::one(), BigUint::zero()],
    ]);
    companion.pow(k, m).det(m)
}

/// True iff X^3 - aX^2 + bX - 1 is irreducible over F_p. Checks that p is
/// prime first; use [`is_irreducible_cubic_unchecked`] to skip that.
pub fn is_irreducible_cubic(a: &BigUint, b: &BigUint, p: &BigUint) -> Result<bool, SequenceError> {
    if !p.bit(0) || !is_probable_prime(p, DEFAULT_MR_ROUNDS) {
        return Err(SequenceError::InvalidPrime(p.clone()));
    }
    Ok(is_irreducible_cubic_unchecked(a, b, p))
}

/// No-root criterion: a cubic over a field is reducible iff it has a linear
/// factor, and gcd(X^p - X, f) collects exactly the distinct linear factors.
pub fn is_irreducible_cubic_unchecked(a: &BigUint, b: &BigUint, p: &BigUint) -> bool {
    let f = CubicModPoly::new(a, b, p);
    // X^p mod f by square-and-multiply on the exponent bits
    let x = [BigUint::zero(), BigUint::one(), BigUint::zero()];
    let mut acc = [BigUint::one(), BigUint::zero(), BigUint::zero()];
    for i in (0..p.bits()).rev() {
        acc = f.mul(&acc, &acc);
        if p.bit(i) {
            acc = f.mul(&acc, &x);
        }
    }
    // g = X^p - X mod f
    let g = [
        acc[0].clone(),
        (&acc[1] + p - BigUint::one() % p) % p,
        acc[2].clone(),
    ];
    f.gcd_with_f_is_one(g)
}

/// Arithmetic in F_p[X] modulo the monic cubic X^3 - aX^2 + bX - 1.
struct CubicModPoly {
    a: BigUint,
    b: BigUint,
    p: BigUint,
}

impl CubicModPoly {
    fn new(a: &BigUint, b: &BigUint, p: &BigUint) -> Self {
        CubicModPoly {
            a: a % p,
            b: b % p,
            p: p.clone(),
        }
    }

    /// Product of two residues of degree < 3, reduced mod f.
    /// Uses X^3 = aX^2 - bX + 1 and X^4 = (a^2-b)X^2 + (1-ab)X + a.
    fn mul(&self, u: &[BigUint; 3], v: &[BigUint; 3]) -> [BigUint; 3] {
        let p = &self.p;
        // raw product coefficients c0..c4
        let c0 = (&u[0] * &v[0]) % p;
        let c1 = (&u[0] * &v[1] + &u[1] * &v[0]) % p;
        let c2 = (&u[0] * &v[2] + &u[1] * &v[1] + &u[2] * &v[0]) % p;
        let c3 = (&u[1] * &v[2] + &u[2] * &v[1]) % p;
        let c4 = (&u[2] * &v[2]) % p;
        let a = &self.a;
        let b = &self.b;
        // reduce degree 4 then degree 3
        // X^4 = a*X^3 - b*X^2 + X = (a^2 - b)X^2 + (1 - ab)X + a
        let a2 = (a * a) % p;
        let ab = (a * b) % p;
        let d2 = (&c2 + &c3 * a + &c4 * (&a2 + p - b)) % p;
        let d1 = (&c1 + &c4 + p * p + p - (&c3 * b) % p - (&c4 * &ab) % p) % p;
        let d0 = (&c0 + &c3 + &c4 * a) % p;
        [d0, d1, d2]
    }

    /// True iff gcd(g, f) = 1 in F_p[X], where deg g < 3.
    fn gcd_with_f_is_one(&self, g: [BigUint; 3]) -> bool {
        let p = &self.p;
        // f as a degree-3 polynomial: coefficients low-to-high
        let f: Vec<BigUint> = vec![
            (p - BigUint::one() % p) % p,
            self.b.clone(),
            (p - &self.a % p) % p,
            BigUint::one() % p,
        ];
        let mut r0 = trim(f, p);
        let mut r1 = trim(g.to_vec(), p);
        while !r1.is_empty() {
            let rem = poly_rem(&r0, &r1, p);
            r0 = r1;
            r1 = rem;
        }
        r0.len() == 1
    }
}

fn trim(mut v: Vec<BigUint>, _p: &BigUint) -> Vec<BigUint> {
    while v.last().is_some_and(|c| c.is_zero()) {
        v.pop();
    }
    v
}

/// Remainder of u divided by nonzero v in F_p[X].
fn poly_rem(u: &[BigUint], v: &[BigUint], p: &BigUint) -> Vec<BigUint> {
    let mut r: Vec<BigUint> = u.to_vec();
    let dv = v.len() - 1;
    let lead_inv = crate::modmath::mod_inverse(v.last().unwrap(), p)
        .expect("leading coefficient invertible in a field");
    while r.len() > dv {
        let dr = r.len() - 1;
        let factor = (r.last().unwrap() * &lead_inv) % p;
        if !factor.is_zero() {
            for (i, coeff) in v.iter().enumerate() {
                let sub = (coeff * &factor) % p;
                let idx = dr - dv + i;
                r[idx] = (&r[idx] + p - sub) % p;
            }
        }
        r.pop();
        while r.last().is_some_and(|c| c.is_zero()) {
            r.pop();
        }
        if r.len() <= dv {
            break;
        }
    }
    r
}
