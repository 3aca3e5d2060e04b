//! Integer utilities: factorization, divisors, Euler's totient, the
//! Kronecker symbol, and squarefree / fundamental-discriminant
//! decompositions.
//!
//! Factorization is deterministic trial division; every input arising from
//! a supported `d` is far below the sizes where that becomes a bottleneck.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::{Error, Result};

/// A positive integer together with its complete prime factorization.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactoredInteger {
    /// The factored integer.
    pub n: BigInt,
    /// `(prime, exponent)` pairs with strictly increasing primes.
    pub factors: Vec<(BigInt, u32)>,
}

impl FactoredInteger {
    /// Number of positive divisors of `n`.
    pub fn sigma0(&self) -> BigInt {
        self.factors
            .iter()
            .map(|(_, e)| BigInt::from(e + 1))
            .product()
    }
}

/// Factors a positive integer by trial division.
pub fn factor(n: &BigInt) -> Result<FactoredInteger> {
    if !n.is_positive() {
        return Err(Error::NonPositive {
            op: "factor",
            value: n.clone(),
        });
    }
    let factors = match n.to_u128() {
        Some(m) => factor_u128(m)
            .into_iter()
            .map(|(p, e)| (BigInt::from(p), e))
            .collect(),
        None => factor_bigint(n),
    };
    Ok(FactoredInteger {
        n: n.clone(),
        factors,
    })
}

/// Trial division over machine words, stepping through 2, 3, then 6k±1.
pub(crate) fn factor_u128(mut m: u128) -> Vec<(u128, u32)> {
    let mut out = Vec::new();
    for p in [2u128, 3] {
        if m % p == 0 {
            let mut e = 0u32;
            while m % p == 0 {
                m /= p;
                e += 1;
            }
            out.push((p, e));
        }
    }
    let mut p = 5u128;
    let mut step = 2u128;
    while p * p <= m {
        if m % p == 0 {
            let mut e = 0u32;
            while m % p == 0 {
                m /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += step;
        step = 6 - step;
    }
    if m > 1 {
        out.push((m, 1));
    }
    out
}

fn factor_bigint(n: &BigInt) -> Vec<(BigInt, u32)> {
    let mut m = n.clone();
    let mut out = Vec::new();
    let mut p = BigInt::from(2);
    while &p * &p <= m {
        if (&m % &p).is_zero() {
            let mut e = 0u32;
            while (&m % &p).is_zero() {
                m /= &p;
                e += 1;
            }
            out.push((p.clone(), e));
        }
        p += 1u32;
    }
    if m > BigInt::one() {
        out.push((m, 1));
    }
    out
}

/// All positive divisors of `n` in ascending order.
pub fn divisors(n: &BigInt) -> Result<Vec<BigInt>> {
    let fac = factor(n)?;
    let mut out = vec![BigInt::one()];
    for (p, e) in &fac.factors {
        let mut next = Vec::with_capacity(out.len() * (*e as usize + 1));
        let mut pk = BigInt::one();
        for _ in 0..=*e {
            for d in &out {
                next.push(d * &pk);
            }
            pk *= p;
        }
        out = next;
    }
    out.sort();
    Ok(out)
}

/// Euler's totient of `n`.
pub fn euler_phi(n: &BigInt) -> Result<BigInt> {
    let fac = factor(n)?;
    let mut phi = BigInt::one();
    for (p, e) in &fac.factors {
        phi *= (p - 1u32) * p.pow(*e - 1);
    }
    Ok(phi)
}

/// Kronecker symbol `(a/n)`: the Jacobi symbol extended to all integer
/// pairs, completely multiplicative in both arguments, with the value at 2
/// determined by `a mod 8` and the value at -1 by the sign of `a`.
pub fn kronecker(a: &BigInt, n: &BigInt) -> i32 {
    if n.is_zero() {
        return if a.abs().is_one() { 1 } else { 0 };
    }
    if a.is_even() && n.is_even() {
        return 0;
    }
    let mut acc = 1i32;
    let mut n = n.clone();
    if n.is_negative() {
        n = -n;
        if a.is_negative() {
            acc = -acc;
        }
    }
    let twos = n.trailing_zeros().unwrap_or(0);
    if twos > 0 {
        n >>= twos;
        if twos % 2 == 1 {
            acc *= match residue(a, 8) {
                1 | 7 => 1,
                _ => -1,
            };
        }
    }
    let mut a = a.mod_floor(&n);
    while !a.is_zero() {
        let v = a.trailing_zeros().unwrap();
        if v > 0 {
            a >>= v;
            if v % 2 == 1 && matches!(residue(&n, 8), 3 | 5) {
                acc = -acc;
            }
        }
        if residue(&a, 4) == 3 && residue(&n, 4) == 3 {
            acc = -acc;
        }
        std::mem::swap(&mut a, &mut n);
        a = a.mod_floor(&n);
    }
    if n.is_one() {
        acc
    } else {
        0
    }
}

/// Writes `n = s * g^2` with `s` squarefree; returns `(s, g)`.
pub fn squarefree_decompose(n: &BigInt) -> Result<(BigInt, BigInt)> {
    let fac = factor(n)?;
    let mut s = BigInt::one();
    let mut g = BigInt::one();
    for (p, e) in &fac.factors {
        if e % 2 == 1 {
            s *= p;
        }
        if *e >= 2 {
            g *= p.pow(*e / 2);
        }
    }
    Ok((s, g))
}

/// Writes `delta = f^2 * delta0` with `delta0` a fundamental discriminant;
/// returns `(delta0, f)`.
///
/// With `(s, g)` the squarefree decomposition of `delta`, the result is
/// `(s, g)` when `s = 1 mod 4` and `(4s, g/2)` otherwise.
pub fn fundamental_discriminant_decompose(delta: &BigInt) -> Result<(BigInt, BigInt)> {
    check_discriminant(delta)?;
    let (s, g) = squarefree_decompose(delta)?;
    if residue(&s, 4) == 1 {
        Ok((s, g))
    } else {
        debug_assert!(g.is_even());
        Ok((4 * s, g / 2))
    }
}

/// Checks that `delta` is a positive nonsquare congruent to 0 or 1 mod 4,
/// the discriminant of a genuine real quadratic order.
pub fn check_discriminant(delta: &BigInt) -> Result<()> {
    if !delta.is_positive() || residue(delta, 4) > 1 || is_perfect_square(delta) {
        return Err(Error::InvalidDiscriminant(delta.clone()));
    }
    Ok(())
}

/// Whether `delta` is a fundamental discriminant: a valid positive
/// nonsquare discriminant equal to its own fundamental part.
pub fn is_fundamental_discriminant(delta: &BigInt) -> bool {
    matches!(fundamental_discriminant_decompose(delta), Ok((_, f)) if f.is_one())
}

/// Whether `n` is a perfect square; negative integers never are.
pub fn is_perfect_square(n: &BigInt) -> bool {
    if n.is_negative() {
        return false;
    }
    let r = n.sqrt();
    &r * &r == *n
}

/// Deterministic primality test: Miller-Rabin over the twelve prime bases
/// up to 37, which decides every integer below 3.3e24.
pub fn is_prime(n: &BigInt) -> bool {
    const BASES: [u32; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    let two = BigInt::from(2);
    if n < &two {
        return false;
    }
    for b in BASES {
        let b = BigInt::from(b);
        if *n == b {
            return true;
        }
        if (n % &b).is_zero() {
            return false;
        }
    }
    let n_minus_1 = n - 1u32;
    let s = n_minus_1.trailing_zeros().unwrap();
    let d = &n_minus_1 >> s;
    'witness: for b in BASES {
        let mut x = BigInt::from(b).modpow(&d, n);
        if x.is_one() || x == n_minus_1 {
            continue;
        }
        for _ in 1..s {
            x = x.modpow(&two, n);
            if x == n_minus_1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Least nonnegative residue of `x` modulo a small modulus.
pub(crate) fn residue(x: &BigInt, m: u32) -> u32 {
    x.mod_floor(&BigInt::from(m)).to_u32().unwrap()
}
