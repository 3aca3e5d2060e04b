//! Exact arithmetic in real quadratic orders: fundamental units through
//! continued fractions, unit power indices, congruence and sign tests on
//! units, congruence unit-group generators, and the classification of `d`
//! whose distinguished unit has a square cube.
//!
//! Elements are written `(x + y*sqrt(delta0))/2` over the fundamental
//! discriminant `delta0`, so the maximal order is exactly the set of
//! coordinate pairs with `x = y*delta0 mod 2` and the order of conductor
//! `f'` is cut out by `f' | y`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::qform::discriminant_of;
use crate::{arith, Error, Result};

/// The element `(x + y*sqrt(delta0))/2` of the maximal order of the real
/// quadratic field of fundamental discriminant `delta0`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QuadInt {
    /// The fundamental discriminant fixing the field.
    pub delta0: BigInt,
    /// Twice the rational part; equals the trace.
    pub x: BigInt,
    /// Twice the `sqrt(delta0)` coordinate.
    pub y: BigInt,
}

impl QuadInt {
    /// Builds `(x + y*sqrt(delta0))/2`, rejecting coordinates that do not
    /// satisfy the integrality parity `x = y*delta0 mod 2`.
    pub fn new(delta0: BigInt, x: BigInt, y: BigInt) -> Result<Self> {
        if (&x - &y * &delta0).is_odd() {
            return Err(Error::ParityViolation { delta0, x, y });
        }
        Ok(QuadInt { delta0, x, y })
    }

    /// The multiplicative identity of the field of discriminant `delta0`.
    pub fn one(delta0: &BigInt) -> Self {
        QuadInt {
            delta0: delta0.clone(),
            x: BigInt::from(2),
            y: BigInt::zero(),
        }
    }

    /// The norm `(x^2 - y^2 delta0)/4`, always an integer.
    pub fn norm(&self) -> BigInt {
        let numer = &self.x * &self.x - &self.y * &self.y * &self.delta0;
        let (q, r) = numer.div_rem(&BigInt::from(4));
        debug_assert!(r.is_zero());
        q
    }

    /// The trace, which is `x` itself.
    pub fn trace(&self) -> BigInt {
        self.x.clone()
    }

    /// The Galois conjugate `(x - y*sqrt(delta0))/2`.
    pub fn conjugate(&self) -> Self {
        QuadInt {
            delta0: self.delta0.clone(),
            x: self.x.clone(),
            y: -&self.y,
        }
    }

    /// `self` raised to the `n`-th power (`n = 0` gives 1).
    pub fn pow(&self, n: u64) -> Self {
        let mut acc = QuadInt::one(&self.delta0);
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    /// Signs at the two real embeddings, the first sending `sqrt(delta0)`
    /// to the positive root: `(sign(x + y*sqrt), sign(x - y*sqrt))`.
    pub fn sign_at_embeddings(&self) -> (i32, i32) {
        (
            sign_of_combination(&self.x, &self.y, &self.delta0),
            sign_of_combination(&self.x, &(-&self.y), &self.delta0),
        )
    }

    /// Whether both embeddings are positive.
    pub fn is_totally_positive(&self) -> bool {
        self.sign_at_embeddings() == (1, 1)
    }

    /// Whether the first embedding exceeds 1, decided exactly.
    pub fn exceeds_one(&self) -> bool {
        sign_of_combination(&(&self.x - 2u32), &self.y, &self.delta0) > 0
    }

    /// Whether the element lies in the order of `spec`, i.e. `f' | y`.
    pub fn in_order(&self, spec: &OrderSpec) -> bool {
        debug_assert_eq!(self.delta0, spec.delta0);
        (&self.y % &spec.fprime).is_zero()
    }

    /// Floating-point logarithm of the first embedding, scaled to survive
    /// coordinates far beyond `f64` range. Diagnostic use only; every
    /// exact result in this crate avoids it.
    pub fn approx_log(&self) -> f64 {
        let shift = self.x.bits().max(self.y.bits()).saturating_sub(512);
        let x = (&self.x >> shift).to_f64().unwrap();
        let y = (&self.y >> shift).to_f64().unwrap();
        let root = self.delta0.to_f64().unwrap().sqrt();
        ((x + y * root) / 2.0).ln() + shift as f64 * std::f64::consts::LN_2
    }
}

impl std::fmt::Display for QuadInt {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({} + {}*sqrt({}))/2", self.x, self.y, self.delta0)
    }
}

impl std::ops::Mul for &QuadInt {
    type Output = QuadInt;

    fn mul(self, other: &QuadInt) -> QuadInt {
        assert_eq!(self.delta0, other.delta0, "mixed-field multiplication");
        let two = BigInt::from(2);
        let (x, rx) = (&self.x * &other.x + &self.y * &other.y * &self.delta0).div_rem(&two);
        let (y, ry) = (&self.x * &other.y + &self.y * &other.x).div_rem(&two);
        debug_assert!(rx.is_zero() && ry.is_zero());
        QuadInt {
            delta0: self.delta0.clone(),
            x,
            y,
        }
    }
}

impl std::ops::Neg for &QuadInt {
    type Output = QuadInt;

    fn neg(self) -> QuadInt {
        QuadInt {
            delta0: self.delta0.clone(),
            x: -&self.x,
            y: -&self.y,
        }
    }
}

/// Sign of `(x + y*sqrt(delta0))/2`, decided by exact comparison of
/// `x^2` against `y^2 delta0` when the terms disagree in sign.
fn sign_of_combination(x: &BigInt, y: &BigInt, delta0: &BigInt) -> i32 {
    let sx = x.signum().to_i32().unwrap();
    let sy = y.signum().to_i32().unwrap();
    if sy == 0 {
        return sx;
    }
    if sx == 0 {
        return sy;
    }
    if sx == sy {
        return sx;
    }
    let xx = x * x;
    let yy = y * y * delta0;
    match xx.cmp(&yy) {
        std::cmp::Ordering::Greater => sx,
        std::cmp::Ordering::Less => sy,
        std::cmp::Ordering::Equal => unreachable!("delta0 is never a perfect square"),
    }
}

/// A real quadratic order: the ring of index `f'` in the maximal order of
/// fundamental discriminant `delta0`, of discriminant `(f')^2 delta0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrderSpec {
    /// The fundamental discriminant of the ambient field.
    pub delta0: BigInt,
    /// The conductor.
    pub fprime: BigInt,
}

impl OrderSpec {
    /// Builds an order, validating that `delta0` is fundamental and the
    /// conductor positive.
    pub fn new(delta0: BigInt, fprime: BigInt) -> Result<Self> {
        if !arith::is_fundamental_discriminant(&delta0) {
            return Err(Error::NotFundamental(delta0));
        }
        if !fprime.is_positive() {
            return Err(Error::NonPositive {
                op: "OrderSpec conductor",
                value: fprime,
            });
        }
        Ok(OrderSpec { delta0, fprime })
    }

    /// The discriminant `(f')^2 delta0`.
    pub fn discriminant(&self) -> BigInt {
        &self.fprime * &self.fprime * &self.delta0
    }
}

/// A subset of the two real places.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct PlaceSet {
    /// The embedding sending `sqrt(delta0)` to the positive root.
    pub inf1: bool,
    /// The other embedding.
    pub inf2: bool,
}

impl PlaceSet {
    /// All four subsets of the two places.
    pub fn all() -> [PlaceSet; 4] {
        [
            PlaceSet {
                inf1: false,
                inf2: false,
            },
            PlaceSet {
                inf1: true,
                inf2: false,
            },
            PlaceSet {
                inf1: false,
                inf2: true,
            },
            PlaceSet {
                inf1: true,
                inf2: true,
            },
        ]
    }

    /// How many places the set contains.
    pub fn len(&self) -> usize {
        usize::from(self.inf1) + usize::from(self.inf2)
    }

    /// Whether the set is empty.
    pub fn is_empty(&self) -> bool {
        !self.inf1 && !self.inf2
    }
}

/// Minimal positive solution of `x^2 - n y^2 = +-1` for nonsquare `n > 1`,
/// from the continued fraction of `sqrt(n)`; returns `(x, y, norm)` where
/// `norm` is `(-1)` to the period length.
fn pell_minimal(n: &BigInt) -> (BigInt, BigInt, i32) {
    let a0 = n.sqrt();
    let mut p_prev = BigInt::one();
    let mut p_cur = a0.clone();
    let mut q_prev = BigInt::zero();
    let mut q_cur = BigInt::one();
    let mut big_p = BigInt::zero();
    let mut big_q = BigInt::one();
    let mut a = a0.clone();
    let mut i: u64 = 0;
    loop {
        i += 1;
        assert!(i < 100_000_000, "continued fraction of sqrt({n}) ran away");
        big_p = &a * &big_q - big_p;
        let (next_q, rem) = (n - &big_p * &big_p).div_rem(&big_q);
        debug_assert!(rem.is_zero());
        big_q = next_q;
        if big_q.is_one() {
            let norm = if i % 2 == 1 { -1 } else { 1 };
            debug_assert_eq!(
                &p_cur * &p_cur - n * &q_cur * &q_cur,
                BigInt::from(norm)
            );
            return (p_cur, q_cur, norm);
        }
        a = (&big_p + &a0) / &big_q;
        let p_next = &a * &p_cur + &p_prev;
        let q_next = &a * &q_cur + &q_prev;
        p_prev = std::mem::replace(&mut p_cur, p_next);
        q_prev = std::mem::replace(&mut q_cur, q_next);
    }
}

/// The fundamental unit of the maximal order of fundamental discriminant
/// `delta0`: the smallest unit greater than 1, with its norm.
///
/// For `delta0 = 0 mod 4` it is the minimal Pell solution for
/// `delta0 / 4`. For `delta0 = 1 mod 8` no unit has odd coordinates, so
/// the Pell solution for `delta0` itself is fundamental. For
/// `delta0 = 5 mod 8` the Pell solution `u` may be the cube of a unit with
/// odd coordinates; the cube root, when it exists, is recovered exactly
/// from the integer root of its `y`-coordinate equation.
pub fn fundamental_unit(delta0: &BigInt) -> Result<(QuadInt, i32)> {
    if !arith::is_fundamental_discriminant(delta0) {
        return Err(Error::NotFundamental(delta0.clone()));
    }
    if arith::residue(delta0, 4) == 0 {
        let (x, y, norm) = pell_minimal(&(delta0 / 4u32));
        return Ok((
            QuadInt {
                delta0: delta0.clone(),
                x: 2 * x,
                y,
            },
            norm,
        ));
    }
    let (x, y, norm) = pell_minimal(delta0);
    if arith::residue(delta0, 8) == 5 {
        if let Some(root) = odd_cube_root(delta0, &x, &y, norm) {
            return Ok((root, norm));
        }
    }
    Ok((
        QuadInt {
            delta0: delta0.clone(),
            x: 2 * x,
            y: 2 * y,
        },
        norm,
    ))
}

/// Searches for a unit `(x + y*sqrt(delta0))/2` with odd coordinates whose
/// cube is the Pell unit `bx + by*sqrt(delta0)`. Its `y`-coordinate must
/// satisfy `delta0*y^3 + 3*norm*y = 2*by`, so only the integers adjacent
/// to the real cube root of `2*by/delta0` can qualify.
fn odd_cube_root(delta0: &BigInt, bx: &BigInt, by: &BigInt, norm: i32) -> Option<QuadInt> {
    let target: BigInt = 2 * by;
    let center = (&target / delta0).cbrt();
    for offset in -2i64..=2 {
        let y = &center + BigInt::from(offset);
        if !y.is_positive() || y.is_even() {
            continue;
        }
        if &y * (delta0 * &y * &y + 3 * norm) != target {
            continue;
        }
        let x2 = delta0 * &y * &y + 4 * norm;
        if !x2.is_positive() || !arith::is_perfect_square(&x2) {
            continue;
        }
        let x = x2.sqrt();
        if x.is_even() {
            continue;
        }
        let candidate = QuadInt {
            delta0: delta0.clone(),
            x,
            y,
        };
        debug_assert_eq!(
            candidate.pow(3),
            QuadInt {
                delta0: delta0.clone(),
                x: 2 * bx,
                y: 2 * by,
            }
        );
        return Some(candidate);
    }
    None
}

/// The unit `(d - 1 + sqrt((d+1)(d-3)))/2` attached to `d`, with
/// coordinates `(d-1, f)` over the fundamental discriminant.
pub fn epsilon_d(d: &BigInt) -> Result<QuadInt> {
    let delta = discriminant_of(d)?;
    let (delta0, f) = arith::fundamental_discriminant_decompose(&delta)?;
    Ok(QuadInt {
        delta0,
        x: d - 1u32,
        y: f,
    })
}

/// The exponent `k` with `eps_d = eps_k^k`, found by iterated exact
/// multiplication; fails if no `k <= 64` matches.
pub fn unit_power_index(eps_k: &QuadInt, eps_d: &QuadInt) -> Result<u64> {
    const CAP: u64 = 64;
    let mut acc = eps_k.clone();
    for k in 1..=CAP {
        if acc == *eps_d {
            return Ok(k);
        }
        acc = &acc * eps_k;
    }
    Err(Error::UnitPowerNotFound {
        base: eps_k.to_string(),
        target: eps_d.to_string(),
        cap: CAP,
    })
}

/// Upper bound for the index of the order's unit group in the maximal
/// order's: the order of any unit in `(O_K/f')^x / (Z/f')^x` divides
/// the product of `p^(e-1) (p - chi(p))` over `p^e || f'`.
fn unit_index_cap(spec: &OrderSpec) -> Result<u64> {
    let mut cap = BigInt::one();
    for (p, e) in arith::factor(&spec.fprime)?.factors {
        let chi = arith::kronecker(&spec.delta0, &p);
        cap *= num_traits::Pow::pow(&p, e - 1) * (&p - chi);
    }
    Ok(cap.to_u64().expect("conductor far beyond supported range"))
}

/// The fundamental unit of the order `spec`: the smallest power of the
/// field's fundamental unit lying in the order. Returns the unit, its
/// norm, and the power index.
pub fn fundamental_unit_of_order(spec: &OrderSpec) -> Result<(QuadInt, i32, u64)> {
    let (eps_k, norm) = fundamental_unit(&spec.delta0)?;
    let cap = unit_index_cap(spec)?;
    let mut pow = eps_k.clone();
    let mut pow_norm = norm;
    for m in 1..=cap {
        if pow.in_order(spec) {
            return Ok((pow, pow_norm, m));
        }
        pow = &pow * &eps_k;
        pow_norm *= norm;
    }
    unreachable!("unit index exceeded its theoretical cap {cap} for {spec:?}");
}

/// Whether `alpha - 1` lies in the module `d * O'` for the order
/// `O'` of `spec`, decided by exact solution against the basis
/// `{d, d f' (delta0 + sqrt(delta0))/2}`: with
/// `alpha - 1 = (X + Y*sqrt(delta0))/2` it requires `d f' | Y` and
/// `2d | X - Y*delta0`.
pub fn congruent_to_one(alpha: &QuadInt, d: &BigInt, spec: &OrderSpec) -> bool {
    debug_assert_eq!(alpha.delta0, spec.delta0);
    let big_x = &alpha.x - 2u32;
    let big_y = &alpha.y;
    if !(big_y % (d * &spec.fprime)).is_zero() {
        return false;
    }
    let twisted: BigInt = big_x - big_y * &spec.delta0;
    let double_d: BigInt = 2 * d;
    (twisted % double_d).is_zero()
}

/// Generator of the group of units of the order `spec` that are congruent
/// to 1 mod `multiplier * d * O'` and positive at the places in `sigma`:
/// the smallest such unit greater than 1, found by scanning signed powers
/// of the order's fundamental unit.
///
/// The scan also asserts that every qualifying element it sees is a power
/// of the returned generator, so a non-cyclic (or sign-flipped) unit group
/// fails loudly instead of being misreported.
pub fn unit_group_congruent_one(
    d: &BigInt,
    spec: &OrderSpec,
    sigma: PlaceSet,
    modulus_multiplier: u32,
) -> Result<QuadInt> {
    if !(modulus_multiplier == 1 || modulus_multiplier == 2) {
        return Err(Error::InvalidModulusMultiplier(modulus_multiplier));
    }
    let delta = discriminant_of(d)?;
    let (delta0, f) = arith::fundamental_discriminant_decompose(&delta)?;
    if delta0 != spec.delta0 || !(&f % &spec.fprime).is_zero() {
        return Err(Error::InvalidConductorDivisor {
            fprime: spec.fprime.clone(),
            f,
        });
    }
    let eps_d = epsilon_d(d)?;
    let (eps_order, _, _) = fundamental_unit_of_order(spec)?;
    let j = unit_power_index(&eps_order, &eps_d)?;
    let bound = 6 * j;
    let modulus = modulus_multiplier * d;
    let qualifies = |alpha: &QuadInt| {
        if !congruent_to_one(alpha, &modulus, spec) {
            return false;
        }
        let (s1, s2) = alpha.sign_at_embeddings();
        (!sigma.inf1 || s1 > 0) && (!sigma.inf2 || s2 > 0)
    };
    let mut pow = QuadInt::one(&spec.delta0);
    let mut generator: Option<(u64, QuadInt)> = None;
    for n in 1..=bound {
        pow = &pow * &eps_order;
        for candidate in [pow.clone(), -&pow] {
            if !qualifies(&candidate) {
                continue;
            }
            match &generator {
                None => {
                    assert!(
                        candidate.exceeds_one(),
                        "first qualifying unit {candidate} is not greater than 1 (d = {d})"
                    );
                    generator = Some((n, candidate));
                }
                Some((first, _)) => {
                    assert!(
                        n % first == 0 && candidate.x.is_positive(),
                        "qualifying unit {candidate} at power {n} is not a power of the \
                         generator at {first} (d = {d})"
                    );
                }
            }
        }
    }
    match generator {
        Some((_, g)) => Ok(g),
        None => Err(Error::GeneratorNotFound {
            d: d.clone(),
            modulus,
            fprime: spec.fprime.clone(),
        }),
    }
}

/// Which square family `d` belongs to in the cube-square classification.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SquareCase {
    /// `d = a^2 - 1` with `a >= 3`.
    AMinusOne,
    /// `d = a^2 + 3` with `a >= 1`.
    APlusThree,
}

/// Witness that the cube of the unit attached to `d` is a square.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EpsCubeSquare {
    /// The integer with `d = a^2 - 1` or `d = a^2 + 3`.
    pub a: BigInt,
    /// Which of the two families applies.
    pub case: SquareCase,
    /// The seed unit `eta = (a + sqrt(a^2 -+ 4))/2`.
    pub eta: QuadInt,
    /// The square root `eta * eps_d` of `eps_d^3`.
    pub eta_tilde: QuadInt,
}

/// Detects whether `d` is `a^2 - 1` or `a^2 + 3` and, if so, returns the
/// unit whose square is `eps_d^3`, verified exactly. Every other `d` has
/// no such unit and yields `None`.
pub fn eps_cube_square_classification(d: &BigInt) -> Result<Option<EpsCubeSquare>> {
    let eps = epsilon_d(d)?;
    let delta0 = eps.delta0.clone();
    let plus_one = d + 1u32;
    let minus_three = d - 3u32;
    let (a, case, eta_norm) = if arith::is_perfect_square(&plus_one) {
        (plus_one.sqrt(), SquareCase::AMinusOne, 1)
    } else if arith::is_perfect_square(&minus_three) {
        (minus_three.sqrt(), SquareCase::APlusThree, -1)
    } else {
        return Ok(None);
    };
    let under_root = &a * &a - 4 * eta_norm;
    let (d0, g) = arith::fundamental_discriminant_decompose(&under_root)?;
    debug_assert_eq!(d0, delta0);
    let eta = QuadInt {
        delta0: delta0.clone(),
        x: a.clone(),
        y: g,
    };
    debug_assert_eq!(eta.norm(), BigInt::from(eta_norm));
    let eta_tilde = &eta * &eps;
    assert_eq!(
        &eta_tilde * &eta_tilde,
        eps.pow(3),
        "cube-square witness failed for d = {d}"
    );
    Ok(Some(EpsCubeSquare {
        a,
        case,
        eta,
        eta_tilde,
    }))
}
