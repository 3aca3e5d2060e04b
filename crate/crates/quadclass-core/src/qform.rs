//! Indefinite binary quadratic forms: reduction, cycle enumeration,
//! `SL2(Z)`-classes, twisted `GL2(Z)`-classes, class numbers, and class
//! monoid sizes of real quadratic orders.
//!
//! A form `(a, b, c)` stands for `ax^2 + bxy + cy^2`. All reduction theory
//! here is for positive nonsquare discriminants, where the reduced forms of
//! a discriminant split into cycles under the `rho` step and the cycles are
//! exactly the `SL2(Z)`-classes.

use std::collections::{BTreeSet, HashMap};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::arith::check_discriminant;
use crate::{arith, Error, Result};

/// The binary quadratic form `ax^2 + bxy + cy^2`.
///
/// The derived ordering is lexicographic in `(a, b, c)`, which is the order
/// used everywhere a canonical representative is chosen.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Form {
    pub a: BigInt,
    pub b: BigInt,
    pub c: BigInt,
}

impl Form {
    /// Builds a form from anything convertible to integers.
    pub fn new<T: Into<BigInt>>(a: T, b: T, c: T) -> Self {
        Form {
            a: a.into(),
            b: b.into(),
            c: c.into(),
        }
    }

    /// The discriminant `b^2 - 4ac`.
    pub fn discriminant(&self) -> BigInt {
        &self.b * &self.b - 4 * (&self.a * &self.c)
    }

    /// The content `gcd(|a|, |b|, |c|)`.
    pub fn content(&self) -> BigInt {
        self.a.gcd(&self.b).gcd(&self.c)
    }

    /// Whether the content is 1.
    pub fn is_primitive(&self) -> bool {
        self.content().is_one()
    }

    /// Multiplies all three coefficients by `g`.
    pub fn scale(&self, g: &BigInt) -> Form {
        Form {
            a: &self.a * g,
            b: &self.b * g,
            c: &self.c * g,
        }
    }
}

impl std::fmt::Display for Form {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}, {}, {})", self.a, self.b, self.c)
    }
}

/// Which equivalence relation a [`FormClassSet`] partitions by.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClassKind {
    /// `SL2(Z)`-equivalence: reduction cycles.
    Sl2,
    /// Twisted `GL2(Z)`-equivalence: cycles merged by the involution
    /// `(a, b, c) -> (-a, b, -c)`.
    TwistedGl2,
}

/// One representative per class of forms of a fixed discriminant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FormClassSet {
    /// The common discriminant.
    pub delta: BigInt,
    /// One form per class, sorted lexicographically.
    pub reps: Vec<Form>,
    /// The equivalence relation the classes are taken under.
    pub kind: ClassKind,
    /// Whether imprimitive forms were excluded.
    pub primitive_only: bool,
}

/// The discriminant `(d+1)(d-3)` attached to `d`, rejecting `d <= 3` where
/// it fails to be a positive nonsquare.
pub fn discriminant_of(d: &BigInt) -> Result<BigInt> {
    let delta = (d + 1u32) * (d - 3u32);
    if *d < BigInt::from(4) {
        return Err(Error::UnsupportedD {
            d: d.clone(),
            delta,
        });
    }
    Ok(delta)
}

/// Whether `q` is reduced: `0 < b < sqrt(delta)` and
/// `sqrt(delta) - b < 2|a| < sqrt(delta) + b`, decided in exact arithmetic.
pub fn is_reduced(q: &Form, delta: &BigInt) -> Result<bool> {
    check_discriminant(delta)?;
    debug_assert_eq!(q.discriminant(), *delta);
    Ok(is_reduced_inner(q, delta))
}

fn is_reduced_inner(q: &Form, delta: &BigInt) -> bool {
    let b = &q.b;
    if !b.is_positive() || &(b * b) >= delta {
        return false;
    }
    let two_abs_a = 2 * q.a.abs();
    let plus = &two_abs_a + b;
    if &(&plus * &plus) <= delta {
        return false;
    }
    if &two_abs_a > b {
        let minus = &two_abs_a - b;
        if &(&minus * &minus) >= delta {
            return false;
        }
    }
    true
}

/// One step along the reduction cycle: `(a, b, c)` goes to
/// `(c, b', (b'^2 - delta)/(4c))` where `b' = -b mod 2|c|` is picked in the
/// window `sqrt(delta) - 2|c| < b' < sqrt(delta)` when `c^2 < delta` and in
/// `-|c| < b' <= |c|` otherwise.
pub fn rho_step(q: &Form) -> Result<Form> {
    let delta = q.discriminant();
    check_discriminant(&delta)?;
    let sqrt = delta.sqrt();
    Ok(rho_step_with(q, &delta, &sqrt))
}

fn rho_step_with(q: &Form, delta: &BigInt, sqrt: &BigInt) -> Form {
    let two_abs_c = 2 * q.c.abs();
    let bprime = if &(&q.c * &q.c) < delta {
        sqrt - (sqrt + &q.b).mod_floor(&two_abs_c)
    } else {
        let mut r = (-&q.b).mod_floor(&two_abs_c);
        if r > q.c.abs() {
            r -= &two_abs_c;
        }
        r
    };
    let numer = &bprime * &bprime - delta;
    let denom = 4 * q.c.clone();
    let (cprime, rem) = numer.div_rem(&denom);
    debug_assert!(rem.is_zero());
    Form {
        a: q.c.clone(),
        b: bprime,
        c: cprime,
    }
}

/// Iterates [`rho_step`] until the form is reduced and returns that form.
pub fn reduce(q: &Form) -> Result<Form> {
    let delta = q.discriminant();
    check_discriminant(&delta)?;
    let sqrt = delta.sqrt();
    let bound = 2 * q.a.bits().max(q.c.bits()) + 12;
    let mut cur = q.clone();
    for _ in 0..bound {
        if is_reduced_inner(&cur, &delta) {
            return Ok(cur);
        }
        cur = rho_step_with(&cur, &delta, &sqrt);
    }
    panic!("form {q} of discriminant {delta} did not reduce within {bound} steps");
}

/// The involution `(a, b, c) -> (-a, b, -c)`, the twisted action of
/// `diag(1, -1)`. It preserves reducedness and sends cycles to cycles.
pub fn involution(q: &Form) -> Form {
    Form {
        a: -&q.a,
        b: q.b.clone(),
        c: -&q.c,
    }
}

/// All reduced forms of discriminant `delta`, sorted lexicographically.
/// With `primitive_only` set, forms of content greater than 1 are dropped.
pub fn enumerate_reduced(delta: &BigInt, primitive_only: bool) -> Result<Vec<Form>> {
    check_discriminant(delta)?;
    let sqrt = delta.sqrt();
    let mut out = Vec::new();
    let mut b = BigInt::from(if delta.is_even() { 2 } else { 1 });
    while b <= sqrt {
        let m = (delta - &b * &b) / 4u32;
        if m.is_positive() {
            for u in arith::divisors(&m)? {
                let w = &m / &u;
                for (a, c) in [(u.clone(), -&w), (-&u, w.clone())] {
                    let q = Form {
                        a,
                        b: b.clone(),
                        c,
                    };
                    if is_reduced_inner(&q, delta) && (!primitive_only || q.is_primitive()) {
                        out.push(q);
                    }
                }
            }
        }
        b += 2u32;
    }
    out.sort();
    Ok(out)
}

/// The reduction cycles of discriminant `delta`, each listed in rho order
/// starting from its least form, cycles sorted by that starting form.
fn rho_cycles(delta: &BigInt, primitive_only: bool) -> Result<Vec<Vec<Form>>> {
    let forms = enumerate_reduced(delta, primitive_only)?;
    let total = forms.len();
    let sqrt = delta.sqrt();
    let mut remaining: BTreeSet<Form> = forms.into_iter().collect();
    let mut cycles = Vec::new();
    while let Some(start) = remaining.pop_first() {
        let mut cycle = vec![start.clone()];
        let mut cur = rho_step_with(&start, delta, &sqrt);
        while cur != start {
            assert!(
                remaining.remove(&cur) && cycle.len() <= total,
                "rho left the reduced set at {cur} (discriminant {delta})"
            );
            cycle.push(cur.clone());
            cur = rho_step_with(&cur, delta, &sqrt);
        }
        cycles.push(cycle);
    }
    Ok(cycles)
}

/// The `SL2(Z)`-classes of reduced forms of discriminant `delta`: one
/// representative per rho cycle, the lexicographically least member.
pub fn sl2_classes(delta: &BigInt, primitive_only: bool) -> Result<FormClassSet> {
    let mut reps: Vec<Form> = rho_cycles(delta, primitive_only)?
        .into_iter()
        .map(|cycle| cycle.into_iter().min().unwrap())
        .collect();
    reps.sort();
    Ok(FormClassSet {
        delta: delta.clone(),
        reps,
        kind: ClassKind::Sl2,
        primitive_only,
    })
}

/// The twisted `GL2(Z)`-classes of discriminant `delta`: orbits of the
/// involution on `SL2(Z)`-classes. The representative is the
/// lexicographically least orbit member with positive first coefficient.
pub fn twisted_gl2_classes(delta: &BigInt, primitive_only: bool) -> Result<FormClassSet> {
    let cycles = rho_cycles(delta, primitive_only)?;
    let mut cycle_of: HashMap<&Form, usize> = HashMap::new();
    for (i, cycle) in cycles.iter().enumerate() {
        for q in cycle {
            cycle_of.insert(q, i);
        }
    }
    let mut used = vec![false; cycles.len()];
    let mut reps = Vec::new();
    for i in 0..cycles.len() {
        if used[i] {
            continue;
        }
        used[i] = true;
        let partner = involution(&cycles[i][0]);
        let j = *cycle_of
            .get(&partner)
            .expect("involution left the reduced set");
        let mut orbit: Vec<&Form> = cycles[i].iter().collect();
        if j != i {
            used[j] = true;
            orbit.extend(cycles[j].iter());
        }
        let rep = orbit
            .into_iter()
            .filter(|q| q.a.is_positive())
            .min()
            .expect("every cycle alternates the sign of a");
        reps.push(rep.clone());
    }
    reps.sort();
    Ok(FormClassSet {
        delta: delta.clone(),
        reps,
        kind: ClassKind::TwistedGl2,
        primitive_only,
    })
}

/// The class number `h` of the order of discriminant `delta`: the number
/// of twisted `GL2(Z)`-classes of primitive forms.
pub fn class_number(delta: &BigInt) -> Result<BigInt> {
    Ok(BigInt::from(twisted_gl2_classes(delta, true)?.reps.len()))
}

/// The class monoid size `s(d)` of the order of discriminant `(d+1)(d-3)`,
/// together with one representative form per class.
///
/// With `(d+1)(d-3) = f^2 delta0`, the size is the sum of the class
/// numbers of discriminant `(f')^2 delta0` over the divisors `f'` of `f`;
/// the representatives are the primitive representatives at each level
/// scaled by `f/f'`, joined in ascending order of `f'`.
pub fn class_monoid_size(d: &BigInt) -> Result<(BigInt, Vec<Form>)> {
    let delta = discriminant_of(d)?;
    let (delta0, f) = arith::fundamental_discriminant_decompose(&delta)?;
    let mut size = BigInt::zero();
    let mut reps = Vec::new();
    for fprime in arith::divisors(&f)? {
        let level = &fprime * &fprime * &delta0;
        let classes = twisted_gl2_classes(&level, true)?;
        size += classes.reps.len();
        let g = &f / &fprime;
        reps.extend(classes.reps.iter().map(|q| q.scale(&g)));
    }
    Ok((size, reps))
}

/// Whether two forms of equal discriminant are `SL2(Z)`-equivalent,
/// decided by reducing both and walking the cycle of the first.
pub fn sl2_equivalent(q1: &Form, q2: &Form) -> Result<bool> {
    let delta = q1.discriminant();
    let other = q2.discriminant();
    if delta != other {
        return Err(Error::DiscriminantMismatch {
            left: delta,
            right: other,
        });
    }
    check_discriminant(&delta)?;
    let sqrt = delta.sqrt();
    let r1 = reduce(q1)?;
    let r2 = reduce(q2)?;
    if r1 == r2 {
        return Ok(true);
    }
    let mut cur = rho_step_with(&r1, &delta, &sqrt);
    while cur != r1 {
        if cur == r2 {
            return Ok(true);
        }
        cur = rho_step_with(&cur, &delta, &sqrt);
    }
    Ok(false)
}

/// Whether two forms of equal discriminant are twisted
/// `GL2(Z)`-equivalent: `SL2(Z)`-equivalent directly or after the
/// involution.
pub fn gl2_twisted_equivalent(q1: &Form, q2: &Form) -> Result<bool> {
    Ok(sl2_equivalent(q1, q2)? || sl2_equivalent(&involution(q1), q2)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn bi(n: i64) -> BigInt {
        BigInt::from(n)
    }

    fn valid_discs(limit: i64) -> Vec<i64> {
        (5..=limit)
            .filter(|m| m % 4 == 0 || m % 4 == 1)
            .filter(|m| {
                let r = (*m as f64).sqrt() as i64;
                (r - 1..=r + 1).all(|k| k * k != *m)
            })
            .collect()
    }

    #[test]
    fn is_reduced_matches_fixed_examples() {
        assert!(is_reduced(&Form::new(1, 1, -1), &bi(5)).unwrap());
        assert!(!is_reduced(&Form::new(1, 3, 1), &bi(5)).unwrap());
        assert!(is_reduced(&Form::new(-1, 1, 1), &bi(5)).unwrap());
        assert!(is_reduced(&Form::new(2, 2, -1), &bi(12)).unwrap());
        assert!(matches!(
            is_reduced(&Form::new(1, 2, 1), &bi(0)),
            Err(Error::InvalidDiscriminant(_))
        ));
        assert!(matches!(
            is_reduced(&Form::new(1, 3, 0), &bi(9)),
            Err(Error::InvalidDiscriminant(_))
        ));
    }

    #[test]
    fn is_reduced_matches_floating_point_oracle() {
        for delta in valid_discs(600) {
            let root = (delta as f64).sqrt();
            let bound = root as i64 + 1;
            for a in -bound..=bound {
                if a == 0 {
                    continue;
                }
                for b in 1..=bound {
                    let num = b * b - delta;
                    if num % (4 * a) != 0 {
                        continue;
                    }
                    let q = Form::new(a, b, num / (4 * a));
                    let expected = 0.0 < b as f64
                        && (b as f64) < root
                        && root - (b as f64) < (2 * a.abs()) as f64
                        && ((2 * a.abs()) as f64) < root + b as f64;
                    assert_eq!(
                        is_reduced(&q, &bi(delta)).unwrap(),
                        expected,
                        "{q} at delta = {delta}"
                    );
                }
            }
        }
    }

    #[test]
    fn rho_step_matches_fixed_examples() {
        assert_eq!(rho_step(&Form::new(1, 1, -1)).unwrap(), Form::new(-1, 1, 1));
        let twice = rho_step(&rho_step(&Form::new(1, 1, -1)).unwrap()).unwrap();
        assert_eq!(twice, Form::new(1, 1, -1));
        let next = rho_step(&Form::new(3, 2, -4)).unwrap();
        assert_eq!(next.a, bi(-4));
        assert!(is_reduced(&next, &bi(52)).unwrap());
        assert!(matches!(
            rho_step(&Form::new(2, 3, 0)),
            Err(Error::InvalidDiscriminant(_))
        ));
    }

    #[test]
    fn rho_step_preserves_discriminant_content_and_reduced_set() {
        for delta in valid_discs(300) {
            for q in enumerate_reduced(&bi(delta), false).unwrap() {
                let next = rho_step(&q).unwrap();
                assert_eq!(next.discriminant(), bi(delta));
                assert_eq!(next.content(), q.content());
                assert!(is_reduced(&next, &bi(delta)).unwrap(), "{q} -> {next}");
            }
        }
    }

    #[test]
    fn reduce_terminates_within_logarithmic_bound_on_random_forms() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut produced = 0usize;
        while produced < 400 {
            let a = rng.gen_range(-80i64..=80);
            let b = rng.gen_range(-80i64..=80);
            let c = rng.gen_range(-80i64..=80);
            let q = Form::new(a, b, c);
            let delta = q.discriminant();
            if check_discriminant(&delta).is_err() {
                continue;
            }
            produced += 1;
            let reduced = reduce(&q).unwrap();
            assert!(is_reduced(&reduced, &delta).unwrap());
            assert_eq!(reduced.content(), q.content());
        }
    }

    #[test]
    fn enumerate_reduced_matches_exhaustive_scan() {
        for delta in valid_discs(600) {
            let root = (delta as f64).sqrt();
            let bound = root as i64 + 1;
            let mut expected = Vec::new();
            for a in -bound..=bound {
                if a == 0 {
                    continue;
                }
                for b in 1..=bound {
                    let num = b * b - delta;
                    if num % (4 * a) != 0 {
                        continue;
                    }
                    let q = Form::new(a, b, num / (4 * a));
                    if is_reduced(&q, &bi(delta)).unwrap() {
                        expected.push(q);
                    }
                }
            }
            expected.sort();
            assert_eq!(
                enumerate_reduced(&bi(delta), false).unwrap(),
                expected,
                "delta = {delta}"
            );
        }
    }

    #[test]
    fn enumerate_reduced_fixed_sets() {
        assert_eq!(
            enumerate_reduced(&bi(5), true).unwrap(),
            vec![Form::new(-1, 1, 1), Form::new(1, 1, -1)]
        );
        let twelve = enumerate_reduced(&bi(12), true).unwrap();
        assert!(twelve.contains(&Form::new(1, 2, -2)));
        assert_eq!(
            enumerate_reduced(&bi(5), false).unwrap(),
            enumerate_reduced(&bi(5), true).unwrap()
        );
        let all96 = enumerate_reduced(&bi(96), false).unwrap();
        let prim96 = enumerate_reduced(&bi(96), true).unwrap();
        assert_eq!(all96.len(), 16);
        assert_eq!(prim96.len(), 12);
    }

    #[test]
    fn sl2_class_counts_match_hand_worked_cycles() {
        assert_eq!(sl2_classes(&bi(5), true).unwrap().reps.len(), 1);
        assert_eq!(sl2_classes(&bi(12), true).unwrap().reps.len(), 2);
        assert_eq!(sl2_classes(&bi(60), true).unwrap().reps.len(), 4);
        let cycles12 = rho_cycles(&bi(12), true).unwrap();
        let mut sorted: Vec<Vec<Form>> = cycles12
            .into_iter()
            .map(|mut c| {
                c.sort();
                c
            })
            .collect();
        sorted.sort();
        assert_eq!(
            sorted,
            vec![
                vec![Form::new(-2, 2, 1), Form::new(1, 2, -2)],
                vec![Form::new(-1, 2, 2), Form::new(2, 2, -1)],
            ]
        );
    }

    #[test]
    fn twisted_classes_match_class_numbers() {
        assert_eq!(twisted_gl2_classes(&bi(5), true).unwrap().reps.len(), 1);
        assert_eq!(twisted_gl2_classes(&bi(24), true).unwrap().reps.len(), 1);
        assert_eq!(twisted_gl2_classes(&bi(96), true).unwrap().reps.len(), 2);
        assert_eq!(twisted_gl2_classes(&bi(1596), true).unwrap().reps.len(), 8);
        for set in [
            twisted_gl2_classes(&bi(60), true).unwrap(),
            twisted_gl2_classes(&bi(96), true).unwrap(),
        ] {
            for q in &set.reps {
                assert!(q.a.is_positive());
            }
        }
    }

    #[test]
    fn class_number_fixed_values() {
        assert_eq!(class_number(&bi(5)).unwrap(), bi(1));
        assert_eq!(class_number(&bi(33)).unwrap(), bi(1));
        assert_eq!(class_number(&bi(860)).unwrap(), bi(2));
        assert_eq!(class_number(&bi(7740)).unwrap(), bi(8));
    }

    #[test]
    fn involution_acts_on_cycles_independently_of_representative() {
        for delta in [bi(5), bi(12), bi(60), bi(96), bi(1596)] {
            let cycles = rho_cycles(&delta, false).unwrap();
            let mut cycle_of = HashMap::new();
            for (i, cycle) in cycles.iter().enumerate() {
                for q in cycle {
                    cycle_of.insert(q.clone(), i);
                }
            }
            for cycle in &cycles {
                let targets: BTreeSet<usize> = cycle
                    .iter()
                    .map(|q| cycle_of[&involution(q)])
                    .collect();
                assert_eq!(targets.len(), 1, "delta = {delta}");
            }
        }
    }

    #[test]
    fn class_monoid_size_fixed_values_and_representatives() {
        let (s4, reps4) = class_monoid_size(&bi(4)).unwrap();
        assert_eq!(s4, bi(1));
        assert_eq!(reps4.len(), 1);
        let (s35, reps35) = class_monoid_size(&bi(35)).unwrap();
        assert_eq!(s35, bi(10));
        assert_eq!(reps35.len(), 10);
        let delta35 = discriminant_of(&bi(35)).unwrap();
        for q in &reps35 {
            assert_eq!(q.discriminant(), delta35);
        }
        let mut contents: Vec<BigInt> = reps35.iter().map(|q| q.content()).collect();
        contents.sort();
        let mut expected: Vec<BigInt> =
            [1, 1, 1, 1, 2, 2, 3, 4, 6, 12].map(bi).to_vec();
        expected.sort();
        assert_eq!(contents, expected);
        let (s47, _) = class_monoid_size(&bi(47)).unwrap();
        assert_eq!(s47, bi(8));
        for bad in [bi(3), bi(2), bi(-1)] {
            assert!(matches!(
                class_monoid_size(&bad),
                Err(Error::UnsupportedD { .. })
            ));
        }
    }

    #[test]
    fn class_monoid_size_agrees_with_imprimitive_class_count() {
        for d in 4..=40i64 {
            let (size, reps) = class_monoid_size(&bi(d)).unwrap();
            let delta = discriminant_of(&bi(d)).unwrap();
            let direct = twisted_gl2_classes(&delta, false).unwrap();
            assert_eq!(size, BigInt::from(direct.reps.len()), "d = {d}");
            assert_eq!(reps.len(), direct.reps.len(), "d = {d}");
        }
    }

    #[test]
    fn equivalence_tests_match_fixed_examples() {
        let q = Form::new(2, 6, -3);
        assert!(sl2_equivalent(&q, &rho_step(&q).unwrap()).unwrap());
        assert!(gl2_twisted_equivalent(&Form::new(1, 1, -1), &Form::new(-1, 1, 1)).unwrap());
        let classes60 = twisted_gl2_classes(&bi(60), true).unwrap();
        assert_eq!(classes60.reps.len(), 2);
        assert!(!gl2_twisted_equivalent(&classes60.reps[0], &classes60.reps[1]).unwrap());
        assert!(matches!(
            sl2_equivalent(&Form::new(1, 1, -1), &Form::new(1, 2, -2)),
            Err(Error::DiscriminantMismatch { .. })
        ));
    }

    #[test]
    fn every_reduced_form_is_equivalent_to_exactly_one_representative() {
        for delta in [bi(40), bi(60), bi(96), bi(120)] {
            let sl2 = sl2_classes(&delta, true).unwrap();
            let twisted = twisted_gl2_classes(&delta, true).unwrap();
            for q in enumerate_reduced(&delta, true).unwrap() {
                let sl2_matches = sl2
                    .reps
                    .iter()
                    .filter(|r| sl2_equivalent(&q, r).unwrap())
                    .count();
                assert_eq!(sl2_matches, 1, "{q} at delta = {delta}");
                let gl2_matches = twisted
                    .reps
                    .iter()
                    .filter(|r| gl2_twisted_equivalent(&q, r).unwrap())
                    .count();
                assert_eq!(gl2_matches, 1, "{q} at delta = {delta}");
            }
        }
    }

    #[test]
    fn discriminant_of_rejects_small_d() {
        assert_eq!(discriminant_of(&bi(4)).unwrap(), bi(5));
        assert_eq!(discriminant_of(&bi(35)).unwrap(), bi(1152));
        for d in [3, 2, 1, 0, -5] {
            assert!(discriminant_of(&bi(d)).is_err());
        }
    }
}
