//! The correspondence between binary quadratic forms of discriminant
//! `tau^2 - 4` and conjugacy classes of unimodular integer matrices of
//! trace `tau`.
//!
//! A form `(a, b, c)` of discriminant `(d+1)(d-3)` maps to the matrix
//! `[[(b+d-1)/2, -a], [c, (-b+d-1)/2]]` of determinant 1 and trace `d-1`,
//! and a matrix `[[s, t], [u, v]]` maps back to `(-t, s-v, u)`. The two
//! maps are mutually inverse and intertwine the twisted form action of
//! `R` with matrix conjugation by the transpose of `R`, so GL2(Z)
//! conjugacy classes of trace-`tau` matrices are counted exactly by the
//! twisted form classes of all (primitive and imprimitive) forms of
//! discriminant `tau^2 - 4`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::qform::{self, discriminant_of, Form};
use crate::{Error, Result};

/// An integer 2x2 matrix `[[s, t], [u, v]]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Mat2 {
    /// Top-left entry.
    pub s: BigInt,
    /// Top-right entry.
    pub t: BigInt,
    /// Bottom-left entry.
    pub u: BigInt,
    /// Bottom-right entry.
    pub v: BigInt,
}

impl Mat2 {
    /// Builds `[[s, t], [u, v]]`.
    pub fn new<T: Into<BigInt>>(s: T, t: T, u: T, v: T) -> Self {
        Mat2 {
            s: s.into(),
            t: t.into(),
            u: u.into(),
            v: v.into(),
        }
    }

    /// The identity matrix.
    pub fn identity() -> Self {
        Mat2::new(1, 0, 0, 1)
    }

    /// The determinant `sv - tu`.
    pub fn det(&self) -> BigInt {
        &self.s * &self.v - &self.t * &self.u
    }

    /// The trace `s + v`.
    pub fn trace(&self) -> BigInt {
        &self.s + &self.v
    }

    /// The transpose `[[s, u], [t, v]]`.
    pub fn transpose(&self) -> Self {
        Mat2 {
            s: self.s.clone(),
            t: self.u.clone(),
            u: self.t.clone(),
            v: self.v.clone(),
        }
    }

    /// The inverse, defined for determinant plus or minus 1.
    pub fn inverse(&self) -> Self {
        let det = self.det();
        assert!(
            det.abs().is_one(),
            "inverse requires determinant +-1, got {det}"
        );
        Mat2 {
            s: &self.v * &det,
            t: -&self.t * &det,
            u: -&self.u * &det,
            v: &self.s * &det,
        }
    }
}

impl std::ops::Mul for &Mat2 {
    type Output = Mat2;

    fn mul(self, other: &Mat2) -> Mat2 {
        Mat2 {
            s: &self.s * &other.s + &self.t * &other.u,
            t: &self.s * &other.t + &self.t * &other.v,
            u: &self.u * &other.s + &self.v * &other.u,
            v: &self.u * &other.t + &self.v * &other.v,
        }
    }
}

impl std::fmt::Display for Mat2 {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[[{}, {}], [{}, {}]]", self.s, self.t, self.u, self.v)
    }
}

/// The twisted right action of a matrix of determinant plus or minus 1 on
/// a form: `Q^R(x, y) = det(R) * Q(sx + ty, ux + vy)`.
pub fn twisted_action(r: &Mat2, q: &Form) -> Form {
    let det = r.det();
    assert!(
        det.abs().is_one(),
        "twisted action requires determinant +-1, got {det}"
    );
    let (s, t, u, v) = (&r.s, &r.t, &r.u, &r.v);
    let (a, b, c) = (&q.a, &q.b, &q.c);
    let a2 = a * s * s + b * s * u + c * u * u;
    let b2 = 2 * (a * s * t + c * u * v) + b * (s * v + t * u);
    let c2 = a * t * t + b * t * v + c * v * v;
    Form {
        a: &det * a2,
        b: &det * b2,
        c: &det * c2,
    }
}

/// The map sending a form `(a, b, c)` of discriminant `(d+1)(d-3)` to the
/// matrix `[[(b+d-1)/2, -a], [c, (-b+d-1)/2]]` of determinant 1 and trace
/// `d - 1`. It satisfies the exact intertwining identity
/// `form_to_matrix(twisted_action(r, q)) = r^T * form_to_matrix(q) * (r^T)^-1`,
/// so twisted form classes map bijectively onto conjugacy classes.
pub fn form_to_matrix(q: &Form, d: &BigInt) -> Result<Mat2> {
    let delta = discriminant_of(d)?;
    let actual = q.discriminant();
    if actual != delta {
        return Err(Error::DiscriminantMismatch {
            left: actual,
            right: delta,
        });
    }
    let tau = d - 1u32;
    debug_assert!((&q.b - &tau).is_even(), "b and d - 1 must share parity");
    let two = BigInt::from(2);
    let (s, rs) = (&q.b + &tau).div_rem(&two);
    let (v, rv) = (&tau - &q.b).div_rem(&two);
    debug_assert!(rs.is_zero() && rv.is_zero());
    let m = Mat2 {
        s,
        t: -&q.a,
        u: q.c.clone(),
        v,
    };
    debug_assert!(m.det().is_one());
    debug_assert_eq!(m.trace(), tau);
    Ok(m)
}

/// The inverse map sending a determinant-1 matrix `[[s, t], [u, v]]` to
/// the form `(-t, s - v, u)`, whose discriminant is `trace^2 - 4`.
pub fn matrix_to_form(a: &Mat2) -> Result<Form> {
    let det = a.det();
    if !det.is_one() {
        return Err(Error::NotUnimodular { det });
    }
    let tau = a.trace();
    let delta = &tau * &tau - 4u32;
    crate::arith::check_discriminant(&delta)?;
    let q = Form {
        a: -&a.t,
        b: &a.s - &a.v,
        c: a.u.clone(),
    };
    debug_assert_eq!(q.discriminant(), delta);
    Ok(q)
}

/// Representatives of the GL2(Z)-conjugacy classes of determinant-1
/// integer matrices of trace `tau`, for `tau >= 3` with `tau^2 - 4`
/// nonsquare: the images of the twisted form class representatives of all
/// forms of discriminant `tau^2 - 4`, pairwise non-conjugate.
pub fn trace_class_representatives(tau: &BigInt) -> Result<Vec<Mat2>> {
    let d = tau + 1u32;
    let (_, reps) = qform::class_monoid_size(&d)?;
    reps.iter().map(|q| form_to_matrix(q, &d)).collect()
}

/// Whether two determinant-1 matrices of equal nonsquare-discriminant
/// trace are conjugate in GL2(Z), decided through the form correspondence.
pub fn are_gl2_conjugate(a: &Mat2, b: &Mat2) -> Result<bool> {
    if a.trace() != b.trace() {
        return Ok(false);
    }
    let qa = matrix_to_form(a)?;
    let qb = matrix_to_form(b)?;
    qform::gl2_twisted_equivalent(&qa, &qb)
}

/// Deterministic pseudorandom elements of GL2(Z): products of at most
/// `max_len` factors drawn from `[[1, 1], [0, 1]]`, `[[0, -1], [1, 0]]`,
/// and `[[1, 0], [0, -1]]`, reproducible from the seed.
pub fn seeded_gl2_words(seed: u64, count: usize, max_len: usize) -> Vec<Mat2> {
    let generators = [
        Mat2::new(1, 1, 0, 1),
        Mat2::new(0, -1, 1, 0),
        Mat2::new(1, 0, 0, -1),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let len = rng.gen_range(1..=max_len);
            let mut word = Mat2::identity();
            for _ in 0..len {
                word = &word * &generators[rng.gen_range(0..generators.len())];
            }
            word
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bi(n: i64) -> BigInt {
        BigInt::from(n)
    }

    #[test]
    fn form_to_matrix_fixed_examples() {
        let m = form_to_matrix(&Form::new(1, 1, -1), &bi(4)).unwrap();
        assert_eq!(m, Mat2::new(2, -1, -1, 1));
        let m = form_to_matrix(&Form::new(1, 0, -3), &bi(5)).unwrap();
        assert_eq!(m, Mat2::new(2, -1, -3, 2));
        assert!(matches!(
            form_to_matrix(&Form::new(1, 1, -1), &bi(5)),
            Err(Error::DiscriminantMismatch { .. })
        ));
    }

    #[test]
    fn enumerated_forms_share_parity_with_tau() {
        for d in [5i64, 8, 12, 35] {
            let delta = discriminant_of(&bi(d)).unwrap();
            for q in qform::enumerate_reduced(&delta, false).unwrap() {
                assert!((&q.b - bi(d - 1)).is_even(), "d = {d}, q = {q}");
                form_to_matrix(&q, &bi(d)).unwrap();
            }
        }
    }

    #[test]
    fn matrix_to_form_fixed_examples() {
        assert_eq!(
            matrix_to_form(&Mat2::new(2, -1, -1, 1)).unwrap(),
            Form::new(1, 1, -1)
        );
        assert_eq!(
            matrix_to_form(&Mat2::new(3, -1, 1, 0)).unwrap(),
            Form::new(1, 3, 1)
        );
        assert!(matches!(
            matrix_to_form(&Mat2::identity()),
            Err(Error::InvalidDiscriminant(_))
        ));
        assert!(matches!(
            matrix_to_form(&Mat2::new(1, 0, 0, -1)),
            Err(Error::NotUnimodular { .. })
        ));
    }

    #[test]
    fn round_trips_are_exact_for_all_representatives() {
        for d in 4..=60i64 {
            let d = bi(d);
            let (_, reps) = qform::class_monoid_size(&d).unwrap();
            for q in reps {
                let m = form_to_matrix(&q, &d).unwrap();
                assert_eq!(matrix_to_form(&m).unwrap(), q, "d = {d}");
                assert_eq!(form_to_matrix(&matrix_to_form(&m).unwrap(), &d).unwrap(), m);
            }
        }
    }

    #[test]
    fn matrix_algebra_sanity() {
        for w in seeded_gl2_words(17, 60, 12) {
            assert!(w.det().abs().is_one());
            assert_eq!(&w * &w.inverse(), Mat2::identity());
            assert_eq!(&w.inverse() * &w, Mat2::identity());
        }
    }

    #[test]
    fn correspondence_intertwines_twisted_action_and_conjugation() {
        let words = seeded_gl2_words(23, 50, 12);
        for d in [4i64, 5, 8, 11, 35] {
            let d = bi(d);
            let (_, reps) = qform::class_monoid_size(&d).unwrap();
            for r in &words {
                let rt = r.transpose();
                for q in &reps {
                    let lhs = form_to_matrix(&twisted_action(r, q), &d).unwrap();
                    let mid = form_to_matrix(q, &d).unwrap();
                    let rhs = &(&rt * &mid) * &rt.inverse();
                    assert_eq!(lhs, rhs, "d = {d}, R = {r}");
                    assert!(are_gl2_conjugate(&lhs, &mid).unwrap(), "d = {d}, R = {r}");
                }
            }
        }
    }

    #[test]
    fn twisted_action_preserves_discriminant_and_composes() {
        let words = seeded_gl2_words(29, 20, 8);
        let q = Form::new(1, 0, -3);
        for r in &words {
            assert_eq!(twisted_action(r, &q).discriminant(), q.discriminant());
        }
        for pair in words.chunks(2) {
            if let [r1, r2] = pair {
                let composed = twisted_action(&(r1 * r2), &q);
                let stepped = twisted_action(r2, &twisted_action(r1, &q));
                assert_eq!(composed, stepped);
            }
        }
    }

    #[test]
    fn trace_class_counts_match_golden_values() {
        assert_eq!(trace_class_representatives(&bi(3)).unwrap().len(), 1);
        assert_eq!(trace_class_representatives(&bi(10)).unwrap().len(), 3);
        assert_eq!(trace_class_representatives(&bi(34)).unwrap().len(), 10);
        assert!(trace_class_representatives(&bi(2)).is_err());
    }

    #[test]
    fn trace_class_counts_match_monoid_size_and_reps_are_nonconjugate() {
        for d in 4..=40i64 {
            let d = bi(d);
            let tau = &d - 1u32;
            let reps = trace_class_representatives(&tau).unwrap();
            let (size, _) = qform::class_monoid_size(&d).unwrap();
            assert_eq!(BigInt::from(reps.len()), size, "d = {d}");
            for m in &reps {
                assert!(m.det().is_one());
                assert_eq!(m.trace(), tau);
            }
            for (i, a) in reps.iter().enumerate() {
                for b in reps.iter().skip(i + 1) {
                    assert!(!are_gl2_conjugate(a, b).unwrap(), "d = {d}");
                }
            }
        }
    }

    #[test]
    fn conjugates_are_recognized() {
        let a = form_to_matrix(&Form::new(1, 1, -1), &bi(4)).unwrap();
        assert!(are_gl2_conjugate(&a, &a).unwrap());
        for r in seeded_gl2_words(31, 25, 10) {
            let conj = &(&r.inverse() * &a) * &r;
            assert!(are_gl2_conjugate(&a, &conj).unwrap());
        }
        let b = Mat2::new(4, -1, 1, 0);
        assert!(!are_gl2_conjugate(&a, &b).unwrap());
    }
}
