//! Ray class group cardinalities of real quadratic orders attached to a
//! dimension `d`, the field degrees they predict, the degeneration
//! predicate and pair list, and the density and growth scans.
//!
//! Everything is exact: the cardinality formula combines the class number
//! of the maximal order, the number field totient, and the unit power
//! index, and every division it performs is checked to leave no
//! remainder. Scan entry points come in data-parallel form with `_seq`
//! twins computing identical output sequentially.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::orders::{epsilon_d, fundamental_unit, unit_power_index};
use crate::qform::{self, discriminant_of};
use crate::{arith, Error, Result};

/// The discriminant data attached to a dimension `d >= 4`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiscData {
    /// The dimension.
    pub d: BigInt,
    /// The discriminant `(d+1)(d-3)`.
    pub delta: BigInt,
    /// The fundamental discriminant with `delta = f^2 delta0`.
    pub delta0: BigInt,
    /// The conductor `f`.
    pub f: BigInt,
    /// `d` itself when `d` is odd, `2d` when `d` is even.
    pub dprime: BigInt,
}

impl DiscData {
    /// Computes the discriminant decomposition for `d >= 4`.
    pub fn new(d: &BigInt) -> Result<Self> {
        let delta = discriminant_of(d)?;
        let (delta0, f) = arith::fundamental_discriminant_decompose(&delta)?;
        let dprime = if d.is_odd() { d.clone() } else { 2 * d };
        Ok(DiscData {
            d: d.clone(),
            delta,
            delta0,
            f,
            dprime,
        })
    }
}

/// The number field totient `phi_K(n)` for the real quadratic field of
/// fundamental discriminant `delta0`: the number of invertible residues
/// mod `n` in the maximal order, `n^2 prod_{p|n} (1 - 1/p)(1 - chi(p)/p)`
/// with `chi` the Kronecker symbol of `delta0`.
pub fn phi_k(delta0: &BigInt, n: &BigInt) -> Result<BigInt> {
    if !arith::is_fundamental_discriminant(delta0) {
        return Err(Error::NotFundamental(delta0.clone()));
    }
    if !n.is_positive() {
        return Err(Error::NonPositive {
            op: "number field totient",
            value: n.clone(),
        });
    }
    let mut product = BigInt::one();
    for (p, e) in arith::factor(n)?.factors {
        let chi = arith::kronecker(delta0, &p);
        product *= num_traits::Pow::pow(&p, 2 * e - 2) * (&p - 1) * (&p - chi);
    }
    Ok(product)
}

/// The per-`d` invariants entering every ray class size: the discriminant
/// data, the class number of the maximal order, and the power index of
/// the distinguished unit. Build once per `d` and reuse across conductor
/// divisors, place counts, and modulus flags.
#[derive(Debug, Clone)]
pub struct RayClassContext {
    /// The discriminant decomposition of `d`.
    pub data: DiscData,
    /// The class number of the maximal order.
    pub h_k: BigInt,
    /// The index `k` with `eps_d = eps_K^k`.
    pub unit_index: u64,
}

impl RayClassContext {
    /// Computes the shared invariants for `d >= 4`.
    pub fn new(d: &BigInt) -> Result<Self> {
        let data = DiscData::new(d)?;
        let h_k = qform::class_number(&data.delta0)?;
        let (eps_k, _) = fundamental_unit(&data.delta0)?;
        let unit_index = unit_power_index(&eps_k, &epsilon_d(d)?)?;
        Ok(RayClassContext { data, h_k, unit_index })
    }

    /// The cardinality of the ray class group of the order of conductor
    /// `fprime` with modulus `d` (doubled to `2d` when requested, which
    /// requires even `d`) and `num_places` ramified infinite places:
    /// `2^places * h_K * phi_K(d f') / (c * k * phi(f'))` with `c = 9`
    /// when `d = 3 mod 9` and `3 | f'`, else `c = 6`, then doubled when
    /// the modulus is. The division must be exact; a remainder is an
    /// invariant violation reported as an error.
    pub fn size(
        &self,
        fprime: &BigInt,
        num_places: u32,
        doubled_modulus: bool,
    ) -> Result<BigInt> {
        if num_places > 2 {
            return Err(Error::InvalidPlaceCount(num_places));
        }
        let d = &self.data.d;
        if doubled_modulus && d.is_odd() {
            return Err(Error::DoublingRequiresEvenD(d.clone()));
        }
        if !fprime.is_positive() || !(&self.data.f % fprime).is_zero() {
            return Err(Error::InvalidConductorDivisor {
                fprime: fprime.clone(),
                f: self.data.f.clone(),
            });
        }
        let c: u32 = if arith::residue(d, 9) == 3 && arith::residue(fprime, 3) == 0 {
            9
        } else {
            6
        };
        let numerator =
            (BigInt::one() << num_places) * &self.h_k * phi_k(&self.data.delta0, &(d * fprime))?;
        let denominator = BigInt::from(u64::from(c) * self.unit_index) * arith::euler_phi(fprime)?;
        let (quotient, remainder) = numerator.div_rem(&denominator);
        if !remainder.is_zero() {
            return Err(Error::InexactDivision {
                context: format!("ray class size for d = {d}, f' = {fprime}"),
                numerator,
                denominator,
            });
        }
        Ok(if doubled_modulus { 2 * quotient } else { quotient })
    }
}

/// One-shot form of [`RayClassContext::size`]; prefer the context when
/// evaluating several conductors or flags for the same `d`.
pub fn ray_class_size(
    d: &BigInt,
    fprime: &BigInt,
    num_places: u32,
    doubled_modulus: bool,
) -> Result<BigInt> {
    RayClassContext::new(d)?.size(fprime, num_places, doubled_modulus)
}

/// The predicted degree over the field of fractions of the class field
/// attached to `(d, f')` with modulus `d` and both infinite places.
pub fn degree_e(d: &BigInt, fprime: &BigInt) -> Result<BigInt> {
    ray_class_size(d, fprime, 2, false)
}

/// The predicted degree of the extended class field: equal to
/// [`degree_e`] for odd `d`, and computed with the modulus doubled to
/// `2d` for even `d`.
pub fn degree_etilde(d: &BigInt, fprime: &BigInt) -> Result<BigInt> {
    ray_class_size(d, fprime, 2, d.is_even())
}

/// Whether the class fields attached to `d` degenerate: true exactly when
/// the fundamental discriminant of `(d+1)(d-3)` is `1 mod 8`,
/// equivalently when the squarefree part of `(d+1)(d-3)` is `1 mod 8`.
pub fn degeneration_predicate(d: &BigInt) -> Result<bool> {
    Ok(arith::residue(&DiscData::new(d)?.delta0, 8) == 1)
}

/// The conductor pairs `(f'', 2f'')` whose class fields coincide: all
/// pairs with `f''` odd and `2f'' | f`, nonempty only when the
/// degeneration predicate holds. The degree equality is re-verified
/// numerically for every returned pair.
pub fn degenerate_pairs(d: &BigInt) -> Result<Vec<(BigInt, BigInt)>> {
    let data = DiscData::new(d)?;
    if arith::residue(&data.delta0, 8) != 1 {
        return Ok(Vec::new());
    }
    let mut pairs = Vec::new();
    let mut context: Option<RayClassContext> = None;
    for fsmall in arith::divisors(&data.f)? {
        let flarge: BigInt = 2 * &fsmall;
        if fsmall.is_even() || !(&data.f % &flarge).is_zero() {
            continue;
        }
        if context.is_none() {
            context = Some(RayClassContext::new(d)?);
        }
        let ctx = context.as_ref().expect("context initialized above");
        let small_degree = ctx.size(&fsmall, 2, false)?;
        let large_degree = ctx.size(&flarge, 2, false)?;
        assert_eq!(
            small_degree, large_degree,
            "degenerate pair ({fsmall}, {flarge}) for d = {d} has unequal degrees"
        );
        pairs.push((fsmall, flarge));
    }
    Ok(pairs)
}

/// One conductor divisor's line in a multiplet report.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultipletEntry {
    /// The conductor divisor `f' | f`.
    pub fprime: BigInt,
    /// The order discriminant `(f')^2 delta0`.
    pub disc: BigInt,
    /// The class number of the order.
    pub h: BigInt,
    /// The degree of the class field over the field of fractions.
    pub deg_e: BigInt,
    /// The degree of the extended class field.
    pub deg_etilde: BigInt,
    /// The other half of a degenerate conductor pair, when there is one.
    pub degenerate_partner: Option<BigInt>,
}

/// The predicted multiplet structure for one dimension: one entry per
/// conductor divisor, with the total class count.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultipletReport {
    /// The dimension.
    pub d: BigInt,
    /// The fundamental discriminant.
    pub delta0: BigInt,
    /// The conductor of `(d+1)(d-3)`.
    pub f: BigInt,
    /// One entry per divisor of `f`, ascending.
    pub entries: Vec<MultipletEntry>,
    /// The sum of the class numbers, i.e. the class monoid size.
    pub total: BigInt,
}

/// Computes the multiplet report for `d >= 4`: class number and predicted
/// field degrees for every conductor divisor, with degenerate partners
/// marked.
pub fn multiplet_report(d: &BigInt) -> Result<MultipletReport> {
    let ctx = RayClassContext::new(d)?;
    let data = &ctx.data;
    let degenerate = arith::residue(&data.delta0, 8) == 1;
    let odd = d.is_odd();
    let mut entries = Vec::new();
    let mut total = BigInt::zero();
    for fprime in arith::divisors(&data.f)? {
        let disc = &fprime * &fprime * &data.delta0;
        let h = qform::class_number(&disc)?;
        let deg_e = ctx.size(&fprime, 2, false)?;
        let deg_etilde = if odd {
            deg_e.clone()
        } else {
            ctx.size(&fprime, 2, true)?
        };
        let degenerate_partner = if !degenerate {
            None
        } else if fprime.is_odd() {
            let double: BigInt = 2 * &fprime;
            (&data.f % &double).is_zero().then_some(double)
        } else {
            let half: BigInt = &fprime / 2;
            half.is_odd().then_some(half)
        };
        total += &h;
        entries.push(MultipletEntry {
            fprime,
            disc,
            h,
            deg_e,
            deg_etilde,
            degenerate_partner,
        });
    }
    Ok(MultipletReport {
        d: d.clone(),
        delta0: data.delta0.clone(),
        f: data.f.clone(),
        entries,
        total,
    })
}

/// One dimension's line in the class group table: the class number of
/// every order between the maximal one and the order of conductor `f`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassGroupRow {
    /// The dimension.
    pub d: BigInt,
    /// The fundamental discriminant.
    pub delta0: BigInt,
    /// `(f', h)` pairs over the divisors of `f`, ascending.
    pub entries: Vec<(BigInt, BigInt)>,
    /// The sum of the class numbers.
    pub total: BigInt,
}

fn classgroup_row(d: u64) -> Result<ClassGroupRow> {
    let data = DiscData::new(&BigInt::from(d))?;
    let mut entries = Vec::new();
    let mut total = BigInt::zero();
    for fprime in arith::divisors(&data.f)? {
        let h = qform::class_number(&(&fprime * &fprime * &data.delta0))?;
        total += &h;
        entries.push((fprime, h));
    }
    Ok(ClassGroupRow {
        d: data.d,
        delta0: data.delta0,
        entries,
        total,
    })
}

/// The class group table rows for `dmin <= d <= dmax`, ascending in `d`.
#[cfg(feature = "parallel")]
pub fn classgroup_rows(dmin: u64, dmax: u64) -> Result<Vec<ClassGroupRow>> {
    check_scan_start(dmin)?;
    (dmin..=dmax).into_par_iter().map(classgroup_row).collect()
}

/// The class group table rows for `dmin <= d <= dmax`, ascending in `d`.
#[cfg(not(feature = "parallel"))]
pub fn classgroup_rows(dmin: u64, dmax: u64) -> Result<Vec<ClassGroupRow>> {
    classgroup_rows_seq(dmin, dmax)
}

/// Sequential twin of [`classgroup_rows`], identical output.
pub fn classgroup_rows_seq(dmin: u64, dmax: u64) -> Result<Vec<ClassGroupRow>> {
    check_scan_start(dmin)?;
    (dmin..=dmax).map(classgroup_row).collect()
}

/// One `(d, f')` line in the class field degree table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassFieldRow {
    /// The dimension.
    pub d: BigInt,
    /// The conductor divisor.
    pub fprime: BigInt,
    /// The class number of the order of conductor `f'`.
    pub h: BigInt,
    /// The degree of the class field.
    pub deg_e: BigInt,
    /// The degree of the extended class field.
    pub deg_etilde: BigInt,
}

fn classfield_rows_for(d: u64) -> Result<Vec<ClassFieldRow>> {
    let report = multiplet_report(&BigInt::from(d))?;
    Ok(report
        .entries
        .into_iter()
        .map(|entry| ClassFieldRow {
            d: report.d.clone(),
            fprime: entry.fprime,
            h: entry.h,
            deg_e: entry.deg_e,
            deg_etilde: entry.deg_etilde,
        })
        .collect())
}

/// The class field degree table rows for `4 <= d <= dmax`, one row per
/// conductor divisor, ascending in `(d, f')`.
#[cfg(feature = "parallel")]
pub fn classfield_rows(dmax: u64) -> Result<Vec<ClassFieldRow>> {
    check_scan_start(dmax)?;
    let nested: Vec<Vec<ClassFieldRow>> = (4..=dmax)
        .into_par_iter()
        .map(classfield_rows_for)
        .collect::<Result<_>>()?;
    Ok(nested.into_iter().flatten().collect())
}

/// The class field degree table rows for `4 <= d <= dmax`, one row per
/// conductor divisor, ascending in `(d, f')`.
#[cfg(not(feature = "parallel"))]
pub fn classfield_rows(dmax: u64) -> Result<Vec<ClassFieldRow>> {
    classfield_rows_seq(dmax)
}

/// Sequential twin of [`classfield_rows`], identical output.
pub fn classfield_rows_seq(dmax: u64) -> Result<Vec<ClassFieldRow>> {
    check_scan_start(dmax)?;
    let mut rows = Vec::new();
    for d in 4..=dmax {
        rows.extend(classfield_rows_for(d)?);
    }
    Ok(rows)
}

/// One degenerate conductor pair's line in the degeneration table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegenerationRow {
    /// The dimension.
    pub d: BigInt,
    /// The fundamental discriminant.
    pub delta0: BigInt,
    /// The odd half of the conductor pair.
    pub fsmall: BigInt,
    /// The even half, twice the odd one.
    pub flarge: BigInt,
    /// The shared class number of the two orders.
    pub h: BigInt,
    /// The shared degree of the two class fields.
    pub degree: BigInt,
}

fn degeneration_rows_for(d: u64) -> Result<Vec<DegenerationRow>> {
    let d = BigInt::from(d);
    let pairs = degenerate_pairs(&d)?;
    if pairs.is_empty() {
        return Ok(Vec::new());
    }
    let ctx = RayClassContext::new(&d)?;
    let mut rows = Vec::new();
    for (fsmall, flarge) in pairs {
        let h = qform::class_number(&(&fsmall * &fsmall * &ctx.data.delta0))?;
        let h_large = qform::class_number(&(&flarge * &flarge * &ctx.data.delta0))?;
        assert_eq!(
            h, h_large,
            "degenerate pair ({fsmall}, {flarge}) for d = {d} has unequal class numbers"
        );
        let degree = ctx.size(&fsmall, 2, false)?;
        rows.push(DegenerationRow {
            d: d.clone(),
            delta0: ctx.data.delta0.clone(),
            fsmall,
            flarge,
            h,
            degree,
        });
    }
    Ok(rows)
}

/// The degeneration table rows for `4 <= d <= dmax`: one row per
/// degenerate conductor pair, ascending in `(d, pair)`.
#[cfg(feature = "parallel")]
pub fn degeneration_rows(dmax: u64) -> Result<Vec<DegenerationRow>> {
    check_scan_start(dmax)?;
    let nested: Vec<Vec<DegenerationRow>> = (4..=dmax)
        .into_par_iter()
        .map(degeneration_rows_for)
        .collect::<Result<_>>()?;
    Ok(nested.into_iter().flatten().collect())
}

/// The degeneration table rows for `4 <= d <= dmax`: one row per
/// degenerate conductor pair, ascending in `(d, pair)`.
#[cfg(not(feature = "parallel"))]
pub fn degeneration_rows(dmax: u64) -> Result<Vec<DegenerationRow>> {
    degeneration_rows_seq(dmax)
}

/// Sequential twin of [`degeneration_rows`], identical output.
pub fn degeneration_rows_seq(dmax: u64) -> Result<Vec<DegenerationRow>> {
    check_scan_start(dmax)?;
    let mut rows = Vec::new();
    for d in 4..=dmax {
        rows.extend(degeneration_rows_for(d)?);
    }
    Ok(rows)
}

/// The squarefree part of `(d+1)(d-3)` reduced mod 8, computed over
/// machine words for scan speed.
fn squarefree_part_mod8(d: u64) -> u32 {
    let left = arith::factor_u128(u128::from(d) + 1);
    let right = arith::factor_u128(u128::from(d) - 3);
    let mut part: u32 = 1;
    let (mut i, mut j) = (0, 0);
    while i < left.len() || j < right.len() {
        let (p, e) = if j >= right.len() || (i < left.len() && left[i].0 < right[j].0) {
            let entry = left[i];
            i += 1;
            entry
        } else if i >= left.len() || right[j].0 < left[i].0 {
            let entry = right[j];
            j += 1;
            entry
        } else {
            let entry = (left[i].0, left[i].1 + right[j].1);
            i += 1;
            j += 1;
            entry
        };
        if e % 2 == 1 {
            part = part * (p % 8) as u32 % 8;
        }
    }
    part
}

/// Machine-word form of [`degeneration_predicate`] for scan speed:
/// whether the squarefree part of `(d+1)(d-3)` is `1 mod 8`.
pub fn degeneration_predicate_u64(d: u64) -> bool {
    squarefree_part_mod8(d) == 1
}

fn degenerate_fast(d: u64) -> bool {
    let hit = degeneration_predicate_u64(d);
    if d % 128 == 47 || d % 128 == 83 {
        assert!(hit, "progression family member d = {d} must degenerate");
    }
    hit
}

/// Counts the `4 <= d <= n` satisfying the degeneration predicate and
/// returns the count with the exact ratio `count / n`. Every `d` in the
/// residue classes `47, 83 mod 128` is asserted to satisfy the predicate
/// along the way.
#[cfg(feature = "parallel")]
pub fn density_scan(n: u64) -> Result<(u64, BigRational)> {
    check_scan_start(n)?;
    let count = (4..=n).into_par_iter().filter(|d| degenerate_fast(*d)).count() as u64;
    Ok((count, density_ratio(count, n)))
}

/// Counts the `4 <= d <= n` satisfying the degeneration predicate and
/// returns the count with the exact ratio `count / n`. Every `d` in the
/// residue classes `47, 83 mod 128` is asserted to satisfy the predicate
/// along the way.
#[cfg(not(feature = "parallel"))]
pub fn density_scan(n: u64) -> Result<(u64, BigRational)> {
    density_scan_seq(n)
}

/// Sequential twin of [`density_scan`], identical output.
pub fn density_scan_seq(n: u64) -> Result<(u64, BigRational)> {
    check_scan_start(n)?;
    let count = (4..=n).filter(|d| degenerate_fast(*d)).count() as u64;
    Ok((count, density_ratio(count, n)))
}

fn density_ratio(count: u64, n: u64) -> BigRational {
    BigRational::new(BigInt::from(count), BigInt::from(n))
}

/// The `4 <= d <= dmax` whose class monoid is trivial.
#[cfg(feature = "parallel")]
pub fn smallest_monoid_scan(dmax: u64) -> Result<Vec<BigInt>> {
    check_scan_start(dmax)?;
    let flags: Vec<bool> = (4..=dmax)
        .into_par_iter()
        .map(|d| Ok(qform::class_monoid_size(&BigInt::from(d))?.0.is_one()))
        .collect::<Result<_>>()?;
    Ok(collect_flagged(flags))
}

/// The `4 <= d <= dmax` whose class monoid is trivial.
#[cfg(not(feature = "parallel"))]
pub fn smallest_monoid_scan(dmax: u64) -> Result<Vec<BigInt>> {
    smallest_monoid_scan_seq(dmax)
}

/// Sequential twin of [`smallest_monoid_scan`], identical output.
pub fn smallest_monoid_scan_seq(dmax: u64) -> Result<Vec<BigInt>> {
    check_scan_start(dmax)?;
    let flags: Vec<bool> = (4..=dmax)
        .map(|d| Ok(qform::class_monoid_size(&BigInt::from(d))?.0.is_one()))
        .collect::<Result<_>>()?;
    Ok(collect_flagged(flags))
}

fn collect_flagged(flags: Vec<bool>) -> Vec<BigInt> {
    flags
        .into_iter()
        .enumerate()
        .filter_map(|(i, trivial)| trivial.then(|| BigInt::from(i as u64 + 4)))
        .collect()
}

fn trend_point(d: u64) -> Result<(u64, f64)> {
    let (size, _) = qform::class_monoid_size(&BigInt::from(d))?;
    let log_size = size.to_f64().expect("monoid size within float range").ln();
    Ok((d, log_size / (d as f64).ln()))
}

/// The growth diagnostic `log s(d) / log d` over `dmin <= d <= dmax`,
/// where `s(d)` is the class monoid size. Floating point by design; every
/// exact quantity it summarizes is available elsewhere.
#[cfg(feature = "parallel")]
pub fn brauer_siegel_trend(dmin: u64, dmax: u64) -> Result<Vec<(u64, f64)>> {
    check_scan_start(dmin)?;
    (dmin..=dmax).into_par_iter().map(trend_point).collect()
}

/// The growth diagnostic `log s(d) / log d` over `dmin <= d <= dmax`,
/// where `s(d)` is the class monoid size. Floating point by design; every
/// exact quantity it summarizes is available elsewhere.
#[cfg(not(feature = "parallel"))]
pub fn brauer_siegel_trend(dmin: u64, dmax: u64) -> Result<Vec<(u64, f64)>> {
    brauer_siegel_trend_seq(dmin, dmax)
}

/// Sequential twin of [`brauer_siegel_trend`], identical output.
pub fn brauer_siegel_trend_seq(dmin: u64, dmax: u64) -> Result<Vec<(u64, f64)>> {
    check_scan_start(dmin)?;
    (dmin..=dmax).map(trend_point).collect()
}

fn check_scan_start(bound: u64) -> Result<()> {
    if bound < 4 {
        let d = BigInt::from(bound);
        let delta = (&d + 1) * (&d - 3);
        return Err(Error::UnsupportedD { d, delta });
    }
    Ok(())
}
