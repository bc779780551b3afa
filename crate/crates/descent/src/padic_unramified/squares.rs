//! Squares in U_d: unit classes mod 8, square testing and square roots.

use std::sync::Arc;

use super::field::{UnramifiedElement, UnramifiedField};
use crate::error::{DescentError, Result};

/// Class of a unit u modulo squares, in the basis {1 − 2xᵏ : k < d} ∪ {ξ}.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct UnitClass {
    /// Bit k is the exponent of 1 − 2xᵏ.
    pub linear: u64,
    /// Exponent of the unramified class ξ = 1 + 4t with Tr(t̄) = 1.
    pub xi: bool,
}

impl UnitClass {
    pub fn is_trivial(&self) -> bool {
        self.linear == 0 && !self.xi
    }
}

/// 1 − 2xᵏ.
pub fn linear_unit(field: &Arc<UnramifiedField>, k: usize) -> UnramifiedElement {
    field.one().sub(&field.from_residue(1 << k).mul_pow2(1))
}

/// 1 + 4t with t the 0/1 lift of the smallest residue of trace 1.
pub fn xi_unit(field: &Arc<UnramifiedField>) -> UnramifiedElement {
    let t = field.residue_field().trace_one();
    field.one().add(&field.from_residue(t).mul_pow2(2))
}

/// Splits y into (v, u) with y = 2^v·u and u a unit body with shift 0.
fn split_unit(y: &UnramifiedElement) -> Result<(i64, UnramifiedElement)> {
    let n = y.normalized();
    if n.is_zero_to_precision() {
        return Err(DescentError::precision(y.field().precision(), "valuation not certified"));
    }
    let v = n.shift();
    let u = n.mul_pow2(-v);
    if u.precision() < 3 {
        return Err(DescentError::precision(y.field().precision(), "unit part known to fewer than 3 bits"));
    }
    Ok((v, u))
}

/// Bit `bit` of each body coefficient of `u − 1`, read as a residue bitmask.
fn digit_of_minus_one(u: &UnramifiedElement, bit: u32) -> u64 {
    let field = u.field();
    let diff = u.sub(&field.one());
    (0..field.degree()).fold(0, |acc, k| acc | ((diff.body_bit(k, bit) as u64) << k))
}

/// u divided by the square of a lift of √ū, so the result is ≡ 1 mod 2.
fn normalize_residue(u: &UnramifiedElement) -> Result<(UnramifiedElement, UnramifiedElement)> {
    let field = u.field();
    let rf = field.residue_field();
    let w0 = field.from_residue(rf.sqrt(u.residue()?));
    let u1 = u.mul(&w0.square().inverse()?);
    Ok((w0, u1))
}

/// Class of a unit with shift 0, read from its residue mod 8.
pub fn unit_class(u: &UnramifiedElement) -> Result<UnitClass> {
    let field = u.field().clone();
    let (_, u1) = normalize_residue(u)?;
    let linear = digit_of_minus_one(&u1, 1);
    let mut u2 = u1;
    for k in 0..field.degree() {
        if (linear >> k) & 1 == 1 {
            u2 = u2.mul(&linear_unit(&field, k).inverse()?);
        }
    }
    debug_assert_eq!(digit_of_minus_one(&u2, 1), 0);
    let b = digit_of_minus_one(&u2, 2);
    Ok(UnitClass { linear, xi: field.residue_field().trace(b) == 1 })
}

/// Valuation parity and unit class of a nonzero element.
pub fn square_class_data(y: &UnramifiedElement) -> Result<(bool, UnitClass)> {
    let (v, u) = split_unit(y)?;
    Ok((v.rem_euclid(2) == 1, unit_class(&u)?))
}

pub fn is_square(y: &UnramifiedElement) -> Result<bool> {
    let (odd, class) = square_class_data(y)?;
    if odd || !class.is_trivial() {
        return Ok(false);
    }
    let r = sqrt(y)?;
    if !r.square().agrees_with(y, 1) {
        return Err(DescentError::precision(y.field().precision(), "square root did not certify"));
    }
    Ok(true)
}

/// Square root with the lexicographically least body among ±r.
pub fn sqrt(y: &UnramifiedElement) -> Result<UnramifiedElement> {
    let (v, u) = split_unit(y)?;
    if v.rem_euclid(2) == 1 || !unit_class(&u)?.is_trivial() {
        return Err(DescentError::NotASquare);
    }
    let field = u.field().clone();
    let (w0, u1) = normalize_residue(&u)?;
    let b = digit_of_minus_one(&u1, 2);
    let a = field.residue_field().artin_schreier(b).ok_or(DescentError::NotASquare)?;
    // (1 + 2a)² ≡ 1 + 4(a² + a) ≡ u₁ mod 8
    let mut r = w0.mul(&field.one().add(&field.from_residue(a).mul_pow2(1)));
    let max_steps = 2 * (32 - field.precision().leading_zeros()) + 4;
    for _ in 0..max_steps {
        let e = u.sub(&r.square());
        if e.is_zero_to_precision() {
            break;
        }
        let step = e.normalized().mul_pow2(-1).mul(&r.inverse()?);
        r = r.add(&step);
    }
    if !u.sub(&r.square()).is_zero_to_precision() {
        return Err(DescentError::precision(field.precision(), "square root iteration did not converge"));
    }
    let neg = r.neg();
    let r = if neg.cmp_body(&r).is_lt() { neg } else { r };
    Ok(r.mul_pow2(v / 2))
}
