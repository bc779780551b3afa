//! Unramified extensions U_d = Z₂[x]/(m) of the 2-adic numbers and their elements.
//!
//! An element is stored as `2^shift · Σ cₖ xᵏ` with integer coefficients cₖ
//! known modulo `2^prec`. Arithmetic runs modulo 2^N where N is the field's
//! working precision; `prec ≤ N` tracks how many low bits are meaningful.

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use super::limbs;
use super::residue::{self, ResidueField};
use crate::error::{DescentError, Result};

pub struct UnramifiedField {
    degree: usize,
    residue: ResidueField,
    limbs: usize,
    /// Images of xᵏ (k < d) under Frobenius, flat d·limbs each.
    frob: Vec<Vec<u64>>,
}

impl fmt::Debug for UnramifiedField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "U_{}[m={:#b}, N={}]", self.degree, self.residue.modulus(), self.precision())
    }
}

impl PartialEq for UnramifiedField {
    fn eq(&self, other: &Self) -> bool {
        self.residue == other.residue && self.limbs == other.limbs
    }
}

impl Eq for UnramifiedField {}

/// Rounds a requested bit precision up to whole limbs.
pub fn limbs_for(bits: u32) -> usize {
    (bits.max(64) as usize).div_ceil(64)
}

impl UnramifiedField {
    /// U_d with the numerically smallest irreducible residue modulus.
    pub fn new(degree: u32, precision: u32) -> Arc<Self> {
        Self::with_modulus(residue::smallest_irreducible(degree), precision)
            .expect("smallest irreducible is irreducible")
    }

    pub fn with_modulus(modulus: u64, precision: u32) -> Result<Arc<Self>> {
        let residue = ResidueField::new(modulus).ok_or(DescentError::ReducibleModulus)?;
        let mut field = UnramifiedField {
            degree: residue.degree() as usize,
            residue,
            limbs: limbs_for(precision),
            frob: Vec::new(),
        };
        field.frob = field.compute_frobenius();
        Ok(Arc::new(field))
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn residue_field(&self) -> &ResidueField {
        &self.residue
    }

    /// The residue modulus as an F₂ bitmask; its 0/1 integer lift defines the field.
    pub fn modulus(&self) -> u64 {
        self.residue.modulus()
    }

    /// Working precision N in bits.
    pub fn precision(&self) -> u32 {
        64 * self.limbs as u32
    }

    fn flat_len(&self) -> usize {
        self.degree * self.limbs
    }

    pub(crate) fn raw_mul(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        let (d, n) = (self.degree, self.limbs);
        let mut prod = vec![0u64; (2 * d - 1) * n];
        for i in 0..d {
            let ai = &a[i * n..(i + 1) * n];
            if limbs::is_zero(ai) {
                continue;
            }
            for j in 0..d {
                let bj = &b[j * n..(j + 1) * n];
                limbs::mul_add(&mut prod[(i + j) * n..(i + j + 1) * n], ai, bj);
            }
        }
        self.reduce(prod)
    }

    /// Reduces a flat coefficient vector of any length modulo the 0/1 lift of m.
    fn reduce(&self, mut prod: Vec<u64>) -> Vec<u64> {
        let (d, n) = (self.degree, self.limbs);
        let m = self.modulus();
        let len = prod.len() / n;
        for k in (d..len).rev() {
            let top: Vec<u64> = prod[k * n..(k + 1) * n].to_vec();
            if limbs::is_zero(&top) {
                continue;
            }
            // x^d = −Σ_{j<d} m_j x^j
            for j in 0..d {
                if (m >> j) & 1 == 1 {
                    let idx = k - d + j;
                    limbs::sub_assign(&mut prod[idx * n..(idx + 1) * n], &top);
                }
            }
        }
        prod.truncate(d * n);
        prod
    }

    fn raw_one(&self) -> Vec<u64> {
        let mut v = vec![0u64; self.flat_len()];
        v[0] = 1;
        v
    }

    fn raw_from_residue(&self, r: u64) -> Vec<u64> {
        let n = self.limbs;
        let mut v = vec![0u64; self.flat_len()];
        for k in 0..self.degree {
            v[k * n] = (r >> k) & 1;
        }
        v
    }

    fn raw_residue(&self, a: &[u64]) -> u64 {
        (0..self.degree).fold(0, |acc, k| acc | ((a[k * self.limbs] & 1) << k))
    }

    /// Inverse of a unit body via Newton iteration from the residue inverse.
    fn raw_inv_unit(&self, a: &[u64]) -> Vec<u64> {
        let r = self.raw_residue(a);
        assert!(r != 0, "inverse of a non-unit body");
        let mut x = self.raw_from_residue(self.residue.inv(r));
        let mut good = 1u32;
        let mut two = vec![0u64; self.flat_len()];
        two[0] = 2;
        while good < self.precision() {
            let ax = self.raw_mul(a, &x);
            let mut t = two.clone();
            for k in 0..self.degree {
                limbs::sub_assign(
                    &mut t[k * self.limbs..(k + 1) * self.limbs],
                    &ax[k * self.limbs..(k + 1) * self.limbs],
                );
            }
            x = self.raw_mul(&x, &t);
            good *= 2;
        }
        x
    }

    fn raw_eval_modulus(&self, r: &[u64]) -> (Vec<u64>, Vec<u64>) {
        // m(r) and m'(r) by Horner over the 0/1 lift of m.
        let m = self.modulus();
        let d = self.degree;
        let n = self.limbs;
        let mut val = vec![0u64; self.flat_len()];
        let mut der = vec![0u64; self.flat_len()];
        for k in (0..=d).rev() {
            der = self.raw_mul(&der, r);
            let v2 = val.clone();
            for i in 0..d {
                limbs::add_assign(&mut der[i * n..(i + 1) * n], &v2[i * n..(i + 1) * n]);
            }
            val = self.raw_mul(&val, r);
            if (m >> k) & 1 == 1 {
                limbs::add_assign(&mut val[0..n], &limbs::from_u64(1, n));
            }
        }
        (val, der)
    }

    /// Newton lift of a root of the modulus from a residue root.
    fn raw_root_of_modulus(&self, residue_root: u64) -> Vec<u64> {
        let n = self.limbs;
        let mut r = self.raw_from_residue(residue_root);
        let mut good = 1u32;
        loop {
            let (val, der) = self.raw_eval_modulus(&r);
            let step = self.raw_mul(&val, &self.raw_inv_unit(&der));
            for i in 0..self.degree {
                limbs::sub_assign(&mut r[i * n..(i + 1) * n], &step[i * n..(i + 1) * n]);
            }
            if good >= self.precision() {
                break;
            }
            good *= 2;
        }
        r
    }

    fn compute_frobenius(&self) -> Vec<Vec<u64>> {
        let x_sq = self.residue.square(residue::rem(2, self.modulus()));
        let phi_x = self.raw_root_of_modulus(x_sq);
        let mut out = Vec::with_capacity(self.degree);
        let mut acc = self.raw_one();
        for _ in 0..self.degree {
            out.push(acc.clone());
            acc = self.raw_mul(&acc, &phi_x);
        }
        out
    }
}

pub fn same_field(a: &Arc<UnramifiedField>, b: &Arc<UnramifiedField>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

impl UnramifiedField {
    fn element(self: &Arc<Self>, shift: i64, prec: u32, coeffs: Vec<u64>) -> UnramifiedElement {
        UnramifiedElement::from_parts(self.clone(), shift, prec, coeffs)
    }

    pub fn zero(self: &Arc<Self>) -> UnramifiedElement {
        self.element(0, self.precision(), vec![0; self.flat_len()])
    }

    pub fn one(self: &Arc<Self>) -> UnramifiedElement {
        self.element(0, self.precision(), self.raw_one())
    }

    pub fn from_i64(self: &Arc<Self>, x: i64) -> UnramifiedElement {
        let mut c = vec![0; self.flat_len()];
        c[..self.limbs].copy_from_slice(&limbs::from_i64(x, self.limbs));
        self.element(0, self.precision(), c)
    }

    pub fn from_bigint(self: &Arc<Self>, x: &BigInt) -> UnramifiedElement {
        let mut c = vec![0; self.flat_len()];
        c[..self.limbs].copy_from_slice(&limbs::from_bigint(x, self.limbs));
        self.element(0, self.precision(), c)
    }

    /// An exact rational, stored as 2^v times a 2-adic unit.
    pub fn from_rational(self: &Arc<Self>, q: &BigRational) -> UnramifiedElement {
        if q.is_zero() {
            return self.zero();
        }
        let (num, den) = (q.numer(), q.denom());
        let vn = num.trailing_zeros().unwrap_or(0);
        let vd = den.trailing_zeros().unwrap_or(0);
        let un = limbs::from_bigint(&(num >> vn), self.limbs);
        let ud = limbs::from_bigint(&(den >> vd), self.limbs);
        let unit = limbs::mul(&un, &limbs::inv_odd(&ud));
        let mut c = vec![0; self.flat_len()];
        c[..self.limbs].copy_from_slice(&unit);
        self.element(vn as i64 - vd as i64, self.precision(), c)
    }

    /// The 0/1 lift of a residue field element.
    pub fn from_residue(self: &Arc<Self>, r: u64) -> UnramifiedElement {
        self.element(0, self.precision(), self.raw_from_residue(r))
    }

    /// The class of x, a root of the 0/1 lift of the modulus.
    pub fn generator(self: &Arc<Self>) -> UnramifiedElement {
        if self.degree == 1 {
            // m = x over F₂ lifts to x, whose root is 0.
            return self.zero();
        }
        self.from_residue(2)
    }

    /// Element with the given integer coefficients in the power basis.
    pub fn from_coeffs(self: &Arc<Self>, coeffs: &[BigInt]) -> UnramifiedElement {
        assert!(coeffs.len() <= self.degree, "too many coefficients");
        let mut c = vec![0; self.flat_len()];
        for (k, x) in coeffs.iter().enumerate() {
            c[k * self.limbs..(k + 1) * self.limbs].copy_from_slice(&limbs::from_bigint(x, self.limbs));
        }
        self.element(0, self.precision(), c)
    }

    /// Root of the lift of `poly` (F₂ bitmask with 0/1 integer lift) by Newton iteration.
    pub(crate) fn lift_root_of_f2_poly(self: &Arc<Self>, poly: u64, residue_root: u64) -> Result<UnramifiedElement> {
        let coeffs: Vec<BigInt> = (0..64).map(|k| BigInt::from((poly >> k) & 1)).collect();
        let deg = residue::degree(poly as u128) as usize;
        newton_root(self, &coeffs[..=deg], residue_root)
    }
}

/// Newton iteration for a simple root of an integer polynomial (ascending coefficients).
pub fn newton_root(field: &Arc<UnramifiedField>, poly: &[BigInt], residue_root: u64) -> Result<UnramifiedElement> {
    let lifted: Vec<UnramifiedElement> = poly.iter().map(|c| field.from_bigint(c)).collect();
    let deriv: Vec<UnramifiedElement> =
        poly.iter().enumerate().skip(1).map(|(k, c)| field.from_bigint(&(c * k))).collect();
    let eval = |p: &[UnramifiedElement], x: &UnramifiedElement| -> UnramifiedElement {
        let mut acc = field.zero();
        for c in p.iter().rev() {
            acc = acc.mul(x).add(c);
        }
        acc
    };
    let mut r = field.from_residue(residue_root);
    let dr = eval(&deriv, &r);
    if dr.residue_unchecked() == 0 {
        return Err(DescentError::HenselFailure("residue root is not simple".into()));
    }
    let mut good = 1u32;
    while good < 2 * field.precision() {
        let step = eval(&lifted, &r).mul(&eval(&deriv, &r).inverse()?);
        r = r.sub(&step);
        good *= 2;
    }
    r.prec = field.precision();
    r.shift = 0;
    if !eval(&lifted, &r).is_zero_to_precision() {
        return Err(DescentError::HenselFailure("Newton iteration did not converge".into()));
    }
    Ok(r)
}

#[derive(Clone)]
pub struct UnramifiedElement {
    field: Arc<UnramifiedField>,
    shift: i64,
    prec: u32,
    coeffs: Vec<u64>,
}

impl UnramifiedElement {
    pub(crate) fn from_parts(field: Arc<UnramifiedField>, shift: i64, prec: u32, mut coeffs: Vec<u64>) -> Self {
        let prec = prec.min(field.precision());
        for k in 0..field.degree {
            limbs::mask_to(&mut coeffs[k * field.limbs..(k + 1) * field.limbs], prec);
        }
        UnramifiedElement { field, shift, prec, coeffs }
    }

    pub fn field(&self) -> &Arc<UnramifiedField> {
        &self.field
    }

    /// Power of 2 factored out of the stored coefficients.
    pub fn shift(&self) -> i64 {
        self.shift
    }

    /// Number of meaningful low bits of the stored coefficients.
    pub fn precision(&self) -> u32 {
        self.prec
    }

    /// Absolute 2-adic precision: the value is known modulo 2^(shift+prec).
    pub fn absolute_precision(&self) -> i64 {
        self.shift + self.prec as i64
    }

    pub(crate) fn coeff_slice(&self, k: usize) -> &[u64] {
        let n = self.field.limbs;
        &self.coeffs[k * n..(k + 1) * n]
    }

    /// Coefficient k of the stored body, as a symmetric integer representative.
    pub fn body_coeff(&self, k: usize) -> BigInt {
        limbs::to_bigint_signed(self.coeff_slice(k), self.prec)
    }

    /// Coefficient k of the stored body in [0, 2^prec).
    pub fn body_coeff_unsigned(&self, k: usize) -> BigUint {
        limbs::to_biguint(self.coeff_slice(k))
    }

    fn body_valuation(&self) -> Option<u32> {
        let n = self.field.limbs;
        (0..self.field.degree)
            .filter_map(|k| limbs::trailing_zeros(&self.coeffs[k * n..(k + 1) * n]))
            .min()
            .filter(|&v| v < self.prec)
    }

    /// Certified 2-adic valuation, or None when the element is zero to its precision.
    pub fn valuation(&self) -> Option<i64> {
        self.body_valuation().map(|v| self.shift + v as i64)
    }

    pub fn is_zero_to_precision(&self) -> bool {
        self.body_valuation().is_none()
    }

    /// Zero with at least `field precision − slack` meaningful body bits.
    pub fn is_certified_zero(&self, slack: u32) -> bool {
        self.is_zero_to_precision() && self.prec + slack >= self.field.precision()
    }

    fn check_field(&self, other: &Self) {
        assert!(
            same_field(&self.field, &other.field),
            "elements of different fields: {:?} vs {:?}",
            self.field,
            other.field
        );
    }

    /// Body coefficients multiplied by 2^k, with precision capped at N.
    fn lifted_body(&self, k: u64) -> (Vec<u64>, u32) {
        let n = self.field.limbs;
        let cap = self.field.precision();
        if k >= cap as u64 {
            return (vec![0; self.coeffs.len()], cap);
        }
        let mut c = self.coeffs.clone();
        if k > 0 {
            for i in 0..self.field.degree {
                limbs::shl_assign(&mut c[i * n..(i + 1) * n], k as u32);
            }
        }
        (c, (self.prec as u64 + k).min(cap as u64) as u32)
    }

    fn combine(&self, other: &Self, subtract: bool) -> Self {
        self.check_field(other);
        let m = self.shift.min(other.shift);
        let (mut a, pa) = self.lifted_body((self.shift - m) as u64);
        let (b, pb) = other.lifted_body((other.shift - m) as u64);
        let n = self.field.limbs;
        for i in 0..self.field.degree {
            let (x, y) = (&mut a[i * n..(i + 1) * n], &b[i * n..(i + 1) * n]);
            if subtract {
                limbs::sub_assign(x, y);
            } else {
                limbs::add_assign(x, y);
            }
        }
        Self::from_parts(self.field.clone(), m, pa.min(pb), a)
    }

    pub fn add(&self, other: &Self) -> Self {
        self.combine(other, false)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.combine(other, true)
    }

    pub fn neg(&self) -> Self {
        let n = self.field.limbs;
        let mut c = self.coeffs.clone();
        for i in 0..self.field.degree {
            limbs::neg_assign(&mut c[i * n..(i + 1) * n]);
        }
        Self::from_parts(self.field.clone(), self.shift, self.prec, c)
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.check_field(other);
        // Normalizing first keeps trailing zeros from eating the stored bits.
        let (a, b) = (self.normalized(), other.normalized());
        let va = a.body_valuation().unwrap_or(a.prec);
        let vb = b.body_valuation().unwrap_or(b.prec);
        let prec = (a.prec as u64 + vb as u64).min(b.prec as u64 + va as u64) as u32;
        let c = self.field.raw_mul(&a.coeffs, &b.coeffs);
        Self::from_parts(self.field.clone(), a.shift + b.shift, prec, c)
    }

    pub fn square(&self) -> Self {
        self.mul(self)
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut base = self.clone();
        let mut acc = self.field.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.square();
            e >>= 1;
        }
        acc
    }

    pub fn mul_i64(&self, x: i64) -> Self {
        self.mul(&self.field.from_i64(x))
    }

    /// Multiplies by 2^k exactly.
    pub fn mul_pow2(&self, k: i64) -> Self {
        let mut r = self.clone();
        r.shift += k;
        r
    }

    /// Moves common factors of 2 from the body into the shift.
    pub fn normalized(&self) -> Self {
        let Some(v) = self.body_valuation() else { return self.clone() };
        if v == 0 {
            return self.clone();
        }
        let n = self.field.limbs;
        let mut c = self.coeffs.clone();
        for i in 0..self.field.degree {
            limbs::shr_assign(&mut c[i * n..(i + 1) * n], v);
        }
        Self::from_parts(self.field.clone(), self.shift + v as i64, self.prec - v, c)
    }

    /// Drops precision to at most `prec` body bits.
    pub fn truncated(&self, prec: u32) -> Self {
        Self::from_parts(self.field.clone(), self.shift, prec.min(self.prec), self.coeffs.clone())
    }

    pub fn inverse(&self) -> Result<Self> {
        let u = self.normalized();
        if u.body_valuation() != Some(0) {
            return Err(DescentError::precision(
                self.field.precision(),
                "inverse of an element indistinguishable from zero",
            ));
        }
        let c = self.field.raw_inv_unit(&u.coeffs);
        Ok(Self::from_parts(self.field.clone(), -u.shift, u.prec, c))
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        Ok(self.mul(&other.inverse()?))
    }

    pub fn frobenius(&self) -> Self {
        let (d, n) = (self.field.degree, self.field.limbs);
        let mut out = vec![0u64; d * n];
        for k in 0..d {
            let ck = self.coeff_slice(k);
            if limbs::is_zero(ck) {
                continue;
            }
            let img = &self.field.frob[k];
            for i in 0..d {
                limbs::mul_add(&mut out[i * n..(i + 1) * n], ck, &img[i * n..(i + 1) * n]);
            }
        }
        Self::from_parts(self.field.clone(), self.shift, self.prec, out)
    }

    pub fn frobenius_pow(&self, k: usize) -> Self {
        let mut r = self.clone();
        for _ in 0..k % self.field.degree {
            r = r.frobenius();
        }
        r
    }

    /// Residue of an element of valuation ≥ 0.
    pub fn residue(&self) -> Result<u64> {
        let u = self.normalized();
        if u.shift < 0 {
            return Err(DescentError::precision(self.field.precision(), "residue of a non-integral element"));
        }
        if u.absolute_precision() < 1 {
            return Err(DescentError::precision(self.field.precision(), "residue beyond known digits"));
        }
        Ok(if u.shift > 0 || u.is_zero_to_precision() { 0 } else { self.field.raw_residue(&u.coeffs) })
    }

    pub(crate) fn residue_unchecked(&self) -> u64 {
        self.residue().unwrap_or(0)
    }

    /// Bit `i` of body coefficient `k`.
    pub(crate) fn body_bit(&self, k: usize, i: u32) -> bool {
        limbs::bit(self.coeff_slice(k), i)
    }

    /// Whether `self − other` vanishes to its known absolute precision minus `slack` bits.
    pub fn agrees_with(&self, other: &Self, slack: u32) -> bool {
        let diff = self.sub(other);
        match diff.valuation() {
            None => true,
            Some(v) => v + slack as i64 >= diff.absolute_precision(),
        }
    }

    /// Lexicographic comparison of body coefficient vectors (constant term first),
    /// each coefficient compared on its 2-adic digits from the least significant up.
    /// Unlike integer comparison this does not depend on the working precision.
    pub fn cmp_body(&self, other: &Self) -> Ordering {
        for k in 0..self.field.degree {
            let (a, b) = (self.coeff_slice(k), other.coeff_slice(k));
            let mut x: Vec<u64> = a.iter().zip(b).map(|(p, q)| p ^ q).collect();
            limbs::mask_to(&mut x, self.prec.min(other.prec));
            if let Some(i) = limbs::trailing_zeros(&x) {
                return if limbs::bit(a, i) { Ordering::Greater } else { Ordering::Less };
            }
        }
        Ordering::Equal
    }

    /// Exact rational value of a Q₂-element, read off as the symmetric representative.
    pub fn to_rational_approx(&self) -> BigRational {
        let c = self.body_coeff(0);
        if self.shift >= 0 {
            BigRational::from_integer(c << self.shift as usize)
        } else {
            BigRational::new(c, BigInt::from(1u8) << (-self.shift) as usize)
        }
    }

    /// True when every coordinate beyond the constant term vanishes to precision.
    pub fn is_rational(&self, slack: u32) -> bool {
        (1..self.field.degree).all(|k| {
            let c = self.coeff_slice(k);
            match limbs::trailing_zeros(c) {
                None => true,
                Some(v) => v >= self.prec || v + slack >= self.field.precision(),
            }
        })
    }
}

impl fmt::Debug for UnramifiedElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "2^{}·[", self.shift)?;
        for k in 0..self.field.degree {
            if k > 0 {
                write!(f, ", ")?;
            }
            let c = self.body_coeff(k);
            if c.abs() < BigInt::from(1u64 << 40) {
                write!(f, "{c}")?;
            } else {
                write!(f, "~{}b", c.bits())?;
            }
        }
        write!(f, "] (prec {})", self.prec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn q2(n: u32) -> Arc<UnramifiedField> {
        UnramifiedField::new(1, n)
    }

    #[test]
    fn rational_round_trip() {
        let k = q2(128);
        let x = k.from_rational(&BigRational::new(BigInt::from(-12), BigInt::from(40)));
        assert_eq!(x.valuation(), Some(-1));
        let back = x.mul(&k.from_i64(10));
        assert!(back.agrees_with(&k.from_i64(-3), 0));
        assert_eq!(back.to_rational_approx(), BigRational::from_integer(BigInt::from(-3)));
    }

    #[test]
    fn precision_tracks_through_addition() {
        let k = q2(128);
        let a = k.from_i64(3).mul_pow2(-5);
        let b = k.from_i64(1).mul_pow2(3);
        let s = a.add(&b);
        assert_eq!(s.shift(), -5);
        assert_eq!(s.precision(), 128);
        assert_eq!(s.valuation(), Some(-5));
        let t = k.from_i64(8).sub(&k.from_i64(8));
        assert!(t.is_zero_to_precision());
        assert_eq!(t.valuation(), None);
    }

    #[test]
    fn inverse_of_unit_and_nonunit() {
        let u2 = UnramifiedField::new(2, 192);
        let x = u2.generator().add(&u2.from_i64(6));
        let y = x.mul_pow2(3);
        let yi = y.inverse().unwrap();
        assert!(y.mul(&yi).agrees_with(&u2.one(), 0));
        assert!(u2.zero().inverse().is_err());
    }

    #[test]
    fn frobenius_order_and_fixed_field() {
        for d in 1..=4 {
            let k = UnramifiedField::new(d, 256);
            let x = k.generator().add(&k.from_i64(5)).mul(&k.generator().add(&k.from_i64(-2)));
            let mut y = x.clone();
            for _ in 0..d {
                y = y.frobenius();
            }
            assert!(y.agrees_with(&x, 0), "frobenius^{d} != id");
            let r = k.from_i64(-77);
            assert!(r.frobenius().agrees_with(&r, 0));
            // Frobenius is a ring homomorphism.
            let z = k.generator().pow(3).add(&k.from_i64(9));
            assert!(x.mul(&z).frobenius().agrees_with(&x.frobenius().mul(&z.frobenius()), 0));
        }
    }

    #[test]
    fn teichmuller_generator_in_u2() {
        // The generator of U₂ = Z₂[x]/(x²+x+1) is a primitive cube root of unity.
        let u2 = UnramifiedField::new(2, 256);
        let t = u2.generator();
        assert!(t.pow(3).agrees_with(&u2.one(), 0));
        assert!(t.frobenius().agrees_with(&t.square(), 0));
    }

    #[test]
    fn residue_reduction() {
        let u3 = UnramifiedField::new(3, 64);
        let x = u3.from_coeffs(&[BigInt::from(3), BigInt::from(4), BigInt::from(-1)]);
        assert_eq!(x.residue().unwrap(), 0b101);
        assert!(x.mul_pow2(-1).residue().is_err());
        assert_eq!(x.mul_pow2(1).residue().unwrap(), 0);
    }

    #[test]
    fn newton_root_of_quadratic() {
        let u2 = UnramifiedField::new(2, 256);
        // x² + x + 1 over U₂: roots reduce to the two non-trivial residues.
        let poly = [BigInt::from(1), BigInt::from(1), BigInt::from(1)];
        let r = newton_root(&u2, &poly, 0b10).unwrap();
        let v = r.square().add(&r).add(&u2.one());
        assert!(v.is_certified_zero(0));
        assert!(newton_root(&u2, &[BigInt::from(1), BigInt::from(0), BigInt::from(1)], 1).is_err());
    }
}
