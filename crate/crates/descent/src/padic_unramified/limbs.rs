//! Arithmetic on little-endian u64 limb slices modulo 2^(64·len).

use num_bigint::{BigInt, BigUint, Sign};
use num_traits::Zero;

pub(crate) fn zero(n: usize) -> Vec<u64> {
    vec![0; n]
}

pub(crate) fn from_u64(x: u64, n: usize) -> Vec<u64> {
    let mut v = zero(n);
    v[0] = x;
    v
}

pub(crate) fn from_i64(x: i64, n: usize) -> Vec<u64> {
    let mut v = from_u64(x.unsigned_abs(), n);
    if x < 0 {
        neg_assign(&mut v);
    }
    v
}

pub(crate) fn from_biguint(x: &BigUint, n: usize) -> Vec<u64> {
    let mut v = zero(n);
    for (dst, src) in v.iter_mut().zip(x.iter_u64_digits()) {
        *dst = src;
    }
    v
}

pub(crate) fn from_bigint(x: &BigInt, n: usize) -> Vec<u64> {
    let mut v = from_biguint(x.magnitude(), n);
    if x.sign() == Sign::Minus {
        neg_assign(&mut v);
    }
    v
}

pub(crate) fn to_biguint(a: &[u64]) -> BigUint {
    let mut bytes = Vec::with_capacity(a.len() * 8);
    for w in a {
        bytes.extend_from_slice(&w.to_le_bytes());
    }
    BigUint::from_bytes_le(&bytes)
}

/// Symmetric representative in (−2^(bits−1), 2^(bits−1)].
pub(crate) fn to_bigint_signed(a: &[u64], bits: u32) -> BigInt {
    let mut m = a.to_vec();
    mask_to(&mut m, bits);
    let u = BigInt::from(to_biguint(&m));
    if bits == 0 {
        return BigInt::zero();
    }
    let half = BigInt::from(1u8) << (bits - 1);
    if u > half {
        u - (BigInt::from(1u8) << bits)
    } else {
        u
    }
}

pub(crate) fn is_zero(a: &[u64]) -> bool {
    a.iter().all(|&w| w == 0)
}

pub(crate) fn bit(a: &[u64], i: u32) -> bool {
    let w = (i / 64) as usize;
    w < a.len() && (a[w] >> (i % 64)) & 1 == 1
}

pub(crate) fn trailing_zeros(a: &[u64]) -> Option<u32> {
    for (k, &w) in a.iter().enumerate() {
        if w != 0 {
            return Some(k as u32 * 64 + w.trailing_zeros());
        }
    }
    None
}

/// Clears every bit at position `bits` or above.
pub(crate) fn mask_to(a: &mut [u64], bits: u32) {
    let full = (bits / 64) as usize;
    let rem = bits % 64;
    for (k, w) in a.iter_mut().enumerate() {
        if k > full || (k == full && rem == 0) {
            *w = 0;
        } else if k == full {
            *w &= (1u64 << rem) - 1;
        }
    }
}

pub(crate) fn add_assign(a: &mut [u64], b: &[u64]) {
    let mut carry = false;
    for (x, &y) in a.iter_mut().zip(b) {
        let (s1, c1) = x.overflowing_add(y);
        let (s2, c2) = s1.overflowing_add(carry as u64);
        *x = s2;
        carry = c1 || c2;
    }
}

pub(crate) fn sub_assign(a: &mut [u64], b: &[u64]) {
    let mut borrow = false;
    for (x, &y) in a.iter_mut().zip(b) {
        let (d1, b1) = x.overflowing_sub(y);
        let (d2, b2) = d1.overflowing_sub(borrow as u64);
        *x = d2;
        borrow = b1 || b2;
    }
}

pub(crate) fn neg_assign(a: &mut [u64]) {
    let mut carry = true;
    for x in a.iter_mut() {
        let (s, c) = (!*x).overflowing_add(carry as u64);
        *x = s;
        carry = c;
    }
}

/// `out += a·b` truncated to `out.len()` limbs.
pub(crate) fn mul_add(out: &mut [u64], a: &[u64], b: &[u64]) {
    let n = out.len();
    let la = a.iter().rposition(|&w| w != 0).map_or(0, |p| p + 1);
    let lb = b.iter().rposition(|&w| w != 0).map_or(0, |p| p + 1);
    for i in 0..la.min(n) {
        let ai = a[i] as u128;
        if ai == 0 {
            continue;
        }
        let mut carry: u128 = 0;
        for j in 0..lb.min(n - i) {
            let t = ai * b[j] as u128 + out[i + j] as u128 + carry;
            out[i + j] = t as u64;
            carry = t >> 64;
        }
        let mut k = i + lb.min(n - i);
        while carry != 0 && k < n {
            let t = out[k] as u128 + carry;
            out[k] = t as u64;
            carry = t >> 64;
            k += 1;
        }
    }
}

pub(crate) fn mul(a: &[u64], b: &[u64]) -> Vec<u64> {
    let mut out = zero(a.len());
    mul_add(&mut out, a, b);
    out
}

pub(crate) fn shl_assign(a: &mut [u64], k: u32) {
    let n = a.len();
    let words = (k / 64) as usize;
    let bits = k % 64;
    if words >= n {
        a.iter_mut().for_each(|w| *w = 0);
        return;
    }
    for i in (0..n).rev() {
        let src = i as isize - words as isize;
        let hi = if src >= 0 { a[src as usize] << bits } else { 0 };
        let lo = if bits > 0 && src >= 1 { a[src as usize - 1] >> (64 - bits) } else { 0 };
        a[i] = hi | lo;
    }
}

pub(crate) fn shr_assign(a: &mut [u64], k: u32) {
    let n = a.len();
    let words = (k / 64) as usize;
    let bits = k % 64;
    if words >= n {
        a.iter_mut().for_each(|w| *w = 0);
        return;
    }
    for i in 0..n {
        let src = i + words;
        let lo = if src < n { a[src] >> bits } else { 0 };
        let hi = if bits > 0 && src + 1 < n { a[src + 1] << (64 - bits) } else { 0 };
        a[i] = lo | hi;
    }
}

/// Inverse of an odd number modulo 2^(64·len).
pub(crate) fn inv_odd(a: &[u64]) -> Vec<u64> {
    assert!(a[0] & 1 == 1, "inverse of an even number");
    let n = a.len();
    // a·a ≡ 1 mod 8; each Newton step doubles the correct bits.
    let mut x = a.to_vec();
    let mut good = 3u32;
    let two = from_u64(2, n);
    while good < 64 * n as u32 {
        let ax = mul(a, &x);
        let mut t = two.clone();
        sub_assign(&mut t, &ax);
        x = mul(&x, &t);
        good *= 2;
    }
    x
}
