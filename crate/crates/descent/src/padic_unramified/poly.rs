//! Polynomials over F_{2^d} and over U_d, root lifting and quadratic Hensel factorization.

use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;

use super::field::{newton_root, UnramifiedElement, UnramifiedField};
use super::residue::{self, ResidueField};
use crate::error::{DescentError, Result};

/// Polynomial over F_{2^d}, ascending coefficients, no trailing zeros.
type ResPoly = Vec<u64>;

fn rp_trim(mut p: ResPoly) -> ResPoly {
    while p.last() == Some(&0) {
        p.pop();
    }
    p
}

fn rp_add(a: &[u64], b: &[u64]) -> ResPoly {
    let n = a.len().max(b.len());
    rp_trim((0..n).map(|i| a.get(i).copied().unwrap_or(0) ^ b.get(i).copied().unwrap_or(0)).collect())
}

fn rp_mul(k: &ResidueField, a: &[u64], b: &[u64]) -> ResPoly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] ^= k.mul(x, y);
        }
    }
    rp_trim(out)
}

fn rp_divrem(k: &ResidueField, a: &[u64], b: &[u64]) -> (ResPoly, ResPoly) {
    let b = rp_trim(b.to_vec());
    assert!(!b.is_empty(), "division by the zero polynomial");
    let mut r = rp_trim(a.to_vec());
    if r.len() < b.len() {
        return (Vec::new(), r);
    }
    let inv = k.inv(*b.last().unwrap());
    let mut q = vec![0u64; r.len() - b.len() + 1];
    while r.len() >= b.len() {
        let s = r.len() - b.len();
        let c = k.mul(*r.last().unwrap(), inv);
        q[s] = c;
        for (i, &bi) in b.iter().enumerate() {
            r[s + i] ^= k.mul(c, bi);
        }
        r = rp_trim(r);
    }
    (rp_trim(q), r)
}

/// Returns (g, s, t) with s·a + t·b = g and g monic.
fn rp_xgcd(k: &ResidueField, a: &[u64], b: &[u64]) -> (ResPoly, ResPoly, ResPoly) {
    let (mut r0, mut r1) = (rp_trim(a.to_vec()), rp_trim(b.to_vec()));
    let (mut s0, mut s1) = (vec![1u64], Vec::new());
    let (mut t0, mut t1) = (Vec::new(), vec![1u64]);
    while !r1.is_empty() {
        let (q, r) = rp_divrem(k, &r0, &r1);
        let s2 = rp_add(&s0, &rp_mul(k, &q, &s1));
        let t2 = rp_add(&t0, &rp_mul(k, &q, &t1));
        r0 = std::mem::replace(&mut r1, r);
        s0 = std::mem::replace(&mut s1, s2);
        t0 = std::mem::replace(&mut t1, t2);
    }
    let lc = *r0.last().expect("gcd of two zero polynomials");
    let inv = k.inv(lc);
    let scale = |p: &[u64]| rp_trim(p.iter().map(|&c| k.mul(c, inv)).collect());
    (scale(&r0), scale(&s0), scale(&t0))
}

/// Polynomial over U_d, ascending coefficients.
pub type UPoly = Vec<UnramifiedElement>;

pub fn upoly_from_ints(field: &Arc<UnramifiedField>, coeffs: &[BigInt]) -> UPoly {
    coeffs.iter().map(|c| field.from_bigint(c)).collect()
}

fn up_from_res(field: &Arc<UnramifiedField>, p: &[u64]) -> UPoly {
    p.iter().map(|&c| field.from_residue(c)).collect()
}

fn up_add(field: &Arc<UnramifiedField>, a: &[UnramifiedElement], b: &[UnramifiedElement]) -> UPoly {
    let n = a.len().max(b.len());
    let z = field.zero();
    (0..n).map(|i| a.get(i).unwrap_or(&z).add(b.get(i).unwrap_or(&z))).collect()
}

fn up_sub(field: &Arc<UnramifiedField>, a: &[UnramifiedElement], b: &[UnramifiedElement]) -> UPoly {
    let n = a.len().max(b.len());
    let z = field.zero();
    (0..n).map(|i| a.get(i).unwrap_or(&z).sub(b.get(i).unwrap_or(&z))).collect()
}

pub fn up_mul(field: &Arc<UnramifiedField>, a: &[UnramifiedElement], b: &[UnramifiedElement]) -> UPoly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![field.zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] = out[i + j].add(&x.mul(y));
        }
    }
    out
}

/// Division by a monic polynomial.
fn up_divrem_monic(field: &Arc<UnramifiedField>, a: &[UnramifiedElement], h: &[UnramifiedElement]) -> (UPoly, UPoly) {
    let dh = h.len() - 1;
    if a.len() <= dh {
        return (Vec::new(), a.to_vec());
    }
    let mut r = a.to_vec();
    let mut q = vec![field.zero(); a.len() - dh];
    for s in (0..q.len()).rev() {
        let c = r[s + dh].clone();
        for (i, hi) in h.iter().enumerate() {
            r[s + i] = r[s + i].sub(&c.mul(hi));
        }
        q[s] = c;
    }
    r.truncate(dh);
    (q, r)
}

fn truncate(mut p: UPoly, len: usize, field: &Arc<UnramifiedField>) -> UPoly {
    p.resize(len, field.zero());
    p
}

/// Integer polynomial reduced mod 2, as an F₂ bitmask.
pub fn reduce_mod2(coeffs: &[BigInt]) -> u64 {
    assert!(coeffs.len() <= 64, "polynomial degree too large for a bitmask");
    coeffs.iter().enumerate().fold(0, |acc, (k, c)| acc | ((c.is_odd() as u64) << k))
}

/// Lifts the roots of an irreducible factor of Q̄ to roots of Q in U_d, d = deg factor.
/// Returns the field and the root lifting the smallest residue root.
pub fn lift_residue_roots(
    qbar_factor: u64,
    q: &[BigInt],
    precision: u32,
) -> Result<(Arc<UnramifiedField>, UnramifiedElement)> {
    if !residue::is_irreducible(qbar_factor) {
        return Err(DescentError::ReducibleModulus);
    }
    let d = residue::degree(qbar_factor as u128) as u32;
    let field = UnramifiedField::new(d, precision);
    let roots = field.residue_field().roots_of_f2_poly(qbar_factor);
    let root = newton_root(&field, q, roots[0])?;
    Ok((field, root))
}

/// A monic quadratic x² + b·x + c.
#[derive(Clone, Debug)]
pub struct QuadraticFactor {
    pub b: UnramifiedElement,
    pub c: UnramifiedElement,
}

impl QuadraticFactor {
    pub fn as_poly(&self, field: &Arc<UnramifiedField>) -> UPoly {
        vec![self.c.clone(), self.b.clone(), field.one()]
    }

    pub fn frobenius(&self) -> QuadraticFactor {
        QuadraticFactor { b: self.b.frobenius(), c: self.c.frobenius() }
    }
}

#[derive(Clone, Debug)]
pub struct QuadraticFactorization {
    pub leading: BigInt,
    /// One factor per residue root, in the order the roots were given.
    pub factors: Vec<QuadraticFactor>,
}

/// One quadratic Hensel step (von zur Gathen–Gerhard): from f ≡ g·h and s·g + t·h ≡ 1 mod m
/// to the same relations mod m², with h monic.
fn hensel_step(
    field: &Arc<UnramifiedField>,
    f: &[UnramifiedElement],
    g: &mut UPoly,
    h: &mut UPoly,
    s: &mut UPoly,
    t: &mut UPoly,
) {
    let (lg, lh) = (g.len(), h.len());
    let e = up_sub(field, f, &up_mul(field, g, h));
    let (q, r) = up_divrem_monic(field, &up_mul(field, s, &e), h);
    let g_new = truncate(up_add(field, g, &up_add(field, &up_mul(field, t, &e), &up_mul(field, &q, g))), lg, field);
    let mut h_new = up_add(field, h, &r);
    h_new.truncate(lh);
    let one = vec![field.one()];
    let b = up_sub(field, &up_add(field, &up_mul(field, s, &g_new), &up_mul(field, t, &h_new)), &one);
    let (c, d) = up_divrem_monic(field, &up_mul(field, s, &b), &h_new);
    let s_new = truncate(up_sub(field, s, &d), lh - 1, field);
    let t_new =
        truncate(up_sub(field, &up_sub(field, t, &up_mul(field, t, &b)), &up_mul(field, &c, &g_new)), lg - 1, field);
    *g = g_new;
    *h = h_new;
    *s = s_new;
    *t = t_new;
}

/// Factors f ≡ c·∏(x − β̄ᵢ)² mod 2 into monic quadratics qᵢ ≡ (x − β̄ᵢ)² mod 2 over U_D,
/// exact modulo 2^N.
pub fn hensel_quadratic_factors(
    f: &[BigInt],
    field: &Arc<UnramifiedField>,
    residue_roots: &[u64],
) -> Result<QuadraticFactorization> {
    let k = field.residue_field().clone();
    let mut sorted = residue_roots.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != residue_roots.len() {
        return Err(DescentError::HenselFailure("residue roots collide".into()));
    }
    let deg = f.len() - 1;
    if deg != 2 * residue_roots.len() || f[deg].is_even() {
        return Err(DescentError::HenselFailure(
            "degree or leading coefficient incompatible with the root data".into(),
        ));
    }
    let fbar: ResPoly = rp_trim(f.iter().map(|c| c.is_odd() as u64).collect());
    let f_up = upoly_from_ints(field, f);
    let mut factors = Vec::with_capacity(residue_roots.len());
    for &beta in residue_roots {
        let h0: ResPoly = vec![k.square(beta), 0, 1];
        let (g0, rem) = rp_divrem(&k, &fbar, &h0);
        if !rem.is_empty() {
            return Err(DescentError::HenselFailure(format!("(x − {beta:#b})² does not divide f mod 2")));
        }
        let (gcd, s0, t0) = rp_xgcd(&k, &g0, &h0);
        if gcd != vec![1] {
            return Err(DescentError::HenselFailure("repeated residue root".into()));
        }
        let mut g = truncate(up_from_res(field, &g0), deg - 1, field);
        let mut h = up_from_res(field, &h0);
        let mut s = truncate(up_from_res(field, &s0), 2, field);
        let mut t = truncate(up_from_res(field, &t0), deg - 2, field);
        let mut good = 1u32;
        while good < field.precision() {
            hensel_step(field, &f_up, &mut g, &mut h, &mut s, &mut t);
            good *= 2;
        }
        factors.push(QuadraticFactor { b: h[1].clone(), c: h[0].clone() });
    }
    let fact = QuadraticFactorization { leading: f[deg].clone(), factors };
    verify_product(f, field, &fact)?;
    Ok(fact)
}

/// Checks c·∏qᵢ ≡ f mod 2^N.
pub fn verify_product(f: &[BigInt], field: &Arc<UnramifiedField>, fact: &QuadraticFactorization) -> Result<()> {
    let mut prod = vec![field.from_bigint(&fact.leading)];
    for q in &fact.factors {
        prod = up_mul(field, &prod, &q.as_poly(field));
    }
    let f_up = upoly_from_ints(field, f);
    if prod.len() != f_up.len() || prod.iter().zip(&f_up).any(|(a, b)| !a.sub(b).is_certified_zero(0)) {
        return Err(DescentError::HenselFailure("product of quadratic factors differs from f".into()));
    }
    Ok(())
}

/// Evaluates an integer polynomial at an element.
pub fn eval_int_poly(field: &Arc<UnramifiedField>, coeffs: &[BigInt], x: &UnramifiedElement) -> UnramifiedElement {
    let mut acc = field.zero();
    for c in coeffs.iter().rev() {
        acc = acc.mul(x).add(&field.from_bigint(c));
    }
    acc
}

/// Whether q ≡ (x − β)² mod 4.
pub fn congruent_to_square_mod4(q: &QuadraticFactor, beta: &UnramifiedElement) -> bool {
    let b_check = q.b.add(&beta.mul_pow2(1));
    let c_check = q.c.sub(&beta.square());
    [b_check, c_check].iter().all(|x| x.valuation().is_none_or(|v| v >= 2))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn residue_xgcd() {
        let k = ResidueField::new(0b111).unwrap();
        let a = vec![1, 1, 1]; // x² + x + 1
        let b = vec![0, 1]; // x
        let (g, s, t) = rp_xgcd(&k, &a, &b);
        assert_eq!(g, vec![1]);
        assert_eq!(rp_add(&rp_mul(&k, &s, &a), &rp_mul(&k, &t, &b)), vec![1]);
    }

    #[test]
    fn lift_root_of_cube_root_factor() {
        // Q = x² + x + 1: the lifted root is a primitive cube root of unity.
        let q = ints(&[1, 1, 1]);
        let (u2, beta) = lift_residue_roots(0b111, &q, 256).unwrap();
        assert_eq!(u2.degree(), 2);
        assert!(eval_int_poly(&u2, &q, &beta).is_certified_zero(0));
        assert!(beta.pow(3).agrees_with(&u2.one(), 0));
        assert!(lift_residue_roots(0b101, &q, 256).is_err());
    }

    #[test]
    fn lift_rational_root() {
        // Q = x³ + x² + x has the root 0 exactly.
        let q = ints(&[0, 1, 1, 1]);
        let (q2, beta) = lift_residue_roots(0b10, &q, 128).unwrap();
        assert_eq!(q2.degree(), 1);
        assert!(beta.is_zero_to_precision());
    }

    fn check_factorization(f: &[i64], q: &[i64], n: u32) {
        let f = ints(f);
        let q = ints(q);
        let qbar = reduce_mod2(&q);
        let d = residue::factor(qbar)
            .iter()
            .fold(1u32, |acc, &(p, _)| num_integer::lcm(acc, residue::degree(p as u128) as u32));
        let field = UnramifiedField::new(d, n);
        let roots = field.residue_field().roots_of_f2_poly(qbar);
        let fact = hensel_quadratic_factors(&f, &field, &roots).unwrap();
        assert_eq!(fact.factors.len(), roots.len());
        for (qf, &r) in fact.factors.iter().zip(&roots) {
            let beta = newton_root(&field, &q, r).unwrap();
            assert!(congruent_to_square_mod4(qf, &beta));
        }
    }

    #[test]
    fn quadratic_factors_of_shifted_216663_model() {
        // f′ = −3x⁶+6x⁵−13x⁴+14x³−7x²+4x, Q′ = x³+x²+x
        check_factorization(&[0, 4, -7, 14, -13, 6, -3], &[0, 1, 1, 1], 256);
    }

    #[test]
    fn quadratic_factors_of_q_squared_plus_four() {
        // f = (x²+x+1)² + 4 at N = 64 (the smallest limb size covers 2^10)
        check_factorization(&[5, 2, 3, 2, 1], &[1, 1, 1], 64);
    }

    #[test]
    fn frobenius_permutes_factors() {
        let f = ints(&[0, 4, -7, 14, -13, 6, -3]);
        let field = UnramifiedField::new(2, 256);
        let roots = field.residue_field().roots_of_f2_poly(0b1110);
        let fact = hensel_quadratic_factors(&f, &field, &roots).unwrap();
        // roots are 0, x, x+1 in F₄; Frobenius swaps the last two.
        let phi1 = fact.factors[1].frobenius();
        assert!(phi1.b.agrees_with(&fact.factors[2].b, 0));
        assert!(phi1.c.agrees_with(&fact.factors[2].c, 0));
        let phi0 = fact.factors[0].frobenius();
        assert!(phi0.c.agrees_with(&fact.factors[0].c, 0));
    }

    #[test]
    fn colliding_roots_fail() {
        let f = ints(&[0, 4, -7, 14, -13, 6, -3]);
        let field = UnramifiedField::new(2, 128);
        let err = hensel_quadratic_factors(&f, &field, &[0, 0, 2]).unwrap_err();
        assert!(matches!(err, DescentError::HenselFailure(_)));
    }
}
