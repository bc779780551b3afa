//! The inclusion U_m ⊂ U_D for m | D, and coordinate extraction back to U_m.

use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;

use super::field::{UnramifiedElement, UnramifiedField};
use crate::error::{DescentError, Result};

#[derive(Clone, Debug)]
pub struct SubfieldEmbedding {
    small: Arc<UnramifiedField>,
    big: Arc<UnramifiedField>,
    /// Images of xᵏ, k < m.
    basis_images: Vec<UnramifiedElement>,
    /// Coordinates of U_D read to recover U_m coordinates.
    pivot_rows: Vec<usize>,
    /// Inverse of the pivot minor modulo 2^N.
    inverse: Vec<Vec<BigInt>>,
}

fn modulus(bits: u32) -> BigInt {
    BigInt::from(1u8) << bits
}

/// Inverts a square integer matrix modulo 2^bits; it must be invertible mod 2.
fn invert_mod_pow2(a: &[Vec<BigInt>], bits: u32) -> Option<Vec<Vec<BigInt>>> {
    let n = a.len();
    let m = modulus(bits);
    let mut aug: Vec<Vec<BigInt>> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r: Vec<BigInt> = row.iter().map(|x| x.mod_floor(&m)).collect();
            r.extend((0..n).map(|j| BigInt::from((i == j) as u8)));
            r
        })
        .collect();
    for col in 0..n {
        let p = (col..n).find(|&r| aug[r][col].is_odd())?;
        aug.swap(col, p);
        // Newton x ← x(2 − a·x) from x = a, which is correct to 3 bits.
        let a = aug[col][col].clone();
        let mut inv = a.clone();
        let mut good = 3;
        while good < bits {
            inv = (&inv * (BigInt::from(2) - &a * &inv)).mod_floor(&m);
            good *= 2;
        }
        for v in aug[col].iter_mut() {
            *v = (&*v * &inv).mod_floor(&m);
        }
        let pivot = aug[col].clone();
        for r in 0..n {
            if r != col && !aug[r][col].is_zero() {
                let factor = aug[r][col].clone();
                for (v, p) in aug[r].iter_mut().zip(&pivot) {
                    *v = (&*v - &factor * p).mod_floor(&m);
                }
            }
        }
    }
    Some(aug.into_iter().map(|r| r[n..].to_vec()).collect())
}

impl SubfieldEmbedding {
    pub fn new(small: &Arc<UnramifiedField>, big: &Arc<UnramifiedField>) -> Result<Self> {
        let (m, d) = (small.degree(), big.degree());
        if d % m != 0 || small.precision() != big.precision() {
            return Err(DescentError::DimensionMismatch { expected: d, found: m });
        }
        let roots = big.residue_field().roots_of_f2_poly(small.modulus());
        let gen = big.lift_root_of_f2_poly(small.modulus(), roots[0])?;
        let mut basis_images = Vec::with_capacity(m);
        let mut acc = big.one();
        for _ in 0..m {
            basis_images.push(acc.clone());
            acc = acc.mul(&gen);
        }
        // Greedily pick m coordinates of U_D on which the images are independent mod 2.
        let mut pivot_rows = Vec::new();
        let mut echelon: Vec<(u64, usize)> = Vec::new();
        for row in 0..d {
            let mut bits: u64 = (0..m).fold(0, |acc, k| acc | ((basis_images[k].body_bit(row, 0) as u64) << k));
            for &(r, lead) in &echelon {
                if (bits >> lead) & 1 == 1 {
                    bits ^= r;
                }
            }
            if bits != 0 {
                echelon.push((bits, bits.trailing_zeros() as usize));
                pivot_rows.push(row);
                if pivot_rows.len() == m {
                    break;
                }
            }
        }
        let minor: Vec<Vec<BigInt>> = pivot_rows
            .iter()
            .map(|&row| basis_images.iter().map(|b| BigInt::from(b.body_coeff_unsigned(row))).collect())
            .collect();
        let inverse = invert_mod_pow2(&minor, big.precision())
            .ok_or_else(|| DescentError::HenselFailure("subfield basis is singular mod 2".into()))?;
        Ok(SubfieldEmbedding { small: small.clone(), big: big.clone(), basis_images, pivot_rows, inverse })
    }

    pub fn small(&self) -> &Arc<UnramifiedField> {
        &self.small
    }

    pub fn big(&self) -> &Arc<UnramifiedField> {
        &self.big
    }

    pub fn embed(&self, y: &UnramifiedElement) -> UnramifiedElement {
        let mut acc = self.big.zero().mul_pow2(y.shift()).truncated(y.precision());
        for (k, img) in self.basis_images.iter().enumerate() {
            let c = self.big.from_bigint(&y.body_coeff(k)).mul_pow2(y.shift()).truncated(y.precision());
            acc = acc.add(&c.mul(img));
        }
        acc
    }

    /// The U_m-element equal to z, or an error when z is not in U_m to within `slack` bits.
    pub fn extract(&self, z: &UnramifiedElement, slack: u32) -> Result<UnramifiedElement> {
        let rhs: Vec<BigInt> = self.pivot_rows.iter().map(|&r| BigInt::from(z.body_coeff_unsigned(r))).collect();
        let m = modulus(self.big.precision());
        let coeffs: Vec<BigInt> = self
            .inverse
            .iter()
            .map(|row| row.iter().zip(&rhs).map(|(a, b)| a * b).sum::<BigInt>().mod_floor(&m))
            .collect();
        let y = self.small.from_coeffs(&coeffs).mul_pow2(z.shift()).truncated(z.precision());
        if !self.embed(&y).agrees_with(z, slack) {
            return Err(DescentError::precision(self.big.precision(), "value does not lie in the expected subfield"));
        }
        Ok(y)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_mod_pow2() {
        let a = vec![vec![BigInt::from(3), BigInt::from(2)], vec![BigInt::from(4), BigInt::from(1)]];
        let inv = invert_mod_pow2(&a, 64).unwrap();
        let m = modulus(64);
        for i in 0..2 {
            for j in 0..2 {
                let v: BigInt = (0..2).map(|k| &a[i][k] * &inv[k][j]).sum::<BigInt>().mod_floor(&m);
                assert_eq!(v, BigInt::from((i == j) as u8));
            }
        }
        assert!(invert_mod_pow2(&[vec![BigInt::from(2)]], 64).is_none());
    }

    #[test]
    fn embedding_is_a_ring_map_compatible_with_frobenius() {
        for (m, d) in [(1, 2), (2, 4), (1, 3), (3, 6), (2, 2)] {
            let small = UnramifiedField::new(m, 128);
            let big = UnramifiedField::new(d, 128);
            let e = SubfieldEmbedding::new(&small, &big).unwrap();
            let x = small.generator().add(&small.from_i64(3));
            let y = small.generator().square().sub(&small.from_i64(7)).mul_pow2(-2);
            assert!(e.embed(&x.mul(&y)).agrees_with(&e.embed(&x).mul(&e.embed(&y)), 0));
            assert!(e.embed(&x.frobenius()).agrees_with(&e.embed(&x).frobenius(), 0));
            let back = e.extract(&e.embed(&y), 0).unwrap();
            assert!(back.agrees_with(&y, 0));
        }
    }

    #[test]
    fn extraction_rejects_elements_outside() {
        let small = UnramifiedField::new(1, 128);
        let big = UnramifiedField::new(2, 128);
        let e = SubfieldEmbedding::new(&small, &big).unwrap();
        assert!(e.extract(&big.generator(), 0).is_err());
        // Norms from U₂ land in Q₂.
        let z = big.generator().add(&big.from_i64(2));
        let norm = z.mul(&z.frobenius());
        assert!(e.extract(&norm, 0).is_ok());
    }
}
