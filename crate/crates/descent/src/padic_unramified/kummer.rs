//! Multi-quadratic algebras U[y₁,…,y_k]/(yᵢ² − δᵢ) over an unramified field.
//!
//! An element is a vector of 2^k coefficients indexed by subsets S ⊆ {1..k},
//! the coefficient of y_S = ∏_{i∈S} yᵢ.

use std::sync::Arc;

use super::field::{UnramifiedElement, UnramifiedField};
use crate::error::Result;

#[derive(Clone, Debug)]
pub struct KummerAlgebra {
    field: Arc<UnramifiedField>,
    radicands: Vec<UnramifiedElement>,
    /// ∏_{i∈S} δᵢ for every subset mask S.
    subset_products: Vec<UnramifiedElement>,
}

#[derive(Clone, Debug)]
pub struct KummerElement {
    coeffs: Vec<UnramifiedElement>,
}

impl KummerElement {
    pub fn coeff(&self, subset: usize) -> &UnramifiedElement {
        &self.coeffs[subset]
    }

    pub fn coeffs(&self) -> &[UnramifiedElement] {
        &self.coeffs
    }
}

impl KummerAlgebra {
    pub fn new(field: &Arc<UnramifiedField>, radicands: Vec<UnramifiedElement>) -> Self {
        let k = radicands.len();
        assert!(k <= 8, "too many radicands");
        let mut subset_products = vec![field.one(); 1 << k];
        for s in 1..(1usize << k) {
            let low = s.trailing_zeros() as usize;
            subset_products[s] = subset_products[s & (s - 1)].mul(&radicands[low]);
        }
        KummerAlgebra { field: field.clone(), radicands, subset_products }
    }

    pub fn field(&self) -> &Arc<UnramifiedField> {
        &self.field
    }

    pub fn rank(&self) -> usize {
        self.radicands.len()
    }

    pub fn radicands(&self) -> &[UnramifiedElement] {
        &self.radicands
    }

    fn size(&self) -> usize {
        1 << self.rank()
    }

    pub fn scalar(&self, c: &UnramifiedElement) -> KummerElement {
        let mut coeffs = vec![self.field.zero(); self.size()];
        coeffs[0] = c.clone();
        KummerElement { coeffs }
    }

    pub fn zero(&self) -> KummerElement {
        self.scalar(&self.field.zero())
    }

    pub fn one(&self) -> KummerElement {
        self.scalar(&self.field.one())
    }

    /// c·y_S.
    pub fn monomial(&self, subset: usize, c: &UnramifiedElement) -> KummerElement {
        let mut coeffs = vec![self.field.zero(); self.size()];
        coeffs[subset] = c.clone();
        KummerElement { coeffs }
    }

    pub fn from_coeffs(&self, coeffs: Vec<UnramifiedElement>) -> KummerElement {
        assert_eq!(coeffs.len(), self.size());
        KummerElement { coeffs }
    }

    pub fn add(&self, a: &KummerElement, b: &KummerElement) -> KummerElement {
        KummerElement { coeffs: a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| x.add(y)).collect() }
    }

    pub fn sub(&self, a: &KummerElement, b: &KummerElement) -> KummerElement {
        KummerElement { coeffs: a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| x.sub(y)).collect() }
    }

    pub fn add_scalar(&self, a: &KummerElement, c: &UnramifiedElement) -> KummerElement {
        let mut r = a.clone();
        r.coeffs[0] = r.coeffs[0].add(c);
        r
    }

    pub fn scale(&self, a: &KummerElement, c: &UnramifiedElement) -> KummerElement {
        KummerElement { coeffs: a.coeffs.iter().map(|x| x.mul(c)).collect() }
    }

    pub fn mul(&self, a: &KummerElement, b: &KummerElement) -> KummerElement {
        let n = self.size();
        if n == 1 {
            return KummerElement { coeffs: vec![a.coeffs[0].mul(&b.coeffs[0])] };
        }
        // Group products by the overlap S∩T so each radicand product is applied once.
        let mut by_overlap: Vec<Vec<Option<UnramifiedElement>>> = vec![vec![None; n]; n];
        for s in 0..n {
            if a.coeffs[s].is_zero_to_precision() && a.coeffs[s].precision() >= self.field.precision() {
                continue;
            }
            for t in 0..n {
                let p = a.coeffs[s].mul(&b.coeffs[t]);
                let slot = &mut by_overlap[s & t][s ^ t];
                *slot = Some(match slot.take() {
                    Some(acc) => acc.add(&p),
                    None => p,
                });
            }
        }
        let mut coeffs = vec![self.field.zero(); n];
        for (overlap, row) in by_overlap.into_iter().enumerate() {
            for (target, term) in row.into_iter().enumerate() {
                if let Some(term) = term {
                    let term = if overlap == 0 { term } else { term.mul(&self.subset_products[overlap]) };
                    coeffs[target] = coeffs[target].add(&term);
                }
            }
        }
        KummerElement { coeffs }
    }

    pub fn square(&self, a: &KummerElement) -> KummerElement {
        self.mul(a, a)
    }

    pub fn pow(&self, a: &KummerElement, mut e: u64) -> KummerElement {
        let mut base = a.clone();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.square(&base);
            e >>= 1;
        }
        acc
    }

    /// The automorphism yᵢ ↦ −yᵢ for i in `flips`.
    pub fn conjugate(&self, a: &KummerElement, flips: usize) -> KummerElement {
        KummerElement {
            coeffs: a
                .coeffs
                .iter()
                .enumerate()
                .map(|(s, c)| if (s & flips).count_ones() % 2 == 1 { c.neg() } else { c.clone() })
                .collect(),
        }
    }

    /// Product of the conjugates under all sign changes of the generators in `mask`.
    /// The result has no component along those generators.
    pub fn partial_norm(&self, a: &KummerElement, mask: usize) -> KummerElement {
        let mut z = a.clone();
        for i in 0..self.rank() {
            if (mask >> i) & 1 == 1 {
                z = self.mul(&z, &self.conjugate(&z, 1 << i));
            }
        }
        z
    }

    pub fn norm_to_base(&self, a: &KummerElement) -> UnramifiedElement {
        self.partial_norm(a, self.size() - 1).coeffs[0].clone()
    }

    pub fn inverse(&self, a: &KummerElement) -> Result<KummerElement> {
        // a⁻¹ = (∏_{σ≠1} σ(a)) / N(a)
        let mut cofactor = self.one();
        let mut z = a.clone();
        for i in 0..self.rank() {
            let c = self.conjugate(&z, 1 << i);
            cofactor = self.mul(&cofactor, &c);
            z = self.mul(&z, &c);
        }
        let n_inv = z.coeffs[0].inverse()?;
        Ok(self.scale(&cofactor, &n_inv))
    }

    /// Applies the coefficient map `phi` and sends yᵢ to `images[i]`.
    pub fn apply_automorphism(
        &self,
        a: &KummerElement,
        phi: impl Fn(&UnramifiedElement) -> UnramifiedElement,
        images: &[KummerElement],
    ) -> KummerElement {
        let mut monomials: Vec<KummerElement> = vec![self.one(); self.size()];
        for s in 1..self.size() {
            let low = s.trailing_zeros() as usize;
            monomials[s] = self.mul(&monomials[s & (s - 1)], &images[low]);
        }
        let mut out = self.zero();
        for (s, c) in a.coeffs.iter().enumerate() {
            out = self.add(&out, &self.scale(&monomials[s], &phi(c)));
        }
        out
    }

    pub fn agrees(&self, a: &KummerElement, b: &KummerElement, slack: u32) -> bool {
        a.coeffs.iter().zip(&b.coeffs).all(|(x, y)| x.agrees_with(y, slack))
    }

    pub fn is_zero_to_precision(&self, a: &KummerElement) -> bool {
        a.coeffs.iter().all(|c| c.is_zero_to_precision())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn biquadratic_arithmetic() {
        let k = UnramifiedField::new(1, 128);
        let alg = KummerAlgebra::new(&k, vec![k.from_i64(3), k.from_i64(-2)]);
        let y1 = alg.monomial(1, &k.one());
        let y2 = alg.monomial(2, &k.one());
        assert!(alg.agrees(&alg.square(&y1), &alg.scalar(&k.from_i64(3)), 0));
        let y12 = alg.mul(&y1, &y2);
        assert!(alg.agrees(&alg.square(&y12), &alg.scalar(&k.from_i64(-6)), 0));
        let z = alg.add(&alg.add(&alg.one(), &y1), &y2);
        let n = alg.norm_to_base(&z);
        // (1 + y1)² − y2² = 6 + 2y1, then 36 − 4·3 = 24.
        assert!(n.agrees_with(&k.from_i64(24), 0));
        let inv = alg.inverse(&z).unwrap();
        assert!(alg.agrees(&alg.mul(&z, &inv), &alg.one(), 1));
    }

    #[test]
    fn automorphism_swapping_generators() {
        let k = UnramifiedField::new(1, 128);
        let alg = KummerAlgebra::new(&k, vec![k.from_i64(5), k.from_i64(5)]);
        let y1 = alg.monomial(1, &k.one());
        let y2 = alg.monomial(2, &k.one());
        let z = alg.add(&alg.mul(&y1, &alg.scalar(&k.from_i64(7))), &alg.mul(&y1, &y2));
        let swapped = alg.apply_automorphism(&z, |c| c.clone(), &[y2.clone(), y1.clone()]);
        let expect = alg.add(&alg.mul(&y2, &alg.scalar(&k.from_i64(7))), &alg.mul(&y1, &y2));
        assert!(alg.agrees(&swapped, &expect, 0));
    }
}
