//! The groups K^×⊗F₂ for unramified 2-adic fields K.
//!
//! Coordinates are taken in the basis [2, 1 − 2x⁰, …, 1 − 2x^{d−1}, ξ] with
//! ξ = 1 + 4t, Tr(t̄) = 1, so dim K^×⊗F₂ = d + 2 and ξ sits at index d + 1.

use std::sync::Arc;

use crate::error::{DescentError, Result};
use crate::f2_linalg::F2Vector;
use crate::padic_unramified::{
    is_square, linear_unit, square_class_data, xi_unit, SubfieldEmbedding, UnramifiedElement, UnramifiedField,
};

#[derive(Clone, Debug)]
pub struct SquareClassGroup {
    field: Arc<UnramifiedField>,
    basis: Vec<UnramifiedElement>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SquareClass {
    pub coords: F2Vector,
}

impl SquareClassGroup {
    pub fn new(field: &Arc<UnramifiedField>) -> Self {
        let d = field.degree();
        let mut basis = Vec::with_capacity(d + 2);
        basis.push(field.from_i64(2));
        basis.extend((0..d).map(|k| linear_unit(field, k)));
        basis.push(xi_unit(field));
        SquareClassGroup { field: field.clone(), basis }
    }

    pub fn field(&self) -> &Arc<UnramifiedField> {
        &self.field
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[UnramifiedElement] {
        &self.basis
    }

    pub fn xi_index(&self) -> usize {
        self.field.degree() + 1
    }

    /// Coordinates of a nonzero element, without the reconstruction check.
    pub fn coordinates_unchecked(&self, y: &UnramifiedElement) -> Result<SquareClass> {
        let (odd, unit) = square_class_data(y)?;
        let mut coords = F2Vector::zeros(self.dim());
        coords.set(0, odd);
        for k in 0..self.field.degree() {
            coords.set(1 + k, (unit.linear >> k) & 1 == 1);
        }
        coords.set(self.xi_index(), unit.xi);
        Ok(SquareClass { coords })
    }

    /// Coordinates of y, certified by checking that y·∏ basisᶜ is a square.
    pub fn coordinates(&self, y: &UnramifiedElement) -> Result<SquareClass> {
        let class = self.coordinates_unchecked(y)?;
        let r = class.coords.ones().fold(y.clone(), |acc, i| acc.mul(&self.basis[i]));
        if !is_square(&r)? {
            return Err(DescentError::precision(self.field.precision(), "square-class reconstruction failed"));
        }
        Ok(class)
    }

    pub fn element(&self, class: &SquareClass) -> UnramifiedElement {
        class.coords.ones().fold(self.field.one(), |acc, i| acc.mul(&self.basis[i]))
    }

    pub fn unramified_class(&self) -> SquareClass {
        SquareClass { coords: F2Vector::unit(self.dim(), self.xi_index()) }
    }

    /// Class of N_{M/K}(y) for y in the larger field of `emb`, with K = `self`.
    pub fn norm_class(&self, y: &UnramifiedElement, emb: &SubfieldEmbedding, slack: u32) -> Result<SquareClass> {
        self.coordinates(&norm_down(y, emb, slack)?)
    }
}

/// N_{M/K}(y) = ∏ φ^{mj}(y) over j < [M:K], returned as an element of K.
pub fn norm_down(y: &UnramifiedElement, emb: &SubfieldEmbedding, slack: u32) -> Result<UnramifiedElement> {
    let m = emb.small().degree();
    let r = emb.big().degree() / m;
    let mut acc = y.clone();
    let mut conj = y.clone();
    for _ in 1..r {
        conj = conj.frobenius_pow(m);
        acc = acc.mul(&conj);
    }
    emb.extract(&acc, slack)
}
