//! The map θ_dR from the global kernel to ⊕ K_i^×⊗F₂/⟨ξ_i⟩ and its kernel.
//!
//! One component per Frobenius orbit of pairs of distinct roots of Q̄′. The value of
//! an element on a component is the product of its evaluations at every pair of roots
//! of f lying over a representative pair of residue roots.

use std::sync::Arc;

use serde::Serialize;

use crate::certificate::{
    check_resolvent_root, norm_over_pairs, GlobalElement, KernelCertificate, PairAlgebra, SubfieldCache,
};
use crate::error::{DescentError, Result};
use crate::f2_linalg::{F2Matrix, F2Vector};
use crate::padic_unramified::{SubfieldEmbedding, UnramifiedElement, UnramifiedField};
use crate::splitting_field::{label, PairOrbitDecomposition, SplittingField};
use crate::square_classes::SquareClassGroup;
use crate::SLACK_BITS;

#[derive(Clone, Debug)]
pub struct ThetaComponent {
    /// Representative pair of residue-root indices.
    pub pair: (usize, usize),
    pub orbit_size: usize,
    pub field: Arc<UnramifiedField>,
    pub classes: SquareClassGroup,
    pub embedding: SubfieldEmbedding,
}

impl ThetaComponent {
    pub fn degree(&self) -> usize {
        self.field.degree()
    }

    /// dim K^×⊗F₂/⟨ξ⟩.
    pub fn quotient_dim(&self) -> usize {
        self.classes.dim() - 1
    }
}

#[derive(Clone, Debug)]
pub struct ThetaTarget {
    pub components: Vec<ThetaComponent>,
}

impl ThetaTarget {
    pub fn degrees(&self) -> Vec<usize> {
        self.components.iter().map(|c| c.degree()).collect()
    }

    pub fn dim(&self) -> usize {
        self.components.iter().map(|c| c.quotient_dim()).sum()
    }
}

pub fn build_target(orbits: &PairOrbitDecomposition, sf: &SplittingField) -> Result<ThetaTarget> {
    let mut cache = SubfieldCache::new(&sf.base);
    let mut components = Vec::new();
    for o in &orbits.beta_orbits {
        let m = o.size();
        let embedding = cache.get(m)?.clone();
        let field = embedding.small().clone();
        components.push(ThetaComponent {
            pair: o.representative(),
            orbit_size: m,
            classes: SquareClassGroup::new(&field),
            field,
            embedding,
        });
    }
    Ok(ThetaTarget { components })
}

/// The pair algebra over a pair of residue roots, with t at the + labels (the finite label for the ∞ index).
pub fn component_pair_algebra(sf: &SplittingField, pair: (usize, usize), lambda: i64) -> PairAlgebra {
    let finite = |i: usize| if Some(i) == sf.infinity_index { label(i, -1) } else { label(i, 1) };
    PairAlgebra::new(sf, finite(pair.0), finite(pair.1), lambda)
}

/// ∏ e(t_p) over the pairs of roots above `pair`, as an element of K.
pub fn component_value(e: &GlobalElement, comp: &ThetaComponent, pa: &PairAlgebra) -> Result<UnramifiedElement> {
    let v = norm_over_pairs(e, pa)?;
    if v.is_zero_to_precision() {
        return Err(DescentError::precision(v.field().precision(), "component value vanishes to precision"));
    }
    comp.embedding.extract(&v, SLACK_BITS)
}

/// Coordinates of e's component value in K^×⊗F₂/⟨ξ⟩: the ξ coordinate is dropped.
pub fn theta_component(e: &GlobalElement, comp: &ThetaComponent, pa: &PairAlgebra) -> Result<F2Vector> {
    let y = component_value(e, comp, pa)?;
    Ok(drop_xi(comp, &comp.classes.coordinates(&y)?.coords))
}

fn drop_xi(comp: &ThetaComponent, coords: &F2Vector) -> F2Vector {
    let xi = comp.classes.xi_index();
    let bits: Vec<u8> = (0..coords.len()).filter(|&k| k != xi).map(|k| coords.get(k) as u8).collect();
    F2Vector::from_bits(&bits)
}

#[derive(Clone, Debug, Serialize)]
pub struct ThetaResult {
    pub dim: usize,
    pub rank: usize,
    /// Kernel basis as combinations of certificate basis elements.
    pub kernel_basis: Vec<String>,
    pub rows: Vec<String>,
    pub component_degrees: Vec<usize>,
    #[serde(skip)]
    pub matrix: F2Matrix,
}

/// Row of θ_dR(e), concatenated over components.
pub fn theta_row(e: &GlobalElement, target: &ThetaTarget, algebras: &[PairAlgebra]) -> Result<F2Vector> {
    let parts: Vec<F2Vector> =
        target.components.iter().zip(algebras).map(|(comp, pa)| theta_component(e, comp, pa)).collect::<Result<_>>()?;
    Ok(F2Vector::concat(&parts))
}

pub fn pair_algebras(target: &ThetaTarget, sf: &SplittingField, cert: &KernelCertificate) -> Result<Vec<PairAlgebra>> {
    target
        .components
        .iter()
        .map(|c| {
            let pa = component_pair_algebra(sf, c.pair, cert.resolvent.lambda);
            check_resolvent_root(&pa.alg, &pa.t, &cert.resolvent)?;
            Ok(pa)
        })
        .collect()
}

pub fn ker_theta_dr(
    cert: &KernelCertificate,
    orbits: &PairOrbitDecomposition,
    sf: &SplittingField,
) -> Result<ThetaResult> {
    let target = build_target(orbits, sf)?;
    let algebras = pair_algebras(&target, sf, cert)?;
    let rows: Vec<F2Vector> = cert.basis.iter().map(|e| theta_row(e, &target, &algebras)).collect::<Result<_>>()?;
    let matrix = F2Matrix::from_rows(target.dim(), rows.clone())?;
    let kernel = matrix.left_kernel();
    Ok(ThetaResult {
        dim: kernel.len(),
        rank: matrix.rank(),
        kernel_basis: kernel.iter().map(|v| v.to_string()).collect(),
        rows: rows.iter().map(|v| v.to_string()).collect(),
        component_degrees: target.degrees(),
        matrix,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certificate::parse_certificate;
    use crate::curve_model::{parse_curve_json, CurveModel};
    use crate::splitting_field::pair_orbits;
    use num_bigint::BigInt;
    use num_rational::BigRational;
    use std::path::PathBuf;

    fn fixture(name: &str) -> (CurveModel, KernelCertificate) {
        let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name);
        let curve = parse_curve_json(&std::fs::read_to_string(dir.join("curve.json")).unwrap()).unwrap();
        let cert = parse_certificate(&std::fs::read_to_string(dir.join("certificate.json")).unwrap()).unwrap();
        (curve, cert)
    }

    fn setup(name: &str) -> (KernelCertificate, SplittingField, PairOrbitDecomposition) {
        let (curve, cert) = fixture(name);
        let sf = SplittingField::build(&curve, 256).unwrap();
        let orbits = pair_orbits(&sf);
        (cert, sf, orbits)
    }

    fn sorted(mut v: Vec<usize>) -> Vec<usize> {
        v.sort_unstable();
        v
    }

    #[test]
    fn target_degrees() {
        let (_, sf, o) = setup("examples/216663");
        assert_eq!(sorted(build_target(&o, &sf).unwrap().degrees()), vec![1, 2]);
        let (_, sf, o) = setup("examples/g3-one-rwp");
        assert_eq!(build_target(&o, &sf).unwrap().degrees(), vec![3, 3]);
        let (_, sf, o) = setup("examples/g3-no-rwp");
        assert_eq!(sorted(build_target(&o, &sf).unwrap().degrees()), vec![2, 4]);
    }

    #[test]
    fn squares_and_five_vanish() {
        let (cert, sf, o) = setup("examples/216663");
        let target = build_target(&o, &sf).unwrap();
        let algs = pair_algebras(&target, &sf, &cert).unwrap();
        assert!(theta_row(&GlobalElement::constant(9), &target, &algs).unwrap().is_zero());
        // Four pairs (or two over the ∞ index) lie over each representative: an even count.
        assert!(theta_row(&GlobalElement::constant(5), &target, &algs).unwrap().is_zero());
        let q = GlobalElement { factors: vec![(vec![BigRational::new(BigInt::from(7), BigInt::from(4))], 2)] };
        assert!(theta_row(&q, &target, &algs).unwrap().is_zero());
    }

    #[test]
    fn kernel_216663() {
        let (cert, sf, o) = setup("examples/216663");
        let r = ker_theta_dr(&cert, &o, &sf).unwrap();
        assert_eq!(r.dim, 5);
        assert_eq!(r.matrix.nrows(), 6);
    }

    #[test]
    fn kernel_10651() {
        let (cert, sf, o) = setup("examples/10651");
        assert_eq!(ker_theta_dr(&cert, &o, &sf).unwrap().dim, 7);
    }

    #[test]
    fn kernel_genus_3() {
        let (cert, sf, o) = setup("examples/g3-one-rwp");
        assert_eq!(ker_theta_dr(&cert, &o, &sf).unwrap().dim, 11);
        let (cert, sf, o) = setup("examples/g3-no-rwp");
        assert_eq!(ker_theta_dr(&cert, &o, &sf).unwrap().dim, 13);
    }

    #[test]
    fn kernel_is_independent_of_the_shift() {
        for name in ["examples/216663", "examples/g3-one-rwp"] {
            let (curve, cert) = fixture(name);
            let shifts = crate::curve_model::admissible_shifts(&curve);
            assert!(shifts.len() >= 2, "{name}: {shifts:?}");
            let dims: Vec<usize> = shifts
                .iter()
                .map(|&b| {
                    let sf = SplittingField::build_with_shift(&curve, b, 256).unwrap();
                    ker_theta_dr(&cert, &pair_orbits(&sf), &sf).unwrap().dim
                })
                .collect();
            assert!(dims.iter().all(|&d| d == dims[0]), "{name}: {dims:?}");
        }
    }

    #[test]
    fn rows_ignore_rational_square_factors() {
        let (cert, sf, o) = setup("examples/10651");
        let target = build_target(&o, &sf).unwrap();
        let algs = pair_algebras(&target, &sf, &cert).unwrap();
        let r2 = BigRational::new(BigInt::from(9), BigInt::from(4));
        for e in &cert.basis {
            let mut scaled = e.clone();
            scaled.factors[0].0.iter_mut().for_each(|c| *c = &*c * &r2);
            assert_eq!(theta_row(&scaled, &target, &algs).unwrap(), theta_row(e, &target, &algs).unwrap());
        }
    }

    #[test]
    fn theta_is_linear() {
        let (cert, sf, o) = setup("examples/216663");
        let target = build_target(&o, &sf).unwrap();
        let algs = pair_algebras(&target, &sf, &cert).unwrap();
        for i in 0..cert.dim() {
            for j in i..cert.dim() {
                let ri = theta_row(&cert.basis[i], &target, &algs).unwrap();
                let rj = theta_row(&cert.basis[j], &target, &algs).unwrap();
                let rij = theta_row(&cert.basis[i].product(&cert.basis[j]), &target, &algs).unwrap();
                assert_eq!(rij, ri.xor(&rj));
            }
        }
    }

    #[test]
    fn representative_invariance() {
        for name in ["examples/216663", "examples/10651"] {
            let (cert, sf, o) = setup(name);
            let target = build_target(&o, &sf).unwrap();
            for (comp, beta) in target.components.iter().zip(&o.beta_orbits) {
                let reference = {
                    let pa = component_pair_algebra(&sf, comp.pair, 0);
                    cert.basis.iter().map(|e| theta_component(e, comp, &pa).unwrap()).collect::<Vec<_>>()
                };
                for &pair in &beta.pairs[1..] {
                    let pa = component_pair_algebra(&sf, pair, 0);
                    // The value at another representative is a Frobenius conjugate: same class in K.
                    for (e, expected) in cert.basis.iter().zip(&reference) {
                        let y = norm_over_pairs(e, &pa).unwrap();
                        let back = (0..sf.degree() - sf_power(&sf, comp.pair, pair)).fold(y, |acc, _| acc.frobenius());
                        let c = comp.classes.coordinates(&comp.embedding.extract(&back, SLACK_BITS).unwrap()).unwrap();
                        assert_eq!(&drop_xi(comp, &c.coords), expected);
                    }
                }
            }
        }
    }

    /// Smallest k with π^k mapping `from` onto `to` as unordered pairs.
    fn sf_power(sf: &SplittingField, from: (usize, usize), to: (usize, usize)) -> usize {
        let norm = |(a, b): (usize, usize)| if a < b { (a, b) } else { (b, a) };
        let mut p = from;
        for k in 0..sf.degree() {
            if norm(p) == norm(to) {
                return k;
            }
            p = (sf.frob[p.0], sf.frob[p.1]);
        }
        panic!("pairs not in one orbit");
    }
}
