//! The splitting field of f over Q₂ for a curve with good ordinary reduction at 2.
//!
//! In the even model f′ = c·∏ qᵢ with qᵢ = x² + bᵢx + cᵢ ≡ (x − βᵢ)² mod 4 over U_D.
//! Writing hᵢ = bᵢ/2 and δᵢ = (hᵢ² − cᵢ)/4, the roots of qᵢ are −hᵢ ± 2√δᵢ, so
//! L = U_D(√δᵢ) is a multi-quadratic extension of U_D. The δᵢ are written as
//! δᵢ = ρᵢ²·∏_{k∈Sᵢ} w_k over a basis w_k of their square-class span, and L is
//! modelled as U_D[z_k]/(z_k² − w_k) with yᵢ = ρᵢ·∏_{k∈Sᵢ} z_k.
//!
//! Roots are labelled 2i (sign +) and 2i + 1 (sign −). In the odd-degree case the
//! root 0 of f′ is the image of the point at infinity; it is the + root of its index.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::Arc;

use num_bigint::BigInt;

use crate::curve_model::{ordinary_even_model, to_even_model, CurveModel, RwpCase};
use crate::error::{DescentError, Result};
use crate::f2_linalg::F2Vector;
use crate::padic_unramified::poly::reduce_mod2;
use crate::padic_unramified::residue;
use crate::padic_unramified::{
    hensel_quadratic_factors, sqrt, KummerAlgebra, KummerElement, QuadraticFactor, UnramifiedElement, UnramifiedField,
};
use crate::square_classes::SquareClassGroup;
use crate::SLACK_BITS;

pub type Label = usize;

pub fn label(index: usize, sign: i8) -> Label {
    2 * index + (sign < 0) as usize
}

pub fn label_index(l: Label) -> usize {
    l / 2
}

pub fn label_sign(l: Label) -> i8 {
    if l % 2 == 0 {
        1
    } else {
        -1
    }
}

/// A permutation of root labels, as the image of each label.
pub type Permutation = Vec<Label>;

#[derive(Clone, Debug)]
pub struct SplittingField {
    pub case: RwpCase,
    pub genus: usize,
    pub beta_shift: Option<i64>,
    pub even_model: CurveModel,
    pub base: Arc<UnramifiedField>,
    /// Residue roots of Q̄′ in F_{2^D}, grouped in Frobenius orbits r, r², r⁴, ….
    pub residue_roots: Vec<u64>,
    /// Frobenius on indices: residue_roots[frob[i]] = residue_roots[i]².
    pub frob: Vec<usize>,
    pub factors: Vec<QuadraticFactor>,
    pub delta: Vec<UnramifiedElement>,
    /// Sᵢ as a bitmask over the basis w_k.
    pub words: Vec<usize>,
    pub rho: Vec<UnramifiedElement>,
    /// Index i_k with w_k = δ_{i_k}.
    pub basis_indices: Vec<usize>,
    /// φ(yᵢ) = εᵢ·y_{frob[i]} in L.
    pub eps: Vec<i8>,
    /// A root with label (i, s) is root_a[i] + s·root_b[i]·yᵢ.
    pub root_a: Vec<UnramifiedElement>,
    pub root_b: Vec<UnramifiedElement>,
    /// Index whose + label is the point at infinity.
    pub infinity_index: Option<usize>,
    pub kummer: KummerAlgebra,
}

fn lcm(a: usize, b: usize) -> usize {
    a / gcd(a, b) * b
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn precision_err(field: &UnramifiedField, ctx: &str) -> DescentError {
    DescentError::precision(field.precision(), ctx)
}

/// Incremental echelon form over F₂ tracking which basis vectors combine to each row.
struct ClassEchelon {
    rows: Vec<(usize, F2Vector, usize)>,
    size: usize,
}

impl ClassEchelon {
    /// Returns the word of `v` over the current basis, extending the basis if needed.
    fn insert(&mut self, v: &F2Vector) -> (usize, bool) {
        let mut r = v.clone();
        let mut mask = 0usize;
        for (pivot, row, m) in &self.rows {
            if r.get(*pivot) {
                r.xor_assign(row);
                mask ^= m;
            }
        }
        match r.leading_index() {
            None => (mask, false),
            Some(p) => {
                let k = self.size;
                self.size += 1;
                self.rows.push((p, r, mask ^ (1 << k)));
                (1 << k, true)
            }
        }
    }
}

impl SplittingField {
    pub fn build(curve: &CurveModel, precision: u32) -> Result<Self> {
        let (even, beta_shift) = ordinary_even_model(curve)?;
        Self::build_from(curve, even, beta_shift, precision)
    }

    /// As `build`, with an explicit admissible shift for an odd-degree model.
    pub fn build_with_shift(curve: &CurveModel, beta: i64, precision: u32) -> Result<Self> {
        let even = to_even_model(curve, beta)?.even_model;
        Self::build_from(curve, even, Some(beta), precision)
    }

    fn build_from(curve: &CurveModel, even: CurveModel, beta_shift: Option<i64>, precision: u32) -> Result<Self> {
        let qbar = reduce_mod2(&even.q);
        let irreducibles = residue::factor(qbar);
        let d = irreducibles.iter().fold(1, |acc, &(p, _)| lcm(acc, residue::degree(p as u128) as usize));
        let base = UnramifiedField::new(d as u32, precision);
        let rf = base.residue_field().clone();

        let mut residue_roots = Vec::new();
        for &(p, _) in &irreducibles {
            let mut r = rf.roots_of_f2_poly(p)[0];
            for _ in 0..residue::degree(p as u128) {
                residue_roots.push(r);
                r = rf.frobenius(r);
            }
        }
        let n = residue_roots.len();
        let position: HashMap<u64, usize> = residue_roots.iter().enumerate().map(|(i, &r)| (r, i)).collect();
        let frob: Vec<usize> = residue_roots.iter().map(|&r| position[&rf.frobenius(r)]).collect();

        let mut fact = hensel_quadratic_factors(&even.f, &base, &residue_roots)?;
        let infinity_index = match curve.case {
            RwpCase::OneRwp => {
                let i0 = position[&0];
                if !fact.factors[i0].c.is_certified_zero(SLACK_BITS) {
                    return Err(precision_err(&base, "factor at the point at infinity has nonzero constant term"));
                }
                fact.factors[i0].c = base.zero();
                Some(i0)
            }
            RwpCase::NoRwp => None,
        };
        for i in 0..n {
            let img = fact.factors[i].frobenius();
            let tgt = &fact.factors[frob[i]];
            if !img.b.agrees_with(&tgt.b, SLACK_BITS) || !img.c.agrees_with(&tgt.c, SLACK_BITS) {
                return Err(precision_err(&base, "Hensel factors are not Frobenius-compatible"));
            }
        }

        let h: Vec<UnramifiedElement> = fact.factors.iter().map(|q| q.b.mul_pow2(-1)).collect();
        let delta: Vec<UnramifiedElement> =
            fact.factors.iter().zip(&h).map(|(q, h)| h.square().sub(&q.c).mul_pow2(-2)).collect();

        let group = SquareClassGroup::new(&base);
        let mut echelon = ClassEchelon { rows: Vec::new(), size: 0 };
        let mut words = vec![0usize; n];
        let mut basis_indices = Vec::new();
        for i in 0..n {
            if Some(i) == infinity_index {
                continue;
            }
            let class = group.coordinates(&delta[i])?;
            let (word, new) = echelon.insert(&class.coords);
            if new {
                basis_indices.push(i);
            }
            words[i] = word;
        }
        let w: Vec<UnramifiedElement> = basis_indices.iter().map(|&i| delta[i].clone()).collect();

        let mut rho = Vec::with_capacity(n);
        for i in 0..n {
            let r = if Some(i) == infinity_index {
                h[i].mul_pow2(-1)
            } else if basis_indices.contains(&i) {
                base.one()
            } else {
                let mut q = delta[i].clone();
                for k in ones(words[i]) {
                    q = q.div(&w[k])?;
                }
                sqrt(&q).map_err(|e| match e {
                    DescentError::NotASquare => precision_err(&base, "square-class word does not certify"),
                    e => e,
                })?
            };
            rho.push(r);
        }

        let mut eps = vec![1i8; n];
        for i in 0..n {
            let mut x = rho[i].frobenius();
            let mut mult = vec![0usize; w.len()];
            for k in ones(words[i]) {
                let j = frob[basis_indices[k]];
                x = x.mul(&rho[j]);
                for l in ones(words[j]) {
                    mult[l] += 1;
                }
            }
            let mut parity = 0usize;
            for (l, &m) in mult.iter().enumerate() {
                x = x.mul(&w[l].pow((m / 2) as u64));
                parity |= (m % 2) << l;
            }
            let y = &rho[frob[i]];
            if parity != words[frob[i]] {
                return Err(DescentError::InconsistentSigns(i));
            }
            eps[i] = if x.agrees_with(y, SLACK_BITS) {
                1
            } else if x.agrees_with(&y.neg(), SLACK_BITS) {
                -1
            } else {
                return Err(DescentError::InconsistentSigns(i));
            };
        }

        let mut root_a = Vec::with_capacity(n);
        let mut root_b = Vec::with_capacity(n);
        for i in 0..n {
            let q = &fact.factors[i];
            match beta_shift {
                Some(beta) => {
                    let beta = base.from_i64(beta);
                    if Some(i) == infinity_index {
                        root_a.push(beta.sub(&q.b.inverse()?));
                        root_b.push(base.zero());
                    } else {
                        let c_inv = q.c.inverse()?;
                        root_a.push(beta.sub(&h[i].mul(&c_inv)));
                        root_b.push(c_inv.mul_pow2(1).neg());
                    }
                }
                None => {
                    root_a.push(h[i].neg());
                    root_b.push(base.from_i64(2));
                }
            }
        }

        let kummer = KummerAlgebra::new(&base, w);
        let sf = SplittingField {
            case: curve.case,
            genus: curve.genus,
            beta_shift,
            even_model: even,
            base,
            residue_roots,
            frob,
            factors: fact.factors,
            delta,
            words,
            rho,
            basis_indices,
            eps,
            root_a,
            root_b,
            infinity_index,
            kummer,
        };
        let order = sf.galois_group().len();
        let expected = sf.base.degree() << sf.kummer.rank();
        if order != expected {
            return Err(precision_err(&sf.base, &format!("Galois group has order {order}, expected {expected}")));
        }
        Ok(sf)
    }

    pub fn degree(&self) -> usize {
        self.base.degree()
    }

    pub fn num_indices(&self) -> usize {
        self.residue_roots.len()
    }

    /// Labels of the roots of f, excluding the point at infinity.
    pub fn finite_labels(&self) -> Vec<Label> {
        (0..2 * self.num_indices()).filter(|&l| Some(l) != self.infinity_index.map(|i| label(i, 1))).collect()
    }

    pub fn is_finite_label(&self, l: Label) -> bool {
        Some(l) != self.infinity_index.map(|i| label(i, 1))
    }

    /// The Frobenius lift fixing every z_k's chosen square root, acting on labels.
    pub fn frobenius_permutation(&self) -> Permutation {
        (0..2 * self.num_indices())
            .map(|l| {
                let i = label_index(l);
                label(self.frob[i], label_sign(l) * self.eps[i])
            })
            .collect()
    }

    /// z_k ↦ −z_k, acting on labels.
    pub fn flip_permutation(&self, k: usize) -> Permutation {
        (0..2 * self.num_indices())
            .map(|l| {
                let i = label_index(l);
                let s = if (self.words[i] >> k) & 1 == 1 { -label_sign(l) } else { label_sign(l) };
                label(i, s)
            })
            .collect()
    }

    pub fn galois_generators(&self) -> Vec<Permutation> {
        let mut gens = vec![self.frobenius_permutation()];
        gens.extend((0..self.kummer.rank()).map(|k| self.flip_permutation(k)));
        gens
    }

    pub fn galois_group(&self) -> Vec<Permutation> {
        close_group(&self.galois_generators())
    }

    /// The root with label `l` as an element of L.
    pub fn root_in_l(&self, l: Label) -> KummerElement {
        let i = label_index(l);
        let coeff = self.root_b[i].mul(&self.rho[i]).mul_i64(label_sign(l) as i64);
        let mono = self.kummer.monomial(self.words[i], &coeff);
        self.kummer.add_scalar(&mono, &self.root_a[i])
    }

    /// t = α + α′ + λαα′ for the pair of labels, in L.
    pub fn primitive_in_l(&self, a: Label, b: Label, lambda: i64) -> KummerElement {
        let (x, y) = (self.root_in_l(a), self.root_in_l(b));
        let s = self.kummer.add(&x, &y);
        if lambda == 0 {
            s
        } else {
            let p = self.kummer.mul(&x, &y);
            self.kummer.add(&s, &self.kummer.scale(&p, &self.base.from_i64(lambda)))
        }
    }

    /// The Frobenius lift as an automorphism of L.
    pub fn apply_frobenius(&self, x: &KummerElement) -> KummerElement {
        let images: Vec<KummerElement> = self
            .basis_indices
            .iter()
            .map(|&i| {
                let j = self.frob[i];
                self.kummer.monomial(self.words[j], &self.rho[j])
            })
            .collect();
        self.kummer.apply_automorphism(x, |c| c.frobenius(), &images)
    }

    pub fn apply_flip(&self, x: &KummerElement, k: usize) -> KummerElement {
        self.kummer.conjugate(x, 1 << k)
    }

    /// Orbits of indices under Frobenius.
    pub fn index_orbits(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.num_indices()];
        let mut out = Vec::new();
        for i in 0..self.num_indices() {
            if seen[i] {
                continue;
            }
            let mut orbit = vec![i];
            seen[i] = true;
            let mut j = self.frob[i];
            while j != i {
                seen[j] = true;
                orbit.push(j);
                j = self.frob[j];
            }
            out.push(orbit);
        }
        out
    }

    pub fn index_orbit_size(&self, i: usize) -> usize {
        let mut j = self.frob[i];
        let mut m = 1;
        while j != i {
            j = self.frob[j];
            m += 1;
        }
        m
    }
}

fn ones(mask: usize) -> impl Iterator<Item = usize> {
    (0..usize::BITS as usize).filter(move |k| (mask >> k) & 1 == 1)
}

pub fn compose(a: &Permutation, b: &Permutation) -> Permutation {
    // (a ∘ b)(x) = a(b(x))
    b.iter().map(|&x| a[x]).collect()
}

/// All elements of the group generated by `gens`, sorted.
pub fn close_group(gens: &[Permutation]) -> Vec<Permutation> {
    let n = gens.first().map_or(0, |g| g.len());
    let identity: Permutation = (0..n).collect();
    let mut seen: BTreeSet<Permutation> = BTreeSet::new();
    seen.insert(identity.clone());
    let mut frontier = vec![identity];
    while let Some(p) = frontier.pop() {
        for g in gens {
            let q = compose(g, &p);
            if seen.insert(q.clone()) {
                frontier.push(q);
            }
        }
    }
    seen.into_iter().collect()
}

/// Orbits of a set of points under the group generated by `gens`, each sorted, ordered by minimum.
pub fn point_orbits(gens: &[Permutation], points: &[usize]) -> Vec<Vec<usize>> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for &p in points {
        if !seen.insert(p) {
            continue;
        }
        let mut orbit = vec![p];
        let mut stack = vec![p];
        while let Some(x) = stack.pop() {
            for g in gens {
                let y = g[x];
                if seen.insert(y) {
                    orbit.push(y);
                    stack.push(y);
                }
            }
        }
        orbit.sort_unstable();
        out.push(orbit);
    }
    out
}

fn sorted_pair(a: usize, b: usize) -> (usize, usize) {
    (a.min(b), a.max(b))
}

/// Orbits of unordered pairs drawn from `points` under the group generated by `gens`.
pub fn unordered_pair_orbits(gens: &[Permutation], points: &[usize]) -> Vec<Vec<(usize, usize)>> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for (x, &a) in points.iter().enumerate() {
        for &b in &points[x + 1..] {
            let p = sorted_pair(a, b);
            if !seen.insert(p) {
                continue;
            }
            let mut orbit = vec![p];
            let mut stack = vec![p];
            while let Some((u, v)) = stack.pop() {
                for g in gens {
                    let q = sorted_pair(g[u], g[v]);
                    if seen.insert(q) {
                        orbit.push(q);
                        stack.push(q);
                    }
                }
            }
            orbit.sort_unstable();
            out.push(orbit);
        }
    }
    out.sort();
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairOrbit {
    pub pairs: Vec<(Label, Label)>,
    pub diagonal: bool,
    /// Position in `PairOrbitDecomposition::beta_orbits`, for non-diagonal orbits.
    pub beta_orbit: Option<usize>,
}

impl PairOrbit {
    pub fn size(&self) -> usize {
        self.pairs.len()
    }

    pub fn representative(&self) -> (Label, Label) {
        self.pairs[0]
    }
}

/// A Frobenius orbit of unordered pairs of distinct indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BetaPairOrbit {
    pub pairs: Vec<(usize, usize)>,
}

impl BetaPairOrbit {
    pub fn size(&self) -> usize {
        self.pairs.len()
    }

    pub fn representative(&self) -> (usize, usize) {
        self.pairs[0]
    }
}

#[derive(Clone, Debug)]
pub struct PairOrbitDecomposition {
    pub orbits: Vec<PairOrbit>,
    pub beta_orbits: Vec<BetaPairOrbit>,
    pub num_finite_roots: usize,
}

impl PairOrbitDecomposition {
    pub fn sizes(&self) -> Vec<usize> {
        let mut s: Vec<usize> = self.orbits.iter().map(|o| o.size()).collect();
        s.sort_unstable();
        s
    }

    /// Sizes of the orbits of finite root labels.
    pub fn root_orbit_sizes(sf: &SplittingField) -> Vec<usize> {
        let mut s: Vec<usize> =
            point_orbits(&sf.galois_generators(), &sf.finite_labels()).iter().map(|o| o.len()).collect();
        s.sort_unstable();
        s
    }
}

pub fn pair_orbits(sf: &SplittingField) -> PairOrbitDecomposition {
    let gens = sf.galois_generators();
    let labels = sf.finite_labels();
    let frob_idx: Permutation = sf.frob.clone();
    let beta_pairs: Vec<usize> = (0..sf.num_indices()).collect();
    let beta_orbits: Vec<BetaPairOrbit> =
        unordered_pair_orbits(&[frob_idx], &beta_pairs).into_iter().map(|pairs| BetaPairOrbit { pairs }).collect();
    let mut beta_lookup: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for (k, o) in beta_orbits.iter().enumerate() {
        for &p in &o.pairs {
            beta_lookup.insert(p, k);
        }
    }
    let orbits = unordered_pair_orbits(&gens, &labels)
        .into_iter()
        .map(|pairs| {
            let (a, b) = pairs[0];
            let (i, j) = (label_index(a), label_index(b));
            let diagonal = i == j;
            let beta_orbit = if diagonal { None } else { Some(beta_lookup[&sorted_pair(i, j)]) };
            PairOrbit { pairs, diagonal, beta_orbit }
        })
        .collect();
    PairOrbitDecomposition { orbits, beta_orbits, num_finite_roots: labels.len() }
}

/// Coefficients of ∏_{p∈O}(x − t_p) in L for one pair orbit, constant term first.
pub fn orbit_polynomial(sf: &SplittingField, orbit: &PairOrbit, lambda: i64) -> Vec<KummerElement> {
    let l = &sf.kummer;
    let mut poly = vec![l.one()];
    for &(a, b) in &orbit.pairs {
        let t = sf.primitive_in_l(a, b, lambda);
        let mut next = vec![l.zero(); poly.len() + 1];
        for (k, c) in poly.iter().enumerate() {
            next[k + 1] = l.add(&next[k + 1], c);
            next[k] = l.sub(&next[k], &l.mul(c, &t));
        }
        poly = next;
    }
    poly
}

/// Whether every coefficient of the orbit polynomial lies in Q₂ to within `slack` bits.
pub fn orbit_polynomial_is_rational(sf: &SplittingField, orbit: &PairOrbit, lambda: i64, slack: u32) -> bool {
    orbit_polynomial(sf, orbit, lambda).iter().all(|c| {
        c.coeffs()
            .iter()
            .enumerate()
            .all(|(s, x)| if s == 0 { x.is_rational(slack) } else { x.is_certified_zero(slack) })
    })
}

/// Rational approximation of an orbit polynomial, for matching against factors of F.
pub fn orbit_polynomial_rational(sf: &SplittingField, orbit: &PairOrbit, lambda: i64) -> Vec<BigInt> {
    orbit_polynomial(sf, orbit, lambda).iter().map(|c| c.coeff(0).body_coeff(0)).collect()
}
