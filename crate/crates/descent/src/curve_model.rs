//! Weierstrass models y² + Q(x)y = P(x), reduction at 2 and the shift to an even-degree model.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{DescentError, Result};
use crate::padic_unramified::poly::reduce_mod2;
use crate::padic_unramified::residue;

/// Number of rational Weierstrass points at infinity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum RwpCase {
    /// deg f = 2g + 1.
    #[serde(rename = "ONE_RWP")]
    OneRwp,
    /// deg f = 2g + 2.
    #[serde(rename = "NO_RWP")]
    NoRwp,
}

impl RwpCase {
    pub fn as_str(self) -> &'static str {
        match self {
            RwpCase::OneRwp => "ONE_RWP",
            RwpCase::NoRwp => "NO_RWP",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CurveModel {
    pub label: Option<String>,
    pub p: Vec<BigInt>,
    pub q: Vec<BigInt>,
    /// f = 4P + Q².
    pub f: Vec<BigInt>,
    pub genus: usize,
    pub case: RwpCase,
}

/// Curve file contents, coefficients in ascending degree.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CurveInput {
    #[serde(default)]
    pub label: Option<String>,
    #[serde(rename = "P")]
    pub p: Vec<i64>,
    #[serde(rename = "Q")]
    pub q: Vec<i64>,
}

pub(crate) fn trim(mut p: Vec<BigInt>) -> Vec<BigInt> {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
    p
}

pub(crate) fn poly_add(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let n = a.len().max(b.len());
    let z = BigInt::zero();
    trim((0..n).map(|i| a.get(i).unwrap_or(&z) + b.get(i).unwrap_or(&z)).collect())
}

pub(crate) fn poly_mul(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    trim(out)
}

fn poly_scale(a: &[BigInt], c: &BigInt) -> Vec<BigInt> {
    trim(a.iter().map(|x| x * c).collect())
}

/// p(x + β).
pub(crate) fn taylor_shift(p: &[BigInt], beta: &BigInt) -> Vec<BigInt> {
    let mut out: Vec<BigInt> = Vec::new();
    for c in p.iter().rev() {
        out = poly_add(&poly_mul(&out, &[beta.clone(), BigInt::one()]), std::slice::from_ref(c));
    }
    out
}

/// x^n·p(β + 1/x) for n ≥ deg p.
pub(crate) fn shifted_reversal(p: &[BigInt], beta: &BigInt, n: usize) -> Vec<BigInt> {
    let shifted = taylor_shift(p, beta);
    assert!(shifted.len() <= n + 1);
    let mut out = vec![BigInt::zero(); n + 1];
    for (k, c) in shifted.iter().enumerate() {
        out[n - k] = c.clone();
    }
    trim(out)
}

pub(crate) fn eval(p: &[BigInt], x: &BigInt) -> BigInt {
    p.iter().rev().fold(BigInt::zero(), |acc, c| acc * x + c)
}

fn derivative(p: &[BigInt]) -> Vec<BigInt> {
    trim(p.iter().enumerate().skip(1).map(|(k, c)| c * BigInt::from(k)).collect())
}

/// Whether gcd(p, p′) is constant over Q, i.e. disc(p) ≠ 0.
pub fn is_squarefree(p: &[BigInt]) -> bool {
    let to_q = |v: &[BigInt]| -> Vec<BigRational> { v.iter().map(|c| BigRational::from_integer(c.clone())).collect() };
    let mut a = to_q(p);
    let mut b = to_q(&derivative(p));
    while !b.is_empty() {
        // a mod b
        while a.len() >= b.len() && !a.is_empty() {
            let factor = a.last().unwrap() / b.last().unwrap();
            let offset = a.len() - b.len();
            for (i, c) in b.iter().enumerate() {
                a[offset + i] = &a[offset + i] - &factor * c;
            }
            a.pop();
            while a.last().is_some_and(|c| c.is_zero()) {
                a.pop();
            }
        }
        std::mem::swap(&mut a, &mut b);
    }
    a.len() == 1
}

pub fn parse_curve(p: &[BigInt], q: &[BigInt], label: Option<String>) -> Result<CurveModel> {
    let p = trim(p.to_vec());
    let q = trim(q.to_vec());
    if p.is_empty() && q.is_empty() {
        return Err(DescentError::DegenerateCurve("P and Q are both zero".into()));
    }
    let f = poly_add(&poly_scale(&p, &BigInt::from(4)), &poly_mul(&q, &q));
    let deg = f.len().saturating_sub(1);
    if deg < 5 {
        return Err(DescentError::DegenerateCurve(format!("deg f = {deg} gives genus below 2")));
    }
    let genus = (deg - 1) / 2;
    let case = if deg % 2 == 1 { RwpCase::OneRwp } else { RwpCase::NoRwp };
    if !is_squarefree(&f) {
        return Err(DescentError::DegenerateCurve("f has a repeated root".into()));
    }
    Ok(CurveModel { label, p, q, f, genus, case })
}

pub fn parse_curve_json(text: &str) -> Result<CurveModel> {
    let input: CurveInput = serde_json::from_str(text).map_err(|e| DescentError::Schema(format!("curve: {e}")))?;
    curve_from_input(&input)
}

pub fn curve_from_input(input: &CurveInput) -> Result<CurveModel> {
    let ints = |v: &[i64]| v.iter().map(|&c| BigInt::from(c)).collect::<Vec<_>>();
    parse_curve(&ints(&input.p), &ints(&input.q), input.label.clone())
}

impl CurveModel {
    pub fn to_input(&self) -> CurveInput {
        let small = |v: &[BigInt]| v.iter().map(|c| i64::try_from(c).expect("coefficient fits in i64")).collect();
        CurveInput { label: self.label.clone(), p: small(&self.p), q: small(&self.q) }
    }

    /// Same curve equation, ignoring labels and trailing zeros.
    pub fn same_equation(&self, other: &CurveModel) -> bool {
        self.p == other.p && self.q == other.q
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrdinaryData {
    /// Irreducible factors of Q̄ with multiplicities, as F₂ bitmasks.
    pub qbar_factors: Vec<(u64, u32)>,
    pub ordinary: bool,
    pub beta_shift: Option<i64>,
}

#[derive(Clone, Debug)]
pub struct ModelTransform {
    pub beta: i64,
    pub even_model: CurveModel,
}

impl ModelTransform {
    /// Finite root α of f from the root γ ≠ 0 of f′.
    pub fn root_description(&self) -> &'static str {
        "finite root α of f corresponds to the root 1/(α − β) of f′; the point at infinity to the root 0"
    }
}

fn separable_of_degree(p: u64, degree: usize) -> bool {
    p != 0 && residue::degree(p as u128) == degree as i32 && residue::gcd(p, residue::derivative(p)) == 1
}

/// Reduction data at 2, choosing the first admissible shift in the odd case.
pub fn check_good_ordinary_at_2(c: &CurveModel) -> Result<OrdinaryData> {
    let qbar = reduce_mod2(&c.q);
    let qbar_factors = if qbar == 0 { Vec::new() } else { residue::factor(qbar) };
    match c.case {
        RwpCase::NoRwp => {
            if !separable_of_degree(qbar, c.genus + 1) {
                return Err(DescentError::NotOrdinaryPresentation(format!(
                    "Q mod 2 is not separable of degree {}",
                    c.genus + 1
                )));
            }
            Ok(OrdinaryData { qbar_factors, ordinary: true, beta_shift: None })
        }
        RwpCase::OneRwp => {
            let beta = (0..4).find(|&b| admissible_shift(c, b).is_ok()).ok_or_else(|| {
                DescentError::NotOrdinaryPresentation("no shift in 0..3 gives a separable Q′ of degree g+1".into())
            })?;
            Ok(OrdinaryData { qbar_factors, ordinary: true, beta_shift: Some(beta) })
        }
    }
}

/// Shifts in 0..3 admissible for an odd-degree model.
pub fn admissible_shifts(c: &CurveModel) -> Vec<i64> {
    (0..4).filter(|&b| admissible_shift(c, b).is_ok()).collect()
}

fn admissible_shift(c: &CurveModel, beta: i64) -> Result<Vec<BigInt>> {
    let b = BigInt::from(beta);
    if eval(&c.f, &b).is_even() {
        return Err(DescentError::BadShift { beta, reason: "f(β) is even".into() });
    }
    let q_new = shifted_reversal(&c.q, &b, c.genus + 1);
    if !separable_of_degree(reduce_mod2(&q_new), c.genus + 1) {
        return Err(DescentError::BadShift { beta, reason: "Q′ mod 2 is not separable of degree g+1".into() });
    }
    Ok(q_new)
}

/// f′(x) = x^{2g+2}·f(β + 1/x), Q′(x) = x^{g+1}·Q(β + 1/x).
pub fn to_even_model(c: &CurveModel, beta: i64) -> Result<ModelTransform> {
    if c.case != RwpCase::OneRwp {
        return Err(DescentError::BadShift { beta, reason: "model already has even degree".into() });
    }
    let q_new = admissible_shift(c, beta)?;
    let b = BigInt::from(beta);
    let g = c.genus;
    let f_new = shifted_reversal(&c.f, &b, 2 * g + 2);
    let p_new = shifted_reversal(&c.p, &b, 2 * g + 2);
    debug_assert_eq!(poly_add(&poly_scale(&p_new, &BigInt::from(4)), &poly_mul(&q_new, &q_new)), f_new);
    let label = c.label.as_ref().map(|l| format!("{l} (shift {beta})"));
    let even_model = CurveModel { label, p: p_new, q: q_new, f: f_new, genus: g, case: RwpCase::NoRwp };
    Ok(ModelTransform { beta, even_model })
}

/// The model whose Q̄ is separable of degree g+1, with the shift used (if any).
pub fn ordinary_even_model(c: &CurveModel) -> Result<(CurveModel, Option<i64>)> {
    let data = check_good_ordinary_at_2(c)?;
    match data.beta_shift {
        None => Ok((c.clone(), None)),
        Some(beta) => Ok((to_even_model(c, beta)?.even_model, Some(beta))),
    }
}

/// Coefficients of f′ − Q′², which must all be divisible by 4.
pub fn mod4_defect(c: &CurveModel) -> Vec<BigInt> {
    let sq = poly_mul(&c.q, &c.q);
    let neg: Vec<BigInt> = sq.iter().map(|x| -x).collect();
    poly_add(&c.f, &neg).into_iter().map(|x| x.mod_floor(&BigInt::from(4))).collect()
}

/// Largest absolute coefficient, used to size precision.
pub fn height_bits(p: &[BigInt]) -> u64 {
    p.iter().map(|c| c.abs().bits()).max().unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn parse_216663() {
        let c = parse_curve(&ints(&[-1, 1, -4, 3, -2, 1]), &ints(&[1, 1, 1]), None).unwrap();
        assert_eq!(c.f, ints(&[-3, 6, -13, 14, -7, 4]));
        assert_eq!(c.genus, 2);
        assert_eq!(c.case, RwpCase::OneRwp);
    }

    #[test]
    fn parse_10651() {
        let c = parse_curve(&ints(&[0, -1, 0, 0, -2, -1]), &ints(&[1, 1, 0, 1]), None).unwrap();
        assert_eq!(c.f, ints(&[1, -2, 1, 2, -6, -4, 1]));
        assert_eq!(c.genus, 2);
        assert_eq!(c.case, RwpCase::NoRwp);
    }

    #[test]
    fn degenerate_inputs() {
        assert!(matches!(parse_curve(&[], &ints(&[0, 0, 1]), None), Err(DescentError::DegenerateCurve(_))));
        assert!(matches!(parse_curve(&[], &[], None), Err(DescentError::DegenerateCurve(_))));
        // f = (x³ + x + 1)² has every root doubled.
        assert!(matches!(parse_curve(&[], &ints(&[1, 1, 0, 1]), None), Err(DescentError::DegenerateCurve(_))));
    }

    #[test]
    fn squarefree_test() {
        assert!(is_squarefree(&ints(&[-1, 0, 1])));
        assert!(!is_squarefree(&ints(&[1, -2, 1])));
        assert!(!is_squarefree(&ints(&[0, 0, 1, 1])));
    }

    #[test]
    fn ordinary_checks() {
        let c = parse_curve(&ints(&[-1, 1, -4, 3, -2, 1]), &ints(&[1, 1, 1]), None).unwrap();
        let d = check_good_ordinary_at_2(&c).unwrap();
        assert_eq!(d.beta_shift, Some(0));
        assert_eq!(d.qbar_factors, vec![(0b111, 1)]);

        let c = parse_curve(&ints(&[0, -1, 0, 0, -2, -1]), &ints(&[1, 1, 0, 1]), None).unwrap();
        let d = check_good_ordinary_at_2(&c).unwrap();
        assert!(d.ordinary);
        assert_eq!(d.beta_shift, None);

        // Q̄ = (x + 1)² is not separable.
        let c = parse_curve(&ints(&[1, 0, 0, 0, 0, 0, 1]), &ints(&[1, 0, 1]), None).unwrap();
        assert!(matches!(check_good_ordinary_at_2(&c), Err(DescentError::NotOrdinaryPresentation(_))));
    }

    #[test]
    fn even_model_216663() {
        let c = parse_curve(&ints(&[-1, 1, -4, 3, -2, 1]), &ints(&[1, 1, 1]), None).unwrap();
        let t = to_even_model(&c, 0).unwrap();
        assert_eq!(t.even_model.f, ints(&[0, 4, -7, 14, -13, 6, -3]));
        assert_eq!(t.even_model.q, ints(&[0, 1, 1, 1]));
        assert!(mod4_defect(&t.even_model).iter().all(|x| x.is_zero()));
    }

    #[test]
    fn genus3_shift_has_degree_four_q() {
        let c = parse_curve(&ints(&[0, 2, 4, 0, -7, -3, 3, 1]), &ints(&[1, 0, 1, 1]), None).unwrap();
        assert_eq!(c.case, RwpCase::OneRwp);
        let beta = check_good_ordinary_at_2(&c).unwrap().beta_shift.unwrap();
        let t = to_even_model(&c, beta).unwrap();
        assert_eq!(t.even_model.q.len(), 5);
        assert_eq!(t.even_model.f.len(), 9);
        assert!(t.even_model.f[0].is_zero());
        assert!(t.even_model.q[0].is_zero());
    }

    #[test]
    fn bad_shift_when_f_beta_even() {
        // Q = x² + 1 makes f(1) even.
        let c = parse_curve(&ints(&[1, 0, 0, 0, 0, 1]), &ints(&[1, 0, 1]), None).unwrap();
        assert!(eval(&c.f, &BigInt::one()).is_even());
        assert!(matches!(to_even_model(&c, 1), Err(DescentError::BadShift { beta: 1, .. })));
    }

    #[test]
    fn json_round_trip() {
        let c = parse_curve_json(r#"{"label": "x", "P": [-1, 1, -4, 3, -2, 1], "Q": [1, 1, 1]}"#).unwrap();
        assert_eq!(c.label.as_deref(), Some("x"));
        assert!(matches!(parse_curve_json(r#"{"P": [1, 2"#), Err(DescentError::Schema(_))));
    }

    proptest! {
        #[test]
        fn shift_identities(p in prop::collection::vec(-20i64..20, 6..8), q in prop::collection::vec(-3i64..3, 1..4), beta in 0i64..4) {
            let Ok(c) = parse_curve(&ints(&p), &ints(&q), None) else { return Ok(()) };
            if c.case != RwpCase::OneRwp { return Ok(()) }
            let Ok(t) = to_even_model(&c, beta) else { return Ok(()) };
            let e = &t.even_model;
            prop_assert_eq!(e.f.len(), 2 * c.genus + 3);
            prop_assert_eq!(e.q.len(), c.genus + 2);
            prop_assert!(e.f[0].is_zero());
            prop_assert!(mod4_defect(e).iter().all(|x| x.is_zero()));
            // At x = 1 the substitution reads f′(1) = f(β + 1).
            prop_assert_eq!(eval(&e.f, &BigInt::one()), eval(&c.f, &BigInt::from(beta + 1)));
        }
    }
}
