//! F₂[x] as bitmasks, and the finite fields F_{2^d} built from them.

/// Carry-less product of two F₂ polynomials; the caller keeps the degree sum below 128.
pub fn clmul(a: u64, b: u64) -> u128 {
    let mut r = 0u128;
    let mut b = b;
    let mut i = 0;
    while b != 0 {
        if b & 1 == 1 {
            r ^= (a as u128) << i;
        }
        b >>= 1;
        i += 1;
    }
    r
}

pub fn degree(p: u128) -> i32 {
    127 - p.leading_zeros() as i32
}

pub fn rem(a: u128, m: u64) -> u64 {
    let dm = degree(m as u128);
    assert!(dm >= 0, "division by the zero polynomial");
    let mut a = a;
    while degree(a) >= dm {
        a ^= (m as u128) << (degree(a) - dm);
    }
    a as u64
}

pub fn div_rem(a: u64, m: u64) -> (u64, u64) {
    let dm = degree(m as u128);
    assert!(dm >= 0, "division by the zero polynomial");
    let (mut q, mut r) = (0u64, a);
    while degree(r as u128) >= dm {
        let s = degree(r as u128) - dm;
        q |= 1 << s;
        r ^= m << s;
    }
    (q, r)
}

pub fn gcd(a: u64, b: u64) -> u64 {
    let (mut a, mut b) = (a, b);
    while b != 0 {
        let r = div_rem(a, b).1;
        a = b;
        b = r;
    }
    a
}

pub fn derivative(p: u64) -> u64 {
    // d/dx x^k = k x^(k−1): odd exponents survive.
    (p >> 1) & 0x5555_5555_5555_5555
}

pub fn is_irreducible(p: u64) -> bool {
    let d = degree(p as u128);
    if d <= 0 {
        return false;
    }
    // Trial division by every polynomial of degree ≤ d/2.
    for q in 2u64..(1u64 << (d / 2 + 1)) {
        if degree(q as u128) >= 1 && rem(p as u128, q) == 0 {
            return false;
        }
    }
    true
}

/// The numerically smallest irreducible polynomial of degree `d`.
pub fn smallest_irreducible(d: u32) -> u64 {
    assert!((1..=31).contains(&d), "unsupported residue degree {d}");
    ((1u64 << d)..(1u64 << (d + 1))).find(|&p| is_irreducible(p)).expect("irreducibles exist in every degree")
}

/// Factorization into irreducibles with multiplicities, sorted by (degree, bitmask).
pub fn factor(p: u64) -> Vec<(u64, u32)> {
    assert!(p != 0, "factoring the zero polynomial");
    let mut rest = p;
    let mut out = Vec::new();
    let mut q = 2u64;
    while degree(rest as u128) >= 1 {
        if degree(q as u128) * 2 > degree(rest as u128) {
            out.push((rest, 1));
            break;
        }
        if is_irreducible(q) {
            let mut mult = 0;
            while rem(rest as u128, q) == 0 {
                rest = div_rem(rest, q).0;
                mult += 1;
            }
            if mult > 0 {
                out.push((q, mult));
            }
        }
        q += 1;
    }
    out.sort_by_key(|&(f, _)| (degree(f as u128), f));
    out
}

/// F_{2^d} = F₂[x]/(m) with elements as bitmasks of degree < d.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ResidueField {
    degree: u32,
    modulus: u64,
}

impl ResidueField {
    pub fn new(modulus: u64) -> Option<Self> {
        is_irreducible(modulus).then(|| ResidueField { degree: degree(modulus as u128) as u32, modulus })
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn order(&self) -> u64 {
        1u64 << self.degree
    }

    pub fn elements(&self) -> impl Iterator<Item = u64> {
        0..self.order()
    }

    pub fn mul(&self, a: u64, b: u64) -> u64 {
        rem(clmul(a, b), self.modulus)
    }

    pub fn square(&self, a: u64) -> u64 {
        self.mul(a, a)
    }

    pub fn pow(&self, a: u64, mut e: u64) -> u64 {
        let mut base = a;
        let mut acc = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.square(base);
            e >>= 1;
        }
        acc
    }

    pub fn inv(&self, a: u64) -> u64 {
        assert!(a != 0, "inverse of zero in F_2^d");
        self.pow(a, self.order() - 2)
    }

    /// The unique square root: a^(2^(d−1)).
    pub fn sqrt(&self, a: u64) -> u64 {
        let mut r = a;
        for _ in 1..self.degree {
            r = self.square(r);
        }
        r
    }

    pub fn frobenius(&self, a: u64) -> u64 {
        self.square(a)
    }

    /// Absolute trace to F₂.
    pub fn trace(&self, a: u64) -> u64 {
        let mut t = 0;
        let mut c = a;
        for _ in 0..self.degree {
            t ^= c;
            c = self.square(c);
        }
        debug_assert!(t <= 1);
        t
    }

    /// Smallest element of trace 1.
    pub fn trace_one(&self) -> u64 {
        self.elements().find(|&a| self.trace(a) == 1).expect("trace is surjective")
    }

    /// Solves a² + a = b; a solution exists iff Tr(b) = 0. Returns the smaller root.
    pub fn artin_schreier(&self, b: u64) -> Option<u64> {
        if self.trace(b) != 0 {
            return None;
        }
        let d = self.degree as usize;
        // Columns of the F₂-linear map a ↦ a² + a, augmented with b.
        let mut rows: Vec<u64> = vec![0; d];
        for j in 0..d {
            let img = self.square(1 << j) ^ (1 << j);
            for (i, row) in rows.iter_mut().enumerate() {
                if (img >> i) & 1 == 1 {
                    *row |= 1 << j;
                }
            }
        }
        for (i, row) in rows.iter_mut().enumerate() {
            if (b >> i) & 1 == 1 {
                *row |= 1 << d;
            }
        }
        let mut pivots = Vec::new();
        let mut r = 0;
        for col in 0..d {
            let Some(p) = (r..d).find(|&k| (rows[k] >> col) & 1 == 1) else { continue };
            rows.swap(r, p);
            for k in 0..d {
                if k != r && (rows[k] >> col) & 1 == 1 {
                    rows[k] ^= rows[r];
                }
            }
            pivots.push(col);
            r += 1;
        }
        let mut a = 0u64;
        for (k, &col) in pivots.iter().enumerate() {
            if (rows[k] >> d) & 1 == 1 {
                a |= 1 << col;
            }
        }
        debug_assert_eq!(self.square(a) ^ a, b);
        Some(a.min(a ^ 1))
    }

    /// Evaluates an F₂-coefficient polynomial (bitmask) at `a`.
    pub fn eval_f2_poly(&self, p: u64, a: u64) -> u64 {
        let mut acc = 0u64;
        for k in (0..64).rev() {
            acc = self.mul(acc, a);
            if (p >> k) & 1 == 1 {
                acc ^= 1;
            }
        }
        acc
    }

    /// Roots in this field of an F₂-coefficient polynomial, in increasing order.
    pub fn roots_of_f2_poly(&self, p: u64) -> Vec<u64> {
        self.elements().filter(|&a| self.eval_f2_poly(p, a) == 0).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_irreducibles() {
        assert_eq!(smallest_irreducible(1), 0b10);
        assert_eq!(smallest_irreducible(2), 0b111);
        assert_eq!(smallest_irreducible(3), 0b1011);
        assert_eq!(smallest_irreducible(4), 0b10011);
        assert!(!is_irreducible(0b101)); // x²+1 = (x+1)²
    }

    #[test]
    fn factor_examples() {
        // x³+x²+x = x(x²+x+1)
        assert_eq!(factor(0b1110), vec![(0b10, 1), (0b111, 1)]);
        // x²+1 = (x+1)²
        assert_eq!(factor(0b101), vec![(0b11, 2)]);
        // x⁴+x+1 irreducible
        assert_eq!(factor(0b10011), vec![(0b10011, 1)]);
    }

    #[test]
    fn derivative_and_gcd() {
        assert_eq!(derivative(0b1011), 0b101); // (x³+x+1)' = x²+1
        assert_eq!(gcd(0b101, derivative(0b101)), 0b101); // (x²+1)' = 0
    }

    #[test]
    fn field_axioms_f16() {
        let k = ResidueField::new(0b10011).unwrap();
        for a in 1..16 {
            assert_eq!(k.mul(a, k.inv(a)), 1);
            assert_eq!(k.square(k.sqrt(a)), a);
            assert_eq!(k.pow(a, 15), 1);
        }
        let ones = k.elements().filter(|&a| k.trace(a) == 1).count();
        assert_eq!(ones, 8);
        for b in k.elements() {
            match k.artin_schreier(b) {
                Some(a) => assert_eq!(k.square(a) ^ a, b),
                None => assert_eq!(k.trace(b), 1),
            }
        }
    }

    #[test]
    fn roots_in_f4() {
        let k = ResidueField::new(0b111).unwrap();
        assert_eq!(k.roots_of_f2_poly(0b111), vec![0b10, 0b11]);
        assert_eq!(k.roots_of_f2_poly(0b1110), vec![0, 0b10, 0b11]);
        assert!(ResidueField::new(0b101).is_none());
    }
}
