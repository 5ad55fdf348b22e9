//! Finite fields GF(q) with q = p^e, stored as full lookup tables.
//!
//! Elements are the integers `0..q`. For extension fields the integer is read
//! as the base-p digits of the polynomial coefficients, lowest degree first,
//! so `x` is `p` and `x + 1` is `p + 1`. The modulus for each (p, e) is the
//! monic irreducible polynomial of degree e whose coefficient encoding is the
//! smallest integer, which fixes the encoding across runs and machines.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// A field element in its integer encoding.
pub type Elem = u8;

/// Largest supported field order. Elements are stored as `u8`.
pub const DEFAULT_FIELD_CAP: u32 = 256;

struct Tables {
    q: u32,
    p: u32,
    e: u32,
    /// Monic modulus, coefficients lowest degree first (length e + 1).
    modulus: Vec<u32>,
    add: Vec<Elem>,
    mul: Vec<Elem>,
    neg: Vec<Elem>,
    inv: Vec<Elem>,
    primitive: Elem,
}

/// A finite field handle. Cloning is cheap; the tables are shared.
#[derive(Clone)]
pub struct Field(Arc<Tables>);

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        // The modulus is a function of q, so q identifies the field.
        self.0.q == other.0.q
    }
}

impl Eq for Field {}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({})", self.0.q)
    }
}

/// Splits `q` into (p, e) with q = p^e, or `None` if q is not a prime power.
pub fn prime_power(q: u32) -> Option<(u32, u32)> {
    if q < 2 {
        return None;
    }
    let mut p = 2;
    while p * p <= q && !q.is_multiple_of(p) {
        p += 1;
    }
    if !q.is_multiple_of(p) {
        p = q;
    }
    let mut rest = q;
    let mut e = 0;
    while rest.is_multiple_of(p) {
        rest /= p;
        e += 1;
    }
    (rest == 1).then_some((p, e))
}

fn digits(mut a: u32, p: u32, e: u32) -> Vec<u32> {
    let mut out = Vec::with_capacity(e as usize);
    for _ in 0..e {
        out.push(a % p);
        a /= p;
    }
    out
}

fn undigits(ds: &[u32], p: u32) -> u32 {
    ds.iter().rev().fold(0, |acc, &d| acc * p + d)
}

/// Multiplies two polynomials (digit vectors of length e) modulo the monic `modulus`.
fn poly_mulmod(a: &[u32], b: &[u32], modulus: &[u32], p: u32) -> Vec<u32> {
    let e = modulus.len() - 1;
    let mut prod = vec![0u32; 2 * e];
    for (i, &ai) in a.iter().enumerate() {
        if ai == 0 {
            continue;
        }
        for (j, &bj) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + ai * bj) % p;
        }
    }
    for deg in (e..2 * e).rev() {
        let c = prod[deg];
        if c == 0 {
            continue;
        }
        // x^deg = -(lower terms of modulus) * x^(deg - e)
        for (k, &mk) in modulus.iter().enumerate().take(e) {
            let t = (c * mk) % p;
            let idx = deg - e + k;
            prod[idx] = (prod[idx] + p - t) % p;
        }
        prod[deg] = 0;
    }
    prod.truncate(e);
    prod
}

fn build_mul_table(q: u32, p: u32, e: u32, modulus: &[u32]) -> Vec<Elem> {
    let qs = q as usize;
    let ds: Vec<Vec<u32>> = (0..q).map(|a| digits(a, p, e)).collect();
    let mut mul = vec![0 as Elem; qs * qs];
    for a in 0..qs {
        for b in a..qs {
            let v = undigits(&poly_mulmod(&ds[a], &ds[b], modulus, p), p) as Elem;
            mul[a * qs + b] = v;
            mul[b * qs + a] = v;
        }
    }
    mul
}

fn has_zero_divisors(q: usize, mul: &[Elem]) -> bool {
    (1..q).any(|a| (1..q).any(|b| mul[a * q + b] == 0))
}

impl Field {
    /// Builds GF(q) with the default cap of 256.
    pub fn new(q: u32) -> Result<Field> {
        Self::with_cap(q, DEFAULT_FIELD_CAP)
    }

    /// Builds GF(q), rejecting orders above `cap`. The cap can only lower the
    /// hard limit of 256 imposed by the `u8` element encoding.
    pub fn with_cap(q: u32, cap: u32) -> Result<Field> {
        let cap = cap.min(DEFAULT_FIELD_CAP);
        let (p, e) = prime_power(q).ok_or(Error::NotPrimePower(q))?;
        if q > cap {
            return Err(Error::CapExceeded { q, cap });
        }
        let qs = q as usize;

        let (modulus, mul) = if e == 1 {
            let mul = (0..qs * qs)
                .map(|idx| (((idx / qs) * (idx % qs)) % qs) as Elem)
                .collect();
            (vec![0, 1], mul)
        } else {
            let lead = p.pow(e);
            let mut found = None;
            for low in 0..lead {
                let mut modulus = digits(low, p, e);
                modulus.push(1);
                // A reducible modulus leaves zero divisors in the quotient ring.
                if modulus[0] == 0 {
                    continue;
                }
                let mul = build_mul_table(q, p, e, &modulus);
                if !has_zero_divisors(qs, &mul) {
                    found = Some((modulus, mul));
                    break;
                }
            }
            found.ok_or_else(|| Error::InternalContradiction(format!("no irreducible polynomial for GF({q})")))?
        };

        let mut add = vec![0 as Elem; qs * qs];
        for a in 0..q {
            let da = digits(a, p, e);
            for b in 0..q {
                let db = digits(b, p, e);
                let sum: Vec<u32> = da.iter().zip(&db).map(|(x, y)| (x + y) % p).collect();
                add[(a * q + b) as usize] = undigits(&sum, p) as Elem;
            }
        }
        let mut neg = vec![0 as Elem; qs];
        let mut inv = vec![0 as Elem; qs];
        for a in 0..qs {
            neg[a] = (0..qs).find(|&b| add[a * qs + b] == 0).unwrap() as Elem;
            if a != 0 {
                inv[a] = (1..qs)
                    .find(|&b| mul[a * qs + b] == 1)
                    .ok_or_else(|| Error::InternalContradiction(format!("{a} has no inverse in GF({q})")))?
                    as Elem;
            }
        }

        let order = |a: usize| {
            let mut x = a;
            let mut k = 1;
            while x != 1 {
                x = mul[x * qs + a] as usize;
                k += 1;
            }
            k
        };
        let primitive = if qs == 2 {
            1
        } else {
            (2..qs).find(|&a| order(a) == qs - 1).unwrap() as Elem
        };

        Ok(Field(Arc::new(Tables {
            q,
            p,
            e,
            modulus,
            add,
            mul,
            neg,
            inv,
            primitive,
        })))
    }

    pub fn q(&self) -> u32 {
        self.0.q
    }

    /// Number of elements as a `usize`.
    pub fn order(&self) -> usize {
        self.0.q as usize
    }

    pub fn characteristic(&self) -> u32 {
        self.0.p
    }

    pub fn degree(&self) -> u32 {
        self.0.e
    }

    /// Modulus coefficients, lowest degree first. `[0, 1]` (the polynomial x) for prime fields.
    pub fn modulus(&self) -> &[u32] {
        &self.0.modulus
    }

    /// The smallest generator of the multiplicative group.
    pub fn primitive_element(&self) -> Elem {
        self.0.primitive
    }

    pub fn is_binary(&self) -> bool {
        self.0.q == 2
    }

    #[inline]
    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        self.0.add[a as usize * self.0.q as usize + b as usize]
    }

    #[inline]
    pub fn sub(&self, a: Elem, b: Elem) -> Elem {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn neg(&self, a: Elem) -> Elem {
        self.0.neg[a as usize]
    }

    #[inline]
    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        self.0.mul[a as usize * self.0.q as usize + b as usize]
    }

    /// Multiplicative inverse; `None` for zero.
    #[inline]
    pub fn inv(&self, a: Elem) -> Option<Elem> {
        (a != 0).then(|| self.0.inv[a as usize])
    }

    pub fn pow(&self, a: Elem, mut k: u64) -> Elem {
        let mut base = a;
        let mut acc = 1;
        while k > 0 {
            if k & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            k >>= 1;
        }
        acc
    }

    /// All elements in encoding order.
    pub fn elements(&self) -> impl Iterator<Item = Elem> {
        (0..self.0.q).map(|a| a as Elem)
    }

    pub fn check_element(&self, value: u32) -> Result<Elem> {
        if value < self.0.q {
            Ok(value as Elem)
        } else {
            Err(Error::ElementOutOfRange { value, q: self.0.q })
        }
    }

    /// `dst += a * src`, elementwise.
    #[inline]
    pub fn axpy(&self, dst: &mut [Elem], a: Elem, src: &[Elem]) {
        if a == 0 {
            return;
        }
        let qs = self.0.q as usize;
        let row = &self.0.mul[a as usize * qs..(a as usize + 1) * qs];
        for (d, &s) in dst.iter_mut().zip(src) {
            *d = self.0.add[*d as usize * qs + row[s as usize] as usize];
        }
    }

    #[inline]
    pub fn scale_in_place(&self, v: &mut [Elem], a: Elem) {
        for x in v.iter_mut() {
            *x = self.mul(a, *x);
        }
    }

    pub fn dot(&self, a: &[Elem], b: &[Elem]) -> Elem {
        a.iter().zip(b).fold(0, |acc, (&x, &y)| self.add(acc, self.mul(x, y)))
    }

    /// Exhaustively checks the field axioms on the tables. O(q^3).
    pub fn check_axioms(&self) -> bool {
        let all: Vec<Elem> = self.elements().collect();
        for &a in &all {
            if self.add(a, 0) != a || self.mul(a, 1) != a || self.add(a, self.neg(a)) != 0 {
                return false;
            }
            if a != 0 && self.mul(a, self.inv(a).unwrap()) != 1 {
                return false;
            }
            for &b in &all {
                if self.add(a, b) != self.add(b, a) || self.mul(a, b) != self.mul(b, a) {
                    return false;
                }
                for &c in &all {
                    if self.add(self.add(a, b), c) != self.add(a, self.add(b, c))
                        || self.mul(self.mul(a, b), c) != self.mul(a, self.mul(b, c))
                        || self.mul(a, self.add(b, c)) != self.add(self.mul(a, b), self.mul(a, c))
                    {
                        return false;
                    }
                }
            }
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_powers() {
        assert_eq!(prime_power(2), Some((2, 1)));
        assert_eq!(prime_power(8), Some((2, 3)));
        assert_eq!(prime_power(9), Some((3, 2)));
        assert_eq!(prime_power(49), Some((7, 2)));
        assert_eq!(prime_power(6), None);
        assert_eq!(prime_power(1), None);
        assert_eq!(prime_power(0), None);
    }

    #[test]
    fn binary_field_adds_by_xor() {
        let f = Field::new(2).unwrap();
        for a in 0..2 {
            for b in 0..2 {
                assert_eq!(f.add(a, b), a ^ b);
            }
        }
    }

    #[test]
    fn gf7_products() {
        let f = Field::new(7).unwrap();
        assert_eq!(f.mul(3, 5), 1);
        assert_eq!(f.inv(3), Some(5));
        assert_eq!(f.neg(2), 5);
    }

    #[test]
    fn gf4_uses_x2_x_1() {
        let f = Field::new(4).unwrap();
        assert_eq!(f.modulus(), &[1, 1, 1]);
        // x * x = x + 1
        assert_eq!(f.mul(2, 2), 3);
    }

    #[test]
    fn gf4_matches_polynomial_oracle() {
        // Independent oracle: carry-less multiply then reduce by x^2 + x + 1.
        fn oracle(a: u8, b: u8) -> u8 {
            let mut prod = 0u8;
            for i in 0..2 {
                if b >> i & 1 == 1 {
                    prod ^= a << i;
                }
            }
            if prod & 0b100 != 0 {
                prod ^= 0b111;
            }
            prod
        }
        let f = Field::new(4).unwrap();
        for a in 0..4 {
            for b in 0..4 {
                assert_eq!(f.mul(a, b), oracle(a, b), "{a}*{b}");
            }
        }
    }

    #[test]
    fn lowest_moduli() {
        assert_eq!(Field::new(8).unwrap().modulus(), &[1, 1, 0, 1]);
        // x^2 + 1 is irreducible over GF(3); encoding 1 beats x^2 + x + 2 (encoding 5).
        assert_eq!(Field::new(9).unwrap().modulus(), &[1, 0, 1]);
        assert_eq!(Field::new(256).unwrap().modulus(), &[1, 1, 0, 1, 1, 0, 0, 0, 1]);
    }

    #[test]
    fn axioms_hold_for_small_fields() {
        for q in [2, 3, 4, 5, 7, 8, 9, 16, 25, 27] {
            assert!(Field::new(q).unwrap().check_axioms(), "GF({q})");
        }
    }

    #[test]
    fn primitive_elements_generate() {
        for q in [2u32, 3, 4, 5, 7, 8, 9, 16, 256] {
            let f = Field::new(q).unwrap();
            let g = f.primitive_element();
            let mut seen = std::collections::HashSet::new();
            let mut x = 1;
            for _ in 0..q - 1 {
                seen.insert(x);
                x = f.mul(x, g);
            }
            assert_eq!(seen.len() as u32, q - 1, "GF({q})");
        }
    }

    #[test]
    fn rejects_bad_orders() {
        assert_eq!(Field::new(6), Err(Error::NotPrimePower(6)));
        assert_eq!(Field::new(512), Err(Error::CapExceeded { q: 512, cap: 256 }));
        assert_eq!(Field::with_cap(16, 8), Err(Error::CapExceeded { q: 16, cap: 8 }));
    }
}
