//! Finite fields F_q = F_p[x]/(f) with q <= 255, encoded as small integers.
//!
//! An element is stored as the integer `c_0 + c_1 p + ... + c_{e-1} p^{e-1}`
//! where `c_i` is the coefficient of `x^i`. For prime fields the encoding is
//! the usual residue. All arithmetic goes through precomputed tables.

use crate::error::{Error, Result};
use serde::Serialize;

/// A field element, as an index into the field tables.
pub type Fe = u8;

/// Largest field size supported by the `u8` element encoding.
pub const MAX_Q: u32 = 255;

/// One fixed irreducible modulus per non-prime field size up to 27,
/// ascending coefficients including the leading 1.
const BUILTIN_MODULI: &[(u32, u32, &[u32])] = &[
    (2, 2, &[1, 1, 1]),
    (2, 3, &[1, 1, 0, 1]),
    (2, 4, &[1, 1, 0, 0, 1]),
    (3, 2, &[1, 0, 1]),
    (3, 3, &[1, 2, 0, 1]),
    (5, 2, &[2, 0, 1]),
];

#[derive(Clone, Debug, Serialize)]
pub struct FieldInfo {
    pub p: u32,
    pub e: u32,
    pub q: u32,
    pub modulus: Vec<u32>,
}

#[derive(Clone, Debug)]
pub struct Fq {
    p: u32,
    e: u32,
    q: u32,
    modulus: Vec<u32>,
    add: Vec<Fe>,
    mul: Vec<Fe>,
    neg: Vec<Fe>,
    inv: Vec<Fe>,
    trace: Vec<u32>,
    generator: Fe,
}

fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Splits a prime power into `(p, e)`.
pub fn prime_power(q: u32) -> Option<(u32, u32)> {
    if q < 2 {
        return None;
    }
    let mut p = 2;
    while q % p != 0 {
        p += 1;
    }
    let (mut r, mut e) = (q, 0);
    while r % p == 0 {
        r /= p;
        e += 1;
    }
    (r == 1).then_some((p, e))
}

impl Fq {
    /// The field with `q` elements using the built-in modulus.
    pub fn new(q: u32) -> Result<Fq> {
        let (p, e) = prime_power(q)
            .ok_or_else(|| Error::InvalidField(format!("{q} is not a prime power")))?;
        Fq::with_char(p, e, None)
    }

    /// The field of characteristic `p` and degree `e`, optionally with an
    /// explicit modulus (ascending coefficients, monic of degree `e`).
    pub fn with_char(p: u32, e: u32, modulus: Option<Vec<u32>>) -> Result<Fq> {
        if !is_prime(p) {
            return Err(Error::InvalidField(format!("{p} is not prime")));
        }
        if e == 0 {
            return Err(Error::InvalidField("extension degree must be >= 1".into()));
        }
        let q = p
            .checked_pow(e)
            .filter(|&q| q <= MAX_Q)
            .ok_or_else(|| Error::InvalidField(format!("{p}^{e} exceeds {MAX_Q}")))?;
        let modulus = match modulus {
            Some(m) => {
                if m.len() != e as usize + 1 || m[e as usize] != 1 || m.iter().any(|&c| c >= p) {
                    return Err(Error::InvalidField(format!(
                        "modulus must be monic of degree {e} with coefficients below {p}"
                    )));
                }
                m
            }
            None if e == 1 => vec![0, 1],
            None => BUILTIN_MODULI
                .iter()
                .find(|(bp, be, _)| *bp == p && *be == e)
                .map(|(_, _, m)| m.to_vec())
                .ok_or_else(|| {
                    Error::InvalidField(format!(
                        "no built-in modulus for {p}^{e}; pass one explicitly"
                    ))
                })?,
        };
        let qs = q as usize;
        let digits = |a: usize| -> Vec<u32> {
            let mut v = vec![0u32; e as usize];
            let mut a = a as u32;
            for d in v.iter_mut() {
                *d = a % p;
                a /= p;
            }
            v
        };
        let encode = |v: &[u32]| -> Fe {
            let mut r = 0u32;
            for &d in v.iter().rev() {
                r = r * p + d;
            }
            r as Fe
        };
        let mut add = vec![0; qs * qs];
        let mut mul = vec![0; qs * qs];
        for a in 0..qs {
            let da = digits(a);
            for b in 0..qs {
                let db = digits(b);
                let s: Vec<u32> = da.iter().zip(&db).map(|(x, y)| (x + y) % p).collect();
                add[a * qs + b] = encode(&s);
                let mut prod = vec![0u32; 2 * e as usize];
                for (i, x) in da.iter().enumerate() {
                    for (j, y) in db.iter().enumerate() {
                        prod[i + j] = (prod[i + j] + x * y) % p;
                    }
                }
                for i in (e as usize..prod.len()).rev() {
                    let c = prod[i];
                    if c != 0 {
                        for (j, m) in modulus.iter().enumerate() {
                            let idx = i - e as usize + j;
                            prod[idx] = (prod[idx] + (p - c) * m) % p;
                        }
                    }
                }
                mul[a * qs + b] = encode(&prod[..e as usize]);
            }
        }
        let mut neg = vec![0; qs];
        let mut inv = vec![0; qs];
        for a in 0..qs {
            neg[a] = (0..qs).find(|&b| add[a * qs + b] == 0).unwrap() as Fe;
            if a != 0 {
                inv[a] = (0..qs)
                    .find(|&b| mul[a * qs + b] == 1)
                    .ok_or_else(|| Error::InvalidField("modulus is reducible".into()))?
                    as Fe;
            }
        }
        let mut fq = Fq {
            p,
            e,
            q,
            modulus,
            add,
            mul,
            neg,
            inv,
            trace: vec![0; qs],
            generator: 1,
        };
        for a in 0..qs {
            let mut t = 0 as Fe;
            let mut x = a as Fe;
            for _ in 0..e {
                t = fq.add(t, x);
                x = fq.pow(x, p as u64);
            }
            // the trace lies in the prime field, whose elements encode as 0..p
            fq.trace[a] = t as u32;
        }
        fq.generator = (1..qs as u32)
            .map(|g| g as Fe)
            .find(|&g| fq.order(g) == q - 1)
            .unwrap_or(1);
        Ok(fq)
    }

    pub fn p(&self) -> u32 {
        self.p
    }
    pub fn e(&self) -> u32 {
        self.e
    }
    pub fn q(&self) -> u32 {
        self.q
    }
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }
    pub fn info(&self) -> FieldInfo {
        FieldInfo {
            p: self.p,
            e: self.e,
            q: self.q,
            modulus: self.modulus.clone(),
        }
    }

    #[inline]
    pub fn add(&self, a: Fe, b: Fe) -> Fe {
        self.add[a as usize * self.q as usize + b as usize]
    }
    #[inline]
    pub fn sub(&self, a: Fe, b: Fe) -> Fe {
        self.add(a, self.neg[b as usize])
    }
    #[inline]
    pub fn neg(&self, a: Fe) -> Fe {
        self.neg[a as usize]
    }
    #[inline]
    pub fn mul(&self, a: Fe, b: Fe) -> Fe {
        self.mul[a as usize * self.q as usize + b as usize]
    }
    /// Multiplicative inverse; panics on zero.
    #[inline]
    pub fn inv(&self, a: Fe) -> Fe {
        assert!(a != 0, "inverse of zero in F_q");
        self.inv[a as usize]
    }
    #[inline]
    pub fn div(&self, a: Fe, b: Fe) -> Fe {
        self.mul(a, self.inv(b))
    }
    pub fn pow(&self, a: Fe, mut n: u64) -> Fe {
        let (mut r, mut b) = (1 as Fe, a);
        while n > 0 {
            if n & 1 == 1 {
                r = self.mul(r, b);
            }
            b = self.mul(b, b);
            n >>= 1;
        }
        r
    }
    fn order(&self, a: Fe) -> u32 {
        let (mut x, mut n) = (a, 1);
        while x != 1 {
            x = self.mul(x, a);
            n += 1;
        }
        n
    }
    /// Absolute trace to F_p, returned as the residue in `0..p`.
    #[inline]
    pub fn trace(&self, a: Fe) -> u32 {
        self.trace[a as usize]
    }
    /// A generator of the cyclic group F_q^×.
    pub fn generator(&self) -> Fe {
        self.generator
    }
    /// Image of an integer under Z -> F_p ⊂ F_q.
    pub fn from_int(&self, n: i64) -> Fe {
        n.rem_euclid(self.p as i64) as Fe
    }
    /// The additive basis 1, x, ..., x^{e-1} of F_q over F_p.
    pub fn additive_basis(&self) -> Vec<Fe> {
        (0..self.e).map(|i| self.p.pow(i) as Fe).collect()
    }
    pub fn elements(&self) -> impl Iterator<Item = Fe> {
        (0..self.q).map(|a| a as Fe)
    }
    pub fn units(&self) -> impl Iterator<Item = Fe> {
        (1..self.q).map(|a| a as Fe)
    }
    /// Coefficients of `a` in the basis 1, x, ..., x^{e-1}.
    pub fn digits(&self, a: Fe) -> Vec<u32> {
        let mut v = Vec::with_capacity(self.e as usize);
        let mut a = a as u32;
        for _ in 0..self.e {
            v.push(a % self.p);
            a /= self.p;
        }
        v
    }
    pub fn from_digits(&self, d: &[u32]) -> Fe {
        let mut r = 0u32;
        for &c in d.iter().rev() {
            r = r * self.p + c % self.p;
        }
        r as Fe
    }
    /// Display form: an integer for prime fields, `[x^2+1]`-style otherwise.
    pub fn fmt_elem(&self, a: Fe) -> String {
        if self.e == 1 {
            return a.to_string();
        }
        let d = self.digits(a);
        if d.iter().skip(1).all(|&c| c == 0) {
            return d[0].to_string();
        }
        let mut terms = Vec::new();
        for (i, &c) in d.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            let mono = match i {
                0 => String::new(),
                1 => "x".to_string(),
                _ => format!("x^{i}"),
            };
            terms.push(match (c, i) {
                (_, 0) => c.to_string(),
                (1, _) => mono,
                _ => format!("{c}{mono}"),
            });
        }
        format!("[{}]", terms.join("+"))
    }
}

impl PartialEq for Fq {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.e == other.e && self.modulus == other.modulus
    }
}
impl Eq for Fq {}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn builtin_fields_construct() {
        for q in [2, 3, 4, 5, 7, 8, 9, 11, 13, 16, 17, 19, 23, 25, 27] {
            let f = Fq::new(q).unwrap();
            assert_eq!(f.q(), q);
            assert_eq!(f.order(f.generator()), q - 1);
        }
    }

    #[test]
    fn reducible_modulus_rejected() {
        assert!(Fq::with_char(2, 2, Some(vec![1, 0, 1])).is_err());
        assert!(Fq::new(6).is_err());
    }

    #[test]
    fn trace_is_onto_prime_field() {
        for q in [4, 8, 9, 25, 27] {
            let f = Fq::new(q).unwrap();
            let mut hits = vec![0u32; f.p() as usize];
            for a in f.elements() {
                hits[f.trace(a) as usize] += 1;
            }
            assert!(hits.iter().all(|&h| h == q / f.p()));
        }
    }

    #[test]
    fn element_formatting() {
        let f = Fq::new(4).unwrap();
        assert_eq!(f.fmt_elem(3), "[x+1]");
        assert_eq!(f.fmt_elem(2), "[x]");
        assert_eq!(f.fmt_elem(1), "1");
    }

    proptest! {
        #[test]
        fn field_axioms(qi in 0usize..8, a in 0u32..255, b in 0u32..255, c in 0u32..255) {
            let q = [2u32, 3, 4, 5, 8, 9, 25, 27][qi];
            let f = Fq::new(q).unwrap();
            let (a, b, c) = ((a % q) as Fe, (b % q) as Fe, (c % q) as Fe);
            prop_assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
            prop_assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
            prop_assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
            prop_assert_eq!(f.mul(a, b), f.mul(b, a));
            if a != 0 {
                prop_assert_eq!(f.mul(a, f.inv(a)), 1);
            }
            prop_assert_eq!(f.sub(f.add(a, b), b), a);
        }
    }
}
