//! Polynomials in A = F_q[T].

use crate::field::{Fe, Fq};
use std::cmp::Ordering;

/// A polynomial with ascending coefficients and no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Poly(Vec<Fe>);

impl Ord for Poly {
    /// Degree first, then coefficient tuple from the leading end.
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .len()
            .cmp(&other.0.len())
            .then_with(|| self.0.iter().rev().cmp(other.0.iter().rev()))
    }
}
impl PartialOrd for Poly {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Poly {
    pub fn zero() -> Poly {
        Poly(Vec::new())
    }
    pub fn one() -> Poly {
        Poly(vec![1])
    }
    pub fn constant(c: Fe) -> Poly {
        Poly::from_coeffs(vec![c])
    }
    /// `T`.
    pub fn t() -> Poly {
        Poly(vec![0, 1])
    }
    /// `c·T^i`.
    pub fn monomial(c: Fe, i: usize) -> Poly {
        let mut v = vec![0; i + 1];
        v[i] = c;
        Poly::from_coeffs(v)
    }
    /// `T - a`.
    pub fn linear(fq: &Fq, a: Fe) -> Poly {
        Poly(vec![fq.neg(a), 1])
    }
    pub fn from_coeffs(mut v: Vec<Fe>) -> Poly {
        while v.last() == Some(&0) {
            v.pop();
        }
        Poly(v)
    }
    pub fn coeffs(&self) -> &[Fe] {
        &self.0
    }
    pub fn coeff(&self, i: usize) -> Fe {
        self.0.get(i).copied().unwrap_or(0)
    }
    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }
    pub fn is_one(&self) -> bool {
        self.0 == [1]
    }
    /// Degree; `None` stands for deg 0 = −∞.
    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }
    /// Degree with −1 for the zero polynomial; handy for bounds like `deg b < deg d`.
    pub fn deg(&self) -> i64 {
        self.0.len() as i64 - 1
    }
    pub fn leading(&self) -> Fe {
        self.0.last().copied().unwrap_or(0)
    }
    pub fn is_monic(&self) -> bool {
        self.leading() == 1
    }
    /// |a| = q^deg a, as an integer (0 for a = 0).
    pub fn norm(&self, fq: &Fq) -> u64 {
        match self.degree() {
            None => 0,
            Some(d) => (fq.q() as u64).pow(d as u32),
        }
    }

    /// The polynomial whose coefficient tuple is the base-q expansion of `i`.
    pub fn from_index(i: u64, q: u32) -> Poly {
        let mut v = Vec::new();
        let mut i = i;
        while i > 0 {
            v.push((i % q as u64) as Fe);
            i /= q as u64;
        }
        Poly(v)
    }
    /// Inverse of [`Poly::from_index`].
    pub fn index(&self, q: u32) -> u64 {
        self.0.iter().rev().fold(0u64, |acc, &c| acc * q as u64 + c as u64)
    }
    /// All polynomials of degree < d, in index order (so 0 first).
    pub fn all_below(d: usize, q: u32) -> impl Iterator<Item = Poly> {
        (0..(q as u64).pow(d as u32)).map(move |i| Poly::from_index(i, q))
    }
    /// All monic polynomials of degree exactly d, ordered by coefficient tuple.
    pub fn monics(d: usize, q: u32) -> impl Iterator<Item = Poly> {
        (0..(q as u64).pow(d as u32)).map(move |i| {
            let mut p = Poly::from_index(i, q).0;
            p.resize(d, 0);
            p.push(1);
            Poly(p)
        })
    }

    pub fn add(&self, o: &Poly, fq: &Fq) -> Poly {
        let n = self.0.len().max(o.0.len());
        Poly::from_coeffs((0..n).map(|i| fq.add(self.coeff(i), o.coeff(i))).collect())
    }
    pub fn sub(&self, o: &Poly, fq: &Fq) -> Poly {
        let n = self.0.len().max(o.0.len());
        Poly::from_coeffs((0..n).map(|i| fq.sub(self.coeff(i), o.coeff(i))).collect())
    }
    pub fn neg(&self, fq: &Fq) -> Poly {
        Poly(self.0.iter().map(|&c| fq.neg(c)).collect())
    }
    pub fn scale(&self, c: Fe, fq: &Fq) -> Poly {
        Poly::from_coeffs(self.0.iter().map(|&a| fq.mul(a, c)).collect())
    }
    pub fn mul(&self, o: &Poly, fq: &Fq) -> Poly {
        if self.is_zero() || o.is_zero() {
            return Poly::zero();
        }
        let mut r = vec![0; self.0.len() + o.0.len() - 1];
        for (i, &a) in self.0.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in o.0.iter().enumerate() {
                r[i + j] = fq.add(r[i + j], fq.mul(a, b));
            }
        }
        Poly::from_coeffs(r)
    }
    pub fn pow(&self, n: u32, fq: &Fq) -> Poly {
        let mut r = Poly::one();
        for _ in 0..n {
            r = r.mul(self, fq);
        }
        r
    }
    /// Euclidean division; panics if `d` is zero.
    pub fn divrem(&self, d: &Poly, fq: &Fq) -> (Poly, Poly) {
        assert!(!d.is_zero(), "division by the zero polynomial");
        if self.0.len() < d.0.len() {
            return (Poly::zero(), self.clone());
        }
        let mut r = self.0.clone();
        let dl = d.0.len();
        let lead_inv = fq.inv(d.leading());
        let mut quo = vec![0; r.len() - dl + 1];
        for i in (0..quo.len()).rev() {
            let c = fq.mul(r[i + dl - 1], lead_inv);
            quo[i] = c;
            if c != 0 {
                for (j, &dj) in d.0.iter().enumerate() {
                    r[i + j] = fq.sub(r[i + j], fq.mul(c, dj));
                }
            }
        }
        r.truncate(dl - 1);
        (Poly::from_coeffs(quo), Poly::from_coeffs(r))
    }
    pub fn rem(&self, d: &Poly, fq: &Fq) -> Poly {
        self.divrem(d, fq).1
    }
    /// Exact quotient if `d` divides `self`.
    pub fn div_exact(&self, d: &Poly, fq: &Fq) -> Option<Poly> {
        let (q, r) = self.divrem(d, fq);
        r.is_zero().then_some(q)
    }
    pub fn divides(&self, m: &Poly, fq: &Fq) -> bool {
        !self.is_zero() && m.rem(self, fq).is_zero()
    }
    /// Scale to leading coefficient 1 (zero stays zero).
    pub fn monic(&self, fq: &Fq) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        self.scale(fq.inv(self.leading()), fq)
    }
    /// Returns `(g, s, t)` with `g` monic, `g = s·a + t·b` and `g = gcd(a, b)`.
    /// For `a = b = 0` returns zeros.
    pub fn xgcd(a: &Poly, b: &Poly, fq: &Fq) -> (Poly, Poly, Poly) {
        let (mut r0, mut r1) = (a.clone(), b.clone());
        let (mut s0, mut s1) = (Poly::one(), Poly::zero());
        let (mut t0, mut t1) = (Poly::zero(), Poly::one());
        while !r1.is_zero() {
            let (qq, r) = r0.divrem(&r1, fq);
            let s = s0.sub(&qq.mul(&s1, fq), fq);
            let t = t0.sub(&qq.mul(&t1, fq), fq);
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s);
            t0 = std::mem::replace(&mut t1, t);
        }
        if r0.is_zero() {
            return (Poly::zero(), Poly::zero(), Poly::zero());
        }
        let c = fq.inv(r0.leading());
        (r0.scale(c, fq), s0.scale(c, fq), t0.scale(c, fq))
    }
    pub fn gcd(a: &Poly, b: &Poly, fq: &Fq) -> Poly {
        Poly::xgcd(a, b, fq).0
    }
    /// Inverse of `self` modulo `m` when the two are coprime.
    pub fn inv_mod(&self, m: &Poly, fq: &Fq) -> Option<Poly> {
        let (g, s, _) = Poly::xgcd(self, m, fq);
        g.is_one().then(|| s.rem(m, fq))
    }

    /// Human-readable form in the CLI grammar, e.g. `T^3 + [x+1]*T + 1`.
    pub fn fmt(&self, fq: &Fq) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut terms = Vec::new();
        for (i, &c) in self.0.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            let mono = match i {
                0 => String::new(),
                1 => "T".into(),
                _ => format!("T^{i}"),
            };
            let cs = fq.fmt_elem(c);
            terms.push(match (c, i) {
                (_, 0) => cs,
                (1, _) => mono,
                _ => format!("{cs}*{mono}"),
            });
        }
        terms.join(" + ")
    }
}

/// All monic irreducible polynomials of degree exactly `d`, sorted by
/// coefficient tuple (lexicographic from the constant term).
pub fn monic_irreducibles(d: usize, fq: &Fq) -> Vec<Poly> {
    assert!(d >= 1);
    let smaller: Vec<Poly> = (1..=d / 2).flat_map(|k| monic_irreducibles(k, fq)).collect();
    let mut out: Vec<Poly> = Poly::monics(d, fq.q())
        .filter(|f| smaller.iter().all(|p| !p.divides(f, fq)))
        .collect();
    out.sort_by(|a, b| a.coeffs().cmp(b.coeffs()));
    out
}

pub fn is_irreducible(f: &Poly, fq: &Fq) -> bool {
    match f.degree() {
        None | Some(0) => false,
        Some(d) => (1..=d / 2).all(|k| {
            Poly::monics(k, fq.q()).all(|g| !g.divides(f, fq))
        }),
    }
}

/// Factorization of a nonzero polynomial into monic irreducibles by trial
/// division. Returns the leading coefficient and `(prime, exponent)` pairs
/// sorted by prime.
pub fn factor(f: &Poly, fq: &Fq) -> (Fe, Vec<(Poly, u32)>) {
    assert!(!f.is_zero());
    let lead = f.leading();
    let mut rest = f.monic(fq);
    let mut out = Vec::new();
    let mut d = 1;
    while rest.deg() >= 2 * d as i64 {
        for p in monic_irreducibles(d, fq) {
            let mut e = 0;
            while let Some(qq) = rest.div_exact(&p, fq) {
                rest = qq;
                e += 1;
            }
            if e > 0 {
                out.push((p, e));
            }
        }
        d += 1;
    }
    if rest.deg() >= 1 {
        match out.iter_mut().find(|(p, _)| *p == rest) {
            Some(entry) => entry.1 += 1,
            None => out.push((rest, 1)),
        }
    }
    out.sort();
    (lead, out)
}

/// All monic divisors of `f`, sorted by degree then coefficients.
pub fn monic_divisors(f: &Poly, fq: &Fq) -> Vec<Poly> {
    let (_, fac) = factor(f, fq);
    let mut divs = vec![Poly::one()];
    for (p, e) in fac {
        let mut next = Vec::new();
        for d in &divs {
            let mut pk = Poly::one();
            for _ in 0..=e {
                next.push(d.mul(&pk, fq));
                pk = pk.mul(&p, fq);
            }
        }
        divs = next;
    }
    divs.sort();
    divs
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(c: &[u8]) -> Poly {
        Poly::from_coeffs(c.to_vec())
    }

    #[test]
    fn xgcd_examples() {
        let f2 = Fq::new(2).unwrap();
        let (g, s, t) = Poly::xgcd(&Poly::t(), &p(&[1, 1]), &f2);
        assert!(g.is_one());
        assert!(s.is_one() && t.is_one());
        let (g, _, _) = Poly::xgcd(&p(&[0, 0, 1]), &Poly::t(), &f2);
        assert_eq!(g, Poly::t());
        let f3 = Fq::new(3).unwrap();
        let (a, b) = (p(&[1, 0, 1]), p(&[1, 1]));
        let (g, s, t) = Poly::xgcd(&a, &b, &f3);
        assert_eq!(s.mul(&a, &f3).add(&t.mul(&b, &f3), &f3), g);
        assert!(g.is_monic());
    }

    #[test]
    fn irreducible_counts() {
        let f2 = Fq::new(2).unwrap();
        assert_eq!(monic_irreducibles(2, &f2), vec![p(&[1, 1, 1])]);
        assert_eq!(monic_irreducibles(3, &f2).len(), 2);
        assert_eq!(monic_irreducibles(4, &f2).len(), 3);
        let f3 = Fq::new(3).unwrap();
        assert_eq!(
            monic_irreducibles(1, &f3),
            vec![p(&[0, 1]), p(&[1, 1]), p(&[2, 1])]
        );
        for q in [2u32, 3, 4, 5] {
            let fq = Fq::new(q).unwrap();
            // Gauss: d·N_d = Σ_{k|d} μ(d/k) q^k
            let qq = q as usize;
            assert_eq!(monic_irreducibles(2, &fq).len(), (qq * qq - qq) / 2);
            assert_eq!(monic_irreducibles(3, &fq).len(), (qq.pow(3) - qq) / 3);
        }
    }

    #[test]
    fn factor_and_divisors() {
        let f3 = Fq::new(3).unwrap();
        let x = Poly::t();
        let n = x.mul(&x, &f3).mul(&Poly::linear(&f3, 1), &f3);
        let (_, fac) = factor(&n, &f3);
        assert_eq!(fac, vec![(x.clone(), 2), (Poly::linear(&f3, 1), 1)]);
        assert_eq!(monic_divisors(&n, &f3).len(), 6);
    }

    #[test]
    fn formatting() {
        let f4 = Fq::new(4).unwrap();
        let f = p(&[1, 3, 0, 1]);
        assert_eq!(f.fmt(&f4), "T^3 + [x+1]*T + 1");
    }

    proptest! {
        #[test]
        fn ring_axioms(qi in 0usize..4, a in 0u64..5000, b in 0u64..5000, c in 0u64..5000) {
            let q = [2u32, 3, 4, 5][qi];
            let fq = Fq::new(q).unwrap();
            let (a, b, c) = (Poly::from_index(a, q), Poly::from_index(b, q), Poly::from_index(c, q));
            prop_assert_eq!(a.add(&b, &fq).add(&c, &fq), a.add(&b.add(&c, &fq), &fq));
            prop_assert_eq!(a.mul(&b, &fq).mul(&c, &fq), a.mul(&b.mul(&c, &fq), &fq));
            prop_assert_eq!(a.mul(&b.add(&c, &fq), &fq), a.mul(&b, &fq).add(&a.mul(&c, &fq), &fq));
            if !b.is_zero() {
                let (qq, r) = a.divrem(&b, &fq);
                prop_assert_eq!(qq.mul(&b, &fq).add(&r, &fq), a.clone());
                prop_assert!(r.deg() < b.deg());
            }
            if !(a.is_zero() && b.is_zero()) {
                let (g, s, t) = Poly::xgcd(&a, &b, &fq);
                prop_assert_eq!(s.mul(&a, &fq).add(&t.mul(&b, &fq), &fq), g.clone());
                prop_assert!(g.divides(&a, &fq) || a.is_zero());
                prop_assert!(g.divides(&b, &fq) || b.is_zero());
            }
        }
    }
}
