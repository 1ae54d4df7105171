//! Cyclotomic integers Z[ζ_p] and the additive character of F_∞.

use crate::field::{Fe, Fq};
use crate::laurent::Laurent;
use num_bigint::BigInt;
use num_traits::{One, Zero};

/// `Σ coords[i] ζ^i` in the basis 1, ζ, ..., ζ^{p-2}.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CycInt {
    p: u32,
    coords: Vec<BigInt>,
}

impl CycInt {
    pub fn zero(p: u32) -> CycInt {
        CycInt { p, coords: vec![BigInt::zero(); (p - 1) as usize] }
    }
    pub fn from_int(p: u32, n: BigInt) -> CycInt {
        let mut c = CycInt::zero(p);
        c.coords[0] = n;
        c
    }
    /// ζ^t.
    pub fn zeta_pow(p: u32, t: u32) -> CycInt {
        let mut acc = CharSum::new(p);
        acc.add(t, &BigInt::one());
        acc.finish()
    }
    pub fn p(&self) -> u32 {
        self.p
    }
    pub fn coords(&self) -> &[BigInt] {
        &self.coords
    }
    pub fn add(&self, o: &CycInt) -> CycInt {
        assert_eq!(self.p, o.p);
        CycInt { p: self.p, coords: self.coords.iter().zip(&o.coords).map(|(a, b)| a + b).collect() }
    }
    pub fn mul(&self, o: &CycInt) -> CycInt {
        assert_eq!(self.p, o.p);
        let mut acc = CharSum::new(self.p);
        for (i, a) in self.coords.iter().enumerate() {
            for (j, b) in o.coords.iter().enumerate() {
                acc.add(((i + j) % self.p as usize) as u32, &(a * b));
            }
        }
        acc.finish()
    }
    /// The integer value when the element lies in Z·1.
    pub fn rational_value(&self) -> Option<BigInt> {
        self.coords[1..].iter().all(|c| c.is_zero()).then(|| self.coords[0].clone())
    }
}

/// Accumulates `Σ_t s_t ζ^t` over exponents `t` in `0..p` and reduces with
/// ζ^{p-1} = −(1 + ζ + ... + ζ^{p-2}).
#[derive(Clone, Debug)]
pub struct CharSum {
    buckets: Vec<BigInt>,
}

impl CharSum {
    pub fn new(p: u32) -> CharSum {
        CharSum { buckets: vec![BigInt::zero(); p as usize] }
    }
    pub fn add(&mut self, t: u32, v: &BigInt) {
        self.buckets[t as usize] += v;
    }
    pub fn add_i64(&mut self, t: u32, v: i64) {
        self.buckets[t as usize] += v;
    }
    pub fn finish(&self) -> CycInt {
        let p = self.buckets.len();
        let top = &self.buckets[p - 1];
        CycInt {
            p: p as u32,
            coords: self.buckets[..p - 1].iter().map(|b| b - top).collect(),
        }
    }
}

/// Exponent t with η(y) = ζ_p^t: the trace of the π¹-coefficient of `y`,
/// lifted to `0..p`.
pub fn eta_exponent(y: &Laurent, fq: &Fq) -> u32 {
    fq.trace(y.coeff(1))
}

/// Exponent of η(c·π) for a field element c.
pub fn eta_exponent_of_coeff(c: Fe, fq: &Fq) -> u32 {
    fq.trace(c)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn character_sum_over_units_is_minus_one() {
        for q in [2u32, 3, 4, 5, 7, 8, 9, 25, 27] {
            let fq = Fq::new(q).unwrap();
            let mut acc = CharSum::new(fq.p());
            for b in fq.units() {
                acc.add_i64(eta_exponent(&Laurent::monomial(b, 1), &fq), 1);
            }
            assert_eq!(acc.finish().rational_value(), Some(BigInt::from(-1)), "q={q}");
        }
    }

    #[test]
    fn zeta_is_not_rational() {
        assert_eq!(CycInt::zeta_pow(5, 2).rational_value(), None);
        assert_eq!(CycInt::zeta_pow(2, 1).rational_value(), Some(BigInt::from(-1)));
        let z = CycInt::zeta_pow(7, 3);
        let mut prod = CycInt::from_int(7, BigInt::one());
        for _ in 0..7 {
            prod = prod.mul(&z);
        }
        assert_eq!(prod.rational_value(), Some(BigInt::one()));
    }

    #[test]
    fn ring_laws() {
        let a = CycInt::zeta_pow(5, 1).add(&CycInt::from_int(5, 3.into()));
        let b = CycInt::zeta_pow(5, 3).add(&CycInt::zeta_pow(5, 4));
        let c = CycInt::zeta_pow(5, 2);
        assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
        assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
        assert_eq!(a.mul(&b), b.mul(&a));
    }
}
