//! Laurent series over F_q in the uniformizer π = 1/T, with tracked precision.
//!
//! A value is `Σ_{i} c_i π^{val+i}` plus, when `prec` is `Some(P)`, an
//! unknown tail in `π^P·O_∞`. Elements of A embed exactly through T = π^{-1}.

use crate::error::{Error, Result};
use crate::field::{Fe, Fq};
use crate::poly::Poly;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Laurent {
    val: i64,
    coeffs: Vec<Fe>,
    prec: Option<i64>,
}

impl Laurent {
    pub fn zero() -> Laurent {
        Laurent { val: 0, coeffs: Vec::new(), prec: None }
    }
    pub fn one() -> Laurent {
        Laurent::monomial(1, 0)
    }
    /// `c·π^k` (exact).
    pub fn monomial(c: Fe, k: i64) -> Laurent {
        Laurent::new(k, vec![c], None)
    }
    /// `π^k`.
    pub fn pi_pow(k: i64) -> Laurent {
        Laurent::monomial(1, k)
    }
    /// Builds and normalizes; coefficients at exponents `>= prec` are dropped.
    pub fn new(val: i64, mut coeffs: Vec<Fe>, prec: Option<i64>) -> Laurent {
        if let Some(p) = prec {
            let keep = (p - val).max(0) as usize;
            coeffs.truncate(keep);
        }
        let lead = coeffs.iter().position(|&c| c != 0);
        match lead {
            None => Laurent { val: 0, coeffs: Vec::new(), prec },
            Some(z) => {
                coeffs.drain(..z);
                while coeffs.last() == Some(&0) {
                    coeffs.pop();
                }
                Laurent { val: val + z as i64, coeffs, prec }
            }
        }
    }
    /// Exact element with the given coefficients `c_i` of `π^i`, `i` in `lo..`.
    pub fn from_terms(lo: i64, coeffs: Vec<Fe>) -> Laurent {
        Laurent::new(lo, coeffs, None)
    }
    /// Embeds a polynomial in T.
    pub fn from_poly(p: &Poly) -> Laurent {
        match p.degree() {
            None => Laurent::zero(),
            Some(d) => Laurent::new(-(d as i64), p.coeffs().iter().rev().copied().collect(), None),
        }
    }

    pub fn is_exact(&self) -> bool {
        self.prec.is_none()
    }
    pub fn prec(&self) -> Option<i64> {
        self.prec
    }
    /// True for the exact zero only.
    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty() && self.prec.is_none()
    }
    /// True when no nonzero coefficient is known.
    pub fn is_known_zero_prefix(&self) -> bool {
        self.coeffs.is_empty()
    }
    /// Valuation; `Ok(None)` for the exact zero. Fails when every known
    /// coefficient is zero but the tail is unknown.
    pub fn valuation(&self) -> Result<Option<i64>> {
        if !self.coeffs.is_empty() {
            Ok(Some(self.val))
        } else if self.prec.is_none() {
            Ok(None)
        } else {
            Err(Error::IndeterminatePrecision)
        }
    }
    /// Valuation of a nonzero exact element (panics otherwise).
    pub fn val(&self) -> i64 {
        assert!(!self.coeffs.is_empty(), "valuation of zero");
        self.val
    }
    /// A lower bound for the valuation (`prec` for inexact zero, `i64::MAX` for exact zero).
    fn val_lower(&self) -> i64 {
        if !self.coeffs.is_empty() {
            self.val
        } else {
            self.prec.unwrap_or(i64::MAX)
        }
    }
    pub fn coeff(&self, i: i64) -> Fe {
        if i < self.val {
            return 0;
        }
        self.coeffs.get((i - self.val) as usize).copied().unwrap_or(0)
    }
    pub fn leading(&self) -> Fe {
        self.coeffs.first().copied().unwrap_or(0)
    }
    /// Smallest exponent strictly above every stored coefficient.
    pub fn top(&self) -> i64 {
        self.val + self.coeffs.len() as i64
    }
    /// (exponent, coefficient) pairs of the nonzero stored terms.
    pub fn terms(&self) -> impl Iterator<Item = (i64, Fe)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(move |(i, &c)| (self.val + i as i64, c))
    }

    fn combine_prec(a: Option<i64>, b: Option<i64>) -> Option<i64> {
        match (a, b) {
            (None, x) | (x, None) => x,
            (Some(x), Some(y)) => Some(x.min(y)),
        }
    }

    pub fn add(&self, o: &Laurent, fq: &Fq) -> Laurent {
        self.lin(o, fq, false)
    }
    pub fn sub(&self, o: &Laurent, fq: &Fq) -> Laurent {
        self.lin(o, fq, true)
    }
    fn lin(&self, o: &Laurent, fq: &Fq, negate: bool) -> Laurent {
        let prec = Laurent::combine_prec(self.prec, o.prec);
        if self.coeffs.is_empty() && o.coeffs.is_empty() {
            return Laurent::new(0, Vec::new(), prec);
        }
        let lo = if self.coeffs.is_empty() {
            o.val
        } else if o.coeffs.is_empty() {
            self.val
        } else {
            self.val.min(o.val)
        };
        let hi = self.top().max(o.top());
        let v = (lo..hi)
            .map(|i| {
                let b = o.coeff(i);
                fq.add(self.coeff(i), if negate { fq.neg(b) } else { b })
            })
            .collect();
        Laurent::new(lo, v, prec)
    }
    pub fn neg(&self, fq: &Fq) -> Laurent {
        Laurent {
            val: self.val,
            coeffs: self.coeffs.iter().map(|&c| fq.neg(c)).collect(),
            prec: self.prec,
        }
    }
    pub fn scale(&self, c: Fe, fq: &Fq) -> Laurent {
        Laurent::new(self.val, self.coeffs.iter().map(|&a| fq.mul(a, c)).collect(), self.prec)
    }
    /// Multiplication by π^k.
    pub fn shift(&self, k: i64) -> Laurent {
        Laurent {
            val: if self.coeffs.is_empty() { 0 } else { self.val + k },
            coeffs: self.coeffs.clone(),
            prec: self.prec.map(|p| p + k),
        }
    }
    pub fn mul(&self, o: &Laurent, fq: &Fq) -> Laurent {
        let prec = match (self.prec, o.prec) {
            (None, None) => None,
            (Some(p), None) => o.bounded(p),
            (None, Some(p)) => self.bounded(p),
            (Some(p1), Some(p2)) => {
                Some((p1.saturating_add(o.val_lower())).min(p2.saturating_add(self.val_lower())))
            }
        };
        if self.coeffs.is_empty() || o.coeffs.is_empty() {
            return Laurent::new(0, Vec::new(), if self.is_zero() || o.is_zero() { None } else { prec });
        }
        let mut r = vec![0; self.coeffs.len() + o.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in o.coeffs.iter().enumerate() {
                r[i + j] = fq.add(r[i + j], fq.mul(a, b));
            }
        }
        Laurent::new(self.val + o.val, r, prec)
    }
    // precision of (exact self)·(x + O(π^p))
    fn bounded(&self, p: i64) -> Option<i64> {
        if self.is_zero() {
            None
        } else {
            Some(p + self.val)
        }
    }

    /// Inverse known to absolute precision `target` (exact inputs) or as far
    /// as the input precision allows.
    pub fn inv(&self, target: i64, fq: &Fq) -> Result<Laurent> {
        Laurent::one().div(self, target, fq)
    }

    /// Quotient `self / d` with coefficients for exponents below `target`
    /// (capped by what the input precision determines).
    pub fn div(&self, d: &Laurent, target: i64, fq: &Fq) -> Result<Laurent> {
        let dv = match d.valuation()? {
            Some(v) => v,
            None => return Err(Error::IndeterminatePrecision),
        };
        // relative precisions bound the result
        let mut limit = target;
        if let Some(p) = d.prec {
            let rel = p - dv;
            limit = limit.min(self.val_lower().saturating_sub(dv).saturating_add(rel));
        }
        if let Some(p) = self.prec {
            limit = limit.min(p - dv);
        }
        let exact = self.is_exact() && d.is_exact();
        if self.coeffs.is_empty() {
            return Ok(Laurent::new(0, Vec::new(), if self.is_zero() { None } else { Some(limit) }));
        }
        let rv = self.val - dv;
        let n = (limit - rv).max(0) as usize;
        let inv0 = fq.inv(d.leading());
        let mut num: Vec<Fe> = (0..n).map(|i| self.coeff(self.val + i as i64)).collect();
        let mut out = vec![0; n];
        for i in 0..n {
            let c = fq.mul(num[i], inv0);
            out[i] = c;
            if c == 0 {
                continue;
            }
            for (j, &dj) in d.coeffs.iter().enumerate().skip(1) {
                if i + j >= n {
                    break;
                }
                num[i + j] = fq.sub(num[i + j], fq.mul(c, dj));
            }
        }
        // exact quotient if the division terminated with zero remainder
        let mut prec = Some(limit);
        if exact {
            let q = Laurent::new(rv, out.clone(), None);
            if q.mul(d, fq) == *self {
                prec = None;
            }
        }
        Ok(Laurent::new(rv, out, prec))
    }

    /// The exact class representative modulo π^k O_∞: all terms of
    /// exponent below `k`. Fails if the input is not known that far.
    pub fn truncate(&self, k: i64) -> Result<Laurent> {
        if let Some(p) = self.prec {
            if p < k {
                return Err(Error::IndeterminatePrecision);
            }
        }
        let keep: Vec<Fe> = (self.val..k.max(self.val)).map(|i| self.coeff(i)).collect();
        Ok(Laurent::new(self.val, keep, None))
    }

    /// The part with exponents <= 0, as a polynomial in T.
    pub fn polynomial_part(&self) -> Poly {
        if self.coeffs.is_empty() || self.val > 0 {
            return Poly::zero();
        }
        let d = (-self.val) as usize;
        Poly::from_coeffs((0..=d).map(|i| self.coeff(-(i as i64))).collect())
    }

    /// ASCII form such as `pi^-1 + [x]*pi^2`; `0` for zero.
    pub fn fmt(&self, fq: &Fq) -> String {
        let mut terms: Vec<String> = self
            .terms()
            .map(|(e, c)| {
                let mono = match e {
                    0 => String::new(),
                    1 => "pi".into(),
                    _ => format!("pi^{e}"),
                };
                match (c, e) {
                    (_, 0) => fq.fmt_elem(c),
                    (1, _) => mono,
                    _ => format!("{}*{mono}", fq.fmt_elem(c)),
                }
            })
            .collect();
        if let Some(p) = self.prec {
            terms.push(format!("O(pi^{p})"));
        }
        if terms.is_empty() {
            "0".into()
        } else {
            terms.join(" + ")
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn inverse_examples() {
        let f = Fq::new(3).unwrap();
        let pi = Laurent::pi_pow(1);
        assert_eq!(pi.inv(10, &f).unwrap(), Laurent::pi_pow(-1));
        let one_plus = Laurent::from_terms(0, vec![1, 1]);
        let inv = one_plus.inv(6, &f).unwrap();
        // 1 - π + π² - ... mod π^6
        assert_eq!(inv.truncate(6).unwrap(), Laurent::from_terms(0, vec![1, 2, 1, 2, 1, 2]));
        assert_eq!(inv.prec(), Some(6));
        assert_eq!(inv.mul(&one_plus, &f).truncate(6).unwrap(), Laurent::one());
        let unknown = Laurent::new(0, vec![0, 0], Some(3));
        assert_eq!(unknown.inv(5, &f), Err(Error::IndeterminatePrecision));
    }

    #[test]
    fn polynomial_embedding() {
        let f = Fq::new(5).unwrap();
        let p = Poly::from_coeffs(vec![2, 0, 1]);
        let l = Laurent::from_poly(&p);
        assert_eq!(l.val(), -2);
        assert_eq!(l.polynomial_part(), p);
        assert_eq!(l.coeff(0), 2);
        let tinv = Laurent::from_poly(&Poly::t()).inv(4, &f).unwrap();
        assert_eq!(tinv, Laurent::pi_pow(1));
    }

    #[test]
    fn precision_propagates() {
        let f = Fq::new(2).unwrap();
        let a = Laurent::new(0, vec![1, 1], Some(4));
        let b = Laurent::pi_pow(2);
        assert_eq!(a.mul(&b, &f).prec(), Some(6));
        assert_eq!(a.add(&Laurent::new(0, vec![1], Some(2)), &f).prec(), Some(2));
        assert!(a.truncate(5).is_err());
    }

    proptest! {
        #[test]
        fn field_laws(qi in 0usize..3, av in -3i64..3, a in proptest::collection::vec(0u8..5, 1..6),
                      bv in -3i64..3, b in proptest::collection::vec(0u8..5, 1..6)) {
            let q = [2u32, 3, 5][qi];
            let f = Fq::new(q).unwrap();
            let a = Laurent::from_terms(av, a.iter().map(|&c| c % q as u8).collect());
            let b = Laurent::from_terms(bv, b.iter().map(|&c| c % q as u8).collect());
            prop_assert_eq!(a.mul(&b, &f), b.mul(&a, &f));
            prop_assert_eq!(a.add(&b, &f).sub(&b, &f), a.clone());
            if !b.is_zero() {
                let t = 8;
                let quo = a.mul(&b, &f).div(&b, t, &f).unwrap();
                prop_assert_eq!(quo, a.clone());
                let inv = b.inv(t, &f).unwrap();
                prop_assert_eq!(inv.valuation().unwrap(), Some(-b.val()));
                let prod = inv.mul(&b, &f);
                prop_assert_eq!(prod.truncate(prod.prec().unwrap_or(t).min(t)).unwrap(), Laurent::one());
            }
        }
    }
}
