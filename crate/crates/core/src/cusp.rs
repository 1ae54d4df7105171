//! Cusps of X₀(n): canonical representatives, counting formulas,
//! rationality, Atkin-Lehner action and the reference orders N(p), M(p).

use crate::error::{Error, Result};
use crate::field::Fq;
use crate::hecke::atkin_lehner_pmat;
use crate::poly::{factor, monic_divisors, Poly};
use crate::quotient::Level;
use num_bigint::BigInt;
use serde_json::json;

/// A cusp `(a; b)`: b a monic divisor of n, a monic and prime to n, with
/// the class of a modulo `b̃ = gcd(b, n/b)` up to F_q^× as the invariant.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cusp {
    pub b: Poly,
    /// canonical residue class of a mod b̃ (smallest index among F_q^×-multiples)
    pub key: Poly,
    /// smallest monic representative of the class that is prime to n
    pub a: Poly,
    pub b_tilde: Poly,
}

impl Cusp {
    /// Rational iff deg b̃ ≤ 1, or q = 2 and b̃ = T² + T.
    pub fn is_rational(&self, fq: &Fq) -> bool {
        self.b_tilde.deg() <= 1 || (fq.q() == 2 && self.b_tilde == Poly::from_coeffs(vec![0, 1, 1]))
    }
    pub fn to_json(&self, fq: &Fq) -> serde_json::Value {
        json!({
            "a": self.a.fmt(fq),
            "b": self.b.fmt(fq),
            "b_tilde": self.b_tilde.fmt(fq),
            "rational": self.is_rational(fq),
        })
    }
    pub fn fmt(&self, fq: &Fq) -> String {
        format!("({}; {})", self.a.fmt(fq), self.b.fmt(fq))
    }
}

fn canonical_key(x: &Poly, bt: &Poly, fq: &Fq) -> Poly {
    fq.units()
        .map(|al| x.scale(al, fq).rem(bt, fq))
        .min_by_key(|p| p.index(fq.q()))
        .expect("F_q^× is nonempty")
}

fn lift(key: &Poly, bt: &Poly, n: &Poly, fq: &Fq) -> Poly {
    for d in 0.. {
        for a in Poly::monics(d, fq.q()) {
            if Poly::gcd(&a, n, fq).is_one() && canonical_key(&a, bt, fq) == *key {
                return a;
            }
        }
    }
    unreachable!()
}

/// The cusp of an arbitrary column `(x; y)` with gcd(x, y) = 1.
pub fn cusp_of(x: &Poly, y: &Poly, n: &Poly, fq: &Fq) -> Result<Cusp> {
    if !Poly::gcd(x, y, fq).is_one() {
        return Err(Error::InvalidLevel(format!("({}; {}) is not primitive", x.fmt(fq), y.fmt(fq))));
    }
    let b = Poly::gcd(y, n, fq);
    let bt = Poly::gcd(&b, &n.div_exact(&b, fq).expect("divisor"), fq);
    let y_over_b = y.div_exact(&b, fq).expect("divisor");
    let key = canonical_key(&x.mul(&y_over_b, fq), &bt, fq);
    let a = lift(&key, &bt, n, fq);
    Ok(Cusp { b, key, a, b_tilde: bt })
}

/// All cusps, sorted by b and then by the residue key.
pub fn enumerate_cusps(level: &Level, fq: &Fq) -> Vec<Cusp> {
    let n = &level.n;
    let mut out = Vec::new();
    for b in monic_divisors(n, fq) {
        let bt = Poly::gcd(&b, &n.div_exact(&b, fq).expect("divisor"), fq);
        let mut keys: Vec<Poly> = Poly::all_below(bt.deg().max(0) as usize, fq.q())
            .filter(|r| Poly::gcd(r, &bt, fq).is_one())
            .map(|r| canonical_key(&r, &bt, fq))
            .collect();
        keys.sort_by_key(|p| p.index(fq.q()));
        keys.dedup();
        for key in keys {
            let a = lift(&key, &bt, n, fq);
            out.push(Cusp { b: b.clone(), key, a, b_tilde: bt.clone() });
        }
    }
    out
}

/// `κ(n) = Π (|p|^⌊r/2⌋ + |p|^⌊(r-1)/2⌋)`.
pub fn kappa(level: &Level, fq: &Fq) -> BigInt {
    level
        .factors
        .iter()
        .map(|(p, r)| {
            let np = BigInt::from(p.norm(fq));
            np.pow(r / 2) + np.pow((r - 1) / 2)
        })
        .product()
}

/// `2^s + (κ(n) - 2^s)/(q - 1)`.
pub fn cusp_count_formula(level: &Level, fq: &Fq) -> BigInt {
    let two_s = BigInt::from(1u64 << level.s());
    &two_s + (kappa(level, fq) - &two_s) / BigInt::from(fq.q() - 1)
}

/// Rational cusps counted through the deg b̃ criterion.
pub fn rational_cusp_count(level: &Level, fq: &Fq) -> usize {
    enumerate_cusps(level, fq).iter().filter(|c| c.is_rational(fq)).count()
}

/// `2^s + 2^{s-1} Σ t_i + 2^{s-2} u`, with t_i = 0, 1, 2 for r_i = 1, 2, ≥ 3
/// over the degree-one primes, and u = t_T·t_{T+1} when q = 2 and both divide n.
pub fn rational_cusp_count_formula(level: &Level, fq: &Fq) -> u64 {
    let t = |r: u32| match r {
        1 => 0u64,
        2 => 1,
        _ => 2,
    };
    let s = level.s() as u32;
    let lin: Vec<(&Poly, u32)> = level.factors.iter().filter(|(p, _)| p.deg() == 1).map(|(p, r)| (p, *r)).collect();
    let sum_t: u64 = lin.iter().map(|&(_, r)| t(r)).sum();
    let u = if fq.q() == 2 {
        let tx = lin.iter().find(|(p, _)| **p == Poly::t()).map(|&(_, r)| t(r));
        let ty = lin.iter().find(|(p, _)| **p == Poly::linear(fq, 1)).map(|&(_, r)| t(r));
        tx.zip(ty).map_or(0, |(a, b)| a * b)
    } else {
        0
    };
    let mut total = 1u64 << s;
    if s >= 1 {
        total += (1u64 << (s - 1)) * sum_t;
    }
    if s >= 2 {
        total += (1u64 << (s - 2)) * u;
    }
    total
}

/// `W_m` applied to a cusp, for m ∥ n.
pub fn al_on_cusp(m: &Poly, cusp: &Cusp, level: &Level, fq: &Fq) -> Result<Cusp> {
    let w = atkin_lehner_pmat(m, &level.n, fq, false)?;
    let x = w.a.mul(&cusp.a, fq).add(&w.b.mul(&cusp.b, fq), fq);
    let y = w.c.mul(&cusp.a, fq).add(&w.d.mul(&cusp.b, fq), fq);
    let g = Poly::gcd(&x, &y, fq);
    cusp_of(&x.div_exact(&g, fq).unwrap(), &y.div_exact(&g, fq).unwrap(), &level.n, fq)
}

/// The cusp `[d] = (1; d)` for a monic divisor d of n.
pub fn divisor_cusp(d: &Poly, level: &Level, fq: &Fq) -> Result<Cusp> {
    cusp_of(&Poly::one(), d, &level.n, fq)
}

/// `N(p)`: order of `[0] - [∞]` at prime level.
pub fn n_of_prime(p: &Poly, fq: &Fq) -> Result<BigInt> {
    check_prime(p, fq)?;
    let np = BigInt::from(p.norm(fq));
    let q = BigInt::from(fq.q());
    Ok(if p.deg() % 2 == 1 { (np - 1u32) / (q - 1u32) } else { (np - 1u32) / (&q * &q - 1u32) })
}

/// `M(p)`: order of `[0] - [∞]` at level p².
pub fn m_of_prime(p: &Poly, fq: &Fq) -> Result<BigInt> {
    check_prime(p, fq)?;
    let np = BigInt::from(p.norm(fq));
    let q = BigInt::from(fq.q());
    let base = (&np * &np - 1u32) / (&q * &q - 1u32);
    Ok(if fq.q() % 2 == 0 || p.deg() % 2 == 1 { base } else { base / 2u32 })
}

fn check_prime(p: &Poly, fq: &Fq) -> Result<()> {
    let (_, fac) = factor(p, fq);
    if fac.len() == 1 && fac[0].1 == 1 {
        Ok(())
    } else {
        Err(Error::InvalidLevel(format!("{} is not prime", p.fmt(fq))))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_poly;

    fn level(q: u32, s: &str) -> (Fq, Level) {
        let fq = Fq::new(q).unwrap();
        let l = Level::new(&parse_poly(s, &fq).unwrap(), &fq).unwrap();
        (fq, l)
    }

    #[test]
    fn degree_three_cusps_are_divisors() {
        let f4 = Fq::new(4).unwrap();
        let irr = crate::poly::monic_irreducibles(3, &f4).remove(0).fmt(&f4);
        for (q, s, k) in [(2, "T^3", 4), (3, "T*(T-1)*(T-2)", 8), (3, "T^2*(T-1)", 6), (4, irr.as_str(), 2)] {
            let (fq, l) = level(q, s);
            let cs = enumerate_cusps(&l, &fq);
            assert_eq!(cs.len(), k, "{s}");
            assert_eq!(BigInt::from(k), cusp_count_formula(&l, &fq));
            assert!(cs.iter().all(|c| c.is_rational(&fq)));
            for d in monic_divisors(&l.n, &fq) {
                let c = divisor_cusp(&d, &l, &fq).unwrap();
                let wn = al_on_cusp(&l.n, &c, &l, &fq).unwrap();
                assert_eq!(wn, divisor_cusp(&l.n.div_exact(&d, &fq).unwrap(), &l, &fq).unwrap());
            }
        }
    }

    #[test]
    fn square_of_quadratic_prime() {
        let (fq, l) = level(2, "(T^2+T+1)^2");
        assert_eq!(enumerate_cusps(&l, &fq).len(), 5);
        assert_eq!(rational_cusp_count(&l, &fq), 2);
        assert_eq!(m_of_prime(&parse_poly("T^2+T+1", &fq).unwrap(), &fq).unwrap(), BigInt::from(5));
    }

    #[test]
    fn reference_orders() {
        let fq = Fq::new(2).unwrap();
        assert_eq!(n_of_prime(&parse_poly("T^4+T^3+1", &fq).unwrap(), &fq).unwrap(), BigInt::from(5));
        let fq = Fq::new(3).unwrap();
        assert_eq!(n_of_prime(&parse_poly("T^3+2*T+1", &fq).unwrap(), &fq).unwrap(), BigInt::from(13));
        assert!(n_of_prime(&parse_poly("T^2", &fq).unwrap(), &fq).is_err());
    }

    #[test]
    fn involution_and_gcd_constraints() {
        let (fq, l) = level(3, "T^2*(T-1)*(T^2+1)");
        let cs = enumerate_cusps(&l, &fq);
        for m in ["T^2", "T-1", "T^2+1", "T^2*(T-1)"] {
            let m = parse_poly(m, &fq).unwrap();
            let r = l.n.div_exact(&m, &fq).unwrap();
            for c in &cs {
                let w = al_on_cusp(&m, c, &l, &fq).unwrap();
                assert_eq!(&al_on_cusp(&m, &w, &l, &fq).unwrap(), c);
                assert_eq!(Poly::gcd(&c.b, &m, &fq).mul(&Poly::gcd(&w.b, &m, &fq), &fq), m);
                assert_eq!(Poly::gcd(&c.b, &r, &fq), Poly::gcd(&w.b, &r, &fq));
            }
        }
    }
}
