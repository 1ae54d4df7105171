//! Eisenstein series E_m: values from the divisor-sum Fourier formula,
//! class values on a quotient graph, and the series attached to n = xyz.

use crate::cyclo::{eta_exponent_of_coeff, CharSum};
use crate::error::{Error, Result};
use crate::field::{Fe, Fq};
use crate::hecke::hecke_cosets;
use crate::laurent::Laurent;
use crate::poly::{factor, Poly};
use crate::quotient::{Location, QuotientGraph};
use crate::tree::{act, Edge};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use std::collections::HashMap;
use std::sync::Mutex;

/// `σ(a) = Σ_{monic a' | a} |a'|`.
pub fn sigma(a: &Poly, fq: &Fq) -> BigInt {
    let (_, fac) = factor(a, fq);
    let mut s = BigInt::one();
    for (p, e) in fac {
        let np = BigInt::from(p.norm(fq));
        // 1 + |p| + … + |p|^e
        s *= (np.pow(e + 1) - 1u32) / (np - 1u32);
    }
    s
}

/// The Eisenstein series of level `m`.
#[derive(Debug)]
pub struct Eisenstein {
    pub m: Poly,
    fq: Fq,
    norm: BigInt,
    cache: Mutex<HashMap<Vec<Fe>, BigInt>>,
}

impl Eisenstein {
    pub fn new(m: &Poly, fq: &Fq) -> Result<Eisenstein> {
        if !m.is_monic() || m.deg() < 1 {
            return Err(Error::InvalidLevel(format!("{} is not monic of positive degree", m.fmt(fq))));
        }
        Ok(Eisenstein { m: m.clone(), fq: fq.clone(), norm: BigInt::from(m.norm(fq)), cache: Mutex::new(HashMap::new()) })
    }

    /// 1 for even degree, q + 1 for odd degree.
    pub fn nu(&self) -> BigInt {
        if self.m.deg() % 2 == 0 {
            BigInt::one()
        } else {
            BigInt::from(self.fq.q() + 1)
        }
    }

    /// `σ_m(a) = σ(a) - |m| σ(a/m)`, with the second term absent when m ∤ a.
    pub fn sigma_m(&self, a: &Poly) -> BigInt {
        let key = a.monic(&self.fq).coeffs().to_vec();
        if let Some(v) = self.cache.lock().unwrap().get(&key) {
            return v.clone();
        }
        let mut s = sigma(a, &self.fq);
        if let Some(r) = a.div_exact(&self.m, &self.fq) {
            s -= &self.norm * sigma(&r, &self.fq);
        }
        self.cache.lock().unwrap().insert(key, s.clone());
        s
    }

    fn constant_term(&self) -> BigRational {
        let q = BigInt::from(self.fq.q());
        BigRational::new(BigInt::one() - &self.norm, BigInt::one() - &q * &q)
    }

    fn finish(&self, k: i64, bracket: BigRational, e: &Edge) -> Result<BigInt> {
        let q = BigInt::from(self.fq.q());
        let scale = if k <= 1 {
            BigRational::from_integer(q.pow((1 - k) as u32))
        } else {
            BigRational::new(BigInt::one(), q.pow((k - 1) as u32))
        };
        let v = bracket * scale * BigRational::from_integer(self.nu());
        if !v.is_integer() {
            return Err(Error::NonIntegral(format!("E_{} at {} = {v}", self.m.fmt(&self.fq), e.fmt(&self.fq))));
        }
        let v = v.to_integer();
        Ok(if e.flipped { -v } else { v })
    }

    /// `E_m(e)` from the Fourier formula. The sum over nonzero a is grouped
    /// by monic part: the F_q^×-multiples of a contribute q - 1 or -1.
    pub fn value(&self, e: &Edge) -> Result<BigInt> {
        let fq = &self.fq;
        let (k, y) = (e.k, &e.u);
        let mut s = BigInt::zero();
        for d in 0..=(k - 2).max(-1) {
            for a in Poly::monics(d as usize, fq.q()) {
                let t = pi_coefficient(&a, y, fq);
                let w = if t == 0 { fq.q() as i64 - 1 } else { -1 };
                s += self.sigma_m(&a) * w;
            }
        }
        self.finish(k, self.constant_term() + BigRational::from_integer(s), e)
    }

    /// Same value, summing the additive character over every nonzero a.
    pub fn value_by_character_sum(&self, e: &Edge) -> Result<BigInt> {
        let fq = &self.fq;
        let (k, y) = (e.k, &e.u);
        let mut sum = CharSum::new(fq.p());
        if k >= 2 {
            for idx in 1..(fq.q() as u64).pow((k - 1) as u32) {
                let a = Poly::from_index(idx, fq.q());
                let t = eta_exponent_of_coeff(pi_coefficient(&a, y, fq), fq);
                sum.add(t, &self.sigma_m(&a));
            }
        }
        let s = sum
            .finish()
            .rational_value()
            .ok_or_else(|| Error::NonRational(format!("E_{} character sum", self.m.fmt(fq))))?;
        self.finish(k, self.constant_term() + BigRational::from_integer(s), e)
    }

    /// Values on every stored class of `graph`, in representative orientation.
    pub fn class_values(&self, graph: &QuotientGraph) -> Result<Vec<BigInt>> {
        graph.classes.iter().map(|c| self.value(&c.rep)).collect()
    }
}

/// π¹-coefficient of `a·y`, that is `Σ_l a_l y_{l+1}`.
fn pi_coefficient(a: &Poly, y: &Laurent, fq: &Fq) -> Fe {
    let mut c = 0;
    for (l, &al) in a.coeffs().iter().enumerate() {
        if al != 0 {
            c = fq.add(c, fq.mul(al, y.coeff(l as i64 + 1)));
        }
    }
    c
}

/// Value at `e` of a harmonic cochain given by its values on all stored
/// classes, continuing along the half-lines by harmonicity.
pub fn lookup(graph: &QuotientGraph, values: &[BigInt], e: &Edge) -> Result<BigInt> {
    Ok(match graph.locate(e)? {
        Location::Stored { class, sign } => values[class].clone() * sign,
        Location::Beyond { seed, extra, sign } => {
            values[seed].clone() * BigInt::from(graph.q()).pow(extra) * sign
        }
    })
}

/// Checks `Σ_σ E(σ·e) = (|p| + 1) E(e)` on every stored class of the level-m graph.
pub fn check_eigenvalue(graph: &QuotientGraph, eis: &Eisenstein, p: &Poly) -> Result<bool> {
    let fq = &graph.fq;
    let values = eis.class_values(graph)?;
    let cosets = hecke_cosets(p, &graph.level.n, fq);
    let lambda = BigInt::from(p.norm(fq) + 1);
    for c in &graph.classes {
        let mut s = BigInt::zero();
        for g in &cosets {
            s += lookup(graph, &values, &act(&g.to_mat2(), &c.rep, fq)?)?;
        }
        if s != &lambda * &values[c.id] {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Checks the weighted vertex sums of `values` at every vertex of level ≤ J.
pub fn is_harmonic_on(graph: &QuotientGraph, values: &[BigInt]) -> bool {
    graph.vertices.iter().filter(|v| v.level <= graph.stable).all(|v| {
        let mut s = BigInt::zero();
        for c in &graph.classes {
            if c.terminus == v.id {
                s += &values[c.id] * c.weight_fwd;
            }
            if c.origin == v.id {
                s -= &values[c.id] * c.weight_bwd;
            }
        }
        s.is_zero()
    })
}

/// Column labels of the xyz value table, in display order.
pub const XYZ_COLUMNS: [&str; 21] = [
    "s_inf", "s_1", "s_x", "s_y", "s_z", "s_yz", "s_xz", "s_xy", "d_inf", "d_x", "d_y", "d_z", "a_inf", "a_inf'",
    "a_x", "a_x'", "a_y", "a_y'", "a_z", "a_z'", "b_u",
];
/// Row labels of the xyz value table.
pub const XYZ_ROWS: [&str; 7] = ["E_x", "E_xy", "E'_xy", "E_yz", "E'_yz", "E_xz", "E'_xyz"];

/// The named edges for n = T(T-1)(T-c), each as `(π^k, u; 0 1)`. The last
/// entry `b_u` uses some u ∉ {0, 1, c} and is `None` when q = 3.
pub fn xyz_edges(fq: &Fq, c: Fe) -> Result<Vec<Option<Edge>>> {
    let x = Poly::t();
    let y = Poly::linear(fq, 1);
    let z = Poly::linear(fq, c);
    let inv = |k: i64, p: &Poly| -> Result<Edge> {
        let u = Laurent::from_poly(p).inv(k, fq)?;
        Edge::positive(k, &u)
    };
    let term = |k: i64, t: &[(i64, Fe)]| Edge::from_terms(k, t, fq);
    let m = |a: &Poly, b: &Poly| a.mul(b, fq);
    let bu = fq.elements().find(|&u| u != 0 && u != 1 && u != c).map(|u| term(3, &[(1, 1), (2, u)]));
    Ok(vec![
        Some(term(1, &[])),
        Some(term(3, &[])),
        Some(inv(4, &x)?),
        Some(inv(4, &y)?),
        Some(inv(4, &z)?),
        Some(inv(5, &m(&y, &z))?),
        Some(inv(5, &m(&x, &z))?),
        Some(inv(5, &m(&x, &y))?),
        Some(term(2, &[])),
        Some(term(4, &[(1, 1), (3, fq.neg(c))])),
        Some(term(4, &[(1, 1), (2, 1), (3, c)])),
        Some(term(4, &[(1, 1), (2, c), (3, c)])),
        Some(term(2, &[(1, 1)])),
        Some(term(3, &[(2, 1)])),
        Some(inv(3, &x)?),
        Some(inv(4, &m(&y, &z))?),
        Some(inv(3, &y)?),
        Some(inv(4, &m(&x, &z))?),
        Some(inv(3, &z)?),
        Some(inv(4, &m(&x, &y))?),
        bu,
    ])
}

/// The seven series rows evaluated on [`xyz_edges`]. The primed rows are
/// `E'_xy = (E_x - E_y)/(q+1)`, `E'_yz = (E_y - E_z)/(q+1)` and
/// `E'_xyz = E_xy + (E_xyz - E_z)/(q+1)`; each division is checked to be exact.
pub fn xyz_table(fq: &Fq, c: Fe) -> Result<Vec<Vec<Option<BigInt>>>> {
    let x = Poly::t();
    let y = Poly::linear(fq, 1);
    let z = Poly::linear(fq, c);
    let m = |a: &Poly, b: &Poly| a.mul(b, fq);
    let series = |p: &Poly| Eisenstein::new(p, fq);
    let (ex, ey, ez) = (series(&x)?, series(&y)?, series(&z)?);
    let (exy, eyz, exz) = (series(&m(&x, &y))?, series(&m(&y, &z))?, series(&m(&x, &z))?);
    let exyz = series(&m(&m(&x, &y), &z))?;
    let q1 = BigInt::from(fq.q() + 1);
    let edges = xyz_edges(fq, c)?;
    let mut rows = vec![Vec::new(); 7];
    for e in &edges {
        let Some(e) = e else {
            rows.iter_mut().for_each(|r| r.push(None));
            continue;
        };
        let v = |s: &Eisenstein| s.value(e);
        let (vx, vy, vz) = (v(&ex)?, v(&ey)?, v(&ez)?);
        let vxy = v(&exy)?;
        let div = |num: BigInt, name: &str| -> Result<BigInt> {
            let (quo, rem) = num.div_rem(&q1);
            if !rem.is_zero() {
                return Err(Error::NonIntegral(format!("{name} at {}", e.fmt(fq))));
            }
            Ok(quo)
        };
        let vals = [
            vx.clone(),
            vxy.clone(),
            div(&vx - &vy, "E'_xy")?,
            v(&eyz)?,
            div(&vy - &vz, "E'_yz")?,
            v(&exz)?,
            vxy + div(v(&exyz)? - &vz, "E'_xyz")?,
        ];
        for (r, val) in rows.iter_mut().zip(vals) {
            r.push(Some(val));
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_poly;
    use crate::quotient::Level;

    #[test]
    fn sigma_matches_divisor_enumeration() {
        let fq = Fq::new(3).unwrap();
        for d in 0..=3 {
            for a in Poly::monics(d, 3) {
                let direct: BigInt = crate::poly::monic_divisors(&a, &fq).iter().map(|m| BigInt::from(m.norm(&fq))).sum();
                assert_eq!(sigma(&a, &fq), direct);
            }
        }
    }

    #[test]
    fn irreducible_cubic_values() {
        for q in [2u32, 3, 4, 5] {
            let fq = Fq::new(q).unwrap();
            let n = crate::poly::monic_irreducibles(3, &fq).remove(0);
            let e = Eisenstein::new(&n, &fq).unwrap();
            let qq = BigInt::from(q);
            assert_eq!(e.value(&Edge::from_terms(1, &[], &fq)).unwrap(), &qq * &qq + &qq + 1);
            for u in fq.elements() {
                assert_eq!(e.value(&Edge::from_terms(3, &[(1, 1), (2, u)], &fq)).unwrap(), BigInt::one());
            }
        }
    }

    #[test]
    fn grouped_sum_agrees_with_character_sum() {
        let fq = Fq::new(4).unwrap();
        let e = Eisenstein::new(&parse_poly("T^2+T", &fq).unwrap(), &fq).unwrap();
        for k in 0..=4 {
            for idx in 0..16u64 {
                let u = Laurent::from_terms(1, Poly::from_index(idx, 4).coeffs().to_vec());
                let edge = Edge::positive(k, &u).unwrap();
                assert_eq!(e.value(&edge).unwrap(), e.value_by_character_sum(&edge).unwrap());
            }
        }
    }

    #[test]
    fn harmonic_and_eigen_on_own_level() {
        let fq = Fq::new(3).unwrap();
        for s in ["T^3+2*T+1", "T^2*(T-1)", "T"] {
            let n = parse_poly(s, &fq).unwrap();
            let g = QuotientGraph::build(&Level::new(&n, &fq).unwrap(), &fq).unwrap();
            let e = Eisenstein::new(&n, &fq).unwrap();
            let vals = e.class_values(&g).unwrap();
            assert!(is_harmonic_on(&g, &vals), "{s}");
            assert!(check_eigenvalue(&g, &e, &Poly::linear(&fq, 2)).unwrap(), "{s}");
        }
    }

    #[test]
    fn lookup_matches_formula_off_the_stored_part() {
        let fq = Fq::new(2).unwrap();
        let n = parse_poly("T^3", &fq).unwrap();
        let g = QuotientGraph::build(&Level::new(&n, &fq).unwrap(), &fq).unwrap();
        let e = Eisenstein::new(&n, &fq).unwrap();
        let vals = e.class_values(&g).unwrap();
        for k in -3..=7i64 {
            for idx in 0..64u64 {
                let u = Laurent::from_terms(1, Poly::from_index(idx, 2).coeffs().to_vec());
                let edge = Edge::positive(k, &u).unwrap();
                assert_eq!(lookup(&g, &vals, &edge).unwrap(), e.value(&edge).unwrap(), "k={k} idx={idx}");
                let r = edge.reverse();
                assert_eq!(lookup(&g, &vals, &r).unwrap(), e.value(&r).unwrap());
            }
        }
    }

    #[test]
    fn xyz_value_table() {
        for q in [3u32, 4, 5] {
            let fq = Fq::new(q).unwrap();
            let c = fq.elements().find(|&u| u != 0 && u != 1).unwrap();
            let got = xyz_table(&fq, c).unwrap();
            for (r, (row, exp)) in got.iter().zip(crate::verify::xyz_expected(q as i64)).enumerate() {
                for (col, (v, x)) in row.iter().zip(exp).enumerate() {
                    if let Some(v) = v {
                        assert_eq!(*v, BigInt::from(x), "q={q} {} at {}", XYZ_ROWS[r], XYZ_COLUMNS[col]);
                    }
                }
            }
        }
    }
}
