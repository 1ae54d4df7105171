//! Hecke operators T_m (and U_p), Atkin-Lehner involutions W_m and
//! degeneracy maps B_m as integer matrices on a harmonic basis.

use crate::cochain::HarmonicSpace;
use crate::error::{Error, Result};
use crate::field::Fq;
use crate::intmat::IntMatrix;
use crate::pmat::PMat;
use crate::poly::{monic_divisors, Poly};
use crate::tree::act;
use num_bigint::BigInt;
use num_traits::Zero;
use rayon::prelude::*;
use serde_json::json;

/// The coset matrices `(a b; 0 d)` of T_m at level n: monic a, d with ad = m,
/// gcd(a, n) = 1 and deg b < deg d, ordered by a and then by b.
pub fn hecke_cosets(m: &Poly, n: &Poly, fq: &Fq) -> Vec<PMat> {
    let m = m.monic(fq);
    let mut out = Vec::new();
    for a in monic_divisors(&m, fq) {
        if !Poly::gcd(&a, n, fq).is_one() {
            continue;
        }
        let d = m.div_exact(&a, fq).expect("divisor");
        for b in Poly::all_below(d.deg() as usize, fq.q()) {
            out.push(PMat::new(a.clone(), b, Poly::zero(), d.clone()));
        }
    }
    out
}

/// `(a·m, b; n, m)` with `a·m - b·(n/m) = 1`; the alternative shifts a by n/m and b by m.
pub fn atkin_lehner_pmat(m: &Poly, n: &Poly, fq: &Fq, alternative: bool) -> Result<PMat> {
    let m = m.monic(fq);
    let r = n
        .div_exact(&m, fq)
        .filter(|r| Poly::gcd(&m, r, fq).is_one())
        .ok_or_else(|| Error::InvalidLevel(format!("{} does not exactly divide {}", m.fmt(fq), n.fmt(fq))))?;
    let (_, mut a, t) = Poly::xgcd(&m, &r, fq);
    let mut b = t.neg(fq);
    if alternative {
        a = a.add(&r, fq);
        b = b.add(&m, fq);
    }
    Ok(PMat::new(a.mul(&m, fq), b, n.clone(), m))
}

/// Matrix of `f ↦ (e ↦ Σ_σ f(σ·e))` on the basis of `space`.
pub fn operator_matrix(space: &HarmonicSpace, mats: &[PMat]) -> Result<IntMatrix> {
    operator_matrix_between(space, space, mats)
}

/// Same, reading values on `src` and expressing the result in the basis of `dst`.
fn operator_matrix_between(src: &HarmonicSpace, dst: &HarmonicSpace, mats: &[PMat]) -> Result<IntMatrix> {
    let fq = src.fq();
    let g = src.genus();
    let rows: Vec<Vec<BigInt>> = dst
        .unknowns
        .par_iter()
        .map(|&c| {
            let rep = &dst.graph.classes[c].rep;
            let mut acc = vec![BigInt::zero(); g];
            for s in mats {
                let e = act(&s.to_mat2(), rep, fq)?;
                for (x, v) in acc.iter_mut().zip(src.evaluate_basis(&e)?) {
                    *x += v;
                }
            }
            Ok(acc)
        })
        .collect::<Result<_>>()?;
    let mut cols = Vec::with_capacity(g);
    for j in 0..g {
        let values: Vec<BigInt> = rows.iter().map(|r| r[j].clone()).collect();
        if !dst.is_harmonic(&values) {
            return Err(Error::NonIntegral(format!("image of basis cochain {j} is not harmonic")));
        }
        cols.push(dst.coordinates(&values)?);
    }
    Ok(IntMatrix::from_cols(cols, dst.genus()))
}

/// The matrix of T_m (U_m when m divides the level).
pub fn hecke_matrix(space: &HarmonicSpace, m: &Poly) -> Result<IntMatrix> {
    if m.is_zero() {
        return Err(Error::Dimension("T_0 is undefined".into()));
    }
    operator_matrix(space, &hecke_cosets(m, &space.graph.level.n, space.fq()))
}

/// The matrix of W_m for m ∥ n.
pub fn atkin_lehner_matrix(space: &HarmonicSpace, m: &Poly) -> Result<IntMatrix> {
    operator_matrix(space, &[atkin_lehner_pmat(m, &space.graph.level.n, space.fq(), false)?])
}

/// W_m computed from the alternative matrix, for the choice-independence check.
pub fn atkin_lehner_matrix_alt(space: &HarmonicSpace, m: &Poly) -> Result<IntMatrix> {
    operator_matrix(space, &[atkin_lehner_pmat(m, &space.graph.level.n, space.fq(), true)?])
}

/// The map `f ↦ f|B_m`, `(f|B_m)(e) = f((m 0; 0 1)·e)`, from H₀(n) to H₀(nm).
pub fn degeneracy_matrix(src: &HarmonicSpace, dst: &HarmonicSpace, m: &Poly) -> Result<IntMatrix> {
    let fq = src.fq();
    let target = src.graph.level.n.mul(m, fq).monic(fq);
    if target != dst.graph.level.n {
        return Err(Error::Dimension(format!(
            "target level {} is not {}",
            dst.graph.level.n.fmt(fq),
            target.fmt(fq)
        )));
    }
    if src.genus() == 0 {
        return Ok(IntMatrix::zeros(dst.genus(), 0));
    }
    operator_matrix_between(src, dst, &[PMat::diag(m.clone(), Poly::one())])
}

/// A short fingerprint of the basis, so that matrices from different bases
/// are not mixed up.
pub fn basis_hash(space: &HarmonicSpace) -> String {
    // FNV-1a over the decimal entries
    let mut h: u64 = 0xcbf29ce484222325;
    for x in space.basis.entries() {
        for b in x.to_string().bytes().chain(std::iter::once(b',')) {
            h ^= b as u64;
            h = h.wrapping_mul(0x100000001b3);
        }
    }
    format!("{h:016x}")
}

/// JSON form of an operator matrix.
pub fn operator_json(label: &str, space: &HarmonicSpace, m: &IntMatrix) -> serde_json::Value {
    json!({
        "label": label,
        "level": space.graph.level.n.fmt(space.fq()),
        "matrix": m.to_i64_rows(),
        "basis_hash": basis_hash(space),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_poly;
    use crate::quotient::{Level, QuotientGraph};

    fn space(q: u32, n: &str) -> HarmonicSpace {
        let fq = Fq::new(q).unwrap();
        let level = Level::new(&parse_poly(n, &fq).unwrap(), &fq).unwrap();
        HarmonicSpace::new(QuotientGraph::build(&level, &fq).unwrap()).unwrap()
    }

    #[test]
    fn t_cubed_over_f2() {
        let s = space(2, "T^3");
        let fq = s.fq().clone();
        assert_eq!(s.genus(), 1);
        let t1 = hecke_matrix(&s, &parse_poly("T+1", &fq).unwrap()).unwrap();
        assert_eq!(t1, IntMatrix::from_i64(&[vec![-1]]));
        assert!(hecke_matrix(&s, &Poly::t()).unwrap().is_zero());
    }

    #[test]
    fn linear_operators_sum_to_minus_one() {
        for (q, n) in [(3, "T^3+2*T+1"), (3, "T^2*(T-1)"), (4, "T^3")] {
            let s = space(q, n);
            let fq = s.fq().clone();
            let mut sum = IntMatrix::zeros(s.genus(), s.genus());
            for u in fq.elements() {
                sum = sum.add(&hecke_matrix(&s, &Poly::linear(&fq, u)).unwrap());
            }
            assert_eq!(sum, IntMatrix::scalar(s.genus(), &BigInt::from(-1)), "{n}");
        }
    }

    #[test]
    fn atkin_lehner_relations() {
        let s = space(3, "T*(T-1)*(T-2)");
        let fq = s.fq().clone();
        let x = Poly::t();
        let y = Poly::linear(&fq, 1);
        let id = IntMatrix::identity(s.genus());
        let wx = atkin_lehner_matrix(&s, &x).unwrap();
        let wy = atkin_lehner_matrix(&s, &y).unwrap();
        let wxy = atkin_lehner_matrix(&s, &x.mul(&y, &fq)).unwrap();
        assert_eq!(wx.mul(&wx), id);
        assert_eq!(wx.mul(&wy), wxy);
        assert_eq!(wx, atkin_lehner_matrix_alt(&s, &x).unwrap());
        assert_eq!(hecke_matrix(&s, &x).unwrap(), wx.scale(&BigInt::from(-1)));
    }

    #[test]
    fn degeneracy_from_rank_zero_and_identity() {
        let fq = Fq::new(2).unwrap();
        let src = space(2, "T^2+T+1");
        let dst = space(2, "T^3+T^2+T");
        let b = degeneracy_matrix(&src, &dst, &Poly::t()).unwrap();
        assert_eq!((b.rows(), b.cols()), (dst.genus(), 0));
        let s = space(2, "T^3+T+1");
        assert_eq!(degeneracy_matrix(&s, &s, &Poly::one()).unwrap(), IntMatrix::identity(s.genus()));
        let _ = fq;
    }
}
