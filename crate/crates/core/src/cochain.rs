//! Cuspidal harmonic cochains H₀(n, Z) on the quotient graph, evaluation on
//! tree edges, Fourier coefficients and the Fourier expansion.

use crate::cyclo::CharSum;
use crate::error::{Error, Result};
use crate::field::{Fe, Fq};
use crate::intmat::{coords_in_echelon, IntMatrix};
use crate::laurent::Laurent;
use crate::poly::Poly;
use crate::quotient::{QuotientGraph, Reduced};
use crate::tree::Edge;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use std::collections::BTreeMap;

/// The lattice H₀(n, Z) with a chosen Z-basis.
///
/// A cochain is stored by its values on the finite edge classes (in the
/// orientation of each class representative); it vanishes on the half-lines.
#[derive(Clone, Debug)]
pub struct HarmonicSpace {
    pub graph: QuotientGraph,
    /// finite class ids, one per coordinate of a value vector
    pub unknowns: Vec<usize>,
    col: Vec<Option<usize>>,
    /// one row per vertex of level ≤ J: Σ_{t(e)=v} w(e) f(e) = 0
    pub constraints: IntMatrix,
    /// Hermite basis of the kernel, as rows
    lattice: IntMatrix,
    /// current basis, one cochain per column
    pub basis: IntMatrix,
    /// `basis = latticeᵀ · change`
    change_inv: IntMatrix,
}

impl HarmonicSpace {
    pub fn new(graph: QuotientGraph) -> Result<HarmonicSpace> {
        let unknowns = graph.finite_classes();
        let mut col = vec![None; graph.classes.len()];
        for (i, &c) in unknowns.iter().enumerate() {
            col[c] = Some(i);
        }
        let verts: Vec<usize> = graph.vertices.iter().filter(|v| v.level <= graph.stable).map(|v| v.id).collect();
        let mut m = IntMatrix::zeros(verts.len(), unknowns.len());
        for (r, &v) in verts.iter().enumerate() {
            for (i, &c) in unknowns.iter().enumerate() {
                let cls = &graph.classes[c];
                let mut x = 0i64;
                if cls.terminus == v {
                    x += cls.weight_fwd as i64;
                }
                if cls.origin == v {
                    x -= cls.weight_bwd as i64;
                }
                if x != 0 {
                    m.set(r, i, BigInt::from(x));
                }
            }
        }
        let k = m.kernel();
        let lattice = k.transpose();
        let g = lattice.rows();
        Ok(HarmonicSpace {
            graph,
            unknowns,
            col,
            constraints: m,
            basis: k,
            lattice,
            change_inv: IntMatrix::identity(g),
        })
    }

    pub fn fq(&self) -> &Fq {
        &self.graph.fq
    }
    /// The rank g of H₀(n, Z).
    pub fn genus(&self) -> usize {
        self.basis.cols()
    }
    pub fn dim(&self) -> usize {
        self.unknowns.len()
    }
    /// Coordinate index of a class, `None` on half-lines.
    pub fn column_of(&self, class: usize) -> Option<usize> {
        self.col[class]
    }
    /// Values of the i-th basis cochain on the finite classes.
    pub fn basis_cochain(&self, i: usize) -> Vec<BigInt> {
        self.basis.col(i)
    }

    pub fn is_harmonic(&self, values: &[BigInt]) -> bool {
        self.constraints.mul_vec(values).iter().all(|x| x.is_zero())
    }

    /// Coordinates in the current basis; `NonIntegral` if `values` is not in H₀(n, Z).
    pub fn coordinates(&self, values: &[BigInt]) -> Result<Vec<BigInt>> {
        let y = coords_in_echelon(&self.lattice, values)
            .ok_or_else(|| Error::NonIntegral("cochain is not in the harmonic lattice".into()))?;
        Ok(self.change_inv.mul_vec(&y))
    }

    /// Replaces the basis by one with `h_i(edges[j]) = δ_ij`.
    pub fn rebase_dual_to(&mut self, edges: &[Edge]) -> Result<()> {
        let g = self.genus();
        if edges.len() != g {
            return Err(Error::Dimension(format!("need {g} edges, got {}", edges.len())));
        }
        // rows: edges, columns: lattice basis elements
        let mut ev = IntMatrix::zeros(g, g);
        let lat_t = self.lattice.transpose();
        for (r, e) in edges.iter().enumerate() {
            let vals = self.evaluate_columns(&lat_t, e)?;
            for (c, v) in vals.into_iter().enumerate() {
                ev.set(r, c, v);
            }
        }
        if !ev.det().abs().is_one() {
            return Err(Error::NonIntegral("evaluation at the given edges is not unimodular".into()));
        }
        // basis = latᵀ · ev⁻¹, so change_inv = ev
        let mut inv_cols = Vec::with_capacity(g);
        for j in 0..g {
            let mut e = vec![BigInt::zero(); g];
            e[j] = BigInt::one();
            inv_cols.push(ev.solve_integral(&e).expect("unimodular"));
        }
        let inv = IntMatrix::from_cols(inv_cols, g);
        self.basis = lat_t.mul(&inv);
        self.change_inv = ev;
        Ok(())
    }

    /// Values at `e` of every column of `cols` (value vectors on the finite classes).
    pub fn evaluate_columns(&self, cols: &IntMatrix, e: &Edge) -> Result<Vec<BigInt>> {
        Ok(match self.graph.reduce_edge(e)? {
            Reduced::CuspZero => vec![BigInt::zero(); cols.cols()],
            Reduced::Finite { class, sign } => {
                let r = self.col[class].expect("finite class");
                cols.row(r).iter().map(|x| if sign < 0 { -x } else { x.clone() }).collect()
            }
        })
    }
    /// Values of all basis cochains at `e`.
    pub fn evaluate_basis(&self, e: &Edge) -> Result<Vec<BigInt>> {
        self.evaluate_columns(&self.basis, e)
    }
    /// Value of one cochain at `e`.
    pub fn evaluate(&self, values: &[BigInt], e: &Edge) -> Result<BigInt> {
        Ok(match self.graph.reduce_edge(e)? {
            Reduced::CuspZero => BigInt::zero(),
            Reduced::Finite { class, sign } => {
                let v = values[self.col[class].expect("finite class")].clone();
                if sign < 0 {
                    -v
                } else {
                    v
                }
            }
        })
    }

    /// Cochain values from basis coordinates.
    pub fn cochain(&self, coords: &[BigInt]) -> Vec<BigInt> {
        self.basis.mul_vec(coords)
    }

    /// `f*(m)` for every column of `cols`; `m` need not be monic, and the
    /// zero polynomial is not allowed.
    pub fn fourier_columns(&self, cols: &IntMatrix, m: &Poly) -> Result<Vec<BigRational>> {
        let fq = self.fq();
        let dm = m.degree().ok_or_else(|| Error::Dimension("zero Fourier index".into()))?;
        let k = 2 + dm as i64;
        let tails = (fq.q() as u64).pow(k as u32 - 1);
        let per_tail: Vec<(u32, Vec<BigInt>)> = (0..tails)
            .into_par_iter()
            .map(|idx| {
                // u = Σ_{i=1}^{k-1} a_i π^i with (a_1, …) the base-q digits of idx
                let a: Vec<Fe> = Poly::from_index(idx, fq.q()).coeffs().to_vec();
                let coeff = |i: usize| a.get(i).copied().unwrap_or(0);
                let u = Laurent::from_terms(1, (0..(k - 1) as usize).map(coeff).collect());
                let e = Edge::positive(k, &u)?;
                // π¹-coefficient of m·u is Σ_l m_l a_{l+1}
                let mut c1: Fe = 0;
                for l in 0..=dm {
                    c1 = fq.add(c1, fq.mul(m.coeff(l), coeff(l)));
                }
                let t = fq.trace(fq.neg(c1));
                Ok((t, self.evaluate_columns(cols, &e)?))
            })
            .collect::<Result<Vec<_>>>()?;
        let mut sums = vec![CharSum::new(fq.p()); cols.cols()];
        for (t, vals) in &per_tail {
            for (s, v) in sums.iter_mut().zip(vals) {
                if !v.is_zero() {
                    s.add(*t, v);
                }
            }
        }
        let denom = BigInt::from(tails);
        sums.iter()
            .map(|s| {
                let z = s.finish();
                let v = z
                    .rational_value()
                    .ok_or_else(|| Error::NonRational(format!("coefficient at m = {}", m.fmt(fq))))?;
                Ok(BigRational::new(v, denom.clone()))
            })
            .collect()
    }

    /// `f*(m)` for every basis cochain.
    pub fn fourier_basis(&self, m: &Poly) -> Result<Vec<BigRational>> {
        self.fourier_columns(&self.basis, m)
    }

    /// `f*(m)` for a single cochain.
    pub fn fourier_coefficient(&self, values: &[BigInt], m: &Poly) -> Result<BigRational> {
        let cols = IntMatrix::from_cols(vec![values.to_vec()], values.len());
        Ok(self.fourier_columns(&cols, m)?.remove(0))
    }

    /// Fourier coefficients of one cochain at all monic m with deg m ≤ `max_deg`.
    pub fn fourier_table(&self, values: &[BigInt], max_deg: usize) -> Result<BTreeMap<Vec<Fe>, BigRational>> {
        let fq = self.fq();
        let mut out = BTreeMap::new();
        for d in 0..=max_deg {
            for m in Poly::monics(d, fq.q()) {
                let c = self.fourier_coefficient(values, &m)?;
                out.insert(m.coeffs().to_vec(), c);
            }
        }
        Ok(out)
    }
}

/// Evaluates the Fourier expansion at `(π^k u; 0 1)` from coefficients
/// `f*(m)` at monic m of degree ≤ k - 2 (keyed by coefficient vector).
pub fn expand(coeffs: &BTreeMap<Vec<Fe>, BigRational>, k: i64, u: &Laurent, fq: &Fq) -> Result<BigRational> {
    let mut total = BigRational::zero();
    let q = BigInt::from(fq.q());
    for j in 0..=(k - 2) {
        let mut inner = BigRational::zero();
        for m in Poly::monics(j as usize, fq.q()) {
            let c = coeffs
                .get(m.coeffs())
                .ok_or_else(|| Error::Dimension(format!("missing coefficient for {}", m.fmt(fq))))?;
            let mu = Laurent::from_poly(&m).mul(u, fq);
            let nu = if mu.coeff(1) != 0 { -1 } else { fq.q() as i64 - 1 };
            inner += c * BigRational::from_integer(BigInt::from(nu));
        }
        let e = -k + 2 + j;
        let scale = if e >= 0 {
            BigRational::from_integer(q.pow(e as u32))
        } else {
            BigRational::new(BigInt::one(), q.pow((-e) as u32))
        };
        total += inner * scale;
    }
    Ok(total)
}

/// The Gram matrix `G_ij = Σ_e f_i(e) f_j(e) / n(e)` over unordered finite classes.
pub fn gram_matrix(space: &HarmonicSpace) -> Result<IntMatrix> {
    let g = space.genus();
    let mut out = IntMatrix::zeros(g, g);
    for i in 0..g {
        for j in 0..g {
            let mut s = BigRational::zero();
            for (r, &c) in space.unknowns.iter().enumerate() {
                let n = BigInt::from(space.graph.classes[c].stab);
                s += BigRational::new(space.basis.get(r, i) * space.basis.get(r, j), n);
            }
            if !s.is_integer() {
                return Err(Error::NonIntegral(format!("Gram entry ({i},{j}) = {s}")));
            }
            out.set(i, j, s.to_integer());
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_poly;
    use crate::quotient::Level;

    fn space(q: u32, n: &str) -> HarmonicSpace {
        let fq = Fq::new(q).unwrap();
        let level = Level::new(&parse_poly(n, &fq).unwrap(), &fq).unwrap();
        HarmonicSpace::new(QuotientGraph::build(&level, &fq).unwrap()).unwrap()
    }

    #[test]
    fn genus_of_small_levels() {
        assert_eq!(space(2, "T^3+T+1").genus(), 2);
        assert_eq!(space(3, "T^3").genus(), 2);
        assert_eq!(space(2, "T^2+T+1").genus(), 0);
        assert_eq!(space(3, "T^2").genus(), 0);
    }

    #[test]
    fn first_coefficient_is_minus_value_at_a_infinity() {
        let s = space(3, "T^3+2*T+1");
        let fq = s.fq().clone();
        let a_inf = Edge::from_terms(2, &[(1, 1)], &fq);
        let f1 = s.fourier_basis(&Poly::one()).unwrap();
        let vals = s.evaluate_basis(&a_inf).unwrap();
        for (c, v) in f1.iter().zip(vals) {
            assert_eq!(*c, BigRational::from_integer(-v));
        }
    }

    #[test]
    fn expansion_round_trip() {
        let s = space(2, "T^3+T+1");
        let fq = s.fq().clone();
        for i in 0..s.genus() {
            let f = s.basis_cochain(i);
            let tab = s.fourier_table(&f, 3).unwrap();
            for k in 1..=5i64 {
                for idx in 0..(2u64.pow(k.max(1) as u32 - 1)) {
                    let a: Vec<Fe> = Poly::from_index(idx, 2).coeffs().to_vec();
                    let u = Laurent::from_terms(1, a);
                    let e = Edge::positive(k, &u).unwrap();
                    let direct = s.evaluate(&f, &e).unwrap();
                    assert_eq!(expand(&tab, k, &e.u, &fq).unwrap(), BigRational::from_integer(direct), "k={k} u={idx}");
                }
            }
        }
    }
}
