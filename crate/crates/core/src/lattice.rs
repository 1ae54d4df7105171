//! The Hecke algebra and its Eisenstein ideal as lattices of integer
//! matrices, finite abelian quotients, the component group Φ_∞ and
//! Eisenstein kernels.

use crate::cochain::HarmonicSpace;
use crate::error::{Error, Result};
use crate::field::Fe;
use crate::hecke::hecke_matrix;
use crate::intmat::{coords_in_echelon, IntMatrix};
use crate::poly::{monic_irreducibles, Poly};
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;
use std::collections::HashMap;
use std::sync::Mutex;

/// Highest generator degree tried before giving up with `NoStabilization`.
pub const MAX_GEN_DEGREE: usize = 5;
/// Cap on multiplication rounds while closing a lattice under products.
const MAX_ROUNDS: usize = 32;

/// A finite(ly generated) abelian group `Z^free ⊕ ⊕ Z/d_i` with `d_i | d_{i+1}`, `d_i > 1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FinAbGroup {
    #[serde(serialize_with = "ser_bigints")]
    pub factors: Vec<BigInt>,
    pub free_rank: usize,
}

fn ser_bigints<S: serde::Serializer>(v: &[BigInt], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|x| x.to_string()))
}

impl FinAbGroup {
    /// The cokernel `Z^rows / (column span of m)`.
    pub fn cokernel(m: &IntMatrix) -> FinAbGroup {
        let (factors, free_rank) = m.cokernel();
        FinAbGroup { factors, free_rank }
    }
    pub fn trivial() -> FinAbGroup {
        FinAbGroup { factors: vec![], free_rank: 0 }
    }
    pub fn is_finite(&self) -> bool {
        self.free_rank == 0
    }
    /// Group order, `None` if infinite.
    pub fn order(&self) -> Option<BigInt> {
        self.is_finite().then(|| self.factors.iter().product())
    }
    pub fn is_cyclic(&self) -> bool {
        self.is_finite() && self.factors.len() <= 1
    }
    /// Factors as machine integers (for reports and comparisons).
    pub fn factors_u64(&self) -> Vec<u64> {
        self.factors.iter().map(|d| u64::try_from(d).expect("factor fits in u64")).collect()
    }
    pub fn fmt(&self) -> String {
        let mut parts: Vec<String> = self.factors.iter().map(|d| format!("Z/{d}")).collect();
        if self.free_rank > 0 {
            parts.push(format!("Z^{}", self.free_rank));
        }
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" x ")
        }
    }
}

fn flatten(m: &IntMatrix) -> Vec<BigInt> {
    m.entries().to_vec()
}

/// A Z-span of g×g integer matrices, kept as an HNF basis of flattened rows.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatrixLattice {
    pub g: usize,
    /// HNF basis, one flattened matrix per row
    pub basis: IntMatrix,
}

impl MatrixLattice {
    pub fn span(g: usize, mats: &[IntMatrix]) -> MatrixLattice {
        let rows: Vec<Vec<BigInt>> = mats.iter().map(flatten).collect();
        let m = IntMatrix::from_rows(rows, g * g);
        MatrixLattice { g, basis: m.hnf().nonzero_rows() }
    }
    pub fn rank(&self) -> usize {
        self.basis.rows()
    }
    pub fn matrices(&self) -> Vec<IntMatrix> {
        (0..self.rank()).map(|r| IntMatrix::from_rows(self.basis.row(r).chunks(self.g).map(|c| c.to_vec()).collect(), self.g)).collect()
    }
    /// Coordinates of `m` in the HNF basis, `None` if `m` is not in the lattice.
    pub fn coords(&self, m: &IntMatrix) -> Option<Vec<BigInt>> {
        if self.g == 0 {
            return Some(vec![]);
        }
        coords_in_echelon(&self.basis, &flatten(m))
    }
    pub fn contains(&self, m: &IntMatrix) -> bool {
        self.coords(m).is_some()
    }
    fn extend(&self, mats: &[IntMatrix]) -> MatrixLattice {
        let mut all = self.matrices();
        all.extend_from_slice(mats);
        MatrixLattice::span(self.g, &all)
    }
    /// Closes the lattice under multiplication; returns the number of rounds used.
    pub fn close_under_products(&self) -> Result<(MatrixLattice, usize)> {
        let mut cur = self.clone();
        for round in 1..=MAX_ROUNDS {
            let b = cur.matrices();
            let prods: Vec<IntMatrix> =
                (0..b.len()).into_par_iter().flat_map_iter(|i| (0..b.len()).map(|j| b[i].mul(&b[j])).collect::<Vec<_>>()).collect();
            let next = cur.extend(&prods);
            if next == cur {
                return Ok((cur, round));
            }
            cur = next;
        }
        Err(Error::NoStabilization(format!("product closure still growing after {MAX_ROUNDS} rounds")))
    }
    /// Index `[self : sub]` when `sub ⊆ self` and the ranks agree.
    pub fn index_of(&self, sub: &MatrixLattice) -> Result<Option<BigInt>> {
        let mut rows = Vec::new();
        for m in sub.matrices() {
            rows.push(self.coords(&m).ok_or_else(|| Error::NotSublattice("generator outside the larger lattice".into()))?);
        }
        if sub.rank() != self.rank() {
            return Ok(None);
        }
        Ok(Some(IntMatrix::from_rows(rows, self.rank()).det().abs()))
    }
}

/// Memoized Hecke matrices on one harmonic basis.
pub struct HeckeCache<'a> {
    pub space: &'a HarmonicSpace,
    mats: Mutex<HashMap<Vec<Fe>, IntMatrix>>,
}

impl<'a> HeckeCache<'a> {
    pub fn new(space: &'a HarmonicSpace) -> HeckeCache<'a> {
        HeckeCache { space, mats: Mutex::new(HashMap::new()) }
    }
    pub fn t(&self, m: &Poly) -> Result<IntMatrix> {
        let key = m.coeffs().to_vec();
        if let Some(x) = self.mats.lock().unwrap().get(&key) {
            return Ok(x.clone());
        }
        let x = hecke_matrix(self.space, m)?;
        self.mats.lock().unwrap().insert(key, x.clone());
        Ok(x)
    }
    /// Computes T_p for every listed prime, in parallel.
    pub fn prefetch(&self, ps: &[Poly]) -> Result<()> {
        ps.par_iter().try_for_each(|p| self.t(p).map(|_| ()))
    }
    /// `T_p - (|p| + 1)`.
    pub fn eta(&self, p: &Poly) -> Result<IntMatrix> {
        let g = self.space.genus();
        Ok(self.t(p)?.sub(&IntMatrix::scalar(g, &BigInt::from(p.norm(self.space.fq()) + 1))))
    }
    fn level(&self) -> &Poly {
        &self.space.graph.level.n
    }
    /// Monic primes of degree ≤ d, optionally only those prime to the level.
    pub fn primes(&self, d: usize, coprime_only: bool) -> Vec<Poly> {
        let fq = self.space.fq();
        let mut out = Vec::new();
        for k in 1..=d {
            for p in monic_irreducibles(k, fq) {
                if !coprime_only || !p.divides(self.level(), fq) {
                    out.push(p);
                }
            }
        }
        out
    }
}

/// Which generators to use for the Hecke algebra.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Variant {
    /// all T_p (U_p for p | n)
    Full,
    /// only T_p with p prime to the level
    Coprime,
}

/// A Hecke algebra lattice with the generation degree that stabilized it.
#[derive(Clone, Debug)]
pub struct HeckeAlgebra {
    pub lattice: MatrixLattice,
    pub variant: Variant,
    pub degree: usize,
    /// true if the requested degree had to be raised
    pub escalated: bool,
}

fn algebra_at(cache: &HeckeCache, d: usize, variant: Variant) -> Result<MatrixLattice> {
    let g = cache.space.genus();
    let ps = cache.primes(d, variant == Variant::Coprime);
    cache.prefetch(&ps)?;
    let mut gens = vec![IntMatrix::identity(g)];
    for p in &ps {
        gens.push(cache.t(p)?);
    }
    Ok(MatrixLattice::span(g, &gens).close_under_products()?.0)
}

/// The Z-algebra generated by the identity and T_p for deg p ≤ D. D is
/// raised until degree D and D + 1 give the same lattice.
pub fn hecke_algebra(cache: &HeckeCache, start_degree: usize, variant: Variant) -> Result<HeckeAlgebra> {
    let mut d = start_degree.max(1);
    let mut cur = algebra_at(cache, d, variant)?;
    while d < MAX_GEN_DEGREE {
        let next = algebra_at(cache, d + 1, variant)?;
        if next == cur {
            return Ok(HeckeAlgebra { lattice: cur, variant, degree: d, escalated: d > start_degree.max(1) });
        }
        cur = next;
        d += 1;
    }
    Err(Error::NoStabilization(format!("Hecke algebra still growing at generator degree {MAX_GEN_DEGREE}")))
}

/// The Eisenstein ideal inside a Hecke algebra and the quotient 𝕋/𝔈.
#[derive(Clone, Debug)]
pub struct EisensteinIdeal {
    pub lattice: MatrixLattice,
    pub quotient: FinAbGroup,
    pub degree: usize,
    pub escalated: bool,
}

impl EisensteinIdeal {
    pub fn contains(&self, m: &IntMatrix) -> bool {
        self.lattice.contains(m)
    }
}

fn ideal_at(cache: &HeckeCache, t: &MatrixLattice, d: usize) -> Result<EisensteinIdeal> {
    let ps = cache.primes(d, true);
    cache.prefetch(&ps)?;
    let basis = t.matrices();
    let mut gens = Vec::new();
    for p in &ps {
        let eta = cache.eta(p)?;
        for b in &basis {
            gens.push(b.mul(&eta));
        }
    }
    let lat = MatrixLattice::span(t.g, &gens);
    // coordinates of the ideal's basis in the algebra's basis, as columns
    let mut cols = Vec::new();
    for m in lat.matrices() {
        cols.push(t.coords(&m).ok_or_else(|| Error::NotSublattice("ideal element outside the Hecke algebra".into()))?);
    }
    let quotient = FinAbGroup::cokernel(&IntMatrix::from_cols(cols, t.rank()));
    Ok(EisensteinIdeal { lattice: lat, quotient, degree: d, escalated: false })
}

/// 𝔈 = Σ 𝕋·(T_p - |p| - 1) over primes p ∤ n of degree ≤ D′, with D′ raised
/// until the quotient 𝕋/𝔈 is the same for D′ and D′ + 1.
pub fn eisenstein_ideal(cache: &HeckeCache, t: &HeckeAlgebra, start_degree: usize) -> Result<EisensteinIdeal> {
    let start = start_degree.max(1);
    let mut d = start;
    let mut cur = ideal_at(cache, &t.lattice, d)?;
    while d < MAX_GEN_DEGREE {
        let next = ideal_at(cache, &t.lattice, d + 1)?;
        if next.quotient == cur.quotient && next.lattice == cur.lattice {
            cur.escalated = d > start;
            return Ok(cur);
        }
        cur = next;
        d += 1;
    }
    Err(Error::NoStabilization(format!("Eisenstein quotient still changing at degree {MAX_GEN_DEGREE}")))
}

/// Φ_∞ = Z^g / G·Z^g.
pub fn component_group(gram: &IntMatrix) -> FinAbGroup {
    FinAbGroup::cokernel(gram)
}

/// An endomorphism of a presented group `Z^g / R·Z^g`, written on the Smith
/// generators of the group.
#[derive(Clone, Debug)]
pub struct QuotientAction {
    pub group: FinAbGroup,
    /// action on the generators with nontrivial order, entries reduced mod the
    /// order of the target generator
    pub matrix: IntMatrix,
    pub is_zero: bool,
}

/// The action of `m` on `Z^g / R·Z^g`, checking that `m` preserves `R·Z^g`.
pub fn action_on_presentation(m: &IntMatrix, rel: &IntMatrix) -> Result<QuotientAction> {
    let g = rel.rows();
    for j in 0..rel.cols() {
        let image = m.mul_vec(&rel.col(j));
        if rel.solve_integral_any(&image).is_none() {
            return Err(Error::NotEquivariant(format!("relation {j} is not mapped into the relation lattice")));
        }
    }
    let s = rel.snf();
    let d: Vec<BigInt> = (0..g).map(|i| s.d.get(i).cloned().unwrap_or_else(BigInt::zero)).collect();
    let u_inv = s.u.inverse_unimodular();
    let a = s.u.mul(m).mul(&u_inv);
    let keep: Vec<usize> = (0..g).filter(|&i| !d[i].is_one()).collect();
    let mut out = IntMatrix::zeros(keep.len(), keep.len());
    let mut is_zero = true;
    for (r, &i) in keep.iter().enumerate() {
        for (c, &j) in keep.iter().enumerate() {
            let mut x = a.get(i, j).clone();
            if !d[i].is_zero() {
                x = ((x % &d[i]) + &d[i]) % &d[i];
            }
            if !x.is_zero() {
                is_zero = false;
            }
            out.set(r, c, x);
        }
    }
    Ok(QuotientAction { group: FinAbGroup::cokernel(rel), matrix: out, is_zero })
}

/// The action of a Hecke operator (matrix on H₀ coordinates) on Φ_∞, via
/// the transpose on Hom(H₀, Z) modulo the image of the Gram matrix.
pub fn action_on_component_group(op: &IntMatrix, gram: &IntMatrix) -> Result<QuotientAction> {
    action_on_presentation(&op.transpose(), gram)
}

/// `{x ∈ Z^g / R·Z^g : A_i x ∈ R·Z^g for all i}`.
pub fn kernel_of_operators(rel: &IntMatrix, ops: &[IntMatrix]) -> Result<FinAbGroup> {
    let g = rel.rows();
    if g == 0 {
        return Ok(FinAbGroup::trivial());
    }
    for a in ops {
        action_on_presentation(a, rel)?;
    }
    // y = u·x turns the relations into diag(d); each operator becomes u·A·u⁻¹
    let s = rel.snf();
    let d: Vec<BigInt> = (0..g).map(|i| s.d.get(i).cloned().unwrap_or_else(BigInt::zero)).collect();
    let u_inv = s.u.inverse_unimodular();
    // solve B y ≡ 0 mod d (row-wise) through the integer kernel of [B | -D]
    let k = ops.len();
    let mut big = IntMatrix::zeros(k * g, g + k * g);
    for (t, a) in ops.iter().enumerate() {
        let b = s.u.mul(a).mul(&u_inv);
        for i in 0..g {
            for j in 0..g {
                big.set(t * g + i, j, b.get(i, j).clone());
            }
            big.set(t * g + i, g + t * g + i, -d[i].clone());
        }
    }
    let ker = big.kernel();
    // project to the y-part and take a basis of the resulting lattice L ⊇ diag(d)Z^g
    let proj = ker.transpose();
    let mut rows: Vec<Vec<BigInt>> = (0..proj.rows()).map(|r| proj.row(r)[..g].to_vec()).collect();
    if ops.is_empty() {
        rows = IntMatrix::identity(g).to_rows();
    }
    let lat = IntMatrix::from_rows(rows, g).hnf().nonzero_rows();
    // relations diag(d) in L-coordinates
    let mut cols = Vec::new();
    for i in 0..g {
        let mut v = vec![BigInt::zero(); g];
        v[i] = d[i].clone();
        cols.push(coords_in_echelon(&lat, &v).ok_or_else(|| Error::NotEquivariant("relation outside the kernel lattice".into()))?);
    }
    Ok(FinAbGroup::cokernel(&IntMatrix::from_cols(cols, lat.rows())))
}

/// Eisenstein kernel of `Z^g / R` for the operators η_p (given on the same
/// coordinates) with p ∤ n, deg p ≤ D″; D″ is raised until the result is
/// the same for two consecutive degrees.
pub fn eisenstein_kernel<F>(rel: &IntMatrix, cache: &HeckeCache, start_degree: usize, transform: F) -> Result<(FinAbGroup, usize)>
where
    F: Fn(IntMatrix) -> IntMatrix,
{
    let at = |d: usize| -> Result<FinAbGroup> {
        let ps = cache.primes(d, true);
        cache.prefetch(&ps)?;
        let ops: Vec<IntMatrix> = ps.iter().map(|p| cache.eta(p).map(&transform)).collect::<Result<_>>()?;
        kernel_of_operators(rel, &ops)
    };
    let mut d = start_degree.max(1);
    let mut cur = at(d)?;
    while d < MAX_GEN_DEGREE {
        let next = at(d + 1)?;
        if next == cur {
            return Ok((cur, d));
        }
        cur = next;
        d += 1;
    }
    Err(Error::NoStabilization(format!("Eisenstein kernel still changing at degree {MAX_GEN_DEGREE}")))
}

/// Φ_∞[𝔈].
pub fn component_group_eisenstein_kernel(gram: &IntMatrix, cache: &HeckeCache, start_degree: usize) -> Result<(FinAbGroup, usize)> {
    eisenstein_kernel(gram, cache, start_degree, |m| m.transpose())
}

/// H₀₀(n, Z/N)[𝔈], with H₀₀(n, Z/N) the reduction of the integral lattice.
pub fn cochains_mod_n_eisenstein_kernel(cache: &HeckeCache, modulus: &BigInt, start_degree: usize) -> Result<(FinAbGroup, usize)> {
    let g = cache.space.genus();
    eisenstein_kernel(&IntMatrix::scalar(g, modulus), cache, start_degree, |m| m)
}

/// `[(h_j | t_i)*(1)]` for operators `t_i` (e.g. a Hecke algebra basis) and
/// the basis `h_j` of the harmonic space.
pub fn pairing_matrix(space: &HarmonicSpace, mats: &[IntMatrix]) -> Result<IntMatrix> {
    let first = space.fourier_basis(&Poly::one())?;
    let c: Vec<BigInt> = first
        .iter()
        .map(|x| if x.is_integer() { Ok(x.to_integer()) } else { Err(Error::NonIntegral("first Fourier coefficient".into())) })
        .collect::<Result<_>>()?;
    let g = space.genus();
    let mut out = IntMatrix::zeros(mats.len(), g);
    for (i, m) in mats.iter().enumerate() {
        for j in 0..g {
            let mut s = BigInt::zero();
            for (k, ck) in c.iter().enumerate() {
                s += ck * m.get(k, j);
            }
            out.set(i, j, s);
        }
    }
    Ok(out)
}

/// True when `m` is ±1.
pub fn is_unit(m: &BigInt) -> bool {
    m.abs().is_one()
}

/// Hecke algebras, Eisenstein quotient and component group of one level.
#[derive(Clone, Debug)]
pub struct LevelSummary {
    pub genus: usize,
    pub t: HeckeAlgebra,
    pub t0: HeckeAlgebra,
    /// `[𝕋 : 𝕋⁰]`, `None` when the ranks differ
    pub index: Option<BigInt>,
    pub ideal: EisensteinIdeal,
    pub gram: IntMatrix,
    pub phi: FinAbGroup,
    pub phi_kernel: FinAbGroup,
    pub phi_kernel_degree: usize,
}

/// Computes everything in [`LevelSummary`] starting from generator degree `start`.
pub fn summarize(cache: &HeckeCache, start: usize) -> Result<LevelSummary> {
    let t = hecke_algebra(cache, start, Variant::Full)?;
    let t0 = hecke_algebra(cache, start, Variant::Coprime)?;
    let index = t.lattice.index_of(&t0.lattice)?;
    let ideal = eisenstein_ideal(cache, &t, start)?;
    let gram = crate::cochain::gram_matrix(cache.space)?;
    let phi = component_group(&gram);
    let (phi_kernel, phi_kernel_degree) = component_group_eisenstein_kernel(&gram, cache, start)?;
    Ok(LevelSummary { genus: cache.space.genus(), t, t0, index, ideal, gram, phi, phi_kernel, phi_kernel_degree })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[Vec<i64>]) -> IntMatrix {
        IntMatrix::from_i64(rows)
    }

    #[test]
    fn kernel_of_operators_on_cyclic_groups() {
        // Z/12 with multiplication by 4: kernel is 3Z/12 ≅ Z/4
        let k = kernel_of_operators(&m(&[vec![12]]), &[m(&[vec![4]])]).unwrap();
        assert_eq!(k.factors_u64(), vec![4]);
        // Z/2 x Z/4 with (x, y) ↦ (0, 2y): kernel Z/2 x Z/2
        let k = kernel_of_operators(&m(&[vec![2, 0], vec![0, 4]]), &[m(&[vec![0, 0], vec![0, 2]])]).unwrap();
        assert_eq!(k.factors_u64(), vec![2, 2]);
        // no operators: the whole group
        let k = kernel_of_operators(&m(&[vec![6, 0], vec![0, 4]]), &[]).unwrap();
        assert_eq!(k.factors_u64(), vec![2, 12]);
    }

    #[test]
    fn non_descending_operator_is_rejected() {
        let r = action_on_presentation(&m(&[vec![0, 1], vec![1, 0]]), &m(&[vec![2, 0], vec![0, 3]]));
        assert!(matches!(r, Err(Error::NotEquivariant(_))));
    }

    #[test]
    fn closure_of_a_nilpotent() {
        let n = m(&[vec![0, 1], vec![0, 0]]);
        let (l, _) = MatrixLattice::span(2, &[IntMatrix::identity(2), n.clone()]).close_under_products().unwrap();
        assert_eq!(l.rank(), 2);
        let (l2, _) = MatrixLattice::span(2, &[n.transpose(), n]).close_under_products().unwrap();
        assert_eq!(l2.rank(), 4);
    }

    #[test]
    fn index_of_sublattice() {
        let big = MatrixLattice::span(1, &[m(&[vec![1]])]);
        let small = MatrixLattice::span(1, &[m(&[vec![6]])]);
        assert_eq!(big.index_of(&small).unwrap(), Some(BigInt::from(6)));
        assert!(small.index_of(&big).is_err());
    }
}
