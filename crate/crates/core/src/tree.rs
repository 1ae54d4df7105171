//! The Bruhat-Tits tree of PGL₂(F_∞).
//!
//! Vertices are named `v(k, u)`, the class of `(π^k u; 0 1)` modulo
//! `GL₂(O_∞)·Z(F_∞)`, where `u` keeps only the terms of exponent `< k`.
//! The positive edge `(k, u)` is the class of the same matrix modulo the
//! Iwahori subgroup; it runs from `v(k, u)` to its parent `v(k-1, u mod π^{k-1})`.
//! A flipped edge is the class of `(π^k u; 0 1)·w` with `w = (0 1; π 0)` and
//! is the reverse of the positive edge with the same `(k, u)`.
//!
//! For any matrix `M` the edge it names has origin `vertex(M)` and terminus
//! `vertex(M·w)`.

use crate::error::{Error, Result};
use crate::field::{Fe, Fq};
use crate::laurent::Laurent;
use crate::poly::Poly;
use serde::Serialize;

/// A 2×2 matrix over F_∞.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mat2 {
    pub a: Laurent,
    pub b: Laurent,
    pub c: Laurent,
    pub d: Laurent,
}

impl Mat2 {
    pub fn new(a: Laurent, b: Laurent, c: Laurent, d: Laurent) -> Mat2 {
        Mat2 { a, b, c, d }
    }
    pub fn identity() -> Mat2 {
        Mat2::new(Laurent::one(), Laurent::zero(), Laurent::zero(), Laurent::one())
    }
    /// Embeds a matrix over A through T = π^{-1}.
    pub fn from_polys(a: &Poly, b: &Poly, c: &Poly, d: &Poly) -> Mat2 {
        Mat2::new(Laurent::from_poly(a), Laurent::from_poly(b), Laurent::from_poly(c), Laurent::from_poly(d))
    }
    /// `(0 1; π 0)`.
    pub fn w() -> Mat2 {
        Mat2::new(Laurent::zero(), Laurent::one(), Laurent::pi_pow(1), Laurent::zero())
    }
    /// `(π^k u; 0 1)`.
    pub fn standard(k: i64, u: &Laurent) -> Mat2 {
        Mat2::new(Laurent::pi_pow(k), u.clone(), Laurent::zero(), Laurent::one())
    }
    pub fn mul(&self, o: &Mat2, fq: &Fq) -> Mat2 {
        let e = |x: &Laurent, y: &Laurent, z: &Laurent, t: &Laurent| x.mul(y, fq).add(&z.mul(t, fq), fq);
        Mat2::new(
            e(&self.a, &o.a, &self.b, &o.c),
            e(&self.a, &o.b, &self.b, &o.d),
            e(&self.c, &o.a, &self.d, &o.c),
            e(&self.c, &o.b, &self.d, &o.d),
        )
    }
    pub fn det(&self, fq: &Fq) -> Laurent {
        self.a.mul(&self.d, fq).sub(&self.b.mul(&self.c, fq), fq)
    }
    /// `M·w = (π b, a; π d, c)`.
    pub fn times_w(&self) -> Mat2 {
        Mat2::new(self.b.shift(1), self.a.clone(), self.d.shift(1), self.c.clone())
    }
}

/// A vertex `v(k, u)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Vertex {
    pub k: i64,
    pub u: Laurent,
}

impl Vertex {
    pub fn new(k: i64, u: &Laurent) -> Result<Vertex> {
        Ok(Vertex { k, u: u.truncate(k)? })
    }
    /// `v(0, 0)`, the class of the identity.
    pub fn base() -> Vertex {
        Vertex { k: 0, u: Laurent::zero() }
    }
    pub fn matrix(&self) -> Mat2 {
        Mat2::standard(self.k, &self.u)
    }
    pub fn parent(&self) -> Vertex {
        Vertex { k: self.k - 1, u: self.u.truncate(self.k - 1).expect("exact") }
    }
    /// The `q` children `v(k+1, u + απ^k)` in the order of `fq.elements()`.
    pub fn children(&self, fq: &Fq) -> Vec<Vertex> {
        fq.elements()
            .map(|a| Vertex { k: self.k + 1, u: self.u.add(&Laurent::monomial(a, self.k), fq) })
            .collect()
    }
    /// Parent first, then the children.
    pub fn neighbors(&self, fq: &Fq) -> Vec<Vertex> {
        let mut v = vec![self.parent()];
        v.extend(self.children(fq));
        v
    }
    /// The `q + 1` edges with terminus `self`: the positive edges from the
    /// children, then the reverse of the edge to the parent.
    pub fn edges_into(&self, fq: &Fq) -> Vec<Edge> {
        let mut out: Vec<Edge> = self.children(fq).into_iter().map(|c| Edge { k: c.k, u: c.u, flipped: false }).collect();
        out.push(Edge { k: self.k, u: self.u.clone(), flipped: true });
        out
    }
    pub fn fmt(&self, fq: &Fq) -> String {
        format!("v({}, {})", self.k, self.u.fmt(fq))
    }
}

/// An oriented edge of the tree in canonical form.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Edge {
    pub k: i64,
    pub u: Laurent,
    pub flipped: bool,
}

#[derive(Serialize)]
struct EdgeJson {
    k: i64,
    u: String,
    flipped: bool,
}

impl Edge {
    /// The positive edge `(π^k u; 0 1)`, with `u` reduced mod π^k.
    pub fn positive(k: i64, u: &Laurent) -> Result<Edge> {
        Ok(Edge { k, u: u.truncate(k)?, flipped: false })
    }
    /// Builds from exponent/coefficient pairs, e.g. `[(1, 1), (2, a)]` for `π + aπ²`.
    pub fn from_terms(k: i64, terms: &[(i64, Fe)], fq: &Fq) -> Edge {
        let mut u = Laurent::zero();
        for &(e, c) in terms {
            u = u.add(&Laurent::monomial(c, e), fq);
        }
        Edge::positive(k, &u).expect("exact input")
    }
    pub fn matrix(&self) -> Mat2 {
        let m = Mat2::standard(self.k, &self.u);
        if self.flipped {
            m.times_w()
        } else {
            m
        }
    }
    pub fn reverse(&self) -> Edge {
        Edge { k: self.k, u: self.u.clone(), flipped: !self.flipped }
    }
    /// The positively oriented edge underlying `self`.
    pub fn unoriented(&self) -> Edge {
        Edge { k: self.k, u: self.u.clone(), flipped: false }
    }
    /// The child end `v(k, u)`.
    pub fn lower(&self) -> Vertex {
        Vertex { k: self.k, u: self.u.clone() }
    }
    /// The parent end `v(k-1, u mod π^{k-1})`.
    pub fn upper(&self) -> Vertex {
        self.lower().parent()
    }
    pub fn origin(&self) -> Vertex {
        if self.flipped {
            self.upper()
        } else {
            self.lower()
        }
    }
    pub fn terminus(&self) -> Vertex {
        if self.flipped {
            self.lower()
        } else {
            self.upper()
        }
    }
    pub fn fmt(&self, fq: &Fq) -> String {
        format!("({}, {}){}", self.k, self.u.fmt(fq), if self.flipped { "~" } else { "" })
    }
    pub fn to_json(&self, fq: &Fq) -> serde_json::Value {
        serde_json::to_value(EdgeJson { k: self.k, u: self.u.fmt(fq), flipped: self.flipped }).expect("serializable")
    }
    /// Total order used for deterministic output.
    pub fn sort_key(&self) -> (i64, Vec<(i64, Fe)>, bool) {
        (self.k, self.u.terms().collect(), self.flipped)
    }
}

fn nonzero_val(x: &Laurent) -> Result<Option<i64>> {
    x.valuation()
}

/// The vertex named by an invertible matrix.
pub fn vertex_of(m: &Mat2, fq: &Fq) -> Result<Vertex> {
    let det = m.det(fq);
    let vdet = nonzero_val(&det)?.ok_or_else(|| Error::Dimension("singular matrix".into()))?;
    let vc = nonzero_val(&m.c)?;
    let vd = nonzero_val(&m.d)?;
    let use_d = match (vc, vd) {
        (_, None) => false,
        (None, Some(_)) => true,
        (Some(c), Some(d)) => d <= c,
    };
    let (num, den, vden) = if use_d { (&m.b, &m.d, vd.unwrap()) } else { (&m.a, &m.c, vc.unwrap()) };
    let k = vdet - 2 * vden;
    let u = num.div(den, k, fq)?;
    Vertex::new(k, &u)
}

/// The canonical edge named by an invertible matrix.
pub fn normalize(m: &Mat2, fq: &Fq) -> Result<Edge> {
    let o = vertex_of(m, fq)?;
    let t = vertex_of(&m.times_w(), fq)?;
    if t.k == o.k - 1 && o.parent() == t {
        Ok(Edge { k: o.k, u: o.u, flipped: false })
    } else if o.k == t.k - 1 && t.parent() == o {
        Ok(Edge { k: t.k, u: t.u, flipped: true })
    } else {
        Err(Error::Dimension(format!("endpoints {} and {} are not adjacent", o.fmt(fq), t.fmt(fq))))
    }
}

/// Left action `g·e`.
pub fn act(g: &Mat2, e: &Edge, fq: &Fq) -> Result<Edge> {
    normalize(&g.mul(&e.matrix(), fq), fq)
}

/// Left action on a vertex.
pub fn act_vertex(g: &Mat2, v: &Vertex, fq: &Fq) -> Result<Vertex> {
    vertex_of(&g.mul(&v.matrix(), fq), fq)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::collections::HashSet;

    fn rand_laurent(rng: &mut ChaCha8Rng, lo: i64, hi: i64, fq: &Fq) -> Laurent {
        let coeffs: Vec<Fe> = (lo..hi).map(|_| rng.gen_range(0..fq.q()) as Fe).collect();
        Laurent::from_terms(lo, coeffs)
    }
    fn rand_unit(rng: &mut ChaCha8Rng, fq: &Fq) -> Laurent {
        let mut x = rand_laurent(rng, 0, 4, fq);
        if x.coeff(0) == 0 {
            x = x.add(&Laurent::one(), fq);
        }
        x
    }
    /// Random element of Z(F_∞)·I_∞ with exact (truncated) entries.
    fn rand_iwahori(rng: &mut ChaCha8Rng, fq: &Fq) -> Mat2 {
        let s = Laurent::pi_pow(rng.gen_range(-2..3));
        let a = rand_unit(rng, fq);
        let d = rand_unit(rng, fq);
        let b = rand_laurent(rng, 0, 4, fq);
        let c = rand_laurent(rng, 1, 5, fq);
        Mat2::new(a.mul(&s, fq), b.mul(&s, fq), c.mul(&s, fq), d.mul(&s, fq))
    }
    fn rand_edge(rng: &mut ChaCha8Rng, fq: &Fq) -> Edge {
        let k = rng.gen_range(-3..5);
        let u = rand_laurent(rng, -3, k.max(-3), fq);
        let mut e = Edge::positive(k, &u).unwrap();
        e.flipped = rng.gen_bool(0.5);
        e
    }
    fn rand_poly_mat(rng: &mut ChaCha8Rng, fq: &Fq) -> Mat2 {
        // product of elementary matrices has unit determinant
        let mut m = Mat2::identity();
        for _ in 0..3 {
            let p = Poly::from_coeffs((0..3).map(|_| rng.gen_range(0..fq.q()) as Fe).collect());
            let el = if rng.gen_bool(0.5) {
                Mat2::from_polys(&Poly::one(), &p, &Poly::zero(), &Poly::one())
            } else {
                Mat2::from_polys(&Poly::one(), &Poly::zero(), &p, &Poly::one())
            };
            m = m.mul(&el, fq);
        }
        m
    }

    #[test]
    fn standard_edges_are_fixed() {
        let fq = Fq::new(3).unwrap();
        let e = Edge::from_terms(2, &[(1, 1)], &fq);
        assert_eq!(normalize(&Mat2::standard(2, &e.u), &fq).unwrap(), e);
        let ww = e.matrix().mul(&Mat2::w(), &fq).mul(&Mat2::w(), &fq);
        assert_eq!(normalize(&ww, &fq).unwrap(), e);
        assert_eq!(normalize(&e.matrix().times_w(), &fq).unwrap(), e.reverse());
    }

    #[test]
    fn right_iwahori_invariance() {
        let fq = Fq::new(4).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let e = Edge::from_terms(2, &[(1, 1)], &fq);
        for _ in 0..50 {
            let h = rand_iwahori(&mut rng, &fq);
            assert_eq!(normalize(&e.matrix().mul(&h, &fq), &fq).unwrap(), e);
        }
        for _ in 0..100 {
            let e = rand_edge(&mut rng, &fq);
            let h = rand_iwahori(&mut rng, &fq);
            assert_eq!(normalize(&e.matrix().mul(&h, &fq), &fq).unwrap(), e);
        }
    }

    #[test]
    fn reverse_swaps_ends() {
        let fq = Fq::new(5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let e = rand_edge(&mut rng, &fq);
            assert_eq!(e.reverse().reverse(), e);
            assert_eq!(e.reverse().terminus(), e.origin());
            assert_eq!(vertex_of(&e.matrix(), &fq).unwrap(), e.origin());
            assert_eq!(vertex_of(&e.matrix().times_w(), &fq).unwrap(), e.terminus());
            assert!(e.origin().neighbors(&fq).contains(&e.terminus()));
        }
    }

    #[test]
    fn edges_into_have_the_right_terminus() {
        for q in [2, 5] {
            let fq = Fq::new(q).unwrap();
            let v = Vertex::new(2, &Laurent::monomial(1, 1)).unwrap();
            for v in [Vertex::base(), v] {
                let es = v.edges_into(&fq);
                assert_eq!(es.len(), q as usize + 1);
                let set: HashSet<Edge> = es.iter().cloned().collect();
                assert_eq!(set.len(), es.len());
                for e in &es {
                    assert_eq!(vertex_of(&e.matrix().times_w(), &fq).unwrap(), v);
                    assert_eq!(e.terminus(), v);
                }
            }
        }
    }

    #[test]
    fn action_is_associative_and_central() {
        let fq = Fq::new(3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let lam = Laurent::from_poly(&Poly::from_coeffs(vec![2, 1]));
        let scalar = Mat2::new(lam.clone(), Laurent::zero(), Laurent::zero(), lam);
        for _ in 0..100 {
            let e = rand_edge(&mut rng, &fq);
            let g1 = rand_poly_mat(&mut rng, &fq);
            let g2 = rand_poly_mat(&mut rng, &fq);
            assert_eq!(act(&Mat2::identity(), &e, &fq).unwrap(), e);
            assert_eq!(act(&scalar, &e, &fq).unwrap(), e);
            let lhs = act(&g1, &act(&g2, &e, &fq).unwrap(), &fq).unwrap();
            let rhs = act(&g1.mul(&g2, &fq), &e, &fq).unwrap();
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn balls_grow_like_a_tree() {
        let fq = Fq::new(2).unwrap();
        let mut seen = HashSet::new();
        let mut frontier = vec![Vertex::base()];
        seen.insert(Vertex::base());
        for d in 1..=6u32 {
            let mut next = Vec::new();
            for v in &frontier {
                for n in v.neighbors(&fq) {
                    if seen.insert(n.clone()) {
                        next.push(n);
                    }
                }
            }
            assert_eq!(next.len(), 3 * 2usize.pow(d - 1));
            frontier = next;
        }
    }
}
