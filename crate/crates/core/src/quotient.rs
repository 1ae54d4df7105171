//! The quotient graph Γ₀(n)\T.
//!
//! Every edge of the tree is GL₂(A)-equivalent to exactly one edge `ε_j` of
//! the half-line `v_0 - v_1 - v_2 - ...` with `v_j = v(-j, 0)`, where `ε_j`
//! is the positive edge `(-j, 0)` running from `v_j` to `v_{j+1}`. Writing
//! `e = g·ε_j` with `g ∈ GL₂(A)`, the Γ₀(n)-class of `e` is the orbit of the
//! bottom row of `g`, a point of P¹(A/n), under the right action of
//! `Stab(ε_j) = {(a b; 0 d) : deg b ≤ j}`. Vertices work the same way with
//! `Stab(v_0) = GL₂(F_q)` and `Stab(v_j) = Stab(ε_j)` for `j ≥ 1`.
//!
//! Orbits stop changing at `j = J := max(deg n - 1, 1)`; from there on each
//! orbit is a half-line towards a cusp.

use crate::error::{Error, Result};
use crate::field::{Fe, Fq};
use crate::laurent::Laurent;
use crate::pmat::PMat;
use crate::poly::{factor, Poly};
use crate::tree::{normalize, Edge, Mat2, Vertex};
use serde::Serialize;
use std::collections::{HashMap, VecDeque};
use std::fmt::Write as _;

/// A level `n`: a monic polynomial of positive degree with its factorization.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Level {
    pub n: Poly,
    pub factors: Vec<(Poly, u32)>,
}

impl Level {
    pub fn new(n: &Poly, fq: &Fq) -> Result<Level> {
        if n.deg() < 1 {
            return Err(Error::InvalidLevel(format!("level must be nonconstant, got {}", n.fmt(fq))));
        }
        let n = n.monic(fq);
        let (_, factors) = factor(&n, fq);
        Ok(Level { n, factors })
    }
    pub fn deg(&self) -> usize {
        self.n.deg() as usize
    }
    /// Number of distinct prime divisors.
    pub fn s(&self) -> usize {
        self.factors.len()
    }
    pub fn is_square_free(&self) -> bool {
        self.factors.iter().all(|(_, e)| *e == 1)
    }
}

/// The ring A/n with elements encoded as base-q indices of reduced representatives.
#[derive(Clone, Debug)]
pub struct ResRing {
    fq: Fq,
    n: Poly,
    size: usize,
    tables: Option<(Vec<u32>, Vec<u32>)>,
    prime_mask: Vec<u32>,
}

const TABLE_LIMIT: usize = 1024;

impl ResRing {
    pub fn new(level: &Level, fq: &Fq) -> ResRing {
        let q = fq.q();
        let size = (q as usize).pow(level.deg() as u32);
        let polys: Vec<Poly> = (0..size as u64).map(|i| Poly::from_index(i, q)).collect();
        let prime_mask = polys
            .iter()
            .map(|p| {
                level
                    .factors
                    .iter()
                    .enumerate()
                    .filter(|(_, (f, _))| f.divides(p, fq))
                    .fold(0u32, |m, (i, _)| m | (1 << i))
            })
            .collect();
        let tables = (size <= TABLE_LIMIT).then(|| {
            let mut add = vec![0u32; size * size];
            let mut mul = vec![0u32; size * size];
            for i in 0..size {
                for j in 0..size {
                    add[i * size + j] = polys[i].add(&polys[j], fq).index(q) as u32;
                    mul[i * size + j] = polys[i].mul(&polys[j], fq).rem(&level.n, fq).index(q) as u32;
                }
            }
            (add, mul)
        });
        ResRing { fq: fq.clone(), n: level.n.clone(), size, tables, prime_mask }
    }
    pub fn size(&self) -> usize {
        self.size
    }
    pub fn index(&self, p: &Poly) -> u32 {
        p.rem(&self.n, &self.fq).index(self.fq.q()) as u32
    }
    pub fn poly(&self, i: u32) -> Poly {
        Poly::from_index(i as u64, self.fq.q())
    }
    pub fn add(&self, a: u32, b: u32) -> u32 {
        match &self.tables {
            Some((add, _)) => add[a as usize * self.size + b as usize],
            None => self.index(&self.poly(a).add(&self.poly(b), &self.fq)),
        }
    }
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        match &self.tables {
            Some((_, mul)) => mul[a as usize * self.size + b as usize],
            None => self.index(&self.poly(a).mul(&self.poly(b), &self.fq)),
        }
    }
    /// Bit mask of the prime divisors of n dividing `a`.
    pub fn prime_mask(&self, a: u32) -> u32 {
        self.prime_mask[a as usize]
    }
    pub fn is_unit(&self, a: u32) -> bool {
        self.prime_mask[a as usize] == 0
    }
    /// `(c, d)` generates the unit ideal.
    pub fn is_primitive(&self, c: u32, d: u32) -> bool {
        self.prime_mask[c as usize] & self.prime_mask[d as usize] == 0
    }
    pub fn unit_count(&self) -> usize {
        self.prime_mask.iter().filter(|&&m| m == 0).count()
    }
}

struct UnionFind {
    parent: Vec<u32>,
}

impl UnionFind {
    fn new(n: usize) -> UnionFind {
        UnionFind { parent: (0..n as u32).collect() }
    }
    fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let p = self.parent[x as usize];
            self.parent[x as usize] = self.parent[p as usize];
            x = p;
        }
        x
    }
    fn union(&mut self, a: u32, b: u32) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi as usize] = lo;
        }
    }
}

/// Orbits of one stabilizer group on P¹(A/n), on primitive pairs.
#[derive(Clone, Debug)]
pub struct Orbits {
    /// orbit id of each pair `c·N + d`, `u32::MAX` for non-primitive pairs
    pub id: Vec<u32>,
    /// number of P¹ points in each orbit
    pub size: Vec<u64>,
    /// a representative pair of each orbit
    pub rep: Vec<(u32, u32)>,
}

impl Orbits {
    pub fn count(&self) -> usize {
        self.size.len()
    }
}

fn orbits_from(uf: &mut UnionFind, ring: &ResRing) -> Orbits {
    let n = ring.size();
    let units = ring.unit_count() as u64;
    let mut id = vec![u32::MAX; n * n];
    let mut root_id: HashMap<u32, u32> = HashMap::new();
    let mut pairs: Vec<u64> = Vec::new();
    let mut rep = Vec::new();
    for c in 0..n as u32 {
        for d in 0..n as u32 {
            if !ring.is_primitive(c, d) {
                continue;
            }
            let p = c * n as u32 + d;
            let r = uf.find(p);
            let next = root_id.len() as u32;
            let o = *root_id.entry(r).or_insert(next);
            if o as usize == pairs.len() {
                pairs.push(0);
                rep.push((c, d));
            }
            pairs[o as usize] += 1;
            id[p as usize] = o;
        }
    }
    let size = pairs.into_iter().map(|c| c / units).collect();
    Orbits { id, size, rep }
}

/// Edge orbits for levels `0..=J` and the level-0 vertex orbits.
fn compute_orbits(level: &Level, ring: &ResRing, fq: &Fq, stable: usize) -> (Vec<Orbits>, Orbits) {
    let n = ring.size() as u32;
    let deg = level.deg();
    let pair = |c: u32, d: u32| c * n + d;
    let mut uf = UnionFind::new((n * n) as usize);
    let zeta = ring.index(&Poly::constant(fq.generator()));
    // unit scalars: constants and the monic irreducibles of degree < deg n coprime to n
    let mut unit_gens = vec![zeta];
    for dd in 1..deg {
        for p in crate::poly::monic_irreducibles(dd, fq) {
            let i = ring.index(&p);
            if ring.is_unit(i) {
                unit_gens.push(i);
            }
        }
    }
    let primitive: Vec<(u32, u32)> =
        (0..n).flat_map(|c| (0..n).map(move |d| (c, d))).filter(|&(c, d)| ring.is_primitive(c, d)).collect();
    let apply = |uf: &mut UnionFind, f: &dyn Fn(u32, u32) -> (u32, u32)| {
        for &(c, d) in &primitive {
            let (c2, d2) = f(c, d);
            uf.union(pair(c, d), pair(c2, d2));
        }
    };
    for &u in &unit_gens {
        apply(&mut uf, &|c, d| (ring.mul(u, c), ring.mul(u, d)));
    }
    apply(&mut uf, &|c, d| (ring.mul(zeta, c), d));
    apply(&mut uf, &|c, d| (c, ring.mul(zeta, d)));
    let basis = fq.additive_basis();
    let add_translations = |uf: &mut UnionFind, i: usize| {
        if i >= deg {
            return;
        }
        for &beta in &basis {
            let b = ring.index(&Poly::monomial(beta, i));
            apply(uf, &|c, d| (c, ring.add(ring.mul(c, b), d)));
        }
    };
    let mut edge = Vec::new();
    add_translations(&mut uf, 0);
    let mut uf0 = UnionFind { parent: uf.parent.clone() };
    edge.push(orbits_from(&mut uf, ring));
    for j in 1..=stable {
        add_translations(&mut uf, j);
        edge.push(orbits_from(&mut uf, ring));
    }
    apply(&mut uf0, &|c, d| (d, c));
    let v0 = orbits_from(&mut uf0, ring);
    (edge, v0)
}

/// Result of moving an edge onto the standard half-line: `e = g·ε_j`
/// (or `g·ε̄_j` when `rev`), with `(c, d)` the bottom row of `g` mod n.
#[derive(Clone, Debug)]
pub struct HalfLine {
    pub j: usize,
    pub rev: bool,
    pub c: u32,
    pub d: u32,
    pub g: Option<PMat>,
}

/// Moves `e` to the standard half-line by alternating translations and the swap `(0 1; 1 0)`.
pub fn to_half_line(e: &Edge, ring: &ResRing, fq: &Fq, track: bool) -> Result<HalfLine> {
    let mut cur = e.clone();
    let (mut c, mut d) = (ring.index(&Poly::zero()), ring.index(&Poly::one()));
    let mut g = track.then(PMat::identity);
    let guard = 4 * (e.k.unsigned_abs() as usize + e.u.top().unsigned_abs() as usize + 8);
    for _ in 0..guard {
        let p = cur.u.polynomial_part();
        if !p.is_zero() {
            cur.u = cur.u.sub(&Laurent::from_poly(&p), fq);
            d = ring.add(ring.mul(c, ring.index(&p)), d);
            if let Some(g) = g.as_mut() {
                *g = g.mul(&PMat::translation(p), fq);
            }
        }
        if cur.k <= 0 {
            debug_assert!(cur.u.is_known_zero_prefix());
            return Ok(HalfLine { j: (-cur.k) as usize, rev: cur.flipped, c, d, g });
        }
        let m = cur.matrix();
        cur = normalize(&Mat2::new(m.c, m.d, m.a, m.b), fq)?;
        std::mem::swap(&mut c, &mut d);
        if let Some(g) = g.as_mut() {
            *g = g.mul(&PMat::swap(), fq);
        }
    }
    Err(Error::NonTermination(format!("edge {} did not reach the half-line", e.fmt(fq))))
}

/// The standard edge `ε_j`, reversed if asked.
pub fn standard_edge(j: usize, rev: bool) -> Edge {
    Edge { k: -(j as i64), u: Laurent::zero(), flipped: rev }
}

#[derive(Clone, Debug, Serialize)]
pub struct EdgeClass {
    pub id: usize,
    /// half-line level `j`
    pub level: usize,
    pub orbit: u32,
    /// first tree edge found in the breadth-first search, positively oriented
    #[serde(skip)]
    pub rep: Edge,
    /// whether `rep` lies over `ε̄_j` rather than `ε_j`
    pub rep_rev: bool,
    /// vertex ids in the orientation of `rep`
    pub origin: usize,
    pub terminus: usize,
    /// w(rep) and w(rep reversed)
    pub weight_fwd: u64,
    pub weight_bwd: u64,
    /// `#Stab_Γ(e)`
    pub gamma_order: u64,
    /// `n(e) = #Stab_Γ(e) / (q - 1)`
    pub stab: u64,
    /// `(ray index, position from the attachment vertex)` for half-line edges
    pub ray: Option<(usize, usize)>,
}

#[derive(Clone, Debug, Serialize)]
pub struct VertexClass {
    pub id: usize,
    pub level: usize,
    pub orbit: u32,
    pub gamma_order: u64,
    #[serde(skip)]
    pub rep: Option<Vertex>,
}

/// A cusp half-line: the stored edges from the attachment vertex outward,
/// continuing forever with `n(e)` growing by a factor q per step.
#[derive(Clone, Debug, Serialize)]
pub struct Ray {
    pub seed: usize,
    pub edges: Vec<usize>,
    pub attachment: usize,
    /// bottom row `(c, d)` mod n of a matrix carrying ε_J to the seed
    pub pair: (u32, u32),
}

/// Where an edge of the tree lands in the quotient.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Location {
    /// a stored class, with sign relative to its representative
    Stored { class: usize, sign: i8 },
    /// `extra` steps beyond the seed of a ray, sign relative to the seed representative
    Beyond { seed: usize, extra: u32, sign: i8 },
}

/// Outcome of [`QuotientGraph::reduce_edge`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Reduced {
    Finite { class: usize, sign: i8 },
    CuspZero,
}

#[derive(Clone, Debug)]
pub struct QuotientGraph {
    pub fq: Fq,
    pub level: Level,
    pub ring: ResRing,
    /// `J = max(deg n - 1, 1)`
    pub stable: usize,
    edge_orbits: Vec<Orbits>,
    vertex0_orbits: Orbits,
    pub classes: Vec<EdgeClass>,
    pub vertices: Vec<VertexClass>,
    pub rays: Vec<Ray>,
    class_index: HashMap<(usize, u32), usize>,
    vertex_index: HashMap<(usize, u32), usize>,
}

fn gl2_order(q: u64) -> u64 {
    (q * q - 1) * (q * q - q)
}

impl QuotientGraph {
    pub fn build(level: &Level, fq: &Fq) -> Result<QuotientGraph> {
        let ring = ResRing::new(level, fq);
        let stable = (level.deg() - 1).max(1);
        let (edge_orbits, vertex0_orbits) = compute_orbits(level, &ring, fq, stable);
        let q = fq.q() as u64;
        let mut g = QuotientGraph {
            fq: fq.clone(),
            level: level.clone(),
            ring,
            stable,
            edge_orbits,
            vertex0_orbits,
            classes: Vec::new(),
            vertices: Vec::new(),
            rays: Vec::new(),
            class_index: HashMap::new(),
            vertex_index: HashMap::new(),
        };
        // vertex classes for levels 0..=J+1
        for j in 0..=stable + 1 {
            let sizes = g.vertex_orbits(j).size.clone();
            let base = if j == 0 { gl2_order(q) } else { (q - 1) * (q - 1) * q.pow(j as u32 + 1) };
            for (o, &size) in sizes.iter().enumerate() {
                if base % size != 0 {
                    return Err(Error::NonIntegral(format!("vertex orbit size {size} at level {j}")));
                }
                let id = g.vertices.len();
                g.vertex_index.insert((j, o as u32), id);
                g.vertices.push(VertexClass { id, level: j, orbit: o as u32, gamma_order: base / size, rep: None });
            }
        }
        // edge classes for levels 0..=J, in the standard orientation for now
        for j in 0..=stable {
            let base = (q - 1) * (q - 1) * q.pow(j as u32 + 1);
            for o in 0..g.edge_orbits[j].count() {
                let size = g.edge_orbits[j].size[o];
                if base % size != 0 {
                    return Err(Error::NonIntegral(format!("edge orbit size {size} at level {j}")));
                }
                let gamma = base / size;
                let (c, d) = g.edge_orbits[j].rep[o];
                let origin = g.vertex_id(j, c, d);
                let terminus = g.vertex_id(j + 1, c, d);
                let (wt, wo) = (g.vertices[terminus].gamma_order, g.vertices[origin].gamma_order);
                if wt % gamma != 0 || wo % gamma != 0 {
                    return Err(Error::NonIntegral(format!("weight at level {j}")));
                }
                let id = g.classes.len();
                g.class_index.insert((j, o as u32), id);
                g.classes.push(EdgeClass {
                    id,
                    level: j,
                    orbit: o as u32,
                    rep: standard_edge(j, false),
                    rep_rev: false,
                    origin,
                    terminus,
                    weight_fwd: wt / gamma,
                    weight_bwd: wo / gamma,
                    gamma_order: gamma,
                    stab: gamma / (q - 1),
                    ray: None,
                });
            }
        }
        g.search_representatives()?;
        g.check_weight_sums()?;
        g.find_rays();
        Ok(g)
    }

    fn vertex_orbits(&self, j: usize) -> &Orbits {
        if j == 0 {
            &self.vertex0_orbits
        } else {
            &self.edge_orbits[j.min(self.stable)]
        }
    }
    fn pair_index(&self, c: u32, d: u32) -> usize {
        (c as usize) * self.ring.size() + d as usize
    }
    fn vertex_id(&self, j: usize, c: u32, d: u32) -> usize {
        let o = self.vertex_orbits(j).id[self.pair_index(c, d)];
        self.vertex_index[&(j, o)]
    }
    fn edge_orbit(&self, j: usize, c: u32, d: u32) -> u32 {
        self.edge_orbits[j.min(self.stable)].id[self.pair_index(c, d)]
    }

    /// Breadth-first search over the tree from `v(0, 0)`, expanding each vertex class once.
    fn search_representatives(&mut self) -> Result<()> {
        let fq = self.fq.clone();
        let mut found = vec![false; self.classes.len()];
        let mut expanded = vec![false; self.vertices.len()];
        let base = Vertex::base();
        let mut queue = VecDeque::new();
        let (zero, one) = (self.ring.index(&Poly::zero()), self.ring.index(&Poly::one()));
        let b = self.vertex_id(0, zero, one);
        expanded[b] = true;
        self.vertices[b].rep = Some(base.clone());
        queue.push_back(base);
        while let Some(v) = queue.pop_front() {
            for e in v.edges_into(&fq) {
                let h = to_half_line(&e, &self.ring, &fq, false)?;
                if h.j > self.stable {
                    continue;
                }
                let cid = self.class_index[&(h.j, self.edge_orbit(h.j, h.c, h.d))];
                // the far end of `e` is its origin
                let far = if h.rev { self.classes[cid].terminus } else { self.classes[cid].origin };
                if !found[cid] {
                    found[cid] = true;
                    let cls = &mut self.classes[cid];
                    cls.rep = e.unoriented();
                    cls.rep_rev = h.rev ^ e.flipped;
                }
                if !expanded[far] && self.vertices[far].level <= self.stable {
                    expanded[far] = true;
                    let o = e.origin();
                    self.vertices[far].rep = Some(o.clone());
                    queue.push_back(o);
                }
            }
        }
        if let Some(missing) = found.iter().position(|f| !f) {
            return Err(Error::NonTermination(format!("class {missing} not reached by the search")));
        }
        // switch every class to the orientation of its representative
        for c in &mut self.classes {
            if c.rep_rev {
                std::mem::swap(&mut c.origin, &mut c.terminus);
                std::mem::swap(&mut c.weight_fwd, &mut c.weight_bwd);
            }
        }
        Ok(())
    }

    /// `(class id, weight into v)` for all classes incident to vertex `v`.
    pub fn incident(&self, v: usize) -> Vec<(usize, u64)> {
        let mut out = Vec::new();
        for c in &self.classes {
            if c.terminus == v {
                out.push((c.id, c.weight_fwd));
            }
            if c.origin == v {
                out.push((c.id, c.weight_bwd));
            }
        }
        out
    }

    fn check_weight_sums(&self) -> Result<()> {
        let q = self.fq.q() as u64;
        for v in self.vertices.iter().filter(|v| v.level <= self.stable) {
            let s: u64 = self.incident(v.id).iter().map(|x| x.1).sum();
            if s != q + 1 {
                return Err(Error::Dimension(format!("weights into vertex {} sum to {s}", v.id)));
            }
        }
        Ok(())
    }

    fn find_rays(&mut self) {
        let q = self.fq.q() as u64;
        let seeds: Vec<usize> = self.classes.iter().filter(|c| c.level == self.stable).map(|c| c.id).collect();
        for seed in seeds {
            let s = &self.classes[seed];
            // the end at level J
            let mut inner = if self.vertices[s.origin].level == self.stable { s.origin } else { s.terminus };
            let mut path = vec![seed];
            let mut cur = seed;
            loop {
                let inc = self.incident(inner);
                if inc.len() != 2 {
                    break;
                }
                let (other, w_other) = if inc[0].0 == cur { inc[1] } else { inc[0] };
                let w_cur = if inc[0].0 == cur { inc[0].1 } else { inc[1].1 };
                if other == cur || self.classes[other].ray.is_some() || path.contains(&other) {
                    break;
                }
                if !(w_cur == 1 && w_other == q && self.classes[cur].stab == q * self.classes[other].stab) {
                    break;
                }
                path.push(other);
                let oc = &self.classes[other];
                inner = if oc.origin == inner { oc.terminus } else { oc.origin };
                cur = other;
            }
            path.reverse();
            let r = self.rays.len();
            for (pos, &c) in path.iter().enumerate() {
                self.classes[c].ray = Some((r, pos));
            }
            let o = self.classes[seed].orbit as usize;
            let pair = self.edge_orbits[self.stable].rep[o];
            self.rays.push(Ray { seed, edges: path, attachment: inner, pair });
        }
    }

    pub fn q(&self) -> u32 {
        self.fq.q()
    }
    /// Classes not on any half-line, in id order.
    pub fn finite_classes(&self) -> Vec<usize> {
        self.classes.iter().filter(|c| c.ray.is_none()).map(|c| c.id).collect()
    }
    /// Vertices of level at most J touching a finite class.
    pub fn finite_vertices(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.finite_classes().iter().flat_map(|&c| [self.classes[c].origin, self.classes[c].terminus]).collect();
        v.sort();
        v.dedup();
        v
    }
    pub fn num_cusps(&self) -> usize {
        self.rays.len()
    }

    /// Locates an arbitrary tree edge.
    pub fn locate(&self, e: &Edge) -> Result<Location> {
        let h = to_half_line(e, &self.ring, &self.fq, false)?;
        let o = self.edge_orbit(h.j, h.c, h.d);
        let key = (h.j.min(self.stable), o);
        let cid = self.class_index[&key];
        let sign = if h.rev == self.classes[cid].rep_rev { 1 } else { -1 };
        if h.j <= self.stable {
            Ok(Location::Stored { class: cid, sign })
        } else {
            Ok(Location::Beyond { seed: cid, extra: (h.j - self.stable) as u32, sign })
        }
    }

    /// Finite class and sign of `e`, or `CuspZero` on a half-line.
    pub fn reduce_edge(&self, e: &Edge) -> Result<Reduced> {
        Ok(match self.locate(e)? {
            Location::Stored { class, sign } if self.classes[class].ray.is_none() => Reduced::Finite { class, sign },
            _ => Reduced::CuspZero,
        })
    }

    /// Enumerates `σ = (a b; 0 d)` in `Stab(ε_j)` with `b` reduced mod n.
    fn stab_elements(&self, j: usize, a_one: bool) -> Vec<PMat> {
        let fq = &self.fq;
        let bdeg = (j + 1).min(self.level.deg());
        let avals: Vec<Fe> = if a_one { vec![1] } else { fq.units().collect() };
        let mut out = Vec::new();
        for &a in &avals {
            for d in fq.units() {
                for b in Poly::all_below(bdeg, fq.q()) {
                    out.push(PMat::new(Poly::constant(a), b, Poly::zero(), Poly::constant(d)));
                }
            }
        }
        out
    }

    /// Some γ ∈ Γ₀(n) with `γ·g = h`, or `None`.
    pub fn find_gamma(&self, g: &Edge, h: &Edge) -> Result<Option<PMat>> {
        let fq = &self.fq;
        if (g.origin().k - h.origin().k).rem_euclid(2) != 0 {
            return Ok(None);
        }
        let hg = to_half_line(g, &self.ring, fq, true)?;
        let hh = to_half_line(h, &self.ring, fq, true)?;
        if hg.j != hh.j || hg.rev != hh.rev || self.edge_orbit(hg.j, hg.c, hg.d) != self.edge_orbit(hh.j, hh.c, hh.d) {
            return Ok(None);
        }
        let xg = hg.g.unwrap().inverse(fq).expect("unit determinant");
        let gh = hh.g.unwrap();
        for s in self.stab_elements(hg.j, true) {
            let gamma = gh.mul(&s, fq).mul(&xg, fq);
            if gamma.in_gamma0(&self.level.n, fq) {
                return Ok(Some(gamma));
            }
        }
        Err(Error::BoundExceeded(format!("no stabilizer element found for {} -> {}", g.fmt(fq), h.fmt(fq))))
    }

    /// `n(e) = #Stab_Γ(e)/(q-1)`, by enumerating the stabilizer of the standard edge.
    pub fn stabilizer_order(&self, e: &Edge) -> Result<u64> {
        let fq = &self.fq;
        let h = to_half_line(e, &self.ring, fq, true)?;
        let g = h.g.unwrap();
        let gi = g.inverse(fq).expect("unit determinant");
        let count = self
            .stab_elements(h.j, false)
            .iter()
            .filter(|s| g.mul(s, fq).mul(&gi, fq).in_gamma0(&self.level.n, fq))
            .count() as u64;
        let extra = (h.j + 1).saturating_sub(self.level.deg()) as u32;
        Ok(count * (fq.q() as u64).pow(extra) / (fq.q() as u64 - 1))
    }

    /// JSON description of the class table.
    pub fn to_json(&self) -> serde_json::Value {
        let fq = &self.fq;
        let classes: Vec<serde_json::Value> = self
            .classes
            .iter()
            .map(|c| {
                let mut v = serde_json::to_value(c).expect("serializable");
                v["rep"] = c.rep.to_json(fq);
                v
            })
            .collect();
        let vertices: Vec<serde_json::Value> = self
            .vertices
            .iter()
            .map(|v| {
                let mut x = serde_json::to_value(v).expect("serializable");
                x["rep"] = v.rep.as_ref().map_or(serde_json::Value::Null, |r| r.fmt(fq).into());
                x
            })
            .collect();
        serde_json::json!({
            "stable_level": self.stable,
            "finite_classes": self.finite_classes(),
            "classes": classes,
            "vertices": vertices,
            "rays": self.rays,
        })
    }

    /// Graphviz rendering: the finite part as an undirected multigraph with
    /// labels `w_fwd/w_bwd, n(e)`, each cusp as a dashed chain of three edges.
    pub fn to_dot(&self) -> String {
        let fq = &self.fq;
        let mut s = String::new();
        let _ = writeln!(s, "graph quotient {{");
        let _ = writeln!(s, "  label=\"Gamma0({}) \\\\ T, q={}\";", self.level.n.fmt(fq), fq.q());
        let _ = writeln!(s, "  node [shape=point];");
        for v in self.finite_vertices() {
            let rep = self.vertices[v].rep.as_ref().map(|r| r.fmt(fq)).unwrap_or_default();
            let _ = writeln!(s, "  v{v} [xlabel=\"{rep}\"];");
        }
        for c in self.finite_classes() {
            let e = &self.classes[c];
            let _ = writeln!(
                s,
                "  v{} -- v{} [label=\"{}/{}, {}\", tooltip=\"{}\"];",
                e.origin,
                e.terminus,
                e.weight_fwd,
                e.weight_bwd,
                e.stab,
                e.rep.fmt(fq)
            );
        }
        for (r, ray) in self.rays.iter().enumerate() {
            let mut prev = format!("v{}", ray.attachment);
            for step in 0..3 {
                let node = format!("c{r}_{step}");
                let _ = writeln!(s, "  {node};");
                let label = match ray.edges.get(step) {
                    Some(&c) => self.classes[c].rep.fmt(fq),
                    None => String::new(),
                };
                let _ = writeln!(s, "  {prev} -- {node} [style=dashed, label=\"{label}\"];");
                prev = node;
            }
        }
        s.push_str("}\n");
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_poly;
    use crate::tree::act;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn graph(q: u32, n: &str) -> QuotientGraph {
        let fq = Fq::new(q).unwrap();
        let level = Level::new(&parse_poly(n, &fq).unwrap(), &fq).unwrap();
        QuotientGraph::build(&level, &fq).unwrap()
    }

    #[test]
    fn half_line_round_trip() {
        let g = graph(3, "T^3+2*T+1");
        let fq = &g.fq;
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        use rand::Rng;
        for _ in 0..100 {
            let k = rng.gen_range(-2..6);
            let terms: Vec<(i64, Fe)> = (-2..k).map(|e| (e, rng.gen_range(0..3) as Fe)).collect();
            let mut e = Edge::from_terms(k, &terms, fq);
            e.flipped = rng.gen_bool(0.5);
            let h = to_half_line(&e, &g.ring, fq, true).unwrap();
            let back = act(&h.g.as_ref().unwrap().to_mat2(), &standard_edge(h.j, h.rev), fq).unwrap();
            assert_eq!(back, e);
            let gm = h.g.unwrap();
            assert_eq!((g.ring.index(&gm.c), g.ring.index(&gm.d)), (h.c, h.d));
        }
    }

    #[test]
    fn small_levels_have_expected_ray_counts() {
        assert_eq!(graph(2, "T^3+T+1").num_cusps(), 2);
        assert_eq!(graph(2, "T^3").num_cusps(), 4);
        assert_eq!(graph(3, "T*(T-1)*(T-2)").num_cusps(), 8);
        assert_eq!(graph(3, "T").num_cusps(), 2);
    }

    #[test]
    fn reduction_is_gamma_invariant() {
        let g = graph(2, "T^3");
        let fq = &g.fq;
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for c in &g.classes {
            assert_eq!(g.locate(&c.rep).unwrap(), Location::Stored { class: c.id, sign: 1 });
            for _ in 0..20 {
                let gamma = PMat::random_gamma0(&g.level.n, fq, &mut rng, 5, 2);
                let e2 = act(&gamma.to_mat2(), &c.rep, fq).unwrap();
                assert_eq!(g.locate(&e2).unwrap(), Location::Stored { class: c.id, sign: 1 });
                let found = g.find_gamma(&c.rep, &e2).unwrap().unwrap();
                assert_eq!(act(&found.to_mat2(), &c.rep, fq).unwrap(), e2);
            }
            assert_eq!(g.stabilizer_order(&c.rep).unwrap(), c.stab);
        }
    }
}
