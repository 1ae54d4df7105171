//! 2×2 matrices over A = F_q[T].

use crate::field::{Fe, Fq};
use crate::poly::Poly;
use crate::tree::Mat2;
use rand::Rng;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PMat {
    pub a: Poly,
    pub b: Poly,
    pub c: Poly,
    pub d: Poly,
}

impl PMat {
    pub fn new(a: Poly, b: Poly, c: Poly, d: Poly) -> PMat {
        PMat { a, b, c, d }
    }
    pub fn identity() -> PMat {
        PMat::new(Poly::one(), Poly::zero(), Poly::zero(), Poly::one())
    }
    /// `(0 1; 1 0)`.
    pub fn swap() -> PMat {
        PMat::new(Poly::zero(), Poly::one(), Poly::one(), Poly::zero())
    }
    /// `(1 b; 0 1)`.
    pub fn translation(b: Poly) -> PMat {
        PMat::new(Poly::one(), b, Poly::zero(), Poly::one())
    }
    pub fn diag(a: Poly, d: Poly) -> PMat {
        PMat::new(a, Poly::zero(), Poly::zero(), d)
    }
    pub fn mul(&self, o: &PMat, fq: &Fq) -> PMat {
        let e = |x: &Poly, y: &Poly, z: &Poly, t: &Poly| x.mul(y, fq).add(&z.mul(t, fq), fq);
        PMat::new(
            e(&self.a, &o.a, &self.b, &o.c),
            e(&self.a, &o.b, &self.b, &o.d),
            e(&self.c, &o.a, &self.d, &o.c),
            e(&self.c, &o.b, &self.d, &o.d),
        )
    }
    pub fn det(&self, fq: &Fq) -> Poly {
        self.a.mul(&self.d, fq).sub(&self.b.mul(&self.c, fq), fq)
    }
    /// `(d -b; -c a)`.
    pub fn adjugate(&self, fq: &Fq) -> PMat {
        PMat::new(self.d.clone(), self.b.neg(fq), self.c.neg(fq), self.a.clone())
    }
    /// Inverse of an element of GL₂(A) (unit determinant).
    pub fn inverse(&self, fq: &Fq) -> Option<PMat> {
        let det = self.det(fq);
        if det.deg() != 0 {
            return None;
        }
        let s = fq.inv(det.coeff(0));
        let adj = self.adjugate(fq);
        Some(PMat::new(adj.a.scale(s, fq), adj.b.scale(s, fq), adj.c.scale(s, fq), adj.d.scale(s, fq)))
    }
    pub fn to_mat2(&self) -> Mat2 {
        Mat2::from_polys(&self.a, &self.b, &self.c, &self.d)
    }
    /// True if the lower-left entry is divisible by `n` and the determinant is a unit.
    pub fn in_gamma0(&self, n: &Poly, fq: &Fq) -> bool {
        self.det(fq).deg() == 0 && n.divides(&self.c, fq)
    }
    pub fn fmt(&self, fq: &Fq) -> String {
        format!("({}, {}; {}, {})", self.a.fmt(fq), self.b.fmt(fq), self.c.fmt(fq), self.d.fmt(fq))
    }
    /// A random element of Γ₀(n) built from elementary generators.
    pub fn random_gamma0<R: Rng>(n: &Poly, fq: &Fq, rng: &mut R, steps: usize, max_deg: usize) -> PMat {
        let mut g = PMat::identity();
        let rand_poly = |rng: &mut R| Poly::from_coeffs((0..=max_deg).map(|_| rng.gen_range(0..fq.q()) as Fe).collect());
        for _ in 0..steps {
            let el = match rng.gen_range(0..3) {
                0 => PMat::translation(rand_poly(rng)),
                1 => PMat::new(Poly::one(), Poly::zero(), n.mul(&rand_poly(rng), fq), Poly::one()),
                _ => {
                    let a = rng.gen_range(1..fq.q()) as Fe;
                    let d = rng.gen_range(1..fq.q()) as Fe;
                    PMat::diag(Poly::constant(a), Poly::constant(d))
                }
            };
            g = g.mul(&el, fq);
        }
        g
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn random_gamma0_elements_are_in_gamma0() {
        let fq = Fq::new(3).unwrap();
        let n = Poly::from_coeffs(vec![0, 0, 1, 1]);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..20 {
            let g = PMat::random_gamma0(&n, &fq, &mut rng, 6, 2);
            assert!(g.in_gamma0(&n, &fq));
            let gi = g.inverse(&fq).unwrap();
            assert_eq!(g.mul(&gi, &fq), PMat::identity());
        }
    }
}
