//! Randomized invariants across modules.

use ffhecke::cochain::{expand, HarmonicSpace};
use ffhecke::cusp::{al_on_cusp, enumerate_cusps};
use ffhecke::eisenstein::Eisenstein;
use ffhecke::field::Fe;
use ffhecke::hecke::hecke_matrix;
use ffhecke::lattice::FinAbGroup;
use ffhecke::pmat::PMat;
use ffhecke::poly::monic_divisors;
use ffhecke::quotient::{Level, QuotientGraph};
use ffhecke::tree::{act, Edge};
use ffhecke::verify::build_space;
use ffhecke::{Fq, IntMatrix, Poly};
use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::sync::OnceLock;

const LEVELS: [(u32, &str); 5] = [(2, "T^3+T+1"), (2, "T^2*(T+1)"), (3, "T^3"), (3, "T*(T-1)*(T-2)"), (2, "(T^2+T+1)^2")];

fn spaces() -> &'static Vec<HarmonicSpace> {
    static S: OnceLock<Vec<HarmonicSpace>> = OnceLock::new();
    S.get_or_init(|| {
        LEVELS
            .iter()
            .map(|&(q, n)| {
                let fq = Fq::new(q).unwrap();
                build_space(&ffhecke::parse::parse_poly(n, &fq).unwrap(), &fq).unwrap()
            })
            .collect()
    })
}

fn edge(k: i64, coeffs: &[u8], flip: bool, fq: &Fq) -> Edge {
    let terms: Vec<(i64, Fe)> = coeffs.iter().enumerate().map(|(i, &c)| (i as i64 - 2, (c as u32 % fq.q()) as Fe)).filter(|&(e, _)| e < k).collect();
    let e = Edge::from_terms(k, &terms, fq);
    if flip {
        e.reverse()
    } else {
        e
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn reduction_is_invariant_under_gamma0(which in 0usize..5, seed in any::<u64>(), k in -2i64..7,
                                           coeffs in proptest::collection::vec(any::<u8>(), 9), flip in any::<bool>()) {
        let s = &spaces()[which];
        let fq = s.fq();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = PMat::random_gamma0(&s.graph.level.n, fq, &mut rng, 5, 2);
        let e = edge(k, &coeffs, flip, fq);
        prop_assert_eq!(s.graph.locate(&act(&g.to_mat2(), &e, fq).unwrap()).unwrap(), s.graph.locate(&e).unwrap());
    }

    #[test]
    fn fourier_expansion_recovers_values(which in 0usize..5, coords in proptest::collection::vec(-4i64..5, 3),
                                         k in 1i64..6, coeffs in proptest::collection::vec(any::<u8>(), 8)) {
        let s = &spaces()[which];
        let fq = s.fq();
        let c: Vec<BigInt> = (0..s.genus()).map(|i| BigInt::from(coords[i % coords.len()])).collect();
        let f = s.cochain(&c);
        let tab = s.fourier_table(&f, 3).unwrap();
        let e = edge(k, &coeffs, false, fq);
        prop_assert_eq!(expand(&tab, e.k, &e.u, fq).unwrap(), BigRational::from_integer(s.evaluate(&f, &e).unwrap()));
    }

    #[test]
    fn eisenstein_values_agree_with_character_sums(q in prop_oneof![Just(2u32), Just(3), Just(4)], n_idx in 0u64..27,
                                                   k in 0i64..6, coeffs in proptest::collection::vec(any::<u8>(), 8), flip in any::<bool>()) {
        let fq = Fq::new(q).unwrap();
        let monics: Vec<Poly> = (1..=3).flat_map(|d| Poly::monics(d, q)).collect();
        let n = &monics[n_idx as usize % monics.len()];
        let eis = Eisenstein::new(n, &fq).unwrap();
        let e = edge(k, &coeffs, flip, &fq);
        prop_assert_eq!(eis.value(&e).unwrap(), eis.value_by_character_sum(&e).unwrap());
    }

    #[test]
    fn atkin_lehner_is_an_involution_on_cusps(q in prop_oneof![Just(2u32), Just(3)], idx in 0u64..400, pick in any::<usize>()) {
        let fq = Fq::new(q).unwrap();
        let monics: Vec<Poly> = (2..=4).flat_map(|d| Poly::monics(d, q)).collect();
        let n = &monics[idx as usize % monics.len()];
        let level = Level::new(n, &fq).unwrap();
        let exact: Vec<Poly> = monic_divisors(n, &fq)
            .into_iter()
            .filter(|m| Poly::gcd(m, &n.div_exact(m, &fq).unwrap(), &fq).is_one())
            .collect();
        let m = &exact[pick % exact.len()];
        for c in enumerate_cusps(&level, &fq) {
            let w = al_on_cusp(m, &c, &level, &fq).unwrap();
            prop_assert_eq!(al_on_cusp(m, &w, &level, &fq).unwrap(), c);
        }
    }

    #[test]
    fn cokernel_is_unimodular_invariant(v in proptest::collection::vec(-12i64..13, 9), ops in proptest::collection::vec((0usize..3, 0usize..3, -3i64..4), 1..8)) {
        let a = IntMatrix::from_i64(&[v[0..3].to_vec(), v[3..6].to_vec(), v[6..9].to_vec()]);
        let mut u = IntMatrix::identity(3);
        let mut w = IntMatrix::identity(3);
        for &(i, j, c) in &ops {
            if i != j {
                // elementary row and column operations
                let mut e = IntMatrix::identity(3);
                e.set(i, j, BigInt::from(c));
                u = e.mul(&u);
                w = w.mul(&e.transpose());
            }
        }
        prop_assert_eq!(FinAbGroup::cokernel(&u.mul(&a).mul(&w)), FinAbGroup::cokernel(&a));
    }

    #[test]
    fn polynomial_gcd_is_a_combination(q in prop_oneof![Just(2u32), Just(3), Just(5), Just(9)], a in 0u64..5000, b in 1u64..5000) {
        let fq = Fq::new(q).unwrap();
        let (a, b) = (Poly::from_index(a, q), Poly::from_index(b, q));
        let (g, s, t) = Poly::xgcd(&a, &b, &fq);
        prop_assert_eq!(a.mul(&s, &fq).add(&b.mul(&t, &fq), &fq), g.clone());
        prop_assert!(g.divides(&a, &fq) && g.divides(&b, &fq));
    }
}

#[test]
fn hecke_operators_commute_on_every_sample_level() {
    for s in spaces() {
        let fq = s.fq();
        let ops: Vec<IntMatrix> = fq.elements().map(|u| hecke_matrix(s, &Poly::linear(fq, u)).unwrap()).collect();
        for a in &ops {
            for b in &ops {
                assert_eq!(a.mul(b), b.mul(a));
            }
        }
    }
}

#[test]
fn quotient_graph_is_deterministic() {
    let fq = Fq::new(3).unwrap();
    let level = Level::new(&ffhecke::parse::parse_poly("T^2*(T-1)", &fq).unwrap(), &fq).unwrap();
    let a = QuotientGraph::build(&level, &fq).unwrap().to_json();
    let b = QuotientGraph::build(&level, &fq).unwrap().to_json();
    assert_eq!(a, b);
}
