//! Integral harmonic cochains on Γ₀(n)\T: a basis, the Gram matrix of the
//! monodromy pairing, Fourier coefficients and the expansion round trip.
//!
//! Usage: cargo run --example harmonic_cochains -- [q] [level]

use ffhecke::cochain::{expand, gram_matrix};
use ffhecke::parse::parse_poly;
use ffhecke::tree::Edge;
use ffhecke::verify::build_space;
use ffhecke::{Fq, Poly};

fn main() -> ffhecke::Result<()> {
    let args: Vec<String> = std::env::args().collect();
    let q: u32 = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(2);
    let level = args.get(2).map(String::as_str).unwrap_or("T^3+T+1");
    let fq = Fq::new(q)?;
    let space = build_space(&parse_poly(level, &fq)?, &fq)?;
    println!("H_0({level}) over F_{q} has rank {}", space.genus());
    for i in 0..space.genus() {
        let f = space.basis_cochain(i);
        let support: Vec<String> = space
            .unknowns
            .iter()
            .zip(&f)
            .filter(|(_, v)| v.sign() != num_bigint::Sign::NoSign)
            .map(|(c, v)| format!("{}:{v}", space.graph.classes[*c].rep.fmt(&fq)))
            .collect();
        println!("  f_{i} = {}", support.join("  "));
    }
    println!("Gram matrix: {:?}", gram_matrix(&space)?.to_i64_rows());

    let f = space.basis_cochain(0);
    let table = space.fourier_table(&f, 3)?;
    for d in 0..=1 {
        for m in Poly::monics(d, q) {
            println!("  f_0*({}) = {}", m.fmt(&fq), table[m.coeffs()]);
        }
    }
    let e = Edge::from_terms(4, &[(1, 1), (3, 1)], &fq);
    println!("f_0{} = {} directly, {} from the expansion", e.fmt(&fq), space.evaluate(&f, &e)?, expand(&table, e.k, &e.u, &fq)?);
    Ok(())
}
