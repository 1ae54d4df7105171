//! Hecke operators T_p, U_p and Atkin-Lehner involutions W_m as integer
//! matrices on a harmonic cochain basis.
//!
//! Usage: cargo run --example hecke_operators -- [q] [level]

use ffhecke::hecke::{atkin_lehner_matrix, hecke_matrix};
use ffhecke::parse::parse_poly;
use ffhecke::poly::{monic_divisors, monic_irreducibles};
use ffhecke::verify::build_space;
use ffhecke::{Fq, Poly};

fn main() -> ffhecke::Result<()> {
    let args: Vec<String> = std::env::args().collect();
    let q: u32 = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(3);
    let level = args.get(2).map(String::as_str).unwrap_or("T*(T-1)*(T-2)");
    let fq = Fq::new(q)?;
    let n = parse_poly(level, &fq)?;
    let space = build_space(&n, &fq)?;
    println!("level {} over F_{q}, rank {}", n.fmt(&fq), space.genus());
    for d in 1..=2 {
        for p in monic_irreducibles(d, &fq) {
            let name = if p.divides(&n, &fq) { "U" } else { "T" };
            println!("{name}_({}) = {:?}", p.fmt(&fq), hecke_matrix(&space, &p)?.to_i64_rows());
        }
    }
    for m in monic_divisors(&n, &fq) {
        let r = n.div_exact(&m, &fq).expect("divisor");
        if m.deg() >= 1 && Poly::gcd(&m, &r, &fq).is_one() {
            println!("W_({}) = {:?}", m.fmt(&fq), atkin_lehner_matrix(&space, &m)?.to_i64_rows());
        }
    }
    Ok(())
}
