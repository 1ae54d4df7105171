//! Cusps of X₀(n): representatives, the counting formulas, rationality and
//! the action of W_n.
//!
//! Usage: cargo run --example cusps -- [q] [level]

use ffhecke::cusp::{al_on_cusp, cusp_count_formula, enumerate_cusps, rational_cusp_count_formula};
use ffhecke::parse::parse_poly;
use ffhecke::quotient::{Level, QuotientGraph};
use ffhecke::Fq;

fn main() -> ffhecke::Result<()> {
    let args: Vec<String> = std::env::args().collect();
    let q: u32 = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(2);
    let level_str = args.get(2).map(String::as_str).unwrap_or("(T^2+T+1)^2");
    let fq = Fq::new(q)?;
    let level = Level::new(&parse_poly(level_str, &fq)?, &fq)?;
    let cusps = enumerate_cusps(&level, &fq);
    println!("{} cusps (formula {}), rays of the quotient graph: {}", cusps.len(), cusp_count_formula(&level, &fq), QuotientGraph::build(&level, &fq)?.num_cusps());
    let rational = cusps.iter().filter(|c| c.is_rational(&fq)).count();
    println!("{rational} rational (formula {})", rational_cusp_count_formula(&level, &fq));
    for c in &cusps {
        let w = al_on_cusp(&level.n, c, &level, &fq)?;
        println!("  {:<24} rational: {:<5}  W_n -> {}", c.fmt(&fq), c.is_rational(&fq), w.fmt(&fq));
    }
    Ok(())
}
