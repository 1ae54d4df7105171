//! Hecke algebra, Eisenstein quotient 𝕋/𝔈, component group Φ_∞ and its
//! Eisenstein kernel for one level.
//!
//! Usage: cargo run --release --example eisenstein_quotient -- [q] [level]

use ffhecke::cochain::{gram_matrix, HarmonicSpace};
use ffhecke::lattice::{component_group, component_group_eisenstein_kernel, eisenstein_ideal, hecke_algebra, HeckeCache, Variant};
use ffhecke::parse::parse_poly;
use ffhecke::quotient::{Level, QuotientGraph};
use ffhecke::Fq;
use std::time::Instant;

fn main() -> ffhecke::Result<()> {
    let args: Vec<String> = std::env::args().collect();
    let q: u32 = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(3);
    let level_str = args.get(2).map(String::as_str).unwrap_or("T^3+2*T+1");
    let start = Instant::now();
    let fq = Fq::new(q)?;
    let level = Level::new(&parse_poly(level_str, &fq)?, &fq)?;
    let space = HarmonicSpace::new(QuotientGraph::build(&level, &fq)?)?;
    println!("level {} over F_{q}: genus {}", level.n.fmt(&fq), space.genus());

    let cache = HeckeCache::new(&space);
    let t = hecke_algebra(&cache, 2, Variant::Full)?;
    let t0 = hecke_algebra(&cache, 2, Variant::Coprime)?;
    println!("rank T = {} (degree {}), rank T0 = {}", t.lattice.rank(), t.degree, t0.lattice.rank());
    match t.lattice.index_of(&t0.lattice)? {
        Some(i) => println!("[T : T0] = {i}"),
        None => println!("[T : T0] infinite (ranks differ)"),
    }
    let e = eisenstein_ideal(&cache, &t, 2)?;
    println!("T/E   = {}", e.quotient.fmt());
    let gram = gram_matrix(&space)?;
    println!("Phi   = {}", component_group(&gram).fmt());
    let (k, _) = component_group_eisenstein_kernel(&gram, &cache, 2)?;
    println!("Phi[E] = {}", k.fmt());
    println!("elapsed {:.2?}", start.elapsed());
    Ok(())
}
