//! Builds Γ₀(n)\T and prints its edge classes, weights, stabilizers and cusps.
//!
//! Usage: cargo run --example quotient_graph -- [q] [level]

use ffhecke::parse::parse_poly;
use ffhecke::quotient::{Level, QuotientGraph};
use ffhecke::Fq;

fn main() -> ffhecke::Result<()> {
    let args: Vec<String> = std::env::args().collect();
    let q: u32 = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(2);
    let level_str = args.get(2).map(String::as_str).unwrap_or("T^3");
    let fq = Fq::new(q)?;
    let level = Level::new(&parse_poly(level_str, &fq)?, &fq)?;
    let g = QuotientGraph::build(&level, &fq)?;

    println!("Gamma0({}) \\ T over F_{q}", level.n.fmt(&fq));
    println!("{:>4} {:>3} {:>26} {:>6} {:>6} {:>4}  ends", "id", "j", "representative", "w", "w_bar", "n(e)");
    for c in &g.classes {
        let tag = match c.ray {
            Some((r, pos)) => format!("  ray {r}, step {pos}"),
            None => String::new(),
        };
        println!(
            "{:>4} {:>3} {:>26} {:>6} {:>6} {:>4}  {} -> {}{}",
            c.id,
            c.level,
            c.rep.fmt(&fq),
            c.weight_fwd,
            c.weight_bwd,
            c.stab,
            c.origin,
            c.terminus,
            tag
        );
    }
    println!("finite classes: {}", g.finite_classes().len());
    println!("cusps: {}", g.num_cusps());
    for (i, r) in g.rays.iter().enumerate() {
        println!("  ray {i}: attached at vertex {}, {} stored edge(s)", r.attachment, r.edges.len());
    }
    Ok(())
}
