//! Eisenstein series E_m: values on the quotient graph, the Hecke
//! eigenvalue law, and the table of series attached to n = T(T-1)(T-c).
//!
//! Usage: cargo run --example eisenstein_series -- [q]

use ffhecke::eisenstein::{check_eigenvalue, is_harmonic_on, xyz_table, Eisenstein, XYZ_COLUMNS, XYZ_ROWS};
use ffhecke::poly::monic_irreducibles;
use ffhecke::quotient::{Level, QuotientGraph};
use ffhecke::verify::third_root;
use ffhecke::{Fq, Poly};

fn main() -> ffhecke::Result<()> {
    let q: u32 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(3);
    let fq = Fq::new(q)?;
    let n = Poly::t().pow(2, &fq).mul(&Poly::linear(&fq, 1), &fq);
    let graph = QuotientGraph::build(&Level::new(&n, &fq)?, &fq)?;
    let e = Eisenstein::new(&n, &fq)?;
    let values = e.class_values(&graph)?;
    println!("E_({}) on {} classes, harmonic: {}", n.fmt(&fq), values.len(), is_harmonic_on(&graph, &values));
    for c in graph.classes.iter().take(8) {
        println!("  {:>20}  {}", c.rep.fmt(&fq), values[c.id]);
    }
    for p in monic_irreducibles(1, &fq).into_iter().chain(monic_irreducibles(2, &fq)) {
        if !p.divides(&n, &fq) {
            println!("T_({}) eigenvalue {}: {}", p.fmt(&fq), p.norm(&fq) + 1, check_eigenvalue(&graph, &e, &p)?);
        }
    }

    let Some(c) = third_root(&fq) else {
        return Ok(());
    };
    println!();
    println!("series for n = T(T-1)(T-{})", fq.fmt_elem(c));
    let table = xyz_table(&fq, c)?;
    print!("{:>7}", "");
    for col in XYZ_COLUMNS {
        print!("{col:>7}");
    }
    println!();
    for (name, row) in XYZ_ROWS.iter().zip(&table) {
        print!("{name:>7}");
        for v in row {
            print!("{:>7}", v.as_ref().map_or("-".to_string(), |x| x.to_string()));
        }
        println!();
    }
    Ok(())
}
