//! Finite fields, polynomials over F_q, Laurent series in π = 1/T and
//! integer normal forms.
//!
//! Usage: cargo run --example exact_arithmetic -- [q]

use ffhecke::parse::parse_poly;
use ffhecke::poly::{factor, monic_irreducibles};
use ffhecke::{Fq, IntMatrix, Laurent, Poly};

fn main() -> ffhecke::Result<()> {
    let q: u32 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(4);
    let fq = Fq::new(q)?;
    let info = fq.info();
    println!("F_{q}: characteristic {}, degree {}, modulus {:?}", info.p, info.e, info.modulus);
    let g = fq.generator();
    println!("generator {} has inverse {}", fq.fmt_elem(g), fq.fmt_elem(fq.inv(g)));

    let f = parse_poly("T^6 + T^3 + T + 1", &fq)?;
    let (unit, fac) = factor(&f, &fq);
    let parts: Vec<String> = fac.iter().map(|(p, e)| format!("({})^{e}", p.fmt(&fq))).collect();
    println!("{} = {} * {}", f.fmt(&fq), fq.fmt_elem(unit), parts.join(" "));
    println!("monic irreducibles of degree 2: {}", monic_irreducibles(2, &fq).len());

    let a = parse_poly("T^3 + 1", &fq)?;
    let b = parse_poly("T^2 + T", &fq)?;
    let (d, s, t) = Poly::xgcd(&a, &b, &fq);
    println!("gcd({}, {}) = {} = ({})a + ({})b", a.fmt(&fq), b.fmt(&fq), d.fmt(&fq), s.fmt(&fq), t.fmt(&fq));

    // 1/(T - 1) = π/(1 - π) as a series in π, to precision π^6
    let x = Laurent::from_poly(&Poly::linear(&fq, 1));
    println!("1/(T-1) = {}", x.inv(6, &fq)?.fmt(&fq));

    let m = IntMatrix::from_i64(&[vec![2, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]]);
    println!("Smith form of {:?}: {:?}", m.to_i64_rows(), m.snf().d.iter().map(|x| x.to_string()).collect::<Vec<_>>());
    println!("Hermite form: {:?}", m.hnf().to_i64_rows());
    Ok(())
}
