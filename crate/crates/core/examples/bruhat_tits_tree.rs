//! Vertices and edges of the Bruhat-Tits tree of PGL₂(F_∞) and the action
//! of matrices over F_q[T] on them.
//!
//! Usage: cargo run --example bruhat_tits_tree -- [q]

use ffhecke::pmat::PMat;
use ffhecke::tree::{act, act_vertex, Edge, Vertex};
use ffhecke::{Fq, Laurent, Poly};

fn main() -> ffhecke::Result<()> {
    let q: u32 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(3);
    let fq = Fq::new(q)?;
    let v0 = Vertex::base();
    println!("neighbours of {}:", v0.fmt(&fq));
    for w in v0.neighbors(&fq) {
        println!("  {}", w.fmt(&fq));
    }
    let v = Vertex::new(3, &Laurent::from_terms(1, vec![1, 0]))?;
    println!("{} has parent {} and {} children", v.fmt(&fq), v.parent().fmt(&fq), v.children(&fq).len());

    let e = Edge::from_terms(2, &[(1, 1)], &fq);
    println!("edge {} runs from {} to {}", e.fmt(&fq), e.origin().fmt(&fq), e.terminus().fmt(&fq));
    println!("its reverse is {}", e.reverse().fmt(&fq));

    // translation by T and the diagonal matrix diag(T, 1)
    let shift = PMat::translation(Poly::t()).to_mat2();
    let scale = PMat::diag(Poly::t(), Poly::one()).to_mat2();
    println!("(1 T; 0 1)·{} = {}", e.fmt(&fq), act(&shift, &e, &fq)?.fmt(&fq));
    println!("(T 0; 0 1)·{} = {}", e.fmt(&fq), act(&scale, &e, &fq)?.fmt(&fq));
    println!("(T 0; 0 1)·{} = {}", v.fmt(&fq), act_vertex(&scale, &v, &fq)?.fmt(&fq));
    Ok(())
}
