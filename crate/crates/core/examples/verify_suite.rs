//! Runs one verification suite and prints a pass/fail line per check.
//!
//! Usage: cargo run --release --example verify_suite -- [deg3|q2-examples|properties|all] [q,q,...] [seed]

use ffhecke::verify::{by_criterion, run_suite, Recorder, Suite};

fn main() -> ffhecke::Result<()> {
    let args: Vec<String> = std::env::args().collect();
    let suite: Suite = args.get(1).map(String::as_str).unwrap_or("deg3").parse()?;
    let qs: Vec<u32> = args.get(2).map(String::as_str).unwrap_or("2,3").split(',').filter_map(|s| s.trim().parse().ok()).collect();
    let seed: u64 = args.get(3).and_then(|s| s.parse().ok()).unwrap_or(7);
    let mut rec = Recorder::new(|c| {
        let mark = if c.pass { "PASS" } else { "FAIL" };
        println!("[{mark}] #{:<2} {:<60} expected {} | got {} ({:.2} s)", c.criterion, c.name, c.expected, c.got, c.seconds);
    });
    run_suite(&mut rec, suite, &qs, seed);
    println!();
    for (id, passed, total) in by_criterion(&rec.checks) {
        let label = if id == 0 { "supplementary".to_string() } else { format!("criterion {id}") };
        println!("{label:<16} {passed}/{total}");
    }
    Ok(())
}
