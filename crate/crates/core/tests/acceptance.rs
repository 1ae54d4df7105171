//! The acceptance matrix: one pass/fail line per criterion, then the failing
//! checks with expected and computed values.
//!
//! A failing check listed in `DOCUMENTED_CONFLICTS` is still reported as a
//! failure of its criterion. It does not fail the test run, because the
//! printed reference value disagrees with independent evidence (see the
//! decisions ledger). Any other failure, or a documented conflict that starts
//! passing, exits nonzero.

use ffhecke::verify::{run_suite, Check, Recorder, Suite};
use std::collections::BTreeMap;
use std::time::Instant;

const DOCUMENTED_CONFLICTS: &[&str] = &["q=2 n=T^4+T+1 Phi_inf"];

const TITLES: [&str; 13] = [
    "supplementary congruences modulo the Eisenstein ideal",
    "degree-3 quotient graphs match the drawn figures",
    "ranks of the integral harmonic cochains",
    "perfect pairing between Hecke algebra and cochains",
    "T/E and Phi_inf for degree 3, and T/E = Phi_inf",
    "Eisenstein property of Phi_inf",
    "q=2, n=(T^2+T+1)^2 worked example",
    "q=2 prime levels of degree 4",
    "xyz value table of Eisenstein series",
    "Eisenstein eigenvalue law on all degree-3 sublevels",
    "index [T : T0]",
    "characteristic divides #T/E for non-square-free levels",
    "randomized property suites",
];

fn main() {
    let start = Instant::now();
    let mut rec = Recorder::new(|_: &Check| {});
    run_suite(&mut rec, Suite::Deg3, &[2, 3, 4, 5], 0);
    run_suite(&mut rec, Suite::Q2Examples, &[], 0);
    run_suite(&mut rec, Suite::Properties, &[], 7);

    let mut groups: BTreeMap<u32, Vec<&Check>> = BTreeMap::new();
    for c in &rec.checks {
        groups.entry(c.criterion).or_default().push(c);
    }
    println!();
    println!("acceptance matrix");
    for id in (1..=12).chain(std::iter::once(0)) {
        let checks = groups.get(&id).map(Vec::as_slice).unwrap_or(&[]);
        let passed = checks.iter().filter(|c| c.pass).count();
        let secs: f64 = checks.iter().map(|c| c.seconds).sum();
        let ok = !checks.is_empty() && passed == checks.len();
        let label = if id == 0 { "extra".to_string() } else { format!("{id:>5}") };
        println!(
            "{} {label} {:<56} {passed:>3}/{:<3} {secs:>7.2} s",
            if ok { "PASS" } else { "FAIL" },
            TITLES[id as usize],
            checks.len()
        );
    }

    let mut unexpected = Vec::new();
    let failing: Vec<&Check> = rec.checks.iter().filter(|c| !c.pass).collect();
    if !failing.is_empty() {
        println!();
        println!("failing checks");
    }
    for c in &failing {
        let documented = DOCUMENTED_CONFLICTS.contains(&c.name.as_str());
        println!(
            "  #{} {}: expected {}, got {}{}",
            c.criterion,
            c.name,
            c.expected,
            c.got,
            if documented { " (documented conflict)" } else { "" }
        );
        if !documented {
            unexpected.push(c.name.clone());
        }
    }
    for name in DOCUMENTED_CONFLICTS {
        if rec.checks.iter().any(|c| c.name == *name && c.pass) {
            unexpected.push(format!("{name} now passes; update the documented conflicts"));
        }
        if !rec.checks.iter().any(|c| c.name == *name) {
            unexpected.push(format!("{name} was not run"));
        }
    }
    println!();
    println!("{} checks in {:.1} s", rec.checks.len(), start.elapsed().as_secs_f64());
    if !unexpected.is_empty() {
        println!("unexpected results: {}", unexpected.join("; "));
        std::process::exit(1);
    }
}
