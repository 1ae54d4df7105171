//! Command-line front end: argument parsing, dispatch to the library, and
//! the versioned JSON report.

use crate::cochain::{gram_matrix, HarmonicSpace};
use crate::cusp::{
    al_on_cusp, cusp_count_formula, divisor_cusp, enumerate_cusps, m_of_prime, n_of_prime, rational_cusp_count,
    rational_cusp_count_formula,
};
use crate::eisenstein::{check_eigenvalue, is_harmonic_on, Eisenstein};
use crate::error::{Error, Result};
use crate::field::Fq;
use crate::hecke::{atkin_lehner_matrix, operator_json};
use crate::intmat::IntMatrix;
use crate::lattice::{action_on_component_group, summarize, HeckeCache, LevelSummary};
use crate::parse::{parse_modulus, parse_poly};
use crate::poly::{monic_divisors, monic_irreducibles, Poly};
use crate::quotient::{Level, QuotientGraph};
use crate::verify::{by_criterion, run_suite, Recorder, Suite};
use clap::{Args, Parser, Subcommand};
use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use serde_json::{json, Value};
use std::path::PathBuf;

/// Default caps; larger inputs need `--allow-large`.
pub const DEFAULT_MAX_Q: u32 = 27;
pub const DEFAULT_MAX_DEG: usize = 5;

#[derive(Parser, Debug)]
#[command(name = "ffhecke", version, about = "Hecke congruence quotients of the Bruhat-Tits tree over F_q[T]")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Quotient graph Γ₀(n)\T: edge classes, weights, stabilizers, cusps
    Graph(JobArgs),
    /// Integral harmonic cochains: basis, Gram matrix, first Fourier coefficients
    Cochains(JobArgs),
    /// Hecke and Atkin-Lehner matrices on the cochain basis
    Hecke(JobArgs),
    /// Hecke algebra, Eisenstein ideal and the quotient 𝕋/𝔈
    Ideal(JobArgs),
    /// Component group Φ_∞ and its Eisenstein kernel
    Phi(JobArgs),
    /// Cusps, their rationality and the Atkin-Lehner action on them
    Cusps(JobArgs),
    /// Eisenstein series of level n on the quotient graph
    Eis(JobArgs),
    /// Run a verification suite
    Verify(VerifyArgs),
}

#[derive(Args, Debug, Clone)]
pub struct FieldArgs {
    /// field size q (a prime power)
    #[arg(long)]
    pub q: Option<u32>,
    /// characteristic, together with --ext
    #[arg(long = "char")]
    pub characteristic: Option<u32>,
    /// extension degree over F_p
    #[arg(long)]
    pub ext: Option<u32>,
    /// defining polynomial of F_q over F_p in x, e.g. "x^2+x+1"
    #[arg(long)]
    pub modulus: Option<String>,
}

#[derive(Args, Debug, Clone)]
pub struct JobArgs {
    #[command(flatten)]
    pub field: FieldArgs,
    /// the level n, a polynomial in T (elements of F_q as [x+1] etc.)
    #[arg(long)]
    pub level: String,
    /// starting generator degree for Hecke algebras and Eisenstein ideals
    #[arg(long = "gen-deg", default_value_t = 2)]
    pub gen_deg: usize,
    /// largest prime degree in Eisenstein eigenvalue checks
    #[arg(long = "eis-deg", default_value_t = 2)]
    pub eis_deg: usize,
    /// write the JSON report here instead of standard output
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// write the quotient graph in DOT format here (graph command)
    #[arg(long)]
    pub dot: Option<PathBuf>,
    /// worker threads
    #[arg(long)]
    pub jobs: Option<usize>,
    /// seed for randomized parts
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// lift the default caps q ≤ 27 and deg n ≤ 5
    #[arg(long = "allow-large")]
    pub allow_large: bool,
}

#[derive(Args, Debug, Clone)]
pub struct VerifyArgs {
    /// deg3, q2-examples, properties or all
    #[arg(long, default_value = "all")]
    pub suite: String,
    /// field sizes for the degree-three suite, comma separated
    #[arg(long, value_delimiter = ',', default_values_t = vec![2u32, 3, 4, 5])]
    pub q: Vec<u32>,
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub jobs: Option<usize>,
}

/// Exit status for an error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Parse(_) | Error::InvalidField(_) | Error::InvalidLevel(_) => 2,
        Error::NoStabilization(_) | Error::BoundExceeded(_) => 3,
        _ => 1,
    }
}

fn field(a: &FieldArgs) -> Result<Fq> {
    match (a.q, a.characteristic, a.ext) {
        (Some(q), None, None) if a.modulus.is_none() => Fq::new(q),
        (q, Some(p), e) => {
            let e = e.unwrap_or(1);
            if let Some(q) = q {
                if p.checked_pow(e) != Some(q) {
                    return Err(Error::InvalidField(format!("--q {q} disagrees with --char {p} --ext {e}")));
                }
            }
            let m = a.modulus.as_deref().map(|s| parse_modulus(s, p)).transpose()?;
            Fq::with_char(p, e, m)
        }
        (Some(q), None, e) => {
            let (p, k) = crate::field::prime_power(q).ok_or_else(|| Error::InvalidField(format!("{q} is not a prime power")))?;
            if e.is_some_and(|e| e != k) {
                return Err(Error::InvalidField(format!("--ext disagrees with q = {q}")));
            }
            let m = a.modulus.as_deref().map(|s| parse_modulus(s, p)).transpose()?;
            Fq::with_char(p, k, m)
        }
        _ => Err(Error::Parse("give --q or --char/--ext".into())),
    }
}

/// The parsed field and level of a job, after the size caps.
pub struct Job {
    pub fq: Fq,
    pub level: Level,
    pub args: JobArgs,
}

impl Job {
    pub fn from_args(args: &JobArgs) -> Result<Job> {
        let fq = field(&args.field)?;
        let n = parse_poly(&args.level, &fq)?;
        if n.deg() < 1 || !n.is_monic() {
            return Err(Error::InvalidLevel(format!("{} is not monic of positive degree", n.fmt(&fq))));
        }
        let level = Level::new(&n, &fq)?;
        let big = fq.q() > DEFAULT_MAX_Q || level.deg() > DEFAULT_MAX_DEG;
        if big && !args.allow_large {
            return Err(Error::InvalidLevel(format!(
                "q = {} and deg n = {} exceed the caps q ≤ {DEFAULT_MAX_Q}, deg n ≤ {DEFAULT_MAX_DEG}; pass --allow-large",
                fq.q(),
                level.deg()
            )));
        }
        if big {
            eprintln!("warning: beyond the default caps, results are in unverified territory");
        }
        Ok(Job { fq, level, args: args.clone() })
    }

    fn config(&self) -> Value {
        json!({
            "field": self.fq.info(),
            "level": self.level.n.fmt(&self.fq),
            "factorization": self.level.factors.iter().map(|(p, e)| json!([p.fmt(&self.fq), e])).collect::<Vec<_>>(),
            "gen_deg": self.args.gen_deg,
            "eis_deg": self.args.eis_deg,
            "seed": self.args.seed,
        })
    }

    fn graph(&self) -> Result<QuotientGraph> {
        QuotientGraph::build(&self.level, &self.fq)
    }

    fn space(&self) -> Result<HarmonicSpace> {
        HarmonicSpace::new(self.graph()?)
    }
}

/// The versioned report envelope.
pub fn report(command: &str, config: Value, escalations: Vec<Value>, result: Value) -> Value {
    json!({
        "schema": 1,
        "command": command,
        "version": env!("CARGO_PKG_VERSION"),
        "config": config,
        "escalations": escalations,
        "result": result,
    })
}

fn matrix_json(m: &IntMatrix) -> Value {
    json!((0..m.rows()).map(|r| m.row(r).iter().map(|x| x.to_string()).collect::<Vec<_>>()).collect::<Vec<_>>())
}

fn factors_json(f: &[BigInt]) -> Value {
    json!(f.iter().map(|x| x.to_u64().map_or_else(|| json!(x.to_string()), |v| json!(v))).collect::<Vec<_>>())
}

fn escalation(what: &str, from: usize, to: usize) -> Value {
    json!({ "what": what, "from": from, "to": to })
}

fn summary_escalations(s: &LevelSummary, start: usize) -> Vec<Value> {
    let start = start.max(1);
    let mut out = Vec::new();
    if s.t.escalated {
        out.push(escalation("Hecke algebra generator degree", start, s.t.degree));
    }
    if s.t0.escalated {
        out.push(escalation("prime-to-level Hecke algebra generator degree", start, s.t0.degree));
    }
    if s.ideal.escalated {
        out.push(escalation("Eisenstein ideal generator degree", start, s.ideal.degree));
    }
    if s.phi_kernel_degree > start {
        out.push(escalation("Eisenstein kernel generator degree", start, s.phi_kernel_degree));
    }
    out
}

/// Executes one non-verify command, returning the report and the DOT text for `graph`.
pub fn run_job(command: &str, job: &Job) -> Result<(Value, Option<String>)> {
    let fq = &job.fq;
    let n = &job.level.n;
    let start = job.args.gen_deg;
    let mut escalations = Vec::new();
    let mut dot = None;
    let result = match command {
        "graph" => {
            let g = job.graph()?;
            dot = Some(g.to_dot());
            let mut v = g.to_json();
            v["cusps"] = json!(g.num_cusps());
            v["cusp_count_formula"] = json!(cusp_count_formula(&job.level, fq).to_string());
            v
        }
        "cochains" => {
            let s = job.space()?;
            let gram = gram_matrix(&s)?;
            let mut basis = Vec::new();
            for i in 0..s.genus() {
                let f = s.basis_cochain(i);
                let support: Vec<Value> = s
                    .unknowns
                    .iter()
                    .zip(&f)
                    .filter(|(_, v)| !v.is_zero())
                    .map(|(c, v)| json!([c, v.to_string()]))
                    .collect();
                basis.push(support);
            }
            let mut fourier = serde_json::Map::new();
            for d in 0..=1 {
                for m in Poly::monics(d, fq.q()) {
                    let c = s.fourier_basis(&m)?;
                    fourier.insert(m.fmt(fq), json!(c.iter().map(|x| x.to_string()).collect::<Vec<_>>()));
                }
            }
            json!({
                "genus": s.genus(),
                "basis": basis,
                "gram": matrix_json(&gram),
                "fourier": fourier,
            })
        }
        "hecke" => {
            let s = job.space()?;
            let cache = HeckeCache::new(&s);
            let mut ops = Vec::new();
            let ps = cache.primes(start.max(1), false);
            cache.prefetch(&ps)?;
            for p in &ps {
                let label = if p.divides(n, fq) { format!("U_({})", p.fmt(fq)) } else { format!("T_({})", p.fmt(fq)) };
                ops.push(operator_json(&label, &s, &cache.t(p)?));
            }
            for m in exact_divisors(n, fq) {
                ops.push(operator_json(&format!("W_{}", m.fmt(fq)), &s, &atkin_lehner_matrix(&s, &m)?));
            }
            json!({ "genus": s.genus(), "operators": ops })
        }
        "ideal" => {
            let s = job.space()?;
            let cache = HeckeCache::new(&s);
            let sum = summarize(&cache, start)?;
            escalations = summary_escalations(&sum, start);
            let mut cong = Vec::new();
            for (p, _) in &job.level.factors {
                let u = cache.t(p)?;
                cong.push(json!({ "operator": format!("U_({})", p.fmt(fq)), "congruent_to": congruence(&u, &sum)? }));
            }
            json!({
                "genus": sum.genus,
                "rank_T": sum.t.lattice.rank(),
                "rank_T0": sum.t0.lattice.rank(),
                "T_degree": sum.t.degree,
                "index_T_T0": sum.index.as_ref().map(|i| i.to_string()),
                "E_degree": sum.ideal.degree,
                "T_mod_E": factors_json(&sum.ideal.quotient.factors),
                "T_mod_E_free_rank": sum.ideal.quotient.free_rank,
                "congruences": cong,
            })
        }
        "phi" => {
            let s = job.space()?;
            let cache = HeckeCache::new(&s);
            let sum = summarize(&cache, start)?;
            escalations = summary_escalations(&sum, start);
            let mut actions = Vec::new();
            for p in cache.primes(2, true) {
                let a = action_on_component_group(&cache.eta(&p)?, &sum.gram)?;
                actions.push(json!({ "prime": p.fmt(fq), "eta_acts_trivially": a.is_zero }));
            }
            let mut reference = json!(null);
            if job.level.factors.len() == 1 {
                let (p, e) = &job.level.factors[0];
                if *e == 1 {
                    reference = json!({ "N(p)": n_of_prime(p, fq)?.to_string() });
                } else if *e == 2 {
                    reference = json!({ "M(p)": m_of_prime(p, fq)?.to_string() });
                }
            }
            json!({
                "genus": sum.genus,
                "Phi": factors_json(&sum.phi.factors),
                "Phi_free_rank": sum.phi.free_rank,
                "Phi_E_kernel": factors_json(&sum.phi_kernel.factors),
                "T_mod_E": factors_json(&sum.ideal.quotient.factors),
                "eisenstein_action": actions,
                "reference_order": reference,
            })
        }
        "cusps" => {
            let cs = enumerate_cusps(&job.level, fq);
            let mut divisors = Vec::new();
            for d in monic_divisors(n, fq) {
                let c = divisor_cusp(&d, &job.level, fq)?;
                let w = al_on_cusp(n, &c, &job.level, fq)?;
                divisors.push(json!({ "d": d.fmt(fq), "cusp": c.fmt(fq), "W_n": w.fmt(fq) }));
            }
            json!({
                "count": cs.len(),
                "count_formula": cusp_count_formula(&job.level, fq).to_string(),
                "rational": rational_cusp_count(&job.level, fq),
                "rational_formula": rational_cusp_count_formula(&job.level, fq),
                "cusps": cs.iter().map(|c| c.to_json(fq)).collect::<Vec<_>>(),
                "divisor_cusps": divisors,
            })
        }
        "eis" => {
            let g = job.graph()?;
            let e = Eisenstein::new(n, fq)?;
            let values = e.class_values(&g)?;
            let mut eig = Vec::new();
            for d in 1..=job.args.eis_deg.max(1) {
                for p in monic_irreducibles(d, fq) {
                    if !p.divides(n, fq) {
                        eig.push(json!({ "prime": p.fmt(fq), "eigenvalue": p.norm(fq) + 1, "holds": check_eigenvalue(&g, &e, &p)? }));
                    }
                }
            }
            let classes: Vec<Value> = g
                .classes
                .iter()
                .map(|c| json!({ "class": c.id, "rep": c.rep.fmt(fq), "ray": c.ray.map(|r| r.0), "value": values[c.id].to_string() }))
                .collect();
            json!({
                "nu": e.nu().to_string(),
                "harmonic": is_harmonic_on(&g, &values),
                "values": classes,
                "eigenvalue_checks": eig,
            })
        }
        other => return Err(Error::Parse(format!("unknown command {other}"))),
    };
    Ok((report(command, job.config(), escalations, result), dot))
}

fn exact_divisors(n: &Poly, fq: &Fq) -> Vec<Poly> {
    monic_divisors(n, fq)
        .into_iter()
        .filter(|m| m.deg() >= 1 && Poly::gcd(m, &n.div_exact(m, fq).expect("divisor"), fq).is_one())
        .collect()
}

/// The integer c (least residue modulo the exponent of 𝕋/𝔈) with `u - c ∈ 𝔈`, if there is one.
fn congruence(u: &IntMatrix, s: &LevelSummary) -> Result<Value> {
    let g = s.genus;
    if !s.ideal.quotient.is_finite() {
        return Ok(Value::Null);
    }
    let exponent = s.ideal.quotient.factors.last().cloned().unwrap_or_else(|| BigInt::from(1));
    let bound = exponent.to_u64().filter(|&e| e <= 100_000).ok_or_else(|| Error::BoundExceeded("exponent of T/E too large to search".into()))?;
    for c in 0..bound {
        if s.ideal.contains(&u.sub(&IntMatrix::scalar(g, &BigInt::from(c)))) {
            return Ok(json!({ "residue": c, "modulus": bound }));
        }
    }
    Ok(Value::Null)
}

fn set_jobs(jobs: Option<usize>) {
    if let Some(k) = jobs {
        // fails only if a pool already exists, which keeps the earlier setting
        let _ = rayon::ThreadPoolBuilder::new().num_threads(k.max(1)).build_global();
    }
}

fn emit(v: &Value, out: &Option<PathBuf>) -> Result<()> {
    let text = serde_json::to_string_pretty(v).expect("serializable") + "\n";
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| Error::Dimension(format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run_verify(a: &VerifyArgs) -> Result<i32> {
    set_jobs(a.jobs);
    let suite: Suite = a.suite.parse()?;
    for &q in &a.q {
        Fq::new(q)?;
        if q > DEFAULT_MAX_Q {
            return Err(Error::InvalidField(format!("q = {q} exceeds the cap {DEFAULT_MAX_Q}")));
        }
    }
    let mut rec = Recorder::new(|c| {
        let mark = if c.pass { "PASS" } else { "FAIL" };
        eprintln!("[{mark}] #{:<2} {} | expected {} | got {}", c.criterion, c.name, c.expected, c.got);
    });
    run_suite(&mut rec, suite, &a.q, a.seed);
    let summary: Vec<Value> = by_criterion(&rec.checks)
        .into_iter()
        .map(|(id, passed, total)| json!({ "criterion": id, "passed": passed, "total": total }))
        .collect();
    let all_pass = rec.checks.iter().all(|c| c.pass);
    for (id, passed, total) in by_criterion(&rec.checks) {
        let label = if id == 0 { "supplementary".to_string() } else { format!("criterion {id}") };
        let mark = if passed == total { "PASS" } else { "FAIL" };
        eprintln!("{mark} {label}: {passed}/{total}");
    }
    let config = json!({ "suite": a.suite, "q": a.q, "seed": a.seed });
    let v = report("verify", config, Vec::new(), json!({ "pass": all_pass, "summary": summary, "checks": rec.checks }));
    emit(&v, &a.out)?;
    Ok(if all_pass { 0 } else { 1 })
}

/// Runs the parsed command line and returns the process exit status.
pub fn run(cli: Cli) -> i32 {
    let outcome = match &cli.command {
        Command::Verify(a) => run_verify(a),
        cmd => {
            let (name, args) = match cmd {
                Command::Graph(a) => ("graph", a),
                Command::Cochains(a) => ("cochains", a),
                Command::Hecke(a) => ("hecke", a),
                Command::Ideal(a) => ("ideal", a),
                Command::Phi(a) => ("phi", a),
                Command::Cusps(a) => ("cusps", a),
                Command::Eis(a) => ("eis", a),
                Command::Verify(_) => unreachable!(),
            };
            set_jobs(args.jobs);
            Job::from_args(args).and_then(|job| {
                let (v, dot) = run_job(name, &job)?;
                if let (Some(path), Some(text)) = (&args.dot, dot) {
                    std::fs::write(path, text).map_err(|e| Error::Dimension(format!("cannot write {}: {e}", path.display())))?;
                }
                emit(&v, &args.out)?;
                Ok(0)
            })
        }
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn error_kinds_map_to_exit_codes() {
        assert_eq!(exit_code(&Error::Parse("x".into())), 2);
        assert_eq!(exit_code(&Error::InvalidLevel("x".into())), 2);
        assert_eq!(exit_code(&Error::NoStabilization("x".into())), 3);
        assert_eq!(exit_code(&Error::BoundExceeded("x".into())), 3);
        assert_eq!(exit_code(&Error::NotEquivariant("x".into())), 1);
    }

    #[test]
    fn suite_and_q_list_parse() {
        let cli = Cli::try_parse_from(["ffhecke", "verify", "--suite", "q2-examples", "--q", "2,3"]).unwrap();
        let Command::Verify(v) = cli.command else { panic!("expected verify") };
        assert_eq!(v.q, vec![2, 3]);
        let bad = Cli::try_parse_from(["ffhecke", "verify", "--suite", "nope"]).unwrap();
        assert_eq!(run(bad), 2);
    }
}
