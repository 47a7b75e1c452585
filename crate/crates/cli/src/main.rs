//! `bv`: a command line workbench for system BV.

use bv_core::derivation::CertificateJson;
use bv_core::merge::{merge_recursive, merge_semantic};
use bv_core::mll::{from_structure, parse_sequent, simulate_mll, sequent_to_structure, MllProof, MllProofJson, MllProver};
use bv_core::search::{
    consistency_check, derivable, eliminate_up, split_find, Consistency, Derivability, SearchError, SplitKind,
};
use bv_core::suite::{run_suite, SuiteConfig};
use bv_core::web::{check_axioms, reconstruct, web_of, WebCandidate, WebJson};
use bv_core::{check_derivation, check_proof, parse_structure, Derivation, Format, Prover, RuleId, SearchConfig, Structure, System};
use clap::{Parser, Subcommand, ValueEnum};
use std::io::Read;
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(name = "bv", version, about = "Proof search and certificates for system BV")]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Fmt::Text)]
    format: Fmt,
    /// A preset (BV, FBV, SBV, SBVc, MV, WMV) or a comma list of rule ids.
    #[arg(long, global = true)]
    system: Option<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Fmt {
    Text,
    Json,
    Latex,
}

impl From<Fmt> for Format {
    fn from(f: Fmt) -> Format {
        match f {
            Fmt::Text => Format::Text,
            Fmt::Json => Format::Json,
            Fmt::Latex => Format::Latex,
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Search for a proof.
    Prove {
        structure: String,
        /// `ai↑` and `i↑` steps allowed when the system has them.
        #[arg(long, default_value_t = 1)]
        up_budget: u8,
    },
    /// Search for a derivation from one structure to another.
    Derive {
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
        /// Depth bound, required for systems with `ai↑` or `i↑`.
        #[arg(long)]
        depth: Option<usize>,
    },
    /// Decide whether two structures are equal up to the equational theory.
    Equiv { left: String, right: String },
    /// Print the relation web of a structure.
    Web { structure: String },
    /// Rebuild a structure from a web in JSON (a file, or stdin).
    Reconstruct { file: Option<String> },
    /// List the merge set of two structures.
    Merge {
        left: String,
        right: String,
        /// Use the web characterization instead of the recursive rules.
        #[arg(long)]
        semantic: bool,
    },
    /// Split the provable `[(R,T),P]` or `[<R;T>,P]`.
    Split {
        r: String,
        t: String,
        #[arg(default_value = "o")]
        p: String,
        #[arg(long, value_enum, default_value_t = Kind::Copar)]
        kind: Kind,
    },
    /// Turn a proof using `q↑` and `ai↑` into a BV proof.
    EliminateUp { file: Option<String> },
    /// Check that a structure and its negation are not both provable.
    Consistency { structure: String },
    /// Translate a sequent to a structure, or a flat structure back to a formula.
    Translate {
        text: String,
        #[arg(long)]
        reverse: bool,
    },
    /// Prove a sequent in MLL with mix.
    MllProve {
        sequent: String,
        /// Allow the units `bot` and `1`.
        #[arg(long)]
        units: bool,
        /// Print the FBV derivation simulating the sequent proof.
        #[arg(long)]
        simulate: bool,
    },
    /// Check a certificate in JSON (a file, or stdin).
    Check { file: Option<String> },
    /// Run the acceptance criteria.
    Suite {
        #[arg(long, default_value_t = 6)]
        max_size: usize,
        #[arg(long, value_delimiter = ',', default_value = "a,b,c")]
        atoms: Vec<String>,
        #[arg(long)]
        seed: Option<u64>,
        /// Run only these criteria.
        #[arg(long, value_delimiter = ',')]
        only: Vec<u8>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Kind {
    Seq,
    Copar,
}

const YES: u8 = 0;
const NO: u8 = 1;
const UNKNOWN: u8 = 2;
const USAGE: u8 = 3;

struct Failure(u8, String);

fn usage(e: impl std::fmt::Display) -> Failure {
    Failure(USAGE, e.to_string())
}

type Outcome = Result<(u8, String), Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { USAGE } else { YES };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok((code, out)) => {
            print!("{out}");
            if !out.is_empty() && !out.ends_with('\n') {
                println!();
            }
            ExitCode::from(code)
        }
        Err(Failure(code, msg)) => {
            eprintln!("bv: {msg}");
            ExitCode::from(code)
        }
    }
}

fn structure(s: &str) -> Result<Structure, Failure> {
    parse_structure(s).map_err(usage)
}

fn input(file: &Option<String>) -> Result<String, Failure> {
    match file.as_deref() {
        None | Some("-") => {
            let mut s = String::new();
            std::io::stdin().read_to_string(&mut s).map_err(usage)?;
            Ok(s)
        }
        Some(path) => std::fs::read_to_string(path).map_err(|e| usage(format!("{path}: {e}"))),
    }
}

fn json<T: serde::Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("serializable")
}

fn render(d: &Derivation, sys: &System, fmt: Fmt) -> String {
    match fmt {
        Fmt::Json => json(&d.to_json(&sys.name)),
        f => d.render(f.into()),
    }
}

fn grows(sys: &System) -> bool {
    sys.rules.iter().any(|r| r.introduces_atoms())
}

fn run(cli: Cli) -> Outcome {
    let sys = match &cli.system {
        Some(s) => System::parse(s).map_err(usage)?,
        None => System::bv(),
    };
    let fmt = cli.format;
    match cli.command {
        Command::Prove { structure: s, up_budget } => {
            let s = structure(&s)?;
            let mut sys = sys;
            sys.rules.insert(RuleId::UnitDown);
            let cfg = SearchConfig { up_budget, ..SearchConfig::default() };
            match Prover::with_config(sys.clone(), cfg).prove(&s) {
                Some(d) => Ok((YES, render(&d, &sys, fmt))),
                None if grows(&sys) => Ok((UNKNOWN, format!("no proof of {s} with {up_budget} atom-introducing step(s)"))),
                None => Ok((NO, format!("{s} is not provable in {sys}"))),
            }
        }
        Command::Derive { from, to, depth } => {
            let (t, r) = (structure(&from)?, structure(&to)?);
            let cfg = SearchConfig { derivability_depth: depth, ..SearchConfig::default() };
            match derivable(&t, &r, &sys, &cfg) {
                Ok(Derivability::Derivable(d)) => Ok((YES, render(&d, &sys, fmt))),
                Ok(Derivability::NotDerivable) => Ok((NO, format!("{r} is not derivable from {t} in {sys}"))),
                Ok(Derivability::Unknown) => Ok((UNKNOWN, format!("no derivation of {r} from {t} within the bound"))),
                Err(e) => Err(usage(e)),
            }
        }
        Command::Equiv { left, right } => {
            let (a, b) = (structure(&left)?, structure(&right)?);
            if a == b {
                Ok((YES, format!("equivalent: {a}")))
            } else {
                Ok((NO, format!("not equivalent: {a} and {b}")))
            }
        }
        Command::Web { structure: s } => {
            let w = web_of(&structure(&s)?).to_json();
            match fmt {
                Fmt::Json => Ok((YES, json(&w))),
                _ => Ok((YES, web_text(&w))),
            }
        }
        Command::Reconstruct { file } => {
            let j: WebJson = serde_json::from_str(&input(&file)?).map_err(usage)?;
            let z = WebCandidate::from_json(&j).map_err(usage)?;
            if let Some((axiom, occ)) = check_axioms(&z).first_failure() {
                return Ok((NO, format!("axiom {axiom} fails at occurrences {occ:?}")));
            }
            match reconstruct(&z) {
                Ok(s) => Ok((YES, s.to_string())),
                Err(e) => Ok((NO, e.to_string())),
            }
        }
        Command::Merge { left, right, semantic } => {
            let (r, t) = (structure(&left)?, structure(&right)?);
            let m = if semantic { merge_semantic(&r, &t).map_err(|e| Failure(UNKNOWN, e.to_string()))? } else { merge_recursive(&r, &t) };
            let members: Vec<String> = m.members.iter().map(|q| q.to_string()).collect();
            match fmt {
                Fmt::Json => Ok((YES, json(&members))),
                _ => Ok((YES, members.join("\n"))),
            }
        }
        Command::Split { r, t, p, kind } => {
            let (r, t, p) = (structure(&r)?, structure(&t)?, structure(&p)?);
            let kind = match kind {
                Kind::Seq => SplitKind::Seq,
                Kind::Copar => SplitKind::Copar,
            };
            match split_find(&r, &t, &p, kind) {
                Ok(w) => {
                    let bv = System::bv();
                    let out = match fmt {
                        Fmt::Json => json(&serde_json::json!({
                            "p1": w.p1.to_string(),
                            "p2": w.p2.to_string(),
                            "bridge": w.bridge.to_json("BV"),
                            "left_proof": w.left_proof.to_json("BV"),
                            "right_proof": w.right_proof.to_json("BV"),
                        })),
                        _ => format!(
                            "P1 = {}\nP2 = {}\n\nbridge:\n{}\nleft proof:\n{}\nright proof:\n{}",
                            w.p1,
                            w.p2,
                            render(&w.bridge, &bv, fmt),
                            render(&w.left_proof, &bv, fmt),
                            render(&w.right_proof, &bv, fmt)
                        ),
                    };
                    Ok((YES, out))
                }
                Err(SearchError::NotProvable(s)) => Ok((NO, format!("{s} is not provable"))),
                Err(e) => Err(Failure(NO, e.to_string())),
            }
        }
        Command::EliminateUp { file } => {
            let (d, cert_sys) = certificate(&input(&file)?)?;
            let given = cli.system.as_ref().map(|_| sys).unwrap_or(cert_sys);
            check_proof(&d, &given).map_err(|e| Failure(NO, format!("input is not a proof in {given}: {e}")))?;
            match eliminate_up(&d) {
                Ok(e) => Ok((YES, render(&e, &System::bv(), fmt))),
                Err(e) => Err(Failure(NO, e.to_string())),
            }
        }
        Command::Consistency { structure: s } => {
            let s = structure(&s)?;
            match consistency_check(&s) {
                Consistency::Exempt => Ok((YES, "exempt: the unit is self-dual".into())),
                Consistency::Pass { provable, dual_provable } => Ok((
                    YES,
                    format!("consistent: {s} provable: {provable}, {} provable: {dual_provable}", s.negate()),
                )),
                Consistency::Fail => Ok((NO, format!("inconsistent: {s} and {} are both provable", s.negate()))),
            }
        }
        Command::Translate { text, reverse } => {
            if reverse {
                let s = structure(&text)?;
                match from_structure(&s) {
                    Ok(f) => Ok((YES, f.to_string())),
                    Err(e) => Ok((NO, e.to_string())),
                }
            } else {
                let seq = parse_sequent(&text).map_err(usage)?;
                Ok((YES, sequent_to_structure(&seq).to_string()))
            }
        }
        Command::MllProve { sequent, units, simulate } => {
            let seq = parse_sequent(&sequent).map_err(usage)?;
            if !units && seq.formulas.iter().any(|f| f.has_units()) {
                return Err(usage("units need --units"));
            }
            let Some(pr) = MllProver::new(units).prove(&seq) else {
                return Ok((NO, format!("{seq} is not provable")));
            };
            if simulate {
                if units {
                    return Err(usage("only unit-free proofs are simulated"));
                }
                return Ok((YES, render(&simulate_mll(&pr), &System::fbv(), fmt)));
            }
            match fmt {
                Fmt::Json => Ok((YES, json(&pr.to_json()))),
                Fmt::Text => Ok((YES, mll_text(&pr))),
                Fmt::Latex => Err(usage("sequent proofs render as text or json")),
            }
        }
        Command::Check { file } => {
            let text = input(&file)?;
            if let Ok(j) = serde_json::from_str::<MllProofJson>(&text) {
                let pr = MllProof::from_json(&j).map_err(|e| Failure(NO, e.to_string()))?;
                return match pr.check(true) {
                    Ok(()) => Ok((YES, format!("valid sequent proof of {}", pr.conclusion))),
                    Err(e) => Ok((NO, format!("invalid: {e}"))),
                };
            }
            let (d, cert_sys) = certificate(&text)?;
            let given = cli.system.as_ref().map(|_| sys).unwrap_or(cert_sys);
            let result = if d.is_proof() { check_proof(&d, &given) } else { check_derivation(&d, &given) };
            match result {
                Ok(_) => Ok((
                    YES,
                    format!(
                        "valid {} of {} in {given}: {} step(s)",
                        if d.is_proof() { "proof" } else { "derivation" },
                        d.conclusion,
                        d.len()
                    ),
                )),
                Err(e) => Ok((NO, format!("invalid: {e}"))),
            }
        }
        Command::Suite { max_size, atoms, seed, only } => {
            let mut cfg = SuiteConfig { max_size, atoms, ..SuiteConfig::default() };
            if let Some(s) = seed {
                cfg.seed = s;
            }
            let ids: Vec<u8> = if only.is_empty() { (1..=10).collect() } else { only };
            if let Some(bad) = ids.iter().find(|&&i| !(1..=10).contains(&i)) {
                return Err(usage(format!("no criterion {bad}")));
            }
            let reports = run_suite(&cfg, &ids);
            let passed = reports.iter().all(|r| r.passed);
            let out = match fmt {
                Fmt::Json => json(&serde_json::json!({ "config": cfg, "passed": passed, "criteria": reports })),
                _ => reports.iter().map(|r| r.to_string()).collect::<Vec<_>>().join("\n"),
            };
            Ok((if passed { YES } else { NO }, out))
        }
    }
}

fn certificate(text: &str) -> Result<(Derivation, System), Failure> {
    let c: CertificateJson = serde_json::from_str(text).map_err(usage)?;
    let sys = if c.system.trim().is_empty() { System::bv() } else { System::parse(&c.system).map_err(usage)? };
    let d = Derivation::from_json(&c).map_err(|e| Failure(NO, e.to_string()))?;
    Ok((d, sys))
}

fn web_text(w: &WebJson) -> String {
    let mut out: Vec<String> = w
        .occurrences
        .iter()
        .map(|o| format!("{} {}{}", o.index, if o.polarity == "negative" { "~" } else { "" }, o.name))
        .collect();
    out.extend(w.pairs.iter().map(|p| format!("{} {} {}", p.i, p.rel, p.j)));
    out.join("\n")
}

fn mll_text(p: &MllProof) -> String {
    fn go(p: &MllProof, depth: usize, out: &mut Vec<String>) {
        out.push(format!("{}{}  ({:?})", "  ".repeat(depth), p.conclusion, p.rule));
        for q in &p.premisses {
            go(q, depth + 1, out);
        }
    }
    let mut out = vec![];
    go(p, 0, &mut out);
    out.join("\n")
}
