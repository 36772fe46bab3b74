//! Command-line front door: compute profiles, run the searches, emit and
//! verify certificates, and print linking tables.
//!
//! Output is deterministic for a fixed invocation. `--format text` prints
//! a human summary; `--format structured` prints the same canonical JSON
//! that `--out` writes. Exit codes: 0 on success, 1 on domain errors
//! (including a failed verification), 2 on usage errors.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::cohomology;
use crate::kummer;
use crate::mildness::{self, RootChoice};
use crate::modarith::AvoidanceSet;
use crate::seeker::{self, S0Acceptance, SearchConfig};
use crate::{Error, Result};

#[derive(Debug, Parser)]
#[command(
    name = "mildcurve",
    version,
    about = "Cohomology of marked arithmetic curves over Q and mildness certificates"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    /// Human-readable summary
    Text,
    /// Canonical JSON, identical to what --out writes
    Structured,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum RootFlag {
    Smallest,
    SecondSmallest,
}

impl From<RootFlag> for RootChoice {
    fn from(f: RootFlag) -> RootChoice {
        match f {
            RootFlag::Smallest => RootChoice::Smallest,
            RootFlag::SecondSmallest => RootChoice::SecondSmallest,
        }
    }
}

#[derive(Debug, Args)]
struct CurveArgs {
    /// The odd prime p
    #[arg(long)]
    p: u64,
    /// Comma-separated unmarked places (e.g. "13" or "5,13"); "" for none
    #[arg(long = "S", value_name = "PRIMES", default_value = "")]
    s: String,
    /// Comma-separated marked primes; "" for none
    #[arg(long = "T", value_name = "PRIMES", default_value = "")]
    t: String,
}

#[derive(Debug, Args)]
struct SearchArgs {
    /// Primes the searches must skip: comma-separated tokens, each either
    /// "divisors-of-p", a prime, or a congruence "r mod m"
    #[arg(long, value_name = "TOKENS")]
    avoid: Option<String>,
    /// Largest prime the searches may test (also via MILDCURVE_MAX_PRIME)
    #[arg(long, value_name = "N")]
    max_prime: Option<u64>,
    /// Candidate budget per linking slot
    #[arg(long, value_name = "N")]
    max_candidates_per_slot: Option<u64>,
}

#[derive(Debug, Args)]
struct OutputArgs {
    /// Also write the canonical JSON artifact to this path
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Stdout rendering
    #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
    format: OutputFormat,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Global cohomology dimensions and Euler characteristic of (S, T)
    Cohomology {
        #[command(flatten)]
        curve: CurveArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Dimension and basis of the Kummer group V_S^T
    Kummer {
        #[command(flatten)]
        curve: CurveArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Search the auxiliary tame set that kills the Kummer group
    #[command(name = "find-s0")]
    FindS0 {
        #[command(flatten)]
        curve: CurveArgs,
        #[command(flatten)]
        search: SearchArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Run the full search and print the resulting linking table
    Linking {
        #[command(flatten)]
        curve: CurveArgs,
        #[command(flatten)]
        search: SearchArgs,
        #[arg(long, value_enum, default_value_t = RootFlag::Smallest)]
        roots: RootFlag,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Produce a mildness certificate for the curve (S, T)
    Certify {
        #[command(flatten)]
        curve: CurveArgs,
        #[command(flatten)]
        search: SearchArgs,
        #[arg(long, value_enum, default_value_t = RootFlag::Smallest)]
        roots: RootFlag,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Recheck a certificate file; exits 1 if it does not hold up
    Verify {
        /// Path to a certificate produced by `certify`
        cert: PathBuf,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Probe extra primes against a certificate's enlargement criterion
    Enlarge {
        /// Path to a certificate produced by `certify`
        cert: PathBuf,
        /// Comma-separated primes to probe
        #[arg(long, value_name = "PRIMES", default_value = "")]
        extra: String,
        #[command(flatten)]
        output: OutputArgs,
    },
}

fn parse_prime_list(text: &str) -> Result<Vec<u64>> {
    let text = text.trim();
    if text.is_empty() {
        return Ok(Vec::new());
    }
    text.split(',')
        .map(|tok| {
            tok.trim()
                .parse::<u64>()
                .map_err(|_| Error::InvalidInput(format!("not a prime list entry: {tok:?}")))
        })
        .collect()
}

fn parse_avoid(text: &str) -> Result<AvoidanceSet> {
    let mut avoid = AvoidanceSet::none();
    for tok in text.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        if tok == "divisors-of-p" {
            avoid.exclude_p_divisors = true;
        } else if let Some((r, m)) = tok.split_once(" mod ") {
            let r = r.trim().parse::<u64>();
            let m = m.trim().parse::<u64>();
            match (r, m) {
                (Ok(r), Ok(m)) => avoid.congruences.push((r, m)),
                _ => {
                    return Err(Error::InvalidInput(format!(
                        "not an avoidance congruence: {tok:?}"
                    )))
                }
            }
        } else if let Ok(n) = tok.parse::<u64>() {
            avoid.explicit.insert(n);
        } else {
            return Err(Error::InvalidInput(format!("not an avoidance token: {tok:?}")));
        }
    }
    Ok(avoid)
}

/// Default avoidance for the searching subcommands.
fn parse_avoid_or_default(tokens: &Option<String>) -> Result<AvoidanceSet> {
    match tokens {
        Some(s) => parse_avoid(s),
        None => Ok(AvoidanceSet::divisors_of_p()),
    }
}

fn search_config(args: &SearchArgs) -> Result<SearchConfig> {
    let mut cfg = SearchConfig::default();
    if let Ok(v) = std::env::var("MILDCURVE_MAX_PRIME") {
        cfg.max_prime = v.trim().parse().map_err(|_| {
            Error::InvalidInput(format!("MILDCURVE_MAX_PRIME is not a number: {v:?}"))
        })?;
    }
    if let Some(n) = args.max_prime {
        cfg.max_prime = n;
    }
    if let Some(n) = args.max_candidates_per_slot {
        cfg.max_candidates_per_slot = n;
    }
    Ok(cfg)
}

fn canonical_json<T: Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("report serializes");
    text.push('\n');
    text
}

struct CommandOutput {
    text: String,
    structured: String,
    out_path: Option<PathBuf>,
    format: OutputFormat,
    domain_failure: bool,
}

impl CommandOutput {
    fn new(output: OutputArgs, text: String, structured: String) -> Self {
        CommandOutput {
            text,
            structured,
            out_path: output.out,
            format: output.format,
            domain_failure: false,
        }
    }
}

#[derive(Serialize)]
struct FindS0Report {
    p: u64,
    marking: Vec<u64>,
    s0: Vec<u64>,
    tested: u64,
    acceptances: Vec<S0Acceptance>,
}

#[derive(Serialize)]
struct VerifyReport {
    valid: bool,
}

fn verdict_line(v: &mildness::Verdicts) -> String {
    format!(
        "verdicts: vdim_zero={} shape_ok={} vv_zero={} rank_full={} mild={} cd2={} kpi1={} ramified_everywhere={}",
        v.vdim_zero, v.shape_ok, v.vv_zero, v.rank_full, v.mild, v.cd2, v.kpi1,
        v.ramified_everywhere
    )
}

fn linking_table_text(table: &mildness::LinkingTable) -> String {
    let mut text = String::new();
    text.push_str(&format!("S0={:?}\n", table.s0));
    text.push_str(&format!("Q={:?}\n", table.q));
    text.push_str(&format!("marking={:?}\n", table.marking));
    for (v, g) in &table.roots {
        text.push_str(&format!("root({v})={g}\n"));
    }
    for e in &table.symbols {
        text.push_str(&format!("l({},{})={}\n", e.residue, e.modulus, e.value));
    }
    text
}

fn load_certificate(path: &PathBuf) -> Result<mildness::Certificate> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", path.display())))?;
    mildness::Certificate::from_json(&text)
}

fn execute(command: Command) -> Result<CommandOutput> {
    match command {
        Command::Cohomology { curve, output } => {
            let s = parse_prime_list(&curve.s)?;
            let t = parse_prime_list(&curve.t)?;
            let profile = cohomology::global_profile(&s, &t, curve.p)?;
            let text = format!(
                "h=({},{},{},{}), chi={}\n",
                profile.h[0], profile.h[1], profile.h[2], profile.h[3], profile.chi
            );
            let structured = canonical_json(&profile);
            Ok(CommandOutput::new(output, text, structured))
        }
        Command::Kummer { curve, output } => {
            let s = parse_prime_list(&curve.s)?;
            let t = parse_prime_list(&curve.t)?;
            let group = kummer::kummer_group(&s, &t, curve.p)?;
            let text = format!("dim={}\n", group.dim);
            let structured = canonical_json(&group);
            Ok(CommandOutput::new(output, text, structured))
        }
        Command::FindS0 { curve, search, output } => {
            let s = parse_prime_list(&curve.s)?;
            let t = parse_prime_list(&curve.t)?;
            let mut marking = [s, t].concat();
            marking.sort_unstable();
            marking.dedup();
            let avoid = parse_avoid_or_default(&search.avoid)?;
            let cfg = search_config(&search)?;
            let found = seeker::find_s0_killing_v(&marking, &avoid, curve.p, &cfg)?;
            let s0: Vec<u64> = found.s0.iter().map(|pl| pl.q()).collect();
            let text = format!("S0={s0:?}\ntested={}\n", found.tested);
            let structured = canonical_json(&FindS0Report {
                p: curve.p,
                marking,
                s0,
                tested: found.tested,
                acceptances: found.acceptances,
            });
            Ok(CommandOutput::new(output, text, structured))
        }
        Command::Linking { curve, search, roots, output } => {
            let s = parse_prime_list(&curve.s)?;
            let t = parse_prime_list(&curve.t)?;
            let avoid = parse_avoid_or_default(&search.avoid)?;
            let cfg = search_config(&search)?;
            let sought = seeker::seek_certified_set(&s, &t, &avoid, curve.p, &cfg)?;
            let mut marking = [s, t].concat();
            marking.sort_unstable();
            let s0: Vec<u64> = sought.s0.iter().map(|pl| pl.q()).collect();
            let q: Vec<u64> = sought.q.iter().map(|pl| pl.q()).collect();
            let table = mildness::build_linking_table(&s0, &q, &marking, curve.p, roots.into())?;
            let text = linking_table_text(&table);
            let structured = canonical_json(&table);
            Ok(CommandOutput::new(output, text, structured))
        }
        Command::Certify { curve, search, roots, output } => {
            let s = parse_prime_list(&curve.s)?;
            let t = parse_prime_list(&curve.t)?;
            let avoid = parse_avoid_or_default(&search.avoid)?;
            let cfg = search_config(&search)?;
            let cert = mildness::certify_with_roots(curve.p, &s, &t, &avoid, &cfg, roots.into())?;
            let mut text = String::new();
            text.push_str(&format!("p={} S={:?} T={:?}\n", cert.p, cert.s, cert.t));
            text.push_str(&format!("S0={:?}\nQ={:?}\n", cert.s0, cert.q));
            text.push_str(&format!(
                "h=({},{},{},{}), chi={}\n",
                cert.profile.h[0],
                cert.profile.h[1],
                cert.profile.h[2],
                cert.profile.h[3],
                cert.profile.chi
            ));
            text.push_str(&verdict_line(&cert.verdicts));
            text.push('\n');
            text.push_str(&format!(
                "claims: local_realization={} free_product={}\n",
                cert.claims.local_realization.holds, cert.claims.free_product.holds
            ));
            let structured = cert.to_canonical_json();
            Ok(CommandOutput::new(output, text, structured))
        }
        Command::Verify { cert, output } => {
            let cert = load_certificate(&cert)?;
            let valid = mildness::verify(&cert)?;
            let mut out = CommandOutput::new(
                output,
                format!("valid={valid}\n"),
                canonical_json(&VerifyReport { valid }),
            );
            out.domain_failure = !valid;
            Ok(out)
        }
        Command::Enlarge { cert, extra, output } => {
            let cert = load_certificate(&cert)?;
            let extra = parse_prime_list(&extra)?;
            let report = mildness::enlargement_check(&cert, &extra)?;
            let mut text = format!(
                "outcome={}\n",
                match report.outcome {
                    mildness::EnlargementOutcome::SufficientYes => "sufficient_yes",
                    mildness::EnlargementOutcome::Inconclusive => "inconclusive",
                }
            );
            for e in &report.evaluations {
                text.push_str(&format!(
                    "{}: in_certified_set={} image_nonzero={}\n",
                    e.prime, e.in_certified_set, e.image_nonzero
                ));
            }
            let structured = canonical_json(&report);
            Ok(CommandOutput::new(output, text, structured))
        }
    }
}

/// Parses `std::env::args`, runs the chosen subcommand, prints its output,
/// and returns the process exit code.
pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match execute(cli.command) {
        Ok(out) => {
            if let Some(path) = &out.out_path {
                if let Err(e) = std::fs::write(path, &out.structured) {
                    eprintln!("error: cannot write {}: {e}", path.display());
                    return 1;
                }
            }
            match out.format {
                OutputFormat::Text => print!("{}", out.text),
                OutputFormat::Structured => print!("{}", out.structured),
            }
            if out.domain_failure {
                1
            } else {
                0
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_lists_parse() {
        assert_eq!(parse_prime_list("").unwrap(), Vec::<u64>::new());
        assert_eq!(parse_prime_list("  ").unwrap(), Vec::<u64>::new());
        assert_eq!(parse_prime_list("13").unwrap(), vec![13]);
        assert_eq!(parse_prime_list("5, 13").unwrap(), vec![5, 13]);
        assert!(parse_prime_list("five").is_err());
    }

    #[test]
    fn avoidance_specs_parse() {
        let a = parse_avoid("divisors-of-p").unwrap();
        assert!(a.exclude_p_divisors && a.explicit.is_empty());
        let b = parse_avoid("7,4 mod 9").unwrap();
        assert!(b.explicit.contains(&7));
        assert_eq!(b.congruences, vec![(4, 9)]);
        assert!(parse_avoid("sevenish").is_err());
        assert!(parse_avoid("x mod 9").is_err());
        assert_eq!(parse_avoid("").unwrap(), AvoidanceSet::none());
    }

    #[test]
    fn cohomology_text_is_exact() {
        let out = execute(Command::Cohomology {
            curve: CurveArgs { p: 3, s: "13".into(), t: "11".into() },
            output: OutputArgs { out: None, format: OutputFormat::Text },
        })
        .unwrap();
        assert_eq!(out.text, "h=(1,0,1,0), chi=2\n");
    }

    #[test]
    fn kummer_text_reports_dimension() {
        let out = execute(Command::Kummer {
            curve: CurveArgs { p: 3, s: "".into(), t: "11,13".into() },
            output: OutputArgs { out: None, format: OutputFormat::Text },
        })
        .unwrap();
        assert_eq!(out.text, "dim=2\n");
    }

    #[test]
    fn usage_is_rejected_by_clap() {
        assert!(Cli::try_parse_from(["mildcurve", "cohomology"]).is_err());
        assert!(Cli::try_parse_from(["mildcurve", "no-such-command"]).is_err());
        let parsed =
            Cli::try_parse_from(["mildcurve", "cohomology", "--p", "3", "--S", "", "--T", ""]);
        assert!(parsed.is_ok());
    }
}
