//! Command-line front end: validation, classification, membership checks,
//! witness transcripts, quadratic shortcuts, conjectured sets for factored
//! inputs, and brute-force oracle comparisons. Exit status 0 means a true or
//! successful verdict, 1 a false or rejected one, 2 a usage or precondition
//! error; JSON mode reports errors as `{"error": {"code", "message"}}`.

use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use serde_json::json;
use weilgroups::lattice::{cokernel_integer, smith_local, witness_matrix};
use weilgroups::{
    conjecture_local_groups, elliptic_groups, hodge_polygon, validate_weil, ConvexPolygon, Error,
    GroupType, IntPoly, IsogenyClass, LocalGroupType, Realizability, DEFAULT_BUDGET,
};

const BUDGET_ENV: &str = "WEILGROUPS_ORACLE_BUDGET";

#[derive(Parser)]
#[command(
    name = "weilgroups",
    version,
    about = "Classify groups of rational points in an isogeny class by polygon comparison"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
enum Format {
    #[default]
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Screen a polynomial: degree, functional equation, root location
    Validate {
        /// Polynomial, either "a0,a1,...,1" or an expression in t
        #[arg(long)]
        poly: String,
        /// Field size, a prime power
        #[arg(long)]
        q: u64,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Enumerate every realizable group for a squarefree accepted polynomial
    Classify {
        #[arg(long)]
        poly: String,
        #[arg(long)]
        q: u64,
        /// Cap on emitted full groups; the count stays exact
        #[arg(long, default_value_t = 1000)]
        limit: usize,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Decide one candidate group with diagnostics
    Check {
        #[arg(long)]
        poly: String,
        #[arg(long)]
        q: u64,
        /// Group label, e.g. "Z/2 + Z/4"
        #[arg(long)]
        group: String,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Build the lattice witness for a group at one prime and verify it
    Witness {
        #[arg(long)]
        poly: String,
        #[arg(long)]
        q: u64,
        #[arg(long)]
        group: String,
        #[arg(long)]
        prime: u64,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Groups for t^2 - b*t + q by divisor arithmetic
    Elliptic {
        #[arg(long)]
        q: u64,
        #[arg(long, allow_hyphen_values = true)]
        b: i64,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Conjectured direct-sum set for a factored polynomial
    Conjecture {
        /// Factor, repeatable; each must divide the previous one
        #[arg(long = "factor", required = true)]
        factors: Vec<String>,
        #[arg(long)]
        prime: u64,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Brute-force the achievable set and compare with the criterion
    Oracle {
        #[arg(long)]
        poly: String,
        #[arg(long)]
        q: u64,
        #[arg(long)]
        prime: u64,
        /// Index-exponent bound; defaults to ord_prime(f(1)) + 2
        #[arg(long)]
        bound: Option<u32>,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Rerun the frozen regression fixtures
    #[command(hide = true)]
    Fixtures,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let status = match cli.command {
        Command::Validate { poly, q, format } => cmd_validate(&poly, q, format),
        Command::Classify {
            poly,
            q,
            limit,
            format,
        } => cmd_classify(&poly, q, limit, format),
        Command::Check {
            poly,
            q,
            group,
            format,
        } => cmd_check(&poly, q, &group, format),
        Command::Witness {
            poly,
            q,
            group,
            prime,
            format,
        } => cmd_witness(&poly, q, &group, prime, format),
        Command::Elliptic { q, b, format } => cmd_elliptic(q, b, format),
        Command::Conjecture {
            factors,
            prime,
            format,
        } => cmd_conjecture(&factors, prime, format),
        Command::Oracle {
            poly,
            q,
            prime,
            bound,
            format,
        } => cmd_oracle(&poly, q, prime, bound, format),
        Command::Fixtures => cmd_fixtures(),
    };
    ExitCode::from(status)
}

/// Report a precondition failure and return the usage exit status.
fn fail(format: Format, err: &Error) -> u8 {
    match format {
        Format::Json => println!(
            "{}",
            json!({"error": {"code": err.code(), "message": err.to_string()}})
        ),
        Format::Text => eprintln!("error: {err}"),
    }
    2
}

fn parse_poly(s: &str, format: Format) -> Result<IntPoly, u8> {
    s.parse().map_err(|e: Error| fail(format, &e))
}

fn parse_group(s: &str, format: Format) -> Result<GroupType, u8> {
    s.parse().map_err(|e: Error| fail(format, &e))
}

fn open_class(poly: &str, q: u64, format: Format) -> Result<IsogenyClass, u8> {
    let f = parse_poly(poly, format)?;
    IsogenyClass::new(f, q).map_err(|e| fail(format, &e))
}

fn cmd_validate(poly: &str, q: u64, format: Format) -> u8 {
    let f = match parse_poly(poly, format) {
        Ok(f) => f,
        Err(status) => return status,
    };
    let report = validate_weil(&f, q);
    match format {
        Format::Json => println!("{}", report.to_json()),
        Format::Text => println!("{report}"),
    }
    u8::from(!report.is_accepted())
}

fn cmd_classify(poly: &str, q: u64, limit: usize, format: Format) -> u8 {
    let class = match open_class(poly, q, format) {
        Ok(c) => c,
        Err(status) => return status,
    };
    let result = match class.classify_all() {
        Ok(r) => r,
        Err(e) => return fail(format, &e),
    };
    let labels: Vec<String> = result.groups().take(limit).map(|g| g.to_string()).collect();
    let truncated = BigInt::from(labels.len()) < BigInt::from(result.total_count.clone());
    match format {
        Format::Json => {
            let mut value = result.to_json();
            let obj = value.as_object_mut().expect("object");
            obj.insert("groups".into(), json!(labels));
            obj.insert("truncated".into(), json!(truncated));
            println!("{value}");
        }
        Format::Text => {
            println!("polynomial  = {}", class.polynomial());
            println!("field size  = {q}");
            println!("order f(1)  = {}", class.order());
            println!("total count = {}", result.total_count);
            for pc in &result.per_prime {
                println!(
                    "prime {} (exponent {}), newton vertices {}",
                    pc.prime,
                    pc.exponent,
                    vertex_list(&pc.newton)
                );
                for c in &pc.candidates {
                    let group = LocalGroupType::new(pc.prime, &c.parts).expect("valid candidate");
                    println!(
                        "  {:<12} {}",
                        group.to_string(),
                        if c.passed { "pass" } else { "fail" }
                    );
                }
            }
            println!("groups:");
            for label in &labels {
                println!("{label}");
            }
            if truncated {
                println!("(truncated at {limit})");
            }
        }
    }
    0
}

fn cmd_check(poly: &str, q: u64, group: &str, format: Format) -> u8 {
    let class = match open_class(poly, q, format) {
        Ok(c) => c,
        Err(status) => return status,
    };
    let group = match parse_group(group, format) {
        Ok(g) => g,
        Err(status) => return status,
    };
    let verdict = class.is_realizable(&group);
    if let Realizability::WrongOrder { .. } = verdict {
        // a group of the wrong order is outside the question, not a "no"
        match format {
            Format::Json => println!(
                "{}",
                json!({"error": {"code": verdict.code(), "message": verdict.to_string()}})
            ),
            Format::Text => eprintln!("error: {verdict}"),
        }
        return 2;
    }
    match format {
        Format::Json => println!("{}", verdict.to_json()),
        Format::Text => println!("{verdict}"),
    }
    u8::from(!verdict.holds())
}

fn cmd_witness(poly: &str, q: u64, group: &str, prime: u64, format: Format) -> u8 {
    let class = match open_class(poly, q, format) {
        Ok(c) => c,
        Err(status) => return status,
    };
    let group = match parse_group(group, format) {
        Ok(g) => g,
        Err(status) => return status,
    };
    let local = match group.local(prime) {
        Ok(l) => l,
        Err(e) => return fail(format, &e),
    };
    let shifted = class.shifted();
    let witness = match witness_matrix(shifted.coeffs(), local.parts(), prime) {
        Ok(w) => w,
        Err(e) => return fail(format, &e),
    };
    let divisors = match smith_local(&witness) {
        Ok(d) => d,
        Err(e) => return fail(format, &e),
    };
    let verified = divisors.group() == local;
    match format {
        Format::Json => println!(
            "{}",
            json!({
                "prime": prime,
                "parts": local.parts(),
                "shifted": shifted.to_coeff_string(),
                "matrix": witness.to_json(),
                "elementary_divisor_exponents": divisors.exponents,
                "cokernel": divisors.group().to_string(),
                "verified": verified,
            })
        ),
        Format::Text => {
            println!("operator on the lattice for {} at {prime}:", group);
            for row in witness.entries() {
                let cells: Vec<String> = row.iter().map(|e| e.to_string()).collect();
                println!("  [{}]", cells.join(", "));
            }
            println!("elementary divisor exponents = {:?}", divisors.exponents);
            println!("cokernel = {}", divisors.group());
            println!("verified = {verified}");
        }
    }
    u8::from(!verified)
}

fn cmd_elliptic(q: u64, b: i64, format: Format) -> u8 {
    let groups = match elliptic_groups(q, b) {
        Ok(g) => g,
        Err(e) => return fail(format, &e),
    };
    let labels: Vec<String> = groups.iter().map(|g| g.to_string()).collect();
    match format {
        Format::Json => println!("{}", json!(labels)),
        Format::Text => {
            for label in &labels {
                println!("{label}");
            }
            if labels.is_empty() {
                eprintln!("note: the double-root order 1 - b + q is not a perfect square");
            }
        }
    }
    0
}

fn cmd_conjecture(factors: &[String], prime: u64, format: Format) -> u8 {
    let mut parsed = Vec::with_capacity(factors.len());
    for s in factors {
        match parse_poly(s, format) {
            Ok(f) => parsed.push(f),
            Err(status) => return status,
        }
    }
    let set = match conjecture_local_groups(&parsed, prime) {
        Ok(s) => s,
        Err(e) => return fail(format, &e),
    };
    match format {
        Format::Json => println!("{}", set.to_json()),
        Format::Text => {
            for g in &set.groups {
                println!("{g}");
            }
            if let Some(note) = set.note() {
                println!("{note}");
            }
        }
    }
    0
}

fn cmd_oracle(poly: &str, q: u64, prime: u64, bound: Option<u32>, format: Format) -> u8 {
    let class = match open_class(poly, q, format) {
        Ok(c) => c,
        Err(status) => return status,
    };
    let budget = match std::env::var(BUDGET_ENV) {
        Ok(raw) => match raw.parse::<u64>() {
            Ok(v) => v,
            Err(_) => {
                return fail(
                    format,
                    &Error::PolyParse(format!("{BUDGET_ENV} must be an integer, got {raw:?}")),
                )
            }
        },
        Err(_) => DEFAULT_BUDGET,
    };
    let criterion = match class.realizable_local_groups(prime) {
        Ok(g) => g,
        Err(e) => return fail(format, &e),
    };
    let exponent = match class.classify_prime(prime) {
        Ok(pc) => pc.exponent,
        Err(e) => return fail(format, &e),
    };
    let k = bound.unwrap_or(exponent + 2);
    let oracle =
        match weilgroups::achievable_groups_bruteforce(class.shifted(), prime, k, budget) {
            Ok(g) => g,
            Err(e) => return fail(format, &e),
        };
    let matches = oracle == criterion;
    let oracle_labels: Vec<String> = oracle.iter().map(|g| g.to_string()).collect();
    let criterion_labels: Vec<String> = criterion.iter().map(|g| g.to_string()).collect();
    match format {
        Format::Json => println!(
            "{}",
            json!({
                "prime": prime,
                "bound": k,
                "budget": budget,
                "oracle_groups": oracle_labels,
                "criterion_groups": criterion_labels,
                "match": matches,
            })
        ),
        Format::Text => {
            println!("oracle groups    = {}", oracle_labels.join("; "));
            println!("criterion groups = {}", criterion_labels.join("; "));
            println!("match            = {matches}");
        }
    }
    u8::from(!matches)
}

fn vertex_list(polygon: &ConvexPolygon) -> String {
    polygon
        .vertices()
        .iter()
        .map(|(x, y)| format!("({x}, {y})"))
        .collect::<Vec<_>>()
        .join(" ")
}

fn cmd_fixtures() -> u8 {
    let fixtures: Vec<(&str, Box<dyn Fn() -> bool>)> = vec![
        (
            "hodge straight line for equal parts",
            Box::new(|| {
                let hp = hodge_polygon(&[1, 1], 2).unwrap();
                vertex_list(&hp) == "(0, 2) (2, 0)"
            }),
        ),
        (
            "hodge kink for a cyclic factor",
            Box::new(|| {
                let hp = hodge_polygon(&[2], 2).unwrap();
                vertex_list(&hp) == "(0, 2) (1, 0) (2, 0)"
            }),
        ),
        (
            "double-root quadratic accepted with order 4",
            Box::new(|| {
                let f: IntPoly = "t^2-6*t+9".parse().unwrap();
                let report = validate_weil(&f, 9);
                report.is_accepted() && !report.squarefree && report.order == BigInt::from(4)
            }),
        ),
        (
            "square group at the trace boundary",
            Box::new(|| {
                let groups = elliptic_groups(9, 6).unwrap();
                groups.len() == 1 && groups[0].to_string() == "Z/2 + Z/2"
            }),
        ),
        (
            "relation-matrix cokernel is Z/8 + Z/16",
            Box::new(|| {
                let rows: Vec<Vec<BigInt>> = [
                    [4i64, 0, 4, 8],
                    [0, 0, -1, 0],
                    [2, 16, 4, 0],
                    [-1, 0, 0, 0],
                ]
                .iter()
                .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
                .collect();
                let group = cokernel_integer(&rows).unwrap();
                group.to_string() == "Z/8 + Z/16" && group.order().to_string() == "128"
            }),
        ),
        (
            "achieved cokernel missing from the direct-sum set",
            Box::new(|| {
                let f1: IntPoly = "t^3+t^2+3*t+27".parse().unwrap();
                let f2: IntPoly = "t+3".parse().unwrap();
                let set = conjecture_local_groups(&[f1, f2], 2).unwrap();
                let achieved = LocalGroupType::new(2, &[3, 4]).unwrap();
                let summand: GroupType = "Z/4".parse().unwrap();
                let as_full = GroupType::from_locals([achieved.clone()]).unwrap();
                set.conjectural
                    && set.groups.len() == 5
                    && !set.groups.contains(&achieved)
                    && as_full.subtract_summand(&summand).is_none()
            }),
        ),
    ];
    let mut all_pass = true;
    for (name, check) in &fixtures {
        let ok = check();
        all_pass &= ok;
        println!("{:<52} {}", name, if ok { "pass" } else { "FAIL" });
    }
    u8::from(!all_pass)
}
