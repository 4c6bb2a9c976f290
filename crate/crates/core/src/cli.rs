//! Command-line front end.
//!
//! Exit codes: 0 success, 2 invalid input, 3 unsupported query.

use std::ffi::OsString;
use std::io::Write;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::bundles::{
    canonical_class, known_equivalent, BundleClass, Equivalence, Family, Flavor, GaugeGroupId,
};
use crate::decompose::{decompose, LocalityRequest};
use crate::groups::{is_prime, UnknownReason};
use crate::homotopy::pi_of_expr;
use crate::surfaces::{enumerate, parse_triple, validate, SurfaceType};
use crate::tables::{emit_table1, emit_table2_instance, emit_table3_instance};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_UNSUPPORTED: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "realgauge",
    version,
    about = "Homotopy of gauge groups over Real surfaces"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FamilyArg {
    Real,
    Quat,
}

impl From<FamilyArg> for Family {
    fn from(f: FamilyArg) -> Self {
        match f {
            FamilyArg::Real => Family::Real,
            FamilyArg::Quat => Family::Quaternionic,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FlavorArg {
    Unpointed,
    Single,
    Multi,
}

impl From<FlavorArg> for Flavor {
    fn from(f: FlavorArg) -> Self {
        match f {
            FlavorArg::Unpointed => Flavor::Unpointed,
            FlavorArg::Single => Flavor::SinglePointed,
            FlavorArg::Multi => Flavor::MultiPointed,
        }
    }
}

#[derive(Debug, Args)]
struct IdArgs {
    #[arg(long, value_enum, default_value = "real")]
    family: FamilyArg,
    #[arg(long, value_enum, default_value = "multi")]
    flavor: FlavorArg,
    /// Weichold type as g,r,a
    #[arg(long = "type", value_name = "G,R,A")]
    surface: SurfaceType,
    /// Unitary rank: n for Real bundles, 2n for Quaternionic ones
    #[arg(long)]
    rank: u64,
    /// Real: c:w1w2...wr; Quaternionic: c. Defaults to the trivial class.
    #[arg(long, allow_hyphen_values = true)]
    class: Option<String>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check a triple against the Weichold classification
    Validate {
        #[arg(long = "type", value_name = "G,R,A")]
        surface: String,
        #[arg(long)]
        json: bool,
    },
    /// List all valid types up to a genus
    Enumerate {
        #[arg(long, default_value_t = 3)]
        g_max: u32,
        #[arg(long)]
        json: bool,
    },
    /// Canonical class and, optionally, comparison with another class
    Canonicalize {
        #[command(flatten)]
        id: IdArgs,
        #[arg(long, allow_hyphen_values = true)]
        against: Option<String>,
        #[arg(long)]
        json: bool,
    },
    /// Homotopy decomposition of a gauge group
    Decompose {
        #[command(flatten)]
        id: IdArgs,
        #[arg(long)]
        at_prime: Option<u64>,
        #[arg(long)]
        json: bool,
        #[arg(long)]
        explain: bool,
    },
    /// Homotopy group of a gauge group
    Pi {
        #[command(flatten)]
        id: IdArgs,
        #[arg(long)]
        degree: u32,
        #[arg(long)]
        at_prime: Option<u64>,
        #[arg(long)]
        json: bool,
        #[arg(long)]
        explain: bool,
    },
    /// Regenerate a table of homotopy groups
    Table {
        /// 1: low degrees; 2: Real high rank; 3: Quaternionic high rank
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=3))]
        which: u8,
        #[arg(long, value_enum, default_value = "real")]
        family: FamilyArg,
        #[arg(long)]
        rank: u64,
        #[arg(long, default_value_t = 3)]
        g_max: u32,
        #[arg(long = "type", value_name = "G,R,A")]
        surface: Option<SurfaceType>,
        #[arg(long, default_value_t = 0)]
        j: u32,
        #[arg(long)]
        json: bool,
    },
    /// Show every step used to decompose a gauge group
    Explain {
        #[command(flatten)]
        id: IdArgs,
        #[arg(long)]
        at_prime: Option<u64>,
    },
}

struct Failure {
    code: i32,
    message: String,
}

fn invalid(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_INVALID,
        message: message.into(),
    }
}

fn unsupported(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_UNSUPPORTED,
        message: message.into(),
    }
}

type Outcome = Result<i32, Failure>;

fn build_id(args: &IdArgs) -> Result<GaugeGroupId, Failure> {
    let family: Family = args.family.into();
    let class = match &args.class {
        Some(spec) => {
            BundleClass::parse(spec, family).map_err(|e| invalid(format!("--class: {e}")))?
        }
        None => BundleClass::zero(family, &args.surface),
    };
    GaugeGroupId::new(family, args.flavor.into(), args.surface, class, args.rank)
        .map_err(|e| invalid(format!("--class/--rank: {e}")))
}

fn request(at_prime: Option<u64>) -> Result<LocalityRequest, Failure> {
    match at_prime {
        None => Ok(LocalityRequest::Integral),
        Some(p) if is_prime(p) => Ok(LocalityRequest::AtPrime(p)),
        Some(p) => Err(invalid(format!("--at-prime: {p} is not prime"))),
    }
}

fn to_json(value: &impl serde::Serialize) -> String {
    serde_json::to_string_pretty(value).expect("serializable")
}

/// Runs the CLI on `args` (including the program name), writing data to `out`
/// and diagnostics to `err`. Returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() {
                EXIT_INVALID
            } else {
                EXIT_OK
            };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                write!(err, "{text}")
            } else {
                write!(out, "{text}")
            };
            return code;
        }
    };
    match dispatch(cli.command, out) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn dispatch(command: Command, out: &mut dyn Write) -> Outcome {
    let mut emit = |text: String| {
        let _ = writeln!(out, "{text}");
    };
    match command {
        Command::Validate { surface, json } => {
            let (g, r, a) = parse_triple(&surface).map_err(|e| invalid(format!("--type: {e}")))?;
            let verdict = validate(g, r, a);
            if json {
                emit(to_json(&json!({
                    "valid": verdict.is_ok(),
                    "reason": verdict.err().map(|v| v.to_string()),
                })));
            } else {
                emit(match verdict {
                    Ok(()) => "valid".to_string(),
                    Err(v) => format!("invalid: {v}"),
                });
            }
            Ok(if verdict.is_ok() {
                EXIT_OK
            } else {
                EXIT_INVALID
            })
        }
        Command::Enumerate { g_max, json } => {
            let types = enumerate(g_max);
            if json {
                emit(to_json(&types));
            } else {
                for t in types {
                    emit(t.to_string());
                }
            }
            Ok(EXIT_OK)
        }
        Command::Canonicalize { id, against, json } => {
            let gid = build_id(&id)?;
            let (class, steps) = canonical_class(&gid);
            let steps: Vec<&str> = steps.iter().map(|j| j.id()).collect();
            let equivalence = match against {
                None => None,
                Some(spec) => {
                    let other_class = BundleClass::parse(&spec, gid.family())
                        .map_err(|e| invalid(format!("--against: {e}")))?;
                    let other = gid
                        .with_class(other_class)
                        .map_err(|e| invalid(format!("--against: {e}")))?;
                    Some(known_equivalent(&gid, &other).map_err(|e| invalid(e.to_string()))?)
                }
            };
            let eq_text = equivalence.as_ref().map(|e| match e {
                Equivalence::Equivalent(via) => {
                    let via: Vec<&str> = via.iter().map(|j| j.id()).collect();
                    if via.is_empty() {
                        "equivalent (identical classes)".to_string()
                    } else {
                        format!("equivalent via {}", via.join(", "))
                    }
                }
                Equivalence::Unknown => "unknown".to_string(),
            });
            if json {
                emit(to_json(&json!({
                    "class": class.spec(),
                    "justifications": steps,
                    "equivalence": eq_text,
                })));
            } else {
                emit(format!("{} [{}]", class.spec(), steps.join(", ")));
                if let Some(t) = eq_text {
                    emit(t);
                }
            }
            Ok(EXIT_OK)
        }
        Command::Decompose {
            id,
            at_prime,
            json,
            explain,
        } => {
            let gid = build_id(&id)?;
            let req = request(at_prime)?;
            let expr = decompose(&gid, req).map_err(|e| invalid(e.to_string()))?;
            if json {
                let rules: Vec<&str> = expr.provenance().iter().map(|r| r.rule.as_str()).collect();
                emit(to_json(
                    &json!({ "expr": expr.factors(), "provenance": rules }),
                ));
            } else {
                emit(expr.render());
                if explain {
                    for step in expr.provenance() {
                        emit(format!("  {step}"));
                    }
                }
            }
            Ok(EXIT_OK)
        }
        Command::Pi {
            id,
            degree,
            at_prime,
            json,
            explain,
        } => {
            let gid = build_id(&id)?;
            let req = request(at_prime)?;
            let expr = decompose(&gid, req).map_err(|e| invalid(e.to_string()))?;
            let ans = pi_of_expr(&expr, degree, gid.family(), gid.rank(), req);
            if json {
                emit(to_json(&ans));
            } else {
                emit(ans.to_string());
                if explain {
                    emit(format!("  via {}", expr.render()));
                    for step in expr.provenance() {
                        emit(format!("  {step}"));
                    }
                }
            }
            if ans
                .unknowns()
                .iter()
                .any(|u| u.reason == UnknownReason::OutOfStableRange)
            {
                return Err(unsupported(format!(
                    "degree {degree} is outside the stable range for rank {}",
                    gid.rank()
                )));
            }
            Ok(EXIT_OK)
        }
        Command::Table {
            which,
            family,
            rank,
            g_max,
            surface,
            j,
            json,
        } => {
            if which == 1 {
                let table = emit_table1(family.into(), rank, g_max)
                    .map_err(|e| unsupported(e.to_string()))?;
                emit(if json {
                    to_json(&table)
                } else {
                    table.to_markdown()
                });
                return Ok(EXIT_OK);
            }
            let t = surface.ok_or_else(|| invalid("--type is required for tables 2 and 3"))?;
            let inst = if which == 2 {
                emit_table2_instance(t, rank, j)
            } else {
                emit_table3_instance(t, rank, j)
            }
            .map_err(|e| unsupported(e.to_string()))?;
            emit(if json {
                to_json(&inst)
            } else {
                inst.to_markdown()
            });
            Ok(EXIT_OK)
        }
        Command::Explain { id, at_prime } => {
            let gid = build_id(&id)?;
            let req = request(at_prime)?;
            let (class, steps) = canonical_class(&gid);
            let steps: Vec<&str> = steps.iter().map(|j| j.id()).collect();
            emit(format!(
                "class {} -> {} [{}]",
                gid.class().spec(),
                class.spec(),
                steps.join(", ")
            ));
            let expr = decompose(&gid, req).map_err(|e| invalid(e.to_string()))?;
            for (i, step) in expr.provenance().iter().enumerate() {
                emit(format!("{}. {}", i + 1, step.rule));
                emit(format!("   on {}", step.target));
                for (cond, held) in &step.conditions {
                    emit(format!("   {} {cond}", if *held { "[x]" } else { "[ ]" }));
                }
            }
            emit(format!("result: {}", expr.render()));
            Ok(EXIT_OK)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_str(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(
            std::iter::once("realgauge").chain(args.iter().copied()),
            &mut out,
            &mut err,
        );
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn pi_table_one() {
        let (code, out, _) = run_str(&[
            "pi", "--family", "real", "--flavor", "multi", "--type", "3,2,0", "--rank", "5",
            "--degree", "0",
        ]);
        assert_eq!(code, 0);
        assert_eq!(out.trim(), "Z^3 x Z/2^2");
    }

    #[test]
    fn validate_invalid() {
        let (code, out, _) = run_str(&["validate", "--type", "2,2,0"]);
        assert_eq!(code, 2);
        assert_eq!(out.trim(), "invalid: r != g+1 mod 2");
    }

    #[test]
    fn bad_prime_names_flag() {
        let (code, _, err) = run_str(&[
            "decompose",
            "--type",
            "1,1,1",
            "--rank",
            "5",
            "--at-prime",
            "4",
        ]);
        assert_eq!(code, 2);
        assert!(err.contains("--at-prime"));
    }

    #[test]
    fn negative_class() {
        let (code, out, _) = run_str(&[
            "canonicalize",
            "--flavor",
            "unpointed",
            "--type",
            "0,1,0",
            "--rank",
            "3",
            "--class",
            "-1:1",
        ]);
        assert_eq!(code, 0);
        assert!(out.starts_with("5:1"), "{out}");
    }
}
