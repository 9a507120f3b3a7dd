use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use rayon::prelude::*;
use serde_json::json;

use cs_core::cstriple::{dual, make_standard_matrix};
use cs_core::cubicorder::{
    ideal_from_triple, is_invertible, is_invertible_fast, ClassData, ClassVerdict, DEFAULT_BOUND_CAP,
};
use cs_core::enumerate::{mark_special, minimal_representatives};
use cs_core::families::{scan_families_with, scan_not_group_with, FamilyFilter, FamilyScanOptions, SolvedTraceSet};
use cs_core::gompf::{parse_chains, reduce_to_base, verify_chain, ReduceOptions};
use cs_core::CsTriple;

const EXIT_FALSE: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_INCONCLUSIVE: u8 = 3;

#[derive(Parser)]
#[command(name = "cs-toolkit", version, about = "Cappell-Shaneson triples, ideal classes and Gompf equivalence")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Common {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,
    /// Write results here instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    /// Worker threads for scans over primes or traces.
    #[arg(long, default_value_t = 1, global = true)]
    parallelism: usize,
    /// Largest coefficient bound for equivalence witness searches.
    #[arg(long, env = "CS_TOOLKIT_BOUND", default_value_t = DEFAULT_BOUND_CAP, global = true)]
    bound: u64,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Tsv,
}

#[derive(Clone, Copy, ValueEnum)]
enum FilterArg {
    Membership,
    EarlyExit,
}

#[derive(Subcommand)]
enum Cmd {
    /// Traces n in [min, max] for which C(Z[θₙ]) is not a group.
    ScanNotGroup {
        #[arg(long, allow_negative_numbers = true)]
        min: i64,
        #[arg(long, allow_negative_numbers = true)]
        max: i64,
    },
    /// Family solutions (c, p, n₀) for primes p ≤ pmax.
    Families {
        #[arg(long)]
        pmax: u64,
        /// Keep solutions congruent to a solved trace (default).
        #[arg(long, conflicts_with = "all")]
        solved_only: bool,
        /// Keep every solution.
        #[arg(long)]
        all: bool,
        /// How --solved-only treats later roots once one root fails.
        #[arg(long, value_enum, default_value_t = FilterArg::Membership)]
        filter: FilterArg,
    },
    /// Minimal class representatives for traces n..=trace-max.
    Reps {
        #[arg(long, allow_negative_numbers = true)]
        trace: i64,
        #[arg(long, allow_negative_numbers = true)]
        trace_max: Option<i64>,
        #[arg(long, default_value_t = 260)]
        d_max: u64,
    },
    /// Check every chain in a JSON chain file.
    VerifyChains { file: PathBuf },
    /// Validity, matrix, ideal and invertibility of a triple.
    Check {
        #[arg(num_args = 1..=3, allow_negative_numbers = true, required = true)]
        triple: Vec<String>,
    },
    /// Decide whether two triples at one trace have equivalent ideals.
    Equivalent {
        #[arg(num_args = 2..=6, allow_negative_numbers = true, required = true)]
        triples: Vec<String>,
    },
    /// Search for a chain to a triple with solved trace.
    Reduce {
        #[arg(num_args = 1..=3, allow_negative_numbers = true, required = true)]
        triple: Vec<String>,
        /// Maximum number of search nodes.
        #[arg(long, default_value_t = 64)]
        budget: usize,
        /// Largest d for similarity jumps.
        #[arg(long, default_value_t = 260)]
        d_max: u64,
    },
    /// The dual triple (p_n(c), d, 5 − n).
    Dual {
        #[arg(num_args = 1..=3, allow_negative_numbers = true, required = true)]
        triple: Vec<String>,
    },
}

struct Failure(u8, String);

type CmdResult = Result<u8, Failure>;

fn usage(msg: impl Into<String>) -> Failure {
    Failure(EXIT_USAGE, msg.into())
}

fn integers(args: &[String]) -> Result<Vec<BigInt>, Failure> {
    args.iter()
        .flat_map(|a| a.split(|ch: char| ch == ',' || ch.is_whitespace() || "()[]".contains(ch)))
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<BigInt>().map_err(|e| usage(format!("{s:?}: {e}"))))
        .collect()
}

fn triples(args: &[String], count: usize) -> Result<Vec<CsTriple>, Failure> {
    let v = integers(args)?;
    if v.len() != 3 * count {
        return Err(usage(format!("expected {} integers, got {}", 3 * count, v.len())));
    }
    v.chunks(3)
        .map(|c| CsTriple::new(c[0].clone(), c[1].clone(), c[2].clone()).map_err(|e| usage(e.to_string())))
        .collect()
}

fn line(out: &mut dyn Write, s: impl AsRef<str>) -> Result<(), Failure> {
    writeln!(out, "{}", s.as_ref()).map_err(|e| Failure(EXIT_USAGE, format!("write failed: {e}")))
}

fn run(cli: Cli, out: &mut dyn Write) -> CmdResult {
    let c = &cli.common;
    let tsv = c.format == Format::Tsv;
    let solved = SolvedTraceSet::default();
    match cli.cmd {
        Cmd::ScanNotGroup { min, max } => {
            if min > max {
                return Err(usage(format!("--min {min} exceeds --max {max}")));
            }
            for n in scan_not_group_with(min, max, c.parallelism, None) {
                line(out, if tsv { n.to_string() } else { json!({ "n": n }).to_string() })?;
            }
            Ok(0)
        }
        Cmd::Families { pmax, solved_only: _, all, filter } => {
            if pmax < 2 {
                return Err(usage("--pmax must be at least 2"));
            }
            let filter = match (all, filter) {
                (true, _) => FamilyFilter::All,
                (false, FilterArg::Membership) => FamilyFilter::Membership,
                (false, FilterArg::EarlyExit) => FamilyFilter::EarlyExit,
            };
            let opts = FamilyScanOptions { filter, parallelism: c.parallelism, ..FamilyScanOptions::new(pmax) };
            if tsv {
                line(out, "c\tp\tn0\twitness\tindex")?;
            }
            for s in scan_families_with(&opts, &solved) {
                line(out, if tsv { s.to_tsv() } else { serde_json::to_string(&s).expect("serialisable") })?;
            }
            Ok(0)
        }
        Cmd::Reps { trace, trace_max, d_max } => {
            let hi = trace_max.unwrap_or(trace);
            if hi < trace || d_max == 0 {
                return Err(usage("need trace ≤ trace-max and d-max ≥ 1"));
            }
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(c.parallelism.max(1))
                .build()
                .map_err(|e| usage(e.to_string()))?;
            let lists = pool.install(|| {
                (trace..=hi)
                    .into_par_iter()
                    .map(|n| minimal_representatives(&n.into(), d_max, c.bound, None).map(|l| mark_special(l, &solved)))
                    .collect::<Vec<_>>()
            });
            let mut code = 0;
            for l in lists {
                let l = l.map_err(|e| usage(e.to_string()))?;
                if !l.inconclusive_pairs.is_empty() {
                    code = EXIT_INCONCLUSIVE;
                }
                line(out, if tsv { l.to_tsv_line() } else { serde_json::to_string(&l).expect("serialisable") })?;
            }
            Ok(code)
        }
        Cmd::VerifyChains { file } => {
            let text = std::fs::read_to_string(&file).map_err(|e| usage(format!("{}: {e}", file.display())))?;
            let chains = parse_chains(&text).map_err(|e| usage(e.to_string()))?;
            let mut passed = 0;
            let mut code = 0;
            for ch in &chains {
                let r = verify_chain(ch, c.bound);
                if r.ok {
                    passed += 1;
                } else if r.is_inconclusive() && code == 0 {
                    code = EXIT_INCONCLUSIVE;
                } else {
                    code = EXIT_FALSE;
                }
                if tsv {
                    let why = r
                        .first_failure()
                        .map(|s| format!("step {}: {}", s.step, s.detail))
                        .or(r.start_error.clone())
                        .unwrap_or_default();
                    line(out, format!("{}\t{}\t{}", if r.ok { "pass" } else { "fail" }, ch, why))?;
                } else {
                    line(out, json!({ "chain": ch.to_string(), "report": r }).to_string())?;
                }
            }
            eprintln!("{passed}/{} chains pass", chains.len());
            Ok(code)
        }
        Cmd::Check { triple } => {
            let t = triples(&triple, 1)?.remove(0);
            let m = make_standard_matrix(&t).map_err(|e| usage(e.to_string()))?;
            let ideal = ideal_from_triple(&t);
            let inv = is_invertible(&ideal);
            let fast = is_invertible_fast(&t);
            let (num, den) = ideal.norm();
            let norm = if den == BigInt::from(1) { num.to_string() } else { format!("{num}/{den}") };
            if tsv {
                for (k, v) in [
                    ("triple", t.to_string()),
                    ("valid", "true".into()),
                    ("matrix", m.matrix().to_string()),
                    ("ideal_hnf", ideal.to_string()),
                    ("norm", norm),
                    ("invertible", inv.to_string()),
                    ("invertible_local", fast.to_string()),
                ] {
                    line(out, format!("{k}\t{v}"))?;
                }
            } else {
                line(
                    out,
                    json!({
                        "triple": t.to_string(),
                        "valid": true,
                        "matrix": m.matrix().to_string(),
                        "ideal": ideal.to_json(),
                        "norm": norm,
                        "invertible": inv,
                        "invertible_local": fast,
                    })
                    .to_string(),
                )?;
            }
            if inv != fast {
                return Err(Failure(EXIT_FALSE, "invertibility tests disagree".into()));
            }
            Ok(0)
        }
        Cmd::Equivalent { triples: args } => {
            let ts = triples(&args, 2)?;
            let (a, b) = (&ts[0], &ts[1]);
            if a.n() != b.n() {
                return Err(usage("triples must share the trace n"));
            }
            let v = ClassData::new(ideal_from_triple(a))
                .compare_escalating(&ClassData::new(ideal_from_triple(b)), c.bound)
                .map_err(|e| usage(e.to_string()))?;
            let (word, detail, code) = match &v {
                ClassVerdict::Equivalent { num, den } => {
                    let w: Vec<String> = num.iter().map(ToString::to_string).collect();
                    ("equivalent", format!("witness ({})/{den}", w.join(",")), 0)
                }
                ClassVerdict::NotEquivalent(sep) => ("not-equivalent", format!("{sep:?}"), EXIT_FALSE),
                ClassVerdict::Inconclusive { bound } => ("inconclusive", format!("bound {bound}"), EXIT_INCONCLUSIVE),
            };
            if tsv {
                line(out, format!("{a}\t{b}\t{word}\t{detail}"))?;
            } else {
                line(
                    out,
                    json!({ "a": a.to_string(), "b": b.to_string(), "verdict": word, "detail": detail }).to_string(),
                )?;
            }
            Ok(code)
        }
        Cmd::Reduce { triple, budget, d_max } => {
            let t = triples(&triple, 1)?.remove(0);
            let opts = ReduceOptions { budget, bound_cap: c.bound, d_max, cancel: None };
            match reduce_to_base(&t, &solved, &opts).map_err(|e| usage(e.to_string()))? {
                Some(ch) => {
                    line(out, if tsv { ch.to_string() } else { serde_json::to_string(&ch).expect("serialisable") })?;
                    Ok(0)
                }
                None => {
                    eprintln!("no chain found within budget {budget}");
                    Ok(EXIT_INCONCLUSIVE)
                }
            }
        }
        Cmd::Dual { triple } => {
            let t = triples(&triple, 1)?.remove(0);
            let d = dual(&t).map_err(|e| usage(e.to_string()))?;
            line(
                out,
                if tsv { d.to_string() } else { json!({ "triple": t.to_string(), "dual": d.to_string() }).to_string() },
            )?;
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    let mut out: Box<dyn Write> = match &cli.common.output {
        Some(p) => match File::create(p) {
            Ok(f) => Box::new(BufWriter::new(f)),
            Err(e) => {
                eprintln!("error: {}: {e}", p.display());
                return ExitCode::from(EXIT_USAGE);
            }
        },
        None => Box::new(BufWriter::new(io::stdout().lock())),
    };
    let code = match run(cli, &mut out) {
        Ok(code) => code,
        Err(Failure(code, msg)) => {
            eprintln!("error: {msg}");
            code
        }
    };
    if let Err(e) = out.flush() {
        eprintln!("error: {e}");
        return ExitCode::from(EXIT_USAGE);
    }
    ExitCode::from(code)
}
