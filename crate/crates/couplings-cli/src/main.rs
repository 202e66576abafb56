//! `couplings` — command-line access to exact coupling computations.
//!
//! Distributions enter as comma-separated exact rationals (`1/6,1/3,1/2`)
//! or as paths to JSON files (`{"masses": ["1/6", "1/3", "1/2"]}`).
//! Results leave as JSON (default) or CSV; coupling matrices print in CSV
//! as one row per line with exact `num/den` cells.
//!
//! Exit codes: `0` on success (a NO answer from a decision subcommand is
//! still success), `2` on usage or input errors, `3` when a search or
//! enumeration budget is exceeded.

mod formats;

use clap::{Parser, Subcommand, ValueEnum};
use couplings::measures::{
    kl_divergence, renyi_entropy, shannon_entropy, total_variation,
};
use couplings::metrics::{bound_report, delta_lower};
use couplings::reductions::{
    partition_outcome, subset_sum_outcome, three_partition_outcome, ReductionOutcome,
    SubsetSumInstance, ThreePartitionInstance,
};
use couplings::solve::{
    max_dependence, maximal_coupling, min_entropy_coupling_exact_with_budget,
    min_entropy_coupling_greedy, optimal_channel_with_budget, Certificate,
    DEFAULT_CHANNEL_BUDGET, DEFAULT_SEARCH_BUDGET,
};
use couplings::unbounded::{divergence_trace, UnboundedFamilyParams};
use couplings::{Dist, LogBase, OrderAlpha, PNorm};
use formats::{
    dist_to_json, format_rational, joint_to_csv, joint_to_json, load_dist,
};
use serde_json::json;
use std::fmt::Write as _;
use std::process::ExitCode;

/// Tolerance used when reporting whether every bound in a chain holds.
const BOUND_TOL: f64 = 1e-9;

#[derive(Parser)]
#[command(
    name = "couplings",
    version,
    about = "Exact couplings of finite rational distributions: entropies, \
             optimal couplings, pseudometrics, decision reductions",
    propagate_version = true
)]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,

    /// Worker threads to allow. Execution is deterministic and currently
    /// single-threaded; the value is validated and otherwise ignored, and
    /// results never depend on it.
    #[arg(long, default_value_t = 1, global = true)]
    threads: usize,

    #[command(subcommand)]
    command: Cmd,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Cmd {
    /// Shannon entropy of a distribution.
    Entropy {
        /// Distribution: inline rationals `1/6,1/3,1/2` or a JSON file path.
        #[arg(long)]
        p: String,
        /// Logarithm base.
        #[arg(long, default_value_t = 2.0)]
        base: f64,
    },
    /// Rényi entropy of a distribution at order alpha.
    Renyi {
        /// Distribution: inline rationals or a JSON file path.
        #[arg(long)]
        p: String,
        /// Entropy order: a nonnegative number, or `inf` (min-entropy).
        /// `0` gives the support size's log, `1` the Shannon entropy.
        #[arg(long)]
        alpha: String,
        /// Logarithm base.
        #[arg(long, default_value_t = 2.0)]
        base: f64,
    },
    /// Exact total variation distance between two distributions.
    Tv {
        /// First distribution.
        #[arg(long)]
        p: String,
        /// Second distribution.
        #[arg(long)]
        q: String,
    },
    /// Kullback-Leibler divergence D(P || Q); `"inf"` when the support of
    /// P escapes the support of Q.
    Kl {
        /// First distribution.
        #[arg(long)]
        p: String,
        /// Second distribution.
        #[arg(long)]
        q: String,
        /// Logarithm base.
        #[arg(long, default_value_t = 2.0)]
        base: f64,
    },
    /// Minimum-entropy coupling of two distributions (exact by default).
    Mec {
        /// First marginal.
        #[arg(long)]
        p: String,
        /// Second marginal.
        #[arg(long)]
        q: String,
        /// Entropy order: a nonnegative number or `inf`.
        #[arg(long, default_value = "1")]
        alpha: String,
        /// Logarithm base.
        #[arg(long, default_value_t = 2.0)]
        base: f64,
        /// Cap on explored search vertices before giving up (exit code 3).
        #[arg(long, default_value_t = DEFAULT_SEARCH_BUDGET)]
        vertex_cap: usize,
        /// Use the fast greedy heuristic instead of the exact search
        /// (Shannon order only; the result is an upper bound).
        #[arg(long)]
        greedy: bool,
    },
    /// Maximal coupling: minimizes the mismatch probability P(X != Y),
    /// which equals the total variation distance.
    Maximal {
        /// First marginal.
        #[arg(long)]
        p: String,
        /// Second marginal.
        #[arg(long)]
        q: String,
    },
    /// Entropy-pseudometric lower distance between two distributions:
    /// the p-norm of (H(S)-H(X), H(S)-H(Y)) minimized over couplings S.
    Delta {
        /// First distribution.
        #[arg(long)]
        p: String,
        /// Second distribution.
        #[arg(long)]
        q: String,
        /// Norm order: a number >= 1, or `inf` (maximum norm).
        #[arg(long, default_value = "1")]
        pnorm: String,
        /// Logarithm base.
        #[arg(long, default_value_t = 2.0)]
        base: f64,
    },
    /// Evaluate the chain of entropy-distance bounds between two
    /// distributions and report each inequality with its slack.
    Bounds {
        /// First distribution.
        #[arg(long)]
        p: String,
        /// Second distribution.
        #[arg(long)]
        q: String,
        /// Logarithm base.
        #[arg(long, default_value_t = 2.0)]
        base: f64,
    },
    /// Deterministic channel from a distribution onto m output symbols
    /// maximizing mutual information (exhaustive over assignments).
    Channel {
        /// Input distribution.
        #[arg(long)]
        p: String,
        /// Number of output symbols.
        #[arg(long)]
        m: usize,
        /// Logarithm base.
        #[arg(long, default_value_t = 2.0)]
        base: f64,
        /// Cap on enumerated assignments before giving up (exit code 3).
        #[arg(long, default_value_t = DEFAULT_CHANNEL_BUDGET)]
        budget: u64,
    },
    /// Maximal normalized dependence attainable by coupling two
    /// distributions: max I(X;Y) / min(H(X), H(Y)).
    Maxdep {
        /// First marginal.
        #[arg(long)]
        p: String,
        /// Second marginal.
        #[arg(long)]
        q: String,
        /// Logarithm base.
        #[arg(long, default_value_t = 2.0)]
        base: f64,
    },
    /// Decide classical NP-hard instances by optimizing over couplings;
    /// answers are certified by exact support structure.
    Reduce {
        #[command(subcommand)]
        problem: ReduceCmd,
    },
    /// Trace a family of couplings whose order-alpha entropy grows without
    /// bound while the marginal entropy stays fixed and finite.
    Counterexample {
        /// Entropy order; must satisfy 0 < alpha < 1.
        #[arg(long, default_value_t = 0.4)]
        alpha: f64,
        /// Marginal power-law exponent (weights proportional to i^-beta);
        /// must satisfy beta > 1 and alpha*beta > 1.
        #[arg(long, default_value_t = 3.0)]
        beta: f64,
        /// Corner-layer decay exponent; must satisfy r > 1 and
        /// r + beta < 2/alpha.
        #[arg(long, default_value_t = 1.5)]
        r: f64,
        /// Strictly increasing stage sizes, comma-separated.
        #[arg(long, default_value = "10,100,1000")]
        stages: String,
        /// Marginal support size (defaults to the last stage).
        #[arg(long)]
        truncation: Option<usize>,
        /// Logarithm base.
        #[arg(long, default_value_t = 2.0)]
        base: f64,
    },
}

#[derive(Subcommand)]
enum ReduceCmd {
    /// Subset sum: is there a subset of the weights summing to the target?
    SubsetSum {
        /// Positive integer weights, comma-separated.
        #[arg(long)]
        weights: String,
        /// Target sum, strictly between 0 and the total.
        #[arg(long)]
        target: u64,
        /// Cap on explored search vertices before giving up (exit code 3).
        #[arg(long, default_value_t = DEFAULT_SEARCH_BUDGET)]
        vertex_cap: usize,
    },
    /// Partition: can the weights split into two sides of equal sum?
    Partition {
        /// Positive integer weights, comma-separated.
        #[arg(long)]
        weights: String,
        /// Cap on enumerated assignments before giving up (exit code 3).
        #[arg(long, default_value_t = DEFAULT_CHANNEL_BUDGET)]
        budget: u64,
    },
    /// 3-partition: can 3m weights, each strictly between k/4 and k/2,
    /// split into m triples each summing to k?
    #[command(name = "3partition")]
    ThreePartition {
        /// Positive integer weights, comma-separated; length a multiple
        /// of three, total m*k.
        #[arg(long)]
        weights: String,
        /// Per-group target sum k.
        #[arg(long)]
        k: u64,
        /// Cap on enumerated assignments before giving up (exit code 3).
        #[arg(long, default_value_t = DEFAULT_CHANNEL_BUDGET)]
        budget: u64,
    },
}

/// A failed run: message for stderr plus the process exit code.
#[derive(Debug)]
struct Failure {
    message: String,
    code: u8,
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        message: message.into(),
        code: 2,
    }
}

fn lib_failure(err: couplings::Error) -> Failure {
    let code = match err {
        couplings::Error::VertexCapExceeded { .. }
        | couplings::Error::BudgetExceeded { .. } => 3,
        _ => 2,
    };
    Failure {
        message: err.to_string(),
        code,
    }
}

/// A successful run rendered in both output formats.
struct Rendered {
    json: serde_json::Value,
    csv: String,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        // clap exits 2 on usage errors and 0 for --help/--version.
        Err(e) => e.exit(),
    };
    if cli.threads == 0 {
        report("--threads: must be at least 1");
        return ExitCode::from(2);
    }
    match run(&cli.command) {
        Ok(rendered) => {
            let text = match cli.format {
                Format::Json => {
                    let mut s = serde_json::to_string_pretty(&rendered.json)
                        .expect("rendered values contain only finite numbers and strings");
                    s.push('\n');
                    s
                }
                Format::Csv => rendered.csv,
            };
            emit(&text)
        }
        Err(failure) => {
            report(&failure.message);
            ExitCode::from(failure.code)
        }
    }
}

/// Write the result to stdout. A broken pipe (the reader went away, as
/// under `couplings ... | head`) is a quiet success, not a panic; other
/// write failures are reported as a generic failure.
fn emit(text: &str) -> ExitCode {
    use std::io::Write as _;
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    let result = lock.write_all(text.as_bytes()).and_then(|()| lock.flush());
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(e) => {
            report(&format!("cannot write to stdout: {e}"));
            ExitCode::from(1)
        }
    }
}

/// Best-effort error reporting: never panics, even when stderr is gone.
fn report(message: &str) {
    use std::io::Write as _;
    let _ = writeln!(std::io::stderr(), "error: {message}");
}

fn run(cmd: &Cmd) -> Result<Rendered, Failure> {
    match cmd {
        Cmd::Entropy { p, base } => {
            let p = dist_arg("--p", p)?;
            let base = base_arg(*base)?;
            let h = shannon_entropy(&p, base);
            Ok(Rendered {
                json: json!({ "entropy": h, "base": base.value() }),
                csv: format!("entropy,{h}\n"),
            })
        }
        Cmd::Renyi { p, alpha, base } => {
            let p = dist_arg("--p", p)?;
            let alpha = alpha_arg(alpha)?;
            let base = base_arg(*base)?;
            let h = renyi_entropy(&p, alpha, base);
            Ok(Rendered {
                json: json!({
                    "entropy": h,
                    "alpha": alpha_echo(alpha),
                    "base": base.value(),
                }),
                csv: format!("entropy,{h}\n"),
            })
        }
        Cmd::Tv { p, q } => {
            let p = dist_arg("--p", p)?;
            let q = dist_arg("--q", q)?;
            let tv = format_rational(&total_variation(&p, &q));
            Ok(Rendered {
                json: json!({ "tv": tv }),
                csv: format!("tv,{tv}\n"),
            })
        }
        Cmd::Kl { p, q, base } => {
            let p = dist_arg("--p", p)?;
            let q = dist_arg("--q", q)?;
            let base = base_arg(*base)?;
            let kl = kl_divergence(&p, &q, base).map_err(lib_failure)?;
            // JSON has no literal for infinity, so an unbounded divergence
            // is reported as the string "inf".
            let value = if kl.is_finite() {
                json!(kl)
            } else {
                json!("inf")
            };
            Ok(Rendered {
                json: json!({ "kl": value }),
                csv: format!("kl,{kl}\n"),
            })
        }
        Cmd::Mec {
            p,
            q,
            alpha,
            base,
            vertex_cap,
            greedy,
        } => {
            let p = dist_arg("--p", p)?;
            let q = dist_arg("--q", q)?;
            let alpha = alpha_arg(alpha)?;
            let base = base_arg(*base)?;
            let sol = if *greedy {
                if !alpha.is_shannon() {
                    return Err(usage(
                        "--greedy: the greedy heuristic supports only --alpha 1",
                    ));
                }
                min_entropy_coupling_greedy(&p, &q, base)
            } else {
                min_entropy_coupling_exact_with_budget(&p, &q, alpha, base, *vertex_cap)
                    .map_err(lib_failure)?
            };
            Ok(Rendered {
                json: json!({
                    "coupling": joint_to_json(&sol.coupling),
                    "objective": sol.objective_value,
                    "alpha": alpha_echo(alpha),
                    "base": base.value(),
                    "vertex": sol.vertex,
                    "certificate": certificate_label(sol.certificate),
                }),
                csv: joint_to_csv(&sol.coupling),
            })
        }
        Cmd::Maximal { p, q } => {
            let p = dist_arg("--p", p)?;
            let q = dist_arg("--q", q)?;
            let sol = maximal_coupling(&p, &q);
            let mismatch = format_rational(&total_variation(&p, &q));
            Ok(Rendered {
                json: json!({
                    "coupling": joint_to_json(&sol.coupling),
                    "mismatch": mismatch,
                    "objective": sol.objective_value,
                    "vertex": sol.vertex,
                    "certificate": certificate_label(sol.certificate),
                }),
                csv: joint_to_csv(&sol.coupling),
            })
        }
        Cmd::Delta { p, q, pnorm, base } => {
            let p = dist_arg("--p", p)?;
            let q = dist_arg("--q", q)?;
            let norm = pnorm_arg(pnorm)?;
            let base = base_arg(*base)?;
            let value = delta_lower(&p, &q, norm, base).map_err(lib_failure)?;
            Ok(Rendered {
                json: json!({
                    "delta": value,
                    "pnorm": pnorm_echo(norm),
                    "base": base.value(),
                }),
                csv: format!("delta,{value}\n"),
            })
        }
        Cmd::Bounds { p, q, base } => {
            let p = dist_arg("--p", p)?;
            let q = dist_arg("--q", q)?;
            let base = base_arg(*base)?;
            let report = bound_report(&p, &q, base).map_err(lib_failure)?;
            let entries: Vec<serde_json::Value> = report
                .entries()
                .iter()
                .map(|e| {
                    json!({
                        "name": e.name,
                        "left": e.left,
                        "right": e.right,
                        "slack": e.slack(),
                    })
                })
                .collect();
            let mut csv = String::from("name,left,right,slack\n");
            for e in report.entries() {
                let _ = writeln!(csv, "{},{},{},{}", e.name, e.left, e.right, e.slack());
            }
            Ok(Rendered {
                json: json!({
                    "entries": entries,
                    "all_hold": report.all_hold(BOUND_TOL),
                }),
                csv,
            })
        }
        Cmd::Channel { p, m, base, budget } => {
            let p = dist_arg("--p", p)?;
            let base = base_arg(*base)?;
            let sol =
                optimal_channel_with_budget(&p, *m, base, *budget).map_err(lib_failure)?;
            let (_, induced) = sol.coupling.marginals();
            Ok(Rendered {
                json: json!({
                    "assignment": joint_to_json(&sol.coupling),
                    "objective": sol.objective_value,
                    "induced": dist_to_json(&induced),
                    "base": base.value(),
                    "certificate": certificate_label(sol.certificate),
                }),
                csv: joint_to_csv(&sol.coupling),
            })
        }
        Cmd::Maxdep { p, q, base } => {
            let p = dist_arg("--p", p)?;
            let q = dist_arg("--q", q)?;
            let base = base_arg(*base)?;
            let value = max_dependence(&p, &q, base).map_err(lib_failure)?;
            Ok(Rendered {
                json: json!({ "max_dependence": value }),
                csv: format!("max_dependence,{value}\n"),
            })
        }
        Cmd::Reduce { problem } => run_reduce(problem),
        Cmd::Counterexample {
            alpha,
            beta,
            r,
            stages,
            truncation,
            base,
        } => {
            let params =
                UnboundedFamilyParams::new(*alpha, *beta, *r).map_err(lib_failure)?;
            let stages = parse_index_list("--stages", stages)?;
            let truncation = truncation
                .unwrap_or_else(|| stages.last().copied().unwrap_or(1));
            let base = base_arg(*base)?;
            let rows =
                divergence_trace(&params, &stages, truncation, base).map_err(lib_failure)?;
            let json_rows: Vec<serde_json::Value> = rows
                .iter()
                .map(|row| {
                    json!({
                        "n": row.n,
                        "h_alpha": row.coupling_entropy,
                        "lower_bound": row.lower_bound,
                        "h_alpha_marginal": row.marginal_entropy,
                    })
                })
                .collect();
            let mut csv = String::from("n,H_alpha,lower_bound,H_alpha_P\n");
            for row in &rows {
                let _ = writeln!(
                    csv,
                    "{},{},{},{}",
                    row.n, row.coupling_entropy, row.lower_bound, row.marginal_entropy
                );
            }
            Ok(Rendered {
                json: json!({
                    "alpha": *alpha,
                    "beta": *beta,
                    "r": *r,
                    "truncation": truncation,
                    "rows": json_rows,
                }),
                csv,
            })
        }
    }
}

fn run_reduce(problem: &ReduceCmd) -> Result<Rendered, Failure> {
    match problem {
        ReduceCmd::SubsetSum {
            weights,
            target,
            vertex_cap,
        } => {
            let weights = parse_weights("--weights", weights)?;
            let inst = SubsetSumInstance::new(weights.clone(), *target)
                .map_err(|e| usage(format!("--weights/--target: {e}")))?;
            let outcome = subset_sum_outcome(&inst, *vertex_cap).map_err(lib_failure)?;
            let certificate = outcome.selection().map(|rows| {
                let subset: Vec<u64> = rows.iter().map(|&i| weights[i]).collect();
                json!({ "subset": subset, "sum": *target })
            });
            Ok(render_decision(&outcome, "subset", certificate))
        }
        ReduceCmd::Partition { weights, budget } => {
            let weights = parse_weights("--weights", weights)?;
            let outcome = partition_outcome(&weights, *budget).map_err(|e| match e {
                couplings::Error::InvariantViolation(_) | couplings::Error::ZeroLength => {
                    usage(format!("--weights: {e}"))
                }
                other => lib_failure(other),
            })?;
            let certificate = outcome.selection().map(|side| {
                let chosen: Vec<u64> = side.iter().map(|&i| weights[i]).collect();
                let rest: Vec<u64> = (0..weights.len())
                    .filter(|i| !side.contains(i))
                    .map(|i| weights[i])
                    .collect();
                json!({ "sides": [chosen, rest] })
            });
            Ok(render_decision(&outcome, "sides", certificate))
        }
        ReduceCmd::ThreePartition { weights, k, budget } => {
            let weights = parse_weights("--weights", weights)?;
            let inst = ThreePartitionInstance::new(weights.clone(), *k)
                .map_err(|e| usage(format!("--weights/--k: {e}")))?;
            let outcome = three_partition_outcome(&inst, *budget).map_err(lib_failure)?;
            let certificate = outcome.selection().map(|assignment| {
                let mut groups: Vec<Vec<u64>> = vec![Vec::new(); inst.groups()];
                for (i, &g) in assignment.iter().enumerate() {
                    groups[g].push(weights[i]);
                }
                json!({ "groups": groups })
            });
            Ok(render_decision(&outcome, "groups", certificate))
        }
    }
}

/// Decision output: `{"answer": ..., "certificate": ...}` in JSON; in CSV
/// an `answer` line followed, on YES, by the witness weights.
fn render_decision(
    outcome: &ReductionOutcome,
    label: &str,
    certificate: Option<serde_json::Value>,
) -> Rendered {
    let mut csv = format!("answer,{}\n", outcome.answer());
    if let Some(cert) = &certificate {
        let _ = writeln!(csv, "{label},{}", csv_flatten(&cert[label]));
    }
    Rendered {
        json: json!({
            "answer": outcome.answer(),
            "certificate": certificate.unwrap_or(serde_json::Value::Null),
        }),
        csv,
    }
}

/// Flatten a JSON array of numbers (or of arrays of numbers) into CSV
/// cells; nested groups join with `;` inside one cell.
fn csv_flatten(value: &serde_json::Value) -> String {
    match value {
        serde_json::Value::Array(items) => items
            .iter()
            .map(|item| match item {
                serde_json::Value::Array(inner) => inner
                    .iter()
                    .map(|x| x.to_string())
                    .collect::<Vec<_>>()
                    .join(";"),
                other => other.to_string(),
            })
            .collect::<Vec<_>>()
            .join(","),
        other => other.to_string(),
    }
}

fn certificate_label(certificate: Certificate) -> &'static str {
    match certificate {
        Certificate::Exact => "exact",
        Certificate::Heuristic => "heuristic",
    }
}

fn dist_arg(flag: &str, source: &str) -> Result<Dist, Failure> {
    load_dist(source).map_err(|msg| usage(format!("{flag}: {msg}")))
}

fn base_arg(value: f64) -> Result<LogBase, Failure> {
    LogBase::new(value).map_err(|e| usage(format!("--base: {e}")))
}

fn alpha_arg(text: &str) -> Result<OrderAlpha, Failure> {
    if text.eq_ignore_ascii_case("inf") || text.eq_ignore_ascii_case("infinity") {
        return Ok(OrderAlpha::INFINITY);
    }
    let value: f64 = text
        .parse()
        .map_err(|_| usage(format!("--alpha: `{text}` is not a number or `inf`")))?;
    OrderAlpha::new(value).map_err(|e| usage(format!("--alpha: {e}")))
}

fn alpha_echo(alpha: OrderAlpha) -> serde_json::Value {
    if alpha.is_infinite() {
        json!("inf")
    } else {
        json!(alpha.value())
    }
}

fn pnorm_arg(text: &str) -> Result<PNorm, Failure> {
    if text.eq_ignore_ascii_case("inf") || text.eq_ignore_ascii_case("infinity") {
        return Ok(PNorm::INFINITY);
    }
    let value: f64 = text
        .parse()
        .map_err(|_| usage(format!("--pnorm: `{text}` is not a number or `inf`")))?;
    PNorm::new(value).map_err(|e| usage(format!("--pnorm: {e}")))
}

fn pnorm_echo(norm: PNorm) -> serde_json::Value {
    if norm.is_infinite() {
        json!("inf")
    } else {
        json!(norm.value())
    }
}

fn parse_weights(flag: &str, text: &str) -> Result<Vec<u64>, Failure> {
    text.split(',')
        .map(|token| {
            token
                .trim()
                .parse::<u64>()
                .map_err(|_| usage(format!("{flag}: `{token}` is not a positive integer")))
        })
        .collect()
}

fn parse_index_list(flag: &str, text: &str) -> Result<Vec<usize>, Failure> {
    text.split(',')
        .map(|token| {
            token
                .trim()
                .parse::<usize>()
                .map_err(|_| usage(format!("{flag}: `{token}` is not a positive integer")))
        })
        .collect()
}
