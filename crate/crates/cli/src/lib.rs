//! The `klball` command line: single evaluations as JSON, sweeps as CSV.
//!
//! Exit codes: 0 on success, 2 for usage or input errors, 3 when a support
//! exceeds the enumeration limit, 1 for anything else.

use std::ffi::OsString;
use std::io::{self, Read, Write};
use std::path::Path;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use klball::{
    balance_exact_with_limit, balance_greedy, binary_tail_exact, dstar_with, kl2, kl_divergence, lambda_n,
    mcdiarmid_bound, monte_carlo, ow_lower_from_beta, parse_weights, pinsker_lower, total_variation, vajda_invert,
    BalanceMethod, BalanceReport, BinaryDistribution, DStarMethod, DStarOptions, DiscreteDistribution, MethodChoice,
    SimConfig, DEFAULT_K_MAX, HARD_K_MAX,
};

pub mod format;
pub mod sweep;

use format::{cell, number, to_json};
use sweep::{Range, SweepSpec, SweepVariable};

/// Environment variable overriding the default enumeration limit.
pub const K_MAX_ENV: &str = "KLBALL_K_MAX";

#[derive(Debug, Parser)]
#[command(
    name = "klball",
    version,
    about = "Minimum KL divergence outside a total-variation ball"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct DistArgs {
    /// Weights as `0.7,0.3`, a JSON array, a file (one weight per line or a
    /// JSON array), or `-` for stdin.
    #[arg(long, allow_hyphen_values = true)]
    dist: String,
    /// Rescale weights to sum to one instead of rejecting them.
    #[arg(long)]
    renormalize: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MethodArg {
    Auto,
    Enumerate,
    Closed,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Total variation and KL divergence D(P‖Q).
    Divergence {
        #[arg(long, allow_hyphen_values = true)]
        p: String,
        #[arg(long, allow_hyphen_values = true)]
        q: String,
        #[arg(long)]
        renormalize: bool,
    },
    /// D*(v, Q): the smallest D(P‖Q) with V(P, Q) ≥ v.
    Dstar {
        #[command(flatten)]
        dist: DistArgs,
        #[arg(long)]
        v: f64,
        /// Treat Q as non-atomic, giving Vajda's L(v).
        #[arg(long)]
        full_range: bool,
        #[arg(long, value_enum, default_value_t = MethodArg::Auto)]
        method: MethodArg,
        /// Include the minimizing distribution P*.
        #[arg(long)]
        emit_extremal: bool,
        #[arg(long)]
        k_max: Option<usize>,
    },
    /// Balance coefficient β and φ(β).
    Balance {
        #[command(flatten)]
        dist: DistArgs,
        /// Report the greedy upper bound even when β is enumerable.
        #[arg(long)]
        greedy: bool,
        #[arg(long)]
        k_max: Option<usize>,
    },
    /// Vajda's curve L(v) at one point (JSON) or over a grid (CSV).
    Vajda {
        #[arg(long, conflicts_with = "grid", required_unless_present = "grid")]
        v: Option<f64>,
        /// start:stop:step
        #[arg(long)]
        grid: Option<Range>,
    },
    /// CSV of lower bounds, D* and the closed-form upper bound.
    Bounds {
        /// Required for a `v` sweep; a `beta` sweep uses Q = (β, 1−β).
        #[arg(long, allow_hyphen_values = true)]
        dist: Option<String>,
        #[arg(long)]
        renormalize: bool,
        /// `v=start:stop:step` or `beta=start:stop:step`.
        #[arg(long, default_value = "v=0.05:1.95:0.05")]
        sweep: SweepSpec,
        /// Fixed v for a `beta` sweep.
        #[arg(long)]
        v: Option<f64>,
        #[arg(long)]
        k_max: Option<usize>,
    },
    /// Monte Carlo tail of V(Q, Q̂ₙ) against D*, McDiarmid and Λₙ.
    Sanov {
        #[command(flatten)]
        dist: DistArgs,
        #[arg(long)]
        n: u64,
        #[arg(long)]
        eps: f64,
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Worker threads; results do not depend on it.
        #[arg(long)]
        threads: Option<usize>,
        /// `n=start:stop:step` or `epsilon=start:stop:step`, giving CSV.
        #[arg(long)]
        sweep: Option<SweepSpec>,
        #[arg(long)]
        k_max: Option<usize>,
    },
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Lib(klball::Error),
    Io(io::Error),
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Lib(klball::Error::Capacity { .. }) => 3,
            CliError::Lib(klball::Error::Input(_) | klball::Error::Domain(_)) => 2,
            CliError::Lib(klball::Error::Internal(_)) | CliError::Io(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(msg) => f.write_str(msg),
            CliError::Lib(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "{e}"),
        }
    }
}

impl From<klball::Error> for CliError {
    fn from(e: klball::Error) -> Self {
        CliError::Lib(e)
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e)
    }
}

type CliResult<T> = Result<T, CliError>;

/// Parses `args` (including the program name), runs the subcommand and
/// returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                2
            } else {
                let _ = write!(out, "{text}");
                0
            };
        }
    };
    match dispatch(cli.command, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(command: Command, out: &mut dyn Write) -> CliResult<()> {
    match command {
        Command::Divergence { p, q, renormalize } => {
            let p = load_distribution(&p, renormalize)?;
            let q = load_distribution(&q, renormalize)?;
            let report = json!({
                "tv": number(total_variation(&p, &q)),
                "kl": number(kl_divergence(&p, &q).value()),
            });
            emit_json(out, &report)
        }
        Command::Dstar {
            dist,
            v,
            full_range,
            method,
            emit_extremal,
            k_max,
        } => {
            let q = dist.load()?;
            let options = DStarOptions {
                full_range,
                method: match method {
                    MethodArg::Auto => MethodChoice::Auto,
                    MethodArg::Enumerate => MethodChoice::Enumerate,
                    MethodArg::Closed => MethodChoice::Closed,
                },
                k_max: resolve_k_max(k_max)?,
            };
            let result = dstar_with(&q, v, &options)?;
            let mut report = to_json(&result);
            if let Value::Object(map) = &mut report {
                map.insert("exact".into(), Value::Bool(result.is_exact()));
                if !emit_extremal {
                    map.remove("extremal");
                }
            }
            emit_json(out, &report)
        }
        Command::Balance { dist, greedy, k_max } => {
            let q = dist.load()?;
            let k_max = resolve_k_max(k_max)?;
            let report = if greedy || q.len() > k_max {
                balance_greedy(&q)
            } else {
                balance_exact_with_limit(&q, k_max)?
            };
            emit_json(out, &to_json(&report))
        }
        Command::Vajda { v, grid } => match (v, grid) {
            (Some(v), _) => {
                let point = vajda_invert(v)?;
                let report = json!({
                    "v": number(v),
                    "L": number(point.value),
                    "t": number(point.t),
                    "pinsker": number(pinsker_lower(v)),
                });
                emit_json(out, &report)
            }
            (None, Some(grid)) => {
                writeln!(out, "v,L,pinsker")?;
                for v in grid.points() {
                    let l = vajda_invert(v)?.value;
                    writeln!(
                        out,
                        "{},{},{}",
                        cell(Some(v)),
                        cell(Some(l)),
                        cell(Some(pinsker_lower(v)))
                    )?;
                }
                Ok(())
            }
            (None, None) => Err(CliError::Usage("vajda needs --v or --grid".into())),
        },
        Command::Bounds {
            dist,
            renormalize,
            sweep,
            v,
            k_max,
        } => {
            let k_max = resolve_k_max(k_max)?;
            bounds(out, dist.as_deref(), renormalize, sweep, v, k_max)
        }
        Command::Sanov {
            dist,
            n,
            eps,
            trials,
            seed,
            threads,
            sweep,
            k_max,
        } => {
            let q = dist.load()?;
            let k_max = resolve_k_max(k_max)?;
            let work = || -> CliResult<Vec<u8>> {
                let mut buf = Vec::new();
                match sweep {
                    None => sanov_single(&mut buf, &q, n, eps, trials, seed, k_max)?,
                    Some(spec) => sanov_sweep(&mut buf, &q, n, eps, trials, seed, k_max, spec)?,
                }
                Ok(buf)
            };
            let text = match threads {
                None => work()?,
                Some(0) => return Err(CliError::Usage("--threads must be positive".into())),
                Some(t) => rayon::ThreadPoolBuilder::new()
                    .num_threads(t)
                    .build()
                    .map_err(|e| CliError::Io(io::Error::other(e)))?
                    .install(work)?,
            };
            out.write_all(&text)?;
            Ok(())
        }
    }
}

impl DistArgs {
    fn load(&self) -> CliResult<DiscreteDistribution> {
        load_distribution(&self.dist, self.renormalize)
    }
}

/// `-` reads stdin; an existing file path is read; anything else is parsed
/// as a literal weight list.
fn load_distribution(source: &str, renormalize: bool) -> CliResult<DiscreteDistribution> {
    let text = if source == "-" {
        let mut buf = String::new();
        io::stdin().read_to_string(&mut buf)?;
        buf
    } else if Path::new(source).is_file() {
        std::fs::read_to_string(source)?
    } else {
        source.to_owned()
    };
    let weights = parse_weights(&text)?;
    Ok(if renormalize {
        DiscreteDistribution::renormalized(weights)?
    } else {
        DiscreteDistribution::new(weights)?
    })
}

fn resolve_k_max(flag: Option<usize>) -> CliResult<usize> {
    let k_max = match flag {
        Some(k) => k,
        None => match std::env::var(K_MAX_ENV) {
            Ok(text) => text
                .trim()
                .parse()
                .map_err(|_| CliError::Usage(format!("{K_MAX_ENV}={text:?} is not a nonnegative integer")))?,
            Err(_) => DEFAULT_K_MAX,
        },
    };
    if k_max > HARD_K_MAX {
        return Err(CliError::Usage(format!(
            "K_max {k_max} exceeds the hard limit {HARD_K_MAX}"
        )));
    }
    Ok(k_max)
}

fn emit_json(out: &mut dyn Write, value: &Value) -> CliResult<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| CliError::Io(e.into()))?;
    writeln!(out, "{text}")?;
    Ok(())
}

fn balance_for(q: &DiscreteDistribution, k_max: usize) -> CliResult<BalanceReport> {
    Ok(if q.len() > k_max {
        balance_greedy(q)
    } else {
        balance_exact_with_limit(q, k_max)?
    })
}

struct BoundsRow {
    pinsker: f64,
    ow: Option<f64>,
    vajda: f64,
    dstar: Option<f64>,
    upper: Option<f64>,
}

fn bounds_row(q: &DiscreteDistribution, balance: &BalanceReport, v: f64, k_max: usize) -> CliResult<BoundsRow> {
    let exact_beta = (balance.method == BalanceMethod::Exact).then_some(balance.beta);
    let options = DStarOptions {
        k_max,
        ..DStarOptions::default()
    };
    // only exact values go in the dstar column
    let dstar = match dstar_with(q, v, &options) {
        Ok(r) if r.method != DStarMethod::UpperBound => Some(r.value.value()),
        Ok(_) | Err(klball::Error::Capacity { .. }) | Err(klball::Error::Domain(_)) => None,
        Err(e) => return Err(e.into()),
    };
    let beta = balance.upper_bound;
    let upper = (v <= 2.0 * beta).then(|| kl2((beta - v / 2.0).max(0.0), beta).map(|x| x.value()));
    Ok(BoundsRow {
        pinsker: pinsker_lower(v),
        ow: exact_beta.map(|b| ow_lower_from_beta(b, v)).transpose()?,
        vajda: vajda_invert(v)?.value,
        dstar,
        upper: upper.transpose()?,
    })
}

fn bounds(
    out: &mut dyn Write,
    dist: Option<&str>,
    renormalize: bool,
    sweep: SweepSpec,
    fixed_v: Option<f64>,
    k_max: usize,
) -> CliResult<()> {
    let write_row = |out: &mut dyn Write, lead: Option<f64>, v: f64, row: &BoundsRow| -> CliResult<()> {
        if let Some(x) = lead {
            write!(out, "{},", cell(Some(x)))?;
        }
        writeln!(
            out,
            "{},{},{},{},{},{}",
            cell(Some(v)),
            cell(Some(row.pinsker)),
            cell(row.ow),
            cell(Some(row.vajda)),
            cell(row.dstar),
            cell(row.upper)
        )?;
        Ok(())
    };
    let header = "v,pinsker,ow,vajda_L,dstar,thm1a_upper";
    match sweep.variable {
        SweepVariable::V => {
            let source = dist.ok_or_else(|| CliError::Usage("a v sweep needs --dist".into()))?;
            let q = load_distribution(source, renormalize)?;
            let balance = balance_for(&q, k_max)?;
            let points = sweep.range.points();
            if let Some(&v) = points.iter().find(|&&v| !(v > 0.0 && v < 2.0)) {
                return Err(CliError::Usage(format!("sweep point v = {v} outside (0, 2)")));
            }
            writeln!(out, "{header}")?;
            for v in points {
                write_row(out, None, v, &bounds_row(&q, &balance, v, k_max)?)?;
            }
            Ok(())
        }
        SweepVariable::Beta => {
            if dist.is_some() {
                return Err(CliError::Usage(
                    "a beta sweep uses Q = (beta, 1 - beta); drop --dist".into(),
                ));
            }
            let v = fixed_v.ok_or_else(|| CliError::Usage("a beta sweep needs --v".into()))?;
            let points = sweep.range.points();
            if let Some(&b) = points.iter().find(|&&b| !(0.5..1.0).contains(&b)) {
                return Err(CliError::Usage(format!("sweep point beta = {b} outside [0.5, 1)")));
            }
            writeln!(out, "beta,{header}")?;
            for beta in points {
                let q = BinaryDistribution::new(beta)?.to_distribution();
                let balance = balance_for(&q, k_max)?;
                write_row(out, Some(beta), v, &bounds_row(&q, &balance, v, k_max)?)?;
            }
            Ok(())
        }
        other => Err(CliError::Usage(format!("bounds cannot sweep {other}; use v or beta"))),
    }
}

fn dstar_reference(q: &DiscreteDistribution, eps: f64, k_max: usize) -> Option<(f64, DStarMethod)> {
    let options = DStarOptions {
        k_max,
        ..DStarOptions::default()
    };
    dstar_with(q, eps, &options).ok().map(|r| (r.value.value(), r.method))
}

fn exact_tail(q: &DiscreteDistribution, n: u64, eps: f64) -> Option<f64> {
    if q.len() != 2 {
        return None;
    }
    BinaryDistribution::new(q.weights()[0])
        .and_then(|b| binary_tail_exact(b, n, eps))
        .ok()
}

fn sanov_single(
    out: &mut dyn Write,
    q: &DiscreteDistribution,
    n: u64,
    eps: f64,
    trials: u64,
    seed: u64,
    k_max: usize,
) -> CliResult<()> {
    let config = SimConfig::new(q.clone(), n, eps, trials, seed)?;
    let estimate = monte_carlo(&config);
    let mut report = Map::new();
    report.insert("q".into(), to_json(q));
    report.insert("n".into(), json!(n));
    report.insert("epsilon".into(), number(eps));
    report.insert("trials".into(), json!(trials));
    report.insert("seed".into(), json!(seed));
    report.insert("estimate".into(), to_json(&estimate));
    report.insert(
        "dstar".into(),
        match dstar_reference(q, eps, k_max) {
            Some((value, method)) => json!({"value": number(value), "method": method}),
            None => Value::Null,
        },
    );
    report.insert("mcdiarmid_bound".into(), number(mcdiarmid_bound(n, eps)));
    report.insert(
        "lambda_envelope".into(),
        lambda_n(q, n).ok().map(|env| to_json(&env)).unwrap_or(Value::Null),
    );
    report.insert(
        "exact_binary_tail".into(),
        exact_tail(q, n, eps).map(number).unwrap_or(Value::Null),
    );
    emit_json(out, &Value::Object(report))
}

#[allow(clippy::too_many_arguments)]
fn sanov_sweep(
    out: &mut dyn Write,
    q: &DiscreteDistribution,
    n: u64,
    eps: f64,
    trials: u64,
    seed: u64,
    k_max: usize,
    spec: SweepSpec,
) -> CliResult<()> {
    let rows: Vec<(u64, f64)> = match spec.variable {
        SweepVariable::N => spec
            .range
            .points()
            .into_iter()
            .map(|x| {
                if x < 1.0 || x.fract() != 0.0 {
                    Err(CliError::Usage(format!(
                        "sweep point n = {x} is not a positive integer"
                    )))
                } else {
                    Ok((x as u64, eps))
                }
            })
            .collect::<CliResult<_>>()?,
        SweepVariable::Epsilon => spec.range.points().into_iter().map(|e| (n, e)).collect(),
        other => return Err(CliError::Usage(format!("sanov cannot sweep {other}; use n or epsilon"))),
    };
    writeln!(
        out,
        "n,epsilon,p_hat_ge_eps,ci_halfwidth,p_hat_centered,rate_estimate,dstar,exact_binary_tail,mcdiarmid,e_jn_hat"
    )?;
    for (n, eps) in rows {
        let estimate = monte_carlo(&SimConfig::new(q.clone(), n, eps, trials, seed)?);
        writeln!(
            out,
            "{n},{},{},{},{},{},{},{},{},{}",
            cell(Some(eps)),
            cell(Some(estimate.p_hat_ge_eps)),
            cell(Some(estimate.ci_halfwidth)),
            cell(Some(estimate.p_hat_centered)),
            cell(Some(estimate.rate_estimate.value())),
            cell(dstar_reference(q, eps, k_max).map(|(value, _)| value)),
            cell(exact_tail(q, n, eps)),
            cell(Some(mcdiarmid_bound(n, eps))),
            cell(Some(estimate.e_jn_hat)),
        )?;
    }
    Ok(())
}
