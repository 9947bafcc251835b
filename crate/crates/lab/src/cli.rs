//! The `ramsey` command line.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::time::Duration;

use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use ramsey_core::bounds::{self, rational_to_string, BoundNumber, BoundValue};
use ramsey_core::concentration::{self as conc, ExperimentReport, ParamValue};
use ramsey_core::counting;
use ramsey_core::progressions::{find_monochromatic, parse_terms, Progression};
use ramsey_core::search::{verify_certificate, Certificate, SearchConfig, DEFAULT_NODE_BUDGET};
use ramsey_core::{Coloring, ProgressionKind};
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::config::{load_config_file, resolve_threads, THREADS_ENV};
use crate::error::{exit, LabError, LabResult};
use crate::parallel::{parallel_ramsey_number, SearchOptions, ThreadRunner, DEFAULT_SPLIT_DEPTH};
use crate::table::{self, csv_writer, emit_table, Family, TableSpec};

#[derive(Debug, Parser, Serialize)]
#[command(
    name = "ramsey",
    version,
    about = "Ramsey-type numbers for arithmetic, semi- and quasi-progressions: exact search, bounds, counting, and Monte-Carlo checks",
    args_override_self = true
)]
pub struct Cli {
    /// Worker threads [default: $RAMSEY_THREADS, else all CPUs]
    #[arg(long, global = true, env = THREADS_ENV)]
    pub threads: Option<usize>,
    /// Read default flag values from a `key = value` file (flags win)
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value = "human")]
    pub format: Format,
    /// Shorthand for --format json
    #[arg(long, global = true)]
    pub json: bool,
    /// Shorthand for --format csv
    #[arg(long, global = true, conflicts_with = "json")]
    pub csv: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Human,
    Json,
    Csv,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Compute an exact Ramsey-type number with a witness coloring
    Search(SearchArgs),
    /// Evaluate a closed-form bound (`bound table` prints the comparison table)
    Bound(BoundArgs),
    /// Comparison table of all applicable bounds (CSV)
    Table(TableArgs),
    /// Exact counting oracles and closed-form sums
    Count {
        #[command(subcommand)]
        command: CountCommand,
    },
    /// Seeded Monte-Carlo experiments against their tail bounds
    Mc(McArgs),
    /// Check a coloring certificate or a progression
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum KindName {
    Ap,
    Semi,
    Quasi,
}

#[derive(Debug, Args, Serialize)]
pub struct KindArgs {
    #[arg(long, value_enum)]
    pub kind: KindName,
    /// Scope (semi) or diameter (quasi) [default: 2 for semi, 1 for quasi]
    #[arg(long)]
    pub param: Option<usize>,
}

impl KindArgs {
    pub fn kind(&self) -> LabResult<ProgressionKind> {
        let (name, default) = match self.kind {
            KindName::Ap => ("ap", 0),
            KindName::Semi => ("semi", 2),
            KindName::Quasi => ("quasi", 1),
        };
        Ok(ProgressionKind::from_name(name, self.param.unwrap_or(default))?)
    }
}

#[derive(Debug, Args, Serialize)]
pub struct SearchArgs {
    #[command(flatten)]
    pub kind: KindArgs,
    #[arg(long)]
    pub k: usize,
    #[arg(long, default_value_t = 200)]
    pub max_n: usize,
    /// Prefix length at which the tree is split into parallel subtrees
    #[arg(long, default_value_t = DEFAULT_SPLIT_DEPTH)]
    pub split_depth: usize,
    #[arg(long, default_value_t = DEFAULT_NODE_BUDGET)]
    pub node_budget: u64,
    /// Wall-clock budget in milliseconds
    #[arg(long)]
    pub time_budget_ms: Option<u64>,
    /// Search both colors of 1 instead of fixing it to 0
    #[arg(long)]
    pub no_symmetry_break: bool,
    /// Print node counts to stderr while searching
    #[arg(long)]
    pub progress: bool,
}

#[derive(Debug, Args, Serialize)]
#[command(args_conflicts_with_subcommands = true)]
pub struct BoundArgs {
    #[command(subcommand)]
    pub table: Option<BoundCommand>,
    #[arg(long, value_enum)]
    pub name: Option<BoundName>,
    #[arg(long)]
    pub p: Option<u64>,
    #[arg(long)]
    pub q: Option<u64>,
    #[arg(long)]
    pub k: Option<u64>,
    #[arg(long)]
    pub r: Option<u64>,
    #[arg(long)]
    pub m: Option<u64>,
    #[arg(long)]
    pub i: Option<u64>,
    #[arg(long)]
    pub tol: Option<f64>,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundCommand {
    Table(TableArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundName {
    VdwLowerPrimes,
    VdwLowerGeneral,
    VdwLowerProbabilistic,
    GowersUpper,
    SpUpper,
    SpLowerConstructive,
    SpLowerProbabilistic,
    QExact,
    Q1VijayBeta,
    Q1NewBase,
    QLandman,
}

#[derive(Debug, Args, Serialize)]
pub struct TableArgs {
    #[arg(long, value_enum, value_delimiter = ',', default_values = ["ap", "semi", "quasi"])]
    pub family: Vec<Family>,
    /// Inclusive scope/diameter range for semi and quasi rows
    #[arg(long, default_value = "1..3")]
    pub params: String,
    #[arg(long, default_value = "3..6")]
    pub k_range: String,
    /// Also run the exact search for every cell
    #[arg(long)]
    pub exact: bool,
    /// Search ceiling for cells without an upper bound
    #[arg(long, default_value_t = 200)]
    pub max_n: usize,
    /// Wall-clock budget per exact cell in milliseconds
    #[arg(long, default_value_t = 10_000)]
    pub cell_time_ms: u64,
    #[arg(long, default_value_t = DEFAULT_SPLIT_DEPTH)]
    pub split_depth: usize,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CountCommand {
    /// Exact S, T and the union-bound chain
    Report {
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        kind: KindArgs,
        #[arg(long)]
        k: usize,
    },
    /// λ-vectors of the transfer matrix
    Lambda {
        #[arg(long)]
        k: usize,
    },
    /// Closed-form sums against their bounds
    Sums {
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 2)]
        m: usize,
        #[arg(long)]
        r: usize,
    },
    /// The set R of reachable integers and the closure property
    Rset {
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        kind: KindArgs,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 1)]
        a: usize,
        #[arg(long, default_value_t = 1)]
        d: usize,
    },
    /// Ω and Ψ for diameter-1 quasi-progressions against 2^(N-k) λ_k
    Omega {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
    },
    /// Per-level counts for scope-2 semi-progressions
    Levels {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 1)]
        a: usize,
        #[arg(long, default_value_t = 1)]
        d: usize,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    ChebyshevThreepoint,
    ChernoffCoinflip,
    AzumaChromatic,
    JansonTriangle,
    JansonThreepath,
    TalagrandLis,
    CliqueSurvey,
    GoodFraction,
}

#[derive(Debug, Args, Serialize)]
pub struct McArgs {
    #[arg(value_enum)]
    pub experiment: Experiment,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Sample count [default depends on the experiment]
    #[arg(long)]
    pub samples: Option<u64>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long)]
    pub a: Option<f64>,
    #[arg(long)]
    pub c: Option<f64>,
    #[arg(long, alias = "lambda")]
    pub lam: Option<f64>,
    #[arg(long)]
    pub t: Option<f64>,
    /// Pass threshold for janson-threepath
    #[arg(long, default_value_t = 0.95)]
    pub floor: f64,
    /// Family for good-fraction
    #[arg(long, value_enum, default_value = "ap")]
    pub kind: KindName,
    #[arg(long)]
    pub param: Option<usize>,
    #[arg(long, default_value_t = 3)]
    pub k: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub kind: KindArgs,
    #[arg(long)]
    pub k: Option<usize>,
    /// Coloring over {0,1}, position 1 first
    #[arg(long, conflicts_with = "terms", required_unless_present = "terms")]
    pub coloring: Option<String>,
    /// Comma-separated progression terms
    #[arg(long)]
    pub terms: Option<String>,
}

/// Parses `args`, runs the command, and returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    let argv: Vec<String> = args.into_iter().map(|a| a.into().to_string_lossy().into_owned()).collect();
    let (argv, ignored) = match apply_config_file(argv) {
        Ok(v) => v,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return e.exit_code();
        }
    };
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(out, "{text}");
                exit::OK
            } else {
                let _ = write!(err, "{text}");
                exit::USAGE
            };
        }
    };
    let ctx = Ctx::new(&cli, ignored);
    match dispatch(&cli, &ctx, out, err) {
        Ok(code) => code,
        // The reader went away (`ramsey ... | head`); nothing left to report.
        Err(LabError::Io(e)) if e.kind() == std::io::ErrorKind::BrokenPipe => exit::OK,
        Err(LabError::Csv(e)) if matches!(e.kind(), csv::ErrorKind::Io(io) if io.kind() == std::io::ErrorKind::BrokenPipe) => exit::OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

/// Appends `--key value` for each config-file entry that names a flag of
/// the selected subcommand and is not already on the command line. With
/// `args_override_self`, later occurrences win, so explicit flags still
/// take precedence. Returns the new argv and the keys that did not apply.
fn apply_config_file(argv: Vec<String>) -> LabResult<(Vec<String>, Vec<String>)> {
    let path = argv.iter().enumerate().find_map(|(i, a)| {
        if a == "--config" {
            argv.get(i + 1).cloned()
        } else {
            a.strip_prefix("--config=").map(str::to_string)
        }
    });
    let Some(path) = path else { return Ok((argv, Vec::new())) };
    let entries = load_config_file(std::path::Path::new(&path))?;

    let root = Cli::command();
    let mut chain = vec![root.clone()];
    for token in argv.iter().skip(1) {
        let next = chain.last().expect("root").find_subcommand(token).cloned();
        if let Some(sub) = next {
            chain.push(sub);
        }
    }
    let on_command_line = |key: &str| {
        let flag = format!("--{key}");
        argv.iter().any(|a| *a == flag || a.starts_with(&format!("{flag}=")))
    };

    let mut out = argv.clone();
    let mut ignored = Vec::new();
    for (key, value) in entries {
        if key == "config" {
            continue;
        }
        let arg = chain
            .iter()
            .rev()
            .find_map(|c| c.get_arguments().find(|a| a.get_long() == Some(key.as_str())).cloned());
        let Some(arg) = arg else {
            ignored.push(key);
            continue;
        };
        if on_command_line(&key) {
            continue;
        }
        if arg.get_action().takes_values() {
            out.push(format!("--{key}"));
            out.push(value);
        } else {
            match value.as_str() {
                "true" | "1" | "yes" => out.push(format!("--{key}")),
                "false" | "0" | "no" => {}
                _ => return Err(LabError::Usage(format!("config key {key} expects true or false, got {value:?}"))),
            }
        }
    }
    Ok((out, ignored))
}

struct Ctx {
    threads: usize,
    format: Format,
    config: Value,
}

impl Ctx {
    fn new(cli: &Cli, ignored: Vec<String>) -> Self {
        let threads = resolve_threads(cli.threads);
        let format = if cli.json {
            Format::Json
        } else if cli.csv {
            Format::Csv
        } else {
            cli.format
        };
        let mut config = serde_json::to_value(cli).unwrap_or(Value::Null);
        if let Value::Object(map) = &mut config {
            map.insert("threads".into(), json!(threads));
            map.insert("format".into(), serde_json::to_value(format).unwrap_or(Value::Null));
            map.remove("json");
            map.remove("csv");
            if !ignored.is_empty() {
                map.insert("ignored_config_keys".into(), json!(ignored));
            }
        }
        Ctx { threads, format, config }
    }

    /// Prints the resolved configuration: inside JSON documents, as a
    /// leading line for human output, and on stderr for CSV.
    fn echo_config(&self, out: &mut dyn Write, err: &mut dyn Write) -> LabResult<()> {
        match self.format {
            Format::Human => writeln!(out, "config: {}", self.config)?,
            Format::Csv => writeln!(err, "config: {}", self.config)?,
            Format::Json => {}
        }
        Ok(())
    }

    fn emit_json(&self, out: &mut dyn Write, mut doc: Value) -> LabResult<()> {
        if let Value::Object(map) = &mut doc {
            map.insert("config".into(), self.config.clone());
        }
        writeln!(out, "{}", serde_json::to_string_pretty(&doc)?)?;
        Ok(())
    }

    fn no_csv(&self, what: &str) -> LabResult<()> {
        if self.format == Format::Csv {
            return Err(LabError::Usage(format!(
                "{what} has no CSV output; use --json or the default format"
            )));
        }
        Ok(())
    }
}

fn dispatch(cli: &Cli, ctx: &Ctx, out: &mut dyn Write, err: &mut dyn Write) -> LabResult<i32> {
    // The table is CSV in every format but JSON, so its echo goes to stderr.
    let table_csv =
        ctx.format != Format::Json && matches!(&cli.command, Command::Table(_) | Command::Bound(BoundArgs { table: Some(_), .. }));
    if table_csv {
        writeln!(err, "config: {}", ctx.config)?;
    } else {
        ctx.echo_config(out, err)?;
    }
    match &cli.command {
        Command::Search(a) => cmd_search(a, ctx, out),
        Command::Bound(a) => match &a.table {
            Some(BoundCommand::Table(t)) => cmd_table(t, ctx, out),
            None => cmd_bound(a, ctx, out),
        },
        Command::Table(t) => cmd_table(t, ctx, out),
        Command::Count { command } => cmd_count(command, ctx, out),
        Command::Mc(a) => cmd_mc(a, ctx, out),
        Command::Verify(a) => cmd_verify(a, ctx, out),
    }
}

fn symbol(kind: ProgressionKind, k: usize) -> String {
    match kind {
        ProgressionKind::Arithmetic => format!("w({k};2)"),
        ProgressionKind::Semi(m) => format!("SP_{m}({k})"),
        ProgressionKind::Quasi(n) => format!("Q_{n}({k})"),
    }
}

fn cmd_search(a: &SearchArgs, ctx: &Ctx, out: &mut dyn Write) -> LabResult<i32> {
    ctx.no_csv("search")?;
    let kind = a.kind.kind()?;
    let mut cfg = SearchConfig::new(kind, a.k, a.max_n);
    cfg.symmetry_break = !a.no_symmetry_break;
    cfg.node_budget = a.node_budget;
    let opts = SearchOptions {
        threads: ctx.threads,
        split_depth: a.split_depth,
        time_budget: a.time_budget_ms.map(Duration::from_millis),
        progress_every: if a.progress { 1 << 24 } else { 0 },
    };
    let started = std::time::Instant::now();
    match parallel_ramsey_number(&cfg, &opts) {
        Ok(t) => {
            let r = &t.result;
            let verified = verify_certificate(&r.witness);
            if ctx.format == Format::Json {
                ctx.emit_json(
                    out,
                    json!({
                        "kind": kind.name(),
                        "param": kind.param(),
                        "k": a.k,
                        "status": "exact",
                        "value": r.value,
                        "witness": r.witness.coloring.to_string(),
                        "certificate_verified": verified,
                        "nodes": r.nodes_explored,
                        "millis": t.elapsed.as_millis() as u64,
                        "subtrees": t.subtrees,
                    }),
                )?;
            } else {
                writeln!(out, "{} = {}", symbol(kind, a.k), r.value)?;
                writeln!(out, "witness (n = {}): {}", r.witness.n, r.witness.coloring)?;
                writeln!(out, "certificate verified: {verified}")?;
                writeln!(out, "nodes: {}", r.nodes_explored)?;
                writeln!(out, "subtrees: {}", t.subtrees)?;
                writeln!(out, "elapsed: {} ms", t.elapsed.as_millis())?;
            }
            Ok(if verified { exit::OK } else { exit::PROPERTY_FAILED })
        }
        Err(e) => {
            let Some(lower) = e.search_lower_bound() else {
                return Err(e.into());
            };
            let nodes = match e {
                ramsey_core::Error::NodeBudgetExceeded { nodes, .. } | ramsey_core::Error::Cancelled { nodes, .. } => Some(nodes),
                _ => None,
            };
            if ctx.format == Format::Json {
                ctx.emit_json(
                    out,
                    json!({
                        "kind": kind.name(),
                        "param": kind.param(),
                        "k": a.k,
                        "status": "incomplete",
                        "reason": e.to_string(),
                        "lower_bound": lower,
                        "nodes": nodes,
                        "millis": started.elapsed().as_millis() as u64,
                    }),
                )?;
            } else {
                writeln!(out, "{} >= {} (incomplete: {e})", symbol(kind, a.k), lower)?;
            }
            Ok(exit::BUDGET)
        }
    }
}

fn need<T: Copy>(v: Option<T>, flag: &str, name: BoundName) -> LabResult<T> {
    let name = name.to_possible_value().map(|p| p.get_name().to_string()).unwrap_or_default();
    v.ok_or_else(|| LabError::Usage(format!("bound {name} needs --{flag}")))
}

fn number_json(v: &BoundNumber) -> Value {
    match v {
        BoundNumber::Integer(i) => i.to_u64().map_or_else(|| json!(i.to_string()), |u| json!(u)),
        BoundNumber::Rational(r) => json!(rational_to_string(r)),
        BoundNumber::Float { value, .. } => json!(value),
        BoundNumber::Tower(t) => json!(t.to_string()),
    }
}

fn bound_json(b: &BoundValue) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("value".into(), number_json(&b.value));
    m.insert("direction".into(), json!(b.direction.as_str()));
    m.insert("asymptotic".into(), json!(b.asymptotic));
    m.insert("conditions".into(), json!(b.conditions));
    m.insert("approx".into(), json!(b.to_f64()));
    if let BoundNumber::Float { rel_precision, .. } = b.value {
        m.insert("rel_precision".into(), json!(rel_precision));
    }
    m
}

fn cmd_bound(a: &BoundArgs, ctx: &Ctx, out: &mut dyn Write) -> LabResult<i32> {
    ctx.no_csv("bound")?;
    let name = a
        .name
        .ok_or_else(|| LabError::Usage("bound needs --name (or the `table` subcommand)".into()))?;
    let mut args = Map::new();
    for (flag, v) in [("p", a.p), ("q", a.q), ("k", a.k), ("r", a.r), ("m", a.m), ("i", a.i)] {
        if let Some(v) = v {
            args.insert(flag.into(), json!(v));
        }
    }
    if let Some(t) = a.tol {
        args.insert("tol".into(), json!(t));
    }
    let small = |v: u64, flag: &str| u32::try_from(v).map_err(|_| LabError::Usage(format!("--{flag} is too large")));
    let result: Result<Map<String, Value>, ramsey_core::Error> = match name {
        BoundName::VdwLowerPrimes => {
            let (p, q) = (need(a.p, "p", name)?, need(a.q, "q", name)?);
            bounds::vdw_lower_primes(p, q).map(|b| bound_json(&b))
        }
        BoundName::VdwLowerGeneral => {
            let (k, r) = (small(need(a.k, "k", name)?, "k")?, small(need(a.r, "r", name)?, "r")?);
            bounds::vdw_lower_general(k, r).map(|b| bound_json(&b))
        }
        BoundName::VdwLowerProbabilistic => bounds::vdw_lower_probabilistic(small(need(a.k, "k", name)?, "k")?).map(|b| bound_json(&b)),
        BoundName::GowersUpper => {
            let (k, r) = (need(a.k, "k", name)?, need(a.r, "r", name)?);
            bounds::gowers_upper(k, r).map(|t| {
                let mut m = bound_json(&bounds::gowers_upper_bound(k, r).expect("same preconditions"));
                m.insert("levels".into(), json!(t.levels()));
                m.insert("size".into(), json!(t.size().to_string()));
                m.insert("log2_size".into(), json!(t.iterated_log2(1).to_string()));
                m.insert("decimal_digits".into(), json!(t.decimal_digits()));
                m
            })
        }
        BoundName::SpUpper => bounds::sp_upper(need(a.m, "m", name)?, need(a.k, "k", name)?).map(|b| bound_json(&b)),
        BoundName::SpLowerConstructive => {
            let (m, k) = (need(a.m, "m", name)?, need(a.k, "k", name)?);
            bounds::sp_lower_constructive(m, k).map(|b| {
                let mut j = bound_json(&b);
                j.insert("lambda".into(), json!(bounds::sp_lambda(m, k)));
                j
            })
        }
        BoundName::SpLowerProbabilistic => {
            let (m, k) = (small(need(a.m, "m", name)?, "m")?, small(need(a.k, "k", name)?, "k")?);
            bounds::sp_lower_probabilistic(m, k).map(|b| {
                let mut j = bound_json(&b);
                j.insert("base".into(), json!(bounds::sp_probabilistic_base(m)));
                j
            })
        }
        BoundName::QExact => {
            let (i, m, r) = (need(a.i, "i", name)?, need(a.m, "m", name)?, need(a.r, "r", name)?);
            bounds::q_exact(i, m, r).map(|q| {
                let mut j = bound_json(&q.value);
                j.insert("k".into(), json!(q.k));
                j.insert("diameter".into(), json!(q.diameter));
                j
            })
        }
        BoundName::Q1VijayBeta => bounds::q1_vijay_beta(a.tol.unwrap_or(1e-12)).map(|b| {
            let mut j = Map::new();
            j.insert("value".into(), json!(b.beta));
            j.insert("direction".into(), json!("lower"));
            j.insert("asymptotic".into(), json!(false));
            j.insert("conditions".into(), json!(["tol > 0"]));
            j.insert("z".into(), json!(b.z));
            j.insert("residual".into(), json!(b.residual));
            j.insert("positive_roots_z".into(), json!(b.positive_roots_z));
            j
        }),
        BoundName::Q1NewBase => {
            let q = bounds::q1_new_base();
            let mut j = Map::new();
            j.insert("value".into(), json!(q.g));
            j.insert("direction".into(), json!("lower"));
            j.insert("asymptotic".into(), json!(false));
            j.insert("conditions".into(), json!(["multiplied by an unspecified positive constant"]));
            j.insert("b".into(), json!(q.b));
            Ok(j)
        }
        BoundName::QLandman => bounds::q_landman_coeff(need(a.k, "k", name)?).map(|l| {
            let mut j = bound_json(&l.value);
            j.insert("diameter".into(), json!(l.diameter));
            j
        }),
    };
    let name_str = name.to_possible_value().expect("no skipped variants").get_name().to_string();
    let (doc, code) = match result {
        Ok(fields) => {
            let mut doc = Map::new();
            doc.insert("name".into(), json!(name_str));
            doc.insert("args".into(), Value::Object(args));
            doc.insert("applicable".into(), json!(true));
            doc.extend(fields);
            (doc, exit::OK)
        }
        Err(e @ (ramsey_core::Error::NotApplicable(_) | ramsey_core::Error::InvalidArgument(_))) => {
            let mut doc = Map::new();
            doc.insert("name".into(), json!(name_str));
            doc.insert("args".into(), Value::Object(args));
            doc.insert("applicable".into(), json!(false));
            doc.insert("reason".into(), json!(e.to_string()));
            (doc, exit::USAGE)
        }
        Err(e) => return Err(e.into()),
    };
    if ctx.format == Format::Json {
        ctx.emit_json(out, Value::Object(doc))?;
    } else {
        writeln!(out, "{name_str}")?;
        for (k, v) in doc.iter().skip(1) {
            writeln!(out, "  {k}: {v}")?;
        }
    }
    Ok(code)
}

fn cmd_table(a: &TableArgs, ctx: &Ctx, out: &mut dyn Write) -> LabResult<i32> {
    let spec = TableSpec {
        families: a.family.clone(),
        params: table::parse_range(&a.params).map_err(LabError::Usage)?,
        k_range: table::parse_range(&a.k_range).map_err(LabError::Usage)?,
        exact: a.exact,
        max_n: a.max_n,
        cell_time: Duration::from_millis(a.cell_time_ms),
    };
    let opts = SearchOptions {
        threads: ctx.threads,
        split_depth: a.split_depth,
        ..Default::default()
    };
    let rows = emit_table(&spec, &opts)?;
    if ctx.format == Format::Json {
        ctx.emit_json(out, json!({ "columns": table::HEADER, "rows": rows }))?;
    } else {
        table::write_csv(&rows, out)?;
    }
    Ok(if rows.iter().any(|r| r.has_violation()) {
        exit::PROPERTY_FAILED
    } else {
        exit::OK
    })
}

fn rat(r: &BigRational) -> Value {
    json!(rational_to_string(r))
}

fn rat_f64(r: &BigRational) -> Value {
    json!(r.to_f64())
}

fn cmd_count(c: &CountCommand, ctx: &Ctx, out: &mut dyn Write) -> LabResult<i32> {
    let runner = ThreadRunner { threads: ctx.threads };
    let human = ctx.format == Format::Human;
    match c {
        CountCommand::Report { n, kind, k } => {
            let kind = kind.kind()?;
            let r = counting::union_bound_check_with(*n, kind, *k, &runner)?;
            let code = if r.chain_holds() { exit::OK } else { exit::PROPERTY_FAILED };
            match ctx.format {
                Format::Csv => {
                    let mut w = csv_writer(out);
                    w.write_record(["a", "d", "t"])?;
                    for (&(a, d), &t) in &r.t {
                        w.write_record([a.to_string(), d.to_string(), t.to_string()])?;
                    }
                    w.flush()?;
                }
                Format::Json => ctx.emit_json(
                    out,
                    json!({
                        "n": r.n,
                        "k": r.k,
                        "kind": kind.name(),
                        "param": kind.param(),
                        "s": r.s,
                        "t": r.t.iter().map(|(&(a, d), &t)| json!({"a": a, "d": d, "count": t})).collect::<Vec<_>>(),
                        "sum_t": r.sum_t,
                        "max_t": r.max_t,
                        "argmax": r.argmax.map(|(a, d)| json!({"a": a, "d": d})),
                        "union_bound": rat(&r.union_bound),
                        "union_bound_approx": rat_f64(&r.union_bound),
                        "s_le_sum_t": r.s_le_sum_t,
                        "sum_t_le_union_bound": r.sum_t_le_union_bound,
                        "chain_holds": r.chain_holds(),
                        "origin_attains_max": r.origin_attains_max,
                        "origin_claim_applies": r.origin_claim_applies,
                    }),
                )?,
                Format::Human => {
                    writeln!(out, "N = {}, k = {}, kind = {kind}", r.n, r.k)?;
                    writeln!(out, "S = {}", r.s)?;
                    writeln!(out, "sum T = {} over {} pairs (a, d)", r.sum_t, r.t.len())?;
                    writeln!(out, "max T = {} at {:?}", r.max_t, r.argmax)?;
                    writeln!(out, "(N-k+1)(N/k) max T = {}", rational_to_string(&r.union_bound))?;
                    writeln!(out, "chain S <= sum T <= bound: {}", r.chain_holds())?;
                    if r.origin_claim_applies {
                        writeln!(out, "max T attained at (1, 1): {}", r.origin_attains_max)?;
                    } else {
                        writeln!(
                            out,
                            "max T attained at (1, 1): {} (N < 2k-1, claim not applicable)",
                            r.origin_attains_max
                        )?;
                    }
                }
            }
            Ok(code)
        }
        CountCommand::Lambda { k } => {
            ctx.no_csv("count lambda")?;
            let seq = counting::lambda_sequence((*k).max(1));
            let last = seq.last().expect("k >= 1");
            let ratio = (seq.len() >= 2).then(|| (last.sum() / seq[seq.len() - 2].sum()).to_f64()).flatten();
            let eig = counting::dominant_eigenvalue();
            let (c, growth_ok) = counting::lambda_growth_check(seq.len());
            if human {
                writeln!(
                    out,
                    "lambda_{} = ({}, {}), sum {}",
                    last.k,
                    rational_to_string(&last.v0),
                    rational_to_string(&last.v1),
                    rational_to_string(&last.sum())
                )?;
                if let Some(r) = ratio {
                    writeln!(out, "lambda_{} / lambda_{} = {r}", last.k, last.k - 1)?;
                }
                writeln!(out, "dominant eigenvalue = {eig}")?;
                writeln!(out, "growth constant c = {c} (lambda_j <= c b^j for j <= {}: {growth_ok})", last.k)?;
            } else {
                ctx.emit_json(
                    out,
                    json!({
                        "k": last.k,
                        "v0": rat(&last.v0),
                        "v1": rat(&last.v1),
                        "sum": rat(&last.sum()),
                        "sum_approx": rat_f64(&last.sum()),
                        "ratio": ratio,
                        "dominant_eigenvalue": eig,
                        "growth_constant": c,
                        "growth_bound_holds": growth_ok,
                    }),
                )?;
            }
            Ok(if growth_ok { exit::OK } else { exit::PROPERTY_FAILED })
        }
        CountCommand::Sums { k, m, r } => {
            ctx.no_csv("count sums")?;
            let s = counting::scopem_multinomial_sum(*k, *m, *r)?;
            let binom = (*m == 2).then(|| counting::scope2_closed_sum(*k, *r)).transpose()?;
            let ok = s.within_bound() && binom.as_ref().map_or(true, |b| b.within_bound() && b.sum == s.sum);
            if human {
                writeln!(
                    out,
                    "multinomial sum = {} <= {}: {}",
                    s.sum,
                    rational_to_string(&s.bound),
                    s.within_bound()
                )?;
                if let Some(b) = &binom {
                    writeln!(
                        out,
                        "binomial sum = {} <= {}: {} (equality: {})",
                        b.sum,
                        rational_to_string(&b.bound),
                        b.within_bound(),
                        b.attains_bound()
                    )?;
                }
            } else {
                let mut doc = json!({
                    "k": k, "m": m, "r": r,
                    "sum": s.sum.to_string(),
                    "bound": rat(&s.bound),
                    "bound_approx": rat_f64(&s.bound),
                    "within_bound": s.within_bound(),
                    "attains_bound": s.attains_bound(),
                });
                if let Some(b) = &binom {
                    doc["binomial"] = json!({
                        "sum": b.sum.to_string(),
                        "bound": rat(&b.bound),
                        "within_bound": b.within_bound(),
                        "attains_bound": b.attains_bound(),
                    });
                }
                ctx.emit_json(out, doc)?;
            }
            Ok(if ok { exit::OK } else { exit::PROPERTY_FAILED })
        }
        CountCommand::Rset { n, kind, k, a, d } => {
            ctx.no_csv("count rset")?;
            let kind = kind.kind()?;
            let r = counting::build_r_set(*n, kind, *k, *a, *d)?;
            let closure = (*n <= counting::CLOSURE_LIMIT)
                .then(|| counting::closure_property_check(*n, kind, *k, *a, *d))
                .transpose()?;
            if human {
                writeln!(out, "R = {{{}}}", ramsey_core::progressions::join_terms(&r.elements))?;
                writeln!(out, "s = {}, t = {}, w = {}", r.s, r.t, r.overlap_correction())?;
                for (i, b) in r.blocks.iter().enumerate() {
                    writeln!(out, "P_{i} = {{{}}}", ramsey_core::progressions::join_terms(b))?;
                }
                match closure {
                    Some(c) => writeln!(out, "closure property: {c}")?,
                    None => writeln!(out, "closure property: not checked (N > {})", counting::CLOSURE_LIMIT)?,
                }
            } else {
                ctx.emit_json(
                    out,
                    json!({
                        "n": n, "k": k, "a": a, "d": d,
                        "kind": kind.name(), "param": kind.param(),
                        "elements": r.elements,
                        "s": r.s, "t": r.t,
                        "w": r.overlap_correction(),
                        "blocks": r.blocks,
                        "closure_holds": closure,
                    }),
                )?;
            }
            Ok(if closure == Some(false) { exit::PROPERTY_FAILED } else { exit::OK })
        }
        CountCommand::Omega { n, k } => {
            ctx.no_csv("count omega")?;
            let o = counting::omega_relation(*n, *k)?;
            if human {
                writeln!(out, "Omega = T(1,1) = {}, s = {}", o.omega, o.s)?;
                writeln!(
                    out,
                    "Psi = Omega / 2^(N-s) = {} (integer: {})",
                    rational_to_string(&o.psi),
                    o.psi_is_integer()
                )?;
                writeln!(
                    out,
                    "2^(N-k) lambda_k = {} (Omega within: {})",
                    rational_to_string(&o.predicted),
                    o.omega_within_prediction()
                )?;
            } else {
                ctx.emit_json(
                    out,
                    json!({
                        "n": n, "k": k,
                        "omega": o.omega,
                        "s": o.s,
                        "psi": rat(&o.psi),
                        "psi_is_integer": o.psi_is_integer(),
                        "lambda": rat(&o.lambda),
                        "predicted": rat(&o.predicted),
                        "omega_within_prediction": o.omega_within_prediction(),
                    }),
                )?;
            }
            Ok(exit::OK)
        }
        CountCommand::Levels { n, k, a, d } => {
            ctx.no_csv("count levels")?;
            let levels = counting::scope2_level_counts(*n, *k, *a, *d)?;
            let matches = levels.iter().all(|l| BigInt::from(l.observed) == l.claimed);
            if human {
                for l in &levels {
                    writeln!(out, "l = {}: observed {}, claimed {}", l.l, l.observed, l.claimed)?;
                }
                writeln!(out, "all levels match: {matches}")?;
            } else {
                let rows: Vec<Value> = levels
                    .iter()
                    .map(|l| json!({"l": l.l, "observed": l.observed, "claimed": l.claimed.to_string()}))
                    .collect();
                ctx.emit_json(out, json!({"n": n, "k": k, "a": a, "d": d, "levels": rows, "all_match": matches}))?;
            }
            Ok(exit::OK)
        }
    }
}

/// Default parameters per experiment, taken from the worked examples.
fn mc_defaults(e: Experiment) -> (u64, usize, f64) {
    // (samples, n, p)
    match e {
        Experiment::ChebyshevThreepoint => (100_000, 0, 0.1),
        Experiment::ChernoffCoinflip => (100_000, 1000, 0.5),
        Experiment::AzumaChromatic => (2000, 15, 0.5),
        Experiment::JansonTriangle => (20_000, 60, 0.0),
        Experiment::JansonThreepath => (500, 100, 0.0),
        Experiment::TalagrandLis => (5000, 400, 0.0),
        Experiment::CliqueSurvey => (500, 30, 0.5),
        Experiment::GoodFraction => (100_000, 8, 0.5),
    }
}

pub fn run_experiment(a: &McArgs, threads: usize) -> LabResult<ExperimentReport> {
    let runner = ThreadRunner { threads };
    let (samples, n, p) = mc_defaults(a.experiment);
    let samples = a.samples.unwrap_or(samples);
    let n = a.n.unwrap_or(n);
    let p = a.p.unwrap_or(p);
    let seed = a.seed;
    Ok(match a.experiment {
        Experiment::ChebyshevThreepoint => conc::run_chebyshev_threepoint(p, a.a.unwrap_or(5.0), samples, seed, &runner)?,
        Experiment::ChernoffCoinflip => conc::run_chernoff_coinflip(n, a.lam.unwrap_or(70.0), samples, seed, &runner)?,
        Experiment::AzumaChromatic => conc::run_azuma_chromatic(n, p, a.lam.unwrap_or(2.0), samples, seed, &runner)?,
        Experiment::JansonTriangle => conc::run_janson_triangle(n, a.c.unwrap_or(1.0), samples, seed, &runner)?,
        Experiment::JansonThreepath => conc::run_janson_threepath(n, a.c.unwrap_or(3.0), a.floor, samples, seed, &runner)?,
        Experiment::TalagrandLis => conc::run_talagrand_lis(n, a.t.unwrap_or(3.0), samples, seed, &runner)?,
        Experiment::CliqueSurvey => conc::run_clique_survey(n, p, samples, seed, &runner)?,
        Experiment::GoodFraction => {
            let kind = KindArgs {
                kind: a.kind,
                param: a.param,
            }
            .kind()?;
            let est = counting::mc_good_fraction_with(n, kind, a.k, samples, seed, &runner)?;
            let mut r = ExperimentReport {
                name: format!("good-fraction-{kind}"),
                params: vec![
                    ("n".into(), ParamValue::Int(n as u64)),
                    ("k".into(), ParamValue::Int(a.k as u64)),
                    ("seed".into(), ParamValue::Int(seed)),
                ],
                samples,
                estimate: est.estimate,
                std_error: est.std_error,
                bound_value: f64::NAN,
                passed: true,
                extras: Vec::new(),
                histogram: Vec::new(),
            };
            if n <= counting::ENUMERATION_LIMIT.min(20) {
                let exact = 1.0 - counting::count_s(n, kind, a.k)? as f64 / (1u64 << n) as f64;
                r.bound_value = exact;
                r.passed = (r.estimate - exact).abs() <= conc::SE_SLACK * r.std_error;
            }
            r
        }
    })
}

fn param_json(v: ParamValue) -> Value {
    match v {
        ParamValue::Int(i) => json!(i),
        ParamValue::Float(f) => json!(f),
    }
}

fn param_text(v: ParamValue) -> String {
    match v {
        ParamValue::Int(i) => i.to_string(),
        ParamValue::Float(f) => f.to_string(),
    }
}

pub fn report_json(r: &ExperimentReport) -> Value {
    let params: Map<String, Value> = r.params.iter().map(|(k, v)| (k.clone(), param_json(*v))).collect();
    let extras: Map<String, Value> = r.extras.iter().map(|(k, v)| (k.clone(), json!(v))).collect();
    json!({
        "experiment": r.name,
        "params": params,
        "samples": r.samples,
        "estimate": r.estimate,
        "std_error": r.std_error,
        "bound_value": if r.bound_value.is_finite() { json!(r.bound_value) } else { Value::Null },
        "passed": r.passed,
        "extras": extras,
        "histogram": r.histogram.iter().map(|&(v, c)| json!({"value": v, "count": c})).collect::<Vec<_>>(),
    })
}

fn cmd_mc(a: &McArgs, ctx: &Ctx, out: &mut dyn Write) -> LabResult<i32> {
    let r = run_experiment(a, ctx.threads)?;
    match ctx.format {
        Format::Json => ctx.emit_json(out, report_json(&r))?,
        Format::Csv => {
            let mut w = csv_writer(out);
            let mut header: Vec<String> = r.params.iter().map(|(k, _)| k.clone()).collect();
            header.extend(["samples", "estimate", "std_error", "bound", "passed"].map(String::from));
            w.write_record(&header)?;
            let mut row: Vec<String> = r.params.iter().map(|(_, v)| param_text(*v)).collect();
            row.extend([
                r.samples.to_string(),
                r.estimate.to_string(),
                r.std_error.to_string(),
                r.bound_value.to_string(),
                r.passed.to_string(),
            ]);
            w.write_record(&row)?;
            w.flush()?;
        }
        Format::Human => {
            writeln!(out, "{}", r.name)?;
            let params: Vec<String> = r.params.iter().map(|(k, v)| format!("{k}={}", param_text(*v))).collect();
            writeln!(out, "params: {}", params.join(" "))?;
            writeln!(out, "samples: {}", r.samples)?;
            writeln!(out, "estimate: {} (std error {})", r.estimate, r.std_error)?;
            writeln!(out, "bound: {}", r.bound_value)?;
            for (k, v) in &r.extras {
                writeln!(out, "{k}: {v}")?;
            }
            if !r.histogram.is_empty() {
                let h: Vec<String> = r.histogram.iter().map(|(v, c)| format!("{v}:{c}")).collect();
                writeln!(out, "histogram: {}", h.join(" "))?;
            }
            writeln!(out, "passed: {}", r.passed)?;
        }
    }
    Ok(if r.passed { exit::OK } else { exit::PROPERTY_FAILED })
}

fn cmd_verify(a: &VerifyArgs, ctx: &Ctx, out: &mut dyn Write) -> LabResult<i32> {
    ctx.no_csv("verify")?;
    let kind = a.kind.kind()?;
    if let Some(text) = &a.terms {
        let terms = parse_terms(text)?;
        let verdict = Progression::verified(terms.clone(), kind);
        let ok = verdict.is_ok();
        if ctx.format == Format::Json {
            ctx.emit_json(
                out,
                json!({
                    "kind": kind.name(), "param": kind.param(),
                    "terms": terms,
                    "is_progression": ok,
                    "difference": verdict.as_ref().ok().and_then(|p| p.difference()),
                }),
            )?;
        } else {
            match &verdict {
                Ok(p) => writeln!(out, "{{{p}}} is a {kind} progression with difference {:?}", p.difference())?,
                Err(e) => writeln!(out, "not a {kind} progression: {e}")?,
            }
        }
        return Ok(if ok { exit::OK } else { exit::PROPERTY_FAILED });
    }
    let k = a.k.ok_or_else(|| LabError::Usage("verifying a coloring needs --k".into()))?;
    let coloring: Coloring = a.coloring.as_deref().expect("required by clap").parse()?;
    let cert = Certificate {
        kind,
        k,
        n: coloring.len(),
        coloring: coloring.clone(),
    };
    let ok = verify_certificate(&cert);
    let bad = find_monochromatic(&coloring, kind, k);
    if ctx.format == Format::Json {
        ctx.emit_json(
            out,
            json!({
                "kind": kind.name(), "param": kind.param(), "k": k,
                "n": coloring.len(),
                "coloring": coloring.to_string(),
                "valid": ok,
                "monochromatic": bad.as_ref().map(|p| p.terms().to_vec()),
            }),
        )?;
    } else if ok {
        writeln!(
            out,
            "valid: no monochromatic {k}-term {kind} progression in {} positions",
            coloring.len()
        )?;
    } else {
        let p = bad.expect("invalid certificate has a progression");
        writeln!(out, "invalid: {{{p}}} is monochromatic")?;
    }
    Ok(if ok { exit::OK } else { exit::PROPERTY_FAILED })
}
