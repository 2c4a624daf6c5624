//! `divgraph`: batch driver for estimates, exact statistics, oracles and
//! the median-size analysis.
//!
//! Exit codes: 0 success, 1 other failure (including a failed `verify`),
//! 2 invalid arguments, 3 resource guard exhausted, 4 corrupt term cache.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use divgraph::estimator::{self, cache, BudgetSpec, Preset, DEFAULT_OBS2_JMAX};
use divgraph::oracle::{self, OracleLimits};
use divgraph::{analysis, graph, stats, ConstantName, Error, KernelLimits, StatCache, StatKind};

/// Cache file name inside `DIVGRAPH_CACHE_DIR`.
const CACHE_FILE: &str = "terms.jsonl";

#[derive(Parser, Debug)]
#[command(name = "divgraph", version, about = "Certified bounds for divisor-graph counting constants")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,

    /// Worker threads for estimation (0: one per core).
    #[arg(long, default_value_t = 0, global = true)]
    workers: usize,

    /// More logging on stderr (repeat for more).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Args, Debug, Clone, Copy)]
struct Guards {
    /// Largest graph accepted by the counting kernels.
    #[arg(long, default_value_t = KernelLimits::default().max_vertices)]
    max_vertices: usize,
    /// Largest component handed to the path-cover search.
    #[arg(long, default_value_t = KernelLimits::default().max_path_cover_vertices)]
    max_path_cover: usize,
    /// Branch-and-bound node budget per path-cover component.
    #[arg(long, default_value_t = KernelLimits::default().path_cover_nodes)]
    path_cover_nodes: u64,
}

impl Guards {
    fn limits(self) -> KernelLimits {
        KernelLimits {
            max_vertices: self.max_vertices,
            max_path_cover_vertices: self.max_path_cover,
            path_cover_nodes: self.path_cover_nodes,
        }
    }
}

#[derive(Args, Debug, Clone, Copy)]
struct OracleGuards {
    /// Largest n for subset enumeration.
    #[arg(long, default_value_t = OracleLimits::default().max_n)]
    max_n: u64,
    /// Largest n for the exhaustive path cover.
    #[arg(long, default_value_t = OracleLimits::default().max_cover_n)]
    max_cover_n: u64,
}

impl OracleGuards {
    fn limits(self) -> OracleLimits {
        OracleLimits {
            max_n: self.max_n,
            max_cover_n: self.max_cover_n,
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Certified interval for one constant.
    Estimate {
        /// alpha, beta, eta, theta, b or c.
        #[arg(long)]
        constant: ConstantName,
        /// Evaluate every block with d * i^5 <= BUDGET.
        #[arg(long, conflicts_with = "preset", value_parser = clap::value_parser!(u64).range(1..))]
        budget: Option<u64>,
        /// Named budget: desk, paper-alpha, paper-eta, paper-theta, paper-c.
        #[arg(long)]
        preset: Option<Preset>,
        /// Largest exponent j for scaled images (p^j d, p^j t).
        #[arg(long, default_value_t = DEFAULT_OBS2_JMAX)]
        obs2_jmax: u32,
        /// Term cache file (JSON lines); defaults to $DIVGRAPH_CACHE_DIR/terms.jsonl.
        #[arg(long)]
        cache: Option<PathBuf>,
        /// Ignore DIVGRAPH_CACHE_DIR.
        #[arg(long, conflicts_with = "cache")]
        no_cache: bool,
        /// Report wall-clock time (makes output nondeterministic).
        #[arg(long)]
        timing: bool,
        #[command(flatten)]
        guards: Guards,
    },
    /// Exact local statistic of the anchor component of (d, t).
    Ratio {
        /// r, s, w, h, g or v.
        kind: StatKind,
        d: u64,
        t: u64,
        /// For s: also print both independence numbers and counts.
        #[arg(long)]
        detail: bool,
        #[command(flatten)]
        guards: Guards,
    },
    /// Global counts on [1, n] by exhaustive enumeration.
    Oracle {
        n: u64,
        #[command(flatten)]
        guards: OracleGuards,
    },
    /// Checks the telescoping identity of a statistic on [1, n].
    Verify {
        kind: StatKind,
        n: u64,
        #[command(flatten)]
        guards: OracleGuards,
    },
    /// Asymptotic bounds on the median size of a primitive subset of [1, n].
    Median {
        #[arg(long, default_value_t = 1.572939)]
        alpha_lo: f64,
        #[arg(long, default_value_t = 1.574445)]
        alpha_hi: f64,
        #[arg(long, default_value_t = 1.2125)]
        eta_lo: f64,
    },
    /// Searches for counterexamples to g(nm) <= g(n) g(m) and g(p^(e+1)) <= g(p^e).
    Conjecture {
        #[arg(long, default_value_t = 60)]
        limit: u64,
    },
}

/// Failure with its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::InvalidInput(_) => 2,
            Error::Budget { .. } => 3,
            Error::CacheCorrupt { .. } => 4,
            _ => 1,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

/// A rendered command result; `ok = false` exits with 1 after printing.
struct Document {
    value: Value,
    text: String,
    ok: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        2 => "debug",
        _ => "trace",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();

    match run(&cli) {
        Ok(doc) => {
            print!("{}", render(&doc, cli.format));
            if doc.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: &Cli) -> Result<Document, Failure> {
    match &cli.command {
        Command::Estimate {
            constant,
            budget,
            preset,
            obs2_jmax,
            cache,
            no_cache,
            timing,
            guards,
        } => {
            let spec = match (budget, preset) {
                (Some(b), None) => BudgetSpec::product(*b),
                (None, Some(p)) => p.budget(),
                (None, None) => Preset::Desk.budget(),
                (Some(_), Some(_)) => unreachable!("clap rejects --budget with --preset"),
            };
            let path = match (cache, no_cache) {
                (Some(p), _) => Some(p.clone()),
                (None, false) => std::env::var_os("DIVGRAPH_CACHE_DIR").map(|d| PathBuf::from(d).join(CACHE_FILE)),
                (None, true) => None,
            };
            estimate(cli.workers, *constant, &spec, *obs2_jmax, path, *timing, guards.limits())
        }
        Command::Ratio {
            kind,
            d,
            t,
            detail,
            guards,
        } => ratio(*kind, *d, *t, *detail, guards.limits()),
        Command::Oracle { n, guards } => oracle_counts(*n, guards.limits()),
        Command::Verify { kind, n, guards } => verify(*kind, *n, guards.limits()),
        Command::Median {
            alpha_lo,
            alpha_hi,
            eta_lo,
        } => median(*alpha_lo, *alpha_hi, *eta_lo),
        Command::Conjecture { limit } => conjecture(*limit),
    }
}

fn estimate(
    workers: usize,
    name: ConstantName,
    spec: &BudgetSpec,
    jmax: u32,
    cache_path: Option<PathBuf>,
    timing: bool,
    limits: KernelLimits,
) -> Result<Document, Failure> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Failure {
            code: 1,
            message: format!("thread pool: {e}"),
        })?;
    let started = Instant::now();
    let stat_cache = StatCache::new(limits);
    if let Some(path) = &cache_path {
        cache::attach(&stat_cache, path)?;
    }
    let iv = pool.install(|| estimator::estimate_with(name, spec, jmax, &stat_cache))?;

    let mut value = serde_json::to_value(&iv).expect("interval serializes");
    let obj = value.as_object_mut().expect("object");
    if timing {
        obj.insert("wall_seconds".into(), json!(started.elapsed().as_secs_f64()));
    }
    let mut text = format!(
        "{name} in [{}, {}]\ncovered mass {} (~{:.9})\nbudget {}\nobs2 jmax {}\nterms evaluated {}, skipped by guard {}\n",
        iv.lo,
        iv.hi,
        iv.covered_mass,
        stats::StatValue {
            kind: name.kind(),
            value: iv.mass_exact.clone()
        }
        .to_f64(),
        iv.budget,
        iv.obs2_jmax,
        iv.terms_evaluated,
        iv.terms_skipped
    );
    if timing {
        text.push_str(&format!("wall time {:.3}s\n", started.elapsed().as_secs_f64()));
    }
    Ok(Document { value, text, ok: true })
}

fn ratio(kind: StatKind, d: u64, t: u64, detail: bool, limits: KernelLimits) -> Result<Document, Failure> {
    let (ci, cd, ct) = stats::canonical(d, t)?;
    let cache = StatCache::new(limits);
    let v = cache.stat(kind, d, t)?;
    let component = graph::build_component(cd, ct)?;
    let mut value = json!({
        "kind": kind,
        "d": d,
        "t": t,
        "canonical": { "i": ci, "d": cd, "t": ct },
        "value": v.value.to_string(),
        "component": component.vertices(),
    });
    let mut text = format!(
        "{kind}({d}, {t}) = {}\ncanonical triple ({ci}, {cd}, {ct})\ncomponent {:?}\n",
        v.value,
        component.vertices()
    );
    if detail && kind == StatKind::S {
        let det = stats::stat_s_detail(cd, ct, &limits)?;
        text.push_str(&format!(
            "with anchor: size {}, count {}\nwithout anchor: size {}, count {}\n",
            det.size_with, det.count_with, det.size_without, det.count_without
        ));
        value["detail"] = serde_json::to_value(&det).expect("detail serializes");
    }
    Ok(Document { value, text, ok: true })
}

fn oracle_counts(n: u64, limits: OracleLimits) -> Result<Document, Failure> {
    let g = oracle::brute_all(n, &limits)?;
    let c = g.c.map_or_else(|| "skipped (guard)".to_string(), |c| c.to_string());
    let text = format!(
        "n={}\nQ={}\nM size={} count={}\nmaximal={}\nH={}\nG={}\nC={}\n",
        g.n, g.q, g.max_size, g.max_count, g.maximal_count, g.h, g.g, c
    );
    let value = serde_json::to_value(&g).expect("counts serialize");
    Ok(Document { value, text, ok: true })
}

fn verify(kind: StatKind, n: u64, limits: OracleLimits) -> Result<Document, Failure> {
    let cache = StatCache::default();
    let r = oracle::verify_telescoping(kind, n, &cache, &limits)?;
    let verdict = |ok: bool| if ok { "PASS" } else { "FAIL" };
    let mut text = String::new();
    for c in &r.checks {
        text.push_str(&format!("k={} {}", c.k, verdict(c.ok)));
        if !c.ok {
            text.push_str(&format!(" expected {} got {}", c.expected, c.got));
        }
        text.push('\n');
    }
    text.push_str(&format!(
        "verify {kind} {n}: {} (global {}, telescoped {})\n",
        verdict(r.passed()),
        r.global,
        r.telescoped
    ));
    if let Some(m) = r.first_mismatch() {
        text.push_str(&format!("first mismatch at k={}\n", m.k));
    }
    let mut value = serde_json::to_value(&r).expect("report serializes");
    value["result"] = json!(verdict(r.passed()));
    Ok(Document {
        value,
        text,
        ok: r.passed(),
    })
}

fn median(alpha_lo: f64, alpha_hi: f64, eta_lo: f64) -> Result<Document, Failure> {
    let m = analysis::median_bounds(alpha_lo, alpha_hi, eta_lo)?;
    let value = json!({
        "alpha_lo": alpha_lo,
        "alpha_hi": alpha_hi,
        "eta_lo": eta_lo,
        "lower_frac": m.lower_frac,
        "upper_frac": m.upper_frac,
        "note": "asymptotic fractions",
    });
    let text = format!(
        "{:.6} n < median < {:.6} n (asymptotic fractions)\n",
        m.lower_frac, m.upper_frac
    );
    Ok(Document { value, text, ok: true })
}

fn conjecture(limit: u64) -> Result<Document, Failure> {
    let found = oracle::check_submultiplicative(limit, &KernelLimits::default())?;
    let summary = if found.is_empty() {
        "no counterexamples".to_string()
    } else {
        format!("{} counterexamples", found.len())
    };
    let mut text = format!("limit {limit}: {summary}\n");
    for c in &found {
        text.push_str(&format!("{c:?}\n"));
    }
    let value = json!({ "limit": limit, "result": summary, "counterexamples": found });
    Ok(Document { value, text, ok: true })
}

fn render(doc: &Document, format: Format) -> String {
    match format {
        Format::Json => serde_json::to_string_pretty(&doc.value).expect("json") + "\n",
        Format::Text => doc.text.clone(),
        Format::Csv => csv(&doc.value),
    }
}

/// Header plus one row of the top-level fields; nested values are written
/// as JSON.
fn csv(value: &Value) -> String {
    let empty = Map::new();
    let obj = value.as_object().unwrap_or(&empty);
    let cell = |v: &Value| {
        let raw = match v {
            Value::String(s) => s.clone(),
            Value::Null => String::new(),
            other => other.to_string(),
        };
        if raw.contains([',', '"', '\n']) {
            format!("\"{}\"", raw.replace('"', "\"\""))
        } else {
            raw
        }
    };
    let header: Vec<&str> = obj.keys().map(String::as_str).collect();
    let row: Vec<String> = obj.values().map(cell).collect();
    format!("{}\n{}\n", header.join(","), row.join(","))
}
