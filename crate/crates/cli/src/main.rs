use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use tuplerc::harness::{rc_table, HarnessError, RcRow};
use tuplerc::rewrite::{RewriteError, TraceStep};
use tuplerc::{
    check_trs, parse_spec, parse_term, validate_bounds, CompatReport, Fuel, HarnessConfig, Overall, SearchConfig,
    SpecFile, Term, TupleAlgebra, Verdict,
};

const OK: u8 = 0;
const FAILED: u8 = 1;
const UNKNOWN: u8 = 2;
const USAGE: u8 = 3;

/// Cost-size tuple interpretations for applicative rewriting: check
/// compatibility, run programs and measure runtime complexity.
#[derive(Parser)]
#[command(name = "tuplerc", version)]
struct Cli {
    /// Print results as JSON on stdout.
    #[arg(long, global = true)]
    json: bool,
    /// Report elapsed time on stderr.
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check every rule against the interpretation in the file.
    Check {
        file: PathBuf,
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Normalise a term with leftmost-innermost rewriting.
    Run {
        file: PathBuf,
        term: String,
        /// Maximum number of rewrite steps.
        #[arg(long, default_value_t = 100_000)]
        fuel: u64,
        /// Print every intermediate term.
        #[arg(long)]
        trace: bool,
    },
    /// Length of the longest innermost derivation from a term.
    Dh {
        file: PathBuf,
        term: String,
        /// Maximum number of terms explored.
        #[arg(long)]
        fuel: Option<usize>,
    },
    /// Runtime complexity rc(n) for n = 1..max-n.
    Rc(Measure),
    /// Compare derivation heights of basic terms with the interpreted cost.
    Validate(Measure),
}

#[derive(Args)]
struct Measure {
    file: PathBuf,
    #[arg(long, default_value_t = 6)]
    max_n: usize,
    /// Maximum number of terms explored per basic term.
    #[arg(long)]
    fuel: Option<usize>,
    #[arg(long)]
    jobs: Option<usize>,
    /// Only consider basic terms headed by the file's `main` symbol.
    #[arg(long)]
    main_only: bool,
}

/// Errors that stop a command before it produces a result.
#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Refused(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Io { .. } | CliError::Input(_) => USAGE,
            CliError::Refused(_) => FAILED,
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { USAGE } else { OK });
        }
    };
    let start = Instant::now();
    let result = run(&cli);
    if cli.timing {
        eprintln!("time: {:.3}s", start.elapsed().as_secs_f64());
    }
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}

fn run(cli: &Cli) -> Result<u8, CliError> {
    match &cli.command {
        Command::Check { file, jobs } => check(cli.json, file, *jobs),
        Command::Run {
            file,
            term,
            fuel,
            trace,
        } => normalize(cli.json, file, term, *fuel, *trace),
        Command::Dh { file, term, fuel } => height(cli.json, file, term, *fuel),
        Command::Rc(m) => rc(cli.json, m),
        Command::Validate(m) => validate(cli.json, m),
    }
}

fn load(path: &Path) -> Result<SpecFile, CliError> {
    let shown = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: shown.clone(),
        source,
    })?;
    parse_spec(&text).map_err(|e| CliError::Input(format!("{shown}:{e}")))
}

fn algebra(spec: &SpecFile, path: &Path) -> Result<TupleAlgebra, CliError> {
    if !spec.has_interpretation() {
        return Err(CliError::Input(format!(
            "{}: the file gives no interpretations",
            path.display()
        )));
    }
    TupleAlgebra::from_spec(spec).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn term(spec: &SpecFile, text: &str) -> Result<Term, CliError> {
    parse_term(text, &spec.signature, &spec.vars).map_err(|e| CliError::Input(format!("term:{e}")))
}

fn pool<T: Send>(jobs: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T, CliError> {
    match jobs {
        None => Ok(f()),
        Some(j) => rayon::ThreadPoolBuilder::new()
            .num_threads(j.max(1))
            .build()
            .map(|p| p.install(f))
            .map_err(|e| CliError::Input(format!("could not start worker pool: {e}"))),
    }
}

fn emit(json: bool, value: &impl Serialize, human: impl FnOnce() -> String) {
    if json {
        println!("{}", serde_json::to_string_pretty(value).expect("reports serialize"));
    } else {
        print!("{}", human());
    }
}

fn check(json: bool, file: &Path, jobs: Option<usize>) -> Result<u8, CliError> {
    let spec = load(file)?;
    let alg = algebra(&spec, file)?;
    let trs = spec.trs();
    let report =
        pool(jobs, || check_trs(&trs, &alg, &SearchConfig::default()))?.map_err(|e| CliError::Input(e.to_string()))?;
    emit(json, &report, || render_check(&report));
    Ok(match report.overall {
        Overall::Compatible => OK,
        Overall::Incompatible => FAILED,
        Overall::Unknown => UNKNOWN,
    })
}

fn render_check(report: &CompatReport) -> String {
    let mut out = String::new();
    for r in &report.rules {
        let _ = writeln!(out, "rule {}: {}", r.index + 1, r.rule);
        let _ = writeln!(out, "  lhs = {}", r.lhs_value);
        let _ = writeln!(out, "  rhs = {}", r.rhs_value);
        for o in &r.obligations {
            let status = serde_json::to_value(o.status).expect("status serializes");
            let _ = writeln!(
                out,
                "  {}: {} {} {}  [{}]",
                o.path,
                o.lhs,
                o.relation,
                o.rhs,
                status.as_str().unwrap_or_default()
            );
        }
        let verdict = match &r.verdict {
            Verdict::Certified => "certified".to_string(),
            Verdict::Refuted { obligation, witness } => format!("refuted at {obligation}; witness {witness}"),
            Verdict::Unknown { reason } => format!("unknown ({reason})"),
        };
        let _ = writeln!(out, "  verdict: {verdict}");
    }
    let _ = writeln!(out, "overall: {}", report.overall);
    out
}

#[derive(Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
enum RunReport {
    Normal {
        term: Term,
        normal_form: Term,
        steps: u64,
        #[serde(skip_serializing_if = "Option::is_none")]
        trace: Option<Vec<TraceStep>>,
    },
    FuelExhausted {
        term: Term,
        last: Term,
        steps: u64,
    },
}

fn normalize(json: bool, file: &Path, text: &str, fuel: u64, trace: bool) -> Result<u8, CliError> {
    let spec = load(file)?;
    let t = term(&spec, text)?;
    match spec.trs().normalize(&t, fuel) {
        Ok(n) => {
            let report = RunReport::Normal {
                term: t,
                normal_form: n.term.clone(),
                steps: n.steps,
                trace: trace.then(|| n.trace.steps.clone()),
            };
            emit(json, &report, || {
                let mut out = String::new();
                if trace {
                    for s in &n.trace.steps {
                        let _ = writeln!(out, "{}    [rule {} at {}]", s.term, s.rule + 1, s.position);
                    }
                }
                let _ = writeln!(out, "{}", n.term);
                let _ = writeln!(out, "steps: {}", n.steps);
                out
            });
            Ok(OK)
        }
        Err(RewriteError::FuelExhausted { last, steps }) => {
            let report = RunReport::FuelExhausted {
                term: t,
                last: last.clone(),
                steps,
            };
            emit(json, &report, || {
                format!("fuel exhausted after {steps} steps at {last}\n")
            });
            Ok(UNKNOWN)
        }
        Err(e) => Err(CliError::Input(e.to_string())),
    }
}

fn fuel(max_nodes: Option<usize>) -> Fuel {
    let mut f = Fuel::default();
    if let Some(n) = max_nodes {
        f.max_nodes = n;
    }
    f
}

#[derive(Serialize)]
struct DhReport {
    term: Term,
    dh: Option<u64>,
    lower_bound: u64,
}

fn height(json: bool, file: &Path, text: &str, max_nodes: Option<usize>) -> Result<u8, CliError> {
    let spec = load(file)?;
    let t = term(&spec, text)?;
    let (dh, lower_bound) = match spec.trs().derivation_height(&t, fuel(max_nodes)) {
        Ok(h) => (Some(h), h),
        Err(RewriteError::HeightBudgetExhausted { lower_bound }) => (None, lower_bound),
        Err(RewriteError::FuelExhausted { steps, .. }) => (None, steps),
    };
    let report = DhReport {
        term: t,
        dh,
        lower_bound,
    };
    emit(json, &report, || match dh {
        Some(h) => format!("{h}\n"),
        None => format!("budget exhausted; dh >= {lower_bound}\n"),
    });
    Ok(if dh.is_some() { OK } else { UNKNOWN })
}

fn harness_config(spec: &SpecFile, m: &Measure) -> Result<HarnessConfig, CliError> {
    let only_head = if m.main_only {
        match &spec.main {
            Some(h) => Some(h.clone()),
            None => {
                return Err(CliError::Input(format!(
                    "{}: --main-only needs a `main` declaration",
                    m.file.display()
                )))
            }
        }
    } else {
        None
    };
    Ok(HarnessConfig {
        fuel: fuel(m.fuel),
        jobs: m.jobs,
        only_head,
        ..HarnessConfig::default()
    })
}

fn refusal(e: HarnessError) -> CliError {
    match e {
        HarnessError::Pool(_) | HarnessError::Compat(_) | HarnessError::NonGroundCost(_) => {
            CliError::Input(e.to_string())
        }
        _ => CliError::Refused(e.to_string()),
    }
}

fn rc(json: bool, m: &Measure) -> Result<u8, CliError> {
    let spec = load(&m.file)?;
    let cfg = harness_config(&spec, m)?;
    let rows = rc_table(&spec.trs(), m.max_n, &cfg).map_err(refusal)?;
    emit(json, &rows, || render_rc(&rows));
    Ok(if rows.iter().all(|r| r.exact) { OK } else { UNKNOWN })
}

fn render_rc(rows: &[RcRow]) -> String {
    let mut out = format!("{:>4} {:>8} {:>8}  {}\n", "n", "rc", "terms", "witness");
    for r in rows {
        let rc = if r.exact {
            r.rc.to_string()
        } else {
            format!(">={}", r.rc)
        };
        let witness = r.witnesses.first().map(String::as_str).unwrap_or("-");
        let _ = writeln!(out, "{:>4} {:>8} {:>8}  {}", r.n, rc, r.basic_terms, witness);
    }
    out
}

fn validate(json: bool, m: &Measure) -> Result<u8, CliError> {
    let spec = load(&m.file)?;
    let alg = algebra(&spec, &m.file)?;
    let cfg = harness_config(&spec, m)?;
    let report = validate_bounds(&spec.trs(), &alg, m.max_n, &cfg).map_err(refusal)?;
    emit(json, &report, || {
        let mut out = format!("{:>4} {:>8} {:>8} {:>8}\n", "n", "rc", "bound", "ratio");
        for r in &report.rows {
            let rc = if r.exact {
                r.rc.to_string()
            } else {
                format!(">={}", r.rc)
            };
            let _ = writeln!(out, "{:>4} {:>8} {:>8} {:>8.3}", r.n, rc, r.bound, r.max_ratio);
        }
        for v in &report.violations {
            let _ = writeln!(
                out,
                "violation: {} has dh >= {} but bound {}",
                v.term, v.dh_lower_bound, v.bound
            );
        }
        if !report.unproductive.is_empty() {
            let _ = writeln!(out, "no basic terms for: {}", report.unproductive.join(", "));
        }
        let _ = writeln!(
            out,
            "{} basic terms, {} violations, {} inconclusive",
            report.terms.len(),
            report.violations.len(),
            report.inconclusive
        );
        out
    });
    Ok(if !report.violations.is_empty() {
        FAILED
    } else if report.inconclusive > 0 {
        UNKNOWN
    } else {
        OK
    })
}
