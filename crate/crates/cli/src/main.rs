use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use serde_json::json;

use balpow::linforms::BoundContext;
use balpow::pipeline::{
    self, build_certificate, derive_upper_bound, published, run_reduction, BoundReport,
    PipelineConfig, PipelineError, ReductionReport,
};
use balpow::realnum::{parse_decimal, PrecisionPolicy};
use balpow::search::{self, SearchBounds, Solution};
use balpow::sequence::balancing;

#[derive(Parser)]
#[command(name = "balpow")]
#[command(about = "Sums of two balancing numbers that are sums of powers of two")]
#[command(version)]
struct Cli {
    /// Initial working precision in bits
    #[arg(long, global = true, default_value_t = 256)]
    precision: u32,

    /// Working precision never exceeds this many bits
    #[arg(long, global = true, default_value_t = 65536)]
    precision_cap: u32,

    /// Worker threads (0 = one per core)
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,

    /// Use the printed M, A values and grid minima instead of recomputed ones
    #[arg(long, global = true, default_value_t = false)]
    paper_constants: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Table,
}

#[derive(Subcommand)]
enum Command {
    /// Exhaustive search for solutions with n1 <= n1-max
    Search {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        n1_max: usize,
        /// Largest a1 to try: "auto" or an integer
        #[arg(long, default_value = "auto")]
        a1_max: String,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
    },
    /// Check one tuple exactly; exit status 0 iff the identity holds
    Verify {
        #[arg(long)]
        k: usize,
        /// n1,n2,a1[,a2[,a3]]
        #[arg(long)]
        solution: String,
    },
    /// Upper bounds from linear forms in logarithms
    Bounds {
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
    },
    /// Reduced gap bounds and the final bound on n1
    Reduce {
        /// Bound on n1 used for the reductions, as a decimal
        #[arg(long = "M")]
        m: Option<String>,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
    },
    /// Full certificate; exit status 0 iff the verdict is "complete"
    Certify {
        /// Write the certificate here instead of standard output
        #[arg(long)]
        out: Option<PathBuf>,
        /// Search cutoff for n1
        #[arg(long, default_value_t = published::SEARCH_CUTOFF)]
        n1_max: usize,
    },
}

enum Failure {
    Verification(String),
    Pipeline(PipelineError),
}

impl From<PipelineError> for Failure {
    fn from(e: PipelineError) -> Self {
        Failure::Pipeline(e)
    }
}

impl From<search::SearchError> for Failure {
    fn from(e: search::SearchError) -> Self {
        Failure::Pipeline(e.into())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.jobs > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.jobs)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(1)
        }
        Err(Failure::Pipeline(e)) => {
            eprintln!("error: {e}");
            if e.is_precision_cap() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}

fn config(cli: &Cli) -> Result<PipelineConfig, Failure> {
    if cli.precision < 16 || cli.precision > cli.precision_cap {
        return Err(Failure::Verification(format!(
            "invalid precision {} with cap {}",
            cli.precision, cli.precision_cap
        )));
    }
    Ok(PipelineConfig {
        policy: PrecisionPolicy {
            initial: cli.precision,
            cap: cli.precision_cap,
        },
        paper_constants: cli.paper_constants,
        ..PipelineConfig::default()
    })
}

fn run(cli: &Cli) -> Result<(), Failure> {
    match &cli.command {
        Command::Search {
            k,
            n1_max,
            a1_max,
            format,
        } => cmd_search(*k, *n1_max, a1_max, *format),
        Command::Verify { k, solution } => cmd_verify(*k, solution),
        Command::Bounds { format } => {
            let cfg = config(cli)?;
            let report = derive_upper_bound(&cfg.bounds)?;
            print!("{}", render_bounds(&report, *format)?);
            Ok(())
        }
        Command::Reduce { m, format } => {
            let mut cfg = config(cli)?;
            if let Some(text) = m {
                cfg.m_override = Some(parse_m(text)?);
            }
            let bounds = derive_upper_bound(&cfg.bounds)?;
            let m = cfg.reduction_m(&bounds);
            let report = run_reduction(&m, &cfg)?;
            print!("{}", render_reduction(&report, *format));
            if report.final_n1_bound > cfg.search_cutoff as i64 {
                return Err(Failure::Verification(format!(
                    "final bound n1 <= {} does not reach the search cutoff {}",
                    report.final_n1_bound, cfg.search_cutoff
                )));
            }
            Ok(())
        }
        Command::Certify { out, n1_max } => {
            let mut cfg = config(cli)?;
            cfg.search_cutoff = *n1_max;
            let bounds = derive_upper_bound(&BoundContext::default())?;
            let m = cfg.reduction_m(&bounds);
            let reduction = run_reduction(&m, &cfg)?;
            let cert = build_certificate(&cfg, &bounds, &reduction)?;
            let text = cert.to_json();
            match out {
                Some(path) => fs::write(path, &text).map_err(|e| {
                    Failure::Verification(format!("cannot write {}: {e}", path.display()))
                })?,
                None => print!("{text}"),
            }
            eprintln!("verdict: {}", cert.verdict);
            if cert.is_complete() {
                Ok(())
            } else {
                Err(Failure::Verification("certificate is incomplete".into()))
            }
        }
    }
}

fn parse_m(text: &str) -> Result<BigInt, Failure> {
    let (num, den) = parse_decimal(text)
        .ok_or_else(|| Failure::Verification(format!("cannot parse M = {text:?}")))?;
    // smallest integer not below the given value
    let m = -((-num) / &den);
    let m = if &m * &den < parse_decimal(text).expect("parsed above").0 {
        m + 1
    } else {
        m
    };
    Ok(m)
}

fn cmd_search(k: usize, n1_max: usize, a1_max: &str, format: Format) -> Result<(), Failure> {
    let bounds = if a1_max == "auto" {
        SearchBounds::auto(n1_max)?
    } else {
        let a1_max = a1_max
            .parse()
            .map_err(|_| Failure::Verification(format!("invalid --a1-max {a1_max:?}")))?;
        SearchBounds { n1_max, a1_max }
    };
    let found = search::solve(k, bounds)?;
    print!("{}", render_solutions(k, &bounds, &found, format));
    report_diff(k, n1_max, &found);
    Ok(())
}

fn header(k: usize) -> Vec<String> {
    let mut h = vec!["n1".to_string(), "n2".to_string()];
    h.extend((1..=k).map(|i| format!("a{i}")));
    h
}

fn render_solutions(k: usize, bounds: &SearchBounds, found: &[Solution], format: Format) -> String {
    let rows: Vec<Vec<String>> = found
        .iter()
        .map(|s| s.as_tuple().iter().map(u64::to_string).collect())
        .collect();
    let mut out = String::new();
    match format {
        Format::Json => {
            let v = json!({
                "k": k.to_string(),
                "n1_max": bounds.n1_max.to_string(),
                "a1_max": bounds.a1_max.to_string(),
                "solutions": rows,
            });
            out.push_str(&serde_json::to_string_pretty(&v).expect("serializable"));
            out.push('\n');
        }
        Format::Csv => {
            out.push_str(&header(k).join(","));
            out.push('\n');
            for r in &rows {
                out.push_str(&r.join(","));
                out.push('\n');
            }
        }
        Format::Table => {
            let line = |cells: &[String]| {
                cells
                    .iter()
                    .map(|c| format!("{c:>4}"))
                    .collect::<Vec<_>>()
                    .join("")
            };
            out.push_str(&line(&header(k)));
            out.push('\n');
            for r in &rows {
                out.push_str(&line(r));
                out.push('\n');
            }
        }
    }
    out
}

/// Differences from the published list, on standard error.
fn report_diff(k: usize, n1_max: usize, found: &[Solution]) {
    let published = published::solutions(k);
    if published.is_empty() {
        return;
    }
    let computed: Vec<Vec<u64>> = found.iter().map(Solution::as_tuple).collect();
    let show = |t: &[u64]| {
        format!(
            "({})",
            t.iter().map(u64::to_string).collect::<Vec<_>>().join(",")
        )
    };
    let mut clean = true;
    for t in &published {
        let sol = Solution::new(
            t[0] as usize,
            t[1] as usize,
            t[2..].iter().map(|&a| a as u32).collect(),
        );
        if !search::verify(&sol) {
            eprintln!("published {} fails exact verification", show(t));
            clean = false;
        } else if !computed.contains(t) && (t[0] as usize) <= n1_max {
            eprintln!("published {} not found", show(t));
            clean = false;
        }
    }
    for t in computed.iter().filter(|t| !published.contains(t)) {
        eprintln!("computed {} is not in the published list", show(t));
        clean = false;
    }
    if clean {
        eprintln!(
            "matches the published list of {} solutions",
            published.len()
        );
    }
}

fn cmd_verify(k: usize, text: &str) -> Result<(), Failure> {
    let sol: Solution = text.parse()?;
    if sol.k() != k {
        return Err(Failure::Verification(format!(
            "expected {k} exponents, got {}",
            sol.k()
        )));
    }
    let lhs = balancing(sol.n1) + balancing(sol.n2);
    let rhs: num_bigint::BigUint = sol
        .exponents
        .iter()
        .map(|&a| num_bigint::BigUint::from(1u32) << a)
        .sum();
    if search::verify(&sol) {
        println!("{sol}: B({}) + B({}) = {lhs} holds", sol.n1, sol.n2);
        Ok(())
    } else {
        Err(Failure::Verification(format!(
            "{sol}: B({}) + B({}) = {lhs} but the powers of two sum to {rhs}",
            sol.n1, sol.n2
        )))
    }
}

fn render_bounds(report: &BoundReport, format: Format) -> Result<String, PipelineError> {
    let digits = report.context.digits;
    let mut out = String::new();
    if format == Format::Json {
        let mut rows = Vec::new();
        for (r, row) in published::TABLE_ROWS.iter().enumerate() {
            let mut cells = serde_json::Map::new();
            for (c, col) in published::TABLE_COLUMNS.iter().enumerate() {
                let b = &report.table[r][c];
                cells.insert(
                    col.label().to_string(),
                    json!({
                        "coefficient": b.coefficient_upper(digits)?,
                        "exponent": b.exponent.to_string(),
                    }),
                );
            }
            rows.push(json!({ "quantity": format!("({}) {}", row.name(), row.unit_name()), "cases": cells }));
        }
        let steps: Vec<_> = report
            .checks
            .iter()
            .map(|c| {
                Ok(json!({
                    "step": c.step.number().to_string(),
                    "coefficient": c.computed.coefficient_upper(digits)?,
                    "exponent": c.computed.exponent.to_string(),
                    "published": poly_text(c.published.0, c.published.1),
                    "within_window": c.in_window(),
                }))
            })
            .collect::<Result<_, PipelineError>>()?;
        let v = json!({
            "bound_table": rows,
            "steps": steps,
            "n1_upper": pipeline::RealValue::from_interval(&report.n1_upper),
        });
        out.push_str(&serde_json::to_string_pretty(&v).expect("serializable"));
        out.push('\n');
        return Ok(out);
    }
    let _ = writeln!(out, "Upper bounds, assuming n1 > {}", report.context.cutoff);
    let _ = writeln!(out, "{:<18}{:<26}{:<26}case 2", "", "case 1A", "case 1B");
    for (r, row) in published::TABLE_ROWS.iter().enumerate() {
        let mut line = format!("{:<18}", format!("({}) {}", row.name(), row.unit_name()));
        for b in &report.table[r] {
            let _ = write!(line, "{:<26}", format!("{}", PrettyBound(b, digits)));
        }
        let _ = writeln!(out, "{}", line.trim_end());
    }
    let _ = writeln!(out);
    for c in &report.checks {
        let _ = writeln!(
            out,
            "step {}: {:<26} printed {}",
            c.step.number(),
            format!("{}", PrettyBound(&c.computed, digits)),
            poly_text(c.published.0, c.published.1)
        );
    }
    let _ = writeln!(out);
    let _ = writeln!(out, "n1 < {}", report.n1_upper.upper_decimal(6));
    Ok(out)
}

fn poly_text(c: &str, k: u32) -> String {
    match k {
        0 => c.to_string(),
        1 => format!("{c} (1+log n1)"),
        k => format!("{c} (1+log n1)^{k}"),
    }
}

struct PrettyBound<'a>(&'a balpow::linforms::PolyLogBound, usize);

impl std::fmt::Display for PrettyBound<'_> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let c = self
            .0
            .coefficient_upper(self.1)
            .map_err(|_| std::fmt::Error)?;
        f.write_str(&poly_text(&c, self.0.exponent))
    }
}

fn render_reduction(report: &ReductionReport, format: Format) -> String {
    let mut out = String::new();
    if format == Format::Json {
        let rows: Vec<_> = published::TABLE_ROWS
            .iter()
            .enumerate()
            .map(|(r, row)| {
                let cells: serde_json::Map<_, _> = published::TABLE_COLUMNS
                    .iter()
                    .enumerate()
                    .map(|(c, col)| {
                        (
                            col.label().to_string(),
                            json!(report.table[r][c].to_string()),
                        )
                    })
                    .collect();
                json!({ "quantity": row.name(), "cases": cells })
            })
            .collect();
        let steps: Vec<_> = report
            .steps
            .iter()
            .map(|s| {
                let results: Vec<_> = s
                    .results
                    .iter()
                    .map(|(t, o)| {
                        json!({
                            "target": t.name(),
                            "w_bound": o.w_bound.to_string(),
                            "convergent_index": o.convergent_used.index.to_string(),
                            "epsilon": pipeline::RealValue::from_interval(&o.epsilon),
                            "members": o.members.to_string(),
                        })
                    })
                    .collect();
                json!({ "step": s.step.number().to_string(), "case": s.case, "results": results })
            })
            .collect();
        let v = json!({
            "M": report.m.to_string(),
            "reduction_table": rows,
            "steps": steps,
            "final_n1_bound": report.final_n1_bound.to_string(),
        });
        out.push_str(&serde_json::to_string_pretty(&v).expect("serializable"));
        out.push('\n');
        return out;
    }
    let _ = writeln!(out, "M = {}", report.m);
    for s in &report.steps {
        for (t, o) in &s.results {
            let _ = writeln!(
                out,
                "step {} (case {}): {} <= {:<4} q_{}  eps >= {}  [{} members]",
                s.step.number(),
                s.case,
                t,
                o.w_bound,
                o.convergent_used.index,
                o.epsilon.lower_decimal(6),
                o.members
            );
        }
    }
    let _ = writeln!(out);
    let _ = writeln!(
        out,
        "{:<10}{:>9}{:>9}{:>9}",
        "", "case 1A", "case 1B", "case 2"
    );
    for (r, row) in published::TABLE_ROWS.iter().enumerate() {
        let t = report.table[r];
        let _ = writeln!(out, "{:<10}{:>9}{:>9}{:>9}", row.name(), t[0], t[1], t[2]);
    }
    let _ = writeln!(out);
    let _ = writeln!(out, "n1 <= {}", report.final_n1_bound);
    out
}
