//! Command-line front end.
//!
//! `-h` is the tower height, so help is only available as `--help`.

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{ArgAction, Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::conjecture::tables::TableId;
use crate::conjecture::{predict, predict_small_x, CaseTag, Prediction, PredictionSource, Variant};
use crate::error::Error;
use crate::tower::{format_residue, min_stable_height, stable_height, stable_residue, tet_mod, TowerBase, TowerSpec};
use crate::verify::{check_golden, parse_values, sweep, table_gen, verify_cell, GoldenOutcome, SweepConfig};

/// Usage errors (bad flags, unknown subcommands).
pub const EXIT_USAGE: i32 = 64;
/// Domain errors (excluded base, digit cap, ...).
pub const EXIT_DOMAIN: i32 = 1;
/// A worked example failed its check.
pub const EXIT_GOLDEN_FAILED: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "towerdigits", version, about = "Last digits of power towers and their stabilization heights")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Residue of the height-h tower mod 10^n.
    #[command(disable_help_flag = true)]
    Compute(ComputeArgs),
    /// Residue of the infinitely tall tower mod 10^n.
    #[command(disable_help_flag = true)]
    Stable(DigitsArgs),
    /// Smallest height from which the last n digits never change.
    #[command(disable_help_flag = true)]
    Minheight(DigitsArgs),
    /// Conjectured minimum height.
    #[command(disable_help_flag = true)]
    Predict(PredictArgs),
    /// Check the worked examples, one cell, or a sweep against the oracle.
    #[command(disable_help_flag = true)]
    Verify(VerifyArgs),
    /// Regenerate a source table from its closed forms and the oracle.
    #[command(disable_help_flag = true)]
    Table(TableArgs),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Text,
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct Output {
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, action = ArgAction::Help)]
    help: Option<bool>,
}

#[derive(Debug, Args)]
pub struct BaseArgs {
    /// Base q, not a multiple of 10.
    #[arg(short = 'q', long = "base")]
    pub q: u64,
    /// Power of 2 in E.
    #[arg(short = 'x', long = "exp2", conflicts_with = "exponent")]
    pub x: Option<u32>,
    /// Power of 5 in E [default: 0].
    #[arg(short = 'y', long = "exp5", conflicts_with = "exponent")]
    pub y: Option<u32>,
    /// Cofactor of E, coprime to 10 [default: 1].
    #[arg(short = 'a', long = "cofactor", conflicts_with = "exponent")]
    pub a: Option<u64>,
    /// Whole exponent E; x, y and a are factored out of it.
    #[arg(short = 'E', long = "exponent")]
    pub exponent: Option<BigUint>,
}

#[derive(Debug, Args)]
pub struct DigitsArgs {
    #[command(flatten)]
    pub base: BaseArgs,
    #[arg(short = 'n', long = "digits")]
    pub n: u32,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct ComputeArgs {
    #[command(flatten)]
    pub base: BaseArgs,
    /// Tower height; 0 gives 1.
    #[arg(short = 'h', long = "height")]
    pub h: u64,
    /// Number of trailing digits.
    #[arg(short = 'n', long = "digits")]
    pub n: u32,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    #[arg(short = 'q', long = "base")]
    pub q: u64,
    #[arg(short = 'x', long = "exp2")]
    pub x: u32,
    #[arg(short = 'y', long = "exp5", default_value_t = 0)]
    pub y: u32,
    #[arg(short = 'n', long = "digits")]
    pub n: u32,
    #[arg(long, default_value_t = Variant::default())]
    pub variant: Variant,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Single cell: base.
    #[arg(short = 'q', long = "base", requires_all = ["x", "n"], conflicts_with = "sweep")]
    pub q: Option<u64>,
    #[arg(short = 'x', long = "exp2")]
    pub x: Option<u32>,
    #[arg(short = 'y', long = "exp5", default_value_t = 0)]
    pub y: u32,
    #[arg(short = 'a', long = "cofactor", default_value_t = 1)]
    pub a: u64,
    #[arg(short = 'n', long = "digits")]
    pub n: Option<u32>,
    /// Run a grid sweep; ranges default to the desk-scale grid.
    #[arg(long)]
    pub sweep: bool,
    #[arg(long, requires = "sweep")]
    pub q_range: Option<String>,
    #[arg(long, requires = "sweep")]
    pub x_range: Option<String>,
    #[arg(long, requires = "sweep")]
    pub y_range: Option<String>,
    #[arg(long, requires = "sweep")]
    pub a_values: Option<String>,
    #[arg(long, requires = "sweep")]
    pub n_range: Option<String>,
    /// Evaluate sweep cells on one thread.
    #[arg(long, requires = "sweep")]
    pub serial: bool,
    #[arg(long, default_value_t = Variant::default())]
    pub variant: Variant,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct TableArgs {
    /// T1..T5 or T7.
    #[arg(long)]
    pub table: TableId,
    #[arg(long, default_value = "1..10")]
    pub n_range: String,
    #[command(flatten)]
    pub output: Output,
}

/// Exit code and everything the process would print.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunOutcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComputeOutput {
    pub q: u64,
    pub x: u32,
    pub y: u32,
    pub a: u64,
    pub h: u64,
    pub n: u32,
    pub residue: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StableOutput {
    pub q: u64,
    pub x: u32,
    pub y: u32,
    pub a: u64,
    pub n: u32,
    pub stable_height: u64,
    pub residue: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MinHeightOutput {
    pub q: u64,
    pub x: u32,
    pub y: u32,
    pub a: u64,
    pub n: u32,
    pub u: u64,
    pub stable_digits: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PredictOutput {
    pub q: u64,
    pub x: u32,
    pub y: u32,
    pub n: u32,
    /// `None` when no formula or table row covers the input.
    pub u: Option<u64>,
    pub case_tag: CaseTag,
    pub variant: Variant,
    pub clamped: bool,
    pub convention: bool,
    /// `formula`, `small-x-formula`, `table-T<k>` or `none`.
    pub source: String,
}

impl PredictOutput {
    fn new(q: u64, x: u32, y: u32, n: u32, p: Prediction) -> Self {
        Self {
            q,
            x,
            y,
            n,
            u: p.value(),
            case_tag: p.case_tag,
            variant: p.variant,
            clamped: p.clamped,
            convention: p.convention,
            source: source_name(p.source),
        }
    }
}

#[derive(Debug)]
enum Failure {
    Domain(String),
    /// Report rendered normally, but a worked example failed.
    Golden {
        body: String,
        stderr: String,
    },
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Domain(e.to_string())
    }
}

type Rendered = std::result::Result<(String, String), Failure>;

/// Parses `argv` (program name first) and runs the subcommand.
pub fn run<I, T>(argv: I) -> RunOutcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                RunOutcome { code: EXIT_USAGE, stdout: String::new(), stderr: text }
            } else {
                RunOutcome { code: 0, stdout: text, stderr: String::new() }
            };
        }
    };
    let output = match &cli.command {
        Command::Compute(c) => &c.output,
        Command::Stable(c) | Command::Minheight(c) => &c.output,
        Command::Predict(c) => &c.output,
        Command::Verify(c) => &c.output,
        Command::Table(c) => &c.output,
    };
    let (code, body, mut stderr) = match dispatch(&cli.command) {
        Ok((body, stderr)) => (0, body, stderr),
        Err(Failure::Golden { body, stderr }) => (EXIT_GOLDEN_FAILED, body, stderr + "worked-example check failed\n"),
        Err(Failure::Domain(msg)) => {
            return RunOutcome { code: EXIT_DOMAIN, stdout: String::new(), stderr: format!("error: {msg}\n") }
        }
    };
    let stdout = match &output.out {
        Some(path) => match std::fs::write(path, &body) {
            Ok(()) => String::new(),
            Err(e) => {
                stderr.push_str(&format!("error: cannot write {}: {e}\n", path.display()));
                return RunOutcome { code: EXIT_DOMAIN, stdout: String::new(), stderr };
            }
        },
        None => body,
    };
    RunOutcome { code, stdout, stderr }
}

fn resolve_base(args: &BaseArgs) -> std::result::Result<(TowerBase, String), Failure> {
    match &args.exponent {
        Some(e) => {
            let base = TowerBase::from_exponent(args.q, e)?;
            let note = format!("E = {e} = 2^{} * 5^{} * {}\n", base.x, base.y, base.a);
            Ok((base, note))
        }
        None => {
            let x = args.x.ok_or_else(|| Failure::Domain("either -x/--exp2 or -E/--exponent is required".into()))?;
            let base = TowerBase::new(args.q, x, args.y.unwrap_or(0), args.a.unwrap_or(1))?;
            Ok((base, String::new()))
        }
    }
}

fn dispatch(command: &Command) -> Rendered {
    match command {
        Command::Compute(args) => {
            let (base, note) = resolve_base(&args.base)?;
            let r = tet_mod(&TowerSpec { base, height: args.h }, args.n)?;
            let out = ComputeOutput {
                q: base.q,
                x: base.x,
                y: base.y,
                a: base.a,
                h: args.h,
                n: args.n,
                residue: format_residue(&r, args.n),
            };
            Ok((render_one(&out, args.output.format, |o| format!("{}\n", o.residue))?, note))
        }
        Command::Stable(args) => {
            let (base, note) = resolve_base(&args.base)?;
            let r = stable_residue(&base, args.n)?;
            let out = StableOutput {
                q: base.q,
                x: base.x,
                y: base.y,
                a: base.a,
                n: args.n,
                stable_height: stable_height(&base, args.n)?,
                residue: format_residue(&r, args.n),
            };
            Ok((render_one(&out, args.output.format, |o| format!("{}\n", o.residue))?, note))
        }
        Command::Minheight(args) => {
            let (base, note) = resolve_base(&args.base)?;
            let rec = min_stable_height(&base, args.n)?;
            let out = MinHeightOutput {
                q: base.q,
                x: base.x,
                y: base.y,
                a: base.a,
                n: args.n,
                u: rec.u_min,
                stable_digits: rec.stable_digits_padded(),
            };
            let text = |o: &MinHeightOutput| format!("u={} stable={}\n", o.u, o.stable_digits);
            Ok((render_one(&out, args.output.format, text)?, note))
        }
        Command::Predict(args) => {
            let p = if args.x >= 2 {
                predict(args.q, args.x, args.y, args.n, args.variant)?
            } else if args.y == 0 {
                predict_small_x(args.q, args.x, args.n)?
            } else {
                return Err(Failure::Domain(format!("no formula covers x = {} with y = {}", args.x, args.y)));
            };
            let out = PredictOutput::new(args.q, args.x, args.y, args.n, p);
            Ok((render_one(&out, args.output.format, predict_text)?, String::new()))
        }
        Command::Verify(args) => verify(args),
        Command::Table(args) => {
            let n_values: Vec<u32> = parse_values(&args.n_range)?;
            let report = table_gen(args.table, &n_values)?;
            let body = match args.output.format {
                Format::Json => json(&report)?,
                Format::Csv => csv_rows(&report.cells)?,
                Format::Text => table_text(&report),
            };
            Ok((body, String::new()))
        }
    }
}

fn source_name(source: PredictionSource) -> String {
    match source {
        PredictionSource::Formula => "formula".to_string(),
        PredictionSource::SmallXFormula => "small-x-formula".to_string(),
        PredictionSource::Table(t) => format!("table-{t}"),
        PredictionSource::None => "none".to_string(),
    }
}

fn predict_text(o: &PredictOutput) -> String {
    let u = o.u.map_or_else(|| "n/a".to_string(), |u| u.to_string());
    let mut line = format!("u={u} case={} variant={} source={}", o.case_tag, o.variant, o.source);
    if o.clamped {
        line.push_str(" clamped");
    }
    if o.convention {
        line.push_str(" convention");
    }
    line.push('\n');
    line
}

fn verify(args: &VerifyArgs) -> Rendered {
    let golden = check_golden(args.variant)?;
    let golden_ok = golden.iter().all(|g| g.passed);
    let mut notes = golden_summary(&golden);

    let body = if args.sweep {
        let defaults = SweepConfig::default();
        let config = SweepConfig {
            q: opt_values(&args.q_range, defaults.q)?,
            x: opt_values(&args.x_range, defaults.x)?,
            y: opt_values(&args.y_range, defaults.y)?,
            a: opt_values(&args.a_values, defaults.a)?,
            n: opt_values(&args.n_range, defaults.n)?,
            variant: args.variant,
            parallel: !args.serial,
        };
        let report = sweep(&config)?;
        match args.output.format {
            Format::Json => json(&report)?,
            Format::Csv => csv_rows(&report.cells)?,
            Format::Text => {
                let mut s = String::new();
                let _ = writeln!(s, "{}", report.config_digest);
                let _ = writeln!(
                    s,
                    "cells={} pass={} fail={} skip={}",
                    report.total(),
                    report.pass_count,
                    report.fail_count,
                    report.skip_count
                );
                let w = &report.variant_wins;
                let winner = w.winner().map_or("tie", |v| v.as_str());
                let _ = writeln!(
                    s,
                    "mod10_5 cells={} as_written={} example_consistent={} both={} neither={} winner={winner}",
                    w.cells, w.as_written, w.example_consistent, w.both, w.neither
                );
                for note in &report.notes {
                    let _ = writeln!(s, "note: {note}");
                }
                for c in report.mismatches() {
                    let _ = writeln!(
                        s,
                        "MISMATCH q={} x={} y={} a={} n={} oracle={} predicted={} stable={}",
                        c.q,
                        c.x,
                        c.y,
                        c.a,
                        c.n,
                        c.oracle_u,
                        c.predicted(args.variant).map_or("n/a".into(), |u| u.to_string()),
                        c.stable_digits
                    );
                }
                s
            }
        }
    } else if let Some(q) = args.q {
        let (x, n) = (args.x.expect("required by clap"), args.n.expect("required by clap"));
        let cell = verify_cell(q, x, args.y, args.a, n, args.variant)?;
        match args.output.format {
            Format::Json => json(&cell)?,
            Format::Csv => csv_rows(std::slice::from_ref(&cell))?,
            Format::Text => {
                let pred = |v: Option<u64>| v.map_or("n/a".into(), |u| u.to_string());
                let status = serde_json::to_value(cell.status).map_err(|e| Failure::Domain(e.to_string()))?;
                format!(
                    "{} oracle={} as_written={} example={} stable={}\n",
                    status.as_str().unwrap_or_default(),
                    cell.oracle_u,
                    pred(cell.predicted_u_as_written),
                    pred(cell.predicted_u_example),
                    cell.stable_digits
                )
            }
        }
    } else {
        match args.output.format {
            Format::Json => json(&golden)?,
            Format::Csv => csv_rows(&golden)?,
            Format::Text => std::mem::take(&mut notes),
        }
    };

    if golden_ok {
        Ok((body, notes))
    } else {
        Err(Failure::Golden { body, stderr: notes })
    }
}

fn golden_summary(golden: &[GoldenOutcome]) -> String {
    let mut s = String::new();
    for g in golden {
        let _ = writeln!(
            s,
            "{} {} q={} n={} claimed={} oracle={} predicted={} digits={}",
            if g.passed { "PASS" } else { "FAIL" },
            g.label,
            g.q,
            g.n,
            g.claimed_height,
            g.oracle_u,
            g.predicted_u,
            if g.digits_match { "match" } else { "differ" }
        );
    }
    s
}

fn opt_values<T>(spec: &Option<String>, default: Vec<T>) -> std::result::Result<Vec<T>, Failure>
where
    T: std::str::FromStr + Copy + Ord + Into<u64> + TryFrom<u64>,
{
    match spec {
        Some(s) => Ok(parse_values(s)?),
        None => Ok(default),
    }
}

fn render_one<T: Serialize>(
    value: &T,
    format: Format,
    text: impl Fn(&T) -> String,
) -> std::result::Result<String, Failure> {
    match format {
        Format::Text => Ok(text(value)),
        Format::Json => json(value),
        Format::Csv => csv_rows(std::slice::from_ref(value)),
    }
}

fn json<T: Serialize + ?Sized>(value: &T) -> std::result::Result<String, Failure> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| Failure::Domain(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

fn csv_rows<T: Serialize>(rows: &[T]) -> std::result::Result<String, Failure> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row).map_err(|e| Failure::Domain(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| Failure::Domain(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Failure::Domain(e.to_string()))
}

fn table_text(report: &crate::verify::TableReport) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "{} n={} agree={} disagree={} unchecked={}",
        report.table,
        describe_list(&report.n_values),
        report.agree_count,
        report.disagree_count,
        report.unchecked_count
    );
    let mut i = 0;
    while i < report.cells.len() {
        let first = &report.cells[i];
        let group: Vec<_> = report.cells[i..].iter().take_while(|c| c.q == first.q && c.x == first.x).collect();
        i += group.len();
        let show = |v: Option<String>| v.unwrap_or_else(|| "-".into());
        let tab: Vec<String> = group.iter().map(|c| show(c.tabulated_u.map(|u| u.to_string()))).collect();
        let ora: Vec<String> = group.iter().map(|c| show(c.oracle_u.map(|u| u.to_string()))).collect();
        let agree = group.iter().filter(|c| c.agree == Some(true)).count();
        let checked = group.iter().filter(|c| c.agree.is_some()).count();
        let mut line = format!(
            "q={} x={} form={} table=[{}] oracle=[{}] agree={agree}/{checked}",
            first.q,
            first.x,
            first.closed_form,
            tab.join(","),
            ora.join(",")
        );
        if first.convention {
            line.push_str(" convention");
        }
        if first.flagged_anomaly {
            line.push_str(" flagged");
        }
        let _ = writeln!(s, "{line}");
    }
    s
}

fn describe_list(values: &[u32]) -> String {
    match (values.first(), values.last()) {
        (Some(lo), Some(hi)) if values.len() as u32 == hi - lo + 1 && values.len() > 1 => format!("{lo}..{hi}"),
        _ => values.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(","),
    }
}
