//! `sharpe` command-line front end.
//!
//! Exit codes: 0 success, 1 usage, 2 unparseable input, 3 degenerate data
//! (or a target the test cannot reach).

use std::ffi::OsString;
use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::autocorr::{self, estimate_rho_with, RhoEstimate, ThirdLag};
use crate::error::Error;
use crate::montecarlo::{empirical_type1, render_calibration_csv, Innovations, RhoMode, SimulationConfig};
use crate::series::{sample_mean, sample_std, ObservationSeries, SeriesKind, SharpeEstimate};
use crate::significance::{evaluate, min_sharpe, studentized_statistic, ModifiedForm, TestKind, TestSpec};
use crate::special::{f_sf, normal_cdf, t_cdf, Probability};
use crate::tables::{self, Frequency, ProbBand, SrBand, TableSpec};
use crate::Result;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_DEGENERATE: i32 = 3;

/// Below this many observations the autocorrelation recipe is noisy.
const AUTO_RHO_WARN_N: usize = 50;

#[derive(Debug, Parser)]
#[command(name = "sharpe", version, about = "Skill or luck: significance tests for Sharpe ratios")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Report Sharpe ratios, autocorrelation and every test for a series.
    Analyze(AnalyzeArgs),
    /// Smallest annualized Sharpe reaching a target skill.
    MinSharpe(MinSharpeArgs),
    /// Generate a reference table as CSV or HTML.
    Table(TableArgs),
    /// Empirical type-I error of a test on simulated AR(1) paths.
    Simulate(SimulateArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum KindArg {
    Returns,
    Pnl,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FreqArg {
    Daily,
    Monthly,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TestArg {
    Student,
    Fisher,
    WaldRaw,
    WaldStudentized,
    WaldModified,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TailArg {
    One,
    Two,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormArg {
    Derived,
    Printed,
}

impl From<FormArg> for ModifiedForm {
    fn from(f: FormArg) -> Self {
        match f {
            FormArg::Derived => ModifiedForm::Derived,
            FormArg::Printed => ModifiedForm::Printed,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum TableKindArg {
    MinSharpe,
    MinSharpeConfidence,
    Skill,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum RhoModeArg {
    True,
    Estimated,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum RhoArg {
    Auto,
    Value(f64),
}

fn parse_rho_arg(s: &str) -> std::result::Result<RhoArg, String> {
    if s.eq_ignore_ascii_case("auto") {
        return Ok(RhoArg::Auto);
    }
    let v: f64 = s.parse().map_err(|_| format!("expected 'auto' or a number, got '{s}'"))?;
    check_rho(v).map(RhoArg::Value)
}

fn check_rho(v: f64) -> std::result::Result<f64, String> {
    if v.abs() < 1.0 {
        Ok(v)
    } else {
        Err(format!("autocorrelation must lie in (-1, 1), got {v}"))
    }
}

fn parse_rho(s: &str) -> std::result::Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("not a number: '{s}'"))?;
    check_rho(v)
}

fn parse_open_unit(s: &str) -> std::result::Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("not a number: '{s}'"))?;
    if v > 0.0 && v < 1.0 {
        Ok(v)
    } else {
        Err(format!("must lie in (0, 1), got {v}"))
    }
}

fn parse_closed_unit(s: &str) -> std::result::Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("not a number: '{s}'"))?;
    if (0.0..=1.0).contains(&v) {
        Ok(v)
    } else {
        Err(format!("must lie in [0, 1], got {v}"))
    }
}

fn parse_positive(s: &str) -> std::result::Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("not a number: '{s}'"))?;
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(format!("must be positive, got {v}"))
    }
}

#[derive(Debug, Args)]
struct FrequencyArgs {
    /// Sampling frequency of the observations.
    #[arg(long, value_enum, default_value = "daily", conflicts_with = "periods_per_year")]
    freq: FreqArg,
    /// Observations per year, overriding --freq.
    #[arg(long, value_parser = parse_positive)]
    periods_per_year: Option<f64>,
}

impl FrequencyArgs {
    fn frequency(&self) -> Frequency {
        match (self.periods_per_year, self.freq) {
            (Some(f), _) => Frequency::Custom(f),
            (None, FreqArg::Daily) => Frequency::Daily,
            (None, FreqArg::Monthly) => Frequency::Monthly,
        }
    }
}

#[derive(Debug, Args)]
struct TestArgs {
    /// Test family.
    #[arg(long, value_enum, default_value = "wald-studentized")]
    test: TestArg,
    /// Tail; only the Student test has a one-tailed version.
    #[arg(long, value_enum, default_value = "two")]
    tail: TailArg,
    /// Correction used by the modified Wald test.
    #[arg(long, value_enum, default_value = "derived")]
    modified_form: FormArg,
}

impl TestArgs {
    fn kind(&self) -> std::result::Result<TestKind, CliError> {
        match (self.test, self.tail) {
            (TestArg::Student, TailArg::One) => Ok(TestKind::StudentOneTailed),
            (TestArg::Student, TailArg::Two) => Ok(TestKind::StudentTwoTailed),
            (_, TailArg::One) => Err(CliError::Usage("only the student test has a one-tailed version".into())),
            (TestArg::Fisher, _) => Ok(TestKind::Fisher),
            (TestArg::WaldRaw, _) => Ok(TestKind::WaldRaw),
            (TestArg::WaldStudentized, _) => Ok(TestKind::WaldStudentized),
            (TestArg::WaldModified, _) => Ok(TestKind::WaldModified),
        }
    }
}

#[derive(Debug, Args)]
struct AnalyzeArgs {
    /// CSV file with one `value` column or `date,value` columns; `-` reads stdin.
    file: PathBuf,
    /// What the values represent.
    #[arg(long, value_enum, default_value = "returns")]
    kind: KindArg,
    #[command(flatten)]
    freq: FrequencyArgs,
    /// Annual risk-free rate, spread evenly over the periods of a year.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    rf: f64,
    /// First-order autocorrelation, or `auto` to estimate it.
    #[arg(long, default_value = "auto", value_parser = parse_rho_arg, allow_negative_numbers = true)]
    rho: RhoArg,
    /// Use the covariance with lag two for the third recipe component.
    #[arg(long)]
    printed_lag: bool,
    /// Correction used by the modified Wald test.
    #[arg(long, value_enum, default_value = "derived")]
    modified_form: FormArg,
    #[arg(long, value_enum, default_value = "text")]
    format: FormatArg,
    /// Recompute every reported number independently and compare.
    #[arg(long, hide = true)]
    verify: bool,
}

#[derive(Debug, Args)]
struct MinSharpeArgs {
    #[command(flatten)]
    test: TestArgs,
    /// Number of observations.
    #[arg(long)]
    n: usize,
    #[command(flatten)]
    freq: FrequencyArgs,
    #[arg(long, default_value_t = 0.0, value_parser = parse_rho, allow_negative_numbers = true)]
    rho: f64,
    /// Target skill probability in (0, 1).
    #[arg(long, value_parser = parse_open_unit)]
    confidence: f64,
}

#[derive(Debug, Args)]
struct TableArgs {
    #[arg(long, value_enum, default_value = "min-sharpe")]
    kind: TableKindArg,
    #[command(flatten)]
    test: TestArgs,
    /// Skill percent (min-sharpe), rho percent (min-sharpe-confidence) or
    /// annualized Sharpe (skill). Defaults to 90, 0 and 1.0.
    #[arg(long, allow_negative_numbers = true)]
    target: Option<f64>,
    #[arg(long, value_enum, default_value = "daily")]
    freq: FreqArg,
    /// Output file, or a directory with --all; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Emit an HTML table with color classes instead of CSV.
    #[arg(long)]
    html: bool,
    /// Write the 42 standard tables into the --out directory.
    #[arg(long, requires = "out")]
    all: bool,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    #[command(flatten)]
    test: TestArgs,
    /// Run all six tests.
    #[arg(long)]
    all_tests: bool,
    #[arg(long, default_value_t = 0.0, value_parser = parse_rho, allow_negative_numbers = true)]
    rho: f64,
    /// Innovation standard deviation.
    #[arg(long, default_value_t = 0.01, value_parser = parse_positive)]
    sigma: f64,
    /// Mean return, which is also the risk-free rate of the null.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    mu: f64,
    #[arg(long, default_value_t = 252)]
    n: usize,
    #[arg(long, default_value_t = 10_000)]
    reps: usize,
    #[arg(long, default_value_t = 0.05, value_parser = parse_closed_unit)]
    alpha: f64,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[command(flatten)]
    freq: FrequencyArgs,
    /// Feed each test the simulated rho or the per-path estimate.
    #[arg(long, value_enum, default_value = "true")]
    rho_mode: RhoModeArg,
    /// Scaled Student-t innovations with this many degrees of freedom.
    #[arg(long)]
    heavy_tail_dof: Option<f64>,
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Parse(String),
    Degenerate(String),
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Parse(_) => EXIT_PARSE,
            CliError::Degenerate(_) => EXIT_DEGENERATE,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Parse(m) | CliError::Degenerate(m) => m,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let msg = e.to_string();
        match e {
            Error::Parse { .. } => CliError::Parse(msg),
            Error::Degenerate(_) | Error::Unreachable { .. } | Error::NoConvergence { .. } => {
                CliError::Degenerate(msg)
            }
            Error::Domain { .. } | Error::InvalidTable(_) => CliError::Usage(msg),
        }
    }
}

fn io_error(context: &str, e: io::Error) -> CliError {
    CliError::Parse(format!("{context}: {e}"))
}

/// Runs the CLI on `args` (including the program name) and returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{e}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(stderr, "{}", e.render());
                    EXIT_USAGE
                }
            };
        }
    };
    let result = match cli.command {
        Command::Analyze(a) => analyze(&a, stdout, stderr),
        Command::MinSharpe(a) => run_min_sharpe(&a, stdout),
        Command::Table(a) => run_table(&a, stdout),
        Command::Simulate(a) => run_simulate(&a, stdout),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(stderr, "error: {}", e.message());
            e.exit_code()
        }
    }
}

/// Parses a single `value` column or `date,value` columns. A first row whose
/// value is not numeric is taken as a header. Row numbers in errors are 1-based
/// lines of the input.
pub fn parse_series_csv(input: &str) -> Result<Vec<f64>> {
    // The reader's line counter treats CRLF differently; normalize first.
    let input = input.replace("\r\n", "\n");
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(input.as_bytes());
    let mut values = Vec::new();
    let mut first = true;
    for record in reader.records() {
        let record = record.map_err(|e| Error::Parse {
            row: e.position().map_or(0, |p| p.line() as usize),
            reason: e.to_string(),
        })?;
        let row = record.position().map_or(0, |p| p.line() as usize);
        let is_first = std::mem::replace(&mut first, false);
        let field = match record.len() {
            0 => continue,
            1 if record[0].is_empty() => continue,
            1 => &record[0],
            2 => &record[1],
            k => {
                return Err(Error::Parse { row, reason: format!("expected 1 or 2 columns, found {k}") });
            }
        };
        match field.parse::<f64>() {
            Ok(v) if v.is_finite() => values.push(v),
            Ok(_) => return Err(Error::Parse { row, reason: format!("value '{field}' is not finite") }),
            Err(_) if is_first => {}
            Err(_) => return Err(Error::Parse { row, reason: format!("cannot parse '{field}' as a number") }),
        }
    }
    Ok(values)
}

fn read_input(path: &Path) -> std::result::Result<String, CliError> {
    if path == Path::new("-") {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s).map_err(|e| io_error("stdin", e))?;
        Ok(s)
    } else {
        fs::read_to_string(path).map_err(|e| io_error(&path.display().to_string(), e))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RhoReport {
    /// `auto` or `fixed`.
    pub source: &'static str,
    pub value: f64,
    pub components: Option<RhoEstimate>,
}

#[derive(Debug, Clone, Serialize)]
pub struct TestReport {
    pub test: TestKind,
    pub statistic: f64,
    pub luck: f64,
    pub skill: f64,
    pub skill_class: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub n: usize,
    pub periods_per_year: f64,
    pub kind: SeriesKind,
    pub risk_free_per_period: f64,
    pub mean: f64,
    pub std: f64,
    pub sr_period: f64,
    pub sr_annual_sqrt: f64,
    pub rho: RhoReport,
    pub delta: f64,
    pub sr_annual_adjusted: f64,
    pub eta: f64,
    pub sharpe_class: String,
    pub modified_form: ModifiedForm,
    pub tests: Vec<TestReport>,
}

/// Builds the report for a series; `rho = None` estimates it.
pub fn build_report(
    series: &ObservationSeries,
    rho: Option<f64>,
    third: ThirdLag,
    form: ModifiedForm,
) -> Result<Report> {
    let rho_report = match rho {
        Some(v) => RhoReport { source: "fixed", value: v, components: None },
        None => {
            let est = estimate_rho_with(series.values(), third)?;
            RhoReport { source: "auto", value: est.rho, components: Some(est) }
        }
    };
    let est = SharpeEstimate::from_series(series, rho_report.value)?;
    let f = series.periods_per_year();
    let mut tests = Vec::with_capacity(TestKind::ALL.len());
    for kind in TestKind::ALL {
        let spec = TestSpec::new(kind, series.len(), f, rho_report.value)?.with_modified_form(form);
        let r = evaluate(est.sr_annual_sqrt, &spec)?;
        tests.push(TestReport {
            test: kind,
            statistic: r.statistic,
            luck: r.luck.value(),
            skill: r.skill.value(),
            skill_class: ProbBand::classify(r.skill.value()).css_class(),
        });
    }
    Ok(Report {
        n: est.n,
        periods_per_year: f,
        kind: series.kind(),
        risk_free_per_period: series.risk_free_per_period(),
        mean: series.mean(),
        std: series.std(),
        sr_period: est.sr_period,
        sr_annual_sqrt: est.sr_annual_sqrt,
        rho: rho_report,
        delta: est.delta,
        sr_annual_adjusted: est.sr_annual_adjusted,
        eta: est.eta,
        sharpe_class: SrBand::classify(est.sr_annual_sqrt).css_class(),
        modified_form: form,
        tests,
    })
}

/// Recomputes the report from the raw values along a separate route and
/// returns the first mismatch beyond 1e-12.
pub fn verify_report(report: &Report, values: &[f64]) -> Result<Option<String>> {
    const TOL: f64 = 1e-12;
    let n = values.len() as f64;
    let mean = sample_mean(values)?;
    let std = sample_std(values)?;
    let rf = report.risk_free_per_period;
    let sr_period = (mean - rf) / std;
    let f = report.periods_per_year;
    let delta = autocorr::delta(report.rho.value, f.max(1.0))?;
    let s = f.sqrt() * sr_period;
    let t = n.sqrt() * delta * sr_period;
    let nu = n - 1.0;
    let mut checks = vec![
        ("mean", report.mean, mean),
        ("std", report.std, std),
        ("sr_period", report.sr_period, sr_period),
        ("sr_annual_sqrt", report.sr_annual_sqrt, s),
        ("delta", report.delta, delta),
        ("sr_annual_adjusted", report.sr_annual_adjusted, s / delta),
        ("eta", report.eta, n.sqrt() * sr_period),
    ];
    for tr in &report.tests {
        let spec = TestSpec::new(tr.test, values.len(), f, report.rho.value)?.with_modified_form(report.modified_form);
        let luck = match tr.test {
            TestKind::StudentOneTailed => 1.0 - t_cdf(t, nu)?,
            TestKind::StudentTwoTailed => 2.0 - 2.0 * t_cdf(t.abs(), nu)?,
            TestKind::Fisher => f_sf(t * t, 1.0, nu)?,
            TestKind::WaldRaw => 2.0 - 2.0 * normal_cdf((n / f).sqrt() * s.abs()),
            TestKind::WaldStudentized => 2.0 - 2.0 * normal_cdf(t.abs()),
            TestKind::WaldModified => 2.0 - 2.0 * normal_cdf(tr.statistic.abs()),
        };
        if tr.test != TestKind::WaldModified {
            let expected_stat = match tr.test {
                TestKind::Fisher => t * t,
                TestKind::WaldRaw => (n / f).sqrt() * s,
                _ => studentized_statistic(s, &spec),
            };
            checks.push(("statistic", tr.statistic, expected_stat));
        }
        checks.push(("luck", tr.luck, luck.clamp(0.0, 1.0)));
        checks.push(("skill", tr.skill, 1.0 - tr.luck));
    }
    Ok(checks
        .into_iter()
        .find(|(_, got, want)| (got - want).abs() > TOL * want.abs().max(1.0))
        .map(|(name, got, want)| format!("{name}: reported {got}, recomputed {want}")))
}

fn render_text(r: &Report) -> String {
    use std::fmt::Write as _;
    let mut s = String::new();
    let _ = writeln!(s, "observations        {}", r.n);
    let _ = writeln!(s, "periods per year    {}", r.periods_per_year);
    let _ = writeln!(s, "mean                {:.6e}", r.mean);
    let _ = writeln!(s, "std                 {:.6e}", r.std);
    let _ = writeln!(s, "sharpe per period   {:.6}", r.sr_period);
    let _ = writeln!(s, "sharpe annual sqrt  {:.4}  [{}]", r.sr_annual_sqrt, r.sharpe_class);
    match &r.rho.components {
        Some(c) => {
            let _ = writeln!(
                s,
                "rho (auto)          {:.4}  (lag1 {:.4}, lag2 {:.4}, lag3 {:.4})",
                r.rho.value, c.rho1, c.rho2, c.rho3
            );
        }
        None => {
            let _ = writeln!(s, "rho (fixed)         {:.4}", r.rho.value);
        }
    }
    let _ = writeln!(s, "delta               {:.6}", r.delta);
    let _ = writeln!(s, "sharpe annual adj   {:.4}", r.sr_annual_adjusted);
    let _ = writeln!(s, "eta                 {:.4}", r.eta);
    let _ = writeln!(s);
    let _ = writeln!(s, "{:<18}{:>12}{:>10}{:>10}", "test", "statistic", "luck", "skill");
    for t in &r.tests {
        let _ = writeln!(
            s,
            "{:<18}{:>12.4}{:>9.2}%{:>9.2}%  [{}]",
            t.test.name(),
            t.statistic,
            100.0 * t.luck,
            100.0 * t.skill,
            t.skill_class
        );
    }
    s
}

fn analyze(a: &AnalyzeArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> std::result::Result<(), CliError> {
    let input = read_input(&a.file)?;
    let values = parse_series_csv(&input)?;
    if values.len() < 2 {
        return Err(CliError::Degenerate(format!("need at least 2 observations, found {}", values.len())));
    }
    let f = a.freq.frequency().periods_per_year();
    let kind = match a.kind {
        KindArg::Returns => SeriesKind::Returns,
        KindArg::Pnl => SeriesKind::Pnl,
    };
    let mut series = ObservationSeries::new(values.clone(), kind, f)?;
    if a.rf != 0.0 {
        if kind == SeriesKind::Pnl {
            return Err(CliError::Usage("--rf does not apply to PnL series".into()));
        }
        series = series.with_risk_free(a.rf / f)?;
    }
    let rho = match a.rho {
        RhoArg::Value(v) => Some(v),
        RhoArg::Auto => {
            if values.len() < 4 {
                return Err(CliError::Degenerate(format!(
                    "estimating rho needs at least 4 observations, found {}",
                    values.len()
                )));
            }
            if values.len() < AUTO_RHO_WARN_N {
                let _ = writeln!(
                    stderr,
                    "warning: rho estimated from only {} observations; consider --rho",
                    values.len()
                );
            }
            None
        }
    };
    let third = if a.printed_lag { ThirdLag::PrintedLag2 } else { ThirdLag::Lag3 };
    let report = build_report(&series, rho, third, a.modified_form.into())?;
    if a.verify {
        if let Some(mismatch) = verify_report(&report, &values)? {
            return Err(CliError::Degenerate(format!("verification failed: {mismatch}")));
        }
        let _ = writeln!(stderr, "verify: all reported values recomputed within 1e-12");
    }
    let out = match a.format {
        FormatArg::Json => {
            let mut s = serde_json::to_string_pretty(&report).map_err(|e| CliError::Parse(e.to_string()))?;
            s.push('\n');
            s
        }
        FormatArg::Text => render_text(&report),
    };
    stdout.write_all(out.as_bytes()).map_err(|e| io_error("stdout", e))
}

fn run_min_sharpe(a: &MinSharpeArgs, stdout: &mut dyn Write) -> std::result::Result<(), CliError> {
    let spec = TestSpec::new(a.test.kind()?, a.n, a.freq.frequency().periods_per_year(), a.rho)?
        .with_modified_form(a.test.modified_form.into());
    let sr = min_sharpe(&spec, Probability::new(a.confidence)?)?;
    writeln!(stdout, "{sr:.4}").map_err(|e| io_error("stdout", e))
}

fn table_spec(a: &TableArgs) -> std::result::Result<TableSpec, CliError> {
    let test = a.test.kind()?;
    let freq = match a.freq {
        FreqArg::Daily => Frequency::Daily,
        FreqArg::Monthly => Frequency::Monthly,
    };
    let mut spec = match a.kind {
        TableKindArg::MinSharpe => TableSpec::min_sharpe(test, freq, a.target.unwrap_or(90.0) / 100.0),
        TableKindArg::MinSharpeConfidence => {
            let mut s = TableSpec::min_sharpe_confidence(test, freq);
            s.target = a.target.unwrap_or(0.0) / 100.0;
            s
        }
        TableKindArg::Skill => TableSpec::skill(test, freq, a.target.unwrap_or(1.0)),
    };
    spec.modified_form = a.test.modified_form.into();
    spec.validate()?;
    Ok(spec)
}

fn render(spec: &TableSpec, html: bool) -> std::result::Result<String, CliError> {
    let table = tables::generate(spec)?;
    Ok(if html {
        tables::render_html(&table)
    } else {
        tables::render_csv(&table)?
    })
}

fn run_table(a: &TableArgs, stdout: &mut dyn Write) -> std::result::Result<(), CliError> {
    if a.all {
        let dir = a.out.as_deref().expect("clap enforces --out with --all");
        fs::create_dir_all(dir).map_err(|e| io_error(&dir.display().to_string(), e))?;
        for spec in tables::standard_catalog() {
            let mut name = spec.file_name();
            if a.html {
                name = name.replace(".csv", ".html");
            }
            let path = dir.join(name);
            fs::write(&path, render(&spec, a.html)?).map_err(|e| io_error(&path.display().to_string(), e))?;
        }
        return Ok(());
    }
    let text = render(&table_spec(a)?, a.html)?;
    match &a.out {
        Some(path) => fs::write(path, text).map_err(|e| io_error(&path.display().to_string(), e)),
        None => stdout.write_all(text.as_bytes()).map_err(|e| io_error("stdout", e)),
    }
}

fn run_simulate(a: &SimulateArgs, stdout: &mut dyn Write) -> std::result::Result<(), CliError> {
    if a.reps == 0 {
        return Err(CliError::Usage("--reps must be at least 1".into()));
    }
    let f = a.freq.frequency().periods_per_year();
    let params = autocorr::Ar1Params::new(a.mu, a.rho, a.sigma)?;
    let mut config = SimulationConfig::new(params, a.n, a.reps, a.seed, Probability::new(a.alpha)?)?
        .with_periods_per_year(f)?;
    if let Some(dof) = a.heavy_tail_dof {
        config = config.with_innovations(Innovations::ScaledStudent { dof })?;
    }
    let mode = match a.rho_mode {
        RhoModeArg::True => RhoMode::True,
        RhoModeArg::Estimated => RhoMode::Estimated,
    };
    let kinds = if a.all_tests { TestKind::ALL.to_vec() } else { vec![a.test.kind()?] };
    let mut rows = Vec::with_capacity(kinds.len());
    for kind in kinds {
        let spec = TestSpec::new(kind, a.n, f, a.rho)?.with_modified_form(a.test.modified_form.into());
        rows.push(empirical_type1(&spec, &config, mode)?);
    }
    let csv = render_calibration_csv(&rows)?;
    stdout.write_all(csv.as_bytes()).map_err(|e| io_error("stdout", e))
}
