//! Reference tables of minimum Sharpe ratios and skill probabilities.
//!
//! Three layouts cover the standard set:
//!
//! * minimum Sharpe for a target skill, rows = autocorrelation ρ;
//! * minimum Sharpe at ρ = 0, rows = skill level;
//! * skill for a fixed Sharpe level, rows = ρ.
//!
//! Columns are always sample sizes. Cells are colored from their unrounded
//! value, then rounded half away from zero to two decimals (Sharpe) or to
//! whole percents (skill).

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::significance::{min_sharpe, skill, ModifiedForm, TestKind, TestSpec};
use crate::special::Probability;

pub const DAILY_N_GRID: [usize; 21] = [
    25, 50, 100, 150, 200, 250, 300, 350, 400, 450, 500, 550, 600, 650, 700, 750, 800, 850, 900, 950, 1000,
];
/// The daily grid of the confidence tables, which adds half a year of trading days.
pub const DAILY_CONFIDENCE_N_GRID: [usize; 22] = [
    25, 50, 100, 122, 150, 200, 250, 300, 350, 400, 450, 500, 550, 600, 650, 700, 750, 800, 850, 900, 950, 1000,
];
pub const MONTHLY_N_GRID: [usize; 20] = [6, 12, 18, 24, 30, 36, 42, 48, 54, 60, 66, 72, 78, 84, 90, 96, 102, 108, 114, 120];

/// Skill levels (as fractions) of the confidence tables.
pub fn standard_confidence_grid() -> Vec<f64> {
    let mut pct: Vec<f64> = vec![80.0, 85.0];
    pct.extend((90..=99).map(f64::from));
    let mut step = 0.1;
    let mut base = 99.0;
    for _ in 0..4 {
        pct.extend((1..=9).map(|k| base + k as f64 * step));
        base += 9.0 * step;
        step /= 10.0;
    }
    pct.into_iter().map(|p| round_to(p, 6) / 100.0).collect()
}

/// `ρ = -0.9, -0.8, ..., 0.9`.
pub fn standard_rho_grid() -> Vec<f64> {
    (-9..=9).map(|k| k as f64 / 10.0).collect()
}

/// Half away from zero, as `f64::round` does.
fn round_to(x: f64, decimals: i32) -> f64 {
    let scale = 10f64.powi(decimals);
    (x * scale).round() / scale
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TableKind {
    MinSharpeBySkill,
    MinSharpeByConfidence,
    SkillForSharpe,
}

impl TableKind {
    pub fn slug(self) -> &'static str {
        match self {
            TableKind::MinSharpeBySkill => "min-sharpe",
            TableKind::MinSharpeByConfidence => "min-sharpe-confidence",
            TableKind::SkillForSharpe => "skill",
        }
    }

    pub fn from_slug(s: &str) -> Result<Self> {
        [TableKind::MinSharpeBySkill, TableKind::MinSharpeByConfidence, TableKind::SkillForSharpe]
            .into_iter()
            .find(|k| k.slug() == s)
            .ok_or_else(|| Error::InvalidTable(format!("unknown table kind '{s}'")))
    }

    fn cells_are_sharpe(self) -> bool {
        self != TableKind::SkillForSharpe
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Frequency {
    Daily,
    Monthly,
    Custom(f64),
}

impl Frequency {
    pub fn periods_per_year(self) -> f64 {
        match self {
            Frequency::Daily => 252.0,
            Frequency::Monthly => 12.0,
            Frequency::Custom(f) => f,
        }
    }

    pub fn slug(self) -> &'static str {
        match self {
            Frequency::Daily => "daily",
            Frequency::Monthly => "monthly",
            Frequency::Custom(_) => "custom",
        }
    }

    /// Standard sample-size grid; custom frequencies reuse the monthly one.
    pub fn n_grid(self) -> Vec<usize> {
        match self {
            Frequency::Daily => DAILY_N_GRID.to_vec(),
            Frequency::Monthly | Frequency::Custom(_) => MONTHLY_N_GRID.to_vec(),
        }
    }

    fn confidence_n_grid(self) -> Vec<usize> {
        match self {
            Frequency::Daily => DAILY_CONFIDENCE_N_GRID.to_vec(),
            other => other.n_grid(),
        }
    }
}

/// Declarative description of one table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TableSpec {
    pub kind: TableKind,
    pub test: TestKind,
    pub frequency: Frequency,
    /// Skill fraction, Sharpe level, or ρ, depending on `kind`.
    pub target: f64,
    /// ρ values, or skill fractions for the confidence layout.
    pub rows: Vec<f64>,
    pub n_grid: Vec<usize>,
    pub modified_form: ModifiedForm,
}

impl TableSpec {
    pub fn min_sharpe(test: TestKind, frequency: Frequency, skill: f64) -> Self {
        Self {
            kind: TableKind::MinSharpeBySkill,
            test,
            frequency,
            target: skill,
            rows: standard_rho_grid(),
            n_grid: frequency.n_grid(),
            modified_form: ModifiedForm::default(),
        }
    }

    pub fn min_sharpe_confidence(test: TestKind, frequency: Frequency) -> Self {
        Self {
            kind: TableKind::MinSharpeByConfidence,
            test,
            frequency,
            target: 0.0,
            rows: standard_confidence_grid(),
            n_grid: frequency.confidence_n_grid(),
            modified_form: ModifiedForm::default(),
        }
    }

    pub fn skill(test: TestKind, frequency: Frequency, sharpe: f64) -> Self {
        Self {
            kind: TableKind::SkillForSharpe,
            test,
            frequency,
            target: sharpe,
            rows: standard_rho_grid(),
            n_grid: frequency.n_grid(),
            modified_form: ModifiedForm::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.rows.is_empty() || self.n_grid.is_empty() {
            return Err(Error::InvalidTable("row and column grids must be nonempty".into()));
        }
        if self.rows.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidTable("row grid must be strictly increasing".into()));
        }
        if self.n_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidTable("sample-size grid must be strictly increasing".into()));
        }
        if self.n_grid[0] < 2 {
            return Err(Error::InvalidTable("sample sizes must be at least 2".into()));
        }
        let f = self.frequency.periods_per_year();
        if !(f > 0.0 && f.is_finite()) {
            return Err(Error::InvalidTable(format!("periods per year must be positive, got {f}")));
        }
        let rho_ok = |r: &f64| r.abs() < 1.0;
        let prob_ok = |p: &f64| *p > 0.0 && *p < 1.0;
        let ok = match self.kind {
            TableKind::MinSharpeBySkill => self.rows.iter().all(rho_ok) && prob_ok(&self.target),
            TableKind::MinSharpeByConfidence => self.rows.iter().all(prob_ok) && rho_ok(&self.target),
            TableKind::SkillForSharpe => self.rows.iter().all(rho_ok) && self.target.is_finite(),
        };
        if !ok {
            return Err(Error::InvalidTable(format!(
                "rows or target out of range for a {} table",
                self.kind.slug()
            )));
        }
        Ok(())
    }

    fn tail(&self) -> &'static str {
        if self.test.is_one_tailed() {
            "one"
        } else {
            "two"
        }
    }

    fn test_slug(&self) -> &'static str {
        match self.test {
            TestKind::StudentOneTailed | TestKind::StudentTwoTailed => "student",
            other => other.name(),
        }
    }

    fn target_slug(&self) -> String {
        match self.kind {
            TableKind::MinSharpeBySkill => percent_label(self.target),
            TableKind::MinSharpeByConfidence => format!("rho{}", percent_label(self.target)),
            TableKind::SkillForSharpe => format!("sr{:.2}", self.target),
        }
    }

    /// `<kind>_<test>_<tail>_<freq>_<target>.csv`
    pub fn file_name(&self) -> String {
        format!(
            "{}_{}_{}_{}_{}.csv",
            self.kind.slug(),
            self.test_slug(),
            self.tail(),
            self.frequency.slug(),
            self.target_slug()
        )
    }

    pub fn title(&self) -> String {
        let test = match self.test {
            TestKind::StudentOneTailed => "one-tailed Student",
            TestKind::StudentTwoTailed => "two-tailed Student",
            TestKind::Fisher => "Fisher",
            TestKind::WaldRaw => "raw Wald",
            TestKind::WaldStudentized => "studentized Wald",
            TestKind::WaldModified => "modified Wald",
        };
        let freq = self.frequency.slug();
        match self.kind {
            TableKind::MinSharpeBySkill => format!(
                "Minimum annualized Sharpe for {}% skill, {test} test, {freq} data",
                percent_label(self.target)
            ),
            TableKind::MinSharpeByConfidence => format!(
                "Minimum annualized Sharpe by skill level at rho = {}%, {test} test, {freq} data",
                percent_label(self.target)
            ),
            TableKind::SkillForSharpe => format!(
                "Skill percentage for an annualized Sharpe of {:.2}, {test} test, {freq} data",
                self.target
            ),
        }
    }

    fn row_header(&self) -> &'static str {
        match self.kind {
            TableKind::MinSharpeByConfidence => "skill",
            _ => "rho",
        }
    }

    fn test_spec(&self, n: usize, rho: f64) -> Result<TestSpec> {
        Ok(TestSpec::new(self.test, n, self.frequency.periods_per_year(), rho)?
            .with_modified_form(self.modified_form))
    }

    fn evaluate(&self, row: f64, n: usize) -> Result<f64> {
        match self.kind {
            TableKind::MinSharpeBySkill => min_sharpe(&self.test_spec(n, row)?, Probability::new(self.target)?),
            TableKind::MinSharpeByConfidence => min_sharpe(&self.test_spec(n, self.target)?, Probability::new(row)?),
            TableKind::SkillForSharpe => Ok(skill(self.target, &self.test_spec(n, row)?)?.value()),
        }
    }
}

/// Percent with at most six decimals and no trailing zeros: 0.9 → "90".
pub fn percent_label(fraction: f64) -> String {
    let v = round_to(fraction * 100.0, 6);
    if v == 0.0 {
        "0".into()
    } else {
        format!("{v}")
    }
}

/// The 42 standard tables.
pub fn standard_catalog() -> Vec<TableSpec> {
    let tests = [TestKind::WaldStudentized, TestKind::StudentOneTailed, TestKind::StudentTwoTailed];
    let freqs = [Frequency::Daily, Frequency::Monthly];
    let mut out = Vec::new();
    for test in tests {
        for freq in freqs {
            for skill in [0.90, 0.95] {
                out.push(TableSpec::min_sharpe(test, freq, skill));
            }
            out.push(TableSpec::min_sharpe_confidence(test, freq));
            for sr in [0.5, 1.0, 1.5, 2.0] {
                out.push(TableSpec::skill(test, freq, sr));
            }
        }
    }
    out
}

/// Sharpe bands split at 0.5, 1.0, 1.5 and 2.0; upper bounds inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct SrBand(u8);

/// Probability bands split at 80, 90, 95, 97.5 and 99 percent; lower bounds inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct ProbBand(u8);

const SR_RGB: [Option<[f64; 3]>; 5] = [
    None,
    Some([1.0, 0.922, 0.922]),
    Some([1.0, 0.686, 0.686]),
    Some([1.0, 0.475, 0.475]),
    Some([1.0, 0.247, 0.247]),
];

const PROB_RGB: [Option<[f64; 3]>; 6] = [
    None,
    Some([0.788, 1.0, 0.882]),
    Some([0.592, 1.0, 0.776]),
    Some([0.114, 1.0, 0.514]),
    Some([0.0, 0.855, 0.388]),
    Some([0.0, 0.69, 0.314]),
];

fn rgb_bytes(rgb: [f64; 3]) -> [u8; 3] {
    rgb.map(|c| (c * 255.0).round() as u8)
}

impl SrBand {
    pub fn classify(sr: f64) -> Self {
        let idx = [0.5, 1.0, 1.5, 2.0].iter().filter(|&&edge| sr > edge).count();
        SrBand(idx as u8)
    }

    pub fn index(self) -> u8 {
        self.0
    }

    pub fn css_class(self) -> String {
        format!("sr-{}", self.0)
    }

    pub fn rgb(self) -> Option<[u8; 3]> {
        SR_RGB[self.0 as usize].map(rgb_bytes)
    }
}

impl ProbBand {
    pub fn classify(p: f64) -> Self {
        let idx = [0.80, 0.90, 0.95, 0.975, 0.99].iter().filter(|&&edge| p >= edge).count();
        ProbBand(idx as u8)
    }

    pub fn index(self) -> u8 {
        self.0
    }

    pub fn css_class(self) -> String {
        format!("p-{}", self.0)
    }

    pub fn rgb(self) -> Option<[u8; 3]> {
        PROB_RGB[self.0 as usize].map(rgb_bytes)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ColorClass {
    Sharpe(SrBand),
    Probability(ProbBand),
}

impl ColorClass {
    pub fn css_class(self) -> String {
        match self {
            ColorClass::Sharpe(b) => b.css_class(),
            ColorClass::Probability(b) => b.css_class(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Cell {
    /// Unrounded value; skills as fractions.
    pub raw: f64,
    /// Printed value: Sharpe to two decimals, skill in whole percent.
    pub rounded: f64,
    pub color: ColorClass,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table {
    pub spec: TableSpec,
    /// `None` marks a cell whose test could not be evaluated.
    pub cells: Vec<Vec<Option<Cell>>>,
}

pub fn generate(spec: &TableSpec) -> Result<Table> {
    spec.validate()?;
    let cols = spec.n_grid.len();
    let flat: Vec<Option<Cell>> = (0..spec.rows.len() * cols)
        .into_par_iter()
        .map(|i| {
            let (row, n) = (spec.rows[i / cols], spec.n_grid[i % cols]);
            let raw = spec.evaluate(row, n).ok().filter(|v| v.is_finite())?;
            Some(if spec.kind.cells_are_sharpe() {
                Cell { raw, rounded: round_to(raw, 2), color: ColorClass::Sharpe(SrBand::classify(raw)) }
            } else {
                Cell {
                    raw,
                    rounded: round_to(raw * 100.0, 0),
                    color: ColorClass::Probability(ProbBand::classify(raw)),
                }
            })
        })
        .collect();
    let cells = flat.chunks(cols).map(<[_]>::to_vec).collect();
    Ok(Table { spec: spec.clone(), cells })
}

impl Table {
    pub fn row_labels(&self) -> Vec<String> {
        self.spec.rows.iter().map(|r| percent_label(*r)).collect()
    }

    pub fn cell(&self, row: usize, col: usize) -> Option<&Cell> {
        self.cells.get(row)?.get(col)?.as_ref()
    }

    fn format_cell(&self, cell: &Option<Cell>) -> String {
        match cell {
            None => "NA".into(),
            Some(c) if self.spec.kind.cells_are_sharpe() => format!("{:.2}", c.rounded),
            Some(c) => format!("{}", c.rounded as i64),
        }
    }
}

pub fn render_csv(table: &Table) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec![table.spec.row_header().to_string()];
    header.extend(table.spec.n_grid.iter().map(|n| n.to_string()));
    let io = |e: csv::Error| Error::InvalidTable(format!("CSV output failed: {e}"));
    w.write_record(&header).map_err(io)?;
    for (label, row) in table.row_labels().into_iter().zip(&table.cells) {
        let mut record = vec![label];
        record.extend(row.iter().map(|c| table.format_cell(c)));
        w.write_record(&record).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::InvalidTable(format!("CSV output failed: {e}")))?;
    String::from_utf8(bytes).map_err(|e| Error::InvalidTable(e.to_string()))
}

/// CSS rules for the color classes.
pub fn color_css() -> String {
    let mut css = String::new();
    for i in 0..5u8 {
        if let Some([r, g, b]) = SrBand(i).rgb() {
            let _ = writeln!(css, ".sr-{i} {{ background-color: rgb({r}, {g}, {b}); }}");
        }
    }
    for i in 0..6u8 {
        if let Some([r, g, b]) = ProbBand(i).rgb() {
            let _ = writeln!(css, ".p-{i} {{ background-color: rgb({r}, {g}, {b}); }}");
        }
    }
    css
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// A `<style>` block followed by the table.
pub fn render_html(table: &Table) -> String {
    let mut html = String::new();
    let _ = writeln!(html, "<style>\n{}</style>", color_css());
    let _ = writeln!(html, "<table class=\"sharpe-table\">");
    let _ = writeln!(html, "<caption>{}</caption>", escape(&table.spec.title()));
    let corner = match table.spec.kind {
        TableKind::MinSharpeByConfidence => "skill % \\ N",
        _ => "rho % \\ N",
    };
    let _ = write!(html, "<thead><tr><th>{}</th>", escape(corner));
    for n in &table.spec.n_grid {
        let _ = write!(html, "<th>{n}</th>");
    }
    let _ = writeln!(html, "</tr></thead>\n<tbody>");
    for (label, row) in table.row_labels().into_iter().zip(&table.cells) {
        let _ = write!(html, "<tr><th>{label}</th>");
        for cell in row {
            let class = cell.as_ref().map(|c| c.color.css_class()).unwrap_or_else(|| "na".into());
            let _ = write!(html, "<td class=\"{class}\">{}</td>", table.format_cell(cell));
        }
        let _ = writeln!(html, "</tr>");
    }
    let _ = writeln!(html, "</tbody>\n</table>");
    html
}
