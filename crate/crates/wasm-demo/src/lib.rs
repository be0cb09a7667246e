//! Browser bindings for `sharpe-core`.
//!
//! Three operations back the static page in `www/`: a colored reference
//! table, a skill-versus-sample-size curve, and a full analysis of pasted
//! returns. Each export is a thin wrapper over a plain Rust function so the
//! logic can be tested natively.

use wasm_bindgen::prelude::*;

use sharpe_core::autocorr::ThirdLag;
use sharpe_core::cli::{build_report, parse_series_csv};
use sharpe_core::series::ObservationSeries;
use sharpe_core::significance::{skill, ModifiedForm, TestKind, TestSpec};
use sharpe_core::tables::{generate, render_html, Frequency, TableKind, TableSpec};
use sharpe_core::{Error, Result};

fn frequency(name: &str) -> Result<Frequency> {
    match name {
        "daily" => Ok(Frequency::Daily),
        "monthly" => Ok(Frequency::Monthly),
        other => Err(Error::domain("frequency", format!("expected daily or monthly, got '{other}'"))),
    }
}

/// HTML for one reference table. `target` is the skill (min-sharpe), the
/// autocorrelation (min-sharpe-confidence) or the Sharpe ratio (skill).
pub fn table_html(kind: &str, test: &str, freq: &str, target: f64) -> Result<String> {
    let test: TestKind = test.parse()?;
    let freq = frequency(freq)?;
    let spec = match TableKind::from_slug(kind)? {
        TableKind::MinSharpeBySkill => TableSpec::min_sharpe(test, freq, target),
        TableKind::MinSharpeByConfidence => {
            let mut spec = TableSpec::min_sharpe_confidence(test, freq);
            spec.target = target;
            spec
        }
        TableKind::SkillForSharpe => TableSpec::skill(test, freq, target),
    };
    Ok(render_html(&generate(&spec)?))
}

/// Skill probabilities for `n = step, 2·step, …, ≤ n_max` at a fixed
/// annualized Sharpe ratio. Returned flat as `[n₀, skill₀, n₁, skill₁, …]`.
pub fn skill_points(test: &str, periods_per_year: f64, rho: f64, sharpe: f64, n_max: usize) -> Result<Vec<f64>> {
    let test: TestKind = test.parse()?;
    if n_max < 2 {
        return Err(Error::domain("skill_points", "n_max must be at least 2"));
    }
    let step = (n_max / 200).max(1);
    let mut out = Vec::new();
    for n in (step.max(2)..=n_max).step_by(step) {
        let spec = TestSpec::new(test, n, periods_per_year, rho)?;
        out.push(n as f64);
        out.push(skill(sharpe, &spec)?.value());
    }
    Ok(out)
}

/// JSON analysis report for pasted CSV text; `rho` of `None` estimates it.
pub fn analyze_text(text: &str, periods_per_year: f64, rho: Option<f64>) -> Result<String> {
    let series = ObservationSeries::returns(parse_series_csv(text)?, periods_per_year)?;
    let report = build_report(&series, rho, ThirdLag::Lag3, ModifiedForm::Derived)?;
    serde_json::to_string_pretty(&report).map_err(|e| Error::domain("report", e.to_string()))
}

fn js(e: Error) -> JsError {
    JsError::new(&e.to_string())
}

#[wasm_bindgen(js_name = tableHtml)]
pub fn table_html_js(kind: &str, test: &str, freq: &str, target: f64) -> std::result::Result<String, JsError> {
    table_html(kind, test, freq, target).map_err(js)
}

#[wasm_bindgen(js_name = skillCurve)]
pub fn skill_curve_js(
    test: &str,
    periods_per_year: f64,
    rho: f64,
    sharpe: f64,
    n_max: usize,
) -> std::result::Result<Vec<f64>, JsError> {
    skill_points(test, periods_per_year, rho, sharpe, n_max).map_err(js)
}

/// `rho` of NaN requests the estimate.
#[wasm_bindgen(js_name = analyzeReturns)]
pub fn analyze_returns_js(text: &str, periods_per_year: f64, rho: f64) -> std::result::Result<String, JsError> {
    let rho = (!rho.is_nan()).then_some(rho);
    analyze_text(text, periods_per_year, rho).map_err(js)
}
