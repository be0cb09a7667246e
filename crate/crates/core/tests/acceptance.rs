//! Acceptance criteria. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails.

use std::collections::HashMap;
use std::path::Path;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sharpe_core::autocorr::{aggregated_variance_general, aggregation_ratio_stationary, delta, Ar1Params, CorrelationMatrix};
use sharpe_core::cli;
use sharpe_core::montecarlo::{empirical_rho_recipe, empirical_type1, RhoMode, SimulationConfig};
use sharpe_core::significance::{round_trip_consistency, ModifiedForm, TestKind, TestSpec};
use sharpe_core::special::{beta_cdf, f_cdf, normal_cdf, normal_inv, reg_inc_beta, t_cdf, t_inv, Probability};
use sharpe_core::tables::{generate, standard_catalog, Frequency, Table, TableKind, TableSpec};
use sharpe_core::Error;

const FIXTURES: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures");

/// Sharpe cells and skill cells (in percent) tolerated against the printed tables.
const SHARPE_TOL: f64 = 0.01;
const SKILL_TOL_PT: f64 = 1.0;
const DELTA_TOL: f64 = 1e-12;
const VARIANCE_REL_TOL: f64 = 1e-10;
const DIST_TOL: f64 = 1e-10;
const ROUND_TRIP_TOL: f64 = 1e-10;
const TABLE_BUDGET: Duration = Duration::from_secs(5);
const MC_BUDGET: Duration = Duration::from_secs(60);
const MC_REPS: usize = 100_000;
const MC_SEED: u64 = 20_240_101;
const MC_SLACK: f64 = 0.01;

struct Outcome {
    id: &'static str,
    passed: bool,
    detail: String,
}

fn outcome(id: &'static str, failures: &[String], summary: String) -> Outcome {
    let detail = match failures {
        [] => summary,
        [first, ..] => format!("{summary}; {} failure(s), first: {first}", failures.len()),
    };
    Outcome { id, passed: failures.is_empty(), detail }
}

fn prob(v: f64) -> Probability {
    Probability::new(v).unwrap()
}

struct Printed {
    columns: Vec<usize>,
    rows: Vec<(f64, Vec<Option<f64>>)>,
}

fn read_printed(path: &Path) -> Printed {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_path(path).unwrap();
    let columns = reader.headers().unwrap().iter().skip(1).map(|h| h.parse().unwrap()).collect();
    let rows = reader
        .records()
        .map(|r| {
            let r = r.unwrap();
            let key = r[0].parse().unwrap();
            (key, r.iter().skip(1).map(|c| c.trim().parse().ok()).collect())
        })
        .collect();
    Printed { columns, rows }
}

/// Cells of `table` that disagree with the printed version.
fn compare_to_printed(table: &Table, printed: &Printed) -> (usize, Vec<String>) {
    let sharpe = table.spec.kind != TableKind::SkillForSharpe;
    let tol = if sharpe { SHARPE_TOL } else { SKILL_TOL_PT } + 1e-9;
    let mut checked = 0;
    let mut bad = Vec::new();
    for (key, values) in &printed.rows {
        let Some(r) = table.spec.rows.iter().position(|x| (x * 100.0 - key).abs() < 1e-6) else {
            bad.push(format!("row {key} not generated"));
            continue;
        };
        for (n, want) in printed.columns.iter().zip(values) {
            let Some(want) = want else { continue };
            let Some(c) = table.spec.n_grid.iter().position(|m| m == n) else {
                bad.push(format!("column N={n} not generated"));
                continue;
            };
            checked += 1;
            match table.cell(r, c) {
                Some(cell) if (cell.rounded - want).abs() <= tol => {}
                Some(cell) => bad.push(format!("({key},{n}) got {} printed {want}", cell.rounded)),
                None => bad.push(format!("({key},{n}) not computable, printed {want}")),
            }
        }
    }
    (checked, bad)
}

fn generated_catalog() -> (HashMap<String, Table>, Duration) {
    let start = Instant::now();
    let tables = standard_catalog().iter().map(|s| (s.file_name(), generate(s).unwrap())).collect();
    (tables, start.elapsed())
}

fn lookup(tables: &HashMap<String, Table>, file: &str, row_pct: f64, n: usize) -> f64 {
    let t = &tables[file];
    let r = t.spec.rows.iter().position(|x| (x * 100.0 - row_pct).abs() < 1e-9).unwrap();
    let c = t.spec.n_grid.iter().position(|m| *m == n).unwrap();
    t.cell(r, c).unwrap().rounded
}

const REQUIRED_TABLES: [&str; 13] = [
    "min-sharpe_wald-studentized_two_daily_90.csv",
    "min-sharpe_wald-studentized_two_monthly_90.csv",
    "min-sharpe_student_one_daily_90.csv",
    "min-sharpe_student_one_monthly_90.csv",
    "min-sharpe_student_two_daily_90.csv",
    "min-sharpe_wald-studentized_two_daily_95.csv",
    "min-sharpe_student_one_daily_95.csv",
    "skill_wald-studentized_two_daily_sr0.50.csv",
    "skill_student_one_daily_sr0.50.csv",
    "skill_wald-studentized_two_daily_sr1.00.csv",
    "skill_student_two_daily_sr1.00.csv",
    "skill_wald-studentized_two_daily_sr1.50.csv",
    "skill_wald-studentized_two_daily_sr2.00.csv",
];

fn table_reproduction(tables: &HashMap<String, Table>, elapsed: Duration) -> Vec<Outcome> {
    let dir = Path::new(FIXTURES).join("reference");
    let mut required = (0, Vec::new());
    let mut rest = (0, 0, Vec::new());
    let mut files: Vec<_> = std::fs::read_dir(&dir).unwrap().map(|e| e.unwrap().file_name().into_string().unwrap()).collect();
    files.sort();
    for file in &files {
        let Some(table) = tables.get(file) else {
            required.1.push(format!("{file}: not in the generated catalog"));
            continue;
        };
        let (checked, bad) = compare_to_printed(table, &read_printed(&dir.join(file)));
        let bad = bad.into_iter().map(|b| format!("{file} {b}"));
        if REQUIRED_TABLES.contains(&file.as_str()) {
            required.0 += checked;
            required.1.extend(bad);
        } else {
            rest.0 += 1;
            rest.1 += checked;
            rest.2.extend(bad);
        }
    }

    let anchors = [
        ("min-sharpe_wald-studentized_two_daily_90.csv", 0.0, 250, 1.65),
        ("min-sharpe_wald-studentized_two_daily_90.csv", 30.0, 250, 1.21),
        ("min-sharpe_wald-studentized_two_daily_90.csv", -30.0, 250, 2.25),
        ("min-sharpe_wald-studentized_two_monthly_90.csv", 30.0, 24, 0.88),
        ("min-sharpe_student_one_daily_90.csv", 0.0, 500, 0.91),
        ("min-sharpe_wald-studentized_two_daily_95.csv", 0.0, 250, 1.97),
        ("skill_wald-studentized_two_daily_sr0.50.csv", 0.0, 500, 52.0),
        ("skill_wald-studentized_two_daily_sr0.50.csv", 0.0, 1000, 68.0),
        ("skill_student_one_daily_sr0.50.csv", 0.0, 250, 69.0),
    ];
    let anchor_failures: Vec<String> = anchors
        .iter()
        .filter_map(|&(file, row, n, want)| {
            let got = lookup(tables, file, row, n);
            ((got - want).abs() > 1e-9).then(|| format!("{file} ({row},{n}) got {got} want {want}"))
        })
        .collect();

    let mut timing = Vec::new();
    if elapsed > TABLE_BUDGET {
        timing.push(format!("regeneration took {elapsed:?}"));
    }
    vec![
        outcome(
            "1a",
            &required.1,
            format!("{} required tables, {} printed cells within ±0.01 / ±1pt", REQUIRED_TABLES.len(), required.0),
        ),
        outcome("1b", &anchor_failures, format!("{} spot anchors exact at printed precision", anchors.len())),
        outcome("1c", &timing, format!("{} tables regenerated in {:.2?} (budget 5 s)", tables.len(), elapsed)),
        outcome(
            "1d",
            &rest.2,
            format!("{} further printed tables, {} cells within ±0.01 / ±1pt", rest.0, rest.1),
        ),
    ]
}

fn table_equality() -> Outcome {
    let mut failures = Vec::new();
    let mut cells = 0;
    for freq in [Frequency::Daily, Frequency::Monthly] {
        let two = generate(&TableSpec::min_sharpe(TestKind::StudentTwoTailed, freq, 0.90)).unwrap();
        let one = generate(&TableSpec::min_sharpe(TestKind::StudentOneTailed, freq, 0.95)).unwrap();
        for (r, (a, b)) in two.cells.iter().zip(&one.cells).enumerate() {
            for (c, (x, y)) in a.iter().zip(b).enumerate() {
                cells += 1;
                match (x, y) {
                    (Some(x), Some(y)) if x.rounded == y.rounded && (x.raw - y.raw).abs() <= 1e-12 => {}
                    (None, None) => {}
                    _ => failures.push(format!("{freq:?} cell ({r},{c}): {x:?} vs {y:?}")),
                }
            }
        }
    }
    outcome(
        "2",
        &failures,
        format!("two-tailed 90% Student tables equal one-tailed 95% cell for cell ({cells} cells, daily and monthly)"),
    )
}

fn delta_oracle() -> Outcome {
    let mut failures = Vec::new();
    let mut qs: Vec<usize> = (2..=24).collect();
    qs.push(252);
    let mut checks = 0;
    for i in -18..=18 {
        let rho = i as f64 * 0.05;
        let params = Ar1Params::new(0.0, rho, 0.013).unwrap();
        for &q in &qs {
            let d = delta(rho, q as f64).unwrap();
            let rho_k: Vec<f64> = (1..q).map(|k| rho.powi(k as i32)).collect();
            let ratio = aggregation_ratio_stationary(&rho_k, q).unwrap();
            let want = (q as f64).sqrt() / d;
            if (ratio - want).abs() > DELTA_TOL {
                failures.push(format!("ratio rho={rho:.2} q={q}: {ratio} vs {want}"));
            }
            let sigmas = vec![params.stationary_std(); q];
            let general = aggregated_variance_general(&sigmas, &CorrelationMatrix::ar1(q, rho).unwrap()).unwrap();
            let closed = q as f64 * params.stationary_variance() * d * d;
            if ((general - closed) / closed).abs() > VARIANCE_REL_TOL {
                failures.push(format!("variance rho={rho:.2} q={q}: {general} vs {closed}"));
            }
            checks += 2;
        }
    }
    outcome("3", &failures, format!("{checks} aggregation checks on the rho x q grid"))
}

fn distribution_accuracy() -> Outcome {
    let mut failures = Vec::new();
    let mut reader = csv::Reader::from_path(Path::new(FIXTURES).join("distribution_reference.csv")).unwrap();
    let mut points = 0;
    for record in reader.records() {
        let r = record.unwrap();
        let arg = |i: usize| r[i].parse::<f64>().unwrap();
        let want = arg(4);
        let got = match &r[0] {
            "normal_cdf" => normal_cdf(arg(1)),
            "normal_inv" => normal_inv(arg(1)).unwrap(),
            "t_cdf" => t_cdf(arg(1), arg(2)).unwrap(),
            "t_inv" => t_inv(arg(1), arg(2)).unwrap(),
            "f_cdf" => f_cdf(arg(1), arg(2), arg(3)).unwrap(),
            other => panic!("unknown function {other}"),
        };
        points += 1;
        if (got - want).abs() > DIST_TOL {
            failures.push(format!("{}({}, {}, {}) = {got} vs {want}", &r[0], &r[1], &r[2], &r[3]));
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut identities = 0;
    let mut check = |name: &str, err: f64, tol: f64| {
        identities += 1;
        if !(err <= tol) {
            failures.push(format!("{name}: error {err:e}"));
        }
    };
    for i in 1..1000 {
        let p = if i % 2 == 0 { i as f64 / 1000.0 } else { 10f64.powf(-(i as f64) / 170.0) };
        for p in [p, 1.0 - p] {
            if !(1e-6..=1.0 - 1e-6).contains(&p) {
                continue;
            }
            check("normal round trip", (normal_cdf(normal_inv(p).unwrap()) - p).abs(), 1e-12);
            let nu = rng.random_range(1.0..1000.0);
            check("t round trip", (t_cdf(t_inv(p, nu).unwrap(), nu).unwrap() - p).abs(), 1e-11);
        }
    }
    for _ in 0..500 {
        let z = rng.random_range(-40.0..40.0);
        check("normal symmetry", (normal_cdf(z) + normal_cdf(-z) - 1.0).abs(), 1e-13);
        let t: f64 = rng.random_range(-8.0..8.0);
        let nu = rng.random_range(1.0..1000.0);
        let two_tail = 2.0 * (1.0 - t_cdf(t.abs(), nu).unwrap());
        check("fisher-student link", (1.0 - f_cdf(t * t, 1.0, nu).unwrap() - two_tail).abs(), 1e-11);
        check("beta-student link", (beta_cdf(nu / (nu + t * t), nu / 2.0, 0.5).unwrap() - two_tail).abs(), 1e-11);
        let (a, b, x) = (rng.random_range(0.05..500.0), rng.random_range(0.05..500.0), rng.random_range(0.0..=1.0));
        check("beta reflection", (reg_inc_beta(a, b, x).unwrap() + reg_inc_beta(b, a, 1.0 - x).unwrap() - 1.0).abs(), 1e-12);
    }
    outcome("4", &failures, format!("{points} reference points within 1e-10, {identities} identity checks"))
}

fn inversion_consistency() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut failures = Vec::new();
    let (mut evaluated, mut unreachable) = (0, 0);
    let mut modified = [0, 0];
    for _ in 0..500 {
        let test = TestKind::ALL[rng.random_range(0..TestKind::ALL.len())];
        let n = rng.random_range(6..3000);
        let f = [1.0, 4.0, 12.0, 52.0, 252.0, 365.0][rng.random_range(0..6)];
        let rho = rng.random_range(-0.9..0.9);
        let c = rng.random_range(0.5..0.9999);
        let form = if rng.random_bool(0.5) { ModifiedForm::Derived } else { ModifiedForm::Printed };
        let spec = TestSpec::new(test, n, f, rho).unwrap().with_modified_form(form);
        match round_trip_consistency(&spec, prob(c)) {
            Ok(rt) if rt.error <= ROUND_TRIP_TOL => {
                evaluated += 1;
                if test == TestKind::WaldModified {
                    modified[usize::from(form == ModifiedForm::Printed)] += 1;
                }
            }
            Ok(rt) => failures.push(format!("{test:?} N={n} F={f} rho={rho:.3} C={c:.4}: error {:e}", rt.error)),
            Err(Error::Unreachable { .. }) if test == TestKind::WaldModified => unreachable += 1,
            Err(e) => failures.push(format!("{test:?} N={n} F={f} rho={rho:.3} C={c:.4}: {e}")),
        }
    }
    outcome(
        "5",
        &failures,
        format!(
            "{evaluated} of 500 random specs round-trip within 1e-10 (modified Wald: {} derived, {} printed, {unreachable} outside the discriminant)",
            modified[0], modified[1]
        ),
    )
}

fn calibrate(test: TestKind, n: usize, rho: f64, alpha: f64) -> (f64, f64) {
    let params = Ar1Params::new(0.0, rho, 0.01).unwrap();
    let config = SimulationConfig::new(params, n, MC_REPS, MC_SEED, prob(alpha)).unwrap();
    let spec = TestSpec::new(test, n, 252.0, rho).unwrap();
    let cal = empirical_type1(&spec, &config, RhoMode::True).unwrap();
    (cal.rate.value(), cal.ci_halfwidth)
}

fn monte_carlo() -> Vec<Outcome> {
    let start = Instant::now();
    let mut student = Vec::new();
    let mut rates = Vec::new();
    for n in [50, 252] {
        for alpha in [0.05, 0.10] {
            let (rate, ci) = calibrate(TestKind::StudentOneTailed, n, 0.0, alpha);
            rates.push(format!("N={n} a={alpha}: {rate:.4}"));
            if (rate - alpha).abs() > ci {
                student.push(format!("N={n} alpha={alpha}: rate {rate:.4} outside {alpha}±{ci:.4}"));
            }
        }
    }
    let (rate, ci) = calibrate(TestKind::WaldStudentized, 252, 0.3, 0.05);
    let mut wald = Vec::new();
    if (rate - 0.05).abs() > ci + MC_SLACK {
        wald.push(format!("rate {rate:.4} outside 0.05±{:.4}", ci + MC_SLACK));
    }
    let elapsed = start.elapsed();
    let timing = if elapsed > MC_BUDGET { vec![format!("took {elapsed:?}")] } else { vec![] };
    vec![
        outcome(
            "6a",
            &student,
            format!("Student one-tailed under the null, 1e5 reps, within 99% CI [{}]", rates.join(", ")),
        ),
        outcome("6b", &wald, format!("studentized Wald, true rho=0.3, N=252, alpha=0.05: rate {rate:.4}")),
        outcome("6c", &timing, format!("calibration runs took {elapsed:.2?} (budget 60 s)")),
    ]
}

fn recipe_behavior() -> Outcome {
    let mut failures = Vec::new();
    let mut report = Vec::new();
    for rho in [-0.5, 0.0, 0.5] {
        let params = Ar1Params::new(0.0, rho, 0.01).unwrap();
        let config = SimulationConfig::new(params, 2000, 1000, 77, prob(0.05)).unwrap();
        let s = empirical_rho_recipe(&config).unwrap();
        report.push(format!("rho={rho}: mean {:.4} bias {:+.4}", s.mean_estimate, s.bias));
        let ok = if rho == 0.0 { s.mean_estimate.abs() < 0.05 } else { s.mean_estimate.signum() == rho.signum() };
        if !ok {
            failures.push(format!("rho={rho}: mean estimate {}", s.mean_estimate));
        }
    }
    outcome("7", &failures, format!("recipe over 1000 paths of 2000 [{}]", report.join("; ")))
}

fn run_cli(args: &[&str]) -> (i32, Vec<u8>) {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = cli::run(std::iter::once("sharpe").chain(args.iter().copied()), &mut out, &mut err);
    (code, out)
}

fn determinism() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut body = String::from("date,value\n");
    for i in 0..500 {
        body.push_str(&format!("d{i},{}\n", rng.random_range(-0.02..0.0215)));
    }
    let file = tempfile::NamedTempFile::new().unwrap();
    std::fs::write(file.path(), body).unwrap();
    let path = file.path().to_str().unwrap();
    let commands: [&[&str]; 4] = [
        &["analyze", path, "--format", "json"],
        &["analyze", path],
        &["simulate", "--all-tests", "--reps", "2000", "--rho", "0.2", "--seed", "3"],
        &["simulate", "--test", "student", "--tail", "one", "--reps", "2000", "--rho-mode", "estimated", "--seed", "9"],
    ];
    let mut failures = Vec::new();
    for args in commands {
        let (a, b) = (run_cli(args), run_cli(args));
        if a.0 != 0 || a != b || a.1.is_empty() {
            failures.push(format!("{}: exit {} / {}, identical {}", args.join(" "), a.0, b.0, a == b));
        }
    }
    outcome("8", &failures, format!("{} analyze/simulate invocations byte-identical across runs", commands.len()))
}

fn main() {
    let (tables, elapsed) = generated_catalog();
    let mut outcomes = table_reproduction(&tables, elapsed);
    outcomes.push(table_equality());
    outcomes.push(delta_oracle());
    outcomes.push(distribution_accuracy());
    outcomes.push(inversion_consistency());
    outcomes.extend(monte_carlo());
    outcomes.push(recipe_behavior());
    outcomes.push(determinism());

    for o in &outcomes {
        println!("{} criterion {:<3} {}", if o.passed { "PASS" } else { "FAIL" }, o.id, o.detail);
    }
    let failed = outcomes.iter().filter(|o| !o.passed).count();
    println!("acceptance: {} passed, {failed} failed", outcomes.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
