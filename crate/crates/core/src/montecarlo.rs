//! AR(1) simulation and empirical checks of the tests.
//!
//! Every replication draws from its own ChaCha stream (`seed`, stream =
//! replication index), so results do not depend on how rayon schedules work.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal, StudentT};
use rayon::prelude::*;
use serde::Serialize;

use crate::autocorr::{estimate_rho, estimate_rho_with, Ar1Params, ThirdLag};
use crate::error::{Error, Result};
use crate::series::{annualize_sqrt, sample_mean, sample_std, ObservationSeries};
use crate::significance::{luck_p_value, TestKind, TestSpec};
use crate::special::{normal_inv, Probability};

/// Distribution of the unit-variance innovations `v_t`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Innovations {
    #[default]
    Normal,
    /// Student-t rescaled to unit variance; needs `dof > 2`.
    ScaledStudent { dof: f64 },
}

enum Sampler {
    Normal,
    Student(StudentT<f64>, f64),
}

impl Sampler {
    fn new(innovations: Innovations) -> Result<Self> {
        match innovations {
            Innovations::Normal => Ok(Sampler::Normal),
            Innovations::ScaledStudent { dof } => {
                if !(dof > 2.0 && dof.is_finite()) {
                    return Err(Error::domain("Innovations", format!("dof must exceed 2, got {dof}")));
                }
                let dist = StudentT::new(dof).map_err(|e| Error::domain("Innovations", e.to_string()))?;
                Ok(Sampler::Student(dist, ((dof - 2.0) / dof).sqrt()))
            }
        }
    }

    fn draw(&self, rng: &mut ChaCha8Rng) -> f64 {
        match self {
            Sampler::Normal => StandardNormal.sample(rng),
            Sampler::Student(dist, scale) => dist.sample(rng) * scale,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SimulationConfig {
    pub params: Ar1Params,
    pub n: usize,
    pub replications: usize,
    pub seed: u64,
    pub alpha: Probability,
    pub periods_per_year: f64,
    pub innovations: Innovations,
}

impl SimulationConfig {
    pub fn new(params: Ar1Params, n: usize, replications: usize, seed: u64, alpha: Probability) -> Result<Self> {
        if replications == 0 {
            return Err(Error::domain("SimulationConfig", "replications must be at least 1"));
        }
        if n < 4 {
            return Err(Error::domain("SimulationConfig", format!("need n >= 4, got {n}")));
        }
        Ok(Self {
            params,
            n,
            replications,
            seed,
            alpha,
            periods_per_year: 252.0,
            innovations: Innovations::Normal,
        })
    }

    pub fn with_periods_per_year(mut self, periods_per_year: f64) -> Result<Self> {
        if !(periods_per_year > 0.0 && periods_per_year.is_finite()) {
            return Err(Error::domain("SimulationConfig", "periods per year must be positive"));
        }
        self.periods_per_year = periods_per_year;
        Ok(self)
    }

    pub fn with_innovations(mut self, innovations: Innovations) -> Result<Self> {
        Sampler::new(innovations)?;
        self.innovations = innovations;
        Ok(self)
    }
}

fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn fill_path(params: &Ar1Params, sampler: &Sampler, rng: &mut ChaCha8Rng, out: &mut [f64]) {
    let mut eps = params.stationary_std() * sampler.draw(rng);
    for (t, slot) in out.iter_mut().enumerate() {
        if t > 0 {
            eps = params.rho * eps + params.sigma * sampler.draw(rng);
        }
        *slot = params.mu + eps;
    }
}

/// Path number `replication` of the configuration; path 0 is the default.
pub fn simulate_path(config: &SimulationConfig, replication: u64) -> Result<ObservationSeries> {
    let sampler = Sampler::new(config.innovations)?;
    let mut values = vec![0.0; config.n];
    fill_path(&config.params, &sampler, &mut rng_for(config.seed, replication), &mut values);
    ObservationSeries::returns(values, config.periods_per_year)
}

pub fn simulate_ar1(config: &SimulationConfig) -> Result<ObservationSeries> {
    simulate_path(config, 0)
}

/// Whether the test is fed the simulation's ρ or the recipe's estimate per path.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RhoMode {
    #[default]
    True,
    Estimated,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Calibration {
    pub test: TestKind,
    pub n: usize,
    pub periods_per_year: f64,
    pub rho: f64,
    pub alpha: f64,
    pub replications: usize,
    pub rate: Probability,
    /// Half-width of the 99% normal-approximation binomial interval.
    pub ci_halfwidth: f64,
}

fn binomial_ci_halfwidth(p: f64, reps: usize) -> Result<f64> {
    let z = normal_inv(0.995)?;
    Ok(z * (p * (1.0 - p) / reps as f64).sqrt())
}

/// Rejection rate of `spec` under the null (`μ` equals the risk-free rate),
/// rejecting when the luck probability is at most α. Each path is tested
/// with its square-root-rule annualized Sharpe.
pub fn empirical_type1(spec: &TestSpec, config: &SimulationConfig, mode: RhoMode) -> Result<Calibration> {
    if spec.n() != config.n {
        return Err(Error::domain(
            "empirical_type1",
            format!("test expects n = {} but paths have n = {}", spec.n(), config.n),
        ));
    }
    let sampler = Sampler::new(config.innovations)?;
    let alpha = config.alpha.value();
    let rf = config.params.mu;
    let rejections = (0..config.replications as u64)
        .into_par_iter()
        .map_init(
            || vec![0.0; config.n],
            |path, rep| -> Result<u64> {
                fill_path(&config.params, &sampler, &mut rng_for(config.seed, rep), path);
                let std = sample_std(path)?;
                if std == 0.0 {
                    return Err(Error::Degenerate("simulated path has zero variance".into()));
                }
                let sr = annualize_sqrt((sample_mean(path)? - rf) / std, config.periods_per_year);
                let luck = match mode {
                    RhoMode::True => luck_p_value(sr, spec)?,
                    RhoMode::Estimated => {
                        let rho = estimate_rho_with(path, ThirdLag::Lag3)?.rho;
                        let fitted = TestSpec::new(spec.test(), spec.n(), spec.periods_per_year(), rho)?
                            .with_modified_form(spec.modified_form());
                        luck_p_value(sr, &fitted)?
                    }
                };
                Ok(u64::from(luck.value() <= alpha))
            },
        )
        .try_reduce(|| 0, |a, b| Ok(a + b))?;
    let rate = rejections as f64 / config.replications as f64;
    Ok(Calibration {
        test: spec.test(),
        n: config.n,
        periods_per_year: spec.periods_per_year(),
        rho: spec.rho(),
        alpha,
        replications: config.replications,
        rate: Probability::new(rate)?,
        ci_halfwidth: binomial_ci_halfwidth(rate, config.replications)?,
    })
}

pub const CALIBRATION_CSV_HEADER: [&str; 8] = ["test", "N", "F", "rho", "alpha", "reps", "rate", "ci"];

impl Calibration {
    pub fn csv_record(&self) -> [String; 8] {
        [
            self.test.name().to_string(),
            self.n.to_string(),
            self.periods_per_year.to_string(),
            self.rho.to_string(),
            self.alpha.to_string(),
            self.replications.to_string(),
            format!("{:.6}", self.rate.value()),
            format!("{:.6}", self.ci_halfwidth),
        ]
    }
}

pub fn render_calibration_csv(rows: &[Calibration]) -> Result<String> {
    let io = |e: csv::Error| Error::domain("render_calibration_csv", e.to_string());
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CALIBRATION_CSV_HEADER).map_err(io)?;
    for row in rows {
        w.write_record(row.csv_record()).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::domain("render_calibration_csv", e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::domain("render_calibration_csv", e.to_string()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AggregationCheck {
    pub empirical: f64,
    pub theoretical: f64,
    pub relative_error: f64,
    /// Standard error of the empirical variance relative to the theoretical one.
    pub relative_standard_error: f64,
}

impl AggregationCheck {
    pub fn within(&self, standard_errors: f64) -> bool {
        self.relative_error < standard_errors * self.relative_standard_error
    }
}

/// Compares the sample variance of `R_1 + ... + R_q` over `reps` stationary
/// paths with `Var(R)(q + 2 Σ (q - k) ρ^k)`.
pub fn empirical_aggregation_check(params: &Ar1Params, q: usize, reps: usize, seed: u64) -> Result<AggregationCheck> {
    if q == 0 || reps < 2 {
        return Err(Error::domain("empirical_aggregation_check", "need q >= 1 and at least 2 replications"));
    }
    let sampler = Sampler::new(Innovations::Normal)?;
    let sums: Vec<f64> = (0..reps as u64)
        .into_par_iter()
        .map_init(
            || vec![0.0; q],
            |path, rep| {
                fill_path(params, &sampler, &mut rng_for(seed, rep), path);
                path.iter().sum()
            },
        )
        .collect();
    let empirical = sample_std(&sums)?.powi(2);
    let qf = q as f64;
    let weighted: f64 = (1..q).map(|k| (qf - k as f64) * params.rho.powi(k as i32)).sum();
    let theoretical = params.stationary_variance() * (qf + 2.0 * weighted);
    Ok(AggregationCheck {
        empirical,
        theoretical,
        relative_error: (empirical - theoretical).abs() / theoretical,
        relative_standard_error: (2.0 / (reps as f64 - 1.0)).sqrt(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RecipeSummary {
    pub true_rho: f64,
    pub mean_estimate: f64,
    pub bias: f64,
    pub paths: usize,
}

/// Mean of the averaged autocorrelation estimate over simulated paths.
pub fn empirical_rho_recipe(config: &SimulationConfig) -> Result<RecipeSummary> {
    let estimates: Vec<f64> = (0..config.replications as u64)
        .into_par_iter()
        .map(|rep| Ok(estimate_rho(&simulate_path(config, rep)?)?.rho))
        .collect::<Result<_>>()?;
    let mean_estimate = sample_mean(&estimates)?;
    Ok(RecipeSummary {
        true_rho: config.params.rho,
        mean_estimate,
        bias: mean_estimate - config.params.rho,
        paths: config.replications,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(rho: f64, n: usize, reps: usize) -> SimulationConfig {
        let params = Ar1Params::new(0.0, rho, 0.01).unwrap();
        SimulationConfig::new(params, n, reps, 7, Probability::new(0.05).unwrap()).unwrap()
    }

    #[test]
    fn config_validation() {
        let params = Ar1Params::new(0.0, 0.0, 1.0).unwrap();
        let a = Probability::new(0.05).unwrap();
        assert!(SimulationConfig::new(params, 100, 0, 1, a).is_err());
        assert!(SimulationConfig::new(params, 3, 10, 1, a).is_err());
        let c = SimulationConfig::new(params, 100, 10, 1, a).unwrap();
        assert!(c.with_innovations(Innovations::ScaledStudent { dof: 2.0 }).is_err());
    }

    #[test]
    fn fixed_seed_is_bit_identical() {
        let c = config(0.3, 500, 1);
        assert_eq!(simulate_ar1(&c).unwrap(), simulate_ar1(&c).unwrap());
        assert_ne!(simulate_path(&c, 0).unwrap(), simulate_path(&c, 1).unwrap());
    }

    #[test]
    fn tiny_sigma_is_nearly_constant() {
        let params = Ar1Params::new(0.02, 0.5, 1e-12).unwrap();
        let c = SimulationConfig::new(params, 50, 1, 3, Probability::new(0.05).unwrap()).unwrap();
        let s = simulate_ar1(&c).unwrap();
        assert!(s.values().iter().all(|v| (v - 0.02).abs() < 1e-9));
    }

    #[test]
    fn alpha_one_rejects_everything() {
        let mut c = config(0.0, 30, 200);
        c.alpha = Probability::new(1.0).unwrap();
        let spec = TestSpec::new(TestKind::StudentTwoTailed, 30, 252.0, 0.0).unwrap();
        assert_eq!(empirical_type1(&spec, &c, RhoMode::True).unwrap().rate.value(), 1.0);
    }

    #[test]
    fn mismatched_n_is_rejected() {
        let spec = TestSpec::new(TestKind::StudentOneTailed, 31, 252.0, 0.0).unwrap();
        assert!(empirical_type1(&spec, &config(0.0, 30, 10), RhoMode::True).is_err());
    }

    #[test]
    fn aggregation_q1_is_stationary_variance() {
        let params = Ar1Params::new(0.0, 0.4, 1.0).unwrap();
        let check = empirical_aggregation_check(&params, 1, 20_000, 11).unwrap();
        assert_eq!(check.theoretical, params.stationary_variance());
        assert!(check.within(4.0), "{check:?}");
    }

    #[test]
    fn heavy_tails_keep_unit_variance() {
        let params = Ar1Params::new(0.0, 0.0, 1.0).unwrap();
        let c = SimulationConfig::new(params, 200_000, 1, 5, Probability::new(0.05).unwrap())
            .unwrap()
            .with_innovations(Innovations::ScaledStudent { dof: 5.0 })
            .unwrap();
        let s = simulate_ar1(&c).unwrap();
        assert!((s.std() - 1.0).abs() < 0.02);
    }

    #[test]
    fn csv_rows() {
        let spec = TestSpec::new(TestKind::StudentOneTailed, 30, 252.0, 0.0).unwrap();
        let cal = empirical_type1(&spec, &config(0.0, 30, 100), RhoMode::True).unwrap();
        let csv = render_calibration_csv(&[cal]).unwrap();
        assert!(csv.starts_with("test,N,F,rho,alpha,reps,rate,ci\nstudent-one,30,252,0,0.05,100,"));
    }
}
