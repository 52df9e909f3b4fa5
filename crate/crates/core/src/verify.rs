//! Runtime invariant checks shared by `geco selftest` and the test suites.
//!
//! Each check returns numbers rather than a bare boolean so callers can
//! print what was measured next to the verdict.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::data::synth_low_rank;
use crate::error::Result;
use crate::geco::{certified_tau, GecoConfig, GecoRun};
use crate::linalg::{approx_sv, random_unit_vector, DenseMatrix, LinearOperator, Vector};
use crate::objective::{
    CompletionObjective, FactoredMatrix, GradientOperator, HuberObjective, HuberTarget,
    SmoothObjective,
};
use crate::solver::SolverOptions;

/// Central-difference step.
pub const FD_STEP: f64 = 1e-5;
/// Relative tolerance for gradient agreement.
pub const FD_TOLERANCE: f64 = 1e-6;
/// Absolute slack allowed in the quadratic upper bound.
pub const SMOOTHNESS_SLACK: f64 = 1e-12;
/// Required fraction of `sigma_1` for the power-iteration estimate.
pub const ORACLE_FRACTION: f64 = 0.9;
/// Absolute slack for the per-step decrease inequality.
pub const DECREASE_SLACK: f64 = 1e-9;

fn gaussian(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> DenseMatrix {
    let normal = Normal::new(0.0, 1.0).expect("unit normal");
    DenseMatrix::from_fn(rows, cols, |_, _| normal.sample(rng))
}

/// Random factored state of the objective's shape.
pub fn random_state(obj: &dyn SmoothObjective, k: usize, rng: &mut ChaCha8Rng) -> FactoredMatrix {
    let (m, n) = obj.shape();
    FactoredMatrix {
        u: gaussian(m, k, rng),
        v: gaussian(n, k, rng),
    }
}

/// `A + eta p q^T` as factors.
fn shifted(f: &FactoredMatrix, p: &Vector, q: &Vector, eta: f64) -> FactoredMatrix {
    let k = f.k();
    let mut u = f.u.clone().insert_column(k, 0.0);
    let mut v = f.v.clone().insert_column(k, 0.0);
    u.set_column(k, &(p * eta));
    v.set_column(k, q);
    FactoredMatrix { u, v }
}

/// Relative error between `p^T G q` and a central difference of `R` along
/// `p q^T`.
pub fn directional_fd_error(
    obj: &dyn SmoothObjective,
    f: &FactoredMatrix,
    p: &Vector,
    q: &Vector,
) -> Result<f64> {
    let plus = obj.value(&shifted(f, p, q, FD_STEP))?;
    let minus = obj.value(&shifted(f, p, q, -FD_STEP))?;
    let fd = (plus - minus) / (2.0 * FD_STEP);
    let analytic = p.dot(&obj.gradient(f)?.apply(q));
    Ok((fd - analytic).abs() / analytic.abs().max(FD_TOLERANCE))
}

#[derive(Clone, Debug, PartialEq)]
pub struct GradientReport {
    pub evaluations: usize,
    pub failures: usize,
    pub max_relative_error: f64,
}

/// Finite-difference check along `directions` random unit rank-one
/// directions at each of `states` random states.
pub fn gradient_check(
    obj: &dyn SmoothObjective,
    states: usize,
    directions: usize,
    seed: u64,
) -> Result<GradientReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (m, n) = obj.shape();
    let mut report = GradientReport {
        evaluations: 0,
        failures: 0,
        max_relative_error: 0.0,
    };
    for s in 0..states {
        let f = random_state(obj, 1 + s % 3, &mut rng);
        for _ in 0..directions {
            let p = random_unit_vector(m, &mut rng);
            let q = random_unit_vector(n, &mut rng);
            let err = directional_fd_error(obj, &f, &p, &q)?;
            report.evaluations += 1;
            if !(err < FD_TOLERANCE) {
                report.failures += 1;
            }
            report.max_relative_error = report.max_relative_error.max(err);
        }
    }
    Ok(report)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SmoothnessReport {
    pub samples: usize,
    pub violations: usize,
    /// Largest `R(A + eta u v^T) - upper bound` seen (negative when slack).
    pub worst_excess: f64,
}

/// Checks `R(A + eta u v^T) <= R(A) + eta u^T G v + beta eta^2 / 2` on
/// random states, unit vectors and steps `eta` in `[-10, 10]`.
pub fn smoothness_check(
    obj: &dyn SmoothObjective,
    samples: usize,
    seed: u64,
) -> Result<SmoothnessReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (m, n) = obj.shape();
    let beta = obj.smoothness_bound();
    let mut report = SmoothnessReport {
        samples,
        violations: 0,
        worst_excess: f64::NEG_INFINITY,
    };
    let mut f = random_state(obj, 2, &mut rng);
    let mut g = obj.gradient(&f)?;
    let mut base = obj.value(&f)?;
    for s in 0..samples {
        if s % 20 == 0 && s > 0 {
            f = random_state(obj, 2, &mut rng);
            g = obj.gradient(&f)?;
            base = obj.value(&f)?;
        }
        let u = random_unit_vector(m, &mut rng);
        let v = random_unit_vector(n, &mut rng);
        let eta = rng.random_range(-10.0..10.0);
        let value = obj.value(&shifted(&f, &u, &v, eta))?;
        let bound = base + eta * u.dot(&g.apply(&v)) + 0.5 * beta * eta * eta;
        let excess = value - bound;
        if excess > SMOOTHNESS_SLACK {
            report.violations += 1;
        }
        report.worst_excess = report.worst_excess.max(excess);
    }
    Ok(report)
}

#[derive(Clone, Debug, PartialEq)]
pub struct OracleReport {
    pub matrices: usize,
    pub hits: usize,
    /// Smallest `u^T G v / sigma_1` observed.
    pub worst_ratio: f64,
}

/// Power iteration against a dense SVD on Gaussian matrices with sides
/// drawn from `10..=50`.
pub fn approx_sv_oracle(matrices: usize, iterations: usize, seed: u64) -> Result<OracleReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = OracleReport {
        matrices,
        hits: 0,
        worst_ratio: f64::INFINITY,
    };
    for _ in 0..matrices {
        let m = rng.random_range(10..=50);
        let n = rng.random_range(10..=50);
        let g = gaussian(m, n, &mut rng);
        let sigma = nalgebra::SVD::new(g.clone(), false, false)
            .singular_values
            .max();
        let pair = approx_sv(&g, iterations, rng.random())?;
        let ratio = pair.u.dot(&(&g * &pair.v)) / sigma;
        if ratio >= ORACLE_FRACTION {
            report.hits += 1;
        }
        report.worst_ratio = report.worst_ratio.min(ratio);
    }
    Ok(report)
}

/// Parameters of the synthetic guarantee check.
#[derive(Clone, Debug, PartialEq)]
pub struct GuaranteeParams {
    pub m: usize,
    pub n: usize,
    pub rank_budget: usize,
    /// Singular values of the planted reference matrix.
    pub planted: Vec<f64>,
    pub noise: f64,
    pub observed_fraction: f64,
    pub power_iterations: usize,
    /// Target accuracy as a fraction of `R(0)`.
    pub epsilon_fraction: f64,
    /// Largest power-iteration shortfall the guarantee is stated for.
    pub tau_max: f64,
}

impl Default for GuaranteeParams {
    fn default() -> Self {
        Self {
            m: 40,
            n: 40,
            rank_budget: 15,
            planted: vec![5.0],
            noise: 1.0,
            observed_fraction: 1.0,
            power_iterations: 300,
            epsilon_fraction: 0.01,
            tau_max: 0.1,
        }
    }
}

/// One seeded run of plain greedy iterations against a planted reference.
#[derive(Clone, Debug, PartialEq)]
pub struct GuaranteeReport {
    pub seed: u64,
    pub beta: f64,
    pub epsilon: f64,
    pub reference_trace_norm: f64,
    /// `R(reference)`.
    pub reference_value: f64,
    /// Whether `|ref|_tr^2 <= eps (r + 1) (1 - tau_max)^2 / (2 beta)`.
    pub precondition: bool,
    /// Objective after each rank-increasing iteration, starting at `R(0)`.
    pub values: Vec<f64>,
    /// Certified shortfall of each direction.
    pub taus: Vec<f64>,
    /// Iterations violating the per-step decrease inequality.
    pub decrease_violations: Vec<usize>,
}

impl GuaranteeReport {
    pub fn final_value(&self) -> f64 {
        *self.values.last().expect("values start with R(0)")
    }

    pub fn bound_holds(&self) -> bool {
        self.final_value() <= self.reference_value + self.epsilon
    }

    pub fn max_tau(&self) -> f64 {
        self.taus.iter().cloned().fold(0.0, f64::max)
    }

    pub fn taus_certified(&self, tau_max: f64) -> bool {
        self.taus.iter().all(|&t| t <= tau_max)
    }
}

/// Runs plain greedy iterations on a noisy planted instance, certifying the
/// power-iteration shortfall at every step and checking the per-step
/// decrease `e_i - e_{i+1} >= e_i^2 (1 - tau_i)^2 / (2 beta |ref|_tr^2)`.
pub fn guarantee_check(params: &GuaranteeParams, seed: u64) -> Result<GuaranteeReport> {
    let inst = synth_low_rank(
        params.m,
        params.n,
        &params.planted,
        params.noise,
        params.observed_fraction,
        seed,
    )?;
    let obj = CompletionObjective::new(inst.observations.clone());
    let beta = obj.smoothness_bound();
    let trace_norm = inst.trace_norm();
    let reference_value = obj.value(&inst.truth)?;
    let r0 = obj.value(&FactoredMatrix::zeros(params.m, params.n))?;
    let epsilon = params.epsilon_fraction * r0;
    let precondition = trace_norm.powi(2)
        <= epsilon * (params.rank_budget + 1) as f64 * (1.0 - params.tau_max).powi(2)
            / (2.0 * beta);

    let config = GecoConfig {
        power_iterations: params.power_iterations,
        seed,
        solver: SolverOptions::default(),
        ..GecoConfig::plain(params.rank_budget)
    };
    let mut run = GecoRun::new(&obj, config)?;
    let mut values = vec![run.objective_value()];
    let mut taus = Vec::new();
    let mut decrease_violations = Vec::new();
    while !run.is_finished() {
        let gradient = obj.gradient(&run.factors())?.to_dense();
        let before = run.objective_value();
        run.advance(&mut |_, _| {})?;
        let Some(pair) = run.last_pair() else { break };
        if pair.stationary {
            break;
        }
        let tau = certified_tau(&gradient, pair);
        let after = run.objective_value();
        let gap = before - reference_value;
        if gap > 0.0 {
            let need = gap * gap * (1.0 - tau).powi(2) / (2.0 * beta * trace_norm * trace_norm);
            if before - after < need - DECREASE_SLACK {
                decrease_violations.push(taus.len() + 1);
            }
        }
        taus.push(tau);
        values.push(after);
    }
    Ok(GuaranteeReport {
        seed,
        beta,
        epsilon,
        reference_trace_norm: trace_norm,
        reference_value,
        precondition,
        values,
        taus,
        decrease_violations,
    })
}

/// Objective wrapper that negates the gradient; a deliberately broken
/// fixture for exercising the finite-difference check.
pub struct SignFlipped<O>(pub O);

impl<O: SmoothObjective> SmoothObjective for SignFlipped<O> {
    fn shape(&self) -> (usize, usize) {
        self.0.shape()
    }

    fn value(&self, f: &FactoredMatrix) -> Result<f64> {
        self.0.value(f)
    }

    fn gradient(&self, f: &FactoredMatrix) -> Result<GradientOperator> {
        Ok(GradientOperator::Dense(-self.0.gradient(f)?.to_dense()))
    }

    fn smoothness_bound(&self) -> f64 {
        self.0.smoothness_bound()
    }
}

/// Objectives the suite checks gradients and smoothness of.
pub struct Fixtures {
    pub objectives: Vec<(String, Box<dyn SmoothObjective>)>,
}

impl Fixtures {
    /// A partially observed completion loss and a Huber loss with large
    /// residuals, so both quadratic and linear regions are exercised.
    pub fn standard(seed: u64) -> Result<Self> {
        let inst = synth_low_rank(12, 9, &[3.0, 1.0], 0.5, 0.6, seed)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37);
        let target = HuberTarget::new(gaussian(10, 11, &mut rng) * 3.0)?;
        Ok(Self {
            objectives: vec![
                (
                    "completion".into(),
                    Box::new(CompletionObjective::new(inst.observations)),
                ),
                ("huber".into(), Box::new(HuberObjective::new(target))),
            ],
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

pub const GRADIENT_CHECK: &str = "finite-difference gradient";
pub const SMOOTHNESS_CHECK: &str = "smoothness certificate";
pub const ORACLE_CHECK: &str = "power-iteration oracle bound";
pub const GUARANTEE_CHECK: &str = "greedy accuracy guarantee";
pub const DECREASE_CHECK: &str = "per-step decrease";

/// Runs every invariant once and returns one outcome per invariant.
pub fn run_suite(fixtures: &Fixtures) -> Vec<CheckOutcome> {
    let mut out = Vec::new();

    let mut passed = true;
    let mut detail = String::new();
    for (name, obj) in &fixtures.objectives {
        match gradient_check(obj.as_ref(), 5, 20, 1) {
            Ok(r) => {
                passed &= r.failures == 0;
                let _ = write!(detail, "{name}: max rel err {:.1e} ", r.max_relative_error);
            }
            Err(e) => {
                passed = false;
                let _ = write!(detail, "{name}: {e} ");
            }
        }
    }
    out.push(CheckOutcome {
        name: GRADIENT_CHECK,
        passed,
        detail: detail.trim_end().to_string(),
    });

    let mut passed = true;
    let mut detail = String::new();
    for (name, obj) in &fixtures.objectives {
        match smoothness_check(obj.as_ref(), 200, 2) {
            Ok(r) => {
                passed &= r.violations == 0;
                let _ = write!(
                    detail,
                    "{name}: {} violations of {} ",
                    r.violations, r.samples
                );
            }
            Err(e) => {
                passed = false;
                let _ = write!(detail, "{name}: {e} ");
            }
        }
    }
    out.push(CheckOutcome {
        name: SMOOTHNESS_CHECK,
        passed,
        detail: detail.trim_end().to_string(),
    });

    out.push(
        match (approx_sv_oracle(50, 30, 3), approx_sv_oracle(50, 200, 3)) {
            (Ok(a), Ok(b)) => CheckOutcome {
                name: ORACLE_CHECK,
                passed: a.hits >= 48 && b.hits == 50,
                detail: format!("30 iters {}/50, 200 iters {}/50", a.hits, b.hits),
            },
            (Err(e), _) | (_, Err(e)) => CheckOutcome {
                name: ORACLE_CHECK,
                passed: false,
                detail: e.to_string(),
            },
        },
    );

    let params = GuaranteeParams::default();
    let reports: Result<Vec<_>> = (0..10).map(|seed| guarantee_check(&params, seed)).collect();
    match reports {
        Ok(reports) => {
            let ok = reports
                .iter()
                .filter(|r| r.precondition && r.taus_certified(params.tau_max) && r.bound_holds())
                .count();
            let max_tau = reports.iter().map(|r| r.max_tau()).fold(0.0, f64::max);
            out.push(CheckOutcome {
                name: GUARANTEE_CHECK,
                passed: ok == reports.len(),
                detail: format!("{ok}/{} instances, max tau {max_tau:.3}", reports.len()),
            });
            let violations: usize = reports.iter().map(|r| r.decrease_violations.len()).sum();
            let steps: usize = reports.iter().map(|r| r.taus.len()).sum();
            out.push(CheckOutcome {
                name: DECREASE_CHECK,
                passed: violations == 0,
                detail: format!("{violations} violations in {steps} steps"),
            });
        }
        Err(e) => {
            for name in [GUARANTEE_CHECK, DECREASE_CHECK] {
                out.push(CheckOutcome {
                    name,
                    passed: false,
                    detail: e.to_string(),
                });
            }
        }
    }
    out
}

/// Fixed-width pass/fail table.
pub fn format_table(outcomes: &[CheckOutcome]) -> String {
    let width = outcomes.iter().map(|o| o.name.len()).max().unwrap_or(0);
    let mut s = String::new();
    for o in outcomes {
        let verdict = if o.passed { "PASS" } else { "FAIL" };
        let _ = writeln!(s, "{:<width$}  {verdict}  {}", o.name, o.detail);
    }
    s
}
