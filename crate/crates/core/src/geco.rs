//! Greedy rank-one component optimization.
//!
//! Each rank-increasing iteration
//! 1. takes the leading singular pair `(u, v)` of `grad R(U V^T)`,
//! 2. appends it to the factors,
//! 3. solves `B = argmin R(U B V^T)` over all `s x s` matrices,
//! 4. factors `B = P D Q^T` and sets `U <- U P D`, `V <- V Q`.
//!
//! Optional variants: a sign-vector candidate direction compared against the
//! singular pair by post-solve objective, rank-preserving replacement steps,
//! a ridge term on `|A|_F^2` (solved on orthonormalized bases), and a
//! diagonal-only `B`. Every committed state has an objective no larger than
//! the one before it.

use std::fmt;
use std::time::{Duration, Instant};

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{GecoError, Result};
use crate::linalg::{
    approx_sv, orthonormalize_columns, thin_svd, DenseMatrix, LinearOperator, SingularPair, Vector,
};
use crate::objective::{
    frobenius_regularized, FactoredMatrix, FrobeniusRegularized, SmoothObjective,
};
use crate::solver::SolverOptions;

/// Relative singular-value threshold used when reporting the rank of `U V^T`.
const RANK_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct GecoConfig {
    /// Maximum number of factor columns `r`.
    pub rank_budget: usize,
    /// Power-iteration rounds per singular-pair estimate.
    pub power_iterations: usize,
    /// Replacement attempts after each rank-increasing iteration (`q`).
    pub replacement_attempts: usize,
    /// Also try the alternating sign-vector direction and keep the better one.
    pub use_linf_heuristic: bool,
    pub linf_max_rounds: usize,
    /// Restrict the corrective step to diagonal `B`.
    pub diagonal_b: bool,
    /// Coefficient of `|A|_F^2` added to the objective.
    pub frobenius_coeff: f64,
    pub solver: SolverOptions,
    pub seed: u64,
    /// Stop once an iteration improves the objective by less than this.
    pub stop_epsilon: f64,
}

impl Default for GecoConfig {
    fn default() -> Self {
        Self {
            rank_budget: 10,
            power_iterations: 30,
            replacement_attempts: 20,
            use_linf_heuristic: false,
            linf_max_rounds: 50,
            diagonal_b: false,
            frobenius_coeff: 0.0,
            solver: SolverOptions::default(),
            seed: 0,
            stop_epsilon: 0.0,
        }
    }
}

impl GecoConfig {
    /// The experimental protocol used on MovieLens: 30 power iterations,
    /// 20 replacement attempts, sign-vector candidates enabled.
    pub fn movielens_protocol(rank_budget: usize) -> Self {
        Self {
            rank_budget,
            use_linf_heuristic: true,
            ..Self::default()
        }
    }

    /// Plain greedy iterations: no heuristic direction, no replacements.
    pub fn plain(rank_budget: usize) -> Self {
        Self {
            rank_budget,
            replacement_attempts: 0,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.rank_budget == 0 {
            return Err(GecoError::InvalidConfig(
                "rank budget must be at least 1".into(),
            ));
        }
        if self.power_iterations == 0 {
            return Err(GecoError::InvalidConfig(
                "power_iterations must be at least 1".into(),
            ));
        }
        if self.linf_max_rounds == 0 {
            return Err(GecoError::InvalidConfig(
                "linf_max_rounds must be at least 1".into(),
            ));
        }
        if !(self.frobenius_coeff >= 0.0 && self.frobenius_coeff.is_finite()) {
            return Err(GecoError::InvalidConfig(format!(
                "frobenius_coeff must be finite and non-negative, got {}",
                self.frobenius_coeff
            )));
        }
        if !(self.stop_epsilon >= 0.0) {
            return Err(GecoError::InvalidConfig(
                "stop_epsilon must be non-negative".into(),
            ));
        }
        self.solver.validate()
    }
}

/// What produced the state recorded in an [`IterationRecord`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DirectionSource {
    SingularPair,
    LinfHeuristic,
    /// Rank-preserving replacement that strictly lowered the objective.
    Replacement,
    /// Rejected replacement whose appended component was kept instead.
    ReplacementFallback,
}

impl DirectionSource {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::SingularPair => "singular-pair",
            Self::LinfHeuristic => "linf-heuristic",
            Self::Replacement => "replacement",
            Self::ReplacementFallback => "replacement-fallback",
        }
    }

    pub fn increases_rank(self) -> bool {
        !matches!(self, Self::Replacement)
    }
}

impl fmt::Display for DirectionSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct IterationRecord {
    /// 1-based index of the committed step.
    pub iteration: usize,
    /// Numerical rank of `U V^T`.
    pub rank: usize,
    /// Number of factor columns.
    pub columns: usize,
    pub objective: f64,
    pub train_rmse: Option<f64>,
    pub test_rmse: Option<f64>,
    pub source: DirectionSource,
    /// Cumulative replacement attempts so far.
    pub replacements_attempted: usize,
    /// Cumulative accepted replacements so far.
    pub replacements_accepted: usize,
    /// Wall-clock time since the start of the run.
    pub elapsed: Duration,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct RunTrace {
    pub records: Vec<IterationRecord>,
    /// Set when the run stopped at a zero gradient.
    pub stationary: bool,
}

impl RunTrace {
    pub fn objectives(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.objective).collect()
    }

    pub fn final_objective(&self) -> Option<f64> {
        self.records.last().map(|r| r.objective)
    }

    pub fn replacements_attempted(&self) -> usize {
        self.records.last().map_or(0, |r| r.replacements_attempted)
    }

    pub fn replacements_accepted(&self) -> usize {
        self.records.last().map_or(0, |r| r.replacements_accepted)
    }
}

/// A sign vector pair `u in {+-1/sqrt m}^m`, `v in {+-1/sqrt n}^n`.
#[derive(Clone, Debug, PartialEq)]
pub struct LinfDirection {
    pub u: Vector,
    pub v: Vector,
    pub value: f64,
    pub rounds: usize,
}

/// Alternating maximization of `u^T G v` over sign vectors, starting from
/// seeded random signs for `u`.
pub fn alternating_linf_direction<G: LinearOperator + ?Sized>(
    op: &G,
    max_rounds: usize,
    seed: u64,
) -> LinfDirection {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let start = Vector::from_fn(
        op.nrows(),
        |_, _| if rng.random::<bool>() { 1.0 } else { -1.0 },
    );
    alternating_linf_from(op, &start, max_rounds)
}

/// Alternating sign maximization from the signs of `start_u`.
///
/// `v <- sign(G^T u)`, then `u <- sign(G v)`, until neither changes or
/// `max_rounds` rounds have run. A zero coordinate keeps its previous sign
/// (`+1` for `v` on the first round), so `u^T G v` never decreases.
pub fn alternating_linf_from<G: LinearOperator + ?Sized>(
    op: &G,
    start_u: &Vector,
    max_rounds: usize,
) -> LinfDirection {
    let (m, n) = (op.nrows(), op.ncols());
    let mut u: Vector = start_u.map(|x| if x < 0.0 { -1.0 } else { 1.0 });
    let mut v = Vector::from_element(n, 1.0);
    let mut rounds = 0;
    for _ in 0..max_rounds.max(1) {
        rounds += 1;
        let w = op.apply_transpose(&u);
        let new_v = Vector::from_fn(n, |j, _| sign_keep(w[j], v[j]));
        let z = op.apply(&new_v);
        let new_u = Vector::from_fn(m, |i, _| sign_keep(z[i], u[i]));
        let changed = new_v != v || new_u != u;
        v = new_v;
        u = new_u;
        if !changed {
            break;
        }
    }
    let u = u / (m as f64).sqrt();
    let v = v / (n as f64).sqrt();
    let value = u.dot(&op.apply(&v));
    LinfDirection {
        u,
        v,
        value,
        rounds,
    }
}

fn sign_keep(x: f64, previous: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        previous
    }
}

/// `1 - u^T G v / sigma_1(G)`, with `sigma_1` from a dense SVD.
pub fn certified_tau(g: &DenseMatrix, pair: &SingularPair) -> f64 {
    let sigma = nalgebra::SVD::new(g.clone(), false, false)
        .singular_values
        .iter()
        .cloned()
        .fold(0.0, f64::max);
    if sigma == 0.0 {
        return 0.0;
    }
    1.0 - pair.u.dot(&(g * &pair.v)) / sigma
}

/// Candidate rank-one direction with where it came from.
#[derive(Clone, Debug)]
pub struct Direction {
    pub u: Vector,
    pub v: Vector,
    pub source: DirectionSource,
}

/// Proposed next state.
#[derive(Clone, Debug)]
struct Trial {
    state: State,
    value: f64,
}

/// Factor state. In full-`B` mode `basis_u` already includes the singular
/// values (`U P D`) and `coeffs` is empty; in diagonal mode
/// `U = basis_u diag(coeffs)`.
#[derive(Clone, Debug)]
struct State {
    basis_u: DenseMatrix,
    v: DenseMatrix,
    coeffs: Option<Vector>,
}

impl State {
    fn empty(m: usize, n: usize, diagonal: bool) -> Self {
        Self {
            basis_u: DenseMatrix::zeros(m, 0),
            v: DenseMatrix::zeros(n, 0),
            coeffs: diagonal.then(|| Vector::zeros(0)),
        }
    }

    fn columns(&self) -> usize {
        self.v.ncols()
    }

    fn factors(&self) -> FactoredMatrix {
        match &self.coeffs {
            None => FactoredMatrix {
                u: self.basis_u.clone(),
                v: self.v.clone(),
            },
            Some(d) => {
                let mut u = self.basis_u.clone();
                for k in 0..d.len() {
                    u.column_mut(k).scale_mut(d[k]);
                }
                FactoredMatrix {
                    u,
                    v: self.v.clone(),
                }
            }
        }
    }
}

/// Observer invoked for every committed step; it may fill in the RMSE fields
/// of the record before it is stored.
pub type Observer<'o> = dyn FnMut(&mut IterationRecord, &FactoredMatrix) + 'o;

/// Incremental driver: one call to [`GecoRun::advance`] performs one
/// rank-increasing iteration followed by its replacement phase.
pub struct GecoRun<'a> {
    base: &'a dyn SmoothObjective,
    regularized: Option<FrobeniusRegularized<'a>>,
    config: GecoConfig,
    state: State,
    value: f64,
    rng: ChaCha8Rng,
    trace: RunTrace,
    started: Instant,
    finished: bool,
    last_pair: Option<SingularPair>,
    attempted: usize,
    accepted: usize,
}

impl<'a> GecoRun<'a> {
    pub fn new(objective: &'a dyn SmoothObjective, config: GecoConfig) -> Result<Self> {
        config.validate()?;
        let regularized = if config.frobenius_coeff > 0.0 {
            Some(frobenius_regularized(objective, config.frobenius_coeff)?)
        } else {
            None
        };
        let (m, n) = objective.shape();
        let state = State::empty(m, n, config.diagonal_b);
        let mut run = Self {
            base: objective,
            regularized,
            rng: ChaCha8Rng::seed_from_u64(config.seed),
            config,
            state,
            value: 0.0,
            trace: RunTrace::default(),
            started: Instant::now(),
            finished: false,
            last_pair: None,
            attempted: 0,
            accepted: 0,
        };
        run.value = run.objective().value(&run.state.factors())?;
        Ok(run)
    }

    /// The objective being minimized, including any Frobenius term.
    pub fn objective(&self) -> &dyn SmoothObjective {
        match &self.regularized {
            Some(r) => r,
            None => self.base,
        }
    }

    pub fn config(&self) -> &GecoConfig {
        &self.config
    }

    pub fn factors(&self) -> FactoredMatrix {
        self.state.factors()
    }

    pub fn objective_value(&self) -> f64 {
        self.value
    }

    pub fn columns(&self) -> usize {
        self.state.columns()
    }

    pub fn is_finished(&self) -> bool {
        self.finished || self.state.columns() >= self.config.rank_budget
    }

    /// Singular pair computed at the start of the latest iteration.
    pub fn last_pair(&self) -> Option<&SingularPair> {
        self.last_pair.as_ref()
    }

    pub fn trace(&self) -> &RunTrace {
        &self.trace
    }

    pub fn into_parts(self) -> (FactoredMatrix, RunTrace) {
        (self.state.factors(), self.trace)
    }

    /// Runs to the rank budget or an early stop.
    pub fn run_to_end(&mut self, observer: &mut Observer<'_>) -> Result<()> {
        while !self.is_finished() {
            self.advance(observer)?;
        }
        Ok(())
    }

    /// One rank-increasing iteration plus up to `q` replacement attempts.
    /// Returns the number of records committed.
    pub fn advance(&mut self, observer: &mut Observer<'_>) -> Result<usize> {
        if self.is_finished() {
            return Ok(0);
        }
        let iteration = self.trace.records.len() + 1;
        let before = self.trace.records.len();
        self.advance_inner(observer).map_err(|e| match e {
            e @ GecoError::Iteration { .. } => e,
            other => GecoError::Iteration {
                iteration,
                source: Box::new(other),
            },
        })?;
        Ok(self.trace.records.len() - before)
    }

    fn advance_inner(&mut self, observer: &mut Observer<'_>) -> Result<()> {
        let previous = self.value;
        let gradient = self.objective().gradient(&self.state.factors())?;
        let seed = self.rng.next_u64();
        let pair = approx_sv(&gradient, self.config.power_iterations, seed)?;
        self.last_pair = Some(pair.clone());
        if pair.stationary {
            self.finished = true;
            self.trace.stationary = true;
            return Ok(());
        }

        let (trial, source) = self.select_direction(&gradient, &pair)?;
        self.commit(trial, source, observer);

        if previous - self.value < self.config.stop_epsilon {
            self.finished = true;
            return Ok(());
        }

        for _ in 0..self.config.replacement_attempts {
            if self.value <= 0.0 {
                break;
            }
            let accepted = self.replacement_step(observer)?;
            if !accepted {
                break;
            }
        }
        Ok(())
    }

    /// Leading singular pair, or the better of it and the sign-vector
    /// candidate when the heuristic is on.
    fn select_direction(
        &mut self,
        gradient: &impl LinearOperator,
        pair: &SingularPair,
    ) -> Result<(Trial, DirectionSource)> {
        let sv = Direction {
            u: pair.u.clone(),
            v: pair.v.clone(),
            source: DirectionSource::SingularPair,
        };
        let sv_trial = self.extend(&sv.u, &sv.v)?;
        if !self.config.use_linf_heuristic {
            return Ok((sv_trial, sv.source));
        }
        let linf = alternating_linf_from(gradient, &pair.u, self.config.linf_max_rounds);
        let linf_trial = self.extend(&linf.u, &linf.v)?;
        Ok(if linf_trial.value < sv_trial.value {
            (linf_trial, DirectionSource::LinfHeuristic)
        } else {
            (sv_trial, sv.source)
        })
    }

    /// Attempts one rank-preserving replacement. On rejection the appended
    /// component is kept (rank + 1) while budget remains, otherwise the state
    /// is left unchanged.
    fn replacement_step(&mut self, observer: &mut Observer<'_>) -> Result<bool> {
        if self.state.columns() == 0 {
            return Ok(false);
        }
        self.attempted += 1;
        let gradient = self.objective().gradient(&self.state.factors())?;
        let seed = self.rng.next_u64();
        let cand = alternating_linf_direction(&gradient, self.config.linf_max_rounds, seed);
        let extended = self.extend(&cand.u, &cand.v)?;
        if let Some(truncated) = self.truncate_smallest(&extended.state)? {
            if truncated.value < self.value {
                let refit = self.refit(truncated)?;
                self.accepted += 1;
                self.commit(refit, DirectionSource::Replacement, observer);
                return Ok(true);
            }
        }
        if self.state.columns() < self.config.rank_budget {
            self.commit(extended, DirectionSource::ReplacementFallback, observer);
        } else {
            // nothing committed; keep the counters visible on the last record
            if let Some(last) = self.trace.records.last_mut() {
                last.replacements_attempted = self.attempted;
            }
        }
        Ok(false)
    }

    fn commit(&mut self, trial: Trial, source: DirectionSource, observer: &mut Observer<'_>) {
        debug_assert!(trial.value <= self.value);
        self.state = trial.state;
        self.value = trial.value;
        let factors = self.state.factors();
        let mut record = IterationRecord {
            iteration: self.trace.records.len() + 1,
            rank: numerical_rank(&factors),
            columns: self.state.columns(),
            objective: self.value,
            train_rmse: None,
            test_rmse: None,
            source,
            replacements_attempted: self.attempted,
            replacements_accepted: self.accepted,
            elapsed: self.started.elapsed(),
        };
        observer(&mut record, &factors);
        self.trace.records.push(record);
    }

    /// Appends `(u, v)` and re-solves the corrective step.
    fn extend(&self, u: &Vector, v: &Vector) -> Result<Trial> {
        let k = self.state.columns();
        let basis_u = self.state.basis_u.clone().insert_column(k, 0.0);
        let mut basis_u = basis_u;
        basis_u.set_column(k, u);
        let mut v_aug = self.state.v.clone().insert_column(k, 0.0);
        v_aug.set_column(k, v);
        match &self.state.coeffs {
            Some(d) => {
                let init = d.clone().insert_row(k, 0.0);
                self.solve_diagonal(basis_u, v_aug, init, self.value)
            }
            None => {
                let mut init = DenseMatrix::identity(k + 1, k + 1);
                init[(k, k)] = 0.0;
                self.solve_full(basis_u, v_aug, init, self.value)
            }
        }
    }

    /// Full-`B` corrective step on the span of `(u, v)`, warm-started from
    /// `init` (expressed in the given bases, with objective `reference`).
    fn solve_full(
        &self,
        u: DenseMatrix,
        v: DenseMatrix,
        init: DenseMatrix,
        reference: f64,
    ) -> Result<Trial> {
        let objective = self.objective();
        let (bu, bv, init) = match (orthonormalize_columns(&u), orthonormalize_columns(&v)) {
            (Ok((qu, ru)), Ok((qv, rv))) => {
                let init = &ru * init * rv.transpose();
                (qu, qv, init)
            }
            // a zero singular value leaves a zero column in U P D; the raw
            // bases still work since the ridge term is computed with Grams
            (Err(GecoError::DegenerateColumn { .. }), _)
            | (_, Err(GecoError::DegenerateColumn { .. })) => (u, v, init),
            (Err(e), _) | (_, Err(e)) => return Err(e),
        };
        let b = objective.solve_b(&bu, &bv, &init, 0.0, &self.config.solver)?;
        let value = objective.value(&FactoredMatrix {
            u: &bu * &b,
            v: bv.clone(),
        })?;
        let (b, value) = if value <= reference {
            (b, value)
        } else {
            (init, reference)
        };
        let svd = thin_svd(&b)?;
        let mut pd = svd.p.clone();
        for (j, &s) in svd.d.iter().enumerate() {
            pd.column_mut(j).scale_mut(s);
        }
        let state = State {
            basis_u: bu * pd,
            v: bv * svd.q,
            coeffs: None,
        };
        Ok(Trial { state, value })
    }

    fn solve_diagonal(
        &self,
        u: DenseMatrix,
        v: DenseMatrix,
        init: Vector,
        reference: f64,
    ) -> Result<Trial> {
        let objective = self.objective();
        let d = objective.solve_diagonal_b(&u, &v, &init, 0.0, &self.config.solver)?;
        let state = State {
            basis_u: u,
            v,
            coeffs: Some(d),
        };
        let value = objective.value(&state.factors())?;
        if value <= reference {
            Ok(Trial { state, value })
        } else {
            Ok(Trial {
                state: State {
                    coeffs: Some(init),
                    ..state
                },
                value: reference,
            })
        }
    }

    /// Drops the weakest component of an extended state.
    fn truncate_smallest(&self, extended: &State) -> Result<Option<Trial>> {
        let k = extended.columns();
        if k < 2 {
            return Ok(None);
        }
        let state = match &extended.coeffs {
            None => {
                // columns of U P D have norms D, already sorted non-increasing
                State {
                    basis_u: extended.basis_u.columns(0, k - 1).into_owned(),
                    v: extended.v.columns(0, k - 1).into_owned(),
                    coeffs: None,
                }
            }
            Some(d) => {
                let weakest = (0..k)
                    .min_by(|&a, &b| {
                        let wa = d[a].abs() * extended.basis_u.column(a).norm();
                        let wb = d[b].abs() * extended.basis_u.column(b).norm();
                        wa.total_cmp(&wb)
                    })
                    .unwrap_or(k - 1);
                State {
                    basis_u: extended.basis_u.clone().remove_column(weakest),
                    v: extended.v.clone().remove_column(weakest),
                    coeffs: Some(d.clone().remove_row(weakest)),
                }
            }
        };
        let value = self.objective().value(&state.factors())?;
        Ok(Some(Trial { state, value }))
    }

    /// Corrective re-solve after a truncation, never worse than its input.
    fn refit(&self, trial: Trial) -> Result<Trial> {
        let k = trial.state.columns();
        let current = trial.value;
        let refit = match &trial.state.coeffs {
            Some(d) => self.solve_diagonal(
                trial.state.basis_u.clone(),
                trial.state.v.clone(),
                d.clone(),
                current,
            )?,
            None => self.solve_full(
                trial.state.basis_u.clone(),
                trial.state.v.clone(),
                DenseMatrix::identity(k, k),
                current,
            )?,
        };
        Ok(if refit.value <= current { refit } else { trial })
    }
}

pub fn numerical_rank(f: &FactoredMatrix) -> usize {
    let sv = f.singular_values();
    let top = sv.first().copied().unwrap_or(0.0);
    if top == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > RANK_TOL * top).count()
}

/// Runs the greedy algorithm to completion.
pub fn geco_run(
    objective: &dyn SmoothObjective,
    config: GecoConfig,
    observer: &mut Observer<'_>,
) -> Result<(FactoredMatrix, RunTrace)> {
    let mut run = GecoRun::new(objective, config)?;
    run.run_to_end(observer)?;
    Ok(run.into_parts())
}

/// Direction chosen by [`GecoRun`] for a given gradient without running the
/// corrective step: the power-iteration pair, and when the heuristic is
/// enabled also the sign-vector candidate started from its signs.
pub fn select_direction<G: LinearOperator + ?Sized>(
    gradient: &G,
    config: &GecoConfig,
    seed: u64,
) -> Result<(SingularPair, Option<LinfDirection>)> {
    let pair = approx_sv(gradient, config.power_iterations, seed)?;
    let linf = config
        .use_linf_heuristic
        .then(|| alternating_linf_from(gradient, &pair.u, config.linf_max_rounds));
    Ok((pair, linf))
}

pub fn noop_observer() -> impl FnMut(&mut IterationRecord, &FactoredMatrix) {
    |_, _| {}
}

#[cfg(test)]
mod tests {
    use std::cell::RefCell;

    use super::*;
    use crate::data::{synth_low_rank, synth_outliers};
    use crate::linalg::random_unit_vector;
    use crate::objective::{CompletionObjective, GradientOperator, HuberObjective, ObservationSet};

    fn completion(m: usize, n: usize, sv: &[f64], fraction: f64, seed: u64) -> CompletionObjective {
        CompletionObjective::new(
            synth_low_rank(m, n, sv, 0.0, fraction, seed)
                .unwrap()
                .observations,
        )
    }

    fn run(obj: &dyn SmoothObjective, config: GecoConfig) -> (FactoredMatrix, RunTrace) {
        geco_run(obj, config, &mut noop_observer()).unwrap()
    }

    #[test]
    fn rank_one_recovered_in_one_step() {
        let obj = completion(15, 12, &[3.0], 1.0, 1);
        let (a, trace) = run(&obj, GecoConfig::plain(1));
        assert_eq!(trace.records.len(), 1);
        assert_eq!(a.k(), 1);
        assert!(trace.final_objective().unwrap() <= 1e-10);
    }

    #[test]
    fn zero_rank_budget_rejected() {
        let obj = completion(5, 5, &[1.0], 1.0, 1);
        assert!(matches!(
            GecoRun::new(&obj, GecoConfig::plain(0)),
            Err(GecoError::InvalidConfig(_))
        ));
    }

    #[test]
    fn zero_target_is_stationary() {
        let obj =
            CompletionObjective::new(ObservationSet::full(&DenseMatrix::zeros(4, 3)).unwrap());
        let (a, trace) = run(&obj, GecoConfig::plain(3));
        assert!(trace.stationary);
        assert!(trace.records.is_empty());
        assert_eq!(a.k(), 0);
    }

    #[test]
    fn heuristic_off_uses_power_iteration_pair() {
        let g = DenseMatrix::from_fn(8, 6, |i, j| ((i * 7 + j * 3) % 5) as f64 - 2.0);
        let config = GecoConfig::plain(1);
        let (pair, linf) = select_direction(&g, &config, 11).unwrap();
        assert!(linf.is_none());
        assert_eq!(pair, approx_sv(&g, config.power_iterations, 11).unwrap());
    }

    #[test]
    fn constant_gradient_linf_matches_singular_pair() {
        let g = DenseMatrix::from_element(4, 9, 2.0);
        let config = GecoConfig {
            use_linf_heuristic: true,
            ..GecoConfig::plain(1)
        };
        let (pair, linf) = select_direction(&g, &config, 3).unwrap();
        let linf = linf.unwrap();
        assert!((linf.value - pair.value).abs() < 1e-12);
        assert!((linf.u.dot(&pair.u).abs() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn linf_examples() {
        let g = DenseMatrix::from_row_slice(2, 2, &[1.0, -1.0, -1.0, 1.0]);
        let d = alternating_linf_from(&g, &Vector::from_vec(vec![1.0, -1.0]), 10);
        assert!((d.value - 2.0).abs() < 1e-12, "{}", d.value);

        // from (1, 1): G^T u = 0, so v keeps +1; then G v = 0 keeps u
        let tie = alternating_linf_from(&g, &Vector::from_vec(vec![1.0, 1.0]), 10);
        assert_eq!(tie.value, 0.0);
        assert_eq!(tie.v, Vector::from_element(2, 1.0 / 2f64.sqrt()));

        let mut single = DenseMatrix::zeros(3, 2);
        single[(1, 0)] = 4.0;
        let d = alternating_linf_from(&single, &Vector::from_element(3, 1.0), 10);
        assert!((d.value - 4.0 / 6f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn linf_is_a_fixed_point_and_brute_force_optimal_on_small_cases() {
        let g = DenseMatrix::from_fn(4, 3, |i, j| ((i * 5 + j * 7) % 6) as f64 - 2.5);
        let d = alternating_linf_direction(&g, 50, 9);
        let again = alternating_linf_from(&g, &d.u, 50);
        assert_eq!(again.u, d.u);
        assert_eq!(again.v, d.v);
        // one round to restore v from its all-ones start, one to confirm
        assert!(again.rounds <= 2);

        let mut best: f64 = 0.0;
        for a in 0..16u32 {
            for b in 0..8u32 {
                let u = Vector::from_fn(4, |i, _| if a >> i & 1 == 1 { 1.0 } else { -1.0 });
                let v = Vector::from_fn(3, |j, _| if b >> j & 1 == 1 { 1.0 } else { -1.0 });
                best = best.max(u.dot(&(&g * v)));
            }
        }
        let scale = (4f64 * 3.0).sqrt();
        assert!(d.value * scale <= best + 1e-12);
        assert!(d.value > 0.0);
    }

    #[test]
    fn certified_tau_examples() {
        let diag = DenseMatrix::from_row_slice(2, 2, &[3.0, 0.0, 0.0, 1.0]);
        let exact = approx_sv(&diag, 200, 0).unwrap();
        assert!(certified_tau(&diag, &exact).abs() < 1e-12);
        let e2 = Vector::from_vec(vec![0.0, 1.0]);
        let second = SingularPair {
            u: e2.clone(),
            v: e2,
            value: 1.0,
            stationary: false,
        };
        assert!((certified_tau(&diag, &second) - 2.0 / 3.0).abs() < 1e-12);

        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let g = DenseMatrix::from_fn(30, 30, |_, _| {
            random_unit_vector(1, &mut rng)[0] * rng.random::<f64>()
        });
        let pair = approx_sv(&g, 200, 1).unwrap();
        assert!(certified_tau(&g, &pair) <= 0.1);
    }

    #[test]
    fn rank_k_recovered_in_k_steps() {
        let obj = completion(20, 18, &[6.0, 3.0, 1.5], 1.0, 4);
        let (_, trace) = run(&obj, GecoConfig::plain(3));
        assert_eq!(trace.records.len(), 3);
        assert!(trace.final_objective().unwrap() <= 1e-8);
        assert_eq!(trace.records.last().unwrap().rank, 3);
    }

    fn variants() -> Vec<GecoConfig> {
        let mut out = Vec::new();
        for heuristic in [false, true] {
            for diagonal in [false, true] {
                for q in [0, 20] {
                    for frob in [0.0, 0.1] {
                        out.push(GecoConfig {
                            rank_budget: 5,
                            replacement_attempts: q,
                            use_linf_heuristic: heuristic,
                            diagonal_b: diagonal,
                            frobenius_coeff: frob,
                            seed: 17,
                            ..GecoConfig::default()
                        });
                    }
                }
            }
        }
        out
    }

    #[test]
    fn variants_monotone_and_deterministic() {
        let obj = completion(16, 14, &[5.0, 2.0, 1.0, 0.5], 0.6, 8);
        for config in variants() {
            let (a, first) = run(&obj, config.clone());
            let (b, second) = run(&obj, config.clone());
            assert_eq!(first.objectives(), second.objectives(), "{config:?}");
            assert_eq!(a, b);
            let mut prev = GecoRun::new(&obj, config.clone())
                .unwrap()
                .objective_value();
            for r in &first.records {
                assert!(r.objective <= prev, "{config:?}: {} > {prev}", r.objective);
                assert!(r.rank <= r.iteration);
                assert!(r.columns <= config.rank_budget);
                prev = r.objective;
            }
            if config.replacement_attempts == 0 {
                assert_eq!(first.replacements_attempted(), 0);
            }
        }
    }

    #[test]
    fn huber_variants_monotone() {
        let inst = synth_outliers(12, 10, &[4.0, 1.0], 0.05, 20.0, 2).unwrap();
        let obj = HuberObjective::new(inst.target);
        for config in variants().into_iter().step_by(3) {
            let (_, trace) = run(
                &obj,
                GecoConfig {
                    rank_budget: 3,
                    ..config
                },
            );
            let objectives = trace.objectives();
            assert!(objectives.windows(2).all(|w| w[1] <= w[0]));
        }
    }

    #[test]
    fn replacement_accepted_on_undersampled_instance() {
        let mut accepted = 0;
        for seed in 0..5 {
            let obj = completion(20, 20, &[5.0, 4.0, 3.0], 0.4, seed);
            let config = GecoConfig {
                rank_budget: 2,
                replacement_attempts: 20,
                seed,
                ..GecoConfig::default()
            };
            let (_, trace) = run(&obj, config);
            assert!(trace.replacements_attempted() >= trace.replacements_accepted());
            accepted += trace.replacements_accepted();
            for r in &trace.records {
                if r.source == DirectionSource::Replacement {
                    assert!(r.columns <= 2);
                }
            }
        }
        assert!(accepted > 0);
    }

    #[test]
    fn corrective_step_is_stationary_on_span() {
        let obj = completion(14, 12, &[4.0, 2.0, 1.0], 0.5, 3);
        let mut run = GecoRun::new(&obj, GecoConfig::plain(3)).unwrap();
        let tol = run.config().solver.tolerance;
        while !run.is_finished() {
            run.advance(&mut noop_observer()).unwrap();
            let f = run.factors();
            let g = obj.gradient(&f).unwrap();
            let (qu, _) = orthonormalize_columns(&f.u).unwrap();
            let (qv, _) = orthonormalize_columns(&f.v).unwrap();
            let projected = g.project(&qu, &qv).norm();
            assert!(projected <= 10.0 * tol, "{projected}");
        }
    }

    /// Records the bases handed to the corrective solver.
    struct Recording<'a> {
        inner: &'a CompletionObjective,
        seen: RefCell<Vec<(DenseMatrix, DenseMatrix)>>,
    }

    impl SmoothObjective for Recording<'_> {
        fn shape(&self) -> (usize, usize) {
            self.inner.shape()
        }
        fn value(&self, a: &FactoredMatrix) -> Result<f64> {
            self.inner.value(a)
        }
        fn gradient(&self, a: &FactoredMatrix) -> Result<GradientOperator> {
            self.inner.gradient(a)
        }
        fn smoothness_bound(&self) -> f64 {
            self.inner.smoothness_bound()
        }
        fn solve_b(
            &self,
            u: &DenseMatrix,
            v: &DenseMatrix,
            init: &DenseMatrix,
            ridge: f64,
            opts: &SolverOptions,
        ) -> Result<DenseMatrix> {
            self.seen.borrow_mut().push((u.clone(), v.clone()));
            self.inner.solve_b(u, v, init, ridge, opts)
        }
    }

    #[test]
    fn ridge_path_solves_on_orthonormal_bases() {
        let inner = completion(12, 10, &[3.0, 1.0], 0.7, 6);
        let obj = Recording {
            inner: &inner,
            seen: RefCell::new(Vec::new()),
        };
        let config = GecoConfig {
            frobenius_coeff: 0.1,
            ..GecoConfig::plain(3)
        };
        run(&obj, config);
        let seen = obj.seen.borrow();
        assert!(!seen.is_empty());
        for (u, v) in seen.iter() {
            for q in [u, v] {
                let gram = q.tr_mul(q);
                let err = (gram - DenseMatrix::identity(q.ncols(), q.ncols())).norm();
                assert!(err < 1e-10, "{err}");
            }
        }
    }

    #[test]
    fn stop_epsilon_ends_run_early() {
        let obj = completion(10, 10, &[3.0], 1.0, 2);
        let config = GecoConfig {
            stop_epsilon: 1e-6,
            ..GecoConfig::plain(5)
        };
        let (_, trace) = run(&obj, config);
        assert!(trace.records.len() <= 2);
    }

    #[test]
    fn observer_sees_every_record() {
        let obj = completion(10, 9, &[3.0, 1.0], 1.0, 2);
        let mut seen = Vec::new();
        let (_, trace) = geco_run(
            &obj,
            GecoConfig::plain(2),
            &mut |r: &mut IterationRecord, f: &FactoredMatrix| {
                r.train_rmse = Some(f.k() as f64);
                seen.push(r.iteration);
            },
        )
        .unwrap();
        assert_eq!(seen, vec![1, 2]);
        assert_eq!(trace.records[1].train_rmse, Some(2.0));
    }

    #[test]
    fn source_labels() {
        assert_eq!(DirectionSource::LinfHeuristic.to_string(), "linf-heuristic");
        assert!(!DirectionSource::Replacement.increases_rank());
    }
}
