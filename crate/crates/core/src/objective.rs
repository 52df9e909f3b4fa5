//! Smooth convex objectives evaluated through the factored form `A = U V^T`.
//!
//! Two losses are provided: mean squared error over an observed subset of
//! entries ([`CompletionObjective`]) and the mean Huber loss against a fully
//! observed target ([`HuberObjective`]). [`FrobeniusRegularized`] adds
//! `coeff * |A|_F^2` to either one.
//!
//! Gradients carry the same `1/|E|` (or `1/(m n)`) prefactor as the value, so
//! [`SmoothObjective::smoothness_bound`] is exactly `2/|E|` (resp. `1/(m n)`).

use crate::error::{GecoError, Result};
use crate::linalg::{
    check_finite, DenseMatrix, LinearOperator, LowRankOperator, SparseMatrix, Vector,
};
use crate::solver::{self, SolverOptions};

/// `A = U V^T` with `U: m x k` and `V: n x k`.
#[derive(Clone, Debug, PartialEq)]
pub struct FactoredMatrix {
    pub u: DenseMatrix,
    pub v: DenseMatrix,
}

impl FactoredMatrix {
    pub fn zeros(m: usize, n: usize) -> Self {
        Self {
            u: DenseMatrix::zeros(m, 0),
            v: DenseMatrix::zeros(n, 0),
        }
    }

    pub fn new(u: DenseMatrix, v: DenseMatrix) -> Result<Self> {
        if u.ncols() != v.ncols() {
            return Err(GecoError::DimensionMismatch(format!(
                "U has {} columns but V has {}",
                u.ncols(),
                v.ncols()
            )));
        }
        check_finite(&u, "U factor")?;
        check_finite(&v, "V factor")?;
        Ok(Self { u, v })
    }

    pub fn nrows(&self) -> usize {
        self.u.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.v.nrows()
    }

    /// Number of factor columns (an upper bound on the rank).
    pub fn k(&self) -> usize {
        self.u.ncols()
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.u.row(i).dot(&self.v.row(j))
    }

    pub fn to_dense(&self) -> DenseMatrix {
        &self.u * self.v.transpose()
    }

    /// `|U V^T|_F^2 = <U^T U, V^T V>` without forming the product.
    pub fn frobenius_norm_squared(&self) -> f64 {
        let gu = self.u.tr_mul(&self.u);
        let gv = self.v.tr_mul(&self.v);
        gu.component_mul(&gv).sum()
    }

    /// Entries of `U V^T` at the given positions, computed with row dot
    /// products on transposed (contiguous) copies of the factors.
    pub fn entries_at(&self, positions: impl Iterator<Item = (usize, usize)>) -> Vec<f64> {
        let k = self.k();
        if k == 0 {
            return positions.map(|_| 0.0).collect();
        }
        let ut = self.u.transpose();
        let vt = self.v.transpose();
        let us = ut.as_slice();
        let vs = vt.as_slice();
        positions
            .map(|(i, j)| {
                let a = &us[i * k..(i + 1) * k];
                let b = &vs[j * k..(j + 1) * k];
                a.iter().zip(b).map(|(x, y)| x * y).sum()
            })
            .collect()
    }

    /// Singular values of `U V^T`, from the small `k x k` problem.
    pub fn singular_values(&self) -> Vec<f64> {
        if self.k() == 0 {
            return Vec::new();
        }
        let ru = self.u.clone().qr().r();
        let rv = self.v.clone().qr().r();
        let core = ru * rv.transpose();
        let mut vals: Vec<f64> = nalgebra::SVD::new(core, false, false)
            .singular_values
            .iter()
            .cloned()
            .collect();
        vals.sort_by(|a, b| b.total_cmp(a));
        vals
    }

    /// Trace norm of `U V^T`.
    pub fn trace_norm(&self) -> f64 {
        self.singular_values().iter().sum()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Observation {
    pub row: usize,
    pub col: usize,
    pub value: f64,
}

/// Observed entries `E` of an `m x n` target, sorted by `(row, col)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ObservationSet {
    m: usize,
    n: usize,
    entries: Vec<Observation>,
}

impl ObservationSet {
    pub fn new(
        m: usize,
        n: usize,
        triples: impl IntoIterator<Item = (usize, usize, f64)>,
    ) -> Result<Self> {
        let mut entries: Vec<Observation> = triples
            .into_iter()
            .map(|(row, col, value)| Observation { row, col, value })
            .collect();
        if entries.is_empty() {
            return Err(GecoError::InvalidObservations(
                "observation set is empty".into(),
            ));
        }
        for e in &entries {
            if e.row >= m || e.col >= n {
                return Err(GecoError::InvalidObservations(format!(
                    "entry ({}, {}) outside a {m}x{n} matrix",
                    e.row, e.col
                )));
            }
            if !e.value.is_finite() {
                return Err(GecoError::InvalidObservations(format!(
                    "entry ({}, {}) is not finite",
                    e.row, e.col
                )));
            }
        }
        entries.sort_by_key(|e| (e.row, e.col));
        if let Some(w) = entries
            .windows(2)
            .find(|w| w[0].row == w[1].row && w[0].col == w[1].col)
        {
            return Err(GecoError::InvalidObservations(format!(
                "duplicate entry ({}, {})",
                w[0].row, w[0].col
            )));
        }
        Ok(Self { m, n, entries })
    }

    /// Every entry of a dense matrix.
    pub fn full(y: &DenseMatrix) -> Result<Self> {
        let (m, n) = y.shape();
        Self::new(
            m,
            n,
            (0..m).flat_map(|i| (0..n).map(move |j| (i, j, y[(i, j)]))),
        )
    }

    pub fn nrows(&self) -> usize {
        self.m
    }

    pub fn ncols(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[Observation] {
        &self.entries
    }

    pub fn positions(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.entries.iter().map(|e| (e.row, e.col))
    }

    /// Consecutive runs of entries sharing a row.
    pub fn rows(&self) -> impl Iterator<Item = (usize, &[Observation])> {
        self.entries
            .chunk_by(|a, b| a.row == b.row)
            .map(|chunk| (chunk[0].row, chunk))
    }

    /// Returns a copy with `offset` subtracted from every value.
    pub fn shifted(&self, offset: f64) -> Self {
        let mut out = self.clone();
        for e in &mut out.entries {
            e.value -= offset;
        }
        out
    }

    pub fn mean_value(&self) -> f64 {
        self.entries.iter().map(|e| e.value).sum::<f64>() / self.len() as f64
    }

    fn check_shape(&self, f: &FactoredMatrix) -> Result<()> {
        if f.nrows() != self.m || f.ncols() != self.n {
            return Err(GecoError::DimensionMismatch(format!(
                "factors describe a {}x{} matrix, observations a {}x{} one",
                f.nrows(),
                f.ncols(),
                self.m,
                self.n
            )));
        }
        Ok(())
    }
}

/// Root mean squared error of `offset + U V^T` on `obs`, with predictions
/// optionally clipped to `[lo, hi]` first.
pub fn rmse(
    f: &FactoredMatrix,
    obs: &ObservationSet,
    offset: f64,
    clip: Option<(f64, f64)>,
) -> Result<f64> {
    obs.check_shape(f)?;
    let preds = f.entries_at(obs.positions());
    let sum: f64 = preds
        .iter()
        .zip(obs.entries())
        .map(|(&p, e)| {
            let mut p = p + offset;
            if let Some((lo, hi)) = clip {
                p = p.clamp(lo, hi);
            }
            (p - e.value).powi(2)
        })
        .sum();
    Ok((sum / obs.len() as f64).sqrt())
}

/// Gradient matrix of an objective at some `A`, exposed as an operator.
#[derive(Clone, Debug)]
pub enum GradientOperator {
    Sparse(SparseMatrix),
    Dense(DenseMatrix),
    /// `base + scale * U V^T`.
    Shifted {
        base: Box<GradientOperator>,
        low_rank: LowRankOperator,
    },
}

impl LinearOperator for GradientOperator {
    fn nrows(&self) -> usize {
        match self {
            Self::Sparse(s) => s.nrows(),
            Self::Dense(d) => d.nrows(),
            Self::Shifted { base, .. } => base.nrows(),
        }
    }

    fn ncols(&self) -> usize {
        match self {
            Self::Sparse(s) => s.ncols(),
            Self::Dense(d) => LinearOperator::ncols(d),
            Self::Shifted { base, .. } => base.ncols(),
        }
    }

    fn apply(&self, x: &Vector) -> Vector {
        match self {
            Self::Sparse(s) => s.apply(x),
            Self::Dense(d) => d * x,
            Self::Shifted { base, low_rank } => base.apply(x) + low_rank.apply(x),
        }
    }

    fn apply_transpose(&self, y: &Vector) -> Vector {
        match self {
            Self::Sparse(s) => s.apply_transpose(y),
            Self::Dense(d) => d.tr_mul(y),
            Self::Shifted { base, low_rank } => {
                base.apply_transpose(y) + low_rank.apply_transpose(y)
            }
        }
    }
}

impl GradientOperator {
    /// `U^T G V` for factor bases `U: m x s`, `V: n x s`.
    pub fn project(&self, u: &DenseMatrix, v: &DenseMatrix) -> DenseMatrix {
        let s = v.ncols();
        let mut gv = DenseMatrix::zeros(self.nrows(), s);
        for c in 0..s {
            gv.set_column(c, &self.apply(&v.column(c).clone_owned()));
        }
        u.tr_mul(&gv)
    }
}

/// A convex, `beta`-smooth function of `A`, evaluated through factors.
pub trait SmoothObjective {
    /// `(m, n)` of the matrix variable.
    fn shape(&self) -> (usize, usize);

    fn value(&self, f: &FactoredMatrix) -> Result<f64>;

    fn gradient(&self, f: &FactoredMatrix) -> Result<GradientOperator>;

    /// Smoothness constant along any unit rank-one direction `u v^T`.
    fn smoothness_bound(&self) -> f64;

    /// `argmin_B R(U B V^T) + ridge * |U B V^T|_F^2`, warm-started at `init`.
    fn solve_b(
        &self,
        u: &DenseMatrix,
        v: &DenseMatrix,
        init: &DenseMatrix,
        ridge: f64,
        opts: &SolverOptions,
    ) -> Result<DenseMatrix> {
        solver::solve_b_first_order(self, u, v, init, ridge, opts)
    }

    /// As [`Self::solve_b`] with `B` restricted to be diagonal.
    fn solve_diagonal_b(
        &self,
        u: &DenseMatrix,
        v: &DenseMatrix,
        init: &Vector,
        ridge: f64,
        opts: &SolverOptions,
    ) -> Result<Vector> {
        solver::solve_diagonal_b_first_order(self, u, v, init, ridge, opts)
    }
}

/// `(1/|E|) sum_E (<u_i, v_j> - y)^2`.
pub fn completion_value(f: &FactoredMatrix, obs: &ObservationSet) -> Result<f64> {
    obs.check_shape(f)?;
    let preds = f.entries_at(obs.positions());
    let sum: f64 = preds
        .iter()
        .zip(obs.entries())
        .map(|(p, e)| (p - e.value).powi(2))
        .sum();
    Ok(sum / obs.len() as f64)
}

/// Sparse gradient with entries `(2/|E|)(<u_i, v_j> - y)` on `E`.
pub fn completion_gradient(f: &FactoredMatrix, obs: &ObservationSet) -> Result<SparseMatrix> {
    obs.check_shape(f)?;
    let scale = 2.0 / obs.len() as f64;
    let preds = f.entries_at(obs.positions());
    Ok(SparseMatrix::from_row_sorted(
        obs.nrows(),
        obs.ncols(),
        preds
            .into_iter()
            .zip(obs.entries())
            .map(|(p, e)| (e.row, e.col, scale * (p - e.value))),
    ))
}

pub fn completion_smoothness(obs: &ObservationSet) -> Result<f64> {
    if obs.is_empty() {
        return Err(GecoError::InvalidObservations(
            "observation set is empty".into(),
        ));
    }
    Ok(2.0 / obs.len() as f64)
}

/// Mean squared error over observed entries.
#[derive(Clone, Debug)]
pub struct CompletionObjective {
    pub observations: ObservationSet,
}

impl CompletionObjective {
    pub fn new(observations: ObservationSet) -> Self {
        Self { observations }
    }
}

impl SmoothObjective for CompletionObjective {
    fn shape(&self) -> (usize, usize) {
        (self.observations.nrows(), self.observations.ncols())
    }

    fn value(&self, f: &FactoredMatrix) -> Result<f64> {
        completion_value(f, &self.observations)
    }

    fn gradient(&self, f: &FactoredMatrix) -> Result<GradientOperator> {
        completion_gradient(f, &self.observations).map(GradientOperator::Sparse)
    }

    fn smoothness_bound(&self) -> f64 {
        2.0 / self.observations.len() as f64
    }

    fn solve_b(
        &self,
        u: &DenseMatrix,
        v: &DenseMatrix,
        init: &DenseMatrix,
        ridge: f64,
        opts: &SolverOptions,
    ) -> Result<DenseMatrix> {
        let grams = (ridge > 0.0).then(|| (u.tr_mul(u), v.tr_mul(v)));
        solver::solve_completion_b_penalized(
            u,
            v,
            &self.observations,
            ridge,
            grams.as_ref().map(|(a, b)| (a, b)),
            Some(init),
            opts,
        )
    }

    fn solve_diagonal_b(
        &self,
        u: &DenseMatrix,
        v: &DenseMatrix,
        _init: &Vector,
        ridge: f64,
        opts: &SolverOptions,
    ) -> Result<Vector> {
        solver::solve_completion_diagonal_b(u, v, &self.observations, ridge, opts)
    }
}

/// Huber loss with knot 1: `x^2/2` inside `[-1, 1]`, `|x| - 1/2` outside.
pub fn huber(x: f64) -> f64 {
    huber_with_knot(x, 1.0)
}

pub fn huber_deriv(x: f64) -> f64 {
    huber_deriv_with_knot(x, 1.0)
}

/// `x^2/2` for `|x| <= delta`, `delta (|x| - delta/2)` otherwise. Its second
/// derivative never exceeds 1 whatever the knot.
pub fn huber_with_knot(x: f64, delta: f64) -> f64 {
    let a = x.abs();
    if a <= delta {
        0.5 * x * x
    } else {
        delta * (a - 0.5 * delta)
    }
}

pub fn huber_deriv_with_knot(x: f64, delta: f64) -> f64 {
    x.clamp(-delta, delta)
}

/// Fully observed target matrix for robust approximation.
#[derive(Clone, Debug, PartialEq)]
pub struct HuberTarget {
    y: DenseMatrix,
}

impl HuberTarget {
    pub fn new(y: DenseMatrix) -> Result<Self> {
        if y.nrows() == 0 || y.ncols() == 0 {
            return Err(GecoError::DimensionMismatch("empty Huber target".into()));
        }
        check_finite(&y, "Huber target")?;
        Ok(Self { y })
    }

    pub fn matrix(&self) -> &DenseMatrix {
        &self.y
    }

    fn check_shape(&self, f: &FactoredMatrix) -> Result<()> {
        if (f.nrows(), f.ncols()) != self.y.shape() {
            return Err(GecoError::DimensionMismatch(format!(
                "factors describe a {}x{} matrix, target is {}x{}",
                f.nrows(),
                f.ncols(),
                self.y.nrows(),
                self.y.ncols()
            )));
        }
        Ok(())
    }

    fn residual(&self, f: &FactoredMatrix) -> DenseMatrix {
        if f.k() == 0 {
            -&self.y
        } else {
            f.to_dense() - &self.y
        }
    }
}

/// `(1/(m n)) sum_ij L(A_ij - Y_ij)`.
pub fn huber_value(f: &FactoredMatrix, target: &HuberTarget) -> Result<f64> {
    HuberObjective::new(target.clone()).value(f)
}

/// Dense gradient with entries `L'(A_ij - Y_ij) / (m n)`.
pub fn huber_gradient(f: &FactoredMatrix, target: &HuberTarget) -> Result<DenseMatrix> {
    HuberObjective::new(target.clone()).dense_gradient(f)
}

pub fn huber_smoothness(target: &HuberTarget) -> f64 {
    let (m, n) = target.y.shape();
    1.0 / (m * n) as f64
}

/// Mean Huber loss against a dense target.
#[derive(Clone, Debug)]
pub struct HuberObjective {
    pub target: HuberTarget,
    pub knot: f64,
}

impl HuberObjective {
    pub fn new(target: HuberTarget) -> Self {
        Self { target, knot: 1.0 }
    }

    pub fn with_knot(target: HuberTarget, knot: f64) -> Result<Self> {
        if !(knot > 0.0 && knot.is_finite()) {
            return Err(GecoError::InvalidConfig(format!(
                "Huber knot must be positive, got {knot}"
            )));
        }
        Ok(Self { target, knot })
    }

    fn dense_gradient(&self, f: &FactoredMatrix) -> Result<DenseMatrix> {
        self.target.check_shape(f)?;
        let scale = huber_smoothness(&self.target);
        let delta = self.knot;
        Ok(self
            .target
            .residual(f)
            .map(|r| scale * huber_deriv_with_knot(r, delta)))
    }
}

impl SmoothObjective for HuberObjective {
    fn shape(&self) -> (usize, usize) {
        self.target.y.shape()
    }

    fn value(&self, f: &FactoredMatrix) -> Result<f64> {
        self.target.check_shape(f)?;
        let delta = self.knot;
        let total: f64 = self
            .target
            .residual(f)
            .iter()
            .map(|&r| huber_with_knot(r, delta))
            .sum();
        Ok(total * huber_smoothness(&self.target))
    }

    fn gradient(&self, f: &FactoredMatrix) -> Result<GradientOperator> {
        self.dense_gradient(f).map(GradientOperator::Dense)
    }

    fn smoothness_bound(&self) -> f64 {
        huber_smoothness(&self.target)
    }
}

/// `base(A) + coeff * |A|_F^2`.
///
/// The restricted problem passes `coeff` through as a ridge term on
/// `|U B V^T|_F^2`, which equals `|B|_F^2` once `U` and `V` have orthonormal
/// columns.
pub struct FrobeniusRegularized<'a> {
    base: &'a dyn SmoothObjective,
    coeff: f64,
}

pub fn frobenius_regularized(
    base: &dyn SmoothObjective,
    coeff: f64,
) -> Result<FrobeniusRegularized<'_>> {
    if !(coeff >= 0.0 && coeff.is_finite()) {
        return Err(GecoError::InvalidConfig(format!(
            "Frobenius coefficient must be finite and non-negative, got {coeff}"
        )));
    }
    Ok(FrobeniusRegularized { base, coeff })
}

impl FrobeniusRegularized<'_> {
    pub fn coeff(&self) -> f64 {
        self.coeff
    }
}

impl SmoothObjective for FrobeniusRegularized<'_> {
    fn shape(&self) -> (usize, usize) {
        self.base.shape()
    }

    fn value(&self, f: &FactoredMatrix) -> Result<f64> {
        let base = self.base.value(f)?;
        if self.coeff == 0.0 {
            return Ok(base);
        }
        Ok(base + self.coeff * f.frobenius_norm_squared())
    }

    fn gradient(&self, f: &FactoredMatrix) -> Result<GradientOperator> {
        let base = self.base.gradient(f)?;
        if self.coeff == 0.0 || f.k() == 0 {
            return Ok(base);
        }
        Ok(GradientOperator::Shifted {
            base: Box::new(base),
            low_rank: LowRankOperator {
                left: f.u.clone(),
                right: f.v.clone(),
                scale: 2.0 * self.coeff,
            },
        })
    }

    fn smoothness_bound(&self) -> f64 {
        self.base.smoothness_bound() + 2.0 * self.coeff
    }

    fn solve_b(
        &self,
        u: &DenseMatrix,
        v: &DenseMatrix,
        init: &DenseMatrix,
        ridge: f64,
        opts: &SolverOptions,
    ) -> Result<DenseMatrix> {
        self.base.solve_b(u, v, init, ridge + self.coeff, opts)
    }

    fn solve_diagonal_b(
        &self,
        u: &DenseMatrix,
        v: &DenseMatrix,
        init: &Vector,
        ridge: f64,
        opts: &SolverOptions,
    ) -> Result<Vector> {
        self.base
            .solve_diagonal_b(u, v, init, ridge + self.coeff, opts)
    }
}

/// Evaluates `R(U B V^T)`.
pub fn restricted_value(
    objective: &(impl SmoothObjective + ?Sized),
    u: &DenseMatrix,
    b: &DenseMatrix,
    v: &DenseMatrix,
) -> Result<f64> {
    objective.value(&FactoredMatrix {
        u: u * b,
        v: v.clone(),
    })
}
