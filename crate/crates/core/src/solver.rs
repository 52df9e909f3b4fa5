//! Inner solvers for the fully corrective step `B = argmin R(U B V^T)`.
//!
//! For the squared completion loss the restricted problem is a least-squares
//! problem in `vec(B)` with `s^2` unknowns. Its normal matrix is assembled
//! row by row of `E` as `sum_i M_i (x) u_i u_i^T`, where
//! `M_i = sum_{j in E_i} v_j v_j^T`, which costs `O(|E| s^2 + m s^4)`; above
//! [`DIRECT_SOLVE_MAX_UNKNOWNS`] unknowns a matrix-free conjugate gradient
//! replaces it. Every other objective goes through L-BFGS on the restricted
//! value and projected gradient `U^T G V`.

use std::collections::VecDeque;

use nalgebra::SymmetricEigen;

use crate::error::{GecoError, Result};
use crate::linalg::{DenseMatrix, LinearOperator, Vector};
use crate::objective::{FactoredMatrix, ObservationSet, SmoothObjective};

/// Largest `s^2` solved through the dense normal equations.
pub const DIRECT_SOLVE_MAX_UNKNOWNS: usize = 400;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum SolverMethod {
    /// Normal equations up to [`DIRECT_SOLVE_MAX_UNKNOWNS`], iterative above.
    #[default]
    Auto,
    NormalEquations,
    Iterative,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolverOptions {
    pub max_iterations: usize,
    /// Stop once the gradient norm of the restricted objective is below this.
    pub tolerance: f64,
    pub method: SolverMethod,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            max_iterations: 10_000,
            tolerance: 1e-8,
            method: SolverMethod::Auto,
        }
    }
}

impl SolverOptions {
    pub fn validate(&self) -> Result<()> {
        if !(self.tolerance > 0.0) || self.max_iterations == 0 {
            return Err(GecoError::InvalidConfig(format!(
                "solver needs tolerance > 0 and max_iterations >= 1 (got {} and {})",
                self.tolerance, self.max_iterations
            )));
        }
        Ok(())
    }
}

/// `argmin_B (1/|E|) sum_E (u_i^T B v_j - y)^2 + reg |B|_F^2`.
///
/// For `reg = 0` and a rank-deficient system the direct path returns the
/// minimum-norm solution.
pub fn solve_completion_b(
    u: &DenseMatrix,
    v: &DenseMatrix,
    obs: &ObservationSet,
    reg: f64,
    opts: &SolverOptions,
) -> Result<DenseMatrix> {
    solve_completion_b_penalized(u, v, obs, reg, None, None, opts)
}

/// As [`solve_completion_b`], with the penalty `reg * |U B V^T|_F^2` when the
/// Gram matrices `(U^T U, V^T V)` are supplied (identity Grams otherwise).
pub fn solve_completion_b_penalized(
    u: &DenseMatrix,
    v: &DenseMatrix,
    obs: &ObservationSet,
    reg: f64,
    grams: Option<(&DenseMatrix, &DenseMatrix)>,
    init: Option<&DenseMatrix>,
    opts: &SolverOptions,
) -> Result<DenseMatrix> {
    opts.validate()?;
    check_factor_shapes(u, v, obs)?;
    if !(reg >= 0.0) {
        return Err(GecoError::InvalidConfig(format!(
            "negative ridge coefficient {reg}"
        )));
    }
    let s = u.ncols();
    let direct = match opts.method {
        SolverMethod::NormalEquations => true,
        SolverMethod::Iterative => false,
        SolverMethod::Auto => s * s <= DIRECT_SOLVE_MAX_UNKNOWNS,
    };
    if direct {
        let (normal, rhs) = completion_normal_equations(u, v, obs, reg, grams);
        let x = solve_psd_min_norm(&normal, &rhs, opts)?;
        Ok(DenseMatrix::from_column_slice(s, s, x.as_slice()))
    } else {
        let zero = DenseMatrix::zeros(s, s);
        completion_cg(u, v, obs, reg, grams, init.unwrap_or(&zero), opts)
    }
}

/// Normal matrix `N` and right-hand side `c` such that the restricted
/// objective is `x^T N x - 2 c^T x + const` over `x = vec(B)` (column-major).
pub fn completion_normal_equations(
    u: &DenseMatrix,
    v: &DenseMatrix,
    obs: &ObservationSet,
    reg: f64,
    grams: Option<(&DenseMatrix, &DenseMatrix)>,
) -> (DenseMatrix, Vector) {
    let s = u.ncols();
    let dim = s * s;
    let scale = 1.0 / obs.len() as f64;
    let mut normal = DenseMatrix::zeros(dim, dim);
    let mut rhs = Vector::zeros(dim);
    let vt = v.transpose();
    let mut m_i = DenseMatrix::zeros(s, s);
    let mut r_i = Vector::zeros(s);
    for (i, row_obs) in obs.rows() {
        m_i.fill(0.0);
        r_i.fill(0.0);
        for e in row_obs {
            let vj = vt.column(e.col);
            m_i.ger(1.0, &vj, &vj, 1.0);
            r_i.axpy(e.value, &vj, 1.0);
        }
        let ui = u.row(i).transpose();
        for b in 0..s {
            for a in 0..s {
                rhs[a + s * b] += scale * ui[a] * r_i[b];
            }
        }
        for d in 0..s {
            for c in 0..s {
                let col = c + s * d;
                let uc = ui[c];
                for b in 0..s {
                    let w = scale * m_i[(b, d)] * uc;
                    if w == 0.0 {
                        continue;
                    }
                    for a in 0..s {
                        normal[(a + s * b, col)] += w * ui[a];
                    }
                }
            }
        }
    }
    if reg > 0.0 {
        match grams {
            None => {
                for p in 0..dim {
                    normal[(p, p)] += reg;
                }
            }
            Some((gu, gv)) => {
                for d in 0..s {
                    for c in 0..s {
                        for b in 0..s {
                            for a in 0..s {
                                normal[(a + s * b, c + s * d)] += reg * gu[(a, c)] * gv[(b, d)];
                            }
                        }
                    }
                }
            }
        }
    }
    (normal, rhs)
}

/// Minimum-norm solution of `N x = c` for symmetric positive semidefinite `N`.
fn solve_psd_min_norm(normal: &DenseMatrix, rhs: &Vector, opts: &SolverOptions) -> Result<Vector> {
    if normal.iter().any(|x| !x.is_finite()) || rhs.iter().any(|x| !x.is_finite()) {
        return Err(GecoError::NonFinite("normal equations"));
    }
    let eig = SymmetricEigen::new(normal.clone());
    let lmax = eig.eigenvalues.iter().cloned().fold(0.0, f64::max);
    let cutoff = lmax * 1e-12 * normal.nrows() as f64;
    let pinv_apply = |r: &Vector| {
        let mut x = Vector::zeros(r.len());
        for (k, &lambda) in eig.eigenvalues.iter().enumerate() {
            if lambda > cutoff {
                let q = eig.eigenvectors.column(k);
                x.axpy(q.dot(r) / lambda, &q, 1.0);
            }
        }
        x
    };
    let mut x = pinv_apply(rhs);
    let mut grad_norm = 0.0;
    for _ in 0..3 {
        let residual = rhs - normal * &x;
        grad_norm = 2.0 * residual.norm();
        if grad_norm <= opts.tolerance {
            return Ok(x);
        }
        x += pinv_apply(&residual);
    }
    let residual = rhs - normal * &x;
    let final_norm = 2.0 * residual.norm();
    if final_norm <= opts.tolerance {
        Ok(x)
    } else {
        Err(GecoError::NotConverged {
            iterations: 3,
            gradient_norm: final_norm.min(grad_norm),
        })
    }
}

/// Matrix-free `N vec(B)`: `(1/|E|) U^T S V + P(B)` with `S_ij = u_i^T B v_j`
/// on `E`.
fn completion_normal_apply(
    u: &DenseMatrix,
    v: &DenseMatrix,
    obs: &ObservationSet,
    reg: f64,
    grams: Option<(&DenseMatrix, &DenseMatrix)>,
    b: &DenseMatrix,
) -> DenseMatrix {
    let f = FactoredMatrix {
        u: u * b,
        v: v.clone(),
    };
    let preds = f.entries_at(obs.positions());
    let scale = 1.0 / obs.len() as f64;
    let s = u.ncols();
    // (S V) row by row, then U^T (S V)
    let mut sv = DenseMatrix::zeros(u.nrows(), s);
    for (p, e) in preds.iter().zip(obs.entries()) {
        let w = scale * p;
        for c in 0..s {
            sv[(e.row, c)] += w * v[(e.col, c)];
        }
    }
    let mut out = u.tr_mul(&sv);
    if reg > 0.0 {
        match grams {
            None => out += b * reg,
            Some((gu, gv)) => out += (gu * b * gv) * reg,
        }
    }
    out
}

fn completion_cg(
    u: &DenseMatrix,
    v: &DenseMatrix,
    obs: &ObservationSet,
    reg: f64,
    grams: Option<(&DenseMatrix, &DenseMatrix)>,
    init: &DenseMatrix,
    opts: &SolverOptions,
) -> Result<DenseMatrix> {
    let s = u.ncols();
    let scale = 1.0 / obs.len() as f64;
    let mut yv = DenseMatrix::zeros(u.nrows(), s);
    for e in obs.entries() {
        for c in 0..s {
            yv[(e.row, c)] += scale * e.value * v[(e.col, c)];
        }
    }
    let rhs = u.tr_mul(&yv);
    let apply = |b: &DenseMatrix| completion_normal_apply(u, v, obs, reg, grams, b);

    let mut x = if init.shape() == (s, s) {
        init.clone()
    } else {
        DenseMatrix::zeros(s, s)
    };
    let mut r = &rhs - apply(&x);
    let mut p = r.clone();
    let mut rr = r.norm_squared();
    for it in 0..opts.max_iterations {
        if 2.0 * rr.sqrt() <= opts.tolerance {
            return Ok(x);
        }
        let np = apply(&p);
        let curvature = p.dot(&np);
        if curvature <= 0.0 {
            return Err(GecoError::NotConverged {
                iterations: it,
                gradient_norm: 2.0 * rr.sqrt(),
            });
        }
        let alpha = rr / curvature;
        x += &p * alpha;
        r -= &np * alpha;
        let rr_new = r.norm_squared();
        p = &r + &p * (rr_new / rr);
        rr = rr_new;
    }
    if 2.0 * rr.sqrt() <= opts.tolerance {
        return Ok(x);
    }
    Err(GecoError::NotConverged {
        iterations: opts.max_iterations,
        gradient_norm: 2.0 * rr.sqrt(),
    })
}

/// Diagonal `B` for the completion loss: least squares over `s` coefficients
/// with design entries `U_ik V_jk`.
pub fn solve_completion_diagonal_b(
    u: &DenseMatrix,
    v: &DenseMatrix,
    obs: &ObservationSet,
    ridge: f64,
    opts: &SolverOptions,
) -> Result<Vector> {
    opts.validate()?;
    check_factor_shapes(u, v, obs)?;
    let s = u.ncols();
    let scale = 1.0 / obs.len() as f64;
    let mut normal = DenseMatrix::zeros(s, s);
    let mut rhs = Vector::zeros(s);
    let vt = v.transpose();
    for e in obs.entries() {
        let a = u.row(e.row).transpose().component_mul(&vt.column(e.col));
        normal.ger(scale, &a, &a, 1.0);
        rhs.axpy(scale * e.value, &a, 1.0);
    }
    if ridge > 0.0 {
        let gu = u.tr_mul(u);
        let gv = v.tr_mul(v);
        normal += gu.component_mul(&gv) * ridge;
    }
    solve_psd_min_norm(&normal, &rhs, opts)
}

/// Outcome of [`minimize_lbfgs`].
#[derive(Clone, Debug)]
pub struct LbfgsReport {
    pub iterations: usize,
    pub gradient_norm: f64,
    pub value: f64,
}

const LBFGS_MEMORY: usize = 10;

/// Limited-memory BFGS with a backtracking line search. Every accepted step
/// is non-increasing in the objective.
pub fn minimize_lbfgs<F>(
    mut value_grad: F,
    x0: Vector,
    opts: &SolverOptions,
) -> Result<(Vector, LbfgsReport)>
where
    F: FnMut(&Vector) -> Result<(f64, Vector)>,
{
    opts.validate()?;
    let mut x = x0;
    let (mut f, mut g) = value_grad(&x)?;
    let mut history: VecDeque<(Vector, Vector, f64)> = VecDeque::with_capacity(LBFGS_MEMORY);
    let mut gnorm = g.norm();

    for it in 0..=opts.max_iterations {
        if gnorm <= opts.tolerance {
            return Ok((
                x,
                LbfgsReport {
                    iterations: it,
                    gradient_norm: gnorm,
                    value: f,
                },
            ));
        }
        if it == opts.max_iterations {
            break;
        }

        let mut direction = two_loop(&g, &history);
        let mut slope = g.dot(&direction);
        if !(slope < 0.0) {
            history.clear();
            direction = -&g;
            slope = -gnorm * gnorm;
        }
        let mut step = if history.is_empty() {
            1.0 / gnorm.max(1.0)
        } else {
            1.0
        };
        let mut accepted = None;
        for _ in 0..80 {
            let candidate = &x + &direction * step;
            let (fc, gc) = value_grad(&candidate)?;
            let armijo = fc <= f + 1e-4 * step * slope;
            if fc.is_finite() && (armijo || (fc <= f && gc.norm() < gnorm)) {
                accepted = Some((candidate, fc, gc));
                break;
            }
            step *= 0.5;
        }
        let Some((xn, fnew, gn)) = accepted else {
            if !history.is_empty() {
                history.clear();
                continue;
            }
            return Err(GecoError::NotConverged {
                iterations: it,
                gradient_norm: gnorm,
            });
        };
        let sk = &xn - &x;
        let yk = &gn - &g;
        let sy = sk.dot(&yk);
        if sy > 1e-14 * sk.norm() * yk.norm() && sy > 0.0 {
            if history.len() == LBFGS_MEMORY {
                history.pop_front();
            }
            history.push_back((sk, yk, 1.0 / sy));
        }
        x = xn;
        f = fnew;
        g = gn;
        gnorm = g.norm();
    }
    Err(GecoError::NotConverged {
        iterations: opts.max_iterations,
        gradient_norm: gnorm,
    })
}

fn two_loop(g: &Vector, history: &VecDeque<(Vector, Vector, f64)>) -> Vector {
    let mut q = g.clone();
    let mut alphas = Vec::with_capacity(history.len());
    for (s, y, rho) in history.iter().rev() {
        let a = rho * s.dot(&q);
        q.axpy(-a, y, 1.0);
        alphas.push(a);
    }
    if let Some((s, y, _)) = history.back() {
        q *= s.dot(y) / y.norm_squared();
    }
    for ((s, y, rho), a) in history.iter().zip(alphas.into_iter().rev()) {
        let b = rho * y.dot(&q);
        q.axpy(a - b, s, 1.0);
    }
    -q
}

/// First-order minimization of a convex restricted function of an `s x s`
/// matrix, warm-started at `init`.
pub fn solve_smooth_b<F>(
    value_grad: F,
    init: &DenseMatrix,
    opts: &SolverOptions,
) -> Result<DenseMatrix>
where
    F: Fn(&DenseMatrix) -> Result<(f64, DenseMatrix)>,
{
    let (r, c) = init.shape();
    let x0 = Vector::from_column_slice(init.as_slice());
    let (x, _) = minimize_lbfgs(
        |x| {
            let b = DenseMatrix::from_column_slice(r, c, x.as_slice());
            let (f, g) = value_grad(&b)?;
            Ok((f, Vector::from_column_slice(g.as_slice())))
        },
        x0,
        opts,
    )?;
    Ok(DenseMatrix::from_column_slice(r, c, x.as_slice()))
}

/// Generic B-step: L-BFGS on `R(U B V^T) + ridge |U B V^T|_F^2` with gradient
/// `U^T grad R V + 2 ridge (U^T U) B (V^T V)`.
pub fn solve_b_first_order<O: SmoothObjective + ?Sized>(
    objective: &O,
    u: &DenseMatrix,
    v: &DenseMatrix,
    init: &DenseMatrix,
    ridge: f64,
    opts: &SolverOptions,
) -> Result<DenseMatrix> {
    let s = u.ncols();
    if v.ncols() != s || init.shape() != (s, s) {
        return Err(GecoError::DimensionMismatch(format!(
            "B-step with U: {:?}, V: {:?}, init: {:?}",
            u.shape(),
            v.shape(),
            init.shape()
        )));
    }
    let grams = (ridge > 0.0).then(|| (u.tr_mul(u), v.tr_mul(v)));
    solve_smooth_b(
        |b| {
            let f = FactoredMatrix {
                u: u * b,
                v: v.clone(),
            };
            let mut value = objective.value(&f)?;
            let mut grad = objective.gradient(&f)?.project(u, v);
            if let Some((gu, gv)) = &grams {
                let gbg = gu * b * gv;
                value += ridge * b.dot(&gbg);
                grad += gbg * (2.0 * ridge);
            }
            Ok((value, grad))
        },
        init,
        opts,
    )
}

/// Generic diagonal B-step over `s` coefficients.
pub fn solve_diagonal_b_first_order<O: SmoothObjective + ?Sized>(
    objective: &O,
    u: &DenseMatrix,
    v: &DenseMatrix,
    init: &Vector,
    ridge: f64,
    opts: &SolverOptions,
) -> Result<Vector> {
    let s = u.ncols();
    if v.ncols() != s || init.len() != s {
        return Err(GecoError::DimensionMismatch(format!(
            "diagonal B-step with U: {:?}, V: {:?}, init: {}",
            u.shape(),
            v.shape(),
            init.len()
        )));
    }
    let grams = (ridge > 0.0).then(|| {
        let gu = u.tr_mul(u);
        let gv = v.tr_mul(v);
        gu.component_mul(&gv)
    });
    let (x, _) = minimize_lbfgs(
        |d| {
            let mut scaled = u.clone();
            for k in 0..s {
                scaled.column_mut(k).scale_mut(d[k]);
            }
            let f = FactoredMatrix {
                u: scaled,
                v: v.clone(),
            };
            let mut value = objective.value(&f)?;
            let g = objective.gradient(&f)?;
            let mut grad = Vector::from_fn(s, |k, _| {
                u.column(k).dot(&g.apply(&v.column(k).clone_owned()))
            });
            if let Some(h) = &grams {
                let hd = h * d;
                value += ridge * d.dot(&hd);
                grad += hd * (2.0 * ridge);
            }
            Ok((value, grad))
        },
        init.clone(),
        opts,
    )?;
    Ok(x)
}

/// Diagonal B-step through the objective's own solver, from a zero start.
pub fn solve_diagonal_b(
    u: &DenseMatrix,
    v: &DenseMatrix,
    objective: &dyn SmoothObjective,
    opts: &SolverOptions,
) -> Result<Vector> {
    objective.solve_diagonal_b(u, v, &Vector::zeros(u.ncols()), 0.0, opts)
}

fn check_factor_shapes(u: &DenseMatrix, v: &DenseMatrix, obs: &ObservationSet) -> Result<()> {
    if u.ncols() == 0
        || u.ncols() != v.ncols()
        || u.nrows() != obs.nrows()
        || v.nrows() != obs.ncols()
    {
        return Err(GecoError::DimensionMismatch(format!(
            "U {:?}, V {:?} against a {}x{} observation set",
            u.shape(),
            v.shape(),
            obs.nrows(),
            obs.ncols()
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::orthonormalize_columns;
    use crate::objective::{completion_value, CompletionObjective, HuberObjective, HuberTarget};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    fn gaussian(m: usize, n: usize, rng: &mut ChaCha8Rng) -> DenseMatrix {
        DenseMatrix::from_fn(m, n, |_, _| StandardNormal.sample(rng))
    }

    fn sampled_obs(m: usize, n: usize, count: usize, rng: &mut ChaCha8Rng) -> ObservationSet {
        let mut cells: Vec<(usize, usize)> =
            (0..m).flat_map(|i| (0..n).map(move |j| (i, j))).collect();
        for k in 0..count {
            let swap = rng.random_range(k..cells.len());
            cells.swap(k, swap);
        }
        ObservationSet::new(
            m,
            n,
            cells[..count]
                .iter()
                .map(|&(i, j)| (i, j, StandardNormal.sample(rng))),
        )
        .unwrap()
    }

    /// Explicit `|E| x s^2` design matrix solved with an SVD pseudo-inverse.
    fn design_oracle(u: &DenseMatrix, v: &DenseMatrix, obs: &ObservationSet) -> DenseMatrix {
        let s = u.ncols();
        let design = DenseMatrix::from_fn(obs.len(), s * s, |row, col| {
            let e = obs.entries()[row];
            let (a, b) = (col % s, col / s);
            u[(e.row, a)] * v[(e.col, b)]
        });
        let y = Vector::from_iterator(obs.len(), obs.entries().iter().map(|e| e.value));
        let pinv = design.pseudo_inverse(1e-12).unwrap();
        let x = pinv * y;
        DenseMatrix::from_column_slice(s, s, x.as_slice())
    }

    #[test]
    fn scalar_least_squares() {
        let obs = ObservationSet::new(1, 1, [(0, 0, 3.5)]).unwrap();
        let one = DenseMatrix::from_element(1, 1, 1.0);
        let b = solve_completion_b(&one, &one, &obs, 0.0, &SolverOptions::default()).unwrap();
        assert!((b[(0, 0)] - 3.5).abs() < 1e-12);
    }

    #[test]
    fn matches_design_matrix_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let obs = sampled_obs(5, 5, 15, &mut rng);
        let u = gaussian(5, 2, &mut rng);
        let v = gaussian(5, 2, &mut rng);
        let b = solve_completion_b(&u, &v, &obs, 0.0, &SolverOptions::default()).unwrap();
        let oracle = design_oracle(&u, &v, &obs);
        assert!((b - oracle).norm() < 1e-6);
    }

    #[test]
    fn rank_deficient_returns_min_norm() {
        // only row 0 observed: the second column of U is unidentifiable
        let obs = ObservationSet::new(2, 2, [(0, 0, 1.0), (0, 1, 2.0)]).unwrap();
        let u = DenseMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 1.0]);
        let v = DenseMatrix::identity(2, 2);
        let b = solve_completion_b(&u, &v, &obs, 0.0, &SolverOptions::default()).unwrap();
        let oracle = design_oracle(&u, &v, &obs);
        assert!((&b - &oracle).norm() < 1e-9);
        assert!(b[(1, 0)].abs() < 1e-12 && b[(1, 1)].abs() < 1e-12);
    }

    #[test]
    fn full_observation_in_span_reconstructs() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let (qu, _) = orthonormalize_columns(&gaussian(6, 2, &mut rng)).unwrap();
        let (qv, _) = orthonormalize_columns(&gaussian(5, 2, &mut rng)).unwrap();
        let core = gaussian(2, 2, &mut rng);
        let y = &qu * &core * qv.transpose();
        let obs = ObservationSet::full(&y).unwrap();
        let b = solve_completion_b(&qu, &qv, &obs, 0.0, &SolverOptions::default()).unwrap();
        let f = FactoredMatrix {
            u: &qu * &b,
            v: qv.clone(),
        };
        assert!(completion_value(&f, &obs).unwrap() < 1e-20);
    }

    #[test]
    fn scalar_ridge_closed_form() {
        // b = u_i v_j y / (u_i^2 v_j^2 + reg |E|)
        let obs = ObservationSet::new(3, 2, [(1, 0, 2.0)]).unwrap();
        let u = DenseMatrix::from_column_slice(3, 1, &[0.6, 0.8, 0.0]);
        let v = DenseMatrix::from_column_slice(2, 1, &[1.0, 0.0]);
        let reg = 0.25;
        let b = solve_completion_b(&u, &v, &obs, reg, &SolverOptions::default()).unwrap();
        let expected = 0.8 * 1.0 * 2.0 / (0.64 + reg * 1.0);
        assert!((b[(0, 0)] - expected).abs() < 1e-12);
    }

    #[test]
    fn large_ridge_shrinks_b() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let obs = sampled_obs(6, 6, 20, &mut rng);
        let (u, _) = orthonormalize_columns(&gaussian(6, 2, &mut rng)).unwrap();
        let (v, _) = orthonormalize_columns(&gaussian(6, 2, &mut rng)).unwrap();
        let b = solve_completion_b(&u, &v, &obs, 1e6, &SolverOptions::default()).unwrap();
        assert!(b.norm() < 1e-5);
    }

    #[test]
    fn direct_and_iterative_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for s in 1..=4 {
            let obs = sampled_obs(12, 10, 80, &mut rng);
            let u = gaussian(12, s, &mut rng);
            let v = gaussian(10, s, &mut rng);
            let direct = solve_completion_b(&u, &v, &obs, 0.0, &SolverOptions::default()).unwrap();
            let opts = SolverOptions {
                method: SolverMethod::Iterative,
                ..Default::default()
            };
            let iterative = solve_completion_b(&u, &v, &obs, 0.0, &opts).unwrap();
            assert!((direct - iterative).norm() < 1e-5, "s = {s}");
        }
    }

    #[test]
    fn quadratic_converges_to_known_minimizer() {
        let target = DenseMatrix::from_row_slice(2, 2, &[1.0, -2.0, 0.5, 3.0]);
        let weights = DenseMatrix::from_row_slice(2, 2, &[1.0, 10.0, 0.1, 2.0]);
        let b = solve_smooth_b(
            |b| {
                let diff = b - &target;
                let wd = diff.component_mul(&weights);
                Ok((0.5 * diff.dot(&wd), wd))
            },
            &DenseMatrix::zeros(2, 2),
            &SolverOptions::default(),
        )
        .unwrap();
        assert!((b - target).norm() < 1e-6);
    }

    #[test]
    fn optimal_init_returns_immediately() {
        let mut calls = 0;
        let (_, report) = minimize_lbfgs(
            |x| {
                calls += 1;
                Ok((x.norm_squared(), x * 2.0))
            },
            Vector::zeros(3),
            &SolverOptions::default(),
        )
        .unwrap();
        assert_eq!(report.iterations, 0);
        assert_eq!(calls, 1);
    }

    #[test]
    fn huber_restricted_problem_reaches_tolerance() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let y = gaussian(20, 20, &mut rng) * 2.0;
        let obj = HuberObjective::new(HuberTarget::new(y).unwrap());
        let (u, _) = orthonormalize_columns(&gaussian(20, 3, &mut rng)).unwrap();
        let (v, _) = orthonormalize_columns(&gaussian(20, 3, &mut rng)).unwrap();
        let opts = SolverOptions::default();
        let b = obj
            .solve_b(&u, &v, &DenseMatrix::zeros(3, 3), 0.0, &opts)
            .unwrap();
        let g = obj
            .gradient(&FactoredMatrix {
                u: &u * &b,
                v: v.clone(),
            })
            .unwrap()
            .project(&u, &v);
        assert!(g.norm() <= 1e-8);
    }

    #[test]
    fn diagonal_never_beats_full() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let obs = sampled_obs(8, 9, 40, &mut rng);
        let obj = CompletionObjective::new(obs.clone());
        let u = gaussian(8, 3, &mut rng);
        let v = gaussian(9, 3, &mut rng);
        let opts = SolverOptions::default();
        let full = solve_completion_b(&u, &v, &obs, 0.0, &opts).unwrap();
        let diag = solve_diagonal_b(&u, &v, &obj, &opts).unwrap();
        let full_val = completion_value(
            &FactoredMatrix {
                u: &u * full,
                v: v.clone(),
            },
            &obs,
        )
        .unwrap();
        let diag_val = completion_value(
            &FactoredMatrix {
                u: &u * DenseMatrix::from_diagonal(&diag),
                v: v.clone(),
            },
            &obs,
        )
        .unwrap();
        assert!(diag_val >= full_val - 1e-9);

        let scalar = solve_diagonal_b(
            &u.columns(0, 1).into(),
            &v.columns(0, 1).into(),
            &obj,
            &opts,
        )
        .unwrap();
        let scalar_full = solve_completion_b(
            &u.columns(0, 1).into(),
            &v.columns(0, 1).into(),
            &obs,
            0.0,
            &opts,
        )
        .unwrap();
        assert!((scalar[0] - scalar_full[(0, 0)]).abs() < 1e-10);
    }

    #[test]
    fn diagonal_projection_coefficients() {
        // orthonormal U, V, fully observed: b_k = u_k^T Y v_k
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        let (u, _) = orthonormalize_columns(&gaussian(7, 3, &mut rng)).unwrap();
        let (v, _) = orthonormalize_columns(&gaussian(6, 3, &mut rng)).unwrap();
        let y = gaussian(7, 6, &mut rng);
        let obj = CompletionObjective::new(ObservationSet::full(&y).unwrap());
        let d = solve_diagonal_b(&u, &v, &obj, &SolverOptions::default()).unwrap();
        for k in 0..3 {
            let proj = u.column(k).dot(&(&y * v.column(k)));
            assert!((d[k] - proj).abs() < 1e-9);
        }
    }

    #[test]
    fn generic_path_matches_normal_equations() {
        let mut rng = ChaCha8Rng::seed_from_u64(47);
        let obs = sampled_obs(9, 8, 50, &mut rng);
        let obj = CompletionObjective::new(obs.clone());
        let (u, _) = orthonormalize_columns(&gaussian(9, 3, &mut rng)).unwrap();
        let (v, _) = orthonormalize_columns(&gaussian(8, 3, &mut rng)).unwrap();
        let opts = SolverOptions {
            tolerance: 1e-12,
            ..Default::default()
        };
        let lbfgs =
            solve_b_first_order(&obj, &u, &v, &DenseMatrix::zeros(3, 3), 0.1, &opts).unwrap();
        let direct = obj
            .solve_b(&u, &v, &DenseMatrix::zeros(3, 3), 0.1, &opts)
            .unwrap();
        assert!((lbfgs - direct).norm() < 1e-5);
    }

    #[test]
    fn rejects_bad_options() {
        let obs = ObservationSet::new(1, 1, [(0, 0, 1.0)]).unwrap();
        let one = DenseMatrix::from_element(1, 1, 1.0);
        let opts = SolverOptions {
            tolerance: 0.0,
            ..Default::default()
        };
        assert!(solve_completion_b(&one, &one, &obs, 0.0, &opts).is_err());
    }
}
