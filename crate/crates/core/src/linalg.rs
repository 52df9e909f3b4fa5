//! Dense and sparse matrix kernels used by the greedy solver.
//!
//! The leading singular pair of the objective gradient is only ever accessed
//! through [`LinearOperator`], so a sparse completion gradient with `|E|`
//! nonzeros costs `O(|E|)` per power-iteration step. The small `s x s`
//! coefficient matrix produced by the corrective solve is decomposed with a
//! one-sided Jacobi SVD.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{GecoError, Result};

pub type DenseMatrix = DMatrix<f64>;
pub type Vector = DVector<f64>;

/// Relative residual below which a column counts as linearly dependent.
pub const DEGENERACY_TOL: f64 = 1e-10;

/// Matrix-free access to an `m x n` matrix `G`.
pub trait LinearOperator {
    fn nrows(&self) -> usize;
    fn ncols(&self) -> usize;

    /// `G x`, with `x.len() == ncols()`.
    fn apply(&self, x: &Vector) -> Vector;

    /// `G^T y`, with `y.len() == nrows()`.
    fn apply_transpose(&self, y: &Vector) -> Vector;

    /// Materializes the operator column by column. Only meant for small
    /// matrices (oracles, diagnostics).
    fn to_dense(&self) -> DenseMatrix {
        let (m, n) = (self.nrows(), self.ncols());
        let mut out = DenseMatrix::zeros(m, n);
        let mut e = Vector::zeros(n);
        for j in 0..n {
            e[j] = 1.0;
            out.set_column(j, &self.apply(&e));
            e[j] = 0.0;
        }
        out
    }
}

impl LinearOperator for DenseMatrix {
    fn nrows(&self) -> usize {
        self.nrows()
    }

    fn ncols(&self) -> usize {
        self.ncols()
    }

    fn apply(&self, x: &Vector) -> Vector {
        self * x
    }

    fn apply_transpose(&self, y: &Vector) -> Vector {
        self.tr_mul(y)
    }

    fn to_dense(&self) -> DenseMatrix {
        self.clone()
    }
}

impl<T: LinearOperator + ?Sized> LinearOperator for &T {
    fn nrows(&self) -> usize {
        (**self).nrows()
    }
    fn ncols(&self) -> usize {
        (**self).ncols()
    }
    fn apply(&self, x: &Vector) -> Vector {
        (**self).apply(x)
    }
    fn apply_transpose(&self, y: &Vector) -> Vector {
        (**self).apply_transpose(y)
    }
}

/// Compressed sparse row matrix.
#[derive(Clone, Debug)]
pub struct SparseMatrix {
    rows: usize,
    cols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl SparseMatrix {
    /// Builds from `(row, col, value)` triples. Entries must be sorted by row;
    /// within a row any order is accepted.
    pub fn from_row_sorted(
        rows: usize,
        cols: usize,
        entries: impl IntoIterator<Item = (usize, usize, f64)>,
    ) -> Self {
        let mut row_ptr = vec![0usize; rows + 1];
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        let mut last_row = 0usize;
        for (i, j, v) in entries {
            debug_assert!(i >= last_row, "entries not sorted by row");
            debug_assert!(i < rows && j < cols);
            last_row = i;
            row_ptr[i + 1] += 1;
            col_idx.push(j);
            values.push(v);
        }
        for i in 0..rows {
            row_ptr[i + 1] += row_ptr[i];
        }
        Self {
            rows,
            cols,
            row_ptr,
            col_idx,
            values,
        }
    }

    /// Number of stored entries (structural nonzeros).
    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.rows).flat_map(move |i| {
            (self.row_ptr[i]..self.row_ptr[i + 1])
                .map(move |p| (i, self.col_idx[p], self.values[p]))
        })
    }
}

impl LinearOperator for SparseMatrix {
    fn nrows(&self) -> usize {
        self.rows
    }

    fn ncols(&self) -> usize {
        self.cols
    }

    fn apply(&self, x: &Vector) -> Vector {
        assert_eq!(x.len(), self.cols);
        let mut out = Vector::zeros(self.rows);
        for i in 0..self.rows {
            let mut acc = 0.0;
            for p in self.row_ptr[i]..self.row_ptr[i + 1] {
                acc += self.values[p] * x[self.col_idx[p]];
            }
            out[i] = acc;
        }
        out
    }

    fn apply_transpose(&self, y: &Vector) -> Vector {
        assert_eq!(y.len(), self.rows);
        let mut out = Vector::zeros(self.cols);
        for i in 0..self.rows {
            let yi = y[i];
            if yi == 0.0 {
                continue;
            }
            for p in self.row_ptr[i]..self.row_ptr[i + 1] {
                out[self.col_idx[p]] += self.values[p] * yi;
            }
        }
        out
    }
}

/// `scale * U V^T` applied without forming the product.
#[derive(Clone, Debug)]
pub struct LowRankOperator {
    pub left: DenseMatrix,
    pub right: DenseMatrix,
    pub scale: f64,
}

impl LinearOperator for LowRankOperator {
    fn nrows(&self) -> usize {
        self.left.nrows()
    }

    fn ncols(&self) -> usize {
        self.right.nrows()
    }

    fn apply(&self, x: &Vector) -> Vector {
        let inner = self.right.tr_mul(x);
        (&self.left * inner) * self.scale
    }

    fn apply_transpose(&self, y: &Vector) -> Vector {
        let inner = self.left.tr_mul(y);
        (&self.right * inner) * self.scale
    }
}

/// Approximate leading singular pair `(u, v)` with `value = u^T G v >= 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct SingularPair {
    pub u: Vector,
    pub v: Vector,
    pub value: f64,
    /// Set when the operator annihilated the start vector; the pair then
    /// carries no direction information and `value == 0`.
    pub stationary: bool,
}

/// Seeded start vector, uniform on the unit sphere.
pub fn random_unit_vector(len: usize, rng: &mut ChaCha8Rng) -> Vector {
    loop {
        let v = Vector::from_fn(len, |_, _| StandardNormal.sample(rng));
        let norm = v.norm();
        if norm > 0.0 {
            return v / norm;
        }
    }
}

/// Power iteration for the leading singular pair of `op`.
///
/// Alternates `u <- G v / |G v|`, `v <- G^T u / |G^T u|` for `iterations`
/// rounds from a seeded random `v`, then sets `u = G v / |G v|`, so that the
/// returned value `u^T G v = |G v|` is never negative.
pub fn approx_sv<G: LinearOperator + ?Sized>(
    op: &G,
    iterations: usize,
    seed: u64,
) -> Result<SingularPair> {
    let (m, n) = (op.nrows(), op.ncols());
    if m == 0 || n == 0 {
        return Err(GecoError::DimensionMismatch(format!(
            "approx_sv on an empty {m}x{n} operator"
        )));
    }
    if iterations == 0 {
        return Err(GecoError::InvalidConfig(
            "power iteration count must be at least 1".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v = random_unit_vector(n, &mut rng);

    let stationary = |v: Vector| SingularPair {
        u: Vector::from_fn(m, |i, _| if i == 0 { 1.0 } else { 0.0 }),
        v,
        value: 0.0,
        stationary: true,
    };

    for _ in 0..iterations {
        let gv = op.apply(&v);
        let norm = gv.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Ok(stationary(v));
        }
        let u = gv / norm;
        let gtu = op.apply_transpose(&u);
        let norm = gtu.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Ok(stationary(v));
        }
        v = gtu / norm;
    }

    let gv = op.apply(&v);
    let value = gv.norm();
    if value == 0.0 {
        return Ok(stationary(v));
    }
    Ok(SingularPair {
        u: gv / value,
        v,
        value,
        stationary: false,
    })
}

/// `B = P diag(D) Q^T` for a square `B`.
#[derive(Clone, Debug)]
pub struct ThinSvd {
    pub p: DenseMatrix,
    pub d: Vec<f64>,
    pub q: DenseMatrix,
}

impl ThinSvd {
    pub fn reconstruct(&self) -> DenseMatrix {
        let mut pd = self.p.clone();
        for (j, &s) in self.d.iter().enumerate() {
            pd.column_mut(j).scale_mut(s);
        }
        pd * self.q.transpose()
    }
}

/// One-sided Jacobi SVD of a square matrix, singular values sorted
/// non-increasing.
pub fn thin_svd(b: &DenseMatrix) -> Result<ThinSvd> {
    let s = b.nrows();
    if b.ncols() != s {
        return Err(GecoError::DimensionMismatch(format!(
            "thin_svd expects a square matrix, got {}x{}",
            s,
            b.ncols()
        )));
    }
    if b.iter().any(|x| !x.is_finite()) {
        return Err(GecoError::NonFinite("thin_svd input"));
    }

    let mut w = b.clone();
    let mut q = DenseMatrix::identity(s, s);
    const MAX_SWEEPS: usize = 60;
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for i in 0..s {
            for j in (i + 1)..s {
                let alpha = w.column(i).norm_squared();
                let beta = w.column(j).norm_squared();
                let gamma = w.column(i).dot(&w.column(j));
                if gamma == 0.0 || gamma.abs() <= f64::EPSILON * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let sn = c * t;
                rotate_columns(&mut w, i, j, c, sn);
                rotate_columns(&mut q, i, j, c, sn);
            }
        }
        if !rotated {
            break;
        }
    }

    let mut order: Vec<usize> = (0..s).collect();
    let norms: Vec<f64> = (0..s).map(|j| w.column(j).norm()).collect();
    order.sort_by(|&a, &b| norms[b].total_cmp(&norms[a]).then(a.cmp(&b)));

    let scale = norms.iter().cloned().fold(0.0, f64::max);
    let mut p = DenseMatrix::zeros(s, s);
    let mut q_sorted = DenseMatrix::zeros(s, s);
    let mut d = Vec::with_capacity(s);
    let mut missing = Vec::new();
    for (k, &j) in order.iter().enumerate() {
        q_sorted.set_column(k, &q.column(j));
        let sigma = norms[j];
        if sigma > scale * 1e-15 && sigma > 0.0 {
            p.set_column(k, &(w.column(j) / sigma));
            d.push(sigma);
        } else {
            d.push(0.0);
            missing.push(k);
        }
    }
    complete_orthonormal_basis(&mut p, &missing);
    Ok(ThinSvd { p, d, q: q_sorted })
}

fn rotate_columns(m: &mut DenseMatrix, i: usize, j: usize, c: f64, s: f64) {
    for r in 0..m.nrows() {
        let a = m[(r, i)];
        let b = m[(r, j)];
        m[(r, i)] = c * a - s * b;
        m[(r, j)] = s * a + c * b;
    }
}

/// Fills the listed columns of `p` with unit vectors orthogonal to all the
/// other columns.
fn complete_orthonormal_basis(p: &mut DenseMatrix, missing: &[usize]) {
    let n = p.nrows();
    let mut filled: Vec<usize> = (0..p.ncols()).filter(|c| !missing.contains(c)).collect();
    let mut candidate = 0usize;
    for &k in missing {
        while candidate < n {
            let mut e = Vector::zeros(n);
            e[candidate] = 1.0;
            candidate += 1;
            for _ in 0..2 {
                for &c in &filled {
                    let proj = p.column(c).dot(&e);
                    e.axpy(-proj, &p.column(c), 1.0);
                }
            }
            let norm = e.norm();
            if norm > 1e-8 {
                p.set_column(k, &(e / norm));
                filled.push(k);
                break;
            }
        }
    }
}

/// Modified Gram-Schmidt with one re-orthogonalization pass: `M = Q R`,
/// `Q` with orthonormal columns and `R` upper-triangular.
pub fn orthonormalize_columns(m: &DenseMatrix) -> Result<(DenseMatrix, DenseMatrix)> {
    let (rows, k) = m.shape();
    if m.iter().any(|x| !x.is_finite()) {
        return Err(GecoError::NonFinite("orthonormalize_columns input"));
    }
    let mut q = m.clone();
    let mut r = DenseMatrix::zeros(k, k);
    for j in 0..k {
        let original = m.column(j).norm();
        for _pass in 0..2 {
            for i in 0..j {
                let proj = q.column(i).dot(&q.column(j));
                r[(i, j)] += proj;
                let qi = q.column(i).clone_owned();
                q.column_mut(j).axpy(-proj, &qi, 1.0);
            }
        }
        let norm = q.column(j).norm();
        if norm <= DEGENERACY_TOL * original || norm == 0.0 || rows == 0 {
            return Err(GecoError::DegenerateColumn {
                column: j,
                residual: norm,
            });
        }
        r[(j, j)] = norm;
        q.column_mut(j).unscale_mut(norm);
    }
    Ok((q, r))
}

pub(crate) fn check_finite(m: &DenseMatrix, what: &'static str) -> Result<()> {
    if m.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(GecoError::NonFinite(what))
    }
}
