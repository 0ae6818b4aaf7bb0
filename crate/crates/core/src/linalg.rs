//! Small dense complex linear algebra: nullspaces, constrained steady-state
//! solves and Hermitian spectra. Decompositions are delegated to `faer`.

use std::ops::{Index, IndexMut};

use faer::linalg::solvers::Solve;
use faer::{Mat, Side};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Relative singular-value threshold used for kernel extraction.
pub const DEFAULT_NULLSPACE_TOL: f64 = 1e-10;

const HERMITIAN_TOL: f64 = 1e-12;

/// Dense complex matrix stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if rows * cols != data.len() {
            return Err(Error::Dimension(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        let m = Self { rows, cols, data };
        m.check_finite()?;
        Ok(m)
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![C64::new(0.0, 0.0); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        if rows.iter().any(|x| x.len() != c) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        let data = rows.iter().flat_map(|x| x.iter().map(|&v| C64::new(v, 0.0))).collect();
        Self::new(r, c, data)
    }

    pub fn diag(values: &[f64]) -> Self {
        let n = values.len();
        Self::from_fn(n, n, |i, j| if i == j { C64::new(values[i], 0.0) } else { C64::new(0.0, 0.0) })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn check_finite(&self) -> Result<()> {
        match self.data.iter().position(|z| !(z.re.is_finite() && z.im.is_finite())) {
            Some(k) => Err(Error::NonFinite { row: k / self.cols.max(1), col: k % self.cols.max(1) }),
            None => Ok(()),
        }
    }

    pub fn mul_vec(&self, x: &[C64]) -> Vec<C64> {
        assert_eq!(x.len(), self.cols, "vector length must match column count");
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest entry of `|M − M†|`.
    pub fn hermitian_asymmetry(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.rows {
            for j in 0..self.cols.min(self.rows) {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    fn to_faer(&self) -> Mat<C64> {
        Mat::from_fn(self.rows, self.cols, |i, j| self[(i, j)])
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

#[derive(Clone, Debug)]
pub struct NullspaceResult {
    /// Orthonormal kernel basis.
    pub basis: Vec<Vec<C64>>,
    /// All singular values, descending.
    pub singular_values: Vec<f64>,
}

impl NullspaceResult {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }
}

/// Right-singular vectors whose singular value is at most `tol` times the largest.
pub fn nullspace(m: &ComplexMatrix, tol: f64) -> Result<NullspaceResult> {
    m.check_finite()?;
    if !(tol > 0.0 && tol < 1.0) {
        return Err(Error::Dimension(format!("nullspace tolerance {tol} outside (0, 1)")));
    }
    if m.cols == 0 {
        return Ok(NullspaceResult { basis: vec![], singular_values: vec![] });
    }
    let svd = m
        .to_faer()
        .svd()
        .map_err(|e| Error::Decomposition(format!("svd: {e:?}")))?;
    let s: Vec<f64> = svd.S().column_vector().iter().map(|z| z.re).collect();
    let smax = s.first().copied().unwrap_or(0.0);
    let rank = s.iter().filter(|&&x| x > tol * smax).count();
    let v = svd.V();
    let basis = (rank..m.cols)
        .map(|j| (0..m.cols).map(|i| v[(i, j)]).collect())
        .collect();
    Ok(NullspaceResult { basis, singular_values: s })
}

/// Solves `Lx = 0` with one row replaced by `Σ_{i∈idx} x_i = value`.
///
/// The replaced row is `trace_indices[0]`, which must be linearly dependent on
/// the others (true for any trace-preserving generator).
pub fn solve_with_trace_constraint(
    l: &ComplexMatrix,
    trace_indices: &[usize],
    trace_value: f64,
) -> Result<Vec<C64>> {
    l.check_finite()?;
    if !l.is_square() {
        return Err(Error::Dimension(format!("{}x{} generator is not square", l.rows, l.cols)));
    }
    let n = l.rows;
    let Some(&replaced) = trace_indices.first() else {
        return Err(Error::Dimension("empty trace index list".into()));
    };
    if let Some(&bad) = trace_indices.iter().find(|&&i| i >= n) {
        return Err(Error::Dimension(format!("trace index {bad} out of range for dimension {n}")));
    }

    let mut a = l.to_faer();
    for j in 0..n {
        a[(replaced, j)] = C64::new(0.0, 0.0);
    }
    for &i in trace_indices {
        a[(replaced, i)] = C64::new(1.0, 0.0);
    }
    let mut b = Mat::<C64>::zeros(n, 1);
    b[(replaced, 0)] = C64::new(trace_value, 0.0);

    let x = a.partial_piv_lu().solve(&b);
    let x: Vec<C64> = (0..n).map(|i| x[(i, 0)]).collect();

    let finite = x.iter().all(|z| z.re.is_finite() && z.im.is_finite());
    let scale = l.frobenius_norm().max(1.0) * x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let resid = if finite {
        let lx = l.mul_vec(&x);
        lx.iter()
            .enumerate()
            .filter(|&(i, _)| i != replaced)
            .map(|(_, z)| z.norm())
            .fold(0.0, f64::max)
    } else {
        f64::INFINITY
    };
    let sum: C64 = trace_indices.iter().map(|&i| x[i]).sum();
    if !finite || resid > 1e-8 * scale || (sum.re - trace_value).abs() > 1e-8 * trace_value.abs().max(1.0) {
        let kernel_dim = nullspace(l, DEFAULT_NULLSPACE_TOL).map(|r| r.dim()).unwrap_or(0);
        return Err(Error::DegenerateSteadyState { kernel_dim });
    }
    Ok(x)
}

/// Ascending eigenvalues of a Hermitian matrix.
pub fn hermitian_eigenvalues(m: &ComplexMatrix) -> Result<Vec<f64>> {
    m.check_finite()?;
    if !m.is_square() {
        return Err(Error::Dimension(format!("{}x{} matrix is not square", m.rows, m.cols)));
    }
    let asym = m.hermitian_asymmetry();
    if asym > HERMITIAN_TOL * m.max_abs().max(1.0) {
        return Err(Error::NotHermitian { max_asymmetry: asym });
    }
    let sym = Mat::from_fn(m.rows, m.cols, |i, j| 0.5 * (m[(i, j)] + m[(j, i)].conj()));
    sym.self_adjoint_eigenvalues(Side::Lower)
        .map_err(|e| Error::Decomposition(format!("eigensolver: {e:?}")))
}

/// Solves the real system `A X = B` (row-major `A`, `n×n`; `B` is `n×k`,
/// row-major). Fails on non-finite output, which signals a singular `A`.
pub fn solve_real(a: &[f64], n: usize, b: &[f64], k: usize) -> Result<Vec<f64>> {
    if a.len() != n * n {
        return Err(Error::Dimension(format!("real solve: A has {} entries for n={n}", a.len())));
    }
    solve_real_with(n, |i, j| a[i * n + j], b, k)
}

/// As [`solve_real`], with `A` supplied entrywise so large systems are
/// assembled once, directly in solver storage.
pub fn solve_real_with(n: usize, a: impl Fn(usize, usize) -> f64, b: &[f64], k: usize) -> Result<Vec<f64>> {
    if b.len() != n * k {
        return Err(Error::Dimension(format!("real solve: B has {} entries for n={n}, k={k}", b.len())));
    }
    let am = Mat::<f64>::from_fn(n, n, a);
    let bm = Mat::<f64>::from_fn(n, k, |i, j| b[i * k + j]);
    let x = am.partial_piv_lu().solve(&bm);
    let mut out = Vec::with_capacity(n * k);
    for i in 0..n {
        for j in 0..k {
            let v = x[(i, j)];
            if !v.is_finite() {
                return Err(Error::Decomposition("singular real system".into()));
            }
            out.push(v);
        }
    }
    Ok(out)
}

/// Eigenvalues (ascending) and unit eigenvectors of a real symmetric `n×n`
/// matrix given row-major.
pub fn symmetric_eigen(a: &[f64], n: usize) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    if a.len() != n * n {
        return Err(Error::Dimension(format!("symmetric eigen: {} entries for n={n}", a.len())));
    }
    if a.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite { row: 0, col: 0 });
    }
    let m = Mat::<f64>::from_fn(n, n, |i, j| 0.5 * (a[i * n + j] + a[j * n + i]));
    let evd = m
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::Decomposition(format!("eigensolver: {e:?}")))?;
    let vals = evd.S().column_vector().iter().copied().collect();
    let u = evd.U();
    let vecs = (0..n).map(|j| (0..n).map(|i| u[(i, j)]).collect()).collect();
    Ok((vals, vecs))
}
