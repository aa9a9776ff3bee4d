//! Dense real matrices, symmetric eigenvalues and Schatten norms.

mod io;
mod jacobi;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::numeric::pairwise_sum;

pub use jacobi::{sym_eigenvalues, DEFAULT_JACOBI_TOL, MAX_SWEEPS};

/// Eigenvalues of a Gram matrix in `[-CLAMP_BELOW_ZERO, 0)` are reported as 0.
pub const CLAMP_BELOW_ZERO: f64 = 1e-9;

/// Row-major dense real matrix with finite entries.
///
/// Serializes as an array of rows.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

/// A linear map `R^d -> R^r`, possibly rectangular; `d` is the column count.
pub type TransformMatrix = Matrix;

impl Matrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(domain("matrix dimensions must be >= 1"));
        }
        if data.len() != rows * cols {
            return Err(domain(format!(
                "expected {} entries for a {rows}x{cols} matrix, got {}",
                rows * cols,
                data.len()
            )));
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(domain(format!(
                "non-finite entry at ({}, {})",
                pos / cols,
                pos % cols
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, Vec::len);
        if let Some(i) = rows.iter().position(|r| r.len() != n_cols) {
            return Err(domain(format!(
                "row {i} has {} entries, expected {n_cols}",
                rows[i].len()
            )));
        }
        Self::new(n_rows, n_cols, rows.into_iter().flatten().collect())
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn diag(values: &[f64]) -> Result<Self> {
        let n = values.len();
        let mut data = vec![0.0; n * n];
        for (i, v) in values.iter().enumerate() {
            data[i * n + i] = *v;
        }
        Self::new(n, n, data)
    }

    /// Counterclockwise rotation of the plane by `angle` radians.
    pub fn rotation2(angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Self { rows: 2, cols: 2, data: vec![c, -s, s, c] }
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

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(domain(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(self.mul_unchecked(other))
    }

    pub(crate) fn mul_unchecked(&self, other: &Self) -> Self {
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                let orow = other.row(k);
                let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (d, b) in dst.iter_mut().zip(orow) {
                    *d += a * b;
                }
            }
        }
        out
    }

    /// `self * x`.
    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.cols {
            return Err(domain(format!(
                "vector of length {} does not match {} columns",
                x.len(),
                self.cols
            )));
        }
        Ok((0..self.rows)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect())
    }

    pub fn scale(&self, c: f64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| v * c).collect(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn trace(&self) -> f64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    /// `max |self - other|` over entries; dimensions must agree.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    /// Determinant by LU with partial pivoting.
    pub fn determinant(&self) -> Result<f64> {
        if !self.is_square() {
            return Err(domain("determinant of a non-square matrix"));
        }
        let n = self.rows;
        let mut a = self.data.clone();
        let mut det = 1.0;
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&i, &j| a[i * n + col].abs().total_cmp(&a[j * n + col].abs()))
                .unwrap();
            if a[pivot * n + col] == 0.0 {
                return Ok(0.0);
            }
            if pivot != col {
                for k in 0..n {
                    a.swap(pivot * n + k, col * n + k);
                }
                det = -det;
            }
            let p = a[col * n + col];
            det *= p;
            for i in col + 1..n {
                let f = a[i * n + col] / p;
                for k in col..n {
                    a[i * n + k] -= f * a[col * n + k];
                }
            }
        }
        Ok(det)
    }

    /// Inverse by Gauss–Jordan elimination; near-singular input is rejected.
    pub fn inverse(&self) -> Result<Self> {
        if !self.is_square() {
            return Err(domain(format!(
                "transformation must be square to invert, got {}x{}",
                self.rows, self.cols
            )));
        }
        let n = self.rows;
        let scale = self.max_abs();
        let mut a = self.data.clone();
        let mut inv = Self::identity(n).data;
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&i, &j| a[i * n + col].abs().total_cmp(&a[j * n + col].abs()))
                .unwrap();
            if a[pivot * n + col].abs() <= 1e-13 * scale {
                return Err(domain("transformation is singular"));
            }
            for k in 0..n {
                a.swap(pivot * n + k, col * n + k);
                inv.swap(pivot * n + k, col * n + k);
            }
            let p = a[col * n + col];
            for k in 0..n {
                a[col * n + k] /= p;
                inv[col * n + k] /= p;
            }
            for i in 0..n {
                if i == col {
                    continue;
                }
                let f = a[i * n + col];
                if f == 0.0 {
                    continue;
                }
                for k in 0..n {
                    a[i * n + k] -= f * a[col * n + k];
                    inv[i * n + k] -= f * inv[col * n + k];
                }
            }
        }
        Self::new(n, n, inv)
    }

    /// `‖UᵀU - I‖_∞` (max entry); zero for an orthogonal matrix.
    pub fn orthogonality_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        gram(self).max_abs_diff(&Self::identity(self.cols))
    }
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = f64;

    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

impl TryFrom<Vec<Vec<f64>>> for Matrix {
    type Error = Error;

    fn try_from(rows: Vec<Vec<f64>>) -> Result<Self> {
        Self::from_rows(rows)
    }
}

impl From<Matrix> for Vec<Vec<f64>> {
    fn from(m: Matrix) -> Self {
        m.to_rows()
    }
}

/// `TᵀT`, computed on the upper triangle and mirrored so the result is
/// exactly symmetric.
pub fn gram(t: &Matrix) -> Matrix {
    let d = t.cols;
    let mut g = Matrix::zeros(d, d);
    for i in 0..d {
        for j in i..d {
            let v: f64 = (0..t.rows).map(|k| t[(k, i)] * t[(k, j)]).sum();
            g[(i, j)] = v;
            g[(j, i)] = v;
        }
    }
    g
}

/// `TTᵀ`, exactly symmetric.
pub fn outer_gram(t: &Matrix) -> Matrix {
    gram(&t.transpose())
}

/// Eigenvalues of `TᵀT` in decreasing order: `d` nonnegative values.
pub fn squared_singular_values(t: &Matrix) -> Result<Vec<f64>> {
    let mut values = sym_eigenvalues(&gram(t), DEFAULT_JACOBI_TOL)?;
    for v in values.iter_mut() {
        if *v < 0.0 {
            if *v >= -CLAMP_BELOW_ZERO {
                *v = 0.0;
            } else {
                return Err(Error::Numerical(format!(
                    "Gram matrix has eigenvalue {v} below zero"
                )));
            }
        }
    }
    Ok(values)
}

/// How a Schatten norm is evaluated.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SchattenMethod {
    /// Sum of powers of the squared singular values.
    Spectral,
    /// `tr((TᵀT)^k)` on the smaller of `TᵀT` and `TTᵀ`; no eigenvalues.
    #[default]
    TracePower,
}

/// `‖T‖_{2k}^{2k}` for even `order = 2k`.
pub fn schatten(t: &Matrix, order: u32, method: SchattenMethod) -> Result<f64> {
    if order == 0 || order % 2 == 1 {
        return Err(domain(format!("only even Schatten orders >= 2 are supported, got {order}")));
    }
    let profile = SchattenProfile::compute(t, order / 2, method)?;
    Ok(profile.power_sums()[(order / 2 - 1) as usize])
}

/// `‖T‖_{2k}^{2k}` for `k = 1..=max_k`, keyed by the even order `2k`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SchattenProfile {
    values: BTreeMap<u32, f64>,
}

impl SchattenProfile {
    pub fn compute(t: &Matrix, max_k: u32, method: SchattenMethod) -> Result<Self> {
        if max_k == 0 {
            return Err(domain("Schatten profile needs max_k >= 1"));
        }
        let mut values = BTreeMap::new();
        match method {
            SchattenMethod::Spectral => {
                let s2 = squared_singular_values(t)?;
                for k in 1..=max_k {
                    let powers: Vec<f64> = s2.iter().map(|v| v.powi(k as i32)).collect();
                    values.insert(2 * k, pairwise_sum(&powers));
                }
            }
            SchattenMethod::TracePower => {
                let m = if t.cols <= t.rows { gram(t) } else { outer_gram(t) };
                let mut power = m.clone();
                values.insert(2, power.trace());
                for k in 2..=max_k {
                    power = power.mul_unchecked(&m);
                    values.insert(2 * k, power.trace());
                }
            }
        }
        Ok(Self { values })
    }

    pub fn get(&self, order: u32) -> Option<f64> {
        self.values.get(&order).copied()
    }

    /// `[‖T‖₂², ‖T‖₄⁴, ...]`, i.e. the power sums `p_k(s²(T))`.
    pub fn power_sums(&self) -> Vec<f64> {
        self.values.values().copied().collect()
    }
}

/// `tr φ(M) = Σ φ(e_i)` over the eigenvalues of a symmetric PSD matrix.
pub fn trace_matrix_function(m: &Matrix, phi: impl Fn(f64) -> f64) -> Result<f64> {
    let eig = sym_eigenvalues(m, DEFAULT_JACOBI_TOL)?;
    let mut terms = Vec::with_capacity(eig.len());
    for e in eig {
        if e < -CLAMP_BELOW_ZERO * m.max_abs().max(1.0) {
            return Err(domain(format!("matrix is not positive semidefinite (eigenvalue {e})")));
        }
        let e = e.max(0.0);
        let v = phi(e);
        if !v.is_finite() {
            return Err(domain(format!("function is undefined at eigenvalue {e}")));
        }
        terms.push(v);
    }
    Ok(pairwise_sum(&terms))
}

/// True when every squared singular value equals the mean within `rel_tol`,
/// i.e. `T` is a scalar multiple of an isometry.
pub fn is_scaled_isometry(s2: &[f64], rel_tol: f64) -> bool {
    let max = s2.iter().cloned().fold(f64::MIN, f64::max);
    let min = s2.iter().cloned().fold(f64::MAX, f64::min);
    max - min <= rel_tol * max.abs().max(f64::MIN_POSITIVE)
}
