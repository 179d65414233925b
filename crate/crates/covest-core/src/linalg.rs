//! Dense symmetric matrices, eigendecomposition, norms, and effective rank.
//!
//! Everything here is deterministic: identical inputs give bit-identical
//! outputs. Matrices are stored dense and row-major; the crate targets
//! dimensions up to a few hundred.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Relative PSD tolerance used by [`SymMatrix::psd_sqrt`] and
/// [`SymMatrix::effective_rank`]: eigenvalues above `-PSD_TOL * ||A||_inf`
/// count as nonnegative.
pub const PSD_TOL: f64 = 1e-10;

/// Eigenvalues above `RANK_TOL * ||A||_inf` count as nonzero when a discrete
/// rank is needed.
pub const RANK_TOL: f64 = 1e-12;

const MAX_SWEEPS: usize = 100;
const OFF_DIAGONAL_TOL: f64 = 1e-12; // relative to the Frobenius norm
const SIGN_TOL: f64 = 1e-12; // first component larger than this fixes the sign

/// Matrix norms (plus the signed trace) on symmetric matrices.
///
/// `Spectral` is the largest absolute eigenvalue and `Nuclear` the sum of
/// absolute eigenvalues; on the PSD cone the nuclear norm equals the trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatrixNorm {
    Frobenius,
    Spectral,
    Nuclear,
    MaxAbsEntry,
    Trace,
}

/// Dense `p x p` real symmetric matrix.
///
/// Invariants: `dim >= 1`, entries exactly symmetric, all entries finite.
/// Positive semidefiniteness is *not* an invariant (the debiased covariance
/// can be indefinite); it is checkable via [`SymMatrix::is_psd`].
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    dim: usize,
    entries: Vec<f64>, // row-major, length dim * dim
}

impl SymMatrix {
    /// Builds a matrix from row-major entries, rejecting asymmetric or
    /// non-finite input.
    pub fn from_entries(dim: usize, entries: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::EmptyMatrix);
        }
        if entries.len() != dim * dim {
            return Err(Error::EntryCount {
                dim,
                expected: dim * dim,
                actual: entries.len(),
            });
        }
        for i in 0..dim {
            for j in 0..dim {
                let a = entries[i * dim + j];
                if !a.is_finite() {
                    return Err(Error::NonFinite { i, j });
                }
                if j > i {
                    let b = entries[j * dim + i];
                    if a != b {
                        return Err(Error::NotSymmetric { i, j, a, b });
                    }
                }
            }
        }
        Ok(SymMatrix { dim, entries })
    }

    /// Builds a matrix from rows, rejecting ragged, asymmetric, or
    /// non-finite input.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 {
            return Err(Error::EmptyMatrix);
        }
        let mut entries = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::EntryCount {
                    dim,
                    expected: dim,
                    actual: row.len(),
                });
            }
            entries.extend_from_slice(row);
        }
        Self::from_entries(dim, entries)
    }

    /// Builds `(A + A^T) / 2` from possibly asymmetric row-major entries.
    pub fn symmetrized(dim: usize, entries: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::EmptyMatrix);
        }
        if entries.len() != dim * dim {
            return Err(Error::EntryCount {
                dim,
                expected: dim * dim,
                actual: entries.len(),
            });
        }
        let mut out = vec![0.0; dim * dim];
        for i in 0..dim {
            for j in i..dim {
                let v = 0.5 * (entries[i * dim + j] + entries[j * dim + i]);
                if !v.is_finite() {
                    return Err(Error::NonFinite { i, j });
                }
                out[i * dim + j] = v;
                out[j * dim + i] = v;
            }
        }
        Ok(SymMatrix { dim, entries: out })
    }

    /// Internal constructor for entries that are symmetric and finite by
    /// construction.
    pub(crate) fn from_raw(dim: usize, entries: Vec<f64>) -> Self {
        debug_assert!(dim >= 1 && entries.len() == dim * dim);
        debug_assert!(entries.iter().all(|v| v.is_finite()));
        SymMatrix { dim, entries }
    }

    pub fn zeros(dim: usize) -> Self {
        assert!(dim >= 1, "matrix dimension must be at least 1");
        SymMatrix {
            dim,
            entries: vec![0.0; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.entries[i * dim + i] = 1.0;
        }
        m
    }

    /// Diagonal matrix with the given finite values.
    pub fn from_diagonal(values: &[f64]) -> Self {
        assert!(!values.is_empty(), "matrix dimension must be at least 1");
        assert!(
            values.iter().all(|v| v.is_finite()),
            "diagonal must be finite"
        );
        let dim = values.len();
        let mut m = Self::zeros(dim);
        for (i, &v) in values.iter().enumerate() {
            m.entries[i * dim + i] = v;
        }
        m
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.dim + j]
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[i * self.dim..(i + 1) * self.dim]
    }

    /// Entrywise difference. Panics on dimension mismatch.
    pub fn sub(&self, other: &SymMatrix) -> SymMatrix {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a - b)
            .collect();
        SymMatrix::from_raw(self.dim, entries)
    }

    /// Entrywise sum. Panics on dimension mismatch.
    pub fn add(&self, other: &SymMatrix) -> SymMatrix {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a + b)
            .collect();
        SymMatrix::from_raw(self.dim, entries)
    }

    pub fn scaled(&self, c: f64) -> SymMatrix {
        assert!(c.is_finite(), "scale must be finite");
        SymMatrix::from_raw(self.dim, self.entries.iter().map(|v| c * v).collect())
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.entries[i * self.dim + i]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        libm::sqrt(self.entries.iter().map(|v| v * v).sum())
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.entries.iter().fold(0.0, |m, v| m.max(libm::fabs(*v)))
    }

    /// Matrix-vector product `A x`. Panics on length mismatch.
    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.dim, "dimension mismatch");
        (0..self.dim)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Evaluates the requested norm (or the signed trace).
    ///
    /// # Panics
    ///
    /// Panics if the eigensolver fails to converge for the spectral or
    /// nuclear norm; this cannot happen for the finite symmetric matrices
    /// the type admits.
    pub fn norm(&self, kind: MatrixNorm) -> f64 {
        match kind {
            MatrixNorm::Frobenius => self.frobenius_norm(),
            MatrixNorm::MaxAbsEntry => self.max_abs_entry(),
            MatrixNorm::Trace => self.trace(),
            MatrixNorm::Spectral => self.expect_eig().max_abs_eigenvalue(),
            MatrixNorm::Nuclear => self
                .expect_eig()
                .eigenvalues()
                .iter()
                .map(|v| libm::fabs(*v))
                .sum(),
        }
    }

    fn expect_eig(&self) -> SpectralDecomposition {
        self.eig().expect("eigensolver did not converge")
    }

    /// Full eigendecomposition by cyclic Jacobi rotations.
    ///
    /// Converges when the off-diagonal Frobenius norm drops below
    /// `1e-12 * ||A||_F`, with a cap of 100 sweeps. Eigenvalues come back
    /// in descending order; ties keep the rotation output order. Each
    /// eigenvector is normalized so that its first component larger than
    /// 1e-12 in magnitude is positive.
    pub fn eig(&self) -> Result<SpectralDecomposition> {
        let n = self.dim;
        let mut a = self.entries.clone();
        let mut u = SymMatrix::identity(n).entries;
        let fro = self.frobenius_norm();
        let tol = OFF_DIAGONAL_TOL * fro;

        let mut converged = false;
        let mut residual = off_diagonal_norm(&a, n);
        for _sweep in 0..MAX_SWEEPS {
            if residual <= tol {
                converged = true;
                break;
            }
            for p in 0..n.saturating_sub(1) {
                for q in (p + 1)..n {
                    rotate(&mut a, &mut u, n, p, q);
                }
            }
            residual = off_diagonal_norm(&a, n);
        }
        if !converged && residual > tol {
            return Err(Error::NoConvergence {
                residual,
                sweeps: MAX_SWEEPS,
            });
        }

        let raw: Vec<f64> = (0..n).map(|i| a[i * n + i]).collect();
        let mut order: Vec<usize> = (0..n).collect();
        // Stable sort: ties keep Jacobi output order.
        order.sort_by(|&i, &j| raw[j].total_cmp(&raw[i]));

        let eigenvalues: Vec<f64> = order.iter().map(|&k| raw[k]).collect();
        let mut eigenvectors = vec![0.0; n * n];
        for (col, &k) in order.iter().enumerate() {
            let mut first_sign = 0.0;
            for i in 0..n {
                let v = u[i * n + k];
                if first_sign == 0.0 && libm::fabs(v) > SIGN_TOL {
                    first_sign = if v > 0.0 { 1.0 } else { -1.0 };
                }
            }
            let flip = if first_sign < 0.0 { -1.0 } else { 1.0 };
            for i in 0..n {
                eigenvectors[i * n + col] = flip * u[i * n + k];
            }
        }

        Ok(SpectralDecomposition {
            dim: n,
            eigenvalues,
            eigenvectors,
        })
    }

    /// Effective rank `tr(A) / ||A||_inf` of a nonzero PSD matrix.
    ///
    /// The result always lies in `[1, rank(A)]`. The zero matrix and
    /// indefinite matrices (smallest eigenvalue below
    /// `-PSD_TOL * ||A||_inf`) are rejected.
    pub fn effective_rank(&self) -> Result<f64> {
        let decomp = self.eig()?;
        let spectral = decomp.max_abs_eigenvalue();
        if spectral == 0.0 {
            return Err(Error::ZeroMatrix);
        }
        let min = decomp.min_eigenvalue();
        if min < -PSD_TOL * spectral {
            return Err(Error::NotPsd {
                min_eigenvalue: min,
            });
        }
        let trace: f64 = decomp.eigenvalues().iter().sum();
        // Clamp against rounding: tr(A) >= ||A||_inf holds exactly for PSD A.
        Ok((trace / spectral).max(1.0))
    }

    /// Symmetric PSD square root `R` with `R R = A`.
    ///
    /// Eigenvalues within `-PSD_TOL * ||A||_inf` of zero are clipped to
    /// zero; anything lower is rejected as not PSD.
    pub fn psd_sqrt(&self) -> Result<SymMatrix> {
        let decomp = self.eig()?;
        let spectral = decomp.max_abs_eigenvalue();
        let min = decomp.min_eigenvalue();
        if min < -PSD_TOL * spectral {
            return Err(Error::NotPsd {
                min_eigenvalue: min,
            });
        }
        Ok(decomp.reconstruct_with(|v| libm::sqrt(v.max(0.0))))
    }

    /// Whether the smallest eigenvalue is at least `-tol * max(1, ||A||_inf)`.
    pub fn is_psd(&self, tol: f64) -> bool {
        assert!(tol >= 0.0, "tolerance must be nonnegative");
        let decomp = self.expect_eig();
        let spectral = decomp.max_abs_eigenvalue();
        decomp.min_eigenvalue() >= -tol * spectral.max(1.0)
    }

    /// Count of eigenvalues above `RANK_TOL * ||A||_inf` in magnitude.
    pub fn numerical_rank(&self) -> usize {
        let decomp = self.expect_eig();
        let threshold = RANK_TOL * decomp.max_abs_eigenvalue();
        decomp
            .eigenvalues()
            .iter()
            .filter(|v| libm::fabs(**v) > threshold)
            .count()
    }
}

fn off_diagonal_norm(a: &[f64], n: usize) -> f64 {
    let mut sum = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            let v = a[i * n + j];
            sum += 2.0 * v * v;
        }
    }
    libm::sqrt(sum)
}

/// One Jacobi rotation annihilating the (p, q) entry; updates the full
/// symmetric storage of `a` and accumulates the rotation into the columns
/// p, q of `u`.
fn rotate(a: &mut [f64], u: &mut [f64], n: usize, p: usize, q: usize) {
    let apq = a[p * n + q];
    if apq == 0.0 {
        return;
    }
    let diff = a[q * n + q] - a[p * n + p];
    let theta = 0.5 * diff / apq;
    // Smaller-root tangent; the 1/(2 theta) branch avoids overflow in
    // theta * theta.
    let t = if libm::fabs(theta) < 1e153 {
        let t = 1.0 / (libm::fabs(theta) + libm::sqrt(theta * theta + 1.0));
        if theta < 0.0 {
            -t
        } else {
            t
        }
    } else {
        0.5 / theta
    };
    let c = 1.0 / libm::sqrt(t * t + 1.0);
    let s = t * c;
    let tau = s / (1.0 + c);
    let h = t * apq;

    a[p * n + p] -= h;
    a[q * n + q] += h;
    a[p * n + q] = 0.0;
    a[q * n + p] = 0.0;

    for j in 0..n {
        if j == p || j == q {
            continue;
        }
        let g = a[j * n + p];
        let w = a[j * n + q];
        let gp = g - s * (w + g * tau);
        let wq = w + s * (g - w * tau);
        a[j * n + p] = gp;
        a[p * n + j] = gp;
        a[j * n + q] = wq;
        a[q * n + j] = wq;
    }
    for j in 0..n {
        let g = u[j * n + p];
        let w = u[j * n + q];
        u[j * n + p] = g - s * (w + g * tau);
        u[j * n + q] = w + s * (g - w * tau);
    }
}

/// Eigenvalues (descending) and orthonormal eigenvectors of a [`SymMatrix`].
///
/// Column `j` of the eigenvector matrix is the unit eigenvector paired with
/// `eigenvalues[j]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDecomposition {
    dim: usize,
    eigenvalues: Vec<f64>,
    eigenvectors: Vec<f64>, // row-major, column j = eigenvector j
}

impl SpectralDecomposition {
    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Component `i` of eigenvector `j`.
    #[inline]
    pub fn eigenvector_component(&self, i: usize, j: usize) -> f64 {
        self.eigenvectors[i * self.dim + j]
    }

    pub fn eigenvector(&self, j: usize) -> Vec<f64> {
        (0..self.dim)
            .map(|i| self.eigenvector_component(i, j))
            .collect()
    }

    pub fn max_abs_eigenvalue(&self) -> f64 {
        self.eigenvalues
            .iter()
            .fold(0.0, |m, v| m.max(libm::fabs(*v)))
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues
            .iter()
            .fold(f64::INFINITY, |m, v| m.min(*v))
    }

    /// `U diag(lambda) U^T`.
    pub fn reconstruct(&self) -> SymMatrix {
        self.reconstruct_with(|v| v)
    }

    /// `U diag(f(lambda)) U^T`, exactly symmetric by construction.
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> f64) -> SymMatrix {
        let g: Vec<f64> = self.eigenvalues.iter().map(|&v| f(v)).collect();
        self.with_spectrum(&g)
    }

    /// `U diag(values) U^T`: the same eigenbasis with a replaced spectrum.
    /// Panics on length mismatch.
    pub fn with_spectrum(&self, values: &[f64]) -> SymMatrix {
        assert_eq!(values.len(), self.dim, "dimension mismatch");
        let n = self.dim;
        let g = values;
        let mut out = vec![0.0; n * n];
        for i in 0..n {
            for k in i..n {
                let mut sum = 0.0;
                for (j, gj) in g.iter().enumerate() {
                    sum += gj * self.eigenvectors[i * n + j] * self.eigenvectors[k * n + j];
                }
                out[i * n + k] = sum;
                out[k * n + i] = sum;
            }
        }
        SymMatrix::from_raw(n, out)
    }

    /// `max |(U^T U - I)_{ij}|`, the orthonormality defect.
    pub fn orthonormality_defect(&self) -> f64 {
        let n = self.dim;
        let mut worst = 0.0_f64;
        for a in 0..n {
            for b in a..n {
                let mut dot = 0.0;
                for i in 0..n {
                    dot += self.eigenvectors[i * n + a] * self.eigenvectors[i * n + b];
                }
                let target = if a == b { 1.0 } else { 0.0 };
                worst = worst.max(libm::fabs(dot - target));
            }
        }
        worst
    }
}

/// Dense rectangular matrix of observations, one sample per row.
#[derive(Debug, Clone, PartialEq)]
pub struct DataMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>, // row-major
}

impl DataMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::EmptyMatrix);
        }
        if data.len() != rows * cols {
            return Err(Error::EntryCount {
                dim: rows,
                expected: rows * cols,
                actual: data.len(),
            });
        }
        if let Some(k) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                i: k / cols,
                j: k % cols,
            });
        }
        Ok(DataMatrix { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows >= 1 && cols >= 1, "dimensions must be at least 1");
        DataMatrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub(crate) fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn scaled(&self, c: f64) -> DataMatrix {
        assert!(c.is_finite(), "scale must be finite");
        DataMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| c * v).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b} (tol {tol})");
    }

    #[test]
    fn rejects_asymmetric_and_non_finite() {
        let err = SymMatrix::from_entries(2, vec![1.0, 2.0, 3.0, 4.0]).unwrap_err();
        assert!(matches!(err, Error::NotSymmetric { .. }));
        let err = SymMatrix::from_entries(2, vec![1.0, f64::NAN, f64::NAN, 1.0]).unwrap_err();
        assert!(matches!(err, Error::NonFinite { .. }));
        assert!(matches!(
            SymMatrix::from_entries(0, vec![]),
            Err(Error::EmptyMatrix)
        ));
    }

    #[test]
    fn symmetrized_averages() {
        let m = SymMatrix::symmetrized(2, vec![1.0, 2.0, 4.0, 3.0]).unwrap();
        assert_eq!(m.get(0, 1), 3.0);
        assert_eq!(m.get(1, 0), 3.0);
    }

    #[test]
    fn eig_diagonal() {
        let m = SymMatrix::from_diagonal(&[3.0, 1.0]);
        let d = m.eig().unwrap();
        assert_eq!(d.eigenvalues(), &[3.0, 1.0]);
        assert_eq!(d.eigenvector(0), vec![1.0, 0.0]);
        assert_eq!(d.eigenvector(1), vec![0.0, 1.0]);
    }

    #[test]
    fn eig_exchange_matrix() {
        // [[0,1],[1,0]] has eigenvalues 1, -1 with eigenvectors
        // (1,1)/sqrt(2) and (1,-1)/sqrt(2) under the sign convention.
        let m = SymMatrix::from_entries(2, vec![0.0, 1.0, 1.0, 0.0]).unwrap();
        let d = m.eig().unwrap();
        assert_close(d.eigenvalues()[0], 1.0, 1e-14);
        assert_close(d.eigenvalues()[1], -1.0, 1e-14);
        let inv_sqrt2 = core::f64::consts::FRAC_1_SQRT_2;
        let u0 = d.eigenvector(0);
        let u1 = d.eigenvector(1);
        assert_close(u0[0], inv_sqrt2, 1e-14);
        assert_close(u0[1], inv_sqrt2, 1e-14);
        assert_close(u1[0], inv_sqrt2, 1e-14);
        assert_close(u1[1], -inv_sqrt2, 1e-14);
    }

    #[test]
    fn eig_zero_matrix() {
        let d = SymMatrix::zeros(3).eig().unwrap();
        assert_eq!(d.eigenvalues(), &[0.0, 0.0, 0.0]);
        assert_eq!(d.orthonormality_defect(), 0.0);
    }

    #[test]
    fn norms_on_identity_and_exchange() {
        let id = SymMatrix::identity(3);
        assert_eq!(id.norm(MatrixNorm::Spectral), 1.0);
        assert_eq!(id.norm(MatrixNorm::Nuclear), 3.0);
        assert_close(id.norm(MatrixNorm::Frobenius), 3.0_f64.sqrt(), 1e-15);

        let x = SymMatrix::from_entries(2, vec![0.0, 1.0, 1.0, 0.0]).unwrap();
        assert_close(x.norm(MatrixNorm::Nuclear), 2.0, 1e-14);
        assert_eq!(x.norm(MatrixNorm::Trace), 0.0);
    }

    #[test]
    fn effective_rank_cases() {
        assert_close(SymMatrix::identity(4).effective_rank().unwrap(), 4.0, 1e-12);
        // Eigenvalues 1, 1/4, 1/4, 1/4: effective rank (2p-1)/p = 1.75.
        let m = SymMatrix::from_diagonal(&[1.0, 0.25, 0.25, 0.25]);
        assert_close(m.effective_rank().unwrap(), 1.75, 1e-12);
        let m = SymMatrix::from_diagonal(&[2.0, 1.0, 0.0]);
        assert_close(m.effective_rank().unwrap(), 1.5, 1e-12);
        assert!(matches!(
            SymMatrix::zeros(2).effective_rank(),
            Err(Error::ZeroMatrix)
        ));
        let indefinite = SymMatrix::from_entries(2, vec![1.0, 2.0, 2.0, 1.0]).unwrap();
        assert!(matches!(
            indefinite.effective_rank(),
            Err(Error::NotPsd { .. })
        ));
    }

    #[test]
    fn psd_sqrt_cases() {
        let r = SymMatrix::identity(3).psd_sqrt().unwrap();
        assert_eq!(r, SymMatrix::identity(3));
        let r = SymMatrix::from_diagonal(&[4.0, 9.0]).psd_sqrt().unwrap();
        assert_close(r.get(0, 0), 2.0, 1e-12);
        assert_close(r.get(1, 1), 3.0, 1e-12);
        let indefinite = SymMatrix::from_entries(2, vec![1.0, 2.0, 2.0, 1.0]).unwrap();
        assert!(matches!(indefinite.psd_sqrt(), Err(Error::NotPsd { .. })));
    }

    #[test]
    fn is_psd_cases() {
        assert!(SymMatrix::identity(2).is_psd(1e-10));
        assert!(SymMatrix::zeros(2).is_psd(0.0));
        // Eigenvalues 3, -1.
        let m = SymMatrix::from_entries(2, vec![1.0, 2.0, 2.0, 1.0]).unwrap();
        assert!(!m.is_psd(1e-10));
    }

    #[test]
    fn seeded_decomposition_satisfies_invariants() {
        // Deterministic pseudo-random symmetric 5x5.
        let mut vals = Vec::new();
        let mut state = 123_456_789_u64;
        for _ in 0..25 {
            state = state
                .wrapping_mul(6_364_136_223_846_793_005)
                .wrapping_add(1);
            vals.push(((state >> 33) as f64) / (1u64 << 31) as f64 * 4.0 - 2.0);
        }
        let m = SymMatrix::symmetrized(5, vals).unwrap();
        let d = m.eig().unwrap();
        let recon = d.reconstruct();
        let err = recon.sub(&m).frobenius_norm();
        assert!(
            err <= 1e-10 * m.frobenius_norm().max(1.0),
            "reconstruction {err}"
        );
        assert!(d.orthonormality_defect() <= 1e-10);
        for w in d.eigenvalues().windows(2) {
            assert!(w[0] >= w[1]);
        }
        // Frobenius norm squared equals the sum of squared eigenvalues.
        let fro2: f64 = d.eigenvalues().iter().map(|v| v * v).sum();
        assert_close(m.frobenius_norm().powi(2), fro2, 1e-9 * fro2.max(1.0));
    }

    #[test]
    fn data_matrix_validation() {
        assert!(DataMatrix::new(2, 3, vec![0.0; 6]).is_ok());
        assert!(matches!(
            DataMatrix::new(2, 3, vec![0.0; 5]),
            Err(Error::EntryCount { .. })
        ));
        assert!(matches!(
            DataMatrix::new(1, 1, vec![f64::INFINITY]),
            Err(Error::NonFinite { .. })
        ));
    }
}
