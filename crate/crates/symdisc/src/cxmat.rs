//! Dense complex matrices with Hermitian eigensolving and PSD testing.
//!
//! This is a self-contained kernel for the small dense operators this crate
//! works with (dimension at most [`MAX_DIM`]). Matrices are immutable values:
//! every operation returns a fresh matrix, so identity checks written as
//! tests never depend on evaluation order. The eigensolver is a cyclic
//! complex Jacobi iteration, which is slow compared to Householder + QR but
//! foolproof for Hermitian input at these sizes.

use num_complex::Complex64;

use crate::{tol, Error, Result, MAX_DIM};

pub const C_ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const C_ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Dense row-major complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    /// Build from closure over (row, col). Rejects empty, oversized, or
    /// non-finite content.
    pub fn from_fn<F>(rows: usize, cols: usize, mut f: F) -> Result<Self>
    where
        F: FnMut(usize, usize) -> Complex64,
    {
        check_dims(rows, cols)?;
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        let m = ComplexMatrix { rows, cols, data };
        m.check_finite()?;
        Ok(m)
    }

    pub fn zeros(rows: usize, cols: usize) -> Result<Self> {
        check_dims(rows, cols)?;
        Ok(ComplexMatrix {
            rows,
            cols,
            data: vec![C_ZERO; rows * cols],
        })
    }

    pub fn identity(n: usize) -> Result<Self> {
        Self::from_fn(n, n, |i, j| if i == j { C_ONE } else { C_ZERO })
    }

    /// Build from nested rows of complex entries.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        check_dims(r, c)?;
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::DimensionMismatch(
                "rows have unequal lengths".into(),
            ));
        }
        Self::from_fn(r, c, |i, j| rows[i][j])
    }

    /// Build from nested rows of real entries.
    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        check_dims(r, c)?;
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::DimensionMismatch(
                "rows have unequal lengths".into(),
            ));
        }
        Self::from_fn(r, c, |i, j| Complex64::new(rows[i][j], 0.0))
    }

    /// Diagonal matrix from complex entries.
    pub fn diag(entries: &[Complex64]) -> Result<Self> {
        let n = entries.len();
        Self::from_fn(n, n, |i, j| if i == j { entries[i] } else { C_ZERO })
    }

    /// Diagonal matrix from real entries.
    pub fn diag_real(entries: &[f64]) -> Result<Self> {
        let n = entries.len();
        Self::from_fn(
            n,
            n,
            |i, j| {
                if i == j {
                    Complex64::new(entries[i], 0.0)
                } else {
                    C_ZERO
                }
            },
        )
    }

    /// Column vector (d×1) from a slice.
    pub fn column_vector(entries: &[Complex64]) -> Result<Self> {
        let n = entries.len();
        Self::from_fn(n, 1, |i, _| entries[i])
    }

    /// Outer product u·v† of two vectors.
    pub fn outer(u: &[Complex64], v: &[Complex64]) -> Result<Self> {
        Self::from_fn(u.len(), v.len(), |i, j| u[i] * v[j].conj())
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(cols: &[Vec<Complex64>]) -> Result<Self> {
        let c = cols.len();
        let r = cols.first().map_or(0, Vec::len);
        check_dims(r, c)?;
        if cols.iter().any(|col| col.len() != r) {
            return Err(Error::DimensionMismatch(
                "columns have unequal lengths".into(),
            ));
        }
        Self::from_fn(r, c, |i, j| cols[j][i])
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

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.cols + j]
    }

    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    /// Entries of a d×1 matrix as a plain vector.
    pub fn as_vector(&self) -> Result<Vec<Complex64>> {
        if self.cols != 1 {
            return Err(Error::DimensionMismatch(format!(
                "expected a column vector, got {}x{}",
                self.rows, self.cols
            )));
        }
        Ok(self.data.clone())
    }

    fn check_finite(&self) -> Result<()> {
        for i in 0..self.rows {
            for j in 0..self.cols {
                let z = self.get(i, j);
                if !z.re.is_finite() || !z.im.is_finite() {
                    return Err(Error::NonFinite { row: i, col: j });
                }
            }
        }
        Ok(())
    }

    /// Standard matrix product.
    pub fn matmul(&self, other: &ComplexMatrix) -> Result<ComplexMatrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut data = vec![C_ZERO; self.rows * other.cols];
        for i in 0..self.rows {
            for k in 0..self.cols {
                let aik = self.get(i, k);
                if aik == C_ZERO {
                    continue;
                }
                for j in 0..other.cols {
                    data[i * other.cols + j] += aik * other.get(k, j);
                }
            }
        }
        Ok(ComplexMatrix {
            rows: self.rows,
            cols: other.cols,
            data,
        })
    }

    /// Matrix-vector product.
    pub fn matvec(&self, v: &[Complex64]) -> Result<Vec<Complex64>> {
        if self.cols != v.len() {
            return Err(Error::DimensionMismatch(format!(
                "cannot apply {}x{} to a vector of length {}",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        Ok((0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j) * v[j]).sum())
            .collect())
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> ComplexMatrix {
        let mut data = vec![C_ZERO; self.rows * self.cols];
        for i in 0..self.rows {
            for j in 0..self.cols {
                data[j * self.rows + i] = self.get(i, j).conj();
            }
        }
        ComplexMatrix {
            rows: self.cols,
            cols: self.rows,
            data,
        }
    }

    /// Sum of diagonal entries.
    pub fn trace(&self) -> Result<Complex64> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "trace of non-square {}x{} matrix",
                self.rows, self.cols
            )));
        }
        Ok((0..self.rows).map(|i| self.get(i, i)).sum())
    }

    /// Kronecker product, dimension (a.rows·b.rows) × (a.cols·b.cols).
    pub fn tensor(&self, other: &ComplexMatrix) -> Result<ComplexMatrix> {
        let rows = self.rows * other.rows;
        let cols = self.cols * other.cols;
        check_dims(rows, cols)?;
        ComplexMatrix::from_fn(rows, cols, |i, j| {
            self.get(i / other.rows, j / other.cols) * other.get(i % other.rows, j % other.cols)
        })
    }

    /// Block-diagonal matrix from square blocks.
    pub fn direct_sum(blocks: &[ComplexMatrix]) -> Result<ComplexMatrix> {
        if blocks.is_empty() {
            return Err(Error::EmptyMatrix);
        }
        for b in blocks {
            if !b.is_square() {
                return Err(Error::DimensionMismatch(
                    "direct sum blocks must be square".into(),
                ));
            }
        }
        let n: usize = blocks.iter().map(ComplexMatrix::rows).sum();
        check_dims(n, n)?;
        let mut m = ComplexMatrix {
            rows: n,
            cols: n,
            data: vec![C_ZERO; n * n],
        };
        let mut off = 0;
        for b in blocks {
            for i in 0..b.rows {
                for j in 0..b.cols {
                    m.data[(off + i) * n + (off + j)] = b.get(i, j);
                }
            }
            off += b.rows;
        }
        Ok(m)
    }

    /// √(Σ|a_ij|²).
    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entry magnitude of self − other; matrices must match in shape.
    pub fn max_abs_diff(&self, other: &ComplexMatrix) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn add(&self, other: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn scale(&self, s: f64) -> ComplexMatrix {
        self.scale_c(Complex64::new(s, 0.0))
    }

    pub fn scale_c(&self, s: Complex64) -> ComplexMatrix {
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a * s).collect(),
        }
    }

    /// ‖A − A†‖_F.
    pub fn hermiticity_residual(&self) -> f64 {
        self.sub(&self.adjoint()).frobenius_norm()
    }

    /// (A + A†) / 2.
    pub fn hermitize(&self) -> ComplexMatrix {
        self.add(&self.adjoint()).scale(0.5)
    }

    /// Integer matrix power by repeated multiplication.
    pub fn pow(&self, k: usize) -> Result<ComplexMatrix> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch("power of non-square matrix".into()));
        }
        let mut acc = ComplexMatrix::identity(self.rows)?;
        for _ in 0..k {
            acc = acc.matmul(self)?;
        }
        Ok(acc)
    }

    /// Full spectral decomposition of a Hermitian matrix by cyclic complex
    /// Jacobi rotations.
    ///
    /// The input must satisfy ‖A − A†‖_F ≤ tol·‖A‖_F; it is then symmetrized
    /// and annihilated one off-diagonal entry at a time. Each rotation first
    /// absorbs the phase of the pivot entry, then applies the classical real
    /// rotation angle. Sweeps stop once the total off-diagonal magnitude
    /// drops below 1e-13·‖A‖_F; more than 100 sweeps is reported as
    /// non-convergence (in practice 5-10 sweeps suffice at these sizes).
    ///
    /// Returns eigenvalues in ascending order with matching orthonormal
    /// eigenvector columns.
    pub fn hermitian_eig(&self, tol: f64) -> Result<HermitianEigenResult> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch(
                "eigendecomposition of non-square matrix".into(),
            ));
        }
        let n = self.rows;
        let norm = self.frobenius_norm();
        let herm_res = self.hermiticity_residual();
        if herm_res > tol * norm.max(1.0) {
            return Err(Error::NotHermitian {
                residual: herm_res / norm.max(f64::MIN_POSITIVE),
            });
        }

        let mut a = self.hermitize();
        let mut v = ComplexMatrix::identity(n)?;
        if n == 1 {
            return Ok(HermitianEigenResult {
                eigenvalues: vec![a.get(0, 0).re],
                eigenvectors: v,
            });
        }

        let target = tol::EIG_OFFDIAG * norm.max(f64::MIN_POSITIVE);
        const MAX_SWEEPS: usize = 100;
        let mut converged = false;
        for _ in 0..MAX_SWEEPS {
            let off: f64 = (0..n)
                .flat_map(|p| (p + 1..n).map(move |q| (p, q)))
                .map(|(p, q)| 2.0 * a.get(p, q).norm_sqr())
                .sum::<f64>()
                .sqrt();
            if off <= target {
                converged = true;
                break;
            }
            for p in 0..n - 1 {
                for q in p + 1..n {
                    jacobi_rotate(&mut a, &mut v, p, q);
                }
            }
        }
        if !converged {
            // One final check: the last sweep may have finished the job.
            let off: f64 = (0..n)
                .flat_map(|p| (p + 1..n).map(move |q| (p, q)))
                .map(|(p, q)| 2.0 * a.get(p, q).norm_sqr())
                .sum::<f64>()
                .sqrt();
            if off > target {
                return Err(Error::NoConvergence { sweeps: MAX_SWEEPS });
            }
        }

        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| {
            a.get(i, i)
                .re
                .partial_cmp(&a.get(j, j).re)
                .expect("eigenvalues are finite")
        });
        let eigenvalues: Vec<f64> = order.iter().map(|&i| a.get(i, i).re).collect();
        let eigenvectors = ComplexMatrix::from_fn(n, n, |i, j| v.get(i, order[j]))?;
        Ok(HermitianEigenResult {
            eigenvalues,
            eigenvectors,
        })
    }

    /// Minimum eigenvalue of a Hermitian matrix.
    pub fn min_eigenvalue(&self, tol: f64) -> Result<f64> {
        let eig = self.hermitian_eig(tol)?;
        Ok(eig.eigenvalues[0])
    }

    /// True iff the minimum eigenvalue is at least −floor. The input must be
    /// Hermitian within 1e-9.
    pub fn is_psd(&self, floor: f64) -> Result<bool> {
        Ok(self.min_eigenvalue(tol::STRUCTURAL)? >= -floor)
    }

    /// PSD test with the default floor: relative 1e-10·‖A‖_F, falling back
    /// to an absolute 1e-12 for near-zero matrices. Condition residuals
    /// scale with the ensemble norm, so the floor must as well.
    pub fn is_psd_default(&self) -> Result<bool> {
        self.is_psd(self.default_psd_floor())
    }

    pub fn default_psd_floor(&self) -> f64 {
        let norm = self.frobenius_norm();
        if norm < 1e-2 {
            1e-12
        } else {
            tol::PSD_FLOOR * norm
        }
    }
}

/// Zero out the (p, q) entry of Hermitian `a` with a unitary plane rotation,
/// accumulating the rotation into the columns of `v`.
fn jacobi_rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let apq = a.get(p, q);
    let r = apq.norm();
    if r == 0.0 {
        return;
    }
    // Phase that makes the pivot real, then the classical rotation angle.
    let phase = apq / r;
    let app = a.get(p, p).re;
    let aqq = a.get(q, q).re;
    let theta = (aqq - app) / (2.0 * r);
    // Small-magnitude root of t² − 2θt − 1 = 0.
    let t = if theta >= 0.0 {
        -1.0 / (theta + (1.0 + theta * theta).sqrt())
    } else {
        1.0 / (-theta + (1.0 + theta * theta).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    let sp = phase * s; // s·e^{iφ}
    let n = a.rows;

    // Columns p and q of A (rows follow by Hermiticity).
    for i in 0..n {
        let aip = a.get(i, p);
        let aiq = a.get(i, q);
        a.data[i * n + p] = aip * c + aiq * sp.conj();
        a.data[i * n + q] = aiq * c - aip * sp;
    }
    for j in 0..n {
        let apj = a.get(p, j);
        let aqj = a.get(q, j);
        a.data[p * n + j] = apj * c + aqj * sp;
        a.data[q * n + j] = aqj * c - apj * sp.conj();
    }
    // Clean the pivot pair and enforce real diagonal against roundoff.
    a.data[p * n + q] = C_ZERO;
    a.data[q * n + p] = C_ZERO;
    a.data[p * n + p] = Complex64::new(a.get(p, p).re, 0.0);
    a.data[q * n + q] = Complex64::new(a.get(q, q).re, 0.0);

    for i in 0..n {
        let vip = v.get(i, p);
        let viq = v.get(i, q);
        v.data[i * n + p] = vip * c + viq * sp.conj();
        v.data[i * n + q] = viq * c - vip * sp;
    }
}

/// Eigenvalues (ascending) and matching orthonormal eigenvector columns.
#[derive(Clone, Debug)]
pub struct HermitianEigenResult {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

impl HermitianEigenResult {
    /// V·diag(λ)·V†.
    pub fn reconstruct(&self) -> Result<ComplexMatrix> {
        let lam = ComplexMatrix::diag_real(&self.eigenvalues)?;
        self.eigenvectors
            .matmul(&lam)?
            .matmul(&self.eigenvectors.adjoint())
    }

    /// V·diag(f(λ))·V†.
    pub fn map_eigenvalues<F: Fn(f64) -> f64>(&self, f: F) -> Result<ComplexMatrix> {
        let mapped: Vec<f64> = self.eigenvalues.iter().map(|&x| f(x)).collect();
        let lam = ComplexMatrix::diag_real(&mapped)?;
        self.eigenvectors
            .matmul(&lam)?
            .matmul(&self.eigenvectors.adjoint())
    }

    /// Principal inverse square root; every eigenvalue must exceed `floor`.
    pub fn inverse_sqrt(&self, floor: f64) -> Result<ComplexMatrix> {
        if let Some(&bad) = self.eigenvalues.iter().find(|&&x| x <= floor) {
            return Err(Error::Singular { value: bad });
        }
        self.map_eigenvalues(|x| 1.0 / x.sqrt())
    }
}

fn check_dims(rows: usize, cols: usize) -> Result<()> {
    if rows == 0 || cols == 0 {
        return Err(Error::EmptyMatrix);
    }
    if rows > MAX_DIM || cols > MAX_DIM {
        return Err(Error::DimensionTooLarge(rows.max(cols)));
    }
    Ok(())
}

/// ⟨u|v⟩ = Σ conj(u_i)·v_i.
pub fn inner(u: &[Complex64], v: &[Complex64]) -> Complex64 {
    u.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
}

/// Euclidean norm of a complex vector.
pub fn vec_norm(u: &[Complex64]) -> f64 {
    u.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}
