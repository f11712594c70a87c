//! Dense complex operators on finite Hilbert spaces.
//!
//! Thin wrapper around `nalgebra::DMatrix<Complex<f64>>` with the handful of
//! constructions the rest of the crate needs: Kronecker products, Hermitian
//! eigendecompositions, PSD square roots, and unitarity checks.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{QError, Result};

/// A square complex matrix acting on a finite-dimensional Hilbert space.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    mat: DMatrix<Complex64>,
}

impl Operator {
    /// Wraps a square matrix. Panics if the matrix is not square.
    pub fn from_matrix(mat: DMatrix<Complex64>) -> Self {
        assert_eq!(mat.nrows(), mat.ncols(), "operator must be square");
        Self { mat }
    }

    /// Builds an operator from a row-major list of entries.
    pub fn from_rows(dim: usize, entries: &[Complex64]) -> Self {
        assert_eq!(entries.len(), dim * dim);
        Self {
            mat: DMatrix::from_row_slice(dim, dim, entries),
        }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            mat: DMatrix::zeros(dim, dim),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            mat: DMatrix::identity(dim, dim),
        }
    }

    /// |k⟩⟨k| in the computational basis.
    pub fn basis_projector(dim: usize, k: usize) -> Self {
        let mut m = DMatrix::zeros(dim, dim);
        m[(k, k)] = Complex64::new(1.0, 0.0);
        Self { mat: m }
    }

    /// |ψ⟩⟨ψ| for an (unnormalized-tolerant) state vector; normalizes first.
    pub fn ket_projector(amplitudes: &[Complex64]) -> Self {
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        let dim = amplitudes.len();
        let mut m = DMatrix::zeros(dim, dim);
        for i in 0..dim {
            for j in 0..dim {
                m[(i, j)] = (amplitudes[i] / norm) * (amplitudes[j] / norm).conj();
            }
        }
        Self { mat: m }
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.mat
    }

    pub fn into_matrix(self) -> DMatrix<Complex64> {
        self.mat
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.mat[(i, j)]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.mat[(i, j)] = v;
    }

    pub fn trace(&self) -> Complex64 {
        self.mat.trace()
    }

    pub fn adjoint(&self) -> Self {
        Self {
            mat: self.mat.adjoint(),
        }
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            mat: &self.mat * Complex64::new(s, 0.0),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            mat: &self.mat + &other.mat,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self {
            mat: &self.mat - &other.mat,
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self {
            mat: &self.mat * &other.mat,
        }
    }

    /// A M A†.
    pub fn conjugate_by(&self, a: &Self) -> Self {
        Self {
            mat: &a.mat * &self.mat * a.mat.adjoint(),
        }
    }

    /// Largest entrywise magnitude of self - other.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (&self.mat - &other.mat)
            .iter()
            .map(|c| c.norm())
            .fold(0.0, f64::max)
    }

    /// Largest entrywise magnitude.
    pub fn max_abs(&self) -> f64 {
        self.mat.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise magnitude of M - M†.
    pub fn hermiticity_defect(&self) -> f64 {
        self.max_abs_diff(&self.adjoint())
    }

    /// Largest entrywise magnitude of UU† - I.
    pub fn unitarity_defect(&self) -> f64 {
        let uud = &self.mat * self.mat.adjoint();
        let id = DMatrix::<Complex64>::identity(self.dim(), self.dim());
        (uud - id).iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// (M + M†)/2. Eigenvalue routines operate on this to suppress
    /// spurious imaginary parts from roundoff.
    pub fn hermitize(&self) -> Self {
        Self {
            mat: (&self.mat + self.mat.adjoint()).scale(0.5),
        }
    }

    /// Kronecker product; block (i,j) of the result is self[i,j] * other.
    pub fn kron(&self, other: &Self) -> Self {
        Self {
            mat: self.mat.kronecker(&other.mat),
        }
    }

    /// Eigenvalues of the Hermitized operator, ascending.
    pub fn eigenvalues_hermitian(&self) -> Vec<f64> {
        let eig = self.hermitize().mat.symmetric_eigen();
        let mut vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
        vals
    }

    /// Full Hermitian eigendecomposition: (eigenvalues, unitary of eigenvectors
    /// as columns), in the order nalgebra returns them.
    pub fn eigendecomposition_hermitian(&self) -> (Vec<f64>, Operator) {
        let eig = self.hermitize().mat.symmetric_eigen();
        let vals = eig.eigenvalues.iter().copied().collect();
        (vals, Operator::from_matrix(eig.eigenvectors))
    }

    /// Principal square root of a Hermitian PSD operator. Eigenvalues in
    /// [-tol, 0] are clamped to zero; more negative ones are an error.
    pub fn sqrt_psd(&self, tol: f64) -> Result<Self> {
        let (vals, vecs) = self.eigendecomposition_hermitian();
        if let Some(&min) = vals
            .iter()
            .filter(|v| **v < -tol)
            .min_by(|a, b| a.partial_cmp(b).unwrap())
        {
            return Err(QError::NotPositive {
                min_eigenvalue: min,
            });
        }
        let dim = self.dim();
        let mut d = DMatrix::<Complex64>::zeros(dim, dim);
        for (k, v) in vals.iter().enumerate() {
            d[(k, k)] = Complex64::new(v.max(0.0).sqrt(), 0.0);
        }
        let v = vecs.into_matrix();
        Ok(Self {
            mat: &v * d * v.adjoint(),
        })
    }

    /// exp(iH) for Hermitian H, via eigendecomposition.
    pub fn expi_hermitian(&self) -> Self {
        let (vals, vecs) = self.eigendecomposition_hermitian();
        let dim = self.dim();
        let mut d = DMatrix::<Complex64>::zeros(dim, dim);
        for (k, v) in vals.iter().enumerate() {
            d[(k, k)] = Complex64::new(0.0, *v).exp();
        }
        let v = vecs.into_matrix();
        Self {
            mat: &v * d * v.adjoint(),
        }
    }
}
