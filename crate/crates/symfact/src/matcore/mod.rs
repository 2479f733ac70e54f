//! Dense complex matrices, unitary/symmetry predicates, spectral
//! decomposition of unitaries, and seeded random unitary generation.

pub(crate) mod eigen;
mod random;

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;
use serde::de::Error as _;
use serde::ser::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

pub use eigen::{principal_arg, SpectralDecomposition};
pub use random::{haar_random_unitary, DetMode};

/// Errors raised by matrix construction and the spectral kernels.
#[derive(Debug, Clone, thiserror::Error)]
pub enum MatError {
    #[error("matrix dimension must be positive")]
    ZeroDim,
    #[error("entry count {len} does not match a {dim}x{dim} matrix")]
    EntryCount { dim: usize, len: usize },
    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
    #[error("dimension mismatch: {left} vs {right}")]
    DimMismatch { left: usize, right: usize },
    #[error("matrix is not unitary: defect {defect:.3e} exceeds tolerance {tol:.3e}")]
    NotUnitary { defect: f64, tol: f64 },
    #[error("spectral decomposition residual {residual:.3e} exceeds tolerance {tol:.3e}")]
    ConvergenceFailure { residual: f64, tol: f64 },
    #[error("tolerances must be non-negative")]
    NegativeTolerance,
}

/// Tolerance bundle threaded through every numerical predicate.
///
/// `unitary_tol` gates structural predicates (`is_unitary`, `is_symmetry`),
/// `verify_tol` gates reconstruction residuals, and `cluster_tol` decides
/// when two eigenvalues are treated as equal.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub unitary_tol: f64,
    pub verify_tol: f64,
    pub cluster_tol: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            unitary_tol: 1e-10,
            verify_tol: 1e-8,
            cluster_tol: 1e-9,
        }
    }
}

impl Tolerance {
    pub fn new(unitary_tol: f64, verify_tol: f64, cluster_tol: f64) -> Result<Self, MatError> {
        if unitary_tol < 0.0 || verify_tol < 0.0 || cluster_tol < 0.0 {
            return Err(MatError::NegativeTolerance);
        }
        Ok(Tolerance {
            unitary_tol,
            verify_tol,
            cluster_tol,
        })
    }

    /// Default tolerances with `verify_tol` replaced.
    pub fn with_verify_tol(verify_tol: f64) -> Self {
        Tolerance {
            verify_tol,
            ..Tolerance::default()
        }
    }
}

/// Dense square complex matrix, row-major storage.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    entries: Vec<Complex64>,
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix(dim={})", self.dim)?;
        for i in 0..self.dim {
            write!(f, "  [")?;
            for j in 0..self.dim {
                let z = self[(i, j)];
                write!(f, " {:+.4}{:+.4}i", z.re, z.im)?;
            }
            writeln!(f, " ]")?;
        }
        Ok(())
    }
}

impl ComplexMatrix {
    /// Builds a matrix from row-major entries, validating shape and finiteness.
    pub fn new(dim: usize, entries: Vec<Complex64>) -> Result<Self, MatError> {
        if dim == 0 {
            return Err(MatError::ZeroDim);
        }
        if entries.len() != dim * dim {
            return Err(MatError::EntryCount {
                dim,
                len: entries.len(),
            });
        }
        for (k, z) in entries.iter().enumerate() {
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(MatError::NonFinite {
                    row: k / dim,
                    col: k % dim,
                });
            }
        }
        Ok(ComplexMatrix { dim, entries })
    }

    pub fn zeros(dim: usize) -> Self {
        assert!(dim > 0, "dimension must be positive");
        ComplexMatrix {
            dim,
            entries: vec![Complex64::ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = ComplexMatrix::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = Complex64::ONE;
        }
        m
    }

    /// Scalar multiple of the identity.
    pub fn scalar(dim: usize, z: Complex64) -> Self {
        let mut m = ComplexMatrix::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = z;
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = ComplexMatrix::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn diagonal(values: &[Complex64]) -> Self {
        let mut m = ComplexMatrix::zeros(values.len());
        for (i, z) in values.iter().enumerate() {
            m[(i, i)] = *z;
        }
        m
    }

    /// Direct sum of square blocks along the diagonal.
    pub fn block_diag(blocks: &[ComplexMatrix]) -> Self {
        let dim: usize = blocks.iter().map(|b| b.dim).sum();
        let mut m = ComplexMatrix::zeros(dim);
        let mut off = 0;
        for b in blocks {
            for i in 0..b.dim {
                for j in 0..b.dim {
                    m[(off + i, off + j)] = b[(i, j)];
                }
            }
            off += b.dim;
        }
        m
    }

    /// 2x2 block matrix [[a, b], [c, d]] of equal-size square blocks.
    pub fn from_blocks_2x2(
        a: &ComplexMatrix,
        b: &ComplexMatrix,
        c: &ComplexMatrix,
        d: &ComplexMatrix,
    ) -> Self {
        let m = a.dim;
        assert!(
            b.dim == m && c.dim == m && d.dim == m,
            "blocks must share dimensions"
        );
        ComplexMatrix::from_fn(2 * m, |i, j| match (i < m, j < m) {
            (true, true) => a[(i, j)],
            (true, false) => b[(i, j - m)],
            (false, true) => c[(i - m, j)],
            (false, false) => d[(i - m, j - m)],
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn adjoint(&self) -> Self {
        ComplexMatrix::from_fn(self.dim, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        ComplexMatrix::from_fn(self.dim, |i, j| self[(j, i)])
    }

    pub fn conj_entrywise(&self) -> Self {
        ComplexMatrix::from_fn(self.dim, |i, j| self[(i, j)].conj())
    }

    pub fn scale(&self, z: Complex64) -> Self {
        ComplexMatrix {
            dim: self.dim,
            entries: self.entries.iter().map(|w| w * z).collect(),
        }
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    /// Left-to-right product of a factor list. Panics on an empty list.
    pub fn product_of(factors: &[ComplexMatrix]) -> ComplexMatrix {
        let (first, rest) = factors.split_first().expect("product of empty factor list");
        rest.iter().fold(first.clone(), |acc, f| &acc * f)
    }

    /// `q * self * q.adjoint()`.
    pub fn conjugate_by(&self, q: &ComplexMatrix) -> Self {
        &(q * self) * &q.adjoint()
    }

    /// Column `j` as a vector of length `dim`.
    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.dim).map(|i| self[(i, j)]).collect()
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(cols: &[Vec<Complex64>]) -> Self {
        let dim = cols.len();
        assert!(cols.iter().all(|c| c.len() == dim), "columns must be square");
        ComplexMatrix::from_fn(dim, |i, j| cols[j][i])
    }

    /// Largest entrywise absolute difference; convenient for exactness tests.
    pub fn max_abs_diff(&self, other: &ComplexMatrix) -> f64 {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        self.entries
            .iter()
            .zip(other.entries.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Operator norm (largest singular value), from the Hermitian
    /// eigenproblem of `A* A`.
    pub fn operator_norm(&self) -> f64 {
        let gram = &self.adjoint() * self;
        let top = eigen::hermitian_eigen_max(&gram);
        top.max(0.0).sqrt()
    }

    /// True iff `‖A*A − I‖ ≤ unitary_tol`.
    pub fn is_unitary(&self, tol: &Tolerance) -> bool {
        self.unitary_defect() <= tol.unitary_tol
    }

    /// `‖A*A − I‖`.
    pub fn unitary_defect(&self) -> f64 {
        let gram = &self.adjoint() * self;
        (&gram - &ComplexMatrix::identity(self.dim)).operator_norm()
    }

    /// True iff self-adjoint and involutive within `unitary_tol`.
    pub fn is_symmetry(&self, tol: &Tolerance) -> bool {
        let sa = (self - &self.adjoint()).operator_norm();
        if sa > tol.unitary_tol {
            return false;
        }
        let inv = (&(self * self) - &ComplexMatrix::identity(self.dim)).operator_norm();
        inv <= tol.unitary_tol
    }

    /// True iff self-adjoint and idempotent within `unitary_tol`.
    pub fn is_projection(&self, tol: &Tolerance) -> bool {
        let sa = (self - &self.adjoint()).operator_norm();
        if sa > tol.unitary_tol {
            return false;
        }
        let idem = (&(self * self) - self).operator_norm();
        idem <= tol.unitary_tol
    }

    /// Determinant via pivoted LU. Unitary inputs are renormalized to unit
    /// modulus so downstream phase arithmetic stays on the circle.
    pub fn determinant(&self) -> Complex64 {
        let det = eigen::to_na(self).lu().determinant();
        if self.is_unitary(&Tolerance::default()) {
            let r = det.norm();
            if r > 0.0 {
                return det / r;
            }
        }
        det
    }

    /// Spectral decomposition of a unitary matrix.
    pub fn spectral_decompose(&self, tol: &Tolerance) -> Result<SpectralDecomposition, MatError> {
        eigen::spectral_decompose(self, tol)
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.entries[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.entries[i * self.dim + j]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in product");
        let n = self.dim;
        let mut out = ComplexMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == Complex64::ZERO {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] += a * rhs[(k, j)];
                }
            }
        }
        out
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in sum");
        ComplexMatrix {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .zip(rhs.entries.iter())
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in difference");
        ComplexMatrix {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .zip(rhs.entries.iter())
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

// Wire format: {"rows": n, "cols": n, "data": [[re, im], ...]} row-major.
#[derive(Serialize, Deserialize)]
struct MatrixWire {
    rows: usize,
    cols: usize,
    data: Vec<[f64; 2]>,
}

impl Serialize for ComplexMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        for (k, z) in self.entries.iter().enumerate() {
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(S::Error::custom(format!(
                    "non-finite entry at ({}, {})",
                    k / self.dim,
                    k % self.dim
                )));
            }
        }
        MatrixWire {
            rows: self.dim,
            cols: self.dim,
            data: self.entries.iter().map(|z| [z.re, z.im]).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ComplexMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let wire = MatrixWire::deserialize(deserializer)?;
        if wire.rows != wire.cols {
            return Err(D::Error::custom(format!(
                "matrix must be square, got {}x{}",
                wire.rows, wire.cols
            )));
        }
        let entries: Vec<Complex64> = wire
            .data
            .iter()
            .map(|&[re, im]| Complex64::new(re, im))
            .collect();
        ComplexMatrix::new(wire.rows, entries).map_err(D::Error::custom)
    }
}
