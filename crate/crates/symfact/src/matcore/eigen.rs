//! Spectral decomposition of unitary matrices.
//!
//! A unitary `U` is normal, so it is diagonalized by the joint eigenbasis of
//! the commuting Hermitian pair `A = (U + U*)/2` and `B = (U - U*)/(2i)`.
//! We diagonalize `A`, then rediagonalize `B` restricted to each cluster of
//! near-equal `A`-eigenvalues; the cluster width is retried over a small
//! ladder until the reconstruction residual meets `verify_tol`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use std::f64::consts::TAU;

use super::{ComplexMatrix, MatError, Tolerance};

pub(crate) fn to_na(m: &ComplexMatrix) -> DMatrix<Complex64> {
    DMatrix::from_fn(m.dim(), m.dim(), |i, j| m[(i, j)])
}

/// Eigenbasis and unit-circle eigenvalues of a unitary matrix.
///
/// Columns of `basis` are orthonormal; `eigenvalues[j]` has unit modulus and
/// belongs to column `j`. Pairs are sorted by principal argument in
/// `[0, 2π)`, ties broken by the lexicographic order of the
/// phase-canonicalized eigenvector entries.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    basis: ComplexMatrix,
    eigenvalues: Vec<Complex64>,
}

impl SpectralDecomposition {
    pub fn basis(&self) -> &ComplexMatrix {
        &self.basis
    }

    pub fn eigenvalues(&self) -> &[Complex64] {
        &self.eigenvalues
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// `Q · diag(λ) · Q*`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        ComplexMatrix::diagonal(&self.eigenvalues).conjugate_by(&self.basis)
    }

    /// `‖U Q − Q diag(λ)‖`.
    pub fn residual_for(&self, u: &ComplexMatrix) -> f64 {
        let uq = u * &self.basis;
        let qd = &self.basis * &ComplexMatrix::diagonal(&self.eigenvalues);
        (&uq - &qd).operator_norm()
    }

    /// Groups indices whose eigenvalues agree within `cluster_tol`
    /// (chordal distance, chained along the sorted circle, with wraparound).
    pub fn cluster_indices(&self, cluster_tol: f64) -> Vec<Vec<usize>> {
        let n = self.eigenvalues.len();
        let mut clusters: Vec<Vec<usize>> = Vec::new();
        for j in 0..n {
            let joinable = clusters.last().is_some_and(|c| {
                let prev = self.eigenvalues[*c.last().unwrap()];
                (self.eigenvalues[j] - prev).norm() <= cluster_tol
            });
            if joinable {
                clusters.last_mut().unwrap().push(j);
            } else {
                clusters.push(vec![j]);
            }
        }
        // The circle wraps: the last cluster may continue into the first.
        if clusters.len() > 1 {
            let first = self.eigenvalues[clusters[0][0]];
            let last = self.eigenvalues[*clusters.last().unwrap().last().unwrap()];
            if (first - last).norm() <= cluster_tol {
                let tail = clusters.pop().unwrap();
                let mut merged = tail;
                merged.extend(clusters[0].iter().copied());
                clusters[0] = merged;
            }
        }
        clusters
    }

    /// Snaps every cluster of eigenvalues (within `cluster_tol`) to a common
    /// representative value, then restores the sort order.
    pub fn clustered(&self, cluster_tol: f64) -> SpectralDecomposition {
        let mut eigenvalues = self.eigenvalues.clone();
        for cluster in self.cluster_indices(cluster_tol) {
            let mean: Complex64 = cluster.iter().map(|&j| eigenvalues[j]).sum();
            let rep = if mean.norm() > 0.0 {
                mean / mean.norm()
            } else {
                eigenvalues[cluster[0]]
            };
            for &j in &cluster {
                eigenvalues[j] = rep;
            }
        }
        let mut out = SpectralDecomposition {
            basis: self.basis.clone(),
            eigenvalues,
        };
        out.sort_canonically();
        out
    }

    fn sort_canonically(&mut self) {
        let n = self.eigenvalues.len();
        let mut cols: Vec<Vec<Complex64>> = (0..n)
            .map(|j| canonical_phase(self.basis.column(j)))
            .collect();
        let mut order: Vec<usize> = (0..n).collect();
        let args: Vec<f64> = self.eigenvalues.iter().map(|z| principal_arg(*z)).collect();
        order.sort_by(|&a, &b| {
            args[a]
                .partial_cmp(&args[b])
                .unwrap()
                .then_with(|| lex_cmp(&cols[a], &cols[b]))
        });
        self.eigenvalues = order.iter().map(|&j| self.eigenvalues[j]).collect();
        cols = order.iter().map(|&j| cols[j].clone()).collect();
        self.basis = ComplexMatrix::from_columns(&cols);
    }
}

/// Argument mapped to `[0, 2π)`.
pub fn principal_arg(z: Complex64) -> f64 {
    let a = z.arg();
    if a < 0.0 {
        let b = a + TAU;
        // Guard against -eps wrapping to exactly 2π.
        if b >= TAU {
            0.0
        } else {
            b
        }
    } else {
        a
    }
}

/// Rotates a vector so its largest-modulus entry is real positive.
fn canonical_phase(mut v: Vec<Complex64>) -> Vec<Complex64> {
    let mut pivot = 0;
    for (i, z) in v.iter().enumerate() {
        if z.norm() > v[pivot].norm() {
            pivot = i;
        }
    }
    let z = v[pivot];
    if z.norm() > 0.0 {
        let phase = z.conj() / z.norm();
        for w in v.iter_mut() {
            *w *= phase;
        }
    }
    v
}

fn lex_cmp(a: &[Complex64], b: &[Complex64]) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b.iter()) {
        match x.re.partial_cmp(&y.re).unwrap() {
            std::cmp::Ordering::Equal => {}
            ord => return ord,
        }
        match x.im.partial_cmp(&y.im).unwrap() {
            std::cmp::Ordering::Equal => {}
            ord => return ord,
        }
    }
    std::cmp::Ordering::Equal
}

/// Full eigendecomposition of a Hermitian matrix, eigenvalues ascending.
pub(crate) fn hermitian_eigen(m: &ComplexMatrix) -> (ComplexMatrix, Vec<f64>) {
    // Symmetrize to absorb rounding in the caller's arithmetic.
    let sym = &(m + &m.adjoint()).scale(Complex64::new(0.5, 0.0));
    let se = nalgebra::SymmetricEigen::try_new(to_na(sym), f64::EPSILON, 0)
        .expect("unbounded QL iteration converges");
    let n = m.dim();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| se.eigenvalues[a].partial_cmp(&se.eigenvalues[b]).unwrap());
    let vals: Vec<f64> = order.iter().map(|&j| se.eigenvalues[j]).collect();
    let q = ComplexMatrix::from_fn(n, |i, j| se.eigenvectors[(i, order[j])]);
    (q, vals)
}

/// Largest eigenvalue of a Hermitian matrix.
pub(crate) fn hermitian_eigen_max(m: &ComplexMatrix) -> f64 {
    let (_, vals) = hermitian_eigen(m);
    vals.last().copied().unwrap_or(0.0)
}

pub(crate) fn spectral_decompose(
    u: &ComplexMatrix,
    tol: &Tolerance,
) -> Result<SpectralDecomposition, MatError> {
    let defect = u.unitary_defect();
    if defect > tol.unitary_tol {
        return Err(MatError::NotUnitary {
            defect,
            tol: tol.unitary_tol,
        });
    }

    let mut best: Option<(f64, SpectralDecomposition)> = None;
    for tau in [1e-9, 1e-7, 1e-12, 1e-5] {
        let sd = joint_diagonalize(u, tau);
        let residual = sd.residual_for(u);
        if best.as_ref().is_none_or(|(r, _)| residual < *r) {
            best = Some((residual, sd));
        }
        if best.as_ref().unwrap().0 <= tol.verify_tol {
            break;
        }
    }
    let (residual, mut sd) = best.unwrap();
    if residual > tol.verify_tol {
        return Err(MatError::ConvergenceFailure {
            residual,
            tol: tol.verify_tol,
        });
    }
    sd.sort_canonically();
    Ok(sd)
}

/// One pass of the two-stage joint diagonalization with real-part cluster
/// width `tau`.
fn joint_diagonalize(u: &ComplexMatrix, tau: f64) -> SpectralDecomposition {
    let n = u.dim();
    let ustar = u.adjoint();
    let half = Complex64::new(0.5, 0.0);
    let neg_half_i = Complex64::new(0.0, -0.5);
    let a = (u + &ustar).scale(half);
    let b = (u - &ustar).scale(neg_half_i);

    let (mut q, avals) = hermitian_eigen(&a);

    // Chain near-equal A-eigenvalues; B separates conjugate partners inside.
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && avals[end] - avals[end - 1] <= tau {
            end += 1;
        }
        if end - start > 1 {
            let cols: Vec<Vec<Complex64>> = (start..end).map(|j| q.column(j)).collect();
            let bcols: Vec<Vec<Complex64>> = cols.iter().map(|c| mat_vec(&b, c)).collect();
            let k = end - start;
            let proj = ComplexMatrix::from_fn(k, |r, c| {
                (0..n).map(|i| cols[r][i].conj() * bcols[c][i]).sum()
            });
            let (v, _) = hermitian_eigen(&proj);
            for (jj, col_new) in (start..end).enumerate() {
                let mut col = vec![Complex64::ZERO; n];
                for (rr, base) in cols.iter().enumerate() {
                    let w = v[(rr, jj)];
                    for i in 0..n {
                        col[i] += base[i] * w;
                    }
                }
                for i in 0..n {
                    q[(i, col_new)] = col[i];
                }
            }
        }
        start = end;
    }

    // Rayleigh quotients, normalized onto the circle.
    let eigenvalues: Vec<Complex64> = (0..n)
        .map(|j| {
            let col = q.column(j);
            let ucol = mat_vec(u, &col);
            let lam: Complex64 = col.iter().zip(ucol.iter()).map(|(c, w)| c.conj() * w).sum();
            let r = lam.norm();
            if r > 0.0 {
                lam / r
            } else {
                Complex64::ONE
            }
        })
        .collect();

    SpectralDecomposition {
        basis: q,
        eigenvalues,
    }
}

fn mat_vec(m: &ComplexMatrix, v: &[Complex64]) -> Vec<Complex64> {
    let n = v.len();
    (0..n)
        .map(|i| (0..n).map(|k| m[(i, k)] * v[k]).sum())
        .collect()
}
