//! Two-symmetry constructions: the conjugate-pair block identity, the
//! spectral two-symmetry factorization, and the intertwiner-to-symmetry
//! construction.

use num_complex::Complex64;

use crate::matcore::{ComplexMatrix, MatError, Tolerance};

use super::pairing::{conjugation_pairing, PairingOutcome};
use super::{FactorError, FactorizationCertificate, Method};

fn require_unitary(m: &ComplexMatrix, tol: &Tolerance) -> Result<(), FactorError> {
    let defect = m.unitary_defect();
    if defect > tol.unitary_tol {
        return Err(MatError::NotUnitary {
            defect,
            tol: tol.unitary_tol,
        }
        .into());
    }
    Ok(())
}

/// The block identity `diag(A, A*) = [[0, I], [I, 0]] · [[0, A*], [A, 0]]`.
///
/// Returns a two-factor certificate of dimension `2m` for an `m`-dimensional
/// unitary `A`.
pub fn conjugate_pair_two_factor(
    a: &ComplexMatrix,
    tol: &Tolerance,
) -> Result<FactorizationCertificate, FactorError> {
    require_unitary(a, tol)?;
    let m = a.dim();
    let zero = ComplexMatrix::zeros(m);
    let eye = ComplexMatrix::identity(m);
    let astar = a.adjoint();
    let target = ComplexMatrix::block_diag(&[a.clone(), astar.clone()]);
    let swap = ComplexMatrix::from_blocks_2x2(&zero, &eye, &eye, &zero);
    let twisted = ComplexMatrix::from_blocks_2x2(&zero, &astar, a, &zero);
    FactorizationCertificate::assemble(target, vec![swap, twisted], Method::ConjugatePair, tol)
}

/// 2x2 symmetry pair multiplying to `diag(μ, conj μ)` for unit-modulus `μ`.
fn pair_blocks(mu: Complex64) -> (ComplexMatrix, ComplexMatrix) {
    let swap = ComplexMatrix::from_fn(2, |i, j| {
        if i != j {
            Complex64::ONE
        } else {
            Complex64::ZERO
        }
    });
    let mut twisted = ComplexMatrix::zeros(2);
    twisted[(0, 1)] = mu.conj();
    twisted[(1, 0)] = mu;
    (swap, twisted)
}

/// Factors `U = S T` into two symmetries when the eigenvalue multiset of `U`
/// is closed under complex conjugation (within `cluster_tol`); otherwise
/// reports the unmatched eigenvalue.
pub fn two_symmetry_factor(
    u: &ComplexMatrix,
    tol: &Tolerance,
) -> Result<FactorizationCertificate, FactorError> {
    let sd = u.spectral_decompose(tol)?;
    let pairing = match conjugation_pairing(sd.eigenvalues(), tol.cluster_tol) {
        PairingOutcome::Paired(p) => p,
        PairingOutcome::Unmatched {
            eigenvalue, margin, ..
        } => {
            return Err(FactorError::SpectrumNotConjSymmetric { eigenvalue, margin });
        }
    };

    // Reorder the eigenbasis so conjugate partners sit side by side.
    let mut order: Vec<usize> = Vec::with_capacity(u.dim());
    let mut s_blocks: Vec<ComplexMatrix> = Vec::new();
    let mut t_blocks: Vec<ComplexMatrix> = Vec::new();
    for &(i, j) in &pairing.pairs {
        order.push(i);
        order.push(j);
        // Spread the pairing slack evenly across the pair.
        let mid = sd.eigenvalues()[i] + sd.eigenvalues()[j].conj();
        let mu = if mid.norm() > 0.0 {
            mid / mid.norm()
        } else {
            sd.eigenvalues()[i]
        };
        let (s, t) = pair_blocks(mu);
        s_blocks.push(s);
        t_blocks.push(t);
    }
    for &i in &pairing.self_paired {
        order.push(i);
        let sign = if sd.eigenvalues()[i].re >= 0.0 {
            Complex64::ONE
        } else {
            -Complex64::ONE
        };
        s_blocks.push(ComplexMatrix::diagonal(&[sign]));
        t_blocks.push(ComplexMatrix::identity(1));
    }

    let cols: Vec<Vec<Complex64>> = order.iter().map(|&j| sd.basis().column(j)).collect();
    let basis = ComplexMatrix::from_columns(&cols);
    let s = ComplexMatrix::block_diag(&s_blocks).conjugate_by(&basis);
    let t = ComplexMatrix::block_diag(&t_blocks).conjugate_by(&basis);
    FactorizationCertificate::assemble(u.clone(), vec![s, t], Method::TwoSymmetry, tol)
}

/// Given unitaries `U`, `W` with `W* U W = U*`, produces a symmetry `S` with
/// `U S = S U*`; `US` is then also a symmetry and `U = (US) · S` is a
/// two-symmetry factorization.
///
/// `S = V* W` where `V = exp(πiH)` and `W² = exp(2πiH)`; `H` is read off the
/// clustered spectrum of `W²` with eigenvalue arguments taken in `[0, 2π)`.
pub fn intertwiner_to_symmetry(
    u: &ComplexMatrix,
    w: &ComplexMatrix,
    tol: &Tolerance,
) -> Result<ComplexMatrix, FactorError> {
    require_unitary(u, tol)?;
    require_unitary(w, tol)?;
    let defect = (&(&(&w.adjoint() * u) * w) - &u.adjoint()).operator_norm();
    if defect > tol.verify_tol {
        return Err(FactorError::NotIntertwiner { defect });
    }

    let w2 = w * w;
    let sd = w2.spectral_decompose(tol)?.clustered(tol.cluster_tol);
    let half_roots: Vec<Complex64> = sd
        .eigenvalues()
        .iter()
        .map(|mu| Complex64::from_polar(1.0, crate::matcore::principal_arg(*mu) / 2.0))
        .collect();
    let v = ComplexMatrix::diagonal(&half_roots).conjugate_by(sd.basis());
    let s = &v.adjoint() * w;

    if !s.is_symmetry(tol) {
        let residual = (&s - &s.adjoint())
            .operator_norm()
            .max((&(&s * &s) - &ComplexMatrix::identity(s.dim())).operator_norm());
        return Err(MatError::ConvergenceFailure {
            residual,
            tol: tol.unitary_tol,
        }
        .into());
    }
    let post = (&(u * &s) - &(&s * &u.adjoint())).operator_norm();
    if post > tol.verify_tol {
        return Err(MatError::ConvergenceFailure {
            residual: post,
            tol: tol.verify_tol,
        }
        .into());
    }
    Ok(s)
}
