//! Four-symmetry factorization of a unitary with determinant ±1.
//!
//! After diagonalizing `U = Q diag(λ) Q*` and snapping the eigenvalue
//! product onto the determinant sign, the diagonal splits as `V·W` where
//! `V` carries the odd prefix products paired with their conjugates and `W`
//! carries the even ones. Every conjugate pair is a product of two
//! symmetries via the swap-block identity, and the stray 1x1 entries are
//! the central signs 1 and det(U).

use num_complex::Complex64;

use crate::matcore::{ComplexMatrix, MatError, Tolerance};

use super::{FactorError, FactorizationCertificate, Method};

/// `(det, sign, distance)` where `distance = min(|det−1|, |det+1|)` and
/// `sign` is the nearer of ±1.
pub fn det_distance_to_sign(u: &ComplexMatrix) -> (Complex64, f64, f64) {
    let det = u.determinant();
    let d_plus = (det - Complex64::ONE).norm();
    let d_minus = (det + Complex64::ONE).norm();
    if d_plus <= d_minus {
        (det, 1.0, d_plus)
    } else {
        (det, -1.0, d_minus)
    }
}

/// Diagonal entry layout for the prefix-product unitaries: adjacent
/// conjugate pairs and stray ±1 singles.
enum DiagEntry {
    Pair(Complex64),
    Single(f64),
}

/// Splits a diagonal of pairs and signs into two block-diagonal symmetries.
fn diag_into_two_symmetries(entries: &[DiagEntry]) -> (ComplexMatrix, ComplexMatrix) {
    let dim: usize = entries
        .iter()
        .map(|e| match e {
            DiagEntry::Pair(_) => 2,
            DiagEntry::Single(_) => 1,
        })
        .sum();
    let mut s = ComplexMatrix::zeros(dim);
    let mut t = ComplexMatrix::zeros(dim);
    let mut off = 0;
    for e in entries {
        match e {
            DiagEntry::Pair(mu) => {
                s[(off, off + 1)] = Complex64::ONE;
                s[(off + 1, off)] = Complex64::ONE;
                t[(off, off + 1)] = mu.conj();
                t[(off + 1, off)] = *mu;
                off += 2;
            }
            DiagEntry::Single(sign) => {
                s[(off, off)] = Complex64::new(*sign, 0.0);
                t[(off, off)] = Complex64::ONE;
                off += 1;
            }
        }
    }
    (s, t)
}

/// Factors a unitary with determinant ±1 (within `verify_tol`) into four
/// symmetries; otherwise reports the determinant obstruction.
pub fn radjavi_four_factor(
    u: &ComplexMatrix,
    tol: &Tolerance,
) -> Result<FactorizationCertificate, FactorError> {
    let defect = u.unitary_defect();
    if defect > tol.unitary_tol {
        return Err(MatError::NotUnitary {
            defect,
            tol: tol.unitary_tol,
        }
        .into());
    }
    let (det, sign, distance) = det_distance_to_sign(u);
    if distance > tol.verify_tol {
        return Err(FactorError::DeterminantObstruction { det, distance });
    }

    let sd = u.spectral_decompose(tol)?;
    let n = u.dim();

    // Distribute the residual determinant phase uniformly so the final
    // prefix product is exactly the sign; this perturbs U by at most |φ|/n.
    let product: Complex64 = sd
        .eigenvalues()
        .iter()
        .fold(Complex64::ONE, |acc, lam| normalize(acc * lam));
    let target_sign = Complex64::new(sign, 0.0);
    let phi = (product / target_sign).arg();
    let correction = Complex64::from_polar(1.0, -phi / n as f64);
    let lambda: Vec<Complex64> = sd
        .eigenvalues()
        .iter()
        .map(|lam| normalize(lam * correction))
        .collect();

    let mut prefix = Vec::with_capacity(n + 1);
    prefix.push(Complex64::ONE);
    for lam in &lambda {
        let next = normalize(prefix.last().unwrap() * lam);
        prefix.push(next);
    }
    // The full product is the sign by construction; pin it exactly.
    prefix[n] = target_sign;

    // V = diag(P1, P1*, P3, P3*, ...), closing with the single P_n when n is
    // odd; W = diag(1, P2, P2*, P4, P4*, ...), closing with P_n when n is even.
    let mut v_entries: Vec<DiagEntry> = Vec::new();
    let mut k = 1;
    while k + 1 < n {
        v_entries.push(DiagEntry::Pair(prefix[k]));
        k += 2;
    }
    if n % 2 == 1 {
        v_entries.push(DiagEntry::Single(sign));
    } else if k < n {
        // k == n - 1: the last odd prefix still pairs inside V.
        v_entries.push(DiagEntry::Pair(prefix[n - 1]));
    }

    let mut w_entries: Vec<DiagEntry> = vec![DiagEntry::Single(1.0)];
    let mut k = 2;
    while k + 1 < n {
        w_entries.push(DiagEntry::Pair(prefix[k]));
        k += 2;
    }
    if n.is_multiple_of(2) && n >= 2 {
        w_entries.push(DiagEntry::Single(sign));
    } else if k < n {
        w_entries.push(DiagEntry::Pair(prefix[n - 1]));
    }

    let (sv, tv) = diag_into_two_symmetries(&v_entries);
    let (sw, tw) = diag_into_two_symmetries(&w_entries);
    debug_assert_eq!(sv.dim(), n);
    debug_assert_eq!(sw.dim(), n);

    let q = sd.basis();
    let factors = vec![
        sv.conjugate_by(q),
        tv.conjugate_by(q),
        sw.conjugate_by(q),
        tw.conjugate_by(q),
    ];
    FactorizationCertificate::assemble(u.clone(), factors, Method::RadjaviFour, tol)
}

fn normalize(z: Complex64) -> Complex64 {
    let r = z.norm();
    if r > 0.0 {
        z / r
    } else {
        Complex64::ONE
    }
}
