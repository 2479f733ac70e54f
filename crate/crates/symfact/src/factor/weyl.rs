//! Scalar unitaries as four-symmetry products via clock and shift matrices,
//! the finite-spectrum block assembly, and the three-symmetry scalars.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::matcore::{ComplexMatrix, Tolerance};

use super::{FactorError, FactorizationCertificate, FiniteSpectrumSpec, Method, RationalAngle};

/// Root of unity `e^{2πi m/n}` computed from the reduced residue, so powers
/// of the clock stay exact roots.
fn root_of_unity(m: i128, n: u64) -> Complex64 {
    let r = m.rem_euclid(n as i128) as f64;
    Complex64::from_polar(1.0, std::f64::consts::TAU * r / n as f64)
}

/// Clock matrix `C = diag(1, ω, …, ω^{n−1})`, `ω = e^{2πi/n}`.
pub fn clock_matrix(n: u64) -> ComplexMatrix {
    let vals: Vec<Complex64> = (0..n).map(|j| root_of_unity(j as i128, n)).collect();
    ComplexMatrix::diagonal(&vals)
}

/// Cyclic shift `S e_j = e_{j+1 mod n}`, satisfying `C S = ω S C`.
pub fn shift_matrix(n: u64) -> ComplexMatrix {
    let n = n as usize;
    ComplexMatrix::from_fn(n, |i, j| {
        if i == (j + 1) % n {
            Complex64::ONE
        } else {
            Complex64::ZERO
        }
    })
}

fn clock_power(k: i64, n: u64) -> ComplexMatrix {
    let vals: Vec<Complex64> = (0..n)
        .map(|j| root_of_unity(j as i128 * k as i128, n))
        .collect();
    ComplexMatrix::diagonal(&vals)
}

/// Four symmetries in dimension `2n` whose product is `e^{iπ k/n} I`.
///
/// Instantiated with the pair `(C^k, S)` whose commutation factor is
/// `e^{2πi k/n}`:
///
/// ```text
/// R1 = [[0, U], [U*, 0]]    R2 = [[0, I], [I, 0]]
/// R3 = e^{iπk/n} [[0, U*V], [V*U conj-side, 0]]   R4 = [[0, V], [V*, 0]]
/// ```
pub fn weyl_scalar_four_factor(k: i64, n: u64) -> FactorizationCertificate {
    assert!(n >= 1, "clock size must be at least 1");
    let tol = Tolerance::default();
    let nn = n as usize;
    let zero = ComplexMatrix::zeros(nn);
    let eye = ComplexMatrix::identity(nn);

    let u = clock_power(k, n);
    let v = shift_matrix(n);
    let ustar = u.adjoint();
    let vstar = v.adjoint();
    let phase = Complex64::from_polar(1.0, PI * k as f64 / n as f64);

    let r1 = ComplexMatrix::from_blocks_2x2(&zero, &u, &ustar, &zero);
    let r2 = ComplexMatrix::from_blocks_2x2(&zero, &eye, &eye, &zero);
    let r3 = ComplexMatrix::from_blocks_2x2(&zero, &(&ustar * &v), &(&u * &vstar), &zero)
        .scale(phase);
    let r4 = ComplexMatrix::from_blocks_2x2(&zero, &v, &vstar, &zero);

    let target = ComplexMatrix::scalar(2 * nn, phase);
    FactorizationCertificate::assemble(target, vec![r1, r2, r3, r4], Method::WeylScalar, &tol)
        .expect("clock/shift product is exact")
}

/// Four symmetries whose product is `α I_dim` for a rational angle `α`.
///
/// Writing `α = e^{iπ p'/q'}` in lowest terms, the construction is a direct
/// sum of `dim / (2q')` clock/shift blocks; `α = 1` degenerates to identity
/// factors in any dimension.
pub fn scalar_four_factor(
    angle: RationalAngle,
    dim: usize,
) -> Result<FactorizationCertificate, FactorError> {
    let tol = Tolerance::default();
    let (p, q) = angle.half_turn_fraction();
    if p == 0 {
        let eye = ComplexMatrix::identity(dim);
        return Ok(FactorizationCertificate::assemble(
            eye.clone(),
            vec![eye.clone(), eye.clone(), eye.clone(), eye],
            Method::WeylScalar,
            &tol,
        )
        .expect("identity factors are exact"));
    }
    let block = 2 * q as usize;
    if !dim.is_multiple_of(block) {
        return Err(FactorError::MultiplicityConstraint {
            p: angle.p(),
            q: angle.q(),
            multiplicity: dim,
            minimal_block: block,
        });
    }
    let copies = dim / block;
    let unit = weyl_scalar_four_factor(p as i64, q);
    let factors: Vec<ComplexMatrix> = (0..4)
        .map(|j| {
            let blocks: Vec<ComplexMatrix> = (0..copies).map(|_| unit.factors[j].clone()).collect();
            ComplexMatrix::block_diag(&blocks)
        })
        .collect();
    let target = ComplexMatrix::scalar(dim, Complex64::from_polar(1.0, PI * p as f64 / q as f64));
    FactorizationCertificate::assemble(target, factors, Method::WeylScalar, &tol)
}

/// Four symmetries whose product is the diagonal unitary carrying the
/// prescribed finite spectrum; the j-th symmetry is the block direct sum of
/// the j-th scalar factors.
pub fn finite_spectrum_four_factor(
    spec: &FiniteSpectrumSpec,
    tol: &Tolerance,
) -> Result<FactorizationCertificate, FactorError> {
    let mut per_angle: Vec<FactorizationCertificate> = Vec::new();
    for (angle, multiplicity) in spec.entries() {
        per_angle.push(scalar_four_factor(*angle, *multiplicity)?);
    }
    let factors: Vec<ComplexMatrix> = (0..4)
        .map(|j| {
            let blocks: Vec<ComplexMatrix> =
                per_angle.iter().map(|c| c.factors[j].clone()).collect();
            ComplexMatrix::block_diag(&blocks)
        })
        .collect();
    let target = ComplexMatrix::block_diag(
        &per_angle
            .iter()
            .map(|c| c.target.clone())
            .collect::<Vec<_>>(),
    );
    FactorizationCertificate::assemble(target, factors, Method::FiniteSpectrumFour, tol)
}

/// Three symmetries whose product is `α I_dim` for a fourth root of unity
/// `α` and even `dim`.
///
/// For `α = ±i` (with `m = dim/2`) the factors are the displayed blocks
/// `[[0, I], [I, 0]]`, `[[0, ∓iI], [±iI, 0]]`, `diag(I, −I)`; for `α = ±1`
/// they are `(αI, I, I)`.
pub fn three_factor_scalar(
    alpha: Complex64,
    dim: usize,
) -> Result<FactorizationCertificate, FactorError> {
    let tol = Tolerance::default();
    let roots = [
        Complex64::ONE,
        Complex64::I,
        -Complex64::ONE,
        -Complex64::I,
    ];
    let root = roots
        .iter()
        .copied()
        .find(|r| (alpha - r).norm() <= 1e-12)
        .ok_or(FactorError::NotFourthRoot { value: alpha })?;
    if !dim.is_multiple_of(2) {
        return Err(FactorError::OddDimension { dim });
    }

    let target = ComplexMatrix::scalar(dim, root);
    let factors = if root.im == 0.0 {
        vec![
            ComplexMatrix::scalar(dim, root),
            ComplexMatrix::identity(dim),
            ComplexMatrix::identity(dim),
        ]
    } else {
        let m = dim / 2;
        let zero = ComplexMatrix::zeros(m);
        let eye = ComplexMatrix::identity(m);
        let i_block = ComplexMatrix::scalar(m, Complex64::I);
        let (upper, lower) = if root == Complex64::I {
            (i_block.scale(-Complex64::ONE), i_block)
        } else {
            (i_block.clone(), i_block.scale(-Complex64::ONE))
        };
        vec![
            ComplexMatrix::from_blocks_2x2(&zero, &eye, &eye, &zero),
            ComplexMatrix::from_blocks_2x2(&zero, &upper, &lower, &zero),
            ComplexMatrix::block_diag(&[eye.clone(), eye.scale(-Complex64::ONE)]),
        ]
    };
    FactorizationCertificate::assemble(target, factors, Method::ThreeScalar, &tol)
}

/// Recognizes a unit-modulus complex number as `e^{2πi p/q}` with `q` at
/// most `max_denominator`, verifying the reconstruction within `tol`.
///
/// Uses the continued-fraction convergents of `arg(z)/2π`.
pub fn rational_angle_from_unit(
    z: Complex64,
    max_denominator: u64,
    tol: f64,
) -> Option<RationalAngle> {
    let theta = crate::matcore::principal_arg(z) / std::f64::consts::TAU;
    let mut candidates: Vec<(u64, u64)> = vec![(0, 1), (1, 1)];
    let (mut h0, mut k0, mut h1, mut k1) = (0u64, 1u64, 1u64, 0u64);
    let mut x = theta;
    for _ in 0..40 {
        let a = x.floor();
        if a < 0.0 || a > u64::MAX as f64 {
            break;
        }
        let a_int = a as u64;
        let h2 = a_int.checked_mul(h1).and_then(|v| v.checked_add(h0));
        let k2 = a_int.checked_mul(k1).and_then(|v| v.checked_add(k0));
        let (Some(h2), Some(k2)) = (h2, k2) else { break };
        if k2 > max_denominator {
            break;
        }
        candidates.push((h2, k2));
        h0 = h1;
        k0 = k1;
        h1 = h2;
        k1 = k2;
        let frac = x - a;
        if frac.abs() < 1e-15 {
            break;
        }
        x = 1.0 / frac;
    }
    candidates
        .into_iter()
        .filter_map(|(p, q)| RationalAngle::new(p as i64, q as i64).ok())
        .map(|angle| (angle, (angle.value() - z).norm()))
        .filter(|(_, err)| *err <= tol)
        .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
        .map(|(angle, _)| angle)
}
