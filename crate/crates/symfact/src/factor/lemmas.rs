//! Block-reduction steps used by the diagonalization strategy: the
//! two-unitary rewriting `UV = R1 R2 U (V'E + I−E)` and the three-block
//! four-symmetry step.

use num_complex::Complex64;

use crate::matcore::{ComplexMatrix, MatError, Tolerance};

use super::FactorError;

/// Output of [`lemma_two_uni_step`]: symmetries `r1, r2`, a rank-`m`
/// projection `projection`, and a unitary `v_prime` commuting with it, such
/// that `U V = r1 r2 U (v_prime·E + I − E)`.
#[derive(Debug, Clone)]
pub struct TwoUnitaryStep {
    pub r1: ComplexMatrix,
    pub r2: ComplexMatrix,
    pub projection: ComplexMatrix,
    pub v_prime: ComplexMatrix,
}

impl TwoUnitaryStep {
    /// `v_prime·E + I − E`, the deferred unitary of the identity.
    pub fn deferred(&self) -> ComplexMatrix {
        let eye = ComplexMatrix::identity(self.projection.dim());
        &(&self.v_prime * &self.projection) + &(&eye - &self.projection)
    }

    /// `‖U V − r1 r2 U (v'E + I − E)‖`.
    pub fn residual_for(&self, u: &ComplexMatrix, v: &ComplexMatrix) -> f64 {
        let lhs = u * v;
        let rhs = &(&(&self.r1 * &self.r2) * u) * &self.deferred();
        (&lhs - &rhs).operator_norm()
    }
}

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

/// Rewrites the product of two unitaries of even dimension `2m` as
/// `R1 R2 U (V'E + I−E)` with `R1, R2` symmetries, `E` a rank-`m`
/// projection, and `V'` a unitary commuting with `E`.
///
/// The eigenpairs of `V` split into two sorted halves `D1, D2`; in that
/// eigenbasis `E` spans the second half, `V' = diag(I, D1 D2)`, and
/// `R1 R2 = U·diag(D1, D1*)·U*` via the conjugate-pair block identity.
pub fn lemma_two_uni_step(
    u: &ComplexMatrix,
    v: &ComplexMatrix,
    tol: &Tolerance,
) -> Result<TwoUnitaryStep, FactorError> {
    let n = u.dim();
    if n != v.dim() {
        return Err(MatError::DimMismatch {
            left: n,
            right: v.dim(),
        }
        .into());
    }
    if !n.is_multiple_of(2) {
        return Err(FactorError::OddDimension { dim: n });
    }
    require_unitary(u, tol)?;
    require_unitary(v, tol)?;
    let m = n / 2;

    let sd = v.spectral_decompose(tol)?;
    let bas = sd.basis();
    let d1: Vec<Complex64> = sd.eigenvalues()[..m].to_vec();
    let d2: Vec<Complex64> = sd.eigenvalues()[m..].to_vec();

    let mut proj_diag = vec![Complex64::ZERO; m];
    proj_diag.extend(std::iter::repeat_n(Complex64::ONE, m));
    let projection = ComplexMatrix::diagonal(&proj_diag).conjugate_by(bas);

    let mut vp_diag = vec![Complex64::ONE; m];
    vp_diag.extend(d1.iter().zip(d2.iter()).map(|(a, b)| a * b));
    let v_prime = ComplexMatrix::diagonal(&vp_diag).conjugate_by(bas);

    let zero = ComplexMatrix::zeros(m);
    let eye = ComplexMatrix::identity(m);
    let d1m = ComplexMatrix::diagonal(&d1);
    let swap = ComplexMatrix::from_blocks_2x2(&zero, &eye, &eye, &zero);
    let twisted = ComplexMatrix::from_blocks_2x2(&zero, &d1m.adjoint(), &d1m, &zero);
    let r1 = swap.conjugate_by(bas).conjugate_by(u);
    let r2 = twisted.conjugate_by(bas).conjugate_by(u);

    let step = TwoUnitaryStep {
        r1,
        r2,
        projection,
        v_prime,
    };
    let residual = step.residual_for(u, v);
    if residual > tol.verify_tol {
        return Err(MatError::ConvergenceFailure {
            residual,
            tol: tol.verify_tol,
        }
        .into());
    }
    Ok(step)
}

/// Output of [`lemma_four_sym_step`]: four symmetries, a projection `e2`
/// orthogonal to `E1` of rank `dim/6`, and a unitary `b2` supported on
/// `range(e2)`, such that
/// `U = R1 R2 R3 R4 (B1 + b2 + (I − E1 − e2))`.
#[derive(Debug, Clone)]
pub struct FourSymmetryStep {
    pub symmetries: [ComplexMatrix; 4],
    pub e2: ComplexMatrix,
    pub b2: ComplexMatrix,
}

impl FourSymmetryStep {
    /// `‖U − R1 R2 R3 R4 (B1 + B2 + (I − E1 − E2))‖`.
    pub fn residual_for(
        &self,
        u: &ComplexMatrix,
        e1: &ComplexMatrix,
        b1: &ComplexMatrix,
    ) -> f64 {
        let eye = ComplexMatrix::identity(u.dim());
        let tail = &(&(b1 + &self.b2) + &eye) - &(e1 + &self.e2);
        let mut prod = self.symmetries[0].clone();
        for r in &self.symmetries[1..] {
            prod = &prod * r;
        }
        (&(&prod * &tail) - u).operator_norm()
    }
}

/// Projection rank read off the trace of a verified projection.
fn projection_rank(p: &ComplexMatrix, tol: &Tolerance) -> Result<usize, FactorError> {
    if !p.is_projection(tol) {
        let defect = (&(p * p) - p)
            .operator_norm()
            .max((p - &p.adjoint()).operator_norm());
        return Err(FactorError::NotProjection { defect });
    }
    let tr = p.trace().re;
    Ok(tr.round() as usize)
}

/// Three-block step: for `U` unitary on dimension `3m` (`m` even) commuting
/// with a rank-`2m` projection `E1`, and `B1` unitary on `range(E1)`,
/// produces four symmetries deferring all non-trivial action to a unitary
/// `B2` on a fresh rank-`m/2` projection `E2 ⟂ E1`.
pub fn lemma_four_sym_step(
    u: &ComplexMatrix,
    e1: &ComplexMatrix,
    b1: &ComplexMatrix,
    tol: &Tolerance,
) -> Result<FourSymmetryStep, FactorError> {
    let n = u.dim();
    if !n.is_multiple_of(3) || !(n / 3).is_multiple_of(2) {
        return Err(FactorError::DimensionNotDivisible { dim: n, divisor: 6 });
    }
    let m = n / 3;
    require_unitary(u, tol)?;

    let rank = projection_rank(e1, tol)?;
    if rank != 2 * m {
        return Err(FactorError::RankMismatch {
            expected: 2 * m,
            actual: rank,
        });
    }
    let commute_defect = (&(u * e1) - &(e1 * u)).operator_norm();
    if commute_defect > tol.verify_tol {
        return Err(FactorError::NotCommuting {
            defect: commute_defect,
        });
    }
    let b1_defect = (&(b1 * e1) - b1)
        .operator_norm()
        .max((&(e1 * b1) - b1).operator_norm())
        .max((&(&b1.adjoint() * b1) - e1).operator_norm());
    if b1_defect > tol.verify_tol {
        return Err(MatError::NotUnitary {
            defect: b1_defect,
            tol: tol.verify_tol,
        }
        .into());
    }

    // Reduce to B1 = E1; the same symmetries then work for the original B1.
    let eye = ComplexMatrix::identity(n);
    let u_work = u * &(&(&b1.adjoint() + &eye) - e1);

    // Orthonormal bases of range(E1) and its complement from the projection
    // eigenproblem; eigenvalues ascend, so the range sits in the last 2m.
    let (pq, pvals) = crate::matcore::eigen::hermitian_eigen(e1);
    debug_assert!(pvals[m] > 0.5 && pvals[m - 1] < 0.5);
    let range_cols: Vec<Vec<Complex64>> = (m..n).map(|j| pq.column(j)).collect();
    let comp_cols: Vec<Vec<Complex64>> = (0..m).map(|j| pq.column(j)).collect();

    // A = restriction of u_work to range(E1); U3 = restriction to the rest.
    let a = restrict(&u_work, &range_cols);
    let u3 = restrict(&u_work, &comp_cols);

    let sda = a.spectral_decompose(tol)?;
    let qa = sda.basis();
    let d1: Vec<Complex64> = sda.eigenvalues()[..m].to_vec();
    let d2: Vec<Complex64> = sda.eigenvalues()[m..].to_vec();

    // Global change of basis: [range·QA(first m) | range·QA(last m) | comp].
    let mut cols: Vec<Vec<Complex64>> = Vec::with_capacity(n);
    for j in 0..2 * m {
        let mut col = vec![Complex64::ZERO; n];
        for (r, base) in range_cols.iter().enumerate() {
            let w = qa[(r, j)];
            for i in 0..n {
                col[i] += base[i] * w;
            }
        }
        cols.push(col);
    }
    cols.extend(comp_cols.iter().cloned());
    let p = ComplexMatrix::from_columns(&cols);

    // Third-block pair for the two-unitary lemma: U3 = (U1U2)* · (U1U2U3).
    let u12: Vec<Complex64> = d1.iter().zip(d2.iter()).map(|(a, b)| a * b).collect();
    let u12m = ComplexMatrix::diagonal(&u12);
    let u_l = u12m.adjoint();
    let v_l = &u12m * &u3;
    let step = lemma_two_uni_step(&u_l, &v_l, tol)?;

    // In the new basis:
    //   diag(U1, U2, U3) = diag(U1, U1*, S1 S2) · diag(I, U1U2, (U1U2)*)
    //                      · diag(I, I, V'E + I−E)
    // and each of the first two blocks splits into two swap-type symmetries.
    let zero = ComplexMatrix::zeros(m);
    let eyem = ComplexMatrix::identity(m);
    let d1m = ComplexMatrix::diagonal(&d1);

    let r1 = three_block(&zero, &eyem, &eyem, &zero, &step.r1, m);
    let r2 = three_block(&zero, &d1m.adjoint(), &d1m, &zero, &step.r2, m);
    let r3 = three_block_swap23(&eyem, &eyem, &eyem, m);
    let r4 = three_block_swap23(&eyem, &u12m.adjoint(), &u12m, m);

    let e2_blk = pad_third_block(&step.projection, m);
    let b2_blk = pad_third_block(&(&step.v_prime * &step.projection), m);

    let symmetries = [
        r1.conjugate_by(&p),
        r2.conjugate_by(&p),
        r3.conjugate_by(&p),
        r4.conjugate_by(&p),
    ];
    let e2 = e2_blk.conjugate_by(&p);
    let b2 = b2_blk.conjugate_by(&p);

    let out = FourSymmetryStep { symmetries, e2, b2 };
    let residual = out.residual_for(u, e1, b1);
    if residual > tol.verify_tol {
        return Err(MatError::ConvergenceFailure {
            residual,
            tol: tol.verify_tol,
        }
        .into());
    }
    Ok(out)
}

/// `cols† · m · cols` for an orthonormal column family.
fn restrict(m: &ComplexMatrix, cols: &[Vec<Complex64>]) -> ComplexMatrix {
    let n = m.dim();
    let k = cols.len();
    let mapped: Vec<Vec<Complex64>> = cols
        .iter()
        .map(|c| {
            (0..n)
                .map(|i| (0..n).map(|j| m[(i, j)] * c[j]).sum())
                .collect()
        })
        .collect();
    ComplexMatrix::from_fn(k, |r, c| {
        (0..n).map(|i| cols[r][i].conj() * mapped[c][i]).sum()
    })
}

/// Block matrix [[a, b, 0], [c, d, 0], [0, 0, tail]] over m-sized blocks.
fn three_block(
    a: &ComplexMatrix,
    b: &ComplexMatrix,
    c: &ComplexMatrix,
    d: &ComplexMatrix,
    tail: &ComplexMatrix,
    m: usize,
) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(3 * m);
    for i in 0..m {
        for j in 0..m {
            out[(i, j)] = a[(i, j)];
            out[(i, m + j)] = b[(i, j)];
            out[(m + i, j)] = c[(i, j)];
            out[(m + i, m + j)] = d[(i, j)];
            out[(2 * m + i, 2 * m + j)] = tail[(i, j)];
        }
    }
    out
}

/// Block matrix [[head, 0, 0], [0, 0, b], [0, c, 0]] over m-sized blocks.
fn three_block_swap23(
    head: &ComplexMatrix,
    b: &ComplexMatrix,
    c: &ComplexMatrix,
    m: usize,
) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(3 * m);
    for i in 0..m {
        for j in 0..m {
            out[(i, j)] = head[(i, j)];
            out[(m + i, 2 * m + j)] = b[(i, j)];
            out[(2 * m + i, m + j)] = c[(i, j)];
        }
    }
    out
}

/// diag(0, 0, block) over m-sized blocks.
fn pad_third_block(block: &ComplexMatrix, m: usize) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(3 * m);
    for i in 0..m {
        for j in 0..m {
            out[(2 * m + i, 2 * m + j)] = block[(i, j)];
        }
    }
    out
}
