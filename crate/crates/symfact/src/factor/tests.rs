use super::*;
use crate::matcore::{haar_random_unitary, ComplexMatrix, DetMode, Tolerance};
use num_complex::Complex64;
use proptest::prelude::*;
use std::f64::consts::PI;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn polar(theta: f64) -> Complex64 {
    Complex64::from_polar(1.0, theta)
}

fn assert_certificate(cert: &FactorizationCertificate, bound: f64) {
    let tol = Tolerance::default();
    for f in &cert.factors {
        assert!(f.is_symmetry(&tol), "factor is not a symmetry");
    }
    let residual = (&cert.product() - &cert.target).operator_norm();
    assert!(residual <= bound, "residual {residual:e} > {bound:e}");
    assert!((residual - cert.residual).abs() <= 1e-12);
}

/// Conjugation-symmetric unitary with a seeded spectrum: random conjugate
/// pairs plus ±1 fillers, conjugated by a Haar basis.
fn conj_symmetric_unitary(dim: usize, seed: u64) -> ComplexMatrix {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut eigs = Vec::with_capacity(dim);
    while eigs.len() + 2 <= dim {
        if rng.random_bool(0.2) {
            let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
            eigs.push(c(sign, 0.0));
        } else {
            let theta = rng.random_range(0.05..PI - 0.05);
            eigs.push(polar(theta));
            eigs.push(polar(-theta));
        }
    }
    while eigs.len() < dim {
        eigs.push(c(1.0, 0.0));
    }
    let q = haar_random_unitary(dim, seed ^ 0x5eed, DetMode::Free);
    ComplexMatrix::diagonal(&eigs).conjugate_by(&q)
}

#[test]
fn conjugate_pair_scalar_i() {
    let tol = Tolerance::default();
    let a = ComplexMatrix::diagonal(&[c(0.0, 1.0)]);
    let cert = conjugate_pair_two_factor(&a, &tol).unwrap();
    let swap = ComplexMatrix::new(2, vec![c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)])
        .unwrap();
    let twisted =
        ComplexMatrix::new(2, vec![c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)])
            .unwrap();
    assert_eq!(cert.factors[0], swap);
    assert_eq!(cert.factors[1], twisted);
    let expected = ComplexMatrix::diagonal(&[c(0.0, 1.0), c(0.0, -1.0)]);
    assert!(cert.target.max_abs_diff(&expected) == 0.0);
    assert_certificate(&cert, 1e-15);
}

#[test]
fn conjugate_pair_identity_blocks() {
    let tol = Tolerance::default();
    let cert = conjugate_pair_two_factor(&ComplexMatrix::identity(2), &tol).unwrap();
    assert_eq!(cert.factors[0], cert.factors[1]);
    assert!(cert.target.max_abs_diff(&ComplexMatrix::identity(4)) == 0.0);
    assert_certificate(&cert, 1e-15);
}

#[test]
fn conjugate_pair_haar_residual() {
    let tol = Tolerance::default();
    let a = haar_random_unitary(3, 5, DetMode::Free);
    let cert = conjugate_pair_two_factor(&a, &tol).unwrap();
    assert_certificate(&cert, 1e-12);
}

#[test]
fn two_symmetry_identity() {
    let tol = Tolerance::default();
    let cert = two_symmetry_factor(&ComplexMatrix::identity(3), &tol).unwrap();
    assert_eq!(cert.factors.len(), 2);
    for f in &cert.factors {
        assert!(f.max_abs_diff(&ComplexMatrix::identity(3)) <= 1e-12);
    }
}

#[test]
fn two_symmetry_conjugate_pair_diagonal() {
    let tol = Tolerance::default();
    let u = ComplexMatrix::diagonal(&[polar(PI / 3.0), polar(-PI / 3.0)]);
    let cert = two_symmetry_factor(&u, &tol).unwrap();
    assert_certificate(&cert, 1e-12);
}

#[test]
fn two_symmetry_rejects_unpaired_spectrum() {
    let tol = Tolerance::default();
    let u = ComplexMatrix::diagonal(&[c(0.0, 1.0), c(0.0, 1.0)]);
    match two_symmetry_factor(&u, &tol) {
        Err(FactorError::SpectrumNotConjSymmetric { eigenvalue, margin }) => {
            assert!((eigenvalue - c(0.0, 1.0)).norm() <= 1e-9);
            assert!(margin > 1.0);
        }
        other => panic!("expected spectral rejection, got {other:?}"),
    }
}

#[test]
fn two_symmetry_seeded_positives() {
    let tol = Tolerance::default();
    for dim in 2..=6 {
        for seed in 0..8u64 {
            let u = conj_symmetric_unitary(dim, seed);
            let cert = two_symmetry_factor(&u, &tol)
                .unwrap_or_else(|e| panic!("dim {dim} seed {seed}: {e}"));
            assert_certificate(&cert, 1e-8);
        }
    }
}

#[test]
fn intertwiner_symmetry_branch_h_zero() {
    let tol = Tolerance::default();
    let w = ComplexMatrix::diagonal(&[c(1.0, 0.0), c(-1.0, 0.0)]);
    let s = intertwiner_to_symmetry(&ComplexMatrix::identity(2), &w, &tol).unwrap();
    assert!(s.max_abs_diff(&w) <= 1e-10);
}

#[test]
fn intertwiner_swap_hand_oracle() {
    let tol = Tolerance::default();
    let u = ComplexMatrix::diagonal(&[c(0.0, 1.0), c(0.0, -1.0)]);
    let swap = ComplexMatrix::new(2, vec![c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)])
        .unwrap();
    let s = intertwiner_to_symmetry(&u, &swap, &tol).unwrap();
    assert!(s.max_abs_diff(&swap) <= 1e-10);
    // US = SU* entrywise: both equal [[0, i], [-i, 0]].
    let us = &u * &s;
    let su = &s * &u.adjoint();
    assert!(us.max_abs_diff(&su) <= 1e-12);
}

#[test]
fn intertwiner_generic_phase() {
    let tol = Tolerance::default();
    let u = ComplexMatrix::diagonal(&[polar(PI / 5.0), polar(-PI / 5.0)]);
    let swap = ComplexMatrix::new(2, vec![c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)])
        .unwrap();
    let s = intertwiner_to_symmetry(&u, &swap, &tol).unwrap();
    assert!(s.is_symmetry(&tol));
    let defect = (&(&u * &s) - &(&s * &u.adjoint())).operator_norm();
    assert!(defect <= 1e-10);
    // US is itself a symmetry and (US)·S = U is the two-symmetry product.
    let second = &u * &s;
    assert!(second.is_symmetry(&tol));
    assert!((&(&second * &s) - &u).operator_norm() <= 1e-12);
}

#[test]
fn intertwiner_rejects_non_intertwiner() {
    let tol = Tolerance::default();
    let u = ComplexMatrix::diagonal(&[polar(0.4), polar(1.3)]);
    let w = ComplexMatrix::identity(2);
    assert!(matches!(
        intertwiner_to_symmetry(&u, &w, &tol),
        Err(FactorError::NotIntertwiner { .. })
    ));
}

#[test]
fn radjavi_diagonal_example() {
    let tol = Tolerance::default();
    let u = ComplexMatrix::diagonal(&[polar(PI / 3.0), polar(-PI / 3.0), c(-1.0, 0.0)]);
    let cert = radjavi_four_factor(&u, &tol).unwrap();
    assert_eq!(cert.factors.len(), 4);
    assert_certificate(&cert, 1e-10);
}

#[test]
fn radjavi_scalar_i_dim2() {
    let tol = Tolerance::default();
    let u = ComplexMatrix::scalar(2, c(0.0, 1.0));
    let cert = radjavi_four_factor(&u, &tol).unwrap();
    assert_certificate(&cert, 1e-10);
    assert!(cert.product().max_abs_diff(&u) <= 1e-10);
}

#[test]
fn radjavi_rejects_quarter_phase() {
    let tol = Tolerance::default();
    let u = ComplexMatrix::scalar(2, polar(PI / 4.0));
    match radjavi_four_factor(&u, &tol) {
        Err(FactorError::DeterminantObstruction { det, distance }) => {
            assert!((det - c(0.0, 1.0)).norm() <= 1e-12);
            assert!((distance - 2.0_f64.sqrt()).abs() <= 1e-12);
        }
        other => panic!("expected determinant obstruction, got {other:?}"),
    }
}

#[test]
fn radjavi_factor_determinants_multiply_to_target_det() {
    let tol = Tolerance::default();
    for seed in 0..6u64 {
        let mode = if seed % 2 == 0 {
            DetMode::PlusOne
        } else {
            DetMode::MinusOne
        };
        let u = haar_random_unitary(5, seed, mode);
        let cert = radjavi_four_factor(&u, &tol).unwrap();
        let mut prod = Complex64::ONE;
        for f in &cert.factors {
            let d = f.determinant();
            assert!(
                (d - Complex64::ONE).norm() <= 1e-9 || (d + Complex64::ONE).norm() <= 1e-9
            );
            prod *= d;
        }
        assert!((prod - u.determinant()).norm() <= 1e-9);
    }
}

#[test]
fn weyl_commutation_relation_holds() {
    for n in 1..=12u64 {
        let clock = clock_matrix(n);
        let shift = shift_matrix(n);
        for k in 0..n as i64 {
            let ck = (0..k).fold(ComplexMatrix::identity(n as usize), |acc, _| &acc * &clock);
            let lhs = &ck * &shift;
            let rhs = (&shift * &ck).scale(polar(std::f64::consts::TAU * k as f64 / n as f64));
            assert!(lhs.max_abs_diff(&rhs) <= 1e-12, "n={n} k={k}");
        }
    }
}

#[test]
fn weyl_scalar_examples() {
    let cert = weyl_scalar_four_factor(1, 2);
    assert!(cert
        .target
        .max_abs_diff(&ComplexMatrix::scalar(4, c(0.0, 1.0)))
        <= 1e-15);
    assert_certificate(&cert, 1e-12);
    // R3 squares to the identity.
    let r3 = &cert.factors[2];
    assert!((&(r3 * r3) - &ComplexMatrix::identity(4)).operator_norm() <= 1e-12);

    let trivial = weyl_scalar_four_factor(0, 1);
    assert!(trivial.target.max_abs_diff(&ComplexMatrix::identity(2)) <= 1e-15);
    assert_certificate(&trivial, 1e-15);

    let third = weyl_scalar_four_factor(1, 3);
    assert!(third
        .target
        .max_abs_diff(&ComplexMatrix::scalar(6, polar(PI / 3.0)))
        <= 1e-12);
    assert_certificate(&third, 1e-12);
}

#[test]
fn scalar_four_factor_examples() {
    let i_angle = RationalAngle::new(1, 4).unwrap();
    let cert = scalar_four_factor(i_angle, 4).unwrap();
    assert!(cert
        .target
        .max_abs_diff(&ComplexMatrix::scalar(4, c(0.0, 1.0)))
        <= 1e-12);
    assert_certificate(&cert, 1e-12);

    let one = RationalAngle::new(0, 1).unwrap();
    let trivial = scalar_four_factor(one, 3).unwrap();
    for f in &trivial.factors {
        assert!(f.max_abs_diff(&ComplexMatrix::identity(3)) == 0.0);
    }

    match scalar_four_factor(i_angle, 2) {
        Err(FactorError::MultiplicityConstraint { minimal_block, .. }) => {
            assert_eq!(minimal_block, 4);
        }
        other => panic!("expected multiplicity constraint, got {other:?}"),
    }
}

#[test]
fn finite_spectrum_examples() {
    let tol = Tolerance::default();
    let i_angle = RationalAngle::new(1, 4).unwrap();
    let spec = FiniteSpectrumSpec::new(vec![(i_angle, 4)]).unwrap();
    let cert = finite_spectrum_four_factor(&spec, &tol).unwrap();
    assert!(cert
        .target
        .max_abs_diff(&ComplexMatrix::scalar(4, c(0.0, 1.0)))
        <= 1e-12);
    assert_certificate(&cert, 1e-12);

    let one = RationalAngle::new(0, 1).unwrap();
    for m in [1, 2, 5] {
        let spec = FiniteSpectrumSpec::new(vec![(one, m)]).unwrap();
        let cert = finite_spectrum_four_factor(&spec, &tol).unwrap();
        for f in &cert.factors {
            assert!(f.max_abs_diff(&ComplexMatrix::identity(m)) == 0.0);
        }
    }

    let minus = RationalAngle::new(1, 2).unwrap();
    let spec = FiniteSpectrumSpec::new(vec![(i_angle, 4), (minus, 2)]).unwrap();
    let cert = finite_spectrum_four_factor(&spec, &tol).unwrap();
    assert_eq!(cert.target.dim(), 6);
    let expected = ComplexMatrix::diagonal(&[
        c(0.0, 1.0),
        c(0.0, 1.0),
        c(0.0, 1.0),
        c(0.0, 1.0),
        c(-1.0, 0.0),
        c(-1.0, 0.0),
    ]);
    assert!(cert.target.max_abs_diff(&expected) <= 1e-12);
    assert_certificate(&cert, 1e-12);
}

#[test]
fn three_factor_scalar_displayed_identity() {
    let cert = three_factor_scalar(c(0.0, 1.0), 2).unwrap();
    let b1 = ComplexMatrix::new(2, vec![c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)])
        .unwrap();
    let b2 = ComplexMatrix::new(2, vec![c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)])
        .unwrap();
    let b3 = ComplexMatrix::diagonal(&[c(1.0, 0.0), c(-1.0, 0.0)]);
    assert_eq!(cert.factors[0], b1);
    assert_eq!(cert.factors[1], b2);
    assert_eq!(cert.factors[2], b3);
    assert!(cert
        .product()
        .max_abs_diff(&ComplexMatrix::scalar(2, c(0.0, 1.0)))
        <= 1e-15);

    let minus = three_factor_scalar(c(-1.0, 0.0), 4).unwrap();
    assert_eq!(minus.factors[0], ComplexMatrix::scalar(4, c(-1.0, 0.0)));
    assert_eq!(minus.factors[1], ComplexMatrix::identity(4));

    let minus_i = three_factor_scalar(c(0.0, -1.0), 6).unwrap();
    assert_certificate(&minus_i, 1e-15);

    assert!(matches!(
        three_factor_scalar(polar(2.0 * PI / 3.0), 2),
        Err(FactorError::NotFourthRoot { .. })
    ));
    assert!(matches!(
        three_factor_scalar(c(0.0, 1.0), 3),
        Err(FactorError::OddDimension { dim: 3 })
    ));
}

#[test]
fn lemma_two_uni_identity_input() {
    let tol = Tolerance::default();
    let eye = ComplexMatrix::identity(2);
    let step = lemma_two_uni_step(&eye, &eye, &tol).unwrap();
    assert!(step.r1.is_symmetry(&tol));
    assert!(step.r2.is_symmetry(&tol));
    // The construction emits the swap pair; their product is the identity
    // and the deferred unitary is trivial.
    assert!(step.r1.max_abs_diff(&step.r2) <= 1e-12);
    assert!((&(&step.r1 * &step.r2) - &eye).operator_norm() <= 1e-12);
    assert!(step.deferred().max_abs_diff(&eye) <= 1e-12);
    assert!(step.residual_for(&eye, &eye) <= 1e-12);
}

#[test]
fn lemma_two_uni_haar_pair() {
    let tol = Tolerance::default();
    let u = haar_random_unitary(4, 1, DetMode::Free);
    let v = haar_random_unitary(4, 2, DetMode::Free);
    let step = lemma_two_uni_step(&u, &v, &tol).unwrap();
    assert!(step.residual_for(&u, &v) <= 1e-9);
    assert!((step.projection.trace().re - 2.0).abs() <= 1e-9);
    assert!(step.projection.is_projection(&tol));
}

#[test]
fn lemma_two_uni_commuting_projection() {
    let tol = Tolerance::default();
    let u = ComplexMatrix::identity(4);
    let v = ComplexMatrix::diagonal(&[c(0.0, 1.0), c(0.0, 1.0), c(0.0, -1.0), c(0.0, -1.0)]);
    let step = lemma_two_uni_step(&u, &v, &tol).unwrap();
    let comm = (&(&step.v_prime * &step.projection) - &(&step.projection * &step.v_prime))
        .operator_norm();
    assert!(comm <= 1e-10);
    assert!(step.residual_for(&u, &v) <= 1e-10);
}

#[test]
fn lemma_two_uni_rejects_odd_dimension() {
    let tol = Tolerance::default();
    let eye = ComplexMatrix::identity(3);
    assert!(matches!(
        lemma_two_uni_step(&eye, &eye, &tol),
        Err(FactorError::OddDimension { dim: 3 })
    ));
}

fn commuting_four_sym_input(
    m: usize,
    seed: u64,
) -> (ComplexMatrix, ComplexMatrix, ComplexMatrix) {
    let n = 3 * m;
    let q = haar_random_unitary(n, seed, DetMode::Free);
    let a = haar_random_unitary(2 * m, seed + 1, DetMode::Free);
    let c_blk = haar_random_unitary(m, seed + 2, DetMode::Free);
    let u = ComplexMatrix::block_diag(&[a, c_blk]).conjugate_by(&q);
    let mut e_diag = vec![Complex64::ONE; 2 * m];
    e_diag.extend(std::iter::repeat_n(Complex64::ZERO, m));
    let e1 = ComplexMatrix::diagonal(&e_diag).conjugate_by(&q);
    let b = haar_random_unitary(2 * m, seed + 3, DetMode::Free);
    let b1 = ComplexMatrix::block_diag(&[b, ComplexMatrix::zeros(m)]).conjugate_by(&q);
    (u, e1, b1)
}

#[test]
fn lemma_four_sym_trivial_input() {
    let tol = Tolerance::default();
    let u = ComplexMatrix::identity(6);
    let e1 = ComplexMatrix::diagonal(&[
        c(1.0, 0.0),
        c(1.0, 0.0),
        c(1.0, 0.0),
        c(1.0, 0.0),
        c(0.0, 0.0),
        c(0.0, 0.0),
    ]);
    let step = lemma_four_sym_step(&u, &e1, &e1, &tol).unwrap();
    for r in &step.symmetries {
        assert!(r.is_symmetry(&tol));
    }
    assert!(step.residual_for(&u, &e1, &e1) <= 1e-10);
    assert!((step.e2.trace().re - 1.0).abs() <= 1e-9);
}

#[test]
fn lemma_four_sym_scalar_blocks() {
    let tol = Tolerance::default();
    let scalars = [polar(0.3), polar(0.3), polar(1.1), polar(1.1), polar(2.7), polar(2.7)];
    let u = ComplexMatrix::diagonal(&scalars);
    let e1 = ComplexMatrix::diagonal(&[
        c(1.0, 0.0),
        c(1.0, 0.0),
        c(1.0, 0.0),
        c(1.0, 0.0),
        c(0.0, 0.0),
        c(0.0, 0.0),
    ]);
    let step = lemma_four_sym_step(&u, &e1, &e1, &tol).unwrap();
    assert!(step.residual_for(&u, &e1, &e1) <= 1e-9);
    assert!((step.e2.trace().re - 1.0).abs() <= 1e-9);
}

#[test]
fn lemma_four_sym_haar_built_pair() {
    let tol = Tolerance::default();
    let (u, e1, b1) = commuting_four_sym_input(4, 9);
    let step = lemma_four_sym_step(&u, &e1, &b1, &tol).unwrap();
    assert!(step.residual_for(&u, &e1, &b1) <= 1e-9);
    assert!((step.e2.trace().re - 2.0).abs() <= 1e-9);
    for r in &step.symmetries {
        assert!(r.is_symmetry(&tol));
    }
    // E2 is orthogonal to E1.
    assert!((&e1 * &step.e2).operator_norm() <= 1e-9);
}

#[test]
fn lemma_four_sym_dimension_and_rank_errors() {
    let tol = Tolerance::default();
    let eye = ComplexMatrix::identity(9); // 3m with m odd
    assert!(matches!(
        lemma_four_sym_step(&eye, &eye, &eye, &tol),
        Err(FactorError::DimensionNotDivisible { divisor: 6, .. })
    ));
    let eye6 = ComplexMatrix::identity(6);
    assert!(matches!(
        lemma_four_sym_step(&eye6, &eye6, &eye6, &tol),
        Err(FactorError::RankMismatch {
            expected: 4,
            actual: 6
        })
    ));
}

#[test]
fn rational_angle_normalization() {
    let a = RationalAngle::new(-1, 4).unwrap();
    assert_eq!((a.p(), a.q()), (3, 4));
    let b = RationalAngle::new(6, 8).unwrap();
    assert_eq!((b.p(), b.q()), (3, 4));
    assert_eq!(a, b);
    assert_eq!(a.half_turn_fraction(), (3, 2));
    let half = RationalAngle::new(1, 2).unwrap();
    assert_eq!(half.half_turn_fraction(), (1, 1));
    assert!(RationalAngle::new(1, 0).is_err());
}

#[test]
fn rational_angle_recognition() {
    for (p, q) in [(0i64, 1i64), (1, 2), (1, 3), (2, 3), (1, 4), (5, 6), (5, 12)] {
        let angle = RationalAngle::new(p, q).unwrap();
        let rec = rational_angle_from_unit(angle.value(), 16, 1e-9).unwrap();
        assert_eq!(rec, angle, "failed for {p}/{q}");
    }
    // An irrational angle is rejected at small denominators.
    assert!(rational_angle_from_unit(polar(1.0), 16, 1e-9).is_none());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn certificate_conjugation_invariance(dim in 2usize..6, seed in 0u64..500) {
        let tol = Tolerance::default();
        let u = conj_symmetric_unitary(dim, seed);
        let cert = two_symmetry_factor(&u, &tol).unwrap();
        let q = haar_random_unitary(dim, seed ^ 0xabcd, DetMode::Free);
        let cert_q = cert.conjugated(&q);
        for f in &cert_q.factors {
            prop_assert!(f.is_symmetry(&tol));
        }
        let residual = (&cert_q.product() - &cert_q.target).operator_norm();
        prop_assert!(residual <= 1e-8);
    }

    #[test]
    fn radjavi_round_trip_on_normalized_haar(dim in 2usize..7, seed in 0u64..500) {
        let tol = Tolerance::default();
        let mode = if seed % 2 == 0 { DetMode::PlusOne } else { DetMode::MinusOne };
        let u = haar_random_unitary(dim, seed, mode);
        let cert = radjavi_four_factor(&u, &tol).unwrap();
        prop_assert_eq!(cert.factors.len(), 4);
        for f in &cert.factors {
            prop_assert!(f.is_symmetry(&tol));
        }
        prop_assert!((&cert.product() - &u).operator_norm() <= 1e-8);
    }
}
