//! Matrix-valued functions on a finite base-point set, the pointwise
//! (center-valued) determinant, and the fiberwise four-symmetry
//! factorization with its determinant obstruction.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize};

use crate::factor::{radjavi_four_factor, FactorError};
use crate::matcore::{ComplexMatrix, MatError, Tolerance};
use crate::obstruct::{det_obstruction, ObstructionCertificate};

/// Errors raised by field construction and pointwise operations.
#[derive(Debug, Clone, thiserror::Error)]
pub enum CenterError {
    #[error("field shapes do not match: {reason}")]
    ShapeMismatch { reason: String },
    #[error("duplicate base point label {0:?}")]
    DuplicatePoint(String),
    #[error("missing value for base point {0:?}")]
    MissingValue(String),
    #[error("value for base point {point:?} has dimension {actual}, expected {expected}")]
    FiberDimMismatch {
        point: String,
        expected: usize,
        actual: usize,
    },
    #[error("fiber at {point:?} is not unitary: defect {defect:.3e}")]
    FiberNotUnitary { point: String, defect: f64 },
    #[error(transparent)]
    Mat(#[from] MatError),
    #[error(transparent)]
    Factor(#[from] FactorError),
}

/// Mapping from a finite ordered set of base points to square matrices of a
/// common fiber dimension.
#[derive(Debug, Clone, Serialize)]
pub struct MatrixField {
    points: Vec<String>,
    fiber_dim: usize,
    values: BTreeMap<String, ComplexMatrix>,
}

impl MatrixField {
    pub fn new(
        points: Vec<String>,
        fiber_dim: usize,
        values: BTreeMap<String, ComplexMatrix>,
    ) -> Result<Self, CenterError> {
        for (i, p) in points.iter().enumerate() {
            if points[..i].contains(p) {
                return Err(CenterError::DuplicatePoint(p.clone()));
            }
        }
        for p in &points {
            let v = values
                .get(p)
                .ok_or_else(|| CenterError::MissingValue(p.clone()))?;
            if v.dim() != fiber_dim {
                return Err(CenterError::FiberDimMismatch {
                    point: p.clone(),
                    expected: fiber_dim,
                    actual: v.dim(),
                });
            }
        }
        Ok(MatrixField {
            points,
            fiber_dim,
            values,
        })
    }

    /// Constant field over the given points.
    pub fn constant(points: Vec<String>, value: ComplexMatrix) -> Result<Self, CenterError> {
        let fiber_dim = value.dim();
        let values = points.iter().map(|p| (p.clone(), value.clone())).collect();
        MatrixField::new(points, fiber_dim, values)
    }

    pub fn points(&self) -> &[String] {
        &self.points
    }

    pub fn fiber_dim(&self) -> usize {
        self.fiber_dim
    }

    pub fn value(&self, point: &str) -> Option<&ComplexMatrix> {
        self.values.get(point)
    }

    pub fn same_shape(&self, other: &MatrixField) -> bool {
        self.points == other.points && self.fiber_dim == other.fiber_dim
    }

    /// Pointwise product `self(x) · other(x)`.
    pub fn pointwise_mul(&self, other: &MatrixField) -> Result<MatrixField, CenterError> {
        if !self.same_shape(other) {
            return Err(CenterError::ShapeMismatch {
                reason: "pointwise product needs matching points and fiber dimension".into(),
            });
        }
        let values = self
            .points
            .iter()
            .map(|p| (p.clone(), &self.values[p] * &other.values[p]))
            .collect();
        MatrixField::new(self.points.clone(), self.fiber_dim, values)
    }

    /// Pointwise adjoint.
    pub fn adjoint(&self) -> MatrixField {
        let values = self
            .points
            .iter()
            .map(|p| (p.clone(), self.values[p].adjoint()))
            .collect();
        MatrixField {
            points: self.points.clone(),
            fiber_dim: self.fiber_dim,
            values,
        }
    }

    /// True iff every fiber is unitary.
    pub fn is_unitary_field(&self, tol: &Tolerance) -> bool {
        self.points.iter().all(|p| self.values[p].is_unitary(tol))
    }

    /// True iff every fiber is a symmetry.
    pub fn is_symmetry_field(&self, tol: &Tolerance) -> bool {
        self.points.iter().all(|p| self.values[p].is_symmetry(tol))
    }
}

impl<'de> Deserialize<'de> for MatrixField {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Wire {
            points: Vec<String>,
            fiber_dim: usize,
            values: BTreeMap<String, ComplexMatrix>,
        }
        let w = Wire::deserialize(deserializer)?;
        MatrixField::new(w.points, w.fiber_dim, w.values).map_err(serde::de::Error::custom)
    }
}

/// Pointwise determinant in base-point order; unitary fibers are
/// normalized to unit modulus by the underlying determinant.
pub fn det_c(f: &MatrixField) -> Vec<(String, Complex64)> {
    f.points()
        .iter()
        .map(|p| (p.clone(), f.value(p).unwrap().determinant()))
        .collect()
}

/// Checks multiplicativity `det_c(fg) = det_c(f)·det_c(g)` and adjoint
/// compatibility `det_c(f*) = conj(det_c f)` pointwise within 1e-9.
pub fn detc_properties_check(
    f: &MatrixField,
    g: &MatrixField,
    _tol: &Tolerance,
) -> Result<bool, CenterError> {
    if !f.same_shape(g) {
        return Err(CenterError::ShapeMismatch {
            reason: "property check needs matching points and fiber dimension".into(),
        });
    }
    let prod = f.pointwise_mul(g)?;
    let det_f = det_c(f);
    let det_g = det_c(g);
    let det_fg = det_c(&prod);
    let det_fstar = det_c(&f.adjoint());
    let ok = det_fg
        .iter()
        .zip(det_f.iter().zip(det_g.iter()))
        .all(|((_, dfg), ((_, df), (_, dg)))| (dfg - df * dg).norm() <= 1e-9)
        && det_fstar
            .iter()
            .zip(det_f.iter())
            .all(|((_, ds), (_, df))| (ds - df.conj()).norm() <= 1e-9);
    Ok(ok)
}

/// Outcome of the fiberwise four-symmetry factorization.
#[derive(Debug, Clone)]
pub enum FieldFourFactorOutcome {
    /// Four symmetry fields whose ordered pointwise product is the input.
    Factored {
        factors: [MatrixField; 4],
        residuals: Vec<(String, f64)>,
    },
    /// Determinant obstruction at the first offending base point.
    Obstructed {
        point: String,
        certificate: ObstructionCertificate,
    },
}

/// Factors a unitary field into four symmetry fields iff every pointwise
/// determinant is within `verify_tol` of {±1}; otherwise reports the first
/// offending base point with its determinant obstruction.
pub fn field_four_factor(
    f: &MatrixField,
    tol: &Tolerance,
) -> Result<FieldFourFactorOutcome, CenterError> {
    for p in f.points() {
        let fiber = f.value(p).unwrap();
        let defect = fiber.unitary_defect();
        if defect > tol.unitary_tol {
            return Err(CenterError::FiberNotUnitary {
                point: p.clone(),
                defect,
            });
        }
    }

    // The obstruction preempts any factoring: scan determinants first.
    for p in f.points() {
        let fiber = f.value(p).unwrap();
        if let Some(certificate) = det_obstruction(fiber, tol).map_err(|e| match e {
            crate::obstruct::ObstructError::Mat(m) => CenterError::Mat(m),
            crate::obstruct::ObstructError::Factor(e) => CenterError::Factor(e),
        })? {
            return Ok(FieldFourFactorOutcome::Obstructed {
                point: p.clone(),
                certificate,
            });
        }
    }

    let mut per_factor: [BTreeMap<String, ComplexMatrix>; 4] = Default::default();
    let mut residuals = Vec::with_capacity(f.points().len());
    for p in f.points() {
        let fiber = f.value(p).unwrap();
        let cert = radjavi_four_factor(fiber, tol)?;
        residuals.push((p.clone(), cert.residual));
        for (slot, factor) in per_factor.iter_mut().zip(cert.factors) {
            slot.insert(p.clone(), factor);
        }
    }
    let factors = per_factor.map(|values| {
        MatrixField::new(f.points().to_vec(), f.fiber_dim(), values)
            .expect("factor fields share the input shape")
    });
    Ok(FieldFourFactorOutcome::Factored { factors, residuals })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::{haar_random_unitary, DetMode};
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn labels(names: &[&str]) -> Vec<String> {
        names.iter().map(|s| s.to_string()).collect()
    }

    fn seeded_unitary_field(points: &[&str], dim: usize, seed: u64, mode: DetMode) -> MatrixField {
        let values = points
            .iter()
            .enumerate()
            .map(|(i, p)| {
                (
                    p.to_string(),
                    haar_random_unitary(dim, seed + i as u64, mode),
                )
            })
            .collect();
        MatrixField::new(labels(points), dim, values).unwrap()
    }

    #[test]
    fn det_c_examples() {
        let eye = ComplexMatrix::identity(2);
        let f = MatrixField::constant(labels(&["a", "b"]), eye).unwrap();
        for (_, d) in det_c(&f) {
            assert!((d - Complex64::ONE).norm() <= 1e-14);
        }

        let mut values = BTreeMap::new();
        values.insert("a".to_string(), ComplexMatrix::scalar(2, c(0.0, 1.0)));
        values.insert(
            "b".to_string(),
            ComplexMatrix::diagonal(&[c(1.0, 0.0), c(-1.0, 0.0)]),
        );
        let g = MatrixField::new(labels(&["a", "b"]), 2, values).unwrap();
        for (_, d) in det_c(&g) {
            assert!((d + Complex64::ONE).norm() <= 1e-14);
        }
    }

    #[test]
    fn det_c_matches_cofactor_per_point() {
        // Per-point cofactor expansion at n = 3.
        fn cofactor3(a: &ComplexMatrix) -> Complex64 {
            a[(0, 0)] * (a[(1, 1)] * a[(2, 2)] - a[(1, 2)] * a[(2, 1)])
                - a[(0, 1)] * (a[(1, 0)] * a[(2, 2)] - a[(1, 2)] * a[(2, 0)])
                + a[(0, 2)] * (a[(1, 0)] * a[(2, 1)] - a[(1, 1)] * a[(2, 0)])
        }
        let f = seeded_unitary_field(&["x", "y"], 3, 40, DetMode::Free);
        for (p, d) in det_c(&f) {
            let oracle = cofactor3(f.value(&p).unwrap());
            assert!((d - oracle).norm() <= 1e-10);
        }
    }

    #[test]
    fn detc_properties_hold_on_seeded_fields() {
        let tol = Tolerance::default();
        let f = seeded_unitary_field(&["p", "q", "r"], 3, 7, DetMode::Free);
        let g = seeded_unitary_field(&["p", "q", "r"], 3, 8, DetMode::Free);
        assert!(detc_properties_check(&f, &g, &tol).unwrap());

        let eye_field =
            MatrixField::constant(labels(&["p", "q"]), ComplexMatrix::identity(2)).unwrap();
        assert!(detc_properties_check(&eye_field, &eye_field, &tol).unwrap());
    }

    #[test]
    fn detc_properties_detect_corruption() {
        // The determinant identities are exact in exact arithmetic, so the
        // negative control corrupts a fiber with a huge entry: the two
        // evaluation routes (det of the product vs product of dets) then
        // disagree far beyond the 1e-9 absolute tolerance.
        let tol = Tolerance::default();
        let f = seeded_unitary_field(&["p", "q"], 3, 9, DetMode::Free);
        let mut bad_values = BTreeMap::new();
        for p in f.points() {
            bad_values.insert(p.clone(), f.value(p).unwrap().clone());
        }
        let mut corrupted = f.value("q").unwrap().clone();
        corrupted[(0, 0)] += c(1e12, 3e11);
        bad_values.insert("q".to_string(), corrupted);
        let g = MatrixField::new(labels(&["p", "q"]), 3, bad_values).unwrap();
        assert!(!detc_properties_check(&f, &g, &tol).unwrap());
    }

    #[test]
    fn detc_properties_reject_shape_mismatch() {
        let tol = Tolerance::default();
        let f = seeded_unitary_field(&["p", "q"], 2, 9, DetMode::Free);
        let shrunk = MatrixField::constant(labels(&["p"]), ComplexMatrix::identity(2)).unwrap();
        assert!(matches!(
            detc_properties_check(&f, &shrunk, &tol),
            Err(CenterError::ShapeMismatch { .. })
        ));
    }

    #[test]
    fn field_four_factor_mixed_dets() {
        let tol = Tolerance::default();
        let mut values = BTreeMap::new();
        values.insert("a".to_string(), ComplexMatrix::scalar(2, c(0.0, 1.0)));
        values.insert("b".to_string(), ComplexMatrix::identity(2));
        let f = MatrixField::new(labels(&["a", "b"]), 2, values).unwrap();
        match field_four_factor(&f, &tol).unwrap() {
            FieldFourFactorOutcome::Factored { factors, residuals } => {
                for field in &factors {
                    assert!(field.is_symmetry_field(&tol));
                }
                for (p, r) in &residuals {
                    assert!(*r <= 1e-10, "residual at {p}: {r}");
                }
                // Ordered pointwise product reproduces the input.
                let prod = factors[0]
                    .pointwise_mul(&factors[1])
                    .and_then(|m| m.pointwise_mul(&factors[2]))
                    .and_then(|m| m.pointwise_mul(&factors[3]))
                    .unwrap();
                for p in f.points() {
                    assert!(
                        (prod.value(p).unwrap() - f.value(p).unwrap()).operator_norm() <= 1e-10
                    );
                }
            }
            FieldFourFactorOutcome::Obstructed { point, .. } => {
                panic!("unexpected obstruction at {point}")
            }
        }
    }

    #[test]
    fn field_four_factor_constant_bad_phase() {
        let tol = Tolerance::default();
        let f = MatrixField::constant(
            labels(&["a", "b"]),
            ComplexMatrix::scalar(3, Complex64::from_polar(1.0, PI / 5.0)),
        )
        .unwrap();
        match field_four_factor(&f, &tol).unwrap() {
            FieldFourFactorOutcome::Obstructed { point, certificate } => {
                assert_eq!(point, "a");
                let expected = Complex64::from_polar(1.0, 3.0 * PI / 5.0);
                match certificate.obstruction {
                    crate::obstruct::Obstruction::Determinant { det, .. } => {
                        assert!((det - expected).norm() <= 1e-12);
                    }
                    ref other => panic!("unexpected kind {}", other.kind()),
                }
            }
            FieldFourFactorOutcome::Factored { .. } => panic!("expected obstruction"),
        }
    }

    #[test]
    fn field_four_factor_names_the_bad_point() {
        let tol = Tolerance::default();
        let mut values = BTreeMap::new();
        values.insert("good".to_string(), haar_random_unitary(2, 1, DetMode::PlusOne));
        values.insert(
            "offender".to_string(),
            ComplexMatrix::scalar(2, Complex64::from_polar(1.0, PI / 4.0)),
        );
        values.insert("fine".to_string(), haar_random_unitary(2, 2, DetMode::MinusOne));
        let f = MatrixField::new(labels(&["good", "offender", "fine"]), 2, values).unwrap();
        match field_four_factor(&f, &tol).unwrap() {
            FieldFourFactorOutcome::Obstructed { point, .. } => assert_eq!(point, "offender"),
            FieldFourFactorOutcome::Factored { .. } => panic!("expected obstruction"),
        }
    }

    #[test]
    fn field_json_round_trip() {
        let f = seeded_unitary_field(&["u", "v"], 2, 33, DetMode::Free);
        let text = serde_json::to_string(&f).unwrap();
        let back: MatrixField = serde_json::from_str(&text).unwrap();
        assert!(back.same_shape(&f));
        for p in f.points() {
            assert!(back.value(p).unwrap() == f.value(p).unwrap());
        }
    }
}
