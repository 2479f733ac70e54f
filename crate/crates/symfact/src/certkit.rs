//! Independent verification and serialization of certificates.
//!
//! Verification recomputes every defect from scratch; stored residuals are
//! advisory only, so certificates can cross implementations.

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::factor::{det_distance_to_sign, FactorizationCertificate};
use crate::matcore::{ComplexMatrix, MatError, Tolerance};

/// Errors raised by verification and serialization.
#[derive(Debug, Clone, thiserror::Error)]
pub enum CertkitError {
    #[error("certificate shapes are inconsistent: {reason}")]
    ShapeMismatch { reason: String },
    #[error(transparent)]
    Mat(#[from] MatError),
}

/// Schema violation with the JSON field path that caused it.
#[derive(Debug, Clone, thiserror::Error)]
#[error("schema error at {path}: {message}")]
pub struct SchemaError {
    pub path: String,
    pub message: String,
}

/// Self-adjointness and involution defects of one claimed symmetry factor.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct FactorDefect {
    pub self_adjoint: f64,
    pub involution: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReportVerdict {
    Pass,
    Fail,
}

/// Recomputed defects for a factorization certificate.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerificationReport {
    pub factor_defects: Vec<FactorDefect>,
    pub product_residual: f64,
    pub verdict: ReportVerdict,
    pub tol: Tolerance,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.verdict == ReportVerdict::Pass
    }
}

/// Recomputes all defects of a certificate from scratch, ignoring the
/// stored residual. Passes iff every defect and the product residual are
/// within `verify_tol`.
pub fn verify_certificate(
    cert: &FactorizationCertificate,
    tol: &Tolerance,
) -> Result<VerificationReport, CertkitError> {
    let dim = cert.target.dim();
    if cert.factors.is_empty() {
        return Err(CertkitError::ShapeMismatch {
            reason: "certificate has no factors".into(),
        });
    }
    for (i, f) in cert.factors.iter().enumerate() {
        if f.dim() != dim {
            return Err(CertkitError::ShapeMismatch {
                reason: format!(
                    "factor {i} has dimension {}, target has {dim}",
                    f.dim()
                ),
            });
        }
    }

    let eye = ComplexMatrix::identity(dim);
    let factor_defects: Vec<FactorDefect> = cert
        .factors
        .iter()
        .map(|f| FactorDefect {
            self_adjoint: (f - &f.adjoint()).operator_norm(),
            involution: (&(f * f) - &eye).operator_norm(),
        })
        .collect();
    let product_residual = (&cert.product() - &cert.target).operator_norm();

    let ok = product_residual <= tol.verify_tol
        && factor_defects
            .iter()
            .all(|d| d.self_adjoint <= tol.verify_tol && d.involution <= tol.verify_tol);
    Ok(VerificationReport {
        factor_defects,
        product_residual,
        verdict: if ok {
            ReportVerdict::Pass
        } else {
            ReportVerdict::Fail
        },
        tol: *tol,
    })
}

/// Serializes any of the wire types to JSON, rejecting non-finite floats.
pub fn to_json<T: Serialize>(value: &T) -> Result<String, SchemaError> {
    serde_json::to_string(value).map_err(|e| SchemaError {
        path: "$".into(),
        message: e.to_string(),
    })
}

/// Deserializes JSON with schema validation, reporting the offending field
/// path on failure.
pub fn from_json<T: DeserializeOwned>(text: &str) -> Result<T, SchemaError> {
    let mut de = serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(&mut de).map_err(|e| SchemaError {
        path: e.path().to_string(),
        message: e.inner().to_string(),
    })
}

/// Certified lower bound on the operator-norm distance from `U` to the set
/// of four-symmetry products in its dimension.
///
/// Any product of symmetries has determinant ±1, and `|det U − det V| ≤
/// n·‖U − V‖` for n-dimensional unitaries, so `dist(det U, {±1})/n` is a
/// valid (conservative) bound.
pub fn distance_lower_bound_s4(u: &ComplexMatrix, tol: &Tolerance) -> Result<f64, CertkitError> {
    let defect = u.unitary_defect();
    if defect > tol.unitary_tol {
        return Err(MatError::NotUnitary {
            defect,
            tol: tol.unitary_tol,
        }
        .into());
    }
    let (_, _, distance) = det_distance_to_sign(u);
    Ok(distance / u.dim() as f64)
}
