//! Machine-checkable impossibility certificates and the membership
//! classifier for the chain of symmetry-product sets 𝒮 ⊆ 𝒮² ⊆ 𝒮³ ⊆ 𝒮⁴.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::factor::{
    self, conjugation_pairing, det_distance_to_sign, FactorError, FactorizationCertificate,
    PairingOutcome,
};
use crate::matcore::{principal_arg, ComplexMatrix, MatError, Tolerance};

/// Errors raised by obstruction checks and classification.
#[derive(Debug, Clone, thiserror::Error)]
pub enum ObstructError {
    #[error(transparent)]
    Mat(#[from] MatError),
    #[error(transparent)]
    Factor(#[from] FactorError),
}

mod complex_pair {
    use num_complex::Complex64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(z: &Complex64, s: S) -> Result<S::Ok, S::Error> {
        [z.re, z.im].serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Complex64, D::Error> {
        let [re, im] = <[f64; 2]>::deserialize(d)?;
        Ok(Complex64::new(re, im))
    }
}

/// Kind-specific evidence payload, re-checkable from the target alone.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", content = "evidence", rename_all = "snake_case")]
pub enum Obstruction {
    /// Determinant off {±1}: excludes every finite product length.
    Determinant {
        #[serde(with = "complex_pair")]
        det: Complex64,
        distance: f64,
    },
    /// Eigenvalue without a conjugate partner: excludes length 2 (and, in
    /// the degenerate single-eigenvalue form, length 1: the spectrum of a
    /// symmetry lies in {±1}).
    ConjSpectrum {
        #[serde(with = "complex_pair")]
        unmatched: Complex64,
        margin: f64,
    },
    /// Spectrum strictly inside one open quarter arc `C_k`: excludes
    /// length 3.
    QuadrantArc { arc: u8, margin: f64 },
}

impl Obstruction {
    pub fn kind(&self) -> &'static str {
        match self {
            Obstruction::Determinant { .. } => "determinant",
            Obstruction::ConjSpectrum { .. } => "conj_spectrum",
            Obstruction::QuadrantArc { .. } => "quadrant_arc",
        }
    }
}

/// A checkable witness that no factorization of a given length exists.
///
/// `excluded_length` is the largest length in the classifier chain that the
/// certificate rules out; a determinant obstruction additionally excludes
/// every finite length beyond it (see [`ObstructionCertificate::excludes_length`]).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ObstructionCertificate {
    pub target: ComplexMatrix,
    pub excluded_length: u32,
    #[serde(flatten)]
    pub obstruction: Obstruction,
}

impl ObstructionCertificate {
    /// True iff the certificate rules out products of `len` symmetries.
    pub fn excludes_length(&self, len: u32) -> bool {
        match self.obstruction {
            Obstruction::Determinant { .. } => true,
            _ => len <= self.excluded_length,
        }
    }
}

/// Determinant obstruction: fires iff `dist(det U, {±1}) > verify_tol`.
pub fn det_obstruction(
    u: &ComplexMatrix,
    tol: &Tolerance,
) -> Result<Option<ObstructionCertificate>, ObstructError> {
    require_unitary(u, tol)?;
    let (det, _, distance) = det_distance_to_sign(u);
    if distance > tol.verify_tol {
        Ok(Some(ObstructionCertificate {
            target: u.clone(),
            excluded_length: 4,
            obstruction: Obstruction::Determinant { det, distance },
        }))
    } else {
        Ok(None)
    }
}

/// Conjugation-symmetry obstruction: fires iff the eigenvalue multiset
/// fails conjugation closure beyond `cluster_tol`. Excludes length 2.
pub fn conj_spectrum_obstruction(
    u: &ComplexMatrix,
    tol: &Tolerance,
) -> Result<Option<ObstructionCertificate>, ObstructError> {
    let sd = u.spectral_decompose(tol)?;
    match conjugation_pairing(sd.eigenvalues(), tol.cluster_tol) {
        PairingOutcome::Paired(_) => Ok(None),
        PairingOutcome::Unmatched {
            eigenvalue, margin, ..
        } => Ok(Some(ObstructionCertificate {
            target: u.clone(),
            excluded_length: 2,
            obstruction: Obstruction::ConjSpectrum {
                unmatched: eigenvalue,
                margin,
            },
        })),
    }
}

/// The four open arcs of the unit circle between the fourth roots of unity.
/// Returns the arc index `1..=4` containing `z`, ignoring boundary margins.
fn arc_index(z: Complex64) -> u8 {
    let frac = principal_arg(z) / std::f64::consts::TAU;
    ((frac * 4.0).floor() as u8).min(3) + 1
}

fn dist_to_fourth_roots(z: Complex64) -> f64 {
    [
        Complex64::ONE,
        Complex64::I,
        -Complex64::ONE,
        -Complex64::I,
    ]
    .iter()
    .map(|r| (z - r).norm())
    .fold(f64::INFINITY, f64::min)
}

/// Quadrant obstruction: fires iff all eigenvalues lie strictly inside one
/// open arc `C_k` with margin `ε = dist(sp U, {1, i, −1, −i}) > verify_tol`.
/// Excludes length 3.
pub fn quadrant_obstruction(
    u: &ComplexMatrix,
    tol: &Tolerance,
) -> Result<Option<ObstructionCertificate>, ObstructError> {
    let sd = u.spectral_decompose(tol)?;
    let mut arc = None;
    let mut margin = f64::INFINITY;
    for lam in sd.eigenvalues() {
        let eps = dist_to_fourth_roots(*lam);
        if eps <= tol.verify_tol {
            return Ok(None);
        }
        margin = margin.min(eps);
        let k = arc_index(*lam);
        match arc {
            None => arc = Some(k),
            Some(prev) if prev == k => {}
            Some(_) => return Ok(None),
        }
    }
    let Some(arc) = arc else { return Ok(None) };
    Ok(Some(ObstructionCertificate {
        target: u.clone(),
        excluded_length: 3,
        obstruction: Obstruction::QuadrantArc { arc, margin },
    }))
}

/// Per-length verdict in a membership report.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    Member {
        certificate: Box<FactorizationCertificate>,
    },
    NonMember {
        obstruction: Box<ObstructionCertificate>,
    },
    Unknown,
}

impl Verdict {
    pub fn is_member(&self) -> bool {
        matches!(self, Verdict::Member { .. })
    }

    pub fn is_non_member(&self) -> bool {
        matches!(self, Verdict::NonMember { .. })
    }
}

/// Membership verdicts for product lengths 1..=4 with their witnesses.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MembershipReport {
    pub lengths: Vec<LengthVerdict>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LengthVerdict {
    pub length: u32,
    #[serde(flatten)]
    pub verdict: Verdict,
}

impl MembershipReport {
    pub fn verdict(&self, length: u32) -> &Verdict {
        &self.lengths[(length - 1) as usize].verdict
    }
}

/// Classifies membership of `U` in the products of 1..=4 symmetries.
///
/// Length 1 is decided by the symmetry predicate, length 2 by the
/// two-symmetry construction against the conjugation obstruction (an exact
/// dichotomy), length 4 by the determinant dichotomy. Length 3 is decided
/// where a construction or obstruction applies and is otherwise `unknown`.
pub fn classify_membership(
    u: &ComplexMatrix,
    tol: &Tolerance,
) -> Result<MembershipReport, ObstructError> {
    require_unitary(u, tol)?;

    // Length 1.
    let l1 = if u.is_symmetry(tol) {
        let cert = FactorizationCertificate::assemble(
            u.clone(),
            vec![u.clone()],
            factor::Method::TwoSymmetry,
            tol,
        )
        .map_err(ObstructError::from)?;
        Verdict::Member {
            certificate: Box::new(cert),
        }
    } else {
        Verdict::NonMember {
            obstruction: Box::new(length_one_witness(u, tol)?),
        }
    };

    // Length 2: exact dichotomy.
    let l2 = match factor::two_symmetry_factor(u, tol) {
        Ok(cert) => Verdict::Member {
            certificate: Box::new(cert),
        },
        Err(FactorError::SpectrumNotConjSymmetric { .. }) => {
            let cert = conj_spectrum_obstruction(u, tol)?
                .expect("pairing failure implies the spectral obstruction fires");
            Verdict::NonMember {
                obstruction: Box::new(cert),
            }
        }
        Err(e) => return Err(e.into()),
    };

    // Length 3: padded shorter certificates, scalar constructions, the
    // quadrant obstruction, otherwise honestly unknown.
    let l3 = if let Verdict::Member { certificate } = &l1 {
        Verdict::Member {
            certificate: Box::new(certificate.padded_to(3)),
        }
    } else if let Verdict::Member { certificate } = &l2 {
        Verdict::Member {
            certificate: Box::new(certificate.padded_to(3)),
        }
    } else if let Some(cert) = scalar_three_member(u, tol)? {
        Verdict::Member {
            certificate: Box::new(cert),
        }
    } else if let Some(obs) = quadrant_obstruction(u, tol)? {
        Verdict::NonMember {
            obstruction: Box::new(obs),
        }
    } else {
        Verdict::Unknown
    };

    // Length 4: determinant dichotomy.
    let l4 = match factor::radjavi_four_factor(u, tol) {
        Ok(cert) => Verdict::Member {
            certificate: Box::new(cert),
        },
        Err(FactorError::DeterminantObstruction { .. }) => {
            let cert = det_obstruction(u, tol)?
                .expect("determinant rejection implies the obstruction fires");
            Verdict::NonMember {
                obstruction: Box::new(cert),
            }
        }
        Err(e) => return Err(e.into()),
    };

    Ok(MembershipReport {
        lengths: vec![
            LengthVerdict {
                length: 1,
                verdict: l1,
            },
            LengthVerdict {
                length: 2,
                verdict: l2,
            },
            LengthVerdict {
                length: 3,
                verdict: l3,
            },
            LengthVerdict {
                length: 4,
                verdict: l4,
            },
        ],
    })
}

/// Witness that a non-symmetry unitary is outside 𝒮: the strongest firing
/// obstruction, or the degenerate spectral witness (an eigenvalue off {±1},
/// impossible for a symmetry) when none of the longer-range ones fire.
fn length_one_witness(
    u: &ComplexMatrix,
    tol: &Tolerance,
) -> Result<ObstructionCertificate, ObstructError> {
    if let Some(cert) = det_obstruction(u, tol)? {
        return Ok(cert);
    }
    if let Some(cert) = conj_spectrum_obstruction(u, tol)? {
        return Ok(cert);
    }
    if let Some(cert) = quadrant_obstruction(u, tol)? {
        return Ok(cert);
    }
    let sd = u.spectral_decompose(tol)?;
    let (lam, margin) = sd
        .eigenvalues()
        .iter()
        .map(|z| {
            let d = (z - Complex64::ONE).norm().min((z + Complex64::ONE).norm());
            (*z, d)
        })
        .max_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
        .expect("unitary has at least one eigenvalue");
    Ok(ObstructionCertificate {
        target: u.clone(),
        excluded_length: 1,
        obstruction: Obstruction::ConjSpectrum {
            unmatched: lam,
            margin,
        },
    })
}

/// Length-3 scalar members: ±(a symmetry), and ±i·I in even dimension.
fn scalar_three_member(
    u: &ComplexMatrix,
    tol: &Tolerance,
) -> Result<Option<FactorizationCertificate>, ObstructError> {
    let n = u.dim();
    let minus_u = u.scale(-Complex64::ONE);
    if minus_u.is_symmetry(tol) {
        let factors = vec![
            ComplexMatrix::scalar(n, -Complex64::ONE),
            minus_u,
            ComplexMatrix::identity(n),
        ];
        let cert = FactorizationCertificate::assemble(
            u.clone(),
            factors,
            factor::Method::ThreeScalar,
            tol,
        )
        .map_err(ObstructError::from)?;
        return Ok(Some(cert));
    }
    if n.is_multiple_of(2) {
        for root in [Complex64::I, -Complex64::I] {
            if (u - &ComplexMatrix::scalar(n, root)).operator_norm() <= tol.verify_tol {
                let mut cert = factor::three_factor_scalar(root, n)?;
                cert.target = u.clone();
                cert.residual = (&cert.product() - u).operator_norm();
                cert.tol = *tol;
                return Ok(Some(cert));
            }
        }
    }
    Ok(None)
}

fn require_unitary(u: &ComplexMatrix, tol: &Tolerance) -> Result<(), ObstructError> {
    let defect = u.unitary_defect();
    if defect > tol.unitary_tol {
        return Err(MatError::NotUnitary {
            defect,
            tol: tol.unitary_tol,
        }
        .into());
    }
    Ok(())
}
