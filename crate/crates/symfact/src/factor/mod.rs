//! Constructive factorizations of unitaries into products of symmetries.

mod lemmas;
mod pairing;
mod radjavi;
mod two;
mod weyl;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::matcore::{ComplexMatrix, MatError, Tolerance};

pub use lemmas::{lemma_four_sym_step, lemma_two_uni_step, FourSymmetryStep, TwoUnitaryStep};
pub use pairing::{conjugation_pairing, ConjugationPairing, PairingOutcome};
pub use radjavi::{det_distance_to_sign, radjavi_four_factor};
pub use two::{conjugate_pair_two_factor, intertwiner_to_symmetry, two_symmetry_factor};
pub use weyl::{
    clock_matrix, finite_spectrum_four_factor, rational_angle_from_unit, scalar_four_factor,
    shift_matrix, three_factor_scalar, weyl_scalar_four_factor,
};

/// Construction that produced a certificate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ConjugatePair,
    TwoSymmetry,
    RadjaviFour,
    WeylScalar,
    FiniteSpectrumFour,
    ThreeScalar,
    LemmaTwoUni,
    LemmaFourSym,
}

impl Method {
    pub fn tag(&self) -> &'static str {
        match self {
            Method::ConjugatePair => "conjugate_pair",
            Method::TwoSymmetry => "two_symmetry",
            Method::RadjaviFour => "radjavi_four",
            Method::WeylScalar => "weyl_scalar",
            Method::FiniteSpectrumFour => "finite_spectrum_four",
            Method::ThreeScalar => "three_scalar",
            Method::LemmaTwoUni => "lemma_two_uni",
            Method::LemmaFourSym => "lemma_four_sym",
        }
    }
}

/// Errors raised by the factorization constructions.
#[derive(Debug, Clone, thiserror::Error)]
pub enum FactorError {
    #[error(transparent)]
    Mat(#[from] MatError),
    #[error("eigenvalue {eigenvalue} has no conjugate partner (margin {margin:.3e})")]
    SpectrumNotConjSymmetric { eigenvalue: Complex64, margin: f64 },
    #[error("determinant {det} is at distance {distance:.3e} from {{+1, -1}}")]
    DeterminantObstruction { det: Complex64, distance: f64 },
    #[error(
        "multiplicity {multiplicity} for angle {p}/{q} is not divisible by the minimal block {minimal_block}"
    )]
    MultiplicityConstraint {
        p: u64,
        q: u64,
        multiplicity: usize,
        minimal_block: usize,
    },
    #[error("{value} is not a fourth root of unity")]
    NotFourthRoot { value: Complex64 },
    #[error("dimension {dim} must be even")]
    OddDimension { dim: usize },
    #[error("dimension {dim} must be divisible by {divisor}")]
    DimensionNotDivisible { dim: usize, divisor: usize },
    #[error("projection rank {actual} does not match expected rank {expected}")]
    RankMismatch { expected: usize, actual: usize },
    #[error("operators fail to commute: defect {defect:.3e}")]
    NotCommuting { defect: f64 },
    #[error("matrix is not an orthogonal projection: defect {defect:.3e}")]
    NotProjection { defect: f64 },
    #[error("W does not intertwine U with its adjoint: defect {defect:.3e}")]
    NotIntertwiner { defect: f64 },
    #[error("angles in a finite-spectrum specification must be pairwise distinct")]
    DuplicateAngle,
    #[error("rational angle denominator must be positive")]
    ZeroDenominator,
    #[error("multiplicities must be positive")]
    ZeroMultiplicity,
}

/// Reduced fraction `p/q` denoting the unit complex number `e^{2πi p/q}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RationalAngle {
    p: u64,
    q: u64,
}

impl RationalAngle {
    /// Normalizes to `0 <= p < q` with `gcd(p, q) = 1`.
    pub fn new(p: i64, q: i64) -> Result<Self, FactorError> {
        if q == 0 {
            return Err(FactorError::ZeroDenominator);
        }
        let (mut p, q) = if q < 0 { (-p, -q) } else { (p, q) };
        p = p.rem_euclid(q);
        let g = gcd(p as u64, q as u64);
        Ok(RationalAngle {
            p: p as u64 / g,
            q: q as u64 / g,
        })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    /// `e^{2πi p/q}`.
    pub fn value(&self) -> Complex64 {
        Complex64::from_polar(1.0, std::f64::consts::TAU * self.p as f64 / self.q as f64)
    }

    /// The same angle written as `e^{iπ p'/q'}` with `p'/q'` reduced;
    /// returns `(p', q')`.
    pub fn half_turn_fraction(&self) -> (u64, u64) {
        let g = gcd(2 * self.p, self.q);
        ((2 * self.p) / g, self.q / g)
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a.max(1)
    } else {
        gcd(b, a % b)
    }
}

/// Prescribed finite spectrum: pairwise-distinct rational angles with
/// positive multiplicities; the ambient dimension is their sum.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiniteSpectrumSpec {
    entries: Vec<(RationalAngle, usize)>,
}

impl FiniteSpectrumSpec {
    pub fn new(entries: Vec<(RationalAngle, usize)>) -> Result<Self, FactorError> {
        for (i, (a, m)) in entries.iter().enumerate() {
            if *m == 0 {
                return Err(FactorError::ZeroMultiplicity);
            }
            if entries[..i].iter().any(|(b, _)| b == a) {
                return Err(FactorError::DuplicateAngle);
            }
        }
        Ok(FiniteSpectrumSpec { entries })
    }

    pub fn entries(&self) -> &[(RationalAngle, usize)] {
        &self.entries
    }

    pub fn total_dim(&self) -> usize {
        self.entries.iter().map(|(_, m)| m).sum()
    }
}

/// Ordered symmetry factors for a target unitary, plus the recomputed
/// residual `‖(∏ factors) − target‖`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FactorizationCertificate {
    pub target: ComplexMatrix,
    pub factors: Vec<ComplexMatrix>,
    pub method: Method,
    pub residual: f64,
    pub tol: Tolerance,
}

impl FactorizationCertificate {
    /// Bundles factors with their target, measuring the product residual.
    /// Fails with `ConvergenceFailure` if the residual misses `verify_tol`.
    pub fn assemble(
        target: ComplexMatrix,
        factors: Vec<ComplexMatrix>,
        method: Method,
        tol: &Tolerance,
    ) -> Result<Self, FactorError> {
        let product = ComplexMatrix::product_of(&factors);
        let residual = (&product - &target).operator_norm();
        if residual > tol.verify_tol {
            return Err(MatError::ConvergenceFailure {
                residual,
                tol: tol.verify_tol,
            }
            .into());
        }
        Ok(FactorizationCertificate {
            target,
            factors,
            method,
            residual,
            tol: *tol,
        })
    }

    /// Left-to-right product of the stored factors.
    pub fn product(&self) -> ComplexMatrix {
        ComplexMatrix::product_of(&self.factors)
    }

    /// Conjugates target and every factor by `q`, preserving validity.
    pub fn conjugated(&self, q: &ComplexMatrix) -> FactorizationCertificate {
        FactorizationCertificate {
            target: self.target.conjugate_by(q),
            factors: self.factors.iter().map(|f| f.conjugate_by(q)).collect(),
            method: self.method,
            residual: self.residual,
            tol: self.tol,
        }
    }

    /// Extends the factor list to `len` with trailing identity symmetries.
    pub fn padded_to(&self, len: usize) -> FactorizationCertificate {
        let mut factors = self.factors.clone();
        while factors.len() < len {
            factors.push(ComplexMatrix::identity(self.target.dim()));
        }
        FactorizationCertificate {
            target: self.target.clone(),
            factors,
            method: self.method,
            residual: self.residual,
            tol: self.tol,
        }
    }
}

#[cfg(test)]
mod tests;
