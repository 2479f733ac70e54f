//! Conjugation-closure pairing of unit-circle eigenvalue multisets.
//!
//! Shared by the two-symmetry construction and the matching spectral
//! obstruction so the two stay an exact dichotomy.

use num_complex::Complex64;

/// Successful pairing: `(upper, lower)` index pairs with
/// `λ_lower ≈ conj(λ_upper)`, plus the indices self-paired at ±1.
#[derive(Debug, Clone)]
pub struct ConjugationPairing {
    pub pairs: Vec<(usize, usize)>,
    pub self_paired: Vec<usize>,
}

#[derive(Debug, Clone)]
pub enum PairingOutcome {
    Paired(ConjugationPairing),
    /// `eigenvalue` has no conjugate partner; `margin` is its distance to
    /// the nearest legal resolution (best unused partner or ±1).
    Unmatched {
        index: usize,
        eigenvalue: Complex64,
        margin: f64,
    },
}

fn dist_to_real_units(z: Complex64) -> f64 {
    let one = Complex64::ONE;
    (z - one).norm().min((z + one).norm())
}

/// Greedy pairing of a unit-modulus multiset with its conjugate.
///
/// Values within `cluster_tol` of ±1 are self-paired; the rest are split by
/// the sign of the imaginary part, and each upper-half value is matched to
/// the nearest unused lower-half value within `cluster_tol`.
pub fn conjugation_pairing(eigs: &[Complex64], cluster_tol: f64) -> PairingOutcome {
    let mut self_paired = Vec::new();
    let mut uppers: Vec<usize> = Vec::new();
    let mut lowers: Vec<usize> = Vec::new();

    for (i, z) in eigs.iter().enumerate() {
        if dist_to_real_units(*z) <= cluster_tol {
            self_paired.push(i);
        } else if z.im > 0.0 {
            uppers.push(i);
        } else {
            lowers.push(i);
        }
    }

    let mut used = vec![false; eigs.len()];
    let mut pairs = Vec::with_capacity(uppers.len());
    for &i in &uppers {
        let want = eigs[i].conj();
        let best = lowers
            .iter()
            .copied()
            .filter(|&j| !used[j])
            .map(|j| (j, (eigs[j] - want).norm()))
            .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap());
        match best {
            Some((j, d)) if d <= cluster_tol => {
                used[j] = true;
                pairs.push((i, j));
            }
            other => {
                let partner = other.map_or(f64::INFINITY, |(_, d)| d);
                return PairingOutcome::Unmatched {
                    index: i,
                    eigenvalue: eigs[i],
                    margin: partner.min(dist_to_real_units(eigs[i])),
                };
            }
        }
    }
    if let Some(&j) = lowers.iter().find(|&&j| !used[j]) {
        let want = eigs[j].conj();
        let partner = uppers
            .iter()
            .map(|&i| (eigs[i] - want).norm())
            .fold(f64::INFINITY, f64::min);
        return PairingOutcome::Unmatched {
            index: j,
            eigenvalue: eigs[j],
            margin: partner.min(dist_to_real_units(eigs[j])),
        };
    }

    PairingOutcome::Paired(ConjugationPairing { pairs, self_paired })
}
