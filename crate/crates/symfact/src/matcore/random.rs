//! Seeded Haar-distributed unitary sampling.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::{eigen, ComplexMatrix};

/// Determinant normalization applied after the Haar draw.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DetMode {
    Free,
    PlusOne,
    MinusOne,
}

/// Haar-distributed unitary, deterministic per `(dim, seed, det_mode)`.
///
/// A seeded complex Gaussian matrix is orthonormalized by QR with the phase
/// convention that the triangular factor has positive real diagonal. For
/// `PlusOne`/`MinusOne` the first column is rescaled so the determinant lands
/// on the requested sign exactly (up to roundoff).
pub fn haar_random_unitary(dim: usize, seed: u64, det_mode: DetMode) -> ComplexMatrix {
    assert!(dim >= 1, "dimension must be at least 1");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = ComplexMatrix::from_fn(dim, |_, _| {
        let re: f64 = StandardNormal.sample(&mut rng);
        let im: f64 = StandardNormal.sample(&mut rng);
        Complex64::new(re, im)
    });

    let qr = eigen::to_na(&g).qr();
    let (naq, nar) = (qr.q(), qr.r());
    let mut u = ComplexMatrix::from_fn(dim, |i, j| naq[(i, j)]);
    for j in 0..dim {
        let r = nar[(j, j)];
        if r.norm() > 0.0 {
            let phase = r / r.norm();
            for i in 0..dim {
                u[(i, j)] *= phase;
            }
        }
    }

    let target = match det_mode {
        DetMode::Free => return u,
        DetMode::PlusOne => Complex64::ONE,
        DetMode::MinusOne => -Complex64::ONE,
    };
    let det = u.determinant();
    let zeta = target / det;
    for i in 0..dim {
        u[(i, 0)] *= zeta;
    }
    u
}
