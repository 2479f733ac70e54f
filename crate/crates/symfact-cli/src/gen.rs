//! Test-unitary generation: Haar samples, arc-confined spectra, and
//! rational finite-spectrum instances. Deterministic per (kind, dim, seed).

use std::f64::consts::PI;
use std::path::Path;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use symfact::factor::RationalAngle;
use symfact::{haar_random_unitary, ComplexMatrix, DetMode};

use crate::{emit, KindArg, EXIT_INVALID, EXIT_OK};

pub fn cmd_gen(
    kind: KindArg,
    dim: usize,
    seed: u64,
    det_normalize: Option<&str>,
    arc: Option<u8>,
    out: Option<&Path>,
) -> u8 {
    if dim == 0 {
        eprintln!("error: --dim must be at least 1");
        return EXIT_INVALID;
    }
    let matrix = match kind {
        KindArg::Haar => {
            let mode = match det_normalize {
                None => DetMode::Free,
                Some("+1") => DetMode::PlusOne,
                Some("-1") => DetMode::MinusOne,
                Some(other) => {
                    eprintln!("error: --det-normalize accepts +1 or -1, got {other:?}");
                    return EXIT_INVALID;
                }
            };
            haar_random_unitary(dim, seed, mode)
        }
        KindArg::Arc => {
            if det_normalize.is_some() {
                eprintln!("error: --det-normalize applies to the haar kind only");
                return EXIT_INVALID;
            }
            let k = arc.unwrap_or(1);
            if !(1..=4).contains(&k) {
                eprintln!("error: --arc must be in 1..=4, got {k}");
                return EXIT_INVALID;
            }
            arc_unitary(dim, seed, k)
        }
        KindArg::FiniteSpectrum => {
            if det_normalize.is_some() {
                eprintln!("error: --det-normalize applies to the haar kind only");
                return EXIT_INVALID;
            }
            finite_spectrum_unitary(dim, seed)
        }
    };
    match emit(&matrix, out) {
        Ok(()) => EXIT_OK,
        Err(code) => code,
    }
}

/// Eigenvalues sampled strictly inside the open arc `C_k` (4% inset from
/// both endpoints), conjugated by a Haar basis.
fn arc_unitary(dim: usize, seed: u64, k: u8) -> ComplexMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let base = PI / 2.0 * (k as f64 - 1.0);
    let eigs: Vec<Complex64> = (0..dim)
        .map(|_| {
            let frac: f64 = rng.random_range(0.04..0.96);
            Complex64::from_polar(1.0, base + frac * PI / 2.0)
        })
        .collect();
    let q = haar_random_unitary(dim, seed ^ 0x9e3779b97f4a7c15, DetMode::Free);
    ComplexMatrix::diagonal(&eigs).conjugate_by(&q)
}

/// Unitary whose spectrum consists of rational angles with half-turn
/// denominator at most 6, multiplicities divisible by the matching block
/// size, filled out with eigenvalue 1.
fn finite_spectrum_unitary(dim: usize, seed: u64) -> ComplexMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut palette: Vec<RationalAngle> = Vec::new();
    for q in 1..=12i64 {
        for p in 1..q {
            let angle = RationalAngle::new(p, q).expect("q positive");
            if angle.half_turn_fraction().1 <= 6 && !palette.contains(&angle) {
                palette.push(angle);
            }
        }
    }

    let mut eigs: Vec<Complex64> = Vec::with_capacity(dim);
    let mut used: Vec<RationalAngle> = Vec::new();
    let mut remaining = dim;
    for _ in 0..3 {
        if remaining == 0 {
            break;
        }
        let angle = palette[rng.random_range(0..palette.len())];
        if used.contains(&angle) {
            continue;
        }
        let (p, q) = angle.half_turn_fraction();
        let block = if p == 0 { 1 } else { 2 * q as usize };
        if block > remaining {
            continue;
        }
        let copies = rng.random_range(1..=remaining / block);
        for _ in 0..copies * block {
            eigs.push(angle.value());
        }
        used.push(angle);
        remaining -= copies * block;
    }
    for _ in 0..remaining {
        eigs.push(Complex64::ONE);
    }
    let q = haar_random_unitary(dim, seed ^ 0x517cc1b727220a95, DetMode::Free);
    ComplexMatrix::diagonal(&eigs).conjugate_by(&q)
}
