//! Command-line front end: factor unitaries into symmetry products, check
//! certificates, classify membership, generate test unitaries, and run the
//! density demo.
//!
//! Exit codes: 0 success/member; 1 certified infeasible (obstruction
//! emitted); 2 invalid input; 3 verification failure. Data goes to stdout
//! or `--out`; diagnostics go to stderr.

mod gen;
mod jsonfmt;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;

use symfact::certkit::{self, distance_lower_bound_s4, verify_certificate};
use symfact::factor::{
    self, rational_angle_from_unit, scalar_four_factor, three_factor_scalar, FactorError,
    FactorizationCertificate, FiniteSpectrumSpec, Method, RationalAngle,
};
use symfact::obstruct::{
    classify_membership, conj_spectrum_obstruction, det_obstruction, quadrant_obstruction,
};
use symfact::{ComplexMatrix, Tolerance};

const EXIT_OK: u8 = 0;
const EXIT_INFEASIBLE: u8 = 1;
const EXIT_INVALID: u8 = 2;
const EXIT_VERIFY: u8 = 3;

/// Maximum denominator when recognizing rational eigenvalue angles.
const MAX_DENOMINATOR: u64 = 64;

#[derive(Parser)]
#[command(name = "symfact", version, about = "Factor unitary matrices into products of symmetries")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Factor a unitary read from a matrix JSON file.
    Factor {
        #[arg(long, value_enum)]
        method: MethodArg,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Override verify_tol (wins over SYMFACT_TOL).
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Re-verify a certificate from scratch.
    Check {
        cert: PathBuf,
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Print the membership report for product lengths 1..=4.
    Classify {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Emit a test unitary.
    Gen {
        #[arg(long, value_enum)]
        kind: KindArg,
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        seed: u64,
        /// Normalize the determinant to +1 or -1 (haar kind only).
        #[arg(long = "det-normalize", allow_hyphen_values = true)]
        det_normalize: Option<String>,
        /// Arc index 1..=4 (arc kind only).
        #[arg(long)]
        arc: Option<u8>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a named demonstration.
    Demo {
        #[arg(value_enum)]
        what: DemoArg,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Auto,
    Radjavi,
    Two,
    Weyl,
    #[value(name = "finite-spectrum")]
    FiniteSpectrum,
    #[value(name = "three-scalar")]
    ThreeScalar,
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Haar,
    Arc,
    #[value(name = "finite-spectrum")]
    FiniteSpectrum,
}

#[derive(Clone, Copy, ValueEnum)]
enum DemoArg {
    Density,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Factor {
            method,
            input,
            out,
            tol,
        } => cmd_factor(method, &input, out.as_deref(), tol),
        Command::Check { cert, tol } => cmd_check(&cert, tol),
        Command::Classify { input, tol } => cmd_classify(&input, tol),
        Command::Gen {
            kind,
            dim,
            seed,
            det_normalize,
            arc,
            out,
        } => gen::cmd_gen(kind, dim, seed, det_normalize.as_deref(), arc, out.as_deref()),
        Command::Demo { what } => match what {
            DemoArg::Density => cmd_demo_density(),
        },
    };
    ExitCode::from(code)
}

/// Resolves tolerances: defaults, then SYMFACT_TOL, then the flag.
fn resolve_tol(flag: Option<f64>) -> Tolerance {
    let mut tol = Tolerance::default();
    if let Ok(text) = std::env::var("SYMFACT_TOL") {
        match text.parse::<f64>() {
            Ok(v) if v > 0.0 => tol.verify_tol = v,
            _ => eprintln!("warning: ignoring unparsable SYMFACT_TOL={text:?}"),
        }
    }
    if let Some(v) = flag {
        tol.verify_tol = v;
    }
    tol
}

fn read_matrix(path: &Path) -> Result<ComplexMatrix, u8> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        eprintln!("error: cannot read {}: {e}", path.display());
        EXIT_INVALID
    })?;
    certkit::from_json::<ComplexMatrix>(&text).map_err(|e| {
        eprintln!("error: {}: {e}", path.display());
        EXIT_INVALID
    })
}

fn emit<T: Serialize>(value: &T, out: Option<&Path>) -> Result<(), u8> {
    let text = jsonfmt::to_json_17(value).map_err(|e| {
        eprintln!("error: serialization failed: {e}");
        EXIT_INVALID
    })?;
    match out {
        Some(path) => std::fs::write(path, text.as_bytes()).map_err(|e| {
            eprintln!("error: cannot write {}: {e}", path.display());
            EXIT_INVALID
        }),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn cmd_factor(method: MethodArg, input: &Path, out: Option<&Path>, tol_flag: Option<f64>) -> u8 {
    let tol = resolve_tol(tol_flag);
    let u = match read_matrix(input) {
        Ok(m) => m,
        Err(code) => return code,
    };

    let outcome = match method {
        MethodArg::Two => factor_two(&u, &tol),
        MethodArg::Radjavi => factor_radjavi(&u, &tol),
        MethodArg::Auto => factor_auto(&u, &tol),
        MethodArg::Weyl => factor_weyl(&u, &tol),
        MethodArg::FiniteSpectrum => factor_finite_spectrum(&u, &tol),
        MethodArg::ThreeScalar => factor_three_scalar(&u, &tol),
    };

    match outcome {
        Ok(cert) => {
            let report = match verify_certificate(&cert, &tol) {
                Ok(r) => r,
                Err(e) => {
                    eprintln!("error: self-verification failed: {e}");
                    return EXIT_VERIFY;
                }
            };
            if !report.passed() {
                eprintln!(
                    "error: produced certificate fails verification (residual {:.3e})",
                    report.product_residual
                );
                return EXIT_VERIFY;
            }
            match emit(&cert, out) {
                Ok(()) => EXIT_OK,
                Err(code) => code,
            }
        }
        Err(FactorOutcome::Obstructed(obs)) => {
            eprintln!(
                "infeasible: {} obstruction (excluded length {})",
                obs.obstruction.kind(),
                obs.excluded_length
            );
            match emit(&obs, out) {
                Ok(()) => EXIT_INFEASIBLE,
                Err(code) => code,
            }
        }
        Err(FactorOutcome::Invalid(msg)) => {
            eprintln!("error: {msg}");
            EXIT_INVALID
        }
    }
}

enum FactorOutcome {
    Obstructed(symfact::obstruct::ObstructionCertificate),
    Invalid(String),
}

fn factor_two(u: &ComplexMatrix, tol: &Tolerance) -> Result<FactorizationCertificate, FactorOutcome> {
    match factor::two_symmetry_factor(u, tol) {
        Ok(cert) => Ok(cert),
        Err(FactorError::SpectrumNotConjSymmetric { .. }) => {
            let obs = conj_spectrum_obstruction(u, tol)
                .map_err(|e| FactorOutcome::Invalid(e.to_string()))?
                .expect("pairing failure implies the obstruction fires");
            Err(FactorOutcome::Obstructed(obs))
        }
        Err(e) => Err(FactorOutcome::Invalid(e.to_string())),
    }
}

fn factor_radjavi(
    u: &ComplexMatrix,
    tol: &Tolerance,
) -> Result<FactorizationCertificate, FactorOutcome> {
    match factor::radjavi_four_factor(u, tol) {
        Ok(cert) => Ok(cert),
        Err(FactorError::DeterminantObstruction { .. }) => {
            let obs = det_obstruction(u, tol)
                .map_err(|e| FactorOutcome::Invalid(e.to_string()))?
                .expect("determinant rejection implies the obstruction fires");
            Err(FactorOutcome::Obstructed(obs))
        }
        Err(e) => Err(FactorOutcome::Invalid(e.to_string())),
    }
}

/// Tries the two-symmetry construction, then the four-symmetry one,
/// reporting the first success or the strongest obstruction.
fn factor_auto(
    u: &ComplexMatrix,
    tol: &Tolerance,
) -> Result<FactorizationCertificate, FactorOutcome> {
    match factor_two(u, tol) {
        Ok(cert) => Ok(cert),
        Err(FactorOutcome::Obstructed(conj_obs)) => match factor_radjavi(u, tol) {
            Ok(cert) => Ok(cert),
            // The determinant obstruction excludes every length, so it is
            // the stronger witness when both fail.
            Err(FactorOutcome::Obstructed(det_obs)) => Err(FactorOutcome::Obstructed(det_obs)),
            Err(FactorOutcome::Invalid(_)) => Err(FactorOutcome::Obstructed(conj_obs)),
        },
        Err(invalid) => Err(invalid),
    }
}

/// The scalar phase of a scalar unitary, if the input is one.
fn scalar_phase(u: &ComplexMatrix, tol: &Tolerance) -> Option<Complex64> {
    let z = u[(0, 0)];
    if z.norm() == 0.0 {
        return None;
    }
    let z = z / z.norm();
    let diff = (u - &ComplexMatrix::scalar(u.dim(), z)).operator_norm();
    (diff <= tol.verify_tol).then_some(z)
}

fn factor_weyl(
    u: &ComplexMatrix,
    tol: &Tolerance,
) -> Result<FactorizationCertificate, FactorOutcome> {
    let z = scalar_phase(u, tol).ok_or_else(|| {
        FactorOutcome::Invalid("weyl method needs a scalar unitary input".into())
    })?;
    let angle = rational_angle_from_unit(z, MAX_DENOMINATOR, tol.verify_tol * 0.5)
        .ok_or_else(|| {
            FactorOutcome::Invalid(format!(
                "scalar phase {z} is not recognizably rational (denominator <= {MAX_DENOMINATOR})"
            ))
        })?;
    let cert = scalar_four_factor(angle, u.dim())
        .map_err(|e| FactorOutcome::Invalid(e.to_string()))?;
    rebase_certificate(cert, u, tol)
}

fn factor_three_scalar(
    u: &ComplexMatrix,
    tol: &Tolerance,
) -> Result<FactorizationCertificate, FactorOutcome> {
    let z = scalar_phase(u, tol).ok_or_else(|| {
        FactorOutcome::Invalid("three-scalar method needs a scalar unitary input".into())
    })?;
    let roots = [
        Complex64::ONE,
        Complex64::I,
        -Complex64::ONE,
        -Complex64::I,
    ];
    let Some(root) = roots
        .iter()
        .copied()
        .find(|r| (z - r).norm() <= tol.verify_tol)
    else {
        // Not a fourth root: a scalar strictly inside an arc carries the
        // three-symmetry obstruction.
        if let Ok(Some(obs)) = quadrant_obstruction(u, tol) {
            return Err(FactorOutcome::Obstructed(obs));
        }
        return Err(FactorOutcome::Invalid(format!(
            "scalar phase {z} is not a fourth root of unity"
        )));
    };
    let cert = three_factor_scalar(root, u.dim())
        .map_err(|e| FactorOutcome::Invalid(e.to_string()))?;
    rebase_certificate(cert, u, tol)
}

fn factor_finite_spectrum(
    u: &ComplexMatrix,
    tol: &Tolerance,
) -> Result<FactorizationCertificate, FactorOutcome> {
    let sd = u
        .spectral_decompose(tol)
        .map_err(|e| FactorOutcome::Invalid(e.to_string()))?
        .clustered(tol.cluster_tol);
    let clusters = sd.cluster_indices(tol.cluster_tol);

    // Recognize each cluster representative as a rational angle; merge
    // clusters that snap to the same angle.
    let mut entries: Vec<(RationalAngle, usize)> = Vec::new();
    let mut column_order: Vec<usize> = Vec::new();
    for cluster in &clusters {
        let rep = sd.eigenvalues()[cluster[0]];
        let angle = rational_angle_from_unit(rep, MAX_DENOMINATOR, tol.verify_tol.max(1e-10))
            .ok_or_else(|| {
                FactorOutcome::Invalid(format!(
                    "eigenvalue {rep} is not recognizably rational (denominator <= {MAX_DENOMINATOR})"
                ))
            })?;
        if let Some(slot) = entries.iter_mut().find(|(a, _)| *a == angle) {
            slot.1 += cluster.len();
        } else {
            entries.push((angle, cluster.len()));
        }
        column_order.extend(cluster.iter().copied());
    }
    // Column order must follow the entry layout, so regroup by angle.
    let mut ordered_cols: Vec<usize> = Vec::with_capacity(column_order.len());
    for (angle, _) in &entries {
        for cluster in &clusters {
            let rep = sd.eigenvalues()[cluster[0]];
            let rec = rational_angle_from_unit(rep, MAX_DENOMINATOR, tol.verify_tol.max(1e-10));
            if rec.as_ref() == Some(angle) {
                ordered_cols.extend(cluster.iter().copied());
            }
        }
    }

    let spec = FiniteSpectrumSpec::new(entries).map_err(|e| FactorOutcome::Invalid(e.to_string()))?;
    let diag_cert = match factor::finite_spectrum_four_factor(&spec, tol) {
        Ok(c) => c,
        Err(e @ FactorError::MultiplicityConstraint { .. }) => {
            return Err(FactorOutcome::Invalid(e.to_string()));
        }
        Err(e) => return Err(FactorOutcome::Invalid(e.to_string())),
    };

    let cols: Vec<Vec<Complex64>> = ordered_cols
        .iter()
        .map(|&j| sd.basis().column(j))
        .collect();
    let basis = ComplexMatrix::from_columns(&cols);
    let factors: Vec<ComplexMatrix> = diag_cert
        .factors
        .iter()
        .map(|f| f.conjugate_by(&basis))
        .collect();
    FactorizationCertificate::assemble(u.clone(), factors, Method::FiniteSpectrumFour, tol)
        .map_err(|e| FactorOutcome::Invalid(e.to_string()))
}

/// Re-targets a scalar-target certificate at the actual input matrix.
fn rebase_certificate(
    cert: FactorizationCertificate,
    u: &ComplexMatrix,
    tol: &Tolerance,
) -> Result<FactorizationCertificate, FactorOutcome> {
    FactorizationCertificate::assemble(u.clone(), cert.factors, cert.method, tol)
        .map_err(|e| FactorOutcome::Invalid(e.to_string()))
}

fn cmd_check(path: &Path, tol_flag: Option<f64>) -> u8 {
    let tol = resolve_tol(tol_flag);
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", path.display());
            return EXIT_INVALID;
        }
    };
    let cert: FactorizationCertificate = match certkit::from_json(&text) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {}: {e}", path.display());
            return EXIT_INVALID;
        }
    };
    let report = match verify_certificate(&cert, &tol) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_INVALID;
        }
    };
    if emit(&report, None).is_err() {
        return EXIT_INVALID;
    }
    if report.passed() {
        EXIT_OK
    } else {
        eprintln!("verification failed: residual {:.3e}", report.product_residual);
        EXIT_VERIFY
    }
}

fn cmd_classify(input: &Path, tol_flag: Option<f64>) -> u8 {
    let tol = resolve_tol(tol_flag);
    let u = match read_matrix(input) {
        Ok(m) => m,
        Err(code) => return code,
    };
    match classify_membership(&u, &tol) {
        Ok(report) => match emit(&report, None) {
            Ok(()) => EXIT_OK,
            Err(code) => code,
        },
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_INVALID
        }
    }
}

/// Rounding demo: a scalar unitary with an irrational angle is approximated
/// by rational-angle scalars factorable into four symmetries, with the
/// approximation error strictly decreasing; a determinant-obstructed
/// control shows the certified distance floor on the matrix side.
fn cmd_demo_density() -> u8 {
    let tol = Tolerance::default();
    let dim = 64usize;
    let theta = 1.0 / std::f64::consts::TAU; // irrational angle fraction
    let target = Complex64::from_polar(1.0, std::f64::consts::TAU * theta);

    println!(
        "density demo: approximating exp(2*pi*i*theta) I_{dim}, theta={}",
        jsonfmt::f17(theta)
    );
    let mut previous = f64::INFINITY;
    for q in [2i64, 4, 8, 16, 32] {
        let m = (theta * q as f64).round() as i64;
        let angle = match RationalAngle::new(m, q) {
            Ok(a) => a,
            Err(e) => {
                eprintln!("error: {e}");
                return EXIT_INVALID;
            }
        };
        let cert = match scalar_four_factor(angle, dim) {
            Ok(c) => c,
            Err(e) => {
                eprintln!("error: q={q}: {e}");
                return EXIT_INVALID;
            }
        };
        let report = match verify_certificate(&cert, &tol) {
            Ok(r) => r,
            Err(e) => {
                eprintln!("error: q={q}: {e}");
                return EXIT_VERIFY;
            }
        };
        if !report.passed() {
            eprintln!("error: q={q}: certificate failed verification");
            return EXIT_VERIFY;
        }
        let error = (angle.value() - target).norm();
        println!(
            "q={q} angle={}/{} approx_error={} residual={}",
            angle.p(),
            angle.q(),
            jsonfmt::f17(error),
            jsonfmt::f17(report.product_residual)
        );
        if error >= previous {
            eprintln!("error: approximation error did not decrease at q={q}");
            return EXIT_VERIFY;
        }
        previous = error;
    }

    let control = ComplexMatrix::scalar(2, Complex64::from_polar(1.0, std::f64::consts::PI / 4.0));
    match distance_lower_bound_s4(&control, &tol) {
        Ok(bound) => {
            println!(
                "control exp(i*pi/4) I_2: det_distance_lower_bound={}",
                jsonfmt::f17(bound)
            );
            EXIT_OK
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_INVALID
        }
    }
}
