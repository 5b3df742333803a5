//! Small dense helpers shared by the solvers.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Eigenphases in (-π, π] and eigenvectors (columns) of a unitary matrix.
/// The Schur form of a normal matrix is diagonal, so the Schur vectors are
/// eigenvectors.
///
/// The shifted QR iteration can cycle on spectra symmetric about the real
/// axis, so a stalled attempt is retried on e^{iθ}U, which has the same
/// eigenvectors and phases rotated by θ.
pub fn unitary_eigen(u: &DMatrix<Complex64>) -> Result<(Vec<f64>, DMatrix<Complex64>)> {
    let limit = 200 * u.nrows().max(1);
    for theta in [0.0, 0.377, 1.093, 2.251] {
        let rot = Complex64::from_polar(1.0, theta);
        if let Some(schur) = (u * rot).try_schur(f64::EPSILON, limit) {
            let (q, t) = schur.unpack();
            let phases = (0..t.nrows()).map(|i| wrap(t[(i, i)].arg() - theta)).collect();
            return Ok((phases, q));
        }
    }
    Err(Error::Incomplete {
        reason: format!("Schur iteration did not converge on a unitary matrix of size {}", u.nrows()),
        found: vec![],
    })
}

/// Orthonormal basis of the numerical kernel: right singular vectors whose
/// singular value is below `rel_tol` times the largest one.
pub fn null_space(m: &DMatrix<Complex64>, rel_tol: f64) -> Vec<DVector<Complex64>> {
    let n = m.ncols();
    if n == 0 {
        return vec![];
    }
    // pad to a square matrix so that V has n columns
    let mut sq = DMatrix::zeros(m.nrows().max(n), n);
    sq.view_mut((0, 0), (m.nrows(), n)).copy_from(m);
    let svd = sq.svd(false, true);
    let v_t = svd.v_t.expect("requested V");
    let smax = svd.singular_values.max().max(f64::MIN_POSITIVE);
    let mut out = Vec::new();
    for (i, &s) in svd.singular_values.iter().enumerate() {
        if s <= rel_tol * smax {
            out.push(v_t.row(i).adjoint());
        }
    }
    out
}

/// Singular values, largest first.
pub fn singular_values(m: &DMatrix<Complex64>) -> Vec<f64> {
    let mut s: Vec<f64> = m.clone().singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Counts of negative, zero and positive eigenvalues of a real symmetric
/// matrix, eigenvalues with |μ| ≤ tol counting as zero.
pub fn inertia(m: &DMatrix<f64>, tol: f64) -> (usize, usize, usize) {
    if m.nrows() == 0 {
        return (0, 0, 0);
    }
    let e = m.clone().symmetric_eigen();
    let mut out = (0, 0, 0);
    for &mu in e.eigenvalues.iter() {
        if mu < -tol {
            out.0 += 1;
        } else if mu > tol {
            out.2 += 1;
        } else {
            out.1 += 1;
        }
    }
    out
}

/// Wraps an angle into (-π, π].
pub fn wrap(theta: f64) -> f64 {
    let two_pi = std::f64::consts::TAU;
    let mut x = theta.rem_euclid(two_pi);
    if x > std::f64::consts::PI {
        x -= two_pi;
    }
    x
}
