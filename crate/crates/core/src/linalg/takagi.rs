//! Autonne-Takagi factorization of complex symmetric unitary matrices.
//!
//! Every unitary U with U = U^T factors as U = V V^T for some unitary V.
//! Writing U = X + iY with X, Y real symmetric, unitarity plus symmetry force
//! X^2 + Y^2 = 1 and XY = YX, so X and Y are simultaneously diagonalizable by
//! a real orthogonal O. With O^T X O = diag(x_k) and O^T Y O = diag(y_k) the
//! diagonal entries satisfy x_k^2 + y_k^2 = 1; setting phi_k = atan2(y_k, x_k)
//! gives U = O diag(e^{i phi_k}) O^T and V = O diag(e^{i phi_k / 2}).
//!
//! The joint basis is found by diagonalizing a linear combination
//! alpha X + beta Y. The primary attempt diagonalizes X alone; when X has
//! (near-)degenerate eigenvalues that Y splits, that basis leaves Y
//! off-diagonal, so the routine retries with a fixed schedule of mixing
//! angles and keeps the combination whose joint off-diagonal residual is
//! smallest. Combinations separate phase pairs that either real part alone
//! cannot, giving O(eps)-accurate bases where a cluster-then-recurse scheme
//! would stall near sqrt(eps).

use super::{hermitian_eig, C64, ComplexMatrix, Tolerance};
use crate::error::{Error, Result};

/// Mixing angles for `cos(t) X + sin(t) Y`; the first entry is the primary
/// attempt (diagonalize X alone), the rest are retries for degenerate cases.
const MIX_ANGLES: [f64; 6] = [0.0, 1.570796326794897, 0.547, 1.234567, 2.031, 2.718];

/// Takagi factor V (unitary, with `V V^T = U`) of a symmetric unitary U.
pub fn takagi(u: &ComplexMatrix, tol: &Tolerance) -> Result<ComplexMatrix> {
    let d = u.dim();
    if d == 0 {
        return Err(Error::InvalidArgument(
            "Takagi factorization of an empty matrix".into(),
        ));
    }
    let scale = (d as f64).sqrt();
    let gate = tol.gate(scale);

    let unitarity = (&u.adjoint() * u).distance(&ComplexMatrix::identity(d));
    if unitarity > gate {
        return Err(Error::NotUnitary {
            residual: unitarity,
        });
    }
    let symmetry = u.symmetric_residual();
    if symmetry > gate {
        return Err(Error::NotComplexSymmetric {
            residual: symmetry,
        });
    }

    // Real and imaginary parts, symmetrized to kill roundoff skew.
    let x = symmetrized_part(u, false);
    let y = symmetrized_part(u, true);

    let accept = 1e-12 * scale;
    let mut best: Option<(f64, ComplexMatrix)> = None;
    for &angle in MIX_ANGLES.iter() {
        let (alpha, beta) = (angle.cos(), angle.sin());
        let mut z = ComplexMatrix::zeros(d);
        for i in 0..d {
            for j in 0..d {
                z[(i, j)] = x[(i, j)] * alpha + y[(i, j)] * beta;
            }
        }
        let Ok(eig) = hermitian_eig(&z, tol) else {
            continue;
        };
        // Real symmetric input keeps the Jacobi rotations real.
        debug_assert!(eig.vectors.imag_norm() < 1e-12 * scale.max(1.0));
        let o = eig.vectors.real_part();
        let dx = &(&o.transpose() * &x) * &o;
        let dy = &(&o.transpose() * &y) * &o;
        let res = (off_diagonal_norm_sqr(&dx) + off_diagonal_norm_sqr(&dy)).sqrt();
        if best.as_ref().map_or(true, |(b, _)| res < *b) {
            best = Some((res, o));
        }
        if res <= accept {
            break;
        }
    }

    let (residual, o) = best.ok_or(Error::TakagiNoConvergence { residual: f64::NAN })?;
    if residual > 1e-6 * scale {
        return Err(Error::TakagiNoConvergence { residual });
    }

    // Half-phase column scaling.
    let mut v = o;
    for k in 0..d {
        let xk = {
            let mut acc = 0.0;
            for i in 0..d {
                for j in 0..d {
                    acc += v[(i, k)].re * x[(i, j)].re * v[(j, k)].re;
                }
            }
            acc
        };
        let yk = {
            let mut acc = 0.0;
            for i in 0..d {
                for j in 0..d {
                    acc += v[(i, k)].re * y[(i, j)].re * v[(j, k)].re;
                }
            }
            acc
        };
        let phase = C64::from_polar(1.0, 0.5 * yk.atan2(xk));
        for i in 0..d {
            let val = v[(i, k)] * phase;
            v[(i, k)] = val;
        }
    }
    Ok(v)
}

/// Symmetrized real or imaginary part of a matrix, as a complex matrix.
fn symmetrized_part(u: &ComplexMatrix, imaginary: bool) -> ComplexMatrix {
    let d = u.dim();
    ComplexMatrix::from_fn(d, |i, j| {
        let a = if imaginary { u[(i, j)].im } else { u[(i, j)].re };
        let b = if imaginary { u[(j, i)].im } else { u[(j, i)].re };
        C64::new(0.5 * (a + b), 0.0)
    })
}

fn off_diagonal_norm_sqr(a: &ComplexMatrix) -> f64 {
    let d = a.dim();
    let mut acc = 0.0;
    for i in 0..d {
        for j in 0..d {
            if i != j {
                acc += a[(i, j)].norm_sqr();
            }
        }
    }
    acc
}
