//! Hermitian eigendecomposition by cyclic complex Jacobi sweeps, and the
//! principal square root of positive-definite matrices built on top of it.
//!
//! Jacobi is slower than tridiagonalization + QL but is simple, numerically
//! excellent at desk scale, and yields orthonormal eigenvectors to machine
//! precision — which the metric-operator plumbing (square roots and their
//! inverses) relies on.

use super::{C64, ComplexMatrix, Tolerance};
use crate::error::{Error, Result};

/// Sweep budget for the Jacobi iteration; convergence is quadratic, so ten
/// sweeps usually suffice even at the dimension cap.
const MAX_JACOBI_SWEEPS: usize = 40;

/// Eigendecomposition of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct HermitianEig {
    /// Real eigenvalues in ascending order.
    pub eigenvalues: Vec<f64>,
    /// Unitary matrix whose columns are the matching eigenvectors.
    pub vectors: ComplexMatrix,
}

impl HermitianEig {
    /// Reassembles `f(A) = V f(D) V^dagger` for an entrywise spectral map.
    pub fn apply_spectral(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let d = self.vectors.dim();
        let v = &self.vectors;
        let mut out = ComplexMatrix::zeros(d);
        for k in 0..d {
            let fk = f(self.eigenvalues[k]);
            if fk == 0.0 {
                continue;
            }
            for i in 0..d {
                let vik = v[(i, k)] * fk;
                for j in 0..d {
                    let add = vik * v[(j, k)].conj();
                    out[(i, j)] += add;
                }
            }
        }
        // The result of a real spectral map of a Hermitian matrix is
        // Hermitian; fold roundoff back onto that structure.
        out.hermitized()
    }
}

/// Hermitian eigendecomposition.
///
/// The input must be Hermitian within tolerance; it is symmetrized before
/// the sweeps so the iteration itself works on an exactly Hermitian matrix.
pub fn hermitian_eig(a: &ComplexMatrix, tol: &Tolerance) -> Result<HermitianEig> {
    let residual = a.hermitian_residual();
    if residual > tol.gate(a.fro_norm()) {
        return Err(Error::NotHermitian { residual });
    }
    let d = a.dim();
    let mut m = a.hermitized();
    let mut v = ComplexMatrix::identity(d);
    let scale = m.fro_norm().max(f64::MIN_POSITIVE);

    for _sweep in 0..MAX_JACOBI_SWEEPS {
        let off = off_diag_norm(&m);
        if off <= 1e-15 * scale {
            return Ok(collect(&m, &v));
        }
        for p in 0..d {
            for q in p + 1..d {
                rotate(&mut m, &mut v, p, q);
            }
        }
    }
    if off_diag_norm(&m) <= 1e-12 * scale {
        // Close enough for every downstream tolerance; accept.
        return Ok(collect(&m, &v));
    }
    Err(Error::JacobiNoConvergence {
        sweeps: MAX_JACOBI_SWEEPS,
    })
}

/// Principal square root of a Hermitian positive-definite matrix.
///
/// Returns the unique Hermitian PD matrix `B` with `B B = A`.
pub fn sqrt_pd(a: &ComplexMatrix, tol: &Tolerance) -> Result<ComplexMatrix> {
    let eig = hermitian_eig(a, tol)?;
    let min = eig.eigenvalues[0];
    if min <= tol.abs_tol {
        return Err(Error::NotPositiveDefinite {
            min_eigenvalue: min,
        });
    }
    Ok(eig.apply_spectral(f64::sqrt))
}

fn off_diag_norm(m: &ComplexMatrix) -> f64 {
    let d = m.dim();
    let mut s = 0.0;
    for i in 0..d {
        for j in 0..d {
            if i != j {
                s += m[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// One complex Jacobi rotation annihilating the (p, q) entry.
///
/// The 2x2 principal block `[[a, b],[conj(b), e]]` is first de-phased to a
/// real symmetric block via `diag(1, exp(-i phi))` with `phi = arg b`, then
/// rotated by the classical symmetric Jacobi angle.
fn rotate(m: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let b = m[(p, q)];
    let babs = b.norm();
    if babs == 0.0 {
        return;
    }
    let app = m[(p, p)].re;
    let aqq = m[(q, q)].re;
    let phase = b / babs; // exp(i phi)

    let theta = (aqq - app) / (2.0 * babs);
    let t = if theta >= 0.0 {
        1.0 / (theta + (1.0 + theta * theta).sqrt())
    } else {
        -1.0 / (-theta + (1.0 + theta * theta).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;

    // Combined unitary on the (p, q) plane:
    //   column p: (c, -s * conj(phase)),  column q: (s, c * conj(phase)).
    let wpp = C64::new(c, 0.0);
    let wpq = C64::new(s, 0.0);
    let wqp = -phase.conj() * s;
    let wqq = phase.conj() * c;

    let d = m.dim();
    // M <- M W (columns p, q).
    for i in 0..d {
        let mip = m[(i, p)];
        let miq = m[(i, q)];
        m[(i, p)] = mip * wpp + miq * wqp;
        m[(i, q)] = mip * wpq + miq * wqq;
    }
    // M <- W^dagger M (rows p, q).
    for j in 0..d {
        let mpj = m[(p, j)];
        let mqj = m[(q, j)];
        m[(p, j)] = wpp.conj() * mpj + wqp.conj() * mqj;
        m[(q, j)] = wpq.conj() * mpj + wqq.conj() * mqj;
    }
    // Clean the annihilated pair and enforce real diagonal.
    m[(p, q)] = C64::new(0.0, 0.0);
    m[(q, p)] = C64::new(0.0, 0.0);
    m[(p, p)] = C64::new(m[(p, p)].re, 0.0);
    m[(q, q)] = C64::new(m[(q, q)].re, 0.0);
    // V <- V W.
    for i in 0..d {
        let vip = v[(i, p)];
        let viq = v[(i, q)];
        v[(i, p)] = vip * wpp + viq * wqp;
        v[(i, q)] = vip * wpq + viq * wqq;
    }
}

fn collect(m: &ComplexMatrix, v: &ComplexMatrix) -> HermitianEig {
    let d = m.dim();
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&i, &j| m[(i, i)].re.total_cmp(&m[(j, j)].re));
    let eigenvalues: Vec<f64> = order.iter().map(|&k| m[(k, k)].re).collect();
    let vectors = ComplexMatrix::from_fn(d, |i, j| v[(i, order[j])]);
    HermitianEig {
        eigenvalues,
        vectors,
    }
}
