//! Singular value decomposition by one-sided Jacobi, plus numerical rank
//! and nullspace extraction.
//!
//! One-sided Jacobi computes small singular values with high relative
//! accuracy, which matters here: rank decisions on projectors and defect
//! detection at exceptional points hinge on cleanly separating "zero"
//! singular values from the noise floor.

use super::{C64, ComplexMatrix, Tolerance, inner, normalize, vec_norm};
use crate::error::{Error, Result};

const MAX_SVD_SWEEPS: usize = 60;

/// Full SVD `A = U diag(s) V^dagger` with singular values descending.
#[derive(Debug, Clone)]
pub struct Svd {
    pub singular_values: Vec<f64>,
    pub u: ComplexMatrix,
    pub v: ComplexMatrix,
}

impl Svd {
    /// Computes the decomposition of a square matrix.
    pub fn new(a: &ComplexMatrix) -> Result<Self> {
        let d = a.dim();
        // Columns of `w` converge to (scaled) left singular vectors while `v`
        // accumulates the right rotations.
        let mut w: Vec<Vec<C64>> = (0..d).map(|j| a.col(j)).collect();
        let mut v = ComplexMatrix::identity(d);
        let scale = a.fro_norm().max(f64::MIN_POSITIVE);

        // Columns whose norm falls below this floor are numerically zero;
        // they belong to the null space and must not drive rotations (two
        // near-null columns can stay parallel forever under a purely
        // relative orthogonality criterion).
        let floor = f64::EPSILON * scale;

        let mut converged = false;
        for _sweep in 0..MAX_SVD_SWEEPS {
            let mut rotated = false;
            for p in 0..d {
                for q in p + 1..d {
                    let npp = vec_norm(&w[p]);
                    let nqq = vec_norm(&w[q]);
                    if npp <= floor || nqq <= floor {
                        continue;
                    }
                    let g = inner(&w[p], &w[q]);
                    if g.norm() <= 1e-16 * npp * nqq {
                        continue;
                    }
                    rotated = true;
                    apply_rotation(&mut w, &mut v, p, q, npp * npp, nqq * nqq, g);
                }
            }
            if !rotated {
                converged = true;
                break;
            }
        }
        if !converged {
            // Check whether the residual coupling among the non-null
            // columns is already negligible.
            let mut worst = 0.0f64;
            for p in 0..d {
                for q in p + 1..d {
                    let (npp, nqq) = (vec_norm(&w[p]), vec_norm(&w[q]));
                    if npp <= floor || nqq <= floor {
                        continue;
                    }
                    worst = worst.max(inner(&w[p], &w[q]).norm() / (npp * nqq));
                }
            }
            if worst > 1e-12 {
                return Err(Error::JacobiNoConvergence {
                    sweeps: MAX_SVD_SWEEPS,
                });
            }
        }

        // Extract singular values and sort descending.
        let mut order: Vec<usize> = (0..d).collect();
        let norms: Vec<f64> = w.iter().map(|c| vec_norm(c)).collect();
        order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]));

        let singular_values: Vec<f64> = order.iter().map(|&k| norms[k]).collect();
        let v_sorted = ComplexMatrix::from_fn(d, |i, j| v[(i, order[j])]);

        // Left vectors: normalized nonzero columns, completed to a unitary
        // basis for the (numerically) null directions.
        let mut u_cols: Vec<Vec<C64>> = Vec::with_capacity(d);
        let tiny = 1e-14 * singular_values.first().copied().unwrap_or(0.0).max(f64::MIN_POSITIVE);
        for (slot, &k) in order.iter().enumerate() {
            if norms[k] > tiny {
                let mut col = w[k].clone();
                normalize(&mut col);
                u_cols.push(col);
            } else {
                u_cols.push(complete_direction(&u_cols, d, slot));
            }
        }
        let u = ComplexMatrix::from_fn(d, |i, j| u_cols[j][i]);

        Ok(Self {
            singular_values,
            u,
            v: v_sorted,
        })
    }

    /// Ratio of extreme singular values; `inf` when singular.
    pub fn condition(&self) -> f64 {
        let max = self.singular_values.first().copied().unwrap_or(0.0);
        let min = self.singular_values.last().copied().unwrap_or(0.0);
        if min > 0.0 {
            max / min
        } else {
            f64::INFINITY
        }
    }
}

/// Rotates columns p, q of `w` (and accumulates into `v`) so their Gram
/// off-diagonal vanishes. `a`, `b` are the squared column norms, `g` the
/// current inner product `<w_p, w_q>`.
fn apply_rotation(
    w: &mut [Vec<C64>],
    v: &mut ComplexMatrix,
    p: usize,
    q: usize,
    a: f64,
    b: f64,
    g: C64,
) {
    let gabs = g.norm();
    let phase = g / gabs;
    let theta = (b - a) / (2.0 * gabs);
    let t = if theta >= 0.0 {
        1.0 / (theta + (1.0 + theta * theta).sqrt())
    } else {
        -1.0 / (-theta + (1.0 + theta * theta).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    // Unitary on the (p, q) plane: column p = (c, -conj(phase) s),
    // column q = (s, conj(phase) c); same de-phased Jacobi rotation as the
    // Hermitian solver, acting on the Gram matrix.
    let wqp = -phase.conj() * s;
    let wqq = phase.conj() * c;

    let dim = w[p].len();
    for i in 0..dim {
        let wp = w[p][i];
        let wq = w[q][i];
        w[p][i] = wp * c + wq * wqp;
        w[q][i] = wp * s + wq * wqq;
    }
    for i in 0..v.dim() {
        let vp = v[(i, p)];
        let vq = v[(i, q)];
        v[(i, p)] = vp * c + vq * wqp;
        v[(i, q)] = vp * s + vq * wqq;
    }
}

/// Finds a unit vector orthogonal to the given columns (used to complete the
/// left singular basis across null directions).
fn complete_direction(cols: &[Vec<C64>], dim: usize, hint: usize) -> Vec<C64> {
    for attempt in 0..dim {
        let axis = (hint + attempt) % dim;
        let mut cand: Vec<C64> = vec![C64::new(0.0, 0.0); dim];
        cand[axis] = C64::new(1.0, 0.0);
        for col in cols {
            let proj = inner(col, &cand);
            for i in 0..dim {
                let sub = col[i] * proj;
                cand[i] -= sub;
            }
        }
        if normalize(&mut cand) > 1e-6 {
            return cand;
        }
    }
    // Unreachable for consistent inputs: fewer than dim columns always leave
    // room for one more orthogonal direction.
    let mut fallback = vec![C64::new(0.0, 0.0); dim];
    fallback[hint % dim] = C64::new(1.0, 0.0);
    fallback
}

/// Singular values of `A`, descending.
pub fn singular_values(a: &ComplexMatrix) -> Result<Vec<f64>> {
    Ok(Svd::new(a)?.singular_values)
}

/// Numerical rank: the number of singular values above
/// `max(abs_tol, rel_tol * largest singular value)`.
pub fn numerical_rank(a: &ComplexMatrix, tol: &Tolerance) -> Result<usize> {
    let sv = singular_values(a)?;
    let max = sv.first().copied().unwrap_or(0.0);
    let threshold = tol.gate(max);
    Ok(sv.iter().filter(|&&s| s > threshold).count())
}

/// Orthonormal basis (as columns) of the numerical nullspace of `A`.
pub fn nullspace_basis(a: &ComplexMatrix, tol: &Tolerance) -> Result<Vec<Vec<C64>>> {
    let svd = Svd::new(a)?;
    let max = svd.singular_values.first().copied().unwrap_or(0.0);
    let threshold = tol.gate(max);
    let d = a.dim();
    let mut basis = Vec::new();
    for (k, &s) in svd.singular_values.iter().enumerate() {
        if s <= threshold {
            basis.push(svd.v.col(k));
        }
    }
    let _ = d;
    Ok(basis)
}
