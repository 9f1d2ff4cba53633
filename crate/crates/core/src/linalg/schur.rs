//! General (non-normal) complex eigendecomposition.
//!
//! Pipeline: Householder reduction to upper Hessenberg form, explicit
//! single-shift QR iteration with Wilkinson shifts to a Schur triangle, then
//! eigenvector extraction by back-substitution. Eigenvalues are clustered by
//! a tolerance-aware equality notion before multiplicities are computed, and
//! defectiveness (geometric multiplicity deficit) is detected per cluster by
//! a numerical rank test on `A - lambda I`.

use super::{C64, ComplexMatrix, Tolerance, normalize, numerical_rank};
use crate::error::{Error, Result};

/// QR iteration budget scales with the dimension.
const SWEEPS_PER_DIM: usize = 100;

/// One group of eigenvalues that are equal within tolerance.
#[derive(Debug, Clone)]
pub struct EigenCluster {
    /// Cluster representative (mean of members).
    pub value: C64,
    /// Indices into `eigenvalues` belonging to this cluster.
    pub members: Vec<usize>,
    /// Algebraic multiplicity (cluster size).
    pub algebraic: usize,
    /// Geometric multiplicity (nullity of `A - value * I`).
    pub geometric: usize,
}

impl EigenCluster {
    /// True when the cluster representative is real within `gate`.
    pub fn is_real(&self, gate: f64) -> bool {
        self.value.im.abs() <= gate
    }

    /// True when the eigenspace is smaller than the algebraic multiplicity.
    pub fn is_defective(&self) -> bool {
        self.geometric < self.algebraic
    }
}

/// Full eigendecomposition of a general complex matrix.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    /// Eigenvalues with multiplicity, in Schur deflation order.
    pub eigenvalues: Vec<C64>,
    /// Columns are right eigenvectors (unit norm).
    pub right_vectors: ComplexMatrix,
    /// Columns are eigenvectors of the adjoint. When the matrix is
    /// diagonalizable these are biorthogonally normalized against the right
    /// vectors (`L^dagger R = 1`).
    pub left_vectors: ComplexMatrix,
    /// Tolerance-clustered spectrum with multiplicities.
    pub clusters: Vec<EigenCluster>,
    /// False when any cluster is defective.
    pub diagonalizable: bool,
}

impl EigenDecomposition {
    /// True when every eigenvalue cluster is real within the scaled gate.
    pub fn real_spectrum(&self, gate: f64) -> bool {
        self.clusters.iter().all(|c| c.is_real(gate))
    }

    /// Residual `|A R - R diag(lambda)|_F`.
    pub fn right_residual(&self, a: &ComplexMatrix) -> f64 {
        let lam = ComplexMatrix::diag(&self.eigenvalues);
        (&(a * &self.right_vectors) - &(&self.right_vectors * &lam)).fro_norm()
    }
}

/// Eigendecomposition of a general square complex matrix (dim <= 64).
pub fn eig(a: &ComplexMatrix, tol: &Tolerance) -> Result<EigenDecomposition> {
    let d = a.dim();
    if d == 0 {
        return Err(Error::InvalidArgument(
            "eigendecomposition of an empty matrix".into(),
        ));
    }
    let scale = a.fro_norm();

    // Schur decomposition A = Z T Z^dagger.
    let (t, z) = schur(a)?;
    let eigenvalues: Vec<C64> = (0..d).map(|i| t[(i, i)]).collect();

    // Right eigenvectors by back-substitution in the triangle.
    let right_vectors = right_vectors_from_schur(&t, &z, scale);

    // Cluster the spectrum and probe each repeated cluster for defectiveness.
    let clusters = build_clusters(a, &eigenvalues, tol, scale)?;
    let diagonalizable = clusters.iter().all(|c| !c.is_defective());

    // Left eigenvectors: for diagonalizable matrices take (R^{-1})^dagger,
    // which enforces biorthonormality exactly up to solve error. Otherwise
    // fall back to unnormalized adjoint eigenvectors from the triangle.
    let left_vectors = if diagonalizable {
        match right_vectors.lu().and_then(|lu| lu.inverse()) {
            Ok(rinv) => rinv.adjoint(),
            Err(_) => left_vectors_from_schur(&t, &z, scale),
        }
    } else {
        left_vectors_from_schur(&t, &z, scale)
    };

    Ok(EigenDecomposition {
        eigenvalues,
        right_vectors,
        left_vectors,
        clusters,
        diagonalizable,
    })
}

/// Householder reduction to upper Hessenberg form; returns (H, Q) with
/// `A = Q H Q^dagger`.
fn hessenberg(a: &ComplexMatrix) -> (ComplexMatrix, ComplexMatrix) {
    let d = a.dim();
    let mut h = a.clone();
    let mut q = ComplexMatrix::identity(d);

    for k in 0..d.saturating_sub(2) {
        // Householder vector annihilating column k below the subdiagonal.
        let mut x: Vec<C64> = (k + 1..d).map(|i| h[(i, k)]).collect();
        let xnorm = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if xnorm == 0.0 {
            continue;
        }
        let x0 = x[0];
        let alpha = if x0.norm() > 0.0 {
            -(x0 / x0.norm()) * xnorm
        } else {
            C64::new(-xnorm, 0.0)
        };
        x[0] -= alpha;
        let vnorm = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if vnorm == 0.0 {
            continue;
        }
        for z in x.iter_mut() {
            *z /= vnorm;
        }
        // Apply P = I - 2 v v^dagger on rows k+1.. and columns k+1.. of H,
        // and on columns of Q.
        // Rows: H <- P H.
        for j in 0..d {
            let mut dot = C64::new(0.0, 0.0);
            for (i, vi) in x.iter().enumerate() {
                dot += vi.conj() * h[(k + 1 + i, j)];
            }
            dot *= 2.0;
            for (i, vi) in x.iter().enumerate() {
                let sub = *vi * dot;
                h[(k + 1 + i, j)] -= sub;
            }
        }
        // Columns: H <- H P.
        for i in 0..d {
            let mut dot = C64::new(0.0, 0.0);
            for (j, vj) in x.iter().enumerate() {
                dot += h[(i, k + 1 + j)] * *vj;
            }
            dot *= 2.0;
            for (j, vj) in x.iter().enumerate() {
                let sub = dot * vj.conj();
                h[(i, k + 1 + j)] -= sub;
            }
        }
        // Q <- Q P.
        for i in 0..d {
            let mut dot = C64::new(0.0, 0.0);
            for (j, vj) in x.iter().enumerate() {
                dot += q[(i, k + 1 + j)] * *vj;
            }
            dot *= 2.0;
            for (j, vj) in x.iter().enumerate() {
                let sub = dot * vj.conj();
                q[(i, k + 1 + j)] -= sub;
            }
        }
        // Zero out the annihilated entries explicitly.
        h[(k + 1, k)] = alpha;
        for i in k + 2..d {
            h[(i, k)] = C64::new(0.0, 0.0);
        }
    }
    (h, q)
}

/// Schur decomposition `A = Z T Z^dagger` with T upper triangular.
fn schur(a: &ComplexMatrix) -> Result<(ComplexMatrix, ComplexMatrix)> {
    let d = a.dim();
    let (mut t, mut z) = hessenberg(a);
    let budget = SWEEPS_PER_DIM * d;
    let mut iterations = 0usize;
    let mut stall = 0usize;

    let mut m = d.saturating_sub(1);
    loop {
        // Deflate converged trailing entries.
        while m > 0 {
            let sub = t[(m, m - 1)].norm();
            let diag = t[(m - 1, m - 1)].norm() + t[(m, m)].norm();
            let gate = f64::EPSILON * if diag > 0.0 { diag } else { t.fro_norm() };
            if sub <= gate {
                t[(m, m - 1)] = C64::new(0.0, 0.0);
                m -= 1;
                stall = 0;
            } else {
                break;
            }
        }
        if m == 0 {
            break;
        }
        // Find the top of the active block.
        let mut l = m;
        while l > 0 {
            let sub = t[(l, l - 1)].norm();
            let diag = t[(l - 1, l - 1)].norm() + t[(l, l)].norm();
            let gate = f64::EPSILON * if diag > 0.0 { diag } else { t.fro_norm() };
            if sub <= gate {
                t[(l, l - 1)] = C64::new(0.0, 0.0);
                break;
            }
            l -= 1;
        }

        if iterations >= budget {
            return Err(Error::EigNoConvergence { sweeps: budget });
        }
        iterations += 1;
        stall += 1;

        // Wilkinson shift from the trailing 2x2 block, with an occasional
        // exceptional shift to break rare symmetric stalls.
        let shift = if stall % 17 == 0 {
            C64::new(t[(m, m - 1)].norm() + t[(m, m)].norm(), 0.0)
        } else {
            wilkinson_shift(&t, m)
        };

        qr_step(&mut t, &mut z, l, m, shift);
    }

    // Enforce the triangular shape (roundoff below the diagonal).
    for i in 0..d {
        for j in 0..i {
            t[(i, j)] = C64::new(0.0, 0.0);
        }
    }
    Ok((t, z))
}

/// Eigenvalue of the trailing 2x2 block closest to its bottom-right entry.
fn wilkinson_shift(t: &ComplexMatrix, m: usize) -> C64 {
    let a = t[(m - 1, m - 1)];
    let b = t[(m - 1, m)];
    let c = t[(m, m - 1)];
    let dd = t[(m, m)];
    let tr = a + dd;
    let disc = ((a - dd) * (a - dd) + c * b * 4.0).sqrt();
    let mu1 = (tr + disc) * 0.5;
    let mu2 = (tr - disc) * 0.5;
    if (mu1 - dd).norm() <= (mu2 - dd).norm() {
        mu1
    } else {
        mu2
    }
}

/// One explicit shifted QR step on the active block `[l, m]`.
fn qr_step(t: &mut ComplexMatrix, z: &mut ComplexMatrix, l: usize, m: usize, shift: C64) {
    let d = t.dim();
    for i in l..=m {
        t[(i, i)] -= shift;
    }
    // Q R factorization of the shifted block by Givens rotations.
    let mut rotations: Vec<(usize, C64, C64)> = Vec::with_capacity(m - l);
    for k in l..m {
        let a = t[(k, k)];
        let b = t[(k + 1, k)];
        let r = (a.norm_sqr() + b.norm_sqr()).sqrt();
        if r == 0.0 {
            rotations.push((k, C64::new(1.0, 0.0), C64::new(0.0, 0.0)));
            continue;
        }
        let c = a.conj() / r;
        let s = b.conj() / r;
        // Apply G = [[c, s],[-conj(s), conj(c)]] to rows k, k+1.
        for j in 0..d {
            let tk = t[(k, j)];
            let tk1 = t[(k + 1, j)];
            t[(k, j)] = c * tk + s * tk1;
            t[(k + 1, j)] = -s.conj() * tk + c.conj() * tk1;
        }
        rotations.push((k, c, s));
    }
    // T <- T G^dagger (columns) and Z <- Z G^dagger, completing RQ.
    // With G = [[c, s], [-conj(s), conj(c)]] acting on rows, the adjoint has
    // columns (conj(c), conj(s)) and (-s, c).
    for &(k, c, s) in &rotations {
        for i in 0..d {
            let tk = t[(i, k)];
            let tk1 = t[(i, k + 1)];
            t[(i, k)] = tk * c.conj() + tk1 * s.conj();
            t[(i, k + 1)] = -tk * s + tk1 * c;
        }
        for i in 0..d {
            let zk = z[(i, k)];
            let zk1 = z[(i, k + 1)];
            z[(i, k)] = zk * c.conj() + zk1 * s.conj();
            z[(i, k + 1)] = -zk * s + zk1 * c;
        }
    }
    for i in l..=m {
        t[(i, i)] += shift;
    }
}

/// Right eigenvectors of `A = Z T Z^dagger` by triangular back-substitution.
fn right_vectors_from_schur(t: &ComplexMatrix, z: &ComplexMatrix, scale: f64) -> ComplexMatrix {
    let d = t.dim();
    let smin = (f64::EPSILON * scale).max(f64::MIN_POSITIVE);
    let mut out = ComplexMatrix::zeros(d);
    for idx in 0..d {
        let lambda = t[(idx, idx)];
        let mut y = vec![C64::new(0.0, 0.0); d];
        y[idx] = C64::new(1.0, 0.0);
        for j in (0..idx).rev() {
            let mut acc = C64::new(0.0, 0.0);
            for k in j + 1..=idx {
                acc += t[(j, k)] * y[k];
            }
            let mut den = t[(j, j)] - lambda;
            if den.norm() < smin {
                // Perturb degenerate denominators; the resulting direction is
                // still a valid eigenvector candidate after normalization.
                den = C64::new(smin, 0.0);
            }
            y[j] = -acc / den;
        }
        let mut v = z.mul_vec(&y);
        normalize(&mut v);
        out.set_col(idx, &v);
    }
    out
}

/// Eigenvectors of the adjoint (unnormalized fallback for defective inputs).
fn left_vectors_from_schur(t: &ComplexMatrix, z: &ComplexMatrix, scale: f64) -> ComplexMatrix {
    let d = t.dim();
    let smin = (f64::EPSILON * scale).max(f64::MIN_POSITIVE);
    let mut out = ComplexMatrix::zeros(d);
    for idx in 0..d {
        let lambda = t[(idx, idx)];
        // Solve w^dagger T = lambda w^dagger by forward substitution,
        // i.e. conj-linear system on the columns right of idx.
        let mut w = vec![C64::new(0.0, 0.0); d];
        w[idx] = C64::new(1.0, 0.0);
        for j in idx + 1..d {
            let mut acc = C64::new(0.0, 0.0);
            for k in idx..j {
                acc += w[k].conj() * t[(k, j)];
            }
            let mut den = t[(j, j)] - lambda;
            if den.norm() < smin {
                den = C64::new(smin, 0.0);
            }
            w[j] = (-acc / den).conj();
        }
        let mut v = z.mul_vec(&w);
        normalize(&mut v);
        out.set_col(idx, &v);
    }
    out
}

/// Groups eigenvalues that coincide within the scaled tolerance and probes
/// repeated clusters for geometric multiplicity.
fn build_clusters(
    a: &ComplexMatrix,
    eigenvalues: &[C64],
    tol: &Tolerance,
    scale: f64,
) -> Result<Vec<EigenCluster>> {
    let d = eigenvalues.len();
    let gate = tol.gate(scale);

    // Single-linkage clustering via union-find on all pairs.
    let mut parent: Vec<usize> = (0..d).collect();
    fn find(parent: &mut Vec<usize>, i: usize) -> usize {
        let mut root = i;
        while parent[root] != root {
            root = parent[root];
        }
        let mut cur = i;
        while parent[cur] != root {
            let next = parent[cur];
            parent[cur] = root;
            cur = next;
        }
        root
    }
    for i in 0..d {
        for j in i + 1..d {
            if (eigenvalues[i] - eigenvalues[j]).norm() <= gate {
                let ri = find(&mut parent, i);
                let rj = find(&mut parent, j);
                if ri != rj {
                    parent[ri] = rj;
                }
            }
        }
    }

    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut seen: Vec<Option<usize>> = vec![None; d];
    for i in 0..d {
        let root = find(&mut parent, i);
        match seen[root] {
            Some(g) => groups[g].push(i),
            None => {
                seen[root] = Some(groups.len());
                groups.push(vec![i]);
            }
        }
    }

    let mut clusters = Vec::with_capacity(groups.len());
    for members in groups {
        let algebraic = members.len();
        let mean = members.iter().map(|&i| eigenvalues[i]).sum::<C64>() / algebraic as f64;
        let geometric = if algebraic == 1 {
            1
        } else {
            // Nullity of A - mean * I. The rank threshold must absorb the
            // intra-cluster spread, otherwise directions belonging to nearby
            // cluster members masquerade as nonzero singular values.
            let spread = members
                .iter()
                .map(|&i| (eigenvalues[i] - mean).norm())
                .fold(0.0, f64::max);
            let shifted = a.sub_scalar(mean);
            let rank_tol = Tolerance::new(tol.gate(scale).max(2.0 * spread), tol.rel_tol)?;
            let rank = numerical_rank(&shifted, &rank_tol)?;
            d - rank
        };
        clusters.push(EigenCluster {
            value: mean,
            members,
            algebraic,
            geometric,
        });
    }
    // Deterministic order: by real part, then imaginary part.
    clusters.sort_by(|a, b| {
        (a.value.re, a.value.im)
            .partial_cmp(&(b.value.re, b.value.im))
            .expect("finite eigenvalues")
    });
    Ok(clusters)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    /// Characteristic-polynomial roots of a 2x2 matrix; independent oracle
    /// for the iterative solver.
    fn quadratic_eigenvalues(a: &ComplexMatrix) -> (C64, C64) {
        let tr = a[(0, 0)] + a[(1, 1)];
        let det = a[(0, 0)] * a[(1, 1)] - a[(0, 1)] * a[(1, 0)];
        let disc = (tr * tr - det * 4.0).sqrt();
        ((tr + disc) * 0.5, (tr - disc) * 0.5)
    }

    fn sorted_by_re(mut v: Vec<C64>) -> Vec<C64> {
        v.sort_by(|a, b| (a.re, a.im).partial_cmp(&(b.re, b.im)).unwrap());
        v
    }

    #[test]
    fn diagonal_input_is_immediate() {
        let a = ComplexMatrix::diag(&[c(1.0, 0.0), c(2.0, 0.0)]);
        let e = eig(&a, &Tolerance::default()).unwrap();
        let vals = sorted_by_re(e.eigenvalues.clone());
        assert!((vals[0] - c(1.0, 0.0)).norm() < 1e-14);
        assert!((vals[1] - c(2.0, 0.0)).norm() < 1e-14);
        assert!(e.diagonalizable);
        assert!(e.right_residual(&a) < 1e-13);
    }

    #[test]
    fn pt_symmetric_2x2_in_the_unbroken_regime() {
        // [[i, 2],[2, -i]]: real eigenvalues +-sqrt(3).
        let a = ComplexMatrix::from_rows(&[
            vec![c(0.0, 1.0), c(2.0, 0.0)],
            vec![c(2.0, 0.0), c(0.0, -1.0)],
        ])
        .unwrap();
        let e = eig(&a, &Tolerance::default()).unwrap();
        let vals = sorted_by_re(e.eigenvalues.clone());
        // Oracle 1: closed-form root of the characteristic polynomial.
        let (q1, q2) = quadratic_eigenvalues(&a);
        let oracle = sorted_by_re(vec![q1, q2]);
        assert!((vals[0] - oracle[0]).norm() < 1e-12);
        assert!((vals[1] - oracle[1]).norm() < 1e-12);
        // Oracle 2: the closed form +-sqrt(s^2 - r^2 sin^2 theta) at
        // r=1, s=2, theta=pi/2.
        let root = 3.0f64.sqrt();
        assert!((vals[0] - c(-root, 0.0)).norm() < 1e-12);
        assert!((vals[1] - c(root, 0.0)).norm() < 1e-12);
        assert!(e.diagonalizable);
        assert!(e.right_residual(&a) < 1e-12);
    }

    #[test]
    fn exceptional_point_is_flagged_defective() {
        // [[i, 1],[1, -i]]: eigenvalue 0 twice, one eigenvector.
        let a = ComplexMatrix::from_rows(&[
            vec![c(0.0, 1.0), c(1.0, 0.0)],
            vec![c(1.0, 0.0), c(0.0, -1.0)],
        ])
        .unwrap();
        let e = eig(&a, &Tolerance::default()).unwrap();
        assert_eq!(e.clusters.len(), 1);
        assert_eq!(e.clusters[0].algebraic, 2);
        assert_eq!(e.clusters[0].geometric, 1);
        assert!(!e.diagonalizable);
        assert!(e.eigenvalues.iter().all(|l| l.norm() < 1e-7));
    }

    #[test]
    fn biorthogonality_for_a_nonnormal_matrix() {
        let a = ComplexMatrix::from_rows(&[
            vec![c(1.0, 0.3), c(2.0, 0.0), c(0.0, -1.0)],
            vec![c(0.5, 0.0), c(-1.0, 0.1), c(1.0, 1.0)],
            vec![c(0.0, 0.2), c(0.3, 0.0), c(2.5, -0.4)],
        ])
        .unwrap();
        let e = eig(&a, &Tolerance::default()).unwrap();
        assert!(e.diagonalizable);
        assert!(e.right_residual(&a) < 1e-10 * a.fro_norm());
        let prod = &e.left_vectors.adjoint() * &e.right_vectors;
        assert!(prod.distance(&ComplexMatrix::identity(3)) < 1e-9);
        // Left vectors are eigenvectors of the adjoint.
        let adj = a.adjoint();
        for k in 0..3 {
            let l = e.left_vectors.col(k);
            let got = adj.mul_vec(&l);
            let expect: Vec<C64> = l.iter().map(|&x| x * e.eigenvalues[k].conj()).collect();
            let err: f64 = got
                .iter()
                .zip(&expect)
                .map(|(g, x)| (g - x).norm_sqr())
                .sum::<f64>()
                .sqrt();
            assert!(err < 1e-8 * a.fro_norm(), "left vector {k} residual {err}");
        }
    }

    #[test]
    fn degenerate_but_diagonalizable_cluster() {
        let a = ComplexMatrix::diag(&[c(1.0, 0.0), c(1.0 + 1e-12, 0.0), c(5.0, 0.0)]);
        let e = eig(&a, &Tolerance::default()).unwrap();
        assert_eq!(e.clusters.len(), 2);
        let big = e.clusters.iter().find(|c| c.algebraic == 2).unwrap();
        assert_eq!(big.geometric, 2);
        assert!(e.diagonalizable);
    }

    #[test]
    fn upper_triangular_jordan_block_is_defective() {
        let a = ComplexMatrix::from_rows(&[
            vec![c(2.0, 0.0), c(1.0, 0.0)],
            vec![c(0.0, 0.0), c(2.0, 0.0)],
        ])
        .unwrap();
        let e = eig(&a, &Tolerance::default()).unwrap();
        assert!(!e.diagonalizable);
        assert_eq!(e.clusters[0].algebraic, 2);
        assert_eq!(e.clusters[0].geometric, 1);
    }

    #[test]
    fn random_like_8x8_reconstructs_its_spectrum() {
        // Deterministic pseudo-random entries from a simple LCG; validates
        // the solver at the largest property-test dimension.
        let mut state = 0x243F6A8885A308D3u64;
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 33) as f64) / (u32::MAX as f64) - 0.5
        };
        let a = ComplexMatrix::from_fn(8, |_, _| c(next(), next()));
        let e = eig(&a, &Tolerance::default()).unwrap();
        assert!(e.right_residual(&a) < 1e-9 * a.fro_norm());
        // Trace equals eigenvalue sum (Schur preserves it exactly up to
        // roundoff).
        let sum: C64 = e.eigenvalues.iter().sum();
        assert!((sum - a.trace()).norm() < 1e-10 * a.fro_norm());
    }
}
