//! Seeded random generators for matrices, symmetries, and states.
//!
//! Everything here draws from a caller-supplied [`rand::Rng`]; the crate's
//! deterministic entry points seed a `ChaCha8Rng` so repeated runs produce
//! identical ensembles.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::antilinear::AntilinearOperator;
use crate::error::Result;
use crate::linalg::{inner, normalize, takagi, vec_norm, C64, ComplexMatrix, Tolerance};
use crate::metric::MetricOperator;

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    StandardNormal.sample(rng)
}

fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::new(gaussian(rng), gaussian(rng))
}

/// Square matrix of iid standard complex Gaussians.
pub fn ginibre<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(dim, |_, _| complex_gaussian(rng))
}

/// Square matrix of iid standard real Gaussians.
pub fn real_ginibre<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(dim, |_, _| C64::new(gaussian(rng), 0.0))
}

/// Unit vector with Haar-uniform direction.
pub fn unit_vector<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Vec<C64> {
    loop {
        let mut v: Vec<C64> = (0..dim).map(|_| complex_gaussian(rng)).collect();
        if vec_norm(&v) > 1e-6 {
            normalize(&mut v);
            return v;
        }
    }
}

/// Orthonormalizes the columns of `a` in place by modified Gram-Schmidt with
/// re-orthogonalization, fixing phases so the construction is Haar when `a`
/// is Ginibre.
fn gram_schmidt_columns(a: &ComplexMatrix) -> ComplexMatrix {
    let d = a.dim();
    let mut q = ComplexMatrix::zeros(d);
    let mut kept: Vec<Vec<C64>> = Vec::with_capacity(d);
    for j in 0..d {
        let mut v = a.col(j);
        for _ in 0..2 {
            for u in &kept {
                let c = inner(u, &v);
                for (vi, ui) in v.iter_mut().zip(u) {
                    *vi -= c * ui;
                }
            }
        }
        normalize(&mut v);
        kept.push(v);
    }
    for (j, v) in kept.iter().enumerate() {
        q.set_col(j, v);
    }
    q
}

/// Haar-distributed unitary matrix.
pub fn unitary<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> ComplexMatrix {
    gram_schmidt_columns(&ginibre(rng, dim))
}

/// Haar-distributed real orthogonal matrix (as a complex matrix with zero
/// imaginary part).
pub fn real_orthogonal<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> ComplexMatrix {
    gram_schmidt_columns(&real_ginibre(rng, dim))
}

/// Random symmetric unitary `W W^T` (the linear part of a generic
/// antiunitary involution).
pub fn symmetric_unitary<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> ComplexMatrix {
    let w = unitary(rng, dim);
    &w * &w.transpose()
}

/// Random antiunitary involution `K = (W W^T) kappa`.
pub fn antiunitary_involution<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> AntilinearOperator {
    AntilinearOperator::new(symmetric_unitary(rng, dim))
}

/// Real invertible matrix `O_1 diag(u) O_2` with singular values in
/// `[0.5, 2]`, so inverses stay well conditioned.
pub fn well_conditioned_real<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> ComplexMatrix {
    let o1 = real_orthogonal(rng, dim);
    let o2 = real_orthogonal(rng, dim);
    let d = ComplexMatrix::diag(
        &(0..dim)
            .map(|_| C64::new(rng.random_range(0.5..2.0), 0.0))
            .collect::<Vec<_>>(),
    );
    &(&o1 * &d) * &o2
}

/// Hermitian matrix with eigenvalues drawn uniformly from `[lo, hi]` in a
/// Haar-random eigenbasis.
pub fn hermitian_with_spectrum<R: Rng + ?Sized>(
    rng: &mut R,
    dim: usize,
    lo: f64,
    hi: f64,
) -> ComplexMatrix {
    let w = unitary(rng, dim);
    let d = ComplexMatrix::diag(
        &(0..dim)
            .map(|_| C64::new(rng.random_range(lo..hi), 0.0))
            .collect::<Vec<_>>(),
    );
    (&(&w * &d) * &w.adjoint()).hermitized()
}

/// Generic Hermitian matrix (Gaussian entries, no spectral constraint).
pub fn hermitian<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> ComplexMatrix {
    ginibre(rng, dim).hermitized()
}

/// Random positive-definite metric with eigenvalues in `[0.3, 3]`.
pub fn pd_metric<R: Rng + ?Sized>(rng: &mut R, dim: usize, tol: &Tolerance) -> Result<MetricOperator> {
    MetricOperator::new(hermitian_with_spectrum(rng, dim, 0.3, 3.0), tol)
}

/// Flat-Dirichlet probability vector.
pub fn probability_vector<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Vec<f64> {
    let mut p: Vec<f64> = (0..dim)
        .map(|_| -rng.random_range(1e-12..1.0f64).ln())
        .collect();
    let total: f64 = p.iter().sum();
    for x in p.iter_mut() {
        *x /= total;
    }
    p
}

/// Random density matrix (unit-trace positive) in a Haar-random eigenbasis.
pub fn density<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> ComplexMatrix {
    let w = unitary(rng, dim);
    let p = probability_vector(rng, dim);
    let d = ComplexMatrix::diag(&p.iter().map(|&x| C64::new(x, 0.0)).collect::<Vec<_>>());
    (&(&w * &d) * &w.adjoint()).hermitized()
}

/// Random real symmetric density matrix.
pub fn real_symmetric_density<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> ComplexMatrix {
    let o = real_orthogonal(rng, dim);
    let p = probability_vector(rng, dim);
    let d = ComplexMatrix::diag(&p.iter().map(|&x| C64::new(x, 0.0)).collect::<Vec<_>>());
    (&(&o * &d) * &o.transpose()).hermitized()
}

/// Strictly increasing real values in `[lo, hi]` with pairwise gaps of at
/// least `(hi - lo) / (10 dim^2)`.
pub fn distinct_real_spectrum<R: Rng + ?Sized>(
    rng: &mut R,
    dim: usize,
    lo: f64,
    hi: f64,
) -> Vec<f64> {
    let min_gap = (hi - lo) / (10.0 * (dim * dim) as f64);
    loop {
        let mut vals: Vec<f64> = (0..dim).map(|_| rng.random_range(lo..hi)).collect();
        vals.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
        if vals.windows(2).all(|w| w[1] - w[0] >= min_gap) {
            return vals;
        }
    }
}

/// Operator in the unbroken phase of the involution `k`: real distinct
/// eigenvalues on a K-invariant (generally non-orthogonal) eigenbasis.
///
/// The linear part of an antiunitary involution is a symmetric unitary
/// `U = V V^T`; the columns of `V` are K-invariant, and so is any real
/// linear combination of them. Conjugating a real diagonal by `V S` with `S`
/// real invertible therefore yields a K-symmetric operator with unbroken
/// symmetry.
pub fn unbroken_operator<R: Rng + ?Sized>(
    rng: &mut R,
    k: &AntilinearOperator,
    lo: f64,
    hi: f64,
    tol: &Tolerance,
) -> Result<ComplexMatrix> {
    let d = k.dim();
    let v = takagi(k.linear_part(), tol)?;
    let s = well_conditioned_real(rng, d);
    let b = &v * &s;
    let spectrum = distinct_real_spectrum(rng, d, lo, hi);
    let diag = ComplexMatrix::diag(&spectrum.iter().map(|&x| C64::new(x, 0.0)).collect::<Vec<_>>());
    Ok(&(&b * &diag) * &b.inverse()?)
}

/// Broken-phase operator for the same involution: complex-conjugate
/// eigenvalue pairs assembled on a K-paired eigenbasis (`K` maps the
/// eigenvector for `lambda` to the eigenvector for `conj(lambda)`).
pub fn broken_operator<R: Rng + ?Sized>(
    rng: &mut R,
    k: &AntilinearOperator,
    tol: &Tolerance,
) -> Result<ComplexMatrix> {
    let d = k.dim();
    let v = takagi(k.linear_part(), tol)?;
    let s = well_conditioned_real(rng, d);
    let b = &v * &s;
    // In the invariant frame, K acts like kappa; spectra closed under
    // conjugation with at least one strictly complex pair stay K-symmetric.
    let mut values = vec![C64::new(0.0, 0.0); d];
    let pairs = d / 2;
    for p in 0..pairs {
        let re = rng.random_range(-1.0..1.0);
        let im = rng.random_range(0.2..1.0);
        values[2 * p] = C64::new(re, im);
        values[2 * p + 1] = C64::new(re, -im);
    }
    if d % 2 == 1 {
        values[d - 1] = C64::new(rng.random_range(-1.0..1.0), 0.0);
    }
    // Pair the eigenvectors: columns 2p, 2p+1 of the eigenbasis are
    // w, conj(w) in the invariant frame.
    let mut basis = ComplexMatrix::zeros(d);
    for p in 0..pairs {
        let col = b.col(2 * p);
        let twisted: Vec<C64> = b
            .col(2 * p + 1)
            .iter()
            .map(|&z| z * C64::new(0.0, 1.0))
            .collect();
        let w: Vec<C64> = col.iter().zip(&twisted).map(|(a, t)| a + t).collect();
        let kw = k.apply(&w)?;
        basis.set_col(2 * p, &w);
        basis.set_col(2 * p + 1, &kw);
    }
    if d % 2 == 1 {
        basis.set_col(d - 1, &b.col(d - 1));
    }
    let diag = ComplexMatrix::diag(&values);
    Ok(&(&basis * &diag) * &basis.inverse()?)
}

/// Random `eta`-antiunitary involution: the image of a standard involution
/// under the similarity that maps the `eta` inner product to the flat one.
pub fn eta_antiunitary_involution<R: Rng + ?Sized>(
    rng: &mut R,
    eta: &MetricOperator,
) -> AntilinearOperator {
    let k = antiunitary_involution(rng, eta.dim());
    let u = &(eta.inv_sqrt() * k.linear_part()) * &eta.sqrt().conj();
    AntilinearOperator::new(u)
}

/// Random `eta`-Hermitian operator `eta^{-1/2} A eta^{1/2}` with `A`
/// Hermitian.
pub fn eta_hermitian<R: Rng + ?Sized>(rng: &mut R, eta: &MetricOperator) -> ComplexMatrix {
    let a = hermitian(rng, eta.dim());
    &(eta.inv_sqrt() * &a) * eta.sqrt()
}

/// Random `eta`-unitary operator `eta^{-1/2} W eta^{1/2}` with `W` unitary.
pub fn eta_unitary<R: Rng + ?Sized>(rng: &mut R, eta: &MetricOperator) -> ComplexMatrix {
    let w = unitary(rng, eta.dim());
    &(eta.inv_sqrt() * &w) * eta.sqrt()
}
