//! Desk-scale dense complex linear algebra.
//!
//! Everything in this crate runs on small dense matrices (dimension capped at
//! [`MAX_DIM`]), so the solvers favour robustness and auditability over
//! asymptotic speed: Hessenberg + shifted QR for general eigenproblems,
//! Jacobi sweeps for Hermitian eigenproblems and singular values, and a
//! simultaneous-diagonalization Takagi factorization for symmetric unitaries.
//!
//! [`ComplexMatrix`] is the universal carrier: operators, effects, states,
//! projectors and symmetry linear parts are all plain square complex matrices.

mod hermitian;
mod lu;
mod schur;
mod svd;
mod takagi;

pub use hermitian::{hermitian_eig, sqrt_pd, HermitianEig};
pub use lu::Lu;
pub use schur::{eig, EigenCluster, EigenDecomposition};
pub use svd::{nullspace_basis, numerical_rank, singular_values, Svd};
pub use takagi::takagi;

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use crate::error::{Error, Result};

/// Complex double-precision scalar used everywhere.
pub type C64 = num_complex::Complex64;

/// Hard cap on matrix dimension; the dense O(d^3)–O(d^4) algorithms here are
/// meant for operator analysis at desk scale, not bulk numerics.
pub const MAX_DIM: usize = 64;

/// Absolute/relative tolerance pair used by every approximate comparison.
///
/// A quantity with natural scale `s` counts as zero when it is at most
/// `max(abs_tol, rel_tol * s)`; see [`Tolerance::gate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs_tol: f64,
    pub rel_tol: f64,
}

impl Tolerance {
    /// Default absolute floor.
    pub const DEFAULT_ABS: f64 = 1e-10;
    /// Default relative tolerance.
    pub const DEFAULT_REL: f64 = 1e-9;

    /// Builds a tolerance pair, rejecting negative or non-finite entries.
    pub fn new(abs_tol: f64, rel_tol: f64) -> Result<Self> {
        if !abs_tol.is_finite() || !rel_tol.is_finite() || abs_tol < 0.0 || rel_tol < 0.0 {
            return Err(Error::InvalidArgument(format!(
                "tolerances must be finite and nonnegative, got abs={abs_tol}, rel={rel_tol}"
            )));
        }
        Ok(Self { abs_tol, rel_tol })
    }

    /// Derives a pair from a single relative tolerance, keeping the absolute
    /// floor one decade tighter (so the default CLI `1e-9` reproduces the
    /// library defaults).
    pub fn from_rel(rel_tol: f64) -> Result<Self> {
        Self::new(rel_tol * 0.1, rel_tol)
    }

    /// Threshold below which a quantity of natural scale `scale` is treated
    /// as zero: `max(abs_tol, rel_tol * scale)`.
    pub fn gate(&self, scale: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * scale)
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            abs_tol: Self::DEFAULT_ABS,
            rel_tol: Self::DEFAULT_REL,
        }
    }
}

/// Dense square complex matrix in row-major order.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    /// Builds a matrix from row-major data, validating shape and finiteness.
    pub fn new(dim: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != dim * dim {
            return Err(Error::NotSquare {
                dim,
                len: data.len(),
            });
        }
        if dim > MAX_DIM {
            return Err(Error::DimensionTooLarge { dim, max: MAX_DIM });
        }
        let m = Self { dim, data };
        m.check_finite()?;
        Ok(m)
    }

    /// Builds a matrix entry by entry. Intended for internal construction
    /// from already-validated inputs; does not re-check finiteness.
    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(f(i, j));
            }
        }
        Self { dim, data }
    }

    /// Builds a matrix from explicit rows (convenience for literals in tests
    /// and file parsing).
    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let dim = rows.len();
        let mut data = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::NotSquare {
                    dim,
                    len: row.len() * dim,
                });
            }
            data.extend_from_slice(row);
        }
        Self::new(dim, data)
    }

    /// Zero matrix.
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![C64::new(0.0, 0.0); dim * dim],
        }
    }

    /// Identity matrix.
    pub fn identity(dim: usize) -> Self {
        Self::from_fn(dim, |i, j| {
            if i == j {
                C64::new(1.0, 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        })
    }

    /// Scalar multiple of the identity.
    pub fn scalar(dim: usize, z: C64) -> Self {
        Self::from_fn(dim, |i, j| if i == j { z } else { C64::new(0.0, 0.0) })
    }

    /// Diagonal matrix from complex entries.
    pub fn diag(entries: &[C64]) -> Self {
        let dim = entries.len();
        Self::from_fn(dim, |i, j| {
            if i == j {
                entries[i]
            } else {
                C64::new(0.0, 0.0)
            }
        })
    }

    /// Rank-one matrix `u v^dagger`.
    pub fn outer(u: &[C64], v: &[C64]) -> Self {
        assert_eq!(u.len(), v.len(), "outer product requires equal lengths");
        let dim = u.len();
        Self::from_fn(dim, |i, j| u[i] * v[j].conj())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    /// Row `i` as a slice.
    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    /// Column `j` as an owned vector.
    pub fn col(&self, j: usize) -> Vec<C64> {
        (0..self.dim).map(|i| self[(i, j)]).collect()
    }

    /// Replaces column `j`.
    pub fn set_col(&mut self, j: usize, v: &[C64]) {
        assert_eq!(v.len(), self.dim);
        for i in 0..self.dim {
            self[(i, j)] = v[i];
        }
    }

    fn check_finite(&self) -> Result<()> {
        for i in 0..self.dim {
            for j in 0..self.dim {
                let z = self[(i, j)];
                if !z.re.is_finite() || !z.im.is_finite() {
                    return Err(Error::NonFinite { row: i, col: j });
                }
            }
        }
        Ok(())
    }

    /// Entrywise map.
    pub fn map(&self, f: impl Fn(C64) -> C64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|&z| f(z)).collect(),
        }
    }

    /// Entrywise complex conjugate (no transpose).
    pub fn conj(&self) -> Self {
        self.map(|z| z.conj())
    }

    /// Transpose without conjugation.
    pub fn transpose(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)])
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)].conj())
    }

    /// Matrix trace.
    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    /// Frobenius norm.
    pub fn fro_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entry magnitude.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Frobenius distance to another matrix.
    pub fn distance(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim, "distance requires equal dimensions");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// `|A - A^dagger|_F`, the deviation from Hermiticity.
    pub fn hermitian_residual(&self) -> f64 {
        self.distance(&self.adjoint())
    }

    /// `|A - A^T|_F`, the deviation from complex symmetry.
    pub fn symmetric_residual(&self) -> f64 {
        self.distance(&self.transpose())
    }

    /// Hermiticity test scaled by the matrix norm.
    pub fn is_hermitian(&self, tol: &Tolerance) -> bool {
        self.hermitian_residual() <= tol.gate(self.fro_norm())
    }

    /// Hermitian part `(A + A^dagger)/2`; used to clean up roundoff on
    /// quantities that are Hermitian by construction.
    pub fn hermitized(&self) -> Self {
        let adj = self.adjoint();
        Self::from_fn(self.dim, |i, j| 0.5 * (self[(i, j)] + adj[(i, j)]))
    }

    /// Matrix-vector product.
    pub fn mul_vec(&self, x: &[C64]) -> Vec<C64> {
        assert_eq!(x.len(), self.dim, "matrix-vector dimension mismatch");
        (0..self.dim)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(x)
                    .map(|(&a, &b)| a * b)
                    .sum::<C64>()
            })
            .collect()
    }

    /// Scales every entry by a complex factor.
    pub fn scale(&self, z: C64) -> Self {
        self.map(|w| w * z)
    }

    /// Scales every entry by a real factor.
    pub fn scale_re(&self, s: f64) -> Self {
        self.map(|w| w * s)
    }

    /// `A - z * I`.
    pub fn sub_scalar(&self, z: C64) -> Self {
        let mut out = self.clone();
        for i in 0..self.dim {
            out[(i, i)] -= z;
        }
        out
    }

    /// Real part of the matrix as a new complex matrix with zero imaginary
    /// entries.
    pub fn real_part(&self) -> Self {
        self.map(|z| C64::new(z.re, 0.0))
    }

    /// Frobenius norm of the imaginary part.
    pub fn imag_norm(&self) -> f64 {
        self.data
            .iter()
            .map(|z| z.im * z.im)
            .sum::<f64>()
            .sqrt()
    }

    /// True when all entries are real within `atol`.
    pub fn is_real(&self, atol: f64) -> bool {
        self.imag_norm() <= atol
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.dim, self.dim)?;
        for i in 0..self.dim {
            write!(f, "  ")?;
            for j in 0..self.dim {
                let z = self[(i, j)];
                write!(f, "{:+.6}{:+.6}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.dim + j]
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "matrix addition dimension mismatch");
        ComplexMatrix {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "matrix subtraction dimension mismatch");
        ComplexMatrix {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> ComplexMatrix {
        self.map(|z| -z)
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(
            self.dim, rhs.dim,
            "matrix multiplication dimension mismatch"
        );
        let d = self.dim;
        let mut out = ComplexMatrix::zeros(d);
        for i in 0..d {
            for k in 0..d {
                let a = self[(i, k)];
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                let rhs_row = rhs.row(k);
                let out_row = &mut out.data[i * d..(i + 1) * d];
                for j in 0..d {
                    out_row[j] += a * rhs_row[j];
                }
            }
        }
        out
    }
}

/// `tr(a b)` computed without forming the product.
pub fn trace_product(a: &ComplexMatrix, b: &ComplexMatrix) -> C64 {
    assert_eq!(a.dim(), b.dim(), "trace product dimension mismatch");
    let d = a.dim();
    let mut sum = C64::new(0.0, 0.0);
    for i in 0..d {
        for j in 0..d {
            sum += a[(i, j)] * b[(j, i)];
        }
    }
    sum
}

/// Standard sesquilinear inner product `<x|y> = sum conj(x_i) y_i`
/// (antilinear in the first argument).
pub fn inner(x: &[C64], y: &[C64]) -> C64 {
    assert_eq!(x.len(), y.len(), "inner product dimension mismatch");
    x.iter().zip(y).map(|(a, b)| a.conj() * b).sum()
}

/// Bilinear dot product `sum x_i y_i` (no conjugation); this is the pairing
/// used by the CPT inner product.
pub fn dot_bilinear(x: &[C64], y: &[C64]) -> C64 {
    assert_eq!(x.len(), y.len(), "dot product dimension mismatch");
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

/// Euclidean norm of a complex vector.
pub fn vec_norm(x: &[C64]) -> f64 {
    x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Normalizes a vector in place; returns the original norm.
pub fn normalize(x: &mut [C64]) -> f64 {
    let n = vec_norm(x);
    if n > 0.0 {
        for z in x.iter_mut() {
            *z /= n;
        }
    }
    n
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn new_rejects_non_square_data() {
        assert!(ComplexMatrix::new(2, vec![c(1.0, 0.0); 3]).is_err());
    }

    #[test]
    fn new_rejects_non_finite_entries() {
        let mut data = vec![c(0.0, 0.0); 4];
        data[2] = c(f64::NAN, 0.0);
        assert!(matches!(
            ComplexMatrix::new(2, data),
            Err(Error::NonFinite { row: 1, col: 0 })
        ));
    }

    #[test]
    fn new_rejects_oversized_dimension() {
        let d = MAX_DIM + 1;
        assert!(matches!(
            ComplexMatrix::new(d, vec![c(0.0, 0.0); d * d]),
            Err(Error::DimensionTooLarge { .. })
        ));
    }

    #[test]
    fn matmul_against_hand_computation() {
        let a = ComplexMatrix::from_rows(&[
            vec![c(1.0, 0.0), c(0.0, 1.0)],
            vec![c(2.0, 0.0), c(0.0, 0.0)],
        ])
        .unwrap();
        let b = ComplexMatrix::from_rows(&[
            vec![c(0.0, 0.0), c(1.0, 0.0)],
            vec![c(1.0, 0.0), c(0.0, -1.0)],
        ])
        .unwrap();
        let ab = &a * &b;
        // Row 1: [i*1, 1 + i*(-i)] = [i, 1 + 1] ; row 2: [0, 2].
        assert_eq!(ab[(0, 0)], c(0.0, 1.0));
        assert_eq!(ab[(0, 1)], c(2.0, 0.0));
        assert_eq!(ab[(1, 0)], c(0.0, 0.0));
        assert_eq!(ab[(1, 1)], c(2.0, 0.0));
    }

    #[test]
    fn adjoint_is_conjugate_transpose() {
        let a = ComplexMatrix::from_rows(&[
            vec![c(1.0, 2.0), c(3.0, 4.0)],
            vec![c(5.0, 6.0), c(7.0, 8.0)],
        ])
        .unwrap();
        let adj = a.adjoint();
        assert_eq!(adj[(0, 1)], c(5.0, -6.0));
        assert_eq!(adj[(1, 0)], c(3.0, -4.0));
    }

    #[test]
    fn trace_and_norms() {
        let a = ComplexMatrix::diag(&[c(1.0, 1.0), c(2.0, -1.0)]);
        assert_eq!(a.trace(), c(3.0, 0.0));
        assert!((a.fro_norm() - (1.0f64 + 1.0 + 4.0 + 1.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn hermitian_detection_uses_scaled_gate() {
        let tol = Tolerance::default();
        let h = ComplexMatrix::from_rows(&[
            vec![c(1.0, 0.0), c(0.0, -1.0)],
            vec![c(0.0, 1.0), c(2.0, 0.0)],
        ])
        .unwrap();
        assert!(h.is_hermitian(&tol));
        let n = ComplexMatrix::from_rows(&[
            vec![c(1.0, 0.0), c(0.0, 1.0)],
            vec![c(0.0, 1.0), c(2.0, 0.0)],
        ])
        .unwrap();
        assert!(!n.is_hermitian(&tol));
    }

    #[test]
    fn inner_is_antilinear_in_first_argument() {
        let x = [c(0.0, 1.0), c(1.0, 0.0)];
        let y = [c(1.0, 0.0), c(0.0, 0.0)];
        // <ix, y> should be -i <x, y> with x = (1, 0)-ish pieces; direct value:
        // conj(i)*1 + conj(1)*0 = -i.
        assert_eq!(inner(&x, &y), c(0.0, -1.0));
        assert_eq!(dot_bilinear(&x, &y), c(0.0, 1.0));
    }

    #[test]
    fn tolerance_gate_takes_the_larger_branch() {
        let tol = Tolerance::default();
        assert_eq!(tol.gate(0.0), Tolerance::DEFAULT_ABS);
        assert!((tol.gate(100.0) - 1e-7).abs() < 1e-20);
    }

    #[test]
    fn tolerance_rejects_negative_values() {
        assert!(Tolerance::new(-1.0, 0.0).is_err());
        assert!(Tolerance::new(0.0, f64::INFINITY).is_err());
    }
}
