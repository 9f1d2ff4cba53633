//! Antilinear operators `x -> U conj(x)` and their canonical decompositions.
//!
//! The conjugation is part of the type: an [`AntilinearOperator`] is never a
//! bare matrix, because composition and commutation rules differ between
//! linear and antilinear maps. The module provides involution and
//! (metric-twisted) antiunitarity tests, the real form `K = V kappa V^dagger`
//! obtained by Takagi factorization of the linear part, the metric
//! conjugation `kappa_eta`, and standardization of `eta`-antiunitary
//! operators back to ordinary antiunitaries.

use crate::error::{Error, Result};
use crate::linalg::{takagi, C64, ComplexMatrix, Tolerance};
use crate::metric::MetricOperator;

/// An antilinear operator acting as `x -> U conj(x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct AntilinearOperator {
    u: ComplexMatrix,
}

impl AntilinearOperator {
    /// Wraps a linear part U; the operator is `x -> U conj(x)`.
    pub fn new(u: ComplexMatrix) -> Self {
        Self { u }
    }

    /// Plain complex conjugation in the canonical basis (U = 1).
    pub fn kappa(dim: usize) -> Self {
        Self {
            u: ComplexMatrix::identity(dim),
        }
    }

    /// The linear part U.
    pub fn linear_part(&self) -> &ComplexMatrix {
        &self.u
    }

    pub fn dim(&self) -> usize {
        self.u.dim()
    }

    /// Applies the operator: `U conj(x)`.
    pub fn apply(&self, x: &[C64]) -> Result<Vec<C64>> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: x.len(),
            });
        }
        let conj: Vec<C64> = x.iter().map(|z| z.conj()).collect();
        Ok(self.u.mul_vec(&conj))
    }

    /// Composition of two antilinear operators is the linear map
    /// `U_A conj(U_B)`.
    pub fn compose(&self, other: &Self) -> Result<ComplexMatrix> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: other.dim(),
            });
        }
        Ok(&self.u * &other.u.conj())
    }

    /// Residuals of the two defining properties of an antiunitary involution:
    /// `(|U^dagger U - 1|_F, |U conj(U) - 1|_F)`.
    pub fn involution_residuals(&self) -> (f64, f64) {
        let d = self.dim();
        let id = ComplexMatrix::identity(d);
        let unitarity = (&self.u.adjoint() * &self.u).distance(&id);
        let involution = (&self.u * &self.u.conj()).distance(&id);
        (unitarity, involution)
    }

    /// True iff U is unitary and `U conj(U) = 1`, both within tolerance.
    pub fn is_antiunitary_involution(&self, tol: &Tolerance) -> bool {
        let gate = tol.gate((self.dim() as f64).sqrt());
        let (unitarity, involution) = self.involution_residuals();
        unitarity <= gate && involution <= gate
    }

    /// Errors unless the operator is an antiunitary involution.
    pub fn require_antiunitary_involution(&self, tol: &Tolerance) -> Result<()> {
        if self.is_antiunitary_involution(tol) {
            Ok(())
        } else {
            let (unitarity, involution) = self.involution_residuals();
            Err(Error::NotAntiunitaryInvolution {
                unitarity,
                involution,
            })
        }
    }

    /// True iff the operator preserves the eta-inner product up to
    /// conjugation, via the matrix identity `U^dagger eta U = eta^T`.
    pub fn is_eta_antiunitary(&self, eta: &MetricOperator, tol: &Tolerance) -> Result<bool> {
        if self.dim() != eta.dim() {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: eta.dim(),
            });
        }
        Ok(self.eta_antiunitarity_residual(eta) <= tol.gate(eta.eta().fro_norm()))
    }

    /// Residual `|U^dagger eta U - eta^T|_F`.
    pub fn eta_antiunitarity_residual(&self, eta: &MetricOperator) -> f64 {
        let lhs = &(&self.u.adjoint() * eta.eta()) * &self.u;
        lhs.distance(&eta.eta().transpose())
    }

    /// Unitary V with `K = V kappa V^dagger` (equivalently `U = V V^T`),
    /// computed by Takagi factorization. V is unique only up to a real
    /// orthogonal right factor; compare actions, never the matrices.
    pub fn real_form(&self, tol: &Tolerance) -> Result<ComplexMatrix> {
        self.require_antiunitary_involution(tol)?;
        takagi(&self.u, tol)
    }

    /// True iff `A K = K A`, i.e. `U conj(A) = A U`.
    pub fn commutes(&self, a: &ComplexMatrix, tol: &Tolerance) -> Result<bool> {
        Ok(self.commutation_residual(a)? <= tol.gate(a.fro_norm().max(1.0)))
    }

    /// Residual `|U conj(A) - A U|_F` of the commutation identity.
    pub fn commutation_residual(&self, a: &ComplexMatrix) -> Result<f64> {
        if self.dim() != a.dim() {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: a.dim(),
            });
        }
        Ok((&(&self.u * &a.conj()) - &(a * &self.u)).fro_norm())
    }

    /// The linear map `K A K` (conjugation of a matrix by the operator):
    /// `U conj(A) conj(U)`.
    pub fn conjugate_matrix(&self, a: &ComplexMatrix) -> Result<ComplexMatrix> {
        if self.dim() != a.dim() {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: a.dim(),
            });
        }
        Ok(&(&self.u * &a.conj()) * &self.u.conj())
    }
}

/// The metric conjugation `kappa_eta = eta^{-1/2} kappa eta^{1/2}`, an
/// eta-antiunitary involution; its linear part is
/// `eta^{-1/2} conj(eta^{1/2})`.
pub fn eta_conjugation(eta: &MetricOperator) -> AntilinearOperator {
    AntilinearOperator::new(eta.inv_sqrt() * &eta.sqrt().conj())
}

/// Standardizes an eta-antiunitary operator:
/// `K = eta^{1/2} K_eta eta^{-1/2}` is an ordinary antiunitary, with linear
/// part `eta^{1/2} U conj(eta^{-1/2})`. When `K_eta` is additionally an
/// involution, the result is an antiunitary involution.
pub fn standardize(
    k_eta: &AntilinearOperator,
    eta: &MetricOperator,
    tol: &Tolerance,
) -> Result<AntilinearOperator> {
    if !k_eta.is_eta_antiunitary(eta, tol)? {
        return Err(Error::NotEtaAntiunitary {
            residual: k_eta.eta_antiunitarity_residual(eta),
        });
    }
    let u = &(eta.sqrt() * k_eta.linear_part()) * &eta.inv_sqrt().conj();
    Ok(AntilinearOperator::new(u))
}
