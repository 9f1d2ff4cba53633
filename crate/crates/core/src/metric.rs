//! Metric operators and the geometry they induce.
//!
//! A metric operator is a Hermitian positive-definite `eta` defining the
//! inner product `<phi|psi>_eta = <phi|eta|psi>`. The module provides
//! quasi-Hermiticity (`eta M eta^{-1} = M^dagger`), `eta`-unitarity
//! (`M^dagger eta M = eta`) and `eta`-positivity tests, construction of a
//! metric from an unbroken symmetric Hamiltonian via biorthogonal left
//! eigenvectors, and the closed-form 2x2 family with its charge operator and
//! CPT inner product.

use crate::antilinear::AntilinearOperator;
use crate::classify::{classify, PhaseTag};
use crate::error::{Error, Result};
use crate::linalg::{
    dot_bilinear, eig, hermitian_eig, inner, C64, ComplexMatrix, Tolerance,
};

/// Hermitian positive-definite metric with eagerly computed square roots.
#[derive(Debug, Clone)]
pub struct MetricOperator {
    eta: ComplexMatrix,
    sqrt: ComplexMatrix,
    inv_sqrt: ComplexMatrix,
    min_eigenvalue: f64,
    max_eigenvalue: f64,
}

impl MetricOperator {
    /// Validates Hermiticity and positivity, then caches `eta^{1/2}` and
    /// `eta^{-1/2}`.
    pub fn new(eta: ComplexMatrix, tol: &Tolerance) -> Result<Self> {
        let residual = eta.hermitian_residual();
        if residual > tol.gate(eta.fro_norm()) {
            return Err(Error::NotHermitian { residual });
        }
        let eta = eta.hermitized();
        let decomp = hermitian_eig(&eta, tol)?;
        let min_eigenvalue = decomp.eigenvalues[0];
        let max_eigenvalue = *decomp.eigenvalues.last().expect("nonempty spectrum");
        if min_eigenvalue <= tol.abs_tol {
            return Err(Error::NotPositiveDefinite {
                min_eigenvalue,
            });
        }
        let sqrt = decomp.apply_spectral(f64::sqrt);
        let inv_sqrt = decomp.apply_spectral(|x| 1.0 / x.sqrt());
        Ok(Self {
            eta,
            sqrt,
            inv_sqrt,
            min_eigenvalue,
            max_eigenvalue,
        })
    }

    /// The trivial metric (standard inner product).
    pub fn identity(dim: usize) -> Self {
        let id = ComplexMatrix::identity(dim);
        Self {
            eta: id.clone(),
            sqrt: id.clone(),
            inv_sqrt: id,
            min_eigenvalue: 1.0,
            max_eigenvalue: 1.0,
        }
    }

    pub fn eta(&self) -> &ComplexMatrix {
        &self.eta
    }

    pub fn sqrt(&self) -> &ComplexMatrix {
        &self.sqrt
    }

    pub fn inv_sqrt(&self) -> &ComplexMatrix {
        &self.inv_sqrt
    }

    pub fn dim(&self) -> usize {
        self.eta.dim()
    }

    /// Ratio of extreme eigenvalues.
    pub fn condition(&self) -> f64 {
        self.max_eigenvalue / self.min_eigenvalue
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.min_eigenvalue
    }
}

/// The modified inner product `<phi|eta|psi>`.
pub fn eta_inner(eta: &MetricOperator, phi: &[C64], psi: &[C64]) -> Result<C64> {
    if phi.len() != eta.dim() || psi.len() != eta.dim() {
        return Err(Error::DimensionMismatch {
            left: eta.dim(),
            right: phi.len().max(psi.len()),
        });
    }
    Ok(inner(phi, &eta.eta.mul_vec(psi)))
}

/// Residual of the quasi-Hermiticity identity `eta M eta^{-1} = M^dagger`,
/// evaluated as `|eta M - M^dagger eta|_F` (avoids forming the inverse).
pub fn eta_hermiticity_residual(m: &ComplexMatrix, eta: &MetricOperator) -> Result<f64> {
    if m.dim() != eta.dim() {
        return Err(Error::DimensionMismatch {
            left: eta.dim(),
            right: m.dim(),
        });
    }
    let lhs = &eta.eta * m;
    let rhs = &m.adjoint() * &eta.eta;
    Ok((&lhs - &rhs).fro_norm())
}

/// True iff `eta M eta^{-1} = M^dagger` within tolerance.
pub fn is_eta_hermitian(m: &ComplexMatrix, eta: &MetricOperator, tol: &Tolerance) -> Result<bool> {
    let scale = m.fro_norm().max(1.0) * eta.eta.fro_norm().max(1.0);
    Ok(eta_hermiticity_residual(m, eta)? <= tol.gate(scale))
}

/// True iff `M^dagger eta M = eta` within tolerance.
pub fn is_eta_unitary(m: &ComplexMatrix, eta: &MetricOperator, tol: &Tolerance) -> Result<bool> {
    if m.dim() != eta.dim() {
        return Err(Error::DimensionMismatch {
            left: eta.dim(),
            right: m.dim(),
        });
    }
    let lhs = &(&m.adjoint() * &eta.eta) * m;
    Ok(lhs.distance(&eta.eta) <= tol.gate(eta.eta.fro_norm()))
}

/// True iff E is positive semidefinite in the eta order, i.e. `eta E` is PSD.
/// Requires E to be eta-Hermitian (which makes `eta E` Hermitian).
pub fn is_eta_psd(e: &ComplexMatrix, eta: &MetricOperator, tol: &Tolerance) -> Result<bool> {
    let residual = eta_hermiticity_residual(e, eta)?;
    let scale = e.fro_norm().max(1.0) * eta.eta.fro_norm().max(1.0);
    if residual > tol.gate(scale) {
        return Err(Error::NotEtaHermitian { residual });
    }
    let prod = (&eta.eta * e).hermitized();
    let decomp = hermitian_eig(&prod, tol)?;
    Ok(decomp.eigenvalues[0] >= -tol.gate(prod.fro_norm()))
}

/// True iff `0 <=_eta E <=_eta 1`: both `eta E` and `eta (1 - E)` are PSD.
pub fn is_eta_effect(e: &ComplexMatrix, eta: &MetricOperator, tol: &Tolerance) -> Result<bool> {
    let complement = &ComplexMatrix::identity(e.dim()) - e;
    Ok(is_eta_psd(e, eta, tol)? && is_eta_psd(&complement, eta, tol)?)
}

/// Metric constructed from an unbroken spectrum, with conditioning
/// diagnostics.
#[derive(Debug, Clone)]
pub struct ConstructedMetric {
    pub metric: MetricOperator,
    /// Condition number of the right eigenbasis used in the construction.
    pub eigenbasis_condition: f64,
    /// Set when the eigenbasis conditioning makes the metric unreliable.
    pub warning: Option<String>,
}

/// Condition number above which the constructed metric carries a warning.
const EIGENBASIS_CONDITION_WARN: f64 = 1e8;

/// Builds a metric `eta = sum_j |chi_j><chi_j|` from the biorthogonally
/// normalized left eigenvectors of an unbroken operator, guaranteeing
/// `eta H eta^{-1} = H^dagger`. Per-eigenvector weights are fixed to one, so
/// a Hermitian input returns `eta = 1`.
pub fn metric_from_unbroken(
    h: &ComplexMatrix,
    k: &AntilinearOperator,
    tol: &Tolerance,
) -> Result<ConstructedMetric> {
    let phase = classify(h, k, tol)?;
    if phase.tag != PhaseTag::Unbroken {
        return Err(Error::PhaseNotUnbroken {
            phase: phase.tag.to_string(),
        });
    }
    let decomp = eig(h, tol)?;
    // Right eigenvectors have unit norm; left vectors satisfy L^dagger R = 1,
    // so chi_j = L e_j gives <chi_j|v_k> = delta_{jk}.
    let l = &decomp.left_vectors;
    let eta = (l * &l.adjoint()).hermitized();
    let metric = MetricOperator::new(eta, tol)?;

    let svals = crate::linalg::singular_values(&decomp.right_vectors)?;
    let smin = svals.last().copied().unwrap_or(0.0).max(f64::MIN_POSITIVE);
    let eigenbasis_condition = svals.first().copied().unwrap_or(0.0) / smin;
    let warning = (eigenbasis_condition > EIGENBASIS_CONDITION_WARN).then(|| {
        format!(
            "eigenbasis condition number {eigenbasis_condition:.3e} exceeds {EIGENBASIS_CONDITION_WARN:.0e}; metric may be inaccurate"
        )
    });
    Ok(ConstructedMetric {
        metric,
        eigenbasis_condition,
        warning,
    })
}

/// The closed-form 2x2 family `[[r e^{i theta}, s], [s, r e^{-i theta}]]`,
/// symmetric under `sigma_x kappa`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoByTwoFamily {
    pub r: f64,
    pub s: f64,
    pub theta: f64,
}

impl TwoByTwoFamily {
    pub fn new(r: f64, s: f64, theta: f64) -> Result<Self> {
        if !(r.is_finite() && s.is_finite() && theta.is_finite()) {
            return Err(Error::InvalidArgument(
                "family parameters must be finite".into(),
            ));
        }
        Ok(Self { r, s, theta })
    }

    pub fn hamiltonian(&self) -> ComplexMatrix {
        let (sin, cos) = self.theta.sin_cos();
        ComplexMatrix::from_rows(&[
            vec![C64::new(self.r * cos, self.r * sin), C64::new(self.s, 0.0)],
            vec![C64::new(self.s, 0.0), C64::new(self.r * cos, -self.r * sin)],
        ])
        .expect("2x2 construction")
    }

    /// `s^2 - r^2 sin^2 theta`; positive in the unbroken regime, zero at the
    /// exceptional point, negative in the broken regime.
    pub fn discriminant(&self) -> f64 {
        let rs = self.r * self.theta.sin();
        self.s * self.s - rs * rs
    }

    /// The parity operator of the family.
    pub fn parity() -> ComplexMatrix {
        ComplexMatrix::from_rows(&[
            vec![C64::new(0.0, 0.0), C64::new(1.0, 0.0)],
            vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
        ])
        .expect("sigma_x")
    }

    /// The family's antiunitary symmetry `sigma_x kappa`.
    pub fn symmetry() -> AntilinearOperator {
        AntilinearOperator::new(Self::parity())
    }

    /// The mixing angle with `sin(alpha) = (r/s) sin(theta)`, defined only in
    /// the unbroken regime.
    pub fn alpha(&self) -> Result<f64> {
        if self.s == 0.0 {
            return Err(Error::ZeroCoupling);
        }
        let ratio = (self.r / self.s) * self.theta.sin();
        if ratio.abs() >= 1.0 {
            return Err(Error::AlphaUndefined { value: ratio });
        }
        Ok(ratio.asin())
    }

    /// `lambda_+- = r cos(theta) +- sqrt(s^2 - r^2 sin^2 theta)` (complex
    /// square root, so the broken regime yields a conjugate pair).
    pub fn eigenvalues(&self) -> (C64, C64) {
        let base = C64::new(self.r * self.theta.cos(), 0.0);
        let root = C64::new(self.discriminant(), 0.0).sqrt();
        (base + root, base - root)
    }

    /// The symmetry-invariant eigenvectors
    /// `|lambda_+> = (e^{i alpha/2}, e^{-i alpha/2}) / sqrt(2 cos alpha)` and
    /// `|lambda_-> = i (e^{-i alpha/2}, -e^{i alpha/2}) / sqrt(2 cos alpha)`.
    pub fn eigenvectors(&self) -> Result<(Vec<C64>, Vec<C64>)> {
        let alpha = self.alpha()?;
        let norm = 1.0 / (2.0 * alpha.cos()).sqrt();
        let half = C64::from_polar(1.0, alpha / 2.0);
        let plus = vec![half * norm, half.conj() * norm];
        let i = C64::new(0.0, 1.0);
        let minus = vec![i * half.conj() * norm, -(i * half) * norm];
        Ok((plus, minus))
    }

    /// The charge operator
    /// `C = (1/cos alpha) [[i sin alpha, 1], [1, -i sin alpha]]` with
    /// `C^2 = 1` and `C |lambda_+-> = +- |lambda_+->`.
    pub fn charge_operator(&self) -> Result<ComplexMatrix> {
        let alpha = self.alpha()?;
        let (sin, cos) = alpha.sin_cos();
        Ok(ComplexMatrix::from_rows(&[
            vec![C64::new(0.0, sin / cos), C64::new(1.0 / cos, 0.0)],
            vec![C64::new(1.0 / cos, 0.0), C64::new(0.0, -sin / cos)],
        ])
        .expect("2x2 construction"))
    }

    /// The canonical family metric `eta = P C`, positive definite across the
    /// unbroken regime.
    pub fn metric(&self, tol: &Tolerance) -> Result<MetricOperator> {
        let pc = &Self::parity() * &self.charge_operator()?;
        MetricOperator::new(pc, tol)
    }

    /// The CPT inner product `(CPT psi) . phi` with the bilinear dot product;
    /// equals `eta_inner` with `eta = P C`.
    pub fn cpt_inner(&self, psi: &[C64], phi: &[C64]) -> Result<C64> {
        if psi.len() != 2 || phi.len() != 2 {
            return Err(Error::DimensionMismatch {
                left: 2,
                right: psi.len().max(phi.len()),
            });
        }
        let c = self.charge_operator()?;
        // CPT|psi> = C sigma_x conj(psi).
        let conj: Vec<C64> = psi.iter().map(|z| z.conj()).collect();
        let cpt = c.mul_vec(&Self::parity().mul_vec(&conj));
        Ok(dot_bilinear(&cpt, phi))
    }
}
