//! Operational (generalized-probabilistic-theory) layer.
//!
//! Effects of three theories — K-symmetric projectors, `eta`-Hermitian
//! effects, and their intersection — are paired with probability weights
//! `tr(T E)`. The module provides effect samplers, the equivalence maps onto
//! Hermitian quantum theory and its real form, a constructive violation
//! search showing the projector theory admits exactly one state, and an
//! LP-based affine-dimension probe of each theory's state space.

pub mod lp;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::antilinear::{standardize, AntilinearOperator};
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, trace_product, C64, ComplexMatrix, Tolerance};
use crate::metric::{self, MetricOperator};
use crate::random;

use lp::LinearProgram;

/// A linear functional on effects, represented by `tr(T E)`.
#[derive(Debug, Clone)]
pub struct ProbabilityWeight {
    pub t: ComplexMatrix,
}

impl ProbabilityWeight {
    pub fn new(t: ComplexMatrix) -> Self {
        Self { t }
    }

    /// The maximally mixed weight `T = 1/d`.
    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            t: ComplexMatrix::scalar(dim, C64::new(1.0 / dim as f64, 0.0)),
        }
    }
}

/// The three effect theories under study.
#[derive(Debug, Clone)]
pub enum EffectTheory {
    /// All projectors commuting with an antiunitary involution K.
    KSymmetricProjectors { k: AntilinearOperator },
    /// All `eta`-Hermitian E with `0 <=_eta E <=_eta 1`.
    EtaHermitian { eta: MetricOperator },
    /// The intersection: `eta`-Hermitian effects that are also symmetric
    /// under an `eta`-antiunitary involution.
    EtaHermitianKSymmetric {
        eta: MetricOperator,
        k_eta: AntilinearOperator,
    },
}

impl EffectTheory {
    /// Projector theory; validates that K is an antiunitary involution.
    pub fn k_symmetric_projectors(k: AntilinearOperator, tol: &Tolerance) -> Result<Self> {
        k.require_antiunitary_involution(tol)?;
        Ok(Self::KSymmetricProjectors { k })
    }

    /// Quasi-Hermitian theory for a fixed metric.
    pub fn eta_hermitian(eta: MetricOperator) -> Self {
        Self::EtaHermitian { eta }
    }

    /// Combined theory; validates that `k_eta` is an `eta`-antiunitary
    /// involution.
    pub fn combined(
        eta: MetricOperator,
        k_eta: AntilinearOperator,
        tol: &Tolerance,
    ) -> Result<Self> {
        if !k_eta.is_eta_antiunitary(&eta, tol)? {
            return Err(Error::NotEtaAntiunitary {
                residual: k_eta.eta_antiunitarity_residual(&eta),
            });
        }
        let (_, involution) = k_eta.involution_residuals();
        let gate = tol.gate((k_eta.dim() as f64).sqrt() * eta.condition());
        if involution > gate {
            return Err(Error::NotAntiunitaryInvolution {
                unitarity: 0.0,
                involution,
            });
        }
        Ok(Self::EtaHermitianKSymmetric { eta, k_eta })
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::KSymmetricProjectors { k } => k.dim(),
            Self::EtaHermitian { eta } => eta.dim(),
            Self::EtaHermitianKSymmetric { eta, .. } => eta.dim(),
        }
    }
}

/// Evaluates the weight on an effect: `Re tr(T E)`, rejecting pairings whose
/// trace has a meaningful imaginary part.
pub fn evaluate(w: &ProbabilityWeight, e: &ComplexMatrix, tol: &Tolerance) -> Result<f64> {
    if w.t.dim() != e.dim() {
        return Err(Error::DimensionMismatch {
            left: w.t.dim(),
            right: e.dim(),
        });
    }
    let tr = trace_product(&w.t, e);
    let gate = tol.gate((w.t.fro_norm() * e.fro_norm()).max(1.0));
    if tr.im.abs() > gate {
        return Err(Error::ComplexTrace {
            imag: tr.im.abs(),
            tol: gate,
        });
    }
    Ok(tr.re)
}

/// Draws one random effect of the theory from a fresh stream seeded with
/// `seed`.
pub fn sample_effect(theory: &EffectTheory, seed: u64, tol: &Tolerance) -> Result<ComplexMatrix> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_effect_with(theory, &mut rng, tol)
}

/// Draws one random effect from a caller-managed stream.
pub fn sample_effect_with<R: Rng + ?Sized>(
    theory: &EffectTheory,
    rng: &mut R,
    tol: &Tolerance,
) -> Result<ComplexMatrix> {
    let d = theory.dim();
    match theory {
        EffectTheory::KSymmetricProjectors { k } => {
            let v = k.real_form(tol)?;
            // Random real idempotent Q = R D R^{-1}, transported by V.
            let r = random::well_conditioned_real(rng, d);
            let diag = ComplexMatrix::diag(
                &(0..d)
                    .map(|_| C64::new(if rng.random_bool(0.5) { 1.0 } else { 0.0 }, 0.0))
                    .collect::<Vec<_>>(),
            );
            let q = &(&r * &diag) * &r.inverse()?;
            Ok(&(&v * &q) * &v.adjoint())
        }
        EffectTheory::EtaHermitian { eta } => {
            let f = random::hermitian_with_spectrum(rng, d, 0.0, 1.0);
            Ok(&(eta.inv_sqrt() * &f) * eta.sqrt())
        }
        EffectTheory::EtaHermitianKSymmetric { eta, k_eta } => {
            let k = standardize(k_eta, eta, tol)?;
            let v = k.real_form(tol)?;
            // Real symmetric spectrum-[0,1] core, conjugated into the
            // K-invariant frame and then into the eta geometry.
            let o = random::real_orthogonal(rng, d);
            let diag = ComplexMatrix::diag(
                &(0..d)
                    .map(|_| C64::new(rng.random_range(0.0..1.0), 0.0))
                    .collect::<Vec<_>>(),
            );
            let f0 = &(&o * &diag) * &o.transpose();
            let f = &(&v * &f0) * &v.adjoint();
            Ok(&(eta.inv_sqrt() * &f) * eta.sqrt())
        }
    }
}

/// Which branch of the violation search produced the effect.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ViolationBranch {
    /// A diagonal entry of the transported weight lies outside `[0, 1]`.
    DiagonalRange { index: usize },
    /// An off-diagonal entry is nonzero.
    OffDiagonal { row: usize, col: usize },
    /// Two diagonal entries differ.
    DiagonalMismatch { first: usize, second: usize },
    /// The trace differs from one (unit-effect normalization).
    Normalization,
}

impl std::fmt::Display for ViolationBranch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::DiagonalRange { index } => write!(f, "diagonal_range[{index}]"),
            Self::OffDiagonal { row, col } => write!(f, "off_diagonal[{row},{col}]"),
            Self::DiagonalMismatch { first, second } => {
                write!(f, "diagonal_mismatch[{first},{second}]")
            }
            Self::Normalization => f.write_str("normalization"),
        }
    }
}

/// A K-symmetric projector witnessing that a candidate weight is not a
/// state, together with its evaluation.
#[derive(Debug, Clone)]
pub struct Violation {
    pub projector: ComplexMatrix,
    pub value: f64,
    pub branch: ViolationBranch,
    /// `|Im V^dagger T V|_F` — reported, but the search is sound on the
    /// real part alone.
    pub imaginary_residual: f64,
}

/// Branch thresholds, tiered so that each later branch's evaluation error
/// (contaminated by quantities below the earlier branches' thresholds) stays
/// negligible against its O(1) violation margin.
struct BranchGates {
    /// Diagonal range margin (branch 1): wide enough that any firing gives
    /// an evaluation clearly outside `[0, 1]`.
    range: f64,
    /// Off-diagonal detection (branch 2); its evaluation margin is ~1
    /// regardless of the coupling size.
    off_diag: f64,
    /// Diagonal-difference detection (branch 3); must dominate `off_diag`
    /// because off-diagonal leakage enters scaled by `3 / c2`.
    mismatch: f64,
    /// Trace-normalization detection (branch 4).
    trace: f64,
}

impl BranchGates {
    fn from(tol: &Tolerance, scale: f64) -> Self {
        let base = tol.gate(scale.max(1.0));
        Self {
            range: 20.0 * base,
            off_diag: base,
            mismatch: 100.0 * base,
            trace: 10.0 * base,
        }
    }
}

/// The violation search on the kappa-frame real part `x` of a transported
/// weight; `v` maps the frame back (`P = V Q V^dagger`).
fn violation_in_frame(
    x: &ComplexMatrix,
    v: &ComplexMatrix,
    t: &ComplexMatrix,
    gates: &BranchGates,
    imaginary_residual: f64,
) -> Option<Violation> {
    let d = x.dim();
    let entry = |i: usize, j: usize| x[(i, j)].re;
    let transported = |q: &ComplexMatrix| &(v * q) * &v.adjoint();
    let value_of = |p: &ComplexMatrix| trace_product(t, p).re;

    // Branch 1: a diagonal entry outside [0, 1] is itself the evaluation of
    // the corresponding canonical rank-1 projector.
    let mut worst: Option<(usize, f64)> = None;
    for j in 0..d {
        let out = (-entry(j, j)).max(entry(j, j) - 1.0);
        if out > gates.range && worst.map_or(true, |(_, w)| out > w) {
            worst = Some((j, out));
        }
    }
    if let Some((j, _)) = worst {
        let mut q = ComplexMatrix::zeros(d);
        q[(j, j)] = C64::new(1.0, 0.0);
        let p = transported(&q);
        let value = value_of(&p);
        return Some(Violation {
            projector: p,
            value,
            branch: ViolationBranch::DiagonalRange { index: j },
            imaginary_residual,
        });
    }

    // Branch 2: off-diagonal coupling c1 = <k|T'|j>. The idempotent
    // Q = |j><j| - 2 |j><k| / c1 evaluates to T'_jj - 2 <= -1.
    let mut best: Option<(usize, usize, f64)> = None;
    for j in 0..d {
        for k in 0..d {
            if j == k {
                continue;
            }
            let c1 = entry(k, j);
            if c1.abs() > gates.off_diag
                && best.map_or(true, |(_, _, b)| c1.abs() > b.abs())
            {
                best = Some((j, k, c1));
            }
        }
    }
    if let Some((j, k, c1)) = best {
        let mut q = ComplexMatrix::zeros(d);
        q[(j, j)] = C64::new(1.0, 0.0);
        q[(j, k)] = C64::new(-2.0 / c1, 0.0);
        let p = transported(&q);
        let value = value_of(&p);
        return Some(Violation {
            projector: p,
            value,
            branch: ViolationBranch::OffDiagonal { row: k, col: j },
            imaginary_residual,
        });
    }

    // Branch 3: diagonal mismatch c2 = T'_jj - T'_kk. With |+-> the
    // symmetric/antisymmetric combinations of |j>, |k>, the idempotent
    // Q' = |+><+| - 3 |+><-| / c2 evaluates near (T'_jj + T'_kk)/2 - 3/2.
    let mut best: Option<(usize, usize, f64)> = None;
    for j in 0..d {
        for k in 0..d {
            if j == k {
                continue;
            }
            let c2 = entry(j, j) - entry(k, k);
            if c2 > gates.mismatch && best.map_or(true, |(_, _, b)| c2 > b) {
                best = Some((j, k, c2));
            }
        }
    }
    if let Some((j, k, c2)) = best {
        let mut q = ComplexMatrix::zeros(d);
        // |+><+| = (E_jj + E_kk + E_jk + E_kj) / 2.
        let half = C64::new(0.5, 0.0);
        q[(j, j)] = half;
        q[(k, k)] = half;
        q[(j, k)] = half;
        q[(k, j)] = half;
        // - (3/c2) |+><-| with |+><-| = (E_jj - E_jk + E_kj - E_kk) / 2.
        let w = C64::new(-3.0 / (2.0 * c2), 0.0);
        q[(j, j)] += w;
        q[(j, k)] -= w;
        q[(k, j)] += w;
        q[(k, k)] -= w;
        let p = transported(&q);
        let value = value_of(&p);
        return Some(Violation {
            projector: p,
            value,
            branch: ViolationBranch::DiagonalMismatch { first: j, second: k },
            imaginary_residual,
        });
    }

    // Branch 4: unit-effect normalization.
    let tr: f64 = (0..d).map(|j| entry(j, j)).sum();
    if (tr - 1.0).abs() > gates.trace {
        let p = ComplexMatrix::identity(d);
        let value = value_of(&p);
        return Some(Violation {
            projector: p,
            value,
            branch: ViolationBranch::Normalization,
            imaginary_residual,
        });
    }

    None
}

/// Searches for a K-symmetric projector on which `t` evaluates outside
/// `[0, 1]` (or fails unit-effect normalization), following the
/// constructive uniqueness proof branch by branch in the kappa frame.
/// Returns `None` exactly when `t` represents the unique state `1/d`.
pub fn find_violating_projector(
    t: &ComplexMatrix,
    k: &AntilinearOperator,
    tol: &Tolerance,
) -> Result<Option<Violation>> {
    k.require_antiunitary_involution(tol)?;
    if t.dim() != k.dim() {
        return Err(Error::DimensionMismatch {
            left: t.dim(),
            right: k.dim(),
        });
    }
    let v = k.real_form(tol)?;
    let tp = &(&v.adjoint() * t) * &v;
    let imag = tp.imag_norm();
    let x = tp.real_part();
    let gates = BranchGates::from(tol, t.fro_norm());
    Ok(violation_in_frame(&x, &v, t, &gates, imag))
}

/// One refuted candidate: the weight, the violating effect, and its
/// evaluation.
#[derive(Debug, Clone)]
pub struct CertificatePair {
    pub candidate: ComplexMatrix,
    pub effect: ComplexMatrix,
    pub value: f64,
    pub branch: ViolationBranch,
}

/// Outcome of a state-space analysis or uniqueness certification.
#[derive(Debug, Clone)]
pub struct StateSpaceReport {
    /// Affine dimension of the feasible weight set.
    pub affine_dimension: usize,
    /// True when the analysis pinned the state space to a single point that
    /// the representative satisfies.
    pub unique: bool,
    /// A weight satisfying every constraint (the maximally mixed `1/d`).
    pub representative: ComplexMatrix,
    /// Refuted candidates with their violating effects.
    pub certificate: Vec<CertificatePair>,
    /// Inequality constraints in the pool (sampled + canonical +
    /// adversarial).
    pub constraints: usize,
    /// Constraints injected adversarially rather than sampled.
    pub adversarial: usize,
    /// Perturbed candidates tested (certification only).
    pub trials: usize,
    /// Candidates receiving an explicit violation.
    pub refuted: usize,
    /// `refuted / trials` (1 when no trials ran).
    pub confidence: f64,
    /// True when an LP probe exhausted its budget, leaving the dimension
    /// estimate based on fewer probes.
    pub inconclusive: bool,
}

/// Box bound on dual coordinates; states satisfy `|coordinates| <= 1`, so
/// the box is inactive at any true optimum and only guards unbounded probes.
const COORDINATE_BOX: f64 = 8.0;
/// Pool-row violation considered binding during constraint generation.
const ROW_VIOLATION_EPS: f64 = 1e-9;
/// Rows added per constraint-generation round.
const ROWS_PER_ROUND: usize = 8;
/// Constraint-generation rounds per probe.
const MAX_ROUNDS: usize = 60;
/// Adversarial cutting-plane injections per probe.
const MAX_CUTS: usize = 50;

/// An inequality `lo <= a . x <= hi`, scaled to unit max coefficient.
#[derive(Debug, Clone)]
struct Row {
    a: Vec<f64>,
    lo: f64,
    hi: f64,
}

impl Row {
    fn normalized(a: Vec<f64>, lo: f64, hi: f64) -> Option<Self> {
        let scale = a.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if scale < 1e-14 {
            return None;
        }
        Some(Self {
            a: a.iter().map(|v| v / scale).collect(),
            lo: lo / scale,
            hi: hi / scale,
        })
    }

    fn violation(&self, x: &[f64]) -> f64 {
        let dot: f64 = self.a.iter().zip(x).map(|(a, v)| a * v).sum();
        (dot - self.hi).max(self.lo - dot)
    }
}

/// Real parametrization of the dual space a theory's weights live in:
/// `T(x) = sum_a x_a B_a`.
struct DualFrame {
    basis: Vec<ComplexMatrix>,
    /// Coordinates of the maximally mixed weight.
    representative: Vec<f64>,
    /// Transport `V` into the kappa frame when the theory is K-symmetric.
    kappa_frame: Option<ComplexMatrix>,
}

impl DualFrame {
    fn new(theory: &EffectTheory, tol: &Tolerance) -> Result<Self> {
        let d = theory.dim();
        let unit = C64::new(1.0, 0.0);
        let i_unit = C64::new(0.0, 1.0);
        let elementary = |i: usize, j: usize, z: C64| {
            let mut m = ComplexMatrix::zeros(d);
            m[(i, j)] = z;
            m
        };
        match theory {
            EffectTheory::KSymmetricProjectors { k } => {
                // Full real matrix space in the kappa frame (the frame
                // representative of a weight can be taken real).
                let v = k.real_form(tol)?;
                let mut basis = Vec::with_capacity(d * d);
                let mut representative = Vec::with_capacity(d * d);
                for i in 0..d {
                    for j in 0..d {
                        let b = elementary(i, j, unit);
                        basis.push(&(&v * &b) * &v.adjoint());
                        representative.push(if i == j { 1.0 / d as f64 } else { 0.0 });
                    }
                }
                Ok(Self {
                    basis,
                    representative,
                    kappa_frame: Some(v),
                })
            }
            EffectTheory::EtaHermitian { eta } => {
                // Hermitian sigma transported by the similarity: d^2 real
                // coordinates.
                let mut basis = Vec::with_capacity(d * d);
                let mut representative = Vec::with_capacity(d * d);
                let transport =
                    |m: &ComplexMatrix| -> ComplexMatrix { &(eta.inv_sqrt() * m) * eta.sqrt() };
                for j in 0..d {
                    basis.push(transport(&elementary(j, j, unit)));
                    representative.push(1.0 / d as f64);
                }
                for j in 0..d {
                    for k in j + 1..d {
                        let sym = &elementary(j, k, unit) + &elementary(k, j, unit);
                        let asym = &elementary(j, k, i_unit) - &elementary(k, j, i_unit);
                        basis.push(transport(&sym));
                        representative.push(0.0);
                        basis.push(transport(&asym));
                        representative.push(0.0);
                    }
                }
                Ok(Self {
                    basis,
                    representative,
                    kappa_frame: None,
                })
            }
            EffectTheory::EtaHermitianKSymmetric { eta, k_eta } => {
                // Real symmetric sigma in the invariant frame: d(d+1)/2
                // coordinates.
                let k = standardize(k_eta, eta, tol)?;
                let v = k.real_form(tol)?;
                let transport = |m: &ComplexMatrix| -> ComplexMatrix {
                    let f = &(&v * m) * &v.adjoint();
                    &(eta.inv_sqrt() * &f) * eta.sqrt()
                };
                let mut basis = Vec::new();
                let mut representative = Vec::new();
                for j in 0..d {
                    basis.push(transport(&elementary(j, j, unit)));
                    representative.push(1.0 / d as f64);
                }
                for j in 0..d {
                    for k in j + 1..d {
                        let sym = &elementary(j, k, unit) + &elementary(k, j, unit);
                        basis.push(transport(&sym));
                        representative.push(0.0);
                    }
                }
                Ok(Self {
                    basis,
                    representative,
                    kappa_frame: None,
                })
            }
        }
    }

    fn n(&self) -> usize {
        self.basis.len()
    }

    fn weight(&self, x: &[f64]) -> ComplexMatrix {
        let d = self.basis[0].dim();
        let mut t = ComplexMatrix::zeros(d);
        for (coeff, b) in x.iter().zip(&self.basis) {
            if *coeff != 0.0 {
                t = &t + &b.scale_re(*coeff);
            }
        }
        t
    }

    /// Constraint row of one effect: coefficients of `tr(T(x) E)`.
    fn row_for_effect(&self, e: &ComplexMatrix) -> Option<Row> {
        let a: Vec<f64> = self
            .basis
            .iter()
            .map(|b| trace_product(b, e).re)
            .collect();
        Row::normalized(a, 0.0, 1.0)
    }

    /// Equality row `tr(T(x) 1) = 1`.
    fn trace_row(&self) -> (Vec<f64>, f64) {
        let a: Vec<f64> = self.basis.iter().map(|b| b.trace().re).collect();
        (a, 1.0)
    }
}

/// Canonical deterministic effects of a theory: rank-1 basis projectors,
/// superposition projectors, and the unit effect. For projector theories the
/// list also carries the adversarial pinch family — the proof's violating
/// idempotents with a small fixed coupling — whose constraints pin
/// off-diagonal and diagonal-difference coordinates near zero so that
/// uniqueness never rests on random sampling alone. Returns the effects
/// paired with the count of adversarial entries.
fn canonical_effects(
    theory: &EffectTheory,
    tol: &Tolerance,
) -> Result<(Vec<ComplexMatrix>, usize)> {
    let d = theory.dim();
    let unit = C64::new(1.0, 0.0);
    let mut effects = vec![ComplexMatrix::identity(d)];
    let mut adversarial = 0usize;
    match theory {
        EffectTheory::KSymmetricProjectors { k } => {
            let v = k.real_form(tol)?;
            let transported = |q: &ComplexMatrix| &(&v * q) * &v.adjoint();
            // A decade below the violation search's off-diagonal threshold,
            // so points satisfying the pinch constraints never re-trigger
            // the cutting loop.
            let pinch = tol.gate(1.0) / 10.0;
            for j in 0..d {
                let mut q = ComplexMatrix::zeros(d);
                q[(j, j)] = unit;
                effects.push(transported(&q));
            }
            for j in 0..d {
                for kk in 0..d {
                    if j == kk {
                        continue;
                    }
                    // Pinch idempotent: |j><j| - (2/eps) |j><k|. Valid for
                    // any coupling; a tiny eps makes the [0,1] constraint
                    // force the off-diagonal coordinate into [-eps/2, eps/2].
                    let mut q = ComplexMatrix::zeros(d);
                    q[(j, j)] = unit;
                    q[(j, kk)] = C64::new(-2.0 / pinch, 0.0);
                    effects.push(transported(&q));
                    adversarial += 1;
                }
            }
            for j in 0..d {
                for kk in j + 1..d {
                    // Pinch pair for diagonal differences: the proof's Q'
                    // with coupling eps.
                    let mut q = ComplexMatrix::zeros(d);
                    let half = C64::new(0.5, 0.0);
                    q[(j, j)] = half;
                    q[(kk, kk)] = half;
                    q[(j, kk)] = half;
                    q[(kk, j)] = half;
                    let w = C64::new(-3.0 / (2.0 * pinch), 0.0);
                    q[(j, j)] += w;
                    q[(j, kk)] -= w;
                    q[(kk, j)] += w;
                    q[(kk, kk)] -= w;
                    effects.push(transported(&q));
                    adversarial += 1;
                }
            }
        }
        EffectTheory::EtaHermitian { eta } => {
            let transport = |f: &ComplexMatrix| &(eta.inv_sqrt() * f) * eta.sqrt();
            for f in hermitian_canonical(d, true) {
                effects.push(transport(&f));
            }
        }
        EffectTheory::EtaHermitianKSymmetric { eta, k_eta } => {
            let k = standardize(k_eta, eta, tol)?;
            let v = k.real_form(tol)?;
            let transport = |f0: &ComplexMatrix| {
                let f = &(&v * f0) * &v.adjoint();
                &(eta.inv_sqrt() * &f) * eta.sqrt()
            };
            for f in hermitian_canonical(d, false) {
                effects.push(transport(&f));
            }
        }
    }
    Ok((effects, adversarial))
}

/// Basis projectors and two-level superposition projectors; with
/// `with_imaginary` the circular superpositions are included too.
fn hermitian_canonical(d: usize, with_imaginary: bool) -> Vec<ComplexMatrix> {
    let unit = C64::new(1.0, 0.0);
    let i_unit = C64::new(0.0, 1.0);
    let mut out = Vec::new();
    for j in 0..d {
        let mut m = ComplexMatrix::zeros(d);
        m[(j, j)] = unit;
        out.push(m);
    }
    let projector = |d: usize, j: usize, k: usize, phase: C64| {
        // (|j> + phase |k>)(<j| + conj(phase) <k|) / 2.
        let mut m = ComplexMatrix::zeros(d);
        let half = C64::new(0.5, 0.0);
        m[(j, j)] = half;
        m[(k, k)] = half * phase * phase.conj();
        m[(j, k)] = half * phase.conj();
        m[(k, j)] = half * phase;
        m
    };
    for j in 0..d {
        for k in j + 1..d {
            out.push(projector(d, j, k, unit));
            out.push(projector(d, j, k, -unit));
            if with_imaginary {
                out.push(projector(d, j, k, i_unit));
                out.push(projector(d, j, k, -i_unit));
            }
        }
    }
    out
}

struct PoolAnalysis {
    affine_dimension: usize,
    representative_feasible: bool,
    constraints: usize,
    adversarial: usize,
    inconclusive: bool,
}

/// Probes the feasible set `{x : trace row = 1, rows in [lo, hi], |x| <= box}`
/// with extreme-objective LPs and reads the affine dimension off the spread
/// of the optima.
fn analyze_pool(
    frame: &DualFrame,
    pool: &mut Vec<Row>,
    adversarial_seeded: usize,
    k: Option<(&AntilinearOperator, &ComplexMatrix)>,
    tol: &Tolerance,
    rng: &mut ChaCha8Rng,
) -> Result<PoolAnalysis> {
    let n = frame.n();
    let eq = frame.trace_row();
    let mut adversarial = adversarial_seeded;
    let mut inconclusive = false;

    // Deterministic +-coordinate probes followed by a few random mixtures.
    let mut objectives: Vec<Vec<f64>> = Vec::with_capacity(2 * n + 4);
    for a in 0..n {
        let mut c = vec![0.0; n];
        c[a] = 1.0;
        objectives.push(c.clone());
        c[a] = -1.0;
        objectives.push(c);
    }
    for _ in 0..4 {
        let c: Vec<f64> = (0..n)
            .map(|_| rand_distr::Distribution::sample(&rand_distr::StandardNormal, rng))
            .collect();
        objectives.push(c);
    }

    let mut optima: Vec<Vec<f64>> = Vec::new();
    // Active rows persist across probes: constraints found binding once tend
    // to be binding again.
    let mut active: Vec<usize> = (0..pool.len().min(4 * n)).collect();

    for objective in &objectives {
        let mut cuts = 0usize;
        let mut rounds = 0usize;
        let solution = loop {
            rounds += 1;
            let mut lp = LinearProgram {
                objective: objective.clone(),
                ub_rows: Vec::with_capacity(2 * active.len() + 2 * n),
                eq_rows: vec![eq.clone()],
            };
            for &idx in &active {
                let row = &pool[idx];
                lp.ub_rows.push((row.a.clone(), row.hi));
                lp.ub_rows.push((row.a.iter().map(|v| -v).collect(), -row.lo));
            }
            for a in 0..n {
                let mut e = vec![0.0; n];
                e[a] = 1.0;
                lp.ub_rows.push((e.clone(), COORDINATE_BOX));
                e[a] = -1.0;
                lp.ub_rows.push((e, COORDINATE_BOX));
            }
            let sol = match lp::maximize(&lp) {
                Ok(sol) => sol,
                Err(Error::LpBudgetExhausted { .. }) => {
                    inconclusive = true;
                    break None;
                }
                Err(other) => return Err(other),
            };

            // Bring in the most violated pool rows.
            let mut violated: Vec<(usize, f64)> = pool
                .iter()
                .enumerate()
                .filter(|(idx, _)| !active.contains(idx))
                .map(|(idx, row)| (idx, row.violation(&sol.x)))
                .filter(|(_, v)| *v > ROW_VIOLATION_EPS)
                .collect();
            if !violated.is_empty() {
                violated.sort_by(|a, b| b.1.partial_cmp(&a.1).expect("finite violation"));
                for (idx, _) in violated.into_iter().take(ROWS_PER_ROUND) {
                    active.push(idx);
                }
                if rounds >= MAX_ROUNDS {
                    inconclusive = true;
                    break Some(sol);
                }
                continue;
            }

            // Pool satisfied; for projector theories let the proof search
            // cut off the optimum if it is not yet a state.
            if let Some((k_op, _)) = k {
                if cuts < MAX_CUTS {
                    let t = frame.weight(&sol.x);
                    if let Some(violation) = find_violating_projector(&t, k_op, tol)? {
                        if let Some(row) = frame.row_for_effect(&violation.projector) {
                            pool.push(row);
                            active.push(pool.len() - 1);
                            adversarial += 1;
                            cuts += 1;
                            if rounds < MAX_ROUNDS {
                                continue;
                            }
                            inconclusive = true;
                        }
                    }
                }
            }
            break Some(sol);
        };
        if let Some(sol) = solution {
            optima.push(sol.x);
        }
    }

    // Affine dimension from the averaged second-moment spread of the optima.
    let affine_dimension = if optima.len() < 2 {
        inconclusive = true;
        0
    } else {
        spread_rank(&optima)?
    };

    let worst = pool
        .iter()
        .map(|row| row.violation(&frame.representative))
        .fold(f64::MIN, f64::max);
    let eq_residual = {
        let dot: f64 = eq.0.iter().zip(&frame.representative).map(|(a, v)| a * v).sum();
        (dot - eq.1).abs()
    };
    let representative_feasible = worst <= 1e-7 && eq_residual <= 1e-7;

    Ok(PoolAnalysis {
        affine_dimension,
        representative_feasible,
        constraints: pool.len(),
        adversarial,
        inconclusive,
    })
}

/// Rank of the averaged centered Gram matrix of the probe optima.
fn spread_rank(optima: &[Vec<f64>]) -> Result<usize> {
    let n = optima[0].len();
    let p = optima.len() as f64;
    let mut mean = vec![0.0; n];
    for x in optima {
        for (m, v) in mean.iter_mut().zip(x) {
            *m += v / p;
        }
    }
    let mut gram = ComplexMatrix::zeros(n);
    for x in optima {
        for i in 0..n {
            let di = x[i] - mean[i];
            if di == 0.0 {
                continue;
            }
            for j in 0..n {
                let dj = x[j] - mean[j];
                gram[(i, j)] += C64::new(di * dj / p, 0.0);
            }
        }
    }
    let decomp = hermitian_eig(&gram.hermitized(), &Tolerance::default())?;
    let max = decomp
        .eigenvalues
        .iter()
        .fold(0.0f64, |m, &v| m.max(v.abs()));
    if max <= 1e-12 {
        return Ok(0);
    }
    Ok(decomp
        .eigenvalues
        .iter()
        .filter(|&&v| v > 1e-10 * max)
        .count())
}

/// Estimates the affine dimension of the theory's state space from sampled
/// plus canonical plus adversarial effect constraints.
pub fn state_space(
    theory: &EffectTheory,
    samples: usize,
    seed: u64,
    tol: &Tolerance,
) -> Result<StateSpaceReport> {
    analyze_state_space(theory, samples, seed, &[], 0, 0, tol)
}

fn analyze_state_space(
    theory: &EffectTheory,
    samples: usize,
    seed: u64,
    extra_effects: &[ComplexMatrix],
    trials: usize,
    refuted: usize,
    tol: &Tolerance,
) -> Result<StateSpaceReport> {
    let d = theory.dim();
    let frame = DualFrame::new(theory, tol)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let (canonical, canonical_adversarial) = canonical_effects(theory, tol)?;
    let mut pool: Vec<Row> = Vec::with_capacity(canonical.len() + extra_effects.len() + samples);
    for e in canonical.iter().chain(extra_effects) {
        if let Some(row) = frame.row_for_effect(e) {
            pool.push(row);
        }
    }
    // Trivial draws (zero effects) make vacuous rows; redraw so the pool
    // really carries `samples` informative sampled constraints.
    let mut added = 0usize;
    let mut attempts = 0usize;
    while added < samples && attempts < 20 * samples.max(1) {
        attempts += 1;
        let e = sample_effect_with(theory, &mut rng, tol)?;
        if let Some(row) = frame.row_for_effect(&e) {
            pool.push(row);
            added += 1;
        }
    }

    let k_ctx = match theory {
        EffectTheory::KSymmetricProjectors { k } => {
            Some((k, frame.kappa_frame.as_ref().expect("projector frame")))
        }
        _ => None,
    };
    let analysis = analyze_pool(
        &frame,
        &mut pool,
        canonical_adversarial + extra_effects.len(),
        k_ctx,
        tol,
        &mut rng,
    )?;

    let confidence = if trials == 0 {
        1.0
    } else {
        refuted as f64 / trials as f64
    };
    let unique = analysis.affine_dimension == 0
        && analysis.representative_feasible
        && !analysis.inconclusive
        && refuted == trials;
    Ok(StateSpaceReport {
        affine_dimension: analysis.affine_dimension,
        unique,
        representative: ProbabilityWeight::maximally_mixed(d).t,
        certificate: Vec::new(),
        constraints: analysis.constraints,
        adversarial: analysis.adversarial,
        trials,
        refuted,
        confidence,
        inconclusive: analysis.inconclusive,
    })
}

/// Constructively certifies that the K-symmetric projector theory has
/// exactly one state: perturbed candidates are refuted one by one with
/// explicit violating projectors, and the LP dimension probe over the
/// accumulated constraints confirms a zero-dimensional feasible set around
/// `1/d`.
pub fn certify_unique_state(
    k: &AntilinearOperator,
    trials: usize,
    seed: u64,
    tol: &Tolerance,
) -> Result<StateSpaceReport> {
    k.require_antiunitary_involution(tol)?;
    let d = k.dim();
    let v = k.real_form(tol)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let identity_over_d = ComplexMatrix::scalar(d, C64::new(1.0 / d as f64, 0.0));

    let mut certificate = Vec::with_capacity(trials);
    let mut adversarial_effects = Vec::with_capacity(trials);
    let mut refuted = 0usize;
    for _ in 0..trials {
        // Perturbation with Frobenius norm log-uniform in [1e-5, 1]. Only
        // real kappa-frame directions matter: imaginary parts are invisible
        // to every real effect, so candidates are drawn in the visible span.
        let norm = (rng.random_range((1e-5f64).ln()..0.0)).exp();
        let mut delta = random::real_ginibre(&mut rng, d);
        let scale = norm / delta.fro_norm();
        delta = delta.scale_re(scale);
        let x = &ComplexMatrix::scalar(d, C64::new(1.0 / d as f64, 0.0)) + &delta;
        let t = &(&v * &x) * &v.adjoint();
        let gates = BranchGates::from(tol, t.fro_norm());
        if let Some(violation) = violation_in_frame(&x, &v, &t, &gates, 0.0) {
            refuted += 1;
            adversarial_effects.push(violation.projector.clone());
            certificate.push(CertificatePair {
                candidate: t,
                effect: violation.projector,
                value: violation.value,
                branch: violation.branch,
            });
        }
    }

    let theory = EffectTheory::KSymmetricProjectors { k: k.clone() };
    let mut report = analyze_state_space(
        &theory,
        64 * d * d,
        seed ^ 0x9e37_79b9_7f4a_7c15,
        &adversarial_effects,
        trials,
        refuted,
        tol,
    )?;
    report.certificate = certificate;
    report.representative = identity_over_d;
    Ok(report)
}

/// The equivalence map onto Hermitian quantum theory:
/// `E -> eta^{1/2} E eta^{-1/2}`.
pub fn map_effect_to_hermitian(
    e: &ComplexMatrix,
    eta: &MetricOperator,
    tol: &Tolerance,
) -> Result<ComplexMatrix> {
    if !metric::is_eta_effect(e, eta, tol)? {
        return Err(Error::NotEffect {
            reason: "not between 0 and 1 in the eta order".into(),
        });
    }
    Ok(&(eta.sqrt() * e) * eta.inv_sqrt())
}

/// Inverse of [`map_effect_to_hermitian`]: `F -> eta^{-1/2} F eta^{1/2}`.
pub fn map_effect_from_hermitian(
    f: &ComplexMatrix,
    eta: &MetricOperator,
    tol: &Tolerance,
) -> Result<ComplexMatrix> {
    let residual = f.hermitian_residual();
    if residual > tol.gate(f.fro_norm()) {
        return Err(Error::NotEffect {
            reason: format!("not Hermitian (residual {residual:.3e})"),
        });
    }
    let decomp = hermitian_eig(&f.hermitized(), tol)?;
    let min = decomp.eigenvalues[0];
    let max = *decomp.eigenvalues.last().expect("nonempty spectrum");
    let gate = tol.gate(f.fro_norm().max(1.0));
    if min < -gate || max > 1.0 + gate {
        return Err(Error::NotEffect {
            reason: format!("spectrum [{min:.3e}, {max:.3e}] outside [0, 1]"),
        });
    }
    Ok(&(eta.inv_sqrt() * f) * eta.sqrt())
}

/// Maps a Hermitian density matrix to the `eta`-density matrix representing
/// the same state: `sigma -> eta^{-1/2} sigma eta^{1/2}`.
pub fn map_state_from_hermitian(
    sigma: &ComplexMatrix,
    eta: &MetricOperator,
    tol: &Tolerance,
) -> Result<ComplexMatrix> {
    if sigma.dim() != eta.dim() {
        return Err(Error::DimensionMismatch {
            left: eta.dim(),
            right: sigma.dim(),
        });
    }
    let residual = sigma.hermitian_residual();
    if residual > tol.gate(sigma.fro_norm()) {
        return Err(Error::NotDensityMatrix {
            reason: format!("not Hermitian (residual {residual:.3e})"),
        });
    }
    let decomp = hermitian_eig(&sigma.hermitized(), tol)?;
    let min = decomp.eigenvalues[0];
    if min < -tol.gate(sigma.fro_norm().max(1.0)) {
        return Err(Error::NotDensityMatrix {
            reason: format!("negative eigenvalue {min:.3e}"),
        });
    }
    let tr = sigma.trace();
    if (tr.re - 1.0).abs() > tol.gate(1.0) || tr.im.abs() > tol.gate(1.0) {
        return Err(Error::NotDensityMatrix {
            reason: format!("trace {tr} differs from one"),
        });
    }
    Ok(&(eta.inv_sqrt() * sigma) * eta.sqrt())
}

/// A real-form effect together with the imaginary residual stripped during
/// the reduction.
#[derive(Debug, Clone)]
pub struct RealFormEffect {
    pub matrix: ComplexMatrix,
    pub imaginary_residual: f64,
}

/// Reduces a K-symmetric Hermitian effect (or, with a metric, a
/// K_eta-symmetric eta-Hermitian effect) to its real symmetric form in the
/// invariant frame.
pub fn map_to_real_form(
    e: &ComplexMatrix,
    k: &AntilinearOperator,
    eta: Option<&MetricOperator>,
    tol: &Tolerance,
) -> Result<RealFormEffect> {
    if e.dim() != k.dim() {
        return Err(Error::DimensionMismatch {
            left: k.dim(),
            right: e.dim(),
        });
    }
    let reduced = match eta {
        None => {
            k.require_antiunitary_involution(tol)?;
            let residual = e.hermitian_residual();
            if residual > tol.gate(e.fro_norm()) {
                return Err(Error::NotEffect {
                    reason: format!("not Hermitian (residual {residual:.3e})"),
                });
            }
            if !k.commutes(e, tol)? {
                return Err(Error::NotEffect {
                    reason: format!(
                        "not K-symmetric (residual {:.3e})",
                        k.commutation_residual(e)?
                    ),
                });
            }
            let v = k.real_form(tol)?;
            &(&v.adjoint() * e) * &v
        }
        Some(eta) => {
            let standardized = standardize(k, eta, tol)?;
            if !metric::is_eta_hermitian(e, eta, tol)? {
                return Err(Error::NotEtaHermitian {
                    residual: metric::eta_hermiticity_residual(e, eta)?,
                });
            }
            if !k.commutes(e, tol)? {
                return Err(Error::NotEffect {
                    reason: format!(
                        "not K_eta-symmetric (residual {:.3e})",
                        k.commutation_residual(e)?
                    ),
                });
            }
            let f = &(eta.sqrt() * e) * eta.inv_sqrt();
            let v = standardized.real_form(tol)?;
            &(&v.adjoint() * &f) * &v
        }
    };
    let imaginary_residual = reduced.imag_norm();
    if imaginary_residual > 10.0 * tol.gate(e.fro_norm().max(1.0)) {
        return Err(Error::NotEffect {
            reason: format!(
                "imaginary residual {imaginary_residual:.3e} after real-form reduction"
            ),
        });
    }
    Ok(RealFormEffect {
        matrix: reduced.real_part().hermitized(),
        imaginary_residual,
    })
}
