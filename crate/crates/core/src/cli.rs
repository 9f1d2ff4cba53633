//! Command-line front end: parses matrix and symmetry files, dispatches to
//! the library, and emits deterministic JSON reports.
//!
//! Exit codes: 0 ok (including warnings), 1 definitive negative result,
//! 2 input error, 3 numerical failure.

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use crate::antilinear::AntilinearOperator;
use crate::classify::{self, ClusterDiagnostic, PhaseTag, SpectralDecomposition};
use crate::error::Error;
use crate::gpt::{
    self, CertificatePair, EffectTheory, StateSpaceReport, ViolationBranch,
};
use crate::io::{self, InputRecord, Report, Status, ToleranceInfo};
use crate::linalg::{self, vec_norm, ComplexMatrix, Tolerance, C64};
use crate::metric::{self, MetricOperator, TwoByTwoFamily};

#[derive(Parser)]
#[command(
    name = "ptqh",
    version,
    about = "Operational analysis of PT-symmetric and quasi-Hermitian quantum systems"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Relative tolerance; the absolute floor is one decade tighter.
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub tol: f64,
    /// Seed for every randomized routine.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Pretty-print the JSON report.
    #[arg(long, global = true)]
    pub pretty: bool,
}

#[derive(Subcommand)]
pub enum Command {
    /// Classify the PT phase of an operator under an antilinear symmetry.
    Classify {
        /// Matrix file holding the operator.
        #[arg(long)]
        hamiltonian: PathBuf,
        /// Symmetry file ({"u": matrix}) or the literal "kappa".
        #[arg(long)]
        symmetry: String,
    },
    /// K-compatible spectral projectors of an unbroken operator.
    Projectors {
        #[arg(long)]
        hamiltonian: PathBuf,
        #[arg(long)]
        symmetry: String,
    },
    /// Construct a metric operator from an unbroken operator.
    Metric {
        #[arg(long)]
        hamiltonian: PathBuf,
        #[arg(long)]
        symmetry: String,
    },
    /// Map effects and states between the eta-geometry and Hermitian
    /// quantum theory, or reduce a symmetric effect to its real form.
    MapHermitian {
        /// Matrix file holding the metric eta.
        #[arg(long)]
        metric: Option<PathBuf>,
        /// Effect to map.
        #[arg(long)]
        effect: Option<PathBuf>,
        /// Hermitian density matrix to map into the eta-geometry.
        #[arg(long)]
        state: Option<PathBuf>,
        /// Map from the Hermitian side back to the eta-geometry.
        #[arg(long)]
        reverse: bool,
        /// With --effect: reduce to the real form under this symmetry.
        #[arg(long)]
        symmetry: Option<String>,
    },
    /// Probe the affine dimension of a theory's state space.
    StateSpace {
        /// Symmetry file or the literal "kappa" (projector theory).
        #[arg(long)]
        symmetry: Option<String>,
        /// Metric matrix file (eta-Hermitian theory; with --symmetry, the
        /// combined theory).
        #[arg(long)]
        metric: Option<PathBuf>,
        /// Dimension, required when "kappa" is used without files.
        #[arg(long)]
        dim: Option<usize>,
        /// Sampled effect constraints (default 64 * dim^2).
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Certify that the K-symmetric projector theory admits exactly one
    /// state, refuting perturbed candidates constructively.
    CertifyUnique {
        #[arg(long)]
        symmetry: String,
        #[arg(long)]
        dim: Option<usize>,
        /// Perturbed candidates to refute.
        #[arg(long, default_value_t = 200)]
        trials: usize,
    },
    /// Closed-form 2x2 family [[r e^{i theta}, s], [s, r e^{-i theta}]]:
    /// phase, eigenvalues, charge operator, and metric.
    #[command(name = "demo-2x2")]
    Demo2x2 {
        #[arg(long)]
        r: f64,
        #[arg(long)]
        s: f64,
        /// Angle in radians.
        #[arg(long)]
        theta: f64,
    },
    /// Factor a symmetric unitary as V V^T.
    Takagi {
        /// Matrix file holding the symmetric unitary.
        #[arg(long)]
        input: PathBuf,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Self::Classify { .. } => "classify",
            Self::Projectors { .. } => "projectors",
            Self::Metric { .. } => "metric",
            Self::MapHermitian { .. } => "map-hermitian",
            Self::StateSpace { .. } => "state-space",
            Self::CertifyUnique { .. } => "certify-unique",
            Self::Demo2x2 { .. } => "demo-2x2",
            Self::Takagi { .. } => "takagi",
        }
    }
}

/// An error annotated with the stage it occurred in; input-stage failures
/// exit 2, analysis failures exit 1 or 3 by kind.
enum CmdError {
    Input(Error),
    Analysis(Error),
}

impl CmdError {
    fn message(&self) -> String {
        match self {
            Self::Input(e) | Self::Analysis(e) => e.to_string(),
        }
    }

    fn exit_code(&self) -> i32 {
        match self {
            Self::Input(_) => 2,
            Self::Analysis(e) => match e {
                Error::PhaseNotUnbroken { .. }
                | Error::NotEffect { .. }
                | Error::NotDensityMatrix { .. }
                | Error::NotEtaHermitian { .. }
                | Error::NotEtaAntiunitary { .. }
                | Error::KInvariantBasisDeficient { .. }
                | Error::ComplexTrace { .. } => 1,
                Error::EigNoConvergence { .. }
                | Error::JacobiNoConvergence { .. }
                | Error::TakagiNoConvergence { .. }
                | Error::ProjectorConditioning { .. }
                | Error::Singular { .. }
                | Error::LpBudgetExhausted { .. }
                | Error::LpInfeasible { .. }
                | Error::LpUnbounded => 3,
                _ => 2,
            },
        }
    }
}

impl From<Error> for CmdError {
    fn from(e: Error) -> Self {
        Self::Analysis(e)
    }
}

type CmdResult<T> = std::result::Result<T, CmdError>;

fn input_err(e: Error) -> CmdError {
    CmdError::Input(e)
}

struct CmdOutput {
    result: Value,
    residuals: Value,
    status: Status,
    warnings: Vec<String>,
    exit: i32,
}

impl CmdOutput {
    fn ok(result: Value, residuals: Value) -> Self {
        Self {
            result,
            residuals,
            status: Status::Ok,
            warnings: Vec::new(),
            exit: 0,
        }
    }
}

/// Parses arguments, runs the command, prints the report, and returns the
/// process exit code.
pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
            let _ = e.print();
            return code;
        }
    };
    run_parsed(&cli, &mut std::io::stdout())
}

/// Testable entry point: renders the report into `out`.
pub fn run_parsed(cli: &Cli, out: &mut dyn std::io::Write) -> i32 {
    let tol = match Tolerance::from_rel(cli.tol) {
        Ok(t) => t,
        Err(e) => {
            let report = Report {
                command: cli.command.name().into(),
                inputs: vec![],
                tolerance: ToleranceInfo {
                    abs: f64::NAN,
                    rel: cli.tol,
                },
                seed: cli.seed,
                status: Status::Error,
                warnings: vec![],
                residuals: json!({}),
                result: json!({ "error": e.to_string() }),
            };
            let _ = writeln!(out, "{}", report.render(cli.pretty));
            return 2;
        }
    };

    let mut inputs = Vec::new();
    let outcome = execute(&cli.command, &tol, cli.seed, &mut inputs);
    let (report, code) = match outcome {
        Ok(output) => (
            Report {
                command: cli.command.name().into(),
                inputs,
                tolerance: ToleranceInfo::from(&tol),
                seed: cli.seed,
                status: output.status,
                warnings: output.warnings,
                residuals: output.residuals,
                result: output.result,
            },
            output.exit,
        ),
        Err(err) => (
            Report {
                command: cli.command.name().into(),
                inputs,
                tolerance: ToleranceInfo::from(&tol),
                seed: cli.seed,
                status: Status::Error,
                warnings: vec![],
                residuals: json!({}),
                result: json!({ "error": err.message() }),
            },
            err.exit_code(),
        ),
    };
    let _ = writeln!(out, "{}", report.render(cli.pretty));
    code
}

fn execute(
    command: &Command,
    tol: &Tolerance,
    seed: u64,
    inputs: &mut Vec<InputRecord>,
) -> CmdResult<CmdOutput> {
    match command {
        Command::Classify {
            hamiltonian,
            symmetry,
        } => cmd_classify(hamiltonian, symmetry, tol, inputs),
        Command::Projectors {
            hamiltonian,
            symmetry,
        } => cmd_projectors(hamiltonian, symmetry, tol, inputs),
        Command::Metric {
            hamiltonian,
            symmetry,
        } => cmd_metric(hamiltonian, symmetry, tol, inputs),
        Command::MapHermitian {
            metric,
            effect,
            state,
            reverse,
            symmetry,
        } => cmd_map_hermitian(
            metric.as_deref(),
            effect.as_deref(),
            state.as_deref(),
            *reverse,
            symmetry.as_deref(),
            tol,
            inputs,
        ),
        Command::StateSpace {
            symmetry,
            metric,
            dim,
            samples,
        } => cmd_state_space(
            symmetry.as_deref(),
            metric.as_deref(),
            *dim,
            *samples,
            seed,
            tol,
            inputs,
        ),
        Command::CertifyUnique {
            symmetry,
            dim,
            trials,
        } => cmd_certify_unique(symmetry, *dim, *trials, seed, tol, inputs),
        Command::Demo2x2 { r, s, theta } => cmd_demo_2x2(*r, *s, *theta, tol),
        Command::Takagi { input } => cmd_takagi(input, tol, inputs),
    }
}

// ---------------------------------------------------------------------------
// Input loading

fn load_matrix(path: &Path, inputs: &mut Vec<InputRecord>) -> CmdResult<ComplexMatrix> {
    inputs.push(InputRecord::for_file(path).map_err(input_err)?);
    io::read_matrix(path).map_err(input_err)
}

fn load_metric(
    path: &Path,
    tol: &Tolerance,
    inputs: &mut Vec<InputRecord>,
) -> CmdResult<MetricOperator> {
    inputs.push(InputRecord::for_file(path).map_err(input_err)?);
    io::read_metric(path, tol).map_err(input_err)
}

/// Loads `--symmetry`: the literal "kappa" means plain conjugation at the
/// hinted dimension; anything else is a symmetry file path.
fn load_symmetry(
    spec: &str,
    dim_hint: Option<usize>,
    tol: &Tolerance,
    inputs: &mut Vec<InputRecord>,
) -> CmdResult<AntilinearOperator> {
    if spec == "kappa" {
        let dim = dim_hint.ok_or_else(|| {
            input_err(Error::InvalidArgument(
                "--dim is required with the literal symmetry \"kappa\"".into(),
            ))
        })?;
        if dim == 0 {
            return Err(input_err(Error::InvalidArgument(
                "--dim must be at least 1".into(),
            )));
        }
        if dim > linalg::MAX_DIM {
            return Err(input_err(Error::DimensionTooLarge {
                dim,
                max: linalg::MAX_DIM,
            }));
        }
        inputs.push(InputRecord::for_literal("kappa"));
        return Ok(AntilinearOperator::kappa(dim));
    }
    let path = Path::new(spec);
    inputs.push(InputRecord::for_file(path).map_err(input_err)?);
    io::read_symmetry(path, tol).map_err(input_err)
}

fn require_same_dim(a: usize, b: usize) -> CmdResult<()> {
    if a != b {
        return Err(input_err(Error::DimensionMismatch { left: a, right: b }));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Payload helpers

fn cluster_values(clusters: &[ClusterDiagnostic]) -> Value {
    Value::Array(
        clusters
            .iter()
            .map(|c| {
                json!({
                    "value": io::complex_value(c.value),
                    "algebraic": c.algebraic,
                    "geometric": c.geometric,
                })
            })
            .collect(),
    )
}

fn certificate_values(pairs: &[CertificatePair]) -> Value {
    Value::Array(
        pairs
            .iter()
            .map(|pair| {
                let d = pair.candidate.dim();
                let mixed = ComplexMatrix::scalar(d, C64::new(1.0 / d as f64, 0.0));
                json!({
                    "branch": pair.branch.to_string(),
                    "value": pair.value,
                    "perturbation_norm": pair.candidate.distance(&mixed),
                })
            })
            .collect(),
    )
}

fn state_space_values(report: &StateSpaceReport, theory: &str, dim: usize) -> Value {
    json!({
        "theory": theory,
        "dim": dim,
        "affine_dimension": report.affine_dimension,
        "unique": report.unique,
        "representative": io::matrix_value(&report.representative),
        "constraints": report.constraints,
        "adversarial": report.adversarial,
        "trials": report.trials,
        "refuted": report.refuted,
        "confidence": report.confidence,
        "inconclusive": report.inconclusive,
    })
}

fn worse(a: Status, b: Status) -> Status {
    match (a, b) {
        (Status::Error, _) | (_, Status::Error) => Status::Error,
        (Status::Warning, _) | (_, Status::Warning) => Status::Warning,
        _ => Status::Ok,
    }
}

// ---------------------------------------------------------------------------
// Commands

fn cmd_classify(
    hamiltonian: &Path,
    symmetry: &str,
    tol: &Tolerance,
    inputs: &mut Vec<InputRecord>,
) -> CmdResult<CmdOutput> {
    let h = load_matrix(hamiltonian, inputs)?;
    let k = load_symmetry(symmetry, Some(h.dim()), tol, inputs)?;
    require_same_dim(h.dim(), k.dim())?;
    let phase = classify::classify(&h, &k, tol)?;
    let d = &phase.detail;
    let result = json!({
        "phase": phase.tag.to_string(),
        "diagnostics": {
            "defective_clusters": cluster_values(&d.defective_clusters),
            "nonreal_clusters": cluster_values(&d.nonreal_clusters),
            "invariant_basis_failure": d.invariant_basis_failure,
        },
    });
    let residuals = json!({
        "commutation": d.commutation_residual,
        "max_imaginary_part": d.max_imaginary_part,
    });
    let mut output = CmdOutput::ok(result, residuals);
    if phase.tag == PhaseTag::NotSymmetric {
        output.status = Status::Warning;
        output.warnings.push(format!(
            "operator does not commute with the symmetry (residual {:.3e})",
            d.commutation_residual
        ));
        output.exit = 1;
    }
    Ok(output)
}

fn spectral_values(decomp: &SpectralDecomposition) -> (Value, Value, f64) {
    let result = json!({
        "eigenvalues": decomp.eigenvalues,
        "projectors": decomp
            .projectors
            .iter()
            .map(io::matrix_value)
            .collect::<Vec<_>>(),
    });
    let r = &decomp.residuals;
    let residuals = json!({
        "reconstruction": r.reconstruction,
        "idempotence": r.idempotence,
        "annihilation": r.annihilation,
        "completeness": r.completeness,
        "commutation": r.commutation,
    });
    (result, residuals, r.max())
}

fn cmd_projectors(
    hamiltonian: &Path,
    symmetry: &str,
    tol: &Tolerance,
    inputs: &mut Vec<InputRecord>,
) -> CmdResult<CmdOutput> {
    let h = load_matrix(hamiltonian, inputs)?;
    let k = load_symmetry(symmetry, Some(h.dim()), tol, inputs)?;
    require_same_dim(h.dim(), k.dim())?;
    let decomp = classify::spectral_projectors(&h, &k, tol)?;
    let (result, residuals, max_residual) = spectral_values(&decomp);
    let mut output = CmdOutput::ok(result, residuals);
    let gate = tol.gate(h.fro_norm().max(1.0));
    if max_residual > 100.0 * gate {
        output.status = Status::Warning;
        output
            .warnings
            .push(format!("projector residual {max_residual:.3e} above tolerance"));
    }
    Ok(output)
}

fn cmd_metric(
    hamiltonian: &Path,
    symmetry: &str,
    tol: &Tolerance,
    inputs: &mut Vec<InputRecord>,
) -> CmdResult<CmdOutput> {
    let h = load_matrix(hamiltonian, inputs)?;
    let k = load_symmetry(symmetry, Some(h.dim()), tol, inputs)?;
    require_same_dim(h.dim(), k.dim())?;
    let constructed = metric::metric_from_unbroken(&h, &k, tol)?;
    let eta = &constructed.metric;
    let intertwining = metric::eta_hermiticity_residual(&h, eta)?;
    let result = json!({
        "eta": io::matrix_value(eta.eta()),
        "min_eigenvalue": eta.min_eigenvalue(),
        "condition": eta.condition(),
        "eigenbasis_condition": constructed.eigenbasis_condition,
    });
    let residuals = json!({ "eta_hermiticity": intertwining });
    let mut output = CmdOutput::ok(result, residuals);
    if let Some(w) = &constructed.warning {
        output.status = Status::Warning;
        output.warnings.push(w.clone());
    }
    if intertwining > tol.gate(h.fro_norm().max(1.0) * eta.condition()) {
        output.status = Status::Warning;
        output.warnings.push(format!(
            "intertwining residual {intertwining:.3e} above tolerance"
        ));
    }
    Ok(output)
}

#[allow(clippy::too_many_arguments)]
fn cmd_map_hermitian(
    metric: Option<&Path>,
    effect: Option<&Path>,
    state: Option<&Path>,
    reverse: bool,
    symmetry: Option<&str>,
    tol: &Tolerance,
    inputs: &mut Vec<InputRecord>,
) -> CmdResult<CmdOutput> {
    let invalid = |msg: &str| input_err(Error::InvalidArgument(msg.into()));
    match (effect, state) {
        (Some(_), Some(_)) | (None, None) => {
            Err(invalid("provide exactly one of --effect and --state"))
        }
        (None, Some(state_path)) => {
            if symmetry.is_some() || reverse {
                return Err(invalid("--state combines only with --metric"));
            }
            let eta_path = metric.ok_or_else(|| invalid("--state requires --metric"))?;
            let eta = load_metric(eta_path, tol, inputs)?;
            let sigma = load_matrix(state_path, inputs)?;
            require_same_dim(eta.dim(), sigma.dim())?;
            let rho = gpt::map_state_from_hermitian(&sigma, &eta, tol)?;
            let trace = rho.trace();
            let result = json!({
                "direction": "state_from_hermitian",
                "output": io::matrix_value(&rho),
            });
            let residuals = json!({
                "trace": (trace.re - 1.0).abs().max(trace.im.abs()),
                "eta_hermiticity": metric::eta_hermiticity_residual(&rho, &eta)?,
            });
            Ok(CmdOutput::ok(result, residuals))
        }
        (Some(effect_path), None) => match symmetry {
            Some(symmetry) => {
                if reverse {
                    return Err(invalid("--reverse does not apply to the real-form map"));
                }
                let eta = metric
                    .map(|p| load_metric(p, tol, inputs))
                    .transpose()?;
                let e = load_matrix(effect_path, inputs)?;
                let k = load_symmetry(symmetry, Some(e.dim()), tol, inputs)?;
                require_same_dim(e.dim(), k.dim())?;
                if let Some(eta) = &eta {
                    require_same_dim(e.dim(), eta.dim())?;
                }
                let real = gpt::map_to_real_form(&e, &k, eta.as_ref(), tol)?;
                let result = json!({
                    "direction": "effect_to_real_form",
                    "output": io::matrix_value(&real.matrix),
                });
                let residuals = json!({ "imaginary": real.imaginary_residual });
                Ok(CmdOutput::ok(result, residuals))
            }
            None => {
                let eta_path =
                    metric.ok_or_else(|| invalid("--effect requires --metric or --symmetry"))?;
                let eta = load_metric(eta_path, tol, inputs)?;
                let e = load_matrix(effect_path, inputs)?;
                require_same_dim(eta.dim(), e.dim())?;
                let (direction, output_matrix, residuals) = if reverse {
                    let mapped = gpt::map_effect_from_hermitian(&e, &eta, tol)?;
                    let residual = metric::eta_hermiticity_residual(&mapped, &eta)?;
                    (
                        "effect_from_hermitian",
                        mapped,
                        json!({ "eta_hermiticity": residual }),
                    )
                } else {
                    let mapped = gpt::map_effect_to_hermitian(&e, &eta, tol)?;
                    let spectrum = linalg::hermitian_eig(&mapped.hermitized(), tol)?;
                    (
                        "effect_to_hermitian",
                        mapped.clone(),
                        json!({
                            "hermitian": mapped.hermitian_residual(),
                            "spectrum_min": spectrum.eigenvalues.first().copied().unwrap_or(0.0),
                            "spectrum_max": spectrum.eigenvalues.last().copied().unwrap_or(0.0),
                        }),
                    )
                };
                let result = json!({
                    "direction": direction,
                    "output": io::matrix_value(&output_matrix),
                });
                Ok(CmdOutput::ok(result, residuals))
            }
        },
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_state_space(
    symmetry: Option<&str>,
    metric: Option<&Path>,
    dim: Option<usize>,
    samples: Option<usize>,
    seed: u64,
    tol: &Tolerance,
    inputs: &mut Vec<InputRecord>,
) -> CmdResult<CmdOutput> {
    let eta = metric.map(|p| load_metric(p, tol, inputs)).transpose()?;
    let k = symmetry
        .map(|s| load_symmetry(s, dim.or(eta.as_ref().map(|m| m.dim())), tol, inputs))
        .transpose()?;
    let (theory, theory_name) = match (&k, &eta) {
        (Some(k), None) => (
            EffectTheory::k_symmetric_projectors(k.clone(), tol).map_err(input_err)?,
            "k_symmetric_projectors",
        ),
        (None, Some(eta)) => (EffectTheory::eta_hermitian(eta.clone()), "eta_hermitian"),
        (Some(k), Some(eta)) => {
            require_same_dim(eta.dim(), k.dim())?;
            (
                EffectTheory::combined(eta.clone(), k.clone(), tol).map_err(input_err)?,
                "combined",
            )
        }
        (None, None) => {
            return Err(input_err(Error::InvalidArgument(
                "provide --symmetry and/or --metric".into(),
            )))
        }
    };
    let d = theory.dim();
    if let Some(dim) = dim {
        require_same_dim(dim, d)?;
    }
    let samples = samples.unwrap_or(64 * d * d);
    let mut report = gpt::state_space(&theory, samples, seed, tol)?;
    let mut result = state_space_values(&report, theory_name, d);

    // For the projector theory the report also carries the constructive
    // uniqueness certificate.
    if let (Some(k), None) = (&k, &eta) {
        let certified = gpt::certify_unique_state(k, 50, seed, tol)?;
        report.unique = report.unique && certified.unique;
        report.inconclusive = report.inconclusive || certified.inconclusive;
        let map = result.as_object_mut().expect("object payload");
        map.insert("unique".into(), json!(report.unique));
        map.insert("inconclusive".into(), json!(report.inconclusive));
        map.insert("trials".into(), json!(certified.trials));
        map.insert("refuted".into(), json!(certified.refuted));
        map.insert("confidence".into(), json!(certified.confidence));
        map.insert(
            "certificate".into(),
            certificate_values(&certified.certificate),
        );
    }

    let residuals = json!({
        "representative_trace": (report.representative.trace().re - 1.0).abs(),
    });
    let mut output = CmdOutput::ok(result, residuals);
    if report.inconclusive {
        output.status = Status::Warning;
        output
            .warnings
            .push("LP probe budget exhausted; dimension estimate may be loose".into());
    }
    if matches!((&k, &eta), (Some(_), None)) && !report.unique {
        output.status = worse(output.status, Status::Warning);
        output
            .warnings
            .push("projector-theory state space was not pinned to a single state".into());
        output.exit = 1;
    }
    Ok(output)
}

fn cmd_certify_unique(
    symmetry: &str,
    dim: Option<usize>,
    trials: usize,
    seed: u64,
    tol: &Tolerance,
    inputs: &mut Vec<InputRecord>,
) -> CmdResult<CmdOutput> {
    let k = load_symmetry(symmetry, dim, tol, inputs)?;
    if let Some(dim) = dim {
        require_same_dim(dim, k.dim())?;
    }
    let report = gpt::certify_unique_state(&k, trials, seed, tol)?;
    let mut result = state_space_values(&report, "k_symmetric_projectors", k.dim());
    result
        .as_object_mut()
        .expect("object payload")
        .insert("certificate".into(), certificate_values(&report.certificate));
    let worst = report
        .certificate
        .iter()
        .map(|p| {
            if matches!(p.branch, ViolationBranch::Normalization) {
                (p.value - 1.0).abs()
            } else {
                (-p.value).max(p.value - 1.0)
            }
        })
        .fold(f64::INFINITY, f64::min);
    let residuals = json!({
        "weakest_violation": if report.certificate.is_empty() { 0.0 } else { worst },
    });
    let mut output = CmdOutput::ok(result, residuals);
    if report.inconclusive {
        output.status = Status::Warning;
        output
            .warnings
            .push("LP probe budget exhausted; dimension estimate may be loose".into());
    }
    if !report.unique {
        output.status = worse(output.status, Status::Warning);
        output
            .warnings
            .push("uniqueness could not be certified".into());
        output.exit = 1;
    }
    Ok(output)
}

fn cmd_demo_2x2(r: f64, s: f64, theta: f64, tol: &Tolerance) -> CmdResult<CmdOutput> {
    let family = TwoByTwoFamily::new(r, s, theta).map_err(input_err)?;
    let h = family.hamiltonian();
    let k = TwoByTwoFamily::symmetry();
    let phase = classify::classify(&h, &k, tol)?;
    let (lambda_plus, lambda_minus) = family.eigenvalues();

    let mut result = json!({
        "r": r,
        "s": s,
        "theta": theta,
        "discriminant": family.discriminant(),
        "phase": phase.tag.to_string(),
        "hamiltonian": io::matrix_value(&h),
        "parity": io::matrix_value(&TwoByTwoFamily::parity()),
        "eigenvalues": [io::complex_value(lambda_plus), io::complex_value(lambda_minus)],
    });
    let mut output = CmdOutput::ok(json!({}), json!({}));

    if phase.tag == PhaseTag::Unbroken && s != 0.0 {
        let alpha = family.alpha()?;
        let c = family.charge_operator()?;
        let eta = family.metric(tol)?;
        let (v_plus, v_minus) = family.eigenvectors()?;

        let c_squared = (&(&c * &c) - &ComplexMatrix::identity(2)).fro_norm();
        let c_action = {
            let plus = c.mul_vec(&v_plus);
            let minus = c.mul_vec(&v_minus);
            let r_plus: Vec<C64> = plus.iter().zip(&v_plus).map(|(a, b)| a - b).collect();
            let r_minus: Vec<C64> = minus.iter().zip(&v_minus).map(|(a, b)| a + b).collect();
            vec_norm(&r_plus).max(vec_norm(&r_minus))
        };
        let cpt = {
            let pp = family.cpt_inner(&v_plus, &v_plus)?;
            let mm = family.cpt_inner(&v_minus, &v_minus)?;
            let pm = family.cpt_inner(&v_plus, &v_minus)?;
            (pp - C64::new(1.0, 0.0))
                .norm()
                .max((mm - C64::new(1.0, 0.0)).norm())
                .max(pm.norm())
        };
        let intertwining = metric::eta_hermiticity_residual(&h, &eta)?;
        let eigen = {
            let decomp = linalg::eig(&h, tol)?;
            let mut formula = [lambda_plus, lambda_minus];
            formula.sort_by(|a, b| a.re.partial_cmp(&b.re).expect("finite"));
            let mut numeric = decomp.eigenvalues.clone();
            numeric.sort_by(|a, b| a.re.partial_cmp(&b.re).expect("finite"));
            formula
                .iter()
                .zip(&numeric)
                .map(|(f, n)| (f - n).norm())
                .fold(0.0f64, f64::max)
        };

        let map = result.as_object_mut().expect("object payload");
        map.insert("alpha".into(), json!(alpha));
        map.insert("charge".into(), io::matrix_value(&c));
        map.insert("eta".into(), io::matrix_value(eta.eta()));
        output.residuals = json!({
            "charge_squared": c_squared,
            "charge_action": c_action,
            "cpt_orthonormality": cpt,
            "eta_hermiticity": intertwining,
            "eigenvalues": eigen,
        });
        let worst = [c_squared, c_action, cpt, intertwining, eigen]
            .into_iter()
            .fold(0.0f64, f64::max);
        if worst > 100.0 * tol.gate(h.fro_norm().max(1.0)) {
            output.status = Status::Warning;
            output
                .warnings
                .push(format!("verification residual {worst:.3e} above tolerance"));
        }
    } else {
        output.status = Status::Warning;
        output.warnings.push(match phase.tag {
            PhaseTag::Unbroken => "charge operator is undefined at zero coupling".into(),
            tag => format!("charge and metric are undefined in the {tag} regime"),
        });
    }

    output.result = result;
    Ok(output)
}

fn cmd_takagi(
    input: &Path,
    tol: &Tolerance,
    inputs: &mut Vec<InputRecord>,
) -> CmdResult<CmdOutput> {
    let u = load_matrix(input, inputs)?;
    let v = linalg::takagi(&u, tol).map_err(|e| match e {
        Error::NotComplexSymmetric { .. } | Error::NotUnitary { .. } => CmdError::Input(e),
        other => CmdError::Analysis(other),
    })?;
    let factorization = (&(&v * &v.transpose()) - &u).fro_norm();
    let unitarity = (&(&v.adjoint() * &v) - &ComplexMatrix::identity(u.dim())).fro_norm();
    let result = json!({ "v": io::matrix_value(&v) });
    let residuals = json!({
        "factorization": factorization,
        "unitarity": unitarity,
    });
    let mut output = CmdOutput::ok(result, residuals);
    if factorization.max(unitarity) > tol.gate((u.dim() as f64).sqrt()) {
        output.status = Status::Warning;
        output.warnings.push(format!(
            "factorization residual {:.3e} above tolerance",
            factorization.max(unitarity)
        ));
    }
    Ok(output)
}
