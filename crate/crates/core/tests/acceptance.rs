//! Acceptance suite: one test per release criterion, each with an explicit
//! runtime budget. Every test prints a single PASS line (visible with
//! `--nocapture`) carrying the measured numbers.

use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use ptqh::antilinear::AntilinearOperator;
use ptqh::classify::{classify, spectral_projectors, PhaseTag};
use ptqh::gpt::{
    self, certify_unique_state, sample_effect_with, state_space, EffectTheory, ViolationBranch,
};
use ptqh::linalg::{takagi, trace_product, C64, ComplexMatrix, Tolerance};
use ptqh::metric::{self, TwoByTwoFamily};
use ptqh::random;

fn tol() -> Tolerance {
    Tolerance::default()
}

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn budget(start: Instant, limit: Duration, label: &str) -> f64 {
    let elapsed = start.elapsed();
    assert!(
        elapsed < limit,
        "{label} exceeded its runtime budget: {elapsed:?} >= {limit:?}"
    );
    elapsed.as_secs_f64()
}

/// Criterion 1 — 2x2 family golden suite on a 20x20x20 grid over
/// r in [0,2], s in (0,2], theta in [0,pi): the classified phase matches the
/// sign of s^2 - r^2 sin^2(theta); in the unbroken region the closed-form
/// eigenvalues, the charge operator, and the metric all hold to 1e-9.
#[test]
fn criterion_1_two_by_two_family_golden_suite() {
    let start = Instant::now();
    let k = TwoByTwoFamily::symmetry();
    let mut unbroken_points = 0usize;
    let mut broken_points = 0usize;
    let mut exceptional_points = 0usize;

    for i in 0..20 {
        let r = 2.0 * i as f64 / 19.0;
        for j in 0..20 {
            let s = (j + 1) as f64 / 10.0;
            for l in 0..20 {
                let theta = std::f64::consts::PI * l as f64 / 20.0;
                let family = TwoByTwoFamily::new(r, s, theta).unwrap();
                let h = family.hamiltonian();
                let disc = family.discriminant();

                let phase = classify(&h, &k, &tol()).unwrap();
                let band = 1e-12 * (s * s).max(r * r).max(1.0);
                let expected = if disc > band {
                    PhaseTag::Unbroken
                } else if disc < -band {
                    PhaseTag::Broken
                } else {
                    PhaseTag::ExceptionalPoint
                };
                assert_eq!(
                    phase.tag, expected,
                    "phase mismatch at r={r}, s={s}, theta={theta} (disc={disc:.3e})"
                );

                match expected {
                    PhaseTag::Broken => {
                        broken_points += 1;
                        continue;
                    }
                    PhaseTag::ExceptionalPoint => {
                        exceptional_points += 1;
                        continue;
                    }
                    _ => unbroken_points += 1,
                }

                // Closed-form eigenvalues lambda_pm = r cos(theta) +- sqrt(disc).
                let (plus, minus) = family.eigenvalues();
                let expect_plus = r * theta.cos() + disc.sqrt();
                let expect_minus = r * theta.cos() - disc.sqrt();
                assert!(
                    (plus.re - expect_plus).abs() < 1e-9 && plus.im.abs() < 1e-9,
                    "lambda_plus off at r={r}, s={s}, theta={theta}"
                );
                assert!(
                    (minus.re - expect_minus).abs() < 1e-9 && minus.im.abs() < 1e-9,
                    "lambda_minus off at r={r}, s={s}, theta={theta}"
                );

                // Charge operator: C^2 = 1 and C acts as +-1 on the eigenvectors.
                let charge = family.charge_operator().unwrap();
                let c2 = &charge * &charge;
                assert!(
                    c2.distance(&ComplexMatrix::identity(2)) < 1e-9,
                    "C^2 != 1 at r={r}, s={s}, theta={theta}"
                );
                let (v_plus, v_minus) = family.eigenvectors().unwrap();
                for (vec, sign) in [(&v_plus, 1.0), (&v_minus, -1.0)] {
                    let cv = charge.mul_vec(vec);
                    let res: f64 = cv
                        .iter()
                        .zip(vec.iter())
                        .map(|(a, b)| (a - b * c(sign, 0.0)).norm_sqr())
                        .sum::<f64>()
                        .sqrt();
                    let norm: f64 = vec.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
                    assert!(
                        res < 1e-9 * norm.max(1.0),
                        "charge action off at r={r}, s={s}, theta={theta}"
                    );
                }

                // Metric eta = PC: positive definite and intertwining.
                let eta = family.metric(&tol()).unwrap();
                assert!(eta.min_eigenvalue() > 0.0);
                let lhs = &(eta.eta() * &h) * &eta.eta().inverse().unwrap();
                assert!(
                    lhs.distance(&h.adjoint()) < 1e-9,
                    "intertwining off at r={r}, s={s}, theta={theta}"
                );
                let pc = &TwoByTwoFamily::parity() * &charge;
                assert!(eta.eta().distance(&pc) < 1e-9, "eta != PC");
            }
        }
    }

    assert!(unbroken_points > 0 && broken_points > 0 && exceptional_points > 0);
    let secs = budget(start, Duration::from_secs(10), "criterion 1");
    println!(
        "PASS criterion 1: 8000 grid points ({unbroken_points} unbroken, {broken_points} broken, {exceptional_points} exceptional) in {secs:.2}s < 10s"
    );
}

/// Criterion 2 — spectral-projector suite: 100 random unbroken instances per
/// d in 2..=8; reconstruction, idempotence, mutual annihilation,
/// completeness, and K-commutation all within 1e-8.
#[test]
fn criterion_2_spectral_projector_suite() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(902);
    let mut worst = 0.0f64;
    for d in 2..=8 {
        for trial in 0..100 {
            let k = random::antiunitary_involution(&mut rng, d);
            let o = random::unbroken_operator(&mut rng, &k, -3.0, 3.0, &tol()).unwrap();
            let decomp = spectral_projectors(&o, &k, &tol()).unwrap();
            let r = &decomp.residuals;
            for (name, value) in [
                ("reconstruction", r.reconstruction),
                ("idempotence", r.idempotence),
                ("annihilation", r.annihilation),
                ("completeness", r.completeness),
                ("commutation", r.commutation),
            ] {
                assert!(
                    value < 1e-8,
                    "{name} residual {value:.3e} at d={d}, trial {trial}"
                );
                worst = worst.max(value);
            }
        }
    }
    let secs = budget(start, Duration::from_secs(30), "criterion 2");
    println!("PASS criterion 2: 700 instances, worst residual {worst:.3e} < 1e-8, in {secs:.2}s < 30s");
}

/// Criterion 3 — constructive uniqueness certification: for d in {2,3,4} and
/// 50 involutions each, certify_unique_state returns unique with the
/// maximally mixed representative, and each of the 200 perturbed candidates
/// per K receives an explicit violating K-symmetric projector whose
/// evaluation escapes [-1e-8, 1+1e-8] (or breaks unit-effect normalization).
#[test]
fn criterion_3_uniqueness_certification() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(903);
    let mut weakest = f64::INFINITY;
    for d in 2..=4 {
        for round in 0..50 {
            let k = random::antiunitary_involution(&mut rng, d);
            let seed = (d * 1000 + round) as u64;
            let report = certify_unique_state(&k, 200, seed, &tol()).unwrap();
            assert!(report.unique, "not unique at d={d}, round {round}");
            assert!(!report.inconclusive);
            assert_eq!(report.trials, 200);
            assert_eq!(report.refuted, 200);
            let mixed = ComplexMatrix::scalar(d, c(1.0 / d as f64, 0.0));
            assert!(
                report.representative.distance(&mixed) < 1e-12,
                "representative is not 1/d at d={d}"
            );
            assert_eq!(report.certificate.len(), 200);
            for pair in &report.certificate {
                // The violating effect is a K-symmetric projector (or the
                // unit effect for normalization violations).
                let p = &pair.effect;
                assert!((&(p * p) - p).fro_norm() < 1e-8 * p.fro_norm().max(1.0));
                assert!(k.commutation_residual(p).unwrap() < 1e-8 * p.fro_norm().max(1.0));
                let value = trace_product(&pair.candidate, p).re;
                assert!((value - pair.value).abs() < 1e-10);
                let escapes = !(-1e-8..=1.0 + 1e-8).contains(&value);
                let unit_break = matches!(pair.branch, ViolationBranch::Normalization)
                    && (value - 1.0).abs() > 1e-8;
                assert!(
                    escapes || unit_break,
                    "weak violation {value:.3e} via {} at d={d}",
                    pair.branch
                );
                let margin = if matches!(pair.branch, ViolationBranch::Normalization) {
                    (value - 1.0).abs()
                } else {
                    (-value).max(value - 1.0)
                };
                weakest = weakest.min(margin);
            }
        }
    }
    let secs = budget(start, Duration::from_secs(120), "criterion 3");
    println!(
        "PASS criterion 3: 150 involutions x 200 candidates refuted, weakest margin {weakest:.3e}, in {secs:.2}s < 120s"
    );
}

/// Criterion 4 — quasi-Hermitian equivalence: 100 random (eta, E) pairs per
/// d in 2..=6; the Hermitian image has spectrum in [-1e-9, 1+1e-9], the
/// round trip holds to 1e-10, duality holds to 1e-10, and mapped states are
/// valid eta-density matrices.
#[test]
fn criterion_4_equivalence_maps() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(904);
    for d in 2..=6 {
        for trial in 0..100 {
            let eta = random::pd_metric(&mut rng, d, &tol()).unwrap();
            let theory = EffectTheory::eta_hermitian(eta.clone());
            let e = sample_effect_with(&theory, &mut rng, &tol()).unwrap();

            let f = gpt::map_effect_to_hermitian(&e, &eta, &tol()).unwrap();
            assert!(f.hermitian_residual() < 1e-9 * f.fro_norm().max(1.0));
            let spec = ptqh::linalg::hermitian_eig(&f.hermitized(), &tol()).unwrap();
            let min = spec.eigenvalues[0];
            let max = *spec.eigenvalues.last().unwrap();
            assert!(
                min > -1e-9 && max < 1.0 + 1e-9,
                "spectrum [{min:.3e}, {max:.3e}] escapes at d={d}, trial {trial}"
            );

            let back = gpt::map_effect_from_hermitian(&f, &eta, &tol()).unwrap();
            assert!(back.distance(&e) < 1e-10 * e.fro_norm().max(1.0));

            // Duality: tr(rho E) = tr(sigma F) for the paired state map.
            let sigma = random::density(&mut rng, d);
            let rho = gpt::map_state_from_hermitian(&sigma, &eta, &tol()).unwrap();
            let gap = (trace_product(&rho, &e) - trace_product(&sigma, &f)).norm();
            assert!(gap < 1e-10, "duality gap {gap:.3e} at d={d}");

            // Mapped states are eta-density matrices.
            assert!(metric::is_eta_hermitian(&rho, &eta, &tol()).unwrap());
            assert!(metric::is_eta_psd(&rho, &eta, &tol()).unwrap());
            let tr = rho.trace();
            assert!((tr.re - 1.0).abs() < 1e-10 && tr.im.abs() < 1e-10);
        }
    }
    let secs = budget(start, Duration::from_secs(60), "criterion 4");
    println!("PASS criterion 4: 500 (eta, E) pairs mapped, round-tripped, and paired, in {secs:.2}s");
}

/// Criterion 5 — real-form reduction: 100 random combined-theory effects per
/// d in 2..=6 reduce to real symmetric matrices (imaginary residual < 1e-8)
/// with the spectrum preserved to 1e-8; combined-theory states satisfy
/// K_eta rho K_eta = rho to 1e-9.
#[test]
fn criterion_5_real_form_reduction() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(905);
    for d in 2..=6 {
        for trial in 0..100 {
            let eta = random::pd_metric(&mut rng, d, &tol()).unwrap();
            let flat = random::antiunitary_involution(&mut rng, d);
            let u_eta = &(eta.inv_sqrt() * flat.linear_part()) * &eta.sqrt().conj();
            let k_eta = AntilinearOperator::new(u_eta);
            let theory = EffectTheory::combined(eta.clone(), k_eta.clone(), &tol()).unwrap();

            let e = sample_effect_with(&theory, &mut rng, &tol()).unwrap();
            let real = gpt::map_to_real_form(&e, &k_eta, Some(&eta), &tol()).unwrap();
            assert!(
                real.imaginary_residual < 1e-8,
                "imaginary residual {:.3e} at d={d}, trial {trial}",
                real.imaginary_residual
            );
            let m = &real.matrix;
            assert!(m.imag_norm() < 1e-8 * m.fro_norm().max(1.0));
            assert!(
                m.distance(&m.transpose()) < 1e-8 * m.fro_norm().max(1.0),
                "not symmetric at d={d}"
            );

            // Spectrum preserved: E is eta-Hermitian with a real spectrum.
            let before = sorted_real_spectrum(&e);
            let after = sorted_real_spectrum(m);
            for (b, a) in before.iter().zip(&after) {
                assert!((b - a).abs() < 1e-8, "spectrum moved {b} -> {a} at d={d}");
            }

            // Combined-theory states are K_eta-symmetric.
            let v = flat.real_form(&tol()).unwrap();
            let s = random::real_symmetric_density(&mut rng, d);
            let flat_state = &(&v * &s) * &v.adjoint();
            let rho = gpt::map_state_from_hermitian(&flat_state, &eta, &tol()).unwrap();
            let conj = k_eta.conjugate_matrix(&rho).unwrap();
            assert!(
                conj.distance(&rho) < 1e-9 * eta.condition(),
                "K_eta symmetry broken at d={d}, trial {trial}: {:.3e}",
                conj.distance(&rho)
            );
        }
    }
    let secs = budget(start, Duration::from_secs(60), "criterion 5");
    println!("PASS criterion 5: 500 combined-theory effects reduced to real form, in {secs:.2}s");
}

fn sorted_real_spectrum(m: &ComplexMatrix) -> Vec<f64> {
    let decomp = ptqh::linalg::eig(m, &tol()).unwrap();
    let mut re: Vec<f64> = Vec::new();
    for cluster in &decomp.clusters {
        assert!(cluster.value.im.abs() < 1e-8, "nonreal eigenvalue");
        for _ in 0..cluster.algebraic {
            re.push(cluster.value.re);
        }
    }
    re.sort_by(|a, b| a.partial_cmp(b).expect("finite eigenvalue"));
    re
}

/// Criterion 6 — state-space affine dimensions: 0 for the K-projector
/// theory, 3 and 2 for the d=2 eta-only and combined theories, 8 and 5 for
/// d=3, each analysis holding at least 64 d^2 constraints.
#[test]
fn criterion_6_state_space_dimensions() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(906);

    let check = |theory: EffectTheory, expect: usize, label: &str| {
        let d = theory.dim();
        let samples = 64 * d * d;
        let report = state_space(&theory, samples, 11, &tol()).unwrap();
        assert!(!report.inconclusive, "{label}: inconclusive analysis");
        assert_eq!(
            report.affine_dimension, expect,
            "{label}: dimension {} != {expect}",
            report.affine_dimension
        );
        assert!(
            report.constraints >= samples,
            "{label}: {} constraints < {samples}",
            report.constraints
        );
        assert_eq!(report.unique, expect == 0);
    };

    for d in [2usize, 3] {
        let k = random::antiunitary_involution(&mut rng, d);
        check(
            EffectTheory::k_symmetric_projectors(k, &tol()).unwrap(),
            0,
            "projector theory",
        );

        let eta = random::pd_metric(&mut rng, d, &tol()).unwrap();
        check(
            EffectTheory::eta_hermitian(eta.clone()),
            d * d - 1,
            "eta theory",
        );

        let flat = random::antiunitary_involution(&mut rng, d);
        let u_eta = &(eta.inv_sqrt() * flat.linear_part()) * &eta.sqrt().conj();
        let k_eta = AntilinearOperator::new(u_eta);
        check(
            EffectTheory::combined(eta, k_eta, &tol()).unwrap(),
            d * (d + 1) / 2 - 1,
            "combined theory",
        );
    }

    let secs = budget(start, Duration::from_secs(120), "criterion 6");
    println!("PASS criterion 6: dimensions 0/3/2 (d=2) and 0/8/5 (d=3) with >= 64 d^2 constraints, in {secs:.2}s < 120s");
}

/// Criterion 7 — Takagi factorization: 200 random symmetric unitaries with
/// d <= 8 factor as U = V V^T with V unitary, both to 1e-9.
#[test]
fn criterion_7_takagi_factorization() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(907);
    let mut worst = 0.0f64;
    for trial in 0..200 {
        let d = 1 + trial % 8;
        let u = random::symmetric_unitary(&mut rng, d);
        let v = takagi(&u, &tol()).unwrap();
        let fact = (&v * &v.transpose()).distance(&u);
        let unit = (&v * &v.adjoint()).distance(&ComplexMatrix::identity(d));
        assert!(fact < 1e-9, "factorization residual {fact:.3e} at d={d}");
        assert!(unit < 1e-9, "unitarity residual {unit:.3e} at d={d}");
        worst = worst.max(fact).max(unit);
    }
    let secs = budget(start, Duration::from_secs(30), "criterion 7");
    println!("PASS criterion 7: 200 factorizations, worst residual {worst:.3e} < 1e-9, in {secs:.2}s");
}

/// Criterion 8 — CLI determinism: with a fixed seed, every subcommand
/// produces byte-identical reports across repeated runs on golden inputs.
#[test]
fn criterion_8_cli_determinism() {
    use std::process::Command;
    let start = Instant::now();
    let dir = tempfile::tempdir().unwrap();
    let path = |name: &str| dir.path().join(name).to_string_lossy().into_owned();

    let write = |name: &str, body: serde_json::Value| {
        std::fs::write(dir.path().join(name), serde_json::to_string(&body).unwrap()).unwrap()
    };
    // Golden inputs: the worked family point r=1, s=2, theta=pi/2, its
    // symmetry, its metric, and a 2x2 effect/state pair.
    write(
        "h.json",
        serde_json::json!({
            "dim": 2,
            "re": [[0.0, 2.0], [2.0, 0.0]],
            "im": [[1.0, 0.0], [0.0, -1.0]],
        }),
    );
    write(
        "k.json",
        serde_json::json!({
            "u": { "dim": 2, "re": [[0.0, 1.0], [1.0, 0.0]], "im": [[0.0, 0.0], [0.0, 0.0]] }
        }),
    );
    let inv_rt3 = 1.0 / 3.0f64.sqrt();
    write(
        "eta.json",
        serde_json::json!({
            "dim": 2,
            "re": [[2.0 * inv_rt3, 0.0], [0.0, 2.0 * inv_rt3]],
            "im": [[0.0, -inv_rt3], [inv_rt3, 0.0]],
        }),
    );
    write(
        "e.json",
        serde_json::json!({
            "dim": 2,
            "re": [[0.5, 0.0], [0.0, 0.5]],
            "im": [[0.0, 0.0], [0.0, 0.0]],
        }),
    );
    write(
        "u.json",
        serde_json::json!({
            "dim": 2,
            "re": [[0.0, 1.0], [1.0, 0.0]],
            "im": [[0.0, 0.0], [0.0, 0.0]],
        }),
    );

    let h = path("h.json");
    let k = path("k.json");
    let eta = path("eta.json");
    let e = path("e.json");
    let u = path("u.json");
    let runs: Vec<Vec<&str>> = vec![
        vec!["classify", "--hamiltonian", &h, "--symmetry", &k],
        vec!["projectors", "--hamiltonian", &h, "--symmetry", &k],
        vec!["metric", "--hamiltonian", &h, "--symmetry", &k],
        vec!["map-hermitian", "--metric", &eta, "--effect", &e],
        vec!["state-space", "--symmetry", "kappa", "--dim", "3", "--seed", "5"],
        vec!["certify-unique", "--symmetry", &k, "--trials", "50", "--seed", "5"],
        vec!["demo-2x2", "--r", "1", "--s", "2", "--theta", "1.5707963267948966"],
        vec!["takagi", "--input", &u],
    ];
    for args in &runs {
        let once = Command::new(env!("CARGO_BIN_EXE_ptqh"))
            .args(args)
            .output()
            .unwrap();
        let twice = Command::new(env!("CARGO_BIN_EXE_ptqh"))
            .args(args)
            .output()
            .unwrap();
        assert!(
            once.status.success(),
            "{args:?}: {}",
            String::from_utf8_lossy(&once.stderr)
        );
        assert_eq!(once.status.code(), twice.status.code());
        assert_eq!(
            once.stdout, twice.stdout,
            "non-deterministic report for {args:?}"
        );
        assert!(!once.stdout.is_empty());
    }
    let secs = budget(start, Duration::from_secs(60), "criterion 8");
    println!("PASS criterion 8: 8 subcommands byte-identical across reruns, in {secs:.2}s");
}
