//! Randomized invariants of phase classification and K-symmetric spectral
//! projectors: residual bounds, shift invariance, spectrum reconstruction,
//! and correct tags on constructed unbroken / broken / defective inputs.

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use ptqh::classify::{classify, k_invariant_basis, spectral_projectors, PhaseTag};
use ptqh::linalg::{C64, ComplexMatrix, Tolerance};
use ptqh::random;

fn tol() -> Tolerance {
    Tolerance::default()
}

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// 100 random unbroken operators across d = 2..8: the tag is `unbroken` and
/// every projector residual (idempotence, annihilation, completeness,
/// K-commutation, reconstruction) stays below 1e-8.
#[test]
fn unbroken_operators_classify_and_decompose_cleanly() {
    let mut rng = ChaCha8Rng::seed_from_u64(501);
    for trial in 0..100 {
        let d = 2 + trial % 7;
        let k = random::antiunitary_involution(&mut rng, d);
        let o = random::unbroken_operator(&mut rng, &k, -2.0, 2.0, &tol()).unwrap();
        let phase = classify(&o, &k, &tol()).unwrap();
        assert_eq!(
            phase.tag,
            PhaseTag::Unbroken,
            "trial {trial} (d={d}): {:?}",
            phase.detail
        );

        let decomp = spectral_projectors(&o, &k, &tol()).unwrap();
        let worst = decomp.residuals.max();
        assert!(
            worst < 1e-8,
            "trial {trial} (d={d}) residual {worst:.3e}: {:?}",
            decomp.residuals
        );

        // Spectrum reconstruction, audited independently of the struct's own
        // residual bookkeeping.
        let mut recon = ComplexMatrix::zeros(d);
        for (p, &l) in decomp.projectors.iter().zip(&decomp.eigenvalues) {
            recon = &recon + &p.scale_re(l);
        }
        assert!(recon.distance(&o) < 1e-8 * o.fro_norm().max(1.0));

        // Eigenvalues arrive sorted and distinct.
        for w in decomp.eigenvalues.windows(2) {
            assert!(w[1] > w[0], "eigenvalues not strictly ascending");
        }
    }
}

/// Real scalar shifts move the spectrum but never the phase, and the
/// projectors do not move at all.
#[test]
fn classification_is_shift_invariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(503);
    for trial in 0..30 {
        let d = 2 + trial % 5;
        let k = random::antiunitary_involution(&mut rng, d);
        let o = random::unbroken_operator(&mut rng, &k, -1.0, 1.0, &tol()).unwrap();
        let b = random::broken_operator(&mut rng, &k, &tol()).unwrap();
        for shift in [-3.0, 0.25, 7.5] {
            let os = o.sub_scalar(c(-shift, 0.0));
            let bs = b.sub_scalar(c(-shift, 0.0));
            assert_eq!(classify(&os, &k, &tol()).unwrap().tag, PhaseTag::Unbroken);
            assert_eq!(classify(&bs, &k, &tol()).unwrap().tag, PhaseTag::Broken);

            let base = spectral_projectors(&o, &k, &tol()).unwrap();
            let shifted = spectral_projectors(&os, &k, &tol()).unwrap();
            for (p, q) in base.projectors.iter().zip(&shifted.projectors) {
                assert!(
                    p.distance(q) < 1e-7 * p.fro_norm().max(1.0),
                    "projector moved under shift {shift}"
                );
            }
            for (l, m) in base.eigenvalues.iter().zip(&shifted.eigenvalues) {
                assert!((l + shift - m).abs() < 1e-7);
            }
        }
    }
}

/// Constructed broken-phase operators with conjugate eigenvalue pairs are
/// tagged broken, with the nonreal clusters recorded in the diagnostics.
#[test]
fn broken_operators_are_tagged_broken() {
    let mut rng = ChaCha8Rng::seed_from_u64(505);
    for d in 2..=8 {
        for _ in 0..10 {
            let k = random::antiunitary_involution(&mut rng, d);
            let b = random::broken_operator(&mut rng, &k, &tol()).unwrap();
            let phase = classify(&b, &k, &tol()).unwrap();
            assert_eq!(phase.tag, PhaseTag::Broken, "d={d}");
            assert!(!phase.detail.nonreal_clusters.is_empty());
            assert!(phase.detail.max_imaginary_part > 0.1);

            // The spectral-projector construction must refuse it.
            assert!(matches!(
                spectral_projectors(&b, &k, &tol()),
                Err(ptqh::Error::PhaseNotUnbroken { .. })
            ));
        }
    }
}

/// Operators that fail to commute with K are tagged not_symmetric with the
/// commutation residual recorded.
#[test]
fn asymmetric_operators_are_tagged_not_symmetric() {
    let mut rng = ChaCha8Rng::seed_from_u64(507);
    for d in 2..=6 {
        let k = random::antiunitary_involution(&mut rng, d);
        // A generic complex matrix essentially never commutes with K.
        let o = random::ginibre(&mut rng, d);
        let phase = classify(&o, &k, &tol()).unwrap();
        assert_eq!(phase.tag, PhaseTag::NotSymmetric);
        assert!(phase.detail.commutation_residual > 1e-3);
    }
}

/// A nontrivial Jordan block commuting with plain conjugation is an
/// exceptional point: K-symmetric, real spectrum, defective.
#[test]
fn jordan_blocks_are_exceptional_points() {
    let k = ptqh::antilinear::AntilinearOperator::kappa(3);
    let mut o = ComplexMatrix::zeros(3);
    o[(0, 0)] = c(0.5, 0.0);
    o[(0, 1)] = c(1.0, 0.0);
    o[(1, 1)] = c(0.5, 0.0);
    o[(2, 2)] = c(-1.0, 0.0);
    let phase = classify(&o, &k, &tol()).unwrap();
    assert_eq!(phase.tag, PhaseTag::ExceptionalPoint);
    let defective = &phase.detail.defective_clusters;
    assert_eq!(defective.len(), 1);
    assert_eq!(defective[0].algebraic, 2);
    assert_eq!(defective[0].geometric, 1);
    assert!((defective[0].value.re - 0.5).abs() < 1e-8);
}

/// The K-invariant eigenbasis delivers genuinely invariant eigenvectors.
#[test]
fn invariant_basis_vectors_are_fixed_points_of_k() {
    let mut rng = ChaCha8Rng::seed_from_u64(509);
    for d in 2..=7 {
        let k = random::antiunitary_involution(&mut rng, d);
        let o = random::unbroken_operator(&mut rng, &k, -2.0, 2.0, &tol()).unwrap();
        let basis = k_invariant_basis(&o, &k, &tol()).unwrap();
        for j in 0..d {
            let v = basis.col(j);
            let norm: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            assert!(norm > 1e-6, "degenerate basis column {j}");
            let kv = k.apply(&v).unwrap();
            let fix: f64 = kv
                .iter()
                .zip(&v)
                .map(|(a, b)| (a - b).norm_sqr())
                .sum::<f64>()
                .sqrt();
            assert!(fix < 1e-8 * norm, "column {j} not K-invariant (d={d})");

            // Eigenvector check: O v is parallel to v.
            let ov = o.mul_vec(&v);
            let lambda = v
                .iter()
                .zip(&ov)
                .map(|(b, a)| a * b.conj())
                .sum::<C64>()
                / c(norm * norm, 0.0);
            let res: f64 = ov
                .iter()
                .zip(&v)
                .map(|(a, b)| (a - b * lambda).norm_sqr())
                .sum::<f64>()
                .sqrt();
            assert!(res < 1e-7 * norm, "column {j} not an eigenvector");
            assert!(lambda.im.abs() < 1e-8);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    /// Phase tags are invariant under real shifts and positive scaling of
    /// the operator.
    #[test]
    fn tag_invariant_under_affine_rescaling(
        seed in 0u64..1 << 20,
        shift in -5.0f64..5.0,
        scale in 0.1f64..10.0,
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = 2 + (seed % 4) as usize;
        let k = random::antiunitary_involution(&mut rng, d);
        let o = if seed % 2 == 0 {
            random::unbroken_operator(&mut rng, &k, -1.0, 1.0, &tol()).unwrap()
        } else {
            random::broken_operator(&mut rng, &k, &tol()).unwrap()
        };
        let base = classify(&o, &k, &tol()).unwrap().tag;
        let moved = o.scale_re(scale).sub_scalar(c(-shift, 0.0));
        prop_assert_eq!(classify(&moved, &k, &tol()).unwrap().tag, base);
    }
}
