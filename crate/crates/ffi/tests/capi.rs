//! Drives the C ABI end to end: handle lifecycles, the worked 2x2 metric,
//! certification, every error-code path, and the generated header artifact.

use std::ptr;

use ptqh_ffi::*;

fn matrix(dim: usize, re: &[f64], im: Option<&[f64]>) -> *mut PtqhMatrix {
    let mut out = ptr::null_mut();
    let status = ptqh_matrix_new(
        dim,
        re.as_ptr(),
        im.map_or(ptr::null(), |a| a.as_ptr()),
        &mut out,
    );
    assert_eq!(status, PtqhStatus::PtqhStatusOk);
    assert!(!out.is_null());
    out
}

fn entry(m: *const PtqhMatrix, i: usize, j: usize) -> (f64, f64) {
    let (mut re, mut im) = (0.0, 0.0);
    assert_eq!(
        ptqh_matrix_get(m, i, j, &mut re, &mut im),
        PtqhStatus::PtqhStatusOk
    );
    (re, im)
}

fn last_error() -> String {
    let needed = ptqh_last_error_message(ptr::null_mut(), 0);
    if needed == 0 {
        return String::new();
    }
    let mut buf = vec![0u8; needed];
    ptqh_last_error_message(buf.as_mut_ptr().cast(), buf.len());
    let end = buf.iter().position(|&b| b == 0).unwrap();
    String::from_utf8(buf[..end].to_vec()).unwrap()
}

/// Worked 2x2 operator at r = 1, s = 2, theta = pi/2 with the swap symmetry:
/// classify, build the metric, and verify the intertwining relation using
/// entries pulled back out through the ABI.
#[test]
fn worked_family_flows_through_the_abi() {
    let h = matrix(
        2,
        &[0.0, 2.0, 2.0, 0.0],
        Some(&[1.0, 0.0, 0.0, -1.0]),
    );
    let swap = matrix(2, &[0.0, 1.0, 1.0, 0.0], None);
    let mut sym = ptr::null_mut();
    assert_eq!(
        ptqh_symmetry_new(swap, 0.0, &mut sym),
        PtqhStatus::PtqhStatusOk
    );

    let mut phase = PtqhPhase::PtqhPhaseNotSymmetric;
    assert_eq!(
        ptqh_classify(h, sym, 0.0, &mut phase),
        PtqhStatus::PtqhStatusOk
    );
    assert_eq!(phase, PtqhPhase::PtqhPhaseUnbroken);

    let mut metric = ptr::null_mut();
    assert_eq!(
        ptqh_metric_from_unbroken(h, sym, 0.0, &mut metric),
        PtqhStatus::PtqhStatusOk
    );
    let mut min_eig = 0.0;
    assert_eq!(
        ptqh_metric_min_eigenvalue(metric, &mut min_eig),
        PtqhStatus::PtqhStatusOk
    );
    assert!(min_eig > 0.0, "metric lost positivity: {min_eig}");

    let mut eta = ptr::null_mut();
    assert_eq!(
        ptqh_metric_matrix(metric, &mut eta),
        PtqhStatus::PtqhStatusOk
    );
    assert_eq!(ptqh_matrix_dim(eta), 2);

    // Rebuild eta and H host-side and verify eta H eta^{-1} = H^dagger.
    let pull = |m: *const PtqhMatrix| {
        ptqh::linalg::ComplexMatrix::from_fn(2, |i, j| {
            let (re, im) = entry(m, i, j);
            ptqh::linalg::C64::new(re, im)
        })
    };
    let eta_m = pull(eta);
    let h_m = pull(h);
    let lhs = &(&eta_m * &h_m) * &eta_m.inverse().unwrap();
    assert!(
        lhs.distance(&h_m.adjoint()) < 1e-9,
        "intertwining residual {:.3e}",
        lhs.distance(&h_m.adjoint())
    );

    ptqh_matrix_free(eta);
    ptqh_metric_free(metric);
    ptqh_symmetry_free(sym);
    ptqh_matrix_free(swap);
    ptqh_matrix_free(h);
}

#[test]
fn takagi_and_sqrt_flow_through_the_abi() {
    // sigma_x is a symmetric unitary.
    let u = matrix(2, &[0.0, 1.0, 1.0, 0.0], None);
    let mut v = ptr::null_mut();
    assert_eq!(ptqh_takagi(u, 0.0, &mut v), PtqhStatus::PtqhStatusOk);
    // Check U = V V^T entrywise.
    let g = |i, j| entry(v, i, j);
    for i in 0..2 {
        for j in 0..2 {
            let mut re = 0.0;
            let mut im = 0.0;
            for l in 0..2 {
                let (a, b) = g(i, l);
                let (c, d) = g(j, l);
                re += a * c - b * d;
                im += a * d + b * c;
            }
            let expect = if i == j { 0.0 } else { 1.0 };
            assert!((re - expect).abs() < 1e-9 && im.abs() < 1e-9);
        }
    }
    ptqh_matrix_free(v);
    ptqh_matrix_free(u);

    let a = matrix(2, &[4.0, 0.0, 0.0, 9.0], None);
    let mut root = ptr::null_mut();
    assert_eq!(ptqh_sqrt_pd(a, 0.0, &mut root), PtqhStatus::PtqhStatusOk);
    assert_eq!(entry(root, 0, 0), (2.0, 0.0));
    assert_eq!(entry(root, 1, 1), (3.0, 0.0));
    ptqh_matrix_free(root);
    ptqh_matrix_free(a);
}

#[test]
fn certification_and_state_space_through_the_abi() {
    let mut sym = ptr::null_mut();
    assert_eq!(ptqh_symmetry_kappa(3, &mut sym), PtqhStatus::PtqhStatusOk);

    let mut unique = false;
    let mut refuted = 0usize;
    assert_eq!(
        ptqh_certify_unique(sym, 40, 7, 0.0, &mut unique, &mut refuted),
        PtqhStatus::PtqhStatusOk
    );
    assert!(unique);
    assert_eq!(refuted, 40);

    // The refuted count is optional.
    assert_eq!(
        ptqh_certify_unique(sym, 5, 7, 0.0, &mut unique, ptr::null_mut()),
        PtqhStatus::PtqhStatusOk
    );

    let mut dim = usize::MAX;
    assert_eq!(
        ptqh_projector_state_space(sym, 0, 7, 0.0, &mut dim, &mut unique),
        PtqhStatus::PtqhStatusOk
    );
    assert_eq!(dim, 0);
    assert!(unique);

    ptqh_symmetry_free(sym);
}

#[test]
fn every_failure_path_reports_its_code_and_message() {
    // Null pointers.
    let mut out = ptr::null_mut();
    assert_eq!(
        ptqh_matrix_new(2, ptr::null(), ptr::null(), &mut out),
        PtqhStatus::PtqhStatusNullPointer
    );
    let re = [1.0, 0.0, 0.0, 1.0];
    assert_eq!(
        ptqh_matrix_new(2, re.as_ptr(), ptr::null(), ptr::null_mut()),
        PtqhStatus::PtqhStatusNullPointer
    );

    // Non-finite entries.
    let bad = [1.0, f64::NAN, 0.0, 1.0];
    assert_eq!(
        ptqh_matrix_new(2, bad.as_ptr(), ptr::null(), &mut out),
        PtqhStatus::PtqhStatusInvalidArgument
    );
    assert!(last_error().contains("non-finite"), "{}", last_error());

    // Zero dimension.
    assert_eq!(
        ptqh_matrix_new(0, re.as_ptr(), ptr::null(), &mut out),
        PtqhStatus::PtqhStatusInvalidArgument
    );

    // Out-of-range read.
    let id = matrix(2, &re, None);
    let (mut x, mut y) = (0.0, 0.0);
    assert_eq!(
        ptqh_matrix_get(id, 2, 0, &mut x, &mut y),
        PtqhStatus::PtqhStatusInvalidArgument
    );

    // A rotation is unitary but not an involution.
    let rot = matrix(2, &[0.0, 1.0, -1.0, 0.0], None);
    let mut sym = ptr::null_mut();
    assert_eq!(
        ptqh_symmetry_new(rot, 0.0, &mut sym),
        PtqhStatus::PtqhStatusNotInvolution
    );
    assert!(last_error().contains("involution"), "{}", last_error());

    // Dimension mismatch between operands.
    let mut kappa2 = ptr::null_mut();
    assert_eq!(ptqh_symmetry_kappa(3, &mut kappa2), PtqhStatus::PtqhStatusOk);
    let mut phase = PtqhPhase::PtqhPhaseUnbroken;
    assert_eq!(
        ptqh_classify(id, kappa2, 0.0, &mut phase),
        PtqhStatus::PtqhStatusDimensionMismatch
    );

    // Metric construction requires the unbroken phase: i sigma_z under kappa
    // is not even symmetric.
    let mut kappa = ptr::null_mut();
    assert_eq!(ptqh_symmetry_kappa(2, &mut kappa), PtqhStatus::PtqhStatusOk);
    let zero = [0.0, 0.0, 0.0, 0.0];
    let isz = matrix(2, &zero, Some(&[1.0, 0.0, 0.0, -1.0]));
    let mut metric = ptr::null_mut();
    assert_eq!(
        ptqh_metric_from_unbroken(isz, kappa, 0.0, &mut metric),
        PtqhStatus::PtqhStatusPhaseUnsuitable
    );

    // Takagi rejects a non-symmetric matrix; sqrt rejects a non-PD one.
    let asym = matrix(2, &[0.0, 1.0, 2.0, 0.0], None);
    let mut v = ptr::null_mut();
    assert_eq!(
        ptqh_takagi(asym, 0.0, &mut v),
        PtqhStatus::PtqhStatusInvalidArgument
    );
    let neg = matrix(2, &[1.0, 0.0, 0.0, -1.0], None);
    assert_eq!(
        ptqh_sqrt_pd(neg, 0.0, &mut v),
        PtqhStatus::PtqhStatusInvalidArgument
    );

    // A bad tolerance is rejected up front.
    assert_eq!(
        ptqh_classify(id, kappa, f64::NAN, &mut phase),
        PtqhStatus::PtqhStatusInvalidArgument
    );

    // Frees ignore null.
    ptqh_matrix_free(ptr::null_mut());
    ptqh_symmetry_free(ptr::null_mut());
    ptqh_metric_free(ptr::null_mut());

    ptqh_matrix_free(neg);
    ptqh_matrix_free(asym);
    ptqh_matrix_free(isz);
    ptqh_symmetry_free(kappa);
    ptqh_symmetry_free(kappa2);
    ptqh_matrix_free(rot);
    ptqh_matrix_free(id);
}

#[test]
fn error_message_buffer_is_truncated_and_terminated() {
    // Provoke a recorded error.
    let mut out = ptr::null_mut();
    let bad = [f64::INFINITY];
    assert_eq!(
        ptqh_matrix_new(1, bad.as_ptr(), ptr::null(), &mut out),
        PtqhStatus::PtqhStatusInvalidArgument
    );
    let needed = ptqh_last_error_message(ptr::null_mut(), 0);
    assert!(needed > 1);

    let mut tiny = [0i8; 8];
    let reported = ptqh_last_error_message(tiny.as_mut_ptr().cast(), tiny.len());
    assert_eq!(reported, needed, "needed length must not depend on buffer");
    assert_eq!(tiny[7], 0, "buffer must stay NUL-terminated");
    let prefix: String = tiny[..7].iter().map(|&b| b as u8 as char).collect();
    assert!(last_error().starts_with(prefix.trim_end_matches('\0')));

    // Success clears the message.
    let ok = [1.0];
    assert_eq!(
        ptqh_matrix_new(1, ok.as_ptr(), ptr::null(), &mut out),
        PtqhStatus::PtqhStatusOk
    );
    assert_eq!(ptqh_last_error_message(ptr::null_mut(), 0), 0);
    ptqh_matrix_free(out);
}

/// The committed header stays in sync with the exported surface.
#[test]
fn generated_header_covers_the_exported_surface() {
    let header = std::fs::read_to_string(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/include/ptqh.h"
    ))
    .expect("header is generated at build time");
    for symbol in [
        "ptqh_matrix_new",
        "ptqh_matrix_dim",
        "ptqh_matrix_get",
        "ptqh_matrix_free",
        "ptqh_symmetry_new",
        "ptqh_symmetry_kappa",
        "ptqh_symmetry_free",
        "ptqh_classify",
        "ptqh_metric_from_unbroken",
        "ptqh_metric_matrix",
        "ptqh_metric_min_eigenvalue",
        "ptqh_metric_free",
        "ptqh_takagi",
        "ptqh_sqrt_pd",
        "ptqh_certify_unique",
        "ptqh_projector_state_space",
        "ptqh_last_error_message",
        "typedef struct PtqhMatrix PtqhMatrix",
        "typedef struct PtqhSymmetry PtqhSymmetry",
        "typedef struct PtqhMetric PtqhMetric",
        "PtqhStatusOk = 0",
        "PtqhPhaseUnbroken = 1",
    ] {
        assert!(header.contains(symbol), "header is missing `{symbol}`");
    }
}
