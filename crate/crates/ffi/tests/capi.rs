use std::ffi::{CStr, CString};
use std::ptr;

use projcalc::harness::{Suite, SuiteSpec};
use projcalc::projections::{project, ConvexSet};
use projcalc::LpSpace;
use projcalc_ffi::*;

struct Space(*mut PcSpace);

impl Space {
    fn new(n: usize, p: f64) -> Self {
        let mut h = ptr::null_mut();
        assert_eq!(unsafe { pc_space_new(n, p, ptr::null(), &mut h) }, PcStatus::Ok);
        Space(h)
    }
}

impl Drop for Space {
    fn drop(&mut self) {
        unsafe { pc_space_free(self.0) }
    }
}

struct Set(*mut PcSet);

impl Drop for Set {
    fn drop(&mut self) {
        unsafe { pc_set_free(self.0) }
    }
}

fn ball(r: f64) -> Set {
    let mut h = ptr::null_mut();
    assert_eq!(unsafe { pc_set_ball(r, &mut h) }, PcStatus::Ok);
    Set(h)
}

fn cone() -> Set {
    let mut h = ptr::null_mut();
    assert_eq!(unsafe { pc_set_positive_cone(&mut h) }, PcStatus::Ok);
    Set(h)
}

fn last_error() -> String {
    let p = pc_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn space_handle_reports_dimension() {
    let s = Space::new(5, 3.0);
    assert_eq!(unsafe { pc_space_dim(s.0) }, 5);
    assert_eq!(unsafe { pc_space_dim(ptr::null()) }, 0);
}

#[test]
fn invalid_exponent_sets_error_message() {
    let mut h = ptr::null_mut();
    let st = unsafe { pc_space_new(3, 0.5, ptr::null(), &mut h) };
    assert_eq!(st, PcStatus::InvalidArgument);
    assert!(h.is_null());
    assert!(last_error().contains("exponent"));
}

#[test]
fn success_clears_last_error() {
    let mut h = ptr::null_mut();
    unsafe { pc_space_new(0, 2.0, ptr::null(), &mut h) };
    assert!(!pc_last_error().is_null());
    let _s = Space::new(2, 2.0);
    assert!(pc_last_error().is_null());
}

#[test]
fn weighted_space_rejects_bad_weight() {
    let w = [1.0, -2.0];
    let mut h = ptr::null_mut();
    let st = unsafe { pc_space_new(2, 2.0, w.as_ptr(), &mut h) };
    assert_eq!(st, PcStatus::InvalidArgument);
    assert!(last_error().contains("weight"));
}

#[test]
fn null_handles_are_reported() {
    let x = [1.0, 2.0];
    let mut out = 0.0;
    let st = unsafe { pc_norm(ptr::null(), x.as_ptr(), 2, &mut out) };
    assert_eq!(st, PcStatus::NullPointer);
    let s = Space::new(2, 2.0);
    let st = unsafe { pc_norm(s.0, ptr::null(), 2, &mut out) };
    assert_eq!(st, PcStatus::NullPointer);
    assert_eq!(unsafe { pc_set_ball(1.0, ptr::null_mut()) }, PcStatus::NullPointer);
    unsafe {
        pc_space_free(ptr::null_mut());
        pc_set_free(ptr::null_mut());
        pc_string_free(ptr::null_mut());
    }
}

#[test]
fn length_mismatch_is_reported() {
    let s = Space::new(3, 2.0);
    let x = [1.0, 2.0];
    let mut out = 0.0;
    let st = unsafe { pc_norm(s.0, x.as_ptr(), 2, &mut out) };
    assert_eq!(st, PcStatus::DimensionMismatch);
}

#[test]
fn norm_and_duality_maps() {
    let s = Space::new(3, 3.0);
    let x = [1.0, -2.0, 0.5];
    let mut norm = 0.0;
    assert_eq!(unsafe { pc_norm(s.0, x.as_ptr(), 3, &mut norm) }, PcStatus::Ok);
    let expected = (1.0f64 + 8.0 + 0.125).cbrt();
    assert!((norm - expected).abs() < 1e-14);

    let mut jx = [0.0; 3];
    let mut back = [0.0; 3];
    let mut dnorm = 0.0;
    unsafe {
        assert_eq!(pc_duality_map(s.0, x.as_ptr(), 3, jx.as_mut_ptr()), PcStatus::Ok);
        assert_eq!(pc_dual_norm(s.0, jx.as_ptr(), 3, &mut dnorm), PcStatus::Ok);
        assert_eq!(pc_duality_map_inv(s.0, jx.as_ptr(), 3, back.as_mut_ptr()), PcStatus::Ok);
    }
    assert!((dnorm - norm).abs() < 1e-12);
    for (a, b) in x.iter().zip(&back) {
        assert!((a - b).abs() < 1e-12);
    }
}

#[test]
fn projection_matches_library() {
    let s = Space::new(4, 1.5);
    let b = ball(0.7);
    let x = [0.3, -1.2, 2.0, 0.1];
    let mut out = [0.0; 4];
    assert_eq!(unsafe { pc_project(s.0, b.0, x.as_ptr(), 4, out.as_mut_ptr()) }, PcStatus::Ok);
    let space = LpSpace::new(4, 1.5).unwrap();
    let want = project(&space, &ConvexSet::ball(0.7).unwrap(), &space.primal(x.to_vec()).unwrap()).unwrap();
    assert_eq!(out.as_slice(), want.coords());
}

#[test]
fn cylinder_mask_out_of_range() {
    let mask = [0usize, 5];
    let mut h = ptr::null_mut();
    let st = unsafe { pc_set_cylinder(1.0, 3, mask.as_ptr(), 2, &mut h) };
    assert_eq!(st, PcStatus::InvalidArgument);
    assert!(last_error().contains("out of range"));
}

#[test]
fn cylinder_projection_keeps_free_coordinates() {
    let s = Space::new(3, 2.0);
    let mask = [0usize, 1];
    let mut h = ptr::null_mut();
    assert_eq!(unsafe { pc_set_cylinder(1.0, 3, mask.as_ptr(), 2, &mut h) }, PcStatus::Ok);
    let c = Set(h);
    let x = [3.0, 4.0, 9.0];
    let mut out = [0.0; 3];
    assert_eq!(unsafe { pc_project(s.0, c.0, x.as_ptr(), 3, out.as_mut_ptr()) }, PcStatus::Ok);
    assert!((out[0] - 0.6).abs() < 1e-12);
    assert!((out[1] - 0.8).abs() < 1e-12);
    assert_eq!(out[2], 9.0);
}

#[test]
fn subspace_zeroes_off_mask() {
    let s = Space::new(3, 4.0);
    let mask = [1usize];
    let mut h = ptr::null_mut();
    assert_eq!(unsafe { pc_set_subspace(3, mask.as_ptr(), 1, &mut h) }, PcStatus::Ok);
    let c = Set(h);
    let x = [3.0, -4.0, 9.0];
    let mut out = [1.0; 3];
    assert_eq!(unsafe { pc_project(s.0, c.0, x.as_ptr(), 3, out.as_mut_ptr()) }, PcStatus::Ok);
    assert_eq!(out, [0.0, -4.0, 0.0]);
}

#[test]
fn frechet_on_boundary_has_no_derivative() {
    let s = Space::new(2, 2.0);
    let b = ball(1.0);
    let xbar = [1.0, 0.0];
    let v = [0.0, 1.0];
    let mut out = [0.0; 2];
    let st = unsafe { pc_frechet_apply(s.0, b.0, xbar.as_ptr(), v.as_ptr(), 2, out.as_mut_ptr()) };
    assert_eq!(st, PcStatus::NoDerivative);

    let xbar = [2.0, 0.0];
    let st = unsafe { pc_frechet_apply(s.0, b.0, xbar.as_ptr(), v.as_ptr(), 2, out.as_mut_ptr()) };
    assert_eq!(st, PcStatus::Ok);
    assert!((out[0]).abs() < 1e-15);
    assert!((out[1] - 0.5).abs() < 1e-15);
}

#[test]
fn coderivative_kinds() {
    let s = Space::new(2, 2.0);
    let b = ball(1.0);
    let mut res = PcCoderiv {
        kind: PcCoderivKind::Empty,
        verdict: PcVerdict::NotApplicable,
    };
    let mut a = [0.0; 2];

    let interior = [0.2, 0.1];
    let ys = [1.0, -3.0];
    let st = unsafe { pc_coderivative(s.0, b.0, interior.as_ptr(), ys.as_ptr(), 2, &mut res, a.as_mut_ptr(), ptr::null_mut()) };
    assert_eq!(st, PcStatus::Ok);
    assert_eq!(res.kind, PcCoderivKind::Singleton);
    assert_eq!(a, ys);

    let sphere = [1.0, 0.0];
    let jx = [1.0, 0.0];
    let st = unsafe { pc_coderivative(s.0, b.0, sphere.as_ptr(), jx.as_ptr(), 2, &mut res, ptr::null_mut(), ptr::null_mut()) };
    assert_eq!(st, PcStatus::Ok);
    assert_eq!(res.kind, PcCoderivKind::Empty);

    let outward = [-1.0, 0.0];
    let st = unsafe { pc_coderivative(s.0, b.0, sphere.as_ptr(), outward.as_ptr(), 2, &mut res, ptr::null_mut(), ptr::null_mut()) };
    assert_eq!(st, PcStatus::Ok);
    assert_eq!(res.kind, PcCoderivKind::ThetaMembership);
    assert_eq!(res.verdict, PcVerdict::Member);
}

#[test]
fn cone_interval_at_origin() {
    let s = Space::new(3, 3.0);
    let c = cone();
    let origin = [0.0; 3];
    let psi = [1.0, 2.0, 0.0];
    let mut res = PcCoderiv {
        kind: PcCoderivKind::Empty,
        verdict: PcVerdict::NotApplicable,
    };
    let mut lo = [f64::NAN; 3];
    let mut hi = [f64::NAN; 3];
    let st = unsafe { pc_coderivative(s.0, c.0, origin.as_ptr(), psi.as_ptr(), 3, &mut res, lo.as_mut_ptr(), hi.as_mut_ptr()) };
    assert_eq!(st, PcStatus::Ok);
    assert_eq!(res.kind, PcCoderivKind::OrderInterval);
    assert_eq!(lo, [0.0; 3]);
    assert_eq!(hi, psi);
}

#[test]
fn oracle_accepts_adjoint_and_rejects_perturbation() {
    let s = Space::new(3, 3.0);
    let b = ball(1.0);
    let xbar = [0.2, -0.1, 0.3];
    let ys = [0.5, 1.0, -0.25];
    let mut res = PcOracleResult {
        rejected: true,
        supports_membership: false,
        final_max: f64::NAN,
        witness_quotient: f64::NAN,
    };
    let st = unsafe { pc_oracle_test(s.0, b.0, xbar.as_ptr(), ys.as_ptr(), ys.as_ptr(), 3, 7, &mut res, ptr::null_mut()) };
    assert_eq!(st, PcStatus::Ok);
    assert!(!res.rejected);
    assert!(res.supports_membership);
    assert!(res.witness_quotient.is_nan());

    let wrong = [1.5, 1.0, -0.25];
    let mut w = [f64::NAN; 3];
    let st = unsafe { pc_oracle_test(s.0, b.0, xbar.as_ptr(), wrong.as_ptr(), ys.as_ptr(), 3, 7, &mut res, w.as_mut_ptr()) };
    assert_eq!(st, PcStatus::Ok);
    assert!(res.rejected);
    assert!(res.witness_quotient >= 1e-2);
    assert!(w.iter().all(|v| v.is_finite()));
}

#[test]
fn suite_runs_through_json() {
    let mut spec = SuiteSpec::new(Suite::SpaceIdentities);
    spec.n = 4;
    spec.samples.points = 50;
    spec.samples.direction_pairs = 50;
    let text = CString::new(serde_json::to_string(&spec).unwrap()).unwrap();
    let mut json = ptr::null_mut();
    let mut ok = false;
    let st = unsafe { pc_run_suite(text.as_ptr(), &mut json, &mut ok) };
    assert_eq!(st, PcStatus::Ok);
    assert!(ok);
    let report: serde_json::Value = serde_json::from_str(unsafe { CStr::from_ptr(json) }.to_str().unwrap()).unwrap();
    unsafe { pc_string_free(json) };
    assert_eq!(report["suite"], "space-identities");
    assert_eq!(report["summary"]["failed"], 0);
}

#[test]
fn suite_rejects_malformed_json() {
    let text = CString::new("{\"suite\": 3}").unwrap();
    let mut json = ptr::null_mut();
    let mut ok = true;
    let st = unsafe { pc_run_suite(text.as_ptr(), &mut json, &mut ok) };
    assert_eq!(st, PcStatus::InvalidArgument);
    assert!(json.is_null());
}

#[test]
fn header_declares_every_export() {
    let header = include_str!("../include/projcalc.h");
    for name in [
        "pc_last_error",
        "pc_space_new",
        "pc_space_free",
        "pc_space_dim",
        "pc_set_ball",
        "pc_set_cylinder",
        "pc_set_subspace",
        "pc_set_positive_cone",
        "pc_set_free",
        "pc_norm",
        "pc_dual_norm",
        "pc_duality_map",
        "pc_duality_map_inv",
        "pc_project",
        "pc_frechet_apply",
        "pc_coderivative",
        "pc_oracle_test",
        "pc_run_suite",
        "pc_string_free",
        "PC_STATUS_NO_DERIVATIVE",
        "typedef struct PcSpace PcSpace;",
    ] {
        assert!(header.contains(name), "{name} missing from header");
    }
}
