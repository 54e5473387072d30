use mmconc_ffi::*;
use std::ffi::{CStr, CString};
use std::ptr;

fn last_error() -> String {
    unsafe { CStr::from_ptr(mm_last_error_message()) }.to_string_lossy().into_owned()
}

fn two_point() -> *mut MmSpace {
    let d = [0.0, 1.0, 1.0, 0.0];
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { mm_space_from_distances(d.as_ptr(), 2, ptr::null(), &mut s) }, MmStatus::Ok);
    s
}

#[test]
fn two_point_round_trip() {
    let s = two_point();
    let mut v = f64::NAN;
    unsafe {
        assert_eq!(mm_space_len(s), 2);
        assert_eq!(mm_space_diameter(s, &mut v), MmStatus::Ok);
        assert_eq!(v, 1.0);
        assert_eq!(mm_sep_exact(s, 0.25, &mut v), MmStatus::Ok);
        assert_eq!(v, 1.0);
        assert_eq!(mm_alpha_exact(s, 1.0, &mut v), MmStatus::Ok);
        assert_eq!(v, 0.0);
        assert_eq!(mm_dim_chavez(s, false, &mut v), MmStatus::Ok);
        assert_eq!(v, 0.5);
        let (mu, nu) = ([1.0, 0.0], [0.0, 1.0]);
        assert_eq!(mm_emd(s, mu.as_ptr(), nu.as_ptr(), 2, &mut v), MmStatus::Ok);
        assert_eq!(v, 1.0);
        mm_space_free(s);
    }
}

#[test]
fn errors_carry_codes_and_messages() {
    let bad = [0.0, 1.0, 2.0, 0.0];
    let mut s = ptr::null_mut();
    let st = unsafe { mm_space_from_distances(bad.as_ptr(), 2, ptr::null(), &mut s) };
    assert_eq!(st, MmStatus::Input);
    assert!(s.is_null());
    assert!(last_error().contains("asymmetric"), "{}", last_error());

    let mut v = 0.0;
    assert_eq!(unsafe { mm_space_diameter(ptr::null(), &mut v) }, MmStatus::NullPointer);

    let spec = CString::new(r#"{"family":"hamming_cube","d":5,"seed":0}"#).unwrap();
    assert_eq!(unsafe { mm_space_generate(spec.as_ptr(), &mut s) }, MmStatus::Ok);
    assert_eq!(unsafe { mm_alpha_exact(s, 0.2, &mut v) }, MmStatus::ResourceLimit);
    assert!(last_error().contains("22"));
    unsafe { mm_space_free(s) };

    let junk = CString::new("{").unwrap();
    assert_eq!(unsafe { mm_space_generate(junk.as_ptr(), &mut s) }, MmStatus::Input);
}

#[test]
fn hamming_and_points() {
    let mut v = 0.0;
    assert_eq!(unsafe { mm_sep_hamming(2, 0.5, &mut v) }, MmStatus::Ok);
    assert_eq!(v, 0.5);
    let pts = [0.0, 0.0, 0.0, 0.0, 1.0, 1.0, 1.0, 0.0, 1.0];
    let mut s = ptr::null_mut();
    let st = unsafe { mm_space_from_points(pts.as_ptr(), 3, 3, ptr::null(), MmMetric::NormalizedHamming, &mut s) };
    assert_eq!(st, MmStatus::Ok);
    unsafe {
        assert_eq!(mm_space_diameter(s, &mut v), MmStatus::Ok);
        assert!((v - 2.0 / 3.0).abs() < 1e-15);
        let mut lo = 0.0;
        assert_eq!(mm_sep_lower(s, 1.0 / 3.0, 2, 0, &mut lo), MmStatus::Ok);
        assert_eq!(mm_sep_exact(s, 1.0 / 3.0, &mut v), MmStatus::Ok);
        assert!(lo <= v);
        mm_space_free(s);
    }
    let mut grid = [0.0; 4];
    assert_eq!(unsafe { mm_kappa_grid(4, grid.as_mut_ptr()) }, MmStatus::Ok);
    assert_eq!(grid, [0.125, 0.25, 0.375, 0.5]);
}

#[test]
fn singleton_chavez_is_infinite() {
    let d = [0.0];
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { mm_space_from_distances(d.as_ptr(), 1, ptr::null(), &mut s) }, MmStatus::Ok);
    let mut v = 0.0;
    assert_eq!(unsafe { mm_dim_chavez(s, false, &mut v) }, MmStatus::Ok);
    assert_eq!(v, f64::INFINITY);
    unsafe { mm_space_free(s) };
}

#[test]
fn header_declares_the_api() {
    let h = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/mmconc.h")).unwrap();
    for sym in [
        "typedef struct MmSpace MmSpace",
        "mm_space_from_distances",
        "mm_space_generate",
        "mm_space_free",
        "mm_last_error_message",
        "MM_STATUS_RESOURCE_LIMIT",
        "mm_emd",
    ] {
        assert!(h.contains(sym), "header lacks {sym}");
    }
    let v = unsafe { CStr::from_ptr(mm_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}
