use std::ffi::CStr;
use std::ptr;

use localhcf_ffi::*;

fn chain() -> *mut LhcfProblem {
    let mut p = ptr::null_mut();
    assert_eq!(unsafe { lhcf_problem_chain_fixture(&mut p) }, LhcfStatus::Ok);
    assert!(!p.is_null());
    p
}

fn last_error() -> String {
    let msg = lhcf_last_error();
    assert!(!msg.is_null());
    unsafe { CStr::from_ptr(msg) }.to_string_lossy().into_owned()
}

#[test]
fn local_hcf_on_chain() {
    let p = chain();
    assert_eq!(unsafe { lhcf_problem_num_sites(p) }, 8);
    let mut labels = [99u32; 8];
    let mut info = LhcfRunInfo::default();
    let status = unsafe { lhcf_run_local_hcf(p, 1, 0, labels.as_mut_ptr(), labels.len(), &mut info) };
    assert_eq!(status, LhcfStatus::Ok);
    assert_eq!(labels, [1, 0, 0, 0, 0, 0, 0, 0]);
    assert!((info.energy + 6.0).abs() < 1e-12);
    assert_eq!(info.iterations, 3);

    let mut e = 0.0;
    assert_eq!(unsafe { lhcf_energy(p, labels.as_ptr(), labels.len(), &mut e) }, LhcfStatus::Ok);
    assert_eq!(e, info.energy);
    unsafe { lhcf_problem_free(p) };
}

#[test]
fn hcf_on_chain() {
    let p = chain();
    let mut labels = [0u32; 8];
    let mut info = LhcfRunInfo::default();
    let status = unsafe { lhcf_run_hcf(p, 0, labels.as_mut_ptr(), labels.len(), &mut info) };
    assert_eq!(status, LhcfStatus::Ok);
    assert_eq!(labels, [1; 8]);
    assert!((info.energy + 5.5).abs() < 1e-12);
    unsafe { lhcf_problem_free(p) };
}

#[test]
fn image_problem_runs_and_threads_agree() {
    let (w, h) = (12usize, 10usize);
    let pixels: Vec<u8> = (0..w * h)
        .map(|i| if ((i % w) / 4 + (i / w) / 4) % 2 == 0 { 60 } else { 190 })
        .collect();
    let pot = lhcf_potentials_default();
    let mut p = ptr::null_mut();
    let status = unsafe { lhcf_problem_from_image(pixels.as_ptr(), w, h, 128.0, 16.0, &pot, &mut p) };
    assert_eq!(status, LhcfStatus::Ok);
    let n = unsafe { lhcf_problem_num_sites(p) };
    assert_eq!(n, (w - 1) * h + w * (h - 1));

    let mut a = vec![0u32; n];
    let mut b = vec![0u32; n];
    unsafe {
        assert_eq!(lhcf_run_local_hcf(p, 1, 0, a.as_mut_ptr(), n, ptr::null_mut()), LhcfStatus::Ok);
        assert_eq!(lhcf_run_local_hcf(p, 4, 0, b.as_mut_ptr(), n, ptr::null_mut()), LhcfStatus::Ok);
        lhcf_problem_free(p);
    }
    assert_eq!(a, b);
    assert!(a.contains(&1));
}

#[test]
fn llr_problem_checks_length() {
    let llrs = [0.5; 7];
    let mut p = ptr::null_mut();
    let status = unsafe { lhcf_problem_from_llrs(llrs.as_ptr(), llrs.len(), 3, 3, ptr::null(), &mut p) };
    assert_eq!(status, LhcfStatus::InvalidArgument);
    assert!(p.is_null());
    assert!(!last_error().is_empty());

    let llrs = [0.5; 12];
    let status = unsafe { lhcf_problem_from_llrs(llrs.as_ptr(), llrs.len(), 3, 3, ptr::null(), &mut p) };
    assert_eq!(status, LhcfStatus::Ok);
    unsafe { lhcf_problem_free(p) };
}

#[test]
fn error_codes() {
    let p = chain();
    let mut small = [0u32; 4];
    let status = unsafe { lhcf_run_local_hcf(p, 1, 0, small.as_mut_ptr(), small.len(), ptr::null_mut()) };
    assert_eq!(status, LhcfStatus::BufferTooSmall);
    assert!(last_error().contains("8 sites"));

    let status = unsafe { lhcf_run_hcf(ptr::null(), 0, small.as_mut_ptr(), 4, ptr::null_mut()) };
    assert_eq!(status, LhcfStatus::NullPointer);

    let bad = [0u32, 1, 2, 0, 0, 0, 0, 0];
    let mut e = 0.0;
    let status = unsafe { lhcf_energy(p, bad.as_ptr(), bad.len(), &mut e) };
    assert_eq!(status, LhcfStatus::InvalidArgument);

    let nan = LhcfPotentials {
        continuity: f64::NAN,
        ..lhcf_potentials_default()
    };
    let mut q = ptr::null_mut();
    let status = unsafe { lhcf_problem_from_llrs([0.0; 12].as_ptr(), 12, 3, 3, &nan, &mut q) };
    assert_eq!(status, LhcfStatus::InvalidArgument);

    assert_eq!(unsafe { lhcf_problem_num_sites(ptr::null()) }, 0);
    unsafe {
        lhcf_problem_free(ptr::null_mut());
        lhcf_problem_free(p);
    }
}

#[test]
fn header_declares_every_export() {
    let header = include_str!("../include/localhcf.h");
    for name in [
        "lhcf_potentials_default",
        "lhcf_problem_chain_fixture",
        "lhcf_problem_from_image",
        "lhcf_problem_from_llrs",
        "lhcf_problem_free",
        "lhcf_problem_num_sites",
        "lhcf_run_local_hcf",
        "lhcf_run_hcf",
        "lhcf_energy",
        "lhcf_last_error",
        "typedef struct LhcfProblem LhcfProblem;",
        "LHCF_STATUS_BUFFER_TOO_SMALL = 3",
    ] {
        assert!(header.contains(name), "header lacks {name}");
    }
}
