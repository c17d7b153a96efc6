//! C interface to the `localhcf` estimators.
//!
//! Problems are opaque `LhcfProblem` handles created by one of the
//! `lhcf_problem_*` constructors and released with `lhcf_problem_free`.
//! Every fallible call returns an `LhcfStatus`; on failure a description is
//! available from `lhcf_last_error` on the same thread.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;

use localhcf::edge::{build_edge_field, compute_llr, data_from_llrs, make_chain_fixture, EdgeModel, EdgePotentials, Image};
use localhcf::hcf::{hcf_run, HcfOptions};
use localhcf::local::{assign_ranks, local_hcf_run, LocalHcfOptions, RankMode};
use localhcf::{energy, Configuration, DataTerm, Field, MrfError};

/// Result of every fallible call. Zero means success; `EstimatorFailed`
/// means the run hit its iteration cap.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LhcfStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    BufferTooSmall = 3,
    EstimatorFailed = 4,
    Panic = 5,
}

/// A field together with its data term.
pub struct LhcfProblem {
    field: Field,
    data: DataTerm,
}

/// Prior potentials for the edge lattice.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LhcfPotentials {
    pub continuity: f64,
    pub turn: f64,
    pub parallel: f64,
    pub edge_prior: f64,
}

/// Summary of one estimator run.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct LhcfRunInfo {
    /// Final energy of the labeling.
    pub energy: f64,
    /// Iterations (Local HCF) or steps (HCF) that changed the labeling.
    pub iterations: usize,
}

impl From<LhcfPotentials> for EdgePotentials {
    fn from(p: LhcfPotentials) -> Self {
        EdgePotentials {
            continuity: p.continuity,
            turn: p.turn,
            parallel: p.parallel,
            edge_prior: p.edge_prior,
        }
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

struct Failure(LhcfStatus, String);

impl From<MrfError> for Failure {
    fn from(e: MrfError) -> Self {
        let status = match e {
            MrfError::IterationCap { .. } => LhcfStatus::EstimatorFailed,
            _ => LhcfStatus::InvalidArgument,
        };
        Failure(status, e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(LhcfStatus::NullPointer, format!("{what} is null"))
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> LhcfStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => LhcfStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            LhcfStatus::Panic
        }
    }
}

/// # Safety
/// `ptr` must be null or valid for `len` reads.
unsafe fn input_slice<'a, T>(ptr: *const T, len: usize, what: &str) -> Result<&'a [T], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if ptr.is_null() {
        return Err(null(what));
    }
    Ok(unsafe { slice::from_raw_parts(ptr, len) })
}

fn store(out: *mut *mut LhcfProblem, problem: LhcfProblem) -> Result<(), Failure> {
    unsafe { *out = Box::into_raw(Box::new(problem)) };
    Ok(())
}

fn edge_problem(width: usize, height: usize, data: DataTerm, potentials: *const LhcfPotentials) -> Result<LhcfProblem, Failure> {
    let pot = if potentials.is_null() {
        EdgePotentials::default()
    } else {
        unsafe { *potentials }.into()
    };
    pot.validate()?;
    let field = build_edge_field(width, height, &pot)?;
    data.check_against(&field)?;
    Ok(LhcfProblem { field, data })
}

/// Default edge-lattice potentials.
#[no_mangle]
pub extern "C" fn lhcf_potentials_default() -> LhcfPotentials {
    let p = EdgePotentials::default();
    LhcfPotentials {
        continuity: p.continuity,
        turn: p.turn,
        parallel: p.parallel,
        edge_prior: p.edge_prior,
    }
}

/// The eight-site edge chain used in the test suite.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn lhcf_problem_chain_fixture(out: *mut *mut LhcfProblem) -> LhcfStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let (field, data) = make_chain_fixture();
        store(out, LhcfProblem { field, data })
    })
}

/// Edge-labeling problem for a `width` x `height` grayscale image stored row
/// by row. `potentials` may be null for the defaults.
///
/// # Safety
/// `pixels` must be valid for `width * height` reads and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn lhcf_problem_from_image(
    pixels: *const u8,
    width: usize,
    height: usize,
    mu: f64,
    sigma: f64,
    potentials: *const LhcfPotentials,
    out: *mut *mut LhcfProblem,
) -> LhcfStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let n = width
            .checked_mul(height)
            .ok_or_else(|| Failure(LhcfStatus::InvalidArgument, "image too large".into()))?;
        let px = unsafe { input_slice(pixels, n, "pixels")? };
        let image = Image::new(width, height, px.to_vec())?;
        let model = EdgeModel { mu_e: mu, sigma };
        model.validate()?;
        let data = compute_llr(&image, &model)?;
        store(out, edge_problem(width, height, data, potentials)?)
    })
}

/// Edge-labeling problem from per-site log likelihood ratios, one per
/// boundary segment of a `width` x `height` image (vertical segments first).
///
/// # Safety
/// `llrs` must be valid for `len` reads and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn lhcf_problem_from_llrs(
    llrs: *const f64,
    len: usize,
    width: usize,
    height: usize,
    potentials: *const LhcfPotentials,
    out: *mut *mut LhcfProblem,
) -> LhcfStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let llrs = unsafe { input_slice(llrs, len, "llrs")? };
        let data = data_from_llrs(llrs)?;
        store(out, edge_problem(width, height, data, potentials)?)
    })
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `problem` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn lhcf_problem_free(problem: *mut LhcfProblem) {
    if !problem.is_null() {
        drop(unsafe { Box::from_raw(problem) });
    }
}

/// Number of sites, or 0 for a null handle.
///
/// # Safety
/// `problem` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn lhcf_problem_num_sites(problem: *const LhcfProblem) -> usize {
    unsafe { problem.as_ref() }.map_or(0, |p| p.field.num_sites())
}

/// # Safety
/// Pointers as documented on the public wrappers.
unsafe fn run_common(
    problem: *const LhcfProblem,
    labels_out: *mut u32,
    len: usize,
    info_out: *mut LhcfRunInfo,
    run: impl FnOnce(&LhcfProblem) -> Result<(Configuration, usize), Failure>,
) -> LhcfStatus {
    guard(|| {
        let p = unsafe { problem.as_ref() }.ok_or_else(|| null("problem"))?;
        if labels_out.is_null() {
            return Err(null("labels_out"));
        }
        let n = p.field.num_sites();
        if len < n {
            return Err(Failure(
                LhcfStatus::BufferTooSmall,
                format!("labels_out holds {len} labels, problem has {n} sites"),
            ));
        }
        let (config, iterations) = run(p)?;
        let out = unsafe { slice::from_raw_parts_mut(labels_out, n) };
        out.copy_from_slice(config.as_slice());
        if !info_out.is_null() {
            let energy = energy(&p.field, &p.data, &config)?;
            unsafe { *info_out = LhcfRunInfo { energy, iterations } };
        }
        Ok(())
    })
}

fn rank_mode(rank_seed: u64) -> RankMode {
    if rank_seed == 0 {
        RankMode::SiteIndex
    } else {
        RankMode::Seeded(rank_seed)
    }
}

/// Runs Local HCF. `threads` = 0 uses all cores; `rank_seed` = 0 breaks ties
/// by site index, anything else by a seeded permutation. Writes one label per
/// site to `labels_out`; `info_out` may be null.
///
/// # Safety
/// `problem` must be a live handle, `labels_out` valid for `len` writes, and
/// `info_out` null or writable.
#[no_mangle]
pub unsafe extern "C" fn lhcf_run_local_hcf(
    problem: *const LhcfProblem,
    threads: usize,
    rank_seed: u64,
    labels_out: *mut u32,
    len: usize,
    info_out: *mut LhcfRunInfo,
) -> LhcfStatus {
    unsafe {
        run_common(problem, labels_out, len, info_out, |p| {
            let ranks = assign_ranks(p.field.num_sites(), rank_mode(rank_seed));
            let opts = LocalHcfOptions {
                threads,
                ..LocalHcfOptions::default()
            };
            let (config, trace) = local_hcf_run(&p.field, &p.data, &ranks, &opts)?;
            Ok((config, trace.iterations()))
        })
    }
}

/// Runs serial HCF. Arguments as for `lhcf_run_local_hcf`.
///
/// # Safety
/// As for `lhcf_run_local_hcf`.
#[no_mangle]
pub unsafe extern "C" fn lhcf_run_hcf(
    problem: *const LhcfProblem,
    rank_seed: u64,
    labels_out: *mut u32,
    len: usize,
    info_out: *mut LhcfRunInfo,
) -> LhcfStatus {
    unsafe {
        run_common(problem, labels_out, len, info_out, |p| {
            let opts = HcfOptions {
                rank_mode: rank_mode(rank_seed),
                ..HcfOptions::default()
            };
            let (config, trace) = hcf_run(&p.field, &p.data, &opts)?;
            Ok((config, trace.steps.len()))
        })
    }
}

/// Energy of a complete labeling.
///
/// # Safety
/// `problem` must be a live handle, `labels` valid for `len` reads and
/// `energy_out` writable.
#[no_mangle]
pub unsafe extern "C" fn lhcf_energy(
    problem: *const LhcfProblem,
    labels: *const u32,
    len: usize,
    energy_out: *mut f64,
) -> LhcfStatus {
    guard(|| {
        let p = unsafe { problem.as_ref() }.ok_or_else(|| null("problem"))?;
        if energy_out.is_null() {
            return Err(null("energy_out"));
        }
        let labels = unsafe { input_slice(labels, len, "labels")? };
        let config = Configuration::from_labels(labels.to_vec());
        let e = energy(&p.field, &p.data, &config)?;
        unsafe { *energy_out = e };
        Ok(())
    })
}

/// Message for the last failure on this thread, or null if there was none.
/// The pointer stays valid until the next failing call on this thread.
#[no_mangle]
pub extern "C" fn lhcf_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}
