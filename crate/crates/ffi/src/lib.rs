//! C ABI over `omega-core`.
//!
//! Every fallible call returns an [`OmegaStatus`]; on failure the message is
//! kept per thread and read with [`omega_last_error`]. Objects cross the
//! boundary as opaque handles that the caller frees with the matching
//! `*_free` function. Strings returned to the caller are freed with
//! [`omega_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::ptr;

use omega_core::bass_serre::{fit_quasi_geodesic, geodesic_family, BassSerreError, CayleyBall, FitOptions, GraphOfGroupsPreset};
use omega_core::cli::{self, CliError, RunConfig, RunOutcome};
use omega_core::kleinian::{find_lambda_sep, GroupPreset};
use omega_core::raag::{classify, BoundaryClass, DefiningGraph};
use omega_core::sierpinski::ParabolicSource;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OmegaStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Config = 3,
    Input = 4,
    Precondition = 5,
    Usage = 6,
    Io = 7,
    Panic = 8,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OmegaBoundaryClass {
    Empty = 0,
    TwoPoints = 1,
    Cantor = 2,
    OmegaCantor = 3,
}

impl From<BoundaryClass> for OmegaBoundaryClass {
    fn from(c: BoundaryClass) -> Self {
        match c {
            BoundaryClass::Empty => Self::Empty,
            BoundaryClass::TwoPoints => Self::TwoPoints,
            BoundaryClass::Cantor => Self::Cantor,
            BoundaryClass::OmegaCantor => Self::OmegaCantor,
        }
    }
}

/// A finished run: its bundle directory and manifest.
pub struct OmegaRun(RunOutcome);

/// A RAAG defining graph.
pub struct OmegaGraph(DefiningGraph);

/// A word-metric ball in a graph of groups.
pub struct OmegaBall(CayleyBall);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<Vec<u8>>) {
    let mut bytes = msg.into();
    bytes.retain(|&b| b != 0);
    let c = CString::new(bytes).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn fail(status: OmegaStatus, msg: impl std::fmt::Display) -> OmegaStatus {
    set_error(msg.to_string());
    status
}

fn cli_status(e: CliError) -> OmegaStatus {
    let status = match &e {
        CliError::Config { .. } => OmegaStatus::Config,
        CliError::Input { .. } => OmegaStatus::Input,
        CliError::Precondition(_) => OmegaStatus::Precondition,
        CliError::Usage(_) => OmegaStatus::Usage,
        CliError::Io(_) => OmegaStatus::Io,
    };
    fail(status, e)
}

fn bass_serre_status(e: BassSerreError) -> OmegaStatus {
    let status = match e {
        BassSerreError::Preset(_) | BassSerreError::Letter(_) => OmegaStatus::Input,
        _ => OmegaStatus::Precondition,
    };
    fail(status, e)
}

/// Runs `f`, turning a panic into [`OmegaStatus::Panic`].
fn guard(f: impl FnOnce() -> OmegaStatus) -> OmegaStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(p) => {
            let msg = p.downcast_ref::<&str>().map(|s| s.to_string()).or_else(|| p.downcast_ref::<String>().cloned()).unwrap_or_else(|| "panic".into());
            fail(OmegaStatus::Panic, msg)
        }
    }
}

/// # Safety
/// `s` must be null or a nul-terminated string.
unsafe fn read_str<'a>(s: *const c_char) -> Result<&'a str, OmegaStatus> {
    if s.is_null() {
        return Err(fail(OmegaStatus::NullPointer, "null string argument"));
    }
    CStr::from_ptr(s).to_str().map_err(|e| fail(OmegaStatus::InvalidUtf8, e))
}

fn into_c_string(s: String) -> *mut c_char {
    CString::new(s).map(CString::into_raw).unwrap_or(ptr::null_mut())
}

macro_rules! try_status {
    ($e:expr) => {
        match $e {
            Ok(v) => v,
            Err(s) => return s,
        }
    };
}

/// The library version as a static string.
#[no_mangle]
pub extern "C" fn omega_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Copies the calling thread's last error message into `buf` (truncated and
/// nul-terminated) and returns the full message length in bytes.
///
/// # Safety
/// `buf` must be null or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn omega_last_error(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let e = e.borrow();
        let bytes = e.as_bytes();
        if !buf.is_null() && len > 0 {
            let n = bytes.len().min(len - 1);
            ptr::copy_nonoverlapping(bytes.as_ptr(), buf.cast::<u8>(), n);
            *buf.add(n) = 0;
        }
        bytes.len()
    })
}

/// # Safety
/// `s` must be null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn omega_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Runs a JSON config. `output` overrides the config's output directory
/// when non-null. A run whose certificates fail still returns `Ok`; check
/// [`omega_run_passed`].
///
/// # Safety
/// `config_json` must be a nul-terminated string, `output` null or one, and
/// `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn omega_run_json(config_json: *const c_char, output: *const c_char, out: *mut *mut OmegaRun) -> OmegaStatus {
    guard(|| {
        if out.is_null() {
            return fail(OmegaStatus::NullPointer, "null out pointer");
        }
        let text = try_status!(read_str(config_json));
        let mut cfg = try_status!(RunConfig::from_json(text).map_err(cli_status));
        if !output.is_null() {
            cfg.output = Some(PathBuf::from(try_status!(read_str(output))));
        }
        let run = try_status!(cli::run(&cfg).map_err(cli_status));
        *out = Box::into_raw(Box::new(OmegaRun(run)));
        OmegaStatus::Ok
    })
}

/// # Safety
/// `run` must be a live handle from [`omega_run_json`].
#[no_mangle]
pub unsafe extern "C" fn omega_run_passed(run: *const OmegaRun) -> bool {
    run.as_ref().is_some_and(|r| r.0.passed())
}

/// The process exit code the command-line tool would return: 0 or 1.
///
/// # Safety
/// `run` must be a live handle from [`omega_run_json`].
#[no_mangle]
pub unsafe extern "C" fn omega_run_exit_code(run: *const OmegaRun) -> i32 {
    run.as_ref().map_or(2, |r| r.0.exit_code())
}

/// The run's manifest as JSON; free with [`omega_string_free`].
///
/// # Safety
/// `run` must be a live handle from [`omega_run_json`].
#[no_mangle]
pub unsafe extern "C" fn omega_run_manifest_json(run: *const OmegaRun) -> *mut c_char {
    match run.as_ref() {
        Some(r) => into_c_string(serde_json::to_string_pretty(&r.0.manifest).expect("manifest serializes")),
        None => ptr::null_mut(),
    }
}

/// The bundle directory; free with [`omega_string_free`].
///
/// # Safety
/// `run` must be a live handle from [`omega_run_json`].
#[no_mangle]
pub unsafe extern "C" fn omega_run_dir(run: *const OmegaRun) -> *mut c_char {
    match run.as_ref() {
        Some(r) => into_c_string(r.0.dir.display().to_string()),
        None => ptr::null_mut(),
    }
}

/// # Safety
/// `run` must be null or a handle from [`omega_run_json`], not yet freed.
#[no_mangle]
pub unsafe extern "C" fn omega_run_free(run: *mut OmegaRun) {
    if !run.is_null() {
        drop(Box::from_raw(run));
    }
}

/// Copies a bundle's artifacts of one format (`svg`, `csv`, `json`, `dot`)
/// into `out_dir` and stores the number of files written in `written`.
///
/// # Safety
/// The strings must be nul-terminated; `written` must be null or valid.
#[no_mangle]
pub unsafe extern "C" fn omega_export(bundle: *const c_char, format: *const c_char, out_dir: *const c_char, written: *mut usize) -> OmegaStatus {
    guard(|| {
        let bundle = try_status!(read_str(bundle));
        let format = try_status!(read_str(format));
        let out_dir = try_status!(read_str(out_dir));
        let files = try_status!(cli::export(bundle.as_ref(), format, out_dir.as_ref()).map_err(cli_status));
        if !written.is_null() {
            *written = files.len();
        }
        OmegaStatus::Ok
    })
}

/// A graph on vertices `0..n` with `n_edges` edges given as consecutive
/// vertex pairs in `edges`.
///
/// # Safety
/// `edges` must point to `2 * n_edges` integers (or be null when
/// `n_edges == 0`) and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn omega_raag_graph_new(n: usize, edges: *const u32, n_edges: usize, out: *mut *mut OmegaGraph) -> OmegaStatus {
    guard(|| {
        if out.is_null() || (edges.is_null() && n_edges > 0) {
            return fail(OmegaStatus::NullPointer, "null pointer argument");
        }
        let flat: &[u32] = if n_edges == 0 { &[] } else { std::slice::from_raw_parts(edges, 2 * n_edges) };
        let pairs: Vec<(usize, usize)> = flat.chunks(2).map(|e| (e[0] as usize, e[1] as usize)).collect();
        if let Some(&(a, b)) = pairs.iter().find(|(a, b)| *a >= n || *b >= n) {
            return fail(OmegaStatus::Input, format!("edge {a}-{b} leaves the {n} vertices"));
        }
        let g = try_status!(DefiningGraph::new(n, &pairs).map_err(|e| fail(OmegaStatus::Input, e)));
        *out = Box::into_raw(Box::new(OmegaGraph(g)));
        OmegaStatus::Ok
    })
}

/// # Safety
/// `graph` must be a live handle and `class` valid.
#[no_mangle]
pub unsafe extern "C" fn omega_raag_classify(graph: *const OmegaGraph, class: *mut OmegaBoundaryClass) -> OmegaStatus {
    guard(|| {
        let (Some(g), false) = (graph.as_ref(), class.is_null()) else {
            return fail(OmegaStatus::NullPointer, "null pointer argument");
        };
        *class = classify(&g.0).class.into();
        OmegaStatus::Ok
    })
}

/// # Safety
/// `graph` must be null or a handle from [`omega_raag_graph_new`], not yet
/// freed.
#[no_mangle]
pub unsafe extern "C" fn omega_raag_graph_free(graph: *mut OmegaGraph) {
    if !graph.is_null() {
        drop(Box::from_raw(graph));
    }
}

/// The separation constant of a Kleinian preset (a shipped name or a JSON
/// path), from every cusp with shadow radius at least `r_min`.
///
/// # Safety
/// `preset` must be nul-terminated and `lambda` valid.
#[no_mangle]
pub unsafe extern "C" fn omega_kleinian_lambda_sep(preset: *const c_char, r_min: f64, lambda: *mut f64) -> OmegaStatus {
    guard(|| {
        if lambda.is_null() {
            return fail(OmegaStatus::NullPointer, "null out pointer");
        }
        if !(r_min > 0.0 && r_min <= 1.0) {
            return fail(OmegaStatus::Precondition, format!("r_min must lie in (0, 1], got {r_min}"));
        }
        let name = try_status!(read_str(preset));
        let p = try_status!(GroupPreset::resolve(name).map_err(|e| fail(OmegaStatus::Input, e)));
        let ps = match ParabolicSource::from_preset(&p) {
            Ok(src) => src.all(r_min),
            Err(_) => try_status!(omega_core::kleinian::enumerate_parabolics(&p, r_min, Default::default()).map_err(|e| fail(OmegaStatus::Precondition, e))),
        };
        *lambda = find_lambda_sep(&ps);
        OmegaStatus::Ok
    })
}

/// The ball of the given radius about the identity of a graph-of-groups
/// preset (a shipped name or a JSON path).
///
/// # Safety
/// `preset` must be nul-terminated and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn omega_ball_new(preset: *const c_char, radius: usize, out: *mut *mut OmegaBall) -> OmegaStatus {
    guard(|| {
        if out.is_null() {
            return fail(OmegaStatus::NullPointer, "null out pointer");
        }
        let name = try_status!(read_str(preset));
        let group = try_status!(GraphOfGroupsPreset::resolve(name).and_then(|p| p.group()).map_err(bass_serre_status));
        let ball = try_status!(CayleyBall::new(&group, radius).map_err(bass_serre_status));
        *out = Box::into_raw(Box::new(OmegaBall(ball)));
        OmegaStatus::Ok
    })
}

/// Number of elements in the ball.
///
/// # Safety
/// `ball` must be a live handle from [`omega_ball_new`].
#[no_mangle]
pub unsafe extern "C" fn omega_ball_len(ball: *const OmegaBall) -> usize {
    ball.as_ref().map_or(0, |b| b.0.len())
}

/// Fits the quasi-isometry constant `K` of the tree projection over every
/// geodesic in the ball whose coset intersections have diameter at most
/// `d_bound`.
///
/// # Safety
/// `ball` must be a live handle and `k` valid.
#[no_mangle]
pub unsafe extern "C" fn omega_ball_fit(ball: *const OmegaBall, d_bound: usize, seed: u64, k: *mut f64) -> OmegaStatus {
    guard(|| {
        let (Some(b), false) = (ball.as_ref(), k.is_null()) else {
            return fail(OmegaStatus::NullPointer, "null pointer argument");
        };
        let family = geodesic_family(&b.0, b.0.radius, d_bound);
        let fit = try_status!(fit_quasi_geodesic(&family, &b.0, &FitOptions { seed, ..FitOptions::new(d_bound) }).map_err(bass_serre_status));
        *k = fit.k;
        OmegaStatus::Ok
    })
}

/// # Safety
/// `ball` must be null or a handle from [`omega_ball_new`], not yet freed.
#[no_mangle]
pub unsafe extern "C" fn omega_ball_free(ball: *mut OmegaBall) {
    if !ball.is_null() {
        drop(Box::from_raw(ball));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn last_error() -> String {
        let mut buf = vec![0 as c_char; 256];
        let n = unsafe { omega_last_error(buf.as_mut_ptr(), buf.len()) };
        let s = unsafe { CStr::from_ptr(buf.as_ptr()) }.to_string_lossy().into_owned();
        assert_eq!(s.len(), n.min(255));
        s
    }

    #[test]
    fn classifies_a_path() {
        let edges = [0u32, 1, 1, 2, 2, 3];
        let mut g = ptr::null_mut();
        unsafe {
            assert_eq!(omega_raag_graph_new(4, edges.as_ptr(), 3, &mut g), OmegaStatus::Ok);
            let mut c = OmegaBoundaryClass::Empty;
            assert_eq!(omega_raag_classify(g, &mut c), OmegaStatus::Ok);
            assert_eq!(c, OmegaBoundaryClass::OmegaCantor);
            omega_raag_graph_free(g);
        }
    }

    #[test]
    fn bad_edges_report_errors() {
        let edges = [0u32, 5];
        let mut g = ptr::null_mut();
        unsafe {
            assert_eq!(omega_raag_graph_new(2, edges.as_ptr(), 1, &mut g), OmegaStatus::Input);
            assert!(g.is_null());
            assert!(last_error().contains("0-5"));
            let loop_edge = [1u32, 1];
            assert_eq!(omega_raag_graph_new(2, loop_edge.as_ptr(), 1, &mut g), OmegaStatus::Input);
            assert_eq!(omega_raag_graph_new(2, ptr::null(), 1, &mut g), OmegaStatus::NullPointer);
            omega_raag_graph_free(ptr::null_mut());
        }
    }

    #[test]
    fn free_group_fit() {
        let mut b = ptr::null_mut();
        unsafe {
            assert_eq!(omega_ball_new(c"z_free_z".as_ptr(), 6, &mut b), OmegaStatus::Ok);
            assert_eq!(omega_ball_len(b), 1 + 4 * (3usize.pow(6) - 1) / 2);
            let mut k = 0.0;
            assert_eq!(omega_ball_fit(b, 1, 0, &mut k), OmegaStatus::Ok);
            assert_eq!(k, 1.0);
            omega_ball_free(b);
            assert_eq!(omega_ball_new(c"z_free_z".as_ptr(), 99, &mut b), OmegaStatus::Precondition);
            assert_eq!(omega_ball_new(c"nowhere.json".as_ptr(), 2, &mut b), OmegaStatus::Input);
        }
    }

    #[test]
    fn separation_constant() {
        let mut l = 0.0;
        unsafe {
            assert_eq!(omega_kleinian_lambda_sep(c"psl2_zi".as_ptr(), 0.01, &mut l), OmegaStatus::Ok);
            assert!(l > 0.0 && l < 1.0);
            assert_eq!(omega_kleinian_lambda_sep(c"psl2_zi".as_ptr(), 0.0, &mut l), OmegaStatus::Precondition);
        }
    }

    #[test]
    fn runs_and_exports() {
        let dir = tempfile::tempdir().unwrap();
        let graph = dir.path().join("p4.json");
        std::fs::write(&graph, r#"{"vertices":[0,1,2,3],"edges":[[0,1],[1,2],[2,3]]}"#).unwrap();
        let cfg = format!(r#"{{"version":1,"subcommand":"raag classify","graph":{:?}}}"#, graph.display().to_string());
        let cfg = CString::new(cfg).unwrap();
        let bundle = CString::new(dir.path().join("bundle").display().to_string()).unwrap();
        let mut run = ptr::null_mut();
        unsafe {
            assert_eq!(omega_run_json(cfg.as_ptr(), bundle.as_ptr(), &mut run), OmegaStatus::Ok);
            assert!(omega_run_passed(run));
            assert_eq!(omega_run_exit_code(run), 0);
            let m = omega_run_manifest_json(run);
            assert!(CStr::from_ptr(m).to_str().unwrap().contains("\"raag classify\""));
            omega_string_free(m);
            omega_run_free(run);

            let out = CString::new(dir.path().join("csv").display().to_string()).unwrap();
            let mut n = 0;
            assert_eq!(omega_export(bundle.as_ptr(), c"csv".as_ptr(), out.as_ptr(), &mut n), OmegaStatus::Ok);
            assert_eq!(n, 1);
            let csv = std::fs::read_to_string(dir.path().join("csv/classification.csv")).unwrap();
            assert!(csv.contains("OmegaCantor"));
            assert_eq!(omega_export(bundle.as_ptr(), c"pdf".as_ptr(), out.as_ptr(), &mut n), OmegaStatus::Usage);

            assert_eq!(omega_run_json(c"{}".as_ptr(), ptr::null(), &mut run), OmegaStatus::Config);
            assert!(last_error().contains("version"));
            assert_eq!(omega_run_json(ptr::null(), ptr::null(), &mut run), OmegaStatus::NullPointer);
        }
    }

    #[test]
    fn version_is_a_c_string() {
        let v = unsafe { CStr::from_ptr(omega_version()) };
        assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
    }
}
