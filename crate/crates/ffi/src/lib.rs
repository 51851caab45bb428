//! C ABI over the offspring engine.
//!
//! Every object is an opaque handle created by an `ofs_*_new` function and
//! released by the matching `ofs_*_free`. Fallible calls return an
//! [`OfsStatus`]; on failure `ofs_last_error` returns a message that stays
//! valid on the calling thread until its next failing call. Buffers are
//! filled row-major and never partially: when a buffer is too small the call
//! returns `OFS_STATUS_BUFFER_TOO_SMALL` and reports the needed length.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::ptr;

use offspring::engine::{evolve_run, EngineParams, EngineResult, StartPopulation};
use offspring::harness::{run_experiment, ExperimentConfig};
use offspring::objective::{InsertOutcome, ObjectiveVector, ParetoArchive, Solution};
use offspring::problems::Problem;
use offspring::topology::{NetworkTopology, TopologySpec};
use offspring::Error;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OfsStatus {
    Ok = 0,
    /// A required pointer argument was NULL.
    NullArgument = 1,
    InvalidArgument = 2,
    UnknownProblem = 3,
    Config = 4,
    /// I/O, executor or protocol failure.
    Runtime = 5,
    BufferTooSmall = 6,
    /// A Rust panic was caught at the boundary.
    Panic = 7,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OfsTopologyKind {
    /// `int_a` != 0 wraps the lattice into a torus.
    Lattice = 0,
    /// `int_a` = k, `probability` = rewiring probability.
    SmallWorld = 1,
    /// `int_a` = m0, `int_b` = m.
    ScaleFree = 2,
    /// `probability` = edge probability.
    Random = 3,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OfsInsertOutcome {
    Accepted = 0,
    /// Accepted, and another member was truncated to make room.
    AcceptedWithTruncation = 1,
    /// Accepted, then truncated again because it was the weakest member.
    CandidateTruncated = 2,
    RejectedDominated = 3,
    RejectedDuplicate = 4,
}

pub struct OfsProblem {
    inner: Problem,
}

pub struct OfsTopology {
    inner: NetworkTopology,
}

pub struct OfsArchive {
    inner: ParetoArchive,
}

pub struct OfsRun {
    inner: EngineResult,
    objectives: usize,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure(OfsStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::UnknownProblem(_) => OfsStatus::UnknownProblem,
            Error::Config(_) => OfsStatus::Config,
            Error::Contract(_) => OfsStatus::InvalidArgument,
            _ => OfsStatus::Runtime,
        };
        Failure(status, e.to_string())
    }
}

fn fail(status: OfsStatus, msg: impl Into<String>) -> Failure {
    Failure(status, msg.into())
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior NULs replaced");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> OfsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => OfsStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_last_error(msg);
            status
        }
        Err(panic) => {
            let msg = panic
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| panic.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            set_last_error(format!("panic: {msg}"));
            OfsStatus::Panic
        }
    }
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| fail(OfsStatus::NullArgument, format!("{what} is NULL")))
}

unsafe fn handle_mut<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| fail(OfsStatus::NullArgument, format!("{what} is NULL")))
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(fail(OfsStatus::NullArgument, format!("{what} is NULL")));
    }
    CStr::from_ptr(p).to_str().map_err(|_| fail(OfsStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

unsafe fn slice<'a>(p: *const f64, len: usize, what: &str) -> Result<&'a [f64], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(fail(OfsStatus::NullArgument, format!("{what} is NULL")));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn put<T>(out: *mut T, value: T, what: &str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(fail(OfsStatus::NullArgument, format!("{what} is NULL")));
    }
    out.write(value);
    Ok(())
}

unsafe fn put_handle<T>(out: *mut *mut T, value: T) -> Result<(), Failure> {
    put(out, Box::into_raw(Box::new(value)), "out")
}

/// Copies `values` to `buf` if it holds them all; always reports the length.
unsafe fn copy_out<T: Copy>(values: &[T], buf: *mut T, capacity: usize, written: *mut usize) -> Result<(), Failure> {
    put(written, values.len(), "written")?;
    if values.len() > capacity {
        return Err(fail(
            OfsStatus::BufferTooSmall,
            format!("need room for {} values, buffer holds {capacity}", values.len()),
        ));
    }
    if !values.is_empty() {
        if buf.is_null() {
            return Err(fail(OfsStatus::NullArgument, "buffer is NULL"));
        }
        ptr::copy_nonoverlapping(values.as_ptr(), buf, values.len());
    }
    Ok(())
}

unsafe fn free<T>(p: *mut T) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Message of the last failing call on this thread, or NULL.
#[no_mangle]
pub extern "C" fn ofs_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn ofs_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Looks up a benchmark problem by name (`zdt1`..`zdt6`, `dtlz1`..`dtlz6`).
#[no_mangle]
pub unsafe extern "C" fn ofs_problem_new(name: *const c_char, out: *mut *mut OfsProblem) -> OfsStatus {
    guard(|| {
        let inner = Problem::by_name(text(name, "name")?)?;
        put_handle(out, OfsProblem { inner })
    })
}

#[no_mangle]
pub unsafe extern "C" fn ofs_problem_free(problem: *mut OfsProblem) {
    free(problem);
}

/// Number of decision variables, or 0 for NULL.
#[no_mangle]
pub unsafe extern "C" fn ofs_problem_decision_count(problem: *const OfsProblem) -> usize {
    problem.as_ref().map_or(0, |p| p.inner.decision_count())
}

/// Number of objectives, or 0 for NULL.
#[no_mangle]
pub unsafe extern "C" fn ofs_problem_objective_count(problem: *const OfsProblem) -> usize {
    problem.as_ref().map_or(0, |p| p.inner.objective_count())
}

/// Evaluates one genome of `decision_count` genes into `objective_count`
/// values.
#[no_mangle]
pub unsafe extern "C" fn ofs_problem_evaluate(
    problem: *const OfsProblem,
    genome: *const f64,
    genome_len: usize,
    objectives: *mut f64,
    capacity: usize,
    written: *mut usize,
) -> OfsStatus {
    guard(|| {
        let p = handle(problem, "problem")?;
        let values = p.inner.evaluate(slice(genome, genome_len, "genome")?)?;
        copy_out(values.values(), objectives, capacity, written)
    })
}

/// Builds a topology of `node_count` nodes. See [`OfsTopologyKind`] for how
/// `int_a`, `int_b` and `probability` are read.
#[no_mangle]
pub unsafe extern "C" fn ofs_topology_new(
    kind: OfsTopologyKind,
    node_count: usize,
    int_a: usize,
    int_b: usize,
    probability: f64,
    seed: u64,
    out: *mut *mut OfsTopology,
) -> OfsStatus {
    guard(|| {
        let spec = match kind {
            OfsTopologyKind::Lattice => TopologySpec::Lattice { wrap: int_a != 0 },
            OfsTopologyKind::SmallWorld => TopologySpec::SmallWorld { k: int_a, p: probability },
            OfsTopologyKind::ScaleFree => TopologySpec::ScaleFree { m0: int_a, m: int_b },
            OfsTopologyKind::Random => TopologySpec::Random { p: probability },
        };
        let inner = spec.build(node_count, seed)?;
        put_handle(out, OfsTopology { inner })
    })
}

#[no_mangle]
pub unsafe extern "C" fn ofs_topology_free(topology: *mut OfsTopology) {
    free(topology);
}

#[no_mangle]
pub unsafe extern "C" fn ofs_topology_node_count(topology: *const OfsTopology) -> usize {
    topology.as_ref().map_or(0, |t| t.inner.node_count())
}

#[no_mangle]
pub unsafe extern "C" fn ofs_topology_edge_count(topology: *const OfsTopology) -> usize {
    topology.as_ref().map_or(0, |t| t.inner.edge_count())
}

/// Sorted neighbor ids of `node`.
#[no_mangle]
pub unsafe extern "C" fn ofs_topology_neighbors(
    topology: *const OfsTopology,
    node: usize,
    buf: *mut usize,
    capacity: usize,
    written: *mut usize,
) -> OfsStatus {
    guard(|| {
        let t = handle(topology, "topology")?;
        copy_out(t.inner.neighborhood(node)?, buf, capacity, written)
    })
}

/// Archive of at most `capacity` members; 0 means unbounded.
#[no_mangle]
pub unsafe extern "C" fn ofs_archive_new(capacity: usize, out: *mut *mut OfsArchive) -> OfsStatus {
    guard(|| {
        let inner = if capacity == 0 { ParetoArchive::unbounded() } else { ParetoArchive::new(capacity)? };
        put_handle(out, OfsArchive { inner })
    })
}

#[no_mangle]
pub unsafe extern "C" fn ofs_archive_free(archive: *mut OfsArchive) {
    free(archive);
}

/// Offers one objective vector to the archive.
#[no_mangle]
pub unsafe extern "C" fn ofs_archive_insert(
    archive: *mut OfsArchive,
    objectives: *const f64,
    len: usize,
    outcome: *mut OfsInsertOutcome,
) -> OfsStatus {
    guard(|| {
        let a = handle_mut(archive, "archive")?;
        let values = ObjectiveVector::new(slice(objectives, len, "objectives")?.to_vec())?;
        let result = match a.inner.insert_solution(Solution { genome: Vec::new(), objectives: values })? {
            InsertOutcome::Accepted => OfsInsertOutcome::Accepted,
            InsertOutcome::AcceptedWithTruncation { candidate_kept: true } => OfsInsertOutcome::AcceptedWithTruncation,
            InsertOutcome::AcceptedWithTruncation { candidate_kept: false } => OfsInsertOutcome::CandidateTruncated,
            InsertOutcome::RejectedDominated => OfsInsertOutcome::RejectedDominated,
            InsertOutcome::RejectedDuplicate => OfsInsertOutcome::RejectedDuplicate,
        };
        if !outcome.is_null() {
            outcome.write(result);
        }
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn ofs_archive_len(archive: *const OfsArchive) -> usize {
    archive.as_ref().map_or(0, |a| a.inner.len())
}

/// Members' objective vectors, row-major.
#[no_mangle]
pub unsafe extern "C" fn ofs_archive_objectives(
    archive: *const OfsArchive,
    buf: *mut f64,
    capacity: usize,
    written: *mut usize,
) -> OfsStatus {
    guard(|| {
        let a = handle(archive, "archive")?;
        let flat: Vec<f64> = a.inner.members().iter().flat_map(|m| m.objectives.values().to_vec()).collect();
        copy_out(&flat, buf, capacity, written)
    })
}

/// Runs the serial engine for `generations` steps from a random population
/// with default operator settings.
#[no_mangle]
pub unsafe extern "C" fn ofs_run_new(
    problem: *const OfsProblem,
    topology: *const OfsTopology,
    generations: u32,
    seed: u64,
    out: *mut *mut OfsRun,
) -> OfsStatus {
    guard(|| {
        let p = handle(problem, "problem")?;
        let t = handle(topology, "topology")?;
        let params = EngineParams { generations, seed, ..EngineParams::default() };
        let inner = evolve_run(&p.inner, &t.inner, &params, StartPopulation::Random)?;
        put_handle(out, OfsRun { inner, objectives: p.inner.objective_count() })
    })
}

#[no_mangle]
pub unsafe extern "C" fn ofs_run_free(run: *mut OfsRun) {
    free(run);
}

/// Number of points in the final archived front.
#[no_mangle]
pub unsafe extern "C" fn ofs_run_front_len(run: *const OfsRun) -> usize {
    run.as_ref().map_or(0, |r| r.inner.front.len())
}

#[no_mangle]
pub unsafe extern "C" fn ofs_run_objective_count(run: *const OfsRun) -> usize {
    run.as_ref().map_or(0, |r| r.objectives)
}

/// Wall time spent inside the engine, in seconds.
#[no_mangle]
pub unsafe extern "C" fn ofs_run_pure_seconds(run: *const OfsRun) -> f64 {
    run.as_ref().map_or(0.0, |r| r.inner.pure_execution_time.as_secs_f64())
}

/// Front objective vectors, row-major.
#[no_mangle]
pub unsafe extern "C" fn ofs_run_front(
    run: *const OfsRun,
    buf: *mut f64,
    capacity: usize,
    written: *mut usize,
) -> OfsStatus {
    guard(|| {
        let r = handle(run, "run")?;
        let flat: Vec<f64> = r.inner.front.iter().flat_map(|s| s.objectives.values().to_vec()).collect();
        copy_out(&flat, buf, capacity, written)
    })
}

/// Runs a full experiment from `key = value` config text, as the `run`
/// command does. A non-NULL `output_dir` overrides the configured one.
#[no_mangle]
pub unsafe extern "C" fn ofs_experiment_run(config_text: *const c_char, output_dir: *const c_char) -> OfsStatus {
    guard(|| {
        let mut cfg = ExperimentConfig::parse(text(config_text, "config_text")?)?;
        if !output_dir.is_null() {
            cfg.output_dir = PathBuf::from(text(output_dir, "output_dir")?);
        }
        run_experiment(&cfg)?;
        Ok(())
    })
}
