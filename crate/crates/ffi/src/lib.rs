//! C interface. Graphs and results are opaque handles; every fallible call
//! returns a [`GtfStatus`] and leaves a message for [`gtf_last_error`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use gtf::report::AnswerRecord;
use gtf::{DataGraph, EngineOptions, Error, KeywordConfig};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GtfStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    Io = 3,
    InvalidGraph = 4,
    KeywordNotFound = 5,
    TooFewKeywords = 6,
    QueueCapExceeded = 7,
    OutOfRange = 8,
    Internal = 9,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GtfEngine {
    Gtf = 0,
    Naive = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct GtfQueryOptions {
    pub engine: GtfEngine,
    /// 0 means all answers.
    pub top_k: usize,
    pub queue_cap: usize,
    pub essential: bool,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct GtfRunStats {
    pub pops: u64,
    pub inserts: u64,
    pub freezes: u64,
    pub unfreezes: u64,
    pub constructed_paths: u64,
    pub discarded_cyclic: u64,
    pub answers_emitted: u64,
    pub kroots_discovered: u64,
    pub wall_time_ns: u64,
}

/// A loaded, keyword-augmented graph.
pub struct GtfGraph {
    graph: DataGraph,
}

struct Emitted {
    height: u64,
    weight: u64,
    root: CString,
    json: CString,
}

/// Answers of one query, in emission order.
pub struct GtfResult {
    answers: Vec<Emitted>,
    stats: GtfRunStats,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: impl Into<String>) {
    let text = message.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(text).ok());
}

fn status_of(e: &Error) -> GtfStatus {
    match e {
        Error::Io(_) => GtfStatus::Io,
        Error::KeywordNotFound(_) => GtfStatus::KeywordNotFound,
        Error::TooFewKeywords => GtfStatus::TooFewKeywords,
        Error::QueueCapExceeded { .. } => GtfStatus::QueueCapExceeded,
        Error::Json(_)
        | Error::Invalid(_)
        | Error::NoNodes
        | Error::MalformedWeight(_)
        | Error::NonPositiveWeight(_) => GtfStatus::InvalidGraph,
        _ => GtfStatus::Internal,
    }
}

/// Runs `f`, turning errors and panics into a status plus message.
fn guarded(f: impl FnOnce() -> Result<(), GtfStatus>) -> GtfStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => GtfStatus::Ok,
        Ok(Err(status)) => status,
        Err(_) => {
            set_error("internal panic");
            GtfStatus::Internal
        }
    }
}

fn fail(e: Error) -> GtfStatus {
    set_error(e.to_string());
    status_of(&e)
}

unsafe fn str_arg<'a>(p: *const c_char, name: &str) -> Result<&'a str, GtfStatus> {
    if p.is_null() {
        set_error(format!("{name} is null"));
        return Err(GtfStatus::NullArgument);
    }
    CStr::from_ptr(p).to_str().map_err(|_| {
        set_error(format!("{name} is not valid UTF-8"));
        GtfStatus::InvalidUtf8
    })
}

fn null_arg(name: &str) -> GtfStatus {
    set_error(format!("{name} is null"));
    GtfStatus::NullArgument
}

/// The message of the last failed call on this thread, or null. Valid
/// until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn gtf_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

fn publish_graph(graph: DataGraph, out: *mut *mut GtfGraph) {
    let graph = graph.augment_keywords(&KeywordConfig::default());
    unsafe { *out = Box::into_raw(Box::new(GtfGraph { graph })) };
}

/// Parses a graph document.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gtf_graph_from_json(json: *const c_char, out: *mut *mut GtfGraph) -> GtfStatus {
    guarded(|| {
        if out.is_null() {
            return Err(null_arg("out"));
        }
        let text = str_arg(json, "json")?;
        let graph = DataGraph::from_json(text).map_err(fail)?;
        publish_graph(graph, out);
        Ok(())
    })
}

/// Loads a graph document from a file.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gtf_graph_load(path: *const c_char, out: *mut *mut GtfGraph) -> GtfStatus {
    guarded(|| {
        if out.is_null() {
            return Err(null_arg("out"));
        }
        let path = str_arg(path, "path")?;
        let graph = DataGraph::load(path).map_err(fail)?;
        publish_graph(graph, out);
        Ok(())
    })
}

/// # Safety
/// `graph` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn gtf_graph_free(graph: *mut GtfGraph) {
    if !graph.is_null() {
        drop(Box::from_raw(graph));
    }
}

/// Node count including keyword nodes; 0 for a null graph.
///
/// # Safety
/// `graph` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn gtf_graph_node_count(graph: *const GtfGraph) -> usize {
    graph.as_ref().map_or(0, |g| g.graph.node_count())
}

#[no_mangle]
pub extern "C" fn gtf_default_options() -> GtfQueryOptions {
    let opts = EngineOptions::default();
    GtfQueryOptions {
        engine: GtfEngine::Gtf,
        top_k: opts.top_k,
        queue_cap: opts.queue_cap,
        essential: opts.essential,
    }
}

/// Runs a query given as comma-separated keywords. `options` may be null
/// for the defaults.
///
/// # Safety
/// `graph` must be a live handle, `keywords` a NUL-terminated string and
/// `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gtf_query(
    graph: *const GtfGraph,
    keywords: *const c_char,
    options: *const GtfQueryOptions,
    out: *mut *mut GtfResult,
) -> GtfStatus {
    guarded(|| {
        let graph = &graph.as_ref().ok_or_else(|| null_arg("graph"))?.graph;
        if out.is_null() {
            return Err(null_arg("out"));
        }
        let keywords = str_arg(keywords, "keywords")?;
        let options = options.as_ref().copied().unwrap_or_else(|| gtf_default_options());
        let tokens: Vec<&str> = keywords.split(',').collect();
        let query = graph.resolve_query(&tokens).map_err(fail)?;
        let opts = EngineOptions {
            top_k: options.top_k,
            queue_cap: options.queue_cap,
            essential: options.essential,
        };
        let mut answers = Vec::new();
        let mut sink = |a: &gtf::Answer| {
            let record = AnswerRecord::new(graph, a, None);
            answers.push(Emitted {
                height: a.height.0,
                weight: a.total_weight.0,
                root: CString::new(record.root.clone()).unwrap_or_default(),
                json: CString::new(record.to_json()).unwrap_or_default(),
            });
        };
        let stats = match options.engine {
            GtfEngine::Gtf => gtf::run_gtf(graph, &query, opts, &mut sink),
            GtfEngine::Naive => gtf::run_naive(graph, &query, opts, &mut sink),
        }
        .map_err(fail)?;
        let stats = GtfRunStats {
            pops: stats.pops,
            inserts: stats.inserts,
            freezes: stats.freezes,
            unfreezes: stats.unfreezes,
            constructed_paths: stats.constructed_paths,
            discarded_cyclic: stats.discarded_cyclic,
            answers_emitted: stats.answers_emitted,
            kroots_discovered: stats.kroots_discovered,
            wall_time_ns: stats.wall_time_ns,
        };
        *out = Box::into_raw(Box::new(GtfResult { answers, stats }));
        Ok(())
    })
}

/// Number of answers; 0 for a null result.
///
/// # Safety
/// `result` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn gtf_result_len(result: *const GtfResult) -> usize {
    result.as_ref().map_or(0, |r| r.answers.len())
}

unsafe fn answer<'a>(result: *const GtfResult, index: usize) -> Result<&'a Emitted, GtfStatus> {
    let result = result.as_ref().ok_or_else(|| null_arg("result"))?;
    result.answers.get(index).ok_or_else(|| {
        set_error(format!("answer {index} out of range ({} answers)", result.answers.len()));
        GtfStatus::OutOfRange
    })
}

/// Height and total weight of answer `index`, in thousandths.
///
/// # Safety
/// `result` must be a live handle; the out pointers may be null.
#[no_mangle]
pub unsafe extern "C" fn gtf_result_weights(
    result: *const GtfResult,
    index: usize,
    height_milli: *mut u64,
    weight_milli: *mut u64,
) -> GtfStatus {
    guarded(|| {
        let a = answer(result, index)?;
        if !height_milli.is_null() {
            *height_milli = a.height;
        }
        if !weight_milli.is_null() {
            *weight_milli = a.weight;
        }
        Ok(())
    })
}

/// Root label of answer `index`. The string lives as long as `result`.
///
/// # Safety
/// `result` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gtf_result_root(result: *const GtfResult, index: usize, out: *mut *const c_char) -> GtfStatus {
    guarded(|| {
        if out.is_null() {
            return Err(null_arg("out"));
        }
        *out = answer(result, index)?.root.as_ptr();
        Ok(())
    })
}

/// Answer `index` as a JSON line. The string lives as long as `result`.
///
/// # Safety
/// `result` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gtf_result_json(result: *const GtfResult, index: usize, out: *mut *const c_char) -> GtfStatus {
    guarded(|| {
        if out.is_null() {
            return Err(null_arg("out"));
        }
        *out = answer(result, index)?.json.as_ptr();
        Ok(())
    })
}

/// # Safety
/// `result` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gtf_result_stats(result: *const GtfResult, out: *mut GtfRunStats) -> GtfStatus {
    guarded(|| {
        let result = result.as_ref().ok_or_else(|| null_arg("result"))?;
        if out.is_null() {
            return Err(null_arg("out"));
        }
        *out = result.stats;
        Ok(())
    })
}

/// # Safety
/// `result` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn gtf_result_free(result: *mut GtfResult) {
    if !result.is_null() {
        drop(Box::from_raw(result));
    }
}
