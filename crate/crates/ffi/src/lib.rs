//! C ABI over `gnncost`.
//!
//! Graphs and fitted models cross the boundary as opaque handles that the
//! caller releases with the matching `*_free` function. Every fallible call
//! returns a [`GncStatus`]; on failure [`gnc_last_error_message`] describes
//! the error for the calling thread. Output pointers are written only on
//! success.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use gnncost::metrics::{compute_metrics, ClusteringMode, GraphMetrics};
use gnncost::regression::CompoundModel;
use gnncost::selector::choose_repr;
use gnncost::{Error, GnnModelKind, Graph, Representation};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GncStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    EmptyGraph = 4,
    InvalidArgument = 5,
    Io = 6,
    MissingFile = 7,
    Format = 8,
    Version = 9,
    Internal = 10,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GncModelKind {
    Gcn = 0,
    Gin = 1,
    Gat = 2,
    Sage = 3,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GncRepresentation {
    Sparse = 0,
    EdgeList = 1,
}

/// Graph metrics as plain values. `clustering_exact` records how
/// `mean_clustering` was obtained.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GncMetrics {
    pub node_count: u64,
    pub edge_count: u64,
    pub density: f64,
    pub max_degree: u64,
    pub min_degree: u64,
    pub mean_degree: f64,
    pub mean_clustering: f64,
    pub clustering_exact: bool,
}

/// Opaque graph handle.
pub struct GncGraph(Graph);

/// Opaque fitted-model handle.
pub struct GncModel(CompoundModel);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(err: &Error) -> GncStatus {
    match err {
        Error::Parse { .. } => GncStatus::Parse,
        Error::EmptyGraph => GncStatus::EmptyGraph,
        Error::Io(_) => GncStatus::Io,
        Error::MissingFile(_) => GncStatus::MissingFile,
        Error::Json(_) | Error::Csv(_) | Error::Toml(_) => GncStatus::Format,
        Error::Version { .. } => GncStatus::Version,
        _ => GncStatus::InvalidArgument,
    }
}

/// Runs `f`, converting errors and panics into a status code.
fn guard(f: impl FnOnce() -> Result<(), (GncStatus, String)>) -> GncStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => GncStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            GncStatus::Internal
        }
    }
}

fn lib(err: Error) -> (GncStatus, String) {
    (status_of(&err), err.to_string())
}

fn null(what: &str) -> (GncStatus, String) {
    (GncStatus::NullPointer, format!("{what} is null"))
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, (GncStatus, String)> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| (GncStatus::InvalidUtf8, format!("{what} is not valid UTF-8")))
}

unsafe fn out_arg<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, (GncStatus, String)> {
    p.as_mut().ok_or_else(|| null(what))
}

impl From<GnnModelKind> for GncModelKind {
    fn from(k: GnnModelKind) -> Self {
        match k {
            GnnModelKind::Gcn => GncModelKind::Gcn,
            GnnModelKind::Gin => GncModelKind::Gin,
            GnnModelKind::Gat => GncModelKind::Gat,
            GnnModelKind::Sage => GncModelKind::Sage,
        }
    }
}

impl From<Representation> for GncRepresentation {
    fn from(r: Representation) -> Self {
        match r {
            Representation::Sparse => GncRepresentation::Sparse,
            Representation::EdgeList => GncRepresentation::EdgeList,
        }
    }
}

impl From<&GraphMetrics> for GncMetrics {
    fn from(m: &GraphMetrics) -> Self {
        GncMetrics {
            node_count: m.node_count as u64,
            edge_count: m.edge_count as u64,
            density: m.density,
            max_degree: m.max_degree as u64,
            min_degree: m.min_degree as u64,
            mean_degree: m.mean_degree,
            mean_clustering: m.mean_clustering,
            clustering_exact: m.clustering_mode == ClusteringMode::Exact,
        }
    }
}

impl From<&GncMetrics> for GraphMetrics {
    fn from(m: &GncMetrics) -> Self {
        GraphMetrics {
            node_count: m.node_count as usize,
            edge_count: m.edge_count as usize,
            density: m.density,
            max_degree: m.max_degree as usize,
            min_degree: m.min_degree as usize,
            mean_degree: m.mean_degree,
            mean_clustering: m.mean_clustering,
            clustering_mode: if m.clustering_exact {
                ClusteringMode::Exact
            } else {
                ClusteringMode::default()
            },
        }
    }
}

/// Message for the last failed call on this thread, or null if none. The
/// pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn gnc_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn gnc_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Parses edge-list text (one `u v` pair per line).
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gnc_graph_parse(text: *const c_char, out: *mut *mut GncGraph) -> GncStatus {
    guard(|| {
        let text = str_arg(text, "text")?;
        let out = out_arg(out, "out")?;
        let g = gnncost::parse_edge_list(text).map_err(lib)?;
        *out = Box::into_raw(Box::new(GncGraph(g)));
        Ok(())
    })
}

/// Reads and parses an edge-list file.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gnc_graph_load(path: *const c_char, out: *mut *mut GncGraph) -> GncStatus {
    guard(|| {
        let path = Path::new(str_arg(path, "path")?);
        let out = out_arg(out, "out")?;
        if !path.exists() {
            return Err(lib(Error::MissingFile(path.to_path_buf())));
        }
        let text = std::fs::read_to_string(path).map_err(|e| lib(e.into()))?;
        let g = gnncost::parse_edge_list(&text).map_err(lib)?;
        *out = Box::into_raw(Box::new(GncGraph(g)));
        Ok(())
    })
}

/// # Safety
/// `graph` must come from `gnc_graph_parse`/`gnc_graph_load` or be null.
#[no_mangle]
pub unsafe extern "C" fn gnc_graph_free(graph: *mut GncGraph) {
    if !graph.is_null() {
        drop(Box::from_raw(graph));
    }
}

/// Node count, or 0 for a null handle.
///
/// # Safety
/// `graph` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn gnc_graph_node_count(graph: *const GncGraph) -> usize {
    graph.as_ref().map_or(0, |g| g.0.node_count())
}

/// Edge count, or 0 for a null handle.
///
/// # Safety
/// `graph` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn gnc_graph_edge_count(graph: *const GncGraph) -> usize {
    graph.as_ref().map_or(0, |g| g.0.edge_count())
}

/// Computes graph metrics. With `exact` false, clustering is estimated from
/// `trials` sampled wedges seeded by `seed`.
///
/// # Safety
/// `graph` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gnc_graph_metrics(
    graph: *const GncGraph,
    exact: bool,
    trials: usize,
    seed: u64,
    out: *mut GncMetrics,
) -> GncStatus {
    guard(|| {
        let g = graph.as_ref().ok_or_else(|| null("graph"))?;
        let out = out_arg(out, "out")?;
        let mode = if exact {
            ClusteringMode::Exact
        } else {
            ClusteringMode::Approx { trials, seed }
        };
        *out = (&compute_metrics(&g.0, mode).map_err(lib)?).into();
        Ok(())
    })
}

/// Loads a fitted model from its JSON file.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gnc_model_load(path: *const c_char, out: *mut *mut GncModel) -> GncStatus {
    guard(|| {
        let path = Path::new(str_arg(path, "path")?);
        let out = out_arg(out, "out")?;
        let m = CompoundModel::load(path).map_err(lib)?;
        *out = Box::into_raw(Box::new(GncModel(m)));
        Ok(())
    })
}

/// Builds a fitted model from JSON text.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gnc_model_from_json(json: *const c_char, out: *mut *mut GncModel) -> GncStatus {
    guard(|| {
        let json = str_arg(json, "json")?;
        let out = out_arg(out, "out")?;
        let m = CompoundModel::from_json(json).map_err(lib)?;
        *out = Box::into_raw(Box::new(GncModel(m)));
        Ok(())
    })
}

/// # Safety
/// `model` must come from `gnc_model_load`/`gnc_model_from_json` or be null.
#[no_mangle]
pub unsafe extern "C" fn gnc_model_free(model: *mut GncModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Model kind and representation the model was fitted for.
///
/// # Safety
/// `model` must be a live handle; `kind` and `repr` valid pointers.
#[no_mangle]
pub unsafe extern "C" fn gnc_model_design(
    model: *const GncModel,
    kind: *mut GncModelKind,
    repr: *mut GncRepresentation,
) -> GncStatus {
    guard(|| {
        let m = model.as_ref().ok_or_else(|| null("model"))?;
        *out_arg(kind, "kind")? = m.0.model.into();
        *out_arg(repr, "repr")? = m.0.repr.into();
        Ok(())
    })
}

/// Predicted per-epoch time in milliseconds, never negative.
///
/// # Safety
/// `model` must be a live handle; `metrics` and `out_ms` valid pointers.
#[no_mangle]
pub unsafe extern "C" fn gnc_model_predict(
    model: *const GncModel,
    metrics: *const GncMetrics,
    out_ms: *mut f64,
) -> GncStatus {
    guard(|| {
        let m = model.as_ref().ok_or_else(|| null("model"))?;
        let met = metrics.as_ref().ok_or_else(|| null("metrics"))?;
        let out = out_arg(out_ms, "out_ms")?;
        *out = m.0.predict(&met.into());
        Ok(())
    })
}

/// Faster representation for the given predictions; a tie picks sparse.
#[no_mangle]
pub extern "C" fn gnc_choose_repr(pred_sparse_ms: f64, pred_edge_list_ms: f64) -> GncRepresentation {
    choose_repr(pred_sparse_ms, pred_edge_list_ms).into()
}
