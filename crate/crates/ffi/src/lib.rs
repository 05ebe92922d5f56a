//! C interface to the `pathrule` miner and predictor.
//!
//! Every function returns a [`PathruleStatus`]. On failure a message is kept
//! per thread and can be read with [`pathrule_last_error`]. Handles are
//! opaque and must be released with their `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::ptr;

use pathrule::eval::Experiment;
use pathrule::inference::Scorer;
use pathrule::{Aggregation, ColumnOrder, Dataset, EntityId, Error, Limit, MinerSettings, PathWeight, RuleBook};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PathruleStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    Io = 3,
    Parse = 4,
    UnknownName = 5,
    InvalidArgument = 6,
    BufferTooSmall = 7,
    Internal = 8,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PathruleAggregation {
    Sum = 0,
    Max = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PathrulePathWeight {
    Markov = 0,
    Length = 1,
    Constant = 2,
}

/// Mining parameters. A count of 0 means unlimited.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct PathruleMinerOptions {
    pub max_len: usize,
    pub alpha: usize,
    pub beta: usize,
    pub answer_cap: usize,
    pub seed: u64,
    pub path_weight: PathrulePathWeight,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct PathruleMetrics {
    pub mrr: f64,
    pub hits1: f64,
    pub hits3: f64,
    pub hits10: f64,
    pub queries: usize,
}

/// Loaded splits with their indexes.
pub struct PathruleGraph {
    dataset: Dataset,
    exp: Experiment,
}

/// Rules grouped by head relation.
pub struct PathruleRuleBook {
    book: RuleBook,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

struct Failure(PathruleStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::Io { .. } => PathruleStatus::Io,
            Error::Malformed { .. } | Error::EmptyFile(_) => PathruleStatus::Parse,
            Error::UnknownRelations(_) => PathruleStatus::UnknownName,
            Error::Inconsistent { .. } => PathruleStatus::Internal,
            _ => PathruleStatus::InvalidArgument,
        };
        Failure(status, e.to_string())
    }
}

fn fail<T>(status: PathruleStatus, msg: impl Into<String>) -> Result<T, Failure> {
    Err(Failure(status, msg.into()))
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> PathruleStatus {
    let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|panic| {
        let msg = panic
            .downcast_ref::<&str>()
            .map(|s| s.to_string())
            .or_else(|| panic.downcast_ref::<String>().cloned())
            .unwrap_or_else(|| "panic".into());
        fail(PathruleStatus::Internal, msg)
    });
    match outcome {
        Ok(()) => {
            LAST_ERROR.with(|e| e.borrow_mut().clear());
            PathruleStatus::Ok
        }
        Err(Failure(status, msg)) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = msg);
            status
        }
    }
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return fail(PathruleStatus::NullArgument, format!("{what} is null"));
    }
    CStr::from_ptr(p)
        .to_str()
        .or_else(|_| fail(PathruleStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn optional_path(p: *const c_char, what: &str) -> Result<Option<PathBuf>, Failure> {
    if p.is_null() {
        Ok(None)
    } else {
        text(p, what).map(|s| Some(PathBuf::from(s)))
    }
}

unsafe fn get<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref()
        .map_or_else(|| fail(PathruleStatus::NullArgument, format!("{what} is null")), Ok)
}

unsafe fn out<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    p.as_mut()
        .map_or_else(|| fail(PathruleStatus::NullArgument, format!("{what} is null")), Ok)
}

fn limit(n: usize) -> Limit {
    if n == 0 {
        Limit::Unlimited
    } else {
        Limit::At(n)
    }
}

fn aggregation(mode: PathruleAggregation) -> Aggregation {
    match mode {
        PathruleAggregation::Sum => Aggregation::Sum,
        PathruleAggregation::Max => Aggregation::Max,
    }
}

/// Copies `s` NUL-terminated into `buf` when it fits; `needed` receives the
/// byte length without the terminator.
unsafe fn copy_out(s: &str, buf: *mut c_char, cap: usize, needed: *mut usize) -> Result<(), Failure> {
    if !needed.is_null() {
        *needed = s.len();
    }
    if s.len() + 1 > cap || buf.is_null() {
        return fail(PathruleStatus::BufferTooSmall, format!("need {} bytes", s.len() + 1));
    }
    ptr::copy_nonoverlapping(s.as_ptr(), buf.cast::<u8>(), s.len());
    *buf.add(s.len()) = 0;
    Ok(())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn pathrule_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failed call on this thread. Returns the message
/// length; copies it when `buf` holds at least length + 1 bytes.
///
/// # Safety
/// `buf` must be null or valid for `cap` bytes.
#[no_mangle]
pub unsafe extern "C" fn pathrule_last_error(buf: *mut c_char, cap: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && cap > msg.len() {
            ptr::copy_nonoverlapping(msg.as_ptr(), buf.cast::<u8>(), msg.len());
            *buf.add(msg.len()) = 0;
        }
        msg.len()
    })
}

/// Loads tab-separated `subject relation object` files. `valid` and `test`
/// may be null.
///
/// # Safety
/// Path arguments must be null or NUL-terminated strings; `out` must be
/// valid for writes.
#[no_mangle]
pub unsafe extern "C" fn pathrule_graph_load(
    train: *const c_char,
    valid: *const c_char,
    test: *const c_char,
    out_graph: *mut *mut PathruleGraph,
) -> PathruleStatus {
    guard(|| {
        let slot = out(out_graph, "out_graph")?;
        let train = text(train, "train")?;
        let valid = optional_path(valid, "valid")?;
        let test = optional_path(test, "test")?;
        let dataset = Dataset::load(train, valid.as_deref(), test.as_deref(), ColumnOrder::Sro)?;
        let exp = Experiment::new(&dataset);
        *slot = Box::into_raw(Box::new(PathruleGraph { dataset, exp }));
        Ok(())
    })
}

/// # Safety
/// `graph` must be null or a handle from `pathrule_graph_load` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn pathrule_graph_free(graph: *mut PathruleGraph) {
    if !graph.is_null() {
        drop(Box::from_raw(graph));
    }
}

/// Entity, base relation and training fact counts (facts exclude inverses).
///
/// # Safety
/// `graph` must be a live handle; output pointers may be null.
#[no_mangle]
pub unsafe extern "C" fn pathrule_graph_counts(
    graph: *const PathruleGraph,
    entities: *mut usize,
    relations: *mut usize,
    train_facts: *mut usize,
) -> PathruleStatus {
    guard(|| {
        let g = get(graph, "graph")?;
        if let Some(e) = entities.as_mut() {
            *e = g.dataset.vocab.entity_count();
        }
        if let Some(r) = relations.as_mut() {
            *r = g.dataset.base_relation_count() as usize;
        }
        if let Some(f) = train_facts.as_mut() {
            *f = g.dataset.train.len();
        }
        Ok(())
    })
}

/// # Safety
/// `graph` must be a live handle, `name` a NUL-terminated string and `id`
/// valid for writes.
#[no_mangle]
pub unsafe extern "C" fn pathrule_entity_id(
    graph: *const PathruleGraph,
    name: *const c_char,
    id: *mut u32,
) -> PathruleStatus {
    guard(|| {
        let g = get(graph, "graph")?;
        let name = text(name, "name")?;
        let slot = out(id, "id")?;
        match g.dataset.vocab.entity_id(name) {
            Some(e) => {
                *slot = e.0;
                Ok(())
            }
            None => fail(PathruleStatus::UnknownName, format!("unknown entity `{name}`")),
        }
    })
}

/// Copies the name of entity `id` into `buf`. See [`pathrule_last_error`]
/// for the buffer convention; `needed` may be null.
///
/// # Safety
/// `graph` must be a live handle and `buf` valid for `cap` bytes.
#[no_mangle]
pub unsafe extern "C" fn pathrule_entity_name(
    graph: *const PathruleGraph,
    id: u32,
    buf: *mut c_char,
    cap: usize,
    needed: *mut usize,
) -> PathruleStatus {
    guard(|| {
        let g = get(graph, "graph")?;
        if id as usize >= g.dataset.vocab.entity_count() {
            return fail(PathruleStatus::InvalidArgument, format!("entity id {id} out of range"));
        }
        copy_out(g.dataset.vocab.entity_name(EntityId(id)), buf, cap, needed)
    })
}

/// Default mining parameters.
#[no_mangle]
pub extern "C" fn pathrule_miner_options_default() -> PathruleMinerOptions {
    let d = MinerSettings::default();
    PathruleMinerOptions {
        max_len: d.max_len,
        alpha: d.alpha.get().unwrap_or(0),
        beta: d.beta.get().unwrap_or(0),
        answer_cap: d.answer_cap.get().unwrap_or(0),
        seed: d.seed,
        path_weight: PathrulePathWeight::Markov,
    }
}

/// Mines rules from the training split. `options` may be null for defaults.
///
/// # Safety
/// `graph` must be a live handle, `options` null or valid, `out_book`
/// valid for writes.
#[no_mangle]
pub unsafe extern "C" fn pathrule_mine(
    graph: *const PathruleGraph,
    options: *const PathruleMinerOptions,
    out_book: *mut *mut PathruleRuleBook,
) -> PathruleStatus {
    guard(|| {
        let g = get(graph, "graph")?;
        let slot = out(out_book, "out_book")?;
        let o = options.as_ref().copied().unwrap_or_else(|| pathrule_miner_options_default());
        if o.max_len == 0 {
            return fail(PathruleStatus::InvalidArgument, "max_len must be at least 1");
        }
        let settings = MinerSettings {
            max_len: o.max_len,
            alpha: limit(o.alpha),
            beta: limit(o.beta),
            answer_cap: limit(o.answer_cap),
            seed: o.seed,
            weight: match o.path_weight {
                PathrulePathWeight::Markov => PathWeight::Markov,
                PathrulePathWeight::Length => PathWeight::Length,
                PathrulePathWeight::Constant => PathWeight::Constant,
            },
        };
        let book = g.exp.mine(&settings);
        *slot = Box::into_raw(Box::new(PathruleRuleBook { book }));
        Ok(())
    })
}

/// Reads a rule TSV file against the graph's vocabulary.
///
/// # Safety
/// `graph` must be a live handle, `path` a NUL-terminated string and
/// `out_book` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn pathrule_rulebook_load(
    graph: *const PathruleGraph,
    path: *const c_char,
    out_book: *mut *mut PathruleRuleBook,
) -> PathruleStatus {
    guard(|| {
        let g = get(graph, "graph")?;
        let path = text(path, "path")?;
        let slot = out(out_book, "out_book")?;
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        let book = RuleBook::read_tsv(BufReader::new(file), &g.dataset.vocab)?;
        *slot = Box::into_raw(Box::new(PathruleRuleBook { book }));
        Ok(())
    })
}

/// Writes the rules as TSV.
///
/// # Safety
/// Handles must be live and `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn pathrule_rulebook_save(
    graph: *const PathruleGraph,
    book: *const PathruleRuleBook,
    path: *const c_char,
) -> PathruleStatus {
    guard(|| {
        let g = get(graph, "graph")?;
        let b = get(book, "book")?;
        let path = text(path, "path")?;
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = BufWriter::new(file);
        b.book
            .write_tsv(&mut w, &g.dataset.vocab)
            .and_then(|_| w.flush())
            .map_err(|e| Error::io(path, e))?;
        Ok(())
    })
}

/// # Safety
/// `book` must be a live handle and `len` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn pathrule_rulebook_len(book: *const PathruleRuleBook, len: *mut usize) -> PathruleStatus {
    guard(|| {
        *out(len, "len")? = get(book, "book")?.book.len();
        Ok(())
    })
}

/// # Safety
/// `book` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn pathrule_rulebook_free(book: *mut PathruleRuleBook) {
    if !book.is_null() {
        drop(Box::from_raw(book));
    }
}

/// Ranks answers of `(subject, relation, ?)` with the top `k` rules per head
/// (0 = all). Writes up to `cap` entity ids and scores, best first, and the
/// number written to `written`. `relation` may name an inverse as `INV_r`.
///
/// # Safety
/// Handles must be live, `relation` a NUL-terminated string, `entities` and
/// `scores` valid for `cap` elements, `written` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn pathrule_predict(
    graph: *const PathruleGraph,
    book: *const PathruleRuleBook,
    subject: u32,
    relation: *const c_char,
    k: usize,
    mode: PathruleAggregation,
    entities: *mut u32,
    scores: *mut f64,
    cap: usize,
    written: *mut usize,
) -> PathruleStatus {
    guard(|| {
        let g = get(graph, "graph")?;
        let b = get(book, "book")?;
        let name = text(relation, "relation")?;
        let count = out(written, "written")?;
        if cap > 0 && (entities.is_null() || scores.is_null()) {
            return fail(PathruleStatus::NullArgument, "output arrays are null");
        }
        if subject as usize >= g.dataset.vocab.entity_count() {
            return fail(PathruleStatus::InvalidArgument, format!("entity id {subject} out of range"));
        }
        let Some(rel) = g.dataset.vocab.relation_id(name) else {
            return fail(PathruleStatus::UnknownName, format!("unknown relation `{name}`"));
        };
        let k = if k == 0 { usize::MAX } else { k };
        let scored = Scorer::new(&g.exp.train, &b.book, k, aggregation(mode)).score(EntityId(subject), rel);
        let ranked = scored.ranked();
        let n = ranked.len().min(cap);
        for (i, c) in ranked.iter().take(n).enumerate() {
            *entities.add(i) = c.entity.0;
            *scores.add(i) = c.score;
        }
        *count = n;
        Ok(())
    })
}

/// Filtered MRR and Hits@{1,3,10} over the graph's test split.
///
/// # Safety
/// Handles must be live and `metrics` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn pathrule_evaluate(
    graph: *const PathruleGraph,
    book: *const PathruleRuleBook,
    k: usize,
    mode: PathruleAggregation,
    metrics: *mut PathruleMetrics,
) -> PathruleStatus {
    guard(|| {
        let g = get(graph, "graph")?;
        let b = get(book, "book")?;
        let slot = out(metrics, "metrics")?;
        let m = g.exp.evaluate(&b.book, limit(k), aggregation(mode))?;
        *slot = PathruleMetrics {
            mrr: m.mrr,
            hits1: m.hits_at(1),
            hits3: m.hits_at(3),
            hits10: m.hits_at(10),
            queries: m.queries,
        };
        Ok(())
    })
}
