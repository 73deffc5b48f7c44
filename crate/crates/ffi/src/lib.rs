//! C ABI over the deeplinker resolver and annotation store.
//!
//! Every function returns a [`DlStatus`]; results come back through out
//! pointers. Strings passed in are NUL-terminated UTF-8. Strings and buffers
//! handed out are owned by the caller and released with [`dl_string_free`]
//! and [`dl_buffer_free`]. After a failure, [`dl_last_error_message`] describes
//! it for the calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::ptr;

use deeplinker::rdf::{BOOKMARK_CLASS, RDF_TYPE};
use deeplinker::service::{AnnotationForm, Reply, Service, ServiceConfig};
use deeplinker::DeepLink;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DlStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    /// The link text is not a valid deep link.
    ParseError = 3,
    /// Segment or param index past the end.
    OutOfRange = 4,
    /// The service could not be created (missing root, unreadable journal).
    StartFailed = 5,
    /// The request was answered with a non-success status.
    RequestFailed = 6,
    Panic = 7,
}

/// Opaque service handle.
pub struct DlService(Service);

/// Opaque parsed deep link.
pub struct DlLink(DeepLink);

/// Bytes of a representation and its media type.
#[repr(C)]
pub struct DlBuffer {
    pub data: *mut u8,
    pub len: usize,
    pub media_type: *mut c_char,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: impl Into<String>) {
    let msg = CString::new(message.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

struct Failure(DlStatus, String);

type FfiResult<T> = Result<T, Failure>;

fn guard(f: impl FnOnce() -> FfiResult<()>) -> DlStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => DlStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            DlStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> FfiResult<&'a str> {
    if p.is_null() {
        return Err(Failure(DlStatus::NullArgument, format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(DlStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn opt_str_arg<'a>(p: *const c_char, what: &str) -> FfiResult<Option<&'a str>> {
    if p.is_null() {
        Ok(None)
    } else {
        str_arg(p, what).map(Some)
    }
}

unsafe fn out<'a, T>(p: *mut T, what: &str) -> FfiResult<&'a mut T> {
    p.as_mut()
        .ok_or_else(|| Failure(DlStatus::NullArgument, format!("{what} is null")))
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> FfiResult<&'a T> {
    p.as_ref()
        .ok_or_else(|| Failure(DlStatus::NullArgument, format!("{what} is null")))
}

fn c_string(s: &str) -> *mut c_char {
    CString::new(s.replace('\0', " ")).unwrap_or_default().into_raw()
}

fn reply_status(reply: &Reply) -> FfiResult<()> {
    if (200..400).contains(&reply.status) {
        Ok(())
    } else {
        Err(Failure(
            DlStatus::RequestFailed,
            format!("answered {}: {}", reply.status, reply.body_text()),
        ))
    }
}

/// Creates a service over `root`, keeping uploads, the download cache and
/// the annotation journal under `state_dir`. `base_iri` may be null.
///
/// # Safety
/// String arguments must be null or NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn dl_service_new(
    root: *const c_char,
    state_dir: *const c_char,
    base_iri: *const c_char,
    out_service: *mut *mut DlService,
) -> DlStatus {
    guard(|| {
        let out_service = out(out_service, "out_service")?;
        *out_service = ptr::null_mut();
        let root = PathBuf::from(str_arg(root, "root")?);
        let state = PathBuf::from(str_arg(state_dir, "state_dir")?);
        let mut config = ServiceConfig::new(root, state);
        config.base_iri = opt_str_arg(base_iri, "base_iri")?.map(str::to_string);
        let service = Service::from_config(&config).map_err(|e| Failure(DlStatus::StartFailed, e.to_string()))?;
        *out_service = Box::into_raw(Box::new(DlService(service)));
        Ok(())
    })
}

/// # Safety
/// `service` must come from [`dl_service_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn dl_service_free(service: *mut DlService) {
    if !service.is_null() {
        drop(Box::from_raw(service));
    }
}

/// Resolves a serialized deep link and renders it for `accept` (null means
/// HTML). `out_http_status` receives the status the HTTP service would send;
/// the buffer holds the body even when resolution fails.
///
/// # Safety
/// Pointers must be valid; `out_buffer` is overwritten without being freed.
#[no_mangle]
pub unsafe extern "C" fn dl_service_resolve(
    service: *const DlService,
    path: *const c_char,
    accept: *const c_char,
    out_http_status: *mut u16,
    out_buffer: *mut DlBuffer,
) -> DlStatus {
    guard(|| {
        let buffer = out(out_buffer, "out_buffer")?;
        *buffer = DlBuffer {
            data: ptr::null_mut(),
            len: 0,
            media_type: ptr::null_mut(),
        };
        let status = out(out_http_status, "out_http_status")?;
        let service = handle(service, "service")?;
        let path = str_arg(path, "path")?;
        let accept = opt_str_arg(accept, "accept")?;
        let reply = service.0.get(path, accept);
        *status = reply.status;
        let mut body = reply.body.clone().into_boxed_slice();
        buffer.len = body.len();
        buffer.data = body.as_mut_ptr();
        std::mem::forget(body);
        buffer.media_type = c_string(&reply.media_type);
        reply_status(&reply)
    })
}

/// Attaches `subject predicate object` to the store. `subject` is a deep link
/// path or an IRI under the base IRI; `predicate` an IRI or a known prefixed
/// name; `object` is a literal unless `object_is_iri` is true.
///
/// # Safety
/// String arguments must be NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn dl_service_annotate(
    service: *const DlService,
    subject: *const c_char,
    predicate: *const c_char,
    object: *const c_char,
    object_is_iri: bool,
) -> DlStatus {
    guard(|| {
        let service = handle(service, "service")?;
        let form = AnnotationForm {
            subject: str_arg(subject, "subject")?.to_string(),
            predicate: str_arg(predicate, "predicate")?.to_string(),
            object: str_arg(object, "object")?.to_string(),
            object_type: Some(if object_is_iri { "iri" } else { "literal" }.to_string()),
        };
        reply_status(&service.0.annotate(&form))
    })
}

/// Bookmarks a deep link.
///
/// # Safety
/// `subject` must be NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn dl_service_bookmark(service: *const DlService, subject: *const c_char) -> DlStatus {
    guard(|| {
        let service = handle(service, "service")?;
        let form = AnnotationForm {
            subject: str_arg(subject, "subject")?.to_string(),
            predicate: RDF_TYPE.to_string(),
            object: BOOKMARK_CLASS.to_string(),
            object_type: Some("iri".into()),
        };
        reply_status(&service.0.annotate(&form))
    })
}

/// Case-insensitive literal search; `out_json` receives the results document.
///
/// # Safety
/// `needle` must be NUL-terminated; `out_json` writable.
#[no_mangle]
pub unsafe extern "C" fn dl_service_search(
    service: *const DlService,
    needle: *const c_char,
    out_json: *mut *mut c_char,
) -> DlStatus {
    guard(|| {
        let out_json = out(out_json, "out_json")?;
        *out_json = ptr::null_mut();
        let service = handle(service, "service")?;
        let reply = service.0.search(Some(str_arg(needle, "needle")?), Some("application/json"));
        reply_status(&reply)?;
        *out_json = c_string(&reply.body_text());
        Ok(())
    })
}

/// # Safety
/// `text` must be NUL-terminated; `out_link` writable.
#[no_mangle]
pub unsafe extern "C" fn dl_link_parse(text: *const c_char, out_link: *mut *mut DlLink) -> DlStatus {
    guard(|| {
        let out_link = out(out_link, "out_link")?;
        *out_link = ptr::null_mut();
        let link = DeepLink::parse(str_arg(text, "text")?).map_err(|e| Failure(DlStatus::ParseError, e.to_string()))?;
        *out_link = Box::into_raw(Box::new(DlLink(link)));
        Ok(())
    })
}

/// # Safety
/// `link` must come from [`dl_link_parse`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn dl_link_free(link: *mut DlLink) {
    if !link.is_null() {
        drop(Box::from_raw(link));
    }
}

/// Number of segments; 0 for a null handle.
///
/// # Safety
/// `link` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn dl_link_len(link: *const DlLink) -> usize {
    link.as_ref().map_or(0, |l| l.0.len())
}

fn segment(link: &DlLink, index: usize) -> FfiResult<&deeplinker::Segment> {
    link.0
        .segments()
        .get(index)
        .ok_or_else(|| Failure(DlStatus::OutOfRange, format!("segment {index} out of range")))
}

/// # Safety
/// `link` must be a live handle; `out_method` writable.
#[no_mangle]
pub unsafe extern "C" fn dl_link_method(link: *const DlLink, index: usize, out_method: *mut *mut c_char) -> DlStatus {
    guard(|| {
        let out_method = out(out_method, "out_method")?;
        *out_method = ptr::null_mut();
        *out_method = c_string(segment(handle(link, "link")?, index)?.method());
        Ok(())
    })
}

/// # Safety
/// `link` must be a live handle; `out_count` writable.
#[no_mangle]
pub unsafe extern "C" fn dl_link_param_count(link: *const DlLink, index: usize, out_count: *mut usize) -> DlStatus {
    guard(|| {
        let out_count = out(out_count, "out_count")?;
        *out_count = segment(handle(link, "link")?, index)?.params().len();
        Ok(())
    })
}

/// Decoded param `param` of segment `index`.
///
/// # Safety
/// `link` must be a live handle; `out_param` writable.
#[no_mangle]
pub unsafe extern "C" fn dl_link_param(
    link: *const DlLink,
    index: usize,
    param: usize,
    out_param: *mut *mut c_char,
) -> DlStatus {
    guard(|| {
        let out_param = out(out_param, "out_param")?;
        *out_param = ptr::null_mut();
        let seg = segment(handle(link, "link")?, index)?;
        let value = seg
            .params()
            .get(param)
            .ok_or_else(|| Failure(DlStatus::OutOfRange, format!("param {param} out of range")))?;
        *out_param = c_string(value);
        Ok(())
    })
}

/// Canonical serialization of the link.
///
/// # Safety
/// `link` must be a live handle; `out_text` writable.
#[no_mangle]
pub unsafe extern "C" fn dl_link_normalize(link: *const DlLink, out_text: *mut *mut c_char) -> DlStatus {
    guard(|| {
        let out_text = out(out_text, "out_text")?;
        *out_text = ptr::null_mut();
        *out_text = c_string(&handle(link, "link")?.0.serialize());
        Ok(())
    })
}

/// Message of the last failure on this thread, or null. Free with
/// [`dl_string_free`].
#[no_mangle]
pub extern "C" fn dl_last_error_message() -> *mut c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null_mut(), |m| m.clone().into_raw()))
}

/// # Safety
/// `s` must be null or a string returned by this library.
#[no_mangle]
pub unsafe extern "C" fn dl_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Releases the memory of a buffer filled by [`dl_service_resolve`].
///
/// # Safety
/// `buffer` must be null or point to a buffer filled by this library.
#[no_mangle]
pub unsafe extern "C" fn dl_buffer_free(buffer: *mut DlBuffer) {
    let Some(b) = buffer.as_mut() else {
        return;
    };
    if !b.data.is_null() {
        drop(Box::from_raw(ptr::slice_from_raw_parts_mut(b.data, b.len)));
    }
    dl_string_free(b.media_type);
    b.data = ptr::null_mut();
    b.len = 0;
    b.media_type = ptr::null_mut();
}
