//! Evaluation of deep links: a left fold of [`Resolver::apply_segment`]
//! over the segments, starting at a virtual root.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;
use std::time::UNIX_EPOCH;

use serde::{Deserialize, Serialize};

use crate::convert;
use crate::error::{ErrorCode, ResolveError, StepError};
use crate::fetch::{self, DownloadCache, Fetcher, HttpFetcher};
use crate::link::{DeepLink, Segment};
use crate::resource::sniff::{self, DIRECTORY, OCTET_STREAM};
use crate::resource::{
    Binary, FileArea, FileMeta, Item, Rect, Resource, ResourceKind, Target, Text, TextFocus,
    TextOrigin, Xmlish,
};
use crate::selector::Selector;
use crate::store::AnnotationStore;
use crate::xml::XmlDocument;

/// Names accepted as the first segment.
pub const ENTRIES: [&str; 3] = ["filesystem", "remote", "bookmarks"];

/// How many links a single resolution may follow through Collection or
/// Map items before giving up (bookmarks can point at bookmarks).
const MAX_LINK_DEPTH: usize = 8;

const METHODS: &[(&str, usize, usize)] = &[
    ("child", 1, 1),
    ("index", 1, 1),
    ("line", 1, 1),
    ("substring", 2, 2),
    ("rect", 4, 4),
    ("cssSelector", 1, 1),
    ("download", 1, 2),
    ("property", 1, 1),
    ("to", 1, 1),
];

/// Whether `method` applies to resources of `kind` at all.
pub fn supports(method: &str, kind: ResourceKind) -> bool {
    use ResourceKind as K;
    match method {
        "child" => matches!(kind, K::File | K::Collection | K::Map | K::Json | K::Remote),
        "index" => matches!(kind, K::Collection | K::Powerpoint | K::Json),
        "line" | "substring" => kind == K::String,
        "rect" => kind == K::Image,
        "cssSelector" => matches!(kind, K::Xmlish | K::PowerpointSlide),
        "download" => kind == K::Remote,
        "property" | "to" => true,
        _ => false,
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
struct UploadMeta {
    name: String,
    media_type: String,
    size: u64,
}

pub struct ResolverConfig {
    pub root: PathBuf,
    pub upload_dir: PathBuf,
    pub cache_dir: PathBuf,
    /// Scheme and authority that subject IRIs are built from.
    pub base_iri: String,
}

pub struct Resolver {
    root: PathBuf,
    uploads: PathBuf,
    cache: DownloadCache,
    base_iri: String,
    store: Arc<AnnotationStore>,
    fetcher: Box<dyn Fetcher>,
    content_reads: AtomicU64,
}

fn step(code: ErrorCode, detail: impl Into<String>) -> StepError {
    StepError::new(code, detail)
}

fn internal(e: io::Error) -> StepError {
    step(ErrorCode::Internal, e.to_string())
}

fn parse_index(raw: &str, what: &str) -> Result<usize, StepError> {
    if raw.is_empty() || !raw.bytes().all(|b| b.is_ascii_digit()) {
        return Err(step(
            ErrorCode::BadParamFormat,
            format!("{what} must be a non-negative base-10 integer, got {raw:?}"),
        ));
    }
    raw.parse()
        .map_err(|_| step(ErrorCode::IndexOutOfRange, format!("{what} {raw} is too large")))
}

fn modified_millis(meta: &fs::Metadata) -> i64 {
    meta.modified()
        .ok()
        .and_then(|t| t.duration_since(UNIX_EPOCH).ok())
        .map_or(0, |d| d.as_millis() as i64)
}

impl Resolver {
    /// Creates the upload and cache directories if needed; `root` must exist.
    pub fn new(config: ResolverConfig, store: Arc<AnnotationStore>) -> io::Result<Resolver> {
        Resolver::with_fetcher(config, store, Box::new(HttpFetcher::default()))
    }

    pub fn with_fetcher(
        config: ResolverConfig,
        store: Arc<AnnotationStore>,
        fetcher: Box<dyn Fetcher>,
    ) -> io::Result<Resolver> {
        let root = config.root.canonicalize()?;
        if !root.is_dir() {
            return Err(io::Error::new(
                io::ErrorKind::NotADirectory,
                format!("{} is not a directory", root.display()),
            ));
        }
        fs::create_dir_all(&config.upload_dir)?;
        fs::create_dir_all(&config.cache_dir)?;
        Ok(Resolver {
            root,
            uploads: config.upload_dir.canonicalize()?,
            cache: DownloadCache::new(config.cache_dir.canonicalize()?),
            base_iri: config.base_iri.trim_end_matches('/').to_string(),
            store,
            fetcher,
            content_reads: AtomicU64::new(0),
        })
    }

    pub fn root_dir(&self) -> &Path {
        &self.root
    }

    pub fn base_iri(&self) -> &str {
        &self.base_iri
    }

    pub fn store(&self) -> &Arc<AnnotationStore> {
        &self.store
    }

    pub fn cache(&self) -> &DownloadCache {
        &self.cache
    }

    /// Number of times file content has been read so far.
    pub fn content_reads(&self) -> u64 {
        self.content_reads.load(Ordering::Relaxed)
    }

    /// The page behind `GET /`: one link per entry.
    pub fn root_map(&self) -> Resource {
        Resource::Map(Arc::new(
            ENTRIES
                .iter()
                .map(|e| Item {
                    label: e.to_string(),
                    target: Target::Link(DeepLink::entry(e)),
                })
                .collect(),
        ))
    }

    pub fn root_resource(&self, entry: &str) -> Result<Resource, StepError> {
        match entry {
            "filesystem" => self.file_resource(&self.root, FileArea::Root, "").map(Resource::File),
            "remote" => Ok(Resource::Remote),
            "bookmarks" => self.bookmarks(),
            _ => Err(step(ErrorCode::NotFound, format!("no entry named {entry:?}"))),
        }
    }

    fn bookmarks(&self) -> Result<Resource, StepError> {
        let iris = self
            .store
            .list_bookmarks()
            .map_err(|e| step(ErrorCode::Internal, e.to_string()))?;
        let items = iris
            .into_iter()
            .filter_map(|iri| {
                let link = self.link_for_iri(&iri)?;
                Some(Item {
                    label: link.serialize(),
                    target: Target::Link(link),
                })
            })
            .collect();
        Ok(Resource::Collection(Arc::new(items)))
    }

    /// Absolute IRI naming `link`.
    pub fn subject_iri(&self, link: &DeepLink) -> String {
        crate::store::subject_iri(&self.base_iri, link)
    }

    /// Inverse of [`Resolver::subject_iri`] for IRIs under the base IRI.
    pub fn link_for_iri(&self, iri: &str) -> Option<DeepLink> {
        let path = iri.strip_prefix(&self.base_iri)?;
        if !path.starts_with('/') {
            return None;
        }
        DeepLink::parse(path).ok()
    }

    pub fn resolve(&self, link: &DeepLink) -> Result<Resource, ResolveError> {
        self.resolve_depth(link, 0)
    }

    fn resolve_depth(&self, link: &DeepLink, depth: usize) -> Result<Resource, ResolveError> {
        let segments = link.segments();
        let first = &segments[0];
        let mut current = if first.method() == "child" && first.params().len() == 1 {
            self.root_resource(&first.params()[0]).map_err(|e| e.at(0))?
        } else {
            self.apply(&self.root_map(), first, depth).map_err(|e| e.at(0))?
        };
        for (i, seg) in segments.iter().enumerate().skip(1) {
            current = self.apply(&current, seg, depth).map_err(|e| e.at(i))?;
        }
        Ok(current)
    }

    pub fn apply_segment(&self, resource: &Resource, segment: &Segment) -> Result<Resource, StepError> {
        self.apply(resource, segment, 0)
    }

    fn apply(&self, resource: &Resource, segment: &Segment, depth: usize) -> Result<Resource, StepError> {
        let method = segment.method();
        let params = segment.params();
        let Some(&(_, min, max)) = METHODS.iter().find(|(m, _, _)| *m == method) else {
            return Err(step(ErrorCode::UnknownMethod, format!("unknown method {method:?}")));
        };
        if params.len() < min || params.len() > max {
            let arity = if min == max { min.to_string() } else { format!("{min} or {max}") };
            return Err(step(
                ErrorCode::BadParamCount,
                format!("{method} takes {arity} parameter(s), got {}", params.len()),
            ));
        }
        let kind = resource.kind();
        if !supports(method, kind) {
            return Err(step(
                ErrorCode::UnsupportedMethodForKind,
                format!("{method} does not apply to {kind}"),
            ));
        }
        match method {
            "child" => self.child(resource, &params[0], depth),
            "index" => self.index(resource, &params[0], depth),
            "line" => line(resource, &params[0]),
            "substring" => substring(resource, &params[0], &params[1]),
            "rect" => rect(resource, params),
            "cssSelector" => css_selector(resource, &params[0]),
            "download" => self.download(&params[0], params.get(1).map_or("*/*", String::as_str)),
            "property" => resource
                .property(&params[0])
                .map(Resource::text)
                .ok_or_else(|| step(ErrorCode::NotFound, format!("no property {:?}", params[0]))),
            "to" => convert::convert(resource, &params[0]),
            _ => unreachable!("method table and dispatch agree"),
        }
    }

    fn follow(&self, target: &Target, depth: usize) -> Result<Resource, StepError> {
        match target {
            Target::Value(r) => Ok(r.clone()),
            Target::Link(link) if depth < MAX_LINK_DEPTH => {
                self.resolve_depth(link, depth + 1).map_err(|e| {
                    step(e.code, format!("following {link}: segment {}: {}", e.at_segment, e.detail))
                })
            }
            Target::Link(link) => Err(step(
                ErrorCode::NotFound,
                format!("too many nested links at {link}"),
            )),
        }
    }

    fn child(&self, resource: &Resource, name: &str, depth: usize) -> Result<Resource, StepError> {
        let missing = || step(ErrorCode::NotFound, format!("no child named {name:?}"));
        match resource {
            Resource::File(f) if f.is_directory => {
                let dir = f.absolute_path.clone();
                self.dir_child(&dir, f.area, name).map(Resource::File)
            }
            Resource::File(f) if name == "content" => self.content(f),
            Resource::File(_) => Err(missing()),
            Resource::Collection(items) | Resource::Map(items) => {
                let item = items.iter().find(|i| i.label == name).ok_or_else(missing)?;
                self.follow(&item.target, depth)
            }
            Resource::Json(v) => match v.as_ref() {
                serde_json::Value::Object(o) => o
                    .get(name)
                    .map(|v| Resource::Json(Arc::new(v.clone())))
                    .ok_or_else(missing),
                _ => Err(step(
                    ErrorCode::UnsupportedMethodForKind,
                    "child applies to JSON objects only",
                )),
            },
            Resource::Remote => self.upload(name),
            _ => Err(missing()),
        }
    }

    fn index(&self, resource: &Resource, raw: &str, depth: usize) -> Result<Resource, StepError> {
        let i = parse_index(raw, "index")?;
        let out_of_range =
            |len: usize| step(ErrorCode::IndexOutOfRange, format!("index {i} out of range 0..{len}"));
        match resource {
            Resource::Collection(items) => {
                let item = items.get(i).ok_or_else(|| out_of_range(items.len()))?;
                self.follow(&item.target, depth)
            }
            Resource::Powerpoint(p) => p
                .slides
                .get(i)
                .map(|s| Resource::PowerpointSlide(s.clone()))
                .ok_or_else(|| out_of_range(p.slides.len())),
            Resource::Json(v) => match v.as_ref() {
                serde_json::Value::Array(a) => a
                    .get(i)
                    .map(|v| Resource::Json(Arc::new(v.clone())))
                    .ok_or_else(|| out_of_range(a.len())),
                _ => Err(step(
                    ErrorCode::UnsupportedMethodForKind,
                    "index applies to JSON arrays only",
                )),
            },
            _ => unreachable!("checked by supports"),
        }
    }

    /// Metadata for `path`, which must already be inside its jail.
    fn file_resource(&self, path: &Path, area: FileArea, name: &str) -> Result<Arc<FileMeta>, StepError> {
        let meta = fs::metadata(path).map_err(internal)?;
        let jail = self.jail(area);
        let mut entries = Vec::new();
        if meta.is_dir() {
            for entry in fs::read_dir(path).map_err(internal)? {
                let entry = entry.map_err(internal)?;
                let Ok(entry_name) = entry.file_name().into_string() else {
                    continue;
                };
                // only list entries that resolve inside the jail
                let inside = entry
                    .path()
                    .canonicalize()
                    .is_ok_and(|p| p.starts_with(jail));
                if inside {
                    entries.push(entry_name);
                }
            }
            entries.sort();
        }
        let media_type = if meta.is_dir() {
            DIRECTORY.to_string()
        } else {
            sniff::from_extension(name).unwrap_or_else(|| OCTET_STREAM.to_string())
        };
        Ok(Arc::new(FileMeta {
            name: name.to_string(),
            absolute_path: path.to_path_buf(),
            size_bytes: if meta.is_dir() { 0 } else { meta.len() },
            modified: modified_millis(&meta),
            media_type,
            is_directory: meta.is_dir(),
            area,
            entries,
        }))
    }

    fn jail(&self, area: FileArea) -> &Path {
        match area {
            FileArea::Root => &self.root,
            FileArea::Uploads => &self.uploads,
            FileArea::Cache => self.cache.dir(),
        }
    }

    fn dir_child(&self, dir: &Path, area: FileArea, name: &str) -> Result<Arc<FileMeta>, StepError> {
        if name.is_empty() {
            return Err(step(ErrorCode::NotFound, "empty file name"));
        }
        if matches!(name, "." | "..") || name.contains(['/', '\0']) {
            return Err(step(
                ErrorCode::PathEscapesRoot,
                format!("{name:?} is not a plain file name"),
            ));
        }
        let path = dir.join(name);
        if fs::symlink_metadata(&path).is_err() {
            return Err(step(ErrorCode::NotFound, format!("no file named {name:?}")));
        }
        let canonical = path
            .canonicalize()
            .map_err(|_| step(ErrorCode::NotFound, format!("{name:?} is a dangling link")))?;
        if !canonical.starts_with(self.jail(area)) {
            return Err(step(
                ErrorCode::PathEscapesRoot,
                format!("{name:?} leads outside the served directory"),
            ));
        }
        self.file_resource(&canonical, area, name)
    }

    fn content(&self, file: &FileMeta) -> Result<Resource, StepError> {
        self.content_reads.fetch_add(1, Ordering::Relaxed);
        let bytes: Arc<[u8]> = fs::read(&file.absolute_path).map_err(internal)?.into();
        let media_type = sniff::sniff_magic(&bytes)
            .map(str::to_string)
            .unwrap_or_else(|| file.media_type.clone());
        Ok(Resource::Binary(Arc::new(Binary {
            bytes,
            media_type,
            name: Some(file.name.clone()),
        })))
    }

    fn download(&self, url: &str, accept: &str) -> Result<Resource, StepError> {
        let lower = url.to_ascii_lowercase();
        if !(lower.starts_with("http://") || lower.starts_with("https://")) || url.contains(char::is_whitespace) {
            return Err(step(
                ErrorCode::BadParamFormat,
                format!("download needs an absolute http(s) URL, got {url:?}"),
            ));
        }
        if accept.is_empty() || !accept.contains('/') {
            return Err(step(
                ErrorCode::BadParamFormat,
                format!("{accept:?} is not a media range"),
            ));
        }
        let entry = self
            .cache
            .get(self.fetcher.as_ref(), url, accept)
            .map_err(|e| step(ErrorCode::DownloadFailed, e))?;
        let name = url_file_name(url);
        let path = self.cache.blob_path(&entry.sha256);
        let meta = fs::metadata(&path).map_err(internal)?;
        let media_type = entry
            .media_type
            .filter(|m| !m.is_empty())
            .or_else(|| sniff::from_extension(&name))
            .unwrap_or_else(|| OCTET_STREAM.to_string());
        Ok(Resource::File(Arc::new(FileMeta {
            name,
            absolute_path: path,
            size_bytes: meta.len(),
            modified: entry.fetched,
            media_type,
            is_directory: false,
            area: FileArea::Cache,
            entries: Vec::new(),
        })))
    }

    fn upload(&self, name: &str) -> Result<Resource, StepError> {
        let missing = || step(ErrorCode::NotFound, format!("no upload named {name:?}"));
        if !fetch::is_hash_name(name) {
            return Err(missing());
        }
        let path = self.uploads.join(name);
        let sidecar = fs::read(self.uploads.join(format!("{name}.meta.json"))).map_err(|_| missing())?;
        let meta: UploadMeta = serde_json::from_slice(&sidecar)
            .map_err(|e| step(ErrorCode::Internal, format!("upload metadata: {e}")))?;
        let fs_meta = fs::metadata(&path).map_err(|_| missing())?;
        Ok(Resource::File(Arc::new(FileMeta {
            name: meta.name,
            absolute_path: path,
            size_bytes: fs_meta.len(),
            modified: modified_millis(&fs_meta),
            media_type: meta.media_type,
            is_directory: false,
            area: FileArea::Uploads,
            entries: Vec::new(),
        })))
    }

    /// Stores an uploaded file under its content hash and returns the link
    /// that resolves to it.
    pub fn store_upload(&self, name: &str, bytes: &[u8]) -> io::Result<DeepLink> {
        let hash = fetch::sha256_hex(bytes);
        let path = self.uploads.join(&hash);
        if !path.is_file() {
            fetch::write_atomic(&path, bytes)?;
        }
        let meta = UploadMeta {
            name: name.to_string(),
            media_type: sniff::sniff(bytes, Some(name), None),
            size: bytes.len() as u64,
        };
        let json = serde_json::to_vec_pretty(&meta).map_err(io::Error::other)?;
        fetch::write_atomic(&self.uploads.join(format!("{hash}.meta.json")), &json)?;
        Ok(DeepLink::entry("remote").append(Segment::child(hash)))
    }
}

/// Last non-empty path component of a URL, else its host.
fn url_file_name(url: &str) -> String {
    let rest = url.split_once("://").map_or(url, |(_, r)| r);
    let rest = rest.split(['?', '#']).next().unwrap_or(rest);
    let mut parts = rest.split('/').filter(|p| !p.is_empty());
    let host = parts.next().unwrap_or("download").to_string();
    parts.next_back().map_or(host, str::to_string)
}

fn text_of(resource: &Resource) -> &Text {
    match resource {
        Resource::String(t) => t,
        _ => unreachable!("checked by supports"),
    }
}

fn line(resource: &Resource, raw: &str) -> Result<Resource, StepError> {
    let t = text_of(resource);
    let i = parse_index(raw, "line")?;
    let lines = t.lines();
    let l = lines.get(i).ok_or_else(|| {
        step(
            ErrorCode::IndexOutOfRange,
            format!("line {i} out of range 0..{}", lines.len()),
        )
    })?;
    Ok(Resource::String(Text {
        text: Arc::from(*l),
        origin: Some(TextOrigin {
            full: t.text.clone(),
            focus: TextFocus::Line(i),
        }),
    }))
}

fn substring(resource: &Resource, start: &str, end: &str) -> Result<Resource, StepError> {
    let t = text_of(resource);
    let (start, end) = (parse_index(start, "start")?, parse_index(end, "end")?);
    if start > end {
        return Err(step(
            ErrorCode::BadParamFormat,
            format!("start {start} is after end {end}"),
        ));
    }
    let len = t.char_len();
    if end > len {
        return Err(step(
            ErrorCode::IndexOutOfRange,
            format!("range {start}..{end} exceeds length {len}"),
        ));
    }
    let s: String = t.text.chars().skip(start).take(end - start).collect();
    Ok(Resource::String(Text {
        text: s.into(),
        origin: Some(TextOrigin {
            full: t.text.clone(),
            focus: TextFocus::Range(start, end),
        }),
    }))
}

fn rect(resource: &Resource, params: &[String]) -> Result<Resource, StepError> {
    let Resource::Image(image) = resource else {
        unreachable!("checked by supports")
    };
    let mut v = [0u32; 4];
    for (slot, raw) in v.iter_mut().zip(params) {
        if raw.is_empty() || !raw.bytes().all(|b| b.is_ascii_digit()) {
            return Err(step(
                ErrorCode::BadParamFormat,
                format!("rect takes non-negative integers, got {raw:?}"),
            ));
        }
        *slot = raw
            .parse()
            .map_err(|_| step(ErrorCode::BadParamFormat, format!("{raw} is too large")))?;
    }
    let [x, y, width, height] = v;
    if width == 0 || height == 0 {
        return Err(step(ErrorCode::BadParamFormat, "rect width and height must be positive"));
    }
    if u64::from(x) + u64::from(width) > u64::from(image.width)
        || u64::from(y) + u64::from(height) > u64::from(image.height)
    {
        return Err(step(
            ErrorCode::BadParamFormat,
            format!(
                "rect {x},{y},{width},{height} exceeds the {}x{} image",
                image.width, image.height
            ),
        ));
    }
    Ok(Resource::Rect(Arc::new(Rect {
        x,
        y,
        width,
        height,
        image: image.clone(),
    })))
}

/// First match in the focused subtree; the focused element itself is a
/// candidate and the selector does not see its ancestors.
fn css_selector(resource: &Resource, raw: &str) -> Result<Resource, StepError> {
    let selector = Selector::parse(raw).map_err(|e| {
        step(
            ErrorCode::BadParamFormat,
            format!("selector {raw:?}: {} at position {}", e.message, e.position),
        )
    })?;
    let (doc, focus) = match resource {
        Resource::Xmlish(x) => (x.doc.clone(), x.focus.clone()),
        Resource::PowerpointSlide(s) => (
            Arc::new(XmlDocument::from_node(&convert::pptx::slide_to_svg(s))),
            Vec::new(),
        ),
        _ => unreachable!("checked by supports"),
    };
    let scope = doc.root.at_path(&focus).expect("focus path points into the document");
    let found = selector
        .select_first(scope, doc.mode)
        .ok_or_else(|| step(ErrorCode::SelectorNoMatch, format!("nothing matches {raw:?}")))?;
    let mut path = focus;
    path.extend(found);
    Ok(Resource::Xmlish(Xmlish {
        doc,
        focus: path,
        selected: true,
    }))
}
