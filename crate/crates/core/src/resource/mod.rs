//! The fourteen resource kinds a deep link can resolve to.
//!
//! A [`Resource`] is an immutable snapshot: everything a page needs
//! (directory listings, decoded bytes, parsed trees) is captured when the
//! link is resolved, so properties and child links are pure functions.

pub mod image;
pub mod sniff;

use std::fmt;
use std::path::PathBuf;
use std::sync::Arc;

use crate::convert;
use crate::link::{DeepLink, Segment};
use crate::rdf::Triple;
use crate::xml::{XmlDocument, XmlNode};

pub use image::ImageFormat;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ResourceKind {
    Collection,
    Map,
    File,
    String,
    Json,
    Image,
    Pdf,
    Powerpoint,
    PowerpointSlide,
    Rdf,
    Binary,
    Rect,
    Xmlish,
    Remote,
}

impl ResourceKind {
    pub const ALL: [ResourceKind; 14] = [
        ResourceKind::Collection,
        ResourceKind::Map,
        ResourceKind::File,
        ResourceKind::String,
        ResourceKind::Json,
        ResourceKind::Image,
        ResourceKind::Pdf,
        ResourceKind::Powerpoint,
        ResourceKind::PowerpointSlide,
        ResourceKind::Rdf,
        ResourceKind::Binary,
        ResourceKind::Rect,
        ResourceKind::Xmlish,
        ResourceKind::Remote,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ResourceKind::Collection => "Collection",
            ResourceKind::Map => "Map",
            ResourceKind::File => "File",
            ResourceKind::String => "String",
            ResourceKind::Json => "Json",
            ResourceKind::Image => "Image",
            ResourceKind::Pdf => "Pdf",
            ResourceKind::Powerpoint => "Powerpoint",
            ResourceKind::PowerpointSlide => "PowerpointSlide",
            ResourceKind::Rdf => "Rdf",
            ResourceKind::Binary => "Binary",
            ResourceKind::Rect => "Rect",
            ResourceKind::Xmlish => "Xmlish",
            ResourceKind::Remote => "Remote",
        }
    }
}

impl fmt::Display for ResourceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Which jail a file path belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FileArea {
    Root,
    Uploads,
    Cache,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FileMeta {
    pub name: String,
    pub absolute_path: PathBuf,
    pub size_bytes: u64,
    /// Epoch milliseconds, UTC.
    pub modified: i64,
    pub media_type: String,
    pub is_directory: bool,
    pub area: FileArea,
    /// Directory listing captured at resolution time, sorted by byte order.
    /// Only entries that stay inside the jail are listed.
    pub entries: Vec<String>,
}

/// Which part of a larger text a `String` resource was cut from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TextFocus {
    /// Zero-based line index.
    Line(usize),
    /// Half-open range in Unicode scalar positions.
    Range(usize, usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TextOrigin {
    pub full: Arc<str>,
    pub focus: TextFocus,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Text {
    pub text: Arc<str>,
    pub origin: Option<TextOrigin>,
}

impl Text {
    pub fn new(text: impl Into<Arc<str>>) -> Text {
        Text {
            text: text.into(),
            origin: None,
        }
    }

    pub fn lines(&self) -> Vec<&str> {
        split_lines(&self.text)
    }

    pub fn char_len(&self) -> usize {
        self.text.chars().count()
    }
}

/// Lines split on `\n` with a preceding `\r` dropped; a final newline does
/// not start another line.
pub fn split_lines(text: &str) -> Vec<&str> {
    if text.is_empty() {
        return Vec::new();
    }
    let body = text.strip_suffix('\n').unwrap_or(text);
    body.split('\n')
        .map(|l| l.strip_suffix('\r').unwrap_or(l))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Image {
    pub format: ImageFormat,
    pub width: u32,
    pub height: u32,
    pub bytes: Arc<[u8]>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pdf {
    pub version: String,
    /// Count of page objects found by a plain scan; compressed object
    /// streams are not inspected.
    pub page_count_estimate: usize,
    pub bytes: Arc<[u8]>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Presentation {
    /// Slide size in EMU.
    pub slide_size: (i64, i64),
    pub slides: Vec<Arc<Slide>>,
    pub bytes: Arc<[u8]>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Slide {
    /// One-based slide number.
    pub number: usize,
    pub part_name: String,
    pub xml: Arc<XmlDocument>,
    pub slide_size: (i64, i64),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Binary {
    pub bytes: Arc<[u8]>,
    pub media_type: String,
    /// Name of the file the bytes came from, if any.
    pub name: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rect {
    pub x: u32,
    pub y: u32,
    pub width: u32,
    pub height: u32,
    pub image: Arc<Image>,
}

/// An element inside a parsed document. `focus` is the element-child path
/// from the document root; an empty path is the root itself.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Xmlish {
    pub doc: Arc<XmlDocument>,
    pub focus: Vec<usize>,
    /// Whether `focus` was chosen by a selector (and should be highlighted).
    pub selected: bool,
}

impl Xmlish {
    pub fn whole(doc: XmlDocument) -> Xmlish {
        Xmlish {
            doc: Arc::new(doc),
            focus: Vec::new(),
            selected: false,
        }
    }

    pub fn node(&self) -> &XmlNode {
        self.doc
            .root
            .at_path(&self.focus)
            .expect("focus path points into the document")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Target {
    /// A deep link resolved on demand (bookmarks, entry points).
    Link(DeepLink),
    Value(Resource),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Item {
    pub label: String,
    pub target: Target,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Resource {
    Collection(Arc<Vec<Item>>),
    Map(Arc<Vec<Item>>),
    File(Arc<FileMeta>),
    String(Text),
    Json(Arc<serde_json::Value>),
    Image(Arc<Image>),
    Pdf(Arc<Pdf>),
    Powerpoint(Arc<Presentation>),
    PowerpointSlide(Arc<Slide>),
    Rdf(Arc<Vec<Triple>>),
    Binary(Arc<Binary>),
    Rect(Arc<Rect>),
    Xmlish(Xmlish),
    Remote,
}

impl Resource {
    pub fn kind(&self) -> ResourceKind {
        match self {
            Resource::Collection(_) => ResourceKind::Collection,
            Resource::Map(_) => ResourceKind::Map,
            Resource::File(_) => ResourceKind::File,
            Resource::String(_) => ResourceKind::String,
            Resource::Json(_) => ResourceKind::Json,
            Resource::Image(_) => ResourceKind::Image,
            Resource::Pdf(_) => ResourceKind::Pdf,
            Resource::Powerpoint(_) => ResourceKind::Powerpoint,
            Resource::PowerpointSlide(_) => ResourceKind::PowerpointSlide,
            Resource::Rdf(_) => ResourceKind::Rdf,
            Resource::Binary(_) => ResourceKind::Binary,
            Resource::Rect(_) => ResourceKind::Rect,
            Resource::Xmlish(_) => ResourceKind::Xmlish,
            Resource::Remote => ResourceKind::Remote,
        }
    }

    pub fn text(s: impl Into<Arc<str>>) -> Resource {
        Resource::String(Text::new(s))
    }

    /// Key/value pairs exposed through `property@key`.
    pub fn properties(&self) -> Vec<(String, String)> {
        fn kv(k: &str, v: impl ToString) -> (String, String) {
            (k.to_string(), v.to_string())
        }
        match self {
            Resource::File(f) => vec![
                kv("name", &f.name),
                kv("path", f.absolute_path.display()),
                kv("size", f.size_bytes),
                kv("modified", f.modified),
                kv("mediaType", &f.media_type),
                kv("isDirectory", f.is_directory),
            ],
            Resource::String(t) => vec![kv("length", t.char_len()), kv("lineCount", t.lines().len())],
            Resource::Image(i) => vec![
                kv("width", i.width),
                kv("height", i.height),
                kv("format", i.format.name()),
            ],
            Resource::Powerpoint(p) => vec![kv("slideCount", p.slides.len())],
            Resource::PowerpointSlide(s) => vec![
                kv("slideNumber", s.number),
                kv("shapeCount", convert::pptx::top_level_shapes(&s.xml.root).len()),
            ],
            Resource::Collection(items) | Resource::Map(items) => vec![kv("size", items.len())],
            Resource::Json(v) => {
                let (ty, size) = match v.as_ref() {
                    serde_json::Value::Null => ("null", None),
                    serde_json::Value::Bool(_) => ("boolean", None),
                    serde_json::Value::Number(_) => ("number", None),
                    serde_json::Value::String(_) => ("string", None),
                    serde_json::Value::Array(a) => ("array", Some(a.len())),
                    serde_json::Value::Object(o) => ("object", Some(o.len())),
                };
                let mut props = vec![kv("type", ty)];
                if let Some(n) = size {
                    props.push(kv("size", n));
                }
                props
            }
            Resource::Pdf(p) => vec![
                kv("version", &p.version),
                kv("pageCount", p.page_count_estimate),
                kv("size", p.bytes.len()),
            ],
            Resource::Rdf(ts) => vec![kv("tripleCount", ts.len())],
            Resource::Binary(b) => vec![kv("mediaType", &b.media_type), kv("size", b.bytes.len())],
            Resource::Rect(r) => vec![
                kv("x", r.x),
                kv("y", r.y),
                kv("width", r.width),
                kv("height", r.height),
            ],
            Resource::Xmlish(x) => {
                let node = x.node();
                vec![kv("element", &node.name), kv("childCount", node.elements().count())]
            }
            Resource::Remote => Vec::new(),
        }
    }

    pub fn property(&self, key: &str) -> Option<String> {
        self.properties()
            .into_iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v)
    }

    /// Links one step deeper than `self_link`, in a deterministic order.
    pub fn child_links(&self, self_link: Option<&DeepLink>) -> Vec<ChildLink> {
        let Some(base) = self_link else {
            return self.root_child_links();
        };
        let step = |label: String, seg: Segment| ChildLink {
            label,
            link: base.append(seg),
        };
        match self {
            Resource::File(f) if f.is_directory => f
                .entries
                .iter()
                .map(|e| step(e.clone(), Segment::child(e.clone())))
                .collect(),
            Resource::File(_) => {
                let mut out = vec![step("content".into(), Segment::child("content"))];
                out.extend(
                    self.properties()
                        .into_iter()
                        .map(|(k, _)| step(format!("property {k}"), Segment::unary("property", k))),
                );
                out
            }
            Resource::Binary(b) => convert::available_formats(b)
                .into_iter()
                .map(|f| step(format!("to {f}"), Segment::unary("to", f)))
                .collect(),
            Resource::Powerpoint(p) => (0..p.slides.len())
                .map(|i| step(format!("slide {}", i + 1), Segment::unary("index", i.to_string())))
                .collect(),
            Resource::PowerpointSlide(_) => ["xml", "svg"]
                .into_iter()
                .map(|f| step(format!("to {f}"), Segment::unary("to", f)))
                .collect(),
            Resource::String(t) => (0..t.lines().len())
                .map(|i| step(format!("line {i}"), Segment::unary("line", i.to_string())))
                .collect(),
            Resource::Json(v) => match v.as_ref() {
                serde_json::Value::Object(o) => o
                    .keys()
                    .map(|k| step(k.clone(), Segment::child(k.clone())))
                    .collect(),
                serde_json::Value::Array(a) => (0..a.len())
                    .map(|i| step(format!("[{i}]"), Segment::unary("index", i.to_string())))
                    .collect(),
                _ => Vec::new(),
            },
            Resource::Collection(items) => items
                .iter()
                .enumerate()
                .map(|(i, item)| match &item.target {
                    Target::Link(l) => ChildLink {
                        label: item.label.clone(),
                        link: l.clone(),
                    },
                    Target::Value(_) => step(item.label.clone(), Segment::unary("index", i.to_string())),
                })
                .collect(),
            Resource::Map(items) => items
                .iter()
                .map(|item| match &item.target {
                    Target::Link(l) => ChildLink {
                        label: item.label.clone(),
                        link: l.clone(),
                    },
                    Target::Value(_) => step(item.label.clone(), Segment::child(item.label.clone())),
                })
                .collect(),
            Resource::Image(_)
            | Resource::Pdf(_)
            | Resource::Rdf(_)
            | Resource::Rect(_)
            | Resource::Xmlish(_)
            | Resource::Remote => Vec::new(),
        }
    }

    fn root_child_links(&self) -> Vec<ChildLink> {
        match self {
            Resource::Map(items) | Resource::Collection(items) => items
                .iter()
                .filter_map(|item| match &item.target {
                    Target::Link(l) => Some(ChildLink {
                        label: item.label.clone(),
                        link: l.clone(),
                    }),
                    Target::Value(_) => None,
                })
                .collect(),
            _ => Vec::new(),
        }
    }

    /// Raw bytes behind the resource, for `to@binary`.
    pub fn byte_source(&self) -> Option<(Arc<[u8]>, String)> {
        match self {
            Resource::Binary(b) => Some((b.bytes.clone(), b.media_type.clone())),
            Resource::String(t) => Some((Arc::from(t.text.as_bytes()), "text/plain; charset=utf-8".into())),
            Resource::Image(i) => Some((i.bytes.clone(), i.format.media_type().into())),
            Resource::Pdf(p) => Some((p.bytes.clone(), "application/pdf".into())),
            Resource::Powerpoint(p) => Some((p.bytes.clone(), sniff::PPTX.into())),
            Resource::PowerpointSlide(s) => {
                Some((Arc::from(s.xml.source.as_bytes()), "application/xml".into()))
            }
            Resource::Xmlish(x) => {
                let media = match x.doc.mode {
                    crate::xml::ParseMode::Html => "text/html",
                    crate::xml::ParseMode::Xml => "application/xml",
                };
                Some((Arc::from(x.doc.source.as_bytes()), media.into()))
            }
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChildLink {
    pub label: String,
    pub link: DeepLink,
}
