//! Representations of resolved resources: the HTML page (default), JSON,
//! and Turtle for files.

mod html;

use serde_json::{json, Map, Value};

use crate::link::DeepLink;
use crate::rdf::{Term, Triple, TurtleWriter, VOCAB, WELL_KNOWN_PREFIXES, XSD};
use crate::resource::{FileMeta, Resource, ResourceKind, Target, TextFocus};

pub use html::{render_error_html, render_html, render_search_html, SearchHit};

pub const HTML: &str = "text/html; charset=utf-8";
pub const JSON: &str = "application/json";
pub const TURTLE: &str = "text/turtle; charset=utf-8";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Html,
    Json,
    Turtle,
}

impl Format {
    pub fn media_type(self) -> &'static str {
        match self {
            Format::Html => HTML,
            Format::Json => JSON,
            Format::Turtle => TURTLE,
        }
    }
}

/// First supported media range in header order; quality values are ignored.
pub fn negotiate(accept: Option<&str>, kind: ResourceKind) -> Format {
    let Some(accept) = accept else {
        return Format::Html;
    };
    for range in accept.split(',') {
        let essence = range.split(';').next().unwrap_or("").trim().to_ascii_lowercase();
        match essence.as_str() {
            "application/json" => return Format::Json,
            "text/turtle" if kind == ResourceKind::File => return Format::Turtle,
            "text/html" | "*/*" => return Format::Html,
            _ => {}
        }
    }
    Format::Html
}

/// What a page knows besides the resource itself.
pub struct PageContext<'a> {
    /// `None` for the entry page at `/`.
    pub link: Option<&'a DeepLink>,
    pub subject_iri: String,
    pub annotations: &'a [Triple],
    pub bookmarked: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Representation {
    pub media_type: &'static str,
    pub body: String,
}

pub fn render(format: Format, resource: &Resource, ctx: &PageContext) -> Representation {
    let body = match format {
        Format::Html => render_html(resource, ctx),
        Format::Json => render_json(resource, ctx.link),
        Format::Turtle => match resource {
            Resource::File(meta) => render_turtle(meta, &ctx.subject_iri, ctx.annotations),
            _ => return render(Format::Html, resource, ctx),
        },
    };
    Representation {
        media_type: format.media_type(),
        body,
    }
}

fn link_string(l: &DeepLink) -> String {
    l.serialize()
}

/// JSON object with keys in this order: `kind`, `properties`, `children`,
/// then the kind-specific payload.
pub fn render_json(resource: &Resource, link: Option<&DeepLink>) -> String {
    let mut out = Map::new();
    out.insert("kind".into(), json!(resource.kind().name()));
    let props: Map<String, Value> = resource
        .properties()
        .into_iter()
        .map(|(k, v)| (k, Value::String(v)))
        .collect();
    out.insert("properties".into(), Value::Object(props));
    let children: Vec<Value> = resource
        .child_links(link)
        .iter()
        .map(|c| json!(link_string(&c.link)))
        .collect();
    out.insert("children".into(), Value::Array(children));
    payload(resource, &mut out);
    serde_json::to_string_pretty(&Value::Object(out)).expect("JSON values serialize")
}

fn payload(resource: &Resource, out: &mut Map<String, Value>) {
    let mut put = |k: &str, v: Value| {
        out.insert(k.to_string(), v);
    };
    match resource {
        Resource::File(f) => {
            put("name", json!(f.name));
            put("path", json!(f.absolute_path.display().to_string()));
            put("size", json!(f.size_bytes));
            put("modified", json!(f.modified));
            put("mediaType", json!(f.media_type));
            put("isDirectory", json!(f.is_directory));
            if f.is_directory {
                put("entries", json!(f.entries));
            }
        }
        Resource::String(t) => {
            put("text", json!(&*t.text));
            if let Some(o) = &t.origin {
                let focus = match o.focus {
                    TextFocus::Line(i) => json!({"line": i}),
                    TextFocus::Range(a, b) => json!({"start": a, "end": b}),
                };
                put("focus", focus);
            }
        }
        Resource::Json(v) => put("value", v.as_ref().clone()),
        Resource::Rect(r) => {
            put("x", json!(r.x));
            put("y", json!(r.y));
            put("w", json!(r.width));
            put("h", json!(r.height));
            put("image", json!({"width": r.image.width, "height": r.image.height, "format": r.image.format.name()}));
        }
        Resource::Image(i) => {
            put("width", json!(i.width));
            put("height", json!(i.height));
            put("format", json!(i.format.name()));
        }
        Resource::Pdf(p) => {
            put("version", json!(p.version));
            put("pageCount", json!(p.page_count_estimate));
        }
        Resource::Powerpoint(p) => {
            put("slideCount", json!(p.slides.len()));
            put("slideSize", json!({"cx": p.slide_size.0, "cy": p.slide_size.1}));
        }
        Resource::PowerpointSlide(s) => {
            put("slideNumber", json!(s.number));
            put("part", json!(s.part_name));
        }
        Resource::Rdf(ts) => {
            let rows: Vec<Value> = ts
                .iter()
                .map(|t| json!({"subject": t.subject.to_string(), "predicate": t.predicate, "object": t.object.to_string()}))
                .collect();
            put("triples", Value::Array(rows));
        }
        Resource::Binary(b) => {
            put("mediaType", json!(b.media_type));
            put("size", json!(b.bytes.len()));
        }
        Resource::Xmlish(x) => {
            let node = x.node();
            put("element", json!(node.name));
            put("focus", json!(x.focus));
            put("selected", json!(x.selected));
            put("xml", json!(node.to_xml_string()));
        }
        Resource::Collection(items) | Resource::Map(items) => {
            let rows: Vec<Value> = items
                .iter()
                .map(|i| match &i.target {
                    Target::Link(l) => json!({"label": i.label, "link": link_string(l)}),
                    Target::Value(v) => json!({"label": i.label, "kind": v.kind().name()}),
                })
                .collect();
            put("items", Value::Array(rows));
        }
        Resource::Remote => {}
    }
}

fn dl(term: &str) -> String {
    format!("{VOCAB}{term}")
}

/// Metadata statements about a file, in the `dl:` vocabulary.
pub fn file_triples(subject_iri: &str, f: &FileMeta) -> Vec<Triple> {
    let s = || Term::iri(subject_iri);
    vec![
        Triple::new(s(), dl("name"), Term::literal(&f.name)),
        Triple::new(s(), dl("path"), Term::literal(f.absolute_path.display().to_string())),
        Triple::new(s(), dl("size"), Term::typed(f.size_bytes.to_string(), format!("{XSD}integer"))),
        Triple::new(s(), dl("modified"), Term::typed(f.modified.to_string(), format!("{XSD}integer"))),
        Triple::new(s(), dl("mediaType"), Term::literal(&f.media_type)),
        Triple::new(s(), dl("isDirectory"), Term::typed(f.is_directory.to_string(), format!("{XSD}boolean"))),
    ]
}

/// File metadata followed by the stored annotations about it.
pub fn render_turtle(f: &FileMeta, subject_iri: &str, annotations: &[Triple]) -> String {
    let mut triples = file_triples(subject_iri, f);
    for t in annotations {
        if !triples.contains(t) {
            triples.push(t.clone());
        }
    }
    TurtleWriter::new(WELL_KNOWN_PREFIXES).write(&triples)
}
