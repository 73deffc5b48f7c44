//! The HTML page. Visual design is free; the element ids `deeplink`,
//! `annotation-form`, `triples`, `bookmark`, the class `highlight`, the
//! `rel="child"` anchors and the overlay data attributes are what scripts
//! and tests rely on.

use std::fmt::Write as _;

use base64::Engine as _;

use super::PageContext;
use crate::convert::pptx::slide_to_svg;
use crate::rdf::{Term, Triple, BOOKMARK_CLASS, RDF_TYPE, WELL_KNOWN_PREFIXES};
use crate::resource::{Resource, Text, TextFocus, Xmlish};
use crate::xml::{escape_attr, escape_text};

/// One row of the literal search page.
pub struct SearchHit {
    pub subject: String,
    /// Local path of the subject when it is a deep link served here.
    pub href: Option<String>,
    pub predicate: String,
    pub value: String,
}

fn compact(iri: &str) -> String {
    WELL_KNOWN_PREFIXES
        .iter()
        .find_map(|(p, ns)| iri.strip_prefix(ns).map(|local| format!("{p}:{local}")))
        .unwrap_or_else(|| iri.to_string())
}

struct Page<'a> {
    title: String,
    self_text: String,
    /// Serialized deep link the forms post about; `None` disables them.
    subject: Option<String>,
    kind: &'a str,
    annotations: &'a [Triple],
    bookmarked: bool,
}

impl Page<'_> {
    fn write(&self, body: &str) -> String {
        let mut out = String::with_capacity(body.len() + 4096);
        let _ = write!(
            out,
            "<!DOCTYPE html>\n<html lang=\"en\">\n<head>\n<meta charset=\"utf-8\">\n<title>{}</title>\n\
             <link rel=\"stylesheet\" href=\"/assets/deeplinker.css\">\n\
             <script src=\"/assets/deeplinker.js\" defer></script>\n</head>\n<body data-kind=\"{}\">\n",
            escape_text(&self.title),
            escape_attr(self.kind)
        );
        out.push_str(
            "<header><a href=\"/\">DeepLinker</a> <a href=\"/bookmarks\">Bookmarks</a>\n\
             <form id=\"search\" action=\"/search\" method=\"get\"><input type=\"search\" name=\"q\" placeholder=\"Search literals\" required> <button type=\"submit\">Search</button></form>\n\
             </header>\n<main>\n",
        );
        let _ = writeln!(out, "<h1><code id=\"deeplink\">{}</code></h1>", escape_text(&self.self_text));
        out.push_str(body);
        self.annotation_section(&mut out);
        out.push_str("</main>\n</body>\n</html>\n");
        out
    }

    fn annotation_section(&self, out: &mut String) {
        let disabled = if self.subject.is_some() { "" } else { " disabled" };
        let subject = escape_attr(self.subject.as_deref().unwrap_or(""));
        out.push_str("<section class=\"annotations\">\n<h2>Statements</h2>\n<ul id=\"triples\">\n");
        for t in self.annotations {
            let (value, object_type) = match &t.object {
                Term::Iri(v) => (format!("<a href=\"{0}\">{1}</a>", escape_attr(v), escape_text(&compact(v))), "iri"),
                other => (escape_text(&other.display_value()), "literal"),
            };
            let _ = writeln!(
                out,
                "<li data-predicate=\"{}\" data-object=\"{}\" data-object-type=\"{object_type}\"><span class=\"predicate\">{}</span> <span class=\"object\">{value}</span></li>",
                escape_attr(&t.predicate),
                escape_attr(&t.object.display_value()),
                escape_text(&compact(&t.predicate)),
            );
        }
        out.push_str("</ul>\n");
        let _ = write!(
            out,
            "<form id=\"annotation-form\" method=\"post\" action=\"/annotations\"><fieldset{disabled}>\n\
             <input type=\"hidden\" name=\"subject\" value=\"{subject}\">\n\
             <label>Predicate <input name=\"predicate\" placeholder=\"rdfs:comment\" required></label>\n\
             <label>Object <input name=\"object\" required></label>\n\
             <select name=\"type\"><option value=\"literal\">literal</option><option value=\"iri\">IRI</option></select>\n\
             <button type=\"submit\">Add statement</button>\n</fieldset></form>\n"
        );
        let (state, label) = if self.bookmarked {
            ("true", "Bookmarked")
        } else {
            ("false", "Bookmark")
        };
        let _ = write!(
            out,
            "<form id=\"bookmark\" method=\"post\" action=\"/annotations\" data-bookmarked=\"{state}\"><fieldset{disabled}>\n\
             <input type=\"hidden\" name=\"subject\" value=\"{subject}\">\n\
             <input type=\"hidden\" name=\"predicate\" value=\"{}\">\n\
             <input type=\"hidden\" name=\"object\" value=\"{}\">\n\
             <input type=\"hidden\" name=\"type\" value=\"iri\">\n\
             <button type=\"submit\">{label}</button>\n</fieldset></form>\n</section>\n",
            escape_attr(RDF_TYPE),
            escape_attr(BOOKMARK_CLASS),
        );
    }
}

pub fn render_html(resource: &Resource, ctx: &PageContext) -> String {
    let self_text = ctx.link.map_or_else(|| "/".to_string(), |l| l.serialize());
    let mut body = String::new();
    let kind = resource.kind().name();
    let _ = writeln!(body, "<p class=\"kind\">{kind}</p>");
    body.push_str(&view(resource));
    properties_table(resource, &mut body);
    let children = resource.child_links(ctx.link);
    body.push_str("<nav class=\"children\">\n<ul>\n");
    for c in &children {
        let href = c.link.serialize();
        let _ = writeln!(
            body,
            "<li><a rel=\"child\" href=\"{}\">{}</a></li>",
            escape_attr(&href),
            escape_text(&c.label)
        );
    }
    body.push_str("</ul>\n</nav>\n");
    Page {
        title: self_text.clone(),
        self_text: self_text.clone(),
        subject: ctx.link.map(|_| self_text),
        kind,
        annotations: ctx.annotations,
        bookmarked: ctx.bookmarked,
    }
    .write(&body)
}

fn properties_table(resource: &Resource, out: &mut String) {
    let props = resource.properties();
    if props.is_empty() {
        return;
    }
    out.push_str("<table class=\"properties\">\n");
    for (k, v) in props {
        let _ = writeln!(
            out,
            "<tr><th>{}</th><td data-key=\"{}\">{}</td></tr>",
            escape_text(&k),
            escape_attr(&k),
            escape_text(&v)
        );
    }
    out.push_str("</table>\n");
}

fn view(resource: &Resource) -> String {
    match resource {
        Resource::String(t) => text_view(t),
        Resource::Rect(r) => {
            let img = image_tag(&r.image.bytes, r.image.format.media_type(), r.image.width, r.image.height);
            format!(
                "<div class=\"image-view\" style=\"position:relative;display:inline-block\">{img}\
                 <div class=\"highlight\" data-x=\"{x}\" data-y=\"{y}\" data-w=\"{w}\" data-h=\"{h}\" \
                 style=\"position:absolute;left:{x}px;top:{y}px;width:{w}px;height:{h}px;outline:2px solid red\"></div></div>\n",
                x = r.x,
                y = r.y,
                w = r.width,
                h = r.height
            )
        }
        Resource::Image(i) => format!(
            "<div class=\"image-view\">{}</div>\n",
            image_tag(&i.bytes, i.format.media_type(), i.width, i.height)
        ),
        Resource::Xmlish(x) => xml_view(x),
        Resource::PowerpointSlide(s) => {
            format!("<div class=\"slide-view\">{}</div>\n", slide_to_svg(s).to_xml_string())
        }
        Resource::Json(v) => format!(
            "<pre class=\"json\">{}</pre>\n",
            escape_text(&serde_json::to_string_pretty(v.as_ref()).expect("JSON values serialize"))
        ),
        Resource::Rdf(ts) => {
            let mut out = String::from("<table class=\"rdf\">\n");
            for t in ts.iter() {
                let _ = writeln!(
                    out,
                    "<tr><td>{}</td><td>{}</td><td>{}</td></tr>",
                    escape_text(&t.subject.display_value()),
                    escape_text(&compact(&t.predicate)),
                    escape_text(&t.object.display_value())
                );
            }
            out.push_str("</table>\n");
            out
        }
        Resource::Remote => "<form id=\"upload\" method=\"post\" action=\"/remote\" enctype=\"multipart/form-data\">\
             <input type=\"file\" name=\"file\" required> <button type=\"submit\">Upload</button></form>\n"
            .to_string(),
        _ => String::new(),
    }
}

fn image_tag(bytes: &[u8], media_type: &str, width: u32, height: u32) -> String {
    format!(
        "<img src=\"data:{media_type};base64,{}\" width=\"{width}\" height=\"{height}\" alt=\"\">",
        base64::engine::general_purpose::STANDARD.encode(bytes)
    )
}

/// The text a `String` was cut from, with the cut highlighted; a string
/// without an origin is shown as numbered lines and nothing is highlighted.
fn text_view(t: &Text) -> String {
    let mut out = format!("<pre class=\"value\">{}</pre>\n", escape_text(&t.text));
    match &t.origin {
        Some(origin) if matches!(origin.focus, TextFocus::Range(..)) => {
            let TextFocus::Range(a, b) = origin.focus else { unreachable!() };
            let chars: Vec<char> = origin.full.chars().collect();
            let part = |r: std::ops::Range<usize>| escape_text(&chars[r].iter().collect::<String>());
            let _ = writeln!(
                out,
                "<pre class=\"text\">{}<mark class=\"highlight\" data-start=\"{a}\" data-end=\"{b}\">{}</mark>{}</pre>",
                part(0..a),
                part(a..b),
                part(b..chars.len())
            );
        }
        Some(origin) => {
            let TextFocus::Line(focus) = origin.focus else { unreachable!() };
            line_list(&crate::resource::split_lines(&origin.full), Some(focus), &mut out);
        }
        None => line_list(&t.lines(), None, &mut out),
    }
    out
}

fn line_list(lines: &[&str], focus: Option<usize>, out: &mut String) {
    out.push_str("<ol class=\"lines\">\n");
    for (i, l) in lines.iter().enumerate() {
        let class = if Some(i) == focus { " class=\"highlight\"" } else { "" };
        let _ = writeln!(out, "<li data-line=\"{i}\"{class}><code>{}</code></li>", escape_text(l));
    }
    out.push_str("</ol>\n");
}

/// The document source, with the selected element's span marked.
fn xml_view(x: &Xmlish) -> String {
    let src = &x.doc.source;
    let span = x.selected.then(|| x.node().source_span).flatten();
    match span {
        Some((start, end)) if end <= src.len() && src.is_char_boundary(start) && src.is_char_boundary(end) => format!(
            "<pre class=\"source\">{}<mark class=\"highlight\">{}</mark>{}</pre>\n",
            escape_text(&src[..start]),
            escape_text(&src[start..end]),
            escape_text(&src[end..])
        ),
        _ if x.selected => format!(
            "<pre class=\"source\"><mark class=\"highlight\">{}</mark></pre>\n",
            escape_text(&x.node().to_xml_string())
        ),
        _ => format!("<pre class=\"source\">{}</pre>\n", escape_text(src)),
    }
}

pub fn render_search_html(needle: &str, hits: &[SearchHit]) -> String {
    let mut body = format!(
        "<p class=\"kind\">Search</p>\n<p>{} result(s) for <q class=\"needle\">{}</q></p>\n<ul class=\"results\">\n",
        hits.len(),
        escape_text(needle)
    );
    for h in hits {
        let subject = match &h.href {
            Some(href) => format!("<a href=\"{}\">{}</a>", escape_attr(href), escape_text(href)),
            None => escape_text(&h.subject),
        };
        let _ = writeln!(
            body,
            "<li>{subject} <span class=\"predicate\">{}</span> <span class=\"object\">{}</span></li>",
            escape_text(&compact(&h.predicate)),
            escape_text(&h.value)
        );
    }
    body.push_str("</ul>\n");
    Page {
        title: format!("Search: {needle}"),
        self_text: format!("/search?q={needle}"),
        subject: None,
        kind: "Search",
        annotations: &[],
        bookmarked: false,
    }
    .write(&body)
}

pub fn render_error_html(status: u16, code: &str, at_segment: Option<usize>, detail: &str, path: &str) -> String {
    let at = at_segment.map_or(String::new(), |i| format!(" data-segment=\"{i}\""));
    let body = format!(
        "<p class=\"kind\">Error</p>\n<div class=\"error\" data-status=\"{status}\" data-code=\"{}\"{at}>\
         <p>{status} {}{}</p><p>{}</p></div>\n",
        escape_attr(code),
        escape_text(code),
        at_segment.map_or(String::new(), |i| format!(" at segment {i}")),
        escape_text(detail)
    );
    Page {
        title: format!("{status} {code}"),
        self_text: path.to_string(),
        subject: None,
        kind: "Error",
        annotations: &[],
        bookmarked: false,
    }
    .write(&body)
}
