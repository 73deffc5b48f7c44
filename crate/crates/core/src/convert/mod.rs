//! The `to@<format>` conversion registry.

pub mod pdf;
pub mod pptx;

use std::sync::Arc;

use crate::error::{ErrorCode, StepError};
use crate::rdf;
use crate::resource::image::{read_header, ImageHeaderError};
use crate::resource::sniff::{self, essence, is_textual};
use crate::resource::{Binary, Image, Resource, ResourceKind, Text, Xmlish};
use crate::xml::{ParseMode, XmlDocument};

/// Targets a `Binary` can be converted to, in the order child links list them.
pub const BINARY_TARGETS: &[&str] = &[
    "string",
    "json",
    "image",
    "pdf",
    "powerpoint",
    "html",
    "xml",
    "rdf",
];

const STRING_TARGETS: &[&str] = &["json", "xml", "html", "rdf"];
const SLIDE_TARGETS: &[&str] = &["xml", "svg"];

/// Every (source kind, format) pair the registry declares.
pub fn registry() -> Vec<(ResourceKind, &'static str)> {
    let mut out = Vec::new();
    out.extend(BINARY_TARGETS.iter().map(|f| (ResourceKind::Binary, *f)));
    out.extend(STRING_TARGETS.iter().map(|f| (ResourceKind::String, *f)));
    out.extend(SLIDE_TARGETS.iter().map(|f| (ResourceKind::PowerpointSlide, *f)));
    for kind in ResourceKind::ALL {
        if has_byte_source(kind) {
            out.push((kind, "binary"));
        }
    }
    out
}

fn has_byte_source(kind: ResourceKind) -> bool {
    matches!(
        kind,
        ResourceKind::Binary
            | ResourceKind::String
            | ResourceKind::Image
            | ResourceKind::Pdf
            | ResourceKind::Powerpoint
            | ResourceKind::PowerpointSlide
            | ResourceKind::Xmlish
    )
}

fn unavailable(kind: ResourceKind, format: &str) -> StepError {
    StepError::new(
        ErrorCode::ConversionUnavailable,
        format!("no conversion from {kind} to {format:?}"),
    )
}

fn bad(detail: impl Into<String>) -> StepError {
    StepError::new(ErrorCode::BadParamFormat, detail)
}

pub fn convert(resource: &Resource, format: &str) -> Result<Resource, StepError> {
    let kind = resource.kind();
    if format == "binary" {
        let (bytes, media_type) = resource.byte_source().ok_or_else(|| unavailable(kind, format))?;
        return Ok(Resource::Binary(Arc::new(Binary {
            bytes,
            media_type,
            name: None,
        })));
    }
    match resource {
        Resource::Binary(b) => from_binary(b, format),
        Resource::String(t) if STRING_TARGETS.contains(&format) => from_text(&t.text, format, None),
        Resource::PowerpointSlide(slide) => match format {
            "xml" => Ok(Resource::Xmlish(Xmlish {
                doc: slide.xml.clone(),
                focus: Vec::new(),
                selected: false,
            })),
            "svg" => Ok(Resource::Xmlish(Xmlish::whole(XmlDocument::from_node(
                &pptx::slide_to_svg(slide),
            )))),
            _ => Err(unavailable(kind, format)),
        },
        _ => Err(unavailable(kind, format)),
    }
}

fn from_binary(b: &Binary, format: &str) -> Result<Resource, StepError> {
    match format {
        "string" => Ok(Resource::String(Text::new(String::from_utf8_lossy(&b.bytes)))),
        "image" => match read_header(&b.bytes) {
            Ok(h) => Ok(Resource::Image(Arc::new(Image {
                format: h.format,
                width: h.width,
                height: h.height,
                bytes: b.bytes.clone(),
            }))),
            Err(ImageHeaderError::UnknownFormat) => Err(unavailable(ResourceKind::Binary, format)),
            Err(e) => Err(bad(e.to_string())),
        },
        "pdf" => pdf::read_pdf(b.bytes.clone()).map(|p| Resource::Pdf(Arc::new(p))),
        "powerpoint" => {
            if !b.bytes.starts_with(b"PK\x03\x04") {
                return Err(unavailable(ResourceKind::Binary, format));
            }
            pptx::load_presentation(b.bytes.clone()).map(|p| Resource::Powerpoint(Arc::new(p)))
        }
        "json" | "html" | "xml" | "rdf" => {
            from_text(&String::from_utf8_lossy(&b.bytes), format, Some(&b.media_type))
        }
        _ => Err(unavailable(ResourceKind::Binary, format)),
    }
}

fn from_text(text: &str, format: &str, media_type: Option<&str>) -> Result<Resource, StepError> {
    match format {
        "json" => serde_json::from_str::<serde_json::Value>(text)
            .map(|v| Resource::Json(Arc::new(v)))
            .map_err(|e| bad(format!("invalid JSON: {e}"))),
        "html" => XmlDocument::parse(text, ParseMode::Html)
            .map(|d| Resource::Xmlish(Xmlish::whole(d)))
            .map_err(|e| bad(e.to_string())),
        "xml" => XmlDocument::parse(text, ParseMode::Xml)
            .map(|d| Resource::Xmlish(Xmlish::whole(d)))
            .map_err(|e| bad(format!("malformed XML: {e}"))),
        "rdf" => {
            let parsed = if media_type.is_some_and(|m| essence(m) == "application/n-triples") {
                rdf::parse_ntriples(text)
            } else {
                rdf::parse_turtle(text)
            };
            parsed
                .map(|ts| Resource::Rdf(Arc::new(ts)))
                .map_err(|e| bad(format!("invalid RDF: {e}")))
        }
        _ => Err(unavailable(ResourceKind::String, format)),
    }
}

/// Whether the binary's media type suggests `format` at all.
fn sniff_matches(b: &Binary, format: &str) -> bool {
    let m = essence(&b.media_type);
    match format {
        "string" => is_textual(&m) || std::str::from_utf8(&b.bytes).is_ok(),
        "json" => m == "application/json" || m.ends_with("+json"),
        "image" => matches!(m.as_str(), "image/png" | "image/jpeg" | "image/gif"),
        "pdf" => m == "application/pdf",
        "powerpoint" => m == sniff::PPTX,
        "html" => m == "text/html" || m == "application/xhtml+xml",
        "xml" => m == "application/xml" || m == "text/xml" || (m.ends_with("+xml") && m != "application/xhtml+xml"),
        "rdf" => m == "text/turtle" || m == "application/n-triples",
        _ => false,
    }
}

/// Conversions offered as links for a binary: sniff-compatible ones that
/// actually succeed, so no listed link dangles.
pub fn available_formats(b: &Binary) -> Vec<&'static str> {
    BINARY_TARGETS
        .iter()
        .copied()
        .filter(|f| sniff_matches(b, f))
        .filter(|f| match *f {
            "string" => true,
            _ => from_binary(b, f).is_ok(),
        })
        .collect()
}
