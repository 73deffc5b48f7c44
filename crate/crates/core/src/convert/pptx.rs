//! PPTX loading and the deterministic slide-to-SVG projection.
//!
//! The projection is a stand-in for real slide rendering: an `svg` root
//! sized from the presentation, one `g` for the slide, then one `g` per
//! top-level shape in document order, each carrying the shape name,
//! position and a `text` element per paragraph.

use std::io::{Cursor, Read};
use std::sync::Arc;

use zip::ZipArchive;

use crate::error::{ErrorCode, StepError};
use crate::resource::{Presentation, Slide};
use crate::xml::{ParseMode, XmlDocument, XmlNode};

/// EMU per pixel at 96 dpi.
pub const EMU_PER_PX: i64 = 9525;

/// 10in x 7.5in, the OOXML default when `p:sldSz` is absent.
const DEFAULT_SLIDE_SIZE: (i64, i64) = (9_144_000, 6_858_000);

const MAX_PART_BYTES: u64 = 64 * 1024 * 1024;

const NON_SHAPE_CHILDREN: &[&str] = &["nvGrpSpPr", "grpSpPr", "extLst"];

pub(crate) fn local_name(name: &str) -> &str {
    name.rsplit(':').next().unwrap_or(name)
}

fn child<'a>(node: &'a XmlNode, local: &str) -> Option<&'a XmlNode> {
    node.elements().find(|e| local_name(&e.name) == local)
}

fn descendant<'a>(node: &'a XmlNode, local: &str) -> Option<&'a XmlNode> {
    for e in node.elements() {
        if local_name(&e.name) == local {
            return Some(e);
        }
        if let Some(found) = descendant(e, local) {
            return Some(found);
        }
    }
    None
}

fn descendants<'a>(node: &'a XmlNode, local: &str, out: &mut Vec<&'a XmlNode>) {
    for e in node.elements() {
        if local_name(&e.name) == local {
            out.push(e);
        } else {
            descendants(e, local, out);
        }
    }
}

fn bad(detail: impl Into<String>) -> StepError {
    StepError::new(ErrorCode::BadParamFormat, detail)
}

fn read_part(archive: &mut ZipArchive<Cursor<&[u8]>>, name: &str) -> Result<String, StepError> {
    let entry = archive
        .by_name(name)
        .map_err(|e| bad(format!("{name}: {e}")))?;
    let mut text = String::new();
    entry
        .take(MAX_PART_BYTES)
        .read_to_string(&mut text)
        .map_err(|e| bad(format!("{name}: {e}")))?;
    Ok(text)
}

fn slide_number(name: &str) -> Option<usize> {
    name.strip_prefix("ppt/slides/slide")?
        .strip_suffix(".xml")?
        .parse()
        .ok()
}

/// Opens a PPTX package and parses every slide part, ordered by the
/// number in `ppt/slides/slideN.xml`.
pub fn load_presentation(bytes: Arc<[u8]>) -> Result<Presentation, StepError> {
    let mut archive = ZipArchive::new(Cursor::new(&bytes[..]))
        .map_err(|e| StepError::new(ErrorCode::ConversionUnavailable, format!("not a ZIP package: {e}")))?;
    let names: Vec<String> = archive.file_names().map(str::to_string).collect();
    if !names.iter().any(|n| n == "[Content_Types].xml") || !names.iter().any(|n| n.starts_with("ppt/")) {
        return Err(StepError::new(
            ErrorCode::ConversionUnavailable,
            "ZIP package is not a presentation",
        ));
    }

    let slide_size = if names.iter().any(|n| n == "ppt/presentation.xml") {
        let text = read_part(&mut archive, "ppt/presentation.xml")?;
        let doc = XmlDocument::parse(text, ParseMode::Xml)
            .map_err(|e| bad(format!("ppt/presentation.xml: {e}")))?;
        descendant(&doc.root, "sldSz")
            .and_then(|s| Some((s.attr("cx")?.parse().ok()?, s.attr("cy")?.parse().ok()?)))
            .unwrap_or(DEFAULT_SLIDE_SIZE)
    } else {
        DEFAULT_SLIDE_SIZE
    };

    let mut parts: Vec<(usize, String)> = names
        .iter()
        .filter_map(|n| slide_number(n).map(|k| (k, n.clone())))
        .collect();
    parts.sort();

    let mut slides = Vec::with_capacity(parts.len());
    for (i, (_, part)) in parts.into_iter().enumerate() {
        let text = read_part(&mut archive, &part)?;
        let xml = XmlDocument::parse(text, ParseMode::Xml).map_err(|e| bad(format!("{part}: {e}")))?;
        slides.push(Arc::new(Slide {
            number: i + 1,
            part_name: part,
            xml: Arc::new(xml),
            slide_size,
        }));
    }
    Ok(Presentation {
        slide_size,
        slides,
        bytes,
    })
}

/// Direct shape children of the slide's shape tree.
pub fn top_level_shapes(slide_root: &XmlNode) -> Vec<&XmlNode> {
    let Some(tree) = child(slide_root, "cSld").and_then(|c| child(c, "spTree")) else {
        return Vec::new();
    };
    tree.elements()
        .filter(|e| !NON_SHAPE_CHILDREN.contains(&local_name(&e.name)))
        .collect()
}

/// Pixel value of an EMU length, without trailing zeros.
pub fn emu_to_px(emu: i64) -> String {
    if emu % EMU_PER_PX == 0 {
        return (emu / EMU_PER_PX).to_string();
    }
    let s = format!("{:.2}", emu as f64 / EMU_PER_PX as f64);
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

fn emu_attr(node: Option<&XmlNode>, key: &str) -> i64 {
    node.and_then(|n| n.attr(key)).and_then(|v| v.parse().ok()).unwrap_or(0)
}

fn shape_group(shape: &XmlNode) -> XmlNode {
    let name = descendant(shape, "cNvPr")
        .and_then(|c| c.attr("name"))
        .unwrap_or("")
        .to_string();
    let xfrm = descendant(shape, "xfrm");
    let off = xfrm.and_then(|x| child(x, "off"));
    let ext = xfrm.and_then(|x| child(x, "ext"));
    let (x, y) = (emu_to_px(emu_attr(off, "x")), emu_to_px(emu_attr(off, "y")));
    let mut g = XmlNode::new("g")
        .with_attr("data-shape-name", name)
        .with_attr("data-shape-type", local_name(&shape.name))
        .with_attr("transform", format!("translate({x},{y})"))
        .with_attr("data-x", x)
        .with_attr("data-y", y)
        .with_attr("data-width", emu_to_px(emu_attr(ext, "cx")))
        .with_attr("data-height", emu_to_px(emu_attr(ext, "cy")));

    if let Some(body) = child(shape, "txBody") {
        let mut paragraphs = Vec::new();
        descendants(body, "p", &mut paragraphs);
        for (i, p) in paragraphs.into_iter().enumerate() {
            let mut runs = Vec::new();
            descendants(p, "t", &mut runs);
            let text: String = runs.iter().map(|t| t.text_content()).collect();
            let mut t = XmlNode::new("text")
                .with_attr("x", "0")
                .with_attr("y", ((i + 1) * 18).to_string());
            if !text.is_empty() {
                t.push_text(text);
            }
            g.push_element(t);
        }
    }
    g
}

pub fn slide_to_svg(slide: &Slide) -> XmlNode {
    let (cx, cy) = slide.slide_size;
    let (w, h) = (emu_to_px(cx), emu_to_px(cy));
    let mut svg = XmlNode::new("svg")
        .with_attr("xmlns", "http://www.w3.org/2000/svg")
        .with_attr("width", w.clone())
        .with_attr("height", h.clone())
        .with_attr("viewBox", format!("0 0 {w} {h}"));
    let mut group = XmlNode::new("g")
        .with_attr("class", "slide")
        .with_attr("data-slide-number", slide.number.to_string());
    for shape in top_level_shapes(&slide.xml.root) {
        group.push_element(shape_group(shape));
    }
    svg.push_element(group);
    svg
}
