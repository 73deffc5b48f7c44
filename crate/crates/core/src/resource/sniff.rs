//! Media-type detection: magic bytes first, then the file extension.

use std::io::Cursor;

pub const OCTET_STREAM: &str = "application/octet-stream";
pub const DIRECTORY: &str = "inode/directory";
pub const PPTX: &str = "application/vnd.openxmlformats-officedocument.presentationml.presentation";

/// Media type implied by the first bytes, if any signature matches.
pub fn sniff_magic(bytes: &[u8]) -> Option<&'static str> {
    if bytes.starts_with(b"\x89PNG\r\n\x1a\n") {
        Some("image/png")
    } else if bytes.starts_with(b"\xFF\xD8\xFF") {
        Some("image/jpeg")
    } else if bytes.starts_with(b"GIF8") {
        Some("image/gif")
    } else if bytes.starts_with(b"%PDF-") {
        Some("application/pdf")
    } else if bytes.starts_with(b"PK\x03\x04") {
        Some(if is_pptx(bytes) { PPTX } else { "application/zip" })
    } else {
        None
    }
}

fn is_pptx(bytes: &[u8]) -> bool {
    let Ok(archive) = zip::ZipArchive::new(Cursor::new(bytes)) else {
        return false;
    };
    let mut content_types = false;
    let mut ppt = false;
    for name in archive.file_names() {
        content_types |= name == "[Content_Types].xml";
        ppt |= name.starts_with("ppt/");
    }
    content_types && ppt
}

/// Media type from a file name's extension alone.
pub fn from_extension(name: &str) -> Option<String> {
    mime_guess::from_path(name)
        .first_raw()
        .map(str::to_string)
}

/// Magic bytes, then the extension of `name`, then `fallback`, then octet-stream.
pub fn sniff(bytes: &[u8], name: Option<&str>, fallback: Option<&str>) -> String {
    if let Some(m) = sniff_magic(bytes) {
        return m.to_string();
    }
    if let Some(m) = name.and_then(from_extension) {
        return m;
    }
    fallback
        .filter(|m| !m.is_empty())
        .unwrap_or(OCTET_STREAM)
        .to_string()
}

/// Strips parameters and lowercases: `Text/HTML; charset=utf-8` -> `text/html`.
pub fn essence(media_type: &str) -> String {
    media_type
        .split(';')
        .next()
        .unwrap_or("")
        .trim()
        .to_ascii_lowercase()
}

pub fn is_textual(media_type: &str) -> bool {
    let m = essence(media_type);
    m.starts_with("text/")
        || m.ends_with("+xml")
        || m.ends_with("+json")
        || matches!(
            m.as_str(),
            "application/json"
                | "application/xml"
                | "application/n-triples"
                | "application/javascript"
                | "application/xhtml+xml"
        )
}
