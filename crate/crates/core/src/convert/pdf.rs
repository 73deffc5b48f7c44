//! Header-level PDF support: version and an estimated page count.

use std::sync::Arc;

use crate::error::{ErrorCode, StepError};
use crate::resource::Pdf;

pub fn read_pdf(bytes: Arc<[u8]>) -> Result<Pdf, StepError> {
    let Some(rest) = bytes.strip_prefix(b"%PDF-") else {
        return Err(StepError::new(ErrorCode::ConversionUnavailable, "missing %PDF- header"));
    };
    let version: String = rest
        .iter()
        .take_while(|b| b.is_ascii_digit() || **b == b'.')
        .map(|&b| b as char)
        .collect();
    if version.is_empty() {
        return Err(StepError::new(ErrorCode::BadParamFormat, "PDF header has no version"));
    }
    let page_count_estimate = count_pages(&bytes);
    Ok(Pdf {
        version,
        page_count_estimate,
        bytes,
    })
}

/// Counts `/Type /Page` entries (not `/Pages`) in the uncompressed bytes.
fn count_pages(bytes: &[u8]) -> usize {
    let needle = b"/Type";
    let mut count = 0;
    let mut i = 0;
    while i + needle.len() <= bytes.len() {
        if &bytes[i..i + needle.len()] != needle {
            i += 1;
            continue;
        }
        let mut j = i + needle.len();
        while bytes.get(j).is_some_and(|b| b.is_ascii_whitespace()) {
            j += 1;
        }
        if bytes[j..].starts_with(b"/Page")
            && !bytes
                .get(j + 5)
                .is_some_and(|b| b.is_ascii_alphanumeric())
        {
            count += 1;
        }
        i = j.max(i + 1);
    }
    count
}
