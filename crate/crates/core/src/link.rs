//! Deep-link path grammar.
//!
//! A deep link is a URI path whose segments are chained method calls:
//!
//! ```text
//! path      = "/" segment *( "/" segment ) [ "/" ]
//! segment   = method "@" params | shorthand
//! method    = ALPHA *( ALPHA / DIGIT )
//! params    = param *( "," param )
//! shorthand = param                ; same as "child@" param
//! ```
//!
//! Every param travels percent-encoded twice: once for the URI layer and
//! once for the parameter layer. Parsing therefore decodes each param
//! exactly twice. The parameter layer also reads `+` as a space, the way
//! form-encoded values do, so `svg%2B%253E%2Bg` decodes to `svg > g`.
//!
//! Serialization escapes every byte outside the RFC 3986 unreserved set
//! in both passes, so any param (including `/ , @ % +` and non-ASCII
//! text) survives a round trip.

use std::fmt;

use percent_encoding::{percent_encode, AsciiSet, NON_ALPHANUMERIC};
use thiserror::Error;

/// Bytes escaped by one encoding pass: everything except ALPHA / DIGIT / `-` `.` `_` `~`.
const PARAM_ESCAPE: &AsciiSet = &NON_ALPHANUMERIC
    .remove(b'-')
    .remove(b'.')
    .remove(b'_')
    .remove(b'~');

/// Method applied when a segment carries no `@`.
pub const DEFAULT_METHOD: &str = "child";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinkError {
    #[error("deep link must start with '/'")]
    NotAbsolute,
    #[error("deep link has no segments")]
    Empty,
    #[error("empty path segment at position {0}")]
    EmptySegment(usize),
    #[error("bad method name {name:?} in segment {index}")]
    BadMethodName { index: usize, name: String },
    #[error("malformed percent-escape in segment {index}: {detail}")]
    BadPercentEscape { index: usize, detail: String },
}

impl LinkError {
    /// Segment position the error refers to, when there is one.
    pub fn segment(&self) -> Option<usize> {
        match self {
            LinkError::NotAbsolute | LinkError::Empty => None,
            LinkError::EmptySegment(i) => Some(*i),
            LinkError::BadMethodName { index, .. } | LinkError::BadPercentEscape { index, .. } => {
                Some(*index)
            }
        }
    }

    pub fn code(&self) -> &'static str {
        match self {
            LinkError::NotAbsolute => "NotAbsolute",
            LinkError::Empty => "Empty",
            LinkError::EmptySegment(_) => "EmptySegment",
            LinkError::BadMethodName { .. } => "BadMethodName",
            LinkError::BadPercentEscape { .. } => "BadPercentEscape",
        }
    }
}

/// One `<method>@<p1>,...,<pN>` step of a deep link. Params are stored decoded.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Segment {
    method: String,
    params: Vec<String>,
}

impl Segment {
    /// Builds a segment, checking the method identifier.
    ///
    /// The param list must be non-empty: `method@` already denotes a single
    /// empty param, so a segment without params has no serialized form.
    pub fn new<M, I, P>(method: M, params: I) -> Option<Segment>
    where
        M: Into<String>,
        I: IntoIterator<Item = P>,
        P: Into<String>,
    {
        let method = method.into();
        let params: Vec<String> = params.into_iter().map(Into::into).collect();
        if !is_method_name(&method) || params.is_empty() {
            return None;
        }
        Some(Segment { method, params })
    }

    /// `child@<name>`.
    pub fn child(name: impl Into<String>) -> Segment {
        Segment {
            method: DEFAULT_METHOD.to_string(),
            params: vec![name.into()],
        }
    }

    /// Single-param segment with a method known to be valid.
    pub(crate) fn unary(method: &str, param: impl Into<String>) -> Segment {
        debug_assert!(is_method_name(method));
        Segment {
            method: method.to_string(),
            params: vec![param.into()],
        }
    }

    pub fn method(&self) -> &str {
        &self.method
    }

    pub fn params(&self) -> &[String] {
        &self.params
    }

    fn is_shorthand(&self) -> bool {
        self.method == DEFAULT_METHOD
            && self.params.len() == 1
            && !self.params[0].is_empty()
            && !self.params[0].contains('@')
    }

    fn write_to(&self, out: &mut String) {
        if self.is_shorthand() {
            out.push_str(&encode_param(&self.params[0]));
            return;
        }
        out.push_str(&self.method);
        out.push('@');
        for (i, p) in self.params.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            out.push_str(&encode_param(p));
        }
    }
}

impl fmt::Display for Segment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        self.write_to(&mut s);
        f.write_str(&s)
    }
}

/// A parsed deep link: a non-empty chain of segments.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DeepLink {
    segments: Vec<Segment>,
}

impl DeepLink {
    pub fn from_segments(segments: Vec<Segment>) -> Option<DeepLink> {
        if segments.is_empty() {
            None
        } else {
            Some(DeepLink { segments })
        }
    }

    /// Single-segment link to an entry point such as `filesystem`.
    pub fn entry(name: &str) -> DeepLink {
        DeepLink {
            segments: vec![Segment::child(name)],
        }
    }

    /// Parses a raw request path, exactly as received on the wire.
    pub fn parse(raw: &str) -> Result<DeepLink, LinkError> {
        let rest = raw.strip_prefix('/').ok_or(LinkError::NotAbsolute)?;
        let rest = rest.strip_suffix('/').unwrap_or(rest);
        if rest.is_empty() {
            return Err(LinkError::Empty);
        }
        let segments = rest
            .split('/')
            .enumerate()
            .map(|(index, piece)| parse_segment(index, piece))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(DeepLink { segments })
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn len(&self) -> usize {
        self.segments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }

    /// A new link with `segment` appended; `self` is left untouched.
    pub fn append(&self, segment: Segment) -> DeepLink {
        let mut segments = Vec::with_capacity(self.segments.len() + 1);
        segments.extend_from_slice(&self.segments);
        segments.push(segment);
        DeepLink { segments }
    }

    /// The first `len` segments, or `None` when `len` is zero or too large.
    pub fn prefix(&self, len: usize) -> Option<DeepLink> {
        if len == 0 || len > self.segments.len() {
            return None;
        }
        Some(DeepLink {
            segments: self.segments[..len].to_vec(),
        })
    }

    /// Canonical wire form of the link.
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        for seg in &self.segments {
            out.push('/');
            seg.write_to(&mut out);
        }
        out
    }
}

impl fmt::Display for DeepLink {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.serialize())
    }
}

impl std::str::FromStr for DeepLink {
    type Err = LinkError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        DeepLink::parse(s)
    }
}

fn parse_segment(index: usize, piece: &str) -> Result<Segment, LinkError> {
    if piece.is_empty() {
        return Err(LinkError::EmptySegment(index));
    }
    let Some((method, params)) = piece.split_once('@') else {
        return Ok(Segment::child(decode_param(index, piece)?));
    };
    if !is_method_name(method) {
        return Err(LinkError::BadMethodName {
            index,
            name: method.to_string(),
        });
    }
    let params = params
        .split(',')
        .map(|p| decode_param(index, p))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Segment {
        method: method.to_string(),
        params,
    })
}

pub fn is_method_name(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric())
}

/// Encodes a decoded param for the wire (two escaping passes).
pub fn encode_param(param: &str) -> String {
    let once = percent_encode(param.as_bytes(), PARAM_ESCAPE).to_string();
    percent_encode(once.as_bytes(), PARAM_ESCAPE).to_string()
}

/// Decodes a wire param: URI layer, then parameter layer.
pub fn decode_param(index: usize, raw: &str) -> Result<String, LinkError> {
    let bad = |detail: String| LinkError::BadPercentEscape { index, detail };
    let uri_layer = strict_percent_decode(raw.as_bytes(), false).map_err(bad)?;
    let param_layer = strict_percent_decode(&uri_layer, true).map_err(bad)?;
    String::from_utf8(param_layer).map_err(|_| LinkError::BadPercentEscape {
        index,
        detail: "decoded param is not UTF-8".to_string(),
    })
}

/// Percent-decoding that rejects `%` not followed by two hex digits.
/// The `percent-encoding` crate passes such sequences through silently.
fn strict_percent_decode(input: &[u8], plus_is_space: bool) -> Result<Vec<u8>, String> {
    let mut out = Vec::with_capacity(input.len());
    let mut i = 0;
    while i < input.len() {
        match input[i] {
            b'%' => {
                let hex = input
                    .get(i + 1..i + 3)
                    .filter(|h| h.iter().all(u8::is_ascii_hexdigit))
                    .ok_or_else(|| {
                        let end = (i + 3).min(input.len());
                        format!("'{}'", String::from_utf8_lossy(&input[i..end]))
                    })?;
                out.push(hex_value(hex[0]) << 4 | hex_value(hex[1]));
                i += 3;
            }
            b'+' if plus_is_space => {
                out.push(b' ');
                i += 1;
            }
            b => {
                out.push(b);
                i += 1;
            }
        }
    }
    Ok(out)
}

fn hex_value(b: u8) -> u8 {
    match b {
        b'0'..=b'9' => b - b'0',
        b'a'..=b'f' => b - b'a' + 10,
        _ => b - b'A' + 10,
    }
}
