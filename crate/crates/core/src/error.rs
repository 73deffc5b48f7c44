use std::fmt;

use thiserror::Error;

/// Why a resolution step failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ErrorCode {
    UnknownMethod,
    UnsupportedMethodForKind,
    NotFound,
    IndexOutOfRange,
    BadParamCount,
    BadParamFormat,
    PathEscapesRoot,
    ConversionUnavailable,
    DownloadFailed,
    SelectorNoMatch,
    /// I/O or other faults not caused by the link itself.
    Internal,
}

impl ErrorCode {
    pub fn name(self) -> &'static str {
        match self {
            ErrorCode::UnknownMethod => "UnknownMethod",
            ErrorCode::UnsupportedMethodForKind => "UnsupportedMethodForKind",
            ErrorCode::NotFound => "NotFound",
            ErrorCode::IndexOutOfRange => "IndexOutOfRange",
            ErrorCode::BadParamCount => "BadParamCount",
            ErrorCode::BadParamFormat => "BadParamFormat",
            ErrorCode::PathEscapesRoot => "PathEscapesRoot",
            ErrorCode::ConversionUnavailable => "ConversionUnavailable",
            ErrorCode::DownloadFailed => "DownloadFailed",
            ErrorCode::SelectorNoMatch => "SelectorNoMatch",
            ErrorCode::Internal => "Internal",
        }
    }

    /// HTTP status used when this error ends a request.
    pub fn http_status(self) -> u16 {
        match self {
            ErrorCode::NotFound | ErrorCode::SelectorNoMatch | ErrorCode::IndexOutOfRange => 404,
            ErrorCode::UnsupportedMethodForKind | ErrorCode::ConversionUnavailable => 422,
            ErrorCode::PathEscapesRoot => 403,
            ErrorCode::DownloadFailed => 502,
            ErrorCode::UnknownMethod | ErrorCode::BadParamCount | ErrorCode::BadParamFormat => 400,
            ErrorCode::Internal => 500,
        }
    }
}

impl fmt::Display for ErrorCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Failure of a single step, before its position in the link is known.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{code}: {detail}")]
pub struct StepError {
    pub code: ErrorCode,
    pub detail: String,
}

impl StepError {
    pub fn new(code: ErrorCode, detail: impl Into<String>) -> StepError {
        StepError {
            code,
            detail: detail.into(),
        }
    }

    pub fn at(self, segment: usize) -> ResolveError {
        ResolveError {
            code: self.code,
            at_segment: segment,
            detail: self.detail,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("segment {at_segment}: {code}: {detail}")]
pub struct ResolveError {
    pub code: ErrorCode,
    pub at_segment: usize,
    pub detail: String,
}
