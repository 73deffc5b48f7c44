//! RDF statements and the two text syntaxes the service reads and writes.

mod ntriples;
mod turtle;

use std::fmt;

use thiserror::Error;

pub use ntriples::{parse_ntriples, write_ntriples};
pub use turtle::{parse_turtle, TurtleWriter};

pub const RDF_TYPE: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";
pub const RDFS_COMMENT: &str = "http://www.w3.org/2000/01/rdf-schema#comment";
pub const BOOKMARK_CLASS: &str = "https://www.w3.org/2002/01/bookmark#Bookmark";
pub const XSD: &str = "http://www.w3.org/2001/XMLSchema#";
/// Namespace for file metadata terms.
pub const VOCAB: &str = "http://purl.org/deeplinker/vocab#";

/// Prefixes understood in forms and written into Turtle output.
pub const WELL_KNOWN_PREFIXES: &[(&str, &str)] = &[
    ("rdf", "http://www.w3.org/1999/02/22-rdf-syntax-ns#"),
    ("rdfs", "http://www.w3.org/2000/01/rdf-schema#"),
    ("xsd", XSD),
    ("dl", VOCAB),
    ("bm", "https://www.w3.org/2002/01/bookmark#"),
];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {message}")]
pub struct RdfSyntaxError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Iri(String),
    /// Only produced by document parsers; the annotation store rejects blank nodes.
    Blank(String),
    Literal {
        lexical: String,
        datatype: Option<String>,
        language: Option<String>,
    },
}

impl Term {
    pub fn iri(value: impl Into<String>) -> Term {
        Term::Iri(value.into())
    }

    pub fn literal(lexical: impl Into<String>) -> Term {
        Term::Literal {
            lexical: lexical.into(),
            datatype: None,
            language: None,
        }
    }

    pub fn typed(lexical: impl Into<String>, datatype: impl Into<String>) -> Term {
        Term::Literal {
            lexical: lexical.into(),
            datatype: Some(datatype.into()),
            language: None,
        }
    }

    pub fn lang(lexical: impl Into<String>, language: impl Into<String>) -> Term {
        Term::Literal {
            lexical: lexical.into(),
            datatype: None,
            language: Some(language.into()),
        }
    }

    pub fn as_iri(&self) -> Option<&str> {
        match self {
            Term::Iri(v) => Some(v),
            _ => None,
        }
    }

    pub fn lexical(&self) -> Option<&str> {
        match self {
            Term::Literal { lexical, .. } => Some(lexical),
            _ => None,
        }
    }

    pub fn is_literal(&self) -> bool {
        matches!(self, Term::Literal { .. })
    }

    /// Human-readable value: IRI text, `_:label`, or the lexical form.
    pub fn display_value(&self) -> String {
        match self {
            Term::Iri(v) => v.clone(),
            Term::Blank(b) => format!("_:{b}"),
            Term::Literal { lexical, .. } => lexical.clone(),
        }
    }
}

/// N-Triples rendering of a single term.
impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Iri(v) => write!(f, "<{}>", ntriples::escape_iri(v)),
            Term::Blank(b) => write!(f, "_:{b}"),
            Term::Literal {
                lexical,
                datatype,
                language,
            } => {
                write!(f, "\"{}\"", ntriples::escape_string(lexical))?;
                if let Some(lang) = language {
                    write!(f, "@{lang}")
                } else if let Some(dt) = datatype {
                    write!(f, "^^<{}>", ntriples::escape_iri(dt))
                } else {
                    Ok(())
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Triple {
    pub subject: Term,
    pub predicate: String,
    pub object: Term,
}

impl Triple {
    pub fn new(subject: Term, predicate: impl Into<String>, object: Term) -> Triple {
        Triple {
            subject,
            predicate: predicate.into(),
            object,
        }
    }

    /// The subject IRI, when the subject is not a blank node.
    pub fn subject_iri(&self) -> Option<&str> {
        self.subject.as_iri()
    }
}

impl fmt::Display for Triple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} <{}> {} .",
            self.subject,
            ntriples::escape_iri(&self.predicate),
            self.object
        )
    }
}

/// Absolute IRI check: a scheme, a colon and a non-empty remainder without
/// characters that IRIREF forbids.
pub fn is_absolute_iri(s: &str) -> bool {
    let Some((scheme, rest)) = s.split_once(':') else {
        return false;
    };
    let mut sc = scheme.chars();
    sc.next().is_some_and(|c| c.is_ascii_alphabetic())
        && sc.all(|c| c.is_ascii_alphanumeric() || matches!(c, '+' | '-' | '.'))
        && !rest.is_empty()
        && !s.chars().any(|c| {
            c.is_control() || c.is_whitespace() || matches!(c, '<' | '>' | '"' | '{' | '}' | '|' | '\\' | '^' | '`')
        })
}

/// Expands `rdfs:comment`-style names with the well-known prefixes.
pub fn expand_prefixed(s: &str) -> Option<String> {
    let (prefix, local) = s.split_once(':')?;
    WELL_KNOWN_PREFIXES
        .iter()
        .find(|(p, _)| *p == prefix)
        .map(|(_, ns)| format!("{ns}{local}"))
}
