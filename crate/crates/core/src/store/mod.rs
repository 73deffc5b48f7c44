//! RDF statements about deep links.
//!
//! The default backend keeps an in-memory index and appends every new
//! triple to an N-Triples journal. The alternative backend forwards
//! everything to a SPARQL 1.1 protocol endpoint.

mod embedded;
pub mod endpoint;
mod sparql;

use std::collections::HashSet;
use std::path::Path;

use thiserror::Error;

use crate::link::DeepLink;
use crate::rdf::{is_absolute_iri, Term, Triple, BOOKMARK_CLASS, RDF_TYPE};

pub use embedded::EmbeddedBackend;
pub use sparql::SparqlBackend;

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("storage failure: {0}")]
    StorageFailure(String),
    #[error("SPARQL endpoint unreachable: {0}")]
    EndpointUnreachable(String),
    #[error("invalid request: {0}")]
    Invalid(String),
}

pub type StoreResult<T> = Result<T, StoreError>;

/// Storage operations a backend provides; validation and the bookmark
/// convention live in [`AnnotationStore`].
pub trait Backend: Send + Sync {
    /// Adds a triple; returns `false` when it was already present.
    fn add(&self, triple: &Triple) -> StoreResult<bool>;
    /// Triples with this subject, in insertion order.
    fn by_subject(&self, subject: &str) -> StoreResult<Vec<Triple>>;
    /// Triples whose object is a literal containing `needle_lower`
    /// (compared lowercased).
    fn literal_matches(&self, needle_lower: &str) -> StoreResult<Vec<Triple>>;
    /// Subjects of triples with the given predicate and IRI object.
    fn subjects_with(&self, predicate: &str, object_iri: &str) -> StoreResult<Vec<String>>;
    /// Every stored triple.
    fn all(&self) -> StoreResult<Vec<Triple>>;
}

pub struct AnnotationStore {
    backend: Box<dyn Backend>,
}

impl AnnotationStore {
    pub fn new(backend: Box<dyn Backend>) -> AnnotationStore {
        AnnotationStore { backend }
    }

    /// Embedded store replaying (and then appending to) `journal`.
    pub fn open(journal: &Path) -> StoreResult<AnnotationStore> {
        Ok(AnnotationStore::new(Box::new(EmbeddedBackend::open(journal)?)))
    }

    /// Embedded store without a journal.
    pub fn in_memory() -> AnnotationStore {
        AnnotationStore::new(Box::new(EmbeddedBackend::in_memory()))
    }

    /// External mode against a SPARQL 1.1 protocol endpoint.
    pub fn sparql(endpoint: &str) -> AnnotationStore {
        AnnotationStore::new(Box::new(SparqlBackend::new(endpoint)))
    }

    pub fn add_triple(&self, triple: Triple) -> StoreResult<()> {
        validate(&triple)?;
        self.backend.add(&triple)?;
        Ok(())
    }

    pub fn list_by_subject(&self, subject: &str) -> StoreResult<Vec<Triple>> {
        self.backend.by_subject(subject).map(dedup)
    }

    /// Case-insensitive substring search over literal values.
    pub fn search_literal(&self, needle: &str) -> StoreResult<Vec<(String, Triple)>> {
        if needle.is_empty() {
            return Err(StoreError::Invalid("search needle must not be empty".into()));
        }
        let needle_lower = needle.to_lowercase();
        let rows = self
            .backend
            .literal_matches(&needle_lower)?
            .into_iter()
            .filter(|t| {
                t.object
                    .lexical()
                    .is_some_and(|l| l.to_lowercase().contains(&needle_lower))
            })
            .filter_map(|t| Some((t.subject_iri()?.to_string(), t)));
        let mut seen = HashSet::new();
        Ok(rows.filter(|row| seen.insert(row.clone())).collect())
    }

    pub fn add_bookmark(&self, link: &DeepLink, base_iri: &str) -> StoreResult<()> {
        self.add_triple(bookmark_triple(link, base_iri))
    }

    pub fn is_bookmarked(&self, subject: &str) -> StoreResult<bool> {
        Ok(self
            .list_by_subject(subject)?
            .iter()
            .any(is_bookmark_triple))
    }

    pub fn list_bookmarks(&self) -> StoreResult<Vec<String>> {
        let mut seen = HashSet::new();
        Ok(self
            .backend
            .subjects_with(RDF_TYPE, BOOKMARK_CLASS)?
            .into_iter()
            .filter(|s| seen.insert(s.clone()))
            .collect())
    }

    pub fn all_triples(&self) -> StoreResult<Vec<Triple>> {
        self.backend.all().map(dedup)
    }
}

fn dedup(triples: Vec<Triple>) -> Vec<Triple> {
    let mut seen = HashSet::new();
    triples.into_iter().filter(|t| seen.insert(t.clone())).collect()
}

fn validate(t: &Triple) -> StoreResult<()> {
    match &t.subject {
        Term::Iri(s) if is_absolute_iri(s) => {}
        _ => return Err(StoreError::Invalid("subject must be an absolute IRI".into())),
    }
    if !is_absolute_iri(&t.predicate) {
        return Err(StoreError::Invalid("predicate must be an absolute IRI".into()));
    }
    match &t.object {
        Term::Iri(o) if !is_absolute_iri(o) => {
            Err(StoreError::Invalid("object IRI must be absolute".into()))
        }
        Term::Blank(_) => Err(StoreError::Invalid("blank nodes are not stored".into())),
        Term::Literal {
            datatype: Some(_),
            language: Some(_),
            ..
        } => Err(StoreError::Invalid(
            "a literal has either a datatype or a language tag".into(),
        )),
        _ => Ok(()),
    }
}

/// Absolute IRI naming a deep link: base IRI plus the canonical path.
pub fn subject_iri(base_iri: &str, link: &DeepLink) -> String {
    format!("{}{}", base_iri.trim_end_matches('/'), link.serialize())
}

pub fn bookmark_triple(link: &DeepLink, base_iri: &str) -> Triple {
    Triple::new(
        Term::iri(subject_iri(base_iri, link)),
        RDF_TYPE,
        Term::iri(BOOKMARK_CLASS),
    )
}

pub fn is_bookmark_triple(t: &Triple) -> bool {
    t.predicate == RDF_TYPE && t.object.as_iri() == Some(BOOKMARK_CLASS)
}
