//! Request handling independent of the HTTP stack: every operation takes
//! plain inputs and returns a [`Reply`].

use std::io;
use std::net::IpAddr;
use std::path::PathBuf;
use std::sync::Arc;

use serde_json::json;
use thiserror::Error;

use crate::error::ErrorCode;
use crate::link::DeepLink;
use crate::rdf::{expand_prefixed, is_absolute_iri, Term, Triple};
use crate::render::{self, Format, PageContext, SearchHit};
use crate::resolve::{Resolver, ResolverConfig};
use crate::resource::{Resource, ResourceKind};
use crate::store::{endpoint, is_bookmark_triple, AnnotationStore, StoreError};

pub const DEFAULT_PORT: u16 = 7276;
pub const MAX_UPLOAD_BYTES: usize = 64 * 1024 * 1024;
pub const SPARQL_RESULTS: &str = "application/sparql-results+json";

#[derive(Debug, Clone)]
pub struct ServiceConfig {
    pub root: PathBuf,
    pub bind: String,
    pub port: u16,
    /// Defaults to `http://<bind>:<port>`.
    pub base_iri: Option<String>,
    pub sparql_endpoint: Option<String>,
    pub upload_dir: PathBuf,
    pub cache_dir: PathBuf,
    pub journal: PathBuf,
    /// Directory served under `/assets/`.
    pub assets_dir: Option<PathBuf>,
}

impl ServiceConfig {
    /// Defaults with all state under `state_dir`.
    pub fn new(root: impl Into<PathBuf>, state_dir: impl Into<PathBuf>) -> ServiceConfig {
        let state: PathBuf = state_dir.into();
        ServiceConfig {
            root: root.into(),
            bind: "127.0.0.1".into(),
            port: DEFAULT_PORT,
            base_iri: None,
            sparql_endpoint: None,
            upload_dir: state.join("uploads"),
            cache_dir: state.join("cache"),
            journal: state.join("annotations.nt"),
            assets_dir: None,
        }
    }

    pub fn effective_base_iri(&self) -> String {
        match &self.base_iri {
            Some(b) => b.trim_end_matches('/').to_string(),
            None => match self.bind.parse::<IpAddr>() {
                Ok(IpAddr::V6(a)) => format!("http://[{a}]:{}", self.port),
                _ => format!("http://{}:{}", self.bind, self.port),
            },
        }
    }
}

#[derive(Debug, Error)]
pub enum StartError {
    #[error("root directory {0} does not exist or is not a directory")]
    MissingRoot(PathBuf),
    #[error("base IRI {0:?} is not an absolute IRI")]
    BadBaseIri(String),
    #[error("annotation store: {0}")]
    Store(#[from] StoreError),
    #[error("{0}")]
    Io(#[from] io::Error),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Reply {
    pub status: u16,
    pub media_type: String,
    pub body: Vec<u8>,
    pub location: Option<String>,
}

impl Reply {
    fn new(status: u16, media_type: &str, body: impl Into<Vec<u8>>) -> Reply {
        Reply {
            status,
            media_type: media_type.to_string(),
            body: body.into(),
            location: None,
        }
    }

    fn plain(status: u16, text: impl Into<String>) -> Reply {
        Reply::new(status, "text/plain; charset=utf-8", text.into())
    }

    pub fn body_text(&self) -> String {
        String::from_utf8_lossy(&self.body).into_owned()
    }
}

/// Fields of the annotation form.
#[derive(Debug, Clone, Default)]
pub struct AnnotationForm {
    /// Serialized deep link (`/filesystem/...`) or an absolute IRI under the base IRI.
    pub subject: String,
    pub predicate: String,
    pub object: String,
    /// `iri` or `literal` (the default).
    pub object_type: Option<String>,
}

pub struct Service {
    resolver: Resolver,
    assets_dir: Option<PathBuf>,
}

fn store_status(e: &StoreError) -> u16 {
    match e {
        StoreError::Invalid(_) => 400,
        StoreError::EndpointUnreachable(_) => 502,
        StoreError::StorageFailure(_) => 500,
    }
}

fn wants_json(accept: Option<&str>) -> bool {
    render::negotiate(accept, ResourceKind::String) == Format::Json
}

fn error_reply(status: u16, code: &str, at: Option<usize>, detail: &str, path: &str, accept: Option<&str>) -> Reply {
    if wants_json(accept) {
        let mut body = json!({"status": status, "code": code, "detail": detail});
        if let Some(i) = at {
            body["segment"] = json!(i);
        }
        Reply::new(status, render::JSON, body.to_string())
    } else {
        Reply::new(status, render::HTML, render::render_error_html(status, code, at, detail, path))
    }
}

impl Service {
    pub fn new(resolver: Resolver) -> Service {
        Service {
            resolver,
            assets_dir: None,
        }
    }

    pub fn from_config(config: &ServiceConfig) -> Result<Service, StartError> {
        if !config.root.is_dir() {
            return Err(StartError::MissingRoot(config.root.clone()));
        }
        let base_iri = config.effective_base_iri();
        if !is_absolute_iri(&base_iri) {
            return Err(StartError::BadBaseIri(base_iri));
        }
        let store = match &config.sparql_endpoint {
            Some(url) => AnnotationStore::sparql(url),
            None => AnnotationStore::open(&config.journal)?,
        };
        let resolver = Resolver::new(
            ResolverConfig {
                root: config.root.clone(),
                upload_dir: config.upload_dir.clone(),
                cache_dir: config.cache_dir.clone(),
                base_iri,
            },
            Arc::new(store),
        )?;
        Ok(Service {
            resolver,
            assets_dir: config.assets_dir.clone(),
        })
    }

    pub fn resolver(&self) -> &Resolver {
        &self.resolver
    }

    pub fn store(&self) -> &AnnotationStore {
        self.resolver.store()
    }

    pub fn assets_dir(&self) -> Option<&PathBuf> {
        self.assets_dir.as_ref()
    }

    /// `GET <raw_path>`: parse, resolve, negotiate, render.
    pub fn get(&self, raw_path: &str, accept: Option<&str>) -> Reply {
        if raw_path.trim_end_matches('/').is_empty() {
            let root = self.resolver.root_map();
            return self.represent(&root, None, accept);
        }
        let link = match DeepLink::parse(raw_path) {
            Ok(l) => l,
            Err(e) => return error_reply(400, e.code(), e.segment(), &e.to_string(), raw_path, accept),
        };
        match self.resolver.resolve(&link) {
            Ok(resource) => self.represent(&resource, Some(&link), accept),
            Err(e) => error_reply(
                e.code.http_status(),
                e.code.name(),
                Some(e.at_segment),
                &e.detail,
                raw_path,
                accept,
            ),
        }
    }

    fn represent(&self, resource: &Resource, link: Option<&DeepLink>, accept: Option<&str>) -> Reply {
        let path = link.map_or_else(|| "/".to_string(), DeepLink::serialize);
        let format = render::negotiate(accept, resource.kind());
        let subject_iri = link.map_or_else(|| self.resolver.base_iri().to_string(), |l| self.resolver.subject_iri(l));
        let annotations = match link {
            Some(_) if format != Format::Json => match self.store().list_by_subject(&subject_iri) {
                Ok(ts) => ts,
                Err(e) => {
                    let code = if store_status(&e) == 502 { "EndpointUnreachable" } else { "StorageFailure" };
                    return error_reply(store_status(&e), code, None, &e.to_string(), &path, accept);
                }
            },
            _ => Vec::new(),
        };
        let ctx = PageContext {
            link,
            bookmarked: annotations.iter().any(is_bookmark_triple),
            subject_iri,
            annotations: &annotations,
        };
        let rep = render::render(format, resource, &ctx);
        Reply::new(200, rep.media_type, rep.body)
    }

    /// `POST /annotations`; redirects back to the subject's page.
    pub fn annotate(&self, form: &AnnotationForm) -> Reply {
        let bad = |detail: String| error_reply(400, "BadRequest", None, &detail, "/annotations", None);
        let subject = form.subject.trim();
        let link = if subject.starts_with('/') {
            DeepLink::parse(subject).map_err(|e| e.to_string())
        } else {
            self.resolver
                .link_for_iri(subject)
                .ok_or_else(|| format!("subject {subject:?} is not a deep link served here"))
        };
        let link = match link {
            Ok(l) => l,
            Err(e) => return bad(format!("subject: {e}")),
        };
        let Some(predicate) = expand_iri(&form.predicate) else {
            return bad(format!("predicate {:?} is not an absolute IRI or known prefixed name", form.predicate));
        };
        let object = match form.object_type.as_deref().unwrap_or("literal") {
            "iri" => match expand_iri(&form.object) {
                Some(iri) => Term::Iri(iri),
                None => Term::literal(form.object.clone()),
            },
            "literal" => Term::literal(form.object.clone()),
            other => return bad(format!("unknown object type {other:?}")),
        };
        let triple = Triple::new(Term::iri(self.resolver.subject_iri(&link)), predicate, object);
        match self.store().add_triple(triple) {
            Ok(()) => {
                let mut r = Reply::plain(303, "See Other");
                r.location = Some(link.serialize());
                r
            }
            Err(e) => error_reply(store_status(&e), "AnnotationFailed", None, &e.to_string(), "/annotations", None),
        }
    }

    /// `POST /remote` with one file; replies 201 with the new link.
    pub fn upload(&self, name: &str, bytes: &[u8]) -> Reply {
        if bytes.len() > MAX_UPLOAD_BYTES {
            return Reply::plain(413, format!("uploads are limited to {MAX_UPLOAD_BYTES} bytes"));
        }
        match self.resolver.store_upload(name, bytes) {
            Ok(link) => {
                let path = link.serialize();
                let mut r = Reply::plain(201, format!("{path}\n"));
                r.location = Some(path);
                r
            }
            Err(e) => Reply::plain(500, format!("storing upload failed: {e}")),
        }
    }

    /// `GET /search?q=needle`.
    pub fn search(&self, needle: Option<&str>, accept: Option<&str>) -> Reply {
        let needle = needle.unwrap_or("");
        let rows = match self.store().search_literal(needle) {
            Ok(rows) => rows,
            Err(e) => return error_reply(store_status(&e), "SearchFailed", None, &e.to_string(), "/search", accept),
        };
        let hits: Vec<SearchHit> = rows
            .into_iter()
            .map(|(subject, t)| SearchHit {
                href: self.resolver.link_for_iri(&subject).map(|l| l.serialize()),
                subject,
                predicate: t.predicate.clone(),
                value: t.object.display_value(),
            })
            .collect();
        if wants_json(accept) {
            let results: Vec<_> = hits
                .iter()
                .map(|h| json!({"subject": h.subject, "link": h.href, "predicate": h.predicate, "value": h.value}))
                .collect();
            let body = json!({"query": needle, "results": results});
            return Reply::new(200, render::JSON, serde_json::to_string_pretty(&body).expect("JSON values serialize"));
        }
        Reply::new(200, render::HTML, render::render_search_html(needle, &hits))
    }

    /// SPARQL protocol query against the annotation store.
    pub fn sparql_query(&self, query: &str) -> Reply {
        match endpoint::query(self.store(), query) {
            Ok(doc) => Reply::new(200, SPARQL_RESULTS, doc.to_string()),
            Err(endpoint::EndpointError::Syntax(e)) => Reply::plain(400, e),
            Err(endpoint::EndpointError::Store(e)) => Reply::plain(store_status(&e), e.to_string()),
        }
    }

    /// SPARQL protocol update against the annotation store.
    pub fn sparql_update(&self, update: &str) -> Reply {
        match endpoint::update(self.store(), update) {
            Ok(_) => Reply::new(204, "text/plain", Vec::new()),
            Err(endpoint::EndpointError::Syntax(e)) => Reply::plain(400, e),
            Err(endpoint::EndpointError::Store(e)) => Reply::plain(store_status(&e), e.to_string()),
        }
    }
}

/// Absolute IRI, `<IRI>`, or a prefixed name with a well-known prefix.
fn expand_iri(raw: &str) -> Option<String> {
    let raw = raw.trim();
    let raw = raw.strip_prefix('<').and_then(|r| r.strip_suffix('>')).unwrap_or(raw);
    if let Some(iri) = expand_prefixed(raw) {
        return Some(iri).filter(|i| is_absolute_iri(i));
    }
    is_absolute_iri(raw).then(|| raw.to_string())
}

impl From<ErrorCode> for u16 {
    fn from(code: ErrorCode) -> u16 {
        code.http_status()
    }
}
