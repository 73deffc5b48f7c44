//! HTTP front end over [`Service`].

use std::collections::HashMap;
use std::io;
use std::net::SocketAddr;
use std::sync::Arc;

use axum::body::{Body, Bytes};
use axum::extract::{DefaultBodyLimit, Multipart, Path, Query, State};
use axum::http::{header, HeaderMap, Method, StatusCode, Uri};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Form, Router};

use crate::service::{AnnotationForm, Reply, Service, ServiceConfig, StartError, MAX_UPLOAD_BYTES};

const SPARQL_PATH: &str = "/fuseki/annotation";

type Shared = Arc<Service>;

impl IntoResponse for Reply {
    fn into_response(self) -> Response {
        let status = StatusCode::from_u16(self.status).unwrap_or(StatusCode::INTERNAL_SERVER_ERROR);
        let mut builder = Response::builder().status(status);
        if !self.body.is_empty() || status != StatusCode::NO_CONTENT {
            builder = builder.header(header::CONTENT_TYPE, self.media_type);
        }
        if let Some(loc) = self.location {
            builder = builder.header(header::LOCATION, loc);
        }
        builder
            .body(Body::from(self.body))
            .unwrap_or_else(|_| StatusCode::INTERNAL_SERVER_ERROR.into_response())
    }
}

fn plain(status: StatusCode, text: impl Into<String>) -> Response {
    (status, [(header::CONTENT_TYPE, "text/plain; charset=utf-8")], text.into()).into_response()
}

/// Runs blocking service work off the async executor.
async fn blocking<F>(service: Shared, f: F) -> Response
where
    F: FnOnce(&Service) -> Reply + Send + 'static,
{
    match tokio::task::spawn_blocking(move || f(&service)).await {
        Ok(reply) => reply.into_response(),
        Err(e) => {
            tracing::error!("handler failed: {e}");
            plain(StatusCode::INTERNAL_SERVER_ERROR, "internal error")
        }
    }
}

fn accept_of(headers: &HeaderMap) -> Option<String> {
    headers
        .get(header::ACCEPT)
        .and_then(|v| v.to_str().ok())
        .map(str::to_string)
}

pub fn router(service: Arc<Service>) -> Router {
    Router::new()
        .route("/annotations", post(annotate))
        .route("/remote", post(upload).get(deep_link))
        .route("/search", get(search))
        .route(SPARQL_PATH, get(sparql_get).post(sparql_post))
        .route("/assets/*path", get(asset))
        .fallback(fallback)
        .layer(DefaultBodyLimit::max(MAX_UPLOAD_BYTES + 1024 * 1024))
        .with_state(service)
}

async fn fallback(State(s): State<Shared>, method: Method, uri: Uri, headers: HeaderMap) -> Response {
    if method != Method::GET && method != Method::HEAD {
        let mut r = plain(StatusCode::METHOD_NOT_ALLOWED, "only GET and HEAD are supported here");
        r.headers_mut().insert(header::ALLOW, "GET, HEAD".parse().expect("static header"));
        return r;
    }
    deep_link(State(s), uri, headers).await
}

async fn deep_link(State(s): State<Shared>, uri: Uri, headers: HeaderMap) -> Response {
    let path = uri.path().to_string();
    let accept = accept_of(&headers);
    blocking(s, move |s| s.get(&path, accept.as_deref())).await
}

async fn annotate(State(s): State<Shared>, Form(form): Form<HashMap<String, String>>) -> Response {
    let mut form = form;
    let form = AnnotationForm {
        subject: form.remove("subject").unwrap_or_default(),
        predicate: form.remove("predicate").unwrap_or_default(),
        object: form.remove("object").unwrap_or_default(),
        object_type: form.remove("type"),
    };
    blocking(s, move |s| s.annotate(&form)).await
}

async fn upload(State(s): State<Shared>, mut multipart: Multipart) -> Response {
    loop {
        let field = match multipart.next_field().await {
            Ok(Some(f)) => f,
            Ok(None) => return plain(StatusCode::BAD_REQUEST, "expected a multipart file field"),
            Err(e) => return plain(e.status(), e.body_text()),
        };
        let Some(name) = field.file_name().map(str::to_string) else {
            continue;
        };
        let bytes = match field.bytes().await {
            Ok(b) => b,
            Err(e) => return plain(e.status(), e.body_text()),
        };
        return blocking(s, move |s| s.upload(&name, &bytes)).await;
    }
}

async fn search(
    State(s): State<Shared>,
    Query(q): Query<HashMap<String, String>>,
    headers: HeaderMap,
) -> Response {
    let accept = accept_of(&headers);
    blocking(s, move |s| s.search(q.get("q").map(String::as_str), accept.as_deref())).await
}

async fn sparql_get(State(s): State<Shared>, Query(q): Query<HashMap<String, String>>) -> Response {
    match q.get("query").cloned() {
        Some(query) => blocking(s, move |s| s.sparql_query(&query)).await,
        None => plain(StatusCode::BAD_REQUEST, "missing query parameter"),
    }
}

async fn sparql_post(State(s): State<Shared>, headers: HeaderMap, body: Bytes) -> Response {
    let content_type = headers
        .get(header::CONTENT_TYPE)
        .and_then(|v| v.to_str().ok())
        .and_then(|v| v.split(';').next())
        .map(|v| v.trim().to_ascii_lowercase())
        .unwrap_or_default();
    let Ok(text) = String::from_utf8(body.to_vec()) else {
        return plain(StatusCode::BAD_REQUEST, "request body is not UTF-8");
    };
    match content_type.as_str() {
        "application/sparql-query" => blocking(s, move |s| s.sparql_query(&text)).await,
        "application/sparql-update" => blocking(s, move |s| s.sparql_update(&text)).await,
        "application/x-www-form-urlencoded" => {
            let mut form: HashMap<String, String> = match form_pairs(&text) {
                Some(f) => f,
                None => return plain(StatusCode::BAD_REQUEST, "malformed form body"),
            };
            if let Some(update) = form.remove("update") {
                blocking(s, move |s| s.sparql_update(&update)).await
            } else if let Some(query) = form.remove("query") {
                blocking(s, move |s| s.sparql_query(&query)).await
            } else {
                plain(StatusCode::BAD_REQUEST, "expected a query or update field")
            }
        }
        _ => plain(StatusCode::UNSUPPORTED_MEDIA_TYPE, "unsupported content type"),
    }
}

fn form_pairs(text: &str) -> Option<HashMap<String, String>> {
    let uri: Uri = format!("/?{text}").parse().ok()?;
    Query::<HashMap<String, String>>::try_from_uri(&uri).ok().map(|q| q.0)
}

async fn asset(State(s): State<Shared>, Path(path): Path<String>) -> Response {
    let Some(dir) = s.assets_dir().cloned() else {
        return plain(StatusCode::NOT_FOUND, "no assets configured");
    };
    let read = tokio::task::spawn_blocking(move || -> Option<(Vec<u8>, String)> {
        let root = dir.canonicalize().ok()?;
        let file = root.join(&path).canonicalize().ok()?;
        if !file.starts_with(&root) || !file.is_file() {
            return None;
        }
        let mime = mime_guess::from_path(&file).first_or_octet_stream().to_string();
        Some((std::fs::read(&file).ok()?, mime))
    })
    .await;
    match read {
        Ok(Some((bytes, mime))) => ([(header::CONTENT_TYPE, mime)], bytes).into_response(),
        _ => plain(StatusCode::NOT_FOUND, "not found"),
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ServeError {
    #[error(transparent)]
    Start(#[from] StartError),
    #[error("cannot listen on {addr}: {source}")]
    Bind { addr: String, source: io::Error },
    #[error("server failed: {0}")]
    Io(#[from] io::Error),
}

/// Binds the listener; returns the bound address and a future that serves.
pub async fn bind(
    config: &ServiceConfig,
) -> Result<(SocketAddr, impl std::future::Future<Output = io::Result<()>>), ServeError> {
    let service = Arc::new(Service::from_config(config)?);
    let addr = match config.bind.parse::<std::net::IpAddr>() {
        Ok(ip) => SocketAddr::new(ip, config.port).to_string(),
        Err(_) => format!("{}:{}", config.bind, config.port),
    };
    let listener = tokio::net::TcpListener::bind(&addr)
        .await
        .map_err(|source| ServeError::Bind { addr: addr.clone(), source })?;
    let local = listener.local_addr()?;
    let app = router(service);
    Ok((local, async move { axum::serve(listener, app).await }))
}

pub async fn serve(config: &ServiceConfig) -> Result<(), ServeError> {
    let (addr, server) = bind(config).await?;
    tracing::info!("listening on http://{addr}");
    server.await?;
    Ok(())
}
