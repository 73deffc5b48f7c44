#![allow(dead_code)]

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Duration;

use deeplinker::fetch::Fetched;
use deeplinker::server;
use deeplinker::service::{Service, ServiceConfig};

pub const BASE_IRI: &str = "http://localhost:7276";
pub const SECRET: &str = "outside the root, never served";

pub const LOGO_RECT: &str = "/filesystem/a.png/content/to@image/rect@600,109,188,36";
pub const SLIDE_SHAPE: &str = "/filesystem/b.pptx/content/to@powerpoint/index@3/cssSelector@svg%2B%253E%2Bg%2B%253E%2Bg%253Anth-child%252843%2529";
pub const THIRD_LINE: &str = "/filesystem/c.txt/content/to@string/line@2";
pub const W3C_PARTICIPATE: &str = "/remote/download@http%253A%252F%252Fw3c.org,*%252F*/content/to@html/cssSelector@%2523w3c_nav%2520%253E%2520form%253Anth-child(2)%2520%253E%2520ul.main_nav%2520%253E%2520li%253Anth-child(2)%2520%253E%2520a";

pub fn fixtures_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests").join("fixtures")
}

fn copy_tree(from: &Path, to: &Path) {
    fs::create_dir_all(to).unwrap();
    for entry in fs::read_dir(from).unwrap() {
        let entry = entry.unwrap();
        let target = to.join(entry.file_name());
        if entry.file_type().unwrap().is_dir() {
            copy_tree(&entry.path(), &target);
        } else {
            fs::copy(entry.path(), target).unwrap();
        }
    }
}

/// A private copy of the fixture tree plus state directories, a symlink
/// pointing out of the root and a download cache holding the w3c page.
pub struct Fixture {
    pub tmp: tempfile::TempDir,
    pub config: ServiceConfig,
}

impl Fixture {
    pub fn new() -> Fixture {
        let tmp = tempfile::tempdir().unwrap();
        let root = tmp.path().join("root");
        copy_tree(&fixtures_dir().join("root"), &root);
        let outside = tmp.path().join("outside");
        fs::create_dir_all(&outside).unwrap();
        fs::write(outside.join("secret.txt"), SECRET).unwrap();
        #[cfg(unix)]
        {
            std::os::unix::fs::symlink(&outside, root.join("escape")).unwrap();
            std::os::unix::fs::symlink(outside.join("secret.txt"), root.join("docs").join("secret-link.txt")).unwrap();
        }
        let mut config = ServiceConfig::new(&root, tmp.path().join("state"));
        config.base_iri = Some(BASE_IRI.to_string());
        config.port = 0;
        let fx = Fixture { tmp, config };
        let s = fx.service();
        s.resolver()
            .cache()
            .store(
                "http://w3c.org",
                "*/*",
                &Fetched {
                    bytes: fs::read(fixtures_dir().join("w3c.html")).unwrap(),
                    media_type: Some("text/html; charset=utf-8".into()),
                },
            )
            .unwrap();
        fx
    }

    pub fn root(&self) -> &Path {
        &self.config.root
    }

    pub fn service(&self) -> Service {
        Service::from_config(&self.config).unwrap()
    }
}

/// A server on an ephemeral port, running until the process exits.
pub fn start_server(config: &ServiceConfig) -> String {
    let config = config.clone();
    let (tx, rx) = std::sync::mpsc::channel();
    std::thread::spawn(move || {
        let rt = tokio::runtime::Builder::new_multi_thread()
            .worker_threads(4)
            .enable_all()
            .build()
            .unwrap();
        rt.block_on(async move {
            let (addr, fut) = server::bind(&config).await.unwrap();
            tx.send(addr).unwrap();
            fut.await.unwrap();
        });
    });
    let addr = rx.recv_timeout(Duration::from_secs(10)).unwrap();
    format!("http://{addr}")
}

pub fn agent() -> ureq::Agent {
    ureq::AgentBuilder::new()
        .redirects(0)
        .timeout(Duration::from_secs(30))
        .build()
}

pub struct HttpReply {
    pub status: u16,
    pub content_type: String,
    pub location: Option<String>,
    pub body: Vec<u8>,
}

impl HttpReply {
    pub fn text(&self) -> String {
        String::from_utf8_lossy(&self.body).into_owned()
    }
}

fn collect(r: Result<ureq::Response, ureq::Error>) -> HttpReply {
    let resp = match r {
        Ok(r) => r,
        Err(ureq::Error::Status(_, r)) => r,
        Err(e) => panic!("transport error: {e}"),
    };
    let status = resp.status();
    let content_type = resp.header("Content-Type").unwrap_or("").to_string();
    let location = resp.header("Location").map(str::to_string);
    let mut body = Vec::new();
    std::io::Read::read_to_end(&mut resp.into_reader(), &mut body).unwrap();
    HttpReply {
        status,
        content_type,
        location,
        body,
    }
}

pub fn http_get(agent: &ureq::Agent, url: &str, accept: Option<&str>) -> HttpReply {
    let mut req = agent.get(url);
    if let Some(a) = accept {
        req = req.set("Accept", a);
    }
    collect(req.call())
}

pub fn http_post(agent: &ureq::Agent, url: &str, content_type: &str, body: &[u8]) -> HttpReply {
    collect(agent.post(url).set("Content-Type", content_type).send_bytes(body))
}

pub fn http_form(agent: &ureq::Agent, url: &str, fields: &[(&str, &str)]) -> HttpReply {
    collect(agent.post(url).send_form(fields))
}

/// Values of `attr` on every start tag of `html` that has `rel="child"`.
pub fn child_hrefs(html: &str) -> Vec<String> {
    let mut out = Vec::new();
    for tag in html.split('<').skip(1) {
        let tag = tag.split('>').next().unwrap_or("");
        if !tag.starts_with("a ") || !tag.contains("rel=\"child\"") {
            continue;
        }
        if let Some(v) = attr_value(tag, "href") {
            out.push(unescape(&v));
        }
    }
    out
}

fn attr_value(tag: &str, name: &str) -> Option<String> {
    let key = format!(" {name}=\"");
    let start = tag.find(&key)? + key.len();
    let end = tag[start..].find('"')?;
    Some(tag[start..start + end].to_string())
}

fn unescape(s: &str) -> String {
    s.replace("&quot;", "\"")
        .replace("&#39;", "'")
        .replace("&lt;", "<")
        .replace("&gt;", ">")
        .replace("&amp;", "&")
}

/// Number of start tags whose class attribute holds the `highlight` token.
pub fn highlight_count(html: &str) -> usize {
    html.split('<')
        .skip(1)
        .filter_map(|tag| attr_value(tag.split('>').next().unwrap_or(""), "class"))
        .filter(|c| c.split_ascii_whitespace().any(|t| t == "highlight"))
        .count()
}

/// Value of the first start tag carrying `id="<id>"`, as the raw tag text.
pub fn tag_with_id(html: &str, id: &str) -> Option<String> {
    let needle = format!(" id=\"{id}\"");
    html.split('<')
        .skip(1)
        .map(|t| t.split('>').next().unwrap_or(""))
        .find(|t| t.contains(&needle))
        .map(str::to_string)
}

pub fn multipart(field: &str, file_name: &str, bytes: &[u8]) -> (String, Vec<u8>) {
    let boundary = "----deeplinker-test-boundary-7f3a";
    let mut body = Vec::new();
    body.extend_from_slice(format!("--{boundary}\r\n").as_bytes());
    body.extend_from_slice(
        format!("Content-Disposition: form-data; name=\"{field}\"; filename=\"{file_name}\"\r\n").as_bytes(),
    );
    body.extend_from_slice(b"Content-Type: application/octet-stream\r\n\r\n");
    body.extend_from_slice(bytes);
    body.extend_from_slice(format!("\r\n--{boundary}--\r\n").as_bytes());
    (format!("multipart/form-data; boundary={boundary}"), body)
}
