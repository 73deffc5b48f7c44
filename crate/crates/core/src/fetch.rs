//! Outbound downloads for `download@url,accept` and the on-disk cache that
//! makes them replayable.
//!
//! Cache layout under the cache directory:
//! `index/<sha256(url LF accept)>.json` describes a response and names its
//! body, stored once as `blobs/<sha256(body)>`. Every file is written to a
//! temporary name and renamed into place.

use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};
use std::time::{Duration, SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const MAX_BODY_BYTES: u64 = 64 * 1024 * 1024;
pub const TIMEOUT: Duration = Duration::from_secs(30);
pub const MAX_REDIRECTS: u32 = 5;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fetched {
    pub bytes: Vec<u8>,
    /// Content-Type of the response, if it had one.
    pub media_type: Option<String>,
}

pub trait Fetcher: Send + Sync {
    fn fetch(&self, url: &str, accept: &str) -> Result<Fetched, String>;
}

/// HTTP(S) GET with the crate's limits; honours `http_proxy`-style
/// environment variables.
pub struct HttpFetcher {
    agent: ureq::Agent,
}

impl Default for HttpFetcher {
    fn default() -> Self {
        HttpFetcher {
            agent: ureq::AgentBuilder::new()
                .timeout(TIMEOUT)
                .redirects(MAX_REDIRECTS)
                .try_proxy_from_env(true)
                .build(),
        }
    }
}

impl Fetcher for HttpFetcher {
    fn fetch(&self, url: &str, accept: &str) -> Result<Fetched, String> {
        let resp = self
            .agent
            .get(url)
            .set("Accept", accept)
            .call()
            .map_err(|e| match e {
                ureq::Error::Status(code, _) => format!("{url} answered {code}"),
                other => other.to_string(),
            })?;
        let media_type = resp.header("Content-Type").map(str::to_string);
        let mut bytes = Vec::new();
        resp.into_reader()
            .take(MAX_BODY_BYTES + 1)
            .read_to_end(&mut bytes)
            .map_err(|e| e.to_string())?;
        if bytes.len() as u64 > MAX_BODY_BYTES {
            return Err(format!("response body exceeds {MAX_BODY_BYTES} bytes"));
        }
        Ok(Fetched { bytes, media_type })
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

pub fn is_hash_name(s: &str) -> bool {
    s.len() == 64 && s.bytes().all(|b| matches!(b, b'0'..=b'9' | b'a'..=b'f'))
}

/// Writes `bytes` to `path` through a temporary sibling and a rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> io::Result<()> {
    static COUNTER: AtomicU64 = AtomicU64::new(0);
    let dir = path.parent().unwrap_or(Path::new("."));
    fs::create_dir_all(dir)?;
    let tmp = dir.join(format!(
        ".tmp-{}-{}",
        std::process::id(),
        COUNTER.fetch_add(1, Ordering::Relaxed)
    ));
    let result = (|| {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    result
}

pub fn now_millis() -> i64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map_or(0, |d| d.as_millis() as i64)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CacheEntry {
    pub url: String,
    pub accept: String,
    pub media_type: Option<String>,
    pub sha256: String,
    pub size: u64,
    pub fetched: i64,
}

pub struct DownloadCache {
    dir: PathBuf,
}

impl DownloadCache {
    pub fn new(dir: impl Into<PathBuf>) -> DownloadCache {
        DownloadCache { dir: dir.into() }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn blob_path(&self, sha256: &str) -> PathBuf {
        self.dir.join("blobs").join(sha256)
    }

    fn index_path(&self, url: &str, accept: &str) -> PathBuf {
        let key = sha256_hex(format!("{url}\n{accept}").as_bytes());
        self.dir.join("index").join(format!("{key}.json"))
    }

    /// The cached response, if both its index entry and body are present.
    pub fn lookup(&self, url: &str, accept: &str) -> Option<CacheEntry> {
        let text = fs::read(self.index_path(url, accept)).ok()?;
        let entry: CacheEntry = serde_json::from_slice(&text).ok()?;
        (entry.url == url
            && entry.accept == accept
            && is_hash_name(&entry.sha256)
            && self.blob_path(&entry.sha256).is_file())
        .then_some(entry)
    }

    /// Stores a response; also how a cache is seeded for offline replay.
    pub fn store(&self, url: &str, accept: &str, fetched: &Fetched) -> io::Result<CacheEntry> {
        let sha256 = sha256_hex(&fetched.bytes);
        let blob = self.blob_path(&sha256);
        if !blob.is_file() {
            write_atomic(&blob, &fetched.bytes)?;
        }
        let entry = CacheEntry {
            url: url.to_string(),
            accept: accept.to_string(),
            media_type: fetched.media_type.clone(),
            sha256,
            size: fetched.bytes.len() as u64,
            fetched: now_millis(),
        };
        let json = serde_json::to_vec_pretty(&entry).map_err(io::Error::other)?;
        write_atomic(&self.index_path(url, accept), &json)?;
        Ok(entry)
    }

    /// Cache first; on a miss, fetch and store.
    pub fn get(&self, fetcher: &dyn Fetcher, url: &str, accept: &str) -> Result<CacheEntry, String> {
        if let Some(entry) = self.lookup(url, accept) {
            return Ok(entry);
        }
        let fetched = fetcher.fetch(url, accept)?;
        self.store(url, accept, &fetched)
            .map_err(|e| format!("cache write failed: {e}"))
    }
}
