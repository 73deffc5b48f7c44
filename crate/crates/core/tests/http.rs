mod common;

use common::*;
use serde_json::Value;

#[test]
fn deep_link_pages_and_errors() {
    let fx = Fixture::new();
    let base = start_server(&fx.config);
    let a = agent();

    let r = http_get(&a, &format!("{base}{THIRD_LINE}"), None);
    assert_eq!(r.status, 200);
    assert!(r.content_type.starts_with("text/html"));
    let page = r.text();
    assert_eq!(highlight_count(&page), 1);
    for id in ["deeplink", "annotation-form", "triples", "bookmark"] {
        assert!(tag_with_id(&page, id).is_some(), "missing #{id}");
    }

    let r = http_get(&a, &format!("{base}{THIRD_LINE}"), Some("application/json"));
    assert_eq!(r.content_type, "application/json");
    let v: Value = serde_json::from_slice(&r.body).unwrap();
    assert_eq!(v["text"], "line three");

    let r = http_get(&a, &format!("{base}/filesystem/nosuch.txt"), Some("application/json"));
    assert_eq!(r.status, 404);
    let v: Value = serde_json::from_slice(&r.body).unwrap();
    assert_eq!((v["code"].as_str(), v["segment"].as_u64()), (Some("NotFound"), Some(1)));

    assert_eq!(http_get(&a, &format!("{base}/filesystem//x"), None).status, 400);
    assert_eq!(http_get(&a, &format!("{base}/filesystem/%252E%252E"), None).status, 403);
    assert_eq!(http_get(&a, &format!("{base}/filesystem/escape/secret.txt"), None).status, 403);
    assert_eq!(http_get(&a, &format!("{base}/"), None).status, 200);

    let r = http_post(&a, &format!("{base}/filesystem/c.txt"), "text/plain", b"x");
    assert_eq!(r.status, 405);
}

#[test]
fn annotation_form_redirects_and_search_finds_it() {
    let fx = Fixture::new();
    let base = start_server(&fx.config);
    let a = agent();
    let r = http_form(
        &a,
        &format!("{base}/annotations"),
        &[("subject", LOGO_RECT), ("predicate", "rdfs:comment"), ("object", "Artificial"), ("type", "literal")],
    );
    assert_eq!(r.status, 303);
    assert_eq!(r.location.as_deref(), Some(LOGO_RECT));

    let page = http_get(&a, &format!("{base}{LOGO_RECT}"), None).text();
    assert!(page.contains("Artificial"));

    let r = http_get(&a, &format!("{base}/search?q=ARTIFICIAL"), Some("application/json"));
    let v: Value = serde_json::from_slice(&r.body).unwrap();
    assert_eq!(v["results"].as_array().unwrap().len(), 1);
    assert_eq!(v["results"][0]["link"], LOGO_RECT);
    let html = http_get(&a, &format!("{base}/search?q=artificial"), None).text();
    assert!(html.contains(&format!("href=\"{LOGO_RECT}\"")));

    let r = http_form(&a, &format!("{base}/annotations"), &[("subject", LOGO_RECT), ("object", "x")]);
    assert_eq!(r.status, 400);
}

#[test]
fn upload_then_browse() {
    let fx = Fixture::new();
    let base = start_server(&fx.config);
    let a = agent();
    let (ct, body) = multipart("file", "notes.txt", b"alpha\nbeta\n");
    let r = http_post(&a, &format!("{base}/remote"), &ct, &body);
    assert_eq!(r.status, 201);
    let link = r.location.unwrap();
    assert!(link.starts_with("/remote/"));
    let r = http_get(&a, &format!("{base}{link}/content/to@string/line@1"), Some("application/json"));
    let v: Value = serde_json::from_slice(&r.body).unwrap();
    assert_eq!(v["text"], "beta");

    let (ct, body) = multipart("file", "big.bin", &vec![0u8; 64 * 1024 * 1024 + 10]);
    let r = http_post(&a, &format!("{base}/remote"), &ct, &body);
    assert_eq!(r.status, 413);

    let r = http_post(&a, &format!("{base}/remote"), "multipart/form-data; boundary=x", b"--x--\r\n");
    assert_eq!(r.status, 400);
}

#[test]
fn sparql_protocol() {
    let fx = Fixture::new();
    let base = start_server(&fx.config);
    let a = agent();
    let url = format!("{base}/fuseki/annotation");
    let update = format!("INSERT DATA {{ <{BASE_IRI}/filesystem/note.txt> <http://www.w3.org/2000/01/rdf-schema#comment> \"hi\" }}");
    let r = http_post(&a, &url, "application/sparql-update", update.as_bytes());
    assert_eq!(r.status, 204);

    let q = "SELECT ?s ?o WHERE { ?s rdfs:comment ?o }";
    let r = http_post(&a, &url, "application/sparql-query", q.as_bytes());
    assert_eq!(r.status, 200);
    assert!(r.content_type.starts_with("application/sparql-results+json"));
    let v: Value = serde_json::from_slice(&r.body).unwrap();
    let row = &v["results"]["bindings"][0];
    assert_eq!(row["s"]["value"], format!("{BASE_IRI}/filesystem/note.txt"));
    assert_eq!(row["o"]["value"], "hi");

    let encoded: String = q.bytes().map(|b| format!("%{b:02X}")).collect();
    let r = http_get(&a, &format!("{url}?query={encoded}"), None);
    assert_eq!(r.status, 200);
    let r = http_form(&a, &url, &[("query", q)]);
    assert_eq!(r.status, 200);

    assert_eq!(http_post(&a, &url, "application/sparql-query", b"SELEKT").status, 400);
    assert_eq!(http_post(&a, &url, "text/plain", b"x").status, 415);

    let page = http_get(&a, &format!("{base}/filesystem/note.txt"), None).text();
    assert!(page.contains("data-object=\"hi\""));
}

#[test]
fn assets_are_jailed() {
    let mut fx = Fixture::new();
    let assets = fx.tmp.path().join("assets");
    std::fs::create_dir_all(&assets).unwrap();
    std::fs::write(assets.join("app.css"), "body{}").unwrap();
    fx.config.assets_dir = Some(assets);
    let base = start_server(&fx.config);
    let a = agent();
    let r = http_get(&a, &format!("{base}/assets/app.css"), None);
    assert_eq!((r.status, r.content_type.as_str(), r.text().as_str()), (200, "text/css", "body{}"));
    assert_eq!(http_get(&a, &format!("{base}/assets/%2E%2E/root/c.txt"), None).status, 404);
    assert_eq!(http_get(&a, &format!("{base}/assets/missing.js"), None).status, 404);
}

#[test]
fn every_html_page_keeps_the_anchor_contract() {
    let fx = Fixture::new();
    let base = start_server(&fx.config);
    let a = agent();
    let mut queue = std::collections::VecDeque::from([("/".to_string(), 0)]);
    let mut seen = std::collections::HashSet::new();
    while let Some((path, depth)) = queue.pop_front() {
        if !seen.insert(path.clone()) {
            continue;
        }
        let r = http_get(&a, &format!("{base}{path}"), None);
        assert_eq!(r.status, 200, "{path}");
        let page = r.text();
        for id in ["deeplink", "annotation-form", "triples", "bookmark"] {
            assert!(tag_with_id(&page, id).is_some(), "{path} lacks #{id}");
        }
        if depth < 5 {
            queue.extend(child_hrefs(&page).into_iter().map(|h| (h, depth + 1)));
        }
    }
    assert!(seen.len() > 150, "{}", seen.len());
}
