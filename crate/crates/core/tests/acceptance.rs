//! One PASS/FAIL line per acceptance criterion.

mod common;

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};
use std::fs;
use std::io::Read;
use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant, UNIX_EPOCH};

use common::*;
use deeplinker::rdf::{parse_turtle, Term, Triple, BOOKMARK_CLASS, RDFS_COMMENT, RDF_TYPE, VOCAB, XSD};
use deeplinker::selector::Selector;
use deeplinker::service::{AnnotationForm, Service};
use deeplinker::xml::{ParseMode, XmlNode};
use deeplinker::{DeepLink, Segment};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde_json::Value;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(cond: bool, what: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(what.into())
    }
}

fn json(s: &Service, path: &str) -> Result<Value, String> {
    let r = s.get(path, Some("application/json"));
    if r.status != 200 {
        return Err(format!("{path} answered {}: {}", r.status, r.body_text()));
    }
    serde_json::from_slice(&r.body).map_err(|e| format!("{path}: {e}"))
}

// Shape names of one slide, read straight from the package.
fn slide_shape_names(pptx: &[u8], slide: usize) -> Vec<String> {
    let mut zip = zip::ZipArchive::new(std::io::Cursor::new(pptx)).unwrap();
    let mut xml = String::new();
    zip.by_name(&format!("ppt/slides/slide{slide}.xml"))
        .unwrap()
        .read_to_string(&mut xml)
        .unwrap();
    xml.split("<p:sp>")
        .skip(1)
        .map(|sp| {
            let at = sp.find(" name=\"").unwrap() + 7;
            sp[at..at + sp[at..].find('"').unwrap()].to_string()
        })
        .collect()
}

fn example_links() -> Outcome {
    let fx = Fixture::new();
    let s = fx.service();
    let start = Instant::now();
    for link in [LOGO_RECT, SLIDE_SHAPE, THIRD_LINE, W3C_PARTICIPATE] {
        let r = s.get(link, None);
        check(r.status == 200, format!("{link} answered {}", r.status))?;
        let n = highlight_count(&r.body_text());
        check(n == 1, format!("{link} has {n} highlights"))?;
    }

    let c = fs::read_to_string(fx.root().join("c.txt")).unwrap();
    let third = c.split('\n').nth(2).unwrap();
    let v = json(&s, THIRD_LINE)?;
    check(v["text"] == third, format!("line@2 gave {}", v["text"]))?;

    let v = json(&s, "/filesystem/b.pptx/content/to@powerpoint/index@3")?;
    check(v["slideNumber"] == 4, format!("index@3 gave slide {}", v["slideNumber"]))?;
    let names = slide_shape_names(&fs::read(fx.root().join("b.pptx")).unwrap(), 4);
    check(v["properties"]["shapeCount"].as_str() == Some(names.len().to_string().as_str()), "slide 4 shape count")?;

    let (w, h) = match imagesize::size(fx.root().join("a.png")) {
        Ok(d) => (d.width, d.height),
        Err(e) => return Err(e.to_string()),
    };
    let v = json(&s, LOGO_RECT)?;
    check(
        v["image"]["width"] == w && v["image"]["height"] == h && (w, h) == (1024, 205),
        "image dimensions",
    )?;
    check((v["x"].clone(), v["y"].clone(), v["w"].clone(), v["h"].clone()) == (600.into(), 109.into(), 188.into(), 36.into()), "rect")?;

    let elapsed = start.elapsed();
    check(elapsed < Duration::from_secs(5), format!("took {elapsed:?}"))?;
    Ok(format!("4 links, 1 highlight each, {elapsed:.2?}"))
}

const PARAM_CHARS: &[char] = &[
    'a', 'b', 'Z', '0', '9', '-', '.', '_', '~', '/', ',', '@', '%', ' ', '+', '?', '#', '&', '=', ':', '*', '(', ')',
    '\'', '"', 'ä', 'é', 'ß', '日', '本', '🙂', '\u{7f}', '\t',
];

fn random_link(rng: &mut StdRng) -> DeepLink {
    let methods = ["child", "index", "line", "substring", "rect", "cssSelector", "download", "property", "to", "x9"];
    let n = rng.gen_range(1..=8);
    let segments = (0..n)
        .map(|_| {
            let m = methods[rng.gen_range(0..methods.len())];
            let k = rng.gen_range(1..=4);
            let params: Vec<String> = (0..k)
                .map(|_| {
                    let len = rng.gen_range(0..12);
                    (0..len).map(|_| PARAM_CHARS[rng.gen_range(0..PARAM_CHARS.len())]).collect()
                })
                .collect();
            Segment::new(m, params).unwrap()
        })
        .collect();
    DeepLink::from_segments(segments).unwrap()
}

fn segs(link: &DeepLink) -> Vec<(String, Vec<String>)> {
    link.segments()
        .iter()
        .map(|s| (s.method().to_string(), s.params().to_vec()))
        .collect()
}

fn seg(m: &str, ps: &[&str]) -> (String, Vec<String>) {
    (m.to_string(), ps.iter().map(|p| p.to_string()).collect())
}

fn round_trip() -> Outcome {
    let start = Instant::now();
    let mut rng = StdRng::seed_from_u64(0x5eed);
    for i in 0..10_000 {
        let link = random_link(&mut rng);
        let wire = link.serialize();
        let wire_ok = wire.starts_with('/')
            && wire.bytes().all(|b| b.is_ascii_alphanumeric() || b"-._~/@,%".contains(&b));
        check(wire_ok, format!("case {i}: unexpected byte in {wire}"))?;
        match DeepLink::parse(&wire) {
            Ok(back) if back == link => {}
            Ok(back) => return Err(format!("case {i}: {wire} parsed to {back:?}")),
            Err(e) => return Err(format!("case {i}: {wire}: {e}")),
        }
    }

    let c = DeepLink::parse(THIRD_LINE).map_err(|e| e.to_string())?;
    check(
        segs(&c)
            == [
                seg("child", &["filesystem"]),
                seg("child", &["c.txt"]),
                seg("child", &["content"]),
                seg("to", &["string"]),
                seg("line", &["2"]),
            ],
        "line link segments",
    )?;
    let a = DeepLink::parse(LOGO_RECT).map_err(|e| e.to_string())?;
    check(segs(&a).last() == Some(&seg("rect", &["600", "109", "188", "36"])), "rect link segments")?;
    let b = DeepLink::parse(SLIDE_SHAPE).map_err(|e| e.to_string())?;
    check(
        segs(&b)[4..] == [seg("index", &["3"]), seg("cssSelector", &["svg > g > g:nth-child(43)"])],
        "slide link segments",
    )?;
    let d = DeepLink::parse(W3C_PARTICIPATE).map_err(|e| e.to_string())?;
    check(
        segs(&d)
            == [
                seg("child", &["remote"]),
                seg("download", &["http://w3c.org", "*/*"]),
                seg("child", &["content"]),
                seg("to", &["html"]),
                seg("cssSelector", &["#w3c_nav > form:nth-child(2) > ul.main_nav > li:nth-child(2) > a"]),
            ],
        "download link segments",
    )?;
    let elapsed = start.elapsed();
    check(elapsed < Duration::from_secs(10), format!("took {elapsed:?}"))?;
    Ok(format!("10000 links, 4 example links, {elapsed:.2?}"))
}

// Selector oracle: a tree of random elements and a brute-force matcher that
// knows nothing about the library's selector internals.

const TAGS: &[&str] = &["a", "b", "c", "div"];
const CLASSES: &[&str] = &["x", "y", "z"];
const IDS: &[&str] = &["p", "q"];

#[derive(Clone)]
struct Simple {
    tag: Option<&'static str>,
    id: Option<&'static str>,
    classes: Vec<&'static str>,
    attr: Option<(&'static str, Option<&'static str>)>,
    nth: Option<usize>,
}

struct Sel {
    compounds: Vec<Simple>,
    // true = child combinator between compounds[i] and compounds[i+1]
    child: Vec<bool>,
}

fn random_tree(rng: &mut StdRng) -> XmlNode {
    let size = rng.gen_range(1..=50);
    let mut nodes: Vec<(XmlNode, Option<usize>)> = Vec::new();
    for i in 0..size {
        let mut n = XmlNode::new(TAGS[rng.gen_range(0..TAGS.len())]);
        if rng.gen_bool(0.3) {
            n.set_attr("id", IDS[rng.gen_range(0..IDS.len())]);
        }
        if rng.gen_bool(0.5) {
            let k = rng.gen_range(1..=2);
            let cs: Vec<&str> = (0..k).map(|_| CLASSES[rng.gen_range(0..CLASSES.len())]).collect();
            n.set_attr("class", cs.join(" "));
        }
        if rng.gen_bool(0.3) {
            n.set_attr("data-k", ["1", "2"][rng.gen_range(0..2)]);
        }
        let parent = (i > 0).then(|| rng.gen_range(0..i));
        nodes.push((n, parent));
    }
    // Attach children to parents from the back so each subtree is complete.
    while nodes.len() > 1 {
        let (n, p) = nodes.pop().unwrap();
        let parent = &mut nodes[p.unwrap()].0;
        parent.children.insert(0, deeplinker::xml::XmlChild::Element(n));
    }
    nodes.pop().unwrap().0
}

fn random_sel(rng: &mut StdRng) -> Sel {
    let n = rng.gen_range(1..=3);
    let compounds: Vec<Simple> = (0..n)
        .map(|_| {
            let mut c = Simple {
                tag: rng.gen_bool(0.6).then(|| TAGS[rng.gen_range(0..TAGS.len())]),
                id: rng.gen_bool(0.15).then(|| IDS[rng.gen_range(0..IDS.len())]),
                classes: if rng.gen_bool(0.35) { vec![CLASSES[rng.gen_range(0..CLASSES.len())]] } else { vec![] },
                attr: rng.gen_bool(0.15).then(|| ("data-k", rng.gen_bool(0.5).then(|| ["1", "2"][rng.gen_range(0..2)]))),
                nth: rng.gen_bool(0.3).then(|| rng.gen_range(1..=4)),
            };
            if c.tag.is_none() && c.id.is_none() && c.classes.is_empty() && c.attr.is_none() && c.nth.is_none() {
                c.tag = Some("*");
            }
            c
        })
        .collect();
    let child = (1..n).map(|_| rng.gen_bool(0.5)).collect();
    Sel { compounds, child }
}

fn sel_text(s: &Sel) -> String {
    let mut out = String::new();
    for (i, c) in s.compounds.iter().enumerate() {
        if i > 0 {
            out.push_str(if s.child[i - 1] { " > " } else { " " });
        }
        if let Some(t) = c.tag {
            out.push_str(t);
        }
        if let Some(id) = c.id {
            out.push_str(&format!("#{id}"));
        }
        for cl in &c.classes {
            out.push_str(&format!(".{cl}"));
        }
        match c.attr {
            Some((k, Some(v))) => out.push_str(&format!("[{k}=\"{v}\"]")),
            Some((k, None)) => out.push_str(&format!("[{k}]")),
            None => {}
        }
        if let Some(k) = c.nth {
            out.push_str(&format!(":nth-child({k})"));
        }
    }
    out
}

// Every element in document order with its ancestor chain; each chain entry
// is (node, 1-based position among element siblings).
fn all_chains(root: &XmlNode) -> Vec<Vec<(&XmlNode, usize)>> {
    fn walk<'a>(n: &'a XmlNode, pos: usize, chain: &mut Vec<(&'a XmlNode, usize)>, out: &mut Vec<Vec<(&'a XmlNode, usize)>>) {
        chain.push((n, pos));
        out.push(chain.clone());
        let mut k = 0;
        for c in &n.children {
            if let deeplinker::xml::XmlChild::Element(e) = c {
                k += 1;
                walk(e, k, chain, out);
            }
        }
        chain.pop();
    }
    let mut out = Vec::new();
    walk(root, 1, &mut Vec::new(), &mut out);
    out
}

fn simple_matches(c: &Simple, node: &XmlNode, pos: usize) -> bool {
    let get = |k: &str| node.attributes.iter().find(|(a, _)| a == k).map(|(_, v)| v.as_str());
    let tag_ok = match c.tag {
        None | Some("*") => true,
        Some(t) => node.name == t,
    };
    let id_ok = c.id.is_none_or(|id| get("id") == Some(id));
    let class_ok = c
        .classes
        .iter()
        .all(|cl| get("class").is_some_and(|v| v.split(' ').any(|t| t == *cl)));
    let attr_ok = match c.attr {
        None => true,
        Some((k, None)) => get(k).is_some(),
        Some((k, Some(v))) => get(k) == Some(v),
    };
    tag_ok && id_ok && class_ok && attr_ok && c.nth.is_none_or(|k| k == pos)
}

fn brute_matches(sel: &Sel, chain: &[(&XmlNode, usize)]) -> bool {
    // Try every assignment of compounds to ancestors, right to left.
    fn go(sel: &Sel, chain: &[(&XmlNode, usize)], ci: usize, at: usize) -> bool {
        let (n, p) = chain[at];
        if !simple_matches(&sel.compounds[ci], n, p) {
            return false;
        }
        if ci == 0 {
            return true;
        }
        if sel.child[ci - 1] {
            at > 0 && go(sel, chain, ci - 1, at - 1)
        } else {
            (0..at).any(|j| go(sel, chain, ci - 1, j))
        }
    }
    go(sel, chain, sel.compounds.len() - 1, chain.len() - 1)
}

fn selector_oracle() -> Outcome {
    let mut rng = StdRng::seed_from_u64(43);
    let mut hits = 0;
    for t in 0..1000 {
        let tree = random_tree(&mut rng);
        let chains = all_chains(&tree);
        for _ in 0..200 {
            let sel = random_sel(&mut rng);
            let text = sel_text(&sel);
            let parsed = Selector::parse(&text).map_err(|e| format!("{text:?}: {e}"))?;
            let expected = chains.iter().find(|c| brute_matches(&sel, c)).map(|c| c.last().unwrap().0 as *const XmlNode);
            let got = parsed
                .select_first(&tree, ParseMode::Xml)
                .map(|path| tree.at_path(&path).unwrap() as *const XmlNode);
            check(expected == got, format!("tree {t}: {text:?} disagrees with the oracle"))?;
            hits += expected.is_some() as usize;
        }
    }

    let fx = Fixture::new();
    let s = fx.service();
    let names = slide_shape_names(&fs::read(fx.root().join("b.pptx")).unwrap(), 4);
    check(names[42] == "Fehler vermeiden", "fixture slide 4 shape 43")?;
    let v = json(&s, SLIDE_SHAPE)?;
    let xml = v["xml"].as_str().unwrap_or("");
    check(xml.contains("data-shape-name=\"Fehler vermeiden\""), format!("slide selector chose {xml}"))?;
    let v = json(&s, W3C_PARTICIPATE)?;
    let xml = v["xml"].as_str().unwrap_or("");
    check(xml == "<a href=\"/participate/\">Participate</a>", format!("page selector chose {xml}"))?;
    Ok(format!("1000 trees x 200 selectors ({hits} matches), both example selectors"))
}

fn crawl_json(s: &Service, start: &str, max_depth: usize) -> Result<(usize, BTreeSet<String>), String> {
    let mut seen = HashSet::new();
    let mut queue = VecDeque::from([(start.to_string(), 0)]);
    let mut kinds = BTreeSet::new();
    while let Some((path, depth)) = queue.pop_front() {
        if !seen.insert(path.clone()) {
            continue;
        }
        let v = json(s, &path)?;
        kinds.insert(v["kind"].as_str().unwrap_or("?").to_string());
        if depth < max_depth {
            for c in v["children"].as_array().into_iter().flatten() {
                queue.push_back((c.as_str().unwrap_or("").to_string(), depth + 1));
            }
        }
    }
    Ok((seen.len(), kinds))
}

fn negotiation() -> Outcome {
    let fx = Fixture::new();
    let s = fx.service();
    let upload = s.upload("up.txt", b"uploaded\n").location.unwrap();
    let (mut pages, mut kinds) = crawl_json(&s, "/filesystem", 5)?;
    for extra in ["/", LOGO_RECT, SLIDE_SHAPE, W3C_PARTICIPATE, "/bookmarks", "/remote", &upload, "/filesystem/c.txt/content/to@string/substring@0,4"] {
        let v = json(&s, extra)?;
        kinds.insert(v["kind"].as_str().unwrap_or("?").to_string());
        pages += 1;
    }

    let note = "/filesystem/note.txt";
    let subject = format!("{BASE_IRI}{note}");
    s.annotate(&AnnotationForm {
        subject: note.into(),
        predicate: RDFS_COMMENT.into(),
        object: "a \"quoted\" note".into(),
        object_type: None,
    });
    let r = s.get(note, Some("text/turtle"));
    check(r.media_type.starts_with("text/turtle"), format!("file turtle got {}", r.media_type))?;
    let got: HashSet<Triple> = parse_turtle(&r.body_text()).map_err(|e| e.to_string())?.into_iter().collect();
    let path = fx.root().join("note.txt");
    let meta = fs::metadata(&path).unwrap();
    let ms = meta.modified().unwrap().duration_since(UNIX_EPOCH).unwrap().as_millis();
    let subj = || Term::iri(subject.clone());
    let p = |t: &str| format!("{VOCAB}{t}");
    let expected: HashSet<Triple> = [
        Triple::new(subj(), p("name"), Term::literal("note.txt")),
        Triple::new(subj(), p("path"), Term::literal(fs::canonicalize(&path).unwrap().display().to_string())),
        Triple::new(subj(), p("size"), Term::typed(meta.len().to_string(), format!("{XSD}integer"))),
        Triple::new(subj(), p("modified"), Term::typed(ms.to_string(), format!("{XSD}integer"))),
        Triple::new(subj(), p("mediaType"), Term::literal("text/plain")),
        Triple::new(subj(), p("isDirectory"), Term::typed("false", format!("{XSD}boolean"))),
        Triple::new(subj(), RDFS_COMMENT, Term::literal("a \"quoted\" note")),
    ]
    .into_iter()
    .collect();
    check(got == expected, format!("turtle reparsed to {got:?}"))?;

    let r = s.get(THIRD_LINE, Some("text/turtle"));
    check(r.status == 200 && r.media_type.starts_with("text/html"), format!("String turtle got {}", r.media_type))?;
    Ok(format!("{pages} JSON pages, kinds {kinds:?}"))
}

fn annotations() -> Outcome {
    let fx = Fixture::new();
    let s = fx.service();
    let r = s.annotate(&AnnotationForm {
        subject: LOGO_RECT.into(),
        predicate: "rdfs:comment".into(),
        object: "Artificial".into(),
        object_type: None,
    });
    check(r.status == 303, format!("annotate answered {}", r.status))?;
    let v: Value = serde_json::from_slice(&s.search(Some("artificial"), Some("application/json")).body).unwrap();
    let links: Vec<&str> = v["results"].as_array().unwrap().iter().filter_map(|r| r["link"].as_str()).collect();
    check(links == [LOGO_RECT], format!("search returned {links:?}"))?;

    for _ in 0..2 {
        let r = s.annotate(&AnnotationForm {
            subject: THIRD_LINE.into(),
            predicate: RDF_TYPE.into(),
            object: BOOKMARK_CLASS.into(),
            object_type: Some("iri".into()),
        });
        check(r.status == 303, "bookmark")?;
    }
    let v = json(&s, "/bookmarks")?;
    let listed: Vec<&str> = v["items"].as_array().unwrap().iter().filter_map(|i| i["link"].as_str()).collect();
    check(listed == [THIRD_LINE], format!("bookmarks listed {listed:?}"))?;

    let expected: HashSet<Triple> = [
        Triple::new(Term::iri(format!("{BASE_IRI}{LOGO_RECT}")), RDFS_COMMENT, Term::literal("Artificial")),
        Triple::new(Term::iri(format!("{BASE_IRI}{THIRD_LINE}")), RDF_TYPE, Term::iri(BOOKMARK_CLASS)),
    ]
    .into_iter()
    .collect();
    let before: HashSet<Triple> = s.store().all_triples().map_err(|e| e.to_string())?.into_iter().collect();
    check(before == expected, "store contents")?;
    drop(s);
    let s = fx.service();
    let after: HashSet<Triple> = s.store().all_triples().map_err(|e| e.to_string())?.into_iter().collect();
    check(after == expected, format!("after restart: {after:?}"))?;
    let v = json(&s, "/bookmarks")?;
    check(v["items"].as_array().map(Vec::len) == Some(1), "bookmarks after restart")?;
    Ok("search, bookmark dedup, journal replay".into())
}

// Escape attempts; the first refused segment decides the answer, so any
// suffix after it is noise.
fn traversal_case(rng: &mut StdRng) -> String {
    const ANYWHERE: &[&str] = &[
        "..", "%2E%2E", "%2e%2e", "%252E%252E", "%252e%252e", ".%2E", "%252E.", ".", "%2E", "%252E",
        "..%2F..%2Fetc", "..%252F..%252Fouts", "%252F", "%2Fetc%2Fpasswd", "docs%252F..%252F..", "child@..",
        "child@%252E%252E", "child@..%252Fsecret.txt", "%00", "a%2500",
    ];
    const FROM_ROOT: &[&str] = &[
        "escape", "%65scape", "child@escape", "escape/secret.txt", "docs/secret-link.txt",
        "docs/secret-link.txt/content", "docs/%2E%2E/%2E%2E",
    ];
    const NOISE: &[&str] = &["content", "secret.txt", "c.txt", "..", "to@string", "line@0"];
    let mut p = match rng.gen_range(0..3) {
        0 => format!("/filesystem/{}", FROM_ROOT[rng.gen_range(0..FROM_ROOT.len())]),
        1 => format!("/filesystem/docs/{}", ANYWHERE[rng.gen_range(0..ANYWHERE.len())]),
        _ => format!("/filesystem/{}", ANYWHERE[rng.gen_range(0..ANYWHERE.len())]),
    };
    for _ in 0..rng.gen_range(0..=3) {
        p.push('/');
        p.push_str(if rng.gen_bool(0.5) {
            ANYWHERE[rng.gen_range(0..ANYWHERE.len())]
        } else {
            NOISE[rng.gen_range(0..NOISE.len())]
        });
    }
    p
}

fn crawl() -> Outcome {
    let fx = Fixture::new();
    let base = start_server(&fx.config);
    let a = agent();
    let mut seen = HashSet::new();
    let mut queue = VecDeque::from([("/filesystem".to_string(), 0)]);
    let mut bad = Vec::new();
    while let Some((path, depth)) = queue.pop_front() {
        if !seen.insert(path.clone()) {
            continue;
        }
        let r = http_get(&a, &format!("{base}{path}"), None);
        if r.status != 200 {
            bad.push(format!("{path} -> {}", r.status));
            continue;
        }
        if depth < 5 {
            for href in child_hrefs(&r.text()) {
                queue.push_back((href, depth + 1));
            }
        }
    }
    check(bad.is_empty(), format!("non-200: {bad:?}"))?;

    let s = fx.service();
    let mut rng = StdRng::seed_from_u64(500);
    for i in 0..500 {
        let path = traversal_case(&mut rng);
        let r = s.get(&path, Some("application/json"));
        check(!r.body_text().contains(SECRET), format!("case {i} leaked: {path}"))?;
        check(r.status == 403, format!("case {i}: {path} answered {} {}", r.status, r.body_text()))?;
    }
    Ok(format!("{} pages crawled, 500 traversal cases refused", seen.len()))
}

fn concurrency() -> Outcome {
    let fx = Fixture::new();
    let base = start_server(&fx.config);
    let links: Vec<String> = [
        LOGO_RECT,
        SLIDE_SHAPE,
        THIRD_LINE,
        W3C_PARTICIPATE,
        "/filesystem",
        "/filesystem/note.txt",
        "/filesystem/b.pptx/content/to@powerpoint",
        "/filesystem/data.json/content/to@json/tags",
        "/filesystem/docs/people.ttl/content/to@rdf",
        "/filesystem/a.png/content/to@image",
    ]
    .iter()
    .map(|l| format!("{base}{l}"))
    .collect();
    let a = agent();
    let serial: Vec<(u16, Vec<u8>)> = links.iter().map(|l| {
        let r = http_get(&a, l, None);
        (r.status, r.body)
    }).collect();
    check(serial.iter().all(|(s, _)| *s == 200), "serial GETs")?;
    let links = Arc::new(links);
    let handles: Vec<_> = (0..100)
        .map(|i| {
            let links = links.clone();
            std::thread::spawn(move || {
                let r = http_get(&agent(), &links[i % links.len()], None);
                (i % links.len(), r.status, r.body)
            })
        })
        .collect();
    let mut by_link: HashMap<usize, usize> = HashMap::new();
    for h in handles {
        let (k, status, body) = h.join().map_err(|_| "request thread panicked".to_string())?;
        check(status == 200 && body == serial[k].1, format!("link {k} differs under load"))?;
        *by_link.entry(k).or_default() += 1;
    }
    check(by_link.len() == 10, "all links exercised")?;
    Ok("100 parallel GETs over 10 links identical".into())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 7] = [
        ("example-links", example_links),
        ("grammar-round-trip", round_trip),
        ("selector-oracle", selector_oracle),
        ("content-negotiation", negotiation),
        ("annotations-bookmarks", annotations),
        ("hypermedia-crawl", crawl),
        ("concurrency", concurrency),
    ];
    let mut failed = 0;
    for (name, f) in criteria {
        match std::panic::catch_unwind(f) {
            Ok(Ok(detail)) => println!("PASS {name}: {detail}"),
            Ok(Err(why)) => {
                failed += 1;
                println!("FAIL {name}: {why}");
            }
            Err(_) => {
                failed += 1;
                println!("FAIL {name}: panicked");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
