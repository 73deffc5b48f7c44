//! Tree model for XML-ish content plus a small parser with two modes.
//!
//! `Xml` mode requires well-formed input. `Html` mode is tolerant: it
//! lowercases names, accepts unquoted attributes, closes void elements,
//! recovers from mismatched end tags and wraps the result in implied
//! `html`/`body` elements when they are missing.

use std::fmt::Write as _;

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ParseMode {
    Xml,
    Html,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum XmlChild {
    Element(XmlNode),
    Text(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct XmlNode {
    pub name: String,
    pub attributes: Vec<(String, String)>,
    pub children: Vec<XmlChild>,
    /// Byte range of the element in the source it was parsed from.
    pub source_span: Option<(usize, usize)>,
}

impl XmlNode {
    pub fn new(name: impl Into<String>) -> XmlNode {
        XmlNode {
            name: name.into(),
            attributes: Vec::new(),
            children: Vec::new(),
            source_span: None,
        }
    }

    pub fn with_attr(mut self, key: impl Into<String>, value: impl Into<String>) -> XmlNode {
        self.set_attr(key, value);
        self
    }

    pub fn set_attr(&mut self, key: impl Into<String>, value: impl Into<String>) {
        let key = key.into();
        let value = value.into();
        match self.attributes.iter_mut().find(|(k, _)| *k == key) {
            Some(slot) => slot.1 = value,
            None => self.attributes.push((key, value)),
        }
    }

    pub fn push_element(&mut self, child: XmlNode) {
        self.children.push(XmlChild::Element(child));
    }

    pub fn push_text(&mut self, text: impl Into<String>) {
        self.children.push(XmlChild::Text(text.into()));
    }

    pub fn attr(&self, key: &str) -> Option<&str> {
        self.attributes
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn elements(&self) -> impl Iterator<Item = &XmlNode> {
        self.children.iter().filter_map(|c| match c {
            XmlChild::Element(e) => Some(e),
            XmlChild::Text(_) => None,
        })
    }

    /// Concatenated descendant text.
    pub fn text_content(&self) -> String {
        let mut out = String::new();
        self.collect_text(&mut out);
        out
    }

    fn collect_text(&self, out: &mut String) {
        for c in &self.children {
            match c {
                XmlChild::Text(t) => out.push_str(t),
                XmlChild::Element(e) => e.collect_text(out),
            }
        }
    }

    /// Follows element-child indices from this node.
    pub fn at_path(&self, path: &[usize]) -> Option<&XmlNode> {
        let mut node = self;
        for &i in path {
            node = node.elements().nth(i)?;
        }
        Some(node)
    }

    /// Number of elements in the subtree, including this one.
    pub fn element_count(&self) -> usize {
        1 + self.elements().map(XmlNode::element_count).sum::<usize>()
    }

    /// Deterministic XML serialization.
    pub fn to_xml_string(&self) -> String {
        let mut out = String::new();
        self.write_xml(&mut out);
        out
    }

    fn write_xml(&self, out: &mut String) {
        out.push('<');
        out.push_str(&self.name);
        for (k, v) in &self.attributes {
            let _ = write!(out, " {}=\"{}\"", k, escape_attr(v));
        }
        if self.children.is_empty() {
            out.push_str("/>");
            return;
        }
        out.push('>');
        for c in &self.children {
            match c {
                XmlChild::Text(t) => out.push_str(&escape_text(t)),
                XmlChild::Element(e) => e.write_xml(out),
            }
        }
        let _ = write!(out, "</{}>", self.name);
    }
}

/// A parsed document: the source text, its mode and the root element.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct XmlDocument {
    pub source: String,
    pub mode: ParseMode,
    pub root: XmlNode,
}

impl XmlDocument {
    pub fn parse(source: impl Into<String>, mode: ParseMode) -> Result<XmlDocument, XmlError> {
        let source = source.into();
        let root = match mode {
            ParseMode::Xml => parse_xml(&source)?,
            ParseMode::Html => parse_html(&source),
        };
        Ok(XmlDocument { source, mode, root })
    }

    /// Re-parses the serialization of `root`, so every node carries a span.
    pub fn from_node(root: &XmlNode) -> XmlDocument {
        let source = root.to_xml_string();
        let root = parse_xml(&source).expect("serialized tree is well-formed");
        XmlDocument {
            source,
            mode: ParseMode::Xml,
            root,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{message} at byte {position}")]
pub struct XmlError {
    pub position: usize,
    pub message: String,
}

fn err<T>(position: usize, message: impl Into<String>) -> Result<T, XmlError> {
    Err(XmlError {
        position,
        message: message.into(),
    })
}

pub fn escape_text(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            _ => out.push(c),
        }
    }
    out
}

pub fn escape_attr(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&#39;"),
            _ => out.push(c),
        }
    }
    out
}

const VOID_ELEMENTS: &[&str] = &[
    "area", "base", "br", "col", "embed", "hr", "img", "input", "link", "meta", "param", "source",
    "track", "wbr",
];

const RAW_TEXT_ELEMENTS: &[&str] = &["script", "style"];

/// Elements implicitly closed by an opening sibling of the same name.
const SELF_CLOSING_SIBLINGS: &[&str] = &["li", "p", "option", "tr", "td", "th", "dt", "dd"];

#[derive(Debug)]
enum Token {
    Start {
        name: String,
        attributes: Vec<(String, String)>,
        self_closing: bool,
        start: usize,
        end: usize,
    },
    End {
        name: String,
        start: usize,
        end: usize,
    },
    Text(String),
}

struct Lexer<'a> {
    src: &'a str,
    bytes: &'a [u8],
    pos: usize,
    mode: ParseMode,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str, mode: ParseMode) -> Self {
        Lexer {
            src,
            bytes: src.as_bytes(),
            pos: 0,
            mode,
        }
    }

    fn html(&self) -> bool {
        self.mode == ParseMode::Html
    }

    fn starts_with(&self, s: &str) -> bool {
        self.src[self.pos..].starts_with(s)
    }

    fn starts_with_ci(&self, s: &str) -> bool {
        self.src
            .get(self.pos..self.pos + s.len())
            .is_some_and(|t| t.eq_ignore_ascii_case(s))
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn skip_until(&mut self, end: &str) -> Result<(), XmlError> {
        match self.src[self.pos..].find(end) {
            Some(i) => {
                self.pos += i + end.len();
                Ok(())
            }
            None if self.html() => {
                self.pos = self.bytes.len();
                Ok(())
            }
            None => err(self.pos, format!("unterminated construct, expected {end:?}")),
        }
    }

    fn next_token(&mut self) -> Result<Option<Token>, XmlError> {
        loop {
            if self.pos >= self.bytes.len() {
                return Ok(None);
            }
            if self.bytes[self.pos] != b'<' {
                return self.text().map(Some);
            }
            if self.starts_with("<!--") {
                self.pos += 4;
                self.skip_until("-->")?;
                continue;
            }
            if self.starts_with("<![CDATA[") {
                let start = self.pos + 9;
                self.pos = start;
                self.skip_until("]]>")?;
                let end = self.pos.saturating_sub(3).max(start);
                return Ok(Some(Token::Text(self.src[start..end].to_string())));
            }
            if self.starts_with("<!") || self.starts_with("<?") {
                self.pos += 2;
                self.skip_until(">")?;
                continue;
            }
            if self.starts_with("</") {
                return self.end_tag().map(Some);
            }
            let next = self.bytes.get(self.pos + 1).copied();
            if next.is_some_and(|b| b.is_ascii_alphabetic() || b == b'_' || (!self.html() && b == b':')) {
                return self.start_tag().map(Some);
            }
            if self.html() {
                // stray '<' is text
                self.pos += 1;
                let mut t = self.text()?;
                if let Token::Text(s) = &mut t {
                    s.insert(0, '<');
                }
                return Ok(Some(t));
            }
            return err(self.pos, "invalid markup after '<'");
        }
    }

    fn text(&mut self) -> Result<Token, XmlError> {
        let start = self.pos;
        let end = self.src[start..].find('<').map_or(self.bytes.len(), |i| start + i);
        self.pos = end;
        let raw = &self.src[start..end];
        decode_entities(raw, start, self.html()).map(Token::Text)
    }

    fn name(&mut self) -> Result<String, XmlError> {
        let start = self.pos;
        while self.pos < self.bytes.len() {
            let b = self.bytes[self.pos];
            if b.is_ascii_whitespace() || matches!(b, b'>' | b'/' | b'=' | b'<' | b'"' | b'\'') {
                break;
            }
            self.pos += 1;
        }
        if start == self.pos {
            return err(start, "expected a name");
        }
        let name = &self.src[start..self.pos];
        Ok(if self.html() {
            name.to_ascii_lowercase()
        } else {
            name.to_string()
        })
    }

    fn start_tag(&mut self) -> Result<Token, XmlError> {
        let start = self.pos;
        self.pos += 1;
        let name = self.name()?;
        let mut attributes: Vec<(String, String)> = Vec::new();
        loop {
            self.skip_ws();
            if self.pos >= self.bytes.len() {
                if self.html() {
                    return Ok(Token::Start {
                        name,
                        attributes,
                        self_closing: false,
                        start,
                        end: self.pos,
                    });
                }
                return err(start, format!("unterminated start tag <{name}>"));
            }
            if self.starts_with("/>") {
                self.pos += 2;
                return Ok(Token::Start {
                    name,
                    attributes,
                    self_closing: true,
                    start,
                    end: self.pos,
                });
            }
            if self.bytes[self.pos] == b'>' {
                self.pos += 1;
                return Ok(Token::Start {
                    name,
                    attributes,
                    self_closing: false,
                    start,
                    end: self.pos,
                });
            }
            if self.html() && self.bytes[self.pos] == b'/' {
                self.pos += 1;
                continue;
            }
            let attr_pos = self.pos;
            let key = self.name()?;
            self.skip_ws();
            let value = if self.bytes.get(self.pos) == Some(&b'=') {
                self.pos += 1;
                self.skip_ws();
                self.attr_value()?
            } else if self.html() {
                String::new()
            } else {
                return err(attr_pos, format!("attribute {key:?} has no value"));
            };
            if attributes.iter().any(|(k, _)| *k == key) {
                if !self.html() {
                    return err(attr_pos, format!("duplicate attribute {key:?}"));
                }
                continue;
            }
            attributes.push((key, value));
        }
    }

    fn attr_value(&mut self) -> Result<String, XmlError> {
        let html = self.html();
        match self.bytes.get(self.pos) {
            Some(&q @ (b'"' | b'\'')) => {
                let start = self.pos + 1;
                let Some(len) = self.src[start..].find(q as char) else {
                    return err(self.pos, "unterminated attribute value");
                };
                self.pos = start + len + 1;
                decode_entities(&self.src[start..start + len], start, html)
            }
            Some(_) if html => {
                let start = self.pos;
                while self.pos < self.bytes.len()
                    && !self.bytes[self.pos].is_ascii_whitespace()
                    && self.bytes[self.pos] != b'>'
                {
                    self.pos += 1;
                }
                decode_entities(&self.src[start..self.pos], start, html)
            }
            _ => err(self.pos, "attribute value must be quoted"),
        }
    }

    fn end_tag(&mut self) -> Result<Token, XmlError> {
        let start = self.pos;
        self.pos += 2;
        let name = self.name()?;
        self.skip_ws();
        if self.bytes.get(self.pos) != Some(&b'>') {
            if !self.html() {
                return err(self.pos, format!("malformed end tag </{name}>"));
            }
            self.skip_until(">")?;
        } else {
            self.pos += 1;
        }
        Ok(Token::End {
            name,
            start,
            end: self.pos,
        })
    }

    /// Content of a raw-text element up to its end tag (html only).
    fn raw_text(&mut self, name: &str) -> (String, Option<Token>) {
        let start = self.pos;
        let close = format!("</{name}");
        let mut i = self.pos;
        while i < self.bytes.len() {
            self.pos = i;
            if self.starts_with_ci(&close) {
                let text = self.src[start..i].to_string();
                let tag_start = i;
                self.pos = i + close.len();
                let _ = self.skip_until(">");
                return (
                    text,
                    Some(Token::End {
                        name: name.to_string(),
                        start: tag_start,
                        end: self.pos,
                    }),
                );
            }
            i += 1;
        }
        self.pos = self.bytes.len();
        (self.src[start..].to_string(), None)
    }
}

fn decode_entities(raw: &str, offset: usize, html: bool) -> Result<String, XmlError> {
    if !raw.contains('&') {
        return Ok(raw.to_string());
    }
    let mut out = String::with_capacity(raw.len());
    let mut rest = raw;
    let mut pos = offset;
    while let Some(i) = rest.find('&') {
        out.push_str(&rest[..i]);
        pos += i;
        rest = &rest[i..];
        let decoded = rest[1..]
            .find(';')
            .filter(|&j| j <= 10)
            .and_then(|j| entity_value(&rest[1..1 + j]).map(|c| (c, j + 2)));
        match decoded {
            Some((c, len)) => {
                out.push(c);
                rest = &rest[len..];
                pos += len;
            }
            None if html => {
                out.push('&');
                rest = &rest[1..];
                pos += 1;
            }
            None => return err(pos, "unknown or malformed entity reference"),
        }
    }
    out.push_str(rest);
    Ok(out)
}

fn entity_value(name: &str) -> Option<char> {
    if let Some(num) = name.strip_prefix('#') {
        let code = match num.strip_prefix('x').or_else(|| num.strip_prefix('X')) {
            Some(hex) => u32::from_str_radix(hex, 16).ok()?,
            None => num.parse().ok()?,
        };
        return char::from_u32(code);
    }
    Some(match name {
        "amp" => '&',
        "lt" => '<',
        "gt" => '>',
        "quot" => '"',
        "apos" => '\'',
        "nbsp" => '\u{a0}',
        "copy" => '©',
        "reg" => '®',
        "hellip" => '…',
        "mdash" => '—',
        "ndash" => '–',
        _ => return None,
    })
}

struct Open {
    node: XmlNode,
    start: usize,
}

fn close_into(stack: &mut Vec<Open>, done: &mut Vec<XmlChild>, end: usize) {
    let Open { mut node, start } = stack.pop().expect("non-empty stack");
    node.source_span = Some((start, end));
    match stack.last_mut() {
        Some(parent) => parent.node.push_element(node),
        None => done.push(XmlChild::Element(node)),
    }
}

fn push_child(stack: &mut [Open], done: &mut Vec<XmlChild>, child: XmlChild) {
    match stack.last_mut() {
        Some(parent) => parent.node.children.push(child),
        None => done.push(child),
    }
}

fn parse_xml(src: &str) -> Result<XmlNode, XmlError> {
    let mut lexer = Lexer::new(src, ParseMode::Xml);
    let mut stack: Vec<Open> = Vec::new();
    let mut done: Vec<XmlChild> = Vec::new();
    while let Some(tok) = lexer.next_token()? {
        match tok {
            Token::Text(t) => {
                if stack.is_empty() {
                    if !t.trim().is_empty() {
                        return err(lexer.pos, "text outside the root element");
                    }
                } else if !t.is_empty() {
                    push_child(&mut stack, &mut done, XmlChild::Text(t));
                }
            }
            Token::Start {
                name,
                attributes,
                self_closing,
                start,
                end,
            } => {
                if stack.is_empty() && !done.is_empty() {
                    return err(start, "more than one root element");
                }
                let node = XmlNode {
                    name,
                    attributes,
                    children: Vec::new(),
                    source_span: None,
                };
                stack.push(Open { node, start });
                if self_closing {
                    close_into(&mut stack, &mut done, end);
                }
            }
            Token::End { name, start, end } => match stack.last() {
                Some(open) if open.node.name == name => close_into(&mut stack, &mut done, end),
                Some(open) => {
                    return err(
                        start,
                        format!("end tag </{name}> does not match <{}>", open.node.name),
                    )
                }
                None => return err(start, format!("unexpected end tag </{name}>")),
            },
        }
    }
    if let Some(open) = stack.last() {
        return err(open.start, format!("element <{}> is never closed", open.node.name));
    }
    match done.into_iter().next() {
        Some(XmlChild::Element(root)) => Ok(root),
        _ => err(0, "document has no root element"),
    }
}

fn parse_html(src: &str) -> XmlNode {
    let mut lexer = Lexer::new(src, ParseMode::Html);
    let mut stack: Vec<Open> = Vec::new();
    let mut done: Vec<XmlChild> = Vec::new();
    // html mode never reports errors
    while let Ok(Some(tok)) = lexer.next_token() {
        match tok {
            Token::Text(t) => {
                if !t.is_empty() {
                    push_child(&mut stack, &mut done, XmlChild::Text(t));
                }
            }
            Token::Start {
                name,
                attributes,
                self_closing,
                start,
                end,
            } => {
                if SELF_CLOSING_SIBLINGS.contains(&name.as_str())
                    && stack.last().is_some_and(|o| o.node.name == name)
                {
                    close_into(&mut stack, &mut done, start);
                }
                let is_void = VOID_ELEMENTS.contains(&name.as_str());
                let is_raw = RAW_TEXT_ELEMENTS.contains(&name.as_str());
                let node = XmlNode {
                    name: name.clone(),
                    attributes,
                    children: Vec::new(),
                    source_span: None,
                };
                stack.push(Open { node, start });
                if self_closing || is_void {
                    close_into(&mut stack, &mut done, end);
                } else if is_raw {
                    let (text, close) = lexer.raw_text(&name);
                    if !text.is_empty() {
                        push_child(&mut stack, &mut done, XmlChild::Text(text));
                    }
                    let end = match close {
                        Some(Token::End { end, .. }) => end,
                        _ => lexer.pos,
                    };
                    close_into(&mut stack, &mut done, end);
                }
            }
            Token::End { name, start, end } => {
                if let Some(depth) = stack.iter().rposition(|o| o.node.name == name) {
                    while stack.len() > depth + 1 {
                        close_into(&mut stack, &mut done, start);
                    }
                    close_into(&mut stack, &mut done, end);
                }
            }
        }
    }
    while !stack.is_empty() {
        close_into(&mut stack, &mut done, src.len());
    }
    imply_html_body(done)
}

fn imply_html_body(top: Vec<XmlChild>) -> XmlNode {
    let html_count = top
        .iter()
        .filter(|c| matches!(c, XmlChild::Element(e) if e.name == "html"))
        .count();
    let mut html = if html_count == 1 {
        top.into_iter()
            .find_map(|c| match c {
                XmlChild::Element(e) if e.name == "html" => Some(e),
                _ => None,
            })
            .expect("counted one html element")
    } else {
        let mut html = XmlNode::new("html");
        html.children = top
            .into_iter()
            .filter(|c| !matches!(c, XmlChild::Text(t) if t.trim().is_empty()))
            .collect();
        html
    };
    if !html.elements().any(|e| e.name == "body") {
        let (head, rest): (Vec<XmlChild>, Vec<XmlChild>) = html
            .children
            .drain(..)
            .partition(|c| matches!(c, XmlChild::Element(e) if e.name == "head"));
        let mut body = XmlNode::new("body");
        body.children = rest;
        html.children = head;
        html.push_element(body);
    }
    html
}
