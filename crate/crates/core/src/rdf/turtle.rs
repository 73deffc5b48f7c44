//! Turtle subset: `@prefix`/`PREFIX`, prefixed names, the `a` keyword,
//! `;` and `,` lists, string, IRI, numeric and boolean literals.
//! Collections and blank-node property lists are rejected.

use std::collections::HashMap;
use std::fmt::Write as _;

use super::ntriples::{escape_iri, escape_string, Cursor};
use super::{is_absolute_iri, RdfSyntaxError, Term, Triple, RDF_TYPE, XSD};

pub fn parse_turtle(src: &str) -> Result<Vec<Triple>, RdfSyntaxError> {
    let mut p = TurtleParser {
        c: Cursor::new(src),
        prefixes: HashMap::new(),
        out: Vec::new(),
    };
    p.document()?;
    Ok(p.out)
}

struct TurtleParser<'a> {
    c: Cursor<'a>,
    prefixes: HashMap<String, String>,
    out: Vec<Triple>,
}

impl<'a> TurtleParser<'a> {
    fn document(&mut self) -> Result<(), RdfSyntaxError> {
        loop {
            self.c.skip_ws_comments();
            if self.c.at_end() {
                return Ok(());
            }
            if self.c.eat("@prefix") {
                self.prefix_decl()?;
                self.c.skip_ws_comments();
                if !self.c.eat(".") {
                    return self.c.error("expected '.' after @prefix");
                }
            } else if self.keyword_ci("PREFIX") {
                self.prefix_decl()?;
            } else if self.c.rest().starts_with("@base") || self.keyword_peek_ci("BASE") {
                return self.c.error("base declarations are not supported");
            } else {
                self.triples()?;
            }
        }
    }

    fn keyword_peek_ci(&self, kw: &str) -> bool {
        let rest = self.c.rest();
        rest.get(..kw.len()).is_some_and(|s| s.eq_ignore_ascii_case(kw))
            && rest[kw.len()..].starts_with(|c: char| c.is_whitespace())
    }

    fn keyword_ci(&mut self, kw: &str) -> bool {
        if self.keyword_peek_ci(kw) {
            self.c.pos += kw.len();
            true
        } else {
            false
        }
    }

    fn prefix_decl(&mut self) -> Result<(), RdfSyntaxError> {
        self.c.skip_ws_comments();
        let start = self.c.pos;
        let mut name = String::new();
        while let Some(ch) = self.c.peek().filter(|&ch| ch != ':' && is_pn_char(ch)) {
            name.push(ch);
            self.c.bump();
        }
        if !self.c.eat(":") {
            return self.c.error_at(start, "expected prefix name followed by ':'");
        }
        self.c.skip_ws_comments();
        let iri_start = self.c.pos;
        let iri = self.c.iri_ref()?;
        if !is_absolute_iri(&iri) {
            return self.c.error_at(iri_start, "prefix IRI must be absolute");
        }
        self.prefixes.insert(name, iri);
        Ok(())
    }

    fn triples(&mut self) -> Result<(), RdfSyntaxError> {
        let subject = self.subject()?;
        loop {
            self.c.skip_ws_comments();
            let predicate = self.predicate()?;
            loop {
                self.c.skip_ws_comments();
                let object = self.object()?;
                self.out
                    .push(Triple::new(subject.clone(), predicate.clone(), object));
                self.c.skip_ws_comments();
                if !self.c.eat(",") {
                    break;
                }
            }
            let mut more = false;
            while self.c.eat(";") {
                more = true;
                self.c.skip_ws_comments();
            }
            if self.c.eat(".") {
                return Ok(());
            }
            if !more {
                return self.c.error("expected ';', ',' or '.'");
            }
        }
    }

    fn subject(&mut self) -> Result<Term, RdfSyntaxError> {
        match self.c.peek() {
            Some('_') if self.c.rest().starts_with("_:") => Ok(Term::Blank(self.c.blank_label()?)),
            Some('[' | '(') => self.c.error("collections and blank node property lists are not supported"),
            Some('"' | '\'') | None => self.c.error("expected a subject"),
            Some(_) => Ok(Term::Iri(self.iri()?)),
        }
    }

    fn predicate(&mut self) -> Result<String, RdfSyntaxError> {
        let rest = self.c.rest();
        if rest.starts_with('a')
            && rest[1..].starts_with(|c: char| c.is_whitespace() || c == '<' || c == '"')
        {
            self.c.bump();
            return Ok(RDF_TYPE.to_string());
        }
        self.iri()
    }

    fn object(&mut self) -> Result<Term, RdfSyntaxError> {
        match self.c.peek() {
            Some('"' | '\'') => self.string_literal(),
            Some('_') if self.c.rest().starts_with("_:") => Ok(Term::Blank(self.c.blank_label()?)),
            Some('[' | '(') => self.c.error("collections and blank node property lists are not supported"),
            Some(c) if c.is_ascii_digit() || matches!(c, '+' | '-' | '.') => self.numeric(),
            _ if self.boolean("true") => Ok(Term::typed("true", format!("{XSD}boolean"))),
            _ if self.boolean("false") => Ok(Term::typed("false", format!("{XSD}boolean"))),
            Some(_) => Ok(Term::Iri(self.iri()?)),
            None => self.c.error("expected an object"),
        }
    }

    fn boolean(&mut self, kw: &str) -> bool {
        let rest = self.c.rest();
        if rest.starts_with(kw) && !rest[kw.len()..].starts_with(|c: char| is_pn_char(c)) {
            self.c.pos += kw.len();
            true
        } else {
            false
        }
    }

    fn string_literal(&mut self) -> Result<Term, RdfSyntaxError> {
        let quote = self.c.bump().expect("peeked quote");
        let opener: String = std::iter::repeat_n(quote, 2).collect();
        let long = self.c.eat(&opener);
        let lexical = self.c.string_body(quote, long)?;
        if self.c.eat("@") {
            return Ok(Term::lang(lexical, self.c.lang_tag()?));
        }
        if self.c.eat("^^") {
            let dt = self.iri()?;
            return Ok(Term::typed(lexical, dt));
        }
        Ok(Term::literal(lexical))
    }

    fn numeric(&mut self) -> Result<Term, RdfSyntaxError> {
        let start = self.c.pos;
        let rest = self.c.rest();
        let mut end = 0;
        let bytes = rest.as_bytes();
        if matches!(bytes.first(), Some(b'+' | b'-')) {
            end += 1;
        }
        let int_start = end;
        while bytes.get(end).is_some_and(u8::is_ascii_digit) {
            end += 1;
        }
        let int_digits = end - int_start;
        let mut frac_digits = 0;
        if bytes.get(end) == Some(&b'.') && bytes.get(end + 1).is_some_and(u8::is_ascii_digit) {
            end += 1;
            while bytes.get(end).is_some_and(u8::is_ascii_digit) {
                end += 1;
                frac_digits += 1;
            }
        }
        let mut exponent = false;
        if matches!(bytes.get(end), Some(b'e' | b'E')) && int_digits + frac_digits > 0 {
            let mut e = end + 1;
            if matches!(bytes.get(e), Some(b'+' | b'-')) {
                e += 1;
            }
            if bytes.get(e).is_some_and(u8::is_ascii_digit) {
                while bytes.get(e).is_some_and(u8::is_ascii_digit) {
                    e += 1;
                }
                end = e;
                exponent = true;
            }
        }
        if int_digits + frac_digits == 0 {
            return self.c.error_at(start, "expected a number");
        }
        let lexical = rest[..end].to_string();
        self.c.pos += end;
        let dt = if exponent {
            "double"
        } else if frac_digits > 0 {
            "decimal"
        } else {
            "integer"
        };
        Ok(Term::typed(lexical, format!("{XSD}{dt}")))
    }

    fn iri(&mut self) -> Result<String, RdfSyntaxError> {
        let start = self.c.pos;
        if self.c.peek() == Some('<') {
            let iri = self.c.iri_ref()?;
            if !is_absolute_iri(&iri) {
                return self.c.error_at(start, format!("IRI <{iri}> is not absolute"));
            }
            return Ok(iri);
        }
        let mut prefix = String::new();
        while let Some(ch) = self.c.peek().filter(|&ch| ch != ':' && is_pn_char(ch)) {
            prefix.push(ch);
            self.c.bump();
        }
        if !self.c.eat(":") {
            return self.c.error_at(start, "expected an IRI or prefixed name");
        }
        let mut local = String::new();
        while let Some(ch) = self.c.peek().filter(|&ch| is_pn_char(ch) || ch == ':' || ch == '%') {
            local.push(ch);
            self.c.bump();
        }
        while local.ends_with('.') {
            local.pop();
            self.c.pos -= 1;
        }
        match self.prefixes.get(&prefix) {
            Some(ns) => Ok(format!("{ns}{local}")),
            None => self.c.error_at(start, format!("undeclared prefix {prefix:?}")),
        }
    }
}

fn is_pn_char(c: char) -> bool {
    c.is_alphanumeric() || matches!(c, '_' | '-' | '.') || (!c.is_ascii() && !c.is_whitespace())
}

/// Writes Turtle with a fixed prefix table, grouping consecutive triples
/// that share a subject.
pub struct TurtleWriter {
    prefixes: Vec<(String, String)>,
}

impl TurtleWriter {
    pub fn new<'a>(prefixes: impl IntoIterator<Item = &'a (&'a str, &'a str)>) -> TurtleWriter {
        TurtleWriter {
            prefixes: prefixes
                .into_iter()
                .map(|(p, ns)| (p.to_string(), ns.to_string()))
                .collect(),
        }
    }

    fn iri(&self, iri: &str) -> String {
        if iri == RDF_TYPE {
            return "a".to_string();
        }
        self.compact(iri)
    }

    fn compact(&self, iri: &str) -> String {
        for (p, ns) in &self.prefixes {
            if let Some(local) = iri.strip_prefix(ns.as_str()) {
                let ok = local
                    .chars()
                    .next()
                    .is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
                    && local.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-');
                if ok {
                    return format!("{p}:{local}");
                }
            }
        }
        format!("<{}>", escape_iri(iri))
    }

    fn term(&self, t: &Term) -> String {
        match t {
            Term::Iri(v) => self.compact(v),
            Term::Blank(b) => format!("_:{b}"),
            Term::Literal {
                lexical,
                datatype,
                language,
            } => {
                let mut s = format!("\"{}\"", escape_string(lexical));
                if let Some(l) = language {
                    let _ = write!(s, "@{l}");
                } else if let Some(dt) = datatype {
                    let _ = write!(s, "^^{}", self.compact(dt));
                }
                s
            }
        }
    }

    pub fn write(&self, triples: &[Triple]) -> String {
        let mut out = String::new();
        for (p, ns) in &self.prefixes {
            let _ = writeln!(out, "@prefix {p}: <{}> .", escape_iri(ns));
        }
        let mut i = 0;
        while i < triples.len() {
            let subject = &triples[i].subject;
            let _ = write!(out, "\n{}", self.term(subject));
            let mut first = true;
            while i < triples.len() && &triples[i].subject == subject {
                let t = &triples[i];
                let sep = if first { " " } else { " ;\n    " };
                let _ = write!(out, "{sep}{} {}", self.iri(&t.predicate), self.term(&t.object));
                first = false;
                i += 1;
            }
            out.push_str(" .\n");
        }
        out
    }
}
