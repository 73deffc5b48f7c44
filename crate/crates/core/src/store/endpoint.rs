//! A small SPARQL 1.1 protocol endpoint over the annotation store.
//!
//! Supported: `PREFIX` declarations, `SELECT [DISTINCT] vars|* WHERE { ... }`
//! with basic graph patterns and `FILTER`, `LIMIT`, and `INSERT DATA`.
//! Enough for the queries this crate issues in external mode and for
//! simple inspection; anything else is a syntax error.

use std::collections::{HashMap, HashSet};

use serde_json::{json, Map, Value};
use thiserror::Error;

use super::{AnnotationStore, StoreError};
use crate::rdf::{Term, Triple, RDF_TYPE, WELL_KNOWN_PREFIXES, XSD};

#[derive(Debug, Error)]
pub enum EndpointError {
    #[error("unsupported or malformed SPARQL: {0}")]
    Syntax(String),
    #[error(transparent)]
    Store(#[from] StoreError),
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Iri(String),
    Var(String),
    Literal(Term),
    PName(String, String),
    Word(String),
    Punct(&'static str),
}

const PUNCTS: &[&str] = &["&&", "||", "!=", "{", "}", "(", ")", ".", ",", ";", "!", "=", "*"];

fn syntax<T>(msg: impl Into<String>) -> Result<T, EndpointError> {
    Err(EndpointError::Syntax(msg.into()))
}

fn tokenize(src: &str) -> Result<Vec<Tok>, EndpointError> {
    let chars: Vec<char> = src.chars().collect();
    let mut i = 0;
    let mut out = Vec::new();
    let word_char = |c: char| c.is_alphanumeric() || matches!(c, '_' | '-');
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
        } else if c == '<' && !matches!(chars.get(i + 1), Some('=' | ' ')) {
            let start = i + 1;
            let end = (start..chars.len())
                .find(|&j| chars[j] == '>')
                .ok_or_else(|| EndpointError::Syntax("unterminated IRI".into()))?;
            out.push(Tok::Iri(chars[start..end].iter().collect()));
            i = end + 1;
        } else if c == '?' || c == '$' {
            let start = i + 1;
            i = start;
            while i < chars.len() && word_char(chars[i]) {
                i += 1;
            }
            if i == start {
                return syntax("empty variable name");
            }
            out.push(Tok::Var(chars[start..i].iter().collect()));
        } else if c == '"' || c == '\'' {
            let (lexical, next) = string_literal(&chars, i)?;
            i = next;
            let term = if chars.get(i) == Some(&'@') {
                let start = i + 1;
                i = start;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '-') {
                    i += 1;
                }
                Term::lang(lexical, chars[start..i].iter().collect::<String>())
            } else if chars.get(i) == Some(&'^') && chars.get(i + 1) == Some(&'^') {
                i += 2;
                out.push(Tok::Literal(Term::literal(lexical)));
                out.push(Tok::Punct("^^"));
                continue;
            } else {
                Term::literal(lexical)
            };
            out.push(Tok::Literal(term));
        } else if c.is_ascii_digit() || (matches!(c, '-' | '+') && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit())) {
            let start = i;
            i += 1;
            while i < chars.len() && (chars[i].is_ascii_digit() || (chars[i] == '.' && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit()))) {
                i += 1;
            }
            let lexical: String = chars[start..i].iter().collect();
            let dt = if lexical.contains('.') { "decimal" } else { "integer" };
            out.push(Tok::Literal(Term::typed(lexical, format!("{XSD}{dt}"))));
        } else if let Some(p) = PUNCTS.iter().find(|p| {
            let n = p.chars().count();
            chars.get(i..i + n).is_some_and(|s| s.iter().copied().eq(p.chars()))
        }) {
            out.push(Tok::Punct(p));
            i += p.len();
        } else if word_char(c) || c == ':' {
            let start = i;
            while i < chars.len() && (word_char(chars[i]) || chars[i] == ':' || (chars[i] == '.' && chars.get(i + 1).is_some_and(|&d| word_char(d)))) {
                i += 1;
            }
            let word: String = chars[start..i].iter().collect();
            match word.split_once(':') {
                Some((p, l)) => out.push(Tok::PName(p.into(), l.into())),
                None => out.push(Tok::Word(word)),
            }
        } else {
            return syntax(format!("unexpected character {c:?}"));
        }
    }
    Ok(out)
}

fn string_literal(chars: &[char], start: usize) -> Result<(String, usize), EndpointError> {
    let q = chars[start];
    let long = chars.get(start + 1) == Some(&q) && chars.get(start + 2) == Some(&q);
    let mut i = start + if long { 3 } else { 1 };
    let mut s = String::new();
    loop {
        let Some(&c) = chars.get(i) else {
            return syntax("unterminated string");
        };
        if long && c == q && chars.get(i + 1) == Some(&q) && chars.get(i + 2) == Some(&q) {
            return Ok((s, i + 3));
        }
        if !long && c == q {
            return Ok((s, i + 1));
        }
        if !long && c == '\n' {
            return syntax("newline in string");
        }
        if c == '\\' {
            let e = chars.get(i + 1).copied();
            i += 2;
            match e {
                Some('n') => s.push('\n'),
                Some('r') => s.push('\r'),
                Some('t') => s.push('\t'),
                Some('b') => s.push('\u{8}'),
                Some('f') => s.push('\u{c}'),
                Some(c @ ('"' | '\'' | '\\')) => s.push(c),
                Some(u @ ('u' | 'U')) => {
                    let n = if u == 'u' { 4 } else { 8 };
                    let hex: String = chars.get(i..i + n).unwrap_or_default().iter().collect();
                    let ch = u32::from_str_radix(&hex, 16)
                        .ok()
                        .filter(|_| hex.len() == n)
                        .and_then(char::from_u32)
                        .ok_or_else(|| EndpointError::Syntax("bad \\u escape".into()))?;
                    s.push(ch);
                    i += n;
                }
                _ => return syntax("bad string escape"),
            }
            continue;
        }
        s.push(c);
        i += 1;
    }
}

#[derive(Debug, Clone)]
enum PatTerm {
    Var(String),
    Const(Term),
}

#[derive(Debug, Clone)]
enum Expr {
    Or(Box<Expr>, Box<Expr>),
    And(Box<Expr>, Box<Expr>),
    Not(Box<Expr>),
    Eq(Box<Expr>, Box<Expr>, bool),
    Call(String, Vec<Expr>),
    Var(String),
    Const(Term),
}

struct Parser {
    toks: Vec<Tok>,
    pos: usize,
    prefixes: HashMap<String, String>,
}

impl Parser {
    fn new(src: &str) -> Result<Parser, EndpointError> {
        Ok(Parser {
            toks: tokenize(src)?,
            pos: 0,
            prefixes: WELL_KNOWN_PREFIXES
                .iter()
                .map(|(p, ns)| (p.to_string(), ns.to_string()))
                .collect(),
        })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn at_end(&self) -> bool {
        self.pos >= self.toks.len()
    }

    fn is_word(&self, kw: &str) -> bool {
        matches!(self.peek(), Some(Tok::Word(w)) if w.eq_ignore_ascii_case(kw))
    }

    fn eat_word(&mut self, kw: &str) -> bool {
        let hit = self.is_word(kw);
        if hit {
            self.pos += 1;
        }
        hit
    }

    fn expect_word(&mut self, kw: &str) -> Result<(), EndpointError> {
        if self.eat_word(kw) {
            Ok(())
        } else {
            syntax(format!("expected {kw}"))
        }
    }

    fn eat(&mut self, p: &str) -> bool {
        let hit = matches!(self.peek(), Some(Tok::Punct(q)) if *q == p);
        if hit {
            self.pos += 1;
        }
        hit
    }

    fn expect(&mut self, p: &str) -> Result<(), EndpointError> {
        if self.eat(p) {
            Ok(())
        } else {
            syntax(format!("expected '{p}'"))
        }
    }

    fn prologue(&mut self) -> Result<(), EndpointError> {
        while self.eat_word("PREFIX") {
            let Some(Tok::PName(prefix, local)) = self.next() else {
                return syntax("expected prefix name");
            };
            if !local.is_empty() {
                return syntax("prefix name must end with ':'");
            }
            let Some(Tok::Iri(ns)) = self.next() else {
                return syntax("expected namespace IRI");
            };
            self.prefixes.insert(prefix, ns);
        }
        Ok(())
    }

    fn expand(&self, prefix: &str, local: &str) -> Result<String, EndpointError> {
        match self.prefixes.get(prefix) {
            Some(ns) => Ok(format!("{ns}{local}")),
            None => syntax(format!("undeclared prefix {prefix:?}")),
        }
    }

    fn constant(&mut self, tok: Tok) -> Result<Term, EndpointError> {
        match tok {
            Tok::Iri(i) => Ok(Term::Iri(i)),
            Tok::PName(p, l) => Ok(Term::Iri(self.expand(&p, &l)?)),
            Tok::Literal(t) => {
                if !self.eat("^^") {
                    return Ok(t);
                }
                let dt = match self.next() {
                    Some(Tok::Iri(i)) => i,
                    Some(Tok::PName(p, l)) => self.expand(&p, &l)?,
                    _ => return syntax("expected datatype IRI"),
                };
                Ok(Term::typed(t.lexical().unwrap_or_default(), dt))
            }
            Tok::Word(w) if w == "true" || w == "false" => Ok(Term::typed(w, format!("{XSD}boolean"))),
            other => syntax(format!("unexpected {other:?}")),
        }
    }

    fn pattern_term(&mut self, predicate: bool) -> Result<PatTerm, EndpointError> {
        match self.next() {
            Some(Tok::Var(v)) => Ok(PatTerm::Var(v)),
            Some(Tok::Word(w)) if predicate && w == "a" => Ok(PatTerm::Const(Term::iri(RDF_TYPE))),
            Some(t) => Ok(PatTerm::Const(self.constant(t)?)),
            None => syntax("unexpected end of input"),
        }
    }

    /// Triples block with `;` and `,` abbreviations, up to the closing brace
    /// (not consumed).
    fn triples_block(
        &mut self,
        patterns: &mut Vec<[PatTerm; 3]>,
        filters: &mut Vec<Expr>,
    ) -> Result<(), EndpointError> {
        loop {
            if matches!(self.peek(), Some(Tok::Punct("}")) | None) {
                return Ok(());
            }
            if self.eat_word("FILTER") {
                filters.push(self.bracketed()?);
                self.eat(".");
                continue;
            }
            let s = self.pattern_term(false)?;
            loop {
                let p = self.pattern_term(true)?;
                loop {
                    let o = self.pattern_term(false)?;
                    patterns.push([s.clone(), p.clone(), o]);
                    if !self.eat(",") {
                        break;
                    }
                }
                if !self.eat(";") || matches!(self.peek(), Some(Tok::Punct("." | "}"))) {
                    break;
                }
            }
            if !self.eat(".") && !matches!(self.peek(), Some(Tok::Punct("}")) | Some(Tok::Word(_))) {
                return syntax("expected '.' or '}'");
            }
        }
    }

    fn bracketed(&mut self) -> Result<Expr, EndpointError> {
        self.expect("(")?;
        let e = self.expr()?;
        self.expect(")")?;
        Ok(e)
    }

    fn expr(&mut self) -> Result<Expr, EndpointError> {
        let mut left = self.and_expr()?;
        while self.eat("||") {
            left = Expr::Or(Box::new(left), Box::new(self.and_expr()?));
        }
        Ok(left)
    }

    fn and_expr(&mut self) -> Result<Expr, EndpointError> {
        let mut left = self.rel_expr()?;
        while self.eat("&&") {
            left = Expr::And(Box::new(left), Box::new(self.rel_expr()?));
        }
        Ok(left)
    }

    fn rel_expr(&mut self) -> Result<Expr, EndpointError> {
        let left = self.unary()?;
        if self.eat("=") {
            return Ok(Expr::Eq(Box::new(left), Box::new(self.unary()?), true));
        }
        if self.eat("!=") {
            return Ok(Expr::Eq(Box::new(left), Box::new(self.unary()?), false));
        }
        Ok(left)
    }

    fn unary(&mut self) -> Result<Expr, EndpointError> {
        if self.eat("!") {
            return Ok(Expr::Not(Box::new(self.unary()?)));
        }
        if matches!(self.peek(), Some(Tok::Punct("("))) {
            return self.bracketed();
        }
        match self.next() {
            Some(Tok::Var(v)) => Ok(Expr::Var(v)),
            Some(Tok::Word(w)) if !(w == "true" || w == "false") => {
                let name = w.to_ascii_uppercase();
                self.expect("(")?;
                let mut args = Vec::new();
                if !self.eat(")") {
                    loop {
                        args.push(self.expr()?);
                        if self.eat(")") {
                            break;
                        }
                        self.expect(",")?;
                    }
                }
                Ok(Expr::Call(name, args))
            }
            Some(t) => Ok(Expr::Const(self.constant(t)?)),
            None => syntax("unexpected end of expression"),
        }
    }
}

type Row = HashMap<String, Term>;

#[derive(Debug, Clone, PartialEq)]
enum Val {
    Term(Term),
    Bool(bool),
    Str(String),
}

fn eval(e: &Expr, row: &Row) -> Option<Val> {
    let as_str = |v: Option<Val>| -> Option<String> {
        match v? {
            Val::Str(s) => Some(s),
            Val::Term(Term::Literal { lexical, .. }) => Some(lexical),
            _ => None,
        }
    };
    let as_bool = |v: Option<Val>| -> Option<bool> {
        match v? {
            Val::Bool(b) => Some(b),
            Val::Term(Term::Literal { lexical, .. }) if lexical == "true" || lexical == "false" => {
                Some(lexical == "true")
            }
            _ => None,
        }
    };
    match e {
        Expr::Var(v) => row.get(v).cloned().map(Val::Term),
        Expr::Const(t) => Some(Val::Term(t.clone())),
        Expr::Or(a, b) => Some(Val::Bool(
            as_bool(eval(a, row)).unwrap_or(false) || as_bool(eval(b, row)).unwrap_or(false),
        )),
        Expr::And(a, b) => Some(Val::Bool(
            as_bool(eval(a, row))? && as_bool(eval(b, row))?,
        )),
        Expr::Not(a) => Some(Val::Bool(!as_bool(eval(a, row))?)),
        Expr::Eq(a, b, positive) => {
            let (a, b) = (eval(a, row)?, eval(b, row)?);
            let same = match (&a, &b) {
                (Val::Str(x), Val::Term(Term::Literal { lexical, .. }))
                | (Val::Term(Term::Literal { lexical, .. }), Val::Str(x)) => x == lexical,
                _ => a == b,
            };
            Some(Val::Bool(same == *positive))
        }
        Expr::Call(name, args) => {
            let arg = |i: usize| args.get(i).and_then(|a| eval(a, row));
            let term = |i: usize| match arg(i) {
                Some(Val::Term(t)) => Some(t),
                _ => None,
            };
            match (name.as_str(), args.len()) {
                ("ISLITERAL", 1) => Some(Val::Bool(term(0)?.is_literal())),
                ("ISIRI" | "ISURI", 1) => Some(Val::Bool(matches!(term(0)?, Term::Iri(_)))),
                ("ISBLANK", 1) => Some(Val::Bool(matches!(term(0)?, Term::Blank(_)))),
                ("STR", 1) => match arg(0)? {
                    Val::Term(Term::Blank(_)) => None,
                    Val::Term(t) => Some(Val::Str(t.display_value())),
                    v => Some(v),
                },
                ("LCASE", 1) => Some(Val::Str(as_str(arg(0))?.to_lowercase())),
                ("UCASE", 1) => Some(Val::Str(as_str(arg(0))?.to_uppercase())),
                ("CONTAINS", 2) => Some(Val::Bool(as_str(arg(0))?.contains(&as_str(arg(1))?))),
                ("STRSTARTS", 2) => Some(Val::Bool(as_str(arg(0))?.starts_with(&as_str(arg(1))?))),
                _ => None,
            }
        }
    }
}

fn bind(row: &Row, pat: &PatTerm, value: &Term) -> Option<Row> {
    match pat {
        PatTerm::Const(t) => (t == value).then(|| row.clone()),
        PatTerm::Var(v) => match row.get(v) {
            Some(bound) => (bound == value).then(|| row.clone()),
            None => {
                let mut r = row.clone();
                r.insert(v.clone(), value.clone());
                Some(r)
            }
        },
    }
}

fn json_binding(t: &Term) -> Value {
    match t {
        Term::Iri(v) => json!({"type": "uri", "value": v}),
        Term::Blank(b) => json!({"type": "bnode", "value": b}),
        Term::Literal {
            lexical,
            datatype,
            language,
        } => {
            let mut m = Map::new();
            m.insert("type".into(), json!("literal"));
            m.insert("value".into(), json!(lexical));
            if let Some(l) = language {
                m.insert("xml:lang".into(), json!(l));
            } else if let Some(d) = datatype {
                m.insert("datatype".into(), json!(d));
            }
            Value::Object(m)
        }
    }
}

/// Evaluates a SELECT query and returns a SPARQL JSON results document.
pub fn query(store: &AnnotationStore, text: &str) -> Result<Value, EndpointError> {
    let mut p = Parser::new(text)?;
    p.prologue()?;
    p.expect_word("SELECT")?;
    let distinct = p.eat_word("DISTINCT");
    let mut vars = Vec::new();
    if !p.eat("*") {
        while let Some(Tok::Var(v)) = p.peek().cloned() {
            p.pos += 1;
            vars.push(v);
        }
        if vars.is_empty() {
            return syntax("SELECT needs variables or '*'");
        }
    }
    p.eat_word("WHERE");
    p.expect("{")?;
    let mut patterns = Vec::new();
    let mut filters = Vec::new();
    p.triples_block(&mut patterns, &mut filters)?;
    p.expect("}")?;
    let limit = if p.eat_word("LIMIT") {
        match p.next() {
            Some(Tok::Literal(t)) => t
                .lexical()
                .and_then(|l| l.parse::<usize>().ok())
                .ok_or_else(|| EndpointError::Syntax("bad LIMIT".into()))?,
            _ => return syntax("bad LIMIT"),
        }
    } else {
        usize::MAX
    };
    if !p.at_end() {
        return syntax("trailing input after query");
    }
    if vars.is_empty() {
        for pat in patterns.iter().flatten() {
            if let PatTerm::Var(v) = pat {
                if !vars.contains(v) {
                    vars.push(v.clone());
                }
            }
        }
    }

    let triples = store.all_triples()?;
    let mut rows: Vec<Row> = vec![Row::new()];
    for [s, pr, o] in &patterns {
        let mut next = Vec::new();
        for row in &rows {
            for t in &triples {
                let Some(r) = bind(row, s, &t.subject) else { continue };
                let Some(r) = bind(&r, pr, &Term::Iri(t.predicate.clone())) else { continue };
                if let Some(r) = bind(&r, o, &t.object) {
                    next.push(r);
                }
            }
        }
        rows = next;
    }
    rows.retain(|r| {
        filters
            .iter()
            .all(|f| matches!(eval(f, r), Some(Val::Bool(true))))
    });

    let mut seen = HashSet::new();
    let bindings: Vec<Value> = rows
        .iter()
        .map(|r| {
            vars.iter()
                .filter_map(|v| Some((v.clone(), r.get(v)?.clone())))
                .collect::<Vec<_>>()
        })
        .filter(|projected| !distinct || seen.insert(projected.clone()))
        .take(limit)
        .map(|projected| {
            Value::Object(
                projected
                    .iter()
                    .map(|(v, t)| (v.clone(), json_binding(t)))
                    .collect(),
            )
        })
        .collect();
    Ok(json!({"head": {"vars": vars}, "results": {"bindings": bindings}}))
}

/// Applies `INSERT DATA` operations (separated by `;`); returns the number
/// of triples submitted.
pub fn update(store: &AnnotationStore, text: &str) -> Result<usize, EndpointError> {
    let mut p = Parser::new(text)?;
    let mut count = 0;
    loop {
        p.prologue()?;
        if p.at_end() {
            return Ok(count);
        }
        p.expect_word("INSERT")?;
        p.expect_word("DATA")?;
        p.expect("{")?;
        let mut patterns = Vec::new();
        let mut filters = Vec::new();
        p.triples_block(&mut patterns, &mut filters)?;
        p.expect("}")?;
        if !filters.is_empty() {
            return syntax("FILTER is not allowed in INSERT DATA");
        }
        let mut triples = Vec::new();
        for [s, pr, o] in patterns {
            let (PatTerm::Const(s), PatTerm::Const(Term::Iri(pr)), PatTerm::Const(o)) = (s, pr, o) else {
                return syntax("INSERT DATA takes ground triples only");
            };
            triples.push(Triple::new(s, pr, o));
        }
        for t in triples {
            store.add_triple(t)?;
            count += 1;
        }
        if !p.eat(";") && !p.at_end() {
            return syntax("expected ';' between operations");
        }
    }
}
