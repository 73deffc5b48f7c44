use std::fmt::Write as _;

use super::{is_absolute_iri, RdfSyntaxError, Term, Triple};

/// Character cursor shared by the N-Triples and Turtle readers.
pub(super) struct Cursor<'a> {
    pub src: &'a str,
    pub pos: usize,
}

impl<'a> Cursor<'a> {
    pub fn new(src: &'a str) -> Self {
        Cursor { src, pos: 0 }
    }

    pub fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    pub fn peek(&self) -> Option<char> {
        self.rest().chars().next()
    }

    pub fn at_end(&self) -> bool {
        self.pos >= self.src.len()
    }

    pub fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        Some(c)
    }

    pub fn eat(&mut self, s: &str) -> bool {
        if self.rest().starts_with(s) {
            self.pos += s.len();
            true
        } else {
            false
        }
    }

    pub fn error<T>(&self, message: impl Into<String>) -> Result<T, RdfSyntaxError> {
        self.error_at(self.pos, message)
    }

    pub fn error_at<T>(&self, pos: usize, message: impl Into<String>) -> Result<T, RdfSyntaxError> {
        let before = &self.src[..pos.min(self.src.len())];
        let line = before.matches('\n').count() + 1;
        let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
        Err(RdfSyntaxError {
            line,
            column,
            message: message.into(),
        })
    }

    /// Skips spaces and tabs only (N-Triples is line-oriented).
    pub fn skip_blanks(&mut self) {
        while matches!(self.peek(), Some(' ' | '\t')) {
            self.pos += 1;
        }
    }

    /// Skips all whitespace and `#` comments.
    pub fn skip_ws_comments(&mut self) {
        loop {
            match self.peek() {
                Some(c) if c.is_whitespace() => {
                    self.bump();
                }
                Some('#') => {
                    while !matches!(self.peek(), None | Some('\n')) {
                        self.bump();
                    }
                }
                _ => return,
            }
        }
    }

    pub fn iri_ref(&mut self) -> Result<String, RdfSyntaxError> {
        let start = self.pos;
        if !self.eat("<") {
            return self.error("expected '<'");
        }
        let mut out = String::new();
        loop {
            match self.bump() {
                None => return self.error_at(start, "unterminated IRI"),
                Some('>') => break,
                Some('\\') => out.push(self.uchar()?),
                Some(c)
                    if c <= ' '
                        || matches!(c, '<' | '"' | '{' | '}' | '|' | '^' | '`') =>
                {
                    return self.error_at(self.pos - c.len_utf8(), format!("character {c:?} not allowed in IRI"));
                }
                Some(c) => out.push(c),
            }
        }
        Ok(out)
    }

    /// `\uXXXX` or `\UXXXXXXXX`, with the backslash already consumed.
    pub fn uchar(&mut self) -> Result<char, RdfSyntaxError> {
        let start = self.pos;
        let len = match self.bump() {
            Some('u') => 4,
            Some('U') => 8,
            _ => return self.error_at(start, "bad escape in IRI"),
        };
        self.hex_char(len, start)
    }

    fn hex_char(&mut self, len: usize, start: usize) -> Result<char, RdfSyntaxError> {
        let hex = self.rest().get(..len).unwrap_or("");
        if hex.len() != len || !hex.bytes().all(|b| b.is_ascii_hexdigit()) {
            return self.error_at(start, "bad unicode escape");
        }
        self.pos += len;
        u32::from_str_radix(hex, 16)
            .ok()
            .and_then(char::from_u32)
            .map_or_else(|| self.error_at(start, "escape is not a scalar value"), Ok)
    }

    /// String body after the opening quote(s); `long` for triple-quoted forms.
    pub fn string_body(&mut self, quote: char, long: bool) -> Result<String, RdfSyntaxError> {
        let start = self.pos;
        let mut out = String::new();
        loop {
            if long {
                let close: String = std::iter::repeat_n(quote, 3).collect();
                if self.eat(&close) {
                    return Ok(out);
                }
            }
            match self.bump() {
                None => return self.error_at(start, "unterminated string"),
                Some(c) if c == quote && !long => return Ok(out),
                Some('\n' | '\r') if !long => return self.error("newline in string"),
                Some('\\') => {
                    let esc = self.pos;
                    let c = match self.bump() {
                        Some('t') => '\t',
                        Some('b') => '\u{8}',
                        Some('n') => '\n',
                        Some('r') => '\r',
                        Some('f') => '\u{c}',
                        Some('"') => '"',
                        Some('\'') => '\'',
                        Some('\\') => '\\',
                        Some('u') => self.hex_char(4, esc)?,
                        Some('U') => self.hex_char(8, esc)?,
                        _ => return self.error_at(esc, "bad string escape"),
                    };
                    out.push(c);
                }
                Some(c) => out.push(c),
            }
        }
    }

    pub fn lang_tag(&mut self) -> Result<String, RdfSyntaxError> {
        let start = self.pos;
        let mut out = String::new();
        while let Some(c) = self.peek().filter(|c| c.is_ascii_alphanumeric() || *c == '-') {
            out.push(c);
            self.pos += 1;
        }
        let mut parts = out.split('-');
        let first_ok = parts
            .next()
            .is_some_and(|p| !p.is_empty() && p.chars().all(|c| c.is_ascii_alphabetic()));
        if !first_ok || parts.any(str::is_empty) {
            return self.error_at(start, "bad language tag");
        }
        Ok(out)
    }

    pub fn blank_label(&mut self) -> Result<String, RdfSyntaxError> {
        let start = self.pos;
        if !self.eat("_:") {
            return self.error("expected blank node");
        }
        let mut out = String::new();
        while let Some(c) = self
            .peek()
            .filter(|c| c.is_alphanumeric() || matches!(c, '_' | '-' | '.'))
        {
            out.push(c);
            self.bump();
        }
        while out.ends_with('.') {
            out.pop();
            self.pos -= 1;
        }
        if out.is_empty() {
            return self.error_at(start, "empty blank node label");
        }
        Ok(out)
    }
}

fn absolute(c: &Cursor<'_>, start: usize, iri: String) -> Result<String, RdfSyntaxError> {
    if is_absolute_iri(&iri) {
        Ok(iri)
    } else {
        c.error_at(start, format!("IRI <{iri}> is not absolute"))
    }
}

fn nt_term(c: &mut Cursor<'_>, allow_literal: bool) -> Result<Term, RdfSyntaxError> {
    let start = c.pos;
    match c.peek() {
        Some('<') => {
            let iri = c.iri_ref()?;
            Ok(Term::Iri(absolute(c, start, iri)?))
        }
        Some('_') => Ok(Term::Blank(c.blank_label()?)),
        Some('"') if allow_literal => {
            c.bump();
            let lexical = c.string_body('"', false)?;
            if c.eat("^^") {
                let dt_start = c.pos;
                let dt = c.iri_ref()?;
                Ok(Term::typed(lexical, absolute(c, dt_start, dt)?))
            } else if c.eat("@") {
                Ok(Term::lang(lexical, c.lang_tag()?))
            } else {
                Ok(Term::literal(lexical))
            }
        }
        _ => c.error("expected a term"),
    }
}

/// Parses a complete N-Triples document.
pub fn parse_ntriples(src: &str) -> Result<Vec<Triple>, RdfSyntaxError> {
    let mut c = Cursor::new(src);
    let mut out = Vec::new();
    loop {
        c.skip_blanks();
        match c.peek() {
            None => return Ok(out),
            Some('\n' | '\r') => {
                c.bump();
                continue;
            }
            Some('#') => {}
            Some(_) => {
                let subject = nt_term(&mut c, false)?;
                c.skip_blanks();
                let pred_start = c.pos;
                let predicate = c.iri_ref()?;
                let predicate = absolute(&c, pred_start, predicate)?;
                c.skip_blanks();
                let object = nt_term(&mut c, true)?;
                c.skip_blanks();
                if !c.eat(".") {
                    return c.error("expected '.'");
                }
                out.push(Triple::new(subject, predicate, object));
                c.skip_blanks();
            }
        }
        match c.peek() {
            None => {}
            Some('#') => {
                while !matches!(c.peek(), None | Some('\n')) {
                    c.bump();
                }
            }
            Some('\n' | '\r') => {}
            Some(_) => return c.error("expected end of line"),
        }
    }
}

/// One triple per line.
pub fn write_ntriples<'a>(triples: impl IntoIterator<Item = &'a Triple>) -> String {
    let mut out = String::new();
    for t in triples {
        let _ = writeln!(out, "{t}");
    }
    out
}

pub(crate) fn escape_string(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            '"' => out.push_str("\\\""),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if c.is_control() => {
                let _ = write!(out, "\\u{:04X}", c as u32);
            }
            c => out.push(c),
        }
    }
    out
}

pub(crate) fn escape_iri(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        if c <= ' ' || matches!(c, '<' | '>' | '"' | '{' | '}' | '|' | '^' | '`' | '\\') {
            let _ = write!(out, "\\u{:04X}", c as u32);
        } else {
            out.push(c);
        }
    }
    out
}
