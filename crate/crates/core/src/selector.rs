//! CSS selector subset: type / `*`, `#id`, `.class`, `[attr]`, `[attr=value]`
//! and `:nth-child(k)`, joined by descendant (` `) or child (`>`) combinators.

use std::fmt;

use thiserror::Error;

use crate::xml::{ParseMode, XmlNode};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{message} at position {position}")]
pub struct SelectorError {
    pub position: usize,
    pub message: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Combinator {
    Descendant,
    Child,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AttrMatch {
    Exists(String),
    Equals(String, String),
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Compound {
    /// `None` for `*` or an omitted type.
    pub tag: Option<String>,
    pub ids: Vec<String>,
    pub classes: Vec<String>,
    pub attrs: Vec<AttrMatch>,
    /// One-based positions among element siblings.
    pub nth_child: Vec<usize>,
}

impl Compound {
    fn matches(&self, node: &XmlNode, position: usize, mode: ParseMode) -> bool {
        let name_eq = |a: &str, b: &str| match mode {
            ParseMode::Html => a.eq_ignore_ascii_case(b),
            ParseMode::Xml => a == b,
        };
        let attr = |key: &str| {
            node.attributes
                .iter()
                .find(|(k, _)| name_eq(k, key))
                .map(|(_, v)| v.as_str())
        };
        if let Some(tag) = &self.tag {
            if !name_eq(tag, &node.name) {
                return false;
            }
        }
        if !self.ids.iter().all(|id| attr("id") == Some(id.as_str())) {
            return false;
        }
        if !self.classes.iter().all(|class| {
            attr("class").is_some_and(|v| v.split_ascii_whitespace().any(|t| t == class))
        }) {
            return false;
        }
        let attrs_ok = self.attrs.iter().all(|a| match a {
            AttrMatch::Exists(k) => attr(k).is_some(),
            AttrMatch::Equals(k, v) => attr(k) == Some(v.as_str()),
        });
        attrs_ok && self.nth_child.iter().all(|&k| k == position)
    }
}

/// Compounds left to right; `combinators[i]` joins `compounds[i]` and `compounds[i + 1]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Selector {
    pub compounds: Vec<Compound>,
    pub combinators: Vec<Combinator>,
}

impl Selector {
    pub fn parse(text: &str) -> Result<Selector, SelectorError> {
        Parser {
            chars: text.char_indices().collect(),
            i: 0,
            len: text.len(),
        }
        .selector()
    }

    /// Path (element-child indices from `root`) of the first match in
    /// depth-first document order. `root` itself is a candidate and counts
    /// as the first child of an implicit parent.
    pub fn select_first(&self, root: &XmlNode, mode: ParseMode) -> Option<Vec<usize>> {
        let mut chain: Vec<(&XmlNode, usize)> = vec![(root, 1)];
        let mut path: Vec<usize> = Vec::new();
        self.search(&mut chain, &mut path, mode)
    }

    fn search(
        &self,
        chain: &mut Vec<(&XmlNode, usize)>,
        path: &mut Vec<usize>,
        mode: ParseMode,
    ) -> Option<Vec<usize>> {
        if self.matches_at(chain, chain.len() - 1, self.compounds.len() - 1, mode) {
            return Some(path.clone());
        }
        let node = chain.last().expect("non-empty chain").0;
        for (i, child) in node.elements().enumerate() {
            chain.push((child, i + 1));
            path.push(i);
            let found = self.search(chain, path, mode);
            chain.pop();
            path.pop();
            if found.is_some() {
                return found;
            }
        }
        None
    }

    fn matches_at(
        &self,
        chain: &[(&XmlNode, usize)],
        at: usize,
        compound: usize,
        mode: ParseMode,
    ) -> bool {
        let (node, position) = chain[at];
        if !self.compounds[compound].matches(node, position, mode) {
            return false;
        }
        if compound == 0 {
            return true;
        }
        match self.combinators[compound - 1] {
            Combinator::Child => at > 0 && self.matches_at(chain, at - 1, compound - 1, mode),
            Combinator::Descendant => {
                (0..at).rev().any(|j| self.matches_at(chain, j, compound - 1, mode))
            }
        }
    }
}

impl fmt::Display for Selector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.compounds.iter().enumerate() {
            if i > 0 {
                match self.combinators[i - 1] {
                    Combinator::Child => f.write_str(" > ")?,
                    Combinator::Descendant => f.write_str(" ")?,
                }
            }
            let mut empty = true;
            if let Some(t) = &c.tag {
                f.write_str(t)?;
                empty = false;
            }
            for id in &c.ids {
                write!(f, "#{id}")?;
                empty = false;
            }
            for class in &c.classes {
                write!(f, ".{class}")?;
                empty = false;
            }
            for a in &c.attrs {
                match a {
                    AttrMatch::Exists(k) => write!(f, "[{k}]")?,
                    AttrMatch::Equals(k, v) => write!(f, "[{k}=\"{v}\"]")?,
                }
                empty = false;
            }
            for k in &c.nth_child {
                write!(f, ":nth-child({k})")?;
                empty = false;
            }
            if empty {
                f.write_str("*")?;
            }
        }
        Ok(())
    }
}

struct Parser {
    chars: Vec<(usize, char)>,
    i: usize,
    len: usize,
}

impl Parser {
    fn pos(&self) -> usize {
        self.chars.get(self.i).map_or(self.len, |&(p, _)| p)
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.i).map(|&(_, c)| c)
    }

    fn fail<T>(&self, message: impl Into<String>) -> Result<T, SelectorError> {
        Err(SelectorError {
            position: self.pos(),
            message: message.into(),
        })
    }

    fn skip_ws(&mut self) -> bool {
        let start = self.i;
        while self.peek().is_some_and(char::is_whitespace) {
            self.i += 1;
        }
        self.i > start
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.i += 1;
            true
        } else {
            false
        }
    }

    fn selector(mut self) -> Result<Selector, SelectorError> {
        self.skip_ws();
        let mut compounds = vec![self.compound()?];
        let mut combinators = Vec::new();
        loop {
            let had_ws = self.skip_ws();
            match self.peek() {
                None => break,
                Some('>') => {
                    self.i += 1;
                    self.skip_ws();
                    combinators.push(Combinator::Child);
                }
                Some(_) if had_ws => combinators.push(Combinator::Descendant),
                Some(c) => return self.fail(format!("unexpected {c:?}")),
            }
            compounds.push(self.compound()?);
        }
        Ok(Selector {
            compounds,
            combinators,
        })
    }

    fn compound(&mut self) -> Result<Compound, SelectorError> {
        let start = self.i;
        let mut c = Compound::default();
        if self.eat('*') {
        } else if self.peek().is_some_and(is_ident_start) {
            c.tag = Some(self.ident()?);
        }
        loop {
            match self.peek() {
                Some('#') => {
                    self.i += 1;
                    c.ids.push(self.ident()?);
                }
                Some('.') => {
                    self.i += 1;
                    c.classes.push(self.ident()?);
                }
                Some('[') => {
                    self.i += 1;
                    c.attrs.push(self.attribute()?);
                }
                Some(':') => {
                    self.i += 1;
                    c.nth_child.push(self.pseudo()?);
                }
                _ => break,
            }
        }
        if self.i == start {
            return match self.peek() {
                Some(ch) => self.fail(format!("unexpected {ch:?}")),
                None => self.fail("expected a selector"),
            };
        }
        Ok(c)
    }

    fn ident(&mut self) -> Result<String, SelectorError> {
        if !self.peek().is_some_and(is_ident_start) {
            return self.fail("expected an identifier");
        }
        let mut out = String::new();
        while let Some(ch) = self.peek().filter(|&ch| is_ident_char(ch)) {
            out.push(ch);
            self.i += 1;
        }
        Ok(out)
    }

    fn attribute(&mut self) -> Result<AttrMatch, SelectorError> {
        self.skip_ws();
        let name = self.ident()?;
        self.skip_ws();
        if self.eat(']') {
            return Ok(AttrMatch::Exists(name));
        }
        if !self.eat('=') {
            return self.fail("expected '=' or ']'");
        }
        self.skip_ws();
        let value = match self.peek() {
            Some(q @ ('"' | '\'')) => {
                self.i += 1;
                let mut v = String::new();
                loop {
                    match self.peek() {
                        None => return self.fail("unterminated string"),
                        Some(ch) if ch == q => {
                            self.i += 1;
                            break;
                        }
                        Some(ch) => {
                            v.push(ch);
                            self.i += 1;
                        }
                    }
                }
                v
            }
            _ => self.ident()?,
        };
        self.skip_ws();
        if !self.eat(']') {
            return self.fail("expected ']'");
        }
        Ok(AttrMatch::Equals(name, value))
    }

    fn pseudo(&mut self) -> Result<usize, SelectorError> {
        if self.peek() == Some(':') {
            return self.fail("pseudo-elements are not supported");
        }
        let name_pos = self.i;
        let name = self.ident()?;
        if name != "nth-child" {
            self.i = name_pos;
            return self.fail(format!("unsupported pseudo-class :{name}"));
        }
        if !self.eat('(') {
            return self.fail("expected '('");
        }
        self.skip_ws();
        let digits_pos = self.i;
        let mut digits = String::new();
        while let Some(d) = self.peek().filter(char::is_ascii_digit) {
            digits.push(d);
            self.i += 1;
        }
        let k: usize = match digits.parse() {
            Ok(k) if k > 0 => k,
            _ => {
                self.i = digits_pos;
                return self.fail("nth-child expects a positive integer");
            }
        };
        self.skip_ws();
        if !self.eat(')') {
            return self.fail("expected ')'");
        }
        Ok(k)
    }
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_' || c == '-' || !c.is_ascii()
}

fn is_ident_char(c: char) -> bool {
    is_ident_start(c) || c.is_ascii_digit()
}
