//! Labeled bracket notation.
//!
//! ```text
//! SO    := ATOM | '[' ('_' LABEL)? SO SO ']' | '~' SO '~'
//! ATOM  := WORD (':' CAT)? ('{' FEAT (',' FEAT)* '}')?
//!        | ':' CAT ('{' … '}')?        covert item with a category
//!        | '∅'                         covert item
//! FEAT  := ('+' | '-') NAME
//! ```
//!
//! `~…~` marks a lower copy. It is chained to the leftmost preceding
//! unmarked term with identical content and shares that term's occurrence
//! ids. `#` starts a comment running to the end of the line.

use std::fmt;

use thiserror::Error;

use crate::syntax::{
    Category, EqMode, Feature, FeatureSet, Label, LexicalItem, OccurrenceId, SyntacticObject,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BracketErrorKind {
    Unbalanced,
    Arity,
    Feature,
    Category,
    Copy,
    Empty,
    Unexpected,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{column}: {message}")]
pub struct BracketError {
    pub kind: BracketErrorKind,
    pub line: usize,
    pub column: usize,
    pub message: String,
}

struct Parser<'a> {
    chars: Vec<char>,
    pos: usize,
    text: &'a str,
    next_occ: OccurrenceId,
    /// Completed unmarked terms: (start offset, content key, term).
    antecedents: Vec<(usize, String, SyntacticObject)>,
    in_copy: usize,
}

fn is_word_char(c: char) -> bool {
    !c.is_whitespace() && !matches!(c, '[' | ']' | '{' | '}' | '~' | '#' | ':' | ',')
}

fn is_label_char(c: char) -> bool {
    !c.is_whitespace() && !matches!(c, '[' | ']' | '{' | '}' | '~' | '#')
}

impl<'a> Parser<'a> {
    fn new(text: &'a str) -> Self {
        Parser {
            chars: text.chars().collect(),
            pos: 0,
            text,
            next_occ: 0,
            antecedents: Vec::new(),
            in_copy: 0,
        }
    }

    fn location(&self, pos: usize) -> (usize, usize) {
        let mut line = 1;
        let mut col = 1;
        for c in self.chars.iter().take(pos) {
            if *c == '\n' {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
        }
        (line, col)
    }

    fn err_at(&self, pos: usize, kind: BracketErrorKind, message: impl Into<String>) -> BracketError {
        let (line, column) = self.location(pos);
        BracketError { kind, line, column, message: message.into() }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.pos += 1;
            } else if c == '#' {
                while let Some(c) = self.peek() {
                    if c == '\n' {
                        break;
                    }
                    self.pos += 1;
                }
            } else {
                break;
            }
        }
    }

    fn take_while(&mut self, f: impl Fn(char) -> bool) -> String {
        let start = self.pos;
        while self.peek().is_some_and(&f) {
            self.pos += 1;
        }
        self.chars[start..self.pos].iter().collect()
    }

    fn parse_document(mut self) -> Result<SyntacticObject, BracketError> {
        self.skip_ws();
        if self.peek().is_none() {
            return Err(self.err_at(self.pos, BracketErrorKind::Empty, "no structure in input"));
        }
        let so = self.parse_so()?;
        self.skip_ws();
        if let Some(c) = self.peek() {
            let kind = if c == ']' { BracketErrorKind::Unbalanced } else { BracketErrorKind::Unexpected };
            let msg = if c == ']' {
                "unbalanced brackets: unexpected ']'".to_string()
            } else {
                format!("unexpected {c:?} after a complete structure (one structure per input)")
            };
            return Err(self.err_at(self.pos, kind, msg));
        }
        let _ = self.text;
        Ok(so)
    }

    fn parse_so(&mut self) -> Result<SyntacticObject, BracketError> {
        self.skip_ws();
        let start = self.pos;
        let so = match self.peek() {
            None => return Err(self.err_at(self.pos, BracketErrorKind::Unbalanced, "unbalanced brackets: unexpected end of input")),
            Some('[') => self.parse_node()?,
            Some('~') => return self.parse_copy(),
            Some(']') => {
                return Err(self.err_at(self.pos, BracketErrorKind::Arity, "a node must have exactly two daughters"))
            }
            Some(_) => self.parse_atom()?,
        };
        if self.in_copy == 0 {
            let key = so.content_key(EqMode::OrderSensitive);
            self.antecedents.push((start, key, so.clone()));
        }
        Ok(so)
    }

    fn parse_copy(&mut self) -> Result<SyntacticObject, BracketError> {
        let start = self.pos;
        self.pos += 1;
        self.in_copy += 1;
        let body = self.parse_so()?;
        self.in_copy -= 1;
        self.skip_ws();
        if self.peek() != Some('~') {
            return Err(self.err_at(self.pos, BracketErrorKind::Copy, "unterminated copy: expected closing '~'"));
        }
        self.pos += 1;
        let key = body.content_key(EqMode::OrderSensitive);
        let antecedent = self
            .antecedents
            .iter()
            .filter(|(s, k, _)| *s < start && *k == key)
            .min_by_key(|(s, _, _)| *s)
            .map(|(_, _, so)| so.clone());
        match antecedent {
            Some(so) => Ok(so),
            None => Err(self.err_at(
                start,
                BracketErrorKind::Copy,
                format!("copy {key} has no preceding antecedent"),
            )),
        }
    }

    fn parse_node(&mut self) -> Result<SyntacticObject, BracketError> {
        let open = self.pos;
        self.pos += 1;
        let label = if self.peek() == Some('_') {
            self.pos += 1;
            let name = self.take_while(is_label_char);
            if name.is_empty() {
                return Err(self.err_at(self.pos, BracketErrorKind::Unexpected, "empty label after '_'"));
            }
            Some(Label::named(&name))
        } else {
            None
        };
        let left = self.parse_so()?;
        self.skip_ws();
        if self.peek() == Some(']') {
            return Err(self.err_at(self.pos, BracketErrorKind::Arity, "a node must have exactly two daughters, found one"));
        }
        let right = self.parse_so()?;
        self.skip_ws();
        match self.peek() {
            Some(']') => {
                self.pos += 1;
                Ok(SyntacticObject::node(left, right, label))
            }
            None => Err(self.err_at(open, BracketErrorKind::Unbalanced, "unbalanced brackets: '[' is never closed")),
            Some(_) => Err(self.err_at(
                self.pos,
                BracketErrorKind::Arity,
                "a node must have exactly two daughters, found more",
            )),
        }
    }

    fn parse_atom(&mut self) -> Result<SyntacticObject, BracketError> {
        let start = self.pos;
        let mut phon = self.take_while(is_word_char);
        if phon == "∅" {
            phon.clear();
        }
        let mut category = None;
        if self.peek() == Some(':') {
            self.pos += 1;
            let cpos = self.pos;
            let cat = self.take_while(is_word_char);
            category = Some(cat.parse::<Category>().map_err(|_| {
                self.err_at(cpos, BracketErrorKind::Category, format!("unknown category {cat:?}"))
            })?);
        }
        let mut features = FeatureSet::new();
        if self.peek() == Some('{') {
            self.pos += 1;
            loop {
                self.skip_ws();
                let fpos = self.pos;
                let raw = self.take_while(|c| !c.is_whitespace() && c != ',' && c != '}');
                let f: Feature = raw.parse().map_err(|_| {
                    self.err_at(fpos, BracketErrorKind::Feature, format!("bad feature {raw:?}: expected +NAME or -NAME"))
                })?;
                features
                    .insert(f)
                    .map_err(|e| self.err_at(fpos, BracketErrorKind::Feature, e.to_string()))?;
                self.skip_ws();
                match self.peek() {
                    Some(',') => self.pos += 1,
                    Some('}') => {
                        self.pos += 1;
                        break;
                    }
                    _ => return Err(self.err_at(self.pos, BracketErrorKind::Feature, "unterminated feature list")),
                }
            }
        }
        if self.pos == start {
            let c = self.peek().unwrap_or(' ');
            return Err(self.err_at(start, BracketErrorKind::Unexpected, format!("unexpected {c:?}")));
        }
        let occ = self.next_occ;
        self.next_occ += 1;
        Ok(SyntacticObject::leaf(LexicalItem { phon, category, features }, occ))
    }
}

/// Parses one structure.
pub fn parse_bracket(text: &str) -> Result<SyntacticObject, BracketError> {
    Parser::new(text).parse_document()
}

/// Text form of a single lexical item as it appears in bracket notation.
pub fn print_item(item: &LexicalItem) -> String {
    let mut s = String::new();
    if item.phon.is_empty() {
        s.push('∅');
    } else {
        s.push_str(&item.phon);
    }
    if let Some(c) = item.category {
        s.push(':');
        s.push_str(c.symbol());
    }
    if !item.features.is_empty() {
        s.push('{');
        s.push_str(&item.features.to_string());
        s.push('}');
    }
    s
}

fn write_plain(so: &SyntacticObject, out: &mut String) {
    match so.daughters() {
        None => out.push_str(&print_item(so.item().unwrap())),
        Some((l, r)) => {
            out.push('[');
            if let Some(label) = so.label() {
                out.push('_');
                out.push_str(&label.category);
                out.push(' ');
            }
            write_plain(l, out);
            out.push(' ');
            write_plain(r, out);
            out.push(']');
        }
    }
}

/// Canonical text: single spaces, no newlines, `~` around lower copies.
pub fn print_bracket(so: &SyntacticObject) -> String {
    let info = so.copy_info();
    let mut out = String::new();
    fn go(so: &SyntacticObject, path: crate::syntax::Path, info: &crate::syntax::CopyInfo, out: &mut String) {
        if info.is_lower(&path) {
            out.push('~');
            write_plain(so, out);
            out.push('~');
            return;
        }
        match so.daughters() {
            None => out.push_str(&print_item(so.item().unwrap())),
            Some((l, r)) => {
                out.push('[');
                if let Some(label) = so.label() {
                    out.push('_');
                    out.push_str(&label.category);
                    out.push(' ');
                }
                go(l, path.child(crate::syntax::Branch::Left), info, out);
                out.push(' ');
                go(r, path.child(crate::syntax::Branch::Right), info, out);
                out.push(']');
            }
        }
    }
    go(so, crate::syntax::Path::root(), &info, &mut out);
    out
}

impl fmt::Display for SyntacticObject {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_bracket(self))
    }
}
