//! Text format for presentations, splittings and graphs of groups.
//!
//! ```text
//! < a, b, c | a^2 b^2 c^3 >
//! amalgam < a, s | > < t | > : a [s,a] = t^2
//! hnn < x | > t : t x t^-1 = x^2
//! graph { u = < a, b | >; v = < c | >; edge u v : a b = c^3; loop u t : a = b; }
//! ```
//!
//! Words are juxtaposed factors; `^k` takes integer powers, a trailing `'`
//! inverts, `[u, v]` is `u⁻¹v⁻¹uv`, `1` is the identity. An identifier that
//! is not a generator name but spells a sequence of one-letter generators is
//! read as their product (`ab^2` is `a b^2`). `#` starts a comment.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use super::{GraphEdge, GraphOfGroups, Presentation, SplittingSpec};
use crate::words::{Letter, Word};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    Syntax(String),
    UnknownGenerator(String),
    IdentityRelator,
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub kind: ParseErrorKind,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: ", self.line, self.column)?;
        match &self.kind {
            ParseErrorKind::Syntax(m) => write!(f, "syntax error: {m}"),
            ParseErrorKind::UnknownGenerator(g) => write!(f, "unknown generator {g:?}"),
            ParseErrorKind::IdentityRelator => f.write_str("relator reduces to the identity"),
            ParseErrorKind::Invalid(m) => write!(f, "invalid structure: {m}"),
        }
    }
}

/// Any top-level object of the text format.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Parsed {
    Presentation(Presentation),
    Splitting(SplittingSpec),
    Graph(GraphOfGroups),
}

impl fmt::Display for Parsed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Parsed::Presentation(p) => p.fmt(f),
            Parsed::Splitting(s) => s.fmt(f),
            Parsed::Graph(g) => g.fmt(f),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(i64),
    Sym(char),
    Eof,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    column: usize,
}

fn lex(src: &str) -> Result<Vec<Token>, ParseError> {
    let mut out = Vec::new();
    let chars: Vec<char> = src.chars().collect();
    let (mut i, mut line, mut col) = (0, 1, 1);
    while i < chars.len() {
        let c = chars[i];
        let (tl, tc) = (line, col);
        if c == '\n' {
            line += 1;
            col = 1;
            i += 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            col += i - start;
            out.push(Token { tok: Tok::Ident(chars[start..i].iter().collect()), line: tl, column: tc });
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            col += i - start;
            let text: String = chars[start..i].iter().collect();
            let n = text.parse().map_err(|_| ParseError {
                line: tl,
                column: tc,
                kind: ParseErrorKind::Syntax(format!("integer {text} too large")),
            })?;
            out.push(Token { tok: Tok::Int(n), line: tl, column: tc });
            continue;
        }
        if "<>|,=:;()[]{}^'-*".contains(c) {
            out.push(Token { tok: Tok::Sym(c), line: tl, column: tc });
            i += 1;
            col += 1;
            continue;
        }
        return Err(ParseError {
            line: tl,
            column: tc,
            kind: ParseErrorKind::Syntax(format!("unexpected character {c:?}")),
        });
    }
    out.push(Token { tok: Tok::Eof, line, column: col });
    Ok(out)
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].tok
    }

    fn err(&self, kind: ParseErrorKind) -> ParseError {
        let t = &self.toks[self.pos];
        ParseError { line: t.line, column: t.column, kind }
    }

    fn syntax(&self, msg: impl Into<String>) -> ParseError {
        self.err(ParseErrorKind::Syntax(msg.into()))
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn eat(&mut self, c: char) -> bool {
        if *self.peek() == Tok::Sym(c) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), ParseError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.syntax(format!("expected '{c}', found {}", describe(self.peek()))))
        }
    }

    fn ident(&mut self) -> Result<String, ParseError> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok(s)
            }
            other => Err(self.syntax(format!("expected identifier, found {}", describe(&other)))),
        }
    }

    fn top(&mut self) -> Result<Parsed, ParseError> {
        let parsed = match self.peek().clone() {
            Tok::Sym('<') => Parsed::Presentation(self.presentation()?),
            Tok::Ident(k) if k == "amalgam" => {
                self.bump();
                Parsed::Splitting(self.amalgam()?)
            }
            Tok::Ident(k) if k == "hnn" => {
                self.bump();
                Parsed::Splitting(self.hnn()?)
            }
            Tok::Ident(k) if k == "graph" => {
                self.bump();
                Parsed::Graph(self.graph()?)
            }
            other => {
                return Err(self.syntax(format!(
                    "expected a presentation, 'amalgam', 'hnn' or 'graph', found {}",
                    describe(&other)
                )))
            }
        };
        if *self.peek() != Tok::Eof {
            return Err(self.syntax(format!("trailing input: {}", describe(self.peek()))));
        }
        Ok(parsed)
    }

    fn presentation(&mut self) -> Result<Presentation, ParseError> {
        self.expect('<')?;
        let mut names: Vec<String> = Vec::new();
        if !matches!(self.peek(), Tok::Sym('|')) {
            loop {
                let at = self.pos;
                let n = self.ident()?;
                if names.contains(&n) {
                    self.pos = at;
                    return Err(self.err(ParseErrorKind::Invalid(format!("duplicate generator {n:?}"))));
                }
                names.push(n);
                if !self.eat(',') {
                    break;
                }
            }
        }
        self.expect('|')?;
        let mut relators = Vec::new();
        if !matches!(self.peek(), Tok::Sym('>')) {
            loop {
                let at = self.pos;
                let lhs = self.word(&names)?;
                let r = if self.eat('=') {
                    let rhs = self.word(&names)?;
                    &lhs * &rhs.inverse()
                } else {
                    lhs
                };
                if r.is_identity() {
                    self.pos = at;
                    return Err(self.err(ParseErrorKind::IdentityRelator));
                }
                relators.push(r);
                if !self.eat(',') {
                    break;
                }
            }
        }
        self.expect('>')?;
        Presentation::new(names, relators, "").map_err(|e| self.err(ParseErrorKind::Invalid(e.to_string())))
    }

    fn amalgam(&mut self) -> Result<SplittingSpec, ParseError> {
        let left = self.presentation()?;
        let right = self.presentation()?;
        self.expect(':')?;
        let u = self.word(left.names())?;
        self.expect('=')?;
        let v = self.word(right.names())?;
        SplittingSpec::amalgam(left, right, u, v).map_err(|e| self.err(ParseErrorKind::Invalid(e.to_string())))
    }

    /// `t u t^-1 = v` over the base alphabet extended by `t`.
    fn conjugation(&mut self, base: &Presentation, stable: &str) -> Result<(Word, Word), ParseError> {
        let mut ext: Vec<String> = base.names().to_vec();
        ext.push(stable.to_string());
        let t = base.rank();
        let at = self.pos;
        let lhs = self.word(&ext)?;
        self.expect('=')?;
        let v = self.word(base.names())?;
        let l = lhs.letters();
        let shaped = l.len() >= 3
            && l[0] == Letter::pos(t)
            && l[l.len() - 1] == Letter::neg(t)
            && l[1..l.len() - 1].iter().all(|x| x.gen != t);
        if !shaped {
            self.pos = at;
            return Err(self.syntax(format!("expected '{stable} u {stable}^-1' with u free of {stable}")));
        }
        let u = Word::reduce(l[1..l.len() - 1].iter().copied(), base.rank()).expect("in range");
        Ok((u, v))
    }

    fn hnn(&mut self) -> Result<SplittingSpec, ParseError> {
        let base = self.presentation()?;
        let stable = self.ident()?;
        if base.index_of(&stable).is_some() {
            return Err(self.err(ParseErrorKind::Invalid(format!("stable letter {stable:?} is a base generator"))));
        }
        self.expect(':')?;
        let (u, v) = self.conjugation(&base, &stable)?;
        SplittingSpec::hnn(base, u, v, stable).map_err(|e| self.err(ParseErrorKind::Invalid(e.to_string())))
    }

    fn graph(&mut self) -> Result<GraphOfGroups, ParseError> {
        self.expect('{')?;
        let mut vertices: BTreeMap<String, Presentation> = BTreeMap::new();
        let mut edges = Vec::new();
        while !self.eat('}') {
            if self.eat(';') {
                continue;
            }
            let lookup = |p: &Parser, v: &str, vs: &BTreeMap<String, Presentation>| {
                vs.get(v).cloned().ok_or_else(|| p.err(ParseErrorKind::Invalid(format!("unknown vertex {v:?}"))))
            };
            match (self.peek().clone(), self.peek_at(1).clone()) {
                (Tok::Ident(id), Tok::Sym('=')) => {
                    self.bump();
                    self.bump();
                    let p = self.presentation()?.with_label(id.clone());
                    if vertices.insert(id.clone(), p).is_some() {
                        return Err(self.err(ParseErrorKind::Invalid(format!("duplicate vertex {id:?}"))));
                    }
                }
                (Tok::Ident(k), _) if k == "edge" => {
                    self.bump();
                    let s = self.ident()?;
                    let src = lookup(self, &s, &vertices)?;
                    let t = self.ident()?;
                    let tgt = lookup(self, &t, &vertices)?;
                    self.expect(':')?;
                    let u = self.word(src.names())?;
                    self.expect('=')?;
                    let w = self.word(tgt.names())?;
                    edges.push(GraphEdge { source: s, target: t, source_word: u, target_word: w, stable: None });
                }
                (Tok::Ident(k), _) if k == "loop" => {
                    self.bump();
                    let v = self.ident()?;
                    let host = lookup(self, &v, &vertices)?;
                    let stable = self.ident()?;
                    self.expect(':')?;
                    let u = self.word(host.names())?;
                    self.expect('=')?;
                    let w = self.word(host.names())?;
                    edges.push(GraphEdge {
                        source: v.clone(),
                        target: v,
                        source_word: u,
                        target_word: w,
                        stable: Some(stable),
                    });
                }
                (other, _) => {
                    return Err(self.syntax(format!(
                        "expected vertex declaration, 'edge' or 'loop', found {}",
                        describe(&other)
                    )))
                }
            }
            if !matches!(self.peek(), Tok::Sym('}')) {
                self.expect(';')?;
            }
        }
        GraphOfGroups::new(vertices, edges).map_err(|e| self.err(ParseErrorKind::Invalid(e.to_string())))
    }

    fn word(&mut self, names: &[String]) -> Result<Word, ParseError> {
        let rank = names.len();
        let mut acc = Word::identity(rank);
        loop {
            match self.peek() {
                Tok::Ident(_) | Tok::Int(_) | Tok::Sym('(') | Tok::Sym('[') => {
                    let f = self.factor(names)?;
                    acc = &acc * &f;
                }
                Tok::Sym('*') => {
                    self.bump();
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn factor(&mut self, names: &[String]) -> Result<Word, ParseError> {
        let (prefix, mut last) = self.atom(names)?;
        loop {
            if self.eat('\'') {
                last = last.inverse();
            } else if self.eat('^') {
                let neg = self.eat('-');
                let k = match self.bump() {
                    Tok::Int(k) => k,
                    other => {
                        self.pos -= 1;
                        return Err(self.syntax(format!("expected exponent, found {}", describe(&other))));
                    }
                };
                last = last.pow(if neg { -k } else { k });
            } else {
                break;
            }
        }
        Ok(&prefix * &last)
    }

    /// Returns `(prefix, last)`: postfix operators bind to `last` only.
    fn atom(&mut self, names: &[String]) -> Result<(Word, Word), ParseError> {
        let rank = names.len();
        let id = Word::identity(rank);
        match self.peek().clone() {
            Tok::Int(1) => {
                self.bump();
                Ok((id.clone(), id))
            }
            Tok::Int(n) => Err(self.syntax(format!("unexpected integer {n}"))),
            Tok::Sym('(') => {
                self.bump();
                let w = self.word(names)?;
                self.expect(')')?;
                Ok((id, w))
            }
            Tok::Sym('[') => {
                self.bump();
                let a = self.word(names)?;
                self.expect(',')?;
                let b = self.word(names)?;
                self.expect(']')?;
                Ok((id, Word::commutator(&a, &b)))
            }
            Tok::Ident(s) => {
                if let Some(i) = names.iter().position(|n| *n == s) {
                    self.bump();
                    return Ok((id, Word::generator(i, rank)));
                }
                let split: Option<Vec<usize>> = s
                    .chars()
                    .map(|c| names.iter().position(|n| n.len() == 1 && n.starts_with(c)))
                    .collect();
                match split {
                    Some(gens) if gens.len() > 1 => {
                        self.bump();
                        let (last, init) = gens.split_last().expect("non-empty");
                        let prefix = Word::reduce(init.iter().map(|&g| Letter::pos(g)), rank).expect("in range");
                        Ok((prefix, Word::generator(*last, rank)))
                    }
                    _ => Err(self.err(ParseErrorKind::UnknownGenerator(s))),
                }
            }
            other => Err(self.syntax(format!("expected a word, found {}", describe(&other)))),
        }
    }
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Ident(s) => format!("'{s}'"),
        Tok::Int(n) => format!("'{n}'"),
        Tok::Sym(c) => format!("'{c}'"),
        Tok::Eof => "end of input".to_string(),
    }
}

/// Parses one presentation, splitting or graph of groups.
pub fn parse(text: &str) -> Result<Parsed, ParseError> {
    let toks = lex(text)?;
    Parser { toks, pos: 0 }.top()
}

/// Parses a word over the given generator names.
pub fn parse_word<S: AsRef<str>>(text: &str, names: &[S]) -> Result<Word, ParseError> {
    let names: Vec<String> = names.iter().map(|s| s.as_ref().to_string()).collect();
    let mut p = Parser { toks: lex(text)?, pos: 0 };
    let w = p.word(&names)?;
    if *p.peek() != Tok::Eof {
        return Err(p.syntax(format!("trailing input: {}", describe(p.peek()))));
    }
    Ok(w)
}
