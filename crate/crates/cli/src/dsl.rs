//! Text format for presentations and named terms.
//!
//! ```text
//! ob X; ob Y;
//! mor f : X -> Y;
//! term main = f ; id(Y);
//! ```
//!
//! `;` both composes and terminates a declaration: it ends the declaration
//! when followed by a declaration keyword or the end of input. `*` binds
//! tighter than `;` and both associate to the left. A name in a term refers
//! to a generator or to an earlier term, which is inlined.

use std::collections::BTreeSet;
use std::fmt;

use catxai_core::diagram::{MorTerm, ObExpr, Presentation};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DslErrorKind {
    Syntax,
    Duplicate,
    Unbound,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{column}: {message}")]
pub struct DslError {
    pub kind: DslErrorKind,
    pub line: usize,
    pub column: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Decl {
    Ob(String),
    Mor {
        name: String,
        dom: ObExpr,
        cod: ObExpr,
    },
    Term {
        name: String,
        term: MorTerm,
    },
    /// built-in translator used by `run` when none is given on the command line
    Translator(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DslDocument {
    pub decls: Vec<Decl>,
}

impl DslDocument {
    pub fn presentation(&self) -> Presentation {
        let mut p = Presentation::new();
        for d in &self.decls {
            // names are unique by construction
            match d {
                Decl::Ob(n) => p.add_ob(n.clone()).expect("unique name"),
                Decl::Mor { name, dom, cod } => p.add_mor(name.clone(), dom.clone(), cod.clone()).expect("unique name"),
                _ => {}
            }
        }
        p
    }

    pub fn terms(&self) -> impl Iterator<Item = (&str, &MorTerm)> {
        self.decls.iter().filter_map(|d| match d {
            Decl::Term { name, term } => Some((name.as_str(), term)),
            _ => None,
        })
    }

    pub fn term(&self, name: &str) -> Option<&MorTerm> {
        self.terms().find(|(n, _)| *n == name).map(|(_, t)| t)
    }

    pub fn translator(&self) -> Option<&str> {
        self.decls.iter().find_map(|d| match d {
            Decl::Translator(n) => Some(n.as_str()),
            _ => None,
        })
    }

    pub fn count(&self) -> (usize, usize, usize) {
        let mut c = (0, 0, 0);
        for d in &self.decls {
            match d {
                Decl::Ob(_) => c.0 += 1,
                Decl::Mor { .. } => c.1 += 1,
                Decl::Term { .. } => c.2 += 1,
                Decl::Translator(_) => {}
            }
        }
        c
    }
}

impl fmt::Display for DslDocument {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for d in &self.decls {
            match d {
                Decl::Ob(n) => writeln!(f, "ob {n};")?,
                Decl::Mor { name, dom, cod } => writeln!(f, "mor {name} : {dom} -> {cod};")?,
                Decl::Term { name, term } => writeln!(f, "term {name} = {term};")?,
                Decl::Translator(n) => writeln!(f, "translator {n};")?,
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Semi,
    Colon,
    Arrow,
    Star,
    Comma,
    Eq,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Semi => f.write_str("`;`"),
            Tok::Colon => f.write_str("`:`"),
            Tok::Arrow => f.write_str("`->`"),
            Tok::Star => f.write_str("`*`"),
            Tok::Comma => f.write_str("`,`"),
            Tok::Eq => f.write_str("`=`"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::LBracket => f.write_str("`[`"),
            Tok::RBracket => f.write_str("`]`"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

const DECL_KEYWORDS: [&str; 4] = ["ob", "mor", "term", "translator"];
const KEYWORDS: [&str; 10] = ["ob", "mor", "term", "translator", "id", "copy", "discard", "sym", "fbk", "I"];

fn is_ident_start(c: char) -> bool {
    c.is_alphabetic() || c == '_'
}

fn is_ident_continue(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '\''
}

fn lex(text: &str) -> Result<Vec<(Tok, usize, usize)>, DslError> {
    let mut out = Vec::new();
    let (mut line, mut col) = (1, 1);
    let mut chars = text.chars().peekable();
    while let Some(&c) = chars.peek() {
        let (l, k) = (line, col);
        let mut bump = |chars: &mut std::iter::Peekable<std::str::Chars>| {
            let c = chars.next();
            if c == Some('\n') {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
            c
        };
        if c.is_whitespace() {
            bump(&mut chars);
            continue;
        }
        if c == '#' {
            while chars.peek().is_some_and(|&c| c != '\n') {
                bump(&mut chars);
            }
            continue;
        }
        let tok = if is_ident_start(c) {
            let mut s = String::new();
            while let Some(&c) = chars.peek() {
                if !is_ident_continue(c) {
                    break;
                }
                s.push(c);
                bump(&mut chars);
            }
            Tok::Ident(s)
        } else {
            bump(&mut chars);
            match c {
                ';' => Tok::Semi,
                ':' => Tok::Colon,
                '*' => Tok::Star,
                ',' => Tok::Comma,
                '=' => Tok::Eq,
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                '[' => Tok::LBracket,
                ']' => Tok::RBracket,
                '-' if chars.peek() == Some(&'>') => {
                    bump(&mut chars);
                    Tok::Arrow
                }
                other => {
                    return Err(DslError {
                        kind: DslErrorKind::Syntax,
                        line: l,
                        column: k,
                        message: format!("unexpected character `{other}`"),
                    })
                }
            }
        };
        out.push((tok, l, k));
    }
    out.push((Tok::Eof, line, col));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize, usize)>,
    pos: usize,
    pres: Presentation,
    names: BTreeSet<String>,
    doc: DslDocument,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].0
    }

    fn error_here(&self, kind: DslErrorKind, message: String) -> DslError {
        let (_, line, column) = self.toks[self.pos];
        DslError { kind, line, column, message }
    }

    fn unexpected(&self, what: &str) -> DslError {
        self.error_here(DslErrorKind::Syntax, format!("expected {what}, found {}", self.peek()))
    }

    fn advance(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, tok: Tok) -> Result<(), DslError> {
        if *self.peek() == tok {
            self.advance();
            Ok(())
        } else {
            Err(self.unexpected(&tok.to_string()))
        }
    }

    fn is_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn name(&mut self) -> Result<String, DslError> {
        match self.peek() {
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => {
                let s = s.clone();
                self.advance();
                Ok(s)
            }
            _ => Err(self.unexpected("a name")),
        }
    }

    fn fresh_name(&mut self) -> Result<String, DslError> {
        let at = self.pos;
        let n = self.name()?;
        if !self.names.insert(n.clone()) {
            let (_, line, column) = self.toks[at];
            return Err(DslError {
                kind: DslErrorKind::Duplicate,
                line,
                column,
                message: format!("`{n}` is already declared"),
            });
        }
        Ok(n)
    }

    fn document(mut self) -> Result<DslDocument, DslError> {
        while *self.peek() != Tok::Eof {
            let decl = self.decl()?;
            self.expect(Tok::Semi)?;
            self.doc.decls.push(decl);
        }
        Ok(self.doc)
    }

    fn decl(&mut self) -> Result<Decl, DslError> {
        let kw = match self.peek() {
            Tok::Ident(s) if DECL_KEYWORDS.contains(&s.as_str()) => s.clone(),
            _ => return Err(self.unexpected("`ob`, `mor`, `term` or `translator`")),
        };
        self.advance();
        match kw.as_str() {
            "ob" => {
                let n = self.fresh_name()?;
                self.pres.add_ob(n.clone()).expect("fresh name");
                Ok(Decl::Ob(n))
            }
            "mor" => {
                let name = self.fresh_name()?;
                self.expect(Tok::Colon)?;
                let dom = self.obexpr()?;
                self.expect(Tok::Arrow)?;
                let cod = self.obexpr()?;
                self.pres.add_mor(name.clone(), dom.clone(), cod.clone()).expect("fresh name");
                Ok(Decl::Mor { name, dom, cod })
            }
            "term" => {
                let name = self.fresh_name()?;
                self.expect(Tok::Eq)?;
                let term = self.morexpr()?;
                Ok(Decl::Term { name, term })
            }
            _ => {
                if self.doc.translator().is_some() {
                    return Err(self.error_here(DslErrorKind::Duplicate, "translator already chosen".into()));
                }
                Ok(Decl::Translator(self.name()?))
            }
        }
    }

    fn obexpr(&mut self) -> Result<ObExpr, DslError> {
        let mut ob = self.ob_atom()?;
        while *self.peek() == Tok::Star {
            self.advance();
            ob = ObExpr::tensor(ob, self.ob_atom()?);
        }
        Ok(ob.normal_form())
    }

    fn ob_atom(&mut self) -> Result<ObExpr, DslError> {
        if self.is_keyword("I") {
            self.advance();
            return Ok(ObExpr::Unit);
        }
        if *self.peek() == Tok::LParen {
            self.advance();
            let ob = self.obexpr()?;
            self.expect(Tok::RParen)?;
            return Ok(ob);
        }
        let at = self.pos;
        let n = self.name().map_err(|_| self.unexpected("an object"))?;
        if !self.pres.has_ob(&n) {
            let (_, line, column) = self.toks[at];
            return Err(DslError {
                kind: DslErrorKind::Unbound,
                line,
                column,
                message: format!("unknown object `{n}`"),
            });
        }
        Ok(ObExpr::gen(n))
    }

    /// A `;` continues the term unless a declaration keyword or the end of
    /// input follows it.
    fn semi_composes(&self) -> bool {
        *self.peek() == Tok::Semi
            && match self.peek_at(1) {
                Tok::Eof => false,
                Tok::Ident(s) => !DECL_KEYWORDS.contains(&s.as_str()),
                _ => true,
            }
    }

    fn morexpr(&mut self) -> Result<MorTerm, DslError> {
        let mut t = self.tensor()?;
        while self.semi_composes() {
            self.advance();
            t = MorTerm::compose(t, self.tensor()?);
        }
        Ok(t)
    }

    fn tensor(&mut self) -> Result<MorTerm, DslError> {
        let mut t = self.atom()?;
        while *self.peek() == Tok::Star {
            self.advance();
            t = MorTerm::tensor(t, self.atom()?);
        }
        Ok(t)
    }

    fn parenthesized_ob(&mut self) -> Result<ObExpr, DslError> {
        self.expect(Tok::LParen)?;
        let ob = self.obexpr()?;
        self.expect(Tok::RParen)?;
        Ok(ob)
    }

    fn atom(&mut self) -> Result<MorTerm, DslError> {
        let word = match self.peek() {
            Tok::LParen => {
                self.advance();
                let t = self.morexpr()?;
                self.expect(Tok::RParen)?;
                return Ok(t);
            }
            Tok::Ident(s) => s.clone(),
            _ => return Err(self.unexpected("a term")),
        };
        let at = self.pos;
        self.advance();
        match word.as_str() {
            "id" => Ok(MorTerm::Id(self.parenthesized_ob()?)),
            "copy" => Ok(MorTerm::Copy(self.parenthesized_ob()?)),
            "discard" => Ok(MorTerm::Discard(self.parenthesized_ob()?)),
            "sym" => {
                self.expect(Tok::LParen)?;
                let a = self.obexpr()?;
                self.expect(Tok::Comma)?;
                let b = self.obexpr()?;
                self.expect(Tok::RParen)?;
                Ok(MorTerm::Sym(a, b))
            }
            "fbk" => {
                self.expect(Tok::LBracket)?;
                let state = self.obexpr()?;
                self.expect(Tok::RBracket)?;
                self.expect(Tok::LParen)?;
                let inner = self.morexpr()?;
                self.expect(Tok::RParen)?;
                Ok(MorTerm::feedback(state, inner))
            }
            w if KEYWORDS.contains(&w) => {
                self.pos = at;
                Err(self.unexpected("a term"))
            }
            name => {
                if let Some((dom, cod)) = self.pres.mor(name) {
                    return Ok(MorTerm::gen(name, dom.clone(), cod.clone()));
                }
                if let Some(t) = self.doc.term(name) {
                    return Ok(t.clone());
                }
                let (_, line, column) = self.toks[at];
                Err(DslError {
                    kind: DslErrorKind::Unbound,
                    line,
                    column,
                    message: format!("unknown morphism `{name}`"),
                })
            }
        }
    }
}

pub fn parse(text: &str) -> Result<DslDocument, DslError> {
    let parser = Parser {
        toks: lex(text)?,
        pos: 0,
        pres: Presentation::new(),
        names: BTreeSet::new(),
        doc: DslDocument::default(),
    };
    parser.document()
}

/// Document declaring the presentation's generators followed by `terms`.
pub fn document_for(pres: &Presentation, terms: &[(&str, MorTerm)]) -> DslDocument {
    let mut decls: Vec<Decl> = pres.obs().iter().map(|o| Decl::Ob(o.clone())).collect();
    decls.extend(pres.mors().map(|(n, (d, c))| Decl::Mor {
        name: n.clone(),
        dom: d.normal_form(),
        cod: c.normal_form(),
    }));
    decls.extend(terms.iter().map(|(n, t)| Decl::Term { name: n.to_string(), term: t.clone() }));
    DslDocument { decls }
}
