//! Concrete syntax: declaration files, a parser that resolves names to de
//! Bruijn indices, and a pretty-printer whose output parses back to the
//! same term.
//!
//! ```text
//! file  := { decl } ;
//! decl  := "def" IDENT ":" type "=" term ";" ;
//! type  := sum [ "->" type ] ;  sum := prod { "+" prod } ;  prod := atomT { "*" atomT } ;
//! atomT := "N" | "(" type ")" ;
//! term  := atom { atom } ;
//! atom  := IDENT | NUMERAL | "\" IDENT ":" type "." term | "(" term ")"
//!        | "zero" | "suc" | "rec" "[" type "]"
//!        | ("pair" | "pr1" | "pr2" | "inl" | "inr") "[" type "," type "]"
//!        | "case" "[" type "," type "," type "]" ;
//! ```
//!
//! Comments run from `--` to the end of the line. Identifiers may contain
//! `-` when it is followed by a letter or digit, so `seq-len` is one name.

use std::collections::HashMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::prelude;
use crate::syntax::{typecheck, Ctx, Decl, Tm, Ty, TypeError};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum SurfaceError {
    #[error("{line}:{col}: syntax error: {message}")]
    SyntaxError {
        line: usize,
        col: usize,
        message: String,
    },
    #[error("{line}:{col}: unknown name `{name}`")]
    UnknownName {
        name: String,
        line: usize,
        col: usize,
    },
    #[error("{line}:{col}: `{name}` is already defined or reserved")]
    DuplicateName {
        name: String,
        line: usize,
        col: usize,
    },
    #[error("in `{name}`: {source}")]
    TypeError {
        name: String,
        #[source]
        source: TypeError,
    },
}

/// A parsed declaration file.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SourceFile {
    pub decls: Vec<Decl>,
}

impl SourceFile {
    pub fn get(&self, name: &str) -> Option<&Decl> {
        self.decls.iter().find(|d| d.name == name)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.decls.iter().map(|d| d.name.as_str())
    }
}

const KEYWORDS: [&str; 11] = [
    "def", "N", "zero", "suc", "rec", "pair", "pr1", "pr2", "inl", "inr", "case",
];

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Num(u64),
    Sym(&'static str),
    Eof,
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

const SYMBOLS: [&str; 13] = [
    "->", ":", "=", ";", "+", "*", "(", ")", "[", "]", ",", "\\", ".",
];

fn lex(text: &str) -> Result<Vec<Token>, SurfaceError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);
    let advance = |i: &mut usize, line: &mut usize, col: &mut usize, c: char| {
        *i += 1;
        if c == '\n' {
            *line += 1;
            *col = 1;
        } else {
            *col += 1;
        }
    };
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            advance(&mut i, &mut line, &mut col, c);
            continue;
        }
        if c == '-' && chars.get(i + 1) == Some(&'-') {
            while i < chars.len() && chars[i] != '\n' {
                let d = chars[i];
                advance(&mut i, &mut line, &mut col, d);
            }
            continue;
        }
        let (tl, tc) = (line, col);
        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() {
                let d = chars[i];
                let dash_joins =
                    d == '-' && chars.get(i + 1).is_some_and(|e| e.is_ascii_alphanumeric());
                if d.is_ascii_alphanumeric() || d == '_' || d == '\'' || dash_joins {
                    advance(&mut i, &mut line, &mut col, d);
                } else {
                    break;
                }
            }
            let word: String = chars[start..i].iter().collect();
            out.push(Token {
                tok: Tok::Ident(word),
                line: tl,
                col: tc,
            });
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                let d = chars[i];
                advance(&mut i, &mut line, &mut col, d);
            }
            let digits: String = chars[start..i].iter().collect();
            let n = digits.parse().map_err(|_| SurfaceError::SyntaxError {
                line: tl,
                col: tc,
                message: format!("numeral `{digits}` is too large"),
            })?;
            out.push(Token {
                tok: Tok::Num(n),
                line: tl,
                col: tc,
            });
            continue;
        }
        let sym = SYMBOLS.iter().find(|s| {
            s.chars()
                .enumerate()
                .all(|(k, sc)| chars.get(i + k) == Some(&sc))
        });
        match sym {
            Some(s) => {
                for _ in 0..s.len() {
                    let d = chars[i];
                    advance(&mut i, &mut line, &mut col, d);
                }
                out.push(Token {
                    tok: Tok::Sym(s),
                    line: tl,
                    col: tc,
                });
            }
            None => {
                return Err(SurfaceError::SyntaxError {
                    line,
                    col,
                    message: format!("unexpected character `{c}`"),
                })
            }
        }
    }
    out.push(Token {
        tok: Tok::Eof,
        line,
        col,
    });
    Ok(out)
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    scope: Vec<String>,
    defs: HashMap<String, Tm>,
}

impl Parser {
    fn new(text: &str, defs: HashMap<String, Tm>) -> Result<Parser, SurfaceError> {
        Ok(Parser {
            toks: lex(text)?,
            pos: 0,
            scope: Vec::new(),
            defs,
        })
    }

    fn finish(&self) -> Result<(), SurfaceError> {
        match &self.peek().tok {
            Tok::Eof => Ok(()),
            other => self.error(format!("unexpected {}", describe(other))),
        }
    }

    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn next(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T, SurfaceError> {
        let t = self.peek();
        Err(SurfaceError::SyntaxError {
            line: t.line,
            col: t.col,
            message: message.into(),
        })
    }

    fn is_sym(&self, s: &str) -> bool {
        matches!(&self.peek().tok, Tok::Sym(x) if *x == s)
    }

    fn is_word(&self, w: &str) -> bool {
        matches!(&self.peek().tok, Tok::Ident(x) if x == w)
    }

    fn expect_sym(&mut self, s: &str) -> Result<(), SurfaceError> {
        if self.is_sym(s) {
            self.next();
            Ok(())
        } else {
            self.error(format!(
                "expected `{s}`, found {}",
                describe(&self.peek().tok)
            ))
        }
    }

    fn ident(&mut self) -> Result<(String, usize, usize), SurfaceError> {
        match self.peek().tok.clone() {
            Tok::Ident(w) if !KEYWORDS.contains(&w.as_str()) => {
                let t = self.next();
                Ok((w, t.line, t.col))
            }
            other => self.error(format!(
                "expected an identifier, found {}",
                describe(&other)
            )),
        }
    }

    fn ty(&mut self) -> Result<Ty, SurfaceError> {
        let dom = self.sum_ty()?;
        if self.is_sym("->") {
            self.next();
            Ok(Ty::arrow(dom, self.ty()?))
        } else {
            Ok(dom)
        }
    }

    fn sum_ty(&mut self) -> Result<Ty, SurfaceError> {
        let mut t = self.prod_ty()?;
        while self.is_sym("+") {
            self.next();
            t = Ty::sum(t, self.prod_ty()?);
        }
        Ok(t)
    }

    fn prod_ty(&mut self) -> Result<Ty, SurfaceError> {
        let mut t = self.atom_ty()?;
        while self.is_sym("*") {
            self.next();
            t = Ty::prod(t, self.atom_ty()?);
        }
        Ok(t)
    }

    fn atom_ty(&mut self) -> Result<Ty, SurfaceError> {
        if self.is_word("N") {
            self.next();
            Ok(Ty::Nat)
        } else if self.is_sym("(") {
            self.next();
            let t = self.ty()?;
            self.expect_sym(")")?;
            Ok(t)
        } else {
            self.error(format!(
                "expected a type, found {}",
                describe(&self.peek().tok)
            ))
        }
    }

    fn ty_params(&mut self, count: usize) -> Result<Vec<Ty>, SurfaceError> {
        self.expect_sym("[")?;
        let mut out = vec![self.ty()?];
        for _ in 1..count {
            self.expect_sym(",")?;
            out.push(self.ty()?);
        }
        self.expect_sym("]")?;
        Ok(out)
    }

    fn starts_atom(&self) -> bool {
        match &self.peek().tok {
            Tok::Ident(w) => w != "def",
            Tok::Num(_) => true,
            Tok::Sym(s) => *s == "(" || *s == "\\",
            Tok::Eof => false,
        }
    }

    fn term(&mut self) -> Result<Tm, SurfaceError> {
        let mut t = self.atom()?;
        while self.starts_atom() {
            let a = self.atom()?;
            t = Tm::app(t, a);
        }
        Ok(t)
    }

    fn atom(&mut self) -> Result<Tm, SurfaceError> {
        let tok = self.peek().clone();
        match tok.tok {
            Tok::Num(n) => {
                self.next();
                Ok(Tm::numeral(n))
            }
            Tok::Sym("(") => {
                self.next();
                let t = self.term()?;
                self.expect_sym(")")?;
                Ok(t)
            }
            Tok::Sym("\\") => {
                self.next();
                let (name, ..) = self.ident()?;
                self.expect_sym(":")?;
                let dom = self.ty()?;
                self.expect_sym(".")?;
                self.scope.push(name);
                let body = self.term();
                self.scope.pop();
                Ok(Tm::lam(dom, body?))
            }
            Tok::Ident(w) => {
                self.next();
                self.word(&w, tok.line, tok.col)
            }
            other => self.error(format!("expected a term, found {}", describe(&other))),
        }
    }

    fn word(&mut self, w: &str, line: usize, col: usize) -> Result<Tm, SurfaceError> {
        let two = |p: &mut Self| -> Result<(Ty, Ty), SurfaceError> {
            let v = p.ty_params(2)?;
            Ok((v[0].clone(), v[1].clone()))
        };
        Ok(match w {
            "zero" => Tm::Zero,
            "suc" => Tm::Suc,
            "rec" => Tm::Rec(self.ty_params(1)?.remove(0)),
            "pair" => two(self).map(|(l, r)| Tm::Pair(l, r))?,
            "pr1" => two(self).map(|(l, r)| Tm::Pr1(l, r))?,
            "pr2" => two(self).map(|(l, r)| Tm::Pr2(l, r))?,
            "inl" => two(self).map(|(l, r)| Tm::Inl(l, r))?,
            "inr" => two(self).map(|(l, r)| Tm::Inr(l, r))?,
            "case" => {
                let v = self.ty_params(3)?;
                Tm::Case(v[0].clone(), v[1].clone(), v[2].clone())
            }
            "def" | "N" => {
                return Err(SurfaceError::SyntaxError {
                    line,
                    col,
                    message: format!("unexpected keyword `{w}`"),
                })
            }
            _ => self.resolve(w, line, col)?,
        })
    }

    fn resolve(&mut self, w: &str, line: usize, col: usize) -> Result<Tm, SurfaceError> {
        if let Some(k) = self.scope.iter().rev().position(|s| s == w) {
            return Ok(Tm::Var(k));
        }
        if let Some(body) = self.defs.get(w) {
            return Ok(body.clone());
        }
        if prelude::is_prelude_name(w) {
            let params = if prelude::expects_type_param(w) {
                self.ty_params(1)?
            } else {
                Vec::new()
            };
            let (_, tm) =
                prelude::prelude_term(w, &params).map_err(|e| SurfaceError::SyntaxError {
                    line,
                    col,
                    message: e.to_string(),
                })?;
            return Ok(tm);
        }
        Err(SurfaceError::UnknownName {
            name: w.to_string(),
            line,
            col,
        })
    }

    fn decl(&mut self) -> Result<Decl, SurfaceError> {
        if !self.is_word("def") {
            return self.error(format!(
                "expected `def`, found {}",
                describe(&self.peek().tok)
            ));
        }
        self.next();
        let (name, line, col) = self.ident()?;
        if self.defs.contains_key(&name) || prelude::is_prelude_name(&name) {
            return Err(SurfaceError::DuplicateName { name, line, col });
        }
        self.expect_sym(":")?;
        let ty = self.ty()?;
        self.expect_sym("=")?;
        let body = self.term()?;
        self.expect_sym(";")?;
        check_decl(&name, &ty, &body)?;
        Ok(Decl { name, ty, body })
    }
}

fn check_decl(name: &str, ty: &Ty, body: &Tm) -> Result<(), SurfaceError> {
    let found = typecheck(&Ctx::new(), body).map_err(|source| SurfaceError::TypeError {
        name: name.to_string(),
        source,
    })?;
    if &found != ty {
        return Err(SurfaceError::TypeError {
            name: name.to_string(),
            source: TypeError::TypeMismatch {
                expected: ty.clone(),
                found,
                path: Vec::new(),
            },
        });
    }
    Ok(())
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Ident(w) => format!("`{w}`"),
        Tok::Num(n) => format!("`{n}`"),
        Tok::Sym(s) => format!("`{s}`"),
        Tok::Eof => "end of input".to_string(),
    }
}

/// Parses a declaration file. Every declaration is typechecked.
pub fn parse(text: &str) -> Result<SourceFile, SurfaceError> {
    let mut p = Parser::new(text, HashMap::new())?;
    let mut decls: Vec<Decl> = Vec::new();
    while p.peek().tok != Tok::Eof {
        let d = p.decl()?;
        p.defs.insert(d.name.clone(), d.body.clone());
        decls.push(d);
    }
    Ok(SourceFile { decls })
}

/// Parses a single term, which may mention prelude names and `defs`.
pub fn parse_term(text: &str, defs: &SourceFile) -> Result<Tm, SurfaceError> {
    let table = defs
        .decls
        .iter()
        .map(|d| (d.name.clone(), d.body.clone()))
        .collect();
    let mut p = Parser::new(text, table)?;
    let t = p.term()?;
    p.finish()?;
    Ok(t)
}

pub fn parse_type(text: &str) -> Result<Ty, SurfaceError> {
    let mut p = Parser::new(text, HashMap::new())?;
    let t = p.ty()?;
    p.finish()?;
    Ok(t)
}

/// Prints a closed term.
pub fn pretty(t: &Tm) -> String {
    pretty_open(0, t)
}

/// Prints a term whose free variables come from a context of length
/// `depth`; the binder at level `l` is written `x{l}`.
pub fn pretty_open(depth: usize, t: &Tm) -> String {
    let mut s = String::new();
    write_tm(&mut s, depth, t, Prec::Top);
    s
}

/// `def name : ty = body;`
pub fn pretty_decl(d: &Decl) -> String {
    format!("def {} : {} = {};", d.name, d.ty, pretty(&d.body))
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Prec {
    Top,
    Fn,
    Arg,
}

fn write_tm(s: &mut String, depth: usize, t: &Tm, prec: Prec) {
    if let Some(n) = t.as_numeral() {
        let _ = write!(s, "{n}");
        return;
    }
    match t {
        Tm::Var(i) => {
            let _ = write!(s, "x{}", depth.wrapping_sub(i + 1));
        }
        Tm::Lam(ty, body) => {
            if prec > Prec::Top {
                s.push('(');
            }
            let _ = write!(s, "\\x{depth}:{ty}. ");
            write_tm(s, depth + 1, body, Prec::Top);
            if prec > Prec::Top {
                s.push(')');
            }
        }
        Tm::App(f, a) => {
            if prec == Prec::Arg {
                s.push('(');
            }
            write_tm(s, depth, f, Prec::Fn);
            s.push(' ');
            write_tm(s, depth, a, Prec::Arg);
            if prec == Prec::Arg {
                s.push(')');
            }
        }
        Tm::Zero => s.push('0'),
        Tm::Suc => s.push_str("suc"),
        Tm::Rec(m) => {
            let _ = write!(s, "rec[{m}]");
        }
        Tm::Pair(l, r) => {
            let _ = write!(s, "pair[{l}, {r}]");
        }
        Tm::Pr1(l, r) => {
            let _ = write!(s, "pr1[{l}, {r}]");
        }
        Tm::Pr2(l, r) => {
            let _ = write!(s, "pr2[{l}, {r}]");
        }
        Tm::Inl(l, r) => {
            let _ = write!(s, "inl[{l}, {r}]");
        }
        Tm::Inr(l, r) => {
            let _ = write!(s, "inr[{l}, {r}]");
        }
        Tm::Case(l, r, m) => {
            let _ = write!(s, "case[{l}, {r}, {m}]");
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simple_decl() {
        let f = parse("def f : N -> N = \\a:N. suc a;").unwrap();
        assert_eq!(f.decls.len(), 1);
        assert_eq!(f.decls[0].ty, Ty::seq());
    }

    #[test]
    fn numeral_sugar() {
        let f = parse("def three : N = 3;").unwrap();
        assert_eq!(f.decls[0].body, Tm::numeral(3));
        assert_eq!(
            f.decls[0].body,
            Tm::app(Tm::Suc, Tm::app(Tm::Suc, Tm::app(Tm::Suc, Tm::Zero)))
        );
    }

    #[test]
    fn arity_mismatch_is_a_type_error() {
        assert!(matches!(
            parse("def bad : N = suc;"),
            Err(SurfaceError::TypeError { .. })
        ));
    }

    #[test]
    fn pretty_examples() {
        assert_eq!(pretty(&Tm::lam(Ty::Nat, Tm::Var(0))), "\\x0:N. x0");
        assert_eq!(pretty(&Tm::numeral(2)), "2");
    }

    #[test]
    fn type_precedence() {
        let t = parse_type("N * N + N -> N -> N").unwrap();
        let expected = Ty::arrow(Ty::sum(Ty::prod(Ty::Nat, Ty::Nat), Ty::Nat), Ty::seq());
        assert_eq!(t, expected);
        assert_eq!(parse_type(&expected.to_string()).unwrap(), expected);
        let left = parse_type("N + N + N").unwrap();
        assert_eq!(left, Ty::sum(Ty::sum(Ty::Nat, Ty::Nat), Ty::Nat));
    }

    #[test]
    fn names_resolve_in_order() {
        let f = parse(
            "def one : N = 1; -- a comment\n\
             def two : N = suc one;\n\
             def m : N = max two one;\n\
             def shadow : N -> N = \\max:N. max;",
        )
        .unwrap();
        assert_eq!(f.get("two").unwrap().body, Tm::numeral(2));
        assert_eq!(f.get("shadow").unwrap().body, Tm::lam(Ty::Nat, Tm::Var(0)));
        let m = &f.get("m").unwrap().body;
        assert_eq!(
            *m,
            Tm::apps(prelude::max(), [Tm::numeral(2), Tm::numeral(1)])
        );
    }

    #[test]
    fn parametrised_prelude_names() {
        let f = parse("def z : N = ifz[N] 0 4 5; def l : N = seq-len seq-nil;").unwrap();
        assert_eq!(f.decls.len(), 2);
    }

    #[test]
    fn located_errors() {
        assert_eq!(
            parse("def f : N =\n  nope;"),
            Err(SurfaceError::UnknownName {
                name: "nope".into(),
                line: 2,
                col: 3
            })
        );
        assert!(matches!(
            parse("def f : N = (1;"),
            Err(SurfaceError::SyntaxError {
                line: 1,
                col: 15,
                ..
            })
        ));
        assert!(matches!(
            parse("def f : N = 1 ? 2;"),
            Err(SurfaceError::SyntaxError {
                line: 1,
                col: 15,
                ..
            })
        ));
        assert!(matches!(
            parse("def a : N = 0; def a : N = 1;"),
            Err(SurfaceError::DuplicateName { .. })
        ));
        assert!(matches!(
            parse("def max : N = 0;"),
            Err(SurfaceError::DuplicateName { .. })
        ));
    }

    #[test]
    fn round_trip_constants() {
        let src = "def p : N * N = pair[N, N] 1 2;\n\
                   def c : N = case[N, N, N] (\\a:N. a) (\\b:N. suc b) (inr[N, N] 4);\n\
                   def r : N -> N = \\n:N. rec[N -> N] (\\k:N. k) (\\a:N. \\f:N -> N. f) n 3;";
        let f = parse(src).unwrap();
        for d in &f.decls {
            let printed = pretty_decl(d);
            let back = parse(&printed).unwrap();
            assert_eq!(back.decls[0], *d, "{printed}");
        }
    }
}
